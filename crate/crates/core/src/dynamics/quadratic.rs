use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::dynamics::QuadTensor;
use crate::error::{dims, Error, Result};
use crate::linalg::{ensure_len, ensure_square};
use crate::mateq::LtiSystem;
use crate::scalar::Real;

/// Continuous-time system `ẋ = A x + G(x ⊗ x) + B u`, `y = C x`, `x(0) = x0`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticSystem<T: Real> {
    pub a: DMatrix<T>,
    pub g: QuadTensor<T>,
    pub b: DMatrix<T>,
    pub c: DMatrix<T>,
    pub x0: DVector<T>,
}

impl<T: Real> QuadraticSystem<T> {
    pub fn new(
        a: DMatrix<T>,
        g: QuadTensor<T>,
        b: DMatrix<T>,
        c: DMatrix<T>,
        x0: DVector<T>,
    ) -> Result<Self> {
        let n = ensure_square(&a, "QuadraticSystem A")?;
        if g.rows() != n || g.state_dim() != n {
            return Err(dims(
                "QuadraticSystem G",
                format!("{n}x{}", n * n),
                format!("{}x{}", g.rows(), g.state_dim() * g.state_dim()),
            ));
        }
        if b.nrows() != n {
            return Err(dims("QuadraticSystem B rows", n, b.nrows()));
        }
        if c.ncols() != n {
            return Err(dims("QuadraticSystem C cols", n, c.ncols()));
        }
        ensure_len(&x0, n, "QuadraticSystem x0")?;
        Ok(Self { a, g, b, c, x0 })
    }

    /// Same system with `G` replaced by its Kronecker-symmetrized form.
    pub fn with_symmetric_g(mut self) -> Self {
        self.g = self.g.symmetrized();
        self
    }

    pub fn state_dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn input_dim(&self) -> usize {
        self.b.ncols()
    }

    pub fn output_dim(&self) -> usize {
        self.c.nrows()
    }

    /// `A x + G(x ⊗ x) + B u`.
    pub fn rhs(&self, x: &DVector<T>, u: &DVector<T>) -> Result<DVector<T>> {
        ensure_len(u, self.input_dim(), "QuadraticSystem u")?;
        Ok(&self.a * x + self.g.apply(x)? + &self.b * u)
    }

    /// `A + G(x ⊗ I + I ⊗ x)`.
    pub fn state_jacobian(&self, x: &DVector<T>) -> Result<DMatrix<T>> {
        ensure_len(x, self.state_dim(), "QuadraticSystem x")?;
        let mut j = self.a.clone();
        self.g.add_jacobian_to(x, T::one(), &mut j);
        Ok(j)
    }

    /// Linearization about the origin.
    pub fn linearization(&self) -> LtiSystem<T> {
        LtiSystem { a: self.a.clone(), b: self.b.clone(), c: self.c.clone() }
    }

    pub fn to_document(&self) -> QuadraticSystemDoc {
        QuadraticSystemDoc {
            n: self.state_dim(),
            m: self.input_dim(),
            p: self.output_dim(),
            a: rows_of(&self.a),
            b: rows_of(&self.b),
            c: rows_of(&self.c),
            g_triplets: self.g.triplets().map(|(r, c, v)| (r, c, v.as_f64())).collect(),
            x0: self.x0.iter().map(|v| v.as_f64()).collect(),
        }
    }

    pub fn from_document(doc: &QuadraticSystemDoc) -> Result<Self> {
        let a = matrix_from_rows(&doc.a, doc.n, doc.n, "A")?;
        let b = matrix_from_rows(&doc.b, doc.n, doc.m, "B")?;
        let c = matrix_from_rows(&doc.c, doc.p, doc.n, "C")?;
        let g = QuadTensor::from_triplets(
            doc.n,
            doc.n,
            doc.g_triplets.iter().map(|&(r, c, v)| (r, c, T::lit(v))),
        )?;
        if doc.x0.len() != doc.n {
            return Err(dims("QuadraticSystem document x0", doc.n, doc.x0.len()));
        }
        let x0 = DVector::from_iterator(doc.n, doc.x0.iter().map(|&v| T::lit(v)));
        Self::new(a, g, b, c, x0)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(&self.to_document()).map_err(|e| Error::Serialization(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: QuadraticSystemDoc =
            serde_json::from_str(s).map_err(|e| Error::Serialization(e.to_string()))?;
        Self::from_document(&doc)
    }
}

/// On-disk form of a [`QuadraticSystem`]. Matrices are row-major nested
/// arrays; `G_triplets` holds `(row, column, value)` with column `j·n + k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadraticSystemDoc {
    pub n: usize,
    pub m: usize,
    pub p: usize,
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    #[serde(rename = "B")]
    pub b: Vec<Vec<f64>>,
    #[serde(rename = "C")]
    pub c: Vec<Vec<f64>>,
    #[serde(rename = "G_triplets")]
    pub g_triplets: Vec<(usize, usize, f64)>,
    pub x0: Vec<f64>,
}

pub(crate) fn rows_of<T: Real>(m: &DMatrix<T>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().map(|v| v.as_f64()).collect()).collect()
}

pub(crate) fn matrix_from_rows<T: Real>(
    rows: &[Vec<f64>],
    nrows: usize,
    ncols: usize,
    context: &'static str,
) -> Result<DMatrix<T>> {
    if rows.len() != nrows || rows.iter().any(|r| r.len() != ncols) {
        return Err(dims(context, format!("{nrows}x{ncols}"), format!("{} rows", rows.len())));
    }
    Ok(DMatrix::from_fn(nrows, ncols, |i, j| T::lit(rows[i][j])))
}
