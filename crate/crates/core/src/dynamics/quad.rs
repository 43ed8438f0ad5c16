//! Sparse storage for Kronecker-quadratic operators `G ∈ R^{p×n²}`.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};

use crate::error::{dims, Result};
use crate::scalar::Real;

/// One nonzero of `G`: contributes `value · x[j] · x[k]` to output `row`.
///
/// The column of `G` is `j·n + k`, matching `x ⊗ x = [x₁xᵀ, …, xₙxᵀ]ᵀ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadEntry<T> {
    pub row: usize,
    pub j: usize,
    pub k: usize,
    pub value: T,
}

/// Kronecker-quadratic operator stored as sparse triplets.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadTensor<T: Real> {
    rows: usize,
    n: usize,
    entries: Vec<QuadEntry<T>>,
}

impl<T: Real> QuadTensor<T> {
    pub fn zeros(rows: usize, n: usize) -> Self {
        Self { rows, n, entries: Vec::new() }
    }

    /// Builds from `(row, column, value)` triplets with `column < n²`.
    /// Duplicate positions are summed.
    pub fn from_triplets(
        rows: usize,
        n: usize,
        triplets: impl IntoIterator<Item = (usize, usize, T)>,
    ) -> Result<Self> {
        let mut entries = Vec::new();
        for (row, col, value) in triplets {
            if row >= rows {
                return Err(dims("QuadTensor row index", format!("< {rows}"), row));
            }
            if col >= n * n {
                return Err(dims("QuadTensor column index", format!("< {}", n * n), col));
            }
            entries.push(QuadEntry { row, j: col / n, k: col % n, value });
        }
        Ok(Self { rows, n, entries }.compacted())
    }

    pub fn from_dense(g: &DMatrix<T>, n: usize) -> Result<Self> {
        if g.ncols() != n * n {
            return Err(dims("QuadTensor::from_dense columns", n * n, g.ncols()));
        }
        let mut triplets = Vec::new();
        for col in 0..g.ncols() {
            for row in 0..g.nrows() {
                let v = g[(row, col)];
                if v != T::zero() {
                    triplets.push((row, col, v));
                }
            }
        }
        Self::from_triplets(g.nrows(), n, triplets)
    }

    pub fn to_dense(&self) -> DMatrix<T> {
        let mut g = DMatrix::zeros(self.rows, self.n * self.n);
        for e in &self.entries {
            g[(e.row, e.j * self.n + e.k)] += e.value;
        }
        g
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Dimension `n` of the vector the operator is applied to.
    pub fn state_dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[QuadEntry<T>] {
        &self.entries
    }

    /// `(row, j·n + k, value)` for every stored entry.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        self.entries.iter().map(move |e| (e.row, e.j * self.n + e.k, e.value))
    }

    fn compacted(mut self) -> Self {
        let mut merged: BTreeMap<(usize, usize, usize), T> = BTreeMap::new();
        for e in &self.entries {
            *merged.entry((e.j, e.k, e.row)).or_insert_with(T::zero) += e.value;
        }
        self.entries = merged
            .into_iter()
            .filter(|(_, v)| *v != T::zero())
            .map(|((j, k, row), value)| QuadEntry { row, j, k, value })
            .collect();
        self
    }

    /// Averages `G` with its Kronecker transpose so that
    /// `G(x⊗y) = G(y⊗x)`; `G(x⊗x)` is unchanged.
    pub fn symmetrized(&self) -> Self {
        let half = T::lit(0.5);
        let mut entries = Vec::with_capacity(2 * self.entries.len());
        for e in &self.entries {
            if e.j == e.k {
                entries.push(*e);
            } else {
                entries.push(QuadEntry { value: e.value * half, ..*e });
                entries.push(QuadEntry { j: e.k, k: e.j, value: e.value * half, ..*e });
            }
        }
        Self { rows: self.rows, n: self.n, entries }.compacted()
    }

    pub fn scaled(&self, s: T) -> Self {
        let entries = self.entries.iter().map(|e| QuadEntry { value: e.value * s, ..*e }).collect();
        Self { rows: self.rows, n: self.n, entries }
    }

    /// `L · G` for a dense left factor `L` (`q×rows`).
    pub fn left_mul(&self, l: &DMatrix<T>) -> Result<Self> {
        if l.ncols() != self.rows {
            return Err(dims("QuadTensor::left_mul", self.rows, l.ncols()));
        }
        let mut triplets = Vec::new();
        for e in &self.entries {
            for q in 0..l.nrows() {
                let v = l[(q, e.row)] * e.value;
                if v != T::zero() {
                    triplets.push((q, e.j * self.n + e.k, v));
                }
            }
        }
        Self::from_triplets(l.nrows(), self.n, triplets)
    }

    /// `G(x ⊗ x)` without forming `x ⊗ x`.
    pub fn apply(&self, x: &DVector<T>) -> Result<DVector<T>> {
        if x.len() != self.n {
            return Err(dims("quad_apply x", self.n, x.len()));
        }
        let mut out = DVector::zeros(self.rows);
        for e in &self.entries {
            out[e.row] += e.value * x[e.j] * x[e.k];
        }
        Ok(out)
    }

    /// `G(x ⊗ y)`.
    pub fn apply_pair(&self, x: &DVector<T>, y: &DVector<T>) -> Result<DVector<T>> {
        if x.len() != self.n || y.len() != self.n {
            return Err(dims("quad_apply_pair", self.n, format!("{}, {}", x.len(), y.len())));
        }
        let mut out = DVector::zeros(self.rows);
        for e in &self.entries {
            out[e.row] += e.value * x[e.j] * y[e.k];
        }
        Ok(out)
    }

    /// `G(x ⊗ I + I ⊗ x)`, the Jacobian of `x ↦ G(x ⊗ x)`.
    pub fn jacobian(&self, x: &DVector<T>) -> Result<DMatrix<T>> {
        if x.len() != self.n {
            return Err(dims("quad_jacobian x", self.n, x.len()));
        }
        let mut jac = DMatrix::zeros(self.rows, self.n);
        self.add_jacobian_to(x, T::one(), &mut jac);
        Ok(jac)
    }

    /// `out += scale · G(x ⊗ I + I ⊗ x)`; dimensions must already agree.
    pub(crate) fn add_jacobian_to(&self, x: &DVector<T>, scale: T, out: &mut DMatrix<T>) {
        for e in &self.entries {
            let v = e.value * scale;
            out[(e.row, e.j)] += v * x[e.k];
            out[(e.row, e.k)] += v * x[e.j];
        }
    }

    /// Petrov-Galerkin projection `T_l G (T_r ⊗ T_r)` computed by
    /// contracting each nonzero column of `T_l G` against `T_r` twice.
    pub fn project(&self, t_l: &DMatrix<T>, t_r: &DMatrix<T>) -> Result<Self> {
        if t_l.ncols() != self.rows {
            return Err(dims("QuadTensor::project T_l cols", self.rows, t_l.ncols()));
        }
        if t_r.nrows() != self.n {
            return Err(dims("QuadTensor::project T_r rows", self.n, t_r.nrows()));
        }
        let q = t_l.nrows();
        let r = t_r.ncols();

        // columns of T_l G, keyed by (j, k)
        let mut columns: BTreeMap<(usize, usize), DVector<T>> = BTreeMap::new();
        for e in &self.entries {
            let col = columns.entry((e.j, e.k)).or_insert_with(|| DVector::zeros(q));
            col.axpy(e.value, &t_l.column(e.row), T::one());
        }

        let mut dense = DMatrix::<T>::zeros(q, r * r);
        for ((j, k), w) in &columns {
            for a in 0..r {
                let ta = t_r[(*j, a)];
                if ta == T::zero() {
                    continue;
                }
                for b in 0..r {
                    let coeff = ta * t_r[(*k, b)];
                    if coeff != T::zero() {
                        dense.column_mut(a * r + b).axpy(coeff, w, T::one());
                    }
                }
            }
        }
        Self::from_dense(&dense, r)
    }
}

/// `G(x ⊗ x)`.
pub fn quad_apply<T: Real>(g: &QuadTensor<T>, x: &DVector<T>) -> Result<DVector<T>> {
    g.apply(x)
}

/// `G(x ⊗ I + I ⊗ x)`.
pub fn quad_jacobian<T: Real>(g: &QuadTensor<T>, x: &DVector<T>) -> Result<DMatrix<T>> {
    g.jacobian(x)
}
