//! Balanced truncation, LQG balanced truncation and Petrov-Galerkin
//! projection of quadratic systems.

mod balance;
mod project;
mod tustin;

use std::fmt::Write as _;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::dynamics::QuadraticSystem;
use crate::error::{dims, Error, Result};
use crate::scalar::Real;

pub use balance::{
    balanced_truncation, balanced_truncation_with, lqg_balanced_truncation, lqg_balanced_truncation_with,
    singular_value_report, stabilizing_shift, BalanceOptions, SvdMode, SvLadders, DEFAULT_SHIFT,
    GRAMIAN_NEGATIVE_TOL, LADDER_RANK_TOL,
};
pub use project::project_quadratic;
pub use tustin::{tustin_c2d, tustin_d2c};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "BT")]
    Bt,
    #[serde(rename = "LQG-BT")]
    LqgBt,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::Bt => "BT",
            Method::LqgBt => "LQG-BT",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Trial and test bases of a balancing projection.
#[derive(Debug, Clone, PartialEq)]
pub struct ReductionBasis<T: Real> {
    /// `n×r`.
    pub t_r: DMatrix<T>,
    /// `r×n`; `T_l T_r = I_r`.
    pub t_l: DMatrix<T>,
    /// Full ladder of singular values of `LᵀR`, decreasing.
    pub singular_values: Vec<T>,
    pub method: Method,
    pub r: usize,
    /// The requested dimension when it exceeded the numerical rank.
    pub requested_r: Option<usize>,
    /// Shift `μ` applied as `A − μI` before balancing, if any.
    pub shift: Option<T>,
}

impl<T: Real> ReductionBasis<T> {
    pub fn state_dim(&self) -> usize {
        self.t_r.nrows()
    }

    pub fn was_clamped(&self) -> bool {
        self.requested_r.is_some()
    }

    /// `max |T_l T_r − I|`.
    pub fn biorthogonality_error(&self) -> T {
        let prod = &self.t_l * &self.t_r - DMatrix::identity(self.r, self.r);
        prod.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    /// Ladder divided by its first entry.
    pub fn normalized_singular_values(&self) -> Vec<T> {
        normalize(&self.singular_values)
    }

    pub fn to_document(&self) -> ReductionBasisDoc {
        let rows = |m: &DMatrix<T>| -> Vec<Vec<f64>> {
            m.row_iter().map(|r| r.iter().map(|v| v.as_f64()).collect()).collect()
        };
        ReductionBasisDoc {
            t_r: rows(&self.t_r),
            t_l: rows(&self.t_l),
            singular_values: self.singular_values.iter().map(|v| v.as_f64()).collect(),
            method: self.method,
            r: self.r,
            requested_r: self.requested_r,
            shift: self.shift.map(|s| s.as_f64()),
        }
    }

    pub fn from_document(doc: &ReductionBasisDoc) -> Result<Self> {
        let n = doc.t_r.len();
        let t_r = from_rows::<T>(&doc.t_r, n, doc.r, "ReductionBasis T_r")?;
        let t_l = from_rows::<T>(&doc.t_l, doc.r, n, "ReductionBasis T_l")?;
        Ok(Self {
            t_r,
            t_l,
            singular_values: doc.singular_values.iter().map(|&v| T::lit(v)).collect(),
            method: doc.method,
            r: doc.r,
            requested_r: doc.requested_r,
            shift: doc.shift.map(T::lit),
        })
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(&self.to_document()).map_err(|e| Error::Serialization(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: ReductionBasisDoc = serde_json::from_str(s).map_err(|e| Error::Serialization(e.to_string()))?;
        Self::from_document(&doc)
    }

    /// Reduced-order model `(T_l A T_r, T_l G (T_r⊗T_r), T_l B, C T_r, T_l x0)`.
    pub fn project(&self, sys: &QuadraticSystem<T>) -> Result<QuadraticSystem<T>> {
        project_quadratic(sys, self)
    }
}

/// Serialized [`ReductionBasis`]; matrices are row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionBasisDoc {
    #[serde(rename = "T_r")]
    pub t_r: Vec<Vec<f64>>,
    #[serde(rename = "T_l")]
    pub t_l: Vec<Vec<f64>>,
    pub singular_values: Vec<f64>,
    pub method: Method,
    pub r: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub requested_r: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shift: Option<f64>,
}

fn from_rows<T: Real>(rows: &[Vec<f64>], nrows: usize, ncols: usize, context: &'static str) -> Result<DMatrix<T>> {
    if rows.len() != nrows || rows.iter().any(|r| r.len() != ncols) {
        return Err(dims(context, format!("{nrows}x{ncols}"), format!("{} rows", rows.len())));
    }
    Ok(DMatrix::from_fn(nrows, ncols, |i, j| T::lit(rows[i][j])))
}

pub(crate) fn normalize<T: Real>(values: &[T]) -> Vec<T> {
    match values.first() {
        Some(&first) if first > T::zero() => values.iter().map(|&v| v / first).collect(),
        _ => values.to_vec(),
    }
}

/// Two-column CSV `index,value` with 1-based indices.
pub fn ladder_csv<T: Real>(values: &[T]) -> String {
    let mut out = String::from("index,value\n");
    for (i, v) in values.iter().enumerate() {
        let _ = writeln!(out, "{},{:.16e}", i + 1, v.as_f64());
    }
    out
}
