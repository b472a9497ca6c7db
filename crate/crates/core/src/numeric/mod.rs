//! Numerical kernel: double-double complex scalars, Laurent polynomials,
//! dense and polynomial matrices, and Newton's method.

mod dd;
mod matrix;
mod newton;
mod poly;
mod polymatrix;
mod scalar;

pub use dd::Dd;
pub use matrix::CMatrix;
pub use newton::{newton, newton_multistart, NewtonOptions, PolySystem};
pub use poly::{Factorization, IntPoly, LaurentPoly};
pub use polymatrix::{char_poly, PolyMatrix};
pub use scalar::{cint, cone, cs, czero, root_of_unity, CScalar, Real, ScalarExt};

use serde::{Deserialize, Serialize};

/// The three user-facing tolerances, all relative.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Determinant interpolation residual, and exactness of divisions.
    pub det: f64,
    /// Root-multiplicity remainders and integer rounding.
    pub root: f64,
    /// Singular-value cutoff for nullspaces.
    pub null: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { det: 1e-8, root: 1e-6, null: 1e-9 }
    }
}

/// Relation and invariance residuals above this mean the representation is wrong.
pub const RELATION_TOL: f64 = 1e-8;
