//! Orthogonal polynomial machinery for measures on the unit sphere of C^d.
//!
//! A measure is given as `s |g|^p dsigma + sum_k rho_k delta_{zeta_k}`, where
//! `sigma` is the rotation invariant probability measure on the sphere, `g` is
//! a polynomial weight and the `zeta_k` are unit vectors. Monomials are
//! ordered by total degree and then lexicographically, which turns the moment
//! data into a kernel on the nonnegative integers. From that kernel the crate
//! computes Cholesky factorizations of nested windows, orthonormal / monic /
//! reflected polynomial families, defect coefficients of the normalized
//! kernel, Christoffel functions with certified tail brackets, and the entropy
//! of the absolutely continuous part. The `szego` module cross-checks all of
//! these against each other and reports whether the entropy lower bound is
//! attained.
//!
//! Everything is deterministic: no randomness, no global state, results depend
//! only on the input measure and the requested resolution.

pub mod christoffel;
pub mod kernelfact;
pub mod measure;
pub mod moments;
pub mod multiindex;
pub mod orthopoly;
pub mod szego;

mod linalg;
mod quadrature;

pub use measure::{Atom, MeasureSpec, SpecError, TermPoly, WeightSpec};
pub use moments::{EntropyMethod, EntropyResult, MomentKernel};
pub use multiindex::MultiIndex;
pub use quadrature::QuadratureRule;

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
