//! Christoffel functions: smallest squared norm among polynomials pinned to
//! value 1 at a point.
//!
//! Two independent evaluations are provided. The spectral one sums the
//! orthonormal family, `lambda = 1 / sum |phi_n(z)|^2`; the direct one solves
//! one linear system in the raw moment window, `lambda = 1 / <K^{-1} v, v>`
//! with `v` the monomial vector at the point. They agree to rounding, which
//! exercises the factorization from two different sides. The explicit
//! minimizer is also available, and truncating at graded level boundaries
//! gives the decreasing sequence whose limit the entropy bound controls.

use crate::kernelfact::{KernelError, PIVOT_REL_TOL};
use crate::linalg::{self, CMat, PivotFailure};
use crate::moments::MomentKernel;
use crate::multiindex;
use crate::orthopoly::{OrthonormalSystem, RankPoly};
use crate::C64;

/// Monomial values at `z` for ranks `0..=max_rank`.
fn monomial_vector(d: usize, z: &[C64], max_rank: usize) -> Vec<C64> {
    multiindex::shortlex_range(d, max_rank + 1)
        .iter()
        .map(|idx| {
            let mut m = C64::new(1.0, 0.0);
            for (j, zj) in z.iter().enumerate() {
                m *= zj.powu(idx.entry(j));
            }
            m
        })
        .collect()
}

/// Diagonal of the reproducing kernel: `sum_{n <= max_rank} |phi_n(z)|^2`.
pub fn cd_kernel_diag(sys: &OrthonormalSystem, z: &[C64], max_rank: usize) -> f64 {
    (0..=max_rank.min(sys.max_rank()))
        .map(|n| sys.phi(n).eval(z).norm_sqr())
        .sum()
}

/// Christoffel function over ranks `0..=max_rank` through the orthonormal
/// family.
pub fn lambda(sys: &OrthonormalSystem, z: &[C64], max_rank: usize) -> f64 {
    1.0 / cd_kernel_diag(sys, z, max_rank)
}

/// Same quantity through the inverse of the raw moment window.
pub fn lambda_via_inverse(
    kernel: &MomentKernel,
    z: &[C64],
    max_rank: usize,
) -> Result<f64, KernelError> {
    let m = CMat::from_fn(max_rank + 1, |r, c| kernel.entry(r, c));
    let f = linalg::chol_upper(&m, PIVOT_REL_TOL)
        .map_err(|PivotFailure(p)| KernelError::NotPositiveDefinite { rank: p })?;
    let v = monomial_vector(kernel.dim(), z, max_rank);
    let y = linalg::solve_with_factor(&f, &v);
    let quad: C64 = v.iter().zip(&y).map(|(vr, yr)| vr.conj() * yr).sum();
    Ok(1.0 / quad.re)
}

/// The minimizing polynomial: value 1 at `z`, squared integral equal to the
/// Christoffel function, smallest among all such polynomials of the window.
pub fn minimizer(
    kernel: &MomentKernel,
    z: &[C64],
    max_rank: usize,
) -> Result<RankPoly, KernelError> {
    let m = CMat::from_fn(max_rank + 1, |r, c| kernel.entry(r, c));
    let f = linalg::chol_upper(&m, PIVOT_REL_TOL)
        .map_err(|PivotFailure(p)| KernelError::NotPositiveDefinite { rank: p })?;
    let v = monomial_vector(kernel.dim(), z, max_rank);
    let y = linalg::solve_with_factor(&f, &v);
    let quad: C64 = v.iter().zip(&y).map(|(vr, yr)| vr.conj() * yr).sum();
    let lam = 1.0 / quad.re;
    Ok(RankPoly::new(
        kernel.dim(),
        y.iter().map(|yr| yr.conj() * lam).collect(),
    ))
}

/// Squared integral `integral |P|^2 dmu` of a polynomial against the kernel.
pub fn squared_norm(kernel: &MomentKernel, p: &RankPoly) -> f64 {
    let n = kernel.max_rank();
    let a = CMat::from_fn(n + 1, |r, c| kernel.entry(r, c).conj());
    let x: Vec<C64> = (0..=n).map(|r| p.coeff(r)).collect();
    linalg::form(&a, &x, &x).re
}

/// Christoffel value at one graded level truncation.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct ChristoffelPoint {
    /// Total degree cap of the truncation.
    pub level: usize,
    /// Last rank included, the end of that graded level.
    pub max_rank: usize,
    pub lambda: f64,
}

/// The decreasing sequence of Christoffel values at graded level boundaries,
/// up to the largest level fully contained in the system's window.
pub fn lambda_levels(sys: &OrthonormalSystem, z: &[C64]) -> Vec<ChristoffelPoint> {
    let d = sys.dim();
    let mut out = Vec::new();
    let mut acc = 0.0f64;
    let mut rank = 0usize;
    let mut level = 0usize;
    loop {
        let end = multiindex::first_rank_of_level(d, level + 1) - 1;
        if end > sys.max_rank() {
            break;
        }
        while rank <= end {
            acc += sys.phi(rank).eval(z).norm_sqr();
            rank += 1;
        }
        out.push(ChristoffelPoint {
            level,
            max_rank: end,
            lambda: 1.0 / acc,
        });
        level += 1;
    }
    out
}
