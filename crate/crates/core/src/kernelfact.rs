//! Window factorizations of the moment kernel and the defect coefficients.
//!
//! The polynomial inner product `<p, q> = integral p conj(q) dmu` has Gram
//! matrix `A = transpose(K)` over the monomials of a rank window, and every
//! routine here works on that transposed (entrywise conjugated) view. Two
//! triangular factorizations `A = F^* F` (upper) and `A = G^* G` (lower) give
//! the orthonormal polynomial of the window's top rank and its reflected
//! counterpart as the extreme columns of the inverse factors.
//!
//! For a pair of ranks `i < j`, the coefficient `gamma(i, j)` is the
//! correlation that remains between the monomials of ranks `i` and `j` after
//! the ranks strictly between them are projected out. It is invariant under
//! positive diagonal rescaling, so it only sees the normalized kernel, and for
//! adjacent ranks it reduces to the normalized entry itself (conjugated to the
//! Gram view). The squared defects `1 - |gamma|^2` tie window determinants
//! together; `reconstruct_kernel` runs that structure backwards and rebuilds
//! the whole kernel from its diagonal and the table.

use crate::linalg::{self, CMat, PivotFailure};
use crate::moments::MomentKernel;
use crate::C64;
use thiserror::Error;

/// Relative pivot floor for every factorization of a kernel window.
pub const PIVOT_REL_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum KernelError {
    #[error("kernel window is not positive definite: pivot failure at rank {rank}")]
    NotPositiveDefinite { rank: usize },
    #[error("window {lo}..={hi} invalid for kernel with max rank {max}")]
    BadWindow { lo: usize, hi: usize, max: usize },
    #[error("diagonal has {got} entries, defect table covers ranks 0..={max}")]
    DiagonalLength { got: usize, max: usize },
}

fn check_window(kernel: &MomentKernel, lo: usize, hi: usize) -> Result<(), KernelError> {
    if lo > hi || hi > kernel.max_rank() {
        return Err(KernelError::BadWindow {
            lo,
            hi,
            max: kernel.max_rank(),
        });
    }
    Ok(())
}

/// Gram view of a rank window: `A[r][c] = conj(K(lo + r, lo + c))`.
fn gram_window(kernel: &MomentKernel, lo: usize, hi: usize) -> CMat {
    CMat::from_fn(hi - lo + 1, |r, c| kernel.entry(lo + r, lo + c).conj())
}

/// Both triangular factors of one window, plus the polynomial columns.
#[derive(Clone, Debug)]
pub struct CholeskyFactors {
    lo: usize,
    f: CMat,
    g: CMat,
    p: Vec<C64>,
    p_sharp: Vec<C64>,
}

impl CholeskyFactors {
    /// First rank of the window.
    pub fn lo(&self) -> usize {
        self.lo
    }

    /// Number of ranks in the window.
    pub fn size(&self) -> usize {
        self.f.n
    }

    /// Upper factor entry `F[r][c]`, `A = F^* F`.
    pub fn upper(&self, r: usize, c: usize) -> C64 {
        self.f.at(r, c)
    }

    /// Lower factor entry `G[r][c]`, `A = G^* G`.
    pub fn lower(&self, r: usize, c: usize) -> C64 {
        self.g.at(r, c)
    }

    /// Coefficients (by window position) of the orthonormal polynomial at the
    /// window's last rank: the last column of `F^{-1}`, positive leading
    /// coefficient.
    pub fn orthonormal_coeffs(&self) -> &[C64] {
        &self.p
    }

    /// Coefficients of the reflected counterpart: the first column of
    /// `G^{-1}`, unit norm, positive coefficient at the window's first rank.
    pub fn sharp_coeffs(&self) -> &[C64] {
        &self.p_sharp
    }

    /// Determinant of the window (same for both kernel orientations).
    pub fn determinant(&self) -> f64 {
        linalg::det_from_factor(&self.f)
    }
}

/// Factorizes the window `lo..=hi` of the kernel.
pub fn cholesky_window(
    kernel: &MomentKernel,
    lo: usize,
    hi: usize,
) -> Result<CholeskyFactors, KernelError> {
    check_window(kernel, lo, hi)?;
    let a = gram_window(kernel, lo, hi);
    let m = a.n;
    let f = linalg::chol_upper(&a, PIVOT_REL_TOL)
        .map_err(|PivotFailure(p)| KernelError::NotPositiveDefinite { rank: lo + p })?;
    let g = linalg::rev_chol_lower(&a, PIVOT_REL_TOL)
        .map_err(|PivotFailure(p)| KernelError::NotPositiveDefinite { rank: lo + p })?;
    let mut unit = vec![C64::new(0.0, 0.0); m];
    unit[m - 1] = C64::new(1.0, 0.0);
    let p = linalg::solve_upper(&f, &unit);
    unit[m - 1] = C64::new(0.0, 0.0);
    unit[0] = C64::new(1.0, 0.0);
    let p_sharp = linalg::solve_lower(&g, &unit);
    Ok(CholeskyFactors {
        lo,
        f,
        g,
        p,
        p_sharp,
    })
}

/// Determinant of the window `lo..=hi`; an empty window (`lo > hi`) has
/// determinant 1.
pub fn window_determinant(kernel: &MomentKernel, lo: usize, hi: usize) -> Result<f64, KernelError> {
    if lo > hi {
        return Ok(1.0);
    }
    check_window(kernel, lo, hi)?;
    let a = gram_window(kernel, lo, hi);
    let f = linalg::chol_upper(&a, PIVOT_REL_TOL)
        .map_err(|PivotFailure(p)| KernelError::NotPositiveDefinite { rank: lo + p })?;
    Ok(linalg::det_from_factor(&f))
}

/// Residual vectors of the first and last window positions after projecting
/// out the interior, as coefficient vectors over the window.
fn edge_residuals(a: &CMat) -> Result<(Vec<C64>, Vec<C64>), PivotFailure> {
    let m = a.n;
    debug_assert!(m >= 2);
    let k = m - 2;
    let b = CMat::from_fn(k, |r, c| a.at(r + 1, c + 1));
    let rhs_e: Vec<C64> = (0..k).map(|r| a.at(r + 1, 0)).collect();
    let rhs_f: Vec<C64> = (0..k).map(|r| a.at(r + 1, m - 1)).collect();
    let fac = linalg::chol_upper(&b, PIVOT_REL_TOL)
        .map_err(|PivotFailure(p)| PivotFailure(p + 1))?;
    let ce = linalg::solve_with_factor(&fac, &rhs_e);
    let cf = linalg::solve_with_factor(&fac, &rhs_f);
    let mut e = vec![C64::new(0.0, 0.0); m];
    let mut f = vec![C64::new(0.0, 0.0); m];
    e[0] = C64::new(1.0, 0.0);
    f[m - 1] = C64::new(1.0, 0.0);
    for r in 0..k {
        e[r + 1] = -ce[r];
        f[r + 1] = -cf[r];
    }
    Ok((e, f))
}

/// Correlation of the two edge residuals of the Gram window `a`, and the
/// product of their norms.
fn edge_correlation(a: &CMat, lo: usize) -> Result<(C64, f64), KernelError> {
    let m = a.n;
    let (e, f) = edge_residuals(a)
        .map_err(|PivotFailure(p)| KernelError::NotPositiveDefinite { rank: lo + p })?;
    let ee = linalg::form(a, &e, &e).re;
    let ff = linalg::form(a, &f, &f).re;
    if !(ee > 0.0) {
        return Err(KernelError::NotPositiveDefinite { rank: lo });
    }
    if !(ff > 0.0) {
        return Err(KernelError::NotPositiveDefinite { rank: lo + m - 1 });
    }
    let scale = (ee * ff).sqrt();
    Ok((linalg::form(a, &f, &e) / scale, scale))
}

/// Upper triangular table of the coefficients `gamma(i, j)` for
/// `0 <= i < j <= max_rank`, with their squared defects.
#[derive(Clone, Debug)]
pub struct VerblunskyTable {
    d: usize,
    max_rank: usize,
    gamma: Vec<C64>,
}

impl VerblunskyTable {
    fn slot(&self, i: usize, j: usize) -> usize {
        assert!(i < j && j <= self.max_rank, "need i < j <= max_rank");
        i * self.max_rank - i * (i.saturating_sub(1)) / 2 + (j - i - 1)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn max_rank(&self) -> usize {
        self.max_rank
    }

    /// `gamma(i, j)`; requires `i < j <= max_rank`.
    pub fn gamma(&self, i: usize, j: usize) -> C64 {
        self.gamma[self.slot(i, j)]
    }

    /// Squared defect `1 - |gamma(i, j)|^2`.
    pub fn defect(&self, i: usize, j: usize) -> f64 {
        1.0 - self.gamma(i, j).norm_sqr()
    }

    /// All pairs `(i, j)` in row-major order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.max_rank;
        (0..n).flat_map(move |i| (i + 1..=n).map(move |j| (i, j)))
    }
}

/// Computes the full coefficient table of the kernel's normalized form.
///
/// Each `gamma(i, j)` is evaluated directly on the raw window `i..=j` — the
/// normalization cancels in the correlation — by projecting the interior
/// ranks out of both edges.
pub fn verblunsky_table(kernel: &MomentKernel) -> Result<VerblunskyTable, KernelError> {
    let n = kernel.max_rank();
    let mut gamma = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        for j in i + 1..=n {
            let a = gram_window(kernel, i, j);
            let (g, _) = edge_correlation(&a, i)?;
            gamma.push(g);
        }
    }
    Ok(VerblunskyTable {
        d: kernel.dim(),
        max_rank: n,
        gamma,
    })
}

/// Squared defect `1 - |gamma(i, j)|^2` expressed through the four window
/// determinants `det[i..j] det[i+1..j-1] / (det[i..j-1] det[i+1..j])`.
pub fn four_window_defect(kernel: &MomentKernel, i: usize, j: usize) -> Result<f64, KernelError> {
    assert!(i < j, "need i < j");
    let outer = window_determinant(kernel, i, j)?;
    let inner = window_determinant(kernel, i + 1, j - 1)?;
    let left = window_determinant(kernel, i, j - 1)?;
    let right = window_determinant(kernel, i + 1, j)?;
    Ok(outer * inner / (left * right))
}

/// Largest relative residual, over leading windows `0..=n`, of the
/// factorization of the window determinant into the diagonal product times
/// the product of all squared defects of the window.
pub fn determinant_identity_residual(
    kernel: &MomentKernel,
    table: &VerblunskyTable,
) -> Result<f64, KernelError> {
    let mut worst = 0.0f64;
    for n in 0..=table.max_rank().min(kernel.max_rank()) {
        let det = window_determinant(kernel, 0, n)?;
        let mut prod: f64 = (0..=n).map(|r| kernel.entry(r, r).re).product();
        for i in 0..n {
            for j in i + 1..=n {
                prod *= table.defect(i, j);
            }
        }
        worst = worst.max((det - prod).abs() / det.abs().max(f64::MIN_POSITIVE));
    }
    Ok(worst)
}

/// Rebuilds the kernel from its diagonal and the coefficient table.
///
/// Entries are filled outward by bandwidth. For the pair `(i, i + w)` every
/// other entry of the window `i..=i+w` is already known, and the correlation
/// `gamma(i, i+w)` is an affine function of the unknown corner with slope
/// `1 / (|e| |f|)`: the corner appears in the cross term with coefficient
/// one and in nothing else, so it is recovered by one evaluation with the
/// corner zeroed.
pub fn reconstruct_kernel(
    d: usize,
    diagonal: &[f64],
    table: &VerblunskyTable,
) -> Result<MomentKernel, KernelError> {
    let n = table.max_rank();
    if diagonal.len() != n + 1 {
        return Err(KernelError::DiagonalLength {
            got: diagonal.len(),
            max: n,
        });
    }
    for (r, v) in diagonal.iter().enumerate() {
        if !(*v > 0.0) {
            return Err(KernelError::NotPositiveDefinite { rank: r });
        }
    }
    // Gram orientation while filling; transposed back at the end.
    let mut gram = CMat::zero(n + 1);
    for r in 0..=n {
        *gram.at_mut(r, r) = C64::new(diagonal[r], 0.0);
    }
    for w in 1..=n {
        for i in 0..=n - w {
            let j = i + w;
            let a = CMat::from_fn(w + 1, |r, c| gram.at(i + r, i + c));
            let (corr0, scale) = edge_correlation(&a, i)?;
            let corner = (table.gamma(i, j) - corr0) * scale;
            *gram.at_mut(i, j) = corner;
            *gram.at_mut(j, i) = corner.conj();
        }
    }
    Ok(MomentKernel::from_entries(d, n, |r, c| {
        gram.at(r, c).conj()
    }))
}
