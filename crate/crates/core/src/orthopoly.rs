//! Orthonormal, monic and reflected polynomial families of a kernel window.
//!
//! Polynomials live in the graded monomial basis: a `RankPoly` stores one
//! complex coefficient per rank. The orthonormal family comes out of a single
//! factorization of the full window, because leading blocks of the upper
//! Cholesky factor are the factors of the leading windows. The reflected
//! family is built per window from the opposite factorization, and the two
//! are coupled by a first order recurrence in the rank: shifting the top
//! orthonormal polynomial of the tail window `1..=n` by the successor map and
//! correcting with the reflected polynomial of `0..=n-1` reproduces rank `n`,
//! with coefficients determined by `gamma(0, n)` alone.

use crate::kernelfact::{self, KernelError, VerblunskyTable, PIVOT_REL_TOL};
use crate::linalg::{self, CMat, PivotFailure};
use crate::moments::MomentKernel;
use crate::multiindex;
use crate::C64;

/// Polynomial in the graded monomial basis: `coeffs[r]` multiplies the
/// monomial of rank `r`.
#[derive(Clone, Debug, PartialEq)]
pub struct RankPoly {
    d: usize,
    coeffs: Vec<C64>,
}

impl RankPoly {
    pub fn new(d: usize, coeffs: Vec<C64>) -> Self {
        assert!(!coeffs.is_empty(), "a polynomial has at least rank 0");
        RankPoly { d, coeffs }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    /// Coefficient of the rank `r` monomial; zero past the stored length.
    pub fn coeff(&self, r: usize) -> C64 {
        self.coeffs.get(r).copied().unwrap_or(C64::new(0.0, 0.0))
    }

    /// Value at a point of C^d.
    pub fn eval(&self, z: &[C64]) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for (idx, coeff) in multiindex::shortlex_range(self.d, self.coeffs.len())
            .iter()
            .zip(&self.coeffs)
        {
            let mut m = *coeff;
            for (j, zj) in z.iter().enumerate() {
                m *= zj.powu(idx.entry(j));
            }
            acc += m;
        }
        acc
    }

    /// Value at the origin; only the rank 0 monomial survives.
    pub fn at_origin(&self) -> C64 {
        self.coeffs[0]
    }

    /// Pushes every monomial to its successor rank: coefficient of rank `r`
    /// moves to rank `r + 1`. In one variable this is multiplication by `z`.
    pub fn succ_shift(&self) -> RankPoly {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(C64::new(0.0, 0.0));
        coeffs.extend_from_slice(&self.coeffs);
        RankPoly { d: self.d, coeffs }
    }

    pub fn scaled(&self, factor: C64) -> RankPoly {
        RankPoly {
            d: self.d,
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    pub fn minus(&self, other: &RankPoly) -> RankPoly {
        assert_eq!(self.d, other.d);
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len).map(|r| self.coeff(r) - other.coeff(r)).collect();
        RankPoly { d: self.d, coeffs }
    }

    /// Largest coefficient modulus.
    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0f64, |m, c| m.max(c.norm()))
    }
}

/// The three polynomial families of the leading windows of a kernel.
pub struct OrthonormalSystem {
    d: usize,
    phi: Vec<RankPoly>,
    monic: Vec<RankPoly>,
    sharp: Vec<RankPoly>,
    monic_norm_sq: Vec<f64>,
}

impl OrthonormalSystem {
    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn max_rank(&self) -> usize {
        self.phi.len() - 1
    }

    /// Orthonormal polynomial of rank `n`: unit norm, positive leading
    /// coefficient, orthogonal to all lower ranks.
    pub fn phi(&self, n: usize) -> &RankPoly {
        &self.phi[n]
    }

    /// Monic counterpart `phi / leading`.
    pub fn monic(&self, n: usize) -> &RankPoly {
        &self.monic[n]
    }

    /// Reflected polynomial of the window `0..=n`: unit norm, positive rank 0
    /// coefficient, orthogonal to ranks `1..=n`.
    pub fn sharp(&self, n: usize) -> &RankPoly {
        &self.sharp[n]
    }

    /// Leading coefficient `a(n, n)` of the orthonormal polynomial.
    pub fn leading_coeff(&self, n: usize) -> f64 {
        self.phi[n].coeff(n).re
    }

    /// Squared norm of the monic polynomial, `1 / a(n, n)^2`.
    pub fn monic_norm_sq(&self, n: usize) -> f64 {
        self.monic_norm_sq[n]
    }
}

/// Builds all three families over the full window of the kernel.
pub fn orthonormal_system(kernel: &MomentKernel) -> Result<OrthonormalSystem, KernelError> {
    let n = kernel.max_rank();
    let d = kernel.dim();
    let a = CMat::from_fn(n + 1, |r, c| kernel.entry(r, c).conj());
    let f = linalg::chol_upper(&a, PIVOT_REL_TOL)
        .map_err(|PivotFailure(p)| KernelError::NotPositiveDefinite { rank: p })?;
    let mut phi = Vec::with_capacity(n + 1);
    let mut monic = Vec::with_capacity(n + 1);
    let mut monic_norm_sq = Vec::with_capacity(n + 1);
    let mut unit = vec![C64::new(0.0, 0.0); n + 1];
    for k in 0..=n {
        unit[k] = C64::new(1.0, 0.0);
        let mut col = linalg::solve_upper(&f, &unit);
        unit[k] = C64::new(0.0, 0.0);
        col.truncate(k + 1);
        let p = RankPoly::new(d, col);
        let lead = p.coeff(k);
        monic.push(p.scaled(1.0 / lead));
        monic_norm_sq.push(f.at(k, k).re * f.at(k, k).re);
        phi.push(p);
    }
    let mut sharp = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let fac = kernelfact::cholesky_window(kernel, 0, k)?;
        sharp.push(RankPoly::new(d, fac.sharp_coeffs().to_vec()));
    }
    Ok(OrthonormalSystem {
        d,
        phi,
        monic,
        sharp,
        monic_norm_sq,
    })
}

/// Largest deviation of `<phi_m, phi_n>` from the identity over the window.
pub fn orthonormality_residual(kernel: &MomentKernel, sys: &OrthonormalSystem) -> f64 {
    let n = sys.max_rank().min(kernel.max_rank());
    let a = CMat::from_fn(n + 1, |r, c| kernel.entry(r, c).conj());
    let pad = |p: &RankPoly| -> Vec<C64> { (0..=n).map(|r| p.coeff(r)).collect() };
    let mut worst = 0.0f64;
    for m in 0..=n {
        let xm = pad(sys.phi(m));
        for k in m..=n {
            let xk = pad(sys.phi(k));
            let ip = linalg::form(&a, &xk, &xm);
            let want = if m == k { 1.0 } else { 0.0 };
            worst = worst.max((ip - want).norm());
        }
    }
    worst
}

/// Largest coefficient residual of the rank recurrence over the window.
///
/// For each rank `n >= 1`, with `w` the top orthonormal polynomial of the
/// tail window `1..=n`, `gamma = gamma(0, n)` and `s = sqrt(1 - |gamma|^2)`:
///
/// ```text
/// phi_n   = (shift(w) - gamma * sharp_{n-1}) / s
/// sharp_n = (sharp_{n-1} - conj(gamma) * shift(w)) / s
/// ```
///
/// where `shift` is the successor shift. Both lines are checked.
pub fn recurrence_residual(
    kernel: &MomentKernel,
    sys: &OrthonormalSystem,
    table: &VerblunskyTable,
) -> Result<f64, KernelError> {
    let n = sys.max_rank().min(table.max_rank());
    let mut worst = 0.0f64;
    for k in 1..=n {
        let tail = kernelfact::cholesky_window(kernel, 1, k)?;
        let shifted = RankPoly::new(sys.dim(), tail.orthonormal_coeffs().to_vec()).succ_shift();
        let gamma = table.gamma(0, k);
        let s = table.defect(0, k).sqrt();
        let prev = sys.sharp(k - 1);

        let pred_phi = shifted.minus(&prev.scaled(gamma)).scaled(C64::new(1.0 / s, 0.0));
        worst = worst.max(pred_phi.minus(sys.phi(k)).max_abs_coeff());

        let pred_sharp = prev
            .minus(&shifted.scaled(gamma.conj()))
            .scaled(C64::new(1.0 / s, 0.0));
        worst = worst.max(pred_sharp.minus(sys.sharp(k)).max_abs_coeff());
    }
    Ok(worst)
}
