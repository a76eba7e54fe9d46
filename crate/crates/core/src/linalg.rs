//! Small dense complex Hermitian helpers shared by the factorization modules.
//!
//! Windows of the moment kernel are tiny (tens of rows), so everything here is
//! a plain O(n^3) textbook routine with a relative pivot guard. Two Cholesky
//! orientations are provided: `chol_upper` gives the upper factor `F` with
//! `A = F^* F`, `rev_chol_lower` gives the lower factor `G` with `A = G^* G`,
//! obtained by factorizing the index-reversed matrix.

use crate::C64;

/// Dense square complex matrix, row major.
#[derive(Clone, Debug)]
pub(crate) struct CMat {
    pub n: usize,
    a: Vec<C64>,
}

impl CMat {
    pub fn zero(n: usize) -> Self {
        CMat {
            n,
            a: vec![C64::new(0.0, 0.0); n * n],
        }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = CMat::zero(n);
        for r in 0..n {
            for c in 0..n {
                *m.at_mut(r, c) = f(r, c);
            }
        }
        m
    }

    #[inline]
    pub fn at(&self, r: usize, c: usize) -> C64 {
        self.a[r * self.n + c]
    }

    #[inline]
    pub fn at_mut(&mut self, r: usize, c: usize) -> &mut C64 {
        &mut self.a[r * self.n + c]
    }

    /// Largest diagonal real part; the pivot guard is relative to this.
    pub fn max_diag(&self) -> f64 {
        (0..self.n).fold(0.0f64, |m, k| m.max(self.at(k, k).re))
    }
}

/// Failing pivot: 0-based position within the window where positivity broke.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct PivotFailure(pub usize);

/// Upper factor `F` with `A = F^* F`, positive real diagonal.
pub(crate) fn chol_upper(a: &CMat, rel_tol: f64) -> Result<CMat, PivotFailure> {
    let n = a.n;
    let floor = rel_tol * a.max_diag().max(f64::MIN_POSITIVE);
    // Build the standard lower factor L with A = L L^*, then F = L^*.
    let mut l = CMat::zero(n);
    for j in 0..n {
        let mut s = a.at(j, j).re;
        for k in 0..j {
            s -= l.at(j, k).norm_sqr();
        }
        if !(s > floor) {
            return Err(PivotFailure(j));
        }
        let d = s.sqrt();
        *l.at_mut(j, j) = C64::new(d, 0.0);
        for i in j + 1..n {
            let mut v = a.at(i, j);
            for k in 0..j {
                v -= l.at(i, k) * l.at(j, k).conj();
            }
            *l.at_mut(i, j) = v / d;
        }
    }
    let mut f = CMat::zero(n);
    for r in 0..n {
        for c in r..n {
            *f.at_mut(r, c) = l.at(c, r).conj();
        }
    }
    Ok(f)
}

/// Lower factor `G` with `A = G^* G`, positive real diagonal.
///
/// Reversing rows and columns turns the problem into an ordinary upper
/// factorization: with `J` the reversal, `JAJ = F^* F` gives `A = (JFJ)^* (JFJ)`
/// and `JFJ` is lower triangular.
pub(crate) fn rev_chol_lower(a: &CMat, rel_tol: f64) -> Result<CMat, PivotFailure> {
    let n = a.n;
    let rev = CMat::from_fn(n, |r, c| a.at(n - 1 - r, n - 1 - c));
    let f = chol_upper(&rev, rel_tol).map_err(|PivotFailure(j)| PivotFailure(n - 1 - j))?;
    Ok(CMat::from_fn(n, |r, c| f.at(n - 1 - r, n - 1 - c)))
}

/// Back substitution for upper triangular `F x = b`.
pub(crate) fn solve_upper(f: &CMat, b: &[C64]) -> Vec<C64> {
    let n = f.n;
    let mut x = b.to_vec();
    for r in (0..n).rev() {
        let mut v = x[r];
        for c in r + 1..n {
            v -= f.at(r, c) * x[c];
        }
        x[r] = v / f.at(r, r);
    }
    x
}

/// Forward substitution for lower triangular `G x = b`.
pub(crate) fn solve_lower(g: &CMat, b: &[C64]) -> Vec<C64> {
    let n = g.n;
    let mut x = b.to_vec();
    for r in 0..n {
        let mut v = x[r];
        for c in 0..r {
            v -= g.at(r, c) * x[c];
        }
        x[r] = v / g.at(r, r);
    }
    x
}

/// Solves `A x = b` given the upper factor of `A = F^* F`.
pub(crate) fn solve_with_factor(f: &CMat, b: &[C64]) -> Vec<C64> {
    let n = f.n;
    // F^* y = b, forward pass on the implicit lower factor.
    let mut y = b.to_vec();
    for r in 0..n {
        let mut v = y[r];
        for c in 0..r {
            v -= f.at(c, r).conj() * y[c];
        }
        y[r] = v / f.at(r, r);
    }
    solve_upper(f, &y)
}

pub(crate) fn mat_vec(a: &CMat, x: &[C64]) -> Vec<C64> {
    (0..a.n)
        .map(|r| (0..a.n).map(|c| a.at(r, c) * x[c]).sum())
        .collect()
}

/// Sesquilinear form `y^* A x`.
pub(crate) fn form(a: &CMat, x: &[C64], y: &[C64]) -> C64 {
    let ax = mat_vec(a, x);
    y.iter().zip(&ax).map(|(yr, v)| yr.conj() * v).sum()
}

/// Determinant of `A = F^* F` from the factor diagonal.
pub(crate) fn det_from_factor(f: &CMat) -> f64 {
    (0..f.n).map(|k| f.at(k, k).re * f.at(k, k).re).product()
}
