//! Shared fixtures and independent oracles for the integration suites.
//!
//! Everything here recomputes its answers from first principles — direct
//! convolutions, a classical reflection-coefficient recursion, a bordered
//! stationarity system solved by a hand-rolled LU — so that agreement with
//! the library is evidence, not circularity.

#![allow(dead_code)]

use ballszego::{Atom, MeasureSpec, MultiIndex, TermPoly, WeightSpec, C64};

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn origin(d: usize) -> Vec<C64> {
    vec![c(0.0, 0.0); d]
}

/// Largest rank of complete level `m`.
pub fn level_end_rank(d: usize, m: usize) -> usize {
    ballszego::multiindex::first_rank_of_level(d, m + 1) - 1
}

// ---------------------------------------------------------------------------
// Test measures

/// Rotation-invariant probability measure on the sphere of C^2.
pub fn lebesgue2() -> MeasureSpec {
    ballszego::measure::preset("lebesgue").unwrap()
}

/// Diagonal-kernel example `2 |zeta_1|^2` on C^2.
pub fn counterexample2() -> MeasureSpec {
    ballszego::measure::preset("counterexample").unwrap()
}

/// Normalized two-variable polynomial weight `|1 + 0.3 z1 - 0.2 z2|^2`.
pub fn stable_demo() -> MeasureSpec {
    ballszego::measure::preset("stable-demo").unwrap()
}

/// Unit-mass weight `2 |(2 + z1)/3|^2` on C^2; its factor has no ball zeros.
pub fn sv_spec() -> MeasureSpec {
    MeasureSpec {
        d: 2,
        weight: Some(WeightSpec {
            scale: 2.0,
            exponent: 2.0,
            g: TermPoly::new(
                2,
                vec![
                    (MultiIndex::zero(2), c(2.0 / 3.0, 0.0)),
                    (MultiIndex::new(vec![1, 0]), c(1.0 / 3.0, 0.0)),
                ],
            )
            .unwrap(),
        }),
        atoms: vec![],
    }
}

/// Circle weight `(4/5)|1 - z/2|^2`, total mass 1.
pub fn circle() -> MeasureSpec {
    MeasureSpec {
        d: 1,
        weight: Some(WeightSpec {
            scale: 0.8,
            exponent: 2.0,
            g: TermPoly::new(
                1,
                vec![
                    (MultiIndex::zero(1), c(1.0, 0.0)),
                    (MultiIndex::new(vec![1]), c(-0.5, 0.0)),
                ],
            )
            .unwrap(),
        }),
        atoms: vec![],
    }
}

/// Circle weight `(4/5)|1 - (i/2) z|^2` with a genuinely complex coefficient.
pub fn complex_circle() -> MeasureSpec {
    MeasureSpec {
        d: 1,
        weight: Some(WeightSpec {
            scale: 0.8,
            exponent: 2.0,
            g: TermPoly::new(
                1,
                vec![
                    (MultiIndex::zero(1), c(1.0, 0.0)),
                    (MultiIndex::new(vec![1]), c(0.0, -0.5)),
                ],
            )
            .unwrap(),
        }),
        atoms: vec![],
    }
}

/// Half Lebesgue plus a half point mass at `(1, 0)` on C^2.
pub fn atom_half() -> MeasureSpec {
    MeasureSpec {
        d: 2,
        weight: Some(WeightSpec {
            scale: 0.5,
            exponent: 2.0,
            g: TermPoly::constant(2, c(1.0, 0.0)),
        }),
        atoms: vec![Atom {
            point: vec![c(1.0, 0.0), c(0.0, 0.0)],
            mass: 0.5,
        }],
    }
}

/// Half Lebesgue alone, the comparison measure for the atom example.
pub fn half_sigma() -> MeasureSpec {
    MeasureSpec {
        d: 2,
        weight: Some(WeightSpec {
            scale: 0.5,
            exponent: 2.0,
            g: TermPoly::constant(2, c(1.0, 0.0)),
        }),
        atoms: vec![],
    }
}

/// Three-variable weight with a complex cross coefficient.
pub fn three_var() -> MeasureSpec {
    MeasureSpec {
        d: 3,
        weight: Some(WeightSpec {
            scale: 1.0,
            exponent: 2.0,
            g: TermPoly::new(
                3,
                vec![
                    (MultiIndex::zero(3), c(1.0, 0.0)),
                    (MultiIndex::new(vec![1, 0, 0]), c(0.25, 0.0)),
                    (MultiIndex::new(vec![0, 1, 0]), c(0.0, -0.2)),
                    (MultiIndex::new(vec![0, 0, 1]), c(0.1, 0.1)),
                ],
            )
            .unwrap(),
        }),
        atoms: vec![],
    }
}

/// Every exact-moment spec the suites sweep over.
pub fn exact_specs() -> Vec<(&'static str, MeasureSpec)> {
    vec![
        ("lebesgue", lebesgue2()),
        ("counterexample", counterexample2()),
        ("stable-demo", stable_demo()),
        ("sv", sv_spec()),
        ("circle", circle()),
        ("complex-circle", complex_circle()),
        ("atom-half", atom_half()),
    ]
}

// ---------------------------------------------------------------------------
// Circle-moment oracle (d = 1)

/// Trigonometric moment `m_k = integral of z^k d mu` on the unit circle,
/// computed without the library's moment code: the squared-modulus weight
/// unfolds into a coefficient convolution, atoms are summed directly, and
/// any other exponent falls back to a dense trapezoid rule.
pub fn circle_moment(spec: &MeasureSpec, k: i64) -> C64 {
    assert_eq!(spec.d, 1, "circle oracle");
    let mut acc = c(0.0, 0.0);
    if let Some(w) = &spec.weight {
        if w.scale > 0.0 {
            if w.exponent == 2.0 {
                // integral e^{ik t} |g|^2 dt/2pi = sum_b g_{b-k} conj(g_b)
                let coeffs = dense_coeffs(&w.g);
                let deg = coeffs.len() as i64 - 1;
                for b in 0..=deg {
                    let a = b - k;
                    if (0..=deg).contains(&a) {
                        acc += coeffs[a as usize] * coeffs[b as usize].conj() * w.scale;
                    }
                }
            } else {
                let nodes = 4096usize;
                for j in 0..nodes {
                    let t = 2.0 * std::f64::consts::PI * j as f64 / nodes as f64;
                    let z = C64::from_polar(1.0, t);
                    let density = w.scale * w.g.eval(&[z]).norm().powf(w.exponent);
                    acc += zpow(z, k) * (density / nodes as f64);
                }
            }
        }
    }
    for atom in &spec.atoms {
        acc += zpow(atom.point[0], k) * atom.mass;
    }
    acc
}

fn zpow(z: C64, k: i64) -> C64 {
    if k >= 0 {
        z.powu(k as u32)
    } else {
        z.conj().powu((-k) as u32)
    }
}

fn dense_coeffs(g: &TermPoly) -> Vec<C64> {
    let deg = g.max_degree() as usize;
    let mut coeffs = vec![c(0.0, 0.0); deg + 1];
    for (idx, v) in g.terms() {
        coeffs[idx.degree() as usize] += v;
    }
    coeffs
}

// ---------------------------------------------------------------------------
// Reflection-coefficient recursion oracle (d = 1)

/// Runs the classical monic recursion on the circle and returns the
/// conjugated reflection coefficients, indexed so entry `n - 1` is the
/// parameter attached to degree `n`:
///
///   a_n   = <z Phi_n, Phi*_n> / <Phi*_n, Phi*_n>
///   Phi_{n+1}  = z Phi_n  - a_n Phi*_n
///   Phi*_{n+1} = Phi*_n   - conj(a_n) z Phi_n
///
/// Inner products expand through the trigonometric moments of the measure,
/// so the only shared ingredient with the library is the measure itself.
pub fn reflection_coefficients(spec: &MeasureSpec, count: usize) -> Vec<C64> {
    let m: Vec<C64> = (-(count as i64 + 1)..=(count as i64 + 1))
        .map(|k| circle_moment(spec, k))
        .collect();
    let moment = |k: i64| m[(k + count as i64 + 1) as usize];
    // <f, h> = sum_j sum_l f_j conj(h_l) m_{j-l}
    let inner = |f: &[C64], h: &[C64]| -> C64 {
        let mut acc = c(0.0, 0.0);
        for (j, fj) in f.iter().enumerate() {
            for (l, hl) in h.iter().enumerate() {
                acc += *fj * hl.conj() * moment(j as i64 - l as i64);
            }
        }
        acc
    };
    let shift = |f: &[C64]| -> Vec<C64> {
        let mut out = vec![c(0.0, 0.0)];
        out.extend_from_slice(f);
        out
    };

    let mut phi = vec![c(1.0, 0.0)];
    let mut star = vec![c(1.0, 0.0)];
    let mut alphas = Vec::with_capacity(count);
    for _ in 0..count {
        let zphi = shift(&phi);
        let a = inner(&zphi, &star) / inner(&star, &star);
        alphas.push(a);
        let mut next = zphi.clone();
        for (j, s) in star.iter().enumerate() {
            next[j] -= a * s;
        }
        let mut next_star = star.clone();
        next_star.push(c(0.0, 0.0));
        for (j, z) in zphi.iter().enumerate() {
            next_star[j] -= a.conj() * z;
        }
        phi = next;
        star = next_star;
    }
    alphas
}

// ---------------------------------------------------------------------------
// Bordered stationarity oracle

/// Solves a dense complex system by LU with partial pivoting. Deliberately
/// not the library's Cholesky: pivoting order, elimination pattern, and the
/// absence of any Hermitian assumption make it an independent path.
pub fn lu_solve(mut a: Vec<Vec<C64>>, mut b: Vec<C64>) -> Vec<C64> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&r, &s| a[r][col].norm().total_cmp(&a[s][col].norm()))
            .unwrap();
        a.swap(col, pivot);
        b.swap(col, pivot);
        let p = a[col][col];
        assert!(p.norm() > 0.0, "singular oracle system");
        for r in col + 1..n {
            let f = a[r][col] / p;
            for cidx in col..n {
                let v = a[col][cidx];
                a[r][cidx] -= f * v;
            }
            let bc = b[col];
            b[r] -= f * bc;
        }
    }
    let mut x = vec![c(0.0, 0.0); n];
    for r in (0..n).rev() {
        let mut acc = b[r];
        for cidx in r + 1..n {
            acc -= a[r][cidx] * x[cidx];
        }
        x[r] = acc / a[r][r];
    }
    x
}

/// Minimum of the quadratic form over polynomials pinned to 1 at the origin,
/// by first-order stationarity: with `A` the form matrix of the window, the
/// minimizer satisfies `A q = nu e_0`, `q_0 = 1`, and the minimum is `nu`.
/// Returns `(nu, q)` from one bordered solve.
pub fn kkt_minimum(kernel: &ballszego::MomentKernel, max_rank: usize) -> (f64, Vec<C64>) {
    let n = max_rank + 1;
    let mut bordered = vec![vec![c(0.0, 0.0); n + 1]; n + 1];
    for r in 0..n {
        for col in 0..n {
            // Quadratic form of int |q|^2 dmu in the coefficient basis.
            bordered[r][col] = kernel.entry(r, col).conj();
        }
    }
    bordered[0][n] = c(-1.0, 0.0);
    bordered[n][0] = c(1.0, 0.0);
    let mut rhs = vec![c(0.0, 0.0); n + 1];
    rhs[n] = c(1.0, 0.0);
    let solution = lu_solve(bordered, rhs);
    let q = solution[..n].to_vec();
    let nu = solution[n];
    (nu.re, q)
}
