//! Deterministic product quadrature on the unit sphere of C^d.
//!
//! Under the invariant probability measure the squared moduli
//! `(|z_1|^2, ..., |z_d|^2)` are uniform on the simplex and the phases are
//! independent and uniform. Peeling coordinates off one at a time turns the
//! simplex factor into d-1 univariate integrals with polynomial densities
//! `(d-j) u^{d-j-1}`: with nested variables `u_1..u_{d-1}` the moduli are
//! `r_1^2 = 1 - u_1`, `r_j^2 = u_1...u_{j-1} (1 - u_j)`,
//! `r_d^2 = u_1...u_{d-1}`. Polynomial integrands therefore integrate exactly
//! once the Gauss rule order and the phase grid are fine enough. For
//! integrands with endpoint log singularities (entropy) a tanh-sinh radial
//! rule is provided instead.

use std::f64::consts::PI;

/// Gauss-Legendre nodes and weights on (0, 1); weights sum to 1.
pub(crate) fn gauss_legendre_unit(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        // Standard initial guess on (-1, 1), then Newton on P_n.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_and_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = 0.5 * (1.0 - x); // descending x maps to ascending u
        weights[i] = 0.5 * w;
    }
    (nodes, weights)
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Tanh-sinh nodes and weights on (0, 1); handles endpoint log singularities.
pub(crate) fn tanh_sinh_unit(level: u32) -> (Vec<f64>, Vec<f64>) {
    let h = 0.5f64.powi(level as i32);
    let kmax = (6.0 / h).ceil() as i64;
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    for k in -kmax..=kmax {
        let t = k as f64 * h;
        let u = 0.5 * PI * t.sinh();
        let x = 0.5 * (1.0 + u.tanh());
        let w = h * 0.25 * PI * t.cosh() / (u.cosh() * u.cosh());
        if x <= 0.0 || x >= 1.0 || w < 1e-290 {
            continue;
        }
        nodes.push(x);
        weights.push(w);
    }
    (nodes, weights)
}

/// Resolution of the sphere product rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuadratureRule {
    /// Phase nodes per angular coordinate.
    pub angular: usize,
    /// Gauss nodes per radial coordinate.
    pub radial: usize,
}

impl Default for QuadratureRule {
    fn default() -> Self {
        QuadratureRule {
            angular: 64,
            radial: 64,
        }
    }
}

impl QuadratureRule {
    pub fn with_nodes(n: usize) -> Self {
        QuadratureRule {
            angular: n,
            radial: n,
        }
    }
}

/// Radial grid: tuples `(u_1..u_{d-1})` with combined weights that already
/// include the simplex densities `(d-j) u^{d-j-1}`. Weights sum to 1.
pub(crate) fn radial_grid(d: usize, nodes: &[f64], weights: &[f64]) -> Vec<(Vec<f64>, f64)> {
    assert!(d >= 1);
    let mut grid: Vec<(Vec<f64>, f64)> = vec![(Vec::new(), 1.0)];
    for j in 1..d {
        let density_pow = (d - j - 1) as i32;
        let factor = (d - j) as f64;
        let mut next = Vec::with_capacity(grid.len() * nodes.len());
        for (tuple, w) in &grid {
            for (u, wu) in nodes.iter().zip(weights) {
                let mut t = tuple.clone();
                t.push(*u);
                next.push((t, w * wu * factor * u.powi(density_pow)));
            }
        }
        grid = next;
    }
    grid
}

/// Moduli `r_1..r_d` of the sphere point determined by a radial tuple.
pub(crate) fn moduli(d: usize, u: &[f64]) -> Vec<f64> {
    assert_eq!(u.len(), d - 1);
    let mut out = Vec::with_capacity(d);
    let mut prefix = 1.0;
    for j in 0..d - 1 {
        out.push((prefix * (1.0 - u[j])).sqrt());
        prefix *= u[j];
    }
    out.push(prefix.sqrt());
    out
}

/// Visits every node of the product rule with its weight. The callback gets
/// the moduli and the phases; weights sum to 1.
pub(crate) fn for_each_node(
    d: usize,
    radial: &[(Vec<f64>, f64)],
    angular: usize,
    mut visit: impl FnMut(&[f64], &[f64], f64),
) {
    let phase_w = 1.0 / (angular as f64).powi(d as i32);
    let mut phases = vec![0.0f64; d];
    for (u, wr) in radial {
        let r = moduli(d, u);
        let w = wr * phase_w;
        visit_phases(&r, angular, &mut phases, 0, w, &mut visit);
    }
}

fn visit_phases(
    r: &[f64],
    angular: usize,
    phases: &mut Vec<f64>,
    j: usize,
    w: f64,
    visit: &mut impl FnMut(&[f64], &[f64], f64),
) {
    if j == r.len() {
        visit(r, phases, w);
        return;
    }
    for m in 0..angular {
        phases[j] = 2.0 * PI * m as f64 / angular as f64;
        visit_phases(r, angular, phases, j + 1, w, visit);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn gauss_rule_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre_unit(8);
        assert_abs_diff_eq!(w.iter().sum::<f64>(), 1.0, epsilon = 1e-14);
        for k in 0..=15u32 {
            let quad: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(k as i32)).sum();
            assert_abs_diff_eq!(quad, 1.0 / (k as f64 + 1.0), epsilon = 1e-13);
        }
    }

    #[test]
    fn tanh_sinh_handles_log_endpoint() {
        let (x, w) = tanh_sinh_unit(5);
        let quad: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * (1.0 - xi).ln()).sum();
        assert_abs_diff_eq!(quad, -1.0, epsilon = 1e-11);
        let mass: f64 = w.iter().sum();
        assert_abs_diff_eq!(mass, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn radial_grid_weights_sum_to_one() {
        let (x, w) = gauss_legendre_unit(16);
        for d in 1..=4 {
            let grid = radial_grid(d, &x, &w);
            let total: f64 = grid.iter().map(|(_, w)| w).sum();
            assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn moduli_lie_on_the_sphere() {
        let (x, w) = gauss_legendre_unit(6);
        for d in 2..=4 {
            for (u, _) in radial_grid(d, &x, &w) {
                let r = moduli(d, &u);
                let nsq: f64 = r.iter().map(|v| v * v).sum();
                assert_abs_diff_eq!(nsq, 1.0, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn modulus_square_means_match_simplex_uniformity() {
        // Each |z_j|^2 has mean 1/d under the uniform simplex distribution.
        let (x, w) = gauss_legendre_unit(12);
        for d in 2..=4usize {
            let grid = radial_grid(d, &x, &w);
            for j in 0..d {
                let mean: f64 = grid
                    .iter()
                    .map(|(u, wt)| {
                        let r = moduli(d, u);
                        wt * r[j] * r[j]
                    })
                    .sum();
                assert_abs_diff_eq!(mean, 1.0 / d as f64, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn node_sweep_recovers_phase_orthogonality() {
        // Integral of z_1 conj(z_2) over the sphere vanishes by phase
        // independence; integral of |z_1|^2 is 1/2 at d = 2.
        let (x, w) = gauss_legendre_unit(8);
        let grid = radial_grid(2, &x, &w);
        let mut cross_re = 0.0;
        let mut cross_im = 0.0;
        let mut diag = 0.0;
        for_each_node(2, &grid, 8, |r, phases, wt| {
            let (s1, c1) = phases[0].sin_cos();
            let (s2, c2) = phases[1].sin_cos();
            cross_re += wt * r[0] * r[1] * (c1 * c2 + s1 * s2);
            cross_im += wt * r[0] * r[1] * (s1 * c2 - c1 * s2);
            diag += wt * r[0] * r[0];
        });
        assert_abs_diff_eq!(cross_re, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(cross_im, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(diag, 0.5, epsilon = 1e-13);
    }
}
