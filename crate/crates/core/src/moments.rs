//! Moment computation: the kernel `K(a, b) = integral z^a conj(z)^b dmu`.
//!
//! For exponent 2 weights every moment is a finite sum: monomials integrate
//! against the invariant measure to `(d-1)! a! / (d-1+|a|)!` on the diagonal
//! and to zero off it, so `|g|^2` contributes one term per pair of weight
//! coefficients, and atoms contribute plain point evaluations. Other
//! exponents go through the sphere product quadrature. Because the squared
//! norm is 1 on the sphere, every kernel built here satisfies the shift
//! condition `K(a, b) = sum_j K(a + e_j, b + e_j)`; `check_measure_condition`
//! measures the residual, and `normalized_kernel` produces the standard
//! example of a unit diagonal kernel that violates it.

use crate::measure::MeasureSpec;
use crate::multiindex::MultiIndex;
use crate::quadrature::{self, QuadratureRule};
use crate::C64;
use num_bigint::BigUint;
use num_traits::ToPrimitive;

/// Entry floor before taking logs in the entropy quadrature.
const ENTROPY_NODE_FLOOR: f64 = 1e-280;

/// `integral z^a conj(z)^b dsigma`: zero unless `a = b`, in which case it is
/// `(d-1)! a! / (d-1+|a|)!`, evaluated in exact integer arithmetic.
///
/// ```
/// use ballszego::{moments, MultiIndex};
/// let a = MultiIndex::new(vec![1, 0]);
/// assert_eq!(moments::sigma_moment(&a, &a), 0.5);
/// ```
pub fn sigma_moment(a: &MultiIndex, b: &MultiIndex) -> f64 {
    if a != b {
        return 0.0;
    }
    sigma_diagonal(a)
}

fn sigma_diagonal(a: &MultiIndex) -> f64 {
    let d = a.dim();
    let mut num = factorial(d as u32 - 1);
    for j in 0..d {
        num *= factorial(a.entry(j));
    }
    let den = factorial(d as u32 - 1 + a.degree());
    ratio_to_f64(&num, &den)
}

fn factorial(n: u32) -> BigUint {
    let mut acc = BigUint::from(1u32);
    for k in 2..=n.max(1) {
        acc *= BigUint::from(k);
    }
    acc
}

/// Exact rational to float: scale the numerator so integer division keeps
/// 128 bits of the quotient, then rescale.
fn ratio_to_f64(num: &BigUint, den: &BigUint) -> f64 {
    let scaled = (num << 128u32) / den;
    scaled.to_f64().map_or(f64::INFINITY, |v| v / 2f64.powi(128))
}

/// Moment of the measure: exact convolution sum when the weight exponent is
/// 2 (or the weight is absent), quadrature at the default resolution
/// otherwise. Atoms always contribute exactly.
pub fn moment(spec: &MeasureSpec, a: &MultiIndex, b: &MultiIndex) -> C64 {
    if spec.has_exact_moments() {
        exact_moment(spec, a, b)
    } else {
        quadrature_moment(spec, a, b, &QuadratureRule::default())
    }
}

fn exact_moment(spec: &MeasureSpec, a: &MultiIndex, b: &MultiIndex) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    if let Some(w) = &spec.weight {
        if w.scale > 0.0 {
            for (ga, ca) in w.g.terms() {
                for (gb, cb) in w.g.terms() {
                    if shifted_match(a, ga, b, gb) {
                        let mut sum = a.clone();
                        for j in 0..spec.d {
                            for _ in 0..ga.entry(j) {
                                sum = sum.add_unit(j);
                            }
                        }
                        acc += *ca * cb.conj() * (w.scale * sigma_diagonal(&sum));
                    }
                }
            }
        }
    }
    acc + atom_moment(spec, a, b)
}

fn shifted_match(a: &MultiIndex, ga: &MultiIndex, b: &MultiIndex, gb: &MultiIndex) -> bool {
    (0..a.dim()).all(|j| a.entry(j) + ga.entry(j) == b.entry(j) + gb.entry(j))
}

fn atom_moment(spec: &MeasureSpec, a: &MultiIndex, b: &MultiIndex) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for atom in &spec.atoms {
        let mut v = C64::new(atom.mass, 0.0);
        for j in 0..spec.d {
            v *= atom.point[j].powu(a.entry(j));
            v *= atom.point[j].conj().powu(b.entry(j));
        }
        acc += v;
    }
    acc
}

/// Moment of the weight part by the sphere product rule, plus the exact atom
/// sum. For exponent 2 the phase sums collapse to congruence conditions, so
/// the rule is evaluated in closed form; the result is identical to summing
/// over every node. Other exponents sweep the full node set.
pub fn quadrature_moment(
    spec: &MeasureSpec,
    a: &MultiIndex,
    b: &MultiIndex,
    rule: &QuadratureRule,
) -> C64 {
    let weight_part = match &spec.weight {
        None => C64::new(0.0, 0.0),
        Some(w) if w.scale == 0.0 => C64::new(0.0, 0.0),
        Some(w) => {
            let (x, wts) = quadrature::gauss_legendre_unit(rule.radial);
            let radial = quadrature::radial_grid(spec.d, &x, &wts);
            if w.exponent == 2.0 {
                let mut acc = C64::new(0.0, 0.0);
                for (ga, ca) in w.g.terms() {
                    for (gb, cb) in w.g.terms() {
                        if !(0..spec.d).all(|j| {
                            let k = a.entry(j) as i64 + ga.entry(j) as i64
                                - b.entry(j) as i64
                                - gb.entry(j) as i64;
                            k.rem_euclid(rule.angular as i64) == 0
                        }) {
                            continue;
                        }
                        let mut rad = 0.0;
                        for (u, wt) in &radial {
                            let r = quadrature::moduli(spec.d, u);
                            let mut prod = *wt;
                            for j in 0..spec.d {
                                let pw = a.entry(j) + ga.entry(j) + b.entry(j) + gb.entry(j);
                                prod *= r[j].powi(pw as i32);
                            }
                            rad += prod;
                        }
                        acc += *ca * cb.conj() * (w.scale * rad);
                    }
                }
                acc
            } else {
                let mut acc = C64::new(0.0, 0.0);
                let mut point = vec![C64::new(0.0, 0.0); spec.d];
                quadrature::for_each_node(spec.d, &radial, rule.angular, |r, phases, wt| {
                    for j in 0..spec.d {
                        point[j] = C64::from_polar(r[j], phases[j]);
                    }
                    let gv = w.g.eval(&point);
                    let density = w.scale * gv.norm_sqr().powf(0.5 * w.exponent);
                    let mut mono = C64::new(density * wt, 0.0);
                    for j in 0..spec.d {
                        mono *= point[j].powu(a.entry(j)) * point[j].conj().powu(b.entry(j));
                    }
                    acc += mono;
                });
                acc
            }
        }
    };
    weight_part + atom_moment(spec, a, b)
}

/// Dense Hermitian window of the moment kernel over ranks `0..=max_rank`.
#[derive(Clone, Debug)]
pub struct MomentKernel {
    d: usize,
    indices: Vec<MultiIndex>,
    entries: Vec<C64>,
}

impl MomentKernel {
    /// Builds the window from explicit entries; `entry[r][c]` must equal
    /// `integral z^{a_r} conj(z)^{a_c} dmu` for the graded index order.
    pub fn from_entries(d: usize, max_rank: usize, entry: impl Fn(usize, usize) -> C64) -> Self {
        let n = max_rank + 1;
        let indices: Vec<MultiIndex> = (0..n).map(|r| MultiIndex::unrank(d, r)).collect();
        let mut entries = vec![C64::new(0.0, 0.0); n * n];
        for r in 0..n {
            for c in r..n {
                let v = entry(r, c);
                entries[r * n + c] = v;
                entries[c * n + r] = v.conj();
            }
        }
        MomentKernel { d, indices, entries }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn max_rank(&self) -> usize {
        self.indices.len() - 1
    }

    pub fn index(&self, r: usize) -> &MultiIndex {
        &self.indices[r]
    }

    pub fn entry(&self, r: usize, c: usize) -> C64 {
        self.entries[r * self.indices.len() + c]
    }
}

/// Moment kernel over ranks `0..=max_rank` for a validated spec.
pub fn kernel_window(spec: &MeasureSpec, max_rank: usize) -> MomentKernel {
    MomentKernel::from_entries(spec.d, max_rank, |r, c| {
        moment(
            spec,
            &MultiIndex::unrank(spec.d, r),
            &MultiIndex::unrank(spec.d, c),
        )
    })
}

/// Same window computed entirely through the quadrature path.
pub fn kernel_window_quadrature(
    spec: &MeasureSpec,
    max_rank: usize,
    rule: &QuadratureRule,
) -> MomentKernel {
    MomentKernel::from_entries(spec.d, max_rank, |r, c| {
        quadrature_moment(
            spec,
            &MultiIndex::unrank(spec.d, r),
            &MultiIndex::unrank(spec.d, c),
            rule,
        )
    })
}

/// Largest residual of the shift condition
/// `K(a, b) = sum_j K(a + e_j, b + e_j)` over the window, with the shifted
/// moments recomputed from the spec (they generally stick out of the window).
pub fn check_measure_condition(kernel: &MomentKernel, spec: &MeasureSpec) -> f64 {
    let mut worst = 0.0f64;
    for r in 0..=kernel.max_rank() {
        for c in 0..=kernel.max_rank() {
            let mut sum = C64::new(0.0, 0.0);
            for j in 0..spec.d {
                sum += moment(spec, &kernel.index(r).add_unit(j), &kernel.index(c).add_unit(j));
            }
            worst = worst.max((kernel.entry(r, c) - sum).norm());
        }
    }
    worst
}

/// Shift condition residual using only entries inside the window; pairs whose
/// shifted indices fall outside are skipped. `None` when no pair is testable.
pub fn window_condition_residual(kernel: &MomentKernel) -> Option<f64> {
    let n = kernel.max_rank();
    let mut worst: Option<f64> = None;
    for r in 0..=n {
        for c in 0..=n {
            let mut sum = C64::new(0.0, 0.0);
            let mut inside = true;
            for j in 0..kernel.dim() {
                let sr = kernel.index(r).add_unit(j).rank();
                let sc = kernel.index(c).add_unit(j).rank();
                if sr > n || sc > n {
                    inside = false;
                    break;
                }
                sum += kernel.entry(sr, sc);
            }
            if inside {
                let res = (kernel.entry(r, c) - sum).norm();
                worst = Some(worst.map_or(res, |w: f64| w.max(res)));
            }
        }
    }
    worst
}

/// Unit diagonal rescaling `K(a,b) / sqrt(K(a,a) K(b,b))`. `None` if a
/// diagonal entry is not strictly positive. The result is still positive
/// semidefinite but is no longer the moment kernel of a measure for d > 1:
/// its shift condition residual at the origin is d - 1.
pub fn normalized_kernel(kernel: &MomentKernel) -> Option<MomentKernel> {
    let n = kernel.max_rank();
    let mut scale = Vec::with_capacity(n + 1);
    for r in 0..=n {
        let v = kernel.entry(r, r).re;
        if !(v > 0.0) {
            return None;
        }
        scale.push(v.sqrt());
    }
    Some(MomentKernel::from_entries(kernel.dim(), n, |r, c| {
        kernel.entry(r, c) / (scale[r] * scale[c])
    }))
}

/// Total mass of the measure; the moment at the zero pair.
pub fn total_mass(spec: &MeasureSpec) -> f64 {
    let zero = MultiIndex::zero(spec.d);
    moment(spec, &zero, &zero).re
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EntropyMethod {
    /// Closed form: weight depends only on the modulus profile.
    Closed,
    /// Sphere quadrature with a tanh-sinh radial rule.
    Quadrature,
}

/// `integral log w dsigma` for the weight part, with bookkeeping.
#[derive(Clone, Copy, Debug)]
pub struct EntropyResult {
    /// Value of the log integral; `-inf` when the weight vanishes.
    pub value: f64,
    /// False only for an identically zero weight part.
    pub finite: bool,
    pub method: EntropyMethod,
    /// True when some quadrature node hit the clipping floor.
    pub clipped: bool,
}

impl EntropyResult {
    /// `exp` of the log integral; 0 when infinite.
    pub fn exp_value(&self) -> f64 {
        if self.finite {
            self.value.exp()
        } else {
            0.0
        }
    }
}

/// Entropy integral `integral log(s |g|^p) dsigma` of the weight part.
///
/// Monomial weights `s |c z^a|^p` have the closed form
/// `log(s |c|^p) - (p/2) |a| H_{d-1}` with `H` the harmonic numbers, coming
/// from the Beta law of each squared modulus. Everything else is integrated
/// numerically: phases by the trapezoid rule (spectrally accurate for the
/// analytic periodic slices) and radial variables by tanh-sinh, which absorbs
/// the log singularities a vanishing weight puts at the simplex boundary.
pub fn entropy(spec: &MeasureSpec, rule: &QuadratureRule) -> EntropyResult {
    let w = match &spec.weight {
        Some(w) if w.scale > 0.0 && !w.g.is_zero() => w,
        _ => {
            return EntropyResult {
                value: f64::NEG_INFINITY,
                finite: false,
                method: EntropyMethod::Closed,
                clipped: false,
            }
        }
    };
    if let Some((idx, c)) = w.g.as_monomial() {
        let harmonic: f64 = (1..spec.d).map(|k| 1.0 / k as f64).sum();
        let value =
            w.scale.ln() + w.exponent * c.norm().ln() - 0.5 * w.exponent * idx.degree() as f64 * harmonic;
        return EntropyResult {
            value,
            finite: true,
            method: EntropyMethod::Closed,
            clipped: false,
        };
    }
    entropy_quadrature(spec, rule)
}

/// Node-sweep evaluation of the entropy integral regardless of weight shape;
/// an independent cross-check for weights the closed form also covers.
pub fn entropy_quadrature(spec: &MeasureSpec, rule: &QuadratureRule) -> EntropyResult {
    let w = match &spec.weight {
        Some(w) if w.scale > 0.0 && !w.g.is_zero() => w,
        _ => {
            return EntropyResult {
                value: f64::NEG_INFINITY,
                finite: false,
                method: EntropyMethod::Quadrature,
                clipped: false,
            }
        }
    };
    // Higher dimensions get capped resolution to bound the sweep.
    let (level, angular) = match spec.d {
        1 => (0, rule.angular.max(64)),
        2 => (5, rule.angular),
        _ => (4, rule.angular.min(16)),
    };
    let radial = if spec.d == 1 {
        vec![(Vec::new(), 1.0)]
    } else {
        let (x, wts) = quadrature::tanh_sinh_unit(level);
        quadrature::radial_grid(spec.d, &x, &wts)
    };
    let mut acc = 0.0;
    let mut clipped = false;
    let mut point = vec![C64::new(0.0, 0.0); spec.d];
    quadrature::for_each_node(spec.d, &radial, angular, |r, phases, wt| {
        for j in 0..spec.d {
            point[j] = C64::from_polar(r[j], phases[j]);
        }
        let gv = w.g.eval(&point);
        let mut density = w.scale * gv.norm_sqr().powf(0.5 * w.exponent);
        if density < ENTROPY_NODE_FLOOR {
            density = ENTROPY_NODE_FLOOR;
            clipped = true;
        }
        acc += wt * density.ln();
    });
    EntropyResult {
        value: acc,
        finite: true,
        method: EntropyMethod::Quadrature,
        clipped,
    }
}
