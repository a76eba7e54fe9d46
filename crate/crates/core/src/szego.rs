//! Cross-checked summary of everything the kernel knows about a measure.
//!
//! `summary_report` computes each quantity along every route the library
//! offers and records how far the routes disagree: the shift condition of the
//! kernel, orthonormality and the rank recurrence, the per-rank list of four
//! expressions for the monic norm, the four expressions for the Christoffel
//! value at the origin, the determinant factorization, and the entropy
//! bracket
//!
//! ```text
//! exp(integral log w dsigma)  <=  lim_m lambda_m(0)  <=  lambda_N(0)
//! ```
//!
//! whose two ends the verdict compares. Equality holds when the weight has a
//! stable (non-vanishing on the closed ball) analytic factor; the built-in
//! `counterexample` weight `2 |z_1|^2` keeps every defect at 1 and its
//! Christoffel sequence at exactly 1 while the entropy side is `2/e`, so the
//! inequality is strict and `counterexample_report` certifies the gap.

use crate::christoffel::{self, ChristoffelPoint};
use crate::kernelfact::{self, KernelError, VerblunskyTable};
use crate::measure::{MeasureSpec, TermPoly};
use crate::moments::{self, EntropyMethod, MomentKernel};
use crate::multiindex::MultiIndex;
use crate::orthopoly::{self, OrthonormalSystem};
use crate::quadrature::{self, QuadratureRule};
use crate::C64;
use serde::Serialize;
use thiserror::Error;

/// Bracket width below which the two ends are declared equal.
pub const CERTIFY_WIDTH: f64 = 1e-4;
/// Tolerance for the inequality itself; a bracket more negative than this is
/// a violation, not rounding.
pub const VIOLATION_TOL: f64 = 1e-8;
/// Default numerical error budget used by the verdict.
pub const DEFAULT_BUDGET: f64 = 1e-6;
/// Grid minimum below which a weight factor counts as vanishing.
pub const STABLE_TOL: f64 = 1e-9;

/// Four expressions for the squared monic norm at one rank: they must agree.
#[derive(Clone, Debug, Serialize)]
pub struct FirstListRow {
    pub rank: usize,
    pub index: MultiIndex,
    /// `integral |Phi|^2 dmu` from the factorization diagonal.
    pub monic_norm_sq: f64,
    /// Inverse squared leading coefficient of the orthonormal polynomial.
    pub inv_leading_sq: f64,
    /// Ratio of consecutive window determinants.
    pub det_ratio: f64,
    /// Kernel diagonal times all defects `1 - |gamma(i, n)|^2`, `i < n`.
    pub scaled_defect_product: f64,
}

/// Four expressions for the Christoffel value of the full window at the
/// origin: they must agree.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SecondList {
    /// `K(0,0)` times all defects `1 - |gamma(0, n)|^2`, `n >= 1`.
    pub from_defects: f64,
    /// Inverse squared origin value of the reflected polynomial.
    pub from_sharp: f64,
    /// Inverse of the reproducing kernel diagonal at the origin.
    pub from_cd: f64,
    /// Through the inverse of the raw moment window.
    pub from_inverse: f64,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Bracket {
    /// Entropy side, `exp(integral log w dsigma)`; 0 when the weight
    /// vanishes on a set of positive measure.
    pub lower: f64,
    /// Christoffel value of the largest computed window at the origin.
    pub upper: f64,
}

impl Bracket {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// Outcome of comparing the two ends of the entropy bracket.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// The bracket closed: both ends agree to within `CERTIFY_WIDTH`.
    EqualityCertified,
    /// The bracket is wide, the sequence has stabilized: the gap is real.
    StrictGap,
    /// The inequality holds but the sequence is still moving; no claim about
    /// the limit.
    InequalityOnly,
    /// The upper end fell below the lower end by more than rounding; an
    /// internal identity is broken.
    Violated,
}

/// Verdict policy. `budget` is the caller's estimate of total numerical
/// error; a gap must exceed ten times it, and the last level step must have
/// shrunk to under a hundredth of the gap, before the gap counts as real.
pub fn classify(bracket: &Bracket, sequence: &[ChristoffelPoint], budget: f64) -> Verdict {
    let width = bracket.width();
    if width < -VIOLATION_TOL {
        return Verdict::Violated;
    }
    if width.abs() <= CERTIFY_WIDTH {
        return Verdict::EqualityCertified;
    }
    let stabilized = sequence.len() >= 2 && {
        let last = sequence[sequence.len() - 1].lambda;
        let prev = sequence[sequence.len() - 2].lambda;
        prev - last < 0.01 * width
    };
    if width > 10.0 * budget && stabilized {
        Verdict::StrictGap
    } else {
        Verdict::InequalityOnly
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EntropyInfo {
    /// `integral log w dsigma`; meaningful only when `finite`.
    pub value: f64,
    pub exp_value: f64,
    pub finite: bool,
    pub method: String,
    pub clipped: bool,
}

/// Everything `summary_report` verifies, with per-identity residuals.
#[derive(Clone, Debug, Serialize)]
pub struct SummaryReport {
    pub d: usize,
    pub max_rank: usize,
    pub total_mass: f64,
    pub weight_mass: f64,
    pub atom_mass: f64,
    /// `|total - weight - atoms|`.
    pub mass_split_residual: f64,
    /// Shift condition of the kernel against freshly computed moments.
    pub condition_residual: f64,
    pub orthonormality_residual: f64,
    pub recurrence_residual: f64,
    pub determinant_identity_residual: f64,
    pub first_list: Vec<FirstListRow>,
    /// Largest relative spread inside any first list row.
    pub first_list_residual: f64,
    pub second_list: SecondList,
    /// Relative spread of the second list.
    pub second_list_residual: f64,
    pub christoffel_at_origin: Vec<ChristoffelPoint>,
    pub entropy: EntropyInfo,
    pub bracket: Bracket,
    pub verdict: Verdict,
}

fn relative_spread(values: &[f64]) -> f64 {
    let max = values.iter().cloned().fold(f64::MIN, f64::max);
    let min = values.iter().cloned().fold(f64::MAX, f64::min);
    (max - min) / max.abs().max(f64::MIN_POSITIVE)
}

fn entropy_info(spec: &MeasureSpec, rule: &QuadratureRule) -> EntropyInfo {
    let e = moments::entropy(spec, rule);
    EntropyInfo {
        value: e.value,
        exp_value: e.exp_value(),
        finite: e.finite,
        method: match e.method {
            EntropyMethod::Closed => "closed".to_string(),
            EntropyMethod::Quadrature => "quadrature".to_string(),
        },
        clipped: e.clipped,
    }
}

fn first_list(
    kernel: &MomentKernel,
    sys: &OrthonormalSystem,
    table: &VerblunskyTable,
) -> Result<Vec<FirstListRow>, KernelError> {
    let mut rows = Vec::with_capacity(kernel.max_rank() + 1);
    let mut prev_det = 1.0;
    for n in 0..=kernel.max_rank() {
        let det = kernelfact::window_determinant(kernel, 0, n)?;
        let lead = sys.leading_coeff(n);
        let mut sdp = kernel.entry(n, n).re;
        for i in 0..n {
            sdp *= table.defect(i, n);
        }
        rows.push(FirstListRow {
            rank: n,
            index: kernel.index(n).clone(),
            monic_norm_sq: sys.monic_norm_sq(n),
            inv_leading_sq: 1.0 / (lead * lead),
            det_ratio: det / prev_det,
            scaled_defect_product: sdp,
        });
        prev_det = det;
    }
    Ok(rows)
}

fn second_list(
    kernel: &MomentKernel,
    sys: &OrthonormalSystem,
    table: &VerblunskyTable,
) -> Result<SecondList, KernelError> {
    let n = kernel.max_rank();
    let mut from_defects = kernel.entry(0, 0).re;
    for j in 1..=n {
        from_defects *= table.defect(0, j);
    }
    let origin = vec![C64::new(0.0, 0.0); kernel.dim()];
    Ok(SecondList {
        from_defects,
        from_sharp: 1.0 / sys.sharp(n).at_origin().norm_sqr(),
        from_cd: christoffel::lambda(sys, &origin, n),
        from_inverse: christoffel::lambda_via_inverse(kernel, &origin, n)?,
    })
}

/// Computes the full report for a validated spec over ranks `0..=max_rank`.
pub fn summary_report(
    spec: &MeasureSpec,
    max_rank: usize,
    rule: &QuadratureRule,
) -> Result<SummaryReport, KernelError> {
    let kernel = if spec.has_exact_moments() {
        moments::kernel_window(spec, max_rank)
    } else {
        moments::kernel_window_quadrature(spec, max_rank, rule)
    };
    let sys = orthopoly::orthonormal_system(&kernel)?;
    let table = kernelfact::verblunsky_table(&kernel)?;

    let total_mass = kernel.entry(0, 0).re;
    let atom_mass: f64 = spec.atoms.iter().map(|a| a.mass).sum();
    let weight_only = MeasureSpec {
        d: spec.d,
        weight: spec.weight.clone(),
        atoms: vec![],
    };
    let weight_mass = match &spec.weight {
        Some(w) if w.scale > 0.0 => moments::total_mass(&weight_only),
        _ => 0.0,
    };

    let rows = first_list(&kernel, &sys, &table)?;
    let first_list_residual = rows
        .iter()
        .map(|r| {
            relative_spread(&[
                r.monic_norm_sq,
                r.inv_leading_sq,
                r.det_ratio,
                r.scaled_defect_product,
            ])
        })
        .fold(0.0f64, f64::max);
    let second = second_list(&kernel, &sys, &table)?;
    let second_list_residual = relative_spread(&[
        second.from_defects,
        second.from_sharp,
        second.from_cd,
        second.from_inverse,
    ]);

    let origin = vec![C64::new(0.0, 0.0); spec.d];
    let christoffel_at_origin = christoffel::lambda_levels(&sys, &origin);
    let entropy = entropy_info(spec, rule);
    let upper = christoffel_at_origin
        .last()
        .map_or(second.from_inverse, |p| p.lambda);
    let bracket = Bracket {
        lower: entropy.exp_value,
        upper,
    };
    let verdict = classify(&bracket, &christoffel_at_origin, DEFAULT_BUDGET);

    Ok(SummaryReport {
        d: spec.d,
        max_rank,
        total_mass,
        weight_mass,
        atom_mass,
        mass_split_residual: (total_mass - weight_mass - atom_mass).abs(),
        condition_residual: moments::check_measure_condition(&kernel, spec),
        orthonormality_residual: orthopoly::orthonormality_residual(&kernel, &sys),
        recurrence_residual: orthopoly::recurrence_residual(&kernel, &sys, &table)?,
        determinant_identity_residual: kernelfact::determinant_identity_residual(&kernel, &table)?,
        first_list: rows,
        first_list_residual,
        second_list: second,
        second_list_residual,
        christoffel_at_origin,
        entropy,
        bracket,
        verdict,
    })
}

/// Smallest modulus of a polynomial over a grid of the closed unit ball.
#[derive(Clone, Debug)]
pub struct StabilityReport {
    pub min_modulus: f64,
    /// A grid point attaining the minimum.
    pub at: Vec<C64>,
    /// Whether the minimum clears `STABLE_TOL`. A grid screen, not a proof:
    /// a zero can hide between grid points of a coarse resolution.
    pub stable: bool,
}

/// Scans `|g|` over radial shells of a sphere grid plus the center.
pub fn stable_check(g: &TermPoly, resolution: usize) -> StabilityReport {
    let d = g.dim();
    let resolution = resolution.max(2);
    let (x, w) = quadrature::gauss_legendre_unit(resolution);
    let radial = quadrature::radial_grid(d, &x, &w);
    let mut best = f64::INFINITY;
    let mut at = vec![C64::new(0.0, 0.0); d];
    let mut point = vec![C64::new(0.0, 0.0); d];
    for k in 0..resolution {
        let shell = k as f64 / (resolution - 1) as f64;
        quadrature::for_each_node(d, &radial, 2 * resolution, |r, phases, _| {
            for j in 0..d {
                point[j] = C64::from_polar(shell * r[j], phases[j]);
            }
            let v = g.eval(&point).norm();
            if v < best {
                best = v;
                at.copy_from_slice(&point);
            }
        });
    }
    StabilityReport {
        min_modulus: best,
        at,
        stable: best > STABLE_TOL,
    }
}

#[derive(Debug, Error)]
pub enum SvCheckError {
    #[error("measure has no weight part to check")]
    MissingWeight,
    #[error("weight factor vanishes on the closed ball (grid minimum {0:.3e})")]
    UnstableCandidate(f64),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// Result of checking the equality hypothesis on a stable weight factor.
#[derive(Clone, Debug, Serialize)]
pub struct SvCheck {
    /// Certified entropy side `s |g(0)|^p`: for a stable factor the log
    /// integral collapses to the origin value by the mean value property.
    pub entropy_rhs: f64,
    /// Christoffel value of the computed window at the origin.
    pub lambda_upper: f64,
    /// `lambda_upper - entropy_rhs`; nonnegative up to rounding, and small
    /// exactly when the window has resolved the limit.
    pub slack: f64,
    pub grid_min_modulus: f64,
}

/// Checks the equality side of the entropy bound for a weight with a stable
/// factor: rejects vanishing factors, then compares the certified entropy
/// value against the Christoffel sequence.
pub fn check_sv_hypothesis(spec: &MeasureSpec, max_rank: usize) -> Result<SvCheck, SvCheckError> {
    let w = spec.weight.as_ref().filter(|w| w.scale > 0.0);
    let w = w.ok_or(SvCheckError::MissingWeight)?;
    let stability = stable_check(&w.g, 12);
    if !stability.stable {
        return Err(SvCheckError::UnstableCandidate(stability.min_modulus));
    }
    let entropy_rhs = w.scale * w.g.at_origin().norm().powf(w.exponent);
    let kernel = if spec.has_exact_moments() {
        moments::kernel_window(spec, max_rank)
    } else {
        moments::kernel_window_quadrature(spec, max_rank, &QuadratureRule::default())
    };
    let origin = vec![C64::new(0.0, 0.0); spec.d];
    let lambda_upper = christoffel::lambda_via_inverse(&kernel, &origin, max_rank)?;
    Ok(SvCheck {
        entropy_rhs,
        lambda_upper,
        slack: lambda_upper - entropy_rhs,
        grid_min_modulus: stability.min_modulus,
    })
}

/// The strict-gap example, fully verified: diagonal kernel, vanishing
/// coefficients, constant Christoffel sequence, entropy side `2/e`.
#[derive(Clone, Debug, Serialize)]
pub struct CounterexampleReport {
    pub max_rank: usize,
    /// Largest off-diagonal kernel entry; exactly 0.
    pub max_off_diagonal: f64,
    /// Largest `|gamma(i, j)|`; exactly 0, so every defect is 1.
    pub max_gamma: f64,
    /// Largest deviation of the Christoffel sequence from 1.
    pub lambda_deviation: f64,
    pub christoffel_at_origin: Vec<ChristoffelPoint>,
    /// `2 / e`.
    pub entropy_rhs: f64,
    /// `1 - 2/e`, the certified gap.
    pub gap: f64,
    /// Grid minimum of `|z_1|` over the ball; 0 at the center, which is why
    /// no stable factor exists and equality can fail.
    pub factor_min_modulus: f64,
    pub verdict: Verdict,
}

/// Builds and verifies the counterexample at the given window size.
pub fn counterexample_report(max_rank: usize) -> Result<CounterexampleReport, KernelError> {
    let spec = crate::measure::preset("counterexample").expect("built-in preset");
    let kernel = moments::kernel_window(&spec, max_rank);
    let mut max_off_diagonal = 0.0f64;
    for r in 0..=max_rank {
        for c in 0..=max_rank {
            if r != c {
                max_off_diagonal = max_off_diagonal.max(kernel.entry(r, c).norm());
            }
        }
    }
    let table = kernelfact::verblunsky_table(&kernel)?;
    let max_gamma = table
        .pairs()
        .map(|(i, j)| table.gamma(i, j).norm())
        .fold(0.0f64, f64::max);
    let sys = orthopoly::orthonormal_system(&kernel)?;
    let origin = vec![C64::new(0.0, 0.0); 2];
    let christoffel_at_origin = christoffel::lambda_levels(&sys, &origin);
    let lambda_deviation = christoffel_at_origin
        .iter()
        .map(|p| (p.lambda - 1.0).abs())
        .fold(0.0f64, f64::max);
    let entropy_rhs = moments::entropy(&spec, &QuadratureRule::default()).exp_value();
    let upper = christoffel_at_origin.last().map_or(1.0, |p| p.lambda);
    let bracket = Bracket {
        lower: entropy_rhs,
        upper,
    };
    let verdict = classify(&bracket, &christoffel_at_origin, DEFAULT_BUDGET);
    let stability = stable_check(&spec.weight.as_ref().expect("weight").g, 8);
    Ok(CounterexampleReport {
        max_rank,
        max_off_diagonal,
        max_gamma,
        lambda_deviation,
        christoffel_at_origin,
        entropy_rhs,
        gap: bracket.width(),
        factor_min_modulus: stability.min_modulus,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{self, Atom, WeightSpec};
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    /// Weight `2 |(2 + z_1)/3|^2`: unit mass, stable factor, entropy side
    /// exactly 8/9.
    fn stable_equality_spec() -> MeasureSpec {
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

    fn atom_spec() -> MeasureSpec {
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

    #[test]
    fn verdict_policy() {
        let seq = |vals: &[f64]| -> Vec<ChristoffelPoint> {
            vals.iter()
                .enumerate()
                .map(|(i, v)| ChristoffelPoint {
                    level: i,
                    max_rank: i,
                    lambda: *v,
                })
                .collect()
        };
        // Closed bracket.
        let b = Bracket {
            lower: 0.5,
            upper: 0.5 + 5e-5,
        };
        assert_eq!(classify(&b, &seq(&[0.6, 0.5]), 1e-6), Verdict::EqualityCertified);
        // Wide and flat: a real gap.
        let b = Bracket {
            lower: 0.7,
            upper: 1.0,
        };
        assert_eq!(
            classify(&b, &seq(&[1.0, 1.0, 1.0]), 1e-6),
            Verdict::StrictGap
        );
        // Wide but still falling fast: no claim.
        assert_eq!(
            classify(&b, &seq(&[1.3, 1.1, 1.0]), 1e-6),
            Verdict::InequalityOnly
        );
        // Upper below lower: broken.
        let b = Bracket {
            lower: 1.0,
            upper: 0.5,
        };
        assert_eq!(classify(&b, &seq(&[0.5]), 1e-6), Verdict::Violated);
    }

    #[test]
    fn stable_check_flags_the_vanishing_factor() {
        let g = TermPoly::new(2, vec![(MultiIndex::new(vec![1, 0]), c(1.0, 0.0))]).unwrap();
        let rep = stable_check(&g, 8);
        assert!(!rep.stable);
        assert_abs_diff_eq!(rep.min_modulus, 0.0, epsilon = 1e-15);

        let spec = stable_equality_spec();
        let rep = stable_check(&spec.weight.unwrap().g, 8);
        assert!(rep.stable);
        // |(2 + z1)/3| >= 1/3 on the closed ball.
        assert!(rep.min_modulus >= 1.0 / 3.0 - 1e-12);
    }

    #[test]
    fn equality_case_closes_the_bracket() {
        let spec = stable_equality_spec();
        let check = check_sv_hypothesis(&spec, 27).unwrap();
        assert_abs_diff_eq!(check.entropy_rhs, 8.0 / 9.0, epsilon = 1e-15);
        assert!(check.slack >= -VIOLATION_TOL);
        assert!(check.slack < CERTIFY_WIDTH, "slack {}", check.slack);

        let report = summary_report(&spec, 27, &QuadratureRule::default()).unwrap();
        assert_eq!(report.verdict, Verdict::EqualityCertified);
        assert!(report.first_list_residual < 1e-9);
        assert!(report.second_list_residual < 1e-9);
        assert_abs_diff_eq!(report.total_mass, 1.0, epsilon = 1e-12);
        // Quadrature entropy agrees with the certified origin value.
        assert_abs_diff_eq!(report.entropy.exp_value, 8.0 / 9.0, epsilon = 1e-7);
    }

    #[test]
    fn counterexample_has_a_certified_gap() {
        let report = counterexample_report(27).unwrap();
        assert_eq!(report.verdict, Verdict::StrictGap);
        assert_abs_diff_eq!(report.max_off_diagonal, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(report.max_gamma, 0.0, epsilon = 1e-13);
        assert_abs_diff_eq!(report.lambda_deviation, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            report.entropy_rhs,
            2.0 / std::f64::consts::E,
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(
            report.gap,
            1.0 - 2.0 / std::f64::consts::E,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(report.factor_min_modulus, 0.0, epsilon = 1e-15);
        // The unstable factor is also rejected by the hypothesis check.
        let spec = measure::preset("counterexample").unwrap();
        assert!(matches!(
            check_sv_hypothesis(&spec, 9),
            Err(SvCheckError::UnstableCandidate(_))
        ));
    }

    #[test]
    fn atom_measure_reports_honest_uncertainty() {
        // The true limit is 1/2 = exp(log(1/2)), but at this window the
        // sequence is still visibly falling, so no equality certificate and
        // no gap claim.
        let spec = atom_spec();
        let report = summary_report(&spec, 27, &QuadratureRule::default()).unwrap();
        assert_eq!(report.verdict, Verdict::InequalityOnly);
        assert_abs_diff_eq!(report.weight_mass, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(report.atom_mass, 0.5, epsilon = 1e-15);
        assert!(report.mass_split_residual < 1e-12);
        assert_abs_diff_eq!(report.bracket.lower, 0.5, epsilon = 1e-12);
        assert!(report.bracket.upper > 0.5 + CERTIFY_WIDTH);
        assert!(report.bracket.upper < 0.52);
    }

    #[test]
    fn report_identities_hold_across_presets() {
        for name in ["lebesgue", "counterexample", "stable-demo"] {
            let spec = measure::preset(name).unwrap();
            let report = summary_report(&spec, 14, &QuadratureRule::default()).unwrap();
            assert!(report.condition_residual < 1e-12, "{name}");
            assert!(report.orthonormality_residual < 1e-10, "{name}");
            assert!(report.recurrence_residual < 1e-10, "{name}");
            assert!(report.determinant_identity_residual < 1e-9, "{name}");
            assert!(report.first_list_residual < 1e-9, "{name}");
            assert!(report.second_list_residual < 1e-9, "{name}");
            assert!(report.bracket.width() >= -VIOLATION_TOL, "{name}");
        }
    }

    #[test]
    fn report_serializes_to_json() {
        let spec = measure::preset("counterexample").unwrap();
        let report = summary_report(&spec, 5, &QuadratureRule::default()).unwrap();
        let text = serde_json::to_string_pretty(&report).unwrap();
        assert!(text.contains("\"verdict\""));
        assert!(text.contains("strict-gap"));
        assert!(text.contains("\"first_list\""));
    }
}
