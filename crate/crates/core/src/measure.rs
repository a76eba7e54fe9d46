//! Measure specifications: weight part `s |g|^p dsigma` plus point masses.
//!
//! A spec is the single input everything else consumes. It can be built in
//! code, or parsed from JSON of the form
//!
//! ```json
//! {
//!   "d": 2,
//!   "weight": { "scale": 2.0, "exponent": 2.0,
//!               "g": [ { "index": [1, 0], "re": 1.0, "im": 0.0 } ] },
//!   "atoms": [ { "point": [[1.0, 0.0], [0.0, 0.0]], "mass": 0.5 } ]
//! }
//! ```
//!
//! Atoms also carry their boundary analysis: the atomic part's Herglotz
//! transform (positive real part on the open unit ball, radial limit blowing
//! up at each atom) and its Cayley transform, a Schur class function fixing
//! the origin and tending to 1 along rays into the atoms.

use crate::multiindex::MultiIndex;
use crate::C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerance for "the atom lies on the unit sphere".
const SPHERE_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("dimension {0} unsupported, expected 1..=4")]
    Dimension(usize),
    #[error("term has index of dimension {got}, spec has dimension {want}")]
    TermDimension { got: usize, want: usize },
    #[error("duplicate term index {0}")]
    DuplicateTerm(MultiIndex),
    #[error("weight scale must be nonnegative, got {0}")]
    NegativeScale(f64),
    #[error("weight exponent must be positive, got {0}")]
    BadExponent(f64),
    #[error("weight polynomial has no nonzero coefficient")]
    ZeroWeightPolynomial,
    #[error("atom point has dimension {got}, spec has dimension {want}")]
    AtomDimension { got: usize, want: usize },
    #[error("atom point has squared norm {0}, must lie on the unit sphere")]
    AtomOffSphere(f64),
    #[error("atom mass must be positive, got {0}")]
    NonpositiveMass(f64),
    #[error("measure has no weight part and no atoms")]
    EmptyMeasure,
    #[error("no atoms to transform")]
    NoAtoms,
    #[error("point with norm {0} is outside the open unit ball")]
    OutsideBall(f64),
    #[error("unknown preset {0:?}")]
    UnknownPreset(String),
    #[error("malformed spec JSON: {0}")]
    Json(#[from] serde_json::Error),
}

/// Polynomial as a sparse list of monomial terms, kept in graded order.
#[derive(Clone, Debug, PartialEq)]
pub struct TermPoly {
    d: usize,
    terms: Vec<(MultiIndex, C64)>,
}

impl TermPoly {
    /// Builds a polynomial, rejecting mismatched or repeated indices.
    pub fn new(d: usize, mut terms: Vec<(MultiIndex, C64)>) -> Result<Self, SpecError> {
        for (idx, _) in &terms {
            if idx.dim() != d {
                return Err(SpecError::TermDimension {
                    got: idx.dim(),
                    want: d,
                });
            }
        }
        terms.sort_by(|a, b| a.0.cmp_shortlex(&b.0));
        for pair in terms.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(SpecError::DuplicateTerm(pair[0].0.clone()));
            }
        }
        Ok(TermPoly { d, terms })
    }

    pub fn constant(d: usize, c: C64) -> Self {
        TermPoly {
            d,
            terms: vec![(MultiIndex::zero(d), c)],
        }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn terms(&self) -> &[(MultiIndex, C64)] {
        &self.terms
    }

    /// Value at a point of C^d.
    pub fn eval(&self, z: &[C64]) -> C64 {
        assert_eq!(z.len(), self.d);
        let mut acc = C64::new(0.0, 0.0);
        for (idx, coeff) in &self.terms {
            let mut m = *coeff;
            for (j, zj) in z.iter().enumerate() {
                m *= zj.powu(idx.entry(j));
            }
            acc += m;
        }
        acc
    }

    /// Value at the origin.
    pub fn at_origin(&self) -> C64 {
        self.terms
            .iter()
            .find(|(idx, _)| idx.degree() == 0)
            .map(|(_, c)| *c)
            .unwrap_or(C64::new(0.0, 0.0))
    }

    /// The single term if the polynomial is a monomial `c z^a` with `c != 0`.
    pub fn as_monomial(&self) -> Option<(&MultiIndex, C64)> {
        let nonzero: Vec<_> = self
            .terms
            .iter()
            .filter(|(_, c)| c.norm_sqr() > 0.0)
            .collect();
        match nonzero.as_slice() {
            [(idx, c)] => Some((idx, *c)),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|(_, c)| c.norm_sqr() == 0.0)
    }

    pub fn max_degree(&self) -> u32 {
        self.terms
            .iter()
            .filter(|(_, c)| c.norm_sqr() > 0.0)
            .map(|(idx, _)| idx.degree())
            .max()
            .unwrap_or(0)
    }
}

/// Absolutely continuous part `scale * |g|^exponent dsigma`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightSpec {
    pub scale: f64,
    pub exponent: f64,
    pub g: TermPoly,
}

/// Point mass on the unit sphere.
#[derive(Clone, Debug, PartialEq)]
pub struct Atom {
    pub point: Vec<C64>,
    pub mass: f64,
}

/// Complete measure description.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasureSpec {
    pub d: usize,
    pub weight: Option<WeightSpec>,
    pub atoms: Vec<Atom>,
}

impl MeasureSpec {
    /// Structural validation; every consumer assumes this has passed.
    pub fn validate(&self) -> Result<(), SpecError> {
        if !(1..=4).contains(&self.d) {
            return Err(SpecError::Dimension(self.d));
        }
        let mut has_content = false;
        if let Some(w) = &self.weight {
            if !(w.scale >= 0.0) || !w.scale.is_finite() {
                return Err(SpecError::NegativeScale(w.scale));
            }
            if !(w.exponent > 0.0) || !w.exponent.is_finite() {
                return Err(SpecError::BadExponent(w.exponent));
            }
            if w.g.dim() != self.d {
                return Err(SpecError::TermDimension {
                    got: w.g.dim(),
                    want: self.d,
                });
            }
            if w.scale > 0.0 {
                if w.g.is_zero() {
                    return Err(SpecError::ZeroWeightPolynomial);
                }
                has_content = true;
            }
        }
        for atom in &self.atoms {
            if atom.point.len() != self.d {
                return Err(SpecError::AtomDimension {
                    got: atom.point.len(),
                    want: self.d,
                });
            }
            let nsq: f64 = atom.point.iter().map(|z| z.norm_sqr()).sum();
            if (nsq - 1.0).abs() > SPHERE_TOL {
                return Err(SpecError::AtomOffSphere(nsq));
            }
            if !(atom.mass > 0.0) || !atom.mass.is_finite() {
                return Err(SpecError::NonpositiveMass(atom.mass));
            }
            has_content = true;
        }
        if !has_content {
            return Err(SpecError::EmptyMeasure);
        }
        Ok(())
    }

    /// True when the weight part uses exponent exactly 2, the case with a
    /// closed form for every moment.
    pub fn has_exact_moments(&self) -> bool {
        match &self.weight {
            None => true,
            Some(w) => w.scale == 0.0 || w.exponent == 2.0,
        }
    }

    /// Parses and validates a JSON spec.
    pub fn from_json_str(text: &str) -> Result<Self, SpecError> {
        let wire: WireSpec = serde_json::from_str(text)?;
        let spec = wire.into_spec()?;
        spec.validate()?;
        Ok(spec)
    }

    /// Canonical JSON form of the spec.
    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&WireSpec::from_spec(self)).expect("spec serializes")
    }
}

/// Herglotz transform of the atomic part at a point of the open unit ball:
/// `F(z) = sum_k mass_k (1 + <z, zeta_k>) / (1 - <z, zeta_k>)` with
/// `<z, zeta> = sum_j z_j conj(zeta_j)`. Has positive real part, and
/// `F(0)` equals the total atomic mass.
pub fn herglotz_eval(atoms: &[Atom], z: &[C64]) -> Result<C64, SpecError> {
    if atoms.is_empty() {
        return Err(SpecError::NoAtoms);
    }
    let nsq: f64 = z.iter().map(|v| v.norm_sqr()).sum();
    if nsq >= 1.0 {
        return Err(SpecError::OutsideBall(nsq.sqrt()));
    }
    let one = C64::new(1.0, 0.0);
    let mut acc = C64::new(0.0, 0.0);
    for atom in atoms {
        let ip: C64 = z
            .iter()
            .zip(&atom.point)
            .map(|(zj, pj)| zj * pj.conj())
            .sum();
        acc += atom.mass * (one + ip) / (one - ip);
    }
    Ok(acc)
}

/// Cayley transform `(F - 1) / (F + 1)` of the Herglotz transform of a unit
/// mass atomic part. Maps the open ball into the closed unit disc, fixes the
/// origin, and tends to 1 along the ray into each atom.
pub fn schur_eval(atoms: &[Atom], z: &[C64]) -> Result<C64, SpecError> {
    let f = herglotz_eval(atoms, z)?;
    let one = C64::new(1.0, 0.0);
    Ok((f - one) / (f + one))
}

/// Built-in measures: `lebesgue` (the invariant measure itself, d = 2),
/// `counterexample` (the diagonal weight `2 |z_1|^2`, d = 2), and
/// `stable-demo` (a normalized weight `|1 + 0.3 z_1 - 0.2 z_2|^2`, d = 2).
pub fn preset(name: &str) -> Result<MeasureSpec, SpecError> {
    let one = C64::new(1.0, 0.0);
    let spec = match name {
        "lebesgue" => MeasureSpec {
            d: 2,
            weight: Some(WeightSpec {
                scale: 1.0,
                exponent: 2.0,
                g: TermPoly::constant(2, one),
            }),
            atoms: vec![],
        },
        "counterexample" => MeasureSpec {
            d: 2,
            weight: Some(WeightSpec {
                scale: 2.0,
                exponent: 2.0,
                g: TermPoly::new(2, vec![(MultiIndex::new(vec![1, 0]), one)])
                    .expect("valid terms"),
            }),
            atoms: vec![],
        },
        "stable-demo" => {
            // Coefficient mass of |g|^2 against sigma: 1 + 0.09/2 + 0.04/2.
            let scale = 1.0 / (1.0 + 0.3 * 0.3 * 0.5 + 0.2 * 0.2 * 0.5);
            MeasureSpec {
                d: 2,
                weight: Some(WeightSpec {
                    scale,
                    exponent: 2.0,
                    g: TermPoly::new(
                        2,
                        vec![
                            (MultiIndex::zero(2), one),
                            (MultiIndex::new(vec![1, 0]), C64::new(0.3, 0.0)),
                            (MultiIndex::new(vec![0, 1]), C64::new(-0.2, 0.0)),
                        ],
                    )
                    .expect("valid terms"),
                }),
                atoms: vec![],
            }
        }
        other => return Err(SpecError::UnknownPreset(other.to_string())),
    };
    debug_assert!(spec.validate().is_ok());
    Ok(spec)
}

// ---- JSON wire form ----

#[derive(Serialize, Deserialize)]
struct WireSpec {
    d: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weight: Option<WireWeight>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    atoms: Vec<WireAtom>,
}

#[derive(Serialize, Deserialize)]
struct WireWeight {
    scale: f64,
    exponent: f64,
    g: Vec<WireTerm>,
}

#[derive(Serialize, Deserialize)]
struct WireTerm {
    index: Vec<u32>,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct WireAtom {
    point: Vec<[f64; 2]>,
    mass: f64,
}

impl WireSpec {
    fn into_spec(self) -> Result<MeasureSpec, SpecError> {
        let weight = match self.weight {
            None => None,
            Some(w) => {
                let terms = w
                    .g
                    .into_iter()
                    .map(|t| (MultiIndex::new(t.index), C64::new(t.re, t.im)))
                    .collect();
                Some(WeightSpec {
                    scale: w.scale,
                    exponent: w.exponent,
                    g: TermPoly::new(self.d, terms)?,
                })
            }
        };
        let atoms = self
            .atoms
            .into_iter()
            .map(|a| Atom {
                point: a.point.iter().map(|p| C64::new(p[0], p[1])).collect(),
                mass: a.mass,
            })
            .collect();
        Ok(MeasureSpec {
            d: self.d,
            weight,
            atoms,
        })
    }

    fn from_spec(spec: &MeasureSpec) -> WireSpec {
        WireSpec {
            d: spec.d,
            weight: spec.weight.as_ref().map(|w| WireWeight {
                scale: w.scale,
                exponent: w.exponent,
                g: w.g
                    .terms()
                    .iter()
                    .map(|(idx, c)| WireTerm {
                        index: idx.entries().to_vec(),
                        re: c.re,
                        im: c.im,
                    })
                    .collect(),
            }),
            atoms: spec
                .atoms
                .iter()
                .map(|a| WireAtom {
                    point: a.point.iter().map(|z| [z.re, z.im]).collect(),
                    mass: a.mass,
                })
                .collect(),
        }
    }
}
