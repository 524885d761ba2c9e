//! Stochastic approximation data model, equilibrium taxonomy and the
//! limit-prediction decision procedure.
//!
//! A process `X_{n+1} - X_n = γ_{n+1} [f(X_n) + U_{n+1}]` on `[0, 1]` converges
//! almost surely to a zero of the drift `f`. Which zeros carry mass is decided
//! here from exact sign information about the drift and the error function
//! `E(x) = E_n U_{n+1}^2`.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{format_rational, serde_rational, serde_rational_pair_opt, Rational};
use crate::ratpoly::{
    one_sided_signs, roots_in_unit_interval, sign_at, RatPoly, RootLocation, RootRecord, RootValue,
};

/// Constants of the stochastic approximation definition:
/// `c_l/n <= γ_n <= c_u/n`, `|U_n| <= K_u`, `|f| <= K_f`,
/// `|E_n(γ_{n+1} U_{n+1})| <= K_e γ_n^2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SAConditions {
    #[serde(with = "serde_rational")]
    pub c_l: Rational,
    #[serde(with = "serde_rational")]
    pub c_u: Rational,
    #[serde(with = "serde_rational")]
    pub k_u: Rational,
    #[serde(with = "serde_rational")]
    pub k_f: Rational,
    #[serde(with = "serde_rational")]
    pub k_e: Rational,
    #[serde(with = "serde_rational")]
    pub k_delta: Rational,
}

impl SAConditions {
    pub fn new(
        c_l: Rational,
        c_u: Rational,
        k_u: Rational,
        k_f: Rational,
        k_e: Rational,
    ) -> Result<Self> {
        for (name, v) in [
            ("c_l", &c_l),
            ("c_u", &c_u),
            ("K_u", &k_u),
            ("K_f", &k_f),
            ("K_e", &k_e),
        ] {
            if !v.is_positive() {
                return Err(Error::NonPositiveParameter(format!(
                    "{name} = {}",
                    format_rational(v)
                )));
            }
        }
        if c_l > c_u {
            return Err(Error::Precondition(format!(
                "c_l = {} exceeds c_u = {}",
                format_rational(&c_l),
                format_rational(&c_u)
            )));
        }
        let k_delta = &c_u * (&k_f + &k_u);
        Ok(SAConditions {
            c_l,
            c_u,
            k_u,
            k_f,
            k_e,
            k_delta,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EquilibriumClass {
    Stable,
    StrictlyUnstable,
    Touchpoint,
    FlatDrift,
    /// Boundary zero where `f(x)(x - p) >= 0` without strict inequality.
    /// A non-zero polynomial never vanishes on a one-sided neighbourhood,
    /// so `classify` cannot produce this; it exists for reporting.
    WeaklyUnstableBoundary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum DerivativeValue {
    Exact {
        #[serde(with = "serde_rational")]
        value: Rational,
    },
    Approx {
        value: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium {
    pub root: RootRecord,
    pub class: EquilibriumClass,
    pub derivative_at_root: DerivativeValue,
    /// Exact sign of the drift's derivative at the root.
    pub derivative_sign: i8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Boundary {
    Zero,
    One,
}

/// Stable identifiers for the results a verdict rests on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Citation {
    #[serde(rename = "theorem:main")]
    Main,
    #[serde(rename = "theorem:pem")]
    Pem,
    #[serde(rename = "theorem:renlund")]
    Renlund,
    #[serde(rename = "theorem:stable")]
    Stable,
    #[serde(rename = "theorem:pem2")]
    Pem2,
    #[serde(rename = "theorem:h1")]
    H1,
    #[serde(rename = "theorem:2drag")]
    TwoDrag,
    /// Degenerate urns with a zero row sum, handled by direct reduction.
    #[serde(rename = "reduction:loose-ends")]
    LooseEnds,
}

impl Citation {
    pub fn as_str(self) -> &'static str {
        match self {
            Citation::Main => "theorem:main",
            Citation::Pem => "theorem:pem",
            Citation::Renlund => "theorem:renlund",
            Citation::Stable => "theorem:stable",
            Citation::Pem2 => "theorem:pem2",
            Citation::H1 => "theorem:h1",
            Citation::TwoDrag => "theorem:2drag",
            Citation::LooseEnds => "reduction:loose-ends",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PredictionKind {
    PointMassSet,
    BetaDistribution,
    ContinuousNoAtoms,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "converges-a.s.-unique")]
    ConvergesAsUnique,
    #[serde(rename = "positive-probability")]
    PositiveProbability,
    #[serde(rename = "possible-touchpoint")]
    PossibleTouchpoint,
    #[serde(rename = "unknown")]
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointVerdict {
    pub root: RootRecord,
    pub class: EquilibriumClass,
    pub verdict: Verdict,
    pub citation: Citation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcludedPoint {
    pub root: RootRecord,
    pub class: EquilibriumClass,
    pub reason: Citation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitPrediction {
    pub kind: PredictionKind,
    pub certain_points: Vec<PointVerdict>,
    pub excluded_points: Vec<ExcludedPoint>,
    #[serde(with = "serde_rational_pair_opt", default)]
    pub beta_params: Option<(Rational, Rational)>,
    /// Citation for a flat-drift prediction (Beta or atomless limit).
    #[serde(default)]
    pub citation: Option<Citation>,
}

impl LimitPrediction {
    /// Points that may carry limit mass (everything not excluded).
    pub fn allowed_points(&self) -> Vec<f64> {
        self.certain_points
            .iter()
            .map(|p| p.root.approx())
            .collect()
    }

    pub fn excluded_approx(&self) -> Vec<f64> {
        self.excluded_points
            .iter()
            .map(|p| p.root.approx())
            .collect()
    }
}

/// Closed interval of rationals.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interval {
    #[serde(with = "serde_rational")]
    pub lo: Rational,
    #[serde(with = "serde_rational")]
    pub hi: Rational,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Self {
        Interval { lo, hi }
    }

    pub fn unit() -> Self {
        Interval::new(Rational::zero(), Rational::one())
    }
}

/// The martingale families whose drift is identically zero.
#[derive(Debug, Clone, PartialEq)]
pub enum FlatFamily {
    /// One draw, `a = d`, `b = c = 0`: Beta(`w0/a`, `b0/a`) limit.
    ClassicalPolya { alpha: Rational, beta: Rational },
    /// Two draws, `a = 2d`, `f = 2c`, `b = e = 0`: no atoms in `(0, 1)`.
    TwoDrawPolya,
}

/// Model facts the decision procedure cannot read off the polynomials.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ModelFlags {
    pub flat_family: Option<FlatFamily>,
    /// White balls are added infinitely often (needed to leave an unstable 0).
    pub white_count_diverges: bool,
    /// Black balls are added infinitely often (needed to leave an unstable 1).
    pub black_count_diverges: bool,
    /// Almost-sure limit established directly for degenerate urns.
    pub forced_limit: Option<Rational>,
    /// Zeros of the drift ruled out by a degenerate reduction.
    pub reduction_exclusions: Vec<Rational>,
}

pub fn classify(drift: &RatPoly, root: &RootRecord) -> Result<Equilibrium> {
    if drift.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if sign_at(drift, root) != 0 {
        return Err(Error::NotARoot(root.label()));
    }
    let (left, right) = one_sided_signs(drift, root);
    let class = match root.location {
        // Only the interior side exists at the boundary.
        RootLocation::LeftBoundary => {
            if right < 0 {
                EquilibriumClass::Stable
            } else {
                EquilibriumClass::StrictlyUnstable
            }
        }
        RootLocation::RightBoundary => {
            if left > 0 {
                EquilibriumClass::Stable
            } else {
                EquilibriumClass::StrictlyUnstable
            }
        }
        RootLocation::Interior => match (left, right) {
            (l, r) if l == r => EquilibriumClass::Touchpoint,
            (_, r) if r < 0 => EquilibriumClass::Stable,
            _ => EquilibriumClass::StrictlyUnstable,
        },
    };
    let d = drift.derivative();
    let derivative_sign = sign_at(&d, root);
    let derivative_at_root = match &root.value {
        RootValue::Exact { value } => DerivativeValue::Exact {
            value: d.eval(value),
        },
        RootValue::Isolated { approx, .. } => DerivativeValue::Approx {
            value: if derivative_sign == 0 {
                0.0
            } else {
                d.eval_f64(*approx)
            },
        },
    };
    Ok(Equilibrium {
        root: root.clone(),
        class,
        derivative_at_root,
        derivative_sign,
    })
}

/// A positive lower bound on the noise exists near the point iff `E > 0` there.
pub fn check_noise_floor(error_fn: &RatPoly, point: &RootRecord) -> bool {
    sign_at(error_fn, point) > 0
}

/// Applicability of the boundary non-convergence theorem at a strictly
/// unstable boundary zero: drift and error vanish there (so both `f^2` and
/// `E` are `O(|x - p|)`) and the colour pushing away from the boundary is
/// reinforced infinitely often.
pub fn check_renlund(
    drift: &RatPoly,
    error_fn: &RatPoly,
    boundary: Boundary,
    flags: &ModelFlags,
) -> Result<bool> {
    let point = match boundary {
        Boundary::Zero => RootRecord::exact(Rational::zero(), 1),
        Boundary::One => RootRecord::exact(Rational::one(), 1),
    };
    let eq = classify(drift, &point)?;
    if eq.class != EquilibriumClass::StrictlyUnstable {
        return Err(Error::Precondition(format!(
            "boundary {} is {:?}, not strictly unstable",
            point.label(),
            eq.class
        )));
    }
    let diverges = match boundary {
        Boundary::Zero => flags.white_count_diverges,
        Boundary::One => flags.black_count_diverges,
    };
    Ok(sign_at(error_fn, &point) == 0 && diverges)
}

pub fn boundary_of(root: &RootRecord) -> Result<Boundary> {
    match root.location {
        RootLocation::LeftBoundary => Ok(Boundary::Zero),
        RootLocation::RightBoundary => Ok(Boundary::One),
        RootLocation::Interior => Err(Error::NotBoundary(root.label())),
    }
}

pub fn predict_limit(
    drift: &RatPoly,
    error_fn: &RatPoly,
    attainable: Option<&Interval>,
    flags: &ModelFlags,
) -> Result<LimitPrediction> {
    if drift.is_zero() {
        let (kind, beta_params, citation) = match &flags.flat_family {
            Some(FlatFamily::ClassicalPolya { alpha, beta }) => (
                PredictionKind::BetaDistribution,
                Some((alpha.clone(), beta.clone())),
                Some(Citation::H1),
            ),
            Some(FlatFamily::TwoDrawPolya) => (
                PredictionKind::ContinuousNoAtoms,
                None,
                Some(Citation::TwoDrag),
            ),
            None => (PredictionKind::Unknown, None, None),
        };
        return Ok(LimitPrediction {
            kind,
            certain_points: vec![],
            excluded_points: vec![],
            beta_params,
            citation,
        });
    }

    let unit = Interval::unit();
    let att = attainable.unwrap_or(&unit);
    let roots = roots_in_unit_interval(drift)?;
    let mut certain = Vec::new();
    let mut excluded = Vec::new();

    for root in roots {
        let eq = classify(drift, &root)?;
        let class = eq.class;
        let exact = root.exact_value().cloned();

        if let Some(limit) = &flags.forced_limit {
            if exact.as_ref() == Some(limit) {
                certain.push(PointVerdict {
                    root,
                    class,
                    verdict: Verdict::ConvergesAsUnique,
                    citation: Citation::LooseEnds,
                });
            } else {
                excluded.push(ExcludedPoint {
                    root,
                    class,
                    reason: Citation::LooseEnds,
                });
            }
            continue;
        }
        if exact
            .as_ref()
            .is_some_and(|v| flags.reduction_exclusions.contains(v))
        {
            excluded.push(ExcludedPoint {
                root,
                class,
                reason: Citation::LooseEnds,
            });
            continue;
        }

        match class {
            EquilibriumClass::StrictlyUnstable if root.is_boundary() => {
                if check_renlund(drift, error_fn, boundary_of(&root)?, flags)? {
                    excluded.push(ExcludedPoint {
                        root,
                        class,
                        reason: Citation::Renlund,
                    });
                } else {
                    certain.push(unknown(root, class));
                }
            }
            EquilibriumClass::StrictlyUnstable => {
                if check_noise_floor(error_fn, &root) {
                    excluded.push(ExcludedPoint {
                        root,
                        class,
                        reason: Citation::Pem,
                    });
                } else {
                    certain.push(unknown(root, class));
                }
            }
            EquilibriumClass::Stable => {
                if root.in_closed(&att.lo, &att.hi) {
                    certain.push(PointVerdict {
                        root,
                        class,
                        verdict: Verdict::PositiveProbability,
                        citation: Citation::Stable,
                    });
                } else {
                    certain.push(unknown(root, class));
                }
            }
            EquilibriumClass::Touchpoint => {
                if root.in_open(&att.lo, &att.hi) {
                    certain.push(PointVerdict {
                        root,
                        class,
                        verdict: Verdict::PossibleTouchpoint,
                        citation: Citation::Pem2,
                    });
                } else {
                    certain.push(unknown(root, class));
                }
            }
            EquilibriumClass::FlatDrift | EquilibriumClass::WeaklyUnstableBoundary => {
                certain.push(unknown(root, class));
            }
        }
    }

    if certain.len() == 1 {
        let only = &mut certain[0];
        only.verdict = Verdict::ConvergesAsUnique;
        if only.citation != Citation::LooseEnds {
            only.citation = Citation::Main;
        }
    }

    Ok(LimitPrediction {
        kind: PredictionKind::PointMassSet,
        certain_points: certain,
        excluded_points: excluded,
        beta_params: None,
        citation: Some(Citation::Main),
    })
}

fn unknown(root: RootRecord, class: EquilibriumClass) -> PointVerdict {
    PointVerdict {
        root,
        class,
        verdict: Verdict::Unknown,
        citation: Citation::Main,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn root_at(p: &RatPoly, x: Rational) -> RootRecord {
        roots_in_unit_interval(p)
            .unwrap()
            .into_iter()
            .find(|r| r.exact_value() == Some(&x))
            .expect("root present")
    }

    #[test]
    fn conditions_compute_k_delta() {
        let c = SAConditions::new(rat(1, 10), int(1), int(2), int(3), int(1)).unwrap();
        assert_eq!(c.k_delta, int(5));
        assert!(SAConditions::new(int(2), int(1), int(1), int(1), int(1)).is_err());
        assert!(SAConditions::new(int(0), int(1), int(1), int(1), int(1)).is_err());
    }

    #[test]
    fn classify_examples() {
        let g = RatPoly::from_ints(&[3, -22, 48, -32]);
        let e = classify(&g, &root_at(&g, rat(1, 2))).unwrap();
        assert_eq!(e.class, EquilibriumClass::StrictlyUnstable);
        assert_eq!(
            e.derivative_at_root,
            DerivativeValue::Exact { value: int(2) }
        );
        assert_eq!(
            classify(&g, &root_at(&g, rat(1, 4))).unwrap().class,
            EquilibriumClass::Stable
        );

        let t = RatPoly::from_ints(&[3, -28, 80, -64]);
        assert_eq!(
            classify(&t, &root_at(&t, rat(1, 4))).unwrap().class,
            EquilibriumClass::Touchpoint
        );
        assert_eq!(
            classify(&t, &root_at(&t, rat(3, 4))).unwrap().class,
            EquilibriumClass::Stable
        );

        let friedman = RatPoly::from_ints(&[1, -2]);
        assert_eq!(
            classify(&friedman, &root_at(&friedman, rat(1, 2)))
                .unwrap()
                .class,
            EquilibriumClass::Stable
        );
    }

    #[test]
    fn classify_triple_root_by_signs() {
        let g = RatPoly::from_ints(&[1, -6, 12, -8]);
        let e = classify(&g, &root_at(&g, rat(1, 2))).unwrap();
        assert_eq!(e.class, EquilibriumClass::Stable);
        assert_eq!(e.derivative_sign, 0);
        let h = g.scale(&int(-1));
        assert_eq!(
            classify(&h, &root_at(&h, rat(1, 2))).unwrap().class,
            EquilibriumClass::StrictlyUnstable
        );
    }

    #[test]
    fn classify_boundaries() {
        // x (1 - x): 0 pushes out, 1 pulls in
        let p = RatPoly::from_ints(&[0, 1, -1]);
        assert_eq!(
            classify(&p, &RootRecord::exact(int(0), 1)).unwrap().class,
            EquilibriumClass::StrictlyUnstable
        );
        assert_eq!(
            classify(&p, &RootRecord::exact(int(1), 1)).unwrap().class,
            EquilibriumClass::Stable
        );
        // -x^2: double root at 0, drift pulls toward 0
        let q = RatPoly::from_ints(&[0, 0, -1]);
        assert_eq!(
            classify(&q, &RootRecord::exact(int(0), 2)).unwrap().class,
            EquilibriumClass::Stable
        );
    }

    #[test]
    fn classify_rejects() {
        let p = RatPoly::from_ints(&[1, -2]);
        assert!(matches!(
            classify(&p, &RootRecord::exact(rat(1, 3), 1)),
            Err(Error::NotARoot(_))
        ));
        assert_eq!(
            classify(&RatPoly::zero(), &RootRecord::exact(rat(1, 3), 1)),
            Err(Error::ZeroPolynomial)
        );
    }

    #[test]
    fn renlund_preconditions() {
        let drift = RatPoly::from_ints(&[1, -2]);
        let e = RatPoly::from_ints(&[0, 1, -1]);
        let flags = ModelFlags {
            white_count_diverges: true,
            ..Default::default()
        };
        assert!(matches!(
            check_renlund(&drift, &e, Boundary::Zero, &flags),
            Err(Error::NotARoot(_))
        ));
        // x (1 - x) is stable at 1, not strictly unstable
        let p = RatPoly::from_ints(&[0, 1, -1]);
        assert!(matches!(
            check_renlund(&p, &e, Boundary::One, &flags),
            Err(Error::Precondition(_))
        ));
        assert!(check_renlund(&p, &e, Boundary::Zero, &flags).unwrap());
        let no_growth = ModelFlags::default();
        assert!(!check_renlund(&p, &e, Boundary::Zero, &no_growth).unwrap());
        assert!(boundary_of(&RootRecord::exact(rat(1, 2), 1)).is_err());
    }

    #[test]
    fn flat_drift_predictions() {
        let flags = ModelFlags {
            flat_family: Some(FlatFamily::ClassicalPolya {
                alpha: int(1),
                beta: int(1),
            }),
            ..Default::default()
        };
        let p = predict_limit(&RatPoly::zero(), &RatPoly::zero(), None, &flags).unwrap();
        assert_eq!(p.kind, PredictionKind::BetaDistribution);
        assert_eq!(p.beta_params, Some((int(1), int(1))));
        let flags = ModelFlags {
            flat_family: Some(FlatFamily::TwoDrawPolya),
            ..Default::default()
        };
        let p = predict_limit(&RatPoly::zero(), &RatPoly::zero(), None, &flags).unwrap();
        assert_eq!(p.kind, PredictionKind::ContinuousNoAtoms);
        assert_eq!(p.citation, Some(Citation::TwoDrag));
    }

    #[test]
    fn stable_outside_attainable_is_unknown() {
        let g = RatPoly::from_ints(&[3, -22, 48, -32]);
        let e = RatPoly::from_ints(&[0, 1, -1]);
        let att = Interval::new(rat(1, 3), rat(5, 6));
        let p = predict_limit(&g, &e, Some(&att), &ModelFlags::default()).unwrap();
        let v: Vec<_> = p
            .certain_points
            .iter()
            .map(|c| (c.root.label(), c.verdict))
            .collect();
        assert_eq!(
            v,
            vec![
                ("1/4".to_string(), Verdict::Unknown),
                ("3/4".to_string(), Verdict::PositiveProbability)
            ]
        );
        assert_eq!(p.excluded_points[0].reason, Citation::Pem);
    }

    #[test]
    fn citations_serialize_as_stable_ids() {
        assert_eq!(
            serde_json::to_string(&Citation::Pem2).unwrap(),
            "\"theorem:pem2\""
        );
        assert_eq!(Citation::TwoDrag.as_str(), "theorem:2drag");
        assert_eq!(
            serde_json::to_string(&Verdict::ConvergesAsUnique).unwrap(),
            "\"converges-a.s.-unique\""
        );
    }
}
