//! Full derivation for one urn: drift, error, equilibria, constants and the
//! predicted limit.

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::degenerate::{degenerate_case, degenerate_reduce, DegenerateReduction};
use super::two_draw::ratio_span;
use super::{
    attainable_interval, drift_of, drift_one_degenerate, error_one, error_two, k_e_one, k_e_two,
    ModelFile, ModelKind, ModelMeta, ReplacementMatrixTwo, UrnModel, UrnSpec,
};
use crate::error::{Error, Result};
use crate::rational::{int, Rational};
use crate::ratpoly::{roots_in_unit_interval, RatPoly};
use crate::sa::{
    classify, predict_limit, Equilibrium, FlatFamily, Interval, LimitPrediction, ModelFlags,
    SAConditions,
};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorForms {
    pub a: RatPoly,
    pub b: RatPoly,
    pub c: RatPoly,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Analysis {
    pub model: ModelFile,
    pub kind: ModelKind,
    pub drift: RatPoly,
    pub drift_text: String,
    pub psi: RatPoly,
    pub psi_text: String,
    /// Error polynomial the decision procedure uses (differs from
    /// `x(1-x)Ψ` only for the subsequence reductions of cases 4 to 6).
    pub error_fn: RatPoly,
    pub error_forms: Option<ErrorForms>,
    pub equilibria: Vec<Equilibrium>,
    pub attainable: Option<Interval>,
    pub meta: ModelMeta,
    pub sa_conditions: Option<SAConditions>,
    pub degenerate: Option<DegenerateReduction>,
    pub prediction: LimitPrediction,
}

pub fn analyze(spec: &UrnSpec) -> Result<Analysis> {
    let model = &spec.model;
    let drift = drift_of(model);
    let (psi, error_forms) = match model {
        UrnModel::OneDraw(m) => (error_one(m).0, None),
        UrnModel::TwoDraw { matrix, .. } => {
            let e = error_two(matrix);
            let forms = ErrorForms {
                a: e.a_x.clone(),
                b: e.b_x.clone(),
                c: e.c_x.clone(),
            };
            (e.psi, Some(forms))
        }
    };
    let error_fn = effective_error_fn(model);
    let meta = model_meta(spec);
    let flags = model_flags(spec);

    let equilibria = if drift.is_zero() {
        Vec::new()
    } else {
        roots_in_unit_interval(&drift)?
            .iter()
            .map(|r| classify(&drift, r))
            .collect::<Result<Vec<_>>>()?
    };
    let prediction = predict_limit(&drift, &error_fn, meta.attainable.as_ref(), &flags)?;
    let degenerate = match model {
        UrnModel::TwoDraw { matrix, .. } if degenerate_case(matrix) != 0 => {
            Some(degenerate_reduce(matrix)?)
        }
        _ => None,
    };

    Ok(Analysis {
        model: ModelFile::from(spec),
        kind: model.kind(),
        drift_text: drift.to_string(),
        drift,
        psi_text: psi.to_string(),
        psi,
        error_fn,
        error_forms,
        equilibria,
        attainable: meta.attainable.clone(),
        sa_conditions: sa_conditions(spec).ok(),
        meta,
        degenerate,
        prediction,
    })
}

fn x_one_minus_x() -> RatPoly {
    RatPoly::from_ints(&[0, 1, -1])
}

/// Leading error polynomial `E(x)`, up to a factor positive on `(0, 1)`.
pub fn effective_error_fn(model: &UrnModel) -> RatPoly {
    match model {
        UrnModel::OneDraw(m) => error_one(m).1,
        UrnModel::TwoDraw { matrix: m, .. } => match degenerate_case(m) {
            4 => case4_error(m),
            5 => reflect(&case4_error(&m.color_swapped())),
            6 => {
                let alpha_hat = &m.e + &m.f - &m.a - &m.b;
                let lin = RatPoly::linear(alpha_hat, &m.a - &m.e);
                let x1x = x_one_minus_x();
                &(&x1x * &x1x) * &(&lin * &lin)
            }
            _ => error_two(m).error_fn(),
        },
    }
}

/// `4 x (1-x) C_x^2`, the case 4 subsequence error pulled back to `x`.
fn case4_error(m: &ReplacementMatrixTwo) -> RatPoly {
    let c_x = RatPoly::linear(&m.e + &m.f - &m.c - &m.d, &m.c - &m.e);
    (&x_one_minus_x() * &(&c_x * &c_x)).scale(&int(4))
}

/// `p(1 - x)`.
fn reflect(p: &RatPoly) -> RatPoly {
    let one_minus_x = RatPoly::from_ints(&[1, -1]);
    let mut acc = RatPoly::zero();
    for c in p.coeffs().iter().rev() {
        acc = &(&acc * &one_minus_x) + &RatPoly::constant(c.clone());
    }
    acc
}

pub fn model_flags(spec: &UrnSpec) -> ModelFlags {
    let mut flags = ModelFlags::default();
    match &spec.model {
        UrnModel::OneDraw(m) => {
            if m.b.is_zero() && m.c.is_zero() && m.a == m.d {
                flags.flat_family = Some(FlatFamily::ClassicalPolya {
                    alpha: &spec.w0 / &m.a,
                    beta: &spec.b0 / &m.a,
                });
            }
            flags.white_count_diverges = m.a.is_positive() || m.c.is_positive();
            flags.black_count_diverges = m.b.is_positive() || m.d.is_positive();
            flags.forced_limit = drift_one_degenerate(m).ok();
        }
        UrnModel::TwoDraw { matrix: m, .. } => {
            if m.b.is_zero() && m.e.is_zero() && m.a == &m.d * int(2) && m.f == &m.c * int(2) {
                flags.flat_family = Some(FlatFamily::TwoDrawPolya);
            }
            flags.white_count_diverges = m.c.is_positive()
                || m.e.is_positive()
                || (m.c.is_zero() && m.e.is_zero() && m.f.is_zero() && m.a.is_positive());
            flags.black_count_diverges = m.d.is_positive()
                || m.b.is_positive()
                || (m.a.is_zero() && m.b.is_zero() && m.d.is_zero() && m.f.is_positive());
            match degenerate_reduce(m) {
                Ok(DegenerateReduction::Limit { limit, .. }) => flags.forced_limit = Some(limit),
                Ok(DegenerateReduction::Subsequence { case: 4, .. }) if m.d.is_positive() => {
                    flags.reduction_exclusions.push(Rational::one())
                }
                Ok(DegenerateReduction::Subsequence { case: 5, .. }) if m.c.is_positive() => {
                    flags.reduction_exclusions.push(Rational::zero())
                }
                _ => {}
            }
        }
    }
    flags
}

fn positive_or_one(x: Rational) -> Rational {
    if x.is_positive() {
        x
    } else {
        Rational::one()
    }
}

pub fn model_meta(spec: &UrnSpec) -> ModelMeta {
    let model = &spec.model;
    let flags = model_flags(spec);
    let (k_e, attainable, degenerate) = match model {
        UrnModel::OneDraw(m) => {
            let [r1, r2] = m.row_sums();
            let case = if r2.is_zero() {
                1
            } else if r1.is_zero() {
                2
            } else {
                0
            };
            (k_e_one(m), None, case)
        }
        UrnModel::TwoDraw { matrix, sampling } => {
            let case = degenerate_case(matrix);
            let att = if case == 0 {
                attainable_interval(matrix).ok()
            } else {
                ratio_span(matrix)
            };
            (k_e_two(matrix, *sampling), att, case)
        }
    };
    ModelMeta {
        t_min: model.t_min(),
        t_max: model.t_max(),
        k_e: positive_or_one(k_e),
        attainable,
        kind: model.kind(),
        degenerate_case: degenerate,
        white_count_diverges: flags.white_count_diverges,
        black_count_diverges: flags.black_count_diverges,
    }
}

fn l1(p: &RatPoly) -> Rational {
    p.coeffs().iter().map(|c| c.abs()).sum()
}

/// Constants for `γ_n = 1/T_n`: `c_l = 1/(T_0 + t_max)`, `c_u = 1/t_min`,
/// `K_f = ||f||_1`, `K_u = max entry + K_f`.
pub fn sa_conditions(spec: &UrnSpec) -> Result<SAConditions> {
    let model = &spec.model;
    let t_min = model.t_min();
    if !t_min.is_positive() {
        return Err(Error::Precondition(
            "t_min = 0: steplengths are not of order 1/n".into(),
        ));
    }
    let t0 = &spec.w0 + &spec.b0;
    let c_l = Rational::one() / (&t0 + model.t_max());
    let c_u = Rational::one() / t_min;
    let k_f = positive_or_one(l1(&drift_of(model)));
    let max_entry = match model {
        UrnModel::OneDraw(m) => m.entries().into_iter().max().cloned(),
        UrnModel::TwoDraw { matrix, .. } => matrix.entries().into_iter().max().cloned(),
    }
    .expect("non-empty matrix");
    let k_u = max_entry + &k_f;
    let k_e = model_meta(spec).k_e;
    SAConditions::new(c_l, c_u, k_u, k_f, k_e)
}
