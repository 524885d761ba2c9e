//! One-draw and two-draw generalized Pólya urns.
//!
//! Urn contents and replacement parameters are exact rationals; nothing here
//! requires integrality.

mod analysis;
mod degenerate;
pub mod identities;
mod moments;
mod one_draw;
mod two_draw;

pub use analysis::{analyze, effective_error_fn, model_flags, model_meta, sa_conditions, Analysis};
pub use degenerate::{
    case4_identity_holds, case6_ghat_direct, case6_identity_holds, degenerate_case,
    degenerate_reduce, transform_case4, DegenerateReduction,
};
pub use moments::{
    cond_moments_oracle, drift_of, step_distribution, CondMoments, Outcome, StepDistribution,
    StepOutcome,
};
pub use one_draw::{cond_iv_closed_form_one, drift_one, drift_one_degenerate, error_one, k_e_one};
pub use two_draw::{
    attainable_interval, drift_coefficients_two, drift_two, error_two, k_e_two,
    psi_explicit_quartic, r_n_closed_form, table1_direct, table1_polys, ErrorTwo, Table1,
};

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{format_rational, parse_rational, serde_rational, Rational};
use crate::sa::Interval;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplacementMatrixOne {
    pub a: Rational,
    pub b: Rational,
    pub c: Rational,
    pub d: Rational,
}

impl ReplacementMatrixOne {
    pub fn new(a: Rational, b: Rational, c: Rational, d: Rational) -> Result<Self> {
        check_entries(&[&a, &b, &c, &d])?;
        Ok(ReplacementMatrixOne { a, b, c, d })
    }

    pub fn from_ints(v: [i64; 4]) -> Result<Self> {
        let [a, b, c, d] = v.map(crate::rational::int);
        Self::new(a, b, c, d)
    }

    pub fn entries(&self) -> [&Rational; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    /// Row sums `(a + b, c + d)`.
    pub fn row_sums(&self) -> [Rational; 2] {
        [&self.a + &self.b, &self.c + &self.d]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplacementMatrixTwo {
    pub a: Rational,
    pub b: Rational,
    pub c: Rational,
    pub d: Rational,
    pub e: Rational,
    pub f: Rational,
}

impl ReplacementMatrixTwo {
    pub fn new(
        a: Rational,
        b: Rational,
        c: Rational,
        d: Rational,
        e: Rational,
        f: Rational,
    ) -> Result<Self> {
        check_entries(&[&a, &b, &c, &d, &e, &f])?;
        Ok(ReplacementMatrixTwo { a, b, c, d, e, f })
    }

    pub fn from_ints(v: [i64; 6]) -> Result<Self> {
        let [a, b, c, d, e, f] = v.map(crate::rational::int);
        Self::new(a, b, c, d, e, f)
    }

    pub fn entries(&self) -> [&Rational; 6] {
        [&self.a, &self.b, &self.c, &self.d, &self.e, &self.f]
    }

    /// Row sums for WW, WB, BB.
    pub fn row_sums(&self) -> [Rational; 3] {
        [&self.a + &self.b, &self.c + &self.d, &self.e + &self.f]
    }

    /// The same urn with the colours exchanged.
    pub fn color_swapped(&self) -> Self {
        ReplacementMatrixTwo {
            a: self.f.clone(),
            b: self.e.clone(),
            c: self.d.clone(),
            d: self.c.clone(),
            e: self.b.clone(),
            f: self.a.clone(),
        }
    }
}

fn check_entries(v: &[&Rational]) -> Result<()> {
    if let Some(neg) = v.iter().find(|x| x.is_negative()) {
        return Err(Error::InvalidMatrix(format!(
            "negative entry {}",
            format_rational(neg)
        )));
    }
    if v.iter().all(|x| x.is_zero()) {
        return Err(Error::InvalidMatrix("all entries are zero".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sampling {
    With,
    #[default]
    Without,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UrnModel {
    OneDraw(ReplacementMatrixOne),
    TwoDraw {
        matrix: ReplacementMatrixTwo,
        sampling: Sampling,
    },
}

impl UrnModel {
    pub fn kind(&self) -> ModelKind {
        match self {
            UrnModel::OneDraw(_) => ModelKind::OneDraw,
            UrnModel::TwoDraw {
                sampling: Sampling::With,
                ..
            } => ModelKind::TwoDrawWithReplacement,
            UrnModel::TwoDraw {
                sampling: Sampling::Without,
                ..
            } => ModelKind::TwoDrawWithoutReplacement,
        }
    }

    pub fn row_sums(&self) -> Vec<Rational> {
        match self {
            UrnModel::OneDraw(m) => m.row_sums().to_vec(),
            UrnModel::TwoDraw { matrix, .. } => matrix.row_sums().to_vec(),
        }
    }

    pub fn t_min(&self) -> Rational {
        self.row_sums().into_iter().min().expect("at least one row")
    }

    pub fn t_max(&self) -> Rational {
        self.row_sums().into_iter().max().expect("at least one row")
    }

    /// Whether every replacement entry is an integer.
    pub fn is_integral(&self) -> bool {
        match self {
            UrnModel::OneDraw(m) => m.entries().iter().all(|x| x.is_integer()),
            UrnModel::TwoDraw { matrix, .. } => matrix.entries().iter().all(|x| x.is_integer()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    OneDraw,
    TwoDrawWithReplacement,
    TwoDrawWithoutReplacement,
}

/// Urn contents after `n` draws.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UrnState {
    #[serde(with = "serde_rational")]
    pub w: Rational,
    #[serde(with = "serde_rational")]
    pub b: Rational,
    pub n: u64,
}

impl UrnState {
    pub fn new(w: Rational, b: Rational) -> Result<Self> {
        if w.is_negative() || b.is_negative() {
            return Err(Error::InvalidState(format!(
                "negative ball count (W = {}, B = {})",
                format_rational(&w),
                format_rational(&b)
            )));
        }
        if (&w + &b).is_zero() {
            return Err(Error::InvalidState("empty urn".into()));
        }
        Ok(UrnState { w, b, n: 0 })
    }

    pub fn total(&self) -> Rational {
        &self.w + &self.b
    }

    pub fn fraction(&self) -> Rational {
        &self.w / self.total()
    }
}

/// A model together with its initial contents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UrnSpec {
    pub model: UrnModel,
    pub w0: Rational,
    pub b0: Rational,
}

impl UrnSpec {
    pub fn new(model: UrnModel, w0: Rational, b0: Rational) -> Result<Self> {
        if !w0.is_positive() || !b0.is_positive() {
            return Err(Error::InvalidState(format!(
                "initial counts must be positive (w0 = {}, b0 = {})",
                format_rational(&w0),
                format_rational(&b0)
            )));
        }
        if model.kind() == ModelKind::TwoDrawWithoutReplacement {
            let two = crate::rational::int(2);
            if w0 < two || b0 < two {
                return Err(Error::InvalidState(
                    "two draws without replacement need w0 >= 2 and b0 >= 2".into(),
                ));
            }
        }
        Ok(UrnSpec { model, w0, b0 })
    }

    pub fn initial_state(&self) -> UrnState {
        UrnState {
            w: self.w0.clone(),
            b: self.b0.clone(),
            n: 0,
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: ModelFile = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        raw.try_into()
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(ModelFile::from(self)).expect("model file serializes")
    }
}

/// Degenerate-case numbering: 0 when every row sum is positive, otherwise the
/// reduction that applies (one-draw: 1 for `c + d = 0`, 2 for `a + b = 0`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelMeta {
    #[serde(with = "serde_rational")]
    pub t_min: Rational,
    #[serde(with = "serde_rational")]
    pub t_max: Rational,
    #[serde(with = "serde_rational")]
    pub k_e: Rational,
    pub attainable: Option<Interval>,
    pub kind: ModelKind,
    pub degenerate_case: u8,
    pub white_count_diverges: bool,
    pub black_count_diverges: bool,
}

/// On-disk model description, shared with the command line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub model: String,
    pub matrix: Vec<Vec<RatRepr>>,
    #[serde(default)]
    pub w0: Option<RatRepr>,
    #[serde(default)]
    pub b0: Option<RatRepr>,
    #[serde(default)]
    pub sampling: Option<Sampling>,
}

/// A rational as `"p/q"` or a JSON integer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatRepr(#[serde(with = "serde_rational")] pub Rational);

impl TryFrom<ModelFile> for UrnSpec {
    type Error = Error;

    fn try_from(raw: ModelFile) -> Result<Self> {
        let flat: Vec<Rational> = raw.matrix.iter().flatten().map(|r| r.0.clone()).collect();
        let shape: Vec<usize> = raw.matrix.iter().map(Vec::len).collect();
        let model = match raw.model.as_str() {
            "one-draw" => {
                if shape != [2, 2] {
                    return Err(Error::Parse(format!(
                        "one-draw matrix must be 2x2, got rows {shape:?}"
                    )));
                }
                if raw.sampling.is_some() {
                    return Err(Error::Parse(
                        "sampling applies to two-draw models only".into(),
                    ));
                }
                let [a, b, c, d]: [Rational; 4] = flat.try_into().expect("shape checked");
                UrnModel::OneDraw(ReplacementMatrixOne::new(a, b, c, d)?)
            }
            "two-draw" => {
                if shape != [2, 2, 2] {
                    return Err(Error::Parse(format!(
                        "two-draw matrix must be 3x2, got rows {shape:?}"
                    )));
                }
                let [a, b, c, d, e, f]: [Rational; 6] = flat.try_into().expect("shape checked");
                UrnModel::TwoDraw {
                    matrix: ReplacementMatrixTwo::new(a, b, c, d, e, f)?,
                    sampling: raw.sampling.unwrap_or_default(),
                }
            }
            other => return Err(Error::Parse(format!("unknown model {other:?}"))),
        };
        let default_count = default_initial_count(&model);
        let w0 = raw.w0.map(|r| r.0).unwrap_or_else(|| default_count.clone());
        let b0 = raw.b0.map(|r| r.0).unwrap_or(default_count);
        UrnSpec::new(model, w0, b0)
    }
}

impl From<&UrnSpec> for ModelFile {
    fn from(spec: &UrnSpec) -> Self {
        let row = |x: &Rational, y: &Rational| vec![RatRepr(x.clone()), RatRepr(y.clone())];
        let (model, matrix, sampling) = match &spec.model {
            UrnModel::OneDraw(m) => ("one-draw", vec![row(&m.a, &m.b), row(&m.c, &m.d)], None),
            UrnModel::TwoDraw {
                matrix: m,
                sampling,
            } => (
                "two-draw",
                vec![row(&m.a, &m.b), row(&m.c, &m.d), row(&m.e, &m.f)],
                Some(*sampling),
            ),
        };
        ModelFile {
            model: model.into(),
            matrix,
            w0: Some(RatRepr(spec.w0.clone())),
            b0: Some(RatRepr(spec.b0.clone())),
            sampling,
        }
    }
}

/// One ball of each colour for one draw, two of each for two draws.
pub fn default_initial_count(model: &UrnModel) -> Rational {
    match model {
        UrnModel::OneDraw(_) => crate::rational::int(1),
        UrnModel::TwoDraw { .. } => crate::rational::int(2),
    }
}

/// Parses a comma list such as `15,3,4,1,3,21` (entries may be `p/q`).
pub fn parse_entries(list: &str) -> Result<Vec<Rational>> {
    list.split(',').map(parse_rational).collect()
}
