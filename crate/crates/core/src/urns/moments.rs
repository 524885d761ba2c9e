//! Exact one-step outcome distributions and conditional moments by enumeration.

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::{drift_one, drift_two, Sampling, UrnModel, UrnState};
use crate::error::{Error, Result};
use crate::rational::{int, Rational};
use crate::ratpoly::RatPoly;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Outcome {
    W,
    B,
    WW,
    WB,
    BB,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub outcome: Outcome,
    pub probability: Rational,
    pub dw: Rational,
    pub dt: Rational,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepDistribution {
    pub outcomes: Vec<StepOutcome>,
}

impl StepDistribution {
    pub fn total_probability(&self) -> Rational {
        self.outcomes.iter().map(|o| o.probability.clone()).sum()
    }

    pub fn get(&self, outcome: Outcome) -> Option<&StepOutcome> {
        self.outcomes.iter().find(|o| o.outcome == outcome)
    }
}

pub fn drift_of(model: &UrnModel) -> RatPoly {
    match model {
        UrnModel::OneDraw(m) => drift_one(m),
        UrnModel::TwoDraw { matrix, .. } => drift_two(matrix),
    }
}

pub fn step_distribution(state: &UrnState, model: &UrnModel) -> Result<StepDistribution> {
    let (w, b) = (&state.w, &state.b);
    if w.is_negative() || b.is_negative() {
        return Err(Error::InvalidState("negative ball count".into()));
    }
    let t = w + b;
    if t.is_zero() {
        return Err(Error::InvalidState("empty urn".into()));
    }
    let outcomes = match model {
        UrnModel::OneDraw(m) => vec![
            StepOutcome {
                outcome: Outcome::W,
                probability: w / &t,
                dw: m.a.clone(),
                dt: &m.a + &m.b,
            },
            StepOutcome {
                outcome: Outcome::B,
                probability: b / &t,
                dw: m.c.clone(),
                dt: &m.c + &m.d,
            },
        ],
        UrnModel::TwoDraw {
            matrix: m,
            sampling,
        } => {
            let (pww, pwb, pbb) = match sampling {
                Sampling::With => {
                    let z = w / &t;
                    let y = b / &t;
                    (&z * &z, int(2) * &z * &y, &y * &y)
                }
                Sampling::Without => {
                    let one = Rational::one();
                    if t < int(2) {
                        return Err(Error::InvalidState(
                            "two draws without replacement need at least two balls".into(),
                        ));
                    }
                    let denom = &t * (&t - &one);
                    let pww = w * (w - &one) / &denom;
                    let pbb = b * (b - &one) / &denom;
                    if pww.is_negative() || pbb.is_negative() {
                        return Err(Error::InvalidState(
                            "a colour count strictly between 0 and 1 cannot be drawn twice".into(),
                        ));
                    }
                    (pww, int(2) * w * b / &denom, pbb)
                }
            };
            vec![
                StepOutcome {
                    outcome: Outcome::WW,
                    probability: pww,
                    dw: m.a.clone(),
                    dt: &m.a + &m.b,
                },
                StepOutcome {
                    outcome: Outcome::WB,
                    probability: pwb,
                    dw: m.c.clone(),
                    dt: &m.c + &m.d,
                },
                StepOutcome {
                    outcome: Outcome::BB,
                    probability: pbb,
                    dw: m.e.clone(),
                    dt: &m.e + &m.f,
                },
            ]
        }
    };
    Ok(StepDistribution { outcomes })
}

/// Exact conditional expectations given the current state.
#[derive(Debug, Clone, PartialEq)]
pub struct CondMoments {
    /// `E_n[Z_{n+1} - Z_n]`
    pub e_dz: Rational,
    /// `E_n[Y_{n+1}]` with `Y_{n+1} = T_{n+1} (Z_{n+1} - Z_n)`
    pub e_y: Rational,
    /// `E_n[U_{n+1}]` with `U = Y - drift(Z_n)`
    pub e_u: Rational,
    pub e_u2: Rational,
    pub e_u_over_t: Rational,
}

/// Enumerates the two or three outcomes of the next draw.
pub fn cond_moments_oracle(state: &UrnState, model: &UrnModel) -> Result<CondMoments> {
    let dist = step_distribution(state, model)?;
    let t = state.total();
    let z = &state.w / &t;
    let drift_z = drift_of(model).eval(&z);
    let mut m = CondMoments {
        e_dz: Rational::zero(),
        e_y: Rational::zero(),
        e_u: Rational::zero(),
        e_u2: Rational::zero(),
        e_u_over_t: Rational::zero(),
    };
    for o in &dist.outcomes {
        let t_next = &t + &o.dt;
        let z_next = (&state.w + &o.dw) / &t_next;
        let dz = &z_next - &z;
        let y = &dz * &t_next;
        let u = &y - &drift_z;
        let p = &o.probability;
        m.e_dz += p * &dz;
        m.e_y += p * &y;
        m.e_u2 += p * &u * &u;
        m.e_u_over_t += p * &u / &t_next;
        m.e_u += p * u;
    }
    Ok(m)
}
