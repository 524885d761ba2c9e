//! Two-draw urns with a zero row sum.

use num_traits::{One, Zero};
use serde::Serialize;

use super::{drift_two, ReplacementMatrixTwo, UrnState};
use crate::error::{Error, Result};
use crate::rational::{int, serde_rational, Rational};
use crate::ratpoly::RatPoly;

/// Which degenerate family a two-draw matrix belongs to, 0 if none.
///
/// 1: only WW reinforces. 2: only BB. 3: only WB. 4: WW adds nothing.
/// 5: BB adds nothing. 6: WB adds nothing.
pub fn degenerate_case(m: &ReplacementMatrixTwo) -> u8 {
    let [r1, r2, r3] = m.row_sums().map(|s| s.is_zero());
    match (r1, r2, r3) {
        (false, true, true) => 1,
        (true, true, false) => 2,
        (true, false, true) => 3,
        (true, false, false) => 4,
        (false, false, true) => 5,
        (false, true, false) => 6,
        _ => 0,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "reduction", rename_all = "kebab-case")]
pub enum DegenerateReduction {
    /// Cases 1-3: every effective draw pushes towards one ratio.
    Limit {
        case: u8,
        #[serde(with = "serde_rational")]
        limit: Rational,
    },
    /// Cases 4 and 5. For case 5, `ghat` belongs to the colour-swapped urn.
    Subsequence { case: u8, ghat: RatPoly },
    /// Case 6: `ghat = numerator / (x^2 + (1-x)^2)`, and the numerator is `g`.
    Rescaled {
        numerator: RatPoly,
        denominator: RatPoly,
    },
}

impl DegenerateReduction {
    pub fn case(&self) -> u8 {
        match self {
            DegenerateReduction::Limit { case, .. }
            | DegenerateReduction::Subsequence { case, .. } => *case,
            DegenerateReduction::Rescaled { .. } => 6,
        }
    }
}

/// `ĝ(x) = (-2c-d+2e+f) x^2 + (2c-4e-f) x + 2e` for `a = b = 0`.
fn ghat_case4(m: &ReplacementMatrixTwo) -> RatPoly {
    let (c, d, e, f) = (&m.c, &m.d, &m.e, &m.f);
    let two = int(2);
    RatPoly::new(vec![
        e * &two,
        c * &two - e * int(4) - f,
        -(c * &two) - d + e * &two + f,
    ])
}

pub fn degenerate_reduce(m: &ReplacementMatrixTwo) -> Result<DegenerateReduction> {
    let case = degenerate_case(m);
    let ratio = |w: &Rational, b: &Rational| w / (w + b);
    let reduction = match case {
        0 => {
            return Err(Error::Precondition(
                "every row sum is positive; no degenerate reduction applies".into(),
            ))
        }
        1 => DegenerateReduction::Limit {
            case,
            limit: ratio(&m.a, &m.b),
        },
        2 => DegenerateReduction::Limit {
            case,
            limit: ratio(&m.e, &m.f),
        },
        3 => DegenerateReduction::Limit {
            case,
            limit: ratio(&m.c, &m.d),
        },
        4 => {
            let ghat = ghat_case4(m);
            debug_assert!(sample_points()
                .iter()
                .all(|x| case4_identity_holds(m, &ghat, x)));
            DegenerateReduction::Subsequence { case, ghat }
        }
        5 => {
            let swapped = m.color_swapped();
            let ghat = ghat_case4(&swapped);
            debug_assert!(sample_points()
                .iter()
                .all(|x| case4_identity_holds(&swapped, &ghat, x)));
            DegenerateReduction::Subsequence { case, ghat }
        }
        6 => {
            let denominator = RatPoly::from_ints(&[1, -2, 2]);
            let numerator = drift_two(m);
            debug_assert!(sample_points().iter().all(|x| case6_identity_holds(m, x)));
            DegenerateReduction::Rescaled {
                numerator,
                denominator,
            }
        }
        _ => unreachable!(),
    };
    Ok(reduction)
}

fn sample_points() -> Vec<Rational> {
    (1..=20)
        .map(|k| Rational::new(k.into(), 23.into()))
        .collect()
}

/// `½ (1+x)^2 ĝ(2x/(x+1)) = g(x)/(1-x)`, checked exactly at `x ≠ 1`.
pub fn case4_identity_holds(m: &ReplacementMatrixTwo, ghat: &RatPoly, x: &Rational) -> bool {
    let one = Rational::one();
    if *x == one || *x == -&one {
        return false;
    }
    let y = int(2) * x / (x + &one);
    let lhs = (&one + x) * (&one + x) / int(2) * ghat.eval(&y);
    let rhs = drift_two(m).eval(x) / (&one - x);
    lhs == rhs
}

/// `ĝ(x) = α̂ x^3/q + (a-e) x^2/q - (e+f) x + e` with `q = x^2 + (1-x)^2`
/// and `α̂ = e+f-a-b`, evaluated term by term.
pub fn case6_ghat_direct(m: &ReplacementMatrixTwo, x: &Rational) -> Rational {
    let one = Rational::one();
    let q = x * x + (&one - x) * (&one - x);
    let alpha_hat = &m.e + &m.f - &m.a - &m.b;
    alpha_hat * x * x * x / &q + (&m.a - &m.e) * x * x / &q - (&m.e + &m.f) * x + &m.e
}

/// `[x^2 + (1-x)^2] ĝ(x) = g(x)`.
pub fn case6_identity_holds(m: &ReplacementMatrixTwo, x: &Rational) -> bool {
    let one = Rational::one();
    let q = x * x + (&one - x) * (&one - x);
    q * case6_ghat_direct(m, x) == drift_two(m).eval(x)
}

/// `(T̂, Ẑ) = (B + 2W - 1, 2W / T̂)`, the coordinates of the case 4
/// subsequence. Analysis only; simulation always runs the original chain.
pub fn transform_case4(state: &UrnState) -> Result<(Rational, Rational)> {
    let t_hat = &state.b + int(2) * &state.w - Rational::one();
    if t_hat <= Rational::zero() {
        return Err(Error::InvalidState("B + 2W - 1 must be positive".into()));
    }
    let z_hat = int(2) * &state.w / &t_hat;
    Ok((t_hat, z_hat))
}
