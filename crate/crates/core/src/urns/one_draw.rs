use num_traits::{Signed, Zero};

use super::{ReplacementMatrixOne, UrnState};
use crate::error::{Error, Result};
use crate::rational::{int, Rational};
use crate::ratpoly::RatPoly;

/// `f(x) = (c+d-a-b) x^2 + (a-2c-d) x + c`.
pub fn drift_one(m: &ReplacementMatrixOne) -> RatPoly {
    let alpha = &m.c + &m.d - &m.a - &m.b;
    let beta = &m.a - &m.c * int(2) - &m.d;
    RatPoly::new(vec![m.c.clone(), beta, alpha])
}

/// `Ψ(x) = a - c + (c+d-a-b) x` and `E(x) = x (1-x) Ψ(x)^2`.
pub fn error_one(m: &ReplacementMatrixOne) -> (RatPoly, RatPoly) {
    let psi = RatPoly::linear(&m.c + &m.d - &m.a - &m.b, &m.a - &m.c);
    let x_one_minus_x = RatPoly::from_ints(&[0, 1, -1]);
    let e = &x_one_minus_x * &(&psi * &psi);
    (psi, e)
}

fn cubic_coeffs(m: &ReplacementMatrixOne) -> [Rational; 3] {
    [
        &m.a - &m.c,
        &m.c * int(2) + &m.d - &m.a * int(2) - &m.b,
        &m.a + &m.b - &m.c - &m.d,
    ]
}

/// Closed form of `E_n[U_{n+1} / T_{n+1}]`:
/// `(C1 Z + C2 Z^2 + C3 Z^3) (c+d-a-b) / ((T+a+b)(T+c+d))`.
pub fn cond_iv_closed_form_one(state: &UrnState, m: &ReplacementMatrixOne) -> Result<Rational> {
    let t = state.total();
    if !t.is_positive() {
        return Err(Error::InvalidState("T must be positive".into()));
    }
    let z = &state.w / &t;
    let [c1, c2, c3] = cubic_coeffs(m);
    let cubic = &c1 * &z + &c2 * &z * &z + &c3 * &z * &z * &z;
    let alpha = &m.c + &m.d - &m.a - &m.b;
    Ok(cubic * alpha / ((&t + &m.a + &m.b) * (&t + &m.c + &m.d)))
}

/// `K_e = |c+d-a-b| (|C1| + |C2| + |C3|)`, a valid constant in
/// `|E_n(γ_{n+1} U_{n+1})| <= K_e γ_n^2` since `|Z^k| <= 1`.
pub fn k_e_one(m: &ReplacementMatrixOne) -> Rational {
    let alpha = &m.c + &m.d - &m.a - &m.b;
    let sum: Rational = cubic_coeffs(m).iter().map(|c| c.abs()).sum();
    alpha.abs() * sum
}

/// Almost-sure limit when one row sum vanishes.
pub fn drift_one_degenerate(m: &ReplacementMatrixOne) -> Result<Rational> {
    let [r1, r2] = m.row_sums();
    if r2.is_zero() {
        Ok(&m.a / r1)
    } else if r1.is_zero() {
        Ok(&m.c / r2)
    } else {
        Err(Error::Precondition(
            "both row sums are positive; no degenerate reduction".into(),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn m(v: [i64; 4]) -> ReplacementMatrixOne {
        ReplacementMatrixOne::from_ints(v).unwrap()
    }

    #[test]
    fn drift_examples() {
        assert_eq!(drift_one(&m([1, 1, 1, 1])), RatPoly::from_ints(&[1, -2]));
        assert!(drift_one(&m([1, 0, 0, 1])).is_zero());
        assert_eq!(drift_one(&m([2, 1, 2, 1])), RatPoly::from_ints(&[2, -3]));
    }

    #[test]
    fn error_examples() {
        let (psi, e) = error_one(&m([1, 1, 1, 1]));
        assert!(psi.is_zero() && e.is_zero());
        let (psi, e) = error_one(&m([1, 0, 0, 1]));
        assert_eq!(psi, RatPoly::from_ints(&[1]));
        assert_eq!(e, RatPoly::from_ints(&[0, 1, -1]));
        // a - c = 2, c + d - a - b = -1
        let (psi, _) = error_one(&m([2, 0, 0, 1]));
        assert_eq!(psi, RatPoly::from_ints(&[2, -1]));
    }

    #[test]
    fn closed_form_vanishes_for_balanced_rows() {
        let s = UrnState::new(int(3), int(7)).unwrap();
        assert!(cond_iv_closed_form_one(&s, &m([1, 1, 1, 1]))
            .unwrap()
            .is_zero());
        let s = UrnState::new(int(1), int(1)).unwrap();
        assert!(cond_iv_closed_form_one(&s, &m([1, 0, 0, 1]))
            .unwrap()
            .is_zero());
    }

    #[test]
    fn degenerate_limits() {
        assert_eq!(drift_one_degenerate(&m([3, 1, 0, 0])).unwrap(), rat(3, 4));
        assert_eq!(drift_one_degenerate(&m([0, 0, 2, 2])).unwrap(), rat(1, 2));
        assert_eq!(drift_one_degenerate(&m([1, 0, 0, 0])).unwrap(), int(1));
        assert!(drift_one_degenerate(&m([1, 0, 0, 1])).is_err());
        // c + d = 0: drift is -(a+b) x^2 + a x
        assert_eq!(drift_one(&m([3, 1, 0, 0])), RatPoly::from_ints(&[0, 3, -4]));
    }
}
