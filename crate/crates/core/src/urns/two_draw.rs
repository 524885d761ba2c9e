use num_traits::{One, Signed, Zero};

use super::{ReplacementMatrixTwo, Sampling, UrnState};
use crate::error::{Error, Result};
use crate::rational::{int, rat, Rational};
use crate::ratpoly::RatPoly;
use crate::sa::Interval;

/// `(α, β, γ)` with `α = -a-b+2c+2d-e-f`, `β = a-4c-2d+3e+2f`, `γ = 2c-3e-f`.
pub fn drift_coefficients_two(m: &ReplacementMatrixTwo) -> (Rational, Rational, Rational) {
    let two = int(2);
    let alpha = -&m.a - &m.b + &m.c * &two + &m.d * &two - &m.e - &m.f;
    let beta = &m.a - &m.c * int(4) - &m.d * &two + &m.e * int(3) + &m.f * &two;
    let gamma = &m.c * &two - &m.e * int(3) - &m.f;
    (alpha, beta, gamma)
}

/// `g(x) = α x^3 + β x^2 + γ x + e`.
pub fn drift_two(m: &ReplacementMatrixTwo) -> RatPoly {
    let (alpha, beta, gamma) = drift_coefficients_two(m);
    RatPoly::new(vec![m.e.clone(), gamma, beta, alpha])
}

/// Linear forms of the error decomposition and the quartic they assemble.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorTwo {
    pub a_x: RatPoly,
    pub b_x: RatPoly,
    pub c_x: RatPoly,
    /// `Ψ(x) = 2x^2 (A+C)^2 + x(1-x) B^2 + 2 (1-x)^2 C^2`.
    pub psi: RatPoly,
}

impl ErrorTwo {
    /// Leading error function `x (1 - x) Ψ(x)`.
    pub fn error_fn(&self) -> RatPoly {
        &RatPoly::from_ints(&[0, 1, -1]) * &self.psi
    }
}

pub fn error_two(m: &ReplacementMatrixTwo) -> ErrorTwo {
    let err = error_forms_unchecked(m);
    assert_eq!(err.a_x, &err.b_x - &err.c_x.scale(&int(2)), "A = B - 2C");
    assert_eq!(
        err.psi,
        psi_explicit_quartic(m),
        "decomposition matches the expanded quartic"
    );
    err
}

/// The linear forms and the quartic assembled from them, without the
/// consistency assertions.
pub(crate) fn error_forms_unchecked(m: &ReplacementMatrixTwo) -> ErrorTwo {
    let (alpha, _, _) = drift_coefficients_two(m);
    let a_x = RatPoly::linear(alpha, &m.a - &m.c * int(2) + &m.e);
    let b_x = RatPoly::linear(&m.e + &m.f - &m.a - &m.b, &m.a - &m.e);
    let c_x = RatPoly::linear(&m.e + &m.f - &m.c - &m.d, &m.c - &m.e);

    let x = RatPoly::x();
    let one_minus_x = RatPoly::from_ints(&[1, -1]);
    let two = RatPoly::from_ints(&[2]);
    let ac = &a_x + &c_x;
    let psi = &(&(&two * &(&x * &x)) * &(&ac * &ac))
        + &(&(&(&x * &one_minus_x) * &(&b_x * &b_x))
            + &(&(&two * &(&one_minus_x * &one_minus_x)) * &(&c_x * &c_x)));
    ErrorTwo { a_x, b_x, c_x, psi }
}

/// The error quartic with its coefficients written out term by term.
pub fn psi_explicit_quartic(m: &ReplacementMatrixTwo) -> RatPoly {
    let (a, b, c, d, e, f) = (&m.a, &m.b, &m.c, &m.d, &m.e, &m.f);
    let two = int(2);
    let s = a + b - c * &two - d * &two + e + f;
    let k = a - c * &two + e;
    let ef_ab = e + f - a - b;
    let ef_cd = e + f - c - d;
    let ae = a - e;
    let ce = c - e;
    let x4 = &s * &s;
    let x3 = -(&two * &s * &k) + &ef_ab * &ef_ab - int(4) * &ef_cd * &ef_cd;
    let x2 = &k * &k + &two * &ae * &ef_ab - int(8) * &ce * &ef_cd + &two * &ef_cd * &ef_cd;
    let x1 = &ae * &ae - int(4) * &ce * &ce + int(4) * &ce * &ef_cd;
    let x0 = &two * &ce * &ce;
    RatPoly::new(vec![x0, x1, x2, x3, x4])
}

/// Coefficients `C_k^(j)`, `k = 0..=5`, of the polynomial parts `p_j` in
/// `E_n[U/T_{n+1}] = sum_j p_j(Z) / (T + s_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Table1 {
    pub columns: [[Rational; 6]; 3],
}

impl Table1 {
    pub fn column_sums(&self) -> [Rational; 6] {
        std::array::from_fn(|k| self.columns.iter().map(|col| col[k].clone()).sum())
    }

    pub fn column_sums_vanish(&self) -> bool {
        self.column_sums().iter().all(Zero::is_zero)
    }
}

/// Table entries as tabulated in terms of `α, β, γ`.
pub fn table1_polys(m: &ReplacementMatrixTwo) -> Table1 {
    let table = table1_unchecked(m);
    assert!(table.column_sums_vanish(), "coefficient table columns sum to zero");
    table
}

pub(crate) fn table1_unchecked(m: &ReplacementMatrixTwo) -> Table1 {
    let (al, be, ga) = drift_coefficients_two(m);
    let (a, b, c, d, e, f) = (&m.a, &m.b, &m.c, &m.d, &m.e, &m.f);
    let two = int(2);
    let z = Rational::zero;
    let c1 = [z(), z(), a - e, -&ga - a - b, -be.clone(), -al.clone()];
    let c2 = [
        z(),
        c * &two - e * &two,
        -(&two * &ga) - c * int(4) - d * &two + e * &two,
        &two * &ga + c * &two + d * &two - &two * &be,
        &two * &be - &two * &al,
        &two * &al,
    ];
    let c3 = [
        z(),
        -&ga - e - f,
        &two * &ga + e * &two + f * &two - &be,
        &two * &be - &al - &ga - e - f,
        &two * &al - &be,
        -al.clone(),
    ];
    Table1 {
        columns: [c1, c2, c3],
    }
}

fn row_increments(m: &ReplacementMatrixTwo) -> [RatPoly; 3] {
    // w_j - s_j x for rows WW, WB, BB
    let [s1, s2, s3] = m.row_sums();
    [
        RatPoly::linear(-s1, m.a.clone()),
        RatPoly::linear(-s2, m.c.clone()),
        RatPoly::linear(-s3, m.e.clone()),
    ]
}

/// The coefficient table recomputed by expanding `(w_j - s_j x - g(x)) P_j(x)` with the
/// with-replacement probabilities `x^2, 2x(1-x), (1-x)^2`.
pub fn table1_direct(m: &ReplacementMatrixTwo) -> Table1 {
    let g = drift_two(m);
    let probs = [
        RatPoly::from_ints(&[0, 0, 1]),
        RatPoly::from_ints(&[0, 2, -2]),
        RatPoly::from_ints(&[1, -2, 1]),
    ];
    let rows = row_increments(m);
    let columns = std::array::from_fn(|j| {
        let p = &(&rows[j] - &g) * &probs[j];
        std::array::from_fn(|k| p.coeff(k))
    });
    Table1 { columns }
}

/// `R_n = -Z(1-Z)/(T-1) (a - 2c + e + α Z)`, the without-replacement
/// correction in `E_n Y_{n+1} = g(Z_n) + R_n`.
pub fn r_n_closed_form(state: &UrnState, m: &ReplacementMatrixTwo) -> Result<Rational> {
    let t = state.total();
    if t <= Rational::one() {
        return Err(Error::InvalidState(
            "T must exceed 1 without replacement".into(),
        ));
    }
    let z = &state.w / &t;
    let (alpha, _, _) = drift_coefficients_two(m);
    let one_minus = Rational::one() - &z;
    Ok(-(&z * &one_minus) / (&t - Rational::one()) * (&m.a - &m.c * int(2) + &m.e + alpha * &z))
}

fn l1(p: &RatPoly) -> Rational {
    p.coeffs().iter().map(|c| c.abs()).sum()
}

/// Constant for `|E_n(U_{n+1}/T_{n+1})| <= K_e / T_n^2`.
///
/// Since each coefficient-table column sums to zero,
/// `sum_j C_j/(T+s_j) = -sum_j C_j s_j / (T (T+s_j))`, bounded by
/// `sum_j |C_j| s_j / T^2`. Without replacement each `R_j` adds
/// `|κ_j| ||w_j - s_j x - g||_1 / 4` over `(T-1)(T+s_j) >= T^2/2`
/// with `κ = (1, 2, 1)`.
pub fn k_e_two(m: &ReplacementMatrixTwo, sampling: Sampling) -> Rational {
    let sums = m.row_sums();
    let table = table1_polys(m);
    let mut bound = Rational::zero();
    for (col, s) in table.columns.iter().zip(&sums) {
        for c in col {
            bound += c.abs() * s;
        }
    }
    if sampling == Sampling::Without {
        let g = drift_two(m);
        let kappa = [int(1), int(2), int(1)];
        for (row, k) in row_increments(m).iter().zip(kappa) {
            bound += k * l1(&(row - &g)) * rat(1, 2);
        }
    }
    bound
}

/// `[L, U]` spanned by the row ratios `a/(a+b)`, `c/(c+d)`, `e/(e+f)`.
pub fn attainable_interval(m: &ReplacementMatrixTwo) -> Result<Interval> {
    if m.row_sums().iter().any(Zero::is_zero) {
        return Err(Error::Precondition(
            "attainable interval needs every row sum positive; use the degenerate reduction".into(),
        ));
    }
    Ok(ratio_span(m).expect("all rows positive"))
}

/// Span of the ratios over rows with a positive sum.
pub(crate) fn ratio_span(m: &ReplacementMatrixTwo) -> Option<Interval> {
    let ratios: Vec<Rational> = [(&m.a, &m.b), (&m.c, &m.d), (&m.e, &m.f)]
        .into_iter()
        .filter(|(w, b)| !(*w + *b).is_zero())
        .map(|(w, b)| w / (w + b))
        .collect();
    let lo = ratios.iter().min()?.clone();
    let hi = ratios.iter().max()?.clone();
    Some(Interval::new(lo, hi))
}
