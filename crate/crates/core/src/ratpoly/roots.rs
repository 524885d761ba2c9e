//! Certified real-root isolation on `[0, 1]`.
//!
//! Distinct roots are isolated with a Sturm sequence of the square-free part,
//! multiplicities come from Yun's square-free decomposition, and rational
//! roots are recovered exactly: once an isolating interval is narrower than
//! `1/lc^2` (with `lc` the leading coefficient of the primitive integer form)
//! it holds at most one fraction whose denominator divides `lc`, and that
//! fraction is the simplest rational in the interval.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::RatPoly;
use crate::error::{Error, Result};
use crate::rational::{format_rational, rat, serde_rational, sign, to_f64, Rational};

/// Default width to which irrational roots are refined.
pub const DEFAULT_ISOLATION_WIDTH: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RootLocation {
    Interior,
    LeftBoundary,
    RightBoundary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum RootValue {
    Exact {
        #[serde(with = "serde_rational")]
        value: Rational,
    },
    /// Irrational root: the only root of the square-free `defining`
    /// polynomial inside the open interval `(lo, hi)`.
    Isolated {
        #[serde(with = "serde_rational")]
        lo: Rational,
        #[serde(with = "serde_rational")]
        hi: Rational,
        approx: f64,
        defining: RatPoly,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootRecord {
    pub value: RootValue,
    pub multiplicity: u32,
    pub location: RootLocation,
}

impl RootRecord {
    pub fn exact(value: Rational, multiplicity: u32) -> Self {
        let location = if value.is_zero() {
            RootLocation::LeftBoundary
        } else if value.is_one() {
            RootLocation::RightBoundary
        } else {
            RootLocation::Interior
        };
        RootRecord {
            value: RootValue::Exact { value },
            multiplicity,
            location,
        }
    }

    pub fn approx(&self) -> f64 {
        match &self.value {
            RootValue::Exact { value } => to_f64(value),
            RootValue::Isolated { approx, .. } => *approx,
        }
    }

    pub fn exact_value(&self) -> Option<&Rational> {
        match &self.value {
            RootValue::Exact { value } => Some(value),
            RootValue::Isolated { .. } => None,
        }
    }

    pub fn is_boundary(&self) -> bool {
        self.location != RootLocation::Interior
    }

    /// Exact string for rational roots, decimal approximation otherwise.
    pub fn label(&self) -> String {
        match &self.value {
            RootValue::Exact { value } => format_rational(value),
            RootValue::Isolated { approx, .. } => format!("~{approx:.12}"),
        }
    }

    /// Whether the root lies in the closed interval `[lo, hi]`.
    pub fn in_closed(&self, lo: &Rational, hi: &Rational) -> bool {
        match &self.value {
            RootValue::Exact { value } => value >= lo && value <= hi,
            RootValue::Isolated {
                lo: a,
                hi: b,
                defining,
                ..
            } => {
                compare_isolated(defining, a, b, lo) != Ordering::Less
                    && compare_isolated(defining, a, b, hi) != Ordering::Greater
            }
        }
    }

    /// Whether the root lies in the open interval `(lo, hi)`.
    pub fn in_open(&self, lo: &Rational, hi: &Rational) -> bool {
        match &self.value {
            RootValue::Exact { value } => value > lo && value < hi,
            RootValue::Isolated {
                lo: a,
                hi: b,
                defining,
                ..
            } => {
                compare_isolated(defining, a, b, lo) == Ordering::Greater
                    && compare_isolated(defining, a, b, hi) == Ordering::Less
            }
        }
    }
}

/// Compares the irrational root isolated by `defining` in `(lo, hi)` with `q`.
fn compare_isolated(defining: &RatPoly, lo: &Rational, hi: &Rational, q: &Rational) -> Ordering {
    if q <= lo {
        return Ordering::Greater;
    }
    if q >= hi {
        return Ordering::Less;
    }
    // (lo, hi) holds a single irrational root of `defining`, so defining(q) != 0.
    if sign(&defining.eval(q)) == sign(&defining.eval(lo)) {
        Ordering::Greater
    } else {
        Ordering::Less
    }
}

pub fn sturm_sequence(p: &RatPoly) -> Vec<RatPoly> {
    let mut seq = vec![p.clone()];
    if p.is_zero() {
        return seq;
    }
    let d = p.derivative();
    if d.is_zero() {
        return seq;
    }
    seq.push(d);
    loop {
        let n = seq.len();
        let (_, r) = seq[n - 2].div_rem(&seq[n - 1]);
        if r.is_zero() {
            break;
        }
        seq.push(-r);
    }
    seq
}

/// Sign changes of the sequence at `x`, zeros skipped.
pub fn sign_variations(seq: &[RatPoly], x: &Rational) -> usize {
    let mut last = 0i8;
    let mut changes = 0;
    for p in seq {
        let s = sign(&p.eval(x));
        if s != 0 {
            if last != 0 && s != last {
                changes += 1;
            }
            last = s;
        }
    }
    changes
}

/// Yun's algorithm: returns monic square-free, pairwise coprime factors with
/// their multiplicities, such that `p = lc * prod(f_i ^ m_i)`.
pub fn square_free_decomposition(p: &RatPoly) -> Vec<(RatPoly, u32)> {
    if p.degree().unwrap_or(0) == 0 {
        return vec![];
    }
    let f = p.monic();
    let df = f.derivative();
    let a0 = f.gcd(&df);
    let mut b = f.div_rem(&a0).0;
    let c = df.div_rem(&a0).0;
    let mut d = &c - &b.derivative();
    let mut out = Vec::new();
    let mut i = 1u32;
    while b.degree().unwrap_or(0) > 0 {
        let a = b.gcd(&d);
        if a.degree().unwrap_or(0) > 0 {
            out.push((a.clone(), i));
        }
        let nb = b.div_rem(&a).0;
        let nc = d.div_rem(&a).0;
        d = &nc - &nb.derivative();
        b = nb;
        i += 1;
    }
    out
}

/// Simplest fraction (smallest denominator, then numerator) in `[lo, hi]`, `0 <= lo <= hi`.
pub fn simplest_rational_between(lo: &Rational, hi: &Rational) -> Rational {
    debug_assert!(lo <= hi);
    let fl = lo.floor();
    if &fl == lo {
        return fl;
    }
    let next = &fl + Rational::one();
    if &next <= hi {
        return next;
    }
    let inner = simplest_rational_between(&(hi - &fl).recip(), &(lo - &fl).recip());
    fl + inner.recip()
}

struct Isolator<'a> {
    p: &'a RatPoly,
    seq: Vec<RatPoly>,
}

impl<'a> Isolator<'a> {
    fn new(p: &'a RatPoly) -> Self {
        Isolator {
            p,
            seq: sturm_sequence(p),
        }
    }

    /// Number of distinct roots in the open interval `(a, b)`.
    fn count_open(&self, a: &Rational, b: &Rational) -> usize {
        let raw = sign_variations(&self.seq, a) - sign_variations(&self.seq, b);
        if self.p.eval(b).is_zero() {
            raw - 1
        } else {
            raw
        }
    }
}

enum Refined {
    Exact(Rational),
    Bracket(Rational, Rational),
}

/// Narrows an interval holding exactly one root of the square-free `p` until
/// both endpoints are non-roots (or the root is hit exactly).
fn clear_endpoints(iso: &Isolator, mut a: Rational, mut b: Rational) -> Refined {
    loop {
        let fa = iso.p.eval(&a);
        let fb = iso.p.eval(&b);
        if !fa.is_zero() && !fb.is_zero() {
            return Refined::Bracket(a, b);
        }
        let m = (&a + &b) / Rational::from_integer(BigInt::from(2));
        if iso.p.eval(&m).is_zero() {
            return Refined::Exact(m);
        }
        if iso.count_open(&a, &m) == 1 {
            b = m;
        } else {
            a = m;
        }
    }
}

/// Sign bisection while the width is at least `width`; `p(a) p(b) < 0`.
fn bisect_to(p: &RatPoly, mut a: Rational, mut b: Rational, width: &Rational) -> Refined {
    let two = Rational::from_integer(BigInt::from(2));
    let sa = sign(&p.eval(&a));
    while &(&b - &a) >= width {
        let m = (&a + &b) / &two;
        let sm = sign(&p.eval(&m));
        if sm == 0 {
            return Refined::Exact(m);
        }
        if sm == sa {
            a = m;
        } else {
            b = m;
        }
    }
    Refined::Bracket(a, b)
}

pub fn roots_in_unit_interval(p: &RatPoly) -> Result<Vec<RootRecord>> {
    roots_in_unit_interval_with_width(p, DEFAULT_ISOLATION_WIDTH)
}

/// All roots of `p` in `[0, 1]`, sorted, each once with its multiplicity.
/// Irrational roots are refined to an interval no wider than `width`.
pub fn roots_in_unit_interval_with_width(p: &RatPoly, width: f64) -> Result<Vec<RootRecord>> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if p.degree() == Some(0) {
        return Ok(vec![]);
    }
    let width = Rational::from_float(width)
        .filter(|w| w.is_positive())
        .ok_or_else(|| Error::Precondition(format!("isolation width {width} must be positive")))?;

    let factors = square_free_decomposition(p);
    let sqf = factors.iter().fold(RatPoly::one(), |acc, (f, _)| &acc * f);
    let iso = Isolator::new(&sqf);

    let zero = Rational::zero();
    let one = Rational::one();
    let mut exact: Vec<Rational> = Vec::new();
    let mut brackets: Vec<(Rational, Rational)> = Vec::new();
    for end in [&zero, &one] {
        if sqf.eval(end).is_zero() {
            exact.push(end.clone());
        }
    }
    let mut stack = vec![(zero.clone(), one.clone())];
    while let Some((a, b)) = stack.pop() {
        match iso.count_open(&a, &b) {
            0 => {}
            1 => brackets.push((a, b)),
            _ => {
                let m = (&a + &b) / rat(2, 1);
                if sqf.eval(&m).is_zero() {
                    exact.push(m.clone());
                }
                stack.push((a, m.clone()));
                stack.push((m, b));
            }
        }
    }

    let ints = sqf.primitive_integer_coeffs();
    let lc = ints.last().cloned().unwrap_or_else(BigInt::one).abs();
    let rational_width = Rational::new(BigInt::one(), &lc * &lc);

    let mut records = Vec::new();
    for (a, b) in brackets {
        let (a, b) = match clear_endpoints(&iso, a, b) {
            Refined::Exact(r) => {
                exact.push(r);
                continue;
            }
            Refined::Bracket(a, b) => (a, b),
        };
        let (a, b) = match bisect_to(&sqf, a, b, &rational_width) {
            Refined::Exact(r) => {
                exact.push(r);
                continue;
            }
            Refined::Bracket(a, b) => (a, b),
        };
        let candidate = simplest_rational_between(&a, &b);
        if sqf.eval(&candidate).is_zero() {
            exact.push(candidate);
            continue;
        }
        let (a, b) = match bisect_to(&sqf, a, b, &width) {
            Refined::Exact(r) => {
                exact.push(r);
                continue;
            }
            Refined::Bracket(a, b) => (a, b),
        };
        let multiplicity = factors
            .iter()
            .find(|(f, _)| sign(&f.eval(&a)) * sign(&f.eval(&b)) < 0)
            .map(|(_, m)| *m)
            .expect("isolated root belongs to one square-free factor");
        let approx = to_f64(&((&a + &b) / rat(2, 1)));
        records.push(RootRecord {
            value: RootValue::Isolated {
                lo: a,
                hi: b,
                approx,
                defining: sqf.clone(),
            },
            multiplicity,
            location: RootLocation::Interior,
        });
    }
    for r in exact {
        let multiplicity = factors
            .iter()
            .find(|(f, _)| f.eval(&r).is_zero())
            .map(|(_, m)| *m)
            .expect("exact root belongs to one square-free factor");
        records.push(RootRecord::exact(r, multiplicity));
    }
    records.sort_by(|x, y| x.approx().total_cmp(&y.approx()));
    Ok(records)
}

/// Exact sign of `q` at the root.
pub fn sign_at(q: &RatPoly, root: &RootRecord) -> i8 {
    match &root.value {
        RootValue::Exact { value } => sign(&q.eval(value)),
        RootValue::Isolated {
            lo, hi, defining, ..
        } => {
            if q.is_zero() {
                return 0;
            }
            let g = q.gcd(defining);
            if sign(&g.eval(lo)) * sign(&g.eval(hi)) < 0 {
                return 0;
            }
            // q does not vanish at the root: shrink until q has no root in [a, b].
            let q_sqf = {
                let d = q.gcd(&q.derivative());
                q.div_rem(&d).0
            };
            let seq = sturm_sequence(&q_sqf);
            let (mut a, mut b) = (lo.clone(), hi.clone());
            let sa = sign(&defining.eval(&a));
            loop {
                let qa = q.eval(&a);
                let clear = !qa.is_zero()
                    && !q.eval(&b).is_zero()
                    && sign_variations(&seq, &a) == sign_variations(&seq, &b);
                if clear {
                    return sign(&qa);
                }
                let m = (&a + &b) / rat(2, 1);
                if sign(&defining.eval(&m)) == sa {
                    a = m;
                } else {
                    b = m;
                }
            }
        }
    }
}

/// Order of vanishing of `p` at the root (0 when `p` does not vanish there).
pub fn vanishing_order(p: &RatPoly, root: &RootRecord) -> u32 {
    let mut d = p.clone();
    let mut k = 0;
    while !d.is_zero() && sign_at(&d, root) == 0 {
        d = d.derivative();
        k += 1;
    }
    k
}

/// Signs of `p` just left and just right of the root, from the first
/// non-vanishing derivative.
pub fn one_sided_signs(p: &RatPoly, root: &RootRecord) -> (i8, i8) {
    if p.is_zero() {
        return (0, 0);
    }
    let mut d = p.clone();
    let mut k = 0u32;
    loop {
        let s = sign_at(&d, root);
        if s != 0 {
            let left = if k.is_multiple_of(2) { s } else { -s };
            return (left, s);
        }
        d = d.derivative();
        k += 1;
    }
}
