//! Exact identity suites over seeded random rational urns, used by
//! `selftest` and the acceptance tests.

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::two_draw::{error_forms_unchecked, table1_unchecked};
use super::{
    case4_identity_holds, case6_identity_holds, cond_iv_closed_form_one, cond_moments_oracle,
    degenerate_reduce, drift_one, drift_two, psi_explicit_quartic, r_n_closed_form, table1_direct,
    DegenerateReduction, ReplacementMatrixOne, ReplacementMatrixTwo, Sampling, Table1, UrnModel,
    UrnState,
};
use crate::rational::{format_rational, Rational};

pub type TableFn = fn(&ReplacementMatrixTwo) -> Table1;

/// The coefficient table as tabulated, without its built-in assertion.
pub fn tabulated(m: &ReplacementMatrixTwo) -> Table1 {
    table1_unchecked(m)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteResult {
    pub name: &'static str,
    pub checks: usize,
    pub failures: usize,
    pub first_failure: Option<String>,
}

impl SuiteResult {
    fn new(name: &'static str) -> Self {
        SuiteResult {
            name,
            checks: 0,
            failures: 0,
            first_failure: None,
        }
    }

    fn check(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(describe());
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0 && self.checks > 0
    }
}

/// Random rationals and urns from a seeded stream.
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// `p/q` with `0 <= p <= 12`, `1 <= q <= 6`; zero a quarter of the time.
    pub fn entry(&mut self) -> Rational {
        if self.rng.gen_ratio(1, 4) {
            return Rational::zero();
        }
        let p: i64 = self.rng.gen_range(1..=12);
        let q: i64 = self.rng.gen_range(1..=6);
        Rational::new(p.into(), q.into())
    }

    pub fn positive(&mut self) -> Rational {
        let p: i64 = self.rng.gen_range(1..=12);
        let q: i64 = self.rng.gen_range(1..=6);
        Rational::new(p.into(), q.into())
    }

    /// Uniform-ish rational in `[0, 1)`.
    pub fn unit(&mut self) -> Rational {
        let q: i64 = self.rng.gen_range(2..=97);
        let p: i64 = self.rng.gen_range(0..q);
        Rational::new(p.into(), q.into())
    }

    pub fn matrix_one(&mut self) -> ReplacementMatrixOne {
        loop {
            let v = [self.entry(), self.entry(), self.entry(), self.entry()];
            let [a, b, c, d] = v;
            if let Ok(m) = ReplacementMatrixOne::new(a, b, c, d) {
                return m;
            }
        }
    }

    pub fn matrix_two(&mut self) -> ReplacementMatrixTwo {
        loop {
            let [a, b, c, d, e, f] = std::array::from_fn(|_| self.entry());
            if let Ok(m) = ReplacementMatrixTwo::new(a, b, c, d, e, f) {
                return m;
            }
        }
    }

    /// `a = b = 0`, the other two rows with positive sums.
    pub fn matrix_case4(&mut self) -> ReplacementMatrixTwo {
        let z = Rational::zero;
        let (c, d) = self.positive_row();
        let (e, f) = self.positive_row();
        ReplacementMatrixTwo::new(z(), z(), c, d, e, f).expect("valid")
    }

    /// `c = d = 0`, the other two rows with positive sums.
    pub fn matrix_case6(&mut self) -> ReplacementMatrixTwo {
        let z = Rational::zero;
        let (a, b) = self.positive_row();
        let (e, f) = self.positive_row();
        ReplacementMatrixTwo::new(a, b, z(), z(), e, f).expect("valid")
    }

    fn positive_row(&mut self) -> (Rational, Rational) {
        loop {
            let (x, y) = (self.entry(), self.entry());
            if !(&x + &y).is_zero() {
                return (x, y);
            }
        }
    }

    /// Counts with `W, B` in `{0} ∪ [1, ∞)` and `T >= 2`.
    pub fn state(&mut self) -> UrnState {
        loop {
            let w = self.count();
            let b = self.count();
            if &w + &b >= Rational::from_integer(2.into()) {
                return UrnState::new(w, b).expect("nonnegative");
            }
        }
    }

    fn count(&mut self) -> Rational {
        if self.rng.gen_ratio(1, 8) {
            return Rational::zero();
        }
        let whole: i64 = self.rng.gen_range(1..=60);
        let p: i64 = self.rng.gen_range(0..5);
        Rational::from_integer(whole.into()) + Rational::new(p.into(), 5.into())
    }
}

fn show_two(m: &ReplacementMatrixTwo) -> String {
    let parts: Vec<String> = m.entries().iter().map(|x| format_rational(x)).collect();
    format!("({})", parts.join(","))
}

fn show_one(m: &ReplacementMatrixOne) -> String {
    let parts: Vec<String> = m.entries().iter().map(|x| format_rational(x)).collect();
    format!("({})", parts.join(","))
}

fn show_state(s: &UrnState) -> String {
    format!("W={}, B={}", format_rational(&s.w), format_rational(&s.b))
}

pub fn suite_table1(seed: u64, count: usize, table: TableFn) -> SuiteResult {
    let mut s = Sampler::new(seed);
    let mut r = SuiteResult::new("table1-column-sums");
    for _ in 0..count {
        let m = s.matrix_two();
        let t = table(&m);
        r.check(t.column_sums_vanish(), || {
            format!("column sums nonzero for {}", show_two(&m))
        });
        r.check(t.columns.iter().all(|c| c[0].is_zero()), || {
            format!("k = 0 row nonzero for {}", show_two(&m))
        });
        r.check(t == table1_direct(&m), || {
            format!("tabulated != direct expansion for {}", show_two(&m))
        });
    }
    r
}

pub fn suite_psi_quartic(seed: u64, count: usize) -> SuiteResult {
    let mut s = Sampler::new(seed);
    let mut r = SuiteResult::new("psi-explicit-quartic");
    for _ in 0..count {
        let m = s.matrix_two();
        let err = error_forms_unchecked(&m);
        r.check(err.psi == psi_explicit_quartic(&m), || {
            format!("Ψ mismatch for {}", show_two(&m))
        });
    }
    r
}

pub fn suite_relation_abc(seed: u64, count: usize) -> SuiteResult {
    let mut s = Sampler::new(seed);
    let mut r = SuiteResult::new("relation-a-eq-b-minus-2c");
    let two = Rational::from_integer(2.into());
    for _ in 0..count {
        let m = s.matrix_two();
        let err = error_forms_unchecked(&m);
        r.check(err.a_x == &err.b_x - &err.c_x.scale(&two), || {
            format!("A != B - 2C for {}", show_two(&m))
        });
    }
    r
}

pub fn suite_boundary_signs(seed: u64, count: usize) -> SuiteResult {
    let mut s = Sampler::new(seed);
    let mut r = SuiteResult::new("boundary-signs");
    let (zero, one) = (Rational::zero(), Rational::one());
    for _ in 0..count {
        let m = s.matrix_two();
        let g = drift_two(&m);
        r.check(g.eval(&zero) == m.e && g.eval(&one) == -&m.b, || {
            format!("g(0) or g(1) wrong for {}", show_two(&m))
        });
        r.check(
            !g.eval(&zero).is_negative() && !g.eval(&one).is_positive(),
            || show_two(&m),
        );
        let m1 = s.matrix_one();
        let f = drift_one(&m1);
        r.check(f.eval(&zero) == m1.c && f.eval(&one) == -&m1.b, || {
            format!("f(0) or f(1) wrong for {}", show_one(&m1))
        });
    }
    r
}

pub fn suite_ghatg(seed: u64, count: usize) -> SuiteResult {
    let mut s = Sampler::new(seed);
    let mut r = SuiteResult::new("ghatg-case4");
    for _ in 0..count {
        let m = s.matrix_case4();
        let ghat = match degenerate_reduce(&m) {
            Ok(DegenerateReduction::Subsequence { ghat, .. }) => ghat,
            other => {
                r.check(false, || {
                    format!("expected case 4 for {}, got {other:?}", show_two(&m))
                });
                continue;
            }
        };
        for _ in 0..20 {
            let x = s.unit();
            r.check(case4_identity_holds(&m, &ghat, &x), || {
                format!(
                    "identity fails for {} at x = {}",
                    show_two(&m),
                    format_rational(&x)
                )
            });
        }
    }
    r
}

pub fn suite_ghatg2(seed: u64, count: usize) -> SuiteResult {
    let mut s = Sampler::new(seed);
    let mut r = SuiteResult::new("ghatg2-case6");
    for _ in 0..count {
        let m = s.matrix_case6();
        for _ in 0..20 {
            let x = s.unit();
            r.check(case6_identity_holds(&m, &x), || {
                format!(
                    "identity fails for {} at x = {}",
                    show_two(&m),
                    format_rational(&x)
                )
            });
        }
    }
    r
}

pub fn suite_cond_iv_one(seed: u64, count: usize) -> SuiteResult {
    let mut s = Sampler::new(seed);
    let mut r = SuiteResult::new("cond-iv-one-draw");
    for _ in 0..count {
        let m = s.matrix_one();
        let st = s.state();
        let model = UrnModel::OneDraw(m.clone());
        let ok = match (
            cond_moments_oracle(&st, &model),
            cond_iv_closed_form_one(&st, &m),
        ) {
            (Ok(o), Ok(c)) => o.e_u_over_t == c && o.e_u.is_zero(),
            _ => false,
        };
        r.check(ok, || {
            format!(
                "closed form != oracle for {} at {}",
                show_one(&m),
                show_state(&st)
            )
        });
    }
    r
}

pub fn suite_r_n(seed: u64, count: usize) -> SuiteResult {
    let mut s = Sampler::new(seed);
    let mut r = SuiteResult::new("two-draw-r-n");
    for _ in 0..count {
        let m = s.matrix_two();
        let st = s.state();
        let model = UrnModel::TwoDraw {
            matrix: m.clone(),
            sampling: Sampling::Without,
        };
        let ok = match (cond_moments_oracle(&st, &model), r_n_closed_form(&st, &m)) {
            (Ok(o), Ok(rn)) => o.e_u == rn,
            _ => false,
        };
        r.check(ok, || {
            format!("E_U != R_n for {} at {}", show_two(&m), show_state(&st))
        });
    }
    r
}

pub fn suite_with_replacement(seed: u64, count: usize) -> SuiteResult {
    let mut s = Sampler::new(seed);
    let mut r = SuiteResult::new("two-draw-with-replacement-moments");
    for _ in 0..count {
        let m = s.matrix_two();
        let st = s.state();
        let z = st.fraction();
        let model = UrnModel::TwoDraw {
            matrix: m.clone(),
            sampling: Sampling::With,
        };
        let expected = &z * (Rational::one() - &z) * error_forms_unchecked(&m).psi.eval(&z);
        let ok = match cond_moments_oracle(&st, &model) {
            Ok(o) => o.e_u.is_zero() && o.e_u2 == expected,
            Err(_) => false,
        };
        r.check(ok, || {
            format!(
                "moments mismatch for {} at {}",
                show_two(&m),
                show_state(&st)
            )
        });
    }
    r
}

/// Every suite, each drawing from its own stream derived from `seed`.
pub fn run_all(seed: u64, count: usize) -> Vec<SuiteResult> {
    run_all_with(seed, count, tabulated)
}

pub fn run_all_with(seed: u64, count: usize, table: TableFn) -> Vec<SuiteResult> {
    let sub = |k: u64| seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(k);
    vec![
        suite_table1(sub(1), count, table),
        suite_psi_quartic(sub(2), count),
        suite_relation_abc(sub(3), count),
        suite_boundary_signs(sub(4), count),
        suite_ghatg(sub(5), count),
        suite_ghatg2(sub(6), count),
        suite_cond_iv_one(sub(7), count),
        suite_r_n(sub(8), count),
        suite_with_replacement(sub(9), count),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_suites_pass_small() {
        for s in run_all(3, 25) {
            assert!(s.passed(), "{} failed: {:?}", s.name, s.first_failure);
        }
    }

    fn broken(m: &ReplacementMatrixTwo) -> Table1 {
        let mut t = tabulated(m);
        t.columns[1][3] += Rational::one();
        t
    }

    #[test]
    fn mutated_table_fails() {
        let results = run_all_with(3, 10, broken);
        assert!(!results[0].passed());
        assert!(results[1..].iter().all(SuiteResult::passed));
    }

    #[test]
    fn sampler_is_seeded() {
        let a: Vec<_> = (0..5)
            .map({
                let mut s = Sampler::new(9);
                move |_| s.matrix_two()
            })
            .collect();
        let b: Vec<_> = (0..5)
            .map({
                let mut s = Sampler::new(9);
                move |_| s.matrix_two()
            })
            .collect();
        assert_eq!(a, b);
    }
}
