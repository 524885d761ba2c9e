//! Clustering, histograms and the Kolmogorov–Smirnov test against Beta laws.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{to_f64, Rational};

pub const HISTOGRAM_BINS: usize = 50;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClusterCounts {
    /// One count per candidate, in candidate order.
    pub counts: Vec<usize>,
    pub unassigned: usize,
}

/// Assigns each sample to the unique candidate within `radius`.
pub fn cluster_finals(samples: &[f64], candidates: &[f64], radius: f64) -> Result<ClusterCounts> {
    for (i, a) in candidates.iter().enumerate() {
        for b in &candidates[i + 1..] {
            if (a - b).abs() <= 2.0 * radius {
                return Err(Error::OverlappingCandidates(*a, *b));
            }
        }
    }
    let mut counts = vec![0; candidates.len()];
    let mut unassigned = 0;
    for x in samples {
        match candidates.iter().position(|c| (x - c).abs() <= radius) {
            Some(i) => counts[i] += 1,
            None => unassigned += 1,
        }
    }
    Ok(ClusterCounts { counts, unassigned })
}

/// Number of samples within `radius` of any of `points`.
pub fn count_near(samples: &[f64], points: &[f64], radius: f64) -> usize {
    samples
        .iter()
        .filter(|x| points.iter().any(|p| (*x - p).abs() <= radius))
        .count()
}

/// Equal-width bins over `[0, 1]`; `1.0` lands in the last bin.
pub fn histogram(samples: &[f64], bins: usize) -> Vec<usize> {
    let mut h = vec![0; bins];
    for &x in samples {
        let k = ((x * bins as f64).floor() as isize).clamp(0, bins as isize - 1) as usize;
        h[k] += 1;
    }
    h
}

const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Γ(x)` for `x > 0` (Lanczos, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = LANCZOS[0];
    let t = x + 7.5;
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// Continued fraction for the incomplete beta function (modified Lentz).
fn beta_cf(x: f64, a: f64, b: f64) -> f64 {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-15;
    let (qab, qap, qam) = (a + b, a + 1.0, a - 1.0);
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=10_000 {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Regularized incomplete beta `I_x(a, b)`, the Beta(a, b) CDF at `x`.
pub fn incomplete_beta(x: f64, a: f64, b: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln();
    let front = ln_front.exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_cf(x, a, b) / a
    } else {
        1.0 - front * beta_cf(1.0 - x, b, a) / b
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KsResult {
    pub statistic: f64,
    pub n: usize,
}

impl KsResult {
    /// Asymptotic critical value `sqrt(-ln(level/2)/2) / sqrt(n)`.
    pub fn threshold(&self, level: f64) -> f64 {
        ks_critical(level) / (self.n as f64).sqrt()
    }
}

pub fn ks_critical(level: f64) -> f64 {
    (-(level / 2.0).ln() / 2.0).sqrt()
}

/// One-sample KS statistic of `samples` against Beta(`alpha`, `beta`).
pub fn ks_beta(samples: &[f64], alpha: &Rational, beta: &Rational) -> Result<KsResult> {
    if samples.is_empty() {
        return Err(Error::EmptySamples);
    }
    for (name, p) in [("alpha", alpha), ("beta", beta)] {
        if *p <= Rational::from_integer(0.into()) {
            return Err(Error::NonPositiveParameter(format!("{name} = {p}")));
        }
    }
    let (a, b) = (to_f64(alpha), to_f64(beta));
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let statistic = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = incomplete_beta(x, a, b);
            ((i as f64 + 1.0) / n - f).max(f - i as f64 / n)
        })
        .fold(0.0, f64::max);
    Ok(KsResult {
        statistic,
        n: xs.len(),
    })
}
