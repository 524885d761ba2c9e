use serde::Serialize;

use super::stats::{cluster_finals, count_near, histogram, ks_beta, ks_critical, HISTOGRAM_BINS};
use super::{final_fractions, run_replicates, SimConfig};
use crate::error::Result;
use crate::sa::{LimitPrediction, PredictionKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Consistency {
    Consistent,
    Inconsistent,
    Inconclusive,
}

/// Thresholds of the empirical checks. These are conventions of this
/// tool, reported alongside every verdict.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VerifyOptions {
    pub radius: f64,
    pub min_assigned_fraction: f64,
    pub max_excluded_fraction: f64,
    pub ks_level: f64,
    pub jobs: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            radius: 0.05,
            min_assigned_fraction: 0.90,
            max_excluded_fraction: 0.02,
            ks_level: 0.01,
            jobs: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointCount {
    pub point: String,
    pub approx: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub prediction: LimitPrediction,
    pub replicates: u64,
    pub n_steps: u64,
    pub base_seed: u64,
    pub options: VerifyOptions,
    pub cluster_counts: Vec<PointCount>,
    pub unassigned_count: usize,
    pub near_excluded: Vec<PointCount>,
    pub ks_statistic: Option<f64>,
    pub ks_threshold: Option<f64>,
    pub histogram: Vec<usize>,
    pub max_bin_mass: f64,
    pub verdict: Consistency,
    pub reasons: Vec<String>,
}

/// Simulates `config` and checks the finals against `prediction`.
pub fn verify(
    prediction: &LimitPrediction,
    config: &SimConfig,
    options: &VerifyOptions,
) -> Result<VerificationReport> {
    let results = run_replicates(config, options.jobs)?;
    let z = final_fractions(&results);
    let n = z.len();
    let hist = histogram(&z, HISTOGRAM_BINS);
    let max_bin_mass = hist.iter().copied().max().unwrap_or(0) as f64 / n as f64;

    let mut report = VerificationReport {
        prediction: prediction.clone(),
        replicates: config.replicates,
        n_steps: config.n_steps,
        base_seed: config.base_seed,
        options: *options,
        cluster_counts: Vec::new(),
        unassigned_count: n,
        near_excluded: Vec::new(),
        ks_statistic: None,
        ks_threshold: None,
        histogram: hist,
        max_bin_mass,
        verdict: Consistency::Inconclusive,
        reasons: Vec::new(),
    };

    match prediction.kind {
        PredictionKind::PointMassSet => point_masses(&mut report, &z, options),
        PredictionKind::BetaDistribution => {
            let (a, b) = prediction
                .beta_params
                .clone()
                .expect("Beta prediction carries parameters");
            let ks = ks_beta(&z, &a, &b)?;
            let threshold = ks.threshold(options.ks_level);
            report.ks_statistic = Some(ks.statistic);
            report.ks_threshold = Some(threshold);
            let pass = ks.statistic <= threshold;
            report.verdict = if pass {
                Consistency::Consistent
            } else {
                Consistency::Inconsistent
            };
            report.reasons.push(format!(
                "KS statistic {:.5} {} critical value {:.5} (c = {:.4} at level {})",
                ks.statistic,
                if pass { "<=" } else { ">" },
                threshold,
                ks_critical(options.ks_level),
                options.ks_level
            ));
        }
        PredictionKind::ContinuousNoAtoms => {
            report.reasons.push(format!(
                "atomless limit: only the histogram is reported (largest bin holds {:.3} of the mass)",
                max_bin_mass
            ));
        }
        PredictionKind::Unknown => report.reasons.push("no prediction to test".into()),
    }
    Ok(report)
}

fn point_masses(report: &mut VerificationReport, z: &[f64], options: &VerifyOptions) {
    let prediction = &report.prediction;
    let allowed = prediction.allowed_points();
    let n = z.len() as f64;
    if allowed.is_empty() {
        report
            .reasons
            .push("prediction lists no admissible limit points".into());
        return;
    }
    let clusters = match cluster_finals(z, &allowed, options.radius) {
        Ok(c) => c,
        Err(e) => {
            report
                .reasons
                .push(format!("cannot separate predicted points: {e}"));
            return;
        }
    };
    report.cluster_counts = prediction
        .certain_points
        .iter()
        .zip(&clusters.counts)
        .map(|(p, &count)| PointCount {
            point: p.root.label(),
            approx: p.root.approx(),
            count,
        })
        .collect();
    report.unassigned_count = clusters.unassigned;
    report.near_excluded = prediction
        .excluded_points
        .iter()
        .map(|p| {
            let x = p.root.approx();
            PointCount {
                point: p.root.label(),
                approx: x,
                count: count_near(z, &[x], options.radius),
            }
        })
        .collect();

    let assigned = (z.len() - clusters.unassigned) as f64 / n;
    let near_excluded = count_near(z, &prediction.excluded_approx(), options.radius) as f64 / n;
    let ok_assigned = assigned >= options.min_assigned_fraction;
    let ok_excluded = near_excluded <= options.max_excluded_fraction;
    report.reasons.push(format!(
        "{:.1}% of finals within {} of an admissible point (need >= {:.0}%)",
        100.0 * assigned,
        options.radius,
        100.0 * options.min_assigned_fraction
    ));
    report.reasons.push(format!(
        "{:.1}% of finals within {} of an excluded point (allow <= {:.0}%)",
        100.0 * near_excluded,
        options.radius,
        100.0 * options.max_excluded_fraction
    ));
    report.verdict = if ok_assigned && ok_excluded {
        Consistency::Consistent
    } else {
        Consistency::Inconsistent
    };
}
