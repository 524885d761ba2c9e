//! Seeded simulation of urn trajectories and the empirical checks against a
//! predicted limit.
//!
//! Every replicate draws from its own ChaCha8 stream seeded with
//! [`replicate_seed`]`(base_seed, index)`, so results do not depend on how
//! replicates are scheduled across threads.

mod stats;
mod verify;

pub use stats::{
    cluster_finals, count_near, histogram, incomplete_beta, ks_beta, ks_critical, ln_gamma,
    ClusterCounts, KsResult, HISTOGRAM_BINS,
};
pub use verify::{verify, Consistency, PointCount, VerificationReport, VerifyOptions};

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{from_f64, to_f64};
use crate::urns::{step_distribution, Outcome, Sampling, UrnModel, UrnSpec, UrnState};

pub const DEFAULT_STEPS: u64 = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub spec: UrnSpec,
    pub n_steps: u64,
    pub replicates: u64,
    pub base_seed: u64,
    pub record_trajectory: bool,
    pub trajectory_stride: u64,
}

impl SimConfig {
    pub fn new(spec: UrnSpec, n_steps: u64, replicates: u64, base_seed: u64) -> Result<Self> {
        if n_steps == 0 {
            return Err(Error::Precondition("n_steps must be at least 1".into()));
        }
        if replicates == 0 {
            return Err(Error::Precondition("replicates must be at least 1".into()));
        }
        Ok(SimConfig {
            spec,
            n_steps,
            replicates,
            base_seed,
            record_trajectory: false,
            trajectory_stride: 1,
        })
    }

    pub fn with_trajectory(mut self, stride: u64) -> Result<Self> {
        if stride == 0 {
            return Err(Error::Precondition(
                "trajectory stride must be at least 1".into(),
            ));
        }
        self.record_trajectory = true;
        self.trajectory_stride = stride;
        Ok(self)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplicateResult {
    pub replicate: u64,
    pub final_w: f64,
    pub final_b: f64,
    pub final_z: f64,
    pub final_t: f64,
    /// Number of draws of each outcome, in the model's outcome order.
    pub outcome_counts: Vec<u64>,
    pub trajectory: Option<Vec<(u64, f64)>>,
}

/// SplitMix64 finalizer, a bijective 64-bit avalanche.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of the stream used by replicate `index`.
pub fn replicate_seed(base_seed: u64, index: u64) -> u64 {
    splitmix64(base_seed ^ splitmix64(index))
}

/// One exact step driven by the uniform variate `u` in `[0, 1)`: the first
/// outcome whose cumulative probability exceeds `u`.
pub fn step_with_uniform(
    state: &UrnState,
    model: &UrnModel,
    u: f64,
) -> Result<(UrnState, Outcome)> {
    let dist = step_distribution(state, model)?;
    let u =
        from_f64(u).ok_or_else(|| Error::Precondition("uniform variate is not finite".into()))?;
    let zero = crate::rational::int(0);
    let mut cum = zero.clone();
    let mut chosen = None;
    for o in &dist.outcomes {
        cum += &o.probability;
        if u < cum {
            chosen = Some(o);
            break;
        }
    }
    let o = chosen
        .or_else(|| dist.outcomes.iter().rev().find(|o| o.probability > zero))
        .expect("some outcome has positive probability");
    let w = &state.w + &o.dw;
    let b = &state.b + (&o.dt - &o.dw);
    Ok((
        UrnState {
            w,
            b,
            n: state.n + 1,
        },
        o.outcome,
    ))
}

pub fn step<R: Rng + ?Sized>(
    state: &UrnState,
    model: &UrnModel,
    rng: &mut R,
) -> Result<(UrnState, Outcome)> {
    step_with_uniform(state, model, rng.gen::<f64>())
}

/// Floating-point transition table: per outcome `(ΔW, ΔB)`.
#[derive(Debug, Clone)]
struct FastModel {
    kind: FastKind,
    dw: Vec<f64>,
    db: Vec<f64>,
}

#[derive(Debug, Clone, Copy)]
enum FastKind {
    One,
    TwoWith,
    TwoWithout,
}

impl FastModel {
    fn new(model: &UrnModel) -> Self {
        let rows: Vec<(f64, f64)> = match model {
            UrnModel::OneDraw(m) => {
                vec![(to_f64(&m.a), to_f64(&m.b)), (to_f64(&m.c), to_f64(&m.d))]
            }
            UrnModel::TwoDraw { matrix: m, .. } => vec![
                (to_f64(&m.a), to_f64(&m.b)),
                (to_f64(&m.c), to_f64(&m.d)),
                (to_f64(&m.e), to_f64(&m.f)),
            ],
        };
        let kind = match model {
            UrnModel::OneDraw(_) => FastKind::One,
            UrnModel::TwoDraw {
                sampling: Sampling::With,
                ..
            } => FastKind::TwoWith,
            UrnModel::TwoDraw {
                sampling: Sampling::Without,
                ..
            } => FastKind::TwoWithout,
        };
        FastModel {
            kind,
            dw: rows.iter().map(|r| r.0).collect(),
            db: rows.iter().map(|r| r.1).collect(),
        }
    }

    /// Index of the outcome selected by `u`.
    fn pick(&self, w: f64, b: f64, u: f64) -> usize {
        let t = w + b;
        match self.kind {
            FastKind::One => {
                if u < w / t {
                    0
                } else {
                    1
                }
            }
            FastKind::TwoWith => {
                let z = w / t;
                let p_ww = z * z;
                let p_wb = 2.0 * z * (1.0 - z);
                cumulative_pick(u, p_ww, p_wb, b)
            }
            FastKind::TwoWithout => {
                let denom = t * (t - 1.0);
                let p_ww = w * (w - 1.0) / denom;
                let p_wb = 2.0 * w * b / denom;
                cumulative_pick(u, p_ww, p_wb, b)
            }
        }
    }
}

fn cumulative_pick(u: f64, p_ww: f64, p_wb: f64, b: f64) -> usize {
    if u < p_ww {
        0
    } else if u < p_ww + p_wb || b <= 0.0 {
        // with no black balls BB is impossible; rounding must not select it
        1
    } else {
        2
    }
}

/// Runs one replicate.
///
/// Counts are `f64`; with integer parameters every count is an integer below
/// `2^53`, so they are exact.
pub fn simulate(config: &SimConfig, replicate: u64) -> ReplicateResult {
    let fast = FastModel::new(&config.spec.model);
    let mut rng = ChaCha8Rng::seed_from_u64(replicate_seed(config.base_seed, replicate));
    let mut w = to_f64(&config.spec.w0);
    let mut b = to_f64(&config.spec.b0);
    let mut counts = vec![0u64; fast.dw.len()];
    let mut trajectory = config.record_trajectory.then(|| vec![(0, w / (w + b))]);
    for n in 1..=config.n_steps {
        let u: f64 = rng.gen();
        let j = fast.pick(w, b, u);
        w += fast.dw[j];
        b += fast.db[j];
        counts[j] += 1;
        if let Some(tr) = trajectory.as_mut() {
            if n % config.trajectory_stride == 0 || n == config.n_steps {
                tr.push((n, w / (w + b)));
            }
        }
    }
    ReplicateResult {
        replicate,
        final_w: w,
        final_b: b,
        final_z: w / (w + b),
        final_t: w + b,
        outcome_counts: counts,
        trajectory,
    }
}

/// All replicates of `config` on `jobs` worker threads, in replicate order.
pub fn run_replicates(config: &SimConfig, jobs: usize) -> Result<Vec<ReplicateResult>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Precondition(format!("thread pool: {e}")))?;
    Ok(pool.install(|| {
        (0..config.replicates)
            .into_par_iter()
            .map(|i| simulate(config, i))
            .collect()
    }))
}

pub fn final_fractions(results: &[ReplicateResult]) -> Vec<f64> {
    results.iter().map(|r| r.final_z).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub replicates: usize,
    pub mean: f64,
    pub std_dev: f64,
    pub min: f64,
    pub max: f64,
    pub histogram: Vec<usize>,
}

pub fn summarize(results: &[ReplicateResult]) -> Summary {
    let z = final_fractions(results);
    let n = z.len() as f64;
    let mean = z.iter().sum::<f64>() / n;
    let var = if z.len() > 1 {
        z.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    Summary {
        replicates: z.len(),
        mean,
        std_dev: var.sqrt(),
        min: z.iter().copied().fold(f64::INFINITY, f64::min),
        max: z.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        histogram: histogram(&z, HISTOGRAM_BINS),
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(format!("csv: {e}"))
}

/// `replicate,final_W,final_B,final_Z`, one row per replicate.
pub fn write_finals_csv<W: Write>(out: W, results: &[ReplicateResult]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["replicate", "final_W", "final_B", "final_Z"])
        .map_err(csv_err)?;
    for r in results {
        w.write_record([
            r.replicate.to_string(),
            r.final_w.to_string(),
            r.final_b.to_string(),
            r.final_z.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Parse(format!("csv: {e}")))
}

/// `replicate,step,Z` for every recorded trajectory point.
pub fn write_trajectory_csv<W: Write>(out: W, results: &[ReplicateResult]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["replicate", "step", "Z"])
        .map_err(csv_err)?;
    for r in results {
        for (n, z) in r.trajectory.iter().flatten() {
            w.write_record([r.replicate.to_string(), n.to_string(), z.to_string()])
                .map_err(csv_err)?;
        }
    }
    w.flush().map_err(|e| Error::Parse(format!("csv: {e}")))
}
