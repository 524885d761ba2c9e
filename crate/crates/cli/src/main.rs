use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use polya_sa::montecarlo::{
    run_replicates, summarize, verify, write_finals_csv, write_trajectory_csv, Consistency,
    SimConfig, VerifyOptions, DEFAULT_STEPS,
};
use polya_sa::rational::parse_rational;
use polya_sa::sa::LimitPrediction;
use polya_sa::urns::{
    analyze, default_initial_count, identities, parse_entries, ReplacementMatrixOne,
    ReplacementMatrixTwo, Sampling, UrnModel, UrnSpec,
};

mod text;

#[derive(Parser, Debug)]
#[command(
    name = "polya-sa",
    version,
    about = "Analyze and simulate generalized Pólya urns"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Derive drift and error, classify equilibria and predict the limit.
    Analyze {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run seeded replicates and write their final states.
    Simulate {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        sim: SimArgs,
        #[command(flatten)]
        output: OutputArgs,
        /// Trajectory CSV (`replicate,step,Z`).
        #[arg(long, value_name = "PATH")]
        trajectory_out: Option<PathBuf>,
        /// Record every N-th step of each trajectory.
        #[arg(long, default_value_t = 100, value_name = "N")]
        stride: u64,
    },
    /// Simulate and compare the finals with the predicted limit.
    Verify {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        sim: SimArgs,
        #[command(flatten)]
        output: OutputArgs,
        /// Use this prediction (JSON) instead of deriving one.
        #[arg(long, value_name = "FILE")]
        prediction: Option<PathBuf>,
        /// Clustering radius around predicted points.
        #[arg(long, default_value_t = 0.05)]
        radius: f64,
    },
    /// Check the exact identities on seeded random urns.
    Selftest {
        #[arg(long, default_value_t = 20260101)]
        seed: u64,
        /// Random matrices per suite.
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[command(flatten)]
        output: OutputArgs,
        /// Perturb one coefficient-table entry (exercises the failure path).
        #[arg(long, hide = true)]
        mutate_table: bool,
    },
}

#[derive(Args, Debug)]
#[group(id = "source", required = true, multiple = false)]
struct ModelSource {
    /// One-draw matrix `a,b,c,d`.
    #[arg(long, value_name = "a,b,c,d", allow_hyphen_values = true)]
    one_draw: Option<String>,
    /// Two-draw matrix `a,b,c,d,e,f` (rows WW, WB, BB).
    #[arg(long, value_name = "a,b,c,d,e,f", allow_hyphen_values = true)]
    two_draw: Option<String>,
    /// Model JSON file.
    #[arg(long, value_name = "FILE")]
    model: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ModelArgs {
    #[command(flatten)]
    source: ModelSource,
    /// Initial white balls (rational).
    #[arg(long)]
    w0: Option<String>,
    /// Initial black balls (rational).
    #[arg(long)]
    b0: Option<String>,
    #[arg(long, value_enum)]
    sampling: Option<SamplingArg>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SamplingArg {
    With,
    Without,
}

#[derive(Args, Debug)]
struct SimArgs {
    #[arg(long, default_value_t = DEFAULT_STEPS)]
    steps: u64,
    #[arg(long, default_value_t = 100)]
    replicates: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads; results do not depend on this.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Args, Debug)]
struct OutputArgs {
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

/// Exit status of a command that ran to completion.
enum Outcome {
    Ok,
    Inconsistent,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Inconsistent) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Analyze { model, output } => {
            let spec = build_spec(&model)?;
            let analysis = analyze(&spec)?;
            let body = match output.format.unwrap_or(Format::Json) {
                Format::Json => to_json(&analysis)?,
                Format::Text => text::analysis(&analysis),
                Format::Csv => bail!("analyze supports --format json or text"),
            };
            emit(output.out.as_deref(), &body)?;
            Ok(Outcome::Ok)
        }
        Command::Simulate {
            model,
            sim,
            output,
            trajectory_out,
            stride,
        } => {
            let spec = build_spec(&model)?;
            let mut config = SimConfig::new(spec, sim.steps, sim.replicates, sim.seed)?;
            if trajectory_out.is_some() {
                config = config.with_trajectory(stride)?;
            }
            let results = run_replicates(&config, sim.jobs)?;
            if let Some(path) = &output.out {
                let file = create(path)?;
                write_finals_csv(file, &results)
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            if let Some(path) = &trajectory_out {
                let file = create(path)?;
                write_trajectory_csv(file, &results)
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            let stdout = io::stdout();
            match output.format.unwrap_or(Format::Text) {
                Format::Text => emit(None, &text::summary(&config, &summarize(&results)))?,
                Format::Json => emit(None, &to_json(&summarize(&results))?)?,
                Format::Csv => write_finals_csv(stdout.lock(), &results)?,
            }
            Ok(Outcome::Ok)
        }
        Command::Verify {
            model,
            sim,
            output,
            prediction,
            radius,
        } => {
            let spec = build_spec(&model)?;
            let prediction = match &prediction {
                Some(path) => read_prediction(path)?,
                None => analyze(&spec)?.prediction,
            };
            let config = SimConfig::new(spec, sim.steps, sim.replicates, sim.seed)?;
            let options = VerifyOptions {
                radius,
                jobs: sim.jobs,
                ..VerifyOptions::default()
            };
            let report = verify(&prediction, &config, &options)?;
            let body = match output.format.unwrap_or(Format::Json) {
                Format::Json => to_json(&report)?,
                Format::Text => text::report(&report),
                Format::Csv => bail!("verify supports --format json or text"),
            };
            emit(output.out.as_deref(), &body)?;
            Ok(match report.verdict {
                Consistency::Inconsistent => Outcome::Inconsistent,
                Consistency::Consistent | Consistency::Inconclusive => Outcome::Ok,
            })
        }
        Command::Selftest {
            seed,
            count,
            output,
            mutate_table,
        } => {
            let table = if mutate_table {
                mutated_table
            } else {
                identities::tabulated
            };
            let results = identities::run_all_with(seed, count, table);
            let body = match output.format.unwrap_or(Format::Text) {
                Format::Json => to_json(&results)?,
                Format::Text => text::selftest(&results),
                Format::Csv => bail!("selftest supports --format json or text"),
            };
            emit(output.out.as_deref(), &body)?;
            Ok(if results.iter().all(|r| r.passed()) {
                Outcome::Ok
            } else {
                Outcome::Inconsistent
            })
        }
    }
}

fn mutated_table(m: &ReplacementMatrixTwo) -> polya_sa::urns::Table1 {
    let mut t = identities::tabulated(m);
    t.columns[2][2] += polya_sa::rational::int(1);
    t
}

fn build_spec(args: &ModelArgs) -> Result<UrnSpec> {
    let sampling = args.sampling.map(|s| match s {
        SamplingArg::With => Sampling::With,
        SamplingArg::Without => Sampling::Without,
    });
    let src = &args.source;
    let base = if let Some(path) = &src.model {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut file: polya_sa::urns::ModelFile =
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        if sampling.is_some() {
            file.sampling = sampling;
        }
        UrnSpec::try_from(file).with_context(|| format!("invalid model in {}", path.display()))?
    } else {
        let model = if let Some(list) = &src.one_draw {
            let v = parse_entries(list).context("--one-draw")?;
            let [a, b, c, d]: [_; 4] = v
                .try_into()
                .map_err(|v: Vec<_>| anyhow!("--one-draw needs 4 entries, got {}", v.len()))?;
            if sampling.is_some() {
                bail!("--sampling applies to two-draw models only");
            }
            UrnModel::OneDraw(ReplacementMatrixOne::new(a, b, c, d)?)
        } else {
            let list = src
                .two_draw
                .as_ref()
                .expect("clap enforces one model source");
            let v = parse_entries(list).context("--two-draw")?;
            let [a, b, c, d, e, f]: [_; 6] = v
                .try_into()
                .map_err(|v: Vec<_>| anyhow!("--two-draw needs 6 entries, got {}", v.len()))?;
            UrnModel::TwoDraw {
                matrix: ReplacementMatrixTwo::new(a, b, c, d, e, f)?,
                sampling: sampling.unwrap_or_default(),
            }
        };
        let n = default_initial_count(&model);
        UrnSpec::new(model, n.clone(), n)?
    };
    let w0 = match &args.w0 {
        Some(s) => parse_rational(s).context("--w0")?,
        None => base.w0.clone(),
    };
    let b0 = match &args.b0 {
        Some(s) => parse_rational(s).context("--b0")?,
        None => base.b0.clone(),
    };
    Ok(UrnSpec::new(base.model, w0, b0)?)
}

/// Accepts a bare prediction or a full `analyze` report.
fn read_prediction(path: &Path) -> Result<LimitPrediction> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let inner = value.get("prediction").cloned().unwrap_or(value);
    serde_json::from_value(inner)
        .with_context(|| format!("{} is not a limit prediction", path.display()))
}

fn to_json<T: serde::Serialize>(v: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn create(path: &Path) -> Result<fs::File> {
    fs::File::create(path).with_context(|| format!("creating {}", path.display()))
}

fn emit(path: Option<&Path>, body: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, body).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(body.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}
