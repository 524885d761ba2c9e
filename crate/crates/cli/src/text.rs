//! Plain-text renderings for `--format text`.

use std::fmt::Write;

use polya_sa::montecarlo::{SimConfig, Summary, VerificationReport, HISTOGRAM_BINS};
use polya_sa::rational::format_rational;
use polya_sa::urns::identities::SuiteResult;
use polya_sa::urns::Analysis;

pub fn analysis(a: &Analysis) -> String {
    let mut s = String::new();
    let rows: Vec<String> = a
        .model
        .matrix
        .iter()
        .map(|r| {
            r.iter()
                .map(|x| format_rational(&x.0))
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect();
    let _ = writeln!(s, "model      {:?}  [{}]", a.kind, rows.join(" | "));
    let _ = writeln!(s, "drift      {}", a.drift_text);
    let _ = writeln!(s, "psi        {}", a.psi_text);
    let _ = writeln!(s, "error fn   {}", a.error_fn);
    if let Some(i) = &a.attainable {
        let _ = writeln!(
            s,
            "[L, U]     [{}, {}]",
            format_rational(&i.lo),
            format_rational(&i.hi)
        );
    }
    if a.meta.degenerate_case != 0 {
        let _ = writeln!(s, "degenerate case {}", a.meta.degenerate_case);
    }
    let _ = writeln!(s, "equilibria");
    for e in &a.equilibria {
        let _ = writeln!(
            s,
            "  {:<24} {:?} (multiplicity {})",
            e.root.label(),
            e.class,
            e.root.multiplicity
        );
    }
    let p = &a.prediction;
    let _ = writeln!(s, "prediction {:?}", p.kind);
    if let Some((x, y)) = &p.beta_params {
        let _ = writeln!(s, "  Beta({}, {})", format_rational(x), format_rational(y));
    }
    if let Some(c) = p.citation {
        let _ = writeln!(s, "  cites {}", c.as_str());
    }
    for c in &p.certain_points {
        let _ = writeln!(
            s,
            "  {:<24} {:?} [{}]",
            c.root.label(),
            c.verdict,
            c.citation.as_str()
        );
    }
    for x in &p.excluded_points {
        let _ = writeln!(
            s,
            "  {:<24} excluded [{}]",
            x.root.label(),
            x.reason.as_str()
        );
    }
    s
}

fn histogram_lines(s: &mut String, hist: &[usize]) {
    let peak = hist.iter().copied().max().unwrap_or(0).max(1);
    for (k, &count) in hist.iter().enumerate() {
        let lo = k as f64 / HISTOGRAM_BINS as f64;
        let bar = "#".repeat((40 * count).div_ceil(peak));
        let _ = writeln!(s, "  {lo:.2} {count:>7} {bar}");
    }
}

pub fn summary(config: &SimConfig, sum: &Summary) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "replicates {}  steps {}  seed {}",
        config.replicates, config.n_steps, config.base_seed
    );
    let _ = writeln!(
        s,
        "final Z    mean {:.6}  sd {:.6}  min {:.6}  max {:.6}",
        sum.mean, sum.std_dev, sum.min, sum.max
    );
    let _ = writeln!(s, "histogram ({HISTOGRAM_BINS} bins over [0, 1])");
    histogram_lines(&mut s, &sum.histogram);
    s
}

pub fn report(r: &VerificationReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "verdict    {:?}", r.verdict);
    let _ = writeln!(
        s,
        "replicates {}  steps {}  seed {}",
        r.replicates, r.n_steps, r.base_seed
    );
    for c in &r.cluster_counts {
        let _ = writeln!(s, "  near {:<24} {}", c.point, c.count);
    }
    for c in &r.near_excluded {
        let _ = writeln!(s, "  near excluded {:<15} {}", c.point, c.count);
    }
    let _ = writeln!(s, "  unassigned {}", r.unassigned_count);
    if let (Some(d), Some(t)) = (r.ks_statistic, r.ks_threshold) {
        let _ = writeln!(s, "  KS D = {d:.5}, critical {t:.5}");
    }
    for reason in &r.reasons {
        let _ = writeln!(s, "  {reason}");
    }
    let _ = writeln!(s, "histogram ({HISTOGRAM_BINS} bins over [0, 1])");
    histogram_lines(&mut s, &r.histogram);
    s
}

pub fn selftest(results: &[SuiteResult]) -> String {
    let mut s = String::new();
    for r in results {
        let status = if r.passed() { "PASS" } else { "FAIL" };
        let _ = writeln!(
            s,
            "{status} {:<36} {} checks, {} failures",
            r.name, r.checks, r.failures
        );
        if let Some(f) = &r.first_failure {
            let _ = writeln!(s, "     first failure: {f}");
        }
    }
    s
}
