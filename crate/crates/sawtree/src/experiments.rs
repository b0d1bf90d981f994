//! Experiment recipes.
//!
//! | id                   | data files      |
//! |----------------------|-----------------|
//! | `continuity-scan`    | csv             |
//! | `discontinuity-demo` | csv             |
//! | `frontispiece`       | svg, csv        |
//! | `line-return`        | csv             |
//! | `lambda-m-cascade`   | csv             |
//!
//! Each run also writes `<output>.report.json` holding the canonical config,
//! its SHA-256, the seeds, the crate version, a digest per data file and a
//! summary. Nothing in any file depends on the clock or the thread count.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use sawtree_core::combinatorics::{
    count_bridges, count_irreducible, count_walks, critical_lambda_m, irreducible_through, mu_bracket, phi_critical_m,
    Turn,
};
use sawtree_core::conductance::conductance_interval;
use sawtree_core::rng::substream;
use sawtree_core::tree::Budget;
use sawtree_core::walk::{line_visit_count, simulate_cursor, Bias};
use sawtree_core::{DomainSpec, Error, TreeModel};

use crate::config::{sha256_hex, ExperimentConfig};
use crate::error::{AppError, AppResult};
use crate::parallel::map_ordered;
use crate::spec::{parse_tree, AnyTree};
use crate::svg::{render_svg, SvgStyle};
use crate::with_tree;

pub const EXPERIMENTS: [&str; 5] =
    ["continuity-scan", "discontinuity-demo", "frontispiece", "line-return", "lambda-m-cascade"];

#[derive(Clone, Debug)]
pub struct Report {
    pub experiment: String,
    pub config_text: String,
    pub config_sha256: String,
    pub seeds: Vec<u64>,
    /// File name suffix and contents, e.g. `("csv", ...)`.
    pub files: Vec<(String, Vec<u8>)>,
    pub summary: Value,
    /// Set when a budget ran out and only part of the data was produced.
    pub partial: bool,
    pub output: String,
}

impl Report {
    pub fn to_json(&self) -> Value {
        let outputs: serde_json::Map<String, Value> = self
            .files
            .iter()
            .map(|(ext, bytes)| (format!("{}.{ext}", self.output), Value::String(sha256_hex(bytes))))
            .collect();
        json!({
            "experiment": self.experiment,
            "version": env!("CARGO_PKG_VERSION"),
            "config": self.config_text,
            "config_sha256": self.config_sha256,
            "seeds": self.seeds,
            "outputs": outputs,
            "partial": self.partial,
            "summary": self.summary,
        })
    }

    /// Writes the data files and the report into `dir`; returns the paths.
    pub fn write(&self, dir: &Path) -> AppResult<Vec<PathBuf>> {
        fs::create_dir_all(dir).map_err(|e| AppError::io(dir, e))?;
        let mut paths = Vec::new();
        for (ext, bytes) in &self.files {
            let p = dir.join(format!("{}.{ext}", self.output));
            fs::write(&p, bytes).map_err(|e| AppError::io(&p, e))?;
            paths.push(p);
        }
        let p = dir.join(format!("{}.report.json", self.output));
        let mut text = serde_json::to_string_pretty(&self.to_json())?;
        text.push('\n');
        fs::write(&p, text).map_err(|e| AppError::io(&p, e))?;
        paths.push(p);
        Ok(paths)
    }
}

/// The canonical config embedded in a report file.
pub fn config_from_report(text: &str) -> AppResult<ExperimentConfig> {
    let v: Value = serde_json::from_str(text)?;
    let cfg = v
        .get("config")
        .and_then(Value::as_str)
        .ok_or_else(|| AppError::usage("report has no embedded config"))?;
    ExperimentConfig::parse(cfg)
}

struct Out {
    files: Vec<(String, Vec<u8>)>,
    summary: Value,
    seeds: Vec<u64>,
    partial: bool,
}

pub fn run_experiment(mut cfg: ExperimentConfig) -> AppResult<Report> {
    let output: String = cfg.get("output", &cfg.experiment.clone())?;
    if output.is_empty() || output.contains(['/', '\\']) {
        return Err(AppError::usage("output must be a plain file stem"));
    }
    let out = match cfg.experiment.as_str() {
        "continuity-scan" => continuity_scan(&mut cfg)?,
        "discontinuity-demo" => discontinuity_demo(&mut cfg)?,
        "frontispiece" => frontispiece(&mut cfg)?,
        "line-return" => line_return(&mut cfg)?,
        "lambda-m-cascade" => lambda_m_cascade(&mut cfg)?,
        other => return Err(AppError::UnknownExperiment(other.to_string())),
    };
    cfg.check_unused()?;
    Ok(Report {
        experiment: cfg.experiment.clone(),
        config_text: cfg.canonical(),
        config_sha256: cfg.sha256(),
        seeds: out.seeds,
        files: out.files,
        summary: out.summary,
        partial: out.partial,
        output,
    })
}

fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> AppResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.into_inner().map_err(|e| AppError::io("<csv buffer>", e.into_error()))
}

fn tree_param(cfg: &mut ExperimentConfig, default: &str) -> AppResult<AnyTree> {
    let spec: String = cfg.get("tree", default)?;
    Ok(parse_tree(&spec)?)
}

/// `min, min + step, ..., max`, rounded to 12 decimals so the grid prints cleanly.
pub fn lambda_grid(min: f64, max: f64, step: f64) -> AppResult<Vec<f64>> {
    if !(step > 0.0 && min > 0.0 && max >= min && max.is_finite()) {
        return Err(AppError::usage("need 0 < lambda_min <= lambda_max and lambda_step > 0"));
    }
    let count = ((max - min) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| round12(min + i as f64 * step)).collect())
}

fn round12(x: f64) -> f64 {
    (x * 1e12).round() / 1e12
}

fn interval_at(tree: &AnyTree, lam: f64, n: usize, budget: u64) -> Result<(f64, f64), Error> {
    let mut b = Budget::new(budget);
    let iv = with_tree!(tree, t => conductance_interval(t, lam, n, &mut b))?;
    Ok((iv.lower, iv.upper))
}

fn continuity_scan(cfg: &mut ExperimentConfig) -> AppResult<Out> {
    let tree = tree_param(cfg, "bary:2")?;
    let grid = lambda_grid(cfg.get("lambda_min", 0.6)?, cfg.get("lambda_max", 2.0)?, cfg.get("lambda_step", 0.02)?)?;
    let n: usize = cfg.get("n", 40)?;
    let budget: u64 = cfg.get("budget", 50_000_000u64)?;
    let threshold: f64 = cfg.get("threshold", 0.05)?;
    let results = map_ordered(&grid, |&lam| interval_at(&tree, lam, n, budget));
    let mut rows = Vec::new();
    let mut done = Vec::new();
    let mut partial = false;
    for (&lam, r) in grid.iter().zip(results) {
        match r {
            Ok((lo, hi)) => {
                rows.push(vec![lam.to_string(), lo.to_string(), hi.to_string()]);
                done.push((lam, lo, hi));
            }
            Err(Error::BudgetExceeded { .. }) => partial = true,
            Err(e) => return Err(e.into()),
        }
    }
    let max_delta = |f: fn(&(f64, f64, f64)) -> f64| done.windows(2).map(|w| (f(&w[1]) - f(&w[0])).abs()).fold(0.0, f64::max);
    let du = max_delta(|r| r.2);
    let dl = max_delta(|r| r.1);
    Ok(Out {
        files: vec![("csv".into(), csv_bytes(&["lambda", "lower", "upper"], rows)?)],
        summary: json!({
            "points": done.len(),
            "max_adjacent_delta_upper": du,
            "max_adjacent_delta_lower": dl,
            "threshold": threshold,
            "continuous_at_grid_scale": !partial && du < threshold && dl < threshold,
        }),
        seeds: Vec::new(),
        partial,
    })
}

fn discontinuity_demo(cfg: &mut ExperimentConfig) -> AppResult<Out> {
    let tree = tree_param(cfg, "join(prop5:7/5,prop5bar:5/4)")?;
    let center: f64 = cfg.get("lambda_center", 0.8)?;
    let eps: Vec<f64> = cfg.get_list("eps", "0.002,0.005,0.01,0.02,0.05,0.1")?;
    let n: usize = cfg.get("n", 2000)?;
    let budget: u64 = cfg.get("budget", 50_000_000u64)?;
    let points: Vec<f64> = eps.iter().flat_map(|e| [round12(center - e), round12(center + e)]).collect();
    if points.iter().any(|&l| !(l > 0.0)) {
        return Err(AppError::usage("every lambda_center - eps must be positive"));
    }
    let results = map_ordered(&points, |&lam| interval_at(&tree, lam, n, budget));
    let mut rows = Vec::new();
    let mut certified = Vec::new();
    let mut partial = false;
    for (i, &e) in eps.iter().enumerate() {
        let (minus, plus) = match (&results[2 * i], &results[2 * i + 1]) {
            (Ok(a), Ok(b)) => (*a, *b),
            (Err(Error::BudgetExceeded { .. }), _) | (_, Err(Error::BudgetExceeded { .. })) => {
                partial = true;
                continue;
            }
            (Err(e), _) | (_, Err(e)) => return Err(e.clone().into()),
        };
        let gap = plus.0 - minus.1;
        if gap > 0.0 {
            certified.push(e);
        }
        rows.push(vec![
            e.to_string(),
            points[2 * i].to_string(),
            minus.0.to_string(),
            minus.1.to_string(),
            points[2 * i + 1].to_string(),
            plus.0.to_string(),
            plus.1.to_string(),
            gap.to_string(),
            (gap > 0.0).to_string(),
        ]);
    }
    let header = ["eps", "lambda_minus", "lower_minus", "upper_minus", "lambda_plus", "lower_plus", "upper_plus", "gap", "certified"];
    Ok(Out {
        files: vec![("csv".into(), csv_bytes(&header, rows)?)],
        summary: json!({
            "lambda_center": center,
            "n": n,
            "certified_eps": certified,
            "smallest_certified_eps": certified.iter().copied().fold(None, |m: Option<f64>, e| Some(m.map_or(e, |m| m.min(e)))),
        }),
        seeds: Vec::new(),
        partial,
    })
}

fn frontispiece(cfg: &mut ExperimentConfig) -> AppResult<Out> {
    let tree = tree_param(cfg, "saw:upperhalfplane:pruned")?;
    let lambda: f64 = cfg.get("lambda", 1.0)?;
    let steps: usize = cfg.get("steps", 10_000)?;
    let seed: u64 = cfg.get("seed", 1)?;
    let margin: usize = cfg.get("margin", 40)?;
    let scale: u32 = cfg.get("scale", 4)?;
    let AnyTree::Saw(saw) = tree else {
        return Err(AppError::usage("frontispiece needs a saw: tree"));
    };
    let mut rng = substream(seed, "frontispiece", 0);
    let mut cursor = saw.cursor();
    let trace = simulate_cursor(&mut cursor, Bias::new(lambda)?, steps, false, &mut rng)?;
    let walk = cursor.walk();
    let keep = walk.len().saturating_sub(margin);
    let points = &walk.points()[..=keep];
    let style = SvgStyle { scale, grid: false, ..SvgStyle::default() };
    let svg = render_svg(points, &style).into_bytes();
    let rows = points.iter().enumerate().map(|(i, p)| vec![i.to_string(), p.x.to_string(), p.y.to_string()]);
    Ok(Out {
        files: vec![("svg".into(), svg), ("csv".into(), csv_bytes(&["index", "x", "y"], rows)?)],
        summary: json!({
            "steps": trace.steps(),
            "final_depth": walk.len(),
            "max_depth": trace.max_depth(),
            "polyline_points": points.len(),
            "stuck": trace.stuck,
        }),
        seeds: vec![seed],
        partial: false,
    })
}

/// Per-run line visit counts at each checkpoint.
pub fn line_return_counts(tree: &AnyTree, lambda: f64, runs: u64, checkpoints: &[usize], seed: u64) -> AppResult<Vec<Vec<usize>>> {
    let steps = checkpoints.iter().copied().max().unwrap_or(0);
    let bias = Bias::new(lambda)?;
    let ids: Vec<u64> = (0..runs).collect();
    let per_run = map_ordered(&ids, |&r| -> Result<Vec<usize>, Error> {
        let mut rng = substream(seed, "line-return", r);
        let trace = with_tree!(tree, t => {
            let mut c = t.cursor();
            simulate_cursor(&mut c, bias, steps, false, &mut rng)
        })?;
        if trace.heads.is_empty() {
            return Err(Error::InvalidInput("line-return needs a tree of lattice walks".into()));
        }
        Ok(checkpoints.iter().map(|&c| line_visit_count(&trace.prefix(c))).collect())
    });
    per_run.into_iter().map(|r| r.map_err(AppError::from)).collect()
}

fn median(v: &mut [usize]) -> f64 {
    v.sort_unstable();
    let m = v.len();
    if m == 0 {
        return 0.0;
    }
    if m % 2 == 1 {
        v[m / 2] as f64
    } else {
        (v[m / 2 - 1] + v[m / 2]) as f64 / 2.0
    }
}

fn line_return(cfg: &mut ExperimentConfig) -> AppResult<Out> {
    let tree = tree_param(cfg, "saw:halfplane:pruned")?;
    let lambda: f64 = cfg.get("lambda", 1.0)?;
    let runs: u64 = cfg.get("runs", 200)?;
    let checkpoints: Vec<usize> = cfg.get_list("checkpoints", "1000,10000")?;
    let seed: u64 = cfg.get("seed", 1)?;
    let counts = line_return_counts(&tree, lambda, runs, &checkpoints, seed)?;
    let mut rows = Vec::new();
    for (r, c) in counts.iter().enumerate() {
        for (cp, v) in checkpoints.iter().zip(c) {
            rows.push(vec![r.to_string(), cp.to_string(), v.to_string()]);
        }
    }
    let stats: Vec<Value> = checkpoints
        .iter()
        .enumerate()
        .map(|(j, cp)| {
            let mut col: Vec<usize> = counts.iter().map(|c| c[j]).collect();
            let positive = col.iter().filter(|&&v| v >= 1).count();
            json!({"steps": cp, "median": median(&mut col), "runs_with_visit": positive})
        })
        .collect();
    Ok(Out {
        files: vec![("csv".into(), csv_bytes(&["run", "steps", "line_visits"], rows)?)],
        summary: json!({"runs": runs, "checkpoints": stats}),
        seeds: vec![seed],
        partial: false,
    })
}

fn lambda_m_cascade(cfg: &mut ExperimentConfig) -> AppResult<Out> {
    let m_max: usize = cfg.get("m_max", 10)?;
    let budget: u64 = cfg.get("budget", 2_000_000_000u64)?;
    if m_max == 0 {
        return Err(AppError::usage("m_max must be at least 1"));
    }
    let mut b = Budget::new(budget);
    let p = count_irreducible(m_max, &mut b);
    let through: Vec<_> = Turn::ALL.iter().map(|&t| irreducible_through(t, m_max, &mut b)).collect();
    let walks = count_walks(DomainSpec::FullPlane, m_max, &mut b);
    let bridges = count_bridges(DomainSpec::FullPlane, m_max, &mut b);
    let reached = [p.max_n(), walks.max_n(), bridges.max_n()]
        .into_iter()
        .chain(through.iter().map(|t| t.max_n()))
        .min()
        .unwrap_or(0);
    let partial = reached < m_max;
    let mut rows = Vec::new();
    let mut lambdas = Vec::new();
    let mut max_sum_err: f64 = 0.0;
    for m in 1..=reached {
        let lam = critical_lambda_m(&p, m)?;
        let phi = phi_critical_m(&through, lam, m)?;
        let sum: f64 = phi.iter().sum();
        max_sum_err = max_sum_err.max((sum - 1.0).abs());
        let (lo, hi) = mu_bracket(&walks, &bridges, m)?;
        lambdas.push(lam);
        rows.push(vec![
            m.to_string(),
            p.counts[m].to_string(),
            lam.to_string(),
            phi[0].to_string(),
            phi[1].to_string(),
            phi[2].to_string(),
            sum.to_string(),
            lo.to_string(),
            hi.to_string(),
        ]);
    }
    let header = ["m", "p_m", "lambda_m", "phi_straight", "phi_left", "phi_right", "phi_sum", "mu_lo", "mu_hi"];
    Ok(Out {
        files: vec![("csv".into(), csv_bytes(&header, rows)?)],
        summary: json!({
            "m_reached": reached,
            "strictly_decreasing": lambdas.windows(2).all(|w| w[1] < w[0]),
            "max_phi_sum_error": max_sum_err,
        }),
        seeds: Vec::new(),
        partial,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(text: &str) -> Report {
        run_experiment(ExperimentConfig::parse(text).unwrap()).unwrap()
    }

    #[test]
    fn grid() {
        let g = lambda_grid(0.6, 2.0, 0.02).unwrap();
        assert_eq!(g.len(), 71);
        assert_eq!(g[1], 0.62);
        assert_eq!(*g.last().unwrap(), 2.0);
    }

    #[test]
    fn continuity_small() {
        let r = run("experiment = continuity-scan\nlambda_min = 1\nlambda_max = 1.1\nn = 20\n");
        let text = String::from_utf8(r.files[0].1.clone()).unwrap();
        assert_eq!(text.lines().count(), 7);
        assert!(r.summary["continuous_at_grid_scale"].as_bool().unwrap());
    }

    #[test]
    fn report_round_trip() {
        let r = run("experiment = lambda-m-cascade\nm_max = 5\n");
        let cfg = config_from_report(&r.to_json().to_string()).unwrap();
        let again = run_experiment(cfg).unwrap();
        assert_eq!(r.files, again.files);
        assert_eq!(r.to_json(), again.to_json());
    }

    #[test]
    fn rejects() {
        let bad = |t: &str| run_experiment(ExperimentConfig::parse(t).unwrap()).unwrap_err();
        assert!(matches!(bad("experiment = nope"), AppError::UnknownExperiment(_)));
        assert_eq!(bad("experiment = lambda-m-cascade\nm_max = 3\nwat = 1").exit_code(), 3);
        assert_eq!(bad("experiment = frontispiece\ntree = bary:2").exit_code(), 3);
        assert_eq!(bad("experiment = lambda-m-cascade\noutput = a/b").exit_code(), 3);
    }
}
