use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use sawtree::error::{AppError, AppResult};
use sawtree::experiments::{config_from_report, EXPERIMENTS};
use sawtree::parallel::escape_probability_par;
use sawtree::svg::{render_svg, SvgStyle};
use sawtree::{parse_tree, run_experiment, with_tree, AnyTree, ExperimentConfig};
use sawtree_core::combinatorics::{
    count_bridges, count_irreducible, count_walks, critical_lambda_m, irreducible_through, is_bridge, kesten_sample,
    phi_critical_m, CountTable, IrreducibleBridges, KestenConfig, Turn,
};
use sawtree_core::conductance::{conductance_interval, root_weight, truncated_conductance};
use sawtree_core::gallery::{growth_estimate, periodic_critical_lambda, GalleryTree};
use sawtree_core::rng::substream;
use sawtree_core::tree::{Budget, TreeCursor};
use sawtree_core::walk::{limit_walk_commit, limit_walk_exact, line_visit_count, simulate, Bias, CommitParams, Move};
use sawtree_core::{DomainSpec, LatticePoint, SawTree, TreeModel};

#[derive(Parser)]
#[command(name = "sawtree", version, about = "Self-avoiding-walk trees and biased random walks")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Saw,
    Bridge,
    Irreducible,
    Straight,
    Left,
    Right,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum PrefixKind {
    Commit,
    Exact,
}

#[derive(Subcommand)]
enum Cmd {
    /// List the self-avoiding walks of one length as step words.
    Enumerate {
        #[arg(long, default_value = "plane")]
        domain: String,
        #[arg(short, long)]
        n: usize,
        /// Only bridges.
        #[arg(long)]
        bridges: bool,
        /// Give up (exit 2) after this many walks.
        #[arg(long, default_value_t = 1_000_000)]
        limit: u64,
    },
    /// Exact count tables.
    Counts {
        #[arg(long, value_enum, default_value = "saw")]
        kind: Kind,
        /// Domain for saw and bridge counts (strip:L gives p^(L)).
        #[arg(long, default_value = "plane")]
        domain: String,
        #[arg(short, long)]
        n: usize,
        #[arg(long, default_value_t = u64::MAX)]
        budget: u64,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Truncated conductance and a certified interval.
    Conductance {
        #[arg(long)]
        tree: String,
        #[arg(short, long)]
        lambda: f64,
        #[arg(short, long)]
        n: usize,
        /// Also estimate the escape probability from this many walks.
        #[arg(long)]
        mc: Option<u64>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = u64::MAX)]
        budget: u64,
    },
    /// Simulate the biased walk, or sample a limit-walk prefix with --limit.
    Walk {
        #[arg(long, required_unless_present = "domain")]
        tree: Option<String>,
        /// Shorthand for --tree saw:DOMAIN.
        #[arg(long, conflicts_with = "tree")]
        domain: Option<String>,
        /// With --domain: prune finite branches.
        #[arg(long, requires = "domain")]
        pruned: bool,
        /// A positive number or "inf".
        #[arg(short, long)]
        lambda: String,
        #[arg(long, default_value_t = 1000)]
        steps: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Sample the first K steps of the limit walk instead.
        #[arg(long)]
        limit: Option<usize>,
        #[arg(long, value_enum, default_value = "commit")]
        method: PrefixKind,
        #[arg(long, default_value_t = CommitParams::DEFAULT_MARGIN)]
        margin: usize,
        /// Tolerance for the exact sampler.
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
        /// Write the final walk (or the prefix) as SVG.
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Also write the printed statistics to this file.
        #[arg(long)]
        stats: Option<PathBuf>,
        #[arg(long, default_value_t = u64::MAX)]
        budget: u64,
    },
    /// Level sizes and growth of a tree.
    Gallery {
        #[arg(long)]
        tree: String,
        #[arg(short, long, default_value_t = 10)]
        levels: usize,
        #[arg(long, default_value_t = u64::MAX)]
        budget: u64,
    },
    /// Sample concatenations of irreducible bridges from the Kesten measure.
    Kesten {
        #[arg(long)]
        beta: f64,
        /// Longest irreducible bridge kept (at most 12).
        #[arg(short, long, default_value_t = 8)]
        m: usize,
        #[arg(long, default_value_t = 10)]
        blocks: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Critical biases λ_m of the m-good trees and the first-step law at λ_m.
    LambdaM {
        #[arg(short, long, default_value_t = 10)]
        m: usize,
        #[arg(long, default_value_t = u64::MAX)]
        budget: u64,
    },
    /// Run an experiment from a config file or rerun one from its report.
    Experiment {
        config: Option<PathBuf>,
        #[arg(long, conflicts_with = "config")]
        from_report: Option<PathBuf>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// List the experiment ids.
        #[arg(long)]
        list: bool,
    },
}

fn read(path: &PathBuf) -> AppResult<String> {
    fs::read_to_string(path).map_err(|e| AppError::io(path, e))
}

fn domain(s: &str) -> AppResult<DomainSpec> {
    Ok(s.parse()?)
}

fn write_svg(path: &PathBuf, points: &[LatticePoint]) -> AppResult<()> {
    fs::write(path, render_svg(points, &SvgStyle::default())).map_err(|e| AppError::io(path, e))
}

fn parse_bias(s: &str) -> AppResult<Bias> {
    if s == "inf" {
        return Ok(Bias::Infinite);
    }
    let v: f64 = s.parse().map_err(|_| AppError::usage(format!("bad lambda {s:?}")))?;
    Ok(Bias::new(v)?)
}

fn print_table(t: &CountTable, format: Format) -> AppResult<()> {
    let out = io::stdout();
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out.lock());
            w.write_record(["n", "count"])?;
            for (n, c) in t.counts.iter().enumerate() {
                w.write_record([n.to_string(), c.to_string()])?;
            }
            w.flush().map_err(|e| AppError::io("<stdout>", e))?;
        }
        Format::Json => {
            let v = json!({"kind": t.kind.to_string(), "domain": t.domain.to_string(), "complete": t.complete, "counts": t.counts});
            println!("{}", serde_json::to_string_pretty(&v)?);
        }
    }
    if !t.complete {
        return Err(sawtree_core::Error::BudgetExceeded { reached: t.max_n() }.into());
    }
    Ok(())
}

fn enumerate(domain: DomainSpec, n: usize, bridges: bool, limit: u64) -> AppResult<()> {
    let tree = SawTree::new(domain, false);
    let mut c = tree.cursor();
    let mut w = csv::Writer::from_writer(io::stdout().lock());
    w.write_record(["index", "word", "end_x", "end_y"])?;
    let mut next = vec![0usize];
    let mut emitted = 0u64;
    while let Some(&i) = next.last() {
        if c.depth() == n {
            let walk = c.walk();
            if !bridges || is_bridge(&walk) {
                if emitted == limit {
                    return Err(sawtree_core::Error::BudgetExceeded { reached: 0 }.into());
                }
                let word: String = walk.dirs().iter().map(|d| d.letter()).collect();
                let end = walk.end();
                w.write_record([emitted.to_string(), word, end.x.to_string(), end.y.to_string()])?;
                emitted += 1;
            }
        }
        if c.depth() < n && i < c.child_count() {
            *next.last_mut().unwrap() += 1;
            c.descend(i);
            next.push(0);
        } else {
            next.pop();
            c.ascend();
        }
    }
    w.flush().map_err(|e| AppError::io("<stdout>", e))?;
    Ok(())
}

fn conductance(tree: &AnyTree, lambda: f64, n: usize, mc: Option<u64>, seed: u64, budget: u64) -> AppResult<()> {
    let mut b = Budget::new(budget);
    let (trunc, iv, pi) = with_tree!(tree, t => (
        truncated_conductance(t, lambda, n, &mut b)?,
        conductance_interval(t, lambda, n, &mut b)?,
        root_weight(t, lambda),
    ));
    let mut v = json!({
        "lambda": lambda,
        "n": n,
        "truncated": trunc.value,
        "exact": trunc.exact.map(|r| r.to_string()),
        "interval": [iv.lower, iv.upper],
        "methods": iv.methods.iter().map(|m| m.name()).collect::<Vec<_>>(),
        "root_weight": pi,
        "escape_probability": trunc.value / pi,
    });
    if let Some(samples) = mc {
        let est = with_tree!(tree, t => escape_probability_par(t, lambda, n, samples, seed))?;
        v["mc"] = json!({"mean": est.mean, "stderr": est.stderr, "samples": est.samples, "seed": est.seed});
    }
    println!("{}", serde_json::to_string_pretty(&v)?);
    Ok(())
}

struct WalkArgs {
    bias: Bias,
    steps: usize,
    seed: u64,
    limit: Option<usize>,
    method: PrefixKind,
    margin: usize,
    tol: f64,
    svg: Option<PathBuf>,
    stats: Option<PathBuf>,
    budget: u64,
}

fn emit(v: &serde_json::Value, stats: &Option<PathBuf>) -> AppResult<()> {
    let text = serde_json::to_string_pretty(v)?;
    println!("{text}");
    if let Some(p) = stats {
        fs::write(p, text + "\n").map_err(|e| AppError::io(p, e))?;
    }
    Ok(())
}

fn walk(tree: &AnyTree, a: WalkArgs) -> AppResult<()> {
    let WalkArgs { bias, steps, seed, limit, method, margin, tol, svg, stats, budget } = a;
    let mut rng = substream(seed, "walk", 0);
    let Some(k) = limit else {
        let trace = with_tree!(tree, t => simulate(t, bias, steps, true, &mut rng))?;
        let downs = trace.moves.iter().flatten().filter(|m| matches!(m, Move::Down(_))).count();
        let v = json!({
            "seed": seed,
            "steps": trace.steps(),
            "final_depth": trace.depths.last(),
            "max_depth": trace.max_depth(),
            "down_moves": downs,
            "line_visit_count": (!trace.heads.is_empty()).then(|| line_visit_count(&trace)),
            // levels k whose vertex is fixed by the commit rule at margin M
            "commit_margin": margin,
            "commit_events": (trace.max_depth() as usize).saturating_sub(margin),
            "stuck": trace.stuck,
        });
        emit(&v, &stats)?;
        if let Some(p) = svg {
            if trace.heads.is_empty() {
                return Err(AppError::usage("--svg needs a saw: tree"));
            }
            let AnyTree::Saw(saw) = tree else { unreachable!() };
            let path = trace_path(saw, &trace.moves.unwrap_or_default())?;
            write_svg(&p, &path)?;
        }
        return Ok(());
    };
    let prefix = match method {
        PrefixKind::Commit => {
            let params = CommitParams { margin, doubling: true, ..CommitParams::new(k) };
            let out = with_tree!(tree, t => limit_walk_commit(t, bias, params, &mut rng))?;
            match out.prefix() {
                Some(p) => p.clone(),
                None => return Err(sawtree_core::Error::BudgetExceeded { reached: 0 }.into()),
            }
        }
        PrefixKind::Exact => {
            let lam = match bias {
                Bias::Finite(l) => l,
                Bias::Infinite => return Err(AppError::usage("the exact sampler needs a finite lambda")),
            };
            let schedule = [16, 32, 64, 128, 256];
            let mut b = Budget::new(budget);
            with_tree!(tree, t => limit_walk_exact(t, lam, k, tol, &schedule, &mut rng, &mut b))?
        }
    };
    let v = json!({
        "seed": seed,
        "path": prefix.path,
        "heads": prefix.heads.iter().map(|p| [p.x, p.y]).collect::<Vec<_>>(),
        "total_steps": prefix.total_steps,
        "commit_margin": prefix.commit_margin,
        "doublings": prefix.doublings,
        "max_width": prefix.widths.iter().copied().fold(0.0, f64::max),
    });
    emit(&v, &stats)?;
    if let Some(p) = svg {
        if prefix.heads.is_empty() {
            return Err(AppError::usage("--svg needs a saw: tree"));
        }
        write_svg(&p, &prefix.heads)?;
    }
    Ok(())
}

/// The walk at the final vertex, rebuilt from the recorded moves.
fn trace_path(tree: &SawTree, moves: &[Move]) -> AppResult<Vec<LatticePoint>> {
    let mut c = tree.cursor();
    for m in moves {
        match *m {
            Move::Up => c.ascend(),
            Move::Down(i) => c.descend(i as usize),
        }
    }
    Ok(c.walk().points().to_vec())
}

fn gallery(tree: &AnyTree, levels: usize, budget: u64) -> AppResult<()> {
    let mut b = Budget::new(budget);
    let growth = with_tree!(tree, t => growth_estimate(t, levels, &mut b))?;
    let mut w = csv::Writer::from_writer(io::stdout().lock());
    w.write_record(["n", "size", "growth"])?;
    for (i, (size, g)) in growth.iter().enumerate() {
        w.write_record([(i + 1).to_string(), size.to_string(), g.to_string()])?;
    }
    w.flush().map_err(|e| AppError::io("<stdout>", e))?;
    if let Some(GalleryTree::Periodic(f)) = tree.gallery() {
        eprintln!("critical lambda {}", periodic_critical_lambda(f)?);
    }
    Ok(())
}

fn kesten(beta: f64, m: usize, blocks: usize, seed: u64, svg: Option<PathBuf>) -> AppResult<()> {
    let store = IrreducibleBridges::enumerate(m, &mut Budget::unlimited())?;
    let cfg = KestenConfig::new(beta, &store)?;
    let mut rng = substream(seed, "kesten", 0);
    let s = kesten_sample(&cfg, &store, blocks, &mut rng)?;
    let v = json!({
        "beta": beta,
        "z": cfg.z,
        "word": s.walk.dirs().iter().map(|d| d.letter()).collect::<String>(),
        "block_lengths": s.block_lengths,
    });
    println!("{}", serde_json::to_string_pretty(&v)?);
    if let Some(p) = svg {
        write_svg(&p, s.walk.points())?;
    }
    Ok(())
}

fn lambda_m(m: usize, budget: u64) -> AppResult<()> {
    let mut b = Budget::new(budget);
    let p = count_irreducible(m, &mut b);
    let through: Vec<_> = Turn::ALL.iter().map(|&t| irreducible_through(t, m, &mut b)).collect();
    let reached = through.iter().map(|t| t.max_n()).min().unwrap_or(0).min(p.max_n());
    let mut w = csv::Writer::from_writer(io::stdout().lock());
    w.write_record(["m", "p_m", "lambda_m", "phi_straight", "phi_left", "phi_right"])?;
    for k in 1..=reached {
        let lam = critical_lambda_m(&p, k)?;
        let phi = phi_critical_m(&through, lam, k)?;
        w.write_record([k.to_string(), p.counts[k].to_string(), lam.to_string(), phi[0].to_string(), phi[1].to_string(), phi[2].to_string()])?;
    }
    w.flush().map_err(|e| AppError::io("<stdout>", e))?;
    if reached < m {
        return Err(sawtree_core::Error::BudgetExceeded { reached }.into());
    }
    Ok(())
}

fn experiment(config: Option<PathBuf>, from_report: Option<PathBuf>, out: PathBuf, list: bool) -> AppResult<()> {
    if list {
        for id in EXPERIMENTS {
            println!("{id}");
        }
        return Ok(());
    }
    let cfg = match (config, from_report) {
        (Some(c), None) => ExperimentConfig::parse(&read(&c)?)?,
        (None, Some(r)) => config_from_report(&read(&r)?)?,
        _ => return Err(AppError::usage("give a config file or --from-report")),
    };
    let report = run_experiment(cfg)?;
    for p in report.write(&out)? {
        println!("{}", p.display());
    }
    let _ = io::stdout().flush();
    if report.partial {
        eprintln!("budget exceeded; outputs are partial");
        return Err(sawtree_core::Error::BudgetExceeded { reached: 0 }.into());
    }
    Ok(())
}

fn run(cli: Cli) -> AppResult<()> {
    match cli.cmd {
        Cmd::Enumerate { domain: d, n, bridges, limit } => enumerate(domain(&d)?, n, bridges, limit),
        Cmd::Counts { kind, domain: d, n, budget, format } => {
            let mut b = Budget::new(budget);
            let d = domain(&d)?;
            let t = match kind {
                Kind::Saw => count_walks(d, n, &mut b),
                Kind::Bridge => count_bridges(d, n, &mut b),
                Kind::Irreducible => count_irreducible(n, &mut b),
                Kind::Straight => irreducible_through(Turn::Straight, n, &mut b),
                Kind::Left => irreducible_through(Turn::Left, n, &mut b),
                Kind::Right => irreducible_through(Turn::Right, n, &mut b),
            };
            print_table(&t, format)
        }
        Cmd::Conductance { tree, lambda, n, mc, seed, budget } => conductance(&parse_tree(&tree)?, lambda, n, mc, seed, budget),
        Cmd::Walk { tree, domain, pruned, lambda, steps, seed, limit, method, margin, tol, svg, stats, budget } => {
            let spec = match (tree, domain) {
                (Some(t), _) => t,
                (None, Some(d)) => format!("saw:{d}{}", if pruned { ":pruned" } else { "" }),
                (None, None) => return Err(AppError::usage("give --tree or --domain")),
            };
            let args = WalkArgs { bias: parse_bias(&lambda)?, steps, seed, limit, method, margin, tol, svg, stats, budget };
            walk(&parse_tree(&spec)?, args)
        }
        Cmd::Gallery { tree, levels, budget } => gallery(&parse_tree(&tree)?, levels, budget),
        Cmd::Kesten { beta, m, blocks, seed, svg } => kesten(beta, m, blocks, seed, svg),
        Cmd::LambdaM { m, budget } => lambda_m(m, budget),
        Cmd::Experiment { config, from_report, out, list } => experiment(config, from_report, out, list),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 3 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
