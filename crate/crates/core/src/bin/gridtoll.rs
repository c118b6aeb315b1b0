use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use gridtoll::baseline::best_single_price;
use gridtoll::block::{solve_last_level_block, BlockSolver, BlockSubproblem, LastLevelMode};
use gridtoll::compression::compress_grid;
use gridtoll::decomposition::{solve, solve_candidate, CandidateReport, Parity, SolveOptions};
use gridtoll::gen::{generate, BudgetPattern, GenConfig};
use gridtoll::io::{instance_to_json, parse_instance, parse_pricing, parse_weighted_grid, pricing_to_json, weighted_grid_to_json};
use gridtoll::oracle::{brute_force_opt, DEFAULT_EDGE_GUARD};
use gridtoll::rooted::{solve_rooted, RootedInstance, DEFAULT_STATE_BUDGET};
use gridtoll::{revenue, Error, GridInstance, Money, PriceSet, Pricing, VertexId};

#[derive(Parser)]
#[command(name = "gridtoll", version, about = "Toll pricing on grid graphs of small width")]
struct Cli {
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a seeded random instance.
    Gen(GenArgs),
    /// Run the level decomposition and report the best candidate.
    Solve(SolveArgs),
    /// Revenue of a pricing.
    Eval { instance: PathBuf, pricing: PathBuf },
    /// Exhaustive optimum over the rounded price set.
    Oracle {
        #[command(flatten)]
        io: IoArgs,
        #[arg(long, default_value_t = DEFAULT_EDGE_GUARD)]
        edge_guard: usize,
    },
    /// Exact dynamic program for drivers sharing an endpoint on the top row.
    Rooted {
        #[command(flatten)]
        io: IoArgs,
        /// Column of the root; inferred from the drivers when omitted.
        #[arg(long)]
        root: Option<usize>,
        #[command(flatten)]
        limits: Limits,
    },
    /// Solve a single block subproblem.
    Block {
        #[command(flatten)]
        io: IoArgs,
        /// Row every driver path must touch; omit for a bottom-level block.
        #[arg(long)]
        middle_row: Option<usize>,
        #[command(flatten)]
        limits: Limits,
    },
    /// Best uniform price.
    SinglePrice {
        #[command(flatten)]
        io: IoArgs,
    },
    /// Reduce a weighted grid to bounded length keeping top-row distances.
    Compress {
        grid: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Compare every candidate against the oracle over a set of instances.
    Bench {
        instances: Vec<PathBuf>,
        #[command(flatten)]
        limits: Limits,
    },
}

#[derive(Args)]
struct IoArgs {
    instance: PathBuf,
    /// Pricing output file.
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Result record output file; printed to stdout when omitted.
    #[arg(long)]
    record: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct Limits {
    /// Per-row cap on dynamic-program states.
    #[arg(long, env = "GRIDTOLL_STATE_BUDGET", default_value_t = DEFAULT_STATE_BUDGET)]
    state_budget: usize,
    /// Largest edge count any exhaustive search may enumerate.
    #[arg(long, default_value_t = DEFAULT_EDGE_GUARD)]
    edge_guard: usize,
    #[arg(long, value_enum, default_value_t = LastLevel::Auto)]
    last_level: LastLevel,
    /// Drop block candidates that exceed the state budget instead of failing.
    #[arg(long)]
    skip_over_budget: bool,
}

impl Limits {
    fn options(&self) -> SolveOptions {
        SolveOptions {
            state_budget: self.state_budget,
            edge_guard: self.edge_guard,
            last_level: match self.last_level {
                LastLevel::Auto => LastLevelMode::Auto,
                LastLevel::Brute => LastLevelMode::Brute,
                LastLevel::RowSplit => LastLevelMode::RowSplit,
            },
            skip_over_budget: self.skip_over_budget,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum LastLevel {
    Auto,
    Brute,
    RowSplit,
}

#[derive(Clone, Copy, ValueEnum)]
enum ParityArg {
    Odd,
    Even,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    width: usize,
    #[arg(long)]
    length: usize,
    #[arg(long, default_value_t = 0)]
    drivers: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 8)]
    b_max: u64,
    /// Budgets are b_max / 2^k with k drawn from k_min..=k_max.
    #[arg(long, default_value_t = 0)]
    k_min: u32,
    #[arg(long, default_value_t = 3)]
    k_max: u32,
    #[arg(long, default_value_t = 0.0)]
    missing_rate: f64,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    io: IoArgs,
    /// Emit only this level's candidate (1-based); needs --parity.
    #[arg(long, requires = "parity")]
    level: Option<usize>,
    #[arg(long, value_enum, requires = "level")]
    parity: Option<ParityArg>,
    /// Print every candidate's revenue as a table on stderr.
    #[arg(long)]
    report: bool,
    #[command(flatten)]
    limits: Limits,
}

#[derive(Serialize)]
struct Record {
    revenue: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    candidate_report: Option<Vec<ReportLine>>,
    wall_time_ms: u64,
}

#[derive(Serialize)]
struct ReportLine {
    candidate: String,
    revenue: String,
    skipped: usize,
}

impl From<&CandidateReport> for ReportLine {
    fn from(c: &CandidateReport) -> Self {
        ReportLine { candidate: c.label.to_string(), revenue: c.revenue.to_canonical_string(), skipped: c.skipped }
    }
}

/// A failure with the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            e if e.is_limit() => 3,
            Error::SelfCheck(_) => 1,
            _ => 2,
        };
        Failure { code, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

type Outcome<T = ()> = std::result::Result<T, Failure>;

fn read(path: &Path) -> Outcome<String> {
    fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn write(path: Option<&Path>, text: &str) -> Outcome {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure { code: 1, message: format!("{}: {e}", p.display()) }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_instance(path: &Path) -> Outcome<GridInstance> {
    parse_instance(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn finish(io: &IoArgs, pricing: Option<&Pricing>, revenue: &Money, report: Option<Vec<ReportLine>>, start: Instant) -> Outcome {
    if let (Some(p), Some(out)) = (pricing, &io.out) {
        write(Some(out), &pricing_to_json(p))?;
    }
    let record = Record {
        revenue: revenue.to_canonical_string(),
        candidate_report: report,
        wall_time_ms: start.elapsed().as_millis() as u64,
    };
    let mut text = serde_json::to_string_pretty(&record).expect("record serializes");
    text.push('\n');
    write(io.record.as_deref(), &text)
}

/// Drivers as `(other endpoint, budget)` around a shared top-row endpoint.
fn rooted_view(g: &GridInstance, root: Option<usize>) -> Outcome<RootedInstance> {
    let root = match root {
        Some(c) => VertexId::new(0, c),
        None => {
            let shared = |x: VertexId| x.row == 0 && g.drivers.iter().all(|d| d.u == x || d.v == x);
            match g.drivers.first() {
                None => VertexId::new(0, 0),
                Some(d) => [d.u, d.v].into_iter().find(|x| shared(*x)).ok_or_else(|| {
                    usage("drivers do not share a top-row endpoint; pass --root")
                })?,
            }
        }
    };
    let mut drivers = Vec::with_capacity(g.drivers.len());
    for d in &g.drivers {
        let other = if d.u == root {
            d.v
        } else if d.v == root {
            d.u
        } else {
            return Err(usage(format!("driver {} -> {} does not end at the root {root}", d.u, d.v)));
        };
        drivers.push((other, d.budget.clone()));
    }
    Ok(RootedInstance::new(g.clone(), root, drivers)?)
}

fn run(cli: Cli) -> Outcome {
    let start = Instant::now();
    match cli.command {
        Command::Gen(a) => {
            let cfg = GenConfig {
                width: a.width,
                length: a.length,
                drivers: a.drivers,
                budgets: BudgetPattern { b_max: a.b_max, k_min: a.k_min, k_max: a.k_max },
                missing_rate: a.missing_rate,
                seed: a.seed,
            };
            write(a.out.as_deref(), &instance_to_json(&generate(&cfg)?))
        }
        Command::Solve(a) => {
            let g = load_instance(&a.io.instance)?;
            let opts = a.limits.options();
            if let (Some(level), Some(parity)) = (a.level, a.parity) {
                let parity = match parity {
                    ParityArg::Odd => Parity::Odd,
                    ParityArg::Even => Parity::Even,
                };
                let (p, r) = solve_candidate(&g, level, parity, &opts)?;
                return finish(&a.io, Some(&p), &r, None, start);
            }
            let sol = solve(&g, &opts)?;
            if a.report {
                eprintln!("{:<16} {:>16} {:>8}", "candidate", "revenue", "skipped");
                for c in &sol.candidates {
                    eprintln!("{:<16} {:>16} {:>8}", c.label.to_string(), c.revenue.to_string(), c.skipped);
                }
                eprintln!("chosen: {} of {} levels", sol.chosen, sol.num_levels);
            }
            let report = a.report.then(|| sol.candidates.iter().map(ReportLine::from).collect());
            finish(&a.io, Some(&sol.pricing), &sol.revenue, report, start)
        }
        Command::Eval { instance, pricing } => {
            let g = load_instance(&instance)?;
            let p = parse_pricing(&read(&pricing)?, &g).map_err(|e| usage(format!("{}: {e}", pricing.display())))?;
            let r = revenue(&g, &p)?;
            let io = IoArgs { instance, out: None, record: None };
            finish(&io, None, &r, None, start)
        }
        Command::Oracle { io, edge_guard } => {
            let g = load_instance(&io.instance)?;
            let set = PriceSet::new(&g.b_max(), g.length(), g.drivers.len().max(1));
            let sol = brute_force_opt(&g, &set, edge_guard)?;
            finish(&io, Some(&sol.pricing), &sol.revenue, None, start)
        }
        Command::Rooted { io, root, limits } => {
            let g = load_instance(&io.instance)?;
            let inst = rooted_view(&g, root)?;
            let sol = solve_rooted(&inst, &inst.price_set(), limits.state_budget)?;
            finish(&io, Some(&sol.pricing), &sol.revenue, None, start)
        }
        Command::Block { io, middle_row, limits } => {
            let g = load_instance(&io.instance)?;
            let (p, r) = match middle_row {
                Some(mid) => {
                    let sub = BlockSubproblem::new(g.clone(), mid)?;
                    let sol = BlockSolver::new(&sub, sub.price_set(), limits.state_budget)
                        .skip_over_budget(limits.skip_over_budget)
                        .solve()?;
                    (sol.best.pricing, sol.best.revenue)
                }
                None => {
                    let o = limits.options();
                    let sol = solve_last_level_block(&g, o.last_level, o.edge_guard, o.state_budget, o.skip_over_budget)?;
                    (sol.pricing, sol.revenue)
                }
            };
            finish(&io, Some(&p), &r, None, start)
        }
        Command::SinglePrice { io } => {
            let g = load_instance(&io.instance)?;
            let s = best_single_price(&g);
            finish(&io, Some(&s.pricing(&g)), &s.revenue, None, start)
        }
        Command::Compress { grid, out } => {
            let w = parse_weighted_grid(&read(&grid)?).map_err(|e| usage(format!("{}: {e}", grid.display())))?;
            let c = compress_grid(&w)?;
            eprintln!(
                "length {} -> {}; {} black rows; {} layers rebuilt",
                w.shape().length,
                c.grid.shape().length,
                c.black_rows.len(),
                c.layers.len()
            );
            write(out.as_deref(), &weighted_grid_to_json(&c.grid))
        }
        Command::Bench { instances, limits } => bench(&instances, &limits),
    }
}

fn bench(paths: &[PathBuf], limits: &Limits) -> Outcome {
    let opts = limits.options();
    println!("{:<28} {:<16} {:>14} {:>10}", "instance", "candidate", "revenue", "opt/rev");
    for path in paths {
        let g = load_instance(path)?;
        let name = path.file_name().map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned());
        let sol = solve(&g, &opts)?;
        let set = PriceSet::new(&g.b_max(), g.length(), g.drivers.len().max(1));
        let opt = match brute_force_opt(&g, &set, opts.edge_guard) {
            Ok(o) => Some(o.revenue),
            Err(e) if e.is_limit() => None,
            Err(e) => return Err(e.into()),
        };
        let ratio = |r: &Money| match &opt {
            None => "-".to_string(),
            Some(o) if r.is_zero() => if o.is_zero() { "1.000".into() } else { "inf".into() },
            Some(o) => format!("{:.3}", o.to_f64() / r.to_f64()),
        };
        for c in &sol.candidates {
            println!("{:<28} {:<16} {:>14} {:>10}", name, c.label.to_string(), c.revenue.to_string(), ratio(&c.revenue));
        }
        println!("{:<28} {:<16} {:>14} {:>10}", name, "chosen", sol.revenue.to_string(), ratio(&sol.revenue));
        if let Some(o) = &opt {
            println!("{:<28} {:<16} {:>14} {:>10}", name, "oracle", o.to_string(), "1.000");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("gridtoll: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("gridtoll: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
