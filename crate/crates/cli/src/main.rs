use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use vaxfront_core::frontier::{anti_critical_cost, FrontierCurve};
use vaxfront_core::independent::eradication_cost_with;
use vaxfront_core::structure::frobenius_decompose_with;
use vaxfront_core::verify::{self, Fixtures};
use vaxfront_core::{
    anti_pareto_frontier, basic_reproduction_number, classify, classify_convexity,
    effective_re, feasible_region_sample, grid_to_model, load_model, pareto_frontier,
    probe_convexity, CostFunction, Error, FrontierOptions, GridKernelSpec, MetapopModel,
    Strategy,
};

const EXIT_VERIFY: u8 = 1;
const EXIT_INPUT: u8 = 2;

#[derive(Parser)]
#[command(name = "vaxfront", version, about = "Vaccination frontiers for metapopulation models")]
struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Number of cost-grid intervals for frontier sweeps.
    #[arg(long, global = true, default_value_t = 64)]
    resolution: usize,
    /// Worker threads (0 = automatic). Overrides VAXFRONT_THREADS.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ModelArgs {
    /// Model JSON (`n`, `weights`, `matrix`) or grid JSON (`grid_points`, `samples`).
    #[arg(long)]
    model: PathBuf,
    /// `uniform`, or per-group unit costs such as `affine:1,2,0.5`.
    #[arg(long, default_value = "uniform")]
    cost: String,
    /// Write the result here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Pareto,
    Anti,
    Both,
}

#[derive(Subcommand)]
enum Command {
    /// R_e, R_0 and cost of one strategy.
    Compute {
        #[command(flatten)]
        io: ModelArgs,
        /// Comma-separated strategy, e.g. `1,1,0.5`.
        #[arg(long, conflicts_with = "eta_file")]
        eta: Option<String>,
        /// File holding the strategy as a JSON array or comma-separated text.
        #[arg(long)]
        eta_file: Option<PathBuf>,
    },
    /// Frobenius decomposition and irreducibility classes.
    Decompose {
        #[command(flatten)]
        io: ModelArgs,
        /// Entries at or below this value count as zero.
        #[arg(long, default_value_t = 0.0)]
        threshold: f64,
    },
    /// Convexity verdict, with an optional randomized probe.
    Classify {
        #[command(flatten)]
        io: ModelArgs,
        /// Number of midpoint trials for the probe (0 skips it).
        #[arg(long, default_value_t = 0)]
        trials: usize,
    },
    /// Eradication cost c⋆ and the anti-Pareto threshold c^⋆.
    Cstar {
        #[command(flatten)]
        io: ModelArgs,
        /// Lift the 40-group budget of the exact independent-set search.
        #[arg(long)]
        force: bool,
    },
    /// Pareto and/or anti-Pareto frontier as CSV.
    Frontier {
        #[command(flatten)]
        io: ModelArgs,
        #[arg(long, value_enum, default_value_t = Kind::Both)]
        kind: Kind,
        /// Emit one JSON document with feasible samples and both frontiers.
        #[arg(long)]
        plot_data: bool,
        /// Random samples of the feasible region in plot-data mode.
        #[arg(long, default_value_t = 2000)]
        samples: usize,
        /// Local-search starts per budget.
        #[arg(long, default_value_t = 16)]
        starts: usize,
        /// Allow gradient ascent alone beyond the vertex-enumeration budget.
        #[arg(long)]
        heuristic: bool,
        #[arg(long)]
        force: bool,
    },
    /// (cost, loss) outcomes of sampled strategies.
    Sample {
        #[command(flatten)]
        io: ModelArgs,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
    /// Run the acceptance table on the bundled fixtures.
    VerifyPaper {
        /// Comma-separated criterion keys or numbers, e.g. `eigen,3`.
        #[arg(long)]
        only: Option<String>,
        /// Print a JSON report instead of text lines.
        #[arg(long)]
        json: bool,
        /// Use deliberately perturbed fixtures (harness self-test).
        #[arg(long, hide = true)]
        perturbed: bool,
    },
}

/// Failure with the exit code to report.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure { code: EXIT_INPUT, message: e.to_string() }
    }
}

fn input_error(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_INPUT, message: message.into() }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(msg) = configure_threads(cli.threads) {
        eprintln!("error: {msg}");
        return ExitCode::from(EXIT_INPUT);
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if !f.message.is_empty() {
                eprintln!("error: {}", f.message);
            }
            ExitCode::from(f.code)
        }
    }
}

fn configure_threads(flag: Option<usize>) -> Result<(), String> {
    let n = match flag {
        Some(n) => n,
        None => match std::env::var("VAXFRONT_THREADS") {
            Ok(v) if !v.trim().is_empty() => v
                .trim()
                .parse()
                .map_err(|_| format!("VAXFRONT_THREADS must be a non-negative integer, got '{v}'"))?,
            _ => 0,
        },
    };
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| e.to_string())?;
    }
    Ok(())
}

fn run(cli: &Cli) -> CliResult<()> {
    let (seed, resolution) = (cli.seed, cli.resolution);
    match &cli.command {
        Command::Compute { io, eta, eta_file } => {
            let model = read_model(&io.model)?;
            let cost = parse_cost(&io.cost)?;
            let eta = match (eta, eta_file) {
                (Some(s), _) => parse_eta(s)?,
                (None, Some(p)) => parse_eta(&read_text(p)?)?,
                (None, None) => return Err(input_error("give the strategy with --eta or --eta-file")),
            };
            if eta.len() != model.n() {
                return Err(input_error(format!(
                    "strategy has {} entries but the model has {} groups",
                    eta.len(),
                    model.n()
                )));
            }
            let eta = Strategy::new(eta)?;
            let out = json!({
                "re": effective_re(&model, &eta)?,
                "r0": basic_reproduction_number(&model)?,
                "cost": cost.evaluate(&model, &eta)?,
                "seed": seed,
                "resolution": resolution,
            });
            emit_json(io.out.as_deref(), &out)
        }
        Command::Decompose { io, threshold } => {
            let model = read_model(&io.model)?;
            if !(threshold.is_finite() && *threshold >= 0.0) {
                return Err(input_error("threshold must be finite and non-negative"));
            }
            let out = json!({
                "decomposition": frobenius_decompose_with(&model, *threshold)?,
                "classification": classify(&model)?,
                "threshold": threshold,
                "seed": seed,
                "resolution": resolution,
            });
            emit_json(io.out.as_deref(), &out)
        }
        Command::Classify { io, trials } => {
            let model = read_model(&io.model)?;
            let probe = if *trials > 0 {
                Some(probe_convexity(&model, *trials, seed)?)
            } else {
                None
            };
            let out = json!({
                "convexity": classify_convexity(&model)?,
                "probe": probe,
                "seed": seed,
                "resolution": resolution,
            });
            emit_json(io.out.as_deref(), &out)
        }
        Command::Cstar { io, force } => {
            let model = read_model(&io.model)?;
            let cost = parse_cost(&io.cost)?;
            let e = eradication_cost_with(&model, &cost, *force)?;
            let (c_anti, s_anti) = anti_critical_cost(&model, &cost)?;
            let out = json!({
                "cstar": e.cstar,
                "exact": e.exact,
                "set": e.set,
                "strategy": e.strategy,
                "c_anti": c_anti,
                "anti_strategy": s_anti,
                "c_max": cost.c_max(&model)?,
                "seed": seed,
                "resolution": resolution,
            });
            emit_json(io.out.as_deref(), &out)
        }
        Command::Frontier { io, kind, plot_data, samples, starts, heuristic, force } => {
            let model = read_model(&io.model)?;
            let cost = parse_cost(&io.cost)?;
            let opts = FrontierOptions {
                resolution,
                starts: *starts,
                seed,
                heuristic: *heuristic,
                force: *force,
                ..FrontierOptions::default()
            };
            let pareto = match kind {
                Kind::Pareto | Kind::Both => Some(pareto_frontier(&model, &cost, &opts)?),
                Kind::Anti => None,
            };
            let anti = match kind {
                Kind::Anti | Kind::Both => Some(anti_pareto_frontier(&model, &cost, &opts)?),
                Kind::Pareto => None,
            };
            if *plot_data {
                let feasible = feasible_region_sample(&model, &cost, (*samples).max(1), seed)?;
                let out = json!({
                    "seed": seed,
                    "resolution": resolution,
                    "feasible": feasible,
                    "pareto": pareto,
                    "anti": anti,
                });
                return emit_json(io.out.as_deref(), &out);
            }
            let both = matches!(kind, Kind::Both);
            let mut csv = format!("# seed={seed} resolution={resolution} cost={}\n", cost.label());
            csv.push_str(if both { "cost,loss,strategy,kind\n" } else { "cost,loss,strategy\n" });
            for (name, curve) in [("pareto", &pareto), ("anti", &anti)] {
                if let Some(c) = curve {
                    write_curve(&mut csv, c, both.then_some(name));
                }
            }
            emit_text(io.out.as_deref(), &csv)
        }
        Command::Sample { io, samples } => {
            let model = read_model(&io.model)?;
            let cost = parse_cost(&io.cost)?;
            if *samples == 0 {
                return Err(input_error("--samples must be at least 1"));
            }
            let points = feasible_region_sample(&model, &cost, *samples, seed)?;
            let out = json!({
                "seed": seed,
                "resolution": resolution,
                "samples": samples,
                "points": points,
            });
            emit_json(io.out.as_deref(), &out)
        }
        Command::VerifyPaper { only, json, perturbed } => {
            let criteria = verify::select(only.as_deref()).map_err(input_error)?;
            let fx = if *perturbed { Fixtures::perturbed() } else { Fixtures::bundled() };
            let mut failed = 0;
            let mut outcomes = Vec::with_capacity(criteria.len());
            for c in &criteria {
                let o = verify::run_criterion(c, &fx, seed);
                failed += usize::from(!o.pass);
                if !json {
                    println!("{}", o.line());
                }
                outcomes.push(o);
            }
            if *json {
                print_json(&json!({ "seed": seed, "resolution": resolution, "criteria": outcomes }))?;
            } else {
                println!("{} passed, {failed} failed", outcomes.len() - failed);
            }
            if failed > 0 {
                return Err(Failure { code: EXIT_VERIFY, message: String::new() });
            }
            Ok(())
        }
    }
}

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn read_model(path: &Path) -> CliResult<MetapopModel> {
    let text = read_text(path)?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    if value.get("grid_points").is_some() {
        return Ok(grid_to_model(&GridKernelSpec::from_json_str(&text)?)?);
    }
    load_model(path).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn parse_list(s: &str) -> CliResult<Vec<f64>> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().map_err(|_| input_error(format!("not a number: '{t}'"))))
        .collect()
}

fn parse_eta(s: &str) -> CliResult<Vec<f64>> {
    let t = s.trim();
    if t.starts_with('[') {
        return serde_json::from_str(t).map_err(|e| input_error(format!("strategy: {e}")));
    }
    parse_list(t)
}

fn parse_cost(s: &str) -> CliResult<CostFunction> {
    let t = s.trim();
    if t.eq_ignore_ascii_case("uniform") {
        return Ok(CostFunction::Uniform);
    }
    let list = t.strip_prefix("affine:").unwrap_or(t);
    Ok(CostFunction::affine(parse_list(list)?)?)
}

/// Decimal with at most nine significant digits.
fn sig9(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    let prec = (8 - mag).max(0) as usize;
    let s = format!("{x:.prec$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn write_curve(out: &mut String, c: &FrontierCurve, kind: Option<&str>) {
    for p in &c.points {
        let eta: Vec<String> = p.strategy.values().iter().map(|&v| sig9(v)).collect();
        let _ = write!(out, "{},{},{}", sig9(p.cost), sig9(p.loss), eta.join(";"));
        if let Some(k) = kind {
            let _ = write!(out, ",{k}");
        }
        out.push('\n');
    }
}

fn print_json<T: Serialize>(v: &T) -> CliResult<()> {
    let s = serde_json::to_string_pretty(v).map_err(|e| input_error(e.to_string()))?;
    println!("{s}");
    Ok(())
}

fn emit_json<T: Serialize>(path: Option<&Path>, v: &T) -> CliResult<()> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| input_error(e.to_string()))?;
    s.push('\n');
    emit_text(path, &s)
}

fn emit_text(path: Option<&Path>, s: &str) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, s).map_err(|e| input_error(format!("{}: {e}", p.display()))),
        None => {
            print!("{s}");
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_digits() {
        assert_eq!(sig9(0.25), "0.25");
        assert_eq!(sig9(1.0), "1");
        assert_eq!(sig9(2f64.sqrt()), "1.41421356");
        assert_eq!(sig9(123456.789012), "123456.789");
        assert_eq!(sig9(0.0), "0");
    }

    #[test]
    fn cost_specs() {
        assert_eq!(parse_cost("uniform").ok().unwrap(), CostFunction::Uniform);
        assert_eq!(
            parse_cost("affine:1,2").ok().unwrap(),
            CostFunction::Affine(vec![1.0, 2.0])
        );
        assert!(parse_cost("affine:1,-2").is_err());
        assert!(parse_cost("cheap").is_err());
    }

    #[test]
    fn eta_formats() {
        assert_eq!(parse_eta("1, 0.5,0").ok().unwrap(), vec![1.0, 0.5, 0.0]);
        assert_eq!(parse_eta("[1, 0]").ok().unwrap(), vec![1.0, 0.0]);
        assert!(parse_eta("1,x").is_err());
    }
}
