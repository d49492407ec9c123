//! Command-line front end: run scenarios, convergence studies, stability and
//! accuracy reports, and operation-count reports, all emitting CSV.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use sdrkdg::error::{Result, SolverError};
use sdrkdg::harness::{
    cfl_table, convergence_study, flop_report, list_scenarios, list_schemes, prediction_lambdas,
    prediction_table, resolve_tableau, run_scenario, write_csv, InitKind, RouteKind, RunConfig,
    ERROR_REPORT_HEADER,
};
use sdrkdg::tableau::GenericVariant;

#[derive(Parser)]
#[command(name = "sdrkdg", about = "Runge-Kutta discontinuous Galerkin solver with stage-dependent polynomial spaces", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one scenario and write solution snapshots.
    Run(CommonArgs),
    /// Errors and observed orders across a mesh refinement ladder.
    Converge(ConvergeArgs),
    /// Stability limits and predicted-vs-measured advection errors.
    Vn(VnArgs),
    /// Measured reduced-vs-full operation ratios.
    Flops(OutArg),
    /// List the built-in scenarios.
    ListScenarios,
    /// List the built-in schemes.
    ListSchemes,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// JSON config file; flags override its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    scenario: Option<String>,
    #[arg(long)]
    scheme: Option<String>,
    /// Polynomial degree (default: scheme order minus one).
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    cfl: Option<f64>,
    /// Mesh size: N for 1D, NXxNY for 2D.
    #[arg(long)]
    mesh: Option<String>,
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    t_end: Option<f64>,
    /// TVB limiter constant override.
    #[arg(long)]
    tvb_m: Option<f64>,
    /// Disable the scenario's limiter.
    #[arg(long)]
    no_limiter: bool,
    /// Initial data path: projected or interpolated.
    #[arg(long)]
    init: Option<String>,
    /// Step routine: shu_osher or butcher.
    #[arg(long)]
    route: Option<String>,
    /// Random 1D cell-size perturbation fraction.
    #[arg(long)]
    perturb: Option<f64>,
    /// Free abscissa for the generic2/generic3 families.
    #[arg(long)]
    alpha: Option<f64>,
    /// Variant for the generic families: v1..v4.
    #[arg(long)]
    variant: Option<String>,
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct ConvergeArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Comma-separated cell counts, e.g. 20,40,80,160.
    #[arg(long)]
    meshes: String,
}

#[derive(Args)]
struct VnArgs {
    /// Comma-separated scheme names for prediction tables (default: CFL
    /// table only).
    #[arg(long)]
    schemes: Option<String>,
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct OutArg {
    #[arg(long)]
    out: Option<String>,
}

fn parse_init(s: &str) -> Result<InitKind> {
    match s {
        "projected" => Ok(InitKind::Projected),
        "interpolated" => Ok(InitKind::Interpolated),
        _ => Err(SolverError::Config(format!(
            "init '{s}' is not 'projected' or 'interpolated'"
        ))),
    }
}

fn parse_route(s: &str) -> Result<RouteKind> {
    match s {
        "shu_osher" => Ok(RouteKind::ShuOsher),
        "butcher" => Ok(RouteKind::Butcher),
        _ => Err(SolverError::Config(format!(
            "route '{s}' is not 'shu_osher' or 'butcher'"
        ))),
    }
}

fn parse_variant(s: &str) -> Result<GenericVariant> {
    match s {
        "v1" => Ok(GenericVariant::V1),
        "v2" => Ok(GenericVariant::V2),
        "v3" => Ok(GenericVariant::V3),
        "v4" => Ok(GenericVariant::V4),
        _ => Err(SolverError::Config(format!("variant '{s}' is not v1..v4"))),
    }
}

fn parse_mesh(s: &str, cfg: &mut RunConfig) -> Result<()> {
    let bad = || SolverError::Config(format!("mesh '{s}' is not N or NXxNY"));
    if let Some((nx, ny)) = s.split_once('x') {
        cfg.nx = Some(nx.parse().map_err(|_| bad())?);
        cfg.ny = Some(ny.parse().map_err(|_| bad())?);
    } else {
        cfg.n = Some(s.parse().map_err(|_| bad())?);
    }
    Ok(())
}

fn build_config(args: &CommonArgs) -> Result<RunConfig> {
    let mut cfg = match &args.config {
        Some(path) => RunConfig::from_json(&std::fs::read_to_string(path)?)?,
        None => RunConfig::default(),
    };
    if let Some(v) = &args.scenario {
        cfg.scenario = v.clone();
    }
    if let Some(v) = &args.scheme {
        cfg.scheme = v.clone();
    }
    if let Some(v) = args.k {
        cfg.k = Some(v);
    }
    if let Some(v) = args.cfl {
        cfg.cfl = Some(v);
    }
    if let Some(v) = &args.mesh {
        parse_mesh(v, &mut cfg)?;
    }
    if let Some(v) = &args.out {
        cfg.out = Some(v.clone());
    }
    if let Some(v) = args.seed {
        cfg.seed = v;
    }
    if let Some(v) = args.t_end {
        cfg.t_end = Some(v);
    }
    if let Some(v) = args.tvb_m {
        cfg.tvb_m = Some(v);
    }
    if args.no_limiter {
        cfg.no_limiter = true;
    }
    if let Some(v) = &args.init {
        cfg.init = parse_init(v)?;
    }
    if let Some(v) = &args.route {
        cfg.route = parse_route(v)?;
    }
    if let Some(v) = args.perturb {
        cfg.perturb = v;
    }
    if let Some(v) = args.alpha {
        cfg.alpha = Some(v);
    }
    if let Some(v) = &args.variant {
        cfg.variant = Some(parse_variant(v)?);
    }
    if let Some(v) = args.workers {
        cfg.workers = v;
    }
    Ok(cfg)
}

fn fmt(v: f64) -> String {
    format!("{v:e}")
}

fn cmd_run(args: &CommonArgs) -> Result<()> {
    let cfg = build_config(args)?;
    let summary = run_scenario(&cfg)?;
    println!("steps: {}", summary.n_steps);
    println!("t_final: {}", summary.t_final);
    if let Some(n) = summary.norms {
        println!("l1: {}", fmt(n.l1));
        println!("l2: {}", fmt(n.l2));
        println!("linf: {}", fmt(n.linf));
    }
    if let Some(e) = summary.eps_star {
        println!("eps_star: {}", fmt(e));
    }
    for f in &summary.files {
        println!("wrote: {}", f.display());
    }
    Ok(())
}

fn cmd_converge(args: &ConvergeArgs) -> Result<()> {
    let cfg = build_config(&args.common)?;
    let meshes: Vec<usize> = args
        .meshes
        .split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| SolverError::Config(format!("bad mesh size '{s}'")))
        })
        .collect::<Result<_>>()?;
    let report = convergence_study(&cfg, &meshes)?;
    println!("{ERROR_REPORT_HEADER}");
    for row in report.to_rows() {
        println!("{row}");
    }
    Ok(())
}

fn cmd_vn(args: &VnArgs) -> Result<()> {
    let workers = args.workers.unwrap_or_else(|| RunConfig::default().workers);
    let table = cfl_table(workers)?;
    let cfl_rows: Vec<String> = table
        .iter()
        .map(|r| format!("{},{},{}", r.scheme, r.k, fmt(r.lambda0)))
        .collect();
    println!("scheme,k,lambda0");
    for row in &cfl_rows {
        println!("{row}");
    }
    if let Some(out) = &args.out {
        write_csv(
            &PathBuf::from(out).join("vn_cfl.csv"),
            &["sdrkdg vn".into()],
            "scheme,k,lambda0",
            &cfl_rows,
        )?;
    }
    let Some(schemes) = &args.schemes else { return Ok(()) };
    for name in schemes.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let cfg = RunConfig { scheme: name.into(), ..RunConfig::default() };
        let tab = resolve_tableau(&cfg)?;
        let k = tab.order - 1;
        let lambdas = prediction_lambdas(&tab, k)?;
        let rows = prediction_table(&tab, k, &lambdas, workers)?;
        let text_rows: Vec<String> = rows
            .iter()
            .map(|r| format!("{},{},{},{}", fmt(r.lambda), r.n, fmt(r.predicted), fmt(r.numeric)))
            .collect();
        println!("# scheme {name} k {k}");
        println!("lambda,n,predicted,numeric");
        for row in &text_rows {
            println!("{row}");
        }
        if let Some(out) = &args.out {
            write_csv(
                &PathBuf::from(out).join(format!("vn_prediction_{name}.csv")),
                &[format!("sdrkdg vn scheme={name} k={k}")],
                "lambda,n,predicted,numeric",
                &text_rows,
            )?;
        }
    }
    Ok(())
}

fn cmd_flops(args: &OutArg) -> Result<()> {
    let rows = flop_report()?;
    let text_rows: Vec<String> = rows
        .iter()
        .map(|r| format!("{},{},{}", r.label, fmt(r.measured), fmt(r.theoretical)))
        .collect();
    println!("label,measured,theoretical");
    for row in &text_rows {
        println!("{row}");
    }
    if let Some(out) = &args.out {
        write_csv(
            &PathBuf::from(out).join("flops.csv"),
            &["sdrkdg flops".into()],
            "label,measured,theoretical",
            &text_rows,
        )?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.cmd {
        Cmd::Run(args) => cmd_run(args),
        Cmd::Converge(args) => cmd_converge(args),
        Cmd::Vn(args) => cmd_vn(args),
        Cmd::Flops(args) => cmd_flops(args),
        Cmd::ListScenarios => {
            for name in list_scenarios() {
                println!("{name}");
            }
            Ok(())
        }
        Cmd::ListSchemes => {
            for name in list_schemes() {
                println!("{name}");
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
