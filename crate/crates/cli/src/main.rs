//! Command-line front end: simulation runs, convergence studies, slice and
//! contour extraction from field files, traveling-wave queries, and
//! bifurcation sweeps. Exit codes: 0 success, 1 config error, 2 solver
//! error, 3 I/O error.

use clap::{Args, Parser, Subcommand};
use mble_core::config::{parse_config_with_overrides, RunConfig};
use mble_core::driver::{convergence_study, run_simulation, study_csv};
use mble_core::error::Error;
use mble_core::output::{
    contour_csv, default_levels, fmt_csv, slice_csv, write_text, FieldGrid,
};
use mble_core::problems::mbl_flux_1d;
use mble_core::tw::{classify_region, DEFAULT_EPSILON};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(name = "mble", version, about = "DG solver for the modified Buckley-Leverett equation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a configured simulation and write its artifacts.
    Run(ConfigArgs),
    /// Run the config's refinement list and tabulate L2 errors and orders.
    Study(ConfigArgs),
    /// Extract a 1D line from a field CSV at a fixed coordinate.
    Slice(SliceArgs),
    /// Extract marching-squares contour segments from a field CSV.
    Contour(ContourArgs),
    /// Query the traveling-wave oracle for one (u_B, tau, u0) triple.
    Twinfo(TwinfoArgs),
    /// Sweep (u_B, tau) and tabulate regions and wave levels.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct ConfigArgs {
    /// Path to a key = value config file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides the config's out_dir.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Config override, repeatable.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Args)]
struct SliceArgs {
    /// Field CSV produced by `run`.
    #[arg(long)]
    field: PathBuf,
    /// Axis of the fixed coordinate.
    #[arg(long)]
    axis: String,
    /// Fixed coordinate value.
    #[arg(long)]
    coord: f64,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct ContourArgs {
    /// Field CSV produced by `run`.
    #[arg(long)]
    field: PathBuf,
    /// Number of equispaced levels in [0, 1].
    #[arg(long, default_value_t = 20)]
    levels: usize,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct TwinfoArgs {
    #[arg(long)]
    tau: f64,
    /// Block height u_B.
    #[arg(long)]
    u_b: f64,
    /// Background state.
    #[arg(long, default_value_t = 0.0)]
    u0: f64,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    epsilon: f64,
}

#[derive(Args)]
struct SweepArgs {
    /// Comma-separated tau values.
    #[arg(long, default_value = "0.2,0.5,1,2,5,10")]
    tau_list: String,
    /// Comma-separated u_B values.
    #[arg(long, default_value = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9")]
    ub_list: String,
    #[arg(long, default_value_t = 0.0)]
    u0: f64,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are successful exits.
            if e.use_stderr() {
                eprint!("{e}");
                std::process::exit(1);
            }
            print!("{e}");
            std::process::exit(0);
        }
    };
    let result = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Study(args) => cmd_study(args),
        Command::Slice(args) => cmd_slice(args),
        Command::Contour(args) => cmd_contour(args),
        Command::Twinfo(args) => cmd_twinfo(args),
        Command::Sweep(args) => cmd_sweep(args),
    };
    match result {
        Ok(()) => {}
        Err(e) => {
            eprintln!("{e}");
            let code = match e {
                Error::Config(_) => 1,
                Error::Solver(_) => 2,
                Error::Io(_) => 3,
            };
            std::process::exit(code);
        }
    }
}

fn load_config(args: &ConfigArgs) -> Result<RunConfig, Error> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| Error::Io(format!("{}: {e}", args.config.display())))?;
    let mut config = parse_config_with_overrides(&text, &args.overrides)?;
    if let Some(out) = &args.out {
        config.out_dir = out.display().to_string();
    }
    Ok(config)
}

fn cmd_run(args: ConfigArgs) -> Result<(), Error> {
    let config = load_config(&args)?;
    let (run, files) = run_simulation(&config)?;
    println!(
        "completed {} steps to t = {} ({} troubled-cell flags, {:.3}s)",
        run.stats.steps, config.t_end, run.stats.troubled_cells_total, run.wall_seconds
    );
    for f in files {
        println!("wrote {}", f.display());
    }
    Ok(())
}

fn cmd_study(args: ConfigArgs) -> Result<(), Error> {
    let config = load_config(&args)?;
    let rows = convergence_study(&config)?;
    let csv = study_csv(&rows);
    let path = Path::new(&config.out_dir).join("study.csv");
    write_text(&path, &csv)?;
    println!("k,n,limiter,error,order");
    for r in &rows {
        let order = r
            .order
            .map(|o| format!("{o:.3}"))
            .unwrap_or_else(|| "-".to_string());
        println!("{},{},{},{:.4e},{}", r.k, r.n, r.limiter, r.error, order);
    }
    println!("wrote {}", path.display());
    Ok(())
}

fn read_grid(path: &Path) -> Result<FieldGrid, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    FieldGrid::from_csv(&text)
}

fn cmd_slice(args: SliceArgs) -> Result<(), Error> {
    let axis = match args.axis.as_str() {
        "x" => 0,
        "y" => 1,
        other => return Err(Error::config(format!("axis must be x or y, got '{other}'"))),
    };
    let grid = read_grid(&args.field)?;
    let csv = slice_csv(&grid, axis, args.coord)?;
    let path = args.out.join("slice.csv");
    write_text(&path, &csv)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_contour(args: ContourArgs) -> Result<(), Error> {
    if args.levels == 0 {
        return Err(Error::config("levels must be positive"));
    }
    let grid = read_grid(&args.field)?;
    let csv = contour_csv(&grid, &default_levels(args.levels))?;
    let path = args.out.join("contour.csv");
    write_text(&path, &csv)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_twinfo(args: TwinfoArgs) -> Result<(), Error> {
    if !(args.epsilon > 0.0) {
        return Err(Error::config("epsilon must be > 0"));
    }
    let flux = mbl_flux_1d();
    let r = classify_region(args.u_b, args.tau, args.u0, &flux)?;
    println!("region = {}", r.region);
    println!("u_alpha = {}", r.u_alpha);
    match r.ubar {
        Some(v) => println!("ubar = {v}"),
        None => println!("ubar = none"),
    }
    match r.u_lower {
        Some(v) => println!("u_lower = {v}"),
        None => println!("u_lower = none"),
    }
    for (name, value) in &r.speeds {
        println!("speed.{name} = {value}");
    }
    Ok(())
}

fn parse_list(text: &str, what: &str) -> Result<Vec<f64>, Error> {
    text.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| Error::config(format!("bad {what} entry '{p}'")))
        })
        .collect()
}

fn cmd_sweep(args: SweepArgs) -> Result<(), Error> {
    let taus = parse_list(&args.tau_list, "tau")?;
    let ubs = parse_list(&args.ub_list, "u_B")?;
    let flux = mbl_flux_1d();
    let mut csv = String::from("u_b,tau,region,ubar,u_lower,u_alpha\n");
    for &tau in &taus {
        for &ub in &ubs {
            if ub <= args.u0 {
                continue;
            }
            let r = classify_region(ub, tau, args.u0, &flux)?;
            let opt = |v: Option<f64>| v.map(fmt_csv).unwrap_or_default();
            let _ = writeln!(
                csv,
                "{},{},{},{},{},{}",
                fmt_csv(ub),
                fmt_csv(tau),
                r.region,
                opt(r.ubar),
                opt(r.u_lower),
                fmt_csv(r.u_alpha)
            );
        }
    }
    let path = args.out.join("sweep.csv");
    write_text(&path, &csv)?;
    println!("wrote {}", path.display());
    Ok(())
}
