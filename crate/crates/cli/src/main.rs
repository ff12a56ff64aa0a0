//! `picbench`: configures and runs the frozen-plasma benchmark, sweeps
//! worker shapes or supercell sizes, and writes CSV reports.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;

use pic_core::report::{run_report_csv, supercell_sweep_csv, worker_sweep_csv, write_csv};
use pic_core::snapshot::write_snapshot;
use pic_core::{
    setup_frozen_plasma, sweep_supercell, sweep_workers, Error, Interpolation, Layout, Result,
    SimulationConfig,
};

const CONFIG_KEYS_HELP: &str = "\
Config file format: one `key = value` per line, `#` starts a comment,
command-line flags override file values. Keys:
  grid            three extents, `40 40 40` or `40x40x40`
  ppc             macro-particles per cell
  steps           number of time steps
  dt_frac         time step as a fraction of the Courant limit
  c               speed of light (simulation units)
  supercell_size  cells per supercell edge
  layout          naive | supercell
  interp          scalar | chunked
  chunk_size      particles per interpolation chunk
  workers         worker threads per subdomain
  subdomains      number of subdomains (thread pools)
  seed            RNG seed for the particle lattice
  diag_every      diagnostics sampling interval in steps";

/// Frozen-plasma benchmark for the particle-in-cell core.
#[derive(Parser, Debug)]
#[command(name = "picbench", version, after_long_help = CONFIG_KEYS_HELP)]
struct Cli {
    /// Grid extents
    #[arg(long, num_args = 3, value_names = ["NX", "NY", "NZ"])]
    grid: Option<Vec<usize>>,

    /// Macro-particles per cell
    #[arg(long, value_name = "N")]
    ppc: Option<usize>,

    /// Number of time steps
    #[arg(long, value_name = "N")]
    steps: Option<usize>,

    /// Time step as a fraction of the Courant limit [default: 0.5]
    #[arg(long, value_name = "F")]
    dt_frac: Option<f64>,

    /// Cells per supercell edge
    #[arg(long, value_name = "S")]
    supercell_size: Option<usize>,

    /// Particle storage layout
    #[arg(long, value_parser = ["naive", "supercell"])]
    layout: Option<String>,

    /// Field interpolation path
    #[arg(long, value_parser = ["scalar", "chunked"])]
    interp: Option<String>,

    /// Worker threads per subdomain [default: host parallelism]
    #[arg(long, value_name = "N")]
    workers: Option<usize>,

    /// Subdomains (independent thread pools) [default: 1]
    #[arg(long, value_name = "N")]
    subdomains: Option<usize>,

    /// RNG seed for the particle lattice
    #[arg(long, value_name = "N")]
    seed: Option<u64>,

    /// Read defaults from a `key = value` config file (flags still win)
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Write the CSV report here instead of stdout
    #[arg(long, value_name = "PATH")]
    report: Option<PathBuf>,

    /// Sweep a dimension instead of running once: `workers` re-runs the
    /// benchmark over every subdomains×workers factorization of the
    /// configured total parallelism; `supercell` re-runs it for supercell
    /// sizes 1 through 6 plus a naive-layout baseline
    #[arg(long, value_parser = ["workers", "supercell"])]
    sweep: Option<String>,

    /// Diagnostics sampling interval in steps, 0 = final step only
    /// [default: 100]
    #[arg(long, value_name = "K")]
    diag_every: Option<usize>,

    /// Write the final state (fields + particles) to this path
    #[arg(long, value_name = "PATH")]
    snapshot: Option<PathBuf>,
}

/// Option layer collected from the config file; flags override these.
#[derive(Default)]
struct FileSettings {
    grid: Option<[usize; 3]>,
    ppc: Option<usize>,
    steps: Option<usize>,
    dt_frac: Option<f64>,
    c: Option<f64>,
    supercell_size: Option<usize>,
    layout: Option<Layout>,
    interp: Option<Interpolation>,
    chunk_size: Option<usize>,
    workers: Option<usize>,
    subdomains: Option<usize>,
    seed: Option<u64>,
    diag_every: Option<usize>,
}

fn parse_config_file(path: &Path) -> Result<FileSettings> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut settings = FileSettings::default();
    let parse_err = |line: usize, message: String| Error::ConfigFileParse {
        path: path.display().to_string(),
        line,
        message,
    };
    for (index, raw) in text.lines().enumerate() {
        let line_no = index + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(parse_err(line_no, format!("expected `key = value`, got `{raw}`")));
        };
        let (key, value) = (key.trim(), value.trim());
        let bad = |what: &str| parse_err(line_no, format!("bad {what} value `{value}`"));
        match key {
            "grid" => {
                let parts: Vec<&str> = value
                    .split(|ch: char| ch == 'x' || ch.is_whitespace())
                    .filter(|s| !s.is_empty())
                    .collect();
                let dims: Vec<usize> =
                    parts.iter().filter_map(|p| p.parse().ok()).collect();
                if dims.len() != 3 || parts.len() != 3 {
                    return Err(bad("grid"));
                }
                settings.grid = Some([dims[0], dims[1], dims[2]]);
            }
            "ppc" => settings.ppc = Some(value.parse().map_err(|_| bad("ppc"))?),
            "steps" => settings.steps = Some(value.parse().map_err(|_| bad("steps"))?),
            "dt_frac" => settings.dt_frac = Some(value.parse().map_err(|_| bad("dt_frac"))?),
            "c" => settings.c = Some(value.parse().map_err(|_| bad("c"))?),
            "supercell_size" => {
                settings.supercell_size = Some(value.parse().map_err(|_| bad("supercell_size"))?)
            }
            "layout" => {
                settings.layout =
                    Some(Layout::parse(value).ok_or_else(|| bad("layout"))?)
            }
            "interp" => {
                settings.interp =
                    Some(Interpolation::parse(value).ok_or_else(|| bad("interp"))?)
            }
            "chunk_size" => {
                settings.chunk_size = Some(value.parse().map_err(|_| bad("chunk_size"))?)
            }
            "workers" => settings.workers = Some(value.parse().map_err(|_| bad("workers"))?),
            "subdomains" => {
                settings.subdomains = Some(value.parse().map_err(|_| bad("subdomains"))?)
            }
            "seed" => settings.seed = Some(value.parse().map_err(|_| bad("seed"))?),
            "diag_every" => {
                settings.diag_every = Some(value.parse().map_err(|_| bad("diag_every"))?)
            }
            other => return Err(parse_err(line_no, format!("unknown key `{other}`"))),
        }
    }
    Ok(settings)
}

/// Merges defaults, config file and flags (in increasing precedence) into
/// a validated configuration plus the diagnostics interval.
fn build_config(cli: &Cli) -> Result<(SimulationConfig, usize)> {
    let file = match &cli.config {
        Some(path) => parse_config_file(path)?,
        None => FileSettings::default(),
    };

    let mut config = SimulationConfig::benchmark_default();
    config.workers = std::thread::available_parallelism().map_or(1, |n| n.get());

    if let Some(dims) = file.grid {
        config.dims = dims;
    }
    if let Some(grid) = &cli.grid {
        config.dims = [grid[0], grid[1], grid[2]];
    }
    set(&mut config.particles_per_cell, file.ppc, cli.ppc);
    set(&mut config.steps, file.steps, cli.steps);
    set(&mut config.c, file.c, None);
    set(&mut config.supercell_size, file.supercell_size, cli.supercell_size);
    set(&mut config.workers, file.workers, cli.workers);
    set(&mut config.subdomains, file.subdomains, cli.subdomains);
    set(&mut config.seed, file.seed, cli.seed);
    if let Some(chunk) = file.chunk_size {
        config.chunk_size = chunk;
    }
    let layout_flag = cli.layout.as_deref().map(|s| Layout::parse(s).unwrap());
    set_opt(&mut config.layout, file.layout, layout_flag);
    let interp_flag = cli.interp.as_deref().map(|s| Interpolation::parse(s).unwrap());
    set_opt(&mut config.interpolation, file.interp, interp_flag);

    let dt_frac = cli.dt_frac.or(file.dt_frac).unwrap_or(0.5);
    config.dt = dt_frac * config.cfl_limit();

    let diag_every = cli.diag_every.or(file.diag_every).unwrap_or(100);

    config.validate()?;
    Ok((config, diag_every))
}

fn set<T: Copy>(slot: &mut T, file: Option<T>, flag: Option<T>) {
    if let Some(v) = flag.or(file) {
        *slot = v;
    }
}

fn set_opt<T>(slot: &mut T, file: Option<T>, flag: Option<T>) {
    if let Some(v) = flag.or(file) {
        *slot = v;
    }
}

/// Every (subdomains, workers) factorization of the configured total
/// parallelism, in ascending subdomain order: total 8 gives 1x8, 2x4,
/// 4x2, 8x1.
fn parallelism_shapes(total: usize) -> Vec<(usize, usize)> {
    (1..=total)
        .filter(|s| total % s == 0)
        .map(|s| (s, total / s))
        .collect()
}

fn emit(cli: &Cli, csv: String) -> Result<()> {
    match &cli.report {
        Some(path) => write_csv(path, &csv),
        None => {
            print!("{csv}");
            Ok(())
        }
    }
}

fn execute(cli: &Cli) -> Result<()> {
    let (config, diag_every) = build_config(cli)?;
    match cli.sweep.as_deref() {
        None => {
            let mut sim = setup_frozen_plasma(&config)?;
            let report = sim.run(diag_every)?;
            emit(cli, run_report_csv(&config, &report))?;
            if let Some(path) = &cli.snapshot {
                write_snapshot(path, &sim.grid, sim.iter_particles())?;
            }
            Ok(())
        }
        Some("workers") => {
            let shapes = parallelism_shapes(config.subdomains * config.workers);
            let rows = sweep_workers(&config, &shapes)?;
            emit(cli, worker_sweep_csv(&config, &rows))
        }
        Some("supercell") => {
            let sweep = sweep_supercell(&config, &[1, 2, 3, 4, 5, 6])?;
            emit(cli, supercell_sweep_csv(&config, &sweep))
        }
        Some(other) => unreachable!("clap rejects sweep kind {other}"),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
