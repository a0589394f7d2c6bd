use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use dicke_bench::acceptance::{self, AcceptanceOptions, CRITERIA};
use dicke_bench::config::{
    hamiltonian_name, parse_hamiltonian, parse_n_list, parse_noise, AxisPolicy, PGrid, ProbeChoice,
    RunConfig,
};
use dicke_bench::error::{BenchError, BenchResult};
use dicke_bench::figures::{resolve_probe, run_figure, with_threads};
use dicke_bench::output::{encode, Format};
use dicke_bench::reference::TABLE1_TOLERANCE;
use dicke_bench::tables::{self, Table, TableFormat};
use dicke_qfi::capacity::set_full_space_cap;
use dicke_qfi::operators::HamiltonianSpec;
use dicke_qfi::optimize::AxisSearchConfig;
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "dqfi",
    version,
    about = "QFI benchmarks for Dicke-superposition probes"
)]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Largest N for full 2^N-dimensional computations.
    #[arg(long, global = true)]
    full_cap: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct TableOpts {
    /// text, csv or json.
    #[arg(long, default_value = "text")]
    format: String,
    /// Write to a file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Best Dicke pair under the linear generator, N = 3..8.
    Table1 {
        #[arg(long, default_value_t = TABLE1_TOLERANCE)]
        tolerance: f64,
        #[command(flatten)]
        opts: TableOpts,
    },
    /// Closed-form extrema of the two-body generators.
    Table2 {
        /// N values, e.g. `2..12` or `4,6,8`.
        #[arg(long, default_value = "2..12")]
        n: String,
        #[command(flatten)]
        opts: TableOpts,
    },
    /// Separable bounds and nonlinear sensitivities at N = 8.
    Table3 {
        #[command(flatten)]
        opts: TableOpts,
    },
    /// Near-optimal two-body probes, N = 5..8.
    Table4 {
        #[command(flatten)]
        opts: TableOpts,
    },
    /// Figure data series from a preset or config file.
    Figure(FigureArgs),
    /// Run acceptance criteria; exit code 1 if any fails.
    Verify {
        /// Criterion ids or names, comma separated.
        #[arg(long)]
        only: Option<String>,
        /// Table I tolerance.
        #[arg(long, default_value_t = TABLE1_TOLERANCE)]
        tolerance: f64,
    },
    /// Print a resolved probe state as JSON.
    DumpState {
        #[arg(long, default_value = "near_optimal")]
        probe: String,
        #[arg(long, default_value_t = 8)]
        n: usize,
        #[arg(long, default_value = "linear")]
        hamiltonian: String,
    },
}

#[derive(Args)]
struct FigureArgs {
    /// fig1 .. fig7.
    #[arg(long, conflicts_with = "config")]
    preset: Option<String>,
    /// JSON run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override N, e.g. `8` or `3..10`.
    #[arg(long)]
    n: Option<String>,
    /// Override probes, comma separated.
    #[arg(long)]
    probe: Option<String>,
    /// Override generators, comma separated (linear, r=1..4, power:k).
    #[arg(long)]
    hamiltonian: Option<String>,
    /// Override noise channels, comma separated.
    #[arg(long)]
    noise: Option<String>,
    /// `start:stop:step`.
    #[arg(long)]
    p_grid: Option<String>,
    /// fixed or reopt.
    #[arg(long)]
    axis_policy: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json.
    #[arg(long)]
    format: Option<String>,
}

fn emit(bytes: &[u8], out: Option<&PathBuf>) -> BenchResult<()> {
    match out {
        Some(path) => std::fs::write(path, bytes)?,
        None => std::io::stdout().write_all(bytes)?,
    }
    Ok(())
}

fn emit_table(table: BenchResult<Table>, opts: &TableOpts) -> BenchResult<()> {
    let format = TableFormat::parse(&opts.format)?;
    let table = table?;
    emit(table.render(format)?.as_bytes(), opts.out.as_ref())?;
    if !table.passed() {
        return Err(BenchError::Acceptance {
            failed: table.failures(),
        });
    }
    Ok(())
}

fn split(s: &str) -> impl Iterator<Item = &str> {
    s.split(',').map(str::trim).filter(|t| !t.is_empty())
}

fn figure_config(args: &FigureArgs) -> BenchResult<RunConfig> {
    let mut cfg = match (&args.preset, &args.config) {
        (Some(p), None) => RunConfig::preset(p)?,
        (None, Some(path)) => RunConfig::parse_file(&std::fs::read_to_string(path)?)?,
        _ => {
            return Err(BenchError::Config(
                "give exactly one of --preset or --config".into(),
            ))
        }
    };
    if let Some(n) = &args.n {
        cfg.n_qubits = parse_n_list(n)?;
    }
    if let Some(p) = &args.probe {
        cfg.probes = split(p)
            .map(ProbeChoice::parse)
            .collect::<BenchResult<_>>()?;
    }
    if let Some(h) = &args.hamiltonian {
        cfg.hamiltonians = split(h)
            .map(parse_hamiltonian)
            .collect::<BenchResult<_>>()?;
    }
    if let Some(n) = &args.noise {
        cfg.noise = split(n).map(parse_noise).collect::<BenchResult<_>>()?;
    }
    if let Some(g) = &args.p_grid {
        cfg.p_grid = PGrid::parse(g)?;
    }
    if let Some(a) = &args.axis_policy {
        cfg.axis_policy = AxisPolicy::parse(a)?;
    }
    if let Some(o) = &args.out {
        cfg.output = Some(o.display().to_string());
    }
    if let Some(f) = &args.format {
        cfg.format =
            Format::parse(f).ok_or_else(|| BenchError::Config(format!("unknown format '{f}'")))?;
    }
    cfg.validate()?;
    Ok(cfg)
}

#[derive(Serialize)]
struct StateDump {
    probe: String,
    hamiltonian: String,
    n: usize,
    pair: Option<(usize, usize)>,
    axis_theta: f64,
    axis_phi: f64,
    fq: f64,
    /// `(re, im)` per excitation number `l = 0..N`.
    amplitudes: Vec<(f64, f64)>,
}

fn dump_state(probe: &str, n: usize, hamiltonian: &str) -> BenchResult<()> {
    let choice = ProbeChoice::parse(probe)?;
    let spec = HamiltonianSpec::new(parse_hamiltonian(hamiltonian)?, n);
    spec.validate()?;
    let resolved = resolve_probe(choice, &spec, &AxisSearchConfig::default())?
        .ok_or_else(|| BenchError::Config(format!("{choice} is undefined at N={n}")))?;
    let dump = StateDump {
        probe: choice.to_string(),
        hamiltonian: hamiltonian_name(spec.kind),
        n,
        pair: resolved.pair,
        axis_theta: resolved.axis.polar,
        axis_phi: resolved.axis.azimuth,
        fq: resolved.noiseless_qfi,
        amplitudes: resolved
            .state
            .amplitudes()
            .iter()
            .map(|a| (a.re, a.im))
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&dump)?;
    text.push('\n');
    emit(text.as_bytes(), None)
}

fn verify(only: Option<&str>, tolerance: f64) -> BenchResult<()> {
    let ids = match only {
        Some(s) => acceptance::parse_selection(s)?,
        None => CRITERIA.iter().map(|c| c.0).collect(),
    };
    let opts = AcceptanceOptions {
        table1_tolerance: tolerance,
    };
    let mut failed = 0;
    let mut stdout = std::io::stdout();
    for &id in &ids {
        let outcome = acceptance::run_criterion(id, &opts)?;
        writeln!(stdout, "{}", outcome.summary_line())?;
        for c in outcome.failed_checks() {
            writeln!(stdout, "  FAIL {}: {}", c.label, c.detail)?;
        }
        stdout.flush()?;
        eprintln!("criterion {id}: {:.2} s", outcome.elapsed.as_secs_f64());
        if !outcome.passed() {
            failed += 1;
        }
    }
    writeln!(
        stdout,
        "summary passed={} failed={failed}",
        ids.len() - failed
    )?;
    if failed > 0 {
        return Err(BenchError::Acceptance { failed });
    }
    Ok(())
}

fn run(cli: Cli) -> BenchResult<()> {
    if cli.threads == Some(0) {
        return Err(BenchError::Config("--threads must be positive".into()));
    }
    if let Some(cap) = cli.full_cap {
        set_full_space_cap(cap);
    }
    let started = Instant::now();
    let threads = cli.threads;
    let result = with_threads(threads, move || match cli.command {
        Command::Table1 { tolerance, opts } => emit_table(tables::table1(tolerance), &opts),
        Command::Table2 { n, opts } => {
            emit_table(parse_n_list(&n).and_then(|ns| tables::table2(&ns)), &opts)
        }
        Command::Table3 { opts } => emit_table(tables::table3(), &opts),
        Command::Table4 { opts } => emit_table(tables::table4(), &opts),
        Command::Figure(args) => {
            let mut cfg = figure_config(&args)?;
            if let Some(cap) = cfg.full_cap {
                set_full_space_cap(cap);
            }
            let run = with_threads(cfg.threads.filter(|_| threads.is_none()), || {
                run_figure(&cfg)
            })?;
            for note in &run.notes {
                eprintln!("note: {note}");
            }
            let bytes = encode(&run.rows, cfg.format)?;
            let out = cfg.output.take().map(PathBuf::from);
            emit(&bytes, out.as_ref())
        }
        Command::Verify { only, tolerance } => verify(only.as_deref(), tolerance),
        Command::DumpState {
            probe,
            n,
            hamiltonian,
        } => dump_state(&probe, n, &hamiltonian),
    });
    eprintln!("elapsed: {:.2} s", started.elapsed().as_secs_f64());
    result
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
