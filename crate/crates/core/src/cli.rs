//! Command-line front end.
//!
//! Exit codes: 0 success, 1 configuration or usage error, 2 numerical
//! failure, 3 I/O failure.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::{self, ScenarioConfig};
use crate::entropy;
use crate::format::fmt_num;
use crate::fvm::{self, Field, Scenario, CSV_HEADER};
use crate::model::{ModelLaws, ProfileKind};
use crate::riemann::{self, WaveFan, WaveKind};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("usage error: {0}")]
    Usage(String),
    #[error("numerical error: {0}")]
    Numeric(crate::Error),
    #[error("I/O error: {context}: {source}")]
    Io { context: String, source: io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Usage(_) => 1,
            CliError::Numeric(_) => 2,
            CliError::Io { .. } => 3,
        }
    }
}

fn io_err(context: impl Into<String>) -> impl FnOnce(io::Error) -> CliError {
    let context = context.into();
    move |source| CliError::Io { context, source }
}

fn config_err(e: crate::Error) -> CliError {
    CliError::Config(match e {
        crate::Error::Domain(msg) => msg,
        other => other.to_string(),
    })
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(
    name = "dflux",
    version,
    about = "Riemann solvers and finite volumes for a Temple system with a discontinuous coefficient"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the Lax-Friedrichs scheme and write CSV snapshots.
    Simulate(SimulateArgs),
    /// Solve the Riemann problem at the coefficient jump.
    Riemann(RiemannArgs),
    /// L1 errors against the exact Riemann solution on a mesh sequence.
    Compare(CompareArgs),
    /// Validate the laws and print entropy dissipation tables.
    Check(CheckArgs),
    /// List the bundled scenarios, or print one as TOML.
    Presets(PresetsArgs),
}

#[derive(Debug, Args)]
struct Source {
    /// Scenario TOML file.
    #[arg(required_unless_present = "preset", conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Bundled scenario name instead of a file.
    #[arg(long)]
    preset: Option<String>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Csv,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long)]
    dx: Option<f64>,
    #[arg(long)]
    cfl: Option<f64>,
    #[arg(long)]
    t_final: Option<f64>,
    /// Output directory, or file with --single-file.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write every n-th step; 0 keeps only the initial and final snapshots.
    #[arg(long)]
    stride: Option<usize>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Write all snapshots into one CSV file.
    #[arg(long)]
    single_file: bool,
}

#[derive(Debug, Args)]
struct RiemannArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long, default_value_t = -2.0, allow_negative_numbers = true)]
    nu_min: f64,
    #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
    nu_max: f64,
    #[arg(long, default_value_t = 401)]
    samples: usize,
    /// Directory for waves.txt and samples.csv; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CompareArgs {
    #[command(flatten)]
    source: Source,
    /// Comma-separated mesh sizes.
    #[arg(long, value_delimiter = ',', default_value = "4e-3,2e-3,1e-3")]
    meshes: Vec<f64>,
    #[arg(long)]
    cfl: Option<f64>,
    #[arg(long)]
    t_final: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CheckArgs {
    #[command(flatten)]
    source: Source,
}

#[derive(Debug, Args)]
struct PresetsArgs {
    /// Print this preset as TOML.
    name: Option<String>,
}

/// Parses `args` (program name first) and runs the command, returning the
/// process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = if e.use_stderr() { write!(err, "{}", e.render()) } else { write!(out, "{}", e.render()) };
            return code;
        }
    };
    let result = match cli.command {
        Command::Simulate(a) => simulate(a, out),
        Command::Riemann(a) => riemann_cmd(a, out),
        Command::Compare(a) => compare(a, out),
        Command::Check(a) => check(a, out),
        Command::Presets(a) => presets(a, out),
    };
    match result.and_then(|()| out.flush().map_err(io_err("stdout"))) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "dflux: {e}");
            e.exit_code()
        }
    }
}

fn load_unchecked(source: &Source) -> CliResult<ScenarioConfig> {
    let text = match (&source.config, &source.preset) {
        (Some(path), _) => fs::read_to_string(path).map_err(io_err(format!("reading {}", path.display())))?,
        (None, Some(name)) => config::preset_text(name)
            .ok_or_else(|| CliError::Usage(format!("unknown preset {name:?}; see `dflux presets`")))?
            .to_string(),
        (None, None) => return Err(CliError::Usage("a scenario file or --preset is required".into())),
    };
    ScenarioConfig::parse_unchecked(&text).map_err(config_err)
}

fn load(source: &Source) -> CliResult<ScenarioConfig> {
    let config = load_unchecked(source)?;
    config.validate().map_err(config_err)?;
    Ok(config)
}

fn apply_overrides(
    config: &mut ScenarioConfig,
    dx: Option<f64>,
    cfl: Option<f64>,
    t_final: Option<f64>,
) -> CliResult<()> {
    if let Some(dx) = dx {
        config.grid.dx = dx;
    }
    if let Some(cfl) = cfl {
        config.grid.cfl = cfl;
    }
    if let Some(t) = t_final {
        config.grid.t_final = t;
    }
    config.grid().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(())
}

fn build(config: &ScenarioConfig) -> CliResult<Scenario> {
    config.scenario().map_err(config_err)
}

fn create_file(path: &Path) -> CliResult<BufWriter<File>> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(io_err(format!("creating {}", parent.display())))?;
    }
    File::create(path).map(BufWriter::new).map_err(io_err(format!("creating {}", path.display())))
}

fn write_snapshot(laws: &ModelLaws, field: &Field, path: &Path) -> CliResult<()> {
    let mut file = create_file(path)?;
    let ctx = || format!("writing {}", path.display());
    writeln!(file, "{CSV_HEADER}").map_err(io_err(ctx()))?;
    field.write_csv_rows(laws, &mut file).map_err(io_err(ctx()))?;
    file.flush().map_err(io_err(ctx()))
}

fn simulate(args: SimulateArgs, out: &mut dyn Write) -> CliResult<()> {
    let mut config = load(&args.source)?;
    apply_overrides(&mut config, args.dx, args.cfl, args.t_final)?;
    if let Some(stride) = args.stride {
        config.output.stride = stride;
    }
    let Format::Csv = args.format;
    let single_file = args.single_file || config.output.single_file;
    let target = args.out.unwrap_or_else(|| PathBuf::from(&config.output.path));
    let scenario = build(&config)?;
    let laws = scenario.laws.clone();

    let mut io_failure: Option<CliError> = None;
    let mut written = 0usize;
    let mut single = if single_file {
        let mut file = create_file(&target)?;
        writeln!(file, "{CSV_HEADER}").map_err(io_err(format!("writing {}", target.display())))?;
        Some(file)
    } else {
        fs::create_dir_all(&target).map_err(io_err(format!("creating {}", target.display())))?;
        None
    };
    let outcome = fvm::run_with(&scenario, |field, step| {
        let res = match single.as_mut() {
            Some(file) => field.write_csv_rows(&laws, file).map_err(io_err(format!("writing {}", target.display()))),
            None => write_snapshot(&laws, field, &target.join(format!("snapshot_{step:06}.csv"))),
        };
        match res {
            Ok(()) => {
                written += 1;
                Ok(())
            }
            Err(e) => {
                io_failure = Some(e);
                Err(crate::Error::Domain("output failed".into()))
            }
        }
    });
    if let Some(e) = io_failure {
        return Err(e);
    }
    let (field, stats) = outcome.map_err(CliError::Numeric)?;
    if let Some(mut file) = single {
        file.flush().map_err(io_err(format!("writing {}", target.display())))?;
    }
    let (mass, momentum) = field.totals();
    let w = |e| io_err("stdout")(e);
    writeln!(out, "cells={} dx={} t_final={}", scenario.grid.n_cells, fmt_num(scenario.grid.dx()), fmt_num(field.t))
        .map_err(w)?;
    writeln!(out, "steps={} halvings={} max_courant={}", stats.steps, stats.halvings, fmt_num(stats.max_courant))
        .map_err(w)?;
    writeln!(out, "mass={} momentum={}", fmt_num(mass), fmt_num(momentum)).map_err(w)?;
    writeln!(out, "snapshots={} output={}", written, target.display()).map_err(w)?;
    Ok(())
}

/// Exact self-similar solution of the configured Riemann problem.
fn exact_fan(config: &ScenarioConfig) -> CliResult<(f64, WaveFan)> {
    let laws = config.laws().map_err(config_err)?;
    let profile = config.profile().map_err(config_err)?;
    let (x0, left, right) =
        config.riemann_data().ok_or_else(|| CliError::Usage("the initial datum is not a Riemann datum".into()))?;
    let (jump, c_minus, c_plus) = profile.single_jump().ok_or_else(|| {
        CliError::Usage("the coefficient is not constant or a single jump, so no exact solution is available".into())
    })?;
    if jump.is_some_and(|xi| xi != x0) {
        return Err(CliError::Usage(format!(
            "the datum jumps at x0 = {x0} but the coefficient jumps at {}",
            jump.unwrap_or(x0)
        )));
    }
    let fan = riemann::solve_two_sided(&laws, c_minus, c_plus, left, right).map_err(CliError::Numeric)?;
    Ok((x0, fan))
}

fn samples_csv(laws: &ModelLaws, fan: &WaveFan, nu_min: f64, nu_max: f64, n: usize) -> String {
    let mut s = String::from("nu,h,w,rho,q\n");
    for i in 0..n {
        let nu = if n == 1 { nu_min } else { nu_min + (nu_max - nu_min) * i as f64 / (n - 1) as f64 };
        let st = fan.sample(nu);
        let (h, w) = if st.is_vacuum() { (f64::NAN, f64::NAN) } else { (st.h, st.w) };
        let u = laws.to_conserved(st);
        s.push_str(&format!("{},{},{},{},{}\n", fmt_num(nu), fmt_num(h), fmt_num(w), fmt_num(u.rho), fmt_num(u.q)));
    }
    s
}

fn riemann_cmd(args: RiemannArgs, out: &mut dyn Write) -> CliResult<()> {
    if !(args.nu_min.is_finite() && args.nu_max.is_finite() && args.nu_min < args.nu_max) {
        return Err(CliError::Usage(format!("need nu-min < nu-max, got {} and {}", args.nu_min, args.nu_max)));
    }
    if args.samples == 0 {
        return Err(CliError::Usage("--samples must be positive".into()));
    }
    let config = load(&args.source)?;
    let laws = config.laws().map_err(config_err)?;
    let (_, fan) = exact_fan(&config)?;
    let waves = fan.to_wave_list();
    let samples = samples_csv(&laws, &fan, args.nu_min, args.nu_max, args.samples);
    match args.out {
        Some(dir) => {
            fs::create_dir_all(&dir).map_err(io_err(format!("creating {}", dir.display())))?;
            for (name, body) in [("waves.txt", &waves), ("samples.csv", &samples)] {
                let path = dir.join(name);
                fs::write(&path, body).map_err(io_err(format!("writing {}", path.display())))?;
            }
            writeln!(out, "waves={} output={}", fan.waves.len(), dir.display()).map_err(io_err("stdout"))
        }
        None => write!(out, "{waves}\n{samples}").map_err(io_err("stdout")),
    }
}

/// One row of a convergence study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeshError {
    pub dx: f64,
    pub rho: f64,
    pub q: f64,
}

/// L1 errors at `t_final` against the exact Riemann solution, one thread per
/// mesh.
pub fn convergence_study(config: &ScenarioConfig, meshes: &[f64]) -> Result<Vec<MeshError>, CliError> {
    let (x0, fan) = exact_fan(config)?;
    let laws = config.laws().map_err(config_err)?;
    let t = config.grid.t_final;
    if t <= 0.0 {
        return Err(CliError::Usage("compare needs t_final > 0".into()));
    }
    let scenarios = meshes
        .iter()
        .map(|&dx| {
            let mut c = config.clone();
            c.grid.dx = dx;
            c.grid().map_err(|e| CliError::Usage(e.to_string()))?;
            build(&c)
        })
        .collect::<CliResult<Vec<_>>>()?;
    let reference = |x: f64| laws.to_conserved(fan.sample((x - x0) / t));
    std::thread::scope(|s| {
        let handles: Vec<_> = scenarios
            .iter()
            .map(|sc| {
                s.spawn(move || {
                    let (field, _) = fvm::run_with(sc, |_, _| Ok(()))?;
                    let (rho, q) = fvm::l1_error(&field, reference);
                    Ok::<_, crate::Error>(MeshError { dx: sc.grid.dx(), rho, q })
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("solver thread panicked").map_err(CliError::Numeric)).collect()
    })
}

/// `log2(e_{i-1} / e_i) / log2(dx_{i-1} / dx_i)`, NaN for the first mesh.
pub fn observed_orders(errors: &[f64], meshes: &[f64]) -> Vec<f64> {
    (0..errors.len())
        .map(
            |i| {
                if i == 0 {
                    f64::NAN
                } else {
                    (errors[i - 1] / errors[i]).log2() / (meshes[i - 1] / meshes[i]).log2()
                }
            },
        )
        .collect()
}

fn compare(args: CompareArgs, out: &mut dyn Write) -> CliResult<()> {
    if args.meshes.is_empty() {
        return Err(CliError::Usage("--meshes is empty".into()));
    }
    let mut config = load(&args.source)?;
    apply_overrides(&mut config, None, args.cfl, args.t_final)?;
    let rows = convergence_study(&config, &args.meshes)?;
    let dxs: Vec<f64> = rows.iter().map(|r| r.dx).collect();
    let ord_rho = observed_orders(&rows.iter().map(|r| r.rho).collect::<Vec<_>>(), &dxs);
    let ord_q = observed_orders(&rows.iter().map(|r| r.q).collect::<Vec<_>>(), &dxs);
    let mut table = String::from("dx,l1_rho,l1_q,order_rho,order_q\n");
    for (i, r) in rows.iter().enumerate() {
        table.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt_num(r.dx),
            fmt_num(r.rho),
            fmt_num(r.q),
            fmt_num(ord_rho[i]),
            fmt_num(ord_q[i])
        ));
    }
    match args.out {
        Some(path) => {
            let mut file = create_file(&path)?;
            file.write_all(table.as_bytes())
                .and_then(|()| file.flush())
                .map_err(io_err(format!("writing {}", path.display())))
        }
        None => out.write_all(table.as_bytes()).map_err(io_err("stdout")),
    }
}

fn check(args: CheckArgs, out: &mut dyn Write) -> CliResult<()> {
    let config = load_unchecked(&args.source)?;
    let report = config.validation_report().map_err(config_err)?;
    let profile = config.profile().map_err(config_err)?;
    let mut s = format!("{report}");
    s.push_str(&format!("c_min={}\n", fmt_num(profile.c_min())));
    match (profile.kind(), profile.period()) {
        (ProfileKind::Periodic, Some(period)) => {
            s.push_str(&format!("tv_c_per_period={}\n", fmt_num(profile.total_variation(0.0, period))));
        }
        _ => s.push_str(&format!("tv_c={}\n", fmt_num(profile.total_variation(f64::NEG_INFINITY, f64::INFINITY)))),
    }
    let g = &config.grid;
    s.push_str(&format!("tv_c_on_domain={}\n", fmt_num(profile.total_variation(g.x_min, g.x_max))));

    if report.passed {
        if let Ok((_, fan)) = exact_fan(&config) {
            let laws = config.laws().map_err(config_err)?;
            s.push('\n');
            s.push_str(&fan.to_wave_list());
            for (i, wave) in fan.waves.iter().enumerate() {
                match wave.kind {
                    WaveKind::Shock1 => {
                        let table = entropy::dissipation_table(&laws, wave.left, wave.right, wave.speed_lo, wave.c)
                            .map_err(CliError::Numeric)?;
                        let min = table.iter().map(|&(_, d)| d).fold(f64::INFINITY, f64::min);
                        let ok = min >= -entropy::DISSIPATION_TOL;
                        s.push_str(&format!(
                            "\n# wave {i} shock1 speed={} min_dissipation={} admissible={ok}\nk,D_k\n",
                            fmt_num(wave.speed_lo),
                            fmt_num(min)
                        ));
                        for (k, d) in table {
                            s.push_str(&format!("{},{}\n", fmt_num(k), fmt_num(d)));
                        }
                    }
                    WaveKind::NonClassical => {
                        let ok = entropy::admissible_discontinuity(
                            &laws,
                            &profile,
                            wave.left,
                            wave.right,
                            0.0,
                            wave.speed_lo,
                        );
                        s.push_str(&format!("\n# wave {i} nonclassical interface admissible={ok}\n"));
                    }
                    _ => {}
                }
            }
        }
    }
    out.write_all(s.as_bytes()).map_err(io_err("stdout"))?;
    if report.passed {
        Ok(())
    } else {
        Err(CliError::Config("constitutive laws fail validation".into()))
    }
}

fn presets(args: PresetsArgs, out: &mut dyn Write) -> CliResult<()> {
    let text = match args.name {
        Some(name) => {
            config::preset_text(&name).ok_or_else(|| CliError::Usage(format!("unknown preset {name:?}")))?.to_string()
        }
        None => config::PRESET_NAMES.iter().map(|n| format!("{n}\n")).collect(),
    };
    out.write_all(text.as_bytes()).map_err(io_err("stdout"))
}
