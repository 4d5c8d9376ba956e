//! `arcdf`: simulate AR series, estimate the innovation cdf, build bands,
//! predict, and run Monte Carlo experiments.
//!
//! Exit codes: 0 success, 2 usage or validation error, 3 numerical degeneracy.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use arcdf::csvio::{band_table, fmt_f64, read_series, series_table, CsvTable};
use arcdf::kcdf::{bandwidth_rule, grid_table, smooth_cdf, Kernel, GRID_POINTS};
use arcdf::kolmogorov::{build_band, MIN_BAND_N};
use arcdf::montecarlo::{format_summary, run_experiment, write_outputs, ExperimentConfig};
use arcdf::{arprocess, linalg, yulewalker, ArModel, Error, ErrorLaw, Execution, RngState, Series, SmoothCdf};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "arcdf", version, about = "Innovation distribution estimation for AR(p) series")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a stationary AR(p) series and write it as CSV.
    Simulate {
        /// Comma-separated coefficients, e.g. `0.8` or `-0.8,-0.4`.
        #[arg(long, allow_hyphen_values = true)]
        phi: String,
        #[arg(long, default_value = "normal")]
        law: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit AR(p) by Yule-Walker and write residuals and the smoothed cdf.
    Estimate {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        p: usize,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Write a simultaneous confidence band for the innovation cdf.
    Band {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        p: usize,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// One-step prediction interval from residual quantiles.
    Predict {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        p: usize,
        #[arg(long)]
        alpha1: f64,
        #[arg(long)]
        alpha2: f64,
    },
    /// Run a Monte Carlo experiment described by a config file.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 0)]
        workers: usize,
        /// Overrides `out_dir` from the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(err) if err.is_degenerate() => 3,
        _ => 2,
    }
}

fn run(cmd: Command) -> anyhow::Result<()> {
    match cmd {
        Command::Simulate { phi, law, n, sigma, seed, out } => simulate(&phi, &law, n, sigma, seed, &out),
        Command::Estimate { data, p, out } => estimate(&data, p, &out),
        Command::Band { data, p, alpha, out } => band(&data, p, alpha, &out),
        Command::Predict { data, p, alpha1, alpha2 } => predict(&data, p, alpha1, alpha2),
        Command::Experiment { config, workers, out } => experiment(&config, workers, out),
    }
}

fn parse_phi(text: &str) -> anyhow::Result<Vec<f64>> {
    text.split(',')
        .map(|s| s.trim().parse::<f64>().with_context(|| format!("bad coefficient '{}'", s.trim())))
        .collect()
}

fn simulate(phi: &str, law: &str, n: usize, sigma: f64, seed: u64, out: &Path) -> anyhow::Result<()> {
    let phi = parse_phi(phi)?;
    let model = ArModel::new(phi.clone(), sigma)?;
    if !model.is_causal() {
        let moduli = linalg::ar_root_moduli(&phi);
        let listed: Vec<String> = moduli.iter().map(|m| format!("{m:.6}")).collect();
        bail!("AR polynomial is not causal; root moduli: [{}]", listed.join(", "));
    }
    let law = ErrorLaw::from_name(law)?;
    let sim = arprocess::simulate(&model, &law, n, RngState::new(seed, 0))?;
    let meta = [
        ("seed", seed.to_string()),
        ("phi", phi.iter().map(|v| fmt_f64(*v)).collect::<Vec<_>>().join(";")),
        ("law", law.name().to_string()),
        ("sigma", fmt_f64(sigma)),
    ];
    series_table(&sim.series, &meta).write_file(out)?;
    println!("wrote {} rows to {}", n + model.order(), out.display());
    Ok(())
}

struct Fitted {
    series: Series,
    fit: yulewalker::FittedAr,
    residuals: Vec<f64>,
    cdf: SmoothCdf,
}

fn load_and_fit(data: &Path, p: usize) -> anyhow::Result<Fitted> {
    if p == 0 {
        bail!("--p must be at least 1");
    }
    let file = read_series(data).with_context(|| format!("reading {}", data.display()))?;
    if file.values.len() < p + 2 {
        bail!(
            "need at least {} observations for order {p}, file has {}",
            p + 2,
            file.values.len()
        );
    }
    let (series, relabeled) = file.into_series(p)?;
    if relabeled {
        eprintln!(
            "note: no presample recorded; treating the first {p} observations as presample (n = {})",
            series.len()
        );
    }
    let fit = yulewalker::fit(&series, p)?;
    let residuals = yulewalker::residuals(&series, &fit)?.z_hat;
    let h = bandwidth_rule(&residuals)?;
    let cdf = smooth_cdf(&residuals, h, Kernel::Quartic)?;
    Ok(Fitted { series, fit, residuals, cdf })
}

fn estimate(data: &Path, p: usize, out: &Path) -> anyhow::Result<()> {
    let f = load_and_fit(data, p)?;
    std::fs::create_dir_all(out)?;
    let mut record = String::new();
    for (k, v) in f.fit.record() {
        record.push_str(&format!("{k}={v}\n"));
    }
    record.push_str(&format!("bandwidth={}\n", fmt_f64(f.cdf.bandwidth())));
    std::fs::write(out.join("fit.txt"), &record)?;

    let phi_hat = f.fit.phi_hat.iter().map(|v| fmt_f64(*v)).collect::<Vec<_>>().join(";");
    let mut res = CsvTable::new(&["t", "z_hat"]).meta("phi_hat", &phi_hat);
    for (t, z) in f.residuals.iter().enumerate() {
        res.push([(t + 1).to_string(), fmt_f64(*z)]);
    }
    res.write_file(&out.join("residuals.csv"))?;

    let mut grid = CsvTable::new(&["z", "F"])
        .meta("phi_hat", &phi_hat)
        .meta("bandwidth", fmt_f64(f.cdf.bandwidth()));
    for (z, v) in grid_table(&f.cdf, GRID_POINTS, Execution::Sequential) {
        grid.push_floats(&[z, v]);
    }
    grid.write_file(&out.join("cdf_grid.csv"))?;

    print!("{record}");
    println!("wrote fit.txt, residuals.csv, cdf_grid.csv to {}", out.display());
    Ok(())
}

fn band(data: &Path, p: usize, alpha: f64, out: &Path) -> anyhow::Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        bail!("--alpha must lie in (0, 1)");
    }
    let f = load_and_fit(data, p)?;
    let n = f.residuals.len();
    if n < MIN_BAND_N {
        eprintln!("warning: n = {n} < {MIN_BAND_N}; asymptotic Kolmogorov constants may be inaccurate");
    }
    let grid = f.cdf.evaluation_grid();
    let band = build_band(&f.cdf, n, alpha)?;
    band_table(&band, &grid)
        .meta("n", n)
        .meta("alpha", fmt_f64(alpha))
        .write_file(out)?;
    println!("halfwidth={:.4}", band.halfwidth);
    Ok(())
}

fn predict(data: &Path, p: usize, alpha1: f64, alpha2: f64) -> anyhow::Result<()> {
    if !(alpha1 > 0.0 && alpha2 < 1.0 && alpha1 < alpha2) {
        bail!("need 0 < alpha1 < alpha2 < 1, got {alpha1} and {alpha2}");
    }
    let f = load_and_fit(data, p)?;
    let point = f.fit.forecast(&f.series)?;
    let lo = point + f.cdf.quantile(alpha1)?;
    let hi = point + f.cdf.quantile(alpha2)?;
    println!("forecast={}", fmt_f64(point));
    println!("lower={}", fmt_f64(lo));
    println!("upper={}", fmt_f64(hi));
    println!("level={}", fmt_f64(alpha2 - alpha1));
    Ok(())
}

fn experiment(config: &Path, workers: usize, out: Option<PathBuf>) -> anyhow::Result<()> {
    let cfg = ExperimentConfig::from_file(config)
        .map_err(|e| anyhow!(e).context(format!("config {}", config.display())))?;
    let exec = match workers {
        0 => Execution::Parallel,
        w => Execution::with_workers(w),
    };
    let result = run_experiment(&cfg, exec)?;
    let dir = out.or_else(|| cfg.out_dir.clone()).unwrap_or_else(|| PathBuf::from("."));
    let written = write_outputs(&cfg, &result, &dir)?;
    print!("{}", format_summary(&result.summary));
    println!("wrote {} files to {}", written.len(), dir.display());
    Ok(())
}
