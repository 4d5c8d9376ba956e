//! Seeded Monte Carlo replication engine.
//!
//! Each replication simulates a series, fits it, and compares four
//! estimators of the innovation cdf against the truth: the residual-based
//! smooth estimator F̂, the smooth estimator on the true errors F̃, and the
//! two empirical cdfs F̂ₙ (residuals) and Fₙ (true errors). Every replication
//! draws from its own RNG substream, so results do not depend on execution
//! order or worker count.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::arprocess::{simulate, ArModel, Simulation};
use crate::csvio::{fmt_f64, CsvTable};
use crate::exec::Execution;
use crate::kcdf::{bandwidth_rule, smooth_cdf, step_cdf, Kernel, SmoothCdf, StepCdf};
use crate::kolmogorov::{build_band, covers, halfwidth};
use crate::metrics::{ise, ise_range, sup_distance, Cdf, LawCdf};
use crate::rng::{ErrorLaw, RngState};
use crate::yulewalker::{fit, residuals};
use crate::{Error, Result};

/// Simpson panels for every integrated squared error.
pub const ISE_PANELS: usize = 2048;
/// Number of true-law quantiles added to each coverage grid.
pub const COVERAGE_QUANTILES: usize = 201;
/// Points on the `band_*.csv` curves.
pub const CURVE_POINTS: usize = 512;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Bandwidth {
    /// `IQR · n^{-1/3}` of the sample being smoothed.
    Rule,
    Fixed(f64),
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub models: Vec<ArModel>,
    pub law: ErrorLaw,
    pub n_list: Vec<usize>,
    pub replications: usize,
    pub alpha_list: Vec<f64>,
    pub seed: u64,
    pub out_dir: Option<PathBuf>,
    /// Reuse the same innovation stream for every model at a given `(n, rep)`.
    pub share_innovations: bool,
    pub bandwidth: Bandwidth,
}

impl ExperimentConfig {
    pub fn new(model: ArModel, law: ErrorLaw, n_list: Vec<usize>, replications: usize) -> Self {
        Self {
            models: vec![model],
            law,
            n_list,
            replications,
            alpha_list: vec![0.01, 0.05, 0.1, 0.2],
            seed: 1,
            out_dir: None,
            share_innovations: false,
            bandwidth: Bandwidth::Rule,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if self.models.is_empty() {
            return bad("experiment needs at least one model".into());
        }
        if self.n_list.is_empty() {
            return bad("experiment needs at least one sample size".into());
        }
        if self.replications == 0 {
            return bad("replications must be at least 1".into());
        }
        for m in &self.models {
            if !m.is_causal() {
                return bad(format!("model {:?} is not causal", m.phi()));
            }
            if let Some(&n) = self.n_list.iter().find(|&&n| n < (m.order() + 1).max(4)) {
                return bad(format!("sample size {n} too small for order {}", m.order()));
            }
        }
        if let Some(a) = self.alpha_list.iter().find(|a| !(**a > 0.0 && **a < 1.0)) {
            return bad(format!("level {a} outside (0, 1)"));
        }
        if let Bandwidth::Fixed(h) = self.bandwidth {
            if !(h > 0.0 && h.is_finite()) {
                return bad(format!("bandwidth override {h} must be positive"));
            }
        }
        LawCdf::new(&self.law)?;
        Ok(())
    }

    /// Parses the `key = value` config format. Repeating `phi` adds models.
    pub fn parse(text: &str) -> Result<Self> {
        let cfg_err = |line: usize, message: String| Error::Config { line, message };
        let mut models = Vec::new();
        let mut sigma = 1.0;
        let mut law = ErrorLaw::StandardNormal;
        let mut n_list = None;
        let mut replications = 1000;
        let mut alpha_list = vec![0.01, 0.05, 0.1, 0.2];
        let mut seed = 1u64;
        let mut out_dir = None;
        let mut share_innovations = false;
        let mut bandwidth = Bandwidth::Rule;
        let mut phis: Vec<(usize, Vec<f64>)> = Vec::new();

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| cfg_err(line, format!("expected 'key = value', got '{content}'")))?;
            let (key, value) = (key.trim(), value.trim());
            let floats = |v: &str| -> Result<Vec<f64>> {
                v.split(',')
                    .map(|s| s.trim().parse::<f64>().map_err(|_| cfg_err(line, format!("'{}' is not a number", s.trim()))))
                    .collect()
            };
            match key {
                "phi" => phis.push((line, floats(value)?)),
                "sigma" => {
                    sigma = value.parse().map_err(|_| cfg_err(line, format!("bad sigma '{value}'")))?
                }
                "law" => law = ErrorLaw::from_name(value).map_err(|e| cfg_err(line, e.to_string()))?,
                "n" => {
                    n_list = Some(
                        value
                            .split(',')
                            .map(|s| s.trim().parse::<usize>().map_err(|_| cfg_err(line, format!("bad sample size '{}'", s.trim()))))
                            .collect::<Result<Vec<_>>>()?,
                    )
                }
                "replications" => {
                    replications = value.parse().map_err(|_| cfg_err(line, format!("bad replication count '{value}'")))?
                }
                "alpha" => alpha_list = floats(value)?,
                "seed" => seed = value.parse().map_err(|_| cfg_err(line, format!("bad seed '{value}'")))?,
                "out_dir" => out_dir = Some(PathBuf::from(value)),
                "share_innovations" => {
                    share_innovations = value.parse().map_err(|_| cfg_err(line, format!("expected true or false, got '{value}'")))?
                }
                "bandwidth" => {
                    bandwidth = if value == "rule" {
                        Bandwidth::Rule
                    } else {
                        Bandwidth::Fixed(value.parse().map_err(|_| cfg_err(line, format!("bandwidth must be 'rule' or a number, got '{value}'")))?)
                    }
                }
                other => return Err(cfg_err(line, format!("unknown key '{other}'"))),
            }
        }
        let end = text.lines().count() + 1;
        for (line, phi) in phis {
            models.push(ArModel::new(phi, sigma).map_err(|e| cfg_err(line, e.to_string()))?);
        }
        if models.is_empty() {
            return Err(cfg_err(end, "missing required key 'phi'".into()));
        }
        let n_list = n_list.ok_or_else(|| cfg_err(end, "missing required key 'n'".into()))?;
        let cfg = Self {
            models,
            law,
            n_list,
            replications,
            alpha_list,
            seed,
            out_dir,
            share_innovations,
            bandwidth,
        };
        cfg.validate().map_err(|e| cfg_err(end, e.to_string()))?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn stream(&self, model: usize, n: usize, rep_id: usize) -> RngState {
        if self.share_innovations {
            RngState::substream(self.seed, &[n as u64, rep_id as u64])
        } else {
            RngState::substream(self.seed, &[model as u64, n as u64, rep_id as u64])
        }
    }

    fn bandwidth_for(&self, sample: &[f64]) -> Result<f64> {
        match self.bandwidth {
            Bandwidth::Rule => bandwidth_rule(sample),
            Bandwidth::Fixed(h) => Ok(h),
        }
    }
}

/// Everything computed in one replication, before reduction to scalars.
pub struct Estimators {
    pub sim: Simulation,
    pub phi_hat: Vec<f64>,
    pub residuals: Vec<f64>,
    pub f_hat: SmoothCdf,
    pub f_tilde: SmoothCdf,
    pub f_hat_n: StepCdf,
    pub f_n: StepCdf,
}

impl Estimators {
    pub fn build(cfg: &ExperimentConfig, model: usize, n: usize, rep_id: usize) -> Result<Self> {
        let m = &cfg.models[model];
        let sim = simulate(m, &cfg.law, n, cfg.stream(model, n, rep_id))?;
        let fitted = fit(&sim.series, m.order())?;
        let res = residuals(&sim.series, &fitted)?;
        let h_hat = cfg.bandwidth_for(&res.z_hat)?;
        let h_tilde = cfg.bandwidth_for(&sim.errors)?;
        Ok(Self {
            f_hat: smooth_cdf(&res.z_hat, h_hat, Kernel::Quartic)?,
            f_tilde: smooth_cdf(&sim.errors, h_tilde, Kernel::Quartic)?,
            f_hat_n: step_cdf(&res.z_hat)?,
            f_n: step_cdf(&sim.errors)?,
            phi_hat: fitted.phi_hat,
            residuals: res.z_hat,
            sim,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReplicationMetrics {
    pub phi_hat: Vec<f64>,
    pub h_hat: f64,
    pub h_tilde: f64,
    pub d_n_fhat: f64,
    pub d_n_ftilde: f64,
    pub d_n_fhatn: f64,
    pub d_n_fn: f64,
    /// `d(F̂, F̃)`.
    pub d_fhat_ftilde: f64,
    pub ise_fhat: f64,
    pub ise_ftilde: f64,
    /// Coverage per alpha, in `alpha_list` order.
    pub cover_fhat: Vec<bool>,
    pub cover_ftilde: Vec<bool>,
    pub cover_fn: Vec<bool>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReplicationRecord {
    pub model: usize,
    pub n: usize,
    pub rep_id: usize,
    pub outcome: std::result::Result<ReplicationMetrics, String>,
}

impl ReplicationRecord {
    pub fn metrics(&self) -> Option<&ReplicationMetrics> {
        self.outcome.as_ref().ok()
    }
}

fn merge_grids(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut g = [a, b].concat();
    g.sort_by(f64::total_cmp);
    g.dedup();
    g
}

fn law_quantiles(law: &ErrorLaw) -> Result<Vec<f64>> {
    (1..=COVERAGE_QUANTILES)
        .map(|k| law.quantile(k as f64 / (COVERAGE_QUANTILES + 1) as f64))
        .collect()
}

/// One replication, deterministic in `(seed, model, n, rep_id)`.
pub fn run_replication(cfg: &ExperimentConfig, model: usize, n: usize, rep_id: usize) -> Result<ReplicationMetrics> {
    let wrap = |e: Error| Error::Replication { rep_id, n, source: Box::new(e) };
    let est = Estimators::build(cfg, model, n, rep_id).map_err(wrap)?;
    let truth = LawCdf::new(&cfg.law)?;

    let grid_hat = est.f_hat.evaluation_grid();
    let grid_tilde = est.f_tilde.evaluation_grid();
    let d_n_fhat = sup_distance(&est.f_hat, &truth, &grid_hat).0;
    let d_n_ftilde = sup_distance(&est.f_tilde, &truth, &grid_tilde).0;
    let d_n_fhatn = sup_distance(&est.f_hat_n, &truth, &grid_hat).0;
    let d_n_fn = sup_distance(&est.f_n, &truth, &grid_tilde).0;
    let d_fhat_ftilde = sup_distance(&est.f_hat, &est.f_tilde, &merge_grids(&grid_hat, &grid_tilde)).0;

    let (lo, hi) = ise_range(&est.residuals);
    let ise_fhat = ise(&est.f_hat, &truth, lo, hi, ISE_PANELS)?;
    let ise_ftilde = ise(&est.f_tilde, &truth, lo, hi, ISE_PANELS)?;

    let quantiles = law_quantiles(&cfg.law)?;
    let cover_grid_hat = merge_grids(&grid_hat, &quantiles);
    let cover_grid_tilde = merge_grids(&grid_tilde, &quantiles);
    let mut cover_fhat = Vec::with_capacity(cfg.alpha_list.len());
    let mut cover_ftilde = Vec::with_capacity(cfg.alpha_list.len());
    let mut cover_fn = Vec::with_capacity(cfg.alpha_list.len());
    for &alpha in &cfg.alpha_list {
        let halfwidth = halfwidth(n, alpha)?;
        let band = |c| crate::kolmogorov::Band { center: c, halfwidth, level: 1.0 - alpha };
        cover_fhat.push(covers(&band(&est.f_hat as &dyn Cdf), &truth, &cover_grid_hat));
        cover_ftilde.push(covers(&band(&est.f_tilde as &dyn Cdf), &truth, &cover_grid_tilde));
        cover_fn.push(covers(&band(&est.f_n as &dyn Cdf), &truth, &cover_grid_tilde));
    }

    Ok(ReplicationMetrics {
        h_hat: est.f_hat.bandwidth(),
        h_tilde: est.f_tilde.bandwidth(),
        phi_hat: est.phi_hat,
        d_n_fhat,
        d_n_ftilde,
        d_n_fhatn,
        d_n_fn,
        d_fhat_ftilde,
        ise_fhat,
        ise_ftilde,
        cover_fhat,
        cover_ftilde,
        cover_fn,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Coverage {
    pub alpha: f64,
    pub f_hat: f64,
    pub f_n: f64,
    pub f_tilde: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub model: usize,
    pub phi: Vec<f64>,
    pub n: usize,
    pub completed: usize,
    pub failures: usize,
    pub dbar_fhat: f64,
    pub dbar_ftilde: f64,
    pub dbar_fhatn: f64,
    pub dbar_fn: f64,
    pub ratio_d: f64,
    pub mise_fhat: f64,
    pub mise_ftilde: f64,
    pub ratio_mise: f64,
    pub coverage: Vec<Coverage>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RatioRow {
    pub model: usize,
    pub n: usize,
    pub rep_id: usize,
    /// `D_n(F̂) / D_n(F̃)`.
    pub ratio: f64,
}

pub struct ExperimentOutput {
    pub records: Vec<ReplicationRecord>,
    pub summary: Vec<SummaryRow>,
    pub ratios: Vec<RatioRow>,
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (s, k) = values.fold((0.0, 0usize), |(s, k), v| (s + v, k + 1));
    if k == 0 {
        f64::NAN
    } else {
        s / k as f64
    }
}

fn frequency(values: impl Iterator<Item = bool>) -> f64 {
    mean(values.map(|b| if b { 1.0 } else { 0.0 }))
}

/// Groups records by `(model, n)` in first-seen order and averages the
/// successful replications.
pub fn summarize(models: &[ArModel], records: &[ReplicationRecord], alphas: &[f64]) -> Vec<SummaryRow> {
    let mut keys: Vec<(usize, usize)> = Vec::new();
    for r in records {
        if !keys.contains(&(r.model, r.n)) {
            keys.push((r.model, r.n));
        }
    }
    keys.into_iter()
        .map(|(model, n)| {
            let group: Vec<&ReplicationRecord> = records.iter().filter(|r| r.model == model && r.n == n).collect();
            let ok: Vec<&ReplicationMetrics> = group.iter().filter_map(|r| r.metrics()).collect();
            let avg = |f: fn(&ReplicationMetrics) -> f64| mean(ok.iter().map(|m| f(m)));
            let dbar_fhat = avg(|m| m.d_n_fhat);
            let dbar_ftilde = avg(|m| m.d_n_ftilde);
            let mise_fhat = avg(|m| m.ise_fhat);
            let mise_ftilde = avg(|m| m.ise_ftilde);
            let coverage = alphas
                .iter()
                .enumerate()
                .map(|(i, &alpha)| Coverage {
                    alpha,
                    f_hat: frequency(ok.iter().map(|m| m.cover_fhat[i])),
                    f_n: frequency(ok.iter().map(|m| m.cover_fn[i])),
                    f_tilde: frequency(ok.iter().map(|m| m.cover_ftilde[i])),
                })
                .collect();
            SummaryRow {
                model,
                phi: models.get(model).map(|m| m.phi().to_vec()).unwrap_or_default(),
                n,
                completed: ok.len(),
                failures: group.len() - ok.len(),
                dbar_fhat,
                dbar_ftilde,
                dbar_fhatn: avg(|m| m.d_n_fhatn),
                dbar_fn: avg(|m| m.d_n_fn),
                ratio_d: dbar_fhat / dbar_ftilde,
                mise_fhat,
                mise_ftilde,
                ratio_mise: mise_fhat / mise_ftilde,
                coverage,
            }
        })
        .collect()
}

pub fn ratio_rows(records: &[ReplicationRecord]) -> Vec<RatioRow> {
    records
        .iter()
        .filter_map(|r| {
            r.metrics().map(|m| RatioRow {
                model: r.model,
                n: r.n,
                rep_id: r.rep_id,
                ratio: m.d_n_fhat / m.d_n_ftilde,
            })
        })
        .collect()
}

/// Minimum, quartiles (type 7), and maximum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FiveNumber {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

pub fn five_number(values: &[f64]) -> Option<FiveNumber> {
    if values.is_empty() {
        return None;
    }
    let mut s = values.to_vec();
    s.sort_by(f64::total_cmp);
    let q = |p| crate::kcdf::type7_quantile(&s, p);
    Some(FiveNumber {
        min: s[0],
        q1: q(0.25),
        median: q(0.5),
        q3: q(0.75),
        max: s[s.len() - 1],
    })
}

/// Runs every `(model, n, rep)` job. Replication failures are recorded, not raised.
pub fn run_experiment(cfg: &ExperimentConfig, exec: Execution) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let mut jobs = Vec::with_capacity(cfg.models.len() * cfg.n_list.len() * cfg.replications);
    for model in 0..cfg.models.len() {
        for &n in &cfg.n_list {
            for rep in 0..cfg.replications {
                jobs.push((model, n, rep));
            }
        }
    }
    let records = exec.map_slice(&jobs, |&(model, n, rep_id)| ReplicationRecord {
        model,
        n,
        rep_id,
        outcome: run_replication(cfg, model, n, rep_id).map_err(|e| e.to_string()),
    });
    for r in &records {
        if let Err(e) = &r.outcome {
            log::warn!("model {} n {} rep {}: {e}", r.model, r.n, r.rep_id);
        }
    }
    let summary = summarize(&cfg.models, &records, &cfg.alpha_list);
    let ratios = ratio_rows(&records);
    Ok(ExperimentOutput { records, summary, ratios })
}

fn phi_label(phi: &[f64]) -> String {
    phi.iter().map(|v| fmt_f64(*v)).collect::<Vec<_>>().join(";")
}

fn alpha_label(a: f64) -> String {
    fmt_f64(a)
}

fn flag(b: bool) -> &'static str {
    if b {
        "1"
    } else {
        "0"
    }
}

fn with_config_meta(t: CsvTable, cfg: &ExperimentConfig) -> CsvTable {
    t.meta("seed", cfg.seed)
        .meta("law", cfg.law.name())
        .meta("replications", cfg.replications)
        .meta("share_innovations", cfg.share_innovations)
}

pub fn replications_table(cfg: &ExperimentConfig, records: &[ReplicationRecord]) -> CsvTable {
    let mut header: Vec<String> = [
        "model", "phi", "n", "rep_id", "status", "phi_hat", "h_hat", "h_tilde", "d_n_fhat", "d_n_ftilde",
        "d_n_fhatn", "d_n_fn", "d_fhat_ftilde", "ise_fhat", "ise_ftilde",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    for kind in ["fhat", "ftilde", "fn"] {
        for a in &cfg.alpha_list {
            header.push(format!("cover_{kind}_{}", alpha_label(*a)));
        }
    }
    let refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut t = with_config_meta(CsvTable::new(&refs), cfg);
    for r in records {
        let mut row = vec![
            r.model.to_string(),
            phi_label(cfg.models[r.model].phi()),
            r.n.to_string(),
            r.rep_id.to_string(),
        ];
        match &r.outcome {
            Ok(m) => {
                row.push("ok".into());
                row.push(phi_label(&m.phi_hat));
                for v in [
                    m.h_hat, m.h_tilde, m.d_n_fhat, m.d_n_ftilde, m.d_n_fhatn, m.d_n_fn, m.d_fhat_ftilde,
                    m.ise_fhat, m.ise_ftilde,
                ] {
                    row.push(fmt_f64(v));
                }
                for flags in [&m.cover_fhat, &m.cover_ftilde, &m.cover_fn] {
                    row.extend(flags.iter().map(|b| flag(*b).to_string()));
                }
            }
            Err(e) => {
                row.push(format!("failed: {}", e.replace(',', ";")));
                row.resize(header.len(), String::new());
            }
        }
        t.push(row);
    }
    t
}

pub fn summary_table(cfg: &ExperimentConfig, rows: &[SummaryRow]) -> CsvTable {
    let mut header: Vec<String> = [
        "model", "phi", "n", "completed", "failures", "dbar_fhat", "ratio_d", "mise_fhat", "ratio_mise", "dbar_ftilde",
        "mise_ftilde", "dbar_fhatn", "dbar_fn",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    for a in &cfg.alpha_list {
        for kind in ["fhat", "fn", "ftilde"] {
            header.push(format!("cover_{kind}_{}", alpha_label(*a)));
        }
    }
    let refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut t = with_config_meta(CsvTable::new(&refs), cfg);
    for r in rows {
        let mut row = vec![
            r.model.to_string(),
            phi_label(&r.phi),
            r.n.to_string(),
            r.completed.to_string(),
            r.failures.to_string(),
        ];
        for v in [
            r.dbar_fhat, r.ratio_d, r.mise_fhat, r.ratio_mise, r.dbar_ftilde, r.mise_ftilde, r.dbar_fhatn, r.dbar_fn,
        ] {
            row.push(fmt_f64(v));
        }
        for c in &r.coverage {
            row.extend([fmt_f64(c.f_hat), fmt_f64(c.f_n), fmt_f64(c.f_tilde)]);
        }
        t.push(row);
    }
    t
}

pub fn ratios_table(cfg: &ExperimentConfig, ratios: &[RatioRow]) -> CsvTable {
    let mut t = with_config_meta(CsvTable::new(&["model", "phi", "n", "rep_id", "ratio"]), cfg);
    for r in ratios {
        t.push([
            r.model.to_string(),
            phi_label(cfg.models[r.model].phi()),
            r.n.to_string(),
            r.rep_id.to_string(),
            fmt_f64(r.ratio),
        ]);
    }
    t
}

/// Curves from replication 0: truth, both smooth estimators, the F̂ band at
/// level `1 - alpha`, and Fₙ, on [`CURVE_POINTS`] equispaced points.
pub fn band_curves(cfg: &ExperimentConfig, model: usize, n: usize, alpha: f64) -> Result<CsvTable> {
    let est = Estimators::build(cfg, model, n, 0)?;
    let truth = LawCdf::new(&cfg.law)?;
    let band = build_band(&est.f_hat, n, alpha)?;
    let c = est.f_hat.centers();
    let h = est.f_hat.bandwidth();
    let (a, b) = (c[0] - 3.0 * h, c[c.len() - 1] + 3.0 * h);
    let mut t = with_config_meta(
        CsvTable::new(&["z", "F_true", "F_tilde", "F_hat", "lower", "upper", "F_n"]),
        cfg,
    )
    .meta("phi", phi_label(cfg.models[model].phi()))
    .meta("n", n)
    .meta("alpha", alpha_label(alpha))
    .meta("halfwidth", fmt_f64(band.halfwidth));
    for i in 0..CURVE_POINTS {
        let z = a + (b - a) * i as f64 / (CURVE_POINTS - 1) as f64;
        let (lo, center, hi) = band.at(z);
        t.push_floats(&[z, truth.eval(z), est.f_tilde.eval(z), center, lo, hi, est.f_n.eval(z)]);
    }
    Ok(t)
}

/// Writes `replications.csv`, `summary.csv`, `ratios.csv`, and one
/// `band_<n>_<alpha>.csv` per cell (suffixed `_m<k>` when several models are
/// configured). Returns the written paths.
pub fn write_outputs(cfg: &ExperimentConfig, out: &ExperimentOutput, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut put = |name: String, table: CsvTable| -> Result<()> {
        let path = dir.join(name);
        table.write_file(&path)?;
        written.push(path);
        Ok(())
    };
    put("replications.csv".into(), replications_table(cfg, &out.records))?;
    put("summary.csv".into(), summary_table(cfg, &out.summary))?;
    put("ratios.csv".into(), ratios_table(cfg, &out.ratios))?;
    for model in 0..cfg.models.len() {
        for &n in &cfg.n_list {
            for &alpha in &cfg.alpha_list {
                let suffix = if cfg.models.len() > 1 { format!("_m{model}") } else { String::new() };
                match band_curves(cfg, model, n, alpha) {
                    Ok(t) => put(format!("band_{n}_{}{suffix}.csv", alpha_label(alpha)), t)?,
                    Err(e) => log::warn!("no band curve for model {model}, n {n}: {e}"),
                }
            }
        }
    }
    Ok(written)
}

/// Human-readable summary in the layout of the global-error and coverage tables.
pub fn format_summary(rows: &[SummaryRow]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<14} {:>6} {:>6} {:>10} {:>8} {:>10} {:>8}",
        "phi", "n", "fail", "Dbar(Fhat)", "ratio", "MISE(Fhat)", "ratio"
    );
    for r in rows {
        let _ = writeln!(
            s,
            "{:<14} {:>6} {:>6} {:>10.4} {:>8.4} {:>10.4} {:>8.4}",
            format!("({})", r.phi.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", ")),
            r.n,
            r.failures,
            r.dbar_fhat,
            r.ratio_d,
            r.mise_fhat,
            r.ratio_mise
        );
    }
    let _ = writeln!(s, "\ncoverage: Fhat (Fn) Ftilde");
    for r in rows {
        let cells: Vec<String> = r
            .coverage
            .iter()
            .map(|c| format!("a={}: {:.3} ({:.3}) {:.3}", c.alpha, c.f_hat, c.f_n, c.f_tilde))
            .collect();
        let _ = writeln!(s, "({:?}) n={:<5} {}", r.phi, r.n, cells.join("  "));
    }
    s
}
