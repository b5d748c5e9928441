//! The four subcommands. Each validates first, computes on a rayon pool of
//! the requested size and writes its files into the output directory.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use rsw_core::ed::{exact_records, fit_tower, ExactPropagator, KrylovSettings, Propagation, TowerFit, XxzHamiltonian};
use rsw_core::lattice::{build_model, DistanceConvention, LatticeModel};
use rsw_core::observables::{DynamicsContext, ObservableRecord, RecordOptions};
use rsw_core::rotor::{bare_inertia, tos_inertia, Inertia, TosReference};

use crate::config::{InertiaMode, PropagationChoice, RunConfig, ValidatedConfig};
use crate::error::CliError;
use crate::output::{write_correlations, write_json, write_series, write_table};
use crate::scan::{run_scan, ScanSummary};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Dynamics,
    Scan,
    Tos,
    OracleCompare,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Dynamics => "dynamics",
            Command::Scan => "scan",
            Command::Tos => "tos",
            Command::OracleCompare => "oracle-compare",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct InertiaInfo {
    pub mode: &'static str,
    pub bare: f64,
    pub used: f64,
    pub reference: Option<TosReference>,
    pub tower: Option<TowerFit>,
}

#[derive(Serialize)]
struct Conventions {
    distance: DistanceConvention,
    time_unit: &'static str,
    energy_unit: &'static str,
    site_order: &'static str,
}

#[derive(Serialize)]
struct Metadata<'a> {
    command: &'static str,
    version: &'static str,
    config: &'a RunConfig,
    workers: usize,
    conventions: Conventions,
    sites: usize,
    j0: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    inertia: Option<&'a InertiaInfo>,
}

fn write_metadata(
    out: &Path,
    command: Command,
    cfg: &ValidatedConfig,
    workers: usize,
    inertia: Option<&InertiaInfo>,
) -> Result<(), CliError> {
    let meta = Metadata {
        command: command.name(),
        version: env!("CARGO_PKG_VERSION"),
        config: &cfg.config,
        workers,
        conventions: Conventions {
            distance: cfg.model.spec().convention,
            time_unit: "1/J",
            energy_unit: "J",
            site_order: "x + L*y",
        },
        sites: cfg.model.num_sites(),
        j0: cfg.model.j0(),
        inertia,
    };
    write_json(&out.join("metadata.json"), &meta)
}

pub fn resolve_inertia(config: &RunConfig, model: &LatticeModel) -> Result<(Inertia, InertiaInfo), CliError> {
    let bare = bare_inertia(model);
    let (mode, inertia, reference, tower) = match &config.inertia {
        InertiaMode::Bare => ("bare", bare, None, None),
        InertiaMode::TosScaled { reference } => ("tos-scaled", tos_inertia(model, Some(reference)), Some(*reference), None),
        InertiaMode::TosExact { reference_size, max_jz } => {
            let spec = rsw_core::lattice::LatticeSpec { linear_size: *reference_size, ..model.spec().clone() };
            let fit = fit_tower(&build_model(&spec)?, *max_jz)?;
            let reference = fit.reference();
            ("tos-exact", tos_inertia(model, reference.as_ref()), reference, Some(fit))
        }
    };
    Ok((inertia, InertiaInfo { mode, bare: bare.value(), used: inertia.value(), reference, tower }))
}

fn record_options(cfg: &ValidatedConfig) -> Result<RecordOptions, CliError> {
    let region = if cfg.config.observables.entropy {
        Some(cfg.config.region.region(cfg.model.geometry()).map_err(|e| CliError::Config(vec![e]))?)
    } else {
        None
    };
    Ok(RecordOptions { correlations: cfg.config.observables.correlations, entropy_region: region })
}

fn time_grid(cfg: &ValidatedConfig, inertia: Inertia) -> Result<Vec<f64>, CliError> {
    let pi_i = core::f64::consts::PI * inertia.value().abs();
    if cfg.config.time.unit == crate::config::TimeUnit::PiInertia && !pi_i.is_finite() {
        return Err(CliError::Config(vec!["time.unit pi-inertia needs a finite inertia".into()]));
    }
    Ok(cfg.config.time.points(pi_i))
}

/// RSW records on the current pool, in grid order.
pub fn rsw_records(
    model: &LatticeModel,
    inertia: Inertia,
    grid: &[f64],
    options: RecordOptions,
) -> Result<Vec<ObservableRecord>, CliError> {
    rsw_core::observables::validate_time_grid(grid)?;
    let ctx = DynamicsContext::new(model, inertia, options)?;
    let records = grid.par_iter().map(|&t| ctx.record_at(t)).collect::<Result<Vec<_>, _>>()?;
    Ok(records)
}

pub fn thread_pool(workers: usize) -> Result<rayon::ThreadPool, CliError> {
    if workers == 0 {
        return Err(CliError::Config(vec!["--workers must be at least 1".into()]));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Io(std::io::Error::other(e)))
}

/// What a finished run wrote.
#[derive(Debug)]
pub struct RunOutput {
    pub files: Vec<PathBuf>,
    pub warnings: Vec<String>,
}

pub fn run(command: Command, config: RunConfig, out: &Path, workers: usize) -> Result<RunOutput, CliError> {
    let cfg = config.validate()?;
    let pool = thread_pool(workers)?;
    std::fs::create_dir_all(out)?;
    pool.install(|| match command {
        Command::Dynamics => cmd_dynamics(&cfg, out, workers),
        Command::Scan => cmd_scan(&cfg, out, workers),
        Command::Tos => cmd_tos(&cfg, out, workers),
        Command::OracleCompare => cmd_oracle_compare(&cfg, out, workers),
    })
}

fn flag_warnings(records: &[ObservableRecord]) -> Vec<String> {
    let mut warnings = Vec::new();
    if let Some(r) = records.iter().find(|r| r.flags.extrapolated) {
        warnings.push(format!("spin-wave density N_FM/N exceeds 0.1 from t = {}", r.time));
    }
    if let Some(r) = records.iter().find(|r| r.flags.negative_variance) {
        warnings.push(format!("Var(J^x) negative at t = {}", r.time));
    }
    warnings
}

pub fn cmd_dynamics(cfg: &ValidatedConfig, out: &Path, workers: usize) -> Result<RunOutput, CliError> {
    let (inertia, info) = resolve_inertia(&cfg.config, &cfg.model)?;
    let grid = time_grid(cfg, inertia)?;
    let records = rsw_records(&cfg.model, inertia, &grid, record_options(cfg)?)?;
    if records.iter().any(|r| !r.mean_jx.total.is_finite() || !r.var_jx.total.is_finite()) {
        return Err(CliError::Numeric("non-finite collective moments".into()));
    }
    let mut files = vec![out.join("series.csv"), out.join("metadata.json")];
    write_series(&files[0], &records)?;
    if cfg.config.observables.correlations {
        files.push(out.join("correlations.csv"));
        write_correlations(&files[2], &records)?;
    }
    write_metadata(out, Command::Dynamics, cfg, workers, Some(&info))?;
    Ok(RunOutput { files, warnings: flag_warnings(&records) })
}

pub fn cmd_scan(cfg: &ValidatedConfig, out: &Path, workers: usize) -> Result<RunOutput, CliError> {
    if cfg.config.lattice.dimension != 1 {
        return Err(CliError::Config(vec!["scan runs on 1d chains (lattice.dimension = 1)".into()]));
    }
    let s = &cfg.config.scan;
    let summary: ScanSummary = run_scan(cfg.model.spec(), &s.alphas, &s.sizes, s.coarse_points, s.crossover_slope)?;
    let rows: Vec<Vec<String>> = summary
        .cells
        .iter()
        .map(|c| {
            vec![
                c.alpha.to_string(),
                c.sites.to_string(),
                c.inertia.to_string(),
                c.min_xi2.to_string(),
                c.t_min.to_string(),
                (c.depolarized_first as u8).to_string(),
            ]
        })
        .collect();
    let files = vec![out.join("scan.csv"), out.join("scan_fit.json"), out.join("metadata.json")];
    write_table(&files[0], &["alpha", "n", "inertia", "min_xi2", "t_min", "depolarized_first"], &rows)?;
    write_json(&files[1], &summary)?;
    write_metadata(out, Command::Scan, cfg, workers, None)?;
    let warnings = summary
        .cells
        .iter()
        .filter(|c| c.depolarized_first)
        .map(|c| format!("alpha = {}, N = {}: depolarized before the squeezing minimum", c.alpha, c.sites))
        .collect();
    Ok(RunOutput { files, warnings })
}

#[derive(Serialize)]
struct TosOutput<'a> {
    sites: usize,
    e0: f64,
    inertia_tos: f64,
    inertia_bare: f64,
    residual: f64,
    warning: bool,
    reference: Option<TosReference>,
    minima: &'a [(f64, f64)],
}

pub fn cmd_tos(cfg: &ValidatedConfig, out: &Path, workers: usize) -> Result<RunOutput, CliError> {
    let fit = fit_tower(&cfg.model, cfg.config.tos.max_jz)?;
    let result = TosOutput {
        sites: fit.sites,
        e0: fit.e0,
        inertia_tos: fit.inertia.value(),
        inertia_bare: bare_inertia(&cfg.model).value(),
        residual: fit.residual,
        warning: fit.warning,
        reference: fit.reference(),
        minima: &fit.minima,
    };
    let files = vec![out.join("tos.json"), out.join("metadata.json")];
    write_json(&files[0], &result)?;
    write_metadata(out, Command::Tos, cfg, workers, None)?;
    let warnings = if fit.warning {
        vec![format!("sector minima are not quadratic in J^z (relative residual {:e})", fit.residual)]
    } else {
        Vec::new()
    };
    Ok(RunOutput { files, warnings })
}

fn relative(rsw: f64, ed: f64) -> f64 {
    if rsw == ed {
        0.0
    } else {
        (rsw - ed) / ed.abs()
    }
}

pub fn exact_series(
    model: &LatticeModel,
    grid: &[f64],
    choice: PropagationChoice,
    options: &RecordOptions,
) -> Result<Vec<ObservableRecord>, CliError> {
    let propagation = match choice {
        PropagationChoice::Auto => Propagation::auto(model.num_sites()),
        PropagationChoice::Dense => Propagation::Dense,
        PropagationChoice::Krylov => Propagation::Krylov(KrylovSettings::default()),
    };
    let propagator = ExactPropagator::new(XxzHamiltonian::new(model)?, propagation)?;
    Ok(exact_records(&propagator, model, grid, options)?)
}

pub fn cmd_oracle_compare(cfg: &ValidatedConfig, out: &Path, workers: usize) -> Result<RunOutput, CliError> {
    let (inertia, info) = resolve_inertia(&cfg.config, &cfg.model)?;
    let grid = time_grid(cfg, inertia)?;
    let options = record_options(cfg)?;
    let rsw = rsw_records(&cfg.model, inertia, &grid, options.clone())?;
    let ed = exact_series(&cfg.model, &grid, cfg.config.oracle.propagation, &options)?;
    let header = [
        "t", "jx_ed", "jx_rsw", "jx_rel", "var_jx_ed", "var_jx_rsw", "var_jx_rel", "xi2_ed", "xi2_rsw", "xi2_rel",
        "renyi2_ed", "renyi2_rsw", "renyi2_rel",
    ];
    let rows: Vec<Vec<String>> = rsw
        .iter()
        .zip(&ed)
        .map(|(r, e)| {
            let s2 = |x: &ObservableRecord| x.renyi2.map_or(f64::NAN, |s| s.total);
            [
                r.time,
                e.mean_jx.total,
                r.mean_jx.total,
                relative(r.mean_jx.total, e.mean_jx.total),
                e.var_jx.total,
                r.var_jx.total,
                relative(r.var_jx.total, e.var_jx.total),
                e.squeezing,
                r.squeezing,
                relative(r.squeezing, e.squeezing),
                s2(e),
                s2(r),
                relative(s2(r), s2(e)),
            ]
            .iter()
            .map(|v| v.to_string())
            .collect()
        })
        .collect();
    let files = vec![
        out.join("compare.csv"),
        out.join("ed_series.csv"),
        out.join("rsw_series.csv"),
        out.join("metadata.json"),
    ];
    write_table(&files[0], &header, &rows)?;
    write_series(&files[1], &ed)?;
    write_series(&files[2], &rsw)?;
    write_metadata(out, Command::OracleCompare, cfg, workers, Some(&info))?;
    Ok(RunOutput { files, warnings: flag_warnings(&rsw) })
}
