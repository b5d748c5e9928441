//! Run configuration. Files are JSON; every field except `lattice` has a
//! default, and the resolved config (defaults filled in) is echoed into
//! each run's metadata.

use std::path::Path;

use serde::{Deserialize, Serialize};

use rsw_core::entropy::Region;
use rsw_core::lattice::{build_model, DistanceConvention, Geometry, LatticeModel, LatticeSpec, SpinLength};
use rsw_core::rotor::TosReference;

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub lattice: LatticeSection,
    #[serde(default)]
    pub inertia: InertiaMode,
    #[serde(default)]
    pub time: TimeGrid,
    #[serde(default)]
    pub observables: ObservableSelection,
    #[serde(default)]
    pub region: RegionSpec,
    #[serde(default)]
    pub scan: ScanSection,
    #[serde(default)]
    pub tos: TosSection,
    #[serde(default)]
    pub oracle: OracleSection,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSection {
    pub dimension: usize,
    pub linear_size: usize,
    pub alpha: f64,
    #[serde(default = "one")]
    pub coupling: f64,
    #[serde(default)]
    pub anisotropy: f64,
    #[serde(default = "half")]
    pub spin: f64,
    #[serde(default)]
    pub convention: DistanceConvention,
}

fn one() -> f64 {
    1.0
}

fn half() -> f64 {
    0.5
}

impl LatticeSection {
    pub fn spec(&self) -> Result<LatticeSpec, String> {
        let spin = SpinLength::from_value(self.spin).map_err(|e| format!("lattice.spin: {e}"))?;
        Ok(LatticeSpec {
            dimension: self.dimension,
            linear_size: self.linear_size,
            alpha: self.alpha,
            coupling: self.coupling,
            anisotropy: self.anisotropy,
            spin,
            convention: self.convention,
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InertiaMode {
    #[default]
    Bare,
    /// Rescale a reference triple, e.g. one emitted by `tos`.
    TosScaled { reference: TosReference },
    /// Fit the tower of states on a reference lattice of linear size
    /// `reference_size` with the same couplings, then rescale.
    TosExact {
        reference_size: usize,
        #[serde(default)]
        max_jz: Option<f64>,
    },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TimeUnit {
    /// Times in units of `1/J`.
    #[default]
    InverseJ,
    /// Times in units of `π I` of the run's rotor; converted once the
    /// inertia is known.
    PiInertia,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TimePoints {
    Range { start: f64, stop: f64, step: f64 },
    List { times: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    #[serde(flatten)]
    pub points: TimePoints,
    #[serde(default)]
    pub unit: TimeUnit,
}

impl Default for TimeGrid {
    fn default() -> Self {
        Self { points: TimePoints::Range { start: 0.0, stop: 1.0, step: 0.05 }, unit: TimeUnit::InverseJ }
    }
}

impl TimeGrid {
    /// Grid in the configured unit; a range is `start + i step` for
    /// `i = 0..=round((stop - start)/step)`.
    pub fn raw_points(&self) -> Vec<f64> {
        match &self.points {
            TimePoints::List { times } => times.clone(),
            TimePoints::Range { start, stop, step } => {
                let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
                (0..count).map(|i| start + i as f64 * step).collect()
            }
        }
    }

    pub fn points(&self, pi_inertia: f64) -> Vec<f64> {
        let scale = match self.unit {
            TimeUnit::InverseJ => 1.0,
            TimeUnit::PiInertia => pi_inertia,
        };
        self.raw_points().into_iter().map(|t| t * scale).collect()
    }

    fn check(&self, issues: &mut Vec<String>) {
        match &self.points {
            TimePoints::Range { start, stop, step } => {
                if !(start.is_finite() && stop.is_finite() && step.is_finite()) {
                    issues.push("time: start, stop and step must be finite".into());
                } else if *step <= 0.0 {
                    issues.push("time.step must be positive".into());
                } else if stop < start {
                    issues.push("time.stop must not precede time.start".into());
                } else if (stop - start) / step > 1e7 {
                    issues.push("time: more than 10^7 points".into());
                }
            }
            TimePoints::List { times } => {
                if times.iter().any(|t| !t.is_finite()) || times.windows(2).any(|w| w[1] <= w[0]) {
                    issues.push("time.times must be finite and strictly increasing".into());
                }
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservableSelection {
    #[serde(default)]
    pub correlations: bool,
    #[serde(default = "yes")]
    pub entropy: bool,
}

fn yes() -> bool {
    true
}

impl Default for ObservableSelection {
    fn default() -> Self {
        Self { correlations: false, entropy: true }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum RegionSpec {
    /// `L x L/2` in 2d, the first `L/2` sites in 1d.
    #[default]
    Half,
    /// `lx x ly` rectangle at the origin (`ly` ignored in 1d).
    Rectangle { lx: usize, ly: usize },
}

impl RegionSpec {
    pub fn region(&self, geometry: &Geometry) -> Result<Region, String> {
        let region = match *self {
            RegionSpec::Half => Region::half_system(geometry),
            RegionSpec::Rectangle { lx, ly } => Region::rectangle(geometry, lx, ly).map_err(|e| e.to_string())?,
        };
        if region.is_empty() || region.len() >= geometry.num_sites() {
            return Err(format!("region: {} of {} sites is not a proper subsystem", region.len(), geometry.num_sites()));
        }
        Ok(region)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSection {
    #[serde(default = "default_alphas")]
    pub alphas: Vec<f64>,
    #[serde(default = "default_sizes")]
    pub sizes: Vec<usize>,
    /// Coarse grid points over `(0, π I]` before the local refinement.
    #[serde(default = "default_coarse")]
    pub coarse_points: usize,
    /// Slope level that marks the crossover between the two regimes.
    #[serde(default = "default_crossover")]
    pub crossover_slope: f64,
}

fn default_alphas() -> Vec<f64> {
    vec![1.0, 1.5, 2.0, 2.5, 3.0]
}

fn default_sizes() -> Vec<usize> {
    vec![64, 128, 256, 512, 1024]
}

fn default_coarse() -> usize {
    4000
}

fn default_crossover() -> f64 {
    -1.0 / 3.0
}

impl Default for ScanSection {
    fn default() -> Self {
        Self {
            alphas: default_alphas(),
            sizes: default_sizes(),
            coarse_points: default_coarse(),
            crossover_slope: default_crossover(),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TosSection {
    /// Largest `|J^z|` entering the fit; all sectors when absent.
    #[serde(default)]
    pub max_jz: Option<f64>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PropagationChoice {
    #[default]
    Auto,
    Dense,
    Krylov,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSection {
    #[serde(default)]
    pub propagation: PropagationChoice,
}

/// A config that passed validation, with the model already built.
#[derive(Clone, Debug)]
pub struct ValidatedConfig {
    pub config: RunConfig,
    pub model: LatticeModel,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(vec![format!("parse: {e}")]))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(vec![format!("cannot read {}: {e}", path.display())]))?;
        Self::from_json(&text)
    }

    /// Checks everything that can be checked without running, reporting all
    /// problems at once.
    pub fn validate(self) -> Result<ValidatedConfig, CliError> {
        let mut issues = Vec::new();
        let mut model = None;
        match self.lattice.spec() {
            Err(e) => issues.push(e),
            Ok(spec) => match spec.validate() {
                Err(e) => issues.push(format!("lattice: {e}")),
                Ok(geometry) => {
                    if self.observables.entropy {
                        if let Err(e) = self.region.region(&geometry) {
                            issues.push(e);
                        }
                    }
                    match build_model(&spec) {
                        Ok(m) => model = Some(m),
                        Err(e) => issues.push(format!("lattice: {e}")),
                    }
                }
            },
        }
        self.time.check(&mut issues);
        match &self.inertia {
            InertiaMode::Bare => {}
            InertiaMode::TosScaled { reference } => {
                if reference.sites < 2 || !(reference.j0.is_finite() && reference.j0 > 0.0) {
                    issues.push("inertia.reference: needs sites >= 2 and a positive j0".into());
                }
                if !(reference.inertia.is_finite() && reference.inertia != 0.0) {
                    issues.push("inertia.reference.inertia must be finite and non-zero".into());
                }
            }
            InertiaMode::TosExact { reference_size, .. } => {
                let sites = reference_size.pow(self.lattice.dimension.min(2) as u32);
                if sites > rsw_core::ed::MAX_SITES || *reference_size < 2 {
                    issues.push(format!(
                        "inertia.reference_size: reference lattice of {sites} sites outside 2..={}",
                        rsw_core::ed::MAX_SITES
                    ));
                }
                if self.lattice.spin != 0.5 {
                    issues.push("inertia: tos-exact needs spin 1/2".into());
                }
            }
        }
        if self.scan.alphas.is_empty() || self.scan.alphas.iter().any(|a| !(a.is_finite() && *a >= 0.0)) {
            issues.push("scan.alphas must be a non-empty list of non-negative numbers".into());
        }
        if self.scan.sizes.iter().any(|&n| n < 2) || self.scan.sizes.is_empty() {
            issues.push("scan.sizes must be a non-empty list of sizes >= 2".into());
        }
        if self.scan.coarse_points < 3 {
            issues.push("scan.coarse_points must be at least 3".into());
        }
        if issues.is_empty() {
            Ok(ValidatedConfig { model: model.expect("model built when no issues"), config: self })
        } else {
            Err(CliError::Config(issues))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg = RunConfig::from_json(r#"{"lattice": {"dimension": 2, "linear_size": 4, "alpha": 3}}"#).unwrap();
        assert_eq!(cfg.inertia, InertiaMode::Bare);
        assert_eq!(cfg.time.raw_points().len(), 21);
        let v = cfg.validate().unwrap();
        assert_eq!(v.model.num_sites(), 16);
    }

    #[test]
    fn errors_are_aggregated() {
        let cfg = RunConfig::from_json(
            r#"{"lattice": {"dimension": 3, "linear_size": 4, "alpha": 3},
                "time": {"start": 0, "stop": 1, "step": -1},
                "scan": {"sizes": [1]}}"#,
        )
        .unwrap();
        match cfg.validate() {
            Err(CliError::Config(issues)) => assert!(issues.len() >= 3, "{issues:?}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_fields_are_rejected() {
        assert!(RunConfig::from_json(r#"{"lattice": {"dimension": 1, "linear_size": 4, "alpha": 1, "beta": 2}}"#).is_err());
    }

    #[test]
    fn inertia_modes_parse() {
        let cfg = RunConfig::from_json(
            r#"{"lattice": {"dimension": 2, "linear_size": 10, "alpha": 3},
                "inertia": {"mode": "tos-scaled", "reference": {"sites": 16, "j0": 6.06, "inertia": 2.42}},
                "time": {"times": [0, 0.5], "unit": "pi-inertia"}}"#,
        )
        .unwrap();
        assert!(matches!(cfg.inertia, InertiaMode::TosScaled { .. }));
        assert_eq!(cfg.time.points(2.0), vec![0.0, 1.0]);
    }
}
