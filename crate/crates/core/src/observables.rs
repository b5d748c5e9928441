//! Recombination of rotor and spin-wave sectors into collective observables.
//!
//! At the order kept in the decomposition,
//!
//! * `<J^x> = <K^x> - N_FM`,
//! * `Var(J^x) = Var(K^x) - 2 (NS - <K^x>) N_FM - N_FM²`,
//! * `Var(J^⊥) = Var(K^⊥)`, so squeezing uses the rotor `(K^y, K^z)` covariance.
//!
//! Correlations follow from `S_i^a = K^a/N + δS_i^a`, where the
//! finite-momentum fluctuations are linear in the bosons,
//! `δS_i^y = sqrt(2S)/2 (δb_i + δb_i†)` and `δS_i^z = sqrt(2S)/(2i) (δb_i - δb_i†)`,
//! and `[δb_i, δb_j†] = δ_ij - 1/N` because `q = 0` is removed. This gives
//!
//! ```text
//! C^yy(d) = <(K^y)²>/N² + (S/2) [δ_d0 - 1/N + 2 G(d) + 2 Re F(d)]
//! C^zz(d) = <(K^z)²>/N² + (S/2) [δ_d0 - 1/N + 2 G(d) - 2 Re F(d)]
//! ```
//!
//! The rotor part of `C^zz` is static (`(K^z)²` commutes with the rotor
//! Hamiltonian); it cancels the `-S/(2N)` vacuum term so both maps vanish
//! at `t = 0` for `d ≠ 0`. Summed over all `d` the spin-wave parts vanish
//! and `N Σ_d C^zz(d) = <(K^z)²> = Var(J^z)`.

use alloc::vec::Vec;

use crate::entropy::{renyi2_total, EntropySplit, Region};
use crate::lattice::LatticeModel;
use crate::rotor::{Inertia, RotorMoments, RotorState};
use crate::spinwave::{realspace_green, GreenFunctions, SwCoefficients, SwModeSet};
use crate::{Error, Result};

/// `N_FM / N` above which a record is marked as extrapolated.
pub const EXTRAPOLATION_THRESHOLD: f64 = 0.1;

/// An observable split into its rotor and spin-wave contributions.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Split {
    pub rotor: f64,
    pub spin_wave: f64,
    pub total: f64,
}

impl Split {
    pub fn new(rotor: f64, spin_wave: f64) -> Self {
        Self { rotor, spin_wave, total: rotor + spin_wave }
    }

    /// Exact value with no sector breakdown (the parts are NaN).
    pub fn exact(total: f64) -> Self {
        Self { rotor: f64::NAN, spin_wave: f64::NAN, total }
    }
}

impl From<EntropySplit> for Split {
    fn from(e: EntropySplit) -> Self {
        Self { rotor: e.rotor, spin_wave: e.spin_wave, total: e.total }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CorrelationEntry {
    /// Displacement index in row-major order.
    pub index: usize,
    /// Minimum-image representative `(dx, dy)`.
    pub displacement: [i64; 2],
    pub yy: Split,
    pub zz: Split,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ValidityFlags {
    /// `N_FM / N` exceeds [`EXTRAPOLATION_THRESHOLD`].
    pub extrapolated: bool,
    /// The combined `Var(J^x)` went negative.
    pub negative_variance: bool,
}

impl ValidityFlags {
    pub fn any(&self) -> bool {
        self.extrapolated || self.negative_variance
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ObservableRecord {
    pub time: f64,
    pub mean_jx: Split,
    pub var_jx: Split,
    pub mean_jz: f64,
    pub var_jz: f64,
    pub min_transverse_variance: f64,
    /// `ξ_R²`, `+∞` once the collective spin is depolarized.
    pub squeezing: f64,
    /// `<b_0† b_0> / N`
    pub n0_density: f64,
    pub nfm_density: f64,
    pub correlations: Vec<CorrelationEntry>,
    pub renyi2: Option<Split>,
    pub flags: ValidityFlags,
}

impl ObservableRecord {
    pub fn correlation(&self, index: usize) -> Option<&CorrelationEntry> {
        self.correlations.iter().find(|c| c.index == index)
    }
}

pub fn mean_jx(rotor: &RotorMoments, nfm: f64) -> Split {
    Split::new(rotor.mean_x, -nfm)
}

/// Returns the split variance and whether the combination went negative.
pub fn var_jx(rotor: &RotorMoments, nfm: f64, sites: usize, spin: f64) -> (Split, bool) {
    let length = sites as f64 * spin;
    let split = Split::new(rotor.var_x, -2.0 * (length - rotor.mean_x) * nfm - nfm * nfm);
    (split, split.total < -1e-10 * length * length)
}

/// `ξ_R² = N min_⊥ Var(K^⊥) / <J^x>²`. The quench starts along `+x` and
/// the spin-wave term only shortens the spin, so `<J^x> <= 0` means the
/// collective spin is depolarized and the result is `+∞`.
pub fn squeezing(rotor: &RotorMoments, nfm: f64, sites: usize) -> f64 {
    let jx = mean_jx(rotor, nfm).total;
    let n = sites as f64;
    if jx <= 1e-12 * n {
        return f64::INFINITY;
    }
    n * rotor.min_transverse_variance() / (jx * jx)
}

fn sw_quadrature(green: &GreenFunctions, d: usize, sites: usize, spin: f64, sign: f64) -> f64 {
    let onsite = if d == 0 { 1.0 } else { 0.0 };
    0.5 * spin * (onsite - 1.0 / sites as f64 + 2.0 * green.g(d) + sign * 2.0 * green.f(d).re)
}

pub fn corr_yy(rotor: &RotorMoments, green: &GreenFunctions, d: usize, sites: usize, spin: f64) -> Split {
    let n = sites as f64;
    Split::new(rotor.second_y / (n * n), sw_quadrature(green, d, sites, spin, 1.0))
}

pub fn corr_zz(rotor: &RotorMoments, green: &GreenFunctions, d: usize, sites: usize, spin: f64) -> Split {
    let n = sites as f64;
    Split::new(rotor.second_z / (n * n), sw_quadrature(green, d, sites, spin, -1.0))
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RecordOptions {
    pub correlations: bool,
    pub entropy_region: Option<Region>,
}

impl RecordOptions {
    pub fn full(region: Region) -> Self {
        Self { correlations: true, entropy_region: Some(region) }
    }
}

/// Everything needed to evaluate a record at any time; each time point is
/// independent, so callers may evaluate a grid in any order or in parallel.
#[derive(Clone, Debug)]
pub struct DynamicsContext {
    model: LatticeModel,
    inertia: Inertia,
    initial: RotorState,
    spin_waves: SwCoefficients,
    options: RecordOptions,
}

impl DynamicsContext {
    pub fn new(model: &LatticeModel, inertia: Inertia, options: RecordOptions) -> Result<Self> {
        if let Some(region) = &options.entropy_region {
            if region.is_empty() || region.len() >= model.num_sites() {
                return Err(Error::InvalidBipartition { subsystem: region.len(), sites: model.num_sites() });
            }
        }
        Ok(Self {
            initial: RotorState::css_x(model.num_sites(), model.spin())?,
            spin_waves: SwCoefficients::new(model),
            model: model.clone(),
            inertia,
            options,
        })
    }

    pub fn model(&self) -> &LatticeModel {
        &self.model
    }

    pub fn inertia(&self) -> Inertia {
        self.inertia
    }

    pub fn spin_waves(&self) -> &SwCoefficients {
        &self.spin_waves
    }

    pub fn rotor_at(&self, t: f64) -> RotorState {
        self.initial.evolve(self.inertia, t)
    }

    pub fn modes_at(&self, t: f64) -> SwModeSet {
        self.spin_waves.evolve(t)
    }

    pub fn record_at(&self, t: f64) -> Result<ObservableRecord> {
        let sites = self.model.num_sites();
        let n = sites as f64;
        let spin = self.model.spin().value();
        let rotor = self.rotor_at(t);
        let k = rotor.moments();
        let modes = self.modes_at(t);
        let nfm = modes.total_population();

        let (var, negative_variance) = var_jx(&k, nfm, sites, spin);
        let need_green = self.options.correlations || self.options.entropy_region.is_some();
        let green = need_green.then(|| realspace_green(&modes, &self.model));

        let mut correlations = Vec::new();
        if self.options.correlations {
            let green = green.as_ref().expect("green functions computed");
            let geometry = self.model.geometry();
            correlations.reserve(sites);
            for d in 0..sites {
                correlations.push(CorrelationEntry {
                    index: d,
                    displacement: geometry.signed_displacement(d),
                    yy: corr_yy(&k, green, d, sites, spin),
                    zz: corr_zz(&k, green, d, sites, spin),
                });
            }
        }
        let renyi2 = match (&self.options.entropy_region, &green) {
            (Some(region), Some(green)) => Some(renyi2_total(&rotor, self.model.geometry(), green, region)?.into()),
            _ => None,
        };

        Ok(ObservableRecord {
            time: t,
            mean_jx: mean_jx(&k, nfm),
            var_jx: var,
            mean_jz: k.mean_z,
            var_jz: k.var_z(),
            min_transverse_variance: k.min_transverse_variance(),
            squeezing: squeezing(&k, nfm, sites),
            n0_density: (n * spin - k.mean_x) / n,
            nfm_density: nfm / n,
            correlations,
            renyi2,
            flags: ValidityFlags { extrapolated: nfm / n > EXTRAPOLATION_THRESHOLD, negative_variance },
        })
    }
}

pub fn validate_time_grid(grid: &[f64]) -> Result<()> {
    if grid.iter().any(|t| !t.is_finite()) || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::NonMonotoneTimeGrid);
    }
    Ok(())
}

/// One record per grid time, in grid order.
pub fn run_dynamics(
    model: &LatticeModel,
    inertia: Inertia,
    grid: &[f64],
    options: RecordOptions,
) -> Result<Vec<ObservableRecord>> {
    validate_time_grid(grid)?;
    if grid.is_empty() {
        return Ok(Vec::new());
    }
    let ctx = DynamicsContext::new(model, inertia, options)?;
    grid.iter().map(|&t| ctx.record_at(t)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_model, LatticeSpec};
    use crate::rotor::bare_inertia;
    use approx::assert_relative_eq;

    fn dipolar(l: usize) -> (LatticeModel, Inertia) {
        let model = build_model(&LatticeSpec::dipolar_square(l)).unwrap();
        let inertia = bare_inertia(&model);
        (model, inertia)
    }

    #[test]
    fn empty_grid_gives_empty_series() {
        let (model, inertia) = dipolar(4);
        assert!(run_dynamics(&model, inertia, &[], RecordOptions::default()).unwrap().is_empty());
        assert_eq!(
            run_dynamics(&model, inertia, &[0.0, 0.0], RecordOptions::default()).unwrap_err(),
            Error::NonMonotoneTimeGrid
        );
    }

    #[test]
    fn initial_record() {
        let (model, inertia) = dipolar(4);
        let region = Region::half_system(model.geometry());
        let rec = &run_dynamics(&model, inertia, &[0.0], RecordOptions::full(region)).unwrap()[0];
        assert_relative_eq!(rec.mean_jx.total, 8.0, epsilon = 1e-12);
        assert!(rec.var_jx.total.abs() < 1e-9);
        assert_relative_eq!(rec.squeezing, 1.0, epsilon = 1e-12);
        let s = rec.renyi2.unwrap();
        assert!(s.total.abs() < 1e-12);
        for c in &rec.correlations[1..] {
            assert!(c.yy.total.abs() < 1e-14 && c.zz.total.abs() < 1e-14);
        }
        assert_relative_eq!(rec.correlations[0].zz.total, 0.25, epsilon = 1e-14);
        assert!(!rec.flags.any());
    }

    #[test]
    fn frozen_rotor_keeps_polarization() {
        let model = build_model(&LatticeSpec::dipolar_square(4).with_anisotropy(1.0)).unwrap();
        let inertia = bare_inertia(&model);
        let recs = run_dynamics(&model, inertia, &[0.0, 1.0, 5.0], RecordOptions::default()).unwrap();
        for r in recs {
            assert_relative_eq!(r.mean_jx.total, 8.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn sum_rule_and_conservation() {
        let (model, inertia) = dipolar(6);
        let ctx = DynamicsContext::new(&model, inertia, RecordOptions { correlations: true, entropy_region: None }).unwrap();
        let n = model.num_sites() as f64;
        for t in [0.0, 0.4, 1.3, 3.7] {
            let r = ctx.record_at(t).unwrap();
            assert!(r.mean_jz.abs() < 1e-8);
            assert!((r.var_jz - n / 4.0).abs() < 1e-8);
            let sum: f64 = r.correlations.iter().map(|c| c.zz.total).sum();
            assert!((n * sum - n / 4.0).abs() < 1e-8, "t={t} sum={sum}");
        }
    }

    #[test]
    fn squeezing_sentinel() {
        let (model, inertia) = dipolar(4);
        let ctx = DynamicsContext::new(&model, inertia, RecordOptions::default()).unwrap();
        let mut k = ctx.rotor_at(0.0).moments();
        k.mean_x = 0.0;
        assert_eq!(squeezing(&k, 0.0, 16), f64::INFINITY);
    }

    #[test]
    fn infinite_range_is_rotor_dominated() {
        let model = build_model(&LatticeSpec::xx(1, 40, 0.0)).unwrap();
        let inertia = bare_inertia(&model);
        assert_relative_eq!(inertia.value(), 1.0, epsilon = 1e-12);
        let ctx = DynamicsContext::new(&model, inertia, RecordOptions::default()).unwrap();
        for t in [0.2, 1.0, 2.5] {
            let r = ctx.record_at(t).unwrap();
            assert!((r.mean_jx.total - r.mean_jx.rotor).abs() < 0.05 * 40.0 / 40.0);
        }
    }
}
