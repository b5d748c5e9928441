use alloc::vec::Vec;

#[allow(unused_imports)] // float methods when std is absent
use num_traits::Float;

use super::hamiltonian::XxzHamiltonian;
use super::krylov::sector_ground_energy;
use crate::lattice::LatticeModel;
use crate::rotor::{Inertia, TosReference};
use crate::Result;

/// Relative RMS residual above which the tower is reported as non-quadratic.
pub const TOWER_RESIDUAL_WARNING: f64 = 5e-3;

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TowerFit {
    pub sites: usize,
    pub j0: f64,
    pub e0: f64,
    pub inertia: Inertia,
    /// RMS deviation from the quadratic over the spread of the fitted minima.
    pub residual: f64,
    pub warning: bool,
    /// `(J^z, lowest energy)` for every fitted sector, `J^z >= 0`.
    pub minima: Vec<(f64, f64)>,
}

impl TowerFit {
    pub fn reference(&self) -> Option<TosReference> {
        match self.inertia {
            Inertia::Finite(inertia) => Some(TosReference { sites: self.sites, j0: self.j0, inertia }),
            Inertia::Frozen => None,
        }
    }
}

/// Least-squares fit of `E_min(J^z) = E_0 + (J^z)²/(2 I)` over the sectors
/// with `|J^z| <= max_jz` (all sectors when `None`). Every signed `J^z`
/// counts once, so `±M` both enter for `M ≠ 0`.
pub fn fit_tower(model: &LatticeModel, max_jz: Option<f64>) -> Result<TowerFit> {
    let ham = XxzHamiltonian::new(model)?;
    let n = ham.sites();
    let basis = ham.basis().clone();
    let mut minima = Vec::new();
    // global spin flip maps sector k to n - k
    for k in n.div_ceil(2)..=n {
        let m = basis.magnetization(k);
        if max_jz.is_some_and(|cap| m > cap + 1e-9) {
            continue;
        }
        minima.push((m, sector_ground_energy(&ham, k)?));
    }
    let mut points = Vec::new();
    for &(m, e) in &minima {
        points.push((m * m, e));
        if m != 0.0 {
            points.push((m * m, e));
        }
    }
    let count = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / count;
    let mean_e = points.iter().map(|p| p.1).sum::<f64>() / count;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxe: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_e)).sum();
    let slope = if sxx > 0.0 { sxe / sxx } else { 0.0 };
    let e0 = mean_e - slope * mean_x;
    let rms = (points.iter().map(|p| (p.1 - e0 - slope * p.0).powi(2)).sum::<f64>() / count).sqrt();
    let (lo, hi) = points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p.1), hi.max(p.1)));
    let spread = hi - lo;
    let residual = if spread > 0.0 { rms / spread } else { 0.0 };
    let inertia = if slope.abs() <= 1e-14 * mean_e.abs().max(1.0) {
        Inertia::Frozen
    } else {
        Inertia::Finite(0.5 / slope)
    };
    Ok(TowerFit {
        sites: n,
        j0: model.j0(),
        e0,
        inertia,
        residual,
        warning: residual > TOWER_RESIDUAL_WARNING || slope <= 0.0,
        minima,
    })
}
