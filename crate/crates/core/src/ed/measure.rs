use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;
#[allow(unused_imports)] // float methods when std is absent
use num_traits::Float;

use super::{EdState, ExactPropagator};
use crate::lattice::LatticeModel;
use crate::math::min_eigenvalue_2x2;
use crate::observables::{CorrelationEntry, ObservableRecord, RecordOptions, Split, ValidityFlags};
use crate::Result;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// `S_i^y ψ` at basis state `s`: `-i/2 ψ[s ^ bit]` if site `i` is up in
/// `s`, `+i/2 ψ[s ^ bit]` otherwise.
#[inline]
fn sy_element(psi: &[Complex64], s: usize, bit: usize) -> Complex64 {
    let flipped = psi[s ^ bit];
    if s & bit != 0 {
        -0.5 * I * flipped
    } else {
        0.5 * I * flipped
    }
}

#[inline]
fn sz_value(s: usize, bit: usize) -> f64 {
    if s & bit != 0 {
        0.5
    } else {
        -0.5
    }
}

/// Exact first and second collective moments.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExactMoments {
    pub mean_x: f64,
    pub mean_y: f64,
    pub mean_z: f64,
    pub var_x: f64,
    pub var_y: f64,
    pub var_z: f64,
    pub cov_yz: f64,
}

impl ExactMoments {
    pub fn of(psi: &[Complex64], sites: usize) -> Self {
        let dim = psi.len();
        let mut jx = vec![Complex64::new(0.0, 0.0); dim];
        let mut jy = vec![Complex64::new(0.0, 0.0); dim];
        let mut jz = vec![Complex64::new(0.0, 0.0); dim];
        for s in 0..dim {
            let mut x = Complex64::new(0.0, 0.0);
            let mut y = Complex64::new(0.0, 0.0);
            let mut z = 0.0;
            for i in 0..sites {
                let bit = 1 << i;
                x += 0.5 * psi[s ^ bit];
                y += sy_element(psi, s, bit);
                z += sz_value(s, bit);
            }
            jx[s] = x;
            jy[s] = y;
            jz[s] = z * psi[s];
        }
        let mean_x = dot(psi, &jx).re;
        let mean_y = dot(psi, &jy).re;
        let mean_z = dot(psi, &jz).re;
        let norm = |v: &[Complex64]| v.iter().map(|c| c.norm_sqr()).sum::<f64>();
        Self {
            mean_x,
            mean_y,
            mean_z,
            var_x: norm(&jx) - mean_x * mean_x,
            var_y: norm(&jy) - mean_y * mean_y,
            var_z: norm(&jz) - mean_z * mean_z,
            cov_yz: dot(&jy, &jz).re - mean_y * mean_z,
        }
    }

    pub fn min_transverse_variance(&self) -> f64 {
        min_eigenvalue_2x2(self.var_y, self.cov_yz, self.var_z)
    }
}

fn correlations(psi: &[Complex64], model: &LatticeModel) -> Vec<CorrelationEntry> {
    let n = model.num_sites();
    let geometry = model.geometry();
    let mut yy = vec![0.0; n];
    let mut zz = vec![0.0; n];
    let mut phi = vec![Complex64::new(0.0, 0.0); psi.len()];
    for i in 0..n {
        let bit_i = 1 << i;
        for s in 0..psi.len() {
            phi[s] = sy_element(psi, s, bit_i);
        }
        for j in 0..n {
            let bit_j = 1 << j;
            let mut y = 0.0;
            let mut z = 0.0;
            for s in 0..psi.len() {
                y += (phi[s].conj() * sy_element(psi, s, bit_j)).re;
                z += psi[s].norm_sqr() * sz_value(s, bit_i) * sz_value(s, bit_j);
            }
            let d = geometry.displacement(i, j);
            yy[d] += y / n as f64;
            zz[d] += z / n as f64;
        }
    }
    (0..n)
        .map(|d| CorrelationEntry {
            index: d,
            displacement: geometry.signed_displacement(d),
            yy: Split::exact(yy[d]),
            zz: Split::exact(zz[d]),
        })
        .collect()
}

/// `-ln Tr ρ_A²` from the explicit partial trace.
pub fn renyi2_partial_trace(psi: &[Complex64], sites: usize, region: &[usize]) -> f64 {
    let inside: Vec<usize> = region.to_vec();
    let outside: Vec<usize> = (0..sites).filter(|s| !region.contains(s)).collect();
    let compress = |s: usize, list: &[usize]| {
        list.iter().enumerate().fold(0usize, |acc, (k, &site)| acc | (((s >> site) & 1) << k))
    };
    let rows = 1 << inside.len();
    let cols = 1 << outside.len();
    let mut m = DMatrix::<Complex64>::zeros(rows, cols);
    for (s, &amp) in psi.iter().enumerate() {
        m[(compress(s, &inside), compress(s, &outside))] = amp;
    }
    let rho = if rows <= cols { &m * m.adjoint() } else { m.adjoint() * &m };
    let purity: f64 = rho.iter().map(|c| c.norm_sqr()).sum();
    (-purity.ln()).max(0.0)
}

/// Exact record in the same schema as the decomposed one. There is no
/// rotor/spin-wave breakdown, so the parts of every split and the boson
/// densities are NaN.
pub fn exact_observables(state: &EdState, model: &LatticeModel, options: &RecordOptions) -> ObservableRecord {
    let sites = state.sites();
    let psi = state.to_full();
    let moments = ExactMoments::of(&psi, sites);
    let n = sites as f64;
    let min_var = moments.min_transverse_variance();
    let squeezing = if moments.mean_x.abs() <= 1e-12 * n {
        f64::INFINITY
    } else {
        n * min_var / (moments.mean_x * moments.mean_x)
    };
    let correlations = if options.correlations { correlations(&psi, model) } else { Vec::new() };
    let renyi2 = options
        .entropy_region
        .as_ref()
        .map(|region| Split::exact(renyi2_partial_trace(&psi, sites, region.sites())));
    ObservableRecord {
        time: state.time(),
        mean_jx: Split::exact(moments.mean_x),
        var_jx: Split::exact(moments.var_x),
        mean_jz: moments.mean_z,
        var_jz: moments.var_z,
        min_transverse_variance: min_var,
        squeezing,
        n0_density: f64::NAN,
        nfm_density: f64::NAN,
        correlations,
        renyi2,
        flags: ValidityFlags { extrapolated: false, negative_variance: moments.var_x < 0.0 },
    }
}

/// Exact records on a strictly increasing grid, starting from `CSS_x`.
pub fn exact_records(
    propagator: &ExactPropagator,
    model: &LatticeModel,
    grid: &[f64],
    options: &RecordOptions,
) -> Result<Vec<ObservableRecord>> {
    let initial = EdState::css_x(propagator.hamiltonian().basis().clone());
    let states = propagator.evolve_grid(&initial, grid)?;
    Ok(states.iter().map(|s| exact_observables(s, model, options)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ed::{Propagation, SectorBasis, XxzHamiltonian};
    use crate::entropy::Region;
    use crate::lattice::{build_model, LatticeSpec, SpinLength};
    use crate::rotor::{bare_inertia, RotorState};
    use alloc::sync::Arc;
    use approx::assert_relative_eq;

    #[test]
    fn css_moments() {
        let psi = EdState::css_x(Arc::new(SectorBasis::new(6).unwrap())).to_full();
        let m = ExactMoments::of(&psi, 6);
        assert_relative_eq!(m.mean_x, 3.0, epsilon = 1e-12);
        assert_relative_eq!(m.var_y, 1.5, epsilon = 1e-12);
        assert_relative_eq!(m.var_z, 1.5, epsilon = 1e-12);
        assert!(m.var_x.abs() < 1e-12 && m.cov_yz.abs() < 1e-12 && m.mean_y.abs() < 1e-12);
    }

    #[test]
    fn infinite_range_matches_rotor() {
        let model = build_model(&LatticeSpec::xx(1, 8, 0.0)).unwrap();
        let inertia = bare_inertia(&model);
        let h = XxzHamiltonian::new(&model).unwrap();
        let prop = ExactPropagator::new(h, Propagation::Dense).unwrap();
        let region = Region::half_system(model.geometry());
        let opts = RecordOptions { correlations: true, entropy_region: Some(region) };
        let grid = [0.3, 1.0, 2.2, core::f64::consts::PI * inertia.value()];
        let recs = exact_records(&prop, &model, &grid, &opts).unwrap();
        let rotor0 = RotorState::css_x(8, SpinLength::HALF).unwrap();
        for (t, rec) in grid.iter().zip(&recs) {
            let r = rotor0.evolve(inertia, *t);
            let k = r.moments();
            assert_relative_eq!(rec.mean_jx.total, k.mean_x, epsilon = 1e-10);
            assert_relative_eq!(rec.var_jx.total, k.var_x, epsilon = 1e-9);
            assert_relative_eq!(rec.min_transverse_variance, k.min_transverse_variance(), epsilon = 1e-9);
            let s_rotor = crate::entropy::renyi2_rotor(&r, 4).unwrap();
            assert_relative_eq!(rec.renyi2.unwrap().total, s_rotor, epsilon = 1e-9);
            let sum: f64 = rec.correlations.iter().map(|c| c.zz.total).sum();
            assert_relative_eq!(8.0 * sum, rec.var_jz, epsilon = 1e-10);
        }
    }

    #[test]
    fn product_state_has_no_entanglement() {
        let psi = EdState::css_x(Arc::new(SectorBasis::new(6).unwrap())).to_full();
        assert!(renyi2_partial_trace(&psi, 6, &[0, 2, 4]) < 1e-12);
        // Bell pair on sites 0 and 1, product elsewhere
        let mut bell = vec![Complex64::new(0.0, 0.0); 4];
        bell[0b01] = Complex64::new(0.5f64.sqrt(), 0.0);
        bell[0b10] = Complex64::new(-(0.5f64.sqrt()), 0.0);
        assert_relative_eq!(renyi2_partial_trace(&bell, 2, &[0]), core::f64::consts::LN_2, epsilon = 1e-12);
    }
}
