//! Exact reference for spin-1/2 lattices up to [`MAX_SITES`] sites.
//!
//! States are stored per `J^z` sector; the Hamiltonian never mixes sectors,
//! so propagation and tower-of-states minima are sector-local.

mod basis;
mod hamiltonian;
mod krylov;
mod measure;
mod tower;

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
#[allow(unused_imports)] // float methods when std is absent
use num_traits::Float;

pub use basis::{SectorBasis, MAX_SITES};
pub use hamiltonian::XxzHamiltonian;
pub use krylov::{evolve_sector, sector_ground_energy, KrylovSettings};
pub use measure::{exact_observables, exact_records, ExactMoments};
pub use tower::{fit_tower, TowerFit, TOWER_RESIDUAL_WARNING};

use crate::{Error, Result};

/// Largest lattice that the dense propagator accepts.
pub const DENSE_MAX_SITES: usize = 14;

#[derive(Clone, Debug, PartialEq)]
pub struct EdState {
    basis: Arc<SectorBasis>,
    sectors: Vec<Vec<Complex64>>,
    time: f64,
}

impl EdState {
    /// Product state with every spin along `+x`.
    pub fn css_x(basis: Arc<SectorBasis>) -> Self {
        let amp = Complex64::new(2f64.powf(-0.5 * basis.sites() as f64), 0.0);
        let sectors = (0..basis.num_sectors()).map(|k| vec![amp; basis.dimension(k)]).collect();
        Self { basis, sectors, time: 0.0 }
    }

    /// State from a full `2^N` amplitude vector.
    pub fn from_full(basis: Arc<SectorBasis>, amplitudes: &[Complex64]) -> Result<Self> {
        if amplitudes.len() != basis.full_dimension() {
            return Err(Error::ShapeMismatch { rows: amplitudes.len(), cols: 1, expected: basis.full_dimension() });
        }
        let sectors = (0..basis.num_sectors())
            .map(|k| basis.sector(k).iter().map(|&s| amplitudes[s as usize]).collect())
            .collect();
        Ok(Self { basis, sectors, time: 0.0 })
    }

    pub fn basis(&self) -> &Arc<SectorBasis> {
        &self.basis
    }

    pub fn sites(&self) -> usize {
        self.basis.sites()
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn sector(&self, k: usize) -> &[Complex64] {
        &self.sectors[k]
    }

    pub fn sector_norm_squared(&self, k: usize) -> f64 {
        self.sectors[k].iter().map(|x| x.norm_sqr()).sum()
    }

    pub fn norm_squared(&self) -> f64 {
        (0..self.sectors.len()).map(|k| self.sector_norm_squared(k)).sum()
    }

    pub fn to_full(&self) -> Vec<Complex64> {
        let mut full = vec![Complex64::new(0.0, 0.0); self.basis.full_dimension()];
        for (k, amps) in self.sectors.iter().enumerate() {
            for (&s, &a) in self.basis.sector(k).iter().zip(amps) {
                full[s as usize] = a;
            }
        }
        full
    }

    /// `<ψ|H|ψ>`.
    pub fn energy(&self, ham: &XxzHamiltonian) -> f64 {
        let mut total = 0.0;
        for (k, amps) in self.sectors.iter().enumerate() {
            let mut h = vec![Complex64::new(0.0, 0.0); amps.len()];
            ham.apply(k, amps, &mut h);
            total += amps.iter().zip(&h).map(|(a, b)| (a.conj() * b).re).sum::<f64>();
        }
        total
    }

    /// Weight of the state on the fully symmetric (Dicke) states, indexed by
    /// the number of up spins.
    pub fn dicke_amplitudes(&self) -> Vec<Complex64> {
        self.sectors
            .iter()
            .map(|amps| {
                let norm = (amps.len() as f64).sqrt();
                amps.iter().sum::<Complex64>() / norm
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Propagation {
    /// Full diagonalization of every sector; `N <= DENSE_MAX_SITES`.
    Dense,
    Krylov(KrylovSettings),
}

impl Propagation {
    /// Dense up to 12 sites, Krylov beyond.
    pub fn auto(sites: usize) -> Self {
        if sites <= 12 {
            Self::Dense
        } else {
            Self::Krylov(KrylovSettings::default())
        }
    }
}

#[derive(Clone, Debug)]
struct SectorSpectrum {
    energies: DVector<f64>,
    vectors: DMatrix<f64>,
}

#[derive(Clone, Debug)]
pub struct ExactPropagator {
    hamiltonian: XxzHamiltonian,
    propagation: Propagation,
    spectra: Vec<SectorSpectrum>,
}

impl ExactPropagator {
    pub fn new(hamiltonian: XxzHamiltonian, propagation: Propagation) -> Result<Self> {
        let spectra = match propagation {
            Propagation::Dense => {
                if hamiltonian.sites() > DENSE_MAX_SITES {
                    return Err(Error::SizeCapExceeded { sites: hamiltonian.sites(), cap: DENSE_MAX_SITES });
                }
                (0..hamiltonian.basis().num_sectors())
                    .map(|k| {
                        let eig = SymmetricEigen::new(hamiltonian.sector_matrix(k));
                        SectorSpectrum { energies: eig.eigenvalues, vectors: eig.eigenvectors }
                    })
                    .collect()
            }
            Propagation::Krylov(_) => Vec::new(),
        };
        Ok(Self { hamiltonian, propagation, spectra })
    }

    pub fn hamiltonian(&self) -> &XxzHamiltonian {
        &self.hamiltonian
    }

    pub fn propagation(&self) -> Propagation {
        self.propagation
    }

    /// `exp(-i H dt) ψ`.
    pub fn step(&self, state: &EdState, dt: f64) -> Result<EdState> {
        let mut next = state.clone();
        next.time = state.time + dt;
        if dt == 0.0 {
            return Ok(next);
        }
        for (k, amps) in next.sectors.iter_mut().enumerate() {
            match self.propagation {
                Propagation::Dense => {
                    let spec = &self.spectra[k];
                    let dim = amps.len();
                    let mut coeff = vec![Complex64::new(0.0, 0.0); dim];
                    for l in 0..dim {
                        let c: Complex64 = (0..dim).map(|r| amps[r] * spec.vectors[(r, l)]).sum();
                        coeff[l] = c * Complex64::from_polar(1.0, -spec.energies[l] * dt);
                    }
                    for r in 0..dim {
                        amps[r] = (0..dim).map(|l| coeff[l] * spec.vectors[(r, l)]).sum();
                    }
                }
                Propagation::Krylov(settings) => evolve_sector(&self.hamiltonian, k, amps, dt, settings)?,
            }
        }
        Ok(next)
    }

    /// States on a strictly increasing time grid, stepping from `initial`.
    pub fn evolve_grid(&self, initial: &EdState, grid: &[f64]) -> Result<Vec<EdState>> {
        crate::observables::validate_time_grid(grid)?;
        let mut out = Vec::with_capacity(grid.len());
        let mut current = initial.clone();
        for &t in grid {
            current = self.step(&current, t - current.time)?;
            out.push(current.clone());
        }
        Ok(out)
    }
}

/// `exp(-i H t) ψ` for a single time.
pub fn evolve_exact(state: &EdState, propagator: &ExactPropagator, t: f64) -> Result<EdState> {
    propagator.step(state, t - state.time)
}
