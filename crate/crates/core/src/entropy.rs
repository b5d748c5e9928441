//! Half-system Rényi-2 entropies: the rotor part from its Dicke-sector
//! reduced density matrix, the spin-wave part from the Gaussian covariance
//! matrix of the region.
//!
//! Quadratures are `x_i = (b_i + b_i†)/√2`, `p_i = (b_i - b_i†)/(i√2)`,
//! ordered `(x_1..x_n, p_1..p_n)`, with the symmetrized covariance
//! normalized so the vacuum has `σ = 1/2` and symplectic eigenvalues
//! `ν = 1/2`. Then `Tr ρ² = Π_k 1/(2ν_k)`.

use alloc::vec::Vec;

use nalgebra::{DMatrix, SymmetricEigen};
#[allow(unused_imports)] // float methods when std is absent
use num_traits::Float;

use crate::lattice::Geometry;
use crate::rotor::RotorState;
use crate::spinwave::GreenFunctions;
use crate::{Error, Result};

/// Below this a symplectic eigenvalue is a pipeline bug, not round-off.
const UNPHYSICAL_MARGIN: f64 = 1e-6;

/// Sites of a subsystem.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Region {
    sites: Vec<usize>,
}

impl Region {
    pub fn new(geometry: &Geometry, mut sites: Vec<usize>) -> Result<Self> {
        sites.sort_unstable();
        sites.dedup();
        let n = geometry.num_sites();
        if let Some(&bad) = sites.iter().find(|&&s| s >= n) {
            return Err(Error::SiteOutOfRange { site: bad, sites: n });
        }
        Ok(Self { sites })
    }

    /// `L x ly` rectangle anchored at the origin (`ly` ignored in 1d, where
    /// the region is the first `lx` sites).
    pub fn rectangle(geometry: &Geometry, lx: usize, ly: usize) -> Result<Self> {
        let l = geometry.linear_size();
        let rows = if geometry.dimension() == 1 { 1 } else { ly.min(l) };
        let sites = (0..rows).flat_map(|y| (0..lx.min(l)).map(move |x| geometry.site([x, y]))).collect();
        Self::new(geometry, sites)
    }

    /// `L x L/2` in 2d, `L/2` sites in 1d.
    pub fn half_system(geometry: &Geometry) -> Self {
        let l = geometry.linear_size();
        let region = if geometry.dimension() == 1 {
            Self::rectangle(geometry, l / 2, 1)
        } else {
            Self::rectangle(geometry, l, l / 2)
        };
        region.expect("half system fits the lattice")
    }

    pub fn full(geometry: &Geometry) -> Self {
        Self { sites: (0..geometry.num_sites()).collect() }
    }

    pub fn sites(&self) -> &[usize] {
        &self.sites
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn complement(&self, geometry: &Geometry) -> Self {
        let sites = (0..geometry.num_sites()).filter(|s| self.sites.binary_search(s).is_err()).collect();
        Self { sites }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GaussianRegionState {
    pub sites: Vec<usize>,
    pub covariance: DMatrix<f64>,
}

impl GaussianRegionState {
    /// `σ = [[1/2 + G + Re F, Im F], [Im F, 1/2 + G - Re F]]` restricted to
    /// the region; the `q = 0` mode is the vacuum.
    pub fn new(geometry: &Geometry, green: &GreenFunctions, region: &Region) -> Self {
        let sites = region.sites().to_vec();
        let n = sites.len();
        let mut sigma = DMatrix::zeros(2 * n, 2 * n);
        for (a, &i) in sites.iter().enumerate() {
            for (b, &j) in sites.iter().enumerate() {
                let d = geometry.displacement(i, j);
                let g = green.g(d);
                let f = green.f(d);
                let vac = if a == b { 0.5 } else { 0.0 };
                sigma[(a, b)] = vac + g + f.re;
                sigma[(n + a, n + b)] = vac + g - f.re;
                sigma[(a, n + b)] = f.im;
                sigma[(n + a, b)] = f.im;
            }
        }
        Self { sites, covariance: sigma }
    }

    /// Symplectic eigenvalues in ascending order, one per mode.
    pub fn symplectic_eigenvalues(&self) -> Result<Vec<f64>> {
        symplectic_eigenvalues(&self.covariance)
    }

    pub fn renyi2(&self) -> Result<f64> {
        let nu = self.symplectic_eigenvalues()?;
        Ok(nu.iter().map(|v| (2.0 * v).ln()).sum::<f64>().max(0.0))
    }
}

/// Symplectic spectrum of a positive-definite `2n x 2n` covariance matrix.
///
/// With `σ = L Lᵀ`, `Lᵀ Ω L` is antisymmetric with eigenvalues `±iν_k`, so
/// the symmetric `-(Lᵀ Ω L)²` has every `ν_k²` twice; pairs are merged after
/// sorting.
pub fn symplectic_eigenvalues(sigma: &DMatrix<f64>) -> Result<Vec<f64>> {
    let dim = sigma.nrows();
    let n = dim / 2;
    if n == 0 {
        return Ok(Vec::new());
    }
    let chol = sigma.clone().cholesky().ok_or(Error::UnphysicalCovariance(0.0))?;
    let l = chol.l();
    // Ω = [[0, 1], [-1, 0]] in (x, p) block order
    let mut omega_l = DMatrix::zeros(dim, dim);
    for r in 0..n {
        for c in 0..dim {
            omega_l[(r, c)] = l[(n + r, c)];
            omega_l[(n + r, c)] = -l[(r, c)];
        }
    }
    let m = l.transpose() * omega_l;
    let mut sym = -(&m * &m);
    // symmetrize round-off before the eigensolve
    for r in 0..dim {
        for c in 0..r {
            let v = 0.5 * (sym[(r, c)] + sym[(c, r)]);
            sym[(r, c)] = v;
            sym[(c, r)] = v;
        }
    }
    let mut squares: Vec<f64> = SymmetricEigen::new(sym).eigenvalues.iter().copied().collect();
    squares.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
    let mut nu = Vec::with_capacity(n);
    for pair in squares.chunks(2) {
        let v = 0.5 * (pair[0] + pair[pair.len() - 1]);
        nu.push(v.max(0.0).sqrt());
    }
    if let Some(&worst) = nu.first() {
        if worst < 0.5 - UNPHYSICAL_MARGIN {
            return Err(Error::UnphysicalCovariance(worst));
        }
    }
    Ok(nu.into_iter().map(|v| v.max(0.5)).collect())
}

/// Spin-wave Rényi-2 entropy `Σ_k ln(2ν_k)` of a region.
pub fn renyi2_sw(geometry: &Geometry, green: &GreenFunctions, region: &Region) -> Result<f64> {
    GaussianRegionState::new(geometry, green, region).renyi2()
}

/// Rotor Rényi-2 entropy `-ln Tr ρ_A²` for a subsystem of `subsystem` sites.
pub fn renyi2_rotor(state: &RotorState, subsystem: usize) -> Result<f64> {
    let purity = state.subsystem_purity(subsystem)?;
    Ok((-purity.ln()).max(0.0))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EntropySplit {
    pub rotor: f64,
    pub spin_wave: f64,
    pub total: f64,
}

pub fn renyi2_total(
    state: &RotorState,
    geometry: &Geometry,
    green: &GreenFunctions,
    region: &Region,
) -> Result<EntropySplit> {
    let rotor = renyi2_rotor(state, region.len())?;
    let spin_wave = renyi2_sw(geometry, green, region)?;
    Ok(EntropySplit { rotor, spin_wave, total: rotor + spin_wave })
}
