use alloc::sync::Arc;
use alloc::vec::Vec;
use core::ops::{AddAssign, Mul};

use nalgebra::DMatrix;
use num_traits::Zero;

use super::basis::SectorBasis;
use crate::lattice::LatticeModel;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
struct Bond {
    mask: u32,
    coupling: f64,
}

/// `H = -Σ_{i<j} J_ij (S^x S^x + S^y S^y + Δ S^z S^z)` for spin 1/2, real
/// in the `S^z` basis and block diagonal in `J^z`.
#[derive(Clone, Debug)]
pub struct XxzHamiltonian {
    basis: Arc<SectorBasis>,
    bonds: Vec<Bond>,
    diagonals: Vec<Vec<f64>>,
}

impl XxzHamiltonian {
    pub fn new(model: &LatticeModel) -> Result<Self> {
        if model.spin().twice() != 1 {
            return Err(Error::UnsupportedSpin);
        }
        let basis = Arc::new(SectorBasis::new(model.num_sites())?);
        Ok(Self::with_basis(model, basis))
    }

    pub fn with_basis(model: &LatticeModel, basis: Arc<SectorBasis>) -> Self {
        let n = model.num_sites();
        let mut bonds = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let coupling = model.coupling(i, j);
                if coupling != 0.0 {
                    bonds.push(Bond { mask: (1 << i) | (1 << j), coupling });
                }
            }
        }
        let delta = model.anisotropy();
        let diagonals = (0..basis.num_sectors())
            .map(|k| {
                basis
                    .sector(k)
                    .iter()
                    .map(|&s| {
                        let mut e = 0.0;
                        for b in &bonds {
                            let aligned = (s & b.mask) == 0 || (s & b.mask) == b.mask;
                            e += if aligned { -0.25 } else { 0.25 } * b.coupling;
                        }
                        delta * e
                    })
                    .collect()
            })
            .collect();
        Self { basis, bonds, diagonals }
    }

    pub fn basis(&self) -> &Arc<SectorBasis> {
        &self.basis
    }

    pub fn sites(&self) -> usize {
        self.basis.sites()
    }

    pub fn diagonal(&self, k: usize) -> &[f64] {
        &self.diagonals[k]
    }

    /// `y = H x` inside sector `k`, without storing the matrix.
    pub fn apply<T>(&self, k: usize, x: &[T], y: &mut [T])
    where
        T: Copy + Zero + AddAssign + Mul<f64, Output = T>,
    {
        let states = self.basis.sector(k);
        let diag = &self.diagonals[k];
        for (row, &s) in states.iter().enumerate() {
            let mut acc = x[row] * diag[row];
            for b in &self.bonds {
                let pair = s & b.mask;
                if pair != 0 && pair != b.mask {
                    let col = self.basis.index_of(s ^ b.mask);
                    acc += x[col] * (-0.5 * b.coupling);
                }
            }
            y[row] = acc;
        }
    }

    pub fn sector_matrix(&self, k: usize) -> DMatrix<f64> {
        let states = self.basis.sector(k);
        let dim = states.len();
        let mut h = DMatrix::zeros(dim, dim);
        for (row, &s) in states.iter().enumerate() {
            h[(row, row)] = self.diagonals[k][row];
            for b in &self.bonds {
                let pair = s & b.mask;
                if pair != 0 && pair != b.mask {
                    h[(row, self.basis.index_of(s ^ b.mask))] += -0.5 * b.coupling;
                }
            }
        }
        h
    }

    /// Dense `2^N x 2^N` matrix in the computational basis.
    pub fn full_matrix(&self) -> DMatrix<f64> {
        let dim = self.basis.full_dimension();
        let mut h = DMatrix::zeros(dim, dim);
        for k in 0..self.basis.num_sectors() {
            let block = self.sector_matrix(k);
            let states = self.basis.sector(k);
            for (r, &sr) in states.iter().enumerate() {
                for (c, &sc) in states.iter().enumerate() {
                    h[(sr as usize, sc as usize)] = block[(r, c)];
                }
            }
        }
        h
    }
}
