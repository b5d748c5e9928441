//! Short-iterative Lanczos propagation and sector ground energies.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
#[allow(unused_imports)] // float methods when std is absent
use num_traits::Float;

use super::hamiltonian::XxzHamiltonian;
use crate::{Error, Result};

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn tridiagonal(alphas: &[f64], betas: &[f64]) -> SymmetricEigen<f64, nalgebra::Dyn> {
    let m = alphas.len();
    let mut t = DMatrix::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alphas[i];
        if i + 1 < m {
            t[(i, i + 1)] = betas[i];
            t[(i + 1, i)] = betas[i];
        }
    }
    SymmetricEigen::new(t)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KrylovSettings {
    /// Error bound accepted per step.
    pub tolerance: f64,
    pub max_dimension: usize,
}

impl Default for KrylovSettings {
    fn default() -> Self {
        Self { tolerance: 1e-12, max_dimension: 40 }
    }
}

/// `ψ <- exp(-i H_k t) ψ` inside sector `k`, with adaptive sub-steps.
pub fn evolve_sector(
    ham: &XxzHamiltonian,
    k: usize,
    psi: &mut [Complex64],
    t: f64,
    settings: KrylovSettings,
) -> Result<()> {
    let dim = psi.len();
    let m_max = settings.max_dimension.min(dim).max(1);
    let mut remaining = t;
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(m_max);
    let mut w = vec![Complex64::new(0.0, 0.0); dim];
    while remaining.abs() > 0.0 {
        let scale = norm(psi);
        if scale == 0.0 {
            return Ok(());
        }
        basis.clear();
        basis.push(psi.iter().map(|x| x / scale).collect());
        let mut alphas = Vec::with_capacity(m_max);
        let mut betas = Vec::with_capacity(m_max);
        let mut tail = 0.0;
        for j in 0..m_max {
            ham.apply(k, &basis[j], &mut w);
            alphas.push(dot(&basis[j], &w).re);
            // two passes of full reorthogonalization
            for _ in 0..2 {
                for v in &basis {
                    let c = dot(v, &w);
                    for (wi, vi) in w.iter_mut().zip(v) {
                        *wi -= c * vi;
                    }
                }
            }
            let beta = norm(&w);
            let invariant = beta <= 1e-14 * alphas.iter().fold(1.0_f64, |a, x| a.max(x.abs()));
            if invariant {
                tail = 0.0;
                break;
            }
            if j + 1 == m_max {
                tail = beta;
                break;
            }
            betas.push(beta);
            basis.push(w.iter().map(|x| x / beta).collect());
        }
        let eig = tridiagonal(&alphas, &betas);
        let m = alphas.len();
        let mut tau = remaining;
        let coefficients = loop {
            let c: Vec<Complex64> = (0..m)
                .map(|i| {
                    (0..m)
                        .map(|l| {
                            let q = eig.eigenvectors[(i, l)] * eig.eigenvectors[(0, l)];
                            Complex64::from_polar(q, -eig.eigenvalues[l] * tau)
                        })
                        .sum()
                })
                .collect();
            let error = tail * c[m - 1].norm();
            if error <= settings.tolerance {
                break c;
            }
            tau *= 0.5;
            if tau.abs() < 1e-10 * t.abs() {
                return Err(Error::KrylovNotConverged { residual: error });
            }
        };
        for x in psi.iter_mut() {
            *x = Complex64::new(0.0, 0.0);
        }
        for (c, v) in coefficients.iter().zip(&basis) {
            let c = c * scale;
            for (x, vi) in psi.iter_mut().zip(v) {
                *x += c * vi;
            }
        }
        remaining -= tau;
    }
    Ok(())
}

/// Sectors at most this large are diagonalized densely for their minimum.
const DENSE_GROUND_LIMIT: usize = 400;

/// Lowest eigenvalue of sector `k`.
pub fn sector_ground_energy(ham: &XxzHamiltonian, k: usize) -> Result<f64> {
    let dim = ham.basis().dimension(k);
    if dim <= DENSE_GROUND_LIMIT {
        let e = SymmetricEigen::new(ham.sector_matrix(k)).eigenvalues;
        return Ok(e.iter().copied().fold(f64::INFINITY, f64::min));
    }
    // plain three-term Lanczos; ghosts do not affect the extreme Ritz value
    let mut seed = 0x9e37_79b9_7f4a_7c15_u64 ^ (k as u64);
    let mut v: Vec<f64> = (0..dim)
        .map(|_| {
            seed = seed.wrapping_mul(6_364_136_223_846_793_005).wrapping_add(1_442_695_040_888_963_407);
            1.0 + 0.5 * ((seed >> 11) as f64 / (1u64 << 53) as f64)
        })
        .collect();
    let n0 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= n0);
    let mut prev = vec![0.0; dim];
    let mut w = vec![0.0; dim];
    let mut alphas = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut last = f64::INFINITY;
    let mut residual = f64::INFINITY;
    let max_iter = 400.min(dim);
    for j in 0..max_iter {
        ham.apply(k, &v, &mut w);
        let alpha: f64 = v.iter().zip(&w).map(|(a, b)| a * b).sum();
        let beta_prev = betas.last().copied().unwrap_or(0.0);
        for i in 0..dim {
            w[i] -= alpha * v[i] + beta_prev * prev[i];
        }
        alphas.push(alpha);
        let beta = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if j % 10 == 9 || beta < 1e-12 || j + 1 == max_iter {
            let eig = tridiagonal(&alphas, &betas);
            let (idx, &theta) = eig
                .eigenvalues
                .iter()
                .enumerate()
                .min_by(|a, b| a.1.partial_cmp(b.1).unwrap_or(core::cmp::Ordering::Equal))
                .expect("non-empty");
            residual = beta * eig.eigenvectors[(alphas.len() - 1, idx)].abs();
            let scale = theta.abs().max(1.0);
            if residual < 1e-9 * scale && (theta - last).abs() < 1e-12 * scale {
                return Ok(theta);
            }
            if beta < 1e-12 {
                return Ok(theta);
            }
            last = theta;
        }
        betas.push(beta);
        for i in 0..dim {
            prev[i] = v[i];
            v[i] = w[i] / beta;
        }
    }
    Err(Error::LanczosNotConverged { residual })
}
