//! Zero-momentum rotor: an angular momentum `K` of length `J = N S`
//! evolving under the one-axis-twisting Hamiltonian `(K^z)²/(2I)`.
//!
//! States live in the `K^z` eigenbasis, amplitude index `k = J + M` for
//! `M = -J..=J`. Evolution is diagonal, so the rotor ground-state energy and
//! every other global phase are dropped.

use alloc::vec::Vec;
use core::f64::consts::TAU;

use nalgebra::DMatrix;
use num_complex::Complex64;
#[allow(unused_imports)] // float methods when std is absent
use num_traits::Float;

use crate::lattice::{LatticeModel, SpinLength};
use crate::math::{min_eigenvalue_2x2, CompensatedSum, LnFactorials};
use crate::{Error, Result};

/// Rotor moment of inertia. `Frozen` is the `I = ∞` rotor of the isotropic
/// point `Δ = 1`, where the OAT term vanishes.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Inertia {
    /// Finite, non-zero value; negative values (`Δ > 1`) are allowed.
    Finite(f64),
    Frozen,
}

impl Inertia {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_infinite() {
            return Ok(Self::Frozen);
        }
        if !value.is_finite() || value == 0.0 {
            return Err(Error::InvalidParameter { name: "inertia", reason: "must be non-zero" });
        }
        Ok(Self::Finite(value))
    }

    /// `1/(2I)`, zero for a frozen rotor.
    pub fn twisting_rate(&self) -> f64 {
        match *self {
            Inertia::Finite(i) => 0.5 / i,
            Inertia::Frozen => 0.0,
        }
    }

    pub fn value(&self) -> f64 {
        match *self {
            Inertia::Finite(i) => i,
            Inertia::Frozen => f64::INFINITY,
        }
    }

    pub fn is_frozen(&self) -> bool {
        matches!(self, Inertia::Frozen)
    }
}

/// Tower-of-states inertia measured on a reference lattice, used to rescale
/// the inertia of larger lattices with the same couplings.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TosReference {
    pub sites: usize,
    pub j0: f64,
    pub inertia: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InertiaSet {
    pub bare: Inertia,
    pub tos: Inertia,
    pub reference: Option<TosReference>,
}

/// `I = (N - 1) / [J_0 (1 - Δ)]`.
pub fn bare_inertia(model: &LatticeModel) -> Inertia {
    let n = model.num_sites() as f64;
    let stiffness = model.j0() * (1.0 - model.anisotropy());
    if stiffness == 0.0 {
        Inertia::Frozen
    } else {
        Inertia::Finite((n - 1.0) / stiffness)
    }
}

/// `I_ToS^(N) = (N-1)/(N_ref-1) · J_0^(ref)/J_0^(N) · I_ToS^(ref)`, or the
/// bare inertia when no reference is available.
pub fn tos_inertia(model: &LatticeModel, reference: Option<&TosReference>) -> Inertia {
    let bare = bare_inertia(model);
    match (bare, reference) {
        (Inertia::Frozen, _) | (_, None) => bare,
        (Inertia::Finite(_), Some(r)) => {
            let n = model.num_sites() as f64;
            let scaled = (n - 1.0) / (r.sites as f64 - 1.0) * (r.j0 / model.j0()) * r.inertia;
            Inertia::Finite(scaled)
        }
    }
}

pub fn inertia_set(model: &LatticeModel, reference: Option<TosReference>) -> InertiaSet {
    InertiaSet { bare: bare_inertia(model), tos: tos_inertia(model, reference.as_ref()), reference }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RotorState {
    sites: usize,
    spin: SpinLength,
    amplitudes: Vec<Complex64>,
    time: f64,
}

impl RotorState {
    /// Coherent state along `+x`: `ψ_M = 2^{-J} sqrt(C(2J, J + M))`,
    /// evaluated in log space.
    pub fn css_x(sites: usize, spin: SpinLength) -> Result<Self> {
        if sites < 2 {
            return Err(Error::TooFewSites(sites));
        }
        let two_j = sites * spin.twice() as usize;
        let table = LnFactorials::up_to(two_j);
        let ln_half = -(two_j as f64) * 0.5 * core::f64::consts::LN_2;
        let mut amplitudes: Vec<Complex64> = (0..=two_j)
            .map(|k| Complex64::new((0.5 * table.ln_binomial(two_j, k) + ln_half).exp(), 0.0))
            .collect();
        normalize(&mut amplitudes);
        Ok(Self { sites, spin, amplitudes, time: 0.0 })
    }

    /// Builds a state from explicit amplitudes (index `k = J + M`).
    pub fn from_amplitudes(sites: usize, spin: SpinLength, amplitudes: Vec<Complex64>, time: f64) -> Result<Self> {
        if amplitudes.len() != sites * spin.twice() as usize + 1 {
            return Err(Error::InvalidParameter { name: "amplitudes", reason: "length must be 2NS + 1" });
        }
        Ok(Self { sites, spin, amplitudes, time })
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn spin(&self) -> SpinLength {
        self.spin
    }

    /// `2J = 2NS`.
    pub fn twice_length(&self) -> usize {
        self.amplitudes.len() - 1
    }

    pub fn length(&self) -> f64 {
        self.twice_length() as f64 / 2.0
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    /// `M` for amplitude index `k`.
    pub fn magnetization(&self, k: usize) -> f64 {
        k as f64 - self.length()
    }

    pub fn norm_squared(&self) -> f64 {
        let mut acc = CompensatedSum::new();
        for a in &self.amplitudes {
            acc.add(a.norm_sqr());
        }
        acc.value()
    }

    /// `ψ_M → exp(-i M² t/(2I)) ψ_M`.
    pub fn evolve(&self, inertia: Inertia, duration: f64) -> RotorState {
        let rate = inertia.twisting_rate();
        let two_j = self.twice_length() as i64;
        let amplitudes = self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(k, a)| {
                // (2M)² is an exact integer; M² = (2M)²/4
                let two_m = 2 * k as i64 - two_j;
                let m2 = (two_m * two_m) as f64 / 4.0;
                let phase = reduce_phase(m2 * rate * duration);
                a * Complex64::from_polar(1.0, -phase)
            })
            .collect();
        RotorState { sites: self.sites, spin: self.spin, amplitudes, time: self.time + duration }
    }

    pub fn moments(&self) -> RotorMoments {
        moments(self)
    }

    pub fn reduced_density(&self, subsystem: usize) -> Result<DMatrix<Complex64>> {
        reduced_density(self, subsystem)
    }

    /// `Tr ρ_A²` of the reduced state on `subsystem` sites.
    pub fn subsystem_purity(&self, subsystem: usize) -> Result<f64> {
        let rho = reduced_density(self, subsystem)?;
        Ok(compensated_sum_norms(rho.iter()))
    }
}

fn reduce_phase(x: f64) -> f64 {
    let r = x % TAU;
    if r < 0.0 {
        r + TAU
    } else {
        r
    }
}

fn compensated_sum_norms<'a, I: Iterator<Item = &'a Complex64>>(it: I) -> f64 {
    let mut acc = CompensatedSum::new();
    for z in it {
        acc.add(z.norm_sqr());
    }
    acc.value()
}

fn normalize(amplitudes: &mut [Complex64]) {
    let norm = compensated_sum_norms(amplitudes.iter()).sqrt();
    for a in amplitudes.iter_mut() {
        *a /= norm;
    }
}

/// Collective moments of the rotor.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RotorMoments {
    pub length: f64,
    pub mean_x: f64,
    pub mean_y: f64,
    pub mean_z: f64,
    pub var_x: f64,
    pub second_y: f64,
    pub second_z: f64,
    /// Covariance matrix of `(K^y, K^z)`, the cross term symmetrized.
    pub cov_yz: [[f64; 2]; 2],
}

impl RotorMoments {
    /// Smallest variance in the `yz` plane.
    pub fn min_transverse_variance(&self) -> f64 {
        min_eigenvalue_2x2(self.cov_yz[0][0], self.cov_yz[0][1], self.cov_yz[1][1])
    }

    pub fn var_z(&self) -> f64 {
        self.second_z - self.mean_z * self.mean_z
    }
}

/// Moments from the ladder matrix elements `<M+1|K^+|M> = sqrt(J(J+1) - M(M+1))`.
pub fn moments(state: &RotorState) -> RotorMoments {
    let psi = state.amplitudes();
    let j = state.length();
    let casimir = j * (j + 1.0);
    let ladder = |k: usize| {
        let m = state.magnetization(k);
        (casimir - m * (m + 1.0)).max(0.0).sqrt()
    };
    let dim = psi.len();

    let mut raise = [CompensatedSum::new(), CompensatedSum::new()];
    let mut raise_twice = [CompensatedSum::new(), CompensatedSum::new()];
    // <{K^+, K^z}> = Σ ψ*_{M+1} ψ_M c_M (2M + 1)
    let mut raise_z = [CompensatedSum::new(), CompensatedSum::new()];
    let mut mz = CompensatedSum::new();
    let mut mz2 = CompensatedSum::new();
    for k in 0..dim {
        let p = psi[k].norm_sqr();
        let m = state.magnetization(k);
        mz.add(m * p);
        mz2.add(m * m * p);
        if k + 1 < dim {
            let c = ladder(k);
            let z = psi[k + 1].conj() * psi[k] * c;
            raise[0].add(z.re);
            raise[1].add(z.im);
            raise_z[0].add(z.re * (2.0 * m + 1.0));
            raise_z[1].add(z.im * (2.0 * m + 1.0));
            if k + 2 < dim {
                let z2 = psi[k + 2].conj() * psi[k] * (c * ladder(k + 1));
                raise_twice[0].add(z2.re);
                raise_twice[1].add(z2.im);
            }
        }
    }
    let mean_x = raise[0].value();
    let mean_y = raise[1].value();
    let mean_z = mz.value();
    let second_z = mz2.value();
    let re_raise_twice = raise_twice[0].value();
    // K^+K^- + K^-K^+ = 2(K² - (K^z)²)
    let transverse = 2.0 * (casimir - second_z);
    let second_x = 0.25 * (2.0 * re_raise_twice + transverse);
    let second_y = 0.25 * (-2.0 * re_raise_twice + transverse);
    let anticommutator_yz = raise_z[1].value();

    let var_y = second_y - mean_y * mean_y;
    let cov = 0.5 * anticommutator_yz - mean_y * mean_z;
    let var_z = second_z - mean_z * mean_z;
    RotorMoments {
        length: j,
        mean_x,
        mean_y,
        mean_z,
        var_x: second_x - mean_x * mean_x,
        second_y,
        second_z,
        cov_yz: [[var_y, cov], [cov, var_z]],
    }
}

/// Reduced density matrix of `subsystem` out of `N` sites, in the Dicke
/// basis of the subsystem (dimension `2 N_A S + 1`).
///
/// Each `|J, M>` splits into maximal-spin Dicke states of the two halves with
/// weights `sqrt(C(2J_A, k_A) C(2J_B, k - k_A) / C(2J, k))`, `k = J + M`.
pub fn reduced_density(state: &RotorState, subsystem: usize) -> Result<DMatrix<Complex64>> {
    let n = state.sites();
    if subsystem == 0 || subsystem >= n {
        return Err(Error::InvalidBipartition { subsystem, sites: n });
    }
    let two_s = state.spin().twice() as usize;
    let two_ja = subsystem * two_s;
    let two_jb = (n - subsystem) * two_s;
    let two_j = two_ja + two_jb;
    let table = LnFactorials::up_to(two_j);
    let psi = state.amplitudes();
    let schmidt = DMatrix::from_fn(two_ja + 1, two_jb + 1, |ka, kb| {
        let k = ka + kb;
        let ln_w = 0.5 * (table.ln_binomial(two_ja, ka) + table.ln_binomial(two_jb, kb) - table.ln_binomial(two_j, k));
        psi[k] * ln_w.exp()
    });
    Ok(&schmidt * schmidt.adjoint())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_model, LatticeSpec};
    use approx::assert_relative_eq;
    use core::f64::consts::PI;

    #[test]
    fn two_site_coherent_state() {
        let s = RotorState::css_x(2, SpinLength::HALF).unwrap();
        let a = s.amplitudes();
        assert_relative_eq!(a[0].re, 0.5, epsilon = 1e-15);
        assert_relative_eq!(a[1].re, 0.5f64.sqrt(), epsilon = 1e-15);
        assert_relative_eq!(a[2].re, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn coherent_state_moments() {
        for (n, spin) in [(7, SpinLength::HALF), (10, SpinLength::from_twice(2).unwrap()), (5000, SpinLength::HALF)] {
            let state = RotorState::css_x(n, spin).unwrap();
            let m = state.moments();
            let len = n as f64 * spin.value();
            assert!((state.norm_squared() - 1.0).abs() < 1e-12);
            assert_relative_eq!(m.mean_x, len, max_relative = 1e-12);
            assert!(m.var_x.abs() < 1e-9 * len * len);
            assert_relative_eq!(m.cov_yz[0][0], len / 2.0, max_relative = 1e-9);
            assert_relative_eq!(m.cov_yz[1][1], len / 2.0, max_relative = 1e-12);
            assert!(m.cov_yz[0][1].abs() < 1e-9 * len);
        }
    }

    #[test]
    fn two_site_precession_of_mean_spin() {
        let inertia = Inertia::Finite(0.7);
        let s0 = RotorState::css_x(2, SpinLength::HALF).unwrap();
        for t in [0.1, 0.9, 2.5, 11.0] {
            let m = s0.evolve(inertia, t).moments();
            assert_relative_eq!(m.mean_x, (t / (2.0 * 0.7)).cos(), epsilon = 1e-14);
        }
    }

    #[test]
    fn full_revival_and_ghz_peak() {
        let n = 20;
        let inertia = Inertia::Finite(1.3);
        let s0 = RotorState::css_x(n, SpinLength::HALF).unwrap();
        let back = s0.evolve(inertia, 2.0 * PI * 2.0 * 1.3);
        // period 4πI for integer length: e^{-i 2π M²} = 1
        for (a, b) in back.amplitudes().iter().zip(s0.amplitudes()) {
            assert!((a - b).norm() < 1e-12);
        }
        let ghz = s0.evolve(inertia, PI * 1.3).moments();
        assert_relative_eq!(ghz.var_x, (n * n) as f64 / 4.0, max_relative = 1e-10);
    }

    #[test]
    fn frozen_rotor_does_not_move() {
        let model = build_model(&LatticeSpec::xx(1, 6, 1.0).with_anisotropy(1.0)).unwrap();
        assert_eq!(bare_inertia(&model), Inertia::Frozen);
        let s0 = RotorState::css_x(6, SpinLength::HALF).unwrap();
        let s1 = s0.evolve(Inertia::Frozen, 100.0);
        assert_eq!(s0.moments(), s1.moments());
    }

    #[test]
    fn second_z_is_conserved() {
        let s0 = RotorState::css_x(31, SpinLength::HALF).unwrap();
        let z0 = s0.moments().second_z;
        for t in [0.3, 4.0, 17.0] {
            let z = s0.evolve(Inertia::Finite(-2.0), t).moments().second_z;
            assert!((z - z0).abs() < 1e-12 * z0);
        }
    }

    #[test]
    fn bare_and_tos_inertia() {
        let model = build_model(&LatticeSpec::dipolar_square(4)).unwrap();
        let bare = bare_inertia(&model).value();
        assert_relative_eq!(bare, 2.47, max_relative = 5e-3);
        let reference = TosReference { sites: 16, j0: model.j0(), inertia: 2.42 };
        assert_relative_eq!(tos_inertia(&model, Some(&reference)).value(), 2.42, max_relative = 1e-14);
        assert_eq!(tos_inertia(&model, None), bare_inertia(&model));
        let big = build_model(&LatticeSpec::dipolar_square(10)).unwrap();
        let scaled = tos_inertia(&big, Some(&reference)).value();
        assert_relative_eq!(scaled / bare_inertia(&big).value(), 2.42 / bare, max_relative = 1e-12);
    }

    #[test]
    fn reduced_density_of_product_and_cat() {
        let n = 16;
        let inertia = Inertia::Finite(1.0);
        let s0 = RotorState::css_x(n, SpinLength::HALF).unwrap();
        let rho = s0.reduced_density(8).unwrap();
        assert_eq!(rho.nrows(), 9);
        let trace: Complex64 = rho.diagonal().iter().sum();
        assert!((trace.re - 1.0).abs() < 1e-12);
        assert!((s0.subsystem_purity(8).unwrap() - 1.0).abs() < 1e-12);
        let cat = s0.evolve(inertia, PI);
        assert!((cat.subsystem_purity(8).unwrap() - 0.5).abs() < 1e-12);
        assert!(s0.reduced_density(0).is_err());
        assert!(s0.reduced_density(16).is_err());
    }

    #[test]
    fn huge_rotor_stays_normalized() {
        let s = RotorState::css_x(20_000, SpinLength::HALF).unwrap();
        assert!((s.norm_squared() - 1.0).abs() < 1e-12);
        let e = s.evolve(Inertia::Finite(3.0), 1234.5);
        assert!((e.norm_squared() - 1.0).abs() < 1e-12);
    }
}
