//! Linear spin waves at finite momentum.
//!
//! `H_SW = Σ_{q≠0} [A_q b_q† b_q + ½ B_q (b_q b_{-q} + h.c.)]` with
//! `A_q = S [J_0 - J_q (1+Δ)/2]` and `B_q = -J_q S (1-Δ)/2`. Starting from the
//! bosonic vacuum the Bogoliubov solution is
//!
//! ```text
//! b_q(t) = u(t) b_q + v(t) b_{-q}†,   u = C - i A S,   v = -i B S,
//! ```
//!
//! with `C = cos(Ωt)`, `S = sin(Ωt)/Ω` and `Ω² = A² - B²` (`cosh`/`sinh` when
//! `Ω²` is negative, the series limit at `Ω² = 0`). Hence
//! `n = <b_q† b_q> = |v|² = B² S²` and `m = <b_q b_{-q}> = u v`, which obey
//! `|m|² = n (n + 1)`. Self-paired momenta (`q = -q`) follow the same
//! equations with `b_{-q} = b_q`, so the formulas carry over unchanged.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // float methods when std is absent
use num_traits::Float;

use crate::lattice::LatticeModel;
use crate::math::CompensatedSum;

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ModeCoefficients {
    pub a: f64,
    pub b: f64,
}

/// `Ω = sqrt(A² - B²)` tagged by branch.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ModeFrequency {
    Oscillating(f64),
    Critical,
    /// Growth rate `κ = sqrt(B² - A²)`.
    Unstable(f64),
}

impl ModeCoefficients {
    pub fn frequency(&self) -> ModeFrequency {
        let w = self.a * self.a - self.b * self.b;
        if w > 0.0 {
            ModeFrequency::Oscillating(w.sqrt())
        } else if w < 0.0 {
            ModeFrequency::Unstable((-w).sqrt())
        } else {
            ModeFrequency::Critical
        }
    }

    pub fn evolve(&self, t: f64) -> ModeAverages {
        evolve_mode(self.a, self.b, t)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ModeAverages {
    /// `<b_q† b_q>`
    pub n: f64,
    /// `<b_q b_{-q}>`
    pub m: Complex64,
}

/// Below this `|Ω² t²|` the trigonometric/hyperbolic forms switch to their
/// Taylor series.
const SERIES_THRESHOLD: f64 = 1e-3;

/// `(cos(Ωt), sin(Ωt)/Ω)` for `Ω² = w` of either sign.
fn propagator_parts(w: f64, t: f64) -> (f64, f64) {
    let x = w * t * t;
    if x.abs() < SERIES_THRESHOLD {
        // C = Σ (-x)^k/(2k)!, S = t Σ (-x)^k/(2k+1)!
        let mut c = 0.0;
        let mut s = 0.0;
        let mut term_c = 1.0;
        let mut term_s = 1.0;
        for k in 0..8 {
            c += term_c;
            s += term_s;
            let k2 = 2.0 * k as f64;
            term_c *= -x / ((k2 + 1.0) * (k2 + 2.0));
            term_s *= -x / ((k2 + 2.0) * (k2 + 3.0));
        }
        (c, s * t)
    } else if w > 0.0 {
        let omega = w.sqrt();
        ((omega * t).cos(), (omega * t).sin() / omega)
    } else {
        let kappa = (-w).sqrt();
        ((kappa * t).cosh(), (kappa * t).sinh() / kappa)
    }
}

/// Vacuum-seeded `(n(t), m(t))` of a mode pair.
pub fn evolve_mode(a: f64, b: f64, t: f64) -> ModeAverages {
    let (c, s) = propagator_parts(a * a - b * b, t);
    let u = Complex64::new(c, -a * s);
    let v = Complex64::new(0.0, -b * s);
    ModeAverages { n: b * b * s * s, m: u * v }
}

/// `A_q`, `B_q` for every momentum `q ≠ 0`, in momentum-index order
/// (entry `k` belongs to momentum index `k + 1`).
#[derive(Clone, Debug, PartialEq)]
pub struct SwCoefficients {
    modes: Vec<ModeCoefficients>,
}

pub fn coefficients(model: &LatticeModel) -> SwCoefficients {
    let s = model.spin().value();
    let delta = model.anisotropy();
    let j0 = model.j0();
    let modes = model.fourier_couplings()[1..]
        .iter()
        .map(|&jq| ModeCoefficients { a: s * (j0 - jq * (1.0 + delta) / 2.0), b: -jq * s * (1.0 - delta) / 2.0 })
        .collect();
    SwCoefficients { modes }
}

impl SwCoefficients {
    pub fn new(model: &LatticeModel) -> Self {
        coefficients(model)
    }

    pub fn from_modes(modes: Vec<ModeCoefficients>) -> Self {
        Self { modes }
    }

    pub fn modes(&self) -> &[ModeCoefficients] {
        &self.modes
    }

    /// Coefficients of momentum index `q` (must be non-zero).
    pub fn mode(&self, q: usize) -> ModeCoefficients {
        self.modes[q - 1]
    }

    pub fn evolve(&self, t: f64) -> SwModeSet {
        let (n, m) = self.modes.iter().map(|c| c.evolve(t)).map(|avg| (avg.n, avg.m)).unzip();
        SwModeSet { time: t, n, m }
    }

    /// `Σ_q [A_q n_q + B_q Re m_q]`.
    pub fn energy(&self, modes: &SwModeSet) -> f64 {
        let mut acc = CompensatedSum::new();
        for ((c, n), m) in self.modes.iter().zip(&modes.n).zip(&modes.m) {
            acc.add(c.a * n + c.b * m.re);
        }
        acc.value()
    }
}

/// Populations and anomalous averages of every `q ≠ 0` mode at one time.
#[derive(Clone, Debug, PartialEq)]
pub struct SwModeSet {
    pub time: f64,
    pub n: Vec<f64>,
    pub m: Vec<Complex64>,
}

impl SwModeSet {
    /// `N_FM = Σ_{q≠0} n_q`.
    pub fn total_population(&self) -> f64 {
        let mut acc = CompensatedSum::new();
        for n in &self.n {
            acc.add(*n);
        }
        acc.value()
    }

    pub fn population(&self, q: usize) -> f64 {
        self.n[q - 1]
    }

    pub fn anomalous(&self, q: usize) -> Complex64 {
        self.m[q - 1]
    }
}

pub fn total_fm_population(modes: &SwModeSet) -> f64 {
    modes.total_population()
}

/// Translation-invariant real-space Green functions
/// `G(d) = <b_i† b_{i+d}>` and `F(d) = <b_i b_{i+d}>`, finite-momentum part only.
#[derive(Clone, Debug, PartialEq)]
pub struct GreenFunctions {
    pub normal: Vec<f64>,
    pub anomalous: Vec<Complex64>,
}

impl GreenFunctions {
    pub fn g(&self, d: usize) -> f64 {
        self.normal[d]
    }

    pub fn f(&self, d: usize) -> Complex64 {
        self.anomalous[d]
    }
}

/// `G(d) = N^{-1} Σ_{q≠0} cos(q·d) n_q`, `F(d) = N^{-1} Σ_{q≠0} cos(q·d) m_q`
/// (`n_q = n_{-q}`, `m_q = m_{-q}`, so the sine parts cancel).
pub fn realspace_green(modes: &SwModeSet, model: &LatticeModel) -> GreenFunctions {
    let geometry = model.geometry();
    let phases = model.phases();
    let n_sites = geometry.num_sites();
    let inv = 1.0 / n_sites as f64;
    let mut normal = Vec::with_capacity(n_sites);
    let mut anomalous = Vec::with_capacity(n_sites);
    for d in 0..n_sites {
        let mut g = CompensatedSum::new();
        let mut f_re = CompensatedSum::new();
        let mut f_im = CompensatedSum::new();
        for q in 1..n_sites {
            let c = phases.cos(geometry.phase_index(q, d));
            g.add(c * modes.n[q - 1]);
            f_re.add(c * modes.m[q - 1].re);
            f_im.add(c * modes.m[q - 1].im);
        }
        normal.push(g.value() * inv);
        anomalous.push(Complex64::new(f_re.value() * inv, f_im.value() * inv));
    }
    GreenFunctions { normal, anomalous }
}
