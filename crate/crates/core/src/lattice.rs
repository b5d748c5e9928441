//! Periodic Bravais lattices in one and two dimensions, ferromagnetic
//! power-law couplings and their lattice Fourier transform.
//!
//! Sites are numbered row-major, `site = x + L y`, and momenta use the same
//! ordering with `q = 2π n / L` per axis, so momentum index `0` is `q = 0`.
//! Every module indexes modes this way.
//!
//! Couplings are translation invariant, so the model stores the coupling
//! kernel `J(d)` over displacement indices `d` (again row-major) rather than
//! the dense `N x N` matrix; [`LatticeModel::coupling_matrix`] materializes
//! it on demand.

use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::DMatrix;
#[allow(unused_imports)] // float methods when std is absent
use num_traits::Float;

use crate::math::{compensated_sum, hurwitz_zeta, simpson, CompensatedSum};
use crate::{Error, Result};

/// Spin length, stored as `2S`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SpinLength(u32);

impl SpinLength {
    pub const HALF: SpinLength = SpinLength(1);

    pub fn from_twice(twice: u32) -> Result<Self> {
        if twice == 0 {
            return Err(Error::InvalidParameter { name: "spin", reason: "spin length must be positive" });
        }
        Ok(Self(twice))
    }

    /// Parses a spin length given as a float (`0.5`, `1`, `1.5`, ...).
    pub fn from_value(s: f64) -> Result<Self> {
        let twice = 2.0 * s;
        if !(twice.is_finite() && twice >= 1.0 && (twice - twice.round()).abs() < 1e-12) {
            return Err(Error::InvalidParameter { name: "spin", reason: "spin length must be a positive half-integer" });
        }
        Self::from_twice(twice.round() as u32)
    }

    pub fn twice(self) -> u32 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }
}

impl Default for SpinLength {
    fn default() -> Self {
        Self::HALF
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum DistanceConvention {
    /// Distance to the nearest periodic copy (default; gives `I = 15/J_0 ≈ 2.47`
    /// on the 4x4 dipolar lattice).
    #[default]
    MinimumImage,
    /// Sum of the power law over all periodic copies.
    ImageSummed,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LatticeSpec {
    pub dimension: usize,
    pub linear_size: usize,
    /// Power-law exponent; `0` means all-to-all coupling.
    pub alpha: f64,
    /// Coupling prefactor `J`, the energy unit.
    pub coupling: f64,
    pub anisotropy: f64,
    pub spin: SpinLength,
    pub convention: DistanceConvention,
}

impl LatticeSpec {
    /// Spin-1/2 XX model with `J_ij = |r_i - r_j|^{-alpha}` and minimum-image distances.
    pub fn xx(dimension: usize, linear_size: usize, alpha: f64) -> Self {
        Self {
            dimension,
            linear_size,
            alpha,
            coupling: 1.0,
            anisotropy: 0.0,
            spin: SpinLength::HALF,
            convention: DistanceConvention::MinimumImage,
        }
    }

    pub fn dipolar_square(linear_size: usize) -> Self {
        Self::xx(2, linear_size, 3.0)
    }

    pub fn with_anisotropy(mut self, anisotropy: f64) -> Self {
        self.anisotropy = anisotropy;
        self
    }

    pub fn with_convention(mut self, convention: DistanceConvention) -> Self {
        self.convention = convention;
        self
    }

    pub fn with_spin(mut self, spin: SpinLength) -> Self {
        self.spin = spin;
        self
    }

    pub fn validate(&self) -> Result<Geometry> {
        let geometry = Geometry::new(self.dimension, self.linear_size)?;
        if !(self.alpha.is_finite() && self.alpha >= 0.0) {
            return Err(Error::InvalidParameter { name: "alpha", reason: "must be finite and non-negative" });
        }
        if !(self.coupling.is_finite() && self.coupling >= 0.0) {
            return Err(Error::InvalidParameter { name: "coupling", reason: "ferromagnetic couplings need J >= 0" });
        }
        if !self.anisotropy.is_finite() {
            return Err(Error::InvalidParameter { name: "anisotropy", reason: "must be finite" });
        }
        if self.convention == DistanceConvention::ImageSummed && self.alpha <= self.dimension as f64 {
            return Err(Error::NonConvergentImageSum { alpha: self.alpha, dimension: self.dimension });
        }
        Ok(geometry)
    }
}

/// Periodic hypercubic geometry with `L^d` sites.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Geometry {
    dimension: usize,
    linear_size: usize,
}

impl Geometry {
    pub fn new(dimension: usize, linear_size: usize) -> Result<Self> {
        if !(dimension == 1 || dimension == 2) {
            return Err(Error::UnsupportedDimension(dimension));
        }
        let sites = linear_size.pow(dimension as u32);
        if sites < 2 {
            return Err(Error::TooFewSites(sites));
        }
        Ok(Self { dimension, linear_size })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn linear_size(&self) -> usize {
        self.linear_size
    }

    pub fn num_sites(&self) -> usize {
        self.linear_size.pow(self.dimension as u32)
    }

    /// `(x, y)` lattice coordinates of a site (`y = 0` in one dimension).
    pub fn coords(&self, site: usize) -> [usize; 2] {
        [site % self.linear_size, site / self.linear_size]
    }

    pub fn site(&self, coords: [usize; 2]) -> usize {
        let l = self.linear_size;
        coords[0] % l + l * (coords[1] % l)
    }

    /// Index of the displacement `r_to - r_from` (mod L on each axis).
    pub fn displacement(&self, from: usize, to: usize) -> usize {
        let l = self.linear_size;
        let a = self.coords(from);
        let b = self.coords(to);
        self.site([(b[0] + l - a[0]) % l, (b[1] + l - a[1]) % l])
    }

    /// Index of `-d`.
    pub fn negate(&self, index: usize) -> usize {
        let l = self.linear_size;
        let c = self.coords(index);
        self.site([(l - c[0]) % l, (l - c[1]) % l])
    }

    /// Representative of a displacement in `(-L/2, L/2]` on each axis.
    pub fn signed_displacement(&self, index: usize) -> [i64; 2] {
        let l = self.linear_size as i64;
        let c = self.coords(index);
        let wrap = |x: usize| {
            let x = x as i64;
            if 2 * x > l {
                x - l
            } else {
                x
            }
        };
        [wrap(c[0]), if self.dimension == 2 { wrap(c[1]) } else { 0 }]
    }

    /// `(q·d) L / 2π mod L`, an exact index into [`PhaseTable`].
    pub fn phase_index(&self, momentum: usize, displacement: usize) -> usize {
        let l = self.linear_size;
        let q = self.coords(momentum);
        let d = self.coords(displacement);
        (q[0] * d[0] + q[1] * d[1]) % l
    }

    pub fn momentum(&self, index: usize) -> [f64; 2] {
        let c = self.coords(index);
        let step = 2.0 * PI / self.linear_size as f64;
        [step * c[0] as f64, step * c[1] as f64]
    }

    pub fn position(&self, site: usize) -> [f64; 2] {
        let c = self.coords(site);
        [c[0] as f64, c[1] as f64]
    }
}

/// `cos(2πk/L)` and `sin(2πk/L)` for `k = 0..L`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseTable {
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl PhaseTable {
    pub fn new(linear_size: usize) -> Self {
        let step = 2.0 * PI / linear_size as f64;
        let cos = (0..linear_size).map(|k| (step * k as f64).cos()).collect();
        let sin = (0..linear_size).map(|k| (step * k as f64).sin()).collect();
        Self { cos, sin }
    }

    pub fn cos(&self, index: usize) -> f64 {
        self.cos[index]
    }

    pub fn sin(&self, index: usize) -> f64 {
        self.sin[index]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LatticeModel {
    spec: LatticeSpec,
    geometry: Geometry,
    phases: PhaseTable,
    kernel: Vec<f64>,
    fourier: Vec<f64>,
}

/// Builds the coupling kernel and its Fourier transform, checking the
/// reality and translation-invariance invariants.
pub fn build_model(spec: &LatticeSpec) -> Result<LatticeModel> {
    let geometry = spec.validate()?;
    let kernel = match spec.convention {
        DistanceConvention::MinimumImage => minimum_image_kernel(spec, &geometry),
        DistanceConvention::ImageSummed => image_summed_kernel(spec, &geometry)?,
    };
    let phases = PhaseTable::new(geometry.linear_size);
    let (fourier, imaginary) = transform_kernel(&geometry, &phases, &kernel);
    let j0 = fourier[0];
    let worst = imaginary.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if worst > 1e-10 * j0.abs().max(f64::MIN_POSITIVE) {
        return Err(Error::NotTranslationInvariant(worst));
    }
    Ok(LatticeModel { spec: spec.clone(), geometry, phases, kernel, fourier })
}

impl LatticeModel {
    pub fn new(spec: &LatticeSpec) -> Result<Self> {
        build_model(spec)
    }

    pub fn spec(&self) -> &LatticeSpec {
        &self.spec
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    pub fn phases(&self) -> &PhaseTable {
        &self.phases
    }

    pub fn num_sites(&self) -> usize {
        self.geometry.num_sites()
    }

    pub fn spin(&self) -> SpinLength {
        self.spec.spin
    }

    pub fn anisotropy(&self) -> f64 {
        self.spec.anisotropy
    }

    /// `J(d)` over displacement indices, with `J(0) = 0`.
    pub fn coupling_kernel(&self) -> &[f64] {
        &self.kernel
    }

    pub fn coupling(&self, i: usize, j: usize) -> f64 {
        self.kernel[self.geometry.displacement(i, j)]
    }

    pub fn coupling_matrix(&self) -> DMatrix<f64> {
        let n = self.num_sites();
        DMatrix::from_fn(n, n, |i, j| self.coupling(i, j))
    }

    /// `J_q` for every momentum index.
    pub fn fourier_couplings(&self) -> &[f64] {
        &self.fourier
    }

    pub fn j0(&self) -> f64 {
        self.fourier[0]
    }
}

fn minimum_image_kernel(spec: &LatticeSpec, geometry: &Geometry) -> Vec<f64> {
    (0..geometry.num_sites())
        .map(|d| {
            if d == 0 {
                return 0.0;
            }
            let [dx, dy] = geometry.signed_displacement(d);
            let r = ((dx * dx + dy * dy) as f64).sqrt();
            spec.coupling * power_law(r, spec.alpha)
        })
        .collect()
}

fn power_law(r: f64, alpha: f64) -> f64 {
    if alpha == 0.0 {
        1.0
    } else {
        r.powf(-alpha)
    }
}

const IMAGE_TAIL_TOLERANCE: f64 = 1e-10;
const MAX_IMAGE_CELLS: usize = 1 << 22;

fn image_summed_kernel(spec: &LatticeSpec, geometry: &Geometry) -> Result<Vec<f64>> {
    let l = geometry.linear_size as f64;
    let mut kernel = alloc::vec![0.0; geometry.num_sites()];
    for d in 1..geometry.num_sites() {
        let value = match geometry.dimension {
            1 => {
                let x = geometry.coords(d)[0] as f64 / l;
                l.powf(-spec.alpha) * (hurwitz_zeta(spec.alpha, x) + hurwitz_zeta(spec.alpha, 1.0 - x))
            }
            _ => {
                let [dx, dy] = geometry.signed_displacement(d);
                image_sum_2d(spec.alpha, l, dx as f64, dy as f64)?
            }
        };
        kernel[d] = spec.coupling * value;
    }
    Ok(kernel)
}

/// `Σ_n |d + n L|^{-α}` over `n ∈ Z²`: direct sum over a box of image cells
/// plus an Euler–Maclaurin corrected continuum tail for the exterior.
fn image_sum_2d(alpha: f64, l: f64, dx: f64, dy: f64) -> Result<f64> {
    let mut half_cells = 4usize;
    loop {
        let k = half_cells as i64;
        let mut direct = CompensatedSum::new();
        for nx in -k..=k {
            for ny in -k..=k {
                let x = dx + nx as f64 * l;
                let y = dy + ny as f64 * l;
                direct.add((x * x + y * y).sqrt().powf(-alpha));
            }
        }
        let half = (half_cells as f64 + 0.5) * l;
        let bounds = [dx - half, dx + half, dy - half, dy + half];
        let exterior = |beta: f64| box_exterior_integral(bounds, beta);
        let tail = exterior(alpha) / (l * l) - alpha * alpha / 24.0 * exterior(alpha + 2.0);
        let total = direct.value() + tail;
        let next = l * l * alpha * alpha * (alpha + 2.0) * (alpha + 2.0) / 1920.0 * exterior(alpha + 4.0);
        if next <= IMAGE_TAIL_TOLERANCE * total {
            return Ok(total);
        }
        half_cells *= 2;
        if (2 * half_cells + 1).pow(2) > MAX_IMAGE_CELLS {
            return Err(Error::ImageSumTruncated { tail: next / total });
        }
    }
}

/// `∫ r^{-β} dA` over the exterior of the box `[x0, x1] x [y0, y1]`, which
/// must contain the origin. Each side contributes `h ∫ (h² + u²)^{-β/2} du / (β - 2)`.
fn box_exterior_integral([x0, x1, y0, y1]: [f64; 4], beta: f64) -> f64 {
    let side = |h: f64, u0: f64, u1: f64| {
        h * simpson(|u| (h * h + u * u).powf(-0.5 * beta), u0, u1, 2048)
    };
    (side(x1, y0, y1) + side(-x0, y0, y1) + side(y1, x0, x1) + side(-y0, x0, x1)) / (beta - 2.0)
}

/// Real and imaginary parts of `J_q = Σ_d e^{-i q·d} J(d)`.
fn transform_kernel(geometry: &Geometry, phases: &PhaseTable, kernel: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = geometry.num_sites();
    let mut re = Vec::with_capacity(n);
    let mut im = Vec::with_capacity(n);
    for q in 0..n {
        re.push(compensated_sum((0..n).map(|d| phases.cos(geometry.phase_index(q, d)) * kernel[d])));
        im.push(-compensated_sum((0..n).map(|d| phases.sin(geometry.phase_index(q, d)) * kernel[d])));
    }
    (re, im)
}

/// `J_q = N^{-1} Σ_ij e^{iq·(r_i - r_j)} J_ij` for a dense coupling matrix.
///
/// The matrix must be symmetric with zero diagonal and translation invariant;
/// violations are reported with the largest deviation found.
pub fn fourier_couplings(geometry: &Geometry, couplings: &DMatrix<f64>) -> Result<Vec<f64>> {
    let n = geometry.num_sites();
    if couplings.nrows() != n || couplings.ncols() != n {
        return Err(Error::ShapeMismatch { rows: couplings.nrows(), cols: couplings.ncols(), expected: n });
    }
    let scale = couplings.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    let mut asym = 0.0_f64;
    for i in 0..n {
        asym = asym.max(couplings[(i, i)].abs());
        for j in 0..i {
            asym = asym.max((couplings[(i, j)] - couplings[(j, i)]).abs());
        }
    }
    if asym > 1e-12 * scale {
        return Err(Error::NotSymmetric(asym));
    }
    let kernel: Vec<f64> = (0..n).map(|d| couplings[(0, d)]).collect();
    let mut mismatch = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            let d = geometry.displacement(i, j);
            mismatch = mismatch.max((couplings[(i, j)] - kernel[d]).abs());
        }
    }
    if mismatch > 1e-12 * scale {
        return Err(Error::NotTranslationInvariant(mismatch));
    }
    let phases = PhaseTable::new(geometry.linear_size());
    Ok(transform_kernel(geometry, &phases, &kernel).0)
}

/// Inverse transform `J(d) = N^{-1} Σ_q e^{iq·d} J_q` back to the kernel.
pub fn inverse_fourier(geometry: &Geometry, fourier: &[f64]) -> Vec<f64> {
    let n = geometry.num_sites();
    let phases = PhaseTable::new(geometry.linear_size());
    (0..n)
        .map(|d| compensated_sum((0..n).map(|q| phases.cos(geometry.phase_index(q, d)) * fourier[q])) / n as f64)
        .collect()
}
