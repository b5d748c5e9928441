//! Minimum squeezing of 1d power-law chains over `(α, N)` and the per-`α`
//! scaling exponent of `min_t ξ²` with `N`.

use rayon::prelude::*;
use serde::Serialize;

use rsw_core::lattice::{build_model, LatticeSpec};
use rsw_core::observables::{squeezing, DynamicsContext, RecordOptions};
use rsw_core::rotor::bare_inertia;
use rsw_core::Result;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScanCell {
    pub alpha: f64,
    pub sites: usize,
    pub inertia: f64,
    /// `min_t ξ²`, `inf` when the spin depolarized while `ξ²` was still falling.
    pub min_xi2: f64,
    pub t_min: f64,
    pub depolarized_first: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SlopeFit {
    pub alpha: f64,
    /// Least-squares slope of `ln min ξ²` against `ln N`.
    pub slope: f64,
    pub intercept: f64,
    pub cells_used: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanSummary {
    pub cells: Vec<ScanCell>,
    pub fits: Vec<SlopeFit>,
    pub crossover_slope: f64,
    /// `α` where the interpolated slope first crosses `crossover_slope`.
    pub crossover_alpha: Option<f64>,
    /// Slopes are non-decreasing in `α`.
    pub monotone: bool,
}

fn golden_minimum<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> (f64, f64) {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if (b - a).abs() <= 1e-12 * b.abs().max(1.0) {
            break;
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Chain of `sites` spins with the couplings of `base` but exponent `alpha`,
/// bare rotor inertia, searched over `(0, π I]`.
pub fn scan_cell(base: &LatticeSpec, alpha: f64, sites: usize, coarse_points: usize) -> Result<ScanCell> {
    let spec = LatticeSpec { dimension: 1, linear_size: sites, alpha, ..base.clone() };
    let model = build_model(&spec)?;
    let inertia = bare_inertia(&model);
    let ctx = DynamicsContext::new(&model, inertia, RecordOptions::default())?;
    let xi2 = |t: f64| {
        let k = ctx.rotor_at(t).moments();
        squeezing(&k, ctx.modes_at(t).total_population(), sites)
    };
    let window = core::f64::consts::PI * inertia.value().abs();
    let window = if window.is_finite() { window } else { 0.0 };
    let mut best = (0usize, f64::INFINITY);
    let mut values = Vec::with_capacity(coarse_points);
    for i in 1..=coarse_points {
        let v = xi2(window * i as f64 / coarse_points as f64);
        values.push(v);
        if v < best.1 {
            best = (i, v);
        }
    }
    let (i, v) = best;
    if !v.is_finite() || window == 0.0 {
        return Ok(ScanCell { alpha, sites, inertia: inertia.value(), min_xi2: f64::INFINITY, t_min: f64::NAN, depolarized_first: true });
    }
    let next_depolarized = i < coarse_points && !values[i].is_finite();
    if next_depolarized {
        return Ok(ScanCell { alpha, sites, inertia: inertia.value(), min_xi2: f64::INFINITY, t_min: f64::NAN, depolarized_first: true });
    }
    let step = window / coarse_points as f64;
    let lo = step * (i as f64 - 1.0);
    let hi = (step * (i as f64 + 1.0)).min(window);
    let (t, refined) = golden_minimum(xi2, lo, hi);
    let (t_min, min_xi2) = if refined <= v { (t, refined) } else { (step * i as f64, v) };
    Ok(ScanCell { alpha, sites, inertia: inertia.value(), min_xi2, t_min, depolarized_first: false })
}

pub fn fit_slope(alpha: f64, cells: &[ScanCell]) -> SlopeFit {
    let pts: Vec<(f64, f64)> = cells
        .iter()
        .filter(|c| c.alpha == alpha && c.min_xi2.is_finite() && c.min_xi2 > 0.0)
        .map(|c| ((c.sites as f64).ln(), c.min_xi2.ln()))
        .collect();
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return SlopeFit { alpha, slope: f64::NAN, intercept: f64::NAN, cells_used: pts.len() };
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    SlopeFit { alpha, slope, intercept: my - slope * mx, cells_used: pts.len() }
}

/// First `α` where the linearly interpolated slope reaches `level`.
pub fn crossover(fits: &[SlopeFit], level: f64) -> Option<f64> {
    fits.windows(2).find_map(|w| {
        let (a, b) = (w[0], w[1]);
        if (a.slope - level) * (b.slope - level) <= 0.0 && a.slope != b.slope {
            Some(a.alpha + (level - a.slope) / (b.slope - a.slope) * (b.alpha - a.alpha))
        } else {
            None
        }
    })
}

/// Runs every cell on the current rayon pool; results are in `(α, N)` order.
pub fn run_scan(
    base: &LatticeSpec,
    alphas: &[f64],
    sizes: &[usize],
    coarse_points: usize,
    crossover_slope: f64,
) -> Result<ScanSummary> {
    let mut alphas = alphas.to_vec();
    alphas.sort_by(|a, b| a.total_cmp(b));
    alphas.dedup();
    let jobs: Vec<(f64, usize)> = alphas.iter().flat_map(|&a| sizes.iter().map(move |&n| (a, n))).collect();
    let cells = jobs
        .par_iter()
        .map(|&(a, n)| scan_cell(base, a, n, coarse_points))
        .collect::<Result<Vec<_>>>()?;
    let fits: Vec<SlopeFit> = alphas.iter().map(|&a| fit_slope(a, &cells)).collect();
    let monotone = fits.windows(2).all(|w| w[1].slope >= w[0].slope);
    Ok(ScanSummary { crossover_alpha: crossover(&fits, crossover_slope), cells, fits, crossover_slope, monotone })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_section_finds_parabola_minimum() {
        let (x, f) = golden_minimum(|x| (x - 0.3).powi(2) + 1.0, 0.0, 1.0);
        assert!((x - 0.3).abs() < 1e-6 && (f - 1.0).abs() < 1e-12);
    }

    #[test]
    fn crossover_interpolates() {
        let fit = |alpha, slope| SlopeFit { alpha, slope, intercept: 0.0, cells_used: 2 };
        let fits = [fit(1.0, -0.7), fit(2.0, -0.5), fit(3.0, -0.1)];
        let a = crossover(&fits, -0.3).unwrap();
        assert!((a - 2.5).abs() < 1e-12);
    }

    #[test]
    fn infinite_range_squeezes_with_size() {
        let base = LatticeSpec::xx(1, 2, 0.0);
        let small = scan_cell(&base, 0.0, 32, 400).unwrap();
        let large = scan_cell(&base, 0.0, 128, 400).unwrap();
        assert!(large.min_xi2 < small.min_xi2 && small.min_xi2 < 1.0);
    }
}
