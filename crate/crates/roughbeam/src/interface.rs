//! Stationary random interface elevation: Gaussian field synthesis on a
//! periodic lateral grid, marginal characteristic function and pulse-shaping
//! kernel, scattering distribution (atom + continuous density), and mixing
//! diagnostics. Lateral coordinates here are measured in correlation-length
//! units.

use crate::error::{Error, Result};
use crate::fftops::Fft2;
use crate::grid::LateralGrid;
use crate::lin::{self, Vec2};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Radial correlation shape, scaled so shape(0) = 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum CorrelationShape {
    /// exp(-r²/2) in units of the correlation radius.
    Gaussian,
    /// (1 - r)₊ in units of the correlation radius. Valid in 1D but not
    /// positive definite as a 2D radial covariance; kept as a rejection case.
    Tent,
}

/// Marginal law of the elevation. The interface exposes this as a tag so
/// other mixing fields with closed-form characteristic functions can slot in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MarginalLaw {
    Gaussian,
}

/// Stationary, isotropic random-elevation model: marginal σ_V, correlation
/// R(y) = σ_V²·shape(|y|/radius).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterfaceModel {
    sigma_v: f64,
    radius: f64,
    shape: CorrelationShape,
    marginal: MarginalLaw,
}

impl InterfaceModel {
    pub fn new(sigma_v: f64, radius: f64, shape: CorrelationShape) -> Result<Self> {
        if !(sigma_v >= 0.0) || !sigma_v.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "sigma_v must be finite and nonnegative, got {sigma_v}"
            )));
        }
        if !(radius > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "correlation radius must be positive, got {radius}"
            )));
        }
        Ok(InterfaceModel {
            sigma_v,
            radius,
            shape,
            marginal: MarginalLaw::Gaussian,
        })
    }

    /// Gaussian correlation with unit radius — the reference model.
    pub fn gaussian(sigma_v: f64) -> Result<Self> {
        InterfaceModel::new(sigma_v, 1.0, CorrelationShape::Gaussian)
    }

    pub fn sigma_v(&self) -> f64 {
        self.sigma_v
    }

    pub fn correlation_radius(&self) -> f64 {
        self.radius
    }

    pub fn marginal(&self) -> MarginalLaw {
        self.marginal
    }

    /// Radial correlation R(r); R(0) = σ_V².
    pub fn correlation(&self, r: f64) -> f64 {
        let x = r.abs() / self.radius;
        let shape = match self.shape {
            CorrelationShape::Gaussian => (-0.5 * x * x).exp(),
            CorrelationShape::Tent => (1.0 - x).max(0.0),
        };
        self.sigma_v * self.sigma_v * shape
    }

    pub fn correlation_at(&self, u: Vec2) -> f64 {
        self.correlation(lin::norm(u))
    }

    /// Characteristic function of the marginal elevation, φ_V(u) = E[e^{iuV}].
    pub fn characteristic_function(&self, u: f64) -> Complex64 {
        match self.marginal {
            MarginalLaw::Gaussian => {
                Complex64::new((-0.5 * u * u * self.sigma_v * self.sigma_v).exp(), 0.0)
            }
        }
    }

    /// Marginal probability density f_V.
    pub fn marginal_density(&self, x: f64) -> f64 {
        match self.marginal {
            MarginalLaw::Gaussian => {
                let s = self.sigma_v;
                if s == 0.0 {
                    // Degenerate point mass; callers handle σ_V = 0 separately.
                    return if x == 0.0 { f64::INFINITY } else { 0.0 };
                }
                (-0.5 * x * x / (s * s)).exp() / (s * (2.0 * PI).sqrt())
            }
        }
    }

    /// Pulse-shaping kernel Φ(s) = f_V(s/(2𝓈0))/(2𝓈0): the travel-time
    /// density that blurs the reflected front on a slowly varying interface.
    pub fn pulse_shaping_kernel(&self, s0: f64, s: f64) -> f64 {
        let scale = 2.0 * s0;
        self.marginal_density(s / scale) / scale
    }
}

/// Monte Carlo estimate of the characteristic function from marginal samples.
/// Returns the estimate and the standard error of its real part.
pub fn characteristic_function_mc(
    model: &InterfaceModel,
    u: f64,
    n_samples: usize,
    seed: u64,
) -> (Complex64, f64) {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut sum_re2 = 0.0;
    for _ in 0..n_samples {
        let x: f64 = StandardNormal.sample(&mut rng);
        let v = model.sigma_v() * x;
        let e = Complex64::from_polar(1.0, u * v);
        sum += e;
        sum_re2 += e.re * e.re;
    }
    let n = n_samples as f64;
    let mean = sum / n;
    let var = (sum_re2 / n - mean.re * mean.re).max(0.0);
    (mean, (var / n).sqrt())
}

/// One sampled interface elevation on a periodic lateral grid.
#[derive(Debug, Clone)]
pub struct InterfaceRealization {
    pub model: InterfaceModel,
    pub grid: LateralGrid,
    pub seed: u64,
    /// Row-major V samples.
    pub values: Vec<f64>,
}

/// Spectral synthesizer for stationary Gaussian fields with the model's
/// periodized covariance. The eigenvalue field is computed once per
/// (model, grid) and shared across realizations.
#[derive(Debug, Clone)]
pub struct FieldSynthesizer {
    model: InterfaceModel,
    grid: LateralGrid,
    /// √(λ_j/N) per spectral index, row-major.
    amplitude: Vec<f64>,
}

impl FieldSynthesizer {
    pub fn new(model: InterfaceModel, grid: LateralGrid) -> Result<Self> {
        let n = grid.n();
        let period = [grid.period(0), grid.period(1)];
        let mut cov: Vec<Complex64> = Vec::with_capacity(grid.len());
        for i1 in 0..n[0] {
            for i2 in 0..n[1] {
                // Torus covariance: the model correlation summed over nearest
                // periodic images, so the spectrum stays nonnegative whenever
                // the model itself is positive definite.
                let u = [
                    grid.signed_index(0, i1) as f64 * grid.step()[0],
                    grid.signed_index(1, i2) as f64 * grid.step()[1],
                ];
                let mut val = 0.0;
                for k1 in -1i64..=1 {
                    for k2 in -1i64..=1 {
                        val += model.correlation_at([
                            u[0] + k1 as f64 * period[0],
                            u[1] + k2 as f64 * period[1],
                        ]);
                    }
                }
                cov.push(Complex64::new(val, 0.0));
            }
        }
        let mut fft = Fft2::new(n);
        fft.dft2(&mut cov);
        let lambda_max = cov.iter().map(|c| c.re).fold(0.0, f64::max);
        let lambda_min = cov.iter().map(|c| c.re).fold(f64::INFINITY, f64::min);
        if lambda_min < -1e-10 * lambda_max {
            return Err(Error::CovarianceNotPsd(format!(
                "correlation spectrum has negative eigenvalue {lambda_min:.3e} \
                 (max {lambda_max:.3e}) on this grid"
            )));
        }
        let count = grid.len() as f64;
        let amplitude = cov.iter().map(|c| (c.re.max(0.0) / count).sqrt()).collect();
        Ok(FieldSynthesizer {
            model,
            grid,
            amplitude,
        })
    }

    pub fn model(&self) -> &InterfaceModel {
        &self.model
    }

    pub fn grid(&self) -> &LateralGrid {
        &self.grid
    }

    /// Draw one realization. Complex standard normals are consumed in
    /// row-major spectral order (real then imaginary per entry), so the
    /// output is a pure function of (model, grid, seed).
    pub fn realize(&self, seed: u64) -> InterfaceRealization {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let mut spec: Vec<Complex64> = self
            .amplitude
            .iter()
            .map(|&a| {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                Complex64::new(a * re, a * im)
            })
            .collect();
        let mut fft = Fft2::new(self.grid.n());
        fft.idft2(&mut spec);
        InterfaceRealization {
            model: self.model,
            grid: self.grid,
            seed,
            values: spec.iter().map(|c| c.re).collect(),
        }
    }
}

/// One-shot synthesis; ensembles should reuse a `FieldSynthesizer`.
pub fn synthesize(
    model: &InterfaceModel,
    grid: &LateralGrid,
    seed: u64,
) -> Result<InterfaceRealization> {
    Ok(FieldSynthesizer::new(*model, *grid)?.realize(seed))
}

/// Ensemble + lateral (circular) covariance estimate; returns the lag field
/// row-major, indexed like the grid with signed wraparound lags.
pub fn ensemble_covariance(realizations: &[InterfaceRealization]) -> Result<Vec<f64>> {
    let first = realizations
        .first()
        .ok_or_else(|| Error::InvalidParameter("no realizations".into()))?;
    let grid = first.grid;
    let count = grid.len() as f64;
    let mut fft = Fft2::new(grid.n());
    let mut acc = vec![0.0; grid.len()];
    for r in realizations {
        let mut data: Vec<Complex64> = r.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fft.dft2(&mut data);
        data.iter_mut()
            .for_each(|c| *c = Complex64::new(c.norm_sqr(), 0.0));
        fft.idft2(&mut data);
        // idft2 is unnormalized: divide by N for the inverse, by N again to
        // average over base points.
        for (a, c) in acc.iter_mut().zip(&data) {
            *a += c.re / (count * count);
        }
    }
    let m = realizations.len() as f64;
    acc.iter_mut().for_each(|a| *a /= m);
    Ok(acc)
}

/// Scattering distribution 𝒜(v, ω, ·): a point mass at p = 0 plus a
/// continuous density, from the split g = g_∞ + (g − g_∞) of
/// g(y) = E[e^{iωv(V(y) - V(0))}], with g_∞ = |φ_V(ωv)|².
#[derive(Debug, Clone)]
pub struct ScatteringDistribution {
    pub v: f64,
    pub omega: f64,
    /// Weight of the point mass at p = 0: (2π)²g_∞/ω².
    pub atom: f64,
    /// Continuous density samples on `p_grid`, row-major.
    pub density: Vec<f64>,
    pub p_grid: LateralGrid,
    /// atom + Σ density·Δp² (≈ (2π)²/ω² when the grid captures the support).
    pub total_mass: f64,
    /// |g - g_∞| at the internal window edge relative to its value at 0;
    /// above 1e-6 the density samples carry aliasing risk.
    pub edge_ratio: f64,
    /// Standard error of the atom weight; present only for ensemble estimates.
    pub atom_se: Option<f64>,
    /// Largest |imaginary part| discarded when taking the real density.
    pub imag_residual: f64,
}

impl ScatteringDistribution {
    pub fn edge_decayed(&self) -> bool {
        self.edge_ratio <= 1e-6
    }
}

/// Internal lateral window conjugate to the requested p-grid: the forward
/// transform of samples with spacing dy = 2π/(n·|ω|·dp) lands exactly on
/// κ = ωp for the centered frequency ladder.
fn conjugate_window(p_grid: &LateralGrid, omega: f64) -> Result<LateralGrid> {
    let n = p_grid.n();
    let dy = [
        2.0 * PI / (n[0] as f64 * omega.abs() * p_grid.step()[0]),
        2.0 * PI / (n[1] as f64 * omega.abs() * p_grid.step()[1]),
    ];
    LateralGrid::new(n, dy)
}

fn finish_distribution(
    v: f64,
    omega: f64,
    p_grid: LateralGrid,
    y_grid: &LateralGrid,
    mut centered: Vec<Complex64>,
    g_inf: f64,
) -> ScatteringDistribution {
    // Edge decay of (g - g_inf), measured on the window boundary ring.
    let n = y_grid.n();
    let at0 = centered[y_grid.idx(n[0] / 2, n[1] / 2)].norm();
    let mut edge: f64 = 0.0;
    for i1 in 0..n[0] {
        edge = edge.max(centered[y_grid.idx(i1, 0)].norm());
    }
    for i2 in 0..n[1] {
        edge = edge.max(centered[y_grid.idx(0, i2)].norm());
    }
    let edge_ratio = if at0 > 0.0 { edge / at0 } else { 0.0 };

    let mut fft = Fft2::new(n);
    fft.forward(y_grid, &mut centered);
    // The forward transform returns spectra in DFT order; reindex so that
    // density[idx(i1, i2)] sits at p = p_grid.point(i1, i2).
    let mut density = vec![0.0; centered.len()];
    let mut imag_residual = 0.0_f64;
    for j1 in 0..n[0] {
        let i1 = (j1 + n[0] / 2) % n[0];
        for j2 in 0..n[1] {
            let i2 = (j2 + n[1] / 2) % n[1];
            let c = centered[j1 * n[1] + j2];
            density[i1 * n[1] + i2] = c.re;
            imag_residual = imag_residual.max(c.im.abs());
        }
    }
    let atom = (2.0 * PI).powi(2) * g_inf / (omega * omega);
    let total_mass = atom + density.iter().sum::<f64>() * p_grid.cell_area();
    ScatteringDistribution {
        v,
        omega,
        atom,
        density,
        p_grid,
        total_mass,
        edge_ratio,
        atom_se: None,
        imag_residual,
    }
}

/// Closed-form scattering distribution for the Gaussian marginal, sampled on
/// a p-grid by transforming g - g_∞ on the conjugate lateral window.
pub fn scattering_distribution(
    model: &InterfaceModel,
    v: f64,
    omega: f64,
    p_grid: &LateralGrid,
) -> Result<ScatteringDistribution> {
    if omega == 0.0 || !omega.is_finite() || !v.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "scattering distribution needs finite v and nonzero ω, got v={v}, ω={omega}"
        )));
    }
    let y_grid = conjugate_window(p_grid, omega)?;
    let g_inf = model.characteristic_function(omega * v).norm_sqr();
    let wv2 = omega * omega * v * v;
    let r0 = model.correlation(0.0);
    let n = y_grid.n();
    let mut centered = Vec::with_capacity(y_grid.len());
    for i1 in 0..n[0] {
        for i2 in 0..n[1] {
            let y = y_grid.point(i1, i2);
            let g = (-wv2 * (r0 - model.correlation_at(y))).exp();
            centered.push(Complex64::new(g - g_inf, 0.0));
        }
    }
    Ok(finish_distribution(
        v, omega, *p_grid, &y_grid, centered, g_inf,
    ))
}

/// Continuous scattering density at one p, by the exponential-series
/// expansion of e^{ω²v²R(y)} - 1 for the Gaussian-correlation model:
/// each term transforms to a Gaussian in closed form.
pub fn scattering_density_series(
    model: &InterfaceModel,
    v: f64,
    omega: f64,
    p: Vec2,
) -> Result<f64> {
    if !matches!(
        (model.shape, model.marginal),
        (CorrelationShape::Gaussian, MarginalLaw::Gaussian)
    ) {
        return Err(Error::InvalidParameter(
            "series form needs Gaussian correlation and Gaussian marginal".into(),
        ));
    }
    let rc = model.correlation_radius();
    let a = omega * omega * v * v * model.sigma_v() * model.sigma_v();
    let g_inf = (-a).exp();
    let kappa_sq = (omega * rc).powi(2) * lin::norm_sq(p);
    let mut term = 1.0; // a^m / m!
    let mut sum = 0.0;
    for m in 1..=400 {
        let mf = m as f64;
        term *= a / mf;
        let contrib = term / mf * (-0.5 * kappa_sq / mf).exp();
        sum += contrib;
        if term / mf < 1e-18 * sum.max(1e-300) && m as f64 > a {
            break;
        }
    }
    Ok(g_inf * 2.0 * PI * rc * rc * sum)
}

/// Empirical scattering distribution from interface realizations: lateral
/// (circular) averaging of e^{iωvV} autocorrelations per realization,
/// ensemble-averaged, then transformed on the same conjugate window. The
/// realizations' grid must match the window the p-grid implies.
///
/// Each realization's coherent (lateral-mean) power is routed to the atom
/// estimate, so the density's p = 0 bin is identically zero: a finite window
/// cannot separate continuous density at the origin from the point mass.
/// Compare densities away from the origin bin; the atom carries its own
/// standard error.
pub fn scattering_distribution_mc(
    realizations: &[InterfaceRealization],
    v: f64,
    omega: f64,
    p_grid: &LateralGrid,
) -> Result<ScatteringDistribution> {
    if realizations.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least 2 realizations, got {}",
            realizations.len()
        )));
    }
    if omega == 0.0 || !omega.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "ω must be nonzero, got {omega}"
        )));
    }
    let y_grid = conjugate_window(p_grid, omega)?;
    let actual = realizations[0].grid;
    for axis in 0..2 {
        let want = y_grid.step()[axis];
        let got = actual.step()[axis];
        if actual.n()[axis] != y_grid.n()[axis] || ((want - got) / want).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "realization grid is not conjugate to the p-grid: axis {axis} \
                 needs n={}, step={want}, got n={}, step={got}",
                y_grid.n()[axis],
                actual.n()[axis]
            )));
        }
    }

    let n = actual.n();
    let count = actual.len() as f64;
    let mut fft = Fft2::new(n);
    let mut g_acc = vec![Complex64::new(0.0, 0.0); actual.len()];
    let mut coherent: Vec<f64> = Vec::with_capacity(realizations.len());
    for r in realizations {
        let mut e_field: Vec<Complex64> = r
            .values
            .iter()
            .map(|&x| Complex64::from_polar(1.0, omega * v * x))
            .collect();
        let mean = e_field.iter().sum::<Complex64>() / count;
        coherent.push(mean.norm_sqr());
        fft.dft2(&mut e_field);
        e_field
            .iter_mut()
            .for_each(|c| *c = Complex64::new(c.norm_sqr(), 0.0));
        fft.idft2(&mut e_field);
        for (acc, c) in g_acc.iter_mut().zip(&e_field) {
            *acc += *c / (count * count);
        }
    }
    let m = realizations.len() as f64;
    let g_inf = coherent.iter().sum::<f64>() / m;
    let var = coherent.iter().map(|c| (c - g_inf).powi(2)).sum::<f64>() / (m - 1.0);
    let g_inf_se = (var / m).sqrt();

    // Reindex the lag field (DFT order) onto the centered window and subtract
    // the coherent level.
    let mut centered = vec![Complex64::new(0.0, 0.0); actual.len()];
    for j1 in 0..n[0] {
        for j2 in 0..n[1] {
            let lag = g_acc[j1 * n[1] + j2] / m;
            let i1 = (j1 + n[0] / 2) % n[0];
            let i2 = (j2 + n[1] / 2) % n[1];
            centered[y_grid.idx(i1, i2)] = lag - g_inf;
        }
    }
    let mut dist = finish_distribution(v, omega, *p_grid, &y_grid, centered, g_inf);
    dist.atom_se = Some((2.0 * PI).powi(2) * g_inf_se / (omega * omega));
    Ok(dist)
}

/// Empirical decay of correlations between the bounded functionals e^{iuV}
/// at increasing lateral separation, maximized over a small set of u scales.
pub fn mixing_diagnostic(
    realizations: &[InterfaceRealization],
    r_values: &[f64],
) -> Result<Vec<(f64, f64)>> {
    let first = realizations
        .first()
        .ok_or_else(|| Error::InvalidParameter("no realizations".into()))?;
    let grid = first.grid;
    let sigma = first.model.sigma_v();
    if sigma == 0.0 {
        return Ok(r_values.iter().map(|&r| (r, 0.0)).collect());
    }
    let n = grid.n();
    let du = grid.step()[0];
    let u_set = [0.5 / sigma, 1.0 / sigma, 2.0 / sigma];

    let mut out = Vec::with_capacity(r_values.len());
    for &r in r_values {
        let offset = (r / du).round() as usize % n[0];
        let mut worst = 0.0_f64;
        for &u in &u_set {
            // Complex correlation of f = e^{iuV} with its shift, pooled over
            // all base points and realizations.
            let mut sum_f = Complex64::new(0.0, 0.0);
            let mut sum_cross = Complex64::new(0.0, 0.0);
            let mut count = 0.0;
            for real in realizations {
                for i1 in 0..n[0] {
                    let k1 = (i1 + offset) % n[0];
                    for i2 in 0..n[1] {
                        let f = Complex64::from_polar(1.0, u * real.values[grid.idx(i1, i2)]);
                        let g = Complex64::from_polar(1.0, u * real.values[grid.idx(k1, i2)]);
                        sum_f += f;
                        sum_cross += f * g.conj();
                        count += 1.0;
                    }
                }
            }
            let mean_f = sum_f / count;
            let cov = sum_cross / count - mean_f * mean_f.conj();
            // Var of e^{iuV}: 1 - |φ_V(u)|² for unimodular functionals.
            let var = (1.0 - mean_f.norm_sqr()).max(1e-300);
            worst = worst.max(cov.norm() / var);
        }
        out.push((r, worst));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::LateralGrid;

    const S0_REF: f64 = 0.2905932629027117;

    #[test]
    fn correlation_at_zero_is_variance() {
        let m = InterfaceModel::new(0.7, 2.0, CorrelationShape::Gaussian).unwrap();
        assert!((m.correlation(0.0) - 0.49).abs() < 1e-15);
        assert!(m.correlation(20.0) < 1e-15);
    }

    #[test]
    fn characteristic_function_reference() {
        let m = InterfaceModel::gaussian(1.0).unwrap();
        assert_eq!(m.characteristic_function(0.0).re, 1.0);
        let u = 2.0 * S0_REF;
        let phi = m.characteristic_function(u);
        assert!((phi.re - 0.8446027429218437).abs() < 1e-15);
        assert!((phi.re - 0.8446).abs() < 1e-4);
        // Hermitian and bounded over a u-sample.
        for i in -20..=20 {
            let u = i as f64 * 0.3;
            let p = m.characteristic_function(u);
            let q = m.characteristic_function(-u);
            assert!((p - q.conj()).norm() < 1e-15);
            assert!(p.norm() <= 1.0 + 1e-15);
        }
    }

    #[test]
    fn characteristic_function_mc_within_3se() {
        let m = InterfaceModel::gaussian(1.0).unwrap();
        let u = 2.0 * S0_REF;
        let (est, se) = characteristic_function_mc(&m, u, 100_000, 41);
        let exact = m.characteristic_function(u).re;
        assert!(se > 0.0 && se < 0.01);
        assert!(
            (est.re - exact).abs() <= 3.0 * se,
            "diff {} se {se}",
            est.re - exact
        );
    }

    #[test]
    fn pulse_kernel_reference_and_normalized() {
        let m = InterfaceModel::gaussian(1.0).unwrap();
        let phi0 = m.pulse_shaping_kernel(S0_REF, 0.0);
        assert!((phi0 - 0.6864272702271755).abs() < 1e-15);
        assert!((phi0 - 0.68643).abs() < 1e-5);
        // ∫Φ = 1 and the transform reproduces φ_V(2ω𝓈0).
        let h = 0.01;
        let half = (8.0_f64 / h).round() as i64;
        let mut mass = 0.0;
        let mut transform = Complex64::new(0.0, 0.0);
        let omega = 1.3;
        for i in -half..=half {
            let s = i as f64 * h;
            let w = m.pulse_shaping_kernel(S0_REF, s) * h;
            mass += w;
            transform += Complex64::from_polar(w, omega * s);
        }
        assert!((mass - 1.0).abs() < 1e-10);
        let expect = m.characteristic_function(2.0 * omega * S0_REF);
        assert!((transform - expect).norm() < 1e-8);
    }

    #[test]
    fn pulse_kernel_concentrates_as_sigma_vanishes() {
        let s0 = S0_REF;
        let mut prev = 0.0;
        for sigma in [0.5, 0.05, 0.005] {
            let m = InterfaceModel::gaussian(sigma).unwrap();
            // Mass inside a fixed small window grows toward 1.
            let h = sigma * s0 / 50.0;
            let half = (0.1_f64 / h).round() as i64;
            let mut mass = 0.0;
            for i in -half..=half {
                mass += m.pulse_shaping_kernel(s0, i as f64 * h) * h;
            }
            assert!(mass > prev);
            prev = mass;
        }
        assert!(prev > 1.0 - 1e-12);
    }

    #[test]
    fn synthesis_deterministic_and_zero_variance_degenerate() {
        let grid = LateralGrid::square(32, 0.25).unwrap();
        let m = InterfaceModel::gaussian(1.0).unwrap();
        let a = synthesize(&m, &grid, 99).unwrap();
        let b = synthesize(&m, &grid, 99).unwrap();
        assert_eq!(a.values, b.values);
        let c = synthesize(&m, &grid, 100).unwrap();
        assert!(a.values != c.values);

        let flat = InterfaceModel::gaussian(0.0).unwrap();
        let z = synthesize(&flat, &grid, 7).unwrap();
        assert!(z.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn tent_correlation_rejected_on_2d_grid() {
        let grid = LateralGrid::square(64, 0.125).unwrap();
        let m = InterfaceModel::new(1.0, 1.0, CorrelationShape::Tent).unwrap();
        assert!(matches!(
            FieldSynthesizer::new(m, grid),
            Err(Error::CovarianceNotPsd(_))
        ));
    }

    #[test]
    fn empirical_covariance_matches_model() {
        // Reduced-size version of the ensemble-covariance check: relative
        // L² error over the |y| ≤ 3 disc.
        let grid = LateralGrid::square(128, 0.125).unwrap();
        let m = InterfaceModel::gaussian(1.0).unwrap();
        let synth = FieldSynthesizer::new(m, grid).unwrap();
        let realizations: Vec<_> = (0..200).map(|i| synth.realize(5000 + i)).collect();
        let est = ensemble_covariance(&realizations).unwrap();

        let n = grid.n();
        let mut num = 0.0;
        let mut den = 0.0;
        for i1 in 0..n[0] {
            for i2 in 0..n[1] {
                let u = [
                    grid.signed_index(0, i1) as f64 * grid.step()[0],
                    grid.signed_index(1, i2) as f64 * grid.step()[1],
                ];
                if lin::norm(u) <= 3.0 {
                    let exact = m.correlation_at(u);
                    let diff = est[grid.idx(i1, i2)] - exact;
                    num += diff * diff;
                    den += exact * exact;
                }
            }
        }
        let rel = (num / den).sqrt();
        assert!(rel < 0.05, "relative covariance error {rel}");
    }

    #[test]
    fn scattering_atom_and_mass_reference() {
        let m = InterfaceModel::gaussian(1.0).unwrap();
        let v = 2.0 * S0_REF;
        let p_grid = LateralGrid::square(128, 2.0 * PI / (128.0 * 0.125)).unwrap();
        let dist = scattering_distribution(&m, v, 1.0, &p_grid).unwrap();
        assert!((dist.atom - 28.162078953567296).abs() < 1e-10);
        assert!((dist.atom - 28.16).abs() < 5e-3);
        assert!(dist.edge_decayed(), "edge ratio {}", dist.edge_ratio);
        // Total mass (2π)²/ω².
        let expect = (2.0 * PI).powi(2);
        assert!(
            (dist.total_mass - expect).abs() / expect < 1e-6,
            "mass {} vs {expect}",
            dist.total_mass
        );
        // Bochner positivity up to FFT error.
        let peak = dist.density.iter().cloned().fold(0.0, f64::max);
        let min = dist.density.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(min >= -1e-8 * peak);
    }

    #[test]
    fn scattering_density_matches_series_and_quadrature() {
        let m = InterfaceModel::gaussian(1.0).unwrap();
        let v = 2.0 * S0_REF;
        let omega = 1.0;
        let p_grid = LateralGrid::square(128, 2.0 * PI / (128.0 * 0.125)).unwrap();
        let dist = scattering_distribution(&m, v, omega, &p_grid).unwrap();
        // Series oracle at the origin (frozen) and across sample points.
        let d0 = scattering_density_series(&m, v, omega, [0.0, 0.0]).unwrap();
        assert!((d0 - 1.6520498047706926).abs() < 1e-12);
        let peak = dist.density.iter().cloned().fold(0.0, f64::max);
        for (i1, i2) in [(64, 64), (66, 64), (64, 70), (80, 80), (40, 64)] {
            let p = p_grid.point(i1, i2);
            let series = scattering_density_series(&m, v, omega, p).unwrap();
            let grid_val = dist.density[p_grid.idx(i1, i2)];
            assert!(
                (series - grid_val).abs() < 1e-8 * peak,
                "p=({}, {}): series {series} vs fft {grid_val}",
                p[0],
                p[1]
            );
        }
        // Direct 2D Simpson quadrature of (g-g_∞)e^{-iωp·y} as a third route.
        let p = p_grid.point(70, 64);
        let g_inf = (-(omega * v).powi(2)).exp();
        let half = 12.0;
        let nq = 480; // intervals per axis, even
        let h = 2.0 * half / nq as f64;
        let w1 = |i: usize| -> f64 {
            if i == 0 || i == nq {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            }
        };
        let mut quad = Complex64::new(0.0, 0.0);
        for i in 0..=nq {
            let y1 = -half + i as f64 * h;
            for j in 0..=nq {
                let y2 = -half + j as f64 * h;
                let g = (-(omega * v).powi(2) * (1.0 - m.correlation_at([y1, y2]))).exp();
                let phase = -omega * (p[0] * y1 + p[1] * y2);
                quad += Complex64::from_polar((g - g_inf) * w1(i) * w1(j), phase);
            }
        }
        quad *= h * h / 9.0;
        let series = scattering_density_series(&m, v, omega, p).unwrap();
        assert!(
            (quad.re - series).abs() < 1e-5 * peak,
            "quadrature {} vs series {series}",
            quad.re
        );
        assert!(quad.im.abs() < 1e-8 * peak);
    }

    #[test]
    fn scattering_flat_interface_pure_atom() {
        let m = InterfaceModel::gaussian(0.0).unwrap();
        let p_grid = LateralGrid::square(32, 0.5).unwrap();
        let dist = scattering_distribution(&m, 0.7, 2.0, &p_grid).unwrap();
        let expect = (2.0 * PI).powi(2) / 4.0;
        assert!((dist.atom - expect).abs() < 1e-12);
        assert!(dist.density.iter().all(|&d| d.abs() < 1e-14));
    }

    #[test]
    fn scattering_rejects_zero_omega() {
        let m = InterfaceModel::gaussian(1.0).unwrap();
        let p_grid = LateralGrid::square(32, 0.5).unwrap();
        assert!(scattering_distribution(&m, 1.0, 0.0, &p_grid).is_err());
    }

    #[test]
    fn scattering_mc_matches_analytic() {
        let m = InterfaceModel::gaussian(1.0).unwrap();
        let v = 2.0 * S0_REF;
        let omega = 1.0;
        let n = 192;
        let du = 0.125;
        let p_grid = LateralGrid::square(n, 2.0 * PI / (n as f64 * du)).unwrap();
        let y_grid = LateralGrid::square(n, du).unwrap();
        let synth = FieldSynthesizer::new(m, y_grid).unwrap();
        let realizations: Vec<_> = (0..500).map(|i| synth.realize(31_000 + i)).collect();
        let est = scattering_distribution_mc(&realizations, v, omega, &p_grid).unwrap();
        let exact = scattering_distribution(&m, v, omega, &p_grid).unwrap();
        let peak = exact.density.iter().cloned().fold(0.0, f64::max);

        // Relative L² over the high-density region, skipping the origin bin
        // (its continuous content is routed to the atom estimate).
        let dc = p_grid.idx(n / 2, n / 2);
        let mut num = 0.0;
        let mut den = 0.0;
        for (j, (a, b)) in est.density.iter().zip(&exact.density).enumerate() {
            if j != dc && *b > 0.05 * peak {
                num += (a - b) * (a - b);
                den += b * b;
            }
        }
        let rel = (num / den).sqrt();
        assert!(rel < 0.10, "relative density error {rel}");
        assert!(est.density[dc].abs() < 1e-8);

        let se = est.atom_se.expect("ensemble estimate carries an SE");
        assert!(se > 0.0);
        // The coherent-power estimator carries a known finite-window offset:
        // the continuous density at the origin, integrated over one window.
        let window_area = (n as f64 * du).powi(2);
        let atom_offset = (2.0 * PI / omega).powi(2) * exact.density[dc] / window_area;
        assert!(
            (est.atom - exact.atom - atom_offset).abs() <= 3.0 * se,
            "atom {} vs {} + offset {atom_offset} (se {se})",
            est.atom,
            exact.atom
        );
        assert!(est.imag_residual <= 1e-10 * peak);
    }

    #[test]
    fn empirical_increment_statistics_match_g() {
        // Ensemble estimate of E[e^{iωv(V(y)-V(0))}] vs the closed form, at a
        // few lags, within 3 standard errors.
        let m = InterfaceModel::gaussian(1.0).unwrap();
        let v = 2.0 * S0_REF;
        let omega = 1.3;
        let grid = LateralGrid::square(96, 0.25).unwrap();
        let synth = FieldSynthesizer::new(m, grid).unwrap();
        let n = grid.n();
        let count = grid.len() as f64;
        let n_real = 60;
        let lags: [[usize; 2]; 3] = [[2, 0], [4, 4], [40, 0]];
        let mut sums = [[0.0; 2]; 3]; // per-lag Σ Re, Σ Re²
        let mut ims = [[0.0; 2]; 3];
        for r in 0..n_real {
            let real = synth.realize(90_000 + r);
            for (li, lag) in lags.iter().enumerate() {
                let mut acc = Complex64::new(0.0, 0.0);
                for i1 in 0..n[0] {
                    let k1 = (i1 + lag[0]) % n[0];
                    for i2 in 0..n[1] {
                        let k2 = (i2 + lag[1]) % n[1];
                        let d = real.values[grid.idx(k1, k2)] - real.values[grid.idx(i1, i2)];
                        acc += Complex64::from_polar(1.0, omega * v * d);
                    }
                }
                acc /= count;
                sums[li][0] += acc.re;
                sums[li][1] += acc.re * acc.re;
                ims[li][0] += acc.im;
                ims[li][1] += acc.im * acc.im;
            }
        }
        let nr = n_real as f64;
        for (li, lag) in lags.iter().enumerate() {
            let y = [lag[0] as f64 * 0.25, lag[1] as f64 * 0.25];
            let g = (-(omega * v).powi(2) * (m.correlation(0.0) - m.correlation_at(y))).exp();
            let mean = sums[li][0] / nr;
            let se = (((sums[li][1] / nr - mean * mean).max(0.0)) / nr).sqrt();
            assert!(
                (mean - g).abs() <= 3.0 * se.max(1e-12),
                "lag {lag:?}: mean {mean} vs g {g} (se {se})"
            );
            let im_mean = ims[li][0] / nr;
            let im_se = (((ims[li][1] / nr - im_mean * im_mean).max(0.0)) / nr).sqrt();
            assert!(im_mean.abs() <= 3.0 * im_se.max(1e-12));
        }
    }

    #[test]
    fn scattering_mc_flat_exact_and_grid_checked() {
        let m = InterfaceModel::gaussian(0.0).unwrap();
        let n = 32;
        let du = 0.25;
        let omega = 2.0;
        let p_grid = LateralGrid::square(n, 2.0 * PI / (n as f64 * omega * du)).unwrap();
        let y_grid = LateralGrid::square(n, du).unwrap();
        let synth = FieldSynthesizer::new(m, y_grid).unwrap();
        let realizations: Vec<_> = (0..3).map(|i| synth.realize(i)).collect();
        let est = scattering_distribution_mc(&realizations, 0.7, 2.0, &p_grid).unwrap();
        assert!((est.atom - (2.0 * PI).powi(2) / 4.0).abs() < 1e-12);
        assert!(est.density.iter().all(|&d| d.abs() < 1e-12));

        // Mismatched realization grid is rejected.
        let wrong = LateralGrid::square(n, 0.3).unwrap();
        let synth2 = FieldSynthesizer::new(m, wrong).unwrap();
        let bad: Vec<_> = (0..2).map(|i| synth2.realize(i)).collect();
        assert!(scattering_distribution_mc(&bad, 0.7, 2.0, &p_grid).is_err());
        // Fewer than two realizations rejected.
        assert!(scattering_distribution_mc(&realizations[..1], 0.7, 2.0, &p_grid).is_err());
    }

    #[test]
    fn mixing_correlations_decay() {
        let m = InterfaceModel::gaussian(1.0).unwrap();
        let grid = LateralGrid::square(128, 0.25).unwrap();
        let synth = FieldSynthesizer::new(m, grid).unwrap();
        let realizations: Vec<_> = (0..20).map(|i| synth.realize(777 + i)).collect();
        let curve = mixing_diagnostic(&realizations, &[0.0, 1.0, 5.0]).unwrap();
        assert!((curve[0].1 - 1.0).abs() < 1e-12);
        assert!(curve[1].1 < 1.0);
        assert!(curve[2].1 < 0.05, "correlation at r=5: {}", curve[2].1);

        let flat = InterfaceModel::gaussian(0.0).unwrap();
        let fs = FieldSynthesizer::new(flat, grid).unwrap();
        let fr: Vec<_> = (0..2).map(|i| fs.realize(i)).collect();
        let fc = mixing_diagnostic(&fr, &[0.0, 2.0]).unwrap();
        assert!(fc.iter().all(|&(_, c)| c == 0.0));
    }
}
