//! Pulsed beam source: a modulated Gaussian profile sampled on a time × lateral
//! grid, its spectra in both unscaled (ω, κ) and scaled (ω, q = κ/ω) variables,
//! and admissibility checks for the propagating-mode regime.
//!
//! Conventions: temporal transform kernel e^{+iωs}, lateral kernel e^{-iκ·y};
//! the scaled transform evaluates the lateral kernel at κ = ωq and inverts with
//! weight ω² dω dq / (2π)³. Negative frequencies are carried explicitly.

use crate::error::{Error, Result};
use crate::grid::{LateralGrid, OmegaGrid};
use crate::lin::{self, Vec2};
use crate::medium::MediumConfig;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Relative level below which the spectrum is treated as negligible outside
/// the declared band and q-ball.
pub const NEGLIGIBILITY_THRESHOLD: f64 = 1e-8;

/// Lateral envelope parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamParams {
    /// 1/e² lateral half-width of the Gaussian envelope.
    pub lateral_width: f64,
}

/// Uniform centered time grid: s_i = (i - n/2)·ds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    n: usize,
    ds: f64,
}

impl TimeGrid {
    pub fn new(n: usize, ds: f64) -> Result<Self> {
        if n < 2 || n % 2 != 0 {
            return Err(Error::InvalidParameter(format!(
                "time grid length must be even and >= 2, got {n}"
            )));
        }
        if !(ds > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "time step must be positive, got {ds}"
            )));
        }
        Ok(TimeGrid { n, ds })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn step(&self) -> f64 {
        self.ds
    }

    pub fn coord(&self, i: usize) -> f64 {
        (i as f64 - self.n as f64 / 2.0) * self.ds
    }

    pub fn extent(&self) -> f64 {
        self.n as f64 / 2.0 * self.ds
    }
}

/// Modulated Gaussian pulse-beam profile
/// Ψ(s, y) = cos(ω_c s)·exp(-s²/(2σ_t²))·exp(-|y|²/(2r²)),
/// sampled on its own time × lateral grid, together with the declared
/// frequency band and lateral-slowness ball outside which the spectrum is
/// below `NEGLIGIBILITY_THRESHOLD` of its peak.
#[derive(Debug, Clone)]
pub struct SourceProfile {
    omega_c: f64,
    sigma_t: f64,
    r_y: f64,
    band: [f64; 2],
    q_radius: f64,
    time_grid: TimeGrid,
    lateral_grid: LateralGrid,
    /// Time-major samples: values[it·n1·n2 + i1·n2 + i2].
    values: Vec<f64>,
}

fn next_pow2(n: usize) -> usize {
    n.next_power_of_two().max(2)
}

/// Bisection on a bracketing interval; f(lo) and f(hi) must have opposite signs.
fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    let flo = f(lo);
    debug_assert!(flo * f(hi) <= 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) * flo > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

impl SourceProfile {
    /// Build the default separable profile from a central frequency, a
    /// bandwidth 2σ_ω (so σ_t = 2/bandwidth), and lateral beam parameters.
    /// Rejects configurations whose spectrum cannot stay below the
    /// negligibility threshold on a band bounded away from ω = 0.
    pub fn new(omega_c: f64, bandwidth: f64, beam: BeamParams) -> Result<Self> {
        if !(omega_c > 0.0 && bandwidth > 0.0 && beam.lateral_width > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "source parameters must be positive: omega_c={omega_c}, \
                 bandwidth={bandwidth}, lateral_width={}",
                beam.lateral_width
            )));
        }
        if omega_c <= 3.0 * bandwidth {
            return Err(Error::InvalidParameter(format!(
                "central frequency too small relative to bandwidth: \
                 omega_c={omega_c} <= 3·{bandwidth}"
            )));
        }
        let sigma_t = 2.0 / bandwidth;
        let r_y = beam.lateral_width;
        let th = NEGLIGIBILITY_THRESHOLD;

        let temporal = |omega: f64| -> f64 {
            let a = sigma_t * (omega - omega_c);
            let b = sigma_t * (omega + omega_c);
            sigma_t * (PI / 2.0).sqrt() * ((-0.5 * a * a).exp() + (-0.5 * b * b).exp())
        };
        let peak = temporal(omega_c);

        // T̂ is strictly increasing on (0, ω_c); the lower band edge is where
        // it crosses the threshold. If even T̂(0) is above it, the spectrum
        // reaches down to ω = 0 and the profile is inadmissible.
        if temporal(0.0) >= th * peak {
            return Err(Error::InvalidParameter(format!(
                "spectrum does not decay below {th:.0e} of peak before ω=0: \
                 omega_c·sigma_t = {} too small",
                omega_c * sigma_t
            )));
        }
        let band_lo = bisect(0.0, omega_c, |w| temporal(w) - th * peak);
        let band_hi = bisect(omega_c, omega_c + 20.0 / sigma_t, |w| {
            temporal(w) - th * peak
        });

        // Smallest lateral-slowness radius outside which T̂(ω)·e^{-r²ω²q²/2}
        // stays below threshold for every ω in the band.
        let mut q_radius = 0.0_f64;
        let scan = 2000;
        for i in 0..=scan {
            let w = band_lo + (band_hi - band_lo) * i as f64 / scan as f64;
            let ratio = temporal(w) / (th * peak);
            if ratio > 1.0 {
                q_radius = q_radius.max((2.0 * ratio.ln()).sqrt() / (r_y * w));
            }
        }

        // Sampled representation: time step resolves the highest band
        // frequency and the envelope; lateral step resolves the envelope.
        let ds0 = (2.0 * PI / (8.0 * band_hi)).min(sigma_t / 8.0);
        let n_s = next_pow2((16.0 * sigma_t / ds0).ceil() as usize);
        let time_grid = TimeGrid::new(n_s, ds0)?;
        let dy = r_y / 4.0;
        let n_y = next_pow2((12.0 * r_y / dy).ceil() as usize);
        let lateral_grid = LateralGrid::square(n_y, dy)?;

        let t_trace: Vec<f64> = (0..n_s)
            .map(|i| {
                let s = time_grid.coord(i);
                (omega_c * s).cos() * (-0.5 * s * s / (sigma_t * sigma_t)).exp()
            })
            .collect();
        let env_trace: Vec<f64> = (0..n_y)
            .map(|i| {
                let y = lateral_grid.coord(0, i);
                (-0.5 * y * y / (r_y * r_y)).exp()
            })
            .collect();
        let mut values = Vec::with_capacity(n_s * n_y * n_y);
        for &tv in &t_trace {
            for &e1 in &env_trace {
                for &e2 in &env_trace {
                    values.push(tv * e1 * e2);
                }
            }
        }

        Ok(SourceProfile {
            omega_c,
            sigma_t,
            r_y,
            band: [band_lo, band_hi],
            q_radius,
            time_grid,
            lateral_grid,
            values,
        })
    }

    /// Same profile parameterized by envelope widths instead of bandwidth.
    pub fn from_widths(omega_c: f64, sigma_t: f64, lateral_width: f64) -> Result<Self> {
        if !(sigma_t > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "temporal width must be positive, got {sigma_t}"
            )));
        }
        SourceProfile::new(omega_c, 2.0 / sigma_t, BeamParams { lateral_width })
    }

    pub fn omega_c(&self) -> f64 {
        self.omega_c
    }

    pub fn sigma_t(&self) -> f64 {
        self.sigma_t
    }

    pub fn lateral_width(&self) -> f64 {
        self.r_y
    }

    /// Declared positive-frequency band [lo, hi].
    pub fn band(&self) -> [f64; 2] {
        self.band
    }

    /// Declared lateral-slowness ball radius.
    pub fn q_radius(&self) -> f64 {
        self.q_radius
    }

    pub fn time_grid(&self) -> &TimeGrid {
        &self.time_grid
    }

    pub fn lateral_grid(&self) -> &LateralGrid {
        &self.lateral_grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, it: usize, i1: usize, i2: usize) -> f64 {
        self.values[it * self.lateral_grid.len() + self.lateral_grid.idx(i1, i2)]
    }

    /// Closed-form temporal spectrum T̂(ω) = ∫ e^{iωs} T(s) ds (real, even).
    pub fn temporal_spectrum(&self, omega: f64) -> f64 {
        let a = self.sigma_t * (omega - self.omega_c);
        let b = self.sigma_t * (omega + self.omega_c);
        self.sigma_t * (PI / 2.0).sqrt() * ((-0.5 * a * a).exp() + (-0.5 * b * b).exp())
    }

    /// Closed-form lateral spectrum 2πr²·e^{-r²|κ|²/2} of the beam envelope.
    pub fn lateral_spectrum(&self, kappa: Vec2) -> f64 {
        let r2 = self.r_y * self.r_y;
        2.0 * PI * r2 * (-0.5 * r2 * lin::norm_sq(kappa)).exp()
    }

    /// Scaled spectral envelope Ψ̂(ω, q) = T̂(ω)·(lateral spectrum at κ = ωq).
    pub fn spectral_envelope(&self, omega: f64, q: Vec2) -> f64 {
        self.temporal_spectrum(omega) * self.lateral_spectrum(lin::scale(q, omega))
    }

    /// Radius of lateral-slowness support at frequency ω: the spectrum drops
    /// below threshold·peak outside |q| = q_max(ω). Zero where T̂ itself is
    /// already below threshold.
    pub fn q_max_at(&self, omega: f64) -> f64 {
        let th = NEGLIGIBILITY_THRESHOLD * self.temporal_spectrum(self.omega_c);
        let ratio = self.temporal_spectrum(omega) / th;
        if ratio <= 1.0 || omega.abs() < 1e-300 {
            0.0
        } else {
            (2.0 * ratio.ln()).sqrt() / (self.r_y * omega.abs())
        }
    }

    /// Closed-form lateral L² mass of the spectrum at frequency ω:
    /// (ω²/(2π)²)∫|Ψ̂(ω,q)|²dq = πr²·T̂²(ω).
    pub fn spectral_power(&self, omega: f64) -> f64 {
        let t = self.temporal_spectrum(omega);
        PI * self.r_y * self.r_y * t * t
    }

    /// Closed-form squared L² norm of the profile.
    pub fn norm_sq(&self) -> f64 {
        let a = self.omega_c * self.sigma_t;
        let time = 0.5 * self.sigma_t * PI.sqrt() * (1.0 + (-a * a).exp());
        time * PI * self.r_y * self.r_y
    }

    /// Squared L² norm by direct quadrature over the sampled grid.
    pub fn sampled_norm_sq(&self) -> f64 {
        let cell = self.time_grid.step() * self.lateral_grid.cell_area();
        self.values.iter().map(|v| v * v).sum::<f64>() * cell
    }

    /// Lateral L² mass of the spectrum on a frequency grid, computed twice:
    /// by radial quadrature of the scaled spectral envelope with the
    /// ω²/(2π)² weight, and by temporal quadrature over the sampled profile
    /// followed by a lateral grid sum.
    pub fn band_energy(&self, omegas: &[f64]) -> BandEnergy {
        let spectral: Vec<f64> = omegas.iter().map(|&w| self.quadrature_power(w)).collect();

        let n_lat = self.lateral_grid.len();
        let ds = self.time_grid.step();
        let cell = self.lateral_grid.cell_area();
        let n_s = self.time_grid.len();
        let mut time_route = Vec::with_capacity(omegas.len());
        let mut transformed = vec![Complex64::new(0.0, 0.0); n_lat];
        for &w in omegas {
            let phases: Vec<Complex64> = (0..n_s)
                .map(|i| Complex64::from_polar(ds, w * self.time_grid.coord(i)))
                .collect();
            transformed
                .iter_mut()
                .for_each(|c| *c = Complex64::new(0.0, 0.0));
            for (it, ph) in phases.iter().enumerate() {
                let row = &self.values[it * n_lat..(it + 1) * n_lat];
                for (acc, &v) in transformed.iter_mut().zip(row) {
                    *acc += ph * v;
                }
            }
            time_route.push(transformed.iter().map(|c| c.norm_sqr()).sum::<f64>() * cell);
        }

        BandEnergy {
            omegas: omegas.to_vec(),
            spectral,
            time_route,
        }
    }

    /// (ω²/(2π)²)∫|Ψ̂(ω,q)|²dq by composite-Simpson radial quadrature.
    fn quadrature_power(&self, omega: f64) -> f64 {
        if omega.abs() < 1e-12 {
            return 0.0;
        }
        let rho_max = 10.0 / (self.r_y * omega.abs());
        let n = 2000; // intervals, even
        let h = rho_max / n as f64;
        let mut sum = 0.0;
        for i in 0..=n {
            let rho = i as f64 * h;
            let env = self.spectral_envelope(omega, [rho, 0.0]);
            let weight = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            sum += weight * env * env * rho;
        }
        let integral = 2.0 * PI * sum * h / 3.0;
        omega * omega / (4.0 * PI * PI) * integral
    }
}

/// Lateral L² spectrum mass on a frequency grid, by two independent routes.
#[derive(Debug, Clone)]
pub struct BandEnergy {
    pub omegas: Vec<f64>,
    /// Radial quadrature of the closed-form scaled spectrum.
    pub spectral: Vec<f64>,
    /// Temporal transform of the sampled profile, summed over the lateral grid.
    pub time_route: Vec<f64>,
}

impl BandEnergy {
    /// Largest relative disagreement between the two routes, measured against
    /// the peak spectral value.
    pub fn max_rel_diff(&self) -> f64 {
        let peak = self.spectral.iter().cloned().fold(0.0, f64::max);
        if peak == 0.0 {
            return 0.0;
        }
        self.spectral
            .iter()
            .zip(&self.time_route)
            .map(|(a, b)| (a - b).abs() / peak)
            .fold(0.0, f64::max)
    }
}

/// Result of the propagating-mode admissibility check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeCheck {
    pub ok: bool,
    /// 1 - (√ε·c0·q_max + c0·|k0|); positive means all excited modes propagate.
    pub margin: f64,
    pub q_max: f64,
}

/// Propagation margin for a given lateral-slowness support radius.
pub fn mode_margin(cfg: &MediumConfig, eps: f64, q_max: f64) -> f64 {
    1.0 - (eps.sqrt() * cfg.c0 * q_max + cfg.c0 * lin::norm(cfg.k0))
}

/// Checks that every lateral mode in the profile's declared q-ball propagates
/// (no evanescent content) in the incidence medium at scale ε.
pub fn propagating_mode_check(profile: &SourceProfile, cfg: &MediumConfig, eps: f64) -> ModeCheck {
    let q_max = profile.q_radius();
    let margin = mode_margin(cfg, eps, q_max);
    ModeCheck {
        ok: margin > 0.0,
        margin,
        q_max,
    }
}

/// Uniform spectral grid for the scaled transform: a two-sided frequency
/// ladder and a centered lateral-slowness grid. `validate_for` checks the
/// aliasing criteria that guarantee faithful reconstruction on the central
/// half of a profile's sampled grid: alias copies produced by the discrete
/// inversion must land beyond the envelope support measured from any
/// evaluation point.
#[derive(Debug, Clone)]
pub struct SpectralGrid {
    pub omega: OmegaGrid,
    pub q: LateralGrid,
}

impl SpectralGrid {
    pub fn new(omega: OmegaGrid, q: LateralGrid) -> Self {
        SpectralGrid { omega, q }
    }

    pub fn validate_for(&self, profile: &SourceProfile) -> Result<()> {
        let s_ext = profile.time_grid().extent();
        let s_clear = 0.5 * s_ext + 8.0 * profile.sigma_t();
        if self.omega.time_period() < s_clear {
            return Err(Error::GridResolution(format!(
                "frequency spacing too coarse: alias period {} < required {}",
                self.omega.time_period(),
                s_clear
            )));
        }
        let band = profile.band();
        let (lo, hi) = self.omega.band();
        if lo > band[0] || hi < band[1] {
            return Err(Error::GridResolution(format!(
                "frequency grid [{lo}, {hi}] does not cover profile band \
                 [{}, {}]",
                band[0], band[1]
            )));
        }
        let y_ext = profile.lateral_grid().period(0) / 2.0;
        let y_clear = 0.5 * y_ext + 8.0 * profile.lateral_width();
        let kappa_step = hi * self.q.step()[0].max(self.q.step()[1]);
        if 2.0 * PI / kappa_step < y_clear {
            return Err(Error::GridResolution(format!(
                "q spacing too coarse at band top: lateral alias period {} < \
                 required {}",
                2.0 * PI / kappa_step,
                y_clear
            )));
        }
        Ok(())
    }
}

/// Scaled forward transform of the profile on a spectral grid:
/// F(ω, q) = ΣΣ Ψ(s,y)·e^{iωs}e^{-iωq·y}·ds·dy, stored ω-major over the
/// grid's two-sided frequency ladder. The separable structure of the sampled
/// profile is used to factor the sums. Callers that intend to invert should
/// check `grid.validate_for(profile)` first.
pub fn scaled_forward(profile: &SourceProfile, grid: &SpectralGrid) -> Vec<Complex64> {
    let tg = profile.time_grid();
    let lg = profile.lateral_grid();
    let (n_s, ds) = (tg.len(), tg.step());
    let n_y = lg.n();
    let dy = lg.step();
    let nq = grid.q.n();
    let omegas = grid.omega.omegas();

    // Sampled traces extracted from the stored values: the time trace along
    // the lateral center, the lateral envelope along each axis at s = 0.
    let ic = [n_y[0] / 2, n_y[1] / 2];
    let it0 = n_s / 2;
    let t_trace: Vec<f64> = (0..n_s).map(|i| profile.value(i, ic[0], ic[1])).collect();
    let env1: Vec<f64> = (0..n_y[0]).map(|i| profile.value(it0, i, ic[1])).collect();
    let env2: Vec<f64> = (0..n_y[1]).map(|i| profile.value(it0, ic[0], i)).collect();

    let mut out = Vec::with_capacity(omegas.len() * grid.q.len());
    for &w in &omegas {
        let t_hat: Complex64 = t_trace
            .iter()
            .enumerate()
            .map(|(i, &v)| Complex64::from_polar(v * ds, w * tg.coord(i)))
            .sum();
        let lat = |axis: usize, env: &[f64], jq: usize| -> Complex64 {
            let kappa = w * grid.q.coord(axis, jq);
            env.iter()
                .enumerate()
                .map(|(i, &v)| Complex64::from_polar(v * dy[axis], -kappa * lg.coord(axis, i)))
                .sum()
        };
        let l1: Vec<Complex64> = (0..nq[0]).map(|j| lat(0, &env1, j)).collect();
        let l2: Vec<Complex64> = (0..nq[1]).map(|j| lat(1, &env2, j)).collect();
        for a in &l1 {
            for b in &l2 {
                out.push(t_hat * a * b);
            }
        }
    }
    out
}

/// Scaled inverse transform at arbitrary evaluation points:
/// u(s, y) = (1/(2π)³)·Σ_ω Σ_q F(ω,q)·e^{-iωs}e^{iωq·y}·ω²·Δω·Δq².
/// Returns values in row-major (s × y) order; the imaginary parts, which
/// vanish for Hermitian data, are discarded.
pub fn scaled_inverse(
    grid: &SpectralGrid,
    data: &[Complex64],
    s_points: &[f64],
    y_points: &[Vec2],
) -> Result<Vec<f64>> {
    let nq = grid.q.len();
    let omegas = grid.omega.omegas();
    if data.len() != omegas.len() * nq {
        return Err(Error::InvalidParameter(format!(
            "spectral data length {} does not match grid ({} × {})",
            data.len(),
            omegas.len(),
            nq
        )));
    }
    let d_omega = grid.omega.d_omega();
    let dq = grid.q.cell_area();
    let weight = d_omega * dq / (2.0 * PI).powi(3);

    // Lateral sums per (ω, y), then the frequency sum per s.
    let mut lat_sums = vec![Complex64::new(0.0, 0.0); omegas.len() * y_points.len()];
    for (iw, &w) in omegas.iter().enumerate() {
        let slice = &data[iw * nq..(iw + 1) * nq];
        for (iy, &y) in y_points.iter().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for i1 in 0..grid.q.n()[0] {
                let q1 = grid.q.coord(0, i1);
                for i2 in 0..grid.q.n()[1] {
                    let q2 = grid.q.coord(1, i2);
                    let phase = w * (q1 * y[0] + q2 * y[1]);
                    acc += slice[grid.q.idx(i1, i2)] * Complex64::from_polar(1.0, phase);
                }
            }
            lat_sums[iw * y_points.len() + iy] = acc * (w * w);
        }
    }
    let mut out = Vec::with_capacity(s_points.len() * y_points.len());
    for &s in s_points {
        for iy in 0..y_points.len() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (iw, &w) in omegas.iter().enumerate() {
                acc += lat_sums[iw * y_points.len() + iy] * Complex64::from_polar(1.0, -w * s);
            }
            out.push(acc.re * weight);
        }
    }
    Ok(out)
}
