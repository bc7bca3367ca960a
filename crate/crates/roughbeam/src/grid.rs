//! Periodic lateral grids and frequency ladders.
//!
//! Lateral grids are centered: coordinate of index i along an axis of n points
//! with step d is (i - n/2)·d, so the origin is a sample point and the periodic
//! box is [-nd/2, nd/2). The conjugate spectral grid carries angular wavenumbers
//! 2π·j̃/(n·d) with the signed index j̃ ∈ [-n/2, n/2).

use crate::error::{Error, Result};
use crate::lin::Vec2;
use serde::{Deserialize, Serialize};

/// Uniform centered periodic 2D grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LateralGrid {
    n: [usize; 2],
    step: [f64; 2],
}

impl LateralGrid {
    pub fn new(n: [usize; 2], step: [f64; 2]) -> Result<Self> {
        for a in 0..2 {
            if n[a] < 2 || n[a] % 2 != 0 {
                return Err(Error::InvalidParameter(format!(
                    "lateral grid size must be even and >= 2, got {}",
                    n[a]
                )));
            }
            if !(step[a] > 0.0) || !step[a].is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "lateral grid step must be positive, got {}",
                    step[a]
                )));
            }
        }
        Ok(LateralGrid { n, step })
    }

    pub fn square(n: usize, step: f64) -> Result<Self> {
        LateralGrid::new([n, n], [step, step])
    }

    pub fn n(&self) -> [usize; 2] {
        self.n
    }

    pub fn step(&self) -> [f64; 2] {
        self.step
    }

    pub fn len(&self) -> usize {
        self.n[0] * self.n[1]
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn cell_area(&self) -> f64 {
        self.step[0] * self.step[1]
    }

    pub fn period(&self, axis: usize) -> f64 {
        self.n[axis] as f64 * self.step[axis]
    }

    /// Physical coordinate of index i along `axis`.
    pub fn coord(&self, axis: usize, i: usize) -> f64 {
        (i as f64 - (self.n[axis] / 2) as f64) * self.step[axis]
    }

    /// Signed spectral index of storage index j along `axis`.
    pub fn signed_index(&self, axis: usize, j: usize) -> i64 {
        let n = self.n[axis] as i64;
        let j = j as i64;
        if j < n / 2 {
            j
        } else {
            j - n
        }
    }

    /// Angular wavenumber of storage index j along `axis`.
    pub fn freq(&self, axis: usize, j: usize) -> f64 {
        2.0 * std::f64::consts::PI * self.signed_index(axis, j) as f64 / self.period(axis)
    }

    /// Row-major flat index.
    pub fn idx(&self, i1: usize, i2: usize) -> usize {
        i1 * self.n[1] + i2
    }

    pub fn point(&self, i1: usize, i2: usize) -> Vec2 {
        [self.coord(0, i1), self.coord(1, i2)]
    }

    /// Smallest index whose coordinate is >= x (no bounds clamp).
    pub fn index_of_coord(&self, axis: usize, x: f64) -> f64 {
        x / self.step[axis] + (self.n[axis] / 2) as f64
    }
}

/// Uniform two-sided frequency ladder ±ω_m, ω_m = (m + offset)·Δω, m in [m_lo, m_hi];
/// `half_integer` grids use offset 1/2 and never contain ω = 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OmegaGrid {
    d_omega: f64,
    half_integer: bool,
    m_lo: u32,
    m_hi: u32,
}

impl OmegaGrid {
    pub fn new(d_omega: f64, half_integer: bool, m_lo: u32, m_hi: u32) -> Result<Self> {
        if !(d_omega > 0.0) || !d_omega.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "omega spacing must be positive, got {d_omega}"
            )));
        }
        if m_hi < m_lo {
            return Err(Error::InvalidParameter(format!(
                "empty omega ladder: m_lo={m_lo} > m_hi={m_hi}"
            )));
        }
        if !half_integer && m_lo == 0 {
            return Err(Error::InvalidParameter(
                "integer omega ladder must exclude omega = 0 (m_lo >= 1)".into(),
            ));
        }
        Ok(OmegaGrid {
            d_omega,
            half_integer,
            m_lo,
            m_hi,
        })
    }

    /// Ladder covering `band` = (lo, hi) on the positive axis with roughly `min_count`
    /// positive samples, spacing chosen as an integer fraction for periodicity control.
    pub fn covering(band: (f64, f64), d_omega: f64, half_integer: bool) -> Result<Self> {
        let off = if half_integer { 0.5 } else { 0.0 };
        let mut m_lo = ((band.0 / d_omega) - off).floor().max(0.0) as u32;
        if !half_integer && m_lo == 0 {
            m_lo = 1;
        }
        let m_hi = ((band.1 / d_omega) - off).ceil().max(m_lo as f64) as u32;
        OmegaGrid::new(d_omega, half_integer, m_lo, m_hi)
    }

    pub fn d_omega(&self) -> f64 {
        self.d_omega
    }

    pub fn is_half_integer(&self) -> bool {
        self.half_integer
    }

    fn offset(&self) -> f64 {
        if self.half_integer {
            0.5
        } else {
            0.0
        }
    }

    pub fn positive_count(&self) -> usize {
        (self.m_hi - self.m_lo + 1) as usize
    }

    /// Total slice count including negative frequencies.
    pub fn len(&self) -> usize {
        2 * self.positive_count()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// All frequencies in deterministic order: negatives ascending, then positives ascending.
    pub fn omegas(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.len());
        for m in (self.m_lo..=self.m_hi).rev() {
            v.push(-(m as f64 + self.offset()) * self.d_omega);
        }
        for m in self.m_lo..=self.m_hi {
            v.push((m as f64 + self.offset()) * self.d_omega);
        }
        v
    }

    pub fn positive_omegas(&self) -> Vec<f64> {
        (self.m_lo..=self.m_hi)
            .map(|m| (m as f64 + self.offset()) * self.d_omega)
            .collect()
    }

    /// Fundamental time period of the synthesized pulse train; half-integer
    /// ladders are antiperiodic over this span (periodic over twice it).
    pub fn time_period(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.d_omega
    }

    pub fn band(&self) -> (f64, f64) {
        (
            (self.m_lo as f64 + self.offset()) * self.d_omega,
            (self.m_hi as f64 + self.offset()) * self.d_omega,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn centered_coords() {
        let g = LateralGrid::new([8, 4], [0.5, 1.0]).unwrap();
        assert_eq!(g.coord(0, 4), 0.0);
        assert_eq!(g.coord(0, 0), -2.0);
        assert_eq!(g.coord(1, 3), 1.0);
        assert_eq!(g.period(0), 4.0);
    }

    #[test]
    fn signed_freqs() {
        let g = LateralGrid::new([8, 8], [1.0, 1.0]).unwrap();
        assert_eq!(g.signed_index(0, 0), 0);
        assert_eq!(g.signed_index(0, 3), 3);
        assert_eq!(g.signed_index(0, 4), -4);
        assert_eq!(g.signed_index(0, 7), -1);
        let k1 = g.freq(0, 1);
        assert!((k1 - 2.0 * std::f64::consts::PI / 8.0).abs() < 1e-15);
    }

    #[test]
    fn odd_grid_rejected() {
        assert!(LateralGrid::new([7, 8], [1.0, 1.0]).is_err());
    }

    #[test]
    fn omega_ladder_symmetric() {
        let g = OmegaGrid::new(0.5, true, 0, 3).unwrap();
        let om = g.omegas();
        assert_eq!(om.len(), 8);
        assert_eq!(om[0], -1.75);
        assert_eq!(om[3], -0.25);
        assert_eq!(om[4], 0.25);
        assert_eq!(om[7], 1.75);
        assert!(!om.contains(&0.0));
    }

    #[test]
    fn omega_covering_band() {
        let g = OmegaGrid::covering((0.9, 3.3), 0.25, false).unwrap();
        let (lo, hi) = g.band();
        assert!(lo <= 0.9 && hi >= 3.3);
        assert!(g.positive_omegas().iter().all(|w| *w > 0.0));
    }

    #[test]
    fn integer_ladder_excludes_zero() {
        assert!(OmegaGrid::new(0.5, false, 0, 3).is_err());
    }
}
