//! Media parameters, vertical slownesses, paraxial spreading matrices,
//! flat-interface scattering coefficients, and classical ray geometry.

use crate::error::{Error, Result};
use crate::lin::{self, Mat2, Vec2};
use serde::{Deserialize, Serialize};

/// Which side of the interface a quantity refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MediumIndex {
    /// Incidence side (contains the source).
    Upper,
    /// Transmission side.
    Lower,
}

impl MediumIndex {
    pub fn as_usize(self) -> usize {
        match self {
            MediumIndex::Upper => 0,
            MediumIndex::Lower => 1,
        }
    }
}

/// Two-layer medium with a nominal interface depth and a transmission-side
/// observation depth; `k0` is the incident lateral slowness vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MediumConfig {
    pub c0: f64,
    pub c1: f64,
    pub z_int: f64,
    pub z_tr: f64,
    pub k0: Vec2,
}

impl MediumConfig {
    pub fn new(c0: f64, c1: f64, z_int: f64, z_tr: f64, k0: Vec2) -> Result<Self> {
        let cfg = MediumConfig {
            c0,
            c1,
            z_int,
            z_tr,
            k0,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c0 > 0.0 && self.c1 > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "sound speeds must be positive: c0={}, c1={}",
                self.c0, self.c1
            )));
        }
        if self.c1 >= self.c0 {
            return Err(Error::InvalidParameter(format!(
                "slower lower medium required (c1 < c0): c0={}, c1={}",
                self.c0, self.c1
            )));
        }
        if !(self.z_int > 0.0 && self.z_tr > self.z_int) {
            return Err(Error::InvalidParameter(format!(
                "depths must satisfy 0 < z_int < z_tr: z_int={}, z_tr={}",
                self.z_int, self.z_tr
            )));
        }
        let k = lin::norm(self.k0);
        if !(self.c0 * k < 1.0) {
            return Err(Error::EvanescentMode(format!(
                "incident slowness too steep: c0*|k0| = {} >= 1",
                self.c0 * k
            )));
        }
        Ok(())
    }

    pub fn speed(&self, j: MediumIndex) -> f64 {
        match j {
            MediumIndex::Upper => self.c0,
            MediumIndex::Lower => self.c1,
        }
    }
}

/// Scale regime: beam width √ε, fluctuation amplitude ε, correlation length ε^γ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaleRegime {
    pub epsilon: f64,
    pub gamma: f64,
}

impl ScaleRegime {
    pub fn new(epsilon: f64, gamma: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "epsilon must be in (0,1), got {epsilon}"
            )));
        }
        if !(0.5..=1.0).contains(&gamma) {
            return Err(Error::InvalidParameter(format!(
                "gamma must be in [1/2, 1], got {gamma}"
            )));
        }
        Ok(ScaleRegime { epsilon, gamma })
    }

    pub fn beam_width(&self) -> f64 {
        self.epsilon.sqrt()
    }

    pub fn amplitude(&self) -> f64 {
        self.epsilon
    }

    pub fn correlation_length(&self) -> f64 {
        self.epsilon.powf(self.gamma)
    }

    /// λ/ℓc = ε^{1-γ}: drives speckle cone opening and Snell corrections.
    pub fn roughness_ratio(&self) -> f64 {
        self.epsilon.powf(1.0 - self.gamma)
    }

    /// Beam-frame stretch of interface coordinates, ε^{1/2-γ} ≥ 1.
    pub fn screen_stretch(&self) -> f64 {
        self.epsilon.powf(0.5 - self.gamma)
    }

    /// Speckle amplitude normalization ε^{1-2γ}.
    pub fn speckle_prefactor(&self) -> f64 {
        self.epsilon.powf(1.0 - 2.0 * self.gamma)
    }
}

/// 2x2 symmetric lateral spreading matrix for one medium.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParaxialMatrix {
    pub mat: Mat2,
    pub medium: MediumIndex,
}

/// Vertical slowness √(1 - c_j²|k0|²)/c_j of the incident carrier in medium j.
pub fn vertical_slowness(cfg: &MediumConfig, j: MediumIndex) -> Result<f64> {
    let c = cfg.speed(j);
    let ck = c * lin::norm(cfg.k0);
    if ck >= 1.0 {
        return Err(Error::EvanescentMode(format!(
            "carrier evanescent in medium {}: c|k0| = {ck} >= 1",
            j.as_usize()
        )));
    }
    Ok((1.0 - ck * ck).sqrt() / c)
}

/// Vertical slowness (1/c_j)·√(1 - ε c_j²|k|²) of the scaled lateral mode k.
pub fn vertical_slowness_eps(cfg: &MediumConfig, j: MediumIndex, k: Vec2, eps: f64) -> Result<f64> {
    let c = cfg.speed(j);
    let arg = 1.0 - eps * c * c * lin::norm_sq(k);
    if arg <= 0.0 {
        return Err(Error::EvanescentMode(format!(
            "mode evanescent in medium {}: 1 - ε c²|k|² = {arg} <= 0",
            j.as_usize()
        )));
    }
    Ok(arg.sqrt() / c)
}

/// Lateral spreading matrix A_j. Both closed forms are evaluated and must agree.
pub fn paraxial_matrix(cfg: &MediumConfig, j: MediumIndex) -> Result<ParaxialMatrix> {
    let c = cfg.speed(j);
    let s = vertical_slowness(cfg, j)?;
    let k0 = cfg.k0;
    let c2 = c * c;

    // Form 1: (1 - c²|k0|²)^{-3/2} · [[1 - c²k02², c²k01k02], [c²k01k02, 1 - c²k01²]]
    let pref = (1.0 - c2 * lin::norm_sq(k0)).powf(-1.5);
    let form1 = Mat2::new(
        1.0 - c2 * k0[1] * k0[1],
        c2 * k0[0] * k0[1],
        c2 * k0[0] * k0[1],
        1.0 - c2 * k0[0] * k0[0],
    )
    .scale(pref);

    // Form 2: (I - c² k0⊥ ⊗ k0⊥) / (c³𝓈³)
    let k0p = lin::perp(k0);
    let cs = c * s; // = √(1 - c²|k0|²)
    let form2 = Mat2::scaled_identity_plus_outer(1.0, -c2, k0p).scale(1.0 / (cs * cs * cs));

    let rel = form1.rel_diff(&form2);
    assert!(
        rel <= 1e-12,
        "paraxial matrix forms disagree: rel diff {rel}"
    );
    Ok(ParaxialMatrix {
        mat: form2,
        medium: j,
    })
}

/// Closed-form inverse c_j 𝓈_j (I - c_j² k0 ⊗ k0) of the spreading matrix.
pub fn paraxial_matrix_inverse(cfg: &MediumConfig, j: MediumIndex) -> Result<ParaxialMatrix> {
    let c = cfg.speed(j);
    let s = vertical_slowness(cfg, j)?;
    let mat = Mat2::scaled_identity_plus_outer(1.0, -c * c, cfg.k0).scale(c * s);
    Ok(ParaxialMatrix { mat, medium: j })
}

/// Flat-interface reflection and transmission coefficients (R, T).
pub fn reflection_transmission_coefficients(cfg: &MediumConfig) -> Result<(f64, f64)> {
    let s0 = vertical_slowness(cfg, MediumIndex::Upper)?;
    let s1 = vertical_slowness(cfg, MediumIndex::Lower)?;
    let r = (s0 - s1) / (s0 + s1);
    let t = 2.0 * (s0 * s1).sqrt() / (s0 + s1);
    Ok((r, t))
}

/// Per-mode flat-interface scattering ratios (transmitted, reflected) for the
/// scaled lateral mode k: (1/τ₊, τ₋/τ₊) built from the ε-scaled slownesses.
/// Satisfies |tr|² + |ref|² = 1; at the carrier mode k = k0/√ε it equals (T, R)
/// exactly, since the scaled slownesses reduce to the unscaled ones there.
pub fn flat_mode_scattering(cfg: &MediumConfig, k: Vec2, eps: f64) -> Result<(f64, f64)> {
    let s0 = vertical_slowness_eps(cfg, MediumIndex::Upper, k, eps)?;
    let s1 = vertical_slowness_eps(cfg, MediumIndex::Lower, k, eps)?;
    let tr = 2.0 * (s0 * s1).sqrt() / (s0 + s1);
    let re = (s0 - s1) / (s0 + s1);
    Ok((tr, re))
}

/// Classical specular observation geometry derived from the medium.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObservationGeometry {
    /// Point where the beam axis hits the interface plane.
    pub x_int: Vec2,
    pub x_obs_ref: Vec2,
    pub t_obs_ref: f64,
    pub x_obs_tr: Vec2,
    pub t_obs_tr: f64,
    pub theta_inc: f64,
    pub theta_ref0: f64,
    pub theta_tr0: f64,
}

pub fn observation_geometry(cfg: &MediumConfig) -> Result<ObservationGeometry> {
    let s0 = vertical_slowness(cfg, MediumIndex::Upper)?;
    let s1 = vertical_slowness(cfg, MediumIndex::Lower)?;
    let k = lin::norm(cfg.k0);
    let dz = cfg.z_tr - cfg.z_int;
    let x_int = lin::scale(cfg.k0, cfg.z_int / s0);
    let theta_inc = (k / s0).atan();
    Ok(ObservationGeometry {
        x_int,
        x_obs_ref: lin::scale(x_int, 2.0),
        t_obs_ref: 2.0 * cfg.z_int / (cfg.c0 * cfg.c0 * s0),
        x_obs_tr: lin::add(x_int, lin::scale(cfg.k0, dz / s1)),
        t_obs_tr: cfg.z_int / (cfg.c0 * cfg.c0 * s0) + dz / (cfg.c1 * cfg.c1 * s1),
        theta_inc,
        theta_ref0: theta_inc,
        theta_tr0: (k / s1).atan(),
    })
}

/// Carrier phase offset t_obs - k0·x_obs at the observation point; the moving
/// specular frame cancels the fast carrier against exactly this constant.
pub fn carrier_offset(cfg: &MediumConfig, j: MediumIndex) -> Result<f64> {
    let s0 = vertical_slowness(cfg, MediumIndex::Upper)?;
    match j {
        MediumIndex::Upper => Ok(2.0 * cfg.z_int * s0),
        MediumIndex::Lower => {
            let s1 = vertical_slowness(cfg, MediumIndex::Lower)?;
            Ok(cfg.z_int * s0 + (cfg.z_tr - cfg.z_int) * s1)
        }
    }
}
