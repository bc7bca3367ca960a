//! Classical and generalized angle laws for scattering off a weakly rough
//! interface: exact sine/tangent forms parameterized by a lateral slowness
//! offset, small-roughness expansions, normal-incidence formulas, and the
//! grating-equation comparison.

use crate::error::{Error, Result};
use crate::lin::{self, Vec2};
use crate::medium::{MediumConfig, MediumIndex};
use serde::{Deserialize, Serialize};

/// Which outgoing wave an angle query refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScatterSide {
    Reflection,
    Transmission,
}

impl ScatterSide {
    pub fn medium(self) -> MediumIndex {
        match self {
            ScatterSide::Reflection => MediumIndex::Upper,
            ScatterSide::Transmission => MediumIndex::Lower,
        }
    }
}

/// One angle query: outgoing side, lateral slowness offset `p` of the
/// scattered direction, and the roughness ratio weighting that offset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SnellQuery {
    pub side: ScatterSide,
    pub cfg: MediumConfig,
    pub p: Vec2,
    pub roughness: f64,
}

impl SnellQuery {
    pub fn new(side: ScatterSide, cfg: MediumConfig, p: Vec2, roughness: f64) -> Result<Self> {
        cfg.validate()?;
        validate_roughness(roughness)?;
        validate_offset(p)?;
        Ok(SnellQuery {
            side,
            cfg,
            p,
            roughness,
        })
    }
}

fn validate_roughness(roughness: f64) -> Result<()> {
    if !(roughness > 0.0 && roughness <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "roughness ratio must lie in (0, 1], got {roughness}"
        )));
    }
    Ok(())
}

fn validate_offset(p: Vec2) -> Result<()> {
    if !(p[0].is_finite() && p[1].is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "slowness offset must be finite, got ({}, {})",
            p[0], p[1]
        )));
    }
    Ok(())
}

/// Sine of the smooth-interface angle on the queried side, c_j|k0|.
fn smooth_limit_sine(side: ScatterSide, cfg: &MediumConfig) -> Result<f64> {
    let sine = cfg.speed(side.medium()) * lin::norm(cfg.k0);
    if sine >= 1.0 {
        return Err(Error::EvanescentMode(format!(
            "{side:?} wave evanescent at the smooth interface: c|k0| = {sine} >= 1"
        )));
    }
    Ok(sine)
}

/// Smooth-interface angle on the queried side: θ_inc for reflection, the
/// classical refraction angle θ_tr for transmission.
pub fn smooth_limit_angle(side: ScatterSide, cfg: &MediumConfig) -> Result<f64> {
    Ok(smooth_limit_sine(side, cfg)?.asin())
}

/// Deflection strength ξ = ρ c0²/sin²θ_inc, with ρ the roughness ratio.
/// The incident angle enters for both outgoing sides.
pub fn xi_factor(query: &SnellQuery) -> Result<f64> {
    let sin_inc = query.cfg.c0 * lin::norm(query.cfg.k0);
    if sin_inc == 0.0 {
        return Err(Error::InvalidParameter(
            "carrier at normal incidence: use normal_incidence_angle".into(),
        ));
    }
    Ok(query.roughness * query.cfg.c0 * query.cfg.c0 / (sin_inc * sin_inc))
}

/// Ξ − 1 where Ξ = (1 + u)² + w², u = ξ (p·k0)/cos²θ0, w = ξ (p·k0⊥).
/// Expanded as 2u + u² + w² so small offsets keep full precision.
fn modulation_excess(query: &SnellQuery) -> Result<f64> {
    let xi = xi_factor(query)?;
    let s0 = smooth_limit_sine(query.side, &query.cfg)?;
    let cos2 = 1.0 - s0 * s0;
    let u = xi * lin::dot(query.p, query.cfg.k0) / cos2;
    let w = xi * lin::dot(query.p, lin::perp(query.cfg.k0));
    Ok(2.0 * u + u * u + w * w)
}

/// Outgoing angle of the deflected wave, from the sine form
/// sinθ(p) = sinθ0 √(Ξ / (1 + sin²θ0 (Ξ − 1))).
///
/// A computed sine at or above 1 is reported as an error, not clamped.
pub fn generalized_angle(query: &SnellQuery) -> Result<f64> {
    let s0 = smooth_limit_sine(query.side, &query.cfg)?;
    let excess = modulation_excess(query)?;
    let sine = s0 * ((1.0 + excess) / (1.0 + s0 * s0 * excess)).sqrt();
    if !(sine < 1.0) {
        return Err(Error::SineOutOfRange { value: sine });
    }
    Ok(sine.asin())
}

/// The same outgoing angle from the tangent form tanθ(p) = tanθ0 √Ξ.
/// Kept as an independent route; agreement with [`generalized_angle`]
/// is part of the validation surface.
pub fn generalized_angle_tangent_form(query: &SnellQuery) -> Result<f64> {
    let s0 = smooth_limit_sine(query.side, &query.cfg)?;
    let excess = modulation_excess(query)?;
    let tan0 = s0 / (1.0 - s0 * s0).sqrt();
    Ok((tan0 * (1.0 + excess).sqrt()).atan())
}

/// Deflection law at normal incidence, θ = arctan(ρ c_j |p|).
/// Requires k0 = 0; oblique carriers go through [`generalized_angle`].
pub fn normal_incidence_angle(
    side: ScatterSide,
    cfg: &MediumConfig,
    p: Vec2,
    roughness: f64,
) -> Result<f64> {
    cfg.validate()?;
    validate_roughness(roughness)?;
    validate_offset(p)?;
    if lin::norm(cfg.k0) != 0.0 {
        return Err(Error::InvalidParameter(
            "oblique carrier: use generalized_angle".into(),
        ));
    }
    Ok((roughness * cfg.speed(side.medium()) * lin::norm(p)).atan())
}

/// One rung of a roughness ladder: the exact angle, its first-order
/// prediction, and the deviation normalized by ρ²|p|².
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpansionPoint {
    pub roughness: f64,
    pub theta_exact: f64,
    pub theta_approx: f64,
    pub deviation: f64,
    pub second_order_ratio: f64,
}

/// First-order prediction θ0 + ρ c_j (p·k̂0)/cosθ0 against the exact law.
/// The reported deviation is second order in ρ, and `second_order_ratio`
/// is that deviation divided by ρ²|p|² (zero offset reports 0).
pub fn small_roughness_expansion(query: &SnellQuery) -> Result<ExpansionPoint> {
    let theta_exact = generalized_angle(query)?;
    let s0 = smooth_limit_sine(query.side, &query.cfg)?;
    let theta0 = s0.asin();
    let cos0 = (1.0 - s0 * s0).sqrt();
    let khat = lin::scale(query.cfg.k0, 1.0 / lin::norm(query.cfg.k0));
    let cj = query.cfg.speed(query.side.medium());
    let theta_approx = theta0 + query.roughness * cj * lin::dot(query.p, khat) / cos0;
    let deviation = (theta_exact - theta_approx).abs();
    let offset_sq = lin::norm_sq(query.p);
    let second_order_ratio = if offset_sq == 0.0 {
        0.0
    } else {
        deviation / (query.roughness * query.roughness * offset_sq)
    };
    Ok(ExpansionPoint {
        roughness: query.roughness,
        theta_exact,
        theta_approx,
        deviation,
        second_order_ratio,
    })
}

/// Expansion quality over a ladder of roughness ratios, one point per rung.
pub fn expansion_order_report(
    side: ScatterSide,
    cfg: &MediumConfig,
    p: Vec2,
    ladder: &[f64],
) -> Result<Vec<ExpansionPoint>> {
    ladder
        .iter()
        .map(|&rho| small_roughness_expansion(&SnellQuery::new(side, *cfg, p, rho)?))
        .collect()
}

/// Grating deflection arcsin(sinθ_inc + m λ/d) for diffraction order `m`.
/// Orders past grazing are rejected as evanescent.
pub fn grating_equation(wavelength: f64, period: f64, theta_inc: f64, order: i32) -> Result<f64> {
    if !(wavelength > 0.0 && wavelength.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "wavelength must be positive, got {wavelength}"
        )));
    }
    if !(period > 0.0 && period.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "grating period must be positive, got {period}"
        )));
    }
    if !(theta_inc.abs() < std::f64::consts::FRAC_PI_2) {
        return Err(Error::InvalidParameter(format!(
            "incidence angle must lie in (-π/2, π/2), got {theta_inc}"
        )));
    }
    let sine = theta_inc.sin() + f64::from(order) * wavelength / period;
    if sine.abs() > 1.0 {
        return Err(Error::SineOutOfRange { value: sine });
    }
    Ok(sine.asin())
}
