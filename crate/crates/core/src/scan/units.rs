//! Conversions between laboratory parameters and the dimensionless `(α, β)`.
//!
//! `D = γ²ħ / r₁₂³` is evaluated in Gaussian units (γ in rad s⁻¹ G⁻¹, ħ in
//! erg·s, r in cm) and comes out as an angular frequency in rad/s. The
//! inverse temperature is `β = ħD / (kT)` and the Zeeman ratio
//! `α = γH₀ / D`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054571817e-34;
/// Boltzmann constant, J/K.
pub const BOLTZMANN: f64 = 1.380649e-23;
/// Reduced Planck constant, erg·s.
const HBAR_CGS: f64 = HBAR * 1e7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Length {
    Meters(f64),
    Angstrom(f64),
}

impl Length {
    pub fn meters(self) -> f64 {
        match self {
            Length::Meters(m) => m,
            Length::Angstrom(a) => a * 1e-10,
        }
    }

    fn centimeters(self) -> f64 {
        self.meters() * 100.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    /// Gyromagnetic ratio γ/2π in kHz/G.
    pub gamma_khz_per_gauss: f64,
    /// Nearest-neighbour distance.
    pub r12: Length,
    /// Static field H₀ in gauss.
    pub field_gauss: f64,
    /// Signed spin temperature in kelvin.
    pub temperature_kelvin: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dimensionless {
    pub alpha: f64,
    pub beta: f64,
}

fn gamma_rad(gamma_khz_per_gauss: f64) -> f64 {
    2.0 * PI * 1e3 * gamma_khz_per_gauss
}

fn check_gamma_r12(gamma_khz_per_gauss: f64, r12: Length) -> Result<()> {
    if !(gamma_khz_per_gauss > 0.0 && gamma_khz_per_gauss.is_finite()) {
        return Err(Error::param("gamma", "must be positive and finite"));
    }
    let r = r12.meters();
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::param("r12", "must be positive and finite"));
    }
    Ok(())
}

/// Dipolar coupling `D = γ²ħ / r₁₂³` in rad/s.
pub fn dipolar_frequency(gamma_khz_per_gauss: f64, r12: Length) -> Result<f64> {
    check_gamma_r12(gamma_khz_per_gauss, r12)?;
    Ok(gamma_rad(gamma_khz_per_gauss).powi(2) * HBAR_CGS / r12.centimeters().powi(3))
}

/// Local dipolar field `γħ / r₁₂³ = D / γ` in gauss.
pub fn local_field_gauss(gamma_khz_per_gauss: f64, r12: Length) -> Result<f64> {
    Ok(dipolar_frequency(gamma_khz_per_gauss, r12)? / gamma_rad(gamma_khz_per_gauss))
}

/// Nearest-neighbour distance whose local dipolar field equals `field_gauss`.
pub fn r12_for_local_field(gamma_khz_per_gauss: f64, field_gauss: f64) -> Result<Length> {
    if !(field_gauss > 0.0 && field_gauss.is_finite()) {
        return Err(Error::param("field", "must be positive and finite"));
    }
    check_gamma_r12(gamma_khz_per_gauss, Length::Meters(1.0))?;
    let r_cm = (gamma_rad(gamma_khz_per_gauss) * HBAR_CGS / field_gauss).cbrt();
    Ok(Length::Meters(r_cm / 100.0))
}

pub fn dimensionless_from_physical(p: &PhysicalParams) -> Result<Dimensionless> {
    let d = dipolar_frequency(p.gamma_khz_per_gauss, p.r12)?;
    if p.temperature_kelvin == 0.0 || p.temperature_kelvin.is_nan() {
        return Err(Error::param("temperature", "must be nonzero"));
    }
    if !p.field_gauss.is_finite() {
        return Err(Error::param("field", "must be finite"));
    }
    Ok(Dimensionless {
        alpha: gamma_rad(p.gamma_khz_per_gauss) * p.field_gauss / d,
        beta: HBAR * d / (BOLTZMANN * p.temperature_kelvin),
    })
}

/// Signed spin temperature in kelvin for a dimensionless `β`.
pub fn temperature_from_beta(gamma_khz_per_gauss: f64, r12: Length, beta: f64) -> Result<f64> {
    let d = dipolar_frequency(gamma_khz_per_gauss, r12)?;
    if beta == 0.0 {
        return Err(Error::param("beta", "β = 0 is infinite temperature"));
    }
    Ok(HBAR * d / (BOLTZMANN * beta))
}

/// Order-of-magnitude entanglement temperature `T ≈ ħ ω_d / k` for a
/// dipolar frequency `omega_d_hz` given in Hz (cycles per second).
pub fn estimate_entanglement_temperature(omega_d_hz: f64) -> Result<f64> {
    if !(omega_d_hz > 0.0 && omega_d_hz.is_finite()) {
        return Err(Error::param("omega_d", "must be positive and finite"));
    }
    Ok(HBAR * 2.0 * PI * omega_d_hz / BOLTZMANN)
}
