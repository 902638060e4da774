//! Canonical ensemble at any finite inverse temperature, positive or negative.
//!
//! Boltzmann weights are evaluated as `exp(−(β ε_i − s))` with
//! `s = min_i β ε_i`, so every exponent is ≤ 0 and the largest weight is
//! exactly 1. For β < 0 the shift selects the top of the spectrum.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spin_ops::{scale_columns, ManyBodyOperator, Spectrum};

/// Populations below this are treated as exactly zero in the entropy sum.
pub const POPULATION_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone)]
pub struct ThermalState<'a> {
    beta: f64,
    populations: Vec<f64>,
    log_norm: f64,
    spectrum: &'a Spectrum,
}

/// Thermodynamic observables at one inverse temperature (energy in units of
/// `D`, entropy and heat capacity in units of `k`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermoPoint {
    pub beta: f64,
    pub energy: f64,
    pub entropy: f64,
    pub heat_capacity: f64,
}

/// Stabilized Boltzmann populations and `ln Z`.
pub(crate) fn boltzmann_populations(eigenvalues: &[f64], beta: f64) -> Result<(Vec<f64>, f64)> {
    if !beta.is_finite() {
        return Err(Error::param("beta", format!("{beta} is not finite")));
    }
    if eigenvalues.iter().any(|e| e.is_nan()) {
        return Err(Error::param("spectrum", "eigenvalue is NaN"));
    }
    let shift = eigenvalues.iter().map(|&e| beta * e).fold(f64::INFINITY, f64::min);
    let mut weights: Vec<f64> = eigenvalues.iter().map(|&e| (-(beta * e - shift)).exp()).collect();
    let sum: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= sum;
    }
    Ok((weights, sum.ln() - shift))
}

/// Thermal state `ρ = exp(−β h) / Z` in the eigenbasis of `spectrum`.
pub fn thermal_state(spectrum: &Spectrum, beta: f64) -> Result<ThermalState<'_>> {
    let (populations, log_norm) = boltzmann_populations(spectrum.eigenvalues().as_slice(), beta)?;
    Ok(ThermalState {
        beta,
        populations,
        log_norm,
        spectrum,
    })
}

impl<'a> ThermalState<'a> {
    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Populations ordered like the spectrum's ascending eigenvalues.
    pub fn populations(&self) -> &[f64] {
        &self.populations
    }

    /// `ln Z`.
    pub fn log_norm(&self) -> f64 {
        self.log_norm
    }

    pub fn spectrum(&self) -> &'a Spectrum {
        self.spectrum
    }

    fn moment(&self, power: i32) -> f64 {
        self.populations
            .iter()
            .zip(self.spectrum.eigenvalues().iter())
            .map(|(p, e)| p * e.powi(power))
            .sum()
    }

    /// `E = Tr(ρ h)`.
    pub fn energy(&self) -> f64 {
        self.moment(1)
    }

    /// `S = −Tr(ρ ln ρ)`.
    pub fn entropy(&self) -> f64 {
        -self
            .populations
            .iter()
            .filter(|&&p| p > POPULATION_FLOOR)
            .map(|&p| p * p.ln())
            .sum::<f64>()
    }

    /// `C = β² (⟨h²⟩ − ⟨h⟩²)`.
    pub fn heat_capacity(&self) -> f64 {
        let mean = self.energy();
        let variance: f64 = self
            .populations
            .iter()
            .zip(self.spectrum.eigenvalues().iter())
            .map(|(p, e)| p * (e - mean).powi(2))
            .sum();
        self.beta * self.beta * variance
    }

    pub fn point(&self) -> ThermoPoint {
        ThermoPoint {
            beta: self.beta,
            energy: self.energy(),
            entropy: self.entropy(),
            heat_capacity: self.heat_capacity(),
        }
    }

    /// `ρ = V diag(p) V†` on the full space.
    pub fn density_matrix(&self) -> ManyBodyOperator {
        let v = self.spectrum.eigenvectors();
        let scaled = scale_columns(v, self.populations.iter().copied());
        let mut rho: DMatrix<Complex64> = scaled * v.adjoint();
        // Symmetrize away roundoff so downstream Hermiticity checks see an exact match.
        let n = rho.nrows();
        for j in 0..n {
            rho[(j, j)].im = 0.0;
            for i in 0..j {
                let avg = (rho[(i, j)] + rho[(j, i)].conj()) * 0.5;
                rho[(i, j)] = avg;
                rho[(j, i)] = avg.conj();
            }
        }
        ManyBodyOperator::from_matrix(self.spectrum.n_spins(), rho).expect("eigenvector dimension matches spin count")
    }
}
