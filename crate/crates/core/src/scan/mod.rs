//! Sweeps over inverse temperature with a single cached eigendecomposition.

pub mod threshold;
pub mod units;

use rayon::prelude::*;

use crate::entanglement::{concurrence, ConcurrencePoint, PairReduction};
use crate::error::{Error, Result};
use crate::hamiltonian::{build, DipolarForm, SpinSystem, ZeemanRatio};
use crate::spin_ops::{hermitian_eigendecomposition, ManyBodyOperator, Spectrum};
use crate::thermo::{thermal_state, ThermoPoint};

/// Uniform β grid including both endpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepGrid {
    beta_min: f64,
    beta_max: f64,
    n_points: usize,
}

impl SweepGrid {
    pub fn new(beta_min: f64, beta_max: f64, n_points: usize) -> Result<Self> {
        if !(beta_min.is_finite() && beta_max.is_finite()) {
            return Err(Error::InvalidGrid("bounds must be finite".into()));
        }
        if !(beta_min < beta_max) {
            return Err(Error::InvalidGrid(format!(
                "beta_min {beta_min} must be below beta_max {beta_max}"
            )));
        }
        if n_points < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 points, got {n_points}")));
        }
        Ok(Self {
            beta_min,
            beta_max,
            n_points,
        })
    }

    /// β ∈ [−4, 4] with 801 points (step 0.01).
    pub fn figure_default() -> Self {
        Self {
            beta_min: -4.0,
            beta_max: 4.0,
            n_points: 801,
        }
    }

    pub fn beta_min(&self) -> f64 {
        self.beta_min
    }

    pub fn beta_max(&self) -> f64 {
        self.beta_max
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn step(&self) -> f64 {
        (self.beta_max - self.beta_min) / (self.n_points - 1) as f64
    }

    /// Grid points; a range symmetric about zero yields exactly mirrored
    /// values, so `points[i] == -points[n - 1 - i]`.
    pub fn points(&self) -> Vec<f64> {
        let last = self.n_points - 1;
        (0..self.n_points)
            .map(|i| match i {
                0 => self.beta_min,
                i if i == last => self.beta_max,
                i => (self.beta_min * (last - i) as f64 + self.beta_max * i as f64) / last as f64,
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Serial,
    #[default]
    Parallel,
}

/// One point on the parametric entropy–energy curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyEnergyPoint {
    pub energy: f64,
    pub entropy: f64,
    pub beta: f64,
}

/// A diagonalized Hamiltonian at fixed α, shared read-only by every sweep
/// point.
#[derive(Debug, Clone)]
pub struct Scanner {
    alpha: f64,
    spectrum: Spectrum,
    execution: Execution,
}

fn map_points<T, F>(execution: Execution, betas: &[f64], f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(f64) -> Result<T> + Sync + Send,
{
    match execution {
        Execution::Serial => betas.iter().map(|&b| f(b)).collect(),
        Execution::Parallel => betas.par_iter().map(|&b| f(b)).collect(),
    }
}

impl Scanner {
    pub fn new(sys: &SpinSystem, alpha: ZeemanRatio, form: DipolarForm) -> Result<Self> {
        let h = build(sys, alpha, form)?;
        Self::from_hamiltonian(&h, alpha)
    }

    /// Wraps an arbitrary Hamiltonian; `alpha` is only carried into records.
    pub fn from_hamiltonian(h: &ManyBodyOperator, alpha: ZeemanRatio) -> Result<Self> {
        Ok(Self {
            alpha: alpha.value(),
            spectrum: hermitian_eigendecomposition(h)?,
            execution: Execution::default(),
        })
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn n_spins(&self) -> usize {
        self.spectrum.n_spins()
    }

    pub fn thermo_at(&self, beta: f64) -> Result<ThermoPoint> {
        Ok(thermal_state(&self.spectrum, beta)?.point())
    }

    pub fn sweep_thermo(&self, grid: &SweepGrid) -> Result<Vec<ThermoPoint>> {
        map_points(self.execution, &grid.points(), |b| self.thermo_at(b))
    }

    pub fn pair_reduction(&self, pair: (usize, usize)) -> Result<PairReduction> {
        PairReduction::new(&self.spectrum, pair)
    }

    pub fn concurrence_at(&self, reduction: &PairReduction, beta: f64) -> Result<ConcurrencePoint> {
        let state = thermal_state(&self.spectrum, beta)?;
        let c = concurrence(&reduction.reduce(state.populations())?)?;
        Ok(ConcurrencePoint {
            beta,
            alpha: self.alpha,
            q: c.q,
            concurrence: c.value,
        })
    }

    pub fn sweep_concurrence(&self, grid: &SweepGrid, pair: (usize, usize)) -> Result<Vec<ConcurrencePoint>> {
        self.concurrence_at_points(&grid.points(), pair)
    }

    pub fn concurrence_at_points(&self, betas: &[f64], pair: (usize, usize)) -> Result<Vec<ConcurrencePoint>> {
        let reduction = self.pair_reduction(pair)?;
        map_points(self.execution, betas, |b| self.concurrence_at(&reduction, b))
    }

    /// `(E(β), S(β), β)` in grid order.
    pub fn s_vs_e_curve(&self, grid: &SweepGrid) -> Result<Vec<EntropyEnergyPoint>> {
        Ok(self
            .sweep_thermo(grid)?
            .into_iter()
            .map(|p| EntropyEnergyPoint {
                energy: p.energy,
                entropy: p.entropy,
                beta: p.beta,
            })
            .collect())
    }
}
