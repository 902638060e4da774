//! Shared fixtures for the benchmarks.

use spinthermo::{DipolarForm, Preset, Scanner, ZeemanRatio};

/// Diagonalized transverse-form Hamiltonian for a preset.
pub fn scanner(preset: Preset, alpha: f64) -> Scanner {
    Scanner::new(
        &preset.system(),
        ZeemanRatio::new(alpha).expect("finite α"),
        DipolarForm::Transverse,
    )
    .expect("presets diagonalize")
}
