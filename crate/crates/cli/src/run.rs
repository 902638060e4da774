//! Executes a [`RunConfig`] and renders its table.

use std::fs::{self, File};
use std::io::{self, BufWriter};

use anyhow::{Context, Result};
use spinthermo::hamiltonian::parse_coordinates;
use spinthermo::scan::units::temperature_from_beta;
use spinthermo::{
    build_full_dipolar, dimensionless_from_physical, estimate_entanglement_temperature, PhysicalParams, Scanner,
    SpinSystem, ZeemanRatio,
};

use crate::config::{Command, HamiltonianSpec, RunConfig, SystemSpec, UnitsInput, UnitsQuery};
use crate::output::{write_table, Cell, Table};

fn read_coordinates(path: &std::path::Path) -> Result<Vec<nalgebra::Vector3<f64>>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_coordinates(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn scanner(spec: &HamiltonianSpec, alpha: f64) -> Result<Scanner> {
    let alpha = ZeemanRatio::new(alpha)?;
    Ok(match spec {
        HamiltonianSpec::Coupled { system, form } => {
            let sys = match system {
                SystemSpec::Preset(p) => p.system(),
                SystemSpec::Custom(path) => SpinSystem::custom(read_coordinates(path)?)?,
            };
            Scanner::new(&sys, alpha, *form)?
        }
        HamiltonianSpec::FullDipolar { coords, field_axis } => {
            let h = build_full_dipolar(&read_coordinates(coords)?, field_axis, alpha)?;
            Scanner::from_hamiltonian(&h, alpha)?
        }
    })
}

fn hamiltonian(config: &RunConfig) -> &HamiltonianSpec {
    config.hamiltonian.as_ref().expect("parsed configs carry a Hamiltonian")
}

fn thermo(config: &RunConfig) -> Result<Table> {
    let mut t = Table::new(&["beta", "energy", "entropy", "heat_capacity"]);
    let s = scanner(hamiltonian(config), config.alphas[0])?;
    for p in s.sweep_thermo(&config.grid)? {
        t.push(vec![
            p.beta.into(),
            p.energy.into(),
            p.entropy.into(),
            p.heat_capacity.into(),
        ]);
    }
    Ok(t)
}

fn concurrence(config: &RunConfig) -> Result<Table> {
    let mut t = Table::new(&["beta", "alpha", "q", "concurrence"]);
    for &alpha in &config.alphas {
        let s = scanner(hamiltonian(config), alpha)?;
        for p in s.sweep_concurrence(&config.grid, config.pair)? {
            t.push(vec![p.beta.into(), p.alpha.into(), p.q.into(), p.concurrence.into()]);
        }
    }
    Ok(t)
}

fn threshold(config: &RunConfig) -> Result<Table> {
    let mut t = Table::new(&["system", "alpha", "beta_star_pos", "beta_star_neg"]);
    let label = hamiltonian(config).label();
    for &alpha in &config.alphas {
        let r = scanner(hamiltonian(config), alpha)?.thresholds(config.pair, &config.search)?;
        t.push(vec![
            Cell::Text(label.clone()),
            alpha.into(),
            r.beta_star_positive().into(),
            r.beta_star_negative().into(),
        ]);
    }
    Ok(t)
}

fn spectrum(config: &RunConfig) -> Result<Table> {
    let mut t = Table::new(&["index", "energy"]);
    let s = scanner(hamiltonian(config), config.alphas[0])?;
    for (i, e) in s.spectrum().eigenvalues().iter().enumerate() {
        t.push(vec![Cell::Int(i), (*e).into()]);
    }
    Ok(t)
}

fn units(query: &UnitsQuery) -> Result<Table> {
    match query {
        UnitsQuery::Estimate { omega_d_hz } => {
            let mut t = Table::new(&["omega_d_hz", "temperature_k"]);
            for &w in omega_d_hz {
                t.push(vec![w.into(), estimate_entanglement_temperature(w)?.into()]);
            }
            Ok(t)
        }
        UnitsQuery::Convert {
            gamma_khz_per_gauss,
            r12,
            field_gauss,
            input,
        } => {
            let mut t = Table::new(&["r12_angstrom", "alpha", "beta", "temperature_k"]);
            let r_angstrom = r12.meters() * 1e10;
            let mut row = |temperature: f64| -> Result<()> {
                let d = dimensionless_from_physical(&PhysicalParams {
                    gamma_khz_per_gauss: *gamma_khz_per_gauss,
                    r12: *r12,
                    field_gauss: *field_gauss,
                    temperature_kelvin: temperature,
                })?;
                t.push(vec![
                    r_angstrom.into(),
                    d.alpha.into(),
                    d.beta.into(),
                    temperature.into(),
                ]);
                Ok(())
            };
            match input {
                UnitsInput::Temperatures(ts) => ts.iter().try_for_each(|&x| row(x))?,
                UnitsInput::Betas(bs) => bs
                    .iter()
                    .try_for_each(|&b| row(temperature_from_beta(*gamma_khz_per_gauss, *r12, b)?))?,
            }
            Ok(t)
        }
    }
}

/// Computes the table for `config` without writing it.
pub fn table(config: &RunConfig) -> Result<Table> {
    match config.command {
        Command::Thermo => thermo(config),
        Command::Concurrence => concurrence(config),
        Command::Threshold => threshold(config),
        Command::Spectrum => spectrum(config),
        Command::Units => units(config.units.as_ref().expect("parsed units query")),
    }
}

pub fn execute(config: &RunConfig) -> Result<()> {
    let table = table(config)?;
    match &config.output {
        Some(path) => {
            let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
            write_table(&table, config.format, BufWriter::new(file))
                .with_context(|| format!("writing {}", path.display()))
        }
        None => write_table(&table, config.format, io::stdout().lock()).context("writing stdout"),
    }
}
