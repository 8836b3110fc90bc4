//! The full acceptance suite: one PASS/FAIL line per criterion, exiting
//! non-zero if any fails. Runs without the libtest harness so the report
//! is always printed.

use std::f64::consts::PI;
use std::process::ExitCode;

use fisher_dimer::geometry::{Lattice, RhombicGrid};
use fisher_dimer::spectral::PeriodicCell;
use fisher_dimer::verify::{self, Check};
use fisher_dimer::{CriticalModel, Result};

const SEED: u64 = 2024;

fn models() -> Vec<(&'static str, CriticalModel)> {
    vec![
        ("z2", CriticalModel::new(Lattice::z2().patch(8).unwrap().graph).unwrap()),
        ("quasiperiodic", CriticalModel::new(RhombicGrid::quasiperiodic(7, 12).patch(8).unwrap()).unwrap()),
    ]
}

fn cells() -> Vec<PeriodicCell> {
    [Lattice::z2(), Lattice::triangular(), Lattice::honeycomb()].into_iter().map(|l| PeriodicCell::new(l).unwrap()).collect()
}

/// Fold the parts of one criterion into a single check.
fn criterion(name: &str, parts: Vec<Result<Check>>) -> Check {
    let parts: Vec<Check> = parts.into_iter().map(|r| r.unwrap_or_else(|e| Check::failed(name, &e))).collect();
    let budget = parts.iter().map(|c| c.budget).find(|&b| b > 0.0).unwrap_or(0.0);
    Check::combine(name, budget, parts)
}

fn per_model(name: &str, models: &[(&str, CriticalModel)], f: impl Fn(&CriticalModel) -> Result<Check>) -> Check {
    criterion(
        name,
        models
            .iter()
            .map(|(tag, m)| {
                f(m).map(|mut c| {
                    c.name = format!("{}[{tag}]", c.name);
                    c
                })
            })
            .collect(),
    )
}

fn per_cell(name: &str, cells: &[PeriodicCell], f: impl Fn(&PeriodicCell) -> Result<Check>) -> Check {
    criterion(name, cells.iter().map(f).collect())
}

fn main() -> ExitCode {
    let models = models();
    let cells = cells();
    let thetas = [PI / 12.0, PI / 6.0, PI / 4.0, PI / 3.0, 5.0 * PI / 12.0];

    let results: Vec<Check> = vec![
        per_model("inverse identity", &models, |m| verify::kk_identity(m, 6)),
        criterion("closed-form probabilities", vec![verify::closed_forms(&thetas)]),
        per_model("kernel identity", &models, |m| verify::kernel_identity(m, 20, SEED)),
        per_model("intermediate tables", &models, |m| verify::intermediate_tables(m, 3)),
        per_model("residue vs keyhole", &models, |m| verify::residue_vs_keyhole(m, 50, 4096, SEED)),
        per_cell("fourier vs local", &cells, |c| verify::fourier_vs_local(c, 20, 1024, SEED)),
        per_cell("free energy", &cells, |c| verify::free_energy(c, 512)),
        per_cell("ising-dimer identity", &cells, verify::ising_dimer_identity),
        per_cell("polynomial ratio", &cells, |c| verify::polynomial_ratio(c, 100, SEED)),
        criterion("asymptotics", vec![verify::asymptotics()]),
        criterion("locality", vec![verify::locality(SEED)]),
        criterion("brute force", vec![verify::brute_force()]),
    ];

    for (i, check) in results.iter().enumerate() {
        let status = if check.passed { "PASS" } else { "FAIL" };
        println!(
            "{status} criterion {}: {} (max deviation {:.3e}, budget {:.1e}, {:.2}s) {}",
            i + 1,
            check.name,
            check.deviation,
            check.budget,
            check.runtime.as_secs_f64(),
            check.detail
        );
    }
    let failed: Vec<usize> = results.iter().enumerate().filter(|(_, c)| !c.passed).map(|(i, _)| i + 1).collect();
    if failed.is_empty() {
        println!("acceptance: all {} criteria passed", results.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failing criteria {failed:?}");
        ExitCode::FAILURE
    }
}
