//! Exact-state roots against numerically detected level crossings.

use twophoton::crossing::{find_crossings, CrossingRecord, Family, DEFAULT_REFINE_TOL};
use twophoton::fock::{kappa_grid, scan_spectrum_with, ScanOptions};
use twophoton::states::{find_kappa_roots, judd_states};
use twophoton::ModelParams;

const WINDOW: (f64, f64) = (0.02, 0.7);

fn crossings(mu: f64) -> Vec<CrossingRecord> {
    let grid = kappa_grid(WINDOW.0, WINDOW.1, 400).unwrap();
    let table = scan_spectrum_with(mu, &grid, &ScanOptions::default()).unwrap();
    find_crossings(&table, DEFAULT_REFINE_TOL).unwrap()
}

fn inside(k: f64) -> bool {
    k > WINDOW.0 && k < WINDOW.1
}

#[test]
fn determinant_roots_and_crossings_coincide() {
    for mu in [1.0, 2.0, 3.0] {
        let found = crossings(mu);
        for ell in 1..=4u32 {
            let roots: Vec<f64> = find_kappa_roots(ell, mu).unwrap().into_iter().map(|r| r.kappa).filter(|&k| inside(k)).collect();
            let fam = Family::Transcendental { ell };
            for &k in &roots {
                let c = found.iter().find(|c| c.family == fam && (c.kappa_star - k).abs() < 1e-6);
                let c = c.unwrap_or_else(|| panic!("mu={mu} l={ell}: no crossing at root {k}"));
                let e = ModelParams::new(k, mu).unwrap().energy_from_chi((2 * ell + 3) as f64 / 4.0);
                assert!((c.e_star - e).abs() < 1e-6 * e.abs().max(1.0));
            }
            for c in found.iter().filter(|c| c.family == fam) {
                assert!(roots.iter().any(|k| (c.kappa_star - k).abs() < 1e-6), "mu={mu} l={ell}: crossing at {} has no root", c.kappa_star);
            }
        }
    }
}

#[test]
fn juddian_roots_and_crossings_coincide() {
    for mu in [1.0, 2.0, 3.0] {
        let found = crossings(mu);
        for n in 4..=8u32 {
            let roots: Vec<f64> = judd_states(n, mu).unwrap().roots.into_iter().map(|r| r.kappa).filter(|&k| inside(k)).collect();
            let fam = Family::Juddian { n };
            for &k in &roots {
                assert!(found.iter().any(|c| c.family == fam && (c.kappa_star - k).abs() < 1e-6), "mu={mu} n={n}: no crossing at root {k}");
            }
            for c in found.iter().filter(|c| c.family == fam) {
                assert!(roots.iter().any(|k| (c.kappa_star - k).abs() < 1e-6), "mu={mu} n={n}: crossing at {} has no root", c.kappa_star);
            }
        }
    }
}
