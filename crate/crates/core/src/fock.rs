//! Truncated Fock-basis spectrum of `K`, resolved by Z4 parity.
//!
//! On `|n⟩ ⊗ |λ⟩` with `σx|λ⟩ = λ|λ⟩` the symmetry acts as
//! `τ|n, λ⟩ = iⁿ λ |n, λ⟩`. A parity-`s` sector is therefore spanned by
//! `|n, λₙ⟩` with `λₙ = s·(−i)ⁿ`, where `n` runs over even photon numbers for
//! `s = ±1` and odd ones for `s = ±i`. Inside a sector `μσx` is diagonal
//! (`μλₙ`), while `[(a†)² + a²]σz` couples `n ↔ n+2` and flips `λ`, which is
//! exactly the sign alternation `λ_{n+2} = −λₙ`. Each sector is thus a real
//! symmetric tridiagonal (Jacobi) matrix with
//! `dₖ = 2x nₖ + μλ_{nₖ}` and `eₖ = √((nₖ+1)(nₖ+2))`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ModelParams, Parity};
use crate::tridiag::SymTridiag;

pub const DEFAULT_TRUNCATION: usize = 240;
/// Extra photon numbers used by the automatic convergence re-check.
pub const CONVERGENCE_STEP: usize = 40;
pub const DEFAULT_CONVERGENCE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct SectorBasis {
    pub parity: Parity,
    pub indices: Vec<usize>,
    pub spins: Vec<i8>,
}

impl SectorBasis {
    pub fn new(parity: Parity, truncation: usize) -> Self {
        let first = if parity.is_even() { 0 } else { 1 };
        let indices: Vec<usize> = (first..=truncation).step_by(2).collect();
        let spins = indices.iter().map(|&n| spin(parity, n)).collect();
        Self { parity, indices, spins }
    }

    pub fn dim(&self) -> usize {
        self.indices.len()
    }
}

/// `λₙ = s·(−i)ⁿ`, real for admissible `n`.
fn spin(parity: Parity, n: usize) -> i8 {
    match (parity.exponent() as i64 - n as i64).rem_euclid(4) {
        0 => 1,
        2 => -1,
        _ => unreachable!("photon number parity does not match sector"),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SectorMatrix {
    pub basis: SectorBasis,
    pub matrix: SymTridiag,
    pub truncation: usize,
}

impl SectorMatrix {
    pub fn diag(&self) -> &[f64] {
        &self.matrix.diag
    }

    pub fn offdiag(&self) -> &[f64] {
        &self.matrix.offdiag
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }
}

pub fn build_sector_matrix(m: &ModelParams, s: Parity, truncation: usize) -> Result<SectorMatrix> {
    if truncation < 2 {
        return Err(Error::InvalidParameter(format!("truncation {truncation} must be >= 2")));
    }
    let basis = SectorBasis::new(s, truncation);
    let two_x = 2.0 * m.x();
    let diag = basis
        .indices
        .iter()
        .zip(&basis.spins)
        .map(|(&n, &l)| two_x * n as f64 + m.mu() * l as f64)
        .collect();
    let offdiag = basis.indices[..basis.dim() - 1]
        .iter()
        .map(|&n| ((n as f64 + 1.0) * (n as f64 + 2.0)).sqrt())
        .collect();
    Ok(SectorMatrix { matrix: SymTridiag::new(diag, offdiag)?, basis, truncation })
}

/// The `k` smallest eigenvalues of one sector.
pub fn sector_eigenvalues(m: &SectorMatrix, k: usize) -> Result<Vec<f64>> {
    m.matrix.smallest(k)
}

/// A single sector level, used by crossing refinement.
pub fn level_energy(m: &ModelParams, s: Parity, truncation: usize, index: usize) -> Result<f64> {
    build_sector_matrix(m, s, truncation)?.matrix.eigenvalue(index)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorLevels {
    pub parity: Parity,
    pub energy: Vec<f64>,
    pub chi: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum PointStatus {
    Ok,
    /// Levels moved by `max_shift` when the truncation grew by [`CONVERGENCE_STEP`].
    Unconverged { max_shift: f64 },
    Failed { message: String },
}

impl PointStatus {
    pub fn label(&self) -> &'static str {
        match self {
            PointStatus::Ok => "ok",
            PointStatus::Unconverged { .. } => "unconverged",
            PointStatus::Failed { .. } => "failed",
        }
    }

    pub fn is_usable(&self) -> bool {
        matches!(self, PointStatus::Ok)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub kappa: f64,
    /// Sector levels in [`Parity::ALL`] order; empty when the point failed.
    pub sectors: Vec<SectorLevels>,
    pub status: PointStatus,
}

impl GridPoint {
    pub fn sector(&self, s: Parity) -> Option<&SectorLevels> {
        self.sectors.iter().find(|l| l.parity == s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumTable {
    pub mu: f64,
    pub levels: usize,
    pub truncation: usize,
    pub convergence_tol: f64,
    pub points: Vec<GridPoint>,
}

impl SpectrumTable {
    pub fn grid(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.kappa).collect()
    }

    pub fn failed_points(&self) -> usize {
        self.points.iter().filter(|p| matches!(p.status, PointStatus::Failed { .. })).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanOptions {
    pub levels: usize,
    pub truncation: usize,
    pub convergence_tol: f64,
    /// Skip the `N + 40` re-check (every point is reported `Ok`).
    pub check_convergence: bool,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            levels: 12,
            truncation: DEFAULT_TRUNCATION,
            convergence_tol: DEFAULT_CONVERGENCE_TOL,
            check_convergence: true,
        }
    }
}

/// Evenly spaced κ values on `[min, max]`.
pub fn kappa_grid(min: f64, max: f64, points: usize) -> Result<Vec<f64>> {
    if !(min > 0.0 && max < 1.0 && min <= max) || points == 0 {
        return Err(Error::InvalidParameter(format!(
            "kappa grid [{min}, {max}] with {points} points must lie in (0,1)"
        )));
    }
    if points == 1 {
        return Ok(vec![min]);
    }
    let h = (max - min) / (points - 1) as f64;
    Ok((0..points).map(|i| if i + 1 == points { max } else { min + h * i as f64 }).collect())
}

pub fn scan_spectrum(mu: f64, grid: &[f64], levels: usize, truncation: usize) -> Result<SpectrumTable> {
    scan_spectrum_with(mu, grid, &ScanOptions { levels, truncation, ..ScanOptions::default() })
}

pub fn scan_spectrum_with(mu: f64, grid: &[f64], opts: &ScanOptions) -> Result<SpectrumTable> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter("empty kappa grid".into()));
    }
    if grid.iter().any(|&k| !(k > 0.0 && k < 1.0)) {
        return Err(Error::InvalidParameter("kappa grid must lie in (0,1)".into()));
    }
    if grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidParameter("kappa grid must be sorted".into()));
    }
    if !(mu >= 0.0) {
        return Err(Error::InvalidParameter(format!("mu = {mu} must be >= 0")));
    }
    if opts.truncation < 2 {
        return Err(Error::InvalidParameter(format!("truncation {} must be >= 2", opts.truncation)));
    }
    let points = grid.par_iter().map(|&kappa| scan_point(mu, kappa, opts)).collect();
    Ok(SpectrumTable {
        mu,
        levels: opts.levels,
        truncation: opts.truncation,
        convergence_tol: opts.convergence_tol,
        points,
    })
}

fn scan_point(mu: f64, kappa: f64, opts: &ScanOptions) -> GridPoint {
    match point_levels(mu, kappa, opts) {
        Ok((sectors, status)) => GridPoint { kappa, sectors, status },
        Err(e) => GridPoint { kappa, sectors: Vec::new(), status: PointStatus::Failed { message: e.to_string() } },
    }
}

fn point_levels(mu: f64, kappa: f64, opts: &ScanOptions) -> Result<(Vec<SectorLevels>, PointStatus)> {
    let m = ModelParams::new(kappa, mu)?;
    let mut sectors = Vec::with_capacity(4);
    let mut max_shift: f64 = 0.0;
    for s in Parity::ALL {
        let energy = sector_eigenvalues(&build_sector_matrix(&m, s, opts.truncation)?, opts.levels)?;
        if opts.check_convergence {
            let bigger = build_sector_matrix(&m, s, opts.truncation + CONVERGENCE_STEP)?;
            let check = sector_eigenvalues(&bigger, opts.levels)?;
            for (a, b) in energy.iter().zip(&check) {
                max_shift = max_shift.max((a - b).abs() / a.abs().max(1.0));
            }
        }
        let chi = energy.iter().map(|&e| m.chi_from_energy(e)).collect();
        sectors.push(SectorLevels { parity: s, energy, chi });
    }
    let status = if max_shift < opts.convergence_tol {
        PointStatus::Ok
    } else {
        PointStatus::Unconverged { max_shift }
    };
    Ok((sectors, status))
}

/// All sector eigenvalues inside `[energy − window, energy + window)`,
/// counted exactly by Sturm sequences.
pub fn count_levels_near(m: &ModelParams, truncation: usize, energy: f64, window: f64) -> Result<Vec<(Parity, usize)>> {
    Parity::ALL
        .iter()
        .map(|&s| {
            let sm = build_sector_matrix(m, s, truncation)?;
            Ok((s, sm.matrix.count_in(energy - window, energy + window)))
        })
        .collect()
}
