//! Independent checks on constructed states: differential-equation
//! residuals, ℤ₄ parity, Bargmann norms and spectral multiplicity.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{count_levels_near, DEFAULT_TRUNCATION};
use crate::model::{ModelParams, Parity};
use crate::states::{JuddState, TranscendentalState};

/// Terms kept in the factorial-weighted Taylor sum.
pub const NORM_TERMS: usize = 400;
/// Terms entering the tail-ratio fit.
pub const NORM_TAIL: usize = 100;
pub const DEGENERACY_WINDOW: f64 = 1e-7;
/// Tail ratios within this distance of 1 are inconclusive.
const RATIO_MARGIN: f64 = 1e-3;

/// A two-component function that can be evaluated with four derivatives.
pub trait Spinor: Sync {
    fn params(&self) -> ModelParams;
    fn energy(&self) -> f64;
    fn parity(&self) -> Parity;
    /// `[ψᵢ, ψᵢ′, …, ψᵢ⁗]` for both components.
    fn jet(&self, z: Complex64) -> Result<[[Complex64; 5]; 2]>;
    fn value(&self, z: Complex64) -> Result<[Complex64; 2]> {
        let j = self.jet(z)?;
        Ok([j[0][0], j[1][0]])
    }
    /// `gₖ = fₖ√(k!)` of both components.
    fn weighted_taylor(&self, terms: usize) -> Result<[Vec<Complex64>; 2]>;
}

fn real_vec(v: Vec<f64>) -> Vec<Complex64> {
    v.into_iter().map(|x| Complex64::new(x, 0.0)).collect()
}

impl Spinor for TranscendentalState {
    fn params(&self) -> ModelParams {
        TranscendentalState::params(self)
    }
    fn energy(&self) -> f64 {
        self.energy
    }
    fn parity(&self) -> Parity {
        self.parity
    }
    fn jet(&self, z: Complex64) -> Result<[[Complex64; 5]; 2]> {
        Ok([self.psi1.jet(z, self.kappa)?, self.psi2.jet(z, self.kappa)?])
    }
    fn value(&self, z: Complex64) -> Result<[Complex64; 2]> {
        Ok([self.psi1.eval(z, self.kappa)?, self.psi2.eval(z, self.kappa)?])
    }
    fn weighted_taylor(&self, terms: usize) -> Result<[Vec<Complex64>; 2]> {
        Ok([real_vec(self.psi1.weighted_taylor(self.kappa, terms)?), real_vec(self.psi2.weighted_taylor(self.kappa, terms)?)])
    }
}

impl Spinor for JuddState {
    fn params(&self) -> ModelParams {
        JuddState::params(self)
    }
    fn energy(&self) -> f64 {
        self.energy
    }
    fn parity(&self) -> Parity {
        self.parity
    }
    fn jet(&self, z: Complex64) -> Result<[[Complex64; 5]; 2]> {
        let sum = |terms: &[crate::states::GaussPoly]| {
            let mut out = [Complex64::new(0.0, 0.0); 5];
            for t in terms {
                for (o, v) in out.iter_mut().zip(t.jet(z)) {
                    *o += v;
                }
            }
            out
        };
        Ok([sum(&self.psi1), sum(&self.psi2)])
    }
    fn weighted_taylor(&self, terms: usize) -> Result<[Vec<Complex64>; 2]> {
        let sum = |parts: &[crate::states::GaussPoly]| {
            let mut out = vec![Complex64::new(0.0, 0.0); terms];
            for t in parts {
                for (o, v) in out.iter_mut().zip(t.weighted_taylor(terms)) {
                    *o += v;
                }
            }
            out
        };
        Ok([sum(&self.psi1), sum(&self.psi2)])
    }
}

/// 24 points on `[−2, 2]` and 8 on `|z| = 1`.
pub fn default_grid() -> Vec<Complex64> {
    let mut g: Vec<Complex64> = (0..24).map(|k| Complex64::new(-2.0 + 4.0 * k as f64 / 23.0, 0.0)).collect();
    g.extend((0..8).map(|k| Complex64::from_polar(1.0, std::f64::consts::PI * (2.0 * k as f64 + 0.5) / 8.0)));
    g
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Equation {
    FourthOrder,
    System,
    Factor,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub equation: Equation,
    /// Largest `|Σ terms| / max|term|` over the grid.
    pub max_residual: f64,
    pub points: usize,
    /// Grid points where every term vanished.
    pub degenerate_points: usize,
    pub grid: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OdeResiduals {
    pub fourth_order: ResidualReport,
    pub system: ResidualReport,
}

impl OdeResiduals {
    pub fn max(&self) -> f64 {
        self.fourth_order.max_residual.max(self.system.max_residual)
    }
    pub fn degenerate(&self) -> bool {
        self.fourth_order.degenerate_points == self.fourth_order.points
    }
}

fn describe(grid: &[Complex64]) -> String {
    let real = grid.iter().filter(|z| z.im == 0.0).count();
    format!("{} points ({} real, {} complex)", grid.len(), real, grid.len() - real)
}

/// `|Σtᵢ| / maxᵢ|tᵢ|`, or `None` when every term vanishes.
fn scaled(terms: &[Complex64]) -> Option<f64> {
    let scale = terms.iter().fold(0.0f64, |m, t| m.max(t.norm()));
    if scale == 0.0 {
        None
    } else {
        Some(terms.iter().sum::<Complex64>().norm() / scale)
    }
}

fn fold(equation: Equation, grid: &[Complex64], r: &[Option<f64>]) -> ResidualReport {
    ResidualReport {
        equation,
        max_residual: r.iter().flatten().fold(0.0, |m: f64, &v| m.max(v)),
        points: r.len(),
        degenerate_points: r.iter().filter(|v| v.is_none()).count(),
        grid: describe(grid),
    }
}

/// Residuals of the fourth-order equation for ψ₁ and of the first-order
/// system for `(ψ₁, ψ₂)` at energy `E`.
pub fn ode_residual(state: &dyn Spinor, m: &ModelParams, energy: f64, grid: &[Complex64]) -> Result<OdeResiduals> {
    let (x, mu, e) = (m.x(), m.mu(), energy);
    let per_point: Vec<(Option<f64>, Option<f64>)> = grid
        .par_iter()
        .map(|&z| {
            let [p, q] = state.jet(z)?;
            let z2 = z * z;
            let fourth = [
                p[4],
                ((2.0 - 4.0 * x * x) * z2 + 4.0 * x) * p[2],
                4.0 * z * (1.0 + e * x - x * x) * p[1],
                (2.0 - e * e + mu * mu - 4.0 * x * z2 + z2 * z2) * p[0],
            ];
            let eq1 = [p[2], 2.0 * x * z * p[1], (z2 - e) * p[0], mu * q[0]];
            let eq2 = [q[2], -2.0 * x * z * q[1], (z2 + e) * q[0], -mu * p[0]];
            let sys = match (scaled(&eq1), scaled(&eq2)) {
                (None, None) => None,
                (a, b) => Some(a.unwrap_or(0.0).max(b.unwrap_or(0.0))),
            };
            Ok((scaled(&fourth), sys))
        })
        .collect::<Result<_>>()?;
    let (f, s): (Vec<_>, Vec<_>) = per_point.into_iter().unzip();
    Ok(OdeResiduals { fourth_order: fold(Equation::FourthOrder, grid, &f), system: fold(Equation::System, grid, &s) })
}

/// Residual of `L₂ = ∂z² + κ_op(2 − κ_op z²)` applied to ψ₁.
pub fn factor_residual(state: &dyn Spinor, kappa_op: f64, grid: &[Complex64]) -> Result<ResidualReport> {
    let r = grid
        .iter()
        .map(|&z| {
            let [p, _] = state.jet(z)?;
            Ok(scaled(&[p[2], kappa_op * (2.0 - kappa_op * z * z) * p[0]]))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(fold(Equation::Factor, grid, &r))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParityReport {
    pub parity: Parity,
    /// Largest of `|ψ₁(iz) − sψ₂(z)|` and `|ψ₂(iz) − sψ₁(z)|`, relative to
    /// the component sizes at the point.
    pub deviation: f64,
}

pub fn parity_check(state: &dyn Spinor, s: Parity, grid: &[Complex64]) -> Result<ParityReport> {
    let sv = s.value();
    let mut dev: f64 = 0.0;
    for &z in grid {
        let [a, b] = state.value(z)?;
        let [ai, bi] = state.value(Complex64::i() * z)?;
        let scale = a.norm().max(b.norm()).max(ai.norm()).max(bi.norm());
        if scale == 0.0 {
            continue;
        }
        dev = dev.max((ai - sv * b).norm() / scale).max((bi - sv * a).norm() / scale);
    }
    Ok(ParityReport { parity: s, deviation: dev })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormVerdict {
    Convergent,
    Divergent,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    /// `S_k = Σ_{j≤k} j!|f_j|²` summed over both components.
    pub partial_sums: Vec<f64>,
    pub norm_squared: f64,
    /// Fitted ratio of consecutive two-term blocks; `4σ²` for type `σ`.
    pub tail_ratio: f64,
    /// `σ = √ratio / 2`.
    pub fitted_type: f64,
    pub verdict: NormVerdict,
    /// Terms above the underflow floor.
    pub terms_used: usize,
}

/// Verdict from weighted coefficients `gₖ = fₖ√(k!)` of any number of
/// components.
pub fn norm_from_weighted(components: &[Vec<Complex64>]) -> NormReport {
    let terms = components.iter().map(Vec::len).max().unwrap_or(0);
    let t: Vec<f64> = (0..terms).map(|k| components.iter().map(|c| c.get(k).map_or(0.0, |v| v.norm_sqr())).sum()).collect();
    let mut partial_sums = Vec::with_capacity(terms);
    let mut acc = 0.0;
    for v in &t {
        acc += v;
        partial_sums.push(acc);
    }
    let blocks: Vec<f64> = t.chunks(2).map(|c| c.iter().sum()).collect();
    let top = blocks.iter().fold(0.0f64, |m, &b| m.max(b));
    let live = blocks.iter().rposition(|&b| b > 1e-280 * top && b.is_finite()).map_or(0, |i| i + 1);
    let terms_used = (2 * live).min(terms);
    let finish = |tail_ratio: f64, verdict| NormReport {
        norm_squared: if verdict == NormVerdict::Convergent { acc } else { f64::INFINITY },
        partial_sums: partial_sums.clone(),
        tail_ratio,
        fitted_type: tail_ratio.sqrt() / 2.0,
        verdict,
        terms_used,
    };
    if top == 0.0 {
        return finish(0.0, NormVerdict::Convergent);
    }
    if blocks.iter().any(|b| !b.is_finite()) {
        return finish(f64::INFINITY, NormVerdict::Divergent);
    }
    // terminating series: trailing blocks vanish identically, or the input
    // is itself a short polynomial
    if (terms < NORM_TAIL || live + NORM_TAIL / 2 <= blocks.len()) && blocks[live..].iter().all(|&b| b == 0.0) {
        return finish(0.0, NormVerdict::Convergent);
    }
    let window: Vec<(f64, f64)> = (live.saturating_sub(NORM_TAIL / 2)..live).filter(|&m| m > 0 && blocks[m] > 0.0).map(|m| (m as f64, blocks[m].ln())).collect();
    if window.len() < 10 {
        return finish(f64::NAN, NormVerdict::Inconclusive);
    }
    // ln b_m = m ln r + p ln m + c
    let a = DMatrix::from_fn(window.len(), 3, |r, c| match c {
        0 => window[r].0,
        1 => window[r].0.ln(),
        _ => 1.0,
    });
    let y = DVector::from_iterator(window.len(), window.iter().map(|w| w.1));
    let ratio = match a.svd(true, true).solve(&y, 1e-14) {
        Ok(x) => x[0].exp(),
        Err(_) => return finish(f64::NAN, NormVerdict::Inconclusive),
    };
    let verdict = if ratio < 1.0 - RATIO_MARGIN {
        NormVerdict::Convergent
    } else if ratio > 1.0 + RATIO_MARGIN {
        NormVerdict::Divergent
    } else {
        NormVerdict::Inconclusive
    };
    let mut report = finish(ratio, verdict);
    if verdict == NormVerdict::Convergent {
        let last = t[..terms_used].iter().rev().take(2).sum::<f64>();
        report.norm_squared += last * ratio / (1.0 - ratio);
    }
    report
}

pub fn bargmann_norm(state: &dyn Spinor) -> Result<NormReport> {
    let [a, b] = state.weighted_taylor(NORM_TERMS)?;
    Ok(norm_from_weighted(&[a, b]))
}

/// `(1/π)∫(|ψ₁|²+|ψ₂|²)e^{−|z|²}d²z` by Simpson in `r` and the trapezoid
/// rule in `θ`. A low-accuracy cross-check of the series norm.
pub fn quadrature_norm(state: &dyn Spinor, radial: usize, angular: usize) -> Result<f64> {
    let kappa = state.params().kappa();
    let r_max = (46.0 / (1.0 - kappa)).sqrt().min(50.0 / (2.0 * kappa).sqrt());
    let nr = radial + radial % 2;
    let h = r_max / nr as f64;
    let rows = (0..=nr)
        .into_par_iter()
        .map(|i| {
            let r = i as f64 * h;
            let w = if i == 0 || i == nr { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
            let mut ring = 0.0;
            for k in 0..angular {
                let z = Complex64::from_polar(r, 2.0 * std::f64::consts::PI * k as f64 / angular as f64);
                let [a, b] = state.value(z)?;
                ring += a.norm_sqr() + b.norm_sqr();
            }
            Ok(w * r * (-r * r).exp() * ring * 2.0 / angular as f64)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(rows.iter().sum::<f64>() * h / 3.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegeneracyReport {
    pub multiplicity: usize,
    pub per_sector: Vec<(Parity, usize)>,
    pub window: f64,
    pub truncation: usize,
}

/// Truncation large enough for levels near `κ`: eigenvectors spread over
/// photon numbers of order `2κ/(1−κ)²`.
pub fn truncation_for(kappa: f64) -> usize {
    let spread = 2.0 * kappa / ((1.0 - kappa) * (1.0 - kappa));
    (DEFAULT_TRUNCATION as f64).max(DEFAULT_TRUNCATION as f64 + 40.0 * spread).min(20_000.0) as usize
}

/// Eigenvalues of all four sectors within `window` of `energy`.
pub fn degeneracy_count(m: &ModelParams, energy: f64, truncation: usize, window: f64) -> Result<DegeneracyReport> {
    if !(window > 0.0) {
        return Err(Error::InvalidParameter(format!("window = {window} must be positive")));
    }
    let per_sector: Vec<(Parity, usize)> = count_levels_near(m, truncation, energy, window)?.into_iter().filter(|&(_, c)| c > 0).collect();
    let multiplicity = per_sector.iter().map(|&(_, c)| c).sum();
    Ok(DegeneracyReport { multiplicity, per_sector, window, truncation })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub residual: f64,
    pub parity: f64,
    pub window: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { residual: 1e-8, parity: 1e-9, window: DEGENERACY_WINDOW }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub residuals: OdeResiduals,
    pub parity: ParityReport,
    pub norm: NormReport,
    pub degeneracy: DegeneracyReport,
    /// Names of failed checks with their measured values.
    pub failures: Vec<String>,
}

impl Summary {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// The full chain: residuals, parity, norm and multiplicity.
pub fn verify_state(state: &dyn Spinor, tol: &Tolerances) -> Result<Summary> {
    let m = state.params();
    let grid = default_grid();
    let residuals = ode_residual(state, &m, state.energy(), &grid)?;
    let parity = parity_check(state, state.parity(), &grid)?;
    let norm = bargmann_norm(state)?;
    let degeneracy = degeneracy_count(&m, state.energy(), truncation_for(m.kappa()), tol.window)?;
    let mut failures = Vec::new();
    if residuals.degenerate() {
        failures.push("residual: state vanishes on the grid".to_string());
    }
    if !(residuals.fourth_order.max_residual < tol.residual) {
        failures.push(format!("fourth-order residual {:e} >= {:e}", residuals.fourth_order.max_residual, tol.residual));
    }
    if !(residuals.system.max_residual < tol.residual) {
        failures.push(format!("system residual {:e} >= {:e}", residuals.system.max_residual, tol.residual));
    }
    if !(parity.deviation < tol.parity) {
        failures.push(format!("parity deviation {:e} >= {:e}", parity.deviation, tol.parity));
    }
    if norm.verdict != NormVerdict::Convergent {
        failures.push(format!("norm verdict {:?} (tail ratio {:e})", norm.verdict, norm.tail_ratio));
    }
    if degeneracy.multiplicity != 2 {
        failures.push(format!("multiplicity {} != 2", degeneracy.multiplicity));
    }
    Ok(Summary { residuals, parity, norm, degeneracy, failures })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_function_has_unit_norm() {
        let r = norm_from_weighted(&[vec![Complex64::new(1.0, 0.0)]]);
        assert_eq!(r.verdict, NormVerdict::Convergent);
        assert_eq!(r.norm_squared, 1.0);
    }

    fn exp_series(c: f64, terms: usize) -> Vec<Complex64> {
        // e^{cz²}: g_{2m} = cᵐ√((2m)!)/m!
        let mut ln_fact = vec![0.0f64; terms + 1];
        for k in 1..=terms {
            ln_fact[k] = ln_fact[k - 1] + (k as f64).ln();
        }
        (0..terms)
            .map(|k| {
                if k % 2 == 1 {
                    return Complex64::new(0.0, 0.0);
                }
                let m = k / 2;
                Complex64::new((m as f64 * c.ln() - ln_fact[m] + 0.5 * ln_fact[k]).exp(), 0.0)
            })
            .collect()
    }

    #[test]
    fn type_one_series_diverges() {
        // exp(z²/(2κ)) at κ = ½
        let r = norm_from_weighted(&[exp_series(1.0, NORM_TERMS)]);
        assert_eq!(r.verdict, NormVerdict::Divergent);
        assert!((r.fitted_type - 1.0).abs() < 0.02, "{}", r.fitted_type);
    }

    #[test]
    fn gaussian_norm_in_closed_form() {
        // ‖e^{cz²}‖² = 1/√(1−4c²)
        let c: f64 = 0.2;
        let r = norm_from_weighted(&[exp_series(c, NORM_TERMS)]);
        assert_eq!(r.verdict, NormVerdict::Convergent);
        assert!((r.norm_squared - 1.0 / (1.0 - 4.0 * c * c).sqrt()).abs() < 1e-12);
        assert!((r.fitted_type - c).abs() < 0.05 * c);
    }

    #[test]
    fn grid_layout() {
        let g = default_grid();
        assert_eq!(g.len(), 32);
        assert!(g[..24].iter().all(|z| z.im == 0.0 && z.re.abs() <= 2.0));
        assert!(g[24..].iter().all(|z| (z.norm() - 1.0).abs() < 1e-15 && z.im != 0.0));
    }

    #[test]
    fn truncation_grows_toward_strong_coupling() {
        assert_eq!(truncation_for(0.0), DEFAULT_TRUNCATION);
        assert!(truncation_for(0.9) > truncation_for(0.5));
    }
}
