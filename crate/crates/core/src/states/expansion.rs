//! Finite 𝒟-expansions of the transcendental states and their reduction to
//! `A(z)d(z) + B(z)d′(z)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{chi_for_ell, lowest_index, null_vector_with, NullVector, DEFAULT_SEED};
use crate::dfamily::{connection_coefficient, eval_d, Branch, DIndex, Precision};
use crate::error::{Error, Result};
use crate::model::{ModelParams, Parity};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Component {
    Psi1,
    Psi2,
}

/// `Σⱼ cⱼ 𝒟_{l_start+2j}^{(branch)}(√(2κ)z)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DExpansion {
    pub l_start: i32,
    pub coefficients: Vec<f64>,
    pub branch: Branch,
    pub component: Component,
}

impl DExpansion {
    pub fn index(&self, j: usize) -> i32 {
        self.l_start + 2 * j as i32
    }

    /// Coefficient of `𝒟ₙ`, zero outside the expansion.
    pub fn coefficient(&self, n: i32) -> f64 {
        let d = n - self.l_start;
        if d < 0 || d % 2 != 0 {
            return 0.0;
        }
        self.coefficients.get((d / 2) as usize).copied().unwrap_or(0.0)
    }

    /// Value and the first four derivatives in `ζ`.
    pub fn jet_zeta(&self, zeta: Complex64) -> Result<[Complex64; 5]> {
        let mut out = [Complex64::new(0.0, 0.0); 5];
        for (j, &c) in self.coefficients.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let n = self.index(j);
            let jet = eval_d(DIndex::new(n, self.branch), zeta)?.jet(n, zeta);
            for (o, v) in out.iter_mut().zip(jet) {
                *o += c * v;
            }
        }
        Ok(out)
    }

    /// Value and the first four derivatives in `z`, `ζ = √(2κ)z`.
    pub fn jet(&self, z: Complex64, kappa: f64) -> Result<[Complex64; 5]> {
        let s = (2.0 * kappa).sqrt();
        let mut jet = self.jet_zeta(s * z)?;
        let mut f = 1.0;
        for v in jet.iter_mut() {
            *v *= f;
            f *= s;
        }
        Ok(jet)
    }

    pub fn eval(&self, z: Complex64, kappa: f64) -> Result<Complex64> {
        let s = (2.0 * kappa).sqrt();
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, &c) in self.coefficients.iter().enumerate() {
            if c != 0.0 {
                acc += c * eval_d(DIndex::new(self.index(j), self.branch), s * z)?.value;
            }
        }
        Ok(acc)
    }

    /// Factorial-weighted Taylor coefficients `gₖ = fₖ√(k!)` in `z`, from
    /// `g_{k+2} = κ²g_{k−2}√(k(k−1)/((k+1)(k+2))) − 2κ(n+1)gₖ/√((k+1)(k+2))`.
    pub fn weighted_taylor(&self, kappa: f64, terms: usize) -> Result<Vec<f64>> {
        let mut out = vec![0.0; terms];
        let s = (2.0 * kappa).sqrt();
        for (j, &c) in self.coefficients.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let n = self.index(j);
            let d = eval_d(DIndex::new(n, self.branch), Complex64::new(0.0, 0.0))?;
            let mut g = vec![0.0; terms + 2];
            match self.branch {
                Branch::Plus => g[0] = d.value.re,
                Branch::Minus => g[1] = s * d.derivative.re,
            }
            for k in 0..terms.saturating_sub(2) {
                let kf = k as f64;
                let prev = if k >= 2 { g[k - 2] } else { 0.0 };
                let r = ((kf + 1.0) * (kf + 2.0)).sqrt();
                g[k + 2] = kappa * kappa * prev * (kf * (kf - 1.0)).max(0.0).sqrt() / r - 2.0 * kappa * (n as f64 + 1.0) * g[k] / r;
            }
            for (o, v) in out.iter_mut().zip(&g) {
                *o += c * v;
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscendentalState {
    pub ell: u32,
    pub kappa: f64,
    pub mu: f64,
    pub chi: f64,
    pub energy: f64,
    pub branch: Branch,
    pub psi1: DExpansion,
    pub psi2: DExpansion,
    /// `s` with `ψ₁(iz) = sψ₂(z)`, read off the coefficients.
    pub parity: Parity,
    /// Coefficient-level deviation from `ψ₁(iz) = sψ₂(z)`.
    pub parity_mismatch: f64,
    pub null: NullVector,
}

impl TranscendentalState {
    pub fn params(&self) -> ModelParams {
        ModelParams::new(self.kappa, self.mu).expect("validated at construction")
    }
}

/// Builds `(ψ₁, ψ₂)` at a root. `ψ₂` follows from the first line of the
/// Schrödinger system, `Nψ₁ + c b²ψ₁ + (2−2χ)ψ₁ + mψ₂ = 0` with
/// `c = (1+κ²)/(1−κ²)`, `m = μκ/(1−κ²)`, i.e. `ψ₂ = −Tψ₁/m` where
/// `T𝒟ₙ = (n+5/2−2χ)𝒟ₙ + c(n²−¼)𝒟ₙ₋₂`.
pub fn build_state(ell: u32, m: &ModelParams, branch: Branch) -> Result<TranscendentalState> {
    build_state_with(ell, m, branch, Precision::Auto)
}

/// [`build_state`] with an explicit arithmetic for the null vector.
pub fn build_state_with(ell: u32, m: &ModelParams, branch: Branch, precision: Precision) -> Result<TranscendentalState> {
    let (kappa, mu) = (m.kappa(), m.mu());
    if mu == 0.0 {
        return Err(Error::InvalidParameter("mu must be positive to solve for psi2".into()));
    }
    let null = null_vector_with(ell, m, DEFAULT_SEED, precision)?;
    let chi: f64 = chi_for_ell(ell);
    let l1 = lowest_index(ell);
    let k2 = kappa * kappa;
    let c = (1.0 + k2) / (1.0 - k2);
    let mm = mu * kappa / (1.0 - k2);

    let a = &null.coefficients;
    let size = ell as usize + 1;
    // t covers indices l₁−2 .. l₁+2ℓ
    let mut t = vec![0.0; size + 1];
    for (j, &aj) in a.iter().enumerate() {
        let n = (l1 + 2 * j as i32) as f64;
        t[j + 1] += aj * (n + 2.5 - 2.0 * chi);
        t[j] += aj * c * (n * n - 0.25);
    }
    // the top term carries n + 5/2 − 2χ = 0 at n = ℓ−1
    debug_assert!(t[size] == 0.0);
    let psi2_coeffs: Vec<f64> = t[..size].iter().map(|v| -v / mm).collect();

    let psi1 = DExpansion { l_start: l1, coefficients: a.clone(), branch, component: Component::Psi1 };
    let psi2 = DExpansion { l_start: l1 - 2, coefficients: psi2_coeffs, branch, component: Component::Psi2 };
    let (parity, parity_mismatch) = coefficient_parity(&psi1, &psi2);
    Ok(TranscendentalState { ell, kappa, mu, chi, energy: m.energy_from_chi(chi), branch, psi1, psi2, parity, parity_mismatch, null })
}

/// Matches `Σ aₙ Kₙ 𝒟₋ₙ₋₂` against `s Σ cₙ 𝒟ₙ` coefficient by coefficient.
fn coefficient_parity(psi1: &DExpansion, psi2: &DExpansion) -> (Parity, f64) {
    let pairs: Vec<(Complex64, f64)> = psi1
        .coefficients
        .iter()
        .enumerate()
        .map(|(j, &a)| {
            let n = psi1.index(j);
            (a * connection_coefficient(DIndex::new(n, psi1.branch)), psi2.coefficient(-n - 2))
        })
        .collect();
    let den: f64 = pairs.iter().map(|(_, c)| c * c).sum();
    let num: Complex64 = pairs.iter().map(|(l, c)| l * c).sum();
    let s = Parity::nearest(num / den);
    let scale = pairs.iter().map(|(l, c)| l.norm().max(c.abs())).fold(0.0, f64::max);
    let dev = pairs.iter().map(|(l, c)| (l - s.value() * c).norm()).fold(0.0, f64::max) / scale;
    (s, dev)
}

/// Polynomials in `z` (ascending powers) with `ψ = A(z)d(z) + B(z)d′(z)`,
/// `d(z) = 𝒟₀^{(d_branch)}(√(2κ)z)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdbRepresentation {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub d_branch: Branch,
    pub kappa: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdbShape {
    pub deg_a: Option<usize>,
    pub deg_b: Option<usize>,
    pub a_parity: Option<i8>,
    pub b_parity: Option<i8>,
}

fn poly_eval(p: &[f64], z: Complex64) -> Complex64 {
    p.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

/// Degree and parity of a polynomial, ignoring coefficients below `tol·max`.
fn shape(p: &[f64], max: f64, tol: f64) -> (Option<usize>, Option<i8>) {
    let live: Vec<usize> = (0..p.len()).filter(|&i| p[i].abs() > tol * max && max > 0.0).collect();
    let deg = live.last().copied();
    let parity = match live.first() {
        None => None,
        Some(&f) if live.iter().all(|&i| i % 2 == f % 2) => Some(if f % 2 == 0 { 1 } else { -1 }),
        Some(_) => Some(0),
    };
    (deg, parity)
}

impl AdbRepresentation {
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        let s = (2.0 * self.kappa).sqrt();
        let d = eval_d(DIndex::new(0, self.d_branch), s * z)?;
        Ok(poly_eval(&self.a, z) * d.value + poly_eval(&self.b, z) * s * d.derivative)
    }

    /// Degrees and parities (`+1` even, `−1` odd, `0` mixed); `None` for a
    /// vanishing polynomial.
    pub fn shape(&self) -> AdbShape {
        let max = self.a.iter().chain(&self.b).fold(0.0f64, |m, c| m.max(c.abs()));
        let (deg_a, a_parity) = shape(&self.a, max, 1e-12);
        let (deg_b, b_parity) = shape(&self.b, max, 1e-12);
        AdbShape { deg_a, deg_b, a_parity, b_parity }
    }

    /// `deg A = ℓ−1`, `A(−z) = (−1)^{ℓ+1}A(z)`, `deg B ≤ ℓ−2`,
    /// `B(−z) = (−1)^ℓ B(z)`.
    pub fn obeys_laws(&self, ell: u32) -> bool {
        let s = self.shape();
        let sign = |k: u32| if k % 2 == 0 { 1 } else { -1 };
        let a_ok = s.deg_a == Some(ell as usize - 1) && s.a_parity == Some(sign(ell + 1));
        let b_ok = match s.deg_b {
            None => true,
            Some(d) => ell >= 2 && d <= ell as usize - 2 && s.b_parity == Some(sign(ell)),
        };
        a_ok && b_ok
    }

    pub fn b_vanishes(&self) -> bool {
        self.shape().deg_b.is_none()
    }
}

/// Polynomial arithmetic in ζ for `F_k = p_k F₀ + q_k F₁`.
fn pmul_zeta(p: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0];
    out.extend_from_slice(p);
    out
}

fn padd(a: &[f64], b: &[f64], fb: f64) -> Vec<f64> {
    let n = a.len().max(b.len());
    (0..n).map(|i| a.get(i).copied().unwrap_or(0.0) + fb * b.get(i).copied().unwrap_or(0.0)).collect()
}

/// Reduces an expansion to `A(z)d(z) + B(z)d′(z)` with the ladder family
/// `F_{k+1} = ζF_k − (k+½)F_{k−1}`, `F₁ = ½ζF₀ − F₀′`.
pub fn reduce_to_adb(e: &DExpansion, kappa: f64) -> AdbRepresentation {
    let lo = e.l_start.min(0);
    let hi = e.index(e.coefficients.len().saturating_sub(1)).max(1);
    let width = (hi - lo + 1) as usize;
    let mut p: Vec<Vec<f64>> = vec![Vec::new(); width];
    let mut q: Vec<Vec<f64>> = vec![Vec::new(); width];
    let at = |k: i32| (k - lo) as usize;
    p[at(0)] = vec![1.0];
    q[at(0)] = vec![0.0];
    p[at(1)] = vec![0.0];
    q[at(1)] = vec![1.0];
    for k in 1..hi {
        let nu = k as f64 + 0.5;
        p[at(k + 1)] = padd(&pmul_zeta(&p[at(k)]), &p[at(k - 1)], -nu);
        q[at(k + 1)] = padd(&pmul_zeta(&q[at(k)]), &q[at(k - 1)], -nu);
    }
    for k in (lo + 1..=0).rev() {
        let nu = k as f64 + 0.5;
        let f = 1.0 / nu;
        p[at(k - 1)] = padd(&pmul_zeta(&p[at(k)]), &p[at(k + 1)], -1.0).iter().map(|v| v * f).collect();
        q[at(k - 1)] = padd(&pmul_zeta(&q[at(k)]), &q[at(k + 1)], -1.0).iter().map(|v| v * f).collect();
    }
    // Σ c(p + ζq/2) F₀ − Σ c q F₀′(ζ), F₀′(ζ) = d′(z)/√(2κ)
    let s = (2.0 * kappa).sqrt();
    let mut a_zeta: Vec<f64> = Vec::new();
    let mut b_zeta: Vec<f64> = Vec::new();
    for (j, &c) in e.coefficients.iter().enumerate() {
        let k = e.index(j);
        let term = padd(&p[at(k)], &pmul_zeta(&q[at(k)]), 0.5);
        a_zeta = padd(&a_zeta, &term, c);
        b_zeta = padd(&b_zeta, &q[at(k)], -c / s);
    }
    let to_z = |v: Vec<f64>| -> Vec<f64> {
        let mut f = 1.0;
        v.into_iter()
            .map(|c| {
                let r = c * f;
                f *= s;
                r
            })
            .collect()
    };
    let tau = if e.l_start.rem_euclid(2) == 0 { e.branch } else { e.branch.flip() };
    AdbRepresentation { a: to_z(a_zeta), b: to_z(b_zeta), d_branch: tau, kappa }
}
