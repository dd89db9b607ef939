//! Juddian states: `ψ = e^{−κz²/2}(P(z), Q(z))` at `χ = n/2`.
//!
//! Substituting into the first-order system gives, with `w = 1/κ − κ` and
//! `D = n − 2 = deg P`,
//! `μQ = −[P″ + w(zP′ − DP)]` and
//! `Q″ − (3κ+1/κ)zQ′ + 2(1+κ²)z²Q + (wD−2κ)Q − μP = 0`.
//! The second line is a square homogeneous system in the coefficients of `P`
//! of the parity of `D`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::roots::scan_roots;
use super::{KappaRoot, ROOT_GRID, ROOT_TOL};
use crate::error::{Error, Result};
use crate::model::{ModelParams, Parity};

/// `e^{az²} Σₖ cₖ zᵏ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussPoly {
    pub a: f64,
    pub coeffs: Vec<Complex64>,
}

impl GaussPoly {
    /// `(e^{az²}R)′ = e^{az²}(R′ + 2azR)`.
    pub fn derivative(&self) -> GaussPoly {
        let n = self.coeffs.len();
        let mut c = vec![Complex64::new(0.0, 0.0); n + 1];
        for (k, &v) in self.coeffs.iter().enumerate() {
            if k > 0 {
                c[k - 1] += k as f64 * v;
            }
            c[k + 1] += 2.0 * self.a * v;
        }
        GaussPoly { a: self.a, coeffs: c }
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let p = self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c);
        (self.a * z * z).exp() * p
    }

    pub fn jet(&self, z: Complex64) -> [Complex64; 5] {
        let mut out = [Complex64::new(0.0, 0.0); 5];
        let mut g = self.clone();
        for o in out.iter_mut() {
            *o = g.eval(z);
            g = g.derivative();
        }
        out
    }

    /// `gₖ = fₖ√(k!)` for `k < terms`, with `e^{az²} = Σ aᵐz^{2m}/m!`.
    pub fn weighted_taylor(&self, terms: usize) -> Vec<Complex64> {
        let mut ln_fact = vec![0.0f64; terms + 1];
        for k in 1..=terms {
            ln_fact[k] = ln_fact[k - 1] + (k as f64).ln();
        }
        let mut out = vec![Complex64::new(0.0, 0.0); terms];
        for (k, o) in out.iter_mut().enumerate() {
            for (j, &c) in self.coeffs.iter().enumerate() {
                if j > k || (k - j) % 2 != 0 || c == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let m = (k - j) / 2;
                let h = if m == 0 {
                    (0.5 * ln_fact[k]).exp()
                } else if self.a == 0.0 {
                    0.0
                } else {
                    let mag = (m as f64 * self.a.abs().ln() - ln_fact[m] + 0.5 * ln_fact[k]).exp();
                    if self.a < 0.0 && m % 2 == 1 {
                        -mag
                    } else {
                        mag
                    }
                };
                *o += c * h;
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JuddState {
    pub n: u32,
    pub kappa: f64,
    pub mu: f64,
    pub chi: f64,
    pub energy: f64,
    pub parity: Parity,
    /// Coefficients of `P` and `Q` (ascending powers).
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    /// `ψ_s = φ + s⁻¹τφ` as sums of Gaussian-polynomial terms.
    pub psi1: Vec<GaussPoly>,
    pub psi2: Vec<GaussPoly>,
}

impl JuddState {
    pub fn params(&self) -> ModelParams {
        ModelParams::new(self.kappa, self.mu).expect("validated at construction")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JuddResult {
    pub n: u32,
    pub mu: f64,
    pub roots: Vec<KappaRoot>,
    pub states: Vec<JuddState>,
    pub note: Option<String>,
}

/// Exponents `j ≡ D (mod 2)`, `0 ≤ j ≤ D`.
fn exponents(d: usize) -> Vec<usize> {
    (d % 2..=d).step_by(2).collect()
}

/// The square system in the unknowns `p_j`, rows `i ≡ D (mod 2)`.
fn system(n: u32, kappa: f64, mu: f64) -> DMatrix<f64> {
    let d = n as usize - 2;
    let js = exponents(d);
    let w = 1.0 / kappa - kappa;
    let col = |j: usize| js.iter().position(|&x| x == j);
    // μq_i as a row vector over the unknowns
    let qt = |i: i64| -> Vec<f64> {
        let mut v = vec![0.0; js.len()];
        if i < 0 || i as usize > d {
            return v;
        }
        let i = i as usize;
        if let Some(c) = col(i + 2) {
            v[c] -= ((i + 2) * (i + 1)) as f64;
        }
        if let Some(c) = col(i) {
            v[c] -= w * (i as f64 - d as f64);
        }
        v
    };
    let mut m = DMatrix::zeros(js.len(), js.len());
    for (r, &i) in js.iter().enumerate() {
        let ii = i as i64;
        let fi = i as f64;
        let rows = [
            (qt(ii + 2), (fi + 2.0) * (fi + 1.0)),
            (qt(ii), w * d as f64 - 2.0 * kappa - (3.0 * kappa + 1.0 / kappa) * fi),
            (qt(ii - 2), 2.0 * (1.0 + kappa * kappa)),
        ];
        for (v, f) in rows {
            for c in 0..js.len() {
                m[(r, c)] += f * v[c];
            }
        }
        m[(r, r)] -= mu * mu;
    }
    m
}

/// Determinant of the closure system divided by the product of row norms.
pub fn judd_determinant(n: u32, kappa: f64, mu: f64) -> f64 {
    let m = system(n, kappa, mu);
    let scale: f64 = m.row_iter().map(|r| r.norm()).product();
    m.determinant() / scale
}

fn poly_at_i(p: &[f64], sinv: Complex64) -> Vec<Complex64> {
    let mut ik = Complex64::new(1.0, 0.0);
    p.iter()
        .map(|&c| {
            let v = sinv * c * ik;
            ik *= Complex64::i();
            v
        })
        .collect()
}

fn real(p: &[f64]) -> Vec<Complex64> {
    p.iter().map(|&c| Complex64::new(c, 0.0)).collect()
}

/// Juddian roots and parity eigenstates at `χ = n/2`.
pub fn judd_states(n: u32, mu: f64) -> Result<JuddResult> {
    if n < 2 {
        return Err(Error::InvalidParameter("n must be at least 2".into()));
    }
    if !(mu.is_finite() && mu > 0.0) {
        return Err(Error::InvalidParameter(format!("mu = {mu} must be positive")));
    }
    let d = n as usize - 2;
    let chi = n as f64 / 2.0;
    let js = exponents(d);
    if n <= 3 {
        return Ok(JuddResult {
            n,
            mu,
            roots: Vec::new(),
            states: Vec::new(),
            note: Some(format!("no Juddian state at chi = {chi}: the closure forces P = 0 for mu > 0")),
        });
    }
    let roots: Vec<KappaRoot> = scan_roots(|k| judd_determinant(n, k, mu), ROOT_GRID, ROOT_TOL)
        .into_iter()
        .map(|(kappa, edge, tangent, _)| KappaRoot { kappa, edge, tangent, exact_confirmed: false })
        .collect();
    let parities = if d % 2 == 0 { [Parity::PlusOne, Parity::MinusOne] } else { [Parity::PlusI, Parity::MinusI] };
    let mut states = Vec::new();
    for r in &roots {
        let kappa = r.kappa;
        let m = system(n, kappa, mu);
        let svd = m.svd(false, true);
        let vt = svd.v_t.expect("requested");
        let k = svd.singular_values.imin();
        let v: Vec<f64> = vt.row(k).iter().copied().collect();
        let top = *v.last().expect("non-empty");
        let mut p = vec![0.0; d + 1];
        for (c, &j) in js.iter().enumerate() {
            p[j] = v[c] / top;
        }
        let w = 1.0 / kappa - kappa;
        let q: Vec<f64> = (0..d.saturating_sub(1).max(1))
            .map(|i| {
                let p2 = p.get(i + 2).copied().unwrap_or(0.0);
                -(((i + 2) * (i + 1)) as f64 * p2 + w * (i as f64 - d as f64) * p[i]) / mu
            })
            .collect();
        let params = ModelParams::new(kappa, mu)?;
        for s in parities {
            let sinv = s.inverse().value();
            let psi1 = vec![GaussPoly { a: -kappa / 2.0, coeffs: real(&p) }, GaussPoly { a: kappa / 2.0, coeffs: poly_at_i(&q, sinv) }];
            let psi2 = vec![GaussPoly { a: -kappa / 2.0, coeffs: real(&q) }, GaussPoly { a: kappa / 2.0, coeffs: poly_at_i(&p, sinv) }];
            states.push(JuddState { n, kappa, mu, chi, energy: params.energy_from_chi(chi), parity: s, p: p.clone(), q: q.clone(), psi1, psi2 });
        }
    }
    let note = if roots.is_empty() { Some(format!("no kappa in (0,1) closes the chi = {chi} system at mu = {mu}")) } else { None };
    Ok(JuddResult { n, mu, roots, states, note })
}
