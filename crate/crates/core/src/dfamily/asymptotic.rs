//! Large-argument expansion of `D_ν(z)` for half-integer `ν`.
//!
//! For `|ph z| ≤ π/2` the recessive expansion
//! `e^{−z²/4} z^ν Σ (−1)^s (−ν)_{2s}/(s!(2z²)^s)` is used alone. Past the
//! Stokes line at `±π/2` the dominant part
//! `± i√(2π)/Γ(−ν) e^{±iπ(ν+½)} e^{z²/4} z^{−ν−1} Σ (ν+1)_{2s}/(s!(2z²)^s)`
//! is added. On the negative real axis `cos πν = 0` removes the recessive
//! part and the dominant one is real.

use num_complex::Complex64;
use std::f64::consts::PI;

use super::gamma::rgamma_quarter;

const MAX_TERMS: usize = 400;

/// Sum of `Σ sgn^s (p)_{2s} / (s! (2z²)^s)` truncated at its smallest term.
/// Returns the sum and the magnitude of the first omitted term.
fn tail_sum(p: f64, alternating: bool, z: Complex64) -> (Complex64, f64) {
    let inv = 1.0 / (2.0 * z * z);
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut last = 1.0;
    for s in 0..MAX_TERMS {
        let sf = s as f64;
        let f = (p + 2.0 * sf) * (p + 2.0 * sf + 1.0) / (sf + 1.0);
        let next = term * inv * if alternating { -f } else { f };
        let size = next.norm();
        if size > last && s > 0 {
            return (sum, last);
        }
        sum += next;
        term = next;
        last = size;
        if size <= 1e-17 * sum.norm() {
            return (sum, size);
        }
    }
    (sum, last)
}

/// `D_{n+½}(z)` and an estimate of its relative truncation error.
pub(crate) fn d_nu(n: i32, z: Complex64) -> (Complex64, f64) {
    let nu = n as f64 + 0.5;
    // √(2π)/Γ(−ν), −ν = (−4n−2)/4
    let c = (2.0 * PI).sqrt() * rgamma_quarter(-4 * n as i64 - 2);
    if z.im == 0.0 && z.re < 0.0 {
        let t = -z.re;
        let tz = Complex64::new(t, 0.0);
        let (s2, e2) = tail_sum(nu + 1.0, false, tz);
        let v = c * t.powf(-nu - 1.0) * (t * t / 4.0).exp() * s2;
        return (v, e2);
    }
    let (s1, e1) = tail_sum(-nu, true, z);
    let rec = (-z * z / 4.0).exp() * (nu * z.ln()).exp() * s1;
    let ph = z.arg();
    if ph.abs() <= PI / 2.0 {
        return (rec, e1);
    }
    let sign = ph.signum();
    let (s2, e2) = tail_sum(nu + 1.0, false, z);
    let phase = Complex64::from_polar(1.0, sign * PI * (nu + 0.5));
    let dom = Complex64::new(0.0, sign) * c * phase * (z * z / 4.0).exp() * ((-nu - 1.0) * z.ln()).exp() * s2;
    let v = rec + dom;
    let err = (e1 * rec.norm() + e2 * dom.norm()) / v.norm().max(f64::MIN_POSITIVE);
    (v, err)
}

/// `D_{n+½}(z)` and `D′_{n+½}(z) = ν D_{ν−1}(z) − (z/2) D_ν(z)`.
pub(crate) fn d_nu_with_derivative(n: i32, z: Complex64) -> (Complex64, Complex64, f64) {
    let nu = n as f64 + 0.5;
    let (v, e) = d_nu(n, z);
    let (vm, em) = d_nu(n - 1, z);
    (v, nu * vm - 0.5 * z * v, e.max(em))
}
