//! κ-roots of the determinant on (0,1).

use num_rational::BigRational;
use num_traits::Signed;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{determinant_exact, normalized_determinant};
use crate::error::{Error, Result};

/// Number of grid intervals on (0,1).
pub const ROOT_GRID: usize = 2000;
pub const ROOT_TOL: f64 = 1e-12;
/// Grid minima of `|det|/scale` below this are probed for tangencies.
const TANGENCY_PROBE: f64 = 1e-6;
const TANGENCY_ACCEPT: f64 = 1e-14;
const EDGE_GAP: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KappaRoot {
    pub kappa: f64,
    /// Root lies in the outermost grid cell next to 0 or 1.
    pub edge: bool,
    /// Even-multiplicity root found by minimisation, not by a sign change.
    pub tangent: bool,
    /// The bracketing signs were confirmed in exact rational arithmetic.
    pub exact_confirmed: bool,
}

fn exact_sign(ell: u32, kappa: f64, mu: f64) -> i8 {
    let k = BigRational::from_float(kappa).expect("finite");
    let m = BigRational::from_float(mu).expect("finite");
    let d = determinant_exact(ell, &k, &m);
    if d.is_positive() {
        1
    } else if d.is_negative() {
        -1
    } else {
        0
    }
}

/// Bisection on the sign of `f` over `[lo, hi]` with `f(lo)f(hi) < 0`.
pub(crate) fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut flo = f(lo);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Golden-section minimum of `|f|` on `[lo, hi]`.
fn minimise_abs(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - g * (hi - lo);
    let mut b = lo + g * (hi - lo);
    let (mut fa, mut fb) = (f(a).abs(), f(b).abs());
    while hi - lo > tol {
        if fa < fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - g * (hi - lo);
            fa = f(a).abs();
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + g * (hi - lo);
            fb = f(b).abs();
        }
    }
    if fa < fb {
        (a, fa)
    } else {
        (b, fb)
    }
}

/// Sign-change roots on a grid, refined by bisection, plus tangencies probed
/// at small local minima. `f` must be a normalised function of κ.
pub(crate) fn scan_roots(f: impl Fn(f64) -> f64 + Sync, grid_cells: usize, tol: f64) -> Vec<(f64, bool, bool, (f64, f64))> {
    let mut pts: Vec<f64> = vec![EDGE_GAP];
    pts.extend((1..grid_cells).map(|j| j as f64 / grid_cells as f64));
    pts.push(1.0 - EDGE_GAP);
    let vals: Vec<f64> = pts.par_iter().map(|&k| f(k)).collect();
    let last = pts.len() - 2;
    let mut out = Vec::new();
    for j in 0..pts.len() - 1 {
        let (a, b) = (vals[j], vals[j + 1]);
        let edge = j == 0 || j == last;
        if a == 0.0 {
            out.push((pts[j], edge, false, (pts[j], pts[j])));
        } else if b != 0.0 && (a > 0.0) != (b > 0.0) {
            out.push((bisect(&f, pts[j], pts[j + 1], tol), edge, false, (pts[j], pts[j + 1])));
        }
    }
    for j in 1..pts.len() - 1 {
        let (a, b, c) = (vals[j - 1].abs(), vals[j].abs(), vals[j + 1].abs());
        let same = (vals[j - 1] > 0.0) == (vals[j] > 0.0) && (vals[j] > 0.0) == (vals[j + 1] > 0.0);
        if same && b < a && b < c && b < TANGENCY_PROBE {
            let (k, v) = minimise_abs(&f, pts[j - 1], pts[j + 1], tol);
            if v < TANGENCY_ACCEPT {
                out.push((k, j == 1 || j == last, true, (pts[j - 1], pts[j + 1])));
            }
        }
    }
    out
}

/// All roots of `determinant(ℓ, μ, ·)` on (0,1).
pub fn find_kappa_roots(ell: u32, mu: f64) -> Result<Vec<KappaRoot>> {
    if ell == 0 {
        return Err(Error::InvalidParameter("ell must be at least 1".into()));
    }
    if !(mu.is_finite() && mu >= 0.0) {
        return Err(Error::InvalidParameter(format!("mu = {mu} must be finite and >= 0")));
    }
    let f = |k: f64| normalized_determinant(ell, k, mu);
    let mut roots: Vec<KappaRoot> = scan_roots(f, ROOT_GRID, ROOT_TOL)
        .into_iter()
        .map(|(kappa, edge, tangent, (lo, hi))| {
            let exact_confirmed = if tangent || lo == hi {
                exact_sign(ell, kappa, mu) == 0
            } else {
                exact_sign(ell, lo, mu) * exact_sign(ell, hi, mu) < 0
            };
            KappaRoot { kappa, edge, tangent, exact_confirmed }
        })
        .collect();
    roots.sort_by(|a, b| a.kappa.total_cmp(&b.kappa));
    roots.dedup_by(|b, a| (a.kappa - b.kappa).abs() < 1e-10);
    Ok(roots)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_member_root() {
        let r = find_kappa_roots(1, 3.0).unwrap();
        assert_eq!(r.len(), 1);
        assert!((r[0].kappa - (3.0 - 2.0 * 2f64.sqrt())).abs() < 1e-12);
        assert!(r[0].exact_confirmed && !r[0].edge && !r[0].tangent);
    }

    #[test]
    fn weak_coupling_has_no_first_member_root() {
        // κ² − 2μκ + 1 > 0 on (0,1) for μ ≤ 1
        assert!(find_kappa_roots(1, 0.9).unwrap().is_empty());
    }

    #[test]
    fn zero_coupling_runs() {
        // P_ℓ(0,κ)² only; no sign changes expected for ℓ = 1, 2
        for ell in 1..=2 {
            assert!(find_kappa_roots(ell, 0.0).unwrap().iter().all(|r| r.tangent || r.exact_confirmed));
        }
    }

    #[test]
    fn tangency_is_found_by_minimisation() {
        let f = |k: f64| (k - 0.30013).powi(2);
        let r = scan_roots(f, 2000, 1e-12);
        assert_eq!(r.len(), 1);
        assert!(r[0].2 && (r[0].0 - 0.30013).abs() < 1e-6);
    }

    #[test]
    fn edge_roots_are_flagged() {
        let r = scan_roots(|k| k - 1e-4, 2000, 1e-14);
        assert_eq!(r.len(), 1);
        assert!(r[0].1);
    }
}
