//! Symmetric tridiagonal eigenvalues.
//!
//! The smallest `k` eigenvalues are bracketed by Sturm-sequence bisection,
//! which gives certified enclosures (the count of negative LDLᵀ pivots equals
//! the number of eigenvalues below the shift). Implicit QL is kept as a
//! full-spectrum fallback and as an independent check in tests.

use crate::error::{Error, Result};

/// Bisection steps are capped well above what a 64-bit interval needs.
const MAX_BISECTIONS: usize = 200;

#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiag {
    pub diag: Vec<f64>,
    pub offdiag: Vec<f64>,
}

impl SymTridiag {
    pub fn new(diag: Vec<f64>, offdiag: Vec<f64>) -> Result<Self> {
        if diag.is_empty() || offdiag.len() + 1 != diag.len() {
            return Err(Error::InvalidParameter(format!(
                "tridiagonal shape mismatch: {} diagonal vs {} off-diagonal entries",
                diag.len(),
                offdiag.len()
            )));
        }
        if diag.iter().chain(offdiag.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("non-finite matrix entry".into()));
        }
        Ok(Self { diag, offdiag })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Gershgorin enclosure of the spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.dim();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let left = if i > 0 { self.offdiag[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { self.offdiag[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - left - right);
            hi = hi.max(self.diag[i] + left + right);
        }
        (lo, hi)
    }

    pub fn norm_bound(&self) -> f64 {
        let (lo, hi) = self.gershgorin();
        lo.abs().max(hi.abs())
    }

    /// Number of eigenvalues strictly below `shift`.
    pub fn sturm_count(&self, shift: f64) -> usize {
        let guard = f64::MIN_POSITIVE.sqrt() * self.norm_bound().max(1.0);
        let mut count = 0;
        let mut q = self.diag[0] - shift;
        if q < 0.0 {
            count += 1;
        }
        for i in 1..self.dim() {
            let prev = if q.abs() < guard { guard.copysign(q) } else { q };
            let e = self.offdiag[i - 1];
            q = (self.diag[i] - shift) - e * e / prev;
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// The `index`-th smallest eigenvalue (0-based) by bisection.
    pub fn eigenvalue(&self, index: usize) -> Result<f64> {
        if index >= self.dim() {
            return Err(Error::InvalidParameter(format!(
                "eigenvalue index {index} out of range for dimension {}",
                self.dim()
            )));
        }
        let (lo, hi) = self.gershgorin();
        let pad = 1e-12 * (hi - lo).abs().max(1.0);
        self.bisect(index, lo - pad, hi + pad)
    }

    fn bisect(&self, index: usize, mut lo: f64, mut hi: f64) -> Result<f64> {
        let tol = 2.0 * f64::EPSILON * self.norm_bound().max(1.0);
        for _ in 0..MAX_BISECTIONS {
            let mid = 0.5 * (lo + hi);
            if hi - lo <= tol || mid <= lo || mid >= hi {
                return Ok(mid);
            }
            if self.sturm_count(mid) > index {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Err(Error::NoConvergence { index, iterations: MAX_BISECTIONS })
    }

    /// The `k` smallest eigenvalues in ascending order.
    pub fn smallest(&self, k: usize) -> Result<Vec<f64>> {
        if k > self.dim() {
            return Err(Error::InvalidParameter(format!(
                "requested {k} eigenvalues of a {}-dimensional matrix",
                self.dim()
            )));
        }
        let (lo, hi) = self.gershgorin();
        let pad = 1e-12 * (hi - lo).abs().max(1.0);
        let tol = 4.0 * f64::EPSILON * self.norm_bound().max(1.0);
        let mut out: Vec<f64> = Vec::with_capacity(k);
        for index in 0..k {
            // eigenvalue `index` is bounded below by its predecessor
            let lower = out.last().map_or(lo - pad, |&prev| (prev - tol).max(lo - pad));
            out.push(self.bisect(index, lower, hi + pad)?);
        }
        Ok(out)
    }

    /// Number of eigenvalues in the half-open window `[a, b)`.
    pub fn count_in(&self, a: f64, b: f64) -> usize {
        self.sturm_count(b).saturating_sub(self.sturm_count(a))
    }

    /// All eigenvalues by the implicit QL algorithm with Wilkinson shifts.
    pub fn eigenvalues_ql(&self) -> Result<Vec<f64>> {
        let n = self.dim();
        let mut d = self.diag.clone();
        let mut e: Vec<f64> = self.offdiag.iter().copied().chain(std::iter::once(0.0)).collect();
        for l in 0..n {
            let mut iter = 0;
            loop {
                let mut m = l;
                while m + 1 < n {
                    let dd = d[m].abs() + d[m + 1].abs();
                    if e[m].abs() <= f64::EPSILON * dd {
                        break;
                    }
                    m += 1;
                }
                if m == l {
                    break;
                }
                iter += 1;
                if iter > 60 {
                    return Err(Error::NoConvergence { index: l, iterations: iter });
                }
                let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                let mut r = g.hypot(1.0);
                g = d[m] - d[l] + e[l] / (g + r.copysign(g));
                let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
                let mut i = m;
                let mut underflow = false;
                while i > l {
                    i -= 1;
                    let f = s * e[i];
                    let b = c * e[i];
                    r = f.hypot(g);
                    e[i + 1] = r;
                    if r == 0.0 {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        underflow = true;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                }
                if underflow {
                    continue;
                }
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        }
        d.sort_by(f64::total_cmp);
        Ok(d)
    }
}
