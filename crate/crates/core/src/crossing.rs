//! Level-crossing detection between curves of different parity sectors.
//!
//! Sectors are Jacobi matrices, so levels inside a sector never cross and the
//! `i`-th sorted eigenvalue is a continuous curve in κ. A crossing is a sign
//! change of `E_i^{(r)}(κ) − E_j^{(s)}(κ)` for `r ≠ s`. Grid intervals are
//! bracketed, near-misses are subdivided, and every bracket is refined by
//! bisection in κ with fresh eigen-solves.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{level_energy, SpectrumTable};
use crate::model::{ModelParams, Parity};

pub const DEFAULT_REFINE_TOL: f64 = 1e-10;
/// Classification slack around the `m/4` lattice.
pub const LATTICE_TOL: f64 = 1e-4;
/// Points inserted into a grid cell where two curves nearly touch.
const SUBDIVISIONS: usize = 16;
const MAX_BISECTIONS: usize = 200;
/// Largest relative gap accepted as a tangential contact.
const TOUCH_GAP: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    /// `χ = n/2`, polynomial times Gaussian.
    Juddian { n: u32 },
    /// `χ = (2ℓ+3)/4`.
    Transcendental { ell: u32 },
    Unclassified,
}

impl Family {
    pub fn label(&self) -> &'static str {
        match self {
            Family::Juddian { .. } => "juddian",
            Family::Transcendental { .. } => "transcendental",
            Family::Unclassified => "unclassified",
        }
    }

    pub fn index(&self) -> Option<u32> {
        match *self {
            Family::Juddian { n } => Some(n),
            Family::Transcendental { ell } => Some(ell),
            Family::Unclassified => None,
        }
    }
}

/// Nearest point of the `m/4` lattice and the family it belongs to.
pub fn classify_chi(chi: f64) -> Family {
    let m = (4.0 * chi).round();
    if !((chi - m / 4.0).abs() < LATTICE_TOL) || m < 0.0 {
        return Family::Unclassified;
    }
    let m = m as u32;
    if m % 2 == 0 {
        if m == 0 {
            Family::Unclassified
        } else {
            Family::Juddian { n: m / 2 }
        }
    } else if m >= 3 {
        Family::Transcendental { ell: (m - 3) / 2 }
    } else {
        Family::Unclassified
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossingRecord {
    pub kappa_star: f64,
    pub e_star: f64,
    pub chi_star: f64,
    /// The two sectors, in [`Parity::ALL`] order.
    pub parity_pair: (Parity, Parity),
    /// Level indices within each sector.
    pub levels: (usize, usize),
    pub family: Family,
    /// Final width of the κ bracket.
    pub bracket_width: f64,
    /// Energy gap between the two curves at `kappa_star`.
    pub gap: f64,
    pub diagnostics: Option<String>,
}

impl CrossingRecord {
    pub fn involves(&self, s: Parity) -> bool {
        self.parity_pair.0 == s || self.parity_pair.1 == s
    }

    /// Juddian crossings pair `{+1,−1}` or `{+i,−i}`; transcendental ones
    /// pair an even sector with an odd one.
    pub fn parity_pair_consistent(&self) -> bool {
        let (r, s) = self.parity_pair;
        match self.family {
            Family::Juddian { .. } => s == r * Parity::MinusOne,
            Family::Transcendental { .. } => r.is_even() != s.is_even(),
            Family::Unclassified => false,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Bracket {
    r: usize,
    s: usize,
    i: usize,
    j: usize,
    lo: f64,
    hi: f64,
    /// No sign change at the ends; the interval is resampled first.
    near_miss: bool,
    /// The curves touch without crossing; refined by minimising `|f|`.
    touch: bool,
}

pub fn find_crossings(t: &SpectrumTable, refine_tol: f64) -> Result<Vec<CrossingRecord>> {
    if t.points.len() < 2 {
        return Err(Error::InvalidParameter("crossing search needs at least two grid points".into()));
    }
    if !(refine_tol > 0.0) {
        return Err(Error::InvalidParameter(format!("refine_tol = {refine_tol} must be positive")));
    }
    let usable: Vec<_> = t.points.iter().filter(|p| p.status.is_usable()).collect();
    let mut brackets = Vec::new();
    for r in 0..4 {
        for s in r + 1..4 {
            for i in 0..t.levels {
                for j in 0..t.levels {
                    let diff: Vec<(f64, f64)> = usable
                        .iter()
                        .map(|p| (p.kappa, p.sectors[r].energy[i] - p.sectors[s].energy[j]))
                        .collect();
                    collect_brackets(&diff, (r, s, i, j), &mut brackets);
                }
            }
        }
    }
    let mut records: Vec<CrossingRecord> = brackets
        .par_iter()
        .flat_map_iter(|b| {
            subdivide(t, b)
                .into_iter()
                .map(|b| refine(t, &b, refine_tol))
                .collect::<Vec<_>>()
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    records.sort_by(|a, b| {
        a.kappa_star
            .total_cmp(&b.kappa_star)
            .then(a.parity_pair.0.exponent().cmp(&b.parity_pair.0.exponent()))
            .then(a.parity_pair.1.exponent().cmp(&b.parity_pair.1.exponent()))
    });
    records.dedup_by(|a, b| {
        a.parity_pair == b.parity_pair && a.levels == b.levels && (a.kappa_star - b.kappa_star).abs() <= 4.0 * refine_tol
    });
    Ok(records)
}

/// Sign changes become brackets. An interior local minimum of `|f|` without a
/// sign change marks a cell pair that may hide two crossings; it is passed on
/// as a wide bracket for subdivision.
fn collect_brackets(diff: &[(f64, f64)], (r, s, i, j): (usize, usize, usize, usize), out: &mut Vec<Bracket>) {
    let n = diff.len();
    for w in 0..n.saturating_sub(1) {
        let (k0, f0) = diff[w];
        let (k1, f1) = diff[w + 1];
        if f0 == 0.0 || f0.signum() != f1.signum() {
            out.push(Bracket { r, s, i, j, lo: k0, hi: k1, near_miss: false, touch: false });
        }
    }
    for w in 1..n.saturating_sub(1) {
        let (ka, fa) = diff[w - 1];
        let (_, fm) = diff[w];
        let (kb, fb) = diff[w + 1];
        let same_sign = fa.signum() == fm.signum() && fm.signum() == fb.signum();
        let local_min = fm.abs() < fa.abs() && fm.abs() < fb.abs();
        // a parabola through the three points must dip below zero
        let slope = (fa.abs() - fm.abs()).max(fb.abs() - fm.abs());
        if same_sign && local_min && fm.abs() < 2.0 * slope {
            out.push(Bracket { r, s, i, j, lo: ka, hi: kb, near_miss: true, touch: false });
        }
    }
}

fn pair_difference(t: &SpectrumTable, b: &Bracket, kappa: f64) -> Result<(f64, f64, f64)> {
    let m = ModelParams::new(kappa, t.mu)?;
    let er = level_energy(&m, Parity::ALL[b.r], t.truncation, b.i)?;
    let es = level_energy(&m, Parity::ALL[b.s], t.truncation, b.j)?;
    Ok((er - es, er, es))
}

/// Near-miss brackets are resampled; any sign changes found become ordinary
/// brackets. Without one, the cell around the smallest sample is kept as a
/// candidate tangency.
fn subdivide(t: &SpectrumTable, b: &Bracket) -> Vec<Bracket> {
    if !b.near_miss {
        return vec![*b];
    }
    let (lo, hi) = (b.lo, b.hi);
    let samples: Vec<(f64, f64)> = (0..=SUBDIVISIONS)
        .filter_map(|k| {
            let kappa = lo + (hi - lo) * k as f64 / SUBDIVISIONS as f64;
            pair_difference(t, b, kappa).ok().map(|(f, _, _)| (kappa, f))
        })
        .collect();
    let crossings: Vec<Bracket> = samples
        .windows(2)
        .filter(|w| w[0].1 == 0.0 || w[0].1.signum() != w[1].1.signum())
        .map(|w| Bracket { lo: w[0].0, hi: w[1].0, near_miss: false, ..*b })
        .collect();
    if !crossings.is_empty() || samples.len() < 3 {
        return crossings;
    }
    let k = (1..samples.len() - 1).min_by(|&a, &c| samples[a].1.abs().total_cmp(&samples[c].1.abs())).expect("interior samples");
    vec![Bracket { lo: samples[k - 1].0, hi: samples[k + 1].0, near_miss: false, touch: true, ..*b }]
}

/// Golden-section minimum of `|f|` on the bracket.
fn minimise_gap(t: &SpectrumTable, b: &Bracket, refine_tol: f64) -> Result<(f64, f64)> {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut lo, mut hi) = (b.lo, b.hi);
    let gap = |k: f64| pair_difference(t, b, k).map(|(f, _, _)| f.abs());
    let (mut x1, mut x2) = (hi - g * (hi - lo), lo + g * (hi - lo));
    let (mut f1, mut f2) = (gap(x1)?, gap(x2)?);
    for _ in 0..MAX_BISECTIONS {
        if hi - lo <= refine_tol {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = gap(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = gap(x2)?;
        }
    }
    Ok(if f1 <= f2 { (x1, hi - lo) } else { (x2, hi - lo) })
}

fn refine(t: &SpectrumTable, b: &Bracket, refine_tol: f64) -> Result<Option<CrossingRecord>> {
    let (mut lo, mut hi) = (b.lo, b.hi);
    let (mut f_lo, _, _) = pair_difference(t, b, lo)?;
    let (f_hi, _, _) = pair_difference(t, b, hi)?;
    let mut diagnostics = None;
    if b.touch {
        let (k, width) = minimise_gap(t, b, refine_tol)?;
        lo = k;
        hi = k + width;
        f_lo = 0.0;
    } else if f_lo != 0.0 && f_lo.signum() == f_hi.signum() {
        diagnostics = Some(format!("bracket endpoints share sign: {f_lo:e}, {f_hi:e}"));
    } else {
        for _ in 0..MAX_BISECTIONS {
            if hi - lo <= refine_tol || f_lo == 0.0 {
                break;
            }
            let mid = 0.5 * (lo + hi);
            let (f_mid, _, _) = pair_difference(t, b, mid)?;
            if f_mid == 0.0 {
                lo = mid;
                hi = mid;
                break;
            }
            if f_mid.signum() == f_lo.signum() {
                lo = mid;
                f_lo = f_mid;
            } else {
                hi = mid;
            }
        }
    }
    let kappa_star = if f_lo == 0.0 { lo } else { 0.5 * (lo + hi) };
    let bracket_width = hi - lo;
    let (gap, er, es) = pair_difference(t, b, kappa_star)?;
    let e_star = 0.5 * (er + es);
    let m = ModelParams::new(kappa_star, t.mu)?;
    let chi_star = m.chi_from_energy(e_star);
    // a genuine crossing closes the gap at the rate set by the curve slopes
    let scale = e_star.abs().max(1.0);
    if diagnostics.is_none() && b.touch && gap.abs() > TOUCH_GAP * scale {
        return Ok(None);
    }
    if diagnostics.is_none() && gap.abs() > 1e-6 * scale {
        diagnostics = Some(format!("gap {gap:e} did not close; curve data discontinuous"));
    }
    let family = if diagnostics.is_some() { Family::Unclassified } else { classify_chi(chi_star) };
    Ok(Some(CrossingRecord {
        kappa_star,
        e_star,
        chi_star,
        parity_pair: (Parity::ALL[b.r], Parity::ALL[b.s]),
        levels: (b.i, b.j),
        family,
        bracket_width,
        gap,
        diagnostics,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{kappa_grid, scan_spectrum};

    #[test]
    fn lattice_classification() {
        assert_eq!(classify_chi(1.25), Family::Transcendental { ell: 1 });
        assert_eq!(classify_chi(0.75), Family::Transcendental { ell: 0 });
        assert_eq!(classify_chi(1.75 + 5e-5), Family::Transcendental { ell: 2 });
        assert_eq!(classify_chi(2.0), Family::Juddian { n: 4 });
        assert_eq!(classify_chi(1.3), Family::Unclassified);
        assert_eq!(classify_chi(0.25), Family::Unclassified);
    }

    #[test]
    fn needs_two_points() {
        let t = scan_spectrum(3.0, &[0.5], 4, 60).unwrap();
        assert!(find_crossings(&t, 1e-10).is_err());
    }

    #[test]
    fn first_transcendental_crossing_at_mu_three() {
        let kstar = 3.0 - 2.0 * 2f64.sqrt();
        let grid = kappa_grid(0.12, 0.22, 21).unwrap();
        let t = scan_spectrum(3.0, &grid, 4, 160).unwrap();
        let recs = find_crossings(&t, 1e-12).unwrap();
        let hit = recs
            .iter()
            .find(|r| (r.kappa_star - kstar).abs() < 1e-6)
            .expect("crossing at 3 - 2√2");
        assert!((hit.e_star - (4.0 * 2f64.sqrt() - 3.0)).abs() < 1e-6);
        assert_eq!(hit.family, Family::Transcendental { ell: 1 });
        assert!(hit.parity_pair_consistent());
    }

    #[test]
    fn tangential_contact_is_found() {
        // the second-member condition has a double root at √5 − 2 when μ = 3
        let kstar = 5f64.sqrt() - 2.0;
        let grid = kappa_grid(0.2, 0.28, 17).unwrap();
        let t = scan_spectrum(3.0, &grid, 6, 160).unwrap();
        let recs = find_crossings(&t, 1e-12).unwrap();
        let hit = recs.iter().find(|r| (r.kappa_star - kstar).abs() < 1e-6).expect("contact at √5 − 2");
        assert_eq!(hit.family, Family::Transcendental { ell: 2 });
        assert!(hit.parity_pair_consistent());
    }

    #[test]
    fn near_miss_cells_are_resampled() {
        // f = (κ − 0.41)(κ − 0.43) sampled at 0.3, 0.42, 0.5: no sign change
        let diff = [(0.3, 0.011), (0.42, -0.0001), (0.5, 0.0063)];
        let mut out = Vec::new();
        collect_brackets(&diff, (0, 1, 0, 0), &mut out);
        assert_eq!(out.len(), 2);
        let pos = [(0.3, 0.01), (0.42, 0.0001), (0.5, 0.006)];
        let mut out = Vec::new();
        collect_brackets(&pos, (0, 1, 0, 0), &mut out);
        assert_eq!(out.len(), 1);
        assert!(out[0].near_miss);
    }
}
