//! The four subcommands. Each returns the rendered output and an exit code.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use twophoton::crossing::{find_crossings, CrossingRecord};
use twophoton::dfamily::Branch;
use twophoton::fock::{kappa_grid, scan_spectrum_with, PointStatus, ScanOptions, SpectrumTable};
use twophoton::states::{build_state_with, find_kappa_roots, judd_states, reduce_to_adb, AdbRepresentation, AdbShape, JuddState, KappaRoot, TranscendentalState};
use twophoton::verify::{verify_state, Spinor, Summary, Tolerances};
use twophoton::{ModelParams, Parity};

use crate::config::{config_hash, FamilyArg, Format, PrecisionArg, ScanArgs, StateArgs, VerifyArgs};
use crate::format::{float, to_json};

pub const SCHEMA_VERSION: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARTIAL: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;
pub const EXIT_CONFIG: i32 = 4;

pub struct Outcome {
    pub body: String,
    pub code: i32,
    /// Human-readable lines for stderr.
    pub messages: Vec<String>,
}

#[derive(Debug)]
pub enum Failure {
    Config(String),
    Runtime(String),
}

impl From<twophoton::Error> for Failure {
    fn from(e: twophoton::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

fn scan(cfg: &ScanArgs) -> Result<SpectrumTable, Failure> {
    cfg.validate().map_err(|e| Failure::Config(e.0))?;
    let grid = kappa_grid(cfg.kappa_min, cfg.kappa_max, cfg.kappa_points).map_err(|e| Failure::Config(e.to_string()))?;
    let opts = ScanOptions { levels: cfg.levels, truncation: cfg.truncation, ..ScanOptions::default() };
    Ok(scan_spectrum_with(cfg.mu, &grid, &opts)?)
}

fn scan_code(t: &SpectrumTable) -> (i32, Vec<String>) {
    let failed = t.failed_points();
    if failed > 0 {
        (EXIT_PARTIAL, vec![format!("{failed} of {} grid points failed", t.points.len())])
    } else {
        (EXIT_OK, Vec::new())
    }
}

#[derive(Serialize)]
struct SpectrumRow {
    kappa: f64,
    sector: &'static str,
    level_index: usize,
    #[serde(rename = "E")]
    e: Option<f64>,
    chi: Option<f64>,
    status: &'static str,
}

#[derive(Serialize)]
struct SpectrumJson<'a> {
    schema_version: u32,
    config_hash: String,
    mu: f64,
    truncation: usize,
    levels: usize,
    rows: &'a [SpectrumRow],
}

/// Rows ordered by κ, then sector (+1, −1, +i, −i), then level.
fn spectrum_rows(t: &SpectrumTable) -> Vec<SpectrumRow> {
    let mut rows = Vec::with_capacity(t.points.len() * 4 * t.levels);
    for p in &t.points {
        for s in Parity::ALL {
            let levels = p.sector(s);
            for k in 0..t.levels {
                rows.push(SpectrumRow {
                    kappa: p.kappa,
                    sector: s.label(),
                    level_index: k,
                    e: levels.and_then(|l| l.energy.get(k).copied()),
                    chi: levels.and_then(|l| l.chi.get(k).copied()),
                    status: p.status.label(),
                });
            }
        }
    }
    rows
}

pub fn spectrum(cfg: &ScanArgs) -> Result<Outcome, Failure> {
    let t = scan(cfg)?;
    let hash = config_hash("spectrum", cfg);
    let rows = spectrum_rows(&t);
    let body = match cfg.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut s = format!("# config-hash {hash}\nkappa,sector,level_index,E,chi,status\n");
            for r in &rows {
                let opt = |v: Option<f64>| v.map(float).unwrap_or_default();
                writeln!(s, "{},{},{},{},{},{}", float(r.kappa), r.sector, r.level_index, opt(r.e), opt(r.chi), r.status).expect("string write");
            }
            s
        }
        Format::Json => to_json(&SpectrumJson { schema_version: SCHEMA_VERSION, config_hash: hash, mu: t.mu, truncation: t.truncation, levels: t.levels, rows: &rows })?,
    };
    let (code, mut messages) = scan_code(&t);
    let unconverged = t.points.iter().filter(|p| matches!(p.status, PointStatus::Unconverged { .. })).count();
    if unconverged > 0 {
        messages.push(format!("{unconverged} grid points did not pass the truncation check"));
    }
    Ok(Outcome { body, code, messages })
}

#[derive(Serialize)]
struct CrossingJson {
    kappa_star: f64,
    #[serde(rename = "E_star")]
    e_star: f64,
    chi_star: f64,
    parity_pair: [&'static str; 2],
    levels: [usize; 2],
    family: &'static str,
    index: Option<u32>,
    refinement_tol: f64,
    bracket_width: f64,
    gap: f64,
    diagnostics: Option<String>,
}

#[derive(Serialize)]
struct CrossingsFile {
    schema_version: u32,
    config_hash: String,
    mu: f64,
    truncation: usize,
    crossings: Vec<CrossingJson>,
}

fn crossing_json(c: &CrossingRecord, tol: f64) -> CrossingJson {
    CrossingJson {
        kappa_star: c.kappa_star,
        e_star: c.e_star,
        chi_star: c.chi_star,
        parity_pair: [c.parity_pair.0.label(), c.parity_pair.1.label()],
        levels: [c.levels.0, c.levels.1],
        family: c.family.label(),
        index: c.family.index(),
        refinement_tol: tol,
        bracket_width: c.bracket_width,
        gap: c.gap,
        diagnostics: c.diagnostics.clone(),
    }
}

pub fn crossings(cfg: &ScanArgs) -> Result<Outcome, Failure> {
    let t = scan(cfg)?;
    let hash = config_hash("crossings", cfg);
    let records: Vec<CrossingJson> = if t.points.len() < 2 {
        Vec::new()
    } else {
        find_crossings(&t, cfg.tol)?.iter().map(|c| crossing_json(c, cfg.tol)).collect()
    };
    let body = match cfg.format.unwrap_or(Format::Json) {
        Format::Json => to_json(&CrossingsFile { schema_version: SCHEMA_VERSION, config_hash: hash, mu: t.mu, truncation: t.truncation, crossings: records })?,
        Format::Csv => {
            let mut s = format!("# config-hash {hash}\nkappa_star,E_star,chi_star,sector_a,sector_b,level_a,level_b,family,index\n");
            for r in &records {
                let index = r.index.map(|i| i.to_string()).unwrap_or_default();
                writeln!(
                    s,
                    "{},{},{},{},{},{},{},{},{}",
                    float(r.kappa_star),
                    float(r.e_star),
                    float(r.chi_star),
                    r.parity_pair[0],
                    r.parity_pair[1],
                    r.levels[0],
                    r.levels[1],
                    r.family,
                    index
                )
                .expect("string write");
            }
            s
        }
    };
    let (code, messages) = scan_code(&t);
    Ok(Outcome { body, code, messages })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum ExactState {
    Transcendental(TranscendentalState),
    Juddian(JuddState),
}

impl ExactState {
    fn spinor(&self) -> &dyn Spinor {
        match self {
            ExactState::Transcendental(s) => s,
            ExactState::Juddian(s) => s,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reduction {
    pub psi1: AdbRepresentation,
    pub psi2: AdbRepresentation,
    pub psi1_shape: AdbShape,
    pub degree_laws: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateRecord {
    pub state: ExactState,
    pub reduction: Option<Reduction>,
    pub verification: Summary,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactStateFile {
    pub schema_version: u32,
    pub config_hash: String,
    pub family: FamilyName,
    pub index: u32,
    pub mu: f64,
    pub precision: String,
    pub tolerances: Tolerances,
    pub roots: Vec<KappaRoot>,
    pub states: Vec<StateRecord>,
    pub errors: Vec<String>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyName {
    Transcendental,
    Juddian,
}

fn record(state: ExactState, tol: &Tolerances) -> Result<StateRecord, Failure> {
    let verification = verify_state(state.spinor(), tol)?;
    let reduction = match &state {
        ExactState::Transcendental(s) => {
            let psi1 = reduce_to_adb(&s.psi1, s.kappa);
            Some(Reduction { psi1_shape: psi1.shape(), degree_laws: psi1.obeys_laws(s.ell), psi2: reduce_to_adb(&s.psi2, s.kappa), psi1 })
        }
        ExactState::Juddian(_) => None,
    };
    let passed = verification.passed();
    Ok(StateRecord { state, reduction, verification, passed })
}

pub fn exact_state(cfg: &StateArgs) -> Result<Outcome, Failure> {
    let index = cfg.validate().map_err(|e| Failure::Config(e.0))?;
    let tol = Tolerances { residual: cfg.tol, ..Tolerances::default() };
    let mut errors = Vec::new();
    let (family, roots, states, mut note) = match cfg.family {
        FamilyArg::Transcendental => {
            let roots = find_kappa_roots(index, cfg.mu)?;
            let mut states = Vec::new();
            for r in &roots {
                let m = ModelParams::new(r.kappa, cfg.mu)?;
                for b in [Branch::Plus, Branch::Minus] {
                    match build_state_with(index, &m, b, cfg.precision.into()) {
                        Ok(s) => states.push(ExactState::Transcendental(s)),
                        Err(e) => errors.push(format!("kappa = {}, branch {}: {e}", r.kappa, b.label())),
                    }
                }
            }
            (FamilyName::Transcendental, roots, states, None)
        }
        FamilyArg::Judd => {
            let res = judd_states(index, cfg.mu)?;
            (FamilyName::Juddian, res.roots, res.states.into_iter().map(ExactState::Juddian).collect(), res.note)
        }
    };
    if roots.is_empty() && note.is_none() {
        note = Some(format!("no root in (0,1) at mu = {}", cfg.mu));
    }
    let records = states.into_iter().map(|s| record(s, &tol)).collect::<Result<Vec<_>, _>>()?;
    let failed = records.iter().filter(|r| !r.passed).count();
    let code = if failed > 0 {
        EXIT_VERIFY
    } else if !errors.is_empty() {
        EXIT_PARTIAL
    } else {
        EXIT_OK
    };
    let mut messages: Vec<String> = errors.clone();
    messages.extend(records.iter().flat_map(|r| r.verification.failures.iter().map(|f| format!("verification failed: {f}"))));
    let file = ExactStateFile {
        schema_version: SCHEMA_VERSION,
        config_hash: config_hash("exact-state", cfg),
        family,
        index,
        mu: cfg.mu,
        precision: match cfg.precision {
            PrecisionArg::Double => "double".into(),
            PrecisionArg::Extended => "extended".into(),
        },
        tolerances: tol,
        roots,
        states: records,
        errors,
        note,
    };
    Ok(Outcome { body: to_json(&file)?, code, messages })
}

#[derive(Serialize)]
struct Margins {
    fourth_order: f64,
    system: f64,
    parity: f64,
}

#[derive(Serialize)]
struct VerifyResult {
    family: FamilyName,
    kappa: f64,
    energy: f64,
    parity: &'static str,
    passed: bool,
    failures: Vec<String>,
    /// Tolerance minus measured value; negative entries fail.
    margins: Margins,
    summary: Summary,
}

#[derive(Serialize)]
struct VerifyReport {
    schema_version: u32,
    input_schema_version: u32,
    config_hash: String,
    tolerances: Tolerances,
    passed: bool,
    results: Vec<VerifyResult>,
}

pub fn verify(cfg: &VerifyArgs) -> Result<Outcome, Failure> {
    let text = std::fs::read_to_string(&cfg.input).map_err(|e| Failure::Config(format!("cannot read {}: {e}", cfg.input.display())))?;
    let file: ExactStateFile = serde_json::from_str(&text)
        .map_err(|e| Failure::Config(format!("{}: line {}, column {}: {e}", cfg.input.display(), e.line(), e.column())))?;
    if file.schema_version != SCHEMA_VERSION {
        return Err(Failure::Config(format!("unsupported schema_version {}", file.schema_version)));
    }
    let mut tol = file.tolerances;
    if let Some(t) = cfg.tol {
        if !(t > 0.0) {
            return Err(Failure::Config(format!("--tol must be positive, got {t}")));
        }
        tol.residual = t;
    }
    let mut results = Vec::new();
    for rec in &file.states {
        let s = rec.state.spinor();
        let summary = verify_state(s, &tol)?;
        results.push(VerifyResult {
            family: file.family,
            kappa: s.params().kappa(),
            energy: s.energy(),
            parity: s.parity().label(),
            passed: summary.passed(),
            failures: summary.failures.clone(),
            margins: Margins {
                fourth_order: tol.residual - summary.residuals.fourth_order.max_residual,
                system: tol.residual - summary.residuals.system.max_residual,
                parity: tol.parity - summary.parity.deviation,
            },
            summary,
        });
    }
    let passed = results.iter().all(|r| r.passed);
    let messages = results.iter().flat_map(|r| r.failures.iter().map(move |f| format!("kappa = {}: {f}", r.kappa))).collect();
    let report = VerifyReport { schema_version: SCHEMA_VERSION, input_schema_version: file.schema_version, config_hash: config_hash("verify", &(file.config_hash, tol)), tolerances: tol, passed, results };
    Ok(Outcome { body: to_json(&report)?, code: if passed { EXIT_OK } else { EXIT_VERIFY }, messages })
}
