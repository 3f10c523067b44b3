//! Scenario suites: loading, running every scenario × check, and writing the
//! report files.

mod checks;

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::covering::HullMode;
use crate::error::{HullError, Result};
use crate::geometry::TAU_VOL;

/// Master seed used when neither the command line, the environment nor the
/// suite names one.
pub const DEFAULT_SEED: u64 = 0x5EED_2024;
pub const SEED_ENV: &str = "HULLMETRY_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScenarioKind {
    Body,
    Cloud,
    Profile,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckName {
    VolumeXcheck,
    RatioPoly,
    Revbm,
    Convexify,
    CoverRatio,
    GammaHull,
    MmTwoSided,
    LExistence,
}

impl CheckName {
    pub fn as_str(self) -> &'static str {
        match self {
            CheckName::VolumeXcheck => "volume_xcheck",
            CheckName::RatioPoly => "ratio_poly",
            CheckName::Revbm => "revbm",
            CheckName::Convexify => "convexify",
            CheckName::CoverRatio => "cover_ratio",
            CheckName::GammaHull => "gamma_hull",
            CheckName::MmTwoSided => "mm_two_sided",
            CheckName::LExistence => "l_existence",
        }
    }

    pub fn valid_for(self, kind: ScenarioKind) -> bool {
        use CheckName::*;
        match kind {
            ScenarioKind::Body => matches!(self, VolumeXcheck | RatioPoly | Revbm | Convexify | CoverRatio | GammaHull),
            ScenarioKind::Cloud => matches!(self, Convexify | CoverRatio | GammaHull | MmTwoSided),
            ScenarioKind::Profile => self == LExistence,
        }
    }
}

fn default_eps() -> Vec<f64> {
    vec![0.2, 0.4, 0.8]
}
fn default_alpha() -> f64 {
    2.0
}
fn default_k_max() -> usize {
    8
}
fn default_trials() -> usize {
    10_000
}
fn default_scales() -> Vec<f64> {
    vec![0.5, 1.0, 2.0]
}
fn default_m() -> Vec<u32> {
    vec![1, 2]
}
fn default_modes() -> Vec<HullMode> {
    vec![HullMode::Poly, HullMode::General]
}
fn default_c() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    #[serde(default = "default_eps")]
    pub epsilons: Vec<f64>,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_k_max")]
    pub k_max: usize,
    #[serde(default = "default_trials")]
    pub trials: usize,
    /// Overrides the master seed for this scenario.
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default = "default_scales")]
    pub s_values: Vec<f64>,
    #[serde(default = "default_scales")]
    pub t_values: Vec<f64>,
    #[serde(default = "default_m")]
    pub m_values: Vec<u32>,
    #[serde(default = "default_modes")]
    pub modes: Vec<HullMode>,
    /// Ratio-function constant for profiles.
    #[serde(rename = "C", default = "default_c")]
    pub c: f64,
}

impl Default for Params {
    fn default() -> Self {
        serde_json::from_str("{}").expect("all params have defaults")
    }
}

/// One scenario. The geometry is given inline (`payload`), by bundled
/// fixture name (`fixture`) or by a path relative to the suite file (`path`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub id: String,
    pub kind: ScenarioKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub payload: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixture: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    pub checks: Vec<CheckName>,
    #[serde(default)]
    pub params: Params,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Suite {
    #[serde(default)]
    pub name: String,
    #[serde(default)]
    pub seed: Option<u64>,
    pub scenarios: Vec<Scenario>,
}

impl Suite {
    pub fn from_json_str(s: &str) -> Result<Self> {
        let suite: Suite = serde_json::from_str(s).map_err(|e| HullError::InvalidInput(format!("suite JSON: {e}")))?;
        suite.validate()?;
        Ok(suite)
    }

    pub fn validate(&self) -> Result<()> {
        let mut ids = HashSet::new();
        for sc in &self.scenarios {
            if !ids.insert(sc.id.as_str()) {
                return Err(HullError::InvalidInput(format!("duplicate scenario id {:?}", sc.id)));
            }
            let sources = [sc.payload.is_some(), sc.fixture.is_some(), sc.path.is_some()];
            if sources.iter().filter(|&&b| b).count() != 1 {
                return Err(HullError::InvalidInput(format!(
                    "scenario {:?} needs exactly one of payload, fixture, path",
                    sc.id
                )));
            }
            for c in &sc.checks {
                if !c.valid_for(sc.kind) {
                    return Err(HullError::InvalidInput(format!(
                        "check {} is not valid for {:?} scenario {:?}",
                        c.as_str(),
                        sc.kind,
                        sc.id
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Outcome of one comparison lhs ≤ rhs inside a check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificationRecord {
    pub scenario: String,
    pub check: CheckName,
    /// Which instance of the check (ε, mode, k, ...).
    pub case: String,
    pub holds: bool,
    pub lhs: Option<f64>,
    pub rhs: Option<f64>,
    /// rhs - lhs; absent when the comparison is vacuous.
    pub slack: Option<f64>,
    pub constants: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl CertificationRecord {
    pub(crate) fn compare(case: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        let slack = rhs - lhs;
        Self {
            scenario: String::new(),
            check: CheckName::VolumeXcheck,
            case: case.into(),
            holds: slack >= -TAU_VOL,
            lhs: Some(lhs),
            rhs: Some(rhs),
            slack: Some(slack),
            constants: BTreeMap::new(),
            error: None,
        }
    }

    /// A comparison with no right-hand side: it holds trivially.
    pub(crate) fn vacuous(case: impl Into<String>, lhs: f64) -> Self {
        let lhs = lhs.is_finite().then_some(lhs);
        Self { holds: true, lhs, rhs: None, slack: None, ..Self::compare(case, 0.0, 0.0) }
    }

    pub(crate) fn with(mut self, key: &str, value: f64) -> Self {
        self.constants.insert(key.to_string(), value);
        self
    }
}

/// Timing of one scenario × check, kept out of results.json so that file is
/// reproducible.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub scenario: String,
    pub check: CheckName,
    pub runtime_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub all_hold: bool,
    pub records: Vec<CertificationRecord>,
}

/// Everything a run produces: the report, timings and extra CSV files keyed
/// by relative path.
#[derive(Debug, Clone)]
pub struct SuiteOutcome {
    pub report: SuiteReport,
    pub timings: Vec<Timing>,
    pub files: BTreeMap<String, String>,
}

/// Flag, then environment, then suite, then the default.
pub fn resolve_seed(flag: Option<u64>, suite: &Suite) -> Result<u64> {
    if let Some(s) = flag {
        return Ok(s);
    }
    if let Ok(v) = std::env::var(SEED_ENV) {
        return v.trim().parse().map_err(|_| HullError::InvalidInput(format!("{SEED_ENV} is not an integer: {v:?}")));
    }
    Ok(suite.seed.unwrap_or(DEFAULT_SEED))
}

/// Resolved scenario input.
pub(crate) enum Input {
    Body(crate::geometry::Polytope),
    Cloud(crate::geometry::PointCloud),
    Profile(crate::entropy::ProfileScenario),
}

fn load_input(sc: &Scenario, base: &Path) -> Result<Input> {
    let text = match (&sc.payload, &sc.fixture, &sc.path) {
        (Some(v), _, _) => v.to_string(),
        (_, Some(name), _) => match sc.kind {
            ScenarioKind::Body => crate::fixtures::body_json(name)?,
            ScenarioKind::Cloud => crate::fixtures::cloud_json(name)?,
            ScenarioKind::Profile => crate::fixtures::profile_json(name)?,
        }
        .to_string(),
        (_, _, Some(p)) => {
            let full = base.join(p);
            fs::read_to_string(&full).map_err(|e| HullError::InvalidInput(format!("{}: {e}", full.display())))?
        }
        _ => return Err(HullError::InvalidInput(format!("scenario {:?} has no geometry", sc.id))),
    };
    Ok(match sc.kind {
        ScenarioKind::Body => Input::Body(crate::geometry::Polytope::from_json_str(&text)?),
        ScenarioKind::Cloud => Input::Cloud(crate::geometry::PointCloud::from_json_str(&text)?),
        ScenarioKind::Profile => Input::Profile(crate::entropy::ProfileScenario::from_json_str(&text)?),
    })
}

/// Loads every scenario input up front so that malformed geometry is a
/// parse error rather than a failed check.
pub(crate) fn load_inputs(suite: &Suite, base: &Path) -> Result<Vec<Input>> {
    suite.scenarios.iter().map(|sc| load_input(sc, base)).collect()
}

/// Runs a parsed suite. `base` resolves relative scenario paths.
pub fn run(suite: &Suite, base: &Path, seed: u64) -> Result<SuiteOutcome> {
    let inputs = load_inputs(suite, base)?;
    let jobs: Vec<(usize, CheckName)> =
        suite.scenarios.iter().enumerate().flat_map(|(i, sc)| sc.checks.iter().map(move |&c| (i, c))).collect();
    let results: Vec<(checks::CheckOutput, Timing)> = jobs
        .par_iter()
        .map(|&(i, check)| {
            let sc = &suite.scenarios[i];
            let start = Instant::now();
            let seed = sc.params.seed.unwrap_or(seed);
            let mut out = checks::run_check(check, &inputs[i], &sc.params, seed).unwrap_or_else(|e| checks::CheckOutput {
                records: vec![CertificationRecord { holds: false, error: Some(e.to_string()), ..CertificationRecord::vacuous("error", f64::NAN) }],
                ..Default::default()
            });
            for r in &mut out.records {
                r.scenario = sc.id.clone();
                r.check = check;
            }
            for row in &mut out.chaining {
                row.scenario = sc.id.clone();
            }
            let timing = Timing { scenario: sc.id.clone(), check, runtime_ms: start.elapsed().as_secs_f64() * 1e3 };
            (out, timing)
        })
        .collect();

    let mut records = Vec::new();
    let mut timings = Vec::new();
    let mut files = BTreeMap::new();
    let mut chaining = Vec::new();
    let mut sizes = Vec::new();
    for ((i, check), (out, timing)) in jobs.iter().zip(results) {
        let id = &suite.scenarios[*i].id;
        records.extend(out.records);
        timings.push(timing);
        chaining.extend(out.chaining);
        for (suffix, csv) in out.plots {
            files.insert(format!("plots/{id}_{}_{suffix}.csv", check.as_str()), csv);
        }
        if let Some(p) = out.size_point {
            sizes.push(p);
        }
    }
    // Largest empirical two-sided constant over the suite.
    let l_hats: Vec<f64> = records
        .iter()
        .filter(|r| r.check == CheckName::MmTwoSided)
        .filter_map(|r| r.constants.get("L_hat").copied())
        .collect();
    if !l_hats.is_empty() {
        let max = l_hats.iter().copied().fold(0.0, f64::max);
        let mut r = CertificationRecord::vacuous("max_L_hat", max).with("L_hat_max", max);
        r.scenario = "_suite".into();
        r.check = CheckName::MmTwoSided;
        records.push(r);
    }
    records.sort_by(|a, b| (&a.scenario, a.check, &a.case).cmp(&(&b.scenario, b.check, &b.case)));
    timings.sort_by(|a, b| (&a.scenario, a.check).cmp(&(&b.scenario, b.check)));
    chaining.sort_by(|a, b| a.scenario.cmp(&b.scenario).then(a.alpha.total_cmp(&b.alpha)));
    sizes.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));

    files.insert("results.csv".into(), records_to_csv(&records)?);
    files.insert("timings.csv".into(), crate::minkowski::write_csv(&timings)?);
    if !chaining.is_empty() {
        files.insert("chaining.csv".into(), crate::chaining::chaining_to_csv(&chaining)?);
    }
    if !sizes.is_empty() {
        let rows = sizes.iter().map(|(size, gamma)| SizeRow { size: *size, gamma2: *gamma });
        files.insert("plots/gamma_vs_size.csv".into(), crate::minkowski::write_csv(rows)?);
    }
    let all_hold = records.iter().all(|r| r.holds);
    let report = SuiteReport { suite: suite.name.clone(), seed, all_hold, records };
    Ok(SuiteOutcome { report, timings, files })
}

#[derive(Serialize)]
struct SizeRow {
    size: usize,
    gamma2: f64,
}

#[derive(Serialize)]
struct RecordRow<'a> {
    scenario: &'a str,
    check: &'static str,
    case: &'a str,
    holds: bool,
    lhs: Option<f64>,
    rhs: Option<f64>,
    slack: Option<f64>,
    constants: String,
    error: Option<&'a str>,
}

pub fn records_to_csv(records: &[CertificationRecord]) -> Result<String> {
    crate::minkowski::write_csv(records.iter().map(|r| RecordRow {
        scenario: &r.scenario,
        check: r.check.as_str(),
        case: &r.case,
        holds: r.holds,
        lhs: r.lhs,
        rhs: r.rhs,
        slack: r.slack,
        constants: r.constants.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";"),
        error: r.error.as_deref(),
    }))
}

/// Writes results.json, timings.json and the CSV files into `out_dir`.
pub fn write_outcome(outcome: &SuiteOutcome, out_dir: &Path) -> std::io::Result<()> {
    fs::create_dir_all(out_dir.join("plots"))?;
    let json = serde_json::to_string_pretty(&outcome.report).expect("report serializes");
    fs::write(out_dir.join("results.json"), json + "\n")?;
    let timings = serde_json::to_string_pretty(&outcome.timings).expect("timings serialize");
    fs::write(out_dir.join("timings.json"), timings + "\n")?;
    for (name, body) in &outcome.files {
        fs::write(out_dir.join(name), body)?;
    }
    Ok(())
}

/// Why a suite run did not succeed.
#[derive(Debug)]
pub enum RunError {
    /// Suite file unreadable or invalid.
    Parse(String),
    /// Output directory could not be written.
    Io(std::io::Error),
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Parse(m) => write!(f, "{m}"),
            RunError::Io(e) => write!(f, "cannot write results: {e}"),
        }
    }
}

impl std::error::Error for RunError {}

/// Reads a suite file, runs it and writes the report into `out_dir`.
pub fn run_suite(suite_file: &Path, out_dir: &Path, seed_flag: Option<u64>) -> std::result::Result<SuiteOutcome, RunError> {
    let text =
        fs::read_to_string(suite_file).map_err(|e| RunError::Parse(format!("{}: {e}", suite_file.display())))?;
    let suite = Suite::from_json_str(&text).map_err(|e| RunError::Parse(e.to_string()))?;
    let seed = resolve_seed(seed_flag, &suite).map_err(|e| RunError::Parse(e.to_string()))?;
    let base = suite_file.parent().unwrap_or(Path::new("."));
    let outcome = run(&suite, base, seed).map_err(|e| RunError::Parse(e.to_string()))?;
    write_outcome(&outcome, out_dir).map_err(RunError::Io)?;
    Ok(outcome)
}

/// The suite shipped with the crate; fixtures are referenced by name.
pub const BUNDLED_SUITE: &str = include_str!("../../suites/bundled.json");
