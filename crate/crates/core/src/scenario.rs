//! Scenario registry, config files and report emission for the runner.
//!
//! Each scenario pairs a coefficient family with its limit, classifies
//! every member, optionally runs a resolvent convergence diagnostic, and
//! compares the outcome with the expected verdicts.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Deserialize;

use crate::classify::{
    classify_chung_fuchs, classify_recurrence_u04, classify_sharp_epsilon, corroborating_property,
    feller_explosion_test, PathClassification, PathProperty,
};
use crate::coeffs::{
    check_assumption_sequence, lookup_family, AssumptionTrend, Coefficient, FamilyId, JumpKernel, OrderFunction,
    ParamMap, Region,
};
use crate::error::{Error, Result};
use crate::forms::{assemble_diffusion, assemble_jump, assemble_multiplier, Boundary, Grid1D, GridForm};
use crate::levy::LevyExponent;
use crate::mosco::{
    gaussian_bump, mosco_diagnostic, test_vector, window_sensitivity, ConvergenceReport, DiagnosticConfig,
    MoscoVerdict, PROXY_NOTE,
};
use crate::tolerances::{MOSCO_DECREASE, MOSCO_THRESHOLD, SEMIGROUP_STEPS};

/// Environment variable that sets the output directory when `--out` is absent.
pub const OUT_ENV: &str = "MOSCOLAB_OUT";
/// Output directory used when neither `--out` nor [`OUT_ENV`] is given.
pub const DEFAULT_OUT: &str = "moscolab-out";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ScenarioId {
    Prop15i,
    Prop15ii,
    Prop16i,
    Prop16ii,
    Prop18i,
    Prop18ii,
    Remark17,
    Thm42Sweep,
    ConstAlphaSweep,
}

impl ScenarioId {
    pub const ALL: [ScenarioId; 9] = [
        ScenarioId::Prop15i,
        ScenarioId::Prop15ii,
        ScenarioId::Prop16i,
        ScenarioId::Prop16ii,
        ScenarioId::Prop18i,
        ScenarioId::Prop18ii,
        ScenarioId::Remark17,
        ScenarioId::Thm42Sweep,
        ScenarioId::ConstAlphaSweep,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioId::Prop15i => "prop15i",
            ScenarioId::Prop15ii => "prop15ii",
            ScenarioId::Prop16i => "prop16i",
            ScenarioId::Prop16ii => "prop16ii",
            ScenarioId::Prop18i => "prop18i",
            ScenarioId::Prop18ii => "prop18ii",
            ScenarioId::Remark17 => "remark17",
            ScenarioId::Thm42Sweep => "thm42-sweep",
            ScenarioId::ConstAlphaSweep => "const-alpha-sweep",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            ScenarioId::Prop15i => "explosive diffusions converging to a conservative one (Feller test + resolvents)",
            ScenarioId::Prop15ii => "conservative diffusions converging to an explosive one (Feller test + resolvents)",
            ScenarioId::Prop16i => "recurrent variable-order Levy processes with a transient limit (multiplier forms)",
            ScenarioId::Prop16ii => "transient variable-order Levy processes with a recurrent limit (multiplier forms)",
            ScenarioId::Prop18i => "recurrent jump processes with sine amplitude, transient limit (jump forms)",
            ScenarioId::Prop18ii => "transient jump processes with sine amplitude, recurrent limit (jump forms)",
            ScenarioId::Remark17 => "planar stable exponents |x|^(2-1/n) converging to Brownian motion",
            ScenarioId::Thm42Sweep => "sharp epsilon criterion for 1 - log(u+e^2)^(-eps)",
            ScenarioId::ConstAlphaSweep => "classical stable dichotomy by the Chung-Fuchs test",
        }
    }

    fn family(self) -> Option<FamilyId> {
        match self {
            ScenarioId::Prop15i => Some(FamilyId::Prop15i),
            ScenarioId::Prop15ii => Some(FamilyId::Prop15ii),
            ScenarioId::Prop16i => Some(FamilyId::Prop16i),
            ScenarioId::Prop16ii => Some(FamilyId::Prop16ii),
            ScenarioId::Prop18i => Some(FamilyId::Prop18i),
            ScenarioId::Prop18ii => Some(FamilyId::Prop18ii),
            _ => None,
        }
    }
}

impl fmt::Display for ScenarioId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScenarioId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ScenarioId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::invalid("scenario", format!("unknown scenario `{s}`")))
    }
}

/// One config section; every field is optional and falls back to the
/// scenario default.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Indices that are classified.
    pub n: Option<Vec<u32>>,
    /// Indices used by the resolvent diagnostic.
    pub mosco_n: Option<Vec<u32>>,
    pub eps: Option<Vec<f64>>,
    pub alpha: Option<Vec<f64>>,
    pub dims: Option<Vec<usize>>,
    pub grid_n: Option<usize>,
    pub grid_l: Option<f64>,
    pub lambda: Option<Vec<f64>>,
    pub t: Option<Vec<f64>>,
    pub f: Option<Vec<String>>,
    pub c_mean: Option<f64>,
    pub c_amp: Option<f64>,
    pub threshold: Option<f64>,
    pub semigroup_steps: Option<usize>,
}

/// Parses a config file: one `[scenario-id]` table per scenario.
pub fn parse_config(text: &str, origin: &str) -> Result<BTreeMap<ScenarioId, ScenarioConfig>> {
    let raw: BTreeMap<String, ScenarioConfig> = toml::from_str(text).map_err(|e| Error::Config {
        location: origin.to_string(),
        message: e.to_string(),
    })?;
    raw.into_iter()
        .map(|(k, v)| {
            let id = k.parse::<ScenarioId>().map_err(|_| Error::Config {
                location: format!("{origin}, section [{k}]"),
                message: format!("unknown scenario `{k}`"),
            })?;
            Ok((id, v))
        })
        .collect()
}

pub fn load_config(path: &Path) -> Result<BTreeMap<ScenarioId, ScenarioConfig>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text, &path.display().to_string())
}

/// Command-line overrides applied on top of the config.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Overrides {
    pub grid_n: Option<usize>,
    pub grid_l: Option<f64>,
    /// Drops indices above this and caps the diagnostic index list.
    pub n_max: Option<u32>,
}

/// Fully resolved and validated scenario parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub id: ScenarioId,
    pub n: Vec<u32>,
    pub mosco_n: Vec<u32>,
    pub eps: Vec<f64>,
    pub alpha: Vec<f64>,
    pub dims: Vec<usize>,
    pub grid_n: usize,
    pub grid_l: f64,
    pub lambda: Vec<f64>,
    pub t: Vec<f64>,
    pub f: Vec<String>,
    pub c_mean: f64,
    pub c_amp: f64,
    pub threshold: f64,
    pub semigroup_steps: usize,
}

fn powers_of_two(from: u32, to: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut k = from;
    while k <= to {
        out.push(k);
        k *= 2;
    }
    out
}

impl Scenario {
    pub fn defaults(id: ScenarioId) -> Scenario {
        let (n, mosco_n) = match id {
            ScenarioId::Prop15i | ScenarioId::Prop15ii => (vec![1, 2, 4], powers_of_two(1, 1024)),
            ScenarioId::Prop16i => (vec![1, 2, 4], powers_of_two(1, 256)),
            ScenarioId::Prop16ii => (vec![2, 4, 8], powers_of_two(2, 256)),
            ScenarioId::Prop18i | ScenarioId::Prop18ii => (vec![2, 4, 8], powers_of_two(2, 256)),
            ScenarioId::Remark17 => (vec![1, 2, 4, 8], powers_of_two(1, 64)),
            _ => (Vec::new(), Vec::new()),
        };
        Scenario {
            id,
            n,
            mosco_n,
            eps: vec![0.25, 0.5, 0.75, 1.0, 1.25, 1.5],
            alpha: vec![0.5, 0.75, 1.0, 1.5, 1.9],
            dims: vec![1, 2],
            grid_n: 2048,
            grid_l: 20.0,
            lambda: vec![1.0],
            t: vec![1.0],
            f: vec!["gauss".into(), "indicator".into(), "taper".into()],
            c_mean: 1.0,
            c_amp: 0.5,
            threshold: MOSCO_THRESHOLD,
            semigroup_steps: SEMIGROUP_STEPS,
        }
    }

    pub fn new(id: ScenarioId, config: &ScenarioConfig, overrides: &Overrides) -> Result<Scenario> {
        let mut s = Scenario::defaults(id);
        let c = config.clone();
        s.n = c.n.unwrap_or(s.n);
        s.mosco_n = c.mosco_n.unwrap_or(s.mosco_n);
        s.eps = c.eps.unwrap_or(s.eps);
        s.alpha = c.alpha.unwrap_or(s.alpha);
        s.dims = c.dims.unwrap_or(s.dims);
        s.grid_n = overrides.grid_n.or(c.grid_n).unwrap_or(s.grid_n);
        s.grid_l = overrides.grid_l.or(c.grid_l).unwrap_or(s.grid_l);
        s.lambda = c.lambda.unwrap_or(s.lambda);
        s.t = c.t.unwrap_or(s.t);
        s.f = c.f.unwrap_or(s.f);
        s.c_mean = c.c_mean.unwrap_or(s.c_mean);
        s.c_amp = c.c_amp.unwrap_or(s.c_amp);
        s.threshold = c.threshold.unwrap_or(s.threshold);
        s.semigroup_steps = c.semigroup_steps.unwrap_or(s.semigroup_steps);
        if let Some(cap) = overrides.n_max {
            s.n.retain(|&n| n <= cap);
            if config.mosco_n.is_none() {
                let from = s.mosco_n.first().copied().unwrap_or(1);
                s.mosco_n = powers_of_two(from, cap);
            } else {
                s.mosco_n.retain(|&n| n <= cap);
            }
        }
        s.validate()?;
        Ok(s)
    }

    fn validate(&self) -> Result<()> {
        let bad = |field: &'static str, msg: String| Err(Error::invalid(field, msg));
        let increasing = |v: &[u32]| v.windows(2).all(|w| w[0] < w[1]);
        if !increasing(&self.n) || !increasing(&self.mosco_n) {
            return bad("n", "index lists must be strictly increasing".into());
        }
        let min_n = match self.id {
            ScenarioId::Prop16ii | ScenarioId::Prop18i | ScenarioId::Prop18ii => 2,
            _ => 1,
        };
        if let Some(&n) = self.n.iter().chain(&self.mosco_n).find(|&&n| n < min_n) {
            return bad("n", format!("{} needs n >= {min_n}, got {n}", self.id));
        }
        if self.mosco_n.len() == 1 {
            return bad("mosco_n", "the diagnostic needs at least two indices".into());
        }
        if self.eps.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
            return bad("eps", "values must be positive".into());
        }
        if self.alpha.iter().any(|a| !(*a > 0.0 && *a < 2.0)) {
            return bad("alpha", "values must lie in (0, 2)".into());
        }
        if self.dims.iter().any(|d| !(1..=3).contains(d)) {
            return bad("dims", "supported dimensions are 1, 2, 3".into());
        }
        if self.grid_n < 16 || !self.grid_n.is_multiple_of(2) {
            return bad("grid_n", format!("need an even count >= 16, got {}", self.grid_n));
        }
        if !(self.grid_l > 0.0 && self.grid_l.is_finite()) {
            return bad("grid_l", format!("must be positive, got {}", self.grid_l));
        }
        if self.lambda.is_empty() || self.lambda.iter().any(|l| !(*l > 0.0)) {
            return bad("lambda", "need positive values".into());
        }
        if self.t.is_empty() || self.t.iter().any(|t| !(*t > 0.0)) {
            return bad("t", "need positive values".into());
        }
        if self.f.is_empty() {
            return bad("f", "need at least one test vector".into());
        }
        if self.semigroup_steps == 0 {
            return bad("semigroup_steps", "need at least one step".into());
        }
        if !(self.threshold > 0.0) {
            return bad("threshold", "must be positive".into());
        }
        Ok(())
    }
}

/// One line of the unified CSV table; `None` errors become empty fields.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub scenario: String,
    pub id_param: String,
    pub method: String,
    pub verdict: String,
    pub energy_err: Option<f64>,
    pub resolvent_err: Option<f64>,
    pub semigroup_err: Option<f64>,
    pub notes: String,
}

/// An expected verdict compared with the computed one.
#[derive(Debug, Clone, PartialEq)]
pub struct ClaimCheck {
    pub subject: String,
    pub claimed: String,
    pub observed: String,
}

impl ClaimCheck {
    pub fn matched(&self) -> bool {
        self.claimed == self.observed
    }
}

#[derive(Debug, Clone)]
pub struct ScenarioOutcome {
    pub id: ScenarioId,
    pub classifications: Vec<(String, PathClassification)>,
    pub mosco: Option<ConvergenceReport>,
    pub claims: Vec<ClaimCheck>,
    pub rows: Vec<ReportRow>,
    pub notes: Vec<String>,
}

impl ScenarioOutcome {
    pub fn new(id: ScenarioId) -> Self {
        ScenarioOutcome {
            id,
            classifications: Vec::new(),
            mosco: None,
            claims: Vec::new(),
            rows: Vec::new(),
            notes: Vec::new(),
        }
    }

    /// True iff every expected verdict was reproduced.
    pub fn passed(&self) -> bool {
        self.claims.iter().all(ClaimCheck::matched)
    }

    fn classify(&mut self, param: String, c: PathClassification, claimed: PathProperty, extra: &str) {
        let mut notes = classification_notes(&c);
        if !extra.is_empty() {
            notes = if notes.is_empty() {
                extra.to_string()
            } else {
                format!("{notes};{extra}")
            };
        }
        self.rows.push(ReportRow {
            scenario: self.id.to_string(),
            id_param: param.clone(),
            method: c.method.to_string(),
            verdict: c.property.to_string(),
            energy_err: None,
            resolvent_err: None,
            semigroup_err: None,
            notes,
        });
        self.claims.push(ClaimCheck {
            subject: param.clone(),
            claimed: claimed.to_string(),
            observed: c.property.to_string(),
        });
        self.classifications.push((param, c));
    }
}

fn classification_notes(c: &PathClassification) -> String {
    if let Some(u) = &c.u04 {
        return format!("near_bounded={};far_bounded={}", u.near_bounded, u.far_bounded);
    }
    c.evidence
        .iter()
        .map(|t| {
            let last = t.last_partial().map(|p| format!("{p:e}")).unwrap_or_default();
            format!("tail={:?};depth={};last_partial={last}", t.verdict, t.depth)
        })
        .collect::<Vec<_>>()
        .join(";")
}

fn with_context<T>(id: ScenarioId, r: Result<T>) -> Result<T> {
    r.map_err(|e| Error::Scenario {
        scenario: id.to_string(),
        source: Box::new(e),
    })
}

/// Runs the scenario pipeline and collects rows and claim checks.
pub fn run_scenario(s: &Scenario) -> Result<ScenarioOutcome> {
    with_context(s.id, run_inner(s))
}

fn run_inner(s: &Scenario) -> Result<ScenarioOutcome> {
    let mut out = ScenarioOutcome::new(s.id);
    match s.id {
        ScenarioId::Prop15i | ScenarioId::Prop15ii => {
            let (member, limit) = if s.id == ScenarioId::Prop15i {
                (PathProperty::Explosive, PathProperty::Conservative)
            } else {
                (PathProperty::Conservative, PathProperty::Explosive)
            };
            for &n in &s.n {
                let a = diffusion(s, Some(n))?;
                out.classify(format!("n={n}"), feller_explosion_test(&a)?, member, "");
            }
            out.classify("limit".into(), feller_explosion_test(&diffusion(s, None)?)?, limit, "");
        }
        ScenarioId::Prop16i | ScenarioId::Prop18i => {
            let note = comparison_note(s);
            for &n in &s.n {
                let c = classify_recurrence_u04(&order(s, Some(n))?, 1)?;
                out.classify(format!("n={n}"), c, PathProperty::Recurrent, &note);
            }
            let c = classify_sharp_epsilon(0.5)?;
            let extra = join_notes(&note, &format!("chung_fuchs={}", corroborating_property(&c)));
            out.classify("limit".into(), c, PathProperty::Transient, &extra);
        }
        ScenarioId::Prop16ii | ScenarioId::Prop18ii => {
            let note = comparison_note(s);
            for &n in &s.n {
                let c = classify_sharp_epsilon(1.0 - 1.0 / n as f64)?;
                let extra = join_notes(&note, &format!("chung_fuchs={}", corroborating_property(&c)));
                out.classify(format!("n={n}"), c, PathProperty::Transient, &extra);
            }
            let c = classify_sharp_epsilon(1.0)?;
            let extra = join_notes(&note, &format!("chung_fuchs={}", corroborating_property(&c)));
            out.classify("limit".into(), c, PathProperty::Recurrent, &extra);
        }
        ScenarioId::Remark17 => remark17(s, &mut out)?,
        ScenarioId::Thm42Sweep => {
            for &eps in &s.eps {
                let c = classify_sharp_epsilon(eps)?;
                let claimed = if eps >= 1.0 {
                    PathProperty::Recurrent
                } else {
                    PathProperty::Transient
                };
                let extra = format!("chung_fuchs={}", corroborating_property(&c));
                out.classify(format!("eps={eps}"), c, claimed, &extra);
            }
        }
        ScenarioId::ConstAlphaSweep => {
            for &d in &s.dims {
                for &alpha in &s.alpha {
                    let c = classify_chung_fuchs(&LevyExponent::stable(d, alpha)?)?;
                    let claimed = if d == 1 && alpha >= 1.0 {
                        PathProperty::Recurrent
                    } else {
                        PathProperty::Transient
                    };
                    out.classify(format!("d={d};alpha={alpha}"), c, claimed, "");
                }
            }
        }
    }
    if !s.mosco_n.is_empty() && s.id.family().is_some() {
        diagnostic(s, &mut out)?;
    }
    Ok(out)
}

fn join_notes(a: &str, b: &str) -> String {
    match (a.is_empty(), b.is_empty()) {
        (true, _) => b.to_string(),
        (_, true) => a.to_string(),
        _ => format!("{a};{b}"),
    }
}

fn comparison_note(s: &Scenario) -> String {
    match s.id {
        ScenarioId::Prop18i | ScenarioId::Prop18ii => format!(
            "comparison with the translation-invariant kernel (amplitude in [{}, {}])",
            1.0 + s.c_mean - s.c_amp,
            1.0 + s.c_mean + s.c_amp
        ),
        _ => String::new(),
    }
}

fn params(s: &Scenario, n: Option<u32>) -> ParamMap {
    let mut p = ParamMap::new();
    if let Some(n) = n {
        p.insert("n".into(), n as f64);
    }
    p.insert("c_mean".into(), s.c_mean);
    p.insert("c_amp".into(), s.c_amp);
    p
}

fn coefficient(s: &Scenario, n: Option<u32>) -> Result<Coefficient> {
    let family =
        s.id.family()
            .ok_or_else(|| Error::Precondition(format!("{} has no coefficient family", s.id)))?;
    lookup_family(family, &params(s, n))
}

fn diffusion(s: &Scenario, n: Option<u32>) -> Result<crate::coeffs::DiffusionCoefficient> {
    match coefficient(s, n)? {
        Coefficient::Diffusion(a) => Ok(a),
        _ => Err(Error::Precondition(format!("{} is not a diffusion family", s.id))),
    }
}

fn order(s: &Scenario, n: Option<u32>) -> Result<OrderFunction> {
    match coefficient(s, n)? {
        Coefficient::Order(o) => Ok(o),
        Coefficient::Jump(k) => Ok(k.order().clone()),
        Coefficient::Diffusion(_) => Err(Error::Precondition(format!("{} has no order function", s.id))),
    }
}

fn jump_kernel(s: &Scenario, n: Option<u32>) -> Result<JumpKernel> {
    match coefficient(s, n)? {
        Coefficient::Jump(k) => Ok(k),
        _ => Err(Error::Precondition(format!("{} is not a jump family", s.id))),
    }
}

fn assemble(s: &Scenario, n: Option<u32>, grid: Grid1D) -> Result<GridForm> {
    match s.id {
        ScenarioId::Prop15i | ScenarioId::Prop15ii => assemble_diffusion(&diffusion(s, n)?, grid),
        ScenarioId::Prop16i | ScenarioId::Prop16ii => assemble_multiplier(&LevyExponent::jump(1, order(s, n)?)?, grid),
        ScenarioId::Prop18i | ScenarioId::Prop18ii => assemble_jump(&jump_kernel(s, n)?, grid),
        _ => Err(Error::Precondition(format!("{} has no grid forms", s.id))),
    }
}

fn boundary(id: ScenarioId) -> Boundary {
    match id {
        ScenarioId::Prop15i | ScenarioId::Prop15ii => Boundary::Killing,
        _ => Boundary::Periodic,
    }
}

fn diagnostic(s: &Scenario, out: &mut ScenarioOutcome) -> Result<()> {
    let grid = Grid1D::new(s.grid_l, s.grid_n, boundary(s.id))?;
    let limit = assemble(s, None, grid)?;
    let family = s
        .mosco_n
        .iter()
        .map(|&n| Ok((n, assemble(s, Some(n), grid)?)))
        .collect::<Result<Vec<_>>>()?;
    let config = DiagnosticConfig {
        lambdas: s.lambda.clone(),
        times: s.t.clone(),
        vectors: s.f.iter().map(|id| test_vector(id, &grid)).collect::<Result<_>>()?,
        threshold: s.threshold,
        decrease: MOSCO_DECREASE,
        semigroup_steps: s.semigroup_steps,
    };
    let mut report = mosco_diagnostic(s.id.as_str(), &family, &limit, &config)?;
    let last = *s.mosco_n.last().expect("validated non-empty");
    let sensitivity = window_sensitivity(|g| assemble(s, Some(last), g), grid, s.lambda[0], gaussian_bump)?;
    report.notes.push(format!(
        "window doubling at n={last}: relative resolvent change {sensitivity:.3e} (gauss, lambda={})",
        s.lambda[0]
    ));

    for e in &report.entries {
        out.rows.push(ReportRow {
            scenario: s.id.to_string(),
            id_param: format!("n={}", e.index),
            method: "Mosco".into(),
            verdict: String::new(),
            energy_err: Some(e.energy_error),
            resolvent_err: Some(e.resolvent_error),
            semigroup_err: Some(e.semigroup_error),
            notes: format!("lambda={};t={};f={}", e.lambda, e.time, e.f_id),
        });
    }
    let worst = report.worst_by_index();
    let (n_last, e_last) = *worst.last().expect("non-empty");
    out.rows.push(ReportRow {
        scenario: s.id.to_string(),
        id_param: "mosco".into(),
        method: "Mosco".into(),
        verdict: report.verdict.to_string(),
        energy_err: None,
        resolvent_err: Some(e_last),
        semigroup_err: None,
        notes: format!("worst resolvent error at n={n_last};threshold={}", report.threshold),
    });
    out.claims.push(ClaimCheck {
        subject: format!("resolvent convergence over n={}..{}", s.mosco_n[0], last),
        claimed: MoscoVerdict::ConvergenceObserved.to_string(),
        observed: report.verdict.to_string(),
    });
    out.notes.extend(report.notes.iter().cloned());
    out.mosco = Some(report);
    Ok(())
}

fn remark17(s: &Scenario, out: &mut ScenarioOutcome) -> Result<()> {
    for &n in &s.n {
        let alpha = 2.0 - 1.0 / n as f64;
        let c = classify_chung_fuchs(&LevyExponent::stable(2, alpha)?)?;
        out.classify(format!("n={n}"), c, PathProperty::Transient, "");
    }
    let brownian = LevyExponent::gaussian(2, vec![2.0, 0.0, 0.0, 2.0])?;
    out.classify(
        "limit".into(),
        classify_chung_fuchs(&brownian)?,
        PathProperty::Recurrent,
        "",
    );

    if s.mosco_n.len() >= 2 {
        // the exponents are explicit: |x|^(2 - 1/n) -> |x|^2
        let norm = |x: &[f64]| (x[0] * x[0] + x[1] * x[1]).sqrt();
        let report = check_assumption_sequence(
            |n, x| Ok(norm(x).powf(2.0 - 1.0 / n as f64)),
            |x| Ok(norm(x).powi(2)),
            &Region::cube(2, -1.0, 1.0),
            &s.mosco_n,
            200,
        )?;
        for (n, d) in report.indices.iter().zip(&report.distances) {
            out.rows.push(ReportRow {
                scenario: s.id.to_string(),
                id_param: format!("n={n}"),
                method: "L1Local".into(),
                verdict: String::new(),
                energy_err: None,
                resolvent_err: None,
                semigroup_err: None,
                notes: format!("l1_local_distance={d:e};region=[-1,1]^2"),
            });
        }
        let trend = match report.trend {
            AssumptionTrend::Vanishing => "Vanishing",
            AssumptionTrend::Stalled => "Stalled",
        };
        out.claims.push(ClaimCheck {
            subject: "exponents converge locally in L1".into(),
            claimed: "Vanishing".into(),
            observed: trend.into(),
        });
    }
    Ok(())
}

pub const CSV_HEADER: [&str; 8] = [
    "scenario",
    "id_param",
    "method",
    "verdict",
    "energy_err",
    "resolvent_err",
    "semigroup_err",
    "notes",
];

fn fmt_err(v: Option<f64>) -> String {
    v.map(|x| format!("{x:e}")).unwrap_or_default()
}

/// Writes the rows with the fixed header.
pub fn write_rows(path: &Path, rows: &[ReportRow]) -> Result<()> {
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for r in rows {
        w.write_record([
            r.scenario.as_str(),
            r.id_param.as_str(),
            r.method.as_str(),
            r.verdict.as_str(),
            &fmt_err(r.energy_err),
            &fmt_err(r.resolvent_err),
            &fmt_err(r.semigroup_err),
            r.notes.as_str(),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Plain-text summary: one line per expected verdict plus notes.
pub fn summary_text(outcome: &ScenarioOutcome) -> String {
    let mut s = format!("scenario: {} ({})\n\n", outcome.id, outcome.id.description());
    if outcome.classifications.is_empty() {
        s.push_str("no classifications\n");
    }
    for (param, c) in &outcome.classifications {
        s.push_str(&format!("{param}: {} by {}\n", c.property, c.method));
    }
    if let Some(m) = &outcome.mosco {
        let worst = m.worst_by_index();
        let series: Vec<String> = worst.iter().map(|(n, e)| format!("n={n}: {e:.3e}")).collect();
        s.push_str(&format!(
            "\nresolvent diagnostic: {} (threshold {}, worst relative error per n)\n  {}\n",
            m.verdict,
            m.threshold,
            series.join("\n  ")
        ));
    }
    if !outcome.notes.is_empty() {
        s.push_str("\nnotes:\n");
        for n in &outcome.notes {
            s.push_str(&format!("  - {n}\n"));
        }
    }
    s.push_str("\nexpected verdicts:\n");
    if outcome.claims.is_empty() {
        s.push_str("  (none)\n");
    }
    for c in &outcome.claims {
        let mark = if c.matched() { "match" } else { "MISMATCH" };
        s.push_str(&format!(
            "  {}: expected {}, observed {} -> {mark}\n",
            c.subject, c.claimed, c.observed
        ));
    }
    let status = if outcome.passed() {
        "all expected verdicts reproduced"
    } else {
        "some expected verdicts not reproduced"
    };
    s.push_str(&format!("\nresult: {status}\n"));
    s
}

/// Writes `<id>.csv` and `<id>_summary.txt` under `dir`.
pub fn emit_report(outcome: &ScenarioOutcome, dir: &Path) -> Result<(PathBuf, PathBuf)> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let csv_path = dir.join(format!("{}.csv", outcome.id));
    let txt_path = dir.join(format!("{}_summary.txt", outcome.id));
    write_rows(&csv_path, &outcome.rows)?;
    std::fs::write(&txt_path, summary_text(outcome)).map_err(|e| Error::io(&txt_path, e))?;
    Ok((csv_path, txt_path))
}

/// `--out` wins, then [`OUT_ENV`], then [`DEFAULT_OUT`].
pub fn output_dir(cli: Option<PathBuf>) -> PathBuf {
    cli.or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
}

/// Header line stamped into reports that carry a resolvent diagnostic.
pub fn proxy_note() -> &'static str {
    PROXY_NOTE
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_roundtrip() {
        for id in ScenarioId::ALL {
            assert_eq!(id.as_str().parse::<ScenarioId>().unwrap(), id);
        }
        assert!("prop17".parse::<ScenarioId>().is_err());
    }

    #[test]
    fn config_sections_parse() {
        let text = "[prop16i]\nn = [1, 2]\ngrid_n = 512\n\n[thm42-sweep]\neps = [0.5, 1.5]\n";
        let cfg = parse_config(text, "inline").unwrap();
        assert_eq!(cfg[&ScenarioId::Prop16i].n, Some(vec![1, 2]));
        assert_eq!(cfg[&ScenarioId::Thm42Sweep].eps, Some(vec![0.5, 1.5]));
    }

    #[test]
    fn config_errors_carry_location() {
        let err = parse_config("[prop16i]\nn = [1, 2]\ngrid_m = 5\n", "cfg.toml").unwrap_err();
        let msg = err.to_string();
        assert!(
            msg.contains("cfg.toml") && msg.contains("grid_m") && msg.contains("line 3"),
            "{msg}"
        );
        let err = parse_config("[prop99]\nn = [1]\n", "cfg.toml").unwrap_err();
        assert!(err.to_string().contains("prop99"));
    }

    #[test]
    fn overrides_take_precedence() {
        let cfg = ScenarioConfig {
            grid_n: Some(512),
            ..Default::default()
        };
        let o = Overrides {
            grid_n: Some(1024),
            grid_l: None,
            n_max: Some(8),
        };
        let s = Scenario::new(ScenarioId::Prop16i, &cfg, &o).unwrap();
        assert_eq!(s.grid_n, 1024);
        assert_eq!(s.mosco_n, vec![1, 2, 4, 8]);
        assert_eq!(s.n, vec![1, 2, 4]);
    }

    #[test]
    fn validation_rejects_bad_ranges() {
        let cfg = ScenarioConfig {
            n: Some(vec![1, 2]),
            ..Default::default()
        };
        assert!(Scenario::new(ScenarioId::Prop16ii, &cfg, &Overrides::default()).is_err());
        let cfg = ScenarioConfig {
            grid_n: Some(15),
            ..Default::default()
        };
        assert!(Scenario::new(ScenarioId::Prop16i, &cfg, &Overrides::default()).is_err());
        let cfg = ScenarioConfig {
            n: Some(vec![2, 1]),
            ..Default::default()
        };
        assert!(Scenario::new(ScenarioId::Prop15i, &cfg, &Overrides::default()).is_err());
    }

    #[test]
    fn empty_outcome_writes_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let outcome = ScenarioOutcome::new(ScenarioId::Thm42Sweep);
        let (csv, txt) = emit_report(&outcome, dir.path()).unwrap();
        let text = std::fs::read_to_string(csv).unwrap();
        assert_eq!(text.trim_end(), CSV_HEADER.join(","));
        assert!(std::fs::read_to_string(txt).unwrap().contains("no classifications"));
    }

    #[test]
    fn thm42_sweep_matches() {
        let cfg = ScenarioConfig {
            eps: Some(vec![0.5, 1.0, 1.5]),
            ..Default::default()
        };
        let s = Scenario::new(ScenarioId::Thm42Sweep, &cfg, &Overrides::default()).unwrap();
        let out = run_scenario(&s).unwrap();
        let verdicts: Vec<&str> = out.rows.iter().map(|r| r.verdict.as_str()).collect();
        assert_eq!(verdicts, ["Transient", "Recurrent", "Recurrent"]);
        assert!(out.passed());
    }
}
