//! Recurrence/transience and conservativeness/explosion verdicts built on
//! an improper-integral regime classifier.
//!
//! [`classify_tail`] reads the local log-log slope of the integrand on a
//! window of geometric checkpoints far out towards the improper end. A
//! slope that sits in the band around -1 triggers the logarithmic
//! substitution `u = e^s` (or `u = e^-s` at zero), which turns
//! `1/(u log u)` into `1/s` and exposes the next logarithmic scale.

use std::fmt;
use std::path::Path;

use crate::coeffs::{make_sharp_log_order, DiffusionCoefficient, OrderFunction};
use crate::error::{Error, Result};
use crate::levy::{power_tail_to_infinity, power_tail_to_zero, LevyExponent};
use crate::quad::gk15;
use crate::tolerances::{
    CHUNG_FUCHS_RADIUS, EXPONENT_MAX_PANELS, EXPONENT_REL_TOL, TAIL_BAND, TAIL_FAR_INFINITY, TAIL_MAX_DEPTH,
    TAIL_NEAR_ZERO, TAIL_WINDOW, U04_R_MAX, U04_SLACK, U04_TRAILING,
};

/// Checkpoint ratio at level 0.
const LEVEL0_RATIO: f64 = 2.0;
/// Checkpoint ratio after a substitution; the logarithmic variable has
/// less room, so the window is kept close to the far end.
const DEEP_RATIO: f64 = std::f64::consts::SQRT_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Convergence {
    Convergent,
    Divergent,
    Inconclusive,
}

impl fmt::Display for Convergence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Convergence::Convergent => "Convergent",
            Convergence::Divergent => "Divergent",
            Convergence::Inconclusive => "Inconclusive",
        })
    }
}

/// The improper end of an integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailDomain {
    /// `int_{R0}^inf`
    AtInfinity(f64),
    /// `int_0^r`
    AtZero(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TailVerdict {
    pub verdict: Convergence,
    /// Number of substitutions applied.
    pub depth: usize,
    /// `(cutoff, partial integral)` over the last fitted window, in the
    /// variable of the deepest level. Partials grow as the cutoff moves
    /// towards the improper end.
    pub partials: Vec<(f64, f64)>,
    /// Fitted exponent (in the "at infinity" convention) per level.
    pub fitted_exponents: Vec<f64>,
}

impl TailVerdict {
    pub fn last_partial(&self) -> Option<f64> {
        self.partials.last().map(|p| p.1)
    }
}

type Integrand<'a> = Box<dyn Fn(f64) -> Result<f64> + Sync + 'a>;

/// Classifies convergence of `int g` at the improper end of `domain`.
pub fn classify_tail<G>(g: G, domain: TailDomain, max_depth: usize) -> Result<TailVerdict>
where
    G: Fn(f64) -> Result<f64> + Sync,
{
    if max_depth < 1 {
        return Err(Error::invalid("max_depth", "must be at least 1"));
    }
    let mut exps = Vec::new();
    let (verdict, depth, partials) = match domain {
        TailDomain::AtInfinity(start) => {
            if !(start > 0.0 && start.is_finite()) {
                return Err(Error::invalid("R0", format!("must be positive, got {start}")));
            }
            let far = TAIL_FAR_INFINITY.max(start * 1e3);
            infinity_level(Box::new(g), start, far, LEVEL0_RATIO, 0, max_depth, &mut exps)?
        }
        TailDomain::AtZero(r) => {
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::invalid("r", format!("must be positive, got {r}")));
            }
            zero_level(Box::new(g), r, max_depth, &mut exps)?
        }
    };
    Ok(TailVerdict {
        verdict,
        depth,
        partials,
        fitted_exponents: exps,
    })
}

struct Window {
    points: Vec<f64>,
    values: Vec<f64>,
}

/// Geometric checkpoints ending at `far` (or starting at `start` when the
/// window would cross it); shrinks towards `start` while values are not
/// normal floats.
fn find_window(h: &Integrand<'_>, start: f64, mut far: f64, ratio: f64, towards_zero: bool) -> Result<Window> {
    // squeeze the ratio when the whole range is shorter than one window
    let room = if towards_zero { start / far } else { far / start };
    let ratio = ratio.min(room.powf(1.0 / (TAIL_WINDOW - 1) as f64));
    if !(ratio > 1.0 + 1e-3) {
        return Err(Error::Precondition(format!(
            "no room for a checkpoint window between {start:e} and {far:e}"
        )));
    }
    let span = ratio.powi(TAIL_WINDOW as i32 - 1);
    for _ in 0..400 {
        // `far` is the checkpoint nearest to the improper end
        let points: Vec<f64> = if towards_zero {
            let near = far.min(start / span);
            (0..TAIL_WINDOW)
                .map(|j| start.min(near * ratio.powi(j as i32)))
                .collect()
        } else {
            let top = far.max(start * span);
            (0..TAIL_WINDOW)
                .map(|j| top / ratio.powi((TAIL_WINDOW - 1 - j) as i32))
                .collect()
        };
        let mut values = Vec::with_capacity(points.len());
        let mut normal = true;
        for &u in &points {
            let v = h(u)?;
            if v.is_nan() || v < 0.0 {
                return Err(Error::NonFinite {
                    context: "tail integrand",
                    location: format!("u = {u:e}"),
                    value: v,
                });
            }
            normal &= v.is_normal();
            values.push(v);
        }
        if normal {
            return Ok(Window { points, values });
        }
        // pull the window one span back towards the finite end
        if towards_zero {
            if far * span >= start / span {
                break;
            }
            far *= span;
        } else {
            if far / span <= start * span {
                break;
            }
            far /= span;
        }
    }
    Err(Error::Precondition(
        "tail integrand is not a normal positive float anywhere in the checkpoint range".into(),
    ))
}

/// Least-squares slope of `ln y` against `ln x`, and consecutive slopes.
fn log_slopes(x: &[f64], y: &[f64]) -> (f64, Vec<f64>) {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    let local = lx
        .windows(2)
        .zip(ly.windows(2))
        .map(|(a, b)| (b[1] - b[0]) / (a[1] - a[0]))
        .collect();
    (sxy / sxx, local)
}

enum Decision {
    Done(Convergence),
    Recurse,
}

/// Decision rule in the "at infinity" convention (convergent iff `p < -1`).
fn decide(fit: f64, local: &[f64]) -> Decision {
    if local.iter().all(|&p| p < -1.0 - TAIL_BAND) {
        Decision::Done(Convergence::Convergent)
    } else if local.iter().all(|&p| p > -1.0 + TAIL_BAND) {
        Decision::Done(Convergence::Divergent)
    } else if (fit + 1.0).abs() <= TAIL_BAND {
        Decision::Recurse
    } else {
        // the exponent drifts across the band inside the window
        Decision::Done(Convergence::Inconclusive)
    }
}

/// Partial integrals between checkpoints by one 7/15 panel per interval in
/// the logarithmic variable, accumulated from the finite end.
fn window_partials(h: &Integrand<'_>, points: &[f64], towards_zero: bool) -> Result<Vec<(f64, f64)>> {
    let err = std::cell::RefCell::new(None);
    let f = |s: f64| match h(s.exp()) {
        Ok(v) => v * s.exp(),
        Err(e) => {
            err.borrow_mut().get_or_insert(e.to_string());
            f64::NAN
        }
    };
    let mut ordered: Vec<f64> = points.to_vec();
    if towards_zero {
        ordered.reverse();
    }
    let mut out = vec![(ordered[0], 0.0)];
    let mut acc = 0.0;
    for w in ordered.windows(2) {
        let (a, b) = (w[0].ln().min(w[1].ln()), w[0].ln().max(w[1].ln()));
        acc += gk15(&f, a, b).value;
        out.push((w[1], acc));
    }
    if let Some(msg) = err.into_inner() {
        return Err(Error::Precondition(format!("tail partials: {msg}")));
    }
    Ok(out)
}

type LevelOutcome = (Convergence, usize, Vec<(f64, f64)>);

fn infinity_level(
    h: Integrand<'_>,
    start: f64,
    far: f64,
    ratio: f64,
    depth: usize,
    max_depth: usize,
    exps: &mut Vec<f64>,
) -> Result<LevelOutcome> {
    let window = find_window(&h, start, far, ratio, false)?;
    let (fit, local) = log_slopes(&window.points, &window.values);
    exps.push(fit);
    let partials = window_partials(&h, &window.points, false)?;
    match decide(fit, &local) {
        Decision::Done(Convergence::Inconclusive) => Ok((Convergence::Inconclusive, max_depth, partials)),
        Decision::Done(v) => Ok((v, depth, partials)),
        Decision::Recurse if depth >= max_depth => Ok((Convergence::Inconclusive, max_depth, partials)),
        Decision::Recurse => {
            let used_far = *window.points.last().expect("window is non-empty");
            let next: Integrand<'_> = Box::new(move |s: f64| Ok(h(s.exp())? * s.exp()));
            infinity_level(
                next,
                start.ln().max(1e-3),
                used_far.ln(),
                DEEP_RATIO,
                depth + 1,
                max_depth,
                exps,
            )
        }
    }
}

fn zero_level(h: Integrand<'_>, r: f64, max_depth: usize, exps: &mut Vec<f64>) -> Result<LevelOutcome> {
    let window = find_window(&h, r, TAIL_NEAR_ZERO.min(r * 1e-3), LEVEL0_RATIO, true)?;
    let (fit, local) = log_slopes(&window.points, &window.values);
    // v = 1/u maps the end at zero to infinity with exponent -q - 2
    let fit = -fit - 2.0;
    let local: Vec<f64> = local.iter().map(|q| -q - 2.0).collect();
    exps.push(fit);
    let partials = window_partials(&h, &window.points, true)?;
    match decide(fit, &local) {
        Decision::Done(Convergence::Inconclusive) => Ok((Convergence::Inconclusive, max_depth, partials)),
        Decision::Done(v) => Ok((v, 0, partials)),
        Decision::Recurse if max_depth == 0 => Ok((Convergence::Inconclusive, max_depth, partials)),
        Decision::Recurse => {
            let used_near = window.points[0];
            let start = (-r.ln()).max(1.0);
            let next: Integrand<'_> = Box::new(move |s: f64| Ok(h((-s).exp())? * (-s).exp()));
            infinity_level(next, start, -used_near.ln(), DEEP_RATIO, 1, max_depth, exps)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathProperty {
    Recurrent,
    Transient,
    Conservative,
    Explosive,
    Indeterminate,
}

impl fmt::Display for PathProperty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PathProperty::Recurrent => "Recurrent",
            PathProperty::Transient => "Transient",
            PathProperty::Conservative => "Conservative",
            PathProperty::Explosive => "Explosive",
            PathProperty::Indeterminate => "Indeterminate",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ChungFuchs,
    U04Criterion,
    SharpEpsilon,
    FellerTest,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::ChungFuchs => "ChungFuchs",
            Method::U04Criterion => "U04Criterion",
            Method::SharpEpsilon => "SharpEpsilon",
            Method::FellerTest => "FellerTest",
        })
    }
}

/// Checkpoint values of the two bounded-quantity tests for recurrence.
#[derive(Debug, Clone, PartialEq)]
pub struct U04Evidence {
    pub radii: Vec<f64>,
    /// `R^(d-2) int_0^R u^(1-alpha(u)) du`
    pub near: Vec<f64>,
    /// `R^d int_R^inf u^(-1-alpha(u)) du`
    pub far: Vec<f64>,
    pub near_bounded: bool,
    pub far_bounded: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathClassification {
    pub property: PathProperty,
    pub method: Method,
    pub evidence: Vec<TailVerdict>,
    pub u04: Option<U04Evidence>,
}

impl PathClassification {
    fn new(property: PathProperty, method: Method, evidence: Vec<TailVerdict>) -> Self {
        debug_assert!(match property {
            PathProperty::Recurrent | PathProperty::Transient => method != Method::FellerTest,
            PathProperty::Conservative | PathProperty::Explosive => method == Method::FellerTest,
            PathProperty::Indeterminate => true,
        });
        PathClassification {
            property,
            method,
            evidence,
            u04: None,
        }
    }
}

/// "limsup bounded": over the trailing checkpoints the sequence is
/// non-increasing, or never exceeds the value at the start of the trailing
/// window by more than the slack.
fn looks_bounded(values: &[f64]) -> bool {
    let tail = &values[values.len().saturating_sub(U04_TRAILING)..];
    let decreasing = tail.windows(2).all(|w| w[1] <= w[0]);
    let reference = tail[0].max(
        values[..values.len() - tail.len() + 1]
            .iter()
            .cloned()
            .fold(0.0, f64::max),
    );
    decreasing || tail.iter().all(|&v| v <= reference * (1.0 + U04_SLACK))
}

/// Sufficient recurrence test from the two growth quantities; never
/// returns `Transient`.
pub fn classify_recurrence_u04(alpha: &OrderFunction, d: usize) -> Result<PathClassification> {
    if d == 0 {
        return Err(Error::invalid("d", "dimension must be positive"));
    }
    let rel = EXPONENT_REL_TOL;
    let near_f = |u: f64| u.powf(1.0 - alpha.eval(u));
    let far_f = |u: f64| u.powf(-1.0 - alpha.eval(u));
    let mut inner = power_tail_to_zero(&near_f, 1.0, rel, EXPONENT_MAX_PANELS, "growth test near part")?.value;
    let mut radii = Vec::new();
    let mut near = Vec::new();
    let mut far = Vec::new();
    let mut r = 1.0f64;
    let df = d as f64;
    while r <= U04_R_MAX {
        if r > 1.0 {
            let seg = crate::quad::integrate(&near_f, r / 2.0, r, crate::quad::Tolerance::rel(rel), 400)?;
            inner += seg.value;
        }
        let outer = power_tail_to_infinity(&far_f, r, rel, EXPONENT_MAX_PANELS, "growth test far part")?.value;
        radii.push(r);
        near.push(r.powf(df - 2.0) * inner);
        far.push(r.powf(df) * outer);
        r *= 2.0;
    }
    let near_bounded = looks_bounded(&near);
    let far_bounded = looks_bounded(&far);
    let property = if near_bounded && far_bounded {
        PathProperty::Recurrent
    } else {
        PathProperty::Indeterminate
    };
    let mut c = PathClassification::new(property, Method::U04Criterion, Vec::new());
    c.u04 = Some(U04Evidence {
        radii,
        near,
        far,
        near_bounded,
        far_bounded,
    });
    Ok(c)
}

/// Chung-Fuchs test: recurrent iff `int_{|xi|<r} dxi / phi(xi)` diverges.
/// The integral is taken in polar form, `r^(d-1) / phi(r e_1)`.
pub fn classify_chung_fuchs(e: &LevyExponent) -> Result<PathClassification> {
    let d = e.dim();
    let g = |r: f64| -> Result<f64> {
        let mut xi = vec![0.0; d];
        xi[0] = r;
        let phi = e.eval(&xi)?.value;
        if !(phi > 0.0) {
            return Err(Error::Precondition(format!("phi({r:e}) = {phi} is not positive")));
        }
        Ok(r.powi(d as i32 - 1) / phi)
    };
    let tail = classify_tail(g, TailDomain::AtZero(CHUNG_FUCHS_RADIUS), TAIL_MAX_DEPTH)?;
    let property = match tail.verdict {
        Convergence::Divergent => PathProperty::Recurrent,
        Convergence::Convergent => PathProperty::Transient,
        Convergence::Inconclusive => PathProperty::Indeterminate,
    };
    Ok(PathClassification::new(property, Method::ChungFuchs, vec![tail]))
}

/// Verdict for the order `1 - (log(u + e^2))^(-eps)` in `d = 1`:
/// recurrent iff `eps >= 1`. The Chung-Fuchs tail is attached as evidence.
pub fn classify_sharp_epsilon(eps: f64) -> Result<PathClassification> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::invalid("eps", format!("must be positive, got {eps}")));
    }
    let e = LevyExponent::jump(1, make_sharp_log_order(eps, 1.0, 2.0)?)?;
    let corroboration = classify_chung_fuchs(&e)?;
    let property = if eps >= 1.0 {
        PathProperty::Recurrent
    } else {
        PathProperty::Transient
    };
    Ok(PathClassification::new(
        property,
        Method::SharpEpsilon,
        corroboration.evidence,
    ))
}

/// Property read off the attached Chung-Fuchs evidence of a sharp-epsilon
/// classification.
pub fn corroborating_property(c: &PathClassification) -> PathProperty {
    match c.evidence.first().map(|t| t.verdict) {
        Some(Convergence::Divergent) => PathProperty::Recurrent,
        Some(Convergence::Convergent) => PathProperty::Transient,
        _ => PathProperty::Indeterminate,
    }
}

/// Feller's test for `(a u')'` on the line with natural scale `1/a` and
/// Lebesgue speed: explosion iff `int^inf y / a(y) dy` converges at either
/// end. Evidence lists the `+inf` end first.
pub fn feller_explosion_test(a: &DiffusionCoefficient) -> Result<PathClassification> {
    if a.dim() != 1 {
        return Err(Error::Precondition(format!("Feller test needs d = 1, got {}", a.dim())));
    }
    let mut evidence = Vec::with_capacity(2);
    for sign in [1.0, -1.0] {
        let g = |y: f64| -> Result<f64> {
            let v = a.scalar_at(sign * y);
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Precondition(format!("a({}) = {v} is not positive", sign * y)));
            }
            Ok(y / v)
        };
        evidence.push(classify_tail(g, TailDomain::AtInfinity(1.0), TAIL_MAX_DEPTH)?);
    }
    let verdicts: Vec<Convergence> = evidence.iter().map(|t| t.verdict).collect();
    let property = if verdicts.contains(&Convergence::Convergent) {
        PathProperty::Explosive
    } else if verdicts.iter().all(|v| *v == Convergence::Divergent) {
        PathProperty::Conservative
    } else {
        PathProperty::Indeterminate
    };
    Ok(PathClassification::new(property, Method::FellerTest, evidence))
}

/// One CSV row of the verdict table.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationRow {
    pub scenario: String,
    pub param: String,
    pub classification: PathClassification,
}

/// Writes `scenario,n_or_eps,method,verdict,depth,last_partial`.
pub fn write_classification_csv(path: &Path, rows: &[ClassificationRow]) -> Result<()> {
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(["scenario", "n_or_eps", "method", "verdict", "depth", "last_partial"])
        .map_err(csv_err)?;
    for row in rows {
        let c = &row.classification;
        let first = c.evidence.first();
        w.write_record([
            row.scenario.clone(),
            row.param.clone(),
            c.method.to_string(),
            c.property.to_string(),
            first.map_or(String::new(), |t| t.depth.to_string()),
            first
                .and_then(TailVerdict::last_partial)
                .map_or(String::new(), |v| format!("{v:e}")),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::{make_prop15_coefficient, recurrent_to_transient_order, Prop15Variant};

    fn at_inf(g: impl Fn(f64) -> f64 + Sync) -> TailVerdict {
        classify_tail(|u| Ok(g(u)), TailDomain::AtInfinity(1.0), TAIL_MAX_DEPTH).unwrap()
    }

    #[test]
    fn pure_powers_resolve_at_level_zero() {
        for p in [-3.0, -2.0, -1.5, -1.2] {
            let t = at_inf(move |u: f64| u.powf(p));
            assert_eq!((t.verdict, t.depth), (Convergence::Convergent, 0), "p={p}");
        }
        for p in [-0.8, -0.5, 0.0] {
            let t = at_inf(move |u: f64| u.powf(p));
            assert_eq!((t.verdict, t.depth), (Convergence::Divergent, 0), "p={p}");
        }
    }

    #[test]
    fn log_borderline_pair() {
        let e2 = std::f64::consts::E.powi(2);
        let div = classify_tail(|u| Ok(1.0 / (u * u.ln())), TailDomain::AtInfinity(e2), 3).unwrap();
        assert_eq!(div.verdict, Convergence::Divergent);
        // level 1 sees 1/s, exactly on the band centre, so one more level is needed
        assert_eq!(div.depth, 2);
        let conv = classify_tail(|u| Ok(1.0 / (u * u.ln().powi(2))), TailDomain::AtInfinity(e2), 3).unwrap();
        assert_eq!((conv.verdict, conv.depth), (Convergence::Convergent, 1));
        let stuck = classify_tail(|u| Ok(1.0 / (u * u.ln())), TailDomain::AtInfinity(e2), 1).unwrap();
        assert_eq!((stuck.verdict, stuck.depth), (Convergence::Inconclusive, 1));
    }

    #[test]
    fn zero_end_powers() {
        let t = classify_tail(|u: f64| Ok(u.powf(-0.5)), TailDomain::AtZero(1.0), 3).unwrap();
        assert_eq!(t.verdict, Convergence::Convergent);
        let t = classify_tail(|u: f64| Ok(u.powf(-1.5)), TailDomain::AtZero(1.0), 3).unwrap();
        assert_eq!(t.verdict, Convergence::Divergent);
        let t = classify_tail(|u: f64| Ok(1.0 / (u * (-u.ln()).powi(2))), TailDomain::AtZero(0.5), 3).unwrap();
        assert_eq!((t.verdict, t.depth), (Convergence::Convergent, 1));
    }

    #[test]
    fn partials_increase() {
        let t = at_inf(|u: f64| u.powf(-0.5));
        assert!(t.partials.windows(2).all(|w| w[1].1 > w[0].1));
        let t = classify_tail(|u: f64| Ok(u.powf(-0.5)), TailDomain::AtZero(1.0), 3).unwrap();
        assert!(t.partials.windows(2).all(|w| w[1].1 > w[0].1 && w[1].0 < w[0].0));
    }

    #[test]
    fn nan_is_reported() {
        let err = classify_tail(|_| Ok(f64::NAN), TailDomain::AtInfinity(1.0), 3).unwrap_err();
        assert!(matches!(err, Error::NonFinite { .. }));
        assert!(classify_tail(|u: f64| Ok(u), TailDomain::AtInfinity(1.0), 0).is_err());
    }

    #[test]
    fn feller_verdicts() {
        let expl = make_prop15_coefficient(Prop15Variant::ExplosiveFamily(1)).unwrap();
        assert_eq!(feller_explosion_test(&expl).unwrap().property, PathProperty::Explosive);
        let cons = make_prop15_coefficient(Prop15Variant::ConservativeLimit).unwrap();
        assert_eq!(
            feller_explosion_test(&cons).unwrap().property,
            PathProperty::Conservative
        );
        let bm = DiffusionCoefficient::scalar("1", |_| 1.0);
        assert_eq!(feller_explosion_test(&bm).unwrap().property, PathProperty::Conservative);
    }

    #[test]
    fn u04_examples() {
        let c = classify_recurrence_u04(&OrderFunction::constant(1.5).unwrap(), 1).unwrap();
        assert_eq!(c.property, PathProperty::Recurrent);
        let c = classify_recurrence_u04(&recurrent_to_transient_order(Some(3)).unwrap(), 1).unwrap();
        assert_eq!(c.property, PathProperty::Recurrent);
        let c = classify_recurrence_u04(&OrderFunction::constant(0.5).unwrap(), 1).unwrap();
        assert_eq!(c.property, PathProperty::Indeterminate);
        assert!(!c.u04.unwrap().near_bounded);
    }

    #[test]
    fn chung_fuchs_constant_orders() {
        for (a, want) in [
            (0.5, PathProperty::Transient),
            (1.0, PathProperty::Recurrent),
            (1.5, PathProperty::Recurrent),
        ] {
            let e = LevyExponent::stable(1, a).unwrap();
            assert_eq!(classify_chung_fuchs(&e).unwrap().property, want, "alpha={a}");
        }
    }

    #[test]
    fn csv_header_only_when_empty() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.csv");
        write_classification_csv(&p, &[]).unwrap();
        assert_eq!(
            std::fs::read_to_string(&p).unwrap(),
            "scenario,n_or_eps,method,verdict,depth,last_partial\n"
        );
    }
}
