//! Strong resolvent and semigroup convergence of grid forms, used as a
//! finite-dimensional witness of Mosco convergence.
//!
//! The grid is a common truncated state space for all forms, so the
//! numbers here say that the discretized operators converge; they do not
//! verify the weak-convergence conditions on `L^2(R)` directly.

use std::fmt;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::forms::{Boundary, Grid1D, GridForm};
use crate::linalg::{norm2, norm_h};
use crate::tolerances::{MOSCO_DECREASE, MOSCO_EXACT_FLOOR, MOSCO_THRESHOLD, RESOLVENT_RESIDUAL, SEMIGROUP_STEPS};

/// Header line attached to every report.
pub const PROXY_NOTE: &str =
    "resolvent/semigroup convergence of grid operators on a truncated window (finite-dimensional proxy)";

#[derive(Debug, Clone, PartialEq)]
pub struct ResolventSolve {
    pub lambda: f64,
    pub input: Vec<f64>,
    pub output: Vec<f64>,
    /// `||(lambda + M) u - f|| / ||f||`.
    pub residual: f64,
    pub iterations: usize,
}

/// Solves `(lambda + M) u = f` and verifies the residual.
pub fn resolvent(form: &GridForm, lambda: f64, f: &[f64]) -> Result<ResolventSolve> {
    let (u, iterations) = form.solve_shifted(lambda, f)?;
    let mu = form.apply(&u)?;
    let r: Vec<f64> = (0..f.len()).map(|i| lambda * u[i] + mu[i] - f[i]).collect();
    let fnorm = norm2(f);
    let residual = if fnorm == 0.0 { norm2(&r) } else { norm2(&r) / fnorm };
    if residual > RESOLVENT_RESIDUAL {
        return Err(Error::Solver { iterations, residual });
    }
    Ok(ResolventSolve {
        lambda,
        input: f.to_vec(),
        output: u,
        residual,
        iterations,
    })
}

/// `(I + (t/m) M)^(-m) f` by implicit Euler.
pub fn semigroup_apply(form: &GridForm, t: f64, f: &[f64], steps: usize) -> Result<Vec<f64>> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::invalid("t", format!("must be positive, got {t}")));
    }
    if steps == 0 {
        return Err(Error::invalid("steps", "need at least one step"));
    }
    let dt = t / steps as f64;
    let mut u = f.to_vec();
    for _ in 0..steps {
        // (I + dt M) v = u  <=>  (1/dt + M) v = u / dt
        let rhs: Vec<f64> = u.iter().map(|v| v / dt).collect();
        u = resolvent(form, 1.0 / dt, &rhs)?.output;
    }
    Ok(u)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestVector {
    pub id: String,
    pub values: Vec<f64>,
}

impl TestVector {
    pub fn sample(id: &str, grid: &Grid1D, f: impl Fn(f64) -> f64) -> Self {
        TestVector {
            id: id.to_string(),
            values: grid.sample(f),
        }
    }
}

pub fn gaussian_bump(x: f64) -> f64 {
    (-x * x).exp()
}

/// Smoothed indicator of `[-1, 1]`.
pub fn smoothed_indicator(x: f64) -> f64 {
    0.5 * ((4.0 * (x + 1.0)).tanh() - (4.0 * (x - 1.0)).tanh())
}

/// `cos^2(pi x / 4)` on `|x| < 2`, zero outside.
pub fn cos_taper(x: f64) -> f64 {
    if x.abs() < 2.0 {
        (std::f64::consts::PI * x / 4.0).cos().powi(2)
    } else {
        0.0
    }
}

/// The three default test vectors; ids match the config file names.
pub fn default_test_vectors(grid: &Grid1D) -> Vec<TestVector> {
    vec![
        TestVector::sample("gauss", grid, gaussian_bump),
        TestVector::sample("indicator", grid, smoothed_indicator),
        TestVector::sample("taper", grid, cos_taper),
    ]
}

/// Looks up a default test vector by id.
pub fn test_vector(id: &str, grid: &Grid1D) -> Result<TestVector> {
    let f: fn(f64) -> f64 = match id {
        "gauss" => gaussian_bump,
        "indicator" => smoothed_indicator,
        "taper" => cos_taper,
        other => return Err(Error::invalid("f_set", format!("unknown test vector `{other}`"))),
    };
    Ok(TestVector::sample(id, grid, f))
}

#[derive(Debug, Clone)]
pub struct DiagnosticConfig {
    pub lambdas: Vec<f64>,
    pub times: Vec<f64>,
    pub vectors: Vec<TestVector>,
    pub threshold: f64,
    pub decrease: f64,
    pub semigroup_steps: usize,
}

impl DiagnosticConfig {
    pub fn new(grid: &Grid1D) -> Self {
        DiagnosticConfig {
            lambdas: vec![1.0],
            times: vec![1.0],
            vectors: default_test_vectors(grid),
            threshold: MOSCO_THRESHOLD,
            decrease: MOSCO_DECREASE,
            semigroup_steps: SEMIGROUP_STEPS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MoscoVerdict {
    ConvergenceObserved,
    Stalled,
}

impl fmt::Display for MoscoVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MoscoVerdict::ConvergenceObserved => "ConvergenceObserved",
            MoscoVerdict::Stalled => "Stalled",
        })
    }
}

/// One `(n, lambda, f)` resolvent record; the semigroup error uses the
/// time with the same list position (or the first time).
#[derive(Debug, Clone, PartialEq)]
pub struct MoscoEntry {
    pub index: u32,
    pub lambda: f64,
    pub time: f64,
    pub f_id: String,
    /// `|E^n(f, f) - E(f, f)|`
    pub energy_error: f64,
    /// `||G^n f - G f||_h / ||G f||_h`
    pub resolvent_error: f64,
    /// `||P^n_t f - P_t f||_h / ||P_t f||_h`
    pub semigroup_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub scenario: String,
    pub entries: Vec<MoscoEntry>,
    pub verdict: MoscoVerdict,
    pub threshold: f64,
    pub notes: Vec<String>,
}

impl ConvergenceReport {
    /// Largest resolvent error over `(lambda, f)` at each index, in index order.
    pub fn worst_by_index(&self) -> Vec<(u32, f64)> {
        let mut out: Vec<(u32, f64)> = Vec::new();
        for e in &self.entries {
            match out.iter_mut().find(|(n, _)| *n == e.index) {
                Some(slot) => slot.1 = slot.1.max(e.resolvent_error),
                None => out.push((e.index, e.resolvent_error)),
            }
        }
        out.sort_by_key(|p| p.0);
        out
    }

    /// Resolvent errors for one `(lambda, f)` pair in index order.
    pub fn series(&self, lambda: f64, f_id: &str) -> Vec<(u32, f64)> {
        let mut out: Vec<(u32, f64)> = self
            .entries
            .iter()
            .filter(|e| e.lambda == lambda && e.f_id == f_id)
            .map(|e| (e.index, e.resolvent_error))
            .collect();
        out.sort_by_key(|p| p.0);
        out
    }
}

fn relative(a: &[f64], b: &[f64], h: f64) -> f64 {
    let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let scale = norm_h(b, h);
    if scale == 0.0 {
        norm_h(&diff, h)
    } else {
        norm_h(&diff, h) / scale
    }
}

/// Compares each family member with the limit form on shared test data.
pub fn mosco_diagnostic(
    scenario: &str,
    family: &[(u32, GridForm)],
    limit: &GridForm,
    config: &DiagnosticConfig,
) -> Result<ConvergenceReport> {
    if family.is_empty() || config.lambdas.is_empty() || config.vectors.is_empty() || config.times.is_empty() {
        return Err(Error::invalid(
            "diagnostic",
            "family, lambdas, times and vectors must be non-empty",
        ));
    }
    if let Some(bad) = config.lambdas.iter().chain(&config.times).find(|v| !(**v > 0.0)) {
        return Err(Error::invalid(
            "diagnostic",
            format!("lambdas and times must be positive, got {bad}"),
        ));
    }
    for (n, form) in family {
        if form.grid() != limit.grid() {
            return Err(Error::GridMismatch(format!("member n = {n} lives on a different grid")));
        }
    }
    let grid = *limit.grid();
    let h = grid.spacing();
    let steps = config.semigroup_steps;

    // (lambda, time, vector) triples shared by all indices
    let mut cases = Vec::new();
    for (li, &lambda) in config.lambdas.iter().enumerate() {
        let time = config.times.get(li).copied().unwrap_or(config.times[0]);
        for v in &config.vectors {
            grid.check_vector(&v.values)?;
            cases.push((lambda, time, v));
        }
    }
    let reference: Vec<(f64, Vec<f64>, Vec<f64>)> = cases
        .par_iter()
        .map(|(lambda, time, v)| {
            Ok((
                limit.energy(&v.values)?,
                resolvent(limit, *lambda, &v.values)?.output,
                semigroup_apply(limit, *time, &v.values, steps)?,
            ))
        })
        .collect::<Result<_>>()?;

    let jobs: Vec<(usize, usize)> = (0..family.len())
        .flat_map(|i| (0..cases.len()).map(move |c| (i, c)))
        .collect();
    let entries: Vec<MoscoEntry> = jobs
        .par_iter()
        .map(|&(i, c)| {
            let (n, form) = &family[i];
            let (lambda, time, v) = cases[c];
            let (e_ref, g_ref, p_ref) = &reference[c];
            let energy = form.energy(&v.values)?;
            let g = resolvent(form, lambda, &v.values)?.output;
            let p = semigroup_apply(form, time, &v.values, steps)?;
            Ok(MoscoEntry {
                index: *n,
                lambda,
                time,
                f_id: v.id.clone(),
                energy_error: (energy - e_ref).abs(),
                resolvent_error: relative(&g, g_ref, h),
                semigroup_error: relative(&p, p_ref, h),
            })
        })
        .collect::<Result<_>>()?;

    let mut report = ConvergenceReport {
        scenario: scenario.to_string(),
        entries,
        verdict: MoscoVerdict::Stalled,
        threshold: config.threshold,
        notes: vec![PROXY_NOTE.to_string()],
    };
    let worst = report.worst_by_index();
    let first = worst.first().expect("non-empty").1;
    let last = worst.last().expect("non-empty").1;
    let decreased = last <= first / config.decrease || last <= MOSCO_EXACT_FLOOR;
    if last < config.threshold && decreased {
        report.verdict = MoscoVerdict::ConvergenceObserved;
    }
    Ok(report)
}

/// Relative change of `G_lambda f` on the original window when the window
/// is doubled at fixed spacing; large values flag truncation-dominated
/// errors.
pub fn window_sensitivity<B>(build: B, grid: Grid1D, lambda: f64, f: impl Fn(f64) -> f64) -> Result<f64>
where
    B: Fn(Grid1D) -> Result<GridForm>,
{
    if !grid.len().is_multiple_of(2) {
        return Err(Error::invalid("N", "window doubling needs an even point count"));
    }
    let wide = Grid1D::new(2.0 * grid.half_width(), 2 * grid.len(), grid.boundary())?;
    let u = resolvent(&build(grid)?, lambda, &grid.sample(&f))?.output;
    let w = resolvent(&build(wide)?, lambda, &wide.sample(&f))?.output;
    let shift = grid.len() / 2;
    let restricted = &w[shift..shift + grid.len()];
    Ok(relative(&u, restricted, grid.spacing()))
}

/// Writes `scenario,n,lambda,f_id,energy_err,resolvent_err,semigroup_err`.
pub fn write_report_csv(path: &Path, report: &ConvergenceReport) -> Result<()> {
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record([
        "scenario",
        "n",
        "lambda",
        "f_id",
        "energy_err",
        "resolvent_err",
        "semigroup_err",
    ])
    .map_err(csv_err)?;
    for e in &report.entries {
        w.write_record([
            report.scenario.clone(),
            e.index.to_string(),
            e.lambda.to_string(),
            e.f_id.clone(),
            format!("{:e}", e.energy_error),
            format!("{:e}", e.resolvent_error),
            format!("{:e}", e.semigroup_error),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Periodic grid with the default window used by the scenarios.
pub fn default_grid(points: usize) -> Result<Grid1D> {
    Grid1D::new(20.0, points, Boundary::Periodic)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::{sine_perturbed_unit, DiffusionCoefficient};
    use crate::forms::{assemble_diffusion, multiplier_from_symbol, zero_form};

    fn grid() -> Grid1D {
        Grid1D::new(10.0, 512, Boundary::Periodic).unwrap()
    }

    #[test]
    fn zero_form_resolvent_is_identity_over_lambda() {
        let g = grid();
        let f = g.sample(gaussian_bump);
        let s = resolvent(&zero_form(g), 1.0, &f).unwrap();
        assert_eq!(s.output, f);
    }

    #[test]
    fn constants_are_fixed_points() {
        let g = grid();
        let form = assemble_diffusion(&DiffusionCoefficient::scalar("v", |x| 1.0 + 0.5 * x.cos()), g).unwrap();
        let ones = vec![1.0; g.len()];
        let u = resolvent(&form, 2.0, &ones).unwrap().output;
        assert!(u.iter().all(|v| (v - 0.5).abs() < 1e-12));
        let p = semigroup_apply(&form, 1.0, &ones, 8).unwrap();
        assert!(p.iter().all(|v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn small_time_is_continuous() {
        let g = grid();
        let form = assemble_diffusion(&DiffusionCoefficient::scalar("1", |_| 1.0), g).unwrap();
        let f = g.sample(gaussian_bump);
        let p = semigroup_apply(&form, 1e-8, &f, 1).unwrap();
        assert!(p.iter().zip(&f).all(|(a, b)| (a - b).abs() < 1e-6));
    }

    #[test]
    fn heat_flow_spreads_mass() {
        let g = grid();
        let form = assemble_diffusion(&DiffusionCoefficient::scalar("1", |_| 1.0), g).unwrap();
        let f = g.sample(gaussian_bump);
        let p = semigroup_apply(&form, 1.0, &f, SEMIGROUP_STEPS).unwrap();
        let var = |u: &[f64]| {
            let m: f64 = u.iter().sum();
            g.nodes().iter().zip(u).map(|(x, v)| x * x * v).sum::<f64>() / m
        };
        assert!(var(&p) > var(&f));
    }

    #[test]
    fn repeated_limit_gives_zero_errors() {
        let g = grid();
        let limit = multiplier_from_symbol((0..g.len()).map(|k| g.frequency(k).abs()).collect(), g);
        let family = vec![(1, limit.clone()), (2, limit.clone())];
        let r = mosco_diagnostic("same", &family, &limit, &DiagnosticConfig::new(&g)).unwrap();
        assert!(r
            .entries
            .iter()
            .all(|e| e.resolvent_error == 0.0 && e.energy_error == 0.0));
        assert_eq!(r.verdict, MoscoVerdict::ConvergenceObserved);
    }

    #[test]
    fn grid_mismatch_is_rejected() {
        let g = grid();
        let other = Grid1D::new(10.0, 256, Boundary::Periodic).unwrap();
        let limit = zero_form(g);
        let family = vec![(1, zero_form(other))];
        let err = mosco_diagnostic("x", &family, &limit, &DiagnosticConfig::new(&g)).unwrap_err();
        assert!(matches!(err, Error::GridMismatch(_)));
    }

    #[test]
    fn sine_perturbed_diffusions_converge() {
        let g = Grid1D::new(20.0, 1024, Boundary::Killing).unwrap();
        let limit = assemble_diffusion(&sine_perturbed_unit(None).unwrap(), g).unwrap();
        let family: Vec<(u32, GridForm)> = [2, 4, 8, 16, 32, 64]
            .iter()
            .map(|&n| {
                (
                    n,
                    assemble_diffusion(&sine_perturbed_unit(Some(n)).unwrap(), g).unwrap(),
                )
            })
            .collect();
        let r = mosco_diagnostic("sine", &family, &limit, &DiagnosticConfig::new(&g)).unwrap();
        assert_eq!(r.verdict, MoscoVerdict::ConvergenceObserved, "{:?}", r.worst_by_index());
    }

    #[test]
    fn csv_roundtrip() {
        let g = grid();
        let limit = zero_form(g);
        let r = mosco_diagnostic("z", &[(1, zero_form(g))], &limit, &DiagnosticConfig::new(&g)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.csv");
        write_report_csv(&p, &r).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert_eq!(text.lines().count(), 1 + 3);
        assert!(text.starts_with("scenario,n,lambda,f_id,energy_err,resolvent_err,semigroup_err"));
    }
}
