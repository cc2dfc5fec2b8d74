//! Sampled property suites run by `check-invariants` and the acceptance
//! tests.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::classify::{classify_tail, Convergence, TailDomain};
use crate::coeffs::{
    lookup_family, recurrent_to_transient_order, sine_perturbed_unit, Coefficient, FamilyId, OrderFunction, ParamMap,
};
use crate::error::{Error, Result};
use crate::forms::{assemble_diffusion, assemble_jump, assemble_multiplier, Boundary, Grid1D, GridForm};
use crate::levy::LevyExponent;
use crate::linalg::{dot, norm_h};
use crate::mosco::{gaussian_bump, resolvent, semigroup_apply, smoothed_indicator};
use crate::quad::gauss_legendre;
use crate::tolerances::{POSITIVITY_FLOOR, PSD_FLOOR, RANDOM_VECTOR_SAMPLES, TAIL_MAX_DEPTH};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub suite: String,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mark = if self.passed { "pass" } else { "FAIL" };
        write!(f, "[{mark}] {}: {} ({})", self.suite, self.name, self.detail)
    }
}

fn check(suite: &str, name: &str, passed: bool, detail: String) -> Check {
    Check {
        suite: suite.to_string(),
        name: name.to_string(),
        passed,
        detail,
    }
}

fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

/// Symmetry, positive semidefiniteness and (for matrix forms) the Markov
/// sign structure. Multiplier forms skip the sign checks: a truncated
/// spectral operator has oscillating off-diagonal entries.
pub fn form_checks(label: &str, form: &GridForm, seed: u64) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = form.grid().len();
    let mut sym_worst = 0.0f64;
    let mut psd_worst = f64::INFINITY;
    for _ in 0..RANDOM_VECTOR_SAMPLES {
        let u = random_vector(&mut rng, n);
        let v = random_vector(&mut rng, n);
        let uv = dot(&u, &form.apply(&v)?);
        let vu = dot(&v, &form.apply(&u)?);
        sym_worst = sym_worst.max((uv - vu).abs() / (uv.abs() + vu.abs()).max(1e-300));
        let q = dot(&u, &form.apply(&u)?) / dot(&u, &u);
        psd_worst = psd_worst.min(q);
    }
    let mut out = vec![
        check(
            label,
            "symmetry",
            sym_worst <= 1e-10,
            format!("max relative asymmetry {sym_worst:.2e}"),
        ),
        check(
            label,
            "positive semidefinite",
            psd_worst >= PSD_FLOOR,
            format!("min Rayleigh quotient {psd_worst:.3e}"),
        ),
    ];
    if form.is_multiplier() {
        return Ok(out);
    }
    let diag = form.diagonal();
    let scale = diag.iter().cloned().fold(0.0, f64::max);
    let mut max_off = f64::NEG_INFINITY;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                max_off = max_off.max(form.entry(i, j));
            }
        }
    }
    out.push(check(
        label,
        "off-diagonal entries nonpositive",
        max_off <= 1e-12 * scale,
        format!("largest off-diagonal {max_off:.2e}"),
    ));
    let rows = form.apply(&vec![1.0; n])?;
    let (ok, detail) = match form.grid().boundary() {
        Boundary::Periodic => {
            let worst = rows.iter().map(|r| r.abs()).fold(0.0, f64::max);
            (worst <= 1e-10 * scale, format!("max |row sum| {worst:.2e}"))
        }
        Boundary::Killing => {
            let worst = rows.iter().cloned().fold(f64::INFINITY, f64::min);
            (worst >= -1e-10 * scale, format!("min row sum {worst:.2e}"))
        }
    };
    out.push(check(label, "row sums", ok, detail));
    Ok(out)
}

/// Resolvent identity, contraction, positivity and `lambda G f -> f`.
pub fn resolvent_checks(label: &str, form: &GridForm, seed: u64) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid = *form.grid();
    let h = grid.spacing();
    let n = grid.len();
    let mut out = Vec::new();

    let (lambda, mu) = (0.7, 2.3);
    let mut identity_worst = 0.0f64;
    let mut contraction_worst = 0.0f64;
    for _ in 0..4 {
        let f = random_vector(&mut rng, n);
        let gl = resolvent(form, lambda, &f)?.output;
        let gm = resolvent(form, mu, &f)?.output;
        let glgm = resolvent(form, lambda, &gm)?.output;
        let lhs: Vec<f64> = gl.iter().zip(&gm).map(|(a, b)| a - b).collect();
        let rhs: Vec<f64> = glgm.iter().map(|v| (mu - lambda) * v).collect();
        let diff: Vec<f64> = lhs.iter().zip(&rhs).map(|(a, b)| a - b).collect();
        identity_worst = identity_worst.max(norm_h(&diff, h) / norm_h(&lhs, h));
        let lu: Vec<f64> = gl.iter().map(|v| lambda * v).collect();
        contraction_worst = contraction_worst.max(norm_h(&lu, h) / norm_h(&f, h));
    }
    out.push(check(
        label,
        "resolvent identity",
        identity_worst <= 1e-8,
        format!("relative defect {identity_worst:.2e}"),
    ));
    out.push(check(
        label,
        "lambda G contraction",
        contraction_worst <= 1.0 + 1e-9,
        format!("max ||lambda G f|| / ||f|| = {contraction_worst:.6}"),
    ));

    if !form.is_multiplier() {
        let f: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
        let u = resolvent(form, 1.0, &f)?.output;
        let min = u.iter().cloned().fold(f64::INFINITY, f64::min);
        out.push(check(
            label,
            "resolvent positivity",
            min >= POSITIVITY_FLOOR,
            format!("min entry {min:.2e}"),
        ));
    }

    let f = grid.sample(gaussian_bump);
    let mut errors = Vec::new();
    for lambda in [1.0, 10.0, 100.0, 1000.0] {
        let u = resolvent(form, lambda, &f)?.output;
        let diff: Vec<f64> = u.iter().zip(&f).map(|(a, b)| lambda * a - b).collect();
        errors.push(norm_h(&diff, h));
    }
    let decreasing = errors.windows(2).all(|w| w[1] < w[0]);
    out.push(check(
        label,
        "lambda G f -> f",
        decreasing,
        format!(
            "errors {}",
            errors
                .iter()
                .map(|e| format!("{e:.2e}"))
                .collect::<Vec<_>>()
                .join(" > ")
        ),
    ));
    Ok(out)
}

/// Markov bounds, contraction and the Laplace-transform link between the
/// semigroup and the resolvent.
pub fn semigroup_checks(label: &str, form: &GridForm, steps: usize) -> Result<Vec<Check>> {
    let grid = *form.grid();
    let h = grid.spacing();
    let mut out = Vec::new();
    let f = grid.sample(smoothed_indicator);
    let p = semigroup_apply(form, 1.0, &f, steps)?;
    out.push(check(
        label,
        "semigroup contraction",
        norm_h(&p, h) <= norm_h(&f, h) * (1.0 + 1e-10),
        format!("||P f|| / ||f|| = {:.6}", norm_h(&p, h) / norm_h(&f, h)),
    ));
    if !form.is_multiplier() {
        let lo = p.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = p.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        out.push(check(
            label,
            "semigroup Markov bounds",
            lo >= -1e-12 && hi <= 1.0 + 1e-12,
            format!("range [{lo:.3e}, {hi:.6}]"),
        ));
    }

    // int_0^inf e^{-lambda t} P_t f dt = (1/lambda) int_0^1 P_{-ln s / lambda} f ds
    let lambda = 1.0;
    let g = grid.sample(gaussian_bump);
    let (nodes, weights) = gauss_legendre(32);
    let mut laplace = vec![0.0; g.len()];
    for (x, w) in nodes.iter().zip(&weights) {
        let s = 0.5 * (x + 1.0);
        let t = -s.ln() / lambda;
        let pt = semigroup_apply(form, t, &g, steps)?;
        laplace
            .iter_mut()
            .zip(&pt)
            .for_each(|(l, v)| *l += 0.5 * w * v / lambda);
    }
    let direct = resolvent(form, lambda, &g)?.output;
    let diff: Vec<f64> = laplace.iter().zip(&direct).map(|(a, b)| a - b).collect();
    let rel = norm_h(&diff, h) / norm_h(&direct, h);
    out.push(check(
        label,
        "Laplace transform of semigroup",
        rel <= 1e-2,
        format!("relative gap {rel:.2e}"),
    ));
    Ok(out)
}

/// Pure powers and the two log-borderline integrands.
pub fn tail_checks() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for p in [-3.0, -2.0, -1.5, -0.5, 0.0] {
        let v = classify_tail(move |u: f64| Ok(u.powf(p)), TailDomain::AtInfinity(1.0), TAIL_MAX_DEPTH)?;
        let expected = if p < -1.0 {
            Convergence::Convergent
        } else {
            Convergence::Divergent
        };
        out.push(check(
            "classify_tail",
            &format!("u^{p}"),
            v.verdict == expected && v.depth == 0,
            format!("{:?} at depth {}", v.verdict, v.depth),
        ));
    }
    let log1 = classify_tail(
        |u: f64| Ok(1.0 / (u * u.ln())),
        TailDomain::AtInfinity(3.0),
        TAIL_MAX_DEPTH,
    )?;
    out.push(check(
        "classify_tail",
        "1/(u log u)",
        log1.verdict == Convergence::Divergent,
        format!("{:?} at depth {}", log1.verdict, log1.depth),
    ));
    let log2 = classify_tail(
        |u: f64| Ok(1.0 / (u * u.ln().powi(2))),
        TailDomain::AtInfinity(3.0),
        TAIL_MAX_DEPTH,
    )?;
    out.push(check(
        "classify_tail",
        "1/(u log^2 u)",
        log2.verdict == Convergence::Convergent,
        format!("{:?} at depth {}", log2.verdict, log2.depth),
    ));
    Ok(out)
}

/// The forms exercised by the suites, on `points`-node grids.
pub fn standard_forms(points: usize) -> Result<Vec<(String, GridForm)>> {
    let killing = Grid1D::new(10.0, points, Boundary::Killing)?;
    let periodic = Grid1D::new(10.0, points, Boundary::Periodic)?;
    let sine = sine_perturbed_unit(Some(2))?;
    let mut params = ParamMap::new();
    params.insert("n".into(), 2.0);
    let Coefficient::Jump(kernel) = lookup_family(FamilyId::Prop18i, &params)? else {
        return Err(Error::Precondition("prop18i should yield a jump kernel".into()));
    };
    let cauchy = crate::coeffs::JumpKernel::translation_invariant(1, OrderFunction::constant(1.0)?);
    Ok(vec![
        ("diffusion/killing".into(), assemble_diffusion(&sine, killing)?),
        ("diffusion/periodic".into(), assemble_diffusion(&sine, periodic)?),
        ("jump/periodic".into(), assemble_jump(&cauchy, periodic)?),
        ("jump/killing".into(), assemble_jump(&kernel, killing)?),
        (
            "multiplier/periodic".into(),
            assemble_multiplier(
                &LevyExponent::jump(1, recurrent_to_transient_order(Some(2))?)?,
                periodic,
            )?,
        ),
    ])
}

/// Every suite; the boolean is true when all checks pass.
pub fn run_all(seed: u64) -> Result<(bool, Vec<Check>)> {
    let mut checks = Vec::new();
    for (k, (label, form)) in standard_forms(256)?.iter().enumerate() {
        checks.extend(form_checks(label, form, seed + k as u64)?);
        checks.extend(resolvent_checks(label, form, seed + 100 + k as u64)?);
        checks.extend(semigroup_checks(label, form, 256)?);
    }
    checks.extend(tail_checks()?);
    Ok((checks.iter().all(|c| c.passed), checks))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tail_suite_passes() {
        let checks = tail_checks().unwrap();
        assert!(checks.iter().all(|c| c.passed), "{checks:#?}");
    }

    #[test]
    fn diffusion_suites_pass() {
        let grid = Grid1D::new(10.0, 128, Boundary::Killing).unwrap();
        let form = assemble_diffusion(&sine_perturbed_unit(Some(3)).unwrap(), grid).unwrap();
        let mut checks = form_checks("d", &form, 1).unwrap();
        checks.extend(resolvent_checks("d", &form, 2).unwrap());
        assert!(checks.iter().all(|c| c.passed), "{checks:#?}");
    }

    #[test]
    fn display_marks_failures() {
        let c = check("s", "n", false, "x".into());
        assert_eq!(c.to_string(), "[FAIL] s: n (x)");
    }
}
