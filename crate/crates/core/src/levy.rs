//! Characteristic exponents of symmetric Lévy measures with radial
//! variable order `n(dh) = |h|^(-d-alpha(|h|)) dh`, plus an optional
//! Gaussian part.
//!
//! With `r = |xi|` and the rescaling `t = r |h|` the jump part becomes a
//! one-dimensional integral
//!
//! ```text
//! I(r) = int_0^inf w_r(t) omega_d(t) dt,   w_r(t) = (t/r)^(-1-alpha(t/r)) / r,
//! ```
//!
//! where `omega_d(t)` is the spherical integral of `1 - cos(t <e, s>)`.
//! It is split at `t = pi`: the inner piece runs on dyadic panels towards
//! zero, the outer piece is split into a non-oscillating mass term on
//! dyadic panels and an oscillating term summed over half-periods with
//! Euler averaging.

use std::f64::consts::PI;
use std::path::Path;
use std::sync::OnceLock;

use crate::coeffs::{OrderFunction, OrderKind};
use crate::error::{finite, Error, Result};
use crate::quad::{alternating_sum, gauss_legendre, integrate, Estimate, Tolerance};
use crate::tolerances::{
    EXPONENT_ABS_TOL, EXPONENT_MAX_PANELS, EXPONENT_MAX_PERIODS, EXPONENT_REL_TOL, INVARIANT_REL_TOL, TAYLOR_GUARD,
};

const PANEL_SEGMENTS: usize = 400;
/// Local exponents this close to -1 do not license a power-law remainder.
const EXPONENT_MARGIN: f64 = 1e-6;

/// `1 - cos t` without cancellation.
#[inline]
pub fn one_minus_cos(t: f64) -> f64 {
    if t.abs() < TAYLOR_GUARD {
        let t2 = t * t;
        0.5 * t2 * (1.0 - t2 / 12.0)
    } else {
        let s = (0.5 * t).sin();
        2.0 * s * s
    }
}

/// Surface area of the unit sphere `S^k` in `R^(k+1)`.
pub fn sphere_area(k: usize) -> f64 {
    match k {
        0 => 2.0,
        1 => 2.0 * PI,
        _ => 2.0 * PI / (k as f64 - 1.0) * sphere_area(k - 2),
    }
}

/// Local log-log slope `d ln f / d ln t` by a central difference.
fn local_exponent<F: Fn(f64) -> f64>(f: &F, t: f64) -> f64 {
    const DELTA: f64 = 1e-3;
    let up = f(t * DELTA.exp());
    let down = f(t * (-DELTA).exp());
    (up.ln() - down.ln()) / (2.0 * DELTA)
}

/// Stopping rule shared by both tail helpers: the power-law remainder is
/// either negligible, or the local exponent is stable enough that the
/// remainder formula itself is accurate.
fn remainder_settled(rem: f64, dp: f64, total: f64, rel_tol: f64) -> bool {
    let model_error = rem * (20.0 * dp).min(1.0);
    rem <= 1e-3 * rel_tol * total.abs() || model_error <= 0.1 * rel_tol * total.abs()
}

/// `int_0^b f` for a positive `f` that behaves like a power `t^p`, `p > -1`,
/// as `t -> 0`. Integrates dyadic panels downwards and closes with the
/// power-law remainder `f(t) t / (p + 1)`.
pub fn power_tail_to_zero<F: Fn(f64) -> f64>(
    f: &F,
    b: f64,
    rel_tol: f64,
    max_panels: usize,
    context: &'static str,
) -> Result<Estimate> {
    let tol = Tolerance {
        abs: EXPONENT_ABS_TOL,
        rel: rel_tol,
    };
    let mut total = Estimate::ZERO;
    let mut hi = b;
    let mut prev_p: Option<f64> = None;
    for _ in 0..max_panels {
        let lo = 0.5 * hi;
        total = total + integrate(f, lo, hi, tol, PANEL_SEGMENTS)?;
        let f_lo = finite(f(lo), context, || format!("t = {lo:e}"))?;
        if f_lo <= 0.0 || lo < 1e-290 {
            return Ok(total);
        }
        let p = local_exponent(f, lo);
        hi = lo;
        if !(p > -1.0 + EXPONENT_MARGIN) {
            prev_p = Some(p);
            continue;
        }
        let rem = f_lo * lo / (p + 1.0);
        let dp = prev_p.map_or(1.0, |q| (p - q).abs());
        prev_p = Some(p);
        if remainder_settled(rem, dp, total.value + rem, rel_tol) {
            return Ok(Estimate {
                value: total.value + rem,
                error: total.error + rem * (20.0 * dp).min(1.0),
            });
        }
    }
    Err(Error::Quadrature {
        context,
        partial: total.value,
        error_bound: total.error.max(f(hi) * hi),
    })
}

/// `int_a^inf f` for a positive `f` that behaves like `t^p`, `p < -1`,
/// as `t -> inf`.
pub fn power_tail_to_infinity<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    rel_tol: f64,
    max_panels: usize,
    context: &'static str,
) -> Result<Estimate> {
    let tol = Tolerance {
        abs: EXPONENT_ABS_TOL,
        rel: rel_tol,
    };
    let mut total = Estimate::ZERO;
    let mut lo = a;
    let mut prev_p: Option<f64> = None;
    for _ in 0..max_panels {
        let hi = 2.0 * lo;
        total = total + integrate(f, lo, hi, tol, PANEL_SEGMENTS)?;
        let f_hi = finite(f(hi), context, || format!("t = {hi:e}"))?;
        if f_hi <= 0.0 || hi > 1e290 {
            return Ok(total);
        }
        let p = local_exponent(f, hi);
        lo = hi;
        if !(p < -1.0 - EXPONENT_MARGIN) {
            prev_p = Some(p);
            continue;
        }
        let rem = f_hi * hi / (-p - 1.0);
        let dp = prev_p.map_or(1.0, |q| (p - q).abs());
        prev_p = Some(p);
        if remainder_settled(rem, dp, total.value + rem, rel_tol) {
            return Ok(Estimate {
                value: total.value + rem,
                error: total.error + rem * (20.0 * dp).min(1.0),
            });
        }
    }
    Err(Error::Quadrature {
        context,
        partial: total.value,
        error_bound: f64::INFINITY,
    })
}

type Rule = (Vec<f64>, Vec<f64>);

/// Cached Gauss-Legendre rules with sizes rounded up to a multiple of 16.
fn gl_rule(n: usize) -> &'static Rule {
    const SLOTS: usize = 128;
    static CACHE: OnceLock<Vec<OnceLock<Rule>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| (0..SLOTS).map(|_| OnceLock::new()).collect());
    let slot = n.div_ceil(16).clamp(1, SLOTS) - 1;
    cache[slot].get_or_init(|| gauss_legendre(16 * (slot + 1)))
}

/// `int_0^pi g(t cos theta) sin^(d-2) theta dtheta` by Gauss-Legendre.
fn angular_integral(d: usize, t: f64, g: impl Fn(f64) -> f64) -> f64 {
    let (x, w) = gl_rule(40 + (1.5 * t.abs()) as usize);
    let half = 0.5 * PI;
    let mut s = 0.0;
    for (xi, wi) in x.iter().zip(w) {
        let theta = half * (xi + 1.0);
        s += wi * g(t * theta.cos()) * theta.sin().powi(d as i32 - 2);
    }
    s * half
}

/// Tolerances and budgets for one exponent evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureProfile {
    pub rel_tol: f64,
    pub max_panels: usize,
    pub max_periods: usize,
}

impl Default for QuadratureProfile {
    fn default() -> Self {
        QuadratureProfile {
            rel_tol: EXPONENT_REL_TOL,
            max_panels: EXPONENT_MAX_PANELS,
            max_periods: EXPONENT_MAX_PERIODS,
        }
    }
}

impl QuadratureProfile {
    fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(Error::invalid(
                "rel_tol",
                format!("must lie in (0, 1), got {}", self.rel_tol),
            ));
        }
        if self.max_panels < 8 || self.max_periods < 32 {
            return Err(Error::invalid(
                "profile",
                "panel budget below 8 or period budget below 32",
            ));
        }
        Ok(())
    }
}

/// `phi(xi) = 1/2 <S xi, xi> + int (1 - cos <xi, h>) |h|^(-d-alpha(|h|)) dh`.
#[derive(Debug, Clone)]
pub struct LevyExponent {
    dim: usize,
    order: Option<OrderFunction>,
    gaussian: Option<Vec<f64>>,
    profile: QuadratureProfile,
    levy_mass: f64,
}

impl LevyExponent {
    /// Validates the Gaussian matrix and checks Lévy integrability of the
    /// jump measure numerically.
    pub fn new(dim: usize, order: Option<OrderFunction>, gaussian: Option<Vec<f64>>) -> Result<Self> {
        Self::with_profile(dim, order, gaussian, QuadratureProfile::default())
    }

    pub fn with_profile(
        dim: usize,
        order: Option<OrderFunction>,
        gaussian: Option<Vec<f64>>,
        profile: QuadratureProfile,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("dim", "dimension must be positive"));
        }
        profile.validate()?;
        if let Some(s) = &gaussian {
            check_gaussian(s, dim)?;
        }
        if order.is_none() && gaussian.is_none() {
            return Err(Error::invalid("exponent", "needs a jump order or a Gaussian part"));
        }
        let levy_mass = match &order {
            Some(o) => levy_mass(dim, o, profile.rel_tol)?,
            None => 0.0,
        };
        Ok(LevyExponent {
            dim,
            order,
            gaussian,
            profile,
            levy_mass,
        })
    }

    /// Pure jump exponent with constant order.
    pub fn stable(dim: usize, alpha: f64) -> Result<Self> {
        Self::new(dim, Some(OrderFunction::constant(alpha)?), None)
    }

    /// Pure jump exponent with the given variable order.
    pub fn jump(dim: usize, order: OrderFunction) -> Result<Self> {
        Self::new(dim, Some(order), None)
    }

    /// Gaussian exponent `1/2 <S xi, xi>`.
    pub fn gaussian(dim: usize, s: Vec<f64>) -> Result<Self> {
        Self::new(dim, None, Some(s))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> Option<&OrderFunction> {
        self.order.as_ref()
    }

    pub fn gaussian_matrix(&self) -> Option<&[f64]> {
        self.gaussian.as_deref()
    }

    pub fn profile(&self) -> &QuadratureProfile {
        &self.profile
    }

    /// `int min(1, |h|^2) n(dh)`, computed at construction.
    pub fn levy_mass(&self) -> f64 {
        self.levy_mass
    }

    pub fn eval(&self, xi: &[f64]) -> Result<Estimate> {
        if xi.len() != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                found: xi.len(),
            });
        }
        if let Some(bad) = xi.iter().find(|v| !v.is_finite()) {
            return Err(Error::invalid("xi", format!("non-finite component {bad}")));
        }
        let r = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
        if r == 0.0 {
            return Ok(Estimate::ZERO);
        }
        let mut est = self.jump_part(r)?;
        if let Some(s) = &self.gaussian {
            let d = self.dim;
            let mut q = 0.0;
            for i in 0..d {
                for j in 0..d {
                    q += xi[i] * s[i * d + j] * xi[j];
                }
            }
            est.value += 0.5 * q;
        }
        Ok(est)
    }

    /// Jump contribution at `|xi| = r`; depends on `r` only.
    pub fn jump_part(&self, r: f64) -> Result<Estimate> {
        let Some(order) = &self.order else {
            return Ok(Estimate::ZERO);
        };
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::invalid(
                "r",
                format!("radius must be positive and finite, got {r}"),
            ));
        }
        let d = self.dim;
        let rel = self.profile.rel_tol;
        let ln_r = r.ln();
        let log_w = |t: f64| {
            let ln_u = t.ln() - ln_r;
            -(1.0 + order.eval((ln_u).exp())) * ln_u - ln_r
        };
        let omega = |t: f64| -> f64 {
            if d == 1 {
                2.0 * one_minus_cos(t)
            } else {
                sphere_area(d - 2) * angular_integral(d, t, one_minus_cos)
            }
        };
        let oscillating = |t: f64| -> f64 {
            if d == 1 {
                2.0 * t.cos()
            } else {
                sphere_area(d - 2) * angular_integral(d, t, f64::cos)
            }
        };
        let split = PI;
        let inner_f = |t: f64| {
            let o = omega(t);
            if o <= 0.0 {
                0.0
            } else {
                (log_w(t) + o.ln()).exp()
            }
        };
        let inner = power_tail_to_zero(&inner_f, split, rel, self.profile.max_panels, "exponent inner region")?;
        let w = |t: f64| log_w(t).exp();
        let mass = power_tail_to_infinity(&w, split, rel, self.profile.max_panels, "exponent outer mass")?;
        let area = sphere_area(d - 1);
        let scale = inner.value + area * mass.value;

        // half-period boundaries sit near the zeros of the oscillating factor
        let beta = ((d as f64 - 3.0) / 4.0).rem_euclid(1.0);
        let first = ((split / PI - beta).floor() + 1.0 + beta) * PI;
        let bound = |j: usize| if j == 0 { split } else { first + (j - 1) as f64 * PI };
        let tol = Tolerance {
            abs: EXPONENT_ABS_TOL.max(1e-3 * rel * scale),
            rel,
        };
        let g = |t: f64| w(t) * oscillating(t);
        let mut quad_error = 0.0;
        let osc = alternating_sum(
            |j| {
                let seg = integrate(&g, bound(j), bound(j + 1), tol, PANEL_SEGMENTS)?;
                quad_error += seg.error;
                Ok(seg.value)
            },
            rel,
            1e-2 * rel * scale,
            self.profile.max_periods,
        )?;
        let value = scale - osc.value;
        let error = inner.error + area * mass.error + osc.error + quad_error;
        finite(value, "exponent", || format!("|xi| = {r:e}"))?;
        Ok(Estimate {
            value: value.max(0.0),
            error,
        })
    }
}

fn check_gaussian(s: &[f64], d: usize) -> Result<()> {
    if s.len() != d * d {
        return Err(Error::Dimension {
            expected: d * d,
            found: s.len(),
        });
    }
    for i in 0..d {
        for j in 0..d {
            let (a, b) = (s[i * d + j], s[j * d + i]);
            if !a.is_finite() || (a - b).abs() > INVARIANT_REL_TOL * a.abs().max(b.abs()).max(1e-300) {
                return Err(Error::invalid("gaussian", "matrix must be finite and symmetric"));
            }
        }
    }
    // Cholesky of S + delta I detects negative eigenvalues.
    let trace: f64 = (0..d).map(|i| s[i * d + i]).sum();
    let delta = 1e-12 * trace.abs().max(1e-300);
    let mut l = vec![0.0; d * d];
    for i in 0..d {
        for j in 0..=i {
            let mut v = s[i * d + j] + if i == j { delta } else { 0.0 };
            for k in 0..j {
                v -= l[i * d + k] * l[j * d + k];
            }
            if i == j {
                if v <= 0.0 {
                    return Err(Error::invalid("gaussian", "matrix is not nonnegative definite"));
                }
                l[i * d + i] = v.sqrt();
            } else {
                l[i * d + j] = v / l[j * d + j];
            }
        }
    }
    Ok(())
}

fn levy_mass(d: usize, order: &OrderFunction, rel_tol: f64) -> Result<f64> {
    let near = |u: f64| u.powf(1.0 - order.eval(u));
    let far = |u: f64| u.powf(-1.0 - order.eval(u));
    let a = power_tail_to_zero(&near, 1.0, rel_tol, EXPONENT_MAX_PANELS, "Levy integrability near 0")?;
    let b = power_tail_to_infinity(
        &far,
        1.0,
        rel_tol,
        EXPONENT_MAX_PANELS,
        "Levy integrability at infinity",
    )?;
    finite(sphere_area(d - 1) * (a.value + b.value), "Levy integrability", || {
        "whole line".into()
    })
}

/// `phi(xi)` as a plain number.
pub fn eval_exponent(e: &LevyExponent, xi: &[f64]) -> Result<f64> {
    Ok(e.eval(xi)?.value)
}

/// `|phi(c xi) - c^alpha phi(xi)| / phi(c xi)` for a constant-order,
/// Gaussian-free exponent.
pub fn stable_scaling_check(e: &LevyExponent, xi: &[f64], c: f64) -> Result<f64> {
    let alpha = e
        .order()
        .and_then(OrderFunction::is_constant)
        .ok_or_else(|| Error::Precondition("scaling check needs a constant order".into()))?;
    if e.gaussian_matrix().is_some() {
        return Err(Error::Precondition("scaling check needs S = 0".into()));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::invalid("c", format!("must be positive, got {c}")));
    }
    if xi.iter().all(|v| *v == 0.0) {
        return Err(Error::Precondition("scaling check excludes xi = 0".into()));
    }
    let scaled: Vec<f64> = xi.iter().map(|v| c * v).collect();
    let big = eval_exponent(e, &scaled)?;
    let small = eval_exponent(e, xi)?;
    if big == 0.0 {
        return Err(Error::Precondition(format!(
            "phi vanished at {scaled:?}; quadrature failure"
        )));
    }
    Ok((big - c.powf(alpha) * small).abs() / big)
}

/// Outcome of comparing `phi` with the calibrated power-log lower bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerBoundCheck {
    pub phi: f64,
    pub bound: f64,
    pub c_hat: f64,
    pub ok: bool,
}

/// Calibration point for the lower-bound constant.
pub const LOWER_BOUND_CALIBRATION: f64 = 0.5;

/// Compares `phi(xi)` with `c_hat |xi|^(1 - (log(pi/|xi| + e^2))^(-eps))`
/// for the order `1 - (log(u + e^2))^(-eps)`; `c_hat` makes the bound tight
/// at `|xi| = 0.5`.
pub fn exponent_lower_bound_check(e: &LevyExponent, xi: f64) -> Result<LowerBoundCheck> {
    let eps = match e.order().map(OrderFunction::kind) {
        Some(OrderKind::SharpLog { eps, offset }) if *offset == 1.0 => *eps,
        _ => {
            return Err(Error::Precondition(
                "lower bound needs the order 1 - (log(u+e^2))^-eps".into(),
            ))
        }
    };
    if e.dim() != 1 || e.gaussian_matrix().is_some() {
        return Err(Error::Precondition("lower bound needs d = 1 and S = 0".into()));
    }
    if !(xi.abs() > 0.0 && xi.abs() < 1.0) {
        return Err(Error::Precondition(format!("need 0 < |xi| < 1, got {xi}")));
    }
    let shape = |x: f64| {
        let x = x.abs();
        x.powf(1.0 - (PI / x + std::f64::consts::E.powi(2)).ln().powf(-eps))
    };
    let c_hat = eval_exponent(e, &[LOWER_BOUND_CALIBRATION])? / shape(LOWER_BOUND_CALIBRATION);
    let phi = eval_exponent(e, &[xi])?;
    let bound = c_hat * shape(xi);
    // the calibration point itself is tight up to rounding
    let ok = phi >= bound * (1.0 - 1e-12);
    Ok(LowerBoundCheck { phi, bound, c_hat, ok })
}

/// Evaluates `phi` along the first coordinate axis.
pub fn exponent_table(e: &LevyExponent, xis: &[f64]) -> Result<Vec<(f64, Estimate)>> {
    use rayon::prelude::*;
    xis.par_iter()
        .map(|&x| {
            let mut point = vec![0.0; e.dim()];
            point[0] = x;
            Ok((x, e.eval(&point)?))
        })
        .collect()
}

/// Writes `(xi, phi, error_bound)` rows.
pub fn write_exponent_table(path: &Path, rows: &[(f64, Estimate)]) -> Result<()> {
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(["xi", "phi", "error_bound"]).map_err(csv_err)?;
    for (x, est) in rows {
        w.write_record([
            format!("{x:e}"),
            format!("{:.17e}", est.value),
            format!("{:e}", est.error),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}
