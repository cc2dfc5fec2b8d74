//! Coefficient families (diffusion matrices, jump orders, jump kernels)
//! and numerical checks of local L1 convergence.
//!
//! Distances between kernels use the Euclidean metric on R^d.

use std::collections::BTreeMap;
use std::f64::consts::E;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{finite, Error, Result};
use crate::tolerances::{
    ASSUMPTION_VANISH_RATIO, ASSUMPTION_ZERO, INVARIANT_REL_TOL, KERNEL_PAIR_SAMPLES, ORDER_BOUND_MAX_U,
    ORDER_BOUND_SAMPLES,
};

const E2: f64 = E * E;

/// Signature of a parametrised order family: `eval(params, u)`.
pub type OrderFn = fn(&[f64], f64) -> f64;

#[derive(Clone)]
pub enum OrderKind {
    Constant(f64),
    /// `offset - (log(u + e^2))^(-eps)`.
    SharpLog {
        eps: f64,
        offset: f64,
    },
    Family {
        id: String,
        params: Vec<f64>,
        eval: OrderFn,
    },
}

impl fmt::Debug for OrderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrderKind::Constant(a) => write!(f, "Constant({a})"),
            OrderKind::SharpLog { eps, offset } => {
                write!(f, "SharpLog {{ eps: {eps}, offset: {offset} }}")
            }
            OrderKind::Family { id, params, .. } => write!(f, "Family({id}, {params:?})"),
        }
    }
}

/// Radial variable order `alpha(u)`, `u = |h| >= 0`, with global bounds
/// `0 < lower <= alpha(u) <= upper <= 2`.
///
/// The upper bound may equal 2 only as a supremum that is never attained;
/// every evaluated value is strictly below 2.
#[derive(Clone, Debug)]
pub struct OrderFunction {
    kind: OrderKind,
    lower: f64,
    upper: f64,
}

impl OrderFunction {
    pub fn constant(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 2.0) {
            return Err(Error::invalid(
                "alpha",
                format!("constant order {alpha} outside (0, 2)"),
            ));
        }
        Ok(OrderFunction {
            kind: OrderKind::Constant(alpha),
            lower: alpha,
            upper: alpha,
        })
    }

    /// Builds an order from a parametrised closure; bounds come from the
    /// dense sample sweep.
    pub fn family(id: impl Into<String>, params: Vec<f64>, eval: OrderFn) -> Result<Self> {
        let kind = OrderKind::Family {
            id: id.into(),
            params,
            eval,
        };
        let mut lower = f64::INFINITY;
        let mut upper = f64::NEG_INFINITY;
        for u in bound_sweep() {
            let a = kind_eval(&kind, u);
            finite(a, "order function", || format!("u = {u:e}"))?;
            lower = lower.min(a);
            upper = upper.max(a);
        }
        let order = OrderFunction { kind, lower, upper };
        order.check_bounds()?;
        Ok(order)
    }

    pub fn kind(&self) -> &OrderKind {
        &self.kind
    }

    pub fn lower_bound(&self) -> f64 {
        self.lower
    }

    pub fn upper_bound(&self) -> f64 {
        self.upper
    }

    pub fn is_constant(&self) -> Option<f64> {
        match self.kind {
            OrderKind::Constant(a) => Some(a),
            _ => None,
        }
    }

    #[inline]
    pub fn eval(&self, u: f64) -> f64 {
        kind_eval(&self.kind, u)
    }

    /// Verifies `lower <= alpha(u) <= upper` and `0 < alpha(u) < 2` on the
    /// log-spaced sweep over `[0, 1e12]`.
    pub fn check_bounds(&self) -> Result<()> {
        if !(self.lower > 0.0 && self.lower <= self.upper && self.upper <= 2.0) {
            return Err(Error::invalid(
                "order",
                format!(
                    "bounds [{}, {}] violate 0 < lower <= upper <= 2",
                    self.lower, self.upper
                ),
            ));
        }
        let slack = INVARIANT_REL_TOL * self.upper;
        for u in bound_sweep() {
            let a = self.eval(u);
            if !(a.is_finite() && a > 0.0 && a < 2.0 && a >= self.lower - slack && a <= self.upper + slack) {
                return Err(Error::invalid(
                    "order",
                    format!("alpha({u:e}) = {a} escapes [{}, {}]", self.lower, self.upper),
                ));
            }
        }
        Ok(())
    }
}

#[inline]
fn kind_eval(kind: &OrderKind, u: f64) -> f64 {
    match kind {
        OrderKind::Constant(a) => *a,
        OrderKind::SharpLog { eps, offset } => offset - (u + E2).ln().powf(-eps),
        OrderKind::Family { params, eval, .. } => eval(params, u),
    }
}

/// `u = 0` followed by log-spaced points up to the sweep maximum.
fn bound_sweep() -> impl Iterator<Item = f64> {
    let n = ORDER_BOUND_SAMPLES;
    let lo = -12.0f64;
    let hi = ORDER_BOUND_MAX_U.log10();
    std::iter::once(0.0).chain((0..n).map(move |i| 10f64.powf(lo + (hi - lo) * i as f64 / (n - 1) as f64)))
}

/// `alpha(u) = offset - (log(u + e^2))^(-eps)`.
///
/// `offset` carries the leading term (1, or 1 + 1/n). The map is increasing
/// in `u`, so the bounds are `alpha(0) = offset - 2^(-eps)` and `offset`.
/// `cap` is the admissible ceiling for the upper bound and may not exceed 2.
pub fn make_sharp_log_order(eps: f64, offset: f64, cap: f64) -> Result<OrderFunction> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::invalid("eps", format!("must be positive, got {eps}")));
    }
    if !(cap > 0.0 && cap <= 2.0) {
        return Err(Error::invalid("cap", format!("must lie in (0, 2], got {cap}")));
    }
    let lower = offset - 2f64.powf(-eps);
    if !(lower > 0.0) {
        return Err(Error::invalid(
            "offset",
            format!("alpha(0) = {offset} - 2^-{eps} = {lower} is not positive"),
        ));
    }
    if !(offset <= cap) {
        return Err(Error::invalid(
            "offset",
            format!("upper bound {offset} exceeds cap {cap}"),
        ));
    }
    Ok(OrderFunction {
        kind: OrderKind::SharpLog { eps, offset },
        lower,
        upper: offset,
    })
}

/// Order family `1 + 1/n - (log(u + e^2))^(-1/2)`; `None` is the limit.
pub fn recurrent_to_transient_order(n: Option<u32>) -> Result<OrderFunction> {
    let offset = match n {
        Some(0) => return Err(Error::invalid("n", "index must be at least 1")),
        Some(n) => 1.0 + 1.0 / n as f64,
        None => 1.0,
    };
    make_sharp_log_order(0.5, offset, 2.0)
}

/// Order family `1 - (log(u + e^2))^(-(1 - 1/n))`; `None` is the limit
/// with exponent 1. `n = 1` degenerates to the zero order and is rejected.
pub fn transient_to_recurrent_order(n: Option<u32>) -> Result<OrderFunction> {
    let eps = match n {
        Some(n) if n < 2 => {
            return Err(Error::invalid(
                "n",
                format!("index {n} gives a zero order; need n >= 2"),
            ))
        }
        Some(n) => 1.0 - 1.0 / n as f64,
        None => 1.0,
    };
    make_sharp_log_order(eps, 1.0, 2.0)
}

type MatrixFn = dyn Fn(&[f64]) -> Vec<f64> + Send + Sync;

/// Symmetric `d x d` coefficient field `A(x)`, stored row-major.
#[derive(Clone)]
pub struct DiffusionCoefficient {
    dim: usize,
    label: String,
    matrix: Arc<MatrixFn>,
}

impl fmt::Debug for DiffusionCoefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DiffusionCoefficient")
            .field("dim", &self.dim)
            .field("label", &self.label)
            .finish()
    }
}

impl DiffusionCoefficient {
    pub fn new(
        dim: usize,
        label: impl Into<String>,
        matrix: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("dim", "dimension must be positive"));
        }
        Ok(DiffusionCoefficient {
            dim,
            label: label.into(),
            matrix: Arc::new(matrix),
        })
    }

    /// One-dimensional coefficient `a(x)`.
    pub fn scalar(label: impl Into<String>, a: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        DiffusionCoefficient {
            dim: 1,
            label: label.into(),
            matrix: Arc::new(move |x: &[f64]| vec![a(x[0])]),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn matrix(&self, x: &[f64]) -> Vec<f64> {
        (self.matrix)(x)
    }

    /// Scalar value for `d = 1`.
    pub fn scalar_at(&self, x: f64) -> f64 {
        (self.matrix)(&[x])[0]
    }

    /// Largest `lambda <= 1` with `lambda |xi|^2 <= <A xi, xi> <= |xi|^2 / lambda`
    /// over sampled `x` in the ball of radius `radius`, estimated from sampled
    /// Rayleigh quotients.
    pub fn local_ellipticity(&self, radius: f64) -> Result<f64> {
        let samples = 257usize;
        let d = self.dim;
        let mut lo = f64::INFINITY;
        let mut hi: f64 = 0.0;
        let dirs = sample_directions(d);
        for i in 0..samples {
            let s = -radius + 2.0 * radius * i as f64 / (samples - 1) as f64;
            // walk the diagonal of the cube and each axis
            for axis in 0..=d {
                let mut x = vec![0.0; d];
                if axis == d {
                    x.iter_mut().for_each(|v| *v = s / (d as f64).sqrt());
                } else {
                    x[axis] = s;
                }
                let a = self.matrix(&x);
                for xi in &dirs {
                    let q = quad_form(&a, xi, d);
                    finite(q, "diffusion coefficient", || format!("x = {x:?}"))?;
                    lo = lo.min(q);
                    hi = hi.max(q);
                }
            }
        }
        if lo <= 0.0 {
            return Err(Error::invalid(
                "diffusion",
                format!("not elliptic on radius {radius}: min {lo}"),
            ));
        }
        Ok(lo.min(1.0 / hi).min(1.0))
    }

    /// Checks symmetry and the two-sided ellipticity bound at sampled points.
    pub fn check_ellipticity(&self, radius: f64) -> Result<()> {
        let lambda = self.local_ellipticity(radius)?;
        let d = self.dim;
        for i in 0..33 {
            let x = vec![-radius + 2.0 * radius * i as f64 / 32.0; d];
            let a = self.matrix(&x);
            for r in 0..d {
                for c in 0..d {
                    let (u, v) = (a[r * d + c], a[c * d + r]);
                    if (u - v).abs() > INVARIANT_REL_TOL * u.abs().max(v.abs()).max(1.0) {
                        return Err(Error::invalid("diffusion", format!("asymmetric at {x:?}")));
                    }
                }
            }
            for xi in sample_directions(d) {
                let q = quad_form(&a, &xi, d);
                let slack = INVARIANT_REL_TOL * q.abs();
                if q < lambda - slack || q > 1.0 / lambda + slack {
                    return Err(Error::invalid("diffusion", format!("ellipticity fails at {x:?}")));
                }
            }
        }
        Ok(())
    }
}

fn quad_form(a: &[f64], xi: &[f64], d: usize) -> f64 {
    let mut q = 0.0;
    for r in 0..d {
        for c in 0..d {
            q += xi[r] * a[r * d + c] * xi[c];
        }
    }
    q
}

/// Unit vectors: the axes plus normalised pairwise diagonals.
fn sample_directions(d: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    for i in 0..d {
        let mut v = vec![0.0; d];
        v[i] = 1.0;
        out.push(v);
        for j in (i + 1)..d {
            for sign in [1.0, -1.0] {
                let mut v = vec![0.0; d];
                v[i] = std::f64::consts::FRAC_1_SQRT_2;
                v[j] = sign * std::f64::consts::FRAC_1_SQRT_2;
                out.push(v);
            }
        }
    }
    out
}

/// The four explosion/conservativeness coefficient variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Prop15Variant {
    /// `(2+|x|)^2 (log(2+|x|))^(1+1/n)`
    ExplosiveFamily(u32),
    /// `(2+|x|)^2 log(2+|x|)`
    ConservativeLimit,
    /// `(2+|x|)^(2-1/n) (log(2+|x|))^2`
    ConservativeFamily(u32),
    /// `(2+|x|)^2 (log(2+|x|))^2`
    ExplosiveLimit,
}

pub fn make_prop15_coefficient(variant: Prop15Variant) -> Result<DiffusionCoefficient> {
    let (power, log_power, label) = match variant {
        Prop15Variant::ExplosiveFamily(n) => {
            check_index(n)?;
            (2.0, 1.0 + 1.0 / n as f64, format!("explosive-family(n={n})"))
        }
        Prop15Variant::ConservativeLimit => (2.0, 1.0, "conservative-limit".to_string()),
        Prop15Variant::ConservativeFamily(n) => {
            check_index(n)?;
            (2.0 - 1.0 / n as f64, 2.0, format!("conservative-family(n={n})"))
        }
        Prop15Variant::ExplosiveLimit => (2.0, 2.0, "explosive-limit".to_string()),
    };
    Ok(DiffusionCoefficient::scalar(label, move |x| {
        let base = 2.0 + x.abs();
        base.powf(power) * base.ln().powf(log_power)
    }))
}

fn check_index(n: u32) -> Result<()> {
    if n == 0 {
        Err(Error::invalid("n", "index must be at least 1"))
    } else {
        Ok(())
    }
}

/// `a_n(x) = 1 + sin(x)/n`, converging uniformly to 1; `None` is the limit.
pub fn sine_perturbed_unit(n: Option<u32>) -> Result<DiffusionCoefficient> {
    match n {
        Some(n) => {
            if n < 2 {
                // n = 1 touches zero at x = -pi/2
                return Err(Error::invalid("n", "need n >= 2 for a positive coefficient"));
            }
            let inv = 1.0 / n as f64;
            Ok(DiffusionCoefficient::scalar(format!("1+sin/{n}"), move |x| {
                1.0 + inv * x.sin()
            }))
        }
        None => Ok(DiffusionCoefficient::scalar("1", |_| 1.0)),
    }
}

type AmplitudeFn = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// Symmetric jump density built from a radial order and a bounded amplitude
/// `c(x) + 1`, symmetrised as `((c(x)+1) + (c(y)+1)) / 2 * |x-y|^(-d-alpha(|x-y|))`.
#[derive(Clone)]
pub struct JumpKernel {
    dim: usize,
    order: OrderFunction,
    amplitude: Arc<AmplitudeFn>,
    amplitude_bounds: (f64, f64),
    dominator_orders: (f64, f64),
}

impl fmt::Debug for JumpKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("JumpKernel")
            .field("dim", &self.dim)
            .field("order", &self.order)
            .field("amplitude_bounds", &self.amplitude_bounds)
            .field("dominator_orders", &self.dominator_orders)
            .finish()
    }
}

impl JumpKernel {
    /// `amplitude` is `c(x) + 1` with `1 + c_lo <= amplitude <= 1 + c_hi`.
    /// `family_orders` are the global bounds over the whole sequence that
    /// this kernel belongs to; the dominating kernel is built from them.
    pub fn new(
        dim: usize,
        order: OrderFunction,
        amplitude: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        c_bounds: (f64, f64),
        family_orders: (f64, f64),
    ) -> Result<Self> {
        let (c_lo, c_hi) = c_bounds;
        if !(c_lo > 0.0 && c_lo < c_hi && c_hi.is_finite()) {
            return Err(Error::invalid(
                "c",
                format!("need 0 < c < C < inf, got ({c_lo}, {c_hi})"),
            ));
        }
        let (a_lo, a_hi) = family_orders;
        if !(a_lo > 0.0 && a_lo <= order.lower_bound() && order.upper_bound() <= a_hi && a_hi < 2.0) {
            return Err(Error::invalid(
                "family_orders",
                format!(
                    "[{a_lo}, {a_hi}] must contain [{}, {}] inside (0, 2)",
                    order.lower_bound(),
                    order.upper_bound()
                ),
            ));
        }
        Ok(JumpKernel {
            dim,
            order,
            amplitude: Arc::new(amplitude),
            amplitude_bounds: (1.0 + c_lo, 1.0 + c_hi),
            dominator_orders: family_orders,
        })
    }

    /// Translation-invariant kernel `|x-y|^(-d-alpha)` (amplitude 1).
    pub fn translation_invariant(dim: usize, order: OrderFunction) -> Self {
        let bounds = (order.lower_bound(), order.upper_bound());
        JumpKernel {
            dim,
            order,
            amplitude: Arc::new(|_| 1.0),
            amplitude_bounds: (1.0, 1.0),
            dominator_orders: bounds,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> &OrderFunction {
        &self.order
    }

    pub fn amplitude(&self, x: &[f64]) -> f64 {
        (self.amplitude)(x)
    }

    pub fn amplitude_bounds(&self) -> (f64, f64) {
        self.amplitude_bounds
    }

    /// `|r|^(-d-alpha(|r|))`.
    #[inline]
    pub fn radial(&self, r: f64) -> f64 {
        r.powf(-(self.dim as f64) - self.order.eval(r))
    }

    pub fn density(&self, x: &[f64], y: &[f64]) -> f64 {
        let r = distance(x, y);
        0.5 * (self.amplitude(x) + self.amplitude(y)) * self.radial(r)
    }

    /// `(1 + C) * max(r^(-d-alpha_lo), r^(-d-alpha_hi))`.
    pub fn dominator(&self, x: &[f64], y: &[f64]) -> f64 {
        let r = distance(x, y);
        let d = self.dim as f64;
        let (lo, hi) = self.dominator_orders;
        self.amplitude_bounds.1 * r.powf(-d - lo).max(r.powf(-d - hi))
    }

    /// Symmetry and domination at deterministic sample pairs in `[-k, k]^d`.
    pub fn check_invariants(&self, k: f64) -> Result<()> {
        let d = self.dim;
        for s in 0..KERNEL_PAIR_SAMPLES {
            let x: Vec<f64> = (0..d).map(|j| k * halton(s + 1, j)).collect();
            let y: Vec<f64> = (0..d).map(|j| k * halton(s + 1, j + d)).collect();
            if distance(&x, &y) == 0.0 {
                continue;
            }
            let j_xy = self.density(&x, &y);
            let j_yx = self.density(&y, &x);
            if (j_xy - j_yx).abs() > INVARIANT_REL_TOL * j_xy.abs() {
                return Err(Error::invalid("kernel", format!("asymmetric at {x:?}, {y:?}")));
            }
            let dom = self.dominator(&x, &y);
            if j_xy > dom * (1.0 + INVARIANT_REL_TOL) {
                return Err(Error::invalid("kernel", format!("J > J~ at {x:?}, {y:?}")));
            }
        }
        Ok(())
    }

    /// `int_{|w|<1} |w|^2 J(x, x+w) dw + int_{|w|>=1} J(x, x+w) dw` for `d = 1`,
    /// with the far tail bounded through the amplitude ceiling.
    pub fn local_integrability(&self, x: f64) -> Result<f64> {
        if self.dim != 1 {
            return Err(Error::Precondition("integrability proxy implemented for d = 1".into()));
        }
        let tol = 1e-8;
        // beyond this radius the amplitude is replaced by its upper bound,
        // so the far part is an upper estimate
        const FAR_EXACT: f64 = 64.0;
        let mut total = 0.0;
        for sign in [1.0, -1.0] {
            let near = |w: f64| w * w * self.density(&[x], &[x + sign * w]);
            let far = |w: f64| self.density(&[x], &[x + sign * w]);
            total += crate::levy::power_tail_to_zero(&near, 1.0, tol, 2_000, "kernel near part")?.value;
            total += crate::quad::integrate(&far, 1.0, FAR_EXACT, crate::quad::Tolerance::rel(tol), 2_000)?.value;
            let envelope = |w: f64| self.amplitude_bounds.1 * self.radial(w);
            total += crate::levy::power_tail_to_infinity(&envelope, FAR_EXACT, tol, 2_000, "kernel far part")?.value;
        }
        finite(total, "kernel integrability", || format!("x = {x}"))
    }
}

fn distance(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

/// Low-discrepancy sample in `[-1, 1)` from the Halton sequence.
fn halton(index: usize, dim: usize) -> f64 {
    const PRIMES: [usize; 8] = [2, 3, 5, 7, 11, 13, 17, 19];
    let base = PRIMES[dim % PRIMES.len()];
    let mut f = 1.0;
    let mut r = 0.0;
    let mut i = index;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    2.0 * r - 1.0
}

/// Prop 1.8-type kernel with amplitude `1 + c_mean + c_amp sin(x)`.
pub fn sine_amplitude_kernel(
    order: OrderFunction,
    c_mean: f64,
    c_amp: f64,
    family_orders: (f64, f64),
) -> Result<JumpKernel> {
    let lo = c_mean - c_amp.abs();
    let hi = c_mean + c_amp.abs();
    JumpKernel::new(
        1,
        order,
        move |x| 1.0 + c_mean + c_amp * x[0].sin(),
        (lo, hi),
        family_orders,
    )
}

/// Axis-aligned box `[lower, upper]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Region {
    pub fn interval(a: f64, b: f64) -> Self {
        Region {
            lower: vec![a],
            upper: vec![b],
        }
    }

    pub fn cube(dim: usize, a: f64, b: f64) -> Self {
        Region {
            lower: vec![a; dim],
            upper: vec![b; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    fn validate(&self) -> Result<()> {
        if self.lower.is_empty() || self.lower.len() != self.upper.len() {
            return Err(Error::invalid(
                "region",
                "lower/upper corners must share a positive dimension",
            ));
        }
        if self.lower.iter().zip(&self.upper).any(|(a, b)| !(a < b)) {
            return Err(Error::invalid(
                "region",
                "each lower corner must be below the upper corner",
            ));
        }
        Ok(())
    }

    /// Midpoints of the uniform tensor grid with `resolution` cells per axis.
    fn midpoints(&self, resolution: usize) -> (Vec<Vec<f64>>, f64) {
        let d = self.dim();
        let steps: Vec<f64> = (0..d)
            .map(|k| (self.upper[k] - self.lower[k]) / resolution as f64)
            .collect();
        let cell: f64 = steps.iter().product();
        let count = resolution.pow(d as u32);
        let pts = (0..count)
            .map(|flat| {
                let mut rest = flat;
                (0..d)
                    .map(|k| {
                        let idx = rest % resolution;
                        rest /= resolution;
                        self.lower[k] + (idx as f64 + 0.5) * steps[k]
                    })
                    .collect()
            })
            .collect();
        (pts, cell)
    }
}

/// Midpoint-rule approximation of `int_region |f - g|`.
pub fn l1_local_distance<F, G>(f: F, g: G, region: &Region, resolution: usize) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
    G: Fn(&[f64]) -> Result<f64> + Sync,
{
    region.validate()?;
    if resolution < 2 {
        return Err(Error::invalid("resolution", "need at least 2 points per axis"));
    }
    let (points, cell) = region.midpoints(resolution);
    // collect before summing so the result does not depend on thread scheduling
    let terms: Vec<f64> = points
        .par_iter()
        .map(|x| {
            let a = finite(f(x)?, "l1 distance (first field)", || format!("{x:?}"))?;
            let b = finite(g(x)?, "l1 distance (second field)", || format!("{x:?}"))?;
            Ok((a - b).abs())
        })
        .collect::<Result<_>>()?;
    Ok(terms.iter().sum::<f64>() * cell)
}

/// Same as [`l1_local_distance`] with the Frobenius norm of a matrix difference.
pub fn l1_local_distance_matrix(
    a: &DiffusionCoefficient,
    b: &DiffusionCoefficient,
    region: &Region,
    resolution: usize,
) -> Result<f64> {
    if a.dim() != b.dim() || a.dim() != region.dim() {
        return Err(Error::Dimension {
            expected: region.dim(),
            found: a.dim().max(b.dim()),
        });
    }
    l1_local_distance(
        |x| {
            let (ma, mb) = (a.matrix(x), b.matrix(x));
            Ok(ma.iter().zip(&mb).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt())
        },
        |_| Ok(0.0),
        region,
        resolution,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AssumptionTrend {
    Vanishing,
    Stalled,
}

#[derive(Debug, Clone)]
pub struct AssumptionReport {
    pub indices: Vec<u32>,
    pub distances: Vec<f64>,
    pub trend: AssumptionTrend,
}

/// Local L1 distances of `family(n)` to `limit` along increasing indices.
///
/// The trend is `Vanishing` when the second half of the sequence is
/// non-increasing and the last distance is either negligible or at most
/// a quarter of the first.
pub fn check_assumption_sequence<Fam, L>(
    family: Fam,
    limit: L,
    region: &Region,
    indices: &[u32],
    resolution: usize,
) -> Result<AssumptionReport>
where
    Fam: Fn(u32, &[f64]) -> Result<f64> + Sync,
    L: Fn(&[f64]) -> Result<f64> + Sync,
{
    if indices.is_empty() || indices.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("indices", "must be non-empty and strictly increasing"));
    }
    let mut distances = Vec::with_capacity(indices.len());
    for &n in indices {
        distances.push(l1_local_distance(|x| family(n, x), &limit, region, resolution)?);
    }
    let first = distances[0];
    let last = *distances.last().expect("non-empty");
    let tail_start = distances.len() / 2;
    let monotone = distances[tail_start..]
        .windows(2)
        .all(|w| w[1] <= w[0] * (1.0 + INVARIANT_REL_TOL) + ASSUMPTION_ZERO);
    let small = last <= ASSUMPTION_ZERO || (distances.len() > 1 && last <= ASSUMPTION_VANISH_RATIO * first);
    let trend = if monotone && small {
        AssumptionTrend::Vanishing
    } else {
        AssumptionTrend::Stalled
    };
    Ok(AssumptionReport {
        indices: indices.to_vec(),
        distances,
        trend,
    })
}

/// String identifiers for the coefficient families used in configs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FamilyId {
    Prop15i,
    Prop15ii,
    Prop16i,
    Prop16ii,
    Prop18i,
    Prop18ii,
    ConstAlpha,
}

impl FamilyId {
    pub const ALL: [FamilyId; 7] = [
        FamilyId::Prop15i,
        FamilyId::Prop15ii,
        FamilyId::Prop16i,
        FamilyId::Prop16ii,
        FamilyId::Prop18i,
        FamilyId::Prop18ii,
        FamilyId::ConstAlpha,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            FamilyId::Prop15i => "prop15i",
            FamilyId::Prop15ii => "prop15ii",
            FamilyId::Prop16i => "prop16i",
            FamilyId::Prop16ii => "prop16ii",
            FamilyId::Prop18i => "prop18i",
            FamilyId::Prop18ii => "prop18ii",
            FamilyId::ConstAlpha => "const-alpha",
        }
    }
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FamilyId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FamilyId::ALL
            .iter()
            .copied()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::invalid("family", format!("unknown coefficient family `{s}`")))
    }
}

/// A resolved family member.
#[derive(Debug, Clone)]
pub enum Coefficient {
    Order(OrderFunction),
    Diffusion(DiffusionCoefficient),
    Jump(JumpKernel),
}

pub type ParamMap = BTreeMap<String, f64>;

fn index_param(params: &ParamMap) -> Result<Option<u32>> {
    match params.get("n") {
        None => Ok(None),
        Some(&v) if v >= 1.0 && v.fract() == 0.0 && v <= u32::MAX as f64 => Ok(Some(v as u32)),
        Some(&v) => Err(Error::invalid("n", format!("must be a positive integer, got {v}"))),
    }
}

/// Resolves `id` plus parameters to a concrete coefficient. A missing `n`
/// selects the limit object. Jump families accept `c_mean` and `c_amp`
/// (defaults 1 and 0.5) for the amplitude `1 + c_mean + c_amp sin(x)`.
pub fn lookup_family(id: FamilyId, params: &ParamMap) -> Result<Coefficient> {
    let n = index_param(params)?;
    Ok(match id {
        FamilyId::Prop15i => Coefficient::Diffusion(make_prop15_coefficient(match n {
            Some(n) => Prop15Variant::ExplosiveFamily(n),
            None => Prop15Variant::ConservativeLimit,
        })?),
        FamilyId::Prop15ii => Coefficient::Diffusion(make_prop15_coefficient(match n {
            Some(n) => Prop15Variant::ConservativeFamily(n),
            None => Prop15Variant::ExplosiveLimit,
        })?),
        FamilyId::Prop16i => Coefficient::Order(recurrent_to_transient_order(n)?),
        FamilyId::Prop16ii => Coefficient::Order(transient_to_recurrent_order(n)?),
        FamilyId::Prop18i | FamilyId::Prop18ii => {
            let c_mean = params.get("c_mean").copied().unwrap_or(1.0);
            let c_amp = params.get("c_amp").copied().unwrap_or(0.5);
            let (order, bounds) = if id == FamilyId::Prop18i {
                if n == Some(1) {
                    return Err(Error::invalid(
                        "n",
                        "prop18i needs n >= 2 for a global upper order below 2",
                    ));
                }
                // n >= 2: orders range over [alpha(0) of the limit, 1.5]
                (recurrent_to_transient_order(n)?, (1.0 - 0.5f64.sqrt(), 1.5))
            } else {
                // n >= 2: eps in [1/2, 1]; alpha(0) smallest at eps = 1/2
                (transient_to_recurrent_order(n)?, (1.0 - 0.5f64.sqrt(), 1.0))
            };
            Coefficient::Jump(sine_amplitude_kernel(order, c_mean, c_amp, bounds)?)
        }
        FamilyId::ConstAlpha => {
            let alpha = params
                .get("alpha")
                .copied()
                .ok_or_else(|| Error::invalid("alpha", "const-alpha requires `alpha`"))?;
            Coefficient::Order(OrderFunction::constant(alpha)?)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sharp_log_order_values() {
        let a = make_sharp_log_order(1.0, 1.0, 2.0).unwrap();
        assert!((a.eval(0.0) - 0.5).abs() < 1e-15);
        assert_eq!(a.lower_bound(), a.eval(0.0));
        let b = make_sharp_log_order(0.5, 1.5, 2.0).unwrap();
        assert!((b.eval(0.0) - (1.5 - 0.5f64.sqrt())).abs() < 1e-15);
        assert!((b.eval(0.0) - 0.7929).abs() < 1e-4);
        // increases towards 1 from below
        let mut prev = 0.0;
        for k in 0..40 {
            let v = a.eval(10f64.powi(k));
            assert!(v > prev && v < 1.0);
            prev = v;
        }
        assert!(1.0 - a.eval(1e300) < 2e-3);
    }

    #[test]
    fn sharp_log_order_rejections() {
        assert!(make_sharp_log_order(0.0, 1.0, 2.0).is_err());
        assert!(make_sharp_log_order(-1.0, 1.0, 2.0).is_err());
        assert!(make_sharp_log_order(1.0, 0.5, 2.0).is_err()); // 0.5 - 1/2 = 0
        assert!(make_sharp_log_order(1.0, 2.1, 2.0).is_err());
        assert!(make_sharp_log_order(1.0, 1.8, 1.5).is_err());
        assert!(make_sharp_log_order(1.0, 1.0, 2.5).is_err());
    }

    #[test]
    fn order_bounds_hold_on_sweep() {
        for n in [1, 2, 3, 8] {
            recurrent_to_transient_order(Some(n)).unwrap().check_bounds().unwrap();
        }
        for n in [2, 3, 8] {
            transient_to_recurrent_order(Some(n)).unwrap().check_bounds().unwrap();
        }
        assert!(transient_to_recurrent_order(Some(1)).is_err());
        let f = OrderFunction::family("ramp", vec![0.5, 1.5], |p, u| p[0] + (p[1] - p[0]) * u / (1.0 + u)).unwrap();
        assert!((f.lower_bound() - 0.5).abs() < 1e-12);
        assert!(f.upper_bound() < 1.5 && f.upper_bound() > 1.49);
        assert!(OrderFunction::family("bad", vec![], |_, _| 2.5).is_err());
        assert!(OrderFunction::constant(2.0).is_err());
    }

    #[test]
    fn prop15_values() {
        let a = make_prop15_coefficient(Prop15Variant::ExplosiveFamily(1)).unwrap();
        assert!((a.scalar_at(0.0) - 4.0 * 2f64.ln().powi(2)).abs() < 1e-12);
        assert!((a.scalar_at(0.0) - 1.9218).abs() < 1e-4);
        let b = make_prop15_coefficient(Prop15Variant::ConservativeLimit).unwrap();
        assert!((b.scalar_at(0.0) - 2.7726).abs() < 1e-4);
        let c = make_prop15_coefficient(Prop15Variant::ConservativeFamily(2)).unwrap();
        assert!((c.scalar_at(E - 2.0) - E.powf(1.5)).abs() < 1e-12);
        assert!(make_prop15_coefficient(Prop15Variant::ExplosiveFamily(0)).is_err());
        for v in [
            Prop15Variant::ExplosiveFamily(3),
            Prop15Variant::ConservativeLimit,
            Prop15Variant::ConservativeFamily(3),
            Prop15Variant::ExplosiveLimit,
        ] {
            let a = make_prop15_coefficient(v).unwrap();
            let lam = a.local_ellipticity(5.0).unwrap();
            assert!(lam > 0.0 && lam <= 1.0);
            a.check_ellipticity(5.0).unwrap();
        }
    }

    #[test]
    fn l1_distance_basics() {
        let r = Region::interval(0.0, 1.0);
        let f = |x: &[f64]| Ok(x[0].sin());
        assert_eq!(l1_local_distance(f, f, &r, 64).unwrap(), 0.0);
        let g = |x: &[f64]| Ok(x[0].sin() + 0.25);
        let d = l1_local_distance(f, g, &r, 64).unwrap();
        assert!((d - 0.25).abs() < 1e-12);
        assert!(l1_local_distance(f, g, &r, 1).is_err());
        let bad = |x: &[f64]| Ok(if x[0] > 0.5 { f64::NAN } else { 0.0 });
        let err = l1_local_distance(f, bad, &r, 8).unwrap_err();
        assert!(matches!(err, Error::NonFinite { .. }), "{err}");
    }

    #[test]
    fn frobenius_distance_of_scalar_fields() {
        let a = sine_perturbed_unit(Some(4)).unwrap();
        let b = sine_perturbed_unit(None).unwrap();
        let d = l1_local_distance_matrix(&a, &b, &Region::interval(0.0, std::f64::consts::PI), 512).unwrap();
        // int_0^pi sin(x)/4 dx = 1/2
        assert!((d - 0.5).abs() < 1e-5);
    }

    #[test]
    fn assumption_sequences() {
        let r = Region::interval(0.0, 10.0);
        let limit = recurrent_to_transient_order(None).unwrap();
        let rep = check_assumption_sequence(
            |n, x| Ok(recurrent_to_transient_order(Some(n))?.eval(x[0])),
            |x| Ok(limit.eval(x[0])),
            &r,
            &[1, 2, 4, 8, 16],
            128,
        )
        .unwrap();
        assert_eq!(rep.trend, AssumptionTrend::Vanishing);
        for (n, d) in rep.indices.iter().zip(&rep.distances) {
            assert!((d - 10.0 / *n as f64).abs() < 1e-9);
        }
        let constant = check_assumption_sequence(|_, x| Ok(x[0]), |x| Ok(x[0]), &r, &[1, 2, 3], 16).unwrap();
        assert_eq!(constant.trend, AssumptionTrend::Vanishing);
        let shifted = check_assumption_sequence(|_, x| Ok(x[0] + 1.0), |x| Ok(x[0]), &r, &[1, 2, 3], 16).unwrap();
        assert_eq!(shifted.trend, AssumptionTrend::Stalled);
        assert!(check_assumption_sequence(|_, _| Ok(0.0), |_| Ok(0.0), &r, &[2, 1], 4).is_err());
    }

    #[test]
    fn jump_kernel_symmetry_domination_and_integrability() {
        for n in [2, 4, 16] {
            let k = sine_amplitude_kernel(
                recurrent_to_transient_order(Some(n)).unwrap(),
                1.0,
                0.5,
                (1.0 - 0.5f64.sqrt(), 1.5),
            )
            .unwrap();
            k.check_invariants(8.0).unwrap();
            let m = k.local_integrability(0.3).unwrap();
            assert!(m.is_finite() && m > 0.0);
        }
        // domination fails when the claimed family bounds are too narrow
        let order = recurrent_to_transient_order(Some(2)).unwrap();
        assert!(sine_amplitude_kernel(order, 1.0, 0.5, (0.5, 1.4)).is_err());
    }

    #[test]
    fn family_lookup() {
        let mut p = ParamMap::new();
        p.insert("n".into(), 2.0);
        assert!(matches!(
            lookup_family("prop16i".parse().unwrap(), &p).unwrap(),
            Coefficient::Order(_)
        ));
        assert!(matches!(
            lookup_family(FamilyId::Prop15ii, &p).unwrap(),
            Coefficient::Diffusion(_)
        ));
        assert!(matches!(
            lookup_family(FamilyId::Prop18ii, &p).unwrap(),
            Coefficient::Jump(_)
        ));
        assert!(lookup_family(FamilyId::ConstAlpha, &p).is_err());
        p.insert("alpha".into(), 1.5);
        assert!(lookup_family(FamilyId::ConstAlpha, &p).is_ok());
        p.insert("n".into(), 1.5);
        assert!(lookup_family(FamilyId::Prop16i, &p).is_err());
        assert!("prop99".parse::<FamilyId>().is_err());
    }
}
