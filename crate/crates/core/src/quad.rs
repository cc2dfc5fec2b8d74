//! Quadrature building blocks: adaptive Gauss-Kronrod, Gauss-Legendre
//! nodes, and an accelerator for alternating series.

use std::collections::BinaryHeap;
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// A quadrature result together with an error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

impl Estimate {
    pub const ZERO: Estimate = Estimate { value: 0.0, error: 0.0 };
}

impl std::ops::Add for Estimate {
    type Output = Estimate;

    fn add(self, other: Estimate) -> Estimate {
        Estimate {
            value: self.value + other.value,
            error: self.error + other.error,
        }
    }
}

// 15-point Kronrod abscissae and weights with the embedded 7-point Gauss rule.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// One Gauss-Kronrod 7/15 panel. The error is the Kronrod-Gauss difference.
pub fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Estimate {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Estimate {
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub fn rel(rel: f64) -> Self {
        Tolerance { abs: 0.0, rel }
    }

    fn accept(&self, est: &Estimate) -> bool {
        est.error <= self.abs.max(self.rel * est.value.abs())
    }
}

struct Segment {
    a: f64,
    b: f64,
    est: Estimate,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.est.error == other.est.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.est.error.total_cmp(&other.est.error)
    }
}

/// Globally adaptive bisection on `[a, b]` driven by 7/15 panels.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: Tolerance, max_segments: usize) -> Result<Estimate> {
    let first = gk15(f, a, b);
    if !first.value.is_finite() {
        return Err(Error::NonFinite {
            context: "adaptive quadrature",
            location: format!("[{a:e}, {b:e}]"),
            value: first.value,
        });
    }
    let mut total = first;
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, est: first });
    while !tol.accept(&total) {
        if heap.len() >= max_segments {
            return Err(Error::Quadrature {
                context: "adaptive quadrature",
                partial: total.value,
                error_bound: total.error,
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval exhausted at machine resolution
            heap.push(worst);
            break;
        }
        let left = gk15(f, worst.a, mid);
        let right = gk15(f, mid, worst.b);
        total.value += left.value + right.value - worst.est.value;
        total.error += left.error + right.error - worst.est.error;
        heap.push(Segment {
            a: worst.a,
            b: mid,
            est: left,
        });
        heap.push(Segment {
            a: mid,
            b: worst.b,
            est: right,
        });
    }
    // recompute to shed accumulated cancellation in the running sums
    let mut value = 0.0;
    let mut error = 0.0;
    for seg in heap.iter() {
        value += seg.est.value;
        error += seg.est.error;
    }
    if !value.is_finite() {
        return Err(Error::NonFinite {
            context: "adaptive quadrature",
            location: format!("[{a:e}, {b:e}]"),
            value,
        });
    }
    Ok(Estimate { value, error })
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, by Newton iteration on
/// the three-term recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Sums an alternating series whose terms come from `term(k)`.
///
/// Partial sums are accelerated by repeated pairwise averaging (the Euler
/// transform in its averaging form) over a trailing window. The number of
/// terms doubles until two successive accelerated values agree.
pub fn alternating_sum<F: FnMut(usize) -> Result<f64>>(
    mut term: F,
    rel_tol: f64,
    abs_tol: f64,
    max_terms: usize,
) -> Result<Estimate> {
    let mut partials: Vec<f64> = Vec::with_capacity(64);
    let mut running = 0.0;
    let mut previous: Option<f64> = None;
    let mut n = 16usize;
    loop {
        while partials.len() < n {
            running += term(partials.len())?;
            partials.push(running);
        }
        let window = partials.len().min(32);
        let mut level: Vec<f64> = partials[partials.len() - window..].to_vec();
        while level.len() > 1 {
            level = level.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        }
        let current = level[0];
        if let Some(prev) = previous {
            let diff = (current - prev).abs();
            if diff <= abs_tol.max(rel_tol * current.abs()) {
                return Ok(Estimate {
                    value: current,
                    error: diff,
                });
            }
        }
        if n >= max_terms {
            return Err(Error::Quadrature {
                context: "alternating series",
                partial: current,
                error_bound: previous.map_or(f64::INFINITY, |p| (current - p).abs()),
            });
        }
        previous = Some(current);
        n *= 2;
    }
}

/// Midpoint composite rule of a function on a `d`-dimensional box.
pub fn midpoint_box<F: FnMut(&[f64]) -> Result<f64>>(
    lower: &[f64],
    upper: &[f64],
    resolution: usize,
    mut f: F,
) -> Result<f64> {
    let d = lower.len();
    let steps: Vec<f64> = (0..d).map(|k| (upper[k] - lower[k]) / resolution as f64).collect();
    let cell: f64 = steps.iter().product();
    let total_points = resolution.pow(d as u32);
    let mut point = vec![0.0; d];
    let mut sum = 0.0;
    for flat in 0..total_points {
        let mut rest = flat;
        for k in 0..d {
            let idx = rest % resolution;
            rest /= resolution;
            point[k] = lower[k] + (idx as f64 + 0.5) * steps[k];
        }
        sum += f(&point)?;
    }
    Ok(sum * cell)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gk15_is_exact_for_low_degree_polynomials() {
        let est = gk15(&|x: f64| 3.0 * x * x + 2.0 * x + 1.0, 0.0, 2.0);
        assert!((est.value - 14.0).abs() < 1e-13);
        assert!(est.error < 1e-12);
    }

    #[test]
    fn adaptive_handles_integrable_endpoint_singularity() {
        let f = |x: f64| x.powf(-0.5);
        let est = integrate(&f, 0.0, 1.0, Tolerance::rel(1e-10), 500).unwrap();
        assert!((est.value - 2.0).abs() < 1e-8, "{est:?}");
    }

    #[test]
    fn adaptive_reports_budget_exhaustion() {
        let f = |x: f64| (1.0 / x).sin() / x;
        let err = integrate(&f, 1e-9, 1.0, Tolerance::rel(1e-14), 4).unwrap_err();
        assert!(matches!(err, Error::Quadrature { .. }));
    }

    #[test]
    fn gauss_legendre_weights_sum_to_two_and_integrate_exactly() {
        for n in [1, 2, 5, 16, 64, 257] {
            let (x, w) = gauss_legendre(n);
            let s: f64 = w.iter().sum();
            assert!((s - 2.0).abs() < 1e-12, "n={n} sum={s}");
            let deg = (2 * (n - 1)).min(30) as i32;
            let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg)).sum();
            let exact = 2.0 / (deg as f64 + 1.0);
            assert!((q - exact).abs() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn alternating_harmonic_series_gives_log_two() {
        let est = alternating_sum(
            |k| Ok(if k % 2 == 0 { 1.0 } else { -1.0 } / (k as f64 + 1.0)),
            1e-12,
            0.0,
            4096,
        )
        .unwrap();
        assert!((est.value - 2f64.ln()).abs() < 1e-10, "{est:?}");
    }

    #[test]
    fn midpoint_box_integrates_bilinear_exactly() {
        let v = midpoint_box(&[0.0, -1.0], &[2.0, 1.0], 8, |p| Ok(p[0] * (1.0 + p[1]))).unwrap();
        assert!((v - 4.0).abs() < 1e-12);
    }
}
