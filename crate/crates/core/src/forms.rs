//! Grid discretizations of the three form families on a uniform 1-D grid.
//!
//! Every form stores the operator `M` in its "operator" scaling: the
//! discrete energy is `E_h(u, u) = h <u, M u>` and the resolvent solves
//! `(lambda + M) u = f`. Matrix entries reported by [`GridForm::entry`]
//! follow the same convention.

use std::f64::consts::PI;
use std::fmt;
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;

use crate::coeffs::{DiffusionCoefficient, JumpKernel};
use crate::error::{Error, Result};
use crate::levy::{power_tail_to_infinity, power_tail_to_zero, LevyExponent};
use crate::linalg::{conjugate_gradient, dot, solve_cyclic_tridiagonal, Convolution, SpectralDiagonal};
use crate::quad::{integrate, Tolerance};
use crate::tolerances::{CG_MAX_ITER, JUMP_TRUNCATION, RESOLVENT_RESIDUAL};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    /// Exterior values are zero.
    Killing,
    /// The window is a circle of length `2L`.
    Periodic,
}

/// Cell-centred grid `x_i = -L + (i + 1/2) h`, `h = 2L / N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    half_width: f64,
    points: usize,
    boundary: Boundary,
}

impl Grid1D {
    pub fn new(half_width: f64, points: usize, boundary: Boundary) -> Result<Self> {
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::invalid(
                "L",
                format!("half width must be positive, got {half_width}"),
            ));
        }
        if points < 16 {
            return Err(Error::invalid("N", format!("need at least 16 points, got {points}")));
        }
        Ok(Grid1D {
            half_width,
            points,
            boundary,
        })
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn len(&self) -> usize {
        self.points
    }

    pub fn is_empty(&self) -> bool {
        self.points == 0
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.points as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        -self.half_width + (i as f64 + 0.5) * self.spacing()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.points).map(|i| self.node(i)).collect()
    }

    /// Samples `f` at the nodes.
    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        (0..self.points).map(|i| f(self.node(i))).collect()
    }

    /// Signed frequency `pi k / L` of FFT slot `slot`, with `k` in
    /// `[-N/2, N/2)`.
    pub fn frequency(&self, slot: usize) -> f64 {
        let n = self.points as i64;
        let k = if (slot as i64) < n / 2 {
            slot as i64
        } else {
            slot as i64 - n
        };
        PI * k as f64 / self.half_width
    }

    pub(crate) fn check_vector(&self, u: &[f64]) -> Result<()> {
        if u.len() != self.points {
            return Err(Error::Dimension {
                expected: self.points,
                found: u.len(),
            });
        }
        Ok(())
    }
}

/// How sub-grid and near-diagonal jumps enter a jump form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpAssembly {
    /// Jumps with `|w| < correction_radius * h` are folded into a local
    /// second-difference term.
    pub correction_radius: f64,
    /// Replace the point value `J(mh)` of near offsets by the cell average
    /// of `w^2 J(w)` divided by `(mh)^2`, which is exact for locally linear
    /// functions.
    pub moment_weights: bool,
}

impl Default for JumpAssembly {
    fn default() -> Self {
        JumpAssembly {
            correction_radius: 0.5,
            moment_weights: true,
        }
    }
}

/// Offsets below this count use moment weights when enabled.
const MOMENT_OFFSETS: usize = 16;
/// Number of periodic images summed explicitly before the tail integral.
const IMAGE_TERMS: usize = 64;

#[derive(Clone)]
enum Operator {
    /// Flux form; `flux[k]` is the conductance of the interface left of
    /// node `k` (`flux[N]` is the right boundary). Entries are already
    /// divided by `h^2`.
    Flux {
        flux: Vec<f64>,
    },
    Jump(Box<JumpOperator>),
    Multiplier {
        symbol: Vec<f64>,
        fft: SpectralDiagonal,
    },
    Zero,
}

#[derive(Clone)]
struct JumpOperator {
    /// `h * K(offset)` per offset modulo the convolution size.
    weights: Vec<f64>,
    conv: Convolution,
    amp: Vec<f64>,
    /// `h * (K * 1)` and `h * (K * amp)`.
    conv_one: Vec<f64>,
    conv_amp: Vec<f64>,
    /// Local second-difference conductances divided by `h^2`.
    local: Vec<f64>,
    /// Killing rate at each node.
    killing: Vec<f64>,
}

/// Which family a form discretizes.
#[derive(Debug, Clone)]
pub enum FormFamily {
    Diffusion(String),
    Jump(JumpAssembly),
    Multiplier,
    Zero,
}

/// Symmetric positive-semidefinite grid operator.
#[derive(Clone)]
pub struct GridForm {
    grid: Grid1D,
    family: FormFamily,
    op: Arc<Operator>,
}

impl fmt::Debug for GridForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GridForm")
            .field("grid", &self.grid)
            .field("family", &self.family)
            .finish()
    }
}

/// Flux-form discretization of `int a (u')^2`.
pub fn assemble_diffusion(a: &DiffusionCoefficient, grid: Grid1D) -> Result<GridForm> {
    if a.dim() != 1 {
        return Err(Error::Precondition(format!(
            "diffusion grids are 1-D, coefficient has d = {}",
            a.dim()
        )));
    }
    let n = grid.len();
    let h = grid.spacing();
    let l = grid.half_width();
    let mut flux = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let x = -l + k as f64 * h;
        let v = a.scalar_at(x);
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::Precondition(format!("a({x}) = {v} is not positive")));
        }
        flux.push(v / (h * h));
    }
    if grid.boundary() == Boundary::Periodic {
        // -L and L are the same interface on the circle
        flux[n] = flux[0];
    }
    Ok(GridForm {
        grid,
        family: FormFamily::Diffusion(a.label().to_string()),
        op: Arc::new(Operator::Flux { flux }),
    })
}

/// Zero form on `grid`.
pub fn zero_form(grid: Grid1D) -> GridForm {
    GridForm {
        grid,
        family: FormFamily::Zero,
        op: Arc::new(Operator::Zero),
    }
}

pub fn assemble_jump(kernel: &JumpKernel, grid: Grid1D) -> Result<GridForm> {
    assemble_jump_with(kernel, grid, JumpAssembly::default())
}

/// Discretizes `1/2 iint (u(x) - u(y))^2 J(x, y) dx dy`.
///
/// Periodic grids use the image-summed kernel; killing grids add the rate
/// of jumps leaving the window, with the amplitude frozen at the node.
pub fn assemble_jump_with(kernel: &JumpKernel, grid: Grid1D, opts: JumpAssembly) -> Result<GridForm> {
    if kernel.dim() != 1 {
        return Err(Error::Precondition("jump grids are 1-D".into()));
    }
    if !(opts.correction_radius > 0.0 && opts.correction_radius <= 1.0) {
        return Err(Error::invalid("correction_radius", "must lie in (0, 1]"));
    }
    let n = grid.len();
    let h = grid.spacing();
    let l = grid.half_width();
    let periodic = grid.boundary() == Boundary::Periodic;
    let rel = 1e-10;

    let radial = |w: f64| kernel.radial(w);
    let moment = |dist: f64| -> Result<f64> {
        let f = |w: f64| w * w * radial(w);
        let lo = dist - 0.5 * h;
        let cell = if lo <= 0.0 {
            power_tail_to_zero(&f, dist + 0.5 * h, rel, 2_000, "jump cell moment")?
        } else {
            integrate(&f, lo, dist + 0.5 * h, Tolerance::rel(rel), 400)?
        };
        Ok(cell.value / (h * dist * dist))
    };
    let point_weight = |m: usize, dist: f64| -> Result<f64> {
        if opts.moment_weights && m < MOMENT_OFFSETS {
            moment(dist)
        } else {
            Ok(radial(dist))
        }
    };
    let offset_weight = |m: usize| -> Result<f64> {
        if m == 0 && !periodic {
            return Ok(0.0);
        }
        if !periodic {
            return point_weight(m, m as f64 * h);
        }
        // distance on the circle plus all images
        let period = 2.0 * l;
        let base = m as f64 * h;
        let mut s = if m == 0 { 0.0 } else { point_weight(m, base)? };
        for j in 1..=IMAGE_TERMS {
            s += radial(j as f64 * period + base) + radial(j as f64 * period - base);
        }
        let tail_start = (IMAGE_TERMS as f64 + 0.5) * period;
        let tail = |y: f64| (radial(y + base) + radial(y - base)) / period;
        s += power_tail_to_infinity(&tail, tail_start, rel, 2_000, "image tail")?.value;
        Ok(s)
    };

    let size = if periodic { n } else { 2 * n };
    let raw: Vec<f64> = (0..=n / if periodic { 2 } else { 1 })
        .into_par_iter()
        .map(|m| offset_weight(m.min(n.saturating_sub(1))))
        .collect::<Result<_>>()?;
    let mut weights = vec![0.0; size];
    for m in 1..size {
        let dist = if periodic {
            m.min(size - m)
        } else if m < n {
            m
        } else if m > n {
            size - m
        } else {
            continue;
        };
        weights[m] = h * raw[dist];
    }
    let max = weights.iter().cloned().fold(0.0, f64::max);
    for w in weights.iter_mut() {
        if !w.is_finite() {
            return Err(Error::NonFinite {
                context: "jump weights",
                location: "offset table".into(),
                value: *w,
            });
        }
        if *w < JUMP_TRUNCATION * max {
            *w = 0.0;
        }
    }

    let amp = grid.sample(|x| kernel.amplitude(&[x]));
    let conv = Convolution::new(&weights);
    let conv_one = conv.apply(&vec![1.0; n]);
    let conv_amp = conv.apply(&amp);

    // local conductance from jumps shorter than the correction radius
    let rho = opts.correction_radius * h;
    let f = |w: f64| w * w * radial(w);
    let near_moment = power_tail_to_zero(&f, rho, rel, 2_000, "local correction")?.value;
    let kappa: Vec<f64> = amp.iter().map(|a| a * near_moment).collect();
    let mut local = vec![0.0; n + 1];
    for k in 0..=n {
        let left = if k == 0 {
            if periodic {
                kappa[n - 1]
            } else {
                kappa[0]
            }
        } else {
            kappa[k - 1]
        };
        let right = if k == n {
            if periodic {
                kappa[0]
            } else {
                kappa[n - 1]
            }
        } else {
            kappa[k]
        };
        local[k] = 0.5 * (left + right) / (h * h);
    }
    if periodic {
        local[n] = local[0];
    }

    let killing = if periodic {
        vec![0.0; n]
    } else {
        let nodes = grid.nodes();
        nodes
            .par_iter()
            .zip(&amp)
            .map(|(&x, &a)| {
                let out_right = power_tail_to_infinity(&radial, l - x, rel, 2_000, "killing rate")?.value;
                let out_left = power_tail_to_infinity(&radial, l + x, rel, 2_000, "killing rate")?.value;
                Ok(a * (out_right + out_left))
            })
            .collect::<Result<Vec<f64>>>()?
    };

    Ok(GridForm {
        grid,
        family: FormFamily::Jump(opts),
        op: Arc::new(Operator::Jump(Box::new(JumpOperator {
            weights,
            conv,
            amp,
            conv_one,
            conv_amp,
            local,
            killing,
        }))),
    })
}

/// Fourier multiplier form with symbol `phi(pi k / L)` on a periodic grid.
pub fn assemble_multiplier(e: &LevyExponent, grid: Grid1D) -> Result<GridForm> {
    if grid.boundary() != Boundary::Periodic {
        return Err(Error::Precondition("multiplier forms need a periodic grid".into()));
    }
    if e.dim() != 1 {
        return Err(Error::Precondition("multiplier grids are 1-D".into()));
    }
    let n = grid.len();
    // phi is even: evaluate k = 0..=N/2 once
    let half: Vec<f64> = (0..=n / 2)
        .into_par_iter()
        .map(|k| e.eval(&[PI * k as f64 / grid.half_width()]).map(|est| est.value))
        .collect::<Result<_>>()?;
    let symbol = (0..n)
        .map(|slot| half[if slot <= n / 2 { slot } else { n - slot }])
        .collect();
    Ok(multiplier_from_symbol(symbol, grid))
}

/// Multiplier form from precomputed symbol values in FFT slot order.
pub fn multiplier_from_symbol(symbol: Vec<f64>, grid: Grid1D) -> GridForm {
    GridForm {
        grid,
        family: FormFamily::Multiplier,
        op: Arc::new(Operator::Multiplier {
            symbol,
            fft: SpectralDiagonal::new(grid.len()),
        }),
    }
}

impl GridForm {
    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn family(&self) -> &FormFamily {
        &self.family
    }

    pub fn is_multiplier(&self) -> bool {
        matches!(*self.op, Operator::Multiplier { .. })
    }

    /// Symbol values in FFT slot order, for multiplier forms.
    pub fn symbol(&self) -> Option<&[f64]> {
        match &*self.op {
            Operator::Multiplier { symbol, .. } => Some(symbol),
            _ => None,
        }
    }

    /// `M u`.
    pub fn apply(&self, u: &[f64]) -> Result<Vec<f64>> {
        self.grid.check_vector(u)?;
        Ok(self.apply_unchecked(u))
    }

    fn apply_unchecked(&self, u: &[f64]) -> Vec<f64> {
        let n = u.len();
        let periodic = self.grid.boundary() == Boundary::Periodic;
        match &*self.op {
            Operator::Zero => vec![0.0; n],
            Operator::Flux { flux } => flux_apply(flux, u, periodic),
            Operator::Jump(j) => {
                let ku = j.conv.apply(u);
                let au: Vec<f64> = u.iter().zip(&j.amp).map(|(a, b)| a * b).collect();
                let kau = j.conv.apply(&au);
                let mut out = flux_apply(&j.local, u, periodic);
                for i in 0..n {
                    out[i] += 0.5 * (j.amp[i] * (j.conv_one[i] * u[i] - ku[i]) + (j.conv_amp[i] * u[i] - kau[i]))
                        + j.killing[i] * u[i];
                }
                out
            }
            Operator::Multiplier { symbol, fft } => fft.apply(u, |k| symbol[k]),
        }
    }

    /// `E_h(u, u) = h <u, M u>`.
    pub fn energy(&self, u: &[f64]) -> Result<f64> {
        self.grid.check_vector(u)?;
        let h = self.grid.spacing();
        Ok(match &*self.op {
            Operator::Flux { flux } => h * flux_energy(flux, u, self.grid.boundary() == Boundary::Periodic),
            Operator::Multiplier { symbol, fft } => {
                let hat = fft.transform(u);
                h / u.len() as f64 * hat.iter().zip(symbol).map(|(c, s)| c.norm_sqr() * s).sum::<f64>()
            }
            _ => h * dot(u, &self.apply_unchecked(u)),
        })
    }

    /// Diagonal of `M`.
    pub fn diagonal(&self) -> Vec<f64> {
        let n = self.grid.len();
        let periodic = self.grid.boundary() == Boundary::Periodic;
        match &*self.op {
            Operator::Zero => vec![0.0; n],
            Operator::Flux { flux } => (0..n).map(|i| flux[i] + flux[i + 1]).collect(),
            Operator::Jump(j) => {
                let _ = periodic;
                (0..n)
                    .map(|i| {
                        0.5 * (j.amp[i] * j.conv_one[i] + j.conv_amp[i]) + j.local[i] + j.local[i + 1] + j.killing[i]
                    })
                    .collect()
            }
            Operator::Multiplier { symbol, .. } => vec![symbol.iter().sum::<f64>() / n as f64; n],
        }
    }

    /// Entry `M_ij`.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        let n = self.grid.len();
        let periodic = self.grid.boundary() == Boundary::Periodic;
        if i == j {
            return self.diagonal()[i];
        }
        match &*self.op {
            Operator::Zero => 0.0,
            Operator::Flux { flux } => flux_entry(flux, i, j, n, periodic),
            Operator::Jump(jo) => {
                let size = jo.conv.size();
                let m = (i as isize - j as isize).rem_euclid(size as isize) as usize;
                -0.5 * (jo.amp[i] + jo.amp[j]) * jo.weights[m] + flux_entry(&jo.local, i, j, n, periodic)
            }
            Operator::Multiplier { symbol, .. } => {
                let m = (i as isize - j as isize).rem_euclid(n as isize) as f64;
                (0..n)
                    .map(|k| symbol[k] * (2.0 * PI * k as f64 * m / n as f64).cos())
                    .sum::<f64>()
                    / n as f64
            }
        }
    }

    /// Solves `(lambda + M) u = f`; returns the solution and the iteration
    /// count (0 for direct solves).
    pub fn solve_shifted(&self, lambda: f64, f: &[f64]) -> Result<(Vec<f64>, usize)> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::invalid("lambda", format!("must be positive, got {lambda}")));
        }
        self.grid.check_vector(f)?;
        let n = f.len();
        let periodic = self.grid.boundary() == Boundary::Periodic;
        match &*self.op {
            Operator::Zero => Ok((f.iter().map(|v| v / lambda).collect(), 0)),
            Operator::Multiplier { symbol, fft } => Ok((fft.apply(f, |k| 1.0 / (lambda + symbol[k])), 0)),
            Operator::Flux { flux } => {
                let diag: Vec<f64> = (0..n).map(|i| lambda + flux[i] + flux[i + 1]).collect();
                let off: Vec<f64> = (1..n).map(|k| -flux[k]).collect();
                let corner = if periodic { -flux[0] } else { 0.0 };
                let solve = |rhs: &[f64]| solve_cyclic_tridiagonal(&diag, &off, corner, rhs);
                let mut u = solve(f);
                // refinement with the residual in flux form
                for _ in 0..3 {
                    let mu = flux_apply(flux, &u, periodic);
                    let r: Vec<f64> = (0..n).map(|i| f[i] - lambda * u[i] - mu[i]).collect();
                    let du = solve(&r);
                    u.iter_mut().zip(&du).for_each(|(a, b)| *a += b);
                }
                Ok((u, 0))
            }
            Operator::Jump(_) => {
                let diag: Vec<f64> = self.diagonal().iter().map(|d| d + lambda).collect();
                let apply = |v: &[f64]| {
                    let mut out = self.apply_unchecked(v);
                    out.iter_mut().zip(v).for_each(|(o, x)| *o += lambda * x);
                    out
                };
                let (u, outcome) = conjugate_gradient(apply, &diag, f, 0.1 * RESOLVENT_RESIDUAL, CG_MAX_ITER)?;
                Ok((u, outcome.iterations))
            }
        }
    }

    /// Writes nonzero entries as `row col value` lines.
    pub fn export_coordinates(&self, path: &Path) -> Result<()> {
        let n = self.grid.len();
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = std::io::BufWriter::new(file);
        let diag = self.diagonal();
        for i in 0..n {
            for j in 0..n {
                let v = if i == j { diag[i] } else { self.entry(i, j) };
                if v != 0.0 {
                    writeln!(w, "{i} {j} {v:.17e}").map_err(|e| Error::io(path, e))?;
                }
            }
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}

fn flux_apply(flux: &[f64], u: &[f64], periodic: bool) -> Vec<f64> {
    let n = u.len();
    (0..n)
        .map(|i| {
            let left = if i > 0 {
                u[i - 1]
            } else if periodic {
                u[n - 1]
            } else {
                0.0
            };
            let right = if i + 1 < n {
                u[i + 1]
            } else if periodic {
                u[0]
            } else {
                0.0
            };
            flux[i] * (u[i] - left) + flux[i + 1] * (u[i] - right)
        })
        .collect()
}

/// `sum_k flux_k (u_k - u_{k-1})^2` over all interfaces.
fn flux_energy(flux: &[f64], u: &[f64], periodic: bool) -> f64 {
    let n = u.len();
    let mut s = 0.0;
    for k in 1..n {
        let d = u[k] - u[k - 1];
        s += flux[k] * d * d;
    }
    if periodic {
        let d = u[0] - u[n - 1];
        s += flux[0] * d * d;
    } else {
        s += flux[0] * u[0] * u[0] + flux[n] * u[n - 1] * u[n - 1];
    }
    s
}

fn flux_entry(flux: &[f64], i: usize, j: usize, n: usize, periodic: bool) -> f64 {
    if j + 1 == i {
        -flux[i]
    } else if i + 1 == j {
        -flux[j]
    } else if periodic && ((i == 0 && j == n - 1) || (i == n - 1 && j == 0)) {
        -flux[0]
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::{make_prop15_coefficient, OrderFunction, Prop15Variant};

    fn unit() -> DiffusionCoefficient {
        DiffusionCoefficient::scalar("1", |_| 1.0)
    }

    #[test]
    fn grid_geometry() {
        let g = Grid1D::new(2.0, 16, Boundary::Killing).unwrap();
        assert_eq!(g.spacing(), 0.25);
        assert_eq!(g.node(0), -1.875);
        assert!((g.spacing() * g.len() as f64 - 4.0).abs() == 0.0);
        assert!(Grid1D::new(1.0, 8, Boundary::Killing).is_err());
        assert!((g.frequency(15) + PI / 2.0).abs() < 1e-15);
        assert!((g.frequency(8) + 4.0 * PI).abs() < 1e-15);
    }

    #[test]
    fn diffusion_sine_energy() {
        let l = 3.0;
        for n in [256, 512] {
            let g = Grid1D::new(l, n, Boundary::Periodic).unwrap();
            let form = assemble_diffusion(&unit(), g).unwrap();
            let u = g.sample(|x| (PI * x / l).sin());
            let e = form.energy(&u).unwrap();
            assert!((e - PI * PI / l).abs() < 2e-4 * PI * PI / l, "n={n} e={e}");
            let c = form.energy(&vec![1.0; n]).unwrap();
            assert!(c.abs() < 1e-20);
        }
        let g = Grid1D::new(5.0, 64, Boundary::Killing).unwrap();
        let form = assemble_diffusion(&make_prop15_coefficient(Prop15Variant::ConservativeLimit).unwrap(), g).unwrap();
        assert!(form.energy(&vec![1.0; 64]).unwrap() > 0.0);
    }

    #[test]
    fn hat_function_energy_is_two() {
        // the kink sits between two nodes, so the defect is O(h)
        let mut prev = f64::INFINITY;
        for n in [1024, 4096] {
            let g = Grid1D::new(8.0, n, Boundary::Killing).unwrap();
            let form = assemble_diffusion(&unit(), g).unwrap();
            let u = g.sample(|x| (1.0 - x.abs()).max(0.0));
            let err = (form.energy(&u).unwrap() - 2.0).abs();
            assert!(err <= 2.0 * g.spacing() && err < prev, "n={n} err={err}");
            prev = err;
        }
    }

    #[test]
    fn energy_matches_quadratic_form_and_entries() {
        let g = Grid1D::new(4.0, 32, Boundary::Killing).unwrap();
        let form = assemble_diffusion(&DiffusionCoefficient::scalar("v", |x| 2.0 + x.sin()), g).unwrap();
        let u = g.sample(|x| (-x * x).exp() + 0.1 * x);
        let mu = form.apply(&u).unwrap();
        let direct = g.spacing() * dot(&u, &mu);
        assert!((form.energy(&u).unwrap() - direct).abs() < 1e-12 * direct);
        for i in 0..32 {
            let row: f64 = (0..32).map(|j| form.entry(i, j) * u[j]).sum();
            assert!((row - mu[i]).abs() < 1e-9 * mu[i].abs().max(1.0));
        }
    }

    #[test]
    fn shifted_solves_have_small_residuals() {
        let g = Grid1D::new(10.0, 256, Boundary::Periodic).unwrap();
        let f = g.sample(|x| (-x * x).exp());
        let kernel = JumpKernel::translation_invariant(1, OrderFunction::constant(1.0).unwrap());
        let forms = [
            assemble_diffusion(&unit(), g).unwrap(),
            assemble_jump(&kernel, g).unwrap(),
            multiplier_from_symbol((0..256).map(|k| g.frequency(k).powi(2)).collect(), g),
        ];
        for form in &forms {
            let (u, _) = form.solve_shifted(1.0, &f).unwrap();
            let mu = form.apply(&u).unwrap();
            let res: f64 = (0..256).map(|i| (u[i] + mu[i] - f[i]).powi(2)).sum::<f64>().sqrt();
            assert!(res <= 1e-10 * crate::linalg::norm2(&f), "{form:?} res={res}");
        }
    }

    #[test]
    fn jump_entries_match_operator() {
        for boundary in [Boundary::Periodic, Boundary::Killing] {
            let g = Grid1D::new(4.0, 32, boundary).unwrap();
            let kernel = crate::coeffs::sine_amplitude_kernel(
                crate::coeffs::recurrent_to_transient_order(Some(2)).unwrap(),
                1.0,
                0.5,
                (0.29, 1.5),
            )
            .unwrap();
            let form = assemble_jump(&kernel, g).unwrap();
            let u = g.sample(|x| (0.7 * x).cos() + 0.2);
            let mu = form.apply(&u).unwrap();
            for i in 0..32 {
                let row: f64 = (0..32).map(|j| form.entry(i, j) * u[j]).sum();
                assert!((row - mu[i]).abs() < 1e-9 * mu.iter().map(|v| v.abs()).fold(0.0, f64::max));
                for j in 0..32 {
                    assert!((form.entry(i, j) - form.entry(j, i)).abs() <= 1e-12 * form.entry(i, i).abs());
                    if i != j {
                        assert!(form.entry(i, j) <= 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn multiplier_requires_periodic_grid() {
        let g = Grid1D::new(4.0, 32, Boundary::Killing).unwrap();
        let e = LevyExponent::gaussian(1, vec![2.0]).unwrap();
        assert!(assemble_multiplier(&e, g).is_err());
    }
}
