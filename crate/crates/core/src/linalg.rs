//! Small dense-vector kernels: tridiagonal solves, preconditioned conjugate
//! gradients, FFT convolutions and h-weighted norms.

use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `sqrt(h * sum u_i^2)`, the discrete L2 norm on a uniform grid.
pub fn norm_h(u: &[f64], h: f64) -> f64 {
    (h * dot(u, u)).sqrt()
}

/// Solves a symmetric tridiagonal system with diagonal `diag` and
/// off-diagonal `off` (`off[i]` couples `i` and `i+1`) by the Thomas
/// algorithm. Assumes diagonal dominance, so no pivoting.
pub fn solve_tridiagonal(diag: &[f64], off: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    debug_assert_eq!(off.len() + 1, n);
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut m = diag[0];
    c[0] = if n > 1 { off[0] / m } else { 0.0 };
    d[0] = rhs[0] / m;
    for i in 1..n {
        m = diag[i] - off[i - 1] * c[i - 1];
        if i + 1 < n {
            c[i] = off[i] / m;
        }
        d[i] = (rhs[i] - off[i - 1] * d[i - 1]) / m;
    }
    let mut x = d;
    for i in (0..n.saturating_sub(1)).rev() {
        x[i] -= c[i] * x[i + 1];
    }
    x
}

/// Cyclic variant: `corner` couples the first and last unknowns.
/// Sherman-Morrison correction on top of [`solve_tridiagonal`].
pub fn solve_cyclic_tridiagonal(diag: &[f64], off: &[f64], corner: f64, rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    if corner == 0.0 || n < 3 {
        return solve_tridiagonal(diag, off, rhs);
    }
    let gamma = -diag[0];
    let mut b = diag.to_vec();
    b[0] -= gamma;
    b[n - 1] -= corner * corner / gamma;
    let x = solve_tridiagonal(&b, off, rhs);
    let mut u = vec![0.0; n];
    u[0] = gamma;
    u[n - 1] = corner;
    let z = solve_tridiagonal(&b, off, &u);
    let factor = (x[0] + corner * x[n - 1] / gamma) / (1.0 + z[0] + corner * z[n - 1] / gamma);
    x.iter().zip(&z).map(|(xi, zi)| xi - factor * zi).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CgOutcome {
    pub iterations: usize,
    pub relative_residual: f64,
}

/// Jacobi-preconditioned conjugate gradients for an SPD operator.
pub fn conjugate_gradient<A: Fn(&[f64]) -> Vec<f64>>(
    apply: A,
    diag: &[f64],
    b: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<(Vec<f64>, CgOutcome)> {
    let n = b.len();
    let bnorm = norm2(b);
    if bnorm == 0.0 {
        return Ok((
            vec![0.0; n],
            CgOutcome {
                iterations: 0,
                relative_residual: 0.0,
            },
        ));
    }
    let mut x: Vec<f64> = b.iter().zip(diag).map(|(bi, di)| bi / di).collect();
    let ax = apply(&x);
    let mut r: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
    let mut z: Vec<f64> = r.iter().zip(diag).map(|(ri, di)| ri / di).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    for it in 0..max_iter {
        let res = norm2(&r) / bnorm;
        if res <= tol {
            return Ok((
                x,
                CgOutcome {
                    iterations: it,
                    relative_residual: res,
                },
            ));
        }
        let ap = apply(&p);
        let alpha = rz / dot(&p, &ap);
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        // recompute the true residual now and then against drift
        if it % 50 == 49 {
            let ax = apply(&x);
            for i in 0..n {
                r[i] = b[i] - ax[i];
            }
        }
        for i in 0..n {
            z[i] = r[i] / diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::Solver {
        iterations: max_iter,
        residual: norm2(&r) / bnorm,
    })
}

/// Circular convolution with a fixed real, even kernel of length `size`,
/// applied to vectors of length `n <= size` (zero padded).
#[derive(Clone)]
pub struct Convolution {
    size: usize,
    kernel_hat: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Convolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Convolution").field("size", &self.size).finish()
    }
}

impl Convolution {
    /// `kernel[m]` is the weight of offset `m` modulo `size`; it must be even.
    pub fn new(kernel: &[f64]) -> Self {
        let size = kernel.len();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(size);
        let inverse = planner.plan_fft_inverse(size);
        let mut buf: Vec<Complex<f64>> = kernel.iter().map(|&k| Complex::new(k, 0.0)).collect();
        forward.process(&mut buf);
        Convolution {
            size,
            kernel_hat: buf.iter().map(|c| c.re).collect(),
            forward,
            inverse,
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut buf = vec![Complex::new(0.0, 0.0); self.size];
        for (b, &v) in buf.iter_mut().zip(x) {
            b.re = v;
        }
        self.forward.process(&mut buf);
        for (b, k) in buf.iter_mut().zip(&self.kernel_hat) {
            *b *= k;
        }
        self.inverse.process(&mut buf);
        let scale = 1.0 / self.size as f64;
        buf[..x.len()].iter().map(|c| c.re * scale).collect()
    }
}

/// Real-to-real spectral multiplier `F^-1 diag(m) F` on periodic vectors.
#[derive(Clone)]
pub struct SpectralDiagonal {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for SpectralDiagonal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("SpectralDiagonal")
    }
}

impl SpectralDiagonal {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        SpectralDiagonal {
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    pub fn transform(&self, x: &[f64]) -> Vec<Complex<f64>> {
        let mut buf: Vec<Complex<f64>> = x.iter().map(|&v| Complex::new(v, 0.0)).collect();
        self.forward.process(&mut buf);
        buf
    }

    pub fn apply(&self, x: &[f64], multiplier: impl Fn(usize) -> f64) -> Vec<f64> {
        let mut buf = self.transform(x);
        for (k, b) in buf.iter_mut().enumerate() {
            *b *= multiplier(k);
        }
        self.inverse.process(&mut buf);
        let scale = 1.0 / x.len() as f64;
        buf.iter().map(|c| c.re * scale).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tri_apply(diag: &[f64], off: &[f64], corner: f64, x: &[f64]) -> Vec<f64> {
        let n = x.len();
        (0..n)
            .map(|i| {
                let mut v = diag[i] * x[i];
                if i > 0 {
                    v += off[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    v += off[i] * x[i + 1];
                }
                if i == 0 {
                    v += corner * x[n - 1];
                }
                if i == n - 1 {
                    v += corner * x[0];
                }
                v
            })
            .collect()
    }

    #[test]
    fn tridiagonal_solves() {
        let n = 9;
        let diag = vec![3.0; n];
        let off: Vec<f64> = (0..n - 1).map(|i| -1.0 - 0.1 * i as f64).collect();
        let rhs: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let x = solve_tridiagonal(&diag, &off, &rhs);
        let back = tri_apply(&diag, &off, 0.0, &x);
        assert!(back.iter().zip(&rhs).all(|(a, b)| (a - b).abs() < 1e-13));
        let x = solve_cyclic_tridiagonal(&diag, &off, -0.7, &rhs);
        let back = tri_apply(&diag, &off, -0.7, &x);
        assert!(back.iter().zip(&rhs).all(|(a, b)| (a - b).abs() < 1e-13));
    }

    #[test]
    fn cg_on_tridiagonal() {
        let n = 50;
        let diag = vec![2.5; n];
        let off = vec![-1.0; n - 1];
        let b: Vec<f64> = (0..n).map(|i| 1.0 + (i % 3) as f64).collect();
        let (x, out) = conjugate_gradient(|v| tri_apply(&diag, &off, 0.0, v), &diag, &b, 1e-12, 500).unwrap();
        assert!(out.relative_residual <= 1e-12);
        let direct = solve_tridiagonal(&diag, &off, &b);
        assert!(x.iter().zip(&direct).all(|(a, b)| (a - b).abs() < 1e-10));
        assert!(conjugate_gradient(|v| tri_apply(&diag, &off, 0.0, v), &diag, &b, 1e-30, 2).is_err());
    }

    #[test]
    fn convolution_matches_direct_sum() {
        let n = 6;
        let size = 2 * n;
        let mut kernel = vec![0.0; size];
        for m in 1..n {
            kernel[m] = 1.0 / m as f64;
            kernel[size - m] = 1.0 / m as f64;
        }
        let conv = Convolution::new(&kernel);
        let x: Vec<f64> = (0..n).map(|i| (i as f64 * 0.7).cos()).collect();
        let y = conv.apply(&x);
        for i in 0..n {
            let direct: f64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| x[j] / (i as f64 - j as f64).abs())
                .sum();
            assert!((y[i] - direct).abs() < 1e-12);
        }
    }
}
