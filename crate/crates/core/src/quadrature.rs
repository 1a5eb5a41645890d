//! Gauss quadrature rules.
//!
//! [`QuadRule1D`] integrates against `e^{-x²}` on ℝ and [`QuadRule2D`] is its
//! tensor square, integrating against `e^{-|z|²}` with respect to Lebesgue
//! area measure on ℂ (so the constant function has squared norm π). Weights
//! absorb the Gaussian factor: integrands are sampled without it.
//!
//! Hermite nodes start from the eigenvalues of the symmetric Jacobi matrix
//! (Golub–Welsch) and are then polished by Newton steps on the orthonormal
//! recurrence. Weights come from the Christoffel sum `1 / Σ_{n<Q} e_n(x)²`
//! rather than from eigenvector components, which keeps the tiny tail
//! weights accurate to full relative precision.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub const MAX_ORDER: usize = 512;

const RESCALE: f64 = 1e100;

/// Gauss–Hermite rule for the weight `e^{-x²}`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadRule1D {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

/// Tensor-product Gauss–Hermite rule for `e^{-|z|²}` on ℂ.
///
/// Node `i * Q + j` is `x_j + i·x_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadRule2D {
    base: QuadRule1D,
    nodes: Vec<Complex64>,
    weights: Vec<f64>,
}

pub fn build_rule_1d(order: usize) -> Result<QuadRule1D> {
    QuadRule1D::new(order)
}

pub fn build_rule_2d(order: usize) -> Result<QuadRule2D> {
    QuadRule2D::new(order)
}

impl QuadRule1D {
    pub fn new(order: usize) -> Result<Self> {
        if order == 0 || order > MAX_ORDER {
            return Err(Error::OrderOutOfRange(order));
        }
        let mut nodes = jacobi_eigenvalues(order);
        for x in nodes.iter_mut() {
            *x = newton_polish(order, *x);
        }
        symmetrize(&mut nodes, |a, b| (0.5 * (b - a), false));
        if order % 2 == 1 {
            nodes[order / 2] = 0.0;
        }
        let mut weights: Vec<f64> = nodes
            .iter()
            .map(|&x| (-christoffel_log_sum(order, x)).exp())
            .collect();
        symmetrize(&mut weights, |a, b| (0.5 * (a + b), true));
        Ok(Self { nodes, weights })
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `Σ wᵢ·valuesᵢ` for values sampled at the nodes.
    pub fn integrate(&self, values: &[f64]) -> Result<f64> {
        check_len(self.order(), values.len())?;
        Ok(self.weights.iter().zip(values).map(|(w, v)| w * v).sum())
    }

    pub fn integrate_fn<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

impl QuadRule2D {
    pub fn new(order: usize) -> Result<Self> {
        Ok(Self::from_base(QuadRule1D::new(order)?))
    }

    pub fn from_base(base: QuadRule1D) -> Self {
        let q = base.order();
        let mut nodes = Vec::with_capacity(q * q);
        let mut weights = Vec::with_capacity(q * q);
        for i in 0..q {
            for j in 0..q {
                nodes.push(Complex64::new(base.nodes[j], base.nodes[i]));
                weights.push(base.weights[i] * base.weights[j]);
            }
        }
        Self {
            base,
            nodes,
            weights,
        }
    }

    pub fn base(&self) -> &QuadRule1D {
        &self.base
    }

    /// Points per axis.
    pub fn order(&self) -> usize {
        self.base.order()
    }

    pub fn nodes(&self) -> &[Complex64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate(&self, values: &[Complex64]) -> Result<Complex64> {
        check_len(self.nodes.len(), values.len())?;
        Ok(self
            .weights
            .iter()
            .zip(values)
            .map(|(&w, &v)| v * w)
            .sum())
    }

    pub fn integrate_fn<F: Fn(Complex64) -> Complex64>(&self, f: F) -> Complex64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&z, &w)| f(z) * w)
            .sum()
    }
}

fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::LengthMismatch { expected, got });
    }
    Ok(())
}

/// Pairs entry `i` with entry `Q-1-i` and overwrites both from `pair(a, b)`.
/// The flag says whether the mirrored value keeps the sign (weights) or flips
/// it (nodes).
fn symmetrize(v: &mut [f64], pair: impl Fn(f64, f64) -> (f64, bool)) {
    let q = v.len();
    for i in 0..q / 2 {
        let (val, even) = pair(v[i], v[q - 1 - i]);
        v[q - 1 - i] = val;
        v[i] = if even { val } else { -val };
    }
}

fn jacobi_eigenvalues(order: usize) -> Vec<f64> {
    let mut jacobi = DMatrix::<f64>::zeros(order, order);
    for n in 1..order {
        let b = (n as f64 / 2.0).sqrt();
        jacobi[(n, n - 1)] = b;
        jacobi[(n - 1, n)] = b;
    }
    let mut eig: Vec<f64> = jacobi.symmetric_eigenvalues().iter().copied().collect();
    eig.sort_by(|a, b| a.total_cmp(b));
    eig
}

/// Runs the orthonormal recurrence up to `e_q` with periodic rescaling.
/// Returns `(e_{q-1}, e_q, Σ_{n<q} e_n², log_scale)`, all three values in
/// units of `exp(log_scale)` (the sum in units of `exp(2·log_scale)`).
fn orthonormal_run(q: usize, x: f64) -> (f64, f64, f64, f64) {
    let mut prev = 0.0;
    let mut cur = PI.powf(-0.25);
    let mut sum = cur * cur;
    let mut log_scale = 0.0;
    for n in 0..q {
        let nf = n as f64;
        let next = x * (2.0 / (nf + 1.0)).sqrt() * cur - (nf / (nf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        if n + 1 < q {
            sum += cur * cur;
        }
        if cur.abs() > RESCALE {
            prev /= RESCALE;
            cur /= RESCALE;
            sum /= RESCALE * RESCALE;
            log_scale += RESCALE.ln();
        }
    }
    (prev, cur, sum, log_scale)
}

fn newton_polish(q: usize, mut x: f64) -> f64 {
    for _ in 0..8 {
        let (em1, e, _, _) = orthonormal_run(q, x);
        let dx = e / ((2.0 * q as f64).sqrt() * em1);
        x -= dx;
        if dx.abs() <= 4.0 * f64::EPSILON * (1.0 + x.abs()) {
            break;
        }
    }
    x
}

/// `ln Σ_{n<q} e_n(x)²`.
fn christoffel_log_sum(q: usize, x: f64) -> f64 {
    let (_, _, sum, log_scale) = orthonormal_run(q, x);
    sum.ln() + 2.0 * log_scale
}

/// Gauss–Legendre nodes and weights on [-1, 1], nodes ascending.
pub fn gauss_legendre(points: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if points == 0 || points > MAX_ORDER {
        return Err(Error::OrderOutOfRange(points));
    }
    let n = points;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 2.0 * f64::EPSILON {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Ok((nodes, weights))
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
pub(crate) fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 1..n {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0) * x * p1 - kf * p0) / (kf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Legendre values `P_0(x) ..= P_n(x)`.
pub(crate) fn legendre_table(n: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(1.0);
    if n >= 1 {
        out.push(x);
    }
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0) * x * out[k] - kf * out[k - 1]) / (kf + 1.0);
        out.push(next);
    }
    out
}
