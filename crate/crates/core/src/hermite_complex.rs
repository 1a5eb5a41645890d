//! Complex Hermite (Itô) basis of `L²(ℂ, e^{-|z|²})`.
//!
//! `H_{m,n}(z, z̄)` satisfies `H_{m+1,n} = z·H_{m,n} - n·H_{m,n-1}` with
//! `H_{0,n} = z̄ⁿ`, and `‖H_{m,n}‖² = π m! n!` for the area measure. On the
//! orthonormal functions `ε_{m,n}` the operator `∂̄` lowers `n` with weight
//! `√n` and `∂` lowers `m` with weight `√m`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature::QuadRule2D;

/// Largest index accepted by [`eval_ito`].
pub const MAX_ITO_INDEX: usize = 60;

/// Coefficients `c_{m,n}` against `ε_{m,n}`, for `m ≤ M`, `n ≤ N`.
///
/// Square arrays (`M = N`) are the usual case; operator images are
/// rectangular because dropped equation rows are not zero-padded.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexCoeffs {
    m_max: usize,
    n_max: usize,
    data: Vec<Complex64>,
}

impl ComplexCoeffs {
    pub fn zeros(degree: usize) -> Self {
        Self::zeros_rect(degree, degree)
    }

    pub fn zeros_rect(m_max: usize, n_max: usize) -> Self {
        Self {
            m_max,
            n_max,
            data: vec![Complex64::new(0.0, 0.0); (m_max + 1) * (n_max + 1)],
        }
    }

    /// `ε_{m,n}` inside a square array of the given degree (grown if needed).
    pub fn unit(degree: usize, m: usize, n: usize) -> Self {
        let mut c = Self::zeros(degree.max(m).max(n));
        c.set(m, n, Complex64::new(1.0, 0.0));
        c
    }

    /// Square array from row-major data of length `(N+1)²`.
    pub fn from_vec(degree: usize, data: Vec<Complex64>) -> Result<Self> {
        let expected = (degree + 1) * (degree + 1);
        if data.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                got: data.len(),
            });
        }
        Ok(Self {
            m_max: degree,
            n_max: degree,
            data,
        })
    }

    /// Largest index along either axis.
    pub fn degree(&self) -> usize {
        self.m_max.max(self.n_max)
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.m_max, self.n_max)
    }

    pub fn is_square(&self) -> bool {
        self.m_max == self.n_max
    }

    fn idx(&self, m: usize, n: usize) -> usize {
        m * (self.n_max + 1) + n
    }

    pub fn get(&self, m: usize, n: usize) -> Complex64 {
        if m > self.m_max || n > self.n_max {
            return Complex64::new(0.0, 0.0);
        }
        self.data[self.idx(m, n)]
    }

    pub fn set(&mut self, m: usize, n: usize, value: Complex64) {
        let i = self.idx(m, n);
        self.data[i] = value;
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn norm_sq(&self) -> f64 {
        self.data.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Copy into an `M' × N'` array, zero-padding or truncating.
    pub fn resized(&self, m_max: usize, n_max: usize) -> Self {
        let mut out = Self::zeros_rect(m_max, n_max);
        for m in 0..=m_max.min(self.m_max) {
            for n in 0..=n_max.min(self.n_max) {
                out.set(m, n, self.get(m, n));
            }
        }
        out
    }

    /// Nonzero entries as `(m, n, value)` in row-major order.
    pub fn nonzeros(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        let cols = self.n_max + 1;
        self.data
            .iter()
            .enumerate()
            .filter(|(_, v)| v.re != 0.0 || v.im != 0.0)
            .map(move |(i, &v)| (i / cols, i % cols, v))
    }
}

fn check_index(m: usize, n: usize) -> Result<()> {
    for i in [m, n] {
        if i > MAX_ITO_INDEX {
            return Err(Error::IndexOutOfRange {
                index: i,
                limit: MAX_ITO_INDEX,
            });
        }
    }
    Ok(())
}

/// `H_{m,n}(z, z̄)` by the recurrence in `m`.
pub fn eval_ito(m: usize, n: usize, z: Complex64) -> Result<Complex64> {
    check_index(m, n)?;
    let zb = z.conj();
    // row[j] holds H_{i,j} for the current i
    let mut row: Vec<Complex64> = Vec::with_capacity(n + 1);
    row.push(Complex64::new(1.0, 0.0));
    for j in 1..=n {
        row.push(row[j - 1] * zb);
    }
    for _ in 0..m {
        for j in (0..=n).rev() {
            let lower = if j > 0 { row[j - 1] * j as f64 } else { Complex64::new(0.0, 0.0) };
            row[j] = z * row[j] - lower;
        }
    }
    Ok(row[n])
}

/// `H_{m,n}` from the closed form `Σ_j (-1)^j j! C(m,j) C(n,j) z^{m-j} z̄^{n-j}`.
pub fn eval_ito_closed_form(m: usize, n: usize, z: Complex64) -> Result<Complex64> {
    check_index(m, n)?;
    let zb = z.conj();
    let mut sum = Complex64::new(0.0, 0.0);
    for j in 0..=m.min(n) {
        let coeff = (-1f64).powi(j as i32) * factorial(j) * binomial(m, j) * binomial(n, j);
        sum += z.powu((m - j) as u32) * zb.powu((n - j) as u32) * coeff;
    }
    Ok(sum)
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

/// All `ε_{m,n}(z)` for `m ≤ m_max`, `n ≤ n_max`, row-major, by
/// `ε_{m+1,n} = (z·ε_{m,n} - √n·ε_{m,n-1}) / √(m+1)`.
pub fn normalized_table(m_max: usize, n_max: usize, z: Complex64) -> Vec<Complex64> {
    let cols = n_max + 1;
    let mut out = vec![Complex64::new(0.0, 0.0); (m_max + 1) * cols];
    let zb = z.conj();
    out[0] = Complex64::new(1.0 / PI.sqrt(), 0.0);
    for n in 1..=n_max {
        out[n] = out[n - 1] * zb / (n as f64).sqrt();
    }
    for m in 0..m_max {
        let inv = 1.0 / ((m + 1) as f64).sqrt();
        for n in 0..=n_max {
            let mut v = z * out[m * cols + n];
            if n > 0 {
                v -= out[m * cols + n - 1] * (n as f64).sqrt();
            }
            out[(m + 1) * cols + n] = v * inv;
        }
    }
    out
}

/// `ε_{m,n}(z)`.
pub fn eval_normalized(m: usize, n: usize, z: Complex64) -> Complex64 {
    normalized_table(m, n, z)[m * (n + 1) + n]
}

/// `c_{m,n} = Σ wᵢ conj(ε_{m,n}(zᵢ)) vᵢ` over the tensor rule.
pub fn analyze_c(samples: &[Complex64], rule: &QuadRule2D, degree: usize) -> Result<ComplexCoeffs> {
    let required = 2 * degree + 2;
    if rule.order() < required {
        return Err(Error::InsufficientOrder {
            order: rule.order(),
            degree,
            required,
        });
    }
    if samples.len() != rule.nodes().len() {
        return Err(Error::LengthMismatch {
            expected: rule.nodes().len(),
            got: samples.len(),
        });
    }
    let mut out = ComplexCoeffs::zeros(degree);
    for ((&z, &w), &v) in rule.nodes().iter().zip(rule.weights()).zip(samples) {
        if w == 0.0 {
            continue;
        }
        let basis = normalized_table(degree, degree, z);
        for (c, e) in out.data.iter_mut().zip(&basis) {
            *c += e.conj() * v * w;
        }
    }
    Ok(out)
}

/// Pointwise `Σ c_{m,n} ε_{m,n}(z)`.
pub fn synthesize_c(c: &ComplexCoeffs, points: &[Complex64]) -> Vec<Complex64> {
    points
        .iter()
        .map(|&z| {
            normalized_table(c.m_max, c.n_max, z)
                .iter()
                .zip(&c.data)
                .map(|(e, c)| e * c)
                .sum()
        })
        .collect()
}

/// Which complex lowering operator a [`ComplexLowering`] represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComplexLoweringKind {
    /// `∂̄^k`: lowers `n` only.
    Dbar,
    /// `∂^k ∂̄^k`: lowers both indices.
    Mixed,
}

/// `∂̄^k` or `∂^k∂̄^k` on the square array of degree `N`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexLowering {
    kind: ComplexLoweringKind,
    k: usize,
    degree: usize,
}

/// `√(n!/(n-k)!)`, zero for `n < k`.
pub fn falling_sqrt(k: usize, n: usize) -> f64 {
    if n < k {
        return 0.0;
    }
    (0..k).map(|j| ((n - j) as f64).sqrt()).product()
}

fn lowering(kind: ComplexLoweringKind, k: usize, degree: usize) -> Result<ComplexLowering> {
    if k == 0 {
        return Err(Error::ZeroOrder);
    }
    if k > degree {
        return Err(Error::OrderExceedsDegree { k, degree });
    }
    Ok(ComplexLowering { kind, k, degree })
}

pub fn dbar_matrix(k: usize, degree: usize) -> Result<ComplexLowering> {
    lowering(ComplexLoweringKind::Dbar, k, degree)
}

pub fn mixed_matrix(k: usize, degree: usize) -> Result<ComplexLowering> {
    lowering(ComplexLoweringKind::Mixed, k, degree)
}

impl ComplexLowering {
    pub fn kind(&self) -> ComplexLoweringKind {
        self.kind
    }

    pub fn order(&self) -> usize {
        self.k
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Weight of `ε_{m,n} ↦ weight·ε_{target}`.
    pub fn weight(&self, m: usize, n: usize) -> f64 {
        match self.kind {
            ComplexLoweringKind::Dbar => falling_sqrt(self.k, n),
            ComplexLoweringKind::Mixed => falling_sqrt(self.k, m) * falling_sqrt(self.k, n),
        }
    }

    /// Index that `(m, n)` is lowered to, if any.
    pub fn target(&self, m: usize, n: usize) -> Option<(usize, usize)> {
        match self.kind {
            ComplexLoweringKind::Dbar => (n >= self.k).then(|| (m, n - self.k)),
            ComplexLoweringKind::Mixed => {
                (m >= self.k && n >= self.k).then(|| (m - self.k, n - self.k))
            }
        }
    }

    /// Shape of the retained image rows.
    pub fn image_shape(&self) -> (usize, usize) {
        let d = self.degree;
        match self.kind {
            ComplexLoweringKind::Dbar => (d, d - self.k),
            ComplexLoweringKind::Mixed => (d - self.k, d - self.k),
        }
    }

    pub fn apply(&self, u: &ComplexCoeffs) -> Result<ComplexCoeffs> {
        if u.shape() != (self.degree, self.degree) {
            return Err(Error::LengthMismatch {
                expected: (self.degree + 1).pow(2),
                got: u.data.len(),
            });
        }
        let (mm, nn) = self.image_shape();
        let mut out = ComplexCoeffs::zeros_rect(mm, nn);
        let (dm, dn) = match self.kind {
            ComplexLoweringKind::Dbar => (0, self.k),
            ComplexLoweringKind::Mixed => (self.k, self.k),
        };
        for m in 0..=mm {
            for n in 0..=nn {
                let (sm, sn) = (m + dm, n + dn);
                out.set(m, n, u.get(sm, sn) * self.weight(sm, sn));
            }
        }
        Ok(out)
    }

    /// Nonzero singular values, ascending.
    pub fn singular_values(&self) -> Vec<f64> {
        let mut sv: Vec<f64> = (0..=self.degree)
            .flat_map(|m| (0..=self.degree).map(move |n| (m, n)))
            .map(|(m, n)| self.weight(m, n))
            .filter(|&w| w > 0.0)
            .collect();
        sv.sort_by(|a, b| a.total_cmp(b));
        sv
    }
}
