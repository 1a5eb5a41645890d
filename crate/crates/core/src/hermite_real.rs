//! Physicists' Hermite basis of `L²(ℝ, e^{-x²})`.
//!
//! Coefficients are stored against the orthonormal functions
//! `e_n = H_n / √(2ⁿ n! √π)`, so squared norms are plain coefficient sums.
//! In this basis `d/dx` is the weighted lowering shift `e_n ↦ √(2n)·e_{n-1}`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quadrature::QuadRule1D;

/// Largest index accepted by [`eval_hermite`].
pub const MAX_HERMITE_INDEX: usize = 400;

/// Coefficients `c_0..=c_N` against the orthonormal basis `e_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct RealCoeffs {
    coeffs: Vec<f64>,
}

impl RealCoeffs {
    pub fn zeros(degree: usize) -> Self {
        Self {
            coeffs: vec![0.0; degree + 1],
        }
    }

    /// The basis function `e_n` truncated at `degree`.
    pub fn unit(degree: usize, n: usize) -> Self {
        let mut c = Self::zeros(degree.max(n));
        c.coeffs[n] = 1.0;
        c
    }

    pub fn from_vec(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidParameter(
                "coefficient vector must hold at least c_0".into(),
            ));
        }
        Ok(Self { coeffs })
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn get(&self, n: usize) -> f64 {
        self.coeffs.get(n).copied().unwrap_or(0.0)
    }

    pub fn norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum()
    }

    /// Zero-pads or truncates to `degree`.
    pub fn resized(&self, degree: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(degree + 1, 0.0);
        Self { coeffs }
    }

    /// Highest index with a nonzero coefficient.
    pub fn effective_degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|&c| c != 0.0)
    }
}

/// `H_n(x)` by the three-term recurrence `H_{n+1} = 2xH_n - 2nH_{n-1}`.
pub fn eval_hermite(n: usize, x: f64) -> Result<f64> {
    if n > MAX_HERMITE_INDEX {
        return Err(Error::IndexOutOfRange {
            index: n,
            limit: MAX_HERMITE_INDEX,
        });
    }
    let mut prev = 1.0;
    if n == 0 {
        return Ok(prev);
    }
    let mut cur = 2.0 * x;
    for k in 1..n {
        let next = 2.0 * x * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// `e_n(x)` by the normalized recurrence
/// `e_{n+1} = x√(2/(n+1))·e_n - √(n/(n+1))·e_{n-1}`.
pub fn eval_normalized(n: usize, x: f64) -> f64 {
    *normalized_table(n, x).last().unwrap()
}

/// `[e_0(x), .., e_degree(x)]`.
pub fn normalized_table(degree: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(degree + 1);
    out.push(PI.powf(-0.25));
    let mut prev = 0.0;
    for n in 0..degree {
        let nf = n as f64;
        let next = x * (2.0 / (nf + 1.0)).sqrt() * out[n] - (nf / (nf + 1.0)).sqrt() * prev;
        prev = out[n];
        out.push(next);
    }
    out
}

/// Projects samples taken at the rule nodes onto `e_0..=e_degree`:
/// `c_n = Σ wᵢ e_n(xᵢ) vᵢ`.
pub fn analyze(samples: &[f64], rule: &QuadRule1D, degree: usize) -> Result<RealCoeffs> {
    if rule.order() < degree + 1 {
        return Err(Error::InsufficientOrder {
            order: rule.order(),
            degree,
            required: degree + 1,
        });
    }
    if samples.len() != rule.order() {
        return Err(Error::LengthMismatch {
            expected: rule.order(),
            got: samples.len(),
        });
    }
    let mut coeffs = vec![0.0; degree + 1];
    for ((&x, &w), &v) in rule.nodes().iter().zip(rule.weights()).zip(samples) {
        if w == 0.0 {
            continue;
        }
        let basis = normalized_table(degree, x);
        for (c, e) in coeffs.iter_mut().zip(&basis) {
            *c += w * e * v;
        }
    }
    Ok(RealCoeffs { coeffs })
}

/// Pointwise `Σ c_n e_n(x)`.
pub fn synthesize(c: &RealCoeffs, points: &[f64]) -> Vec<f64> {
    points
        .iter()
        .map(|&x| {
            normalized_table(c.degree(), x)
                .iter()
                .zip(&c.coeffs)
                .map(|(e, c)| e * c)
                .sum()
        })
        .collect()
}

/// `D^k` on `e_0..=e_N`: a single superdiagonal at offset `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeMap {
    k: usize,
    degree: usize,
    weights: Vec<f64>,
}

/// Shift weight `√(2^k n!/(n-k)!)`, zero for `n < k`.
pub fn derivative_weight(k: usize, n: usize) -> f64 {
    if n < k {
        return 0.0;
    }
    (0..k).map(|j| (2.0 * (n - j) as f64).sqrt()).product()
}

pub fn derivative_matrix(k: usize, degree: usize) -> Result<DerivativeMap> {
    if k == 0 {
        return Err(Error::ZeroOrder);
    }
    if k > degree {
        return Err(Error::OrderExceedsDegree { k, degree });
    }
    let weights = (0..=degree).map(|n| derivative_weight(k, n)).collect();
    Ok(DerivativeMap { k, degree, weights })
}

impl DerivativeMap {
    pub fn order(&self) -> usize {
        self.k
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Weight carried by `e_n ↦ weight·e_{n-k}`.
    pub fn weight(&self, n: usize) -> f64 {
        self.weights[n]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Image coefficients, degree `N - k`.
    pub fn apply(&self, u: &RealCoeffs) -> Result<RealCoeffs> {
        if u.degree() != self.degree {
            return Err(Error::LengthMismatch {
                expected: self.degree + 1,
                got: u.coeffs.len(),
            });
        }
        let coeffs = (0..=self.degree - self.k)
            .map(|j| self.weights[j + self.k] * u.coeffs[j + self.k])
            .collect();
        Ok(RealCoeffs { coeffs })
    }

    /// Dense `(N-k+1) × (N+1)` row-major matrix.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        (0..=self.degree - self.k)
            .map(|j| {
                let mut row = vec![0.0; self.degree + 1];
                row[j + self.k] = self.weights[j + self.k];
                row
            })
            .collect()
    }

    /// Nonzero singular values, ascending (the shift weights for `n ≥ k`).
    pub fn singular_values(&self) -> Vec<f64> {
        self.weights[self.k..].to_vec()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::build_rule_1d;

    #[test]
    fn hermite_examples() {
        assert_eq!(eval_hermite(2, 1.0).unwrap(), 2.0);
        assert_eq!(eval_hermite(0, 3.7).unwrap(), 1.0);
        assert_eq!(eval_hermite(3, 0.0).unwrap(), 0.0);
        assert!(matches!(
            eval_hermite(401, 0.0),
            Err(Error::IndexOutOfRange { index: 401, .. })
        ));
    }

    #[test]
    fn normalized_matches_raw_for_small_n() {
        let mut fact = 1.0;
        for n in 0..=25 {
            if n > 0 {
                fact *= n as f64;
            }
            let norm = (2f64.powi(n as i32) * fact * PI.sqrt()).sqrt();
            for &x in &[-2.5, -0.3, 0.0, 1.1, 3.0] {
                let raw = eval_hermite(n, x).unwrap() / norm;
                let e = eval_normalized(n, x);
                assert!((raw - e).abs() <= 1e-12 * (1.0 + raw.abs()), "n={n} x={x}");
            }
        }
    }

    #[test]
    fn normalized_is_finite_at_extreme_nodes() {
        let rule = build_rule_1d(200).unwrap();
        let x = *rule.nodes().last().unwrap();
        assert!(normalized_table(400, x).iter().all(|v| v.is_finite()));
    }

    #[test]
    fn analyze_examples() {
        let rule = build_rule_1d(12).unwrap();
        let e0 = vec![PI.powf(-0.25); 12];
        let c = analyze(&e0, &rule, 8).unwrap();
        assert!((c.get(0) - 1.0).abs() < 1e-13);
        assert!(c.as_slice()[1..].iter().all(|v| v.abs() < 1e-13));

        let zero = analyze(&[0.0; 12], &rule, 8).unwrap();
        assert_eq!(zero.norm_sq(), 0.0);

        let s: Vec<f64> = rule
            .nodes()
            .iter()
            .map(|&x| eval_normalized(1, x) + eval_normalized(3, x))
            .collect();
        let c = analyze(&s, &rule, 10).unwrap();
        for n in 0..=10 {
            let want = if n == 1 || n == 3 { 1.0 } else { 0.0 };
            assert!((c.get(n) - want).abs() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn analyze_requires_enough_nodes() {
        let rule = build_rule_1d(5).unwrap();
        assert!(matches!(
            analyze(&[0.0; 5], &rule, 5),
            Err(Error::InsufficientOrder { required: 6, .. })
        ));
    }

    #[test]
    fn synthesize_examples() {
        let c = RealCoeffs::unit(0, 0);
        assert!((synthesize(&c, &[0.0])[0] - PI.powf(-0.25)).abs() < 1e-15);
        let z = RealCoeffs::zeros(6);
        assert!(synthesize(&z, &[0.0, 1.0, -2.0]).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn derivative_examples() {
        let d1 = derivative_matrix(1, 4).unwrap();
        let img = d1.apply(&RealCoeffs::unit(4, 1)).unwrap();
        assert!((img.get(0) - 2f64.sqrt()).abs() < 1e-15);

        let d2 = derivative_matrix(2, 4).unwrap();
        let img = d2.apply(&RealCoeffs::unit(4, 2)).unwrap();
        assert!((img.get(0) - 8f64.sqrt()).abs() < 1e-14);

        for k in 1..=4 {
            let d = derivative_matrix(k, 6).unwrap();
            assert_eq!(d.apply(&RealCoeffs::unit(6, 0)).unwrap().norm_sq(), 0.0);
        }
        assert!(matches!(
            derivative_matrix(5, 4),
            Err(Error::OrderExceedsDegree { k: 5, degree: 4 })
        ));
    }
}
