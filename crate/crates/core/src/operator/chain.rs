//! Chain decomposition and the two-band minimal-norm solver.
//!
//! Every operator here is `α·S + c` with `S` a weighted lowering shift, so
//! the coefficient index set splits into disjoint chains
//! `i_0 ← i_1 ← … ← i_{L-1}` on which `S e_{i_j} = s_j e_{i_{j-1}}`.
//! Truncated to a chain, the equation rows are the positions `0..L-1` and
//! the system is the `(L-1) × L` upper-bidiagonal matrix with `c` on the
//! diagonal and `α s_{j+1}` on the superdiagonal. Each such system has full
//! row rank (`s_j > 0` for `j ≥ 1`) and a one-dimensional kernel, so the
//! minimal-norm solution is unique.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

use super::spec::Family;
use crate::hermite_complex::falling_sqrt;
use crate::hermite_real::derivative_weight;

pub(crate) trait Scalar:
    Copy
    + Debug
    + PartialEq
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Mul<f64, Output = Self>
    + 'static
{
    fn zero() -> Self;
    fn from_real(x: f64) -> Self;
    fn from_complex(z: Complex64) -> Self;
    fn conj(self) -> Self;
    fn abs_sq(self) -> f64;
    fn to_complex(self) -> Complex64;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn from_real(x: f64) -> Self {
        x
    }
    fn from_complex(z: Complex64) -> Self {
        z.re
    }
    fn conj(self) -> Self {
        self
    }
    fn abs_sq(self) -> f64 {
        self * self
    }
    fn to_complex(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn from_real(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn from_complex(z: Complex64) -> Self {
        z
    }
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    fn abs_sq(self) -> f64 {
        self.norm_sqr()
    }
    fn to_complex(self) -> Complex64 {
        self
    }
}

/// Flat indices along one chain, lowest first, with the shift weight of
/// each position (`weights[0] == 0`: the chain head is annihilated).
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Chain {
    pub indices: Vec<usize>,
    pub weights: Vec<f64>,
}

impl Chain {
    /// Number of equation rows: every position except the last.
    pub fn rows(&self) -> usize {
        self.indices.len().saturating_sub(1)
    }
}

/// Size of the flat coefficient space for truncation degree `N`.
pub(crate) fn space_dim(family: Family, degree: usize) -> usize {
    if family.is_complex() {
        (degree + 1) * (degree + 1)
    } else {
        degree + 1
    }
}

/// Chains covering `0..space_dim` exactly once. Complex indices are
/// `m·(N+1) + n`.
pub(crate) fn chains(family: Family, degree: usize) -> Vec<Chain> {
    let k = family.order();
    let cols = degree + 1;
    let mut out = Vec::new();
    match family {
        Family::RealLaplacian | Family::RealDeriv(_) => {
            for r in 0..k.min(cols) {
                let indices: Vec<usize> = (r..=degree).step_by(k).collect();
                let weights = indices.iter().map(|&n| derivative_weight(k, n)).collect();
                out.push(Chain { indices, weights });
            }
        }
        Family::AntiHolo(_) => {
            for m in 0..=degree {
                for r in 0..k.min(cols) {
                    let ns: Vec<usize> = (r..=degree).step_by(k).collect();
                    let weights = ns.iter().map(|&n| falling_sqrt(k, n)).collect();
                    let indices = ns.iter().map(|&n| m * cols + n).collect();
                    out.push(Chain { indices, weights });
                }
            }
        }
        Family::MixedDiag(_) => {
            for p in 0..=degree {
                for q in 0..=degree {
                    if p.min(q) >= k {
                        continue;
                    }
                    let steps = (degree - p.max(q)) / k;
                    let pairs: Vec<(usize, usize)> =
                        (0..=steps).map(|j| (p + j * k, q + j * k)).collect();
                    let weights = pairs
                        .iter()
                        .map(|&(m, n)| falling_sqrt(k, m) * falling_sqrt(k, n))
                        .collect();
                    let indices = pairs.iter().map(|&(m, n)| m * cols + n).collect();
                    out.push(Chain { indices, weights });
                }
            }
        }
    }
    out
}

/// Column-Givens LQ factorization of one chain system:
/// `A·G_0·G_1⋯G_{L-2} = [L | 0]` with `L` lower bidiagonal.
#[derive(Debug, Clone)]
pub(crate) struct ChainFactor<S> {
    /// `(cs, sn)` of each rotation.
    rotations: Vec<(S, S)>,
    diag: Vec<S>,
    /// `sub[j] = L[j][j-1]`; `sub[0]` unused.
    sub: Vec<S>,
}

impl<S: Scalar> ChainFactor<S> {
    pub fn new(chain: &Chain, alpha: S, c: S) -> Self {
        let rows = chain.rows();
        let mut rotations = Vec::with_capacity(rows);
        let mut diag = Vec::with_capacity(rows);
        let mut sub = vec![S::zero(); rows];
        let mut a = c;
        for j in 0..rows {
            let b = alpha * chain.weights[j + 1];
            let r = (a.abs_sq() + b.abs_sq()).sqrt();
            let cs = a.conj() * (1.0 / r);
            let sn = b.conj() * (1.0 / r);
            rotations.push((cs, sn));
            diag.push(S::from_real(r));
            if j + 1 < rows {
                sub[j + 1] = sn * c;
                a = cs.conj() * c;
            }
        }
        Self {
            rotations,
            diag,
            sub,
        }
    }

    pub fn rows(&self) -> usize {
        self.diag.len()
    }

    /// Minimal-norm `u` (length `rows + 1`) with `A u = rhs`.
    pub fn solve(&self, rhs: &[S]) -> Vec<S> {
        let rows = self.rows();
        debug_assert_eq!(rhs.len(), rows);
        let mut v = vec![S::zero(); rows + 1];
        for j in 0..rows {
            let mut acc = rhs[j];
            if j > 0 {
                acc = acc - self.sub[j] * v[j - 1];
            }
            v[j] = acc / self.diag[j];
        }
        for j in (0..rows).rev() {
            let (cs, sn) = self.rotations[j];
            let (a, b) = (v[j], v[j + 1]);
            v[j] = cs * a - sn.conj() * b;
            v[j + 1] = sn * a + cs.conj() * b;
        }
        v
    }
}
