use nalgebra::DMatrix;
use num_complex::Complex64;

use super::spec::{Family, OperatorSpec};
use crate::error::Result;
use crate::hermite_complex::{dbar_matrix, mixed_matrix};
use crate::hermite_real::derivative_matrix;

/// Dense check of `MM* - M*M = |α|²·diag(d)` for `M = αS + c` truncated to
/// degree `N`, where `d_i = s_{up(i)}² - s_i²`.
///
/// Interior indices are those whose raising partner `up(i)` stays inside
/// the truncation; only they carry the untruncated `d_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct CommutatorCertificate {
    pub family: Family,
    pub degree: usize,
    pub interior: usize,
    /// Largest `|C_ij - |α|² δ_ij d_i|` over interior pairs, relative to
    /// `max(1, |α|² max d)`.
    pub max_rel_error: f64,
    pub min_d: f64,
    /// `2^k k!`, `k!` or `(k!)²`.
    pub floor: f64,
}

impl CommutatorCertificate {
    pub fn holds(&self, tol: f64) -> bool {
        self.max_rel_error <= tol && self.min_d >= self.floor * (1.0 - 1e-14)
    }
}

/// `(from, to, weight)` on flat indices.
type Entry = (usize, usize, f64);

/// Lowering map as triples on flat indices, taken from the basis modules.
fn lowering_entries(family: Family, degree: usize) -> Result<(usize, Vec<Entry>)> {
    let k = family.order();
    let mut out = Vec::new();
    if family.is_complex() {
        let cols = degree + 1;
        let map = match family {
            Family::AntiHolo(_) => dbar_matrix(k, degree)?,
            _ => mixed_matrix(k, degree)?,
        };
        for m in 0..=degree {
            for n in 0..=degree {
                if let Some((tm, tn)) = map.target(m, n) {
                    out.push((m * cols + n, tm * cols + tn, map.weight(m, n)));
                }
            }
        }
        Ok((cols * cols, out))
    } else {
        let map = derivative_matrix(k, degree)?;
        for n in k..=degree {
            out.push((n, n - k, map.weight(n)));
        }
        Ok((degree + 1, out))
    }
}

pub fn commutator_certificate(spec: &OperatorSpec, degree: usize) -> Result<CommutatorCertificate> {
    let (dim, entries) = lowering_entries(spec.family(), degree)?;
    let (alpha, c) = (spec.alpha(), spec.c());
    let mut m = DMatrix::<Complex64>::from_diagonal_element(dim, dim, c);
    let mut s_sq = vec![0.0; dim];
    let mut up_sq = vec![None; dim];
    for &(from, to, w) in &entries {
        m[(to, from)] += alpha * w;
        s_sq[from] = w * w;
        up_sq[to] = Some(w * w);
    }
    let adj = m.adjoint();
    let comm = &m * &adj - &adj * &m;

    let interior: Vec<usize> = (0..dim).filter(|&i| up_sq[i].is_some()).collect();
    let d: Vec<f64> = interior
        .iter()
        .map(|&i| up_sq[i].unwrap() - s_sq[i])
        .collect();
    let a2 = alpha.norm_sqr();
    let scale = d.iter().fold(1.0f64, |acc, &v| acc.max(a2 * v.abs()));
    let mut err = 0.0f64;
    for (p, &i) in interior.iter().enumerate() {
        for (q, &j) in interior.iter().enumerate() {
            let want = if p == q { a2 * d[p] } else { 0.0 };
            err = err.max((comm[(i, j)] - want).norm());
        }
    }
    let min_d = d.iter().copied().fold(f64::INFINITY, f64::min);
    let floor = 1.0 / spec.family().unit_bound_sq();
    Ok(CommutatorCertificate {
        family: spec.family(),
        degree,
        interior: interior.len(),
        max_rel_error: err / scale,
        min_d,
        floor,
    })
}
