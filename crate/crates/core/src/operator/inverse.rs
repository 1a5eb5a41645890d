use nalgebra::DMatrix;
use num_complex::Complex64;

use super::chain::{chains, space_dim, Chain, ChainFactor, Scalar};
use super::spec::{factorial, Family, OperatorSpec};
use super::Coeffs;
use crate::error::{Error, Result};
use crate::sampling::{random_complex, random_real, trial_rng};

#[derive(Debug, Clone)]
enum Factors {
    Real(Vec<ChainFactor<f64>>),
    Complex(Vec<ChainFactor<Complex64>>),
}

/// Minimal-norm right inverse `T` of `α·A + c` on the degree-`N` space:
/// `(αA + c)·T g = g` for every `g` supported on the retained rows.
#[derive(Debug, Clone)]
pub struct RightInverse {
    spec: OperatorSpec,
    degree: usize,
    chains: Vec<Chain>,
    factors: Factors,
}

impl RightInverse {
    pub fn new(spec: OperatorSpec, degree: usize) -> Result<Self> {
        let k = spec.order();
        if k > degree {
            return Err(Error::OrderExceedsDegree { k, degree });
        }
        let chains = chains(spec.family(), degree);
        let factors = if spec.family().is_complex() {
            Factors::Complex(
                chains
                    .iter()
                    .map(|ch| ChainFactor::new(ch, spec.alpha(), spec.c()))
                    .collect(),
            )
        } else {
            let (a, c) = (spec.alpha().re, spec.c().re);
            Factors::Real(chains.iter().map(|ch| ChainFactor::new(ch, a, c)).collect())
        };
        Ok(Self {
            spec,
            degree,
            chains,
            factors,
        })
    }

    pub fn spec(&self) -> &OperatorSpec {
        &self.spec
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Largest band `B` such that every degree-`B` input lies on retained rows.
    pub fn max_band(&self) -> usize {
        self.degree - self.spec.order()
    }

    /// `T g`, a degree-`N` solution.
    pub fn apply(&self, g: &Coeffs) -> Result<Coeffs> {
        let family = self.spec.family();
        let flat = g.to_flat(family, self.degree)?;
        for ch in &self.chains {
            let tail = *ch.indices.last().expect("chains are nonempty");
            if flat[tail] != Complex64::new(0.0, 0.0) {
                return Err(Error::NotBandLimited {
                    index: self.position(tail),
                    degree: self.degree,
                });
            }
        }
        let mut out = vec![Complex64::new(0.0, 0.0); space_dim(family, self.degree)];
        match &self.factors {
            Factors::Real(fs) => solve_all(&self.chains, fs, &flat, &mut out),
            Factors::Complex(fs) => solve_all(&self.chains, fs, &flat, &mut out),
        }
        Coeffs::from_flat(family, self.degree, out)
    }

    fn position(&self, flat: usize) -> (usize, usize) {
        if self.spec.family().is_complex() {
            let cols = self.degree + 1;
            (flat / cols, flat % cols)
        } else {
            (flat, 0)
        }
    }

    /// `sup ‖T g‖/‖g‖` over inputs of band `B`, from the singular values of
    /// `T` restricted to each chain.
    pub fn exact_norm(&self, band: usize) -> Result<f64> {
        self.check_band(band)?;
        let mut best = 0.0f64;
        for (i, ch) in self.chains.iter().enumerate() {
            let cols: Vec<usize> = (0..ch.rows())
                .filter(|&j| self.in_band(ch.indices[j], band))
                .collect();
            if cols.is_empty() {
                continue;
            }
            let s = match &self.factors {
                Factors::Real(fs) => chain_norm(&fs[i], &cols),
                Factors::Complex(fs) => chain_norm(&fs[i], &cols),
            };
            best = best.max(s);
        }
        Ok(best)
    }

    fn check_band(&self, band: usize) -> Result<()> {
        if band > self.max_band() {
            return Err(Error::InvalidParameter(format!(
                "band {band} exceeds N - k = {}",
                self.max_band()
            )));
        }
        Ok(())
    }

    fn in_band(&self, flat: usize, band: usize) -> bool {
        let (m, n) = self.position(flat);
        m <= band && n <= band
    }
}

fn solve_all<S: Scalar>(chains: &[Chain], factors: &[ChainFactor<S>], g: &[Complex64], out: &mut [Complex64]) {
    for (ch, f) in chains.iter().zip(factors) {
        let rhs: Vec<S> = ch.indices[..ch.rows()]
            .iter()
            .map(|&i| S::from_complex(g[i]))
            .collect();
        let u = f.solve(&rhs);
        for (&i, v) in ch.indices.iter().zip(u) {
            out[i] = v.to_complex();
        }
    }
}

fn chain_norm<S: Scalar>(factor: &ChainFactor<S>, cols: &[usize]) -> f64 {
    let rows = factor.rows();
    let mut m = DMatrix::<Complex64>::zeros(rows + 1, cols.len());
    for (c, &j) in cols.iter().enumerate() {
        let mut rhs = vec![S::zero(); rows];
        rhs[j] = S::from_real(1.0);
        for (r, v) in factor.solve(&rhs).into_iter().enumerate() {
            m[(r, c)] = v.to_complex();
        }
    }
    m.singular_values().max()
}

/// A candidate constant for `‖T‖` and whether the measurement respects it.
#[derive(Debug, Clone, PartialEq)]
pub struct NormCandidate {
    pub label: String,
    pub value: f64,
    pub satisfied: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OpNormEstimate {
    /// Largest `‖T g‖/‖g‖` over the random trials.
    pub sampled: f64,
    /// Exact supremum over the band.
    pub exact: f64,
    /// Exact supremum for the same `α` with `c = 0`.
    pub diagonal: f64,
    pub candidates: Vec<NormCandidate>,
}

/// Candidate constants for `‖T‖`: `1/√(2^k k!)` on ℝ; `1/√(k!)` and `1/k!` for
/// `∂̄^k`; `1/k!` and `1/(k!)²` for `∂^k∂̄^k`.
pub fn norm_candidates(family: Family) -> Vec<(String, f64)> {
    let k = family.order();
    let f = factorial(k);
    match family {
        Family::RealLaplacian | Family::RealDeriv(_) => {
            vec![("1/sqrt(2^k k!)".into(), 1.0 / (2f64.powi(k as i32) * f).sqrt())]
        }
        Family::AntiHolo(_) => vec![
            ("1/sqrt(k!)".into(), 1.0 / f.sqrt()),
            ("1/k!".into(), 1.0 / f),
        ],
        Family::MixedDiag(_) => vec![
            ("1/k!".into(), 1.0 / f),
            ("1/(k!)^2".into(), 1.0 / (f * f)),
        ],
    }
}

/// Measures `‖T‖` on band-`B` inputs by seeded random trials and exactly.
pub fn estimate_op_norm(t: &RightInverse, band: usize, trials: usize, seed: u64) -> Result<OpNormEstimate> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    t.check_band(band)?;
    let complex = t.spec.family().is_complex();
    let mut sampled = 0.0f64;
    for trial in 0..trials {
        let mut rng = trial_rng(seed, trial as u64);
        let g: Coeffs = if complex {
            random_complex(&mut rng, band).into()
        } else {
            random_real(&mut rng, band).into()
        };
        let gn = g.norm_sq();
        if gn == 0.0 {
            continue;
        }
        let u = t.apply(&g)?;
        sampled = sampled.max((u.norm_sq() / gn).sqrt());
    }
    let exact = t.exact_norm(band)?;
    let diagonal = if t.spec.c() == Complex64::new(0.0, 0.0) {
        exact
    } else {
        RightInverse::new(t.spec.with_c(Complex64::new(0.0, 0.0))?, t.degree)?.exact_norm(band)?
    };
    let measured = sampled.max(exact);
    let candidates = norm_candidates(t.spec.family())
        .into_iter()
        .map(|(label, value)| NormCandidate {
            label,
            value,
            satisfied: measured <= value * (1.0 + 1e-12),
        })
        .collect();
    Ok(OpNormEstimate {
        sampled,
        exact,
        diagonal,
        candidates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermite_complex::ComplexCoeffs;
    use crate::hermite_real::RealCoeffs;

    #[test]
    fn laplacian_inverse_of_e0() {
        let s = OperatorSpec::real(Family::RealLaplacian, 1.0, 0.0).unwrap();
        let t = RightInverse::new(s, 12).unwrap();
        let u = t.apply(&RealCoeffs::unit(0, 0).into()).unwrap();
        let u = u.as_real().unwrap();
        assert!((u.get(2) - 1.0 / 8f64.sqrt()).abs() < 1e-15);
        assert!((u.norm_sq() - 0.125).abs() < 1e-15);
    }

    #[test]
    fn rejects_inputs_on_dropped_rows() {
        let s = OperatorSpec::real(Family::AntiHolo(2), 1.0, 0.5).unwrap();
        let t = RightInverse::new(s, 6).unwrap();
        assert!(t.apply(&ComplexCoeffs::unit(6, 6, 4).into()).is_ok());
        assert!(matches!(
            t.apply(&ComplexCoeffs::unit(6, 0, 5).into()),
            Err(Error::NotBandLimited { index: (0, 5), .. })
        ));
    }

    #[test]
    fn diagonal_norms() {
        for (family, want) in [
            (Family::RealLaplacian, 1.0 / 8f64.sqrt()),
            (Family::RealDeriv(1), 0.5f64.sqrt()),
            (Family::AntiHolo(2), 0.5f64.sqrt()),
            (Family::MixedDiag(2), 0.5),
        ] {
            let degree = if family.is_complex() { 10 } else { 30 };
            let s = OperatorSpec::real(family, 1.0, 0.0).unwrap();
            let t = RightInverse::new(s, degree).unwrap();
            let est = estimate_op_norm(&t, degree - 2 * family.order(), 8, 3).unwrap();
            assert!((est.exact - want).abs() < 1e-12, "{family:?}");
            assert_eq!(est.diagonal, est.exact);
            assert!(est.sampled <= est.exact * (1.0 + 1e-12));
        }
    }

    #[test]
    fn antiholo_candidates_split() {
        let s = OperatorSpec::real(Family::AntiHolo(2), 1.0, 0.0).unwrap();
        let t = RightInverse::new(s, 10).unwrap();
        let est = estimate_op_norm(&t, 6, 4, 1).unwrap();
        let flags: Vec<bool> = est.candidates.iter().map(|c| c.satisfied).collect();
        assert_eq!(flags, vec![true, false]);
    }

    #[test]
    fn zero_trials_rejected() {
        let s = OperatorSpec::real(Family::RealDeriv(1), 1.0, 0.0).unwrap();
        let t = RightInverse::new(s, 8).unwrap();
        assert!(estimate_op_norm(&t, 4, 0, 0).is_err());
    }
}
