//! Operators `α·A + c` as two-band coefficient maps, their minimal-norm
//! right inverses, and the measured norm ratios against the squared-norm
//! constants `α²/8`, `α²/(2^k k!)`, `|α|²/k!` and `|α|²/(k!)²`.

mod chain;
mod commutator;
mod inverse;
mod spec;

use num_complex::Complex64;

pub use commutator::{commutator_certificate, CommutatorCertificate};
pub use inverse::{estimate_op_norm, norm_candidates, NormCandidate, OpNormEstimate, RightInverse};
pub use spec::{bound_sq, Family, OperatorSpec};

pub(crate) use spec::factorial;

use crate::error::{Error, Result};
use crate::hermite_complex::{dbar_matrix, mixed_matrix, ComplexCoeffs};
use crate::hermite_real::{derivative_matrix, RealCoeffs};

/// Relative residual tolerance for minimal-norm solves.
pub const RESIDUAL_REL_TOL: f64 = 1e-9;
/// Additive slack on `ratio_sq ≤ bound_sq`.
pub const BOUND_SLACK: f64 = 1e-6;
/// Tolerance for constants that must be attained exactly.
pub const EQUALITY_TOL: f64 = 1e-10;

/// Coefficients in whichever basis the operator family lives on.
#[derive(Debug, Clone, PartialEq)]
pub enum Coeffs {
    Real(RealCoeffs),
    Complex(ComplexCoeffs),
}

impl Coeffs {
    pub fn norm_sq(&self) -> f64 {
        match self {
            Coeffs::Real(c) => c.norm_sq(),
            Coeffs::Complex(c) => c.norm_sq(),
        }
    }

    pub fn degree(&self) -> usize {
        match self {
            Coeffs::Real(c) => c.degree(),
            Coeffs::Complex(c) => c.degree(),
        }
    }

    pub fn is_complex(&self) -> bool {
        matches!(self, Coeffs::Complex(_))
    }

    pub fn as_real(&self) -> Option<&RealCoeffs> {
        match self {
            Coeffs::Real(c) => Some(c),
            Coeffs::Complex(_) => None,
        }
    }

    pub fn as_complex(&self) -> Option<&ComplexCoeffs> {
        match self {
            Coeffs::Complex(c) => Some(c),
            Coeffs::Real(_) => None,
        }
    }

    /// Every coefficient multiplied by `s` (real families need real `s`).
    pub fn scaled(&self, s: Complex64) -> Result<Coeffs> {
        match self {
            Coeffs::Real(c) => {
                if s.im != 0.0 {
                    return Err(Error::FieldMismatch("real coefficients scaled by a complex number"));
                }
                let v = c.as_slice().iter().map(|x| x * s.re).collect();
                Ok(Coeffs::Real(RealCoeffs::from_vec(v)?))
            }
            Coeffs::Complex(c) => {
                let mut out = c.clone();
                for x in out.as_mut_slice() {
                    *x *= s;
                }
                Ok(Coeffs::Complex(out))
            }
        }
    }

    /// Flat complex view in the layout of a degree-`N` space (zero-padded);
    /// fails if a nonzero entry falls outside it.
    pub(crate) fn to_flat(&self, family: Family, degree: usize) -> Result<Vec<Complex64>> {
        match (self, family.is_complex()) {
            (Coeffs::Real(c), false) => {
                let mut out = vec![Complex64::new(0.0, 0.0); degree + 1];
                for (n, &v) in c.as_slice().iter().enumerate() {
                    if n > degree {
                        if v != 0.0 {
                            return Err(Error::NotBandLimited { index: (n, 0), degree });
                        }
                    } else {
                        out[n] = Complex64::new(v, 0.0);
                    }
                }
                Ok(out)
            }
            (Coeffs::Complex(c), true) => {
                let cols = degree + 1;
                let mut out = vec![Complex64::new(0.0, 0.0); cols * cols];
                for (m, n, v) in c.nonzeros() {
                    if m > degree || n > degree {
                        return Err(Error::NotBandLimited { index: (m, n), degree });
                    }
                    out[m * cols + n] = v;
                }
                Ok(out)
            }
            (Coeffs::Real(_), true) => Err(Error::FieldMismatch(
                "complex operator family needs complex coefficients",
            )),
            (Coeffs::Complex(_), false) => Err(Error::FieldMismatch(
                "real operator family needs real coefficients",
            )),
        }
    }

    pub(crate) fn from_flat(family: Family, degree: usize, flat: Vec<Complex64>) -> Result<Coeffs> {
        if family.is_complex() {
            Ok(Coeffs::Complex(ComplexCoeffs::from_vec(degree, flat)?))
        } else {
            Ok(Coeffs::Real(RealCoeffs::from_vec(
                flat.into_iter().map(|z| z.re).collect(),
            )?))
        }
    }
}

impl From<RealCoeffs> for Coeffs {
    fn from(c: RealCoeffs) -> Self {
        Coeffs::Real(c)
    }
}

impl From<ComplexCoeffs> for Coeffs {
    fn from(c: ComplexCoeffs) -> Self {
        Coeffs::Complex(c)
    }
}

/// Outcome of a minimal-norm solve of `α·A u + c u = α f`.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub solution: Coeffs,
    /// `‖(αA + c)u - αf‖` over the retained equation rows.
    pub residual_norm: f64,
    pub input_sq_norm: f64,
    pub output_sq_norm: f64,
    /// `‖u‖²/‖f‖²`; `None` when `f = 0`.
    pub ratio_sq: Option<f64>,
    pub bound_sq: f64,
    /// `ratio_sq ≤ bound_sq + BOUND_SLACK`.
    pub satisfied: bool,
}

impl SolveResult {
    pub(crate) fn assemble(solution: Coeffs, residual_norm: f64, input_sq_norm: f64, bound_sq: f64) -> Self {
        let output_sq_norm = solution.norm_sq();
        let ratio_sq = (input_sq_norm > 0.0).then(|| output_sq_norm / input_sq_norm);
        let mut out = Self {
            solution,
            residual_norm,
            input_sq_norm,
            output_sq_norm,
            ratio_sq,
            bound_sq,
            satisfied: true,
        };
        out.satisfied = out.satisfies(BOUND_SLACK);
        out
    }

    pub fn satisfies(&self, tol: f64) -> bool {
        self.ratio_sq.is_none_or(|r| r <= self.bound_sq + tol)
    }

    /// Residual acceptance at `RESIDUAL_REL_TOL·(1 + ‖f‖)`.
    pub fn residual_ok(&self) -> bool {
        self.residual_norm <= RESIDUAL_REL_TOL * (1.0 + self.input_sq_norm.sqrt())
    }
}

/// `α·A u + c·u` on the retained rows: degree `N-k` (real), `(N, N-k)`
/// for `∂̄^k`, `(N-k, N-k)` for `∂^k∂̄^k`.
pub fn apply(spec: &OperatorSpec, u: &Coeffs) -> Result<Coeffs> {
    let k = spec.order();
    match (spec.family().is_complex(), u) {
        (false, Coeffs::Real(u)) => {
            let d = derivative_matrix(k, u.degree())?;
            let lowered = d.apply(u)?;
            let (a, c) = (spec.alpha().re, spec.c().re);
            let v = lowered
                .as_slice()
                .iter()
                .zip(u.as_slice())
                .map(|(l, x)| a * l + c * x)
                .collect();
            Ok(Coeffs::Real(RealCoeffs::from_vec(v)?))
        }
        (true, Coeffs::Complex(u)) => {
            if !u.is_square() {
                return Err(Error::InvalidParameter(
                    "operator input must be a square coefficient array".into(),
                ));
            }
            let lowering = match spec.family() {
                Family::AntiHolo(_) => dbar_matrix(k, u.degree())?,
                _ => mixed_matrix(k, u.degree())?,
            };
            let mut out = lowering.apply(u)?;
            let (mm, nn) = out.shape();
            for m in 0..=mm {
                for n in 0..=nn {
                    let v = spec.alpha() * out.get(m, n) + spec.c() * u.get(m, n);
                    out.set(m, n, v);
                }
            }
            Ok(Coeffs::Complex(out))
        }
        _ => Err(Error::FieldMismatch("coefficient field does not match the operator family")),
    }
}

/// `‖apply(spec, u) - rhs‖` with `rhs` restricted to the image rows.
pub(crate) fn residual(spec: &OperatorSpec, u: &Coeffs, rhs: &Coeffs) -> Result<f64> {
    let img = apply(spec, u)?;
    let r = match (&img, rhs) {
        (Coeffs::Real(a), Coeffs::Real(b)) => a
            .as_slice()
            .iter()
            .enumerate()
            .map(|(n, x)| (x - b.get(n)).powi(2))
            .sum::<f64>(),
        (Coeffs::Complex(a), Coeffs::Complex(b)) => {
            let (mm, nn) = a.shape();
            let mut s = 0.0;
            for m in 0..=mm {
                for n in 0..=nn {
                    s += (a.get(m, n) - b.get(m, n)).norm_sqr();
                }
            }
            s
        }
        _ => return Err(Error::FieldMismatch("residual operands differ in field")),
    };
    Ok(r.sqrt())
}

/// Factors `α·A + c` once for repeated right-inverse applications.
pub fn build_right_inverse(spec: &OperatorSpec, degree: usize) -> Result<RightInverse> {
    RightInverse::new(*spec, degree)
}

/// Minimal-norm solution of degree `N` of `α·A u + c·u = α·f`.
pub fn solve_min_norm(spec: &OperatorSpec, f: &Coeffs, degree: usize) -> Result<SolveResult> {
    let inverse = RightInverse::new(*spec, degree)?;
    let rhs = f.scaled(spec.alpha())?;
    let u = inverse.apply(&rhs)?;
    let res = residual(spec, &u, &rhs)?;
    Ok(SolveResult::assemble(u, res, f.norm_sq(), spec.bound_sq()))
}
