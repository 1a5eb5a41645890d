use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Differential part `A` of the operator `α·A + c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// `Δ = d²/dx²` on ℝ; identical to `RealDeriv(2)`.
    RealLaplacian,
    /// `D^k = d^k/dx^k` on ℝ.
    RealDeriv(usize),
    /// `∂̄^k` on ℂ.
    AntiHolo(usize),
    /// `∂^k ∂̄^k` on ℂ.
    MixedDiag(usize),
}

impl Family {
    /// Lowering step `k` of the coefficient map.
    pub fn order(self) -> usize {
        match self {
            Family::RealLaplacian => 2,
            Family::RealDeriv(k) | Family::AntiHolo(k) | Family::MixedDiag(k) => k,
        }
    }

    pub fn is_complex(self) -> bool {
        matches!(self, Family::AntiHolo(_) | Family::MixedDiag(_))
    }

    /// Total number of first-order derivatives, i.e. the power of the
    /// length scale picked up under `x ↦ μx`.
    pub fn derivative_count(self) -> usize {
        match self {
            Family::MixedDiag(k) => 2 * k,
            other => other.order(),
        }
    }

    /// Squared-norm constant for `α = 1`: `1/(2^k k!)`, `1/k!`, `1/(k!)²`.
    pub fn unit_bound_sq(self) -> f64 {
        let k = self.order();
        let fact = factorial(k);
        match self {
            Family::RealLaplacian | Family::RealDeriv(_) => 1.0 / (2f64.powi(k as i32) * fact),
            Family::AntiHolo(_) => 1.0 / fact,
            Family::MixedDiag(_) => 1.0 / (fact * fact),
        }
    }

    /// Short CLI name: `lap`, `dk`, `dbar`, `mixed`.
    pub fn short_name(self) -> &'static str {
        match self {
            Family::RealLaplacian => "lap",
            Family::RealDeriv(_) => "dk",
            Family::AntiHolo(_) => "dbar",
            Family::MixedDiag(_) => "mixed",
        }
    }

    /// Parses a CLI name; `k` is ignored for `lap`.
    pub fn from_short_name(name: &str, k: usize) -> Result<Self> {
        match name {
            "lap" => Ok(Family::RealLaplacian),
            "dk" => Ok(Family::RealDeriv(k)),
            "dbar" => Ok(Family::AntiHolo(k)),
            "mixed" => Ok(Family::MixedDiag(k)),
            other => Err(Error::InvalidParameter(format!(
                "unknown operator family '{other}' (expected lap, dk, dbar or mixed)"
            ))),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::RealLaplacian => write!(f, "Δ"),
            Family::RealDeriv(k) => write!(f, "D^{k}"),
            Family::AntiHolo(k) => write!(f, "∂̄^{k}"),
            Family::MixedDiag(k) => write!(f, "∂^{k}∂̄^{k}"),
        }
    }
}

pub(crate) fn factorial(k: usize) -> f64 {
    (1..=k).map(|j| j as f64).product()
}

/// The operator `α·A + c` with `|α| ≥ 1`.
///
/// Real families carry real `α` and `c` (imaginary parts exactly zero).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorSpec {
    family: Family,
    alpha: Complex64,
    c: Complex64,
}

impl OperatorSpec {
    pub fn new(family: Family, alpha: Complex64, c: Complex64) -> Result<Self> {
        if family.order() == 0 {
            return Err(Error::ZeroOrder);
        }
        if !(alpha.re.is_finite() && alpha.im.is_finite() && c.re.is_finite() && c.im.is_finite()) {
            return Err(Error::InvalidParameter("alpha and c must be finite".into()));
        }
        if alpha.norm() == 0.0 {
            return Err(Error::DegenerateAlpha);
        }
        if alpha.norm() < 1.0 {
            return Err(Error::AlphaBelowOne(alpha.norm()));
        }
        if !family.is_complex() && (alpha.im != 0.0 || c.im != 0.0) {
            return Err(Error::FieldMismatch("real operator families take real alpha and c"));
        }
        Ok(Self { family, alpha, c })
    }

    pub fn real(family: Family, alpha: f64, c: f64) -> Result<Self> {
        Self::new(family, Complex64::new(alpha, 0.0), Complex64::new(c, 0.0))
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn order(&self) -> usize {
        self.family.order()
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn c(&self) -> Complex64 {
        self.c
    }

    /// `c' = c/α`, the constant of the normalized equation `A u + c' u = f`.
    pub fn c_prime(&self) -> Complex64 {
        self.c / self.alpha
    }

    /// Same operator with a different zeroth-order constant.
    pub fn with_c(&self, c: Complex64) -> Result<Self> {
        Self::new(self.family, self.alpha, c)
    }

    /// Squared-norm constant of the estimate `‖u‖² ≤ bound·‖f‖²`.
    pub fn bound_sq(&self) -> f64 {
        self.alpha.norm_sqr() * self.family.unit_bound_sq()
    }
}

/// `α²/8`, `α²/(2^k k!)`, `|α|²/k!` or `|α|²/(k!)²` depending on the family.
pub fn bound_sq(spec: &OperatorSpec) -> f64 {
    spec.bound_sq()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_examples() {
        let lap = OperatorSpec::real(Family::RealLaplacian, 1.0, 0.0).unwrap();
        assert_eq!(bound_sq(&lap), 0.125);
        let d3 = OperatorSpec::real(Family::RealDeriv(3), 2.0, 0.0).unwrap();
        assert!((bound_sq(&d3) - 1.0 / 12.0).abs() < 1e-16);
        let m2 = OperatorSpec::real(Family::MixedDiag(2), 1.0, 0.0).unwrap();
        assert_eq!(bound_sq(&m2), 0.25);
        let a = OperatorSpec::new(
            Family::AntiHolo(3),
            Complex64::new(0.0, 2.0),
            Complex64::new(1.0, 1.0),
        )
        .unwrap();
        assert!((bound_sq(&a) - 4.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn laplacian_is_second_derivative() {
        let lap = OperatorSpec::real(Family::RealLaplacian, 1.5, 0.3).unwrap();
        let d2 = OperatorSpec::real(Family::RealDeriv(2), 1.5, 0.3).unwrap();
        assert_eq!(lap.order(), d2.order());
        assert_eq!(lap.bound_sq(), d2.bound_sq());
    }

    #[test]
    fn hypotheses_are_enforced() {
        assert!(matches!(
            OperatorSpec::real(Family::RealDeriv(1), 0.5, 0.0),
            Err(Error::AlphaBelowOne(_))
        ));
        assert!(matches!(
            OperatorSpec::real(Family::RealDeriv(1), 0.0, 1.0),
            Err(Error::DegenerateAlpha)
        ));
        assert!(matches!(
            OperatorSpec::real(Family::RealDeriv(0), 1.0, 0.0),
            Err(Error::ZeroOrder)
        ));
        assert!(matches!(
            OperatorSpec::new(Family::RealDeriv(1), Complex64::new(1.0, 1.0), Complex64::new(0.0, 0.0)),
            Err(Error::FieldMismatch(_))
        ));
        assert!(OperatorSpec::real(Family::RealDeriv(1), -1.0, 0.0).is_ok());
    }

    #[test]
    fn c_prime_is_c_over_alpha() {
        let s = OperatorSpec::real(Family::RealDeriv(2), 4.0, 2.0).unwrap();
        assert_eq!(s.c_prime(), Complex64::new(0.5, 0.0));
    }
}
