//! First-order equation `α·u' + c·u = α·f` on `L²(ℝ, e^{-φ})` with a
//! strictly convex polynomial weight `φ`.
//!
//! Solutions form the line `u_p + K·h` with `h = e^{-c'x}` and
//! `u_p = e^{-c'x}∫_0^x e^{c't} f(t) dt`; the weighted-norm minimizer on that
//! line is compared with `α²∫(f²/φ'') e^{-φ}`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::quadrature::{gauss_legendre, legendre_table};

/// Polynomial degree the grid is sized to integrate against `e^{-φ}`.
pub const GROWTH_DEGREE: i32 = 40;
/// Default exponential rate `|c'|` the grid is sized for.
pub const DEFAULT_RATE: f64 = 5.0;
const TAIL: f64 = 1e-18;
const PANEL_POINTS: usize = 20;
const PANEL_WIDTH: f64 = 0.5;

/// `φ(x) = Σ a_j x^j` with even degree in `2..=8` and `a_deg > 0`, plus the
/// composite Gauss–Legendre grid on `[-L, L]`.
#[derive(Debug, Clone)]
pub struct ConvexWeight {
    coeffs: Vec<f64>,
    half_width: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    panels: usize,
    /// `S[i][j]`: integral from the panel's left end to node `i` of the
    /// interpolant through node `j` (reference panel `[-1, 1]`).
    cumulative: Vec<Vec<f64>>,
    ref_weights: Vec<f64>,
}

fn poly(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &a| acc * x + a)
}

fn derivative(coeffs: &[f64]) -> Vec<f64> {
    coeffs.iter().enumerate().skip(1).map(|(j, a)| j as f64 * a).collect()
}

impl ConvexWeight {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        Self::with_rate(coeffs, DEFAULT_RATE)
    }

    /// Grid sized for integrands `v² e^{-φ}` with `v² ≲ (1+|x|)^40 e^{2·rate·|x|}`.
    pub fn with_rate(mut coeffs: Vec<f64>, rate: f64) -> Result<Self> {
        while coeffs.len() > 1 && coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        let deg = coeffs.len().saturating_sub(1);
        if coeffs.iter().any(|a| !a.is_finite()) || !rate.is_finite() || rate < 0.0 {
            return Err(Error::InvalidParameter("weight coefficients and rate must be finite".into()));
        }
        if !(2..=8).contains(&deg) || deg % 2 == 1 || coeffs[deg] <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "φ must have even degree between 2 and 8 with positive leading coefficient (degree {deg})"
            )));
        }
        let half_width = tail_radius(&coeffs, rate);
        let per_side = (half_width / PANEL_WIDTH).ceil() as usize;
        let half_width = per_side as f64 * PANEL_WIDTH;
        let panels = 2 * per_side;
        let (rx, rw) = gauss_legendre(PANEL_POINTS)?;
        let mut nodes = Vec::with_capacity(panels * PANEL_POINTS);
        let mut weights = Vec::with_capacity(panels * PANEL_POINTS);
        for p in 0..panels {
            let left = -half_width + p as f64 * PANEL_WIDTH;
            for (x, w) in rx.iter().zip(&rw) {
                nodes.push(left + 0.5 * PANEL_WIDTH * (x + 1.0));
                weights.push(0.5 * PANEL_WIDTH * w);
            }
        }
        let d2 = derivative(&derivative(&coeffs));
        for &x in &nodes {
            let v = poly(&d2, x);
            if v <= 0.0 {
                return Err(Error::NotConvex { x, value: v });
            }
        }
        Ok(Self {
            coeffs,
            half_width,
            nodes,
            weights,
            panels,
            cumulative: integration_matrix(&rx, &rw),
            ref_weights: rw,
        })
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Truncation radius `L`.
    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn phi(&self, x: f64) -> f64 {
        poly(&self.coeffs, x)
    }

    pub fn dphi(&self, x: f64) -> f64 {
        poly(&derivative(&self.coeffs), x)
    }

    pub fn d2phi(&self, x: f64) -> f64 {
        poly(&derivative(&derivative(&self.coeffs)), x)
    }

    /// `∫ v² e^{-φ}` over the grid.
    pub fn weighted_norm_sq(&self, values: &[f64]) -> Result<f64> {
        self.weighted_inner(values, values)
    }

    pub fn weighted_inner(&self, a: &[f64], b: &[f64]) -> Result<f64> {
        for v in [a, b] {
            if v.len() != self.nodes.len() {
                return Err(Error::LengthMismatch {
                    expected: self.nodes.len(),
                    got: v.len(),
                });
            }
        }
        Ok(self
            .nodes
            .iter()
            .zip(&self.weights)
            .zip(a.iter().zip(b))
            .map(|((&x, &w), (p, q))| w * p * q * (-self.phi(x)).exp())
            .sum())
    }

    /// `∫_0^{x_i} g` at every node.
    pub fn cumulative_from_zero(&self, g: &[f64]) -> Vec<f64> {
        let q = PANEL_POINTS;
        let half = 0.5 * PANEL_WIDTH;
        let mid = self.panels / 2;
        let mut out = vec![0.0; g.len()];
        let mut offset = 0.0;
        for p in mid..self.panels {
            let vals = &g[p * q..(p + 1) * q];
            for i in 0..q {
                let local: f64 = self.cumulative[i].iter().zip(vals).map(|(s, v)| s * v).sum();
                out[p * q + i] = offset + half * local;
            }
            offset += half * self.ref_weights.iter().zip(vals).map(|(w, v)| w * v).sum::<f64>();
        }
        let mut offset = 0.0;
        for p in (0..mid).rev() {
            let vals = &g[p * q..(p + 1) * q];
            for i in 0..q {
                // ∫_{x_i}^{right} = Σ_j (w_j - S_ij) g_j
                let to_right: f64 = self.cumulative[i]
                    .iter()
                    .zip(&self.ref_weights)
                    .zip(vals)
                    .map(|((s, w), v)| (w - s) * v)
                    .sum();
                out[p * q + i] = -(offset + half * to_right);
            }
            offset += half * self.ref_weights.iter().zip(vals).map(|(w, v)| w * v).sum::<f64>();
        }
        out
    }
}

/// Smallest `L` (on a 0.01 grid) beyond which
/// `(1+|x|)^40 e^{2·rate·|x|} e^{-φ(x)}` stays below `TAIL` times its maximum.
fn tail_radius(coeffs: &[f64], rate: f64) -> f64 {
    let log_g = |x: f64| -poly(coeffs, x) + GROWTH_DEGREE as f64 * (1.0 + x.abs()).ln() + 2.0 * rate * x.abs();
    let step = 0.01;
    let reach = 400.0;
    let samples: Vec<f64> = (0..=(2.0 * reach / step) as usize)
        .map(|i| -reach + i as f64 * step)
        .collect();
    let max = samples.iter().map(|&x| log_g(x)).fold(f64::NEG_INFINITY, f64::max);
    let cut = max + TAIL.ln();
    let last = samples
        .iter()
        .filter(|&&x| log_g(x) > cut)
        .fold(0.0f64, |acc, &x| acc.max(x.abs()));
    (last + step).max(1.0)
}

/// Spectral cumulative-integration matrix on Gauss–Legendre nodes:
/// `S_ij = Σ_n (2n+1)/2 · w_j P_n(x_j) · ∫_{-1}^{x_i} P_n`.
fn integration_matrix(x: &[f64], w: &[f64]) -> Vec<Vec<f64>> {
    let q = x.len();
    let tables: Vec<Vec<f64>> = x.iter().map(|&t| legendre_table(q, t)).collect();
    let antideriv = |i: usize, n: usize| -> f64 {
        if n == 0 {
            x[i] + 1.0
        } else {
            (tables[i][n + 1] - tables[i][n - 1]) / (2 * n + 1) as f64
        }
    };
    (0..q)
        .map(|i| {
            (0..q)
                .map(|j| {
                    (0..q)
                        .map(|n| (2 * n + 1) as f64 / 2.0 * w[j] * tables[j][n] * antideriv(i, n))
                        .sum()
                })
                .collect()
        })
        .collect()
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !alpha.is_finite() {
        return Err(Error::InvalidParameter("alpha must be finite".into()));
    }
    if alpha == 0.0 {
        return Err(Error::DegenerateAlpha);
    }
    if alpha.abs() < 1.0 {
        return Err(Error::AlphaBelowOne(alpha.abs()));
    }
    Ok(())
}

/// Minimal weighted-norm solution on the grid of a [`ConvexWeight`].
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexSolve {
    pub values: Vec<f64>,
    pub particular: Vec<f64>,
    pub k_star: f64,
    pub c_prime: f64,
    /// `∫ u² e^{-φ}`.
    pub lhs: f64,
    /// `α² ∫ (f²/φ'') e^{-φ}`.
    pub rhs: f64,
    pub satisfied: bool,
}

impl ConvexSolve {
    /// `∫ (u_p + K h)² e^{-φ}`, for probing optimality of `K*`.
    pub fn norm_at(&self, w: &ConvexWeight, k: f64) -> f64 {
        let vals: Vec<f64> = w
            .nodes()
            .iter()
            .zip(&self.particular)
            .map(|(&x, p)| p + k * (-self.c_prime * x).exp())
            .collect();
        w.weighted_norm_sq(&vals).expect("grid-sized values")
    }
}

/// Relative slack on `lhs ≤ rhs`.
pub const CONVEX_SLACK: f64 = 1e-6;

pub fn solve_first_order(w: &ConvexWeight, alpha: f64, c: f64, f: &dyn Fn(f64) -> f64) -> Result<ConvexSolve> {
    check_alpha(alpha)?;
    if !c.is_finite() {
        return Err(Error::InvalidParameter("c must be finite".into()));
    }
    let cp = c / alpha;
    let fx: Vec<f64> = w.nodes.iter().map(|&x| f(x)).collect();
    let integrand: Vec<f64> = w.nodes.iter().zip(&fx).map(|(&x, v)| (cp * x).exp() * v).collect();
    let cum = w.cumulative_from_zero(&integrand);
    let particular: Vec<f64> = w.nodes.iter().zip(&cum).map(|(&x, s)| (-cp * x).exp() * s).collect();
    let h: Vec<f64> = w.nodes.iter().map(|&x| (-cp * x).exp()).collect();
    let hh = w.weighted_norm_sq(&h)?;
    if !(hh.is_finite() && hh > 0.0) {
        return Err(Error::InvalidParameter(format!("homogeneous solution has weighted norm {hh}")));
    }
    let k_star = -w.weighted_inner(&particular, &h)? / hh;
    let values: Vec<f64> = particular.iter().zip(&h).map(|(p, q)| p + k_star * q).collect();
    let lhs = w.weighted_norm_sq(&values)?;
    let ratio: Vec<f64> = w
        .nodes
        .iter()
        .zip(&fx)
        .map(|(&x, v)| v / w.d2phi(x).sqrt())
        .collect();
    let rhs = alpha * alpha * w.weighted_norm_sq(&ratio)?;
    Ok(ConvexSolve {
        satisfied: lhs <= rhs * (1.0 + CONVEX_SLACK),
        values,
        particular,
        k_star,
        c_prime: cp,
        lhs,
        rhs,
    })
}

/// Chebyshev collocation solve of `v' + (c' + φ'/2)v = f e^{-φ/2}` for
/// `v = u e^{-φ/2}`, with its own truncation interval.
#[derive(Debug, Clone)]
pub struct CollocationSolve {
    half_width: f64,
    /// Chebyshev points `cos(πj/n)` scaled to `[-L', L']`.
    points: Vec<f64>,
    /// Values of `u e^{-φ/2}` at the points.
    scaled: Vec<f64>,
    pub lhs: f64,
}

impl CollocationSolve {
    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    /// Barycentric interpolation of `u e^{-φ/2}`; zero outside `[-L', L']`.
    pub fn scaled_at(&self, x: f64) -> f64 {
        if x.abs() > self.half_width {
            return 0.0;
        }
        let n = self.points.len() - 1;
        let mut num = 0.0;
        let mut den = 0.0;
        for (j, (&p, &v)) in self.points.iter().zip(&self.scaled).enumerate() {
            let d = x - p;
            if d == 0.0 {
                return v;
            }
            let mut wj = if j % 2 == 0 { 1.0 } else { -1.0 };
            if j == 0 || j == n {
                wj *= 0.5;
            }
            num += wj / d * v;
            den += wj / d;
        }
        num / den
    }
}

fn cheb(n: usize) -> (Vec<f64>, DMatrix<f64>) {
    let x: Vec<f64> = (0..=n)
        .map(|j| (std::f64::consts::PI * j as f64 / n as f64).cos())
        .collect();
    let c = |i: usize| -> f64 {
        let base = if i == 0 || i == n { 2.0 } else { 1.0 };
        if i.is_multiple_of(2) {
            base
        } else {
            -base
        }
    };
    let mut d = DMatrix::<f64>::zeros(n + 1, n + 1);
    for i in 0..=n {
        for j in 0..=n {
            if i != j {
                d[(i, j)] = c(i) / c(j) / (x[i] - x[j]);
            }
        }
    }
    for i in 0..=n {
        let s: f64 = (0..=n).filter(|&j| j != i).map(|j| d[(i, j)]).sum();
        d[(i, i)] = -s;
    }
    (x, d)
}

fn clenshaw_curtis(n: usize) -> Vec<f64> {
    let theta: Vec<f64> = (0..=n)
        .map(|j| std::f64::consts::PI * j as f64 / n as f64)
        .collect();
    let mut w = vec![0.0; n + 1];
    let mut v = vec![1.0; n - 1];
    if n.is_multiple_of(2) {
        w[0] = 1.0 / ((n * n - 1) as f64);
        w[n] = w[0];
        for k in 1..n / 2 {
            for (i, vi) in v.iter_mut().enumerate() {
                *vi -= 2.0 * (2.0 * k as f64 * theta[i + 1]).cos() / ((4 * k * k - 1) as f64);
            }
        }
        for (i, vi) in v.iter_mut().enumerate() {
            *vi -= (n as f64 * theta[i + 1]).cos() / ((n * n - 1) as f64);
        }
    } else {
        w[0] = 1.0 / ((n * n) as f64);
        w[n] = w[0];
        for k in 1..=(n - 1) / 2 {
            for (i, vi) in v.iter_mut().enumerate() {
                *vi -= 2.0 * (2.0 * k as f64 * theta[i + 1]).cos() / ((4 * k * k - 1) as f64);
            }
        }
    }
    for i in 1..n {
        w[i] = 2.0 * v[i - 1] / n as f64;
    }
    w
}

/// Collocation points used by [`collocation_solve`].
pub const COLLOCATION_POINTS: usize = 240;

/// Independent solve of the same minimal-norm problem: particular and null
/// solutions by collocation with `v(0) = 0` and `v_h(0) = 1`, then `K` from
/// Clenshaw–Curtis inner products.
pub fn collocation_solve(w: &ConvexWeight, alpha: f64, c: f64, f: &dyn Fn(f64) -> f64) -> Result<CollocationSolve> {
    check_alpha(alpha)?;
    let cp = c / alpha;
    let n = COLLOCATION_POINTS;
    // |v|² ≤ e^{-70} relative to its peak outside [-L', L']
    let log_v = |x: f64| -0.5 * w.phi(x) + cp.abs() * x.abs() + 6.0 * (1.0 + x.abs()).ln();
    let peak = (-4000..=4000)
        .map(|i| log_v(i as f64 * 0.01))
        .fold(f64::NEG_INFINITY, f64::max);
    let mut half_width = 1.0;
    while log_v(half_width) > peak - 35.0 || log_v(-half_width) > peak - 35.0 {
        half_width += 0.05;
    }
    let (xi, d) = cheb(n);
    let points: Vec<f64> = xi.iter().map(|t| half_width * t).collect();
    let mut a = d / half_width;
    for (i, &x) in points.iter().enumerate() {
        a[(i, i)] += cp + 0.5 * w.dphi(x);
    }
    let mid = n / 2;
    for j in 0..=n {
        a[(mid, j)] = if j == mid { 1.0 } else { 0.0 };
    }
    let lu = a.lu();
    let mut rhs_p = DVector::from_iterator(n + 1, points.iter().map(|&x| f(x) * (-0.5 * w.phi(x)).exp()));
    rhs_p[mid] = 0.0;
    let mut rhs_h = DVector::<f64>::zeros(n + 1);
    rhs_h[mid] = 1.0;
    let p = lu
        .solve(&rhs_p)
        .ok_or_else(|| Error::InvalidParameter("singular collocation system".into()))?;
    let h = lu
        .solve(&rhs_h)
        .ok_or_else(|| Error::InvalidParameter("singular collocation system".into()))?;
    let cc: Vec<f64> = clenshaw_curtis(n).iter().map(|w| w * half_width).collect();
    let dot = |a: &DVector<f64>, b: &DVector<f64>| -> f64 {
        cc.iter().enumerate().map(|(i, w)| w * a[i] * b[i]).sum()
    };
    let k = -dot(&p, &h) / dot(&h, &h);
    let v = &p + &h * k;
    let lhs = dot(&v, &v);
    Ok(CollocationSolve {
        half_width,
        points,
        scaled: v.iter().copied().collect(),
        lhs,
    })
}

/// `‖u - u_oracle‖_φ / ‖u‖_φ` on the grid of `w`.
pub fn relative_difference(w: &ConvexWeight, solve: &ConvexSolve, oracle: &CollocationSolve) -> f64 {
    let mut diff = 0.0;
    let mut norm = 0.0;
    for ((&x, &wt), &u) in w.nodes().iter().zip(w.weights()).zip(&solve.values) {
        let scaled = u * (-0.5 * w.phi(x)).exp();
        diff += wt * (scaled - oracle.scaled_at(x)).powi(2);
        norm += wt * scaled * scaled;
    }
    if norm == 0.0 {
        diff.sqrt()
    } else {
        (diff / norm).sqrt()
    }
}
