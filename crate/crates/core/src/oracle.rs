//! Brute-force checks that share no code with assembly or the solver:
//! Gauss-Laguerre evaluation of half-range flux entries and ODE residuals.

use nalgebra::SymmetricEigen;

use crate::assembly::MomentSystem;
use crate::error::{invalid, Error, Result};
use crate::halfspace::LayerSolution;
use crate::linalg::Matrix;

/// Gauss-Laguerre rule for `int_0^inf g(t) exp(-t) dt`.
///
/// With `t = x^2 / 2` it integrates `h(x) x exp(-x^2/2)` on `[0, inf)`, so a
/// rule with `order` nodes is exact for `x^(2k+1) exp(-x^2/2)` up to
/// `k = 2 order - 1`.
#[derive(Clone, Debug)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub order: usize,
}

fn laguerre_pair(n: usize, t: f64) -> (f64, f64) {
    // (L_n(t), L_{n-1}(t))
    let (mut prev, mut cur) = (0.0, 1.0);
    for k in 0..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 - t) * cur - kf * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    (cur, prev)
}

impl QuadratureRule {
    pub fn gauss_laguerre(order: usize) -> Result<Self> {
        if order == 0 {
            return Err(invalid("quadrature order must be positive"));
        }
        // Golub-Welsch: Jacobi matrix diagonal 2k+1, off-diagonal k.
        let jacobi = Matrix::from_fn(order, order, |i, j| {
            if i == j {
                2.0 * i as f64 + 1.0
            } else if i + 1 == j || j + 1 == i {
                i.max(j) as f64
            } else {
                0.0
            }
        });
        let mut nodes: Vec<f64> = SymmetricEigen::new(jacobi).eigenvalues.iter().copied().collect();
        nodes.sort_by(f64::total_cmp);
        let n = order as f64;
        let mut weights = Vec::with_capacity(order);
        for t in nodes.iter_mut() {
            // Newton polish on L_n; L_n' = n (L_n - L_{n-1}) / t.
            for _ in 0..3 {
                let (ln, lm) = laguerre_pair(order, *t);
                let d = n * (ln - lm) / *t;
                *t -= ln / d;
            }
            // Weights from the next polynomial keep full relative accuracy
            // for the tiny weights at large nodes.
            let (ln1, _) = laguerre_pair(order + 1, *t);
            weights.push(*t / ((n + 1.0) * (n + 1.0) * ln1 * ln1));
        }
        Ok(Self {
            nodes,
            weights,
            order,
        })
    }

    /// Rule just large enough for entries with `a + b <= max_sum`.
    pub fn for_flux_orders(max_sum: usize) -> Result<Self> {
        Self::gauss_laguerre(max_sum / 4 + 1)
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * f(t))
            .sum()
    }

    /// `int_0^inf x^(2k+1) exp(-x^2/2) dx`.
    pub fn odd_gaussian_moment(&self, k: u32) -> f64 {
        self.integrate(|t| (2.0 * t).powi(k as i32))
    }
}

/// Orthonormal Hermite polynomials `phi_0..=phi_k` at `x`, by
/// `x phi_j = sqrt(j) phi_{j-1} + sqrt(j+1) phi_{j+1}`.
pub fn hermite_values(k: usize, x: f64) -> Vec<f64> {
    let mut out = vec![1.0];
    if k >= 1 {
        out.push(x);
    }
    for j in 1..k {
        let jf = j as f64;
        out.push((x * out[j] - jf.sqrt() * out[j - 1]) / (jf + 1.0).sqrt());
    }
    out
}

/// `int_0^inf x phi_a(x) phi_b(x) exp(-x^2/2) dx` for even `a`, `b`.
pub fn quadrature_s_entry(rule: &QuadratureRule, a: usize, b: usize) -> Result<f64> {
    if a % 2 != 0 || b % 2 != 0 {
        return Err(invalid(format!("orders must be even, got ({a}, {b})")));
    }
    let degree = (a + b) / 2;
    if degree > 2 * rule.order - 1 {
        return Err(Error::Accuracy(format!(
            "{}-node rule is exact to degree {} in t, entry ({a}, {b}) needs {degree}",
            rule.order,
            2 * rule.order - 1
        )));
    }
    let top = a.max(b);
    Ok(rule.integrate(|t| {
        let h = hermite_values(top, (2.0 * t).sqrt());
        h[a] * h[b]
    }))
}

/// `max_y |A w'(y) + Q w(y)|_2` over the sample points.
pub fn residual_norm(system: &MomentSystem, sol: &LayerSolution, ys: &[f64]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &y in ys {
        let w = sol.evaluate(y)?;
        let dw = sol.derivative(y)?;
        worst = worst.max((system.a() * dw + system.q() * w).norm());
    }
    Ok(worst)
}
