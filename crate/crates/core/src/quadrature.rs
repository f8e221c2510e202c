//! Quadrature rules for the measures recurring throughout the library:
//! the weighted line measure `c_lambda |x|^(2l) dx` and the angular measure
//! `(1+s)(1-s^2)^(l-1) ds` on (-1, 1).
//!
//! Gauss rules are produced by the Golub-Welsch algorithm from the Jacobi
//! three-term recurrence; endpoint singularities always live in the rule's
//! weight, never in the integrand.

use crate::error::{DunklError, Result};
use crate::params::DunklParameter;
use nalgebra::{DMatrix, SymmetricEigen};
use statrs::function::gamma::ln_gamma;

/// Nodes and weights of a Gauss rule; `sum(w_i f(x_i))` approximates the
/// integral of `f` against the rule's weight function.
#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Gauss-Jacobi rule on (-1, 1) for the weight `(1-x)^alpha (1+x)^beta`,
/// alpha, beta > -1. Golub-Welsch on the symmetric tridiagonal Jacobi matrix.
pub fn gauss_jacobi(n: usize, alpha: f64, beta: f64) -> GaussRule {
    assert!(n >= 1 && alpha > -1.0 && beta > -1.0);
    let ab = alpha + beta;
    // total mass 2^(a+b+1) B(a+1, b+1)
    let mu0 = ((ab + 1.0) * 2f64.ln() + ln_gamma(alpha + 1.0) + ln_gamma(beta + 1.0)
        - ln_gamma(ab + 2.0))
    .exp();
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n.saturating_sub(1)];
    for k in 0..n {
        let kf = k as f64;
        diag[k] = if k == 0 {
            (beta - alpha) / (ab + 2.0)
        } else {
            (beta * beta - alpha * alpha) / ((2.0 * kf + ab) * (2.0 * kf + ab + 2.0))
        };
    }
    for k in 1..n {
        let kf = k as f64;
        let num = if k == 1 {
            4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab).powi(2) * (3.0 + ab))
        } else {
            4.0 * kf * (kf + alpha) * (kf + beta) * (kf + ab)
                / ((2.0 * kf + ab).powi(2) * (2.0 * kf + ab + 1.0) * (2.0 * kf + ab - 1.0))
        };
        off[k - 1] = num.sqrt();
    }
    let mut m = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        m[(k, k)] = diag[k];
    }
    for k in 0..n - 1 {
        m[(k, k + 1)] = off[k];
        m[(k + 1, k)] = off[k];
    }
    let eig = SymmetricEigen::new(m);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|j| {
            let x = eig.eigenvalues[j];
            let v0 = eig.eigenvectors[(0, j)];
            (x, mu0 * v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    GaussRule {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
    }
}

/// Gauss-Legendre rule on (-1, 1).
pub fn gauss_legendre(n: usize) -> GaussRule {
    gauss_jacobi(n, 0.0, 0.0)
}

impl GaussRule {
    /// Affine map of this rule from (-1, 1) to (a, b).
    pub fn mapped(&self, a: f64, b: f64) -> GaussRule {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        GaussRule {
            nodes: self.nodes.iter().map(|x| mid + half * x).collect(),
            weights: self.weights.iter().map(|w| w * half).collect(),
        }
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Rule for `int_0^L u^power F(u) du` with F smooth; the power-law factor is
/// absorbed into the weights. Built by mapping Gauss-Jacobi(0, power).
pub fn power_rule(n: usize, power: f64, length: f64) -> GaussRule {
    let base = gauss_jacobi(n, 0.0, power);
    // u = L (1 + x)/2: u^power du = (L/2)^(power+1) (1+x)^power dx
    let scale = (0.5 * length).powf(power + 1.0);
    GaussRule {
        nodes: base.nodes.iter().map(|x| 0.5 * length * (1.0 + x)).collect(),
        weights: base.weights.iter().map(|w| w * scale).collect(),
    }
}

/// Angular quadrature for `int_{-1}^{1} g(s) (1+s)(1-s^2)^(l-1) ds`.
///
/// One Gauss-Jacobi((l-1), (l-1)) node table serves every kernel; the smooth
/// `(1+s)` factor is folded into the stored weights, so `weights` carry the
/// full angular measure and sum to `1/c_prime`.
#[derive(Debug, Clone)]
pub struct JacobiRule {
    pub order: usize,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl JacobiRule {
    pub fn new(param: &DunklParameter, n: usize) -> Result<Self> {
        if n < 8 {
            return Err(DunklError::BadResolution { got: n, min: 8 });
        }
        let base = gauss_jacobi(n, param.lambda - 1.0, param.lambda - 1.0);
        let weights = base
            .nodes
            .iter()
            .zip(&base.weights)
            .map(|(&s, &w)| w * (1.0 + s))
            .collect();
        Ok(Self {
            order: n,
            nodes: base.nodes,
            weights,
        })
    }

    pub fn mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn integrate(&self, g: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&s, &w)| w * g(s))
            .sum()
    }
}

/// Symmetric quadrature grid for `c_lambda int_{-X}^{X} f(x) |x|^(2l) dx`.
///
/// Per half-line: a Gauss-Jacobi panel with weight `x^(2l)` covering the
/// origin, then Gauss-Legendre panels with the (there smooth) weight folded
/// in. Nodes are strictly increasing and exactly closed under negation.
#[derive(Debug, Clone)]
pub struct WeightedGrid {
    pub truncation: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

const PANEL_ORDER: usize = 16;

impl WeightedGrid {
    pub fn new(param: &DunklParameter, truncation: f64, n: usize) -> Result<Self> {
        if n < 16 {
            return Err(DunklError::BadResolution { got: n, min: 16 });
        }
        assert!(truncation > 0.0);
        let half_n = n / 2;
        let n_panels = (half_n + PANEL_ORDER - 1) / PANEL_ORDER;
        let dx = truncation / n_panels as f64;

        let mut pos_nodes = Vec::with_capacity(n_panels * PANEL_ORDER);
        let mut pos_weights = Vec::with_capacity(n_panels * PANEL_ORDER);

        // panel [0, dx]: weight x^(2l) in the rule itself
        let first = power_rule(PANEL_ORDER, 2.0 * param.lambda, dx);
        for (&x, &w) in first.nodes.iter().zip(&first.weights) {
            pos_nodes.push(x);
            pos_weights.push(param.c_lambda * w);
        }
        let gl = gauss_legendre(PANEL_ORDER);
        for k in 1..n_panels {
            let a = k as f64 * dx;
            let b = a + dx;
            let panel = gl.mapped(a, b);
            for (&x, &w) in panel.nodes.iter().zip(&panel.weights) {
                pos_nodes.push(x);
                pos_weights.push(param.c_lambda * w * x.powf(2.0 * param.lambda));
            }
        }

        let m = pos_nodes.len();
        let mut nodes = Vec::with_capacity(2 * m);
        let mut weights = Vec::with_capacity(2 * m);
        for i in (0..m).rev() {
            nodes.push(-pos_nodes[i]);
            weights.push(pos_weights[i]);
        }
        nodes.extend_from_slice(&pos_nodes);
        weights.extend_from_slice(&pos_weights);
        Ok(Self {
            truncation,
            nodes,
            weights,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Index of the node mirroring node `i`; exact because the node set is
    /// closed under negation by construction.
    pub fn mirror_index(&self, i: usize) -> usize {
        self.len() - 1 - i
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    pub fn integrate_values(&self, values: &[f64]) -> f64 {
        values
            .iter()
            .zip(&self.weights)
            .map(|(v, &w)| w * v)
            .sum()
    }

    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        self.nodes.iter().map(|&x| f(x)).collect()
    }
}

/// Weighted `L^p_lambda` norm of sampled values; `p = infinity` is the sup.
pub fn lp_norm(grid: &WeightedGrid, values: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        return values.iter().fold(0.0, |m, v| m.max(v.abs()));
    }
    grid.nodes
        .iter()
        .zip(&grid.weights)
        .zip(values)
        .map(|((_, &w), v)| w * v.abs().powf(p))
        .sum::<f64>()
        .powf(1.0 / p)
}

pub fn lp_norm_complex(grid: &WeightedGrid, values: &[num_complex::Complex64], p: f64) -> f64 {
    if p.is_infinite() {
        return values.iter().fold(0.0, |m, v| m.max(v.norm()));
    }
    grid.weights
        .iter()
        .zip(values)
        .map(|(&w, v)| w * v.norm().powf(p))
        .sum::<f64>()
        .powf(1.0 / p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use statrs::function::gamma::gamma;

    fn param(l: f64) -> DunklParameter {
        DunklParameter::new(l).unwrap()
    }

    #[test]
    fn jacobi_rule_mass_matches_gamma_ratio() {
        for l in [0.25, 0.5, 1.0, 1.5, 3.0] {
            let p = param(l);
            let rule = JacobiRule::new(&p, 48).unwrap();
            let expected = gamma(l) * std::f64::consts::PI.sqrt() / gamma(l + 0.5);
            assert_relative_eq!(rule.mass(), expected, max_relative = 1e-12);
            assert_relative_eq!(p.c_prime * rule.mass(), 1.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn jacobi_rule_polynomial_moment() {
        // int s (1+s)(1-s^2)^(l-1) ds at l = 1 equals 2/3
        let p = param(1.0);
        let rule = JacobiRule::new(&p, 16).unwrap();
        assert_relative_eq!(rule.integrate(|s| s), 2.0 / 3.0, max_relative = 1e-12);
        // mass at l = 1 is 1/c' = 2
        assert_relative_eq!(rule.mass(), 2.0, max_relative = 1e-13);
    }

    #[test]
    fn jacobi_rule_rejects_low_order() {
        let p = param(1.0);
        assert!(matches!(
            JacobiRule::new(&p, 4),
            Err(DunklError::BadResolution { .. })
        ));
    }

    #[test]
    fn grid_constant_mass() {
        // int 1 over [-2,2] with l=1: c * 2 * 2^3 / 3
        let p = param(1.0);
        let g = WeightedGrid::new(&p, 2.0, 128).unwrap();
        let expected = p.c_lambda * 2.0 * 8.0 / 3.0;
        assert_relative_eq!(g.integrate(|_| 1.0), expected, max_relative = 1e-10);
    }

    #[test]
    fn grid_odd_integrand_vanishes() {
        let p = param(0.75);
        let g = WeightedGrid::new(&p, 3.0, 256).unwrap();
        let total = g.integrate(|x| x);
        assert!(total.abs() < 1e-12 * g.integrate(|x| x.abs()));
    }

    #[test]
    fn grid_even_monomials_closed_form() {
        let p = param(0.5);
        let g = WeightedGrid::new(&p, 1.0, 256).unwrap();
        // c int_{-1}^1 x^2 |x| dx = c / 2
        assert_relative_eq!(g.integrate(|x| x * x), p.c_lambda / 2.0, max_relative = 1e-10);
        for deg in [0u32, 2, 4, 6, 8] {
            let exact = p.c_lambda * 2.0 / (deg as f64 + 2.0 * p.lambda + 1.0);
            assert_relative_eq!(
                g.integrate(|x| x.powi(deg as i32)),
                exact,
                max_relative = 1e-10
            );
        }
    }

    #[test]
    fn grid_symmetric_nodes() {
        let p = param(1.5);
        let g = WeightedGrid::new(&p, 5.0, 96).unwrap();
        for i in 0..g.len() {
            let j = g.mirror_index(i);
            assert_eq!(g.nodes[i], -g.nodes[j]);
            assert_eq!(g.weights[i], g.weights[j]);
        }
        for w in &g.weights {
            assert!(*w >= 0.0);
        }
        for pair in g.nodes.windows(2) {
            assert!(pair[0] < pair[1]);
        }
    }

    #[test]
    fn grid_refinement_stable() {
        let p = param(0.25);
        let g1 = WeightedGrid::new(&p, 8.0, 256).unwrap();
        let g2 = WeightedGrid::new(&p, 8.0, 512).unwrap();
        let f = |x: f64| (-0.5 * x * x).exp();
        assert!((g1.integrate(f) - g2.integrate(f)).abs() < 1e-10);
    }

    #[test]
    fn grid_rejects_low_resolution() {
        let p = param(1.0);
        assert!(matches!(
            WeightedGrid::new(&p, 1.0, 8),
            Err(DunklError::BadResolution { .. })
        ));
    }

    #[test]
    fn gauss_jacobi_endpoint_singularity() {
        // int_{-1}^1 (1-x)^(-1/2) sin(x) dx via weight absorption
        let rule = gauss_jacobi(32, -0.5, 0.0);
        let val = rule.integrate(|x| x.sin());
        // reference from high-order rule
        let reference = gauss_jacobi(200, -0.5, 0.0).integrate(|x| x.sin());
        assert_relative_eq!(val, reference, max_relative = 1e-13);
    }
}
