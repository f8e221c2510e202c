//! Function profiles: the analytic evaluators used by the pointwise integral
//! operators, plus interpolation of sampled data for functions only known on
//! a grid.

use crate::quadrature::WeightedGrid;
use std::sync::Arc;

/// A real-valued function of one real variable, evaluable anywhere the
/// integral operators need it.
pub trait Profile: Sync {
    fn eval(&self, x: f64) -> f64;
}

impl<F: Fn(f64) -> f64 + Sync> Profile for F {
    fn eval(&self, x: f64) -> f64 {
        self(x)
    }
}

/// Cubic (4-point Lagrange) interpolation of grid samples. Outside the grid
/// the profile evaluates to zero, which is the right continuation for the
/// decaying functions this library handles; tolerances for interpolated
/// inputs are degraded accordingly.
#[derive(Clone)]
pub struct InterpolatedProfile {
    pub grid: Arc<WeightedGrid>,
    pub values: Vec<f64>,
}

impl InterpolatedProfile {
    pub fn new(grid: Arc<WeightedGrid>, values: Vec<f64>) -> Self {
        assert_eq!(grid.len(), values.len());
        Self { grid, values }
    }
}

impl Profile for InterpolatedProfile {
    fn eval(&self, x: f64) -> f64 {
        let nodes = &self.grid.nodes;
        let n = nodes.len();
        if x < nodes[0] || x > nodes[n - 1] {
            return 0.0;
        }
        let j = nodes.partition_point(|&t| t < x).min(n - 1);
        let lo = j.saturating_sub(2).min(n - 4);
        let xs = &nodes[lo..lo + 4];
        let ys = &self.values[lo..lo + 4];
        let mut acc = 0.0;
        for i in 0..4 {
            let mut li = ys[i];
            for k in 0..4 {
                if k != i {
                    li *= (x - xs[k]) / (xs[i] - xs[k]);
                }
            }
            acc += li;
        }
        acc
    }
}

/// Even and odd parts, as the translation formula wants them.
pub fn even_part(f: &dyn Profile, x: f64) -> f64 {
    0.5 * (f.eval(x) + f.eval(-x))
}

pub fn odd_part(f: &dyn Profile, x: f64) -> f64 {
    0.5 * (f.eval(x) - f.eval(-x))
}
