use crate::quadrature::{lp_norm_complex, WeightedGrid};
use num_complex::Complex64;
use std::sync::Arc;

/// Complex sample values attached to a weighted grid.
#[derive(Debug, Clone)]
pub struct SampledFunction {
    pub grid: Arc<WeightedGrid>,
    pub values: Vec<Complex64>,
}

impl SampledFunction {
    pub fn new(grid: Arc<WeightedGrid>, values: Vec<Complex64>) -> Self {
        assert_eq!(grid.len(), values.len(), "value count must match the grid");
        debug_assert!(values.iter().all(|v| v.re.is_finite() && v.im.is_finite()));
        Self { grid, values }
    }

    pub fn from_fn(grid: Arc<WeightedGrid>, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.nodes.iter().map(|&x| Complex64::new(f(x), 0.0)).collect();
        Self::new(grid, values)
    }

    pub fn from_complex_fn(grid: Arc<WeightedGrid>, f: impl Fn(f64) -> Complex64) -> Self {
        let values = grid.nodes.iter().map(|&x| f(x)).collect();
        Self::new(grid, values)
    }

    pub fn zero(grid: Arc<WeightedGrid>) -> Self {
        let n = grid.len();
        Self::new(grid, vec![Complex64::new(0.0, 0.0); n])
    }

    pub fn lp_norm(&self, p: f64) -> f64 {
        lp_norm_complex(&self.grid, &self.values, p)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    pub fn real_values(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    /// Largest imaginary residue; a real-valued result should keep this tiny.
    pub fn imag_residue(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.im.abs()))
    }
}
