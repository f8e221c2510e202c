//! The lambda-Poisson and conjugate lambda-Poisson kernels and integrals,
//! half-plane lattices, and the discrete maximal functions.
//!
//! Kernels come from the angular representation; lattice fills go through the
//! frequency side (a damped spectrum summed against the Dunkl kernel), which
//! is both faster and accurate enough for finite-difference residual checks.
//! The two routes are cross-verified in tests.

use crate::angular::AngularWorkspace;
use crate::error::{DunklError, Result};
use crate::line::{weighted_rule, Feature};
use crate::params::DunklParameter;
use crate::profile::Profile;
use crate::sampled::SampledFunction;
use crate::special::dunkl_kernel_real;
use crate::transform::Spectrum;
use num_complex::Complex64;
use rayon::prelude::*;
use std::sync::Arc;

/// Sample points of the upper half plane: symmetric x nodes crossed with
/// strictly positive, increasing (log-spaced) y levels.
#[derive(Debug, Clone)]
pub struct HalfPlaneLattice {
    pub x_nodes: Vec<f64>,
    pub y_nodes: Vec<f64>,
}

impl HalfPlaneLattice {
    pub fn new(x_nodes: Vec<f64>, y_min: f64, y_max: f64, levels: usize) -> Result<Self> {
        if y_min <= 0.0 || y_max <= y_min {
            return Err(DunklError::NonPositiveY(y_min));
        }
        if levels < 2 {
            return Err(DunklError::BadResolution { got: levels, min: 2 });
        }
        let n = x_nodes.len();
        for i in 0..n / 2 {
            if x_nodes[i] != -x_nodes[n - 1 - i] {
                return Err(DunklError::AsymmetricGrid);
            }
        }
        let ratio = (y_max / y_min).powf(1.0 / (levels - 1) as f64);
        let y_nodes = (0..levels)
            .map(|k| y_min * ratio.powi(k as i32))
            .collect();
        Ok(Self { x_nodes, y_nodes })
    }
}

/// Values on a half-plane lattice, row-major in y.
#[derive(Debug, Clone)]
pub struct LatticeSamples {
    pub lattice: Arc<HalfPlaneLattice>,
    pub values: Vec<f64>,
}

impl LatticeSamples {
    pub fn at(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.lattice.x_nodes.len() + ix]
    }

    pub fn row(&self, iy: usize) -> &[f64] {
        let n = self.lattice.x_nodes.len();
        &self.values[iy * n..(iy + 1) * n]
    }
}

/// The lambda-Poisson kernel `(tau_x P_y)(-t)`, strictly positive for y > 0.
pub fn poisson_kernel(
    param: &DunklParameter,
    ws: &AngularWorkspace,
    x: f64,
    y: f64,
    t: f64,
) -> Result<f64> {
    if y <= 0.0 {
        return Err(DunklError::NonPositiveY(y));
    }
    let a = y * y + x * x + t * t;
    Ok(param.angular_kernel_constant() * y * ws.integrate(param, a, 2.0 * x * t, |_| 1.0))
}

/// The conjugate lambda-Poisson kernel `(tau_x Q_y)(-t)`; same angular
/// integral with the prefactor `x - t` in place of `y`.
pub fn conjugate_poisson_kernel(
    param: &DunklParameter,
    ws: &AngularWorkspace,
    x: f64,
    y: f64,
    t: f64,
) -> Result<f64> {
    if y <= 0.0 {
        return Err(DunklError::NonPositiveY(y));
    }
    let a = y * y + x * x + t * t;
    Ok(param.angular_kernel_constant() * (x - t) * ws.integrate(param, a, 2.0 * x * t, |_| 1.0))
}

/// Kernel-route Poisson (or conjugate-Poisson) integral of a profile at one
/// point of the half plane; the t-rule grades toward the kernel peaks at
/// `t = x` and `t = -x` on scale `y`.
pub fn poisson_pointwise(
    param: &DunklParameter,
    ws: &AngularWorkspace,
    f: &dyn Profile,
    truncation: f64,
    x: f64,
    y: f64,
    conjugate: bool,
) -> Result<f64> {
    if y <= 0.0 {
        return Err(DunklError::NonPositiveY(y));
    }
    let features = [Feature::new(x, y), Feature::new(-x, y)];
    let rule = weighted_rule(param, -truncation, truncation, &features);
    let mut acc = 0.0;
    for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
        let k = if conjugate {
            conjugate_poisson_kernel(param, ws, x, y, t)?
        } else {
            poisson_kernel(param, ws, x, y, t)?
        };
        acc += w * f.eval(t) * k;
    }
    Ok(acc)
}

fn decay_ok(f: &SampledFunction) -> bool {
    let peak = f.max_abs();
    let n = f.values.len();
    let k = 8.min(n / 2);
    let edge = f.values[..k]
        .iter()
        .chain(&f.values[n - k..])
        .fold(0.0_f64, |m, v| m.max(v.norm()));
    edge <= 1e-9 * peak || peak == 0.0
}

/// Kernel-route lattice fill of `(Pf)(x, y)` (or `(Qf)(x, y)`).
pub fn poisson_integral(
    param: &DunklParameter,
    f: &SampledFunction,
    lattice: Arc<HalfPlaneLattice>,
    conjugate: bool,
) -> Result<LatticeSamples> {
    if !decay_ok(f) {
        return Err(DunklError::TruncationTooTight {
            got: f64::NAN,
            required: 1e-9,
        });
    }
    let ws = AngularWorkspace::new(param, 48);
    let prof = crate::profile::InterpolatedProfile::new(
        f.grid.clone(),
        f.values.iter().map(|v| v.re).collect(),
    );
    let truncation = f.grid.truncation;
    let points: Vec<(f64, f64)> = lattice
        .y_nodes
        .iter()
        .flat_map(|&y| lattice.x_nodes.iter().map(move |&x| (x, y)))
        .collect();
    let values = points
        .par_iter()
        .map(|&(x, y)| poisson_pointwise(param, &ws, &prof, truncation, x, y, conjugate))
        .collect::<Result<Vec<f64>>>()?;
    Ok(LatticeSamples { lattice, values })
}

/// Frequency-route evaluation at one point: the spectrum damped by
/// `e^(-y|xi|)` (times `-i sgn(xi)` for the conjugate integral) summed
/// against the Dunkl kernel.
pub fn poisson_spectral_pointwise(
    param: &DunklParameter,
    spectrum: &Spectrum,
    x: f64,
    y: f64,
    conjugate: bool,
) -> Result<f64> {
    if y <= 0.0 {
        return Err(DunklError::NonPositiveY(y));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for ((&xi, &w), &v) in spectrum
        .xi_grid
        .nodes
        .iter()
        .zip(&spectrum.xi_grid.weights)
        .zip(&spectrum.values)
    {
        let mut term = v * (-y * xi.abs()).exp() * dunkl_kernel_real(param, x * xi);
        if conjugate {
            term *= Complex64::new(0.0, -xi.signum());
        }
        acc += term * w;
    }
    Ok(acc.re)
}

/// Frequency-route lattice fill.
pub fn poisson_lattice_spectral(
    param: &DunklParameter,
    spectrum: &Spectrum,
    lattice: Arc<HalfPlaneLattice>,
    conjugate: bool,
) -> Result<LatticeSamples> {
    let points: Vec<(f64, f64)> = lattice
        .y_nodes
        .iter()
        .flat_map(|&y| lattice.x_nodes.iter().map(move |&x| (x, y)))
        .collect();
    let values = points
        .par_iter()
        .map(|&(x, y)| poisson_spectral_pointwise(param, spectrum, x, y, conjugate))
        .collect::<Result<Vec<f64>>>()?;
    Ok(LatticeSamples { lattice, values })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaximalKind {
    Radial,
    Nontangential,
}

/// Discrete maximal function per x node.
#[derive(Debug, Clone)]
pub struct MaximalSample {
    pub kind: MaximalKind,
    pub values: Vec<f64>,
    pub cone_samples: usize,
}

/// Sup of `|samples|` over the lattice's y levels (Radial) or over all
/// lattice points inside the cone `|s - x| < aperture * y` (Nontangential).
/// The discrete sup is a lower bound of the continuum one; criteria are
/// stated against the discrete version.
pub fn maximal(
    samples: &LatticeSamples,
    kind: MaximalKind,
    aperture: f64,
) -> Result<MaximalSample> {
    if aperture <= 0.0 {
        return Err(DunklError::EmptyCone(aperture));
    }
    let xs = &samples.lattice.x_nodes;
    let ys = &samples.lattice.y_nodes;
    let mut values = vec![0.0; xs.len()];
    let mut cone_samples = 0usize;
    for (ix, &x) in xs.iter().enumerate() {
        let mut m = 0.0_f64;
        for (iy, &y) in ys.iter().enumerate() {
            match kind {
                MaximalKind::Radial => {
                    m = m.max(samples.at(ix, iy).abs());
                    cone_samples += 1;
                }
                MaximalKind::Nontangential => {
                    for (is, &s) in xs.iter().enumerate() {
                        if (s - x).abs() < aperture * y {
                            m = m.max(samples.at(is, iy).abs());
                            cone_samples += 1;
                        }
                    }
                }
            }
        }
        values[ix] = m;
    }
    Ok(MaximalSample {
        kind,
        values,
        cone_samples,
    })
}
