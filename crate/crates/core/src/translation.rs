//! Lambda-translation by the angular formula and by the explicit kernel
//! `W_lambda`, plus lambda-convolution.
//!
//! The angular route is the workhorse: its integrand is singular-free. The
//! kernel route carries endpoint singularities of exponent `l - 1`, so its
//! quadrature maps them onto a Gauss-Jacobi rule; it serves as a cross-check
//! of the kernel algebra, not as the evaluation path.

use crate::error::{DunklError, Result};
use crate::params::DunklParameter;
use crate::profile::{InterpolatedProfile, Profile};
use crate::quadrature::{gauss_jacobi, JacobiRule};
use crate::sampled::SampledFunction;
use num_complex::Complex64;
use rayon::prelude::*;
use std::sync::Arc;

const ANGULAR_ORDER: usize = 48;

fn sigma(a: f64, b: f64, c: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        0.0
    } else {
        (a * a + b * b - c * c) / (2.0 * a * b)
    }
}

/// The translation kernel `W_lambda(x, t, z)`, a signed density supported on
/// `||x|-|t|| < |z| < |x|+|t|`.
pub fn kernel_w(param: &DunklParameter, x: f64, t: f64, z: f64) -> Result<f64> {
    if x * t == 0.0 {
        return Err(DunklError::DegenerateArguments);
    }
    let (lo, hi) = ((x.abs() - t.abs()).abs(), x.abs() + t.abs());
    let az = z.abs();
    if az <= lo || az >= hi {
        return Ok(0.0);
    }
    let l = param.lambda;
    let denom = ((hi * hi - z * z) * (z * z - lo * lo)).powf(1.0 - l);
    let w0 = param.c_dprime * (x * t * z).abs().powf(1.0 - 2.0 * l) / denom;
    Ok(w0 * (1.0 - sigma(x, t, z) + sigma(z, x, t) + sigma(z, t, x)))
}

/// `c_lambda int g(z) W_lambda(x,t,z) |z|^(2l) dz` with the endpoint
/// singularities absorbed into a Gauss-Jacobi rule on each support component.
pub fn kernel_w_integral(
    param: &DunklParameter,
    x: f64,
    t: f64,
    g: &dyn Profile,
) -> Result<f64> {
    if x * t == 0.0 {
        return Err(DunklError::DegenerateArguments);
    }
    let (lo, hi) = ((x.abs() - t.abs()).abs(), x.abs() + t.abs());
    let l = param.lambda;
    if lo <= 1e-12 * hi {
        // |x| = |t|: the support reaches z = 0, where the two-sided sum of
        // the integrand behaves like z^(2l-1) (x = -t) or z^(2l+1) (x = t)
        // instead of (z - lo)^(l - 1)
        let rule = gauss_jacobi(48, l - 1.0, 2.0 * l - 1.0);
        let jac = (0.5 * hi).powf(3.0 * l - 1.0);
        let mut acc = 0.0;
        for (&u, &w) in rule.nodes.iter().zip(&rule.weights) {
            let z = 0.5 * hi * (1.0 + u);
            let strip = (hi - z).powf(1.0 - l) * z.powf(1.0 - 2.0 * l);
            let mut s = 0.0;
            for zz in [z, -z] {
                s += kernel_w(param, x, t, zz)? * g.eval(zz) * zz.abs().powf(2.0 * l);
            }
            acc += w * jac * s * strip;
        }
        return Ok(param.c_lambda * acc);
    }
    let rule = gauss_jacobi(48, l - 1.0, l - 1.0);
    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);
    let jac = half.powf(2.0 * l - 1.0);
    let mut acc = 0.0;
    for (&u, &w) in rule.nodes.iter().zip(&rule.weights) {
        let z = mid + half * u;
        // the singular endpoint factors, taken out of W and put in the rule
        let smooth = ((hi + z) * (z + lo)).powf(l - 1.0);
        for zz in [z, -z] {
            let wv = kernel_w(param, x, t, zz)?;
            let bare = wv * ((hi * hi - zz * zz) * (zz * zz - lo * lo)).powf(1.0 - l);
            acc += w * jac * smooth * bare * g.eval(zz) * zz.abs().powf(2.0 * l);
        }
    }
    Ok(param.c_lambda * acc)
}

/// Angular translation formula at a single point, using analytic or
/// interpolated profiles for the even and odd parts.
pub fn translate_profile(
    param: &DunklParameter,
    rule: &JacobiRule,
    f: &dyn Profile,
    t: f64,
    x: f64,
) -> f64 {
    if t == 0.0 {
        return f.eval(x);
    }
    if x == 0.0 {
        // the complement convention; the angular formula's x -> 0 limit is
        // checked against it in tests
        return f.eval(t);
    }
    let acc = rule.integrate(|s| {
        let r = (x * x + t * t + 2.0 * x * t * s).max(0.0).sqrt();
        let fe = 0.5 * (f.eval(r) + f.eval(-r));
        if r == 0.0 {
            fe
        } else {
            let fo = 0.5 * (f.eval(r) - f.eval(-r));
            fe + fo * (x + t) / r
        }
    });
    param.c_prime * acc
}

/// `tau_t f` sampled on the function's own grid.
pub fn translate(param: &DunklParameter, f: &SampledFunction, t: f64) -> Result<SampledFunction> {
    if t.abs() > f.grid.truncation {
        return Err(DunklError::InterpolationOutOfRange(t));
    }
    if t == 0.0 {
        return Ok(f.clone());
    }
    let rule = JacobiRule::new(param, ANGULAR_ORDER)?;
    let re = InterpolatedProfile::new(f.grid.clone(), f.values.iter().map(|v| v.re).collect());
    let im = InterpolatedProfile::new(f.grid.clone(), f.values.iter().map(|v| v.im).collect());
    let has_im = f.values.iter().any(|v| v.im != 0.0);
    let values = f
        .grid
        .nodes
        .par_iter()
        .map(|&x| {
            let vr = translate_profile(param, &rule, &re, t, x);
            let vi = if has_im {
                translate_profile(param, &rule, &im, t, x)
            } else {
                0.0
            };
            Complex64::new(vr, vi)
        })
        .collect();
    Ok(SampledFunction::new(f.grid.clone(), values))
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

/// Lambda-convolution `(f * g)(x) = c_lambda int (tau_x f)(-t) g(t) |t|^(2l) dt`
/// by nested quadrature on the shared grid.
pub fn convolve(
    param: &DunklParameter,
    f: &SampledFunction,
    g: &SampledFunction,
) -> Result<SampledFunction> {
    assert!(
        Arc::ptr_eq(&f.grid, &g.grid) || f.grid.nodes == g.grid.nodes,
        "convolution operands must share a grid"
    );
    if !decay_ok(f) || !decay_ok(g) {
        return Err(DunklError::TruncationTooTight {
            got: f64::NAN,
            required: 1e-9,
        });
    }
    let rule = JacobiRule::new(param, ANGULAR_ORDER)?;
    let re = InterpolatedProfile::new(f.grid.clone(), f.values.iter().map(|v| v.re).collect());
    let grid = &f.grid;
    let values: Vec<Complex64> = grid
        .nodes
        .par_iter()
        .map(|&x| {
            let mut acc = Complex64::new(0.0, 0.0);
            for ((&tn, &w), &gv) in grid.nodes.iter().zip(&grid.weights).zip(&g.values) {
                let tf = translate_profile(param, &rule, &re, x, -tn);
                acc += gv * (tf * w);
            }
            acc
        })
        .collect();
    Ok(SampledFunction::new(f.grid.clone(), values))
}
