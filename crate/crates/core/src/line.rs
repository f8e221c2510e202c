//! Graded quadrature on intervals of the weighted line `c_lambda |x|^(2l) dx`.
//!
//! Rules are assembled from panels: a Gauss-Jacobi panel wherever an endpoint
//! touches the origin (the weight's only non-smooth point), Gauss-Legendre
//! panels with the weight folded in elsewhere, and geometric grading toward
//! caller-declared features (kernel peaks, excision edges, atom boundaries).

use crate::params::DunklParameter;
use crate::quadrature::{gauss_legendre, power_rule, GaussRule};

/// A location the integrand varies rapidly around, with its length scale.
#[derive(Debug, Clone, Copy)]
pub struct Feature {
    pub center: f64,
    pub scale: f64,
}

impl Feature {
    pub fn new(center: f64, scale: f64) -> Self {
        Self {
            center,
            scale: scale.max(1e-14),
        }
    }
}

const PANEL_ORDER: usize = 16;

/// Quadrature rule for `c_lambda int_a^b f(x) |x|^(2l) dx`.
pub fn weighted_rule(param: &DunklParameter, a: f64, b: f64, features: &[Feature]) -> GaussRule {
    assert!(a < b);
    let span = b - a;
    let mut edges = vec![a, b];
    if a < 0.0 && b > 0.0 {
        edges.push(0.0);
    }
    for f in features {
        if f.center > a && f.center < b {
            edges.push(f.center);
        }
        let mut step = f.scale;
        while step < span {
            for e in [f.center - step, f.center + step] {
                if e > a && e < b {
                    edges.push(e);
                }
            }
            step *= 2.0;
        }
    }
    edges.sort_by(|x, y| x.partial_cmp(y).unwrap());
    // merge near-duplicate edges; keep the interval endpoints and 0 exact
    let min_sep = span * 1e-13;
    let mut merged = vec![edges[0]];
    for &e in &edges[1..] {
        let last = *merged.last().unwrap();
        if e - last > min_sep || e == b {
            if e == b && e - last <= min_sep {
                merged.pop();
            }
            merged.push(e);
        } else if e == 0.0 {
            merged.pop();
            merged.push(0.0);
        }
    }

    let gl = gauss_legendre(PANEL_ORDER);
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    let two_l = 2.0 * param.lambda;
    for w in merged.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if lo == 0.0 || hi == 0.0 {
            // panel touching the origin: weight |x|^(2l) in the rule
            let len = hi - lo;
            let pr = power_rule(PANEL_ORDER, two_l, len);
            for (&u, &wt) in pr.nodes.iter().zip(&pr.weights) {
                let x = if lo == 0.0 { u } else { -u };
                nodes.push(x);
                weights.push(param.c_lambda * wt);
            }
        } else {
            let panel = gl.mapped(lo, hi);
            for (&x, &wt) in panel.nodes.iter().zip(&panel.weights) {
                nodes.push(x);
                weights.push(param.c_lambda * wt * x.abs().powf(two_l));
            }
        }
    }
    let mut pairs: Vec<(f64, f64)> = nodes.into_iter().zip(weights).collect();
    pairs.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    GaussRule {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
    }
}
