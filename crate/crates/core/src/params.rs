use crate::error::{DunklError, Result};
use statrs::function::gamma::gamma;

/// The Dunkl parameter lambda > 0 together with every derived constant the
/// kernels need.
///
/// * `c_lambda`: normalization of the weighted measure, `1/c = 2^(l+1/2) Gamma(l+1/2)`
/// * `c_prime`: constant of the Laplace representation of the Dunkl kernel
/// * `c_dprime`: constant of the explicit translation kernel
/// * `m_lambda`: constant of the Poisson kernel `P_y(x) = m y (y^2+x^2)^(-l-1)`
/// * `p0 = 2l/(2l+1)` and `p_critical = (4l+2)/(4l+3)`: Hardy-space indices
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DunklParameter {
    pub lambda: f64,
    pub c_lambda: f64,
    pub c_prime: f64,
    pub c_dprime: f64,
    pub m_lambda: f64,
    pub p0: f64,
    pub gamma_lambda: f64,
    pub p_critical: f64,
}

impl DunklParameter {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(DunklError::NonPositiveLambda(lambda));
        }
        let sqrt_pi = std::f64::consts::PI.sqrt();
        let c_lambda = 1.0 / (2f64.powf(lambda + 0.5) * gamma(lambda + 0.5));
        let c_prime = gamma(lambda + 0.5) / (gamma(lambda) * sqrt_pi);
        let c_dprime =
            2f64.powf(1.5 - lambda) * gamma(lambda + 0.5).powi(2) / (sqrt_pi * gamma(lambda));
        let m_lambda = 2f64.powf(lambda + 0.5) * gamma(lambda + 1.0) / sqrt_pi;
        let gamma_lambda = 1.0 / (4.0 * lambda + 2.0);
        Ok(Self {
            lambda,
            c_lambda,
            c_prime,
            c_dprime,
            m_lambda,
            p0: 2.0 * lambda / (2.0 * lambda + 1.0),
            gamma_lambda,
            p_critical: (4.0 * lambda + 2.0) / (4.0 * lambda + 3.0),
        })
    }

    /// Constant in front of the angular representations of the Poisson,
    /// conjugate Poisson and Hilbert kernels,
    /// `l Gamma(l+1/2) / (2^(-l-1/2) pi) = c_prime * m_lambda`.
    pub fn angular_kernel_constant(&self) -> f64 {
        self.lambda * gamma(self.lambda + 0.5) * 2f64.powf(self.lambda + 0.5)
            / std::f64::consts::PI
    }

    /// Weighted length `|E|_lambda = c_lambda * int_a^b |t|^(2l) dt` of an interval.
    pub fn weighted_length(&self, a: f64, b: f64) -> f64 {
        self.weighted_primitive(b) - self.weighted_primitive(a)
    }

    /// Antiderivative of `c_lambda |t|^(2l)`, odd by construction.
    pub fn weighted_primitive(&self, t: f64) -> f64 {
        let e = 2.0 * self.lambda + 1.0;
        self.c_lambda * t.signum() * t.abs().powf(e) / e
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn rejects_nonpositive_lambda() {
        assert!(matches!(
            DunklParameter::new(0.0),
            Err(DunklError::NonPositiveLambda(_))
        ));
        assert!(matches!(
            DunklParameter::new(-1.5),
            Err(DunklError::NonPositiveLambda(_))
        ));
    }

    #[test]
    fn constants_at_half() {
        // m_lambda = 2 * Gamma(3/2) / sqrt(pi) = 1 at lambda = 1/2
        let p = DunklParameter::new(0.5).unwrap();
        assert_relative_eq!(p.m_lambda, 1.0, max_relative = 1e-14);
        assert_relative_eq!(p.gamma_lambda, 0.25, max_relative = 1e-14);
        assert_relative_eq!(p.p_critical, 0.8, max_relative = 1e-14);
        // c_lambda^-1 = 2 Gamma(1) = 2
        assert_relative_eq!(p.c_lambda, 0.5, max_relative = 1e-14);
    }

    #[test]
    fn index_ordering() {
        for lambda in [0.25, 0.5, 1.0, 1.5, 3.0] {
            let p = DunklParameter::new(lambda).unwrap();
            assert!(p.p0 < p.p_critical && p.p_critical < 1.0);
            assert!(p.c_lambda > 0.0 && p.c_prime > 0.0 && p.c_dprime > 0.0 && p.m_lambda > 0.0);
        }
    }

    #[test]
    fn angular_constant_is_cprime_times_m() {
        for lambda in [0.25, 0.7, 2.0] {
            let p = DunklParameter::new(lambda).unwrap();
            assert_relative_eq!(
                p.angular_kernel_constant(),
                p.c_prime * p.m_lambda,
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn weighted_length_closed_form() {
        let p = DunklParameter::new(0.5).unwrap();
        // int_{-1}^{1} |t| dt = 1, times c_lambda
        assert_relative_eq!(p.weighted_length(-1.0, 1.0), p.c_lambda, max_relative = 1e-14);
    }
}
