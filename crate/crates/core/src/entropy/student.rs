use std::f64::consts::LN_2;

use statrs::function::beta::ln_beta;
use statrs::function::gamma::digamma;

use crate::error::{Error, Result};

/// Differential entropy, in bits, of a Student-t with `nu` degrees of
/// freedom and the given scale.
pub fn student_t_entropy(nu: f64, scale: f64) -> Result<f64> {
    if !(nu > 0.0 && nu.is_finite()) {
        return Err(Error::InvalidDof(nu));
    }
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::InvalidParam(format!("scale {scale} must be positive")));
    }
    let half = (nu + 1.0) / 2.0;
    let nats = half * (digamma(half) - digamma(nu / 2.0)) + 0.5 * nu.ln() + ln_beta(nu / 2.0, 0.5);
    Ok(nats / LN_2 + scale.log2())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::{E, PI};

    #[test]
    fn gaussian_limit() {
        let gauss = 0.5 * (2.0 * PI * E).log2();
        assert_relative_eq!(student_t_entropy(1e6, 1.0).unwrap(), gauss, epsilon = 1e-3);
    }

    #[test]
    fn cauchy() {
        assert_relative_eq!(student_t_entropy(1.0, 1.0).unwrap(), (4.0 * PI).log2(), epsilon = 1e-12);
    }

    #[test]
    fn doubling_scale_adds_one_bit() {
        let a = student_t_entropy(4.0, 0.7).unwrap();
        let b = student_t_entropy(4.0, 1.4).unwrap();
        assert_relative_eq!(b - a, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn invalid_dof() {
        assert!(matches!(student_t_entropy(0.0, 1.0), Err(Error::InvalidDof(_))));
        assert!(matches!(student_t_entropy(f64::NAN, 1.0), Err(Error::InvalidDof(_))));
    }
}
