//! Gamma-function helpers on the whole real line.
//!
//! Backed by `libm` (musl-derived, ~1 ulp for `tgamma`/`lgamma`). Negative
//! non-integer arguments go through the reflection formula so that poles map
//! to an exact zero of the reciprocal rather than NaN.

use std::f64::consts::PI;

/// Gamma cannot be represented in f64 past this argument.
const OVERFLOW_ARG: f64 = 171.62;

/// 1/Γ(x) for any real x; returns 0 at the poles x = 0, −1, −2, …
pub fn recip_gamma(x: f64) -> f64 {
    if x > 0.0 {
        if x > OVERFLOW_ARG {
            return (-libm::lgamma(x)).exp();
        }
        return 1.0 / libm::tgamma(x);
    }
    if x == x.floor() {
        return 0.0; // pole
    }
    // 1/Gamma(x) = sin(pi x) * Gamma(1-x) / pi
    let s = sin_pi(x);
    let lg = libm::lgamma(1.0 - x);
    if lg > 700.0 {
        return if s >= 0.0 { f64::INFINITY } else { f64::NEG_INFINITY };
    }
    s * lg.exp() / PI
}

/// Γ(x) for positive x.
pub fn gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    libm::tgamma(x)
}

/// ln Γ(x) for positive x.
pub fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    libm::lgamma(x)
}

/// sin(πx) computed from the reduced argument, accurate for large |x|.
pub fn sin_pi(x: f64) -> f64 {
    // reduce to [-0.5, 0.5] where sin(pi r) is well conditioned
    let n = x.round();
    let r = x - n;
    let s = (PI * r).sin();
    if (n as i64) % 2 == 0 {
        s
    } else {
        -s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_known_values() {
        assert!((gamma(0.5) - PI.sqrt()).abs() < 1e-15);
        assert!((gamma(1.0) - 1.0).abs() < 1e-15);
        assert!((gamma(5.0) - 24.0).abs() < 1e-12);
    }

    #[test]
    fn recip_gamma_reflection() {
        // Gamma(-1.5) = 4 sqrt(pi) / 3
        let g = 4.0 * PI.sqrt() / 3.0;
        assert!((recip_gamma(-1.5) - 1.0 / g).abs() < 1e-15);
        // poles give exactly zero
        assert_eq!(recip_gamma(0.0), 0.0);
        assert_eq!(recip_gamma(-3.0), 0.0);
    }

    #[test]
    fn sin_pi_reduction() {
        assert!((sin_pi(0.5) - 1.0).abs() < 1e-15);
        assert!(sin_pi(1.0).abs() < 1e-15);
        assert!((sin_pi(100.25) - (PI * 0.25).sin()).abs() < 1e-12);
        assert!((sin_pi(-2.5) - (-1.0)).abs() < 1e-15);
    }
}
