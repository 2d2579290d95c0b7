//! Special functions used by the closed-form risk formulas.
//!
//! The complementary error function comes from `libm` and the incomplete
//! gamma/beta functions from `statrs`; this module only adapts them to the
//! shapes the distribution code needs.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use statrs::function::{beta, erf, gamma};

/// 1/sqrt(2*pi)
pub const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

pub fn std_normal_pdf(z: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * z * z).exp()
}

pub fn std_normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z * FRAC_1_SQRT_2)
}

pub fn std_normal_sf(z: f64) -> f64 {
    0.5 * libm::erfc(z * FRAC_1_SQRT_2)
}

/// Inverse of the standard normal cdf, polished with one Halley step.
pub fn std_normal_quantile(p: f64) -> f64 {
    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    let mut z = -SQRT_2 * erf::erfc_inv(2.0 * p);
    // Refine on whichever tail keeps the residual well conditioned.
    let residual = if p < 0.5 {
        std_normal_cdf(z) - p
    } else {
        (1.0 - p) - std_normal_sf(z)
    };
    let pdf = std_normal_pdf(z);
    if pdf > 0.0 && residual.is_finite() {
        let u = residual / pdf;
        z -= u / (1.0 + 0.5 * z * u);
    }
    z
}

pub fn gamma_fn(x: f64) -> f64 {
    gamma::gamma(x)
}

/// Non-regularized upper incomplete gamma `Γ(a, x)`.
pub fn upper_incomplete_gamma(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return gamma::gamma(a);
    }
    gamma::gamma_ur(a, x) * gamma::gamma(a)
}

/// `∫_p^1 u^(a-1) (1-u)^(b-1) du`
pub fn upper_incomplete_beta(a: f64, b: f64, p: f64) -> f64 {
    if p <= 0.0 {
        return beta::beta(a, b);
    }
    // I_p(a,b) = 1 - I_{1-p}(b,a) avoids cancellation for p near 1.
    beta::beta(a, b) * beta::beta_reg(b, a, 1.0 - p)
}

/// `pi*s / sin(pi*s)`, the mean of the standard log-logistic law with shape s < 1.
pub fn pi_s_over_sin(s: f64) -> f64 {
    if s == 0.0 {
        1.0
    } else {
        PI * s / (PI * s).sin()
    }
}
