//! Numerical tolerances shared by every module.
//!
//! `eps()` is the global equality tolerance on evaluated values. It defaults
//! to [`DEFAULT_EPS`] and can be overridden once per process through the
//! `ORTHOSYM_EPS` environment variable.

use std::sync::OnceLock;

/// Default tolerance for equality of evaluated reals, vectors and matrices.
pub const DEFAULT_EPS: f64 = 1e-9;

/// Tolerance for scalar-level identities (trig, square roots).
pub const EPS_SCALAR: f64 = 1e-12;

/// Unit quaternions within this distance of norm one are renormalized;
/// anything further off is rejected.
pub const UNIT_RENORM_TOL: f64 = 1e-6;

/// Element hash keys round each matrix entry to this many decimal digits.
pub const HASH_DIGITS: i32 = 6;

/// Maximum allowed distance of `m * theta / 2pi` from an integer.
pub const RESIDUE_TOL: f64 = 1e-6;

/// Default cap for element orders.
pub const DEFAULT_ORDER_CAP: usize = 10_000;

/// Default cap for group orders.
pub const DEFAULT_MAX_ORDER: usize = 10_000;

/// Name of the environment variable overriding [`DEFAULT_EPS`].
pub const EPS_ENV_VAR: &str = "ORTHOSYM_EPS";

static EPS: OnceLock<f64> = OnceLock::new();

/// The global equality tolerance.
pub fn eps() -> f64 {
    *EPS.get_or_init(|| {
        std::env::var(EPS_ENV_VAR)
            .ok()
            .and_then(|v| v.trim().parse::<f64>().ok())
            .filter(|v| v.is_finite() && *v > 0.0)
            .unwrap_or(DEFAULT_EPS)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eps_is_positive_and_small() {
        let e = eps();
        assert!(e > 0.0 && e < 1e-3);
    }
}
