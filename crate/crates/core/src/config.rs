//! Run parameters shared by the library entry points.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on the number of items any single enumeration may produce.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

/// Default working precision (bits) for Euler products.
pub const DEFAULT_PRECISION: u32 = 192;

/// Default truncation degree for Euler products.
pub const DEFAULT_CUTOFF: u32 = 20;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Every character computation needs `q` prime with `q ≡ 1 (mod 4)`:
/// quadratic reciprocity then holds without a sign factor.
pub fn validate_modulus(q: u32) -> Result<()> {
    if !is_prime(q as u64) {
        return Err(Error::InvalidConfig(format!("q = {q} is not prime")));
    }
    if q % 4 != 1 {
        return Err(Error::InvalidConfig(format!("q = {q} is not 1 mod 4")));
    }
    if q > 36 {
        return Err(Error::InvalidConfig(format!(
            "q = {q} too large for the digit-string encoding (max 36)"
        )));
    }
    Ok(())
}

/// Fails with [`Error::Budget`] when `count` exceeds `budget`.
pub fn check_budget(what: impl Into<String>, count: u128, budget: u64) -> Result<()> {
    if count > budget as u128 {
        return Err(Error::Budget {
            what: what.into(),
            needed: count,
            budget,
        });
    }
    Ok(())
}

/// `q^n` as u128, saturating.
pub fn qpow(q: u32, n: u32) -> u128 {
    (q as u128).checked_pow(n).unwrap_or(u128::MAX)
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct RunConfig {
    pub q: u32,
    pub g: u32,
    pub k: u32,
    pub cutoff: u32,
    pub precision: u32,
    pub budget: u64,
    pub shards: usize,
    pub nodes: usize,
    pub radius: f64,
    pub alpha: f64,
    pub theta: f64,
    pub cache_dir: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            q: 5,
            g: 1,
            k: 4,
            cutoff: DEFAULT_CUTOFF,
            precision: DEFAULT_PRECISION,
            budget: DEFAULT_BUDGET,
            shards: 1,
            nodes: 32,
            radius: 0.05,
            alpha: 0.5,
            theta: 0.0,
            cache_dir: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        validate_modulus(self.q)?;
        if self.g == 0 {
            return Err(Error::InvalidConfig("g must be at least 1".into()));
        }
        if self.k % 2 != 0 {
            return Err(Error::InvalidConfig(format!("k = {} must be even", self.k)));
        }
        if self.cutoff == 0 {
            return Err(Error::InvalidConfig("cutoff must be at least 1".into()));
        }
        if self.precision < 64 {
            return Err(Error::InvalidConfig("precision must be at least 64 bits".into()));
        }
        if self.shards == 0 {
            return Err(Error::InvalidConfig("shards must be at least 1".into()));
        }
        if !(0.5..=1.0).contains(&self.alpha) {
            return Err(Error::InvalidConfig("alpha must lie in [1/2, 1]".into()));
        }
        if !(0.0..std::f64::consts::PI).contains(&self.theta) {
            return Err(Error::InvalidConfig("theta must lie in [0, pi)".into()));
        }
        if !(self.radius > 0.0 && self.radius < 0.25) {
            return Err(Error::InvalidConfig("radius must lie in (0, 1/4)".into()));
        }
        if self.nodes < 16 {
            return Err(Error::InvalidConfig("nodes must be at least 16".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modulus_validation() {
        assert!(validate_modulus(5).is_ok());
        assert!(validate_modulus(13).is_ok());
        assert!(validate_modulus(7).is_err());
        assert!(validate_modulus(9).is_err());
        assert!(validate_modulus(2).is_err());
    }

    #[test]
    fn default_config_is_valid() {
        RunConfig::default().validate().unwrap();
    }

    #[test]
    fn budget_guard() {
        assert!(check_budget("x", 10, 10).is_ok());
        assert!(matches!(check_budget("x", 11, 10), Err(Error::Budget { .. })));
    }
}
