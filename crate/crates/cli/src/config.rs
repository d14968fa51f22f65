//! Run configuration shared by every subcommand.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use h4_core::ExactScalar;

use crate::error::CliError;

/// A rational parameter value or the symbol itself.
#[derive(Clone, Debug, PartialEq)]
pub enum Param {
    Value(ExactScalar),
    Symbolic,
}

impl Param {
    pub fn value(&self) -> Option<&ExactScalar> {
        match self {
            Param::Value(v) => Some(v),
            Param::Symbolic => None,
        }
    }
}

impl FromStr for Param {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        if s.trim() == "symbolic" {
            return Ok(Param::Symbolic);
        }
        let v: ExactScalar = s.parse().map_err(|_| CliError::Config(format!("{s:?} is neither P/Q nor symbolic")))?;
        if !v.is_rational() {
            return Err(CliError::Config(format!("{s} is not rational")));
        }
        Ok(Param::Value(v))
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Param::Value(v) => write!(f, "{v}"),
            Param::Symbolic => f.write_str("symbolic"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub nu: Param,
    pub omega: Param,
    pub level: u32,
    pub format: Format,
    /// `None` disables the disk cache
    pub cache: Option<PathBuf>,
}

impl RunConfig {
    /// Rejects ν with `g = ν(ν−1) ≤ −1/4` and non-positive ω.
    pub fn validate(self) -> Result<Self, CliError> {
        if let Some(nu) = self.nu.value() {
            let g = nu * &(nu - &ExactScalar::one());
            if g.cmp_real(&ExactScalar::from_ratio(-1, 4)).is_le() {
                return Err(CliError::Config(format!("nu = {nu} gives g = {g}, which must exceed -1/4")));
            }
        }
        if let Some(omega) = self.omega.value() {
            if omega.signum() <= 0 {
                return Err(CliError::Config(format!("omega = {omega} must be positive")));
            }
        }
        Ok(self)
    }

    /// Both parameters when numeric.
    pub fn numeric(&self) -> Option<(ExactScalar, ExactScalar)> {
        Some((self.nu.value()?.clone(), self.omega.value()?.clone()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(nu: &str, omega: &str) -> RunConfig {
        RunConfig { nu: nu.parse().unwrap(), omega: omega.parse().unwrap(), level: 6, format: Format::Text, cache: None }
    }

    #[test]
    fn coupling_bound() {
        assert!(config("1/3", "1").validate().is_ok());
        assert!(config("1", "1").validate().is_ok());
        assert!(config("symbolic", "symbolic").validate().is_ok());
        // g(1/2) = -1/4 exactly
        assert!(config("1/2", "1").validate().is_err());
        assert!(config("1/3", "0").validate().is_err());
    }

    #[test]
    fn parameter_parsing() {
        assert_eq!("2/5".parse::<Param>().unwrap(), Param::Value(ExactScalar::from_ratio(2, 5)));
        assert_eq!("symbolic".parse::<Param>().unwrap(), Param::Symbolic);
        assert!("sqrt5".parse::<Param>().is_err());
        assert!("x1".parse::<Param>().is_err());
        assert_eq!(Param::Value(ExactScalar::from_ratio(-3, 7)).to_string(), "-3/7");
    }
}
