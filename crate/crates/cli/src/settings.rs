//! Merges a `key = value` config file with command-line flags.
//!
//! Config keys are the long flag names with `-` replaced by `_`; a flag
//! given on the command line always wins.

use std::path::Path;
use std::str::FromStr;

use vlab_core::lattice::{ParamFile, StreetParams, DEFAULT_BIG_N};

use crate::error::CliError;

#[derive(Debug, Clone, Default)]
pub struct Settings {
    file: ParamFile,
}

impl Settings {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else { return Ok(Self::default()) };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::validation(format!("cannot read config {}: {e}", path.display())))?;
        Ok(Self { file: ParamFile::parse(&text)? })
    }

    pub fn from_text(text: &str) -> Result<Self, CliError> {
        Ok(Self { file: ParamFile::parse(text)? })
    }

    /// Flag value, else the config entry `key`, else `None`.
    pub fn value<T: FromStr>(&self, key: &str, flag: Option<T>) -> Result<Option<T>, CliError> {
        if flag.is_some() {
            return Ok(flag);
        }
        let Some(raw) = self.file.get(key) else { return Ok(None) };
        raw.parse()
            .map(Some)
            .map_err(|_| CliError::validation(format!("config key `{key}` has an invalid value `{raw}`")))
    }

    pub fn or<T: FromStr>(&self, key: &str, flag: Option<T>, default: T) -> Result<T, CliError> {
        Ok(self.value(key, flag)?.unwrap_or(default))
    }

    pub fn required<T: FromStr>(&self, key: &str, flag: Option<T>) -> Result<T, CliError> {
        self.value(key, flag)?
            .ok_or_else(|| CliError::validation(format!("missing required parameter --{}", key.replace('_', "-"))))
    }

    /// Comma-separated list from a flag or the config entry `key`.
    pub fn list<T: FromStr>(&self, key: &str, flag: Option<&str>) -> Result<Option<Vec<T>>, CliError> {
        let Some(raw) = flag.or_else(|| self.file.get(key)) else { return Ok(None) };
        parse_list(key, raw).map(Some)
    }

    pub fn flag(&self, key: &str, flag: bool) -> Result<bool, CliError> {
        if flag {
            return Ok(true);
        }
        self.or(key, None, false)
    }

    /// Truncation half-count from `--n`, config `n` or `big_n`, else 150.
    pub fn big_n(&self, flag: Option<usize>) -> Result<usize, CliError> {
        match self.value("n", flag)? {
            Some(n) => Ok(n),
            None => self.or("big_n", None, DEFAULT_BIG_N),
        }
    }

    /// Street parameters; `a` and `gamma` default to 1, `h` to `h_default`
    /// when given.
    pub fn street_params(&self, flags: &StreetFlags, h_default: Option<f64>) -> Result<StreetParams<f64>, CliError> {
        let a = self.or("a", flags.a, 1.0)?;
        let gamma = self.or("gamma", flags.gamma, 1.0)?;
        let b = self.required("b", flags.b)?;
        let h = match h_default {
            Some(d) => self.or("h", flags.h, d)?,
            None => self.required("h", flags.h)?,
        };
        Ok(StreetParams::new(a, b, h, gamma, self.big_n(flags.n)?)?)
    }
}

/// Raw street flags shared by most subcommands.
#[derive(Debug, Clone, Copy, Default)]
pub struct StreetFlags {
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub h: Option<f64>,
    pub gamma: Option<f64>,
    pub n: Option<usize>,
}

pub fn parse_list<T: FromStr>(key: &str, raw: &str) -> Result<Vec<T>, CliError> {
    raw.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse()
                .map_err(|_| CliError::validation(format!("`{key}`: cannot parse list entry `{s}`")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_config() {
        let s = Settings::from_text("b = 0.3\nh = 0.9\nn = 20\n").unwrap();
        let flags = StreetFlags { h: Some(1.1), ..Default::default() };
        let p = s.street_params(&flags, None).unwrap();
        assert_eq!((p.b, p.h, p.big_n, p.a), (0.3, 1.1, 20, 1.0));
    }

    #[test]
    fn default_truncation_is_150() {
        let s = Settings::default();
        assert_eq!(s.big_n(None).unwrap(), 150);
        let s = Settings::from_text("big_n = 7").unwrap();
        assert_eq!(s.big_n(None).unwrap(), 7);
        assert_eq!(s.big_n(Some(3)).unwrap(), 3);
    }

    #[test]
    fn bad_values_are_validation_errors() {
        let s = Settings::from_text("b = x").unwrap();
        assert!(matches!(s.value::<f64>("b", None), Err(CliError::Validation(_))));
        assert!(matches!(s.required::<f64>("h", None), Err(CliError::Validation(_))));
        assert!(parse_list::<f64>("t", "0, 4,8 ,12").unwrap() == vec![0.0, 4.0, 8.0, 12.0]);
        assert!(parse_list::<f64>("t", "0,a").is_err());
    }
}
