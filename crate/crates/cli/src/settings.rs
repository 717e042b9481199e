//! Flat `key = value` configuration with command-line override.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::CliError;

#[derive(Debug, Default, Clone)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

impl Settings {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Settings::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Usage(format!(
                    "config line {}: expected `key = value`",
                    idx + 1
                )));
            };
            values.insert(normalize(key.trim()), value.trim().to_string());
        }
        Ok(Settings { values })
    }

    /// The flag value if given, else the config value, else `default`.
    pub fn resolve<T>(&self, key: &str, flag: Option<T>, default: T) -> Result<T, CliError>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        Ok(self.resolve_opt(key, flag)?.unwrap_or(default))
    }

    pub fn resolve_opt<T>(&self, key: &str, flag: Option<T>) -> Result<Option<T>, CliError>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.values.get(&normalize(key)) {
            None => Ok(None),
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|e| CliError::Usage(format!("config key `{key}`: {e}"))),
        }
    }
}

fn normalize(key: &str) -> String {
    key.replace('_', "-").to_ascii_lowercase()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let s = Settings::parse("# gen config\nnodes = 12\nv_max=3.5\n\n").unwrap();
        assert_eq!(s.resolve("nodes", None, 1usize).unwrap(), 12);
        assert_eq!(s.resolve("nodes", Some(4usize), 1).unwrap(), 4);
        assert_eq!(s.resolve("v-max", None, 0.0f64).unwrap(), 3.5);
        assert_eq!(s.resolve("range", None, 10.0f64).unwrap(), 10.0);
        assert!(s.resolve::<usize>("v-max", None, 0).is_err());
    }

    #[test]
    fn malformed_line() {
        assert!(Settings::parse("nodes 12\n").is_err());
    }
}
