//! Optional key = value configuration files for `run` and `sweep`.
//!
//! Lines look like `shots = 8192`; `#` starts a comment. Flags given on the
//! command line always win over file values.

use std::collections::BTreeMap;
use std::path::Path;

use noisim_core::Error;

#[derive(Debug, Default, Clone)]
pub struct FileConfig {
    values: BTreeMap<String, String>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, Error> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidParameter(format!("cannot read {}: {e}", path.display())))?;
        let mut values = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::InvalidParameter(format!(
                    "{}:{}: expected `key = value`",
                    path.display(),
                    lineno + 1
                )));
            };
            values.insert(
                key.trim().replace('-', "_"),
                value.trim().trim_matches('"').to_string(),
            );
        }
        Ok(Self { values })
    }

    /// Flag wins; file value next; `default` last.
    pub fn pick<T: std::str::FromStr>(
        &self,
        flag: Option<T>,
        key: &str,
        default: T,
    ) -> Result<T, Error> {
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.values.get(key) {
            Some(text) => text
                .parse::<T>()
                .map_err(|_| Error::InvalidParameter(format!("config key `{key}`: bad value `{text}`"))),
            None => Ok(default),
        }
    }

    /// Boolean switches: a set CLI flag wins, otherwise the file value.
    pub fn pick_flag(&self, flag: bool, key: &str) -> Result<bool, Error> {
        if flag {
            return Ok(true);
        }
        match self.values.get(key) {
            Some(text) => match text.to_ascii_lowercase().as_str() {
                "true" | "1" | "yes" | "on" => Ok(true),
                "false" | "0" | "no" | "off" => Ok(false),
                other => Err(Error::InvalidParameter(format!(
                    "config key `{key}`: bad boolean `{other}`"
                ))),
            },
            None => Ok(false),
        }
    }
}
