use std::path::{Path, PathBuf};

use chromalg::algebra::DEFAULT_MAX_TABLE_ORDER;
use chromalg::ncpartition::DEFAULT_MAX_ENUMERATION_ORDER;
use serde::Deserialize;

pub const ENV_MAX_ENUMERATION_ORDER: &str = "CHROMALG_MAX_ENUMERATION_ORDER";
pub const ENV_MAX_TABLE_ORDER: &str = "CHROMALG_MAX_TABLE_ORDER";
pub const DEFAULT_SEED: u64 = 0;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Config {
    pub max_enumeration_order: usize,
    pub max_table_order: usize,
    pub parallelism: usize,
    pub trace: bool,
    pub output: Option<PathBuf>,
    pub seed: u64,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            max_enumeration_order: DEFAULT_MAX_ENUMERATION_ORDER,
            max_table_order: DEFAULT_MAX_TABLE_ORDER,
            parallelism: 1,
            trace: false,
            output: None,
            seed: DEFAULT_SEED,
        }
    }
}

/// Keys accepted in the TOML config file; all optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub max_enumeration_order: Option<usize>,
    pub max_table_order: Option<usize>,
    pub parallelism: Option<usize>,
    pub trace: Option<bool>,
    pub output: Option<PathBuf>,
    pub seed: Option<u64>,
}

/// Values given on the command line; they override everything else.
#[derive(Debug, Default)]
pub struct Overrides {
    pub parallelism: Option<usize>,
    pub trace: bool,
    pub output: Option<PathBuf>,
    pub seed: Option<u64>,
}

impl Config {
    /// Defaults, then the config file, then the environment, then flags.
    pub fn load(
        file: Option<&Path>,
        env: impl Fn(&str) -> Option<String>,
        flags: Overrides,
    ) -> Result<Self, String> {
        let mut cfg = Config::default();
        if let Some(path) = file {
            let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            let fc: FileConfig = toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
            cfg.apply_file(fc);
        }
        for (key, slot) in [
            (ENV_MAX_ENUMERATION_ORDER, &mut cfg.max_enumeration_order),
            (ENV_MAX_TABLE_ORDER, &mut cfg.max_table_order),
        ] {
            if let Some(v) = env(key) {
                *slot = v.trim().parse().map_err(|_| format!("{key}={v:?} is not a non-negative integer"))?;
            }
        }
        if let Some(p) = flags.parallelism {
            cfg.parallelism = p;
        }
        cfg.trace |= flags.trace;
        if flags.output.is_some() {
            cfg.output = flags.output;
        }
        if let Some(s) = flags.seed {
            cfg.seed = s;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn apply_file(&mut self, fc: FileConfig) {
        if let Some(v) = fc.max_enumeration_order {
            self.max_enumeration_order = v;
        }
        if let Some(v) = fc.max_table_order {
            self.max_table_order = v;
        }
        if let Some(v) = fc.parallelism {
            self.parallelism = v;
        }
        if let Some(v) = fc.trace {
            self.trace = v;
        }
        if fc.output.is_some() {
            self.output = fc.output;
        }
        if let Some(v) = fc.seed {
            self.seed = v;
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.max_enumeration_order == 0 || self.max_table_order == 0 {
            return Err("caps must be positive".into());
        }
        if self.max_table_order > self.max_enumeration_order {
            return Err(format!(
                "table cap {} exceeds enumeration cap {}",
                self.max_table_order, self.max_enumeration_order
            ));
        }
        if self.parallelism == 0 {
            return Err("parallelism must be at least 1".into());
        }
        Ok(())
    }
}
