//! Experiment configuration: file, then environment, then command-line
//! flags, each layer overriding the previous one.

use std::path::Path;

use romilqr::burgers::BurgersConfig;
use romilqr::ilqr::IlqrConfig;
use romilqr::modred::{Method, SvdMode};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{CliError, CliResult};

/// Environment variables `ROMILQR_<KEY>` override config keys; `__`
/// separates nested keys, e.g. `ROMILQR_BURGERS__N=51`. Values are parsed
/// as JSON and fall back to plain strings.
pub const ENV_PREFIX: &str = "ROMILQR_";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum MethodSelection {
    Bt,
    Lqgbt,
    #[default]
    Both,
}

impl MethodSelection {
    pub fn methods(self) -> Vec<Method> {
        match self {
            MethodSelection::Bt => vec![Method::Bt],
            MethodSelection::Lqgbt => vec![Method::LqgBt],
            MethodSelection::Both => vec![Method::Bt, Method::LqgBt],
        }
    }
}

/// File-name tag of a method.
pub fn method_tag(method: Method) -> &'static str {
    match method {
        Method::Bt => "bt",
        Method::LqgBt => "lqgbt",
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IlqrSettings {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for IlqrSettings {
    fn default() -> Self {
        let d = IlqrConfig::default();
        Self { tol: d.tol, max_iter: d.max_iter }
    }
}

impl IlqrSettings {
    pub fn to_config(self) -> IlqrConfig {
        IlqrConfig { tol: self.tol, max_iter: self.max_iter, record_history: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub burgers: BurgersConfig,
    pub ilqr: IlqrSettings,
    pub r_list: Vec<usize>,
    pub methods: MethodSelection,
    pub seed: u64,
    pub svd_mode: SvdMode,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            burgers: BurgersConfig::default(),
            ilqr: IlqrSettings::default(),
            r_list: (2..=11).collect(),
            methods: MethodSelection::Both,
            seed: 0,
            svd_mode: SvdMode::Full,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> CliResult<()> {
        self.burgers.validate().map_err(|e| CliError::Config(e.to_string()))?;
        if !(self.ilqr.tol > 0.0) {
            return Err(CliError::Config(format!("ilqr.tol must be positive, got {}", self.ilqr.tol)));
        }
        if self.ilqr.max_iter == 0 {
            return Err(CliError::Config("ilqr.max_iter must be at least 1".into()));
        }
        if let Some(&r) = self.r_list.iter().find(|&&r| r < 2 || r > self.burgers.n) {
            return Err(CliError::Config(format!("r = {r} outside [2, {}]", self.burgers.n)));
        }
        Ok(())
    }

    /// Reads `path` (if any), applies environment overrides from `env`, and
    /// validates.
    pub fn load<I>(path: Option<&Path>, env: I) -> CliResult<Self>
    where
        I: IntoIterator<Item = (String, String)>,
    {
        let mut value = match path {
            Some(p) => read_value(p)?,
            None => Value::Object(Map::new()),
        };
        apply_env(&mut value, env)?;
        let config: Self = serde_json::from_value(value).map_err(|e| CliError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }
}

fn read_value(path: &Path) -> CliResult<Value> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let ext = path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase);
    let parsed = match ext.as_deref() {
        Some("toml") => toml::from_str::<Value>(&text).map_err(|e| e.to_string()),
        Some("json") => serde_json::from_str::<Value>(&text).map_err(|e| e.to_string()),
        _ => return Err(CliError::Config(format!("{}: expected a .toml or .json file", path.display()))),
    };
    parsed.map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn apply_env<I>(root: &mut Value, env: I) -> CliResult<()>
where
    I: IntoIterator<Item = (String, String)>,
{
    let mut vars: Vec<_> = env.into_iter().filter(|(k, _)| k.starts_with(ENV_PREFIX)).collect();
    vars.sort();
    for (key, raw) in vars {
        let path: Vec<String> = key[ENV_PREFIX.len()..].split("__").map(str::to_ascii_lowercase).collect();
        if path.iter().any(String::is_empty) {
            return Err(CliError::Config(format!("malformed override variable {key}")));
        }
        let parsed = serde_json::from_str(&raw).unwrap_or(Value::String(raw));
        let mut node = &mut *root;
        for (i, part) in path.iter().enumerate() {
            let Value::Object(map) = node else {
                return Err(CliError::Config(format!("{key}: {} is not a table", path[..i].join("."))));
            };
            if i + 1 == path.len() {
                map.insert(part.clone(), parsed);
                break;
            }
            node = map.entry(part.clone()).or_insert_with(|| Value::Object(Map::new()));
        }
    }
    Ok(())
}

/// Parses `2,3,5` or `2-5` (or a mix); an empty string is the empty list.
pub fn parse_r_list(s: &str) -> CliResult<Vec<usize>> {
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let parse = |t: &str| {
            t.trim().parse::<usize>().map_err(|_| CliError::Config(format!("invalid r value {t:?}")))
        };
        match item.split_once('-') {
            Some((lo, hi)) => {
                let (lo, hi) = (parse(lo)?, parse(hi)?);
                if lo > hi {
                    return Err(CliError::Config(format!("empty r range {item}")));
                }
                out.extend(lo..=hi);
            }
            None => out.push(parse(item)?),
        }
    }
    Ok(out)
}
