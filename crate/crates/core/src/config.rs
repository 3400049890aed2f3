//! Per-directory `ezasp.json` configuration.

use std::collections::BTreeSet;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagnostic::Code;
use crate::syntax::{parse_program, PredicateKey};

pub const CONFIG_FILE: &str = "ezasp.json";

const KNOWN_KEYS: [&str; 6] = [
    "syntaxChecking",
    "unsafeVariableChecking",
    "orderingChecking",
    "stratificationChecking",
    "autoReorderEnabled",
    "programFiles",
];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct Config {
    pub syntax_checking: bool,
    pub unsafe_variable_checking: bool,
    pub ordering_checking: bool,
    pub stratification_checking: bool,
    pub auto_reorder_enabled: bool,
    pub program_files: Vec<PathBuf>,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            syntax_checking: true,
            unsafe_variable_checking: true,
            ordering_checking: true,
            stratification_checking: true,
            auto_reorder_enabled: true,
            program_files: Vec::new(),
        }
    }
}

impl Config {
    /// Whether diagnostics with this code are reported.
    pub fn reports(&self, code: Code) -> bool {
        match code {
            Code::Syntax => self.syntax_checking,
            Code::Unsafe => self.unsafe_variable_checking,
            Code::Order => self.ordering_checking,
            Code::Strat | Code::Undefined | Code::Cycle => self.stratification_checking,
        }
    }

    pub fn is_multi_file(&self) -> bool {
        !self.program_files.is_empty()
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{} is malformed: {source}", path.display())]
    Malformed {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("{} already exists", .0.display())]
    AlreadyExists(PathBuf),
    #[error("cannot access {}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
}

/// A loaded configuration plus the problems met while loading it. Problems
/// never prevent loading: the affected settings fall back to defaults.
#[derive(Debug, Default)]
pub struct LoadedConfig {
    pub config: Config,
    pub path: Option<PathBuf>,
    pub issues: Vec<String>,
}

pub fn load_config(directory: &Path) -> LoadedConfig {
    let path = directory.join(CONFIG_FILE);
    let bytes = match fs::read(&path) {
        Ok(bytes) => bytes,
        Err(e) if e.kind() == io::ErrorKind::NotFound => return LoadedConfig::default(),
        Err(source) => {
            let err = ConfigError::Io {
                path: path.clone(),
                source,
            };
            log::warn!("{err}");
            return LoadedConfig {
                path: Some(path),
                issues: vec![err.to_string()],
                ..Default::default()
            };
        }
    };
    let (config, issues) = parse_config(&path, &bytes);
    for issue in &issues {
        log::warn!("{issue}");
    }
    LoadedConfig {
        config,
        path: Some(path),
        issues,
    }
}

/// Parses config bytes. Unknown keys are reported and ignored; an
/// unparseable file yields the defaults.
pub fn parse_config(path: &Path, bytes: &[u8]) -> (Config, Vec<String>) {
    let mut issues = Vec::new();
    let value: serde_json::Value = match serde_json::from_slice(bytes) {
        Ok(v) => v,
        Err(source) => {
            issues.push(
                ConfigError::Malformed {
                    path: path.to_path_buf(),
                    source,
                }
                .to_string(),
            );
            return (Config::default(), issues);
        }
    };
    let Some(map) = value.as_object() else {
        issues.push(format!("{}: expected a JSON object", path.display()));
        return (Config::default(), issues);
    };
    for key in map.keys().filter(|k| !KNOWN_KEYS.contains(&k.as_str())) {
        issues.push(format!("{}: unknown key `{key}` ignored", path.display()));
    }
    let mut config: Config = match serde_json::from_value(value) {
        Ok(c) => c,
        Err(source) => {
            issues.push(
                ConfigError::Malformed {
                    path: path.to_path_buf(),
                    source,
                }
                .to_string(),
            );
            return (Config::default(), issues);
        }
    };
    let mut seen = BTreeSet::new();
    let before = config.program_files.len();
    config.program_files.retain(|f| seen.insert(f.clone()));
    if config.program_files.len() != before {
        issues.push(format!(
            "{}: duplicate programFiles entries ignored",
            path.display()
        ));
    }
    (config, issues)
}

/// Writes `ezasp.json` with every key at its default. Never overwrites.
pub fn generate_default_config(directory: &Path) -> Result<PathBuf, ConfigError> {
    let path = directory.join(CONFIG_FILE);
    let io_err = |source| ConfigError::Io {
        path: path.clone(),
        source,
    };
    let mut file = match fs::OpenOptions::new()
        .write(true)
        .create_new(true)
        .open(&path)
    {
        Ok(f) => f,
        Err(e) if e.kind() == io::ErrorKind::AlreadyExists => {
            return Err(ConfigError::AlreadyExists(path));
        }
        Err(e) => return Err(io_err(e)),
    };
    let mut text = serde_json::to_string_pretty(&Config::default()).expect("config serializes");
    text.push('\n');
    file.write_all(text.as_bytes()).map_err(io_err)?;
    Ok(path)
}

/// Predicates defined by the other files of a multi-file program. Paths in
/// `programFiles` are relative to `directory`. Missing files are reported
/// through `issues` and contribute nothing.
pub fn external_predicates(
    config: &Config,
    directory: &Path,
    current_file: &Path,
    issues: &mut Vec<String>,
) -> BTreeSet<PredicateKey> {
    let current = normalize(current_file);
    let mut out = BTreeSet::new();
    for entry in &config.program_files {
        let path = directory.join(entry);
        if normalize(&path) == current {
            continue;
        }
        match fs::read_to_string(&path) {
            Ok(source) => {
                let program = parse_program(&source, &path);
                for c in &program.constructs {
                    out.extend(c.definitions.iter().map(|d| d.key.clone()));
                }
            }
            Err(e) => {
                let msg = format!("program file {}: {e}", path.display());
                log::warn!("{msg}");
                issues.push(msg);
            }
        }
    }
    out
}

/// Is `file` one of the configured program files?
pub fn lists_file(config: &Config, directory: &Path, file: &Path) -> bool {
    let file = normalize(file);
    config
        .program_files
        .iter()
        .any(|e| normalize(&directory.join(e)) == file)
}

fn normalize(path: &Path) -> PathBuf {
    fs::canonicalize(path).unwrap_or_else(|_| path.to_path_buf())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(json: &str) -> (Config, Vec<String>) {
        parse_config(Path::new("ezasp.json"), json.as_bytes())
    }

    #[test]
    fn missing_file_gives_defaults() {
        let dir = tempfile::tempdir().unwrap();
        let loaded = load_config(dir.path());
        assert_eq!(loaded.config, Config::default());
        assert!(loaded.path.is_none());
        assert!(loaded.issues.is_empty());
    }

    #[test]
    fn single_key_override() {
        let (c, issues) = parse(r#"{"orderingChecking": false}"#);
        assert!(issues.is_empty());
        assert_eq!(
            c,
            Config {
                ordering_checking: false,
                ..Default::default()
            }
        );
        assert!(!c.reports(Code::Order));
        assert!(c.reports(Code::Strat));
    }

    #[test]
    fn program_files_keep_order() {
        let (c, _) = parse(r#"{"programFiles": ["instance.lp", "encoding.lp"]}"#);
        assert_eq!(
            c.program_files,
            [PathBuf::from("instance.lp"), PathBuf::from("encoding.lp")]
        );
        assert!(c.is_multi_file());
    }

    #[test]
    fn unknown_keys_are_reported_and_ignored() {
        let (c, issues) = parse(r#"{"solverArgs": "-n 0", "syntaxChecking": false}"#);
        assert!(!c.syntax_checking);
        assert_eq!(issues.len(), 1);
        assert!(issues[0].contains("solverArgs"));
    }

    #[test]
    fn malformed_falls_back_to_defaults() {
        for bad in ["{", "[]", r#"{"syntaxChecking": "yes"}"#] {
            let (c, issues) = parse(bad);
            assert_eq!(c, Config::default(), "{bad}");
            assert_eq!(issues.len(), 1, "{bad}");
        }
    }

    #[test]
    fn duplicate_program_files_are_dropped() {
        let (c, issues) = parse(r#"{"programFiles": ["a.lp", "b.lp", "a.lp"]}"#);
        assert_eq!(
            c.program_files,
            [PathBuf::from("a.lp"), PathBuf::from("b.lp")]
        );
        assert_eq!(issues.len(), 1);
    }

    #[test]
    fn generate_writes_all_keys_once() {
        let dir = tempfile::tempdir().unwrap();
        let path = generate_default_config(dir.path()).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        let keys: Vec<&str> = value
            .as_object()
            .unwrap()
            .keys()
            .map(String::as_str)
            .collect();
        assert_eq!(keys.len(), 6);
        for k in KNOWN_KEYS {
            assert!(keys.contains(&k), "{k}");
        }
        assert_eq!(load_config(dir.path()).config, Config::default());

        fs::write(&path, "{}").unwrap();
        assert!(matches!(
            generate_default_config(dir.path()),
            Err(ConfigError::AlreadyExists(_))
        ));
        assert_eq!(fs::read_to_string(&path).unwrap(), "{}");
    }

    #[test]
    fn generate_into_unwritable_location_fails() {
        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("plain");
        fs::write(&file, "").unwrap();
        assert!(matches!(
            generate_default_config(&file),
            Err(ConfigError::Io { .. })
        ));
    }

    #[test]
    fn external_predicates_from_other_files() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("instance.lp"), "node(1..5). edge(1,2).").unwrap();
        fs::write(dir.path().join("encoding.lp"), "reach(X) :- node(X).").unwrap();
        let (config, _) = parse(r#"{"programFiles": ["instance.lp", "encoding.lp", "gone.lp"]}"#);
        let mut issues = Vec::new();
        let ext = external_predicates(
            &config,
            dir.path(),
            &dir.path().join("encoding.lp"),
            &mut issues,
        );
        assert_eq!(
            ext,
            [PredicateKey::new("edge", 2), PredicateKey::new("node", 1)].into()
        );
        assert_eq!(issues.len(), 1);
        assert!(lists_file(
            &config,
            dir.path(),
            &dir.path().join("instance.lp")
        ));

        let ext = external_predicates(
            &Config::default(),
            dir.path(),
            Path::new("x.lp"),
            &mut issues,
        );
        assert!(ext.is_empty());
    }
}
