//! The full check pipeline: parse, safety, ordering, stratification.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use crate::config::{self, Config};
use crate::diagnostic::{sort_diagnostics, Code, Diagnostic};
use crate::methodology::{check_ordering, check_stratification, PredicateIndex};
use crate::reorder::cycle_diagnostics;
use crate::safety::{analyze_safety, unsafe_diagnostic, SafetyReport};
use crate::syntax::{parse_program, PredicateKey, Program};

#[derive(Clone, Debug)]
pub struct Analysis {
    pub program: Program,
    pub index: PredicateIndex,
    /// One report per construct, in construct order.
    pub safety: Vec<SafetyReport>,
    /// Diagnostics enabled by the configuration, sorted by position.
    pub diagnostics: Vec<Diagnostic>,
}

impl Analysis {
    pub fn count(&self, code: Code) -> usize {
        self.diagnostics.iter().filter(|d| d.code == code).count()
    }

    pub fn has(&self, code: Code) -> bool {
        self.diagnostics.iter().any(|d| d.code == code)
    }
}

/// Runs every check and keeps the diagnostics the configuration enables.
/// Parsing always happens, whatever the toggles say.
pub fn analyze(
    source: &str,
    file: impl AsRef<Path>,
    config: &Config,
    external: &BTreeSet<PredicateKey>,
) -> Analysis {
    let program = parse_program(source, file);
    let index = PredicateIndex::build(&program);
    let safety: Vec<SafetyReport> = program.constructs.iter().map(analyze_safety).collect();

    let mut all: Vec<Diagnostic> = program.syntax_errors.clone();
    all.extend(
        safety
            .iter()
            .filter_map(|r| unsafe_diagnostic(r, &program.file)),
    );
    all.extend(check_ordering(&program));
    all.extend(check_stratification(&program, &index, external));
    all.extend(cycle_diagnostics(&program));
    all.retain(|d| config.reports(d.code));
    sort_diagnostics(&mut all);

    Analysis {
        program,
        index,
        safety,
        diagnostics: all,
    }
}

/// Configuration context for a file on disk.
#[derive(Clone, Debug)]
pub struct Workspace {
    pub directory: PathBuf,
    pub config: Config,
    pub issues: Vec<String>,
}

impl Workspace {
    pub fn load(directory: &Path) -> Self {
        let loaded = config::load_config(directory);
        Self {
            directory: directory.to_path_buf(),
            config: loaded.config,
            issues: loaded.issues,
        }
    }

    /// Predicates the other program files define for `file`.
    pub fn external_for(&mut self, file: &Path) -> BTreeSet<PredicateKey> {
        config::external_predicates(&self.config, &self.directory, file, &mut self.issues)
    }

    pub fn analyze(&mut self, source: &str, file: &Path) -> Analysis {
        let external = self.external_for(file);
        analyze(source, file, &self.config, &external)
    }
}
