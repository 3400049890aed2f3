use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use ezasp_core::config::{generate_default_config, load_config};
use ezasp_core::reorder::{reorder_program, ReorderError};
use ezasp_core::{parse_program, Code, Diagnostic, Workspace};

const EXIT_CLEAN: u8 = 0;
const EXIT_WARNINGS: u8 = 1;
const EXIT_ERRORS: u8 = 2;
const EXIT_FAILURE: u8 = 3;

/// Static checks and automatic reordering for Easy ASP programs.
#[derive(Parser)]
#[command(name = "ezasp", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Report syntax, safety, ordering and stratification problems.
    Lint {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Directory holding ezasp.json (defaults to each file's directory).
        #[arg(long, value_name = "DIR")]
        config: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Rewrite a program into methodology order.
    Reorder {
        file: PathBuf,
        /// Replace the file in place.
        #[arg(long, conflicts_with = "stdout")]
        write: bool,
        /// Print the result (the default).
        #[arg(long)]
        stdout: bool,
        #[arg(long, value_name = "DIR")]
        config: Option<PathBuf>,
    },
    /// Create a default ezasp.json.
    InitConfig {
        #[arg(default_value = ".")]
        directory: PathBuf,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Serialize, Deserialize)]
struct LintReport {
    file: PathBuf,
    diagnostics: Vec<Diagnostic>,
    summary: BTreeMap<Code, usize>,
}

impl LintReport {
    fn new(file: PathBuf, diagnostics: Vec<Diagnostic>) -> Self {
        let mut summary: BTreeMap<Code, usize> = Code::ALL.iter().map(|&c| (c, 0)).collect();
        for d in &diagnostics {
            *summary.entry(d.code).or_default() += 1;
        }
        Self {
            file,
            diagnostics,
            summary,
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                EXIT_FAILURE
            } else {
                EXIT_CLEAN
            });
        }
    };
    let result = match cli.command {
        Command::Lint {
            files,
            config,
            format,
        } => lint(&files, config.as_deref(), format),
        Command::Reorder {
            file,
            write,
            config,
            ..
        } => reorder(&file, write, config.as_deref()),
        Command::InitConfig { directory } => init_config(&directory),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("ezasp: {e:#}");
            ExitCode::from(EXIT_FAILURE)
        }
    }
}

fn config_dir(file: &Path, explicit: Option<&Path>) -> PathBuf {
    match explicit {
        Some(dir) => dir.to_path_buf(),
        None => match file.parent() {
            Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
            _ => PathBuf::from("."),
        },
    }
}

fn lint(files: &[PathBuf], config: Option<&Path>, format: Format) -> Result<u8> {
    let mut reports = Vec::new();
    let mut io_failure = false;
    for file in files {
        let source = match fs::read_to_string(file) {
            Ok(s) => s,
            Err(e) => {
                eprintln!("ezasp: cannot read {}: {e}", file.display());
                io_failure = true;
                continue;
            }
        };
        let mut workspace = Workspace::load(&config_dir(file, config));
        let analysis = workspace.analyze(&source, file);
        for issue in &workspace.issues {
            eprintln!("ezasp: {issue}");
        }
        reports.push(LintReport::new(file.clone(), analysis.diagnostics));
    }

    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match format {
        Format::Text => {
            for d in reports.iter().flat_map(|r| &r.diagnostics) {
                writeln!(out, "{d}")?;
            }
        }
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, &reports)?;
            writeln!(out)?;
        }
    }

    let all = || reports.iter().flat_map(|r| &r.diagnostics);
    Ok(if io_failure {
        EXIT_FAILURE
    } else if all().any(Diagnostic::is_error) {
        EXIT_ERRORS
    } else if all().next().is_some() {
        EXIT_WARNINGS
    } else {
        EXIT_CLEAN
    })
}

fn reorder(file: &Path, write: bool, config: Option<&Path>) -> Result<u8> {
    let loaded = load_config(&config_dir(file, config));
    for issue in &loaded.issues {
        eprintln!("ezasp: {issue}");
    }
    if !loaded.config.auto_reorder_enabled {
        eprintln!("ezasp: automatic reordering is disabled by autoReorderEnabled");
        return Ok(EXIT_FAILURE);
    }
    let source =
        fs::read_to_string(file).with_context(|| format!("cannot read {}", file.display()))?;
    let program = parse_program(&source, file);
    let outcome = match reorder_program(&program) {
        Ok(o) => o,
        Err(e @ ReorderError::RefusedOnSyntaxError(_)) => {
            for d in &program.syntax_errors {
                eprintln!("{d}");
            }
            eprintln!("ezasp: {e}");
            return Ok(EXIT_ERRORS);
        }
    };
    for d in &outcome.diagnostics {
        eprintln!("{d}");
    }
    if write {
        write_atomically(file, &outcome.text)?;
    } else {
        let mut out = std::io::stdout().lock();
        out.write_all(outcome.text.as_bytes())?;
        out.flush()?;
    }
    Ok(EXIT_CLEAN)
}

fn write_atomically(file: &Path, text: &str) -> Result<()> {
    let dir = config_dir(file, None);
    let mut tmp = tempfile::NamedTempFile::new_in(&dir)
        .with_context(|| format!("cannot create a temporary file in {}", dir.display()))?;
    tmp.write_all(text.as_bytes())?;
    tmp.as_file().sync_all()?;
    if let Ok(meta) = fs::metadata(file) {
        let _ = fs::set_permissions(tmp.path(), meta.permissions());
    }
    tmp.persist(file)
        .with_context(|| format!("cannot replace {}", file.display()))?;
    Ok(())
}

fn init_config(directory: &Path) -> Result<u8> {
    let path = generate_default_config(directory)?;
    println!("created {}", path.display());
    Ok(EXIT_CLEAN)
}
