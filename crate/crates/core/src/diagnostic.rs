use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::span::SourceSpan;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Code {
    #[serde(rename = "E-SYNTAX")]
    Syntax,
    #[serde(rename = "E-UNSAFE")]
    Unsafe,
    #[serde(rename = "E-UNDEFINED")]
    Undefined,
    #[serde(rename = "W-ORDER")]
    Order,
    #[serde(rename = "W-STRAT")]
    Strat,
    #[serde(rename = "W-CYCLE")]
    Cycle,
}

impl Code {
    pub const ALL: [Code; 6] = [
        Code::Syntax,
        Code::Unsafe,
        Code::Undefined,
        Code::Order,
        Code::Strat,
        Code::Cycle,
    ];

    pub fn severity(self) -> Severity {
        match self {
            Code::Syntax | Code::Unsafe | Code::Undefined => Severity::Error,
            Code::Order | Code::Strat | Code::Cycle => Severity::Warning,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Code::Syntax => "E-SYNTAX",
            Code::Unsafe => "E-UNSAFE",
            Code::Undefined => "E-UNDEFINED",
            Code::Order => "W-ORDER",
            Code::Strat => "W-STRAT",
            Code::Cycle => "W-CYCLE",
        }
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A single finding produced by any of the checks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: Code,
    pub span: SourceSpan,
    pub message: String,
    pub file: PathBuf,
}

impl Diagnostic {
    pub fn new(code: Code, span: SourceSpan, message: impl Into<String>, file: &Path) -> Self {
        Self {
            severity: code.severity(),
            code,
            span,
            message: message.into(),
            file: file.to_path_buf(),
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}:{}: {}[{}] {}",
            self.file.display(),
            self.span.start.line + 1,
            self.span.start.column + 1,
            self.severity,
            self.code,
            self.message
        )
    }
}

/// Orders diagnostics by file, then position, then code.
pub fn sort_diagnostics(diagnostics: &mut [Diagnostic]) {
    diagnostics.sort_by(|a, b| {
        (&a.file, a.span.start, a.span.end, a.code).cmp(&(
            &b.file,
            b.span.start,
            b.span.end,
            b.code,
        ))
    });
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::span::SourcePos;

    #[test]
    fn severity_follows_code_prefix() {
        for code in Code::ALL {
            let expected = if code.as_str().starts_with("E-") {
                Severity::Error
            } else {
                Severity::Warning
            };
            assert_eq!(code.severity(), expected, "{code}");
        }
    }

    #[test]
    fn text_rendering_is_one_based() {
        let d = Diagnostic::new(
            Code::Order,
            SourceSpan::new(SourcePos::new(0, 6), SourcePos::new(0, 17)),
            "msg",
            Path::new("a.lp"),
        );
        assert_eq!(d.to_string(), "a.lp:1:7: warning[W-ORDER] msg");
    }

    #[test]
    fn json_uses_code_names() {
        let d = Diagnostic::new(
            Code::Undefined,
            SourceSpan::default(),
            "m",
            Path::new("x.lp"),
        );
        let json = serde_json::to_string(&d).unwrap();
        assert!(json.contains("\"E-UNDEFINED\""));
        assert!(json.contains("\"error\""));
        let back: Diagnostic = serde_json::from_str(&json).unwrap();
        assert_eq!(back, d);
    }
}
