use ezasp_core::{Diagnostic, Severity, SourcePos, SourceSpan};
use lsp_types as lsp;

/// Column unit agreed with the client.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Encoding {
    Utf16,
    Utf32,
}

impl Encoding {
    pub fn negotiate(caps: &lsp::ClientCapabilities) -> Self {
        let offered = caps
            .general
            .as_ref()
            .and_then(|g| g.position_encodings.as_ref());
        match offered {
            Some(kinds) if kinds.contains(&lsp::PositionEncodingKind::UTF32) => Encoding::Utf32,
            _ => Encoding::Utf16,
        }
    }

    pub fn kind(self) -> lsp::PositionEncodingKind {
        match self {
            Encoding::Utf16 => lsp::PositionEncodingKind::UTF16,
            Encoding::Utf32 => lsp::PositionEncodingKind::UTF32,
        }
    }
}

fn line_text(text: &str, line: u32) -> &str {
    let l = text.split('\n').nth(line as usize).unwrap_or("");
    l.strip_suffix('\r').unwrap_or(l)
}

pub fn position(text: &str, pos: SourcePos, encoding: Encoding) -> lsp::Position {
    let character = match encoding {
        Encoding::Utf32 => pos.column,
        Encoding::Utf16 => line_text(text, pos.line)
            .chars()
            .take(pos.column as usize)
            .map(|c| c.len_utf16() as u32)
            .sum(),
    };
    lsp::Position::new(pos.line, character)
}

pub fn range(text: &str, span: SourceSpan, encoding: Encoding) -> lsp::Range {
    lsp::Range::new(
        position(text, span.start, encoding),
        position(text, span.end, encoding),
    )
}

/// Range covering the whole document.
pub fn full_range(text: &str, encoding: Encoding) -> lsp::Range {
    let last = text.split('\n').count() as u32 - 1;
    let tail = text.rsplit('\n').next().unwrap_or("");
    let character = match encoding {
        Encoding::Utf16 => tail.encode_utf16().count(),
        Encoding::Utf32 => tail.chars().count(),
    };
    lsp::Range::new(
        lsp::Position::new(0, 0),
        lsp::Position::new(last, character as u32),
    )
}

pub fn diagnostic(text: &str, d: &Diagnostic, encoding: Encoding) -> lsp::Diagnostic {
    lsp::Diagnostic {
        range: range(text, d.span, encoding),
        severity: Some(match d.severity {
            Severity::Error => lsp::DiagnosticSeverity::ERROR,
            Severity::Warning => lsp::DiagnosticSeverity::WARNING,
        }),
        code: Some(lsp::NumberOrString::String(d.code.as_str().to_string())),
        source: Some("ezasp".to_string()),
        message: d.message.clone(),
        ..Default::default()
    }
}
