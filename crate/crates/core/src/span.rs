//! Source positions measured in Unicode scalar values.

use std::fmt;
use std::ops::Range;

use serde::{Deserialize, Serialize};

/// A 0-based line/column position. Columns count characters, not bytes.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub struct SourcePos {
    pub line: u32,
    pub column: u32,
}

impl SourcePos {
    pub const fn new(line: u32, column: u32) -> Self {
        Self { line, column }
    }
}

impl fmt::Display for SourcePos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line + 1, self.column + 1)
    }
}

/// Half-open range of positions; `end` is exclusive.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub struct SourceSpan {
    pub start: SourcePos,
    pub end: SourcePos,
}

impl SourceSpan {
    pub fn new(start: SourcePos, end: SourcePos) -> Self {
        debug_assert!(start <= end, "span start after end: {start:?} > {end:?}");
        Self { start, end }
    }

    pub fn point(pos: SourcePos) -> Self {
        Self {
            start: pos,
            end: pos,
        }
    }

    pub fn contains(&self, other: &SourceSpan) -> bool {
        self.start <= other.start && other.end <= self.end
    }

    /// Smallest span covering both.
    pub fn cover(&self, other: &SourceSpan) -> SourceSpan {
        SourceSpan {
            start: self.start.min(other.start),
            end: self.end.max(other.end),
        }
    }
}

/// Maps byte offsets to line/character positions and back.
#[derive(Clone, Debug)]
pub struct LineIndex {
    line_starts: Vec<usize>,
    len: usize,
}

impl LineIndex {
    pub fn new(source: &str) -> Self {
        let mut line_starts = vec![0];
        line_starts.extend(source.match_indices('\n').map(|(i, _)| i + 1));
        Self {
            line_starts,
            len: source.len(),
        }
    }

    pub fn line_count(&self) -> usize {
        self.line_starts.len()
    }

    /// Byte range of `line` without its terminator (`\n` or `\r\n`).
    pub fn line_range(&self, source: &str, line: usize) -> Range<usize> {
        let start = self.line_starts[line];
        let mut end = self
            .line_starts
            .get(line + 1)
            .map(|next| next - 1)
            .unwrap_or(self.len);
        if end > start && source.as_bytes()[end - 1] == b'\r' {
            end -= 1;
        }
        start..end
    }

    pub fn pos(&self, source: &str, offset: usize) -> SourcePos {
        let offset = offset.min(self.len);
        let line = match self.line_starts.binary_search(&offset) {
            Ok(line) => line,
            Err(next) => next - 1,
        };
        let start = self.line_starts[line];
        let column = source[start..offset].chars().count();
        SourcePos::new(line as u32, column as u32)
    }

    pub fn span(&self, source: &str, range: Range<usize>) -> SourceSpan {
        SourceSpan::new(self.pos(source, range.start), self.pos(source, range.end))
    }

    /// Byte offset of `pos`, clamped to the end of its line.
    pub fn offset(&self, source: &str, pos: SourcePos) -> usize {
        let line = (pos.line as usize).min(self.line_starts.len() - 1);
        let start = self.line_starts[line];
        let rest = &source[start..];
        let line_end = self
            .line_starts
            .get(line + 1)
            .map(|next| next - start)
            .unwrap_or(rest.len());
        rest[..line_end]
            .char_indices()
            .nth(pos.column as usize)
            .map(|(i, _)| start + i)
            .unwrap_or(start + line_end)
    }

    pub fn slice<'a>(&self, source: &'a str, span: SourceSpan) -> &'a str {
        &source[self.offset(source, span.start)..self.offset(source, span.end)]
    }
}
