//! Placement of the fixed-width underline for syntax errors.
//!
//! The underline is [`UNDERLINE_WIDTH`] characters wide, centred on the
//! offending symbol. Line terminators are never counted as underlined
//! characters, so a span that crosses a line break still covers exactly
//! five visible characters.
//!
//! Near the start of a line the missing leading characters are taken from
//! the end of the previous non-blank line when that line does not end with
//! a `.` (the statement is still open); otherwise the underline is extended
//! forward. Near the end of a line, a line ending in `.` pulls the underline
//! backward, while an unterminated line cascades it onto the following
//! content. A backward extension never leaves the offending line.

use crate::span::{SourcePos, SourceSpan};

pub const UNDERLINE_WIDTH: usize = 5;

struct Lines<'a> {
    /// Line text without terminator.
    text: Vec<&'a str>,
    /// Number of characters before each line, terminators excluded.
    before: Vec<usize>,
    total: usize,
}

impl<'a> Lines<'a> {
    fn new(source: &'a str) -> Self {
        let text: Vec<&str> = source
            .split('\n')
            .map(|l| l.strip_suffix('\r').unwrap_or(l))
            .collect();
        let mut before = Vec::with_capacity(text.len());
        let mut total = 0;
        for line in &text {
            before.push(total);
            total += line.chars().count();
        }
        Self {
            text,
            before,
            total,
        }
    }

    fn len(&self, line: usize) -> usize {
        self.before.get(line + 1).copied().unwrap_or(self.total) - self.before[line]
    }

    /// Position of the `i`-th visible character.
    fn pos_of(&self, i: usize) -> SourcePos {
        let line = match self.before.binary_search(&i) {
            // several empty lines can share the same offset; take the last,
            // which is the one that actually holds character `i`
            Ok(mut l) => {
                while l + 1 < self.before.len() && self.before[l + 1] == i {
                    l += 1;
                }
                l
            }
            Err(next) => next - 1,
        };
        SourcePos::new(line as u32, (i - self.before[line]) as u32)
    }

    /// Does the code part of `line` (comment stripped) end with a `.`?
    fn ends_with_terminator(&self, line: usize) -> bool {
        code_part(self.text[line]).trim_end().ends_with('.')
    }
}

/// Strips a trailing `%` comment, ignoring `%` inside string literals.
fn code_part(line: &str) -> &str {
    let mut in_string = false;
    let mut escaped = false;
    for (i, c) in line.char_indices() {
        match c {
            _ if escaped => escaped = false,
            '\\' if in_string => escaped = true,
            '"' => in_string = !in_string,
            '%' if !in_string => return &line[..i],
            _ => {}
        }
    }
    line
}

/// Span of the underline for a syntax error whose offending symbol is at
/// `offending`.
pub fn compute_underline_span(offending: SourcePos, source: &str) -> SourceSpan {
    let lines = Lines::new(source);
    if lines.total == 0 {
        return SourceSpan::point(offending);
    }
    if lines.total <= UNDERLINE_WIDTH {
        return SourceSpan::new(lines.pos_of(0), end_after(&lines, lines.total - 1));
    }

    let line = (offending.line as usize).min(lines.text.len() - 1);
    let len = lines.len(line);
    let col = (offending.column as usize).min(len);
    let half = UNDERLINE_WIDTH / 2;
    let base = lines.before[line];

    let first = col.saturating_sub(half);
    let last = (col + UNDERLINE_WIDTH - half).min(len);
    let mut start = base + first;
    let mut end = base + last;
    let left_missing = half.saturating_sub(col);
    let right_missing = (col + UNDERLINE_WIDTH - half).saturating_sub(len);

    if left_missing > 0 {
        match previous_non_blank(&lines, line) {
            Some(prev) if !lines.ends_with_terminator(prev) => start -= left_missing.min(start),
            _ => end += left_missing,
        }
    }
    if right_missing > 0 {
        if lines.ends_with_terminator(line) {
            // backward, but never above the offending line; a line shorter
            // than the underline continues onto what follows
            let back = right_missing.min(start.saturating_sub(base));
            start -= back;
            end += right_missing - back;
        } else {
            end += right_missing;
        }
    }

    // keep the width when a file edge gets in the way
    let width = UNDERLINE_WIDTH;
    if end > lines.total {
        end = lines.total;
        start = end.saturating_sub(width);
    }
    if end - start < width {
        end = (start + width).min(lines.total);
        start = end.saturating_sub(width);
    }

    SourceSpan::new(lines.pos_of(start), end_after(&lines, end - 1))
}

fn previous_non_blank(lines: &Lines<'_>, line: usize) -> Option<usize> {
    (0..line).rev().find(|&l| !lines.text[l].trim().is_empty())
}

/// Exclusive end position just after visible character `i`.
fn end_after(lines: &Lines<'_>, i: usize) -> SourcePos {
    let pos = lines.pos_of(i);
    SourcePos::new(pos.line, pos.column + 1)
}

/// Number of visible (non line-terminator) characters covered by `span`.
pub fn underlined_width(span: SourceSpan, source: &str) -> usize {
    let lines = Lines::new(source);
    let mut count = 0;
    for line in span.start.line..=span.end.line {
        let l = line as usize;
        if l >= lines.text.len() {
            break;
        }
        let len = lines.len(l);
        let from = if line == span.start.line {
            span.start.column as usize
        } else {
            0
        };
        let to = if line == span.end.line {
            (span.end.column as usize).min(len)
        } else {
            len
        };
        count += to.saturating_sub(from);
    }
    count
}
