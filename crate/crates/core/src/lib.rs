//! Static analysis for answer set programs written in the Easy ASP style.
//!
//! [`analysis::analyze`] runs the whole pipeline on one file;
//! [`reorder::reorder_program`] rewrites a program into methodology order.

pub mod analysis;
pub mod config;
pub mod diagnostic;
pub mod methodology;
pub mod reorder;
pub mod safety;
pub mod span;
pub mod syntax;

pub use analysis::{analyze, Analysis, Workspace};
pub use config::Config;
pub use diagnostic::{Code, Diagnostic, Severity};
pub use span::{SourcePos, SourceSpan};
pub use syntax::{parse_program, PredicateKey, Program};
