//! Tokenizer, parser and program model for the supported clingo fragment.

mod ast;
mod lexer;
mod parser;
mod underline;

pub use ast::*;
pub use parser::parse_program;
pub use underline::{compute_underline_span, underlined_width, UNDERLINE_WIDTH};

use crate::methodology::Category;

/// Assigns the methodology category of a construct. Pure in the construct's shape.
pub fn classify(construct: &Construct) -> Category {
    match &construct.kind {
        ConstructKind::ConstantDecl { .. } => Category::ConstantDecl,
        ConstructKind::Rule { head, body } => match head {
            Head::Choice(_) => Category::ChoiceRule,
            Head::Empty => Category::Constraint,
            Head::Atom(_) if body.is_empty() => Category::Fact,
            Head::Atom(_) => Category::Definition,
        },
        ConstructKind::WeakConstraint { .. } | ConstructKind::Optimize { .. } => {
            Category::Optimization
        }
        ConstructKind::Show { .. } => Category::Show,
    }
}
