//! Construct ordering and defined-before-used checks.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::PathBuf;

use crate::diagnostic::{Code, Diagnostic};
use crate::span::SourceSpan;
use crate::syntax::{classify, PredicateKey, Program};

/// The seven construct categories, in the order a program must follow.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Category {
    ConstantDecl = 0,
    Fact = 1,
    ChoiceRule = 2,
    Definition = 3,
    Constraint = 4,
    Optimization = 5,
    Show = 6,
}

impl Category {
    pub const ALL: [Category; 7] = [
        Category::ConstantDecl,
        Category::Fact,
        Category::ChoiceRule,
        Category::Definition,
        Category::Constraint,
        Category::Optimization,
        Category::Show,
    ];

    pub fn ordinal(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Category::ConstantDecl => "constant declaration",
            Category::Fact => "fact",
            Category::ChoiceRule => "choice rule",
            Category::Definition => "definition",
            Category::Constraint => "constraint",
            Category::Optimization => "optimization statement",
            Category::Show => "show statement",
        }
    }

    /// Sections whose constructs both define and use predicates.
    pub fn is_critical(self) -> bool {
        matches!(
            self,
            Category::Fact | Category::ChoiceRule | Category::Definition
        )
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Location {
    pub construct: usize,
    pub span: SourceSpan,
}

/// Where each predicate is defined and used within one file.
#[derive(Clone, Debug, Default)]
pub struct PredicateIndex {
    pub file: PathBuf,
    pub definitions: BTreeMap<PredicateKey, Vec<Location>>,
    pub usages: BTreeMap<PredicateKey, Vec<Location>>,
}

impl PredicateIndex {
    pub fn build(program: &Program) -> Self {
        let mut index = PredicateIndex {
            file: program.file.clone(),
            ..Default::default()
        };
        for (i, c) in program.constructs.iter().enumerate() {
            for occ in &c.definitions {
                index
                    .definitions
                    .entry(occ.key.clone())
                    .or_default()
                    .push(Location {
                        construct: i,
                        span: occ.span,
                    });
            }
            for occ in &c.usages {
                index
                    .usages
                    .entry(occ.key.clone())
                    .or_default()
                    .push(Location {
                        construct: i,
                        span: occ.span,
                    });
            }
        }
        index
    }

    pub fn earliest_definition(&self, key: &PredicateKey) -> Option<usize> {
        self.definitions.get(key)?.iter().map(|l| l.construct).min()
    }

    pub fn defined(&self) -> BTreeSet<PredicateKey> {
        self.definitions.keys().cloned().collect()
    }
}

/// Flags every construct whose category precedes the highest category seen
/// before it.
pub fn check_ordering(program: &Program) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut max: Option<Category> = None;
    for c in &program.constructs {
        let category = classify(c);
        match max {
            Some(m) if category < m => out.push(Diagnostic::new(
                Code::Order,
                c.span,
                format!(
                    "out of order: a {category} must appear before all {} constructs",
                    m.name()
                ),
                &program.file,
            )),
            _ => max = Some(category),
        }
    }
    out
}

/// Reports predicates used before their first definition (`W-STRAT`) or
/// never defined in this file (`E-UNDEFINED`). Predicates in `external`
/// come from other files of the program and count as defined beforehand.
pub fn check_stratification(
    program: &Program,
    index: &PredicateIndex,
    external: &BTreeSet<PredicateKey>,
) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for (key, usages) in &index.usages {
        if external.contains(key) {
            continue;
        }
        match index.earliest_definition(key) {
            None => {
                let hint = similar_arities(index, external, key);
                for usage in usages {
                    out.push(Diagnostic::new(
                        Code::Undefined,
                        usage.span,
                        format!("predicate {key} is used but never defined{hint}"),
                        &program.file,
                    ));
                }
            }
            Some(first) => {
                for usage in usages.iter().filter(|u| u.construct < first) {
                    out.push(Diagnostic::new(
                        Code::Strat,
                        usage.span,
                        format!("predicate {key} is used before it is defined"),
                        &program.file,
                    ));
                }
            }
        }
    }
    out.sort_by_key(|d| (d.span.start, d.span.end));
    out
}

fn similar_arities(
    index: &PredicateIndex,
    external: &BTreeSet<PredicateKey>,
    key: &PredicateKey,
) -> String {
    let others: Vec<String> = index
        .definitions
        .keys()
        .chain(external)
        .filter(|k| k.name == key.name && k.arity != key.arity)
        .map(|k| k.to_string())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    if others.is_empty() {
        String::new()
    } else {
        format!(" (defined with a different arity: {})", others.join(", "))
    }
}
