use std::collections::BTreeSet;
use std::fmt;
use std::ops::Range;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::diagnostic::Diagnostic;
use crate::span::SourceSpan;

/// Name/arity pair identifying a predicate; `p/2` and `p/3` are distinct.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PredicateKey {
    pub name: String,
    pub arity: usize,
}

impl PredicateKey {
    pub fn new(name: impl Into<String>, arity: usize) -> Self {
        Self {
            name: name.into(),
            arity,
        }
    }
}

impl fmt::Display for PredicateKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.arity)
    }
}

/// Identity of a variable within one construct. Every `_` gets its own id.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(String);

impl VarId {
    pub fn named(name: impl Into<String>) -> Self {
        VarId(name.into())
    }

    pub fn anonymous(id: u32) -> Self {
        VarId(format!("_{id}"))
    }

    pub fn is_anonymous(&self) -> bool {
        self.0.len() > 1
            && self.0.starts_with('_')
            && self.0[1..].bytes().all(|b| b.is_ascii_digit())
    }

    /// The name as written in source (`_` for anonymous variables).
    pub fn source_name(&self) -> &str {
        if self.is_anonymous() {
            "_"
        } else {
            &self.0
        }
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.source_name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    Pow,
    Interval,
}

impl ArithOp {
    pub fn symbol(self) -> &'static str {
        match self {
            ArithOp::Add => "+",
            ArithOp::Sub => "-",
            ArithOp::Mul => "*",
            ArithOp::Div => "/",
            ArithOp::Mod => "\\",
            ArithOp::Pow => "**",
            ArithOp::Interval => "..",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TermKind {
    Integer(i64),
    Symbol(String),
    String(String),
    Variable(VarId),
    /// Function term; an empty name denotes a tuple.
    Function {
        name: String,
        args: Vec<Term>,
    },
    Arithmetic {
        op: ArithOp,
        left: Box<Term>,
        right: Box<Term>,
    },
    Negative(Box<Term>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub kind: TermKind,
    pub span: SourceSpan,
}

impl Term {
    /// Visits every variable occurrence with a flag telling whether it sits
    /// under an interval bound.
    pub fn visit_variables<'a>(&'a self, f: &mut impl FnMut(&'a VarId, SourceSpan, bool)) {
        self.visit_inner(false, f);
    }

    fn visit_inner<'a>(
        &'a self,
        in_interval: bool,
        f: &mut impl FnMut(&'a VarId, SourceSpan, bool),
    ) {
        match &self.kind {
            TermKind::Variable(v) => f(v, self.span, in_interval),
            TermKind::Function { args, .. } => {
                for arg in args {
                    arg.visit_inner(in_interval, f);
                }
            }
            TermKind::Arithmetic { op, left, right } => {
                let nested = in_interval || *op == ArithOp::Interval;
                left.visit_inner(nested, f);
                right.visit_inner(nested, f);
            }
            TermKind::Negative(inner) => inner.visit_inner(in_interval, f),
            TermKind::Integer(_) | TermKind::Symbol(_) | TermKind::String(_) => {}
        }
    }

    pub fn variables(&self) -> BTreeSet<VarId> {
        let mut out = BTreeSet::new();
        self.visit_variables(&mut |v, _, _| {
            out.insert(v.clone());
        });
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Atom {
    pub predicate: PredicateKey,
    pub args: Vec<Term>,
    pub span: SourceSpan,
}

impl Atom {
    pub fn visit_variables<'a>(&'a self, f: &mut impl FnMut(&'a VarId, SourceSpan, bool)) {
        for arg in &self.args {
            arg.visit_variables(f);
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ComparisonOp {
    Eq,
    EqEq,
    Neq,
    Lt,
    Le,
    Gt,
    Ge,
}

impl ComparisonOp {
    pub fn symbol(self) -> &'static str {
        match self {
            ComparisonOp::Eq => "=",
            ComparisonOp::EqEq => "==",
            ComparisonOp::Neq => "!=",
            ComparisonOp::Lt => "<",
            ComparisonOp::Le => "<=",
            ComparisonOp::Gt => ">",
            ComparisonOp::Ge => ">=",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Comparison {
    pub left: Term,
    pub op: ComparisonOp,
    pub right: Term,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LiteralBody {
    Atom(Atom),
    Comparison(Comparison),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Literal {
    pub negated: bool,
    pub body: LiteralBody,
    pub span: SourceSpan,
}

impl Literal {
    pub fn atom(&self) -> Option<&Atom> {
        match &self.body {
            LiteralBody::Atom(atom) => Some(atom),
            LiteralBody::Comparison(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChoiceElement {
    pub head: Atom,
    pub condition: Vec<Literal>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChoiceHead {
    pub lower: Option<Term>,
    pub upper: Option<Term>,
    pub elements: Vec<ChoiceElement>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Head {
    /// `:- Body.`
    Empty,
    Atom(Atom),
    Choice(ChoiceHead),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OptimizeDirective {
    Minimize,
    Maximize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OptimizeElement {
    pub weight: Term,
    pub priority: Option<Term>,
    pub terms: Vec<Term>,
    pub condition: Vec<Literal>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConstructKind {
    ConstantDecl {
        name: String,
        value: Term,
    },
    Rule {
        head: Head,
        body: Vec<Literal>,
    },
    WeakConstraint {
        body: Vec<Literal>,
        weight: Term,
        priority: Option<Term>,
        terms: Vec<Term>,
    },
    Optimize {
        directive: OptimizeDirective,
        elements: Vec<OptimizeElement>,
    },
    Show {
        predicate: PredicateKey,
    },
}

/// A predicate mentioned by a construct, with the span of the mention.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PredicateOccurrence {
    pub key: PredicateKey,
    pub span: SourceSpan,
}

/// One top-level statement.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Construct {
    pub kind: ConstructKind,
    pub span: SourceSpan,
    /// Byte range in the source.
    pub range: Range<usize>,
    pub raw_text: String,
    /// Head atoms, including choice element heads.
    pub definitions: Vec<PredicateOccurrence>,
    /// Body literals, conditions, weak-constraint bodies and show targets.
    pub usages: Vec<PredicateOccurrence>,
}

impl Construct {
    pub fn defines(&self) -> BTreeSet<PredicateKey> {
        self.definitions.iter().map(|o| o.key.clone()).collect()
    }

    pub fn uses(&self) -> BTreeSet<PredicateKey> {
        self.usages.iter().map(|o| o.key.clone()).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Comment {
    pub span: SourceSpan,
    pub range: Range<usize>,
    pub text: String,
    /// `%* ... *%` rather than `% ...`.
    pub block: bool,
}

#[derive(Clone, Debug)]
pub struct Program {
    pub file: PathBuf,
    pub source: String,
    pub constructs: Vec<Construct>,
    /// Comments outside every construct; comments inside a construct stay in
    /// its raw text.
    pub comments: Vec<Comment>,
    pub syntax_errors: Vec<Diagnostic>,
}

impl Program {
    pub fn has_syntax_errors(&self) -> bool {
        !self.syntax_errors.is_empty()
    }
}
