//! Unsafe-variable detection.
//!
//! Every rule keeps three structures: the variables it mentions, the
//! variables grounded by some occurrence, and pairs of variable sets linked
//! by a comparison with variables on both sides. Each choice element (and
//! each optimization element) gets its own context with the same three
//! structures. A variable is unsafe when it is not grounded after linked
//! sets have been propagated to a fixpoint.
//!
//! Grounding occurrences:
//! - a positive body atom (variables inside interval bounds excluded);
//! - a body comparison denoting equality (`=`, `==`, `not !=`) with
//!   variables on exactly one side; a head comparison denoting inequality
//!   (`!=`, `not ==`) likewise;
//! - a positive atom in a choice condition, which grounds the variable in
//!   its element and also every other occurrence of it in the rule.
//!
//! An anonymous variable inside a negated atom is projected away and never
//! reported.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use crate::diagnostic::{Code, Diagnostic};
use crate::span::SourceSpan;
use crate::syntax::{
    Atom, ComparisonOp, Construct, ConstructKind, Head, Literal, LiteralBody, Term, VarId,
};

pub type VarSet = BTreeSet<VarId>;

/// If every variable of one side is grounded, so is every variable of the other.
pub type Link = (VarSet, VarSet);

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ContextReport {
    pub variables: VarSet,
    pub grounded: VarSet,
    pub links: Vec<Link>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SafetyReport {
    pub total: VarSet,
    pub grounded: VarSet,
    pub links: Vec<Link>,
    pub contexts: Vec<ContextReport>,
    /// Unsafe variables with every occurrence span that is not grounded.
    pub unsafe_vars: BTreeMap<VarId, Vec<SourceSpan>>,
}

impl SafetyReport {
    pub fn is_safe(&self) -> bool {
        self.unsafe_vars.is_empty()
    }

    /// Source names of the unsafe variables (anonymous ones show as `_`).
    pub fn unsafe_names(&self) -> BTreeSet<String> {
        self.unsafe_vars
            .keys()
            .map(|v| v.source_name().to_string())
            .collect()
    }
}

/// Where a comparison sits; decides which comparators ground variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Position {
    Body,
    Head,
}

/// Whether a comparison in `position` can ground the variables of one side.
pub fn comparison_grounds(negated: bool, op: ComparisonOp, position: Position) -> bool {
    let equality = matches!(op, ComparisonOp::Eq | ComparisonOp::EqEq);
    let inequality = op == ComparisonOp::Neq;
    match position {
        Position::Body => (equality && !negated) || (inequality && negated),
        Position::Head => (inequality && !negated) || (equality && negated),
    }
}

/// Least fixpoint of `grounded` under the linked pairs.
pub fn propagate_links(grounded: &VarSet, links: &[Link]) -> VarSet {
    let mut result = grounded.clone();
    loop {
        let mut changed = false;
        for (a, b) in links {
            for (from, to) in [(a, b), (b, a)] {
                if from.is_subset(&result) && !to.is_subset(&result) {
                    result.extend(to.iter().cloned());
                    changed = true;
                }
            }
        }
        if !changed {
            return result;
        }
    }
}

#[derive(Default)]
struct Scope {
    variables: VarSet,
    seeds: VarSet,
    links: Vec<Link>,
    occurrences: Vec<(VarId, SourceSpan)>,
}

impl Scope {
    fn mention(&mut self, var: &VarId, span: SourceSpan) {
        self.variables.insert(var.clone());
        self.occurrences.push((var.clone(), span));
    }

    fn term(&mut self, term: &Term) {
        term.visit_variables(&mut |v, span, _| self.mention(v, span));
    }

    fn head_atom(&mut self, atom: &Atom) {
        atom.visit_variables(&mut |v, span, _| self.mention(v, span));
    }

    fn literal(&mut self, lit: &Literal, position: Position) {
        match &lit.body {
            LiteralBody::Atom(atom) => atom.visit_variables(&mut |v, span, in_interval| {
                self.mention(v, span);
                let grounds = if lit.negated {
                    v.is_anonymous()
                } else {
                    !in_interval
                };
                if grounds {
                    self.seeds.insert(v.clone());
                }
            }),
            LiteralBody::Comparison(cmp) => {
                self.term(&cmp.left);
                self.term(&cmp.right);
                if !comparison_grounds(lit.negated, cmp.op, position) {
                    return;
                }
                let left = cmp.left.variables();
                let right = cmp.right.variables();
                match (left.is_empty(), right.is_empty()) {
                    (true, false) => self.seeds.extend(right),
                    (false, true) => self.seeds.extend(left),
                    (false, false) => self.links.push((left, right)),
                    (true, true) => {}
                }
            }
        }
    }

    fn condition_variables(&self) -> VarSet {
        self.variables.clone()
    }
}

struct Context {
    scope: Scope,
    /// Variables of the condition part; these leak to the whole rule.
    condition_vars: VarSet,
    leaks: bool,
}

pub fn analyze_safety(construct: &Construct) -> SafetyReport {
    let mut global = Scope::default();
    let mut contexts: Vec<Context> = Vec::new();

    match &construct.kind {
        ConstructKind::ConstantDecl { .. } | ConstructKind::Show { .. } => {
            return SafetyReport::default()
        }
        ConstructKind::Rule { head, body } => {
            for lit in body {
                global.literal(lit, Position::Body);
            }
            match head {
                Head::Empty => {}
                Head::Atom(atom) => global.head_atom(atom),
                Head::Choice(choice) => {
                    for bound in choice.lower.iter().chain(&choice.upper) {
                        global.term(bound);
                    }
                    for element in &choice.elements {
                        let mut condition = Scope::default();
                        for lit in &element.condition {
                            condition.literal(lit, Position::Body);
                        }
                        let condition_vars = condition.condition_variables();
                        let mut scope = condition;
                        scope.head_atom(&element.head);
                        contexts.push(Context {
                            scope,
                            condition_vars,
                            leaks: true,
                        });
                    }
                }
            }
        }
        ConstructKind::WeakConstraint {
            body,
            weight,
            priority,
            terms,
        } => {
            for lit in body {
                global.literal(lit, Position::Body);
            }
            for t in std::iter::once(weight).chain(priority).chain(terms) {
                global.term(t);
            }
        }
        ConstructKind::Optimize { elements, .. } => {
            for element in elements {
                let mut scope = Scope::default();
                for lit in &element.condition {
                    scope.literal(lit, Position::Body);
                }
                for t in std::iter::once(&element.weight)
                    .chain(&element.priority)
                    .chain(&element.terms)
                {
                    scope.term(t);
                }
                contexts.push(Context {
                    scope,
                    condition_vars: VarSet::new(),
                    leaks: false,
                });
            }
        }
    }

    // Condition grounding can leak into the rule, and the rule's grounded
    // variables feed every context; iterate until neither grows.
    let mut leaked = VarSet::new();
    let (grounded, closures) = loop {
        let seeds: VarSet = global.seeds.union(&leaked).cloned().collect();
        let grounded = propagate_links(&seeds, &global.links);
        let mut next_leaked = leaked.clone();
        let closures: Vec<VarSet> = contexts
            .iter()
            .map(|ctx| {
                let seeds: VarSet = ctx.scope.seeds.union(&grounded).cloned().collect();
                let closure = propagate_links(&seeds, &ctx.scope.links);
                if ctx.leaks {
                    next_leaked.extend(closure.intersection(&ctx.condition_vars).cloned());
                }
                closure
            })
            .collect();
        if next_leaked == leaked {
            break (grounded, closures);
        }
        leaked = next_leaked;
    };

    let mut unsafe_vars: BTreeMap<VarId, Vec<SourceSpan>> = BTreeMap::new();
    for (var, span) in &global.occurrences {
        if !grounded.contains(var) {
            unsafe_vars.entry(var.clone()).or_default().push(*span);
        }
    }
    for (ctx, closure) in contexts.iter().zip(&closures) {
        for (var, span) in &ctx.scope.occurrences {
            if !closure.contains(var) {
                unsafe_vars.entry(var.clone()).or_default().push(*span);
            }
        }
    }
    for spans in unsafe_vars.values_mut() {
        spans.sort();
        spans.dedup();
    }

    let mut total = global.variables.clone();
    for ctx in &contexts {
        total.extend(ctx.scope.variables.iter().cloned());
    }
    let context_reports = contexts
        .into_iter()
        .zip(closures)
        .map(|(ctx, closure)| ContextReport {
            variables: ctx.scope.variables,
            grounded: closure,
            links: ctx.scope.links,
        })
        .collect();

    SafetyReport {
        grounded: grounded.intersection(&total).cloned().collect(),
        total,
        links: global.links,
        contexts: context_reports,
        unsafe_vars,
    }
}

/// One `E-UNSAFE` per construct naming every unsafe variable, anchored at the
/// first unsafe occurrence.
pub fn unsafe_diagnostic(report: &SafetyReport, file: &Path) -> Option<Diagnostic> {
    let mut by_first: Vec<(SourceSpan, &VarId)> = report
        .unsafe_vars
        .iter()
        .filter_map(|(v, spans)| spans.first().map(|s| (*s, v)))
        .collect();
    by_first.sort();
    let (first, _) = *by_first.first()?;
    let mut names: Vec<&str> = Vec::new();
    for (_, v) in &by_first {
        if !names.contains(&v.source_name()) {
            names.push(v.source_name());
        }
    }
    let noun = if names.len() == 1 {
        "variable"
    } else {
        "variables"
    };
    Some(Diagnostic::new(
        Code::Unsafe,
        first,
        format!("unsafe {noun}: {}", names.join(", ")),
        file,
    ))
}
