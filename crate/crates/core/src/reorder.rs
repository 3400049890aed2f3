//! Automatic reordering of a program into category order.
//!
//! 1. Partition the source into blocks: each construct plus the comments
//!    that precede it and any comment starting on its last line.
//! 2. Group blocks by category, keeping document order inside a group.
//! 3. Inside the fact, choice-rule and definition groups, sort blocks
//!    topologically so definers come before users. Blocks on a dependency
//!    cycle keep their original relative order and raise `W-CYCLE`.
//! 4. Emit the blocks separated by one blank line.

use std::collections::BTreeSet;
use std::ops::Range;

use thiserror::Error;

use crate::diagnostic::{Code, Diagnostic};
use crate::methodology::Category;
use crate::span::SourceSpan;
use crate::syntax::{classify, PredicateKey, Program};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReorderError {
    #[error("refusing to reorder a program with {0} syntax error(s)")]
    RefusedOnSyntaxError(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    /// Index of the construct in the program.
    pub construct: usize,
    pub category: Category,
    /// Byte range of the construct widened to its comments.
    pub range: Range<usize>,
    pub span: SourceSpan,
    pub text: String,
    pub defines: BTreeSet<PredicateKey>,
    pub uses: BTreeSet<PredicateKey>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Partition {
    pub blocks: Vec<Block>,
    /// Comments after the final construct that do not start on its last line.
    /// They stay at the end of the file.
    pub trailer: Option<String>,
}

pub fn partition_blocks(program: &Program) -> Result<Partition, ReorderError> {
    if program.has_syntax_errors() {
        return Err(ReorderError::RefusedOnSyntaxError(
            program.syntax_errors.len(),
        ));
    }
    let constructs = &program.constructs;
    let mut ranges: Vec<Range<usize>> = constructs.iter().map(|c| c.range.clone()).collect();
    let mut trailer: Option<Range<usize>> = None;

    let mut next = 0;
    for comment in &program.comments {
        while next < constructs.len() && constructs[next].range.end <= comment.range.start {
            next += 1;
        }
        let prev = next.checked_sub(1);
        let trailing = prev.is_some_and(|p| constructs[p].span.end.line == comment.span.start.line);
        let owner = match (prev, trailing) {
            (Some(p), true) => Some(p),
            _ if next < constructs.len() => Some(next),
            _ => None,
        };
        match owner {
            Some(o) => {
                let r = &mut ranges[o];
                r.start = r.start.min(comment.range.start);
                r.end = r.end.max(comment.range.end);
            }
            None => {
                let r = trailer.get_or_insert(comment.range.clone());
                r.end = comment.range.end;
            }
        }
    }

    let index = crate::span::LineIndex::new(&program.source);
    let blocks = constructs
        .iter()
        .zip(ranges)
        .enumerate()
        .map(|(i, (c, range))| Block {
            construct: i,
            category: classify(c),
            span: index.span(&program.source, range.clone()),
            text: program.source[range.clone()].to_string(),
            range,
            defines: c.defines(),
            uses: c.uses(),
        })
        .collect();
    Ok(Partition {
        blocks,
        trailer: trailer.map(|r| program.source[r].to_string()),
    })
}

/// Stable partition into the seven category groups, in category order.
pub fn group_by_category(blocks: Vec<Block>) -> Vec<Vec<Block>> {
    let mut groups: Vec<Vec<Block>> = vec![Vec::new(); Category::ALL.len()];
    for block in blocks {
        groups[block.category.ordinal()].push(block);
    }
    groups
}

/// Construct-level dependencies inside one section: an edge `a -> b` means
/// block `a` uses a predicate defined by block `b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DependencyGraph {
    /// Targets of each node, ascending.
    pub edges: Vec<Vec<usize>>,
}

impl DependencyGraph {
    pub fn build(section: &[Block]) -> Self {
        let edges = section
            .iter()
            .enumerate()
            .map(|(a, user)| {
                section
                    .iter()
                    .enumerate()
                    .filter(|&(b, definer)| a != b && !user.uses.is_disjoint(&definer.defines))
                    .map(|(b, _)| b)
                    .collect()
            })
            .collect();
        Self { edges }
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Strongly connected components (Tarjan), each sorted ascending, plus
    /// the component id of every node.
    pub fn components(&self) -> (Vec<Vec<usize>>, Vec<usize>) {
        let n = self.len();
        let mut index = vec![usize::MAX; n];
        let mut low = vec![0; n];
        let mut on_stack = vec![false; n];
        let mut stack = Vec::new();
        let mut comp_of = vec![usize::MAX; n];
        let mut comps: Vec<Vec<usize>> = Vec::new();
        let mut counter = 0;

        for root in 0..n {
            if index[root] != usize::MAX {
                continue;
            }
            let mut call: Vec<(usize, usize)> = vec![(root, 0)];
            index[root] = counter;
            low[root] = counter;
            counter += 1;
            stack.push(root);
            on_stack[root] = true;

            while let Some(&mut (v, ref mut next_edge)) = call.last_mut() {
                if let Some(&w) = self.edges[v].get(*next_edge) {
                    *next_edge += 1;
                    if index[w] == usize::MAX {
                        index[w] = counter;
                        low[w] = counter;
                        counter += 1;
                        stack.push(w);
                        on_stack[w] = true;
                        call.push((w, 0));
                    } else if on_stack[w] {
                        low[v] = low[v].min(index[w]);
                    }
                    continue;
                }
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    while let Some(w) = stack.pop() {
                        on_stack[w] = false;
                        comp_of[w] = comps.len();
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    comps.push(comp);
                }
            }
        }
        (comps, comp_of)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SectionOrder {
    /// Permutation of section positions; definers precede users.
    pub order: Vec<usize>,
    /// Groups of section positions lying on a common dependency cycle.
    pub cycles: Vec<Vec<usize>>,
}

/// Depth-first topological sort of one section. Nodes are visited in
/// document order and edges explored in document order, so independent
/// blocks keep their relative order.
pub fn sort_section(section: &[Block]) -> SectionOrder {
    let graph = DependencyGraph::build(section);
    let (comps, comp_of) = graph.components();

    // component roots in order of their first member
    let mut roots: Vec<usize> = (0..comps.len()).collect();
    roots.sort_by_key(|&c| comps[c][0]);

    let comp_targets = |c: usize| -> Vec<usize> {
        let mut targets: Vec<(usize, usize)> = comps[c]
            .iter()
            .flat_map(|&m| graph.edges[m].iter().map(|&t| (t, comp_of[t])))
            .filter(|&(_, tc)| tc != c)
            .collect();
        targets.sort_unstable();
        let mut seen = BTreeSet::new();
        targets.retain(|&(_, tc)| seen.insert(tc));
        targets.into_iter().map(|(_, tc)| tc).collect()
    };

    let mut visited = vec![false; comps.len()];
    let mut order = Vec::with_capacity(section.len());
    for root in roots {
        if visited[root] {
            continue;
        }
        visited[root] = true;
        let mut call: Vec<(usize, Vec<usize>, usize)> = vec![(root, comp_targets(root), 0)];
        while let Some((c, targets, next)) = call.last_mut() {
            if let Some(&t) = targets.get(*next) {
                *next += 1;
                if !visited[t] {
                    visited[t] = true;
                    let tt = comp_targets(t);
                    call.push((t, tt, 0));
                }
                continue;
            }
            order.extend(comps[*c].iter().copied());
            call.pop();
        }
    }

    let mut cycles: Vec<Vec<usize>> = comps.into_iter().filter(|c| c.len() > 1).collect();
    cycles.sort();
    SectionOrder { order, cycles }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReorderOutcome {
    pub text: String,
    /// Construct indices in emitted order.
    pub order: Vec<usize>,
    /// `W-CYCLE` warnings, spanning the first construct of each cycle.
    pub diagnostics: Vec<Diagnostic>,
}

pub fn reorder_program(program: &Program) -> Result<ReorderOutcome, ReorderError> {
    let partition = partition_blocks(program)?;
    let mut diagnostics = Vec::new();
    let mut ordered: Vec<Block> = Vec::with_capacity(partition.blocks.len());

    for (ordinal, group) in group_by_category(partition.blocks).into_iter().enumerate() {
        if !Category::ALL[ordinal].is_critical() {
            ordered.extend(group);
            continue;
        }
        let section = sort_section(&group);
        for cycle in &section.cycles {
            diagnostics.push(cycle_diagnostic(program, &group, cycle));
        }
        let mut slots: Vec<Option<Block>> = group.into_iter().map(Some).collect();
        ordered.extend(section.order.iter().filter_map(|&i| slots[i].take()));
    }

    let mut pieces: Vec<&str> = ordered.iter().map(|b| b.text.as_str()).collect();
    if let Some(trailer) = &partition.trailer {
        pieces.push(trailer);
    }
    let mut text = pieces.join("\n\n");
    if !text.is_empty() {
        text.push('\n');
    }
    Ok(ReorderOutcome {
        text,
        order: ordered.iter().map(|b| b.construct).collect(),
        diagnostics,
    })
}

/// `W-CYCLE` warnings for the parsed constructs of `program`. Unlike
/// [`reorder_program`] this also works on programs with syntax errors.
pub fn cycle_diagnostics(program: &Program) -> Vec<Diagnostic> {
    let index = crate::span::LineIndex::new(&program.source);
    let blocks = program
        .constructs
        .iter()
        .enumerate()
        .map(|(i, c)| Block {
            construct: i,
            category: classify(c),
            range: c.range.clone(),
            span: index.span(&program.source, c.range.clone()),
            text: c.raw_text.clone(),
            defines: c.defines(),
            uses: c.uses(),
        })
        .collect();
    let mut out = Vec::new();
    for (ordinal, group) in group_by_category(blocks).into_iter().enumerate() {
        if Category::ALL[ordinal].is_critical() {
            for cycle in &sort_section(&group).cycles {
                out.push(cycle_diagnostic(program, &group, cycle));
            }
        }
    }
    out
}

fn cycle_diagnostic(program: &Program, section: &[Block], cycle: &[usize]) -> Diagnostic {
    let mut predicates = BTreeSet::new();
    for &a in cycle {
        for &b in cycle {
            if a != b {
                predicates.extend(section[a].uses.intersection(&section[b].defines).cloned());
            }
        }
    }
    let names: Vec<String> = predicates.iter().map(|k| k.to_string()).collect();
    let first = &program.constructs[section[cycle[0]].construct];
    Diagnostic::new(
        Code::Cycle,
        first.span,
        format!(
            "{} constructs depend on each other through {}; this stratification problem cannot be resolved by reordering",
            cycle.len(),
            names.join(", ")
        ),
        &program.file,
    )
}
