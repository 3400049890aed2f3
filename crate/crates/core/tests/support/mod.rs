//! Program generators and property checkers shared by the integration and
//! acceptance tests.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::Path;

use ezasp_core::methodology::{check_ordering, check_stratification, Category, PredicateIndex};
use ezasp_core::reorder::{group_by_category, partition_blocks, reorder_program, DependencyGraph};
use ezasp_core::{parse_program, Code, Program};
use itertools::Itertools;
use proptest::prelude::*;

const PREDS: [&str; 6] = ["a", "b", "c", "d", "e", "f"];

fn pred() -> impl Strategy<Value = &'static str> {
    prop::sample::select(&PREDS[..])
}

fn construct() -> impl Strategy<Value = String> {
    prop_oneof![
        (0..4u8, 0..9u8).prop_map(|(k, v)| format!("#const n{k} = {v}.")),
        pred().prop_map(|p| format!("{p}.")),
        pred().prop_map(|p| format!("{{ {p} }}.")),
        (pred(), pred(), pred()).prop_map(|(p, q, r)| format!("{{ {p} ; {q} }} :- {r}.")),
        (pred(), pred()).prop_map(|(p, q)| format!("1 {{ {p} : {q} }} 1.")),
        (pred(), pred()).prop_map(|(p, q)| format!("{p} :- {q}.")),
        (pred(), pred(), pred()).prop_map(|(p, q, r)| format!("{p} :- {q}, not {r}.")),
        (pred(), pred()).prop_map(|(p, q)| format!(":- {p}, not {q}.")),
        pred().prop_map(|p| format!("#minimize {{ 1 : {p} }}.")),
        pred().prop_map(|p| format!(":~ {p}. [1@1]")),
        pred().prop_map(|p| format!("#show {p}/0.")),
    ]
}

fn leading_comment() -> impl Strategy<Value = String> {
    prop_oneof![
        3 => Just(String::new()),
        1 => (0..100u8).prop_map(|k| format!("% note {k}\n")),
        1 => (0..100u8).prop_map(|k| format!("%* block {k} *%\n")),
        1 => (0..100u8).prop_map(|k| format!("%* multi {k}\n   line *% ")),
        1 => (0..100u8).prop_map(|k| format!("% island {k}\n\n")),
    ]
}

fn trailing_comment() -> impl Strategy<Value = Option<String>> {
    prop_oneof![
        3 => Just(None),
        1 => (0..100u8).prop_map(|k| Some(format!(" % trailing {k}"))),
        1 => (0..100u8).prop_map(|k| Some(format!(" %* inline {k} *%"))),
    ]
}

fn separator() -> impl Strategy<Value = &'static str> {
    prop::sample::select(&[" ", "\n", "\n\n", "\n  \n\n", "\t"][..])
}

/// Syntactically valid programs of up to `max` constructs over six
/// propositional predicates, with comments scattered around.
pub fn program(max: usize) -> impl Strategy<Value = String> {
    let item = (
        leading_comment(),
        construct(),
        trailing_comment(),
        separator(),
    );
    let trailer = prop_oneof![3 => Just(String::new()), 1 => Just("% the end\n".to_string())];
    (prop::collection::vec(item, 0..=max), trailer).prop_map(|(items, trailer)| {
        let mut src = String::new();
        for (lead, c, trail, sep) in items {
            src.push_str(&lead);
            src.push_str(&c);
            match trail {
                Some(t) if t.contains("%*") => {
                    src.push_str(&t);
                    src.push_str(sep);
                }
                Some(t) => {
                    src.push_str(&t);
                    src.push('\n');
                }
                None => src.push_str(sep),
            }
        }
        if !trailer.is_empty() {
            src.push('\n');
            src.push_str(&trailer);
        }
        src
    })
}

/// A `base.` fact followed by up to six definitions whose dependencies are
/// acyclic: a rule for `rK` only uses `rJ` with `J < K`.
pub fn acyclic_section() -> impl Strategy<Value = (String, Vec<String>)> {
    let rule =
        (0..6usize, prop::collection::btree_set(0..6usize, 0..3)).prop_map(|(head, body)| {
            let mut lits: Vec<String> = body
                .into_iter()
                .filter(|&j| j < head)
                .map(|j| format!("r{j}"))
                .collect();
            if lits.is_empty() {
                lits.push("base".into());
            }
            format!("r{head} :- {}.", lits.join(", "))
        });
    prop::collection::vec(rule, 1..=6).prop_map(|rules| (section_program(&rules), rules))
}

pub fn section_program(rules: &[String]) -> String {
    let mut src = String::from("base.\n");
    src.push_str(&rules.join("\n"));
    src
}

pub fn parse_ok(src: &str) -> Result<Program, String> {
    let p = parse_program(src, "gen.lp");
    if p.has_syntax_errors() {
        return Err(format!(
            "generated program does not parse: {:?}\n{src}",
            p.syntax_errors
        ));
    }
    Ok(p)
}

pub fn strat_warnings(src: &str) -> usize {
    let p = parse_program(src, "gen.lp");
    let index = PredicateIndex::build(&p);
    check_stratification(&p, &index, &BTreeSet::new())
        .iter()
        .filter(|d| d.code == Code::Strat)
        .count()
}

fn sorted_texts(p: &Program) -> (Vec<String>, Option<String>) {
    let part = partition_blocks(p).expect("valid program");
    let mut texts: Vec<String> = part.blocks.into_iter().map(|b| b.text).collect();
    texts.sort();
    (texts, part.trailer)
}

fn comment_texts(p: &Program) -> Vec<String> {
    let mut all: Vec<String> = p.comments.iter().map(|c| c.text.clone()).collect();
    all.sort();
    all
}

/// (a) block texts preserved as a multiset.
pub fn check_content(src: &str) -> Result<(), String> {
    let before = parse_ok(src)?;
    let out = reorder_program(&before).map_err(|e| e.to_string())?.text;
    let after = parse_ok(&out)?;
    if sorted_texts(&before) != sorted_texts(&after) {
        return Err(format!(
            "block texts changed\n--- input\n{src}\n--- output\n{out}"
        ));
    }
    if comment_texts(&before) != comment_texts(&after) {
        return Err(format!(
            "comments changed\n--- input\n{src}\n--- output\n{out}"
        ));
    }
    Ok(())
}

/// (b) no ordering warnings after reorder.
pub fn check_conformance(src: &str) -> Result<(), String> {
    let out = reorder_program(&parse_ok(src)?)
        .map_err(|e| e.to_string())?
        .text;
    let after = parse_ok(&out)?;
    let warnings = check_ordering(&after);
    if !warnings.is_empty() {
        return Err(format!("{} W-ORDER after reorder\n{out}", warnings.len()));
    }
    Ok(())
}

/// (c) reorder is idempotent.
pub fn check_idempotent(src: &str) -> Result<(), String> {
    let once = reorder_program(&parse_ok(src)?)
        .map_err(|e| e.to_string())?
        .text;
    let twice = reorder_program(&parse_ok(&once)?)
        .map_err(|e| e.to_string())?
        .text;
    if once != twice {
        return Err(format!(
            "not idempotent\n--- once\n{once}\n--- twice\n{twice}"
        ));
    }
    Ok(())
}

/// (d) inside each critical section of the output, no block precedes a
/// block it depends on unless the two share a dependency cycle.
pub fn check_topological(src: &str) -> Result<(), String> {
    let out = reorder_program(&parse_ok(src)?)
        .map_err(|e| e.to_string())?
        .text;
    let after = parse_ok(&out)?;
    let groups = group_by_category(partition_blocks(&after).unwrap().blocks);
    for (ordinal, section) in groups.iter().enumerate() {
        if !Category::ALL[ordinal].is_critical() {
            continue;
        }
        let graph = DependencyGraph::build(section);
        let (_, comp_of) = graph.components();
        for (user, targets) in graph.edges.iter().enumerate() {
            for &definer in targets {
                if definer > user && comp_of[definer] != comp_of[user] {
                    return Err(format!(
                        "`{}` precedes its dependency `{}`\n{out}",
                        section[user].text, section[definer].text
                    ));
                }
            }
        }
    }
    Ok(())
}

/// The fewest W-STRAT warnings any ordering of `rules` can achieve, the
/// number the reorderer achieves, and whether the section is acyclic.
pub fn minimality(rules: &[String]) -> (usize, usize, bool) {
    let src = section_program(rules);
    let program = parse_program(&src, "gen.lp");
    let groups = group_by_category(partition_blocks(&program).unwrap().blocks);
    let (comps, _) = DependencyGraph::build(&groups[Category::Definition.ordinal()]).components();
    let acyclic = comps.iter().all(|c| c.len() == 1);

    let emitted = strat_warnings(&reorder_program(&program).unwrap().text);
    let best = rules
        .iter()
        .permutations(rules.len())
        .map(|perm| {
            let perm: Vec<String> = perm.into_iter().cloned().collect();
            strat_warnings(&section_program(&perm))
        })
        .min()
        .unwrap_or(0);
    (best, emitted, acyclic)
}

pub struct OracleCase {
    pub unsafe_expected: bool,
    pub names: BTreeSet<String>,
    pub program: String,
}

/// Reads a fixture written by the clingo oracle script.
pub fn load_oracle(path: &Path) -> Vec<OracleCase> {
    let text = std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    text.lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|line| {
            let mut cols = line.splitn(3, '\t');
            let verdict = cols.next().unwrap();
            let names = cols.next().unwrap();
            let program = cols.next().expect("three columns").to_string();
            OracleCase {
                unsafe_expected: verdict == "unsafe",
                names: names
                    .split(',')
                    .filter(|n| !n.is_empty())
                    .map(String::from)
                    .collect(),
                program,
            }
        })
        .collect()
}

/// The checker's verdict on a one-construct program: the names of its
/// unsafe variables, anonymous ones reported as `_`.
pub fn checker_verdict(program: &str) -> Result<BTreeSet<String>, String> {
    let p = parse_ok(program)?;
    if p.constructs.len() != 1 {
        return Err(format!("expected one construct in {program}"));
    }
    Ok(ezasp_core::safety::analyze_safety(&p.constructs[0]).unsafe_names())
}
