mod support;

use std::collections::BTreeSet;

use ezasp_core::methodology::{check_ordering, check_stratification, PredicateIndex};
use ezasp_core::span::LineIndex;
use ezasp_core::syntax::{classify, compute_underline_span, underlined_width, UNDERLINE_WIDTH};
use ezasp_core::{analyze, parse_program, Code, Config, SourcePos};
use proptest::prelude::*;

fn visible_chars(src: &str) -> usize {
    src.chars().filter(|&c| c != '\n' && c != '\r').count()
}

/// Text that looks roughly like a program, so the parser's error paths get
/// exercised more often than with uniform noise.
fn noisy_source() -> impl Strategy<Value = String> {
    let piece = prop::sample::select(
        &[
            "p",
            "q(X)",
            "(",
            ")",
            "{",
            "}",
            ".",
            "..",
            ":-",
            ":~",
            ",",
            ";",
            ":",
            "not ",
            "X",
            "_",
            "1",
            "#const",
            "#show",
            "#minimize",
            "=",
            "==",
            "<",
            "+",
            "%",
            "%*",
            "*%",
            "\"s\"",
            "\n",
            " ",
            "[",
            "]",
            "@",
            "|",
        ][..],
    );
    prop::collection::vec(piece, 0..40).prop_map(|v| v.concat())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn parse_never_panics(src in "\\PC{0,80}") {
        let _ = parse_program(&src, "t.lp");
    }

    #[test]
    fn parse_never_panics_on_near_programs(src in noisy_source()) {
        let p = parse_program(&src, "t.lp");
        let index = LineIndex::new(&src);
        for c in &p.constructs {
            prop_assert_eq!(&c.raw_text, &src[c.range.clone()]);
            prop_assert_eq!(index.slice(&src, c.span), c.raw_text.as_str());
        }
    }

    #[test]
    fn syntax_underlines_are_five_characters(src in noisy_source()) {
        let p = parse_program(&src, "t.lp");
        let width = UNDERLINE_WIDTH.min(visible_chars(&src));
        for d in &p.syntax_errors {
            prop_assert_eq!(d.code, Code::Syntax);
            prop_assert_eq!(underlined_width(d.span, &src), width, "{:?} in {:?}", d.span, src);
        }
    }

    #[test]
    fn underline_width_anywhere(src in "[a-z.() \n]{0,40}", line in 0u32..6, column in 0u32..45) {
        let span = compute_underline_span(SourcePos::new(line, column), &src);
        prop_assert_eq!(underlined_width(span, &src), UNDERLINE_WIDTH.min(visible_chars(&src)));
    }

    #[test]
    fn spans_and_raw_text_agree(src in support::program(20)) {
        let p = support::parse_ok(&src).map_err(TestCaseError::fail)?;
        let index = LineIndex::new(&src);
        let mut last_end = 0;
        for c in &p.constructs {
            prop_assert!(c.range.start >= last_end);
            last_end = c.range.end;
            prop_assert_eq!(index.slice(&src, c.span), c.raw_text.as_str());
        }
        for c in &p.comments {
            prop_assert_eq!(index.slice(&src, c.span), c.text.as_str());
        }
    }

    #[test]
    fn ordering_warnings_match_category_descents(src in support::program(20)) {
        let p = support::parse_ok(&src).map_err(TestCaseError::fail)?;
        let cats: Vec<_> = p.constructs.iter().map(classify).collect();
        let mut max = None;
        let mut late = 0;
        for c in &cats {
            match max {
                Some(m) if *c < m => late += 1,
                _ => max = Some(*c),
            }
        }
        prop_assert_eq!(check_ordering(&p).len(), late);
        prop_assert_eq!(late == 0, cats.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn external_predicates_only_remove_diagnostics(
        src in support::program(12),
        externals in prop::collection::btree_set(prop::sample::select(&["a", "b", "c", "d", "e", "f"][..]), 0..4),
    ) {
        let p = support::parse_ok(&src).map_err(TestCaseError::fail)?;
        let index = PredicateIndex::build(&p);
        let external: BTreeSet<_> = externals.iter().map(|n| ezasp_core::PredicateKey::new(*n, 0)).collect();
        let without = check_stratification(&p, &index, &BTreeSet::new());
        let with = check_stratification(&p, &index, &external);
        prop_assert!(with.iter().all(|d| without.contains(d)));
        for d in &with {
            let text = LineIndex::new(&src).slice(&src, d.span).to_string();
            prop_assert!(!externals.iter().any(|n| text == *n || text == format!("#show {n}/0.")), "{}", text);
        }
    }

    #[test]
    fn toggles_remove_exactly_their_codes(src in support::program(12), which in 0usize..4) {
        let full = analyze(&src, "t.lp", &Config::default(), &BTreeSet::new()).diagnostics;
        let mut config = Config::default();
        match which {
            0 => config.syntax_checking = false,
            1 => config.unsafe_variable_checking = false,
            2 => config.ordering_checking = false,
            _ => config.stratification_checking = false,
        }
        let reduced = analyze(&src, "t.lp", &config, &BTreeSet::new()).diagnostics;
        let expected: Vec<_> = full.into_iter().filter(|d| config.reports(d.code)).collect();
        prop_assert_eq!(reduced, expected);
    }

    #[test]
    fn safety_report_is_consistent(src in "p\\(X\\) :- (q\\(X\\)|not r\\(X\\)|X = Y|Y < 3|s\\(Y\\))(, (q\\(X\\)|not r\\(Y\\)|X = Y|Y < 3|s\\(Y\\)|Z != X)){0,3}\\.") {
        let p = support::parse_ok(&src).map_err(TestCaseError::fail)?;
        let report = ezasp_core::safety::analyze_safety(&p.constructs[0]);
        prop_assert!(report.grounded.is_subset(&report.total));
        let unsafe_vars: BTreeSet<_> = report.unsafe_vars.keys().cloned().collect();
        let ungrounded: BTreeSet<_> = report.total.difference(&report.grounded).cloned().collect();
        prop_assert_eq!(unsafe_vars, ungrounded);
    }

    #[test]
    fn arity_mismatch_is_undefined(args in 1usize..4, used in 1usize..4) {
        let def: Vec<String> = (0..args).map(|i| i.to_string()).collect();
        let usage: Vec<String> = (0..used).map(|i| i.to_string()).collect();
        let src = format!("p({}). q :- p({}).", def.join(","), usage.join(","));
        let p = support::parse_ok(&src).map_err(TestCaseError::fail)?;
        let d = check_stratification(&p, &PredicateIndex::build(&p), &BTreeSet::new());
        if args == used {
            prop_assert!(d.is_empty());
        } else {
            prop_assert_eq!(d.len(), 1);
            prop_assert_eq!(d[0].code, Code::Undefined);
            let hint = format!("p/{args}");
            prop_assert!(d[0].message.contains(&hint));
        }
    }

    #[test]
    fn reorder_properties(src in support::program(20)) {
        support::check_content(&src).map_err(TestCaseError::fail)?;
        support::check_conformance(&src).map_err(TestCaseError::fail)?;
        support::check_idempotent(&src).map_err(TestCaseError::fail)?;
        support::check_topological(&src).map_err(TestCaseError::fail)?;
    }
}

#[test]
fn generated_programs_parse() {
    use proptest::strategy::ValueTree;
    use proptest::test_runner::TestRunner;
    let mut runner = TestRunner::deterministic();
    for _ in 0..200 {
        let src = support::program(20)
            .new_tree(&mut runner)
            .unwrap()
            .current();
        support::parse_ok(&src).unwrap();
    }
}
