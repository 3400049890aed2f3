//! Recursive-descent parser for the supported clingo fragment.
//!
//! One malformed statement produces one `E-SYNTAX` diagnostic; parsing then
//! resynchronises at the next `.` at nesting depth 0 (counted from the
//! offending token) or at the next statement directive.

use std::path::Path;

use super::ast::*;
use super::lexer::{lex, RawComment, Token, TokenKind};
use super::underline::compute_underline_span;
use crate::diagnostic::{Code, Diagnostic};
use crate::span::{LineIndex, SourceSpan};

/// Directives that may occur inside terms or bodies; every other directive
/// starts a statement.
const INNER_DIRECTIVES: &[&str] = &[
    "#count", "#sum", "#sum+", "#min", "#max", "#true", "#false", "#inf", "#sup",
];

#[derive(Debug)]
struct SyntaxError {
    /// Byte offset of the offending symbol.
    offset: usize,
    message: String,
    /// The statement is complete up to a missing terminator; parsing resumes
    /// at the current token without skipping.
    missing_terminator: bool,
}

type PResult<T> = Result<T, SyntaxError>;

pub fn parse_program(source: &str, file: impl AsRef<Path>) -> Program {
    let file = file.as_ref();
    let index = LineIndex::new(source);
    let lexed = lex(source);
    let mut parser = Parser {
        src: source,
        index: &index,
        tokens: &lexed.tokens,
        pos: 0,
        next_anon: 0,
    };

    let mut constructs = Vec::new();
    let mut errors = Vec::new();
    while parser.peek().kind != TokenKind::Eof {
        let start_tok = parser.pos;
        match parser.statement() {
            Ok(kind) => {
                let start = parser.tokens[start_tok].start;
                let end = parser.tokens[parser.pos - 1].end;
                let span = index.span(source, start..end);
                let (definitions, usages) = collect_predicates(&kind, span);
                constructs.push(Construct {
                    kind,
                    span,
                    range: start..end,
                    raw_text: source[start..end].to_string(),
                    definitions,
                    usages,
                });
            }
            Err(err) => {
                let pos = index.pos(source, err.offset);
                errors.push(Diagnostic::new(
                    Code::Syntax,
                    compute_underline_span(pos, source),
                    err.message,
                    file,
                ));
                if !err.missing_terminator {
                    parser.resync(start_tok);
                }
            }
        }
    }

    for comment in lexed.comments.iter().filter(|c| !c.terminated) {
        let pos = index.pos(source, comment.range.start);
        errors.push(Diagnostic::new(
            Code::Syntax,
            compute_underline_span(pos, source),
            "unterminated block comment",
            file,
        ));
    }

    let comments = top_level_comments(source, &index, &lexed.comments, &constructs);
    Program {
        file: file.to_path_buf(),
        source: source.to_string(),
        constructs,
        comments,
        syntax_errors: errors,
    }
}

fn top_level_comments(
    source: &str,
    index: &LineIndex,
    raw: &[RawComment],
    constructs: &[Construct],
) -> Vec<Comment> {
    let mut out = Vec::new();
    let mut next = 0;
    for c in raw {
        while next < constructs.len() && constructs[next].range.end <= c.range.start {
            next += 1;
        }
        let inside = constructs
            .get(next)
            .is_some_and(|k| k.range.start <= c.range.start);
        if !inside {
            out.push(Comment {
                span: index.span(source, c.range.clone()),
                range: c.range.clone(),
                text: source[c.range.clone()].to_string(),
                block: c.block,
            });
        }
    }
    out
}

fn collect_predicates(
    kind: &ConstructKind,
    span: SourceSpan,
) -> (Vec<PredicateOccurrence>, Vec<PredicateOccurrence>) {
    fn occ(atom: &Atom) -> PredicateOccurrence {
        PredicateOccurrence {
            key: atom.predicate.clone(),
            span: atom.span,
        }
    }
    fn uses_of(lits: &[Literal], out: &mut Vec<PredicateOccurrence>) {
        out.extend(lits.iter().filter_map(Literal::atom).map(occ));
    }

    let mut defs = Vec::new();
    let mut uses = Vec::new();
    match kind {
        ConstructKind::ConstantDecl { .. } => {}
        ConstructKind::Rule { head, body } => {
            match head {
                Head::Empty => {}
                Head::Atom(atom) => defs.push(occ(atom)),
                Head::Choice(choice) => {
                    for el in &choice.elements {
                        defs.push(occ(&el.head));
                        uses_of(&el.condition, &mut uses);
                    }
                }
            }
            uses_of(body, &mut uses);
        }
        ConstructKind::WeakConstraint { body, .. } => uses_of(body, &mut uses),
        ConstructKind::Optimize { elements, .. } => {
            for el in elements {
                uses_of(&el.condition, &mut uses);
            }
        }
        ConstructKind::Show { predicate } => uses.push(PredicateOccurrence {
            key: predicate.clone(),
            span,
        }),
    }
    uses.sort_by_key(|o| o.span.start);
    (defs, uses)
}

struct Parser<'a> {
    src: &'a str,
    index: &'a LineIndex,
    tokens: &'a [Token],
    pos: usize,
    next_anon: u32,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Token {
        self.tokens[self.pos]
    }

    fn at(&self, kind: TokenKind) -> bool {
        self.peek().kind == kind
    }

    fn at_keyword(&self, word: &str) -> bool {
        let t = self.peek();
        t.kind == TokenKind::Ident && t.text(self.src) == word
    }

    fn bump(&mut self) -> Token {
        let t = self.peek();
        if t.kind != TokenKind::Eof {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, kind: TokenKind) -> bool {
        if self.at(kind) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn span(&self, start: usize, end: usize) -> SourceSpan {
        self.index.span(self.src, start..end)
    }

    fn prev_end(&self) -> usize {
        if self.pos == 0 {
            0
        } else {
            self.tokens[self.pos - 1].end
        }
    }

    fn unexpected(&self, expected: &str) -> SyntaxError {
        let t = self.peek();
        let found = match t.kind {
            TokenKind::Eof | TokenKind::Unknown => t.kind.describe().to_string(),
            _ => format!("'{}'", t.text(self.src)),
        };
        SyntaxError {
            offset: t.start,
            message: format!("unexpected {found}, expected {expected}"),
            missing_terminator: false,
        }
    }

    fn error_here(&self, message: impl Into<String>) -> SyntaxError {
        SyntaxError {
            offset: self.peek().start,
            message: message.into(),
            missing_terminator: false,
        }
    }

    /// A missing terminator is reported right after the last token of the
    /// statement, not at the start of whatever follows.
    fn expect_dot(&mut self) -> PResult<()> {
        if self.eat(TokenKind::Dot) {
            return Ok(());
        }
        let message = match self.peek().kind {
            TokenKind::Semi | TokenKind::Bar => "disjunctive heads are not supported".to_string(),
            TokenKind::Eof => "missing '.' at end of statement".to_string(),
            _ if self.peek_is_statement_start() => "missing '.' at end of statement".to_string(),
            _ => return Err(self.unexpected("'.'")),
        };
        let missing_terminator = message.starts_with("missing");
        let offset = if missing_terminator {
            self.prev_end()
        } else {
            self.peek().start
        };
        Err(SyntaxError {
            offset,
            message,
            missing_terminator,
        })
    }

    fn peek_is_statement_start(&self) -> bool {
        let t = self.peek();
        match t.kind {
            TokenKind::Directive => !INNER_DIRECTIVES.contains(&t.text(self.src)),
            TokenKind::If | TokenKind::WeakIf | TokenKind::LBrace => true,
            // a line break before an identifier usually means a new rule
            TokenKind::Ident | TokenKind::Number => {
                let prev = self.prev_end();
                self.src[prev..t.start].contains('\n')
            }
            _ => false,
        }
    }

    fn expect(&mut self, kind: TokenKind) -> PResult<Token> {
        if self.at(kind) {
            Ok(self.bump())
        } else {
            Err(self.unexpected(kind.describe()))
        }
    }

    fn resync(&mut self, statement_start: usize) {
        if self.pos == statement_start && self.at(TokenKind::Directive) {
            self.bump();
        }
        let mut depth: usize = 0;
        loop {
            let t = self.peek();
            match t.kind {
                TokenKind::Eof => break,
                TokenKind::Dot if depth == 0 => {
                    self.bump();
                    break;
                }
                TokenKind::Directive if !INNER_DIRECTIVES.contains(&t.text(self.src)) => break,
                TokenKind::LParen | TokenKind::LBrace | TokenKind::LBracket => depth += 1,
                TokenKind::RParen | TokenKind::RBrace | TokenKind::RBracket => {
                    depth = depth.saturating_sub(1)
                }
                _ => {}
            }
            self.bump();
        }
        if self.pos == statement_start {
            self.bump();
        }
    }

    fn statement(&mut self) -> PResult<ConstructKind> {
        let t = self.peek();
        match t.kind {
            TokenKind::Directive => match t.text(self.src) {
                "#const" => self.constant(),
                "#show" => self.show(),
                "#minimize" | "#minimise" => self.optimize(OptimizeDirective::Minimize),
                "#maximize" | "#maximise" => self.optimize(OptimizeDirective::Maximize),
                other => Err(self.error_here(format!("unsupported directive '{other}'"))),
            },
            TokenKind::If => {
                self.bump();
                let body = self.body()?;
                self.expect_dot()?;
                Ok(ConstructKind::Rule {
                    head: Head::Empty,
                    body,
                })
            }
            TokenKind::WeakIf => self.weak_constraint(),
            _ => self.rule(),
        }
    }

    fn constant(&mut self) -> PResult<ConstructKind> {
        self.bump();
        if !self.at(TokenKind::Ident) || self.at_keyword("not") {
            return Err(self.unexpected("a lowercase constant name"));
        }
        let name = self.bump().text(self.src).to_string();
        self.expect(TokenKind::Eq)?;
        let value = self.term()?;
        self.expect_dot()?;
        Ok(ConstructKind::ConstantDecl { name, value })
    }

    fn show(&mut self) -> PResult<ConstructKind> {
        self.bump();
        if !self.at(TokenKind::Ident) {
            return Err(self.unexpected("a predicate signature 'name/arity'"));
        }
        let name = self.bump().text(self.src).to_string();
        if !self.at(TokenKind::Slash) {
            return Err(self.unexpected("'/' in predicate signature"));
        }
        self.bump();
        let arity_tok = self.expect(TokenKind::Number)?;
        let arity = arity_tok
            .text(self.src)
            .parse::<usize>()
            .map_err(|_| SyntaxError {
                offset: arity_tok.start,
                message: "arity out of range".into(),
                missing_terminator: false,
            })?;
        self.expect_dot()?;
        Ok(ConstructKind::Show {
            predicate: PredicateKey::new(name, arity),
        })
    }

    fn optimize(&mut self, directive: OptimizeDirective) -> PResult<ConstructKind> {
        self.bump();
        self.expect(TokenKind::LBrace)?;
        let mut elements = Vec::new();
        if !self.at(TokenKind::RBrace) {
            loop {
                let (weight, priority, terms) = self.weight_tuple()?;
                let condition = if self.eat(TokenKind::Colon) {
                    self.literals()?
                } else {
                    Vec::new()
                };
                elements.push(OptimizeElement {
                    weight,
                    priority,
                    terms,
                    condition,
                });
                if !self.eat(TokenKind::Semi) {
                    break;
                }
            }
        }
        self.expect(TokenKind::RBrace)?;
        self.expect_dot()?;
        Ok(ConstructKind::Optimize {
            directive,
            elements,
        })
    }

    fn weight_tuple(&mut self) -> PResult<(Term, Option<Term>, Vec<Term>)> {
        let weight = self.term()?;
        let priority = if self.eat(TokenKind::At) {
            Some(self.term()?)
        } else {
            None
        };
        let mut terms = Vec::new();
        while self.eat(TokenKind::Comma) {
            terms.push(self.term()?);
        }
        Ok((weight, priority, terms))
    }

    fn weak_constraint(&mut self) -> PResult<ConstructKind> {
        self.bump();
        let body = self.body()?;
        self.expect_dot()?;
        self.expect(TokenKind::LBracket)?;
        let (weight, priority, terms) = self.weight_tuple()?;
        self.expect(TokenKind::RBracket)?;
        Ok(ConstructKind::WeakConstraint {
            body,
            weight,
            priority,
            terms,
        })
    }

    fn rule(&mut self) -> PResult<ConstructKind> {
        let head = self.head()?;
        let body = if self.eat(TokenKind::If) {
            self.body()?
        } else {
            Vec::new()
        };
        self.expect_dot()?;
        Ok(ConstructKind::Rule { head, body })
    }

    fn head(&mut self) -> PResult<Head> {
        if self.at(TokenKind::LBrace) {
            return Ok(Head::Choice(self.choice(None)?));
        }
        let term = self.term()?;
        if self.at(TokenKind::LBrace) {
            return Ok(Head::Choice(self.choice(Some(term))?));
        }
        if self.peek().kind.is_comparison() {
            return Err(self.error_here("comparisons are not supported in rule heads"));
        }
        let atom = self.atom_from_term(term, "an atom in the rule head")?;
        Ok(Head::Atom(atom))
    }

    fn choice(&mut self, lower: Option<Term>) -> PResult<ChoiceHead> {
        self.expect(TokenKind::LBrace)?;
        let mut elements = Vec::new();
        if !self.at(TokenKind::RBrace) {
            loop {
                let term = self.term()?;
                let head = self.atom_from_term(term, "an atom in the choice")?;
                let condition = if self.eat(TokenKind::Colon) {
                    self.literals()?
                } else {
                    Vec::new()
                };
                elements.push(ChoiceElement { head, condition });
                if !self.eat(TokenKind::Semi) {
                    break;
                }
            }
        }
        self.expect(TokenKind::RBrace)?;
        let upper = if self.starts_term() {
            Some(self.term()?)
        } else {
            None
        };
        Ok(ChoiceHead {
            lower,
            upper,
            elements,
        })
    }

    fn starts_term(&self) -> bool {
        let t = self.peek();
        match t.kind {
            TokenKind::Number
            | TokenKind::String
            | TokenKind::Variable
            | TokenKind::Anonymous
            | TokenKind::LParen
            | TokenKind::Minus => true,
            TokenKind::Ident => t.text(self.src) != "not",
            TokenKind::Directive => matches!(t.text(self.src), "#inf" | "#sup"),
            _ => false,
        }
    }

    fn body(&mut self) -> PResult<Vec<Literal>> {
        let mut lits = vec![self.literal()?];
        while self.eat(TokenKind::Comma) || self.eat(TokenKind::Semi) {
            lits.push(self.literal()?);
        }
        Ok(lits)
    }

    /// Comma-separated literals of a condition.
    fn literals(&mut self) -> PResult<Vec<Literal>> {
        let mut lits = vec![self.literal()?];
        while self.eat(TokenKind::Comma) {
            lits.push(self.literal()?);
        }
        Ok(lits)
    }

    fn literal(&mut self) -> PResult<Literal> {
        let start = self.peek().start;
        let negated = if self.at_keyword("not") {
            self.bump();
            if self.at_keyword("not") {
                return Err(self.error_here("double negation is not supported"));
            }
            true
        } else {
            false
        };
        if self.at(TokenKind::Directive) {
            let text = self.peek().text(self.src);
            return Err(self.error_here(format!("'{text}' is not supported in this position")));
        }
        if !self.starts_term() {
            return Err(self.unexpected("a literal"));
        }
        let left = self.term()?;
        if let Some(op) = self.comparison_op() {
            self.bump();
            if !self.starts_term() {
                return Err(self.unexpected(&format!("a term after '{}'", op.symbol())));
            }
            let right = self.term()?;
            return Ok(Literal {
                negated,
                body: LiteralBody::Comparison(Comparison { left, op, right }),
                span: self.span(start, self.prev_end()),
            });
        }
        if self.at(TokenKind::LBrace) {
            return Err(self.error_here("aggregates in rule bodies are not supported"));
        }
        let atom = self.atom_from_term(left, "an atom or comparison")?;
        Ok(Literal {
            negated,
            body: LiteralBody::Atom(atom),
            span: self.span(start, self.prev_end()),
        })
    }

    fn comparison_op(&self) -> Option<ComparisonOp> {
        Some(match self.peek().kind {
            TokenKind::Eq => ComparisonOp::Eq,
            TokenKind::EqEq => ComparisonOp::EqEq,
            TokenKind::Neq => ComparisonOp::Neq,
            TokenKind::Lt => ComparisonOp::Lt,
            TokenKind::Le => ComparisonOp::Le,
            TokenKind::Gt => ComparisonOp::Gt,
            TokenKind::Ge => ComparisonOp::Ge,
            _ => return None,
        })
    }

    fn atom_from_term(&self, term: Term, expected: &str) -> PResult<Atom> {
        let offset = self.index.offset(self.src, term.span.start);
        match term.kind {
            TermKind::Symbol(name) => Ok(Atom {
                predicate: PredicateKey::new(name, 0),
                args: Vec::new(),
                span: term.span,
            }),
            TermKind::Function { name, args } if !name.is_empty() => Ok(Atom {
                predicate: PredicateKey::new(name, args.len()),
                args,
                span: term.span,
            }),
            _ => Err(SyntaxError {
                offset,
                message: format!("expected {expected}"),
                missing_terminator: false,
            }),
        }
    }

    fn term(&mut self) -> PResult<Term> {
        let left = self.additive()?;
        if self.eat(TokenKind::DotDot) {
            let right = self.additive()?;
            return Ok(self.binary(ArithOp::Interval, left, right));
        }
        Ok(left)
    }

    fn binary(&self, op: ArithOp, left: Term, right: Term) -> Term {
        Term {
            span: left.span.cover(&right.span),
            kind: TermKind::Arithmetic {
                op,
                left: Box::new(left),
                right: Box::new(right),
            },
        }
    }

    fn additive(&mut self) -> PResult<Term> {
        let mut left = self.multiplicative()?;
        loop {
            let op = match self.peek().kind {
                TokenKind::Plus => ArithOp::Add,
                TokenKind::Minus => ArithOp::Sub,
                _ => return Ok(left),
            };
            self.bump();
            let right = self.multiplicative()?;
            left = self.binary(op, left, right);
        }
    }

    fn multiplicative(&mut self) -> PResult<Term> {
        let mut left = self.power()?;
        loop {
            let op = match self.peek().kind {
                TokenKind::Star => ArithOp::Mul,
                TokenKind::Slash => ArithOp::Div,
                TokenKind::Backslash => ArithOp::Mod,
                _ => return Ok(left),
            };
            self.bump();
            let right = self.power()?;
            left = self.binary(op, left, right);
        }
    }

    fn power(&mut self) -> PResult<Term> {
        let base = self.unary()?;
        if self.eat(TokenKind::Pow) {
            let exp = self.power()?;
            return Ok(self.binary(ArithOp::Pow, base, exp));
        }
        Ok(base)
    }

    fn unary(&mut self) -> PResult<Term> {
        if self.at(TokenKind::Minus) {
            let start = self.bump().start;
            let inner = self.unary()?;
            return Ok(Term {
                span: self.span(start, self.prev_end()),
                kind: TermKind::Negative(Box::new(inner)),
            });
        }
        self.primary()
    }

    fn primary(&mut self) -> PResult<Term> {
        let t = self.peek();
        let kind = match t.kind {
            TokenKind::Number => {
                self.bump();
                let value = t.text(self.src).parse::<i64>().map_err(|_| SyntaxError {
                    offset: t.start,
                    message: "integer literal out of range".into(),
                    missing_terminator: false,
                })?;
                TermKind::Integer(value)
            }
            TokenKind::String => {
                self.bump();
                let text = t.text(self.src);
                TermKind::String(text[1..text.len() - 1].to_string())
            }
            TokenKind::Variable => {
                self.bump();
                TermKind::Variable(VarId::named(t.text(self.src)))
            }
            TokenKind::Anonymous => {
                self.bump();
                self.next_anon += 1;
                TermKind::Variable(VarId::anonymous(self.next_anon))
            }
            TokenKind::Directive if matches!(t.text(self.src), "#inf" | "#sup") => {
                self.bump();
                TermKind::Symbol(t.text(self.src).to_string())
            }
            TokenKind::Ident if t.text(self.src) != "not" => {
                self.bump();
                let name = t.text(self.src).to_string();
                if self.eat(TokenKind::LParen) {
                    let args = self.arguments()?;
                    TermKind::Function { name, args }
                } else {
                    TermKind::Symbol(name)
                }
            }
            TokenKind::LParen => {
                self.bump();
                let first = self.term()?;
                if self.eat(TokenKind::RParen) {
                    // parenthesised term keeps its own kind but widens the span
                    return Ok(Term {
                        span: self.span(t.start, self.prev_end()),
                        kind: first.kind,
                    });
                }
                let mut args = vec![first];
                while self.eat(TokenKind::Comma) {
                    if self.at(TokenKind::RParen) {
                        break;
                    }
                    args.push(self.term()?);
                }
                self.expect(TokenKind::RParen)?;
                TermKind::Function {
                    name: String::new(),
                    args,
                }
            }
            _ => return Err(self.unexpected("a term")),
        };
        Ok(Term {
            span: self.span(t.start, self.prev_end()),
            kind,
        })
    }

    fn arguments(&mut self) -> PResult<Vec<Term>> {
        let mut args = vec![self.term()?];
        loop {
            match self.peek().kind {
                TokenKind::Comma => {
                    self.bump();
                    args.push(self.term()?);
                }
                TokenKind::RParen => {
                    self.bump();
                    return Ok(args);
                }
                TokenKind::Semi => return Err(self.error_here("argument pools are not supported")),
                _ => return Err(self.unexpected("',' or ')'")),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::span::SourcePos;

    fn parse(src: &str) -> Program {
        parse_program(src, "test.lp")
    }

    fn ok(src: &str) -> Program {
        let p = parse(src);
        assert!(p.syntax_errors.is_empty(), "{src}: {:?}", p.syntax_errors);
        p
    }

    #[test]
    fn interval_fact() {
        let p = ok("p(1..3).");
        assert_eq!(p.constructs.len(), 1);
        let c = &p.constructs[0];
        assert!(
            matches!(&c.kind, ConstructKind::Rule { head: Head::Atom(_), body } if body.is_empty())
        );
        assert_eq!(
            c.defines().into_iter().collect::<Vec<_>>(),
            vec![PredicateKey::new("p", 1)]
        );
        assert!(c.uses().is_empty());
    }

    #[test]
    fn accepts_fragment() {
        ok("#const n = 10.\n\
            node(1..n). edge(1,2).\n\
            1 { in(X) : node(X) } 3 :- start.\n\
            { color(X,C) : col(C) } 1 :- node(X).\n\
            reach(X) :- in(X), not out(X), X != 2, Y = X + 1 * 2 ** 2, q(Y).\n\
            :- edge(X,X).\n\
            :~ cost(C), C > 0. [C@1, X]\n\
            #minimize { C@2,X : cost(X,C); 1 : flag }.\n\
            #maximize { }.\n\
            t((1,a)) :- s(-X), r(\"str\"), X = 1..3, Z = X \\ 2.\n\
            #show reach/1.");
    }

    #[test]
    fn choice_with_equality_bound_is_rejected_explicitly() {
        // `= 1` after a choice is a clingo aggregate guard; not in the fragment
        let p = parse("{ a } = 1.");
        assert_eq!(p.syntax_errors.len(), 1);
    }

    #[test]
    fn raw_text_matches_span() {
        let src = "% c\np(X) :- q(X). % t\n#show p/1.";
        let p = ok(src);
        let idx = LineIndex::new(src);
        for c in &p.constructs {
            assert_eq!(idx.slice(src, c.span), c.raw_text);
            assert_eq!(&src[c.range.clone()], c.raw_text);
        }
        assert_eq!(p.comments.len(), 2);
    }

    #[test]
    fn comment_inside_construct_stays_in_raw_text() {
        let src = "p :- % why\n  q.";
        let p = ok(src);
        assert_eq!(p.constructs[0].raw_text, src);
        assert!(p.comments.is_empty());
    }

    #[test]
    fn missing_terminator_is_reported_at_statement_end() {
        let p = parse("#const a = 2\n\np(1).");
        assert_eq!(p.syntax_errors.len(), 1);
        assert_eq!(p.syntax_errors[0].span.start.line, 0);
        // the following statement is still parsed
        assert_eq!(p.constructs.len(), 1);
    }

    #[test]
    fn dangling_comparator() {
        let p = parse("a :- q(X) ==.");
        assert_eq!(p.syntax_errors.len(), 1);
        assert!(p.constructs.is_empty());
        // the offending '.' is at column 12; the underline stays within the line
        assert_eq!(p.syntax_errors[0].span.start, SourcePos::new(0, 8));
        assert_eq!(p.syntax_errors[0].span.end, SourcePos::new(0, 13));
    }

    #[test]
    fn missing_terminator_keeps_next_rule() {
        let p = parse("a :- b\nc.");
        assert_eq!(p.syntax_errors.len(), 1);
        assert_eq!(p.constructs.len(), 1);
        assert_eq!(p.constructs[0].raw_text, "c.");
    }

    #[test]
    fn missing_parenthesis_resyncs_at_its_own_dot() {
        let p = parse("p(.\nq.");
        assert_eq!(p.syntax_errors.len(), 1);
        assert_eq!(p.constructs.len(), 1);
        assert_eq!(p.constructs[0].raw_text, "q.");
    }

    #[test]
    fn variable_constant_name() {
        let p = parse("#const X = 1.\np.");
        assert_eq!(p.syntax_errors.len(), 1);
        assert_eq!(p.syntax_errors[0].span.start.line, 0);
        assert_eq!(p.constructs.len(), 1);
    }

    #[test]
    fn unsupported_constructs() {
        for src in [
            "a ; b.",
            "a | b.",
            "#external a.",
            "#program base.",
            "p :- #count { X : q(X) } > 2.",
            "p :- 2 { q(X) : r(X) }.",
            "p(1;2).",
            "-p.",
            "p :- not not q.",
            "X = 1 :- q.",
            "#show.",
            "#show p(X) : q(X).",
        ] {
            let p = parse(src);
            assert_eq!(p.syntax_errors.len(), 1, "{src}: {:?}", p.syntax_errors);
        }
    }

    #[test]
    fn one_error_per_malformed_statement() {
        let p = parse("p(. q :- . r(1,. s.");
        assert_eq!(p.syntax_errors.len(), 3);
        assert_eq!(p.constructs.len(), 1);
    }

    #[test]
    fn unknown_directive_inside_statement_does_not_double_report() {
        let p = parse("a :- #count{X:b(X)} = 1. c.");
        assert_eq!(p.syntax_errors.len(), 1);
        assert_eq!(p.constructs.len(), 1);
    }

    #[test]
    fn anonymous_variables_are_fresh() {
        let p = ok("p :- q(_, _).");
        let ConstructKind::Rule { body, .. } = &p.constructs[0].kind else {
            panic!()
        };
        let atom = body[0].atom().unwrap();
        let vars: Vec<_> = atom.args.iter().map(|t| t.variables()).collect();
        assert_ne!(vars[0], vars[1]);
    }

    #[test]
    fn definitions_and_usages() {
        let p = ok("{ a(X) : b(X) } :- c, not d. #show e/2. #minimize { 1 : f }. :~ g. [1]");
        let names = |set: std::collections::BTreeSet<PredicateKey>| {
            set.into_iter().map(|k| k.to_string()).collect::<Vec<_>>()
        };
        assert_eq!(names(p.constructs[0].defines()), ["a/1"]);
        assert_eq!(names(p.constructs[0].uses()), ["b/1", "c/0", "d/0"]);
        assert_eq!(names(p.constructs[1].uses()), ["e/2"]);
        assert_eq!(names(p.constructs[2].uses()), ["f/0"]);
        assert_eq!(names(p.constructs[3].uses()), ["g/0"]);
    }

    #[test]
    fn empty_and_comment_only_sources() {
        assert!(ok("").constructs.is_empty());
        let p = ok("% only\n%* block *%\n");
        assert_eq!(p.comments.len(), 2);
    }

    #[test]
    fn unterminated_block_comment() {
        let p = parse("a.\n%* open");
        assert_eq!(p.syntax_errors.len(), 1);
        assert_eq!(p.constructs.len(), 1);
    }
}
