//! Lexer and recursive-descent parser for `.ec` rule files.

use std::collections::HashMap;

use super::ast::*;
use super::{ParseError, ParseErrorKind};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Var(String),
    Int(i64),
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Comma,
    Dot,
    Slash,
    Star,
    Assign,
    Arrow,
    Cmp(CmpOp),
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) | Tok::Var(s) => format!("`{s}`"),
            Tok::Int(i) => format!("`{i}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Star => "`*`".into(),
            Tok::Assign => "`=`".into(),
            Tok::Arrow => "`<-`".into(),
            Tok::Cmp(op) => format!("`{}`", op.symbol()),
            Tok::Eof => "end of input".into(),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    macro_rules! bump {
        () => {{
            if chars[i] == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            i += 1;
        }};
    }
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        if c.is_whitespace() {
            bump!();
            continue;
        }
        if c == '%' {
            while i < chars.len() && chars[i] != '\n' {
                bump!();
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let begin = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                bump!();
            }
            let word: String = chars[begin..i].iter().collect();
            let tok = if c.is_ascii_uppercase() || c == '_' { Tok::Var(word) } else { Tok::Ident(word) };
            out.push((tok, pos));
            continue;
        }
        if c.is_ascii_digit() || (c == '-' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            let begin = i;
            bump!();
            while i < chars.len() && chars[i].is_ascii_digit() {
                bump!();
            }
            let text: String = chars[begin..i].iter().collect();
            let n = text
                .parse::<i64>()
                .map_err(|_| ParseError::new(pos, ParseErrorKind::Syntax(format!("integer `{text}` out of range"))))?;
            out.push((Tok::Int(n), pos));
            continue;
        }
        let next = chars.get(i + 1).copied();
        let (tok, width) = match (c, next) {
            ('<', Some('-')) => (Tok::Arrow, 2),
            ('<', Some('=')) => (Tok::Cmp(CmpOp::Le), 2),
            ('>', Some('=')) => (Tok::Cmp(CmpOp::Ge), 2),
            ('=', Some('=')) => (Tok::Cmp(CmpOp::Eq), 2),
            ('!', Some('=')) => (Tok::Cmp(CmpOp::Ne), 2),
            ('<', _) => (Tok::Cmp(CmpOp::Lt), 1),
            ('>', _) => (Tok::Cmp(CmpOp::Gt), 1),
            ('=', _) => (Tok::Assign, 1),
            ('(', _) => (Tok::LParen, 1),
            (')', _) => (Tok::RParen, 1),
            ('[', _) => (Tok::LBracket, 1),
            (']', _) => (Tok::RBracket, 1),
            ('{', _) => (Tok::LBrace, 1),
            ('}', _) => (Tok::RBrace, 1),
            (',', _) => (Tok::Comma, 1),
            ('.', _) => (Tok::Dot, 1),
            ('/', _) => (Tok::Slash, 1),
            ('*', _) => (Tok::Star, 1),
            _ => {
                return Err(ParseError::new(pos, ParseErrorKind::Syntax(format!("unexpected character `{c}`"))));
            }
        };
        for _ in 0..width {
            bump!();
        }
        out.push((tok, pos));
    }
    out.push((Tok::Eof, Pos { line, col }));
    Ok(out)
}

const RESERVED: &[&str] = &[
    "initiatedAt",
    "terminatedAt",
    "happensAt",
    "holdsAt",
    "holdsFor",
    "union_all",
    "intersect_all",
    "relative_complement_all",
    "start",
    "end",
    "iff",
    "or",
    "not",
];

#[derive(Clone, Copy, PartialEq)]
enum Usage {
    Fluent,
    Event,
}

struct Reference {
    name: String,
    arity: usize,
    usage: Usage,
    pos: Pos,
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    refs: Vec<Reference>,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.at + k).min(self.toks.len() - 1)].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn next(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn syntax<T>(&self, msg: impl Into<String>) -> PResult<T> {
        Err(ParseError::new(self.pos(), ParseErrorKind::Syntax(msg.into())))
    }

    fn expect(&mut self, want: Tok) -> PResult<Pos> {
        if *self.peek() == want {
            Ok(self.next().1)
        } else {
            self.syntax(format!("expected {}, found {}", want.describe(), self.peek().describe()))
        }
    }

    fn eat(&mut self, want: &Tok) -> bool {
        if self.peek() == want {
            self.next();
            true
        } else {
            false
        }
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == w)
    }

    fn expect_word(&mut self, w: &str) -> PResult<()> {
        if self.is_word(w) {
            self.next();
            Ok(())
        } else {
            self.syntax(format!("expected `{w}`, found {}", self.peek().describe()))
        }
    }

    fn ident(&mut self) -> PResult<(String, Pos)> {
        match self.next() {
            (Tok::Ident(s), p) => Ok((s, p)),
            (t, p) => {
                Err(ParseError::new(p, ParseErrorKind::Syntax(format!("expected a name, found {}", t.describe()))))
            }
        }
    }

    fn var(&mut self) -> PResult<String> {
        match self.next() {
            (Tok::Var(s), _) => Ok(s),
            (t, p) => {
                Err(ParseError::new(p, ParseErrorKind::Syntax(format!("expected a variable, found {}", t.describe()))))
            }
        }
    }

    fn document(&mut self, ed: &mut EventDescription) -> PResult<()> {
        while *self.peek() != Tok::Eof {
            self.clause(ed)?;
        }
        Ok(())
    }

    fn clause(&mut self, ed: &mut EventDescription) -> PResult<()> {
        let pos = self.pos();
        let word = match self.peek() {
            Tok::Ident(w) => w.clone(),
            other => return self.syntax(format!("expected a clause, found {}", other.describe())),
        };
        match word.as_str() {
            "input" | "simple" | "sd" => self.declaration(ed)?,
            "event" if matches!(self.peek_at(1), Tok::Ident(_)) => self.declaration(ed)?,
            "domain" => self.domain(ed)?,
            "initiatedAt" | "terminatedAt" | "happensAt" | "holdsFor" if *self.peek_at(1) == Tok::LParen => {
                let rule = self.rule(pos)?;
                ed.rules.push(rule);
            }
            _ => {
                let def = self.iff(pos)?;
                ed.iff_definitions.push(def);
            }
        }
        self.expect(Tok::Dot)?;
        Ok(())
    }

    fn declaration(&mut self, ed: &mut EventDescription) -> PResult<()> {
        let pos = self.pos();
        let (first, _) = self.ident()?;
        let kind = match first.as_str() {
            "input" => {
                let (what, p) = self.ident()?;
                match what.as_str() {
                    "event" => ItemKind::InputEvent,
                    "fluent" => ItemKind::InputFluent,
                    _ => {
                        return Err(ParseError::new(p, ParseErrorKind::Syntax("expected `event` or `fluent`".into())));
                    }
                }
            }
            "simple" => {
                self.expect_word("fluent")?;
                ItemKind::SimpleFluent
            }
            "sd" => {
                self.expect_word("fluent")?;
                ItemKind::SdFluent
            }
            _ => ItemKind::DerivedEvent,
        };
        let (name, name_pos) = self.ident()?;
        if RESERVED.contains(&name.as_str()) {
            return Err(ParseError::new(name_pos, ParseErrorKind::Syntax(format!("`{name}` is a reserved word"))));
        }
        self.expect(Tok::Slash)?;
        let arity = match self.next() {
            (Tok::Int(n), _) if n >= 0 => n as usize,
            (t, p) => {
                return Err(ParseError::new(
                    p,
                    ParseErrorKind::Syntax(format!("expected an arity, found {}", t.describe())),
                ));
            }
        };
        let grounding = if self.is_word("over") {
            self.next();
            let (g, _) = self.ident()?;
            match g.as_str() {
                "pairs" | "upairs" if *self.peek() == Tok::LParen => {
                    self.next();
                    let (d, _) = self.ident()?;
                    self.expect(Tok::RParen)?;
                    Some(if g == "pairs" { Grounding::Pairs(d) } else { Grounding::UnorderedPairs(d) })
                }
                _ => Some(Grounding::Domain(g)),
            }
        } else {
            None
        };
        if ed.declaration(&name).is_some() {
            return Err(ParseError::new(name_pos, ParseErrorKind::DuplicateDeclaration(name)));
        }
        ed.declarations.push(Declaration { kind, name, arity, grounding, pos });
        Ok(())
    }

    fn domain(&mut self, ed: &mut EventDescription) -> PResult<()> {
        self.expect_word("domain")?;
        let (name, p) = self.ident()?;
        self.expect(Tok::Assign)?;
        let spec = if self.eat(&Tok::Star) {
            DomainSpec::FromInput
        } else {
            self.expect(Tok::LBrace)?;
            let mut members = Vec::new();
            if !self.eat(&Tok::RBrace) {
                loop {
                    match self.next() {
                        (Tok::Ident(s), _) => members.push(s),
                        (Tok::Int(i), _) => members.push(i.to_string()),
                        (t, p) => {
                            return Err(ParseError::new(
                                p,
                                ParseErrorKind::Syntax(format!("expected a constant, found {}", t.describe())),
                            ));
                        }
                    }
                    if self.eat(&Tok::RBrace) {
                        break;
                    }
                    self.expect(Tok::Comma)?;
                }
            }
            DomainSpec::Listed(members)
        };
        if ed.domain(&name).is_some() {
            return Err(ParseError::new(p, ParseErrorKind::DuplicateDeclaration(name)));
        }
        ed.domains.push((name, spec));
        Ok(())
    }

    fn term(&mut self) -> PResult<Term> {
        match self.next() {
            (Tok::Var(v), _) => Ok(Term::Var(v)),
            (Tok::Ident(c), _) => Ok(Term::Const(c)),
            (Tok::Int(i), _) => Ok(Term::Int(i)),
            (t, p) => {
                Err(ParseError::new(p, ParseErrorKind::Syntax(format!("expected a term, found {}", t.describe()))))
            }
        }
    }

    fn atom(&mut self, usage: Usage) -> PResult<Atom> {
        let (name, pos) = self.ident()?;
        if RESERVED.contains(&name.as_str()) {
            return Err(ParseError::new(pos, ParseErrorKind::Syntax(format!("`{name}` is a reserved word"))));
        }
        let mut args = Vec::new();
        if self.eat(&Tok::LParen) {
            loop {
                args.push(self.term()?);
                if self.eat(&Tok::RParen) {
                    break;
                }
                self.expect(Tok::Comma)?;
            }
        }
        self.refs.push(Reference { name: name.clone(), arity: args.len(), usage, pos });
        Ok(Atom { name, args })
    }

    fn fluent_term(&mut self) -> PResult<FluentTerm> {
        let fluent = self.atom(Usage::Fluent)?;
        self.expect(Tok::Assign)?;
        let value = self.term()?;
        Ok(FluentTerm { fluent, value })
    }

    fn event_term(&mut self) -> PResult<EventTerm> {
        if (self.is_word("start") || self.is_word("end")) && *self.peek_at(1) == Tok::LParen {
            let (which, _) = self.ident()?;
            self.expect(Tok::LParen)?;
            let f = self.fluent_term()?;
            self.expect(Tok::RParen)?;
            return Ok(if which == "start" { EventTerm::Start(f) } else { EventTerm::End(f) });
        }
        Ok(EventTerm::Plain(self.atom(Usage::Event)?))
    }

    fn var_list(&mut self) -> PResult<Vec<String>> {
        self.expect(Tok::LBracket)?;
        let mut vars = Vec::new();
        if self.eat(&Tok::RBracket) {
            return Ok(vars);
        }
        loop {
            vars.push(self.var()?);
            if self.eat(&Tok::RBracket) {
                return Ok(vars);
            }
            self.expect(Tok::Comma)?;
        }
    }

    fn rule(&mut self, pos: Pos) -> PResult<Rule> {
        let (kw, _) = self.ident()?;
        self.expect(Tok::LParen)?;
        let head = match kw.as_str() {
            "initiatedAt" | "terminatedAt" => {
                let fluent = self.fluent_term()?;
                self.expect(Tok::Comma)?;
                let time = self.var()?;
                if kw == "initiatedAt" {
                    Head::InitiatedAt { fluent, time }
                } else {
                    Head::TerminatedAt { fluent, time }
                }
            }
            "happensAt" => {
                let event = self.atom(Usage::Event)?;
                self.expect(Tok::Comma)?;
                Head::HappensAt { event, time: self.var()? }
            }
            _ => {
                let fluent = self.fluent_term()?;
                self.expect(Tok::Comma)?;
                Head::HoldsFor { fluent, intervals: self.var()? }
            }
        };
        self.expect(Tok::RParen)?;
        self.expect(Tok::Arrow)?;
        let mut body = vec![self.literal()?];
        while self.eat(&Tok::Comma) {
            body.push(self.literal()?);
        }
        Ok(Rule { head, body, pos })
    }

    fn literal(&mut self) -> PResult<Literal> {
        let pos = self.pos();
        let is_call = *self.peek_at(1) == Tok::LParen;
        if let (Tok::Ident(w), true) = (self.peek().clone(), is_call) {
            match w.as_str() {
                "happensAt" => {
                    self.next();
                    self.next();
                    let event = self.event_term()?;
                    self.expect(Tok::Comma)?;
                    let time = self.term()?;
                    self.expect(Tok::RParen)?;
                    return Ok(Literal::HappensAt { event, time });
                }
                "holdsAt" => {
                    self.next();
                    self.next();
                    let fluent = self.fluent_term()?;
                    self.expect(Tok::Comma)?;
                    let time = self.term()?;
                    self.expect(Tok::RParen)?;
                    return Ok(Literal::HoldsAt { fluent, time });
                }
                "holdsFor" => {
                    self.next();
                    self.next();
                    let fluent = self.fluent_term()?;
                    self.expect(Tok::Comma)?;
                    let intervals = self.var()?;
                    self.expect(Tok::RParen)?;
                    return Ok(Literal::HoldsFor { fluent, intervals });
                }
                "union_all" | "intersect_all" => {
                    self.next();
                    self.next();
                    let inputs = self.var_list()?;
                    self.expect(Tok::Comma)?;
                    let output = self.var()?;
                    self.expect(Tok::RParen)?;
                    return Ok(if w == "union_all" {
                        Literal::UnionAll { inputs, output }
                    } else {
                        Literal::IntersectAll { inputs, output }
                    });
                }
                "relative_complement_all" => {
                    self.next();
                    self.next();
                    let base = self.var()?;
                    self.expect(Tok::Comma)?;
                    let subtract = self.var_list()?;
                    self.expect(Tok::Comma)?;
                    let output = self.var()?;
                    self.expect(Tok::RParen)?;
                    return Ok(Literal::RelativeComplementAll { base, subtract, output });
                }
                _ => return Err(ParseError::new(pos, ParseErrorKind::UnknownPredicate(w))),
            }
        }
        let lhs = self.term()?;
        let op = match self.next() {
            (Tok::Cmp(op), _) => op,
            _ => {
                let what = match lhs {
                    Term::Const(c) => return Err(ParseError::new(pos, ParseErrorKind::UnknownPredicate(c))),
                    _ => "expected a comparison operator",
                };
                return Err(ParseError::new(pos, ParseErrorKind::Syntax(what.into())));
            }
        };
        let rhs = self.term()?;
        Ok(Literal::Compare { lhs, op, rhs })
    }

    fn iff(&mut self, pos: Pos) -> PResult<IffDefinition> {
        let head = self.fluent_term()?;
        self.expect_word("iff")?;
        let mut groups = Vec::new();
        let mut negated = Vec::new();
        loop {
            let item_pos = self.pos();
            if self.is_word("not") {
                self.next();
                if self.is_word("not") {
                    return Err(ParseError::new(
                        item_pos,
                        ParseErrorKind::UnsupportedShorthand("nested negation".into()),
                    ));
                }
                if *self.peek() == Tok::LParen {
                    return Err(ParseError::new(
                        item_pos,
                        ParseErrorKind::UnsupportedShorthand("negation of a disjunction".into()),
                    ));
                }
                negated.push(self.fluent_term()?);
            } else if self.eat(&Tok::LParen) {
                let mut group = Vec::new();
                loop {
                    if self.is_word("not") {
                        return Err(ParseError::new(
                            self.pos(),
                            ParseErrorKind::UnsupportedShorthand("negation inside a disjunction".into()),
                        ));
                    }
                    group.push(self.fluent_term()?);
                    if self.eat(&Tok::RParen) {
                        break;
                    }
                    self.expect_word("or")?;
                }
                groups.push(group);
            } else {
                groups.push(vec![self.fluent_term()?]);
            }
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        if groups.is_empty() {
            return Err(ParseError::new(
                pos,
                ParseErrorKind::UnsupportedShorthand("an iff definition needs at least one positive conjunct".into()),
            ));
        }
        Ok(IffDefinition { head, groups, negated, pos })
    }
}

fn check_references(ed: &EventDescription, refs: &[Reference]) -> PResult<()> {
    let decls: HashMap<&str, &Declaration> = ed.declarations.iter().map(|d| (d.name.as_str(), d)).collect();
    for r in refs {
        let Some(d) = decls.get(r.name.as_str()) else {
            return Err(ParseError::new(r.pos, ParseErrorKind::Undeclared(r.name.clone())));
        };
        if d.arity != r.arity {
            return Err(ParseError::new(
                r.pos,
                ParseErrorKind::ArityMismatch { name: r.name.clone(), expected: d.arity, found: r.arity },
            ));
        }
        let ok = match r.usage {
            Usage::Fluent => d.kind.is_fluent(),
            Usage::Event => !d.kind.is_fluent(),
        };
        if !ok {
            let (declared, used) = match r.usage {
                Usage::Fluent => ("an event", "a fluent"),
                Usage::Event => ("a fluent", "an event"),
            };
            return Err(ParseError::new(r.pos, ParseErrorKind::KindMismatch { name: r.name.clone(), declared, used }));
        }
    }
    Ok(())
}

/// Parses a rule-pack document. Shorthands are kept unexpanded.
pub fn parse(text: &str) -> Result<EventDescription, ParseError> {
    let mut p = Parser { toks: lex(text)?, at: 0, refs: Vec::new() };
    let mut ed = EventDescription::default();
    p.document(&mut ed)?;
    check_references(&ed, &p.refs)?;
    Ok(ed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const HEADER: &str = "
        domain entity = *.
        input event appear/1.
        input event disappear/1.
        input fluent walking/1.
        input fluent inactive/1.
        input fluent close/2.
        simple fluent person/1 over entity.
        simple fluent leaving_object/2 over pairs(entity).
        sd fluent moving/2 over upairs(entity).
    ";

    fn with_header(body: &str) -> Result<EventDescription, ParseError> {
        parse(&format!("{HEADER}\n{body}"))
    }

    #[test]
    fn leaving_object_initiation() {
        let ed = with_header(
            "initiatedAt(leaving_object(P, Obj) = true, T) <-
                happensAt(appear(Obj), T),
                holdsAt(inactive(Obj) = true, T),
                holdsAt(close(P, Obj) = true, T),
                holdsAt(person(P) = true, T).",
        )
        .unwrap();
        assert_eq!(ed.rules.len(), 1);
        let r = &ed.rules[0];
        assert_eq!(r.kind(), RuleKind::InitiatedAt);
        assert_eq!(r.head.to_string(), "initiatedAt(leaving_object(P, Obj) = true, T)");
        assert_eq!(r.body.len(), 4);
        assert!(matches!(&r.body[0], Literal::HappensAt { event: EventTerm::Plain(a), .. } if a.name == "appear"));
    }

    #[test]
    fn intersect_all_rule() {
        let ed = with_header(
            "holdsFor(moving(P1, P2) = true, I) <-
                holdsFor(walking(P1) = true, I1),
                holdsFor(walking(P2) = true, I2),
                holdsFor(close(P1, P2) = true, I3),
                intersect_all([I1, I2, I3], I).",
        )
        .unwrap();
        let r = &ed.rules[0];
        assert_eq!(r.kind(), RuleKind::HoldsFor);
        assert_eq!(r.body.len(), 4);
        assert_eq!(
            r.body[3],
            Literal::IntersectAll { inputs: vec!["I1".into(), "I2".into(), "I3".into()], output: "I".into() }
        );
    }

    #[test]
    fn empty_document() {
        let ed = parse("").unwrap();
        assert!(ed.rules.is_empty() && ed.declarations.is_empty());
        let ed = parse("% only a comment\n").unwrap();
        assert!(ed.rules.is_empty());
    }

    #[test]
    fn start_end_and_comparisons() {
        let ed = with_header(
            "initiatedAt(person(P) = true, T) <- happensAt(start(walking(P) = true), T), T >= 10, T != 12.
             initiatedAt(person(P) = false, T) <- happensAt(end(walking(P) = true), T).",
        )
        .unwrap();
        assert!(matches!(&ed.rules[0].body[0], Literal::HappensAt { event: EventTerm::Start(_), .. }));
        assert_eq!(
            ed.rules[0].body[1],
            Literal::Compare { lhs: Term::Var("T".into()), op: CmpOp::Ge, rhs: Term::Int(10) }
        );
        assert!(matches!(&ed.rules[1].body[0], Literal::HappensAt { event: EventTerm::End(_), .. }));
    }

    #[test]
    fn iff_definition() {
        let ed =
            with_header("moving(A, B) = true iff (walking(A) = true or close(A, B) = true), not inactive(B) = true.")
                .unwrap();
        let d = &ed.iff_definitions[0];
        assert_eq!(d.groups.len(), 1);
        assert_eq!(d.groups[0].len(), 2);
        assert_eq!(d.negated.len(), 1);
    }

    #[test]
    fn domain_listing() {
        let ed = parse("domain people = {p1, p2, p3}.").unwrap();
        assert_eq!(ed.domain("people"), Some(&DomainSpec::Listed(vec!["p1".into(), "p2".into(), "p3".into()])));
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse("input event appear/1.\ninput event appear/1.").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::DuplicateDeclaration("appear".into()));
        assert_eq!(e.pos, Pos { line: 2, col: 13 });

        let e = parse("input event appear/1.\nhappensAt(x(A), T) <- happensAt(appear(A), T).").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Undeclared(ref n) if n == "x"), "{e}");

        let e = with_header("initiatedAt(person(P) = true, T) <-\n  happensAt(appear(P, P), T).").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::ArityMismatch { name: "appear".into(), expected: 1, found: 2 });
        assert_eq!(e.pos.line, 13);

        let e = with_header("initiatedAt(person(P) = true, T) <- happens(appear(P), T).").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnknownPredicate("happens".into()));

        let e = with_header("initiatedAt(person(P) = true, T) <- happensAt(walking(P), T).").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::KindMismatch { .. }), "{e}");

        let e = parse("input event start/1.").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Syntax(_)));

        let e = parse("input event appear/1").unwrap_err();
        assert!(e.to_string().contains("end of input"), "{e}");
    }

    #[test]
    fn iff_fragment_limits() {
        let e = with_header("moving(A, B) = true iff walking(A) = true, not not close(A, B) = true.").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnsupportedShorthand("nested negation".into()));
        let e =
            with_header("moving(A, B) = true iff walking(A) = true, not (close(A, B) = true or walking(B) = true).")
                .unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnsupportedShorthand("negation of a disjunction".into()));
        let e = with_header("moving(A, B) = true iff (walking(A) = true or not close(A, B) = true).").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnsupportedShorthand("negation inside a disjunction".into()));
    }

    // Random descriptions over a fixed vocabulary for the print/parse round trip.

    const VARS: &[&str] = &["P", "Q", "Obj", "T", "I1", "X_2"];
    const CONSTS: &[&str] = &["true", "false", "p1", "left_hand"];

    fn term() -> impl Strategy<Value = Term> {
        prop_oneof![
            proptest::sample::select(VARS).prop_map(|v| Term::Var(v.to_string())),
            proptest::sample::select(CONSTS).prop_map(|c| Term::Const(c.to_string())),
            (0i64..10_000).prop_map(Term::Int),
        ]
    }

    fn atom(name: &'static str, arity: usize) -> impl Strategy<Value = Atom> {
        proptest::collection::vec(term(), arity).prop_map(move |args| Atom { name: name.to_string(), args })
    }

    fn fluent() -> impl Strategy<Value = FluentTerm> {
        let atoms = prop_oneof![atom("walking", 1), atom("close", 2), atom("person", 1), atom("moving", 2)];
        (atoms, term()).prop_map(|(fluent, value)| FluentTerm { fluent, value })
    }

    fn var() -> impl Strategy<Value = String> {
        proptest::sample::select(VARS).prop_map(str::to_string)
    }

    fn literal() -> impl Strategy<Value = Literal> {
        let event = prop_oneof![
            atom("appear", 1).prop_map(EventTerm::Plain),
            fluent().prop_map(EventTerm::Start),
            fluent().prop_map(EventTerm::End),
        ];
        let op = proptest::sample::select(vec![CmpOp::Eq, CmpOp::Ne, CmpOp::Lt, CmpOp::Le, CmpOp::Gt, CmpOp::Ge]);
        prop_oneof![
            (event, term()).prop_map(|(event, time)| Literal::HappensAt { event, time }),
            (fluent(), term()).prop_map(|(fluent, time)| Literal::HoldsAt { fluent, time }),
            (fluent(), var()).prop_map(|(fluent, intervals)| Literal::HoldsFor { fluent, intervals }),
            (proptest::collection::vec(var(), 0..4), var())
                .prop_map(|(inputs, output)| Literal::UnionAll { inputs, output }),
            (proptest::collection::vec(var(), 1..4), var())
                .prop_map(|(inputs, output)| Literal::IntersectAll { inputs, output }),
            (var(), proptest::collection::vec(var(), 0..3), var())
                .prop_map(|(base, subtract, output)| Literal::RelativeComplementAll { base, subtract, output }),
            (term(), op, term()).prop_map(|(lhs, op, rhs)| Literal::Compare { lhs, op, rhs }),
        ]
    }

    fn rule() -> impl Strategy<Value = Rule> {
        let head = prop_oneof![
            (fluent(), var()).prop_map(|(fluent, time)| Head::InitiatedAt { fluent, time }),
            (fluent(), var()).prop_map(|(fluent, time)| Head::TerminatedAt { fluent, time }),
            (atom("left", 1), var()).prop_map(|(event, time)| Head::HappensAt { event, time }),
            (fluent(), var()).prop_map(|(fluent, intervals)| Head::HoldsFor { fluent, intervals }),
        ];
        (head, proptest::collection::vec(literal(), 1..6)).prop_map(|(head, body)| Rule {
            head,
            body,
            pos: Pos::default(),
        })
    }

    fn iff_def() -> impl Strategy<Value = IffDefinition> {
        (
            fluent(),
            proptest::collection::vec(proptest::collection::vec(fluent(), 1..3), 1..3),
            proptest::collection::vec(fluent(), 0..3),
        )
            .prop_map(|(head, groups, negated)| IffDefinition { head, groups, negated, pos: Pos::default() })
    }

    fn description() -> impl Strategy<Value = EventDescription> {
        (proptest::collection::vec(rule(), 0..6), proptest::collection::vec(iff_def(), 0..3)).prop_map(
            |(rules, iffs)| {
                let mut ed = parse(
                    "domain entity = *.
                 domain people = {p1, p2}.
                 input event appear/1.
                 input fluent walking/1.
                 input fluent close/2.
                 simple fluent person/1 over entity.
                 sd fluent moving/2 over upairs(people).
                 event left/1 over entity.",
                )
                .unwrap();
                ed.rules = rules;
                ed.iff_definitions = iffs;
                ed
            },
        )
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(ed in description()) {
            let text = ed.to_string();
            let back = parse(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
            prop_assert_eq!(back, ed);
        }
    }
}
