//! Reader for the Turtle subset used by vocabulary, operator and instance
//! files. N-Triples documents are accepted as well.
//!
//! Supported: `@prefix`/`PREFIX`, IRIs, prefixed names, `a`, labeled and
//! anonymous blank nodes, property lists, collections, quoted strings (all
//! four quote styles) with language tags or datatypes, and bare integers.
//! Everything else (`@base`, relative IRIs, decimals, booleans) is an error.

use std::collections::BTreeMap;

use super::{is_absolute_iri, Graph, Literal, Term, Triple};
use crate::ns;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TurtleError {
    #[error("{line}:{column}: syntax error at {token}: expected {expected}")]
    Syntax { line: usize, column: usize, token: String, expected: String },
    #[error("{line}:{column}: unknown prefix `{prefix}:`")]
    UnknownPrefix { line: usize, column: usize, prefix: String },
    #[error("{line}:{column}: relative IRI <{iri}> is not supported")]
    RelativeIri { line: usize, column: usize, iri: String },
    #[error("{line}:{column}: literal has both a datatype and a language tag")]
    DatatypeAndLanguage { line: usize, column: usize },
    #[error("{line}:{column}: unsupported construct: {what}")]
    Unsupported { line: usize, column: usize, what: String },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Iri(String),
    PName(String, String),
    Blank(String),
    Str(String),
    LangTag(String),
    Integer(String),
    Caret2,
    Dot,
    Semi,
    Comma,
    LBracket,
    RBracket,
    LParen,
    RParen,
    PrefixAt,
    PrefixSparql,
    A,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Iri(i) => format!("<{i}>"),
            Tok::PName(p, l) => format!("`{p}:{l}`"),
            Tok::Blank(b) => format!("`_:{b}`"),
            Tok::Str(_) => "string literal".into(),
            Tok::LangTag(t) => format!("`@{t}`"),
            Tok::Integer(i) => format!("`{i}`"),
            Tok::Caret2 => "`^^`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Comma => "`,`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::PrefixAt => "`@prefix`".into(),
            Tok::PrefixSparql => "`PREFIX`".into(),
            Tok::A => "`a`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
}

type Spanned = (Tok, usize, usize);

fn is_pn_chars_base(c: char) -> bool {
    c.is_alphabetic()
}

fn is_pn_chars(c: char) -> bool {
    is_pn_chars_base(c) || c.is_ascii_digit() || c == '_' || c == '-' || c == '\u{B7}'
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer { chars: text.chars().peekable(), line: 1, column: 1 }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn peek2(&self) -> Option<char> {
        let mut it = self.chars.clone();
        it.next();
        it.next()
    }

    fn err(&self, line: usize, column: usize, token: impl Into<String>, expected: &str) -> TurtleError {
        TurtleError::Syntax { line, column, token: token.into(), expected: expected.into() }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == '#' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn next_token(&mut self) -> Result<Spanned, TurtleError> {
        self.skip_ws();
        let (line, col) = (self.line, self.column);
        let Some(c) = self.peek() else { return Ok((Tok::Eof, line, col)) };
        let tok = match c {
            '<' => {
                self.bump();
                Tok::Iri(self.read_iri(line, col)?)
            }
            '"' | '\'' => Tok::Str(self.read_string(line, col)?),
            '@' => {
                self.bump();
                let mut word = String::new();
                while let Some(c) = self.peek() {
                    if c.is_ascii_alphanumeric() || c == '-' {
                        word.push(c);
                        self.bump();
                    } else {
                        break;
                    }
                }
                match word.as_str() {
                    "prefix" => Tok::PrefixAt,
                    "base" => {
                        return Err(TurtleError::Unsupported {
                            line,
                            column: col,
                            what: "@base".into(),
                        })
                    }
                    "" => return Err(self.err(line, col, "`@`", "a language tag or directive")),
                    _ => Tok::LangTag(word),
                }
            }
            '^' => {
                self.bump();
                if self.peek() != Some('^') {
                    return Err(self.err(line, col, "`^`", "`^^`"));
                }
                self.bump();
                Tok::Caret2
            }
            '.' => {
                self.bump();
                if self.peek().is_some_and(|c| c.is_ascii_digit()) {
                    return Err(TurtleError::Unsupported {
                        line,
                        column: col,
                        what: "decimal literal".into(),
                    });
                }
                Tok::Dot
            }
            ';' => {
                self.bump();
                Tok::Semi
            }
            ',' => {
                self.bump();
                Tok::Comma
            }
            '[' => {
                self.bump();
                Tok::LBracket
            }
            ']' => {
                self.bump();
                Tok::RBracket
            }
            '(' => {
                self.bump();
                Tok::LParen
            }
            ')' => {
                self.bump();
                Tok::RParen
            }
            '_' if self.peek2() == Some(':') => {
                self.bump();
                self.bump();
                let label = self.read_local();
                if label.is_empty() {
                    return Err(self.err(line, col, "`_:`", "a blank node label"));
                }
                Tok::Blank(label)
            }
            '+' | '-' | '0'..='9' => self.read_number(line, col)?,
            ':' => {
                self.bump();
                Tok::PName(String::new(), self.read_local())
            }
            c if is_pn_chars_base(c) => {
                let mut word = String::new();
                while let Some(c) = self.peek() {
                    if is_pn_chars(c) || c == '.' {
                        word.push(c);
                        self.bump();
                    } else {
                        break;
                    }
                }
                // a trailing '.' terminates the statement
                let mut trailing = 0;
                while word.ends_with('.') {
                    word.pop();
                    trailing += 1;
                }
                if trailing > 0 {
                    // Only a bare prefix label followed by ':' can legally
                    // contain dots, and then none may trail.
                    if self.peek() == Some(':') {
                        return Err(self.err(line, col, format!("`{word}.`"), "a prefix label"));
                    }
                    return self.finish_word(word, line, col, trailing);
                }
                if self.peek() == Some(':') {
                    self.bump();
                    Tok::PName(word, self.read_local())
                } else {
                    return self.finish_word(word, line, col, 0);
                }
            }
            other => return Err(self.err(line, col, format!("`{other}`"), "a term or punctuation")),
        };
        Ok((tok, line, col))
    }

    // `trailing` dots were consumed after the word; they are re-emitted as
    // statement terminators by the parser through `pending_dots`.
    fn finish_word(
        &mut self,
        word: String,
        line: usize,
        col: usize,
        trailing: usize,
    ) -> Result<Spanned, TurtleError> {
        let tok = match word.as_str() {
            "a" => Tok::A,
            "PREFIX" | "prefix" => Tok::PrefixSparql,
            "BASE" | "base" => {
                return Err(TurtleError::Unsupported { line, column: col, what: "BASE".into() })
            }
            "true" | "false" => {
                return Err(TurtleError::Unsupported {
                    line,
                    column: col,
                    what: "boolean shorthand literal".into(),
                })
            }
            _ => return Err(self.err(line, col, format!("`{word}`"), "a prefixed name or keyword")),
        };
        if trailing > 1 {
            return Err(self.err(line, col, "`..`", "a single `.`"));
        }
        if trailing == 1 {
            // Rare: keyword immediately followed by '.', e.g. "x a." is not
            // valid anyway since 'a' needs an object.
            return Err(self.err(line, col, format!("`{word}.`"), "an object after the keyword"));
        }
        Ok((tok, line, col))
    }

    fn read_local(&mut self) -> String {
        let mut local = String::new();
        while let Some(c) = self.peek() {
            if is_pn_chars(c) || c == ':' || c == '%' {
                local.push(c);
                self.bump();
            } else if c == '.' {
                // dots are allowed inside a local name but never at its end
                match self.peek2() {
                    Some(n) if is_pn_chars(n) || n == ':' || n == '%' || n == '.' => {
                        local.push(c);
                        self.bump();
                    }
                    _ => break,
                }
            } else if c == '\\' {
                self.bump();
                if let Some(e) = self.bump() {
                    local.push(e);
                }
            } else {
                break;
            }
        }
        local
    }

    fn read_iri(&mut self, line: usize, col: usize) -> Result<String, TurtleError> {
        let mut iri = String::new();
        loop {
            match self.bump() {
                None => return Err(self.err(line, col, "end of input", "`>` closing the IRI")),
                Some('>') => break,
                Some('\\') => iri.push(self.read_unicode_escape(line, col)?),
                Some(c) if c.is_whitespace() || c == '<' || c == '"' => {
                    return Err(self.err(line, col, format!("`{c}` inside IRI"), "`>`"))
                }
                Some(c) => iri.push(c),
            }
        }
        Ok(iri)
    }

    fn read_unicode_escape(&mut self, line: usize, col: usize) -> Result<char, TurtleError> {
        let n = match self.bump() {
            Some('u') => 4,
            Some('U') => 8,
            other => {
                return Err(self.err(line, col, format!("`\\{}`", other.unwrap_or(' ')), "\\u or \\U"))
            }
        };
        let mut hex = String::new();
        for _ in 0..n {
            hex.push(self.bump().unwrap_or(' '));
        }
        u32::from_str_radix(&hex, 16)
            .ok()
            .and_then(char::from_u32)
            .ok_or_else(|| self.err(line, col, format!("`{hex}`"), "a hex code point"))
    }

    fn read_string(&mut self, line: usize, col: usize) -> Result<String, TurtleError> {
        let q = self.bump().unwrap();
        let long = self.peek() == Some(q) && self.peek2() == Some(q);
        if long {
            self.bump();
            self.bump();
        }
        let mut out = String::new();
        loop {
            let Some(c) = self.bump() else {
                return Err(self.err(line, col, "end of input", "closing quote"));
            };
            if c == q {
                if !long {
                    break;
                }
                if self.peek() == Some(q) && self.peek2() == Some(q) {
                    self.bump();
                    self.bump();
                    // a long string may end with up to two extra quotes
                    while self.peek() == Some(q) {
                        out.push(q);
                        self.bump();
                    }
                    break;
                }
                out.push(c);
                continue;
            }
            match c {
                '\\' => {
                    let e = self.peek();
                    match e {
                        Some('u') | Some('U') => out.push(self.read_unicode_escape(line, col)?),
                        Some(e) => {
                            self.bump();
                            out.push(match e {
                                't' => '\t',
                                'n' => '\n',
                                'r' => '\r',
                                'b' => '\u{8}',
                                'f' => '\u{C}',
                                '"' | '\'' | '\\' => e,
                                _ => {
                                    return Err(self.err(
                                        self.line,
                                        self.column,
                                        format!("`\\{e}`"),
                                        "a string escape",
                                    ))
                                }
                            });
                        }
                        None => return Err(self.err(line, col, "end of input", "closing quote")),
                    }
                }
                '\n' | '\r' if !long => {
                    return Err(self.err(line, col, "line break in string", "closing quote"))
                }
                _ => out.push(c),
            }
        }
        Ok(out)
    }

    fn read_number(&mut self, line: usize, col: usize) -> Result<Tok, TurtleError> {
        let mut s = String::new();
        if let Some(c @ ('+' | '-')) = self.peek() {
            s.push(c);
            self.bump();
        }
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() {
                s.push(c);
                self.bump();
            } else {
                break;
            }
        }
        let digits = s.trim_start_matches(['+', '-']);
        let next = self.peek();
        let decimal = next == Some('.') && self.peek2().is_some_and(|c| c.is_ascii_digit());
        if decimal || matches!(next, Some('e' | 'E')) || (digits.is_empty() && next == Some('.')) {
            return Err(TurtleError::Unsupported {
                line,
                column: col,
                what: "decimal or double literal".into(),
            });
        }
        if digits.is_empty() {
            return Err(self.err(line, col, format!("`{s}`"), "digits"));
        }
        Ok(Tok::Integer(s))
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    cur: Spanned,
    graph: Graph,
    prefixes: BTreeMap<String, String>,
    blank_ids: BTreeMap<String, String>,
    next_blank: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Result<Self, TurtleError> {
        let mut lexer = Lexer::new(text);
        let cur = lexer.next_token()?;
        Ok(Parser {
            lexer,
            cur,
            graph: Graph::new(),
            prefixes: BTreeMap::new(),
            blank_ids: BTreeMap::new(),
            next_blank: 0,
        })
    }

    fn advance(&mut self) -> Result<Spanned, TurtleError> {
        let next = self.lexer.next_token()?;
        Ok(std::mem::replace(&mut self.cur, next))
    }

    fn unexpected(&self, expected: &str) -> TurtleError {
        TurtleError::Syntax {
            line: self.cur.1,
            column: self.cur.2,
            token: self.cur.0.describe(),
            expected: expected.into(),
        }
    }

    fn expect(&mut self, tok: Tok, expected: &str) -> Result<(), TurtleError> {
        if self.cur.0 == tok {
            self.advance()?;
            Ok(())
        } else {
            Err(self.unexpected(expected))
        }
    }

    fn fresh_blank(&mut self) -> Term {
        let label = format!("g{}", self.next_blank);
        self.next_blank += 1;
        Term::BlankNode(label)
    }

    fn labeled_blank(&mut self, label: &str) -> Term {
        if let Some(id) = self.blank_ids.get(label) {
            return Term::BlankNode(id.clone());
        }
        let t = self.fresh_blank();
        if let Term::BlankNode(id) = &t {
            self.blank_ids.insert(label.to_owned(), id.clone());
        }
        t
    }

    fn emit(&mut self, s: Term, p: Term, o: Term) {
        self.graph.insert(Triple { subject: s, predicate: p, object: o });
    }

    fn document(mut self) -> Result<Graph, TurtleError> {
        while self.cur.0 != Tok::Eof {
            self.statement()?;
        }
        for (k, v) in &self.prefixes {
            self.graph.add_prefix(k.clone(), v.clone());
        }
        Ok(self.graph)
    }

    fn statement(&mut self) -> Result<(), TurtleError> {
        match self.cur.0 {
            Tok::PrefixAt => {
                self.advance()?;
                self.prefix_decl()?;
                self.expect(Tok::Dot, "`.` after @prefix")
            }
            Tok::PrefixSparql => {
                self.advance()?;
                self.prefix_decl()
            }
            _ => {
                self.triples()?;
                self.expect(Tok::Dot, "`.` ending the statement")
            }
        }
    }

    fn prefix_decl(&mut self) -> Result<(), TurtleError> {
        let (tok, _, _) = self.advance()?;
        let Tok::PName(label, local) = tok else {
            return Err(TurtleError::Syntax {
                line: self.cur.1,
                column: self.cur.2,
                token: tok.describe(),
                expected: "a prefix label like `ex:`".into(),
            });
        };
        if !local.is_empty() {
            return Err(self.unexpected("a prefix label ending in `:`"));
        }
        let (line, col) = (self.cur.1, self.cur.2);
        let Tok::Iri(ns) = self.cur.0.clone() else {
            return Err(self.unexpected("a namespace IRI"));
        };
        if !is_absolute_iri(&ns) {
            return Err(TurtleError::RelativeIri { line, column: col, iri: ns });
        }
        self.advance()?;
        self.prefixes.insert(label, ns);
        Ok(())
    }

    fn triples(&mut self) -> Result<(), TurtleError> {
        match self.cur.0 {
            Tok::LBracket => {
                let subject = self.blank_property_list()?;
                if self.cur.0 != Tok::Dot {
                    self.predicate_object_list(&subject)?;
                }
                Ok(())
            }
            _ => {
                let subject = self.subject()?;
                self.predicate_object_list(&subject)
            }
        }
    }

    fn subject(&mut self) -> Result<Term, TurtleError> {
        match self.cur.0.clone() {
            Tok::Iri(_) | Tok::PName(..) => self.iri(),
            Tok::Blank(label) => {
                self.advance()?;
                Ok(self.labeled_blank(&label))
            }
            Tok::LParen => self.collection(),
            _ => Err(self.unexpected("a subject")),
        }
    }

    fn iri(&mut self) -> Result<Term, TurtleError> {
        let (tok, line, col) = self.cur.clone();
        let iri = match tok {
            Tok::Iri(i) => {
                if !is_absolute_iri(&i) {
                    return Err(TurtleError::RelativeIri { line, column: col, iri: i });
                }
                i
            }
            Tok::PName(prefix, local) => match self.prefixes.get(&prefix) {
                Some(ns) => format!("{ns}{local}"),
                None => return Err(TurtleError::UnknownPrefix { line, column: col, prefix }),
            },
            _ => return Err(self.unexpected("an IRI")),
        };
        self.advance()?;
        Ok(Term::Iri(iri))
    }

    fn predicate_object_list(&mut self, subject: &Term) -> Result<(), TurtleError> {
        loop {
            let predicate = match self.cur.0 {
                Tok::A => {
                    self.advance()?;
                    Term::Iri(ns::rdf::TYPE.to_owned())
                }
                Tok::Iri(_) | Tok::PName(..) => self.iri()?,
                _ => return Err(self.unexpected("a predicate")),
            };
            loop {
                let object = self.object()?;
                self.emit(subject.clone(), predicate.clone(), object);
                if self.cur.0 == Tok::Comma {
                    self.advance()?;
                } else {
                    break;
                }
            }
            if self.cur.0 != Tok::Semi {
                return Ok(());
            }
            while self.cur.0 == Tok::Semi {
                self.advance()?;
            }
            if matches!(self.cur.0, Tok::Dot | Tok::RBracket) {
                return Ok(());
            }
        }
    }

    fn object(&mut self) -> Result<Term, TurtleError> {
        match self.cur.0.clone() {
            Tok::Iri(_) | Tok::PName(..) => self.iri(),
            Tok::Blank(label) => {
                self.advance()?;
                Ok(self.labeled_blank(&label))
            }
            Tok::LBracket => self.blank_property_list(),
            Tok::LParen => self.collection(),
            Tok::Str(s) => {
                let (line, col) = (self.cur.1, self.cur.2);
                self.advance()?;
                self.literal_tail(s, line, col)
            }
            Tok::Integer(i) => {
                self.advance()?;
                Ok(Term::Literal(Literal::typed(i, ns::xsd::INTEGER)))
            }
            _ => Err(self.unexpected("an object")),
        }
    }

    fn literal_tail(&mut self, lexical: String, line: usize, col: usize) -> Result<Term, TurtleError> {
        match self.cur.0.clone() {
            Tok::LangTag(tag) => {
                self.advance()?;
                if self.cur.0 == Tok::Caret2 {
                    return Err(TurtleError::DatatypeAndLanguage { line, column: col });
                }
                Ok(Term::Literal(Literal::lang(lexical, tag)))
            }
            Tok::Caret2 => {
                self.advance()?;
                let dt = self.iri()?;
                if matches!(self.cur.0, Tok::LangTag(_)) {
                    return Err(TurtleError::DatatypeAndLanguage { line, column: col });
                }
                let Term::Iri(dt) = dt else { unreachable!() };
                Ok(Term::Literal(Literal::typed(lexical, dt)))
            }
            _ => Ok(Term::Literal(Literal::string(lexical))),
        }
    }

    fn blank_property_list(&mut self) -> Result<Term, TurtleError> {
        self.expect(Tok::LBracket, "`[`")?;
        let node = self.fresh_blank();
        if self.cur.0 != Tok::RBracket {
            self.predicate_object_list(&node)?;
        }
        self.expect(Tok::RBracket, "`]`")?;
        Ok(node)
    }

    fn collection(&mut self) -> Result<Term, TurtleError> {
        self.expect(Tok::LParen, "`(`")?;
        let mut members = Vec::new();
        while self.cur.0 != Tok::RParen {
            if self.cur.0 == Tok::Eof {
                return Err(self.unexpected("`)`"));
            }
            members.push(self.object()?);
        }
        self.advance()?;
        if members.is_empty() {
            return Ok(Term::Iri(ns::rdf::NIL.to_owned()));
        }
        let nodes: Vec<Term> = members.iter().map(|_| self.fresh_blank()).collect();
        let first = Term::Iri(ns::rdf::FIRST.to_owned());
        let rest = Term::Iri(ns::rdf::REST.to_owned());
        for (i, m) in members.into_iter().enumerate() {
            self.emit(nodes[i].clone(), first.clone(), m);
            let next = nodes.get(i + 1).cloned().unwrap_or_else(|| Term::Iri(ns::rdf::NIL.to_owned()));
            self.emit(nodes[i].clone(), rest.clone(), next);
        }
        Ok(nodes[0].clone())
    }
}

/// Parses a Turtle (subset) or N-Triples document.
pub fn parse_turtle(text: &str) -> Result<Graph, TurtleError> {
    Parser::new(text)?.document()
}
