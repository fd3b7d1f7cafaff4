//! Abstract syntax, parser and printer for concurrent programs.
//!
//! Concrete grammar, loosest to tightest binding:
//!
//! ```text
//! program := par
//! par     := choice ("||" par)?
//! choice  := seq ("+" choice)?
//! seq     := atom (";" seq)?
//! atom    := base "*"*
//! base    := "P(" name ")" | "V(" name ")" | ident | string | "(" program ")"
//! ```
//!
//! Identifiers match `[A-Za-z_][A-Za-z0-9_:=]*`; anything else can be written
//! as a double-quoted string. `#` starts a comment running to end of line.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};

/// A program of the toy concurrent language.
///
/// `Lock(a)` and `Unlock(a)` take and release the mutex `a`; every other
/// action is opaque.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Program {
    Action(String),
    Lock(String),
    Unlock(String),
    Seq(Box<Program>, Box<Program>),
    Choice(Box<Program>, Box<Program>),
    Loop(Box<Program>),
    Par(Box<Program>, Box<Program>),
}

impl Program {
    pub fn action(name: impl Into<String>) -> Program {
        Program::Action(name.into())
    }

    pub fn lock(mutex: impl Into<String>) -> Program {
        Program::Lock(mutex.into())
    }

    pub fn unlock(mutex: impl Into<String>) -> Program {
        Program::Unlock(mutex.into())
    }

    pub fn seq(left: Program, right: Program) -> Program {
        Program::Seq(Box::new(left), Box::new(right))
    }

    pub fn choice(left: Program, right: Program) -> Program {
        Program::Choice(Box::new(left), Box::new(right))
    }

    pub fn par(left: Program, right: Program) -> Program {
        Program::Par(Box::new(left), Box::new(right))
    }

    pub fn looped(body: Program) -> Program {
        Program::Loop(Box::new(body))
    }

    /// Right-nested sequence of the given programs. Panics on an empty list.
    pub fn seq_chain(items: impl IntoIterator<Item = Program>) -> Program {
        let mut items: Vec<Program> = items.into_iter().collect();
        let mut acc = items.pop().expect("seq_chain needs at least one program");
        while let Some(p) = items.pop() {
            acc = Program::seq(p, acc);
        }
        acc
    }

    /// True for `Action`, `Lock` and `Unlock`.
    pub fn is_leaf(&self) -> bool {
        matches!(
            self,
            Program::Action(_) | Program::Lock(_) | Program::Unlock(_)
        )
    }

    pub fn has_loop(&self) -> bool {
        match self {
            Program::Action(_) | Program::Lock(_) | Program::Unlock(_) => false,
            Program::Loop(_) => true,
            Program::Seq(l, r) | Program::Choice(l, r) | Program::Par(l, r) => {
                l.has_loop() || r.has_loop()
            }
        }
    }

    /// Names of every opaque action occurring in the program.
    pub fn action_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit_leaves(&mut |leaf| {
            if let Program::Action(name) = leaf {
                out.insert(name.clone());
            }
        });
        out
    }

    fn visit_leaves<'a>(&'a self, f: &mut impl FnMut(&'a Program)) {
        match self {
            Program::Action(_) | Program::Lock(_) | Program::Unlock(_) => f(self),
            Program::Loop(body) => body.visit_leaves(f),
            Program::Seq(l, r) | Program::Choice(l, r) | Program::Par(l, r) => {
                l.visit_leaves(f);
                r.visit_leaves(f);
            }
        }
    }
}

/// The set of mutex names used by `P(..)` and `V(..)` in the program.
pub fn mutexes_of(p: &Program) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    p.visit_leaves(&mut |leaf| match leaf {
        Program::Lock(m) | Program::Unlock(m) => {
            out.insert(m.clone());
        }
        _ => {}
    });
    out
}

pub fn parse_program(text: &str) -> Result<Program> {
    let tokens = lex(text)?;
    if tokens.len() == 1 {
        return Err(Error::EmptyInput);
    }
    let mut parser = Parser { tokens, pos: 0 };
    let prog = parser.par()?;
    let tok = parser.peek();
    if tok.kind != Tok::Eof {
        return Err(syntax_error(tok, format!("unexpected {}", tok.kind)));
    }
    Ok(prog)
}

pub fn print_program(p: &Program) -> String {
    let mut out = String::new();
    write_program(&mut out, p, 0);
    out
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_program(self))
    }
}

impl std::str::FromStr for Program {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_program(s)
    }
}

// Binding strength: par < choice < seq < loop < leaf/group.
fn precedence(p: &Program) -> u8 {
    match p {
        Program::Par(..) => 0,
        Program::Choice(..) => 1,
        Program::Seq(..) => 2,
        Program::Loop(_) => 3,
        Program::Action(_) | Program::Lock(_) | Program::Unlock(_) => 4,
    }
}

fn write_program(out: &mut String, p: &Program, min: u8) {
    let paren = precedence(p) < min;
    if paren {
        out.push('(');
    }
    match p {
        Program::Action(name) => write_name(out, name),
        Program::Lock(m) => {
            out.push_str("P(");
            write_name(out, m);
            out.push(')');
        }
        Program::Unlock(m) => {
            out.push_str("V(");
            write_name(out, m);
            out.push(')');
        }
        Program::Seq(l, r) => write_binary(out, l, " ; ", r, 2),
        Program::Choice(l, r) => write_binary(out, l, " + ", r, 1),
        Program::Par(l, r) => write_binary(out, l, " || ", r, 0),
        Program::Loop(body) => {
            write_program(out, body, 3);
            out.push('*');
        }
    }
    if paren {
        out.push(')');
    }
}

fn write_binary(out: &mut String, l: &Program, op: &str, r: &Program, level: u8) {
    write_program(out, l, level + 1);
    out.push_str(op);
    write_program(out, r, level);
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '_' | ':' | '=')
}

fn is_bare_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if is_ident_start(c)) && chars.all(is_ident_char)
}

fn write_name(out: &mut String, name: &str) {
    if is_bare_ident(name) {
        out.push_str(name);
        return;
    }
    out.push('"');
    for c in name.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            _ => out.push(c),
        }
    }
    out.push('"');
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Str(String),
    LParen,
    RParen,
    Star,
    Semi,
    Plus,
    Bars,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "identifier '{s}'"),
            Tok::Str(s) => write!(f, "string {s:?}"),
            Tok::LParen => f.write_str("'('"),
            Tok::RParen => f.write_str("')'"),
            Tok::Star => f.write_str("'*'"),
            Tok::Semi => f.write_str("';'"),
            Tok::Plus => f.write_str("'+'"),
            Tok::Bars => f.write_str("'||'"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    kind: Tok,
    line: usize,
    column: usize,
}

fn syntax_error(tok: &Token, message: String) -> Error {
    Error::Syntax {
        line: tok.line,
        column: tok.column,
        message,
    }
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let mut tokens = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut column) = (1usize, 1usize);

    macro_rules! bump {
        () => {{
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                column = 1;
            } else if c.is_some() {
                column += 1;
            }
            c
        }};
    }

    while let Some(&c) = chars.peek() {
        let (tl, tc) = (line, column);
        let kind = match c {
            c if c.is_whitespace() => {
                bump!();
                continue;
            }
            '#' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    bump!();
                }
                continue;
            }
            '(' => {
                bump!();
                Tok::LParen
            }
            ')' => {
                bump!();
                Tok::RParen
            }
            '*' => {
                bump!();
                Tok::Star
            }
            ';' => {
                bump!();
                Tok::Semi
            }
            '+' => {
                bump!();
                Tok::Plus
            }
            '|' => {
                bump!();
                if chars.peek() != Some(&'|') {
                    return Err(Error::Syntax {
                        line: tl,
                        column: tc,
                        message: "expected '||'".into(),
                    });
                }
                bump!();
                Tok::Bars
            }
            '"' => {
                bump!();
                let mut s = String::new();
                loop {
                    match bump!() {
                        None => {
                            return Err(Error::Syntax {
                                line: tl,
                                column: tc,
                                message: "unterminated string".into(),
                            })
                        }
                        Some('"') => break,
                        Some('\\') => match bump!() {
                            Some('n') => s.push('\n'),
                            Some(c @ ('"' | '\\')) => s.push(c),
                            _ => {
                                return Err(Error::Syntax {
                                    line,
                                    column,
                                    message: "invalid escape in string".into(),
                                })
                            }
                        },
                        Some(c) => s.push(c),
                    }
                }
                if s.is_empty() {
                    return Err(Error::Syntax {
                        line: tl,
                        column: tc,
                        message: "empty name".into(),
                    });
                }
                Tok::Str(s)
            }
            c if is_ident_start(c) => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if !is_ident_char(c) {
                        break;
                    }
                    s.push(c);
                    bump!();
                }
                Tok::Ident(s)
            }
            other => {
                return Err(Error::Syntax {
                    line: tl,
                    column: tc,
                    message: format!("unexpected character {other:?}"),
                })
            }
        };
        tokens.push(Token {
            kind,
            line: tl,
            column: tc,
        });
    }
    tokens.push(Token {
        kind: Tok::Eof,
        line,
        column,
    });
    Ok(tokens)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn peek_at(&self, offset: usize) -> &Tok {
        let i = (self.pos + offset).min(self.tokens.len() - 1);
        &self.tokens[i].kind
    }

    fn next(&mut self) -> Token {
        let tok = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        tok
    }

    fn eat(&mut self, kind: &Tok) -> bool {
        if &self.peek().kind == kind {
            self.next();
            true
        } else {
            false
        }
    }

    fn par(&mut self) -> Result<Program> {
        let left = self.choice()?;
        if self.eat(&Tok::Bars) {
            Ok(Program::par(left, self.par()?))
        } else {
            Ok(left)
        }
    }

    fn choice(&mut self) -> Result<Program> {
        let left = self.seq()?;
        if self.eat(&Tok::Plus) {
            Ok(Program::choice(left, self.choice()?))
        } else {
            Ok(left)
        }
    }

    fn seq(&mut self) -> Result<Program> {
        let left = self.atom()?;
        if self.eat(&Tok::Semi) {
            Ok(Program::seq(left, self.seq()?))
        } else {
            Ok(left)
        }
    }

    fn atom(&mut self) -> Result<Program> {
        let mut p = self.base()?;
        while self.eat(&Tok::Star) {
            p = Program::looped(p);
        }
        Ok(p)
    }

    fn base(&mut self) -> Result<Program> {
        let tok = self.next();
        match tok.kind {
            Tok::Ident(ref name)
                if (name == "P" || name == "V") && *self.peek_at(0) == Tok::LParen =>
            {
                let open = self.next();
                let mutex = match self.next() {
                    Token {
                        kind: Tok::Ident(m) | Tok::Str(m),
                        ..
                    } => m,
                    other => {
                        return Err(syntax_error(
                            &other,
                            format!("expected mutex name, found {}", other.kind),
                        ))
                    }
                };
                self.close(&open)?;
                Ok(if name == "P" {
                    Program::Lock(mutex)
                } else {
                    Program::Unlock(mutex)
                })
            }
            Tok::Ident(name) | Tok::Str(name) => Ok(Program::Action(name)),
            Tok::LParen => {
                let inner = self.par()?;
                self.close(&tok)?;
                Ok(inner)
            }
            ref other => Err(syntax_error(
                &tok,
                format!("expected a program, found {other}"),
            )),
        }
    }

    fn close(&mut self, open: &Token) -> Result<()> {
        if self.eat(&Tok::RParen) {
            return Ok(());
        }
        let tok = self.peek();
        Err(syntax_error(
            tok,
            format!(
                "expected ')' to close '(' at line {}, column {}, found {}",
                open.line, open.column, tok.kind
            ),
        ))
    }
}

/// The two-thread deadlock example: each thread takes both mutexes in
/// opposite order around an assignment.
pub fn swiss_flag() -> Program {
    parse_program(SWISS_FLAG_SOURCE).expect("built-in example parses")
}

pub const SWISS_FLAG_SOURCE: &str =
    "(P(a) ; P(b) ; \"x:=y+1\" ; V(b) ; V(a)) || (P(b) ; P(a) ; \"y:=x+2\" ; V(a) ; V(b))";

#[cfg(test)]
mod tests {
    use super::*;

    fn a(s: &str) -> Program {
        Program::action(s)
    }

    #[test]
    fn parses_lock_unlock_sequence() {
        let p = parse_program("P(a) ; V(a)").unwrap();
        assert_eq!(p, Program::seq(Program::lock("a"), Program::unlock("a")));
    }

    #[test]
    fn parses_two_thread_program_right_nested() {
        let p = parse_program("(P(a);P(b);w1;V(b);V(a)) || (P(b);P(a);w2;V(a);V(b))").unwrap();
        let t1 = Program::seq_chain([
            Program::lock("a"),
            Program::lock("b"),
            a("w1"),
            Program::unlock("b"),
            Program::unlock("a"),
        ]);
        let t2 = Program::seq_chain([
            Program::lock("b"),
            Program::lock("a"),
            a("w2"),
            Program::unlock("a"),
            Program::unlock("b"),
        ]);
        assert_eq!(p, Program::par(t1, t2));
        match &p {
            Program::Par(l, _) => match l.as_ref() {
                Program::Seq(first, rest) => {
                    assert_eq!(**first, Program::lock("a"));
                    assert!(matches!(rest.as_ref(), Program::Seq(..)));
                }
                other => panic!("unexpected {other:?}"),
            },
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unclosed_paren_is_reported() {
        match parse_program("P(a") {
            Err(Error::Syntax {
                line,
                column,
                message,
            }) => {
                assert_eq!((line, column), (1, 4));
                assert!(message.contains("')'"), "{message}");
            }
            other => panic!("expected syntax error, got {other:?}"),
        }
        assert!(matches!(parse_program("(A ; B"), Err(Error::Syntax { .. })));
    }

    #[test]
    fn empty_input_is_rejected() {
        assert_eq!(parse_program(""), Err(Error::EmptyInput));
        assert_eq!(
            parse_program("  # only a comment\n"),
            Err(Error::EmptyInput)
        );
    }

    #[test]
    fn syntax_error_positions_track_lines() {
        match parse_program("A ;\n  ; B") {
            Err(Error::Syntax { line, column, .. }) => assert_eq!((line, column), (2, 3)),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_program("A | B"), Err(Error::Syntax { .. })));
        assert!(matches!(parse_program("A B"), Err(Error::Syntax { .. })));
        assert!(matches!(parse_program("P()"), Err(Error::Syntax { .. })));
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(
            parse_program("A;B||C").unwrap(),
            Program::par(Program::seq(a("A"), a("B")), a("C"))
        );
        assert_eq!(
            parse_program("A;B*").unwrap(),
            Program::seq(a("A"), Program::looped(a("B")))
        );
        assert_eq!(
            parse_program("A + B ; C").unwrap(),
            Program::choice(a("A"), Program::seq(a("B"), a("C")))
        );
        assert_eq!(
            parse_program("A || B || C").unwrap(),
            Program::par(a("A"), Program::par(a("B"), a("C")))
        );
        assert_eq!(
            parse_program("A**").unwrap(),
            Program::looped(Program::looped(a("A")))
        );
    }

    #[test]
    fn printing() {
        assert_eq!(
            print_program(&Program::seq(Program::lock("a"), Program::unlock("a"))),
            "P(a) ; V(a)"
        );
        assert_eq!(print_program(&Program::looped(a("A"))), "A*");
        assert_eq!(
            print_program(&Program::choice(Program::lock("a"), Program::lock("b"))),
            "P(a) + P(b)"
        );
        assert_eq!(
            print_program(&Program::seq(Program::seq(a("A"), a("B")), a("C"))),
            "(A ; B) ; C"
        );
        assert_eq!(
            print_program(&Program::looped(Program::seq(a("A"), a("B")))),
            "(A ; B)*"
        );
        assert_eq!(print_program(&a("x:=y+1")), "\"x:=y+1\"");
        assert_eq!(print_program(&a("x:=y")), "x:=y");
    }

    #[test]
    fn comments_and_strings() {
        let p = parse_program("# header\n\"x:=y+1\" ; B # trailing\n").unwrap();
        assert_eq!(p, Program::seq(a("x:=y+1"), a("B")));
        let q = parse_program("\"say \\\"hi\\\"\"").unwrap();
        assert_eq!(q, a("say \"hi\""));
        assert_eq!(parse_program(&print_program(&q)).unwrap(), q);
    }

    #[test]
    fn action_named_p_is_opaque() {
        assert_eq!(
            parse_program("P ; V").unwrap(),
            Program::seq(a("P"), a("V"))
        );
    }

    #[test]
    fn mutexes() {
        let p = parse_program("P(a);(P(a) || V(b))").unwrap();
        assert_eq!(
            mutexes_of(&p),
            ["a", "b"].iter().map(|s| s.to_string()).collect()
        );
        assert!(mutexes_of(&parse_program("A;B").unwrap()).is_empty());
        assert_eq!(
            mutexes_of(&swiss_flag()),
            ["a", "b"].iter().map(|s| s.to_string()).collect()
        );
    }

    #[test]
    fn print_parse_print_is_stable() {
        for src in [
            "A",
            "(A || B) ; C",
            "A + (B || C)*",
            "(A + B) + C",
            "P(a) ; (P(a) || V(b))",
            SWISS_FLAG_SOURCE,
        ] {
            let once = print_program(&parse_program(src).unwrap());
            let twice = print_program(&parse_program(&once).unwrap());
            assert_eq!(once, twice);
        }
    }
}
