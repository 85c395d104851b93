//! Surface syntax for terms.
//!
//! ```text
//! expr  ::= '\' var+ '.' expr          lambda, compiled via bracket abstraction
//!         | atom+                      application, left associative
//! atom  ::= 'S' | 'K' | 'I' | 'true' | 'false' | 'pair' | 'p1' | 'p2' | 'case'
//!         | '#' name                   oracle atom
//!         | 'num:' digits              numeral value
//!         | ident                      named term from the environment
//!         | '<' expr ',' expr '>'      pair application
//!         | '(' expr ')'
//! ```
//!
//! The printer recognises numeral and pair values and the derived
//! combinators, so its output stays readable; `parse(print(t)) == t` holds
//! for every term because each piece of sugar parses back to the exact value
//! it was printed from.

use std::collections::BTreeMap;

use crate::term::{
    case_c, compile, decode_numeral, decode_pair, false_c, i, numeral, p1_c, p2_c, pair_c,
    LambdaExpr, Term,
};

pub type TermEnv = BTreeMap<String, Term>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{col}: {msg}")]
pub struct SyntaxError {
    pub msg: String,
    pub line: usize,
    pub col: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Oracle(String),
    Numeral(u64),
    LParen,
    RParen,
    LAngle,
    RAngle,
    Comma,
    Lambda,
    Dot,
}

struct Lexer<'a> {
    src: &'a str,
    toks: Vec<(Tok, usize)>,
}

fn err_at(src: &str, pos: usize, msg: impl Into<String>) -> SyntaxError {
    let mut line = 1;
    let mut col = 1;
    for (i, c) in src.char_indices() {
        if i >= pos {
            break;
        }
        if c == '\n' {
            line += 1;
            col = 1;
        } else {
            col += 1;
        }
    }
    SyntaxError { msg: msg.into(), line, col }
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, SyntaxError> {
    let bytes: Vec<char> = src.chars().collect();
    let mut toks = Vec::new();
    let mut pos = 0;
    while pos < bytes.len() {
        let c = bytes[pos];
        let start = pos;
        match c {
            c if c.is_whitespace() => {
                pos += 1;
            }
            '(' => {
                toks.push((Tok::LParen, start));
                pos += 1;
            }
            ')' => {
                toks.push((Tok::RParen, start));
                pos += 1;
            }
            '<' => {
                toks.push((Tok::LAngle, start));
                pos += 1;
            }
            '>' => {
                toks.push((Tok::RAngle, start));
                pos += 1;
            }
            ',' => {
                toks.push((Tok::Comma, start));
                pos += 1;
            }
            '\\' => {
                toks.push((Tok::Lambda, start));
                pos += 1;
            }
            '.' => {
                toks.push((Tok::Dot, start));
                pos += 1;
            }
            '#' => {
                pos += 1;
                let from = pos;
                while pos < bytes.len() && is_ident_char(bytes[pos]) {
                    pos += 1;
                }
                if pos == from {
                    return Err(err_at(src, start, "expected oracle name after `#`"));
                }
                toks.push((Tok::Oracle(bytes[from..pos].iter().collect()), start));
            }
            c if is_ident_start(c) => {
                let from = pos;
                while pos < bytes.len() && is_ident_char(bytes[pos]) {
                    pos += 1;
                }
                let word: String = bytes[from..pos].iter().collect();
                if word == "num" && pos < bytes.len() && bytes[pos] == ':' {
                    pos += 1;
                    let dfrom = pos;
                    while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                        pos += 1;
                    }
                    if pos == dfrom {
                        return Err(err_at(src, start, "expected digits after `num:`"));
                    }
                    let digits: String = bytes[dfrom..pos].iter().collect();
                    let n: u64 = digits
                        .parse()
                        .map_err(|_| err_at(src, start, "numeral out of range"))?;
                    toks.push((Tok::Numeral(n), start));
                } else {
                    toks.push((Tok::Ident(word), start));
                }
            }
            other => {
                return Err(err_at(src, start, format!("unexpected character `{other}`")));
            }
        }
    }
    Ok(toks)
}

struct Parser<'a> {
    lx: Lexer<'a>,
    at: usize,
    env: &'a TermEnv,
    binders: Vec<String>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.lx.toks.get(self.at).map(|(t, _)| t)
    }

    fn pos(&self) -> usize {
        self.lx
            .toks
            .get(self.at)
            .map(|&(_, p)| p)
            .unwrap_or(self.lx.src.len())
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.lx.toks.get(self.at).map(|(t, _)| t.clone());
        if t.is_some() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), SyntaxError> {
        if self.peek() == Some(&tok) {
            self.at += 1;
            Ok(())
        } else {
            Err(err_at(self.lx.src, self.pos(), format!("expected {what}")))
        }
    }

    fn expr(&mut self) -> Result<LambdaExpr, SyntaxError> {
        if self.peek() == Some(&Tok::Lambda) {
            self.bump();
            let mut vars = Vec::new();
            loop {
                match self.bump() {
                    Some(Tok::Ident(v)) => vars.push(v),
                    Some(Tok::Dot) if !vars.is_empty() => break,
                    _ => {
                        return Err(err_at(
                            self.lx.src,
                            self.pos(),
                            "expected binder variables and `.` after `\\`",
                        ))
                    }
                }
            }
            for v in &vars {
                self.binders.push(v.clone());
            }
            let body = self.expr()?;
            for _ in &vars {
                self.binders.pop();
            }
            Ok(vars
                .into_iter()
                .rev()
                .fold(body, |b, v| LambdaExpr::Abs(v, Box::new(b))))
        } else {
            self.application()
        }
    }

    fn application(&mut self) -> Result<LambdaExpr, SyntaxError> {
        let mut acc = self
            .atom()?
            .ok_or_else(|| err_at(self.lx.src, self.pos(), "expected a term"))?;
        while let Some(next) = self.atom()? {
            acc = LambdaExpr::app(acc, next);
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<Option<LambdaExpr>, SyntaxError> {
        let pos = self.pos();
        match self.peek() {
            Some(Tok::Ident(_)) => {
                let Some(Tok::Ident(name)) = self.bump() else { unreachable!() };
                if self.binders.iter().rev().any(|b| *b == name) {
                    return Ok(Some(LambdaExpr::Var(name)));
                }
                let builtin = match name.as_str() {
                    "S" => Some(Term::S),
                    "K" => Some(Term::K),
                    "I" => Some(i()),
                    "true" => Some(Term::K),
                    "false" => Some(false_c()),
                    "pair" => Some(pair_c()),
                    "p1" => Some(p1_c()),
                    "p2" => Some(p2_c()),
                    "case" => Some(case_c()),
                    _ => None,
                };
                if let Some(t) = builtin {
                    return Ok(Some(LambdaExpr::Const(t)));
                }
                match self.env.get(&name) {
                    Some(t) => Ok(Some(LambdaExpr::Const(t.clone()))),
                    None => Err(err_at(self.lx.src, pos, format!("unknown name `{name}`"))),
                }
            }
            Some(Tok::Oracle(_)) => {
                let Some(Tok::Oracle(name)) = self.bump() else { unreachable!() };
                Ok(Some(LambdaExpr::Const(Term::Oracle(name))))
            }
            Some(Tok::Numeral(_)) => {
                let Some(Tok::Numeral(n)) = self.bump() else { unreachable!() };
                Ok(Some(LambdaExpr::Const(numeral(n))))
            }
            Some(Tok::LParen) => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(Some(e))
            }
            Some(Tok::LAngle) => {
                self.bump();
                let a = self.expr()?;
                self.expect(Tok::Comma, "`,`")?;
                let b = self.expr()?;
                self.expect(Tok::RAngle, "`>`")?;
                Ok(Some(LambdaExpr::pair(a, b)))
            }
            _ => Ok(None),
        }
    }
}

/// Parses a surface expression and compiles any lambdas away. Free
/// identifiers resolve against `env` after the builtin combinator names.
pub fn parse_term(src: &str, env: &TermEnv) -> Result<Term, SyntaxError> {
    let toks = lex(src)?;
    let mut p = Parser { lx: Lexer { src, toks }, at: 0, env, binders: Vec::new() };
    let e = p.expr()?;
    if p.at != p.lx.toks.len() {
        return Err(err_at(src, p.pos(), "trailing input after expression"));
    }
    compile(&e).map_err(|ce| err_at(src, 0, ce.to_string()))
}

/// Prints a term in the surface syntax, using value sugar where it applies.
pub fn print_term(t: &Term) -> String {
    let mut out = String::new();
    print_into(t, false, &mut out);
    out
}

fn print_into(t: &Term, arg_position: bool, out: &mut String) {
    if let Some(n) = decode_numeral(t) {
        out.push_str(&format!("num:{n}"));
        return;
    }
    if let Some((a, b)) = decode_pair(t) {
        out.push('<');
        print_into(a, false, out);
        out.push_str(", ");
        print_into(b, false, out);
        out.push('>');
        return;
    }
    if let Some(name) = combinator_name(t) {
        out.push_str(name);
        return;
    }
    match t {
        Term::S => out.push('S'),
        Term::K => out.push('K'),
        Term::Oracle(n) => {
            out.push('#');
            out.push_str(n);
        }
        Term::App(f, a) => {
            if arg_position {
                out.push('(');
            }
            print_into(f, false, out);
            out.push(' ');
            print_into(a, true, out);
            if arg_position {
                out.push(')');
            }
        }
    }
}

fn combinator_name(t: &Term) -> Option<&'static str> {
    if *t == i() {
        Some("I")
    } else if *t == false_c() {
        Some("false")
    } else if *t == pair_c() {
        Some("pair")
    } else if *t == p1_c() {
        Some("p1")
    } else if *t == p2_c() {
        Some("p2")
    } else if *t == case_c() {
        Some("case")
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{apply_many, pair_of, PcaSpec};

    fn parse(src: &str) -> Term {
        parse_term(src, &TermEnv::new()).unwrap()
    }

    #[test]
    fn parses_atoms_and_application() {
        assert_eq!(parse("K"), Term::K);
        assert_eq!(parse("S K K"), i());
        assert_eq!(parse("K (S K)"), Term::app(Term::K, Term::app(Term::S, Term::K)));
        assert_eq!(parse("#f K"), Term::app(Term::oracle("f"), Term::K));
    }

    #[test]
    fn parses_sugar() {
        assert_eq!(parse("num:2"), numeral(2));
        assert_eq!(parse("<K, S>"), pair_of(&Term::K, &Term::S));
        assert_eq!(parse("I"), i());
        assert_eq!(parse("true"), Term::K);
    }

    #[test]
    fn lambda_compiles() {
        assert_eq!(parse("\\x. x"), i());
        let twofold = parse("\\x y. y x");
        let r = apply_many(&twofold, &[Term::S, Term::K], &PcaSpec::plain());
        assert_eq!(r.converged(), Some(&Term::app(Term::K, Term::S)));
    }

    #[test]
    fn env_names_resolve() {
        let mut env = TermEnv::new();
        env.insert("foo".into(), pair_of(&Term::K, &Term::S));
        assert!(parse_term("p1 foo", &env).unwrap().size() > 1);
        assert!(parse_term("bar", &env).is_err());
    }

    #[test]
    fn errors_carry_location() {
        let e = parse_term("K )", &TermEnv::new()).unwrap_err();
        assert_eq!((e.line, e.col), (1, 3));
        let e = parse_term("\nK ??", &TermEnv::new()).unwrap_err();
        assert_eq!(e.line, 2);
    }

    #[test]
    fn print_uses_sugar() {
        assert_eq!(print_term(&numeral(3)), "num:3");
        assert_eq!(print_term(&pair_of(&Term::K, &Term::S)), "<K, S>");
        assert_eq!(print_term(&i()), "I");
        assert_eq!(print_term(&Term::app(Term::S, Term::app(Term::K, Term::K))), "S (K K)");
    }

    #[test]
    fn print_parse_roundtrip_on_samples() {
        let samples = vec![
            Term::K,
            Term::S,
            i(),
            false_c(),
            pair_c(),
            p1_c(),
            p2_c(),
            case_c(),
            numeral(4),
            pair_of(&numeral(1), &Term::oracle("f")),
            Term::apps(Term::S, &[Term::K, Term::oracle("g"), pair_of(&Term::S, &Term::K)]),
        ];
        for t in samples {
            assert_eq!(parse(&print_term(&t)), t, "roundtrip failed for {t}");
        }
    }
}
