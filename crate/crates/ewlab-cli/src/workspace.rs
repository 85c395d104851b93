//! The workspace file format: a dedicated grammar for declaring terms,
//! assemblies, morphisms, predicates, witnesses, universes and category
//! data, so that witness terms read naturally instead of being embedded in
//! a general data language.
//!
//! ```text
//! workspace      ::= item*
//! item           ::= pca | config | term | assembly | morphism
//!                  | base-predicate | ir-predicate | ew-predicate
//!                  | witness | universe | topos-object | topos-arrow
//!
//! pca            ::= 'pca' '{' ('fuel' NUM)? oracle* '}'
//! oracle         ::= 'oracle' ID '{' (NUM '->' NUM ','?)* '}'
//! config         ::= 'config' '{' (('seed'|'pool-size') NUM)* '}'
//! term           ::= 'term' ID '=' TERM
//! assembly       ::= 'assembly' ID '{' (elem ':' TERM)* '}'
//!                  | 'assembly' ID '=' 'square' ID
//! morphism       ::= 'morphism' ID ':' ID '->' ID
//!                    '{' 'realizer' TERM (elem '->' elem ','?)* '}'
//! base-predicate ::= 'base-predicate' ID 'on' ID '{' (elem ':' set)* '}'
//! ir-predicate   ::= 'ir-predicate' ID '{' 'display' ID
//!                    ('values' '{' (elem ':' set)* '}')? '}'
//! ew-predicate   ::= 'ew-predicate' ID 'on' base-ref
//!                    '{' ('at' elem 'tag' TERM family)* '}'
//! witness        ::= 'witness' ID '{' 'kind' 'eiR' 'hbar' TERM '}'
//!                  | 'witness' ID '{' 'kind' 'iR' 'mediator' ID 'ell' TERM '}'
//!                  | 'witness' ID '{' 'kind' 'extW' 'ell1' TERM 'ell2' TERM '}'
//! universe       ::= 'universe' ID '{' 'values' family
//!                    'realizers' '{' (TERM ','?)* '}' '}'
//! topos-object   ::= 'topos-object' ID '{' 'base' ID 'rho' ID '}'
//! topos-arrow    ::= 'topos-arrow' ID '{' 'source' ID 'target' ID 'phi' ID
//!                    ('certificates' '{' ID{5} '}')? '}'
//!
//! base-ref       ::= ID | 'square' ID
//! elem           ::= ID | STRING | '(' elem ',' elem ')'
//! set            ::= '{' (TERM ','?)* '}'
//! family         ::= '{' (set ','?)* '}'
//! TERM           ::= '[' term-surface-syntax ']'
//! ```
//!
//! `#` starts a comment running to the end of the line. Identifiers may
//! contain `-` (so `pool-size` and pair ids survive), except immediately
//! before `>`. Definitions are strictly define-before-use, which rules out
//! cyclic references; duplicate ids within a section and dangling
//! references are hard errors carrying a line and column.

use std::collections::BTreeMap;

use ewlab::asm::{self, AsmMorphism, PartitionedAssembly, PredValues};
use ewlab::eir::BasePredicate;
use ewlab::ew::{EwPredicate, EwWitness};
use ewlab::ir::{ImplicationUniverse, IrPredicate, IrWitness};
use ewlab::syntax::{parse_term, SyntaxError, TermEnv};
use ewlab::term::{PcaSpec, Term, TermSet};
use ewlab::topos::{ArrowCertificates, ToposArrow, ToposObject};

/// Pool size bound used when neither the workspace nor the command line
/// sets one.
pub const DEFAULT_POOL_SIZE: usize = 3;

/// A parse or validation error with its position.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{col}: {msg}")]
pub struct WsError {
    pub msg: String,
    pub line: usize,
    pub col: usize,
}

/// A fully built workspace: every declaration constructed and
/// cross-checked.
pub struct Workspace {
    pub pca: PcaSpec,
    pub seed: u64,
    pub pool_size: usize,
    pub terms: TermEnv,
    pub assemblies: BTreeMap<String, PartitionedAssembly>,
    pub morphisms: BTreeMap<String, AsmMorphism>,
    pub base_preds: BTreeMap<String, BasePredicate>,
    pub ir_preds: BTreeMap<String, IrPredicate>,
    pub ew_preds: BTreeMap<String, EwPredicate>,
    pub witnesses: BTreeMap<String, WitnessDecl>,
    pub universes: BTreeMap<String, ImplicationUniverse>,
    pub topos_objects: BTreeMap<String, ToposObject>,
    pub topos_arrows: BTreeMap<String, ArrowDecl>,
}

impl Default for Workspace {
    fn default() -> Self {
        Workspace {
            pca: PcaSpec::default(),
            seed: 0,
            pool_size: DEFAULT_POOL_SIZE,
            terms: TermEnv::new(),
            assemblies: BTreeMap::new(),
            morphisms: BTreeMap::new(),
            base_preds: BTreeMap::new(),
            ir_preds: BTreeMap::new(),
            ew_preds: BTreeMap::new(),
            witnesses: BTreeMap::new(),
            universes: BTreeMap::new(),
            topos_objects: BTreeMap::new(),
            topos_arrows: BTreeMap::new(),
        }
    }
}

/// A declared witness, tagged by the order it belongs to.
pub enum WitnessDecl {
    Eir(Term),
    Ir(IrWitness),
    Ew(EwWitness),
}

/// A declared arrow: complete with certificates, or still pending a
/// certificate search.
pub enum ArrowDecl {
    Complete(Box<ToposArrow>),
    Pending { source: String, target: String, phi: String },
}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Num(u64),
    Str(String),
    /// The raw source between `[` and `]`.
    TermSrc(String),
    LBrace,
    RBrace,
    LParen,
    RParen,
    Colon,
    Comma,
    Arrow,
    Eq,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("'{s}'"),
            Tok::Num(n) => format!("'{n}'"),
            Tok::Str(s) => format!("\"{s}\""),
            Tok::TermSrc(_) => "a term".to_string(),
            Tok::LBrace => "'{'".to_string(),
            Tok::RBrace => "'}'".to_string(),
            Tok::LParen => "'('".to_string(),
            Tok::RParen => "')'".to_string(),
            Tok::Colon => "':'".to_string(),
            Tok::Comma => "','".to_string(),
            Tok::Arrow => "'->'".to_string(),
            Tok::Eq => "'='".to_string(),
        }
    }
}

fn line_col(src: &str, pos: usize) -> (usize, usize) {
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
    (line, col)
}

fn err_at(src: &str, pos: usize, msg: impl Into<String>) -> WsError {
    let (line, col) = line_col(src, pos);
    WsError { msg: msg.into(), line, col }
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, WsError> {
    let chars: Vec<char> = src.chars().collect();
    let mut toks = Vec::new();
    let mut pos = 0;
    while pos < chars.len() {
        let c = chars[pos];
        let start = pos;
        match c {
            _ if c.is_whitespace() => pos += 1,
            '#' => {
                while pos < chars.len() && chars[pos] != '\n' {
                    pos += 1;
                }
            }
            '{' => {
                toks.push((Tok::LBrace, start));
                pos += 1;
            }
            '}' => {
                toks.push((Tok::RBrace, start));
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
            ':' => {
                toks.push((Tok::Colon, start));
                pos += 1;
            }
            ',' => {
                toks.push((Tok::Comma, start));
                pos += 1;
            }
            '=' => {
                toks.push((Tok::Eq, start));
                pos += 1;
            }
            '[' => {
                pos += 1;
                let content_start = pos;
                while pos < chars.len() && chars[pos] != ']' {
                    pos += 1;
                }
                if pos == chars.len() {
                    return Err(err_at(src, start, "unterminated term bracket"));
                }
                let text: String = chars[content_start..pos].iter().collect();
                toks.push((Tok::TermSrc(text), content_start));
                pos += 1;
            }
            '"' => {
                pos += 1;
                let content_start = pos;
                while pos < chars.len() && chars[pos] != '"' {
                    pos += 1;
                }
                if pos == chars.len() {
                    return Err(err_at(src, start, "unterminated string"));
                }
                let text: String = chars[content_start..pos].iter().collect();
                toks.push((Tok::Str(text), start));
                pos += 1;
            }
            '-' if chars.get(pos + 1) == Some(&'>') => {
                toks.push((Tok::Arrow, start));
                pos += 2;
            }
            c if c.is_ascii_digit() => {
                let mut text = String::new();
                while pos < chars.len() && chars[pos].is_ascii_digit() {
                    text.push(chars[pos]);
                    pos += 1;
                }
                let n = text
                    .parse::<u64>()
                    .map_err(|_| err_at(src, start, format!("number '{text}' is too large")))?;
                toks.push((Tok::Num(n), start));
            }
            c if is_ident_start(c) => {
                let mut text = String::new();
                while pos < chars.len() {
                    let c = chars[pos];
                    // A '-' continues the identifier unless it starts an
                    // `->` arrow or dangles at the end.
                    let continues = is_ident_char(c)
                        || (c == '-'
                            && chars.get(pos + 1) != Some(&'>')
                            && chars.get(pos + 1).copied().is_some_and(is_ident_char));
                    if !continues {
                        break;
                    }
                    text.push(c);
                    pos += 1;
                }
                toks.push((Tok::Ident(text), start));
            }
            other => return Err(err_at(src, start, format!("unexpected character '{other}'"))),
        }
    }
    Ok(toks)
}

// ---------------------------------------------------------------------------
// Parser: tokens to declarations
// ---------------------------------------------------------------------------

/// An identifier (or number, or pair-rendered element id) with its source
/// position.
type Sp = (String, usize);

enum WitnessAst {
    Eir { hbar: Sp },
    Ir { mediator: Sp, ell: Sp },
    Ew { ell1: Sp, ell2: Sp },
}

enum BaseRef {
    Plain(Sp),
    Square(Sp),
}

enum Decl {
    Pca { fuel: Option<u64>, oracles: Vec<(String, BTreeMap<u64, u64>)>, pos: usize },
    Config { entries: Vec<(String, u64, usize)> },
    Term { id: Sp, src: Sp },
    Assembly { id: Sp, rows: Vec<(Sp, Sp)> },
    AssemblySquare { id: Sp, of: Sp },
    Morphism { id: Sp, source: Sp, target: Sp, realizer: Sp, pairs: Vec<(Sp, Sp)> },
    BasePred { id: Sp, on: Sp, rows: Vec<(Sp, Vec<Sp>)> },
    IrPred { id: Sp, display: Sp, values: Vec<(Sp, Vec<Sp>)> },
    EwPred { id: Sp, on: BaseRef, entries: Vec<(Sp, Sp, Vec<Vec<Sp>>)> },
    Witness { id: Sp, kind: WitnessAst },
    Universe { id: Sp, values: Vec<Vec<Sp>>, realizers: Vec<Sp> },
    ToposObject { id: Sp, base: Sp, rho: Sp },
    ToposArrow { id: Sp, source: Sp, target: Sp, phi: Sp, certificates: Option<Vec<Sp>> },
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<(Tok, usize)>,
    i: usize,
}

impl<'a> Parser<'a> {
    fn eof_pos(&self) -> usize {
        self.src.len()
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|(t, _)| t)
    }

    fn next(&mut self) -> Result<(Tok, usize), WsError> {
        let item = self
            .toks
            .get(self.i)
            .cloned()
            .ok_or_else(|| err_at(self.src, self.eof_pos(), "unexpected end of file"))?;
        self.i += 1;
        Ok(item)
    }

    fn expect(&mut self, want: Tok) -> Result<usize, WsError> {
        let (tok, pos) = self.next()?;
        if tok == want {
            Ok(pos)
        } else {
            Err(err_at(
                self.src,
                pos,
                format!("expected {}, found {}", want.describe(), tok.describe()),
            ))
        }
    }

    fn expect_ident(&mut self) -> Result<Sp, WsError> {
        let (tok, pos) = self.next()?;
        match tok {
            Tok::Ident(s) => Ok((s, pos)),
            other => Err(err_at(
                self.src,
                pos,
                format!("expected an identifier, found {}", other.describe()),
            )),
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<usize, WsError> {
        let (s, pos) = self.expect_ident()?;
        if s == kw {
            Ok(pos)
        } else {
            Err(err_at(self.src, pos, format!("expected '{kw}', found '{s}'")))
        }
    }

    fn expect_num(&mut self) -> Result<(u64, usize), WsError> {
        let (tok, pos) = self.next()?;
        match tok {
            Tok::Num(n) => Ok((n, pos)),
            other => Err(err_at(
                self.src,
                pos,
                format!("expected a number, found {}", other.describe()),
            )),
        }
    }

    fn expect_term_src(&mut self) -> Result<Sp, WsError> {
        let (tok, pos) = self.next()?;
        match tok {
            Tok::TermSrc(s) => Ok((s, pos)),
            other => Err(err_at(
                self.src,
                pos,
                format!("expected a bracketed term, found {}", other.describe()),
            )),
        }
    }

    fn skip_comma(&mut self) {
        if self.peek() == Some(&Tok::Comma) {
            self.i += 1;
        }
    }

    /// `elem ::= ID | STRING | '(' elem ',' elem ')'` — pairs render to the
    /// canonical product id.
    fn expect_elem(&mut self) -> Result<Sp, WsError> {
        let (tok, pos) = self.next()?;
        match tok {
            Tok::Ident(s) => Ok((s, pos)),
            Tok::Str(s) => Ok((s, pos)),
            Tok::Num(n) => Ok((n.to_string(), pos)),
            Tok::LParen => {
                let (a, _) = self.expect_elem()?;
                self.expect(Tok::Comma)?;
                let (b, _) = self.expect_elem()?;
                self.expect(Tok::RParen)?;
                Ok((format!("({a},{b})"), pos))
            }
            other => Err(err_at(
                self.src,
                pos,
                format!("expected an element id, found {}", other.describe()),
            )),
        }
    }

    /// `set ::= '{' (TERM ','?)* '}'`
    fn expect_term_set(&mut self) -> Result<Vec<Sp>, WsError> {
        self.expect(Tok::LBrace)?;
        let mut out = Vec::new();
        while self.peek() != Some(&Tok::RBrace) {
            out.push(self.expect_term_src()?);
            self.skip_comma();
        }
        self.expect(Tok::RBrace)?;
        Ok(out)
    }

    /// `family ::= '{' (set ','?)* '}'`
    fn expect_family(&mut self) -> Result<Vec<Vec<Sp>>, WsError> {
        self.expect(Tok::LBrace)?;
        let mut out = Vec::new();
        while self.peek() != Some(&Tok::RBrace) {
            out.push(self.expect_term_set()?);
            self.skip_comma();
        }
        self.expect(Tok::RBrace)?;
        Ok(out)
    }

    fn parse_decl(&mut self) -> Result<Decl, WsError> {
        let (section, pos) = self.expect_ident()?;
        match section.as_str() {
            "pca" => {
                self.expect(Tok::LBrace)?;
                let mut fuel = None;
                let mut oracles = Vec::new();
                while self.peek() != Some(&Tok::RBrace) {
                    let (key, kpos) = self.expect_ident()?;
                    match key.as_str() {
                        "fuel" => fuel = Some(self.expect_num()?.0),
                        "oracle" => {
                            let (name, _) = self.expect_ident()?;
                            self.expect(Tok::LBrace)?;
                            let mut table = BTreeMap::new();
                            while self.peek() != Some(&Tok::RBrace) {
                                let (from, _) = self.expect_num()?;
                                self.expect(Tok::Arrow)?;
                                let (to, _) = self.expect_num()?;
                                table.insert(from, to);
                                self.skip_comma();
                            }
                            self.expect(Tok::RBrace)?;
                            oracles.push((name, table));
                        }
                        other => {
                            return Err(err_at(
                                self.src,
                                kpos,
                                format!("unknown pca field '{other}'"),
                            ))
                        }
                    }
                }
                self.expect(Tok::RBrace)?;
                Ok(Decl::Pca { fuel, oracles, pos })
            }
            "config" => {
                self.expect(Tok::LBrace)?;
                let mut entries = Vec::new();
                while self.peek() != Some(&Tok::RBrace) {
                    let (key, kpos) = self.expect_ident()?;
                    let (value, _) = self.expect_num()?;
                    entries.push((key, value, kpos));
                }
                self.expect(Tok::RBrace)?;
                Ok(Decl::Config { entries })
            }
            "term" => {
                let id = self.expect_ident()?;
                self.expect(Tok::Eq)?;
                let src = self.expect_term_src()?;
                Ok(Decl::Term { id, src })
            }
            "assembly" => {
                let id = self.expect_ident()?;
                if self.peek() == Some(&Tok::Eq) {
                    self.expect(Tok::Eq)?;
                    self.expect_keyword("square")?;
                    let of = self.expect_ident()?;
                    Ok(Decl::AssemblySquare { id, of })
                } else {
                    self.expect(Tok::LBrace)?;
                    let mut rows = Vec::new();
                    while self.peek() != Some(&Tok::RBrace) {
                        let elem = self.expect_elem()?;
                        self.expect(Tok::Colon)?;
                        let name = self.expect_term_src()?;
                        rows.push((elem, name));
                        self.skip_comma();
                    }
                    self.expect(Tok::RBrace)?;
                    Ok(Decl::Assembly { id, rows })
                }
            }
            "morphism" => {
                let id = self.expect_ident()?;
                self.expect(Tok::Colon)?;
                let source = self.expect_ident()?;
                self.expect(Tok::Arrow)?;
                let target = self.expect_ident()?;
                self.expect(Tok::LBrace)?;
                self.expect_keyword("realizer")?;
                let realizer = self.expect_term_src()?;
                let mut pairs = Vec::new();
                while self.peek() != Some(&Tok::RBrace) {
                    let from = self.expect_elem()?;
                    self.expect(Tok::Arrow)?;
                    let to = self.expect_elem()?;
                    pairs.push((from, to));
                    self.skip_comma();
                }
                self.expect(Tok::RBrace)?;
                Ok(Decl::Morphism { id, source, target, realizer, pairs })
            }
            "base-predicate" => {
                let id = self.expect_ident()?;
                self.expect_keyword("on")?;
                let on = self.expect_ident()?;
                self.expect(Tok::LBrace)?;
                let mut rows = Vec::new();
                while self.peek() != Some(&Tok::RBrace) {
                    let elem = self.expect_elem()?;
                    self.expect(Tok::Colon)?;
                    let set = self.expect_term_set()?;
                    rows.push((elem, set));
                    self.skip_comma();
                }
                self.expect(Tok::RBrace)?;
                Ok(Decl::BasePred { id, on, rows })
            }
            "ir-predicate" => {
                let id = self.expect_ident()?;
                self.expect(Tok::LBrace)?;
                self.expect_keyword("display")?;
                let display = self.expect_ident()?;
                let mut values = Vec::new();
                if self.peek() != Some(&Tok::RBrace) {
                    self.expect_keyword("values")?;
                    self.expect(Tok::LBrace)?;
                    while self.peek() != Some(&Tok::RBrace) {
                        let elem = self.expect_elem()?;
                        self.expect(Tok::Colon)?;
                        let set = self.expect_term_set()?;
                        values.push((elem, set));
                        self.skip_comma();
                    }
                    self.expect(Tok::RBrace)?;
                }
                self.expect(Tok::RBrace)?;
                Ok(Decl::IrPred { id, display, values })
            }
            "ew-predicate" => {
                let id = self.expect_ident()?;
                self.expect_keyword("on")?;
                let on = {
                    let first = self.expect_ident()?;
                    if first.0 == "square" {
                        BaseRef::Square(self.expect_ident()?)
                    } else {
                        BaseRef::Plain(first)
                    }
                };
                self.expect(Tok::LBrace)?;
                let mut entries = Vec::new();
                while self.peek() != Some(&Tok::RBrace) {
                    self.expect_keyword("at")?;
                    let elem = self.expect_elem()?;
                    self.expect_keyword("tag")?;
                    let tag = self.expect_term_src()?;
                    let family = self.expect_family()?;
                    entries.push((elem, tag, family));
                    self.skip_comma();
                }
                self.expect(Tok::RBrace)?;
                Ok(Decl::EwPred { id, on, entries })
            }
            "witness" => {
                let id = self.expect_ident()?;
                self.expect(Tok::LBrace)?;
                self.expect_keyword("kind")?;
                let (kind, kpos) = self.expect_ident()?;
                let kind = match kind.as_str() {
                    "eiR" => {
                        self.expect_keyword("hbar")?;
                        WitnessAst::Eir { hbar: self.expect_term_src()? }
                    }
                    "iR" => {
                        self.expect_keyword("mediator")?;
                        let mediator = self.expect_ident()?;
                        self.expect_keyword("ell")?;
                        WitnessAst::Ir { mediator, ell: self.expect_term_src()? }
                    }
                    "extW" => {
                        self.expect_keyword("ell1")?;
                        let ell1 = self.expect_term_src()?;
                        self.expect_keyword("ell2")?;
                        WitnessAst::Ew { ell1, ell2: self.expect_term_src()? }
                    }
                    other => {
                        return Err(err_at(
                            self.src,
                            kpos,
                            format!("unknown witness kind '{other}' (expected eiR, iR or extW)"),
                        ))
                    }
                };
                self.expect(Tok::RBrace)?;
                Ok(Decl::Witness { id, kind })
            }
            "universe" => {
                let id = self.expect_ident()?;
                self.expect(Tok::LBrace)?;
                self.expect_keyword("values")?;
                let values = self.expect_family()?;
                self.expect_keyword("realizers")?;
                let realizers = self.expect_term_set()?;
                self.expect(Tok::RBrace)?;
                Ok(Decl::Universe { id, values, realizers })
            }
            "topos-object" => {
                let id = self.expect_ident()?;
                self.expect(Tok::LBrace)?;
                self.expect_keyword("base")?;
                let base = self.expect_ident()?;
                self.expect_keyword("rho")?;
                let rho = self.expect_ident()?;
                self.expect(Tok::RBrace)?;
                Ok(Decl::ToposObject { id, base, rho })
            }
            "topos-arrow" => {
                let id = self.expect_ident()?;
                self.expect(Tok::LBrace)?;
                self.expect_keyword("source")?;
                let source = self.expect_ident()?;
                self.expect_keyword("target")?;
                let target = self.expect_ident()?;
                self.expect_keyword("phi")?;
                let phi = self.expect_ident()?;
                let certificates = if self.peek() != Some(&Tok::RBrace) {
                    self.expect_keyword("certificates")?;
                    self.expect(Tok::LBrace)?;
                    let mut ids = Vec::new();
                    while self.peek() != Some(&Tok::RBrace) {
                        ids.push(self.expect_ident()?);
                        self.skip_comma();
                    }
                    self.expect(Tok::RBrace)?;
                    Some(ids)
                } else {
                    None
                };
                self.expect(Tok::RBrace)?;
                Ok(Decl::ToposArrow { id, source, target, phi, certificates })
            }
            other => Err(err_at(self.src, pos, format!("unknown section '{other}'"))),
        }
    }
}

// ---------------------------------------------------------------------------
// Builder: declarations to library objects
// ---------------------------------------------------------------------------

struct Builder<'a> {
    src: &'a str,
    ws: Workspace,
}

impl<'a> Builder<'a> {
    fn term(&self, sp: &Sp) -> Result<Term, WsError> {
        parse_term(&sp.0, &self.ws.terms).map_err(|e| self.absolute(sp.1, e))
    }

    /// Map a term-syntax error inside a bracket to workspace coordinates.
    fn absolute(&self, start: usize, e: SyntaxError) -> WsError {
        let (l0, c0) = line_col(self.src, start);
        if e.line == 1 {
            WsError { msg: e.msg, line: l0, col: c0 + e.col - 1 }
        } else {
            WsError { msg: e.msg, line: l0 + e.line - 1, col: e.col }
        }
    }

    fn fail(&self, pos: usize, msg: impl Into<String>) -> WsError {
        err_at(self.src, pos, msg)
    }

    fn term_set(&self, sets: &[Sp]) -> Result<TermSet, WsError> {
        sets.iter().map(|sp| self.term(sp)).collect()
    }

    fn fresh<T>(
        &self,
        map: &BTreeMap<String, T>,
        id: &Sp,
        section: &str,
    ) -> Result<(), WsError> {
        if map.contains_key(&id.0) {
            Err(self.fail(id.1, format!("duplicate {section} id '{}'", id.0)))
        } else {
            Ok(())
        }
    }

    fn assembly(&self, id: &Sp) -> Result<&PartitionedAssembly, WsError> {
        self.ws
            .assemblies
            .get(&id.0)
            .ok_or_else(|| self.fail(id.1, format!("unknown assembly id '{}'", id.0)))
    }

    fn morphism(&self, id: &Sp) -> Result<&AsmMorphism, WsError> {
        self.ws
            .morphisms
            .get(&id.0)
            .ok_or_else(|| self.fail(id.1, format!("unknown morphism id '{}'", id.0)))
    }

    fn build(&mut self, decl: Decl) -> Result<(), WsError> {
        match decl {
            Decl::Pca { .. } | Decl::Config { .. } => unreachable!("handled in the first pass"),
            Decl::Term { id, src } => {
                self.fresh(&self.ws.terms, &id, "term")?;
                let t = self.term(&src)?;
                self.ws.terms.insert(id.0, t);
            }
            Decl::Assembly { id, rows } => {
                self.fresh(&self.ws.assemblies, &id, "assembly")?;
                let mut elements = Vec::new();
                for (elem, name) in &rows {
                    elements.push((elem.0.clone(), self.term(name)?));
                }
                let built = PartitionedAssembly::new(&id.0, elements)
                    .map_err(|e| self.fail(id.1, format!("assembly '{}': {e}", id.0)))?;
                self.ws.assemblies.insert(id.0, built);
            }
            Decl::AssemblySquare { id, of } => {
                self.fresh(&self.ws.assemblies, &id, "assembly")?;
                let base = self.assembly(&of)?.clone();
                self.ws.assemblies.insert(id.0, asm::product(&base, &base).object);
            }
            Decl::Morphism { id, source, target, realizer, pairs } => {
                self.fresh(&self.ws.morphisms, &id, "morphism")?;
                let src_asm = self.assembly(&source)?.clone();
                let tgt_asm = self.assembly(&target)?.clone();
                let realizer = self.term(&realizer)?;
                let mut map = BTreeMap::new();
                for (from, to) in &pairs {
                    if map.insert(from.0.clone(), to.0.clone()).is_some() {
                        return Err(
                            self.fail(from.1, format!("duplicate mapping for '{}'", from.0))
                        );
                    }
                }
                let built = AsmMorphism::new(&id.0, src_asm, tgt_asm, map, realizer)
                    .map_err(|e| self.fail(id.1, format!("morphism '{}': {e}", id.0)))?;
                self.ws.morphisms.insert(id.0, built);
            }
            Decl::BasePred { id, on, rows } => {
                self.fresh(&self.ws.base_preds, &id, "base-predicate")?;
                let base = self.assembly(&on)?.clone();
                let mut values = PredValues::new();
                for (elem, set) in &rows {
                    values.insert(elem.0.clone(), self.term_set(set)?);
                }
                let built = BasePredicate::new(base, values)
                    .map_err(|e| self.fail(id.1, format!("base-predicate '{}': {e}", id.0)))?;
                self.ws.base_preds.insert(id.0, built);
            }
            Decl::IrPred { id, display, values } => {
                self.fresh(&self.ws.ir_preds, &id, "ir-predicate")?;
                let display = self.morphism(&display)?.clone();
                let mut pred_values = PredValues::new();
                for (elem, set) in &values {
                    pred_values.insert(elem.0.clone(), self.term_set(set)?);
                }
                let alpha = BasePredicate::new(display.source().clone(), pred_values)
                    .map_err(|e| self.fail(id.1, format!("ir-predicate '{}': {e}", id.0)))?;
                let built = IrPredicate::new(display, alpha)
                    .map_err(|e| self.fail(id.1, format!("ir-predicate '{}': {e}", id.0)))?;
                self.ws.ir_preds.insert(id.0, built);
            }
            Decl::EwPred { id, on, entries } => {
                self.fresh(&self.ws.ew_preds, &id, "ew-predicate")?;
                let base = match &on {
                    BaseRef::Plain(sp) => self.assembly(sp)?.clone(),
                    BaseRef::Square(sp) => {
                        let b = self.assembly(sp)?;
                        asm::product(b, b).object
                    }
                };
                let mut built_entries = Vec::new();
                for (elem, tag, family) in &entries {
                    let tag = self.term(tag)?;
                    let mut sets = std::collections::BTreeSet::new();
                    for set in family {
                        sets.insert(self.term_set(set)?);
                    }
                    built_entries.push(((elem.0.clone(), tag), sets));
                }
                let pca = self.ws.pca.clone();
                let built = EwPredicate::new(base, built_entries, &pca)
                    .map_err(|e| self.fail(id.1, format!("ew-predicate '{}': {e}", id.0)))?;
                self.ws.ew_preds.insert(id.0, built);
            }
            Decl::Witness { id, kind } => {
                self.fresh(&self.ws.witnesses, &id, "witness")?;
                let built = match kind {
                    WitnessAst::Eir { hbar } => WitnessDecl::Eir(self.term(&hbar)?),
                    WitnessAst::Ir { mediator, ell } => WitnessDecl::Ir(IrWitness {
                        mediator: self.morphism(&mediator)?.clone(),
                        ell: self.term(&ell)?,
                    }),
                    WitnessAst::Ew { ell1, ell2 } => WitnessDecl::Ew(EwWitness {
                        ell1: self.term(&ell1)?,
                        ell2: self.term(&ell2)?,
                    }),
                };
                self.ws.witnesses.insert(id.0, built);
            }
            Decl::Universe { id, values, realizers } => {
                self.fresh(&self.ws.universes, &id, "universe")?;
                let mut built_values = Vec::new();
                for set in &values {
                    built_values.push(self.term_set(set)?);
                }
                let mut built_realizers = Vec::new();
                for sp in &realizers {
                    built_realizers.push(self.term(sp)?);
                }
                self.ws
                    .universes
                    .insert(id.0, ImplicationUniverse::new(built_values, built_realizers));
            }
            Decl::ToposObject { id, base, rho } => {
                self.fresh(&self.ws.topos_objects, &id, "topos-object")?;
                let base_asm = self.assembly(&base)?.clone();
                let rho_pred = self
                    .ws
                    .ew_preds
                    .get(&rho.0)
                    .ok_or_else(|| self.fail(rho.1, format!("unknown ew-predicate id '{}'", rho.0)))?
                    .clone();
                let built = ToposObject::new(base_asm, rho_pred)
                    .map_err(|e| self.fail(id.1, format!("topos-object '{}': {e}", id.0)))?;
                self.ws.topos_objects.insert(id.0, built);
            }
            Decl::ToposArrow { id, source, target, phi, certificates } => {
                self.fresh(&self.ws.topos_arrows, &id, "topos-arrow")?;
                let source_obj = self
                    .ws
                    .topos_objects
                    .get(&source.0)
                    .ok_or_else(|| {
                        self.fail(source.1, format!("unknown topos-object id '{}'", source.0))
                    })?
                    .clone();
                let target_obj = self
                    .ws
                    .topos_objects
                    .get(&target.0)
                    .ok_or_else(|| {
                        self.fail(target.1, format!("unknown topos-object id '{}'", target.0))
                    })?
                    .clone();
                let phi_pred = self
                    .ws
                    .ew_preds
                    .get(&phi.0)
                    .ok_or_else(|| self.fail(phi.1, format!("unknown ew-predicate id '{}'", phi.0)))?
                    .clone();
                let built = match certificates {
                    None => ArrowDecl::Pending {
                        source: source.0.clone(),
                        target: target.0.clone(),
                        phi: phi.0.clone(),
                    },
                    Some(ids) => {
                        if ids.len() != 5 {
                            let pos = ids.first().map(|sp| sp.1).unwrap_or(id.1);
                            return Err(self.fail(
                                pos,
                                format!("expected 5 certificate ids, found {}", ids.len()),
                            ));
                        }
                        let mut conditions = Vec::new();
                        for sp in &ids {
                            match self.ws.witnesses.get(&sp.0) {
                                Some(WitnessDecl::Ew(w)) => conditions.push(EwWitness {
                                    ell1: w.ell1.clone(),
                                    ell2: w.ell2.clone(),
                                }),
                                Some(_) => {
                                    return Err(self.fail(
                                        sp.1,
                                        format!("witness '{}' is not an extW witness", sp.0),
                                    ))
                                }
                                None => {
                                    return Err(self
                                        .fail(sp.1, format!("unknown witness id '{}'", sp.0)))
                                }
                            }
                        }
                        let conditions: [EwWitness; 5] =
                            conditions.try_into().expect("length checked above");
                        let arrow = ToposArrow::new(
                            source_obj,
                            target_obj,
                            phi_pred,
                            ArrowCertificates { conditions },
                        )
                        .map_err(|e| self.fail(id.1, format!("topos-arrow '{}': {e}", id.0)))?;
                        ArrowDecl::Complete(Box::new(arrow))
                    }
                };
                self.ws.topos_arrows.insert(id.0, built);
            }
        }
        Ok(())
    }
}

/// Parse and build a workspace. `fuel_override` (the `--fuel` flag) takes
/// effect before any fuel-dependent validation runs.
pub fn parse_workspace(src: &str, fuel_override: Option<u64>) -> Result<Workspace, WsError> {
    let toks = lex(src)?;
    let mut parser = Parser { src, toks, i: 0 };
    let mut decls = Vec::new();
    while parser.peek().is_some() {
        decls.push(parser.parse_decl()?);
    }

    // First pass: pca and config set the context everything else builds in.
    let mut ws = Workspace::default();
    let mut saw_pca = false;
    for decl in &decls {
        match decl {
            Decl::Pca { fuel, oracles, pos } => {
                if saw_pca {
                    return Err(err_at(src, *pos, "duplicate pca block"));
                }
                saw_pca = true;
                if let Some(f) = fuel {
                    ws.pca.fuel = *f;
                }
                for (name, table) in oracles {
                    ws.pca.oracles.insert(name.clone(), table.clone());
                }
            }
            Decl::Config { entries } => {
                for (key, value, pos) in entries {
                    match key.as_str() {
                        "seed" => ws.seed = *value,
                        "pool-size" => ws.pool_size = *value as usize,
                        other => {
                            return Err(err_at(src, *pos, format!("unknown config key '{other}'")))
                        }
                    }
                }
            }
            _ => {}
        }
    }
    if let Some(f) = fuel_override {
        ws.pca.fuel = f;
    }

    let mut builder = Builder { src, ws };
    for decl in decls {
        if matches!(decl, Decl::Pca { .. } | Decl::Config { .. }) {
            continue;
        }
        builder.build(decl)?;
    }
    Ok(builder.ws)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse_err(src: &str) -> WsError {
        match parse_workspace(src, None) {
            Ok(_) => panic!("expected a parse error for: {src}"),
            Err(e) => e,
        }
    }

    #[test]
    fn empty_workspace_with_only_a_pca_block_is_valid() {
        let ws = parse_workspace("pca { fuel 500 }", None).expect("valid");
        assert_eq!(ws.pca.fuel, 500);
        assert!(ws.assemblies.is_empty());
    }

    #[test]
    fn a_fully_populated_workspace_builds() {
        let src = r#"
            # everything in one file
            pca { fuel 10000 oracle step { 0 -> 1, 1 -> 2 } }
            config { seed 7 pool-size 4 }
            term id = [S K K]
            assembly X {
                x1 : [K]
                x2 : [S]
            }
            assembly SQ = square X
            morphism d : X -> X { realizer [id] x1 -> x1, x2 -> x2 }
            base-predicate alpha on X {
                x1 : { [K], [S K] }
                x2 : { }
            }
            ir-predicate p {
                display d
                values { x1 : { [K] } }
            }
            ew-predicate g on X {
                at x1 tag [K] { { [K] }, { } }
            }
            ew-predicate rho on square X {
                at (x1,x1) tag [<K,K>] { { } }
            }
            witness refl { kind extW ell1 [\x. p2 x] ell2 [p2] }
            witness w { kind iR mediator d ell [p2] }
            witness hb { kind eiR hbar [p1] }
            universe U { values { { [K] }, { } } realizers { [p2], [K] } }
            topos-object O { base X rho rho }
            topos-arrow a { source O target O phi rho }
        "#;
        let ws = parse_workspace(src, None).expect("valid workspace");
        assert_eq!(ws.seed, 7);
        assert_eq!(ws.pool_size, 4);
        assert_eq!(ws.terms["id"], ewlab::term::i());
        assert_eq!(ws.assemblies["SQ"].len(), 4);
        assert!(matches!(ws.witnesses["refl"], WitnessDecl::Ew(_)));
        assert!(matches!(ws.topos_arrows["a"], ArrowDecl::Pending { .. }));
        assert_eq!(ws.pca.oracles["step"][&1], 2);
    }

    #[test]
    fn duplicate_assembly_ids_are_rejected_by_name() {
        let src = "assembly X { x1 : [K] }\nassembly X { x2 : [S] }";
        let e = parse_err(src);
        assert_eq!(e.line, 2);
        assert!(e.msg.contains("duplicate assembly id 'X'"), "{}", e.msg);
    }

    #[test]
    fn dangling_references_are_rejected_by_name() {
        let src = "morphism f : X -> X { realizer [p1] }";
        let e = parse_err(src);
        assert!(e.msg.contains("unknown assembly id 'X'"), "{}", e.msg);
    }

    #[test]
    fn witness_referencing_an_undefined_term_is_an_error() {
        let src = "witness w { kind eiR hbar [undefined_name] }";
        let e = parse_err(src);
        assert!(e.msg.contains("undefined_name"), "{}", e.msg);
    }

    #[test]
    fn term_errors_carry_workspace_positions() {
        let src = "term bad = [S K)]";
        let e = parse_err(src);
        assert_eq!(e.line, 1);
        assert!(e.col > 12, "column {} should point inside the bracket", e.col);
    }

    #[test]
    fn fuel_override_wins_over_the_pca_block() {
        let ws = parse_workspace("pca { fuel 500 }", Some(77)).expect("valid");
        assert_eq!(ws.pca.fuel, 77);
    }

    #[test]
    fn unknown_sections_and_config_keys_are_rejected() {
        assert!(parse_workspace("frobnicate Y { }", None).is_err());
        let e = parse_err("config { volume 11 }");
        assert!(e.msg.contains("volume"), "{}", e.msg);
    }
}
