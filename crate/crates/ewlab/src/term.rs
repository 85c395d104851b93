//! Closed combinator terms over S, K and named oracle atoms, together with
//! the reduction relation that turns them into a partial combinatory algebra.
//!
//! Reduction is deterministic leftmost-outermost rewriting. A term counts as
//! a *value* when no redex remains anywhere and no oracle atom sits applied
//! to an argument outside its table. Application in the algebra is
//! `a · b := reduce(a b)`; equality of elements is syntactic equality of
//! values. Oracle-free terms form the elementary sub-algebra used for
//! witnesses; oracle atoms only ever rewrite on numeral arguments listed in
//! their table, so applying one to anything else is *definitely* undefined
//! (`Stuck`), not merely out of fuel.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use once_cell::sync::Lazy;

/// A closed combinator term. Application associates to the left.
///
/// The derived `Ord` (K, then S, then oracles, then applications, comparing
/// applications lexicographically) is the tie-break inside the size-ordered
/// term enumerations, so variant order here is load-bearing.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    K,
    S,
    /// A named oracle atom; its rewrite table lives in [`PcaSpec`].
    Oracle(String),
    App(Arc<Term>, Arc<Term>),
}

impl Term {
    pub fn app(f: Term, a: Term) -> Term {
        Term::App(Arc::new(f), Arc::new(a))
    }

    /// Left-nested application `f a1 a2 ... an`.
    pub fn apps(f: Term, args: &[Term]) -> Term {
        args.iter().fold(f, |acc, a| Term::app(acc, a.clone()))
    }

    pub fn oracle(name: &str) -> Term {
        Term::Oracle(name.to_string())
    }

    /// Number of atoms (leaves); the size measure used by the term pools.
    pub fn size(&self) -> usize {
        match self {
            Term::App(f, a) => f.size() + a.size(),
            _ => 1,
        }
    }

    /// True iff the term mentions no oracle atom, i.e. it belongs to the
    /// elementary sub-algebra from which witnesses must be drawn.
    pub fn oracle_free(&self) -> bool {
        match self {
            Term::Oracle(_) => false,
            Term::App(f, a) => f.oracle_free() && a.oracle_free(),
            _ => true,
        }
    }

    /// Splits `h t1 ... tn` into head `h` and arguments `[t1, ..., tn]`.
    fn spine(&self) -> (&Term, Vec<&Term>) {
        let mut head = self;
        let mut args = Vec::new();
        while let Term::App(f, a) = head {
            args.push(a.as_ref());
            head = f.as_ref();
        }
        args.reverse();
        (head, args)
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::syntax::print_term(self))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::syntax::print_term(self))
    }
}

/// Oracle tables and the default step budget for reductions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PcaSpec {
    /// oracle name -> (numeral argument -> numeral result)
    pub oracles: BTreeMap<String, BTreeMap<u64, u64>>,
    pub fuel: u64,
}

pub const DEFAULT_FUEL: u64 = 10_000;

impl Default for PcaSpec {
    /// Oracle-free with the standard step budget (a zero budget would make
    /// every nontrivial check come back unknown).
    fn default() -> Self {
        PcaSpec::plain()
    }
}

impl PcaSpec {
    pub fn plain() -> Self {
        PcaSpec { oracles: BTreeMap::new(), fuel: DEFAULT_FUEL }
    }

    pub fn with_oracle(mut self, name: &str, table: &[(u64, u64)]) -> Self {
        self.oracles.insert(name.to_string(), table.iter().copied().collect());
        self
    }
}

/// Result of fuel-bounded reduction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Reduction {
    /// Reached a value within the step budget.
    Converged { value: Term, steps: u64 },
    /// Hit an oracle applied to an irreducible argument outside its table.
    /// This is a definite non-value, not a fuel artifact.
    Stuck { term: Term, steps: u64 },
    /// Still reducible after spending the whole budget.
    FuelExhausted { partial: Term },
}

impl Reduction {
    pub fn converged(&self) -> Option<&Term> {
        match self {
            Reduction::Converged { value, .. } => Some(value),
            _ => None,
        }
    }

    pub fn is_converged(&self) -> bool {
        matches!(self, Reduction::Converged { .. })
    }
}

enum Step {
    Reduced(Term),
    Stuck,
    Value,
}

/// Contracts the leftmost-outermost redex, if any. Oracle heads force their
/// first argument before consulting the table; an irreducible argument with
/// no table entry poisons the whole term as `Stuck`.
fn step(t: &Term, pca: &PcaSpec) -> Step {
    let (head, args) = t.spine();
    match head {
        Term::K if args.len() >= 2 => {
            Step::Reduced(Term::apps(args[0].clone(), &clone_args(&args[2..])))
        }
        Term::S if args.len() >= 3 => {
            let contractum = Term::app(
                Term::app(args[0].clone(), args[2].clone()),
                Term::app(args[1].clone(), args[2].clone()),
            );
            Step::Reduced(Term::apps(contractum, &clone_args(&args[3..])))
        }
        Term::Oracle(name) => {
            if args.is_empty() {
                return Step::Value;
            }
            match step(args[0], pca) {
                Step::Reduced(a0) => Step::Reduced(rebuild(head, &args, 0, a0)),
                Step::Stuck => Step::Stuck,
                Step::Value => {
                    let fired = decode_numeral(args[0])
                        .and_then(|m| pca.oracles.get(name).and_then(|tab| tab.get(&m)))
                        .copied();
                    match fired {
                        Some(k) => {
                            Step::Reduced(Term::apps(numeral(k), &clone_args(&args[1..])))
                        }
                        None => Step::Stuck,
                    }
                }
            }
        }
        _ => {
            // Underapplied S or K: scan arguments left to right.
            for (i, arg) in args.iter().enumerate() {
                match step(arg, pca) {
                    Step::Reduced(a) => return Step::Reduced(rebuild(head, &args, i, a)),
                    Step::Stuck => return Step::Stuck,
                    Step::Value => {}
                }
            }
            Step::Value
        }
    }
}

fn clone_args(args: &[&Term]) -> Vec<Term> {
    args.iter().map(|a| (*a).clone()).collect()
}

fn rebuild(head: &Term, args: &[&Term], at: usize, replacement: Term) -> Term {
    let mut out = head.clone();
    for (i, arg) in args.iter().enumerate() {
        out = Term::app(out, if i == at { replacement.clone() } else { (*arg).clone() });
    }
    out
}

/// Performs at most `fuel` contractions. Deterministic: equal inputs give
/// equal outcomes, and a converged result is stable under any larger budget.
pub fn reduce(t: &Term, pca: &PcaSpec, fuel: u64) -> Reduction {
    let mut cur = t.clone();
    let mut steps = 0u64;
    loop {
        match step(&cur, pca) {
            Step::Value => return Reduction::Converged { value: cur, steps },
            Step::Stuck => return Reduction::Stuck { term: cur, steps },
            Step::Reduced(next) => {
                if steps == fuel {
                    return Reduction::FuelExhausted { partial: cur };
                }
                steps += 1;
                cur = next;
            }
        }
    }
}

/// `a · b` in the algebra, under the spec's own step budget.
pub fn apply(a: &Term, b: &Term, pca: &PcaSpec) -> Reduction {
    reduce(&Term::app(a.clone(), b.clone()), pca, pca.fuel)
}

/// `a · b1 · ... · bn`, under the spec's own step budget.
pub fn apply_many(a: &Term, bs: &[Term], pca: &PcaSpec) -> Reduction {
    reduce(&Term::apps(a.clone(), bs), pca, pca.fuel)
}

/// True iff the term is a value under `pca`.
pub fn is_value(t: &Term, pca: &PcaSpec) -> bool {
    matches!(step(t, pca), Step::Value)
}

// ---------------------------------------------------------------------------
// Bracket abstraction and the lambda front end
// ---------------------------------------------------------------------------

/// Combinator term with free variables, the intermediate form of
/// [`bracket_abstract`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OpenTerm {
    Var(String),
    Const(Term),
    App(Box<OpenTerm>, Box<OpenTerm>),
}

impl OpenTerm {
    pub fn app(f: OpenTerm, a: OpenTerm) -> OpenTerm {
        OpenTerm::App(Box::new(f), Box::new(a))
    }

    pub fn closed(&self) -> Option<Term> {
        match self {
            OpenTerm::Var(_) => None,
            OpenTerm::Const(t) => Some(t.clone()),
            OpenTerm::App(f, a) => Some(Term::app(f.closed()?, a.closed()?)),
        }
    }
}

/// The four abstraction clauses:
/// `[x]x = S K K`, `[x]y = K y`, `[x]c = K c`, `[x](t u) = S ([x]t) ([x]u)`.
pub fn bracket_abstract(var: &str, body: &OpenTerm) -> OpenTerm {
    match body {
        OpenTerm::Var(y) if y == var => OpenTerm::Const(i()),
        OpenTerm::Var(_) => OpenTerm::app(OpenTerm::Const(Term::K), body.clone()),
        OpenTerm::Const(_) => OpenTerm::app(OpenTerm::Const(Term::K), body.clone()),
        OpenTerm::App(f, a) => OpenTerm::app(
            OpenTerm::app(OpenTerm::Const(Term::S), bracket_abstract(var, f)),
            bracket_abstract(var, a),
        ),
    }
}

/// Lambda expressions compiled to combinator terms. `Const` embeds an
/// already-built term as an opaque constant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LambdaExpr {
    Var(String),
    Const(Term),
    App(Box<LambdaExpr>, Box<LambdaExpr>),
    Abs(String, Box<LambdaExpr>),
}

impl LambdaExpr {
    pub fn var(name: &str) -> LambdaExpr {
        LambdaExpr::Var(name.to_string())
    }

    pub fn app(f: LambdaExpr, a: LambdaExpr) -> LambdaExpr {
        LambdaExpr::App(Box::new(f), Box::new(a))
    }

    pub fn apps(f: LambdaExpr, args: Vec<LambdaExpr>) -> LambdaExpr {
        args.into_iter().fold(f, LambdaExpr::app)
    }

    pub fn abs(var: &str, body: LambdaExpr) -> LambdaExpr {
        LambdaExpr::Abs(var.to_string(), Box::new(body))
    }

    /// `⟨a, b⟩`. Two closed components fold straight into the pair value,
    /// so printed pair values parse back to themselves; anything containing
    /// a free variable stays an application of the pairing combinator.
    pub fn pair(a: LambdaExpr, b: LambdaExpr) -> LambdaExpr {
        match (compile(&a), compile(&b)) {
            (Ok(x), Ok(y)) => LambdaExpr::Const(pair_of(&x, &y)),
            _ => LambdaExpr::apps(LambdaExpr::Const(pair_c()), vec![a, b]),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            LambdaExpr::Var(_) | LambdaExpr::Const(_) => 1,
            LambdaExpr::App(f, a) => 1 + f.depth().max(a.depth()),
            LambdaExpr::Abs(_, b) => 1 + b.depth(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CompileError {
    #[error("unbound variable `{0}`")]
    Unbound(String),
}

/// Compiles a closed lambda expression by abstracting binders inside out.
/// The output of each clause is redex-free, so compiled terms are values
/// whenever their embedded constants are.
pub fn compile(e: &LambdaExpr) -> Result<Term, CompileError> {
    fn go(e: &LambdaExpr) -> OpenTerm {
        match e {
            LambdaExpr::Var(x) => OpenTerm::Var(x.clone()),
            LambdaExpr::Const(t) => OpenTerm::Const(t.clone()),
            LambdaExpr::App(f, a) => OpenTerm::app(go(f), go(a)),
            LambdaExpr::Abs(x, b) => bracket_abstract(x, &go(b)),
        }
    }
    let open = go(e);
    open.closed().ok_or_else(|| match first_var(&open) {
        Some(v) => CompileError::Unbound(v),
        None => unreachable!("closed() failed without a variable"),
    })
}

fn first_var(t: &OpenTerm) -> Option<String> {
    match t {
        OpenTerm::Var(v) => Some(v.clone()),
        OpenTerm::Const(_) => None,
        OpenTerm::App(f, a) => first_var(f).or_else(|| first_var(a)),
    }
}

// ---------------------------------------------------------------------------
// Derived combinators, pairs, numerals
// ---------------------------------------------------------------------------

/// Compile `λ vars. body`, which must be closed once the binders are in
/// scope.
pub fn lam(vars: &[&str], body: LambdaExpr) -> Term {
    let e = vars.iter().rev().fold(body, |b, v| LambdaExpr::abs(v, b));
    compile(&e).expect("closed by construction")
}

static I: Lazy<Term> = Lazy::new(|| Term::apps(Term::S, &[Term::K, Term::K]));
static FALSE: Lazy<Term> =
    Lazy::new(|| lam(&["x", "y"], LambdaExpr::var("y")));
static PAIR: Lazy<Term> = Lazy::new(|| {
    lam(
        &["x", "y", "z"],
        LambdaExpr::apps(LambdaExpr::var("z"), vec![LambdaExpr::var("x"), LambdaExpr::var("y")]),
    )
});
static P1: Lazy<Term> = Lazy::new(|| {
    lam(&["c"], LambdaExpr::app(LambdaExpr::var("c"), LambdaExpr::Const(true_c())))
});
static P2: Lazy<Term> = Lazy::new(|| {
    lam(&["c"], LambdaExpr::app(LambdaExpr::var("c"), LambdaExpr::Const(false_c())))
});
static CASE: Lazy<Term> = Lazy::new(|| {
    lam(
        &["b", "x", "y"],
        LambdaExpr::apps(LambdaExpr::var("b"), vec![LambdaExpr::var("x"), LambdaExpr::var("y")]),
    )
});
static SWAP: Lazy<Term> = Lazy::new(|| {
    lam(
        &["c"],
        LambdaExpr::pair(
            LambdaExpr::app(LambdaExpr::Const(p2_c()), LambdaExpr::var("c")),
            LambdaExpr::app(LambdaExpr::Const(p1_c()), LambdaExpr::var("c")),
        ),
    )
});

/// `S K K`, the identity.
pub fn i() -> Term {
    I.clone()
}

/// `K`, doubling as the left tag of `⊕` and the numeral-zero marker.
pub fn true_c() -> Term {
    Term::K
}

/// `K (S K K)`, the right tag.
pub fn false_c() -> Term {
    FALSE.clone()
}

pub fn pair_c() -> Term {
    PAIR.clone()
}

pub fn p1_c() -> Term {
    P1.clone()
}

pub fn p2_c() -> Term {
    P2.clone()
}

/// Tag dispatcher: `case t a b` reduces to `a` when `t` is the left tag and
/// to `b` when it is the right tag, evaluating only the taken branch.
pub fn case_c() -> Term {
    CASE.clone()
}

/// Pair transposition: `swap ⟨a,b⟩` reduces to `⟨b,a⟩`.
pub fn swap_c() -> Term {
    SWAP.clone()
}

/// The value of `pair a b` for values `a`, `b`: `S (S (S K K) (K a)) (K b)`.
/// Built directly; agreement with reducing `pair a b` is covered by tests.
pub fn pair_of(a: &Term, b: &Term) -> Term {
    Term::app(
        Term::app(Term::S, Term::app(Term::app(Term::S, i()), Term::app(Term::K, a.clone()))),
        Term::app(Term::K, b.clone()),
    )
}

/// Inverts [`pair_of`] on the exact value shape.
pub fn decode_pair(t: &Term) -> Option<(&Term, &Term)> {
    // S (S (S K K) (K a)) (K b)
    let (s1, kb) = match t {
        Term::App(f, kb) => (f.as_ref(), kb.as_ref()),
        _ => return None,
    };
    let (s2, inner) = match s1 {
        Term::App(f, inner) if matches!(f.as_ref(), Term::S) => (f.as_ref(), inner.as_ref()),
        _ => return None,
    };
    let _ = s2;
    let (si, ka) = match inner {
        Term::App(f, ka) => (f.as_ref(), ka.as_ref()),
        _ => return None,
    };
    let (s3, id) = match si {
        Term::App(f, id) if matches!(f.as_ref(), Term::S) => (f.as_ref(), id.as_ref()),
        _ => return None,
    };
    let _ = s3;
    if *id != i() {
        return None;
    }
    let a = match ka {
        Term::App(k, a) if matches!(k.as_ref(), Term::K) => a.as_ref(),
        _ => return None,
    };
    let b = match kb {
        Term::App(k, b) if matches!(k.as_ref(), Term::K) => b.as_ref(),
        _ => return None,
    };
    Some((a, b))
}

/// Scott-style numeral: `num 0 = <true, I>`, `num (n+1) = <false, num n>`.
pub fn numeral(n: u64) -> Term {
    let mut t = pair_of(&true_c(), &i());
    for _ in 0..n {
        t = pair_of(&false_c(), &t);
    }
    t
}

pub fn decode_numeral(t: &Term) -> Option<u64> {
    let mut n = 0u64;
    let mut cur = t;
    loop {
        let (tag, rest) = decode_pair(cur)?;
        if *tag == true_c() {
            return if *rest == i() { Some(n) } else { None };
        }
        if *tag != false_c() {
            return None;
        }
        n += 1;
        cur = rest;
    }
}

pub type TermSet = BTreeSet<Term>;

/// `X ⊗ Y = { <x, y> | x ∈ X, y ∈ Y }`.
pub fn otimes(xs: &TermSet, ys: &TermSet) -> TermSet {
    let mut out = TermSet::new();
    for x in xs {
        for y in ys {
            out.insert(pair_of(x, y));
        }
    }
    out
}

/// `X ⊕ Y = ({true} ⊗ X) ∪ ({false} ⊗ Y)`, the tagged disjoint union.
pub fn oplus(xs: &TermSet, ys: &TermSet) -> TermSet {
    let mut out = TermSet::new();
    for x in xs {
        out.insert(pair_of(&true_c(), x));
    }
    for y in ys {
        out.insert(pair_of(&false_c(), y));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plain() -> PcaSpec {
        PcaSpec::plain()
    }

    fn nf(t: &Term) -> Term {
        match reduce(t, &plain(), DEFAULT_FUEL) {
            Reduction::Converged { value, .. } => value,
            other => panic!("expected convergence, got {other:?}"),
        }
    }

    #[test]
    fn k_discards_second_argument() {
        let r = reduce(&Term::apps(Term::K, &[Term::K, Term::S]), &plain(), 10);
        assert_eq!(r, Reduction::Converged { value: Term::K, steps: 1 });
    }

    #[test]
    fn skk_is_identity() {
        let r = reduce(&Term::apps(Term::S, &[Term::K, Term::K, Term::S]), &plain(), 10);
        match r {
            Reduction::Converged { value, .. } => assert_eq!(value, Term::S),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn s_redex_duplicates_argument() {
        // S K S K -> K K (S K) -> K
        let t = Term::apps(Term::S, &[Term::K, Term::S, Term::K]);
        assert_eq!(nf(&t), Term::K);
    }

    #[test]
    fn fuel_exhaustion_on_omega() {
        // (S I I) (S I I) loops forever.
        let sii = Term::apps(Term::S, &[i(), i()]);
        let omega = Term::app(sii.clone(), sii);
        match reduce(&omega, &plain(), 200) {
            Reduction::FuelExhausted { .. } => {}
            other => panic!("expected fuel exhaustion, got {other:?}"),
        }
    }

    #[test]
    fn converged_results_are_fuel_monotone() {
        let t = Term::apps(Term::S, &[Term::K, Term::K, Term::apps(Term::K, &[Term::S, Term::K])]);
        let small = reduce(&t, &plain(), 10);
        let big = reduce(&t, &plain(), 10_000);
        assert_eq!(small, big);
    }

    #[test]
    fn oracle_fires_on_table_entry() {
        let pca = plain().with_oracle("f", &[(0, 3)]);
        let t = Term::app(Term::oracle("f"), numeral(0));
        match reduce(&t, &pca, 100) {
            Reduction::Converged { value, .. } => assert_eq!(value, numeral(3)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn oracle_reduces_argument_first() {
        let pca = plain().with_oracle("f", &[(1, 2)]);
        // f (K num1 S) -> f num1 -> num2
        let t = Term::app(Term::oracle("f"), Term::apps(Term::K, &[numeral(1), Term::S]));
        match reduce(&t, &pca, 100) {
            Reduction::Converged { value, .. } => assert_eq!(value, numeral(2)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn oracle_is_stuck_outside_table() {
        let pca = plain().with_oracle("f", &[(0, 0)]);
        let miss = Term::app(Term::oracle("f"), numeral(7));
        assert!(matches!(reduce(&miss, &pca, 100), Reduction::Stuck { .. }));
        let non_numeral = Term::app(Term::oracle("f"), Term::K);
        assert!(matches!(reduce(&non_numeral, &pca, 100), Reduction::Stuck { .. }));
    }

    #[test]
    fn head_redex_discards_stuck_branch() {
        let pca = plain().with_oracle("f", &[]);
        // K S (f K) drops the stuck argument before looking at it.
        let t = Term::apps(Term::K, &[Term::S, Term::app(Term::oracle("f"), Term::K)]);
        match reduce(&t, &pca, 100) {
            Reduction::Converged { value, .. } => assert_eq!(value, Term::S),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bracket_abstract_self_application() {
        let body = OpenTerm::app(OpenTerm::Var("x".into()), OpenTerm::Var("x".into()));
        let out = bracket_abstract("x", &body);
        let expected = OpenTerm::app(
            OpenTerm::app(OpenTerm::Const(Term::S), OpenTerm::Const(i())),
            OpenTerm::Const(i()),
        );
        assert_eq!(out, expected);
    }

    #[test]
    fn compile_identity() {
        let t = compile(&LambdaExpr::abs("x", LambdaExpr::var("x"))).unwrap();
        assert_eq!(t, i());
    }

    #[test]
    fn compile_rejects_unbound() {
        let e = LambdaExpr::abs("x", LambdaExpr::var("y"));
        assert_eq!(compile(&e), Err(CompileError::Unbound("y".into())));
    }

    #[test]
    fn compiled_k_behaves_as_k() {
        let t = lam(&["x", "y"], LambdaExpr::var("x"));
        let r = apply_many(&t, &[Term::S, Term::K], &plain());
        assert_eq!(r.converged(), Some(&Term::S));
    }

    #[test]
    fn projections_invert_pairing() {
        let a = Term::apps(Term::S, &[Term::K]);
        let b = Term::K;
        let p = nf(&Term::apps(pair_c(), &[a.clone(), b.clone()]));
        assert_eq!(p, pair_of(&a, &b));
        assert_eq!(apply(&p1_c(), &p, &plain()).converged(), Some(&a));
        assert_eq!(apply(&p2_c(), &p, &plain()).converged(), Some(&b));
    }

    #[test]
    fn decode_pair_matches_pair_of() {
        let a = Term::app(Term::K, Term::S);
        let b = i();
        let p = pair_of(&a, &b);
        let (x, y) = decode_pair(&p).unwrap();
        assert_eq!((x, y), (&a, &b));
        assert_eq!(decode_pair(&Term::K), None);
    }

    #[test]
    fn case_selects_branch_lazily() {
        let sii = Term::apps(Term::S, &[i(), i()]);
        let omega = Term::app(sii.clone(), sii);
        // case true K omega must not touch omega.
        let t = Term::apps(case_c(), &[true_c(), Term::K, omega]);
        assert_eq!(nf(&t), Term::K);
        let t = Term::apps(case_c(), &[false_c(), Term::S, Term::K]);
        assert_eq!(nf(&t), Term::K);
    }

    #[test]
    fn numerals_decode() {
        for n in 0..6 {
            assert_eq!(decode_numeral(&numeral(n)), Some(n));
        }
        assert_eq!(decode_numeral(&pair_of(&Term::S, &Term::K)), None);
        assert_eq!(decode_numeral(&Term::K), None);
    }

    #[test]
    fn oplus_tags_are_disjoint() {
        let xs: TermSet = [Term::K].into_iter().collect();
        let ys: TermSet = [Term::K, Term::S].into_iter().collect();
        let sum = oplus(&xs, &ys);
        assert_eq!(sum.len(), 3);
        for t in &sum {
            let (tag, _) = decode_pair(t).unwrap();
            assert!(*tag == true_c() || *tag == false_c());
        }
    }

    #[test]
    fn otimes_forms_all_pairs() {
        let xs: TermSet = [Term::K, Term::S].into_iter().collect();
        let ys: TermSet = [i()].into_iter().collect();
        assert_eq!(otimes(&xs, &ys).len(), 2);
    }

    #[test]
    fn oracle_free_detects_atoms() {
        assert!(pair_c().oracle_free());
        assert!(!Term::app(Term::K, Term::oracle("f")).oracle_free());
    }
}
