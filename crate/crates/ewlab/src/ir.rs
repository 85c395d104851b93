//! The instance doctrine: predicates presented by display morphisms.
//!
//! A predicate over a partitioned assembly `(X,φ)` is a pair of a display
//! morphism `f : (Y,ψ) → (X,φ)` and a base predicate `α` over its source.
//! `(f,α) ≤ (g,β)` holds when a morphism `h` with `f = g∘h` and an
//! oracle-free term `ℓ` satisfy `ℓ·⟨ψ(y), q⟩ ∈ α(y)` for every `y` and every
//! `q ∈ β(h(y))`. This file implements the order checker plus the structure
//! that makes the fibres Heyting algebras with quantifiers along morphisms:
//!
//! * reindexing by pullback of the display, existentials by composition;
//! * `⊤` (identity display, empty values), `⊥` (empty source), binary meet
//!   (pullback of displays, tagged union of values) and join (coproduct of
//!   sources, case analysis);
//! * implication via a finite approximation of the fibrewise function-space
//!   object whose elements are tuples `(x, k, R, r, l)`, with currying and
//!   uncurrying that build the required tuples explicitly;
//! * universal quantification via tuples `(x, k, e)` of realized sections,
//!   with the two mates of the adjunction;
//! * classification of a predicate by its canonical form, the desk-scale
//!   face of the generic element.
//!
//! The function-space and section carriers are finite approximations cut out
//! by an explicit universe of candidate value-sets and realizers. Operations
//! that need a missing tuple fail with a precise error naming it; callers
//! extend the universe with the reported data and rebuild. The realizers
//! living *inside* those tuples may mention oracles; order witnesses and
//! morphism realizers never may.

use std::collections::BTreeMap;

use crate::asm::{
    self, enumerate_maps, pair_id, AsmMorphism, ElemId, PartitionedAssembly, PredValues,
};
use crate::eir::{BasePredicate, DoctrineError};
use crate::pool::TermPool;
use crate::term::{self, lam, LambdaExpr, PcaSpec, Reduction, Term, TermSet};
use crate::Verdict;

/// A doctrine predicate: a display morphism with a base predicate over its
/// source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IrPredicate {
    display: AsmMorphism,
    alpha: BasePredicate,
}

impl IrPredicate {
    pub fn new(display: AsmMorphism, alpha: BasePredicate) -> Result<Self, DoctrineError> {
        if alpha.base() != display.source() {
            return Err(DoctrineError::EndMismatch(
                alpha.base().label().to_string(),
                display.source().label().to_string(),
            ));
        }
        Ok(IrPredicate { display, alpha })
    }

    /// The assembly the predicate lives over (target of the display).
    pub fn base(&self) -> &PartitionedAssembly {
        self.display.target()
    }

    /// The source of the display morphism.
    pub fn source(&self) -> &PartitionedAssembly {
        self.display.source()
    }

    pub fn display(&self) -> &AsmMorphism {
        &self.display
    }

    pub fn alpha(&self) -> &BasePredicate {
        &self.alpha
    }

    /// Predicate value at a source element.
    pub fn value_at(&self, y: &str) -> TermSet {
        self.alpha.at(y)
    }
}

/// An order witness: a mediating morphism and the membership term `ℓ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IrWitness {
    pub mediator: AsmMorphism,
    pub ell: Term,
}

/// Does `w` witness `p ≤ q`? Checks, in order: shared base, oracle-freeness
/// of both witness terms, mediator boundaries, the triangle
/// `display_p = display_q ∘ mediator` on carriers, that the mediator's
/// realizer tracks it, and the memberships `ℓ·⟨ψ(y), b⟩ ∈ α(y)` for every
/// source element `y` of `p` and every `b ∈ β(mediator(y))`.
pub fn ir_leq(p: &IrPredicate, q: &IrPredicate, w: &IrWitness, pca: &PcaSpec) -> Verdict {
    if p.base() != q.base() {
        return Verdict::fails(format!(
            "different bases: `{}` vs `{}`",
            p.base().label(),
            q.base().label()
        ));
    }
    if !w.ell.oracle_free() {
        return Verdict::fails(format!("ℓ = {} mentions an oracle", w.ell));
    }
    if !w.mediator.realizer().oracle_free() {
        return Verdict::fails(format!(
            "mediator realizer {} mentions an oracle",
            w.mediator.realizer()
        ));
    }
    if w.mediator.source() != p.source() || w.mediator.target() != q.source() {
        return Verdict::fails(format!(
            "mediator runs `{}` → `{}`, expected `{}` → `{}`",
            w.mediator.source().label(),
            w.mediator.target().label(),
            p.source().label(),
            q.source().label()
        ));
    }
    for y in p.source().carrier() {
        let via_q = &q.display().map()[&w.mediator.map()[y]];
        if via_q != &p.display().map()[y] {
            return Verdict::fails(format!(
                "triangle broken at `{y}`: displays give `{}` vs `{via_q}`",
                p.display().map()[y]
            ));
        }
    }
    let mediator_verdict = w.mediator.verify(pca);
    if let Verdict::Fails { witness } = &mediator_verdict {
        return Verdict::fails(format!("mediator: {witness}"));
    }
    let mut out_of_fuel = matches!(mediator_verdict, Verdict::Unknown { .. })
        .then(|| "mediator: out of fuel".to_string());
    for y in p.source().carrier() {
        let name = p.source().name(y).expect("carrier element");
        let alpha_y = p.value_at(y);
        for b in &q.value_at(&w.mediator.map()[y]) {
            match term::apply(&w.ell, &term::pair_of(name, b), pca) {
                Reduction::Converged { value, .. } => {
                    if !alpha_y.contains(&value) {
                        return Verdict::fails(format!(
                            "element `{y}`, q = {b}: ℓ gives {value}, not in the source set"
                        ));
                    }
                }
                Reduction::Stuck { .. } => {
                    return Verdict::fails(format!("element `{y}`, q = {b}: ℓ is stuck"));
                }
                Reduction::FuelExhausted { .. } => {
                    out_of_fuel.get_or_insert_with(|| format!("element `{y}`: out of fuel"));
                }
            }
        }
    }
    match out_of_fuel {
        Some(reason) => Verdict::unknown(reason),
        None => Verdict::Holds,
    }
}

/// The witness `(id, p₂)` for `p ≤ p`.
pub fn reflexivity(p: &IrPredicate) -> IrWitness {
    IrWitness { mediator: asm::identity(p.source()), ell: term::p2_c() }
}

/// Compose witnesses: from `w1 : p ≤ q` and `w2 : q ≤ r` build the witness
/// `(h₂∘h₁, λξ. ℓ₁⟨p₁ξ, ℓ₂⟨r₁(p₁ξ), p₂ξ⟩⟩)` for `p ≤ r`, where `r₁`
/// realizes `h₁`.
pub fn compose_witnesses(w1: &IrWitness, w2: &IrWitness) -> Result<IrWitness, DoctrineError> {
    let mediator = asm::compose(&w2.mediator, &w1.mediator)?;
    let r1 = w1.mediator.realizer().clone();
    let inner = LambdaExpr::pair(
        LambdaExpr::app(
            LambdaExpr::Const(r1),
            LambdaExpr::app(LambdaExpr::Const(term::p1_c()), LambdaExpr::var("c")),
        ),
        LambdaExpr::app(LambdaExpr::Const(term::p2_c()), LambdaExpr::var("c")),
    );
    let ell = lam(
        &["c"],
        LambdaExpr::app(
            LambdaExpr::Const(w1.ell.clone()),
            LambdaExpr::pair(
                LambdaExpr::app(LambdaExpr::Const(term::p1_c()), LambdaExpr::var("c")),
                LambdaExpr::app(LambdaExpr::Const(w2.ell.clone()), inner),
            ),
        ),
    );
    Ok(IrWitness { mediator, ell })
}

// ---------------------------------------------------------------------------
// Reindexing and existentials
// ---------------------------------------------------------------------------

/// Reindex `p` along `h : X′ → X`: pull the display back along `h` (carrier
/// of pairs `(y, x′)` agreeing in `X`), display the second projection, and
/// precompose the values with the first.
pub fn ir_reindex(h: &AsmMorphism, p: &IrPredicate) -> Result<IrPredicate, DoctrineError> {
    if h.target() != p.base() {
        return Err(DoctrineError::EndMismatch(
            p.base().label().to_string(),
            h.target().label().to_string(),
        ));
    }
    let pb = asm::pullback(p.display(), h)?;
    let mut values = PredValues::new();
    for w in pb.object.carrier() {
        values.insert(w.clone(), p.value_at(&pb.proj1.map()[w]));
    }
    let alpha = BasePredicate::new(pb.object.clone(), values)?;
    IrPredicate::new(pb.proj2, alpha)
}

/// Existential along `f : X → Z`: post-compose the display, keep the values.
pub fn ir_exists(f: &AsmMorphism, p: &IrPredicate) -> Result<IrPredicate, DoctrineError> {
    if f.source() != p.base() {
        return Err(DoctrineError::EndMismatch(
            p.base().label().to_string(),
            f.source().label().to_string(),
        ));
    }
    let display = asm::compose(f, p.display())?;
    IrPredicate::new(display, p.alpha().clone())
}

// ---------------------------------------------------------------------------
// Top, bottom, meet, join
// ---------------------------------------------------------------------------

/// `⊤` over `X`: identity display with constantly empty values.
pub fn ir_top(x: &PartitionedAssembly) -> IrPredicate {
    IrPredicate::new(asm::identity(x), crate::eir::eir_top(x)).expect("identity display")
}

/// `⊥` over `X`: the empty display.
pub fn ir_bottom(x: &PartitionedAssembly) -> IrPredicate {
    let empty = PartitionedAssembly::new(&format!("∅_{}", x.label()), []).expect("no elements");
    let display = AsmMorphism::new(
        &format!("!_{}", x.label()),
        empty.clone(),
        x.clone(),
        BTreeMap::new(),
        term::i(),
    )
    .expect("empty map is total");
    let alpha = BasePredicate::new(empty, PredValues::new()).expect("empty predicate");
    IrPredicate::new(display, alpha).expect("bases agree")
}

/// The witness `(display, I)` for `p ≤ ⊤`.
pub fn top_witness(p: &IrPredicate) -> IrWitness {
    let mediator = AsmMorphism::new(
        &format!("{}→⊤", p.display().label()),
        p.source().clone(),
        p.base().clone(),
        p.display().map().clone(),
        p.display().realizer().clone(),
    )
    .expect("display is a morphism");
    IrWitness { mediator, ell: term::i() }
}

/// The vacuous witness for `⊥ ≤ p`.
pub fn bottom_witness(bottom: &IrPredicate, p: &IrPredicate) -> IrWitness {
    let mediator = AsmMorphism::new(
        "∅→",
        bottom.source().clone(),
        p.source().clone(),
        BTreeMap::new(),
        term::i(),
    )
    .expect("empty map is total");
    IrWitness { mediator, ell: term::i() }
}

/// A meet together with its projection witnesses.
#[derive(Debug, Clone)]
pub struct MeetData {
    pub predicate: IrPredicate,
    /// Witness for `meet ≤ p` (first projection, left-tag injector).
    pub to_left: IrWitness,
    /// Witness for `meet ≤ q` (second projection, right-tag injector).
    pub to_right: IrWitness,
}

fn tag_injector(tag: Term) -> Term {
    lam(
        &["c"],
        LambdaExpr::pair(
            LambdaExpr::Const(tag),
            LambdaExpr::app(LambdaExpr::Const(term::p2_c()), LambdaExpr::var("c")),
        ),
    )
}

/// Binary meet: pull the two displays back against each other; the carrier
/// is the pairs `(y, z)` agreeing in `X`, the display goes through the first
/// factor, and the values are the tagged unions `α(y) ⊕ β(z)`.
pub fn ir_meet(p: &IrPredicate, q: &IrPredicate) -> Result<MeetData, DoctrineError> {
    if p.base() != q.base() {
        return Err(DoctrineError::BaseMismatch(
            p.base().label().to_string(),
            q.base().label().to_string(),
        ));
    }
    let pb = asm::pullback(p.display(), q.display())?;
    let mut values = PredValues::new();
    for w in pb.object.carrier() {
        let ay = p.value_at(&pb.proj1.map()[w]);
        let bz = q.value_at(&pb.proj2.map()[w]);
        values.insert(w.clone(), term::oplus(&ay, &bz));
    }
    let alpha = BasePredicate::new(pb.object.clone(), values)?;
    let display = asm::compose(p.display(), &pb.proj1)?;
    let predicate = IrPredicate::new(display, alpha)?;
    let to_left = IrWitness { mediator: pb.proj1, ell: tag_injector(term::true_c()) };
    let to_right = IrWitness { mediator: pb.proj2, ell: tag_injector(term::false_c()) };
    Ok(MeetData { predicate, to_left, to_right })
}

/// Pair two witnesses `w1 : r ≤ p`, `w2 : r ≤ q` into `r ≤ p∧q`: the
/// mediator pairs the two mediators, and the membership term cases on the
/// tag, dispatching to `ℓ₁` or `ℓ₂`.
pub fn meet_pair(
    w1: &IrWitness,
    w2: &IrWitness,
    meet: &MeetData,
) -> Result<IrWitness, DoctrineError> {
    if w1.mediator.source() != w2.mediator.source() {
        return Err(DoctrineError::WitnessMismatch(
            w1.mediator.label().to_string(),
            w2.mediator.label().to_string(),
        ));
    }
    let mut map = BTreeMap::new();
    for s in w1.mediator.source().carrier() {
        map.insert(s.clone(), pair_id(&w1.mediator.map()[s], &w2.mediator.map()[s]));
    }
    let realizer = lam(
        &["s"],
        LambdaExpr::pair(
            LambdaExpr::app(
                LambdaExpr::Const(w1.mediator.realizer().clone()),
                LambdaExpr::var("s"),
            ),
            LambdaExpr::app(
                LambdaExpr::Const(w2.mediator.realizer().clone()),
                LambdaExpr::var("s"),
            ),
        ),
    );
    let mediator = AsmMorphism::new(
        &format!("⟨{},{}⟩", w1.mediator.label(), w2.mediator.label()),
        w1.mediator.source().clone(),
        meet.predicate.source().clone(),
        map,
        realizer,
    )?;
    // ⟨ψ(s), ⟨tag, payload⟩⟩ ↦ case tag (ℓ₁⟨ψ(s),payload⟩) (ℓ₂⟨ψ(s),payload⟩)
    let branch = |ell: &Term| {
        LambdaExpr::app(
            LambdaExpr::Const(ell.clone()),
            LambdaExpr::pair(
                LambdaExpr::app(LambdaExpr::Const(term::p1_c()), LambdaExpr::var("c")),
                LambdaExpr::app(
                    LambdaExpr::Const(term::p2_c()),
                    LambdaExpr::app(LambdaExpr::Const(term::p2_c()), LambdaExpr::var("c")),
                ),
            ),
        )
    };
    let ell = lam(
        &["c"],
        LambdaExpr::apps(
            LambdaExpr::Const(term::case_c()),
            vec![
                LambdaExpr::app(
                    LambdaExpr::Const(term::p1_c()),
                    LambdaExpr::app(LambdaExpr::Const(term::p2_c()), LambdaExpr::var("c")),
                ),
                branch(&w1.ell),
                branch(&w2.ell),
            ],
        ),
    );
    Ok(IrWitness { mediator, ell })
}

/// A join together with its injection witnesses and the coproduct it is
/// built on.
#[derive(Debug, Clone)]
pub struct JoinData {
    pub predicate: IrPredicate,
    /// Witness for `p ≤ join` (left injection, `ℓ = p₂`).
    pub from_left: IrWitness,
    /// Witness for `q ≤ join` (right injection, `ℓ = p₂`).
    pub from_right: IrWitness,
    coproduct: asm::CoproductData,
}

/// Binary join: the coproduct of the sources displays by case analysis, and
/// the values restrict to the summands.
pub fn ir_join(p: &IrPredicate, q: &IrPredicate) -> Result<JoinData, DoctrineError> {
    if p.base() != q.base() {
        return Err(DoctrineError::BaseMismatch(
            p.base().label().to_string(),
            q.base().label().to_string(),
        ));
    }
    let cop = asm::coproduct(p.source(), q.source());
    let display = asm::copair(p.display(), q.display(), &cop)?;
    let mut values = PredValues::new();
    for y in p.source().carrier() {
        values.insert(asm::inl_id(y), p.value_at(y));
    }
    for z in q.source().carrier() {
        values.insert(asm::inr_id(z), q.value_at(z));
    }
    let alpha = BasePredicate::new(cop.object.clone(), values)?;
    let predicate = IrPredicate::new(display, alpha)?;
    let from_left = IrWitness { mediator: cop.inl.clone(), ell: term::p2_c() };
    let from_right = IrWitness { mediator: cop.inr.clone(), ell: term::p2_c() };
    Ok(JoinData { predicate, from_left, from_right, coproduct: cop })
}

/// Copair two witnesses `w1 : p ≤ r`, `w2 : q ≤ r` into `p∨q ≤ r`: the
/// mediator is the copair of the mediators and the membership term is
/// `λξ. case (p₁(p₁ξ)) (ℓ₁⟨p₂(p₁ξ), p₂ξ⟩) (ℓ₂⟨p₂(p₁ξ), p₂ξ⟩)`.
pub fn join_copair(
    w1: &IrWitness,
    w2: &IrWitness,
    join: &JoinData,
) -> Result<IrWitness, DoctrineError> {
    if w1.mediator.target() != w2.mediator.target() {
        return Err(DoctrineError::WitnessMismatch(
            w1.mediator.label().to_string(),
            w2.mediator.label().to_string(),
        ));
    }
    let mediator = asm::copair(&w1.mediator, &w2.mediator, &join.coproduct)?;
    let strip = |ell: &Term| {
        LambdaExpr::app(
            LambdaExpr::Const(ell.clone()),
            LambdaExpr::pair(
                LambdaExpr::app(
                    LambdaExpr::Const(term::p2_c()),
                    LambdaExpr::app(LambdaExpr::Const(term::p1_c()), LambdaExpr::var("c")),
                ),
                LambdaExpr::app(LambdaExpr::Const(term::p2_c()), LambdaExpr::var("c")),
            ),
        )
    };
    let ell = lam(
        &["c"],
        LambdaExpr::apps(
            LambdaExpr::Const(term::case_c()),
            vec![
                LambdaExpr::app(
                    LambdaExpr::Const(term::p1_c()),
                    LambdaExpr::app(LambdaExpr::Const(term::p1_c()), LambdaExpr::var("c")),
                ),
                strip(&w1.ell),
                strip(&w2.ell),
            ],
        ),
    );
    Ok(IrWitness { mediator, ell })
}

// ---------------------------------------------------------------------------
// Implication
// ---------------------------------------------------------------------------

/// The finite universe cutting out the function-space carrier: candidate
/// value-sets for the `R` component and candidate realizers for the `r` and
/// `l` components. Realizers may mention oracles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImplicationUniverse {
    values: Vec<TermSet>,
    realizers: Vec<Term>,
}

impl ImplicationUniverse {
    pub fn new(values: Vec<TermSet>, realizers: Vec<Term>) -> Self {
        let mut u = ImplicationUniverse { values: Vec::new(), realizers: Vec::new() };
        for v in values {
            u.register_value(v);
        }
        u.register_realizers(realizers);
        u
    }

    /// A small default: the empty set and singleton `{K}` as value-sets, the
    /// curated combinators as realizers.
    pub fn small() -> Self {
        ImplicationUniverse::new(
            vec![TermSet::new(), TermSet::from([Term::K])],
            crate::pool::curated(),
        )
    }

    pub fn values(&self) -> &[TermSet] {
        &self.values
    }

    pub fn realizers(&self) -> &[Term] {
        &self.realizers
    }

    /// Append a candidate value-set if not already present.
    pub fn register_value(&mut self, v: TermSet) {
        if !self.values.contains(&v) {
            self.values.push(v);
        }
    }

    /// Append candidate realizers, skipping duplicates.
    pub fn register_realizers(&mut self, ts: impl IntoIterator<Item = Term>) {
        for t in ts {
            if !self.realizers.contains(&t) {
                self.realizers.push(t);
            }
        }
    }
}

/// One element of the approximated function-space carrier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImplTuple {
    /// Base element the tuple sits over.
    pub x: ElemId,
    /// Fibre map `k : f⁻¹(x) → g⁻¹(x)`.
    pub k: BTreeMap<ElemId, ElemId>,
    /// The value-set component `R`.
    pub rset: TermSet,
    /// Realizer of `k` on names.
    pub r: Term,
    /// Term satisfying `l·⟨ψ(y), q⟩ ∈ R ⊕ α(y)` for all `y`, `q ∈ β(k(y))`.
    pub l: Term,
}

/// An implication predicate together with its carrier decomposition.
#[derive(Debug, Clone)]
pub struct ImplicationData {
    pub predicate: IrPredicate,
    pub tuples: BTreeMap<ElemId, ImplTuple>,
}

impl ImplicationData {
    /// Carrier id of the tuple with exactly these components, if present.
    pub fn find(
        &self,
        x: &str,
        k: &BTreeMap<ElemId, ElemId>,
        rset: &TermSet,
        r: &Term,
        l: &Term,
    ) -> Option<&ElemId> {
        self.tuples
            .iter()
            .find(|(_, t)| t.x == x && &t.k == k && &t.rset == rset && &t.r == r && &t.l == l)
            .map(|(id, _)| id)
    }
}

fn fibre(f: &AsmMorphism, x: &str) -> Vec<ElemId> {
    f.source()
        .carrier()
        .iter()
        .filter(|y| f.map()[*y] == x)
        .cloned()
        .collect()
}

/// Check that `cand · a` converges to `b` for every listed pair. Oracles are
/// allowed; only definite convergence to the expected value counts.
fn tracks_pairs(cand: &Term, pairs: &[(Term, Term)], pca: &PcaSpec) -> bool {
    pairs.iter().all(|(a, b)| match term::apply(cand, a, pca) {
        Reduction::Converged { value, .. } => &value == b,
        _ => false,
    })
}

/// Implication `p ⇒ q` over the shared base, approximated inside `u`.
///
/// The carrier collects every tuple `(x, k, R, r, l)` where `k` maps the
/// `p`-fibre of `x` into the `q`-fibre, `r ∈ u` realizes `k` on names,
/// `R ∈ u`, and `l ∈ u` satisfies `l·⟨ψ(y), q′⟩ ∈ R ⊕ α(y)` for every `y`
/// in the fibre and `q′ ∈ β(k(y))`. The tuple is named `⟨φ(x), ⟨r, l⟩⟩`,
/// displays to `x`, and carries the value-set `R`.
pub fn ir_implication(
    p: &IrPredicate,
    q: &IrPredicate,
    u: &ImplicationUniverse,
    pca: &PcaSpec,
) -> Result<ImplicationData, DoctrineError> {
    if p.base() != q.base() {
        return Err(DoctrineError::BaseMismatch(
            p.base().label().to_string(),
            q.base().label().to_string(),
        ));
    }
    let base = p.base();
    let mut elements = Vec::new();
    let mut values = PredValues::new();
    let mut map = BTreeMap::new();
    let mut tuples = BTreeMap::new();
    for x in base.carrier() {
        let fp = fibre(p.display(), x);
        let fq = fibre(q.display(), x);
        let name_pairs = |k: &BTreeMap<ElemId, ElemId>| -> Vec<(Term, Term)> {
            fp.iter()
                .map(|y| {
                    (
                        p.source().name(y).expect("fibre element").clone(),
                        q.source().name(&k[y]).expect("fibre element").clone(),
                    )
                })
                .collect()
        };
        for (ki, k) in enumerate_maps(&fp, &fq).into_iter().enumerate() {
            let pairs = name_pairs(&k);
            for (ri, r) in u.realizers.iter().enumerate() {
                if !term::is_value(r, pca) || !tracks_pairs(r, &pairs, pca) {
                    continue;
                }
                for (vi, rset) in u.values.iter().enumerate() {
                    'l_loop: for (li, l) in u.realizers.iter().enumerate() {
                        if !term::is_value(l, pca) {
                            continue;
                        }
                        for y in &fp {
                            let psi_y = p.source().name(y).expect("fibre element");
                            let target = term::oplus(rset, &p.value_at(y));
                            for qv in &q.value_at(&k[y]) {
                                match term::apply(l, &term::pair_of(psi_y, qv), pca) {
                                    Reduction::Converged { value, .. }
                                        if target.contains(&value) => {}
                                    _ => continue 'l_loop,
                                }
                            }
                        }
                        let id = format!("({x}|k{ki}|R{vi}|r{ri}|l{li})");
                        elements
                            .push((id.clone(), term::pair_of(base.name(x)?, &term::pair_of(r, l))));
                        values.insert(id.clone(), rset.clone());
                        map.insert(id.clone(), x.clone());
                        tuples.insert(
                            id,
                            ImplTuple {
                                x: x.clone(),
                                k: k.clone(),
                                rset: rset.clone(),
                                r: r.clone(),
                                l: l.clone(),
                            },
                        );
                    }
                }
            }
        }
    }
    let carrier = PartitionedAssembly::new(
        &format!("{}▷{}", p.source().label(), q.source().label()),
        elements,
    )?;
    let display = AsmMorphism::new(
        &format!("⇒_{}", base.label()),
        carrier.clone(),
        base.clone(),
        map,
        term::p1_c(),
    )?;
    let alpha = BasePredicate::new(carrier, values)?;
    Ok(ImplicationData { predicate: IrPredicate::new(display, alpha)?, tuples })
}

/// `λc. t ⟨a, c⟩` — partially apply a binary realizer to the constant `a`.
fn partial_pair_app(t: &Term, a: &Term) -> Term {
    lam(
        &["c"],
        LambdaExpr::app(
            LambdaExpr::Const(t.clone()),
            LambdaExpr::pair(LambdaExpr::Const(a.clone()), LambdaExpr::var("c")),
        ),
    )
}

/// `λc. t ⟨⟨a, p₁c⟩, p₂c⟩` — curry the left half of a nested pair argument.
fn partial_nested_app(t: &Term, a: &Term) -> Term {
    lam(
        &["c"],
        LambdaExpr::app(
            LambdaExpr::Const(t.clone()),
            LambdaExpr::pair(
                LambdaExpr::pair(
                    LambdaExpr::Const(a.clone()),
                    LambdaExpr::app(LambdaExpr::Const(term::p1_c()), LambdaExpr::var("c")),
                ),
                LambdaExpr::app(LambdaExpr::Const(term::p2_c()), LambdaExpr::var("c")),
            ),
        ),
    )
}

/// The per-element tuple data a curry of `w : ctx∧p ≤ q` needs: for every
/// element `e` of the context source, the value-set `γ(e)` and the realizers
/// `r_e = λξ. r_n⟨ε(e), ξ⟩` and `l_e = λξ. ℓ⟨⟨ε(e), p₁ξ⟩, p₂ξ⟩`.
pub fn curry_requirements(ctx: &IrPredicate, w: &IrWitness) -> (Vec<TermSet>, Vec<Term>) {
    let rn = w.mediator.realizer();
    let mut vals = Vec::new();
    let mut reals = Vec::new();
    for e in ctx.source().carrier() {
        let eps = ctx.source().name(e).expect("carrier element");
        vals.push(ctx.value_at(e));
        reals.push(partial_pair_app(rn, eps));
        reals.push(partial_nested_app(&w.ell, eps));
    }
    (vals, reals)
}

/// Curry `w : ctx∧p ≤ q` into a witness for `ctx ≤ (p ⇒ q)`.
///
/// For each context element `e` over `x` the mediator picks the tuple
/// `(x, y ↦ n(e,y), γ(e), r_e, l_e)`; its realizer is
/// `λs.⟨r_h s, ⟨W₁ s, W₂ s⟩⟩` with `W₁ = λc.λξ. r_n⟨c,ξ⟩` and
/// `W₂ = λc.λξ. ℓ⟨⟨c, p₁ξ⟩, p₂ξ⟩`, and the membership term is `p₂`. Fails
/// with [`DoctrineError::UniverseTooSmall`] if the approximated carrier is
/// missing a required tuple; [`curry_requirements`] lists exactly what to
/// register before rebuilding.
pub fn ir_curry(
    ctx: &IrPredicate,
    meet: &MeetData,
    imp: &ImplicationData,
    w: &IrWitness,
) -> Result<IrWitness, DoctrineError> {
    let rn = w.mediator.realizer().clone();
    let mut map = BTreeMap::new();
    for e in ctx.source().carrier() {
        let x = ctx.display().map()[e].clone();
        let eps = ctx.source().name(e)?;
        // k_e(y) = n(e, y) over the meet carrier pairs (e, y).
        let mut k = BTreeMap::new();
        for pair in meet.predicate.source().carrier() {
            if &meet.to_left.mediator.map()[pair] == e {
                let y = meet.to_right.mediator.map()[pair].clone();
                k.insert(y, w.mediator.map()[pair].clone());
            }
        }
        let rset = ctx.value_at(e);
        let r_e = partial_pair_app(&rn, eps);
        let l_e = partial_nested_app(&w.ell, eps);
        match imp.find(&x, &k, &rset, &r_e, &l_e) {
            Some(id) => {
                map.insert(e.clone(), id.clone());
            }
            None => {
                return Err(DoctrineError::UniverseTooSmall(format!(
                    "the tuple over `{x}` for context element `{e}` \
                     (value-set of size {}, r = {r_e}, l = {l_e})",
                    rset.len()
                )));
            }
        }
    }
    let w1 = lam(
        &["c", "v"],
        LambdaExpr::app(
            LambdaExpr::Const(rn.clone()),
            LambdaExpr::pair(LambdaExpr::var("c"), LambdaExpr::var("v")),
        ),
    );
    let w2 = lam(
        &["c", "v"],
        LambdaExpr::app(
            LambdaExpr::Const(w.ell.clone()),
            LambdaExpr::pair(
                LambdaExpr::pair(
                    LambdaExpr::var("c"),
                    LambdaExpr::app(LambdaExpr::Const(term::p1_c()), LambdaExpr::var("v")),
                ),
                LambdaExpr::app(LambdaExpr::Const(term::p2_c()), LambdaExpr::var("v")),
            ),
        ),
    );
    let rh = ctx.display().realizer().clone();
    let realizer = lam(
        &["s"],
        LambdaExpr::pair(
            LambdaExpr::app(LambdaExpr::Const(rh), LambdaExpr::var("s")),
            LambdaExpr::pair(
                LambdaExpr::app(LambdaExpr::Const(w1), LambdaExpr::var("s")),
                LambdaExpr::app(LambdaExpr::Const(w2), LambdaExpr::var("s")),
            ),
        ),
    );
    let mediator = AsmMorphism::new(
        &format!("curry_{}", w.mediator.label()),
        ctx.source().clone(),
        imp.predicate.source().clone(),
        map,
        realizer,
    )?;
    Ok(IrWitness { mediator, ell: term::p2_c() })
}

/// Uncurry `w : ctx ≤ (p ⇒ q)` into a witness for `ctx∧p ≤ q`.
///
/// The mediator sends the meet pair `(e, y)` to `k_{m(e)}(y)`, realized by
/// `λξ. (p₁(p₂(r̄(p₁ξ)))) (p₂ξ)` where `r̄` realizes `m`. The membership
/// term evaluates `l_t·⟨ψ(y), q′⟩` (extracting `l_t` from the tuple name)
/// and cases on the tag: `R`-elements pass through `ℓ`, `α`-elements stay:
/// `λξ. (λv. case (p₁v) ⟨true, ℓ⟨p₁(p₁ξ), p₂v⟩⟩ v)
///      ((p₂(p₂(r̄(p₁(p₁ξ))))) ⟨p₂(p₁ξ), p₂ξ⟩)`.
pub fn ir_uncurry(
    meet: &MeetData,
    imp: &ImplicationData,
    q: &IrPredicate,
    w: &IrWitness,
) -> Result<IrWitness, DoctrineError> {
    let rbar = w.mediator.realizer().clone();
    let mut map = BTreeMap::new();
    for pair in meet.predicate.source().carrier() {
        let e = &meet.to_left.mediator.map()[pair];
        let y = &meet.to_right.mediator.map()[pair];
        let tuple_id = w.mediator.map().get(e).ok_or_else(|| {
            DoctrineError::WitnessMismatch(e.clone(), w.mediator.label().to_string())
        })?;
        let tuple = imp.tuples.get(tuple_id).ok_or_else(|| {
            DoctrineError::WitnessMismatch(tuple_id.clone(), "implication carrier".to_string())
        })?;
        let target = tuple.k.get(y).ok_or_else(|| {
            DoctrineError::WitnessMismatch(y.clone(), format!("fibre map of `{tuple_id}`"))
        })?;
        map.insert(pair.clone(), target.clone());
    }
    let p1 = || LambdaExpr::Const(term::p1_c());
    let p2 = || LambdaExpr::Const(term::p2_c());
    let var = LambdaExpr::var;
    // λξ. (p₁(p₂(r̄(p₁ξ)))) (p₂ξ)
    let realizer = lam(
        &["c"],
        LambdaExpr::app(
            LambdaExpr::app(
                p1(),
                LambdaExpr::app(
                    p2(),
                    LambdaExpr::app(LambdaExpr::Const(rbar.clone()), LambdaExpr::app(p1(), var("c"))),
                ),
            ),
            LambdaExpr::app(p2(), var("c")),
        ),
    );
    let mediator = AsmMorphism::new(
        &format!("uncurry_{}", w.mediator.label()),
        meet.predicate.source().clone(),
        q.source().clone(),
        map,
        realizer,
    )?;
    // l_t extracted from the tuple name: p₂(p₂(r̄(p₁(p₁ξ)))).
    let l_of_tuple = LambdaExpr::app(
        p2(),
        LambdaExpr::app(
            p2(),
            LambdaExpr::app(
                LambdaExpr::Const(rbar),
                LambdaExpr::app(p1(), LambdaExpr::app(p1(), var("c"))),
            ),
        ),
    );
    let v_arg = LambdaExpr::app(
        l_of_tuple,
        LambdaExpr::pair(
            LambdaExpr::app(p2(), LambdaExpr::app(p1(), var("c"))),
            LambdaExpr::app(p2(), var("c")),
        ),
    );
    let true_branch = LambdaExpr::pair(
        LambdaExpr::Const(term::true_c()),
        LambdaExpr::app(
            LambdaExpr::Const(w.ell.clone()),
            LambdaExpr::pair(
                LambdaExpr::app(p1(), LambdaExpr::app(p1(), var("c"))),
                LambdaExpr::app(p2(), var("v")),
            ),
        ),
    );
    let case_on_v = LambdaExpr::Abs(
        "v".to_string(),
        Box::new(LambdaExpr::apps(
            LambdaExpr::Const(term::case_c()),
            vec![LambdaExpr::app(p1(), var("v")), true_branch, var("v")],
        )),
    );
    let ell = lam(&["c"], LambdaExpr::app(case_on_v, v_arg));
    Ok(IrWitness { mediator, ell })
}

// ---------------------------------------------------------------------------
// Universal quantification
// ---------------------------------------------------------------------------

/// One element of the approximated section carrier of `∀_f p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForallTuple {
    /// Base element the tuple sits over.
    pub x: ElemId,
    /// Section of `p`'s display over the fibre `f⁻¹(x)`.
    pub k: BTreeMap<ElemId, ElemId>,
    /// Realizer of `k` on names.
    pub e: Term,
}

/// A universal quantification together with its carrier decomposition.
#[derive(Debug, Clone)]
pub struct ForallData {
    pub predicate: IrPredicate,
    pub tuples: BTreeMap<ElemId, ForallTuple>,
}

impl ForallData {
    /// Carrier id of the tuple with exactly these components, if present.
    pub fn find(&self, x: &str, k: &BTreeMap<ElemId, ElemId>, e: &Term) -> Option<&ElemId> {
        self.tuples
            .iter()
            .find(|(_, t)| t.x == x && &t.k == k && &t.e == e)
            .map(|(id, _)| id)
    }
}

/// Enumerate the sections of `g` over `fib`: maps `k` with `g(k(y)) = y`,
/// candidates per element taken in carrier order of `g`'s source.
fn sections_over(g: &AsmMorphism, fib: &[ElemId]) -> Vec<BTreeMap<ElemId, ElemId>> {
    let mut sections = vec![BTreeMap::new()];
    for y in fib {
        let candidates = fibre(g, y);
        let mut next = Vec::new();
        for sec in &sections {
            for c in &candidates {
                let mut s = sec.clone();
                s.insert(y.clone(), c.clone());
                next.push(s);
            }
        }
        sections = next;
    }
    sections
}

/// Universal quantification `∀_f p` along `f : Y → X` for `p` over `Y`.
///
/// The carrier collects every `(x, k, e)` where `k` is a section of `p`'s
/// display over `f⁻¹(x)` and `e` is a value from `pool` realizing `k` on
/// names. The tuple is named `⟨φ(x), e⟩`, displays to `x` by `p₁`, and its
/// value-set is `⋃_{y ∈ f⁻¹(x)} {ψ(y)} ⊗ α(k(y))`.
pub fn ir_forall(
    f: &AsmMorphism,
    p: &IrPredicate,
    pool: &TermPool,
    pca: &PcaSpec,
) -> Result<ForallData, DoctrineError> {
    if f.source() != p.base() {
        return Err(DoctrineError::EndMismatch(
            p.base().label().to_string(),
            f.source().label().to_string(),
        ));
    }
    let base = f.target();
    let mut elements = Vec::new();
    let mut values = PredValues::new();
    let mut map = BTreeMap::new();
    let mut tuples = BTreeMap::new();
    for x in base.carrier() {
        let fib = fibre(f, x);
        for (ki, k) in sections_over(p.display(), &fib).into_iter().enumerate() {
            let pairs: Vec<(Term, Term)> = fib
                .iter()
                .map(|y| {
                    (
                        f.source().name(y).expect("fibre element").clone(),
                        p.source().name(&k[y]).expect("section image").clone(),
                    )
                })
                .collect();
            for (ei, e) in pool.iter().enumerate() {
                if !term::is_value(e, pca) || !tracks_pairs(e, &pairs, pca) {
                    continue;
                }
                let id = format!("({x}|k{ki}|e{ei})");
                let mut vset = TermSet::new();
                for y in &fib {
                    let psi_y = TermSet::from([f.source().name(y)?.clone()]);
                    vset.append(&mut term::otimes(&psi_y, &p.value_at(&k[y])));
                }
                elements.push((id.clone(), term::pair_of(base.name(x)?, e)));
                values.insert(id.clone(), vset);
                map.insert(id.clone(), x.clone());
                tuples.insert(id, ForallTuple { x: x.clone(), k: k.clone(), e: e.clone() });
            }
        }
    }
    let carrier =
        PartitionedAssembly::new(&format!("∀_{}({})", f.label(), p.source().label()), elements)?;
    let display = AsmMorphism::new(
        &format!("∀_{}", f.label()),
        carrier.clone(),
        base.clone(),
        map,
        term::p1_c(),
    )?;
    let alpha = BasePredicate::new(carrier, values)?;
    Ok(ForallData { predicate: IrPredicate::new(display, alpha)?, tuples })
}

/// Mate a witness `w : q ≤ ∀_f p` down to `reindex_f(q) ≤ p`.
///
/// On the pullback pair `(w, y)` the mediator applies the section of the
/// chosen tuple: `(w, y) ↦ k_{n(w)}(y)`, realized by
/// `λc. (p₂(r_n(p₁c))) (p₂c)`; the membership term repackages the argument
/// as `λc. ℓ⟨p₁(p₁c), ⟨p₂(p₁c), p₂c⟩⟩`.
pub fn forall_mate_down(
    q: &IrPredicate,
    f: &AsmMorphism,
    p: &IrPredicate,
    fa: &ForallData,
    w: &IrWitness,
) -> Result<IrWitness, DoctrineError> {
    let reindexed = ir_reindex(f, q)?;
    let pb = asm::pullback(q.display(), f)?;
    let mut map = BTreeMap::new();
    for pair in reindexed.source().carrier() {
        let w_el = &pb.proj1.map()[pair];
        let y = &pb.proj2.map()[pair];
        let tuple_id = w.mediator.map().get(w_el).ok_or_else(|| {
            DoctrineError::WitnessMismatch(w_el.clone(), w.mediator.label().to_string())
        })?;
        let tuple = fa.tuples.get(tuple_id).ok_or_else(|| {
            DoctrineError::WitnessMismatch(tuple_id.clone(), "section carrier".to_string())
        })?;
        let target = tuple.k.get(y).ok_or_else(|| {
            DoctrineError::WitnessMismatch(y.clone(), format!("section of `{tuple_id}`"))
        })?;
        map.insert(pair.clone(), target.clone());
    }
    let p1 = || LambdaExpr::Const(term::p1_c());
    let p2 = || LambdaExpr::Const(term::p2_c());
    let var = LambdaExpr::var;
    let realizer = lam(
        &["c"],
        LambdaExpr::app(
            LambdaExpr::app(
                p2(),
                LambdaExpr::app(
                    LambdaExpr::Const(w.mediator.realizer().clone()),
                    LambdaExpr::app(p1(), var("c")),
                ),
            ),
            LambdaExpr::app(p2(), var("c")),
        ),
    );
    let mediator = AsmMorphism::new(
        &format!("mate↓_{}", w.mediator.label()),
        reindexed.source().clone(),
        p.source().clone(),
        map,
        realizer,
    )?;
    let ell = lam(
        &["c"],
        LambdaExpr::app(
            LambdaExpr::Const(w.ell.clone()),
            LambdaExpr::pair(
                LambdaExpr::app(p1(), LambdaExpr::app(p1(), var("c"))),
                LambdaExpr::pair(
                    LambdaExpr::app(p2(), LambdaExpr::app(p1(), var("c"))),
                    LambdaExpr::app(p2(), var("c")),
                ),
            ),
        ),
    );
    Ok(IrWitness { mediator, ell })
}

/// The per-element realizers a mate-up of `w : reindex_f(q) ≤ p` needs in
/// the section pool: `e_w = λv. r_m⟨χ(w), v⟩` for every element `w` of `q`'s
/// source.
pub fn mate_up_requirements(q: &IrPredicate, w: &IrWitness) -> Vec<Term> {
    let rm = w.mediator.realizer();
    q.source()
        .carrier()
        .iter()
        .map(|w_el| partial_pair_app(rm, q.source().name(w_el).expect("carrier element")))
        .collect()
}

/// Mate a witness `w : reindex_f(q) ≤ p` up to `q ≤ ∀_f p`.
///
/// Each element `w` maps to the tuple `(h(w), y ↦ m(w,y), e_w)` with
/// `e_w = λv. r_m⟨χ(w), v⟩`; the mediator realizer is
/// `λu. ⟨r_h u, λv. r_m⟨u, v⟩⟩` and the membership term is
/// `λu. ℓ′⟨⟨p₁u, p₁(p₂u)⟩, p₂(p₂u)⟩`. Fails with
/// [`DoctrineError::PoolTooSmall`] when the section carrier is missing a
/// tuple; [`mate_up_requirements`] lists the realizers to register before
/// rebuilding the quantifier.
pub fn forall_mate_up(
    q: &IrPredicate,
    f: &AsmMorphism,
    fa: &ForallData,
    w: &IrWitness,
) -> Result<IrWitness, DoctrineError> {
    let pb = asm::pullback(q.display(), f)?;
    let rm = w.mediator.realizer().clone();
    let mut map = BTreeMap::new();
    for w_el in q.source().carrier() {
        let x = q.display().map()[w_el].clone();
        let chi = q.source().name(w_el)?;
        let mut k = BTreeMap::new();
        for pair in pb.object.carrier() {
            if &pb.proj1.map()[pair] == w_el {
                let y = pb.proj2.map()[pair].clone();
                k.insert(y, w.mediator.map()[pair].clone());
            }
        }
        let e_w = partial_pair_app(&rm, chi);
        match fa.find(&x, &k, &e_w) {
            Some(id) => {
                map.insert(w_el.clone(), id.clone());
            }
            None => {
                return Err(DoctrineError::PoolTooSmall(format!(
                    "the section tuple over `{x}` for element `{w_el}` (e = {e_w})"
                )));
            }
        }
    }
    let inner = lam(
        &["u", "v"],
        LambdaExpr::app(
            LambdaExpr::Const(rm),
            LambdaExpr::pair(LambdaExpr::var("u"), LambdaExpr::var("v")),
        ),
    );
    let realizer = lam(
        &["u"],
        LambdaExpr::pair(
            LambdaExpr::app(LambdaExpr::Const(q.display().realizer().clone()), LambdaExpr::var("u")),
            LambdaExpr::app(LambdaExpr::Const(inner), LambdaExpr::var("u")),
        ),
    );
    let mediator = AsmMorphism::new(
        &format!("mate↑_{}", w.mediator.label()),
        q.source().clone(),
        fa.predicate.source().clone(),
        map,
        realizer,
    )?;
    let p1 = || LambdaExpr::Const(term::p1_c());
    let p2 = || LambdaExpr::Const(term::p2_c());
    let var = LambdaExpr::var;
    let ell = lam(
        &["u"],
        LambdaExpr::app(
            LambdaExpr::Const(w.ell.clone()),
            LambdaExpr::pair(
                LambdaExpr::pair(
                    LambdaExpr::app(p1(), var("u")),
                    LambdaExpr::app(p1(), LambdaExpr::app(p2(), var("u"))),
                ),
                LambdaExpr::app(p2(), LambdaExpr::app(p2(), var("u"))),
            ),
        ),
    );
    Ok(IrWitness { mediator, ell })
}

// ---------------------------------------------------------------------------
// Classification
// ---------------------------------------------------------------------------

/// A predicate in canonical form and the data exchanging it with the
/// original.
#[derive(Debug, Clone)]
pub struct Classification {
    /// `χ(x)` : for each base element, the name-indexed family of value-sets
    /// `{ψ(y) ↦ {α(y) : f(y) = x, ψ(y) fixed}}`.
    pub chi: BTreeMap<ElemId, BTreeMap<Term, std::collections::BTreeSet<TermSet>>>,
    pub canonical: IrPredicate,
    /// Witness for `p ≤ canonical` (mediator `y ↦ (f(y), ψ(y), α(y))`,
    /// realizer `λs.⟨r_f s, s⟩`, `ℓ = p₂`).
    pub to_canonical: IrWitness,
    /// Witness for `canonical ≤ p` (least representative, realizer `p₂`,
    /// `ℓ = p₂`).
    pub from_canonical: IrWitness,
}

pub(crate) fn value_set_id(vs: &TermSet) -> String {
    let inner: Vec<String> = vs.iter().map(|t| t.to_string()).collect();
    format!("{{{}}}", inner.join(","))
}

/// Classify `p`: collapse its source to one element per distinct triple
/// `(f(y), ψ(y), α(y))`, producing an isomorphic canonical predicate and the
/// characteristic data `chi`.
pub fn classify(p: &IrPredicate) -> Result<Classification, DoctrineError> {
    let mut chi: BTreeMap<ElemId, BTreeMap<Term, std::collections::BTreeSet<TermSet>>> =
        BTreeMap::new();
    for x in p.base().carrier() {
        chi.insert(x.clone(), BTreeMap::new());
    }
    let mut canon_elements = Vec::new();
    let mut canon_values = PredValues::new();
    let mut canon_map = BTreeMap::new();
    let mut to_map = BTreeMap::new();
    let mut representative: BTreeMap<ElemId, ElemId> = BTreeMap::new();
    for y in p.source().carrier() {
        let x = p.display().map()[y].clone();
        let name = p.source().name(y)?.clone();
        let vs = p.value_at(y);
        chi.get_mut(&x).expect("base element").entry(name.clone()).or_default().insert(vs.clone());
        let id = format!("({x},{name},{})", value_set_id(&vs));
        if !representative.contains_key(&id) {
            representative.insert(id.clone(), y.clone());
            canon_elements.push((id.clone(), term::pair_of(p.base().name(&x)?, &name)));
            canon_values.insert(id.clone(), vs);
            canon_map.insert(id.clone(), x);
        }
        to_map.insert(y.clone(), id);
    }
    let carrier =
        PartitionedAssembly::new(&format!("{}*", p.source().label()), canon_elements)?;
    let display = AsmMorphism::new(
        &format!("{}*", p.display().label()),
        carrier.clone(),
        p.base().clone(),
        canon_map,
        term::p1_c(),
    )?;
    let alpha = BasePredicate::new(carrier.clone(), canon_values)?;
    let canonical = IrPredicate::new(display, alpha)?;
    let to_realizer = lam(
        &["s"],
        LambdaExpr::pair(
            LambdaExpr::app(
                LambdaExpr::Const(p.display().realizer().clone()),
                LambdaExpr::var("s"),
            ),
            LambdaExpr::var("s"),
        ),
    );
    let to_canonical = IrWitness {
        mediator: AsmMorphism::new(
            "collapse",
            p.source().clone(),
            carrier.clone(),
            to_map,
            to_realizer,
        )?,
        ell: term::p2_c(),
    };
    let from_map: BTreeMap<ElemId, ElemId> =
        representative.iter().map(|(id, y)| (id.clone(), y.clone())).collect();
    let from_canonical = IrWitness {
        mediator: AsmMorphism::new(
            "represent",
            carrier,
            p.source().clone(),
            from_map,
            term::p2_c(),
        )?,
        ell: term::p2_c(),
    };
    Ok(Classification { chi, canonical, to_canonical, from_canonical })
}

// ---------------------------------------------------------------------------
// Witness search
// ---------------------------------------------------------------------------

/// Check only the membership half of `ir_leq` for a fixed mediator: is
/// `ℓ·⟨ψ(y), b⟩ ∈ α(y)` for all `y` and `b ∈ β(h(y))`?
fn ell_works(
    p: &IrPredicate,
    q: &IrPredicate,
    h: &BTreeMap<ElemId, ElemId>,
    ell: &Term,
    pca: &PcaSpec,
) -> bool {
    if !ell.oracle_free() {
        return false;
    }
    p.source().carrier().iter().all(|y| {
        let name = p.source().name(y).expect("carrier element");
        let alpha_y = p.value_at(y);
        q.value_at(&h[y]).iter().all(|b| {
            matches!(term::apply(ell, &term::pair_of(name, b), pca),
                Reduction::Converged { value, .. } if alpha_y.contains(&value))
        })
    })
}

/// Search for a witness of `p ≤ q` over `pool`: enumerate set maps between
/// the sources satisfying the display triangle, search a tracking realizer
/// for each, then search a membership term. Returns the first full hit.
pub fn search_ir_leq(
    p: &IrPredicate,
    q: &IrPredicate,
    pool: &TermPool,
    pca: &PcaSpec,
) -> Option<IrWitness> {
    if p.base() != q.base() {
        return None;
    }
    for h in enumerate_maps(p.source().carrier(), q.source().carrier()) {
        if p.source()
            .carrier()
            .iter()
            .any(|y| q.display().map()[&h[y]] != p.display().map()[y])
        {
            continue;
        }
        let Some(realizer) = asm::search_realizer(p.source(), q.source(), &h, pool, pca) else {
            continue;
        };
        for ell in pool.iter() {
            if ell_works(p, q, &h, ell, pca) {
                let mediator = AsmMorphism::new(
                    "searched",
                    p.source().clone(),
                    q.source().clone(),
                    h,
                    realizer,
                )
                .expect("map validated by enumeration");
                return Some(IrWitness { mediator, ell: ell.clone() });
            }
        }
    }
    None
}

/// Search both directions; `Some` means the predicates are isomorphic in
/// the order (with the returned pair of witnesses).
pub fn search_ir_iso(
    p: &IrPredicate,
    q: &IrPredicate,
    pool: &TermPool,
    pca: &PcaSpec,
) -> Option<(IrWitness, IrWitness)> {
    let fwd = search_ir_leq(p, q, pool, pca)?;
    let bwd = search_ir_leq(q, p, pool, pca)?;
    Some((fwd, bwd))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn pca() -> PcaSpec {
        PcaSpec::plain()
    }

    fn t(src: &str) -> Term {
        crate::syntax::parse_term(src, &Default::default()).expect("test term parses")
    }

    fn set(terms: &[&str]) -> TermSet {
        terms.iter().map(|s| t(s)).collect()
    }

    /// Base: two elements named K and S.
    fn base_ks() -> PartitionedAssembly {
        PartitionedAssembly::new("X", [("x1".into(), t("K")), ("x2".into(), t("S"))]).unwrap()
    }

    /// Three elements named `⟨φ(x), tag⟩` displayed over [`base_ks`] by the
    /// first projection: y1, y2 over x1 and y3 over x2.
    fn sample_pred() -> IrPredicate {
        let base = base_ks();
        let src = PartitionedAssembly::new(
            "Y",
            [
                ("y1".into(), t("<K, K>")),
                ("y2".into(), t("<K, S>")),
                ("y3".into(), t("<S, K>")),
            ],
        )
        .unwrap();
        let map: BTreeMap<ElemId, ElemId> = [
            ("y1".to_string(), "x1".to_string()),
            ("y2".to_string(), "x1".to_string()),
            ("y3".to_string(), "x2".to_string()),
        ]
        .into();
        let display = AsmMorphism::new("f", src.clone(), base, map, term::p1_c()).unwrap();
        let values: PredValues = [
            ("y1".to_string(), set(&["K"])),
            ("y2".to_string(), set(&["S"])),
            ("y3".to_string(), set(&["K", "S"])),
        ]
        .into();
        let alpha = BasePredicate::new(src, values).unwrap();
        IrPredicate::new(display, alpha).unwrap()
    }

    /// A second predicate over the same base: one element per fibre, named
    /// `⟨φ(x), I⟩`.
    fn second_pred() -> IrPredicate {
        let base = base_ks();
        let src = PartitionedAssembly::new(
            "Z",
            [("z1".into(), t("<K, I>")), ("z2".into(), t("<S, I>"))],
        )
        .unwrap();
        let map: BTreeMap<ElemId, ElemId> =
            [("z1".to_string(), "x1".to_string()), ("z2".to_string(), "x2".to_string())].into();
        let display = AsmMorphism::new("g", src.clone(), base, map, term::p1_c()).unwrap();
        let values: PredValues =
            [("z1".to_string(), set(&["K K"])), ("z2".to_string(), TermSet::new())].into();
        let alpha = BasePredicate::new(src, values).unwrap();
        IrPredicate::new(display, alpha).unwrap()
    }

    #[test]
    fn reflexivity_holds() {
        let p = sample_pred();
        assert!(ir_leq(&p, &p, &reflexivity(&p), &pca()).is_holds());
    }

    #[test]
    fn top_and_bottom_bracket_everything() {
        let p = sample_pred();
        let top = ir_top(p.base());
        assert!(ir_leq(&p, &top, &top_witness(&p), &pca()).is_holds());
        let bot = ir_bottom(p.base());
        assert!(bot.source().is_empty());
        assert!(ir_leq(&bot, &p, &bottom_witness(&bot, &p), &pca()).is_holds());
    }

    #[test]
    fn wrong_boundary_or_oracle_witnesses_fail() {
        let p = sample_pred();
        let q = second_pred();
        // Mediator with the wrong boundary.
        let w = reflexivity(&p);
        assert!(matches!(ir_leq(&p, &q, &w, &pca()), Verdict::Fails { .. }));
        // Oracle-tainted ℓ is rejected outright.
        let tainted = IrWitness {
            mediator: asm::identity(p.source()),
            ell: Term::app(Term::oracle("jump"), term::p2_c()),
        };
        assert!(matches!(ir_leq(&p, &p, &tainted, &pca()), Verdict::Fails { .. }));
    }

    #[test]
    fn meet_projections_and_pairing() {
        let p = sample_pred();
        let q = second_pred();
        let m = ir_meet(&p, &q).unwrap();
        assert!(ir_leq(&m.predicate, &p, &m.to_left, &pca()).is_holds());
        assert!(ir_leq(&m.predicate, &q, &m.to_right, &pca()).is_holds());
        let mm = ir_meet(&p, &p).unwrap();
        let diag = meet_pair(&reflexivity(&p), &reflexivity(&p), &mm).unwrap();
        assert!(ir_leq(&p, &mm.predicate, &diag, &pca()).is_holds());
    }

    #[test]
    fn meet_values_are_tagged_unions() {
        let p = sample_pred();
        let q = second_pred();
        let m = ir_meet(&p, &q).unwrap();
        let got = m.predicate.value_at(&pair_id("y1", "z1"));
        assert_eq!(got, term::oplus(&set(&["K"]), &set(&["K K"])));
    }

    #[test]
    fn join_injections_and_copairing() {
        let p = sample_pred();
        let q = second_pred();
        let j = ir_join(&p, &q).unwrap();
        assert!(ir_leq(&p, &j.predicate, &j.from_left, &pca()).is_holds());
        assert!(ir_leq(&q, &j.predicate, &j.from_right, &pca()).is_holds());
        let jj = ir_join(&p, &p).unwrap();
        let fold = join_copair(&reflexivity(&p), &reflexivity(&p), &jj).unwrap();
        assert!(ir_leq(&jj.predicate, &p, &fold, &pca()).is_holds());
    }

    #[test]
    fn composite_witnesses_verify() {
        let p = sample_pred();
        let q = second_pred();
        let m = ir_meet(&p, &q).unwrap();
        let c = compose_witnesses(&m.to_left, &reflexivity(&p)).unwrap();
        assert!(ir_leq(&m.predicate, &p, &c, &pca()).is_holds());
    }

    #[test]
    fn reindex_along_identity_is_isomorphic() {
        let p = sample_pred();
        let idm = asm::identity(p.base());
        let r = ir_reindex(&idm, &p).unwrap();
        let pb = asm::pullback(p.display(), &idm).unwrap();
        let down = IrWitness {
            mediator: AsmMorphism::new(
                "unpair",
                r.source().clone(),
                p.source().clone(),
                pb.proj1.map().clone(),
                term::p1_c(),
            )
            .unwrap(),
            ell: term::p2_c(),
        };
        assert!(ir_leq(&r, &p, &down, &pca()).is_holds());
        let mut up_map = BTreeMap::new();
        for y in p.source().carrier() {
            up_map.insert(y.clone(), pair_id(y, &p.display().map()[y]));
        }
        let up = IrWitness {
            mediator: AsmMorphism::new(
                "repair",
                p.source().clone(),
                r.source().clone(),
                up_map,
                lam(
                    &["s"],
                    LambdaExpr::pair(
                        LambdaExpr::var("s"),
                        LambdaExpr::app(LambdaExpr::Const(term::p1_c()), LambdaExpr::var("s")),
                    ),
                ),
            )
            .unwrap(),
            ell: term::p2_c(),
        };
        assert!(ir_leq(&p, &r, &up, &pca()).is_holds());
    }

    #[test]
    fn exists_along_identity_keeps_the_order() {
        let p = sample_pred();
        let e = ir_exists(&asm::identity(p.base()), &p).unwrap();
        let fwd = IrWitness { mediator: asm::identity(p.source()), ell: term::p2_c() };
        assert!(ir_leq(&p, &e, &fwd, &pca()).is_holds());
        let bwd = IrWitness { mediator: asm::identity(e.source()), ell: term::p2_c() };
        assert!(ir_leq(&e, &p, &bwd, &pca()).is_holds());
    }

    #[test]
    fn implication_from_false_antecedent_is_top() {
        let base = base_ks();
        let bot = ir_bottom(&base);
        let q = sample_pred();
        let u = ImplicationUniverse::small();
        let imp = ir_implication(&bot, &q, &u, &pca()).unwrap();
        assert!(!imp.tuples.is_empty());
        assert!(imp.tuples.values().all(|tu| tu.k.is_empty()));
        // ⊤ ≤ (⊥ ⇒ q): per base element pick the tuple (∅-values, I, I).
        let top = ir_top(&base);
        let mut map = BTreeMap::new();
        for x in base.carrier() {
            let id = imp
                .find(x, &BTreeMap::new(), &TermSet::new(), &term::i(), &term::i())
                .expect("tuple with empty value-set and identity components");
            map.insert(x.clone(), id.clone());
        }
        let realizer = lam(
            &["s"],
            LambdaExpr::pair(
                LambdaExpr::var("s"),
                LambdaExpr::pair(LambdaExpr::Const(term::i()), LambdaExpr::Const(term::i())),
            ),
        );
        let mediator = AsmMorphism::new(
            "pick",
            base.clone(),
            imp.predicate.source().clone(),
            map,
            realizer,
        )
        .unwrap();
        let w = IrWitness { mediator, ell: term::i() };
        assert!(ir_leq(&top, &imp.predicate, &w, &pca()).is_holds());
        assert!(ir_leq(&imp.predicate, &top, &top_witness(&imp.predicate), &pca()).is_holds());
    }

    #[test]
    fn implication_over_an_empty_universe_is_empty() {
        let p = sample_pred();
        let u = ImplicationUniverse::new(vec![], vec![]);
        let imp = ir_implication(&p, &p, &u, &pca()).unwrap();
        assert!(imp.tuples.is_empty());
        assert!(imp.predicate.source().is_empty());
    }

    #[test]
    fn curry_uncurry_roundtrip_after_universe_extension() {
        let p = sample_pred();
        let meet = ir_meet(&p, &p).unwrap();
        let w = meet.to_left.clone(); // p∧p ≤ p
        let mut u = ImplicationUniverse::small();
        let imp0 = ir_implication(&p, &p, &u, &pca()).unwrap();
        assert!(matches!(
            ir_curry(&p, &meet, &imp0, &w),
            Err(DoctrineError::UniverseTooSmall(_))
        ));
        let (vals, reals) = curry_requirements(&p, &w);
        for v in vals {
            u.register_value(v);
        }
        u.register_realizers(reals);
        let imp = ir_implication(&p, &p, &u, &pca()).unwrap();
        let cw = ir_curry(&p, &meet, &imp, &w).expect("universe now large enough");
        assert!(ir_leq(&p, &imp.predicate, &cw, &pca()).is_holds());
        let uw = ir_uncurry(&meet, &imp, &p, &cw).unwrap();
        assert!(ir_leq(&meet.predicate, &p, &uw, &pca()).is_holds());
    }

    #[test]
    fn forall_mates_roundtrip_after_pool_extension() {
        let p = sample_pred();
        let f = asm::identity(p.base());
        let mut pool = TermPool::standard(2, &[]);
        let fa0 = ir_forall(&f, &p, &pool, &pca()).unwrap();
        assert!(fa0.tuples.is_empty());
        // Hand witness for reindex_f(p) ≤ p.
        let rx = ir_reindex(&f, &p).unwrap();
        let pb = asm::pullback(p.display(), &f).unwrap();
        let down = IrWitness {
            mediator: AsmMorphism::new(
                "unpair",
                rx.source().clone(),
                p.source().clone(),
                pb.proj1.map().clone(),
                term::p1_c(),
            )
            .unwrap(),
            ell: term::p2_c(),
        };
        assert!(ir_leq(&rx, &p, &down, &pca()).is_holds());
        assert!(matches!(
            forall_mate_up(&p, &f, &fa0, &down),
            Err(DoctrineError::PoolTooSmall(_))
        ));
        pool.extend(mate_up_requirements(&p, &down));
        let fa = ir_forall(&f, &p, &pool, &pca()).unwrap();
        let up = forall_mate_up(&p, &f, &fa, &down).expect("pool now large enough");
        assert!(ir_leq(&p, &fa.predicate, &up, &pca()).is_holds());
        let back = forall_mate_down(&p, &f, &p, &fa, &up).unwrap();
        assert!(ir_leq(&rx, &p, &back, &pca()).is_holds());
    }

    #[test]
    fn forall_over_an_empty_fibre_quantifies_vacuously() {
        // f maps the single source element to x1; the fibre over x2 is
        // empty, so the quantifier there has exactly the empty section and
        // every pool value realizes it.
        let base = base_ks();
        let y = PartitionedAssembly::new("Y", [("y".into(), t("<K, K>"))]).unwrap();
        let f = AsmMorphism::new(
            "f",
            y.clone(),
            base.clone(),
            [("y".to_string(), "x1".to_string())].into(),
            term::p1_c(),
        )
        .unwrap();
        let alpha = BasePredicate::new(y.clone(), [("y".to_string(), set(&["K"]))].into()).unwrap();
        let p = IrPredicate::new(asm::identity(&y), alpha).unwrap();
        let pool = TermPool::from_items(vec![term::i()]);
        let fa = ir_forall(&f, &p, &pool, &pca()).unwrap();
        let over_x2: Vec<_> = fa.tuples.values().filter(|tu| tu.x == "x2").collect();
        assert_eq!(over_x2.len(), 1);
        assert!(over_x2[0].k.is_empty());
        assert!(fa.predicate.value_at(fa.find("x2", &BTreeMap::new(), &term::i()).unwrap()).is_empty());
    }

    #[test]
    fn classification_collapses_duplicate_rows() {
        let base = base_ks();
        let src = PartitionedAssembly::new(
            "Y",
            [
                ("y1".into(), t("<K, K>")),
                ("y2".into(), t("<K, S>")),
                ("y3".into(), t("<S, K>")),
                ("y4".into(), t("<K, K>")),
            ],
        )
        .unwrap();
        let map: BTreeMap<ElemId, ElemId> = [
            ("y1".to_string(), "x1".to_string()),
            ("y2".to_string(), "x1".to_string()),
            ("y3".to_string(), "x2".to_string()),
            ("y4".to_string(), "x1".to_string()),
        ]
        .into();
        let display = AsmMorphism::new("f", src.clone(), base, map, term::p1_c()).unwrap();
        let values: PredValues = [
            ("y1".to_string(), set(&["K"])),
            ("y2".to_string(), set(&["S"])),
            ("y3".to_string(), set(&["K", "S"])),
            ("y4".to_string(), set(&["K"])),
        ]
        .into();
        let p = IrPredicate::new(display, BasePredicate::new(src, values).unwrap()).unwrap();
        let cls = classify(&p).unwrap();
        assert_eq!(cls.canonical.source().len(), 3);
        assert!(ir_leq(&p, &cls.canonical, &cls.to_canonical, &pca()).is_holds());
        assert!(ir_leq(&cls.canonical, &p, &cls.from_canonical, &pca()).is_holds());
        assert_eq!(cls.chi["x1"][&t("<K, K>")], BTreeSet::from([set(&["K"])]));
        assert_eq!(cls.chi["x1"][&t("<K, S>")], BTreeSet::from([set(&["S"])]));
        assert_eq!(cls.chi["x2"][&t("<S, K>")], BTreeSet::from([set(&["K", "S"])]));
    }

    #[test]
    fn search_finds_a_projection_witness() {
        let p = sample_pred();
        let m = ir_meet(&p, &p).unwrap();
        let inj = lam(
            &["c"],
            LambdaExpr::pair(
                LambdaExpr::Const(term::true_c()),
                LambdaExpr::app(LambdaExpr::Const(term::p2_c()), LambdaExpr::var("c")),
            ),
        );
        let pool = TermPool::standard(2, &[inj]);
        let w = search_ir_leq(&m.predicate, &p, &pool, &pca()).expect("witness found");
        assert!(ir_leq(&m.predicate, &p, &w, &pca()).is_holds());
        assert!(search_ir_leq(&p, &ir_bottom(p.base()), &pool, &pca()).is_none());
    }

    #[test]
    fn mismatched_bases_are_rejected() {
        let other = PartitionedAssembly::new("W", [("w".into(), t("K"))]).unwrap();
        assert!(matches!(
            ir_meet(&sample_pred(), &ir_top(&other)),
            Err(DoctrineError::BaseMismatch(_, _))
        ));
        assert!(matches!(
            ir_join(&sample_pred(), &ir_top(&other)),
            Err(DoctrineError::BaseMismatch(_, _))
        ));
    }
}

