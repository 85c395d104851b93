//! Extended Weihrauch predicates and their equivalence with displayed
//! predicates.
//!
//! A predicate here assigns to finitely many pairs `(x, a)` of a base
//! element and a tag term a nonempty finite family of finite term sets;
//! unsupported pairs denote the empty family. `f ≤ g` holds when oracle-free
//! `ℓ₁, ℓ₂` send every supported `(x, a)` to a supported `(x, ℓ₁·⟨φ(x),a⟩)`
//! such that each `A ∈ f(x,a)` admits some `B` in the image family with
//! `ℓ₂·⟨a, q⟩ ∈ A` for all `q ∈ B`.
//!
//! The translations `F` ([`to_ew`]) and `G` ([`to_ir`]) exchange this
//! presentation with the displayed one: `F` collects the value-sets of a
//! display fibre by name, `G` spreads a family out into one carrier element
//! per `(x, a, A)` triple. Both are monotone with explicitly constructed
//! witness transports, and the round trips are isomorphisms up to verified
//! witnesses ([`fg_witnesses`], [`gf_witnesses`]). All fibre algebra on this
//! side ([`ew_meet`], [`ew_top`], [`ew_bottom`]) is computed through the
//! translation rather than re-derived.
//!
//! Over the one-point assembly the order collapses to plain degree
//! reducibility between families indexed by terms alone; [`degree_leq`]
//! implements that definition directly and [`degree_to_ew`] embeds it,
//! witness-preservingly, into the fibre over the terminal.

use std::collections::{BTreeMap, BTreeSet};

use crate::asm::{AsmMorphism, ElemId, PartitionedAssembly};
use crate::eir::DoctrineError;
use crate::ir::{self, IrPredicate, IrWitness};
use crate::pool::TermPool;
use crate::term::{self, lam, LambdaExpr, PcaSpec, Reduction, Term, TermSet};
use crate::Verdict;

/// A supported point: base element plus tag term.
pub type SupportKey = (ElemId, Term);

/// A finite-support extended Weihrauch predicate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EwPredicate {
    base: PartitionedAssembly,
    support: BTreeMap<SupportKey, BTreeSet<TermSet>>,
}

impl EwPredicate {
    /// Build from explicit entries. Tags and inner terms must be values;
    /// entries with an empty family are simply not supported and are
    /// dropped.
    pub fn new(
        base: PartitionedAssembly,
        entries: impl IntoIterator<Item = (SupportKey, BTreeSet<TermSet>)>,
        pca: &PcaSpec,
    ) -> Result<Self, DoctrineError> {
        let mut support = BTreeMap::new();
        for ((x, a), sets) in entries {
            if !base.contains(&x) {
                return Err(DoctrineError::UnknownElement(x, base.label().to_string()));
            }
            if !term::is_value(&a, pca) {
                return Err(DoctrineError::NotAValue(a.to_string()));
            }
            for set in &sets {
                for t in set {
                    if !term::is_value(t, pca) {
                        return Err(DoctrineError::NotAValue(t.to_string()));
                    }
                }
            }
            if sets.is_empty() {
                continue;
            }
            support
                .entry((x, a))
                .or_insert_with(BTreeSet::new)
                .extend(sets);
        }
        Ok(EwPredicate { base, support })
    }

    pub fn base(&self) -> &PartitionedAssembly {
        &self.base
    }

    pub fn support(&self) -> &BTreeMap<SupportKey, BTreeSet<TermSet>> {
        &self.support
    }

    /// The family at `(x, a)`; empty means unsupported.
    pub fn at(&self, x: &str, a: &Term) -> BTreeSet<TermSet> {
        self.support.get(&(x.to_string(), a.clone())).cloned().unwrap_or_default()
    }

    pub fn is_supported(&self, x: &str, a: &Term) -> bool {
        self.support.contains_key(&(x.to_string(), a.clone()))
    }
}

/// An order witness: the tag transformer `ℓ₁` and the answer transformer
/// `ℓ₂`, both oracle-free.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EwWitness {
    pub ell1: Term,
    pub ell2: Term,
}

/// The reflexivity witness `(λξ.p₂ξ, p₂)`.
pub fn ew_reflexivity() -> EwWitness {
    EwWitness {
        ell1: lam(
            &["c"],
            LambdaExpr::app(LambdaExpr::Const(term::p2_c()), LambdaExpr::var("c")),
        ),
        ell2: term::p2_c(),
    }
}

/// Does `w` witness `f ≤ g`?
///
/// For every supported `(x, a)` of `f`: `ℓ₁·⟨φ(x), a⟩` must converge to a
/// tag `a′` supported in `g`, and every `A ∈ f(x,a)` must admit some
/// `B ∈ g(x,a′)` (decided by exhaustive scan) with `ℓ₂·⟨a, q⟩ ∈ A` for all
/// `q ∈ B`. A diverging or off-support `ℓ₁` is a definite failure; only
/// exhausted fuel downgrades the verdict to unknown.
pub fn leq_ew(f: &EwPredicate, g: &EwPredicate, w: &EwWitness, pca: &PcaSpec) -> Verdict {
    if f.base() != g.base() {
        return Verdict::fails(format!(
            "different bases: `{}` vs `{}`",
            f.base().label(),
            g.base().label()
        ));
    }
    for (label, t) in [("ℓ₁", &w.ell1), ("ℓ₂", &w.ell2)] {
        if !t.oracle_free() {
            return Verdict::fails(format!("{label} = {t} mentions an oracle"));
        }
    }
    let mut unknown: Option<String> = None;
    for ((x, a), fsets) in f.support() {
        let name = match f.base().name(x) {
            Ok(n) => n,
            Err(e) => return Verdict::fails(e.to_string()),
        };
        let a_prime = match term::apply(&w.ell1, &term::pair_of(name, a), pca) {
            Reduction::Converged { value, .. } => value,
            Reduction::Stuck { .. } => {
                return Verdict::fails(format!("ℓ₁ is stuck on `{x}` with tag {a}"));
            }
            Reduction::FuelExhausted { .. } => {
                unknown.get_or_insert_with(|| format!("ℓ₁ out of fuel on `{x}`"));
                continue;
            }
        };
        let gsets = g.at(x, &a_prime);
        if gsets.is_empty() {
            return Verdict::fails(format!(
                "ℓ₁ sends `{x}` tag {a} to {a_prime}, where the target is unsupported"
            ));
        }
        for a_set in fsets {
            let mut passed = false;
            let mut scan_hit_fuel = false;
            'b_scan: for b_set in &gsets {
                for q in b_set {
                    match term::apply(&w.ell2, &term::pair_of(a, q), pca) {
                        Reduction::Converged { value, .. } if a_set.contains(&value) => {}
                        Reduction::FuelExhausted { .. } => {
                            scan_hit_fuel = true;
                            continue 'b_scan;
                        }
                        _ => continue 'b_scan,
                    }
                }
                passed = true;
                break;
            }
            if !passed {
                if scan_hit_fuel {
                    unknown.get_or_insert_with(|| format!("ℓ₂ out of fuel on `{x}`"));
                } else {
                    return Verdict::fails(format!(
                        "no target family member maps into the source set at `{x}` tag {a}"
                    ));
                }
            }
        }
    }
    match unknown {
        Some(reason) => Verdict::unknown(reason),
        None => Verdict::Holds,
    }
}

/// Compose `w1 : f ≤ g` and `w2 : g ≤ h` over a constantly-named base.
///
/// The second answer transformer needs `ℓ₁·⟨φ(x), a⟩` back, and only the
/// tag `a` is in scope — so the base name must be a single constant `c`,
/// embedded into the composite:
/// `(λξ. m₁⟨p₁ξ, ℓ₁ξ⟩,  λξ. ℓ₂⟨p₁ξ, m₂⟨ℓ₁⟨c, p₁ξ⟩, p₂ξ⟩⟩)`.
pub fn compose_ew_witnesses(
    base: &PartitionedAssembly,
    w1: &EwWitness,
    w2: &EwWitness,
) -> Result<EwWitness, DoctrineError> {
    let mut names = base.carrier().iter().map(|x| base.name(x).expect("carrier element"));
    let c = names.next().cloned().unwrap_or_else(term::i);
    if names.any(|n| n != &c) {
        return Err(DoctrineError::MixedNames(base.label().to_string()));
    }
    let p1 = || LambdaExpr::Const(term::p1_c());
    let p2 = || LambdaExpr::Const(term::p2_c());
    let var = LambdaExpr::var;
    let ell1 = lam(
        &["c"],
        LambdaExpr::app(
            LambdaExpr::Const(w2.ell1.clone()),
            LambdaExpr::pair(
                LambdaExpr::app(p1(), var("c")),
                LambdaExpr::app(LambdaExpr::Const(w1.ell1.clone()), var("c")),
            ),
        ),
    );
    let inner_tag = LambdaExpr::app(
        LambdaExpr::Const(w1.ell1.clone()),
        LambdaExpr::pair(LambdaExpr::Const(c), LambdaExpr::app(p1(), var("c"))),
    );
    let ell2 = lam(
        &["c"],
        LambdaExpr::app(
            LambdaExpr::Const(w1.ell2.clone()),
            LambdaExpr::pair(
                LambdaExpr::app(p1(), var("c")),
                LambdaExpr::app(
                    LambdaExpr::Const(w2.ell2.clone()),
                    LambdaExpr::pair(inner_tag, LambdaExpr::app(p2(), var("c"))),
                ),
            ),
        ),
    );
    Ok(EwWitness { ell1, ell2 })
}

/// Reindex `g` along `h : Y → X`: the support over `y` is
/// `(y, ⟨ψ(y), a⟩) ↦ g(h(y), a)` for every tag `a` supported at `h(y)`.
pub fn ew_reindex(
    h: &AsmMorphism,
    g: &EwPredicate,
    pca: &PcaSpec,
) -> Result<EwPredicate, DoctrineError> {
    if h.target() != g.base() {
        return Err(DoctrineError::EndMismatch(
            g.base().label().to_string(),
            h.target().label().to_string(),
        ));
    }
    let mut entries = Vec::new();
    for y in h.source().carrier() {
        let x = &h.map()[y];
        let psi_y = h.source().name(y)?;
        for ((gx, a), sets) in g.support() {
            if gx == x {
                entries.push(((y.clone(), term::pair_of(psi_y, a)), sets.clone()));
            }
        }
    }
    EwPredicate::new(h.source().clone(), entries, pca)
}

// ---------------------------------------------------------------------------
// The translations F and G
// ---------------------------------------------------------------------------

/// `F`: collect the value-sets of the display fibre by name:
/// `(x, a) ↦ {α(y) | f(y) = x, ψ(y) = a}`, supported where nonempty.
pub fn to_ew(p: &IrPredicate) -> EwPredicate {
    let mut support: BTreeMap<SupportKey, BTreeSet<TermSet>> = BTreeMap::new();
    for y in p.source().carrier() {
        let x = p.display().map()[y].clone();
        let a = p.source().name(y).expect("carrier element").clone();
        support.entry((x, a)).or_default().insert(p.value_at(y));
    }
    EwPredicate { base: p.base().clone(), support }
}

fn triple_id(x: &str, a: &Term, vs: &TermSet) -> ElemId {
    format!("({x},{a},{})", ir::value_set_id(vs))
}

/// A translated predicate together with its carrier decomposition.
#[derive(Debug, Clone)]
pub struct GData {
    pub predicate: IrPredicate,
    /// carrier id ↦ the `(x, a, A)` triple it denotes.
    pub triples: BTreeMap<ElemId, (ElemId, Term, TermSet)>,
}

/// `G`: one carrier element per triple `(x, a, A)` with `A` in the family at
/// `(x, a)`, named `⟨φ(x), a⟩`, displayed to `x` by the first projection,
/// carrying the value-set `A`.
pub fn to_ir(g: &EwPredicate) -> Result<GData, DoctrineError> {
    let mut elements = Vec::new();
    let mut values = crate::asm::PredValues::new();
    let mut map = BTreeMap::new();
    let mut triples = BTreeMap::new();
    for ((x, a), sets) in g.support() {
        let phi_x = g.base().name(x)?;
        for a_set in sets {
            let id = triple_id(x, a, a_set);
            elements.push((id.clone(), term::pair_of(phi_x, a)));
            values.insert(id.clone(), a_set.clone());
            map.insert(id.clone(), x.clone());
            triples.insert(id, (x.clone(), a.clone(), a_set.clone()));
        }
    }
    let carrier =
        PartitionedAssembly::new(&format!("spread({})", g.base().label()), elements)?;
    let display = AsmMorphism::new(
        &format!("spread_{}", g.base().label()),
        carrier.clone(),
        g.base().clone(),
        map,
        term::p1_c(),
    )?;
    let alpha = crate::eir::BasePredicate::new(carrier, values)?;
    Ok(GData { predicate: IrPredicate::new(display, alpha)?, triples })
}

// ---------------------------------------------------------------------------
// Round-trip witnesses and monotone transports
// ---------------------------------------------------------------------------

/// `F(G(g))` with verified witnesses both ways against `g`.
#[derive(Debug, Clone)]
pub struct FgBundle {
    pub round: EwPredicate,
    /// Verified witness for `F(G(g)) ≤ g`: `(λξ. p₂(p₂ξ), p₂)`.
    pub to: EwWitness,
    /// Verified witness for `g ≤ F(G(g))`: `(I, p₂)` — the round trip tags
    /// `a` as `⟨φ(x), a⟩`, which is exactly the argument `ℓ₁` receives.
    pub from: EwWitness,
}

/// Build `F(G(g))` and verify the two canonical witnesses.
pub fn fg_witnesses(g: &EwPredicate, pca: &PcaSpec) -> Result<FgBundle, DoctrineError> {
    let spread = to_ir(g)?;
    let round = to_ew(&spread.predicate);
    let to = EwWitness {
        ell1: lam(
            &["c"],
            LambdaExpr::app(
                LambdaExpr::Const(term::p2_c()),
                LambdaExpr::app(LambdaExpr::Const(term::p2_c()), LambdaExpr::var("c")),
            ),
        ),
        ell2: term::p2_c(),
    };
    let down = leq_ew(&round, g, &to, pca);
    if !down.is_holds() {
        return Err(DoctrineError::VerificationFailed(format!(
            "F∘G lower witness on `{}`: {down}",
            g.base().label()
        )));
    }
    let from = EwWitness { ell1: term::i(), ell2: term::p2_c() };
    let up = leq_ew(g, &round, &from, pca);
    if !up.is_holds() {
        return Err(DoctrineError::VerificationFailed(format!(
            "F∘G upper witness on `{}`: {up}",
            g.base().label()
        )));
    }
    Ok(FgBundle { round, to, from })
}

/// `G(F(p))` with verified witnesses both ways against `p`.
#[derive(Debug, Clone)]
pub struct GfBundle {
    pub round: GData,
    /// Verified witness for `p ≤ G(F(p))`: mediator `y ↦ (f(y), ψ(y), α(y))`
    /// realized by `λs.⟨r_f s, s⟩`, membership `p₂`.
    pub to: IrWitness,
    /// Verified witness for `G(F(p)) ≤ p`: each triple returns to its least
    /// representative, realized by `p₂`, membership `p₂`.
    pub from: IrWitness,
}

/// Build `G(F(p))` and verify the two canonical witnesses.
pub fn gf_witnesses(p: &IrPredicate, pca: &PcaSpec) -> Result<GfBundle, DoctrineError> {
    let round = to_ir(&to_ew(p))?;
    let mut to_map = BTreeMap::new();
    let mut from_map: BTreeMap<ElemId, ElemId> = BTreeMap::new();
    for y in p.source().carrier() {
        let x = &p.display().map()[y];
        let id = triple_id(x, p.source().name(y)?, &p.value_at(y));
        to_map.insert(y.clone(), id.clone());
        from_map.entry(id).or_insert_with(|| y.clone());
    }
    let to = IrWitness {
        mediator: AsmMorphism::new(
            "collect",
            p.source().clone(),
            round.predicate.source().clone(),
            to_map,
            lam(
                &["s"],
                LambdaExpr::pair(
                    LambdaExpr::app(
                        LambdaExpr::Const(p.display().realizer().clone()),
                        LambdaExpr::var("s"),
                    ),
                    LambdaExpr::var("s"),
                ),
            ),
        )?,
        ell: term::p2_c(),
    };
    let up = ir::ir_leq(p, &round.predicate, &to, pca);
    if !up.is_holds() {
        return Err(DoctrineError::VerificationFailed(format!(
            "G∘F upper witness on `{}`: {up}",
            p.source().label()
        )));
    }
    let from = IrWitness {
        mediator: AsmMorphism::new(
            "choose",
            round.predicate.source().clone(),
            p.source().clone(),
            from_map,
            term::p2_c(),
        )?,
        ell: term::p2_c(),
    };
    let down = ir::ir_leq(&round.predicate, p, &from, pca);
    if !down.is_holds() {
        return Err(DoctrineError::VerificationFailed(format!(
            "G∘F lower witness on `{}`: {down}",
            p.source().label()
        )));
    }
    Ok(GfBundle { round, to, from })
}

/// Transport a displayed-order witness along `F`: `(λξ. r(p₂ξ), ℓ)` where
/// `r` realizes the mediator.
pub fn transport_f(w: &IrWitness) -> EwWitness {
    EwWitness {
        ell1: lam(
            &["c"],
            LambdaExpr::app(
                LambdaExpr::Const(w.mediator.realizer().clone()),
                LambdaExpr::app(LambdaExpr::Const(term::p2_c()), LambdaExpr::var("c")),
            ),
        ),
        ell2: w.ell.clone(),
    }
}

/// Transport `w : f ≤ g` along `G` into a witness `G(f) ≤ G(g)`.
///
/// The mediator sends `(x, a, A)` to `(x, a′, B)` with `a′ = ℓ₁·⟨φ(x), a⟩`
/// and `B` the first family member at `(x, a′)` that `ℓ₂·⟨a,·⟩` maps into
/// `A`; it is realized by `λξ.⟨p₁ξ, ℓ₁ξ⟩` and the membership term is
/// `λξ. ℓ₂⟨p₂(p₁ξ), p₂ξ⟩`.
pub fn transport_g(
    f: &EwPredicate,
    g: &EwPredicate,
    w: &EwWitness,
    pca: &PcaSpec,
) -> Result<(GData, GData, IrWitness), DoctrineError> {
    let spread_f = to_ir(f)?;
    let spread_g = to_ir(g)?;
    let mut map = BTreeMap::new();
    for (id, (x, a, a_set)) in &spread_f.triples {
        let phi_x = f.base().name(x)?;
        let a_prime = match term::apply(&w.ell1, &term::pair_of(phi_x, a), pca) {
            Reduction::Converged { value, .. } => value,
            other => {
                return Err(DoctrineError::VerificationFailed(format!(
                    "ℓ₁ does not converge on `{x}` tag {a}: {other:?}"
                )));
            }
        };
        let chosen = g.at(x, &a_prime).into_iter().find(|b_set| {
            b_set.iter().all(|q| {
                matches!(term::apply(&w.ell2, &term::pair_of(a, q), pca),
                    Reduction::Converged { value, .. } if a_set.contains(&value))
            })
        });
        let b_set = chosen.ok_or_else(|| {
            DoctrineError::VerificationFailed(format!(
                "no family member at `{x}` tag {a_prime} maps into the source set"
            ))
        })?;
        map.insert(id.clone(), triple_id(x, &a_prime, &b_set));
    }
    let realizer = lam(
        &["c"],
        LambdaExpr::pair(
            LambdaExpr::app(LambdaExpr::Const(term::p1_c()), LambdaExpr::var("c")),
            LambdaExpr::app(LambdaExpr::Const(w.ell1.clone()), LambdaExpr::var("c")),
        ),
    );
    let ell = lam(
        &["c"],
        LambdaExpr::app(
            LambdaExpr::Const(w.ell2.clone()),
            LambdaExpr::pair(
                LambdaExpr::app(
                    LambdaExpr::Const(term::p2_c()),
                    LambdaExpr::app(LambdaExpr::Const(term::p1_c()), LambdaExpr::var("c")),
                ),
                LambdaExpr::app(LambdaExpr::Const(term::p2_c()), LambdaExpr::var("c")),
            ),
        ),
    );
    let mediator = AsmMorphism::new(
        "transport",
        spread_f.predicate.source().clone(),
        spread_g.predicate.source().clone(),
        map,
        realizer,
    )?;
    Ok((spread_f, spread_g, IrWitness { mediator, ell }))
}

// ---------------------------------------------------------------------------
// Fibre algebra through the translation
// ---------------------------------------------------------------------------

/// `⊤` in this presentation: `(x, φ(x)) ↦ {∅}`.
pub fn ew_top(x: &PartitionedAssembly) -> EwPredicate {
    to_ew(&ir::ir_top(x))
}

/// `⊥`: empty support.
pub fn ew_bottom(x: &PartitionedAssembly) -> EwPredicate {
    EwPredicate { base: x.clone(), support: BTreeMap::new() }
}

/// Binary meet, computed as `F(G(f) ∧ G(g))`.
pub fn ew_meet(f: &EwPredicate, g: &EwPredicate) -> Result<EwPredicate, DoctrineError> {
    let spread_f = to_ir(f)?;
    let spread_g = to_ir(g)?;
    let meet = ir::ir_meet(&spread_f.predicate, &spread_g.predicate)?;
    Ok(to_ew(&meet.predicate))
}

/// Existential image along `f`, computed as `F(∃_f G(g))`.
pub fn ew_exists(f: &AsmMorphism, g: &EwPredicate) -> Result<EwPredicate, DoctrineError> {
    let spread = to_ir(g)?;
    Ok(to_ew(&ir::ir_exists(f, &spread.predicate)?))
}

/// Enumerate every projection path valid on all of `inputs` at once, as
/// `(extracted value per input, expression in the variable "c")`, the empty
/// path first, then depth-first through pair structure.
fn projection_paths(inputs: &[Term]) -> Vec<(Vec<Term>, LambdaExpr)> {
    fn walk(current: (Vec<Term>, LambdaExpr), out: &mut Vec<(Vec<Term>, LambdaExpr)>) {
        let split: Option<(Vec<Term>, Vec<Term>)> = current
            .0
            .iter()
            .map(|v| term::decode_pair(v).map(|(a, b)| (a.clone(), b.clone())))
            .collect::<Option<Vec<_>>>()
            .map(|pairs| pairs.into_iter().unzip());
        out.push(current.clone());
        if current.0.is_empty() {
            return;
        }
        if let Some((lefts, rights)) = split {
            let l_expr =
                LambdaExpr::app(LambdaExpr::Const(term::p1_c()), current.1.clone());
            let r_expr = LambdaExpr::app(LambdaExpr::Const(term::p2_c()), current.1);
            walk((lefts, l_expr), out);
            walk((rights, r_expr), out);
        }
    }
    let mut out = Vec::new();
    walk((inputs.to_vec(), LambdaExpr::var("c")), &mut out);
    out
}

/// Synthesize one oracle-free `λc.e` with `e(input) = output` on every
/// sample, built from pair projections out of the input, constants, and
/// pairing — or `None` when the targets are not reachable that way.
///
/// This is how witnesses are found against predicates whose tags were
/// produced by reindexing, meets, and existential images: those tags are
/// nested pairs of material already present in the argument, far outside
/// what a fixed candidate pool can anticipate.
pub fn synthesize_alignment(samples: &[(Term, Term)]) -> Option<Term> {
    fn go(
        targets: &[Term],
        paths: &[(Vec<Term>, LambdaExpr)],
    ) -> Option<LambdaExpr> {
        for (values, expr) in paths {
            if values.as_slice() == targets {
                return Some(expr.clone());
            }
        }
        if let Some(first) = targets.first() {
            if targets.iter().all(|t| t == first) {
                return Some(LambdaExpr::Const(first.clone()));
            }
        }
        let split: Option<(Vec<Term>, Vec<Term>)> = targets
            .iter()
            .map(|v| term::decode_pair(v).map(|(a, b)| (a.clone(), b.clone())))
            .collect::<Option<Vec<_>>>()
            .map(|pairs| pairs.into_iter().unzip());
        if let Some((lefts, rights)) = split {
            let l = go(&lefts, paths)?;
            let r = go(&rights, paths)?;
            return Some(LambdaExpr::pair(l, r));
        }
        None
    }
    let inputs: Vec<Term> = samples.iter().map(|(i, _)| i.clone()).collect();
    let targets: Vec<Term> = samples.iter().map(|(_, o)| o.clone()).collect();
    let paths = projection_paths(&inputs);
    Some(lam(&["c"], go(&targets, &paths)?))
}

/// Cap on how many per-element target-tag combinations
/// [`synthesize_candidates`] explores.
const ALIGNMENT_COMBINATIONS: usize = 64;

/// Synthesized tag-transformer candidates for `f ≤ g`: for each way of
/// choosing a supported `g`-tag over every supported `f`-element (up to
/// [`ALIGNMENT_COMBINATIONS`], in deterministic order), try to synthesize
/// `⟨φ(x), a⟩ ↦ chosen tag` and collect the successes.
pub fn synthesize_candidates(f: &EwPredicate, g: &EwPredicate) -> Vec<Term> {
    let mut inputs = Vec::new();
    let mut options: Vec<Vec<Term>> = Vec::new();
    for (x, a) in f.support().keys() {
        let Ok(name) = f.base().name(x) else { return Vec::new() };
        inputs.push(term::pair_of(name, a));
        let tags: Vec<Term> = g
            .support()
            .keys()
            .filter(|(gx, _)| gx == x)
            .map(|(_, tag)| tag.clone())
            .collect();
        if tags.is_empty() {
            return Vec::new();
        }
        options.push(tags);
    }
    let mut found = Vec::new();
    let mut counters = vec![0usize; options.len()];
    for _ in 0..ALIGNMENT_COMBINATIONS {
        let samples: Vec<(Term, Term)> = inputs
            .iter()
            .cloned()
            .zip(counters.iter().zip(&options).map(|(&c, opts)| opts[c].clone()))
            .collect();
        if let Some(t) = synthesize_alignment(&samples) {
            if !found.contains(&t) {
                found.push(t);
            }
        }
        // Step the mixed-radix counter; stop after the last combination.
        let mut i = 0;
        loop {
            if i == counters.len() {
                return found;
            }
            counters[i] += 1;
            if counters[i] < options[i].len() {
                break;
            }
            counters[i] = 0;
            i += 1;
        }
    }
    found
}

/// Like [`search_ew_leq`], but tries synthesized tag transformers (see
/// [`synthesize_candidates`]) before the pool's own `ℓ₁` candidates.
pub fn search_ew_leq_aligned(
    f: &EwPredicate,
    g: &EwPredicate,
    pool: &TermPool,
    pca: &PcaSpec,
) -> Option<EwWitness> {
    let mut ell1s = synthesize_candidates(f, g);
    for t in pool.iter().filter(|t| t.oracle_free()) {
        if !ell1s.contains(t) {
            ell1s.push(t.clone());
        }
    }
    let ell2s: Vec<&Term> = pool.iter().filter(|t| t.oracle_free()).collect();
    for ell1 in &ell1s {
        for ell2 in &ell2s {
            let w = EwWitness { ell1: ell1.clone(), ell2: (*ell2).clone() };
            if leq_ew(f, g, &w, pca).is_holds() {
                return Some(w);
            }
        }
    }
    None
}

/// Search for a witness of `f ≤ g` over `pool`, trying oracle-free pairs in
/// pool order.
pub fn search_ew_leq(
    f: &EwPredicate,
    g: &EwPredicate,
    pool: &TermPool,
    pca: &PcaSpec,
) -> Option<EwWitness> {
    let candidates: Vec<&Term> = pool.iter().filter(|t| t.oracle_free()).collect();
    for ell1 in &candidates {
        for ell2 in &candidates {
            let w = EwWitness { ell1: (*ell1).clone(), ell2: (*ell2).clone() };
            if leq_ew(f, g, &w, pca).is_holds() {
                return Some(w);
            }
        }
    }
    None
}

// ---------------------------------------------------------------------------
// Degrees: the fibre over the point
// ---------------------------------------------------------------------------

/// A finite-support family over terms alone.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DegreePredicate {
    support: BTreeMap<Term, BTreeSet<TermSet>>,
}

impl DegreePredicate {
    /// Build from entries; tags and members must be values, empty families
    /// are dropped.
    pub fn new(
        entries: impl IntoIterator<Item = (Term, BTreeSet<TermSet>)>,
        pca: &PcaSpec,
    ) -> Result<Self, DoctrineError> {
        let mut support = BTreeMap::new();
        for (p, sets) in entries {
            if !term::is_value(&p, pca) {
                return Err(DoctrineError::NotAValue(p.to_string()));
            }
            for set in &sets {
                for t in set {
                    if !term::is_value(t, pca) {
                        return Err(DoctrineError::NotAValue(t.to_string()));
                    }
                }
            }
            if sets.is_empty() {
                continue;
            }
            support.entry(p).or_insert_with(BTreeSet::new).extend(sets);
        }
        Ok(DegreePredicate { support })
    }

    pub fn support(&self) -> &BTreeMap<Term, BTreeSet<TermSet>> {
        &self.support
    }

    pub fn at(&self, p: &Term) -> BTreeSet<TermSet> {
        self.support.get(p).cloned().unwrap_or_default()
    }
}

/// Direct degree reducibility: for every supported `p`, `ℓ₁·p` converges to
/// a supported tag whose family contains, for each `A ∈ f(p)`, some `B` with
/// `ℓ₂·⟨p, q⟩ ∈ A` for all `q ∈ B`.
pub fn degree_leq(
    f: &DegreePredicate,
    g: &DegreePredicate,
    w: &EwWitness,
    pca: &PcaSpec,
) -> Verdict {
    for (label, t) in [("ℓ₁", &w.ell1), ("ℓ₂", &w.ell2)] {
        if !t.oracle_free() {
            return Verdict::fails(format!("{label} = {t} mentions an oracle"));
        }
    }
    let mut unknown: Option<String> = None;
    for (p, fsets) in f.support() {
        let p_prime = match term::apply(&w.ell1, p, pca) {
            Reduction::Converged { value, .. } => value,
            Reduction::Stuck { .. } => {
                return Verdict::fails(format!("ℓ₁ is stuck on tag {p}"));
            }
            Reduction::FuelExhausted { .. } => {
                unknown.get_or_insert_with(|| format!("ℓ₁ out of fuel on tag {p}"));
                continue;
            }
        };
        let gsets = g.at(&p_prime);
        if gsets.is_empty() {
            return Verdict::fails(format!(
                "ℓ₁ sends tag {p} to {p_prime}, which is unsupported"
            ));
        }
        for a_set in fsets {
            let mut passed = false;
            let mut scan_hit_fuel = false;
            'b_scan: for b_set in &gsets {
                for q in b_set {
                    match term::apply(&w.ell2, &term::pair_of(p, q), pca) {
                        Reduction::Converged { value, .. } if a_set.contains(&value) => {}
                        Reduction::FuelExhausted { .. } => {
                            scan_hit_fuel = true;
                            continue 'b_scan;
                        }
                        _ => continue 'b_scan,
                    }
                }
                passed = true;
                break;
            }
            if !passed {
                if scan_hit_fuel {
                    unknown.get_or_insert_with(|| format!("ℓ₂ out of fuel on tag {p}"));
                } else {
                    return Verdict::fails(format!(
                        "no family member maps into the source set at tag {p}"
                    ));
                }
            }
        }
    }
    match unknown {
        Some(reason) => Verdict::unknown(reason),
        None => Verdict::Holds,
    }
}

/// Embed a degree as a predicate over the one-point assembly.
pub fn degree_to_ew(d: &DegreePredicate) -> EwPredicate {
    let base = crate::asm::terminal();
    let star = base.carrier()[0].clone();
    let support = d
        .support()
        .iter()
        .map(|(p, sets)| ((star.clone(), p.clone()), sets.clone()))
        .collect();
    EwPredicate { base, support }
}

/// Lift a degree witness to the fibre over the point: `ℓ₁` learns to drop
/// the name component.
pub fn lift_degree_witness(w: &EwWitness) -> EwWitness {
    EwWitness {
        ell1: lam(
            &["c"],
            LambdaExpr::app(
                LambdaExpr::Const(w.ell1.clone()),
                LambdaExpr::app(LambdaExpr::Const(term::p2_c()), LambdaExpr::var("c")),
            ),
        ),
        ell2: w.ell2.clone(),
    }
}

/// Lower a fibre witness to the degree order: `ℓ₁` re-attaches the
/// one-point name.
pub fn lower_ew_witness(w: &EwWitness) -> EwWitness {
    let star_name = crate::asm::terminal();
    let name = star_name.name(&star_name.carrier()[0]).expect("one point").clone();
    EwWitness {
        ell1: lam(
            &["p"],
            LambdaExpr::app(
                LambdaExpr::Const(w.ell1.clone()),
                LambdaExpr::pair(LambdaExpr::Const(name), LambdaExpr::var("p")),
            ),
        ),
        ell2: w.ell2.clone(),
    }
}

/// Search for a degree witness over `pool`.
pub fn search_degree_leq(
    f: &DegreePredicate,
    g: &DegreePredicate,
    pool: &TermPool,
    pca: &PcaSpec,
) -> Option<EwWitness> {
    let candidates: Vec<&Term> = pool.iter().filter(|t| t.oracle_free()).collect();
    for ell1 in &candidates {
        for ell2 in &candidates {
            let w = EwWitness { ell1: (*ell1).clone(), ell2: (*ell2).clone() };
            if degree_leq(f, g, &w, pca).is_holds() {
                return Some(w);
            }
        }
    }
    None
}
