//! The category built from extended Weihrauch predicates: objects are
//! partial equivalence data, arrows are functional relations, and a
//! back-and-forth pair of translations connects it to the category built
//! the same way from displays alone.
//!
//! An object is a base assembly `X` together with `ρ` over `X×X` that is
//! symmetric and transitive *up to witnesses*; an arrow `(X,ρ) → (Y,η)` is
//! `φ` over `X×Y` satisfying five witnessed inequalities (strictness on
//! both sides, relationality on both sides, single-valuedness, and
//! totality on the diagonal). Every inequality is phrased through
//! *restrictions*: reindexings of a predicate along projection morphisms
//! such as `⟨π₂,π₁⟩`, `⟨π₁,π₃⟩`, or the diagonal, computed by
//! [`ew_reindex`](crate::ew::ew_reindex); meets and existential images go
//! through the spread/collect translations so that every connective has an
//! explicit finite formula.
//!
//! Validity here is *certificate checking*: the underlying orders are only
//! semi-decidable, so objects and arrows are judged against stored
//! witnesses, which [`search_object_certificates`] and
//! [`search_arrow_certificates`] find by synthesized tag alignment plus a
//! candidate pool — a failed search is reported, never papered over.
//!
//! The displayed world embeds: [`r_predicate`] sends a display `f` to the
//! predicate `(f, ⊤)` with empty value sets (so membership demands are
//! vacuous), and [`l_predicate`] forgets the fibre data again —
//! `l ∘ r` is the identity on displays, and the unit `p ≤ r(l(p))` is
//! witnessed by the identity mediator. At the level of whole objects these
//! act as [`embed_r`] and [`project_l`], with `project_l(embed_r(w)) ≅ w`
//! by mutual factorization ([`weak_subobject_iso`]).

use std::collections::BTreeMap;

use crate::asm::{self, AsmMorphism, PartitionedAssembly, ProductData};
use crate::eir::{BasePredicate, DoctrineError};
use crate::ew::{self, EwPredicate, EwWitness};
use crate::ir::{self, IrPredicate, IrWitness};
use crate::pool::TermPool;
use crate::term::{self, lam, LambdaExpr, PcaSpec, Term};
use crate::Verdict;

/// Partial-equivalence data: a base assembly and a predicate over its
/// square.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ToposObject {
    base: PartitionedAssembly,
    rho: EwPredicate,
}

impl ToposObject {
    /// `rho` must live over `base × base` (the canonical product).
    pub fn new(base: PartitionedAssembly, rho: EwPredicate) -> Result<Self, DoctrineError> {
        let square = asm::product(&base, &base).object;
        if rho.base() != &square {
            return Err(DoctrineError::EndMismatch(
                rho.base().label().to_string(),
                square.label().to_string(),
            ));
        }
        Ok(ToposObject { base, rho })
    }

    pub fn base(&self) -> &PartitionedAssembly {
        &self.base
    }

    pub fn rho(&self) -> &EwPredicate {
        &self.rho
    }
}

/// Witnesses for the two partial-equivalence conditions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObjectCertificates {
    pub symmetry: EwWitness,
    pub transitivity: EwWitness,
}

/// The three pair projections out of the triple product `(A×B)×C` (the
/// product object itself is recoverable as any projection's source).
struct Triple {
    p12: AsmMorphism,
    p13: AsmMorphism,
    p23: AsmMorphism,
}

fn triple(
    a: &PartitionedAssembly,
    b: &PartitionedAssembly,
    c: &PartitionedAssembly,
) -> Result<Triple, DoctrineError> {
    let ab = asm::product(a, b);
    let ac = asm::product(a, c);
    let bc = asm::product(b, c);
    let t = asm::product(&ab.object, c);
    let a_of = asm::compose(&ab.proj1, &t.proj1)?;
    let b_of = asm::compose(&ab.proj2, &t.proj1)?;
    let p13 = asm::pair_into(&a_of, &t.proj2, &ac)?;
    let p23 = asm::pair_into(&b_of, &t.proj2, &bc)?;
    Ok(Triple { p12: t.proj1, p13, p23 })
}

fn swap_of(sq: &ProductData) -> Result<AsmMorphism, DoctrineError> {
    Ok(asm::pair_into(&sq.proj2, &sq.proj1, sq)?)
}

fn diagonal_of(x: &PartitionedAssembly, sq: &ProductData) -> Result<AsmMorphism, DoctrineError> {
    let id = asm::identity(x);
    Ok(asm::pair_into(&id, &id, sq)?)
}

/// The two object conditions as labeled `(lhs, rhs)` inequality instances:
/// `ρ ≤ ρ∘swap` and `ρ₁₂ ∧ ρ₂₃ ≤ ρ₁₃` over the triple square.
pub fn object_conditions(
    o: &ToposObject,
    pca: &PcaSpec,
) -> Result<Vec<(&'static str, EwPredicate, EwPredicate)>, DoctrineError> {
    let sq = asm::product(&o.base, &o.base);
    let swap = swap_of(&sq)?;
    let sym = ("symmetry", o.rho.clone(), ew::ew_reindex(&swap, &o.rho, pca)?);
    let t = triple(&o.base, &o.base, &o.base)?;
    let r12 = ew::ew_reindex(&t.p12, &o.rho, pca)?;
    let r23 = ew::ew_reindex(&t.p23, &o.rho, pca)?;
    let r13 = ew::ew_reindex(&t.p13, &o.rho, pca)?;
    let trans = ("transitivity", ew::ew_meet(&r12, &r23)?, r13);
    Ok(vec![sym, trans])
}

/// Check both partial-equivalence conditions against the certificates.
pub fn validate_object(
    o: &ToposObject,
    certs: &ObjectCertificates,
    pca: &PcaSpec,
) -> Result<Verdict, DoctrineError> {
    let conditions = object_conditions(o, pca)?;
    let mut verdict = Verdict::Holds;
    for ((label, lhs, rhs), w) in
        conditions.iter().zip([&certs.symmetry, &certs.transitivity])
    {
        verdict = verdict.and(match ew::leq_ew(lhs, rhs, w, pca) {
            Verdict::Holds => Verdict::Holds,
            Verdict::Fails { witness } => Verdict::fails(format!("not {label}: {witness}")),
            Verdict::Unknown { reason } => Verdict::unknown(format!("{label}: {reason}")),
        });
        if matches!(verdict, Verdict::Fails { .. }) {
            break;
        }
    }
    Ok(verdict)
}

/// Search certificates for both object conditions.
pub fn search_object_certificates(
    o: &ToposObject,
    pool: &TermPool,
    pca: &PcaSpec,
) -> Result<Option<ObjectCertificates>, DoctrineError> {
    let conditions = object_conditions(o, pca)?;
    let mut found = Vec::new();
    for (_, lhs, rhs) in &conditions {
        match ew::search_ew_leq_aligned(lhs, rhs, pool, pca) {
            Some(w) => found.push(w),
            None => return Ok(None),
        }
    }
    let transitivity = found.pop().expect("two conditions");
    let symmetry = found.pop().expect("two conditions");
    Ok(Some(ObjectCertificates { symmetry, transitivity }))
}

/// A functional relation between two objects, with one stored witness per
/// arrow condition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ToposArrow {
    source: ToposObject,
    target: ToposObject,
    phi: EwPredicate,
    certificates: ArrowCertificates,
}

/// The five arrow-condition witnesses, in order: strictness,
/// left relationality, right relationality, single-valuedness, totality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrowCertificates {
    pub conditions: [EwWitness; 5],
}

impl ToposArrow {
    /// `phi` must live over `source.base × target.base`.
    pub fn new(
        source: ToposObject,
        target: ToposObject,
        phi: EwPredicate,
        certificates: ArrowCertificates,
    ) -> Result<Self, DoctrineError> {
        let prod = asm::product(&source.base, &target.base).object;
        if phi.base() != &prod {
            return Err(DoctrineError::EndMismatch(
                phi.base().label().to_string(),
                prod.label().to_string(),
            ));
        }
        Ok(ToposArrow { source, target, phi, certificates })
    }

    pub fn source(&self) -> &ToposObject {
        &self.source
    }

    pub fn target(&self) -> &ToposObject {
        &self.target
    }

    pub fn phi(&self) -> &EwPredicate {
        &self.phi
    }

    pub fn certificates(&self) -> &ArrowCertificates {
        &self.certificates
    }
}

/// The five arrow conditions as `(lhs, rhs)` inequality instances, in the
/// stored certificate order.
pub fn arrow_conditions(
    source: &ToposObject,
    target: &ToposObject,
    phi: &EwPredicate,
    pca: &PcaSpec,
) -> Result<Vec<(EwPredicate, EwPredicate)>, DoctrineError> {
    let x = &source.base;
    let y = &target.base;
    let rho = &source.rho;
    let eta = &target.rho;
    let xy = asm::product(x, y);
    let sq_x = asm::product(x, x);
    let sq_y = asm::product(y, y);

    // (1) strictness: φ ≤ ρ∘⟨π₁,π₁⟩ ∧ η∘⟨π₂,π₂⟩.
    let p11 = asm::pair_into(&xy.proj1, &xy.proj1, &sq_x)?;
    let p22 = asm::pair_into(&xy.proj2, &xy.proj2, &sq_y)?;
    let c1 = (
        phi.clone(),
        ew::ew_meet(&ew::ew_reindex(&p11, rho, pca)?, &ew::ew_reindex(&p22, eta, pca)?)?,
    );

    // (2) relational on the left, over (X×X)×Y: ρ₁₂ ∧ φ₁₃ ≤ φ₂₃.
    let xxy = triple(x, x, y)?;
    let c2 = (
        ew::ew_meet(
            &ew::ew_reindex(&xxy.p12, rho, pca)?,
            &ew::ew_reindex(&xxy.p13, phi, pca)?,
        )?,
        ew::ew_reindex(&xxy.p23, phi, pca)?,
    );

    // (3) relational on the right, over (X×Y)×Y: η₂₃ ∧ φ₁₂ ≤ φ₁₃.
    let xyy = triple(x, y, y)?;
    let c3 = (
        ew::ew_meet(
            &ew::ew_reindex(&xyy.p23, eta, pca)?,
            &ew::ew_reindex(&xyy.p12, phi, pca)?,
        )?,
        ew::ew_reindex(&xyy.p13, phi, pca)?,
    );

    // (4) single-valued, over (X×Y)×Y: φ₁₂ ∧ φ₁₃ ≤ η₂₃.
    let c4 = (
        ew::ew_meet(
            &ew::ew_reindex(&xyy.p12, phi, pca)?,
            &ew::ew_reindex(&xyy.p13, phi, pca)?,
        )?,
        ew::ew_reindex(&xyy.p23, eta, pca)?,
    );

    // (5) total: ρ∘Δ ≤ ∃_{π₁}(φ).
    let delta = diagonal_of(x, &sq_x)?;
    let c5 = (ew::ew_reindex(&delta, rho, pca)?, ew::ew_exists(&xy.proj1, phi)?);

    Ok(vec![c1, c2, c3, c4, c5])
}

/// Check all five arrow conditions against the stored certificates,
/// reporting the first failing condition index.
pub fn validate_arrow(a: &ToposArrow, pca: &PcaSpec) -> Result<Verdict, DoctrineError> {
    let conditions = arrow_conditions(&a.source, &a.target, &a.phi, pca)?;
    let mut verdict = Verdict::Holds;
    for (k, ((lhs, rhs), w)) in
        conditions.iter().zip(&a.certificates.conditions).enumerate()
    {
        verdict = verdict.and(match ew::leq_ew(lhs, rhs, w, pca) {
            Verdict::Holds => Verdict::Holds,
            Verdict::Fails { witness } => {
                Verdict::fails(format!("condition {} failed: {witness}", k + 1))
            }
            Verdict::Unknown { reason } => {
                Verdict::unknown(format!("condition {}: {reason}", k + 1))
            }
        });
        if matches!(verdict, Verdict::Fails { .. }) {
            break;
        }
    }
    Ok(verdict)
}

/// Outcome of a certificate search: found witnesses, with `(K, K)`
/// placeholders and the 1-based indices recorded in `missing` for
/// conditions the search could not certify.
#[derive(Debug, Clone)]
pub struct CertificateSearch {
    pub certificates: ArrowCertificates,
    pub missing: Vec<usize>,
}

/// Search certificates for all five arrow conditions independently.
pub fn search_arrow_certificates(
    source: &ToposObject,
    target: &ToposObject,
    phi: &EwPredicate,
    pool: &TermPool,
    pca: &PcaSpec,
) -> Result<CertificateSearch, DoctrineError> {
    let conditions = arrow_conditions(source, target, phi, pca)?;
    let placeholder = EwWitness { ell1: Term::K, ell2: Term::K };
    let mut found = Vec::new();
    let mut missing = Vec::new();
    for (k, (lhs, rhs)) in conditions.iter().enumerate() {
        match ew::search_ew_leq_aligned(lhs, rhs, pool, pca) {
            Some(w) => found.push(w),
            None => {
                missing.push(k + 1);
                found.push(placeholder.clone());
            }
        }
    }
    let conditions: [EwWitness; 5] = found.try_into().expect("five conditions");
    Ok(CertificateSearch { certificates: ArrowCertificates { conditions }, missing })
}

/// An arrow together with the indices of conditions whose certificate
/// search failed (empty when fully certified).
#[derive(Debug, Clone)]
pub struct ArrowWithReport {
    pub arrow: ToposArrow,
    pub missing: Vec<usize>,
}

/// The identity arrow on `o`: `φ = ρ`, certificates searched.
pub fn identity_arrow(
    o: &ToposObject,
    pool: &TermPool,
    pca: &PcaSpec,
) -> Result<ArrowWithReport, DoctrineError> {
    let search = search_arrow_certificates(o, o, &o.rho, pool, pca)?;
    let arrow = ToposArrow::new(o.clone(), o.clone(), o.rho.clone(), search.certificates)?;
    Ok(ArrowWithReport { arrow, missing: search.missing })
}

/// Compose `a : (X,ρ) → (Y,η)` with `b : (Y,η) → (Z,θ)` by computing
/// `∃_{⟨π₁,π₃⟩}(φ∘⟨π₁,π₂⟩ ∧ ψ∘⟨π₂,π₃⟩)` over `(X×Y)×Z` in spread
/// coordinates (reindex, meet, and existential image of the collected
/// predicates), then collecting back; certificates are freshly searched
/// and failures reported in `missing`.
pub fn compose(
    a: &ToposArrow,
    b: &ToposArrow,
    pool: &TermPool,
    pca: &PcaSpec,
) -> Result<ArrowWithReport, DoctrineError> {
    if a.target != b.source {
        return Err(DoctrineError::EndMismatch(
            a.target.base.label().to_string(),
            b.source.base.label().to_string(),
        ));
    }
    let t = triple(&a.source.base, &a.target.base, &b.target.base)?;
    let spread_phi = ew::to_ir(&a.phi)?;
    let spread_psi = ew::to_ir(&b.phi)?;
    let r1 = ir::ir_reindex(&t.p12, &spread_phi.predicate)?;
    let r2 = ir::ir_reindex(&t.p23, &spread_psi.predicate)?;
    let meet = ir::ir_meet(&r1, &r2)?;
    let composite = ew::to_ew(&ir::ir_exists(&t.p13, &meet.predicate)?);
    let search = search_arrow_certificates(&a.source, &b.target, &composite, pool, pca)?;
    let arrow =
        ToposArrow::new(a.source.clone(), b.target.clone(), composite, search.certificates)?;
    Ok(ArrowWithReport { arrow, missing: search.missing })
}

// ---------------------------------------------------------------------------
// The displayed world and the embedding
// ---------------------------------------------------------------------------

/// An object of the display-only presentation: a base and a display into
/// its square, with no fibre data.
#[derive(Debug, Clone, PartialEq)]
pub struct WeakSubobjectObject {
    base: PartitionedAssembly,
    rho_display: AsmMorphism,
}

impl WeakSubobjectObject {
    /// The display must land in `base × base`.
    pub fn new(
        base: PartitionedAssembly,
        rho_display: AsmMorphism,
    ) -> Result<Self, DoctrineError> {
        let square = asm::product(&base, &base).object;
        if rho_display.target() != &square {
            return Err(DoctrineError::EndMismatch(
                rho_display.target().label().to_string(),
                square.label().to_string(),
            ));
        }
        Ok(WeakSubobjectObject { base, rho_display })
    }

    pub fn base(&self) -> &PartitionedAssembly {
        &self.base
    }

    pub fn rho_display(&self) -> &AsmMorphism {
        &self.rho_display
    }
}

/// Predicate-level embedding: a display becomes the predicate with empty
/// value sets (the top fibre data), so every membership demand on it is
/// vacuous.
pub fn r_predicate(display: &AsmMorphism) -> Result<IrPredicate, DoctrineError> {
    let alpha = BasePredicate::new(display.source().clone(), BTreeMap::new())?;
    IrPredicate::new(display.clone(), alpha)
}

/// Predicate-level projection: forget the fibre data, keep the display.
pub fn l_predicate(p: &IrPredicate) -> AsmMorphism {
    p.display().clone()
}

/// The unit `p ≤ r_predicate(l_predicate(p))`: identity mediator, identity
/// membership term (never consulted, since the target values are empty).
pub fn unit_witness(p: &IrPredicate) -> IrWitness {
    IrWitness { mediator: asm::identity(p.source()), ell: term::i() }
}

/// Embed a display-only object: its partial-equivalence predicate is the
/// collected form of `(display, ⊤)`.
pub fn embed_r(w: &WeakSubobjectObject) -> Result<ToposObject, DoctrineError> {
    let rho = ew::to_ew(&r_predicate(&w.rho_display)?);
    ToposObject::new(w.base.clone(), rho)
}

/// Project an object down: spread `ρ` and keep only its display.
pub fn project_l(o: &ToposObject) -> Result<WeakSubobjectObject, DoctrineError> {
    let spread = ew::to_ir(&o.rho)?;
    WeakSubobjectObject::new(o.base.clone(), spread.predicate.display().clone())
}

/// Mutual factorizations between two display-only objects over the same
/// base: each element maps to the least element on the other side with the
/// same display image, and the name translation is realized by a
/// synthesized pairing/projection term. `None` when either direction has
/// an unmatched element or no such realizer is found.
pub fn weak_subobject_iso(
    a: &WeakSubobjectObject,
    b: &WeakSubobjectObject,
) -> Option<(AsmMorphism, AsmMorphism)> {
    if a.base != b.base {
        return None;
    }
    let factor = |from: &AsmMorphism, to: &AsmMorphism| -> Option<AsmMorphism> {
        let mut map = BTreeMap::new();
        let mut samples = Vec::new();
        for d in from.source().carrier() {
            let image = &from.map()[d];
            let matched = to.source().carrier().iter().find(|e| &to.map()[*e] == image)?;
            samples.push((
                from.source().name(d).ok()?.clone(),
                to.source().name(matched).ok()?.clone(),
            ));
            map.insert(d.clone(), matched.clone());
        }
        AsmMorphism::new(
            &format!("{}→{}", from.label(), to.label()),
            from.source().clone(),
            to.source().clone(),
            map,
            ew::synthesize_alignment(&samples)?,
        )
        .ok()
    };
    let fwd = factor(&a.rho_display, &b.rho_display)?;
    let bwd = factor(&b.rho_display, &a.rho_display)?;
    Some((fwd, bwd))
}

// ---------------------------------------------------------------------------
// Canonical constructions
// ---------------------------------------------------------------------------

/// The diagonal display `X → X×X`, realized by `λs.⟨s,s⟩`-style pairing of
/// identities.
pub fn diagonal_display(x: &PartitionedAssembly) -> AsmMorphism {
    let sq = asm::product(x, x);
    diagonal_of(x, &sq).expect("diagonal boundaries agree")
}

/// The display-only object whose display is the diagonal.
pub fn discrete_weak_subobject(x: &PartitionedAssembly) -> WeakSubobjectObject {
    WeakSubobjectObject { base: x.clone(), rho_display: diagonal_display(x) }
}

/// The discrete object over `x`: embedding of the diagonal display —
/// supported exactly on `(x,x)` with tag `φ(x)` and family `{∅}`.
pub fn discrete_object(x: &PartitionedAssembly) -> ToposObject {
    embed_r(&discrete_weak_subobject(x)).expect("diagonal display is well-bounded")
}

/// The functional relation carried by a base morphism `h : X → Y`: the
/// embedded graph display `⟨id, h⟩ : X → X×Y`.
pub fn graph_arrow_predicate(h: &AsmMorphism) -> Result<EwPredicate, DoctrineError> {
    let prod = asm::product(h.source(), h.target());
    let graph = asm::pair_into(&asm::identity(h.source()), h, &prod)?;
    Ok(ew::to_ew(&r_predicate(&graph)?))
}

/// Curated candidate pool for certificate search: identity, both
/// projections, the component swap, the vacuous answer `K`, and the
/// meet-tag projection `λξ.p₂(p₁(p₂ξ))`.
pub fn certificate_pool() -> TermPool {
    TermPool::from_items(vec![
        term::i(),
        Term::K,
        term::p1_c(),
        term::p2_c(),
        term::swap_c(),
        lam(
            &["c"],
            LambdaExpr::app(
                LambdaExpr::Const(term::p2_c()),
                LambdaExpr::app(
                    LambdaExpr::Const(term::p1_c()),
                    LambdaExpr::app(LambdaExpr::Const(term::p2_c()), LambdaExpr::var("c")),
                ),
            ),
        ),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asm::{pair_id, ElemId};
    use crate::syntax::parse_term;
    use crate::term::TermSet;
    use std::collections::BTreeSet;

    fn pca() -> PcaSpec {
        PcaSpec::plain()
    }

    fn t(src: &str) -> Term {
        parse_term(src, &Default::default()).expect("test term parses")
    }

    fn base_ks() -> PartitionedAssembly {
        PartitionedAssembly::new("X", [("x1".into(), t("K")), ("x2".into(), t("S"))]).unwrap()
    }

    /// Two elements sharing one name, so cross-element alignment terms have
    /// constant leaves available.
    fn base_flat(label: &str, name: &str) -> PartitionedAssembly {
        PartitionedAssembly::new(
            label,
            [(format!("{label}1"), t(name)), (format!("{label}2"), t(name))],
        )
        .unwrap()
    }

    #[test]
    fn discrete_object_validates() {
        let o = discrete_object(&base_ks());
        let certs = search_object_certificates(&o, &certificate_pool(), &pca())
            .unwrap()
            .expect("certificates for the discrete object");
        assert!(validate_object(&o, &certs, &pca()).unwrap().is_holds());
    }

    #[test]
    fn discrete_object_canonical_certificates() {
        // Symmetry by the identity (the reindexed tag is the argument
        // itself), transitivity by the meet-tag projection; membership
        // demands are vacuous.
        let o = discrete_object(&base_ks());
        let certs = ObjectCertificates {
            symmetry: EwWitness { ell1: term::i(), ell2: Term::K },
            transitivity: EwWitness {
                ell1: lam(
                    &["c"],
                    LambdaExpr::app(
                        LambdaExpr::Const(term::p2_c()),
                        LambdaExpr::app(
                            LambdaExpr::Const(term::p1_c()),
                            LambdaExpr::app(
                                LambdaExpr::Const(term::p2_c()),
                                LambdaExpr::var("c"),
                            ),
                        ),
                    ),
                ),
                ell2: Term::K,
            },
        };
        assert!(validate_object(&o, &certs, &pca()).unwrap().is_holds());
    }

    #[test]
    fn empty_relation_is_vacuously_valid() {
        let x = base_ks();
        let square = asm::product(&x, &x).object;
        let o = ToposObject::new(x, ew::ew_bottom(&square)).unwrap();
        let certs = ObjectCertificates {
            symmetry: EwWitness { ell1: Term::K, ell2: Term::K },
            transitivity: EwWitness { ell1: Term::K, ell2: Term::K },
        };
        assert!(validate_object(&o, &certs, &pca()).unwrap().is_holds());
    }

    #[test]
    fn off_diagonal_support_without_swap_is_not_symmetric() {
        let x = base_ks();
        let square = asm::product(&x, &x).object;
        let rho = EwPredicate::new(
            square.clone(),
            [(
                (pair_id("x1", "x2"), t("K")),
                BTreeSet::from([TermSet::new()]),
            )],
            &pca(),
        )
        .unwrap();
        let o = ToposObject::new(x, rho).unwrap();
        assert!(search_object_certificates(&o, &certificate_pool(), &pca()).unwrap().is_none());
        let certs = ObjectCertificates {
            symmetry: EwWitness { ell1: term::i(), ell2: Term::K },
            transitivity: EwWitness { ell1: Term::K, ell2: Term::K },
        };
        let v = validate_object(&o, &certs, &pca()).unwrap();
        assert!(matches!(v, Verdict::Fails { witness } if witness.contains("symmetry")));
    }

    #[test]
    fn identity_arrow_on_discrete_validates() {
        let o = discrete_object(&base_ks());
        let id = identity_arrow(&o, &certificate_pool(), &pca()).unwrap();
        assert!(id.missing.is_empty(), "missing: {:?}", id.missing);
        assert!(validate_arrow(&id.arrow, &pca()).unwrap().is_holds());
    }

    #[test]
    fn empty_relation_arrow_fails_totality() {
        let o = discrete_object(&base_ks());
        let prod = asm::product(o.base(), o.base()).object;
        let placeholder = EwWitness { ell1: Term::K, ell2: Term::K };
        let arrow = ToposArrow::new(
            o.clone(),
            o.clone(),
            ew::ew_bottom(&prod),
            ArrowCertificates { conditions: std::array::from_fn(|_| placeholder.clone()) },
        )
        .unwrap();
        let v = validate_arrow(&arrow, &pca()).unwrap();
        assert!(matches!(v, Verdict::Fails { witness } if witness.contains("condition 5")));
    }

    #[test]
    fn bijection_graph_is_an_arrow() {
        let x = base_flat("x", "K");
        let y = base_flat("y", "K");
        let ox = discrete_object(&x);
        let oy = discrete_object(&y);
        let sigma = AsmMorphism::new(
            "σ",
            x.clone(),
            y.clone(),
            [("x1".to_string(), "y2".to_string()), ("x2".to_string(), "y1".to_string())]
                .into(),
            term::i(),
        )
        .unwrap();
        let phi = graph_arrow_predicate(&sigma).unwrap();
        let search =
            search_arrow_certificates(&ox, &oy, &phi, &certificate_pool(), &pca()).unwrap();
        assert!(search.missing.is_empty(), "missing: {:?}", search.missing);
        let arrow = ToposArrow::new(ox, oy, phi, search.certificates).unwrap();
        assert!(validate_arrow(&arrow, &pca()).unwrap().is_holds());
    }

    /// Two-way search between arrow predicates: the hom-level isomorphism.
    fn arrows_equivalent(a: &EwPredicate, b: &EwPredicate, pca: &PcaSpec) -> bool {
        let pool = certificate_pool();
        ew::search_ew_leq_aligned(a, b, &pool, pca).is_some()
            && ew::search_ew_leq_aligned(b, a, &pool, pca).is_some()
    }

    #[test]
    fn identity_laws_up_to_equivalence() {
        let x = PartitionedAssembly::new("X", [("x".into(), t("K"))]).unwrap();
        let y = PartitionedAssembly::new("Y", [("y".into(), t("S"))]).unwrap();
        let ox = discrete_object(&x);
        let oy = discrete_object(&y);
        let h = AsmMorphism::new(
            "h",
            x.clone(),
            y.clone(),
            [("x".to_string(), "y".to_string())].into(),
            lam(&["s"], LambdaExpr::Const(Term::S)),
        )
        .unwrap();
        let pool = certificate_pool();
        let pca = pca();
        let phi = graph_arrow_predicate(&h).unwrap();
        let search = search_arrow_certificates(&ox, &oy, &phi, &pool, &pca).unwrap();
        assert!(search.missing.is_empty());
        let a = ToposArrow::new(ox.clone(), oy.clone(), phi, search.certificates).unwrap();

        let id_x = identity_arrow(&ox, &pool, &pca).unwrap().arrow;
        let id_y = identity_arrow(&oy, &pool, &pca).unwrap().arrow;

        let left = compose(&id_x, &a, &pool, &pca).unwrap();
        assert!(left.missing.is_empty(), "missing: {:?}", left.missing);
        assert!(arrows_equivalent(left.arrow.phi(), a.phi(), &pca));

        let right = compose(&a, &id_y, &pool, &pca).unwrap();
        assert!(right.missing.is_empty(), "missing: {:?}", right.missing);
        assert!(arrows_equivalent(right.arrow.phi(), a.phi(), &pca));
    }

    #[test]
    fn composition_is_associative_up_to_equivalence() {
        let pca = pca();
        let pool = certificate_pool();
        let bases: Vec<PartitionedAssembly> = ["A", "B", "C", "D"]
            .iter()
            .map(|l| {
                PartitionedAssembly::new(l, [(format!("{l}0"), t("K"))]).unwrap()
            })
            .collect();
        let objects: Vec<ToposObject> = bases.iter().map(discrete_object).collect();
        let mut arrows = Vec::new();
        for i in 0..3 {
            let h = AsmMorphism::new(
                "step",
                bases[i].clone(),
                bases[i + 1].clone(),
                [(format!("{}0", ["A", "B", "C", "D"][i]), format!("{}0", ["A", "B", "C", "D"][i + 1]))]
                    .into(),
                term::i(),
            )
            .unwrap();
            let phi = graph_arrow_predicate(&h).unwrap();
            let s = search_arrow_certificates(&objects[i], &objects[i + 1], &phi, &pool, &pca)
                .unwrap();
            arrows.push(
                ToposArrow::new(objects[i].clone(), objects[i + 1].clone(), phi, s.certificates)
                    .unwrap(),
            );
        }
        let ab = compose(&arrows[0], &arrows[1], &pool, &pca).unwrap().arrow;
        let bc = compose(&arrows[1], &arrows[2], &pool, &pca).unwrap().arrow;
        let left = compose(&ab, &arrows[2], &pool, &pca).unwrap();
        let right = compose(&arrows[0], &bc, &pool, &pca).unwrap();
        assert!(left.missing.is_empty() && right.missing.is_empty());
        assert!(arrows_equivalent(left.arrow.phi(), right.arrow.phi(), &pca));
    }

    #[test]
    fn embedding_the_diagonal_gives_the_discrete_object() {
        let x = base_ks();
        let embedded = embed_r(&discrete_weak_subobject(&x)).unwrap();
        assert_eq!(&embedded, &discrete_object(&x));
        // Supported exactly on diagonal pairs, tagged by the element name.
        assert!(embedded.rho().is_supported(&pair_id("x1", "x1"), &t("K")));
        assert!(!embedded.rho().is_supported(&pair_id("x1", "x2"), &t("K")));
    }

    #[test]
    fn projection_after_embedding_returns_the_display() {
        // Predicate level: exact.
        let x = base_ks();
        let d = diagonal_display(&x);
        assert_eq!(l_predicate(&r_predicate(&d).unwrap()), d);
        // Object level: mutual factorization over the same base.
        let w = discrete_weak_subobject(&x);
        let back = project_l(&embed_r(&w).unwrap()).unwrap();
        let (fwd, bwd) = weak_subobject_iso(&w, &back).expect("canonical iso");
        assert!(fwd.verify(&pca()).is_holds());
        assert!(bwd.verify(&pca()).is_holds());
    }

    #[test]
    fn projection_after_embedding_collapses_duplicates() {
        // Two display elements with the same name and image collapse to
        // one; mutual factorization still exists both ways.
        let x = PartitionedAssembly::new("X", [("x".into(), t("K"))]).unwrap();
        let square = asm::product(&x, &x);
        let src = PartitionedAssembly::new(
            "D",
            [("d1".into(), t("S")), ("d2".into(), t("S"))],
        )
        .unwrap();
        let display = AsmMorphism::new(
            "d",
            src,
            square.object.clone(),
            [
                ("d1".to_string(), pair_id("x", "x")),
                ("d2".to_string(), pair_id("x", "x")),
            ]
            .into(),
            lam(&["s"], LambdaExpr::pair(LambdaExpr::Const(t("K")), LambdaExpr::Const(t("K")))),
        )
        .unwrap();
        let w = WeakSubobjectObject::new(x, display).unwrap();
        let back = project_l(&embed_r(&w).unwrap()).unwrap();
        assert_eq!(back.rho_display().source().len(), 1);
        assert!(weak_subobject_iso(&w, &back).is_some());
    }

    #[test]
    fn unit_inequality_holds_on_predicates_with_fibre_data() {
        // A display with nonempty value sets: the unit into (display, ⊤)
        // must verify because the top side makes membership vacuous.
        let x = base_ks();
        let src = PartitionedAssembly::new(
            "Y",
            [("y1".into(), t("<K, K>")), ("y2".into(), t("<S, K>"))],
        )
        .unwrap();
        let display = AsmMorphism::new(
            "f",
            src.clone(),
            x,
            [("y1".to_string(), "x1".to_string()), ("y2".to_string(), "x2".to_string())]
                .into(),
            term::p1_c(),
        )
        .unwrap();
        let values: crate::asm::PredValues = [
            ("y1".to_string(), BTreeSet::from([t("K"), t("S")])),
            ("y2".to_string(), BTreeSet::from([t("K")])),
        ]
        .into();
        let p = IrPredicate::new(
            display,
            BasePredicate::new(src, values).unwrap(),
        )
        .unwrap();
        let top = r_predicate(&l_predicate(&p)).unwrap();
        assert!(ir::ir_leq(&p, &top, &unit_witness(&p), &pca()).is_holds());
    }

    #[test]
    fn per_validation_agrees_in_spread_coordinates() {
        // The discrete object's symmetry also holds for the spread data:
        // G(ρ) ≤ G(ρ)∘swap, found by mediator search.
        let pca = pca();
        let x = base_ks();
        let o = discrete_object(&x);
        let spread = ew::to_ir(o.rho()).unwrap();
        let sq = asm::product(&x, &x);
        let swap = swap_of(&sq).unwrap();
        let reindexed = ir::ir_reindex(&swap, &spread.predicate).unwrap();
        // The reindexed carrier pairs the original element with its swap
        // preimage, named ⟨name, square-name⟩: mediator realizer λs.⟨s, p₁s⟩.
        let pool = TermPool::from_items(vec![
            term::p1_c(),
            term::p2_c(),
            lam(
                &["s"],
                LambdaExpr::pair(
                    LambdaExpr::var("s"),
                    LambdaExpr::app(LambdaExpr::Const(term::p1_c()), LambdaExpr::var("s")),
                ),
            ),
        ]);
        let found = ir::search_ir_leq(&spread.predicate, &reindexed, &pool, &pca);
        assert!(found.is_some());
    }

    #[test]
    fn arrow_base_mismatch_is_rejected() {
        let o = discrete_object(&base_ks());
        let placeholder = EwWitness { ell1: Term::K, ell2: Term::K };
        let err = ToposArrow::new(
            o.clone(),
            o.clone(),
            ew::ew_bottom(o.base()),
            ArrowCertificates { conditions: std::array::from_fn(|_| placeholder.clone()) },
        );
        assert!(matches!(err, Err(DoctrineError::EndMismatch(_, _))));
        let _unused: Option<ElemId> = None;
    }
}
