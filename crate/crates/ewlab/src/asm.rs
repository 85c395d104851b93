//! Finite partitioned assemblies over the algebra, morphisms between them,
//! and the handful of limits and colimits the doctrine constructions need.
//!
//! A *partitioned assembly* is a finite carrier of element ids together with
//! a naming function assigning each element exactly one closed value of the
//! algebra. A *morphism* is a function between carriers that some oracle-free
//! term tracks on names: `r · φ(x)` must reduce to `ψ(f(x))` for every `x`.
//! An *assembly* relaxes "exactly one name" to "at least one realizer"; the
//! [`partition_predicate`] construction turns a predicate over an assembly
//! into one over a partitioned assembly by splitting every element into its
//! (element, realizer) pairs, and hands back the reduction witnesses that
//! make the two predicates interchangeable.
//!
//! Everything here is deterministic: carriers are ordered, constructions
//! enumerate pairs in lexicographic carrier order, and searches walk their
//! candidate pool front to back.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::pool::TermPool;
use crate::term::{self, lam, LambdaExpr, PcaSpec, Reduction, Term, TermSet};
use crate::Verdict;

/// Identifier of a carrier element.
pub type ElemId = String;

/// A predicate assigning each carrier element a finite set of terms. Missing
/// entries mean the empty set.
pub type PredValues = BTreeMap<ElemId, TermSet>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AsmError {
    #[error("duplicate element id `{0}`")]
    DuplicateElement(String),
    #[error("unknown element id `{0}` in assembly `{1}`")]
    UnknownElement(String, String),
    #[error("element `{0}` has an empty realizer set")]
    EmptyRealizers(String),
    #[error("map is missing an image for `{0}`")]
    MissingImage(String),
    #[error("map sends `{0}` to `{1}`, which is not in the target carrier")]
    BadImage(String, String),
    #[error("name of `{id}` is not a value: {name}")]
    NameNotValue { id: String, name: String },
    #[error("cannot compose `{0}` after `{1}`: middle assemblies differ")]
    ComposeMismatch(String, String),
    #[error("`{0}` and `{1}` do not share the required assembly")]
    BoundaryMismatch(String, String),
}

/// Lexicographic pair id used by products and pullbacks.
pub fn pair_id(a: &str, b: &str) -> ElemId {
    format!("({a},{b})")
}

/// Left-injection id used by coproducts.
pub fn inl_id(a: &str) -> ElemId {
    format!("inl({a})")
}

/// Right-injection id used by coproducts.
pub fn inr_id(b: &str) -> ElemId {
    format!("inr({b})")
}

// ---------------------------------------------------------------------------
// Partitioned assemblies
// ---------------------------------------------------------------------------

/// A finite carrier with exactly one closed name per element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionedAssembly {
    label: String,
    carrier: Vec<ElemId>,
    naming: BTreeMap<ElemId, Term>,
}

impl PartitionedAssembly {
    /// Build from `(id, name)` pairs, keeping the given carrier order.
    pub fn new(
        label: &str,
        elements: impl IntoIterator<Item = (ElemId, Term)>,
    ) -> Result<Self, AsmError> {
        let mut carrier = Vec::new();
        let mut naming = BTreeMap::new();
        for (id, name) in elements {
            if naming.insert(id.clone(), name).is_some() {
                return Err(AsmError::DuplicateElement(id));
            }
            carrier.push(id);
        }
        Ok(PartitionedAssembly { label: label.to_string(), carrier, naming })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn carrier(&self) -> &[ElemId] {
        &self.carrier
    }

    pub fn len(&self) -> usize {
        self.carrier.len()
    }

    pub fn is_empty(&self) -> bool {
        self.carrier.is_empty()
    }

    pub fn contains(&self, id: &str) -> bool {
        self.naming.contains_key(id)
    }

    /// The unique name of `id`.
    pub fn name(&self, id: &str) -> Result<&Term, AsmError> {
        self.naming
            .get(id)
            .ok_or_else(|| AsmError::UnknownElement(id.to_string(), self.label.clone()))
    }

    /// Check that every name is a value of the algebra (no redex left).
    pub fn validate(&self, pca: &PcaSpec) -> Result<(), AsmError> {
        for id in &self.carrier {
            let name = &self.naming[id];
            if !term::is_value(name, pca) {
                return Err(AsmError::NameNotValue {
                    id: id.clone(),
                    name: name.to_string(),
                });
            }
        }
        Ok(())
    }
}

/// The singleton assembly; its unique element `*` is named `I`.
pub fn terminal() -> PartitionedAssembly {
    PartitionedAssembly::new("1", [("*".to_string(), term::i())]).expect("singleton")
}

// ---------------------------------------------------------------------------
// Morphisms
// ---------------------------------------------------------------------------

/// A carrier function together with the term that tracks it on names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AsmMorphism {
    label: String,
    source: PartitionedAssembly,
    target: PartitionedAssembly,
    map: BTreeMap<ElemId, ElemId>,
    realizer: Term,
}

impl AsmMorphism {
    pub fn new(
        label: &str,
        source: PartitionedAssembly,
        target: PartitionedAssembly,
        map: BTreeMap<ElemId, ElemId>,
        realizer: Term,
    ) -> Result<Self, AsmError> {
        for x in source.carrier() {
            match map.get(x) {
                None => return Err(AsmError::MissingImage(x.clone())),
                Some(y) if !target.contains(y) => {
                    return Err(AsmError::BadImage(x.clone(), y.clone()))
                }
                Some(_) => {}
            }
        }
        Ok(AsmMorphism { label: label.to_string(), source, target, map, realizer })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn source(&self) -> &PartitionedAssembly {
        &self.source
    }

    pub fn target(&self) -> &PartitionedAssembly {
        &self.target
    }

    pub fn map(&self) -> &BTreeMap<ElemId, ElemId> {
        &self.map
    }

    pub fn realizer(&self) -> &Term {
        &self.realizer
    }

    /// Image of a source element.
    pub fn apply(&self, id: &str) -> Result<&ElemId, AsmError> {
        self.map
            .get(id)
            .ok_or_else(|| AsmError::UnknownElement(id.to_string(), self.source.label.clone()))
    }

    /// Same underlying function (labels and realizers may differ).
    pub fn same_map(&self, other: &AsmMorphism) -> bool {
        self.source.carrier == other.source.carrier
            && self.target.carrier == other.target.carrier
            && self.map == other.map
    }

    /// Check the stored realizer against the stored map.
    pub fn verify(&self, pca: &PcaSpec) -> Verdict {
        verify_morphism(&self.source, &self.target, &self.map, &self.realizer, pca)
    }
}

/// The identity morphism, realized by `I`.
pub fn identity(x: &PartitionedAssembly) -> AsmMorphism {
    let map = x.carrier().iter().map(|e| (e.clone(), e.clone())).collect();
    AsmMorphism::new(&format!("id_{}", x.label), x.clone(), x.clone(), map, term::i())
        .expect("identity map is total")
}

/// Composite `g ∘ f`, realized by `λs. r_g (r_f s)`.
pub fn compose(g: &AsmMorphism, f: &AsmMorphism) -> Result<AsmMorphism, AsmError> {
    if f.target != g.source {
        return Err(AsmError::ComposeMismatch(g.label.clone(), f.label.clone()));
    }
    let mut map = BTreeMap::new();
    for x in f.source.carrier() {
        map.insert(x.clone(), g.map[&f.map[x]].clone());
    }
    let realizer = lam(
        &["s"],
        LambdaExpr::app(
            LambdaExpr::Const(g.realizer.clone()),
            LambdaExpr::app(LambdaExpr::Const(f.realizer.clone()), LambdaExpr::var("s")),
        ),
    );
    AsmMorphism::new(
        &format!("{}∘{}", g.label, f.label),
        f.source.clone(),
        g.target.clone(),
        map,
        realizer,
    )
}

/// The unique morphism into the terminal assembly, realized by `λx. I`.
pub fn bang(x: &PartitionedAssembly) -> AsmMorphism {
    let map = x.carrier().iter().map(|e| (e.clone(), "*".to_string())).collect();
    let realizer = lam(&["x"], LambdaExpr::Const(term::i()));
    AsmMorphism::new(&format!("!_{}", x.label), x.clone(), terminal(), map, realizer)
        .expect("constant map is total")
}

/// Is `candidate` an oracle-free term tracking `map` on names? `fails`
/// carries the first element whose application definitely goes wrong
/// (wrong value or stuck); `unknown` means some application ran out of fuel
/// and none definitely failed.
pub fn verify_morphism(
    src: &PartitionedAssembly,
    tgt: &PartitionedAssembly,
    map: &BTreeMap<ElemId, ElemId>,
    candidate: &Term,
    pca: &PcaSpec,
) -> Verdict {
    if !candidate.oracle_free() {
        return Verdict::fails(format!("realizer `{candidate}` mentions an oracle"));
    }
    let mut out_of_fuel: Option<String> = None;
    for x in src.carrier() {
        let y = match map.get(x) {
            Some(y) => y,
            None => return Verdict::fails(format!("no image for `{x}`")),
        };
        let expected = match tgt.name(y) {
            Ok(t) => t,
            Err(e) => return Verdict::fails(e.to_string()),
        };
        let name = match src.name(x) {
            Ok(t) => t,
            Err(e) => return Verdict::fails(e.to_string()),
        };
        match term::apply(candidate, name, pca) {
            Reduction::Converged { value, .. } => {
                if &value != expected {
                    return Verdict::fails(format!(
                        "element `{x}`: got {value}, expected {expected}"
                    ));
                }
            }
            Reduction::Stuck { .. } => {
                return Verdict::fails(format!("element `{x}`: application is stuck"));
            }
            Reduction::FuelExhausted { .. } => {
                out_of_fuel.get_or_insert_with(|| x.clone());
            }
        }
    }
    match out_of_fuel {
        Some(x) => Verdict::unknown(format!("element `{x}`: out of fuel")),
        None => Verdict::Holds,
    }
}

/// First pool term for which [`verify_morphism`] holds, if any.
pub fn search_realizer(
    src: &PartitionedAssembly,
    tgt: &PartitionedAssembly,
    map: &BTreeMap<ElemId, ElemId>,
    pool: &TermPool,
    pca: &PcaSpec,
) -> Option<Term> {
    pool.iter()
        .find(|cand| verify_morphism(src, tgt, map, cand, pca).is_holds())
        .cloned()
}

/// Every total function between two carriers, in a deterministic order.
/// Intended for brute-force checks on tiny assemblies.
pub fn enumerate_maps(src: &[ElemId], tgt: &[ElemId]) -> Vec<BTreeMap<ElemId, ElemId>> {
    let mut maps = vec![BTreeMap::new()];
    for x in src {
        let mut next = Vec::with_capacity(maps.len() * tgt.len());
        for partial in &maps {
            for y in tgt {
                let mut m = partial.clone();
                m.insert(x.clone(), y.clone());
                next.push(m);
            }
        }
        maps = next;
    }
    maps
}

// ---------------------------------------------------------------------------
// Products, pullbacks, coproducts
// ---------------------------------------------------------------------------

/// A product assembly with its two projections.
#[derive(Debug, Clone)]
pub struct ProductData {
    pub object: PartitionedAssembly,
    pub proj1: AsmMorphism,
    pub proj2: AsmMorphism,
}

impl ProductData {
    pub fn left(&self) -> &PartitionedAssembly {
        self.proj1.target()
    }

    pub fn right(&self) -> &PartitionedAssembly {
        self.proj2.target()
    }
}

/// Cartesian product: elements `(a,b)`, names `⟨φ(a), ψ(b)⟩`, projections
/// realized by `p1` and `p2`.
pub fn product(a: &PartitionedAssembly, b: &PartitionedAssembly) -> ProductData {
    let mut elements = Vec::new();
    let mut map1 = BTreeMap::new();
    let mut map2 = BTreeMap::new();
    for x in a.carrier() {
        for y in b.carrier() {
            let id = pair_id(x, y);
            elements.push((id.clone(), term::pair_of(&a.naming[x], &b.naming[y])));
            map1.insert(id.clone(), x.clone());
            map2.insert(id, y.clone());
        }
    }
    let object = PartitionedAssembly::new(&format!("{}×{}", a.label, b.label), elements)
        .expect("pair ids are distinct");
    let proj1 = AsmMorphism::new(
        &format!("π1_{}", object.label),
        object.clone(),
        a.clone(),
        map1,
        term::p1_c(),
    )
    .expect("projection map is total");
    let proj2 = AsmMorphism::new(
        &format!("π2_{}", object.label),
        object.clone(),
        b.clone(),
        map2,
        term::p2_c(),
    )
    .expect("projection map is total");
    ProductData { object, proj1, proj2 }
}

/// Mediating morphism `⟨f,g⟩ : Z → A×B`, realized by `λs.⟨r_f s, r_g s⟩`.
pub fn pair_into(
    f: &AsmMorphism,
    g: &AsmMorphism,
    prod: &ProductData,
) -> Result<AsmMorphism, AsmError> {
    if f.source != g.source {
        return Err(AsmError::BoundaryMismatch(f.label.clone(), g.label.clone()));
    }
    if f.target != *prod.left() || g.target != *prod.right() {
        return Err(AsmError::BoundaryMismatch(f.label.clone(), prod.object.label.clone()));
    }
    let mut map = BTreeMap::new();
    for z in f.source.carrier() {
        map.insert(z.clone(), pair_id(&f.map[z], &g.map[z]));
    }
    let realizer = lam(
        &["s"],
        LambdaExpr::pair(
            LambdaExpr::app(LambdaExpr::Const(f.realizer.clone()), LambdaExpr::var("s")),
            LambdaExpr::app(LambdaExpr::Const(g.realizer.clone()), LambdaExpr::var("s")),
        ),
    );
    AsmMorphism::new(
        &format!("⟨{},{}⟩", f.label, g.label),
        f.source.clone(),
        prod.object.clone(),
        map,
        realizer,
    )
}

/// A pullback assembly with its two projections.
#[derive(Debug, Clone)]
pub struct PullbackData {
    pub object: PartitionedAssembly,
    pub proj1: AsmMorphism,
    pub proj2: AsmMorphism,
}

/// Pullback of `f : A → X` against `g : B → X`: the sub-product of pairs
/// agreeing in `X`, named by pairing, projections realized by `p1`/`p2`.
pub fn pullback(f: &AsmMorphism, g: &AsmMorphism) -> Result<PullbackData, AsmError> {
    if f.target != g.target {
        return Err(AsmError::BoundaryMismatch(f.label.clone(), g.label.clone()));
    }
    let a = &f.source;
    let b = &g.source;
    let mut elements = Vec::new();
    let mut map1 = BTreeMap::new();
    let mut map2 = BTreeMap::new();
    for x in a.carrier() {
        for y in b.carrier() {
            if f.map[x] != g.map[y] {
                continue;
            }
            let id = pair_id(x, y);
            elements.push((id.clone(), term::pair_of(&a.naming[x], &b.naming[y])));
            map1.insert(id.clone(), x.clone());
            map2.insert(id, y.clone());
        }
    }
    let object = PartitionedAssembly::new(
        &format!("{}×_{{{}}}{}", a.label, f.target.label, b.label),
        elements,
    )
    .expect("pair ids are distinct");
    let proj1 = AsmMorphism::new(
        &format!("π1_{}", object.label),
        object.clone(),
        a.clone(),
        map1,
        term::p1_c(),
    )?;
    let proj2 = AsmMorphism::new(
        &format!("π2_{}", object.label),
        object.clone(),
        b.clone(),
        map2,
        term::p2_c(),
    )?;
    Ok(PullbackData { object, proj1, proj2 })
}

/// A coproduct assembly with its two injections.
#[derive(Debug, Clone)]
pub struct CoproductData {
    pub object: PartitionedAssembly,
    pub inl: AsmMorphism,
    pub inr: AsmMorphism,
}

/// Tagged disjoint union: `inl(y)` named `⟨true, ψ(y)⟩` and `inr(z)` named
/// `⟨false, η(z)⟩`, injections realized by `λx.⟨true,x⟩` / `λx.⟨false,x⟩`.
pub fn coproduct(a: &PartitionedAssembly, b: &PartitionedAssembly) -> CoproductData {
    let mut elements = Vec::new();
    let mut lmap = BTreeMap::new();
    let mut rmap = BTreeMap::new();
    for y in a.carrier() {
        let id = inl_id(y);
        elements.push((id.clone(), term::pair_of(&term::true_c(), &a.naming[y])));
        lmap.insert(y.clone(), id);
    }
    for z in b.carrier() {
        let id = inr_id(z);
        elements.push((id.clone(), term::pair_of(&term::false_c(), &b.naming[z])));
        rmap.insert(z.clone(), id);
    }
    let object = PartitionedAssembly::new(&format!("{}⊔{}", a.label, b.label), elements)
        .expect("tagged ids are distinct");
    let inl_real = lam(
        &["x"],
        LambdaExpr::pair(LambdaExpr::Const(term::true_c()), LambdaExpr::var("x")),
    );
    let inr_real = lam(
        &["x"],
        LambdaExpr::pair(LambdaExpr::Const(term::false_c()), LambdaExpr::var("x")),
    );
    let inl = AsmMorphism::new(
        &format!("inl_{}", object.label),
        a.clone(),
        object.clone(),
        lmap,
        inl_real,
    )
    .expect("injection map is total");
    let inr = AsmMorphism::new(
        &format!("inr_{}", object.label),
        b.clone(),
        object.clone(),
        rmap,
        inr_real,
    )
    .expect("injection map is total");
    CoproductData { object, inl, inr }
}

/// Case analysis `[f,g] : A⊔B → C`, realized by
/// `λc. case (p1 c) (r_f (p2 c)) (r_g (p2 c))`.
pub fn copair(
    f: &AsmMorphism,
    g: &AsmMorphism,
    cop: &CoproductData,
) -> Result<AsmMorphism, AsmError> {
    if f.target != g.target {
        return Err(AsmError::BoundaryMismatch(f.label.clone(), g.label.clone()));
    }
    if f.source != *cop.inl.source() || g.source != *cop.inr.source() {
        return Err(AsmError::BoundaryMismatch(f.label.clone(), cop.object.label.clone()));
    }
    let mut map = BTreeMap::new();
    for y in f.source.carrier() {
        map.insert(inl_id(y), f.map[y].clone());
    }
    for z in g.source.carrier() {
        map.insert(inr_id(z), g.map[z].clone());
    }
    let arg = |r: &Term| {
        LambdaExpr::app(
            LambdaExpr::Const(r.clone()),
            LambdaExpr::app(LambdaExpr::Const(term::p2_c()), LambdaExpr::var("c")),
        )
    };
    let realizer = lam(
        &["c"],
        LambdaExpr::apps(
            LambdaExpr::Const(term::case_c()),
            vec![
                LambdaExpr::app(LambdaExpr::Const(term::p1_c()), LambdaExpr::var("c")),
                arg(&f.realizer),
                arg(&g.realizer),
            ],
        ),
    );
    AsmMorphism::new(
        &format!("[{},{}]", f.label, g.label),
        cop.object.clone(),
        f.target.clone(),
        map,
        realizer,
    )
}

// ---------------------------------------------------------------------------
// Assemblies and the partition construction
// ---------------------------------------------------------------------------

/// A finite carrier where each element has a nonempty finite set of
/// realizers (possibly several, possibly shared between elements).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assembly {
    label: String,
    carrier: Vec<ElemId>,
    realizers: BTreeMap<ElemId, TermSet>,
}

impl Assembly {
    pub fn new(
        label: &str,
        elements: impl IntoIterator<Item = (ElemId, TermSet)>,
    ) -> Result<Self, AsmError> {
        let mut carrier = Vec::new();
        let mut realizers = BTreeMap::new();
        for (id, set) in elements {
            if set.is_empty() {
                return Err(AsmError::EmptyRealizers(id));
            }
            if realizers.insert(id.clone(), set).is_some() {
                return Err(AsmError::DuplicateElement(id));
            }
            carrier.push(id);
        }
        Ok(Assembly { label: label.to_string(), carrier, realizers })
    }

    /// View a partitioned assembly as an assembly with singleton realizer
    /// sets.
    pub fn from_partitioned(pa: &PartitionedAssembly) -> Assembly {
        let elements = pa.carrier().iter().map(|id| {
            let mut set = TermSet::new();
            set.insert(pa.naming[id].clone());
            (id.clone(), set)
        });
        Assembly::new(pa.label(), elements).expect("names are nonempty realizer sets")
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn carrier(&self) -> &[ElemId] {
        &self.carrier
    }

    pub fn len(&self) -> usize {
        self.carrier.len()
    }

    pub fn is_empty(&self) -> bool {
        self.carrier.is_empty()
    }

    pub fn realizers(&self, id: &str) -> Result<&TermSet, AsmError> {
        self.realizers
            .get(id)
            .ok_or_else(|| AsmError::UnknownElement(id.to_string(), self.label.clone()))
    }

    /// All elements realized by `t`.
    pub fn realized_by(&self, t: &Term) -> Vec<&ElemId> {
        self.carrier.iter().filter(|id| self.realizers[*id].contains(t)).collect()
    }
}

/// Value of a predicate at an element; missing entries read as the empty set.
pub fn pred_at(pred: &PredValues, id: &str) -> TermSet {
    pred.get(id).cloned().unwrap_or_default()
}

/// Output of [`partition_predicate`]: the split assembly, the transported
/// predicate, the pair decomposition of the new carrier, and the reduction
/// witnesses `(l1, l2)` in both directions.
#[derive(Debug, Clone)]
pub struct PartitionData {
    /// The partitioned assembly `X_φ` of (element, realizer) pairs.
    pub object: PartitionedAssembly,
    /// The transported predicate `α_φ` over `object`.
    pub alpha: PredValues,
    /// new id → (original element, chosen realizer).
    pub decomposition: BTreeMap<ElemId, (ElemId, Term)>,
    /// Witness pair reducing the original predicate to `alpha`.
    pub to_partitioned: (Term, Term),
    /// Witness pair reducing `alpha` back to the original predicate.
    pub from_partitioned: (Term, Term),
}

/// Split a predicate `φ` over an assembly into the predicate
/// `α_φ(x,s) = {⟨q,s⟩ | q ∈ φ(x)}` over the partitioned assembly of
/// (element, realizer) pairs, where the pair `(x,s)` is named by `s` itself.
///
/// The forward witness is `(I, λc. p1 (p2 c))`: given `⟨s, ⟨q,s⟩⟩` it
/// recovers `q ∈ φ(x)`. The backward witness is `(I, swap)`: given `⟨s, q⟩`
/// it builds `⟨q,s⟩ ∈ α_φ(x,s)`.
pub fn partition_predicate(x: &Assembly, pred: &PredValues) -> PartitionData {
    let mut elements = Vec::new();
    let mut alpha = PredValues::new();
    let mut decomposition = BTreeMap::new();
    for e in x.carrier() {
        for s in &x.realizers[e] {
            let id = format!("({e},{s})");
            elements.push((id.clone(), s.clone()));
            let values: TermSet =
                pred_at(pred, e).iter().map(|q| term::pair_of(q, s)).collect();
            alpha.insert(id.clone(), values);
            decomposition.insert(id, (e.clone(), s.clone()));
        }
    }
    let object = PartitionedAssembly::new(&format!("{}_part", x.label), elements)
        .expect("(element, realizer) ids are distinct");
    let to_partitioned = (
        term::i(),
        lam(
            &["c"],
            LambdaExpr::app(
                LambdaExpr::Const(term::p1_c()),
                LambdaExpr::app(LambdaExpr::Const(term::p2_c()), LambdaExpr::var("c")),
            ),
        ),
    );
    let from_partitioned = (term::i(), term::swap_c());
    PartitionData { object, alpha, decomposition, to_partitioned, from_partitioned }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::Term;

    fn pca() -> PcaSpec {
        PcaSpec::default()
    }

    fn named(label: &str, names: &[(&str, Term)]) -> PartitionedAssembly {
        PartitionedAssembly::new(
            label,
            names.iter().map(|(id, t)| (id.to_string(), t.clone())),
        )
        .unwrap()
    }

    fn ks_assembly() -> PartitionedAssembly {
        named("X", &[("a", Term::K), ("b", Term::S)])
    }

    // -- construction and validation --------------------------------------

    #[test]
    fn duplicate_ids_are_rejected() {
        let err = PartitionedAssembly::new(
            "X",
            vec![("a".to_string(), Term::K), ("a".to_string(), Term::S)],
        )
        .unwrap_err();
        assert_eq!(err, AsmError::DuplicateElement("a".to_string()));
    }

    #[test]
    fn validate_rejects_reducible_names() {
        let redex = Term::apps(Term::K, &[Term::K, Term::S]);
        let pa = named("X", &[("a", redex)]);
        assert!(matches!(pa.validate(&pca()), Err(AsmError::NameNotValue { .. })));
        assert!(ks_assembly().validate(&pca()).is_ok());
    }

    // -- verify_morphism ---------------------------------------------------

    #[test]
    fn identity_realized_by_i_holds() {
        let x = ks_assembly();
        assert!(identity(&x).verify(&pca()).is_holds());
    }

    #[test]
    fn constant_map_realized_by_compiled_constant_holds() {
        let x = ks_assembly();
        let t = named("T", &[("k", Term::K)]);
        let map: BTreeMap<_, _> =
            x.carrier().iter().map(|e| (e.clone(), "k".to_string())).collect();
        let cand = lam(&["x"], LambdaExpr::Const(Term::K));
        assert!(verify_morphism(&x, &t, &map, &cand, &pca()).is_holds());
    }

    #[test]
    fn identity_term_fails_when_names_differ() {
        let src = named("X", &[("a", Term::K)]);
        let tgt = named("Y", &[("b", Term::S)]);
        let map = BTreeMap::from([("a".to_string(), "b".to_string())]);
        let v = verify_morphism(&src, &tgt, &map, &term::i(), &pca());
        assert!(matches!(v, Verdict::Fails { .. }));
    }

    #[test]
    fn oracle_realizers_are_rejected() {
        let x = named("X", &[("a", Term::K)]);
        let map = BTreeMap::from([("a".to_string(), "a".to_string())]);
        let v = verify_morphism(&x, &x, &map, &Term::oracle("f"), &pca());
        assert!(matches!(v, Verdict::Fails { .. }));
    }

    #[test]
    fn fuel_exhaustion_reports_unknown() {
        // ω ω loops forever; name it in the source and ask for fuel 5.
        let omega = lam(
            &["x"],
            LambdaExpr::app(LambdaExpr::var("x"), LambdaExpr::var("x")),
        );
        let src = named("X", &[("a", Term::K)]);
        let tgt = named("Y", &[("b", Term::K)]);
        let map = BTreeMap::from([("a".to_string(), "b".to_string())]);
        let spin = lam(
            &["x"],
            LambdaExpr::app(LambdaExpr::Const(omega.clone()), LambdaExpr::Const(omega)),
        );
        let mut low_fuel = pca();
        low_fuel.fuel = 5;
        let v = verify_morphism(&src, &tgt, &map, &spin, &low_fuel);
        assert!(matches!(v, Verdict::Unknown { .. }));
    }

    // -- search ------------------------------------------------------------

    #[test]
    fn search_finds_skk_for_identity_in_size_lex_pool() {
        let x = ks_assembly();
        let map: BTreeMap<_, _> =
            x.carrier().iter().map(|e| (e.clone(), e.clone())).collect();
        let pool = TermPool::from_items(crate::pool::sk_terms_up_to(3));
        let found = search_realizer(&x, &x, &map, &pool, &pca()).unwrap();
        assert_eq!(found, term::i());
    }

    #[test]
    fn search_reports_none_when_pool_cannot_work() {
        let src = named("X", &[("a", Term::K)]);
        let tgt = named("Y", &[("b", Term::S)]);
        let map = BTreeMap::from([("a".to_string(), "b".to_string())]);
        let pool = TermPool::from_items(vec![term::i()]);
        assert!(search_realizer(&src, &tgt, &map, &pool, &pca()).is_none());
    }

    #[test]
    fn search_covers_projection_maps() {
        let src = named("X", &[("p", term::pair_of(&Term::K, &Term::S))]);
        let tgt = named("Y", &[("s", Term::S)]);
        let map = BTreeMap::from([("p".to_string(), "s".to_string())]);
        let pool = TermPool::standard(3, &[]);
        let found = search_realizer(&src, &tgt, &map, &pool, &pca()).unwrap();
        assert!(verify_morphism(&src, &tgt, &map, &found, &pca()).is_holds());
    }

    // -- products, terminal ------------------------------------------------

    #[test]
    fn product_carrier_and_projections() {
        let x = ks_assembly();
        let y = named("Y", &[("u", term::false_c())]);
        let p = product(&x, &y);
        assert_eq!(p.object.len(), 2);
        assert_eq!(p.object.carrier(), ["(a,u)", "(b,u)"]);
        assert_eq!(
            p.object.name("(a,u)").unwrap(),
            &term::pair_of(&Term::K, &term::false_c())
        );
        assert!(p.proj1.verify(&pca()).is_holds());
        assert!(p.proj2.verify(&pca()).is_holds());
    }

    #[test]
    fn product_with_terminal_is_isomorphic_via_p2() {
        let x = ks_assembly();
        let p = product(&terminal(), &x);
        assert_eq!(p.object.len(), x.len());
        // (*,e) ↦ e realized by p2.
        let map: BTreeMap<_, _> = x
            .carrier()
            .iter()
            .map(|e| (pair_id("*", e), e.clone()))
            .collect();
        let v = verify_morphism(&p.object, &x, &map, &term::p2_c(), &pca());
        assert!(v.is_holds());
    }

    #[test]
    fn bang_into_terminal_holds() {
        assert!(bang(&ks_assembly()).verify(&pca()).is_holds());
    }

    #[test]
    fn pairing_into_product_holds() {
        let x = ks_assembly();
        let p = product(&x, &x);
        let diag = pair_into(&identity(&x), &identity(&x), &p).unwrap();
        assert_eq!(diag.apply("a").unwrap(), "(a,a)");
        assert!(diag.verify(&pca()).is_holds());
    }

    // -- pullbacks ----------------------------------------------------------

    #[test]
    fn pullback_of_identities_is_diagonal() {
        let x = ks_assembly();
        let pb = pullback(&identity(&x), &identity(&x)).unwrap();
        assert_eq!(pb.object.carrier(), ["(a,a)", "(b,b)"]);
        assert!(pb.proj1.verify(&pca()).is_holds());
        assert!(pb.proj2.verify(&pca()).is_holds());
    }

    #[test]
    fn pullback_of_constants_is_full_product() {
        let x = ks_assembly();
        let one = terminal();
        let f = bang(&x);
        let pb = pullback(&f, &f).unwrap();
        assert_eq!(pb.object.len(), x.len() * x.len());
        let _ = one;
    }

    #[test]
    fn pullback_with_disjoint_images_is_empty() {
        let t = ks_assembly();
        let a = named("A", &[("x", Term::K)]);
        let b = named("B", &[("y", Term::S)]);
        let f = AsmMorphism::new(
            "f",
            a.clone(),
            t.clone(),
            BTreeMap::from([("x".to_string(), "a".to_string())]),
            lam(&["v"], LambdaExpr::Const(Term::K)),
        )
        .unwrap();
        let g = AsmMorphism::new(
            "g",
            b.clone(),
            t.clone(),
            BTreeMap::from([("y".to_string(), "b".to_string())]),
            lam(&["v"], LambdaExpr::Const(Term::S)),
        )
        .unwrap();
        assert!(pullback(&f, &g).unwrap().object.is_empty());
    }

    #[test]
    fn pullback_universal_property_brute_force() {
        // f : A → X constant, g : B → X identity-ish; P the pullback.
        let x = ks_assembly();
        let a = named("A", &[("u", term::false_c()), ("v", term::pair_of(&Term::K, &Term::K))]);
        let f = AsmMorphism::new(
            "f",
            a.clone(),
            x.clone(),
            BTreeMap::from([
                ("u".to_string(), "a".to_string()),
                ("v".to_string(), "a".to_string()),
            ]),
            lam(&["t"], LambdaExpr::Const(Term::K)),
        )
        .unwrap();
        let g = identity(&x);
        assert!(f.verify(&pca()).is_holds());
        let pb = pullback(&f, &g).unwrap();
        assert_eq!(pb.object.carrier(), ["(u,a)", "(v,a)"]);

        // Every commuting cone from Z factors through exactly one set map,
        // and the standard pool (plus the compiled candidate) realizes it.
        let z = named("Z", &[("z0", Term::S)]);
        for u_map in enumerate_maps(z.carrier(), a.carrier()) {
            for v_map in enumerate_maps(z.carrier(), x.carrier()) {
                let commutes = z
                    .carrier()
                    .iter()
                    .all(|e| f.map()[&u_map[e]] == *g.map()[&v_map[e]]);
                if !commutes {
                    continue;
                }
                let mediators: Vec<_> = enumerate_maps(z.carrier(), pb.object.carrier())
                    .into_iter()
                    .filter(|m| {
                        z.carrier().iter().all(|e| {
                            pb.proj1.map()[&m[e]] == u_map[e]
                                && pb.proj2.map()[&m[e]] == v_map[e]
                        })
                    })
                    .collect();
                assert_eq!(mediators.len(), 1, "mediating set map must be unique");

                // Find realizers for the cone legs, build the paired
                // candidate, and let the search find something that works.
                let small = TermPool::standard(3, &[]);
                let ru = search_realizer(&z, &a, &u_map, &small, &pca());
                let rv = search_realizer(&z, &x, &v_map, &small, &pca());
                if let (Some(ru), Some(rv)) = (ru, rv) {
                    let cand = lam(
                        &["s"],
                        LambdaExpr::pair(
                            LambdaExpr::app(LambdaExpr::Const(ru), LambdaExpr::var("s")),
                            LambdaExpr::app(LambdaExpr::Const(rv), LambdaExpr::var("s")),
                        ),
                    );
                    let pool = TermPool::standard(3, &[cand]);
                    let found =
                        search_realizer(&z, &pb.object, &mediators[0], &pool, &pca());
                    assert!(found.is_some(), "mediator realizer must be found");
                }
            }
        }
    }

    // -- coproducts ----------------------------------------------------------

    #[test]
    fn coproduct_tags_and_injections() {
        let y = named("Y", &[("p", Term::K)]);
        let z = named("Z", &[("q", Term::S)]);
        let c = coproduct(&y, &z);
        assert_eq!(c.object.carrier(), ["inl(p)", "inr(q)"]);
        assert_eq!(
            c.object.name("inl(p)").unwrap(),
            &term::pair_of(&term::true_c(), &Term::K)
        );
        assert_eq!(
            c.object.name("inr(q)").unwrap(),
            &term::pair_of(&term::false_c(), &Term::S)
        );
        assert!(c.inl.verify(&pca()).is_holds());
        assert!(c.inr.verify(&pca()).is_holds());
    }

    #[test]
    fn coproduct_with_empty_left_is_right_with_tags() {
        let empty = named("∅", &[]);
        let z = ks_assembly();
        let c = coproduct(&empty, &z);
        assert_eq!(c.object.len(), z.len());
        for e in z.carrier() {
            assert_eq!(
                c.object.name(&inr_id(e)).unwrap(),
                &term::pair_of(&term::false_c(), z.name(e).unwrap())
            );
        }
    }

    #[test]
    fn copair_dispatches_on_tags() {
        let y = named("Y", &[("p", Term::K)]);
        let z = named("Z", &[("q", Term::S)]);
        let c = coproduct(&y, &z);
        let tgt = ks_assembly();
        let h1 = AsmMorphism::new(
            "h1",
            y.clone(),
            tgt.clone(),
            BTreeMap::from([("p".to_string(), "a".to_string())]),
            term::i(),
        )
        .unwrap();
        let h2 = AsmMorphism::new(
            "h2",
            z.clone(),
            tgt.clone(),
            BTreeMap::from([("q".to_string(), "b".to_string())]),
            term::i(),
        )
        .unwrap();
        let h = copair(&h1, &h2, &c).unwrap();
        assert_eq!(h.apply("inl(p)").unwrap(), "a");
        assert_eq!(h.apply("inr(q)").unwrap(), "b");
        assert!(h.verify(&pca()).is_holds());
    }

    // -- composition ----------------------------------------------------------

    #[test]
    fn composition_verifies_and_respects_maps() {
        let x = ks_assembly();
        let c = coproduct(&x, &x);
        let h = compose(&c.inl, &identity(&x)).unwrap();
        assert_eq!(h.apply("a").unwrap(), "inl(a)");
        assert!(h.verify(&pca()).is_holds());
    }

    #[test]
    fn composition_rejects_boundary_mismatch() {
        let x = ks_assembly();
        let y = named("Y", &[("u", Term::K)]);
        let err = compose(&identity(&y), &identity(&x)).unwrap_err();
        assert!(matches!(err, AsmError::ComposeMismatch(_, _)));
    }

    // -- assemblies and partitioning ------------------------------------------

    #[test]
    fn assembly_requires_nonempty_realizers() {
        let err = Assembly::new("X", vec![("a".to_string(), TermSet::new())]).unwrap_err();
        assert_eq!(err, AsmError::EmptyRealizers("a".to_string()));
    }

    #[test]
    fn partition_single_element_single_realizer() {
        let x = Assembly::new(
            "X",
            vec![("x".to_string(), TermSet::from([Term::K]))],
        )
        .unwrap();
        let pred = PredValues::from([("x".to_string(), TermSet::from([Term::S]))]);
        let data = partition_predicate(&x, &pred);
        assert_eq!(data.object.carrier(), ["(x,K)"]);
        assert_eq!(data.object.name("(x,K)").unwrap(), &Term::K);
        assert_eq!(
            data.alpha["(x,K)"],
            TermSet::from([term::pair_of(&Term::S, &Term::K)])
        );
    }

    #[test]
    fn partition_of_partitioned_assembly_keeps_size() {
        let pa = ks_assembly();
        let x = Assembly::from_partitioned(&pa);
        let data = partition_predicate(&x, &PredValues::new());
        assert_eq!(data.object.len(), pa.len());
    }

    #[test]
    fn partition_splits_elements_per_realizer() {
        let x = Assembly::new(
            "X",
            vec![("x".to_string(), TermSet::from([Term::K, Term::S]))],
        )
        .unwrap();
        let data = partition_predicate(&x, &PredValues::new());
        assert_eq!(data.object.len(), 2);
        assert_eq!(data.decomposition["(x,K)"], ("x".to_string(), Term::K));
        assert_eq!(data.decomposition["(x,S)"], ("x".to_string(), Term::S));
    }
}
