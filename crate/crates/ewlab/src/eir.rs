//! The elementary layer of the instance doctrine.
//!
//! A base predicate assigns each element of a partitioned assembly a finite
//! set of terms. Predicates over the same assembly are preordered by
//! `α ≤ β` iff some oracle-free `h̄` sends `⟨φ(x), q⟩` into `α(x)` for every
//! element `x` and every `q ∈ β(x)`. The empty-valued predicate is the top
//! element; binary meets are pointwise tagged unions; reindexing along a
//! morphism is precomposition.
//!
//! The same reduction notion makes sense between predicates over plain
//! assemblies (elements may have several realizers): `φ` over `X` reduces to
//! `ψ` over `Y` when oracle-free `l₁, l₂` send every realizer `s` of every
//! `x` to a realizer `l₁·s` of some `y` such that `l₂·⟨s,p⟩ ∈ φ(x)` for all
//! `p ∈ ψ(y)`. [`assembly_instance_leq`] checks that; together with
//! [`crate::asm::partition_predicate`] it shows every predicate over an
//! assembly is interchangeable with one over a partitioned assembly.



use thiserror::Error;

use crate::asm::{pred_at, AsmError, AsmMorphism, Assembly, PartitionedAssembly, PredValues};
use crate::pool::TermPool;
use crate::term::{self, PcaSpec, Reduction, Term, TermSet};
use crate::Verdict;

/// Errors shared by the doctrine constructions.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DoctrineError {
    #[error("predicates live over different bases: `{0}` vs `{1}`")]
    BaseMismatch(String, String),
    #[error("predicate mentions `{0}`, which is not in the carrier of `{1}`")]
    UnknownElement(String, String),
    #[error("predicate base `{0}` does not match the morphism end `{1}`")]
    EndMismatch(String, String),
    #[error("witness boundary mismatch: `{0}` vs `{1}`")]
    WitnessMismatch(String, String),
    #[error("implication universe is missing {0}")]
    UniverseTooSmall(String),
    #[error("section-realizer pool is missing {0}")]
    PoolTooSmall(String),
    #[error("`{0}` is not a value")]
    NotAValue(String),
    #[error("base `{0}` does not name all elements by the same term")]
    MixedNames(String),
    #[error("constructed witness fails to verify: {0}")]
    VerificationFailed(String),
    #[error(transparent)]
    Asm(#[from] AsmError),
}

/// A finite-valued predicate over a partitioned assembly: the function
/// `α : |X| → ℘(𝔸)` restricted to finite sets. Total by construction;
/// missing declarations read as the empty set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasePredicate {
    base: PartitionedAssembly,
    values: PredValues,
}

impl BasePredicate {
    /// Build over `base`; `values` may omit elements (read as `∅`) but must
    /// not mention ids outside the carrier.
    pub fn new(base: PartitionedAssembly, values: PredValues) -> Result<Self, DoctrineError> {
        for id in values.keys() {
            if !base.contains(id) {
                return Err(DoctrineError::UnknownElement(
                    id.clone(),
                    base.label().to_string(),
                ));
            }
        }
        let mut total = PredValues::new();
        for id in base.carrier() {
            total.insert(id.clone(), pred_at(&values, id));
        }
        Ok(BasePredicate { base, values: total })
    }

    pub fn base(&self) -> &PartitionedAssembly {
        &self.base
    }

    pub fn values(&self) -> &PredValues {
        &self.values
    }

    /// Value at an element (empty for unknown ids).
    pub fn at(&self, id: &str) -> TermSet {
        pred_at(&self.values, id)
    }

    /// True iff every value is empty, i.e. the predicate is the top element.
    pub fn is_constantly_empty(&self) -> bool {
        self.values.values().all(|s| s.is_empty())
    }
}

/// The top element of the fibre: constantly `∅`.
pub fn eir_top(base: &PartitionedAssembly) -> BasePredicate {
    BasePredicate::new(base.clone(), PredValues::new()).expect("empty values are valid")
}

/// Binary meet: pointwise tagged union `(α∧β)(x) = α(x) ⊕ β(x)`.
pub fn eir_meet(
    alpha: &BasePredicate,
    beta: &BasePredicate,
) -> Result<BasePredicate, DoctrineError> {
    if alpha.base != beta.base {
        return Err(DoctrineError::BaseMismatch(
            alpha.base.label().to_string(),
            beta.base.label().to_string(),
        ));
    }
    let mut values = PredValues::new();
    for id in alpha.base.carrier() {
        values.insert(id.clone(), term::oplus(&alpha.at(id), &beta.at(id)));
    }
    BasePredicate::new(alpha.base.clone(), values)
}

/// Reindexing along `h : Y → X` is precomposition: `y ↦ β(h(y))`.
pub fn eir_reindex(
    h: &AsmMorphism,
    beta: &BasePredicate,
) -> Result<BasePredicate, DoctrineError> {
    if *h.target() != beta.base {
        return Err(DoctrineError::EndMismatch(
            beta.base.label().to_string(),
            h.target().label().to_string(),
        ));
    }
    let mut values = PredValues::new();
    for y in h.source().carrier() {
        values.insert(y.clone(), beta.at(h.apply(y)?));
    }
    BasePredicate::new(h.source().clone(), values)
}

/// Does `hbar` witness `α ≤ β`? Holds iff `hbar` is oracle-free and
/// `hbar · ⟨φ(x), q⟩` converges into `α(x)` for every element `x` of the
/// shared base and every `q ∈ β(x)`.
pub fn leq_eir(
    alpha: &BasePredicate,
    beta: &BasePredicate,
    hbar: &Term,
    pca: &PcaSpec,
) -> Verdict {
    if alpha.base != beta.base {
        return Verdict::fails(format!(
            "different bases: `{}` vs `{}`",
            alpha.base.label(),
            beta.base.label()
        ));
    }
    if !hbar.oracle_free() {
        return Verdict::fails(format!("witness `{hbar}` mentions an oracle"));
    }
    let mut out_of_fuel: Option<String> = None;
    for x in alpha.base.carrier() {
        let name = alpha.base.name(x).expect("carrier element has a name");
        for q in &beta.at(x) {
            match term::apply(hbar, &term::pair_of(name, q), pca) {
                Reduction::Converged { value, .. } => {
                    if !alpha.at(x).contains(&value) {
                        return Verdict::fails(format!(
                            "element `{x}`, q = {q}: got {value}, not in the target set"
                        ));
                    }
                }
                Reduction::Stuck { .. } => {
                    return Verdict::fails(format!("element `{x}`, q = {q}: stuck"));
                }
                Reduction::FuelExhausted { .. } => {
                    out_of_fuel.get_or_insert_with(|| x.clone());
                }
            }
        }
    }
    match out_of_fuel {
        Some(x) => Verdict::unknown(format!("element `{x}`: out of fuel")),
        None => Verdict::Holds,
    }
}

/// First pool term witnessing `α ≤ β`, if any.
pub fn search_hbar(
    alpha: &BasePredicate,
    beta: &BasePredicate,
    pool: &TermPool,
    pca: &PcaSpec,
) -> Option<Term> {
    pool.iter()
        .find(|cand| leq_eir(alpha, beta, cand, pca).is_holds())
        .cloned()
}

/// Instance reducibility between predicates over plain assemblies: do
/// oracle-free `l1`, `l2` reduce `φ` over `X` to `ψ` over `Y`? For every
/// `x` and every realizer `s ⊩ x`, `l1·s` must realize some `y` such that
/// `l2·⟨s,p⟩` lands in `φ(x)` for every `p ∈ ψ(y)`.
pub fn assembly_instance_leq(
    x: &Assembly,
    phi: &PredValues,
    y: &Assembly,
    psi: &PredValues,
    l1: &Term,
    l2: &Term,
    pca: &PcaSpec,
) -> Verdict {
    for l in [l1, l2] {
        if !l.oracle_free() {
            return Verdict::fails(format!("witness `{l}` mentions an oracle"));
        }
    }
    let mut out_of_fuel: Option<String> = None;
    for e in x.carrier() {
        let phi_e = pred_at(phi, e);
        for s in x.realizers(e).expect("carrier element") {
            let image = match term::apply(l1, s, pca) {
                Reduction::Converged { value, .. } => value,
                Reduction::Stuck { .. } => {
                    return Verdict::fails(format!("element `{e}`, realizer {s}: l1 is stuck"));
                }
                Reduction::FuelExhausted { .. } => {
                    out_of_fuel.get_or_insert_with(|| e.clone());
                    continue;
                }
            };
            let candidates = y.realized_by(&image);
            if candidates.is_empty() {
                return Verdict::fails(format!(
                    "element `{e}`, realizer {s}: l1 gives {image}, which realizes nothing"
                ));
            }
            // Existential over candidate targets: at least one must pass its
            // membership checks.
            let mut witness_found = false;
            let mut candidate_unknown = false;
            let mut first_failure = None;
            for yc in candidates {
                let mut ok = true;
                let mut unknown = false;
                for p in &pred_at(psi, yc) {
                    match term::apply(l2, &term::pair_of(s, p), pca) {
                        Reduction::Converged { value, .. } => {
                            if !phi_e.contains(&value) {
                                ok = false;
                                first_failure.get_or_insert(format!(
                                    "element `{e}`, realizer {s}, target `{yc}`, p = {p}: \
                                     got {value}, not in the source set"
                                ));
                                break;
                            }
                        }
                        Reduction::Stuck { .. } => {
                            ok = false;
                            first_failure.get_or_insert(format!(
                                "element `{e}`, realizer {s}, target `{yc}`, p = {p}: stuck"
                            ));
                            break;
                        }
                        Reduction::FuelExhausted { .. } => {
                            ok = false;
                            unknown = true;
                            break;
                        }
                    }
                }
                if ok {
                    witness_found = true;
                    break;
                }
                if unknown {
                    candidate_unknown = true;
                }
            }
            if !witness_found {
                if candidate_unknown {
                    out_of_fuel.get_or_insert_with(|| e.clone());
                } else {
                    return Verdict::fails(
                        first_failure.unwrap_or_else(|| format!("element `{e}`: no target")),
                    );
                }
            }
        }
    }
    match out_of_fuel {
        Some(e) => Verdict::unknown(format!("element `{e}`: out of fuel")),
        None => Verdict::Holds,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asm::{identity, partition_predicate};
    use crate::term::{lam, LambdaExpr, Term};

    fn pca() -> PcaSpec {
        PcaSpec::default()
    }

    fn base() -> PartitionedAssembly {
        PartitionedAssembly::new(
            "X",
            vec![("a".to_string(), Term::K), ("b".to_string(), Term::S)],
        )
        .unwrap()
    }

    fn pred(vals: &[(&str, &[Term])]) -> BasePredicate {
        let values: PredValues = vals
            .iter()
            .map(|(id, ts)| (id.to_string(), ts.iter().cloned().collect()))
            .collect();
        BasePredicate::new(base(), values).unwrap()
    }

    /// `λξ.⟨true, p₂ξ⟩` — tags the payload as a left branch.
    fn inject_left() -> Term {
        lam(
            &["c"],
            LambdaExpr::pair(
                LambdaExpr::Const(term::true_c()),
                LambdaExpr::app(LambdaExpr::Const(term::p2_c()), LambdaExpr::var("c")),
            ),
        )
    }

    // -- order ---------------------------------------------------------------

    #[test]
    fn reflexivity_via_second_projection() {
        let alpha = pred(&[("a", &[Term::K]), ("b", &[Term::S, Term::K])]);
        assert!(leq_eir(&alpha, &alpha, &term::p2_c(), &pca()).is_holds());
    }

    #[test]
    fn everything_is_below_top() {
        let alpha = pred(&[("a", &[Term::K])]);
        let top = eir_top(&base());
        assert!(leq_eir(&alpha, &top, &Term::K, &pca()).is_holds());
        assert!(leq_eir(&alpha, &top, &term::i(), &pca()).is_holds());
    }

    #[test]
    fn nothing_lands_in_an_empty_set() {
        let alpha = pred(&[]);
        let beta = pred(&[("a", &[Term::K])]);
        for cand in [term::i(), term::p2_c(), Term::K, term::pair_c()] {
            assert!(matches!(
                leq_eir(&alpha, &beta, &cand, &pca()),
                Verdict::Fails { .. }
            ));
        }
        assert!(search_hbar(&alpha, &beta, &TermPool::standard(3, &[]), &pca()).is_none());
    }

    #[test]
    fn oracle_witnesses_are_rejected() {
        let alpha = pred(&[("a", &[Term::K])]);
        let v = leq_eir(&alpha, &alpha, &Term::oracle("f"), &pca());
        assert!(matches!(v, Verdict::Fails { .. }));
    }

    // -- meet ------------------------------------------------------------------

    #[test]
    fn meet_with_top_is_false_tagged() {
        let beta = pred(&[("a", &[Term::K])]);
        let top = eir_top(&base());
        let meet = eir_meet(&top, &beta).unwrap();
        assert_eq!(
            meet.at("a"),
            TermSet::from([term::pair_of(&term::false_c(), &Term::K)])
        );
        assert!(meet.at("b").is_empty());
    }

    #[test]
    fn meet_projections_hold_with_tag_injectors() {
        let alpha = pred(&[("a", &[Term::K]), ("b", &[Term::S])]);
        let beta = pred(&[("a", &[term::i()])]);
        let meet = eir_meet(&alpha, &beta).unwrap();
        // meet ≤ α via ⟨true, −⟩ and meet ≤ β via ⟨false, −⟩.
        assert!(leq_eir(&meet, &alpha, &inject_left(), &pca()).is_holds());
        let inject_right = lam(
            &["c"],
            LambdaExpr::pair(
                LambdaExpr::Const(term::false_c()),
                LambdaExpr::app(LambdaExpr::Const(term::p2_c()), LambdaExpr::var("c")),
            ),
        );
        assert!(leq_eir(&meet, &beta, &inject_right, &pca()).is_holds());
        // The injector is also findable by search once registered.
        let pool = TermPool::standard(2, &[inject_left()]);
        assert_eq!(search_hbar(&meet, &alpha, &pool, &pca()), Some(inject_left()));
    }

    #[test]
    fn meet_is_a_greatest_lower_bound() {
        // γ ≤ α via h1 and γ ≤ β via h2 give γ ≤ α∧β by casing on the tag.
        let gamma = pred(&[("a", &[Term::K, Term::S]), ("b", &[Term::K])]);
        let alpha = pred(&[("a", &[Term::K]), ("b", &[Term::K])]);
        let beta = pred(&[("a", &[Term::S]), ("b", &[Term::K])]);
        let h1 = term::p2_c();
        let h2 = term::p2_c();
        assert!(leq_eir(&gamma, &alpha, &h1, &pca()).is_holds());
        assert!(leq_eir(&gamma, &beta, &h2, &pca()).is_holds());
        let meet = eir_meet(&alpha, &beta).unwrap();
        let unpack = |h: Term| {
            // ⟨φ(x), ⟨tag, payload⟩⟩ ↦ h ⟨φ(x), payload⟩
            LambdaExpr::app(
                LambdaExpr::Const(h),
                LambdaExpr::pair(
                    LambdaExpr::app(LambdaExpr::Const(term::p1_c()), LambdaExpr::var("c")),
                    LambdaExpr::app(
                        LambdaExpr::Const(term::p2_c()),
                        LambdaExpr::app(LambdaExpr::Const(term::p2_c()), LambdaExpr::var("c")),
                    ),
                ),
            )
        };
        let mediator = lam(
            &["c"],
            LambdaExpr::apps(
                LambdaExpr::Const(term::case_c()),
                vec![
                    LambdaExpr::app(
                        LambdaExpr::Const(term::p1_c()),
                        LambdaExpr::app(LambdaExpr::Const(term::p2_c()), LambdaExpr::var("c")),
                    ),
                    unpack(h1),
                    unpack(h2),
                ],
            ),
        );
        assert!(leq_eir(&gamma, &meet, &mediator, &pca()).is_holds());
    }

    // -- reindex -----------------------------------------------------------------

    #[test]
    fn reindex_along_identity_is_the_same_predicate() {
        let beta = pred(&[("a", &[Term::K])]);
        let r = eir_reindex(&identity(&base()), &beta).unwrap();
        assert_eq!(r, beta);
    }

    #[test]
    fn reindex_preserves_top_and_constants() {
        let x = base();
        let one = crate::asm::terminal();
        let bang = crate::asm::bang(&x);
        let c = BasePredicate::new(
            one.clone(),
            PredValues::from([("*".to_string(), TermSet::from([Term::K]))]),
        )
        .unwrap();
        let r = eir_reindex(&bang, &c).unwrap();
        for e in x.carrier() {
            assert_eq!(r.at(e), TermSet::from([Term::K]));
        }
        let top = eir_top(&one);
        assert!(eir_reindex(&bang, &top).unwrap().is_constantly_empty());
    }

    // -- the partition construction round-trips -----------------------------------

    fn sample_assembly() -> (Assembly, PredValues) {
        let x = Assembly::new(
            "X",
            vec![
                ("x".to_string(), TermSet::from([Term::K, Term::S])),
                ("y".to_string(), TermSet::from([term::i()])),
            ],
        )
        .unwrap();
        let phi = PredValues::from([
            ("x".to_string(), TermSet::from([Term::K, term::false_c()])),
            ("y".to_string(), TermSet::from([Term::S])),
        ]);
        (x, phi)
    }

    #[test]
    fn partition_witnesses_verify_both_ways() {
        let (x, phi) = sample_assembly();
        let data = partition_predicate(&x, &phi);
        let part = Assembly::from_partitioned(&data.object);
        let (l1, l2) = &data.to_partitioned;
        assert!(
            assembly_instance_leq(&x, &phi, &part, &data.alpha, l1, l2, &pca()).is_holds(),
            "original reduces to partitioned"
        );
        let (m1, m2) = &data.from_partitioned;
        assert!(
            assembly_instance_leq(&part, &data.alpha, &x, &phi, m1, m2, &pca()).is_holds(),
            "partitioned reduces to original"
        );
    }

    #[test]
    fn from_direction_needs_the_component_swap() {
        // With l2 = I the membership check compares ⟨s,p⟩ against the stored
        // ⟨p,s⟩ pairs, so the reduction fails on any non-degenerate instance.
        let (x, phi) = sample_assembly();
        let data = partition_predicate(&x, &phi);
        let part = Assembly::from_partitioned(&data.object);
        let v = assembly_instance_leq(
            &part,
            &data.alpha,
            &x,
            &phi,
            &term::i(),
            &term::i(),
            &pca(),
        );
        assert!(matches!(v, Verdict::Fails { .. }));
    }

    #[test]
    fn shared_realizers_still_reduce() {
        // Two elements sharing the realizer K: the existential over targets
        // must pick the right one per source element.
        let x = Assembly::new(
            "X",
            vec![
                ("u".to_string(), TermSet::from([Term::K])),
                ("v".to_string(), TermSet::from([Term::K])),
            ],
        )
        .unwrap();
        let phi = PredValues::from([
            ("u".to_string(), TermSet::from([Term::K])),
            ("v".to_string(), TermSet::from([Term::S])),
        ]);
        let data = partition_predicate(&x, &phi);
        let part = Assembly::from_partitioned(&data.object);
        let (l1, l2) = &data.to_partitioned;
        assert!(
            assembly_instance_leq(&x, &phi, &part, &data.alpha, l1, l2, &pca()).is_holds()
        );
    }
}
