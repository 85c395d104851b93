//! Randomized properties of the core algebra: combinator axioms, printer and
//! parser inversion, determinism, and fuel monotonicity.

use proptest::prelude::*;

use ewlab::syntax::{parse_term, print_term, TermEnv};
use ewlab::term::{apply, pair_of, reduce, PcaSpec, Reduction, Term};

fn pca() -> PcaSpec {
    PcaSpec::default()
}

/// Random closed terms over S, K and a couple of oracle atoms.
fn arb_term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        Just(Term::K),
        Just(Term::S),
        Just(Term::oracle("f")),
        Just(Term::oracle("g'2")),
    ];
    leaf.prop_recursive(6, 48, 2, |inner| {
        (inner.clone(), inner).prop_map(|(f, a)| Term::app(f, a))
    })
}

/// Random terms extended with numeral and pair values, to exercise the
/// printer's sugared forms.
fn arb_sugared_term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        Just(Term::K),
        Just(Term::S),
        Just(Term::oracle("f")),
        (0u64..50).prop_map(ewlab::term::numeral),
    ];
    leaf.prop_recursive(5, 40, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(f, a)| Term::app(f, a)),
            (inner.clone(), inner).prop_map(|(a, b)| pair_of(&a, &b)),
        ]
    })
}

proptest! {
    /// `K a b` rewrites to `a` whenever `a` and `b` are values.
    #[test]
    fn k_discards_its_second_argument(a in arb_term(), b in arb_term()) {
        let pca = pca();
        let (va, vb) = match (reduce(&a, &pca, 300), reduce(&b, &pca, 300)) {
            (
                Reduction::Converged { value: va, .. },
                Reduction::Converged { value: vb, .. },
            ) => (va, vb),
            _ => return Ok(()),
        };
        let lhs = Term::apps(Term::K, &[va.clone(), vb]);
        let cancelled = matches!(
            reduce(&lhs, &pca, pca.fuel),
            Reduction::Converged { value, .. } if value == va
        );
        prop_assert!(cancelled);
    }

    /// `S a b c` and `a c (b c)` agree whenever both sides converge.
    #[test]
    fn s_distributes_its_argument(a in arb_term(), b in arb_term(), c in arb_term()) {
        let pca = pca();
        let lhs = reduce(&Term::apps(Term::S, &[a.clone(), b.clone(), c.clone()]), &pca, pca.fuel);
        let rhs = reduce(
            &Term::app(Term::app(a, c.clone()), Term::app(b, c)),
            &pca,
            pca.fuel,
        );
        if let (
            Reduction::Converged { value: l, .. },
            Reduction::Converged { value: r, .. },
        ) = (lhs, rhs)
        {
            prop_assert_eq!(l, r);
        }
    }

    /// Printing then parsing is the identity on terms, including the
    /// numeral and pair sugar.
    #[test]
    fn parse_inverts_print(t in arb_sugared_term()) {
        let printed = print_term(&t);
        let reparsed = parse_term(&printed, &TermEnv::new()).expect("printed terms parse");
        prop_assert_eq!(reparsed, t);
    }

    /// Reduction is a function: same term, same fuel, same outcome.
    #[test]
    fn reduction_is_deterministic(t in arb_term()) {
        let pca = pca();
        let first = reduce(&t, &pca, 2_000);
        let second = reduce(&t, &pca, 2_000);
        let same = match (&first, &second) {
            (
                Reduction::Converged { value: a, steps: m },
                Reduction::Converged { value: b, steps: n },
            ) => a == b && m == n,
            (
                Reduction::Stuck { term: a, steps: m },
                Reduction::Stuck { term: b, steps: n },
            ) => a == b && m == n,
            (
                Reduction::FuelExhausted { partial: a },
                Reduction::FuelExhausted { partial: b },
            ) => a == b,
            _ => false,
        };
        prop_assert!(same);
    }

    /// More fuel never changes a settled outcome: a term that converges (or
    /// gets stuck) at fuel `n` does exactly the same at `n + k`.
    #[test]
    fn settled_outcomes_are_fuel_monotone(t in arb_term(), extra in 1u64..500) {
        let pca = pca();
        let small = reduce(&t, &pca, 400);
        let large = reduce(&t, &pca, 400 + extra);
        match (small, large) {
            (
                Reduction::Converged { value: a, steps: m },
                Reduction::Converged { value: b, steps: n },
            ) => {
                prop_assert_eq!(a, b);
                prop_assert_eq!(m, n);
            }
            (
                Reduction::Stuck { term: a, steps: m },
                Reduction::Stuck { term: b, steps: n },
            ) => {
                prop_assert_eq!(a, b);
                prop_assert_eq!(m, n);
            }
            (Reduction::FuelExhausted { .. }, _) => {}
            (settled, relaxed) => {
                // A settled small-fuel outcome may not flip class.
                prop_assert!(
                    false,
                    "outcome changed with more fuel: {} then {}",
                    reduction_class(&settled),
                    reduction_class(&relaxed),
                );
            }
        }
    }

    /// The algebra's application operator agrees with one-step-at-a-time
    /// reduction of the applied pair.
    #[test]
    fn apply_matches_reduce_on_values(a in arb_term(), b in arb_term()) {
        let pca = pca();
        let (va, vb) = match (reduce(&a, &pca, 300), reduce(&b, &pca, 300)) {
            (
                Reduction::Converged { value: va, .. },
                Reduction::Converged { value: vb, .. },
            ) => (va, vb),
            _ => return Ok(()),
        };
        let direct = apply(&va, &vb, &pca);
        let via_reduce = reduce(&Term::app(va, vb), &pca, pca.fuel);
        let same = match (&direct, &via_reduce) {
            (
                Reduction::Converged { value: x, .. },
                Reduction::Converged { value: y, .. },
            ) => x == y,
            (Reduction::Stuck { .. }, Reduction::Stuck { .. }) => true,
            (Reduction::FuelExhausted { .. }, Reduction::FuelExhausted { .. }) => true,
            _ => false,
        };
        prop_assert!(same);
    }
}

fn reduction_class(r: &Reduction) -> &'static str {
    match r {
        Reduction::Converged { .. } => "converged",
        Reduction::Stuck { .. } => "stuck",
        Reduction::FuelExhausted { .. } => "out of fuel",
    }
}
