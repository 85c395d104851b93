//! Deterministic candidate pools for bounded witness search.
//!
//! A pool is an ordered, duplicate-free list of closed terms. The standard
//! pool starts with a small curated library of combinators that appear over
//! and over in hand-written reductions, then any terms registered by the
//! caller (typically workspace definitions), then every closed S/K term in
//! size-lexicographic order up to a size bound, where size counts atoms.
//! Searches walk the pool front to back and report the first hit, so results
//! are reproducible across runs and platforms.

use crate::term::{self, Term};

/// Default atom-count bound for the enumerated tail of the standard pool.
pub const DEFAULT_SIZE_BOUND: usize = 7;

/// An ordered, duplicate-free list of closed candidate terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TermPool {
    items: Vec<Term>,
}

impl TermPool {
    /// Pool containing exactly `items`, first occurrence kept on duplicates.
    pub fn from_items<I: IntoIterator<Item = Term>>(items: I) -> Self {
        let mut pool = TermPool { items: Vec::new() };
        pool.extend(items);
        pool
    }

    pub fn empty() -> Self {
        TermPool { items: Vec::new() }
    }

    /// The standard pool: curated library, then `registered` (in the order
    /// given), then all closed S/K terms with at most `size_bound` atoms in
    /// size-lexicographic order. Duplicates keep their first position.
    pub fn standard(size_bound: usize, registered: &[Term]) -> Self {
        let mut items = curated();
        items.extend(registered.iter().cloned());
        items.extend(sk_terms_up_to(size_bound));
        TermPool::from_items(items)
    }

    /// Append new candidates at the back, skipping ones already present.
    /// Existing positions never change, so earlier search results stay valid.
    pub fn extend<I: IntoIterator<Item = Term>>(&mut self, extra: I) {
        for t in extra {
            if !self.items.contains(&t) {
                self.items.push(t);
            }
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &Term> {
        self.items.iter()
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn contains(&self, t: &Term) -> bool {
        self.items.contains(t)
    }

    pub fn position(&self, t: &Term) -> Option<usize> {
        self.items.iter().position(|u| u == t)
    }
}

/// The hand-picked combinators every search should try first.
pub fn curated() -> Vec<Term> {
    vec![
        term::i(),
        Term::K,
        term::false_c(),
        term::pair_c(),
        term::p1_c(),
        term::p2_c(),
        term::case_c(),
    ]
}

/// All closed S/K terms with exactly `size` atoms, sorted by the term order
/// (K before S, applications compared left to right).
fn sk_terms_of_size(size: usize) -> Vec<Term> {
    if size == 0 {
        return Vec::new();
    }
    if size == 1 {
        return vec![Term::K, Term::S];
    }
    let mut out = Vec::new();
    for left in 1..size {
        for f in sk_terms_of_size(left) {
            for a in sk_terms_of_size(size - left) {
                out.push(Term::app(f.clone(), a));
            }
        }
    }
    out.sort();
    out
}

/// All closed S/K terms with at most `size_bound` atoms, smaller sizes first,
/// each size sorted by the term order.
pub fn sk_terms_up_to(size_bound: usize) -> Vec<Term> {
    let mut out = Vec::new();
    for n in 1..=size_bound {
        out.extend(sk_terms_of_size(n));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::Term;

    // Counting: with t(n) terms of n atoms, t(1)=2 and t(n) = sum t(i)t(n-i),
    // so t = 2, 4, 16, 80, ... and the cumulative counts are 2, 6, 22, 102.
    #[test]
    fn enumeration_counts() {
        assert_eq!(sk_terms_up_to(1).len(), 2);
        assert_eq!(sk_terms_up_to(2).len(), 6);
        assert_eq!(sk_terms_up_to(3).len(), 22);
        assert_eq!(sk_terms_up_to(4).len(), 102);
    }

    #[test]
    fn enumeration_starts_small_and_ordered() {
        let ts = sk_terms_up_to(2);
        assert_eq!(
            ts,
            vec![
                Term::K,
                Term::S,
                Term::app(Term::K, Term::K),
                Term::app(Term::K, Term::S),
                Term::app(Term::S, Term::K),
                Term::app(Term::S, Term::S),
            ]
        );
    }

    #[test]
    fn identity_appears_at_size_three() {
        let ts = sk_terms_up_to(3);
        let i = crate::term::i();
        assert!(ts.contains(&i));
        // Everything of size <= 2 comes earlier.
        assert!(ts.iter().position(|t| t == &i).unwrap() >= 6);
    }

    #[test]
    fn standard_pool_puts_curated_first_and_dedups() {
        let pool = TermPool::standard(3, &[]);
        let cur = curated();
        for (k, t) in cur.iter().enumerate() {
            assert_eq!(pool.position(t), Some(k));
        }
        // K is curated (position 1) and must not reappear from the
        // enumerated tail.
        assert_eq!(pool.iter().filter(|t| **t == Term::K).count(), 1);
        // I = S K K is curated at position 0 even though it is also an
        // enumerated size-3 term.
        assert_eq!(pool.iter().filter(|t| **t == crate::term::i()).count(), 1);
    }

    #[test]
    fn registered_terms_sit_between_curated_and_enumerated() {
        let probe = Term::app(Term::app(Term::S, Term::S), Term::S);
        let pool = TermPool::standard(2, std::slice::from_ref(&probe));
        assert_eq!(pool.position(&probe), Some(curated().len()));
    }

    #[test]
    fn extend_is_stable_and_dedups() {
        let mut pool = TermPool::from_items(vec![Term::K]);
        pool.extend(vec![Term::S, Term::K, Term::S]);
        assert_eq!(pool.len(), 2);
        assert_eq!(pool.position(&Term::K), Some(0));
        assert_eq!(pool.position(&Term::S), Some(1));
    }

    #[test]
    fn default_bound_pool_is_finite_and_dedupable() {
        let ts = sk_terms_up_to(DEFAULT_SIZE_BOUND);
        // 2 + 4 + 16 + 80 + 448 + 2688 + 16896
        assert_eq!(ts.len(), 20134);
    }
}
