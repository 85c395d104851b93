//! A symbolic workbench for instance reducibility and extended Weihrauch
//! degrees over a combinatory partial algebra.
//!
//! The layers build on each other:
//!
//! * [`term`] — S/K/oracle terms, leftmost-outermost reduction, bracket
//!   abstraction, derived combinators, numerals and tagged set operations;
//! * [`syntax`] — a parser and printer for the term surface syntax;
//! * [`pool`] — deterministic search pools of candidate realizers;
//! * [`asm`] — partitioned assemblies, realized morphisms, finite limits,
//!   and the predicate-partitioning construction;
//! * [`eir`] — elementary instance predicates (one solution set per point)
//!   with their reduction order;
//! * [`ir`] — displayed instance predicates, the full Heyting fibre
//!   structure, quantifiers and the classifying construction;
//! * [`ew`] — extended Weihrauch predicates, the two translations between
//!   the displayed and the Weihrauch presentation, and the standalone
//!   degree checker;
//! * [`topos`] — objects and arrows of the realizability category built
//!   from extended Weihrauch predicates, validation, composition and the
//!   weak-subobject adjunction;
//! * [`laws`] — seeded regression suites exercising the algebraic laws of
//!   every layer, shared by the test harness and the CLI.

pub mod asm;
pub mod eir;
pub mod ew;
pub mod ir;
pub mod laws;
pub mod pool;
pub mod syntax;
pub mod term;
pub mod topos;

mod verdict;

pub use verdict::Verdict;
