//! Automaton semigroups, inverse semigroups and groups generated by finite
//! synchronous transducers.
//!
//! The crate covers the action of transducer states on words, structural
//! checks and constructions ([`mealy`]), rational constraints
//! ([`acceptor`]), a decision procedure for the (constrained) word problem
//! ([`word_problem`]), classical example automata ([`gadgets`]) and
//! compilers from DFA and Turing machine problems to word problem instances
//! ([`reductions`]).

pub mod acceptor;
pub mod error;
pub mod gadgets;
pub mod mealy;
pub mod reductions;
pub mod word_problem;

pub use acceptor::{Acceptor, AcceptorBuilder};
pub use error::{Error, Result};
pub use mealy::{
    ActOutcome, Alphabet, Letter, MealyAutomaton, MealyBuilder, PropertyReport, SignedState,
    StateId, StateSequence,
};
pub use word_problem::{
    config_bound, decide, oracle_decide, oracle_decide_with, PartialValue, Verdict, VerdictKind,
    WordProblemInstance,
};
