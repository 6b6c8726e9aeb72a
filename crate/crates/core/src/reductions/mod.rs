//! Compilers from DFA and Turing machine problems to word problem instances.

pub mod dfa;
pub mod tm;
pub mod tm_automaton;
