use thiserror::Error;

/// Errors raised by constructions, actions and deciders.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid token `{0}`")]
    InvalidToken(String),
    #[error("letter `{0}` is declared twice")]
    DuplicateLetter(String),
    #[error("state `{0}` is declared twice")]
    DuplicateState(String),
    #[error("unknown letter `{0}`")]
    UnknownLetter(String),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("state `{state}` has two transitions on input `{letter}`")]
    ConflictingTransition { state: String, letter: String },
    #[error("automaton `{0}` must declare at least one state and one letter")]
    EmptyAutomaton(String),
    #[error("acceptor `{0}` has no initial state")]
    NoInitialState(String),
    #[error("automaton `{0}` is not inverse-deterministic")]
    NotInverseDeterministic(String),
    #[error("automaton `{0}` is not a G-automaton")]
    NotGAutomaton(String),
    #[error("reserved token `{0}` is already in use")]
    ReservedTokenCollision(String),
    #[error("acceptor `{acceptor}` uses letter `{letter}` outside the automaton alphabet")]
    AlphabetMismatch { acceptor: String, letter: String },
    #[error("explored configuration count exceeded the budget of {budget}")]
    ConfigBudgetExceeded { budget: usize },
    #[error("malformed DFA `{name}`: {reason}")]
    MalformedDfa { name: String, reason: String },
    #[error("invalid Turing machine `{name}`: {reason}")]
    InvalidMachine { name: String, reason: String },
    #[error("invalid reduction parameters: {0}")]
    InvalidParams(String),
    #[error("head left the space bound at step {step}")]
    SpaceBoundViolated { step: usize },
    #[error("head moved left of position 0 at step {step}")]
    LeftEdgeViolated { step: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
