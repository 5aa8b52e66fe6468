use thiserror::Error;

use crate::Letter;

/// Everything that can go wrong while building or evaluating automata.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("malformed alphabet rule: {0}")]
    MalformedRule(String),

    #[error("alphabet is not admissible: {0}")]
    Inadmissible(String),

    #[error("letter {letter} out of range at level {level} (expected 1..={size})")]
    LetterOutOfRange {
        level: usize,
        letter: Letter,
        size: usize,
    },

    #[error("level must be at least 1")]
    ZeroLevel,

    #[error("unknown state `{0}`")]
    UnknownState(String),

    #[error("state index {0} is not a state of this automaton")]
    StateIndexOutOfRange(usize),

    #[error("state function of `{state}` at level {level} is not invertible: letters {first} and {second} collide")]
    NotInvertible {
        level: usize,
        state: String,
        first: Letter,
        second: Letter,
    },

    #[error("automaton is not state-invertible at level {level}, letter {letter}: states `{first}` and `{second}` collide")]
    NotStateInvertible {
        level: usize,
        letter: Letter,
        first: String,
        second: String,
    },

    #[error("automata are defined over different alphabets")]
    AlphabetMismatch,

    #[error("state name `{0}` occurs in both automata")]
    StateCollision(String),

    #[error("malformed automaton definition: {0}")]
    MalformedAutomaton(String),

    #[error("table for level {level} has {table} letters, but the alphabet has {alphabet}")]
    TableSizeMismatch {
        level: usize,
        table: usize,
        alphabet: usize,
    },

    #[error("restricted tables need {states}^{n} entries, above the budget of {budget}")]
    BudgetExceeded {
        states: usize,
        n: usize,
        budget: usize,
    },

    #[error("restricted maps are incomparable: {0}")]
    Incomparable(String),

    #[error("iteration cap of {0} reached")]
    IterationCap(u64),

    #[error("input must be nonempty")]
    EmptyInput,

    #[error("word `{0}` is not freely irreducible")]
    NotReduced(String),

    #[error("words `{0}` and `{1}` follow different patterns")]
    PatternMismatch(String, String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("search exhausted: {0}")]
    SearchExhausted(String),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
