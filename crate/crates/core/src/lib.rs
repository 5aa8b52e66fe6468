//! Automata over changing alphabets.
//!
//! A [`ChangingAlphabet`] fixes the number of letters `r_i` at every level of
//! a spherically homogeneous rooted tree. An [`Automaton`] has one transition
//! and output table per level and acts on words of that tree. Reading the
//! same tables the other way round gives the dual mappings of state words,
//! which [`stabilization`] compares across levels and [`free_group`] uses to
//! build explicit witnesses for the cycle/transposition example.

pub mod alphabet;
pub mod automaton;
pub mod dot;
pub mod duality;
pub mod error;
pub mod format;
pub mod free_group;
pub mod stabilization;
pub mod word;

pub use alphabet::{AffineRule, AlphabetRule, ChangingAlphabet, Tail};
pub use automaton::{Automaton, Invertibility, LevelTable, Preset};
pub use duality::{DualArrow, DualGraphComponent, StateInvertibility};
pub use error::{Error, Result};
pub use format::AutomatonDef;
pub use free_group::{FreeGroupLab, Gen, GroupWord};
pub use stabilization::{ClassTable, LevelEquivalence, RestrictedDualMap, DEFAULT_TABLE_BUDGET};
pub use word::{Letter, StateId, StateWord, TreeWord};
