//! The two-state cycle/transposition automaton, its signed extension over
//! `{a, b, a^-1, b^-1}`, and the combinatorics of group words used to show
//! that the two automaton functions generate a free group.

mod lab;
mod pattern;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

pub use lab::{
    FlipWitness, FreeGroupLab, FreenessWitness, ProofPermutations, SweepRow, DEFAULT_DEPTH_CAP,
};
pub use pattern::{decompose, decompose_word, pattern_of, Pattern, SecondPart, Sign};

use crate::alphabet::ChangingAlphabet;
use crate::automaton::{Automaton, LevelRule, Preset};
use crate::error::{Error, Result};
use crate::word::{StateId, StateWord};

/// Builds the automaton with states `a`, `b` over an admissible alphabet:
/// letter 1 swaps `a` and `b` and every other letter keeps the state; `a`
/// outputs the cycle `x -> x + 1 (mod r_i)` and `b` the transposition `(1 2)`.
pub fn automaton_a(alphabet: ChangingAlphabet) -> Result<Automaton> {
    if !alphabet.is_admissible() {
        return Err(Error::Inadmissible(format!(
            "alphabet `{alphabet}` must be nondecreasing, unbounded and start at 2 or more letters"
        )));
    }
    Automaton::from_rule(
        vec!["a".into(), "b".into()],
        alphabet,
        LevelRule::CycleTransposition,
        Some(Preset::CycleTransposition),
    )
}

/// `A ∪ I₋`: the union of [`automaton_a`] with its inverse automaton, whose
/// states are renamed to `a^-1`, `b^-1`. State order is `a, b, a^-1, b^-1`.
pub fn automaton_b(alphabet: ChangingAlphabet) -> Result<Automaton> {
    let a = automaton_a(alphabet)?;
    let rename = HashMap::from([
        ("a".to_string(), "a^-1".to_string()),
        ("b".to_string(), "b^-1".to_string()),
    ]);
    Ok(a.union(&a.invert(), Some(&rename))?
        .with_preset(Preset::SignedCycleTransposition))
}

/// A letter of a group word over the basis `{a, b}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Gen {
    A,
    B,
    AInv,
    BInv,
}

impl Gen {
    pub const ALL: [Gen; 4] = [Gen::A, Gen::B, Gen::AInv, Gen::BInv];

    /// Position of the matching state in [`automaton_b`].
    pub fn state(self) -> StateId {
        StateId(self as usize)
    }

    pub fn from_state(q: StateId) -> Option<Gen> {
        Gen::ALL.get(q.index()).copied()
    }

    pub fn inverse(self) -> Gen {
        match self {
            Gen::A => Gen::AInv,
            Gen::B => Gen::BInv,
            Gen::AInv => Gen::A,
            Gen::BInv => Gen::B,
        }
    }

    /// Swaps `a` with `b`, keeping the sign.
    pub fn tilde(self) -> Gen {
        match self {
            Gen::A => Gen::B,
            Gen::B => Gen::A,
            Gen::AInv => Gen::BInv,
            Gen::BInv => Gen::AInv,
        }
    }

    pub fn is_positive(self) -> bool {
        matches!(self, Gen::A | Gen::B)
    }

    pub fn name(self) -> &'static str {
        match self {
            Gen::A => "a",
            Gen::B => "b",
            Gen::AInv => "a^-1",
            Gen::BInv => "b^-1",
        }
    }
}

/// A word over `{a, b, a^-1, b^-1}`, read as a state word of [`automaton_b`].
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupWord(pub Vec<Gen>);

impl GroupWord {
    pub fn new(gens: Vec<Gen>) -> Self {
        Self(gens)
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn gens(&self) -> &[Gen] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &GroupWord) -> GroupWord {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        GroupWord(v)
    }

    pub fn split_at(&self, k: usize) -> (GroupWord, GroupWord) {
        let (a, b) = self.0.split_at(k);
        (GroupWord(a.to_vec()), GroupWord(b.to_vec()))
    }

    /// `g^k`.
    pub fn power(g: Gen, k: usize) -> GroupWord {
        GroupWord(vec![g; k])
    }

    pub fn repeat(&self, k: usize) -> GroupWord {
        GroupWord(self.0.repeat(k))
    }

    pub fn to_state_word(&self) -> StateWord {
        self.0.iter().map(|g| g.state()).collect()
    }

    pub fn from_state_word(xi: &StateWord) -> Result<GroupWord> {
        xi.states()
            .iter()
            .map(|&q| Gen::from_state(q).ok_or(Error::StateIndexOutOfRange(q.index())))
            .collect::<Result<Vec<_>>>()
            .map(GroupWord)
    }

    /// The formal inverse: reversed, every letter inverted.
    pub fn inverse(&self) -> GroupWord {
        GroupWord(self.0.iter().rev().map(|g| g.inverse()).collect())
    }

    /// No two adjacent letters cancel.
    pub fn is_freely_irreducible(&self) -> bool {
        self.0.windows(2).all(|p| p[1] != p[0].inverse())
    }

    /// Cancels adjacent inverse pairs until none remain.
    pub fn free_reduce(&self) -> GroupWord {
        let mut out: Vec<Gen> = Vec::with_capacity(self.0.len());
        for &g in &self.0 {
            if out.last() == Some(&g.inverse()) {
                out.pop();
            } else {
                out.push(g);
            }
        }
        GroupWord(out)
    }

    /// Letterwise `a <-> b`, `a^-1 <-> b^-1`.
    pub fn tilde(&self) -> GroupWord {
        GroupWord(self.0.iter().map(|g| g.tilde()).collect())
    }

    /// Every freely irreducible word of length exactly `len`, in
    /// lexicographic order of `a < b < a^-1 < b^-1`.
    pub fn reduced_words(len: usize) -> Vec<GroupWord> {
        let mut words = vec![GroupWord::empty()];
        for _ in 0..len {
            words = words
                .into_iter()
                .flat_map(|w| {
                    Gen::ALL.into_iter().filter_map(move |g| {
                        if w.0.last().map(|l| l.inverse()) == Some(g) {
                            None
                        } else {
                            let mut next = w.0.clone();
                            next.push(g);
                            Some(GroupWord(next))
                        }
                    })
                })
                .collect();
        }
        words
    }
}

impl fmt::Display for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.0.iter().map(|g| g.name()).collect();
        f.write_str(&names.join(" "))
    }
}

/// Reads `a b a^-1 b^-1` or the compact `aba'b'`, or any mix of the two.
impl FromStr for GroupWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut gens = Vec::new();
        for token in s.split_whitespace() {
            let mut chars = token.chars().peekable();
            while let Some(c) = chars.next() {
                let base = match c {
                    'a' => Gen::A,
                    'b' => Gen::B,
                    other => {
                        return Err(Error::Parse(format!(
                            "unexpected `{other}` in group word `{s}`"
                        )))
                    }
                };
                let inverted = match chars.peek() {
                    Some('\'') => {
                        chars.next();
                        true
                    }
                    Some('^') => {
                        chars.next();
                        if chars.next() != Some('-') || chars.next() != Some('1') {
                            return Err(Error::Parse(format!("bad exponent in `{token}`")));
                        }
                        true
                    }
                    _ => false,
                };
                gens.push(if inverted { base.inverse() } else { base });
            }
        }
        Ok(GroupWord(gens))
    }
}
