//! Words over a changing alphabet and words over a state set.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::alphabet::ChangingAlphabet;
use crate::error::{Error, Result};

/// Letters at level `i` are the integers `1..=r_i`.
pub type Letter = usize;

/// Index of a state inside the automaton it belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct StateId(pub usize);

impl StateId {
    pub fn index(self) -> usize {
        self.0
    }
}

/// A word `x_1 ... x_m` anchored at `base_level`: letter `x_j` lives at level
/// `base_level + j - 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TreeWord {
    base_level: usize,
    letters: Vec<Letter>,
}

impl TreeWord {
    /// Checks every letter against the alphabet.
    pub fn new(
        alphabet: &ChangingAlphabet,
        base_level: usize,
        letters: Vec<Letter>,
    ) -> Result<Self> {
        if base_level == 0 {
            return Err(Error::ZeroLevel);
        }
        for (j, &letter) in letters.iter().enumerate() {
            let level = base_level + j;
            let size = alphabet.size(level);
            if letter == 0 || letter > size {
                return Err(Error::LetterOutOfRange {
                    level,
                    letter,
                    size,
                });
            }
        }
        Ok(Self {
            base_level,
            letters,
        })
    }

    /// Builds a word whose letters are already known to be in range.
    pub(crate) fn from_parts(base_level: usize, letters: Vec<Letter>) -> Self {
        Self {
            base_level,
            letters,
        }
    }

    pub fn empty(base_level: usize) -> Self {
        Self {
            base_level,
            letters: Vec::new(),
        }
    }

    pub fn base_level(&self) -> usize {
        self.base_level
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Level just past the last letter, where a continuation would start.
    pub fn end_level(&self) -> usize {
        self.base_level + self.letters.len()
    }

    /// Concatenation `wv`; `v` must start where `self` ends.
    pub fn concat(&self, v: &TreeWord) -> Result<TreeWord> {
        if v.base_level != self.end_level() {
            return Err(Error::Precondition(format!(
                "cannot append a word at level {} to a word ending before level {}",
                v.base_level,
                self.end_level()
            )));
        }
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&v.letters);
        Ok(TreeWord::from_parts(self.base_level, letters))
    }

    /// Splits into the first `k` letters and the rest.
    pub fn split_at(&self, k: usize) -> (TreeWord, TreeWord) {
        let (head, tail) = self.letters.split_at(k);
        (
            TreeWord::from_parts(self.base_level, head.to_vec()),
            TreeWord::from_parts(self.base_level + k, tail.to_vec()),
        )
    }

    /// Parses comma-separated letters such as `1,2,3`; the empty string is
    /// the empty word.
    pub fn parse(alphabet: &ChangingAlphabet, base_level: usize, text: &str) -> Result<Self> {
        let text = text.trim();
        let letters = if text.is_empty() {
            Vec::new()
        } else {
            text.split(',')
                .map(|t| {
                    t.trim()
                        .parse::<Letter>()
                        .map_err(|_| Error::Parse(format!("bad letter `{}`", t.trim())))
                })
                .collect::<Result<Vec<_>>>()?
        };
        TreeWord::new(alphabet, base_level, letters)
    }

    /// Every word of length `len` at `base_level`, in lexicographic order.
    pub fn enumerate(alphabet: &ChangingAlphabet, base_level: usize, len: usize) -> Vec<TreeWord> {
        let mut words = vec![Vec::new()];
        for j in 0..len {
            let r = alphabet.size(base_level + j);
            words = words
                .into_iter()
                .flat_map(|w: Vec<Letter>| {
                    (1..=r).map(move |x| {
                        let mut next = w.clone();
                        next.push(x);
                        next
                    })
                })
                .collect();
        }
        words
            .into_iter()
            .map(|letters| TreeWord::from_parts(base_level, letters))
            .collect()
    }
}

impl fmt::Display for TreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let letters: Vec<String> = self.letters.iter().map(ToString::to_string).collect();
        f.write_str(&letters.join(","))
    }
}

/// A word over the states of an automaton, an element of the free monoid `Q*`.
///
/// Concatenation is plain sequence concatenation; nothing is ever cancelled.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct StateWord(pub Vec<StateId>);

impl StateWord {
    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn single(q: StateId) -> Self {
        Self(vec![q])
    }

    pub fn from_indices(indices: &[usize]) -> Self {
        Self(indices.iter().map(|&i| StateId(i)).collect())
    }

    pub fn states(&self) -> &[StateId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &StateWord) -> StateWord {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        StateWord(v)
    }

    pub fn split_at(&self, k: usize) -> (StateWord, StateWord) {
        let (a, b) = self.0.split_at(k);
        (StateWord(a.to_vec()), StateWord(b.to_vec()))
    }

    /// Index of this word among all words of its length over `num_states`
    /// states, with the first entry most significant.
    pub fn rank(&self, num_states: usize) -> usize {
        self.0.iter().fold(0, |acc, q| acc * num_states + q.index())
    }

    /// Inverse of [`StateWord::rank`].
    pub fn unrank(mut rank: usize, len: usize, num_states: usize) -> StateWord {
        let mut v = vec![StateId(0); len];
        for slot in v.iter_mut().rev() {
            *slot = StateId(rank % num_states);
            rank /= num_states;
        }
        StateWord(v)
    }

    /// Every word of length `len` in lexicographic order.
    pub fn enumerate(num_states: usize, len: usize) -> impl Iterator<Item = StateWord> {
        let total = num_states.pow(len as u32);
        (0..total).map(move |k| StateWord::unrank(k, len, num_states))
    }
}

impl FromIterator<StateId> for StateWord {
    fn from_iter<I: IntoIterator<Item = StateId>>(iter: I) -> Self {
        StateWord(iter.into_iter().collect())
    }
}
