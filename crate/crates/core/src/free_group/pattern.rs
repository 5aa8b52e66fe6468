use std::fmt;

use crate::error::{Error, Result};

use super::{Gen, GroupWord};

/// `*` or `*^-1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Pos,
    Neg,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Pos => Sign::Neg,
            Sign::Neg => Sign::Pos,
        }
    }
}

/// A word over `{*, *^-1}` recording only the sign of each group letter.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pattern(pub Vec<Sign>);

impl Pattern {
    pub fn signs(&self) -> &[Sign] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// All `2^len` patterns of a given length.
    pub fn all(len: usize) -> Vec<Pattern> {
        (0..1usize << len)
            .map(|bits| {
                Pattern(
                    (0..len)
                        .map(|k| {
                            if bits >> (len - 1 - k) & 1 == 0 {
                                Sign::Pos
                            } else {
                                Sign::Neg
                            }
                        })
                        .collect(),
                )
            })
            .collect()
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<&str> = self
            .0
            .iter()
            .map(|s| match s {
                Sign::Pos => "*",
                Sign::Neg => "*^-1",
            })
            .collect();
        f.write_str(&parts.join(" "))
    }
}

pub fn pattern_of(xi: &GroupWord) -> Pattern {
    Pattern(
        xi.gens()
            .iter()
            .map(|g| {
                if g.is_positive() {
                    Sign::Pos
                } else {
                    Sign::Neg
                }
            })
            .collect(),
    )
}

/// Shape of a second part: `(* *^-1)^l *^r` when `first` is positive,
/// `(*^-1 *)^l *^-r` when negative.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SecondPart {
    pub first: Sign,
    pub l: usize,
    pub r: usize,
}

impl SecondPart {
    pub fn len(&self) -> usize {
        2 * self.l + self.r
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn pattern(&self) -> Pattern {
        let mut s = self.first;
        Pattern(
            (0..self.len())
                .map(|_| {
                    let here = s;
                    s = s.flip();
                    here
                })
                .collect(),
        )
    }

    /// The two freely irreducible words following this shape:
    /// `(ab^-1)^l a^r` and `(ba^-1)^l b^r`, or `(a^-1b)^l a^-r` and `(b^-1a)^l b^-r`.
    pub fn words(&self) -> [GroupWord; 2] {
        let (x, y) = match self.first {
            Sign::Pos => (Gen::A, Gen::BInv),
            Sign::Neg => (Gen::AInv, Gen::B),
        };
        let first = GroupWord(vec![x, y])
            .repeat(self.l)
            .concat(&GroupWord::power(x, self.r));
        let second = first.tilde();
        [first, second]
    }
}

fn split_index(signs: &[Sign]) -> usize {
    let mut k = signs.len() - 1;
    while k > 0 && signs[k - 1] != signs[k] {
        k -= 1;
    }
    k
}

/// The unique split `V = V_I V_II` where `V_II` is an alternating run and,
/// when `V_I` is nonempty, the last sign of `V_I` equals the first of `V_II`.
pub fn decompose(pattern: &Pattern) -> Result<(Pattern, Pattern, SecondPart)> {
    if pattern.is_empty() {
        return Err(Error::EmptyInput);
    }
    let k = split_index(pattern.signs());
    let (first, second) = pattern.signs().split_at(k);
    let shape = SecondPart {
        first: second[0],
        l: second.len() / 2,
        r: second.len() % 2,
    };
    Ok((Pattern(first.to_vec()), Pattern(second.to_vec()), shape))
}

/// `xi = xi_I xi_II`, split where its pattern splits.
pub fn decompose_word(xi: &GroupWord) -> Result<(GroupWord, GroupWord, SecondPart)> {
    let (first, _, shape) = decompose(&pattern_of(xi))?;
    let (head, tail) = xi.split_at(first.len());
    Ok((head, tail, shape))
}
