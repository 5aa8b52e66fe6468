//! Dual mappings `D_{i,x}` acting on state words.
//!
//! Feeding the letter `x` at level `i` through the states `q_1 ... q_n` one
//! after another threads the output of each state into the next one:
//! `x_1 = x`, `x_{j+1} = psi_i(q_j, x_j)`, and the image is
//! `phi_i(q_1, x_1) ... phi_i(q_n, x_n)`.

use std::collections::BTreeMap;

use crate::automaton::Automaton;
use crate::error::{Error, Result};
use crate::word::{Letter, StateId, StateWord, TreeWord};

impl Automaton {
    fn check_letter(&self, level: usize, x: Letter) -> Result<()> {
        let size = self.alphabet().size(level);
        if x == 0 || x > size {
            return Err(Error::LetterOutOfRange {
                level,
                letter: x,
                size,
            });
        }
        Ok(())
    }

    /// `D_{i,x}(xi)`.
    pub fn dual_step(&self, level: usize, x: Letter, xi: &StateWord) -> Result<StateWord> {
        Ok(self.dual_step_traced(level, x, xi)?.0)
    }

    /// `D_{i,x}(xi)` together with the last threaded letter, which equals
    /// `A_{i,xi}(x)`.
    pub fn dual_step_traced(
        &self,
        level: usize,
        x: Letter,
        xi: &StateWord,
    ) -> Result<(StateWord, Letter)> {
        self.check_letter(level, x)?;
        self.check_state_word(xi)?;
        let table = self.level(level)?;
        let mut letter = x;
        let image = xi
            .states()
            .iter()
            .map(|&q| {
                let out = table.next_state(q, letter);
                letter = table.output(q, letter);
                out
            })
            .collect();
        Ok((image, letter))
    }

    /// `D_{i,w}(xi)`: the first letter of `w` acts first, each at its own level.
    pub fn dual_apply(&self, level: usize, w: &TreeWord, xi: &StateWord) -> Result<StateWord> {
        if w.base_level() != level {
            return Err(Error::Precondition(format!(
                "word is anchored at level {}, not {level}",
                w.base_level()
            )));
        }
        self.check_state_word(xi)?;
        let mut current = xi.clone();
        for (j, &x) in w.letters().iter().enumerate() {
            current = self.dual_step(level + j, x, &current)?;
        }
        Ok(current)
    }

    /// Inverse of `q -> phi_i(q, x)` for every letter of `level`, or the first
    /// collision (letters ascending, states in declaration order).
    fn state_maps_inverse(&self, level: usize) -> Result<Vec<Vec<StateId>>> {
        let table = self.level(level)?;
        let n = self.num_states();
        (1..=table.size())
            .map(|x| {
                let mut inverse: Vec<Option<StateId>> = vec![None; n];
                for q in self.states() {
                    let target = table.next_state(q, x);
                    if let Some(prev) = inverse[target.index()] {
                        return Err(Error::NotStateInvertible {
                            level,
                            letter: x,
                            first: self.state_name(prev).to_string(),
                            second: self.state_name(q).to_string(),
                        });
                    }
                    inverse[target.index()] = Some(q);
                }
                Ok(inverse.into_iter().map(|q| q.expect("bijection")).collect())
            })
            .collect()
    }

    /// Scans levels `1..=max_level` for a letter whose state map is not a
    /// bijection.
    pub fn is_state_invertible_up_to(&self, max_level: usize) -> Result<StateInvertibility> {
        for level in 1..=max_level {
            match self.state_maps_inverse(level) {
                Ok(_) => {}
                Err(Error::NotStateInvertible {
                    level,
                    letter,
                    first,
                    second,
                }) => {
                    return Ok(StateInvertibility::Collision {
                        level,
                        letter,
                        first: self.state_id(&first)?,
                        second: self.state_id(&second)?,
                    })
                }
                Err(e) => return Err(e),
            }
        }
        Ok(StateInvertibility::StateInvertible)
    }

    /// The unique `xi` with `D_{i,x}(xi) = image`, recovered letter by letter.
    pub fn dual_step_inverse(
        &self,
        level: usize,
        x: Letter,
        image: &StateWord,
    ) -> Result<StateWord> {
        self.check_letter(level, x)?;
        self.check_state_word(image)?;
        let inverse = self.state_maps_inverse(level)?;
        let table = self.level(level)?;
        let mut letter = x;
        Ok(image
            .states()
            .iter()
            .map(|&target| {
                let q = inverse[letter - 1][target.index()];
                letter = table.output(q, letter);
                q
            })
            .collect())
    }

    /// `D_{i,w}^{-1}(image)`.
    pub fn dual_apply_inverse(
        &self,
        level: usize,
        w: &TreeWord,
        image: &StateWord,
    ) -> Result<StateWord> {
        if w.base_level() != level {
            return Err(Error::Precondition(format!(
                "word is anchored at level {}, not {level}",
                w.base_level()
            )));
        }
        let mut current = image.clone();
        for (j, &x) in w.letters().iter().enumerate().rev() {
            current = self.dual_step_inverse(level + j, x, &current)?;
        }
        Ok(current)
    }

    /// The component `Gamma_i` of the dual graph.
    pub fn dual_graph_component(&self, level: usize) -> Result<DualGraphComponent> {
        let table = self.level(level)?;
        let mut arrows = Vec::with_capacity(table.size() * self.num_states());
        for from in 1..=table.size() {
            for q in self.states() {
                arrows.push(DualArrow {
                    from,
                    to: table.output(q, from),
                    input: q,
                    output: table.next_state(q, from),
                });
            }
        }
        Ok(DualGraphComponent {
            level,
            size: table.size(),
            num_states: self.num_states(),
            arrows,
        })
    }
}

/// Outcome of a bounded state-invertibility scan.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StateInvertibility {
    StateInvertible,
    /// `phi_level(first, letter) == phi_level(second, letter)`.
    Collision {
        level: usize,
        letter: Letter,
        first: StateId,
        second: StateId,
    },
}

impl StateInvertibility {
    pub fn is_state_invertible(&self) -> bool {
        matches!(self, StateInvertibility::StateInvertible)
    }
}

/// An arrow `from --input|output--> to` of the dual graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DualArrow {
    pub from: Letter,
    pub to: Letter,
    pub input: StateId,
    pub output: StateId,
}

/// One level of the dual graph: vertices are the letters of `X_i`, and every
/// vertex has exactly one outgoing arrow per state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualGraphComponent {
    pub level: usize,
    pub size: usize,
    pub num_states: usize,
    /// Sorted by `from`, then by input state.
    pub arrows: Vec<DualArrow>,
}

impl DualGraphComponent {
    pub fn vertex_count(&self) -> usize {
        self.size
    }

    pub fn arrow(&self, from: Letter, input: StateId) -> Option<&DualArrow> {
        if from == 0 || from > self.size || input.index() >= self.num_states {
            return None;
        }
        self.arrows
            .get((from - 1) * self.num_states + input.index())
    }

    /// Follows the path from vertex `start` whose input entries spell `xi`
    /// and returns the output entries.
    pub fn follow(&self, start: Letter, xi: &StateWord) -> Option<StateWord> {
        let mut at = start;
        xi.states()
            .iter()
            .map(|&q| {
                let arrow = self.arrow(at, q)?;
                at = arrow.to;
                Some(arrow.output)
            })
            .collect()
    }

    /// Arrows grouped by `(from, input)`; each group must hold one arrow.
    pub fn out_degrees(&self) -> BTreeMap<(Letter, StateId), usize> {
        let mut counts = BTreeMap::new();
        for a in &self.arrows {
            *counts.entry((a.from, a.input)).or_insert(0) += 1;
        }
        counts
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::{AlphabetRule, ChangingAlphabet, Tail};
    use crate::automaton::LevelTable;

    fn constant_transition_at_level_two() -> Automaton {
        let x = ChangingAlphabet::new(AlphabetRule::explicit(vec![2], Tail::RepeatLast)).unwrap();
        let names = vec!["p".to_string(), "q".to_string()];
        let swap = LevelTable::from_fn(2, 2, |q, _| StateId(1 - q.index()), |_, x| x);
        let collapse =
            LevelTable::from_fn(2, 2, |q, x| if x == 1 { StateId(0) } else { q }, |_, x| x);
        Automaton::explicit(names, x, vec![swap, collapse]).unwrap()
    }

    #[test]
    fn constant_transition_breaks_state_invertibility() {
        let a = constant_transition_at_level_two();
        assert!(a
            .is_state_invertible_up_to(1)
            .unwrap()
            .is_state_invertible());
        assert_eq!(
            a.is_state_invertible_up_to(4).unwrap(),
            StateInvertibility::Collision {
                level: 2,
                letter: 1,
                first: StateId(0),
                second: StateId(1)
            }
        );
        assert!(matches!(
            a.dual_step_inverse(2, 1, &StateWord::from_indices(&[0])),
            Err(Error::NotStateInvertible { level: 2, .. })
        ));
    }

    #[test]
    fn empty_words() {
        let a = constant_transition_at_level_two();
        assert!(a.dual_step(1, 2, &StateWord::empty()).unwrap().is_empty());
        assert!(a
            .dual_step_inverse(1, 2, &StateWord::empty())
            .unwrap()
            .is_empty());
        let xi = StateWord::from_indices(&[0, 1, 1]);
        assert_eq!(a.dual_apply(3, &TreeWord::empty(3), &xi).unwrap(), xi);
    }

    #[test]
    fn letter_and_state_errors() {
        let a = constant_transition_at_level_two();
        assert!(matches!(
            a.dual_step(1, 3, &StateWord::empty()),
            Err(Error::LetterOutOfRange {
                level: 1,
                letter: 3,
                size: 2
            })
        ));
        assert!(matches!(
            a.dual_step(1, 1, &StateWord::from_indices(&[5])),
            Err(Error::StateIndexOutOfRange(5))
        ));
    }

    #[test]
    fn component_shape() {
        let a = constant_transition_at_level_two();
        let g = a.dual_graph_component(1).unwrap();
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.arrows.len(), 4);
        assert!(g.out_degrees().values().all(|&c| c == 1));
        let xi = StateWord::from_indices(&[0, 0, 1]);
        assert_eq!(g.follow(1, &xi).unwrap(), a.dual_step(1, 1, &xi).unwrap());
    }
}
