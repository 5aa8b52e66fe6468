//! Automata over a changing alphabet and the tree actions they induce.
//!
//! An automaton is a finite state set together with, for every level `i`, a
//! transition table `Q x X_i -> Q` and an output table `Q x X_i -> X_i`.
//! Level tables are produced lazily from a [`LevelRule`] and memoized, so an
//! automaton over an infinite alphabet never materializes more than the
//! levels actually queried.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::{Arc, RwLock};

use crate::alphabet::ChangingAlphabet;
use crate::error::{Error, Result};
use crate::word::{Letter, StateId, StateWord, TreeWord};

/// Transition and output tables of one level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelTable {
    size: usize,
    num_states: usize,
    transition: Vec<StateId>,
    output: Vec<Letter>,
}

impl LevelTable {
    /// Builds a table from row-major closures over states and letters `1..=size`.
    pub fn from_fn(
        num_states: usize,
        size: usize,
        mut transition: impl FnMut(StateId, Letter) -> StateId,
        mut output: impl FnMut(StateId, Letter) -> Letter,
    ) -> Self {
        let mut t = Vec::with_capacity(num_states * size);
        let mut o = Vec::with_capacity(num_states * size);
        for q in 0..num_states {
            for x in 1..=size {
                t.push(transition(StateId(q), x));
                o.push(output(StateId(q), x));
            }
        }
        Self {
            size,
            num_states,
            transition: t,
            output: o,
        }
    }

    /// Number of letters at this level.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    #[inline]
    fn slot(&self, q: StateId, x: Letter) -> usize {
        debug_assert!(q.0 < self.num_states && (1..=self.size).contains(&x));
        q.0 * self.size + (x - 1)
    }

    /// `phi_i(q, x)`.
    #[inline]
    pub fn next_state(&self, q: StateId, x: Letter) -> StateId {
        self.transition[self.slot(q, x)]
    }

    /// `psi_i(q, x)`.
    #[inline]
    pub fn output(&self, q: StateId, x: Letter) -> Letter {
        self.output[self.slot(q, x)]
    }

    /// The state function `x -> psi_i(q, x)`; entry `x - 1` holds the image of `x`.
    pub fn state_function(&self, q: StateId) -> &[Letter] {
        &self.output[q.0 * self.size..(q.0 + 1) * self.size]
    }

    fn check(&self, level: usize) -> Result<()> {
        if let Some(&x) = self.output.iter().find(|&&x| x == 0 || x > self.size) {
            return Err(Error::MalformedAutomaton(format!(
                "output letter {x} at level {level} is outside 1..={}",
                self.size
            )));
        }
        if let Some(q) = self.transition.iter().find(|q| q.0 >= self.num_states) {
            return Err(Error::MalformedAutomaton(format!(
                "transition at level {level} targets unknown state index {}",
                q.0
            )));
        }
        Ok(())
    }
}

/// Where level tables come from.
#[derive(Clone, Debug)]
pub(crate) enum LevelRule {
    /// Two states `a`, `b`; `a` outputs the full cycle, `b` the transposition
    /// `(1 2)`; letter 1 swaps the states, every other letter keeps them.
    CycleTransposition,
    /// Materialized tables; the last one repeats forever.
    Explicit(Vec<Arc<LevelTable>>),
    Inverse(Automaton),
    Union(Automaton, Automaton),
}

/// Named closed-form families, remembered so they serialize compactly.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Preset {
    /// The two-state cycle/transposition automaton.
    CycleTransposition,
    /// Its union with the renamed inverse, over `{a, b, a^-1, b^-1}`.
    SignedCycleTransposition,
}

struct Inner {
    names: Vec<String>,
    index: HashMap<String, StateId>,
    alphabet: ChangingAlphabet,
    rule: LevelRule,
    preset: Option<Preset>,
    cache: RwLock<HashMap<usize, Arc<LevelTable>>>,
}

/// A finite automaton over a changing alphabet.
///
/// Cloning is cheap; clones share the level cache.
#[derive(Clone)]
pub struct Automaton(Arc<Inner>);

impl fmt::Debug for Automaton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Automaton")
            .field("states", &self.0.names)
            .field("alphabet", &self.0.alphabet.to_string())
            .field("preset", &self.0.preset)
            .finish()
    }
}

/// Outcome of a bounded bijectivity scan.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Invertibility {
    Invertible,
    /// First collision `sigma_{level,state}(first) == sigma_{level,state}(second)`.
    Collision {
        level: usize,
        state: StateId,
        first: Letter,
        second: Letter,
    },
}

impl Invertibility {
    pub fn is_invertible(&self) -> bool {
        matches!(self, Invertibility::Invertible)
    }
}

/// First pair `x1 < x2` with `f(x1) == f(x2)`, scanning `x2` ascending.
pub(crate) fn first_collision(images: &[Letter]) -> Option<(Letter, Letter)> {
    let mut seen: HashMap<Letter, Letter> = HashMap::new();
    for (k, &y) in images.iter().enumerate() {
        let x = k + 1;
        if let Some(&prev) = seen.get(&y) {
            return Some((prev, x));
        }
        seen.insert(y, x);
    }
    None
}

impl Automaton {
    pub(crate) fn from_rule(
        names: Vec<String>,
        alphabet: ChangingAlphabet,
        rule: LevelRule,
        preset: Option<Preset>,
    ) -> Result<Self> {
        if names.is_empty() {
            return Err(Error::MalformedAutomaton("state set is empty".into()));
        }
        let mut index = HashMap::new();
        for (k, name) in names.iter().enumerate() {
            if name.trim().is_empty() || name.chars().any(char::is_whitespace) {
                return Err(Error::MalformedAutomaton(format!(
                    "state name `{name}` is empty or contains whitespace"
                )));
            }
            if index.insert(name.clone(), StateId(k)).is_some() {
                return Err(Error::MalformedAutomaton(format!(
                    "state `{name}` is declared twice"
                )));
            }
        }
        Ok(Automaton(Arc::new(Inner {
            names,
            index,
            alphabet,
            rule,
            preset,
            cache: RwLock::new(HashMap::new()),
        })))
    }

    /// An automaton given by explicit per-level tables. Level `i` uses
    /// `levels[i - 1]`; past the end the last table repeats.
    pub fn explicit(
        names: Vec<String>,
        alphabet: ChangingAlphabet,
        levels: Vec<LevelTable>,
    ) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::MalformedAutomaton("no level tables given".into()));
        }
        for (k, table) in levels.iter().enumerate() {
            let level = k + 1;
            if table.num_states != names.len() {
                return Err(Error::MalformedAutomaton(format!(
                    "level {level} table covers {} states, expected {}",
                    table.num_states,
                    names.len()
                )));
            }
            let r = alphabet.size(level);
            if table.size != r {
                return Err(Error::TableSizeMismatch {
                    level,
                    table: table.size,
                    alphabet: r,
                });
            }
            table.check(level)?;
        }
        let levels = levels.into_iter().map(Arc::new).collect();
        Self::from_rule(names, alphabet, LevelRule::Explicit(levels), None)
    }

    pub fn alphabet(&self) -> &ChangingAlphabet {
        &self.0.alphabet
    }

    pub fn preset(&self) -> Option<Preset> {
        self.0.preset
    }

    pub fn num_states(&self) -> usize {
        self.0.names.len()
    }

    pub fn state_names(&self) -> &[String] {
        &self.0.names
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> {
        (0..self.num_states()).map(StateId)
    }

    pub fn state_name(&self, q: StateId) -> &str {
        &self.0.names[q.0]
    }

    pub fn state_id(&self, name: &str) -> Result<StateId> {
        self.0
            .index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownState(name.to_string()))
    }

    fn check_state(&self, q: StateId) -> Result<()> {
        if q.0 < self.num_states() {
            Ok(())
        } else {
            Err(Error::StateIndexOutOfRange(q.0))
        }
    }

    pub(crate) fn check_state_word(&self, xi: &StateWord) -> Result<()> {
        xi.states().iter().try_for_each(|&q| self.check_state(q))
    }

    /// Parses whitespace-separated state names. A token that is not a state
    /// name is read in compact form, one character per state with `'` marking
    /// an inverse (`ab'` is `a b^-1`).
    pub fn parse_state_word(&self, text: &str) -> Result<StateWord> {
        let mut out = Vec::new();
        for token in text.split_whitespace() {
            if let Ok(q) = self.state_id(token) {
                out.push(q);
                continue;
            }
            let chars: Vec<char> = token.chars().collect();
            let mut k = 0;
            while k < chars.len() {
                let mut name = chars[k].to_string();
                k += 1;
                if k < chars.len() && chars[k] == '\'' {
                    name.push_str("^-1");
                    k += 1;
                }
                out.push(self.state_id(&name).map_err(|_| {
                    Error::UnknownState(if token.len() > 1 {
                        format!("{name}` in `{token}")
                    } else {
                        name
                    })
                })?);
            }
        }
        Ok(StateWord(out))
    }

    /// Space-separated state names.
    pub fn format_state_word(&self, xi: &StateWord) -> String {
        xi.states()
            .iter()
            .map(|&q| self.state_name(q))
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// The tables at `level`, computed on first use.
    pub fn level(&self, level: usize) -> Result<Arc<LevelTable>> {
        if level == 0 {
            return Err(Error::ZeroLevel);
        }
        if let Some(t) = self
            .0
            .cache
            .read()
            .expect("level cache poisoned")
            .get(&level)
        {
            return Ok(Arc::clone(t));
        }
        let table = Arc::new(self.compute_level(level)?);
        let mut cache = self.0.cache.write().expect("level cache poisoned");
        Ok(Arc::clone(cache.entry(level).or_insert(table)))
    }

    fn compute_level(&self, level: usize) -> Result<LevelTable> {
        let r = self.0.alphabet.size(level);
        match &self.0.rule {
            LevelRule::CycleTransposition => {
                const A: StateId = StateId(0);
                const B: StateId = StateId(1);
                Ok(LevelTable::from_fn(
                    2,
                    r,
                    |q, x| match (q, x) {
                        (A, 1) => B,
                        (_, 1) => A,
                        (q, _) => q,
                    },
                    |q, x| {
                        if q == A {
                            x % r + 1
                        } else {
                            match x {
                                1 => 2,
                                2 => 1,
                                x => x,
                            }
                        }
                    },
                ))
            }
            LevelRule::Explicit(levels) => {
                let table = &levels[level.min(levels.len()) - 1];
                if table.size != r {
                    return Err(Error::TableSizeMismatch {
                        level,
                        table: table.size,
                        alphabet: r,
                    });
                }
                Ok(LevelTable::clone(table))
            }
            LevelRule::Inverse(source) => {
                let src = source.level(level)?;
                let n = src.num_states;
                // inverse state functions, row-major like the tables
                let mut inv = vec![0; n * r];
                for q in source.states() {
                    let sigma = src.state_function(q);
                    if let Some((first, second)) = first_collision(sigma) {
                        return Err(Error::NotInvertible {
                            level,
                            state: source.state_name(q).to_string(),
                            first,
                            second,
                        });
                    }
                    for (k, &y) in sigma.iter().enumerate() {
                        inv[q.0 * r + (y - 1)] = k + 1;
                    }
                }
                Ok(LevelTable::from_fn(
                    n,
                    r,
                    |q, x| src.next_state(q, inv[q.0 * r + (x - 1)]),
                    |q, x| inv[q.0 * r + (x - 1)],
                ))
            }
            LevelRule::Union(left, right) => {
                let lt = left.level(level)?;
                let rt = right.level(level)?;
                let shift = lt.num_states;
                Ok(LevelTable::from_fn(
                    lt.num_states + rt.num_states,
                    r,
                    |q, x| {
                        if q.0 < shift {
                            lt.next_state(q, x)
                        } else {
                            StateId(rt.next_state(StateId(q.0 - shift), x).0 + shift)
                        }
                    },
                    |q, x| {
                        if q.0 < shift {
                            lt.output(q, x)
                        } else {
                            rt.output(StateId(q.0 - shift), x)
                        }
                    },
                ))
            }
        }
    }

    /// The state function `sigma_{i,q}` as a table: entry `x - 1` is `psi_i(q, x)`.
    pub fn state_function(&self, level: usize, q: StateId) -> Result<Vec<Letter>> {
        self.check_state(q)?;
        Ok(self.level(level)?.state_function(q).to_vec())
    }

    fn check_word(&self, level: usize, w: &TreeWord) -> Result<()> {
        if w.base_level() != level {
            return Err(Error::Precondition(format!(
                "word is anchored at level {}, not {level}",
                w.base_level()
            )));
        }
        for (j, &x) in w.letters().iter().enumerate() {
            let at = level + j;
            let size = self.0.alphabet.size(at);
            if x == 0 || x > size {
                return Err(Error::LetterOutOfRange {
                    level: at,
                    letter: x,
                    size,
                });
            }
        }
        Ok(())
    }

    /// `A_{i,q}(w)` together with the state reached after reading all of `w`.
    pub fn apply_state(
        &self,
        level: usize,
        q: StateId,
        w: &TreeWord,
    ) -> Result<(TreeWord, StateId)> {
        self.check_state(q)?;
        self.check_word(level, w)?;
        let mut state = q;
        let mut out = Vec::with_capacity(w.len());
        for (j, &x) in w.letters().iter().enumerate() {
            let table = self.level(level + j)?;
            out.push(table.output(state, x));
            state = table.next_state(state, x);
        }
        Ok((TreeWord::from_parts(level, out), state))
    }

    /// `A_{i,xi}(w)`: the leftmost state of `xi` acts first.
    pub fn apply_state_word(&self, level: usize, xi: &StateWord, w: &TreeWord) -> Result<TreeWord> {
        Ok(self.apply_state_word_traced(level, xi, w)?.0)
    }

    /// Like [`Automaton::apply_state_word`], also returning the final state of
    /// every pass.
    pub fn apply_state_word_traced(
        &self,
        level: usize,
        xi: &StateWord,
        w: &TreeWord,
    ) -> Result<(TreeWord, Vec<StateId>)> {
        self.check_state_word(xi)?;
        self.check_word(level, w)?;
        let mut current = w.clone();
        let mut finals = Vec::with_capacity(xi.len());
        for &q in xi.states() {
            let (next, last) = self.apply_state(level, q, &current)?;
            current = next;
            finals.push(last);
        }
        Ok((current, finals))
    }

    /// The inverse automaton: `phi'_i(q, x) = phi_i(q, s^-1(x))` and
    /// `psi'_i(q, x) = s^-1(x)` where `s = sigma_{i,q}`.
    ///
    /// Invertibility is checked per level when a level is first queried.
    pub fn invert(&self) -> Automaton {
        Automaton::from_rule(
            self.0.names.clone(),
            self.0.alphabet.clone(),
            LevelRule::Inverse(self.clone()),
            None,
        )
        .expect("state names were already validated")
    }

    /// Same automaton with some states renamed; unmapped names are kept.
    pub fn renamed(&self, rename: &HashMap<String, String>) -> Result<Automaton> {
        let names = self
            .0
            .names
            .iter()
            .map(|n| rename.get(n).cloned().unwrap_or_else(|| n.clone()))
            .collect();
        Automaton::from_rule(names, self.0.alphabet.clone(), self.0.rule.clone(), None)
    }

    /// Disjoint union `self ∪ other`, after renaming the states of `other`.
    /// States of `self` keep their indices; those of `other` follow.
    pub fn union(
        &self,
        other: &Automaton,
        rename: Option<&HashMap<String, String>>,
    ) -> Result<Automaton> {
        if self.0.alphabet.rule() != other.0.alphabet.rule() {
            return Err(Error::AlphabetMismatch);
        }
        let other = match rename {
            Some(map) => other.renamed(map)?,
            None => other.clone(),
        };
        let mine: HashSet<&String> = self.0.names.iter().collect();
        if let Some(clash) = other.0.names.iter().find(|n| mine.contains(n)) {
            return Err(Error::StateCollision(clash.clone()));
        }
        let names = self
            .0
            .names
            .iter()
            .chain(other.0.names.iter())
            .cloned()
            .collect();
        Automaton::from_rule(
            names,
            self.0.alphabet.clone(),
            LevelRule::Union(self.clone(), other),
            None,
        )
    }

    pub(crate) fn with_preset(self, preset: Preset) -> Automaton {
        let inner = Arc::try_unwrap(self.0).unwrap_or_else(|shared| Inner {
            names: shared.names.clone(),
            index: shared.index.clone(),
            alphabet: shared.alphabet.clone(),
            rule: shared.rule.clone(),
            preset: None,
            cache: RwLock::new(HashMap::new()),
        });
        Automaton(Arc::new(Inner {
            preset: Some(preset),
            ..inner
        }))
    }

    /// Scans levels `1..=max_level`, states in declaration order, letters
    /// ascending, and reports the first non-injective state function.
    pub fn is_invertible_up_to(&self, max_level: usize) -> Result<Invertibility> {
        for level in 1..=max_level {
            let table = self.level(level)?;
            for q in self.states() {
                if let Some((first, second)) = first_collision(table.state_function(q)) {
                    return Ok(Invertibility::Collision {
                        level,
                        state: q,
                        first,
                        second,
                    });
                }
            }
        }
        Ok(Invertibility::Invertible)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::{AlphabetRule, Tail};

    fn two_letters() -> ChangingAlphabet {
        ChangingAlphabet::new(AlphabetRule::explicit(vec![2], Tail::RepeatLast)).unwrap()
    }

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn flip() -> Automaton {
        // one state that swaps 1 and 2 at every level
        let t = LevelTable::from_fn(1, 2, |q, _| q, |_, x| 3 - x);
        Automaton::explicit(names(&["f"]), two_letters(), vec![t]).unwrap()
    }

    #[test]
    fn identity_outputs_give_identity_state_function() {
        let t = LevelTable::from_fn(2, 2, |q, _| q, |_, x| x);
        let a = Automaton::explicit(names(&["p", "q"]), two_letters(), vec![t]).unwrap();
        for q in a.states() {
            assert_eq!(a.state_function(4, q).unwrap(), vec![1, 2]);
        }
    }

    #[test]
    fn empty_word_is_fixed() {
        let a = flip();
        let q = StateId(0);
        let (w, last) = a.apply_state(3, q, &TreeWord::empty(3)).unwrap();
        assert!(w.is_empty());
        assert_eq!(last, q);
        let w = TreeWord::new(a.alphabet(), 1, vec![1, 2]).unwrap();
        assert_eq!(a.apply_state_word(1, &StateWord::empty(), &w).unwrap(), w);
    }

    #[test]
    fn unknown_state_is_rejected() {
        let a = flip();
        assert_eq!(
            a.state_id("zz").unwrap_err(),
            Error::UnknownState("zz".into())
        );
        assert!(matches!(
            a.state_function(1, StateId(7)),
            Err(Error::StateIndexOutOfRange(7))
        ));
    }

    #[test]
    fn constant_output_is_not_invertible() {
        let x =
            ChangingAlphabet::new(AlphabetRule::explicit(vec![2, 2, 3], Tail::RepeatLast)).unwrap();
        let good = |r| LevelTable::from_fn(1, r, |q, _| q, |_, x| x);
        let bad = LevelTable::from_fn(1, 3, |q, _| q, |_, _| 1);
        let a = Automaton::explicit(names(&["c"]), x, vec![good(2), good(2), bad]).unwrap();
        assert_eq!(a.is_invertible_up_to(2).unwrap(), Invertibility::Invertible);
        assert_eq!(
            a.is_invertible_up_to(5).unwrap(),
            Invertibility::Collision {
                level: 3,
                state: StateId(0),
                first: 1,
                second: 2
            }
        );
        let inv = a.invert();
        assert!(inv.level(2).is_ok());
        assert_eq!(
            inv.level(3).unwrap_err(),
            Error::NotInvertible {
                level: 3,
                state: "c".into(),
                first: 1,
                second: 2
            }
        );
    }

    #[test]
    fn union_collisions_and_mismatch() {
        let a = flip();
        assert_eq!(
            a.union(&a, None).unwrap_err(),
            Error::StateCollision("f".into())
        );
        let rename = HashMap::from([("f".to_string(), "g".to_string())]);
        let u = a.union(&a, Some(&rename)).unwrap();
        assert_eq!(u.state_names(), &["f", "g"]);
        let other = Automaton::explicit(
            names(&["h"]),
            ChangingAlphabet::successor(),
            vec![LevelTable::from_fn(1, 2, |q, _| q, |_, x| x)],
        );
        // the explicit table only fits level 1 of r_i = i + 1
        assert!(other.is_ok());
        assert_eq!(
            a.union(&other.unwrap(), None).unwrap_err(),
            Error::AlphabetMismatch
        );
    }

    #[test]
    fn explicit_tail_must_fit_alphabet() {
        let a = Automaton::explicit(
            names(&["h"]),
            ChangingAlphabet::successor(),
            vec![LevelTable::from_fn(1, 2, |q, _| q, |_, x| x)],
        )
        .unwrap();
        assert_eq!(
            a.level(2).unwrap_err(),
            Error::TableSizeMismatch {
                level: 2,
                table: 2,
                alphabet: 3
            }
        );
    }

    #[test]
    fn explicit_rejects_bad_tables() {
        let bad_out = LevelTable::from_fn(1, 2, |q, _| q, |_, _| 5);
        assert!(Automaton::explicit(names(&["h"]), two_letters(), vec![bad_out]).is_err());
        let bad_next = LevelTable::from_fn(1, 2, |_, _| StateId(3), |_, x| x);
        assert!(Automaton::explicit(names(&["h"]), two_letters(), vec![bad_next]).is_err());
        let t = LevelTable::from_fn(2, 2, |q, _| q, |_, x| x);
        assert!(Automaton::explicit(names(&["h", "h"]), two_letters(), vec![t]).is_err());
    }

    #[test]
    fn compact_state_words() {
        let t = LevelTable::from_fn(4, 2, |q, _| q, |_, x| x);
        let a = Automaton::explicit(names(&["a", "b", "a^-1", "b^-1"]), two_letters(), vec![t])
            .unwrap();
        let spaced = a.parse_state_word("a b a^-1 b^-1").unwrap();
        let compact = a.parse_state_word("aba'b'").unwrap();
        assert_eq!(spaced, compact);
        assert_eq!(a.format_state_word(&compact), "a b a^-1 b^-1");
        assert!(a.parse_state_word("").unwrap().is_empty());
        assert!(matches!(
            a.parse_state_word("ac"),
            Err(Error::UnknownState(_))
        ));
    }

    #[test]
    fn first_collision_scan_order() {
        assert_eq!(first_collision(&[2, 3, 1]), None);
        assert_eq!(first_collision(&[1, 3, 3, 1]), Some((2, 3)));
    }
}
