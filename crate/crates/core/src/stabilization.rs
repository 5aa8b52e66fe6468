//! n-equivalence of dual mappings and stabilization certificates.
//!
//! Two dual mappings are n-equivalent when they agree on every state word of
//! length `n`. Everything here works on exhaustively materialized
//! restrictions to `Q^n`, so `|Q|^n` is bounded by a budget.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::automaton::Automaton;
use crate::error::{Error, Result};
use crate::word::{Letter, StateWord, TreeWord};

/// Default cap on `|Q|^n`.
pub const DEFAULT_TABLE_BUDGET: usize = 4096;

/// Cap on the order computed by [`dual_inverse_mod_n`].
pub const ORDER_CAP: u64 = 1 << 48;

/// What a restricted table was computed from.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum MapSource {
    Letter { level: usize, letter: Letter },
    Word { level: usize, letters: Vec<Letter> },
    Derived(String),
}

/// A dual mapping restricted to `Q^n`. `table[k]` is the rank of the image
/// of the word of rank `k` (see [`StateWord::rank`]).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RestrictedDualMap {
    pub source: MapSource,
    pub n: usize,
    pub num_states: usize,
    pub table: Vec<usize>,
}

pub(crate) fn domain_size(num_states: usize, n: usize, budget: usize) -> Result<usize> {
    num_states
        .checked_pow(n as u32)
        .filter(|&size| size <= budget)
        .ok_or(Error::BudgetExceeded {
            states: num_states,
            n,
            budget,
        })
}

impl RestrictedDualMap {
    pub fn identity(num_states: usize, n: usize) -> Self {
        let size = num_states.pow(n as u32);
        Self {
            source: MapSource::Derived("id".into()),
            n,
            num_states,
            table: (0..size).collect(),
        }
    }

    pub fn apply(&self, xi: &StateWord) -> Option<StateWord> {
        if xi.len() != self.n {
            return None;
        }
        let image = *self.table.get(xi.rank(self.num_states))?;
        Some(StateWord::unrank(image, self.n, self.num_states))
    }

    pub fn is_identity(&self) -> bool {
        self.table.iter().enumerate().all(|(k, &v)| k == v)
    }

    pub fn is_bijection(&self) -> bool {
        let mut hit = vec![false; self.table.len()];
        self.table
            .iter()
            .all(|&v| !std::mem::replace(&mut hit[v], true))
    }

    fn compatible(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::Incomparable(format!(
                "restriction lengths {} and {} differ",
                self.n, other.n
            )));
        }
        if self.num_states != other.num_states {
            return Err(Error::Incomparable(format!(
                "state counts {} and {} differ",
                self.num_states, other.num_states
            )));
        }
        Ok(())
    }

    /// `other ∘ self`: apply `self` first.
    pub fn then(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        Ok(Self {
            source: MapSource::Derived("composite".into()),
            n: self.n,
            num_states: self.num_states,
            table: self.table.iter().map(|&k| other.table[k]).collect(),
        })
    }

    pub fn inverse(&self) -> Option<Self> {
        if !self.is_bijection() {
            return None;
        }
        let mut table = vec![0; self.table.len()];
        for (k, &v) in self.table.iter().enumerate() {
            table[v] = k;
        }
        Some(Self {
            source: MapSource::Derived("inverse".into()),
            n: self.n,
            num_states: self.num_states,
            table,
        })
    }

    /// Order of the permutation, as the lcm of its cycle lengths.
    pub fn order(&self) -> Option<u64> {
        if !self.is_bijection() {
            return None;
        }
        let mut seen = vec![false; self.table.len()];
        let mut order: u64 = 1;
        for start in 0..self.table.len() {
            if seen[start] {
                continue;
            }
            let mut len: u64 = 0;
            let mut k = start;
            while !seen[k] {
                seen[k] = true;
                k = self.table[k];
                len += 1;
            }
            order = lcm(order, len)?;
        }
        Some(order)
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn lcm(a: u64, b: u64) -> Option<u64> {
    (a / gcd(a, b)).checked_mul(b)
}

/// `D_{i,x}` restricted to `Q^n`.
pub fn restrict_dual(
    automaton: &Automaton,
    level: usize,
    x: Letter,
    n: usize,
    budget: usize,
) -> Result<RestrictedDualMap> {
    let q = automaton.num_states();
    domain_size(q, n, budget)?;
    let table = StateWord::enumerate(q, n)
        .map(|xi| Ok(automaton.dual_step(level, x, &xi)?.rank(q)))
        .collect::<Result<Vec<_>>>()?;
    Ok(RestrictedDualMap {
        source: MapSource::Letter { level, letter: x },
        n,
        num_states: q,
        table,
    })
}

/// `D_{i,w}` restricted to `Q^n`.
pub fn restrict_dual_word(
    automaton: &Automaton,
    w: &TreeWord,
    n: usize,
    budget: usize,
) -> Result<RestrictedDualMap> {
    let q = automaton.num_states();
    domain_size(q, n, budget)?;
    let level = w.base_level();
    let table = StateWord::enumerate(q, n)
        .map(|xi| Ok(automaton.dual_apply(level, w, &xi)?.rank(q)))
        .collect::<Result<Vec<_>>>()?;
    Ok(RestrictedDualMap {
        source: MapSource::Word {
            level,
            letters: w.letters().to_vec(),
        },
        n,
        num_states: q,
        table,
    })
}

/// Whether two restricted maps agree on all of `Q^n`.
pub fn maps_n_equivalent(t1: &RestrictedDualMap, t2: &RestrictedDualMap) -> Result<bool> {
    t1.compatible(t2)?;
    Ok(t1.table == t2.table)
}

/// Restricted tables of every letter at one level, in letter order.
pub fn level_tables(
    automaton: &Automaton,
    level: usize,
    n: usize,
    budget: usize,
) -> Result<Vec<RestrictedDualMap>> {
    let r = automaton.alphabet().size(level);
    (1..=r)
        .map(|x| restrict_dual(automaton, level, x, n, budget))
        .collect()
}

/// Result of comparing the dual-map sets of two levels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelEquivalence {
    pub equivalent: bool,
    /// For each letter of the first level, the least equivalent letter of the
    /// second level.
    pub forward: Vec<(Letter, Option<Letter>)>,
    /// For each letter of the second level, the least equivalent letter of the
    /// first level.
    pub backward: Vec<(Letter, Option<Letter>)>,
    /// First letter without a partner, as `(level, letter)`.
    pub unmatched: Option<(usize, Letter)>,
}

fn match_letters(
    from: &[RestrictedDualMap],
    to: &[RestrictedDualMap],
) -> Vec<(Letter, Option<Letter>)> {
    let mut first_of: HashMap<&[usize], Letter> = HashMap::new();
    for (k, t) in to.iter().enumerate() {
        first_of.entry(t.table.as_slice()).or_insert(k + 1);
    }
    from.iter()
        .enumerate()
        .map(|(k, t)| (k + 1, first_of.get(t.table.as_slice()).copied()))
        .collect()
}

/// Set-wise n-equivalence of `{D_{i,x}}` and `{D_{i',x}}`.
pub fn levels_n_equivalent(
    automaton: &Automaton,
    level: usize,
    other_level: usize,
    n: usize,
    budget: usize,
) -> Result<LevelEquivalence> {
    let first = level_tables(automaton, level, n, budget)?;
    let second = level_tables(automaton, other_level, n, budget)?;
    let forward = match_letters(&first, &second);
    let backward = match_letters(&second, &first);
    let unmatched = forward
        .iter()
        .find(|(_, m)| m.is_none())
        .map(|&(x, _)| (level, x))
        .or_else(|| {
            backward
                .iter()
                .find(|(_, m)| m.is_none())
                .map(|&(x, _)| (other_level, x))
        });
    Ok(LevelEquivalence {
        equivalent: unmatched.is_none(),
        forward,
        backward,
        unmatched,
    })
}

fn class_set(
    automaton: &Automaton,
    level: usize,
    n: usize,
    budget: usize,
) -> Result<BTreeSet<Vec<usize>>> {
    Ok(level_tables(automaton, level, n, budget)?
        .into_iter()
        .map(|t| t.table)
        .collect())
}

/// Smallest `λ <= search_bound` such that level `λ` is n-equivalent to every
/// level in `λ..=λ + window`. This is a finite-window certificate, not a
/// proof of stabilization.
pub fn stabilization_certificate(
    automaton: &Automaton,
    n: usize,
    window: usize,
    search_bound: usize,
    budget: usize,
) -> Result<Option<usize>> {
    if window == 0 {
        return Err(Error::Precondition("window must be at least 1".into()));
    }
    let mut sets: HashMap<usize, BTreeSet<Vec<usize>>> = HashMap::new();
    let mut set_at = |level: usize| -> Result<BTreeSet<Vec<usize>>> {
        if let Some(s) = sets.get(&level) {
            return Ok(s.clone());
        }
        let s = class_set(automaton, level, n, budget)?;
        sets.insert(level, s.clone());
        Ok(s)
    };
    'candidates: for lambda in 1..=search_bound {
        let base = set_at(lambda)?;
        for j in lambda + 1..=lambda + window {
            if set_at(j)? != base {
                continue 'candidates;
            }
        }
        return Ok(Some(lambda));
    }
    Ok(None)
}

/// Smallest `p >= 1` with `D_{i,x}^p` n-equivalent to the identity, so that
/// `D_{i,x}^{-1}` is n-equivalent to `D_{i,x}^{p-1}`.
pub fn dual_inverse_mod_n(
    automaton: &Automaton,
    level: usize,
    x: Letter,
    n: usize,
    budget: usize,
) -> Result<u64> {
    let t = restrict_dual(automaton, level, x, n, budget)?;
    if !t.is_bijection() {
        // report the offending state pair when there is one
        if let crate::duality::StateInvertibility::Collision {
            level,
            letter,
            first,
            second,
        } = automaton.is_state_invertible_up_to(level)?
        {
            return Err(Error::NotStateInvertible {
                level,
                letter,
                first: automaton.state_name(first).to_string(),
                second: automaton.state_name(second).to_string(),
            });
        }
        return Err(Error::Precondition(format!(
            "restriction of D_({level},{x}) to length {n} is not a bijection"
        )));
    }
    match t.order() {
        Some(p) if p <= ORDER_CAP => Ok(p),
        _ => Err(Error::IterationCap(ORDER_CAP)),
    }
}

/// Equivalence-class labels of every letter over a range of levels. Classes
/// are numbered in order of first appearance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassTable {
    pub n: usize,
    pub rows: Vec<(usize, Vec<usize>)>,
    pub class_count: usize,
    /// Class of the identity restriction, if it occurs.
    pub identity_class: Option<usize>,
}

pub fn class_table(
    automaton: &Automaton,
    levels: std::ops::RangeInclusive<usize>,
    n: usize,
    budget: usize,
) -> Result<ClassTable> {
    let mut ids: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut rows = Vec::new();
    for level in levels {
        let labels = level_tables(automaton, level, n, budget)?
            .into_iter()
            .map(|t| {
                let next = ids.len();
                *ids.entry(t.table).or_insert(next)
            })
            .collect();
        rows.push((level, labels));
    }
    let identity = RestrictedDualMap::identity(automaton.num_states(), n).table;
    Ok(ClassTable {
        n,
        rows,
        class_count: ids.len(),
        identity_class: ids.get(&identity).copied(),
    })
}

impl fmt::Display for ClassTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let label = |c: usize| -> String {
            if Some(c) == self.identity_class {
                "id".to_string()
            } else {
                format!("c{c}")
            }
        };
        for (level, labels) in &self.rows {
            let cells: Vec<String> = labels
                .iter()
                .enumerate()
                .map(|(k, &c)| format!("{}:{}", k + 1, label(c)))
                .collect();
            writeln!(f, "level {level:>3} | {}", cells.join(" "))?;
        }
        Ok(())
    }
}
