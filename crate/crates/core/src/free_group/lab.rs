//! Constructive pieces of the freeness argument for the cycle/transposition
//! automaton: stabilizing levels, second-part flips, orbit connections,
//! nontriviality witnesses and the final permutation arithmetic.

use std::collections::{HashMap, HashSet, VecDeque};

use rayon::prelude::*;

use crate::alphabet::ChangingAlphabet;
use crate::automaton::Automaton;
use crate::error::{Error, Result};
use crate::stabilization::{domain_size, level_tables, DEFAULT_TABLE_BUDGET};
use crate::word::{Letter, TreeWord};

use super::pattern::{decompose, decompose_word, pattern_of, Pattern, Sign};
use super::{automaton_a, automaton_b, Gen, GroupWord};

/// Default depth bound for [`FreeGroupLab::freeness_witness`].
pub const DEFAULT_DEPTH_CAP: usize = 12;

/// Levels scanned by [`FreeGroupLab::lambda_index`] before giving up.
const LAMBDA_SCAN_CAP: usize = 1 << 20;

/// A word `xi` with `D_{level,letter}(xi) = xi_I ~xi_II`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlipWitness {
    pub word: GroupWord,
    pub level: usize,
    pub letter: Letter,
    pub image: GroupWord,
}

/// A word `u` moved by `B_{1,xi}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreenessWitness {
    pub word: TreeWord,
    pub image: TreeWord,
}

impl FreenessWitness {
    pub fn depth(&self) -> usize {
        self.word.len()
    }
}

/// One row of a freeness sweep.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepRow {
    pub word: GroupWord,
    pub witness: Option<FreenessWitness>,
}

/// `pi_1` and `pi_2` at one level with the checks made on them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofPermutations {
    pub level: usize,
    pub size: usize,
    /// `pi_1 = tau^r (sigma tau)^{2l} sigma^r`, entry `x - 1` is `pi_1(x)`.
    pub pi1: Vec<Letter>,
    /// `pi_2 = tau^r (sigma^-1 tau)^{2l} sigma^-r`.
    pub pi2: Vec<Letter>,
    pub eta1: GroupWord,
    pub eta2: GroupWord,
    /// `pi_1(3) = sigma^{2l+r}(3) != 3`.
    pub pi1_moves_three: bool,
    /// `pi_2(r_i) = sigma^{-(2l+r)}(r_i) != r_i`.
    pub pi2_moves_last: bool,
    /// `pi_1` agrees with `B_{i,eta_1}` on one-letter words.
    pub pi1_matches_eta1: bool,
    /// `pi_2` agrees with `B_{i,eta_2}` on one-letter words.
    pub pi2_matches_eta2: bool,
}

impl ProofPermutations {
    pub fn all_pass(&self) -> bool {
        self.pi1_moves_three
            && self.pi2_moves_last
            && self.pi1_matches_eta1
            && self.pi2_matches_eta2
    }
}

/// The automata `A` and `B = A ∪ I₋` over one admissible alphabet.
#[derive(Clone, Debug)]
pub struct FreeGroupLab {
    alphabet: ChangingAlphabet,
    a: Automaton,
    b: Automaton,
    budget: usize,
}

impl FreeGroupLab {
    pub fn new(alphabet: ChangingAlphabet) -> Result<Self> {
        Ok(Self {
            a: automaton_a(alphabet.clone())?,
            b: automaton_b(alphabet.clone())?,
            alphabet,
            budget: DEFAULT_TABLE_BUDGET,
        })
    }

    /// Overrides the cap on `4^n` for restricted tables.
    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    pub fn alphabet(&self) -> &ChangingAlphabet {
        &self.alphabet
    }

    pub fn automaton_a(&self) -> &Automaton {
        &self.a
    }

    pub fn automaton_b(&self) -> &Automaton {
        &self.b
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    /// `D_{level,w}(xi)` on group words.
    pub fn dual(&self, w: &TreeWord, xi: &GroupWord) -> Result<GroupWord> {
        let image = self.b.dual_apply(w.base_level(), w, &xi.to_state_word())?;
        GroupWord::from_state_word(&image)
    }

    /// Least level `i` with `r_i > 2n`.
    pub fn lambda_index(&self, n: usize) -> Result<usize> {
        self.alphabet
            .first_level_above(2 * n, LAMBDA_SCAN_CAP)
            .ok_or_else(|| {
                Error::SearchExhausted(format!(
                    "no level below {LAMBDA_SCAN_CAP} has more than {} letters",
                    2 * n
                ))
            })
    }

    /// A freely irreducible word with the given pattern whose second part is
    /// flipped by a single dual mapping at level `lambda_{|V|}`.
    pub fn flip_witness(&self, pattern: &Pattern) -> Result<FlipWitness> {
        let (first, _, shape) = decompose(pattern)?;
        let level = self.lambda_index(pattern.len())?;
        let r = self.alphabet.size(level);
        let second = shape.words()[0].clone();
        let (head, letter) = match first.signs().last() {
            None => (
                GroupWord::empty(),
                if shape.first == Sign::Pos { 1 } else { 2 },
            ),
            Some(Sign::Pos) => {
                // a for *, b^-1 for *^-1; each a shifts the threaded letter up by one
                let head = GroupWord(
                    first
                        .signs()
                        .iter()
                        .map(|s| if *s == Sign::Pos { Gen::A } else { Gen::BInv })
                        .collect(),
                );
                let positives = first.signs().iter().filter(|s| **s == Sign::Pos).count();
                (head, r + 1 - positives)
            }
            Some(Sign::Neg) => {
                // a^-1 for *^-1, b for *; each a^-1 shifts it down by one
                let head = GroupWord(
                    first
                        .signs()
                        .iter()
                        .map(|s| if *s == Sign::Neg { Gen::AInv } else { Gen::B })
                        .collect(),
                );
                let negatives = first.signs().iter().filter(|s| **s == Sign::Neg).count();
                (head, negatives + 2)
            }
        };
        let word = head.concat(&second);
        let expected = head.concat(&second.tilde());
        let image = self.dual(&TreeWord::new(&self.alphabet, level, vec![letter])?, &word)?;
        if image != expected || pattern_of(&word) != *pattern || !word.is_freely_irreducible() {
            return Err(Error::Verification(format!(
                "D_({level},{letter})({word}) = {image}, expected {expected}"
            )));
        }
        Ok(FlipWitness {
            word,
            level,
            letter,
            image,
        })
    }

    fn check_same_pattern(&self, xi: &GroupWord, eta: &GroupWord) -> Result<()> {
        for w in [xi, eta] {
            if !w.is_freely_irreducible() {
                return Err(Error::NotReduced(w.to_string()));
            }
        }
        if pattern_of(xi) != pattern_of(eta) {
            return Err(Error::PatternMismatch(xi.to_string(), eta.to_string()));
        }
        Ok(())
    }

    /// Orbit of `xi` under the dual mappings of one level, breadth first.
    /// Each reached word maps to its parent and the letter used.
    fn orbit_tree(
        &self,
        level: usize,
        xi: &GroupWord,
    ) -> Result<HashMap<GroupWord, Option<(GroupWord, Letter)>>> {
        let r = self.alphabet.size(level);
        let mut parent = HashMap::from([(xi.clone(), None)]);
        let mut queue = VecDeque::from([xi.clone()]);
        while let Some(current) = queue.pop_front() {
            let state_word = current.to_state_word();
            for x in 1..=r {
                let next = GroupWord::from_state_word(&self.b.dual_step(level, x, &state_word)?)?;
                if !parent.contains_key(&next) {
                    parent.insert(next.clone(), Some((current.clone(), x)));
                    queue.push_back(next);
                }
            }
        }
        Ok(parent)
    }

    /// Every word reachable from `xi` by dual mappings at `level`.
    pub fn orbit(&self, level: usize, xi: &GroupWord) -> Result<HashSet<GroupWord>> {
        domain_size(4, xi.len(), self.budget)?;
        Ok(self.orbit_tree(level, xi)?.into_keys().collect())
    }

    /// A word `w` at base `level >= lambda_n` with `D_{level,w}(xi) = eta`.
    ///
    /// Searches the orbit with the one-letter maps of `level`, then rewrites
    /// the `j`-th step as the least letter at `level + j - 1` with the same
    /// restriction to words of length `n`.
    pub fn connect_from(&self, level: usize, xi: &GroupWord, eta: &GroupWord) -> Result<TreeWord> {
        self.check_same_pattern(xi, eta)?;
        let n = xi.len();
        domain_size(4, n, self.budget)?;
        let lambda = self.lambda_index(n)?;
        if level < lambda {
            return Err(Error::Precondition(format!(
                "connections of length-{n} words start at level {lambda} or later, not {level}"
            )));
        }
        if xi == eta {
            return Ok(TreeWord::empty(level));
        }
        let parent = self.orbit_tree(level, xi)?;
        if !parent.contains_key(eta) {
            return Err(Error::SearchExhausted(format!(
                "{eta} is not in the level-{level} orbit of {xi}"
            )));
        }
        let mut steps = Vec::new();
        let mut at = eta.clone();
        while let Some((prev, x)) = parent[&at].clone() {
            steps.push(x);
            at = prev;
        }
        steps.reverse();

        let generators = level_tables(&self.b, level, n, self.budget)?;
        let mut letters = Vec::with_capacity(steps.len());
        for (j, &g) in steps.iter().enumerate() {
            let here = level + j;
            let wanted = &generators[g - 1].table;
            let y = if here == level {
                g
            } else {
                let tables = level_tables(&self.b, here, n, self.budget)?;
                tables
                    .iter()
                    .position(|t| &t.table == wanted)
                    .map(|k| k + 1)
                    .ok_or_else(|| {
                        Error::SearchExhausted(format!(
                            "level {here} has no letter matching D_({level},{g}) on length {n}"
                        ))
                    })?
            };
            letters.push(y);
        }
        let w = TreeWord::new(&self.alphabet, level, letters)?;
        let image = self.dual(&w, xi)?;
        if image != *eta {
            return Err(Error::Verification(format!(
                "D_({level},{w})({xi}) = {image}, expected {eta}"
            )));
        }
        Ok(w)
    }

    /// A word `w` at base `lambda_n` with `D_{lambda_n,w}(xi) = eta`.
    pub fn connect_irreducible(&self, xi: &GroupWord, eta: &GroupWord) -> Result<TreeWord> {
        let lambda = self.lambda_index(xi.len())?;
        self.connect_from(lambda, xi, eta)
    }

    /// Words `w`, `v` at base 1 of equal length at least `min_len` with
    /// `D_{1,w}(xi) = eta` and `D_{1,v}(xi) = zeta`.
    pub fn connect_equal_length(
        &self,
        xi: &GroupWord,
        eta: &GroupWord,
        zeta: &GroupWord,
        min_len: usize,
    ) -> Result<(TreeWord, TreeWord)> {
        self.check_same_pattern(xi, eta)?;
        self.check_same_pattern(xi, zeta)?;
        let n = xi.len();
        domain_size(4, n, self.budget)?;
        let lambda = self.lambda_index(n)?;
        let lead_len = min_len.max(lambda);
        let lead = TreeWord::new(&self.alphabet, 1, vec![1; lead_len])?;
        let moved = self.dual(&lead, xi)?;
        let mut w = lead.concat(&self.connect_from(lead.end_level(), &moved, eta)?)?;
        let mut v = lead.concat(&self.connect_from(lead.end_level(), &moved, zeta)?)?;

        // pad the shorter word with letters whose dual maps fix every word of length n
        let (short, long_len) = if w.len() < v.len() {
            (&mut w, v.len())
        } else {
            (&mut v, w.len())
        };
        let mut letters = short.letters().to_vec();
        for level in short.end_level()..=long_len {
            let r = self.alphabet.size(level);
            if r < 2 * n + 1 {
                return Err(Error::Precondition(format!(
                    "level {level} has no padding letter for words of length {n}"
                )));
            }
            letters.push(n + 2);
        }
        *short = TreeWord::new(&self.alphabet, 1, letters)?;

        for (word, target) in [(&w, eta), (&v, zeta)] {
            let image = self.dual(word, xi)?;
            if image != *target {
                return Err(Error::Verification(format!(
                    "D_(1,{word})({xi}) = {image}, expected {target}"
                )));
            }
        }
        if w.len() != v.len() || w.len() < min_len {
            return Err(Error::Verification(format!(
                "lengths {} and {} do not both equal at least {min_len}",
                w.len(),
                v.len()
            )));
        }
        Ok((w, v))
    }

    /// The length-lexicographically least `u` at base 1, `|u| <= depth_cap`,
    /// with `B_{1,xi}(u) != u`.
    ///
    /// Words fixed so far are tracked through their section: after a fixed
    /// prefix `p` the rest of the word is acted on by `D_{1,p}(xi)` at level
    /// `1 + |p|`, so prefixes with equal sections are interchangeable and only
    /// the least one is kept.
    pub fn freeness_witness(
        &self,
        xi: &GroupWord,
        depth_cap: usize,
    ) -> Result<Option<FreenessWitness>> {
        if xi.is_empty() {
            return Err(Error::EmptyInput);
        }
        if !xi.is_freely_irreducible() {
            return Err(Error::NotReduced(xi.to_string()));
        }
        let mut frontier = vec![(Vec::<Letter>::new(), xi.to_state_word())];
        for depth in 1..=depth_cap {
            let level = depth;
            let r = self.alphabet.size(level);
            let mut seen = HashSet::new();
            let mut next = Vec::new();
            for (prefix, section) in &frontier {
                for x in 1..=r {
                    let (after, image) = self.b.dual_step_traced(level, x, section)?;
                    let mut word = prefix.clone();
                    word.push(x);
                    if image != x {
                        let word = TreeWord::new(&self.alphabet, 1, word)?;
                        let image = self.b.apply_state_word(1, &xi.to_state_word(), &word)?;
                        if image == word {
                            return Err(Error::Verification(format!(
                                "section search claims {xi} moves {word}"
                            )));
                        }
                        return Ok(Some(FreenessWitness { word, image }));
                    }
                    if seen.insert(after.clone()) {
                        next.push((word, after));
                    }
                }
            }
            frontier = next;
        }
        Ok(None)
    }

    /// [`FreeGroupLab::freeness_witness`] for every reduced word of length
    /// `1..=max_len`, in length-lexicographic order.
    pub fn freeness_sweep(&self, max_len: usize, depth_cap: usize) -> Result<Vec<SweepRow>> {
        let words: Vec<GroupWord> = (1..=max_len).flat_map(GroupWord::reduced_words).collect();
        words
            .into_par_iter()
            .map(|word| {
                let witness = self.freeness_witness(&word, depth_cap)?;
                Ok(SweepRow { word, witness })
            })
            .collect()
    }

    /// `pi_1`, `pi_2` at `level` for exponents `l` and `r_flag`, with their checks.
    pub fn proof_permutations(
        &self,
        level: usize,
        l: usize,
        r_flag: usize,
    ) -> Result<ProofPermutations> {
        if r_flag > 1 || (l, r_flag) == (0, 0) {
            return Err(Error::Precondition(format!(
                "need r in {{0, 1}} and (l, r) != (0, 0), got ({l}, {r_flag})"
            )));
        }
        if level == 0 {
            return Err(Error::ZeroLevel);
        }
        let size = self.alphabet.size(level);
        if size <= 2 * l + r_flag + 2 {
            return Err(Error::Precondition(format!(
                "r_{level} = {size} must exceed 2l + r + 2 = {}",
                2 * l + r_flag + 2
            )));
        }
        let sigma = |x: Letter| x % size + 1;
        let sigma_inv = |x: Letter| if x == 1 { size } else { x - 1 };
        let tau = |x: Letter| match x {
            1 => 2,
            2 => 1,
            x => x,
        };
        let pow = |f: &dyn Fn(Letter) -> Letter, k: usize, x: Letter| (0..k).fold(x, |y, _| f(y));
        let pi1 = |x: Letter| {
            let y = pow(&sigma, r_flag, x);
            let y = pow(&|z| sigma(tau(z)), 2 * l, y);
            pow(&tau, r_flag, y)
        };
        let pi2 = |x: Letter| {
            let y = pow(&sigma_inv, r_flag, x);
            let y = pow(&|z| sigma_inv(tau(z)), 2 * l, y);
            pow(&tau, r_flag, y)
        };
        let pi1: Vec<Letter> = (1..=size).map(pi1).collect();
        let pi2: Vec<Letter> = (1..=size).map(pi2).collect();

        // eta_1 = a^r (b^-1 a)^{2l} b^-r, eta_2 = a^-r (b a^-1)^{2l} b^r
        let eta1 = GroupWord::power(Gen::A, r_flag)
            .concat(&GroupWord(vec![Gen::BInv, Gen::A]).repeat(2 * l))
            .concat(&GroupWord::power(Gen::BInv, r_flag));
        let eta2 = GroupWord::power(Gen::AInv, r_flag)
            .concat(&GroupWord(vec![Gen::B, Gen::AInv]).repeat(2 * l))
            .concat(&GroupWord::power(Gen::B, r_flag));
        let one_letter = |eta: &GroupWord| -> Result<Vec<Letter>> {
            let xi = eta.to_state_word();
            (1..=size)
                .map(|x| {
                    let w = TreeWord::new(&self.alphabet, level, vec![x])?;
                    Ok(self.b.apply_state_word(level, &xi, &w)?.letters()[0])
                })
                .collect()
        };
        let shift = 2 * l + r_flag;
        let pi1_moves_three = pi1[2] == pow(&sigma, shift, 3) && pi1[2] != 3;
        let pi2_moves_last = pi2[size - 1] == pow(&sigma_inv, shift, size) && pi2[size - 1] != size;
        let pi1_matches_eta1 = one_letter(&eta1)? == pi1;
        let pi2_matches_eta2 = one_letter(&eta2)? == pi2;
        Ok(ProofPermutations {
            level,
            size,
            pi1,
            pi2,
            eta1,
            eta2,
            pi1_moves_three,
            pi2_moves_last,
            pi1_matches_eta1,
            pi2_matches_eta2,
        })
    }

    /// Splits `xi` and returns `(xi_I, xi_II, ~xi_II)`.
    pub fn second_part_flip(&self, xi: &GroupWord) -> Result<(GroupWord, GroupWord, GroupWord)> {
        let (head, tail, _) = decompose_word(xi)?;
        let flipped = tail.tilde();
        Ok((head, tail, flipped))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lab() -> FreeGroupLab {
        FreeGroupLab::new(ChangingAlphabet::successor()).unwrap()
    }

    fn w(s: &str) -> GroupWord {
        s.parse().unwrap()
    }

    #[test]
    fn lambda_examples() {
        let lab = lab();
        assert_eq!(lab.lambda_index(1).unwrap(), 2);
        assert_eq!(lab.lambda_index(3).unwrap(), 6);
        let doubling =
            ChangingAlphabet::admissible(crate::alphabet::AlphabetRule::affine(0, 2, 2)).unwrap();
        assert_eq!(
            FreeGroupLab::new(doubling)
                .unwrap()
                .lambda_index(1)
                .unwrap(),
            2
        );
    }

    #[test]
    fn flip_examples() {
        let lab = lab();
        let single = lab.flip_witness(&pattern_of(&w("a"))).unwrap();
        assert_eq!(
            (single.word.clone(), single.level, single.letter),
            (w("a"), 2, 1)
        );
        assert_eq!(single.image, w("b"));
        let alt = lab.flip_witness(&pattern_of(&w("a b'"))).unwrap();
        assert_eq!((alt.word.clone(), alt.level, alt.letter), (w("a b'"), 4, 1));
        assert_eq!(alt.image, w("b a'"));
        let pair = lab.flip_witness(&pattern_of(&w("a a"))).unwrap();
        assert_eq!(pair.level, 4);
        assert_eq!((pair.word.clone(), pair.letter), (w("a a"), 5));
        assert_eq!(pair.image, w("a b"));
        assert_eq!(
            lab.flip_witness(&Pattern::default()).unwrap_err(),
            Error::EmptyInput
        );
    }

    #[test]
    fn connect_examples() {
        let lab = lab();
        let one = lab.connect_irreducible(&w("a"), &w("b")).unwrap();
        assert_eq!((one.base_level(), one.letters()), (2, &[1][..]));
        assert!(lab
            .connect_irreducible(&w("a b'"), &w("a b'"))
            .unwrap()
            .is_empty());
        let two = lab.connect_irreducible(&w("a b'"), &w("b a'")).unwrap();
        assert_eq!(lab.dual(&two, &w("a b'")).unwrap(), w("b a'"));
        assert!(matches!(
            lab.connect_irreducible(&w("a"), &w("a'")),
            Err(Error::PatternMismatch(..))
        ));
        assert!(matches!(
            lab.connect_irreducible(&w("a a'"), &w("b b'")),
            Err(Error::NotReduced(_))
        ));
    }

    #[test]
    fn connect_budget_is_reported() {
        let lab = lab().with_budget(16);
        let xi = w("a b a");
        assert_eq!(
            lab.connect_irreducible(&xi, &xi).unwrap_err(),
            Error::BudgetExceeded {
                states: 4,
                n: 3,
                budget: 16
            }
        );
        assert!(matches!(
            lab.connect_equal_length(&xi, &xi, &xi, 1),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn equal_length_examples() {
        let lab = lab();
        let (a, b) = (w("a"), w("b"));
        let (x, y) = lab.connect_equal_length(&a, &a, &a, 3).unwrap();
        assert_eq!(x.len(), y.len());
        assert!(x.len() >= 3);
        assert_eq!(lab.dual(&x, &a).unwrap(), a);
        assert_eq!(lab.dual(&y, &a).unwrap(), a);
        let (x, y) = lab.connect_equal_length(&a, &b, &a, 1).unwrap();
        assert_eq!(x.len(), y.len());
        assert_eq!(lab.dual(&x, &a).unwrap(), b);
        assert_eq!(lab.dual(&y, &a).unwrap(), a);
    }

    #[test]
    fn freeness_examples() {
        let lab = lab();
        let one = lab.freeness_witness(&w("a"), 12).unwrap().unwrap();
        assert_eq!(one.word.letters(), &[1]);
        assert_eq!(one.image.letters(), &[2]);
        let two = lab.freeness_witness(&w("a a"), 12).unwrap().unwrap();
        assert_eq!(two.word.letters(), &[1, 1]);
        assert_eq!(two.image.letters(), &[1, 3]);
        let comm = lab.freeness_witness(&w("a b a' b'"), 12).unwrap().unwrap();
        assert_ne!(comm.word, comm.image);
        assert_eq!(
            lab.freeness_witness(&GroupWord::empty(), 3).unwrap_err(),
            Error::EmptyInput
        );
        assert!(matches!(
            lab.freeness_witness(&w("a a'"), 3),
            Err(Error::NotReduced(_))
        ));
    }

    #[test]
    fn proof_permutation_examples() {
        let lab = lab();
        // r_4 = 5 for l = 1, r = 0
        let p = lab.proof_permutations(4, 1, 0).unwrap();
        assert_eq!(p.pi1[2], 5);
        assert!(p.all_pass());
        // r_3 = 4 for l = 0, r = 1: pi_1 = tau sigma
        let p = lab.proof_permutations(3, 0, 1).unwrap();
        assert_eq!(p.pi1, vec![1, 3, 4, 2]);
        assert_eq!(p.pi1[2], 4);
        assert!(p.all_pass());
        assert!(lab.proof_permutations(3, 1, 0).is_err());
        assert!(lab.proof_permutations(9, 0, 0).is_err());
    }
}
