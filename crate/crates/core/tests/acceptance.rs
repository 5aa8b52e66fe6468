//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::collections::HashSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use varalpha::alphabet::ChangingAlphabet;
use varalpha::free_group::{
    automaton_a, decompose_word, pattern_of, FreeGroupLab, GroupWord, Pattern, SecondPart, Sign,
};
use varalpha::stabilization::{restrict_dual, stabilization_certificate, DEFAULT_TABLE_BUDGET};
use varalpha::{StateId, StateWord, TreeWord};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn lab() -> FreeGroupLab {
    FreeGroupLab::new(ChangingAlphabet::successor()).expect("successor alphabet is admissible")
}

fn err(e: varalpha::Error) -> String {
    e.to_string()
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    if elapsed < limit {
        Ok(())
    } else {
        Err(format!("took {elapsed:.2?}, limit {limit:?}"))
    }
}

/// Inverse automaton round trip on every depth-5 word.
fn inversion_round_trip() -> Outcome {
    let start = Instant::now();
    let x = ChangingAlphabet::successor();
    let a = automaton_a(x.clone()).map_err(err)?;
    let inv = a.invert();
    let words = TreeWord::enumerate(&x, 1, 5);
    if words.len() != 720 {
        return Err(format!("expected 720 words, got {}", words.len()));
    }
    for q in a.states() {
        for w in &words {
            let there = a.apply_state(1, q, w).map_err(err)?.0;
            let back = inv.apply_state(1, q, &there).map_err(err)?.0;
            let other = inv.apply_state(1, q, w).map_err(err)?.0;
            let forth = a.apply_state(1, q, &other).map_err(err)?.0;
            if back != *w || forth != *w {
                return Err(format!(
                    "state {} word {w}: {back} / {forth}",
                    a.state_name(q)
                ));
            }
        }
    }
    within(start.elapsed(), Duration::from_secs(5))?;
    Ok(format!("1440 round trips in {:.2?}", start.elapsed()))
}

/// Cross identities on randomized tuples plus empty corners.
fn duality_identities() -> Outcome {
    let lab = lab();
    let b = lab.automaton_b();
    let x = lab.alphabet();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let state_word = |rng: &mut ChaCha8Rng, max: usize| -> StateWord {
        let len = rng.gen_range(0..=max);
        (0..len).map(|_| StateId(rng.gen_range(0..4))).collect()
    };
    let tree_word = |rng: &mut ChaCha8Rng, level: usize, max: usize| -> TreeWord {
        let len = rng.gen_range(0..=max);
        let letters = (0..len)
            .map(|j| rng.gen_range(1..=x.size(level + j)))
            .collect();
        TreeWord::new(x, level, letters).expect("letters in range")
    };
    let check = |level: usize,
                 xi: &StateWord,
                 eta: &StateWord,
                 w: &TreeWord,
                 v: &TreeWord|
     -> Result<(), String> {
        let wv = w.concat(v).map_err(err)?;
        let moved = b.dual_apply(level, w, xi).map_err(err)?;
        let lhs = b.apply_state_word(level, xi, &wv).map_err(err)?;
        let rhs = b
            .apply_state_word(level, xi, w)
            .and_then(|h| h.concat(&b.apply_state_word(w.end_level(), &moved, v)?))
            .map_err(err)?;
        if lhs != rhs {
            return Err(format!(
                "tree identity: level {level} xi {xi:?} w {w} v {v}"
            ));
        }
        let lhs = b.dual_apply(level, w, &xi.concat(eta)).map_err(err)?;
        let image = b.apply_state_word(level, xi, w).map_err(err)?;
        let rhs = moved.concat(&b.dual_apply(level, &image, eta).map_err(err)?);
        if lhs != rhs {
            return Err(format!(
                "dual identity: level {level} xi {xi:?} eta {eta:?} w {w}"
            ));
        }
        Ok(())
    };
    let mut cases = 0;
    for _ in 0..1000 {
        let level = rng.gen_range(1..=4);
        let (xi, eta) = (state_word(&mut rng, 4), state_word(&mut rng, 4));
        let w = tree_word(&mut rng, level, 4);
        let v = tree_word(&mut rng, w.end_level(), 3);
        check(level, &xi, &eta, &w, &v)?;
        cases += 1;
    }
    for level in 1..=4 {
        let xi = StateWord::from_indices(&[0, 3, 1]);
        let w = TreeWord::new(x, level, vec![1, 2]).map_err(err)?;
        let v = TreeWord::new(x, level + 2, vec![3]).map_err(err)?;
        let empty_w = TreeWord::empty(level);
        let empty_v = TreeWord::empty(level);
        check(level, &StateWord::empty(), &xi, &w, &v)?;
        check(level, &xi, &StateWord::empty(), &w, &v)?;
        check(level, &xi, &xi, &empty_w, &empty_v)?;
        check(
            level,
            &StateWord::empty(),
            &StateWord::empty(),
            &empty_w,
            &empty_v,
        )?;
        cases += 4;
    }
    Ok(format!("{cases} cases, 0 failures"))
}

/// Pattern preservation and second-part behaviour, exhaustively.
fn lemma_suites() -> Outcome {
    let start = Instant::now();
    let lab = lab();
    let x = lab.alphabet();
    let all_words: Vec<GroupWord> = (0..=4)
        .flat_map(|len| StateWord::enumerate(4, len))
        .map(|s| GroupWord::from_state_word(&s).expect("four states"))
        .collect();
    let mut checks = 0u64;
    for level in 1..=3 {
        let tree_words: Vec<TreeWord> = (0..=3)
            .flat_map(|len| TreeWord::enumerate(x, level, len))
            .collect();
        for xi in &all_words {
            let split = if !xi.is_empty() && xi.is_freely_irreducible() {
                Some(decompose_word(xi).map_err(err)?)
            } else {
                None
            };
            for w in &tree_words {
                let dual =
                    |g: &GroupWord| -> Result<GroupWord, String> { lab.dual(w, g).map_err(err) };
                let image = dual(xi)?;
                if pattern_of(&image) != pattern_of(xi)
                    || image.is_freely_irreducible() != xi.is_freely_irreducible()
                {
                    return Err(format!("pattern: level {level} w {w} xi {xi} -> {image}"));
                }
                if let Some((head, tail, _)) = &split {
                    let first = dual(head)?;
                    if image != first.concat(tail) && image != first.concat(&tail.tilde()) {
                        return Err(format!(
                            "second part: level {level} w {w} xi {xi} -> {image}"
                        ));
                    }
                }
                checks += 1;
            }
        }
    }
    within(start.elapsed(), Duration::from_secs(60))?;
    Ok(format!(
        "{checks} (level, w, xi) triples in {:.2?}",
        start.elapsed()
    ))
}

/// Certificates match the least level with more than 2n letters.
fn stabilization() -> Outcome {
    let lab = lab();
    let b = lab.automaton_b();
    let mut found = Vec::new();
    for (n, expected) in [(1, 2), (2, 4), (3, 6)] {
        let lambda = lab.lambda_index(n).map_err(err)?;
        let cert = stabilization_certificate(b, n, 4, 64, DEFAULT_TABLE_BUDGET).map_err(err)?;
        if lambda != expected || cert != Some(lambda) {
            return Err(format!(
                "n = {n}: lambda {lambda}, certificate {cert:?}, expected {expected}"
            ));
        }
        for level in lambda..=lambda + 4 {
            let r = lab.alphabet().size(level);
            for x in n + 2..=r + 1 - n {
                if !restrict_dual(b, level, x, n, DEFAULT_TABLE_BUDGET)
                    .map_err(err)?
                    .is_identity()
                {
                    return Err(format!("n = {n}: D_({level},{x}) is not the identity"));
                }
            }
        }
        found.push(format!("n={n}: {lambda}"));
    }
    Ok(found.join(", "))
}

/// Every same-pattern pair connects; orbits equal brute-force classes.
fn orbit_transitivity() -> Outcome {
    let lab = lab();
    let mut pairs = 0;
    for n in 1..=3 {
        let words = GroupWord::reduced_words(n);
        let lambda = lab.lambda_index(n).map_err(err)?;
        for xi in &words {
            let class: HashSet<GroupWord> = words
                .iter()
                .filter(|w| pattern_of(w) == pattern_of(xi))
                .cloned()
                .collect();
            if lab.orbit(lambda, xi).map_err(err)? != class {
                return Err(format!("orbit of {xi} differs from its pattern class"));
            }
            for eta in &class {
                let w = lab.connect_irreducible(xi, eta).map_err(err)?;
                if lab.dual(&w, xi).map_err(err)? != *eta || w.base_level() != lambda {
                    return Err(format!("{xi} -> {eta} via {w} does not verify"));
                }
                pairs += 1;
            }
        }
    }
    Ok(format!("{pairs} pairs connected"))
}

/// Second-part flips for every pattern up to length 5.
fn flip_witnesses() -> Outcome {
    let lab = lab();
    let mut count = 0;
    for len in 1..=5 {
        for pattern in Pattern::all(len) {
            let wit = lab.flip_witness(&pattern).map_err(err)?;
            let (head, tail, _) = decompose_word(&wit.word).map_err(err)?;
            let letter = TreeWord::new(lab.alphabet(), wit.level, vec![wit.letter]).map_err(err)?;
            let image = lab.dual(&letter, &wit.word).map_err(err)?;
            if pattern_of(&wit.word) != pattern
                || image != head.concat(&tail.tilde())
                || image != wit.image
            {
                return Err(format!(
                    "pattern {pattern}: {} at ({}, {})",
                    wit.word, wit.level, wit.letter
                ));
            }
            count += 1;
        }
    }
    Ok(format!("{count} patterns"))
}

/// Freeness witnesses for every nonempty reduced word up to length 6.
fn freeness() -> Outcome {
    let start = Instant::now();
    let lab = lab();
    let b = lab.automaton_b();
    let rows = lab.freeness_sweep(6, 12).map_err(err)?;
    let longest = rows.iter().filter(|r| r.word.len() == 6).count();
    if longest != 972 {
        return Err(format!("expected 972 words of length 6, got {longest}"));
    }
    let mut max_depth = 0;
    for row in &rows {
        let wit = row
            .witness
            .as_ref()
            .ok_or_else(|| format!("no witness for {}", row.word))?;
        let image = b
            .apply_state_word(1, &row.word.to_state_word(), &wit.word)
            .map_err(err)?;
        if image == wit.word || image != wit.image {
            return Err(format!(
                "witness {} for {} does not move",
                wit.word, row.word
            ));
        }
        max_depth = max_depth.max(wit.depth());
    }
    within(start.elapsed(), Duration::from_secs(600))?;
    Ok(format!(
        "{} words ({longest} of length 6), max witness depth {max_depth}, {:.2?}",
        rows.len(),
        start.elapsed()
    ))
}

/// pi_1 and pi_2 checks at the least admissible level.
fn proof_arithmetic() -> Outcome {
    let lab = lab();
    let mut count = 0;
    for l in 0..=3 {
        for r in 0..=1 {
            if (l, r) == (0, 0) {
                continue;
            }
            let level = lab
                .alphabet()
                .first_level_above(2 * l + r + 2, 1000)
                .ok_or("no level is large enough")?;
            let p = lab.proof_permutations(level, l, r).map_err(err)?;
            if !p.all_pass() {
                return Err(format!("l = {l}, r = {r} at level {level}: {p:?}"));
            }
            let eta = [&p.eta1, &p.eta2, &p.eta1.inverse(), &p.eta2.inverse()];
            let [second, _] = SecondPart {
                first: Sign::Pos,
                l,
                r,
            }
            .words();
            let product = second.inverse().concat(&second.tilde()).free_reduce();
            if !eta.contains(&&product) {
                return Err(format!(
                    "xi_II^-1 ~xi_II = {product} is none of eta_1^±1, eta_2^±1"
                ));
            }
            count += 1;
        }
    }
    Ok(format!("{count} (l, r) pairs"))
}

/// Equal-length connections for every same-pattern triple up to length 2.
fn equal_length() -> Outcome {
    let lab = lab();
    let mut count = 0;
    for len in 0..=2 {
        let words = GroupWord::reduced_words(len);
        for xi in &words {
            let class: Vec<&GroupWord> = words
                .iter()
                .filter(|w| pattern_of(w) == pattern_of(xi))
                .collect();
            for eta in &class {
                for zeta in &class {
                    for k in 1..=6 {
                        let (w, v) = lab.connect_equal_length(xi, eta, zeta, k).map_err(err)?;
                        let ok = w.len() == v.len()
                            && w.len() >= k
                            && lab.dual(&w, xi).map_err(err)? == **eta
                            && lab.dual(&v, xi).map_err(err)? == **zeta;
                        if !ok {
                            return Err(format!("({xi}; {eta}, {zeta}), k = {k}: {w} / {v}"));
                        }
                        count += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{count} (triple, k) cases"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("inversion round trip", inversion_round_trip),
        ("duality identities", duality_identities),
        ("pattern lemmas", lemma_suites),
        ("stabilization", stabilization),
        ("orbit transitivity", orbit_transitivity),
        ("second-part flip witnesses", flip_witnesses),
        ("freeness up to length 6", freeness),
        ("proof permutations", proof_arithmetic),
        ("equal-length connections", equal_length),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS {} {name}: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {} {name}: {detail}", k + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
