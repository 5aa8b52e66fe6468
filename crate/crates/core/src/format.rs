//! JSON automaton definition files.
//!
//! ```json
//! {
//!   "states": ["a", "b"],
//!   "alphabet": {"kind": "affine", "offset": 1, "slope": 1, "floor": 2},
//!   "rule": {"kind": "woryna"}
//! }
//! ```
//!
//! `rule` is `{"kind": "woryna"}`, `{"kind": "woryna-B"}` or
//! `{"kind": "explicit", "levels": [...], "tail": "repeat-last"}` where each
//! level is `{"transition": {state: {letter: state}}, "output": {state: {letter: letter}}}`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::alphabet::{AlphabetRule, ChangingAlphabet};
use crate::automaton::{Automaton, LevelTable, Preset};
use crate::error::{Error, Result};
use crate::free_group;
use crate::word::{Letter, StateId};

/// A letter used as a JSON object key. Keys are strings in JSON, and the
/// tagged rule enum cannot coerce them to integers on its own.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct LetterKey(pub Letter);

impl TryFrom<String> for LetterKey {
    type Error = String;

    fn try_from(s: String) -> std::result::Result<Self, String> {
        s.trim()
            .parse()
            .map(LetterKey)
            .map_err(|_| format!("`{s}` is not a letter"))
    }
}

impl From<LetterKey> for String {
    fn from(k: LetterKey) -> String {
        k.0.to_string()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelDef {
    pub transition: BTreeMap<String, BTreeMap<LetterKey, String>>,
    pub output: BTreeMap<String, BTreeMap<LetterKey, Letter>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum RuleDef {
    #[serde(rename = "woryna")]
    CycleTransposition,
    #[serde(rename = "woryna-B")]
    SignedCycleTransposition,
    #[serde(rename = "explicit")]
    Explicit {
        levels: Vec<LevelDef>,
        #[serde(default = "repeat_last")]
        tail: String,
    },
}

fn repeat_last() -> String {
    "repeat-last".into()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AutomatonDef {
    pub states: Vec<String>,
    pub alphabet: AlphabetRule,
    pub rule: RuleDef,
}

impl AutomatonDef {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("definitions always serialize")
    }

    pub fn build(&self) -> Result<Automaton> {
        match &self.rule {
            RuleDef::CycleTransposition | RuleDef::SignedCycleTransposition => {
                let alphabet = ChangingAlphabet::admissible(self.alphabet.clone())?;
                let automaton = if self.rule == RuleDef::CycleTransposition {
                    free_group::automaton_a(alphabet)?
                } else {
                    free_group::automaton_b(alphabet)?
                };
                if automaton.state_names() != self.states.as_slice() {
                    return Err(Error::MalformedAutomaton(format!(
                        "preset declares states {:?}, file lists {:?}",
                        automaton.state_names(),
                        self.states
                    )));
                }
                Ok(automaton)
            }
            RuleDef::Explicit { levels, tail } => {
                if tail != "repeat-last" {
                    return Err(Error::MalformedAutomaton(format!("unknown tail `{tail}`")));
                }
                let alphabet = ChangingAlphabet::new(self.alphabet.clone())?;
                let tables = levels
                    .iter()
                    .enumerate()
                    .map(|(k, def)| self.level_table(&alphabet, k + 1, def))
                    .collect::<Result<Vec<_>>>()?;
                Automaton::explicit(self.states.clone(), alphabet, tables)
            }
        }
    }

    fn level_table(
        &self,
        alphabet: &ChangingAlphabet,
        level: usize,
        def: &LevelDef,
    ) -> Result<LevelTable> {
        let r = alphabet.size(level);
        let index: BTreeMap<&str, usize> = self
            .states
            .iter()
            .enumerate()
            .map(|(k, s)| (s.as_str(), k))
            .collect();
        for name in def.transition.keys().chain(def.output.keys()) {
            if !index.contains_key(name.as_str()) {
                return Err(Error::UnknownState(name.clone()));
            }
        }
        let missing = |what: &str, q: &str, x: Letter| {
            Error::MalformedAutomaton(format!(
                "level {level}: no {what} entry for state `{q}`, letter {x}"
            ))
        };
        let mut transition = Vec::with_capacity(self.states.len() * r);
        let mut output = Vec::with_capacity(self.states.len() * r);
        for q in &self.states {
            let row_t = def.transition.get(q);
            let row_o = def.output.get(q);
            for row in [row_t.map(|m| m.len()), row_o.map(|m| m.len())]
                .into_iter()
                .flatten()
            {
                if row != r {
                    return Err(Error::TableSizeMismatch {
                        level,
                        table: row,
                        alphabet: r,
                    });
                }
            }
            for x in 1..=r {
                let target = row_t
                    .and_then(|m| m.get(&LetterKey(x)))
                    .ok_or_else(|| missing("transition", q, x))?;
                let target = *index
                    .get(target.as_str())
                    .ok_or_else(|| Error::UnknownState(target.clone()))?;
                transition.push(StateId(target));
                output.push(
                    *row_o
                        .and_then(|m| m.get(&LetterKey(x)))
                        .ok_or_else(|| missing("output", q, x))?,
                );
            }
        }
        Ok(LevelTable::from_fn(
            self.states.len(),
            r,
            |q, x| transition[q.index() * r + x - 1],
            |q, x| output[q.index() * r + x - 1],
        ))
    }

    /// Describes `automaton`. Presets serialize by name; anything else is
    /// materialized as explicit tables for levels `1..=levels`.
    pub fn describe(automaton: &Automaton, levels: usize) -> Result<Self> {
        let rule = match automaton.preset() {
            Some(Preset::CycleTransposition) => RuleDef::CycleTransposition,
            Some(Preset::SignedCycleTransposition) => RuleDef::SignedCycleTransposition,
            None => {
                if levels == 0 {
                    return Err(Error::Precondition(
                        "at least one level must be materialized".into(),
                    ));
                }
                let defs = (1..=levels)
                    .map(|level| {
                        let table = automaton.level(level)?;
                        let mut def = LevelDef {
                            transition: BTreeMap::new(),
                            output: BTreeMap::new(),
                        };
                        for q in automaton.states() {
                            let name = automaton.state_name(q).to_string();
                            let t = (1..=table.size())
                                .map(|x| {
                                    (
                                        LetterKey(x),
                                        automaton.state_name(table.next_state(q, x)).to_string(),
                                    )
                                })
                                .collect();
                            let o = (1..=table.size())
                                .map(|x| (LetterKey(x), table.output(q, x)))
                                .collect();
                            def.transition.insert(name.clone(), t);
                            def.output.insert(name, o);
                        }
                        Ok(def)
                    })
                    .collect::<Result<Vec<_>>>()?;
                RuleDef::Explicit {
                    levels: defs,
                    tail: repeat_last(),
                }
            }
        };
        Ok(Self {
            states: automaton.state_names().to_vec(),
            alphabet: automaton.alphabet().rule().clone(),
            rule,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_round_trip() {
        let text = r#"{"states":["a","b"],"alphabet":{"kind":"affine","offset":1,"slope":1,"floor":2},"rule":{"kind":"woryna"}}"#;
        let def = AutomatonDef::from_json(text).unwrap();
        let a = def.build().unwrap();
        assert_eq!(a.state_names(), &["a", "b"]);
        assert_eq!(AutomatonDef::describe(&a, 3).unwrap(), def);
    }

    #[test]
    fn signed_preset_state_names() {
        let text = r#"{"states":["a","b","a^-1","b^-1"],"alphabet":{"kind":"affine","offset":1,"slope":1,"floor":2},"rule":{"kind":"woryna-B"}}"#;
        let b = AutomatonDef::from_json(text).unwrap().build().unwrap();
        assert_eq!(b.num_states(), 4);
        let wrong = text.replace("\"a^-1\",", "");
        assert!(AutomatonDef::from_json(&wrong).unwrap().build().is_err());
    }

    #[test]
    fn explicit_definition() {
        let text = r#"{
            "states": ["p", "q"],
            "alphabet": {"kind": "explicit_prefix", "sizes": [2], "tail": "repeat-last"},
            "rule": {"kind": "explicit", "tail": "repeat-last", "levels": [
                {"transition": {"p": {"1": "q", "2": "p"}, "q": {"1": "p", "2": "q"}},
                 "output": {"p": {"1": 2, "2": 1}, "q": {"1": 1, "2": 2}}}
            ]}
        }"#;
        let def = AutomatonDef::from_json(text).unwrap();
        let a = def.build().unwrap();
        let t = a.level(5).unwrap();
        assert_eq!(t.next_state(StateId(0), 1), StateId(1));
        assert_eq!(t.output(StateId(0), 1), 2);
        assert_eq!(t.output(StateId(1), 2), 2);
        assert_eq!(AutomatonDef::describe(&a, 1).unwrap(), def);
    }

    #[test]
    fn explicit_definition_errors() {
        let base = r#"{
            "states": ["p"],
            "alphabet": {"kind": "explicit_prefix", "sizes": [2], "tail": "repeat-last"},
            "rule": {"kind": "explicit", "levels": [
                {"transition": {"p": {"1": "p", "2": "TARGET"}},
                 "output": {"p": {"1": 2, "2": OUT}}}
            ]}
        }"#;
        let ok = base.replace("TARGET", "p").replace("OUT", "1");
        assert!(AutomatonDef::from_json(&ok).unwrap().build().is_ok());
        let unknown = base.replace("TARGET", "z").replace("OUT", "1");
        assert!(matches!(
            AutomatonDef::from_json(&unknown).unwrap().build(),
            Err(Error::UnknownState(_))
        ));
        let range = base.replace("TARGET", "p").replace("OUT", "3");
        assert!(matches!(
            AutomatonDef::from_json(&range).unwrap().build(),
            Err(Error::MalformedAutomaton(_))
        ));
        assert!(matches!(AutomatonDef::from_json("{"), Err(Error::Parse(_))));
    }
}
