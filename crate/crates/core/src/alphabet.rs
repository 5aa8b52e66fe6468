//! Changing alphabets.
//!
//! A changing alphabet assigns to every level `i >= 1` a finite letter set
//! `{1, ..., r_i}`. Only the rule is stored; sizes are computed on demand.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Levels past an explicit prefix that are scanned when checking monotonicity
/// of the tail.
const TAIL_CHECK_HORIZON: usize = 64;

/// `r_i = max(floor, offset + slope * i)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AffineRule {
    pub offset: i64,
    pub slope: u64,
    pub floor: i64,
}

impl AffineRule {
    pub fn new(offset: i64, slope: u64, floor: i64) -> Self {
        Self {
            offset,
            slope,
            floor,
        }
    }

    fn size(&self, level: usize) -> usize {
        let linear = (self.slope as i128) * (level as i128) + self.offset as i128;
        linear.max(self.floor as i128).max(1) as usize
    }
}

/// How an explicit prefix continues past its last entry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "TailRepr", try_from = "TailRepr")]
pub enum Tail {
    RepeatLast,
    Affine(AffineRule),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum TailRepr {
    Keyword(String),
    Rule {
        kind: String,
        offset: i64,
        slope: u64,
        floor: i64,
    },
}

impl From<Tail> for TailRepr {
    fn from(tail: Tail) -> Self {
        match tail {
            Tail::RepeatLast => TailRepr::Keyword("repeat-last".into()),
            Tail::Affine(a) => TailRepr::Rule {
                kind: "affine".into(),
                offset: a.offset,
                slope: a.slope,
                floor: a.floor,
            },
        }
    }
}

impl TryFrom<TailRepr> for Tail {
    type Error = Error;

    fn try_from(repr: TailRepr) -> Result<Self> {
        match repr {
            TailRepr::Keyword(k) if k == "repeat-last" => Ok(Tail::RepeatLast),
            TailRepr::Keyword(k) => Err(Error::MalformedRule(format!("unknown tail `{k}`"))),
            TailRepr::Rule {
                kind,
                offset,
                slope,
                floor,
            } if kind == "affine" => Ok(Tail::Affine(AffineRule::new(offset, slope, floor))),
            TailRepr::Rule { kind, .. } => {
                Err(Error::MalformedRule(format!("unknown tail kind `{kind}`")))
            }
        }
    }
}

/// Rule producing the alphabet size at each level.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AlphabetRule {
    Affine { offset: i64, slope: u64, floor: i64 },
    ExplicitPrefix { sizes: Vec<usize>, tail: Tail },
}

impl AlphabetRule {
    pub fn affine(offset: i64, slope: u64, floor: i64) -> Self {
        AlphabetRule::Affine {
            offset,
            slope,
            floor,
        }
    }

    pub fn explicit(sizes: Vec<usize>, tail: Tail) -> Self {
        AlphabetRule::ExplicitPrefix { sizes, tail }
    }

    fn validate(&self) -> Result<()> {
        match self {
            AlphabetRule::Affine { floor, .. } => {
                if *floor < 1 {
                    return Err(Error::MalformedRule(format!("floor {floor} is below 1")));
                }
            }
            AlphabetRule::ExplicitPrefix { sizes, tail } => {
                if sizes.is_empty() {
                    return Err(Error::MalformedRule("explicit prefix is empty".into()));
                }
                if let Some(pos) = sizes.iter().position(|&s| s == 0) {
                    return Err(Error::MalformedRule(format!(
                        "explicit size at level {} is zero",
                        pos + 1
                    )));
                }
                if let Tail::Affine(a) = tail {
                    if a.floor < 1 {
                        return Err(Error::MalformedRule(format!(
                            "tail floor {} is below 1",
                            a.floor
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    fn size(&self, level: usize) -> usize {
        match self {
            AlphabetRule::Affine {
                offset,
                slope,
                floor,
            } => AffineRule::new(*offset, *slope, *floor).size(level),
            AlphabetRule::ExplicitPrefix { sizes, tail } => {
                if level <= sizes.len() {
                    sizes[level - 1]
                } else {
                    match tail {
                        Tail::RepeatLast => *sizes.last().expect("validated nonempty"),
                        Tail::Affine(a) => a.size(level),
                    }
                }
            }
        }
    }
}

impl fmt::Display for AlphabetRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlphabetRule::Affine {
                offset,
                slope,
                floor,
            } => write!(f, "affine {offset} {slope} {floor}"),
            AlphabetRule::ExplicitPrefix { sizes, tail } => {
                let sizes: Vec<String> = sizes.iter().map(ToString::to_string).collect();
                write!(f, "explicit {}", sizes.join(","))?;
                match tail {
                    Tail::RepeatLast => write!(f, " repeat-last"),
                    Tail::Affine(a) => write!(f, " affine {} {} {}", a.offset, a.slope, a.floor),
                }
            }
        }
    }
}

fn parse_affine_args<'a>(mut it: impl Iterator<Item = &'a str>) -> Result<AffineRule> {
    let mut next = |what: &str| {
        it.next()
            .ok_or_else(|| Error::Parse(format!("affine rule is missing `{what}`")))
    };
    let offset = next("offset")?;
    let slope = next("slope")?;
    let floor = next("floor")?;
    let offset = offset
        .parse()
        .map_err(|_| Error::Parse(format!("bad offset `{offset}`")))?;
    let slope = slope
        .parse()
        .map_err(|_| Error::Parse(format!("bad slope `{slope}`")))?;
    let floor = floor
        .parse()
        .map_err(|_| Error::Parse(format!("bad floor `{floor}`")))?;
    Ok(AffineRule::new(offset, slope, floor))
}

/// Accepts `affine OFFSET SLOPE FLOOR`, `explicit 2,2,3 repeat-last` and
/// `explicit 2,3 affine OFFSET SLOPE FLOOR`.
impl FromStr for AlphabetRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut tokens = s.split_whitespace();
        match tokens.next() {
            Some("affine") => {
                let a = parse_affine_args(&mut tokens)?;
                if let Some(extra) = tokens.next() {
                    return Err(Error::Parse(format!("trailing token `{extra}`")));
                }
                Ok(AlphabetRule::affine(a.offset, a.slope, a.floor))
            }
            Some("explicit") | Some("explicit_prefix") => {
                let sizes = tokens
                    .next()
                    .ok_or_else(|| Error::Parse("explicit rule is missing sizes".into()))?;
                let sizes = sizes
                    .split(',')
                    .map(|t| {
                        t.trim()
                            .parse::<usize>()
                            .map_err(|_| Error::Parse(format!("bad size `{t}`")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let tail = match tokens.next() {
                    None | Some("repeat-last") => Tail::RepeatLast,
                    Some("affine") => Tail::Affine(parse_affine_args(&mut tokens)?),
                    Some(other) => return Err(Error::Parse(format!("unknown tail `{other}`"))),
                };
                if let Some(extra) = tokens.next() {
                    return Err(Error::Parse(format!("trailing token `{extra}`")));
                }
                Ok(AlphabetRule::explicit(sizes, tail))
            }
            Some(other) => Err(Error::Parse(format!("unknown alphabet rule `{other}`"))),
            None => Err(Error::Parse("empty alphabet rule".into())),
        }
    }
}

/// A changing alphabet `X = (X_1, X_2, ...)` with `X_i = {1, ..., r_i}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ChangingAlphabet {
    rule: AlphabetRule,
    admissible: bool,
}

impl ChangingAlphabet {
    /// Builds an alphabet from a well-formed rule.
    pub fn new(rule: AlphabetRule) -> Result<Self> {
        rule.validate()?;
        Ok(Self {
            rule,
            admissible: false,
        })
    }

    /// Builds an alphabet that is nondecreasing with every `r_i >= 2`, and
    /// whose rule grows without bound (affine with slope at least 1).
    pub fn admissible(rule: AlphabetRule) -> Result<Self> {
        rule.validate()?;
        let horizon = match &rule {
            AlphabetRule::Affine { slope, .. } => {
                if *slope == 0 {
                    return Err(Error::Inadmissible(
                        "affine rule with slope 0 is bounded".into(),
                    ));
                }
                TAIL_CHECK_HORIZON
            }
            AlphabetRule::ExplicitPrefix { sizes, tail } => {
                match tail {
                    Tail::RepeatLast => {
                        return Err(Error::Inadmissible("repeat-last tail is bounded".into()))
                    }
                    Tail::Affine(a) if a.slope == 0 => {
                        return Err(Error::Inadmissible(
                            "affine tail with slope 0 is bounded".into(),
                        ))
                    }
                    Tail::Affine(_) => {}
                }
                sizes.len() + TAIL_CHECK_HORIZON
            }
        };
        let mut prev = 0;
        for level in 1..=horizon {
            let r = rule.size(level);
            if r < 2 {
                return Err(Error::Inadmissible(format!("r_{level} = {r} is below 2")));
            }
            if r < prev {
                return Err(Error::Inadmissible(format!(
                    "r_{level} = {r} is smaller than r_{} = {prev}",
                    level - 1
                )));
            }
            prev = r;
        }
        Ok(Self {
            rule,
            admissible: true,
        })
    }

    /// The alphabet `r_i = i + 1`.
    pub fn successor() -> Self {
        Self::admissible(AlphabetRule::affine(1, 1, 2)).expect("i + 1 is admissible")
    }

    pub fn rule(&self) -> &AlphabetRule {
        &self.rule
    }

    pub fn is_admissible(&self) -> bool {
        self.admissible
    }

    /// `r_i`, the number of letters at `level` (levels start at 1).
    pub fn size(&self, level: usize) -> usize {
        debug_assert!(level >= 1, "levels start at 1");
        self.rule.size(level.max(1))
    }

    /// Least level `i` with `r_i > threshold`, scanning at most `cap` levels.
    pub fn first_level_above(&self, threshold: usize, cap: usize) -> Option<usize> {
        (1..=cap).find(|&i| self.size(i) > threshold)
    }
}

impl fmt::Display for ChangingAlphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.rule.fmt(f)
    }
}
