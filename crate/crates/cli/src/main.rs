use std::collections::HashMap;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use varalpha::alphabet::AlphabetRule;
use varalpha::dot;
use varalpha::format::{AutomatonDef, RuleDef};
use varalpha::free_group::{FreeGroupLab, GroupWord, DEFAULT_DEPTH_CAP};
use varalpha::stabilization::{class_table, stabilization_certificate, DEFAULT_TABLE_BUDGET};
use varalpha::{Automaton, Error, TreeWord};

#[derive(Parser)]
#[command(name = "varalpha", version, about = "Automata over changing alphabets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    /// States a, b: letter 1 swaps them, a cycles and b transposes 1 and 2.
    #[value(name = "woryna")]
    CycleTransposition,
    /// The same automaton joined with its inverse, states a, b, a^-1, b^-1.
    #[value(name = "woryna-B")]
    Signed,
}

#[derive(Args)]
struct Source {
    /// Built-in automaton family.
    #[arg(long, conflicts_with = "automaton")]
    family: Option<Family>,
    /// Alphabet rule for --family, e.g. "affine 1 1 2" or "explicit 2,3 repeat-last".
    #[arg(long = "r", default_value = "affine 1 1 2")]
    rule: String,
    /// Automaton definition file (JSON).
    #[arg(long)]
    automaton: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DotKind {
    Automaton,
    Dual,
}

#[derive(Subcommand)]
enum Command {
    /// Apply a state word to a tree word.
    Eval {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 1)]
        level: usize,
        /// State word, e.g. "a b^-1" or "ab'".
        #[arg(long, allow_hyphen_values = true)]
        xi: String,
        /// Tree word as comma-separated letters, e.g. "1,2".
        #[arg(long)]
        word: String,
    },
    /// Apply the dual mapping of a tree word to a state word.
    Dual {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 1)]
        level: usize,
        #[arg(long)]
        word: String,
        #[arg(long, allow_hyphen_values = true)]
        xi: String,
    },
    /// Find a tree word whose dual mapping sends one group word to another.
    Connect {
        #[arg(long = "r", default_value = "affine 1 1 2")]
        rule: String,
        #[arg(long, allow_hyphen_values = true)]
        xi: String,
        #[arg(long, allow_hyphen_values = true)]
        eta: String,
        /// With --zeta, find equal-length words at level 1 reaching eta and zeta.
        #[arg(long, allow_hyphen_values = true)]
        zeta: Option<String>,
        #[arg(long, default_value_t = 1)]
        min_len: usize,
        #[arg(long, default_value_t = DEFAULT_TABLE_BUDGET)]
        budget: usize,
    },
    /// Search for a level from which the dual maps agree on state words of length n.
    Stabilize {
        #[command(flatten)]
        source: Source,
        #[arg(short = 'n')]
        n: usize,
        #[arg(long, default_value_t = 4)]
        window: usize,
        #[arg(long, default_value_t = 64)]
        search_bound: usize,
        #[arg(long, default_value_t = DEFAULT_TABLE_BUDGET)]
        budget: usize,
    },
    /// For each reduced group word up to a length, find a tree word it moves.
    Freeness {
        #[arg(long, value_enum, default_value = "woryna-B")]
        family: Family,
        #[arg(long = "r", default_value = "affine 1 1 2")]
        rule: String,
        #[arg(long)]
        max_len: usize,
        #[arg(long, default_value_t = DEFAULT_DEPTH_CAP)]
        depth_cap: usize,
    },
    /// Write Graphviz DOT for automaton levels or dual graph components.
    ExportDot {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_enum, default_value = "automaton")]
        kind: DotKind,
        #[arg(long = "level", required = true)]
        levels: Vec<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit the inverse automaton as a definition file.
    Invert {
        #[command(flatten)]
        source: Source,
        /// Levels materialized in the output.
        #[arg(long, default_value_t = 4)]
        levels: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit the union of two automata as a definition file.
    Union {
        #[command(flatten)]
        source: Source,
        /// Definition file of the second automaton.
        #[arg(long)]
        other: PathBuf,
        /// Renaming of the second automaton's states, e.g. "a=a^-1,b=b^-1".
        #[arg(long, allow_hyphen_values = true)]
        rename: Option<String>,
        #[arg(long, default_value_t = 4)]
        levels: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Failure of a command: the library error or a CLI-level problem.
enum Failure {
    Lib(Error),
    Io(String),
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Io(_) => 2,
            Failure::Verification(_) => 4,
            Failure::Lib(e) => match e {
                Error::Parse(_)
                | Error::MalformedRule(_)
                | Error::MalformedAutomaton(_)
                | Error::UnknownState(_) => 2,
                Error::Verification(_) => 4,
                Error::BudgetExceeded { .. }
                | Error::IterationCap(_)
                | Error::SearchExhausted(_) => 5,
                _ => 3,
            },
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Lib(e) => e.to_string(),
            Failure::Io(m) | Failure::Verification(m) => m.clone(),
        }
    }
}

type CmdResult<T = ()> = std::result::Result<T, Failure>;

/// What a run did, written to stderr after the command finishes.
struct RunReport {
    command: String,
    inputs: Vec<(String, String)>,
    outputs: Vec<(String, String)>,
    checks: Vec<(String, bool)>,
    started: Instant,
}

impl RunReport {
    fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            checks: Vec::new(),
            started: Instant::now(),
        }
    }

    fn input(&mut self, key: &str, value: impl ToString) {
        self.inputs.push((key.into(), value.to_string()));
    }

    fn output(&mut self, key: &str, value: impl ToString) {
        self.outputs.push((key.into(), value.to_string()));
    }

    /// Records a check; a failed one aborts with both sides in the message.
    fn check(&mut self, what: &str, ok: bool, detail: impl FnOnce() -> String) -> CmdResult {
        self.checks.push((what.into(), ok));
        if ok {
            Ok(())
        } else {
            Err(Failure::Verification(format!(
                "{what} failed: {}",
                detail()
            )))
        }
    }

    fn emit(&self) {
        let join = |v: &[(String, String)]| {
            v.iter()
                .map(|(k, v)| format!("{k}={v:?}"))
                .collect::<Vec<_>>()
                .join(" ")
        };
        eprintln!("# command: {}", self.command);
        if !self.inputs.is_empty() {
            eprintln!("# inputs: {}", join(&self.inputs));
        }
        if !self.outputs.is_empty() {
            eprintln!("# outputs: {}", join(&self.outputs));
        }
        for (what, ok) in &self.checks {
            eprintln!("# verified {what}: {ok}");
        }
        eprintln!("# wall time: {:.3}s", self.started.elapsed().as_secs_f64());
    }
}

fn read_def(path: &PathBuf) -> CmdResult<AutomatonDef> {
    let text =
        fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    Ok(AutomatonDef::from_json(&text)?)
}

fn family_def(family: Family, rule: &str) -> CmdResult<AutomatonDef> {
    let alphabet: AlphabetRule = rule.parse()?;
    let (states, rule) = match family {
        Family::CycleTransposition => (vec!["a", "b"], RuleDef::CycleTransposition),
        Family::Signed => (
            vec!["a", "b", "a^-1", "b^-1"],
            RuleDef::SignedCycleTransposition,
        ),
    };
    Ok(AutomatonDef {
        states: states.into_iter().map(String::from).collect(),
        alphabet,
        rule,
    })
}

impl Source {
    fn load(&self, report: &mut RunReport) -> CmdResult<Automaton> {
        let def = match (&self.automaton, self.family) {
            (Some(path), _) => {
                report.input("automaton", path.display());
                read_def(path)?
            }
            (None, Some(family)) => {
                report.input(
                    "family",
                    family.to_possible_value().expect("named").get_name(),
                );
                report.input("r", &self.rule);
                family_def(family, &self.rule)?
            }
            (None, None) => {
                return Err(Failure::Io(
                    "one of --family or --automaton is required".into(),
                ));
            }
        };
        Ok(def.build()?)
    }
}

fn lab(rule: &str) -> CmdResult<FreeGroupLab> {
    let def = family_def(Family::Signed, rule)?;
    let alphabet = varalpha::ChangingAlphabet::admissible(def.alphabet)?;
    Ok(FreeGroupLab::new(alphabet)?)
}

fn group_word(text: &str) -> CmdResult<GroupWord> {
    Ok(text.parse()?)
}

fn write_out(out: &Option<PathBuf>, text: &str) -> CmdResult {
    match out {
        Some(path) => {
            fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(command: Command, report: &mut RunReport) -> CmdResult {
    match command {
        Command::Eval {
            source,
            level,
            xi,
            word,
        } => {
            let a = source.load(report)?;
            report.input("level", level);
            report.input("xi", &xi);
            report.input("word", &word);
            let xi = a.parse_state_word(&xi)?;
            let w = TreeWord::parse(a.alphabet(), level, &word)?;
            let (image, finals) = a.apply_state_word_traced(level, &xi, &w)?;
            let step_by_step = xi.states().iter().try_fold(w.clone(), |u, &q| {
                a.apply_state(level, q, &u).map(|(v, _)| v)
            })?;
            report.check("state-by-state evaluation", step_by_step == image, || {
                format!("{step_by_step} vs {image}")
            })?;
            let chain: Vec<&str> = finals.iter().map(|&q| a.state_name(q)).collect();
            println!("{image}");
            println!("final states: {}", chain.join(" "));
            report.output("image", &image);
        }
        Command::Dual {
            source,
            level,
            word,
            xi,
        } => {
            let a = source.load(report)?;
            report.input("level", level);
            report.input("word", &word);
            report.input("xi", &xi);
            let xi = a.parse_state_word(&xi)?;
            let w = TreeWord::parse(a.alphabet(), level, &word)?;
            let image = a.dual_apply(level, &w, &xi)?;
            // letter-by-letter against the dual graph components
            let mut traced = xi.clone();
            for (j, &x) in w.letters().iter().enumerate() {
                traced = a
                    .dual_graph_component(level + j)?
                    .follow(x, &traced)
                    .ok_or_else(|| {
                        Failure::Verification("dual graph path left the component".into())
                    })?;
            }
            report.check("dual graph path", traced == image, || {
                format!(
                    "{} vs {}",
                    a.format_state_word(&traced),
                    a.format_state_word(&image)
                )
            })?;
            let text = a.format_state_word(&image);
            println!("{text}");
            report.output("image", text);
        }
        Command::Connect {
            rule,
            xi,
            eta,
            zeta,
            min_len,
            budget,
        } => {
            let lab = lab(&rule)?.with_budget(budget);
            report.input("r", &rule);
            report.input("xi", &xi);
            report.input("eta", &eta);
            let (xi, eta) = (group_word(&xi)?, group_word(&eta)?);
            match zeta {
                None => {
                    let w = lab.connect_irreducible(&xi, &eta)?;
                    let image = lab.dual(&w, &xi)?;
                    report.check("D_w(xi) = eta", image == eta, || {
                        format!("{image} vs {eta}")
                    })?;
                    println!("level {}: {w}", w.base_level());
                    report.output("w", &w);
                }
                Some(zeta) => {
                    report.input("zeta", &zeta);
                    report.input("min_len", min_len);
                    let zeta = group_word(&zeta)?;
                    let (w, v) = lab.connect_equal_length(&xi, &eta, &zeta, min_len)?;
                    let (iw, iv) = (lab.dual(&w, &xi)?, lab.dual(&v, &xi)?);
                    report.check("D_w(xi) = eta", iw == eta, || format!("{iw} vs {eta}"))?;
                    report.check("D_v(xi) = zeta", iv == zeta, || format!("{iv} vs {zeta}"))?;
                    report.check(
                        "|w| = |v| >= min-len",
                        w.len() == v.len() && w.len() >= min_len,
                        || format!("{} and {}", w.len(), v.len()),
                    )?;
                    println!("w = {w}");
                    println!("v = {v}");
                    report.output("w", &w);
                    report.output("v", &v);
                }
            }
        }
        Command::Stabilize {
            source,
            n,
            window,
            search_bound,
            budget,
        } => {
            let a = source.load(report)?;
            report.input("n", n);
            report.input("window", window);
            report.input("search_bound", search_bound);
            match stabilization_certificate(&a, n, window, search_bound, budget)? {
                Some(lambda) => {
                    println!("lambda = {lambda}");
                    print!("{}", class_table(&a, 1..=lambda + window, n, budget)?);
                    report.output("lambda", lambda);
                }
                None => {
                    println!("lambda = none (no level up to {search_bound} is stable over a window of {window})");
                    report.output("lambda", "none");
                }
            }
        }
        Command::Freeness {
            family,
            rule,
            max_len,
            depth_cap,
        } => {
            if family != Family::Signed {
                return Err(Failure::Lib(Error::Precondition(
                    "freeness sweeps run over the signed family woryna-B".into(),
                )));
            }
            let lab = lab(&rule)?;
            report.input("r", &rule);
            report.input("max_len", max_len);
            report.input("depth_cap", depth_cap);
            let rows = lab.freeness_sweep(max_len, depth_cap)?;
            let b = lab.automaton_b();
            let mut all_moved = true;
            let mut max_depth = 0;
            let mut missing = 0;
            for row in &rows {
                match &row.witness {
                    Some(wit) => {
                        let again = b.apply_state_word(1, &row.word.to_state_word(), &wit.word)?;
                        all_moved &= again == wit.image && again != wit.word;
                        max_depth = max_depth.max(wit.depth());
                        println!(
                            "{:<28} | {:<24} -> {:<24} | depth {}",
                            row.word.to_string(),
                            wit.word.to_string(),
                            wit.image.to_string(),
                            wit.depth()
                        );
                    }
                    None => {
                        missing += 1;
                        println!(
                            "{:<28} | none within depth {depth_cap}",
                            row.word.to_string()
                        );
                    }
                }
            }
            println!(
                "words: {}  without witness: {missing}  max depth: {max_depth}",
                rows.len()
            );
            report.output("words", rows.len());
            report.output("max_depth", max_depth);
            report.check("witnesses move their words", all_moved, || {
                "a witness image did not reproduce".into()
            })?;
        }
        Command::ExportDot {
            source,
            kind,
            levels,
            out,
        } => {
            let a = source.load(report)?;
            report.input("levels", format!("{levels:?}"));
            let text = match kind {
                DotKind::Automaton => dot::automaton_dot(&a, &levels)?,
                DotKind::Dual => dot::dual_dot(&a, &levels)?,
            };
            write_out(&out, &text)?;
        }
        Command::Invert {
            source,
            levels,
            out,
        } => {
            let a = source.load(report)?;
            report.input("levels", levels);
            let inverse = a.invert();
            let def = AutomatonDef::describe(&inverse, levels)?;
            check_reload(report, &inverse, &def, levels)?;
            write_out(&out, &(def.to_json() + "\n"))?;
        }
        Command::Union {
            source,
            other,
            rename,
            levels,
            out,
        } => {
            let a = source.load(report)?;
            report.input("other", other.display());
            let b = read_def(&other)?.build()?;
            let rename = rename.as_deref().map(parse_rename).transpose()?;
            let union = a.union(&b, rename.as_ref())?;
            let def = AutomatonDef::describe(&union, levels)?;
            check_reload(report, &union, &def, levels)?;
            write_out(&out, &(def.to_json() + "\n"))?;
        }
    }
    Ok(())
}

fn parse_rename(text: &str) -> CmdResult<HashMap<String, String>> {
    text.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|pair| match pair.split_once('=') {
            Some((from, to)) if !from.trim().is_empty() && !to.trim().is_empty() => {
                Ok((from.trim().to_string(), to.trim().to_string()))
            }
            _ => Err(Failure::Lib(Error::Parse(format!(
                "bad rename entry `{pair}`"
            )))),
        })
        .collect()
}

/// The emitted definition must rebuild to the same tables on `1..=levels`.
fn check_reload(
    report: &mut RunReport,
    automaton: &Automaton,
    def: &AutomatonDef,
    levels: usize,
) -> CmdResult {
    let reloaded = AutomatonDef::from_json(&def.to_json())?.build()?;
    let mut same = reloaded.state_names() == automaton.state_names();
    for level in 1..=levels {
        same &= same && *reloaded.level(level)? == *automaton.level(level)?;
    }
    report.check("reloaded tables", same, || {
        format!("levels 1..={levels} differ after reload")
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let name = std::env::args().skip(1).collect::<Vec<_>>().join(" ");
    let mut report = RunReport::new(&name);
    let result = run(cli.command, &mut report);
    report.emit();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.exit_code())
        }
    }
}
