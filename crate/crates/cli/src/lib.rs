//! Command-line front end for the `autosemi` library.
//!
//! Exit status: 0 for success and `EQUAL`, 10 for `NOT-EQUAL`, 1 for usage
//! errors, 2 for unreadable or invalid input, 3 when the configuration
//! budget runs out.

pub mod format;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use autosemi::gadgets::{build_gadget, separation_instance, DualVariant, GadgetId};
use autosemi::reductions::dfa::{reduce_dfa_emptiness, reduce_dfa_intersection, DfaList};
use autosemi::reductions::tm::{encode_computation, TmReductionParams, TuringMachineSpec};
use autosemi::reductions::tm_automaton::{build_tm_automaton, reduce_tm_with, TmReduceOptions};
use autosemi::{decide, oracle_decide_with, ActOutcome, PartialValue, Verdict, VerdictKind, WordProblemInstance};
use clap::{Args, Parser, Subcommand};

use crate::format::{write_instance, write_mealy, Document, FormatError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_NOT_EQUAL: i32 = 10;

#[derive(Parser, Debug)]
#[command(name = "autosemi", version, about = "Word problems for automaton semigroups and groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the structural properties of every automaton in FILE.
    Check { file: PathBuf },
    /// Apply a state sequence to a word.
    Act {
        file: PathBuf,
        #[arg(long)]
        automaton: Option<String>,
        /// Space-separated states, rightmost acts first; `~q` is the inverse of `q`.
        #[arg(long, allow_hyphen_values = true)]
        seq: String,
        #[arg(long, allow_hyphen_values = true)]
        word: String,
    },
    /// Decide an instance block exactly.
    Decide {
        file: PathBuf,
        #[command(flatten)]
        pick: Pick,
        #[arg(long)]
        max_configs: Option<usize>,
        #[arg(long)]
        porcelain: bool,
    },
    /// Search for a witness by enumerating words up to a length.
    Oracle {
        file: PathBuf,
        #[command(flatten)]
        pick: Pick,
        #[arg(long)]
        max_len: u64,
        /// Visit every word instead of one per residual class.
        #[arg(long)]
        exhaustive: bool,
        #[arg(long)]
        porcelain: bool,
    },
    /// Print a built-in automaton; with -n, the separation instance on D or D'.
    Gadget {
        name: String,
        #[arg(short)]
        n: Option<usize>,
    },
    #[command(subcommand)]
    Reduce(Reduce),
    #[command(subcommand)]
    Encode(Encode),
    #[command(subcommand)]
    Bench(Bench),
}

#[derive(Args, Debug)]
struct Pick {
    /// 1-based index of the instance block.
    #[arg(long, default_value_t = 1)]
    instance: usize,
}

#[derive(Args, Debug)]
struct TmArgs {
    file: PathBuf,
    #[arg(long)]
    machine: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    input: String,
    #[arg(long)]
    space: usize,
}

#[derive(Subcommand, Debug)]
enum Reduce {
    /// Instance that is EQUAL iff the DFAs have no common word.
    DfaIntersection {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long)]
        group: bool,
    },
    /// Instance that is EQUAL iff the DFA accepts nothing.
    DfaEmpty { file: PathBuf },
    /// Instance that is NOT-EQUAL iff the machine accepts within the space bound.
    Tm {
        #[command(flatten)]
        tm: TmArgs,
        #[arg(long)]
        group: bool,
        /// Drop states unreachable from the instance sequences.
        #[arg(long)]
        prune: bool,
    },
}

#[derive(Subcommand, Debug)]
enum Encode {
    /// Print the encoding of the first STEPS steps of a computation.
    Tm {
        #[command(flatten)]
        tm: TmArgs,
        #[arg(long)]
        steps: usize,
    },
}

#[derive(Subcommand, Debug)]
enum Bench {
    /// Decide the D and D' separation instances for n = 1..=MAX_N.
    Separation {
        #[arg(long)]
        max_n: usize,
    },
}

#[derive(Debug)]
enum Failure {
    Input(String),
    Budget(String),
    // stdout went away, e.g. piped into `head`
    Closed,
}

impl From<FormatError> for Failure {
    fn from(e: FormatError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<autosemi::Error> for Failure {
    fn from(e: autosemi::Error) -> Self {
        match e {
            autosemi::Error::ConfigBudgetExceeded { .. } => Failure::Budget(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            return Failure::Closed;
        }
        Failure::Input(e.to_string())
    }
}

type Outcome = Result<i32, Failure>;

/// Runs the command line `args` (program name first).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(out, "{text}");
                EXIT_OK
            };
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(Failure::Input(m)) => {
            let _ = writeln!(err, "error: {m}");
            EXIT_INPUT
        }
        Err(Failure::Budget(m)) => {
            let _ = writeln!(err, "error: {m}");
            EXIT_BUDGET
        }
        Err(Failure::Closed) => EXIT_OK,
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    match cmd {
        Command::Check { file } => {
            let doc = Document::load(&file)?;
            if doc.automata.is_empty() {
                return Err(Failure::Input(format!("{}: no automaton declared", file.display())));
            }
            for a in &doc.automata {
                writeln!(out, "{}: {}", a.name(), a.check_properties())?;
            }
            Ok(EXIT_OK)
        }
        Command::Act { file, automaton, seq, word } => {
            let doc = Document::load(&file)?;
            let a = doc.pick_automaton(automaton.as_deref())?;
            let s = a.parse_sequence_str(&seq)?;
            let u = a.alphabet().parse_str(&word)?;
            match a.act_word(&s, &u)? {
                ActOutcome::Defined { output, .. } => writeln!(out, "{}", a.alphabet().render(&output))?,
                ActOutcome::UndefinedAt(i) => writeln!(out, "undefined at position {i}")?,
            }
            Ok(EXIT_OK)
        }
        Command::Decide { file, pick, max_configs, porcelain } => {
            let (inst, budget) = load_instance(&file, &pick)?;
            let v = decide(&inst, max_configs.or(budget))?;
            report(&inst, &v, porcelain, "configurations", out)
        }
        Command::Oracle { file, pick, max_len, exhaustive, porcelain } => {
            let (inst, _) = load_instance(&file, &pick)?;
            let v = oracle_decide_with(&inst, max_len, !exhaustive);
            report(&inst, &v, porcelain, "prefixes", out)
        }
        Command::Gadget { name, n } => gadget(&name, n, out),
        Command::Reduce(r) => reduce(r, out),
        Command::Encode(Encode::Tm { tm, steps }) => {
            let doc = Document::load(&tm.file)?;
            let (machine, params) = tm_params(&doc, &tm, false)?;
            let w = encode_computation(machine, &params, steps)?;
            writeln!(out, "{}", autosemi::reductions::tm::tm_alphabet(machine).render(&w))?;
            Ok(EXIT_OK)
        }
        Command::Bench(Bench::Separation { max_n }) => bench_separation(max_n, out, err),
    }
}

fn load_instance(file: &Path, pick: &Pick) -> Result<(WordProblemInstance, Option<usize>), Failure> {
    let doc = Document::load(file)?;
    if pick.instance == 0 {
        return Err(Failure::Input("instance indices start at 1".into()));
    }
    Ok(doc.instance(pick.instance - 1)?)
}

fn value(inst: &WordProblemInstance, v: &Option<PartialValue>) -> String {
    match v {
        Some(PartialValue::Defined(w)) => inst.automaton().alphabet().render(w),
        Some(PartialValue::Undefined) | None => "undefined".into(),
    }
}

fn report(inst: &WordProblemInstance, v: &Verdict, porcelain: bool, unit: &str, out: &mut dyn Write) -> Outcome {
    let al = inst.automaton().alphabet();
    match (&v.kind, &v.witness) {
        (VerdictKind::NotEqual, Some(w)) => {
            if porcelain {
                let toks = al.word_tokens(w);
                let mut line = format!("NOT-EQUAL {}", w.len());
                for t in toks {
                    line.push(' ');
                    line.push_str(t);
                }
                writeln!(out, "{line}")?;
            } else {
                writeln!(out, "NOT-EQUAL witness: {}", al.render(w))?;
                writeln!(out, "lhs: {}", value(inst, &v.lhs_value))?;
                writeln!(out, "rhs: {}", value(inst, &v.rhs_value))?;
                writeln!(out, "explored {} {unit}", v.explored)?;
            }
            Ok(EXIT_NOT_EQUAL)
        }
        _ => {
            if porcelain {
                writeln!(out, "EQUAL")?;
            } else {
                if v.bounded {
                    writeln!(out, "EQUAL up to the length bound")?;
                } else {
                    writeln!(out, "EQUAL")?;
                }
                writeln!(out, "explored {} {unit}", v.explored)?;
            }
            Ok(EXIT_OK)
        }
    }
}

fn gadget(name: &str, n: Option<usize>, out: &mut dyn Write) -> Outcome {
    let id = GadgetId::ALL
        .into_iter()
        .find(|&id| build_gadget(id).name() == name)
        .ok_or_else(|| {
            let known: Vec<String> = GadgetId::ALL.iter().map(|&id| build_gadget(id).name().to_string()).collect();
            Failure::Input(format!("unknown gadget `{name}` (known: {})", known.join(", ")))
        })?;
    match (id, n) {
        (_, None) => write!(out, "{}", write_mealy(&build_gadget(id)))?,
        (GadgetId::DualAdding(variant), Some(n)) => {
            if n == 0 {
                return Err(Failure::Input(format!("-n {n} is too small for `{name}`")));
            }
            write!(out, "{}", write_instance(&separation_instance(variant, n), None))?
        }
        (_, Some(_)) => return Err(Failure::Input(format!("`{name}` takes no -n"))),
    }
    Ok(EXIT_OK)
}

fn tm_params<'a>(doc: &'a Document, args: &TmArgs, group: bool) -> Result<(&'a TuringMachineSpec, TmReductionParams), Failure> {
    let machine = match (&args.machine, doc.machines.as_slice()) {
        (Some(m), _) => doc.machine(m)?,
        (None, [only]) => only,
        (None, []) => return Err(Failure::Input(format!("{}: no tm declared", args.file.display()))),
        (None, _) => return Err(Failure::Input("several machines declared, pick one with --machine".into())),
    };
    let input: Vec<&str> = args.input.split_whitespace().collect();
    let params = TmReductionParams::new(machine, args.space, &input, group)?;
    Ok((machine, params))
}

fn reduce(r: Reduce, out: &mut dyn Write) -> Outcome {
    match r {
        Reduce::DfaIntersection { files, group } => {
            let mut dfas = Vec::new();
            for f in &files {
                let doc = Document::load(f)?;
                if doc.acceptors.is_empty() {
                    return Err(Failure::Input(format!("{}: no acceptor declared", f.display())));
                }
                dfas.extend(doc.acceptors);
            }
            let inst = reduce_dfa_intersection(&DfaList::new(dfas)?, group)?;
            write!(out, "{}", write_instance(&inst, None))?;
        }
        Reduce::DfaEmpty { file } => {
            let doc = Document::load(&file)?;
            let dfa = match doc.acceptors.as_slice() {
                [only] => only,
                _ => return Err(Failure::Input(format!("{}: expected exactly one acceptor", file.display()))),
            };
            write!(out, "{}", write_instance(&reduce_dfa_emptiness(dfa)?, None))?;
        }
        Reduce::Tm { tm, group, prune } => {
            let doc = Document::load(&tm.file)?;
            let (machine, params) = tm_params(&doc, &tm, group)?;
            let full = build_tm_automaton(machine, &params)?.num_states();
            let inst = reduce_tm_with(machine, &params, TmReduceOptions { prune })?;
            writeln!(out, "% states: {full}")?;
            if prune {
                writeln!(out, "% reachable states: {}", inst.automaton().num_states())?;
            }
            writeln!(out, "% space {} digits {}", params.p_val, params.k)?;
            write!(out, "{}", write_instance(&inst, None))?;
        }
    }
    Ok(EXIT_OK)
}

fn bench_separation(max_n: usize, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    writeln!(out, "variant n witness-length configurations millis")?;
    for variant in [DualVariant::D, DualVariant::DPrime] {
        let name = if variant == DualVariant::D { "D" } else { "D'" };
        for n in 1..=max_n {
            let inst = separation_instance(variant, n);
            let t = Instant::now();
            let v = decide(&inst, None)?;
            let ms = t.elapsed().as_secs_f64() * 1e3;
            let len = v.witness.as_ref().map_or(0, Vec::len);
            writeln!(out, "{name} {n} {len} {} {ms:.2}", v.explored)?;
            if v.is_equal() {
                writeln!(err, "warning: {name} n={n} came out EQUAL")?;
            }
        }
    }
    Ok(EXIT_OK)
}
