//! Line-oriented text format for transducers, acceptors, Turing machines and
//! word problem instances.
//!
//! ```text
//! % the adding machine
//! mealy adding
//! alphabet 0 1
//! states +1 +0
//! t +1 0 1 +0
//! t +1 1 0 +1
//! t +0 0 0 +0
//! t +0 1 1 +0
//! end
//!
//! instance
//! automaton adding
//! lhs +1 +1
//! rhs +0
//! budget 1000
//! end
//! ```
//!
//! Tokens are maximal runs of non-whitespace and `%` starts a comment.
//! `include PATH` pulls in another file, relative to the including one.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use autosemi::reductions::tm::{Move, RuleSpec, TuringMachineSpec};
use autosemi::{Acceptor, AcceptorBuilder, MealyAutomaton, MealyBuilder, WordProblemInstance};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("{origin}:{line}: {message}")]
    Syntax { origin: String, line: usize, message: String },
    #[error("{origin}: {message}")]
    Resolve { origin: String, message: String },
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

/// An `instance` block before resolution.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct InstanceSpec {
    pub automaton: String,
    pub lhs: Vec<String>,
    pub rhs: Vec<String>,
    pub constraints: Vec<String>,
    pub budget: Option<usize>,
}

/// Everything declared in a file and its includes, in declaration order.
#[derive(Debug, Clone, Default)]
pub struct Document {
    pub automata: Vec<MealyAutomaton>,
    pub acceptors: Vec<Acceptor>,
    pub machines: Vec<TuringMachineSpec>,
    pub instances: Vec<InstanceSpec>,
    origin: String,
}

fn tokens(line: &str) -> Vec<&str> {
    let line = line.split_once('%').map_or(line, |(data, _)| data);
    line.split_whitespace().collect()
}

struct Parser<'a> {
    origin: String,
    lines: std::iter::Enumerate<std::str::Lines<'a>>,
    line: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, message: impl Into<String>) -> FormatError {
        FormatError::Syntax { origin: self.origin.clone(), line: self.line, message: message.into() }
    }

    fn next(&mut self) -> Option<Vec<&'a str>> {
        for (i, raw) in self.lines.by_ref() {
            let t = tokens(raw);
            if !t.is_empty() {
                self.line = i + 1;
                return Some(t);
            }
        }
        None
    }

    /// Lines of a block up to `end`, each with its line number.
    fn block(&mut self, kind: &str) -> Result<Vec<(usize, Vec<&'a str>)>, FormatError> {
        let start = self.line;
        let mut body = Vec::new();
        while let Some(t) = self.next() {
            if t == ["end"] {
                return Ok(body);
            }
            body.push((self.line, t));
        }
        self.line = start;
        Err(self.err(format!("`{kind}` block is missing `end`")))
    }

    fn at(&self, line: usize, e: impl std::fmt::Display) -> FormatError {
        FormatError::Syntax { origin: self.origin.clone(), line, message: e.to_string() }
    }
}

fn single<'a>(p: &Parser, line: usize, t: &[&'a str]) -> Result<&'a str, FormatError> {
    match t {
        [_, one] => Ok(one),
        _ => Err(p.at(line, format!("`{}` takes exactly one token", t[0]))),
    }
}

impl Document {
    pub fn parse(text: &str) -> Result<Document, FormatError> {
        let mut doc = Document { origin: "<input>".into(), ..Default::default() };
        doc.absorb(text, "<input>", None, &mut Vec::new())?;
        Ok(doc)
    }

    pub fn load(path: &Path) -> Result<Document, FormatError> {
        let mut doc = Document { origin: path.display().to_string(), ..Default::default() };
        doc.absorb_file(path, &mut Vec::new())?;
        Ok(doc)
    }

    fn absorb_file(&mut self, path: &Path, stack: &mut Vec<PathBuf>) -> Result<(), FormatError> {
        let io = |source| FormatError::Io { path: path.display().to_string(), source };
        let canonical = path.canonicalize().map_err(io)?;
        if stack.contains(&canonical) {
            return Err(FormatError::Resolve {
                origin: path.display().to_string(),
                message: "include cycle".into(),
            });
        }
        let text = std::fs::read_to_string(path).map_err(io)?;
        stack.push(canonical);
        let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        let r = self.absorb(&text, &path.display().to_string(), Some(&dir), stack);
        stack.pop();
        r
    }

    fn absorb(
        &mut self,
        text: &str,
        origin: &str,
        dir: Option<&Path>,
        stack: &mut Vec<PathBuf>,
    ) -> Result<(), FormatError> {
        let mut p = Parser { origin: origin.to_string(), lines: text.lines().enumerate(), line: 0 };
        while let Some(t) = p.next() {
            let line = p.line;
            match t[0] {
                "include" => {
                    let target = single(&p, line, &t)?;
                    let Some(dir) = dir else {
                        return Err(p.at(line, "`include` needs a file to resolve against"));
                    };
                    self.absorb_file(&dir.join(target), stack)?;
                }
                "mealy" => {
                    let name = single(&p, line, &t)?;
                    let body = p.block("mealy")?;
                    self.automata.push(parse_mealy(&p, name, &body)?);
                }
                "acceptor" => {
                    let name = single(&p, line, &t)?;
                    let body = p.block("acceptor")?;
                    self.acceptors.push(parse_acceptor(&p, name, &body)?);
                }
                "tm" => {
                    let name = single(&p, line, &t)?;
                    let body = p.block("tm")?;
                    self.machines.push(parse_tm(&p, line, name, &body)?);
                }
                "instance" => {
                    if t.len() != 1 {
                        return Err(p.at(line, "`instance` takes no tokens"));
                    }
                    let body = p.block("instance")?;
                    self.instances.push(parse_instance(&p, line, &body)?);
                }
                other => return Err(p.at(line, format!("unexpected `{other}`"))),
            }
        }
        Ok(())
    }

    fn missing(&self, what: &str, name: &str) -> FormatError {
        FormatError::Resolve { origin: self.origin.clone(), message: format!("no {what} named `{name}`") }
    }

    pub fn automaton(&self, name: &str) -> Result<&MealyAutomaton, FormatError> {
        self.automata.iter().rev().find(|a| a.name() == name).ok_or_else(|| self.missing("automaton", name))
    }

    pub fn acceptor(&self, name: &str) -> Result<&Acceptor, FormatError> {
        self.acceptors.iter().rev().find(|a| a.name() == name).ok_or_else(|| self.missing("acceptor", name))
    }

    pub fn machine(&self, name: &str) -> Result<&TuringMachineSpec, FormatError> {
        self.machines.iter().rev().find(|m| m.name() == name).ok_or_else(|| self.missing("machine", name))
    }

    /// The automaton called `name`, or the only one declared.
    pub fn pick_automaton(&self, name: Option<&str>) -> Result<&MealyAutomaton, FormatError> {
        match (name, self.automata.as_slice()) {
            (Some(n), _) => self.automaton(n),
            (None, [only]) => Ok(only),
            (None, []) => Err(self.resolve_err("no automaton declared")),
            (None, _) => Err(self.resolve_err("several automata declared, pick one by name")),
        }
    }

    fn resolve_err(&self, message: &str) -> FormatError {
        FormatError::Resolve { origin: self.origin.clone(), message: message.into() }
    }

    /// Builds the word problem instance of the `index`-th instance block.
    pub fn instance(&self, index: usize) -> Result<(WordProblemInstance, Option<usize>), FormatError> {
        let spec = self
            .instances
            .get(index)
            .ok_or_else(|| self.resolve_err(&format!("no instance block #{}", index + 1)))?;
        let a = self.automaton(&spec.automaton)?;
        let wrap = |e: autosemi::Error| self.resolve_err(&e.to_string());
        let lhs = a.parse_sequence(&spec.lhs).map_err(wrap)?;
        let rhs = a.parse_sequence(&spec.rhs).map_err(wrap)?;
        let constraints = spec
            .constraints
            .iter()
            .map(|c| self.acceptor(c).cloned())
            .collect::<Result<Vec<_>, _>>()?;
        let inst = WordProblemInstance::new(a.clone(), lhs, rhs, constraints).map_err(wrap)?;
        Ok((inst, spec.budget))
    }
}

fn parse_mealy(p: &Parser, name: &str, body: &[(usize, Vec<&str>)]) -> Result<MealyAutomaton, FormatError> {
    let mut b = MealyBuilder::new(name);
    let mut end = p.line;
    for (line, t) in body {
        end = *line;
        let r = match (t[0], &t[1..]) {
            ("alphabet", toks) => toks.iter().try_for_each(|x| b.add_letter(x).map(drop)),
            ("states", toks) => toks.iter().try_for_each(|x| b.add_state(x).map(drop)),
            ("t", [q, a, o, s]) => b.transition(q, a, o, s),
            ("t", _) => Err(autosemi::Error::InvalidToken("expected `t STATE IN OUT STATE`".into())),
            (other, _) => return Err(p.at(*line, format!("unexpected `{other}` in mealy block"))),
        };
        r.map_err(|e| p.at(*line, e))?;
    }
    b.build().map_err(|e| p.at(end, e))
}

fn parse_acceptor(p: &Parser, name: &str, body: &[(usize, Vec<&str>)]) -> Result<Acceptor, FormatError> {
    let mut b = AcceptorBuilder::new(name);
    let mut end = p.line;
    for (line, t) in body {
        end = *line;
        let r = match (t[0], &t[1..]) {
            ("alphabet", toks) => toks.iter().try_for_each(|x| b.add_letter(x).map(drop)),
            ("states", toks) => toks.iter().try_for_each(|x| b.add_state(x).map(drop)),
            ("initial", toks) => toks.iter().try_for_each(|x| b.lookup_state(x).map(|z| b.set_initial(z))),
            ("final", toks) => toks.iter().try_for_each(|x| b.lookup_state(x).map(|z| b.set_final(z))),
            ("t", [q, a, s]) => b.transition(q, a, s),
            ("t", _) => Err(autosemi::Error::InvalidToken("expected `t STATE IN STATE`".into())),
            (other, _) => return Err(p.at(*line, format!("unexpected `{other}` in acceptor block"))),
        };
        r.map_err(|e| p.at(*line, e))?;
    }
    b.build().map_err(|e| p.at(end, e))
}

fn parse_tm(
    p: &Parser,
    start: usize,
    name: &str,
    body: &[(usize, Vec<&str>)],
) -> Result<TuringMachineSpec, FormatError> {
    let mut tape = Vec::new();
    let mut states = Vec::new();
    let mut finals = Vec::new();
    let mut blank = None;
    let mut initial = None;
    let mut rules = Vec::new();
    for (line, t) in body {
        match (t[0], &t[1..]) {
            ("tape", toks) => tape.extend_from_slice(toks),
            ("states", toks) => states.extend_from_slice(toks),
            ("final", toks) => finals.extend_from_slice(toks),
            ("blank", [b]) => blank = Some(*b),
            ("initial", [z]) => initial = Some(*z),
            ("rule", [z, r, w, m, n]) => {
                let mv = Move::parse(m).ok_or_else(|| p.at(*line, format!("move must be L, N or R, got `{m}`")))?;
                rules.push(RuleSpec {
                    state: z.to_string(),
                    read: r.to_string(),
                    write: w.to_string(),
                    mv,
                    next: n.to_string(),
                });
            }
            (other, _) => return Err(p.at(*line, format!("malformed `{other}` line in tm block"))),
        }
    }
    let blank = blank.ok_or_else(|| p.at(start, "tm block needs `blank`"))?;
    let initial = initial.ok_or_else(|| p.at(start, "tm block needs `initial`"))?;
    TuringMachineSpec::new(name, &tape, blank, &states, initial, &finals, rules).map_err(|e| p.at(start, e))
}

fn parse_instance(p: &Parser, start: usize, body: &[(usize, Vec<&str>)]) -> Result<InstanceSpec, FormatError> {
    let mut spec = InstanceSpec::default();
    let owned = |toks: &[&str]| toks.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    for (line, t) in body {
        match (t[0], &t[1..]) {
            ("automaton", [a]) => spec.automaton = a.to_string(),
            ("lhs", toks) => spec.lhs = owned(toks),
            ("rhs", toks) => spec.rhs = owned(toks),
            ("constraint", [c]) => spec.constraints.push(c.to_string()),
            ("budget", [n]) => {
                spec.budget = Some(n.parse().map_err(|_| p.at(*line, format!("bad budget `{n}`")))?)
            }
            (other, _) => return Err(p.at(*line, format!("malformed `{other}` line in instance block"))),
        }
    }
    if spec.automaton.is_empty() {
        return Err(p.at(start, "instance block needs `automaton`"));
    }
    Ok(spec)
}

fn line(out: &mut String, head: &str, toks: impl IntoIterator<Item = impl AsRef<str>>) {
    out.push_str(head);
    for t in toks {
        out.push(' ');
        out.push_str(t.as_ref());
    }
    out.push('\n');
}

pub fn write_mealy(a: &MealyAutomaton) -> String {
    let mut out = String::new();
    line(&mut out, "mealy", [a.name()]);
    line(&mut out, "alphabet", a.alphabet().tokens());
    line(&mut out, "states", a.state_names());
    let al = a.alphabet();
    for (q, x, y, p) in a.transitions() {
        let _ = writeln!(out, "t {} {} {} {}", a.state_name(q), al.token(x), al.token(y), a.state_name(p));
    }
    out.push_str("end\n");
    out
}

pub fn write_acceptor(c: &Acceptor) -> String {
    let mut out = String::new();
    line(&mut out, "acceptor", [c.name()]);
    line(&mut out, "alphabet", c.alphabet().tokens());
    line(&mut out, "states", c.state_names());
    line(&mut out, "initial", c.initial().iter().map(|&z| c.state_name(z as usize)));
    line(&mut out, "final", c.finals().map(|z| c.state_name(z)));
    for (z, x, y) in c.transitions() {
        let _ = writeln!(out, "t {} {} {}", c.state_name(z), c.alphabet().token(x), c.state_name(y));
    }
    out.push_str("end\n");
    out
}

pub fn write_tm(tm: &TuringMachineSpec) -> String {
    let mut out = String::new();
    line(&mut out, "tm", [tm.name()]);
    line(&mut out, "tape", tm.tape());
    line(&mut out, "blank", [&tm.tape()[tm.blank()]]);
    line(&mut out, "states", tm.states());
    line(&mut out, "initial", [&tm.states()[tm.initial()]]);
    line(&mut out, "final", tm.final_states().map(|z| &tm.states()[z]));
    for r in tm.given_rules() {
        let _ = writeln!(out, "rule {} {} {} {} {}", r.state, r.read, r.write, r.mv, r.next);
    }
    out.push_str("end\n");
    out
}

pub fn write_instance_block(spec: &InstanceSpec) -> String {
    let mut out = String::from("instance\n");
    line(&mut out, "automaton", [&spec.automaton]);
    line(&mut out, "lhs", &spec.lhs);
    line(&mut out, "rhs", &spec.rhs);
    for c in &spec.constraints {
        line(&mut out, "constraint", [c]);
    }
    if let Some(b) = spec.budget {
        let _ = writeln!(out, "budget {b}");
    }
    out.push_str("end\n");
    out
}

/// A self-contained document for `inst`: the automaton, its constraints
/// and the instance block. Constraint names are made unique if needed.
pub fn write_instance(inst: &WordProblemInstance, budget: Option<usize>) -> String {
    let a = inst.automaton();
    let mut out = write_mealy(a);
    let mut used = HashSet::new();
    let mut names = Vec::new();
    for c in inst.constraints() {
        let mut name = c.name().to_string();
        let mut i = 1;
        while !used.insert(name.clone()) {
            i += 1;
            name = format!("{}.{i}", c.name());
        }
        out.push('\n');
        if name == c.name() {
            out.push_str(&write_acceptor(c));
        } else {
            out.push_str(&write_acceptor(&c.renamed(&name)));
        }
        names.push(name);
    }
    out.push('\n');
    out.push_str(&write_instance_block(&InstanceSpec {
        automaton: a.name().to_string(),
        lhs: a.sequence_tokens(inst.lhs()),
        rhs: a.sequence_tokens(inst.rhs()),
        constraints: names,
        budget,
    }));
    out
}
