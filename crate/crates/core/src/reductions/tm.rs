//! One-tape Turing machines, their local transition map, a reference
//! simulator, and the encoding of computations as words.
//!
//! A configuration of length `p` is a word over `Δ = Γ ∪ (Γ × Z)` with
//! exactly one head symbol `(γ, z)`. Symbols of `Δ` are written `[γ]` and
//! `[γ@z]`.

use std::collections::{HashMap, HashSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::mealy::{check_state_token, Alphabet, Letter};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Move {
    L,
    N,
    R,
}

impl Move {
    pub fn parse(tok: &str) -> Option<Move> {
        match tok {
            "L" => Some(Move::L),
            "N" => Some(Move::N),
            "R" => Some(Move::R),
            _ => None,
        }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Move::L => "L",
            Move::N => "N",
            Move::R => "R",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TmRule {
    pub write: usize,
    pub next: usize,
    pub mv: Move,
}

/// A rule as written in a machine description:
/// `(state, read, write, move, next)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RuleSpec {
    pub state: String,
    pub read: String,
    pub write: String,
    pub mv: Move,
    pub next: String,
}

/// A deterministic one-tape machine. Missing rules are completed with
/// stay-put self-loops `(z, γ) → (γ, z, N)`, so the machine never halts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TuringMachineSpec {
    name: String,
    tape: Vec<String>,
    blank: usize,
    states: Vec<String>,
    initial: usize,
    finals: Vec<bool>,
    rules: Vec<TmRule>,
    given: Vec<RuleSpec>,
}

impl TuringMachineSpec {
    pub fn new(
        name: &str,
        tape: &[&str],
        blank: &str,
        states: &[&str],
        initial: &str,
        finals: &[&str],
        rules: Vec<RuleSpec>,
    ) -> Result<Self> {
        let invalid = |reason: String| Error::InvalidMachine { name: name.to_string(), reason };
        let index = |list: &[&str], what: &str| -> Result<HashMap<String, usize>> {
            let mut map = HashMap::new();
            for (i, t) in list.iter().enumerate() {
                check_state_token(t)?;
                if map.insert(t.to_string(), i).is_some() {
                    return Err(invalid(format!("{what} `{t}` declared twice")));
                }
            }
            Ok(map)
        };
        let tape_ix = index(tape, "tape symbol")?;
        let state_ix = index(states, "state")?;
        if tape.is_empty() || states.is_empty() {
            return Err(invalid("needs at least one tape symbol and one state".into()));
        }
        let sym = |t: &str| tape_ix.get(t).copied().ok_or_else(|| invalid(format!("unknown tape symbol `{t}`")));
        let st = |t: &str| state_ix.get(t).copied().ok_or_else(|| invalid(format!("unknown state `{t}`")));
        let blank = sym(blank)?;
        let initial = st(initial)?;
        let mut fin = vec![false; states.len()];
        for f in finals {
            fin[st(f)?] = true;
        }
        let ng = tape.len();
        let mut table: Vec<Option<TmRule>> = vec![None; states.len() * ng];
        for r in &rules {
            let (z, g) = (st(&r.state)?, sym(&r.read)?);
            let rule = TmRule { write: sym(&r.write)?, next: st(&r.next)?, mv: r.mv };
            let slot = &mut table[z * ng + g];
            if slot.is_some_and(|old| old != rule) {
                return Err(invalid(format!("two rules for state `{}` reading `{}`", r.state, r.read)));
            }
            *slot = Some(rule);
        }
        let rules_full = table
            .iter()
            .enumerate()
            .map(|(i, r)| r.unwrap_or(TmRule { write: i % ng, next: i / ng, mv: Move::N }))
            .collect();
        let tm = TuringMachineSpec {
            name: name.to_string(),
            tape: tape.iter().map(|s| s.to_string()).collect(),
            blank,
            states: states.iter().map(|s| s.to_string()).collect(),
            initial,
            finals: fin,
            rules: rules_full,
            given: rules,
        };
        let mut tokens = HashSet::new();
        for d in 0..tm.delta_len() {
            if !tokens.insert(tm.delta_token(d)) {
                return Err(invalid(format!("symbol `{}` is ambiguous", tm.delta_token(d))));
            }
        }
        Ok(tm)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn tape(&self) -> &[String] {
        &self.tape
    }

    pub fn blank(&self) -> usize {
        self.blank
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn is_final(&self, z: usize) -> bool {
        self.finals[z]
    }

    pub fn final_states(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.states.len()).filter(|&z| self.finals[z])
    }

    /// Rules exactly as given, without the stay-put completion.
    pub fn given_rules(&self) -> &[RuleSpec] {
        &self.given
    }

    pub fn rule(&self, z: usize, g: usize) -> TmRule {
        self.rules[z * self.tape.len() + g]
    }

    pub fn tape_symbol(&self, tok: &str) -> Option<usize> {
        self.tape.iter().position(|t| t == tok)
    }

    /// `|Δ| = |Γ| + |Γ|·|Z|`.
    pub fn delta_len(&self) -> usize {
        self.tape.len() * (1 + self.states.len())
    }

    pub fn plain(&self, g: usize) -> usize {
        g
    }

    pub fn head(&self, g: usize, z: usize) -> usize {
        self.tape.len() * (1 + z) + g
    }

    /// Splits a `Δ` index into its tape symbol and optional head state.
    pub fn decode(&self, d: usize) -> (usize, Option<usize>) {
        let ng = self.tape.len();
        if d < ng {
            (d, None)
        } else {
            (d % ng, Some(d / ng - 1))
        }
    }

    pub fn delta_token(&self, d: usize) -> String {
        match self.decode(d) {
            (g, None) => format!("[{}]", self.tape[g]),
            (g, Some(z)) => format!("[{}@{}]", self.tape[g], self.states[z]),
        }
    }

    pub fn is_accepting_symbol(&self, d: usize) -> bool {
        matches!(self.decode(d), (_, Some(z)) if self.finals[z])
    }
}

/// Letter of `Σ = Δ ⊔ {0, 1, #, $}` in the alphabet from [`tm_alphabet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SigmaLetters {
    pub zero: Letter,
    pub one: Letter,
    pub hash: Letter,
    pub dollar: Letter,
}

impl SigmaLetters {
    pub fn of(tm: &TuringMachineSpec) -> Self {
        let n = tm.delta_len() as u32;
        SigmaLetters {
            zero: Letter(n),
            one: Letter(n + 1),
            hash: Letter(n + 2),
            dollar: Letter(n + 3),
        }
    }
}

/// `Σ`: the symbols of `Δ` in index order, then `0 1 # $`.
pub fn tm_alphabet(tm: &TuringMachineSpec) -> Alphabet {
    let mut toks: Vec<String> = (0..tm.delta_len()).map(|d| tm.delta_token(d)).collect();
    toks.extend(["0", "1", "#", "$"].map(String::from));
    Alphabet::new(toks).expect("unambiguous symbols")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TmReductionParams {
    /// Space bound `p`: the number of tape cells in every configuration.
    pub p_val: usize,
    /// Digit-block length, the least `k` with `2^k > p_val`.
    pub k: usize,
    /// Input symbols (tape indices, none of them blank).
    pub input: Vec<usize>,
    pub group: bool,
}

impl TmReductionParams {
    pub fn new<S: AsRef<str>>(tm: &TuringMachineSpec, p_val: usize, input: &[S], group: bool) -> Result<Self> {
        if p_val == 0 {
            return Err(Error::InvalidParams("space bound must be positive".into()));
        }
        if input.len() > p_val {
            return Err(Error::InvalidParams(format!(
                "input of length {} does not fit in {p_val} cells",
                input.len()
            )));
        }
        let input = input
            .iter()
            .map(|t| {
                let t = t.as_ref();
                match tm.tape_symbol(t) {
                    Some(g) if g != tm.blank() => Ok(g),
                    _ => Err(Error::InvalidParams(format!("`{t}` is not a non-blank tape symbol"))),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let k = (usize::BITS - p_val.leading_zeros()) as usize;
        Ok(TmReductionParams { p_val, k, input, group })
    }

    /// `(a0, z0) a1 … a(n-1) ␣ … ␣`, of length `p_val`.
    pub fn initial_configuration(&self, tm: &TuringMachineSpec) -> Vec<usize> {
        let mut c = vec![tm.plain(tm.blank()); self.p_val];
        for (i, &g) in self.input.iter().enumerate() {
            c[i] = tm.plain(g);
        }
        let (g0, _) = tm.decode(c[0]);
        c[0] = tm.head(g0, tm.initial());
        c
    }
}

/// The local rule `Δ³ → Δ`, undefined on windows with two or more heads.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TauTable {
    n: usize,
    table: Vec<Option<u32>>,
}

impl TauTable {
    pub fn get(&self, x: usize, y: usize, z: usize) -> Option<usize> {
        self.table[(x * self.n + y) * self.n + z].map(|v| v as usize)
    }

    pub fn delta_len(&self) -> usize {
        self.n
    }
}

pub fn derive_tau(tm: &TuringMachineSpec) -> TauTable {
    let n = tm.delta_len();
    let mut table = Vec::with_capacity(n * n * n);
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                table.push(tau_window(tm, x, y, z).map(|v| v as u32));
            }
        }
    }
    TauTable { n, table }
}

fn tau_window(tm: &TuringMachineSpec, x: usize, y: usize, z: usize) -> Option<usize> {
    let (dx, dy, dz) = (tm.decode(x), tm.decode(y), tm.decode(z));
    let heads = [dx.1, dy.1, dz.1].iter().filter(|h| h.is_some()).count();
    if heads >= 2 {
        return None;
    }
    if let (g, Some(s)) = dy {
        let r = tm.rule(s, g);
        return Some(match r.mv {
            Move::N => tm.head(r.write, r.next),
            _ => tm.plain(r.write),
        });
    }
    if let (g, Some(s)) = dx {
        let r = tm.rule(s, g);
        if r.mv == Move::R {
            return Some(tm.head(dy.0, r.next));
        }
    }
    if let (g, Some(s)) = dz {
        let r = tm.rule(s, g);
        if r.mv == Move::L {
            return Some(tm.head(dy.0, r.next));
        }
    }
    Some(y)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Simulation {
    /// First step `t ≥ 1` whose configuration carries an accepting state.
    pub accepts_within: Option<usize>,
    /// Configurations `c0, c1, …`, up to acceptance or `max_steps`.
    pub trace: Vec<Vec<usize>>,
}

fn step(tm: &TuringMachineSpec, c: &[usize], t: usize) -> Result<Vec<usize>> {
    let pos = c.iter().position(|&d| tm.decode(d).1.is_some()).expect("one head per configuration");
    let (g, z) = tm.decode(c[pos]);
    let r = tm.rule(z.expect("head symbol"), g);
    let mut next = c.to_vec();
    next[pos] = tm.plain(r.write);
    let to = match r.mv {
        Move::N => pos,
        Move::L => pos.checked_sub(1).ok_or(Error::LeftEdgeViolated { step: t })?,
        Move::R if pos + 1 < c.len() => pos + 1,
        Move::R => return Err(Error::SpaceBoundViolated { step: t }),
    };
    let (g_to, _) = tm.decode(next[to]);
    next[to] = tm.head(g_to, r.next);
    Ok(next)
}

/// Runs the machine from its initial configuration for at most
/// `max_steps` steps, stopping at the first accepting configuration.
pub fn simulate_tm(tm: &TuringMachineSpec, params: &TmReductionParams, max_steps: usize) -> Result<Simulation> {
    let mut trace = vec![params.initial_configuration(tm)];
    for t in 1..=max_steps {
        let next = step(tm, trace.last().expect("non-empty trace"), t)?;
        let accepting = next.iter().any(|&d| tm.is_accepting_symbol(d));
        trace.push(next);
        if accepting {
            return Ok(Simulation { accepts_within: Some(t), trace });
        }
    }
    Ok(Simulation { accepts_within: None, trace })
}

/// Encodes configurations `c1 … cT` as `c1' # … # cT' $ 0^k $ 0`, where `c'`
/// follows every symbol by `k` zeros.
pub fn encode_configurations(tm: &TuringMachineSpec, k: usize, configs: &[Vec<usize>]) -> Vec<Letter> {
    let s = SigmaLetters::of(tm);
    let mut w = Vec::new();
    for (t, c) in configs.iter().enumerate() {
        if t > 0 {
            w.push(s.hash);
        }
        for &d in c {
            w.push(Letter(d as u32));
            w.extend(std::iter::repeat_n(s.zero, k));
        }
    }
    w.push(s.dollar);
    w.extend(std::iter::repeat_n(s.zero, k));
    w.push(s.dollar);
    w.push(s.zero);
    w
}

/// The encoding of the first `steps` configurations after `c0`, as a word
/// over [`tm_alphabet`].
pub fn encode_computation(tm: &TuringMachineSpec, params: &TmReductionParams, steps: usize) -> Result<Vec<Letter>> {
    if steps == 0 {
        return Err(Error::InvalidParams("at least one step is required".into()));
    }
    let mut configs = Vec::with_capacity(steps);
    let mut c = params.initial_configuration(tm);
    for t in 1..=steps {
        c = step(tm, &c, t)?;
        configs.push(c.clone());
    }
    Ok(encode_configurations(tm, params.k, &configs))
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn rule(state: &str, read: &str, write: &str, mv: Move, next: &str) -> RuleSpec {
        RuleSpec {
            state: state.into(),
            read: read.into(),
            write: write.into(),
            mv,
            next: next.into(),
        }
    }

    /// Moves right once, entering the final state `f`.
    pub(crate) fn step_right() -> TuringMachineSpec {
        TuringMachineSpec::new(
            "right",
            &["_", "a"],
            "_",
            &["s", "f"],
            "s",
            &["f"],
            vec![rule("s", "a", "_", Move::R, "f"), rule("s", "_", "a", Move::R, "f")],
        )
        .unwrap()
    }

    #[test]
    fn delta_layout() {
        let tm = step_right();
        assert_eq!(tm.delta_len(), 6);
        assert_eq!(tm.delta_token(tm.head(1, 0)), "[a@s]");
        assert_eq!(tm.decode(tm.head(1, 1)), (1, Some(1)));
        assert_eq!(tm.decode(0), (0, None));
        assert!(tm.is_accepting_symbol(tm.head(0, 1)));
        let sigma = tm_alphabet(&tm);
        assert_eq!(sigma.len(), 10);
        assert_eq!(sigma.letter("$"), Some(SigmaLetters::of(&tm).dollar));
    }

    #[test]
    fn tau_examples() {
        let tm = step_right();
        let tau = derive_tau(&tm);
        let (blank, a) = (tm.plain(0), tm.plain(1));
        assert_eq!(tau.get(blank, a, blank), Some(a));
        let head = tm.head(1, 0);
        for y in [blank, a] {
            let (g, _) = tm.decode(y);
            assert_eq!(tau.get(head, y, a), Some(tm.head(g, 1)));
        }
        assert_eq!(tau.get(a, head, blank), Some(blank));
        assert_eq!(tau.get(head, head, a), None);
        // stay-put completion in the final state
        let fin = tm.head(1, 1);
        assert_eq!(tau.get(blank, fin, blank), Some(fin));
    }

    #[test]
    fn params_and_k() {
        let tm = step_right();
        let k = |p| TmReductionParams::new::<&str>(&tm, p, &[], false).unwrap().k;
        assert_eq!([k(1), k(2), k(3), k(4), k(7), k(8)], [1, 2, 2, 3, 3, 4]);
        assert!(TmReductionParams::new(&tm, 1, &["a", "a"], false).is_err());
        assert!(TmReductionParams::new(&tm, 3, &["_"], false).is_err());
        let p = TmReductionParams::new(&tm, 3, &["a"], false).unwrap();
        assert_eq!(p.initial_configuration(&tm), vec![tm.head(1, 0), 0, 0]);
    }

    #[test]
    fn simulation_and_encoding() {
        let tm = step_right();
        let p = TmReductionParams::new(&tm, 2, &["a"], false).unwrap();
        let sim = simulate_tm(&tm, &p, 5).unwrap();
        assert_eq!(sim.accepts_within, Some(1));
        assert_eq!(sim.trace.len(), 2);
        assert_eq!(sim.trace[1], vec![tm.plain(0), tm.head(0, 1)]);
        let w = encode_computation(&tm, &p, 1).unwrap();
        assert_eq!(w.len(), 11);
        let sigma = tm_alphabet(&tm);
        assert_eq!(sigma.render(&w), "[_] 0 0 [_@f] 0 0 $ 0 0 $ 0");

        let p1 = TmReductionParams::new(&tm, 1, &["a"], false).unwrap();
        assert_eq!(simulate_tm(&tm, &p1, 1), Err(Error::SpaceBoundViolated { step: 1 }));
    }

    #[test]
    fn left_edge() {
        let tm = TuringMachineSpec::new(
            "left",
            &["_"],
            "_",
            &["s"],
            "s",
            &[],
            vec![rule("s", "_", "_", Move::L, "s")],
        )
        .unwrap();
        let p = TmReductionParams::new::<&str>(&tm, 2, &[], false).unwrap();
        assert_eq!(simulate_tm(&tm, &p, 3), Err(Error::LeftEdgeViolated { step: 1 }));
    }

    #[test]
    fn no_final_states_never_accept() {
        let tm = TuringMachineSpec::new("idle", &["_", "a"], "_", &["s"], "s", &[], vec![]).unwrap();
        let p = TmReductionParams::new(&tm, 3, &["a"], false).unwrap();
        let sim = simulate_tm(&tm, &p, 4).unwrap();
        assert_eq!(sim.accepts_within, None);
        assert!(sim.trace.iter().all(|c| c.len() == 3));
        assert!(sim
            .trace
            .iter()
            .all(|c| c.iter().filter(|&&d| tm.decode(d).1.is_some()).count() == 1));
    }

    #[test]
    fn machine_validation() {
        let bad = TuringMachineSpec::new("x", &["_"], "b", &["s"], "s", &[], vec![]);
        assert!(matches!(bad, Err(Error::InvalidMachine { .. })));
        let clash = TuringMachineSpec::new(
            "x",
            &["_"],
            "_",
            &["s"],
            "s",
            &[],
            vec![rule("s", "_", "_", Move::L, "s"), rule("s", "_", "_", Move::R, "s")],
        );
        assert!(matches!(clash, Err(Error::InvalidMachine { .. })));
        // "[a@b]" would name both (a, b) and the plain symbol "a@b"
        let ambiguous = TuringMachineSpec::new("x", &["a", "a@b"], "a", &["b"], "b", &[], vec![]);
        assert!(matches!(ambiguous, Err(Error::InvalidMachine { .. })));
    }
}
