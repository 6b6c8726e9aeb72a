//! The (constrained) word problem: do two state sequences induce the same
//! partial map on every word of the constraint intersection?
//!
//! [`decide`] runs a breadth-first search over product configurations: the
//! cross-states of both sequences (or a dead marker), one subset of states
//! per constraint acceptor, and a flag recording whether the outputs have
//! already differed. [`oracle_decide`] enumerates words directly.

use std::collections::HashSet;
use std::fmt;

use indexmap::IndexSet;

use crate::acceptor::Acceptor;
use crate::error::{Error, Result};
use crate::mealy::{ActOutcome, Letter, MealyAutomaton, SignedState, StateId, StateSequence};

const DEAD: u32 = u32::MAX;

/// Two sequences over one automaton, compared on the words accepted by
/// every constraint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordProblemInstance {
    automaton: MealyAutomaton,
    lhs: StateSequence,
    rhs: StateSequence,
    constraints: Vec<Acceptor>,
}

impl WordProblemInstance {
    /// Validates the sequences and re-indexes every constraint over the
    /// automaton's alphabet. A constraint may use a subset of that alphabet.
    pub fn new(
        automaton: MealyAutomaton,
        lhs: StateSequence,
        rhs: StateSequence,
        constraints: Vec<Acceptor>,
    ) -> Result<Self> {
        for s in lhs.items().iter().chain(rhs.items()) {
            if s.base.index() >= automaton.num_states() {
                return Err(Error::UnknownState(format!("#{}", s.base.0)));
            }
            if s.inverted && !automaton.is_inverse_deterministic() {
                return Err(Error::NotInverseDeterministic(automaton.name().to_string()));
            }
        }
        let constraints = constraints
            .iter()
            .map(|c| {
                if c.alphabet() == automaton.alphabet() {
                    Ok(c.clone())
                } else {
                    c.over_alphabet(automaton.alphabet())
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(WordProblemInstance { automaton, lhs, rhs, constraints })
    }

    pub fn automaton(&self) -> &MealyAutomaton {
        &self.automaton
    }

    pub fn lhs(&self) -> &StateSequence {
        &self.lhs
    }

    pub fn rhs(&self) -> &StateSequence {
        &self.rhs
    }

    pub fn constraints(&self) -> &[Acceptor] {
        &self.constraints
    }

    /// The same comparison with the sides exchanged.
    pub fn swapped(&self) -> Self {
        WordProblemInstance {
            automaton: self.automaton.clone(),
            lhs: self.rhs.clone(),
            rhs: self.lhs.clone(),
            constraints: self.constraints.clone(),
        }
    }

    pub fn in_constraints(&self, u: &[Letter]) -> bool {
        self.constraints.iter().all(|c| c.accepts(u))
    }

    pub fn lhs_value(&self, u: &[Letter]) -> PartialValue {
        value_of(&self.automaton, &self.lhs, u)
    }

    pub fn rhs_value(&self, u: &[Letter]) -> PartialValue {
        value_of(&self.automaton, &self.rhs, u)
    }
}

fn value_of(a: &MealyAutomaton, seq: &StateSequence, u: &[Letter]) -> PartialValue {
    match a.act_word(seq, u).expect("validated instance") {
        ActOutcome::Defined { output, .. } => PartialValue::Defined(output),
        ActOutcome::UndefinedAt(_) => PartialValue::Undefined,
    }
}

/// Value of a partial map on one word.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PartialValue {
    Defined(Vec<Letter>),
    Undefined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VerdictKind {
    Equal,
    NotEqual,
}

impl fmt::Display for VerdictKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VerdictKind::Equal => "EQUAL",
            VerdictKind::NotEqual => "NOT-EQUAL",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub kind: VerdictKind,
    /// Shortest, then token-lexicographically least, distinguishing word.
    pub witness: Option<Vec<Letter>>,
    pub lhs_value: Option<PartialValue>,
    pub rhs_value: Option<PartialValue>,
    /// Set by the oracle when `Equal` only holds up to its length bound.
    pub bounded: bool,
    /// Configurations (decider) or residual classes (oracle) visited.
    pub explored: usize,
}

impl Verdict {
    fn equal(bounded: bool, explored: usize) -> Self {
        Verdict {
            kind: VerdictKind::Equal,
            witness: None,
            lhs_value: None,
            rhs_value: None,
            bounded,
            explored,
        }
    }

    fn not_equal(inst: &WordProblemInstance, witness: Vec<Letter>, explored: usize) -> Self {
        Verdict {
            kind: VerdictKind::NotEqual,
            lhs_value: Some(inst.lhs_value(&witness)),
            rhs_value: Some(inst.rhs_value(&witness)),
            witness: Some(witness),
            bounded: false,
            explored,
        }
    }

    pub fn is_equal(&self) -> bool {
        self.kind == VerdictKind::Equal
    }
}

/// Re-checks a `NotEqual` verdict against the instance by direct simulation.
pub fn verify_witness(inst: &WordProblemInstance, verdict: &Verdict) -> bool {
    let Some(u) = &verdict.witness else {
        return verdict.kind == VerdictKind::Equal;
    };
    let (l, r) = (inst.lhs_value(u), inst.rhs_value(u));
    inst.in_constraints(u)
        && l != r
        && verdict.lhs_value.as_ref() == Some(&l)
        && verdict.rhs_value.as_ref() == Some(&r)
}

/// Layout of a configuration key:
/// `[lhs bases][rhs bases][acceptor bitsets][diverged]`.
struct Layout {
    n: usize,
    m: usize,
    // (offset, words) per acceptor
    acc: Vec<(usize, usize)>,
    len: usize,
}

impl Layout {
    fn new(inst: &WordProblemInstance) -> Self {
        let (n, m) = (inst.lhs.len(), inst.rhs.len());
        let mut off = n + m;
        let mut acc = Vec::new();
        for c in &inst.constraints {
            let words = c.num_states().div_ceil(32).max(1);
            acc.push((off, words));
            off += words;
        }
        Layout { n, m, acc, len: off + 1 }
    }
}

fn step_side(
    a: &MealyAutomaton,
    seq: &StateSequence,
    states: &mut [u32],
    letter: Letter,
) -> Option<Letter> {
    if states.first() == Some(&DEAD) {
        return None;
    }
    let mut x = letter;
    for (slot, s) in states.iter_mut().zip(seq.items()).rev() {
        let item = SignedState { base: StateId(*slot), inverted: s.inverted };
        match a.step_unchecked(item, x) {
            Some((b, p)) => {
                *slot = p.0;
                x = b;
            }
            None => {
                states.fill(DEAD);
                return None;
            }
        }
    }
    Some(x)
}

fn step_acceptor(c: &Acceptor, src: &[u32], dst: &mut [u32], a: Letter) -> bool {
    dst.fill(0);
    let mut any = false;
    for (w, &bits) in src.iter().enumerate() {
        let mut bits = bits;
        while bits != 0 {
            let z = w * 32 + bits.trailing_zeros() as usize;
            bits &= bits - 1;
            for &t in c.successors(z, a) {
                dst[t as usize / 32] |= 1 << (t % 32);
                any = true;
            }
        }
    }
    any
}

fn acceptor_accepts(c: &Acceptor, bits: &[u32]) -> bool {
    c.finals().any(|z| bits[z / 32] >> (z % 32) & 1 == 1)
}

/// Decides the instance. `max_configs` caps the number of stored
/// configurations; exceeding it is an error, not a verdict.
pub fn decide(inst: &WordProblemInstance, max_configs: Option<usize>) -> Result<Verdict> {
    let a = &inst.automaton;
    let layout = Layout::new(inst);
    let letters = a.alphabet().letters_by_token();
    let alive = |key: &[u32], lo: usize, len: usize| len == 0 || key[lo] != DEAD;

    let mut init = vec![0u32; layout.len];
    for (i, s) in inst.lhs.items().iter().chain(inst.rhs.items()).enumerate() {
        init[i] = s.base.0;
    }
    for (c, &(off, _)) in inst.constraints.iter().zip(&layout.acc) {
        for &z in c.initial() {
            init[off + z as usize / 32] |= 1 << (z % 32);
        }
    }

    let mut seen: IndexSet<Box<[u32]>> = IndexSet::new();
    let mut parent: Vec<(u32, Letter)> = Vec::new();
    seen.insert(init.into_boxed_slice());
    parent.push((u32::MAX, Letter(0)));
    let mut next = vec![0u32; layout.len];
    let mut head = 0;
    while head < seen.len() {
        let cur = seen.get_index(head).expect("queued").clone();
        for &x in &letters {
            next.copy_from_slice(&cur);
            let (lhs, rest) = next.split_at_mut(layout.n);
            let rhs = &mut rest[..layout.m];
            let out_l = step_side(a, &inst.lhs, lhs, x);
            let out_r = step_side(a, &inst.rhs, rhs, x);
            let l_alive = alive(&next, 0, layout.n);
            let r_alive = alive(&next, layout.n, layout.m);
            if !l_alive && !r_alive {
                continue;
            }
            let mut nonempty = true;
            for (c, &(off, words)) in inst.constraints.iter().zip(&layout.acc) {
                let (src, dst) = (&cur[off..off + words], &mut next[off..off + words]);
                if !step_acceptor(c, src, dst, x) {
                    nonempty = false;
                    break;
                }
            }
            if !nonempty {
                continue;
            }
            let last = layout.len - 1;
            if l_alive && r_alive && out_l != out_r {
                next[last] = 1;
            }
            if seen.contains(next.as_slice()) {
                continue;
            }
            let accepted = inst
                .constraints
                .iter()
                .zip(&layout.acc)
                .all(|(c, &(off, words))| acceptor_accepts(c, &next[off..off + words]));
            let witness = accepted && ((l_alive && r_alive && next[last] == 1) || (l_alive != r_alive));
            seen.insert(next.clone().into_boxed_slice());
            parent.push((head as u32, x));
            if witness {
                let mut word = Vec::new();
                let mut i = seen.len() - 1;
                while parent[i].0 != u32::MAX {
                    word.push(parent[i].1);
                    i = parent[i].0 as usize;
                }
                word.reverse();
                return Ok(Verdict::not_equal(inst, word, seen.len()));
            }
            if let Some(budget) = max_configs {
                if seen.len() > budget {
                    return Err(Error::ConfigBudgetExceeded { budget });
                }
            }
        }
        head += 1;
    }
    Ok(Verdict::equal(false, seen.len()))
}

/// Size of the configuration space searched by [`decide`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConfigBound {
    pub value: u64,
    pub saturated: bool,
}

/// `(|Q| + 1)^(n + m) · ∏ 2^|Z_k| · 2`, saturating at `u64::MAX`.
pub fn config_bound(inst: &WordProblemInstance) -> ConfigBound {
    let mut value: u64 = 2;
    let mut saturated = false;
    let base = inst.automaton.num_states() as u64 + 1;
    let factors = std::iter::repeat_n(base, inst.lhs.len() + inst.rhs.len())
        .map(Some)
        .chain(inst.constraints.iter().map(|c| 1u64.checked_shl(c.num_states() as u32)));
    for f in factors {
        match f.and_then(|f| value.checked_mul(f)) {
            Some(v) => value = v,
            None => {
                saturated = true;
                value = u64::MAX;
                break;
            }
        }
    }
    ConfigBound { value, saturated }
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct Residual {
    lhs: Option<StateSequence>,
    rhs: Option<StateSequence>,
    acceptors: Vec<Vec<bool>>,
    differs: bool,
}

/// Enumerates words of length at most `max_len` in length-then-token-lex
/// order and returns the first one on which the sides differ.
///
/// Prefixes on which both sides are undefined are not extended. With
/// `memoize`, a prefix is also dropped when an earlier prefix reached the
/// same residual (cross-states, acceptor state sets, and whether the outputs
/// already differ); every continuation of the later prefix then has an
/// earlier counterpart, so the first witness is unchanged.
pub fn oracle_decide_with(inst: &WordProblemInstance, max_len: u64, memoize: bool) -> Verdict {
    let a = &inst.automaton;
    let letters = a.alphabet().letters_by_token();
    let mut seen: HashSet<Residual> = HashSet::new();
    let mut layer: Vec<Vec<Letter>> = vec![Vec::new()];
    let mut explored = 1;
    let mut len = 0u64;
    while len < max_len && !layer.is_empty() {
        let mut next_layer = Vec::new();
        for w in &layer {
            for &x in &letters {
                let mut u = w.clone();
                u.push(x);
                let lo = a.act_word(&inst.lhs, &u).expect("validated instance");
                let ro = a.act_word(&inst.rhs, &u).expect("validated instance");
                let member = inst.in_constraints(&u);
                let differs = match (&lo, &ro) {
                    (
                        ActOutcome::Defined { output: o1, .. },
                        ActOutcome::Defined { output: o2, .. },
                    ) => o1 != o2,
                    (ActOutcome::UndefinedAt(_), ActOutcome::UndefinedAt(_)) => false,
                    _ => true,
                };
                if member && differs {
                    return Verdict::not_equal(inst, u, explored);
                }
                if !lo.is_defined() && !ro.is_defined() {
                    continue;
                }
                if memoize {
                    let sets = inst
                        .constraints
                        .iter()
                        .map(|c| u.iter().fold(c.initial_set(), |s, &y| c.step_set(&s, y)))
                        .collect::<Vec<_>>();
                    if sets.iter().any(|s| !s.contains(&true)) {
                        continue;
                    }
                    let state_of = |o: ActOutcome| match o {
                        ActOutcome::Defined { state, .. } => Some(state),
                        ActOutcome::UndefinedAt(_) => None,
                    };
                    let key = Residual {
                        lhs: state_of(lo),
                        rhs: state_of(ro),
                        acceptors: sets,
                        differs,
                    };
                    if !seen.insert(key) {
                        continue;
                    }
                }
                explored += 1;
                next_layer.push(u);
            }
        }
        layer = next_layer;
        len += 1;
    }
    Verdict::equal(!layer.is_empty(), explored)
}

/// Plain enumeration oracle: every word up to `max_len` that keeps at least
/// one side defined is visited.
pub fn oracle_decide(inst: &WordProblemInstance, max_len: u64) -> Verdict {
    oracle_decide_with(inst, max_len, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::acceptor::AcceptorBuilder;
    use crate::gadgets::{build_gadget, DualVariant, GadgetId};

    fn inst(a: &MealyAutomaton, lhs: &[&str], rhs: &[&str]) -> WordProblemInstance {
        let l = a.parse_sequence(lhs).unwrap();
        let r = a.parse_sequence(rhs).unwrap();
        WordProblemInstance::new(a.clone(), l, r, vec![]).unwrap()
    }

    fn d() -> MealyAutomaton {
        build_gadget(GadgetId::DualAdding(DualVariant::D))
    }

    fn witness_str(a: &MealyAutomaton, v: &Verdict) -> String {
        a.alphabet().render(v.witness.as_ref().unwrap())
    }

    #[test]
    fn neutral_element() {
        let a = build_gadget(GadgetId::AddingMachine);
        let v = decide(&inst(&a, &["+0"], &[]), None).unwrap();
        assert!(v.is_equal());
    }

    #[test]
    fn dual_adding_separation_n2() {
        let a = d();
        let i = inst(&a, &["0", "0"], &["0"]);
        let v = decide(&i, None).unwrap();
        assert_eq!(v.kind, VerdictKind::NotEqual);
        assert_eq!(witness_str(&a, &v), "a a");
        assert!(verify_witness(&i, &v));
        assert!(oracle_decide(&i, 1).is_equal());
        assert!(oracle_decide(&i, 1).bounded);
        let o = oracle_decide(&i, 2);
        assert_eq!(o.witness, v.witness);
    }

    #[test]
    fn idempotent_b() {
        let a = build_gadget(GadgetId::FreeSemigroup { partial: true });
        assert!(decide(&inst(&a, &["b", "b"], &["b"]), None).unwrap().is_equal());
    }

    #[test]
    fn constrained_to_b_star() {
        let a = d();
        let mut b = AcceptorBuilder::new("bstar");
        b.letter("a").unwrap();
        b.letter("b").unwrap();
        let z = b.state("z").unwrap();
        b.transition("z", "b", "z").unwrap();
        b.set_initial(z);
        b.set_final(z);
        let c = b.build().unwrap();
        let l = a.parse_sequence(&["0"]).unwrap();
        let r = a.parse_sequence(&["1"]).unwrap();
        let i = WordProblemInstance::new(a.clone(), l.clone(), r.clone(), vec![c]).unwrap();
        assert!(decide(&i, None).unwrap().is_equal());
        let free = WordProblemInstance::new(a, l, r, vec![]).unwrap();
        assert!(!decide(&free, None).unwrap().is_equal());
    }

    #[test]
    fn config_bound_examples() {
        let a = d();
        assert_eq!(config_bound(&inst(&a, &["0", "0"], &["0"])).value, 54);
        assert_eq!(config_bound(&inst(&a, &[], &[])).value, 2);
        let add = build_gadget(GadgetId::AddingMachine);
        let b = config_bound(&inst(&add, &["+1"], &[]));
        assert_eq!(b, ConfigBound { value: 6, saturated: false });
        let long: Vec<&str> = std::iter::repeat_n("0", 80).collect();
        assert!(config_bound(&inst(&a, &long, &[])).saturated);
    }

    #[test]
    fn syntactically_equal_sides() {
        let a = d();
        let i = inst(&a, &["0", "1"], &["0", "1"]);
        assert!(oracle_decide(&i, 6).is_equal());
        assert!(decide(&i, None).unwrap().is_equal());
    }

    #[test]
    fn budget_is_reported() {
        let a = d();
        let seq: Vec<&str> = std::iter::repeat_n("0", 6).collect();
        let i = inst(&a, &seq, &seq[1..]);
        assert_eq!(decide(&i, Some(4)), Err(Error::ConfigBudgetExceeded { budget: 4 }));
    }

    #[test]
    fn defined_against_undefined_is_a_difference() {
        let a = build_gadget(GadgetId::FreeSemigroup { partial: true });
        let i = inst(&a, &["b", "a"], &["b"]);
        let v = decide(&i, None).unwrap();
        assert_eq!(witness_str(&a, &v), "b");
        assert_eq!(v.lhs_value, Some(PartialValue::Undefined));
        assert!(verify_witness(&i, &v));
        assert_eq!(oracle_decide_with(&i, 3, true).witness, v.witness);
    }
}
