//! Word problem instances built from binary DFAs: intersection emptiness
//! for lists of DFAs and emptiness for a single DFA.

use std::collections::{HashSet, VecDeque};

use crate::acceptor::{Acceptor, AcceptorBuilder};
use crate::error::{Error, Result};
use crate::mealy::{Alphabet, Letter, MealyBuilder, StateId, StateSequence};
use crate::word_problem::WordProblemInstance;

const BINARY: [&str; 2] = ["0", "1"];

/// Non-empty list of complete deterministic acceptors over `{0, 1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DfaList {
    dfas: Vec<Acceptor>,
}

fn malformed(dfa: &Acceptor, reason: &str) -> Error {
    Error::MalformedDfa { name: dfa.name().to_string(), reason: reason.to_string() }
}

/// Checks that `dfa` is a complete DFA over exactly `{0, 1}` and returns it
/// re-indexed so that `0` and `1` are letters 0 and 1.
pub fn validate_binary_dfa(dfa: &Acceptor) -> Result<Acceptor> {
    let mut toks: Vec<&str> = dfa.alphabet().tokens().iter().map(String::as_str).collect();
    toks.sort_unstable();
    if toks != BINARY {
        return Err(malformed(dfa, "alphabet must be exactly {0, 1}"));
    }
    if dfa.initial().len() != 1 {
        return Err(malformed(dfa, "needs exactly one initial state"));
    }
    if !dfa.is_deterministic() {
        return Err(malformed(dfa, "not deterministic"));
    }
    if !dfa.is_complete() {
        return Err(malformed(dfa, "not complete"));
    }
    dfa.over_alphabet(&Alphabet::new(BINARY).expect("fixed alphabet"))
}

impl DfaList {
    pub fn new(dfas: Vec<Acceptor>) -> Result<Self> {
        if dfas.is_empty() {
            return Err(Error::InvalidParams("at least one DFA is required".into()));
        }
        let dfas = dfas.iter().map(validate_binary_dfa).collect::<Result<Vec<_>>>()?;
        Ok(DfaList { dfas })
    }

    pub fn dfas(&self) -> &[Acceptor] {
        &self.dfas
    }

    pub fn len(&self) -> usize {
        self.dfas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dfas.is_empty()
    }

    /// Largest number of states.
    pub fn max_size(&self) -> usize {
        self.dfas.iter().map(Acceptor::num_states).max().unwrap_or(0)
    }
}

fn delta(dfa: &Acceptor, z: usize, a: Letter) -> usize {
    dfa.successors(z, a)[0] as usize
}

/// Whether no word is accepted by every DFA of the list (product search).
pub fn dfa_intersection_empty(d: &DfaList) -> bool {
    let start: Vec<usize> = d.dfas.iter().map(|a| a.initial()[0] as usize).collect();
    let mut seen: HashSet<Vec<usize>> = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    while let Some(tuple) = queue.pop_front() {
        if tuple.iter().zip(&d.dfas).all(|(&z, a)| a.is_final(z)) {
            return false;
        }
        for x in [Letter(0), Letter(1)] {
            let next: Vec<usize> = tuple.iter().zip(&d.dfas).map(|(&z, a)| delta(a, z, x)).collect();
            if seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    true
}

/// Builds the instance `c z_r … z_1` vs `d z_r … z_1` (where `z_k` is the
/// initial state of the `k`-th DFA) whose sides agree everywhere iff the
/// intersection of the languages is empty.
///
/// Automaton parts, with `r` the number of DFAs:
/// * `A{k}.z`: the `k`-th DFA with identity outputs; `#` leads from
///   non-final states to `T{k}'.0` and from final states to `T{k}''.0`.
/// * `T{k}'.i`: reads `{0,1}^r # 1` and rewrites the `k`-th digit `1 → 0`;
///   `T{k}''.i` only checks that digit.
/// * `c`, `c.i`, `c'.i`: after the last `#`-block, turn the trailing `1`
///   into `0` iff the `r`-block contains a `0`. `d`, `d.i` always do.
///
/// With `group`, the missing transitions that make every part a
/// permutation automaton are added and the constraint `{0,1}* # 1^r # 1` is
/// attached.
pub fn reduce_dfa_intersection(d: &DfaList, group: bool) -> Result<WordProblemInstance> {
    let r = d.len();
    let mut b = MealyBuilder::new(if group { "dfa-intersection.group" } else { "dfa-intersection" });
    let zero = b.letter("0")?;
    let one = b.letter("1")?;
    let hash = b.letter("#")?;
    let st = |b: &mut MealyBuilder, name: String| b.state(&name).expect("generated name");

    // the c / d gadget
    let c = st(&mut b, "c".into());
    let ci: Vec<StateId> = (0..=r + 2).map(|i| st(&mut b, format!("c.{i}"))).collect();
    // primed states start at c'.1; slot 0 is a placeholder so that cp[i] is c'.i
    let cp: Vec<StateId> =
        (0..=r + 2).map(|i| if i == 0 { c } else { st(&mut b, format!("c'.{i}")) }).collect();
    let dd = st(&mut b, "d".into());
    let di: Vec<StateId> = (0..=r + 2).map(|i| st(&mut b, format!("d.{i}"))).collect();
    b.identity_edges(c, &[zero, one], c)?;
    b.set(c, hash, hash, ci[0])?;
    for i in 0..r {
        b.set(ci[i], one, one, ci[i + 1])?;
        b.set(ci[i], zero, zero, cp[i + 1])?;
        if i >= 1 {
            b.identity_edges(cp[i], &[zero, one], cp[i + 1])?;
        }
    }
    b.set(ci[r], hash, hash, ci[r + 1])?;
    b.set(ci[r + 1], one, one, ci[r + 2])?;
    b.set(cp[r], hash, hash, cp[r + 1])?;
    b.set(cp[r + 1], one, zero, cp[r + 2])?;
    b.identity_edges(dd, &[zero, one], dd)?;
    b.set(dd, hash, hash, di[0])?;
    for i in 0..r {
        b.identity_edges(di[i], &[zero, one], di[i + 1])?;
    }
    b.set(di[r], hash, hash, di[r + 1])?;
    b.set(di[r + 1], one, zero, di[r + 2])?;
    if group {
        for i in 0..r {
            b.set(ci[i], hash, hash, ci[i + 1])?;
            b.set(di[i], hash, hash, di[i + 1])?;
            if i >= 1 {
                b.set(cp[i], hash, hash, cp[i + 1])?;
            }
        }
        for path in [&ci, &cp, &di] {
            b.identity_edges(path[r], &[zero, one], path[r + 1])?;
            b.identity_edges(path[r + 2], &[zero, one, hash], path[r + 2])?;
        }
        b.identity_edges(ci[r + 1], &[zero, hash], ci[r + 2])?;
        for path in [&cp, &di] {
            b.set(path[r + 1], zero, one, path[r + 2])?;
            b.set(path[r + 1], hash, hash, path[r + 2])?;
        }
    }

    let mut initials = Vec::with_capacity(r);
    for (idx, dfa) in d.dfas.iter().enumerate() {
        let k = idx + 1;
        let checker = |b: &mut MealyBuilder, primes: &str, flip: bool| -> Result<Vec<StateId>> {
            let p: Vec<StateId> =
                (0..=r + 2).map(|i| b.state(&format!("T{k}{primes}.{i}")).expect("generated name")).collect();
            for i in 0..r {
                if i == k - 1 {
                    b.set(p[i], one, if flip { zero } else { one }, p[i + 1])?;
                    if group {
                        b.set(p[i], zero, if flip { one } else { zero }, p[i + 1])?;
                    }
                } else {
                    b.identity_edges(p[i], &[zero, one], p[i + 1])?;
                }
                if group {
                    b.set(p[i], hash, hash, p[i + 1])?;
                }
            }
            b.set(p[r], hash, hash, p[r + 1])?;
            b.set(p[r + 1], one, one, p[r + 2])?;
            if group {
                b.identity_edges(p[r], &[zero, one], p[r + 1])?;
                b.identity_edges(p[r + 1], &[zero, hash], p[r + 2])?;
                b.identity_edges(p[r + 2], &[zero, one, hash], p[r + 2])?;
            }
            Ok(p)
        };
        let flipping = checker(&mut b, "'", true)?;
        let checking = checker(&mut b, "''", false)?;
        let ids: Vec<StateId> = (0..dfa.num_states())
            .map(|z| b.state(&format!("A{k}.{}", dfa.state_name(z))))
            .collect::<Result<_>>()?;
        for (z, a, t) in dfa.transitions() {
            b.set(ids[z], a, a, ids[t])?;
        }
        for (z, &id) in ids.iter().enumerate() {
            let target = if dfa.is_final(z) { checking[0] } else { flipping[0] };
            b.set(id, hash, hash, target)?;
        }
        initials.push(ids[dfa.initial()[0] as usize]);
    }
    let automaton = b.build()?;
    let tail = initials.iter().rev().copied();
    let lhs = StateSequence::plain(std::iter::once(c).chain(tail.clone()));
    let rhs = StateSequence::plain(std::iter::once(dd).chain(tail));
    let constraints = if group { vec![block_constraint(r)?] } else { vec![] };
    WordProblemInstance::new(automaton, lhs, rhs, constraints)
}

/// Acceptor for `{0,1}* # 1^r # 1`.
pub fn block_constraint(r: usize) -> Result<Acceptor> {
    let mut b = AcceptorBuilder::new("C");
    for t in ["0", "1", "#"] {
        b.letter(t)?;
    }
    let s = b.state("s")?;
    let p: Vec<usize> = (0..=r).map(|i| b.state(&format!("p{i}"))).collect::<Result<_>>()?;
    let h = b.state("h")?;
    let f = b.state("f")?;
    b.transition("s", "0", "s")?;
    b.transition("s", "1", "s")?;
    b.transition("s", "#", "p0")?;
    let one = b.lookup_letter("1")?;
    let hash = b.lookup_letter("#")?;
    for i in 0..r {
        b.add(p[i], one, p[i + 1]);
    }
    b.add(p[r], hash, h);
    b.add(h, one, f);
    b.set_initial(s);
    b.set_final(f);
    b.build()
}

/// `T_A` with `z0` vs the identity: states of `A` copy their input, except
/// that final states swap `0` and `1`. The sides agree iff `L(A)` is empty.
pub fn reduce_dfa_emptiness(dfa: &Acceptor) -> Result<WordProblemInstance> {
    let dfa = validate_binary_dfa(dfa)?;
    let mut b = MealyBuilder::new(format!("T.{}", dfa.name()));
    b.letter("0")?;
    b.letter("1")?;
    let ids: Vec<StateId> =
        (0..dfa.num_states()).map(|z| b.state(dfa.state_name(z))).collect::<Result<_>>()?;
    for (z, a, t) in dfa.transitions() {
        let out = if dfa.is_final(z) { Letter(1 - a.0) } else { a };
        b.set(ids[z], a, out, ids[t])?;
    }
    let automaton = b.build()?;
    let lhs = StateSequence::plain([ids[dfa.initial()[0] as usize]]);
    WordProblemInstance::new(automaton, lhs, StateSequence::identity(), vec![])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word_problem::{decide, verify_witness};

    /// DFA over {0,1} from a table `(name, final, succ on 0, succ on 1)`.
    pub(crate) fn dfa(name: &str, rows: &[(&str, bool, &str, &str)]) -> Acceptor {
        let mut b = AcceptorBuilder::new(name);
        b.letter("0").unwrap();
        b.letter("1").unwrap();
        for (s, fin, _, _) in rows {
            let z = b.state(s).unwrap();
            if *fin {
                b.set_final(z);
            }
        }
        for (s, _, t0, t1) in rows {
            b.transition(s, "0", t0).unwrap();
            b.transition(s, "1", t1).unwrap();
        }
        b.set_initial(0);
        b.build().unwrap()
    }

    fn empty_dfa() -> Acceptor {
        dfa("none", &[("z", false, "z", "z")])
    }

    fn epsilon_dfa() -> Acceptor {
        dfa("eps", &[("s", true, "x", "x"), ("x", false, "x", "x")])
    }

    fn render(inst: &WordProblemInstance, w: &[Letter]) -> String {
        inst.automaton().alphabet().render(w)
    }

    #[test]
    fn empty_language_gives_equal() {
        let list = DfaList::new(vec![empty_dfa()]).unwrap();
        assert!(dfa_intersection_empty(&list));
        for group in [false, true] {
            let inst = reduce_dfa_intersection(&list, group).unwrap();
            assert!(decide(&inst, None).unwrap().is_equal());
        }
    }

    #[test]
    fn epsilon_language_witness() {
        let list = DfaList::new(vec![epsilon_dfa()]).unwrap();
        for group in [false, true] {
            let inst = reduce_dfa_intersection(&list, group).unwrap();
            let v = decide(&inst, None).unwrap();
            assert_eq!(render(&inst, v.witness.as_ref().unwrap()), "# 1 # 1");
            assert!(verify_witness(&inst, &v));
        }
    }

    #[test]
    fn zero_star_and_one_star() {
        let zs = dfa("zs", &[("a", true, "a", "x"), ("x", false, "x", "x")]);
        let os = dfa("os", &[("a", true, "x", "a"), ("x", false, "x", "x")]);
        let list = DfaList::new(vec![zs, os]).unwrap();
        assert!(!dfa_intersection_empty(&list));
        let inst = reduce_dfa_intersection(&list, false).unwrap();
        assert!(!decide(&inst, None).unwrap().is_equal());
    }

    #[test]
    fn even_zeros_and_odd_zeros() {
        let even = dfa("even", &[("e", true, "o", "x"), ("o", false, "e", "x"), ("x", false, "x", "x")]);
        let odd = dfa("odd", &[("e", false, "o", "x"), ("o", true, "e", "x"), ("x", false, "x", "x")]);
        assert!(dfa_intersection_empty(&DfaList::new(vec![even, odd]).unwrap()));
    }

    #[test]
    fn group_variant_is_group() {
        let list = DfaList::new(vec![epsilon_dfa(), empty_dfa(), epsilon_dfa()]).unwrap();
        let g = reduce_dfa_intersection(&list, true).unwrap();
        assert!(g.automaton().check_properties().is_g_automaton);
        let s = reduce_dfa_intersection(&list, false).unwrap();
        assert!(s.automaton().check_properties().is_s_bar_automaton);
    }

    #[test]
    fn malformed_inputs() {
        let mut b = AcceptorBuilder::new("partial");
        b.letter("0").unwrap();
        b.letter("1").unwrap();
        let z = b.state("z").unwrap();
        b.transition("z", "0", "z").unwrap();
        b.set_initial(z);
        let partial = b.build().unwrap();
        assert!(matches!(DfaList::new(vec![partial.clone()]), Err(Error::MalformedDfa { .. })));
        assert!(matches!(reduce_dfa_emptiness(&partial), Err(Error::MalformedDfa { .. })));
        assert!(DfaList::new(vec![]).is_err());
    }

    #[test]
    fn emptiness_examples() {
        let inst = reduce_dfa_emptiness(&empty_dfa()).unwrap();
        assert!(decide(&inst, None).unwrap().is_equal());
        assert!(inst.automaton().check_properties().is_g_automaton);

        let all = dfa("all", &[("z", true, "z", "z")]);
        let inst = reduce_dfa_emptiness(&all).unwrap();
        let v = decide(&inst, None).unwrap();
        assert_eq!(render(&inst, v.witness.as_ref().unwrap()), "0");

        let odd = dfa("odd", &[("e", false, "o", "o"), ("o", true, "e", "e")]);
        let inst = reduce_dfa_emptiness(&odd).unwrap();
        assert_eq!(decide(&inst, None).unwrap().witness.unwrap().len(), 2);
    }
}
