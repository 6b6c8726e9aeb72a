//! Small example automata and the exponential-separation family.

use crate::error::Result;
use crate::mealy::{Letter, MealyAutomaton, MealyBuilder, StateSequence};
use crate::word_problem::{decide, VerdictKind, WordProblemInstance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DualVariant {
    D,
    DPrime,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GadgetId {
    /// Binary odometer: `+1` adds one to a least-significant-first number.
    AddingMachine,
    /// `q ∘ u` is `q` followed by `u` without its last letter. The partial
    /// version drops `b –a/b→ a`.
    FreeSemigroup { partial: bool },
    /// Bireversible but not inverse-deterministic.
    BireversibleExample,
    /// Dual of the adding machine (`D`), optionally with an extra state `q`
    /// that rewrites every `a` into `b` (`D'`).
    DualAdding(DualVariant),
}

impl GadgetId {
    pub const ALL: [GadgetId; 6] = [
        GadgetId::AddingMachine,
        GadgetId::FreeSemigroup { partial: false },
        GadgetId::FreeSemigroup { partial: true },
        GadgetId::BireversibleExample,
        GadgetId::DualAdding(DualVariant::D),
        GadgetId::DualAdding(DualVariant::DPrime),
    ];
}

fn from_table(name: &str, letters: &[&str], states: &[&str], edges: &[(&str, &str, &str, &str)]) -> MealyAutomaton {
    let mut b = MealyBuilder::new(name);
    for l in letters {
        b.add_letter(l).expect("fixed letters");
    }
    for s in states {
        b.add_state(s).expect("fixed states");
    }
    for (q, a, out, p) in edges {
        b.transition(q, a, out, p).expect("fixed transitions");
    }
    b.build().expect("fixed automaton")
}

pub fn build_gadget(id: GadgetId) -> MealyAutomaton {
    match id {
        GadgetId::AddingMachine => from_table(
            "adding",
            &["0", "1"],
            &["+1", "+0"],
            &[
                ("+1", "0", "1", "+0"),
                ("+1", "1", "0", "+1"),
                ("+0", "0", "0", "+0"),
                ("+0", "1", "1", "+0"),
            ],
        ),
        GadgetId::FreeSemigroup { partial } => {
            let mut edges = vec![
                ("a", "a", "a", "a"),
                ("a", "b", "a", "b"),
                ("b", "b", "b", "b"),
            ];
            if !partial {
                edges.push(("b", "a", "b", "a"));
            }
            let name = if partial { "free-partial" } else { "free" };
            from_table(name, &["a", "b"], &["a", "b"], &edges)
        }
        GadgetId::BireversibleExample => from_table(
            "fig1",
            &["a", "b", "c"],
            &["r", "s", "t"],
            &[("r", "a", "b", "s"), ("r", "c", "b", "t")],
        ),
        GadgetId::DualAdding(variant) => {
            let mut states = vec!["0", "1"];
            let mut edges = vec![
                ("0", "a", "b", "1"),
                ("0", "b", "b", "0"),
                ("1", "a", "a", "0"),
                ("1", "b", "b", "1"),
            ];
            let name = match variant {
                DualVariant::D => "D",
                DualVariant::DPrime => {
                    states.push("q");
                    edges.push(("q", "a", "b", "q"));
                    edges.push(("q", "b", "b", "q"));
                    "D'"
                }
            };
            from_table(name, &["a", "b"], &states, &edges)
        }
    }
}

/// The instance `0^n` vs `0^(n-1)` on `D`, or `0^(n-1)` vs `q` on `D'`.
pub fn separation_instance(variant: DualVariant, n: usize) -> WordProblemInstance {
    assert!(n >= 1, "separation needs n >= 1");
    let a = build_gadget(GadgetId::DualAdding(variant));
    let zero = a.state("0").expect("gadget state");
    let (lhs, rhs) = match variant {
        DualVariant::D => (vec![zero; n], vec![zero; n - 1]),
        DualVariant::DPrime => (vec![zero; n - 1], vec![a.state("q").expect("gadget state")]),
    };
    WordProblemInstance::new(a, StateSequence::plain(lhs), StateSequence::plain(rhs), vec![])
        .expect("gadget instance")
}

fn separation(variant: DualVariant, n: usize) -> Result<(usize, Vec<Letter>)> {
    let inst = separation_instance(variant, n);
    let verdict = decide(&inst, None)?;
    assert_eq!(verdict.kind, VerdictKind::NotEqual);
    let witness = verdict.witness.expect("not-equal verdict has a witness");
    assert_eq!(witness.len(), 1usize << (n - 1));
    Ok((witness.len(), witness))
}

/// Shortest word separating `0^n` from `0^(n-1)` in `D`; its length is
/// `2^(n-1)`.
pub fn separation_witness(n: usize) -> Result<(usize, Vec<Letter>)> {
    separation(DualVariant::D, n)
}

/// Shortest word separating `0^(n-1)` from `q` in `D'`; its length is
/// `2^(n-1)`.
pub fn separation_witness_dprime(n: usize) -> Result<(usize, Vec<Letter>)> {
    separation(DualVariant::DPrime, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mealy::ActOutcome;

    #[test]
    fn gadget_shapes() {
        let add = build_gadget(GadgetId::AddingMachine);
        assert_eq!(add.num_states(), 2);
        assert!(add.check_properties().is_g_automaton);

        let d = build_gadget(GadgetId::DualAdding(DualVariant::D));
        let seq = d.parse_sequence(&["0"]).unwrap();
        let out = d.act_word(&seq, &d.alphabet().parse_str("a a").unwrap()).unwrap();
        assert_eq!(d.alphabet().render(out.output().unwrap()), "b a");

        let free = build_gadget(GadgetId::FreeSemigroup { partial: true });
        let b = free.state("b").unwrap();
        let out_edges = free.transitions().filter(|t| t.0 == b).count();
        assert_eq!(out_edges, 1);
    }

    #[test]
    fn separation_small() {
        let d = build_gadget(GadgetId::DualAdding(DualVariant::D));
        let (len, w) = separation_witness(1).unwrap();
        assert_eq!((len, d.alphabet().render(&w)), (1, "a".to_string()));
        let (len, w) = separation_witness(2).unwrap();
        assert_eq!((len, d.alphabet().render(&w)), (2, "a a".to_string()));
        assert_eq!(separation_witness(5).unwrap().0, 16);
        assert_eq!(separation_witness_dprime(1).unwrap().0, 1);
        assert_eq!(separation_witness_dprime(2).unwrap().0, 2);
        assert_eq!(separation_witness_dprime(6).unwrap().0, 32);
    }

    // A k-digit sequence over {0, 1} read with the rightmost digit least
    // significant.
    fn encode(d: &MealyAutomaton, k: usize, i: usize) -> StateSequence {
        let names: Vec<String> = (0..k).rev().map(|bit| ((i >> bit) & 1).to_string()).collect();
        d.parse_sequence(&names).unwrap()
    }

    #[test]
    fn counter_law() {
        let d = build_gadget(GadgetId::DualAdding(DualVariant::D));
        let a = d.alphabet().parse_str("a").unwrap();
        let b = d.alphabet().parse_str("b").unwrap();
        for k in 1..=5 {
            for i in 0..(1usize << k) - 1 {
                let seq = encode(&d, k, i);
                assert_eq!(
                    d.act_word(&seq, &a).unwrap(),
                    ActOutcome::Defined { output: b.clone(), state: encode(&d, k, i + 1) }
                );
                assert_eq!(
                    d.act_word(&seq, &b).unwrap(),
                    ActOutcome::Defined { output: b.clone(), state: seq.clone() }
                );
            }
        }
    }
}
