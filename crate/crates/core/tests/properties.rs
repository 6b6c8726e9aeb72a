use autosemi::gadgets::{build_gadget, GadgetId};
use autosemi::{
    decide, oracle_decide_with, AcceptorBuilder, ActOutcome, Letter, MealyAutomaton, MealyBuilder,
    StateId, StateSequence, WordProblemInstance,
};
use proptest::prelude::*;

const LETTERS: [&str; 2] = ["a", "b"];

/// Per (state, letter): `None` or `(output, target)`.
type Table = Vec<Option<(u32, u32)>>;

fn table(states: usize) -> impl Strategy<Value = Table> {
    let cell = proptest::option::weighted(0.8, (0..2u32, 0..states as u32));
    proptest::collection::vec(cell, states * 2)
}

fn automaton(states: usize, t: &Table) -> MealyAutomaton {
    let mut b = MealyBuilder::new("rand");
    for l in LETTERS {
        b.add_letter(l).unwrap();
    }
    for q in 0..states {
        b.add_state(&format!("q{q}")).unwrap();
    }
    for (i, cell) in t.iter().enumerate() {
        if let Some((out, to)) = *cell {
            b.set(StateId((i / 2) as u32), Letter((i % 2) as u32), Letter(out), StateId(to)).unwrap();
        }
    }
    b.build().unwrap()
}

/// Random partial automaton whose states are injective on letters.
fn invertible(states: usize) -> impl Strategy<Value = MealyAutomaton> {
    let row = (any::<bool>(), proptest::collection::vec((any::<bool>(), 0..states as u32), 2));
    proptest::collection::vec(row, states).prop_map(move |rows| {
        let t: Table = rows
            .iter()
            .flat_map(|(swap, cells)| {
                cells.iter().enumerate().map(move |(a, &(keep, to))| {
                    keep.then_some((a as u32 ^ *swap as u32, to))
                })
            })
            .collect();
        automaton(states, &t)
    })
}

fn any_automaton() -> impl Strategy<Value = MealyAutomaton> {
    (1..=3usize).prop_flat_map(|n| table(n).prop_map(move |t| automaton(n, &t)))
}

fn sequence(a: &MealyAutomaton, ids: &[u32]) -> StateSequence {
    StateSequence::plain(ids.iter().map(|&i| StateId(i % a.num_states() as u32)))
}

fn word(bits: &[bool]) -> Vec<Letter> {
    bits.iter().map(|&b| Letter(b as u32)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn actions_preserve_length_and_prefixes(
        a in any_automaton(),
        ids in proptest::collection::vec(0..3u32, 0..4),
        bits in proptest::collection::vec(any::<bool>(), 0..8),
    ) {
        let seq = sequence(&a, &ids);
        let u = word(&bits);
        let full = a.act_word(&seq, &u).unwrap();
        for cut in 0..=u.len() {
            let part = a.act_word(&seq, &u[..cut]).unwrap();
            match (&full, &part) {
                (ActOutcome::Defined { output, .. }, ActOutcome::Defined { output: p, .. }) => {
                    prop_assert_eq!(output.len(), u.len());
                    prop_assert_eq!(&output[..cut], &p[..]);
                }
                (ActOutcome::UndefinedAt(i), ActOutcome::Defined { .. }) => prop_assert!(*i >= cut),
                (ActOutcome::UndefinedAt(i), ActOutcome::UndefinedAt(j)) => prop_assert_eq!(i, j),
                (ActOutcome::Defined { .. }, ActOutcome::UndefinedAt(_)) => {
                    prop_assert!(false, "prefix undefined but word defined")
                }
            }
        }
    }

    #[test]
    fn inverse_undoes_action(
        a in (1..=3usize).prop_flat_map(invertible),
        ids in proptest::collection::vec(0..3u32, 0..4),
        bits in proptest::collection::vec(any::<bool>(), 0..8),
    ) {
        prop_assert!(a.is_inverse_deterministic());
        let seq = sequence(&a, &ids);
        let u = word(&bits);
        if let ActOutcome::Defined { output, .. } = a.act_word(&seq, &u).unwrap() {
            let back = a.act_word(&seq.inverse(), &output).unwrap();
            prop_assert_eq!(back.output(), Some(&u[..]));
        }
    }

    #[test]
    fn invert_and_dual_are_involutions(a in (1..=3usize).prop_flat_map(invertible), b in any_automaton()) {
        prop_assert!(a.invert().unwrap().invert().unwrap().is_isomorphic_to(&a));
        prop_assert!(b.dual().unwrap().dual().unwrap().is_isomorphic_to(&b));
    }

    #[test]
    fn complete_and_inverse_deterministic_is_inverse_complete(a in any_automaton()) {
        let r = a.check_properties();
        if r.complete && r.inverse_deterministic {
            prop_assert!(r.inverse_complete);
        }
    }

    #[test]
    fn free_semigroup_prefix_law(
        ids in proptest::collection::vec(0..2u32, 0..6),
        bits in proptest::collection::vec(any::<bool>(), 0..10),
    ) {
        let a = build_gadget(GadgetId::FreeSemigroup { partial: false });
        let seq = StateSequence::plain(ids.iter().map(|&i| StateId(i)));
        let u = word(&bits);
        let out = a.act_word(&seq, &u).unwrap();
        let name = |i: u32| a.state_name(StateId(i)).to_string();
        let concat: Vec<String> = ids
            .iter()
            .map(|&i| name(i))
            .chain(a.alphabet().word_tokens(&u).into_iter().map(String::from))
            .take(u.len())
            .collect();
        prop_assert_eq!(a.alphabet().word_tokens(out.output().unwrap()), concat);
    }

    #[test]
    fn zero_completion_keeps_verdicts(
        a in any_automaton(),
        l in proptest::collection::vec(0..3u32, 1..4),
        r in proptest::collection::vec(0..3u32, 1..4),
    ) {
        // the empty product is not a semigroup element: it fixes ⊥-words the zero kills
        let hat = a.complete_with_zero().unwrap();
        let (ls, rs) = (sequence(&a, &l), sequence(&a, &r));
        let plain = decide(&WordProblemInstance::new(a.clone(), ls.clone(), rs.clone(), vec![]).unwrap(), None).unwrap();
        let hatted = decide(&WordProblemInstance::new(hat, ls, rs, vec![]).unwrap(), None).unwrap();
        prop_assert_eq!(plain.kind, hatted.kind);
    }

    #[test]
    fn decider_matches_oracle(
        a in any_automaton(),
        l in proptest::collection::vec(0..3u32, 0..4),
        r in proptest::collection::vec(0..3u32, 0..4),
        constrained in any::<bool>(),
        edges in proptest::collection::vec((0..2usize, 0..2usize, 0..2usize), 0..5),
        final_state in 0..2usize,
    ) {
        let mut constraints = vec![];
        if constrained {
            let mut c = AcceptorBuilder::new("c");
            for t in LETTERS {
                c.add_letter(t).unwrap();
            }
            let z = [c.add_state("z0").unwrap(), c.add_state("z1").unwrap()];
            for (from, letter, to) in edges {
                c.add(z[from], Letter(letter as u32), z[to]);
            }
            c.set_initial(z[0]);
            c.set_final(z[final_state]);
            constraints.push(c.build().unwrap());
        }
        let inst = WordProblemInstance::new(
            a.clone(),
            sequence(&a, &l),
            sequence(&a, &r),
            constraints,
        )
        .unwrap();
        let fast = decide(&inst, None).unwrap();
        let slow = oracle_decide_with(&inst, u64::MAX, true);
        prop_assert_eq!(fast.kind, slow.kind);
        prop_assert_eq!(fast.witness, slow.witness);
    }
}
