//! The transducer that checks encoded Turing machine computations, and the
//! word problem instances built from it.
//!
//! All parts share the alphabet `Σ = Δ ⊔ {0, 1, #, $}` and act as the
//! identity wherever they are defined, except for digit blocks:
//!
//! * `check`: adds one (least significant digit first) to the digit block of
//!   the first unmarked symbol of every configuration, and to the blocks of
//!   all marked symbols before it. A symbol is marked iff its block has a 1.
//! * `chk0:…`, `chk1:…`, `skip:…`, `tail.*`: checker states. The entry
//!   state for a window `x y z` checks that the first unmarked symbol of
//!   every configuration follows from the window one configuration earlier.
//! * `form`: the word has the shape of a configuration sequence.
//! * `marked`: every symbol is marked.
//! * `final`: turns the trailing `0` into `1` iff an accepting head symbol
//!   occurs and the block after the first `$` is zero.
//! * `count` (group variant): adds one to the block after the first `$`;
//!   failed checks route here instead of dying.
//!
//! In the group variant every remaining gap goes to the identity `sink`.

use crate::acceptor::{Acceptor, AcceptorBuilder};
use crate::error::{Error, Result};
use crate::mealy::{Letter, MealyAutomaton, MealyBuilder, StateId, StateSequence};
use crate::reductions::tm::{derive_tau, tm_alphabet, SigmaLetters, TmReductionParams, TuringMachineSpec};
use crate::word_problem::WordProblemInstance;

const BOTTOM: &str = "*";

/// Number of checker states: `2·|Δ|³·(|Δ|+1)² + |Δ|³ + 3`.
pub fn checker_state_count(delta_len: usize) -> usize {
    let n = delta_len;
    2 * n * n * n * (n + 1) * (n + 1) + n * n * n + 3
}

struct Parts {
    check: StateId,
    form: StateId,
    marked: StateId,
    final_: StateId,
    // C1[w; (⊥, ⊥)] for each window w = (x, y, z), indexed (x·n + y)·n + z
    entry: Vec<StateId>,
}

fn add_states(b: &mut MealyBuilder, names: &[String]) -> Vec<StateId> {
    names.iter().map(|s| b.add_state(s).expect("fresh generated state")).collect()
}

fn build(tm: &TuringMachineSpec, group: bool) -> Result<(MealyAutomaton, Parts)> {
    let n = tm.delta_len();
    let sigma = tm_alphabet(tm);
    let s = SigmaLetters::of(tm);
    let (zero, one, hash, dollar) = (s.zero, s.one, s.hash, s.dollar);
    let delta: Vec<Letter> = (0..n as u32).map(Letter).collect();
    let tok = |d: usize| tm.delta_token(d);

    let mut b = MealyBuilder::new(format!("tm.{}{}", tm.name(), if group { ".group" } else { "" }));
    for t in sigma.tokens() {
        b.add_letter(t)?;
    }

    // check-marking
    let ck = add_states(
        &mut b,
        &["check", "check.1", "check.2", "check.3", "check.4", "check.skip", "check.end"].map(String::from),
    );
    let [c0, c1, c2, c3, c4, c_skip, c_end] = ck[..] else { unreachable!() };
    b.identity_edges(c0, &delta, c1)?;
    b.set(c1, zero, one, c2)?;
    b.set(c1, one, zero, c4)?;
    b.set(c2, zero, zero, c2)?;
    b.set(c2, one, one, c3)?;
    b.identity_edges(c2, &delta, c_skip)?;
    b.set(c2, dollar, dollar, c_end)?;
    b.set(c2, hash, hash, c0)?;
    b.identity_edges(c3, &[zero, one], c3)?;
    b.identity_edges(c3, &delta, c1)?;
    b.set(c4, one, zero, c4)?;
    b.set(c4, zero, one, c3)?;
    b.identity_edges(c_skip, &delta, c_skip)?;
    b.identity_edges(c_skip, &[zero, one], c_skip)?;
    b.set(c_skip, hash, hash, c0)?;
    b.set(c_skip, dollar, dollar, c_end)?;
    b.identity_edges(c_end, &[zero, one, dollar], c_end)?;

    // checker: chk{tag}[x,y,z / l,m] with l, m ∈ Δ ∪ {⊥}; ⊥ stands for a blank
    let nb = n + 1;
    let lower = |d: usize| if d == n { BOTTOM.to_string() } else { tok(d) };
    let windows: Vec<(usize, usize, usize)> =
        (0..n).flat_map(|x| (0..n).flat_map(move |y| (0..n).map(move |z| (x, y, z)))).collect();
    let mut names = Vec::with_capacity(2 * windows.len() * nb * nb);
    for tag in 0..2 {
        for &(x, y, z) in &windows {
            for l in 0..nb {
                for m in 0..nb {
                    names.push(format!("chk{tag}:{},{},{}/{},{}", tok(x), tok(y), tok(z), lower(l), lower(m)));
                }
            }
        }
    }
    let chk = add_states(&mut b, &names);
    let per_tag = windows.len() * nb * nb;
    let chk_id = |tag: usize, w: usize, l: usize, m: usize| chk[tag * per_tag + (w * nb + l) * nb + m];
    let skip_names: Vec<String> =
        windows.iter().map(|&(x, y, z)| format!("skip:{},{},{}", tok(x), tok(y), tok(z))).collect();
    let skip = add_states(&mut b, &skip_names);
    let tail = add_states(&mut b, &["tail.1", "tail.2", "tail.3"].map(String::from));
    let win = |x: usize, y: usize, z: usize| (x * n + y) * n + z;

    let (form, marked, final_, count) = {
        let form = add_states(&mut b, &["form", "form.1", "form.2", "form.3", "form.4"].map(String::from));
        let marked = add_states(
            &mut b,
            &["marked", "marked.1", "marked.2", "marked.3", "marked.4", "marked.5"].map(String::from),
        );
        let mut final_names: Vec<String> = (0..8)
            .map(|i| if i == 0 { "final".to_string() } else { format!("final.{i}") })
            .collect();
        final_names.push("final.fail".into());
        let final_ = add_states(&mut b, &final_names);
        let count = if group {
            add_states(&mut b, &["count", "count.1", "count.2", "count.3", "count.4"].map(String::from))
        } else {
            Vec::new()
        };
        (form, marked, final_, count)
    };

    let tau = derive_tau(tm);
    let blank = tm.plain(tm.blank());
    let val = |d: usize| if d == n { blank } else { d };
    for (w, &(x, y, z)) in windows.iter().enumerate() {
        let expected = tau.get(x, y, z);
        for l in 0..nb {
            for m in 0..nb {
                let q0 = chk_id(0, w, l, m);
                let q1 = chk_id(1, w, l, m);
                b.set(q0, zero, zero, q0)?;
                b.set(q0, one, one, q1)?;
                if expected == Some(val(m)) {
                    for (g, &d) in delta.iter().enumerate() {
                        b.set(q0, d, d, skip[win(val(l), val(m), g)])?;
                    }
                    b.set(q0, hash, hash, chk_id(1, win(val(l), val(m), blank), n, n))?;
                    b.set(q0, dollar, dollar, tail[0])?;
                } else if group {
                    b.identity_edges(q0, &delta, count[0])?;
                    b.set(q0, hash, hash, count[0])?;
                    b.set(q0, dollar, dollar, count[1])?;
                }
                b.identity_edges(q1, &[zero, one], q1)?;
                for (g, &d) in delta.iter().enumerate() {
                    b.set(q1, d, d, chk_id(0, w, m, g))?;
                }
            }
        }
        let sq = skip[w];
        b.identity_edges(sq, &delta, sq)?;
        b.identity_edges(sq, &[zero, one], sq)?;
        b.set(sq, hash, hash, chk_id(1, w, n, n))?;
        b.set(sq, dollar, dollar, tail[0])?;
    }
    b.identity_edges(tail[0], &[zero, one], tail[0])?;
    b.set(tail[0], dollar, dollar, tail[1])?;
    b.identity_edges(tail[1], &[zero, one], tail[2])?;

    // form
    b.identity_edges(form[0], &delta, form[1])?;
    b.set(form[1], hash, hash, form[0])?;
    b.identity_edges(form[1], &delta, form[1])?;
    b.set(form[1], zero, zero, form[1])?;
    b.set(form[1], dollar, dollar, form[2])?;
    b.set(form[2], zero, zero, form[2])?;
    b.set(form[2], dollar, dollar, form[3])?;
    b.set(form[3], zero, zero, form[4])?;

    // marked
    b.identity_edges(marked[0], &delta, marked[1])?;
    b.set(marked[1], zero, zero, marked[1])?;
    b.set(marked[1], one, one, marked[2])?;
    b.identity_edges(marked[2], &[zero, one], marked[2])?;
    b.identity_edges(marked[2], &delta, marked[1])?;
    b.set(marked[2], hash, hash, marked[0])?;
    b.set(marked[2], dollar, dollar, marked[3])?;
    b.identity_edges(marked[3], &[zero, one], marked[3])?;
    b.set(marked[3], dollar, dollar, marked[4])?;
    b.set(marked[4], zero, zero, marked[5])?;

    // final
    let accepting: Vec<Letter> = (0..n).filter(|&d| tm.is_accepting_symbol(d)).map(|d| delta[d]).collect();
    let others: Vec<Letter> = sigma.letters().filter(|&a| a != dollar && !accepting.contains(&a)).collect();
    let not_dollar: Vec<Letter> = sigma.letters().filter(|&a| a != dollar).collect();
    let fail = final_[8];
    b.identity_edges(final_[0], &others, final_[0])?;
    b.set(final_[0], dollar, dollar, final_[1])?;
    b.identity_edges(final_[0], &accepting, final_[4])?;
    b.set(final_[1], zero, zero, final_[1])?;
    b.set(final_[1], dollar, dollar, final_[2])?;
    b.set(final_[2], zero, zero, final_[3])?;
    b.identity_edges(final_[4], &not_dollar, final_[4])?;
    b.set(final_[4], dollar, dollar, final_[5])?;
    b.set(final_[5], zero, zero, final_[5])?;
    b.set(final_[5], dollar, dollar, final_[6])?;
    b.set(final_[5], one, one, fail)?;
    b.set(final_[6], zero, one, final_[7])?;
    b.identity_edges(fail, &sigma.letters().collect::<Vec<_>>(), fail)?;

    if group {
        b.identity_edges(count[0], &not_dollar, count[0])?;
        b.set(count[0], dollar, dollar, count[1])?;
        b.set(count[1], one, zero, count[1])?;
        b.set(count[1], zero, one, count[2])?;
        b.identity_edges(count[2], &[zero, one], count[2])?;
        b.set(count[2], dollar, dollar, count[3])?;
        b.set(count[3], zero, zero, count[4])?;
        complete_to_sink(&mut b)?;
    }

    let automaton = b.build()?;
    let parts = Parts {
        check: c0,
        form: form[0],
        marked: marked[0],
        final_: final_[0],
        entry: (0..windows.len()).map(|w| chk_id(1, w, n, n)).collect(),
    };
    if group && !automaton.check_properties().is_g_automaton {
        return Err(Error::NotGAutomaton(automaton.name().to_string()));
    }
    Ok((automaton, parts))
}

/// Adds a `sink` with identity loops and sends every missing `(q, a)` to
/// it. The output is `a` itself when `a` is not yet an output at `q`,
/// otherwise the token-least unused output.
fn complete_to_sink(b: &mut MealyBuilder) -> Result<()> {
    let letters = b.alphabet().letters_by_token();
    let states = b.num_states();
    let sink = b.add_state("sink")?;
    b.identity_edges(sink, &letters, sink)?;
    for q in (0..states as u32).map(StateId) {
        let mut used = vec![false; letters.len()];
        let mut missing = Vec::new();
        for &a in &letters {
            match b.get(q, a) {
                Some((out, _)) => used[out.index()] = true,
                None => missing.push(a),
            }
        }
        let mut rest = Vec::new();
        for a in missing {
            if used[a.index()] {
                rest.push(a);
            } else {
                used[a.index()] = true;
                b.set(q, a, a, sink)?;
            }
        }
        let mut free = letters.iter().copied().filter(|o| !used[o.index()]);
        for a in rest {
            let out = free.next().expect("as many free outputs as missing inputs");
            b.set(q, a, out, sink)?;
        }
    }
    Ok(())
}

/// The full checking transducer (inverse-semigroup variant, or group variant
/// with the counter and sink completion).
pub fn build_tm_automaton(tm: &TuringMachineSpec, params: &TmReductionParams) -> Result<MealyAutomaton> {
    Ok(build(tm, params.group)?.0)
}

/// Acceptor for `((Δ 0^k)^p #)* (Δ 0^k)^p $ 0^k $ 0`.
pub fn configuration_constraint(tm: &TuringMachineSpec, p_val: usize, k: usize) -> Result<Acceptor> {
    let sigma = tm_alphabet(tm);
    let s = SigmaLetters::of(tm);
    let mut b = AcceptorBuilder::new("C");
    for t in sigma.tokens() {
        b.add_letter(t)?;
    }
    let sym: Vec<usize> = (0..p_val).map(|j| b.state(&format!("s{j}"))).collect::<Result<_>>()?;
    let digits: Vec<Vec<usize>> = (0..p_val)
        .map(|j| (0..k).map(|d| b.state(&format!("d{j}_{d}"))).collect::<Result<_>>())
        .collect::<Result<_>>()?;
    let gap = b.state("g")?;
    let suffix: Vec<usize> = (0..=k).map(|d| b.state(&format!("e{d}"))).collect::<Result<_>>()?;
    let h = b.state("h")?;
    let fin = b.state("f")?;
    for j in 0..p_val {
        for d in 0..tm.delta_len() {
            b.add(sym[j], Letter(d as u32), digits[j][0]);
        }
        for d in 0..k {
            let to = if d + 1 < k {
                digits[j][d + 1]
            } else if j + 1 < p_val {
                sym[j + 1]
            } else {
                gap
            };
            b.add(digits[j][d], s.zero, to);
        }
    }
    b.add(gap, s.hash, sym[0]);
    b.add(gap, s.dollar, suffix[0]);
    for d in 0..k {
        b.add(suffix[d], s.zero, suffix[d + 1]);
    }
    b.add(suffix[k], s.dollar, h);
    b.add(h, s.zero, fin);
    b.set_initial(sym[0]);
    b.set_final(fin);
    b.build()
}

/// Options for [`reduce_tm_with`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TmReduceOptions {
    /// Keep only states reachable from the sequence states.
    pub prune: bool,
}

/// Builds the instance for `params.input`:
/// `final marked q form` vs `marked q form` (inverse-semigroup variant) or
/// `final q` vs `q` under the constraint `C` (group variant), where
/// `q = check w(p-1) … check w(0)` and `w(i)` is the entry checker state
/// for the window around cell `i` of the initial configuration.
pub fn reduce_tm(tm: &TuringMachineSpec, params: &TmReductionParams) -> Result<WordProblemInstance> {
    reduce_tm_with(tm, params, TmReduceOptions::default())
}

pub fn reduce_tm_with(
    tm: &TuringMachineSpec,
    params: &TmReductionParams,
    options: TmReduceOptions,
) -> Result<WordProblemInstance> {
    let (automaton, parts) = build(tm, params.group)?;
    let n = tm.delta_len();
    let c0 = params.initial_configuration(tm);
    let blank = tm.plain(tm.blank());
    let p = params.p_val;
    let at = |i: isize| if i < 0 || i as usize >= p { blank } else { c0[i as usize] };
    let mut q = Vec::with_capacity(2 * p);
    for i in (0..p as isize).rev() {
        q.push(parts.check);
        q.push(parts.entry[(at(i - 1) * n + at(i)) * n + at(i + 1)]);
    }
    let (lhs, rhs, constraints) = if params.group {
        let lhs: Vec<StateId> = std::iter::once(parts.final_).chain(q.iter().copied()).collect();
        (lhs, q, vec![configuration_constraint(tm, p, params.k)?])
    } else {
        let rhs: Vec<StateId> = std::iter::once(parts.marked)
            .chain(q.iter().copied())
            .chain(std::iter::once(parts.form))
            .collect();
        let lhs: Vec<StateId> = std::iter::once(parts.final_).chain(rhs.iter().copied()).collect();
        (lhs, rhs, vec![])
    };
    if options.prune {
        let roots: Vec<StateId> = lhs.iter().chain(&rhs).copied().collect();
        let small = automaton.restrict_to_reachable(&roots);
        let remap = |seq: &[StateId]| {
            StateSequence::plain(
                seq.iter().map(|&s| small.state(automaton.state_name(s)).expect("reachable root")),
            )
        };
        let (l, r) = (remap(&lhs), remap(&rhs));
        return WordProblemInstance::new(small, l, r, constraints);
    }
    WordProblemInstance::new(automaton, StateSequence::plain(lhs), StateSequence::plain(rhs), constraints)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mealy::ActOutcome;
    use crate::reductions::tm::tests::{rule, step_right};
    use crate::reductions::tm::{encode_computation, simulate_tm, Move};

    fn params(tm: &TuringMachineSpec, p: usize, input: &[&str], group: bool) -> TmReductionParams {
        TmReductionParams::new(tm, p, input, group).unwrap()
    }

    #[test]
    fn checker_count_formula() {
        assert_eq!(checker_state_count(6), 21_387);
        let tm = step_right();
        let a = build_tm_automaton(&tm, &params(&tm, 2, &["a"], false)).unwrap();
        let checker = a
            .state_names()
            .iter()
            .filter(|s| s.starts_with("chk") || s.starts_with("skip:") || s.starts_with("tail."))
            .count();
        assert_eq!(checker, 21_387);
    }

    #[test]
    fn variants_have_expected_flags() {
        let tm = step_right();
        let s = build_tm_automaton(&tm, &params(&tm, 2, &["a"], false)).unwrap();
        assert!(s.check_properties().is_s_bar_automaton);
        let g = build_tm_automaton(&tm, &params(&tm, 2, &["a"], true)).unwrap();
        assert!(g.check_properties().is_g_automaton);
    }

    #[test]
    fn double_check_overflows() {
        let tm = step_right();
        let a = build_tm_automaton(&tm, &params(&tm, 2, &["a"], false)).unwrap();
        let seq = a.parse_sequence(&["check", "check"]).unwrap();
        let g = tm.delta_token(0);
        let u = a.alphabet().parse_word(&[g.as_str(), "0", "1", g.as_str(), "1", "0"]).unwrap();
        assert!(matches!(a.act_word(&seq, &u).unwrap(), ActOutcome::UndefinedAt(_)));
        let once = a.parse_sequence(&["check"]).unwrap();
        let out = a.act_word(&once, &u).unwrap();
        assert_eq!(a.alphabet().render(out.output().unwrap()), format!("{g} 1 1 {g} 0 1"));
    }

    #[test]
    fn increment_law() {
        let tm = step_right();
        let a = build_tm_automaton(&tm, &params(&tm, 3, &["a"], false)).unwrap();
        let (p, k) = (3usize, 2usize);
        let g = tm.delta_token(1);
        let mut toks: Vec<String> = Vec::new();
        for _ in 0..p {
            toks.push(g.clone());
            toks.extend(std::iter::repeat_n("0".to_string(), k));
        }
        toks.extend(["$", "0", "0", "$", "0"].map(String::from));
        let u = a.alphabet().parse_word(&toks).unwrap();
        for j in 0..=p {
            let seq = a.parse_sequence(&vec!["check"; j]).unwrap();
            let out = a.act_word(&seq, &u).unwrap();
            let out = out.output().unwrap();
            for i in 0..p {
                let block = &out[i * (k + 1) + 1..(i + 1) * (k + 1)];
                let value: usize = block
                    .iter()
                    .enumerate()
                    .map(|(bit, l)| (a.alphabet().token(*l) == "1") as usize * (1 << bit))
                    .sum();
                assert_eq!(value, j.saturating_sub(i), "j={j} i={i}");
            }
        }
    }

    #[test]
    fn accepting_machine_is_separated() {
        let tm = step_right();
        for group in [false, true] {
            let pr = params(&tm, 2, &["a"], group);
            let inst = reduce_tm(&tm, &pr).unwrap();
            if !group {
                assert_eq!(inst.lhs().len(), 2 * 2 + 3);
            }
            let sim = simulate_tm(&tm, &pr, 4).unwrap();
            let t = sim.accepts_within.unwrap();
            let u = encode_computation(&tm, &pr, t).unwrap();
            assert!(inst.in_constraints(&u));
            let l = inst.automaton().act_word(inst.lhs(), &u).unwrap();
            let r = inst.automaton().act_word(inst.rhs(), &u).unwrap();
            let (l, r) = (l.output().unwrap(), r.output().unwrap());
            assert_eq!(l[..u.len() - 1], r[..u.len() - 1]);
            assert_ne!(l[u.len() - 1], r[u.len() - 1]);
        }
    }

    #[test]
    fn invalid_step_is_rejected_or_counted() {
        let tm = step_right();
        let pr = params(&tm, 2, &["a"], false);
        let s = SigmaLetters::of(&tm);
        // claims the head stayed in place
        let bogus = crate::reductions::tm::encode_configurations(&tm, pr.k, &[vec![tm.head(0, 1), 0]]);
        let inst = reduce_tm(&tm, &pr).unwrap();
        assert!(!inst.automaton().act_word(inst.rhs(), &bogus).unwrap().is_defined());

        let pg = params(&tm, 2, &["a"], true);
        let inst = reduce_tm(&tm, &pg).unwrap();
        assert!(inst.in_constraints(&bogus));
        let l = inst.automaton().act_word(inst.lhs(), &bogus).unwrap();
        let r = inst.automaton().act_word(inst.rhs(), &bogus).unwrap();
        assert_eq!(l.output(), r.output());
        let out = r.output().unwrap();
        // the block after the first $ counts the failed positions
        let dollar = bogus.iter().position(|&x| x == s.dollar).unwrap();
        assert!(out[dollar + 1..dollar + 1 + pg.k].contains(&s.one));
    }

    #[test]
    fn no_final_state_means_equal_on_encodings() {
        let tm = TuringMachineSpec::new(
            "walk",
            &["_", "a"],
            "_",
            &["s"],
            "s",
            &[],
            vec![rule("s", "a", "a", Move::R, "s")],
        )
        .unwrap();
        let pr = params(&tm, 3, &["a"], false);
        let inst = reduce_tm(&tm, &pr).unwrap();
        for t in 1..=3 {
            let u = encode_computation(&tm, &pr, t).unwrap();
            let l = inst.automaton().act_word(inst.lhs(), &u).unwrap();
            let r = inst.automaton().act_word(inst.rhs(), &u).unwrap();
            assert!(r.is_defined());
            assert_eq!(l.output(), r.output());
        }
    }

    #[test]
    fn pruning_keeps_behaviour() {
        let tm = step_right();
        let pr = params(&tm, 2, &["a"], false);
        let full = reduce_tm(&tm, &pr).unwrap();
        let small = reduce_tm_with(&tm, &pr, TmReduceOptions { prune: true }).unwrap();
        assert!(small.automaton().num_states() < full.automaton().num_states());
        let u = encode_computation(&tm, &pr, 1).unwrap();
        let a = full.automaton().act_word(full.lhs(), &u).unwrap();
        let b = small.automaton().act_word(small.lhs(), &u).unwrap();
        assert_eq!(a.output(), b.output());
    }

    #[test]
    fn constraint_shape() {
        let tm = step_right();
        let c = configuration_constraint(&tm, 2, 2).unwrap();
        let sigma = tm_alphabet(&tm);
        let ok = sigma.parse_str("[a] 0 0 [_] 0 0 # [_] 0 0 [a@s] 0 0 $ 0 0 $ 0").unwrap();
        assert!(c.accepts(&ok));
        let short = sigma.parse_str("[a] 0 0 $ 0 0 $ 0").unwrap();
        assert!(!c.accepts(&short));
        let block = sigma.parse_str("[a] 0 [_] 0 0 $ 0 0 $ 0").unwrap();
        assert!(!c.accepts(&block));
    }
}
