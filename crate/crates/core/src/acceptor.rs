//! Nondeterministic finite acceptors used as rational constraints.

use std::collections::{HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::mealy::{check_letter_token, check_state_token, Alphabet, Letter};

/// A spelling acceptor `(Z, Σ, δ, I, F)` with a relational transition set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Acceptor {
    name: String,
    alphabet: Alphabet,
    states: Vec<String>,
    // succ[z * |Σ| + a] = sorted successor list
    succ: Vec<Vec<u32>>,
    initial: Vec<u32>,
    finals: Vec<bool>,
}

impl Acceptor {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn renamed(&self, name: impl Into<String>) -> Self {
        Acceptor { name: name.into(), ..self.clone() }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn state_names(&self) -> &[String] {
        &self.states
    }

    pub fn state_name(&self, z: usize) -> &str {
        &self.states[z]
    }

    pub fn state(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    pub fn initial(&self) -> &[u32] {
        &self.initial
    }

    pub fn is_final(&self, z: usize) -> bool {
        self.finals[z]
    }

    pub fn finals(&self) -> impl Iterator<Item = usize> + '_ {
        self.finals.iter().enumerate().filter(|(_, f)| **f).map(|(i, _)| i)
    }

    pub fn successors(&self, z: usize, a: Letter) -> &[u32] {
        &self.succ[z * self.alphabet.len() + a.index()]
    }

    /// All transitions `(z, a, z')`, ordered by source, letter, target.
    pub fn transitions(&self) -> impl Iterator<Item = (usize, Letter, usize)> + '_ {
        let n = self.alphabet.len();
        self.succ.iter().enumerate().flat_map(move |(i, ts)| {
            ts.iter().map(move |&t| (i / n, Letter((i % n) as u32), t as usize))
        })
    }

    pub fn is_deterministic(&self) -> bool {
        self.initial.len() == 1 && self.succ.iter().all(|s| s.len() <= 1)
    }

    pub fn is_complete(&self) -> bool {
        self.succ.iter().all(|s| !s.is_empty())
    }

    /// Successor set of a state set, as a bitmap over states.
    pub fn step_set(&self, set: &[bool], a: Letter) -> Vec<bool> {
        let mut next = vec![false; self.states.len()];
        for (z, _) in set.iter().enumerate().filter(|(_, x)| **x) {
            for &t in self.successors(z, a) {
                next[t as usize] = true;
            }
        }
        next
    }

    pub fn initial_set(&self) -> Vec<bool> {
        let mut set = vec![false; self.states.len()];
        for &z in &self.initial {
            set[z as usize] = true;
        }
        set
    }

    pub fn set_accepts(&self, set: &[bool]) -> bool {
        set.iter().zip(&self.finals).any(|(x, f)| *x && *f)
    }

    /// Membership of a word given by tokens of this acceptor's alphabet.
    pub fn accepts(&self, word: &[Letter]) -> bool {
        let mut set = self.initial_set();
        for &a in word {
            set = self.step_set(&set, a);
        }
        self.set_accepts(&set)
    }

    /// Membership of a word given as tokens; unknown tokens reject.
    pub fn accepts_tokens<S: AsRef<str>>(&self, word: &[S]) -> bool {
        match self.alphabet.parse_word(word) {
            Ok(w) => self.accepts(&w),
            Err(_) => false,
        }
    }

    /// Whether some accepted word exists.
    pub fn is_empty(&self) -> bool {
        let mut seen = vec![false; self.states.len()];
        let mut queue: VecDeque<usize> = VecDeque::new();
        for &z in &self.initial {
            if !std::mem::replace(&mut seen[z as usize], true) {
                queue.push_back(z as usize);
            }
        }
        while let Some(z) = queue.pop_front() {
            if self.finals[z] {
                return false;
            }
            for a in self.alphabet.letters() {
                for &t in self.successors(z, a) {
                    if !std::mem::replace(&mut seen[t as usize], true) {
                        queue.push_back(t as usize);
                    }
                }
            }
        }
        true
    }

    /// Same language over another alphabet that contains this one; letters
    /// missing here get no transitions.
    pub fn over_alphabet(&self, alphabet: &Alphabet) -> Result<Acceptor> {
        if let Some(tok) = self.alphabet.tokens().iter().find(|t| alphabet.letter(t).is_none()) {
            return Err(Error::AlphabetMismatch {
                acceptor: self.name.clone(),
                letter: tok.clone(),
            });
        }
        let mut b = AcceptorBuilder::new(self.name.clone());
        for tok in alphabet.tokens() {
            b.letter(tok)?;
        }
        for s in &self.states {
            b.state(s)?;
        }
        for (z, a, t) in self.transitions() {
            let a2 = alphabet.letter(self.alphabet.token(a)).expect("checked above");
            b.add(z, a2, t);
        }
        for &z in &self.initial {
            b.set_initial(z as usize);
        }
        for z in self.finals() {
            b.set_final(z);
        }
        b.build()
    }
}

/// Incremental constructor for [`Acceptor`].
#[derive(Debug, Clone)]
pub struct AcceptorBuilder {
    name: String,
    letters: Vec<String>,
    letter_index: HashMap<String, Letter>,
    states: Vec<String>,
    state_index: HashMap<String, usize>,
    transitions: Vec<(usize, Letter, usize)>,
    initial: Vec<usize>,
    finals: Vec<usize>,
}

impl AcceptorBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        AcceptorBuilder {
            name: name.into(),
            letters: Vec::new(),
            letter_index: HashMap::new(),
            states: Vec::new(),
            state_index: HashMap::new(),
            transitions: Vec::new(),
            initial: Vec::new(),
            finals: Vec::new(),
        }
    }

    pub fn letter(&mut self, tok: &str) -> Result<Letter> {
        if let Some(&l) = self.letter_index.get(tok) {
            return Ok(l);
        }
        check_letter_token(tok)?;
        let l = Letter(self.letters.len() as u32);
        self.letters.push(tok.to_string());
        self.letter_index.insert(tok.to_string(), l);
        Ok(l)
    }

    pub fn add_letter(&mut self, tok: &str) -> Result<Letter> {
        if self.letter_index.contains_key(tok) {
            return Err(Error::DuplicateLetter(tok.to_string()));
        }
        self.letter(tok)
    }

    pub fn state(&mut self, name: &str) -> Result<usize> {
        if let Some(&z) = self.state_index.get(name) {
            return Ok(z);
        }
        check_state_token(name)?;
        let z = self.states.len();
        self.states.push(name.to_string());
        self.state_index.insert(name.to_string(), z);
        Ok(z)
    }

    pub fn add_state(&mut self, name: &str) -> Result<usize> {
        if self.state_index.contains_key(name) {
            return Err(Error::DuplicateState(name.to_string()));
        }
        self.state(name)
    }

    pub fn lookup_state(&self, name: &str) -> Result<usize> {
        self.state_index.get(name).copied().ok_or_else(|| Error::UnknownState(name.to_string()))
    }

    pub fn lookup_letter(&self, tok: &str) -> Result<Letter> {
        self.letter_index.get(tok).copied().ok_or_else(|| Error::UnknownLetter(tok.to_string()))
    }

    pub fn add(&mut self, from: usize, a: Letter, to: usize) {
        self.transitions.push((from, a, to));
    }

    /// Adds a transition between declared states over a declared letter.
    pub fn transition(&mut self, from: &str, a: &str, to: &str) -> Result<()> {
        let (from, to) = (self.lookup_state(from)?, self.lookup_state(to)?);
        let a = self.lookup_letter(a)?;
        self.add(from, a, to);
        Ok(())
    }

    pub fn set_initial(&mut self, z: usize) {
        if !self.initial.contains(&z) {
            self.initial.push(z);
        }
    }

    pub fn set_final(&mut self, z: usize) {
        if !self.finals.contains(&z) {
            self.finals.push(z);
        }
    }

    pub fn build(self) -> Result<Acceptor> {
        if self.initial.is_empty() {
            return Err(Error::NoInitialState(self.name));
        }
        let n = self.letters.len();
        let mut succ = vec![Vec::new(); self.states.len() * n];
        for (from, a, to) in self.transitions {
            let slot: &mut Vec<u32> = &mut succ[from * n + a.index()];
            if !slot.contains(&(to as u32)) {
                slot.push(to as u32);
            }
        }
        for s in &mut succ {
            s.sort_unstable();
        }
        let mut finals = vec![false; self.states.len()];
        for z in self.finals {
            finals[z] = true;
        }
        let mut initial: Vec<u32> = self.initial.into_iter().map(|z| z as u32).collect();
        initial.sort_unstable();
        Ok(Acceptor {
            name: self.name,
            alphabet: Alphabet::new(self.letters)?,
            states: self.states,
            succ,
            initial,
            finals,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // b* over {a, b}
    fn b_star() -> Acceptor {
        let mut b = AcceptorBuilder::new("bstar");
        b.letter("a").unwrap();
        b.letter("b").unwrap();
        let z = b.state("z").unwrap();
        b.transition("z", "b", "z").unwrap();
        b.set_initial(z);
        b.set_final(z);
        b.build().unwrap()
    }

    #[test]
    fn membership() {
        let acc = b_star();
        assert!(acc.accepts_tokens::<&str>(&[]));
        assert!(acc.accepts_tokens(&["b", "b"]));
        assert!(!acc.accepts_tokens(&["b", "a"]));
        assert!(!acc.accepts_tokens(&["c"]));
        assert!(acc.is_deterministic());
        assert!(!acc.is_complete());
        assert!(!acc.is_empty());
    }

    #[test]
    fn nondeterministic_subset_step() {
        // words ending in a
        let mut b = AcceptorBuilder::new("enda");
        b.letter("a").unwrap();
        b.letter("b").unwrap();
        b.state("s").unwrap();
        b.state("f").unwrap();
        for x in ["a", "b"] {
            b.transition("s", x, "s").unwrap();
        }
        b.transition("s", "a", "f").unwrap();
        b.set_initial(0);
        b.set_final(1);
        let acc = b.build().unwrap();
        assert!(!acc.is_deterministic());
        assert!(acc.accepts_tokens(&["b", "a"]));
        assert!(!acc.accepts_tokens(&["a", "b"]));
    }

    #[test]
    fn no_initial_state_is_rejected() {
        let mut b = AcceptorBuilder::new("x");
        b.letter("a").unwrap();
        b.state("z").unwrap();
        assert_eq!(b.build(), Err(Error::NoInitialState("x".into())));
    }

    #[test]
    fn reindexing_alphabet() {
        let acc = b_star();
        let wide = Alphabet::new(["b", "c", "a"]).unwrap();
        let moved = acc.over_alphabet(&wide).unwrap();
        assert!(moved.accepts_tokens(&["b", "b"]));
        assert!(!moved.accepts_tokens(&["c"]));
        let narrow = Alphabet::new(["a"]).unwrap();
        assert!(matches!(acc.over_alphabet(&narrow), Err(Error::AlphabetMismatch { .. })));
    }
}
