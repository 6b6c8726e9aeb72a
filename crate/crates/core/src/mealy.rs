//! Synchronous Mealy transducers, their actions on words, and the standard
//! constructions on them (inverse, dual, union, zero-adjunction).
//!
//! States and letters are interned: a [`MealyAutomaton`] owns an [`Alphabet`]
//! and a list of state names, and refers to both through the dense indices
//! [`Letter`] and [`StateId`]. Words and state sequences are therefore always
//! relative to one automaton; use [`Alphabet::parse_word`] and
//! [`MealyAutomaton::parse_sequence`] to go from tokens to values.
//!
//! A [`StateSequence`] `q1 q2 ... qn` denotes the composed action
//! `q1 ∘ q2 ∘ ... ∘ qn ∘`: the rightmost item reads the input first and the
//! leftmost item produces the final output.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use crate::error::{Error, Result};

/// Prefix marking an inverted state in sequence tokens.
pub const INVERSE_PREFIX: &str = "~";
/// Fresh output letter introduced by [`MealyAutomaton::complete_with_zero`].
pub const BOTTOM_LETTER: &str = "_bot";
/// Sink state introduced by [`MealyAutomaton::complete_with_zero`].
pub const ZERO_STATE: &str = "_zero";

/// Index of a letter inside an [`Alphabet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter(pub u32);

impl Letter {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Index of a state inside a [`MealyAutomaton`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateId(pub u32);

impl StateId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

pub(crate) fn check_state_token(tok: &str) -> Result<()> {
    if tok.is_empty() || tok.chars().any(char::is_whitespace) {
        return Err(Error::InvalidToken(tok.to_string()));
    }
    Ok(())
}

pub(crate) fn check_letter_token(tok: &str) -> Result<()> {
    check_state_token(tok)?;
    if tok.starts_with(INVERSE_PREFIX) {
        return Err(Error::InvalidToken(tok.to_string()));
    }
    Ok(())
}

/// A finite, ordered set of letter tokens.
#[derive(Debug, Clone, Default)]
pub struct Alphabet {
    tokens: Vec<String>,
    index: HashMap<String, Letter>,
}

impl PartialEq for Alphabet {
    fn eq(&self, other: &Self) -> bool {
        self.tokens == other.tokens
    }
}

impl Eq for Alphabet {}

impl Alphabet {
    pub fn new<I, S>(tokens: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut alphabet = Alphabet::default();
        for tok in tokens {
            let tok = tok.into();
            if alphabet.index.contains_key(&tok) {
                return Err(Error::DuplicateLetter(tok));
            }
            alphabet.insert(tok)?;
        }
        Ok(alphabet)
    }

    fn insert(&mut self, tok: String) -> Result<Letter> {
        if let Some(&l) = self.index.get(&tok) {
            return Ok(l);
        }
        check_letter_token(&tok)?;
        let l = Letter(self.tokens.len() as u32);
        self.index.insert(tok.clone(), l);
        self.tokens.push(tok);
        Ok(l)
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn token(&self, l: Letter) -> &str {
        &self.tokens[l.index()]
    }

    pub fn letter(&self, tok: &str) -> Option<Letter> {
        self.index.get(tok).copied()
    }

    pub fn contains(&self, l: Letter) -> bool {
        l.index() < self.tokens.len()
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        (0..self.tokens.len() as u32).map(Letter)
    }

    /// Letters sorted by their token, the order used for witness tie-breaking.
    pub fn letters_by_token(&self) -> Vec<Letter> {
        let mut ls: Vec<Letter> = self.letters().collect();
        ls.sort_by(|a, b| self.token(*a).cmp(self.token(*b)));
        ls
    }

    pub fn parse_word<S: AsRef<str>>(&self, toks: &[S]) -> Result<Vec<Letter>> {
        toks.iter()
            .map(|t| {
                let t = t.as_ref();
                self.letter(t).ok_or_else(|| Error::UnknownLetter(t.to_string()))
            })
            .collect()
    }

    /// Parses a whitespace-separated word.
    pub fn parse_str(&self, s: &str) -> Result<Vec<Letter>> {
        let toks: Vec<&str> = s.split_whitespace().collect();
        self.parse_word(&toks)
    }

    pub fn word_tokens<'a>(&'a self, w: &[Letter]) -> Vec<&'a str> {
        w.iter().map(|l| self.token(*l)).collect()
    }

    /// Space-separated rendering of a word.
    pub fn render(&self, w: &[Letter]) -> String {
        self.word_tokens(w).join(" ")
    }
}

/// A state read either as itself or as its inverse `~q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignedState {
    pub base: StateId,
    pub inverted: bool,
}

impl SignedState {
    pub fn plain(base: StateId) -> Self {
        SignedState { base, inverted: false }
    }

    pub fn inverse(base: StateId) -> Self {
        SignedState { base, inverted: true }
    }
}

/// A word over signed states; the empty sequence is the identity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct StateSequence(pub Vec<SignedState>);

impl StateSequence {
    pub fn new(items: Vec<SignedState>) -> Self {
        StateSequence(items)
    }

    pub fn identity() -> Self {
        StateSequence(Vec::new())
    }

    pub fn plain(ids: impl IntoIterator<Item = StateId>) -> Self {
        StateSequence(ids.into_iter().map(SignedState::plain).collect())
    }

    pub fn items(&self) -> &[SignedState] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn has_inverted(&self) -> bool {
        self.0.iter().any(|s| s.inverted)
    }

    /// The group inverse `~qn ... ~q1`.
    pub fn inverse(&self) -> Self {
        StateSequence(
            self.0
                .iter()
                .rev()
                .map(|s| SignedState { base: s.base, inverted: !s.inverted })
                .collect(),
        )
    }
}

/// Result of [`MealyAutomaton::act_word`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ActOutcome {
    /// The action is defined; `state` is the cross-state `seq · u`.
    Defined { output: Vec<Letter>, state: StateSequence },
    /// The action dies while reading the letter at this (0-based) position.
    UndefinedAt(usize),
}

impl ActOutcome {
    pub fn output(&self) -> Option<&[Letter]> {
        match self {
            ActOutcome::Defined { output, .. } => Some(output),
            ActOutcome::UndefinedAt(_) => None,
        }
    }

    pub fn is_defined(&self) -> bool {
        matches!(self, ActOutcome::Defined { .. })
    }
}

/// Structural flags of an automaton.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PropertyReport {
    pub deterministic: bool,
    pub complete: bool,
    pub inverse_deterministic: bool,
    pub inverse_complete: bool,
    pub reversible: bool,
    pub bireversible: bool,
    pub is_s_bar_automaton: bool,
    pub is_g_automaton: bool,
}

impl fmt::Display for PropertyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "deterministic={} complete={} inverse-deterministic={} inverse-complete={} \
             reversible={} bireversible={} s-bar-automaton={} g-automaton={}",
            self.deterministic,
            self.complete,
            self.inverse_deterministic,
            self.inverse_complete,
            self.reversible,
            self.bireversible,
            self.is_s_bar_automaton,
            self.is_g_automaton
        )
    }
}

type Entry = Option<(Letter, StateId)>;

/// A deterministic synchronous transducer with equal input and output
/// alphabets. Transitions form a partial map `(state, input) -> (output, next)`.
#[derive(Debug, Clone)]
pub struct MealyAutomaton {
    name: String,
    alphabet: Alphabet,
    states: Vec<String>,
    state_index: HashMap<String, StateId>,
    // row-major: state * |alphabet| + input
    table: Vec<Entry>,
    // (state, output) -> (input, next); present iff inverse-deterministic
    inverse: Option<Vec<Entry>>,
}

impl PartialEq for MealyAutomaton {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.alphabet == other.alphabet
            && self.states == other.states
            && self.table == other.table
    }
}

impl Eq for MealyAutomaton {}

impl MealyAutomaton {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_transitions(&self) -> usize {
        self.table.iter().filter(|e| e.is_some()).count()
    }

    pub fn state_names(&self) -> &[String] {
        &self.states
    }

    pub fn state_name(&self, q: StateId) -> &str {
        &self.states[q.index()]
    }

    pub fn state(&self, name: &str) -> Option<StateId> {
        self.state_index.get(name).copied()
    }

    pub fn state_ids(&self) -> impl Iterator<Item = StateId> {
        (0..self.states.len() as u32).map(StateId)
    }

    /// Returns a copy under a different name.
    pub fn renamed(&self, name: impl Into<String>) -> Self {
        MealyAutomaton { name: name.into(), ..self.clone() }
    }

    #[inline]
    pub fn transition(&self, q: StateId, a: Letter) -> Option<(Letter, StateId)> {
        self.table[q.index() * self.alphabet.len() + a.index()]
    }

    /// Transition of the inverse automaton: for `~q` reading `b`, the pair
    /// `(a, p)` with `q –a/b→ p`. `None` when the automaton is not
    /// inverse-deterministic or no such transition exists.
    #[inline]
    pub fn inverse_transition(&self, q: StateId, b: Letter) -> Option<(Letter, StateId)> {
        self.inverse.as_ref().and_then(|inv| inv[q.index() * self.alphabet.len() + b.index()])
    }

    /// All transitions `(q, a, b, p)` ordered by state, then input letter.
    pub fn transitions(&self) -> impl Iterator<Item = (StateId, Letter, Letter, StateId)> + '_ {
        let n = self.alphabet.len();
        self.table.iter().enumerate().filter_map(move |(i, e)| {
            e.map(|(b, p)| (StateId((i / n) as u32), Letter((i % n) as u32), b, p))
        })
    }

    pub fn is_inverse_deterministic(&self) -> bool {
        self.inverse.is_some()
    }

    /// Parses sequence tokens. A token naming a state is that state; otherwise
    /// a `~` prefix selects the inverse of the named state.
    pub fn parse_sequence<S: AsRef<str>>(&self, toks: &[S]) -> Result<StateSequence> {
        let mut items = Vec::with_capacity(toks.len());
        for t in toks {
            let t = t.as_ref();
            if let Some(q) = self.state(t) {
                items.push(SignedState::plain(q));
            } else if let Some(q) = t.strip_prefix(INVERSE_PREFIX).and_then(|s| self.state(s)) {
                if !self.is_inverse_deterministic() {
                    return Err(Error::NotInverseDeterministic(self.name.clone()));
                }
                items.push(SignedState::inverse(q));
            } else {
                return Err(Error::UnknownState(t.to_string()));
            }
        }
        Ok(StateSequence(items))
    }

    pub fn parse_sequence_str(&self, s: &str) -> Result<StateSequence> {
        let toks: Vec<&str> = s.split_whitespace().collect();
        self.parse_sequence(&toks)
    }

    pub fn sequence_tokens(&self, seq: &StateSequence) -> Vec<String> {
        seq.items()
            .iter()
            .map(|s| {
                if s.inverted {
                    format!("{INVERSE_PREFIX}{}", self.state_name(s.base))
                } else {
                    self.state_name(s.base).to_string()
                }
            })
            .collect()
    }

    fn check_signed(&self, s: SignedState) -> Result<()> {
        if s.base.index() >= self.states.len() {
            return Err(Error::UnknownState(format!("#{}", s.base.0)));
        }
        if s.inverted && !self.is_inverse_deterministic() {
            return Err(Error::NotInverseDeterministic(self.name.clone()));
        }
        Ok(())
    }

    fn check_letter(&self, a: Letter) -> Result<()> {
        if !self.alphabet.contains(a) {
            return Err(Error::UnknownLetter(format!("#{}", a.0)));
        }
        Ok(())
    }

    #[inline]
    pub(crate) fn step_unchecked(&self, s: SignedState, a: Letter) -> Option<(Letter, StateId)> {
        if s.inverted {
            self.inverse_transition(s.base, a)
        } else {
            self.transition(s.base, a)
        }
    }

    /// One letter of the action of a signed state.
    pub fn act_step(&self, s: SignedState, a: Letter) -> Result<Option<(Letter, SignedState)>> {
        self.check_signed(s)?;
        self.check_letter(a)?;
        Ok(self
            .step_unchecked(s, a)
            .map(|(b, p)| (b, SignedState { base: p, inverted: s.inverted })))
    }

    /// Applies a sequence to a word, rightmost item first for every letter.
    pub fn act_word(&self, seq: &StateSequence, u: &[Letter]) -> Result<ActOutcome> {
        for &s in seq.items() {
            self.check_signed(s)?;
        }
        for &a in u {
            self.check_letter(a)?;
        }
        let mut items = seq.0.clone();
        let mut output = Vec::with_capacity(u.len());
        for (pos, &letter) in u.iter().enumerate() {
            let mut a = letter;
            for item in items.iter_mut().rev() {
                match self.step_unchecked(*item, a) {
                    Some((b, p)) => {
                        item.base = p;
                        a = b;
                    }
                    None => return Ok(ActOutcome::UndefinedAt(pos)),
                }
            }
            output.push(a);
        }
        Ok(ActOutcome::Defined { output, state: StateSequence(items) })
    }

    pub fn check_properties(&self) -> PropertyReport {
        let n = self.alphabet.len();
        let complete = self.table.iter().all(Option::is_some);
        let inverse_deterministic = self.inverse.is_some();
        let inverse_complete = (0..self.states.len()).all(|q| {
            let mut seen = vec![false; n];
            for (b, _) in self.table[q * n..(q + 1) * n].iter().flatten() {
                seen[b.index()] = true;
            }
            seen.into_iter().all(|x| x)
        });
        // d̄_a(p) <= 1 on inputs, and the same on outputs
        let mut by_input: HashMap<(Letter, StateId), u32> = HashMap::new();
        let mut by_output: HashMap<(Letter, StateId), u32> = HashMap::new();
        for (_, a, b, p) in self.transitions() {
            *by_input.entry((a, p)).or_default() += 1;
            *by_output.entry((b, p)).or_default() += 1;
        }
        let reversible = by_input.values().all(|&c| c <= 1);
        let bireversible = reversible && by_output.values().all(|&c| c <= 1);
        PropertyReport {
            deterministic: true,
            complete,
            inverse_deterministic,
            inverse_complete,
            reversible,
            bireversible,
            is_s_bar_automaton: inverse_deterministic,
            is_g_automaton: complete && inverse_deterministic,
        }
    }

    pub fn to_builder(&self) -> MealyBuilder {
        let mut b = MealyBuilder::new(self.name.clone());
        for tok in self.alphabet.tokens() {
            b.letter(tok).expect("letters were validated");
        }
        for s in &self.states {
            b.state(s).expect("states were validated");
        }
        for (q, a, out, p) in self.transitions() {
            b.set(q, a, out, p).expect("deterministic source");
        }
        b
    }

    /// The inverse automaton over fresh states `~q`, with every transition's
    /// input and output swapped.
    pub fn invert(&self) -> Result<MealyAutomaton> {
        if !self.is_inverse_deterministic() {
            return Err(Error::NotInverseDeterministic(self.name.clone()));
        }
        let mut b = MealyBuilder::new(format!("{}.inv", self.name));
        for tok in self.alphabet.tokens() {
            b.letter(tok)?;
        }
        for s in &self.states {
            b.state(&format!("{INVERSE_PREFIX}{s}"))?;
        }
        for (q, a, out, p) in self.transitions() {
            b.set(q, out, a, p)?;
        }
        b.build()
    }

    /// Disjoint union. When the state sets intersect, every state of each
    /// operand is prefixed with its automaton's name (`NAME.q`; the right
    /// operand uses `NAME'.q` if both names agree).
    pub fn union(&self, other: &MealyAutomaton) -> MealyAutomaton {
        let collide = other.states.iter().any(|s| self.state_index.contains_key(s));
        let (left_prefix, right_prefix) = if !collide {
            (String::new(), String::new())
        } else if self.name == other.name {
            (format!("{}.", self.name), format!("{}'.", other.name))
        } else {
            (format!("{}.", self.name), format!("{}.", other.name))
        };
        let mut b = MealyBuilder::new(format!("{}+{}", self.name, other.name));
        for tok in self.alphabet.tokens().iter().chain(other.alphabet.tokens()) {
            b.letter(tok).expect("validated letter");
        }
        let left: Vec<StateId> = self
            .states
            .iter()
            .map(|s| b.state(&format!("{left_prefix}{s}")).expect("validated state"))
            .collect();
        let right: Vec<StateId> = other
            .states
            .iter()
            .map(|s| b.state(&format!("{right_prefix}{s}")).expect("validated state"))
            .collect();
        for (src, ids) in [(self, &left), (other, &right)] {
            for (q, a, out, p) in src.transitions() {
                let a = b.letter(src.alphabet.token(a)).expect("validated letter");
                let out = b.letter(src.alphabet.token(out)).expect("validated letter");
                b.set(ids[q.index()], a, out, ids[p.index()]).expect("disjoint states");
            }
        }
        b.build().expect("union of non-empty automata")
    }

    /// The dual automaton: letters become states and states become letters,
    /// with a transition `a –q/p→ b` for every `q –a/b→ p`.
    pub fn dual(&self) -> Result<MealyAutomaton> {
        let mut b = MealyBuilder::new(format!("{}.dual", self.name));
        for s in &self.states {
            b.letter(s)?;
        }
        for tok in self.alphabet.tokens() {
            b.state(tok)?;
        }
        for (q, a, out, p) in self.transitions() {
            b.set(
                StateId(a.0),
                Letter(q.0),
                Letter(p.0),
                StateId(out.0),
            )?;
        }
        b.build()
    }

    /// Zero-adjunction completion: keeps every state and transition, adds the
    /// letter `_bot` and the sink `_zero`, and routes every missing
    /// `(q, a)` as well as every `_bot` input to the sink with output `_bot`.
    ///
    /// Existing states and letters keep their indices, so a sequence or word
    /// over `self` is also one over the result (the hatted copy).
    pub fn complete_with_zero(&self) -> Result<MealyAutomaton> {
        if self.alphabet.letter(BOTTOM_LETTER).is_some() {
            return Err(Error::ReservedTokenCollision(BOTTOM_LETTER.into()));
        }
        if self.state(ZERO_STATE).is_some() {
            return Err(Error::ReservedTokenCollision(ZERO_STATE.into()));
        }
        let mut b = self.to_builder();
        b.name = format!("{}.hat", self.name);
        let bot = b.letter(BOTTOM_LETTER)?;
        let zero = b.state(ZERO_STATE)?;
        for q in self.state_ids() {
            for a in self.alphabet.letters() {
                if self.transition(q, a).is_none() {
                    b.set(q, a, bot, zero)?;
                }
            }
            b.set(q, bot, bot, zero)?;
        }
        for a in self.alphabet.letters().chain(std::iter::once(bot)) {
            b.set(zero, a, bot, zero)?;
        }
        b.build()
    }

    /// Renames letters; tokens absent from `mapping` are kept.
    pub fn rename_letters(&self, mapping: &[(&str, &str)]) -> Result<MealyAutomaton> {
        let map: HashMap<&str, &str> = mapping.iter().copied().collect();
        let tokens: Vec<String> = self
            .alphabet
            .tokens()
            .iter()
            .map(|t| map.get(t.as_str()).map_or_else(|| t.clone(), |s| s.to_string()))
            .collect();
        let alphabet = Alphabet::new(tokens)?;
        Ok(MealyAutomaton { alphabet, ..self.clone() })
    }

    /// Sub-automaton of the states reachable from `roots`, in original order.
    pub fn restrict_to_reachable(&self, roots: &[StateId]) -> MealyAutomaton {
        let mut seen = vec![false; self.states.len()];
        let mut stack: Vec<StateId> = roots.to_vec();
        while let Some(q) = stack.pop() {
            if std::mem::replace(&mut seen[q.index()], true) {
                continue;
            }
            for a in self.alphabet.letters() {
                if let Some((_, p)) = self.transition(q, a) {
                    if !seen[p.index()] {
                        stack.push(p);
                    }
                }
            }
        }
        let mut b = MealyBuilder::new(self.name.clone());
        for tok in self.alphabet.tokens() {
            b.letter(tok).expect("validated letter");
        }
        let mut remap = vec![None; self.states.len()];
        for q in self.state_ids().filter(|q| seen[q.index()]) {
            remap[q.index()] = Some(b.state(self.state_name(q)).expect("validated state"));
        }
        for (q, a, out, p) in self.transitions() {
            if let (Some(q2), Some(p2)) = (remap[q.index()], remap[p.index()]) {
                b.set(q2, a, out, p2).expect("deterministic source");
            }
        }
        b.build().expect("non-empty root set")
    }

    /// Canonical listing for isomorphism checks: states are renumbered in BFS
    /// order, starting from the lexicographically smallest unvisited state and
    /// expanding letters in token order. Letters keep their tokens.
    pub fn canonical_form(&self) -> Vec<(usize, String, String, usize)> {
        let mut order: Vec<StateId> = self.state_ids().collect();
        order.sort_by(|a, b| self.state_name(*a).cmp(self.state_name(*b)));
        let letters = self.alphabet.letters_by_token();
        let mut number: Vec<Option<usize>> = vec![None; self.states.len()];
        let mut next = 0;
        let mut bfs: Vec<StateId> = Vec::with_capacity(self.states.len());
        for &start in &order {
            if number[start.index()].is_some() {
                continue;
            }
            number[start.index()] = Some(next);
            next += 1;
            let mut queue = VecDeque::from([start]);
            while let Some(q) = queue.pop_front() {
                bfs.push(q);
                for &a in &letters {
                    if let Some((_, p)) = self.transition(q, a) {
                        if number[p.index()].is_none() {
                            number[p.index()] = Some(next);
                            next += 1;
                            queue.push_back(p);
                        }
                    }
                }
            }
        }
        let mut out = Vec::new();
        for q in bfs {
            for &a in &letters {
                if let Some((b, p)) = self.transition(q, a) {
                    out.push((
                        number[q.index()].unwrap(),
                        self.alphabet.token(a).to_string(),
                        self.alphabet.token(b).to_string(),
                        number[p.index()].unwrap(),
                    ));
                }
            }
        }
        out
    }

    pub fn is_isomorphic_to(&self, other: &MealyAutomaton) -> bool {
        self.num_states() == other.num_states() && self.canonical_form() == other.canonical_form()
    }
}

/// Incremental constructor for [`MealyAutomaton`].
#[derive(Debug, Clone)]
pub struct MealyBuilder {
    name: String,
    alphabet: Alphabet,
    states: Vec<String>,
    state_index: HashMap<String, StateId>,
    transitions: HashMap<(StateId, Letter), (Letter, StateId)>,
}

impl MealyBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        MealyBuilder {
            name: name.into(),
            alphabet: Alphabet::default(),
            states: Vec::new(),
            state_index: HashMap::new(),
            transitions: HashMap::new(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Returns the letter for `tok`, declaring it if needed.
    pub fn letter(&mut self, tok: &str) -> Result<Letter> {
        self.alphabet.insert(tok.to_string())
    }

    /// Declares a new letter; fails if it already exists.
    pub fn add_letter(&mut self, tok: &str) -> Result<Letter> {
        if self.alphabet.letter(tok).is_some() {
            return Err(Error::DuplicateLetter(tok.to_string()));
        }
        self.letter(tok)
    }

    /// Returns the state named `name`, declaring it if needed.
    pub fn state(&mut self, name: &str) -> Result<StateId> {
        if let Some(&q) = self.state_index.get(name) {
            return Ok(q);
        }
        check_state_token(name)?;
        let q = StateId(self.states.len() as u32);
        self.states.push(name.to_string());
        self.state_index.insert(name.to_string(), q);
        Ok(q)
    }

    /// Declares a new state; fails if it already exists.
    pub fn add_state(&mut self, name: &str) -> Result<StateId> {
        if self.state_index.contains_key(name) {
            return Err(Error::DuplicateState(name.to_string()));
        }
        self.state(name)
    }

    pub fn lookup_state(&self, name: &str) -> Option<StateId> {
        self.state_index.get(name).copied()
    }

    pub fn lookup_letter(&self, tok: &str) -> Option<Letter> {
        self.alphabet.letter(tok)
    }

    pub fn has_transition(&self, q: StateId, a: Letter) -> bool {
        self.transitions.contains_key(&(q, a))
    }

    pub fn get(&self, q: StateId, a: Letter) -> Option<(Letter, StateId)> {
        self.transitions.get(&(q, a)).copied()
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    /// Adds `q –a/b→ p`. Re-adding the same transition is a no-op; a
    /// different transition for the same `(q, a)` is an error.
    pub fn set(&mut self, q: StateId, a: Letter, b: Letter, p: StateId) -> Result<()> {
        if let Some(&old) = self.transitions.get(&(q, a)) {
            if old != (b, p) {
                return Err(Error::ConflictingTransition {
                    state: self.states[q.index()].clone(),
                    letter: self.alphabet.token(a).to_string(),
                });
            }
            return Ok(());
        }
        self.transitions.insert((q, a), (b, p));
        Ok(())
    }

    /// Adds a transition between declared states over declared letters.
    pub fn transition(&mut self, q: &str, a: &str, b: &str, p: &str) -> Result<()> {
        let find_state = |s: &str| {
            self.state_index.get(s).copied().ok_or_else(|| Error::UnknownState(s.to_string()))
        };
        let find_letter =
            |t: &str| self.alphabet.letter(t).ok_or_else(|| Error::UnknownLetter(t.to_string()));
        let (q, p) = (find_state(q)?, find_state(p)?);
        let (a, b) = (find_letter(a)?, find_letter(b)?);
        self.set(q, a, b, p)
    }

    /// Adds `q –x/x→ p` for every listed letter.
    pub fn identity_edges(&mut self, q: StateId, letters: &[Letter], p: StateId) -> Result<()> {
        for &x in letters {
            self.set(q, x, x, p)?;
        }
        Ok(())
    }

    pub fn build(self) -> Result<MealyAutomaton> {
        if self.states.is_empty() || self.alphabet.is_empty() {
            return Err(Error::EmptyAutomaton(self.name));
        }
        let n = self.alphabet.len();
        let mut table: Vec<Entry> = vec![None; self.states.len() * n];
        let mut inverse: Vec<Entry> = vec![None; self.states.len() * n];
        let mut inverse_ok = true;
        for (&(q, a), &(b, p)) in &self.transitions {
            table[q.index() * n + a.index()] = Some((b, p));
            let slot = &mut inverse[q.index() * n + b.index()];
            if slot.is_some() {
                inverse_ok = false;
            }
            *slot = Some((a, p));
        }
        Ok(MealyAutomaton {
            name: self.name,
            alphabet: self.alphabet,
            states: self.states,
            state_index: self.state_index,
            table,
            inverse: inverse_ok.then_some(inverse),
        })
    }
}
