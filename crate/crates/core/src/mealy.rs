//! Invertible Mealy automata over the alphabet `{1..p}`.
//!
//! Letters are 1-based at every public boundary (words, MAF files, root
//! permutations) and 0-based inside the transition tables.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use rustc_hash::FxHashMap;
use thiserror::Error;

/// Errors raised while building, parsing or combining machines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MealyError {
    #[error("syntax error on line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("state `{0}` is not invertible: its outputs are not a permutation")]
    NotInvertible(String),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("duplicate state `{0}`")]
    DuplicateState(String),
    #[error("letter {letter} out of range 1..={p}")]
    LetterOutOfRange { letter: usize, p: usize },
    #[error("alphabet mismatch: {0} vs {1}")]
    AlphabetMismatch(usize, usize),
    #[error("alphabet size {0} is not supported (need 2 <= p <= 255)")]
    BadAlphabet(usize),
    #[error("state index {0} out of range")]
    BadState(usize),
}

/// A word over `{1..p}`. Stored 0-based.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    /// Builds a word from 1-based letters.
    pub fn from_letters<I: IntoIterator<Item = usize>>(letters: I) -> Result<Self, MealyError> {
        letters
            .into_iter()
            .map(|l| {
                if (1..=255).contains(&l) {
                    Ok((l - 1) as u8)
                } else {
                    Err(MealyError::LetterOutOfRange { letter: l, p: 255 })
                }
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Word)
    }

    pub(crate) fn from_raw(raw: Vec<u8>) -> Self {
        Word(raw)
    }

    pub(crate) fn raw(&self) -> &[u8] {
        &self.0
    }

    /// 1-based letters.
    pub fn letters(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().map(|&l| l as usize + 1)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn repeat(&self, times: usize) -> Word {
        Word(self.0.repeat(times))
    }

    pub fn check_alphabet(&self, p: usize) -> Result<(), MealyError> {
        match self.0.iter().find(|&&l| l as usize >= p) {
            Some(&l) => Err(MealyError::LetterOutOfRange { letter: l as usize + 1, p }),
            None => Ok(()),
        }
    }

    /// All words of length `len` over `{1..p}` in lexicographic order.
    pub fn all_of_length(p: usize, len: usize) -> impl Iterator<Item = Word> {
        let total = p.checked_pow(len as u32).expect("word enumeration overflow");
        (0..total).map(move |mut idx| {
            let mut v = vec![0u8; len];
            for slot in v.iter_mut().rev() {
                *slot = (idx % p) as u8;
                idx /= p;
            }
            Word(v)
        })
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("ε");
        }
        let wide = self.0.iter().any(|&l| l >= 9);
        for (i, l) in self.letters().enumerate() {
            if wide && i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = MealyError;

    /// Accepts `112`, `1,1,2` or the empty string / `ε` / `e` for the empty word.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() || s == "ε" || s == "e" {
            return Ok(Word::empty());
        }
        let bad = || MealyError::Syntax { line: 0, msg: format!("bad word `{s}`") };
        if s.contains(',') {
            let letters = s
                .split(',')
                .map(|t| t.trim().parse::<usize>().map_err(|_| bad()))
                .collect::<Result<Vec<_>, _>>()?;
            Word::from_letters(letters)
        } else {
            let letters = s
                .chars()
                .map(|c| c.to_digit(10).map(|d| d as usize).ok_or_else(bad))
                .collect::<Result<Vec<_>, _>>()?;
            Word::from_letters(letters)
        }
    }
}

/// A finite invertible Mealy machine. Transition tables are flat
/// `state * p + letter` arrays.
#[derive(Clone, Debug)]
pub struct MealyMachine {
    p: usize,
    out: Vec<u8>,
    next: Vec<u32>,
    names: Option<Vec<String>>,
}

impl PartialEq for MealyMachine {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.out == other.out && self.next == other.next
    }
}

impl Eq for MealyMachine {}

impl MealyMachine {
    /// Builds a machine from 0-based tables, validating totality and
    /// invertibility.
    pub fn from_tables(
        p: usize,
        out: Vec<u8>,
        next: Vec<u32>,
        names: Option<Vec<String>>,
    ) -> Result<Self, MealyError> {
        if !(2..=255).contains(&p) {
            return Err(MealyError::BadAlphabet(p));
        }
        if out.len() != next.len() || !out.len().is_multiple_of(p) || out.is_empty() {
            return Err(MealyError::Syntax { line: 0, msg: "transition tables have inconsistent sizes".into() });
        }
        let n = out.len() / p;
        let m = MealyMachine { p, out, next, names };
        for s in 0..n {
            if let Some(&t) = m.next[s * p..(s + 1) * p].iter().find(|&&t| t as usize >= n) {
                return Err(MealyError::BadState(t as usize));
            }
            if !is_permutation(m.row(s)) {
                return Err(MealyError::NotInvertible(m.state_name(s)));
            }
        }
        if let Some(names) = &m.names {
            if names.len() != n {
                return Err(MealyError::Syntax { line: 0, msg: "name list length mismatch".into() });
            }
        }
        Ok(m)
    }

    pub(crate) fn from_tables_unchecked(p: usize, out: Vec<u8>, next: Vec<u32>) -> Self {
        debug_assert_eq!(out.len(), next.len());
        MealyMachine { p, out, next, names: None }
    }

    /// The one-state identity machine.
    pub fn identity(p: usize) -> Result<Self, MealyError> {
        MealyMachine::from_tables(p, (0..p as u8).collect(), vec![0; p], None)
    }

    pub fn alphabet_size(&self) -> usize {
        self.p
    }

    pub fn num_states(&self) -> usize {
        self.out.len() / self.p
    }

    /// Output letters (0-based) of state `s`, indexed by input letter.
    pub(crate) fn row(&self, s: usize) -> &[u8] {
        &self.out[s * self.p..(s + 1) * self.p]
    }

    pub(crate) fn succ(&self, s: usize) -> &[u32] {
        &self.next[s * self.p..(s + 1) * self.p]
    }

    pub(crate) fn tables(&self) -> (&[u8], &[u32]) {
        (&self.out, &self.next)
    }

    pub fn names(&self) -> Option<&[String]> {
        self.names.as_deref()
    }

    pub fn state_name(&self, s: usize) -> String {
        match &self.names {
            Some(names) => names[s].clone(),
            None => format!("s{s}"),
        }
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        match &self.names {
            Some(names) => names.iter().position(|n| n == name),
            None => name.strip_prefix('s').and_then(|i| i.parse().ok()).filter(|&i| i < self.num_states()),
        }
    }

    /// Output letter (1-based) and next state of `s` on input letter `x` (1-based).
    pub fn transition(&self, s: usize, x: usize) -> Result<(usize, usize), MealyError> {
        if s >= self.num_states() {
            return Err(MealyError::BadState(s));
        }
        if x == 0 || x > self.p {
            return Err(MealyError::LetterOutOfRange { letter: x, p: self.p });
        }
        let i = s * self.p + x - 1;
        Ok((self.out[i] as usize + 1, self.next[i] as usize))
    }

    /// Whether the state acts trivially on length-1 words and all its
    /// successors are itself: the one-state identity pattern.
    pub(crate) fn is_identity_state(&self, s: usize) -> bool {
        self.row(s).iter().enumerate().all(|(x, &y)| x == y as usize)
            && self.succ(s).iter().all(|&t| t as usize == s)
    }

    pub fn with_names(mut self, names: Vec<String>) -> Result<Self, MealyError> {
        if names.len() != self.num_states() {
            return Err(MealyError::Syntax { line: 0, msg: "name list length mismatch".into() });
        }
        self.names = Some(names);
        Ok(self)
    }

    pub fn pointed(self, start: usize) -> Result<PointedMachine, MealyError> {
        PointedMachine::new(self, start)
    }

    /// Serializes in MAF v1.
    pub fn to_maf(&self) -> String {
        let mut s = format!("mealy p={} states={}\n", self.p, self.num_states());
        for q in 0..self.num_states() {
            s.push_str(&self.state_name(q));
            s.push_str(" |");
            for x in 0..self.p {
                let i = q * self.p + x;
                s.push_str(&format!(" {}:{}", self.out[i] + 1, self.state_name(self.next[i] as usize)));
            }
            s.push('\n');
        }
        s
    }

    /// Parses a MAF v1 document.
    pub fn parse_maf(text: &str) -> Result<Self, MealyError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let syntax = |line: usize, msg: &str| MealyError::Syntax { line, msg: msg.to_string() };

        let (hline, header) = lines.next().ok_or_else(|| syntax(1, "missing `mealy` header"))?;
        let mut fields = header.split_whitespace();
        if fields.next() != Some("mealy") {
            return Err(syntax(hline, "expected `mealy p=<int> states=<int>`"));
        }
        let mut header_int = |key: &str| -> Result<usize, MealyError> {
            fields
                .next()
                .and_then(|f| f.strip_prefix(key))
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| syntax(hline, &format!("expected `{key}<int>`")))
        };
        let p = header_int("p=")?;
        let n = header_int("states=")?;
        if fields.next().is_some() {
            return Err(syntax(hline, "trailing fields in header"));
        }
        if !(2..=255).contains(&p) {
            return Err(MealyError::BadAlphabet(p));
        }

        let mut names = Vec::with_capacity(n);
        let mut raw: Vec<(usize, Vec<(usize, String)>)> = Vec::with_capacity(n);
        for (line, body) in lines {
            let (name, rest) = body.split_once('|').ok_or_else(|| syntax(line, "expected `<name> | ...`"))?;
            let name = name.trim();
            if !valid_state_name(name) {
                return Err(syntax(line, &format!("invalid state name `{name}`")));
            }
            if names.iter().any(|n| n == name) {
                return Err(MealyError::DuplicateState(name.to_string()));
            }
            let trans = rest
                .split_whitespace()
                .map(|t| {
                    let (o, nx) = t.split_once(':').ok_or_else(|| syntax(line, &format!("bad transition `{t}`")))?;
                    let o: usize = o.parse().map_err(|_| syntax(line, &format!("bad output letter `{o}`")))?;
                    if o == 0 || o > p {
                        return Err(syntax(line, &format!("output letter {o} out of range 1..={p}")));
                    }
                    Ok((o - 1, nx.to_string()))
                })
                .collect::<Result<Vec<_>, _>>()?;
            if trans.len() != p {
                return Err(syntax(line, &format!("expected {p} transitions, found {}", trans.len())));
            }
            names.push(name.to_string());
            raw.push((line, trans));
        }
        if names.len() != n {
            return Err(syntax(hline, &format!("header declares {n} states, found {}", names.len())));
        }

        let mut out = Vec::with_capacity(n * p);
        let mut next = Vec::with_capacity(n * p);
        for (_, trans) in &raw {
            for (o, nx) in trans {
                let t = names.iter().position(|m| m == nx).ok_or_else(|| MealyError::UnknownState(nx.clone()))?;
                out.push(*o as u8);
                next.push(t as u32);
            }
        }
        MealyMachine::from_tables(p, out, next, Some(names))
    }
}

impl FromStr for MealyMachine {
    type Err = MealyError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        MealyMachine::parse_maf(s)
    }
}

fn valid_state_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn is_permutation(row: &[u8]) -> bool {
    let mut seen = vec![false; row.len()];
    for &y in row {
        match seen.get_mut(y as usize) {
            Some(s) if !*s => *s = true,
            _ => return false,
        }
    }
    true
}

/// A machine together with a distinguished start state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointedMachine {
    pub(crate) machine: MealyMachine,
    pub(crate) start: usize,
}

impl PointedMachine {
    pub fn new(machine: MealyMachine, start: usize) -> Result<Self, MealyError> {
        if start >= machine.num_states() {
            return Err(MealyError::BadState(start));
        }
        Ok(PointedMachine { machine, start })
    }

    pub fn machine(&self) -> &MealyMachine {
        &self.machine
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn alphabet_size(&self) -> usize {
        self.machine.p
    }
}

/// Image of `w` under the transformation of `m`'s start state.
pub fn act(m: &PointedMachine, w: &Word) -> Result<Word, MealyError> {
    w.check_alphabet(m.machine.p)?;
    Ok(Word(act_raw(&m.machine, m.start, w.raw())))
}

pub(crate) fn act_raw(m: &MealyMachine, start: usize, w: &[u8]) -> Vec<u8> {
    let p = m.p;
    let mut s = start;
    w.iter()
        .map(|&x| {
            let i = s * p + x as usize;
            s = m.next[i] as usize;
            m.out[i]
        })
        .collect()
}

/// Composition "apply `m1`, then `m2`", built on the reachable pairs only.
pub fn product(m1: &PointedMachine, m2: &PointedMachine) -> Result<PointedMachine, MealyError> {
    if m1.machine.p != m2.machine.p {
        return Err(MealyError::AlphabetMismatch(m1.machine.p, m2.machine.p));
    }
    Ok(PointedMachine { machine: product_raw(&m1.machine, m1.start, &m2.machine, m2.start), start: 0 })
}

pub(crate) fn product_raw(a: &MealyMachine, sa: usize, b: &MealyMachine, sb: usize) -> MealyMachine {
    let p = a.p;
    let mut index: FxHashMap<(u32, u32), u32> = FxHashMap::default();
    let mut pairs: Vec<(u32, u32)> = vec![(sa as u32, sb as u32)];
    index.insert(pairs[0], 0);
    let mut out = Vec::new();
    let mut next = Vec::new();
    let mut k = 0;
    while k < pairs.len() {
        let (i, j) = pairs[k];
        for x in 0..p {
            let ia = i as usize * p + x;
            let y = a.out[ia] as usize;
            let ib = j as usize * p + y;
            out.push(b.out[ib]);
            let pair = (a.next[ia], b.next[ib]);
            let id = *index.entry(pair).or_insert_with(|| {
                pairs.push(pair);
                (pairs.len() - 1) as u32
            });
            next.push(id);
        }
        k += 1;
    }
    MealyMachine::from_tables_unchecked(p, out, next)
}

/// Inverse machine: input and output labels swapped on every transition.
pub fn invert(m: &PointedMachine) -> PointedMachine {
    PointedMachine { machine: invert_raw(&m.machine), start: m.start }
}

pub(crate) fn invert_raw(m: &MealyMachine) -> MealyMachine {
    let p = m.p;
    let mut out = vec![0u8; m.out.len()];
    let mut next = vec![0u32; m.next.len()];
    for s in 0..m.num_states() {
        for x in 0..p {
            let y = m.out[s * p + x] as usize;
            out[s * p + y] = x as u8;
            next[s * p + y] = m.next[s * p + x];
        }
    }
    MealyMachine { p, out, next, names: m.names.clone() }
}

/// Trims to states reachable from the start, merges equivalent states by
/// partition refinement, and renumbers in BFS order (letters ascending)
/// from the start, which becomes state 0.
pub fn minimize(m: &PointedMachine) -> PointedMachine {
    PointedMachine { machine: minimize_raw(&m.machine, m.start), start: 0 }
}

pub(crate) fn minimize_raw(m: &MealyMachine, start: usize) -> MealyMachine {
    let classes = refine(m, start);
    let (reach, class) = classes;
    // Representative of each class (first reachable member).
    let nclasses = class.iter().filter(|&&c| c != u32::MAX).max().map_or(0, |&c| c as usize + 1);
    let mut rep = vec![u32::MAX; nclasses];
    for &s in &reach {
        let c = class[s as usize] as usize;
        if rep[c] == u32::MAX {
            rep[c] = s;
        }
    }
    let p = m.p;
    // BFS renumbering over classes.
    let mut order = vec![u32::MAX; nclasses];
    let mut queue = VecDeque::new();
    let c0 = class[start] as usize;
    order[c0] = 0;
    queue.push_back(c0);
    let mut seq = Vec::with_capacity(nclasses);
    while let Some(c) = queue.pop_front() {
        seq.push(c);
        let s = rep[c] as usize;
        for x in 0..p {
            let t = class[m.next[s * p + x] as usize] as usize;
            if order[t] == u32::MAX {
                order[t] = seq.len() as u32 + queue.len() as u32;
                queue.push_back(t);
            }
        }
    }
    let mut out = Vec::with_capacity(seq.len() * p);
    let mut next = Vec::with_capacity(seq.len() * p);
    for &c in &seq {
        let s = rep[c] as usize;
        out.extend_from_slice(&m.out[s * p..(s + 1) * p]);
        next.extend(m.next[s * p..(s + 1) * p].iter().map(|&t| order[class[t as usize] as usize]));
    }
    MealyMachine::from_tables_unchecked(p, out, next)
}

/// BFS renumbering from `start` without merging. Correct as a canonical
/// form only when `m` restricted to the reachable states is already minimal.
pub(crate) fn reroot_raw(m: &MealyMachine, start: usize) -> MealyMachine {
    let p = m.p;
    let n = m.num_states();
    let mut order = vec![u32::MAX; n];
    let mut seq = vec![start as u32];
    order[start] = 0;
    let mut k = 0;
    while k < seq.len() {
        let s = seq[k] as usize;
        for x in 0..p {
            let t = m.next[s * p + x] as usize;
            if order[t] == u32::MAX {
                order[t] = seq.len() as u32;
                seq.push(t as u32);
            }
        }
        k += 1;
    }
    let mut out = Vec::with_capacity(seq.len() * p);
    let mut next = Vec::with_capacity(seq.len() * p);
    for &s in &seq {
        let s = s as usize;
        out.extend_from_slice(&m.out[s * p..(s + 1) * p]);
        next.extend(m.next[s * p..(s + 1) * p].iter().map(|&t| order[t as usize]));
    }
    MealyMachine::from_tables_unchecked(p, out, next)
}

/// Moore-style refinement restricted to the states reachable from `start`.
/// Returns the reachable states and a class id per state (`u32::MAX` for
/// unreachable ones).
fn refine(m: &MealyMachine, start: usize) -> (Vec<u32>, Vec<u32>) {
    let p = m.p;
    let n = m.num_states();
    let mut seen = vec![false; n];
    let mut reach = vec![start as u32];
    seen[start] = true;
    let mut k = 0;
    while k < reach.len() {
        let s = reach[k] as usize;
        for &t in &m.next[s * p..(s + 1) * p] {
            if !seen[t as usize] {
                seen[t as usize] = true;
                reach.push(t);
            }
        }
        k += 1;
    }
    refine_states(m, reach)
}

/// Partition refinement over an explicit, successor-closed state set.
pub(crate) fn refine_states(m: &MealyMachine, states: Vec<u32>) -> (Vec<u32>, Vec<u32>) {
    let p = m.p;
    let n = m.num_states();
    let mut class = vec![u32::MAX; n];
    let mut count;
    {
        let mut ids: FxHashMap<&[u8], u32> = FxHashMap::default();
        for &s in &states {
            let s = s as usize;
            let next_id = ids.len() as u32;
            class[s] = *ids.entry(&m.out[s * p..(s + 1) * p]).or_insert(next_id);
        }
        count = ids.len();
    }
    let width = p + 1;
    let mut sig = vec![0u32; states.len() * width];
    loop {
        for (k, &s) in states.iter().enumerate() {
            let s = s as usize;
            let row = &mut sig[k * width..(k + 1) * width];
            row[0] = class[s];
            for x in 0..p {
                row[x + 1] = class[m.next[s * p + x] as usize];
            }
        }
        let mut ids: FxHashMap<&[u32], u32> = FxHashMap::default();
        let mut fresh = vec![0u32; states.len()];
        for k in 0..states.len() {
            let next_id = ids.len() as u32;
            fresh[k] = *ids.entry(&sig[k * width..(k + 1) * width]).or_insert(next_id);
        }
        let new_count = ids.len();
        drop(ids);
        for (k, &s) in states.iter().enumerate() {
            class[s as usize] = fresh[k];
        }
        if new_count == count {
            break;
        }
        count = new_count;
    }
    (states, class)
}
