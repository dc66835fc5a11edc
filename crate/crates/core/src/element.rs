//! Group elements as canonical pointed Mealy machines.
//!
//! An [`Element`] is always minimized, trimmed and numbered in BFS order
//! from its start state (state 0), so two elements are equal as
//! transformations of `X*` exactly when their tables are identical.

use std::collections::hash_map::Entry;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use rustc_hash::{FxHashMap, FxHashSet};
use thiserror::Error;

use crate::mealy::{self, MealyError, MealyMachine, PointedMachine, Word};

pub mod expr;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ElementError {
    #[error("alphabet mismatch: {0} vs {1}")]
    AlphabetMismatch(usize, usize),
    #[error(transparent)]
    Mealy(#[from] MealyError),
}

struct Repr {
    machine: MealyMachine,
    digest: u64,
}

/// A canonical automaton-group element. Cheap to clone.
#[derive(Clone)]
pub struct Element(Arc<Repr>);

impl PartialEq for Element {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.digest == other.0.digest && self.0.machine == other.0.machine)
    }
}

impl Eq for Element {}

impl Hash for Element {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.0.digest);
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Element(p={}, states={}, digest={:016x})", self.alphabet_size(), self.size(), self.digest())
    }
}

/// FNV-1a over the canonical tables; stable across runs and platforms.
fn digest(m: &MealyMachine) -> u64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut h = OFFSET;
    let mut eat = |b: u8| {
        h ^= b as u64;
        h = h.wrapping_mul(PRIME);
    };
    eat(m.alphabet_size() as u8);
    let (out, next) = m.tables();
    for (&o, &n) in out.iter().zip(next) {
        eat(o);
        n.to_le_bytes().into_iter().for_each(&mut eat);
    }
    h
}

/// Root permutation and sections: the wreath recursion of an element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootDecomposition {
    /// `pi[x-1]` is the image of letter `x` (1-based).
    pub pi: Vec<usize>,
    /// `sections[x-1]` is `g@x`.
    pub sections: Vec<Element>,
}

impl Element {
    /// Wraps a machine already in canonical form.
    pub(crate) fn from_canonical(machine: MealyMachine) -> Self {
        let digest = digest(&machine);
        Element(Arc::new(Repr { machine, digest }))
    }

    pub fn identity(p: usize) -> Result<Self, ElementError> {
        Ok(Element::from_canonical(MealyMachine::identity(p)?))
    }

    /// The element defined by a pointed machine.
    pub fn from_pointed(m: &PointedMachine) -> Self {
        Element::from_canonical(mealy::minimize_raw(m.machine(), m.start()))
    }

    /// The element defined by state `state` of `machine`.
    pub fn from_state(machine: &MealyMachine, state: usize) -> Result<Self, ElementError> {
        if state >= machine.num_states() {
            return Err(MealyError::BadState(state).into());
        }
        Ok(Element::from_canonical(mealy::minimize_raw(machine, state)))
    }

    pub fn alphabet_size(&self) -> usize {
        self.0.machine.alphabet_size()
    }

    /// Number of states of the canonical machine.
    pub fn size(&self) -> usize {
        self.0.machine.num_states()
    }

    /// Stable 64-bit digest of the canonical form.
    pub fn digest(&self) -> u64 {
        self.0.digest
    }

    /// The canonical machine; its start state is 0.
    pub fn machine(&self) -> &MealyMachine {
        &self.0.machine
    }

    pub fn to_pointed(&self) -> PointedMachine {
        PointedMachine::new(self.0.machine.clone(), 0).expect("canonical machine has state 0")
    }

    /// MAF v1 serialization of the canonical form.
    pub fn to_maf(&self) -> String {
        self.0.machine.to_maf()
    }

    pub fn is_identity(&self) -> bool {
        self.size() == 1 && self.0.machine.is_identity_state(0)
    }

    fn check(&self, other: &Element) -> Result<(), ElementError> {
        if self.alphabet_size() != other.alphabet_size() {
            return Err(ElementError::AlphabetMismatch(self.alphabet_size(), other.alphabet_size()));
        }
        Ok(())
    }

    /// Product acting as `self` first, then `other`: `w^(gh) = (w^g)^h`.
    pub fn try_mul(&self, other: &Element) -> Result<Element, ElementError> {
        self.check(other)?;
        Ok(self.mul(other))
    }

    /// Like [`Element::try_mul`] but panics on alphabet mismatch.
    pub fn mul(&self, other: &Element) -> Element {
        assert_eq!(self.alphabet_size(), other.alphabet_size(), "alphabet mismatch");
        if self.is_identity() {
            return other.clone();
        }
        if other.is_identity() {
            return self.clone();
        }
        let prod = mealy::product_raw(&self.0.machine, 0, &other.0.machine, 0);
        Element::from_canonical(mealy::minimize_raw(&prod, 0))
    }

    pub fn inv(&self) -> Element {
        if self.is_identity() {
            return self.clone();
        }
        Element::from_canonical(mealy::reroot_raw(&mealy::invert_raw(&self.0.machine), 0))
    }

    /// `self^n`, by binary powering; negative exponents invert first.
    pub fn pow(&self, n: i64) -> Element {
        let mut base = if n < 0 { self.inv() } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = Element::identity(self.alphabet_size()).expect("valid alphabet");
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// `self^h = h⁻¹ self h`.
    pub fn conjugate(&self, h: &Element) -> Element {
        h.inv().mul(self).mul(h)
    }

    pub fn try_conjugate(&self, h: &Element) -> Result<Element, ElementError> {
        self.check(h)?;
        Ok(self.conjugate(h))
    }

    /// `[self, h] = self⁻¹ h⁻¹ self h`.
    pub fn commutator(&self, h: &Element) -> Element {
        self.inv().mul(&self.conjugate(h))
    }

    pub fn try_commutator(&self, h: &Element) -> Result<Element, ElementError> {
        self.check(h)?;
        Ok(self.commutator(h))
    }

    /// Root permutation as 1-based images.
    pub fn root_permutation(&self) -> Vec<usize> {
        self.0.machine.row(0).iter().map(|&y| y as usize + 1).collect()
    }

    /// Whether the root permutation is trivial ("fixes X").
    pub fn fixes_root(&self) -> bool {
        self.0.machine.row(0).iter().enumerate().all(|(x, &y)| x == y as usize)
    }

    pub fn root_decompose(&self) -> RootDecomposition {
        let p = self.alphabet_size();
        RootDecomposition {
            pi: self.root_permutation(),
            sections: (0..p).map(|x| self.section_letter(x)).collect(),
        }
    }

    pub(crate) fn state(&self, s: usize) -> Element {
        if s == 0 {
            return self.clone();
        }
        Element::from_canonical(mealy::reroot_raw(&self.0.machine, s))
    }

    /// Section at a 0-based letter.
    pub(crate) fn section_letter(&self, x: usize) -> Element {
        self.state(self.0.machine.succ(0)[x] as usize)
    }

    /// `g@v`: the unique element with `(vw)^g = v^g · w^(g@v)`.
    pub fn section_at(&self, v: &Word) -> Result<Element, ElementError> {
        v.check_alphabet(self.alphabet_size())?;
        let m = &self.0.machine;
        let s = v.raw().iter().fold(0usize, |s, &x| m.succ(s)[x as usize] as usize);
        Ok(self.state(s))
    }

    /// Image of a word.
    pub fn act(&self, w: &Word) -> Result<Word, ElementError> {
        w.check_alphabet(self.alphabet_size())?;
        Ok(Word::from_raw(mealy::act_raw(&self.0.machine, 0, w.raw())))
    }

    /// `v*g`: acts as `g` below `v` and trivially elsewhere.
    pub fn insert(v: &Word, g: &Element) -> Result<Element, ElementError> {
        let p = g.alphabet_size();
        v.check_alphabet(p)?;
        if v.is_empty() || g.is_identity() {
            return Ok(g.clone());
        }
        // Layout: path states 0..k, then the identity state, then g's states.
        let k = v.len();
        let id = k as u32;
        let base = k as u32 + 1;
        let (gout, gnext) = g.0.machine.tables();
        let mut out = Vec::with_capacity((k + 1) * p + gout.len());
        let mut next = Vec::with_capacity(out.capacity());
        for (i, &letter) in v.raw().iter().enumerate() {
            for x in 0..p {
                out.push(x as u8);
                next.push(if x == letter as usize {
                    if i + 1 < k {
                        i as u32 + 1
                    } else {
                        base
                    }
                } else {
                    id
                });
            }
        }
        out.extend(0..p as u8);
        next.extend(std::iter::repeat_n(id, p));
        out.extend_from_slice(gout);
        next.extend(gnext.iter().map(|&t| t + base));
        let m = MealyMachine::from_tables_unchecked(p, out, next);
        Ok(Element::from_canonical(mealy::minimize_raw(&m, 0)))
    }

    /// Equality as transformations (canonical-form comparison).
    pub fn equals(&self, other: &Element) -> Result<bool, ElementError> {
        self.check(other)?;
        Ok(self == other)
    }

    /// All states of the canonical machine as elements, in canonical order.
    pub fn states(&self) -> Vec<Element> {
        (0..self.size()).map(|s| self.state(s)).collect()
    }
}

/// Coinductive equality of two pointed machines: assumes visited pairs
/// equal and compares root permutations, then successors. Independent of
/// minimization, used to cross-check canonical equality.
pub fn equal_coinductive(m1: &PointedMachine, m2: &PointedMachine) -> bool {
    let (a, b) = (m1.machine(), m2.machine());
    if a.alphabet_size() != b.alphabet_size() {
        return false;
    }
    let mut assumed: FxHashSet<(usize, usize)> = FxHashSet::default();
    let mut stack = vec![(m1.start(), m2.start())];
    while let Some((s, t)) = stack.pop() {
        if !assumed.insert((s, t)) {
            continue;
        }
        if a.row(s) != b.row(t) {
            return false;
        }
        stack.extend(a.succ(s).iter().zip(b.succ(t)).map(|(&x, &y)| (x as usize, y as usize)));
    }
    true
}

/// Result of a bounded order computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Order {
    Finite(u64),
    Unbounded,
}

impl Order {
    pub fn finite(self) -> Option<u64> {
        match self {
            Order::Finite(k) => Some(k),
            Order::Unbounded => None,
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Finite(k) => write!(f, "{k}"),
            Order::Unbounded => f.write_str("unbounded"),
        }
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u64, b: u64) -> Option<u64> {
    (a / gcd(a, b)).checked_mul(b)
}

fn perm_order(row: &[u8]) -> u64 {
    let mut seen = vec![false; row.len()];
    let mut acc = 1u64;
    for start in 0..row.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0u64;
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            x = row[x] as usize;
            len += 1;
        }
        acc = lcm(acc, len).unwrap_or(u64::MAX);
    }
    acc
}

#[derive(Clone, Copy)]
enum OrderEdge {
    Lcm,
    Times(u64),
}

/// Order computation with a cache keyed by canonical form.
///
/// The recursion: trivial → 1; an element fixing `X` has the lcm of its
/// section orders; an element whose root permutation has order `m` has
/// order `m · order(g^m)`. The reachable recursion graph is built until
/// its elements hold `limit` states in total; a cycle through a
/// multiplying step means infinite order
/// is not excluded (reported as `Unbounded`), while cycles of lcm steps
/// contribute nothing.
#[derive(Default)]
pub struct OrderCache {
    known: FxHashMap<Element, Order>,
}

impl OrderCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn order(&mut self, g: &Element, limit: usize) -> Order {
        if let Some(&o) = self.known.get(g) {
            return o;
        }
        let mut graph: DiGraph<Element, OrderEdge> = DiGraph::new();
        let mut index: FxHashMap<Element, NodeIndex> = FxHashMap::default();
        let root = graph.add_node(g.clone());
        index.insert(g.clone(), root);
        let mut spent = g.size();
        let mut frontier = vec![root];
        while let Some(u) = frontier.pop() {
            let elem = graph[u].clone();
            if elem.is_identity() || self.known.contains_key(&elem) {
                continue;
            }
            let targets: Vec<(Element, OrderEdge)> = if elem.fixes_root() {
                let mut secs: Vec<Element> = (0..elem.alphabet_size()).map(|x| elem.section_letter(x)).collect();
                secs.dedup();
                secs.into_iter().map(|s| (s, OrderEdge::Lcm)).collect()
            } else {
                let m = perm_order(elem.machine().row(0));
                vec![(elem.pow(m as i64), OrderEdge::Times(m))]
            };
            for (t, kind) in targets {
                let v = match index.entry(t) {
                    Entry::Occupied(o) => *o.get(),
                    Entry::Vacant(slot) => {
                        spent += slot.key().size();
                        if spent > limit {
                            return Order::Unbounded;
                        }
                        let v = graph.add_node(slot.key().clone());
                        slot.insert(v);
                        frontier.push(v);
                        v
                    }
                };
                graph.add_edge(u, v, kind);
            }
        }

        // tarjan_scc yields components in reverse topological order.
        let sccs = tarjan_scc(&graph);
        let mut comp = vec![0usize; graph.node_count()];
        for (ci, c) in sccs.iter().enumerate() {
            for &n in c {
                comp[n.index()] = ci;
            }
        }
        let mut value: Vec<Order> = vec![Order::Finite(1); sccs.len()];
        for (ci, c) in sccs.iter().enumerate() {
            let mut acc = Order::Finite(1);
            for &n in c {
                if let Some(&o) = self.known.get(&graph[n]) {
                    acc = combine(acc, o, OrderEdge::Lcm);
                    continue;
                }
                for e in graph.edges(n) {
                    use petgraph::visit::EdgeRef;
                    let tc = comp[e.target().index()];
                    let kind = *e.weight();
                    if tc == ci {
                        if let OrderEdge::Times(_) = kind {
                            acc = Order::Unbounded;
                        }
                        continue;
                    }
                    acc = combine(acc, value[tc], kind);
                }
            }
            value[ci] = acc;
        }
        let result = value[comp[root.index()]];
        for n in graph.node_indices() {
            self.known.entry(graph[n].clone()).or_insert(value[comp[n.index()]]);
        }
        result
    }
}

fn combine(acc: Order, target: Order, kind: OrderEdge) -> Order {
    match (acc, target) {
        (Order::Finite(a), Order::Finite(t)) => {
            let t = match kind {
                OrderEdge::Lcm => Some(t),
                OrderEdge::Times(m) => t.checked_mul(m),
            };
            t.and_then(|t| lcm(a, t)).map_or(Order::Unbounded, Order::Finite)
        }
        _ => Order::Unbounded,
    }
}

/// Order of `g` with a recursion budget of `limit` states.
pub fn order_bounded(g: &Element, limit: usize) -> Order {
    OrderCache::new().order(g, limit.max(1))
}
