use std::fmt::{self, Write as _};

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use rustc_hash::FxHashMap;

use super::{engel_iterate, finite_order, EngelBudget, EngelError};
use crate::element::{Element, OrderCache};

/// A vertex of the tuple graph.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TupleVertex(pub Vec<Element>);

impl TupleVertex {
    pub fn new(entries: Vec<Element>) -> Self {
        TupleVertex(entries)
    }

    pub fn entries(&self) -> &[Element] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_trivial(&self) -> bool {
        self.0.iter().all(Element::is_identity)
    }

    pub fn max_size(&self) -> usize {
        self.0.iter().map(Element::size).max().unwrap_or(0)
    }

    /// Stable digest combining the entries' canonical digests.
    pub fn digest(&self) -> u64 {
        self.0.iter().fold(0xcbf2_9ce4_8422_2325u64, |h, e| {
            e.digest().to_le_bytes().iter().fold(h, |h, &b| (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3))
        })
    }

    /// Cyclic differences `(g_1⁻¹g_2, …, g_n⁻¹g_1)`.
    pub fn differences(&self) -> TupleVertex {
        let n = self.0.len();
        TupleVertex((0..n).map(|i| self.0[i].inv().mul(&self.0[(i + 1) % n])).collect())
    }
}

impl fmt::Display for TupleVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sizes: Vec<String> = self.0.iter().map(|e| e.size().to_string()).collect();
        write!(f, "{:016x} {}", self.digest(), sizes.join(","))
    }
}

/// `(g, g^h, g^(h²), …, g^(h^(n-1)))`; requires `h^n = 1` and `p | n`.
pub fn start_tuple(g: &Element, h: &Element, n: usize) -> Result<TupleVertex, EngelError> {
    let p = g.alphabet_size();
    if n == 0 || !n.is_multiple_of(p) {
        return Err(EngelError::BadTupleLength { n, p });
    }
    if !h.pow(n as i64).is_identity() {
        return Err(EngelError::OrderMismatch { n });
    }
    let mut entries = Vec::with_capacity(n);
    let mut cur = g.clone();
    for _ in 0..n {
        entries.push(cur.clone());
        cur = cur.conjugate(h);
    }
    Ok(TupleVertex(entries))
}

/// How an edge was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EdgeLabel {
    /// Some difference moves the first level: the edge goes to the differences.
    Difference,
    /// All differences fix the first level: the edge goes to their sections
    /// at this (1-based) letter.
    Section(usize),
}

impl EdgeLabel {
    pub fn descends(self) -> bool {
        matches!(self, EdgeLabel::Section(_))
    }
}

impl fmt::Display for EdgeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EdgeLabel::Difference => f.write_str("diff"),
            EdgeLabel::Section(j) => write!(f, "sect:{j}"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Step {
    pub successors: Vec<(EdgeLabel, TupleVertex)>,
    pub descended: bool,
}

pub fn step_tuple(t: &TupleVertex) -> Step {
    let diffs = t.differences();
    if diffs.0.iter().all(Element::fixes_root) {
        let p = t.0.first().map_or(2, Element::alphabet_size);
        let successors = (0..p)
            .map(|j| (EdgeLabel::Section(j + 1), TupleVertex(diffs.0.iter().map(|d| d.section_letter(j)).collect())))
            .collect();
        Step { successors, descended: true }
    } else {
        Step { successors: vec![(EdgeLabel::Difference, diffs)], descended: false }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// `E_c(g,h) = 1`.
    EngelYes(usize),
    /// Index into [`ExploreReport::cycles`] of a non-trivial cycle.
    EngelNo(usize),
    ResourceExceeded,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::EngelYes(c) => write!(f, "engel-yes c={c}"),
            Verdict::EngelNo(k) => write!(f, "engel-no cycle={k}"),
            Verdict::ResourceExceeded => f.write_str("resource-exceeded"),
        }
    }
}

/// The explored part of the tuple graph.
#[derive(Clone, Debug)]
pub struct ExploreReport {
    /// Vertices in discovery order; vertex 0 is the start tuple.
    pub vertices: Vec<TupleVertex>,
    pub edges: Vec<Vec<(EdgeLabel, usize)>>,
    /// Vertices with an edge to `fail` (entries over budget).
    pub fails: Vec<usize>,
    /// Closed edge paths, one per cyclic strongly connected component.
    pub cycles: Vec<Vec<usize>>,
    /// A budget was exceeded: some edge leads to `fail` or the vertex cap
    /// stopped the exploration.
    pub hit_fail: bool,
    /// Vertices whose successors were computed.
    pub expanded: usize,
    pub verdict: Verdict,
}

impl ExploreReport {
    pub fn is_trivial_cycle(&self, k: usize) -> bool {
        self.cycles[k].iter().all(|&v| self.vertices[v].is_trivial())
    }

    pub fn nontrivial_cycles(&self) -> impl Iterator<Item = &Vec<usize>> + '_ {
        (0..self.cycles.len()).filter(|&k| !self.is_trivial_cycle(k)).map(|k| &self.cycles[k])
    }

    pub fn cycle_vertices(&self, k: usize) -> Vec<TupleVertex> {
        self.cycles[k].iter().map(|&v| self.vertices[v].clone()).collect()
    }

    /// Longest run of consecutive non-descending edges over all explored
    /// paths; `None` if such edges form a cycle.
    pub fn max_nondescending_run(&self) -> Option<usize> {
        let n = self.vertices.len();
        // Longest path in the subgraph of Difference edges, by memoized DFS.
        let mut best: Vec<Option<usize>> = vec![None; n];
        let mut state = vec![0u8; n];
        for root in 0..n {
            if best[root].is_some() {
                continue;
            }
            let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
            state[root] = 1;
            while let Some(&mut (v, ref mut i)) = stack.last_mut() {
                let diff_edges: Vec<usize> =
                    self.edges[v].iter().filter(|(l, _)| !l.descends()).map(|&(_, t)| t).collect();
                if *i < diff_edges.len() {
                    let t = diff_edges[*i];
                    *i += 1;
                    match state[t] {
                        1 => return None,
                        0 => {
                            state[t] = 1;
                            stack.push((t, 0));
                        }
                        _ => {}
                    }
                } else {
                    let run = diff_edges.iter().map(|&t| best[t].unwrap() + 1).max().unwrap_or(0);
                    best[v] = Some(run);
                    state[v] = 2;
                    stack.pop();
                }
            }
        }
        best.into_iter().map(|b| b.unwrap_or(0)).max().or(Some(0))
    }

    /// Line records: `vertex`, `edge`, `fail`, `cycle`, then `verdict`.
    pub fn to_records(&self) -> String {
        let mut s = String::new();
        for (i, v) in self.vertices.iter().enumerate() {
            writeln!(s, "vertex {i} {v}").unwrap();
        }
        for (i, es) in self.edges.iter().enumerate() {
            for (label, t) in es {
                writeln!(s, "edge {i} {t} {label}").unwrap();
            }
        }
        for &i in &self.fails {
            writeln!(s, "fail {i}").unwrap();
        }
        for (k, c) in self.cycles.iter().enumerate() {
            let ids: Vec<String> = c.iter().map(|v| v.to_string()).collect();
            let kind = if self.is_trivial_cycle(k) { "trivial" } else { "nontrivial" };
            writeln!(s, "cycle {k} {kind} {}", ids.join(" ")).unwrap();
        }
        writeln!(s, "verdict {}", self.verdict).unwrap();
        s
    }
}

/// Breadth-first exploration of the tuple graph from `t0` within `budget`,
/// followed by a strongly-connected-component pass that collects cycles.
///
/// A non-trivial cycle is a proof of non-Engel-ness even when the budget
/// stopped the exploration early, so it takes precedence over
/// `ResourceExceeded`.
pub fn explore(t0: &TupleVertex, budget: &EngelBudget) -> ExploreReport {
    let mut vertices = vec![t0.clone()];
    let mut index: FxHashMap<TupleVertex, usize> = FxHashMap::default();
    index.insert(t0.clone(), 0);
    let mut edges: Vec<Vec<(EdgeLabel, usize)>> = vec![Vec::new()];
    let mut fails = Vec::new();
    let mut hit_fail = false;
    let mut expanded = 0;

    if t0.max_size() > budget.max_states {
        fails.push(0);
        hit_fail = true;
    } else {
        let mut k = 0;
        while k < vertices.len() {
            let step = step_tuple(&vertices[k]);
            expanded += 1;
            for (label, succ) in step.successors {
                if succ.max_size() > budget.max_states {
                    if fails.last() != Some(&k) {
                        fails.push(k);
                    }
                    hit_fail = true;
                    continue;
                }
                let target = match index.get(&succ) {
                    Some(&t) => t,
                    None => {
                        if vertices.len() >= budget.max_vertices {
                            hit_fail = true;
                            continue;
                        }
                        let t = vertices.len();
                        index.insert(succ.clone(), t);
                        vertices.push(succ);
                        edges.push(Vec::new());
                        t
                    }
                };
                edges[k].push((label, target));
            }
            k += 1;
            if hit_fail && vertices.len() >= budget.max_vertices {
                break;
            }
        }
    }

    let cycles = find_cycles(&edges);
    let mut report =
        ExploreReport { vertices, edges, fails, cycles, hit_fail, expanded, verdict: Verdict::ResourceExceeded };
    report.verdict = if let Some(k) = (0..report.cycles.len()).find(|&k| !report.is_trivial_cycle(k)) {
        Verdict::EngelNo(k)
    } else if report.hit_fail {
        Verdict::ResourceExceeded
    } else {
        Verdict::EngelYes(depth_to_trivial(&report))
    };
    report
}

/// One closed edge path per cyclic SCC, ordered by smallest vertex id.
fn find_cycles(edges: &[Vec<(EdgeLabel, usize)>]) -> Vec<Vec<usize>> {
    let mut graph: DiGraph<(), ()> = DiGraph::with_capacity(edges.len(), 0);
    let nodes: Vec<NodeIndex> = (0..edges.len()).map(|_| graph.add_node(())).collect();
    for (i, es) in edges.iter().enumerate() {
        for &(_, t) in es {
            graph.add_edge(nodes[i], nodes[t], ());
        }
    }
    let mut comps: Vec<Vec<usize>> = tarjan_scc(&graph)
        .into_iter()
        .map(|c| {
            let mut c: Vec<usize> = c.into_iter().map(|n| n.index()).collect();
            c.sort_unstable();
            c
        })
        .filter(|c| c.len() > 1 || edges[c[0]].iter().any(|&(_, t)| t == c[0]))
        .collect();
    comps.sort();
    comps
        .into_iter()
        .map(|comp| {
            // Shortest cycle through the smallest vertex, staying inside the SCC.
            let start = comp[0];
            let inside = |v: usize| comp.binary_search(&v).is_ok();
            let mut parent: FxHashMap<usize, usize> = FxHashMap::default();
            let mut queue = std::collections::VecDeque::from([start]);
            let mut closing = None;
            'bfs: while let Some(v) = queue.pop_front() {
                for &(_, t) in &edges[v] {
                    if t == start {
                        closing = Some(v);
                        break 'bfs;
                    }
                    if inside(t) && !parent.contains_key(&t) {
                        parent.insert(t, v);
                        queue.push_back(t);
                    }
                }
            }
            let mut path = vec![closing.expect("cyclic component")];
            while *path.last().unwrap() != start {
                path.push(parent[path.last().unwrap()]);
            }
            path.reverse();
            path
        })
        .collect()
}

/// Longest path from vertex 0 to the trivial tuple in a graph whose only
/// cycle is the trivial self-loop.
fn depth_to_trivial(report: &ExploreReport) -> usize {
    let n = report.vertices.len();
    let mut memo: Vec<Option<usize>> = vec![None; n];
    // Post-order over the DAG obtained by dropping self-loops.
    let mut stack = vec![(0usize, 0usize)];
    let mut on = vec![false; n];
    on[0] = true;
    while let Some(&mut (v, ref mut i)) = stack.last_mut() {
        let es = &report.edges[v];
        if *i < es.len() {
            let t = es[*i].1;
            *i += 1;
            if t != v && memo[t].is_none() && !on[t] {
                on[t] = true;
                stack.push((t, 0));
            }
        } else {
            let d = if report.vertices[v].is_trivial() {
                0
            } else {
                es.iter().filter(|&&(_, t)| t != v).map(|&(_, t)| memo[t].unwrap_or(0) + 1).max().unwrap_or(0)
            };
            memo[v] = Some(d);
            stack.pop();
        }
    }
    memo[0].unwrap_or(0)
}

/// Outcome of [`decide_engel_pair`].
#[derive(Clone, Debug)]
pub struct PairDecision {
    pub verdict: Verdict,
    /// Tuple length used for the graph.
    pub n: usize,
    pub order_h: u64,
    /// Sizes of `E_0, E_1, …` from the direct iteration.
    pub sizes: Vec<usize>,
    /// Whether the verdict came from direct iteration.
    pub by_iteration: bool,
    pub report: Option<ExploreReport>,
}

/// Decides Engel(g,h) for torsion `h`: direct iteration up to `max_c`
/// first, then the tuple graph with `n = lcm(order(h), p)`.
pub fn decide_engel_pair(g: &Element, h: &Element, budget: &EngelBudget) -> Result<PairDecision, EngelError> {
    let p = g.alphabet_size();
    let order_h = finite_order(h, &mut OrderCache::new())?;
    let n = {
        let o = order_h as usize;
        let gcd = (1..=o.min(p)).rev().find(|d| o.is_multiple_of(*d) && p.is_multiple_of(*d)).unwrap_or(1);
        o / gcd * p
    };

    let mut sizes = vec![g.size()];
    let mut cur = g.clone();
    let mut c = 0;
    while !cur.is_identity() && c < budget.max_c {
        let next = cur.commutator(h);
        c += 1;
        sizes.push(next.size());
        cur = next;
        if cur.size() > budget.max_states {
            break;
        }
    }
    if cur.is_identity() {
        return Ok(PairDecision { verdict: Verdict::EngelYes(c), n, order_h, sizes, by_iteration: true, report: None });
    }

    let t0 = start_tuple(g, h, n)?;
    let report = explore(&t0, budget);
    let mut verdict = report.verdict.clone();
    if let Verdict::EngelYes(depth) = verdict {
        // The graph bound is an upper bound on the Engel depth; confirm it.
        match engel_iterate(g, h, depth, budget.max_states) {
            Ok(run) if run.value.is_identity() => {}
            _ => verdict = Verdict::ResourceExceeded,
        }
    }
    Ok(PairDecision { verdict, n, order_h, sizes, by_iteration: false, report: Some(report) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::grigorchuk;

    fn scope() -> crate::element::expr::Scope {
        grigorchuk().scope()
    }

    #[test]
    fn trivial_tuple_is_absorbing() {
        let one = grigorchuk().identity();
        let t = TupleVertex::new(vec![one.clone(), one.clone()]);
        let step = step_tuple(&t);
        assert!(step.descended);
        assert_eq!(step.successors.len(), 2);
        assert!(step.successors.iter().all(|(_, s)| s == &t));
        let report = explore(&t, &EngelBudget::default());
        assert_eq!(report.verdict, Verdict::EngelYes(0));
        assert_eq!(report.cycles, vec![vec![0]]);
    }

    #[test]
    fn start_tuple_checks() {
        let s = scope();
        let (a, b, ad) = (s.eval("a").unwrap(), s.eval("b").unwrap(), s.eval("a*d").unwrap());
        let t = start_tuple(&b, &a, 2).unwrap();
        assert_eq!(t.entries(), &[b.clone(), b.conjugate(&a)]);
        assert!(matches!(start_tuple(&b, &ad, 2), Err(EngelError::OrderMismatch { n: 2 })));
        assert!(matches!(start_tuple(&b, &a, 3), Err(EngelError::BadTupleLength { n: 3, p: 2 })));
        let t4 = start_tuple(&b, &ad, 4).unwrap();
        for (i, e) in t4.entries().iter().enumerate() {
            assert_eq!(*e, b.conjugate(&ad.pow(i as i64)));
        }
        assert!(start_tuple(&grigorchuk().identity(), &a, 2).unwrap().is_trivial());
    }

    #[test]
    fn step_branches() {
        let s = scope();
        let (a, b) = (s.eval("a").unwrap(), s.eval("b").unwrap());
        let t = start_tuple(&b, &a, 2).unwrap();
        let step = step_tuple(&t);
        assert!(step.descended);
        assert_eq!(step.successors.len(), 2);
        let diffs = t.differences();
        for (label, succ) in &step.successors {
            let EdgeLabel::Section(j) = label else { panic!() };
            for (d, e) in diffs.entries().iter().zip(succ.entries()) {
                assert_eq!(d.section_at(&crate::Word::from_letters([*j]).unwrap()).unwrap(), *e);
            }
        }
        let moving = TupleVertex::new(vec![a.clone(), grigorchuk().identity()]);
        let step = step_tuple(&moving);
        assert!(!step.descended);
        assert_eq!(step.successors.len(), 1);
    }

    #[test]
    fn explore_b_a_is_engel() {
        let s = scope();
        let (a, b) = (s.eval("a").unwrap(), s.eval("b").unwrap());
        let report = explore(&start_tuple(&b, &a, 2).unwrap(), &EngelBudget::default());
        let Verdict::EngelYes(c) = report.verdict else { panic!("{:?}", report.verdict) };
        assert!(engel_iterate(&b, &a, c, 1000).unwrap().value.is_identity());
        assert!(report.max_nondescending_run().unwrap() <= 2);
    }

    #[test]
    fn tiny_budget_exceeds() {
        let s = scope();
        let g = s.eval("(b*a)^4*c").unwrap();
        let h = s.eval("a*d").unwrap();
        let budget = EngelBudget { max_vertices: 1, max_states: 20_000, max_c: 0 };
        let d = decide_engel_pair(&g, &h, &budget).unwrap();
        assert_eq!(d.verdict, Verdict::ResourceExceeded);
    }

    #[test]
    fn records_are_line_oriented() {
        let s = scope();
        let (a, b) = (s.eval("a").unwrap(), s.eval("b").unwrap());
        let report = explore(&start_tuple(&b, &a, 2).unwrap(), &EngelBudget::default());
        let text = report.to_records();
        assert!(text.starts_with("vertex 0 "));
        assert!(text.lines().last().unwrap().starts_with("verdict engel-yes"));
        for line in text.lines() {
            let kind = line.split(' ').next().unwrap();
            assert!(["vertex", "edge", "fail", "cycle", "verdict"].contains(&kind), "{line}");
        }
        assert_eq!(text, explore(&start_tuple(&b, &a, 2).unwrap(), &EngelBudget::default()).to_records());
    }
}
