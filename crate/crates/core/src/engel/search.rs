//! Sweeps and heuristics around the tuple graph: exponent surveys, Engel
//! elements, and the periodic common-state search.

use rustc_hash::FxHashSet;

use super::certificate::{build_witness, difference_step, lemma_check, lemma_data_for};
use super::graph::{explore, start_tuple, TupleVertex, Verdict};
use super::{finite_order, EngelBudget, EngelError};
use crate::element::{Element, OrderCache};
use crate::groups::{self, Ball, GroupKind, GroupPresentation, KMembership, KOracle};
use crate::mealy::{self, MealyMachine};

/// Non-trivial cycles found from every start tuple over a ball.
#[derive(Clone, Debug)]
pub struct SurveyReport {
    pub n: usize,
    pub radius: usize,
    pub ball_size: usize,
    pub starts: usize,
    /// Start tuples whose exploration hit the budget without finding a
    /// non-trivial cycle.
    pub exceeded: usize,
    /// Distinct non-trivial cycles, each rotated to start at its smallest
    /// digest.
    pub cycles: Vec<Vec<TupleVertex>>,
}

/// Explores from every tuple in `B(radius)^n` plus `seeds`, collecting the
/// non-trivial cycles. This is a finite sweep; it says nothing about
/// larger radii.
pub fn exponent_survey(
    group: &GroupPresentation,
    n: usize,
    radius: usize,
    budget: &EngelBudget,
    seeds: &[TupleVertex],
) -> Result<SurveyReport, EngelError> {
    let p = group.alphabet_size();
    if n == 0 || !n.is_multiple_of(p) {
        return Err(EngelError::BadTupleLength { n, p });
    }
    let ball = Ball::enumerate(group, radius, groups::DEFAULT_MAX_BALL)?;
    let elems: Vec<Element> = ball.elements().cloned().collect();
    let total = elems.len().checked_pow(n as u32).filter(|&t| t <= 1_000_000);
    let Some(total) = total else {
        return Err(groups::GroupError::BallTooLarge { radius, limit: 1_000_000 }.into());
    };

    let mut starts: Vec<TupleVertex> = (0..total)
        .map(|mut idx| {
            let mut entries = Vec::with_capacity(n);
            for _ in 0..n {
                entries.push(elems[idx % elems.len()].clone());
                idx /= elems.len();
            }
            TupleVertex::new(entries)
        })
        .collect();
    starts.extend(seeds.iter().cloned());

    let mut seen_vertices: FxHashSet<TupleVertex> = FxHashSet::default();
    let mut seen_cycles: FxHashSet<Vec<u64>> = FxHashSet::default();
    let mut cycles = Vec::new();
    let mut exceeded = 0;
    for t in &starts {
        // A start already inside an explored graph adds nothing new.
        if seen_vertices.contains(t) {
            continue;
        }
        let report = explore(t, budget);
        if report.verdict == Verdict::ResourceExceeded {
            exceeded += 1;
        }
        for cyc in report.nontrivial_cycles() {
            let mut verts: Vec<TupleVertex> = cyc.iter().map(|&v| report.vertices[v].clone()).collect();
            let pivot = (0..verts.len()).min_by_key(|&i| verts[i].digest()).unwrap();
            verts.rotate_left(pivot);
            if seen_cycles.insert(verts.iter().map(TupleVertex::digest).collect()) {
                cycles.push(verts);
            }
        }
        if !report.hit_fail {
            seen_vertices.extend(report.vertices);
        }
    }
    Ok(SurveyReport { n, radius, ball_size: elems.len(), starts: starts.len(), exceeded, cycles })
}

/// Outcome of [`decide_engel_element`].
#[derive(Clone, Debug)]
pub enum ElementVerdict {
    /// `h` is Engel; the string names the argument.
    Engel(&'static str),
    /// Not Engel: `E_c(g,h) != 1` for all `c`, from a checked periodic
    /// certificate and the witness `g`.
    NotEngel { g: Element, period: usize },
    Undecided(String),
}

/// Semi-decision of Engel(h) in the built-in groups.
///
/// * `h = 1` is Engel.
/// * In the Grigorchuk group (a 2-group), `h² = 1` gives
///   `E_{1+k}(g,h) = [g,h]^((-2)^k)`, which vanishes once `2^k` exceeds
///   the order of `[g,h]`.
/// * Otherwise the group's periodic certificate is checked and turned into
///   a witness `g` by [`build_witness`]; this needs the tuple length to
///   divide the order of `h` and the tuple entries to lie in the branching
///   subgroup (checked for Grigorchuk, commutators by construction for
///   Gupta-Sidki).
pub fn decide_engel_element(group: &GroupPresentation, h: &Element) -> Result<ElementVerdict, EngelError> {
    if h.is_identity() {
        return Ok(ElementVerdict::Engel("h is trivial"));
    }
    let order = finite_order(h, &mut OrderCache::new())?;
    if group.kind() == GroupKind::Grigorchuk && order == 2 {
        return Ok(ElementVerdict::Engel("h^2 = 1 in a 2-group: E_{1+k}(g,h) = [g,h]^((-2)^k)"));
    }
    let Some(data) = lemma_data_for(group) else {
        return Ok(ElementVerdict::Undecided("no periodic certificate for this group".into()));
    };
    if order % data.a0.len() as u64 != 0 {
        return Ok(ElementVerdict::Undecided(format!(
            "order {order} of h is not a multiple of the certificate length {}",
            data.a0.len()
        )));
    }
    if group.kind() == GroupKind::Grigorchuk {
        let oracle = groups::k_oracle()?;
        for e in &data.a0 {
            if oracle.membership(e)? != KMembership::InK {
                return Ok(ElementVerdict::Undecided("certificate tuple is not in K".into()));
            }
        }
    }
    let cert = lemma_check(&data.a0, data.period, &data.word)?;
    if !cert.checked {
        return Ok(ElementVerdict::Undecided("periodic certificate failed".into()));
    }
    let witness = build_witness(h, &data.a0)?;
    // [g,h] must match the one-step image of the tuple.
    let a1 = difference_step(&data.a0);
    if witness.g.commutator(h) != witness.assemble(&a1) {
        return Ok(ElementVerdict::Undecided("witness commutator does not match the recursion".into()));
    }
    Ok(ElementVerdict::NotEngel { g: witness.g, period: data.period })
}

/// States shared by two machines' start-reachable parts, as indices into
/// `a`'s states, found by refining the disjoint union.
pub fn common_states(a: &Element, b: &Element) -> Vec<usize> {
    let (ma, mb) = (a.machine(), b.machine());
    let p = ma.alphabet_size();
    let na = ma.num_states();
    let (oa, xa) = ma.tables();
    let (ob, xb) = mb.tables();
    let mut out = oa.to_vec();
    out.extend_from_slice(ob);
    let mut next = xa.to_vec();
    next.extend(xb.iter().map(|&t| t + na as u32));
    let union = MealyMachine::from_tables_unchecked(p, out, next);
    let all: Vec<u32> = (0..union.num_states() as u32).collect();
    let (_, class) = mealy::refine_states(&union, all);
    let in_b: FxHashSet<u32> = (na..union.num_states()).map(|s| class[s]).collect();
    (0..na).filter(|&s| in_b.contains(&class[s])).collect()
}

/// A pair `(c, period)` with non-trivial states common to `E_c` and
/// `E_{c+period}`.
#[derive(Clone, Debug)]
pub struct Candidate {
    pub c: usize,
    pub period: usize,
    /// Common non-trivial states, smallest first.
    pub common: Vec<Element>,
    /// Common states lying in `K` (when an oracle was given).
    pub in_k: Vec<Element>,
    pub total_size: usize,
}

#[derive(Clone, Debug)]
pub struct SearchReport {
    /// `sizes[c]` is the size of `E_c`.
    pub sizes: Vec<usize>,
    pub candidates: Vec<Candidate>,
    /// Set when the state budget stopped the iteration early.
    pub truncated_at: Option<usize>,
}

impl SearchReport {
    pub fn hits(&self, period: usize) -> Vec<usize> {
        let mut cs: Vec<usize> = self.candidates.iter().filter(|c| c.period == period).map(|c| c.c).collect();
        cs.sort_unstable();
        cs
    }

    pub fn candidate(&self, c: usize, period: usize) -> Option<&Candidate> {
        self.candidates.iter().find(|x| x.c == c && x.period == period)
    }
}

/// Computes `E_c` for `c <= cmax + pmax` and intersects the state sets of
/// `E_c` and `E_{c+period}` for `c <= cmax`, `1 <= period <= pmax`.
/// Candidates are ordered K-members first, then by total state size.
pub fn periodic_state_search(
    g: &Element,
    h: &Element,
    cmax: usize,
    pmax: usize,
    max_states: usize,
    oracle: Option<&KOracle>,
) -> Result<SearchReport, EngelError> {
    let mut seq = vec![g.clone()];
    let mut truncated_at = None;
    for c in 1..=cmax + pmax {
        let e = seq[c - 1].commutator(h);
        if e.size() > max_states {
            if c <= 1 {
                return Err(EngelError::BudgetExceeded { size: e.size(), limit: max_states, depth: c });
            }
            truncated_at = Some(c);
            break;
        }
        seq.push(e);
    }
    let sizes: Vec<usize> = seq.iter().map(Element::size).collect();

    let mut candidates = Vec::new();
    for c in 0..=cmax.min(seq.len() - 1) {
        for period in 1..=pmax {
            let Some(later) = seq.get(c + period) else { break };
            let shared = common_states(&seq[c], later);
            let mut common: Vec<Element> =
                shared.into_iter().map(|s| seq[c].states()[s].clone()).filter(|e| !e.is_identity()).collect();
            if common.is_empty() {
                continue;
            }
            common.sort_by_key(|e| (e.size(), e.digest()));
            let in_k = match oracle {
                Some(o) => common
                    .iter()
                    .filter(|e| matches!(o.membership(e), Ok(KMembership::InK)))
                    .cloned()
                    .collect(),
                None => Vec::new(),
            };
            let total_size = common.iter().map(Element::size).sum();
            candidates.push(Candidate { c, period, common, in_k, total_size });
        }
    }
    candidates.sort_by_key(|x| (x.in_k.is_empty(), x.total_size, x.c, x.period));
    Ok(SearchReport { sizes, candidates, truncated_at })
}

/// Start tuple helper for surveys seeded from an Engel pair.
pub fn seed_from_pair(g: &Element, h: &Element, n: usize) -> Result<TupleVertex, EngelError> {
    start_tuple(g, h, n)
}
