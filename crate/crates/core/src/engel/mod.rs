//! The Engel property for automaton groups.
//!
//! `E_0(g,h) = g`, `E_c(g,h) = [E_{c-1}(g,h), h]`. A pair is Engel when
//! some `E_c` is trivial. [`explore`] walks the tuple graph whose vertices
//! are `n`-tuples of elements and whose edges take cyclic differences
//! (descending to sections once all differences fix the first level); a
//! non-trivial cycle reachable from the start tuple of `(g,h)` proves that
//! the pair is not Engel, and a finite reachable graph whose only cycle is
//! the trivial self-loop proves that it is.

use thiserror::Error;

use crate::element::{Element, Order, OrderCache};
use crate::groups::GroupError;

mod certificate;
mod graph;
mod search;

pub use certificate::{
    branch_certificate, build_witness, build_witness_with_limit, difference_step, grigorchuk_lemma_data,
    gupta_sidki_lemma_data, gupta_sidki_stated_lemma_data, lemma_check, lemma_data_for, BranchCertificate, LemmaData, PeriodicCertificate, Witness,
};
pub use graph::{
    decide_engel_pair, explore, start_tuple, step_tuple, EdgeLabel, ExploreReport, PairDecision, Step, TupleVertex,
    Verdict,
};
pub use search::{
    common_states, decide_engel_element, exponent_survey, periodic_state_search, seed_from_pair, Candidate, ElementVerdict,
    SearchReport, SurveyReport,
};

/// Recursion budget for order computations inside this module.
pub const ORDER_LIMIT: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngelError {
    #[error("element size {size} exceeds the state budget {limit} at depth {depth}")]
    BudgetExceeded { size: usize, limit: usize, depth: usize },
    #[error("h^{n} is not trivial")]
    OrderMismatch { n: usize },
    #[error("tuple length {n} is not a positive multiple of the alphabet size {p}")]
    BadTupleLength { n: usize, p: usize },
    #[error("order of h could not be determined within budget")]
    UnknownOrder,
    #[error("tuple length {k} does not divide the order {order} of h")]
    OrderNotMultiple { k: usize, order: u64 },
    #[error("no orbit of length {order} up to level {limit}")]
    NoOrbit { order: u64, limit: usize },
    #[error("certified radius needs 2^n·eta < 1 (got 2^{n}·{eta})")]
    NotCertifiable { n: usize, eta: f64 },
    #[error("tuple must have at least two entries")]
    TupleTooShort,
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// Resource limits standing in for the radius of the ball in the tuple
/// graph: a vertex whose entries exceed `max_states` states, or any vertex
/// beyond `max_vertices`, counts as `fail`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EngelBudget {
    pub max_vertices: usize,
    pub max_states: usize,
    pub max_c: usize,
}

impl Default for EngelBudget {
    fn default() -> Self {
        EngelBudget { max_vertices: 100_000, max_states: 20_000, max_c: 64 }
    }
}

impl EngelBudget {
    /// Budget derived from contraction constants satisfying `2^n·eta < 1`.
    ///
    /// The radius `R = (|g| + n|h|)·2^n·C / (1 - 2^n·eta)` bounds every
    /// vertex of the reachable graph; an element of word length at most `R`
    /// over generators of a `q`-state machine has at most `q^R` states, so
    /// `max_states = q^R` (saturating) never rejects a vertex of the ball.
    pub fn certified(
        eta: f64,
        c: f64,
        norm_g: u64,
        norm_h: u64,
        n: usize,
        machine_states: usize,
    ) -> Result<(EngelBudget, f64), EngelError> {
        let scale = 2f64.powi(n as i32);
        if scale * eta >= 1.0 || eta.is_nan() || eta < 0.0 {
            return Err(EngelError::NotCertifiable { n, eta });
        }
        let radius = (norm_g as f64 + n as f64 * norm_h as f64) * scale * c / (1.0 - scale * eta);
        let exp = u32::try_from(radius.floor() as u64).unwrap_or(u32::MAX);
        let max_states = machine_states.checked_pow(exp).unwrap_or(usize::MAX / 2);
        Ok((EngelBudget { max_vertices: usize::MAX, max_states: max_states.max(1), max_c: 64 }, radius))
    }
}

/// Successive Engel words with their canonical sizes.
#[derive(Clone, Debug)]
pub struct EngelRun {
    pub value: Element,
    /// `sizes[c]` is the state count of `E_c`.
    pub sizes: Vec<usize>,
}

/// Iterator over `E_0, E_1, …`.
pub struct EngelSequence {
    current: Option<Element>,
    h: Element,
}

impl EngelSequence {
    pub fn new(g: &Element, h: &Element) -> Self {
        EngelSequence { current: Some(g.clone()), h: h.clone() }
    }
}

impl Iterator for EngelSequence {
    type Item = Element;
    fn next(&mut self) -> Option<Element> {
        let cur = self.current.take()?;
        self.current = Some(cur.commutator(&self.h));
        Some(cur)
    }
}

/// `E_c(g,h)`, aborting when an intermediate exceeds `max_states`.
pub fn engel_iterate(g: &Element, h: &Element, c: usize, max_states: usize) -> Result<EngelRun, EngelError> {
    let mut sizes = Vec::with_capacity(c + 1);
    let mut value = g.clone();
    sizes.push(value.size());
    for depth in 1..=c {
        value = value.commutator(h);
        if value.size() > max_states {
            return Err(EngelError::BudgetExceeded { size: value.size(), limit: max_states, depth });
        }
        sizes.push(value.size());
    }
    Ok(EngelRun { value, sizes })
}

pub(crate) fn finite_order(h: &Element, cache: &mut OrderCache) -> Result<u64, EngelError> {
    match cache.order(h, ORDER_LIMIT) {
        Order::Finite(k) => Ok(k),
        Order::Unbounded => Err(EngelError::UnknownOrder),
    }
}
