//! Built-in automaton groups, finite level quotients, membership in the
//! branching subgroup `K` of the Grigorchuk group, and contraction estimates.

use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigUint;
use rustc_hash::FxHashMap;
use thiserror::Error;

use crate::element::expr::Scope;
use crate::element::Element;
use crate::mealy::{MealyError, MealyMachine, Word};

pub mod perm;

use perm::{Perm, StabChain};

/// Grigorchuk automaton in MAF v1.
pub const GRIGORCHUK_MAF: &str = "\
mealy p=2 states=5
a | 2:e 1:e
b | 1:a 2:c
c | 1:a 2:d
d | 1:e 2:b
e | 1:e 2:e
";

/// Gupta-Sidki automaton in MAF v1; `A` and `T` are the inverses of `a` and `t`.
pub const GUPTA_SIDKI_MAF: &str = "\
mealy p=3 states=5
a | 2:e 3:e 1:e
A | 3:e 1:e 2:e
t | 1:a 2:A 3:t
T | 1:A 2:a 3:T
e | 1:e 2:e 3:e
";

/// Default cap on the number of points `p^m` of a level quotient.
pub const DEFAULT_MAX_POINTS: usize = 59_049;
/// Default cap on the number of elements of an enumerated ball.
pub const DEFAULT_MAX_BALL: usize = 200_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error(transparent)]
    Mealy(#[from] MealyError),
    #[error("level {level} has {points} points, above the limit {limit}")]
    LevelTooLarge { level: usize, points: usize, limit: usize },
    #[error("K-index did not reach 16 up to level {0}")]
    QuotientLimitExceeded(usize),
    #[error("ball of radius {radius} exceeds {limit} elements")]
    BallTooLarge { radius: usize, limit: usize },
    #[error("unknown group `{0}` (expected grigorchuk, gupta-sidki or a MAF file)")]
    UnknownGroup(String),
    #[error("operation requires the Grigorchuk group (p=2)")]
    NotGrigorchuk,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GroupKind {
    Grigorchuk,
    GuptaSidki,
    Custom,
}

/// An automaton group given by a machine and named generating states.
#[derive(Clone, Debug)]
pub struct GroupPresentation {
    name: String,
    kind: GroupKind,
    machine: MealyMachine,
    generators: Vec<(String, Element)>,
}

impl GroupPresentation {
    /// Every state of the machine becomes a named generator.
    pub fn from_machine(name: &str, machine: MealyMachine) -> Self {
        let generators = (0..machine.num_states())
            .map(|s| (machine.state_name(s), Element::from_state(&machine, s).expect("valid state")))
            .collect();
        GroupPresentation { name: name.to_string(), kind: GroupKind::Custom, machine, generators }
    }

    pub fn from_maf(name: &str, text: &str) -> Result<Self, GroupError> {
        Ok(GroupPresentation::from_machine(name, MealyMachine::parse_maf(text)?))
    }

    /// `grigorchuk`, `gupta-sidki`, or a path to a MAF file.
    pub fn load(selector: &str) -> Result<Self, GroupError> {
        match selector {
            "grigorchuk" => Ok(grigorchuk()),
            "gupta-sidki" | "guptasidki" => Ok(gupta_sidki()),
            path => {
                let text = std::fs::read_to_string(path).map_err(|_| GroupError::UnknownGroup(path.to_string()))?;
                GroupPresentation::from_maf(path, &text)
            }
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn alphabet_size(&self) -> usize {
        self.machine.alphabet_size()
    }

    pub fn machine(&self) -> &MealyMachine {
        &self.machine
    }

    pub fn generator(&self, name: &str) -> Option<&Element> {
        self.generators.iter().find(|(n, _)| n == name).map(|(_, e)| e)
    }

    pub fn generators(&self) -> &[(String, Element)] {
        &self.generators
    }

    /// Distinct non-trivial generators, in state order.
    pub fn nontrivial_generators(&self) -> Vec<(String, Element)> {
        let mut out: Vec<(String, Element)> = Vec::new();
        for (n, e) in &self.generators {
            if !e.is_identity() && !out.iter().any(|(_, f)| f == e) {
                out.push((n.clone(), e.clone()));
            }
        }
        out
    }

    pub fn identity(&self) -> Element {
        Element::identity(self.alphabet_size()).expect("valid alphabet")
    }

    /// Expression scope with every generator bound by name.
    pub fn scope(&self) -> Scope {
        Scope::new(self.alphabet_size(), self.generators.iter().cloned())
    }
}

impl fmt::Display for GroupPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (p={}, {} states)", self.name, self.alphabet_size(), self.machine.num_states())
    }
}

pub fn grigorchuk() -> GroupPresentation {
    let mut g = GroupPresentation::from_maf("grigorchuk", GRIGORCHUK_MAF).expect("built-in machine");
    g.kind = GroupKind::Grigorchuk;
    g
}

pub fn gupta_sidki() -> GroupPresentation {
    let mut g = GroupPresentation::from_maf("gupta-sidki", GUPTA_SIDKI_MAF).expect("built-in machine");
    g.kind = GroupKind::GuptaSidki;
    g
}

/// `(x, x^c, x^(ca))` with `x = [a,b]`: normal generators of `K`.
pub fn grig_k_generators() -> (Element, Element, Element) {
    let g = grigorchuk();
    let gen = |n: &str| g.generator(n).expect("grigorchuk generator").clone();
    let x = gen("a").commutator(&gen("b"));
    let c = gen("c");
    let ca = c.mul(&gen("a"));
    (x.clone(), x.conjugate(&c), x.conjugate(&ca))
}

/// Action of `g` on the `p^m` words of length `m`, points indexed in
/// lexicographic order.
pub fn level_permutation(g: &Element, m: usize) -> Perm {
    let p = g.alphabet_size();
    let images = Word::all_of_length(p, m)
        .map(|w| {
            let img = g.act(&w).expect("valid word");
            img.letters().fold(0u32, |acc, l| acc * p as u32 + (l as u32 - 1))
        })
        .collect();
    Perm::from_images(images)
}

fn level_points(p: usize, m: usize, limit: usize) -> Result<usize, GroupError> {
    match p.checked_pow(m as u32) {
        Some(n) if n <= limit => Ok(n),
        Some(n) => Err(GroupError::LevelTooLarge { level: m, points: n, limit }),
        None => Err(GroupError::LevelTooLarge { level: m, points: usize::MAX, limit }),
    }
}

/// Image of a group in `Sym(X^m)`.
#[derive(Clone, Debug)]
pub struct LevelQuotient {
    pub level: usize,
    pub perms: Vec<(String, Perm)>,
    pub order: BigUint,
    chain: StabChain,
}

impl LevelQuotient {
    pub fn degree(&self) -> usize {
        self.chain.degree()
    }

    pub fn contains(&self, g: &Element) -> bool {
        self.chain.contains(&level_permutation(g, self.level))
    }

    pub fn chain(&self) -> &StabChain {
        &self.chain
    }
}

pub fn level_quotient(group: &GroupPresentation, m: usize) -> Result<LevelQuotient, GroupError> {
    level_quotient_with_limit(group, m, DEFAULT_MAX_POINTS)
}

pub fn level_quotient_with_limit(group: &GroupPresentation, m: usize, limit: usize) -> Result<LevelQuotient, GroupError> {
    if m == 0 {
        return Err(GroupError::LevelTooLarge { level: 0, points: 1, limit });
    }
    let n = level_points(group.alphabet_size(), m, limit)?;
    let perms: Vec<(String, Perm)> =
        group.generators().iter().map(|(name, g)| (name.clone(), level_permutation(g, m))).collect();
    let gens: Vec<Perm> = perms.iter().map(|(_, p)| p.clone()).collect();
    let chain = StabChain::new(n, &gens);
    Ok(LevelQuotient { level: m, order: chain.order(), perms, chain })
}

/// Image of `K` in a level quotient of the Grigorchuk group.
#[derive(Clone, Debug)]
pub struct KImage {
    pub level: usize,
    pub group_order: BigUint,
    pub k_order: BigUint,
    chain: StabChain,
}

impl KImage {
    pub fn index(&self) -> BigUint {
        &self.group_order / &self.k_order
    }
}

/// Image of `K = ⟨x, x^c, x^(ca)⟩^G` at level `m`, as a normal closure
/// inside the finite image of `G`.
pub fn k_image(m: usize) -> Result<KImage, GroupError> {
    let g = grigorchuk();
    let quotient = level_quotient(&g, m)?;
    let (x, xc, xca) = grig_k_generators();
    let kgens: Vec<Perm> = [x, xc, xca].iter().map(|e| level_permutation(e, m)).collect();
    let ambient: Vec<Perm> = quotient.perms.iter().map(|(_, p)| p.clone()).collect();
    let (chain, _) = StabChain::normal_closure(quotient.degree(), &kgens, &ambient);
    Ok(KImage { level: m, group_order: quotient.order.clone(), k_order: chain.order(), chain })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KMembership {
    InK,
    NotInK,
}

/// Decides membership in `K` from the first level whose `K`-index is 16:
/// there the level stabilizer lies inside `K`.
#[derive(Clone, Debug)]
pub struct KOracle {
    image: KImage,
    /// `(level, index)` for every level examined.
    pub profile: Vec<(usize, BigUint)>,
}

impl KOracle {
    pub fn discover(max_level: usize) -> Result<Self, GroupError> {
        let mut profile = Vec::new();
        for m in 1..=max_level {
            let image = k_image(m)?;
            let index = image.index();
            profile.push((m, index.clone()));
            if index == BigUint::from(16u32) {
                return Ok(KOracle { image, profile });
            }
        }
        Err(GroupError::QuotientLimitExceeded(max_level))
    }

    /// The level `m*` at which membership is decided.
    pub fn level(&self) -> usize {
        self.image.level
    }

    pub fn image(&self) -> &KImage {
        &self.image
    }

    pub fn membership(&self, g: &Element) -> Result<KMembership, GroupError> {
        if g.alphabet_size() != 2 {
            return Err(GroupError::NotGrigorchuk);
        }
        Ok(if self.image.chain.contains(&level_permutation(g, self.image.level)) {
            KMembership::InK
        } else {
            KMembership::NotInK
        })
    }
}

static K_ORACLE: OnceLock<Result<KOracle, GroupError>> = OnceLock::new();

/// Shared oracle, discovered once (levels up to 8).
pub fn k_oracle() -> Result<&'static KOracle, GroupError> {
    K_ORACLE.get_or_init(|| KOracle::discover(8)).as_ref().map_err(Clone::clone)
}

pub fn k_membership(g: &Element) -> Result<KMembership, GroupError> {
    k_oracle()?.membership(g)
}

/// Ball of radius `radius` in the word metric of the non-trivial
/// generators, with exact geodesic lengths (BFS layers).
#[derive(Clone, Debug)]
pub struct Ball {
    pub radius: usize,
    pub layers: Vec<Vec<Element>>,
    length: FxHashMap<Element, usize>,
}

impl Ball {
    pub fn enumerate(group: &GroupPresentation, radius: usize, limit: usize) -> Result<Self, GroupError> {
        let gens: Vec<Element> = group.nontrivial_generators().into_iter().map(|(_, e)| e).collect();
        let one = group.identity();
        let mut length = FxHashMap::default();
        length.insert(one.clone(), 0);
        let mut layers = vec![vec![one]];
        for r in 1..=radius {
            let mut layer = Vec::new();
            for g in &layers[r - 1] {
                for s in &gens {
                    let h = g.mul(s);
                    if !length.contains_key(&h) {
                        length.insert(h.clone(), r);
                        layer.push(h);
                        if length.len() > limit {
                            return Err(GroupError::BallTooLarge { radius, limit });
                        }
                    }
                }
            }
            layers.push(layer);
        }
        Ok(Ball { radius, layers, length })
    }

    pub fn len(&self) -> usize {
        self.length.len()
    }

    pub fn is_empty(&self) -> bool {
        self.length.is_empty()
    }

    pub fn length_of(&self, g: &Element) -> Option<usize> {
        self.length.get(g).copied()
    }

    pub fn elements(&self) -> impl Iterator<Item = &Element> {
        self.layers.iter().flatten()
    }
}

/// Estimated affine contraction `len(g@x) <= eta·len(g) + C`.
#[derive(Clone, Debug, PartialEq)]
pub struct ContractionEstimate {
    /// `eta_hat = eta_num / denom`.
    pub eta_num: u64,
    /// `C_hat = c_num / denom`.
    pub c_num: i64,
    pub denom: u64,
    pub sample_radius: usize,
    pub samples: usize,
    /// Sections whose length is not resolved inside the ball.
    pub unresolved: usize,
}

impl ContractionEstimate {
    pub fn eta_hat(&self) -> f64 {
        self.eta_num as f64 / self.denom as f64
    }

    pub fn c_hat(&self) -> f64 {
        self.c_num as f64 / self.denom as f64
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Samples `(len(g), len(g@x))` over the ball of radius `radius` and
/// returns the least `eta` on the grid `{j/D : 0 <= j <= D}`,
/// `D = lcm(12, p)`, for which the least covering constant over the whole
/// ball equals the one over the ball of radius `radius - 2`, i.e. does not
/// keep growing with the radius; `C_hat` is that covering constant.
pub fn estimate_contraction(group: &GroupPresentation, radius: usize) -> Result<ContractionEstimate, GroupError> {
    let ball = Ball::enumerate(group, radius, DEFAULT_MAX_BALL)?;
    let p = group.alphabet_size();
    let mut samples: Vec<(u64, u64)> = Vec::new();
    let mut unresolved = 0;
    for g in ball.elements() {
        let lg = ball.length_of(g).unwrap() as u64;
        for x in 1..=p {
            let s = g.section_at(&Word::from_letters([x]).unwrap()).unwrap();
            match ball.length_of(&s) {
                Some(ls) => samples.push((lg, ls as u64)),
                None => unresolved += 1,
            }
        }
    }
    let denom = (12 * p as u64) / gcd(12, p as u64);
    let inner = radius.saturating_sub(2) as u64;
    let cover = |j: u64, max_len: u64| -> i64 {
        samples
            .iter()
            .filter(|&&(lg, _)| lg <= max_len)
            .map(|&(lg, ls)| (denom * ls) as i64 - (j * lg) as i64)
            .max()
            .unwrap_or(0)
    };
    let eta_num = (0..=denom)
        .find(|&j| cover(j, radius as u64) == cover(j, inner))
        .unwrap_or(denom);
    Ok(ContractionEstimate {
        eta_num,
        c_num: cover(eta_num, radius as u64),
        denom,
        sample_radius: radius,
        samples: samples.len(),
        unresolved,
    })
}

/// Orbit of `w` under `h`, following `w, w^h, w^(h²), …`.
pub fn orbit(h: &Element, w: &Word) -> Vec<Word> {
    let mut out = vec![w.clone()];
    let mut cur = h.act(w).expect("valid word");
    while &cur != w {
        out.push(cur.clone());
        cur = h.act(&cur).expect("valid word");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::element::{order_bounded, Order};

    #[test]
    fn grigorchuk_generators() {
        let g = grigorchuk();
        let a = g.generator("a").unwrap();
        let w: Word = "12".parse().unwrap();
        assert_eq!(a.act(&w).unwrap(), "22".parse().unwrap());
        assert_eq!(g.generator("d").unwrap().section_at(&"2".parse().unwrap()).unwrap(), *g.generator("b").unwrap());
        for n in ["a", "b", "c", "d"] {
            assert!(g.generator(n).unwrap().pow(2).is_identity());
        }
        let klein: Vec<Element> = ["e", "b", "c", "d"].iter().map(|n| g.generator(n).unwrap().clone()).collect();
        for x in &klein {
            for y in &klein {
                assert!(klein.contains(&x.mul(y)));
            }
        }
    }

    #[test]
    fn gupta_sidki_generators() {
        let g = gupta_sidki();
        let t = g.generator("t").unwrap();
        assert_eq!(t.act(&"312".parse().unwrap()).unwrap(), "313".parse().unwrap());
        assert_eq!(order_bounded(g.generator("a").unwrap(), 100), Order::Finite(3));
        assert_eq!(t.inv(), *g.generator("T").unwrap());
        assert_eq!(g.generator("a").unwrap().inv(), *g.generator("A").unwrap());
    }

    #[test]
    fn k_generators_fix_root() {
        let (x, xc, xca) = grig_k_generators();
        assert!(!x.is_identity());
        for k in [&x, &xc, &xca] {
            assert!(k.fixes_root());
            let o = order_bounded(k, 10_000).finite().unwrap();
            assert!(o.is_power_of_two());
        }
    }

    #[test]
    fn small_level_quotients() {
        let g = grigorchuk();
        assert_eq!(level_quotient(&g, 1).unwrap().order, BigUint::from(2u32));
        assert_eq!(level_quotient(&g, 2).unwrap().order, BigUint::from(8u32));
        assert!(matches!(level_quotient_with_limit(&g, 5, 16), Err(GroupError::LevelTooLarge { .. })));
    }

    #[test]
    fn orbits_of_ad() {
        let g = grigorchuk();
        let ad = g.generator("a").unwrap().mul(g.generator("d").unwrap());
        let o = orbit(&ad, &"111".parse().unwrap());
        let shown: Vec<String> = o.iter().map(|w| w.to_string()).collect();
        assert_eq!(shown, ["111", "212", "112", "211"]);
    }

    #[test]
    fn trivial_group_contraction() {
        let g = GroupPresentation::from_maf("trivial", "mealy p=2 states=1\ne | 1:e 2:e\n").unwrap();
        let est = estimate_contraction(&g, 4).unwrap();
        assert_eq!(est.c_num, 0);
    }
}
