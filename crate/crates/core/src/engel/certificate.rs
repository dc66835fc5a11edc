//! Periodic certificates for the cyclic difference recursion, and the
//! witness element they produce for an `h` of suitable order.

use super::graph::TupleVertex;
use super::{finite_order, EngelError};
use crate::element::{Element, OrderCache};
use crate::groups::{self, GroupPresentation, KMembership, KOracle};
use crate::mealy::Word;

/// `A_{n+1,i} = A_{n,i}⁻¹ A_{n,i+1}`, indices cyclic.
pub fn difference_step(tuple: &[Element]) -> Vec<Element> {
    let k = tuple.len();
    (0..k).map(|i| tuple[i].inv().mul(&tuple[(i + 1) % k])).collect()
}

/// Outcome of [`lemma_check`].
#[derive(Clone, Debug)]
pub struct PeriodicCertificate {
    pub a0: Vec<Element>,
    pub period: usize,
    pub word: Word,
    /// `A_{period}`.
    pub a_period: Vec<Element>,
    /// Per entry: (fixes word, non-trivial, section at word equals `A_{0,i}`).
    pub entry_checks: Vec<(bool, bool, bool)>,
    pub checked: bool,
}

/// Iterates the cyclic difference recursion `period` times and checks that
/// every `A_{period,i}` fixes `word`, is non-trivial, and has section
/// `A_{0,i}` at `word`.
pub fn lemma_check(a0: &[Element], period: usize, word: &Word) -> Result<PeriodicCertificate, EngelError> {
    if a0.len() < 2 {
        return Err(EngelError::TupleTooShort);
    }
    let mut a = a0.to_vec();
    for _ in 0..period {
        a = difference_step(&a);
    }
    let entry_checks: Vec<(bool, bool, bool)> = a
        .iter()
        .zip(a0)
        .map(|(ai, a0i)| {
            let fixes = ai.act(word).map(|img| &img == word).unwrap_or(false);
            let nontrivial = !ai.is_identity();
            let returns = ai.section_at(word).map(|s| &s == a0i).unwrap_or(false);
            (fixes, nontrivial, returns)
        })
        .collect();
    let checked = entry_checks.iter().all(|&(f, n, r)| f && n && r);
    Ok(PeriodicCertificate { a0: a0.to_vec(), period, word: word.clone(), a_period: a, entry_checks, checked })
}

/// A start tuple, period and fixed word for a built-in group.
#[derive(Clone, Debug)]
pub struct LemmaData {
    pub a0: Vec<Element>,
    pub period: usize,
    pub word: Word,
}

/// `A_0 = (x⁻²x^(2ca), x^(-2ca)x²x^(2cab), x^(-2cab)x⁻², x²)` with
/// `x = [a,b]`, period 9, word `111112`.
pub fn grigorchuk_lemma_data() -> LemmaData {
    let mut s = groups::grigorchuk().scope();
    s.define("x2", "comm(a,b)^2").unwrap();
    s.define("x2ca", "x2^(c*a)").unwrap();
    let a0 = ["x2^-1*x2ca", "x2ca^-1*x2*x2ca^b", "(x2ca^-1)^b*x2^-1", "x2"]
        .iter()
        .map(|t| s.eval(t).unwrap())
        .collect();
    LemmaData { a0, period: 9, word: "111112".parse().unwrap() }
}

/// `A_0 = ([a⁻¹,t], [a,t]^a, [t⁻¹,a⁻¹])`, period 4, word `122`.
///
/// With `w^(gh) = (w^g)^h` and `[x,y] = x⁻¹y⁻¹xy` this tuple does not
/// return: every `A_{4,i}@122` equals `t⁻¹`. See [`gupta_sidki_lemma_data`].
pub fn gupta_sidki_stated_lemma_data() -> LemmaData {
    let s = groups::gupta_sidki().scope();
    let a0 = ["comm(A,t)", "comm(a,t)^a", "comm(T,A)"].iter().map(|t| s.eval(t).unwrap()).collect();
    LemmaData { a0, period: 4, word: "122".parse().unwrap() }
}

/// `A_0 = ([a⁻¹,t], [a,t⁻¹]^t, [a⁻¹,t]^(a⁻¹))`, period 4, word `122`.
pub fn gupta_sidki_lemma_data() -> LemmaData {
    let s = groups::gupta_sidki().scope();
    let a0 = ["comm(A,t)", "comm(a,T)^t", "comm(A,t)^A"].iter().map(|t| s.eval(t).unwrap()).collect();
    LemmaData { a0, period: 4, word: "122".parse().unwrap() }
}

/// `g = ∏ v_i * A_{0,i%k}^(h_i)` over an orbit `v_1, …, v_N` of `h` of
/// length `N = order(h)`, labelled so that `v_{i+1}^h = v_i`.
#[derive(Clone, Debug)]
pub struct Witness {
    pub g: Element,
    pub h: Element,
    /// `v_1, …, v_N`.
    pub orbit: Vec<Word>,
    /// `h_i = (h@v_1)⁻¹ ⋯ (h@v_i)⁻¹` for `i = 1..=N`.
    pub cocycle: Vec<Element>,
    pub level: usize,
    pub k: usize,
}

impl Witness {
    /// `∏ v_i * t_{i%k}^(h_i)` for a `k`-tuple `t`; with `t = A_c` this is
    /// `E_c(g,h)`.
    pub fn assemble(&self, tuple: &[Element]) -> Element {
        assert_eq!(tuple.len(), self.k);
        let mut acc = Element::identity(self.g.alphabet_size()).expect("valid alphabet");
        for (i, (v, hi)) in self.orbit.iter().zip(&self.cocycle).enumerate() {
            let entry = tuple[i % self.k].conjugate(hi);
            acc = acc.mul(&Element::insert(v, &entry).expect("orbit words are valid"));
        }
        acc
    }

    /// `h_i · (h@v_i) = h_{i-1}`, indices cyclic with `h_0 = h_N = 1`.
    pub fn cocycle_holds(&self) -> bool {
        let n = self.orbit.len();
        let one_at_end = self.cocycle[n - 1].is_identity();
        one_at_end
            && (0..n).all(|i| {
                let hv = self.h.section_at(&self.orbit[i]).expect("valid word");
                let prev = if i == 0 { &self.cocycle[n - 1] } else { &self.cocycle[i - 1] };
                self.cocycle[i].mul(&hv) == *prev
            })
    }
}

/// Builds the witness for `h` from a `k`-tuple, searching levels up to 16.
pub fn build_witness(h: &Element, a0: &[Element]) -> Result<Witness, EngelError> {
    build_witness_with_limit(h, a0, 16)
}

pub fn build_witness_with_limit(h: &Element, a0: &[Element], level_limit: usize) -> Result<Witness, EngelError> {
    let k = a0.len();
    if k < 2 {
        return Err(EngelError::TupleTooShort);
    }
    let order = finite_order(h, &mut OrderCache::new())?;
    if order % k as u64 != 0 {
        return Err(EngelError::OrderNotMultiple { k, order });
    }
    let p = h.alphabet_size();
    for level in 0..=level_limit {
        if let Some(limit) = p.checked_pow(level as u32) {
            if limit > 1 << 22 {
                break;
            }
        }
        // First word (lexicographically) whose orbit has full length.
        let found = Word::all_of_length(p, level).find_map(|w| {
            let forward = groups::orbit(h, &w);
            (forward.len() as u64 == order).then_some(forward)
        });
        let Some(forward) = found else { continue };
        // forward = [w, w^h, w^(h^2), …]; v_{i+1}^h = v_i means v_i = w^(h^(1-i)).
        let n = forward.len();
        let orbit: Vec<Word> = (0..n).map(|i| forward[(n - i) % n].clone()).collect();
        let mut cocycle = Vec::with_capacity(n);
        let mut acc = Element::identity(p).expect("valid alphabet");
        for v in &orbit {
            acc = acc.mul(&h.section_at(v).expect("valid word").inv());
            cocycle.push(acc.clone());
        }
        let mut w = Witness { g: acc.clone(), h: h.clone(), orbit, cocycle, level, k };
        w.g = w.assemble(a0);
        return Ok(w);
    }
    Err(EngelError::NoOrbit { order, limit: level_limit })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BranchCertificate {
    /// No element whose order is a multiple of `n` is Engel.
    CertifiedNotEngel(usize),
    NotCertified,
}

/// A cycle through a vertex in `K^n \ 1^n` certifies that no element of
/// order divisible by `n` is Engel.
pub fn branch_certificate(cycle: &[TupleVertex], oracle: &KOracle) -> Result<BranchCertificate, EngelError> {
    for v in cycle {
        if v.is_trivial() {
            continue;
        }
        let mut all_in_k = true;
        for e in v.entries() {
            if oracle.membership(e)? != KMembership::InK {
                all_in_k = false;
                break;
            }
        }
        if all_in_k {
            return Ok(BranchCertificate::CertifiedNotEngel(v.len()));
        }
    }
    Ok(BranchCertificate::NotCertified)
}

/// Convenience: lemma data for a built-in group.
pub fn lemma_data_for(group: &GroupPresentation) -> Option<LemmaData> {
    match group.kind() {
        groups::GroupKind::Grigorchuk => Some(grigorchuk_lemma_data()),
        groups::GroupKind::GuptaSidki => Some(gupta_sidki_lemma_data()),
        groups::GroupKind::Custom => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::grigorchuk;

    #[test]
    fn lemma_fails_on_wrong_word() {
        let data = grigorchuk_lemma_data();
        let cert = lemma_check(&data.a0, data.period, &"111111".parse().unwrap()).unwrap();
        assert!(!cert.checked);
    }

    #[test]
    fn gupta_sidki_tuples() {
        let stated = gupta_sidki_stated_lemma_data();
        let cert = lemma_check(&stated.a0, stated.period, &stated.word).unwrap();
        assert!(!cert.checked);
        let t_inv = groups::gupta_sidki().scope().eval("T").unwrap();
        for a in &cert.a_period {
            assert_eq!(a.section_at(&stated.word).unwrap(), t_inv);
        }
        let data = gupta_sidki_lemma_data();
        assert!(lemma_check(&data.a0, data.period, &data.word).unwrap().checked);
    }

    #[test]
    fn lemma_needs_two_entries() {
        let one = grigorchuk().identity();
        assert!(matches!(lemma_check(&[one], 1, &Word::empty()), Err(EngelError::TupleTooShort)));
    }

    #[test]
    fn witness_requires_divisible_order() {
        let g = grigorchuk();
        let a = g.generator("a").unwrap();
        let data = grigorchuk_lemma_data();
        assert!(matches!(build_witness(a, &data.a0), Err(EngelError::OrderNotMultiple { k: 4, order: 2 })));
    }

    #[test]
    fn witness_orbit_for_ad() {
        let g = grigorchuk();
        let ad = g.scope().eval("a*d").unwrap();
        let data = grigorchuk_lemma_data();
        let w = build_witness(&ad, &data.a0).unwrap();
        assert_eq!(w.level, 3);
        let shown: Vec<String> = w.orbit.iter().map(|v| v.to_string()).collect();
        assert_eq!(shown, ["111", "211", "112", "212"]);
        for i in 0..4 {
            assert_eq!(ad.act(&w.orbit[(i + 1) % 4]).unwrap(), w.orbit[i]);
        }
        assert!(w.cocycle_holds());
    }

    #[test]
    fn branch_certificate_cases() {
        let oracle = groups::k_oracle().unwrap();
        let g = grigorchuk();
        let one = g.identity();
        let trivial = vec![TupleVertex::new(vec![one.clone(), one.clone()])];
        assert_eq!(branch_certificate(&trivial, oracle).unwrap(), BranchCertificate::NotCertified);
        let a = g.generator("a").unwrap().clone();
        let with_a = vec![TupleVertex::new(vec![a.clone(), a])];
        assert_eq!(branch_certificate(&with_a, oracle).unwrap(), BranchCertificate::NotCertified);
        let data = grigorchuk_lemma_data();
        let through_a0 = vec![TupleVertex::new(data.a0.clone())];
        assert_eq!(branch_certificate(&through_a0, oracle).unwrap(), BranchCertificate::CertifiedNotEngel(4));
    }
}
