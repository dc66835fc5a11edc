#![allow(dead_code)]

use agr::mealy::{MealyMachine, Word};
use agr::Element;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Raw transition tables, evaluated directly without the library.
#[derive(Clone, Debug)]
pub struct Tables {
    pub p: usize,
    pub out: Vec<u8>,
    pub next: Vec<u32>,
}

impl Tables {
    pub fn random(rng: &mut ChaCha8Rng, p: usize, states: usize) -> Tables {
        let mut out = Vec::with_capacity(states * p);
        let mut next = Vec::with_capacity(states * p);
        for _ in 0..states {
            let mut perm: Vec<u8> = (0..p as u8).collect();
            // Identity rows are common in real machines; keep some.
            if rng.gen_bool(0.6) {
                perm.shuffle(rng);
            }
            out.extend(perm);
            next.extend((0..p).map(|_| rng.gen_range(0..states as u32)));
        }
        Tables { p, out, next }
    }

    pub fn states(&self) -> usize {
        self.out.len() / self.p
    }

    pub fn machine(&self) -> MealyMachine {
        MealyMachine::from_tables(self.p, self.out.clone(), self.next.clone(), None).unwrap()
    }

    pub fn element(&self, s: usize) -> Element {
        Element::from_state(&self.machine(), s).unwrap()
    }

    /// Image of a 0-based letter sequence from state `s`.
    pub fn act(&self, mut s: usize, w: &[u8]) -> Vec<u8> {
        w.iter()
            .map(|&x| {
                let i = s * self.p + x as usize;
                s = self.next[i] as usize;
                self.out[i]
            })
            .collect()
    }
}

/// A transformation of words given as a closure over raw letters.
pub type Oracle<'a> = Box<dyn Fn(&[u8]) -> Vec<u8> + 'a>;

pub fn raw(w: &Word) -> Vec<u8> {
    w.letters().map(|l| (l - 1) as u8).collect()
}

pub fn word(raw: &[u8]) -> Word {
    Word::from_letters(raw.iter().map(|&x| x as usize + 1)).unwrap()
}

pub fn words_up_to(p: usize, len: usize) -> Vec<Word> {
    (0..=len).flat_map(|l| Word::all_of_length(p, l)).collect()
}

pub fn random_word(rng: &mut ChaCha8Rng, p: usize, max_len: usize) -> Word {
    let len = rng.gen_range(0..=max_len);
    Word::from_letters((0..len).map(|_| rng.gen_range(1..=p))).unwrap()
}

/// Compares an element against an oracle on every word up to `len`;
/// returns the first disagreement.
pub fn agrees(g: &Element, oracle: &dyn Fn(&[u8]) -> Vec<u8>, len: usize) -> Result<(), String> {
    for w in words_up_to(g.alphabet_size(), len) {
        let got = raw(&g.act(&w).unwrap());
        let want = oracle(&raw(&w));
        if got != want {
            return Err(format!("on {w}: got {}, want {}", word(&got), word(&want)));
        }
    }
    Ok(())
}

/// Outcome counts for one randomized property.
#[derive(Debug, Default)]
pub struct Tally {
    pub cases: usize,
    pub failures: Vec<String>,
}

impl Tally {
    pub fn record(&mut self, r: Result<(), String>) {
        self.cases += 1;
        if let Err(e) = r {
            self.failures.push(e);
        }
    }
}

/// Random pieces for one case: tables, two states, alphabet.
pub fn random_case(rng: &mut ChaCha8Rng) -> (Tables, usize, usize) {
    let p = if rng.gen_bool(0.7) { 2 } else { 3 };
    let n = rng.gen_range(1..=6);
    let t = Tables::random(rng, p, n);
    let (s1, s2) = (rng.gen_range(0..n), rng.gen_range(0..n));
    (t, s1, s2)
}

/// The identity suite: each property runs `per_property` cases.
pub fn automaton_identities(seed: u64, per_property: usize) -> Vec<(&'static str, Tally)> {
    use rand::SeedableRng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();

    // (g@u)@v = g@(uv), checked on actions.
    let mut tally = Tally::default();
    for _ in 0..per_property {
        let (t, s, _) = random_case(&mut rng);
        let g = t.element(s);
        let (u, v) = (random_word(&mut rng, t.p, 4), random_word(&mut rng, t.p, 4));
        let lhs = g.section_at(&u).unwrap().section_at(&v).unwrap();
        let uv = raw(&u.concat(&v));
        let oracle = |w: &[u8]| {
            let mut full = uv.clone();
            full.extend_from_slice(w);
            t.act(s, &full)[uv.len()..].to_vec()
        };
        tally.record(agrees(&lhs, &oracle, 6).map_err(|e| format!("section composition: {e}")));
    }
    out.push(("section composition", tally));

    // (v*g)@v = g, and v*g acts as g below v and trivially elsewhere.
    let mut tally = Tally::default();
    for _ in 0..per_property {
        let (t, s, _) = random_case(&mut rng);
        let g = t.element(s);
        let v = random_word(&mut rng, t.p, 3);
        let inserted = Element::insert(&v, &g).unwrap();
        let back = inserted.section_at(&v).unwrap();
        let rv = raw(&v);
        let oracle = |w: &[u8]| {
            if w.len() >= rv.len() && w[..rv.len()] == rv[..] {
                let mut img = rv.clone();
                img.extend(t.act(s, &w[rv.len()..]));
                img
            } else {
                w.to_vec()
            }
        };
        let r = agrees(&inserted, &oracle, 7).and_then(|_| {
            if back == g {
                Ok(())
            } else {
                Err(format!("(v*g)@v != g for v={v}"))
            }
        });
        tally.record(r.map_err(|e| format!("insert/section: {e}")));
    }
    out.push(("insert/section inversion", tally));

    // (v*g)^h = v^h * g^(h@v).
    let mut tally = Tally::default();
    for _ in 0..per_property {
        let (t, s1, s2) = random_case(&mut rng);
        let (g, h) = (t.element(s1), t.element(s2));
        let v = random_word(&mut rng, t.p, 3);
        let lhs = Element::insert(&v, &g).unwrap().conjugate(&h);
        let rhs = Element::insert(&h.act(&v).unwrap(), &g.conjugate(&h.section_at(&v).unwrap())).unwrap();
        // Independent check of the right-hand side on words: h⁻¹ (v*g) h.
        let hv = raw(&h.act(&v).unwrap());
        let rv = raw(&v);
        let hinv = h.inv();
        let oracle = |w: &[u8]| {
            let a = raw(&hinv.act(&word(w)).unwrap());
            let b = if a.len() >= rv.len() && a[..rv.len()] == rv[..] {
                let mut img = rv.clone();
                img.extend(t.act(s1, &a[rv.len()..]));
                img
            } else {
                a
            };
            t.act(s2, &b)
        };
        let r = agrees(&lhs, &oracle, 6).and_then(|_| {
            if lhs == rhs {
                Ok(())
            } else {
                Err(format!("twist fails for v={v}, hv={}", word(&hv)))
            }
        });
        tally.record(r.map_err(|e| format!("twist: {e}")));
    }
    out.push(("twist identity", tally));

    // w^(gh) = (w^g)^h and w^(g⁻¹) inverts w^g.
    let mut tally = Tally::default();
    for _ in 0..per_property {
        let (t, s1, s2) = random_case(&mut rng);
        let (g, h) = (t.element(s1), t.element(s2));
        let gh = g.mul(&h);
        let oracle = |w: &[u8]| t.act(s2, &t.act(s1, w));
        let r = agrees(&gh, &oracle, 7).and_then(|_| {
            let ginv = g.inv();
            for w in words_up_to(t.p, 5) {
                if raw(&ginv.act(&word(&t.act(s1, &raw(&w)))).unwrap()) != raw(&w) {
                    return Err(format!("inverse fails on {w}"));
                }
            }
            Ok(())
        });
        tally.record(r.map_err(|e| format!("homomorphism: {e}")));
    }
    out.push(("product/action homomorphism", tally));

    // Minimization preserves the action on words up to length 12 (p = 2) or
    // 7 (p = 3).
    let mut tally = Tally::default();
    for _ in 0..per_property {
        let (t, s, _) = random_case(&mut rng);
        let g = t.element(s);
        let len = if t.p == 2 { 12 } else { 7 };
        let oracle = |w: &[u8]| t.act(s, w);
        let r = agrees(&g, &oracle, len).and_then(|_| {
            if g.size() <= t.states() + 1 {
                Ok(())
            } else {
                Err(format!("minimized size {} exceeds {} states", g.size(), t.states()))
            }
        });
        tally.record(r.map_err(|e| format!("minimization: {e}")));
    }
    out.push(("minimization preserves action", tally));
    out
}
