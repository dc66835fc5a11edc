//! Finite permutation groups via base and strong generating set.
//!
//! Permutations act on the right: `x^(gh) = (x^g)^h`.

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rustc_hash::FxHashMap;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Perm(Vec<u32>);

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm((0..n as u32).collect())
    }

    /// Panics unless `images` is a bijection of `0..images.len()`.
    pub fn from_images(images: Vec<u32>) -> Self {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            assert!(!std::mem::replace(&mut seen[i as usize], true), "not a permutation");
        }
        Perm(images)
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn image(&self, x: usize) -> usize {
        self.0[x] as usize
    }

    pub fn images(&self) -> &[u32] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i == x as usize)
    }

    /// `self` then `other`.
    pub fn then(&self, other: &Perm) -> Perm {
        Perm(self.0.iter().map(|&x| other.0[x as usize]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u32; self.0.len()];
        for (i, &x) in self.0.iter().enumerate() {
            inv[x as usize] = i as u32;
        }
        Perm(inv)
    }

    /// `other⁻¹ self other`.
    pub fn conjugate(&self, other: &Perm) -> Perm {
        other.inverse().then(self).then(other)
    }

    fn first_moved(&self) -> Option<usize> {
        self.0.iter().enumerate().position(|(i, &x)| i != x as usize)
    }
}

#[derive(Clone, Debug)]
struct Level {
    point: usize,
    gens: Vec<Perm>,
    orbit: Vec<usize>,
    /// `transversal[b]` maps `point` to `b`.
    transversal: FxHashMap<usize, Perm>,
}

impl Level {
    fn new(point: usize) -> Self {
        Level { point, gens: Vec::new(), orbit: Vec::new(), transversal: FxHashMap::default() }
    }

    fn rebuild(&mut self, n: usize) {
        self.transversal.clear();
        self.transversal.insert(self.point, Perm::identity(n));
        self.orbit = vec![self.point];
        let mut k = 0;
        while k < self.orbit.len() {
            let b = self.orbit[k];
            for s in &self.gens {
                let c = s.image(b);
                if !self.transversal.contains_key(&c) {
                    let u = self.transversal[&b].then(s);
                    self.transversal.insert(c, u);
                    self.orbit.push(c);
                }
            }
            k += 1;
        }
    }
}

/// Stabilizer chain of a permutation group.
#[derive(Clone, Debug)]
pub struct StabChain {
    degree: usize,
    levels: Vec<Level>,
}

impl StabChain {
    /// Builds the chain: a randomized sifting phase, then a deterministic
    /// Schreier-generator pass that completes and verifies it.
    pub fn new(degree: usize, gens: &[Perm]) -> Self {
        let mut chain = StabChain { degree, levels: Vec::new() };
        let gens: Vec<Perm> = gens.iter().filter(|g| !g.is_identity()).cloned().collect();
        for g in &gens {
            assert_eq!(g.degree(), degree);
            chain.add_residue(g.clone(), 0);
        }
        if gens.is_empty() {
            return chain;
        }
        chain.random_phase(&gens, 20);
        chain.complete();
        chain
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> BigUint {
        self.levels.iter().fold(BigUint::from(1u32), |acc, l| acc * BigUint::from(l.orbit.len()))
    }

    pub fn base(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.point).collect()
    }

    /// Strips `g` starting at level `from`; returns the residue and the
    /// level where stripping stopped (`levels.len()` if it went through).
    fn strip(&self, mut g: Perm, from: usize) -> (Perm, usize) {
        for (i, level) in self.levels.iter().enumerate().skip(from) {
            let b = g.image(level.point);
            match level.transversal.get(&b) {
                Some(u) => g = g.then(&u.inverse()),
                None => return (g, i),
            }
        }
        (g, self.levels.len())
    }

    pub fn contains(&self, g: &Perm) -> bool {
        let (h, _) = self.strip(g.clone(), 0);
        h.is_identity()
    }

    /// Adds `h` (fixing the base points before `level`) to levels
    /// `level..=j`, extending the base if needed. Returns the deepest level
    /// touched.
    fn add_residue(&mut self, h: Perm, level: usize) -> usize {
        let (h, j) = self.strip(h, level);
        if h.is_identity() {
            return usize::MAX;
        }
        if j == self.levels.len() {
            let point = h.first_moved().expect("non-identity");
            self.levels.push(Level::new(point));
        }
        for l in level..=j {
            self.levels[l].gens.push(h.clone());
            self.levels[l].rebuild(self.degree);
        }
        j
    }

    fn random_phase(&mut self, gens: &[Perm], patience: usize) {
        let mut rng = rand::rngs::StdRng::seed_from_u64(0x5eed);
        // Product replacement.
        let mut pool: Vec<Perm> = gens.to_vec();
        while pool.len() < 10 {
            pool.push(gens[pool.len() % gens.len()].clone());
        }
        let mut acc = Perm::identity(self.degree);
        for _ in 0..50 {
            let (i, j) = (rng.gen_range(0..pool.len()), rng.gen_range(0..pool.len()));
            if i != j {
                pool[i] = pool[i].then(&pool[j]);
            }
        }
        let mut streak = 0;
        while streak < patience {
            let (i, j) = (rng.gen_range(0..pool.len()), rng.gen_range(0..pool.len()));
            if i != j {
                pool[i] = pool[i].then(&pool[j]);
            }
            acc = acc.then(&pool[i]);
            if self.add_residue(acc.clone(), 0) == usize::MAX {
                streak += 1;
            } else {
                streak = 0;
            }
        }
    }

    /// Deterministic completion: every Schreier generator of every level
    /// strips through the deeper levels.
    fn complete(&mut self) {
        let mut i = self.levels.len();
        'outer: while i > 0 {
            let lvl = i - 1;
            let level = self.levels[lvl].clone();
            for &b in &level.orbit {
                for s in &level.gens {
                    let ub = &level.transversal[&b];
                    let ubs = &level.transversal[&s.image(b)];
                    let schreier = ub.then(s).then(&ubs.inverse());
                    let j = self.add_residue(schreier, lvl + 1);
                    if j != usize::MAX {
                        i = j + 1;
                        continue 'outer;
                    }
                }
            }
            i -= 1;
        }
    }

    /// Normal closure of `subgroup_gens` under conjugation by `ambient_gens`.
    pub fn normal_closure(degree: usize, subgroup_gens: &[Perm], ambient_gens: &[Perm]) -> (StabChain, Vec<Perm>) {
        let mut gens: Vec<Perm> = subgroup_gens.iter().filter(|g| !g.is_identity()).cloned().collect();
        let mut chain = StabChain::new(degree, &gens);
        let mut k = 0;
        while k < gens.len() {
            let mut grew = false;
            for s in ambient_gens {
                let c = gens[k].conjugate(s);
                if !chain.contains(&c) {
                    gens.push(c);
                    grew = true;
                }
            }
            if grew {
                chain = StabChain::new(degree, &gens);
            }
            k += 1;
        }
        (chain, gens)
    }
}
