//! Builds the element g with [.., ad, .., ad] never trivial and follows
//! the periodic sections down the tree.

use agr::engel::{build_witness, engel_iterate, grigorchuk_lemma_data};
use agr::groups::grigorchuk;

fn main() {
    let scope = grigorchuk().scope();
    let h = scope.eval("a*d").unwrap();
    let data = grigorchuk_lemma_data();
    let w = build_witness(&h, &data.a0).unwrap();
    let orbit: Vec<String> = w.orbit.iter().map(|v| v.to_string()).collect();
    println!("orbit of ad at level {}: {}", w.level, orbit.join(" "));
    println!("cocycle holds: {}", w.cocycle_holds());
    println!("g has {} states", w.g.size());

    for m in 0..=2 {
        let c = data.period * m;
        let run = engel_iterate(&w.g, &h, c, 1_000_000).unwrap();
        let v = w.orbit[0].concat(&data.word.repeat(m));
        let section = run.value.section_at(&v).unwrap();
        println!("E_{c:<2} has {:>4} states; section at {v} is A_0,1: {}", run.value.size(), section == data.a0[0]);
    }
}
