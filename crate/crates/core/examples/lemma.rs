//! Checks the periodic certificate for the Grigorchuk group and shows the
//! sizes of the tuples along the way.

use agr::engel::{difference_step, grigorchuk_lemma_data, lemma_check};
use agr::groups::k_membership;

fn main() {
    let data = grigorchuk_lemma_data();
    let mut tuple = data.a0.clone();
    for n in 0..=data.period {
        let sizes: Vec<usize> = tuple.iter().map(|e| e.size()).collect();
        println!("A_{n}: states {sizes:?}");
        tuple = difference_step(&tuple);
    }
    let cert = lemma_check(&data.a0, data.period, &data.word).expect("tuple has four entries");
    for (i, (fixes, nontrivial, returns)) in cert.entry_checks.iter().enumerate() {
        println!("entry {}: fixes {} {fixes}, non-trivial {nontrivial}, section is A_0,{} {returns}", i + 1, data.word, i + 1);
    }
    let in_k = data.a0.iter().all(|e| k_membership(e) == Ok(agr::groups::KMembership::InK));
    println!("certificate checked: {}, A_0 in K^4: {in_k}", cert.checked);
}
