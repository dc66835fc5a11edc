//! Orders of level quotients of the Grigorchuk group and the index of K.

use agr::groups::{grig_k_generators, grigorchuk, k_image, k_oracle, level_quotient, KMembership};

fn main() {
    let group = grigorchuk();
    for m in 1..=5 {
        let q = level_quotient(&group, m).unwrap();
        let k = k_image(m).unwrap();
        println!("level {m}: |G_m| = {:>6}  |K_m| = {:>5}  index {}", q.order, k.k_order, k.index());
    }
    let oracle = k_oracle().unwrap();
    println!("membership decided at level {}", oracle.level());
    let scope = group.scope();
    let (x, _, _) = grig_k_generators();
    for (name, e) in [("x", x), ("a", scope.eval("a").unwrap()), ("(ab)^4", scope.eval("(a*b)^4").unwrap())] {
        let verdict = oracle.membership(&e).unwrap();
        println!("{name} in K: {}", verdict == KMembership::InK);
    }
}
