//! Decides the Engel property for a few pairs in the Grigorchuk group and
//! prints the tuple-graph records for one of them.

use agr::engel::{decide_engel_pair, EngelBudget, Verdict};
use agr::groups::grigorchuk;

fn main() {
    let scope = grigorchuk().scope();
    let budget = EngelBudget::default();
    let pairs = [("b", "a"), ("a*d", "c"), ("(b*a)^4*c", "d"), ("(b*a)^4*c", "a*d"), ("b", "a*d")];
    for (g, h) in pairs {
        let (ge, he) = (scope.eval(g).unwrap(), scope.eval(h).unwrap());
        let d = decide_engel_pair(&ge, &he, &budget).unwrap();
        let source = if d.by_iteration { "iteration" } else { "tuple graph" };
        println!("g = {g:<10} h = {h:<4} order(h) = {:<2} {} via {source}", d.order_h, d.verdict);
        if let (Some(report), Verdict::EngelNo(k)) = (&d.report, &d.verdict) {
            println!("  {} vertices explored, cycle of length {}", report.vertices.len(), report.cycles[*k].len());
        }
    }

    let (g, h) = (scope.eval("b").unwrap(), scope.eval("a*d").unwrap());
    let d = decide_engel_pair(&g, &h, &EngelBudget { max_c: 0, ..budget }).unwrap();
    println!("\nrecords for (b, ad):");
    print!("{}", d.report.unwrap().to_records());
}
