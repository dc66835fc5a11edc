//! Sizes of E_c(g,h) for g = (ba)^4 c, h = ad and states shared between
//! E_c and E_{c+9}.

use agr::engel::periodic_state_search;
use agr::groups::{grigorchuk, k_oracle};

fn main() {
    let scope = grigorchuk().scope();
    let (g, h) = (scope.eval("(b*a)^4*c").unwrap(), scope.eval("a*d").unwrap());
    let report = periodic_state_search(&g, &h, 30, 9, 200_000, Some(k_oracle().unwrap())).unwrap();
    for (c, s) in report.sizes.iter().enumerate().take(31) {
        println!("c = {c:>2}  states {s:>4}  {}", "#".repeat(s / 4));
    }
    println!("period 9 hits: {:?}", report.hits(9));
    if let Some(c23) = report.candidate(23, 9) {
        let sizes: Vec<usize> = c23.common.iter().take(10).map(|e| e.size()).collect();
        println!("c = 23: {} common states ({} in K), smallest sizes {sizes:?}", c23.common.len(), c23.in_k.len());
    }
}
