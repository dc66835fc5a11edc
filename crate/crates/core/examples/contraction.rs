//! Estimated contraction constants from balls of growing radius.

use agr::groups::{estimate_contraction, grigorchuk, gupta_sidki};

fn main() {
    for group in [grigorchuk(), gupta_sidki()] {
        for radius in [4, 6, 8] {
            let est = estimate_contraction(&group, radius).unwrap();
            println!(
                "{:<12} L = {radius}: eta = {}/{}  C = {}/{}  ({} samples, {} unresolved)",
                group.name(),
                est.eta_num,
                est.denom,
                est.c_num,
                est.denom,
                est.samples,
                est.unresolved
            );
        }
    }
}
