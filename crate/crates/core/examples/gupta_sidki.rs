//! The Gupta-Sidki group: its recursion, a periodic certificate, and
//! witnesses for several elements.

use agr::engel::{decide_engel_element, gupta_sidki_lemma_data, gupta_sidki_stated_lemma_data, lemma_check, ElementVerdict};
use agr::groups::gupta_sidki;
use agr::mealy::Word;

fn main() {
    let group = gupta_sidki();
    let scope = group.scope();
    println!("{group}");
    let (a, t) = (scope.eval("a").unwrap(), scope.eval("t").unwrap());
    for w in ["11", "21", "31"] {
        let w: Word = w.parse().unwrap();
        println!("{w}^a = {}   {w}^t = {}", a.act(&w).unwrap(), t.act(&w).unwrap());
    }

    for (label, data) in [("stated", gupta_sidki_stated_lemma_data()), ("verified", gupta_sidki_lemma_data())] {
        let cert = lemma_check(&data.a0, data.period, &data.word).unwrap();
        println!("{label} tuple: period {} word {} checked {}", data.period, data.word, cert.checked);
    }

    for text in ["a", "t", "a*t", "t*a^-1*t"] {
        let h = scope.eval(text).unwrap();
        match decide_engel_element(&group, &h).unwrap() {
            ElementVerdict::NotEngel { g, period } => {
                println!("{text}: not Engel, witness with {} states, period {period}", g.size())
            }
            other => println!("{text}: {other:?}"),
        }
    }
}
