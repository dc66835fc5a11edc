use agr::engel::{
    branch_certificate, build_witness, decide_engel_pair, engel_iterate, explore, exponent_survey,
    grigorchuk_lemma_data, gupta_sidki_lemma_data, start_tuple, step_tuple, BranchCertificate, EdgeLabel,
    EngelBudget, TupleVertex, Verdict,
};
use agr::groups::{self, grigorchuk, gupta_sidki};
use agr::Element;

fn grig(text: &str) -> Element {
    grigorchuk().scope().eval(text).unwrap()
}

#[test]
fn survey_seeded_with_lemma_tuple_finds_a_cycle() {
    let g = grigorchuk();
    let seed = TupleVertex::new(grigorchuk_lemma_data().a0);
    let report = exponent_survey(&g, 4, 1, &EngelBudget::default(), &[seed]).unwrap();
    assert_eq!(report.ball_size, 5);
    assert!(!report.cycles.is_empty());
    for cyc in &report.cycles {
        assert!(cyc.iter().all(|v| !v.is_trivial()));
    }
}

#[test]
fn nondescending_runs_are_bounded_by_n() {
    let budget = EngelBudget::default();
    let gs = ["a", "b", "c", "d", "a*b", "a*d", "(b*a)^4*c"];
    for h in ["a", "b", "c", "d"] {
        for g in gs {
            let t = start_tuple(&grig(g), &grig(h), 2).unwrap();
            let run = explore(&t, &budget).max_nondescending_run().unwrap();
            assert!(run <= 2, "g={g} h={h}: run {run}");
        }
    }
    let t = start_tuple(&grig("(b*a)^4*c"), &grig("a*d"), 4).unwrap();
    let report = explore(&t, &budget);
    assert!(report.max_nondescending_run().unwrap() <= 4);
}

#[test]
fn engel_no_cycles_are_sound() {
    let (g, h) = (grig("(b*a)^4*c"), grig("a*d"));
    let d = decide_engel_pair(&g, &h, &EngelBudget::default()).unwrap();
    let Verdict::EngelNo(k) = d.verdict else { panic!("expected engel-no, got {}", d.verdict) };
    let report = d.report.unwrap();
    let cyc = &report.cycles[k];
    for (i, &v) in cyc.iter().enumerate() {
        let t = &report.vertices[v];
        assert!(!t.is_trivial());
        let next = &report.vertices[cyc[(i + 1) % cyc.len()]];
        assert!(step_tuple(t).successors.iter().any(|(_, s)| s == next));
    }
}

#[test]
fn edges_match_step_definition() {
    let t = start_tuple(&grig("(b*a)^4*c"), &grig("a*d"), 4).unwrap();
    let report = explore(&t, &EngelBudget::default());
    for (i, edges) in report.edges.iter().enumerate().take(200) {
        let diffs = report.vertices[i].differences();
        for &(label, target) in edges {
            let want = match label {
                EdgeLabel::Difference => diffs.clone(),
                EdgeLabel::Section(j) => {
                    let w = agr::mealy::Word::from_letters([j]).unwrap();
                    TupleVertex::new(diffs.entries().iter().map(|d| d.section_at(&w).unwrap()).collect())
                }
            };
            assert_eq!(report.vertices[target], want);
        }
    }
}

#[test]
fn involutions_are_engel_with_confirmed_depth() {
    for h in ["a", "b", "c", "d"] {
        for g in ["a", "b", "c", "d", "a*b", "a*d", "(b*a)^4*c"] {
            let (g, h) = (grig(g), grig(h));
            let d = decide_engel_pair(&g, &h, &EngelBudget::default()).unwrap();
            let Verdict::EngelYes(c) = d.verdict else { panic!() };
            assert!(c <= 64);
            assert!(engel_iterate(&g, &h, c, 100_000).unwrap().value.is_identity());
        }
    }
}

#[test]
fn lemma_chain_stays_nontrivial() {
    let data = grigorchuk_lemma_data();
    let h = grig("a*d");
    let w = build_witness(&h, &data.a0).unwrap();
    let run = engel_iterate(&w.g, &h, 3 * data.period, 1_000_000).unwrap();
    let mut cur = w.g.clone();
    for _ in 0..=3 * data.period {
        assert!(!cur.is_identity());
        cur = cur.commutator(&h);
    }
    assert_eq!(run.sizes.len(), 3 * data.period + 1);
    // [g,h] is the one-step image of the tuple.
    assert_eq!(w.g.commutator(&h), w.assemble(&agr::engel::difference_step(&data.a0)));
}

#[test]
fn gupta_sidki_witness_chain() {
    let s = gupta_sidki().scope();
    let data = gupta_sidki_lemma_data();
    for text in ["a", "t", "a*t"] {
        let h = s.eval(text).unwrap();
        let w = build_witness(&h, &data.a0).unwrap();
        assert!(w.cocycle_holds());
        for m in 0..3 {
            let e = engel_iterate(&w.g, &h, data.period * m, 1_000_000).unwrap().value;
            let v = w.orbit[0].concat(&data.word.repeat(m));
            assert_eq!(e.section_at(&v).unwrap(), data.a0[0], "h={text} m={m}");
        }
    }
}

#[test]
fn branch_certificates() {
    let oracle = groups::k_oracle().unwrap();
    let data = grigorchuk_lemma_data();
    let cyc = vec![TupleVertex::new(data.a0.clone())];
    assert_eq!(branch_certificate(&cyc, oracle).unwrap(), BranchCertificate::CertifiedNotEngel(4));
    let one = grigorchuk().identity();
    let trivial = vec![TupleVertex::new(vec![one; 4])];
    assert_eq!(branch_certificate(&trivial, oracle).unwrap(), BranchCertificate::NotCertified);
}
