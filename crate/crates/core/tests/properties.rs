mod common;

use common::Gen;
use flatiter::equivalence::{bisimilar, congruence};
use flatiter::term::{substitute, Substitution};
use flatiter::{parse_process, Process, RelKind, SumForm};

fn congruent(p: &Process, q: &Process, k: RelKind) -> bool {
    congruence(p, q, k).is_ok()
}

#[test]
fn lattice_and_congruence_within_equivalence() {
    use RelKind::*;
    let order = [(Strong, Branching), (Branching, Eta), (Branching, Delay), (Eta, Weak), (Delay, Weak)];
    for (p, q) in common::pair_pool(3, 400, 10) {
        for (fine, coarse) in order {
            if bisimilar(&p, &q, fine) {
                assert!(bisimilar(&p, &q, coarse), "{p} / {q}: {fine} but not {coarse}");
            }
            if congruent(&p, &q, fine) {
                assert!(congruent(&p, &q, coarse), "{p} / {q}: {fine} congruent but not {coarse}");
            }
        }
        for k in RelKind::ALL {
            if congruent(&p, &q, k) {
                assert!(bisimilar(&p, &q, k), "{p} / {q} under {k}");
            }
        }
    }
}

#[test]
fn congruence_is_preserved_by_contexts() {
    let rs: Vec<Process> = ["0", "X", "a.Y", "tau.b.0"].iter().map(|t| parse_process(t).unwrap()).collect();
    let ss: Vec<SumForm> = ["a", "tau", "a+tau", "0"].iter().map(|t| flatiter::syntax::parse_sumform(t).unwrap()).collect();
    let mut checked = 0;
    for (p, q) in common::pair_pool(5, 300, 8) {
        for k in RelKind::ALL {
            if !congruent(&p, &q, k) {
                continue;
            }
            checked += 1;
            let mut ctx = Vec::new();
            for r in &rs {
                ctx.push((Process::plus(p.clone(), r.clone()), Process::plus(q.clone(), r.clone())));
                ctx.push((Process::plus(r.clone(), p.clone()), Process::plus(r.clone(), q.clone())));
            }
            for s in &ss {
                ctx.push((Process::prefix(s.clone(), p.clone()), Process::prefix(s.clone(), q.clone())));
                ctx.push((Process::star(s.clone(), p.clone()), Process::star(s.clone(), q.clone())));
            }
            for (cp, cq) in ctx {
                assert!(congruent(&cp, &cq, k), "{cp} / {cq} under {k}");
            }
        }
    }
    assert!(checked > 100, "only {checked} congruent pairs");
}

#[test]
fn closed_substitutions_preserve_equivalence() {
    let closed: Vec<Process> = ["0", "a.0", "tau.0", "a*b.0", "tau*0"].iter().map(|t| parse_process(t).unwrap()).collect();
    let mut g = Gen::new(17);
    for (p, q) in common::pair_pool(9, 200, 8) {
        for k in RelKind::ALL {
            if !bisimilar(&p, &q, k) {
                continue;
            }
            for _ in 0..4 {
                let sigma: Substitution = [("X", &closed), ("Y", &closed)]
                    .iter()
                    .map(|(x, pool)| (x.to_string(), pool[rand::Rng::gen_range(&mut g.rng, 0..pool.len())].clone()))
                    .collect();
                let (ps, qs) = (substitute(&p, &sigma), substitute(&q, &sigma));
                assert!(bisimilar(&ps, &qs, k), "{p} / {q} under {k} with {sigma:?}");
            }
        }
    }
}

#[test]
fn axiom_rewrites_stay_congruent() {
    let mut g = Gen::new(23);
    for _ in 0..150 {
        let p = g.sized(10);
        for k in RelKind::ALL {
            let q = g.rewrite(&p, k, 2);
            assert!(congruent(&p, &q, k), "{p} -> {q} under {k}");
        }
    }
}
