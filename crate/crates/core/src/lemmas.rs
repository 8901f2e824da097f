//! Derived laws, each emitted as a proof into a [`ProofBuilder`].
//!
//! All functions return the id of a step proving the stated equation for the
//! concrete terms passed in. The comment on each function names the axiom
//! system in which the proof is valid.

use crate::axioms::{Assignment, Dir};
use crate::error::{Error, Result};
use crate::proof::{Deriv, Proof, ProofBuilder};
use crate::term::{Alpha, Process, Sort, SumForm, Term};

fn none() -> Assignment {
    Assignment::new()
}

/// Summands of the top-level `+` tree of a term of either sort.
pub fn term_summands(t: &Term) -> Vec<Term> {
    match t.split_plus() {
        Some((l, r)) => {
            let mut out = term_summands(&l);
            out.extend(term_summands(&r));
            out
        }
        None => vec![t.clone()],
    }
}

/// Right-nested sum of `items`; the empty sum is the zero of `sort`.
pub fn right_sum(items: Vec<Term>, sort: Sort) -> Term {
    items.into_iter().rev().reduce(|acc, t| Term::plus(t, acc)).unwrap_or_else(|| Term::zero(sort))
}

/// The AC normal form: zeros dropped, summands sorted and deduplicated, right-nested.
pub fn canon_form(t: &Term) -> Term {
    let mut items: Vec<Term> = term_summands(t).into_iter().filter(|s| !s.is_zero()).collect();
    items.sort();
    items.dedup();
    right_sum(items, t.sort())
}

pub fn canon_process(p: &Process) -> Process {
    match canon_form(&Term::Proc(p.clone())) {
        Term::Proc(p) => p,
        Term::Sum(_) => unreachable!(),
    }
}

pub fn canon_sumform(s: &SumForm) -> SumForm {
    match canon_form(&Term::Sum(s.clone())) {
        Term::Sum(s) => s,
        Term::Proc(_) => unreachable!(),
    }
}

/// Position of summand `k` in a right-nested sum of `n` summands.
pub fn summand_path(k: usize, n: usize) -> Vec<u8> {
    let mut p = vec![1; k];
    if k + 1 < n {
        p.push(0);
    }
    p
}

/// `t = canon_form(t)` using A1–A4 of the sort of `t`.
pub fn ac_canon(b: &mut ProofBuilder, t: &Term) -> Result<usize> {
    let mut d = Deriv::new(b, t.clone());
    let mut p = Vec::new();
    // right-associate
    while let Some((l, _)) = d.cur().at(&p).and_then(|n| n.split_plus()) {
        if l.split_plus().is_some() {
            d.axiom("A2", Dir::L2R, &p, &none())?;
        } else {
            p.push(1);
        }
    }
    // drop zero summands
    p.clear();
    while let Some((l, r)) = d.cur().at(&p).and_then(|n| n.split_plus()) {
        if l.is_zero() {
            d.axiom("A1", Dir::L2R, &p, &none())?;
            d.axiom("A4", Dir::L2R, &p, &none())?;
            if d.cur().at(&p).is_some_and(|n| n.is_zero()) {
                p.pop();
            }
        } else if r.is_zero() {
            d.axiom("A4", Dir::L2R, &p, &none())?;
            // a collapsed tail leaves a zero under the parent sum
            if d.cur().at(&p).is_some_and(|n| n.is_zero()) {
                p.pop();
            }
        } else {
            p.push(1);
        }
    }
    // bubble sort, merging equal neighbours
    loop {
        let items = term_summands(d.cur());
        let n = items.len();
        let Some(i) = (0..n.saturating_sub(1)).find(|&i| items[i] >= items[i + 1]) else { break };
        let p = vec![1; i];
        let equal = items[i] == items[i + 1];
        if i + 2 == n {
            d.axiom(if equal { "A3" } else { "A1" }, Dir::L2R, &p, &none())?;
        } else {
            d.axiom("A2", Dir::R2L, &p, &none())?;
            let mut p0 = p.clone();
            p0.push(0);
            if equal {
                d.axiom("A3", Dir::L2R, &p0, &none())?;
            } else {
                d.axiom("A1", Dir::L2R, &p0, &none())?;
                d.axiom("A2", Dir::L2R, &p, &none())?;
            }
        }
    }
    debug_assert_eq!(d.cur(), &canon_form(t));
    d.finish()
}

/// `l = r` when both have the same AC normal form.
pub fn ac_eq(b: &mut ProofBuilder, l: &Term, r: &Term) -> Result<usize> {
    if l == r {
        return b.refl(l.clone());
    }
    let cl = ac_canon(b, l)?;
    let cr = ac_canon(b, r)?;
    if b.rhs(cl) != b.rhs(cr) {
        return Err(Error::NoMatch(format!("`{l}` and `{r}` differ modulo A1-A4")));
    }
    let back = b.sym(cr)?;
    b.trans(cl, back)
}

/// A proof of `s = t` from the sumform axioms A1–A4 exactly when `s` and `t`
/// offer the same actions.
pub fn provable_sumform_eq(s: &SumForm, t: &SumForm) -> Option<Proof> {
    let mut b = ProofBuilder::new();
    let id = ac_eq(&mut b, &Term::Sum(s.clone()), &Term::Sum(t.clone())).ok()?;
    Some(b.finish(id))
}

/// BKS1, `t.(t*x) + x = t*x` (E_s): FA2 with `s = 0`.
pub fn bks1(b: &mut ProofBuilder, t: &SumForm, x: &Process) -> Result<usize> {
    let star = Process::star(t.clone(), x.clone());
    let mut d = Deriv::new(b, Process::plus(Process::prefix(t.clone(), star), x.clone()));
    d.axiom("A4", Dir::R2L, &[0, 1, 0], &none())?;
    d.axiom("A1", Dir::L2R, &[0, 1, 0], &none())?;
    let whole = d.proc().clone();
    d.axiom("FA1", Dir::R2L, &[], &none().proc('x', whole))?;
    d.axiom("FA2", Dir::L2R, &[], &none())?;
    d.axiom("A1", Dir::L2R, &[0], &none())?;
    d.axiom("A4", Dir::L2R, &[0], &none())?;
    d.finish()
}

/// `s.P = a1.P + ... + an.P` over the sorted distinct actions of `s`, or `0` (E_s).
pub fn split_prefix(b: &mut ProofBuilder, s: &SumForm, p: &Process) -> Result<usize> {
    let mut d = Deriv::new(b, Process::prefix(s.clone(), p.clone()));
    d.with(&[0], ac_canon)?;
    if matches!(d.proc(), Process::Prefix(SumForm::Zero, _)) {
        d.axiom("A6", Dir::L2R, &[], &none())?;
        return d.finish();
    }
    let mut path = Vec::new();
    while matches!(d.cur().at(&path), Some(Term::Proc(Process::Prefix(SumForm::Plus(..), _)))) {
        d.axiom("A5", Dir::L2R, &path, &none())?;
        path.push(1);
    }
    d.finish()
}

/// `s*B = (a1.(s*B) + ... + an.(s*B)) + B` (E_s).
pub fn unfold(b: &mut ProofBuilder, s: &SumForm, body: &Process) -> Result<usize> {
    let star = Process::star(s.clone(), body.clone());
    let k = bks1(b, s, body)?;
    let back = b.sym(k)?;
    let mut d = Deriv::new(b, star);
    d.lemma(back, &[])?;
    let (s2, star2) = (s.clone(), Process::star(s.clone(), body.clone()));
    d.with(&[0], move |b, _| split_prefix(b, &s2, &star2))?;
    d.finish()
}

/// `s*B` equals the AC normal form of its unfolding (E_s).
pub fn unfold_canon(b: &mut ProofBuilder, s: &SumForm, body: &Process) -> Result<usize> {
    let u = unfold(b, s, body)?;
    let t = b.rhs(u).clone();
    let c = ac_canon(b, &t)?;
    b.trans(u, c)
}

/// `τ*x = τ.x` (E_d): FFIR with `s = 0`, then FA1.
pub fn tau_star(b: &mut ProofBuilder, x: &Process) -> Result<usize> {
    let mut d = Deriv::new(b, Process::star(SumForm::tau(), x.clone()));
    d.axiom("A4", Dir::R2L, &[0], &none())?;
    d.axiom("A1", Dir::L2R, &[0], &none())?;
    d.axiom("FFIR", Dir::L2R, &[], &none())?;
    d.axiom("FA1", Dir::L2R, &[1], &none())?;
    d.finish()
}

/// T2, `τ.x = τ.x + x` (E_d): FFIR with `s = 0` and BKS1.
pub fn t2(b: &mut ProofBuilder, x: &Process) -> Result<usize> {
    let l1 = tau_star(b, x)?;
    let l1 = b.sym(l1)?; // τ.x = τ*x
    let back = b.sym(l1)?; // τ*x = τ.x
    let k = bks1(b, &SumForm::tau(), x)?;
    let k = b.sym(k)?;
    let mut d = Deriv::new(b, Process::act_prefix(Alpha::Tau, x.clone()));
    d.lemma(l1, &[])?;
    d.lemma(k, &[])?;
    d.lemma(back, &[0, 1])?;
    d.axiom("T1", Dir::L2R, &[0], &none())?;
    d.finish()
}

/// `α.s*x = α.(s+τ)*x` (E_d): T1 backwards, then FFIR backwards.
pub fn tau_loop(b: &mut ProofBuilder, alpha: &Alpha, s: &SumForm, x: &Process) -> Result<usize> {
    let mut d = Deriv::new(b, Process::act_prefix(alpha.clone(), Process::star(s.clone(), x.clone())));
    d.axiom("T1", Dir::R2L, &[], &none())?;
    d.axiom("FFIR", Dir::R2L, &[1], &none())?;
    d.finish()
}

/// `α.(τ.(x+y) + x) = α.(x+y)` (E_b): FT2 with `s = 0`.
pub fn ft2_zero(b: &mut ProofBuilder, alpha: &Alpha, x: &Process, y: &Process) -> Result<usize> {
    let xy = Process::plus(x.clone(), y.clone());
    let body = Process::plus(Process::act_prefix(Alpha::Tau, xy), x.clone());
    let mut d = Deriv::new(b, Process::act_prefix(alpha.clone(), body));
    d.axiom("FA1", Dir::R2L, &[1, 0, 1], &none())?;
    let inner = d.cur().at(&[1]).and_then(|t| t.as_proc().cloned()).expect("prefix body");
    d.axiom("FA1", Dir::R2L, &[1], &none().proc('x', inner))?;
    d.axiom("FT2", Dir::L2R, &[], &none())?;
    d.axiom("FA1", Dir::L2R, &[1], &none())?;
    d.finish()
}

/// `α.(s+τ)*x = α.s*x` (E_b): FT1, then FT2 with `s = 0`.
pub fn ft1_reform(b: &mut ProofBuilder, alpha: &Alpha, s: &SumForm, x: &Process) -> Result<usize> {
    let sx = Process::star(s.clone(), x.clone());
    let lemma = ft2_zero(b, alpha, &sx, &Process::Nil)?;
    let start = Process::act_prefix(alpha.clone(), Process::star(SumForm::plus(s.clone(), SumForm::tau()), x.clone()));
    let mut d = Deriv::new(b, start);
    d.axiom("FT1", Dir::L2R, &[1], &none())?;
    d.axiom("A4", Dir::R2L, &[1, 0, 1], &none())?;
    d.lemma(lemma, &[])?;
    d.axiom("A4", Dir::L2R, &[1], &none())?;
    d.finish()
}

/// `a*(a*x) = a*x` for any sumform `a` (E_s): FA2 with `s = t`, then BKS1.
pub fn star_idem(b: &mut ProofBuilder, a: &SumForm, x: &Process) -> Result<usize> {
    let k = bks1(b, a, x)?;
    let k = b.sym(k)?;
    let mut d = Deriv::new(b, Process::star(a.clone(), Process::star(a.clone(), x.clone())));
    d.lemma(k, &[1])?;
    d.axiom("A3", Dir::R2L, &[1, 0, 1, 0], &none())?;
    d.axiom("FA2", Dir::L2R, &[], &none())?;
    d.axiom("A3", Dir::L2R, &[0], &none())?;
    d.finish()
}

/// FT1, `(s+τ)*x = τ.(s*x) + s*x`, derived in E_d from FFIR and T2.
pub fn ft1_delay(b: &mut ProofBuilder, s: &SumForm, x: &Process) -> Result<usize> {
    let t = t2(b, &Process::star(s.clone(), x.clone()))?;
    let mut d = Deriv::new(b, Process::star(SumForm::plus(s.clone(), SumForm::tau()), x.clone()));
    d.axiom("FFIR", Dir::L2R, &[], &none())?;
    d.lemma(t, &[])?;
    d.finish()
}

/// FT2, `α.s*(τ.s*(x+y) + x) = α.s*(x+y)`, derived in E_d.
pub fn ft2_delay(b: &mut ProofBuilder, alpha: &Alpha, s: &SumForm, x: &Process, y: &Process) -> Result<usize> {
    let xy = Process::plus(x.clone(), y.clone());
    let w = Process::star(s.clone(), xy.clone());
    let tw = Process::act_prefix(Alpha::Tau, w.clone());

    // α.W = α.s*(τ.W + (x+y))
    let loop_law = tau_loop(b, alpha, s, &xy)?;
    let mut a = Deriv::new(b, Process::act_prefix(alpha.clone(), w.clone()));
    a.lemma(loop_law, &[])?;
    a.axiom("FA2", Dir::R2L, &[1], &none().sum('s', s.clone()).sum('t', SumForm::tau()))?;
    a.axiom("FFIR", Dir::L2R, &[1, 1, 0, 1], &none())?;
    a.axiom("T1", Dir::L2R, &[1, 1, 0], &none())?;
    let chain_a = a.finish()?;

    // τ.W + x = τ.W + (x+y)
    let t2w = t2(b, &w)?;
    let unf = unfold(b, s, &xy)?;
    let fold = b.sym(unf)?;
    let unfolded = match b.rhs(unf) {
        Term::Proc(p) => p.clone(),
        Term::Sum(_) => unreachable!(),
    };
    let t2back = b.sym(t2w)?;
    let mut c = Deriv::new(b, Process::plus(tw.clone(), x.clone()));
    c.lemma(t2w, &[0])?;
    c.lemma(unf, &[0, 1])?;
    let target = Process::plus(Process::plus(tw.clone(), unfolded), xy.clone());
    c.with(&[], |b, t| ac_eq(b, t, &Term::Proc(target)))?;
    c.lemma(fold, &[0, 1])?;
    c.lemma(t2back, &[0])?;
    let chain_b = c.finish()?;

    let back_a = b.sym(chain_a)?;
    let start = Process::act_prefix(alpha.clone(), Process::star(s.clone(), Process::plus(tw, x.clone())));
    let mut d = Deriv::new(b, start);
    d.lemma(chain_b, &[1, 1])?;
    d.lemma(back_a, &[])?;
    d.finish()
}
