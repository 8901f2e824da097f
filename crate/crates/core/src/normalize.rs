//! Normal forms, head normal forms, saturation and strong saturation, each
//! returned together with a proof connecting input and output.
//!
//! A normal form is `s*(Σ α_i.P_i + Σ x_j)` with normal-form bodies `P_i`;
//! in branching mode the loop `s` has no τ. Forms produced here are also
//! AC-canonical: loop sumforms and bodies are sorted, duplicate-free and
//! right-nested.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use crate::axioms::{Assignment, Dir};
use crate::equivalence::{is_saturated, is_strongly_saturated, SatKind};
use crate::error::{Error, Result};
use crate::lemmas::{
    ac_canon, ac_eq, canon_sumform, right_sum, split_prefix, summand_path, t2, tau_loop, term_summands, unfold,
    unfold_canon,
};
use crate::proof::{Deriv, Proof, ProofBuilder};
use crate::term::{init_actions, Alpha, Process, Sort, SumForm, Term};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NfMode {
    Strong,
    Branching,
}

impl std::str::FromStr for NfMode {
    type Err = String;
    fn from_str(s: &str) -> Result<NfMode, String> {
        match s {
            "strong" => Ok(NfMode::Strong),
            "branching" => Ok(NfMode::Branching),
            other => Err(format!("unknown normal-form mode `{other}`")),
        }
    }
}

fn as_proc(t: &Term) -> Process {
    t.as_proc().cloned().expect("process term")
}

pub fn is_normal_form(p: &Process, mode: NfMode) -> bool {
    let Process::Star(s, body) = p else { return false };
    if mode == NfMode::Branching && init_actions(s).contains(&Alpha::Tau) {
        return false;
    }
    if **body == Process::Nil {
        return true;
    }
    body.summands().into_iter().all(|q| match q {
        Process::Var(_) => true,
        Process::Prefix(SumForm::Act(_), r) => is_normal_form(r, mode),
        _ => false,
    })
}

/// Normal-form construction sharing one proof builder.
pub(crate) struct Normalizer {
    mode: NfMode,
    memo: HashMap<Process, usize>,
}

impl Normalizer {
    pub fn new(mode: NfMode) -> Normalizer {
        Normalizer { mode, memo: HashMap::new() }
    }

    /// `p = N` with `N` a canonical normal form.
    pub fn nf(&mut self, b: &mut ProofBuilder, p: &Process) -> Result<usize> {
        if let Some(&id) = self.memo.get(p) {
            return Ok(id);
        }
        let mut d = Deriv::new(b, p.clone());
        match p {
            Process::Var(_) | Process::Nil => d.axiom("FA1", Dir::R2L, &[], &Assignment::new())?,
            Process::Prefix(s, q) => {
                d.with(&[1], |b, _| self.nf(b, q))?;
                let n = as_proc(&d.cur().at(&[1]).unwrap());
                d.with(&[], |b, _| self.nf_prefix(b, s, &n))?;
            }
            Process::Plus(l, r) => {
                d.with(&[0], |b, _| self.nf(b, l))?;
                d.with(&[1], |b, _| self.nf(b, r))?;
                let (n1, n2) = match d.proc() {
                    Process::Plus(a, c) => ((**a).clone(), (**c).clone()),
                    _ => unreachable!(),
                };
                d.with(&[], |b, _| self.nf_plus(b, &n1, &n2))?;
            }
            Process::Star(s, q) => {
                d.with(&[1], |b, _| self.nf(b, q))?;
                let n = as_proc(&d.cur().at(&[1]).unwrap());
                d.with(&[], |b, _| self.nf_star(b, s, &n))?;
            }
        }
        let id = d.finish()?;
        self.memo.insert(p.clone(), id);
        Ok(id)
    }

    /// `s.N = 0*(Σ a.N)` for a normal form `N`.
    fn nf_prefix(&mut self, b: &mut ProofBuilder, s: &SumForm, n: &Process) -> Result<usize> {
        let mut d = Deriv::new(b, Process::prefix(s.clone(), n.clone()));
        d.with(&[], |b, _| split_prefix(b, s, n))?;
        d.with(&[], ac_canon)?;
        d.axiom("FA1", Dir::R2L, &[], &Assignment::new())?;
        d.finish()
    }

    /// `N1 + N2 = 0*(B)` for normal forms `N1`, `N2`.
    fn nf_plus(&mut self, b: &mut ProofBuilder, n1: &Process, n2: &Process) -> Result<usize> {
        let mut d = Deriv::new(b, Process::plus(n1.clone(), n2.clone()));
        for (i, n) in [(0u8, n1), (1, n2)] {
            let Process::Star(s, body) = n else {
                return Err(Error::Internal(format!("`{n}` is not a normal form")));
            };
            d.with(&[i], |b, _| unfold_canon(b, s, body))?;
        }
        d.with(&[], ac_canon)?;
        d.axiom("FA1", Dir::R2L, &[], &Assignment::new())?;
        d.finish()
    }

    /// `s*N` for a normal form `N`.
    fn nf_star(&mut self, b: &mut ProofBuilder, s: &SumForm, n: &Process) -> Result<usize> {
        let Process::Star(t, body) = n else {
            return Err(Error::Internal(format!("`{n}` is not a normal form")));
        };
        let mut d = Deriv::new(b, Process::star(s.clone(), n.clone()));
        d.with(&[1], |b, _| unfold(b, t, body))?;
        d.with(&[1], ac_canon)?;
        d.with(&[0], ac_canon)?;
        let loop_ = match d.proc() {
            Process::Star(s, _) => s.clone(),
            _ => unreachable!(),
        };
        if self.mode == NfMode::Branching && init_actions(&loop_).contains(&Alpha::Tau) {
            let visible = canon_sumform(&SumForm::sum_of(init_actions(&loop_).into_iter().filter(|a| !a.is_tau())));
            let split = Term::Sum(SumForm::plus(visible, SumForm::tau()));
            d.with(&[0], |b, t| ac_eq(b, t, &split))?;
            d.axiom("FT1", Dir::L2R, &[], &Assignment::new())?;
            let (m, _) = split_sum(d.proc());
            d.with(&[0], |b, _| self.nf_prefix(b, &SumForm::tau(), &m))?;
            let (l, r) = split_sum(d.proc());
            d.with(&[], |b, _| self.nf_plus(b, &l, &r))?;
        }
        d.finish()
    }
}

/// `(l, r)` of `l + r`; for `τ.M + r` the first component is `M`.
fn split_sum(p: &Process) -> (Process, Process) {
    match p {
        Process::Plus(l, r) => match &**l {
            Process::Prefix(SumForm::Act(Alpha::Tau), m) if matches!(**r, Process::Star(..)) && **m == **r => {
                ((**m).clone(), (**r).clone())
            }
            _ => ((**l).clone(), (**r).clone()),
        },
        _ => unreachable!("expected a sum"),
    }
}

fn conclusion(b: &ProofBuilder, id: usize) -> Process {
    as_proc(b.rhs(id))
}

pub fn to_normal_form(p: &Process, mode: NfMode) -> Result<(Process, Proof)> {
    to_normal_form_fuel(p, mode, None)
}

pub fn to_normal_form_fuel(p: &Process, mode: NfMode, fuel: Option<usize>) -> Result<(Process, Proof)> {
    let mut b = ProofBuilder::with_budget(fuel);
    let id = Normalizer::new(mode).nf(&mut b, p)?;
    Ok((conclusion(&b, id), b.finish(id)))
}

/// `Σ α_i.P_i + Σ x_j` with normal-form residuals `P_i`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HeadForm {
    pub summands: Vec<(Alpha, Process)>,
    pub vars: Vec<String>,
}

impl HeadForm {
    pub fn of(p: &Process) -> Option<HeadForm> {
        let mut h = HeadForm { summands: Vec::new(), vars: Vec::new() };
        if *p == Process::Nil {
            return Some(h);
        }
        for q in p.summands() {
            match q {
                Process::Prefix(SumForm::Act(a), r) => h.summands.push((a.clone(), (**r).clone())),
                Process::Var(x) => h.vars.push(x.clone()),
                _ => return None,
            }
        }
        Some(h)
    }
}

/// `p = N = H` where `N` is a normal form and `H` its canonical unfolding.
pub(crate) fn head_in(b: &mut ProofBuilder, norm: &mut Normalizer, p: &Process) -> Result<usize> {
    let n = norm.nf(b, p)?;
    let Process::Star(s, body) = conclusion(b, n) else { unreachable!() };
    let u = unfold_canon(b, &s, &body)?;
    b.trans(n, u)
}

pub fn head_normal_form(p: &Process, mode: NfMode) -> Result<(HeadForm, Process, Proof)> {
    let mut b = ProofBuilder::new();
    let id = head_in(&mut b, &mut Normalizer::new(mode), p)?;
    let h = conclusion(&b, id);
    let form = HeadForm::of(&h).ok_or_else(|| Error::Internal(format!("`{h}` is not in head form")))?;
    Ok((form, h, b.finish(id)))
}

/// Violation-driven saturation of canonical strong-mode normal forms.
pub(crate) struct Saturator {
    k: SatKind,
    memo: HashMap<Process, usize>,
}

pub(crate) fn summand_terms(body: &Process) -> Vec<Process> {
    if *body == Process::Nil {
        return Vec::new();
    }
    term_summands(&Term::Proc(body.clone())).iter().map(as_proc).collect()
}

fn star_parts(n: &Process) -> (SumForm, Process) {
    match n {
        Process::Star(s, b) => (s.clone(), (**b).clone()),
        _ => unreachable!("normal form expected"),
    }
}

enum Fix {
    Delay(usize),
    LoopTau(usize),
    PrefixTau(usize, Process),
}

impl Saturator {
    pub fn new(k: SatKind) -> Saturator {
        Saturator { k, memo: HashMap::new() }
    }

    fn find_violation(&self, n: &Process) -> Option<Fix> {
        let (s, body) = star_parts(n);
        let items = summand_terms(&body);
        let present: BTreeSet<&Process> = items.iter().collect();
        let loop_actions = init_actions(&s);
        for (i, q) in items.iter().enumerate() {
            let Process::Prefix(SumForm::Act(alpha), ni) = q else { continue };
            let (si, bi) = star_parts(ni);
            let inner = summand_terms(&bi);
            if alpha.is_tau() && matches!(self.k, SatKind::Delay | SatKind::Weak) {
                let mut needed = init_actions(&si).into_iter().map(|a| Process::act_prefix(a, (**ni).clone()));
                if needed.any(|r| !present.contains(&r)) || inner.iter().any(|r| !present.contains(r)) {
                    return Some(Fix::Delay(i));
                }
            }
            if matches!(self.k, SatKind::Eta | SatKind::Weak) {
                if alpha.is_tau()
                    && loop_actions.iter().any(|a| !present.contains(&Process::act_prefix(a.clone(), (**ni).clone())))
                {
                    return Some(Fix::LoopTau(i));
                }
                for r in &inner {
                    if let Process::Prefix(SumForm::Act(Alpha::Tau), m) = r {
                        if !present.contains(&Process::act_prefix(alpha.clone(), (**m).clone())) {
                            return Some(Fix::PrefixTau(i, (**m).clone()));
                        }
                    }
                }
            }
        }
        None
    }

    /// `n = n'` where `n` is a canonical normal form and `n'` is saturated.
    pub fn sat(&mut self, b: &mut ProofBuilder, n: &Process) -> Result<usize> {
        if let Some(&id) = self.memo.get(n) {
            return Ok(id);
        }
        let mut d = Deriv::new(b, n.clone());
        let (_, body) = star_parts(n);
        let items = summand_terms(&body);
        for (i, q) in items.iter().enumerate() {
            if let Process::Prefix(_, ni) = q {
                let mut path = vec![1];
                path.extend(summand_path(i, items.len()));
                path.push(1);
                d.with(&path, |b, _| self.sat(b, ni))?;
            }
        }
        d.with(&[1], ac_canon)?;
        while let Some(fix) = self.find_violation(&as_proc(d.cur())) {
            let (s, body) = star_parts(&as_proc(d.cur()));
            let items = summand_terms(&body);
            let at = |i: usize| {
                let mut p = vec![1];
                p.extend(summand_path(i, items.len()));
                p
            };
            match fix {
                Fix::Delay(i) => {
                    // τ.N_i = τ.N_i + N_i, then unfold N_i
                    let Process::Prefix(_, ni) = &items[i] else { unreachable!() };
                    let (si, bi) = star_parts(ni);
                    let path = at(i);
                    d.with(&path, |b, _| t2(b, ni))?;
                    let mut p1 = path.clone();
                    p1.push(1);
                    d.with(&p1, |b, _| unfold(b, &si, &bi))?;
                }
                Fix::LoopTau(i) => {
                    // s*(X + τ.N_i) = s*(X + τ.N_i + s.N_i)
                    let Process::Prefix(_, ni) = &items[i] else { unreachable!() };
                    let rest: Vec<Term> =
                        items.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, q)| Term::Proc(q.clone())).collect();
                    let target = Term::Proc(Process::plus(as_proc(&right_sum(rest, Sort::Process)), items[i].clone()));
                    d.with(&[1], |b, t| ac_eq(b, t, &target))?;
                    d.axiom("FT3", Dir::L2R, &[], &Assignment::new())?;
                    d.with(&[1, 1], |b, _| split_prefix(b, &s, ni))?;
                }
                Fix::PrefixTau(i, m) => {
                    // α.N_i = α.(X + τ.M) = α.(X + τ.M) + α.M
                    let Process::Prefix(_, ni) = &items[i] else { unreachable!() };
                    let (si, bi) = star_parts(ni);
                    let u = unfold_canon(b_of(&mut d), &si, &bi)?;
                    let tm = Term::Proc(Process::act_prefix(Alpha::Tau, m.clone()));
                    let rest: Vec<Term> = term_summands(d.b.rhs(u)).into_iter().filter(|t| *t != tm).collect();
                    let target = Term::Proc(Process::plus(as_proc(&right_sum(rest, Sort::Process)), as_proc(&tm)));
                    let unfolded = d.b.rhs(u).clone();
                    let e = ac_eq(d.b, &unfolded, &target)?;
                    let ue = d.b.trans(u, e)?;
                    let back = d.b.sym(ue)?;
                    let path = at(i);
                    let mut p1 = path.clone();
                    p1.push(1);
                    d.lemma(ue, &p1)?;
                    d.axiom("T3", Dir::L2R, &path, &Assignment::new())?;
                    let mut p01 = path.clone();
                    p01.extend([0, 1]);
                    d.lemma(back, &p01)?;
                }
            }
            d.with(&[1], ac_canon)?;
        }
        let id = d.finish()?;
        self.memo.insert(n.clone(), id);
        Ok(id)
    }
}

fn b_of<'a, 'b>(d: &'a mut Deriv<'b>) -> &'a mut ProofBuilder {
    d.b
}

/// `p = H` with `H` a saturated head form, always constructed.
pub(crate) fn saturate_in(b: &mut ProofBuilder, p: &Process, k: SatKind) -> Result<usize> {
    let n = Normalizer::new(NfMode::Strong).nf(b, p)?;
    let s = Saturator::new(k).sat(b, &conclusion(b, n))?;
    let Process::Star(loop_, body) = conclusion(b, s) else { unreachable!() };
    let u = unfold_canon(b, &loop_, &body)?;
    b.chain(&[n, s, u])
}

pub fn saturate(p: &Process, k: SatKind) -> Result<(Process, Proof)> {
    saturate_fuel(p, k, None)
}

pub fn saturate_fuel(p: &Process, k: SatKind, fuel: Option<usize>) -> Result<(Process, Proof)> {
    let mut b = ProofBuilder::with_budget(fuel);
    let id = if is_saturated(p, k) { b.refl(p.clone())? } else { saturate_in(&mut b, p, k)? };
    Ok((conclusion(&b, id), b.finish(id)))
}

/// Add a τ to the loop of every `α.s*Q` with `s ↛τ`, innermost first.
fn add_tau_loops(b: &mut ProofBuilder, p: &Process, memo: &mut HashMap<Process, usize>) -> Result<usize> {
    if let Some(&id) = memo.get(p) {
        return Ok(id);
    }
    let mut d = Deriv::new(b, p.clone());
    match p {
        Process::Var(_) | Process::Nil => {}
        Process::Plus(l, r) => {
            d.with(&[0], |b, _| add_tau_loops(b, l, memo))?;
            d.with(&[1], |b, _| add_tau_loops(b, r, memo))?;
        }
        Process::Star(_, q) => d.with(&[1], |b, _| add_tau_loops(b, q, memo))?,
        Process::Prefix(_, q) => {
            d.with(&[1], |b, _| add_tau_loops(b, q, memo))?;
            if let Process::Prefix(SumForm::Act(alpha), inner) = d.proc().clone() {
                if let Process::Star(s, x) = &*inner {
                    if !init_actions(s).contains(&Alpha::Tau) {
                        d.with(&[], |b, _| tau_loop(b, &alpha, s, x))?;
                    }
                }
            }
        }
    }
    let id = d.finish()?;
    memo.insert(p.clone(), id);
    Ok(id)
}

/// `p = H` with `H` strongly saturated, always constructed.
pub(crate) fn strong_saturate_in(b: &mut ProofBuilder, p: &Process, k: SatKind) -> Result<usize> {
    let s = saturate_in(b, p, k)?;
    let h = conclusion(b, s);
    let l = add_tau_loops(b, &h, &mut HashMap::new())?;
    b.trans(s, l)
}

pub fn strong_saturate(p: &Process, k: SatKind) -> Result<(Process, Proof)> {
    strong_saturate_fuel(p, k, None)
}

pub fn strong_saturate_fuel(p: &Process, k: SatKind, fuel: Option<usize>) -> Result<(Process, Proof)> {
    if k == SatKind::Eta {
        return Err(Error::Precondition("strong saturation is only used for delay and weak".into()));
    }
    let mut b = ProofBuilder::with_budget(fuel);
    let id = if is_strongly_saturated(p, k) {
        b.refl(p.clone())?
    } else {
        strong_saturate_in(&mut b, p, k)?
    };
    Ok((conclusion(&b, id), b.finish(id)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equivalence::{congruent, RelKind};
    use crate::proof::check_proof;
    use crate::syntax::parse_process;

    fn p(s: &str) -> Process {
        parse_process(s).unwrap()
    }

    const SAMPLES: &[&str] = &[
        "X",
        "0",
        "a.0",
        "(a+tau)*0",
        "a.X+b.(Y+tau.0)",
        "(a+b)*(tau.X+a*0)",
        "tau*(a.tau.0)",
        "a*(b*(a.0+X))+tau.(a+tau).Y",
        "(a+0).(0*(tau+b)*X)",
    ];

    #[test]
    fn normal_form_examples() {
        let (n, pr) = to_normal_form(&p("X"), NfMode::Strong).unwrap();
        assert_eq!(n, p("0*X"));
        assert_eq!(pr.len(), 1);
        assert_eq!(to_normal_form(&Process::Nil, NfMode::Strong).unwrap().0, p("0*0"));
        let (n, pr) = to_normal_form(&p("(a+tau)*0"), NfMode::Branching).unwrap();
        assert!(is_normal_form(&n, NfMode::Branching));
        assert!(pr.cited().contains(&"FT1"));
        assert!(!is_normal_form(&p("(a+tau)*0"), NfMode::Branching));
        assert!(is_normal_form(&p("(a+tau)*0"), NfMode::Strong));
    }

    #[test]
    fn normal_forms_are_sound() {
        for s in SAMPLES {
            for (mode, k) in [(NfMode::Strong, RelKind::Strong), (NfMode::Branching, RelKind::Branching)] {
                let (n, pr) = to_normal_form(&p(s), mode).unwrap();
                assert!(is_normal_form(&n, mode), "{s} -> {n}");
                assert_eq!(check_proof(&pr, k), Ok(()), "{s}");
                assert!(congruent(&p(s), &n, k), "{s} -> {n}");
            }
        }
    }

    #[test]
    fn head_forms() {
        let (h, t, _) = head_normal_form(&p("a*0"), NfMode::Strong).unwrap();
        assert_eq!(h.summands, vec![(Alpha::act("a"), p("a*0"))]);
        assert_eq!(t, p("a.(a*0)"));
        let (h, _, _) = head_normal_form(&Process::Nil, NfMode::Strong).unwrap();
        assert!(h.summands.is_empty() && h.vars.is_empty());
        let (h, _, pr) = head_normal_form(&p("a.0+X"), NfMode::Strong).unwrap();
        assert_eq!(h.summands, vec![(Alpha::act("a"), p("0*0"))]);
        assert_eq!(h.vars, vec!["X".to_string()]);
        assert_eq!(check_proof(&pr, RelKind::Strong), Ok(()));
    }

    #[test]
    fn saturation_examples() {
        let (t, pr) = saturate(&Process::Nil, SatKind::Delay).unwrap();
        assert_eq!(t, Process::Nil);
        assert_eq!(pr.len(), 1);
        let (t, pr) = saturate(&p("tau.a.0"), SatKind::Delay).unwrap();
        assert!(is_saturated(&t, SatKind::Delay));
        assert_eq!(check_proof(&pr, RelKind::Delay), Ok(()));
        let (t, pr) = saturate(&p("a.(X+tau.Y)"), SatKind::Eta).unwrap();
        assert!(is_saturated(&t, SatKind::Eta));
        assert!(pr.cited().contains(&"T3"));
        assert_eq!(check_proof(&pr, RelKind::Eta), Ok(()));
        let (t, pr) = strong_saturate(&p("a.0"), SatKind::Weak).unwrap();
        assert!(is_strongly_saturated(&t, SatKind::Weak));
        assert_eq!(check_proof(&pr, RelKind::Weak), Ok(()));
    }

    #[test]
    fn saturation_on_samples() {
        for s in SAMPLES {
            for (k, rel) in [(SatKind::Eta, RelKind::Eta), (SatKind::Delay, RelKind::Delay), (SatKind::Weak, RelKind::Weak)] {
                let (t, pr) = saturate(&p(s), k).unwrap();
                assert!(is_saturated(&t, k), "{s} {k:?} -> {t}");
                assert_eq!(check_proof(&pr, rel), Ok(()), "{s}");
                assert!(congruent(&p(s), &t, rel));
                if k != SatKind::Eta {
                    let (t, pr) = strong_saturate(&p(s), k).unwrap();
                    assert!(is_strongly_saturated(&t, k), "{s} {k:?} -> {t}");
                    assert_eq!(check_proof(&pr, rel), Ok(()), "{s}");
                }
            }
        }
    }

    #[test]
    fn fuel_interrupts() {
        assert!(matches!(
            to_normal_form_fuel(&p("a*(b*(a.0+X))+tau.Y"), NfMode::Branching, Some(3)),
            Err(Error::OutOfFuel(_))
        ));
    }
}
