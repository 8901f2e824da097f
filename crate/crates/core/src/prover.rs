//! Automatic equational proofs of congruence.
//!
//! Strong and rooted branching congruence are decided on normal forms by
//! induction on the sum of term sizes. The η, delay and weak relations are
//! reduced to those two by (strong) saturation of both sides first.

use std::collections::{BTreeSet, HashMap};

use crate::axioms::{Assignment, Dir};
use crate::equivalence::{bisimilar, congruence, largest_bisimulation, EquivRelation, RelKind, RootMismatch, SatKind};
use crate::error::{Error, Result};
use crate::lemmas::{ac_eq, canon_sumform, right_sum, split_prefix, summand_path};
use crate::normalize::{head_in, saturate_in, strong_saturate_in, summand_terms, NfMode, Normalizer};
use crate::proof::{check_proof, Deriv, Proof, ProofBuilder};
use crate::semantics::build_joint_lts;
use crate::term::{init_actions, term_size, Alpha, Process, Sort, SumForm, Term};

#[derive(Clone, Debug)]
pub enum ProveOutcome {
    Proved(Proof),
    NotCongruent(RootMismatch),
}

fn relation_of(mode: NfMode) -> RelKind {
    match mode {
        NfMode::Strong => RelKind::Strong,
        NfMode::Branching => RelKind::Branching,
    }
}

fn wrap(p: &Process, gamma: &Option<Alpha>) -> Process {
    match gamma {
        Some(a) => Process::act_prefix(a.clone(), p.clone()),
        None => p.clone(),
    }
}

fn star_parts(p: &Process) -> Result<(SumForm, Process)> {
    match p {
        Process::Star(s, b) => Ok((s.clone(), (**b).clone())),
        _ => Err(Error::Internal(format!("`{p}` is not a normal form"))),
    }
}

fn sum_of(items: Vec<Process>) -> Process {
    match right_sum(items.into_iter().map(Term::Proc).collect(), Sort::Process) {
        Term::Proc(p) => p,
        Term::Sum(_) => unreachable!(),
    }
}

fn ssum(atoms: &BTreeSet<Alpha>) -> SumForm {
    canon_sumform(&SumForm::sum_of(atoms.iter().cloned()))
}

fn joined(a: &[u8], b: &[u8]) -> Vec<u8> {
    let mut v = a.to_vec();
    v.extend_from_slice(b);
    v
}

/// Proofs between bisimilar normal forms. With a root action `γ` (always in
/// branching mode) the proved equation is `γ.P = γ.Q`.
pub(crate) struct NfProver {
    mode: NfMode,
    rel: EquivRelation,
    index: HashMap<Process, usize>,
    memo: HashMap<(Process, Process, Option<Alpha>), usize>,
}

impl NfProver {
    /// Bisimilarity is tabulated once over the states reachable from `roots`.
    pub fn new(mode: NfMode, roots: &[Process]) -> NfProver {
        let (lts, _) = build_joint_lts(roots);
        let rel = largest_bisimulation(&lts, relation_of(mode));
        let index = lts.states.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect();
        NfProver { mode, rel, index, memo: HashMap::new() }
    }

    fn bisim(&self, p: &Process, q: &Process) -> bool {
        match (self.index.get(p), self.index.get(q)) {
            (Some(&i), Some(&j)) => self.rel.related(i, j),
            _ => bisimilar(p, q, relation_of(self.mode)),
        }
    }

    fn residuals(p: &Process) -> Result<Vec<(usize, Alpha, Process)>> {
        let (_, body) = star_parts(p)?;
        Ok(summand_terms(&body)
            .into_iter()
            .enumerate()
            .filter_map(|(i, q)| match q {
                Process::Prefix(SumForm::Act(a), r) => Some((i, a, (*r).clone())),
                _ => None,
            })
            .collect())
    }

    /// Proves `wrap(p) = wrap(q)` for bisimilar normal forms.
    pub fn prove(&mut self, b: &mut ProofBuilder, p: &Process, q: &Process, gamma: Option<Alpha>, bound: usize) -> Result<usize> {
        if p == q {
            return b.refl(wrap(p, &gamma));
        }
        let size = term_size(p) + term_size(q);
        if size >= bound {
            return Err(Error::Internal(format!("size measure did not decrease at `{p}` vs `{q}`")));
        }
        let key = (p.clone(), q.clone(), gamma.clone());
        if let Some(&id) = self.memo.get(&key) {
            return Ok(id);
        }
        let a = Self::residuals(p)?.into_iter().find(|(_, _, r)| self.bisim(r, q));
        let bb = Self::residuals(q)?.into_iter().find(|(_, _, r)| self.bisim(r, p));
        let id = match (a, bb) {
            (Some((_, _, pi)), Some((_, _, qj))) => {
                let e1 = self.prove(b, p, &qj, gamma.clone(), size)?;
                let e2 = self.prove(b, &qj, &pi, gamma.clone(), size)?;
                let e3 = self.prove(b, &pi, q, gamma.clone(), size)?;
                b.chain(&[e1, e2, e3])?
            }
            (None, Some(_)) => {
                let id = self.unmatched(b, q, p, &gamma)?;
                b.sym(id)?
            }
            _ => self.unmatched(b, p, q, &gamma)?,
        };
        self.memo.insert(key, id);
        Ok(id)
    }

    /// `α.E = α.B` for bisimilar `E`, `B` (both directions of the root rule).
    fn summand_eq(&mut self, b: &mut ProofBuilder, alpha: &Alpha, e: &Process, t: &Process, bound: usize) -> Result<usize> {
        match self.mode {
            NfMode::Branching => self.prove(b, e, t, Some(alpha.clone()), bound),
            NfMode::Strong => {
                let inner = self.prove(b, e, t, None, bound)?;
                b.ctx(inner, &[1], &Term::Proc(Process::act_prefix(alpha.clone(), e.clone())))
            }
        }
    }

    /// `base + extra = base` when every summand of `extra` is matched in
    /// `base` by a summand with the same action and a bisimilar residual.
    pub fn absorb(&mut self, b: &mut ProofBuilder, base: &Process, extra: &Process, bound: usize) -> Result<usize> {
        let bs = summand_terms(base);
        let es = summand_terms(extra);
        let mut d = Deriv::new(b, Process::plus(base.clone(), extra.clone()));
        for (k, e) in es.iter().enumerate() {
            let path = joined(&[1], &summand_path(k, es.len()));
            match e {
                Process::Var(_) if bs.contains(e) => {}
                Process::Prefix(SumForm::Act(beta), ek) => {
                    let m = bs.iter().find_map(|s| match s {
                        Process::Prefix(SumForm::Act(b2), bk) if b2 == beta && self.bisim(ek, bk) => Some((**bk).clone()),
                        _ => None,
                    });
                    let Some(bk) = m else {
                        return Err(Error::Internal(format!("summand `{e}` has no partner in `{base}`")));
                    };
                    let id = self.summand_eq(d.b, beta, ek, &bk, bound)?;
                    d.lemma(id, &path)?;
                }
                _ => return Err(Error::Internal(format!("summand `{e}` has no partner in `{base}`"))),
            }
        }
        let target = Term::Proc(base.clone());
        d.with(&[], |b, t| ac_eq(b, t, &target))?;
        d.finish()
    }

    /// The case where no residual of `q` is bisimilar to `p`.
    fn unmatched(&mut self, b: &mut ProofBuilder, p: &Process, q: &Process, gamma: &Option<Alpha>) -> Result<usize> {
        let size = term_size(p) + term_size(q);
        let (s, pbody) = star_parts(p)?;
        let (t, qbody) = star_parts(q)?;
        let ps = summand_terms(&pbody);
        let qs = summand_terms(&qbody);
        let t_acts = init_actions(&t);
        let branching = self.mode == NfMode::Branching;
        let mut in_u = vec![false; ps.len()];
        let mut u_atoms = BTreeSet::new();
        for (i, a, r) in Self::residuals(p)? {
            if self.bisim(&r, q) && (t_acts.contains(&a) || (branching && a.is_tau())) {
                in_u[i] = true;
                u_atoms.insert(a);
            }
        }
        let rest: Vec<Process> = ps.iter().zip(&in_u).filter(|(_, u)| !**u).map(|(x, _)| x.clone()).collect();
        let sx = sum_of(rest.clone());
        // an inert τ-summand: τ is in u but not in the loop of q
        let tau_case = u_atoms.contains(&Alpha::Tau) && !t_acts.contains(&Alpha::Tau);
        let v_atoms: BTreeSet<Alpha> = u_atoms.iter().filter(|a| t_acts.contains(a)).cloned().collect();
        let (u_sf, v_sf) = (ssum(&u_atoms), ssum(&v_atoms));
        if gamma.is_none() && tau_case {
            return Err(Error::Internal("inert τ-summand without a root action".into()));
        }
        let pre: Vec<u8> = if gamma.is_some() { vec![1] } else { vec![] };

        // L1: Q' + S = Q'
        let l1 = self.absorb(b, &qbody, &sx, size)?;
        let w = Process::plus(qbody.clone(), sx.clone());

        let mut d = Deriv::new(b, wrap(p, gamma));
        let body_path = if !tau_case && !qs.is_empty() {
            let ab = self.absorb(d.b, &pbody, &qbody, size)?;
            let back = d.b.sym(ab)?;
            d.lemma(back, &joined(&pre, &[1]))?;
            joined(&pre, &[1, 0])
        } else {
            joined(&pre, &[1])
        };
        for (i, a, r) in Self::residuals(p)? {
            if in_u[i] {
                let id = self.summand_eq(d.b, &a, &r, q, size)?;
                d.lemma(id, &joined(&body_path, &summand_path(i, ps.len())))?;
            }
        }
        let split = split_prefix(d.b, &u_sf, q)?;
        let grouped = d.b.rhs(split).clone();
        let tail = if tau_case { sx.clone() } else { w.clone() };
        let target = Term::Proc(Process::plus(as_proc(&grouped), tail));
        d.with(&joined(&pre, &[1]), |b, t| ac_eq(b, t, &target))?;
        let back = d.b.sym(split)?;
        d.lemma(back, &joined(&pre, &[1, 0]))?;
        // now wrap(s*(u.Q + tail))

        let none = Assignment::new();
        if !tau_case {
            // Q = (s+v)*W
            let sv = Term::Sum(SumForm::plus(s.clone(), v_sf.clone()));
            let mut dq = Deriv::new(d.b, q.clone());
            dq.with(&[0], |b, t| ac_eq(b, t, &sv))?;
            let wq = dq.b.sym(l1)?;
            dq.lemma(wq, &[1])?;
            let rq = dq.finish()?;
            d.lemma(rq, &joined(&pre, &[1, 0, 1]))?;
            d.axiom("FA2", Dir::L2R, &pre, &none)?;
            let back = d.b.sym(rq)?;
            d.lemma(back, &pre)?;
            return d.finish();
        }

        let v_zero = v_atoms.is_empty();
        let st = Term::Sum(SumForm::plus(s.clone(), t.clone()));
        let tt = Term::Sum(t.clone());
        d.with(&[1, 1, 0, 0], |b, x| ac_eq(b, x, &Term::Sum(SumForm::plus(SumForm::tau(), v_sf.clone()))))?;
        d.axiom("A5", Dir::L2R, &[1, 1, 0], &none)?;
        if v_zero {
            d.axiom("A6", Dir::L2R, &[1, 1, 0, 1], &none)?;
        }
        // Q = t*W
        let wq = d.b.sym(l1)?;
        let rw = d.b.ctx(wq, &[1], &Term::Proc(q.clone()))?;
        d.lemma(rw, &[1, 1, 0, 0, 1])?;
        if !v_zero {
            d.lemma(rw, &[1, 1, 0, 1, 1])?;
        }
        // τ.(t*W) = τ.(s*(t.((s+t)*W) + W))
        d.with(&[1, 1, 0, 0, 1, 0], |b, x| ac_eq(b, x, &st))?;
        d.axiom("FA2", Dir::R2L, &[1, 1, 0, 0, 1], &none)?;
        let ib: &[u8] = &[1, 1, 0, 0, 1, 1];
        d.with(&joined(ib, &[0, 1, 0]), |b, x| ac_eq(b, x, &tt))?;
        if !v_zero {
            let tv = Term::Sum(SumForm::plus(t.clone(), v_sf.clone()));
            d.with(&joined(ib, &[0, 0]), |b, x| ac_eq(b, x, &tv))?;
            d.axiom("A5", Dir::L2R, &joined(ib, &[0]), &none)?;
        }
        let m = Process::star(t.clone(), w.clone());
        let mut xs = Vec::new();
        if !v_zero {
            xs.push(Process::prefix(v_sf.clone(), m.clone()));
        }
        xs.extend(rest.iter().cloned());
        let x = sum_of(xs);
        let mut ys = vec![Process::prefix(t.clone(), m.clone())];
        ys.extend(qs.iter().cloned());
        let y = sum_of(ys);
        let xy = Process::plus(x.clone(), y);
        let xy_t = Term::Proc(xy.clone());
        d.with(ib, |b, c| ac_eq(b, c, &xy_t))?;
        let outer = Term::Proc(Process::plus(
            Process::act_prefix(Alpha::Tau, Process::star(s.clone(), xy)),
            x,
        ));
        d.with(&[1, 1], |b, c| ac_eq(b, c, &outer))?;
        d.axiom("FT2", Dir::L2R, &[], &none)?;
        // γ.(s*(X+Y)) back to γ.Q
        let tm = Process::prefix(t.clone(), m.clone());
        let head = if v_zero { tm } else { Process::plus(tm, Process::prefix(v_sf.clone(), m.clone())) };
        let regroup = Term::Proc(Process::plus(head, w.clone()));
        d.with(&[1, 1], |b, c| ac_eq(b, c, &regroup))?;
        if !v_zero {
            d.axiom("A5", Dir::R2L, &[1, 1, 0], &none)?;
            d.with(&[1, 1, 0, 0], |b, c| ac_eq(b, c, &tt))?;
        }
        d.with(&[1, 1, 0, 1, 0], |b, c| ac_eq(b, c, &st))?;
        d.axiom("FA2", Dir::L2R, &[1], &none)?;
        d.with(&[1, 0], |b, c| ac_eq(b, c, &tt))?;
        d.lemma(l1, &[1, 1])?;
        d.finish()
    }
}

fn as_proc(t: &Term) -> Process {
    t.as_proc().cloned().expect("process term")
}

/// `p = q` between head forms that are rooted-congruent in `mode`.
fn heads_equal(b: &mut ProofBuilder, mode: NfMode, hp: usize, hq: usize) -> Result<usize> {
    let p = as_proc(b.rhs(hp));
    let q = as_proc(b.rhs(hq));
    let mut prover = NfProver::new(mode, &[p.clone(), q.clone()]);
    let a1 = prover.absorb(b, &p, &q, usize::MAX)?;
    let a2 = prover.absorb(b, &q, &p, usize::MAX)?;
    let s1 = b.sym(a1)?;
    let swap = ac_eq(b, &Term::Proc(Process::plus(p.clone(), q.clone())), &Term::Proc(Process::plus(q, p)))?;
    let back = b.sym(hq)?;
    b.chain(&[hp, s1, swap, a2, back])
}

/// `p = p'` where `p'` is the form on which the relation's prover works.
fn prepare(b: &mut ProofBuilder, p: &Process, k: RelKind) -> Result<(usize, NfMode)> {
    let (pre, mode) = match k {
        RelKind::Strong => (None, NfMode::Strong),
        RelKind::Branching => (None, NfMode::Branching),
        RelKind::Eta => (Some(saturate_in(b, p, SatKind::Eta)?), NfMode::Branching),
        RelKind::Delay => (Some(strong_saturate_in(b, p, SatKind::Delay)?), NfMode::Strong),
        RelKind::Weak => (Some(strong_saturate_in(b, p, SatKind::Weak)?), NfMode::Strong),
    };
    let start = match pre {
        Some(id) => as_proc(b.rhs(id)),
        None => p.clone(),
    };
    let h = head_in(b, &mut Normalizer::new(mode), &start)?;
    let id = match pre {
        Some(id) => b.trans(id, h)?,
        None => h,
    };
    Ok((id, mode))
}

pub fn prove_congruent(p: &Process, q: &Process, k: RelKind) -> Result<ProveOutcome> {
    prove_congruent_fuel(p, q, k, None)
}

pub fn prove_congruent_fuel(p: &Process, q: &Process, k: RelKind, fuel: Option<usize>) -> Result<ProveOutcome> {
    if let Err(m) = congruence(p, q, k) {
        return Ok(ProveOutcome::NotCongruent(m));
    }
    let mut b = ProofBuilder::with_budget(fuel);
    let (hp, mode) = prepare(&mut b, p, k)?;
    let (hq, _) = prepare(&mut b, q, k)?;
    let id = heads_equal(&mut b, mode, hp, hq)?;
    let proof = b.finish(id);
    check_proof(&proof, k).map_err(|e| Error::Internal(format!("generated proof rejected: {e}")))?;
    Ok(ProveOutcome::Proved(proof))
}

/// Proves `γ.P = γ.Q` (or `P = Q` in strong mode) for bisimilar normal forms.
pub fn prove_nf(p: &Process, q: &Process, mode: NfMode, gamma: Option<Alpha>) -> Result<Proof> {
    if mode == NfMode::Branching && gamma.is_none() {
        return Err(Error::Precondition("branching mode needs a root action".into()));
    }
    let mut b = ProofBuilder::new();
    let mut prover = NfProver::new(mode, &[p.clone(), q.clone()]);
    if !prover.bisim(p, q) {
        return Err(Error::Precondition(format!("`{p}` and `{q}` are not bisimilar")));
    }
    let id = prover.prove(&mut b, p, q, gamma, usize::MAX)?;
    Ok(b.finish(id))
}
