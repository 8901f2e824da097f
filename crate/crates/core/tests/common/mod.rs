//! Seeded term generation and independent bisimulation oracles shared by the
//! integration tests.
#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use flatiter::axioms::{all_schemes, apply_scheme, Assignment, Dir};
use flatiter::semantics::{build_joint_lts, Lts};
use flatiter::term::{term_size, Sort, Term};
use flatiter::{Alpha, Label, Process, RelKind, SumForm};

pub struct Gen {
    pub rng: StdRng,
    pub actions: Vec<Alpha>,
    pub vars: Vec<&'static str>,
}

impl Gen {
    pub fn new(seed: u64) -> Gen {
        Gen { rng: StdRng::seed_from_u64(seed), actions: vec![Alpha::act("a"), Alpha::act("b")], vars: vec!["X", "Y"] }
    }

    /// Closed terms over `a`, `b` and their conames.
    pub fn closed(seed: u64) -> Gen {
        let actions = ["a", "b", "'a", "'b"].iter().map(|a| Alpha::act(a)).collect();
        Gen { rng: StdRng::seed_from_u64(seed), actions, vars: vec![] }
    }

    pub fn alpha(&mut self) -> Alpha {
        // τ about a third of the time
        if self.rng.gen_ratio(1, 3) {
            Alpha::Tau
        } else {
            self.actions[self.rng.gen_range(0..self.actions.len())].clone()
        }
    }

    /// A sumform with exactly `n` nodes (`n` odd gives the full range).
    pub fn sumform(&mut self, n: usize) -> SumForm {
        if n < 3 {
            return if self.rng.gen_ratio(1, 6) { SumForm::Zero } else { SumForm::Act(self.alpha()) };
        }
        let l = self.rng.gen_range(1..n - 1);
        SumForm::plus(self.sumform(l), self.sumform(n - 1 - l))
    }

    fn leaf(&mut self) -> Process {
        let k = self.rng.gen_range(0..=self.vars.len());
        if k == self.vars.len() {
            Process::Nil
        } else {
            Process::var(self.vars[k])
        }
    }

    /// A process with at most `n` nodes.
    pub fn process(&mut self, n: usize) -> Process {
        if n < 3 {
            return self.leaf();
        }
        match self.rng.gen_range(0..3) {
            0 => {
                let l = self.rng.gen_range(1..n - 1);
                Process::plus(self.process(l), self.process(n - 1 - l))
            }
            c => {
                let k = if n >= 6 && self.rng.gen_ratio(1, 4) { 3 } else { 1 };
                let s = self.sumform(k);
                let body = self.process(n - 1 - k);
                if c == 1 {
                    Process::prefix(s, body)
                } else {
                    Process::star(s, body)
                }
            }
        }
    }

    pub fn sized(&mut self, max: usize) -> Process {
        let n = self.rng.gen_range(1..=max);
        self.process(n)
    }

    /// A term of the prefix-iteration fragment: single-action prefixes and loops.
    pub fn prefix_fragment(&mut self, n: usize) -> Process {
        if n < 3 {
            return self.leaf();
        }
        match self.rng.gen_range(0..3) {
            0 => {
                let l = self.rng.gen_range(1..n - 1);
                Process::plus(self.prefix_fragment(l), self.prefix_fragment(n - 1 - l))
            }
            1 => Process::act_prefix(self.alpha(), self.prefix_fragment(n - 2)),
            _ => Process::star(SumForm::Act(self.alpha()), self.prefix_fragment(n - 2)),
        }
    }

    pub fn assignment(&mut self) -> Assignment {
        let mut asg = Assignment::new().alpha(self.alpha());
        for m in ['s', 't', 'u'] {
            let k = if self.rng.gen_bool(0.5) { 1 } else { 3 };
            asg = asg.sum(m, self.sumform(k));
        }
        for m in ['x', 'y', 'z'] {
            let k = self.rng.gen_range(1..=4);
            asg = asg.proc(m, self.process(k));
        }
        asg
    }

    /// A random instance of a scheme, with small metavariable values.
    pub fn instance(&mut self, name: &str) -> (Process, Process) {
        let sch = all_schemes().iter().find(|s| s.name == name && s.sort == Sort::Process).expect("scheme");
        let asg = self.assignment();
        match sch.instance(Dir::L2R, &asg).expect("complete assignment") {
            (Term::Proc(l), Term::Proc(r)) => (l, r),
            _ => unreachable!(),
        }
    }

    /// Applies `steps` random axiom instances of `E_k` at random positions.
    pub fn rewrite(&mut self, p: &Process, k: RelKind, steps: usize) -> Process {
        let system = flatiter::axioms::axiom_system(k);
        let schemes: Vec<_> = system.schemes().filter(|s| s.sort == Sort::Process).collect();
        let mut cur = Term::Proc(p.clone());
        for _ in 0..steps {
            let positions = positions(cur.as_proc().unwrap());
            for _attempt in 0..20 {
                let sch = schemes[self.rng.gen_range(0..schemes.len())];
                let dir = if self.rng.gen_bool(0.5) { Dir::L2R } else { Dir::R2L };
                let path = &positions[self.rng.gen_range(0..positions.len())];
                let sub = cur.at(path).unwrap();
                let extra = self.assignment();
                let Some(asg) = sch.match_source(dir, &sub, &extra) else { continue };
                if let Ok(next) = apply_scheme(&cur, sch, path, dir, &asg) {
                    cur = next;
                    break;
                }
            }
        }
        cur.as_proc().unwrap().clone()
    }
}

/// Paths to all process-sort subterms.
pub fn positions(p: &Process) -> Vec<Vec<u8>> {
    fn go(p: &Process, path: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        out.push(path.clone());
        match p {
            Process::Plus(l, r) => {
                for (i, c) in [(0u8, l), (1, r)] {
                    path.push(i);
                    go(c, path, out);
                    path.pop();
                }
            }
            Process::Prefix(_, q) | Process::Star(_, q) => {
                path.push(1);
                go(q, path, out);
                path.pop();
            }
            _ => {}
        }
    }
    let mut out = Vec::new();
    go(p, &mut Vec::new(), &mut out);
    out
}

/// A plain adjacency-list view of an LTS, variable self-loops included.
pub struct Graph {
    pub n: usize,
    pub succ: Vec<Vec<(Label, usize)>>,
    pub reach: Vec<Vec<bool>>,
}

impl Graph {
    pub fn from_edges(n: usize, edges: &[(usize, Label, usize)]) -> Graph {
        let mut succ = vec![Vec::new(); n];
        for (i, l, j) in edges {
            succ[*i].push((l.clone(), *j));
        }
        let mut reach = vec![vec![false; n]; n];
        for (s, row) in reach.iter_mut().enumerate() {
            let mut stack = vec![s];
            row[s] = true;
            while let Some(u) = stack.pop() {
                for (l, v) in &succ[u] {
                    if *l == Label::Tau && !row[*v] {
                        row[*v] = true;
                        stack.push(*v);
                    }
                }
            }
        }
        Graph { n, succ, reach }
    }

    pub fn of<S>(lts: &Lts<S>) -> Graph {
        Graph::from_edges(lts.len(), &lts.edges())
    }

    fn tau_reach(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&v| self.reach[u][v])
    }

    /// `t →(ξ) t'`: one ξ-step, or no step when ξ is τ.
    fn opt_step(&self, t: usize, xi: &Label) -> Vec<usize> {
        let mut out: Vec<usize> = self.succ[t].iter().filter(|(l, _)| l == xi).map(|(_, v)| *v).collect();
        if *xi == Label::Tau {
            out.push(t);
        }
        out
    }

    /// Whether `t` answers the move `s --xi--> s1` under `r`.
    fn answers(&self, r: &[Vec<bool>], k: RelKind, s: usize, xi: &Label, s1: usize, t: usize) -> bool {
        if k == RelKind::Strong {
            return self.succ[t].iter().any(|(l, t1)| l == xi && r[s1][*t1]);
        }
        let stem = matches!(k, RelKind::Eta | RelKind::Branching);
        let delay = matches!(k, RelKind::Delay | RelKind::Branching);
        self.tau_reach(t).filter(|&t1| !stem || r[s][t1]).any(|t1| {
            self.opt_step(t1, xi).into_iter().any(|t2| {
                if delay {
                    r[s1][t2]
                } else {
                    self.tau_reach(t2).any(|t3| r[s1][t3])
                }
            })
        })
    }

    pub fn is_bisimulation(&self, r: &[Vec<bool>], k: RelKind) -> bool {
        (0..self.n).all(|s| {
            (0..self.n).filter(|&t| r[s][t]).all(|t| {
                r[t][s] && self.succ[s].iter().all(|(xi, s1)| self.answers(r, k, s, xi, *s1, t))
            })
        })
    }

    /// Greatest fixpoint by repeated deletion of violating pairs.
    pub fn naive_largest(&self, k: RelKind) -> Vec<Vec<bool>> {
        let mut r = vec![vec![true; self.n]; self.n];
        loop {
            let mut changed = false;
            for s in 0..self.n {
                for t in 0..self.n {
                    if r[s][t] && !self.succ[s].iter().all(|(xi, s1)| self.answers(&r, k, s, xi, *s1, t)) {
                        r[s][t] = false;
                        r[t][s] = false;
                        changed = true;
                    }
                }
            }
            if !changed {
                return r;
            }
        }
    }

    /// Union of all symmetric bisimulations containing the identity,
    /// by enumeration. Only for very small graphs.
    pub fn brute_largest(&self, k: RelKind) -> Vec<Vec<bool>> {
        assert!(self.n <= 6, "enumeration is exponential");
        let pairs: Vec<(usize, usize)> = (0..self.n).flat_map(|i| (i + 1..self.n).map(move |j| (i, j))).collect();
        let mut union = vec![vec![false; self.n]; self.n];
        for mask in 0u32..(1 << pairs.len()) {
            let mut r = vec![vec![false; self.n]; self.n];
            for (i, row) in r.iter_mut().enumerate() {
                row[i] = true;
            }
            for (b, (i, j)) in pairs.iter().enumerate() {
                if mask >> b & 1 == 1 {
                    r[*i][*j] = true;
                    r[*j][*i] = true;
                }
            }
            if self.is_bisimulation(&r, k) {
                for i in 0..self.n {
                    for j in 0..self.n {
                        union[i][j] |= r[i][j];
                    }
                }
            }
        }
        union
    }

    /// The root clause of the congruence for `k`, with `r` the equivalence.
    pub fn root_ok(&self, r: &[Vec<bool>], k: RelKind, p: usize, q: usize) -> bool {
        let one_side = |p: usize, q: usize| {
            self.succ[p].iter().all(|(xi, p1)| {
                let pre: Vec<usize> = match k {
                    RelKind::Delay | RelKind::Weak => self.tau_reach(q).collect(),
                    _ => vec![q],
                };
                pre.into_iter().any(|q0| {
                    self.succ[q0].iter().filter(|(l, _)| l == xi).any(|(_, q1)| match k {
                        RelKind::Eta | RelKind::Weak => self.tau_reach(*q1).any(|q2| r[*p1][q2]),
                        _ => r[*p1][*q1],
                    })
                })
            })
        };
        one_side(p, q) && one_side(q, p)
    }
}

pub fn oracle_bisimilar(p: &Process, q: &Process, k: RelKind) -> bool {
    let (lts, roots) = build_joint_lts(&[p.clone(), q.clone()]);
    let g = Graph::of(&lts);
    g.naive_largest(k)[roots[0]][roots[1]]
}

pub fn oracle_congruent(p: &Process, q: &Process, k: RelKind) -> bool {
    let (lts, roots) = build_joint_lts(&[p.clone(), q.clone()]);
    let g = Graph::of(&lts);
    let r = g.naive_largest(k);
    if k == RelKind::Strong {
        return r[roots[0]][roots[1]];
    }
    g.root_ok(&r, k, roots[0], roots[1])
}

/// A seeded pool of pairs of terms of at most `max` nodes. About a third are
/// independent draws, a third are axiom rewrites and a third are small
/// mutations, so both verdicts are well represented.
pub fn pair_pool(seed: u64, count: usize, max: usize) -> Vec<(Process, Process)> {
    let mut g = Gen::new(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let p = g.sized(max);
        let q = match out.len() % 3 {
            0 => g.sized(max),
            1 => {
                let k = RelKind::ALL[g.rng.gen_range(0..5)];
                let steps = g.rng.gen_range(1..=3);
                g.rewrite(&p, k, steps)
            }
            _ => {
                let pos = positions(&p);
                let path = pos[g.rng.gen_range(0..pos.len())].clone();
                let n = g.rng.gen_range(1..=4);
                let sub = Term::Proc(g.process(n));
                Term::Proc(p.clone()).replace(&path, sub).unwrap().as_proc().unwrap().clone()
            }
        };
        if term_size(&q) <= max {
            out.push((p, q));
        }
    }
    out
}
