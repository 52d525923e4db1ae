//! Small conflict-driven clause-learning solver.
//!
//! Two watched literals with blockers, first-UIP learning with local
//! minimization, VSIDS with phase saving, Luby restarts and activity-based
//! learnt clause reduction. Plenty for instances in the 10^4 to 10^5 clause
//! range; not meant to compete with dedicated solvers.

use crate::encode::{CnfInstance, Model};

#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
struct Lit(u32);

impl Lit {
    fn from_dimacs(l: i32) -> Self {
        let v = l.unsigned_abs() - 1;
        Lit(v << 1 | (l < 0) as u32)
    }

    fn var(self) -> usize {
        (self.0 >> 1) as usize
    }

    fn negative(self) -> bool {
        self.0 & 1 == 1
    }

    fn index(self) -> usize {
        self.0 as usize
    }
}

impl std::ops::Not for Lit {
    type Output = Lit;

    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

const UNDEF: i8 = 0;
const TRUE: i8 = 1;
const FALSE: i8 = -1;
const NO_REASON: u32 = u32::MAX;

struct Clause {
    lits: Vec<Lit>,
    learnt: bool,
    deleted: bool,
    activity: f32,
}

#[derive(Clone, Copy)]
struct Watcher {
    clause: u32,
    blocker: Lit,
}

/// Result of a builtin solve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Sat(Model),
    Unsat,
    Interrupted,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CdclStats {
    pub decisions: u64,
    pub conflicts: u64,
    pub propagations: u64,
    pub restarts: u64,
}

pub struct Cdcl {
    num_vars: usize,
    clauses: Vec<Clause>,
    watches: Vec<Vec<Watcher>>,
    assigns: Vec<i8>,
    level: Vec<u32>,
    reason: Vec<u32>,
    polarity: Vec<bool>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    activity: Vec<f64>,
    var_inc: f64,
    clause_inc: f32,
    heap: VarHeap,
    seen: Vec<bool>,
    learnt_count: usize,
    max_learnts: f64,
    /// False once the clause set is known to be unsatisfiable at level 0.
    ok: bool,
    pub stats: CdclStats,
}

impl Cdcl {
    pub fn new(num_vars: usize) -> Self {
        Self {
            num_vars,
            clauses: Vec::new(),
            watches: vec![Vec::new(); 2 * num_vars],
            assigns: vec![UNDEF; num_vars],
            level: vec![0; num_vars],
            reason: vec![NO_REASON; num_vars],
            polarity: vec![true; num_vars],
            trail: Vec::with_capacity(num_vars),
            trail_lim: Vec::new(),
            qhead: 0,
            activity: vec![0.0; num_vars],
            var_inc: 1.0,
            clause_inc: 1.0,
            heap: VarHeap::new(num_vars),
            seen: vec![false; num_vars],
            learnt_count: 0,
            max_learnts: 0.0,
            ok: true,
            stats: CdclStats::default(),
        }
    }

    pub fn from_cnf(cnf: &CnfInstance) -> Self {
        let mut s = Self::new(cnf.variable_count() as usize);
        for c in cnf.clauses() {
            if !s.add_clause(c) {
                break;
            }
        }
        s
    }

    fn value(&self, l: Lit) -> i8 {
        let a = self.assigns[l.var()];
        if l.negative() {
            -a
        } else {
            a
        }
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    /// Adds a clause at decision level 0. Returns false once the instance is
    /// known to be unsatisfiable.
    pub fn add_clause(&mut self, dimacs: &[i32]) -> bool {
        if !self.ok {
            return false;
        }
        debug_assert_eq!(self.decision_level(), 0);
        let mut lits: Vec<Lit> = Vec::with_capacity(dimacs.len());
        for &d in dimacs {
            let l = Lit::from_dimacs(d);
            match self.value(l) {
                TRUE => return true,
                FALSE => continue,
                _ => {}
            }
            if lits.contains(&!l) {
                return true;
            }
            if !lits.contains(&l) {
                lits.push(l);
            }
        }
        match lits.len() {
            0 => {
                self.ok = false;
                false
            }
            1 => {
                self.enqueue(lits[0], NO_REASON);
                self.ok = self.propagate().is_none();
                self.ok
            }
            _ => {
                self.attach(lits, false);
                true
            }
        }
    }

    fn attach(&mut self, lits: Vec<Lit>, learnt: bool) -> u32 {
        let cref = self.clauses.len() as u32;
        self.watches[lits[0].index()].push(Watcher {
            clause: cref,
            blocker: lits[1],
        });
        self.watches[lits[1].index()].push(Watcher {
            clause: cref,
            blocker: lits[0],
        });
        if learnt {
            self.learnt_count += 1;
        }
        self.clauses.push(Clause {
            lits,
            learnt,
            deleted: false,
            activity: 0.0,
        });
        cref
    }

    fn enqueue(&mut self, l: Lit, reason: u32) {
        let v = l.var();
        debug_assert_eq!(self.assigns[v], UNDEF);
        self.assigns[v] = if l.negative() { FALSE } else { TRUE };
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(l);
    }

    /// Unit propagation; returns a conflicting clause if one arises.
    fn propagate(&mut self) -> Option<u32> {
        let mut conflict = None;
        while self.qhead < self.trail.len() && conflict.is_none() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;
            let false_lit = !p;
            let mut ws = std::mem::take(&mut self.watches[false_lit.index()]);
            let (mut i, mut j) = (0, 0);
            while i < ws.len() {
                let w = ws[i];
                i += 1;
                if self.value(w.blocker) == TRUE {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                let cref = w.clause as usize;
                if self.clauses[cref].deleted {
                    continue;
                }
                {
                    let lits = &mut self.clauses[cref].lits;
                    if lits[0] == false_lit {
                        lits.swap(0, 1);
                    }
                }
                let first = self.clauses[cref].lits[0];
                let kept = Watcher {
                    clause: w.clause,
                    blocker: first,
                };
                if first != w.blocker && self.value(first) == TRUE {
                    ws[j] = kept;
                    j += 1;
                    continue;
                }
                let len = self.clauses[cref].lits.len();
                let mut moved = false;
                for k in 2..len {
                    let l = self.clauses[cref].lits[k];
                    if self.value(l) != FALSE {
                        self.clauses[cref].lits.swap(1, k);
                        self.watches[l.index()].push(kept);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                ws[j] = kept;
                j += 1;
                if self.value(first) == FALSE {
                    conflict = Some(w.clause);
                    while i < ws.len() {
                        ws[j] = ws[i];
                        i += 1;
                        j += 1;
                    }
                } else {
                    self.enqueue(first, w.clause);
                }
            }
            ws.truncate(j);
            self.watches[false_lit.index()] = ws;
        }
        conflict
    }

    fn bump_var(&mut self, v: usize) {
        self.activity[v] += self.var_inc;
        if self.activity[v] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.heap.increased(v, &self.activity);
    }

    fn bump_clause(&mut self, cref: usize) {
        let c = &mut self.clauses[cref];
        if !c.learnt {
            return;
        }
        c.activity += self.clause_inc;
        if c.activity > 1e20 {
            for c in self.clauses.iter_mut().filter(|c| c.learnt) {
                c.activity *= 1e-20;
            }
            self.clause_inc *= 1e-20;
        }
    }

    /// First-UIP analysis. Returns the learnt clause (asserting literal first)
    /// and the level to backtrack to.
    fn analyze(&mut self, mut confl: u32) -> (Vec<Lit>, u32) {
        let mut learnt = vec![Lit(0)];
        let mut pending = 0;
        let mut p: Option<Lit> = None;
        let mut index = self.trail.len();
        loop {
            self.bump_clause(confl as usize);
            let start = usize::from(p.is_some());
            for k in start..self.clauses[confl as usize].lits.len() {
                let q = self.clauses[confl as usize].lits[k];
                let v = q.var();
                if !self.seen[v] && self.level[v] > 0 {
                    self.seen[v] = true;
                    self.bump_var(v);
                    if self.level[v] >= self.decision_level() {
                        pending += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                index -= 1;
                if self.seen[self.trail[index].var()] {
                    break;
                }
            }
            let next = self.trail[index];
            self.seen[next.var()] = false;
            pending -= 1;
            p = Some(next);
            if pending == 0 {
                break;
            }
            confl = self.reason[next.var()];
        }
        learnt[0] = !p.expect("conflict analysis visits at least one literal");

        // Drop literals implied by the rest of the clause.
        let mut kept = vec![learnt[0]];
        for &l in &learnt[1..] {
            let r = self.reason[l.var()];
            let redundant = r != NO_REASON
                && self.clauses[r as usize].lits[1..]
                    .iter()
                    .all(|q| self.seen[q.var()] || self.level[q.var()] == 0);
            if !redundant {
                kept.push(l);
            }
        }
        for l in &learnt {
            self.seen[l.var()] = false;
        }
        let mut learnt = kept;

        let back = if learnt.len() == 1 {
            0
        } else {
            let (best, _) = learnt
                .iter()
                .enumerate()
                .skip(1)
                .max_by_key(|(_, l)| self.level[l.var()])
                .expect("non-unit clause");
            learnt.swap(1, best);
            self.level[learnt[1].var()]
        };
        (learnt, back)
    }

    fn cancel_until(&mut self, level: u32) {
        if self.decision_level() <= level {
            return;
        }
        let lim = self.trail_lim[level as usize];
        for k in (lim..self.trail.len()).rev() {
            let l = self.trail[k];
            let v = l.var();
            self.assigns[v] = UNDEF;
            self.reason[v] = NO_REASON;
            self.polarity[v] = l.negative();
            self.heap.insert(v, &self.activity);
        }
        self.trail.truncate(lim);
        self.trail_lim.truncate(level as usize);
        self.qhead = lim;
    }

    fn pick_branch(&mut self) -> Option<Lit> {
        while let Some(v) = self.heap.pop(&self.activity) {
            if self.assigns[v] == UNDEF {
                return Some(Lit((v as u32) << 1 | self.polarity[v] as u32));
            }
        }
        None
    }

    fn locked(&self, cref: usize) -> bool {
        let first = self.clauses[cref].lits[0];
        self.value(first) == TRUE && self.reason[first.var()] == cref as u32
    }

    fn reduce_learnts(&mut self) {
        let mut candidates: Vec<usize> = (0..self.clauses.len())
            .filter(|&i| {
                let c = &self.clauses[i];
                c.learnt && !c.deleted && c.lits.len() > 2 && !self.locked(i)
            })
            .collect();
        candidates.sort_by(|&a, &b| {
            self.clauses[a]
                .activity
                .partial_cmp(&self.clauses[b].activity)
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        for &i in &candidates[..candidates.len() / 2] {
            let c = &mut self.clauses[i];
            c.deleted = true;
            c.lits = Vec::new();
            self.learnt_count -= 1;
        }
        let clauses = &self.clauses;
        for ws in &mut self.watches {
            ws.retain(|w| !clauses[w.clause as usize].deleted);
        }
    }

    /// Runs until a verdict or until `stop` returns true. `stop` is polled
    /// every few hundred conflicts or decisions.
    pub fn solve(&mut self, stop: &dyn Fn() -> bool) -> Outcome {
        if !self.ok {
            return Outcome::Unsat;
        }
        if self.propagate().is_some() {
            self.ok = false;
            return Outcome::Unsat;
        }
        for v in 0..self.num_vars {
            self.heap.insert(v, &self.activity);
        }
        self.max_learnts = (self.clauses.len() as f64 / 3.0).max(2000.0);
        let mut steps: u64 = 0;
        let mut restart_round = 0u32;
        loop {
            let budget = 100 * luby(restart_round);
            restart_round += 1;
            let mut conflicts_here = 0u64;
            loop {
                steps += 1;
                if steps.is_multiple_of(256) && stop() {
                    self.cancel_until(0);
                    return Outcome::Interrupted;
                }
                if let Some(confl) = self.propagate() {
                    self.stats.conflicts += 1;
                    conflicts_here += 1;
                    if self.decision_level() == 0 {
                        self.ok = false;
                        return Outcome::Unsat;
                    }
                    let (learnt, back) = self.analyze(confl);
                    self.cancel_until(back);
                    if learnt.len() == 1 {
                        self.enqueue(learnt[0], NO_REASON);
                    } else {
                        let first = learnt[0];
                        let cref = self.attach(learnt, true);
                        self.bump_clause(cref as usize);
                        self.enqueue(first, cref);
                    }
                    self.var_inc /= 0.95;
                    self.clause_inc /= 0.999;
                    continue;
                }
                if conflicts_here >= budget {
                    self.stats.restarts += 1;
                    self.cancel_until(0);
                    break;
                }
                if self.learnt_count as f64 >= self.max_learnts + self.trail.len() as f64 {
                    self.reduce_learnts();
                    self.max_learnts *= 1.1;
                }
                match self.pick_branch() {
                    Some(l) => {
                        self.stats.decisions += 1;
                        self.trail_lim.push(self.trail.len());
                        self.enqueue(l, NO_REASON);
                    }
                    None => {
                        let values = self.assigns.iter().map(|&a| a == TRUE).collect();
                        self.cancel_until(0);
                        return Outcome::Sat(Model::new(values));
                    }
                }
            }
        }
    }
}

/// Element `i` (0-based) of the Luby sequence 1 1 2 1 1 2 4 ...
fn luby(mut i: u32) -> u64 {
    let (mut size, mut seq) = (1u64, 0u32);
    while size < u64::from(i) + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    let mut x = u64::from(i);
    while size - 1 != x {
        size = (size - 1) >> 1;
        seq -= 1;
        x %= size;
    }
    i = seq;
    1u64 << i
}

/// Binary max-heap of variables keyed by activity.
struct VarHeap {
    heap: Vec<usize>,
    /// Position in `heap`, or `usize::MAX` when absent.
    slot: Vec<usize>,
}

impl VarHeap {
    fn new(n: usize) -> Self {
        Self {
            heap: Vec::with_capacity(n),
            slot: vec![usize::MAX; n],
        }
    }

    fn contains(&self, v: usize) -> bool {
        self.slot[v] != usize::MAX
    }

    fn insert(&mut self, v: usize, act: &[f64]) {
        if self.contains(v) {
            return;
        }
        self.slot[v] = self.heap.len();
        self.heap.push(v);
        self.sift_up(self.heap.len() - 1, act);
    }

    fn increased(&mut self, v: usize, act: &[f64]) {
        if self.contains(v) {
            self.sift_up(self.slot[v], act);
        }
    }

    fn pop(&mut self, act: &[f64]) -> Option<usize> {
        if self.heap.is_empty() {
            return None;
        }
        let top = self.heap.swap_remove(0);
        self.slot[top] = usize::MAX;
        if !self.heap.is_empty() {
            self.slot[self.heap[0]] = 0;
            self.sift_down(0, act);
        }
        Some(top)
    }

    fn sift_up(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        while i > 0 {
            let parent = (i - 1) / 2;
            let pv = self.heap[parent];
            if act[pv] >= act[v] {
                break;
            }
            self.heap[i] = pv;
            self.slot[pv] = i;
            i = parent;
        }
        self.heap[i] = v;
        self.slot[v] = i;
    }

    fn sift_down(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        let n = self.heap.len();
        loop {
            let left = 2 * i + 1;
            if left >= n {
                break;
            }
            let right = left + 1;
            let child = if right < n && act[self.heap[right]] > act[self.heap[left]] {
                right
            } else {
                left
            };
            let cv = self.heap[child];
            if act[cv] <= act[v] {
                break;
            }
            self.heap[i] = cv;
            self.slot[cv] = i;
            i = child;
        }
        self.heap[i] = v;
        self.slot[v] = i;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn run(vars: usize, clauses: &[Vec<i32>]) -> Outcome {
        let cnf = CnfInstance::from_clauses(vars as u32, clauses).unwrap();
        Cdcl::from_cnf(&cnf).solve(&|| false)
    }

    fn brute_sat(vars: usize, clauses: &[Vec<i32>]) -> bool {
        (0u32..1 << vars).any(|bits| {
            clauses.iter().all(|c| {
                c.iter().any(|&l| {
                    let v = l.unsigned_abs() - 1;
                    ((bits >> v) & 1 == 1) == (l > 0)
                })
            })
        })
    }

    #[test]
    fn luby_prefix() {
        let seq: Vec<u64> = (0..15).map(luby).collect();
        assert_eq!(seq, vec![1, 1, 2, 1, 1, 2, 4, 1, 1, 2, 1, 1, 2, 4, 8]);
    }

    #[test]
    fn trivial_instances() {
        assert_eq!(run(1, &[vec![1], vec![-1]]), Outcome::Unsat);
        match run(2, &[vec![1, 2], vec![-1]]) {
            Outcome::Sat(m) => {
                assert!(!m.value(1));
                assert!(m.value(2));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(run(0, &[]), Outcome::Sat(_)));
    }

    #[test]
    fn pigeonhole_is_unsat() {
        // 6 pigeons, 5 holes.
        let (pigeons, holes) = (6, 5);
        let var = |p: usize, h: usize| (p * holes + h + 1) as i32;
        let mut clauses = Vec::new();
        for p in 0..pigeons {
            clauses.push((0..holes).map(|h| var(p, h)).collect());
        }
        for h in 0..holes {
            for a in 0..pigeons {
                for b in a + 1..pigeons {
                    clauses.push(vec![-var(a, h), -var(b, h)]);
                }
            }
        }
        assert_eq!(run(pigeons * holes, &clauses), Outcome::Unsat);
    }

    #[test]
    fn stop_interrupts() {
        let (pigeons, holes) = (11, 10);
        let var = |p: usize, h: usize| (p * holes + h + 1) as i32;
        let mut cnf = CnfInstance::new((pigeons * holes) as u32);
        for p in 0..pigeons {
            cnf.add_clause(&(0..holes).map(|h| var(p, h)).collect::<Vec<_>>());
        }
        for h in 0..holes {
            for a in 0..pigeons {
                for b in a + 1..pigeons {
                    cnf.add_clause(&[-var(a, h), -var(b, h)]);
                }
            }
        }
        assert_eq!(Cdcl::from_cnf(&cnf).solve(&|| true), Outcome::Interrupted);
    }

    fn clause_strategy(vars: usize) -> impl Strategy<Value = Vec<i32>> {
        prop::collection::vec((1..=vars as i32, any::<bool>()), 1..=3)
            .prop_map(|ls| ls.into_iter().map(|(v, neg)| if neg { -v } else { v }).collect())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(400))]
        #[test]
        fn agrees_with_truth_tables(
            vars in 1usize..=12,
            seed_clauses in prop::collection::vec(clause_strategy(12), 0..60),
        ) {
            let clauses: Vec<Vec<i32>> = seed_clauses
                .into_iter()
                .map(|c| c.into_iter().map(|l| {
                    let v = (l.unsigned_abs() as usize - 1) % vars + 1;
                    if l < 0 { -(v as i32) } else { v as i32 }
                }).collect())
                .collect();
            let cnf = CnfInstance::from_clauses(vars as u32, &clauses).unwrap();
            let expected = brute_sat(vars, &clauses);
            match Cdcl::from_cnf(&cnf).solve(&|| false) {
                Outcome::Sat(m) => {
                    prop_assert!(expected);
                    prop_assert!(cnf.first_falsified(&m).is_none());
                }
                Outcome::Unsat => prop_assert!(!expected),
                Outcome::Interrupted => prop_assert!(false),
            }
        }
    }
}
