//! Bounded search for solutions of equation systems over `M`.
//!
//! Candidate values are the reduced words of length at most the radius.
//! The pruned solver filters domains with single-variable equations, runs
//! arc consistency on small two-variable equations, and then backtracks in
//! declaration order with forward checking. The naive solver enumerates
//! every assignment without any memoization and serves as the reference.

use std::collections::{BTreeMap, HashMap};
use std::time::Instant;

use serde::Serialize;

use crate::monoid::{Equality, Monoid};
use crate::rewriting::zhang::Discovery;
use crate::welc::{MonoidEqSystem, Status, Term};
use crate::words::{Letter, Word};

/// Arc consistency is skipped when the two domains multiply past this.
const AC_PAIR_LIMIT: usize = 50_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Ball {
    pub words: Vec<Word>,
    /// Some element's reducedness rests on an undecided comparison.
    pub degraded: bool,
}

impl Monoid {
    /// Whether `w`, whose proper prefix is reduced, is itself reduced.
    /// Returns `(reduced, certified)`.
    fn extends_reduced(&self, w: &[Letter]) -> (bool, bool) {
        let n = w.len();
        let mut certified = true;
        for i in 0..n {
            if self.pieces.delta.chain_ends(w, i).contains(&n) && n > i {
                match self.discover_rule(&w[i..]).expect("Δ⁺ suffix") {
                    Discovery::Rule(_) => return (false, true),
                    Discovery::Degraded => certified = false,
                    Discovery::NoRule => {}
                }
            }
        }
        (true, certified)
    }

    /// Reduced representatives of every element with a representative of
    /// length at most `radius`, shortlex-sorted.
    ///
    /// Subwords of reduced words are reduced and reduction never lengthens a
    /// word, so the ball is grown one letter at a time from reduced words.
    pub fn reduced_ball(&self, radius: usize) -> Ball {
        let letters: Vec<Letter> = self.presentation.alphabet.letters().collect();
        let mut words = vec![Word::empty()];
        let mut layer: Vec<(Vec<Letter>, bool)> = vec![(Vec::new(), true)];
        let mut degraded = false;
        for _ in 0..radius {
            let mut next = Vec::new();
            for (w, cert) in &layer {
                for &l in &letters {
                    let mut w2 = w.clone();
                    w2.push(l);
                    let (ok, c) = self.extends_reduced(&w2);
                    if ok {
                        degraded |= !c;
                        next.push((w2, *cert && c));
                    }
                }
            }
            words.extend(next.iter().map(|(w, _)| Word(w.clone())));
            layer = next;
        }
        words.sort();
        Ball { words, degraded }
    }

    /// The ball obtained by reducing every word of length at most `radius`.
    pub fn reduced_ball_naive(&self, radius: usize) -> Ball {
        let letters: Vec<Letter> = self.presentation.alphabet.letters().collect();
        let mut set = std::collections::BTreeSet::new();
        let mut degraded = false;
        let mut layer = vec![Vec::new()];
        for len in 0..=radius {
            if len > 0 {
                layer = layer
                    .iter()
                    .flat_map(|w: &Vec<Letter>| {
                        letters.iter().map(move |&l| {
                            let mut w2 = w.clone();
                            w2.push(l);
                            w2
                        })
                    })
                    .collect();
            }
            for w in &layer {
                let r = self.reduce(&Word(w.clone()));
                degraded |= !r.certified;
                set.insert(r.word);
            }
        }
        Ball { words: set.into_iter().collect(), degraded }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct SolverStats {
    /// Variable bindings tried during search.
    pub assignments: u64,
    pub equation_checks: u64,
    pub oracle_calls: u64,
    pub ball_size: usize,
    pub wall_ms: u128,
    /// The naive run hit its oracle-call cap before finishing.
    pub truncated: bool,
}

impl SolverStats {
    fn absorb(&mut self, o: &SolverStats) {
        self.assignments += o.assignments;
        self.equation_checks += o.equation_checks;
        self.oracle_calls += o.oracle_calls;
        self.truncated |= o.truncated;
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SolverResult {
    pub status: Status,
    pub witness: Option<BTreeMap<String, Word>>,
    pub stats: SolverStats,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveOptions {
    pub radius: usize,
    pub jobs: usize,
}

impl SolveOptions {
    pub fn radius(radius: usize) -> Self {
        SolveOptions { radius, jobs: 1 }
    }
}

/// Reduces and compares the two sides of equations under an assignment.
struct Evaluator<'m> {
    m: &'m Monoid,
    memo: Option<HashMap<Vec<Letter>, (Word, bool)>>,
    checks: u64,
}

impl<'m> Evaluator<'m> {
    fn new(m: &'m Monoid, memoize: bool) -> Self {
        Evaluator { m, memo: memoize.then(HashMap::new), checks: 0 }
    }

    fn reduce(&mut self, w: Vec<Letter>) -> (Word, bool) {
        if let Some(memo) = &self.memo {
            if let Some(r) = memo.get(&w) {
                return r.clone();
            }
        }
        let r = self.m.reduce(&Word(w.clone()));
        let out = (r.word, r.certified);
        if let Some(memo) = &mut self.memo {
            memo.insert(w, out.clone());
        }
        out
    }

    fn side(side: &[Term], values: &[Option<&Word>]) -> Vec<Letter> {
        let mut out = Vec::new();
        for t in side {
            match *t {
                Term::Letter(l) => out.push(l),
                Term::Var(v) => out.extend_from_slice(&values[v].expect("assigned").0),
            }
        }
        out
    }

    fn check(&mut self, eq: &(Vec<Term>, Vec<Term>), values: &[Option<&Word>]) -> Equality {
        self.checks += 1;
        let l = Self::side(&eq.0, values);
        let r = Self::side(&eq.1, values);
        if l == r {
            return Equality::Equal;
        }
        let (rl, cl) = self.reduce(l);
        let (rr, cr) = self.reduce(r);
        if rl == rr {
            Equality::Equal
        } else if cl && cr {
            Equality::NotEqual
        } else {
            Equality::Unknown
        }
    }
}

fn vars_of(eq: &(Vec<Term>, Vec<Term>)) -> Vec<usize> {
    let mut vs: Vec<usize> = eq
        .0
        .iter()
        .chain(&eq.1)
        .filter_map(|t| match *t {
            Term::Var(v) => Some(v),
            Term::Letter(_) => None,
        })
        .collect();
    vs.sort();
    vs.dedup();
    vs
}

fn eq_len(eq: &(Vec<Term>, Vec<Term>)) -> usize {
    eq.0.len() + eq.1.len()
}

/// Checks that every equation holds under `witness`, with a fresh context.
pub fn verify_witness(sys: &MonoidEqSystem, m: &Monoid, witness: &BTreeMap<String, Word>) -> bool {
    let values: Vec<Option<&Word>> = sys.variables.iter().map(|v| witness.get(v)).collect();
    if values.iter().any(|v| v.is_none()) {
        return false;
    }
    let fresh = m.fresh();
    let mut ev = Evaluator::new(&fresh, false);
    sys.equations.iter().all(|eq| ev.check(eq, &values) == Equality::Equal)
}

struct Search<'a> {
    sys: &'a MonoidEqSystem,
    ball: &'a [Word],
    /// Equations fully assigned once variable `k` is bound, shortest first.
    complete_at: Vec<Vec<usize>>,
    /// Equations left with one free variable once `k` is bound: (eq, free var).
    forward_at: Vec<Vec<(usize, usize)>>,
    unknown: bool,
    assignments: u64,
}

impl<'a> Search<'a> {
    fn new(sys: &'a MonoidEqSystem, ball: &'a [Word]) -> Self {
        let n = sys.variables.len();
        let mut complete_at = vec![Vec::new(); n];
        let mut forward_at = vec![Vec::new(); n];
        let mut order: Vec<usize> = (0..sys.equations.len()).collect();
        order.sort_by_key(|&i| eq_len(&sys.equations[i]));
        for i in order {
            let vs = vars_of(&sys.equations[i]);
            if let Some(&last) = vs.last() {
                complete_at[last].push(i);
                if vs.len() >= 2 {
                    forward_at[vs[vs.len() - 2]].push((i, last));
                }
            }
        }
        Search { sys, ball, complete_at, forward_at, unknown: false, assignments: 0 }
    }

    fn values<'b>(&self, chosen: &[usize]) -> Vec<Option<&'b Word>>
    where
        'a: 'b,
    {
        let mut v: Vec<Option<&Word>> = chosen.iter().map(|&i| Some(&self.ball[i])).collect();
        v.resize(self.sys.variables.len(), None);
        v
    }

    /// Depth-first search; returns the first solution in declaration order.
    fn run(&mut self, ev: &mut Evaluator, domains: &mut Vec<Vec<usize>>, chosen: &mut Vec<usize>) -> Option<Vec<usize>> {
        let k = chosen.len();
        if k == domains.len() {
            return Some(chosen.clone());
        }
        let dom = domains[k].clone();
        'values: for val in dom {
            self.assignments += 1;
            chosen.push(val);
            let values = self.values(chosen);
            let mut maybe = false;
            for &e in &self.complete_at[k] {
                match ev.check(&self.sys.equations[e], &values) {
                    Equality::Equal => {}
                    Equality::NotEqual => {
                        chosen.pop();
                        continue 'values;
                    }
                    Equality::Unknown => maybe = true,
                }
            }
            if maybe {
                // Cannot be confirmed and cannot be ruled out.
                self.unknown = true;
                chosen.pop();
                continue;
            }
            let saved: Vec<(usize, Vec<usize>)> =
                self.forward_at[k].iter().map(|&(_, v)| (v, domains[v].clone())).collect();
            let mut wiped = false;
            for &(e, v) in &self.forward_at[k] {
                let eq = &self.sys.equations[e];
                let mut vals = values.clone();
                let mut kept = Vec::new();
                for &c in &domains[v] {
                    vals[v] = Some(&self.ball[c]);
                    match ev.check(eq, &vals) {
                        Equality::Equal => kept.push(c),
                        Equality::Unknown => self.unknown = true,
                        Equality::NotEqual => {}
                    }
                }
                domains[v] = kept;
                if domains[v].is_empty() {
                    wiped = true;
                    break;
                }
            }
            if !wiped {
                if let Some(sol) = self.run(ev, domains, chosen) {
                    return Some(sol);
                }
            }
            for (v, d) in saved.into_iter().rev() {
                domains[v] = d;
            }
            chosen.pop();
        }
        None
    }
}

/// Domains after node and arc consistency, or `None` if some domain empties.
fn initial_domains(sys: &MonoidEqSystem, ball: &[Word], ev: &mut Evaluator, unknown: &mut bool) -> Option<Vec<Vec<usize>>> {
    let n = sys.variables.len();
    let mut domains: Vec<Vec<usize>> = vec![(0..ball.len()).collect(); n];
    let mut values: Vec<Option<&Word>> = vec![None; n];
    let mut order: Vec<usize> = (0..sys.equations.len()).collect();
    order.sort_by_key(|&i| eq_len(&sys.equations[i]));

    for &e in &order {
        let eq = &sys.equations[e];
        match vars_of(eq)[..] {
            [] => match ev.check(eq, &values) {
                Equality::NotEqual => return None,
                Equality::Unknown => *unknown = true,
                Equality::Equal => {}
            },
            [v] => {
                let mut kept = Vec::new();
                for &c in &domains[v] {
                    values[v] = Some(&ball[c]);
                    match ev.check(eq, &values) {
                        Equality::Equal => kept.push(c),
                        Equality::Unknown => *unknown = true,
                        Equality::NotEqual => {}
                    }
                }
                values[v] = None;
                domains[v] = kept;
                if domains[v].is_empty() {
                    return None;
                }
            }
            _ => {}
        }
    }

    // Arc consistency on two-variable equations with small domains.
    let binary: Vec<(usize, usize, usize)> = order
        .iter()
        .filter_map(|&e| match vars_of(&sys.equations[e])[..] {
            [x, y] => Some((e, x, y)),
            _ => None,
        })
        .collect();
    let mut changed = true;
    while changed {
        changed = false;
        for &(e, x, y) in &binary {
            if domains[x].len() * domains[y].len() > AC_PAIR_LIMIT {
                continue;
            }
            for (p, q) in [(x, y), (y, x)] {
                let mut kept = Vec::new();
                for &cp in &domains[p] {
                    values[p] = Some(&ball[cp]);
                    let mut supported = false;
                    for &cq in &domains[q] {
                        values[q] = Some(&ball[cq]);
                        match ev.check(&sys.equations[e], &values) {
                            Equality::Equal => {
                                supported = true;
                                break;
                            }
                            Equality::Unknown => {
                                *unknown = true;
                            }
                            Equality::NotEqual => {}
                        }
                    }
                    if supported {
                        kept.push(cp);
                    }
                }
                values[p] = None;
                values[q] = None;
                if kept.len() != domains[p].len() {
                    changed = true;
                    domains[p] = kept;
                    if domains[p].is_empty() {
                        return None;
                    }
                }
            }
        }
    }
    Some(domains)
}

fn finish(
    sys: &MonoidEqSystem,
    m: &Monoid,
    ball: &Ball,
    sol: Option<Vec<usize>>,
    unknown: bool,
    mut stats: SolverStats,
    start: Instant,
) -> SolverResult {
    stats.ball_size = ball.words.len();
    stats.wall_ms = start.elapsed().as_millis();
    match sol {
        Some(sol) => {
            let witness: BTreeMap<String, Word> =
                sys.variables.iter().cloned().zip(sol.iter().map(|&i| ball.words[i].clone())).collect();
            assert!(verify_witness(sys, m, &witness), "witness failed re-verification");
            SolverResult { status: Status::Sat, witness: Some(witness), stats }
        }
        None => {
            let status = if unknown || ball.degraded || stats.truncated {
                Status::Unknown
            } else {
                Status::UnsatWithinBound
            };
            SolverResult { status, witness: None, stats }
        }
    }
}

/// Searches the reduced ball for the first solution in declaration order.
pub fn solve(sys: &MonoidEqSystem, m: &Monoid, opts: SolveOptions) -> SolverResult {
    let start = Instant::now();
    let calls0 = m.stats().group_queries;
    let ball = m.reduced_ball(opts.radius);
    let mut ev = Evaluator::new(m, true);
    let mut unknown = false;
    let mut stats = SolverStats::default();

    let Some(mut domains) = initial_domains(sys, &ball.words, &mut ev, &mut unknown) else {
        stats.equation_checks = ev.checks;
        stats.oracle_calls = m.stats().group_queries - calls0;
        return finish(sys, m, &ball, None, unknown, stats, start);
    };
    stats.equation_checks = ev.checks;

    let sol = if domains.is_empty() {
        Some(Vec::new())
    } else if opts.jobs <= 1 || domains[0].len() < 2 {
        let mut search = Search::new(sys, &ball.words);
        let sol = search.run(&mut ev, &mut domains, &mut Vec::new());
        unknown |= search.unknown;
        stats.assignments += search.assignments;
        stats.equation_checks = ev.checks;
        sol
    } else {
        let jobs = opts.jobs.min(domains[0].len());
        let chunk = domains[0].len().div_ceil(jobs);
        let parts: Vec<Vec<usize>> = domains[0].chunks(chunk).map(|c| c.to_vec()).collect();
        let results: Vec<(Option<Vec<usize>>, bool, SolverStats)> = std::thread::scope(|scope| {
            let handles: Vec<_> = parts
                .into_iter()
                .map(|part| {
                    let worker = m.fresh();
                    let mut doms = domains.clone();
                    doms[0] = part;
                    let (sys, words) = (sys, &ball.words);
                    scope.spawn(move || {
                        let mut ev = Evaluator::new(&worker, true);
                        let mut search = Search::new(sys, words);
                        let sol = search.run(&mut ev, &mut doms, &mut Vec::new());
                        let st = SolverStats {
                            assignments: search.assignments,
                            equation_checks: ev.checks,
                            oracle_calls: worker.stats().group_queries,
                            ..Default::default()
                        };
                        (sol, search.unknown, st)
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
        });
        // Chunks are contiguous in search order, so the first chunk with a
        // solution holds the overall first one.
        let mut sol = None;
        for (s, u, st) in results {
            stats.absorb(&st);
            if sol.is_none() {
                unknown |= u;
                sol = s;
            }
        }
        sol
    };
    stats.oracle_calls += m.stats().group_queries - calls0;
    finish(sys, m, &ball, sol, unknown, stats, start)
}

/// Reference solver: every assignment in declaration order, every equation
/// in declaration order, no memoization anywhere. Gives up once it has made
/// more than `oracle_cap` oracle calls.
pub fn solve_naive(sys: &MonoidEqSystem, m: &Monoid, radius: usize, oracle_cap: Option<u64>) -> SolverResult {
    let start = Instant::now();
    let ball = m.reduced_ball(radius);
    let mut ctx = m.fresh();
    ctx.memoize = false;
    let mut ev = Evaluator::new(&ctx, false);
    let n = sys.variables.len();
    let mut stats = SolverStats::default();
    let mut unknown = false;
    let mut idx = vec![0usize; n];
    let over = |ctx: &Monoid| oracle_cap.is_some_and(|c| ctx.stats().group_queries > c);
    let sol = loop {
        stats.assignments += 1;
        let values: Vec<Option<&Word>> = idx.iter().map(|&i| Some(&ball.words[i])).collect();
        let mut ok = true;
        let mut maybe = false;
        for eq in &sys.equations {
            match ev.check(eq, &values) {
                Equality::Equal => {}
                Equality::NotEqual => {
                    ok = false;
                    break;
                }
                Equality::Unknown => maybe = true,
            }
        }
        if ok && !maybe {
            break Some(idx.clone());
        }
        unknown |= ok && maybe;
        if over(&ctx) {
            stats.truncated = true;
            break None;
        }
        let mut k = n;
        let done = loop {
            if k == 0 {
                break true;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < ball.words.len() {
                break false;
            }
            idx[k] = 0;
        };
        if done {
            break None;
        }
    };
    stats.equation_checks = ev.checks;
    stats.oracle_calls = ctx.stats().group_queries;
    finish(sys, m, &ball, sol, unknown, stats, start)
}
