//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

use std::collections::BTreeSet;
use std::path::Path;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use orm_core::adjan::check_delta;
use orm_core::inverses::factor_over;
use orm_core::welc::{brute_force_welc, compile, decompile};
use orm_core::{
    solve, solve_naive, Equality, GroupAnswer, GroupWord, Monoid, OracleBudgets, SolveOptions, SpecialPresentation, Status,
    UnitsOracle, WelcSystem, Word,
};

const WELC_BOUND: usize = 4;
const DP_RADIUS: usize = 10;

struct Outcome {
    pass: bool,
    detail: String,
}

fn ok(detail: impl Into<String>) -> Outcome {
    Outcome { pass: true, detail: detail.into() }
}

fn fail(detail: impl Into<String>) -> Outcome {
    Outcome { pass: false, detail: detail.into() }
}

fn monoid(text: &str) -> Monoid {
    Monoid::new(SpecialPresentation::parse(text).unwrap(), OracleBudgets::default()).unwrap()
}

fn corpus_file(name: &str) -> String {
    let p = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name);
    std::fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

fn set(items: &[&str]) -> BTreeSet<String> {
    items.iter().map(|s| s.to_string()).collect()
}

/// Checks `Δ` (and optionally the piece list) for one relator under one second.
fn pieces_case(alphabet: &str, relator: &str, delta: &[&str], pieces: Option<&[&str]>, notes: &mut Vec<String>) -> bool {
    let start = Instant::now();
    let p = SpecialPresentation::parse(&format!("< {alphabet} | {relator} = 1 >")).unwrap();
    let d = orm_core::adjan::minimal_pieces(&p).unwrap();
    let took = start.elapsed();
    let got: Vec<String> = d.delta.words().iter().map(|w| p.show(w)).collect();
    let mut good = got.iter().cloned().collect::<BTreeSet<_>>() == set(delta) && took < Duration::from_secs(1);
    if let Some(ps) = pieces {
        good &= d.pieces.iter().map(|w| p.show(w)).collect::<Vec<_>>() == ps;
    }
    if !good {
        notes.push(format!("{relator}: Δ = {{{}}} in {:.3}s, expected {{{}}}", got.join(", "), took.as_secs_f64(), delta.join(", ")));
    }
    good
}

fn criterion_1() -> Outcome {
    let mut notes = Vec::new();
    let mut all = pieces_case("a,b,c,d", "abcdcdabab", &["ab", "cd"], Some(&["ab", "cd", "cd", "ab", "ab"]), &mut notes);
    for n in 1..=3 {
        all &= pieces_case("a,b,c", &"abacab".repeat(n), &["ab", "ac"], None, &mut notes);
    }
    for n in 1..=2 {
        all &= pieces_case("a,b", &"aababbaab".repeat(n), &["aab", "abb"], None, &mut notes);
    }
    for n in 1..=2 {
        for k in 1..=2 {
            let p1 = format!("ab{}{}", "a".repeat(n), "b".repeat(n + 1));
            let p2 = format!("ab{}{}", "a".repeat(n + 1), "b".repeat(n + 1));
            all &= pieces_case("a,b", &format!("{p1}{p2}{p1}").repeat(k), &[&p1, &p2], None, &mut notes);
        }
    }
    if all {
        ok("Example decompositions and all families reproduced")
    } else {
        fail(notes.join("; "))
    }
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let p = SpecialPresentation::parse("< a,b,c,d | abcd = 1 >").unwrap();
    let ws = |xs: &[&str]| xs.iter().map(|x| p.word(x).unwrap()).collect::<Vec<_>>();
    let r1 = check_delta(&ws(&["ab", "ac"]));
    let r2 = check_delta(&ws(&["aab", "abb"]));
    let r3 = check_delta(&ws(&["ab", "cd"]));
    let got = [(r1.c1, r1.c2(), r1.c3()), (r2.c1, r2.c2(), r2.c3())];
    let want = [(true, true, true), (true, true, false)];
    if got == want && !r3.c2() && start.elapsed() < Duration::from_secs(1) {
        ok("{ab,ac}: C1 C2 C3; {aab,abb}: C1 C2 not C3; {ab,cd}: not C2")
    } else {
        fail(format!("got {got:?}, C2 for {{ab,cd}} = {}", r3.c2()))
    }
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let m = monoid(&corpus_file("aba.orm"));
    let s = &m.structure;
    let complement: Option<Vec<&str>> =
        s.free_product_complement.as_ref().map(|c| c.iter().map(|&l| m.presentation.alphabet.symbol(l)).collect());
    let eq = m.equal(&m.word("baa"), &Word::empty());
    let good = s.all_letters_invertible && complement == Some(vec!["c", "d"]) && eq == Equality::Equal;
    let took = start.elapsed();
    if good && took < Duration::from_secs(5) {
        ok(format!("all letters invertible, complement {{c, d}}, baa = 1 ({:.2}s)", took.as_secs_f64()))
    } else {
        fail(format!("invertible {}, complement {complement:?}, baa vs 1: {eq:?}", s.all_letters_invertible))
    }
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let m = monoid(&corpus_file("bicyclic.orm"));
    let (a, b) = (m.presentation.alphabet.letter("a").unwrap(), m.presentation.alphabet.letter("b").unwrap());
    for r in 0..=6 {
        let mut want = Vec::new();
        for i in 0..=r {
            for j in 0..=r - i {
                want.push(Word::power_of(b, i).concat(&Word::power_of(a, j)));
            }
        }
        want.sort();
        let got = m.reduced_ball(r);
        if got.words != want || got.degraded {
            return fail(format!("radius {r}: {} words, expected {}", got.words.len(), want.len()));
        }
    }
    let took = start.elapsed();
    if took < Duration::from_secs(5) {
        ok(format!("b^i a^j for i + j <= R, R = 0..6 ({:.2}s)", took.as_secs_f64()))
    } else {
        fail(format!("took {:.2}s", took.as_secs_f64()))
    }
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let m = monoid(&corpus_file("abacab.orm"));
    let t = m.inverse_table().unwrap();
    let xs: BTreeSet<String> = t.x_words().iter().map(|w| m.show(w)).collect();
    let reduced = t.entries.iter().all(|e| e.certified && m.is_reduced(&e.x_word));
    let weights = t.x_words().iter().all(|x| m.weight(x, &t) == Some(1));
    let inverse = t.x_words().iter().all(|x| m.equal(&Word::letter(t.a).concat(x), &Word::empty()) == Equality::Equal);
    let basis = t.basis.len() == 2;
    let took = start.elapsed();
    let subs = format!(
        "certified reduced {reduced}, weights 1 {weights}, basis size 2 {basis}, a.x = 1 {inverse}, {:.2}s",
        took.as_secs_f64()
    );
    let expected = set(&["bacab", "cabab"]);
    if xs == expected && reduced && weights && inverse && basis && took < Duration::from_secs(10) {
        ok(format!("X = {{bacab, cabab}}; {subs}"))
    } else {
        fail(format!(
            "X = {{{}}}, expected {{bacab, cabab}}; acab -> abac is a rule since pq = qp in the units group; {subs}",
            xs.into_iter().collect::<Vec<_>>().join(", ")
        ))
    }
}

/// Random product of up to `k` basis words.
fn random_f(rng: &mut StdRng, basis: &[Word], k: usize) -> (Word, usize) {
    let n = rng.gen_range(0..=k);
    let mut w = Word::empty();
    for _ in 0..n {
        w = w.concat(&basis[rng.gen_range(0..basis.len())]);
    }
    (w, n)
}

fn random_word(rng: &mut StdRng, letters: &[u16], max: usize) -> Word {
    let n = rng.gen_range(0..=max);
    Word((0..n).map(|_| letters[rng.gen_range(0..letters.len())]).collect())
}

fn all_words(letters: &[u16], max: usize) -> Vec<Word> {
    let mut out = vec![Word::empty()];
    let mut layer = vec![Word::empty()];
    for _ in 0..max {
        layer = layer.iter().flat_map(|w| letters.iter().map(move |&l| w.concat(&Word::letter(l)))).collect();
        out.extend(layer.iter().cloned());
    }
    out
}

const CASES: usize = 200;

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(0x6c656d6d61);
    let mut violations = Vec::new();
    let mut cases = 0usize;
    let files = ["example_1_2.orm", "abacab.orm", "abacab_squared.orm", "aab_acb.orm", "aba.orm", "bicyclic.orm"];
    for f in files {
        let m = monoid(&corpus_file(f));
        let letters: Vec<u16> = m.presentation.alphabet.letters().collect();

        // (c) distinct pieces are distinct elements.
        let delta = m.pieces.delta.words().to_vec();
        for (i, u) in delta.iter().enumerate() {
            for v in &delta[i + 1..] {
                cases += 1;
                if m.equal(u, v) != Equality::NotEqual {
                    violations.push(format!("{f}: pieces {} and {} not separated", m.show(u), m.show(v)));
                }
            }
        }
        // Random Δ*-words: equality in M agrees with equality in the units group.
        for _ in 0..CASES {
            let (u, _) = random_f(&mut rng, &delta, 4);
            let (v, _) = random_f(&mut rng, &delta, 4);
            if u.len() > 8 || v.len() > 8 {
                continue;
            }
            cases += 1;
            let (e1, e2) = (m.equal(&u, &v), m.delta_equal(&u, &v).unwrap());
            if e1.is_decided() && e2.is_decided() && e1 != e2 {
                violations.push(format!("{f}: {} vs {}: {e1:?} in M, {e2:?} in units", m.show(&u), m.show(&v)));
            }
        }

        if !m.conditions.c1 || !m.conditions.c2() {
            continue;
        }
        let t = m.inverse_table().unwrap();
        let a = t.a;

        // (a) concatenation in F stays reduced and weights add.
        for _ in 0..CASES {
            cases += 1;
            let (u, _) = random_f(&mut rng, &t.basis, 2);
            let (v, _) = random_f(&mut rng, &t.basis, 2);
            let uv = u.concat(&v);
            let (wu, wv, wuv) = (m.weight(&u, &t), m.weight(&v, &t), m.weight(&uv, &t));
            let additive = matches!((wu, wv, wuv), (Some(x), Some(y), Some(z)) if x + y == z);
            if !m.is_reduced(&uv) || !additive {
                violations.push(format!("{f}: {} . {} (weights {wu:?} {wv:?} {wuv:?})", m.show(&u), m.show(&v)));
            }
        }

        // (b) the two {a}* tests agree.
        for i in 0..CASES {
            cases += 1;
            let raw = if i % 4 == 0 { Word::power_of(a, rng.gen_range(0..=8)) } else { random_word(&mut rng, &letters, 8) };
            let u = m.reduce(&raw).word;
            let c = m.is_power_of_a(&u, a);
            if !c.consistent() {
                violations.push(format!("{f}: {} graphical {} equational {:?}", m.show(&u), c.graphical, c.equational));
            }
        }

        // (d) freeness: p w, w q in F with p, q in F forces w in F.
        let mut members = vec![Word::empty()];
        for x in &t.basis {
            members.push(x.clone());
            for y in &t.basis {
                members.push(x.concat(y));
            }
        }
        let in_f = |w: &Word| factor_over(&w.0, &t.basis).is_some();
        for w in all_words(&letters, 6) {
            for p in &members {
                if !in_f(&p.concat(&w)) {
                    continue;
                }
                for q in &members {
                    cases += 1;
                    if in_f(&w.concat(q)) && !in_f(&w) {
                        violations.push(format!("{f}: {} breaks freeness", m.show(&w)));
                    }
                }
            }
        }
        // Membership by factorization agrees with the weight definition.
        for _ in 0..CASES {
            cases += 1;
            let w = m.reduce(&random_word(&mut rng, &letters, 8)).word;
            if in_f(&w) != m.weight(&w, &t).is_some() {
                violations.push(format!("{f}: membership of {} disagrees", m.show(&w)));
            }
        }
    }
    let took = start.elapsed();
    if violations.is_empty() && took < Duration::from_secs(120) {
        ok(format!("{cases} cases over 6 presentations, no violations ({:.1}s)", took.as_secs_f64()))
    } else {
        violations.truncate(5);
        fail(format!("{} ({:.1}s)", violations.join("; "), took.as_secs_f64()))
    }
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let m = monoid(&corpus_file("abacab.orm"));
    let t = m.inverse_table().unwrap();
    let r = m.n_bicyclic_view(&t, 4);
    let took = start.elapsed();
    if r.verified() && r.q == 2 && took < Duration::from_secs(30) {
        ok(format!("q = 2, {} normal forms, bijective and multiplicative ({:.2}s)", r.normal_forms, took.as_secs_f64()))
    } else {
        fail(format!("q = {}, verified {}, {:?}", r.q, r.verified(), r.counterexample))
    }
}

struct SuiteRun {
    text: String,
    brute: Status,
    dp: Status,
    decompiled: bool,
    pruned_calls: u64,
    naive_calls: u64,
    naive_truncated: bool,
}

fn welc_suite() -> Vec<SuiteRun> {
    let m = monoid(&corpus_file("abacab.orm"));
    let t = m.inverse_table().unwrap();
    let mut out = Vec::new();
    for line in corpus_file("welc_suite.welc").lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
        let sys = WelcSystem::parse(line).unwrap();
        let brute = brute_force_welc(&sys, WELC_BOUND);
        let (compiled, rec) = compile(&sys, &t, &m).unwrap();
        let pruned_ctx = m.fresh();
        let r = solve(&compiled, &pruned_ctx, SolveOptions::radius(DP_RADIUS));
        let decompiled = match &r.witness {
            Some(w) => decompile(w, &sys, &rec).is_some_and(|vals| sys.satisfied_by(&vals)),
            None => true,
        };
        let cap = 20 * r.stats.oracle_calls + 1;
        let naive = solve_naive(&compiled, &m.fresh(), DP_RADIUS, Some(cap));
        out.push(SuiteRun {
            text: line.to_string(),
            brute: brute.status,
            dp: r.status,
            decompiled,
            pruned_calls: r.stats.oracle_calls,
            naive_calls: naive.stats.oracle_calls,
            naive_truncated: naive.stats.truncated,
        });
    }
    out
}

fn criterion_8(runs: &[SuiteRun], took: Duration) -> Outcome {
    let sat = runs.iter().filter(|r| r.brute == Status::Sat).count();
    let unsat = runs.len() - sat;
    let bad: Vec<&str> = runs.iter().filter(|r| r.brute != r.dp || !r.decompiled).map(|r| r.text.as_str()).collect();
    if runs.len() == 30 && sat >= 10 && unsat >= 10 && bad.is_empty() && took < Duration::from_secs(600) {
        ok(format!("30 instances ({sat} SAT, {unsat} UNSAT), full agreement, witnesses decompile ({:.1}s)", took.as_secs_f64()))
    } else {
        fail(format!("{} instances, {sat} SAT; disagreements: {bad:?} ({:.1}s)", runs.len(), took.as_secs_f64()))
    }
}

fn criterion_9() -> Outcome {
    let start = Instant::now();
    let mut disagreements = Vec::new();
    let mut decided = 0usize;
    for rel in ["pqppqp", "pqp"] {
        let p = SpecialPresentation::parse(&format!("< p,q | {rel} = 1 >")).unwrap();
        let o = UnitsOracle::new(p.clone(), OracleBudgets::default());
        let gens: Vec<GroupWord> = (0..2u16)
            .flat_map(|g| {
                let w = GroupWord::positive(&Word::letter(g));
                [w.clone(), w.inverse()]
            })
            .collect();
        let mut layer = vec![GroupWord::empty()];
        let mut words = vec![GroupWord::empty()];
        for _ in 0..6 {
            layer = layer.iter().flat_map(|w| gens.iter().map(move |g| w.concat(g))).collect();
            words.extend(layer.iter().cloned());
        }
        for w in &words {
            let dehn = o.dehn_is_trivial(w).map(|v| v.value).unwrap_or(GroupAnswer::Unknown);
            let answers = [dehn, o.kb_is_trivial(w).value, o.bfs_is_trivial(w).value];
            let known: Vec<_> = answers.iter().filter(|a| **a != GroupAnswer::Unknown).collect();
            decided += known.len();
            if known.windows(2).any(|x| x[0] != x[1]) {
                disagreements.push(format!("{rel}: {} -> {answers:?}", w.render(&p.alphabet)));
            }
        }
    }
    let took = start.elapsed();
    if disagreements.is_empty() && took < Duration::from_secs(120) {
        ok(format!("{decided} decided verdicts, no disagreement ({:.1}s)", took.as_secs_f64()))
    } else {
        disagreements.truncate(5);
        fail(format!("{disagreements:?} ({:.1}s)", took.as_secs_f64()))
    }
}

fn criterion_10(runs: &[SuiteRun]) -> Outcome {
    let pruned: u64 = runs.iter().map(|r| r.pruned_calls).sum();
    let naive: u64 = runs.iter().map(|r| r.naive_calls).sum();
    let capped = runs.iter().filter(|r| r.naive_truncated).count();
    // A truncated naive run made more than 10x the pruned calls by construction.
    let ratio = naive as f64 / pruned.max(1) as f64;
    // The gate is on the whole suite; small instances with tiny balls are reported, not gated.
    let below = runs.iter().filter(|r| !r.naive_truncated && r.naive_calls < 10 * r.pruned_calls).count();
    let detail = format!(
        "pruned {pruned} oracle calls, naive at least {naive} (ratio >= {ratio:.1}; {capped}/{} naive runs hit the 20x cap, {below} below 10x)",
        runs.len()
    );
    if ratio >= 10.0 {
        ok(detail)
    } else {
        fail(detail)
    }
}

fn main() {
    let criteria: Vec<(usize, &str)> = vec![
        (1, "piece decompositions"),
        (2, "condition reports"),
        (3, "all-invertible structure"),
        (4, "bicyclic normal forms"),
        (5, "inverse table"),
        (6, "lemma suite"),
        (7, "n-bicyclic embedding"),
        (8, "WELC round trip"),
        (9, "oracle cross-validation"),
        (10, "pruning gate"),
    ];
    let suite_start = Instant::now();
    let mut suite: Option<(Vec<SuiteRun>, Duration)> = None;
    let mut failed = 0;
    for (n, name) in criteria {
        let start = Instant::now();
        let outcome = match n {
            1 => criterion_1(),
            2 => criterion_2(),
            3 => criterion_3(),
            4 => criterion_4(),
            5 => criterion_5(),
            6 => criterion_6(),
            7 => criterion_7(),
            8 | 10 => {
                let (runs, took) = suite.get_or_insert_with(|| {
                    let s = Instant::now();
                    let r = welc_suite();
                    (r, s.elapsed())
                });
                if n == 8 {
                    criterion_8(runs, *took)
                } else {
                    criterion_10(runs)
                }
            }
            9 => criterion_9(),
            _ => unreachable!(),
        };
        if !outcome.pass {
            failed += 1;
        }
        println!(
            "{} {:>2} {:<26} {} [{:.1}s]",
            if outcome.pass { "PASS" } else { "FAIL" },
            n,
            name,
            outcome.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} of 10 criteria passed ({:.1}s)", 10 - failed, suite_start.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
