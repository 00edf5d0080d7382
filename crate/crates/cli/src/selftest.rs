//! Quick checks over the bundled corpus.

use serde_json::json;

use orm_core::welc::{brute_force_welc, compile, decompile};
use orm_core::{Equality, GroupAnswer, GroupWord, Monoid, OracleBudgets, SolveOptions, SpecialPresentation, Status, WelcSystem, Word};

use crate::commands::Outcome;

const EXAMPLE_1_2: &str = include_str!("../../../corpus/example_1_2.orm");
const ABACAB: &str = include_str!("../../../corpus/abacab.orm");
const ABA: &str = include_str!("../../../corpus/aba.orm");
const BICYCLIC: &str = include_str!("../../../corpus/bicyclic.orm");
const AAB_ACB: &str = include_str!("../../../corpus/aab_acb.orm");

type Check = fn(OracleBudgets) -> Result<(), String>;

fn monoid(text: &str, b: OracleBudgets) -> Result<Monoid, String> {
    let p = SpecialPresentation::parse(text).map_err(|e| e.to_string())?;
    Monoid::new(p, b).map_err(|e| e.to_string())
}

fn expect<T: PartialEq + std::fmt::Debug>(what: &str, got: T, want: T) -> Result<(), String> {
    if got == want {
        Ok(())
    } else {
        Err(format!("{what}: got {got:?}, expected {want:?}"))
    }
}

fn shown(m: &Monoid, ws: &[Word]) -> Vec<String> {
    ws.iter().map(|w| m.show(w)).collect()
}

fn pieces(b: OracleBudgets) -> Result<(), String> {
    let m = monoid(EXAMPLE_1_2, b)?;
    expect("pieces", shown(&m, &m.pieces.pieces), vec!["ab", "cd", "cd", "ab", "ab"].into_iter().map(String::from).collect())?;
    expect("C2", m.conditions.c2(), false)
}

fn conditions(b: OracleBudgets) -> Result<(), String> {
    let m = monoid(ABACAB, b)?;
    expect("delta", shown(&m, m.pieces.delta.words()), vec!["ab".to_string(), "ac".to_string()])?;
    let c = &m.conditions;
    expect("C1 C2 C3", (c.c1, c.c2(), c.c3()), (true, true, true))?;
    let n = monoid(AAB_ACB, b)?;
    expect("C3 without aa", n.conditions.c3(), false)
}

fn free_product(b: OracleBudgets) -> Result<(), String> {
    let m = monoid(ABA, b)?;
    expect("all letters invertible", m.structure.all_letters_invertible, true)?;
    expect("b a a = 1", m.equal(&m.word("baa"), &Word::empty()), Equality::Equal)
}

fn bicyclic_ball(b: OracleBudgets) -> Result<(), String> {
    let m = monoid(BICYCLIC, b)?;
    for r in 0..=4 {
        let mut want: Vec<Word> = Vec::new();
        for i in 0..=r {
            for j in 0..=r - i {
                want.push(Word::power_of(1, i).concat(&Word::power_of(0, j)));
            }
        }
        want.sort();
        expect("ball", m.reduced_ball(r).words, want)?;
    }
    Ok(())
}

fn inverse_table(b: OracleBudgets) -> Result<(), String> {
    let m = monoid(ABACAB, b)?;
    let t = m.inverse_table().map_err(|e| e.to_string())?;
    expect("certified", t.certified, true)?;
    expect("weights", t.weights.clone(), vec![1, 1])?;
    for x in &t.basis {
        expect("a.x = 1", m.equal(&Word::letter(t.a).concat(x), &Word::empty()), Equality::Equal)?;
    }
    let e = m.n_bicyclic_view(&t, 3);
    expect("embedding", e.verified(), true)
}

fn round_trip(b: OracleBudgets) -> Result<(), String> {
    let m = monoid(ABACAB, b)?;
    let t = m.inverse_table().map_err(|e| e.to_string())?;
    for (text, sat) in [
        ("vars: X; gens: d1 d2; eq: X = d1; len: X <= d1", true),
        ("vars: X; gens: d1 d2; eq: X = d1 d2; len: X <= d1", false),
    ] {
        let sys = WelcSystem::parse(text).map_err(|e| e.to_string())?;
        expect("brute force", brute_force_welc(&sys, 3).status == Status::Sat, sat)?;
        let (c, rec) = compile(&sys, &t, &m).map_err(|e| e.to_string())?;
        let r = orm_core::solve(&c, &m, SolveOptions::radius(10));
        expect("compiled", r.status == Status::Sat, sat)?;
        if let Some(w) = &r.witness {
            let back = decompile(w, &sys, &rec).ok_or("witness does not decompile")?;
            expect("decompiled witness", sys.satisfied_by(&back), true)?;
        }
    }
    Ok(())
}

fn oracle_agreement(b: OracleBudgets) -> Result<(), String> {
    let m = monoid(ABACAB, b)?;
    let o = &m.oracle;
    let mut layer = vec![GroupWord::empty()];
    let gens: Vec<GroupWord> = (0..2u16)
        .flat_map(|g| [GroupWord::positive(&Word::letter(g)), GroupWord::positive(&Word::letter(g)).inverse()])
        .collect();
    for _ in 0..4 {
        layer = layer.iter().flat_map(|w| gens.iter().map(move |g| w.concat(g))).collect();
        for w in &layer {
            let answers: Vec<GroupAnswer> = [o.dehn_is_trivial(w).map(|v| v.value).unwrap_or(GroupAnswer::Unknown), o.kb_is_trivial(w).value, o.bfs_is_trivial(w).value]
                .into_iter()
                .filter(|a| *a != GroupAnswer::Unknown)
                .collect();
            if answers.windows(2).any(|p| p[0] != p[1]) {
                return Err(format!("methods disagree on {}", w.render(&m.units.alphabet)));
            }
        }
    }
    Ok(())
}

pub fn run(budgets: OracleBudgets) -> Outcome {
    let checks: [(&str, Check); 7] = [
        ("pieces", pieces),
        ("conditions", conditions),
        ("free_product", free_product),
        ("bicyclic_ball", bicyclic_ball),
        ("inverse_table", inverse_table),
        ("round_trip", round_trip),
        ("oracle_agreement", oracle_agreement),
    ];
    let mut results = Vec::new();
    let mut all = true;
    for (name, f) in checks {
        let r = f(budgets);
        all &= r.is_ok();
        results.push(json!({ "name": name, "passed": r.is_ok(), "detail": r.err() }));
    }
    Outcome { value: json!({ "passed": all, "checks": results }), code: if all { 0 } else { 1 } }
}
