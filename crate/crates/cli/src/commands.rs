use std::path::Path;

use serde_json::{json, Value};

use orm_core::units::Certificate;
use orm_core::welc::{compile, GadgetKind, MonoidEqSystem, WelcSystem};
use orm_core::{
    solve as solve_pruned, solve_naive, GroupAnswer, GroupWord, Monoid, OracleBudgets, SolveOptions, SpecialPresentation, Status,
    Word,
};

/// Exit code for an honest "undecided" or "not certified" outcome.
pub const UNDECIDED: u8 = 2;

pub struct Outcome {
    pub value: Value,
    pub code: u8,
}

impl Outcome {
    fn new(value: Value, ok: bool) -> Self {
        Outcome { value, code: if ok { 0 } else { UNDECIDED } }
    }
}

#[derive(Debug)]
pub struct CliError {
    pub code: &'static str,
    pub message: String,
}

fn err(code: &'static str, message: impl ToString) -> CliError {
    CliError { code, message: message.to_string() }
}

type Result<T> = std::result::Result<T, CliError>;

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| err("E001", format!("{}: {e}", path.display())))
}

pub fn load(path: &Path, budgets: OracleBudgets) -> Result<Monoid> {
    let text = read(path)?;
    let p = SpecialPresentation::parse(&text).map_err(|e| err("E002", format!("{}: {e}", path.display())))?;
    Monoid::new(p, budgets).map_err(|e| err("E004", e))
}

fn word(m: &Monoid, text: &str) -> Result<Word> {
    m.presentation.word(text).map_err(|e| err("E003", format!("`{text}`: {e}")))
}

fn words(m: &Monoid, ws: &[Word]) -> Vec<String> {
    ws.iter().map(|w| m.show(w)).collect()
}

fn certificate(c: &Option<Certificate>, m: &Monoid) -> Value {
    let b = &m.units.alphabet;
    match c {
        None => Value::Null,
        Some(Certificate::Trace { steps }) => {
            json!({ "kind": "trace", "steps": steps.iter().map(|s| s.render(b)).collect::<Vec<_>>() })
        }
        Some(Certificate::NormalForm { word }) => json!({ "kind": "normal_form", "word": word.render(b) }),
        Some(Certificate::Abelianization { exponent_sums, relator_sums }) => {
            json!({ "kind": "abelianization", "exponent_sums": exponent_sums, "relator_sums": relator_sums })
        }
    }
}

pub fn analysis(m: &Monoid) -> Value {
    let d = &m.pieces;
    let c = &m.conditions;
    let s = &m.structure;
    let alpha = &m.presentation.alphabet;
    let phi: serde_json::Map<String, Value> = d
        .delta
        .words()
        .iter()
        .map(|w| {
            let b = d.phi_letter(w).expect("piece");
            (m.show(w), Value::String(d.units_alphabet.symbol(b).to_string()))
        })
        .collect();
    json!({
        "presentation": m.presentation.render(),
        "pieces": words(m, &d.pieces),
        "delta": words(m, d.delta.words()),
        "phi": phi,
        "units_presentation": m.units.render(),
        "certified": d.certified,
        "certificate": d.certificate,
        "conditions": {
            "c1": c.c1,
            "c2": c.c2(),
            "c3": c.chosen_a.map(|_| c.c3()),
            "a": c.chosen_a.map(|a| alpha.symbol(a).to_string()),
            "m": c.m,
            "c2_witnesses": c.c2_witnesses.iter().map(|w| json!({
                "letter": alpha.symbol(w.letter),
                "gamma": m.show(&w.gamma),
                "delta": m.show(&w.delta),
                "c3": c.c3_by_witness[&w.letter],
            })).collect::<Vec<_>>(),
        },
        "structure": {
            "torsion_exponent": s.torsion_exponent,
            "torsion_root": m.show(&s.torsion_root),
            "all_letters_invertible": s.all_letters_invertible,
            "free_product_complement": s.free_product_complement.as_ref()
                .map(|set| set.iter().map(|&l| alpha.symbol(l).to_string()).collect::<Vec<_>>()),
            "hyperbolic_units_flag": s.hyperbolic_units_flag,
        },
        "oracle": {
            "chain": m.oracle.chain().iter().map(|x| x.to_string()).collect::<Vec<_>>(),
            "kb_converged": m.oracle.kb_converged(),
        },
    })
}

pub fn analyze(file: &Path, budgets: OracleBudgets) -> Result<Outcome> {
    let m = load(file, budgets)?;
    let certified = m.pieces.certified;
    Ok(Outcome::new(analysis(&m), certified))
}

pub fn units(file: &Path, text: &str, budgets: OracleBudgets) -> Result<Outcome> {
    let m = load(file, budgets)?;
    let gw = match GroupWord::parse(text, &m.units.alphabet) {
        Ok(g) => g,
        Err(_) => {
            let w = word(&m, text)?;
            let b = m.pieces.phi(&w.0).ok_or_else(|| err("E003", format!("`{text}` is neither a units word nor a Δ*-word")))?;
            GroupWord::positive(&b)
        }
    };
    let v = m.oracle.is_trivial(&gw);
    let value = json!({
        "word": gw.render(&m.units.alphabet),
        "value": match v.value {
            GroupAnswer::Trivial => "TRIVIAL",
            GroupAnswer::Nontrivial => "NONTRIVIAL",
            GroupAnswer::Unknown => "UNKNOWN",
        },
        "method": v.method.to_string(),
        "certificate": certificate(&v.certificate, &m),
    });
    Ok(Outcome::new(value, v.is_decided()))
}

pub fn reduce(file: &Path, text: &str, budgets: OracleBudgets) -> Result<Outcome> {
    let m = load(file, budgets)?;
    let w = word(&m, text)?;
    let r = m.reduce(&w);
    let invertible = m.in_delta_star(&r.word.0);
    let value = json!({
        "input": m.show(&w),
        "reduced": m.show(&r.word),
        "certified": r.certified,
        "invertible": invertible,
        "trace": r.trace.iter().map(|s| json!({
            "position": s.position,
            "lhs": m.show(&s.lhs),
            "rhs": m.show(&s.rhs),
        })).collect::<Vec<_>>(),
    });
    Ok(Outcome::new(value, r.certified))
}

pub fn ball(file: &Path, radius: usize, budgets: OracleBudgets) -> Result<Outcome> {
    let m = load(file, budgets)?;
    let b = m.reduced_ball(radius);
    let value = json!({
        "radius": radius,
        "size": b.words.len(),
        "degraded": b.degraded,
        "words": words(&m, &b.words),
    });
    Ok(Outcome::new(value, !b.degraded))
}

fn table(m: &Monoid) -> Result<orm_core::InverseTable> {
    m.inverse_table().map_err(|e| err("E004", e))
}

pub fn inverses(file: &Path, budgets: OracleBudgets) -> Result<Outcome> {
    let m = load(file, budgets)?;
    let t = table(&m)?;
    let value = json!({
        "a": m.presentation.alphabet.symbol(t.a),
        "m": t.m,
        "entries": t.entries.iter().map(|e| json!({
            "j": e.j,
            "beta": m.show(&e.beta),
            "eta": m.show(&e.eta),
            "x": m.show(&e.x_word),
            "certified": e.certified,
        })).collect::<Vec<_>>(),
        "basis": words(&m, &t.basis),
        "weights": t.weights,
        "certified": t.certified,
    });
    Ok(Outcome::new(value, t.certified))
}

pub fn embed(file: &Path, radius: usize, budgets: OracleBudgets) -> Result<Outcome> {
    let m = load(file, budgets)?;
    let t = table(&m)?;
    let r = m.n_bicyclic_view(&t, radius);
    let value = json!({
        "q": r.q,
        "sigma_a": words(&m, &r.sigma_a),
        "system": r.system.rules().iter()
            .map(|x| format!("{} -> {}", r.alphabet.render(&x.lhs), r.alphabet.render(&x.rhs)))
            .collect::<Vec<_>>(),
        "confluent": r.confluent,
        "radius": r.radius,
        "normal_forms": r.normal_forms,
        "bijective": r.bijective,
        "homomorphic": r.homomorphic,
        "verified": r.verified(),
        "counterexample": r.counterexample,
    });
    Ok(Outcome::new(value, r.verified()))
}

pub fn compile_welc(file: &Path, system: &Path, budgets: OracleBudgets) -> Result<Outcome> {
    let m = load(file, budgets)?;
    let sys = WelcSystem::parse(&read(system)?).map_err(|e| err("E005", format!("{}: {e}", system.display())))?;
    let t = table(&m)?;
    let (out, rec) = compile(&sys, &t, &m).map_err(|e| err("E004", e))?;
    let value = json!({
        "compiled": out.render().lines().collect::<Vec<_>>(),
        "record": {
            "generator_map": rec.generator_map.iter().map(|(g, w)| json!({ "generator": g, "word": w })).collect::<Vec<_>>(),
            "weights": rec.weights,
            "a": rec.a,
            "gadgets": rec.gadgets.iter().map(|g| json!({
                "kind": match g.kind { GadgetKind::Domain => "domain", GadgetKind::Length => "length" },
                "source": g.source,
                "fresh": g.fresh,
                "equations": g.equations,
            })).collect::<Vec<_>>(),
        },
    });
    Ok(Outcome::new(value, true))
}

pub fn solve(file: &Path, system: &Path, radius: usize, jobs: usize, naive: bool, budgets: OracleBudgets) -> Result<Outcome> {
    let m = load(file, budgets)?;
    let sys = MonoidEqSystem::parse(&read(system)?, &m.presentation)
        .map_err(|e| err("E005", format!("{}: {e}", system.display())))?;
    let r = if naive { solve_naive(&sys, &m, radius, None) } else { solve_pruned(&sys, &m, SolveOptions { radius, jobs }) };
    let value = json!({
        "status": match r.status {
            Status::Sat => "SAT",
            Status::UnsatWithinBound => "UNSAT_WITHIN_BOUND",
            Status::Unknown => "UNKNOWN",
        },
        "radius": radius,
        "witness": r.witness.as_ref().map(|w| {
            w.iter().map(|(k, v)| (k.clone(), Value::String(m.show(v)))).collect::<serde_json::Map<_, _>>()
        }),
        "stats": {
            "assignments": r.stats.assignments,
            "equation_checks": r.stats.equation_checks,
            "oracle_calls": r.stats.oracle_calls,
            "ball_size": r.stats.ball_size,
            "wall_ms": r.stats.wall_ms as u64,
        },
    });
    Ok(Outcome::new(value, r.status != Status::Unknown))
}
