//! The free submonoid `F` of right inverses of powers of `a`: the generating
//! set `X`, the weight map, the basis, and the embedded n-bicyclic monoid.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::monoid::{Equality, Monoid, Truth};
use crate::rewriting::finite::{Confluence, FiniteSystem, RewriteRule};
use crate::units::GroupWord;
use crate::words::{Alphabet, Letter, Word};

/// Stop looking for an inverse after this many candidates.
const ETA_CANDIDATE_CAP: usize = 200_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InverseError {
    #[error("no letter begins two distinct pieces")]
    NoWitness,
    #[error("basis has {0} element(s); a free basis of rank at least two was expected")]
    BasisTooSmall(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InverseEntry {
    pub j: usize,
    pub beta: Word,
    pub eta: Word,
    pub x_word: Word,
    /// `η` was found and `βη` was verified reduced.
    pub certified: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InverseTable {
    pub a: Letter,
    pub m: usize,
    pub entries: Vec<InverseEntry>,
    /// Shortlex-sorted basis of the submonoid generated by `X`.
    pub basis: Vec<Word>,
    /// Weight of each basis word, aligned with `basis`.
    pub weights: Vec<usize>,
    pub certified: bool,
}

impl InverseTable {
    /// Distinct `X`-words in shortlex order.
    pub fn x_words(&self) -> Vec<Word> {
        let set: BTreeSet<Word> = self.entries.iter().map(|e| e.x_word.clone()).collect();
        set.into_iter().collect()
    }

    /// The weight-one layer of `X`.
    pub fn sigma_a(&self) -> Vec<Word> {
        let set: BTreeSet<Word> = self.entries.iter().filter(|e| e.j == 1).map(|e| e.x_word.clone()).collect();
        set.into_iter().collect()
    }

    /// Unique factorization of `w` over the basis, as basis indices.
    pub fn factor_over_basis(&self, w: &Word) -> Option<Vec<usize>> {
        factor_over(&w.0, &self.basis)
    }

    pub fn basis_weight(&self, factors: &[usize]) -> usize {
        factors.iter().map(|&i| self.weights[i]).sum()
    }
}

/// A factorization of `w` into words of `code`, trying the earliest code
/// word first at each position.
pub fn factor_over(w: &[Letter], code: &[Word]) -> Option<Vec<usize>> {
    // reach[i]: some factorization of w[i..] exists.
    let n = w.len();
    let mut reach = vec![false; n + 1];
    reach[n] = true;
    for i in (0..n).rev() {
        reach[i] = code.iter().any(|c| !c.is_empty() && w[i..].starts_with(&c.0) && reach[i + c.len()]);
    }
    if !reach[0] {
        return None;
    }
    let mut out = Vec::new();
    let mut i = 0;
    while i < n {
        let k = code
            .iter()
            .position(|c| !c.is_empty() && w[i..].starts_with(&c.0) && reach[i + c.len()])
            .expect("reachable");
        out.push(k);
        i += code[k].len();
    }
    Some(out)
}

/// Result of the two tests for `u ∈ {a}*`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PowerCheck {
    pub graphical: bool,
    pub equational: Truth,
}

impl PowerCheck {
    pub fn consistent(&self) -> bool {
        self.equational == Truth::Unknown || self.equational == Truth::from(self.graphical)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EmbeddingReport {
    pub q: usize,
    pub sigma_a: Vec<Word>,
    #[serde(skip)]
    pub system: FiniteSystem,
    #[serde(skip)]
    pub alphabet: Alphabet,
    pub confluent: bool,
    pub radius: usize,
    pub normal_forms: usize,
    pub bijective: bool,
    pub homomorphic: bool,
    pub counterexample: Option<String>,
}

impl EmbeddingReport {
    pub fn verified(&self) -> bool {
        self.confluent && self.bijective && self.homomorphic
    }
}

impl Monoid {
    pub fn witness_letter(&self) -> Result<Letter, InverseError> {
        self.conditions.chosen_a.ok_or(InverseError::NoWitness)
    }

    /// Shortlex-least `Δ*`-word `η` with `piece·η = 1`, searching words of
    /// length at most `bound`.
    fn find_inverse(&self, piece: &Word, bound: usize) -> Option<Word> {
        let inv = self.phi_group(&piece.0)?.inverse();
        let mut tried = 0;
        for len in 0..=bound {
            for v in self.delta_words_of_len(len) {
                tried += 1;
                if tried > ETA_CANDIDATE_CAP {
                    return None;
                }
                let pv = GroupWord::positive(&self.pieces.phi(&v).expect("Δ*-word"));
                self.bump(|s| s.group_queries += 1);
                if Equality::from_group(&self.oracle.equal(&pv, &inv)) == Equality::Equal {
                    return Some(Word(v));
                }
            }
        }
        None
    }

    /// Builds `X`, its basis and the basis weights.
    pub fn inverse_table(&self) -> Result<InverseTable, InverseError> {
        let a = self.witness_letter()?;
        let m = self.conditions.m;
        let bound = 2 * self.pieces.pieces.len() * self.presentation.relator.len();
        let mut entries = Vec::new();
        for j in 1..=m {
            for piece in self.pieces.delta.words() {
                if piece.len() < j || !piece.0[..j].iter().all(|&l| l == a) {
                    continue;
                }
                let beta = Word::from(&piece.0[j..]);
                let (eta, found) = match self.find_inverse(piece, bound) {
                    Some(e) => (e, true),
                    None => (Word::empty(), false),
                };
                let x_word = beta.concat(&eta);
                let certified = found && self.is_reduced(&x_word);
                entries.push(InverseEntry { j, beta, eta, x_word, certified });
            }
        }
        let certified = entries.iter().all(|e| e.certified);
        let (basis, weights) = basis_of(&entries);
        if certified && basis.len() < 2 {
            return Err(InverseError::BasisTooSmall(basis.len()));
        }
        Ok(InverseTable { a, m, entries, basis, weights, certified })
    }

    /// The unique `i` with `aⁱ·w = 1`; `Some(0)` for the empty word.
    pub fn weight(&self, w: &Word, table: &InverseTable) -> Option<usize> {
        if w.is_empty() {
            return Some(0);
        }
        (1..=table.m * w.len()).find(|&i| self.equal(&Word::power_of(table.a, i).concat(w), &Word::empty()) == Equality::Equal)
    }

    /// `u ∈ {a}*`, graphically and via `ua = au`.
    pub fn is_power_of_a(&self, u: &Word, a: Letter) -> PowerCheck {
        let graphical = u.0.iter().all(|&l| l == a);
        let la = Word::letter(a);
        let equational = match self.equal(&u.concat(&la), &la.concat(u)) {
            Equality::Equal => Truth::True,
            Equality::NotEqual => Truth::False,
            Equality::Unknown => Truth::Unknown,
        };
        PowerCheck { graphical, equational }
    }

    /// Compares `< a, d₁..d_q | a dᵢ = 1 >` with the submonoid generated by
    /// `a` and the weight-one layer of `X`, on normal forms `α aʲ` with
    /// `|α| + j <= radius`.
    pub fn n_bicyclic_view(&self, table: &InverseTable, radius: usize) -> EmbeddingReport {
        let sigma = table.sigma_a();
        let q = sigma.len();
        let mut symbols = vec!["a".to_string()];
        symbols.extend((1..=q).map(|i| format!("d{i}")));
        let alphabet = Alphabet::new(symbols).expect("distinct symbols");
        let rules = (1..=q as Letter)
            .map(|d| RewriteRule::new(Word(vec![0, d]), Word::empty()).expect("decreasing"))
            .collect();
        let system = FiniteSystem::new(rules).expect("decreasing");
        let confluent = system.critical_pairs().1 == Confluence::Confluent;

        // Normal forms α aʲ, α over d-letters.
        let mut forms = Vec::new();
        for n in 0..=radius {
            for k in 0..=n {
                for alpha in words_over(1..=q as Letter, k) {
                    let mut w = alpha;
                    w.extend(std::iter::repeat(0).take(n - k));
                    forms.push(Word(w));
                }
            }
        }
        let image = |w: &Word| -> Word {
            let mut out = Vec::new();
            for &l in &w.0 {
                if l == 0 {
                    out.push(table.a);
                } else {
                    out.extend_from_slice(&sigma[l as usize - 1].0);
                }
            }
            Word(out)
        };
        let show_b = |w: &Word| alphabet.render(w);

        let mut counterexample = None;
        let mut bijective = true;
        let mut seen = BTreeSet::new();
        for f in &forms {
            let img = image(f);
            let r = self.reduce(&img);
            if !r.certified || r.word != img || !seen.insert(img.clone()) {
                bijective = false;
                counterexample.get_or_insert_with(|| format!("{} maps to non-reduced or repeated {}", show_b(f), self.show(&img)));
                continue;
            }
            // Inverse direction: split off the trailing a's and factor the rest.
            let j = img.0.iter().rev().take_while(|&&l| l == table.a).count();
            let head = &img.0[..img.len() - j];
            let back = factor_over(head, &sigma).map(|fs| {
                let mut w: Vec<Letter> = fs.into_iter().map(|i| i as Letter + 1).collect();
                w.extend(std::iter::repeat(0).take(j));
                Word(w)
            });
            if back.as_ref() != Some(f) {
                bijective = false;
                counterexample.get_or_insert_with(|| format!("{} does not round-trip", show_b(f)));
            }
        }

        let mut homomorphic = true;
        'outer: for u in &forms {
            for v in &forms {
                let prod = system.normal_form(&u.concat(v).0);
                let lhs = image(&prod);
                let rhs = self.reduce(&image(u).concat(&image(v)));
                if !rhs.certified || rhs.word != lhs {
                    homomorphic = false;
                    counterexample.get_or_insert_with(|| {
                        format!("{} * {}: expected {}, got {}", show_b(u), show_b(v), self.show(&lhs), self.show(&rhs.word))
                    });
                    break 'outer;
                }
            }
        }

        EmbeddingReport {
            q,
            sigma_a: sigma,
            system,
            alphabet,
            confluent,
            radius,
            normal_forms: forms.len(),
            bijective,
            homomorphic,
            counterexample,
        }
    }
}

/// All words of length `k` over `letters`, lexicographically.
fn words_over(letters: impl Iterator<Item = Letter> + Clone, k: usize) -> Vec<Vec<Letter>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|w| {
                letters.clone().map(move |l| {
                    let mut w2 = w.clone();
                    w2.push(l);
                    w2
                })
            })
            .collect();
    }
    out
}

/// Words of `X` that are not concatenations of two or more `X`-words.
fn basis_of(entries: &[InverseEntry]) -> (Vec<Word>, Vec<usize>) {
    let xs: BTreeSet<Word> = entries.iter().filter(|e| !e.x_word.is_empty()).map(|e| e.x_word.clone()).collect();
    let xs: Vec<Word> = xs.into_iter().collect();
    let mut basis = Vec::new();
    let mut weights = Vec::new();
    for x in &xs {
        let others: Vec<Word> = xs.iter().filter(|y| *y != x).cloned().collect();
        if factor_over(&x.0, &others).is_none() {
            let j = entries.iter().find(|e| &e.x_word == x).map(|e| e.j).unwrap_or(0);
            basis.push(x.clone());
            weights.push(j);
        }
    }
    (basis, weights)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(s: &str) -> Monoid {
        Monoid::parse(s).unwrap()
    }

    #[test]
    fn abacab_table() {
        let x = m("< a,b,c | abacab = 1 >");
        let t = x.inverse_table().unwrap();
        let xs: Vec<String> = t.x_words().iter().map(|w| x.show(w)).collect();
        assert_eq!(xs, ["babac", "cabab"]);
        assert!(t.certified);
        assert_eq!(t.weights, [1, 1]);
        assert_eq!(t.basis.len(), 2);
        for w in t.x_words() {
            assert_eq!(x.equal(&x.word("a").concat(&w), &Word::empty()), Equality::Equal);
        }
    }

    #[test]
    fn weights() {
        let x = m("< a,b,c | abacab = 1 >");
        let t = x.inverse_table().unwrap();
        assert_eq!(x.weight(&x.word("bacab"), &t), Some(1));
        assert_eq!(x.weight(&Word::empty(), &t), Some(0));
        assert_eq!(x.weight(&x.word("bb"), &t), None);
        let w = x.word("babaccabab");
        let f = t.factor_over_basis(&w).unwrap();
        assert_eq!(f.len(), 2);
        assert_eq!(t.basis_weight(&f), 2);
        assert_eq!(x.weight(&w, &t), Some(2));
        assert_eq!(t.factor_over_basis(&x.word("a")), None);
        assert_eq!(t.factor_over_basis(&Word::empty()), Some(vec![]));
    }

    #[test]
    fn weight_two_entries_when_c3_fails() {
        let x = m("< a,b,c | aabacbaab = 1 >");
        let t = x.inverse_table().unwrap();
        let mut js: Vec<usize> = t.entries.iter().map(|e| e.j).collect();
        js.sort();
        assert_eq!(js, [1, 1, 2]);
        assert!(t.certified);
        assert!(t.weights.iter().any(|&w| w == 2));
    }

    #[test]
    fn power_of_a() {
        let x = m("< a,b,c | abacab = 1 >");
        let a = x.witness_letter().unwrap();
        for (w, expect) in [("aaa", true), ("b", false), ("1", true), ("ba", false)] {
            let c = x.is_power_of_a(&x.word(w), a);
            assert_eq!(c.graphical, expect, "{w}");
            assert!(c.consistent(), "{w}");
        }
    }

    #[test]
    fn embedding() {
        let x = m("< a,b,c | abacab = 1 >");
        let t = x.inverse_table().unwrap();
        let r = x.n_bicyclic_view(&t, 4);
        assert_eq!(r.q, 2);
        assert!(r.verified(), "{:?}", r.counterexample);
        let r0 = x.n_bicyclic_view(&t, 0);
        assert_eq!(r0.normal_forms, 1);
    }

    #[test]
    fn no_witness() {
        let x = m("< a,b,c,d | abcdcdabab = 1 >");
        assert_eq!(x.inverse_table(), Err(InverseError::NoWitness));
    }
}
