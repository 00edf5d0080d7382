//! Decomposition of the relator into minimal invertible pieces.
//!
//! The overlap rule drives everything here: if `αβ` and `βγ` are invertible
//! (with `β` non-empty) then so are `α`, `β` and `γ`. Starting from the
//! relator, which equals 1, we close under that rule and then factor the
//! relator greedily by the shortest invertible prefix.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use thiserror::Error;

use crate::words::{Alphabet, Letter, PrefixCode, SpecialPresentation, Word, WordError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AdjanError {
    #[error("no invertible prefix found at relator position {0}")]
    Unfactorable(usize),
    #[error("pieces do not form a prefix code: {0}")]
    NotPrefixCode(#[from] WordError),
}

/// All non-empty words derivable from `relator` by repeated overlaps.
pub fn invertible_closure(relator: &Word) -> BTreeSet<Word> {
    closure_from(std::iter::once(relator.clone()))
}

fn closure_from(seeds: impl IntoIterator<Item = Word>) -> BTreeSet<Word> {
    let mut seen: HashSet<Vec<Letter>> = HashSet::new();
    let mut list: Vec<Vec<Letter>> = Vec::new();
    for s in seeds {
        if !s.is_empty() && seen.insert(s.0.clone()) {
            list.push(s.0);
        }
    }
    // every pair (i, j) with max(i, j) < done has been processed
    let mut done = 0;
    while done < list.len() {
        let i = done;
        let mut fresh = Vec::new();
        for j in 0..=i {
            overlap_into(&list[i], &list[j], &mut fresh);
            if i != j {
                overlap_into(&list[j], &list[i], &mut fresh);
            }
        }
        for w in fresh {
            if seen.insert(w.clone()) {
                list.push(w);
            }
        }
        done += 1;
    }
    list.into_iter().map(Word).collect()
}

/// Pushes `α`, `β`, `γ` for every way of writing `u ≡ αβ`, `v ≡ βγ`, `β ≠ 1`.
fn overlap_into(u: &[Letter], v: &[Letter], out: &mut Vec<Vec<Letter>>) {
    let max = u.len().min(v.len());
    for l in 1..=max {
        if u[u.len() - l..] == v[..l] {
            for part in [&u[..u.len() - l], &v[..l], &v[l..]] {
                if !part.is_empty() {
                    out.push(part.to_vec());
                }
            }
        }
    }
}

/// Result of [`minimal_pieces`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PieceDecomposition {
    /// `r ≡ r₁…r_k`.
    pub pieces: Vec<Word>,
    /// Distinct pieces in shortlex order; codeword `i` maps to units letter `i`.
    pub delta: PrefixCode,
    pub units_alphabet: Alphabet,
    /// Whether the pieces passed the minimality certificate.
    pub certified: bool,
    pub certificate: Vec<String>,
}

impl PieceDecomposition {
    pub fn phi_letter(&self, piece: &Word) -> Option<Letter> {
        self.delta.index_of(&piece.0).map(|i| i as Letter)
    }

    /// `φ` applied to a word of `Δ*`; `None` if the word does not factor.
    pub fn phi(&self, w: &[Letter]) -> Option<Word> {
        self.delta
            .factor_indices(w)
            .map(|ix| Word(ix.into_iter().map(|i| i as Letter).collect()))
    }

    /// The `Δ*`-word whose image under `φ` is `b`.
    pub fn phi_inverse(&self, b: &Word) -> Word {
        let mut out = Vec::new();
        for &l in &b.0 {
            out.extend_from_slice(&self.delta.words()[l as usize].0);
        }
        Word(out)
    }

    pub fn max_piece_len(&self) -> usize {
        self.delta.words().iter().map(Word::len).max().unwrap_or(0)
    }
}

/// Names for units letters: `p, q, r, …, z`, then `b1, b2, …`.
fn units_names(n: usize) -> Vec<String> {
    const NAMES: &str = "pqrstuvwxyz";
    if n <= NAMES.len() {
        NAMES.chars().take(n).map(String::from).collect()
    } else {
        (1..=n).map(|i| format!("b{i}")).collect()
    }
}

/// Factors the relator into minimal invertible pieces.
pub fn minimal_pieces(p: &SpecialPresentation) -> Result<PieceDecomposition, AdjanError> {
    let relator = &p.relator;
    let mut closure = invertible_closure(relator);
    let pieces = loop {
        let pieces = greedy_factor(relator, &closure)?;
        let next = closure_from(closure.iter().cloned().chain(pieces.iter().cloned()));
        if next.len() == closure.len() {
            break pieces;
        }
        closure = next;
    };

    let delta = PrefixCode::new(pieces.iter().cloned())?;
    let units_alphabet = Alphabet::new(units_names(delta.len())).expect("generated names are valid");

    let mut certificate = Vec::new();
    let mut certified = true;
    for d in delta.words() {
        for l in 1..d.len() {
            if closure.contains(&Word(d.0[..l].to_vec())) {
                certified = false;
                certificate.push(format!("piece {:?} has an invertible proper prefix of length {l}", d.0));
            }
        }
    }
    for u in delta.words() {
        for v in delta.words() {
            for l in 1..u.len().min(v.len()) {
                if u.0[u.len() - l..] == v.0[..l] {
                    certified = false;
                    certificate.push(format!("pieces {:?} and {:?} overlap in {l} letters", u.0, v.0));
                }
            }
        }
    }
    if certified {
        certificate.push(format!(
            "closure of {} words is stable; {} distinct pieces, pairwise overlap-free, prefix code",
            closure.len(),
            delta.len()
        ));
    }

    Ok(PieceDecomposition { pieces, delta, units_alphabet, certified, certificate })
}

fn greedy_factor(relator: &Word, closure: &BTreeSet<Word>) -> Result<Vec<Word>, AdjanError> {
    let r = relator.as_slice();
    let mut pieces = Vec::new();
    let mut pos = 0;
    while pos < r.len() {
        let len = (1..=r.len() - pos)
            .find(|&l| closure.contains(&Word(r[pos..pos + l].to_vec())))
            .ok_or(AdjanError::Unfactorable(pos))?;
        pieces.push(Word(r[pos..pos + len].to_vec()));
        pos += len;
    }
    Ok(pieces)
}

/// A letter beginning at least two distinct pieces, with the shortlex-least such pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct C2Witness {
    pub letter: Letter,
    pub gamma: Word,
    pub delta: Word,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionReport {
    /// No piece is a proper subword of another.
    pub c1: bool,
    pub c2_witnesses: Vec<C2Witness>,
    /// Per witness letter `a`: no piece starts with `aa`.
    pub c3_by_witness: BTreeMap<Letter, bool>,
    pub chosen_a: Option<Letter>,
    /// Largest `j` with `aʲ` a prefix of some piece, for the chosen letter (0 if none).
    pub m: usize,
}

impl ConditionReport {
    pub fn c2(&self) -> bool {
        !self.c2_witnesses.is_empty()
    }

    /// C3 for the chosen letter.
    pub fn c3(&self) -> bool {
        self.chosen_a.map(|a| self.c3_by_witness[&a]).unwrap_or(false)
    }
}

pub fn check_conditions(d: &PieceDecomposition) -> ConditionReport {
    check_delta(d.delta.words())
}

/// Condition check over an explicit set of pieces.
pub fn check_delta(delta: &[Word]) -> ConditionReport {
    let c1 = delta
        .iter()
        .all(|u| delta.iter().all(|v| u == v || !u.is_subword_of(v)));

    let mut by_first: BTreeMap<Letter, BTreeSet<&Word>> = BTreeMap::new();
    for w in delta {
        if let Some(&f) = w.0.first() {
            by_first.entry(f).or_default().insert(w);
        }
    }
    let mut c2_witnesses = Vec::new();
    let mut c3_by_witness = BTreeMap::new();
    for (&letter, words) in &by_first {
        if words.len() >= 2 {
            let mut it = words.iter();
            let gamma = (*it.next().unwrap()).clone();
            let delta_w = (*it.next().unwrap()).clone();
            c2_witnesses.push(C2Witness { letter, gamma, delta: delta_w });
            let c3 = !delta.iter().any(|w| w.starts_with(&[letter, letter]));
            c3_by_witness.insert(letter, c3);
        }
    }
    let chosen_a = c2_witnesses.first().map(|w| w.letter);
    let m = chosen_a
        .map(|a| {
            delta
                .iter()
                .map(|w| w.0.iter().take_while(|&&l| l == a).count())
                .max()
                .unwrap_or(0)
        })
        .unwrap_or(0);
    ConditionReport { c1, c2_witnesses, c3_by_witness, chosen_a, m }
}

/// `< B | φ(r) = 1 >`.
pub fn units_presentation(d: &PieceDecomposition) -> SpecialPresentation {
    let relator = Word(
        d.pieces
            .iter()
            .map(|p| d.phi_letter(p).expect("every piece is in delta"))
            .collect(),
    );
    SpecialPresentation { alphabet: d.units_alphabet.clone(), relator }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructureReport {
    pub torsion_exponent: usize,
    pub torsion_root: Word,
    pub all_letters_invertible: bool,
    /// Letters not occurring in the relator; `M ≅ G ∗ C*` when every relator letter is invertible.
    pub free_product_complement: Option<BTreeSet<Letter>>,
    pub hyperbolic_units_flag: bool,
}

pub fn structure_report(p: &SpecialPresentation, d: &PieceDecomposition) -> StructureReport {
    let (torsion_root, torsion_exponent) = p.relator.primitive_root();
    let all_letters_invertible = d.max_piece_len() == 1;
    let free_product_complement = all_letters_invertible.then(|| {
        let used: BTreeSet<Letter> = p.relator.0.iter().copied().collect();
        p.alphabet.letters().filter(|l| !used.contains(l)).collect()
    });
    StructureReport {
        torsion_exponent,
        torsion_root,
        all_letters_invertible,
        free_product_complement,
        hyperbolic_units_flag: torsion_exponent >= 2,
    }
}


#[cfg(test)]
mod family_tests {
    use super::*;
    use crate::words::parse_presentation;

    fn fam(n: usize, m: usize) -> (String, String, String) {
        let p1 = format!("ab{}{}", "a".repeat(n), "b".repeat(n + 1));
        let p2 = format!("ab{}{}", "a".repeat(n + 1), "b".repeat(n + 1));
        (format!("{p1}{p2}{p1}").repeat(m), p1, p2)
    }

    #[test]
    fn two_generator_family() {
        for n in 1..=2 {
            for m in 1..=2 {
                let (r, p1, p2) = fam(n, m);
                let p = parse_presentation(&format!("< a,b | {r} = 1 >")).unwrap();
                let start = std::time::Instant::now();
                let d = minimal_pieces(&p).unwrap();
                assert!(start.elapsed().as_secs_f64() < 1.0);
                let mut want = vec![p.word(&p1).unwrap(), p.word(&p2).unwrap()];
                want.sort();
                assert_eq!(d.delta.words(), want.as_slice(), "n={n} m={m}");
                assert_eq!(d.pieces.len(), 3 * m);
                assert!(d.certified);
            }
        }
    }

    #[test]
    fn powers_keep_pieces() {
        for n in 1..=3 {
            let p = parse_presentation(&format!("< a,b,c | {} = 1 >", "abacab".repeat(n))).unwrap();
            let d = minimal_pieces(&p).unwrap();
            assert_eq!(d.delta.len(), 2);
            let p = parse_presentation(&format!("< a,b,c | {} = 1 >", "aabacbaab".repeat(n))).unwrap();
            let d = minimal_pieces(&p).unwrap();
            assert_eq!(d.delta.words(), &[p.word("aab").unwrap(), p.word("acb").unwrap()]);
        }
    }

    #[test]
    fn overlapping_candidate_pieces_split_further() {
        // aab and abbaab are invertible (relator self-overlap) and overlap in
        // `ab`, so `a` itself is invertible.
        let p = parse_presentation("< a,b | aababbaab = 1 >").unwrap();
        let c = invertible_closure(&p.relator);
        for s in ["aab", "abbaab", "ab", "a", "b"] {
            assert!(c.contains(&p.word(s).unwrap()), "{s}");
        }
        let d = minimal_pieces(&p).unwrap();
        assert_eq!(d.delta.words(), &[p.word("a").unwrap(), p.word("b").unwrap()]);
        assert!(d.certified);
    }
}
