//! Alphabets, words, shortlex order, prefix codes and the presentation text format.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Index of a symbol in its [`Alphabet`].
pub type Letter = u16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("alphabet is empty")]
    EmptyAlphabet,
    #[error("duplicate generator `{0}`")]
    DuplicateSymbol(String),
    #[error("invalid symbol `{0}`")]
    InvalidSymbol(String),
    #[error("letter index {0} is outside an alphabet of size {1}")]
    ForeignLetter(Letter, usize),
    #[error("unknown symbol in `{0}`")]
    UnknownSymbol(String),
    #[error("the set {0} is not a prefix code")]
    NotPrefixCode(String),
}

/// Presentation parse failure, positioned at a 1-based line and column.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

/// An ordered, duplicate-free list of symbols. Declaration order is the
/// letter order used by shortlex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct Alphabet {
    symbols: Vec<String>,
    #[serde(skip)]
    index: HashMap<String, Letter>,
}

impl TryFrom<Vec<String>> for Alphabet {
    type Error = WordError;
    fn try_from(v: Vec<String>) -> Result<Self, WordError> {
        Alphabet::new(v)
    }
}

impl From<Alphabet> for Vec<String> {
    fn from(a: Alphabet) -> Self {
        a.symbols
    }
}

fn reserved(c: char) -> bool {
    c.is_whitespace() || matches!(c, '<' | '>' | '|' | ',' | '=' | '.' | ';' | '#')
}

impl Alphabet {
    pub fn new<S: Into<String>>(symbols: impl IntoIterator<Item = S>) -> Result<Self, WordError> {
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        if symbols.is_empty() {
            return Err(WordError::EmptyAlphabet);
        }
        let mut index = HashMap::with_capacity(symbols.len());
        for (i, s) in symbols.iter().enumerate() {
            if s.is_empty() || s == "1" || s.chars().any(reserved) {
                return Err(WordError::InvalidSymbol(s.clone()));
            }
            if index.insert(s.clone(), i as Letter).is_some() {
                return Err(WordError::DuplicateSymbol(s.clone()));
            }
        }
        Ok(Alphabet { symbols, index })
    }

    /// Alphabet of single characters, e.g. `Alphabet::chars("abc")`.
    pub fn chars(s: &str) -> Result<Self, WordError> {
        Alphabet::new(s.chars().map(String::from))
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn symbol(&self, l: Letter) -> &str {
        &self.symbols[l as usize]
    }

    pub fn letter(&self, symbol: &str) -> Option<Letter> {
        self.index.get(symbol).copied()
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> {
        0..self.symbols.len() as Letter
    }

    fn single_chars(&self) -> bool {
        self.symbols.iter().all(|s| s.chars().count() == 1)
    }

    pub fn contains(&self, w: &Word) -> bool {
        w.0.iter().all(|&l| (l as usize) < self.len())
    }

    pub fn check(&self, w: &Word) -> Result<(), WordError> {
        match w.0.iter().find(|&&l| (l as usize) >= self.len()) {
            Some(&l) => Err(WordError::ForeignLetter(l, self.len())),
            None => Ok(()),
        }
    }

    /// Parses a word. `1` (or the empty string) is the empty word. Chunks are
    /// separated by whitespace or `.`; a chunk that is not itself a symbol is
    /// split into single-character symbols.
    pub fn parse_word(&self, text: &str) -> Result<Word, WordError> {
        let text = text.trim();
        if text.is_empty() || text == "1" {
            return Ok(Word::empty());
        }
        let mut letters = Vec::new();
        for chunk in text.split(|c: char| c.is_whitespace() || c == '.') {
            if chunk.is_empty() {
                continue;
            }
            if let Some(l) = self.letter(chunk) {
                letters.push(l);
                continue;
            }
            for c in chunk.chars() {
                let mut buf = [0u8; 4];
                match self.letter(c.encode_utf8(&mut buf)) {
                    Some(l) => letters.push(l),
                    None => return Err(WordError::UnknownSymbol(chunk.to_string())),
                }
            }
        }
        Ok(Word(letters))
    }

    /// Renders a word: juxtaposition for single-character alphabets, `.`
    /// separators otherwise, and `1` for the empty word.
    pub fn render(&self, w: &Word) -> String {
        if w.is_empty() {
            return "1".to_string();
        }
        let sep = if self.single_chars() { "" } else { "." };
        w.0.iter()
            .map(|&l| self.symbol(l))
            .collect::<Vec<_>>()
            .join(sep)
    }

    /// Shortlex comparison, rejecting words with letters outside the alphabet.
    pub fn shortlex_compare(&self, u: &Word, v: &Word) -> Result<Ordering, WordError> {
        self.check(u)?;
        self.check(v)?;
        Ok(u.cmp(v))
    }
}

/// A word over some alphabet, stored as letter indices.
///
/// `Ord` is shortlex: shorter words first, equal lengths compared
/// lexicographically by letter index (i.e. by alphabet declaration order).
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Word(pub Vec<Letter>);

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        shortlex(&self.0, &other.0)
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub fn shortlex(u: &[Letter], v: &[Letter]) -> Ordering {
    u.len().cmp(&v.len()).then_with(|| u.cmp(v))
}

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn letter(l: Letter) -> Self {
        Word(vec![l])
    }

    pub fn power_of(l: Letter, n: usize) -> Self {
        Word(vec![l; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Letter] {
        &self.0
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn pow(&self, n: usize) -> Word {
        Word(self.0.repeat(n))
    }

    pub fn starts_with(&self, p: &[Letter]) -> bool {
        self.0.starts_with(p)
    }

    pub fn is_subword_of(&self, other: &Word) -> bool {
        self.is_empty()
            || (self.len() <= other.len() && other.0.windows(self.len()).any(|w| w == self.0.as_slice()))
    }

    /// Largest `k` such that `self` is the `k`-th power of some word, with that root.
    pub fn primitive_root(&self) -> (Word, usize) {
        let n = self.len();
        if n == 0 {
            return (Word::empty(), 1);
        }
        for d in 1..=n {
            if n % d == 0 && (d..n).all(|i| self.0[i] == self.0[i - d]) {
                return (Word(self.0[..d].to_vec()), n / d);
            }
        }
        unreachable!()
    }
}

impl From<Vec<Letter>> for Word {
    fn from(v: Vec<Letter>) -> Self {
        Word(v)
    }
}

impl From<&[Letter]> for Word {
    fn from(v: &[Letter]) -> Self {
        Word(v.to_vec())
    }
}

/// A validated prefix code: no codeword is a prefix of another, so every
/// word of `code*` factors uniquely and greedily.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrefixCode {
    words: Vec<Word>,
}

impl PrefixCode {
    pub fn new(words: impl IntoIterator<Item = Word>) -> Result<Self, WordError> {
        let mut words: Vec<Word> = words.into_iter().collect();
        words.sort();
        words.dedup();
        for (i, u) in words.iter().enumerate() {
            if u.is_empty() {
                return Err(WordError::NotPrefixCode("containing the empty word".into()));
            }
            for v in &words[i + 1..] {
                if v.starts_with(&u.0) {
                    return Err(WordError::NotPrefixCode(format!("{:?} / {:?}", u.0, v.0)));
                }
            }
        }
        Ok(PrefixCode { words })
    }

    /// Codewords in shortlex order.
    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn index_of(&self, w: &[Letter]) -> Option<usize> {
        self.words.iter().position(|c| c.0 == w)
    }

    /// The codeword that is a prefix of `w`, if any (unique for a prefix code).
    pub fn codeword_prefix(&self, w: &[Letter]) -> Option<usize> {
        self.words.iter().position(|c| w.starts_with(&c.0))
    }

    /// Factorization of `w` as codeword indices, or `None` if `w` is not in `code*`.
    pub fn factor_indices(&self, w: &[Letter]) -> Option<Vec<usize>> {
        let mut out = Vec::new();
        let mut rest = w;
        while !rest.is_empty() {
            let i = self.codeword_prefix(rest)?;
            out.push(i);
            rest = &rest[self.words[i].len()..];
        }
        Some(out)
    }

    pub fn factor(&self, w: &Word) -> Option<Vec<Word>> {
        self.factor_indices(&w.0)
            .map(|ix| ix.into_iter().map(|i| self.words[i].clone()).collect())
    }

    pub fn contains_star(&self, w: &[Letter]) -> bool {
        self.factor_indices(w).is_some()
    }

    /// Ends (exclusive) of the maximal chain of codewords parsed from `w[start..]`.
    pub fn chain_ends(&self, w: &[Letter], start: usize) -> Vec<usize> {
        let mut ends = Vec::new();
        let mut pos = start;
        while let Some(i) = self.codeword_prefix(&w[pos..]) {
            pos += self.words[i].len();
            ends.push(pos);
        }
        ends
    }
}

/// Unique factorization of `w` over the prefix code `code`.
pub fn prefix_code_factor(w: &Word, code: &[Word]) -> Result<Option<Vec<Word>>, WordError> {
    let pc = PrefixCode::new(code.iter().cloned())?;
    Ok(pc.factor(w))
}

/// A special one-relator presentation `< A | relator = 1 >`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecialPresentation {
    pub alphabet: Alphabet,
    pub relator: Word,
}

impl SpecialPresentation {
    pub fn new(alphabet: Alphabet, relator: Word) -> Result<Self, WordError> {
        alphabet.check(&relator)?;
        if relator.is_empty() {
            return Err(WordError::InvalidSymbol("empty relator".into()));
        }
        Ok(SpecialPresentation { alphabet, relator })
    }

    pub fn parse(text: &str) -> Result<Self, ParseError> {
        parse_presentation(text)
    }

    pub fn render(&self) -> String {
        format!(
            "< {} | {} = 1 >",
            self.alphabet.symbols().join(","),
            self.alphabet.render(&self.relator)
        )
    }

    pub fn word(&self, text: &str) -> Result<Word, WordError> {
        self.alphabet.parse_word(text)
    }

    pub fn show(&self, w: &Word) -> String {
        self.alphabet.render(w)
    }
}

impl fmt::Display for SpecialPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

struct Cursor<'a> {
    chars: Vec<(usize, usize, char)>,
    pos: usize,
    _src: &'a str,
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str) -> Self {
        let mut chars = Vec::new();
        let mut in_comment = false;
        for (ln, line) in src.lines().enumerate() {
            for (col, c) in line.chars().enumerate() {
                if c == '#' {
                    in_comment = true;
                }
                if !in_comment {
                    chars.push((ln + 1, col + 1, c));
                }
            }
            in_comment = false;
            chars.push((ln + 1, line.chars().count() + 1, '\n'));
        }
        Cursor { chars, pos: 0, _src: src }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].2.is_whitespace() {
            self.pos += 1;
        }
    }

    fn here(&self) -> (usize, usize) {
        match self.chars.get(self.pos) {
            Some(&(l, c, _)) => (l, c),
            None => self.chars.last().map(|&(l, c, _)| (l, c + 1)).unwrap_or((1, 1)),
        }
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        let (line, column) = self.here();
        ParseError { line, column, message: msg.into() }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).map(|t| t.2)
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        match self.peek() {
            Some(x) if x == c => {
                self.pos += 1;
                Ok(())
            }
            Some(x) => Err(self.err(format!("expected `{c}`, found `{x}`"))),
            None => Err(self.err(format!("expected `{c}`, found end of input"))),
        }
    }

    /// A maximal run of non-reserved characters, after skipping whitespace.
    fn token(&mut self) -> Option<((usize, usize), String)> {
        self.skip_ws();
        let start = self.here();
        let mut s = String::new();
        while let Some(&(_, _, c)) = self.chars.get(self.pos) {
            if reserved(c) {
                break;
            }
            s.push(c);
            self.pos += 1;
        }
        if s.is_empty() {
            None
        } else {
            Some((start, s))
        }
    }
}

/// Parses `< a,b,c | word = 1 >`. Lines starting at `#` are comments.
pub fn parse_presentation(text: &str) -> Result<SpecialPresentation, ParseError> {
    let mut cur = Cursor::new(text);
    cur.expect('<')?;
    let mut gens: Vec<String> = Vec::new();
    loop {
        let Some(((line, column), tok)) = cur.token() else {
            return Err(cur.err("expected a generator"));
        };
        if tok == "1" {
            return Err(ParseError { line, column, message: "`1` cannot be a generator".into() });
        }
        if gens.contains(&tok) {
            return Err(ParseError { line, column, message: format!("duplicate generator `{tok}`") });
        }
        gens.push(tok);
        if cur.peek() == Some(',') {
            cur.pos += 1;
        } else {
            break;
        }
    }
    let alphabet = Alphabet::new(gens).map_err(|e| cur.err(e.to_string()))?;
    cur.expect('|')?;

    let mut letters = Vec::new();
    let mut saw_one = false;
    loop {
        match cur.peek() {
            Some('.') => {
                cur.pos += 1;
            }
            Some('=') | None => break,
            _ => {
                let Some(((line, column), tok)) = cur.token() else {
                    return Err(cur.err("expected a relator word"));
                };
                if tok == "1" {
                    saw_one = true;
                    continue;
                }
                match alphabet.parse_word(&tok) {
                    Ok(w) => letters.extend(w.0),
                    Err(_) => {
                        return Err(ParseError {
                            line,
                            column,
                            message: format!("unknown symbol in relator `{tok}`"),
                        })
                    }
                }
            }
        }
    }
    if letters.is_empty() {
        let msg = if saw_one { "relator must be non-empty" } else { "missing relator" };
        return Err(cur.err(msg));
    }
    if saw_one {
        return Err(cur.err("`1` cannot appear inside a non-empty relator"));
    }
    cur.expect('=')?;
    match cur.token() {
        Some((_, t)) if t == "1" => {}
        _ => return Err(cur.err("a special presentation has right-hand side `1`")),
    }
    cur.expect('>')?;
    if let Some(c) = cur.peek() {
        return Err(cur.err(format!("trailing input `{c}`")));
    }
    Ok(SpecialPresentation { alphabet, relator: Word(letters) })
}
