//! Free-group words over a finite, ordered alphabet.
//!
//! Every [`Word`] is freely reduced on construction and carries a shared
//! reference to its [`Alphabet`]. Combining words over different alphabets
//! is a hard error: the fallible entry points return
//! [`Error::AlphabetMismatch`], and the `*` operator panics.

use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::Mul;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Ordered set of generator names. Letter indices are positions in this list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    names: Vec<String>,
    lookup: HashMap<String, usize>,
}

fn valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Alphabet {
    pub fn new<I, S>(names: I) -> Result<Arc<Self>>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut out = Alphabet {
            names: Vec::new(),
            lookup: HashMap::new(),
        };
        for name in names {
            let name = name.into();
            if !valid_name(&name) {
                return Err(Error::InvalidName(name));
            }
            if out.lookup.contains_key(&name) {
                return Err(Error::DuplicateName(name));
            }
            out.lookup.insert(name.clone(), out.names.len());
            out.names.push(name);
        }
        Ok(Arc::new(out))
    }

    /// Alphabet `{prefix}1, …, {prefix}n`, used for generator and basis letters.
    pub fn numbered(prefix: &str, n: usize) -> Arc<Self> {
        Self::new((1..=n).map(|i| format!("{prefix}{i}"))).expect("numbered names are valid")
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, index: usize) -> &str {
        &self.names[index]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.lookup.get(name).copied()
    }

    /// Letter for `name`, positive.
    pub fn letter(&self, name: &str) -> Result<Letter> {
        self.index_of(name)
            .map(Letter::pos)
            .ok_or_else(|| Error::UnknownGenerator(name.to_string()))
    }
}

/// A signed generator. Ordered by index, then `+` before `−`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub index: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn pos(index: usize) -> Self {
        Letter {
            index,
            inverse: false,
        }
    }

    pub fn neg(index: usize) -> Self {
        Letter {
            index,
            inverse: true,
        }
    }

    pub fn inv(self) -> Self {
        Letter {
            index: self.index,
            inverse: !self.inverse,
        }
    }

    /// Position among the `2n` signed letters: `2·index + [inverse]`.
    pub fn slot(self) -> usize {
        2 * self.index + usize::from(self.inverse)
    }

    pub fn from_slot(slot: usize) -> Self {
        Letter {
            index: slot / 2,
            inverse: slot % 2 == 1,
        }
    }
}

/// A freely reduced word.
#[derive(Clone)]
pub struct Word {
    alphabet: Arc<Alphabet>,
    letters: Vec<Letter>,
}

fn push_reduced(out: &mut Vec<Letter>, l: Letter) {
    if out.last() == Some(&l.inv()) {
        out.pop();
    } else {
        out.push(l);
    }
}

fn same_alphabet(a: &Arc<Alphabet>, b: &Arc<Alphabet>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

impl Word {
    pub fn empty(alphabet: &Arc<Alphabet>) -> Self {
        Word {
            alphabet: alphabet.clone(),
            letters: Vec::new(),
        }
    }

    /// Freely reduces `raw`; fails if an index is outside the alphabet.
    pub fn free_reduce<I>(raw: I, alphabet: &Arc<Alphabet>) -> Result<Self>
    where
        I: IntoIterator<Item = Letter>,
    {
        let mut letters = Vec::new();
        for l in raw {
            if l.index >= alphabet.len() {
                return Err(Error::IndexOutOfRange {
                    index: l.index,
                    size: alphabet.len(),
                });
            }
            push_reduced(&mut letters, l);
        }
        Ok(Word {
            alphabet: alphabet.clone(),
            letters,
        })
    }

    /// Like [`Word::free_reduce`] for letters already known to be in range.
    pub(crate) fn reduce_trusted<I>(raw: I, alphabet: &Arc<Alphabet>) -> Self
    where
        I: IntoIterator<Item = Letter>,
    {
        let mut letters = Vec::new();
        for l in raw {
            debug_assert!(l.index < alphabet.len());
            push_reduced(&mut letters, l);
        }
        Word {
            alphabet: alphabet.clone(),
            letters,
        }
    }

    pub fn generator(alphabet: &Arc<Alphabet>, index: usize) -> Result<Self> {
        Self::free_reduce([Letter::pos(index)], alphabet)
    }

    /// Parses the textual syntax: whitespace-separated `name` or `name^k`
    /// tokens (`k` a nonzero integer). The empty string and `1` denote the
    /// identity.
    pub fn parse(text: &str, alphabet: &Arc<Alphabet>) -> Result<Self> {
        let mut letters = Vec::new();
        let mut offset = 0;
        for token in text.split_whitespace() {
            let column = text[offset..].find(token).map(|p| p + offset).unwrap_or(offset) + 1;
            offset = column - 1 + token.len();
            if token == "1" {
                continue;
            }
            let (name, exp) = match token.split_once('^') {
                Some((name, exp)) => {
                    let k: i64 = exp.parse().map_err(|_| {
                        Error::syntax(1, column + name.len() + 1, format!("bad exponent `{exp}`"))
                    })?;
                    if k == 0 {
                        return Err(Error::syntax(
                            1,
                            column + name.len() + 1,
                            "exponent must be nonzero",
                        ));
                    }
                    (name, k)
                }
                None => (token, 1),
            };
            let index = alphabet.index_of(name).ok_or_else(|| {
                Error::syntax(1, column, format!("unknown generator `{name}`"))
            })?;
            let l = if exp > 0 {
                Letter::pos(index)
            } else {
                Letter::neg(index)
            };
            for _ in 0..exp.unsigned_abs() {
                letters.push(l);
            }
        }
        Self::free_reduce(letters, alphabet)
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn first(&self) -> Option<Letter> {
        self.letters.first().copied()
    }

    pub fn last(&self) -> Option<Letter> {
        self.letters.last().copied()
    }

    pub fn same_alphabet(&self, other: &Word) -> bool {
        same_alphabet(&self.alphabet, &other.alphabet)
    }

    pub fn concat(&self, other: &Word) -> Result<Word> {
        if !self.same_alphabet(other) {
            return Err(Error::AlphabetMismatch);
        }
        let mut letters = self.letters.clone();
        for &l in &other.letters {
            push_reduced(&mut letters, l);
        }
        Ok(Word {
            alphabet: self.alphabet.clone(),
            letters,
        })
    }

    pub fn invert(&self) -> Word {
        Word {
            alphabet: self.alphabet.clone(),
            letters: self.letters.iter().rev().map(|l| l.inv()).collect(),
        }
    }

    /// `k`-th power; negative `k` powers the inverse.
    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.invert() } else { self.clone() };
        let mut out = Word::empty(&self.alphabet);
        for _ in 0..k.unsigned_abs() {
            out = &out * &base;
        }
        out
    }

    /// `z⁻¹ · self · z`.
    pub fn conjugate_by(&self, z: &Word) -> Word {
        &(&z.invert() * self) * z
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.first(), self.last()) {
            (Some(f), Some(l)) => self.len() == 1 || f != l.inv(),
            _ => true,
        }
    }

    /// Returns `(core, conjugator)` with `self = conjugator · core · conjugator⁻¹`
    /// and `core` cyclically reduced.
    pub fn cyclic_reduce(&self) -> (Word, Word) {
        let n = self.letters.len();
        let mut k = 0;
        while 2 * k + 1 < n && self.letters[k] == self.letters[n - 1 - k].inv() {
            k += 1;
        }
        let core = Word {
            alphabet: self.alphabet.clone(),
            letters: self.letters[k..n - k].to_vec(),
        };
        let conjugator = Word {
            alphabet: self.alphabet.clone(),
            letters: self.letters[..k].to_vec(),
        };
        (core, conjugator)
    }

    /// Cyclic rotation starting at position `k` (the word must be cyclically
    /// reduced for the result to stay reduced).
    pub fn rotate(&self, k: usize) -> Word {
        let mut letters = self.letters[k..].to_vec();
        letters.extend_from_slice(&self.letters[..k]);
        Word::reduce_trusted(letters, &self.alphabet)
    }

    /// Start index of the lexicographically least rotation (letter order).
    pub fn least_rotation_index(&self) -> usize {
        let s = &self.letters;
        let n = s.len();
        if n == 0 {
            return 0;
        }
        // Booth's algorithm on the doubled sequence.
        let at = |i: usize| s[i % n];
        let mut f: Vec<isize> = vec![-1; 2 * n];
        let mut k: usize = 0;
        for j in 1..2 * n {
            let sj = at(j);
            let mut i = f[j - k - 1];
            while i != -1 && sj != at(k + i as usize + 1) {
                if sj < at(k + i as usize + 1) {
                    k = j - i as usize - 1;
                }
                i = f[i as usize];
            }
            if sj != at(k + (i + 1) as usize) {
                if sj < at(k) {
                    k = j;
                }
                f[j - k] = -1;
            } else {
                f[j - k] = i + 1;
            }
        }
        k % n
    }

    /// Canonical representative of the cyclic word: the least rotation of the
    /// cyclic reduction.
    pub fn cyclic_canonical(&self) -> Word {
        let (core, _) = self.cyclic_reduce();
        let k = core.least_rotation_index();
        core.rotate(k)
    }

    /// Homomorphic image under `table[i]` = image of generator `i`.
    pub fn substitute(&self, table: &[Word], target: &Arc<Alphabet>) -> Word {
        assert_eq!(table.len(), self.alphabet.len(), "substitution table must be total");
        let mut letters = Vec::new();
        for l in &self.letters {
            let image = &table[l.index];
            debug_assert!(same_alphabet(image.alphabet(), target));
            if l.inverse {
                for &m in image.letters.iter().rev() {
                    push_reduced(&mut letters, m.inv());
                }
            } else {
                for &m in &image.letters {
                    push_reduced(&mut letters, m);
                }
            }
        }
        Word {
            alphabet: target.clone(),
            letters,
        }
    }

    /// Re-indexes every letter into `target` via `index_map`.
    pub fn relabel(&self, target: &Arc<Alphabet>, index_map: impl Fn(usize) -> usize) -> Word {
        Word::reduce_trusted(
            self.letters.iter().map(|l| Letter {
                index: index_map(l.index),
                inverse: l.inverse,
            }),
            target,
        )
    }
}

/// Conjugator `z` with `z⁻¹ u z = v` in the free group, if one exists.
pub fn free_conjugacy(u: &Word, v: &Word) -> Result<Option<Word>> {
    if !u.same_alphabet(v) {
        return Err(Error::AlphabetMismatch);
    }
    let (core_u, conj_u) = u.cyclic_reduce();
    let (core_v, conj_v) = v.cyclic_reduce();
    if core_u.len() != core_v.len() {
        return Ok(None);
    }
    if core_u.is_empty() {
        // both trivial
        return Ok(Some(Word::empty(u.alphabet())));
    }
    let ku = core_u.least_rotation_index();
    let kv = core_v.least_rotation_index();
    if core_u.rotate(ku).letters != core_v.rotate(kv).letters {
        return Ok(None);
    }
    // core_v = rotate(core_u, j): core_u = αβ, core_v = βα, α = core_u[..j]
    let n = core_u.len();
    let j = (ku + n - kv) % n;
    let alpha = Word::reduce_trusted(core_u.letters[..j].iter().copied(), u.alphabet());
    let z = &(&conj_u * &alpha) * &conj_v.invert();
    debug_assert_eq!(&u.conjugate_by(&z), v);
    Ok(Some(z))
}

impl<'a> Mul<&'a Word> for &'a Word {
    type Output = Word;

    /// Free product of two words. Panics on alphabet mismatch; use
    /// [`Word::concat`] for the fallible form.
    fn mul(self, rhs: &'a Word) -> Word {
        self.concat(rhs).expect("word alphabets differ")
    }
}

impl PartialEq for Word {
    fn eq(&self, other: &Self) -> bool {
        self.letters == other.letters && self.same_alphabet(other)
    }
}

impl Eq for Word {}

impl Hash for Word {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.letters.hash(state);
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Shortlex on letters.
impl Ord for Word {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.letters.cmp(&other.letters))
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

/// Renders runs as `name^k`; the identity prints as `1`.
impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("1");
        }
        let mut first = true;
        let mut i = 0;
        while i < self.letters.len() {
            let l = self.letters[i];
            let mut j = i;
            while j < self.letters.len() && self.letters[j] == l {
                j += 1;
            }
            let run = (j - i) as i64;
            let exp = if l.inverse { -run } else { run };
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            let name = self.alphabet.name(l.index);
            if exp == 1 {
                write!(f, "{name}")?;
            } else {
                write!(f, "{name}^{exp}")?;
            }
            i = j;
        }
        Ok(())
    }
}
