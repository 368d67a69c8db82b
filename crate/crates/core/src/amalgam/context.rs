use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::stallings::{GeneratingTuple, NormalizerData};
use crate::words::{Alphabet, Letter, Word};

/// Which free factor a word lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Side {
    A,
    B,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::A => Side::B,
            Side::B => Side::A,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::A => "A",
            Side::B => "B",
        })
    }
}

/// A nonempty word in one factor.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Syllable {
    pub side: Side,
    pub word: Word,
}

/// Everything precomputed about `C` inside one factor.
#[derive(Debug, Clone)]
pub struct FactorData {
    pub alphabet: Arc<Alphabet>,
    /// `C` on this side, built from the paired generators.
    pub c: GeneratingTuple,
    /// Image on the other side of each basis element of `c`.
    pub basis_image: Vec<Word>,
    pub normalizer: NormalizerData,
    pub malnormal: bool,
}

/// Validated presentation of `A ∗_C B` with `A = F(X)`, `B = F(Y)` and `C`
/// given by generator pairs `u_i = v_i`.
#[derive(Debug, Clone)]
pub struct AmalgamContext {
    union: Arc<Alphabet>,
    pairs: Vec<(Word, Word)>,
    a: FactorData,
    b: FactorData,
}

fn invalid(index: Option<usize>, reason: impl Into<String>) -> Error {
    Error::InvalidPresentation {
        index,
        reason: reason.into(),
    }
}

impl AmalgamContext {
    pub fn new(x: &Arc<Alphabet>, y: &Arc<Alphabet>, pairs: Vec<(Word, Word)>) -> Result<Self> {
        for name in x.names() {
            if y.index_of(name).is_some() {
                return Err(invalid(None, format!("generator `{name}` appears in both factors")));
            }
        }
        if pairs.is_empty() {
            return Err(invalid(None, "no generator pairs"));
        }
        for (i, (u, v)) in pairs.iter().enumerate() {
            if **u.alphabet() != **x || **v.alphabet() != **y {
                return Err(invalid(Some(i), "pair sides use the wrong alphabets"));
            }
            if u.is_empty() || v.is_empty() {
                return Err(invalid(Some(i), "trivial generator"));
            }
        }
        let us: Vec<Word> = pairs.iter().map(|(u, _)| u.clone()).collect();
        let vs: Vec<Word> = pairs.iter().map(|(_, v)| v.clone()).collect();
        let ca = GeneratingTuple::build(x, &us)?;
        let cb = GeneratingTuple::build(y, &vs)?;

        // a homomorphism defined on a free basis is always well defined;
        // only the generator equations need checking
        let image = |from: &GeneratingTuple, targets: &[Word], alphabet: &Arc<Alphabet>| -> Result<Vec<Word>> {
            from.basis()
                .iter()
                .map(|b| Ok(from.express_in_generators(b)?.substitute(targets, alphabet)))
                .collect()
        };
        let phi = image(&ca, &vs, y)?;
        let psi = image(&cb, &us, x)?;
        for (i, (u, v)) in pairs.iter().enumerate() {
            if ca.express_in_basis(u)?.substitute(&phi, y) != *v {
                return Err(invalid(Some(i), format!("the pairing does not define an isomorphism: {u} is not sent to {v}")));
            }
            if cb.express_in_basis(v)?.substitute(&psi, x) != *u {
                return Err(invalid(Some(i), format!("the pairing does not define an isomorphism: {v} is not sent to {u}")));
            }
        }

        let factor = |alphabet: &Arc<Alphabet>, c: GeneratingTuple, basis_image: Vec<Word>| -> Result<FactorData> {
            let normalizer = c.normalizer_data()?;
            let malnormal = normalizer.transversal.len() == 1;
            Ok(FactorData {
                alphabet: alphabet.clone(),
                c,
                basis_image,
                normalizer,
                malnormal,
            })
        };
        let union = Alphabet::new(x.names().iter().chain(y.names()).cloned())?;
        Ok(AmalgamContext {
            union,
            pairs,
            a: factor(x, ca, phi)?,
            b: factor(y, cb, psi)?,
        })
    }

    /// Alphabet `X ∪ Y`, with the letters of `X` first.
    pub fn union_alphabet(&self) -> &Arc<Alphabet> {
        &self.union
    }

    pub fn pairs(&self) -> &[(Word, Word)] {
        &self.pairs
    }

    pub fn factor(&self, side: Side) -> &FactorData {
        match side {
            Side::A => &self.a,
            Side::B => &self.b,
        }
    }

    pub fn alphabet(&self, side: Side) -> &Arc<Alphabet> {
        &self.factor(side).alphabet
    }

    pub fn c(&self, side: Side) -> &GeneratingTuple {
        &self.factor(side).c
    }

    pub fn is_malnormal(&self, side: Side) -> bool {
        self.factor(side).malnormal
    }

    pub fn in_c(&self, side: Side, w: &Word) -> bool {
        self.c(side).contains(w)
    }

    /// Image under `φ` (from `A`) or `ψ` (from `B`) of an element of `C`.
    pub fn transfer_word(&self, from: Side, w: &Word) -> Result<Word> {
        let f = self.factor(from);
        let other = self.alphabet(from.other());
        Ok(f.c.express_in_basis(w)?.substitute(&f.basis_image, other))
    }

    /// Moves an element of `C` to `to`, transferring only if needed.
    pub fn move_c(&self, from: Side, to: Side, w: &Word) -> Result<Word> {
        if from == to {
            Ok(w.clone())
        } else {
            self.transfer_word(from, w)
        }
    }

    fn offset(&self, side: Side) -> usize {
        match side {
            Side::A => 0,
            Side::B => self.a.alphabet.len(),
        }
    }

    pub fn side_of(&self, l: Letter) -> Side {
        if l.index < self.a.alphabet.len() {
            Side::A
        } else {
            Side::B
        }
    }

    /// A factor word as a word over `X ∪ Y`.
    pub fn embed(&self, side: Side, w: &Word) -> Word {
        let off = self.offset(side);
        w.relabel(&self.union, |i| i + off)
    }

    pub fn embed_syllables(&self, syllables: &[Syllable]) -> Word {
        let mut out = Word::empty(&self.union);
        for s in syllables {
            out = &out * &self.embed(s.side, &s.word);
        }
        out
    }

    /// Splits a word over `X ∪ Y` into maximal single-factor blocks.
    pub fn syllables(&self, raw: &Word) -> Result<Vec<Syllable>> {
        if **raw.alphabet() != *self.union {
            return Err(Error::AlphabetMismatch);
        }
        let mut out: Vec<Syllable> = Vec::new();
        let mut start = 0;
        let letters = raw.letters();
        while start < letters.len() {
            let side = self.side_of(letters[start]);
            let mut end = start;
            while end < letters.len() && self.side_of(letters[end]) == side {
                end += 1;
            }
            let off = self.offset(side);
            let word = Word::reduce_trusted(
                letters[start..end].iter().map(|l| Letter {
                    index: l.index - off,
                    inverse: l.inverse,
                }),
                self.alphabet(side),
            );
            out.push(Syllable { side, word });
            start = end;
        }
        Ok(out)
    }

    pub fn parse_word(&self, text: &str) -> Result<Word> {
        Word::parse(text, &self.union)
    }

    pub fn parse_factor_word(&self, side: Side, text: &str) -> Result<Word> {
        Word::parse(text, self.alphabet(side))
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn context(a: &[&str], b: &[&str], pairs: &[(&str, &str)]) -> Result<AmalgamContext> {
        let x = Alphabet::new(a.iter().copied())?;
        let y = Alphabet::new(b.iter().copied())?;
        let pairs = pairs
            .iter()
            .map(|(u, v)| Ok((Word::parse(u, &x)?, Word::parse(v, &y)?)))
            .collect::<Result<Vec<_>>>()?;
        AmalgamContext::new(&x, &y, pairs)
    }

    /// `A = F(a,b,d)`, `B = F(x,y,z)`, `a^p = x`, `b = y^p`.
    pub(crate) fn example_one(p: i64) -> AmalgamContext {
        let ap = format!("a^{p}");
        let yp = format!("y^{p}");
        context(&["a", "b", "d"], &["x", "y", "z"], &[(&ap, "x"), ("b", &yp)]).unwrap()
    }

    #[test]
    fn accepts_valid_pairings() {
        let ctx = example_one(2);
        assert_eq!(ctx.c(Side::A).rank(), 2);
        assert!(!ctx.is_malnormal(Side::A));
        assert!(!ctx.is_malnormal(Side::B));
        assert!(context(&["a", "b", "d"], &["x", "y", "z"], &[("a b", "x"), ("b", "y")]).is_ok());
    }

    #[test]
    fn rejects_bad_pairings() {
        let err = context(&["a", "b", "d"], &["x", "y", "z"], &[("a", "x"), ("a", "y")]).unwrap_err();
        assert!(matches!(err, Error::InvalidPresentation { index: Some(1), .. }), "{err}");
        let err = context(&["a", "b"], &["a", "y"], &[("a", "y")]).unwrap_err();
        assert!(matches!(err, Error::InvalidPresentation { index: None, .. }));
        // a ↦ x², b ↦ x³ is not injective
        let err = context(&["a", "b"], &["x"], &[("a", "x^2"), ("b", "x^3")]).unwrap_err();
        assert!(matches!(err, Error::InvalidPresentation { .. }));
        assert!(context(&["a"], &["x"], &[]).is_err());
    }

    #[test]
    fn transfers_between_sides() {
        let ctx = example_one(2);
        let a = |s| ctx.parse_factor_word(Side::A, s).unwrap();
        let b = |s| ctx.parse_factor_word(Side::B, s).unwrap();
        assert_eq!(ctx.transfer_word(Side::A, &a("a^2 b")).unwrap(), b("x y^2"));
        assert_eq!(ctx.transfer_word(Side::B, &b("y^-4 x")).unwrap(), a("b^-2 a^2"));
        assert_eq!(ctx.transfer_word(Side::A, &a("a")), Err(Error::NotAMember));
    }

    #[test]
    fn syllable_decomposition() {
        let ctx = example_one(2);
        let s = ctx.syllables(&ctx.parse_word("a x b").unwrap()).unwrap();
        let sides: Vec<Side> = s.iter().map(|s| s.side).collect();
        assert_eq!(sides, vec![Side::A, Side::B, Side::A]);
        assert_eq!(s[1].word, ctx.parse_factor_word(Side::B, "x").unwrap());
        let s = ctx.syllables(&ctx.parse_word("a b^-1").unwrap()).unwrap();
        assert_eq!(s.len(), 1);
        assert!(ctx.syllables(&ctx.parse_word("").unwrap()).unwrap().is_empty());
        let w = ctx.parse_word("z d x a^-1 y").unwrap();
        assert_eq!(ctx.embed_syllables(&ctx.syllables(&w).unwrap()), w);
    }
}
