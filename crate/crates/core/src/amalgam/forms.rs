use std::collections::VecDeque;
use std::fmt;

use crate::error::{Error, Result};
use crate::words::{Letter, Word};

use super::context::{AmalgamContext, Side, Syllable};

/// Choice of coset representatives of `C` in each factor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RepPolicy {
    /// Shortest representatives, read off the geodesic tree.
    Canonical,
    /// Canonical, except that the coset of `d·a^k` (`k ≡ 0 mod p`) is
    /// represented by `b^{-k}·d·a^k`, and that of `z·y^k` by `x^{-k}·z·y^k`.
    /// Only valid for `A = F(a,b,d)`, `B = F(x,y,z)`, `a^p = x`, `b = y^p`.
    PaperExampleOne(ExampleOneReps),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExampleOneReps {
    p: i64,
}

// letter positions fixed by the validated presentation
const A_LETTER: usize = 0;
const B_LETTER: usize = 1;
const D_LETTER: usize = 2;

impl RepPolicy {
    pub fn paper_example_one(ctx: &AmalgamContext, p: i64) -> Result<RepPolicy> {
        if p < 2 {
            return Err(Error::InvalidPolicy(format!("p must be at least 2, got {p}")));
        }
        let wrong = || Error::InvalidPolicy("presentation is not A: a b d, B: x y z, C: a^p = x, C: b = y^p".into());
        if ctx.alphabet(Side::A).names() != ["a", "b", "d"] || ctx.alphabet(Side::B).names() != ["x", "y", "z"] {
            return Err(wrong());
        }
        let mut expected = vec![
            (format!("a^{p}"), "x".to_string()),
            ("b".to_string(), format!("y^{p}")),
        ];
        let mut actual: Vec<(String, String)> =
            ctx.pairs().iter().map(|(u, v)| (u.to_string(), v.to_string())).collect();
        expected.sort();
        actual.sort();
        if expected != actual {
            return Err(wrong());
        }
        Ok(RepPolicy::PaperExampleOne(ExampleOneReps { p }))
    }

    /// Parses `canonical`, `paper-ex1:P`, or `paper-ex1` with `P` read off the pair `a^P = x`.
    pub fn parse(ctx: &AmalgamContext, text: &str) -> Result<RepPolicy> {
        if text == "canonical" {
            return Ok(RepPolicy::Canonical);
        }
        if text == "paper-ex1" {
            let p = ctx
                .pairs()
                .iter()
                .find(|(_, v)| v.to_string() == "x")
                .map(|(u, _)| u.len() as i64)
                .ok_or_else(|| Error::InvalidPolicy("presentation has no pair `a^p = x`".into()))?;
            return RepPolicy::paper_example_one(ctx, p);
        }
        if let Some(p) = text.strip_prefix("paper-ex1:") {
            let p = p
                .parse::<i64>()
                .map_err(|_| Error::InvalidPolicy(format!("bad parameter in `{text}`")))?;
            return RepPolicy::paper_example_one(ctx, p);
        }
        Err(Error::InvalidPolicy(format!("unknown policy `{text}`")))
    }

    pub fn name(&self) -> String {
        match self {
            RepPolicy::Canonical => "canonical".into(),
            RepPolicy::PaperExampleOne(r) => format!("paper-ex1:{}", r.p),
        }
    }

    /// Writes `w = c · rep` with `c ∈ C` and `rep` the chosen representative.
    pub fn decompose(&self, ctx: &AmalgamContext, side: Side, w: &Word) -> (Word, Word) {
        let (rep, head) = ctx.c(side).coset_rep(w);
        let RepPolicy::PaperExampleOne(ExampleOneReps { p }) = self else {
            return (head, rep);
        };
        // A side: d a^k ↦ b^{-k} d a^k;  B side: z y^k ↦ x^{-k} z y^k
        let (lead, tail, shift) = match side {
            Side::A => (D_LETTER, A_LETTER, B_LETTER),
            Side::B => (D_LETTER, B_LETTER, A_LETTER),
        };
        let letters = rep.letters();
        if letters.first() != Some(&Letter::pos(lead)) {
            return (head, rep);
        }
        let rest = &letters[1..];
        let k = if rest.iter().all(|&l| l == Letter::pos(tail)) {
            rest.len() as i64
        } else if rest.iter().all(|&l| l == Letter::neg(tail)) {
            -(rest.len() as i64)
        } else {
            return (head, rep);
        };
        if k % p != 0 {
            return (head, rep);
        }
        let alphabet = ctx.alphabet(side);
        let g = |i: usize| Word::reduce_trusted([Letter::pos(i)], alphabet);
        let special = &(&g(shift).pow(-k) * &g(lead)) * &g(tail).pow(k);
        let c = w * &special.invert();
        debug_assert!(ctx.in_c(side, &c));
        (c, special)
    }
}

/// `head · g₁ ⋯ g_n` with alternating factors. For a normal form every `g_i`
/// is a representative of its coset; for a reduced form it is merely outside `C`.
/// The head lives on the side of `g₁`, or on `A` when there are no syllables.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NormalForm {
    pub head_side: Side,
    pub head: Word,
    pub syllables: Vec<Syllable>,
}

pub type ReducedForm = NormalForm;

impl NormalForm {
    pub fn identity(ctx: &AmalgamContext) -> Self {
        NormalForm {
            head_side: Side::A,
            head: Word::empty(ctx.alphabet(Side::A)),
            syllables: Vec::new(),
        }
    }

    /// Syllable length `l(g)`.
    pub fn len(&self) -> usize {
        self.syllables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.syllables.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.syllables.is_empty() && self.head.is_empty()
    }

    pub fn sides(&self) -> Vec<Side> {
        self.syllables.iter().map(|s| s.side).collect()
    }

    /// Word over `X ∪ Y` spelling the element.
    pub fn to_word(&self, ctx: &AmalgamContext) -> Word {
        &ctx.embed(self.head_side, &self.head) * &ctx.embed_syllables(&self.syllables)
    }

    /// For `l ≤ 1`: the element as a word in its factor.
    pub fn factor_element(&self, ctx: &AmalgamContext) -> Option<(Side, Word)> {
        match self.syllables.as_slice() {
            [] => Some((self.head_side, self.head.clone())),
            [g] => {
                let head = ctx.move_c(self.head_side, g.side, &self.head).ok()?;
                Some((g.side, &head * &g.word))
            }
            _ => None,
        }
    }

    /// The head written on `side`.
    pub fn head_on(&self, ctx: &AmalgamContext, side: Side) -> Result<Word> {
        ctx.move_c(self.head_side, side, &self.head)
    }
}

impl fmt::Display for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}: {}]", self.head_side, self.head)?;
        for s in &self.syllables {
            write!(f, " [{}: {}]", s.side, s.word)?;
        }
        Ok(())
    }
}

/// Merges adjacent syllables of the same factor and drops empty ones.
fn tidy(syllables: Vec<Syllable>) -> Vec<Syllable> {
    let mut out: Vec<Syllable> = Vec::with_capacity(syllables.len());
    for s in syllables {
        if s.word.is_empty() {
            continue;
        }
        match out.last_mut() {
            Some(last) if last.side == s.side => {
                last.word = &last.word * &s.word;
                if last.word.is_empty() {
                    out.pop();
                }
            }
            _ => out.push(s),
        }
    }
    out
}

/// Repeatedly replaces a syllable lying in `C` by its image in the other
/// factor and merges it into its neighbours, until no syllable lies in `C`.
pub fn reduced_form(ctx: &AmalgamContext, syllables: Vec<Syllable>) -> Result<ReducedForm> {
    let mut syl = tidy(syllables);
    while let Some(i) = syl.iter().position(|s| ctx.in_c(s.side, &s.word)) {
        let s = &syl[i];
        let other = s.side.other();
        let image = ctx.transfer_word(s.side, &s.word)?;
        if syl.len() == 1 {
            return Ok(NormalForm {
                head_side: other,
                head: image,
                syllables: Vec::new(),
            });
        }
        syl[i] = Syllable {
            side: other,
            word: image,
        };
        syl = tidy(syl);
    }
    let head_side = syl.first().map_or(Side::A, |s| s.side);
    Ok(NormalForm {
        head_side,
        head: Word::empty(ctx.alphabet(head_side)),
        syllables: syl,
    })
}

pub fn normal_form(ctx: &AmalgamContext, raw: &Word, policy: &RepPolicy) -> Result<NormalForm> {
    Ok(normal_form_traced(ctx, raw, policy)?.0)
}

/// Right-to-left sweep: split off each syllable's `C`-part and push it into
/// the syllable on its left, re-merging representatives that end up adjacent
/// in the same factor. The trace lists `|c|` for every split of a syllable
/// taken from the unprocessed prefix, measured in that syllable's factor.
pub fn normal_form_traced(ctx: &AmalgamContext, raw: &Word, policy: &RepPolicy) -> Result<(NormalForm, Vec<usize>)> {
    let mut prefix = ctx.syllables(raw)?;
    let mut suffix: VecDeque<Syllable> = VecDeque::new();
    let mut head: Option<(Side, Word)> = None;
    let mut trace = Vec::with_capacity(prefix.len());

    fn absorb(
        ctx: &AmalgamContext,
        prefix: &mut [Syllable],
        head: &mut Option<(Side, Word)>,
        side: Side,
        c: Word,
    ) -> Result<()> {
        if c.is_empty() {
            return Ok(());
        }
        match prefix.last_mut() {
            Some(prev) => {
                let image = ctx.move_c(side, prev.side, &c)?;
                prev.word = &prev.word * &image;
            }
            None => {
                *head = Some(match head.take() {
                    None => (side, c),
                    Some((hs, h)) => {
                        let c = ctx.move_c(side, hs, &c)?;
                        (hs, &h * &c)
                    }
                });
            }
        }
        Ok(())
    }

    while let Some(last) = prefix.pop() {
        let side = last.side;
        let (c, u) = policy.decompose(ctx, side, &last.word);
        trace.push(c.len());
        absorb(ctx, &mut prefix, &mut head, side, c)?;
        if u.is_empty() {
            continue;
        }
        match suffix.front() {
            Some(front) if front.side == side => {
                let front = suffix.pop_front().expect("front exists");
                let (c2, u2) = policy.decompose(ctx, side, &(&u * &front.word));
                absorb(ctx, &mut prefix, &mut head, side, c2)?;
                if !u2.is_empty() {
                    suffix.push_front(Syllable { side, word: u2 });
                }
            }
            _ => suffix.push_front(Syllable { side, word: u }),
        }
    }

    let syllables: Vec<Syllable> = suffix.into();
    let head_side = syllables.first().map_or(Side::A, |s| s.side);
    let head = match head {
        None => Word::empty(ctx.alphabet(head_side)),
        Some((s, h)) => ctx.move_c(s, head_side, &h)?,
    };
    Ok((
        NormalForm {
            head_side,
            head,
            syllables,
        },
        trace,
    ))
}

/// `g = conjugator · form · conjugator⁻¹` in `G`, with `conjugator` a word
/// over `X ∪ Y`. `complete` is false when the form has length one and the
/// factor-conjugacy step was skipped, so it may still be conjugate into `C`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclicForm {
    pub form: NormalForm,
    pub conjugator: Word,
    pub complete: bool,
}

impl CyclicForm {
    /// Cyclic length `l₀`, meaningful when `complete`.
    pub fn len(&self) -> usize {
        self.form.len()
    }

    pub fn is_empty(&self) -> bool {
        self.form.is_empty()
    }
}

/// Conjugates by last syllables until the first and last factors differ;
/// with `allow_cmsp`, additionally conjugates a length-one result into `C`
/// when possible.
pub fn cyclic_form(ctx: &AmalgamContext, raw: &Word, policy: &RepPolicy, allow_cmsp: bool) -> Result<CyclicForm> {
    let mut nf = normal_form(ctx, raw, policy)?;
    let mut conj = Word::empty(ctx.union_alphabet());
    while nf.len() >= 2 && nf.syllables[0].side == nf.syllables[nf.len() - 1].side {
        let last = nf.syllables.last().expect("nonempty");
        let gk = ctx.embed(last.side, &last.word);
        conj = &conj * &gk.invert();
        nf = normal_form(ctx, &(&(&gk * &nf.to_word(ctx)) * &gk.invert()), policy)?;
    }
    let form = CyclicForm {
        form: nf,
        conjugator: conj,
        complete: true,
    };
    if form.len() == 1 {
        if allow_cmsp {
            return Ok(conjugate_into_c(ctx, form));
        }
        return Ok(CyclicForm { complete: false, ..form });
    }
    Ok(form)
}

/// Finishes a length-one cyclic form: moves it into `C` if it is conjugate
/// into `C` inside its factor.
pub fn conjugate_into_c(ctx: &AmalgamContext, cf: CyclicForm) -> CyclicForm {
    let Some((side, w)) = cf.form.factor_element(ctx) else {
        return cf;
    };
    if cf.form.len() != 1 {
        return CyclicForm { complete: true, ..cf };
    }
    match ctx.c(side).conjugacy_into(&w) {
        Some((h, z)) => {
            let head = ctx.move_c(side, Side::A, &h).expect("conjugacy_into returns members of C");
            CyclicForm {
                form: NormalForm {
                    head_side: Side::A,
                    head,
                    syllables: Vec::new(),
                },
                conjugator: &cf.conjugator * &ctx.embed(side, &z.invert()),
                complete: true,
            }
        }
        None => CyclicForm { complete: true, ..cf },
    }
}

/// `π_j(g) = g_{j+1} ⋯ g_k · c · g₁ ⋯ g_j` in normal form, together with the
/// prefix `P_j = c g₁ ⋯ g_j`, so that `π_j = P_j⁻¹ g P_j`.
pub fn cyclic_permutation(
    ctx: &AmalgamContext,
    g: &NormalForm,
    j: usize,
    policy: &RepPolicy,
) -> Result<(NormalForm, Word)> {
    let prefix = &ctx.embed(g.head_side, &g.head) * &ctx.embed_syllables(&g.syllables[..j]);
    let word = g.to_word(ctx).conjugate_by(&prefix);
    Ok((normal_form(ctx, &word, policy)?, prefix))
}
