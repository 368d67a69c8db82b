use std::collections::HashMap;
use std::fmt;

use crate::error::Result;
use crate::words::{free_conjugacy, Letter, Word};

use super::context::{AmalgamContext, Side};
use super::forms::{cyclic_form, cyclic_permutation, normal_form, CyclicForm, NormalForm, RepPolicy};
use super::regular::classify_normal_form;
use super::systems::{principal_system_solve, propagate};
use crate::cosetalg::{cardinality, Cardinality};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConjugacyOutcome {
    /// `z` over `X ∪ Y` with `z⁻¹ u z = v` in `G`.
    Conjugate(Word),
    NotConjugate(NotConjugateReason),
    Undecided(UndecidedReason),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NotConjugateReason {
    CyclicLengthsDiffer { u: usize, v: usize },
    DifferentFactors,
    NotConjugateInFactor,
    NoMatchingPermutation,
    NotConjugateInC,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UndecidedReason {
    /// Cyclic length at least two and no cyclic permutation of either side is regular.
    NoRegularPermutation,
    /// Both lie in conjugates of `C`, both singular, and `C` is malnormal in neither factor.
    SingularInC,
}

impl fmt::Display for NotConjugateReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NotConjugateReason::CyclicLengthsDiffer { u, v } => {
                write!(f, "cyclically reduced lengths differ ({u} and {v})")
            }
            NotConjugateReason::DifferentFactors => f.write_str("cyclically reduced forms lie in different factors"),
            NotConjugateReason::NotConjugateInFactor => {
                f.write_str("cyclically reduced forms are not conjugate in their factor")
            }
            NotConjugateReason::NoMatchingPermutation => {
                f.write_str("no cyclic permutation is conjugate to the regular form by an element of C")
            }
            NotConjugateReason::NotConjugateInC => f.write_str("regular elements of C that are not conjugate in C"),
        }
    }
}

impl fmt::Display for UndecidedReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UndecidedReason::NoRegularPermutation => {
                f.write_str("no cyclic permutation of either element is regular")
            }
            UndecidedReason::SingularInC => {
                f.write_str("both elements are conjugate into C and singular, and C is malnormal in neither factor")
            }
        }
    }
}

/// A regular cyclic permutation `g = P⁻¹ · form · P` of a cyclic form of length ≥ 2.
fn regular_permutation(ctx: &AmalgamContext, cf: &CyclicForm) -> Result<Option<(NormalForm, Word)>> {
    for j in 0..cf.len() {
        let (perm, prefix) = cyclic_permutation(ctx, &cf.form, j, &RepPolicy::Canonical)?;
        let report = classify_normal_form(ctx, perm)?;
        if report.is_regular() {
            return Ok(Some((report.normal_form, prefix)));
        }
    }
    Ok(None)
}

/// Searches `c ∈ C` and a cyclic permutation `h = Q⁻¹ f Q` of `f` with
/// `h = c⁻¹ g c`, for `g` regular; returns `c · Q⁻¹` as a word over `X ∪ Y`.
fn match_regular(ctx: &AmalgamContext, g: &NormalForm, f: &CyclicForm) -> Result<Option<Word>> {
    let k = g.len();
    let first = g.syllables[0].side;
    for j in 0..k {
        let (h, q) = cyclic_permutation(ctx, &f.form, j, &RepPolicy::Canonical)?;
        if h.sides() != g.sides() {
            continue;
        }
        let e = principal_system_solve(ctx, g, &h)?;
        let c = match cardinality(e.as_ref()) {
            Cardinality::Singleton(c) => c,
            Cardinality::Empty => continue,
            // two solutions would make g singular
            Cardinality::Infinite => unreachable!("regular element with several solutions"),
        };
        let side_c = g.syllables[k - 1].side;
        let chain = propagate(ctx, g, &h, &c)?.expect("solutions propagate");
        let ck = &chain.last().expect("nonempty chain").1;
        // closing equation c_g · c_k = c · c_h
        let lhs = &g.head_on(ctx, first)? * ck;
        let rhs = &ctx.move_c(side_c, first, &c)? * &h.head_on(ctx, first)?;
        if lhs == rhs {
            return Ok(Some(&ctx.embed(side_c, &c) * &q.invert()));
        }
    }
    Ok(None)
}

pub fn conjugacy_search(ctx: &AmalgamContext, u: &Word, v: &Word) -> Result<ConjugacyOutcome> {
    let outcome = search(ctx, u, v)?;
    if let ConjugacyOutcome::Conjugate(z) = &outcome {
        let p = RepPolicy::Canonical;
        assert_eq!(
            normal_form(ctx, &u.conjugate_by(z), &p)?,
            normal_form(ctx, v, &p)?,
            "conjugator failed verification"
        );
    }
    Ok(outcome)
}

fn search(ctx: &AmalgamContext, u: &Word, v: &Word) -> Result<ConjugacyOutcome> {
    let policy = RepPolicy::Canonical;
    let cu = cyclic_form(ctx, u, &policy, true)?;
    let cv = cyclic_form(ctx, v, &policy, true)?;
    // u = Cu·fu·Cu⁻¹, v = Cv·fv·Cv⁻¹; a conjugator z of fu to fv gives Cu·z·Cv⁻¹
    let assemble = |z: &Word| &(&cu.conjugator * z) * &cv.conjugator.invert();
    if cu.len() != cv.len() {
        return Ok(ConjugacyOutcome::NotConjugate(NotConjugateReason::CyclicLengthsDiffer {
            u: cu.len(),
            v: cv.len(),
        }));
    }
    match cu.len() {
        0 => in_c(ctx, &cu, &cv).map(|o| match o {
            ConjugacyOutcome::Conjugate(z) => ConjugacyOutcome::Conjugate(assemble(&z)),
            other => other,
        }),
        1 => {
            let (su, wu) = cu.form.factor_element(ctx).expect("length one");
            let (sv, wv) = cv.form.factor_element(ctx).expect("length one");
            if su != sv {
                return Ok(ConjugacyOutcome::NotConjugate(NotConjugateReason::DifferentFactors));
            }
            Ok(match free_conjugacy(&wu, &wv)? {
                Some(z) => ConjugacyOutcome::Conjugate(assemble(&ctx.embed(su, &z))),
                None => ConjugacyOutcome::NotConjugate(NotConjugateReason::NotConjugateInFactor),
            })
        }
        _ => {
            if let Some((g, p)) = regular_permutation(ctx, &cu)? {
                // g = P⁻¹ fu P and h = c⁻¹ g c = Q⁻¹ fv Q
                return Ok(match match_regular(ctx, &g, &cv)? {
                    Some(cq) => ConjugacyOutcome::Conjugate(assemble(&(&p * &cq))),
                    None => ConjugacyOutcome::NotConjugate(NotConjugateReason::NoMatchingPermutation),
                });
            }
            if let Some((g, p)) = regular_permutation(ctx, &cv)? {
                return Ok(match match_regular(ctx, &g, &cu)? {
                    // z' = P_v · c · Q_u⁻¹ conjugates fv to fu
                    Some(cq) => ConjugacyOutcome::Conjugate(assemble(&(&p * &cq).invert())),
                    None => ConjugacyOutcome::NotConjugate(NotConjugateReason::NoMatchingPermutation),
                });
            }
            Ok(ConjugacyOutcome::Undecided(UndecidedReason::NoRegularPermutation))
        }
    }
}

/// Both cyclic forms lie in `C`; returns a conjugator of the forms.
fn in_c(ctx: &AmalgamContext, cu: &CyclicForm, cv: &CyclicForm) -> Result<ConjugacyOutcome> {
    let regular = classify_normal_form(ctx, cu.form.clone())?.is_regular()
        || classify_normal_form(ctx, cv.form.clone())?.is_regular();
    if regular {
        let ca = ctx.c(Side::A);
        let bu = ca.express_in_basis(&cu.form.head_on(ctx, Side::A)?)?;
        let bv = ca.express_in_basis(&cv.form.head_on(ctx, Side::A)?)?;
        return Ok(match free_conjugacy(&bu, &bv)? {
            Some(z) => ConjugacyOutcome::Conjugate(ctx.embed(Side::A, &z.substitute(ca.basis(), ctx.alphabet(Side::A)))),
            None => ConjugacyOutcome::NotConjugate(NotConjugateReason::NotConjugateInC),
        });
    }
    // with C malnormal in one factor, conjugacy of elements of C reduces to the other factor
    for side in [Side::B, Side::A] {
        if ctx.is_malnormal(side.other()) {
            let wu = cu.form.head_on(ctx, side)?;
            let wv = cv.form.head_on(ctx, side)?;
            return Ok(match free_conjugacy(&wu, &wv)? {
                Some(z) => ConjugacyOutcome::Conjugate(ctx.embed(side, &z)),
                None => ConjugacyOutcome::NotConjugate(NotConjugateReason::NotConjugateInFactor),
            });
        }
    }
    Ok(ConjugacyOutcome::Undecided(UndecidedReason::SingularInC))
}

/// All words over `X ∪ Y` of length at most `max`, shortlex order.
pub fn words_up_to(ctx: &AmalgamContext, max: usize) -> Vec<Word> {
    let alphabet = ctx.union_alphabet();
    let mut out = vec![Word::empty(alphabet)];
    let mut layer = out.clone();
    for _ in 0..max {
        let mut next = Vec::new();
        for w in &layer {
            for slot in 0..2 * alphabet.len() {
                let l = Letter::from_slot(slot);
                if w.last() != Some(l.inv()) {
                    next.push(w * &Word::generator(alphabet, l.index).expect("in range").pow(if l.inverse { -1 } else { 1 }));
                }
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Looks for `z` with `|z| ≤ bound` and `z⁻¹ u z = v`. Splits `z = z₁ z₂`
/// and matches `z₁⁻¹ u z₁` against `z₂ v z₂⁻¹`, which covers exactly the
/// same conjugators as enumerating all `z` up to the bound.
pub fn brute_conjugacy_oracle(ctx: &AmalgamContext, u: &Word, v: &Word, bound: usize) -> Result<Option<Word>> {
    let p = RepPolicy::Canonical;
    let left = words_up_to(ctx, bound.div_ceil(2));
    let mut seen: HashMap<NormalForm, Word> = HashMap::new();
    for z1 in &left {
        let key = normal_form(ctx, &u.conjugate_by(z1), &p)?;
        seen.entry(key).or_insert_with(|| z1.clone());
    }
    let right = if bound / 2 == bound.div_ceil(2) {
        left
    } else {
        words_up_to(ctx, bound / 2)
    };
    let mut best: Option<Word> = None;
    for z2 in &right {
        let key = normal_form(ctx, &v.conjugate_by(&z2.invert()), &p)?;
        if let Some(z1) = seen.get(&key) {
            let z = z1 * z2;
            if best.as_ref().is_none_or(|b| z < *b) {
                best = Some(z);
            }
        }
    }
    Ok(best)
}
