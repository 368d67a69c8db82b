//! Regular and singular elements. An element is singular when it lies in
//! `(N*_G(C) ∖ C) ∪ Z_G(C)`, where `N*_G(C) = {g : C ∩ C^g ≠ 1}` and
//! `Z_G(C)` collects the elements of `C` that some `g ∈ N*_G(C) ∖ C`
//! conjugates back into `C`.

use serde::Serialize;

use crate::error::Result;
use crate::words::Word;

use super::context::{AmalgamContext, Side};
use super::forms::{conjugate_into_c, cyclic_form, cyclic_permutation, normal_form, CyclicForm, NormalForm, RepPolicy};
use super::systems::{principal_system_solve, propagate};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Regular,
    Singular,
}

/// Why an element is singular. Words are over `X ∪ Y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// `c ≠ 1` in `C` with `g c g⁻¹ ∈ C`; `chain` lists the intermediate
    /// values `p_k c p_k⁻¹, …`, ending with `g' c g'⁻¹` for `g' = p₁⋯p_k`.
    BadPair { c: Word, chain: Vec<Word> },
    /// A nontrivial element of `C ∩ C^g` for `g` in a single factor.
    Normalizer { element: Word },
    /// `conjugator⁻¹ · target · conjugator = g` with `target ∈ C ∩ C^{t⁻¹}`,
    /// `conjugator ∈ C` and `t` a double coset representative outside `C`.
    ZSet { side: Side, t: Word, target: Word, conjugator: Word },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegularityReport {
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    pub normal_form: NormalForm,
}

impl RegularityReport {
    pub fn is_regular(&self) -> bool {
        self.verdict == Verdict::Regular
    }
}

pub fn classify(ctx: &AmalgamContext, raw: &Word) -> Result<RegularityReport> {
    let nf = normal_form(ctx, raw, &RepPolicy::Canonical)?;
    classify_normal_form(ctx, nf)
}

/// Classifies an element given in normal form (any representative policy).
pub fn classify_normal_form(ctx: &AmalgamContext, nf: NormalForm) -> Result<RegularityReport> {
    let witness = match nf.len() {
        0 => z_set_witness(ctx, &nf)?,
        1 => {
            let (side, w) = nf.factor_element(ctx).expect("length one");
            let c = ctx.c(side);
            let inter = c.conjugate(&w)?.pullback(c)?;
            inter.basis().first().map(|e| Witness::Normalizer {
                element: ctx.embed(side, e),
            })
        }
        _ => {
            // ε always solves the system, so the solution set is a subgroup
            let e = principal_system_solve(ctx, &nf, &nf)?.expect("the identity solves the system");
            match e.subgroup().basis().first() {
                None => None,
                Some(c) => {
                    let chain = propagate(ctx, &nf, &nf, c)?.expect("members of the solution set propagate");
                    Some(Witness::BadPair {
                        c: ctx.embed(e.side(), c),
                        chain: chain.iter().map(|(s, w)| ctx.embed(*s, w)).collect(),
                    })
                }
            }
        }
    };
    Ok(RegularityReport {
        verdict: if witness.is_some() {
            Verdict::Singular
        } else {
            Verdict::Regular
        },
        witness,
        normal_form: nf,
    })
}

fn z_set_witness(ctx: &AmalgamContext, nf: &NormalForm) -> Result<Option<Witness>> {
    for side in [Side::A, Side::B] {
        let c = nf.head_on(ctx, side)?;
        let f = ctx.factor(side);
        if let Some(w) = f.c.z_set_witness(&f.normalizer, &c)? {
            return Ok(Some(Witness::ZSet {
                side,
                t: ctx.embed(side, &w.t),
                target: ctx.embed(side, &w.target),
                conjugator: ctx.embed(side, &w.conjugator),
            }));
        }
    }
    Ok(None)
}

/// Membership in the classes on which the conjugacy decider is complete.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CrClass {
    /// Conjugate to a regular cyclically reduced element of length at least two.
    CRgt1,
    /// Conjugate into `C`, onto a regular element.
    CR0,
    /// Cyclic length one.
    CR1,
    NotCR,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrMembership {
    pub class: CrClass,
    /// A cyclically reduced conjugate; regular for `CRgt1` and `CR0`.
    pub form: CyclicForm,
}

pub fn cr_membership(ctx: &AmalgamContext, raw: &Word) -> Result<CrMembership> {
    let policy = RepPolicy::Canonical;
    let cf = cyclic_form(ctx, raw, &policy, false)?;
    if cf.len() > 1 {
        for j in 0..cf.len() {
            let (perm, prefix) = cyclic_permutation(ctx, &cf.form, j, &policy)?;
            let report = classify_normal_form(ctx, perm)?;
            if report.is_regular() {
                return Ok(CrMembership {
                    class: CrClass::CRgt1,
                    form: CyclicForm {
                        form: report.normal_form,
                        conjugator: &cf.conjugator * &prefix,
                        complete: true,
                    },
                });
            }
        }
        return Ok(CrMembership {
            class: CrClass::NotCR,
            form: cf,
        });
    }
    let cf = conjugate_into_c(ctx, cf);
    if cf.len() == 1 {
        return Ok(CrMembership {
            class: CrClass::CR1,
            form: cf,
        });
    }
    let report = classify_normal_form(ctx, cf.form.clone())?;
    Ok(CrMembership {
        class: if report.is_regular() {
            CrClass::CR0
        } else {
            CrClass::NotCR
        },
        form: cf,
    })
}
