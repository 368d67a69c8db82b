use crate::cosetalg::CosetOfC;
use crate::error::{Error, Result};
use crate::words::Word;

use super::context::{AmalgamContext, Side};
use super::forms::NormalForm;

/// The set `E_{g,h}` of `c ∈ C` for which the chain
/// `p_k c = c₁ p'_k, p_{k-1} c₁ = c₂ p'_{k-1}, …, p₁ c_{k-1} = c_k p'₁`
/// has a solution in `C`. Returned on the side of `p_k`; `None` when empty.
pub fn principal_system_solve(ctx: &AmalgamContext, g: &NormalForm, h: &NormalForm) -> Result<Option<CosetOfC>> {
    let k = g.len();
    if k == 0 || h.len() != k {
        return Err(Error::Parameter("principal systems need equal syllable lengths of at least one".into()));
    }
    if g.sides() != h.sides() {
        return Ok(None);
    }
    let (p, q) = (&g.syllables, &h.syllables);
    // forward: D_{i,i} = p_{k-i+1} D_{i-1,i-1} p'_{k-i+1}⁻¹ ∩ C
    let mut d = CosetOfC::whole(ctx, p[k - 1].side);
    for i in (0..k).rev() {
        d = d.on_side(ctx, p[i].side)?;
        d = match d.shift(ctx, &p[i].word, &q[i].word.invert())? {
            Some(d) => d,
            None => return Ok(None),
        };
    }
    // back-substitution: c_{i-1} = p_{k-i+1}⁻¹ c_i p'_{k-i+1}
    for i in 0..k {
        d = d.on_side(ctx, p[i].side)?;
        d = d
            .shift(ctx, &p[i].word.invert(), &q[i].word)?
            .expect("back-substitution stays inside the solution chain");
    }
    Ok(Some(d))
}

/// For `c` on the side of `p_k`, the values `c₁, …, c_k` forced by the
/// system, each on the side where it is used; `None` as soon as one leaves `C`.
pub fn propagate(ctx: &AmalgamContext, g: &NormalForm, h: &NormalForm, c: &Word) -> Result<Option<Vec<(Side, Word)>>> {
    let k = g.len();
    if h.len() != k || g.sides() != h.sides() {
        return Ok(None);
    }
    let (p, q) = (&g.syllables, &h.syllables);
    let mut cur = (p[k - 1].side, c.clone());
    let mut chain = Vec::with_capacity(k);
    for i in (0..k).rev() {
        let side = p[i].side;
        let here = ctx.move_c(cur.0, side, &cur.1)?;
        let next = &(&p[i].word * &here) * &q[i].word.invert();
        if !ctx.in_c(side, &next) {
            return Ok(None);
        }
        chain.push((side, next.clone()));
        cur = (side, next);
    }
    Ok(Some(chain))
}
