//! Cosets `K·c` with `K ≤ C` inside one factor: shifts, intersections,
//! cardinality and transfer across the amalgam.

use crate::amalgam::{AmalgamContext, Side};
use crate::error::{Error, Result};
use crate::stallings::{coset_intersection, GeneratingTuple};
use crate::words::Word;

/// The set `subgroup · rep` on one side. Empty sets are represented by `None`
/// at the call sites, never by this type.
#[derive(Debug, Clone)]
pub struct CosetOfC {
    side: Side,
    subgroup: GeneratingTuple,
    rep: Word,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Cardinality {
    Empty,
    Singleton(Word),
    Infinite,
}

impl CosetOfC {
    /// `C` itself on `side`.
    pub fn whole(ctx: &AmalgamContext, side: Side) -> Self {
        CosetOfC {
            side,
            subgroup: ctx.c(side).clone(),
            rep: Word::empty(ctx.alphabet(side)),
        }
    }

    /// Checks that `subgroup ≤ C` and `rep ∈ C` on `side`.
    pub fn new(ctx: &AmalgamContext, side: Side, subgroup: GeneratingTuple, rep: Word) -> Result<Self> {
        let c = ctx.c(side);
        if subgroup.basis().iter().any(|b| !c.contains(b)) || !c.contains(&rep) {
            return Err(Error::NotAMember);
        }
        Ok(CosetOfC { side, subgroup, rep })
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn subgroup(&self) -> &GeneratingTuple {
        &self.subgroup
    }

    pub fn rep(&self) -> &Word {
        &self.rep
    }

    pub fn contains(&self, w: &Word) -> bool {
        w.same_alphabet(&self.rep) && self.subgroup.contains(&(w * &self.rep.invert()))
    }

    /// `p · self · q ∩ C`. The coset `p(Kc)q` equals `(pKp⁻¹)(pcq)`.
    pub fn shift(&self, ctx: &AmalgamContext, p: &Word, q: &Word) -> Result<Option<CosetOfC>> {
        let moved = self.subgroup.conjugate(&p.invert())?;
        let rep = &(p * &self.rep) * q;
        let c = ctx.c(self.side);
        let found = coset_intersection(&moved, &rep, c, &Word::empty(c.alphabet()))?;
        Ok(found.map(|(subgroup, rep)| CosetOfC {
            side: self.side,
            subgroup,
            rep,
        }))
    }

    /// `Ka ∩ Lb = (K ∩ L)h`.
    pub fn intersect(&self, other: &CosetOfC) -> Result<Option<CosetOfC>> {
        if self.side != other.side {
            return Err(Error::SideMismatch);
        }
        let found = coset_intersection(&self.subgroup, &self.rep, &other.subgroup, &other.rep)?;
        Ok(found.map(|(subgroup, rep)| CosetOfC {
            side: self.side,
            subgroup,
            rep,
        }))
    }

    /// The same set of elements of `C`, written on the other side.
    pub fn transfer(&self, ctx: &AmalgamContext) -> Result<CosetOfC> {
        let to = self.side.other();
        let gens = self
            .subgroup
            .basis()
            .iter()
            .map(|b| ctx.transfer_word(self.side, b))
            .collect::<Result<Vec<_>>>()?;
        Ok(CosetOfC {
            side: to,
            subgroup: GeneratingTuple::build(ctx.alphabet(to), &gens)?,
            rep: ctx.transfer_word(self.side, &self.rep)?,
        })
    }

    pub fn on_side(&self, ctx: &AmalgamContext, side: Side) -> Result<CosetOfC> {
        if side == self.side {
            Ok(self.clone())
        } else {
            self.transfer(ctx)
        }
    }
}

pub fn cardinality(d: Option<&CosetOfC>) -> Cardinality {
    match d {
        None => Cardinality::Empty,
        Some(d) if d.subgroup.is_trivial() => Cardinality::Singleton(d.rep.clone()),
        Some(_) => Cardinality::Infinite,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amalgam::context::tests::example_one;

    fn a(ctx: &AmalgamContext, s: &str) -> Word {
        ctx.parse_factor_word(Side::A, s).unwrap()
    }

    fn sub(ctx: &AmalgamContext, side: Side, gens: &[&str]) -> GeneratingTuple {
        let gens: Vec<Word> = gens.iter().map(|g| ctx.parse_factor_word(side, g).unwrap()).collect();
        GeneratingTuple::build(ctx.alphabet(side), &gens).unwrap()
    }

    #[test]
    fn shift_examples() {
        let ctx = example_one(2);
        let c = CosetOfC::whole(&ctx, Side::A);
        let r = c.shift(&ctx, &a(&ctx, "a"), &a(&ctx, "a^-1")).unwrap().unwrap();
        assert!(r.contains(&a(&ctx, "a^2")));
        assert!(!r.contains(&a(&ctx, "b")));
        let same = c.shift(&ctx, &a(&ctx, ""), &a(&ctx, "")).unwrap().unwrap();
        assert_eq!(same.subgroup().rank(), 2);
        assert!(same.rep().is_empty());

        let kb = CosetOfC::new(&ctx, Side::A, sub(&ctx, Side::A, &["b"]), a(&ctx, "")).unwrap();
        let r = kb.shift(&ctx, &a(&ctx, "d"), &a(&ctx, "d^-1")).unwrap().unwrap();
        // d⟨b⟩d⁻¹ ∩ C is trivial but still contains the identity
        assert_eq!(cardinality(Some(&r)), Cardinality::Singleton(a(&ctx, "")));
        let kb = CosetOfC::new(&ctx, Side::A, sub(&ctx, Side::A, &["b"]), a(&ctx, "b")).unwrap();
        assert!(kb.shift(&ctx, &a(&ctx, "d"), &a(&ctx, "")).unwrap().is_none());
    }

    #[test]
    fn intersect_examples() {
        let ctx = example_one(2);
        let c = CosetOfC::whole(&ctx, Side::A);
        let cc = c.intersect(&c).unwrap().unwrap();
        assert_eq!(cc.subgroup().rank(), 2);
        let a2 = CosetOfC::new(&ctx, Side::A, sub(&ctx, Side::A, &["a^2"]), a(&ctx, "")).unwrap();
        let b = CosetOfC::new(&ctx, Side::A, sub(&ctx, Side::A, &["b"]), a(&ctx, "")).unwrap();
        let r = a2.intersect(&b).unwrap().unwrap();
        assert_eq!(cardinality(Some(&r)), Cardinality::Singleton(a(&ctx, "")));
        let cb = CosetOfC::new(&ctx, Side::A, ctx.c(Side::A).clone(), a(&ctx, "b")).unwrap();
        let a2b = CosetOfC::new(&ctx, Side::A, sub(&ctx, Side::A, &["a^2"]), a(&ctx, "b")).unwrap();
        let r = cb.intersect(&a2b).unwrap().unwrap();
        assert!(r.contains(&a(&ctx, "a^4 b")) && !r.contains(&a(&ctx, "b^2")));
        let other = CosetOfC::whole(&ctx, Side::B);
        assert_eq!(c.intersect(&other).unwrap_err(), Error::SideMismatch);
    }

    #[test]
    fn cardinality_examples() {
        let ctx = example_one(2);
        let t = CosetOfC::new(&ctx, Side::A, GeneratingTuple::trivial(ctx.alphabet(Side::A)), a(&ctx, "a^2 b")).unwrap();
        assert_eq!(cardinality(Some(&t)), Cardinality::Singleton(a(&ctx, "a^2 b")));
        let inf = CosetOfC::new(&ctx, Side::A, sub(&ctx, Side::A, &["a^2"]), a(&ctx, "")).unwrap();
        assert_eq!(cardinality(Some(&inf)), Cardinality::Infinite);
        assert_eq!(cardinality(None), Cardinality::Empty);
    }

    #[test]
    fn transfer_examples() {
        let ctx = example_one(2);
        let y = |s| ctx.parse_factor_word(Side::B, s).unwrap();
        let kb = CosetOfC::new(&ctx, Side::A, sub(&ctx, Side::A, &["b"]), a(&ctx, "")).unwrap();
        let t = kb.transfer(&ctx).unwrap();
        assert_eq!(t.side(), Side::B);
        assert_eq!(t.subgroup().basis(), &[y("y^2")]);
        let whole = CosetOfC::whole(&ctx, Side::A).transfer(&ctx).unwrap();
        assert!(whole.contains(&y("x")) && whole.contains(&y("y^2")) && !whole.contains(&y("y")));
        let a2b = CosetOfC::new(&ctx, Side::A, sub(&ctx, Side::A, &["a^2"]), a(&ctx, "b")).unwrap();
        let t = a2b.transfer(&ctx).unwrap();
        assert_eq!(t.rep(), &y("y^2"));
        assert!(t.contains(&y("x y^2")) && !t.contains(&y("y^2 x")));
        let back = t.transfer(&ctx).unwrap();
        assert!(back.contains(&a(&ctx, "a^2 b")) && !back.contains(&a(&ctx, "b a^2")));
    }
}
