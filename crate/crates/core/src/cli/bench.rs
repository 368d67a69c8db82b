//! Head-growth experiments for the normal form sweep.

use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::amalgam::{normal_form, normal_form_traced, AmalgamContext, RepPolicy, Side};
use crate::error::{Error, Result};
use crate::words::{Letter, Word};

use super::parse::parse_presentation;

/// Largest head length the fixture benches may produce.
pub const MAX_HEAD: u64 = 1 << 20;

#[derive(Debug, Clone, Serialize)]
pub struct BenchReport {
    pub policy: String,
    /// Number of sweep steps.
    pub k: usize,
    pub input_length: usize,
    /// `|c_j|` at every step, in sweep order.
    pub head_lengths: Vec<usize>,
    /// Ratios of consecutive nonzero head lengths.
    pub growth: Vec<f64>,
    pub final_head: usize,
    /// `2 · diameter` of the larger graph of `C`.
    pub bound_m: usize,
    pub wall_ms: f64,
}

pub fn example_one_text(p: i64) -> String {
    format!("A: a b d\nB: x y z\nC: a^{p} = x\nC: b = y^{p}\n")
}

pub fn example_two_text(p: i64) -> String {
    format!("A: a b\nB: x y\nC: a = y^-1 x y\nC: b^-1 a b = x^{p}\n")
}

pub fn fixture(text: &str) -> Result<AmalgamContext> {
    parse_presentation(text)?.context()
}

pub fn head_bound(ctx: &AmalgamContext) -> usize {
    ctx.c(Side::A).head_bound().max(ctx.c(Side::B).head_bound())
}

fn growth(lengths: &[usize]) -> Vec<f64> {
    lengths
        .windows(2)
        .filter(|w| w[0] > 0)
        .map(|w| w[1] as f64 / w[0] as f64)
        .collect()
}

pub fn run_one(ctx: &AmalgamContext, w: &Word, policy: &RepPolicy) -> Result<BenchReport> {
    let start = Instant::now();
    let (nf, trace) = normal_form_traced(ctx, w, policy)?;
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(BenchReport {
        policy: policy.name(),
        k: trace.len(),
        input_length: w.len(),
        growth: growth(&trace),
        head_lengths: trace,
        final_head: nf.head.len(),
        bound_m: head_bound(ctx),
        wall_ms,
    })
}

fn check_size(p: i64, exponent: u32) -> Result<()> {
    if p < 2 {
        return Err(Error::Parameter(format!("p must be at least 2, got {p}")));
    }
    if exponent == 0 {
        return Err(Error::Parameter("the repetition count must be at least 1".into()));
    }
    match (p as u64).checked_pow(exponent) {
        Some(v) if v <= MAX_HEAD => Ok(()),
        _ => Err(Error::Parameter(format!("p^{exponent} exceeds {MAX_HEAD}"))),
    }
}

/// `(z d)^m x`.
pub fn example_one_input(ctx: &AmalgamContext, m: u32) -> Result<Word> {
    ctx.parse_word(&format!("{}x", "z d ".repeat(m as usize)))
}

/// Runs `(z d)^m x` under the adversarial and the canonical policy.
pub fn paper_ex1(p: i64, m: u32) -> Result<Vec<BenchReport>> {
    check_size(p, 2 * m)?;
    let ctx = fixture(&example_one_text(p))?;
    let w = example_one_input(&ctx, m)?;
    let adversarial = RepPolicy::paper_example_one(&ctx, p)?;
    Ok(vec![
        run_one(&ctx, &w, &adversarial)?,
        run_one(&ctx, &w, &RepPolicy::Canonical)?,
    ])
}

/// `(b y)^{-n} a (b y)^n`.
pub fn example_two_input(ctx: &AmalgamContext, n: u32) -> Result<Word> {
    let n = n as usize;
    ctx.parse_word(&format!("{}a {}", "y^-1 b^-1 ".repeat(n), "b y ".repeat(n)))
}

#[derive(Debug, Clone, Serialize)]
pub struct ExampleTwoReport {
    pub equal: bool,
    pub report: BenchReport,
}

/// Compares the normal forms of `(b y)^{-n} a (b y)^n` and `a^{p^n}`.
pub fn paper_ex2(p: i64, n: u32) -> Result<ExampleTwoReport> {
    check_size(p, n)?;
    let ctx = fixture(&example_two_text(p))?;
    let lhs = example_two_input(&ctx, n)?;
    let rhs = ctx.parse_word(&format!("a^{}", p.pow(n)))?;
    let report = run_one(&ctx, &lhs, &RepPolicy::Canonical)?;
    let policy = RepPolicy::Canonical;
    let equal = normal_form(&ctx, &lhs, &policy)? == normal_form(&ctx, &rhs, &policy)?;
    Ok(ExampleTwoReport { equal, report })
}

pub fn random_word(ctx: &AmalgamContext, length: usize, rng: &mut impl Rng) -> Word {
    let alphabet = ctx.union_alphabet();
    let mut letters: Vec<Letter> = Vec::with_capacity(length);
    while letters.len() < length {
        let l = Letter::from_slot(rng.gen_range(0..2 * alphabet.len()));
        if letters.last() != Some(&l.inv()) {
            letters.push(l);
        }
    }
    Word::free_reduce(letters, alphabet).expect("letters in range")
}

#[derive(Debug, Clone, Serialize)]
pub struct RandomReport {
    pub samples: usize,
    pub length: usize,
    pub max_head: usize,
    pub max_steps: usize,
    pub bound_m: usize,
    pub wall_ms: f64,
}

pub fn random(ctx: &AmalgamContext, length: usize, samples: usize, seed: u64) -> Result<RandomReport> {
    if samples == 0 {
        return Err(Error::Parameter("at least one sample is needed".into()));
    }
    let mut rng = StdRng::seed_from_u64(seed);
    let start = Instant::now();
    let mut max_head = 0;
    let mut max_steps = 0;
    for _ in 0..samples {
        let w = random_word(ctx, length, &mut rng);
        let (nf, trace) = normal_form_traced(ctx, &w, &RepPolicy::Canonical)?;
        max_head = max_head.max(nf.head.len()).max(trace.iter().copied().max().unwrap_or(0));
        max_steps = max_steps.max(trace.len());
    }
    Ok(RandomReport {
        samples,
        length,
        max_head,
        max_steps,
        bound_m: head_bound(ctx),
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_one_growth() {
        let reports = paper_ex1(2, 2).unwrap();
        assert_eq!(reports[0].head_lengths, vec![1, 2, 4, 8, 16]);
        assert_eq!(reports[0].final_head, 16);
        assert_eq!(reports[0].growth, vec![2.0; 4]);
        assert!(reports[1].final_head <= reports[1].input_length + reports[1].bound_m);
        assert_eq!(reports[1].bound_m, 2);
    }

    #[test]
    fn example_two_identity() {
        assert!(paper_ex2(2, 3).unwrap().equal);
    }

    #[test]
    fn size_limits() {
        assert!(paper_ex1(2, 11).is_err());
        assert!(paper_ex1(1, 1).is_err());
        assert!(paper_ex2(2, 0).is_err());
    }
}
