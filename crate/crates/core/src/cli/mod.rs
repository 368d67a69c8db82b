//! Command-line front end.
//!
//! Exit codes: 0 success, 2 parse or parameter error, 3 invalid
//! presentation, 4 undecided conjugacy, 1 anything else.

pub mod bench;
pub mod parse;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::amalgam::{
    brute_conjugacy_oracle, classify, conjugacy_search, cr_membership, cyclic_form, normal_form_traced, reduced_form,
    AmalgamContext, ConjugacyOutcome, NormalForm, RepPolicy, Side, Witness,
};
use crate::error::Error;
use crate::words::Word;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INVALID_PRESENTATION: i32 = 3;
pub const EXIT_UNDECIDED: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "amalgam", version, about = "Normal forms and conjugacy in amalgamated free products A *_C B")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Group file with `A:`, `B:` and `C:` lines.
    #[arg(short = 'g', long = "group")]
    group: PathBuf,
    /// Emit one flat JSON object instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct WordArgs {
    #[command(flatten)]
    common: Common,
    #[arg(short = 'w', long = "word", allow_hyphen_values = true)]
    word: String,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a group file.
    Validate(Common),
    /// Normal form of a word.
    Nf {
        #[command(flatten)]
        args: WordArgs,
        /// `canonical` or `paper-ex1:P`.
        #[arg(long, default_value = "canonical")]
        policy: String,
        /// Report the head length after every sweep step.
        #[arg(long)]
        trace: bool,
    },
    /// Reduced form of a word.
    Reduce(WordArgs),
    /// Cyclically reduced conjugate of a word.
    Cyclic(WordArgs),
    /// Decide whether an element is regular or singular.
    Classify(WordArgs),
    /// Double coset transversals of C in each factor.
    Transversal(Common),
    /// Search for z with z^-1 u z = v.
    Conj {
        #[command(flatten)]
        common: Common,
        #[arg(short = 'u', allow_hyphen_values = true)]
        u: String,
        #[arg(short = 'v', allow_hyphen_values = true)]
        v: String,
        /// On an undecided answer, search conjugators up to this length.
        #[arg(long)]
        oracle: Option<usize>,
    },
    /// Head-growth experiments.
    Bench {
        #[command(subcommand)]
        case: BenchCase,
        #[arg(long, global = true)]
        json: bool,
    },
}

#[derive(Debug, Subcommand)]
enum BenchCase {
    /// `(z d)^m x` over the first blow-up fixture.
    #[command(name = "paper-ex1")]
    PaperEx1 {
        #[arg(long, default_value_t = 2)]
        p: i64,
        #[arg(long, default_value_t = 2)]
        m: u32,
    },
    /// `(b y)^-n a (b y)^n` against `a^(p^n)`.
    #[command(name = "paper-ex2")]
    PaperEx2 {
        #[arg(long, default_value_t = 2)]
        p: i64,
        #[arg(long, default_value_t = 3)]
        n: u32,
    },
    /// Random words under the canonical policy.
    Random {
        #[arg(short = 'g', long = "group")]
        group: PathBuf,
        #[arg(long, default_value_t = 20)]
        length: usize,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// The flat JSON object every command prints under `--json`.
#[derive(Debug, Default, Serialize)]
pub struct Output {
    pub verdict: String,
    pub normal_form: Option<Vec<SyllableOut>>,
    pub head: Option<String>,
    pub conjugator: Option<String>,
    pub trace: Option<Vec<usize>>,
    pub reason: Option<String>,
    #[serde(flatten)]
    pub extra: Map<String, Value>,
    #[serde(skip)]
    text: Vec<String>,
    #[serde(skip)]
    code: i32,
}

#[derive(Debug, Clone, Serialize)]
pub struct SyllableOut {
    pub side: Side,
    pub word: String,
}

impl Output {
    fn new(verdict: &str) -> Self {
        Output {
            verdict: verdict.into(),
            ..Default::default()
        }
    }

    fn line(&mut self, s: impl Into<String>) {
        self.text.push(s.into());
    }

    fn extra(&mut self, key: &str, value: impl Serialize) {
        self.extra
            .insert(key.into(), serde_json::to_value(value).expect("serializable output"));
    }

    fn with_form(&mut self, nf: &NormalForm) {
        self.normal_form = Some(
            nf.syllables
                .iter()
                .map(|s| SyllableOut {
                    side: s.side,
                    word: s.word.to_string(),
                })
                .collect(),
        );
        self.head = Some(nf.head.to_string());
        self.extra("head_side", nf.head_side);
    }
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Syntax { .. }
        | Error::UnknownGenerator(_)
        | Error::InvalidName(_)
        | Error::DuplicateName(_)
        | Error::Parameter(_)
        | Error::InvalidPolicy(_) => EXIT_USAGE,
        Error::InvalidPresentation { .. } => EXIT_INVALID_PRESENTATION,
        _ => EXIT_FAILURE,
    }
}

struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: exit_code(&e),
            message: e.to_string(),
        }
    }
}

fn with_input<T>(what: &str, r: crate::Result<T>) -> Result<T, Failure> {
    r.map_err(|e| {
        let mut f = Failure::from(e);
        f.message = format!("{what}: {}", f.message);
        f
    })
}

fn load(path: &Path) -> Result<AmalgamContext, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure {
        code: EXIT_USAGE,
        message: format!("{}: {e}", path.display()),
    })?;
    let name = path.display().to_string();
    let file = with_input(&name, parse::parse_presentation(&text))?;
    with_input(&name, file.context())
}

fn word(ctx: &AmalgamContext, flag: &str, text: &str) -> Result<Word, Failure> {
    with_input(flag, parse::parse_word(text, ctx))
}

fn form_lines(out: &mut Output, nf: &NormalForm) {
    out.line(format!("head: {} ({})", nf.head, nf.head_side));
    let syl: Vec<String> = nf.syllables.iter().map(|s| format!("{}: {}", s.side, s.word)).collect();
    out.line(format!("syllables: {}", if syl.is_empty() { "none".into() } else { syl.join(" | ") }));
    out.line(format!("length: {}", nf.len()));
}

fn witness_json(w: &Witness) -> Value {
    match w {
        Witness::BadPair { c, chain } => json!({
            "kind": "bad_pair",
            "c": c.to_string(),
            "chain": chain.iter().map(Word::to_string).collect::<Vec<_>>(),
        }),
        Witness::Normalizer { element } => json!({"kind": "normalizer", "element": element.to_string()}),
        Witness::ZSet {
            side,
            t,
            target,
            conjugator,
        } => json!({
            "kind": "z_set",
            "side": side,
            "t": t.to_string(),
            "target": target.to_string(),
            "conjugator": conjugator.to_string(),
        }),
    }
}

fn witness_text(w: &Witness) -> String {
    match w {
        Witness::BadPair { c, chain } => format!(
            "bad pair: c = {c}, propagated to {}",
            chain.last().map(Word::to_string).unwrap_or_default()
        ),
        Witness::Normalizer { element } => format!("C meets its conjugate in {element}"),
        Witness::ZSet {
            side,
            t,
            target,
            conjugator,
        } => format!("conjugate of {target} in C ∩ C^({t})^-1 on side {side}, by {conjugator}"),
    }
}

fn execute(cmd: Command) -> Result<Output, Failure> {
    match cmd {
        Command::Validate(c) => {
            let ctx = load(&c.group)?;
            let mut out = Output::new("valid");
            for side in [Side::A, Side::B] {
                let f = ctx.factor(side);
                out.line(format!(
                    "{side}: {} generators, C of rank {}, diameter {}, {}",
                    f.alphabet.len(),
                    f.c.rank(),
                    f.c.graph().diameter(),
                    if f.malnormal { "malnormal" } else { "not malnormal" }
                ));
                out.extra(&format!("rank_{side}"), f.c.rank());
                out.extra(&format!("malnormal_{side}"), f.malnormal);
            }
            out.extra("pairs", ctx.pairs().len());
            out.line("valid");
            Ok(out)
        }
        Command::Nf { args, policy, trace } => {
            let ctx = load(&args.common.group)?;
            let w = word(&ctx, "-w", &args.word)?;
            let policy = with_input("--policy", RepPolicy::parse(&ctx, &policy))?;
            let (nf, steps) = normal_form_traced(&ctx, &w, &policy)?;
            let mut out = Output::new("ok");
            out.with_form(&nf);
            out.extra("policy", policy.name());
            out.extra("word", nf.to_word(&ctx).to_string());
            form_lines(&mut out, &nf);
            out.line(format!("word: {}", nf.to_word(&ctx)));
            if trace {
                let t: Vec<String> = steps.iter().map(usize::to_string).collect();
                out.line(format!("trace: {}", t.join(" ")));
                out.trace = Some(steps);
            }
            Ok(out)
        }
        Command::Reduce(args) => {
            let ctx = load(&args.common.group)?;
            let w = word(&ctx, "-w", &args.word)?;
            let rf = reduced_form(&ctx, ctx.syllables(&w)?)?;
            let mut out = Output::new("ok");
            out.with_form(&rf);
            form_lines(&mut out, &rf);
            Ok(out)
        }
        Command::Cyclic(args) => {
            let ctx = load(&args.common.group)?;
            let w = word(&ctx, "-w", &args.word)?;
            let cf = cyclic_form(&ctx, &w, &RepPolicy::Canonical, true)?;
            let mut out = Output::new("ok");
            out.with_form(&cf.form);
            out.conjugator = Some(cf.conjugator.to_string());
            out.extra("cyclic_length", cf.len());
            form_lines(&mut out, &cf.form);
            out.line(format!("conjugator: {}", cf.conjugator));
            Ok(out)
        }
        Command::Classify(args) => {
            let ctx = load(&args.common.group)?;
            let w = word(&ctx, "-w", &args.word)?;
            let report = classify(&ctx, &w)?;
            let cr = cr_membership(&ctx, &w)?;
            let verdict = if report.is_regular() { "regular" } else { "singular" };
            let mut out = Output::new(verdict);
            out.with_form(&report.normal_form);
            out.line(verdict);
            if let Some(wit) = &report.witness {
                out.reason = Some(witness_text(wit));
                out.line(format!("witness: {}", witness_text(wit)));
                out.extra("witness", witness_json(wit));
            } else {
                out.extra("witness", Value::Null);
            }
            out.extra("cr_class", cr.class);
            out.line(format!("class: {:?}", cr.class));
            Ok(out)
        }
        Command::Transversal(c) => {
            let ctx = load(&c.group)?;
            let mut out = Output::new("ok");
            for side in [Side::A, Side::B] {
                let f = ctx.factor(side);
                let reps: Vec<String> = f.normalizer.transversal.iter().map(Word::to_string).collect();
                out.line(format!(
                    "{side}: {} ({})",
                    if reps.is_empty() { "none".into() } else { reps.join(", ") },
                    if f.malnormal { "malnormal" } else { "not malnormal" }
                ));
                out.extra(&format!("transversal_{side}"), &reps);
                out.extra(&format!("malnormal_{side}"), f.malnormal);
            }
            Ok(out)
        }
        Command::Conj { common, u, v, oracle } => {
            let ctx = load(&common.group)?;
            let u = word(&ctx, "-u", &u)?;
            let v = word(&ctx, "-v", &v)?;
            let mut out = match conjugacy_search(&ctx, &u, &v)? {
                ConjugacyOutcome::Conjugate(z) => {
                    let mut out = Output::new("conjugate");
                    out.line(format!("conjugate\nconjugator: {z}"));
                    out.conjugator = Some(z.to_string());
                    out
                }
                ConjugacyOutcome::NotConjugate(r) => {
                    let mut out = Output::new("not_conjugate");
                    out.line(format!("not conjugate: {r}"));
                    out.reason = Some(r.to_string());
                    out
                }
                ConjugacyOutcome::Undecided(r) => {
                    let mut out = Output::new("undecided");
                    out.line(format!("undecided: {r}"));
                    out.reason = Some(r.to_string());
                    out.code = EXIT_UNDECIDED;
                    if let Some(bound) = oracle {
                        let found = brute_conjugacy_oracle(&ctx, &u, &v, bound)?;
                        match &found {
                            Some(z) => out.line(format!("bounded search found conjugator {z}")),
                            None => out.line(format!("bounded search up to length {bound} found nothing")),
                        }
                        out.extra("oracle_conjugator", found.map(|z| z.to_string()));
                    }
                    out
                }
            };
            out.extra("u", u.to_string());
            out.extra("v", v.to_string());
            Ok(out)
        }
        Command::Bench { case, .. } => run_bench(case),
    }
}

fn run_bench(case: BenchCase) -> Result<Output, Failure> {
    let mut out = Output::new("ok");
    match case {
        BenchCase::PaperEx1 { p, m } => {
            let reports = bench::paper_ex1(p, m)?;
            out.trace = Some(reports[0].head_lengths.clone());
            out.line(format!("input (z d)^{m} x, p = {p}, M = {}", reports[0].bound_m));
            out.line("policy           k  final head  time (ms)  head lengths");
            for r in &reports {
                let lens: Vec<String> = r.head_lengths.iter().map(usize::to_string).collect();
                out.line(format!(
                    "{:<15} {:>2}  {:>10}  {:>9.3}  {}",
                    r.policy,
                    r.k,
                    r.final_head,
                    r.wall_ms,
                    lens.join(" ")
                ));
            }
            out.extra("reports", &reports);
        }
        BenchCase::PaperEx2 { p, n } => {
            let r = bench::paper_ex2(p, n)?;
            out.verdict = if r.equal { "equal" } else { "different" }.into();
            out.trace = Some(r.report.head_lengths.clone());
            out.line(format!(
                "(b y)^-{n} a (b y)^{n} {} a^{} ({:.3} ms)",
                if r.equal { "=" } else { "!=" },
                p.pow(n),
                r.report.wall_ms
            ));
            if !r.equal {
                out.code = EXIT_FAILURE;
            }
            out.extra("reports", [&r.report]);
        }
        BenchCase::Random {
            group,
            length,
            samples,
            seed,
        } => {
            let ctx = load(&group)?;
            let r = bench::random(&ctx, length, samples, seed)?;
            out.line(format!(
                "{} words of length {}: max head {}, max steps {}, M = {} ({:.3} ms)",
                r.samples, r.length, r.max_head, r.max_steps, r.bound_m, r.wall_ms
            ));
            out.extra("report", &r);
        }
    }
    Ok(out)
}

fn wants_json(cmd: &Command) -> bool {
    match cmd {
        Command::Validate(c) | Command::Transversal(c) => c.json,
        Command::Nf { args, .. } => args.common.json,
        Command::Reduce(a) | Command::Cyclic(a) | Command::Classify(a) => a.common.json,
        Command::Conj { common, .. } => common.json,
        Command::Bench { json, .. } => *json,
    }
}

/// Runs one command, writing results to `stdout` and diagnostics to `stderr`.
pub fn run_with<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let json = wants_json(&cli.command);
    match execute(cli.command) {
        Ok(out) => {
            if json {
                let _ = writeln!(stdout, "{}", serde_json::to_string(&out).expect("serializable output"));
            } else {
                for l in &out.text {
                    let _ = writeln!(stdout, "{l}");
                }
            }
            out.code
        }
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            if json {
                let mut out = Output::new("error");
                out.reason = Some(f.message);
                let _ = writeln!(stdout, "{}", serde_json::to_string(&out).expect("serializable output"));
            }
            f.code
        }
    }
}

pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(argv, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}
