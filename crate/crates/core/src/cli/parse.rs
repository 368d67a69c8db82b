//! Group files:
//!
//! ```text
//! # comment
//! A: a b d
//! B: x y z
//! C: a^2 = x
//! C: b = y^2
//! ```

use std::sync::Arc;

use crate::amalgam::AmalgamContext;
use crate::error::{Error, Result};
use crate::words::{Alphabet, Word};

#[derive(Debug, Clone)]
pub struct PresentationFile {
    pub a: Arc<Alphabet>,
    pub b: Arc<Alphabet>,
    pub pairs: Vec<(Word, Word)>,
}

impl PresentationFile {
    pub fn context(&self) -> Result<AmalgamContext> {
        AmalgamContext::new(&self.a, &self.b, self.pairs.clone())
    }
}

/// Shifts a single-line word error to its position in the file.
fn locate(err: Error, line: usize, column_offset: usize) -> Error {
    match err {
        Error::Syntax { column, message, .. } => Error::syntax(line, column + column_offset, message),
        other => other,
    }
}

fn alphabet_line(body: &str, line: usize, column: usize) -> Result<Arc<Alphabet>> {
    let names: Vec<&str> = body.split_whitespace().collect();
    Alphabet::new(names.iter().copied()).map_err(|e| match e {
        Error::InvalidName(n) => Error::syntax(line, column, format!("invalid generator name `{n}`")),
        Error::DuplicateName(n) => Error::syntax(line, column, format!("duplicate generator name `{n}`")),
        other => other,
    })
}

pub fn parse_presentation(text: &str) -> Result<PresentationFile> {
    let mut a = None;
    let mut b = None;
    let mut relations: Vec<(usize, usize, &str)> = Vec::new();
    let mut last_line = 0;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        last_line = line;
        let content = raw.split('#').next().unwrap_or("");
        let trimmed = content.trim_start();
        if trimmed.trim().is_empty() {
            continue;
        }
        let indent = content.len() - trimmed.len();
        let Some((key, body)) = trimmed.split_once(':') else {
            return Err(Error::syntax(line, indent + 1, "expected `A:`, `B:` or `C:`"));
        };
        let body_column = indent + key.len() + 2;
        match key.trim() {
            "A" if a.is_none() => a = Some(alphabet_line(body, line, body_column)?),
            "B" if b.is_none() => b = Some(alphabet_line(body, line, body_column)?),
            "A" | "B" => return Err(Error::syntax(line, indent + 1, format!("second `{}:` line", key.trim()))),
            "C" => relations.push((line, body_column, body)),
            other => return Err(Error::syntax(line, indent + 1, format!("unknown line kind `{other}`"))),
        }
    }
    let a = a.ok_or_else(|| Error::syntax(last_line + 1, 1, "missing `A:` line"))?;
    let b = b.ok_or_else(|| Error::syntax(last_line + 1, 1, "missing `B:` line"))?;
    let mut pairs = Vec::new();
    for (line, column, body) in relations {
        let Some((left, right)) = body.split_once('=') else {
            return Err(Error::syntax(line, column, "expected `u = v`"));
        };
        if right.contains('=') {
            return Err(Error::syntax(line, column + left.len() + 1, "more than one `=`"));
        }
        let u = Word::parse(left, &a).map_err(|e| locate(e, line, column - 1))?;
        let v = Word::parse(right, &b).map_err(|e| locate(e, line, column + left.len()))?;
        pairs.push((u, v));
    }
    Ok(PresentationFile { a, b, pairs })
}

/// Parses a word over `X ∪ Y`.
pub fn parse_word(text: &str, ctx: &AmalgamContext) -> Result<Word> {
    ctx.parse_word(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    const EX1: &str = "# example\nA: a b d\nB: x y z\nC: a^2 = x\nC: b = y^2   # trailing\n";

    #[test]
    fn parses_example_file() {
        let p = parse_presentation(EX1).unwrap();
        assert_eq!(p.a.names(), ["a", "b", "d"]);
        assert_eq!(p.pairs.len(), 2);
        assert_eq!(p.pairs[1].1.to_string(), "y^2");
        let ctx = p.context().unwrap();
        assert_eq!(parse_word("a^2 b^-1", &ctx).unwrap().to_string(), "a^2 b^-1");
    }

    #[test]
    fn reports_positions() {
        let err = parse_presentation("A: a b\nB: x y\nC: a^2 = q\n").unwrap_err();
        assert_eq!(
            err,
            Error::Syntax {
                line: 3,
                column: 10,
                message: "unknown generator `q`".into()
            }
        );
        let err = parse_presentation("A: a b\nB: x y\nC: c = x\n").unwrap_err();
        assert!(matches!(err, Error::Syntax { line: 3, column: 4, .. }), "{err:?}");
        let err = parse_presentation("A: a\nA: b\n").unwrap_err();
        assert!(matches!(err, Error::Syntax { line: 2, .. }));
        let err = parse_presentation("A: a\nB: x\nC: a x\n").unwrap_err();
        assert!(matches!(err, Error::Syntax { line: 3, .. }));
        let err = parse_presentation("A: a\nC: a = x\n").unwrap_err();
        assert!(matches!(err, Error::Syntax { line: 3, .. }));
        assert!(parse_presentation("A: a 2b\nB: x\n").is_err());
    }

    #[test]
    fn distinguishes_invalid_presentations() {
        let p = parse_presentation("A: a b\nB: a y\nC: a = y\n").unwrap();
        assert!(matches!(p.context(), Err(Error::InvalidPresentation { index: None, .. })));
        let p = parse_presentation("A: a b\nB: x y\nC: a = x\nC: a = y\n").unwrap();
        assert!(matches!(p.context(), Err(Error::InvalidPresentation { index: Some(1), .. })));
    }
}
