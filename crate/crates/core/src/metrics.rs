//! Unit-cost Levenshtein distance with traceback, and the error rates built
//! on it.
//!
//! A character is a Unicode scalar value. Texts reaching these functions
//! from a parsed corpus are already NFC-normalized.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// One step of an alignment, indexing into the source and target sequences.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EditOp {
    Match { source: usize, target: usize },
    Substitute { source: usize, target: usize },
    /// Source token with no counterpart in the target.
    Delete { source: usize },
    /// Target token with no counterpart in the source.
    Insert { target: usize },
}

impl EditOp {
    pub fn is_match(&self) -> bool {
        matches!(self, EditOp::Match { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EditAlignment {
    pub distance: usize,
    pub ops: Vec<EditOp>,
}

impl EditAlignment {
    /// Rebuilds the target by walking the ops over `source`. Matched tokens
    /// are copied from the source side, so a bogus match shows up as a
    /// mismatch against `target`.
    pub fn replay<T: Clone>(&self, source: &[T], target: &[T]) -> Vec<T> {
        let mut out = Vec::with_capacity(target.len());
        for op in &self.ops {
            match *op {
                EditOp::Match { source: s, .. } => out.push(source[s].clone()),
                EditOp::Substitute { target: t, .. } | EditOp::Insert { target: t } => {
                    out.push(target[t].clone())
                }
                EditOp::Delete { .. } => {}
            }
        }
        out
    }
}

/// A non-negative error rate; 1.0 means 100%.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct Rate(f64);

impl Rate {
    pub fn new(value: f64) -> Self {
        debug_assert!(value >= 0.0);
        Rate(value)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn percent(self) -> f64 {
        self.0 * 100.0
    }
}

impl fmt::Display for Rate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.2}%", self.percent())
    }
}

/// Minimum unit-cost edit distance with one optimal alignment.
///
/// When several alignments are optimal the traceback, walking back from the
/// end, prefers match, then substitute, then delete, then insert.
pub fn edit_distance<T: PartialEq>(a: &[T], b: &[T]) -> EditAlignment {
    let (n, m) = (a.len(), b.len());
    let width = m + 1;
    let mut table = vec![0usize; (n + 1) * width];
    for (j, cell) in table[..width].iter_mut().enumerate() {
        *cell = j;
    }
    for i in 1..=n {
        table[i * width] = i;
        for j in 1..=m {
            let sub = table[(i - 1) * width + j - 1] + usize::from(a[i - 1] != b[j - 1]);
            let del = table[(i - 1) * width + j] + 1;
            let ins = table[i * width + j - 1] + 1;
            table[i * width + j] = sub.min(del).min(ins);
        }
    }

    let at = |i: usize, j: usize| table[i * width + j];
    let mut ops = Vec::with_capacity(n.max(m));
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        let here = at(i, j);
        if i > 0 && j > 0 && a[i - 1] == b[j - 1] && at(i - 1, j - 1) == here {
            ops.push(EditOp::Match {
                source: i - 1,
                target: j - 1,
            });
            i -= 1;
            j -= 1;
        } else if i > 0 && j > 0 && at(i - 1, j - 1) + 1 == here {
            ops.push(EditOp::Substitute {
                source: i - 1,
                target: j - 1,
            });
            i -= 1;
            j -= 1;
        } else if i > 0 && at(i - 1, j) + 1 == here {
            ops.push(EditOp::Delete { source: i - 1 });
            i -= 1;
        } else {
            ops.push(EditOp::Insert { target: j - 1 });
            j -= 1;
        }
    }
    ops.reverse();
    EditAlignment {
        distance: at(n, m),
        ops,
    }
}

/// Distance only, in O(min(n, m)) memory.
pub fn levenshtein<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let (long, short) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    let mut prev: Vec<usize> = (0..=short.len()).collect();
    let mut curr = vec![0; short.len() + 1];
    for (i, x) in long.iter().enumerate() {
        curr[0] = i + 1;
        for (j, y) in short.iter().enumerate() {
            let sub = prev[j] + usize::from(x != y);
            curr[j + 1] = sub.min(prev[j + 1] + 1).min(curr[j] + 1);
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    prev[short.len()]
}

pub fn chars(text: &str) -> Vec<char> {
    text.chars().collect()
}

pub fn words(text: &str) -> Vec<&str> {
    text.split_whitespace().collect()
}

/// Character error rate of `hypothesis` against `reference`.
pub fn cer(hypothesis: &str, reference: &str) -> Result<Rate> {
    let r = chars(reference);
    if r.is_empty() {
        return Err(Error::EmptyReference);
    }
    let h = chars(hypothesis);
    Ok(Rate(levenshtein(&h, &r) as f64 / r.len() as f64))
}

/// Word error rate; words are maximal non-whitespace runs.
pub fn wer(hypothesis: &str, reference: &str) -> Result<Rate> {
    let r = words(reference);
    if r.is_empty() {
        return Err(Error::EmptyReference);
    }
    let h = words(hypothesis);
    Ok(Rate(levenshtein(&h, &r) as f64 / r.len() as f64))
}

/// Character edit distance normalized by the longer of the two strings.
/// Symmetric, in `[0, 1]`, and 0 for two empty strings.
pub fn sym_char_distance(a: &str, b: &str) -> Rate {
    let (a, b) = (chars(a), chars(b));
    let denom = a.len().max(b.len()).max(1);
    Rate(levenshtein(&a, &b) as f64 / denom as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(a: &str, b: &str) -> EditAlignment {
        edit_distance(&chars(a), &chars(b))
    }

    #[test]
    fn empty_and_identity() {
        assert_eq!(d("", "").distance, 0);
        assert!(d("", "").ops.is_empty());
        let id = d("chat", "chat");
        assert_eq!(id.distance, 0);
        assert_eq!(id.ops.len(), 4);
        assert!(id.ops.iter().all(EditOp::is_match));
    }

    #[test]
    fn kitten_sitting() {
        // exhaustive recursion gives 3 (see tests/oracle.rs)
        let al = d("kitten", "sitting");
        assert_eq!(al.distance, 3);
        assert_eq!(levenshtein(&chars("kitten"), &chars("sitting")), 3);
        let (a, b) = (chars("kitten"), chars("sitting"));
        assert_eq!(al.replay(&a, &b), b);
        let non_match = al.ops.iter().filter(|o| !o.is_match()).count();
        assert_eq!(non_match, al.distance);
    }

    #[test]
    fn tie_break_prefers_substitute_over_indels() {
        // "ab" -> "ba": two substitutions and delete+insert both cost 2
        let al = d("ab", "ba");
        assert_eq!(al.distance, 2);
        assert_eq!(
            al.ops,
            vec![
                EditOp::Substitute { source: 0, target: 0 },
                EditOp::Substitute { source: 1, target: 1 },
            ]
        );
        // one extra source token: delete is taken before insert
        let al = d("ab", "b");
        assert_eq!(
            al.ops,
            vec![EditOp::Delete { source: 0 }, EditOp::Match { source: 1, target: 0 }]
        );
    }

    #[test]
    fn cer_examples() {
        assert_eq!(cer("abc", "abc").unwrap().value(), 0.0);
        assert!((cer("axc", "abc").unwrap().value() - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(cer("", "abc").unwrap().value(), 1.0);
        assert!(matches!(cer("abc", ""), Err(Error::EmptyReference)));
        // may exceed 1
        assert_eq!(cer("abcdef", "ab").unwrap().value(), 2.0);
    }

    #[test]
    fn wer_examples() {
        assert_eq!(wer("le chat noir", "le chat noir").unwrap().value(), 0.0);
        assert!((wer("le chien noir", "le chat noir").unwrap().value() - 1.0 / 3.0).abs() < 1e-12);
        assert!((wer("chat", "le chat noir").unwrap().value() - 2.0 / 3.0).abs() < 1e-12);
        assert!(matches!(wer("x", "   "), Err(Error::EmptyReference)));
    }

    #[test]
    fn sym_char_distance_examples() {
        assert_eq!(sym_char_distance("", "").value(), 0.0);
        assert_eq!(sym_char_distance("abc", "abc").value(), 0.0);
        assert_eq!(sym_char_distance("abcd", "abed").value(), 0.25);
        assert_eq!(sym_char_distance("", "abc").value(), 1.0);
        assert_eq!(
            sym_char_distance("séance", "seance"),
            sym_char_distance("seance", "séance")
        );
    }

    #[test]
    fn scalar_values_not_bytes() {
        assert_eq!(levenshtein(&chars("é"), &chars("e")), 1);
    }
}
