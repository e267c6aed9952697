//! Recognizer output voting: fold N token sequences into a word-transition
//! network by iterative dynamic-programming alignment, then take the
//! plurality token in every slot.
//!
//! Sequences are merged in the order given. Aligning a token against a slot
//! costs 0 when the slot already holds that token and 1 otherwise; creating
//! a new slot costs 1; skipping a slot costs 0 when NULL holds a strict
//! majority there and 1 otherwise.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Granularity {
    Character,
    Word,
}

impl Granularity {
    fn separator(self) -> &'static str {
        match self {
            Granularity::Character => "",
            Granularity::Word => " ",
        }
    }
}

impl FromStr for Granularity {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "char" | "character" => Ok(Granularity::Character),
            "word" => Ok(Granularity::Word),
            other => Err(format!("unknown granularity {other:?} (expected char or word)")),
        }
    }
}

impl fmt::Display for Granularity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Granularity::Character => "char",
            Granularity::Word => "word",
        })
    }
}

/// Characters (spaces included) or maximal non-whitespace runs.
pub fn tokenize(text: &str, granularity: Granularity) -> Vec<String> {
    match granularity {
        Granularity::Character => text.chars().map(String::from).collect(),
        Granularity::Word => text.split_whitespace().map(String::from).collect(),
    }
}

/// One column of the network: the token each merged input contributed at
/// this position, or `None` for the NULL token.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Slot {
    entries: Vec<Option<String>>,
}

impl Slot {
    /// Per-input entries, indexed by merge order.
    pub fn entries(&self) -> &[Option<String>] {
        &self.entries
    }

    pub fn multiplicity(&self) -> usize {
        self.entries.len()
    }

    pub fn null_count(&self) -> usize {
        self.entries.iter().filter(|e| e.is_none()).count()
    }

    pub fn contains(&self, token: &str) -> bool {
        self.entries.iter().any(|e| e.as_deref() == Some(token))
    }

    /// Non-NULL token counts, sorted by token.
    pub fn token_counts(&self) -> BTreeMap<&str, usize> {
        let mut counts = BTreeMap::new();
        for token in self.entries.iter().flatten() {
            *counts.entry(token.as_str()).or_insert(0) += 1;
        }
        counts
    }

    fn null_majority(&self) -> bool {
        2 * self.null_count() > self.entries.len()
    }

    /// Highest count wins; a token beats NULL on equal counts and the
    /// lexicographically smallest token wins among tied tokens.
    pub fn winner(&self) -> Option<&str> {
        let mut best: Option<(&str, usize)> = None;
        for (token, count) in self.token_counts() {
            if best.is_none_or(|(_, c)| count > c) {
                best = Some((token, count));
            }
        }
        match best {
            Some((token, count)) if count >= self.null_count() => Some(token),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TokenLattice {
    slots: Vec<Slot>,
    inputs: usize,
}

impl TokenLattice {
    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    /// Number of sequences merged so far.
    pub fn inputs(&self) -> usize {
        self.inputs
    }

    fn from_first(tokens: &[String]) -> Self {
        TokenLattice {
            slots: tokens
                .iter()
                .map(|t| Slot {
                    entries: vec![Some(t.clone())],
                })
                .collect(),
            inputs: 1,
        }
    }

    fn merge(&mut self, tokens: &[String]) {
        let (n, m) = (self.slots.len(), tokens.len());
        let width = m + 1;
        let skip_cost: Vec<usize> = self
            .slots
            .iter()
            .map(|s| usize::from(!s.null_majority()))
            .collect();
        let align_cost = |i: usize, j: usize| usize::from(!self.slots[i].contains(&tokens[j]));

        let mut table = vec![0usize; (n + 1) * width];
        for (j, cell) in table[..width].iter_mut().enumerate() {
            *cell = j;
        }
        for i in 1..=n {
            table[i * width] = table[(i - 1) * width] + skip_cost[i - 1];
            for j in 1..=m {
                let diag = table[(i - 1) * width + j - 1] + align_cost(i - 1, j - 1);
                let skip = table[(i - 1) * width + j] + skip_cost[i - 1];
                let ins = table[i * width + j - 1] + 1;
                table[i * width + j] = diag.min(skip).min(ins);
            }
        }

        // Traceback preference: align (match or substitute), skip, insert.
        enum Step {
            Align(usize, usize),
            Skip(usize),
            Insert(usize),
        }
        let at = |i: usize, j: usize| table[i * width + j];
        let mut steps = Vec::with_capacity(n + m);
        let (mut i, mut j) = (n, m);
        while i > 0 || j > 0 {
            let here = at(i, j);
            if i > 0 && j > 0 && at(i - 1, j - 1) + align_cost(i - 1, j - 1) == here {
                steps.push(Step::Align(i - 1, j - 1));
                i -= 1;
                j -= 1;
            } else if i > 0 && at(i - 1, j) + skip_cost[i - 1] == here {
                steps.push(Step::Skip(i - 1));
                i -= 1;
            } else {
                steps.push(Step::Insert(j - 1));
                j -= 1;
            }
        }
        steps.reverse();

        let mut old: Vec<Option<Slot>> = std::mem::take(&mut self.slots).into_iter().map(Some).collect();
        let mut slots = Vec::with_capacity(steps.len());
        for step in steps {
            match step {
                Step::Align(si, tj) => {
                    let mut slot = old[si].take().expect("slot visited once");
                    slot.entries.push(Some(tokens[tj].clone()));
                    slots.push(slot);
                }
                Step::Skip(si) => {
                    let mut slot = old[si].take().expect("slot visited once");
                    slot.entries.push(None);
                    slots.push(slot);
                }
                Step::Insert(tj) => {
                    let mut entries = vec![None; self.inputs];
                    entries.push(Some(tokens[tj].clone()));
                    slots.push(Slot { entries });
                }
            }
        }
        self.slots = slots;
        self.inputs += 1;
    }
}

/// Folds the sequences, in order, into a lattice.
pub fn build_lattice(sequences: &[Vec<String>]) -> Result<TokenLattice> {
    let (first, rest) = sequences.split_first().ok_or(Error::NoInputs)?;
    let mut lattice = TokenLattice::from_first(first);
    for seq in rest {
        lattice.merge(seq);
    }
    Ok(lattice)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConsensusResult {
    pub text: String,
    pub lattice: TokenLattice,
    pub per_slot_winner: Vec<Option<String>>,
}

/// Plurality vote in every slot. NULL winners emit nothing; word-level
/// winners are joined with single spaces.
pub fn vote(lattice: &TokenLattice, granularity: Granularity) -> ConsensusResult {
    let per_slot_winner: Vec<Option<String>> = lattice
        .slots
        .iter()
        .map(|s| s.winner().map(String::from))
        .collect();
    let text = per_slot_winner
        .iter()
        .flatten()
        .map(String::as_str)
        .collect::<Vec<_>>()
        .join(granularity.separator());
    ConsensusResult {
        text,
        lattice: lattice.clone(),
        per_slot_winner,
    }
}

/// Tokenize, fold, vote. A single input comes back verbatim.
pub fn rover_consensus<S: AsRef<str>>(texts: &[S], granularity: Granularity) -> Result<ConsensusResult> {
    let sequences: Vec<Vec<String>> = texts
        .iter()
        .map(|t| tokenize(t.as_ref(), granularity))
        .collect();
    let lattice = build_lattice(&sequences)?;
    let mut result = vote(&lattice, granularity);
    if texts.len() == 1 {
        result.text = texts[0].as_ref().to_string();
    }
    Ok(result)
}
