//! Test-only oracles and generators. Nothing here calls into the crate's
//! distance or alignment code.

#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap};

use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Edit distance by exhaustive suffix recursion, memoized so strings of
/// length 12 stay tractable.
pub fn brute_edit_distance<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    fn go<T: PartialEq>(a: &[T], b: &[T], memo: &mut HashMap<(usize, usize), usize>) -> usize {
        if a.is_empty() {
            return b.len();
        }
        if b.is_empty() {
            return a.len();
        }
        let key = (a.len(), b.len());
        if let Some(&d) = memo.get(&key) {
            return d;
        }
        let sub = go(&a[1..], &b[1..], memo) + usize::from(a[0] != b[0]);
        let del = go(&a[1..], b, memo) + 1;
        let ins = go(a, &b[1..], memo) + 1;
        let d = sub.min(del).min(ins);
        memo.insert(key, d);
        d
    }
    go(a, b, &mut HashMap::new())
}

/// Plain recursion with no memo; only for very short inputs.
pub fn naive_edit_distance(a: &[char], b: &[char]) -> usize {
    match (a.split_first(), b.split_first()) {
        (None, _) => b.len(),
        (_, None) => a.len(),
        (Some((x, ra)), Some((y, rb))) => {
            let sub = naive_edit_distance(ra, rb) + usize::from(x != y);
            let del = naive_edit_distance(ra, b) + 1;
            let ins = naive_edit_distance(a, rb) + 1;
            sub.min(del).min(ins)
        }
    }
}

pub fn brute_sym_distance(a: &str, b: &str) -> f64 {
    let (a, b): (Vec<char>, Vec<char>) = (a.chars().collect(), b.chars().collect());
    brute_edit_distance(&a, &b) as f64 / a.len().max(b.len()).max(1) as f64
}

/// Per-position plurality over equal-length strings: highest count, ties
/// to the smallest character.
pub fn positional_plurality(texts: &[String]) -> String {
    let len = texts[0].chars().count();
    let cols: Vec<Vec<char>> = texts.iter().map(|t| t.chars().collect()).collect();
    (0..len)
        .map(|i| {
            let mut counts: BTreeMap<char, usize> = BTreeMap::new();
            for c in &cols {
                *counts.entry(c[i]).or_default() += 1;
            }
            let max = *counts.values().max().unwrap();
            *counts.iter().find(|(_, n)| **n == max).unwrap().0
        })
        .collect()
}

pub fn random_string(rng: &mut ChaCha8Rng, alphabet: &[char], max_len: usize) -> String {
    let len = rng.gen_range(0..=max_len);
    (0..len).map(|_| alphabet[rng.gen_range(0..alphabet.len())]).collect()
}

pub fn random_nonempty(rng: &mut ChaCha8Rng, alphabet: &[char], max_len: usize) -> String {
    let len = rng.gen_range(1..=max_len);
    (0..len).map(|_| alphabet[rng.gen_range(0..alphabet.len())]).collect()
}

/// A base string plus a few random substitutions, insertions and deletions,
/// shaped like independent transcriptions of the same line.
pub fn noisy_copy(rng: &mut ChaCha8Rng, base: &str, alphabet: &[char], edits: usize) -> String {
    let mut chars: Vec<char> = base.chars().collect();
    for _ in 0..edits {
        let op = rng.gen_range(0..3);
        let pos = rng.gen_range(0..=chars.len());
        let c = alphabet[rng.gen_range(0..alphabet.len())];
        match op {
            0 if pos < chars.len() => chars[pos] = c,
            1 => chars.insert(pos, c),
            _ if pos < chars.len() && chars.len() > 1 => {
                chars.remove(pos);
            }
            _ => {}
        }
    }
    chars.into_iter().collect()
}

pub const SMALL: [char; 3] = ['a', 'b', 'c'];
pub const FRENCH: [char; 12] = ['a', 'e', 'é', 'i', 'l', 'n', 'o', 'r', 's', 't', 'u', ' '];
