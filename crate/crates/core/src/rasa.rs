//! Reliability-aware extractive selection.
//!
//! Each transcription gets a reliability weight inversely proportional to its
//! weighted distance from the others; the iteration settles on a weighted
//! medoid, which is returned as the selected transcription.

use crate::error::{Error, Result};
use crate::metrics::sym_char_distance;

/// Iteration settings for [`rasa_select_with`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RasaParams {
    /// Added to every score before inversion.
    pub epsilon: f64,
    /// Stop once no weight moves by this much or more.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for RasaParams {
    fn default() -> Self {
        RasaParams {
            epsilon: 1e-6,
            tolerance: 1e-6,
            max_iterations: 50,
        }
    }
}

/// Pairwise [`sym_char_distance`] values, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceMatrix {
    size: usize,
    values: Vec<f64>,
}

impl DistanceMatrix {
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.size + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.size..(i + 1) * self.size]
    }
}

pub fn distance_matrix<S: AsRef<str>>(texts: &[S]) -> DistanceMatrix {
    let n = texts.len();
    let mut values = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = sym_char_distance(texts[i].as_ref(), texts[j].as_ref()).value();
            values[i * n + j] = d;
            values[j * n + i] = d;
        }
    }
    DistanceMatrix { size: n, values }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RasaSelection {
    pub index: usize,
    /// Final reliability weights; non-negative and summing to 1.
    pub weights: Vec<f64>,
    /// Weighted distance of every input to the others under `weights`.
    pub scores: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

fn weighted_scores(matrix: &DistanceMatrix, weights: &[f64]) -> Vec<f64> {
    (0..matrix.size())
        .map(|i| matrix.row(i).iter().zip(weights).map(|(d, w)| d * w).sum())
        .collect()
}

/// Picks the reliability-weighted medoid with default parameters. Ties go
/// to the lowest index.
pub fn rasa_select<S: AsRef<str>>(texts: &[S]) -> Result<RasaSelection> {
    rasa_select_with(texts, RasaParams::default())
}

/// When one group of identical texts is about as heavy as the rest, outlier
/// weights decay only like `1/k`, so `converged` can stay false at the cap
/// even though the selected index settled long before.
pub fn rasa_select_with<S: AsRef<str>>(texts: &[S], params: RasaParams) -> Result<RasaSelection> {
    let n = texts.len();
    if n == 0 {
        return Err(Error::NoInputs);
    }
    if n == 1 {
        return Ok(RasaSelection {
            index: 0,
            weights: vec![1.0],
            scores: vec![0.0],
            iterations: 0,
            converged: true,
        });
    }

    let matrix = distance_matrix(texts);
    let mut weights = vec![1.0 / n as f64; n];
    let mut iterations = 0;
    let mut converged = false;
    while iterations < params.max_iterations {
        iterations += 1;
        let scores = weighted_scores(&matrix, &weights);
        let raw: Vec<f64> = scores.iter().map(|s| 1.0 / (params.epsilon + s)).collect();
        let total: f64 = raw.iter().sum();
        let next: Vec<f64> = raw.iter().map(|r| r / total).collect();
        let change = next
            .iter()
            .zip(&weights)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        weights = next;
        if change < params.tolerance {
            converged = true;
            break;
        }
    }

    let scores = weighted_scores(&matrix, &weights);
    let mut index = 0;
    for (i, s) in scores.iter().enumerate().skip(1) {
        if *s < scores[index] {
            index = i;
        }
    }
    Ok(RasaSelection {
        index,
        weights,
        scores,
        iterations,
        converged,
    })
}
