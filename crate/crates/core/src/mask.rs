//! Observation masks: which entries of a matrix are known.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{dims, Error, Result};

/// `M x N` boolean grid, `true` = observed. Stored row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ObservationMask {
    rows: usize,
    cols: usize,
    observed: Vec<bool>,
}

impl ObservationMask {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut observed = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                observed.push(f(i, j));
            }
        }
        Self {
            rows,
            cols,
            observed,
        }
    }

    pub fn full(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| true)
    }

    pub fn empty(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| false)
    }

    /// I.i.d. Bernoulli(`sr`) per entry.
    pub fn random(rows: usize, cols: usize, sr: f64, seed: u64) -> Result<Self> {
        if !(sr > 0.0 && sr <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "sampling rate must lie in (0, 1], got {sr}"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Ok(Self::from_fn(rows, cols, |_, _| rng.random::<f64>() < sr))
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn is_observed(&self, i: usize, j: usize) -> bool {
        self.observed[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        self.observed[i * self.cols + j] = v;
    }

    pub fn count(&self) -> usize {
        self.observed.iter().filter(|&&b| b).count()
    }

    /// Achieved fraction of observed entries.
    pub fn sampling_rate(&self) -> f64 {
        if self.observed.is_empty() {
            return 0.0;
        }
        self.count() as f64 / self.observed.len() as f64
    }

    /// Observed positions as `(row, col)`, row-major.
    pub fn observed_indices(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let cols = self.cols;
        self.observed
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(move |(k, _)| (k / cols, k % cols))
    }

    /// `M N` header, then one line of `0`/`1` characters per row.
    pub fn to_text(&self) -> String {
        let mut s = String::with_capacity(self.rows * (self.cols + 1) + 16);
        let _ = writeln!(s, "{} {}", self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                s.push(if self.is_observed(i, j) { '1' } else { '0' });
            }
            s.push('\n');
        }
        s
    }

    /// Parses [`to_text`](Self::to_text) output. Whitespace between digits
    /// is tolerated.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::InvalidConfig("mask file is empty".into()))?;
        let mut it = header.split_whitespace().map(str::parse::<usize>);
        let (rows, cols) = match (it.next(), it.next(), it.next()) {
            (Some(Ok(m)), Some(Ok(n)), None) => (m, n),
            _ => return Err(Error::InvalidConfig(format!("bad mask header {header:?}"))),
        };
        let mut observed = Vec::with_capacity(rows * cols);
        for (row, line) in lines.enumerate() {
            let before = observed.len();
            for c in line.chars().filter(|c| !c.is_whitespace()) {
                match c {
                    '0' => observed.push(false),
                    '1' => observed.push(true),
                    other => {
                        return Err(Error::InvalidConfig(format!(
                            "bad mask character {other:?} in row {row}"
                        )))
                    }
                }
            }
            if observed.len() - before != cols {
                return Err(Error::DimensionMismatch {
                    expected: format!("{cols} entries in mask row {row}"),
                    found: format!("{}", observed.len() - before),
                });
            }
        }
        if observed.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: dims(rows, cols),
                found: format!("{} rows", observed.len() / cols.max(1)),
            });
        }
        Ok(Self {
            rows,
            cols,
            observed,
        })
    }
}
