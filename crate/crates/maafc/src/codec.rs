//! Per-user analog fountain encoding.
//!
//! A generator matrix row defines one coded symbol: `d_c` distinct
//! information symbols picked from the columns that currently have the
//! smallest degree, each entry carrying a weight from the code's weight set.
//! Keeping the variable degrees balanced avoids the error floor that plain
//! uniform selection causes. Rows are derived from a counter-based seeded
//! generator, so any party that knows `(spec, row index)` can rebuild them.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::weights::WeightSet;

#[derive(Debug, Error)]
pub enum CodecError {
    #[error("message length k must be at least 1")]
    EmptyMessage,
    #[error("coded-symbol degree must be at least 1")]
    ZeroDegree,
    #[error("degree {degree} exceeds weight count {f} when drawing weights without replacement")]
    DegreeExceedsWeights { degree: usize, f: usize },
    #[error("degree {degree} exceeds message length {k}")]
    DegreeExceedsMessage { degree: usize, k: usize },
    #[error("bit value {0} is not 0 or 1")]
    BadBit(u8),
    #[error("expected {expected} symbols, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("generator row {row} is malformed: {reason}")]
    BadRow { row: usize, reason: String },
}

// ---------------------------------------------------------------------------
// Code specification
// ---------------------------------------------------------------------------

/// Everything needed to (re)build one user's generator matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CodeSpec {
    /// Number of binary information symbols.
    pub k: usize,
    /// Fixed coded-symbol degree `d_c`.
    pub degree: usize,
    pub weight_set: WeightSet,
    pub seed: u64,
    /// Draw row weights with replacement. Defaults to off, which requires
    /// `degree <= f` and gives each row distinct weights.
    #[serde(default)]
    pub replacement: bool,
}

impl CodeSpec {
    pub fn new(k: usize, degree: usize, weight_set: WeightSet, seed: u64) -> Result<Self, CodecError> {
        let spec = Self {
            k,
            degree,
            weight_set,
            seed,
            replacement: false,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), CodecError> {
        if self.k == 0 {
            return Err(CodecError::EmptyMessage);
        }
        if self.degree == 0 {
            return Err(CodecError::ZeroDegree);
        }
        if !self.replacement && self.degree > self.weight_set.len() {
            return Err(CodecError::DegreeExceedsWeights {
                degree: self.degree,
                f: self.weight_set.len(),
            });
        }
        Ok(())
    }
}

/// Independent RNG stream for one generator row.
fn row_rng(seed: u64, row: usize) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(row as u64);
    rng
}

// ---------------------------------------------------------------------------
// Generator matrix
// ---------------------------------------------------------------------------

/// Sparse weighted generator matrix: one row per coded symbol, each row a
/// list of `(column, weight)` entries sorted by column.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorMatrix {
    k: usize,
    rows: Vec<Vec<(usize, f64)>>,
    col_degrees: Vec<usize>,
}

impl GeneratorMatrix {
    /// An empty matrix with `k` columns and no rows yet.
    pub fn empty(k: usize) -> Self {
        Self {
            k,
            rows: Vec::new(),
            col_degrees: vec![0; k],
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<(usize, f64)>] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &[(usize, f64)] {
        &self.rows[i]
    }

    pub fn col_degrees(&self) -> &[usize] {
        &self.col_degrees
    }

    /// Row-wise text form: one line per row, `col:weight` pairs separated by
    /// single spaces.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for row in &self.rows {
            let mut first = true;
            for (col, w) in row {
                if !first {
                    out.push(' ');
                }
                out.push_str(&format!("{col}:{w}"));
                first = false;
            }
            out.push('\n');
        }
        out
    }

    /// Parses the [`to_text`](Self::to_text) format for a known column count.
    pub fn from_text(k: usize, text: &str) -> Result<Self, CodecError> {
        let mut g = Self::empty(k);
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut entries = Vec::new();
            for pair in line.split_whitespace() {
                let (col, w) = pair.split_once(':').ok_or_else(|| CodecError::BadRow {
                    row: i,
                    reason: format!("entry {pair:?} lacks a colon"),
                })?;
                let col: usize = col.parse().map_err(|_| CodecError::BadRow {
                    row: i,
                    reason: format!("bad column in {pair:?}"),
                })?;
                let w: f64 = w.parse().map_err(|_| CodecError::BadRow {
                    row: i,
                    reason: format!("bad weight in {pair:?}"),
                })?;
                if col >= k {
                    return Err(CodecError::BadRow {
                        row: i,
                        reason: format!("column {col} out of range for k={k}"),
                    });
                }
                entries.push((col, w));
            }
            entries.sort_unstable_by_key(|&(c, _)| c);
            if entries.windows(2).any(|p| p[0].0 == p[1].0) {
                return Err(CodecError::BadRow {
                    row: i,
                    reason: "duplicate column".into(),
                });
            }
            for &(c, _) in &entries {
                g.col_degrees[c] += 1;
            }
            g.rows.push(entries);
        }
        Ok(g)
    }
}

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// BPSK-modulated information vector with entries in {-1, +1}.
#[derive(Debug, Clone, PartialEq)]
pub struct ModulatedVector {
    symbols: Vec<f64>,
}

impl ModulatedVector {
    pub fn symbols(&self) -> &[f64] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }
}

/// Maps bits to BPSK symbols: 1 -> +1, 0 -> -1.
///
/// The orientation matches the decoder's rule that a positive final LLR
/// decodes to bit 1.
pub fn bpsk_map(bits: &[u8]) -> Result<ModulatedVector, CodecError> {
    let mut symbols = Vec::with_capacity(bits.len());
    for &b in bits {
        symbols.push(match b {
            0 => -1.0,
            1 => 1.0,
            other => return Err(CodecError::BadBit(other)),
        });
    }
    Ok(ModulatedVector { symbols })
}

/// Picks `take` distinct items uniformly from `pool` (partial Fisher-Yates).
fn sample_distinct<T: Copy>(pool: &mut Vec<T>, take: usize, rng: &mut ChaCha12Rng) -> Vec<T> {
    debug_assert!(take <= pool.len());
    for i in 0..take {
        let j = rng.random_range(i..pool.len());
        pool.swap(i, j);
    }
    pool[..take].to_vec()
}

/// Appends `n_new` rows to `g`, keeping the column degrees balanced.
///
/// Each new row picks `d_c` distinct columns uniformly among those of
/// currently smallest degree, spilling into the next-lowest degree tier when
/// the smallest tier has fewer than `d_c` columns left. Weights are then
/// drawn from the spec's weight set per its replacement flag. The result is
/// a new matrix; `g` is unchanged. Deterministic given
/// `(spec.seed, g.num_rows())`.
pub fn extend_generator(
    spec: &CodeSpec,
    g: &GeneratorMatrix,
    n_new: usize,
) -> Result<GeneratorMatrix, CodecError> {
    spec.validate()?;
    if spec.degree > spec.k {
        return Err(CodecError::DegreeExceedsMessage {
            degree: spec.degree,
            k: spec.k,
        });
    }
    let mut out = g.clone();
    let ws = spec.weight_set.weights();
    for row_idx in out.num_rows()..out.num_rows() + n_new {
        let mut rng = row_rng(spec.seed, row_idx);

        // fill from the lowest degree tiers upward
        let mut chosen: Vec<usize> = Vec::with_capacity(spec.degree);
        let mut excluded = vec![false; spec.k];
        while chosen.len() < spec.degree {
            let min_deg = (0..spec.k)
                .filter(|&c| !excluded[c])
                .map(|c| out.col_degrees[c])
                .min()
                .expect("degree <= k leaves candidates");
            let mut tier: Vec<usize> = (0..spec.k)
                .filter(|&c| !excluded[c] && out.col_degrees[c] == min_deg)
                .collect();
            let need = spec.degree - chosen.len();
            if tier.len() <= need {
                chosen.extend_from_slice(&tier);
            } else {
                chosen.extend(sample_distinct(&mut tier, need, &mut rng));
            }
            for &c in &chosen {
                excluded[c] = true;
            }
        }
        chosen.sort_unstable();

        let weights: Vec<f64> = if spec.replacement {
            (0..spec.degree)
                .map(|_| ws[rng.random_range(0..ws.len())])
                .collect()
        } else {
            let mut pool: Vec<f64> = ws.to_vec();
            sample_distinct(&mut pool, spec.degree, &mut rng)
        };

        let row: Vec<(usize, f64)> = chosen.iter().copied().zip(weights).collect();
        for &(c, _) in &row {
            out.col_degrees[c] += 1;
        }
        out.rows.push(row);
    }
    Ok(out)
}

/// Encodes a modulated vector: coded symbol `i` is the weighted sum of the
/// symbols selected by row `i`.
pub fn encode(g: &GeneratorMatrix, b: &ModulatedVector) -> Result<Vec<f64>, CodecError> {
    if b.len() != g.k() {
        return Err(CodecError::LengthMismatch {
            expected: g.k(),
            got: b.len(),
        });
    }
    Ok(g.rows()
        .iter()
        .map(|row| row.iter().map(|&(col, w)| w * b.symbols()[col]).sum())
        .collect())
}
