use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The matrix-vector multiplication strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// One row per plaintext, rotate-and-sum per row, indicator masking.
    Naive,
    /// One column per plaintext against element-replicated vector ciphertexts.
    Column,
    /// Diagonals aligned to the vector; products are rotated.
    GalaDiagonal,
    /// Diagonals aligned to the rows; the vector is rotated with hoisting.
    PackvflDiagonal,
    /// GALA diagonals over the packed matrix, lazy rotate-and-sum.
    Gala,
    /// Packed diagonals, hoisted rotations, lazy rotate-and-sum, partitioning.
    Packvfl,
    /// Coefficient packing with LWE extraction.
    Cheetah,
}

impl Method {
    pub const ALL: [Method; 7] = [
        Method::Naive,
        Method::Column,
        Method::GalaDiagonal,
        Method::PackvflDiagonal,
        Method::Gala,
        Method::Packvfl,
        Method::Cheetah,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Naive => "naive",
            Method::Column => "column",
            Method::GalaDiagonal => "gala-diagonal",
            Method::PackvflDiagonal => "packvfl-diagonal",
            Method::Gala => "gala",
            Method::Packvfl => "packvfl",
            Method::Cheetah => "cheetah",
        }
    }

    /// Slot-packing methods operate on `N′` slots; Cheetah works on `N` coefficients.
    pub fn is_slot_packing(self) -> bool {
        self != Method::Cheetah
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidParams(format!("unknown method {s:?}")))
    }
}

/// Next power of two (with `0 -> 1`).
pub fn pad_pow2(x: usize) -> usize {
    x.max(1).next_power_of_two()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PartitionCase {
    /// `m > N′ ≥ n`: horizontal blocks sharing one hoisted rotation group.
    TallRows,
    /// `m ≤ N′ < n`: vertical blocks whose results are summed before sending.
    WideCols,
    /// `m, n > N′`: a grid of `N′ × N′` blocks.
    Grid,
}

/// How an oversized (padded) matrix is tiled into blocks of at most `N′ × N′`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionPlan {
    pub case: PartitionCase,
    pub m: usize,
    pub n: usize,
    pub slots: usize,
    pub row_blocks: usize,
    pub col_blocks: usize,
    pub block_rows: usize,
    pub block_cols: usize,
}

impl PartitionPlan {
    /// Top-left corner of block `(r, c)`.
    pub fn origin(&self, r: usize, c: usize) -> (usize, usize) {
        (r * self.block_rows, c * self.block_cols)
    }
}

/// Tiles an `m × n` matrix (padded to powers of two) for `N′` slots.
pub fn plan_partition(m: usize, n: usize, slots: usize) -> Result<PartitionPlan> {
    let (mp, np) = (pad_pow2(m), pad_pow2(n));
    if mp <= slots && np <= slots {
        return Err(Error::NotRequired { m, n, slots });
    }
    let case = match (mp > slots, np > slots) {
        (true, false) => PartitionCase::TallRows,
        (false, true) => PartitionCase::WideCols,
        _ => PartitionCase::Grid,
    };
    let block_rows = mp.min(slots);
    let block_cols = np.min(slots);
    Ok(PartitionPlan {
        case,
        m: mp,
        n: np,
        slots,
        row_blocks: mp / block_rows,
        col_blocks: np / block_cols,
        block_rows,
        block_cols,
    })
}
