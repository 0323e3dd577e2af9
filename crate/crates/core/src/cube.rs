//! The universal k-cube partial operation f_k and the lower exponent ℓ(R).
//!
//! Rows are indexed by the nonzero strings v ∈ {0,1}^k. A column of the
//! m×r input matrix (m = 2^k − 1) is one of 2k+2 types: all-zero, all-one,
//! the coordinate column c_i (bit v_i at row v), or its complement. For
//! symmetric relations only the multiplicities of the column types matter,
//! which is the fast test; the generic per-coordinate assignment test is
//! kept as a cross-check.

use std::collections::BTreeMap;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::predicate::{SymmetricPredicate, TupleRelation};

/// One of the 2k+2 column types in the domain of f_k; i is 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ColumnType {
    Zero,
    One,
    Coord(usize),
    CoCoord(usize),
}

/// The fixed type order Zero, One, Coord(1..k), CoCoord(1..k).
pub fn column_types(k: usize) -> Vec<ColumnType> {
    let mut types = vec![ColumnType::Zero, ColumnType::One];
    types.extend((1..=k).map(ColumnType::Coord));
    types.extend((1..=k).map(ColumnType::CoCoord));
    types
}

/// f_k on a column of the given type.
pub fn output_bit(ct: ColumnType) -> u8 {
    match ct {
        ColumnType::Zero | ColumnType::Coord(_) => 0,
        ColumnType::One | ColumnType::CoCoord(_) => 1,
    }
}

/// The bit a column of type `ct` contributes to the row indexed by nonzero
/// v ∈ {0,1}^k (bit i−1 of the mask is v_i).
pub fn row_bit(ct: ColumnType, v: u32) -> u8 {
    match ct {
        ColumnType::Zero => 0,
        ColumnType::One => 1,
        ColumnType::Coord(i) => (v >> (i - 1) & 1) as u8,
        ColumnType::CoCoord(i) => 1 - (v >> (i - 1) & 1) as u8,
    }
}

/// Counts of each column type across the r coordinates, indexed parallel to
/// `column_types(k)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiplicityVector {
    pub k: usize,
    pub counts: Vec<usize>,
}

impl MultiplicityVector {
    pub fn arity(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn count(&self, ct: ColumnType) -> usize {
        match ct {
            ColumnType::Zero => self.counts[0],
            ColumnType::One => self.counts[1],
            ColumnType::Coord(i) => self.counts[1 + i],
            ColumnType::CoCoord(i) => self.counts[1 + self.k + i],
        }
    }

    /// Hamming weight of the row indexed by nonzero v, in closed form.
    pub fn row_weight(&self, v: u32) -> usize {
        let mut w = self.count(ColumnType::One);
        for i in 1..=self.k {
            if v >> (i - 1) & 1 == 1 {
                w += self.count(ColumnType::Coord(i));
            } else {
                w += self.count(ColumnType::CoCoord(i));
            }
        }
        w
    }

    /// Hamming weight of the f_k output row.
    pub fn output_weight(&self) -> usize {
        self.count(ColumnType::One)
            + (1..=self.k)
                .map(|i| self.count(ColumnType::CoCoord(i)))
                .sum::<usize>()
    }
}

/// A failure-of-preservation certificate: all input-row weights lie in W
/// while the output-row weight does not.
#[derive(Clone, Debug)]
pub struct CubeFailure {
    pub k: usize,
    pub multiplicities: MultiplicityVector,
    pub row_weights: BTreeMap<u32, usize>,
    pub output_weight: usize,
}

impl CubeFailure {
    fn from_counts(k: usize, counts: Vec<usize>) -> Self {
        let mult = MultiplicityVector { k, counts };
        let row_weights = (1..1u32 << k).map(|v| (v, mult.row_weight(v))).collect();
        let output_weight = mult.output_weight();
        Self {
            k,
            multiplicities: mult,
            row_weights,
            output_weight,
        }
    }

    /// Re-derive every quantity from the multiplicities and check the
    /// failure conditions against the predicate.
    pub fn verify(&self, pred: &SymmetricPredicate) -> bool {
        if self.multiplicities.k != self.k || self.multiplicities.arity() != pred.arity() {
            return false;
        }
        for v in 1..1u32 << self.k {
            let w = self.multiplicities.row_weight(v);
            if self.row_weights.get(&v) != Some(&w) || !pred.accepts_weight(w) {
                return false;
            }
        }
        self.multiplicities.output_weight() == self.output_weight
            && !pred.accepts_weight(self.output_weight)
    }
}

fn bits_key(v: u32, k: usize) -> String {
    (0..k)
        .map(|i| if v >> i & 1 == 1 { '1' } else { '0' })
        .collect()
}

impl Serialize for CubeFailure {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Counts {
            zero: usize,
            one: usize,
            coord: Vec<usize>,
            cocoord: Vec<usize>,
        }
        #[derive(Serialize)]
        struct Json {
            k: usize,
            counts: Counts,
            row_weights: BTreeMap<String, usize>,
            output_weight: usize,
        }
        let m = &self.multiplicities;
        Json {
            k: self.k,
            counts: Counts {
                zero: m.count(ColumnType::Zero),
                one: m.count(ColumnType::One),
                coord: (1..=self.k).map(|i| m.count(ColumnType::Coord(i))).collect(),
                cocoord: (1..=self.k)
                    .map(|i| m.count(ColumnType::CoCoord(i)))
                    .collect(),
            },
            row_weights: self
                .row_weights
                .iter()
                .map(|(&v, &w)| (bits_key(v, self.k), w))
                .collect(),
            output_weight: self.output_weight,
        }
        .serialize(serializer)
    }
}

fn check_k(pred_arity: usize, k: usize) -> Result<()> {
    if k < 2 || k > pred_arity {
        Err(Error::InvalidInput(format!(
            "k must satisfy 2 <= k <= arity, got k={k}, arity={pred_arity}"
        )))
    } else {
        Ok(())
    }
}

/// Fast preservation test for symmetric predicates: enumerate multiplicity
/// vectors over the 2k+2 column types (descending lexicographic in the type
/// order Zero, One, Coord(1..k), CoCoord(1..k)) and return the first whose
/// row weights all lie in W while the output weight does not. Absent iff
/// f_k preserves R.
pub fn preserves_symmetric(pred: &SymmetricPredicate, k: usize) -> Result<Option<CubeFailure>> {
    if pred.is_trivial() {
        return Err(Error::TrivialPredicate);
    }
    check_k(pred.arity(), k)?;
    let r = pred.arity();
    let n_types = 2 * k + 2;
    let mut counts = vec![0usize; n_types];
    let mut found = None;
    compositions_desc(r, n_types, 0, &mut counts, &mut |counts| {
        let mult = MultiplicityVector {
            k,
            counts: counts.to_vec(),
        };
        let rows_ok = (1..1u32 << k).all(|v| pred.accepts_weight(mult.row_weight(v)));
        if rows_ok && !pred.accepts_weight(mult.output_weight()) {
            found = Some(CubeFailure::from_counts(k, counts.to_vec()));
            true
        } else {
            false
        }
    });
    Ok(found)
}

/// Enumerate compositions of `total` into `parts` parts in descending
/// lexicographic order, stopping when the visitor returns true.
fn compositions_desc(
    total: usize,
    parts: usize,
    pos: usize,
    counts: &mut [usize],
    visit: &mut impl FnMut(&[usize]) -> bool,
) -> bool {
    if pos == parts - 1 {
        counts[pos] = total;
        let stop = visit(counts);
        counts[pos] = 0;
        return stop;
    }
    for c in (0..=total).rev() {
        counts[pos] = c;
        if compositions_desc(total - c, parts, pos + 1, counts, visit) {
            counts[pos] = 0;
            return true;
        }
    }
    counts[pos] = 0;
    false
}

/// Generic preservation test on an explicit relation: assign a column type
/// to each coordinate (lexicographic in the type order), materialize the
/// m = 2^k − 1 rows, and look for all rows in the relation with the output
/// row outside it.
pub fn preserves_generic(rel: &TupleRelation, k: usize) -> Result<Option<Vec<ColumnType>>> {
    if k < 2 {
        return Err(Error::InvalidInput(format!("k must be >= 2, got {k}")));
    }
    let r = rel.arity();
    let n_types = 2 * k + 2;
    let work = (n_types as u64).checked_pow(r as u32);
    if work.is_none_or(|w| w > 10_000_000) {
        return Err(Error::GuardExceeded(format!(
            "(2k+2)^r = {n_types}^{r} exceeds the enumeration ceiling"
        )));
    }
    let types = column_types(k);
    let mut assign = vec![0usize; r];
    loop {
        let cols: Vec<ColumnType> = assign.iter().map(|&a| types[a]).collect();
        let mut all_rows_in = true;
        for v in 1..1u32 << k {
            let mut row = 0u32;
            for (j, &ct) in cols.iter().enumerate() {
                if row_bit(ct, v) == 1 {
                    row |= 1 << j;
                }
            }
            if !rel.contains(row) {
                all_rows_in = false;
                break;
            }
        }
        if all_rows_in {
            let mut out = 0u32;
            for (j, &ct) in cols.iter().enumerate() {
                if output_bit(ct) == 1 {
                    out |= 1 << j;
                }
            }
            if !rel.contains(out) {
                return Ok(Some(cols));
            }
        }
        // odometer, last coordinate fastest
        let mut pos = r;
        loop {
            if pos == 0 {
                return Ok(None);
            }
            pos -= 1;
            assign[pos] += 1;
            if assign[pos] < n_types {
                break;
            }
            assign[pos] = 0;
        }
    }
}

/// ℓ(R): the largest k ∈ {2,…,r} for which f_k fails to preserve R, with
/// the convention ℓ(R) = 1 when every test preserves.
pub fn lower_exponent(pred: &SymmetricPredicate) -> Result<usize> {
    if pred.is_trivial() {
        return Err(Error::TrivialPredicate);
    }
    for k in (2..=pred.arity()).rev() {
        if preserves_symmetric(pred, k)?.is_some() {
            return Ok(k);
        }
    }
    Ok(1)
}
