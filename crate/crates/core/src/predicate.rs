//! Symmetric Boolean predicates and their explicit tuple expansions.
//!
//! A symmetric predicate of arity `r` is identified with its accepted-weight
//! set `W ⊆ {0, …, r}`. Tuples are encoded as bitmasks with coordinate 1 at
//! the least-significant bit; this convention is shared by every module.

use std::collections::BTreeSet;
use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Binomial coefficient C(n, k) as u64. Inputs here never exceed n = 32.
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u64 / (i + 1) as u64;
    }
    acc
}

/// A symmetric Boolean predicate: arity plus accepted-weight set.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymmetricPredicate {
    arity: usize,
    /// Bit w is set iff weight w is accepted.
    weight_mask: u32,
}

impl SymmetricPredicate {
    pub fn new(arity: usize, weights: &[usize]) -> Result<Self> {
        if arity == 0 || arity > 30 {
            return Err(Error::InvalidInput(format!("arity {arity} out of range")));
        }
        let mut mask = 0u32;
        for &w in weights {
            if w > arity {
                return Err(Error::InvalidInput(format!(
                    "weight {w} exceeds arity {arity}"
                )));
            }
            mask |= 1 << w;
        }
        Ok(Self {
            arity,
            weight_mask: mask,
        })
    }

    pub fn from_weight_mask(arity: usize, weight_mask: u32) -> Result<Self> {
        if arity == 0 || arity > 30 {
            return Err(Error::InvalidInput(format!("arity {arity} out of range")));
        }
        if weight_mask >> (arity + 1) != 0 {
            return Err(Error::InvalidInput(
                "weight mask has bits beyond arity".into(),
            ));
        }
        Ok(Self { arity, weight_mask })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn weight_mask(&self) -> u32 {
        self.weight_mask
    }

    pub fn weights(&self) -> Vec<usize> {
        (0..=self.arity)
            .filter(|&w| self.accepts_weight(w))
            .collect()
    }

    pub fn accepts_weight(&self, w: usize) -> bool {
        w <= self.arity && self.weight_mask >> w & 1 == 1
    }

    pub fn accepts_tuple(&self, tuple: u32) -> bool {
        self.accepts_weight(tuple.count_ones() as usize)
    }

    /// Trivial predicates accept nothing or everything.
    pub fn is_trivial(&self) -> bool {
        let full = (1u32 << (self.arity + 1)) - 1;
        self.weight_mask == 0 || self.weight_mask == full
    }

    /// |R| = Σ_{w∈W} C(r, w).
    pub fn relation_size(&self) -> u64 {
        self.weights().iter().map(|&w| binomial(self.arity, w)).sum()
    }

    /// Bit-flip image: W ↦ {r − w : w ∈ W}.
    pub fn flip(&self) -> Self {
        let mut mask = 0u32;
        for w in 0..=self.arity {
            if self.accepts_weight(w) {
                mask |= 1 << (self.arity - w);
            }
        }
        Self {
            arity: self.arity,
            weight_mask: mask,
        }
    }

    /// The representative among {self, flip(self)} with the numerically
    /// smaller weight-set bitmask, plus whether a flip was applied.
    pub fn canonicalize(&self) -> (Self, bool) {
        let flipped = self.flip();
        if flipped.weight_mask < self.weight_mask {
            (flipped, true)
        } else {
            (*self, false)
        }
    }

    /// All tuples accepted by the predicate, as bitmasks.
    pub fn expand(&self) -> Result<TupleRelation> {
        if self.arity > 16 {
            return Err(Error::SizeLimit(format!(
                "expand limited to arity <= 16, got {}",
                self.arity
            )));
        }
        let tuples: BTreeSet<u32> = (0..1u32 << self.arity)
            .filter(|&x| self.accepts_tuple(x))
            .collect();
        Ok(TupleRelation {
            arity: self.arity,
            tuples,
        })
    }

    /// Rejected tuples in ascending bitmask order.
    pub fn falsifying_tuples(&self) -> Vec<u32> {
        (0..1u32 << self.arity)
            .filter(|&x| !self.accepts_tuple(x))
            .collect()
    }
}

impl fmt::Debug for SymmetricPredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "W(r={})={}", self.arity, format_weight_set(self))
    }
}

/// Brace-enclosed ascending weight list with no spaces, e.g. `{0,2,3}`.
pub fn format_weight_set(pred: &SymmetricPredicate) -> String {
    let inner: Vec<String> = pred.weights().iter().map(|w| w.to_string()).collect();
    format!("{{{}}}", inner.join(","))
}

#[derive(Serialize, Deserialize)]
struct PredicateJson {
    arity: usize,
    weights: Vec<usize>,
}

impl Serialize for SymmetricPredicate {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        PredicateJson {
            arity: self.arity,
            weights: self.weights(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SymmetricPredicate {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = PredicateJson::deserialize(deserializer)?;
        for pair in raw.weights.windows(2) {
            if pair[0] >= pair[1] {
                return Err(D::Error::custom(
                    "weights must be sorted ascending with no duplicates",
                ));
            }
        }
        SymmetricPredicate::new(raw.arity, &raw.weights).map_err(D::Error::custom)
    }
}

/// An explicit Boolean relation as a set of tuple bitmasks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TupleRelation {
    arity: usize,
    tuples: BTreeSet<u32>,
}

impl TupleRelation {
    pub fn new(arity: usize, tuples: impl IntoIterator<Item = u32>) -> Result<Self> {
        if arity == 0 || arity > 16 {
            return Err(Error::SizeLimit(format!("arity {arity} out of range")));
        }
        let tuples: BTreeSet<u32> = tuples.into_iter().collect();
        if let Some(&t) = tuples.iter().next_back() {
            if t >> arity != 0 {
                return Err(Error::InvalidInput(
                    "tuple has bits beyond the arity".into(),
                ));
            }
        }
        Ok(Self { arity, tuples })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn contains(&self, tuple: u32) -> bool {
        self.tuples.contains(&tuple)
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    /// Tuples in ascending bitmask order.
    pub fn tuples(&self) -> impl Iterator<Item = u32> + '_ {
        self.tuples.iter().copied()
    }

    /// Coordinatewise complement of every tuple.
    pub fn complement_tuples(&self) -> Self {
        let full = (1u32 << self.arity) - 1;
        Self {
            arity: self.arity,
            tuples: self.tuples.iter().map(|&t| t ^ full).collect(),
        }
    }
}

/// Canonical representatives of all non-trivial symmetric predicates of
/// arity `r`, modulo bit-flip, in ascending weight-set-bitmask order. This
/// order reproduces the published table indices.
pub fn enumerate_nontrivial(r: usize) -> Result<Vec<SymmetricPredicate>> {
    if r == 0 || r > 8 {
        return Err(Error::SizeLimit(format!(
            "enumeration limited to 1 <= r <= 8, got {r}"
        )));
    }
    let full = (1u32 << (r + 1)) - 1;
    let mut out = Vec::new();
    for mask in 1..full {
        let pred = SymmetricPredicate::from_weight_mask(r, mask)?;
        let (canon, _) = pred.canonicalize();
        if canon.weight_mask == mask {
            out.push(pred);
        }
    }
    Ok(out)
}

/// Render a tuple bitmask as a bit string with coordinate 1 first.
pub fn tuple_to_string(tuple: u32, arity: usize) -> String {
    (0..arity)
        .map(|i| if tuple >> i & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// Parse a bit string with coordinate 1 first into a tuple bitmask.
pub fn tuple_from_string(s: &str) -> Result<(u32, usize)> {
    let mut tuple = 0u32;
    let mut arity = 0;
    for (i, c) in s.chars().enumerate() {
        match c {
            '0' => {}
            '1' => tuple |= 1 << i,
            _ => return Err(Error::InvalidInput(format!("bad tuple string {s:?}"))),
        }
        arity = i + 1;
    }
    if arity == 0 {
        return Err(Error::InvalidInput("empty tuple string".into()));
    }
    Ok((tuple, arity))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pred(r: usize, w: &[usize]) -> SymmetricPredicate {
        SymmetricPredicate::new(r, w).unwrap()
    }

    #[test]
    fn expand_nae3() {
        let rel = pred(3, &[1, 2]).expand().unwrap();
        let want: BTreeSet<u32> = [0b001, 0b010, 0b100, 0b011, 0b101, 0b110]
            .into_iter()
            .collect();
        assert_eq!(rel.tuples().collect::<BTreeSet<_>>(), want);
    }

    #[test]
    fn expand_singleton_weight() {
        let rel = pred(1, &[0]).expand().unwrap();
        assert_eq!(rel.tuples().collect::<Vec<_>>(), vec![0]);
    }

    #[test]
    fn expand_table2_row12_size() {
        let rel = pred(5, &[0, 2, 3]).expand().unwrap();
        assert_eq!(rel.len(), 21);
        assert_eq!(pred(5, &[0, 2, 3]).relation_size(), 21);
    }

    #[test]
    fn flip_cases() {
        assert_eq!(pred(5, &[2, 3]).flip(), pred(5, &[2, 3]));
        assert_eq!(pred(3, &[0, 1, 2]).flip(), pred(3, &[1, 2, 3]));
        assert_eq!(pred(4, &[0]).flip(), pred(4, &[4]));
        // involution
        let p = pred(5, &[0, 2, 3]);
        assert_eq!(p.flip().flip(), p);
    }

    #[test]
    fn canonicalize_cases() {
        assert_eq!(pred(3, &[3]).canonicalize(), (pred(3, &[0]), true));
        assert_eq!(pred(2, &[0, 1]).canonicalize(), (pred(2, &[0, 1]), false));
        assert_eq!(
            pred(5, &[1, 2, 4]).canonicalize(),
            (pred(5, &[1, 2, 4]), false)
        );
    }

    #[test]
    fn enumerate_counts_and_order() {
        // |enumeration| = 2^r + 2^ceil((r-1)/2) - 2
        for r in 1..=6 {
            let n = enumerate_nontrivial(r).unwrap().len();
            let expect = (1usize << r) + (1usize << ((r - 1).div_ceil(2))) - 2;
            assert_eq!(n, expect, "arity {r}");
        }
        let e5 = enumerate_nontrivial(5).unwrap();
        assert_eq!(e5.len(), 34);
        assert_eq!(e5[0], pred(5, &[0]));
        assert_eq!(e5[1], pred(5, &[1]));
        assert_eq!(e5[2], pred(5, &[0, 1]));
        assert_eq!(enumerate_nontrivial(1).unwrap(), vec![pred(1, &[0])]);
        assert_eq!(enumerate_nontrivial(4).unwrap().len(), 18);
    }

    #[test]
    fn enumerated_are_canonical() {
        for r in 1..=6 {
            for p in enumerate_nontrivial(r).unwrap() {
                assert_eq!(p.canonicalize(), (p, false));
                assert!(!p.is_trivial());
            }
        }
    }

    #[test]
    fn expand_flip_is_complement() {
        for r in 1..=5 {
            for p in enumerate_nontrivial(r).unwrap() {
                let flipped = p.flip().expand().unwrap();
                assert_eq!(flipped, p.expand().unwrap().complement_tuples());
            }
        }
    }

    #[test]
    fn relation_size_matches_direct_count() {
        for r in 1..=5 {
            for p in enumerate_nontrivial(r).unwrap() {
                let direct = (0..1u32 << r).filter(|&x| p.accepts_tuple(x)).count();
                assert_eq!(p.relation_size() as usize, direct);
                assert_eq!(p.expand().unwrap().len(), direct);
            }
        }
    }

    #[test]
    fn guard_errors() {
        assert!(matches!(enumerate_nontrivial(9), Err(Error::SizeLimit(_))));
        assert!(matches!(
            SymmetricPredicate::new(3, &[4]),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn predicate_json_round_trip() {
        let p = pred(5, &[0, 2, 3]);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"arity":5,"weights":[0,2,3]}"#);
        let back: SymmetricPredicate = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
        assert!(serde_json::from_str::<SymmetricPredicate>(r#"{"arity":3,"weights":[2,1]}"#).is_err());
    }

    #[test]
    fn tuple_strings() {
        assert_eq!(tuple_to_string(0b011, 3), "110");
        assert_eq!(tuple_from_string("110").unwrap(), (0b011, 3));
    }
}
