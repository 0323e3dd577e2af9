//! Degree-t lift, t-balancedness, the upper exponent u(R), and capturing
//! polynomial certificates over prime-power residue rings.
//!
//! The balancedness test runs through the integer-span reformulation: R is
//! t-balanced iff for no rejected tuple f the vector (1, ν_t(f)) lies in the
//! integer span of {(1, ν_t(a)) : a ∈ R}.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::intlin::{smith_normal_form, IntMatrix, SpanSolver};
use crate::predicate::{binomial, tuple_from_string, tuple_to_string, SymmetricPredicate};

/// All nonempty S ⊆ [r] with |S| ≤ t, ordered by ascending size then
/// ascending bitmask. Subsets are bitmasks over coordinates 1..=r.
#[derive(Clone, Debug)]
pub struct LiftIndex {
    arity: usize,
    degree: usize,
    subsets: Vec<u32>,
}

impl LiftIndex {
    pub fn new(arity: usize, degree: usize) -> Self {
        let mut subsets: Vec<u32> = (1..1u32 << arity)
            .filter(|s| s.count_ones() as usize <= degree)
            .collect();
        subsets.sort_by_key(|s| (s.count_ones(), *s));
        debug_assert_eq!(
            subsets.len() as u64,
            (1..=degree.min(arity)).map(|s| binomial(arity, s)).sum::<u64>()
        );
        Self {
            arity,
            degree,
            subsets,
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn subsets(&self) -> &[u32] {
        &self.subsets
    }

    pub fn len(&self) -> usize {
        self.subsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subsets.is_empty()
    }
}

/// ν_t(x): the 0/1 vector of monomials Π_{i∈S} x_i over the lift index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftedPoint {
    pub coords: Vec<u8>,
    pub source: u32,
}

pub fn lift(x: u32, index: &LiftIndex) -> LiftedPoint {
    let coords = index
        .subsets
        .iter()
        .map(|&s| u8::from(x & s == s))
        .collect();
    LiftedPoint { coords, source: x }
}

/// ext(ν_t(x)) = (1, ν_t(x)) as integers.
fn ext_lift(x: u32, index: &LiftIndex) -> Vec<BigInt> {
    let mut v = Vec::with_capacity(index.len() + 1);
    v.push(BigInt::from(1));
    v.extend(
        index
            .subsets
            .iter()
            .map(|&s| BigInt::from(u8::from(x & s == s))),
    );
    v
}

#[derive(Clone, Debug)]
pub struct BalanceReport {
    pub predicate: SymmetricPredicate,
    pub degree: usize,
    pub balanced: bool,
    /// First rejected tuple (ascending bitmask) whose lift lies in the
    /// integer span; absent when balanced.
    pub violating_point: Option<u32>,
}

fn check_nontrivial(pred: &SymmetricPredicate) -> Result<()> {
    if pred.is_trivial() {
        Err(Error::TrivialPredicate)
    } else {
        Ok(())
    }
}

fn check_degree(pred: &SymmetricPredicate, t: usize) -> Result<()> {
    if t == 0 || t > pred.arity() {
        Err(Error::InvalidInput(format!(
            "degree {t} out of range for arity {}",
            pred.arity()
        )))
    } else {
        Ok(())
    }
}

/// Column matrix of ext(ν_t(a)) for a ∈ R, in ascending tuple order.
fn lifted_columns(pred: &SymmetricPredicate, index: &LiftIndex) -> Result<IntMatrix> {
    let rel = pred.expand()?;
    let cols: Vec<Vec<BigInt>> = rel.tuples().map(|a| ext_lift(a, index)).collect();
    IntMatrix::from_columns(&cols)
}

pub fn is_t_balanced(pred: &SymmetricPredicate, t: usize) -> Result<BalanceReport> {
    check_nontrivial(pred)?;
    check_degree(pred, t)?;
    let index = LiftIndex::new(pred.arity(), t);
    let solver = SpanSolver::new(&lifted_columns(pred, &index)?);
    let mut violating_point = None;
    for f in pred.falsifying_tuples() {
        if solver.contains(&ext_lift(f, &index))? {
            violating_point = Some(f);
            break;
        }
    }
    Ok(BalanceReport {
        predicate: *pred,
        degree: t,
        balanced: violating_point.is_none(),
        violating_point,
    })
}

/// Smallest t with is_t_balanced true; always ≤ r since the degree-r
/// indicator polynomial captures any falsifying tuple.
pub fn upper_exponent(pred: &SymmetricPredicate) -> Result<usize> {
    check_nontrivial(pred)?;
    for t in 1..=pred.arity() {
        if is_t_balanced(pred, t)?.balanced {
            return Ok(t);
        }
    }
    Err(Error::Incomplete(format!(
        "no balanced degree found for {pred:?}; degree r must always succeed"
    )))
}

/// A multilinear polynomial over Z/q that vanishes on R and is nonzero at
/// one falsifying tuple. Coefficients are keyed by subset bitmask, with the
/// empty subset holding the constant term; zero coefficients are omitted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CapturingPolynomial {
    pub arity: usize,
    pub degree: usize,
    pub modulus: u64,
    pub coefficients: BTreeMap<u32, u64>,
    pub target: u32,
}

impl CapturingPolynomial {
    pub fn evaluate(&self, x: u32) -> u64 {
        let mut acc: u64 = 0;
        for (&s, &c) in &self.coefficients {
            if x & s == s {
                acc = (acc + c) % self.modulus;
            }
        }
        acc
    }
}

/// Subset bitmask as a comma-joined 1-based coordinate list ("" for ∅).
fn subset_key(s: u32) -> String {
    (0..32)
        .filter(|i| s >> i & 1 == 1)
        .map(|i| (i + 1).to_string())
        .collect::<Vec<_>>()
        .join(",")
}

impl Serialize for CapturingPolynomial {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Json<'a> {
            modulus: u64,
            target: String,
            degree: usize,
            coefficients: Coeffs<'a>,
        }
        struct Coeffs<'a>(&'a BTreeMap<u32, u64>);
        impl Serialize for Coeffs<'_> {
            fn serialize<S: Serializer>(
                &self,
                serializer: S,
            ) -> std::result::Result<S::Ok, S::Error> {
                let mut map = serializer.serialize_map(Some(self.0.len()))?;
                for (&s, &c) in self.0 {
                    map.serialize_entry(&subset_key(s), &c)?;
                }
                map.end()
            }
        }
        Json {
            modulus: self.modulus,
            target: tuple_to_string(self.target, self.arity),
            degree: self.degree,
            coefficients: Coeffs(&self.coefficients),
        }
        .serialize(serializer)
    }
}

impl<'de> serde::Deserialize<'de> for CapturingPolynomial {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        #[derive(serde::Deserialize)]
        struct Json {
            modulus: u64,
            target: String,
            degree: usize,
            coefficients: BTreeMap<String, u64>,
        }
        let raw = Json::deserialize(deserializer)?;
        let (target, arity) = tuple_from_string(&raw.target).map_err(D::Error::custom)?;
        let mut coefficients = BTreeMap::new();
        for (key, c) in raw.coefficients {
            let mut mask = 0u32;
            if !key.is_empty() {
                for part in key.split(',') {
                    let i: usize = part
                        .parse()
                        .map_err(|_| D::Error::custom("bad subset key"))?;
                    if i == 0 || i > arity {
                        return Err(D::Error::custom("subset coordinate out of range"));
                    }
                    mask |= 1 << (i - 1);
                }
            }
            coefficients.insert(mask, c);
        }
        Ok(CapturingPolynomial {
            arity,
            degree: raw.degree,
            modulus: raw.modulus,
            coefficients,
            target,
        })
    }
}

/// True iff the polynomial vanishes on every tuple of R, is nonzero at its
/// target, and respects the degree bound.
pub fn verify_capturing(poly: &CapturingPolynomial, pred: &SymmetricPredicate) -> bool {
    if poly.arity != pred.arity() || poly.modulus < 2 {
        return false;
    }
    if poly
        .coefficients
        .keys()
        .any(|s| s.count_ones() as usize > poly.degree)
    {
        return false;
    }
    if !poly.coefficients.values().any(|&c| c % poly.modulus != 0) {
        return false;
    }
    for y in 0..1u32 << pred.arity() {
        let v = poly.evaluate(y);
        if pred.accepts_tuple(y) {
            if v != 0 {
                return false;
            }
        } else if y == poly.target && v == 0 {
            return false;
        }
    }
    poly.evaluate(poly.target) != 0
}

fn factorize_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Candidate prime-power moduli derived from the elementary divisors of the
/// lifted matrix: p^a for p dividing a nonzero divisor, a up to the largest
/// p-adic valuation plus one; primes 2 and 3 are added when the lifted
/// columns do not span the full space over the rationals.
fn candidate_moduli(diagonal: &[BigInt], full_rank_dim: usize) -> Vec<u64> {
    let mut prime_maxval: BTreeMap<u64, u32> = BTreeMap::new();
    let rank = diagonal.iter().filter(|d| !d.is_zero()).count();
    for d in diagonal {
        if d.is_zero() {
            continue;
        }
        let d64 = u64::try_from(d.clone()).expect("elementary divisor fits u64");
        for (p, e) in factorize_u64(d64) {
            let entry = prime_maxval.entry(p).or_insert(0);
            *entry = (*entry).max(e);
        }
    }
    let mut candidates = std::collections::BTreeSet::new();
    for (p, maxval) in prime_maxval {
        let mut q = 1u64;
        for _ in 0..=maxval {
            q *= p;
            candidates.insert(q);
        }
    }
    if rank < full_rank_dim {
        candidates.insert(2);
        candidates.insert(3);
    }
    candidates.into_iter().collect()
}

/// Extract a verified degree-≤t capturing polynomial for f ∉ R, assuming
/// ext(ν_t(f)) is outside the integer span of the lifted relation.
pub fn find_capturing_polynomial(
    pred: &SymmetricPredicate,
    f: u32,
    t: usize,
) -> Result<CapturingPolynomial> {
    check_nontrivial(pred)?;
    check_degree(pred, t)?;
    if pred.accepts_tuple(f) {
        return Err(Error::NoCertificate(format!(
            "tuple {} lies in the relation",
            tuple_to_string(f, pred.arity())
        )));
    }
    let index = LiftIndex::new(pred.arity(), t);
    let columns = lifted_columns(pred, &index)?;
    let target_ext = ext_lift(f, &index);
    let snf = smith_normal_form(&columns);
    {
        let solver_input: Vec<BigInt> = target_ext.clone();
        if SpanSolver::new(&columns).contains(&solver_input)? {
            return Err(Error::NoCertificate(format!(
                "lift of {} lies in the integer span; no degree-{t} capture exists",
                tuple_to_string(f, pred.arity())
            )));
        }
    }
    let ext_dim = index.len() + 1;
    for q in candidate_moduli(&snf.diagonal, ext_dim) {
        let big_q = BigInt::from(q);
        for alpha in crate::intlin::left_nullspace_mod(&columns, q)? {
            let pairing: BigInt = alpha.iter().zip(&target_ext).map(|(a, b)| a * b).sum();
            if pairing.mod_floor(&big_q).is_zero() {
                continue;
            }
            let mut coefficients = BTreeMap::new();
            let c0 = u64::try_from(alpha[0].mod_floor(&big_q)).unwrap();
            if c0 != 0 {
                coefficients.insert(0u32, c0);
            }
            for (j, &s) in index.subsets().iter().enumerate() {
                let c = u64::try_from(alpha[j + 1].mod_floor(&big_q)).unwrap();
                if c != 0 {
                    coefficients.insert(s, c);
                }
            }
            let poly = CapturingPolynomial {
                arity: pred.arity(),
                degree: t,
                modulus: q,
                coefficients,
                target: f,
            };
            if verify_capturing(&poly, pred) {
                return Ok(poly);
            }
        }
    }
    Err(Error::Incomplete(format!(
        "modulus candidates exhausted for {pred:?}, f={}, t={t}",
        tuple_to_string(f, pred.arity())
    )))
}

/// A violation found by the alternating-sum oracle: the rejected tuple whose
/// lift was reached, plus the summands a⁽¹⁾, a⁽²⁾, … from R.
#[derive(Clone, Debug)]
pub struct AlternatingViolation {
    pub tuple: u32,
    pub summands: Vec<u32>,
}

/// Exhaustive search for an odd alternating sum of lifted R-tuples landing
/// in X_t ∖ R^(t). Independent of the integer-span machinery; any violation
/// it returns implies is_t_balanced reports not balanced.
pub fn alternating_sum_oracle(
    pred: &SymmetricPredicate,
    t: usize,
    m_max: usize,
) -> Result<Option<AlternatingViolation>> {
    check_nontrivial(pred)?;
    check_degree(pred, t)?;
    if m_max.is_multiple_of(2) || m_max > 7 {
        return Err(Error::GuardExceeded(format!(
            "m_max must be odd and at most 7, got {m_max}"
        )));
    }
    let index = LiftIndex::new(pred.arity(), t);
    let accepted: Vec<u32> = pred.expand()?.tuples().collect();
    // X_t membership: map lift coords back to the (unique) source tuple.
    let cube: BTreeMap<Vec<i64>, u32> = (0..1u32 << pred.arity())
        .map(|x| {
            (
                lift(x, &index).coords.iter().map(|&c| c as i64).collect(),
                x,
            )
        })
        .collect();
    let lifts: Vec<Vec<i64>> = accepted
        .iter()
        .map(|&a| lift(a, &index).coords.iter().map(|&c| c as i64).collect())
        .collect();

    let mut m = 3;
    while m <= m_max {
        let mut picks = vec![0usize; m];
        loop {
            let mut sum = vec![0i64; index.len()];
            for (pos, &pick) in picks.iter().enumerate() {
                let sign = if pos % 2 == 0 { 1 } else { -1 };
                for (s, v) in sum.iter_mut().zip(&lifts[pick]) {
                    *s += sign * v;
                }
            }
            if sum.iter().all(|&v| v == 0 || v == 1) {
                if let Some(&x) = cube.get(&sum) {
                    if !pred.accepts_tuple(x) {
                        return Ok(Some(AlternatingViolation {
                            tuple: x,
                            summands: picks.iter().map(|&i| accepted[i]).collect(),
                        }));
                    }
                }
            }
            // odometer over R^m
            let mut pos = m;
            loop {
                if pos == 0 {
                    break;
                }
                pos -= 1;
                picks[pos] += 1;
                if picks[pos] < accepted.len() {
                    break;
                }
                picks[pos] = 0;
            }
            if pos == 0 && picks[0] == 0 {
                break;
            }
        }
        m += 2;
    }
    Ok(None)
}

/// Exhaustive coefficient search for a capturing polynomial; the independent
/// oracle for certificate extraction. Coefficients range over
/// [0, min(q-1, coefficient_bound)] for each modulus q in turn.
pub fn brute_force_capture_oracle(
    pred: &SymmetricPredicate,
    f: u32,
    t: usize,
    moduli: &[u64],
    coefficient_bound: u64,
) -> Result<Option<CapturingPolynomial>> {
    check_nontrivial(pred)?;
    check_degree(pred, t)?;
    let index = LiftIndex::new(pred.arity(), t);
    if pred.arity() > 3 && index.len() > 8 {
        return Err(Error::GuardExceeded(format!(
            "brute-force capture limited to r <= 3 or at most 8 lift subsets, got {}",
            index.len()
        )));
    }
    if moduli.iter().any(|&q| !(2..=9).contains(&q)) {
        return Err(Error::GuardExceeded(
            "brute-force moduli limited to 2..=9".into(),
        ));
    }
    if pred.accepts_tuple(f) {
        return Ok(None);
    }
    let n_coeffs = index.len() + 1;
    for &q in moduli {
        let cap = coefficient_bound.min(q - 1);
        let mut assign = vec![0u64; n_coeffs];
        'search: loop {
            // advance odometer; skip the all-zero polynomial at start
            let mut pos = n_coeffs;
            loop {
                if pos == 0 {
                    break 'search;
                }
                pos -= 1;
                assign[pos] += 1;
                if assign[pos] <= cap {
                    break;
                }
                assign[pos] = 0;
            }
            let mut coefficients = BTreeMap::new();
            if assign[0] != 0 {
                coefficients.insert(0u32, assign[0]);
            }
            for (j, &s) in index.subsets().iter().enumerate() {
                if assign[j + 1] != 0 {
                    coefficients.insert(s, assign[j + 1]);
                }
            }
            let poly = CapturingPolynomial {
                arity: pred.arity(),
                degree: t,
                modulus: q,
                coefficients,
                target: f,
            };
            if verify_capturing(&poly, pred) {
                return Ok(Some(poly));
            }
        }
    }
    Ok(None)
}
