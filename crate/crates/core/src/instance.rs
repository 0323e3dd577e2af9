//! Concrete CSP instances at desk scale: satisfaction, exhaustive
//! non-redundancy checking (plain and conditional), canonical constructions,
//! and desugaring of the literal model into the simple positive model.
//!
//! Assignments are n-bit masks; witness searches scan them in ascending
//! order so reports are deterministic.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::predicate::SymmetricPredicate;

/// Default ceiling on the exhaustive 2^n assignment scan; NRD_MAX_N
/// overrides it (at your own risk).
pub fn max_n_guard() -> usize {
    std::env::var("NRD_MAX_N")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(24)
}

/// A simple positive instance: every scope is an r-tuple of distinct
/// variables, and no scope repeats (set-equal scopes count as repeats since
/// the predicate is symmetric).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Instance {
    pub n: usize,
    pub predicate: SymmetricPredicate,
    pub constraints: Vec<Vec<usize>>,
}

impl Instance {
    pub fn new(n: usize, predicate: SymmetricPredicate, constraints: Vec<Vec<usize>>) -> Result<Self> {
        let inst = Self {
            n,
            predicate,
            constraints,
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<()> {
        let r = self.predicate.arity();
        let mut seen = std::collections::BTreeSet::new();
        for scope in &self.constraints {
            if scope.len() != r {
                return Err(Error::InvalidInput(format!(
                    "scope {scope:?} does not match arity {r}"
                )));
            }
            if scope.iter().any(|&v| v >= self.n) {
                return Err(Error::InvalidInput(format!(
                    "scope {scope:?} has a variable outside [0, {})",
                    self.n
                )));
            }
            let mut sorted = scope.clone();
            sorted.sort_unstable();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidInput(format!(
                    "scope {scope:?} repeats a variable"
                )));
            }
            // a duplicate constraint is definitionally redundant
            if !seen.insert(sorted) {
                return Err(Error::InvalidInput(format!(
                    "duplicate scope {scope:?}"
                )));
            }
        }
        Ok(())
    }

    fn scope_weight(&self, scope: &[usize], assignment: u32) -> usize {
        scope
            .iter()
            .filter(|&&v| assignment >> v & 1 == 1)
            .count()
    }

    pub fn constraint_satisfied(&self, idx: usize, assignment: u32) -> bool {
        self.predicate
            .accepts_weight(self.scope_weight(&self.constraints[idx], assignment))
    }

    /// Per-constraint truth values under the assignment.
    pub fn evaluate(&self, assignment: u32) -> Vec<bool> {
        (0..self.constraints.len())
            .map(|i| self.constraint_satisfied(i, assignment))
            .collect()
    }

    fn check_guard(&self) -> Result<()> {
        let limit = max_n_guard();
        if self.n > limit || self.n > 31 {
            return Err(Error::GuardExceeded(format!(
                "exhaustive scan needs n <= {limit}, got {}",
                self.n
            )));
        }
        Ok(())
    }

    /// For each constraint, the least assignment satisfying every other
    /// constraint while falsifying it.
    pub fn non_redundancy_witnesses(&self) -> Result<WitnessReport> {
        self.check_guard()?;
        let witnesses = (0..self.constraints.len())
            .map(|c| self.find_witness(c, |w| !self.predicate.accepts_weight(w)))
            .collect();
        Ok(WitnessReport::new(witnesses))
    }

    /// Conditional variant: the deleted constraint's weight must land in
    /// W(S) ∖ W(R) for the relaxed predicate S ⊇ R.
    pub fn conditional_witnesses(&self, relaxed: &SymmetricPredicate) -> Result<WitnessReport> {
        self.check_guard()?;
        if relaxed.arity() != self.predicate.arity()
            || self.predicate.weight_mask() & !relaxed.weight_mask() != 0
        {
            return Err(Error::InvalidInput(
                "relaxed predicate must accept every weight of the base predicate".into(),
            ));
        }
        let witnesses = (0..self.constraints.len())
            .map(|c| {
                self.find_witness(c, |w| {
                    relaxed.accepts_weight(w) && !self.predicate.accepts_weight(w)
                })
            })
            .collect();
        Ok(WitnessReport::new(witnesses))
    }

    fn find_witness(&self, target: usize, deleted_ok: impl Fn(usize) -> bool) -> Option<u32> {
        (0..1u32 << self.n).find(|&sigma| {
            deleted_ok(self.scope_weight(&self.constraints[target], sigma))
                && (0..self.constraints.len())
                    .all(|c| c == target || self.constraint_satisfied(c, sigma))
        })
    }
}

/// Per-constraint deletion witnesses; non_redundant iff all are present.
#[derive(Clone, Debug, Serialize)]
pub struct WitnessReport {
    pub witnesses: Vec<Option<u32>>,
    pub non_redundant: bool,
}

impl WitnessReport {
    fn new(witnesses: Vec<Option<u32>>) -> Self {
        let non_redundant = witnesses.iter().all(Option::is_some);
        Self {
            witnesses,
            non_redundant,
        }
    }

    pub fn first_missing(&self) -> Option<usize> {
        self.witnesses.iter().position(Option::is_none)
    }
}

/// One positive OR_k constraint on every k-subset of [0, n), in
/// lexicographic subset order.
pub fn or_clique_instance(k: usize, n: usize) -> Result<Instance> {
    if k < 2 || k > n || n > 24 {
        return Err(Error::InvalidInput(format!(
            "need 2 <= k <= n <= 24, got k={k}, n={n}"
        )));
    }
    let pred = SymmetricPredicate::new(k, &(1..=k).collect::<Vec<_>>())?;
    let mut scopes = Vec::new();
    let mut current: Vec<usize> = (0..k).collect();
    loop {
        scopes.push(current.clone());
        // next k-combination in lexicographic order
        let mut i = k;
        loop {
            if i == 0 {
                return Instance::new(n, pred, scopes);
            }
            i -= 1;
            if current[i] < n - (k - i) {
                current[i] += 1;
                for j in i + 1..k {
                    current[j] = current[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// ⌊n/r⌋ constraints on consecutive disjoint blocks.
pub fn block_instance(pred: &SymmetricPredicate, n: usize) -> Result<Instance> {
    if pred.is_trivial() {
        return Err(Error::TrivialPredicate);
    }
    let r = pred.arity();
    if n < r {
        return Err(Error::InvalidInput(format!(
            "n={n} smaller than arity {r}"
        )));
    }
    let scopes = (0..n / r)
        .map(|b| (b * r..(b + 1) * r).collect())
        .collect();
    Instance::new(n, *pred, scopes)
}

/// The fixed Boolean unary maps of the literal model, in the order used by
/// the desugaring variable layout.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UnaryMap {
    Id,
    Neg,
    Zero,
    One,
}

impl UnaryMap {
    pub const ALL: [UnaryMap; 4] = [UnaryMap::Id, UnaryMap::Neg, UnaryMap::Zero, UnaryMap::One];

    pub fn apply(&self, bit: bool) -> bool {
        match self {
            UnaryMap::Id => bit,
            UnaryMap::Neg => !bit,
            UnaryMap::Zero => false,
            UnaryMap::One => true,
        }
    }

    pub fn ordinal(&self) -> usize {
        match self {
            UnaryMap::Id => 0,
            UnaryMap::Neg => 1,
            UnaryMap::Zero => 2,
            UnaryMap::One => 3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Literal {
    pub var: usize,
    pub map: UnaryMap,
}

/// A literal-model instance: scope entries are (variable, unary map) pairs
/// and variable repetitions are allowed.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LiteralInstance {
    pub n: usize,
    pub predicate: SymmetricPredicate,
    pub constraints: Vec<Vec<Literal>>,
}

impl LiteralInstance {
    pub fn validate(&self) -> Result<()> {
        let r = self.predicate.arity();
        for scope in &self.constraints {
            if scope.len() != r {
                return Err(Error::InvalidInput(format!(
                    "literal scope of length {} does not match arity {r}",
                    scope.len()
                )));
            }
            if scope.iter().any(|l| l.var >= self.n) {
                return Err(Error::InvalidInput(
                    "literal scope has a variable out of range".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn constraint_satisfied(&self, idx: usize, assignment: u32) -> bool {
        let w = self.constraints[idx]
            .iter()
            .filter(|l| l.map.apply(assignment >> l.var & 1 == 1))
            .count();
        self.predicate.accepts_weight(w)
    }

    /// Exhaustive literal-model non-redundancy check (oracle use).
    pub fn non_redundancy_witnesses(&self) -> Result<WitnessReport> {
        if self.n > max_n_guard() || self.n > 31 {
            return Err(Error::GuardExceeded(format!(
                "exhaustive scan needs small n, got {}",
                self.n
            )));
        }
        let witnesses = (0..self.constraints.len())
            .map(|target| {
                (0..1u32 << self.n).find(|&sigma| {
                    !self.constraint_satisfied(target, sigma)
                        && (0..self.constraints.len())
                            .all(|c| c == target || self.constraint_satisfied(c, sigma))
                })
            })
            .collect();
        Ok(WitnessReport::new(witnesses))
    }
}

/// Variable index of the tagged copy x_i^{g,j}; j is 1-based.
pub fn desugar_index(i: usize, g: UnaryMap, j: usize, arity: usize) -> usize {
    i * (UnaryMap::ALL.len() * arity) + g.ordinal() * arity + (j - 1)
}

/// Split variables into tagged copies to turn a literal-model instance into
/// a simple positive one: {R,(g_1(x_{i_1}),…)} becomes {R,(x_{i_1}^{g_1,1},…)}.
/// The coordinate tag j keeps scope entries distinct even when the original
/// constraint repeats a variable.
pub fn desugar_literals(lit: &LiteralInstance) -> Result<Instance> {
    lit.validate()?;
    let r = lit.predicate.arity();
    let n_out = lit.n * UnaryMap::ALL.len() * r;
    let constraints = lit
        .constraints
        .iter()
        .map(|scope| {
            scope
                .iter()
                .enumerate()
                .map(|(pos, l)| desugar_index(l.var, l.map, pos + 1, r))
                .collect()
        })
        .collect();
    Instance::new(n_out, lit.predicate, constraints)
}
