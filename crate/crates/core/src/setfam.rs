//! Extremal set-family machinery for the exceptional arity-5 predicates:
//! pairwise-restricted-intersection families and the generalized
//! witness-set check.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::predicate::SymmetricPredicate;

/// A family of s-subsets of [0, n), each stored as a bitmask.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Family {
    n: usize,
    block_size: usize,
    sets: Vec<u32>,
}

impl Family {
    pub fn new(n: usize, block_size: usize, sets: Vec<u32>) -> Result<Self> {
        if n > 30 || block_size > n {
            return Err(Error::InvalidInput(format!(
                "need block_size <= n <= 30, got s={block_size}, n={n}"
            )));
        }
        let mut seen = BTreeSet::new();
        for &s in &sets {
            if s >> n != 0 {
                return Err(Error::InvalidInput("set element out of range".into()));
            }
            if s.count_ones() as usize != block_size {
                return Err(Error::InvalidInput(format!(
                    "set has {} elements, expected {block_size}",
                    s.count_ones()
                )));
            }
            if !seen.insert(s) {
                return Err(Error::InvalidInput("duplicate set in family".into()));
            }
        }
        Ok(Self {
            n,
            block_size,
            sets,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn block_size(&self) -> usize {
        self.block_size
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn sets(&self) -> &[u32] {
        &self.sets
    }
}

fn mask_to_elements(mask: u32) -> Vec<usize> {
    (0..32).filter(|i| mask >> i & 1 == 1).collect()
}

fn elements_to_mask(elems: &[usize]) -> u32 {
    elems.iter().fold(0, |m, &e| m | 1 << e)
}

#[derive(Serialize, Deserialize)]
struct FamilyJson {
    n: usize,
    block_size: usize,
    sets: Vec<Vec<usize>>,
}

impl Serialize for Family {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        FamilyJson {
            n: self.n,
            block_size: self.block_size,
            sets: self.sets.iter().map(|&s| mask_to_elements(s)).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Family {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = FamilyJson::deserialize(deserializer)?;
        let sets = raw
            .sets
            .iter()
            .map(|elems| {
                let mask = elements_to_mask(elems);
                if mask.count_ones() as usize != elems.len() {
                    return Err(D::Error::custom("set repeats an element"));
                }
                Ok(mask)
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Family::new(raw.n, raw.block_size, sets).map_err(D::Error::custom)
    }
}

/// First pair (in list order) with |A ∩ B| outside the allowed set.
pub fn check_pairwise(fam: &Family, allowed: &BTreeSet<usize>) -> Option<(usize, usize)> {
    for i in 0..fam.sets.len() {
        for j in i + 1..fam.sets.len() {
            let inter = (fam.sets[i] & fam.sets[j]).count_ones() as usize;
            if !allowed.contains(&inter) {
                return Some((i, j));
            }
        }
    }
    None
}

/// All s-subsets of [0, n) in ascending bitmask order (Gosper's hack), so
/// the subsets of a smaller prefix of the ground set are enumerated first.
fn all_subsets(n: usize, s: usize) -> Vec<u32> {
    if s == 0 || s > n {
        return Vec::new();
    }
    let mut out = Vec::new();
    let limit = 1u32 << n;
    let mut mask = (1u32 << s) - 1;
    while mask < limit {
        out.push(mask);
        let low = mask & mask.wrapping_neg();
        let ripple = mask + low;
        mask = ripple | (((mask ^ ripple) >> 2) / low);
    }
    out
}

/// Greedy family: scan all s-subsets (seed 0 = lexicographic, otherwise a
/// seeded shuffle) and keep each set compatible with everything kept so far.
pub fn greedy_family(
    n: usize,
    s: usize,
    allowed: &BTreeSet<usize>,
    order_seed: u64,
) -> Result<Family> {
    if s > n || n > 30 {
        return Err(Error::InvalidInput(format!(
            "need s <= n <= 30, got s={s}, n={n}"
        )));
    }
    let mut candidates = all_subsets(n, s);
    if order_seed != 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(order_seed);
        candidates.shuffle(&mut rng);
    }
    let mut kept: Vec<u32> = Vec::new();
    for c in candidates {
        if kept
            .iter()
            .all(|&k| allowed.contains(&((k & c).count_ones() as usize)))
        {
            kept.push(c);
        }
    }
    Family::new(n, s, kept)
}

/// Result of the exact maximum-family search. `exact` is false when the
/// node budget ran out, in which case the family is only a lower bound.
#[derive(Clone, Debug)]
pub struct MaxFamilyResult {
    pub family: Family,
    pub exact: bool,
}

struct CliqueSearch<'a> {
    adj: &'a [Vec<u64>],
    best: Vec<usize>,
    nodes: u64,
    budget: u64,
    exhausted: bool,
}

fn adj_has(adj: &[Vec<u64>], a: usize, b: usize) -> bool {
    adj[a][b / 64] >> (b % 64) & 1 == 1
}

impl CliqueSearch<'_> {
    /// Greedy colouring upper bound; candidates are processed in the
    /// returned order (vertices of high colour first).
    fn color_sort(&self, cand: &[usize]) -> Vec<(usize, usize)> {
        let mut colored: Vec<(usize, usize)> = Vec::with_capacity(cand.len());
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for &v in cand {
            let mut placed = false;
            for (ci, class) in classes.iter_mut().enumerate() {
                if class.iter().all(|&u| !adj_has(self.adj, u, v)) {
                    class.push(v);
                    colored.push((v, ci + 1));
                    placed = true;
                    break;
                }
            }
            if !placed {
                classes.push(vec![v]);
                colored.push((v, classes.len()));
            }
        }
        colored.sort_by_key(|&(v, c)| (c, v));
        colored
    }

    fn expand(&mut self, clique: &mut Vec<usize>, cand: Vec<usize>) {
        self.nodes += 1;
        if self.nodes > self.budget {
            self.exhausted = true;
            return;
        }
        let colored = self.color_sort(&cand);
        for idx in (0..colored.len()).rev() {
            let (v, color) = colored[idx];
            if clique.len() + color <= self.best.len() {
                return; // colouring bound prunes the rest
            }
            clique.push(v);
            let next: Vec<usize> = colored[..idx]
                .iter()
                .map(|&(u, _)| u)
                .filter(|&u| adj_has(self.adj, u, v))
                .collect();
            if clique.len() > self.best.len() {
                self.best = clique.clone();
            }
            if !next.is_empty() {
                self.expand(clique, next);
            }
            clique.pop();
            if self.exhausted {
                return;
            }
        }
    }
}

/// Maximum-cardinality family with all pairwise intersections in `allowed`,
/// found as a maximum clique of the compatibility graph by branch and bound
/// with a greedy colouring bound.
pub fn exact_max_family(
    n: usize,
    s: usize,
    allowed: &BTreeSet<usize>,
    node_budget: u64,
) -> Result<MaxFamilyResult> {
    if s > n || n > 30 {
        return Err(Error::InvalidInput(format!(
            "need s <= n <= 30, got s={s}, n={n}"
        )));
    }
    let subsets = all_subsets(n, s);
    if subsets.len() > 20_000 {
        return Err(Error::GuardExceeded(format!(
            "C({n},{s}) = {} exceeds the 20000-vertex ceiling",
            subsets.len()
        )));
    }
    let m = subsets.len();
    let words = m.div_ceil(64);
    let mut adj = vec![vec![0u64; words]; m];
    for a in 0..m {
        for b in a + 1..m {
            if allowed.contains(&((subsets[a] & subsets[b]).count_ones() as usize)) {
                adj[a][b / 64] |= 1 << (b % 64);
                adj[b][a / 64] |= 1 << (a % 64);
            }
        }
    }
    let mut search = CliqueSearch {
        adj: &adj,
        best: Vec::new(),
        nodes: 0,
        budget: node_budget,
        exhausted: false,
    };
    search.expand(&mut Vec::new(), (0..m).collect());
    let mut picked: Vec<u32> = search.best.iter().map(|&i| subsets[i]).collect();
    picked.sort_unstable();
    let family = Family::new(n, s, picked)?;
    debug_assert!(check_pairwise(&family, allowed).is_none());
    Ok(MaxFamilyResult {
        family,
        exact: !search.exhausted,
    })
}

/// Target condition on |A ∩ X_A| for the witness search.
#[derive(Clone, Debug)]
pub enum WitnessTarget {
    /// |A ∩ X_A| ∉ W (the plain g_W condition).
    OutsideW,
    /// |A ∩ X_A| ∈ T (the conditional variant, e.g. T = {5}).
    In(BTreeSet<usize>),
}

#[derive(Clone, Debug)]
pub struct WitnessFamilyReport {
    /// Per-set witness X_A as a bitmask, least such subset if any.
    pub witnesses: Vec<Option<u32>>,
    pub valid: bool,
}

impl Serialize for WitnessFamilyReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = serializer.serialize_struct("WitnessFamilyReport", 2)?;
        let lists: Vec<Option<Vec<usize>>> = self
            .witnesses
            .iter()
            .map(|w| w.map(mask_to_elements))
            .collect();
        st.serialize_field("witnesses", &lists)?;
        st.serialize_field("valid", &self.valid)?;
        st.end()
    }
}

/// For each A ∈ F, the least X_A ⊆ [0, n) with |A ∩ X_A| meeting the target
/// condition and |B ∩ X_A| ∈ W for every other member B.
pub fn check_witness_family(
    fam: &Family,
    w: &BTreeSet<usize>,
    target: &WitnessTarget,
) -> Result<WitnessFamilyReport> {
    if fam.n > 20 {
        return Err(Error::GuardExceeded(format!(
            "witness search scans 2^n subsets; need n <= 20, got {}",
            fam.n
        )));
    }
    let meets = |inter: usize| match target {
        WitnessTarget::OutsideW => !w.contains(&inter),
        WitnessTarget::In(t) => t.contains(&inter),
    };
    let witnesses: Vec<Option<u32>> = fam
        .sets
        .iter()
        .enumerate()
        .map(|(ai, &a)| {
            (0..1u32 << fam.n).find(|&x| {
                meets((a & x).count_ones() as usize)
                    && fam
                        .sets
                        .iter()
                        .enumerate()
                        .all(|(bi, &b)| bi == ai || w.contains(&((b & x).count_ones() as usize)))
            })
        })
        .collect();
    let valid = witnesses.iter().all(Option::is_some);
    Ok(WitnessFamilyReport { witnesses, valid })
}

/// One constraint per family member, scopes sorted ascending.
pub fn family_to_instance(fam: &Family, pred: &SymmetricPredicate) -> Result<Instance> {
    if pred.arity() != fam.block_size {
        return Err(Error::InvalidInput(format!(
            "predicate arity {} does not match block size {}",
            pred.arity(),
            fam.block_size
        )));
    }
    let constraints = fam.sets.iter().map(|&s| mask_to_elements(s)).collect();
    Instance::new(fam.n, *pred, constraints)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn allowed_124() -> BTreeSet<usize> {
        [1, 2, 4].into_iter().collect()
    }

    fn six_five_subsets() -> Family {
        Family::new(6, 5, all_subsets(6, 5)).unwrap()
    }

    #[test]
    fn pairwise_examples() {
        assert!(check_pairwise(&six_five_subsets(), &allowed_124()).is_none());
        let disjoint = Family::new(10, 5, vec![0b11111, 0b1111100000]).unwrap();
        assert_eq!(check_pairwise(&disjoint, &allowed_124()), Some((0, 1)));
        let single = Family::new(6, 5, vec![0b11111]).unwrap();
        assert!(check_pairwise(&single, &allowed_124()).is_none());
    }

    #[test]
    fn greedy_examples() {
        assert_eq!(greedy_family(6, 5, &allowed_124(), 0).unwrap().len(), 6);
        assert_eq!(greedy_family(5, 5, &allowed_124(), 0).unwrap().len(), 1);
        assert!(greedy_family(7, 5, &allowed_124(), 0).unwrap().len() >= 6);
    }

    #[test]
    fn greedy_always_passes_pairwise() {
        for n in 5..=12 {
            for seed in [0u64, 1, 42] {
                let fam = greedy_family(n, 5, &allowed_124(), seed).unwrap();
                assert!(check_pairwise(&fam, &allowed_124()).is_none());
            }
        }
    }

    #[test]
    fn exact_max_examples() {
        let res = exact_max_family(6, 5, &allowed_124(), 1_000_000).unwrap();
        assert!(res.exact);
        assert_eq!(res.family.len(), 6);
        let res = exact_max_family(5, 5, &allowed_124(), 1_000_000).unwrap();
        assert_eq!(res.family.len(), 1);
        let zero_only: BTreeSet<usize> = [0].into_iter().collect();
        let res = exact_max_family(6, 5, &zero_only, 1_000_000).unwrap();
        assert_eq!(res.family.len(), 1);
    }

    #[test]
    fn exact_at_least_greedy() {
        for n in 5..=8 {
            let g = greedy_family(n, 5, &allowed_124(), 0).unwrap();
            let e = exact_max_family(n, 5, &allowed_124(), 10_000_000).unwrap();
            assert!(e.exact);
            assert!(e.family.len() >= g.len(), "n={n}");
        }
    }

    #[test]
    fn witness_family_examples() {
        let fam = six_five_subsets();
        let t5 = WitnessTarget::In([5].into_iter().collect());
        let rep = check_witness_family(&fam, &allowed_124(), &t5).unwrap();
        assert!(rep.valid);
        // X_A = A works for each A; the least witness is A itself
        for (i, &a) in fam.sets().iter().enumerate() {
            assert_eq!(rep.witnesses[i], Some(a));
        }
        let empty = Family::new(6, 5, vec![]).unwrap();
        let rep = check_witness_family(&empty, &allowed_124(), &WitnessTarget::OutsideW).unwrap();
        assert!(rep.valid);
    }

    #[test]
    fn family_json_round_trip() {
        let fam = six_five_subsets();
        let s = serde_json::to_string(&fam).unwrap();
        let back: Family = serde_json::from_str(&s).unwrap();
        assert_eq!(back, fam);
        assert!(s.starts_with(r#"{"n":6,"block_size":5,"sets":[[0,1,2,3,4]"#));
    }

    #[test]
    fn instance_bridge() {
        let r124 = SymmetricPredicate::new(5, &[1, 2, 4]).unwrap();
        let inst = family_to_instance(&six_five_subsets(), &r124).unwrap();
        assert_eq!(inst.constraints.len(), 6);
    }
}
