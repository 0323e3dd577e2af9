//! Full classification of non-trivial symmetric predicates of a given
//! arity: one record per flip-canonical representative with |R|, the
//! upper exponent u, the lower exponent l, and the mismatch flag.

use serde::Serialize;

use crate::balance::upper_exponent;
use crate::cube::lower_exponent;
use crate::error::Result;
use crate::predicate::{enumerate_nontrivial, format_weight_set, SymmetricPredicate};

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct ClassificationRecord {
    pub index: usize,
    pub predicate: SymmetricPredicate,
    pub relation_size: u64,
    pub upper_exponent: usize,
    pub lower_exponent: usize,
    pub mismatch: bool,
}

fn classify_one(index: usize, pred: SymmetricPredicate) -> Result<ClassificationRecord> {
    let u = upper_exponent(&pred)?;
    let l = lower_exponent(&pred)?;
    Ok(ClassificationRecord {
        index,
        predicate: pred,
        relation_size: pred.relation_size(),
        upper_exponent: u,
        lower_exponent: l,
        mismatch: u != l,
    })
}

#[cfg(feature = "parallel")]
fn classify_all(preds: Vec<SymmetricPredicate>, parallel: bool) -> Result<Vec<ClassificationRecord>> {
    use rayon::prelude::*;
    if parallel {
        preds
            .into_par_iter()
            .enumerate()
            .map(|(i, p)| classify_one(i + 1, p))
            .collect()
    } else {
        preds
            .into_iter()
            .enumerate()
            .map(|(i, p)| classify_one(i + 1, p))
            .collect()
    }
}

#[cfg(not(feature = "parallel"))]
fn classify_all(preds: Vec<SymmetricPredicate>, _parallel: bool) -> Result<Vec<ClassificationRecord>> {
    preds
        .into_iter()
        .enumerate()
        .map(|(i, p)| classify_one(i + 1, p))
        .collect()
}

/// Classify every non-trivial canonical predicate of arity `r`, in
/// enumeration order. Output is identical with and without `parallel`.
pub fn classify_arity(r: usize, parallel: bool) -> Result<Vec<ClassificationRecord>> {
    classify_all(enumerate_nontrivial(r)?, parallel)
}

pub fn render_csv(records: &[ClassificationRecord]) -> String {
    let mut out = String::from("idx,W,|R|,u,l,mismatch\n");
    for rec in records {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            rec.index,
            format_weight_set(&rec.predicate),
            rec.relation_size,
            rec.upper_exponent,
            rec.lower_exponent,
            if rec.mismatch { "yes" } else { "no" },
        ));
    }
    out
}

pub fn render_json(records: &[ClassificationRecord]) -> String {
    let mut s = serde_json::to_string_pretty(records).expect("records serialize");
    s.push('\n');
    s
}

pub fn render_markdown(records: &[ClassificationRecord]) -> String {
    let mut out = String::from("| idx | W | \\|R\\| | u | l | mismatch |\n");
    out.push_str("|---|---|---|---|---|---|\n");
    for rec in records {
        out.push_str(&format!(
            "| {} | {} | {} | {} | {} | {} |\n",
            rec.index,
            format_weight_set(&rec.predicate),
            rec.relation_size,
            rec.upper_exponent,
            rec.lower_exponent,
            if rec.mismatch { "yes" } else { "no" },
        ));
    }
    out
}
