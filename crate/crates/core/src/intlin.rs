//! Exact integer linear algebra over arbitrary-precision integers.
//!
//! Smith normal form with full unimodular transforms, integer linear system
//! solvability, integer-span membership, and modular left-null-space
//! generators. Matrices here stay tiny (at most 33×33), so everything is
//! dense and correctness beats speed.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(Self {
            rows: r,
            cols: c,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<BigInt>]) -> Result<Self> {
        let c = columns.len();
        let r = columns.first().map_or(0, |col| col.len());
        if columns.iter().any(|col| col.len() != r) {
            return Err(Error::DimensionMismatch("ragged columns".into()));
        }
        let mut m = Self::zero(r, c);
        for (j, col) in columns.iter().enumerate() {
            for (i, v) in col.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        Ok(m)
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|row| row.iter().map(|&v| BigInt::from(v)).collect())
                .collect(),
        )
        .expect("literal rows are rectangular")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> Vec<BigInt> {
        self.entries[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = IntMatrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Result<Vec<BigInt>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "matrix cols {} vs vector len {}",
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * &v[j]).sum())
            .collect())
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.entries.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row_i -= q * row_p
    fn row_sub_scaled(&mut self, i: usize, p: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = self.get(i, j) - q * self.get(p, j);
            self.set(i, j, v);
        }
    }

    /// col_j -= q * col_p
    fn col_sub_scaled(&mut self, j: usize, p: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let v = self.get(i, j) - q * self.get(i, p);
            self.set(i, j, v);
        }
    }

    /// row_to += row_from
    fn row_add(&mut self, to: usize, from: usize) {
        for j in 0..self.cols {
            let v = self.get(to, j) + self.get(from, j);
            self.set(to, j, v);
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -self.get(i, j);
            self.set(i, j, v);
        }
    }
}

impl std::fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for i in 0..self.rows {
            writeln!(f, "{:?}", self.row(i))?;
        }
        Ok(())
    }
}

/// U·M·V = D with U, V unimodular and D diagonal with a divisibility chain.
#[derive(Clone, Debug)]
pub struct SnfDecomposition {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    pub diagonal: Vec<BigInt>,
}

/// Smallest-magnitude nonzero entry of the submatrix starting at `p`, ties
/// broken by row then column index.
fn find_pivot(d: &IntMatrix, p: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in p..d.rows() {
        for j in p..d.cols() {
            let e = d.get(i, j);
            if e.is_zero() {
                continue;
            }
            match best {
                None => best = Some((i, j)),
                Some((bi, bj)) => {
                    if e.abs() < d.get(bi, bj).abs() {
                        best = Some((i, j));
                    }
                }
            }
        }
    }
    best
}

pub fn smith_normal_form(m: &IntMatrix) -> SnfDecomposition {
    let rows = m.rows();
    let cols = m.cols();
    let mut d = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);
    let min_dim = rows.min(cols);

    for p in 0..min_dim {
        // Loop ends via the final break or when the remaining submatrix is
        // zero (all later diagonals stay zero).
        'pivot: while let Some((pi, pj)) = find_pivot(&d, p) {
            d.swap_rows(p, pi);
            u.swap_rows(p, pi);
            d.swap_cols(p, pj);
            v.swap_cols(p, pj);

            let pivot = d.get(p, p).clone();
            for i in p + 1..rows {
                let q = d.get(i, p) / &pivot;
                d.row_sub_scaled(i, p, &q);
                u.row_sub_scaled(i, p, &q);
            }
            if (p + 1..rows).any(|i| !d.get(i, p).is_zero()) {
                continue 'pivot; // a smaller remainder exists below the pivot
            }
            for j in p + 1..cols {
                let q = d.get(p, j) / &pivot;
                d.col_sub_scaled(j, p, &q);
                v.col_sub_scaled(j, p, &q);
            }
            if (p + 1..cols).any(|j| !d.get(p, j).is_zero()) {
                continue 'pivot;
            }
            // Enforce the divisibility chain: the pivot must divide every
            // remaining entry. Folding an offending row into row p puts a
            // smaller gcd within reach of the next pivot pass.
            for i in p + 1..rows {
                for j in p + 1..cols {
                    if !(d.get(i, j) % &pivot).is_zero() {
                        d.row_add(p, i);
                        u.row_add(p, i);
                        continue 'pivot;
                    }
                }
            }
            break;
        }
        if d.get(p, p).is_negative() {
            d.negate_row(p);
            u.negate_row(p);
        }
    }

    let diagonal: Vec<BigInt> = (0..min_dim).map(|i| d.get(i, i).clone()).collect();
    SnfDecomposition { u, d, v, diagonal }
}

/// Reusable solver for `M·z = w` over the integers, factoring M once.
pub struct SpanSolver {
    snf: SnfDecomposition,
    rows: usize,
    cols: usize,
}

impl SpanSolver {
    pub fn new(m: &IntMatrix) -> Self {
        Self {
            snf: smith_normal_form(m),
            rows: m.rows(),
            cols: m.cols(),
        }
    }

    /// Returns z with M·z = w if one exists over Z.
    pub fn solve(&self, w: &[BigInt]) -> Result<Option<Vec<BigInt>>> {
        if w.len() != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "matrix rows {} vs rhs len {}",
                self.rows,
                w.len()
            )));
        }
        let y = self.snf.u.mul_vec(w)?;
        let min_dim = self.rows.min(self.cols);
        let mut x = vec![BigInt::zero(); self.cols];
        for i in 0..min_dim {
            let di = &self.snf.diagonal[i];
            if di.is_zero() {
                if !y[i].is_zero() {
                    return Ok(None);
                }
            } else {
                let (q, r) = y[i].div_rem(di);
                if !r.is_zero() {
                    return Ok(None);
                }
                x[i] = q;
            }
        }
        if y[min_dim..].iter().any(|yi| !yi.is_zero()) {
            return Ok(None);
        }
        Ok(Some(self.snf.v.mul_vec(&x)?))
    }

    pub fn contains(&self, w: &[BigInt]) -> Result<bool> {
        Ok(self.solve(w)?.is_some())
    }
}

/// Solvability of M·z = w over Z; the returned z satisfies M·z = w exactly.
pub fn solve_integer(m: &IntMatrix, w: &[BigInt]) -> Result<Option<Vec<BigInt>>> {
    let z = SpanSolver::new(m).solve(w)?;
    if let Some(z) = &z {
        debug_assert_eq!(m.mul_vec(z)?, w);
    }
    Ok(z)
}

/// Whether w lies in the integer span of the given generator vectors.
pub fn in_integer_span(generators: &[Vec<BigInt>], w: &[BigInt]) -> Result<bool> {
    if generators.is_empty() {
        return Ok(w.iter().all(|v| v.is_zero()));
    }
    if generators.iter().any(|g| g.len() != w.len()) {
        return Err(Error::DimensionMismatch(
            "generator length differs from target".into(),
        ));
    }
    let m = IntMatrix::from_columns(generators)?;
    SpanSolver::new(&m).contains(w)
}

fn reduce_mod(v: &BigInt, q: &BigInt) -> BigInt {
    v.mod_floor(q)
}

/// Generators of {α : α·M ≡ 0 (mod q)}, read off the Smith normal form:
/// with U·M·V = D, take (q / gcd(d_i, q)) · (row i of U) for each diagonal
/// index and every row of U beyond the diagonal, reduced mod q. Zero
/// generators are dropped.
pub fn left_nullspace_mod(m: &IntMatrix, q: u64) -> Result<Vec<Vec<BigInt>>> {
    if q < 2 {
        return Err(Error::InvalidInput(format!("modulus {q} < 2")));
    }
    let big_q = BigInt::from(q);
    let snf = smith_normal_form(m);
    let min_dim = m.rows().min(m.cols());
    let mut gens = Vec::new();
    for i in 0..m.rows() {
        let coeff = if i < min_dim {
            let g = snf.diagonal[i].gcd(&big_q);
            &big_q / g
        } else {
            BigInt::one()
        };
        let gen: Vec<BigInt> = snf
            .u
            .row(i)
            .iter()
            .map(|v| reduce_mod(&(v * &coeff), &big_q))
            .collect();
        if gen.iter().all(|v| v.is_zero()) {
            continue;
        }
        // α·M ≡ 0 (mod q) must hold exactly for every returned generator.
        for j in 0..m.cols() {
            let dot: BigInt = (0..m.rows()).map(|k| &gen[k] * m.get(k, j)).sum();
            assert!(
                reduce_mod(&dot, &big_q).is_zero(),
                "left-null generator failed verification"
            );
        }
        gens.push(gen);
    }
    Ok(gens)
}
