//! Exact integer matrix algebra.
//!
//! Everything here works over arbitrary-precision integers. Row-style Hermite
//! normal form and Smith normal form are the two workhorses; lattice membership,
//! index, intersection and saturation, and the structure of finitely generated
//! abelian groups are all derived from them.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Dense row-major integer matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<BigInt>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                got: entries.len(),
            });
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    /// Builds a matrix from rows of equal length; `cols` fixes the width for an
    /// empty row list.
    pub fn from_rows(cols: usize, rows: Vec<Vec<BigInt>>) -> Result<Self> {
        let mut entries = Vec::with_capacity(rows.len() * cols);
        let nrows = rows.len();
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    got: r.len(),
                });
            }
            entries.extend(r);
        }
        Ok(Self {
            rows: nrows,
            cols,
            entries,
        })
    }

    /// Convenience constructor for small literal matrices. Panics on ragged input.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        Self::from_rows(
            cols,
            rows.iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
        .expect("ragged matrix literal")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vec(&self, i: usize) -> Vec<BigInt> {
        self.row(i).to_vec()
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row_vec(i)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && *self == Self::identity(self.rows)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: other.rows,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Row vector times matrix.
    pub fn left_apply(&self, v: &[BigInt]) -> Result<Vec<BigInt>> {
        if v.len() != self.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                got: v.len(),
            });
        }
        let mut out = vec![BigInt::zero(); self.cols];
        for (i, vi) in v.iter().enumerate() {
            if vi.is_zero() {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                *o += vi * &self[(i, j)];
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                expected: self.rows * self.cols,
                got: other.rows * other.cols,
            });
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            entries,
        })
    }

    /// Stacks `other` below `self`.
    pub fn vstack(&self, other: &Self) -> Result<Self> {
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: other.cols,
            });
        }
        let mut entries = self.entries.clone();
        entries.extend(other.entries.iter().cloned());
        Ok(Self {
            rows: self.rows + other.rows,
            cols: self.cols,
            entries,
        })
    }

    /// Places `other` to the right of `self`.
    pub fn hstack(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                got: other.rows,
            });
        }
        let rows = (0..self.rows)
            .map(|i| {
                let mut r = self.row_vec(i);
                r.extend(other.row(i).iter().cloned());
                r
            })
            .collect();
        Self::from_rows(self.cols + other.cols, rows)
    }

    /// Keeps only the nonzero rows.
    pub fn nonzero_rows(&self) -> Self {
        let rows = self
            .to_rows()
            .into_iter()
            .filter(|r| r.iter().any(|x| !x.is_zero()))
            .collect();
        Self::from_rows(self.cols, rows).expect("row width preserved")
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> Result<BigInt> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        if n == 0 {
            return Ok(BigInt::one());
        }
        let mut m = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if m[(k, k)].is_zero() {
                match (k + 1..n).find(|&i| !m[(i, k)].is_zero()) {
                    Some(i) => {
                        m.swap_rows(k, i);
                        sign = -sign;
                    }
                    None => return Ok(BigInt::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &m[(i, j)] * &m[(k, k)] - &m[(i, k)] * &m[(k, j)];
                    m[(i, j)] = v / &prev;
                }
            }
            prev = m[(k, k)].clone();
        }
        Ok(sign * &m[(n - 1, n - 1)])
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

    /// row[dst] += k * row[src]
    fn add_row_multiple(&mut self, dst: usize, src: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = &self[(src, j)] * k;
            self[(dst, j)] += v;
        }
    }

    /// col[dst] += k * col[src]
    fn add_col_multiple(&mut self, dst: usize, src: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let v = &self[(i, src)] * k;
            self[(i, dst)] += v;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -&self[(i, j)];
            self[(i, j)] = v;
        }
    }

    /// Replaces rows (a, b) by (s*a + t*b, u*a + v*b).
    fn combine_rows(&mut self, a: usize, b: usize, s: &BigInt, t: &BigInt, u: &BigInt, v: &BigInt) {
        for j in 0..self.cols {
            let x = self[(a, j)].clone();
            let y = self[(b, j)].clone();
            self[(a, j)] = s * &x + t * &y;
            self[(b, j)] = u * &x + v * &y;
        }
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.entries[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.entries[i * self.cols + j]
    }
}

/// Text format: a header line `rows cols`, then one line of space-separated
/// integers per row.
impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.rows, self.cols)?;
        for i in 0..self.rows {
            let line: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

impl FromStr for IntMatrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("missing header line".into()))?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad dimension `{t}`"))))
            .collect::<Result<_>>()?;
        let [rows, cols] = dims[..] else {
            return Err(Error::Parse("header must be `rows cols`".into()));
        };
        let mut out = Vec::with_capacity(rows);
        for line in lines {
            out.push(parse_int_row(line)?);
        }
        if out.len() != rows {
            return Err(Error::DimensionMismatch {
                expected: rows,
                got: out.len(),
            });
        }
        Self::from_rows(cols, out)
    }
}

pub(crate) fn parse_int_row(line: &str) -> Result<Vec<BigInt>> {
    line.split_whitespace()
        .map(|t| {
            t.parse::<BigInt>()
                .map_err(|_| Error::Parse(format!("bad integer `{t}`")))
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Hermite normal form
// ---------------------------------------------------------------------------

/// Row-style Hermite normal form. Returns `(H, U)` with `H = U·A`, `U`
/// unimodular, `H` in row echelon form with positive pivots and the entries
/// above each pivot reduced into `[0, pivot)`. Zero rows sit at the bottom.
pub fn hnf(a: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let m = a.rows;
    let mut h = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut row = 0;
    for col in 0..a.cols {
        if row == m {
            break;
        }
        for i in row + 1..m {
            if h[(i, col)].is_zero() {
                continue;
            }
            let x = h[(row, col)].clone();
            let y = h[(i, col)].clone();
            let eg = x.extended_gcd(&y);
            let (g, s, t) = (eg.gcd, eg.x, eg.y);
            let xa = &x / &g;
            let yb = &y / &g;
            // [s t; -yb xa] has determinant s*xa + t*yb = 1
            h.combine_rows(row, i, &s, &t, &-&yb, &xa);
            u.combine_rows(row, i, &s, &t, &-&yb, &xa);
        }
        if h[(row, col)].is_zero() {
            continue;
        }
        if h[(row, col)].is_negative() {
            h.negate_row(row);
            u.negate_row(row);
        }
        let pivot = h[(row, col)].clone();
        for r in 0..row {
            let q = h[(r, col)].div_floor(&pivot);
            if !q.is_zero() {
                h.add_row_multiple(r, row, &-&q);
                u.add_row_multiple(r, row, &-&q);
            }
        }
        row += 1;
    }
    (h, u)
}

/// HNF basis of the row lattice (zero rows dropped).
pub fn hnf_basis(a: &IntMatrix) -> IntMatrix {
    hnf(a).0.nonzero_rows()
}

pub fn rank(a: &IntMatrix) -> usize {
    hnf_basis(a).rows()
}

/// Pivot column of each row of an echelon matrix.
pub(crate) fn pivot_columns(h: &IntMatrix) -> Vec<usize> {
    (0..h.rows())
        .filter_map(|i| h.row(i).iter().position(|x| !x.is_zero()))
        .collect()
}

// ---------------------------------------------------------------------------
// Smith normal form
// ---------------------------------------------------------------------------

/// `U·A·V = D` with unimodular `U`, `V` and `D` diagonal, nonnegative, with
/// each diagonal entry dividing the next.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithDecomposition {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
}

impl SmithDecomposition {
    /// The diagonal of `D` (length `min(rows, cols)`).
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.rows().min(self.d.cols()))
            .map(|i| self.d[(i, i)].clone())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|x| !x.is_zero()).count()
    }
}

pub fn snf(a: &IntMatrix) -> SmithDecomposition {
    let (m, n) = (a.rows, a.cols);
    let mut d = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut v = IntMatrix::identity(n);

    for t in 0..m.min(n) {
        // smallest nonzero entry of the trailing block becomes the pivot
        let mut best: Option<(usize, usize)> = None;
        for i in t..m {
            for j in t..n {
                if !d[(i, j)].is_zero()
                    && best.is_none_or(|(bi, bj)| d[(i, j)].abs() < d[(bi, bj)].abs())
                {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        d.swap_rows(t, pi);
        u.swap_rows(t, pi);
        d.swap_cols(t, pj);
        v.swap_cols(t, pj);

        loop {
            // bring the smallest nonzero entry of row t / column t to the pivot
            let mut best = (t, t);
            for i in t + 1..m {
                if !d[(i, t)].is_zero() && d[(i, t)].abs() < d[best].abs() {
                    best = (i, t);
                }
            }
            for j in t + 1..n {
                if !d[(t, j)].is_zero() && d[(t, j)].abs() < d[best].abs() {
                    best = (t, j);
                }
            }
            if best.0 != t {
                d.swap_rows(t, best.0);
                u.swap_rows(t, best.0);
            } else if best.1 != t {
                d.swap_cols(t, best.1);
                v.swap_cols(t, best.1);
            }

            let pivot = d[(t, t)].clone();
            let mut clean = true;
            for i in t + 1..m {
                let q = d[(i, t)].div_floor(&pivot);
                if !q.is_zero() {
                    d.add_row_multiple(i, t, &-&q);
                    u.add_row_multiple(i, t, &-&q);
                }
                clean &= d[(i, t)].is_zero();
            }
            for j in t + 1..n {
                let q = d[(t, j)].div_floor(&pivot);
                if !q.is_zero() {
                    d.add_col_multiple(j, t, &-&q);
                    v.add_col_multiple(j, t, &-&q);
                }
                clean &= d[(t, j)].is_zero();
            }
            if !clean {
                continue;
            }
            // divisibility: fold an offending row into row t and go again
            let bad = (t + 1..m).find(|&i| (t + 1..n).any(|j| !d[(i, j)].is_multiple_of(&pivot)));
            match bad {
                Some(i) => {
                    d.add_row_multiple(t, i, &BigInt::one());
                    u.add_row_multiple(t, i, &BigInt::one());
                }
                None => break,
            }
        }
        if d[(t, t)].is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
    }
    SmithDecomposition { u, d, v }
}

// ---------------------------------------------------------------------------
// Finitely generated abelian groups
// ---------------------------------------------------------------------------

/// `Z^free_rank ⊕ Z/d_1 ⊕ … ⊕ Z/d_k` with `2 ≤ d_1 | d_2 | … | d_k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AbelianGroupStructure {
    pub free_rank: usize,
    pub invariant_factors: Vec<BigInt>,
}

impl AbelianGroupStructure {
    pub fn is_free(&self) -> bool {
        self.invariant_factors.is_empty()
    }
}

impl fmt::Display for AbelianGroupStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        for d in &self.invariant_factors {
            parts.push(format!("Z/{d}"));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Structure of `Z^n / rowspace(R)` where `n = R.cols()`.
pub fn abelian_group_from_relations(r: &IntMatrix) -> AbelianGroupStructure {
    QuotientMap::new(r).structure()
}

/// Image of a vector in `Z^n / rowspace(R)`, split into free coordinates and
/// torsion coordinates (each reduced modulo its invariant factor).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuotientImage {
    pub free: Vec<BigInt>,
    pub torsion: Vec<BigInt>,
}

impl QuotientImage {
    pub fn is_torsion(&self) -> bool {
        self.free.iter().all(Zero::is_zero)
    }

    pub fn is_zero(&self) -> bool {
        self.is_torsion() && self.torsion.iter().all(Zero::is_zero)
    }
}

/// The projection `Z^n → Z^n / rowspace(R)` in Smith coordinates.
#[derive(Clone, Debug)]
pub struct QuotientMap {
    v: IntMatrix,
    diagonal: Vec<BigInt>,
    n: usize,
}

impl QuotientMap {
    pub fn new(r: &IntMatrix) -> Self {
        let s = snf(r);
        let n = r.cols();
        let mut diagonal = s.diagonal();
        diagonal.resize(n, BigInt::zero());
        Self { v: s.v, diagonal, n }
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn structure(&self) -> AbelianGroupStructure {
        AbelianGroupStructure {
            free_rank: self.diagonal.iter().filter(|d| d.is_zero()).count(),
            invariant_factors: self
                .diagonal
                .iter()
                .filter(|d| !d.is_zero() && !d.is_one())
                .cloned()
                .collect(),
        }
    }

    pub fn project(&self, x: &[BigInt]) -> Result<QuotientImage> {
        let y = self.v.left_apply(x)?;
        let mut free = Vec::new();
        let mut torsion = Vec::new();
        for (yi, di) in y.into_iter().zip(&self.diagonal) {
            if di.is_zero() {
                free.push(yi);
            } else if !di.is_one() {
                torsion.push(yi.mod_floor(di));
            }
        }
        Ok(QuotientImage { free, torsion })
    }

    /// Order of the image of `x`, or `None` when it has infinite order.
    pub fn order(&self, x: &[BigInt]) -> Result<Option<BigInt>> {
        let img = self.project(x)?;
        if !img.is_torsion() {
            return Ok(None);
        }
        let factors: Vec<&BigInt> = self
            .diagonal
            .iter()
            .filter(|d| !d.is_zero() && !d.is_one())
            .collect();
        let mut ord = BigInt::one();
        for (t, d) in img.torsion.iter().zip(factors) {
            let g = t.gcd(d);
            ord = ord.lcm(&(d / g));
        }
        Ok(Some(ord))
    }
}

// ---------------------------------------------------------------------------
// Lattices
// ---------------------------------------------------------------------------

/// Index of a sublattice of `Z^n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LatticeIndex {
    Finite(BigInt),
    Infinite,
}

impl LatticeIndex {
    pub fn finite(&self) -> Option<&BigInt> {
        match self {
            LatticeIndex::Finite(k) => Some(k),
            LatticeIndex::Infinite => None,
        }
    }
}

impl fmt::Display for LatticeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LatticeIndex::Finite(k) => write!(f, "{k}"),
            LatticeIndex::Infinite => write!(f, "infinite"),
        }
    }
}

/// Is `v` in the integer row span of `b`?
pub fn lattice_member(b: &IntMatrix, v: &[BigInt]) -> Result<bool> {
    if v.len() != b.cols() {
        return Err(Error::DimensionMismatch {
            expected: b.cols(),
            got: v.len(),
        });
    }
    let h = hnf_basis(b);
    let mut rest = v.to_vec();
    for (i, col) in pivot_columns(&h).into_iter().enumerate() {
        if rest[..col].iter().any(|x| !x.is_zero()) {
            return Ok(false);
        }
        let (q, r) = rest[col].div_rem(&h[(i, col)]);
        if !r.is_zero() {
            return Ok(false);
        }
        for (j, x) in rest.iter_mut().enumerate().skip(col) {
            *x -= &q * &h[(i, j)];
        }
    }
    Ok(rest.iter().all(Zero::is_zero))
}

/// `|det|` of a basis when it has full rank `n`, otherwise infinite.
pub fn lattice_index(b: &IntMatrix) -> LatticeIndex {
    let h = hnf_basis(b);
    if h.rows() < h.cols() {
        return LatticeIndex::Infinite;
    }
    let mut k = BigInt::one();
    for i in 0..h.rows() {
        k *= &h[(i, i)];
    }
    LatticeIndex::Finite(k)
}

/// Basis (as rows, in HNF) of `{x : x·M = 0}`.
pub fn left_kernel(m: &IntMatrix) -> IntMatrix {
    let aug = m
        .hstack(&IntMatrix::identity(m.rows()))
        .expect("identity has matching height");
    let (h, _) = hnf(&aug);
    let rows: Vec<Vec<BigInt>> = (0..h.rows())
        .filter(|&i| h.row(i)[..m.cols()].iter().all(Zero::is_zero))
        .map(|i| h.row(i)[m.cols()..].to_vec())
        .filter(|r| r.iter().any(|x| !x.is_zero()))
        .collect();
    hnf_basis(&IntMatrix::from_rows(m.rows(), rows).expect("consistent width"))
}

/// Intersection of two row lattices in `Z^n`, in HNF.
pub fn lattice_intersection(a: &IntMatrix, b: &IntMatrix) -> Result<IntMatrix> {
    if a.cols() != b.cols() {
        return Err(Error::DimensionMismatch {
            expected: a.cols(),
            got: b.cols(),
        });
    }
    let n = a.cols();
    if a.rows() == 0 || b.rows() == 0 {
        return Ok(IntMatrix::zeros(0, n));
    }
    let neg_b = IntMatrix::zeros(b.rows(), n).sub(b)?;
    let k = left_kernel(&a.vstack(&neg_b)?);
    let mut rows = Vec::new();
    for i in 0..k.rows() {
        rows.push(a.left_apply(&k.row(i)[..a.rows()])?);
    }
    Ok(hnf_basis(&IntMatrix::from_rows(n, rows)?))
}

/// `(L ⊗ Q) ∩ Z^n`, in HNF.
pub fn saturate(b: &IntMatrix) -> IntMatrix {
    let n = b.cols();
    if b.rows() == 0 {
        return IntMatrix::zeros(0, n);
    }
    // x is in the saturation iff x·k = 0 for every k with B·k = 0
    let k = left_kernel(&b.transpose());
    if k.rows() == 0 {
        return IntMatrix::identity(n);
    }
    left_kernel(&k.transpose())
}

// ---------------------------------------------------------------------------
// Unipotence and finite order
// ---------------------------------------------------------------------------

/// `true` iff `(A − I)^n = 0`.
pub fn is_unipotent(a: &IntMatrix) -> Result<bool> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows,
            cols: a.cols,
        });
    }
    let n = a.rows;
    let nilp = a.sub(&IntMatrix::identity(n))?;
    let mut p = IntMatrix::identity(n);
    for _ in 0..n {
        p = p.mul(&nilp)?;
        if p.is_zero() {
            return Ok(true);
        }
    }
    Ok(p.is_zero())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderReport {
    /// Multiplicative order, or `None` when no finite order exists within the
    /// bound for this dimension.
    pub order: Option<u64>,
    pub unipotent: bool,
}

/// Smallest dimension of a faithful rational representation of `Z/m`.
fn min_rational_dimension(m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut rest = m;
    let mut sum = 0;
    let mut p = 2;
    while p * p <= rest {
        if rest.is_multiple_of(p) {
            let mut pk = 1;
            while rest.is_multiple_of(p) {
                rest /= p;
                pk *= p;
            }
            sum += pk / p * (p - 1);
        }
        p += 1;
    }
    if rest > 1 {
        sum += rest - 1;
    }
    // Z/2 sits inside Z/(2k) for odd k at no extra cost
    if m % 4 == 2 && m > 2 {
        sum -= 1;
    }
    sum
}

/// Largest possible order of a finite-order element of `GL_n(Z)`.
pub fn max_finite_order(n: usize) -> u64 {
    if n <= 4 {
        return 12;
    }
    // orders are bounded by exp(O(sqrt(n log n))); 10^5 covers every n up to 30
    (1..100_000u64)
        .filter(|&m| min_rational_dimension(m) <= n as u64)
        .max()
        .unwrap_or(1)
}

/// Detects finite order by power iteration up to [`max_finite_order`] and
/// reports unipotence alongside.
pub fn finite_order_semisimple_check(a: &IntMatrix) -> Result<OrderReport> {
    let det = a.determinant()?;
    if det.abs() != BigInt::one() {
        return Err(Error::NotUnimodular);
    }
    let n = a.rows;
    let bound = max_finite_order(n);
    let mut p = a.clone();
    let mut order = None;
    for k in 1..=bound {
        if p.is_identity() {
            order = Some(k);
            break;
        }
        p = p.mul(a)?;
    }
    Ok(OrderReport {
        order,
        unipotent: is_unipotent(a)?,
    })
}

pub(crate) fn to_i64_vec(v: &[BigInt]) -> Result<Vec<i64>> {
    v.iter()
        .map(|x| x.to_i64().ok_or_else(|| Error::Overflow(x.to_string())))
        .collect()
}

#[cfg(test)]
fn big_vec(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}
