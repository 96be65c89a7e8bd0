//! Exact arithmetic over GF(q) with q = p^2, realized as Z[j]/pZ[j].
//!
//! For a prime p = 3 (mod 4), -1 is a quadratic non-residue mod p, so p
//! stays prime in Z[j] and the quotient Z[j]/pZ[j] is a field with p^2
//! elements. An element is stored as the pair (a, b) with a, b in [0, p)
//! representing a + jb under the natural mapping g; reduction of a
//! Gaussian-integer matrix is written [.]_q and acts componentwise on real
//! and imaginary parts.
//!
//! ```
//! use apcof::gfq::{FieldCtx, GfqElem};
//!
//! let ctx = FieldCtx::new(3).unwrap();
//! let x = GfqElem::new(1, 1); // 1 + j
//! assert_eq!(ctx.mul(x, x), GfqElem::new(0, 2)); // (1+j)^2 = 2j
//! assert_eq!(ctx.mul(x, ctx.inv(x).unwrap()), ctx.one());
//! ```

use crate::error::{Error, Result};
use crate::gaussian::{GaussInt, GaussianIntMatrix};
use rand::Rng;
use std::fmt;
use std::ops::{Index, IndexMut};

/// Field context for GF(p^2); immutable and freely shareable.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FieldCtx {
    p: u32,
}

/// One element of GF(p^2): the pair (re, im) with both components in [0, p).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct GfqElem {
    pub re: u32,
    pub im: u32,
}

impl GfqElem {
    pub const ZERO: GfqElem = GfqElem { re: 0, im: 0 };

    pub fn new(re: u32, im: u32) -> Self {
        GfqElem { re, im }
    }

    pub fn is_zero(self) -> bool {
        self.re == 0 && self.im == 0
    }

    /// Lift back to a canonical Gaussian integer with components in [0, p).
    pub fn to_gauss(self) -> GaussInt {
        GaussInt::new(self.re as i64, self.im as i64)
    }
}

impl fmt::Debug for GfqElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.re, self.im)
    }
}

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

impl FieldCtx {
    /// Builds the field context; rejects p that is composite or splits in Z[j].
    pub fn new(p: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if p % 4 != 3 {
            return Err(Error::NotGaussianPrime(p));
        }
        Ok(FieldCtx { p })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn q(&self) -> u64 {
        self.p as u64 * self.p as u64
    }

    pub fn zero(&self) -> GfqElem {
        GfqElem::ZERO
    }

    pub fn one(&self) -> GfqElem {
        GfqElem::new(1, 0)
    }

    /// Canonicalize arbitrary integer components into [0, p).
    pub fn elem_from_i64(&self, re: i64, im: i64) -> GfqElem {
        let p = self.p as i64;
        GfqElem::new((re.rem_euclid(p)) as u32, (im.rem_euclid(p)) as u32)
    }

    /// The scalar reduction [g]_q of a Gaussian integer.
    pub fn reduce(&self, g: GaussInt) -> GfqElem {
        self.elem_from_i64(g.re, g.im)
    }

    pub fn add(&self, a: GfqElem, b: GfqElem) -> GfqElem {
        GfqElem::new((a.re + b.re) % self.p, (a.im + b.im) % self.p)
    }

    pub fn neg(&self, a: GfqElem) -> GfqElem {
        GfqElem::new((self.p - a.re) % self.p, (self.p - a.im) % self.p)
    }

    pub fn sub(&self, a: GfqElem, b: GfqElem) -> GfqElem {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: GfqElem, b: GfqElem) -> GfqElem {
        let p = self.p as u64;
        let (ar, ai, br, bi) = (a.re as u64, a.im as u64, b.re as u64, b.im as u64);
        let re = ((ar * br) % p + p - (ai * bi) % p) % p;
        let im = (ar * bi + ai * br) % p;
        GfqElem::new(re as u32, im as u32)
    }

    /// Multiplicative inverse via the conjugate: (a+jb)^-1 = (a-jb)/(a^2+b^2).
    /// The norm a^2+b^2 is nonzero mod p for nonzero elements because
    /// -1 is a non-residue when p = 3 (mod 4).
    pub fn inv(&self, a: GfqElem) -> Result<GfqElem> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let p = self.p as u64;
        let n = (a.re as u64 * a.re as u64 + a.im as u64 * a.im as u64) % p;
        debug_assert!(n != 0);
        let n_inv = mod_inverse(n, p);
        let conj = GfqElem::new(a.re, (self.p - a.im) % self.p);
        let s = GfqElem::new((n_inv % p) as u32, 0);
        Ok(self.mul(conj, s))
    }

    pub fn random_elem<R: Rng + ?Sized>(&self, rng: &mut R) -> GfqElem {
        GfqElem::new(rng.gen_range(0..self.p), rng.gen_range(0..self.p))
    }
}

/// Inverse of a mod p (p prime) by extended Euclid.
fn mod_inverse(a: u64, p: u64) -> u64 {
    let (mut t, mut new_t) = (0i64, 1i64);
    let (mut r, mut new_r) = (p as i64, (a % p) as i64);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    debug_assert_eq!(r, 1, "input not invertible");
    t.rem_euclid(p as i64) as u64
}

/// Dense row-major matrix over GF(q).
#[derive(Clone, PartialEq, Eq)]
pub struct GfqMatrix {
    rows: usize,
    cols: usize,
    data: Vec<GfqElem>,
}

impl GfqMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        GfqMatrix {
            rows,
            cols,
            data: vec![GfqElem::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = GfqElem::new(1, 0);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<GfqElem>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c));
        GfqMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[GfqElem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn slice_rows(&self, range: std::ops::Range<usize>) -> GfqMatrix {
        assert!(range.end <= self.rows);
        GfqMatrix {
            rows: range.len(),
            cols: self.cols,
            data: self.data[range.start * self.cols..range.end * self.cols].to_vec(),
        }
    }

    /// Vertical concatenation [self; other].
    pub fn vstack(&self, other: &GfqMatrix) -> GfqMatrix {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        GfqMatrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn random<R: Rng + ?Sized>(rows: usize, cols: usize, ctx: &FieldCtx, rng: &mut R) -> Self {
        GfqMatrix {
            rows,
            cols,
            data: (0..rows * cols).map(|_| ctx.random_elem(rng)).collect(),
        }
    }

    pub fn neg(&self, ctx: &FieldCtx) -> GfqMatrix {
        GfqMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| ctx.neg(x)).collect(),
        }
    }

    pub fn add(&self, other: &GfqMatrix, ctx: &FieldCtx) -> GfqMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        GfqMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| ctx.add(a, b))
                .collect(),
        }
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows)
            .all(|i| (0..self.cols).all(|j| i == j || self[(i, j)].is_zero()))
    }
}

impl Index<(usize, usize)> for GfqMatrix {
    type Output = GfqElem;
    fn index(&self, (i, j): (usize, usize)) -> &GfqElem {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for GfqMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut GfqElem {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for GfqMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "GfqMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

/// Entrywise reduction [.]_q of a Gaussian-integer matrix into GF(q).
pub fn reduce_mod_p(a: &GaussianIntMatrix, ctx: &FieldCtx) -> GfqMatrix {
    let mut out = GfqMatrix::zeros(a.nrows(), a.ncols());
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            out[(i, j)] = ctx.reduce(a[(i, j)]);
        }
    }
    out
}

pub fn mat_mul(a: &GfqMatrix, b: &GfqMatrix, ctx: &FieldCtx) -> GfqMatrix {
    assert_eq!(a.cols, b.rows, "GfqMatrix mat_mul shape");
    let mut out = GfqMatrix::zeros(a.rows, b.cols);
    for i in 0..a.rows {
        for k in 0..a.cols {
            let x = a[(i, k)];
            if x.is_zero() {
                continue;
            }
            for j in 0..b.cols {
                let t = ctx.mul(x, b[(k, j)]);
                out[(i, j)] = ctx.add(out[(i, j)], t);
            }
        }
    }
    out
}

/// Matrix inverse over GF(q) by Gauss-Jordan elimination with pivot search.
pub fn mat_inverse(a: &GfqMatrix, ctx: &FieldCtx) -> Result<GfqMatrix> {
    if a.rows != a.cols {
        return Err(Error::NonSquare);
    }
    let n = a.rows;
    let mut work = a.clone();
    let mut inv = GfqMatrix::identity(n);
    for col in 0..n {
        let pivot_row = (col..n)
            .find(|&i| !work[(i, col)].is_zero())
            .ok_or(Error::SingularMatrix)?;
        if pivot_row != col {
            for j in 0..n {
                let t = work[(col, j)];
                work[(col, j)] = work[(pivot_row, j)];
                work[(pivot_row, j)] = t;
                let t = inv[(col, j)];
                inv[(col, j)] = inv[(pivot_row, j)];
                inv[(pivot_row, j)] = t;
            }
        }
        let pivot_inv = ctx.inv(work[(col, col)])?;
        for j in 0..n {
            work[(col, j)] = ctx.mul(work[(col, j)], pivot_inv);
            inv[(col, j)] = ctx.mul(inv[(col, j)], pivot_inv);
        }
        for i in 0..n {
            if i == col || work[(i, col)].is_zero() {
                continue;
            }
            let factor = work[(i, col)];
            for j in 0..n {
                let w = ctx.mul(factor, work[(col, j)]);
                work[(i, j)] = ctx.sub(work[(i, j)], w);
                let v = ctx.mul(factor, inv[(col, j)]);
                inv[(i, j)] = ctx.sub(inv[(i, j)], v);
            }
        }
    }
    Ok(inv)
}

/// Solves x * gen = rhs for a row vector x, where gen has full row rank.
/// Returns NotInRowSpace when rhs is outside the row space.
pub fn solve_row_system(gen: &GfqMatrix, rhs: &[GfqElem], ctx: &FieldCtx) -> Result<Vec<GfqElem>> {
    assert_eq!(rhs.len(), gen.cols);
    let r = gen.rows;
    let n = gen.cols;
    // Eliminate on the transposed system gen^T x^T = rhs^T.
    let mut a = GfqMatrix::zeros(n, r + 1);
    for i in 0..n {
        for j in 0..r {
            a[(i, j)] = gen[(j, i)];
        }
        a[(i, r)] = rhs[i];
    }
    let mut pivot_rows = Vec::with_capacity(r);
    let mut row = 0usize;
    for col in 0..r {
        let Some(p) = (row..n).find(|&i| !a[(i, col)].is_zero()) else {
            return Err(Error::SingularMatrix); // generator not full rank
        };
        for j in 0..=r {
            let t = a[(row, j)];
            a[(row, j)] = a[(p, j)];
            a[(p, j)] = t;
        }
        let inv = ctx.inv(a[(row, col)])?;
        for j in 0..=r {
            a[(row, j)] = ctx.mul(a[(row, j)], inv);
        }
        for i in 0..n {
            if i == row || a[(i, col)].is_zero() {
                continue;
            }
            let f = a[(i, col)];
            for j in 0..=r {
                let w = ctx.mul(f, a[(row, j)]);
                a[(i, j)] = ctx.sub(a[(i, j)], w);
            }
        }
        pivot_rows.push(row);
        row += 1;
    }
    // Any remaining nonzero rhs entry means rhs is outside the row space.
    for i in row..n {
        if !a[(i, r)].is_zero() {
            return Err(Error::NotInRowSpace);
        }
    }
    Ok((0..r).map(|k| a[(pivot_rows[k], r)]).collect())
}

/// Rank of a matrix over GF(q).
pub fn rank(a: &GfqMatrix, ctx: &FieldCtx) -> usize {
    let mut work = a.clone();
    let (rows, cols) = (work.rows, work.cols);
    let mut rank = 0usize;
    for col in 0..cols {
        let Some(p) = (rank..rows).find(|&i| !work[(i, col)].is_zero()) else {
            continue;
        };
        for j in 0..cols {
            let t = work[(rank, j)];
            work[(rank, j)] = work[(p, j)];
            work[(p, j)] = t;
        }
        let inv = ctx.inv(work[(rank, col)]).expect("nonzero pivot");
        for j in 0..cols {
            work[(rank, j)] = ctx.mul(work[(rank, j)], inv);
        }
        for i in 0..rows {
            if i == rank || work[(i, col)].is_zero() {
                continue;
            }
            let f = work[(i, col)];
            for j in 0..cols {
                let w = ctx.mul(f, work[(rank, j)]);
                work[(i, j)] = ctx.sub(work[(i, j)], w);
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}
