//! Basis reduction for lattices generated by the columns of a complex
//! matrix, with coefficients in Z[j].
//!
//! `lll_reduce` runs complex LLL: size reduction rounds Gram coefficients
//! to the nearest Gaussian integer and the Lovasz test uses |mu|^2. The
//! unimodular transform is carried in exact integer arithmetic next to the
//! floating-point basis, so |det(U)| = 1 is certified rather than
//! approximated. `refine_enumeration` then sweeps the basis vectors in
//! increasing norm order and replaces each by the shortest enumerated
//! lattice vector whose coefficient on that slot is a unit of Z[j] (the
//! exact condition for the swap to preserve the lattice).

use crate::error::{Error, Result};
use crate::gaussian::{GaussInt, GaussianIntMatrix};
use crate::linalg::{col_norm_sq, col_norm_sq_sum, full_column_rank, CMat, C64};

/// A reduced basis together with the exact transform that produced it.
#[derive(Clone, Debug)]
pub struct ReductionResult {
    /// reduced_basis = input_basis * transform (numerically).
    pub reduced: CMat,
    /// Unimodular matrix over Z[j].
    pub transform: GaussianIntMatrix,
    /// Sum of squared column norms of the reduced basis.
    pub objective: f64,
}

impl ReductionResult {
    fn from_parts(reduced: CMat, transform: GaussianIntMatrix) -> Self {
        let objective = col_norm_sq_sum(&reduced);
        ReductionResult {
            reduced,
            transform,
            objective,
        }
    }
}

/// True iff the square matrix has determinant in {1, -1, j, -j}.
pub fn is_unimodular(u: &GaussianIntMatrix) -> Result<bool> {
    Ok(u.det()?.is_unit())
}

fn complex_round(z: C64) -> GaussInt {
    GaussInt::round_from(z)
}

/// Complex LLL reduction of the lattice generated by the columns of `basis`.
pub fn lll_reduce(basis: &CMat, delta: f64) -> Result<ReductionResult> {
    if !(0.25..=1.0).contains(&delta) || delta == 0.25 {
        return Err(Error::InvalidParameter(format!(
            "delta {delta} outside (0.25, 1]"
        )));
    }
    if basis.ncols() == 0 || basis.nrows() < basis.ncols() || !full_column_rank(basis) {
        return Err(Error::RankDeficient);
    }
    let d = basis.ncols();
    let mut b = basis.clone();
    let mut u = GaussianIntMatrix::identity(d);

    // Gram-Schmidt data, recomputed from scratch after every change; the
    // dimensions here are small enough that this costs nothing.
    let mut mu = vec![vec![C64::new(0.0, 0.0); d]; d];
    let mut bstar_norm_sq = vec![0.0f64; d];
    let gram_schmidt = |b: &CMat, mu: &mut Vec<Vec<C64>>, ns: &mut Vec<f64>| {
        let m = b.nrows();
        let mut bstar: Vec<Vec<C64>> = Vec::with_capacity(b.ncols());
        for i in 0..b.ncols() {
            let mut v: Vec<C64> = b.column(i).iter().copied().collect();
            for k in 0..i {
                // mu[i][k] = <b_i, b*_k> / ||b*_k||^2 with <x,y> = y^H x.
                let mut dot = C64::new(0.0, 0.0);
                for t in 0..m {
                    dot += bstar[k][t].conj() * b[(t, i)];
                }
                let coeff = if ns[k] > 0.0 {
                    dot / ns[k]
                } else {
                    C64::new(0.0, 0.0)
                };
                mu[i][k] = coeff;
                for t in 0..m {
                    v[t] -= coeff * bstar[k][t];
                }
            }
            ns[i] = v.iter().map(|z| z.norm_sqr()).sum();
            bstar.push(v);
        }
    };

    gram_schmidt(&b, &mut mu, &mut bstar_norm_sq);
    let mut k = 1usize;
    let max_iters = 10_000 + 1_000 * d * d;
    let mut iters = 0usize;
    while k < d {
        iters += 1;
        if iters > max_iters {
            break; // float cycling guard; the transform is still exact
        }
        for j in (0..k).rev() {
            let r = complex_round(mu[k][j]);
            if !r.is_zero() {
                let rc = r.to_complex();
                for t in 0..b.nrows() {
                    let sub = rc * b[(t, j)];
                    b[(t, k)] -= sub;
                }
                u.col_axpy(k, j, -r);
                gram_schmidt(&b, &mut mu, &mut bstar_norm_sq);
            }
        }
        let lhs = bstar_norm_sq[k];
        let rhs = (delta - mu[k][k - 1].norm_sqr()) * bstar_norm_sq[k - 1];
        if lhs >= rhs {
            k += 1;
        } else {
            b.swap_columns(k, k - 1);
            u.swap_cols(k, k - 1);
            gram_schmidt(&b, &mut mu, &mut bstar_norm_sq);
            k = k.max(2) - 1;
        }
    }

    // Rebuild the basis from the exact transform to discard float drift.
    let reduced = basis * u.to_complex();
    Ok(ReductionResult::from_parts(reduced, u))
}

/// All nonzero coefficient vectors c with ||B c||^2 <= radius_sq, found by
/// sphere enumeration on the realified basis. Each entry is (c, norm_sq).
pub(crate) fn enumerate_ball(reduced: &CMat, radius_sq: f64) -> Vec<(Vec<GaussInt>, f64)> {
    let d = reduced.ncols();
    let m = reduced.nrows();
    if radius_sq <= 0.0 || d == 0 {
        return Vec::new();
    }
    // Realify: complex column b contributes real columns [Re b; Im b] and
    // [-Im b; Re b] (the image of j*b), giving a real lattice of rank 2d.
    let mut real = nalgebra::DMatrix::<f64>::zeros(2 * m, 2 * d);
    for j in 0..d {
        for i in 0..m {
            let z = reduced[(i, j)];
            real[(i, 2 * j)] = z.re;
            real[(m + i, 2 * j)] = z.im;
            real[(i, 2 * j + 1)] = -z.im;
            real[(m + i, 2 * j + 1)] = z.re;
        }
    }
    let qr = real.qr();
    let r = qr.r();
    let n = 2 * d;
    for k in 0..n {
        if r[(k, k)].abs() < 1e-12 {
            return Vec::new(); // numerically rank-deficient; nothing safe to do
        }
    }

    let slack = radius_sq * (1.0 + 1e-9) + 1e-12;
    let mut out: Vec<(Vec<GaussInt>, f64)> = Vec::new();
    let mut coeff = vec![0i64; n];

    fn descend(
        level: usize,
        partial: f64,
        coeff: &mut Vec<i64>,
        r: &nalgebra::DMatrix<f64>,
        slack: f64,
        out: &mut Vec<(Vec<GaussInt>, f64)>,
    ) {
        let n = coeff.len();
        let diag = r[(level, level)];
        let mut shift = 0.0;
        for j in level + 1..n {
            shift += r[(level, j)] * coeff[j] as f64;
        }
        let center = -shift / diag;
        let width = ((slack - partial).max(0.0)).sqrt() / diag.abs();
        let lo = (center - width).ceil() as i64;
        let hi = (center + width).floor() as i64;
        for x in lo..=hi {
            coeff[level] = x;
            let term = diag * x as f64 + shift;
            let total = partial + term * term;
            if total > slack {
                continue;
            }
            if level == 0 {
                if coeff.iter().any(|&c| c != 0) {
                    let g: Vec<GaussInt> = (0..n / 2)
                        .map(|k| GaussInt::new(coeff[2 * k], coeff[2 * k + 1]))
                        .collect();
                    out.push((g, total));
                }
            } else {
                descend(level - 1, total, coeff, r, slack, out);
            }
        }
        coeff[level] = 0;
    }
    descend(n - 1, 0.0, &mut coeff, &r, slack, &mut out);
    out
}

/// Deterministic candidate ordering: squared norm first, then the
/// lexicographic key over (re, im) pairs of the coefficient vector.
pub(crate) fn candidate_key(norm_sq: f64, coeff: &[GaussInt]) -> (f64, Vec<i64>) {
    let mut lex = Vec::with_capacity(coeff.len() * 2);
    for g in coeff {
        lex.push(g.re);
        lex.push(g.im);
    }
    (norm_sq, lex)
}

/// Greedy per-vector improvement of a reduced basis by sphere enumeration.
///
/// Vectors are visited in increasing norm order. For slot i, the search ball
/// has radius `radius_factor` times the current vector norm, and a candidate
/// sum c_1 b_1 + ... + c_d b_d is admissible when c_i is a unit, so the
/// transform stays unimodular. An empty search leaves the slot unchanged.
pub fn refine_enumeration(result: &ReductionResult, radius_factor: f64) -> ReductionResult {
    let d = result.reduced.ncols();
    let mut reduced = result.reduced.clone();
    let mut transform = result.transform.clone();
    if d == 0 || radius_factor <= 0.0 {
        return ReductionResult::from_parts(reduced, transform);
    }

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| {
        col_norm_sq(&reduced, a)
            .partial_cmp(&col_norm_sq(&reduced, b))
            .unwrap()
            .then(a.cmp(&b))
    });

    for &slot in &order {
        let current = col_norm_sq(&reduced, slot);
        if current <= 0.0 {
            continue;
        }
        let radius_sq = radius_factor * radius_factor * current;
        let candidates = enumerate_ball(&reduced, radius_sq);
        let mut best: Option<(Vec<GaussInt>, f64)> = None;
        for (coeff, norm_sq) in candidates {
            if !coeff[slot].is_unit() {
                continue;
            }
            if norm_sq >= current * (1.0 - 1e-12) {
                continue;
            }
            let better = match &best {
                None => true,
                Some((bc, bn)) => candidate_key(norm_sq, &coeff) < candidate_key(*bn, bc),
            };
            if better {
                best = Some((coeff, norm_sq));
            }
        }
        if let Some((coeff, _)) = best {
            // New column = sum of c_k * old columns, in both domains.
            let mut newcol = vec![C64::new(0.0, 0.0); reduced.nrows()];
            for (k, c) in coeff.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let cc = c.to_complex();
                for (t, acc) in newcol.iter_mut().enumerate() {
                    *acc += cc * reduced[(t, k)];
                }
            }
            let mut new_u = vec![GaussInt::ZERO; transform.nrows()];
            for (k, c) in coeff.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                for (t, acc) in new_u.iter_mut().enumerate() {
                    *acc = *acc + *c * transform[(t, k)];
                }
            }
            for t in 0..reduced.nrows() {
                reduced[(t, slot)] = newcol[t];
            }
            transform.set_col(slot, &new_u);
        }
    }
    ReductionResult::from_parts(reduced, transform)
}
