//! The deterministic noiseless finite-field interference network induced by
//! alignment.
//!
//! After both relays invert their coefficient matrices, one hop of the
//! Gaussian network collapses to multiplication by the fixed system matrix
//!
//! ```text
//! Q = [ I^{MxM}   Q12          ]      Q12 = [0^{1 x M-1}; I^{M-1}]
//!     [ Q21       I^{M-1xM-1}  ]      Q21 = [I^{M-1} | 0^{M-1 x 1}]
//! ```
//!
//! independent of the channel draw. The relay precoders
//! M1 = (I - Q12 Q21)^-1 and M2 = -(I - Q21 Q12)^-1 diagonalize the
//! two-hop composition: Q diag(M1, M2) Q = diag(I, -I), so destination 1
//! receives its messages unchanged and destination 2 receives them with a
//! sign flip.

use crate::error::{Error, Result};
use crate::gaussian::GaussianIntMatrix;
use crate::gfq::{mat_inverse, mat_mul, reduce_mod_p, FieldCtx, GfqMatrix};

/// The fixed (2M-1) x (2M-1) system matrix over GF(q).
#[derive(Clone, Debug, PartialEq)]
pub struct SystemMatrix {
    pub m: usize,
    pub q: GfqMatrix,
}

/// Lemma-1 relay precoders.
#[derive(Clone, Debug)]
pub struct RelayPrecoders {
    /// M x M precoder applied by relay 1.
    pub m1: GfqMatrix,
    /// (M-1) x (M-1) precoder applied by relay 2.
    pub m2: GfqMatrix,
}

/// One block of source messages: M rows for source 1, M-1 for source 2,
/// each row a length-r message over GF(q).
#[derive(Clone, Debug, PartialEq)]
pub struct MessageBlock {
    pub w1: GfqMatrix,
    pub w2: GfqMatrix,
}

impl MessageBlock {
    pub fn new(w1: GfqMatrix, w2: GfqMatrix) -> Result<Self> {
        if w1.nrows() != w2.nrows() + 1 || w1.ncols() != w2.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "message block needs M and M-1 rows of equal width; got {}x{} and {}x{}",
                w1.nrows(),
                w1.ncols(),
                w2.nrows(),
                w2.ncols()
            )));
        }
        Ok(MessageBlock { w1, w2 })
    }

    pub fn stacked(&self) -> GfqMatrix {
        self.w1.vstack(&self.w2)
    }
}

fn q12(m: usize) -> GfqMatrix {
    let mut b = GfqMatrix::zeros(m, m - 1);
    for k in 0..m - 1 {
        b[(k + 1, k)] = crate::gfq::GfqElem::new(1, 0);
    }
    b
}

fn q21(m: usize) -> GfqMatrix {
    let mut b = GfqMatrix::zeros(m - 1, m);
    for k in 0..m - 1 {
        b[(k, k)] = crate::gfq::GfqElem::new(1, 0);
    }
    b
}

/// The system matrix; entries are 0/1 regardless of the field.
pub fn system_matrix(m: usize, _ctx: &FieldCtx) -> Result<SystemMatrix> {
    if m < 2 {
        return Err(Error::InvalidAntennaCount(m));
    }
    let n = 2 * m - 1;
    let mut q = GfqMatrix::identity(n);
    let b12 = q12(m);
    let b21 = q21(m);
    for i in 0..m {
        for k in 0..m - 1 {
            q[(i, m + k)] = b12[(i, k)];
        }
    }
    for k in 0..m - 1 {
        for j in 0..m {
            q[(m + k, j)] = b21[(k, j)];
        }
    }
    Ok(SystemMatrix { m, q })
}

/// Lemma-1 precoders M1 = (I - Q12 Q21)^-1, M2 = -(I - Q21 Q12)^-1.
/// Both inverses exist for every field: the products are strictly lower
/// triangular, so I minus them is unit triangular.
pub fn relay_precoders(m: usize, ctx: &FieldCtx) -> Result<RelayPrecoders> {
    if m < 2 {
        return Err(Error::InvalidAntennaCount(m));
    }
    let b12 = q12(m);
    let b21 = q21(m);
    let i_m = GfqMatrix::identity(m);
    let i_m1 = GfqMatrix::identity(m - 1);
    let m1 = mat_inverse(&i_m.add(&mat_mul(&b12, &b21, ctx).neg(ctx), ctx), ctx)?;
    let m2 = mat_inverse(&i_m1.add(&mat_mul(&b21, &b12, ctx).neg(ctx), ctx), ctx)?.neg(ctx);
    Ok(RelayPrecoders { m1, m2 })
}

/// Finite-field source precoding W'_k = [A_k]_q^-1 W_k. Fails with
/// SingularMatrix when det(A_k) = 0 mod p even though A_k is full rank
/// over Z[j]; the caller re-optimizes or perturbs in that case.
pub fn source_precode(
    block: &MessageBlock,
    a1: &GaussianIntMatrix,
    a2: &GaussianIntMatrix,
    ctx: &FieldCtx,
) -> Result<MessageBlock> {
    let a1_inv = mat_inverse(&reduce_mod_p(a1, ctx), ctx)?;
    let a2_inv = mat_inverse(&reduce_mod_p(a2, ctx), ctx)?;
    MessageBlock::new(
        mat_mul(&a1_inv, &block.w1, ctx),
        mat_mul(&a2_inv, &block.w2, ctx),
    )
}

/// The end-to-end matrix Q diag(M1, M2) Q of the two-hop composition.
pub fn end_to_end_matrix(
    sys: &SystemMatrix,
    pre: &RelayPrecoders,
    ctx: &FieldCtx,
) -> GfqMatrix {
    let m = sys.m;
    let n = 2 * m - 1;
    let mut block = GfqMatrix::zeros(n, n);
    for i in 0..m {
        for j in 0..m {
            block[(i, j)] = pre.m1[(i, j)];
        }
    }
    for i in 0..m - 1 {
        for j in 0..m - 1 {
            block[(m + i, m + j)] = pre.m2[(i, j)];
        }
    }
    mat_mul(&mat_mul(&sys.q, &block, ctx), &sys.q, ctx)
}

/// Undoes the receiver coefficient matrix over the field:
/// returns [B]_q^-1 U. Callers slice rows per the destination role.
pub fn recover_messages(
    u: &GfqMatrix,
    b: &GaussianIntMatrix,
    ctx: &FieldCtx,
) -> Result<GfqMatrix> {
    let b_inv = mat_inverse(&reduce_mod_p(b, ctx), ctx)?;
    Ok(mat_mul(&b_inv, u, ctx))
}

/// Runs the whole deterministic network on a message block: both hops of
/// Q-multiplication with Lemma-1 precoding in between, returning what the
/// destinations decode (before the sign flip at destination 2).
pub fn deterministic_network_flow(
    block: &MessageBlock,
    sys: &SystemMatrix,
    pre: &RelayPrecoders,
    ctx: &FieldCtx,
) -> Result<MessageBlock> {
    let m = sys.m;
    // First hop: [W_hat1; W_hat2] = Q [W1; W2].
    let hop1 = mat_mul(&sys.q, &block.stacked(), ctx);
    let what1 = hop1.slice_rows(0..m);
    let what2 = hop1.slice_rows(m..2 * m - 1);
    // Relay precoding.
    let wr1 = mat_mul(&pre.m1, &what1, ctx);
    let wr2 = mat_mul(&pre.m2, &what2, ctx);
    // Second hop.
    let hop2 = mat_mul(&sys.q, &wr1.vstack(&wr2), ctx);
    MessageBlock::new(hop2.slice_rows(0..m), hop2.slice_rows(m..2 * m - 1))
}
