//! Construction-A nested lattice codec, exact-arithmetic flavor.
//!
//! The coarse lattice is the scaled hypercube Lambda = scale * Z[j]^n and
//! the fine lattice lifts a linear code over GF(q):
//!
//! ```text
//! Lambda_1 = p^-1 g(C) T + Lambda,     T = scale * I
//! ```
//!
//! Every quantity the codec touches lives on the grid (scale/p) * Z[j]^n,
//! so codewords are stored as exact Gaussian-integer multiples of the grid
//! unit and the whole encode / receive / decode chain runs without a single
//! rounding decision. The natural labeling f(w) = p^-1 g(w G) T mod Lambda
//! maps message rows to codewords; its inverse solves u G = [y]_q over
//! GF(q).
//!
//! Complex-valued entry points snap to the grid first and report
//! NotInFineLattice / NotOnGrid when handed values outside the exact
//! regime; rate analysis for the noisy channel lives in `cof`, not here.

use crate::error::{Error, Result};
use crate::gaussian::{GaussInt, GaussianIntMatrix};
use crate::gfq::{mat_mul, rank, solve_row_system, FieldCtx, GfqElem, GfqMatrix};
use crate::linalg::{CMat, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

/// Code parameters: GF(q) context, block length n, message dimension r,
/// an r x n generator of full rank r, and the coarse-lattice scale.
#[derive(Clone, Debug)]
pub struct NestedLatticeCode {
    ctx: FieldCtx,
    n: usize,
    r: usize,
    gen: GfqMatrix,
    scale: f64,
}

impl NestedLatticeCode {
    pub fn new(ctx: FieldCtx, gen: GfqMatrix, scale: f64) -> Result<Self> {
        let (r, n) = (gen.nrows(), gen.ncols());
        if r == 0 || n == 0 || r > n {
            return Err(Error::InvalidParameter(format!(
                "generator must be r x n with 0 < r <= n, got {r} x {n}"
            )));
        }
        if !(scale > 0.0) {
            return Err(Error::InvalidParameter(format!("scale {scale} <= 0")));
        }
        if rank(&gen, &ctx) != r {
            return Err(Error::SingularMatrix);
        }
        Ok(NestedLatticeCode { ctx, n, r, gen, scale })
    }

    /// Seeded random code with a full-rank generator.
    pub fn random(ctx: FieldCtx, n: usize, r: usize, scale: f64, seed: u64) -> Result<Self> {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        for _ in 0..64 {
            let gen = GfqMatrix::random(r, n, &ctx, &mut rng);
            if rank(&gen, &ctx) == r {
                return Self::new(ctx, gen, scale);
            }
        }
        Err(Error::SingularMatrix)
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn block_len(&self) -> usize {
        self.n
    }

    pub fn message_len(&self) -> usize {
        self.r
    }

    pub fn generator(&self) -> &GfqMatrix {
        &self.gen
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Grid spacing scale / p: the fine lattice p^-1 Lambda.
    pub fn grid_unit(&self) -> f64 {
        self.scale / self.ctx.p() as f64
    }

    /// Code rate (r/n) log2 q in bits per complex dimension.
    pub fn rate_bits(&self) -> f64 {
        self.r as f64 / self.n as f64 * (self.ctx.q() as f64).log2()
    }
}

/// An exact point of p^-1 Lambda: Gaussian-integer multiples of the grid
/// unit, componentwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridVec {
    pub units: Vec<GaussInt>,
}

impl GridVec {
    pub fn zeros(n: usize) -> Self {
        GridVec {
            units: vec![GaussInt::ZERO; n],
        }
    }

    pub fn len(&self) -> usize {
        self.units.len()
    }

    pub fn is_empty(&self) -> bool {
        self.units.is_empty()
    }

    pub fn add(&self, other: &GridVec) -> GridVec {
        assert_eq!(self.len(), other.len());
        GridVec {
            units: self
                .units
                .iter()
                .zip(&other.units)
                .map(|(&a, &b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &GridVec) -> GridVec {
        assert_eq!(self.len(), other.len());
        GridVec {
            units: self
                .units
                .iter()
                .zip(&other.units)
                .map(|(&a, &b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, c: GaussInt) -> GridVec {
        GridVec {
            units: self.units.iter().map(|&u| c * u).collect(),
        }
    }

    pub fn to_complex(&self, code: &NestedLatticeCode) -> Vec<C64> {
        let unit = code.grid_unit();
        self.units
            .iter()
            .map(|g| C64::new(g.re as f64 * unit, g.im as f64 * unit))
            .collect()
    }

    /// Snap a complex vector onto the grid; tolerance is 1e-6 grid units.
    pub fn from_complex(x: &[C64], code: &NestedLatticeCode) -> Result<GridVec> {
        let unit = code.grid_unit();
        let mut units = Vec::with_capacity(x.len());
        for &z in x {
            let scaled = C64::new(z.re / unit, z.im / unit);
            units.push(GaussInt::from_complex_exact(scaled, 1e-6)?);
        }
        Ok(GridVec { units })
    }
}

fn symmetric_residue(v: i64, p: i64) -> i64 {
    let r = v.rem_euclid(p);
    if r > (p - 1) / 2 {
        r - p
    } else {
        r
    }
}

/// Reduce a grid vector mod Lambda into the symmetric fundamental cell,
/// i.e. components in [-(p-1)/2, (p-1)/2] grid units per real/imag part.
pub fn mod_lattice_grid(x: &GridVec, code: &NestedLatticeCode) -> GridVec {
    let p = code.ctx().p() as i64;
    GridVec {
        units: x
            .units
            .iter()
            .map(|g| GaussInt::new(symmetric_residue(g.re, p), symmetric_residue(g.im, p)))
            .collect(),
    }
}

/// [x] mod Lambda for arbitrary complex input: componentwise subtraction of
/// the nearest point of scale * Z[j], landing in [-scale/2, scale/2) per
/// real and imaginary part.
pub fn mod_lattice(x: &[C64], code: &NestedLatticeCode) -> Vec<C64> {
    let s = code.scale();
    let fold = |v: f64| v - s * (v / s + 0.5).floor();
    x.iter().map(|z| C64::new(fold(z.re), fold(z.im))).collect()
}

/// A codeword of L = Lambda_1 intersect V_Lambda, already reduced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Codeword {
    pub vector: GridVec,
}

/// A dither point of the fundamental cell, drawn on the grid so the
/// dithered chain stays exact.
#[derive(Clone, Debug)]
pub struct Dither {
    pub vector: GridVec,
    pub seed: u64,
}

/// Natural labeling f(w) = p^-1 g(w G) T mod Lambda.
pub fn encode(w: &[GfqElem], code: &NestedLatticeCode) -> Result<Codeword> {
    if w.len() != code.message_len() {
        return Err(Error::DimensionMismatch(format!(
            "message has {} symbols, expected {}",
            w.len(),
            code.message_len()
        )));
    }
    let ctx = *code.ctx();
    let row = GfqMatrix::from_rows(vec![w.to_vec()]);
    let c = mat_mul(&row, code.generator(), &ctx);
    let units: Vec<GaussInt> = (0..code.block_len()).map(|k| c[(0, k)].to_gauss()).collect();
    let vector = mod_lattice_grid(&GridVec { units }, code);
    Ok(Codeword { vector })
}

/// Uniform dither on the grid points of the fundamental cell.
pub fn sample_dither(code: &NestedLatticeCode, seed: u64) -> Dither {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let half = (code.ctx().p() as i64 - 1) / 2;
    let units = (0..code.block_len())
        .map(|_| GaussInt::new(rng.gen_range(-half..=half), rng.gen_range(-half..=half)))
        .collect();
    Dither {
        vector: GridVec { units },
        seed,
    }
}

/// x = [t + d] mod Lambda: the dithered channel input for message w.
pub fn dither_encode(w: &[GfqElem], d: &Dither, code: &NestedLatticeCode) -> Result<GridVec> {
    let t = encode(w, code)?;
    Ok(mod_lattice_grid(&t.vector.add(&d.vector), code))
}

/// The CoF receiver mapping y_hat = [alpha^H Y - b^H C D] mod Lambda.
///
/// `y` holds the M received rows, `dithers` the K transmit-stream dithers
/// matching the columns of C. In the exact regime alpha must itself be
/// Gaussian-integer valued (exact integer forcing); anything else is
/// rejected rather than rounded silently.
pub fn cof_receiver_map(
    y: &CMat,
    alpha: &[C64],
    b: &[GaussInt],
    c: &GaussianIntMatrix,
    dithers: &[Dither],
    code: &NestedLatticeCode,
) -> Result<GridVec> {
    let m = c.nrows();
    let k = c.ncols();
    if y.nrows() != m || alpha.len() != m || b.len() != m || dithers.len() != k {
        return Err(Error::DimensionMismatch(format!(
            "receiver map: Y {}x{}, alpha {}, b {}, C {}x{}, dithers {}",
            y.nrows(),
            y.ncols(),
            alpha.len(),
            b.len(),
            m,
            k,
            dithers.len()
        )));
    }
    let alpha_int: Vec<GaussInt> = alpha
        .iter()
        .map(|&z| GaussInt::from_complex_exact(z, 1e-9))
        .collect::<Result<_>>()?;

    let n = code.block_len();
    let mut acc = GridVec::zeros(n);
    // alpha^H Y rowwise.
    for i in 0..m {
        let row: Vec<C64> = y.row(i).iter().copied().collect();
        let grid = GridVec::from_complex(&row, code)?;
        acc = acc.add(&grid.scale(alpha_int[i].conj()));
    }
    // minus (b^H C) D.
    for stream in 0..k {
        let coeff = (0..m).fold(GaussInt::ZERO, |s, i| s + b[i].conj() * c[(i, stream)]);
        if !coeff.is_zero() {
            acc = acc.sub(&dithers[stream].vector.scale(coeff));
        }
    }
    Ok(mod_lattice_grid(&acc, code))
}

/// Inverts the natural labeling on an exact point of Lambda_1: solves
/// u G = [y]_q over GF(q). Points off the grid raise NotInFineLattice and
/// grid points whose residue is outside the code raise NotInRowSpace.
pub fn decode_combination(y_hat: &[C64], code: &NestedLatticeCode) -> Result<Vec<GfqElem>> {
    let grid = GridVec::from_complex(y_hat, code).map_err(|_| Error::NotInFineLattice)?;
    decode_combination_grid(&grid, code)
}

pub fn decode_combination_grid(
    y_hat: &GridVec,
    code: &NestedLatticeCode,
) -> Result<Vec<GfqElem>> {
    if y_hat.len() != code.block_len() {
        return Err(Error::DimensionMismatch(format!(
            "vector length {} vs block length {}",
            y_hat.len(),
            code.block_len()
        )));
    }
    let ctx = *code.ctx();
    let residue: Vec<GfqElem> = y_hat.units.iter().map(|&g| ctx.reduce(g)).collect();
    solve_row_system(code.generator(), &residue, &ctx)
}

/// Integer matrices steering one hop of the exact chain.
pub struct HopMatrices<'a> {
    /// Beamforming integer matrices of the two transmitters.
    pub a1: &'a GaussianIntMatrix,
    pub a2: &'a GaussianIntMatrix,
    /// Receiver coefficient matrices of the two relays/destinations
    /// (rows are the b^H vectors).
    pub b1: &'a GaussianIntMatrix,
    pub b2: &'a GaussianIntMatrix,
}

/// One hop of the noiseless integer network: encode the precoded messages
/// with dithers, form the exact aligned observations Y_k = C_Rk X, run the
/// CoF receiver mapping with alpha = b per row, decode the combinations,
/// and undo [B]_q. Returns the two recovered blocks (M and M rows; the
/// caller slices relay 2's block to M-1 rows).
fn exact_hop(
    w1: &GfqMatrix,
    w2: &GfqMatrix,
    mats: &HopMatrices<'_>,
    code: &NestedLatticeCode,
    dither_seed: u64,
) -> Result<(GfqMatrix, GfqMatrix)> {
    use crate::align::{c12_pattern, c22_pattern};
    use crate::ffnet::{recover_messages, source_precode, MessageBlock};

    let ctx = *code.ctx();
    let m = w1.nrows();
    let streams = 2 * m - 1;

    let block = MessageBlock::new(w1.clone(), w2.clone())?;
    let precoded = source_precode(&block, mats.a1, mats.a2, &ctx)?;

    // Dithered channel inputs, one stream per row of the stacked block.
    let dithers: Vec<Dither> = (0..streams)
        .map(|k| sample_dither(code, dither_seed.wrapping_add(k as u64)))
        .collect();
    let mut x: Vec<GridVec> = Vec::with_capacity(streams);
    for l in 0..m {
        x.push(dither_encode(precoded.w1.row(l), &dithers[l], code)?);
    }
    for l in 0..m - 1 {
        x.push(dither_encode(precoded.w2.row(l), &dithers[m + l], code)?);
    }

    let c12 = c12_pattern(m);
    let c22 = c22_pattern(m);
    let c_r = [
        mats.a1.hstack(&c12.mul(mats.a2)),
        mats.a1.hstack(&c22.mul(mats.a2)),
    ];
    let b_mats = [mats.b1, mats.b2];

    let mut recovered = Vec::with_capacity(2);
    for relay in 0..2 {
        let c = &c_r[relay];
        // Exact integer channel: Y_i = sum_k C[i,k] X_k.
        let mut y_rows: Vec<GridVec> = vec![GridVec::zeros(code.block_len()); m];
        for i in 0..m {
            for k in 0..streams {
                let coeff = c[(i, k)];
                if !coeff.is_zero() {
                    y_rows[i] = y_rows[i].add(&x[k].scale(coeff));
                }
            }
        }
        let y = CMat::from_fn(m, code.block_len(), |i, j| {
            let g = y_rows[i].units[j];
            let unit = code.grid_unit();
            C64::new(g.re as f64 * unit, g.im as f64 * unit)
        });

        let mut u = GfqMatrix::zeros(m, code.message_len());
        for l in 0..m {
            let b: Vec<GaussInt> = b_mats[relay].row(l).iter().map(|g| g.conj()).collect();
            let alpha: Vec<C64> = b.iter().map(|g| g.to_complex()).collect();
            let y_hat = cof_receiver_map(&y, &alpha, &b, c, &dithers, code)?;
            let comb = decode_combination_grid(&y_hat, code)?;
            for (t, sym) in comb.into_iter().enumerate() {
                u[(l, t)] = sym;
            }
        }
        recovered.push(recover_messages(&u, b_mats[relay], &ctx)?);
    }
    let w2_hat = recovered.pop().expect("two relays");
    let w1_hat = recovered.pop().expect("two relays");
    Ok((w1_hat, w2_hat))
}

/// Full two-hop noiseless pipeline: hop 1 to the relays, Lemma-1 precoding,
/// hop 2 to the destinations. Returns what the destinations decode; with
/// correct precoders that is exactly (W1, -W2).
pub fn two_hop_exact_chain(
    block: &crate::ffnet::MessageBlock,
    hop1: &HopMatrices<'_>,
    hop2: &HopMatrices<'_>,
    code: &NestedLatticeCode,
    dither_seed: u64,
) -> Result<crate::ffnet::MessageBlock> {
    use crate::ffnet::{relay_precoders, MessageBlock};
    let ctx = *code.ctx();
    let m = block.w1.nrows();

    let (r1_full, r2_full) = exact_hop(&block.w1, &block.w2, hop1, code, dither_seed)?;
    let w_hat1 = r1_full;
    let w_hat2 = r2_full.slice_rows(0..m - 1);

    let pre = relay_precoders(m, &ctx)?;
    let w_r1 = mat_mul(&pre.m1, &w_hat1, &ctx);
    let w_r2 = mat_mul(&pre.m2, &w_hat2, &ctx);

    let (d1_full, d2_full) = exact_hop(&w_r1, &w_r2, hop2, code, dither_seed.wrapping_add(0x1000))?;
    MessageBlock::new(d1_full, d2_full.slice_rows(0..m - 1))
}
