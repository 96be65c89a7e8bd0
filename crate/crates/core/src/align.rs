//! Signal-alignment precoding for one hop of the two-hop interference
//! channel.
//!
//! Source 1 sends M streams through V1 and source 2 sends M-1 streams
//! through V2. The columns are chained so that
//!
//! ```text
//! F11 v_{1,k+1} = F12 v_{2,k}      F21 v_{1,k} = F22 v_{2,k}
//! ```
//!
//! for k = 1..M-1, which makes each relay observe integer-coefficient sums
//! of lattice codewords: relay k sees F_{k1} V1 (an M x M "aligned" factor)
//! applied to stacked codewords through the coefficient structure
//! C_{Rk} = [A1 | C_{k2} A2].

use crate::error::{Error, Result};
use crate::gaussian::GaussianIntMatrix;
use crate::linalg::{frobenius, inverse_guarded, singular_extremes, CMat, CVec, RANK_TOL};

/// The four M x M channel matrices of one hop, indexed receiver-first:
/// `f<j><k>` carries transmitter k to receiver j.
#[derive(Clone, Debug)]
pub struct HopChannel {
    pub f11: CMat,
    pub f12: CMat,
    pub f21: CMat,
    pub f22: CMat,
}

impl HopChannel {
    pub fn antennas(&self) -> usize {
        self.f11.nrows()
    }

    /// The same hop with the two transmitter/receiver roles exchanged.
    pub fn swapped_roles(&self) -> HopChannel {
        HopChannel {
            f11: self.f22.clone(),
            f12: self.f21.clone(),
            f21: self.f12.clone(),
            f22: self.f11.clone(),
        }
    }
}

/// Alignment precoders and the aligned channel factors they induce.
#[derive(Clone, Debug)]
pub struct AlignmentSet {
    /// M x M precoder of the M-stream source.
    pub v1: CMat,
    /// M x (M-1) precoder of the (M-1)-stream source.
    pub v2: CMat,
    /// F11 V1.
    pub h_r1: CMat,
    /// F21 V1.
    pub h_r2: CMat,
    /// Largest violation norm of the two alignment condition families,
    /// relative to the largest precoder column norm.
    pub residual: f64,
}

/// The fixed 0/1 structure matrices C12 = [0; I] and C22 = [I; 0] and the
/// compound coefficient structures C_Rk = [A1 | C_{k2} A2].
#[derive(Clone, Debug)]
pub struct CoefficientStructure {
    pub c12: GaussianIntMatrix,
    pub c22: GaussianIntMatrix,
    pub c_r1: GaussianIntMatrix,
    pub c_r2: GaussianIntMatrix,
}

/// C12 = [0^{1 x M-1}; I^{M-1}]: source 2's stream k lands on relay-1
/// stream k+1.
pub fn c12_pattern(m: usize) -> GaussianIntMatrix {
    let mut c = GaussianIntMatrix::zeros(m, m - 1);
    for k in 0..m - 1 {
        c[(k + 1, k)] = crate::gaussian::GaussInt::ONE;
    }
    c
}

/// C22 = [I^{M-1}; 0^{1 x M-1}]: source 2's stream k lands on relay-2
/// stream k.
pub fn c22_pattern(m: usize) -> GaussianIntMatrix {
    let mut c = GaussianIntMatrix::zeros(m, m - 1);
    for k in 0..m - 1 {
        c[(k, k)] = crate::gaussian::GaussInt::ONE;
    }
    c
}

impl CoefficientStructure {
    pub fn new(a1: &GaussianIntMatrix, a2: &GaussianIntMatrix) -> Result<Self> {
        let m = a1.nrows();
        if !a1.is_square() || !a2.is_square() || a2.nrows() != m - 1 {
            return Err(Error::DimensionMismatch(format!(
                "A1 must be MxM and A2 (M-1)x(M-1); got {}x{} and {}x{}",
                a1.nrows(),
                a1.ncols(),
                a2.nrows(),
                a2.ncols()
            )));
        }
        let c12 = c12_pattern(m);
        let c22 = c22_pattern(m);
        Ok(CoefficientStructure {
            c_r1: a1.hstack(&c12.mul(a2)),
            c_r2: a1.hstack(&c22.mul(a2)),
            c12,
            c22,
        })
    }
}

/// Builds the alignment precoders by chaining from `seed` = v_{2,1}:
/// v_{1,1} = F21^-1 F22 v_{2,1}, then alternately
/// v_{1,k+1} = F11^-1 F12 v_{2,k} and v_{2,k+1} = F22^-1 F21 v_{1,k+1}.
///
/// Anchoring the chain at v_{2,1} keeps every column of V1 at most one map
/// deeper than its V2 neighbor; for M = 2 it yields
/// V1 = [F21^-1 F22 1, F11^-1 F12 1], the construction the simulations use.
pub fn build_precoders(hop: &HopChannel, seed: &CVec) -> Result<AlignmentSet> {
    let m = hop.antennas();
    if m < 2 {
        return Err(Error::InvalidAntennaCount(m));
    }
    if seed.len() != m {
        return Err(Error::DimensionMismatch(format!(
            "seed has {} entries, expected {}",
            seed.len(),
            m
        )));
    }
    if seed.iter().all(|z| z.norm_sqr() == 0.0) {
        return Err(Error::InvalidParameter("seed vector is zero".into()));
    }
    let f22_inv_f21 = inverse_guarded(&hop.f22)? * &hop.f21;
    let f11_inv_f12 = inverse_guarded(&hop.f11)? * &hop.f12;
    let f21_inv_f22 = inverse_guarded(&hop.f21)? * &hop.f22;

    let mut v1 = CMat::zeros(m, m);
    let mut v2 = CMat::zeros(m, m - 1);
    v2.set_column(0, seed);
    v1.set_column(0, &(&f21_inv_f22 * seed));
    for k in 0..m - 1 {
        let v1k1 = &f11_inv_f12 * v2.column(k);
        v1.set_column(k + 1, &v1k1);
        if k + 1 < m - 1 {
            let v2k1 = &f22_inv_f21 * &v1k1;
            v2.set_column(k + 1, &v2k1);
        }
    }

    // Both condition families, evaluated as written.
    let mut worst = 0.0f64;
    for k in 0..m - 1 {
        let r1 = &hop.f11 * v1.column(k + 1) - &hop.f12 * v2.column(k);
        let r2 = &hop.f21 * v1.column(k) - &hop.f22 * v2.column(k);
        worst = worst
            .max(r1.norm_squared().sqrt())
            .max(r2.norm_squared().sqrt());
    }
    let col_scale = (0..m)
        .map(|j| v1.column(j).norm_squared().sqrt())
        .chain((0..m - 1).map(|j| v2.column(j).norm_squared().sqrt()))
        .fold(0.0f64, f64::max);
    let residual = if col_scale > 0.0 { worst / col_scale } else { worst };

    let (lo, hi) = singular_extremes(&v1);
    if hi <= 0.0 || lo / hi < RANK_TOL {
        return Err(Error::AlignmentDegenerate);
    }

    Ok(AlignmentSet {
        h_r1: &hop.f11 * &v1,
        h_r2: &hop.f21 * &v1,
        v1,
        v2,
        residual,
    })
}

/// The aligned factorization seen by one relay: H_Rk = F_{k1} V1 and
/// C_Rk = [A1 | C_{k2} A2].
pub fn aligned_channel(
    hop: &HopChannel,
    set: &AlignmentSet,
    a1: &GaussianIntMatrix,
    a2: &GaussianIntMatrix,
    relay: usize,
) -> Result<(CMat, GaussianIntMatrix)> {
    let cs = CoefficientStructure::new(a1, a2)?;
    match relay {
        1 => Ok((&hop.f11 * &set.v1, cs.c_r1)),
        2 => Ok((&hop.f21 * &set.v1, cs.c_r2)),
        _ => Err(Error::InvalidParameter(format!("relay index {relay}"))),
    }
}

/// Effective SNR from the per-transmitter power constraint:
/// M * snr / tr(V A A^H V^H).
pub fn effective_snr(v: &CMat, a: &GaussianIntMatrix, snr: f64, m: usize) -> Result<f64> {
    if v.ncols() != a.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "V has {} columns but A has {} rows",
            v.ncols(),
            a.nrows()
        )));
    }
    let tr = crate::cof::power_penalty(v, a);
    if tr <= 0.0 {
        return Err(Error::ZeroTrace);
    }
    Ok(m as f64 * snr / tr)
}

/// Residual of the aligned-sum identity
/// F_{k1} X1 + F_{k2} X2 = H_Rk C_Rk [T1; T2], relative Frobenius.
/// Used by tests and the selftest suite.
pub fn factorization_residual(
    hop: &HopChannel,
    set: &AlignmentSet,
    a1: &GaussianIntMatrix,
    a2: &GaussianIntMatrix,
    t1: &CMat,
    t2: &CMat,
    relay: usize,
) -> Result<f64> {
    let (h_r, c_r) = aligned_channel(hop, set, a1, a2, relay)?;
    let x1 = &set.v1 * a1.to_complex() * t1;
    let x2 = &set.v2 * a2.to_complex() * t2;
    let lhs = match relay {
        1 => &hop.f11 * x1 + &hop.f12 * x2,
        _ => &hop.f21 * x1 + &hop.f22 * x2,
    };
    let mut stacked = CMat::zeros(t1.nrows() + t2.nrows(), t1.ncols());
    stacked
        .view_mut((0, 0), (t1.nrows(), t1.ncols()))
        .copy_from(t1);
    stacked
        .view_mut((t1.nrows(), 0), (t2.nrows(), t2.ncols()))
        .copy_from(t2);
    let rhs = h_r * c_r.to_complex() * stacked;
    let denom = frobenius(&rhs).max(1e-30);
    Ok(frobenius(&(lhs - rhs)) / denom)
}
