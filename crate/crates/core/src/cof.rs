//! Compute-and-forward rate engine.
//!
//! A receiver sees Y = H C X + Z, scales by alpha, removes dithers and
//! reduces mod the coarse lattice; what remains of the noise after the
//! MMSE choice of alpha has variance
//!
//! ```text
//! sigma^2(HC, b) = b^H C (SNR_eff^-1 I + C^H H^H H C)^-1 C^H b
//! ```
//!
//! and the computation rate for coefficient vector b is
//! log2+(SNR_eff / sigma^2). Decoding M combinations with the rows of a
//! full-rank B achieves the minimum of the per-row rates. The integer
//! matrices are chosen by lattice reduction: A minimizes the transmit power
//! penalty tr(V A A^H V^H), B minimizes the worst per-row noise variance
//! via the Cholesky form ||L^H b||^2.

use crate::error::{Error, Result};
use crate::gaussian::{GaussInt, GaussianIntMatrix};
use crate::linalg::{
    cholesky_lower, col_norm_sq, col_norm_sq_sum, inverse_guarded, solve_hpd, CMat, CVec, C64,
};
use crate::reduce::{lll_reduce, refine_enumeration, ReductionResult};

/// One compute-and-forward receiver: aligned channel H, integer structure C
/// and the operating lattice second moment (linear SNR).
#[derive(Clone, Debug)]
pub struct CofChannel {
    /// M x M complex channel factor.
    pub h: CMat,
    /// M x K Gaussian-integer structure multiplying the K codeword streams.
    pub c: GaussianIntMatrix,
    /// Effective SNR (sigma^2 of the coarse lattice), linear scale.
    pub snr_eff: f64,
}

/// Outcome of decoding one integer combination.
#[derive(Clone, Debug)]
pub struct CofResult {
    pub b: Vec<GaussInt>,
    pub alpha: CVec,
    pub sigma_sq: f64,
    pub rate: f64,
}

impl CofChannel {
    pub fn new(h: CMat, c: GaussianIntMatrix, snr_eff: f64) -> Result<Self> {
        if h.nrows() != h.ncols() {
            return Err(Error::NonSquare);
        }
        if h.nrows() != c.nrows() {
            return Err(Error::DimensionMismatch(format!(
                "H is {0}x{0} but C has {1} rows",
                h.nrows(),
                c.nrows()
            )));
        }
        if !(snr_eff > 0.0) {
            return Err(Error::InvalidParameter(format!("snr_eff {snr_eff} <= 0")));
        }
        Ok(CofChannel { h, c, snr_eff })
    }

    pub fn antennas(&self) -> usize {
        self.h.nrows()
    }

    /// The Hermitian form Phi with sigma^2(b) = b^H Phi b, i.e.
    /// Phi = C (SNR^-1 I + C^H H^H H C)^-1 C^H.
    pub fn mmse_form(&self) -> Result<CMat> {
        let cc = self.c.to_complex();
        let g = &self.h * &cc;
        let k = cc.ncols();
        let inner = CMat::identity(k, k).scale(1.0 / self.snr_eff) + g.adjoint() * &g;
        let chol = nalgebra::Cholesky::new(crate::linalg::hermitian_part(&inner))
            .ok_or(Error::SingularChannel)?;
        let x = chol.solve(&cc.adjoint());
        Ok(crate::linalg::hermitian_part(&(&cc * x)))
    }
}

fn check_b_len(ch: &CofChannel, b: &[GaussInt]) -> Result<()> {
    if b.len() != ch.antennas() {
        return Err(Error::DimensionMismatch(format!(
            "b has {} entries, expected {}",
            b.len(),
            ch.antennas()
        )));
    }
    Ok(())
}

/// Hermitian quadratic form b^H Phi b (real-valued for Hermitian Phi).
fn quad_form(phi: &CMat, b: &[GaussInt]) -> f64 {
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..b.len() {
        for j in 0..b.len() {
            acc += b[i].to_complex().conj() * phi[(i, j)] * b[j].to_complex();
        }
    }
    acc.re.max(0.0)
}

/// Variance of the effective noise after MMSE scaling.
pub fn effective_noise_variance(ch: &CofChannel, b: &[GaussInt]) -> Result<f64> {
    check_b_len(ch, b)?;
    if b.iter().all(|g| g.is_zero()) {
        return Ok(0.0);
    }
    let phi = ch.mmse_form()?;
    Ok(quad_form(&phi, b))
}

/// The MMSE minimizer of the direct variance
/// snr * ||alpha^H H C - b^H C||^2 + ||alpha||^2, from its normal equations
/// (I + snr G G^H) alpha = snr G C^H b with G = H C.
pub fn optimal_alpha(ch: &CofChannel, b: &[GaussInt]) -> Result<CVec> {
    check_b_len(ch, b)?;
    let m = ch.antennas();
    let cc = ch.c.to_complex();
    let g = &ch.h * &cc;
    let bv = CVec::from_fn(m, |i, _| b[i].to_complex());
    let rhs = (&g * (cc.adjoint() * bv)).scale(ch.snr_eff);
    let lhs = CMat::identity(m, m) + (&g * g.adjoint()).scale(ch.snr_eff);
    solve_hpd(&lhs, &rhs)
}

/// Evaluates the direct variance expression at a given alpha:
/// snr * ||alpha^H H C - b^H C||^2 + ||alpha||^2.
pub fn direct_variance(ch: &CofChannel, b: &[GaussInt], alpha: &CVec) -> f64 {
    let cc = ch.c.to_complex();
    let g = &ch.h * &cc;
    let bv = CVec::from_fn(b.len(), |i, _| b[i].to_complex());
    let resid = g.adjoint() * alpha - cc.adjoint() * bv;
    ch.snr_eff * resid.iter().map(|z| z.norm_sqr()).sum::<f64>()
        + alpha.iter().map(|z| z.norm_sqr()).sum::<f64>()
}

/// Zero-forcing (exact integer-forcing) noise variance ||(H^-1)^H b||^2.
pub fn exact_ifr_variance(h: &CMat, b: &[GaussInt]) -> Result<f64> {
    let h_inv = inverse_guarded(h)?;
    if b.len() != h.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "b has {} entries, expected {}",
            b.len(),
            h.nrows()
        )));
    }
    let bv = CVec::from_fn(b.len(), |i, _| b[i].to_complex());
    let v = h_inv.adjoint() * bv;
    Ok(v.iter().map(|z| z.norm_sqr()).sum())
}

fn rate_from_sigma(snr_eff: f64, sigma_sq: f64) -> f64 {
    if sigma_sq <= 0.0 {
        return f64::INFINITY;
    }
    (snr_eff / sigma_sq).log2().max(0.0)
}

/// Computation rate log2+(SNR_eff / sigma^2) for one coefficient vector.
pub fn computation_rate(ch: &CofChannel, b: &[GaussInt]) -> Result<f64> {
    Ok(rate_from_sigma(ch.snr_eff, effective_noise_variance(ch, b)?))
}

/// Rate plus the quantities that produced it.
pub fn analyze(ch: &CofChannel, b: &[GaussInt]) -> Result<CofResult> {
    let sigma_sq = effective_noise_variance(ch, b)?;
    let alpha = optimal_alpha(ch, b)?;
    Ok(CofResult {
        b: b.to_vec(),
        alpha,
        sigma_sq,
        rate: rate_from_sigma(ch.snr_eff, sigma_sq),
    })
}

/// Matrix computation rate: the minimum per-row rate over the rows of B.
/// Row l of `b_mat` stores the (conjugate-transposed) coefficient vector
/// b_l^H that left-multiplies the channel.
pub fn computation_rate_matrix(ch: &CofChannel, b_mat: &GaussianIntMatrix) -> Result<f64> {
    if b_mat.ncols() != ch.antennas() {
        return Err(Error::DimensionMismatch(format!(
            "B has {} columns, expected {}",
            b_mat.ncols(),
            ch.antennas()
        )));
    }
    let phi = ch.mmse_form()?;
    let mut min_rate = f64::INFINITY;
    for l in 0..b_mat.nrows() {
        let b: Vec<GaussInt> = b_mat.row(l).iter().map(|g| g.conj()).collect();
        let sigma = quad_form(&phi, &b);
        min_rate = min_rate.min(rate_from_sigma(ch.snr_eff, sigma));
    }
    Ok(min_rate)
}

/// Runs LLL plus enumeration refinement to a fixpoint and returns the
/// candidate transforms to consider alongside the identity.
fn reduction_candidates(gen: &CMat) -> Result<Vec<GaussianIntMatrix>> {
    let d = gen.ncols();
    let mut cands = Vec::with_capacity(3);
    let lll = lll_reduce(gen, 0.75)?;
    let mut refined: ReductionResult = lll.clone();
    for _ in 0..8 {
        let next = refine_enumeration(&refined, 1.0);
        if next.objective >= refined.objective - 1e-12 {
            refined = next;
            break;
        }
        refined = next;
    }
    cands.push(refined.transform);
    cands.push(lll.transform);
    cands.push(GaussianIntMatrix::identity(d));
    Ok(cands)
}

/// Minimizes the transmit power penalty tr(V A A^H V^H) over unimodular A
/// by reducing the lattice generated by the columns of V. The identity is
/// always a candidate, so the result never loses to A = I.
pub fn optimize_a(v: &CMat) -> Result<GaussianIntMatrix> {
    let mut best: Option<(f64, GaussianIntMatrix)> = None;
    for u in reduction_candidates(v)? {
        let obj = col_norm_sq_sum(&(v * u.to_complex()));
        if best.as_ref().map_or(true, |(b, _)| obj < *b - 1e-12) {
            best = Some((obj, u));
        }
    }
    Ok(best.expect("candidate list is never empty").1)
}

/// Transmit power penalty tr(V A A^H V^H) of a precoder/integer-matrix pair.
pub fn power_penalty(v: &CMat, a: &GaussianIntMatrix) -> f64 {
    col_norm_sq_sum(&(v * a.to_complex()))
}

/// Chooses a full-rank (unimodular) B minimizing the worst per-row noise
/// variance max_l ||L^H b_l||^2, where Phi = L L^H is the MMSE form of the
/// channel. Rows are sorted by increasing variance.
pub fn optimize_b(ch: &CofChannel) -> Result<GaussianIntMatrix> {
    let phi = ch.mmse_form()?;
    let l = cholesky_lower(&phi)?;
    let gen = l.adjoint();
    let m = ch.antennas();

    let max_obj = |u: &GaussianIntMatrix| -> f64 {
        let cols = &gen * u.to_complex();
        (0..m).map(|j| col_norm_sq(&cols, j)).fold(0.0, f64::max)
    };

    let mut best: Option<(f64, GaussianIntMatrix)> = None;
    for u in reduction_candidates(&gen)? {
        let obj = max_obj(&u);
        if best.as_ref().map_or(true, |(b, _)| obj < *b - 1e-12) {
            best = Some((obj, u));
        }
    }
    let u = best.expect("candidate list is never empty").1;

    // Sort coefficient vectors by their variance, then emit rows b_l^H.
    let cols = &gen * u.to_complex();
    let mut idx: Vec<usize> = (0..m).collect();
    idx.sort_by(|&a, &b| {
        col_norm_sq(&cols, a)
            .partial_cmp(&col_norm_sq(&cols, b))
            .unwrap()
            .then(a.cmp(&b))
    });
    let mut b_mat = GaussianIntMatrix::zeros(m, m);
    for (row, &j) in idx.iter().enumerate() {
        for i in 0..m {
            b_mat[(row, i)] = u[(i, j)].conj();
        }
    }
    Ok(b_mat)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reduce::is_unimodular;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn g(re: i64, im: i64) -> GaussInt {
        GaussInt::new(re, im)
    }

    fn scalar_channel(snr: f64) -> CofChannel {
        CofChannel::new(
            CMat::identity(1, 1),
            GaussianIntMatrix::identity(1),
            snr,
        )
        .unwrap()
    }

    fn random_channel(rng: &mut ChaCha12Rng, m: usize, k: usize, snr: f64) -> CofChannel {
        let h = CMat::from_fn(m, m, |_, _| {
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let pairs: Vec<(i64, i64)> = (0..m * k)
            .map(|_| (rng.gen_range(-2..3), rng.gen_range(-2..3)))
            .collect();
        let c = GaussianIntMatrix::from_pairs(m, k, &pairs);
        CofChannel::new(h, c, snr).unwrap()
    }

    #[test]
    fn scalar_variance_and_rate() {
        let ch = scalar_channel(100.0);
        let v = effective_noise_variance(&ch, &[g(1, 0)]).unwrap();
        assert!((v - 100.0 / 101.0).abs() < 1e-12);

        let ch = scalar_channel(15.0);
        let r = computation_rate(&ch, &[g(1, 0)]).unwrap();
        assert!((r - 4.0).abs() < 1e-12);

        // sigma^2 >= snr_eff clamps the rate at zero.
        let r = computation_rate(&ch, &[g(100, 0)]).unwrap();
        assert_eq!(r, 0.0);
    }

    #[test]
    fn zero_coefficients() {
        let ch = scalar_channel(10.0);
        assert_eq!(effective_noise_variance(&ch, &[g(0, 0)]).unwrap(), 0.0);
        let a = optimal_alpha(&ch, &[g(0, 0)]).unwrap();
        assert!(a[0].norm() < 1e-14);
    }

    #[test]
    fn scalar_mmse_alpha() {
        for s in [0.5, 4.0, 100.0] {
            let ch = scalar_channel(s);
            let a = optimal_alpha(&ch, &[g(1, 0)]).unwrap();
            assert!((a[0].re - s / (1.0 + s)).abs() < 1e-12);
            assert!(a[0].im.abs() < 1e-14);
        }
    }

    #[test]
    fn mmse_matches_direct_variance_and_is_optimal() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        for _ in 0..20 {
            let ch = random_channel(&mut rng, 2, 3, 25.0);
            let b = vec![g(1, 0), g(0, 1)];
            let sigma = effective_noise_variance(&ch, &b).unwrap();
            let alpha = optimal_alpha(&ch, &b).unwrap();
            let direct = direct_variance(&ch, &b, &alpha);
            assert!(
                (direct - sigma).abs() <= 1e-9 * sigma.max(1e-30),
                "direct {direct} vs quadratic form {sigma}"
            );
            // 100 random perturbations never beat the MMSE choice.
            for _ in 0..100 {
                let eps = CVec::from_fn(2, |_, _| {
                    C64::new(rng.gen_range(-0.1..0.1), rng.gen_range(-0.1..0.1))
                });
                let perturbed = &alpha + eps;
                assert!(direct_variance(&ch, &b, &perturbed) >= sigma - 1e-12);
            }
        }
    }

    #[test]
    fn variance_oracle_explicit_inverse() {
        // Independent route: build Phi with an explicit LU inverse instead of
        // the Cholesky solve used by the implementation.
        let mut rng = ChaCha12Rng::seed_from_u64(77);
        for _ in 0..20 {
            let ch = random_channel(&mut rng, 2, 3, 12.0);
            let b = vec![g(1, -1), g(2, 0)];
            let cc = ch.c.to_complex();
            let gmat = &ch.h * &cc;
            let k = cc.ncols();
            let inner =
                CMat::identity(k, k).scale(1.0 / ch.snr_eff) + gmat.adjoint() * &gmat;
            let inner_inv = inner.try_inverse().unwrap();
            let bv = CVec::from_fn(2, |i, _| b[i].to_complex());
            let w = cc.adjoint() * &bv;
            let expected = (w.adjoint() * inner_inv * w)[(0, 0)].re;
            let got = effective_noise_variance(&ch, &b).unwrap();
            assert!((got - expected).abs() <= 1e-9 * expected.max(1e-12));
        }
    }

    #[test]
    fn exact_ifr_examples() {
        let id = CMat::identity(2, 2);
        assert!((exact_ifr_variance(&id, &[g(1, 0), g(0, 0)]).unwrap() - 1.0).abs() < 1e-12);
        let two_i = CMat::identity(2, 2).scale(2.0);
        assert!(
            (exact_ifr_variance(&two_i, &[g(1, 0), g(0, 0)]).unwrap() - 0.25).abs() < 1e-12
        );

        // Fixed-seed 2x2 channel against a direct inverse.
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let h = CMat::from_fn(2, 2, |_, _| {
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let b = vec![g(1, 0), g(1, 1)];
        let h_inv = h.clone().try_inverse().unwrap();
        let bv = CVec::from_fn(2, |i, _| b[i].to_complex());
        let expected: f64 = (h_inv.adjoint() * bv).iter().map(|z| z.norm_sqr()).sum();
        let got = exact_ifr_variance(&h, &b).unwrap();
        assert!((got - expected).abs() < 1e-12);
    }

    #[test]
    fn exact_ifr_never_beats_mmse() {
        let mut rng = ChaCha12Rng::seed_from_u64(13);
        for _ in 0..30 {
            let m = 2;
            let h = CMat::from_fn(m, m, |_, _| {
                C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            });
            let b = vec![g(1, 0), g(0, 1)];
            let exact = exact_ifr_variance(&h, &b).unwrap();
            for snr in [1.0, 100.0] {
                let ch =
                    CofChannel::new(h.clone(), GaussianIntMatrix::identity(m), snr).unwrap();
                let mmse = effective_noise_variance(&ch, &b).unwrap();
                assert!(mmse <= exact + 1e-12);
            }
            // They converge at very high SNR.
            let ch = CofChannel::new(h.clone(), GaussianIntMatrix::identity(m), 1e8).unwrap();
            let mmse = effective_noise_variance(&ch, &b).unwrap();
            assert!(exact / mmse < 1.01 && mmse <= exact + 1e-12);
        }
    }

    #[test]
    fn matrix_rate_is_min_over_rows() {
        let mut rng = ChaCha12Rng::seed_from_u64(21);
        let ch = random_channel(&mut rng, 2, 3, 30.0);
        // Identical rows give the single-row rate.
        let b_row = [g(1, 0), g(0, 1)];
        let b_mat = GaussianIntMatrix::from_rows(vec![b_row.to_vec(), b_row.to_vec()]);
        let single: Vec<GaussInt> = b_row.iter().map(|x| x.conj()).collect();
        let expected = computation_rate(&ch, &single).unwrap();
        let got = computation_rate_matrix(&ch, &b_mat).unwrap();
        assert!((got - expected).abs() < 1e-12);

        // A huge row forces its sigma^2 above snr_eff and the rate to zero.
        let b_mat = GaussianIntMatrix::from_rows(vec![
            vec![g(1, 0), g(0, 0)],
            vec![g(10_000, 0), g(0, 10_000)],
        ]);
        assert_eq!(computation_rate_matrix(&ch, &b_mat).unwrap(), 0.0);

        // General case: min of the per-row rates.
        let b_mat = GaussianIntMatrix::from_rows(vec![
            vec![g(1, 0), g(1, -1)],
            vec![g(0, 1), g(2, 0)],
        ]);
        let mut expected = f64::INFINITY;
        for l in 0..2 {
            let b: Vec<GaussInt> = b_mat.row(l).iter().map(|x| x.conj()).collect();
            expected = expected.min(computation_rate(&ch, &b).unwrap());
        }
        let got = computation_rate_matrix(&ch, &b_mat).unwrap();
        assert!((got - expected).abs() < 1e-12);
    }

    #[test]
    fn scaling_law_for_coefficients() {
        let mut rng = ChaCha12Rng::seed_from_u64(31);
        let ch = random_channel(&mut rng, 2, 3, 20.0);
        let b = vec![g(1, 1), g(0, 1)];
        let v1 = effective_noise_variance(&ch, &b).unwrap();
        for c in [g(2, 0), g(0, 3), g(1, 1)] {
            let scaled: Vec<GaussInt> = b.iter().map(|&x| c * x).collect();
            let v2 = effective_noise_variance(&ch, &scaled).unwrap();
            let factor = c.norm_sqr() as f64;
            assert!((v2 - factor * v1).abs() <= 1e-9 * v2.max(1e-12));
            if factor >= 1.0 {
                let r1 = computation_rate(&ch, &b).unwrap();
                let r2 = computation_rate(&ch, &scaled).unwrap();
                assert!(r2 <= r1 + 1e-12);
            }
        }
    }

    #[test]
    fn optimize_a_identity_and_unitary() {
        let id = CMat::identity(2, 2);
        let a = optimize_a(&id).unwrap();
        assert!(is_unimodular(&a).unwrap());
        assert!((power_penalty(&id, &a) - 2.0).abs() < 1e-12);

        // A unitary basis is already orthonormal: objective M at A = I.
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let unitary = CMat::from_row_slice(
            2,
            2,
            &[
                C64::new(s, 0.0),
                C64::new(s, 0.0),
                C64::new(s, 0.0),
                C64::new(-s, 0.0),
            ],
        );
        let a = optimize_a(&unitary).unwrap();
        assert!(power_penalty(&unitary, &a) <= 2.0 + 1e-9);
    }

    #[test]
    fn optimize_a_beats_identity_on_skew_basis() {
        // Nearly parallel columns leave room for improvement.
        let v = CMat::from_row_slice(
            2,
            2,
            &[
                C64::new(1.0, 0.0),
                C64::new(0.95, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.05, 0.0),
            ],
        );
        let a = optimize_a(&v).unwrap();
        assert!(is_unimodular(&a).unwrap());
        let baseline = col_norm_sq_sum(&v);
        assert!(power_penalty(&v, &a) < baseline - 1e-6);
    }

    #[test]
    fn optimize_b_identity_gram() {
        let ch = CofChannel::new(
            CMat::identity(2, 2),
            GaussianIntMatrix::identity(2),
            1e6,
        )
        .unwrap();
        let b = optimize_b(&ch).unwrap();
        assert!(is_unimodular(&b).unwrap());
        // Standard basis is already minimal: each row one unit entry.
        for l in 0..2 {
            let nonzero: Vec<&GaussInt> =
                b.row(l).iter().filter(|g| !g.is_zero()).collect();
            assert_eq!(nonzero.len(), 1);
            assert!(nonzero[0].is_unit());
        }
    }

    #[test]
    fn optimize_b_never_worse_than_identity() {
        let mut rng = ChaCha12Rng::seed_from_u64(41);
        for _ in 0..20 {
            let ch = random_channel(&mut rng, 2, 3, 50.0);
            let b = optimize_b(&ch).unwrap();
            assert!(is_unimodular(&b).unwrap());
            let opt = computation_rate_matrix(&ch, &b).unwrap();
            let id = computation_rate_matrix(&ch, &GaussianIntMatrix::identity(2)).unwrap();
            assert!(opt >= id - 1e-9);

            // Rows come out sorted by increasing variance.
            let phi = ch.mmse_form().unwrap();
            let sig: Vec<f64> = (0..2)
                .map(|l| {
                    let bv: Vec<GaussInt> = b.row(l).iter().map(|x| x.conj()).collect();
                    quad_form(&phi, &bv)
                })
                .collect();
            assert!(sig[0] <= sig[1] + 1e-12);
        }
    }

    #[test]
    fn optimize_b_low_snr_minimizes_c_norm() {
        // As snr_eff -> 0, sigma^2 -> snr_eff * ||C^H b||^2, so the chosen
        // rows must minimize the max of ||C^H b||^2 over full-rank sets.
        let mut rng = ChaCha12Rng::seed_from_u64(51);
        let ch = random_channel(&mut rng, 2, 3, 1e-9);
        let b = optimize_b(&ch).unwrap();
        let cc = ch.c.to_complex();
        let worst = |mat: &GaussianIntMatrix| -> f64 {
            (0..2)
                .map(|l| {
                    let bv = CVec::from_fn(2, |i, _| mat[(l, i)].conj().to_complex());
                    (cc.adjoint() * bv).iter().map(|z| z.norm_sqr()).sum::<f64>()
                })
                .fold(0.0, f64::max)
        };
        assert!(worst(&b) <= worst(&GaussianIntMatrix::identity(2)) + 1e-9);
        // And the limit formula itself holds to first order.
        let phi = ch.mmse_form().unwrap();
        let bv = vec![g(1, 0), g(0, 0)];
        let lim = ch.snr_eff
            * (cc.adjoint() * CVec::from_fn(2, |i, _| bv[i].to_complex()))
                .iter()
                .map(|z| z.norm_sqr())
                .sum::<f64>();
        let sigma = quad_form(&phi, &bv);
        assert!((sigma - lim).abs() <= 1e-6 * lim.max(1e-30));
    }

    #[test]
    fn dimension_checks() {
        let ch = scalar_channel(1.0);
        assert!(matches!(
            effective_noise_variance(&ch, &[g(1, 0), g(1, 0)]),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(matches!(
            exact_ifr_variance(&CMat::identity(2, 2), &[g(1, 0)]),
            Err(Error::DimensionMismatch(_))
        ));
    }
}
