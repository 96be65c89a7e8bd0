//! Invariant suites behind the CLI `selftest` subcommand. Each suite is a
//! fast, deterministic re-check of a core algebraic property; the full
//! statistical acceptance runs live in the integration tests.

use crate::align::{build_precoders, factorization_residual};
use crate::codec::{two_hop_exact_chain, HopMatrices, NestedLatticeCode};
use crate::cof::{direct_variance, effective_noise_variance, optimal_alpha, CofChannel};
use crate::error::Result;
use crate::ffnet::{end_to_end_matrix, relay_precoders, system_matrix, MessageBlock};
use crate::gaussian::GaussianIntMatrix;
use crate::gfq::{mat_mul, reduce_mod_p, FieldCtx, GfqMatrix};
use crate::linalg::{frobenius, CMat, CVec, C64};
use crate::reduce::{is_unimodular, lll_reduce, refine_enumeration};
use crate::sim::{derive_seed, sample_channel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

type Check = (&'static str, fn() -> Result<()>);

fn fail(msg: String) -> crate::Error {
    crate::Error::InvalidParameter(msg)
}

fn field_axioms() -> Result<()> {
    let ctx = FieldCtx::new(3)?;
    let all: Vec<_> = (0..3)
        .flat_map(|r| (0..3).map(move |i| crate::gfq::GfqElem::new(r, i)))
        .collect();
    for &a in &all {
        for &b in &all {
            if ctx.add(a, b) != ctx.add(b, a) || ctx.mul(a, b) != ctx.mul(b, a) {
                return Err(fail(format!("commutativity broke at {a:?}, {b:?}")));
            }
            for &c in &all {
                let lhs = ctx.mul(a, ctx.add(b, c));
                let rhs = ctx.add(ctx.mul(a, b), ctx.mul(a, c));
                if lhs != rhs {
                    return Err(fail(format!("distributivity broke at {a:?},{b:?},{c:?}")));
                }
            }
        }
        if !a.is_zero() && ctx.mul(a, ctx.inv(a)?) != ctx.one() {
            return Err(fail(format!("inverse broke at {a:?}")));
        }
    }
    Ok(())
}

fn reduction_homomorphism() -> Result<()> {
    let ctx = FieldCtx::new(7)?;
    let mut rng = ChaCha12Rng::seed_from_u64(1);
    for _ in 0..500 {
        let mut rand_mat = |r: usize, c: usize| {
            let pairs: Vec<(i64, i64)> = (0..r * c)
                .map(|_| (rng.gen_range(-40..40), rng.gen_range(-40..40)))
                .collect();
            GaussianIntMatrix::from_pairs(r, c, &pairs)
        };
        let a = rand_mat(3, 2);
        let b = rand_mat(2, 3);
        let lhs = reduce_mod_p(&a.mul(&b), &ctx);
        let rhs = mat_mul(&reduce_mod_p(&a, &ctx), &reduce_mod_p(&b, &ctx), &ctx);
        if lhs != rhs {
            return Err(fail("reduction homomorphism failed".into()));
        }
    }
    Ok(())
}

fn lemma1_diagonalization() -> Result<()> {
    for p in [3u32, 7, 11] {
        let ctx = FieldCtx::new(p)?;
        for m in 2..=8usize {
            let sys = system_matrix(m, &ctx)?;
            let pre = relay_precoders(m, &ctx)?;
            let e2e = end_to_end_matrix(&sys, &pre, &ctx);
            if !e2e.is_diagonal() {
                return Err(fail(format!("off-diagonal entry at m={m} p={p}")));
            }
            for i in 0..m {
                if e2e[(i, i)] != ctx.one() {
                    return Err(fail(format!("diag[{i}] != 1 at m={m} p={p}")));
                }
            }
            for i in m..2 * m - 1 {
                if e2e[(i, i)] != ctx.neg(ctx.one()) {
                    return Err(fail(format!("diag[{i}] != -1 at m={m} p={p}")));
                }
            }
        }
    }
    Ok(())
}

fn codec_chain() -> Result<()> {
    let ctx = FieldCtx::new(7)?;
    let code = NestedLatticeCode::random(ctx, 8, 4, 7.0, 99)?;
    let mut rng = ChaCha12Rng::seed_from_u64(2);
    let id2 = GaussianIntMatrix::identity(2);
    let id1 = GaussianIntMatrix::identity(1);
    let a1 = GaussianIntMatrix::from_pairs(2, 2, &[(1, 0), (1, 1), (0, 0), (1, 0)]);
    let b1 = GaussianIntMatrix::from_pairs(2, 2, &[(0, 1), (1, 0), (1, 0), (1, 1)]);
    let hop1 = HopMatrices { a1: &a1, a2: &id1, b1: &b1, b2: &id2 };
    let hop2 = HopMatrices { a1: &id2, a2: &id1, b1: &id2, b2: &b1 };
    for trial in 0..25u64 {
        let block = MessageBlock::new(
            GfqMatrix::random(2, 4, &ctx, &mut rng),
            GfqMatrix::random(1, 4, &ctx, &mut rng),
        )?;
        let out = two_hop_exact_chain(&block, &hop1, &hop2, &code, 4000 + trial)?;
        if out.w1 != block.w1 || out.w2 != block.w2.neg(&ctx) {
            return Err(fail(format!("chain mismatch on trial {trial}")));
        }
    }
    Ok(())
}

fn alignment_residuals() -> Result<()> {
    for seed in 0..20u64 {
        let (first, second) = sample_channel(3, derive_seed(31, seed));
        for hop in [&first, &second] {
            let ones = CVec::from_element(3, C64::new(1.0, 0.0));
            let set = build_precoders(hop, &ones)?;
            if set.residual >= 1e-9 {
                return Err(fail(format!("residual {} at seed {seed}", set.residual)));
            }
            let a1 = GaussianIntMatrix::identity(3);
            let a2 = GaussianIntMatrix::identity(2);
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let t1 = CMat::from_fn(3, 4, |_, _| {
                C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            });
            let t2 = CMat::from_fn(2, 4, |_, _| {
                C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            });
            for relay in [1, 2] {
                let res = factorization_residual(hop, &set, &a1, &a2, &t1, &t2, relay)?;
                if res >= 1e-9 {
                    return Err(fail(format!("factorization residual {res}")));
                }
            }
        }
    }
    Ok(())
}

fn reduction_invariants() -> Result<()> {
    let mut rng = ChaCha12Rng::seed_from_u64(3);
    for _ in 0..25 {
        let basis = CMat::from_fn(3, 3, |_, _| {
            C64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))
        });
        let Ok(r) = lll_reduce(&basis, 0.75) else {
            continue;
        };
        if !is_unimodular(&r.transform)? {
            return Err(fail("LLL transform not unimodular".into()));
        }
        let refined = refine_enumeration(&r, 1.0);
        if refined.objective > r.objective + 1e-12 {
            return Err(fail("refinement increased the objective".into()));
        }
        let recon = &basis * refined.transform.to_complex();
        let rel = frobenius(&(recon - refined.reduced.clone())) / frobenius(&refined.reduced);
        if rel >= 1e-9 {
            return Err(fail(format!("reconstruction error {rel}")));
        }
    }
    Ok(())
}

fn mmse_consistency() -> Result<()> {
    let mut rng = ChaCha12Rng::seed_from_u64(4);
    for _ in 0..20 {
        let h = CMat::from_fn(2, 2, |_, _| {
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let pairs: Vec<(i64, i64)> = (0..6)
            .map(|_| (rng.gen_range(-2..3), rng.gen_range(-2..3)))
            .collect();
        let c = GaussianIntMatrix::from_pairs(2, 3, &pairs);
        let ch = CofChannel::new(h, c, 20.0)?;
        let b = vec![
            crate::gaussian::GaussInt::new(1, 0),
            crate::gaussian::GaussInt::new(0, 1),
        ];
        let sigma = effective_noise_variance(&ch, &b)?;
        let alpha = optimal_alpha(&ch, &b)?;
        let direct = direct_variance(&ch, &b, &alpha);
        if (direct - sigma).abs() > 1e-9 * sigma.max(1e-30) {
            return Err(fail(format!("direct {direct} vs form {sigma}")));
        }
    }
    Ok(())
}

const CHECKS: &[Check] = &[
    ("field axioms over GF(9)", field_axioms),
    ("reduction homomorphism [AB]_q = [A]_q [B]_q", reduction_homomorphism),
    ("relay precoding diagonalizes the network", lemma1_diagonalization),
    ("exact two-hop codec chain", codec_chain),
    ("alignment conditions and factorization", alignment_residuals),
    ("LLL transform exactness and refinement", reduction_invariants),
    ("MMSE variance consistency", mmse_consistency),
];

/// Runs every suite, printing a PASS/FAIL line per check; returns the
/// number of failures.
pub fn run_all() -> usize {
    let mut failures = 0;
    for (name, check) in CHECKS {
        match check() {
            Ok(()) => println!("PASS {name}"),
            Err(e) => {
                failures += 1;
                println!("FAIL {name}: {e}");
            }
        }
    }
    failures
}

#[cfg(test)]
mod tests {
    #[test]
    fn all_suites_pass() {
        assert_eq!(super::run_all(), 0);
    }
}
