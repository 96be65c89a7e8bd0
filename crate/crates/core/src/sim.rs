//! Monte Carlo driver: Rayleigh channel draws, the aligned-PCoF symmetric
//! sum rate, the time-sharing integer-forcing baseline, and CSV output.
//!
//! Sum-rate accounting, in bits per complex channel use:
//!
//! * aligned PCoF delivers 2M-1 streams at a common per-slot rate, the
//!   minimum of the four matrix computation rates (two relays, two hops),
//!   so the symmetric sum rate is (2M-1) times the slot average;
//! * time-sharing activates one source-destination pair per slot with
//!   doubled power; the symmetric sum rate gives both pairs the common
//!   per-stream rate min(R_1, R_2), hence M min(R_1, R_2) overall.
//!
//! Because source 1 carries one more stream than source 2, the roles are
//! alternated across slots, which is what makes the average power
//! constraint efficient: each transmitter is the heavy user half the time,
//! and the per-slot lattice scalings are chosen on the frontier of the
//! two-slot average power budget. All schemes share the same draws (common
//! random numbers), and every trial derives its own seed from the
//! configured one, so a sweep is deterministic regardless of parallelism.

use crate::align::{aligned_channel, build_precoders, AlignmentSet, HopChannel};
use crate::cof::{computation_rate_matrix, optimize_a, optimize_b, CofChannel};
use crate::error::{Error, Result};
use crate::gaussian::GaussianIntMatrix;
use crate::gfq::{rank, reduce_mod_p, FieldCtx};
use crate::linalg::{CMat, CVec, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

/// Schemes the sweep can evaluate. Ordering is lexicographic on the name.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Scheme {
    PcofIdentity,
    PcofOptimized,
    TimeSharing,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [
        Scheme::PcofIdentity,
        Scheme::PcofOptimized,
        Scheme::TimeSharing,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Scheme::PcofIdentity => "pcof_identity",
            Scheme::PcofOptimized => "pcof_optimized",
            Scheme::TimeSharing => "time_sharing",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pcof_identity" => Ok(Scheme::PcofIdentity),
            "pcof_optimized" => Ok(Scheme::PcofOptimized),
            "time_sharing" => Ok(Scheme::TimeSharing),
            other => Err(Error::InvalidParameter(format!("unknown scheme {other:?}"))),
        }
    }
}

/// How the alignment chain is seeded per trial.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlignSeed {
    /// The all-ones vector (the default used throughout).
    Ones,
    /// A fresh random complex vector per trial, for robustness studies.
    Random,
}

/// Sweep configuration.
#[derive(Clone, Debug)]
pub struct SimConfig {
    pub antennas: usize,
    pub snr_grid_db: Vec<f64>,
    pub trials: u64,
    pub seed: u64,
    pub schemes: Vec<Scheme>,
    pub prime: u32,
    pub output_path: String,
    pub align_seed: AlignSeed,
}

impl SimConfig {
    /// The default sweep: M = 2, 0..50 dB in 5 dB steps, 1000 trials, p = 7.
    pub fn default_sweep() -> Self {
        SimConfig {
            antennas: 2,
            snr_grid_db: (0..=10).map(|k| 5.0 * k as f64).collect(),
            trials: 1000,
            seed: 1,
            schemes: Scheme::ALL.to_vec(),
            prime: 7,
            output_path: "pcof_rates.csv".into(),
            align_seed: AlignSeed::Ones,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.antennas < 2 {
            return Err(Error::InvalidAntennaCount(self.antennas));
        }
        if self.snr_grid_db.is_empty() {
            return Err(Error::InvalidParameter("empty SNR grid".into()));
        }
        if self.trials < 1 {
            return Err(Error::InvalidParameter("trials must be >= 1".into()));
        }
        if self.schemes.is_empty() {
            return Err(Error::InvalidParameter("no schemes selected".into()));
        }
        FieldCtx::new(self.prime)?;
        Ok(())
    }
}

/// One point of the ergodic sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct RatePoint {
    pub snr_db: f64,
    pub scheme: Scheme,
    /// Ergodic mean symmetric sum rate, bits per complex channel use.
    pub sum_rate: f64,
    /// Half-width of the 95% confidence interval; 0 when trials == 1.
    pub ci95: f64,
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Deterministic per-stream seed derivation.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    splitmix64(seed ^ splitmix64(stream.wrapping_add(1)))
}

fn gauss_matrix(rng: &mut ChaCha12Rng, m: usize) -> CMat {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    CMat::from_fn(m, m, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re * s, im * s)
    })
}

/// Draws both hops of a 2x2x2 network: eight M x M matrices with i.i.d.
/// CN(0,1) entries, in a fixed order, deterministic in the seed.
pub fn sample_channel(m: usize, seed: u64) -> (HopChannel, HopChannel) {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let first = HopChannel {
        f11: gauss_matrix(&mut rng, m),
        f12: gauss_matrix(&mut rng, m),
        f21: gauss_matrix(&mut rng, m),
        f22: gauss_matrix(&mut rng, m),
    };
    let second = HopChannel {
        f11: gauss_matrix(&mut rng, m),
        f12: gauss_matrix(&mut rng, m),
        f21: gauss_matrix(&mut rng, m),
        f22: gauss_matrix(&mut rng, m),
    };
    (first, second)
}

/// Checks [B C]_q is full rank over GF(q), the condition for the relay to
/// recover its aligned message sums.
fn recovery_rank_ok(
    b: &GaussianIntMatrix,
    c: &GaussianIntMatrix,
    ctx: &FieldCtx,
) -> bool {
    let bc = reduce_mod_p(&b.mul(c), ctx);
    rank(&bc, ctx) == b.nrows()
}

struct HopRates {
    min_rate: f64,
}

/// Computation-rate minimum over both relays of one hop, for a given
/// alignment set, integer matrices, and effective SNR.
fn hop_min_rate(
    hop: &HopChannel,
    set: &AlignmentSet,
    a1: &GaussianIntMatrix,
    a2: &GaussianIntMatrix,
    snr_eff: f64,
    optimize: bool,
    ctx: &FieldCtx,
) -> Result<HopRates> {
    let m = hop.antennas();
    let mut min_rate = f64::INFINITY;
    for relay in 1..=2 {
        let (h_r, c_r) = aligned_channel(hop, set, a1, a2, relay)?;
        let ch = CofChannel::new(h_r, c_r.clone(), snr_eff)?;
        let b = if optimize {
            optimize_b(&ch)?
        } else {
            GaussianIntMatrix::identity(m)
        };
        if !recovery_rank_ok(&b, &c_r, ctx) {
            // Unimodular B makes this unreachable, but the repair path the
            // harness relies on is a plain resample of the draw.
            return Err(Error::SingularMatrix);
        }
        min_rate = min_rate.min(computation_rate_matrix(&ch, &b)?);
    }
    Ok(HopRates { min_rate })
}

/// One hop's alignment sets and integer beamforming matrices for both role
/// assignments (the "slots" of the alternation).
struct SlotPrecoding {
    set: AlignmentSet,
    a_heavy: GaussianIntMatrix,
    a_light: GaussianIntMatrix,
    /// Power traces tr(V A A^H V^H) of the M-stream and (M-1)-stream users.
    tr_heavy: f64,
    tr_light: f64,
}

fn slot_precoding(
    hop: &HopChannel,
    seed_vec: &CVec,
    a_opt: bool,
) -> Result<SlotPrecoding> {
    let m = hop.antennas();
    let set = build_precoders(hop, seed_vec)?;
    let (a_heavy, a_light) = if a_opt {
        (optimize_a(&set.v1)?, optimize_a(&set.v2)?)
    } else {
        (
            GaussianIntMatrix::identity(m),
            GaussianIntMatrix::identity(m - 1),
        )
    };
    let tr_heavy = crate::cof::power_penalty(&set.v1, &a_heavy);
    let tr_light = crate::cof::power_penalty(&set.v2, &a_light);
    if tr_heavy <= 0.0 || tr_light <= 0.0 {
        return Err(Error::ZeroTrace);
    }
    Ok(SlotPrecoding {
        set,
        a_heavy,
        a_light,
        tr_heavy,
        tr_light,
    })
}

/// Candidate per-slot lattice second moments (S_A, S_B) for one hop under
/// the two-slot average power constraints. Each physical transmitter is the
/// heavy (M-stream) user in one slot and the light user in the other:
///
/// ```text
/// S_A tr_heavy^A + S_B tr_light^B <= 2 M snr      (transmitter 1)
/// S_A tr_light^A + S_B tr_heavy^B <= 2 M snr      (transmitter 2)
/// ```
///
/// Candidates: the per-slot allocation scaled out to the frontier, the
/// single-constraint optima of log S_A + log S_B, the constraint vertex,
/// and the equal-split point. All are feasible; the caller evaluates the
/// actual rates and keeps the best.
fn budget_candidates(
    slot_a: &SlotPrecoding,
    slot_b: &SlotPrecoding,
    snr: f64,
    m: usize,
) -> Vec<(f64, f64)> {
    let c = 2.0 * m as f64 * snr;
    let (a1, b1) = (slot_a.tr_heavy, slot_b.tr_light);
    let (a2, b2) = (slot_a.tr_light, slot_b.tr_heavy);
    let feasible = |s: (f64, f64)| {
        s.0 > 0.0
            && s.1 > 0.0
            && a1 * s.0 + b1 * s.1 <= c * (1.0 + 1e-9)
            && a2 * s.0 + b2 * s.1 <= c * (1.0 + 1e-9)
    };
    let mut out = Vec::with_capacity(5);

    // Per-slot allocation (the Theorem-1 operating point), scaled out to
    // the average-power frontier.
    let s_a0 = m as f64 * snr / slot_a.tr_heavy.max(slot_a.tr_light);
    let s_b0 = m as f64 * snr / slot_b.tr_heavy.max(slot_b.tr_light);
    let lam = c / (a1 * s_a0 + b1 * s_b0).max(a2 * s_a0 + b2 * s_b0);
    out.push((lam * s_a0, lam * s_b0));

    for (pa, pb, qa, qb) in [(a1, b1, a2, b2), (a2, b2, a1, b1)] {
        let cand = (c / (2.0 * pa), c / (2.0 * pb));
        if qa * cand.0 + qb * cand.1 <= c * (1.0 + 1e-9) && feasible(cand) {
            out.push(cand);
        }
    }
    let det = a1 * b2 - a2 * b1;
    if det.abs() > 1e-12 {
        let vertex = (c * (b2 - b1) / det, c * (a1 - a2) / det);
        if feasible(vertex) {
            out.push(vertex);
        }
    }
    let eq = c / (a1 + b1).max(a2 + b2);
    out.push((eq, eq));
    out
}

/// Aligned-PCoF symmetric sum rate on one channel draw, averaged over the
/// two role assignments (which share the average power budget).
pub fn pcof_symmetric_rate(
    first: &HopChannel,
    second: &HopChannel,
    snr: f64,
    optimize: bool,
    ctx: &FieldCtx,
) -> Result<f64> {
    let ones = CVec::from_element(first.antennas(), C64::new(1.0, 0.0));
    pcof_symmetric_rate_seeded(first, second, snr, optimize, ctx, &ones)
}

/// Same as `pcof_symmetric_rate` with an explicit alignment seed vector.
pub fn pcof_symmetric_rate_seeded(
    first: &HopChannel,
    second: &HopChannel,
    snr: f64,
    optimize: bool,
    ctx: &FieldCtx,
    seed_vec: &CVec,
) -> Result<f64> {
    let m = first.antennas();
    let first_sw = first.swapped_roles();
    let second_sw = second.swapped_roles();

    let config_rate = |a_opt: bool, b_opt: bool| -> Result<f64> {
        // Slot A: roles as drawn; slot B: sources, relays and destinations
        // relabeled 1 <-> 2.
        let hop1 = [
            slot_precoding(first, seed_vec, a_opt)?,
            slot_precoding(&first_sw, seed_vec, a_opt)?,
        ];
        let hop2 = [
            slot_precoding(second, seed_vec, a_opt)?,
            slot_precoding(&second_sw, seed_vec, a_opt)?,
        ];
        let channels = [[first, &first_sw], [second, &second_sw]];

        // Per hop: evaluate both slots' rates at each power-allocation
        // candidate, then pick the candidate pair maximizing the composed
        // rate. Every candidate respects the average power constraint.
        let mut per_hop: Vec<Vec<[f64; 2]>> = Vec::with_capacity(2);
        for (h, slots) in [&hop1, &hop2].into_iter().enumerate() {
            let cands = budget_candidates(&slots[0], &slots[1], snr, m);
            let mut rates = Vec::with_capacity(cands.len());
            for (s_a, s_b) in cands {
                let mut pair = [0.0f64; 2];
                for (slot, rate) in pair.iter_mut().enumerate() {
                    let sp = &slots[slot];
                    let snr_eff = if slot == 0 { s_a } else { s_b };
                    let hr = hop_min_rate(
                        channels[h][slot],
                        &sp.set,
                        &sp.a_heavy,
                        &sp.a_light,
                        snr_eff,
                        b_opt,
                        ctx,
                    )?;
                    *rate = hr.min_rate;
                }
                rates.push(pair);
            }
            per_hop.push(rates);
        }

        let mut best = 0.0f64;
        for r1 in &per_hop[0] {
            for r2 in &per_hop[1] {
                let composed = 0.5 * (r1[0].min(r2[0]) + r1[1].min(r2[1]));
                best = best.max(composed);
            }
        }
        Ok((2 * m - 1) as f64 * best)
    };

    if optimize {
        // Both fully-optimized and identity-A configurations are valid
        // operating points; take the better one. The second is never worse
        // than the all-identity scheme, which keeps per-draw dominance.
        Ok(config_rate(true, true)?.max(config_rate(false, true)?))
    } else {
        config_rate(false, false)
    }
}

/// Time-sharing baseline: each pair k runs integer-forcing over its direct
/// M x M channels F_kk and G_kk with doubled power, half the time. The
/// symmetric sum rate gives both pairs the common per-stream rate
/// min(R_1, R_2), M streams each, active half the time:
/// sum = 2 * (M/2) * min(R_1, R_2).
pub fn ts_symmetric_rate(first: &HopChannel, second: &HopChannel, snr: f64) -> Result<f64> {
    let m = first.antennas();
    let mut pair_rates = [0.0f64; 2];
    for (k, rate) in pair_rates.iter_mut().enumerate() {
        let hops = if k == 0 {
            [&first.f11, &second.f11]
        } else {
            [&first.f22, &second.f22]
        };
        let mut min_rate = f64::INFINITY;
        for h in hops {
            let ch = CofChannel::new(h.clone(), GaussianIntMatrix::identity(m), 2.0 * snr)?;
            let b = optimize_b(&ch)?;
            min_rate = min_rate.min(computation_rate_matrix(&ch, &b)?);
        }
        *rate = min_rate;
    }
    Ok(m as f64 * pair_rates[0].min(pair_rates[1]))
}

const MAX_TRIAL_RETRIES: u32 = 10;

fn trial_rates(
    config: &SimConfig,
    ctx: &FieldCtx,
    trial: u64,
) -> Result<Vec<f64>> {
    let m = config.antennas;
    let mut retries = 0u32;
    'retry: loop {
        let seed = derive_seed(config.seed, trial.wrapping_add((retries as u64) << 48));
        let (first, second) = sample_channel(m, seed);
        let seed_vec = match config.align_seed {
            AlignSeed::Ones => CVec::from_element(m, C64::new(1.0, 0.0)),
            AlignSeed::Random => {
                let mut rng = ChaCha12Rng::seed_from_u64(derive_seed(seed, 0xA11E));
                CVec::from_fn(m, |_, _| {
                    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
                })
            }
        };
        let mut out = Vec::with_capacity(config.snr_grid_db.len() * config.schemes.len());
        for &snr_db in &config.snr_grid_db {
            let snr = db_to_linear(snr_db);
            for scheme in &config.schemes {
                let rate = match scheme {
                    Scheme::PcofOptimized => {
                        pcof_symmetric_rate_seeded(&first, &second, snr, true, ctx, &seed_vec)
                    }
                    Scheme::PcofIdentity => {
                        pcof_symmetric_rate_seeded(&first, &second, snr, false, ctx, &seed_vec)
                    }
                    Scheme::TimeSharing => ts_symmetric_rate(&first, &second, snr),
                };
                match rate {
                    Ok(r) => out.push(r),
                    Err(e) => {
                        retries += 1;
                        if retries > MAX_TRIAL_RETRIES {
                            return Err(Error::TrialFailed {
                                trial,
                                retries: retries - 1,
                                source: Box::new(e),
                            });
                        }
                        continue 'retry;
                    }
                }
            }
        }
        return Ok(out);
    }
}

/// Monte Carlo sweep over the SNR grid. Trials run in parallel; results are
/// reduced in trial order, so the output is identical for any thread count.
pub fn ergodic_sweep(config: &SimConfig) -> Result<Vec<RatePoint>> {
    config.validate()?;
    let ctx = FieldCtx::new(config.prime)?;

    let per_trial: Vec<Result<Vec<f64>>> = (0..config.trials)
        .into_par_iter()
        .map(|trial| trial_rates(config, &ctx, trial))
        .collect();

    let cells = config.snr_grid_db.len() * config.schemes.len();
    let mut sums = vec![0.0f64; cells];
    let mut sq_sums = vec![0.0f64; cells];
    for trial in per_trial {
        let rates = trial?;
        for (i, r) in rates.into_iter().enumerate() {
            sums[i] += r;
            sq_sums[i] += r * r;
        }
    }

    let n = config.trials as f64;
    let mut points = Vec::with_capacity(cells);
    for (si, &snr_db) in config.snr_grid_db.iter().enumerate() {
        for (ki, scheme) in config.schemes.iter().enumerate() {
            let i = si * config.schemes.len() + ki;
            let mean = sums[i] / n;
            let ci95 = if config.trials > 1 {
                let var = ((sq_sums[i] - sums[i] * sums[i] / n) / (n - 1.0)).max(0.0);
                1.96 * (var / n).sqrt()
            } else {
                0.0
            };
            points.push(RatePoint {
                snr_db,
                scheme: *scheme,
                sum_rate: mean,
                ci95,
            });
        }
    }
    points.sort_by(|a, b| {
        a.snr_db
            .partial_cmp(&b.snr_db)
            .unwrap()
            .then_with(|| a.scheme.as_str().cmp(b.scheme.as_str()))
    });
    Ok(points)
}

/// Metadata comment lines describing a sweep, embedded in its CSV.
pub fn config_metadata(config: &SimConfig) -> Vec<String> {
    let schemes: Vec<&str> = config.schemes.iter().map(|s| s.as_str()).collect();
    vec![
        format!(
            "antennas={} trials={} seed={} prime={} schemes={}",
            config.antennas,
            config.trials,
            config.seed,
            config.prime,
            schemes.join(",")
        ),
        "common random numbers: all schemes share each trial's channel draw".into(),
    ]
}

/// Serializes rate points as CSV: optional `#`-prefixed metadata lines,
/// the exact header, then one row per point in (snr ascending, scheme
/// lexicographic) order with full-precision decimal values.
pub fn emit_csv<W: Write>(points: &[RatePoint], out: &mut W, metadata: &[String]) -> Result<()> {
    let mut rows: Vec<&RatePoint> = points.iter().collect();
    rows.sort_by(|a, b| {
        a.snr_db
            .partial_cmp(&b.snr_db)
            .unwrap()
            .then_with(|| a.scheme.as_str().cmp(b.scheme.as_str()))
    });
    for line in metadata {
        writeln!(out, "# {line}")?;
    }
    writeln!(out, "snr_db,scheme,sum_rate_bits,ci95")?;
    for p in rows {
        writeln!(
            out,
            "{:.16e},{},{:.16e},{:.16e}",
            p.snr_db, p.scheme, p.sum_rate, p.ci95
        )?;
    }
    Ok(())
}

pub fn emit_csv_file(points: &[RatePoint], path: &str, metadata: &[String]) -> Result<()> {
    let mut file = std::fs::File::create(path)?;
    emit_csv(points, &mut file, metadata)?;
    Ok(())
}

/// Parses CSV produced by `emit_csv`, skipping `#` metadata lines.
pub fn parse_csv(text: &str) -> Result<Vec<RatePoint>> {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().ok_or_else(|| Error::Io("empty csv".into()))?;
    if header != "snr_db,scheme,sum_rate_bits,ci95" {
        return Err(Error::Io(format!("unexpected header {header:?}")));
    }
    let mut points = Vec::new();
    for line in lines {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(Error::Io(format!("bad row {line:?}")));
        }
        let parse = |s: &str| -> Result<f64> {
            s.parse::<f64>()
                .map_err(|e| Error::Io(format!("bad number {s:?}: {e}")))
        };
        points.push(RatePoint {
            snr_db: parse(fields[0])?,
            scheme: fields[1].parse()?,
            sum_rate: parse(fields[2])?,
            ci95: parse(fields[3])?,
        });
    }
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn channel_sampling_deterministic() {
        let (a1, a2) = sample_channel(2, 42);
        let (b1, b2) = sample_channel(2, 42);
        assert_eq!(a1.f11, b1.f11);
        assert_eq!(a2.f22, b2.f22);
        let (c1, _) = sample_channel(2, 43);
        assert_ne!(a1.f11, c1.f11);
    }

    #[test]
    fn channel_statistics() {
        // Unit entry variance and uncorrelated real/imag parts.
        let mut sum_sq = 0.0f64;
        let mut cross = 0.0f64;
        let mut count = 0usize;
        for seed in 0..1600 {
            let (first, second) = sample_channel(4, derive_seed(999, seed));
            for mat in [
                &first.f11, &first.f12, &first.f21, &first.f22, &second.f11, &second.f12,
                &second.f21, &second.f22,
            ] {
                for z in mat.iter() {
                    sum_sq += z.norm_sqr();
                    cross += z.re * z.im;
                    count += 1;
                }
            }
        }
        let var = sum_sq / count as f64;
        let corr = cross / count as f64 * 2.0;
        assert!(count >= 100_000);
        assert!((var - 1.0).abs() < 0.02, "variance {var}");
        assert!(corr.abs() < 0.02, "correlation {corr}");
    }

    #[test]
    fn optimized_dominates_identity_per_draw() {
        let ctx = FieldCtx::new(7).unwrap();
        for seed in 0..10u64 {
            let (first, second) = sample_channel(2, derive_seed(7, seed));
            for snr_db in [5.0, 20.0] {
                let snr = db_to_linear(snr_db);
                let opt = pcof_symmetric_rate(&first, &second, snr, true, &ctx).unwrap();
                let id = pcof_symmetric_rate(&first, &second, snr, false, &ctx).unwrap();
                assert!(opt >= id - 1e-9, "seed {seed} snr {snr_db}: {opt} < {id}");
            }
        }
    }

    #[test]
    fn rate_vanishes_at_low_snr() {
        let ctx = FieldCtx::new(7).unwrap();
        let (first, second) = sample_channel(2, 5);
        let r = pcof_symmetric_rate(&first, &second, 1e-9, true, &ctx).unwrap();
        assert!(r < 1e-6, "pcof rate {r}");
        let r = ts_symmetric_rate(&first, &second, 1e-9).unwrap();
        assert!(r < 1e-6, "ts rate {r}");
    }

    #[test]
    fn time_sharing_identity_channels() {
        // Diagonal unit channels decouple: per-stream rate log2(1 + 2 snr),
        // so the M = 2 sum rate is 2 log2(1 + 2 snr).
        let m = 2;
        let id_hop = HopChannel {
            f11: CMat::identity(m, m),
            f12: CMat::identity(m, m),
            f21: CMat::identity(m, m),
            f22: CMat::identity(m, m),
        };
        let snr = 100.0;
        let rate = ts_symmetric_rate(&id_hop, &id_hop, snr).unwrap();
        let want = 2.0 * (1.0 + 2.0 * snr).log2();
        assert!((rate - want).abs() < 1e-9, "{rate} vs {want}");
    }

    #[test]
    fn sweep_determinism_and_ordering() {
        let config = SimConfig {
            antennas: 2,
            snr_grid_db: vec![10.0, 0.0],
            trials: 4,
            seed: 9,
            schemes: vec![Scheme::TimeSharing, Scheme::PcofOptimized],
            prime: 7,
            output_path: String::new(),
            align_seed: AlignSeed::Ones,
        };
        let a = ergodic_sweep(&config).unwrap();
        let b = ergodic_sweep(&config).unwrap();
        assert_eq!(a, b);
        // Sorted by snr then scheme name.
        assert_eq!(a[0].snr_db, 0.0);
        assert_eq!(a[0].scheme, Scheme::PcofOptimized);
        assert_eq!(a[1].scheme, Scheme::TimeSharing);
        assert_eq!(a[2].snr_db, 10.0);

        let mut buf_a = Vec::new();
        emit_csv(&a, &mut buf_a, &config_metadata(&config)).unwrap();
        let mut buf_b = Vec::new();
        emit_csv(&b, &mut buf_b, &config_metadata(&config)).unwrap();
        assert_eq!(buf_a, buf_b);
    }

    #[test]
    fn sweep_single_trial_ci_sentinel() {
        let config = SimConfig {
            antennas: 2,
            snr_grid_db: vec![10.0],
            trials: 1,
            seed: 3,
            schemes: vec![Scheme::TimeSharing],
            prime: 7,
            output_path: String::new(),
            align_seed: AlignSeed::Ones,
        };
        let pts = ergodic_sweep(&config).unwrap();
        assert_eq!(pts.len(), 1);
        assert_eq!(pts[0].ci95, 0.0);
    }

    #[test]
    fn ci_shrinks_with_more_trials() {
        let base = SimConfig {
            antennas: 2,
            snr_grid_db: vec![15.0],
            trials: 64,
            seed: 17,
            schemes: vec![Scheme::TimeSharing],
            prime: 7,
            output_path: String::new(),
            align_seed: AlignSeed::Ones,
        };
        let small = ergodic_sweep(&base).unwrap()[0].ci95;
        let mut doubled = base.clone();
        doubled.trials = 128;
        let large = ergodic_sweep(&doubled).unwrap()[0].ci95;
        let ratio = large / small;
        let expect = 1.0 / 2.0f64.sqrt();
        assert!(
            (ratio - expect).abs() < 0.2 * expect,
            "ratio {ratio} vs {expect}"
        );
    }

    #[test]
    fn csv_format_and_roundtrip() {
        // Empty list: header-only when no metadata is given.
        let mut buf = Vec::new();
        emit_csv(&[], &mut buf, &[]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "snr_db,scheme,sum_rate_bits,ci95\n");

        // One point: two lines, exact header, parseable back to equality.
        let pts = vec![RatePoint {
            snr_db: 10.0,
            scheme: Scheme::TimeSharing,
            sum_rate: 3.5,
            ci95: 0.1,
        }];
        let mut buf = Vec::new();
        emit_csv(&pts, &mut buf, &[]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert_eq!(text.lines().next().unwrap(), "snr_db,scheme,sum_rate_bits,ci95");
        assert_eq!(parse_csv(&text).unwrap(), pts);

        // Round trip preserves full f64 precision and ignores metadata.
        let pts = vec![
            RatePoint {
                snr_db: 0.0,
                scheme: Scheme::PcofOptimized,
                sum_rate: std::f64::consts::PI,
                ci95: 1.0 / 3.0,
            },
            RatePoint {
                snr_db: 5.0,
                scheme: Scheme::PcofIdentity,
                sum_rate: 1.23456789e-4,
                ci95: 0.0,
            },
        ];
        let mut buf = Vec::new();
        emit_csv(&pts, &mut buf, &["meta line".into()]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("# meta line\n"));
        assert_eq!(parse_csv(&text).unwrap(), pts);
    }

    #[test]
    fn config_validation_errors() {
        let mut c = SimConfig::default_sweep();
        c.trials = 0;
        assert!(c.validate().is_err());
        let mut c = SimConfig::default_sweep();
        c.antennas = 1;
        assert!(c.validate().is_err());
        let mut c = SimConfig::default_sweep();
        c.prime = 5;
        assert!(c.validate().is_err());
        let mut c = SimConfig::default_sweep();
        c.schemes.clear();
        assert!(c.validate().is_err());
        assert!(SimConfig::default_sweep().validate().is_ok());
    }
}
