//! Aspect-ratio scanning of bitstrings rendered as one-channel images.
//!
//! A bit sequence of length `L` is padded up to `h*w` with i.i.d. bits at
//! the sequence's own on-probability, rendered as an `h x w` tensor of
//! 0.0/1.0 values, and scored with the hierarchical pipeline at a fixed
//! 32-bit accounting precision (so totals are comparable across ratios and
//! against published figures for the same message). A high score at one
//! ratio and not at others indicates that the bits form a picture at that
//! ratio.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::hierarchy::{lcc_continuous, DataTensor, HierarchyConfig};
use crate::{Error, Result};

/// A bitstring laid out on a grid, with the padding that made it fit.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BitGrid {
    pub height: usize,
    pub width: usize,
    pub pad_bits: usize,
}

/// Score of one scanned ratio.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RatioScore {
    pub height: usize,
    pub width: usize,
    pub pad_bits: usize,
    pub lcc_score: f64,
    pub total_cost: f64,
}

/// Full scan output.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanResult {
    pub records: Vec<RatioScore>,
    /// Ratio with the highest score; ties broken by smaller height.
    pub best_ratio: (usize, usize),
    pub seed: u64,
    pub pad_cap_fraction: f64,
    /// Ratios skipped because they would need more padding than the cap.
    pub skipped: usize,
}

/// Best-over-trials random baseline.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BaselineResult {
    pub max_lcc: f64,
    pub p95_lcc: f64,
    pub trials: usize,
    pub per_trial_best: Vec<f64>,
}

/// Scan options; `ratio_set: None` scans every integer height from 2 to
/// `len/2` whose minimal padding stays within `pad_cap_fraction` of the
/// sequence length.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanOptions {
    pub ratio_set: Option<Vec<(usize, usize)>>,
    pub pad_cap_fraction: f64,
    pub seed: u64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            ratio_set: None,
            pad_cap_fraction: 0.05,
            seed: 0,
        }
    }
}

/// The scoring configuration used for every ratio: 32-bit accounting
/// precision, default level geometry.
pub fn scan_hierarchy_config(seed: u64) -> HierarchyConfig {
    HierarchyConfig {
        precision: Some(32),
        seed,
        ..HierarchyConfig::default()
    }
}

fn default_ratios(len: usize, pad_cap: usize) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for h in 2..=len / 2 {
        let w = len.div_ceil(h);
        let pad = h * w - len;
        if pad <= pad_cap && w >= 2 {
            out.push((h, w, pad));
        }
    }
    out
}

/// Renders `bits` at `h x w` with seeded padding and scores it.
pub fn score_ratio(
    bits: &[u8],
    height: usize,
    width: usize,
    on_probability: f64,
    seed: u64,
) -> Result<RatioScore> {
    let cells = height * width;
    if cells < bits.len() {
        return Err(Error::Config(format!(
            "{height}x{width} cannot hold {} bits",
            bits.len()
        )));
    }
    let pad = cells - bits.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((height as u64) << 24) ^ width as u64);
    let mut data: Vec<f64> = bits.iter().map(|&b| b as f64).collect();
    for _ in 0..pad {
        data.push(if rng.gen_bool(on_probability) { 1.0 } else { 0.0 });
    }
    let tensor = DataTensor::new(vec![height, width], 1, data)?;
    let enc = lcc_continuous(&tensor, &scan_hierarchy_config(seed))?;
    Ok(RatioScore {
        height,
        width,
        pad_bits: pad,
        lcc_score: enc.breakdown.lcc_score,
        total_cost: enc.breakdown.total(),
    })
}

/// Scores `bits` at every candidate ratio. Deterministic given
/// `(bits, options)`; ratios are scored independently in parallel and
/// reduced in a fixed order.
pub fn scan_aspect_ratios(bits: &[u8], opts: &ScanOptions) -> Result<ScanResult> {
    if bits.len() < 4 {
        return Err(Error::InvalidInput("need at least 4 bits to scan".into()));
    }
    if bits.iter().any(|&b| b > 1) {
        return Err(Error::InvalidInput("bits must be 0 or 1".into()));
    }
    let ones = bits.iter().filter(|&&b| b == 1).count();
    let p_on = ones as f64 / bits.len() as f64;
    let pad_cap = (opts.pad_cap_fraction * bits.len() as f64).floor() as usize;

    let mut skipped = 0usize;
    let candidates: Vec<(usize, usize, usize)> = match &opts.ratio_set {
        Some(set) => {
            let mut keep = Vec::new();
            for &(h, w) in set {
                let cells = h * w;
                if cells < bits.len() || cells - bits.len() > pad_cap {
                    skipped += 1;
                } else {
                    keep.push((h, w, cells - bits.len()));
                }
            }
            keep
        }
        None => default_ratios(bits.len(), pad_cap),
    };
    if candidates.is_empty() {
        return Err(Error::Config("no ratio satisfies the padding cap".into()));
    }

    let records: Vec<RatioScore> = candidates
        .par_iter()
        .map(|&(h, w, _)| score_ratio(bits, h, w, p_on, opts.seed))
        .collect::<Result<_>>()?;

    let mut best = (records[0].height, records[0].width);
    let mut best_score = records[0].lcc_score;
    for r in &records {
        if r.lcc_score > best_score + 1e-9
            || ((r.lcc_score - best_score).abs() <= 1e-9 && r.height < best.0)
        {
            best = (r.height, r.width);
            best_score = r.lcc_score;
        }
    }
    Ok(ScanResult {
        records,
        best_ratio: best,
        seed: opts.seed,
        pad_cap_fraction: opts.pad_cap_fraction,
        skipped,
    })
}

/// Max LCC over `trials` i.i.d. Bernoulli(0.5) strings, each scanned over
/// the same ratio set.
pub fn random_baseline(
    length: usize,
    opts: &ScanOptions,
    trials: usize,
    seed: u64,
) -> Result<BaselineResult> {
    if trials < 1 {
        return Err(Error::Config("need at least one baseline trial".into()));
    }
    let per_trial_best: Vec<f64> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(t).wrapping_mul(0x2545_F491_4F6C_DD1D));
            let bits: Vec<u8> = (0..length).map(|_| rng.gen_range(0..=1u8)).collect();
            let scan = scan_aspect_ratios(
                &bits,
                &ScanOptions {
                    seed: seed ^ t,
                    ..opts.clone()
                },
            )?;
            Ok(scan
                .records
                .iter()
                .map(|r| r.lcc_score)
                .fold(f64::NEG_INFINITY, f64::max))
        })
        .collect::<Result<_>>()?;
    let mut sorted = per_trial_best.clone();
    sorted.sort_by(f64::total_cmp);
    let p95_idx = ((trials as f64 * 0.95).ceil() as usize).clamp(1, trials) - 1;
    Ok(BaselineResult {
        max_lcc: sorted[trials - 1],
        p95_lcc: sorted[p95_idx],
        trials,
        per_trial_best,
    })
}

/// The canonical 1679-bit sequence shipped as `fixtures/arecibo.bits`,
/// with its SHA-256 pinned by the test suite.
pub fn load_arecibo_fixture(path: &std::path::Path) -> Result<Vec<u8>> {
    let bits = crate::frontends::load_bits(path, false)?;
    if bits.len() != 1679 {
        return Err(Error::InvalidInput(format!(
            "expected 1679 bits, got {}",
            bits.len()
        )));
    }
    Ok(bits)
}
