//! Hierarchical scoring of continuous tensors.
//!
//! Level 1 clusters the atomic m-vectors (pixels, spectrogram frames) with
//! [`crate::cluster::fit_mdl_gmm`]. Each further level tiles the previous
//! level's label grid into patches and clusters the patch *compositions*:
//! a patch becomes the vector of category proportions over the previous
//! level's alphabet (`x` first, then each component), so its dimension is
//! `K_prev + 1`. A patch of cluster 2's labels and a patch of cluster 1's
//! labels land far apart; two patches that mix the same labels in any
//! arrangement land together.
//!
//! The numeric precision `c` is determined once from the input scalars
//! (or forced by config) and used at every level for model costs and for
//! the `c*m` direct cost of `x` positions.
//!
//! Levels stop at the configured depth, when a patch no longer fits, or
//! when a level above the first retains no components at all.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cluster::{
    fit_mdl_gmm_with_trace, partition_cost, FitOptions, KTrace, MdlPartition, ModelCostMode,
    Points, X_LABEL,
};
use crate::coding::{infer_precision, CostBreakdown, Precision};
use crate::{Error, Result};

/// A rectangular tensor of m-vectors; 1-D for audio frames, 2-D for images.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataTensor {
    /// Extent per axis (1 or 2 axes).
    pub shape: Vec<usize>,
    /// Vector dimension per cell.
    pub m: usize,
    /// Row-major cell data, `m` consecutive scalars per cell.
    pub data: Vec<f64>,
}

impl DataTensor {
    pub fn new(shape: Vec<usize>, m: usize, data: Vec<f64>) -> Result<Self> {
        let cells: usize = shape.iter().product();
        if shape.is_empty() || shape.len() > 2 || m == 0 {
            return Err(Error::InvalidInput("tensors must be 1- or 2-dimensional".into()));
        }
        if cells * m != data.len() {
            return Err(Error::DimensionMismatch {
                expected: cells * m,
                got: data.len(),
            });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite scalar in tensor".into()));
        }
        Ok(DataTensor { shape, m, data })
    }

    pub fn cells(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn cell(&self, i: usize) -> &[f64] {
        &self.data[i * self.m..(i + 1) * self.m]
    }
}

/// Per-level label grid; positions hold a component index or [`X_LABEL`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexTensor {
    pub shape: Vec<usize>,
    pub labels: Vec<u32>,
    pub level: usize,
}

/// One level of the hierarchy.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Level {
    /// Patch edge length applied to the previous level's grid.
    pub patch: usize,
    pub index: IndexTensor,
    pub partition: MdlPartition,
    /// Dimension of the clustered vectors at this level.
    pub embed_dim: usize,
    /// Parent cells left over by the tiling; charged directly and counted
    /// as `x` entries of this level.
    pub leftover_cells: usize,
    /// Per-K totals from the fit, for reports.
    pub k_trace: Vec<KTrace>,
    /// This level's cost contribution.
    pub costs: CostBreakdown,
}

/// A scored hierarchy plus everything needed to decode.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HierarchicalEncoding {
    pub levels: Vec<Level>,
    pub breakdown: CostBreakdown,
    pub precision: Precision,
    pub mode: ModelCostMode,
    pub config: HierarchyConfig,
    /// Input quantised to the stored precision; exact decode returns this.
    pub original: DataTensor,
    /// Observed per-dimension value range, for sampled reconstruction.
    pub data_min: Vec<f64>,
    pub data_max: Vec<f64>,
}

/// How a patch of previous-level labels becomes a vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EmbeddingKind {
    /// Category proportions over `x` and the components; dimension
    /// `K_prev + 1`. Arrangement within the patch does not matter.
    Composition,
    /// Concatenated per-cell indicator vectors; dimension
    /// `p^n * (K_prev + 1)`. Sensitive to the arrangement.
    OneHot,
}

/// Hierarchy configuration. `patch_sizes[0]` applies to the raw cells
/// (size 1 clusters them directly); later entries tile the previous label
/// grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HierarchyConfig {
    pub patch_sizes: Vec<usize>,
    pub k_max: usize,
    /// Forced precision; inferred from the data when absent.
    pub precision: Option<u32>,
    pub mode: ModelCostMode,
    pub seed: u64,
    /// Overlapping patches with stride `p/2`; per-level index and residual
    /// costs are divided by the overlap multiplicity. Off by default: the
    /// worked tiling semantics and the decode invariant assume disjoint
    /// patches.
    pub overlap: bool,
    pub embedding: EmbeddingKind,
}

impl Default for HierarchyConfig {
    fn default() -> Self {
        HierarchyConfig {
            patch_sizes: vec![1, 2, 2, 2],
            k_max: 15,
            precision: None,
            mode: ModelCostMode::Full,
            seed: 0,
            overlap: false,
            embedding: EmbeddingKind::Composition,
        }
    }
}

/// Decode fidelity for [`decode_hierarchy`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecodeMode {
    /// Bit-exact at the stored precision.
    Exact,
    /// Clustered cells drawn from their component; `x` cells drawn
    /// uniformly over the observed range.
    Sampled,
}

struct LevelInput {
    /// Flat embedded points.
    points: Vec<f64>,
    dim: usize,
    /// Shape of the resulting patch grid.
    grid: Vec<usize>,
    leftover: usize,
    /// Number of overlapping placements covering one position (1 when
    /// tiling disjointly).
    multiplicity: f64,
}

fn tile_axis(extent: usize, patch: usize, stride: usize) -> usize {
    if extent < patch {
        0
    } else {
        (extent - patch) / stride + 1
    }
}

/// Embeds patches of the raw data (level 1): concatenation of the cell
/// vectors inside each patch.
fn embed_raw(data: &DataTensor, patch: usize, stride: usize) -> LevelInput {
    let m = data.m;
    let shape = data.shape.clone();
    let (grid, positions): (Vec<usize>, Vec<Vec<usize>>) = match shape.as_slice() {
        [len] => {
            let g = tile_axis(*len, patch, stride);
            let pos = (0..g)
                .map(|i| (i * stride..i * stride + patch).collect())
                .collect();
            (vec![g], pos)
        }
        [rows, cols] => {
            let gr = tile_axis(*rows, patch, stride);
            let gc = tile_axis(*cols, patch, stride);
            let mut pos = Vec::with_capacity(gr * gc);
            for r in 0..gr {
                for c in 0..gc {
                    let mut cells = Vec::with_capacity(patch * patch);
                    for dr in 0..patch {
                        for dc in 0..patch {
                            cells.push((r * stride + dr) * cols + c * stride + dc);
                        }
                    }
                    pos.push(cells);
                }
            }
            (vec![gr, gc], pos)
        }
        _ => unreachable!("validated shape"),
    };
    let dim = if shape.len() == 1 { m * patch } else { m * patch * patch };
    let mut points = Vec::with_capacity(positions.len() * dim);
    for cells in &positions {
        for &c in cells {
            points.extend_from_slice(data.cell(c));
        }
    }
    let covered = covered_cells(&shape, patch, stride);
    LevelInput {
        leftover: data.cells() - covered,
        multiplicity: multiplicity(patch, stride, shape.len()),
        points,
        dim,
        grid,
    }
}

/// Embeds patches of a label grid (levels 2+): category proportions over
/// `x` and the previous level's components, or concatenated indicators.
fn embed_labels(
    labels: &IndexTensor,
    k_prev: usize,
    patch: usize,
    stride: usize,
    kind: EmbeddingKind,
) -> LevelInput {
    let cats = k_prev + 1;
    let shape = labels.shape.clone();
    let (grid, blocks): (Vec<usize>, Vec<Vec<usize>>) = match shape.as_slice() {
        [len] => {
            let g = tile_axis(*len, patch, stride);
            let pos = (0..g)
                .map(|i| (i * stride..i * stride + patch).collect())
                .collect();
            (vec![g], pos)
        }
        [rows, cols] => {
            let gr = tile_axis(*rows, patch, stride);
            let gc = tile_axis(*cols, patch, stride);
            let mut pos = Vec::with_capacity(gr * gc);
            for r in 0..gr {
                for c in 0..gc {
                    let mut cells = Vec::with_capacity(patch * patch);
                    for dr in 0..patch {
                        for dc in 0..patch {
                            cells.push((r * stride + dr) * cols + c * stride + dc);
                        }
                    }
                    pos.push(cells);
                }
            }
            (vec![gr, gc], pos)
        }
        _ => unreachable!(),
    };
    let cells_total: usize = shape.iter().product();
    let per_patch = blocks.first().map_or(0, |b| b.len());
    let dim = match kind {
        EmbeddingKind::Composition => cats,
        EmbeddingKind::OneHot => per_patch * cats,
    };
    let mut points = Vec::with_capacity(blocks.len() * dim.max(1));
    for cells in &blocks {
        match kind {
            EmbeddingKind::Composition => {
                let mut hist = vec![0.0f64; cats];
                for &c in cells {
                    let l = labels.labels[c];
                    let slot = if l == X_LABEL { 0 } else { l as usize + 1 };
                    hist[slot] += 1.0;
                }
                let denom = cells.len() as f64;
                for h in hist.iter_mut() {
                    *h /= denom;
                }
                points.extend_from_slice(&hist);
            }
            EmbeddingKind::OneHot => {
                for &c in cells {
                    let l = labels.labels[c];
                    let slot = if l == X_LABEL { 0 } else { l as usize + 1 };
                    let mut onehot = vec![0.0f64; cats];
                    onehot[slot] = 1.0;
                    points.extend_from_slice(&onehot);
                }
            }
        }
    }
    let covered = covered_cells(&shape, patch, stride);
    LevelInput {
        leftover: cells_total - covered,
        multiplicity: multiplicity(patch, stride, labels.shape.len()),
        points,
        dim,
        grid,
    }
}

fn covered_cells(shape: &[usize], patch: usize, stride: usize) -> usize {
    // distinct cells touched by at least one patch
    let span = |extent: usize| -> usize {
        let g = tile_axis(extent, patch, stride);
        if g == 0 {
            0
        } else {
            (g - 1) * stride + patch
        }
    };
    match shape {
        [len] => span(*len),
        [rows, cols] => span(*rows) * span(*cols),
        _ => unreachable!(),
    }
}

fn multiplicity(patch: usize, stride: usize, ndim: usize) -> f64 {
    ((patch as f64) / (stride as f64)).powi(ndim as i32)
}

/// Builds the level's cost contribution: the partition's costs plus the
/// direct charge for leftover parent cells (counted as extra `x` entries),
/// scaled down by the overlap multiplicity when overlapping.
fn level_costs(
    partition: &MdlPartition,
    leftover: usize,
    dim: usize,
    precision: Precision,
    multiplicity: f64,
) -> CostBreakdown {
    let direct = precision.bits() as f64 * dim as f64;
    let mut counts: Vec<usize> = partition.components.iter().map(|g| g.count).collect();
    let x_count = partition.labels.iter().filter(|&&l| l == X_LABEL).count() + leftover;
    counts.push(x_count);
    let idx = crate::coding::categorical_code_length(&counts);
    let model = partition.costs.model_cost;
    let residual = partition.costs.residual_cost + leftover as f64 * direct;
    CostBreakdown::new(model, idx / multiplicity, residual / multiplicity)
}

/// Scores a tensor with the hierarchical pipeline.
pub fn lcc_continuous(data: &DataTensor, config: &HierarchyConfig) -> Result<HierarchicalEncoding> {
    if data.cells() == 0 {
        return Err(Error::EmptyInput("lcc_continuous"));
    }
    if config.patch_sizes.is_empty() {
        return Err(Error::Config("at least one level is required".into()));
    }
    let precision = match config.precision {
        Some(bits) => Precision::new(bits)?,
        None => infer_precision(&data.data)?,
    };
    let quantized = DataTensor::new(
        data.shape.clone(),
        data.m,
        data.data.iter().map(|&v| precision.quantize(v)).collect(),
    )?;

    let mut data_min = vec![f64::INFINITY; data.m];
    let mut data_max = vec![f64::NEG_INFINITY; data.m];
    for i in 0..quantized.cells() {
        for (j, &v) in quantized.cell(i).iter().enumerate() {
            data_min[j] = data_min[j].min(v);
            data_max[j] = data_max[j].max(v);
        }
    }

    let mut levels: Vec<Level> = Vec::new();
    let mut breakdown = CostBreakdown::default();

    for (li, &patch) in config.patch_sizes.iter().enumerate() {
        if patch == 0 {
            return Err(Error::Config("patch size must be >= 1".into()));
        }
        let stride = if config.overlap && patch >= 2 { patch / 2 } else { patch };
        let input = if li == 0 {
            embed_raw(&quantized, patch, stride)
        } else {
            let prev = levels.last().expect("level 1 exists");
            embed_labels(
                &prev.index,
                prev.partition.components.len(),
                patch,
                stride,
            )
        };
        if input.grid.iter().any(|&g| g == 0) {
            break; // patch no longer fits
        }
        let opts = FitOptions {
            k_max: config.k_max,
            precision,
            mode: config.mode,
            seed: config.seed ^ ((li as u64 + 1) << 32),
            ..FitOptions::new(precision, config.seed)
        };
        let pts = Points::new(&input.points, input.dim)?;
        let (partition, k_trace) = fit_mdl_gmm_with_trace(pts, &opts)?;
        if partition.components.is_empty() && li > 0 {
            break; // no structure claimed above the base level
        }
        let costs = level_costs(
            &partition,
            input.leftover,
            input.dim,
            precision,
            input.multiplicity,
        );
        breakdown.accumulate(&costs);
        let stop = partition.components.is_empty();
        levels.push(Level {
            patch,
            index: IndexTensor {
                shape: input.grid.clone(),
                labels: partition.labels.clone(),
                level: li + 1,
            },
            partition,
            embed_dim: input.dim,
            leftover_cells: input.leftover,
            k_trace,
            costs,
        });
        if stop {
            break;
        }
    }

    Ok(HierarchicalEncoding {
        levels,
        breakdown,
        precision,
        mode: config.mode,
        config: config.clone(),
        original: quantized,
        data_min,
        data_max,
    })
}

/// Reconstructs the tensor from an encoding.
///
/// `Exact` returns the stored input at the stored precision. `Sampled`
/// draws every clustered cell from its level-1 component (using the raw
/// pre-floor variances, so degenerate components reproduce their mean) and
/// every `x` cell uniformly from the observed per-dimension range.
pub fn decode_hierarchy(
    enc: &HierarchicalEncoding,
    mode: DecodeMode,
    seed: u64,
) -> Result<DataTensor> {
    match mode {
        DecodeMode::Exact => Ok(enc.original.clone()),
        DecodeMode::Sampled => {
            let level1 = enc
                .levels
                .first()
                .ok_or(Error::InvalidInput("encoding has no levels".into()))?;
            if level1.patch != 1 {
                // sampled decode is defined on the atomic level
                return Err(Error::Config(
                    "sampled decode requires a level-1 patch size of 1".into(),
                ));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = enc.original.m;
            let mut data = Vec::with_capacity(enc.original.data.len());
            for &label in level1.partition.labels.iter() {
                if label == X_LABEL {
                    for j in 0..m {
                        let (lo, hi) = (enc.data_min[j], enc.data_max[j]);
                        let v = if hi > lo { rng.gen_range(lo..=hi) } else { lo };
                        data.push(enc.precision.quantize(v));
                    }
                } else {
                    let g = &level1.partition.components[label as usize];
                    for j in 0..m {
                        let sigma = g.sample_var[j].sqrt();
                        let v = if sigma > 0.0 {
                            g.mean[j] + sigma * standard_normal(&mut rng)
                        } else {
                            g.mean[j]
                        };
                        let v = v.clamp(enc.data_min[j], enc.data_max[j]);
                        data.push(enc.precision.quantize(v));
                    }
                }
            }
            DataTensor::new(enc.original.shape.clone(), m, data)
        }
    }
}

fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Recomputes every level's costs through the audit path and checks the
/// accumulated breakdown. Returns the recomputed breakdown.
pub fn audit_breakdown(enc: &HierarchicalEncoding) -> Result<CostBreakdown> {
    let mut total = CostBreakdown::default();
    let mut prev_index: Option<&IndexTensor> = None;
    let mut prev_k = 0usize;
    for (li, level) in enc.levels.iter().enumerate() {
        let stride = if enc.config.overlap && level.patch >= 2 {
            level.patch / 2
        } else {
            level.patch
        };
        let input = if li == 0 {
            embed_raw(&enc.original, level.patch, stride)
        } else {
            embed_labels(prev_index.expect("previous level"), prev_k, level.patch, stride)
        };
        let pts = Points::new(&input.points, input.dim)?;
        let (_, costs) = partition_cost(pts, &level.index.labels, enc.precision, enc.mode)?;
        let audited = level_costs(
            &MdlPartition {
                components: level.partition.components.clone(),
                labels: level.index.labels.clone(),
                precision: enc.precision,
                mode: enc.mode,
                costs,
            },
            level.leftover_cells,
            input.dim,
            enc.precision,
            input.multiplicity,
        );
        total.accumulate(&audited);
        prev_index = Some(&level.index);
        prev_k = level.partition.components.len();
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate;

    #[test]
    fn constant_image_claims_one_cluster_and_tiny_residual() {
        let data = vec![0.5; 16 * 16 * 3];
        let tensor = DataTensor::new(vec![16, 16], 3, data).unwrap();
        let config = HierarchyConfig {
            precision: Some(8),
            ..HierarchyConfig::default()
        };
        let enc = lcc_continuous(&tensor, &config).unwrap();
        let level1 = &enc.levels[0];
        assert_eq!(level1.partition.components.len(), 1);
        assert_eq!(level1.costs.idx_cost, 0.0);
        // flooring leaves only the (m/2)log2(2pi) term per cell
        assert!(level1.costs.residual_cost < 256.0 * 3.0 * 1.4);
    }

    #[test]
    fn white_noise_goes_entirely_to_portion_b() {
        let tensor = generate::white_noise_image(32, 32, 424242);
        let config = HierarchyConfig::default();
        let enc = lcc_continuous(&tensor, &config).unwrap();
        assert_eq!(enc.levels[0].partition.components.len(), 0);
        assert_eq!(enc.breakdown.lcc_score, 0.0);
        let n = 32.0 * 32.0;
        let c = enc.precision.bits() as f64;
        assert!((enc.breakdown.residual_cost - n * c * 3.0).abs() < 1e-6);
    }

    #[test]
    fn exact_decode_is_identity_at_stored_precision() {
        let tensor = generate::white_noise_image(8, 8, 7);
        let enc = lcc_continuous(&tensor, &HierarchyConfig::default()).unwrap();
        let decoded = decode_hierarchy(&enc, DecodeMode::Exact, 0).unwrap();
        let expect: Vec<f64> = tensor.data.iter().map(|&v| enc.precision.quantize(v)).collect();
        assert_eq!(decoded.data, expect);
    }

    #[test]
    fn audit_matches_accumulated_breakdown() {
        let tensor = generate::stripes_image(16, 16, 4, 0, 3);
        let enc = lcc_continuous(&tensor, &HierarchyConfig::default()).unwrap();
        let audited = audit_breakdown(&enc).unwrap();
        assert!((audited.total() - enc.breakdown.total()).abs() < 1e-6);
        assert!((audited.lcc_score - enc.breakdown.lcc_score).abs() < 1e-6);
    }

    #[test]
    fn patch_larger_than_tensor_stops_cleanly() {
        let tensor = DataTensor::new(vec![3, 3], 1, vec![0.5; 9]).unwrap();
        let config = HierarchyConfig {
            patch_sizes: vec![1, 8],
            precision: Some(8),
            ..HierarchyConfig::default()
        };
        let enc = lcc_continuous(&tensor, &config).unwrap();
        assert_eq!(enc.levels.len(), 1);
    }
}
