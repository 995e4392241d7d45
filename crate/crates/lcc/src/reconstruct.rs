//! Portion-A-only lossy reconstruction and compression reporting.
//!
//! Dropping portion B leaves the model and the index: clustered cells can
//! then only be redrawn from their component distributions, and outlier
//! cells carry no information at all, so they fill with uniform noise over
//! the observed range. The full description (A + B) corresponds to
//! lossless compression; portion A alone is the lossy variant.

use serde::{Deserialize, Serialize};

use crate::hierarchy::{decode_hierarchy, DataTensor, DecodeMode, HierarchicalEncoding};
use crate::Result;

/// Size accounting for one encoded tensor.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompressionReport {
    /// Raw size: cells * dimensions * precision bits.
    pub original_bits: f64,
    /// Portion A + portion B.
    pub lossless_bits: f64,
    /// Portion A only (the LCC score).
    pub lossy_bits: f64,
    pub lossless_ratio: f64,
    pub lossy_ratio: f64,
}

/// Reconstructs from portion A alone: clustered cells are sampled from
/// their components, outliers from uniform noise. Deterministic given the
/// seed.
pub fn reconstruct_lossy(enc: &HierarchicalEncoding, seed: u64) -> Result<DataTensor> {
    decode_hierarchy(enc, DecodeMode::Sampled, seed)
}

/// Compression accounting for an encoding of `data`-shaped input.
pub fn compression_report(enc: &HierarchicalEncoding) -> CompressionReport {
    let cells = enc.original.cells() as f64;
    let original_bits = cells * enc.original.m as f64 * enc.precision.bits() as f64;
    let lossless_bits = enc.breakdown.total();
    let lossy_bits = enc.breakdown.lcc_score;
    CompressionReport {
        original_bits,
        lossless_bits,
        lossy_bits,
        lossless_ratio: original_bits / lossless_bits.max(f64::MIN_POSITIVE),
        lossy_ratio: original_bits / lossy_bits.max(f64::MIN_POSITIVE),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate;
    use crate::hierarchy::{lcc_continuous, HierarchyConfig};

    #[test]
    fn reconstruction_shape_matches_input() {
        let img = generate::scene_image(16, 16, 3);
        let enc = lcc_continuous(&img, &HierarchyConfig::default()).unwrap();
        let rec = reconstruct_lossy(&enc, 5).unwrap();
        assert_eq!(rec.shape, img.shape);
        assert_eq!(rec.m, img.m);
    }

    #[test]
    fn zero_variance_encoding_reconstructs_exactly() {
        let img = crate::hierarchy::DataTensor::new(vec![8, 8], 3, vec![0.25; 192]).unwrap();
        let enc = lcc_continuous(
            &img,
            &HierarchyConfig {
                precision: Some(8),
                ..HierarchyConfig::default()
            },
        )
        .unwrap();
        let rec = reconstruct_lossy(&enc, 11).unwrap();
        assert_eq!(rec.data, enc.original.data);
    }

    #[test]
    fn noise_reconstruction_differs_in_values_but_not_statistics() {
        let img = generate::white_noise_image(24, 24, 88);
        let enc = lcc_continuous(&img, &HierarchyConfig::default()).unwrap();
        let rec = reconstruct_lossy(&enc, 21).unwrap();
        // noise is all-outlier, so the redraw shares no information
        let same = rec
            .data
            .iter()
            .zip(&enc.original.data)
            .filter(|(a, b)| (*a - *b).abs() < 1e-12)
            .count();
        assert!(same < rec.data.len() / 10, "values should be redrawn");
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        assert!((mean(&rec.data) - mean(&enc.original.data)).abs() < 0.05);
    }

    #[test]
    fn lossy_ratio_dominates_for_noise() {
        let img = generate::white_noise_image(16, 16, 2);
        let enc = lcc_continuous(&img, &HierarchyConfig::default()).unwrap();
        let report = compression_report(&enc);
        assert!(report.lossy_bits <= report.lossless_bits);
        assert!(report.lossy_ratio > report.lossless_ratio);
        assert!((report.original_bits - 16.0 * 16.0 * 3.0 * 8.0).abs() < 1e-9);
    }
}
