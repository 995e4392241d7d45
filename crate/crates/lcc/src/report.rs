//! Run reports: everything needed to reproduce a score.
//!
//! A report echoes the input provenance and the full configuration in
//! force, so feeding the echoed config back yields bit-identical numbers.
//! Bit quantities are emitted both at full precision and rounded to two
//! decimals to match the usual tabular presentation.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::coding::CostBreakdown;

pub const REPORT_SCHEMA: &str = "lcc-report/1";

/// How the codebook is costed, spelled out so reports are self-describing.
pub const CODEBOOK_COST_FORMULA: &str = "sum over entries of [sum over value symbols of \
     -log2(pool_count(sym)/pool_total) + 1 + 2*log2(len(value)-1)], where the pool is every \
     symbol occurrence in codebook values plus every unaliased base character; keys are \
     implicit (creation order) and cost nothing";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CostFields {
    pub model_cost: f64,
    pub idx_cost: f64,
    pub residual_cost: f64,
    pub lcc_score: f64,
    pub total_cost: f64,
    /// Two-decimal presentation of the same fields.
    pub rounded: BTreeMap<String, String>,
}

impl From<&CostBreakdown> for CostFields {
    fn from(c: &CostBreakdown) -> Self {
        let mut rounded = BTreeMap::new();
        rounded.insert("model_cost".into(), format!("{:.2}", c.model_cost));
        rounded.insert("idx_cost".into(), format!("{:.2}", c.idx_cost));
        rounded.insert("residual_cost".into(), format!("{:.2}", c.residual_cost));
        rounded.insert("lcc_score".into(), format!("{:.2}", c.lcc_score));
        rounded.insert("total_cost".into(), format!("{:.2}", c.total()));
        CostFields {
            model_cost: c.model_cost,
            idx_cost: c.idx_cost,
            residual_cost: c.residual_cost,
            lcc_score: c.lcc_score,
            total_cost: c.total(),
            rounded,
        }
    }
}

/// Per-level detail for continuous runs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LevelDetail {
    pub level: usize,
    pub patch: usize,
    pub components: usize,
    pub embed_dim: usize,
    pub x_count: usize,
    pub leftover_cells: usize,
    pub costs: CostFields,
}

/// Codebook summary for discrete runs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CodebookDetail {
    pub entries: usize,
    pub value_symbols: usize,
    pub index_length: usize,
    pub residual_length: usize,
    pub cost_formula: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub schema: String,
    pub input: BTreeMap<String, String>,
    /// Every knob in force; feeding these back reproduces the numbers.
    pub config: BTreeMap<String, String>,
    pub cost: CostFields,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub levels: Option<Vec<LevelDetail>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub codebook: Option<CodebookDetail>,
    pub decode_check: bool,
    pub timing_ms: u128,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }

    /// Flat CSV with one header row and one value row; numeric fields carry
    /// full precision (the JSON and CSV emit identical values).
    pub fn to_csv(&self) -> String {
        let mut header = vec![
            "schema".to_string(),
            "model_cost".into(),
            "idx_cost".into(),
            "residual_cost".into(),
            "lcc_score".into(),
            "total_cost".into(),
            "decode_check".into(),
        ];
        let mut row = vec![
            self.schema.clone(),
            format!("{}", self.cost.model_cost),
            format!("{}", self.cost.idx_cost),
            format!("{}", self.cost.residual_cost),
            format!("{}", self.cost.lcc_score),
            format!("{}", self.cost.total_cost),
            self.decode_check.to_string(),
        ];
        for (k, v) in &self.input {
            header.push(format!("input.{k}"));
            row.push(csv_escape(v));
        }
        for (k, v) in &self.config {
            header.push(format!("config.{k}"));
            row.push(csv_escape(v));
        }
        format!("{}\n{}\n", header.join(","), row.join(","))
    }
}

fn csv_escape(v: &str) -> String {
    if v.contains(',') || v.contains('"') || v.contains('\n') {
        format!("\"{}\"", v.replace('"', "\"\""))
    } else {
        v.to_string()
    }
}

/// Mean and sample standard deviation, as printed in batch summaries.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    if values.len() == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
        / (values.len() - 1) as f64;
    (mean, var.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_and_json_carry_identical_values() {
        let cb = CostBreakdown::new(10.5, 20.25, 30.125);
        let report = RunReport {
            schema: REPORT_SCHEMA.into(),
            input: BTreeMap::new(),
            config: BTreeMap::new(),
            cost: (&cb).into(),
            levels: None,
            codebook: None,
            decode_check: true,
            timing_ms: 1,
        };
        let json: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
        let csv = report.to_csv();
        let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
        assert_eq!(
            json["cost"]["lcc_score"].as_f64().unwrap().to_string(),
            row[4]
        );
        assert_eq!(
            json["cost"]["total_cost"].as_f64().unwrap().to_string(),
            row[5]
        );
    }

    #[test]
    fn mean_std_matches_hand_calc() {
        let (m, s) = mean_std(&[1.0, 2.0, 3.0]);
        assert!((m - 2.0).abs() < 1e-12);
        assert!((s - 1.0).abs() < 1e-12);
        let (m, s) = mean_std(&[5.0]);
        assert_eq!((m, s), (5.0, 0.0));
    }
}
