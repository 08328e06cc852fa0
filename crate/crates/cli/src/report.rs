//! Metrics file schema and the plain-text results table.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Metrics {
    pub experiment: String,
    pub model: String,
    pub seed: u64,
    pub constraint_error: f64,
    pub control_error: f64,
    pub runtime_seconds: f64,
    pub runtime_train_seconds: f64,
    pub runtime_loop_seconds: f64,
    pub hyperparameters: Vec<HyperparameterOut>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HyperparameterOut {
    pub kind: String,
    pub signal_variance: f64,
    pub lengthscale: f64,
}

pub fn load_metrics(path: &Path) -> Result<Metrics> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("cannot parse {}", path.display()))
}

/// One table section per experiment, one row per model variant.
pub fn render_table(metrics: &[Metrics]) -> String {
    let mut groups: BTreeMap<&str, Vec<&Metrics>> = BTreeMap::new();
    for m in metrics {
        groups.entry(&m.experiment).or_default().push(m);
    }
    let mut out = String::new();
    for (experiment, rows) in groups {
        out.push_str(experiment);
        out.push('\n');
        out.push_str(&format!(
            "  {:<8} {:>18} {:>18}\n",
            "model", "constraint error", "control error"
        ));
        out.push_str(&format!("  {:-<8} {:->18} {:->18}\n", "", "", ""));
        let mut sorted = rows.clone();
        sorted.sort_by(|a, b| a.model.cmp(&b.model));
        for m in sorted {
            out.push_str(&format!(
                "  {:<8} {:>18.6} {:>18.6}\n",
                m.model, m.constraint_error, m.control_error
            ));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn metrics(experiment: &str, model: &str, cv: f64, ce: f64) -> Metrics {
        Metrics {
            experiment: experiment.into(),
            model: model.into(),
            seed: 0,
            constraint_error: cv,
            control_error: ce,
            runtime_seconds: 1.0,
            runtime_train_seconds: 0.5,
            runtime_loop_seconds: 0.5,
            hyperparameters: vec![],
        }
    }

    #[test]
    fn single_row_table() {
        let t = render_table(&[metrics("exp", "gpmos", 0.0, 0.34)]);
        assert!(t.starts_with("exp\n"));
        assert!(t.contains("gpmos"));
        assert!(t.contains("constraint error"));
        assert_eq!(t.lines().count(), 5);
    }

    #[test]
    fn grouped_sections_per_experiment() {
        let rows = vec![
            metrics("b_exp", "gpse", 0.1, 0.4),
            metrics("a_exp", "gpm", 0.0, 0.3),
            metrics("b_exp", "gpmos", 0.0, 0.35),
        ];
        let t = render_table(&rows);
        let a = t.find("a_exp").unwrap();
        let b = t.find("b_exp").unwrap();
        assert!(a < b, "sections must be grouped and ordered");
        // b_exp section holds two model rows
        let b_section = &t[b..];
        assert!(b_section.contains("gpse") && b_section.contains("gpmos"));
        assert!(!t[a..b].contains("gpse"));
    }

    #[test]
    fn six_variant_table_shape() {
        let rows: Vec<Metrics> = ["gpse", "gpm", "gpmo", "gpses", "gpms", "gpmos"]
            .iter()
            .map(|m| metrics("exp1", m, 0.0, 0.4))
            .collect();
        let t = render_table(&rows);
        // name + header + separator + six rows + trailing blank
        assert_eq!(t.lines().count(), 10);
    }
}
