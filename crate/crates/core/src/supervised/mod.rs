//! Supervised sentence rankers.
//!
//! Every candidate sentence is featurized and scored with a probability of
//! carrying the actual punishment. Stage 1 keeps the candidates at or above a
//! threshold; stage 2 picks the single most probable candidate per document.

mod cv;
mod features;
mod forest;
mod linear;

use std::collections::BTreeMap;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::{CaseGold, Decision};
use crate::detection::{argmax_latest, filter_candidates};
use crate::error::{ApeError, Result};
use crate::lexicon::Lexicon;

pub use cv::{assign_folds, cross_validate, predict_cases, Method};
pub use features::{featurize, FeatureVector, FEATURE_NAMES, FEATURE_SCHEMA_VERSION, NUM_FEATURES};
pub use forest::{DecisionTree, ForestConfig, Node, TreeEnsemble};
pub use linear::{LinearConfig, LinearModel, Sigmoid};

/// Version of the serialized model document.
pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    LinearMargin,
    TreeEnsemble,
}

impl ModelKind {
    pub fn short_name(self) -> &'static str {
        match self {
            ModelKind::LinearMargin => "svm",
            ModelKind::TreeEnsemble => "rf",
        }
    }
}

impl FromStr for ModelKind {
    type Err = ApeError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "svm" | "linear_margin" => Ok(ModelKind::LinearMargin),
            "rf" | "tree_ensemble" => Ok(ModelKind::TreeEnsemble),
            other => Err(ApeError::Config(format!("unknown model kind `{other}` (expected svm or rf)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CVConfig {
    pub num_folds: usize,
    pub seed: u64,
    pub stage1_threshold: f64,
    #[serde(default)]
    pub linear: LinearConfig,
    #[serde(default)]
    pub forest: ForestConfig,
}

impl Default for CVConfig {
    fn default() -> Self {
        CVConfig {
            num_folds: 5,
            seed: 42,
            stage1_threshold: 0.5,
            linear: LinearConfig::default(),
            forest: ForestConfig::default(),
        }
    }
}

impl CVConfig {
    pub fn validate(&self) -> Result<()> {
        if self.num_folds < 2 {
            return Err(ApeError::Config("at least two folds are required".into()));
        }
        if !(self.stage1_threshold >= 0.0 && self.stage1_threshold <= 1.0) {
            return Err(ApeError::Config("stage-1 threshold must lie in [0, 1]".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "state", rename_all = "snake_case")]
pub enum ModelParams {
    LinearMargin(LinearModel),
    TreeEnsemble(TreeEnsemble),
}

/// A fitted model, serialized as the model file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub format_version: u32,
    pub kind: ModelKind,
    pub feature_schema_version: u32,
    pub feature_names: Vec<String>,
    pub rng_seed: u64,
    /// Calibration of the linear margin; absent for tree ensembles.
    pub calibration: Option<Sigmoid>,
    pub params: ModelParams,
}

impl TrainedModel {
    pub fn from_json(json: &str) -> Result<Self> {
        let model: TrainedModel = serde_json::from_str(json).map_err(|e| ApeError::Parse {
            what: "model file".into(),
            message: e.to_string(),
        })?;
        if model.format_version != MODEL_FORMAT_VERSION {
            return Err(ApeError::Parse {
                what: "model file".into(),
                message: format!("unsupported format version {}", model.format_version),
            });
        }
        Ok(model)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }
}

/// Fits a model on labeled feature vectors.
pub fn train(records: &[(FeatureVector, bool)], kind: ModelKind, config: &CVConfig) -> Result<TrainedModel> {
    let positives = records.iter().filter(|(_, y)| *y).count();
    if positives == 0 || positives == records.len() {
        return Err(ApeError::Training(format!(
            "training data needs both classes ({positives} positive of {})",
            records.len()
        )));
    }
    for (i, (fv, _)) in records.iter().enumerate() {
        check_schema(fv)?;
        if !fv.is_finite() {
            return Err(ApeError::Training(format!("non-finite feature in record {i}")));
        }
    }
    let xs: Vec<Vec<f64>> = records.iter().map(|(fv, _)| fv.values.clone()).collect();
    let ys: Vec<bool> = records.iter().map(|(_, y)| *y).collect();
    let (params, calibration) = match kind {
        ModelKind::LinearMargin => {
            let m = LinearModel::fit(&xs, &ys, &config.linear, config.seed);
            let cal = m.calibration;
            (ModelParams::LinearMargin(m), Some(cal))
        }
        ModelKind::TreeEnsemble => (
            ModelParams::TreeEnsemble(TreeEnsemble::fit(&xs, &ys, &config.forest, config.seed)),
            None,
        ),
    };
    Ok(TrainedModel {
        format_version: MODEL_FORMAT_VERSION,
        kind,
        feature_schema_version: FEATURE_SCHEMA_VERSION,
        feature_names: FEATURE_NAMES.iter().map(|s| s.to_string()).collect(),
        rng_seed: config.seed,
        calibration,
        params,
    })
}

fn check_schema(fv: &FeatureVector) -> Result<()> {
    if fv.schema_version != FEATURE_SCHEMA_VERSION || fv.values.len() != NUM_FEATURES {
        return Err(ApeError::SchemaMismatch {
            expected: FEATURE_SCHEMA_VERSION,
            expected_dims: NUM_FEATURES,
            got: fv.schema_version,
            got_dims: fv.values.len(),
        });
    }
    Ok(())
}

pub fn predict_proba(model: &TrainedModel, fv: &FeatureVector) -> Result<f64> {
    if model.feature_schema_version != FEATURE_SCHEMA_VERSION {
        return Err(ApeError::SchemaMismatch {
            expected: FEATURE_SCHEMA_VERSION,
            expected_dims: NUM_FEATURES,
            got: model.feature_schema_version,
            got_dims: model.feature_names.len(),
        });
    }
    check_schema(fv)?;
    let p = match &model.params {
        ModelParams::LinearMargin(m) => m.predict_proba(&fv.values),
        ModelParams::TreeEnsemble(e) => e.predict_proba(&fv.values),
    };
    Ok(p.clamp(0.0, 1.0))
}

/// Probability for every filter candidate of a decision, in document order.
pub fn candidate_probabilities(model: &TrainedModel, decision: &Decision, lexicon: &Lexicon) -> Result<Vec<(usize, f64)>> {
    filter_candidates(decision, lexicon)
        .into_iter()
        .map(|s| Ok((s.index, predict_proba(model, &featurize(s, decision, lexicon))?)))
        .collect()
}

/// Indices whose probability is at least `threshold`.
pub fn threshold_candidates(probabilities: &[(usize, f64)], threshold: f64) -> Vec<usize> {
    probabilities
        .iter()
        .filter(|(_, p)| *p >= threshold)
        .map(|(i, _)| *i)
        .collect()
}

/// Most probable index; ties go to the later sentence.
pub fn argmax_probabilities(probabilities: &[(usize, f64)]) -> Option<usize> {
    argmax_latest(probabilities.iter().copied())
}

pub fn stage1_classify(model: &TrainedModel, decision: &Decision, lexicon: &Lexicon, threshold: f64) -> Result<Vec<usize>> {
    Ok(threshold_candidates(&candidate_probabilities(model, decision, lexicon)?, threshold))
}

pub fn stage2_argmax(model: &TrainedModel, decision: &Decision, lexicon: &Lexicon) -> Result<Option<usize>> {
    Ok(argmax_probabilities(&candidate_probabilities(model, decision, lexicon)?))
}

/// Labeled training vectors for every sentence of the annotated decisions.
/// Sentences without a manual positive label are negatives, which covers
/// both manual and keyword-based automatic negatives.
pub fn training_records(
    decisions: &[Decision],
    gold: &BTreeMap<String, CaseGold>,
    lexicon: &Lexicon,
) -> Vec<(FeatureVector, bool)> {
    decisions
        .iter()
        .filter_map(|d| gold.get(&d.case_id).map(|g| (d, g)))
        .flat_map(|(d, g)| {
            d.sentences
                .iter()
                .map(move |s| (featurize(s, d, lexicon), g.positive.contains(&s.index)))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fv(values: Vec<f64>) -> FeatureVector {
        FeatureVector {
            schema_version: FEATURE_SCHEMA_VERSION,
            values,
        }
    }

    /// Positives have has_number = 1 and at least one strong-positive hit.
    fn separable() -> Vec<(FeatureVector, bool)> {
        let mut out = Vec::new();
        for i in 0..40 {
            let strong = (i % 3) as f64;
            let has_number = (i % 2) as f64;
            let mut v = vec![0.0; NUM_FEATURES];
            v[0] = strong;
            v[4] = has_number;
            v[10] = i as f64 / 40.0;
            v[12] = 1.0 - v[10];
            out.push((fv(v), strong >= 1.0 && has_number == 1.0));
        }
        out
    }

    #[test]
    fn separable_training_accuracy() {
        let data = separable();
        for kind in [ModelKind::LinearMargin, ModelKind::TreeEnsemble] {
            let m = train(&data, kind, &CVConfig::default()).unwrap();
            for (x, y) in &data {
                let p = predict_proba(&m, x).unwrap();
                assert!((0.0..=1.0).contains(&p));
                assert_eq!(p > 0.5, *y, "{kind:?}");
            }
        }
    }

    #[test]
    fn same_seed_same_model() {
        let data = separable();
        for kind in [ModelKind::LinearMargin, ModelKind::TreeEnsemble] {
            let a = train(&data, kind, &CVConfig::default()).unwrap();
            let b = train(&data, kind, &CVConfig::default()).unwrap();
            assert_eq!(a.to_json(), b.to_json());
        }
    }

    #[test]
    fn rejects_bad_input() {
        let all_pos: Vec<_> = separable().into_iter().map(|(x, _)| (x, true)).collect();
        assert!(matches!(
            train(&all_pos, ModelKind::TreeEnsemble, &CVConfig::default()),
            Err(ApeError::Training(_))
        ));
        let mut nan = separable();
        nan[0].0.values[3] = f64::NAN;
        assert!(train(&nan, ModelKind::LinearMargin, &CVConfig::default()).is_err());

        let m = train(&separable(), ModelKind::TreeEnsemble, &CVConfig::default()).unwrap();
        assert!(matches!(
            predict_proba(&m, &fv(vec![0.0; 3])),
            Err(ApeError::SchemaMismatch { .. })
        ));
    }

    #[test]
    fn model_file_round_trip() {
        let m = train(&separable(), ModelKind::LinearMargin, &CVConfig::default()).unwrap();
        let back = TrainedModel::from_json(&m.to_json()).unwrap();
        assert_eq!(back, m);
        assert!(m.calibration.is_some());
    }

    #[test]
    fn stage_selection_rules() {
        let probs = [(2, 0.9), (5, 0.6), (8, 0.2)];
        assert_eq!(threshold_candidates(&probs, 0.5), vec![2, 5]);
        assert!(threshold_candidates(&[(1, 0.1), (2, 0.3)], 0.5).is_empty());
        assert_eq!(threshold_candidates(&probs, 0.0), vec![2, 5, 8]);

        assert_eq!(argmax_probabilities(&[(4, 0.3), (9, 0.7), (30, 0.7)]), Some(30));
        assert_eq!(argmax_probabilities(&[(6, 0.01)]), Some(6));
        assert_eq!(argmax_probabilities(&[]), None);
    }
}
