use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{candidate_probabilities, threshold_candidates, argmax_probabilities, train, training_records, CVConfig, ModelKind, TrainedModel};
use crate::corpus::{gold_by_case, AnnotationRecord, Decision};
use crate::detection::{score_candidates, select_scored};
use crate::error::{ApeError, Result};
use crate::evaluation::{build_report, CasePrediction, EvaluationReport, FoldSummary};
use crate::extraction::{extract, ExtractionConfig};
use crate::lexicon::Lexicon;

/// How sentences are selected.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    RuleBased,
    Supervised(ModelKind),
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::RuleBased => "rule_based",
            Method::Supervised(k) => k.short_name(),
        }
    }
}

/// Splits case ids into `k` folds: a seeded shuffle dealt round-robin.
/// Folds are returned with their members sorted.
pub fn assign_folds(case_ids: &[String], k: usize, seed: u64) -> Vec<Vec<String>> {
    let mut ids: Vec<String> = case_ids.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    ids.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut folds = vec![Vec::new(); k];
    for (i, id) in ids.into_iter().enumerate() {
        folds[i % k].push(id);
    }
    for f in &mut folds {
        f.sort();
    }
    folds
}

/// Stage-1 set, selected sentence and extracted months for each decision.
/// `model` is required for supervised methods and ignored otherwise.
pub fn predict_cases(
    decisions: &[&Decision],
    method: Method,
    model: Option<&TrainedModel>,
    lexicon: &Lexicon,
    stage1_threshold: f64,
    extraction: &ExtractionConfig,
) -> Result<Vec<CasePrediction>> {
    decisions
        .iter()
        .map(|d| {
            let (stage1, selected) = match method {
                Method::RuleBased => {
                    let scored = score_candidates(d, lexicon);
                    let stage1 = scored
                        .iter()
                        .filter(|s| s.score >= lexicon.threshold)
                        .map(|s| s.sentence_index)
                        .collect();
                    (stage1, select_scored(&scored, lexicon.threshold).map(|s| s.sentence_index))
                }
                Method::Supervised(_) => {
                    let model = model.ok_or_else(|| ApeError::Config("a trained model is required".into()))?;
                    let probs = candidate_probabilities(model, d, lexicon)?;
                    (threshold_candidates(&probs, stage1_threshold), argmax_probabilities(&probs))
                }
            };
            let months = extract(d, selected, lexicon, extraction).months;
            Ok(CasePrediction {
                case_id: d.case_id.clone(),
                stage1,
                selected,
                months,
            })
        })
        .collect()
}

/// Document-level k-fold evaluation over the annotated decisions. The rule
/// based method has nothing to fit, but runs on the same folds.
pub fn cross_validate(
    decisions: &[Decision],
    annotations: &[AnnotationRecord],
    lexicon: &Lexicon,
    method: Method,
    config: &CVConfig,
    extraction: &ExtractionConfig,
) -> Result<EvaluationReport> {
    config.validate()?;
    let gold = gold_by_case(annotations);
    let annotated: Vec<&Decision> = decisions.iter().filter(|d| gold.contains_key(&d.case_id)).collect();
    if annotated.len() < config.num_folds {
        return Err(ApeError::TooFewDecisions {
            decisions: annotated.len(),
            folds: config.num_folds,
        });
    }
    let ids: Vec<String> = annotated.iter().map(|d| d.case_id.clone()).collect();
    let folds = assign_folds(&ids, config.num_folds, config.seed);

    let mut predictions = Vec::new();
    let mut summaries = Vec::new();
    for (k, test_ids) in folds.iter().enumerate() {
        let test_set: BTreeSet<&str> = test_ids.iter().map(String::as_str).collect();
        let (test, train_docs): (Vec<&Decision>, Vec<&Decision>) =
            annotated.iter().partition(|d| test_set.contains(d.case_id.as_str()));
        if train_docs.iter().any(|d| test_set.contains(d.case_id.as_str())) {
            return Err(ApeError::Training(format!("fold {k} leaks test decisions into training")));
        }
        let model = match method {
            Method::RuleBased => None,
            Method::Supervised(kind) => {
                let owned: Vec<Decision> = train_docs.iter().map(|d| (*d).clone()).collect();
                let records = training_records(&owned, &gold, lexicon);
                Some(train(&records, kind, config)?)
            }
        };
        log::info!("fold {k}: {} train / {} test decisions", train_docs.len(), test.len());
        predictions.extend(predict_cases(
            &test,
            method,
            model.as_ref(),
            lexicon,
            config.stage1_threshold,
            extraction,
        )?);
        summaries.push(FoldSummary {
            fold: k,
            test_cases: test_ids.clone(),
        });
    }
    Ok(build_report(method.name(), decisions, &gold, &predictions, lexicon, summaries))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn folds_partition_ids() {
        let ids: Vec<String> = (0..10).map(|i| format!("case{i}")).collect();
        let folds = assign_folds(&ids, 5, 3);
        assert_eq!(folds.len(), 5);
        assert!(folds.iter().all(|f| f.len() == 2));
        let all: BTreeSet<&String> = folds.iter().flatten().collect();
        assert_eq!(all.len(), 10);
        assert_eq!(folds, assign_folds(&ids, 5, 3));
    }

    #[test]
    fn too_few_decisions() {
        let docs: Vec<Decision> = (0..3)
            .map(|i| Decision::from_text(format!("c{i}"), "אני גוזר על הנאשם 30 חודשי מאסר בפועל."))
            .collect();
        let ann: Vec<AnnotationRecord> = (0..3)
            .map(|i| AnnotationRecord {
                case_id: format!("c{i}"),
                sentence_index: 0,
                is_punishment: true,
                months: Some(30),
            })
            .collect();
        let err = cross_validate(
            &docs,
            &ann,
            &Lexicon::default_hebrew(),
            Method::RuleBased,
            &CVConfig::default(),
            &ExtractionConfig::default(),
        )
        .unwrap_err();
        assert!(err.to_string().contains("fewer decisions than folds"));
    }
}
