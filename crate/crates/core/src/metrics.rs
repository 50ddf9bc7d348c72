//! Binary classification metrics for the positive class.
//!
//! Metrics whose denominator is zero are `None` ("undefined") and serialize
//! as JSON `null`, never as 0. MCC is the exception: a zero factor in its
//! denominator yields 0 by convention.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub tn: u64,
}

impl ConfusionMatrix {
    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.fn_ + self.tn
    }
}

fn check_inputs(scores: &[f64], labels: &[u8]) -> Result<()> {
    if scores.len() != labels.len() {
        return Err(Error::LengthMismatch {
            scores: scores.len(),
            labels: labels.len(),
        });
    }
    if scores.is_empty() {
        return Err(Error::Precondition("no examples to evaluate".into()));
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::Precondition("scores contain NaN".into()));
    }
    if let Some(l) = labels.iter().find(|&&l| l > 1) {
        return Err(Error::Precondition(format!("label {l} is not binary")));
    }
    Ok(())
}

/// Predicts positive iff `score >= threshold`.
pub fn confusion(scores: &[f64], labels: &[u8], threshold: f64) -> Result<ConfusionMatrix> {
    check_inputs(scores, labels)?;
    let mut cm = ConfusionMatrix::default();
    for (&s, &l) in scores.iter().zip(labels) {
        match (s >= threshold, l == 1) {
            (true, true) => cm.tp += 1,
            (true, false) => cm.fp += 1,
            (false, true) => cm.fn_ += 1,
            (false, false) => cm.tn += 1,
        }
    }
    Ok(cm)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Prf {
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub f1: Option<f64>,
}

fn ratio(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

pub fn prf(cm: &ConfusionMatrix) -> Prf {
    let precision = ratio(cm.tp, cm.tp + cm.fp);
    let recall = ratio(cm.tp, cm.tp + cm.fn_);
    let f1 = match (precision, recall) {
        (Some(p), Some(r)) if p + r > 0.0 => Some(2.0 * p * r / (p + r)),
        (Some(_), Some(_)) => Some(0.0),
        _ => None,
    };
    Prf {
        precision,
        recall,
        f1,
    }
}

pub fn mcc(cm: &ConfusionMatrix) -> f64 {
    let (tp, fp, fn_, tn) = (cm.tp as f64, cm.fp as f64, cm.fn_ as f64, cm.tn as f64);
    let den = (tp + fp) * (tp + fn_) * (tn + fp) * (tn + fn_);
    if den == 0.0 {
        return 0.0;
    }
    ((tp * tn - fp * fn_) / den.sqrt()).clamp(-1.0, 1.0)
}

/// Rank-based (Mann-Whitney) AUC with midranks for tied scores.
pub fn auc(scores: &[f64], labels: &[u8]) -> Result<f64> {
    check_inputs(scores, labels)?;
    let positives = labels.iter().filter(|&&l| l == 1).count();
    let negatives = labels.len() - positives;
    if positives == 0 {
        return Err(Error::SingleClass(0));
    }
    if negatives == 0 {
        return Err(Error::SingleClass(1));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    // Twice the rank sum of the positives, kept integral until the end.
    let mut doubled_rank_sum: u128 = 0;
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && scores[order[end]] == scores[order[start]] {
            end += 1;
        }
        // Ranks start..end (0-based) → midrank (start + 1 + end) / 2, doubled.
        let doubled_midrank = (start + 1 + end) as u128;
        let pos_in_group = order[start..end].iter().filter(|&&i| labels[i] == 1).count() as u128;
        doubled_rank_sum += doubled_midrank * pos_in_group;
        start = end;
    }
    let p = positives as u128;
    let doubled_u = doubled_rank_sum - p * (p + 1);
    Ok(doubled_u as f64 / (2.0 * positives as f64 * negatives as f64))
}

/// One evaluated model on one labeled test set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub task: String,
    /// Identity of the classifier that produced the scores.
    pub model: String,
    pub threshold: f64,
    pub n: usize,
    pub confusion: ConfusionMatrix,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub f1: Option<f64>,
    pub mcc: f64,
    pub auc: Option<f64>,
}

impl EvalReport {
    /// Builds a report; AUC is undefined rather than an error when one class is missing.
    pub fn from_scores(task: &str, model: &str, scores: &[f64], labels: &[u8], threshold: f64) -> Result<Self> {
        let cm = confusion(scores, labels, threshold)?;
        let p = prf(&cm);
        let auc = match auc(scores, labels) {
            Ok(v) => Some(v),
            Err(Error::SingleClass(_)) => None,
            Err(e) => return Err(e),
        };
        Ok(EvalReport {
            task: task.to_owned(),
            model: model.to_owned(),
            threshold,
            n: scores.len(),
            confusion: cm,
            precision: p.precision,
            recall: p.recall,
            f1: p.f1,
            mcc: mcc(&cm),
            auc,
        })
    }

    /// (metric name, value) in table order.
    pub fn metrics(&self) -> [(&'static str, Option<f64>); 5] {
        [
            ("precision", self.precision),
            ("recall", self.recall),
            ("f1", self.f1),
            ("mcc", Some(self.mcc)),
            ("auc", self.auc),
        ]
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let err = |e: csv::Error| Error::Csv {
            path: "<eval csv>".into(),
            source: e,
        };
        w.write_record(["metric", "value"]).map_err(err)?;
        for (name, v) in self.metrics() {
            w.write_record([name, &cell(v)]).map_err(err)?;
        }
        w.flush().map_err(|e| Error::io("<eval csv>", e))?;
        Ok(())
    }
}

fn cell(v: Option<f64>) -> String {
    v.map_or_else(|| "null".to_owned(), |x| x.to_string())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaRow {
    pub metric: String,
    pub baseline: Option<f64>,
    pub treatment: Option<f64>,
    /// `treatment - baseline` in percentage points.
    pub change: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaReport {
    pub baseline: EvalReport,
    pub treatment: EvalReport,
    pub rows: Vec<DeltaRow>,
}

impl DeltaReport {
    pub fn change(&self, metric: &str) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.metric == metric)
            .and_then(|r| r.change)
    }

    /// CSV with columns `metric,baseline,treatment,change`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let err = |e: csv::Error| Error::Csv {
            path: "<delta csv>".into(),
            source: e,
        };
        w.write_record(["metric", "baseline", "treatment", "change"])
            .map_err(err)?;
        for r in &self.rows {
            w.write_record([
                r.metric.clone(),
                cell(r.baseline),
                cell(r.treatment),
                cell(r.change),
            ])
            .map_err(err)?;
        }
        w.flush().map_err(|e| Error::io("<delta csv>", e))?;
        Ok(())
    }
}

/// Per-metric change from `baseline` to `treatment` in percentage points.
pub fn compare(baseline: &EvalReport, treatment: &EvalReport) -> Result<DeltaReport> {
    if baseline.task != treatment.task {
        return Err(Error::NotComparable(format!(
            "task `{}` vs `{}`",
            baseline.task, treatment.task
        )));
    }
    if baseline.threshold != treatment.threshold {
        return Err(Error::NotComparable(format!(
            "threshold {} vs {}",
            baseline.threshold, treatment.threshold
        )));
    }
    let rows = baseline
        .metrics()
        .into_iter()
        .zip(treatment.metrics())
        .map(|((name, b), (_, t))| DeltaRow {
            metric: name.to_owned(),
            baseline: b,
            treatment: t,
            change: b.zip(t).map(|(b, t)| (t - b) * 100.0),
        })
        .collect();
    Ok(DeltaReport {
        baseline: baseline.clone(),
        treatment: treatment.clone(),
        rows,
    })
}
