//! Frame accuracy, segmental edit score, segmental F1@IoU and segment-level
//! (per-clip) F1.
//!
//! Segmental F1 follows the usual greedy protocol: predicted segments are
//! visited in temporal order and each is matched to the not-yet-used
//! ground-truth segment of the same class with the highest IoU. A match with
//! IoU at or above the threshold is a true positive and consumes that
//! ground-truth segment; anything else is a false positive. Ground-truth
//! segments left over are false negatives.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::reference;
use crate::timeline::{ClassId, Segment, Timeline};

#[derive(Debug, Error, PartialEq)]
pub enum MetricError {
    #[error("prediction has {pred} frames, ground truth {gt}")]
    LengthMismatch { pred: usize, gt: usize },
    #[error("IoU threshold {0} outside (0, 1]")]
    BadThreshold(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Average {
    Macro,
    Micro,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalConfig {
    pub iou_thresholds: Vec<f64>,
    pub ignore_background: bool,
    pub background: ClassId,
    pub segment_average: Average,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            iou_thresholds: vec![0.1, 0.25, 0.5],
            ignore_background: true,
            background: ClassId::BACKGROUND,
            segment_average: Average::Macro,
        }
    }
}

impl EvalConfig {
    pub fn validate(&self) -> Result<(), MetricError> {
        match self.iou_thresholds.iter().find(|t| !(**t > 0.0 && **t <= 1.0)) {
            Some(t) => Err(MetricError::BadThreshold(*t)),
            None => Ok(()),
        }
    }

    fn keep(&self, c: ClassId) -> bool {
        !(self.ignore_background && c == self.background)
    }

    fn segments(&self, t: &Timeline) -> Vec<Segment> {
        t.segments().into_iter().filter(|s| self.keep(s.class_id)).collect()
    }
}

fn check_len(pred: &Timeline, gt: &Timeline) -> Result<(), MetricError> {
    if pred.len() != gt.len() {
        return Err(MetricError::LengthMismatch {
            pred: pred.len(),
            gt: gt.len(),
        });
    }
    Ok(())
}

pub fn segments_from_timeline(t: &Timeline) -> Vec<Segment> {
    t.segments()
}

/// Percentage of counted frames labelled correctly; frames whose ground
/// truth is background are skipped when background is ignored.
pub fn frame_accuracy(pred: &Timeline, gt: &Timeline, cfg: &EvalConfig) -> Result<f64, MetricError> {
    check_len(pred, gt)?;
    let (mut hit, mut total) = (0usize, 0usize);
    for (p, g) in pred.labels().iter().zip(gt.labels()) {
        if cfg.keep(*g) {
            total += 1;
            hit += usize::from(p == g);
        }
    }
    Ok(if total == 0 {
        100.0
    } else {
        100.0 * hit as f64 / total as f64
    })
}

/// Plain Levenshtein distance with unit costs.
pub fn levenshtein<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, x) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, y) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(x != y);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// `100 * (1 - lev(pred_segments, gt_segments) / max(len))` over segment
/// label sequences. Two empty sequences score 100.
pub fn edit_score(pred: &Timeline, gt: &Timeline, cfg: &EvalConfig) -> Result<f64, MetricError> {
    check_len(pred, gt)?;
    let p: Vec<ClassId> = cfg.segments(pred).iter().map(|s| s.class_id).collect();
    let g: Vec<ClassId> = cfg.segments(gt).iter().map(|s| s.class_id).collect();
    let norm = p.len().max(g.len());
    if norm == 0 {
        return Ok(100.0);
    }
    Ok(100.0 * (1.0 - levenshtein(&p, &g) as f64 / norm as f64))
}

/// Intersection over union of two frame intervals; 0 when disjoint.
pub fn interval_iou(a: &Segment, b: &Segment) -> f64 {
    let inter = a.end.min(b.end) as i64 - a.start.max(b.start) as i64;
    if inter <= 0 {
        return 0.0;
    }
    let union = a.end.max(b.end) - a.start.min(b.start);
    inter as f64 / union as f64
}

/// True/false positive and false negative counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Counts {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl Counts {
    /// F1 in percent; 100 when there is nothing to match on either side.
    pub fn f1(&self) -> f64 {
        let denom = 2 * self.tp + self.fp + self.fn_;
        if denom == 0 {
            100.0
        } else {
            100.0 * (2 * self.tp) as f64 / denom as f64
        }
    }

    fn add(&mut self, o: Counts) {
        self.tp += o.tp;
        self.fp += o.fp;
        self.fn_ += o.fn_;
    }
}

/// Greedy segment matching, with counts broken down by class.
pub fn segment_counts_by_class(
    pred: &Timeline,
    gt: &Timeline,
    threshold: f64,
    cfg: &EvalConfig,
) -> Result<BTreeMap<ClassId, Counts>, MetricError> {
    check_len(pred, gt)?;
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(MetricError::BadThreshold(threshold));
    }
    let p = cfg.segments(pred);
    let g = cfg.segments(gt);
    let mut used = vec![false; g.len()];
    let mut by_class: BTreeMap<ClassId, Counts> = BTreeMap::new();
    for ps in &p {
        let best = g
            .iter()
            .enumerate()
            .filter(|(k, gs)| !used[*k] && gs.class_id == ps.class_id)
            .map(|(k, gs)| (k, interval_iou(ps, gs)))
            .fold(None::<(usize, f64)>, |acc, (k, iou)| match acc {
                Some((_, b)) if b >= iou => acc,
                _ => Some((k, iou)),
            });
        let entry = by_class.entry(ps.class_id).or_default();
        match best {
            Some((k, iou)) if iou >= threshold => {
                used[k] = true;
                entry.tp += 1;
            }
            _ => entry.fp += 1,
        }
    }
    for (gs, u) in g.iter().zip(&used) {
        if !u {
            by_class.entry(gs.class_id).or_default().fn_ += 1;
        }
    }
    Ok(by_class)
}

pub fn segment_counts(pred: &Timeline, gt: &Timeline, threshold: f64, cfg: &EvalConfig) -> Result<Counts, MetricError> {
    let mut total = Counts::default();
    for c in segment_counts_by_class(pred, gt, threshold, cfg)?.into_values() {
        total.add(c);
    }
    Ok(total)
}

pub fn f1_at_iou(pred: &Timeline, gt: &Timeline, threshold: f64, cfg: &EvalConfig) -> Result<f64, MetricError> {
    Ok(segment_counts(pred, gt, threshold, cfg)?.f1())
}

/// F1 over pre-cut segments, one label per segment. Macro averaging runs
/// over the classes present in the ground truth; micro averaging pools all
/// decisions.
pub fn segment_level_f1(pred: &[ClassId], gt: &[ClassId], average: Average) -> Result<f64, MetricError> {
    if pred.len() != gt.len() {
        return Err(MetricError::LengthMismatch {
            pred: pred.len(),
            gt: gt.len(),
        });
    }
    let mut counts: BTreeMap<ClassId, Counts> = BTreeMap::new();
    for (p, g) in pred.iter().zip(gt) {
        if p == g {
            counts.entry(*g).or_default().tp += 1;
        } else {
            counts.entry(*p).or_default().fp += 1;
            counts.entry(*g).or_default().fn_ += 1;
        }
    }
    match average {
        Average::Micro => {
            let mut total = Counts::default();
            counts.values().for_each(|c| total.add(*c));
            Ok(total.f1())
        }
        Average::Macro => {
            let classes: BTreeSet<ClassId> = gt.iter().copied().collect();
            if classes.is_empty() {
                return Ok(100.0);
            }
            let sum: f64 = classes.iter().map(|c| counts[c].f1()).sum();
            Ok(sum / classes.len() as f64)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassReport {
    pub class_id: ClassId,
    pub name: String,
    pub iou: f64,
    pub f1: f64,
    pub counts: Counts,
}

/// Sequence-level evaluation report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub acc: f64,
    pub edit: f64,
    /// Keyed by the IoU threshold as written, e.g. `"0.5"`.
    pub f1: BTreeMap<String, f64>,
    pub per_class: Vec<ClassReport>,
}

pub fn evaluate(pred: &Timeline, gt: &Timeline, cfg: &EvalConfig) -> Result<EvalReport, MetricError> {
    cfg.validate()?;
    let mut f1 = BTreeMap::new();
    for &t in &cfg.iou_thresholds {
        f1.insert(format!("{t}"), f1_at_iou(pred, gt, t, cfg)?);
    }
    let per_class = match cfg.iou_thresholds.iter().copied().reduce(f64::max) {
        Some(iou) => segment_counts_by_class(pred, gt, iou, cfg)?
            .into_iter()
            .map(|(class_id, counts)| ClassReport {
                class_id,
                name: reference::class_name(class_id).unwrap_or("").to_string(),
                iou,
                f1: counts.f1(),
                counts,
            })
            .collect(),
        None => Vec::new(),
    };
    Ok(EvalReport {
        acc: frame_accuracy(pred, gt, cfg)?,
        edit: edit_score(pred, gt, cfg)?,
        f1,
        per_class,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const A: u16 = 0;
    const B: u16 = 1;
    const BG: u16 = 24;

    fn tl(runs: &[(u16, usize)]) -> Timeline {
        Timeline::from_ids(
            &runs
                .iter()
                .flat_map(|(c, n)| std::iter::repeat_n(*c, *n))
                .collect::<Vec<_>>(),
        )
    }

    #[test]
    fn accuracy_examples() {
        let cfg = EvalConfig::default();
        let gt = tl(&[(A, 2), (BG, 3), (B, 2)]);
        assert_eq!(frame_accuracy(&gt, &gt, &cfg).unwrap(), 100.0);
        let wrong = tl(&[(B, 2), (BG, 3), (A, 2)]);
        assert_eq!(frame_accuracy(&wrong, &gt, &cfg).unwrap(), 0.0);
        // Background frames of the prediction do not count when gt is bg.
        let three_of_four = tl(&[(A, 2), (A, 3), (B, 1), (A, 1)]);
        assert_eq!(frame_accuracy(&three_of_four, &gt, &cfg).unwrap(), 75.0);
        assert!(frame_accuracy(&gt, &tl(&[(A, 1)]), &cfg).is_err());
    }

    #[test]
    fn edit_examples() {
        let cfg = EvalConfig::default();
        let gt = tl(&[(A, 4), (B, 4)]);
        assert_eq!(edit_score(&gt, &gt, &cfg).unwrap(), 100.0);
        let pred = tl(&[(A, 3), (B, 3), (A, 2)]);
        assert!((edit_score(&pred, &gt, &cfg).unwrap() - 200.0 / 3.0).abs() < 1e-12);
        let disjoint = tl(&[(2, 4), (3, 4)]);
        assert_eq!(edit_score(&disjoint, &gt, &cfg).unwrap(), 0.0);
        let all_bg = tl(&[(BG, 8)]);
        assert_eq!(edit_score(&all_bg, &all_bg, &cfg).unwrap(), 100.0);
    }

    #[test]
    fn background_toggle_changes_edit() {
        let gt = tl(&[(A, 4), (BG, 2), (B, 4)]);
        let pred = tl(&[(A, 5), (B, 5)]);
        let omit = EvalConfig::default();
        let keep = EvalConfig {
            ignore_background: false,
            ..EvalConfig::default()
        };
        assert_eq!(edit_score(&pred, &gt, &omit).unwrap(), 100.0);
        assert!((edit_score(&pred, &gt, &keep).unwrap() - 200.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn f1_examples() {
        let cfg = EvalConfig::default();
        let gt = tl(&[(A, 10), (B, 10)]);
        let pred = tl(&[(A, 8), (B, 12)]);
        assert_eq!(f1_at_iou(&pred, &gt, 0.5, &cfg).unwrap(), 100.0);
        for t in [0.1, 0.25, 0.5, 1.0] {
            assert_eq!(f1_at_iou(&gt, &gt, t, &cfg).unwrap(), 100.0);
        }
        let merged = tl(&[(A, 20)]);
        let c = segment_counts(&merged, &gt, 0.5, &cfg).unwrap();
        assert_eq!(c, Counts { tp: 1, fp: 0, fn_: 1 });
        assert!((c.f1() - 200.0 / 3.0).abs() < 1e-12);
        assert!(f1_at_iou(&gt, &gt, 0.0, &cfg).is_err());
    }

    #[test]
    fn consumed_gt_is_not_reused() {
        let cfg = EvalConfig::default();
        let gt = tl(&[(A, 10), (B, 2), (A, 10)]);
        // Two predictions overlapping the first A segment, one the second.
        let pred = tl(&[(A, 5), (B, 1), (A, 5), (B, 2), (A, 9)]);
        let c = segment_counts(&pred, &gt, 0.1, &cfg).unwrap();
        // A(0..5) takes gt A(0..10); A(6..11) can only reach gt A(12..22)?
        // IoU(6..11, 12..22) = 0, so it is a FP; A(13..22) matches gt A(12..22).
        assert_eq!(c.tp, 3);
        assert_eq!(c.fp, 2);
        assert_eq!(c.fn_, 0);
    }

    #[test]
    fn segment_level_examples() {
        let ids = |v: &[u16]| v.iter().copied().map(ClassId).collect::<Vec<_>>();
        assert_eq!(
            segment_level_f1(&ids(&[0, 1, 2]), &ids(&[0, 1, 2]), Average::Macro).unwrap(),
            100.0
        );
        // Class 0 perfect; class 1 never predicted (its samples go to 2).
        let f = segment_level_f1(&ids(&[0, 0, 2]), &ids(&[0, 0, 1]), Average::Macro).unwrap();
        assert_eq!(f, 50.0);
        assert_eq!(
            segment_level_f1(&ids(&[3, 3]), &ids(&[3, 3]), Average::Macro).unwrap(),
            100.0
        );
        let micro = segment_level_f1(&ids(&[0, 0, 2, 1]), &ids(&[0, 0, 1, 1]), Average::Micro).unwrap();
        assert_eq!(micro, 75.0);
    }

    #[test]
    fn levenshtein_small() {
        assert_eq!(levenshtein(b"kitten", b"sitting"), 3);
        assert_eq!(levenshtein::<u8>(b"", b"abc"), 3);
        assert_eq!(levenshtein(b"abc", b"abc"), 0);
    }

    #[test]
    fn report_has_all_thresholds() {
        let gt = tl(&[(A, 10), (BG, 5), (B, 10)]);
        let r = evaluate(&gt, &gt, &EvalConfig::default()).unwrap();
        assert_eq!(r.f1.len(), 3);
        assert_eq!(r.f1["0.5"], 100.0);
        assert_eq!(r.per_class.len(), 2);
        assert_eq!(r.per_class[0].name, "Unbox Component");
    }

    fn arb_pair() -> impl Strategy<Value = (Timeline, Timeline)> {
        (1usize..60).prop_flat_map(|n| {
            (
                proptest::collection::vec(prop_oneof![0u16..3, Just(24u16)], n),
                proptest::collection::vec(prop_oneof![0u16..3, Just(24u16)], n),
            )
                .prop_map(|(a, b)| (Timeline::from_ids(&a), Timeline::from_ids(&b)))
        })
    }

    proptest! {
        #[test]
        fn f1_non_increasing_in_threshold((p, g) in arb_pair(), a in 0.01f64..1.0, b in 0.01f64..1.0) {
            let cfg = EvalConfig::default();
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(f1_at_iou(&p, &g, lo, &cfg).unwrap() >= f1_at_iou(&p, &g, hi, &cfg).unwrap());
        }

        #[test]
        fn invariant_under_stretching((p, g) in arb_pair(), k in 1usize..5) {
            let cfg = EvalConfig::default();
            let (ps, gs) = (p.stretched(k), g.stretched(k));
            prop_assert_eq!(edit_score(&p, &g, &cfg).unwrap(), edit_score(&ps, &gs, &cfg).unwrap());
            for t in [0.1, 0.25, 0.5] {
                prop_assert_eq!(f1_at_iou(&p, &g, t, &cfg).unwrap(), f1_at_iou(&ps, &gs, t, &cfg).unwrap());
            }
        }

        #[test]
        fn metrics_in_range((p, g) in arb_pair(), bg in any::<bool>()) {
            let cfg = EvalConfig { ignore_background: bg, ..EvalConfig::default() };
            let r = evaluate(&p, &g, &cfg).unwrap();
            for v in [r.acc, r.edit].into_iter().chain(r.f1.values().copied()) {
                prop_assert!((0.0..=100.0).contains(&v));
            }
        }
    }
}
