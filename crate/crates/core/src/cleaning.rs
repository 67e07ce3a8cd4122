//! Temporally aware label cleaning.
//!
//! Each class gets a minimum plausible run length, `mean - kappa * std` of its
//! training-set segment lengths. While predictions stream in, a run of some
//! class that ends before reaching its minimum is overwritten with the last
//! confirmed action. A run is confirmed, and its frames released, as soon as
//! it reaches its class minimum; frames continuing a confirmed run are
//! released immediately.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metrics::{self, EvalConfig, MetricError};
use crate::timeline::{ClassId, Segment, Timeline};

#[derive(Debug, Error, PartialEq)]
pub enum CleanError {
    #[error("frame {got} pushed, expected frame {expected}")]
    OutOfOrder { expected: usize, got: usize },
    #[error("no segments to compute statistics from")]
    NoSegments,
    #[error("kappa sweep needs at least one timeline pair (got {raw} raw, {gt} ground truth)")]
    EmptySweep { raw: usize, gt: usize },
    #[error(transparent)]
    Metric(#[from] MetricError),
}

/// Segment-length statistics of one class, in frames.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassStats {
    pub class_id: ClassId,
    #[serde(default)]
    pub name: String,
    pub count: usize,
    pub mean_frames: f64,
    pub std_frames: f64,
}

/// Mean and population standard deviation of segment lengths per class.
pub fn compute_class_stats(segments: &[Segment]) -> Result<Vec<ClassStats>, CleanError> {
    if segments.is_empty() {
        return Err(CleanError::NoSegments);
    }
    let mut lengths: BTreeMap<ClassId, Vec<f64>> = BTreeMap::new();
    for s in segments {
        lengths.entry(s.class_id).or_default().push(s.len() as f64);
    }
    Ok(lengths
        .into_iter()
        .map(|(class_id, ls)| {
            let n = ls.len() as f64;
            let mean = ls.iter().sum::<f64>() / n;
            let var = ls.iter().map(|l| (l - mean).powi(2)).sum::<f64>() / n;
            ClassStats {
                class_id,
                name: crate::reference::class_name(class_id).unwrap_or("").to_string(),
                count: ls.len(),
                mean_frames: mean,
                std_frames: var.sqrt(),
            }
        })
        .collect())
}

/// `max(1, floor(mean - kappa * std))`. Runs strictly shorter are too short.
pub fn threshold(stats: &ClassStats, kappa: f64) -> usize {
    // The epsilon keeps e.g. 20 - 1.1 * 10 from flooring to 8.
    let raw = (stats.mean_frames - kappa * stats.std_frames + 1e-9).floor();
    if raw < 1.0 {
        1
    } else {
        raw as usize
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CleanerConfig {
    pub kappa: f64,
    pub stats: BTreeMap<ClassId, ClassStats>,
    pub fps: f64,
    /// Label given to a too-short run with no earlier action to fall back on.
    pub background: ClassId,
}

impl CleanerConfig {
    pub fn new(kappa: f64, stats: Vec<ClassStats>, fps: f64) -> Self {
        Self {
            kappa,
            stats: stats.into_iter().map(|s| (s.class_id, s)).collect(),
            fps,
            background: ClassId::BACKGROUND,
        }
    }

    pub fn with_kappa(&self, kappa: f64) -> Self {
        Self { kappa, ..self.clone() }
    }

    pub fn thresholds(&self) -> Thresholds {
        Thresholds(self.stats.iter().map(|(c, s)| (*c, threshold(s, self.kappa))).collect())
    }
}

/// Per-class minimum run lengths; classes without statistics get 1.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Thresholds(BTreeMap<ClassId, usize>);

impl Thresholds {
    pub fn from_map(map: BTreeMap<ClassId, usize>) -> Self {
        Self(map)
    }

    pub fn get(&self, c: ClassId) -> usize {
        self.0.get(&c).copied().unwrap_or(1)
    }

    pub fn max(&self) -> usize {
        self.0.values().copied().max().unwrap_or(1)
    }
}

#[derive(Debug, Clone, Copy)]
struct Pending {
    class: ClassId,
    start: usize,
    len: usize,
}

/// Streaming cleaner. Feed frames in order with [`LabelCleaner::push`]; every
/// frame is released exactly once, in order, either by a later push or by
/// [`LabelCleaner::flush`].
#[derive(Debug, Clone)]
pub struct LabelCleaner {
    thresholds: Thresholds,
    background: ClassId,
    next_frame: Option<usize>,
    /// Label of the last released frame.
    current: Option<ClassId>,
    pending: Option<Pending>,
}

impl LabelCleaner {
    pub fn new(cfg: &CleanerConfig) -> Self {
        Self::with_thresholds(cfg.thresholds(), cfg.background)
    }

    pub fn with_thresholds(thresholds: Thresholds, background: ClassId) -> Self {
        Self {
            thresholds,
            background,
            next_frame: None,
            current: None,
            pending: None,
        }
    }

    pub fn thresholds(&self) -> &Thresholds {
        &self.thresholds
    }

    /// Number of frames held back awaiting a decision.
    pub fn pending_len(&self) -> usize {
        self.pending.map_or(0, |p| p.len)
    }

    pub fn push(&mut self, frame: usize, label: ClassId) -> Result<Vec<(usize, ClassId)>, CleanError> {
        if let Some(expected) = self.next_frame {
            if frame != expected {
                return Err(CleanError::OutOfOrder { expected, got: frame });
            }
        }
        self.next_frame = Some(frame + 1);

        let mut out = Vec::new();
        match self.pending {
            Some(ref mut p) if p.class == label => {
                p.len += 1;
            }
            Some(_) => {
                self.reject_pending(&mut out);
                self.start(frame, label, &mut out);
            }
            None => self.start(frame, label, &mut out),
        }
        self.confirm_if_long_enough(&mut out);
        Ok(out)
    }

    /// Releases whatever is still held. A run cut off by the end of the
    /// stream is too short by definition and takes the previous action.
    pub fn flush(&mut self) -> Vec<(usize, ClassId)> {
        let mut out = Vec::new();
        self.reject_pending(&mut out);
        out
    }

    fn start(&mut self, frame: usize, label: ClassId, out: &mut Vec<(usize, ClassId)>) {
        if self.current == Some(label) {
            out.push((frame, label));
        } else {
            self.pending = Some(Pending {
                class: label,
                start: frame,
                len: 1,
            });
        }
    }

    fn confirm_if_long_enough(&mut self, out: &mut Vec<(usize, ClassId)>) {
        if let Some(p) = self.pending {
            if p.len >= self.thresholds.get(p.class) {
                out.extend((p.start..p.start + p.len).map(|f| (f, p.class)));
                self.current = Some(p.class);
                self.pending = None;
            }
        }
    }

    fn reject_pending(&mut self, out: &mut Vec<(usize, ClassId)>) {
        if let Some(p) = self.pending.take() {
            let fill = *self.current.get_or_insert(self.background);
            out.extend((p.start..p.start + p.len).map(|f| (f, fill)));
        }
    }
}

/// Offline cleaning over run-length segments. Produces the same labels as
/// streaming the timeline through [`LabelCleaner`] and flushing.
pub fn clean_timeline(raw: &Timeline, thresholds: &Thresholds, background: ClassId) -> Timeline {
    let mut current: Option<ClassId> = None;
    let mut out = Vec::with_capacity(raw.len());
    for seg in raw.segments() {
        let label = if current == Some(seg.class_id) || seg.len() >= thresholds.get(seg.class_id) {
            current = Some(seg.class_id);
            seg.class_id
        } else {
            *current.get_or_insert(background)
        };
        out.extend(std::iter::repeat_n(label, seg.len()));
    }
    Timeline::new(out)
}

/// Runs the streaming cleaner over a whole timeline.
pub fn clean_stream(raw: &Timeline, cfg: &CleanerConfig) -> Timeline {
    let mut cleaner = LabelCleaner::new(cfg);
    let mut labels = Vec::with_capacity(raw.len());
    for (f, &c) in raw.labels().iter().enumerate() {
        let released = cleaner.push(f, c).expect("frames are consecutive");
        labels.extend(released.into_iter().map(|(_, c)| c));
    }
    labels.extend(cleaner.flush().into_iter().map(|(_, c)| c));
    Timeline::new(labels)
}

/// Runs in `cleaned` shorter than their class minimum, excluding the last run
/// (which may have been cut by the end of the sequence).
pub fn short_runs(cleaned: &Timeline, thresholds: &Thresholds) -> Vec<Segment> {
    let segs = cleaned.segments();
    let n = segs.len().saturating_sub(1);
    segs.into_iter()
        .take(n)
        .filter(|s| s.len() < thresholds.get(s.class_id))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KappaScore {
    pub kappa: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub best_kappa: f64,
    pub best_f1: f64,
    pub scores: Vec<KappaScore>,
}

/// The sweep grid 1.0, 1.1, ..., 2.0.
pub fn kappa_grid() -> Vec<f64> {
    (10..=20).map(|k| k as f64 / 10.0).collect()
}

/// Picks the kappa maximising mean F1@0.5 of the cleaned timelines against
/// their ground truth. Ties go to the smaller kappa.
pub fn sweep_kappa(
    raw: &[Timeline],
    gt: &[Timeline],
    base: &CleanerConfig,
    eval: &EvalConfig,
) -> Result<SweepResult, CleanError> {
    if raw.is_empty() || raw.len() != gt.len() {
        return Err(CleanError::EmptySweep {
            raw: raw.len(),
            gt: gt.len(),
        });
    }
    let mut scores = Vec::new();
    for kappa in kappa_grid() {
        let cfg = base.with_kappa(kappa);
        let thresholds = cfg.thresholds();
        let mut total = 0.0;
        for (r, g) in raw.iter().zip(gt) {
            let cleaned = clean_timeline(r, &thresholds, cfg.background);
            total += metrics::f1_at_iou(&cleaned, g, 0.5, eval)?;
        }
        scores.push(KappaScore {
            kappa,
            f1: total / raw.len() as f64,
        });
    }
    let best = scores
        .iter()
        .fold(&scores[0], |best, s| if s.f1 > best.f1 { s } else { best });
    Ok(SweepResult {
        best_kappa: best.kappa,
        best_f1: best.f1,
        scores: scores.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn stats(class: u16, mean: f64, std: f64) -> ClassStats {
        ClassStats {
            class_id: ClassId(class),
            name: String::new(),
            count: 1,
            mean_frames: mean,
            std_frames: std,
        }
    }

    fn thresholds(pairs: &[(u16, usize)]) -> Thresholds {
        Thresholds::from_map(pairs.iter().map(|(c, t)| (ClassId(*c), *t)).collect())
    }

    fn tl(runs: &[(u16, usize)]) -> Timeline {
        Timeline::from_ids(
            &runs
                .iter()
                .flat_map(|(c, n)| std::iter::repeat_n(*c, *n))
                .collect::<Vec<_>>(),
        )
    }

    fn stream(raw: &Timeline, th: &Thresholds) -> Timeline {
        let mut c = LabelCleaner::with_thresholds(th.clone(), ClassId::BACKGROUND);
        let mut out = Vec::new();
        for (f, &l) in raw.labels().iter().enumerate() {
            out.extend(c.push(f, l).unwrap());
        }
        out.extend(c.flush());
        for (i, (f, _)) in out.iter().enumerate() {
            assert_eq!(*f, i, "emission out of order");
        }
        Timeline::new(out.into_iter().map(|(_, l)| l).collect())
    }

    #[test]
    fn stats_examples() {
        let segs = [
            Segment::new(ClassId(3), 0, 10),
            Segment::new(ClassId(3), 10, 30),
            Segment::new(ClassId(3), 30, 60),
            Segment::new(ClassId(5), 60, 67),
        ];
        let s = compute_class_stats(&segs).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].mean_frames, 20.0);
        assert!((s[0].std_frames - 8.16496580927726).abs() < 1e-12);
        assert_eq!((s[1].mean_frames, s[1].std_frames, s[1].count), (7.0, 0.0, 1));
        assert_eq!(compute_class_stats(&[]), Err(CleanError::NoSegments));
    }

    #[test]
    fn threshold_examples() {
        assert_eq!(threshold(&stats(0, 30.0, 10.0), 1.5), 15);
        assert_eq!(threshold(&stats(0, 14.4, 0.0), 1.7), 14);
        assert_eq!(threshold(&stats(0, 2.0, 5.0), 1.0), 1);
        assert_eq!(threshold(&stats(0, 20.0, 10.0), 1.1), 9);
    }

    #[test]
    fn short_run_takes_previous_action() {
        let th = thresholds(&[(0, 1), (1, 5)]);
        let raw = tl(&[(0, 4), (1, 2), (0, 4)]);
        assert_eq!(stream(&raw, &th), tl(&[(0, 10)]));
        assert_eq!(clean_timeline(&raw, &th, ClassId::BACKGROUND), tl(&[(0, 10)]));
    }

    #[test]
    fn clean_input_is_untouched() {
        let th = thresholds(&[(0, 3), (1, 3), (24, 2)]);
        let raw = tl(&[(24, 2), (0, 3), (1, 7), (0, 3)]);
        assert_eq!(stream(&raw, &th), raw);
    }

    #[test]
    fn leading_short_run_becomes_background() {
        let th = thresholds(&[(0, 5), (1, 1)]);
        let raw = tl(&[(0, 2), (1, 4)]);
        assert_eq!(stream(&raw, &th), tl(&[(24, 2), (1, 4)]));
    }

    #[test]
    fn cascade_keeps_merged_run_going() {
        // A confirmed, then B and C spikes both fall back to A.
        let th = thresholds(&[(0, 2), (1, 5), (2, 5)]);
        let raw = tl(&[(0, 3), (1, 3), (2, 2), (1, 3), (0, 2)]);
        assert_eq!(stream(&raw, &th), tl(&[(0, 13)]));
    }

    #[test]
    fn trailing_short_run_flushed_as_previous() {
        let th = thresholds(&[(0, 1), (1, 5)]);
        let raw = tl(&[(0, 3), (1, 3)]);
        assert_eq!(stream(&raw, &th), tl(&[(0, 6)]));
    }

    #[test]
    fn out_of_order_rejected() {
        let mut c = LabelCleaner::with_thresholds(Thresholds::default(), ClassId::BACKGROUND);
        c.push(4, ClassId(0)).unwrap();
        assert_eq!(
            c.push(6, ClassId(0)),
            Err(CleanError::OutOfOrder { expected: 5, got: 6 })
        );
        assert!(c.push(4, ClassId(0)).is_err());
    }

    #[test]
    fn sweep_prefers_smallest_on_ties() {
        let cfg = CleanerConfig::new(1.0, vec![stats(0, 10.0, 2.0)], 15.0);
        let gt = vec![tl(&[(0, 30)])];
        let r = sweep_kappa(&gt, &gt, &cfg, &EvalConfig::default()).unwrap();
        assert_eq!(r.best_kappa, 1.0);
        assert_eq!(r.scores.len(), 11);
        assert!(sweep_kappa(&[], &[], &cfg, &EvalConfig::default()).is_err());
    }

    #[test]
    fn sweep_finds_the_only_separating_kappa() {
        // Class 1 minimum: floor(20 - 10 * kappa) -> 5 exactly at kappa 1.5.
        // True class-1 segments are 5 long (need minimum <= 5, kappa >= 1.5);
        // spikes are 4 long (need minimum > 4, kappa <= 1.5).
        let cfg = CleanerConfig::new(1.0, vec![stats(0, 5.0, 0.0), stats(1, 20.0, 10.0)], 15.0);
        let gt = tl(&[(0, 30), (1, 5), (0, 30), (1, 5), (0, 30)]);
        let raw = tl(&[
            (0, 10),
            (1, 4),
            (0, 16),
            (1, 5),
            (0, 12),
            (1, 4),
            (0, 14),
            (1, 5),
            (0, 30),
        ]);
        let r = sweep_kappa(&[raw], &[gt], &cfg, &EvalConfig::default()).unwrap();
        assert_eq!(r.best_kappa, 1.5);
        assert_eq!(r.best_f1, 100.0);
    }

    fn arb_raw() -> impl Strategy<Value = Timeline> {
        proptest::collection::vec((prop_oneof![0u16..4, Just(24u16)], 1usize..9), 1..25).prop_map(|runs| tl(&runs))
    }

    fn arb_thresholds() -> impl Strategy<Value = Thresholds> {
        proptest::collection::vec(1usize..7, 5)
            .prop_map(|v| thresholds(&[(0, v[0]), (1, v[1]), (2, v[2]), (3, v[3]), (24, v[4])]))
    }

    proptest! {
        #[test]
        fn stream_matches_offline(raw in arb_raw(), th in arb_thresholds()) {
            prop_assert_eq!(stream(&raw, &th), clean_timeline(&raw, &th, ClassId::BACKGROUND));
        }

        #[test]
        fn no_short_runs_after_leading_confirmation(raw in arb_raw(), th in arb_thresholds()) {
            let cleaned = clean_timeline(&raw, &th, ClassId::BACKGROUND);
            let short = short_runs(&cleaned, &th);
            // Only a background fill at the very start can be short.
            for s in &short {
                prop_assert_eq!(s.start, 0);
                prop_assert_eq!(s.class_id, ClassId::BACKGROUND);
            }
        }

        #[test]
        fn latency_bounded_by_max_threshold(raw in arb_raw(), th in arb_thresholds()) {
            let mut c = LabelCleaner::with_thresholds(th.clone(), ClassId::BACKGROUND);
            let mut released = 0usize;
            for (f, &l) in raw.labels().iter().enumerate() {
                released += c.push(f, l).unwrap().len();
                // Every frame older than max threshold has been released.
                prop_assert!(f + 1 - released < th.max().max(1));
                prop_assert_eq!(f + 1 - released, c.pending_len());
            }
        }

        #[test]
        fn idempotent_on_clean_input(raw in arb_raw(), th in arb_thresholds()) {
            let once = clean_timeline(&raw, &th, ClassId::BACKGROUND);
            // A timeline whose every run meets its minimum is left alone.
            if short_runs(&raw, &th).is_empty()
                && raw.segments().last().is_none_or(|s| s.len() >= th.get(s.class_id))
            {
                prop_assert_eq!(&once, &raw);
            }
        }
    }
}
