//! Brute-force reference implementations and random fixtures shared by the
//! integration tests.

#![allow(dead_code)]

use std::collections::HashMap;

use atomseg::hands::{hand_loss, HandLossConfig, HandTarget};
use atomseg::{ClassId, Timeline};
use rand::Rng;

/// `(class, start, end)` runs, end exclusive.
pub fn runs(labels: &[ClassId]) -> Vec<(ClassId, usize, usize)> {
    let mut out: Vec<(ClassId, usize, usize)> = Vec::new();
    for (f, &c) in labels.iter().enumerate() {
        match out.last_mut() {
            Some(last) if last.0 == c => last.2 = f + 1,
            _ => out.push((c, f, f + 1)),
        }
    }
    out
}

fn kept(labels: &[ClassId], ignore_background: bool) -> Vec<(ClassId, usize, usize)> {
    runs(labels)
        .into_iter()
        .filter(|r| !(ignore_background && r.0 == ClassId::BACKGROUND))
        .collect()
}

/// IoU by counting frames of the two rasterised intervals.
pub fn raster_iou(a: (usize, usize), b: (usize, usize), n: usize) -> f64 {
    let (mut inter, mut union) = (0usize, 0usize);
    for f in 0..n {
        let in_a = a.0 <= f && f < a.1;
        let in_b = b.0 <= f && f < b.1;
        inter += usize::from(in_a && in_b);
        union += usize::from(in_a || in_b);
    }
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

/// Segmental F1: predictions in temporal order each claim the unclaimed
/// same-class ground-truth segment of highest IoU (earliest on ties).
pub fn oracle_f1(pred: &Timeline, gt: &Timeline, threshold: f64, ignore_background: bool) -> f64 {
    let n = gt.len();
    let p = kept(pred.labels(), ignore_background);
    let g = kept(gt.labels(), ignore_background);
    let mut claimed = vec![false; g.len()];
    let mut tp = 0usize;
    for ps in &p {
        let mut best: Option<(usize, f64)> = None;
        for (k, gs) in g.iter().enumerate() {
            if claimed[k] || gs.0 != ps.0 {
                continue;
            }
            let iou = raster_iou((ps.1, ps.2), (gs.1, gs.2), n);
            if best.is_none_or(|(_, b)| iou > b) {
                best = Some((k, iou));
            }
        }
        if let Some((k, iou)) = best {
            if iou >= threshold {
                claimed[k] = true;
                tp += 1;
            }
        }
    }
    let fp = p.len() - tp;
    let fn_ = g.len() - tp;
    let denom = 2 * tp + fp + fn_;
    if denom == 0 {
        100.0
    } else {
        100.0 * (2 * tp) as f64 / denom as f64
    }
}

fn lev_rec(a: &[ClassId], b: &[ClassId], i: usize, j: usize, memo: &mut HashMap<(usize, usize), usize>) -> usize {
    if i == a.len() {
        return b.len() - j;
    }
    if j == b.len() {
        return a.len() - i;
    }
    if let Some(&v) = memo.get(&(i, j)) {
        return v;
    }
    let v = if a[i] == b[j] {
        lev_rec(a, b, i + 1, j + 1, memo)
    } else {
        1 + lev_rec(a, b, i + 1, j, memo)
            .min(lev_rec(a, b, i, j + 1, memo))
            .min(lev_rec(a, b, i + 1, j + 1, memo))
    };
    memo.insert((i, j), v);
    v
}

pub fn oracle_edit(pred: &Timeline, gt: &Timeline, ignore_background: bool) -> f64 {
    let p: Vec<ClassId> = kept(pred.labels(), ignore_background).iter().map(|r| r.0).collect();
    let g: Vec<ClassId> = kept(gt.labels(), ignore_background).iter().map(|r| r.0).collect();
    let norm = p.len().max(g.len());
    if norm == 0 {
        return 100.0;
    }
    let d = lev_rec(&p, &g, 0, 0, &mut HashMap::new());
    100.0 * (1.0 - d as f64 / norm as f64)
}

/// Timeline of `n_segs` runs with lengths in `1..=max_len` over `classes`.
/// Neighbouring runs may share a class, so the true run count can be lower.
pub fn random_timeline<R: Rng>(rng: &mut R, n_segs: usize, max_len: usize, classes: &[u16]) -> Timeline {
    let mut labels = Vec::new();
    for _ in 0..n_segs {
        let c = ClassId(classes[rng.random_range(0..classes.len())]);
        let len = rng.random_range(1..=max_len);
        labels.extend(std::iter::repeat_n(c, len));
    }
    Timeline::new(labels)
}

/// Resamples `t` to exactly `n` frames by nearest-frame lookup.
pub fn resample(t: &Timeline, n: usize) -> Timeline {
    let src = t.labels();
    Timeline::new((0..n).map(|f| src[f * src.len() / n]).collect())
}

pub fn random_targets<R: Rng>(rng: &mut R) -> [HandTarget; 2] {
    std::array::from_fn(|_| {
        if rng.random_bool(0.5) {
            HandTarget::at(rng.random(), rng.random())
        } else {
            HandTarget::absent()
        }
    })
}

/// Central finite differences of the hand loss.
pub fn numeric_grad(pred: &[f64; 6], gt: &[HandTarget; 2], cfg: &HandLossConfig, h: f64) -> [f64; 6] {
    std::array::from_fn(|k| {
        let mut up = *pred;
        let mut down = *pred;
        up[k] += h;
        down[k] -= h;
        (hand_loss(&up, gt, cfg) - hand_loss(&down, gt, cfg)) / (2.0 * h)
    })
}
