//! Hand localiser outputs: decoding the 6-vector, the presence-masked
//! regression loss and its gradient, and the F1@T_L localisation metric.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum HandError {
    #[error("output component {index} = {value} outside [0, 1]")]
    OutOfRange { index: usize, value: f64 },
    #[error("{preds} predictions but {gts} ground-truth entries")]
    LengthMismatch { preds: usize, gts: usize },
    #[error("lambda must be > 0, got {0}")]
    BadLambda(f64),
}

/// One hand slot of the localiser output (post-sigmoid).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HandObservation {
    pub p: f64,
    pub x: f64,
    pub y: f64,
}

impl HandObservation {
    /// Presence decision; exactly 0.5 counts as absent.
    pub fn is_present(&self) -> bool {
        self.p > 0.5
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HandTarget {
    pub present: bool,
    pub x: f64,
    pub y: f64,
}

impl HandTarget {
    pub fn absent() -> Self {
        Self {
            present: false,
            x: 0.0,
            y: 0.0,
        }
    }

    pub fn at(x: f64, y: f64) -> Self {
        Self { present: true, x, y }
    }

    fn p(&self) -> f64 {
        if self.present {
            1.0
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HandLossConfig {
    lambda: f64,
}

impl HandLossConfig {
    pub fn new(lambda: f64) -> Result<Self, HandError> {
        if !(lambda > 0.0) {
            return Err(HandError::BadLambda(lambda));
        }
        Ok(Self { lambda })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

impl Default for HandLossConfig {
    fn default() -> Self {
        Self { lambda: 0.1 }
    }
}

/// Splits `[p1, x1, y1, p2, x2, y2]` into (left, right).
pub fn decode(v: &[f64; 6]) -> Result<(HandObservation, HandObservation), HandError> {
    if let Some((index, value)) = v.iter().enumerate().find(|(_, x)| !(0.0..=1.0).contains(*x)) {
        return Err(HandError::OutOfRange { index, value: *value });
    }
    Ok((
        HandObservation {
            p: v[0],
            x: v[1],
            y: v[2],
        },
        HandObservation {
            p: v[3],
            x: v[4],
            y: v[5],
        },
    ))
}

/// `lambda * sum_i (P_i - p_i)^2 + sum_i P_i * [(x_i - x^_i)^2 + (y_i - y^_i)^2]`.
pub fn hand_loss(pred: &[f64; 6], gt: &[HandTarget; 2], cfg: &HandLossConfig) -> f64 {
    let mut loss = 0.0;
    for (i, target) in gt.iter().enumerate() {
        let base = 3 * i;
        let dp = target.p() - pred[base];
        loss += cfg.lambda * dp * dp;
        if target.present {
            let dx = target.x - pred[base + 1];
            let dy = target.y - pred[base + 2];
            loss += dx * dx + dy * dy;
        }
    }
    loss
}

/// Analytic gradient of [`hand_loss`] with respect to the six predictions.
/// Position components of absent hands are exactly zero.
pub fn hand_loss_grad(pred: &[f64; 6], gt: &[HandTarget; 2], cfg: &HandLossConfig) -> [f64; 6] {
    let mut g = [0.0; 6];
    for (i, target) in gt.iter().enumerate() {
        let base = 3 * i;
        g[base] = -2.0 * cfg.lambda * (target.p() - pred[base]);
        if target.present {
            g[base + 1] = -2.0 * (target.x - pred[base + 1]);
            g[base + 2] = -2.0 * (target.y - pred[base + 2]);
        }
    }
    g
}

/// Confusion counts of the localisation metric.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct HandCounts {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
}

impl HandCounts {
    /// F1 in percent. With no hands and no detections there is nothing to
    /// get wrong and the score is 100.
    pub fn f1(&self) -> f64 {
        let denom = 2 * self.tp + self.fp + self.fn_;
        if denom == 0 {
            100.0
        } else {
            100.0 * (2 * self.tp) as f64 / denom as f64
        }
    }
}

/// Counts per slot. A detection within `t_l` of a present hand is a true
/// positive; a detection elsewhere is a false positive, and also a false
/// negative when a hand was there to be found.
pub fn hand_counts(preds: &[HandObservation], gts: &[HandTarget], t_l: f64) -> Result<HandCounts, HandError> {
    if preds.len() != gts.len() {
        return Err(HandError::LengthMismatch {
            preds: preds.len(),
            gts: gts.len(),
        });
    }
    let mut c = HandCounts::default();
    for (p, g) in preds.iter().zip(gts) {
        match (p.is_present(), g.present) {
            (true, true) => {
                let dist = ((p.x - g.x).powi(2) + (p.y - g.y).powi(2)).sqrt();
                if dist < t_l {
                    c.tp += 1;
                } else {
                    c.fp += 1;
                    c.fn_ += 1;
                }
            }
            (true, false) => c.fp += 1,
            (false, true) => c.fn_ += 1,
            (false, false) => {}
        }
    }
    Ok(c)
}

pub fn f1_at_threshold(preds: &[HandObservation], gts: &[HandTarget], t_l: f64) -> Result<f64, HandError> {
    Ok(hand_counts(preds, gts, t_l)?.f1())
}
