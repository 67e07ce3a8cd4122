//! Clip index generation for dense sliding-window inference and for
//! training-time surround / centre sampling.
//!
//! A clip holds `t` frame indices spaced `tau` apart and ending at the newest
//! frame `t0`. Its prediction is attributed to the frame `floor(t/2) * tau`
//! frames behind `t0`, so a label is available `lag()` frames after its frame
//! arrives.

use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SamplingError {
    #[error("clip length and stride must be >= 1 (t={t}, tau={tau})")]
    BadWindow { t: usize, tau: usize },
    #[error("frame {frame} outside a sequence of {seq_len} frames")]
    OutOfRange { frame: usize, seq_len: usize },
    #[error("segment start {start} after end {end}")]
    BadSegment { start: i64, end: i64 },
}

/// Clip shape, shared by every sampler.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    t: usize,
    tau: usize,
}

impl Window {
    pub fn new(t: usize, tau: usize) -> Result<Self, SamplingError> {
        if t == 0 || tau == 0 {
            return Err(SamplingError::BadWindow { t, tau });
        }
        Ok(Self { t, tau })
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn tau(&self) -> usize {
        self.tau
    }

    /// Frames between the predicted frame and the newest clip frame.
    pub fn lag(&self) -> usize {
        (self.t / 2) * self.tau
    }

    /// `floor(t * tau / 2)`: offset from a training clip's start anchor to
    /// its predicted frame.
    pub fn half_span(&self) -> i64 {
        (self.t * self.tau / 2) as i64
    }

    /// Temporal coverage `t * tau / fps`, in seconds.
    pub fn span_seconds(&self, fps: f64) -> f64 {
        (self.t * self.tau) as f64 / fps
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClipSpec {
    pub t: usize,
    pub tau: usize,
    /// Frame indices in temporal order, clamped into the sequence.
    pub frames: Vec<usize>,
    /// Frame receiving the clip's prediction; always one of `frames`.
    pub middle: usize,
}

/// Clip ending at the newest frame `t0`. Indices before the sequence start
/// repeat frame 0.
pub fn inference_clip(t0: usize, t: usize, tau: usize, seq_len: usize) -> Result<ClipSpec, SamplingError> {
    let w = Window::new(t, tau)?;
    if t0 >= seq_len {
        return Err(SamplingError::OutOfRange { frame: t0, seq_len });
    }
    let frames = clip_frames(&w, t0 as i64, seq_len);
    let middle = t0.saturating_sub(w.lag());
    Ok(ClipSpec { t, tau, frames, middle })
}

/// Clip whose prediction lands on frame `m`. Indices past either end of the
/// sequence are clamped, so the last frames still get a full-length clip.
pub fn clip_for_middle(m: usize, w: Window, seq_len: usize) -> Result<ClipSpec, SamplingError> {
    if m >= seq_len {
        return Err(SamplingError::OutOfRange { frame: m, seq_len });
    }
    let t0 = (m + w.lag()) as i64;
    Ok(ClipSpec {
        t: w.t,
        tau: w.tau,
        frames: clip_frames(&w, t0, seq_len),
        middle: m,
    })
}

fn clip_frames(w: &Window, t0: i64, seq_len: usize) -> Vec<usize> {
    let last = seq_len as i64 - 1;
    (0..w.t)
        .map(|k| {
            let back = ((w.t - 1 - k) * w.tau) as i64;
            (t0 - back).clamp(0, last) as usize
        })
        .collect()
}

/// Surround sampling: a training clip start drawn uniformly from
/// `[n_s - floor(t*tau/2), n_e - floor(t*tau/2)]`, so the predicted frame
/// `start + floor(t*tau/2)` always lies in `[n_s, n_e]` (both inclusive).
pub fn surround_sample_start<R: Rng + ?Sized>(
    n_s: i64,
    n_e: i64,
    w: Window,
    rng: &mut R,
) -> Result<i64, SamplingError> {
    if n_s > n_e {
        return Err(SamplingError::BadSegment { start: n_s, end: n_e });
    }
    let half = w.half_span();
    Ok(rng.random_range((n_s - half)..=(n_e - half)))
}

/// Offline evaluation start: the predicted frame is the segment midpoint.
pub fn center_sample_start(n_s: i64, n_e: i64, w: Window) -> Result<i64, SamplingError> {
    if n_s > n_e {
        return Err(SamplingError::BadSegment { start: n_s, end: n_e });
    }
    Ok(n_s + (n_e - n_s) / 2 - w.half_span())
}

/// Predicted frame of a training clip with the given start anchor.
pub fn middle_from_start(start: i64, w: Window) -> i64 {
    start + w.half_span()
}
