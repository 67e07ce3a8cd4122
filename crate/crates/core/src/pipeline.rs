//! Sliding-window segmentation: clip sampler, classifier, raw timeline,
//! label cleaner, cleaned timeline.
//!
//! [`run_offline`] classifies every frame independently (in parallel) and
//! cleans afterwards. [`StreamSession`] does the same work incrementally; the
//! raw label of frame `m` is produced when frame `m + lag` arrives, and both
//! paths yield identical timelines.

use rayon::prelude::*;
use thiserror::Error;

use crate::classify::{classify_clip, ClassifyError, ClipClassifier, LogitsBackend};
use crate::cleaning::{CleanError, CleanerConfig, LabelCleaner};
use crate::sampling::{clip_for_middle, SamplingError, Window};
use crate::timeline::{ClassId, Timeline, NUM_CLASSES};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("invalid pipeline config: {0}")]
    Config(String),
    #[error(transparent)]
    Sampling(#[from] SamplingError),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    #[error(transparent)]
    Clean(#[from] CleanError),
    #[error("frame {got} pushed, expected frame {expected}")]
    OutOfOrder { expected: usize, got: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub window: Window,
    pub fps: f64,
    /// `None` skips cleaning; the cleaned timeline then equals the raw one.
    pub cleaner: Option<CleanerConfig>,
    pub num_classes: usize,
}

impl PipelineConfig {
    pub fn new(t: usize, tau: usize, fps: f64, cleaner: Option<CleanerConfig>) -> Result<Self, PipelineError> {
        let cfg = Self {
            window: Window::new(t, tau)?,
            fps,
            cleaner,
            num_classes: NUM_CLASSES,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        if !(self.fps > 0.0 && self.fps.is_finite()) {
            return Err(PipelineError::Config(format!("fps must be > 0, got {}", self.fps)));
        }
        if self.num_classes == 0 {
            return Err(PipelineError::Config("num_classes must be >= 1".into()));
        }
        if let Some(c) = &self.cleaner {
            if c.fps != self.fps {
                return Err(PipelineError::Config(format!(
                    "cleaner fps {} differs from pipeline fps {}",
                    c.fps, self.fps
                )));
            }
        }
        Ok(())
    }

    /// Raw-label delay in frames.
    pub fn lag(&self) -> usize {
        self.window.lag()
    }
}

/// Raw and cleaned labels for a whole sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segmentation {
    pub raw: Timeline,
    pub cleaned: Timeline,
}

fn check_backend<B: ClipClassifier + ?Sized>(cfg: &PipelineConfig, backend: &B) -> Result<(), PipelineError> {
    cfg.validate()?;
    if backend.num_classes() != cfg.num_classes {
        return Err(PipelineError::Config(format!(
            "backend has {} classes, pipeline expects {}",
            backend.num_classes(),
            cfg.num_classes
        )));
    }
    Ok(())
}

fn raw_label<B: ClipClassifier + ?Sized>(
    backend: &B,
    m: usize,
    w: Window,
    seq_len: usize,
) -> Result<ClassId, PipelineError> {
    let clip = clip_for_middle(m, w, seq_len)?;
    Ok(classify_clip(backend, &clip)?.0)
}

fn finish(cfg: &PipelineConfig, raw: Timeline) -> Segmentation {
    let cleaned = match &cfg.cleaner {
        Some(c) => crate::cleaning::clean_stream(&raw, c),
        None => raw.clone(),
    };
    Segmentation { raw, cleaned }
}

/// Labels frames `0..seq_len`. Clips are classified in parallel.
pub fn run_offline<B: ClipClassifier + ?Sized>(
    cfg: &PipelineConfig,
    backend: &B,
    seq_len: usize,
) -> Result<Segmentation, PipelineError> {
    check_backend(cfg, backend)?;
    if backend.frames_available() < seq_len {
        return Err(ClassifyError::MissingFrame(backend.frames_available()).into());
    }
    let labels = (0..seq_len)
        .into_par_iter()
        .map(|m| raw_label(backend, m, cfg.window, seq_len))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(finish(cfg, Timeline::new(labels)))
}

/// Pushes every frame through a [`StreamSession`] and flushes.
pub fn run_stream<B: ClipClassifier>(
    cfg: &PipelineConfig,
    backend: B,
    seq_len: usize,
) -> Result<Segmentation, PipelineError> {
    let mut session = StreamSession::new(cfg.clone(), backend)?;
    let mut raw = Vec::with_capacity(seq_len);
    let mut cleaned = Vec::with_capacity(seq_len);
    for f in 0..seq_len {
        let step = session.push(f)?;
        raw.extend(step.raw.map(|(_, c)| c));
        cleaned.extend(step.finalized.into_iter().map(|(_, c)| c));
    }
    let tail = session.flush()?;
    raw.extend(tail.raw.into_iter().map(|(_, c)| c));
    cleaned.extend(tail.finalized.into_iter().map(|(_, c)| c));
    Ok(Segmentation {
        raw: Timeline::new(raw),
        cleaned: Timeline::new(cleaned),
    })
}

/// Result of pushing one frame.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct StepOutput {
    /// Raw prediction that became computable with this frame.
    pub raw: Option<(usize, ClassId)>,
    /// Labels released by the cleaner, in frame order.
    pub finalized: Vec<(usize, ClassId)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FlushOutput {
    pub raw: Vec<(usize, ClassId)>,
    pub finalized: Vec<(usize, ClassId)>,
}

/// Incremental segmentation of one stream.
///
/// `push(j)` announces that the backend can now answer for frame `j`.
pub struct StreamSession<B> {
    cfg: PipelineConfig,
    backend: B,
    cleaner: Option<LabelCleaner>,
    next_frame: usize,
    next_raw: usize,
}

impl<B: ClipClassifier> StreamSession<B> {
    pub fn new(cfg: PipelineConfig, backend: B) -> Result<Self, PipelineError> {
        check_backend(&cfg, &backend)?;
        let cleaner = cfg.cleaner.as_ref().map(LabelCleaner::new);
        Ok(Self {
            cfg,
            backend,
            cleaner,
            next_frame: 0,
            next_raw: 0,
        })
    }

    pub fn backend(&self) -> &B {
        &self.backend
    }

    /// Frames whose raw label has been produced.
    pub fn raw_emitted(&self) -> usize {
        self.next_raw
    }

    pub fn push(&mut self, frame: usize) -> Result<StepOutput, PipelineError> {
        if frame != self.next_frame {
            return Err(PipelineError::OutOfOrder {
                expected: self.next_frame,
                got: frame,
            });
        }
        if frame >= self.backend.frames_available() {
            return Err(ClassifyError::MissingFrame(frame).into());
        }
        self.next_frame += 1;
        let lag = self.cfg.lag();
        if frame < lag {
            return Ok(StepOutput::default());
        }
        let m = frame - lag;
        // Every clip frame is <= `frame`, so the partial length clamps nothing.
        let label = raw_label(&self.backend, m, self.cfg.window, self.next_frame)?;
        self.next_raw = m + 1;
        let finalized = self.feed(m, label)?;
        Ok(StepOutput {
            raw: Some((m, label)),
            finalized,
        })
    }

    /// Ends the stream: labels the last `lag` frames with clips clamped at
    /// the final frame and releases everything the cleaner still holds.
    pub fn flush(&mut self) -> Result<FlushOutput, PipelineError> {
        let mut out = FlushOutput::default();
        let seq_len = self.next_frame;
        for m in self.next_raw..seq_len {
            let label = raw_label(&self.backend, m, self.cfg.window, seq_len)?;
            out.raw.push((m, label));
            let released = self.feed(m, label)?;
            out.finalized.extend(released);
        }
        self.next_raw = seq_len;
        if let Some(c) = self.cleaner.as_mut() {
            out.finalized.extend(c.flush());
        }
        Ok(out)
    }

    fn feed(&mut self, m: usize, label: ClassId) -> Result<Vec<(usize, ClassId)>, PipelineError> {
        match self.cleaner.as_mut() {
            Some(c) => Ok(c.push(m, label)?),
            None => Ok(vec![(m, label)]),
        }
    }
}

impl StreamSession<LogitsBackend> {
    /// Appends the next frame's logits and pushes it.
    pub fn push_logits(&mut self, logits: Vec<f64>) -> Result<StepOutput, PipelineError> {
        self.backend.push_frame(logits)?;
        self.push(self.next_frame)
    }
}
