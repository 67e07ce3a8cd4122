//! Per-clip classifiers.
//!
//! Two backends are provided: [`LogitsBackend`] replays precomputed per-frame
//! logits and averages them over the clip, and [`OracleBackend`] answers with
//! the label a (possibly corrupted) timeline assigns to the clip's middle
//! frame. [`synth_timeline`] produces such corrupted timelines.

use std::io::{self, Read, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson};
use thiserror::Error;

use crate::sampling::ClipSpec;
use crate::timeline::{ClassId, Timeline};

pub const LOGITS_MAGIC: &[u8; 4] = b"ATSL";

#[derive(Debug, Error)]
pub enum ClassifyError {
    #[error("no logits record for frame {0}")]
    MissingFrame(usize),
    #[error("frame {frame} has {got} logits, expected {expected}")]
    WrongWidth { frame: usize, expected: usize, got: usize },
    #[error("logits file: {0}")]
    Format(String),
    #[error("logits csv line {line}: {msg}")]
    Csv { line: u64, msg: String },
    #[error("invalid noise model: {0}")]
    Noise(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// How per-frame scores are combined over a clip.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Consensus {
    /// Arithmetic mean of raw logits.
    #[default]
    Logits,
    /// Arithmetic mean of per-frame softmax probabilities.
    Softmax,
}

pub trait ClipClassifier: Sync {
    fn num_classes(&self) -> usize;

    /// Number of frames the backend can currently answer for.
    fn frames_available(&self) -> usize;

    fn scores(&self, clip: &ClipSpec) -> Result<Vec<f64>, ClassifyError>;
}

impl<T: ClipClassifier + ?Sized> ClipClassifier for &T {
    fn num_classes(&self) -> usize {
        (**self).num_classes()
    }

    fn frames_available(&self) -> usize {
        (**self).frames_available()
    }

    fn scores(&self, clip: &ClipSpec) -> Result<Vec<f64>, ClassifyError> {
        (**self).scores(clip)
    }
}

/// Index of the largest score; ties go to the lowest class id.
pub fn argmax(scores: &[f64]) -> ClassId {
    let mut best = 0;
    for (i, s) in scores.iter().enumerate() {
        if *s > scores[best] {
            best = i;
        }
    }
    ClassId(best as u16)
}

/// Scores and predicted class for one clip.
pub fn classify_clip<B: ClipClassifier + ?Sized>(
    backend: &B,
    clip: &ClipSpec,
) -> Result<(ClassId, Vec<f64>), ClassifyError> {
    let scores = backend.scores(clip)?;
    Ok((argmax(&scores), scores))
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogitsRecord {
    pub frame: usize,
    pub logits: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogitsBackend {
    num_classes: usize,
    frames: Vec<Vec<f64>>,
    consensus: Consensus,
}

fn softmax(x: &[f64]) -> Vec<f64> {
    let m = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = x.iter().map(|v| (v - m).exp()).collect();
    let z: f64 = e.iter().sum();
    e.into_iter().map(|v| v / z).collect()
}

impl LogitsBackend {
    pub fn new(num_classes: usize) -> Self {
        Self {
            num_classes,
            frames: Vec::new(),
            consensus: Consensus::Logits,
        }
    }

    /// Builds a backend from records that must cover frames `0..n` exactly
    /// once (in any order).
    pub fn from_records(num_classes: usize, mut records: Vec<LogitsRecord>) -> Result<Self, ClassifyError> {
        records.sort_by_key(|r| r.frame);
        let mut b = Self::new(num_classes);
        for (i, r) in records.into_iter().enumerate() {
            if r.frame != i {
                return Err(ClassifyError::MissingFrame(i));
            }
            b.push_frame(r.logits)?;
        }
        Ok(b)
    }

    /// One-hot logits reproducing `t` frame by frame.
    pub fn one_hot(t: &Timeline, num_classes: usize) -> Self {
        let frames = t
            .labels()
            .iter()
            .map(|c| {
                let mut v = vec![0.0; num_classes];
                v[c.index()] = 1.0;
                v
            })
            .collect();
        Self {
            num_classes,
            frames,
            consensus: Consensus::Logits,
        }
    }

    pub fn with_consensus(mut self, consensus: Consensus) -> Self {
        self.consensus = consensus;
        self
    }

    pub fn consensus(&self) -> Consensus {
        self.consensus
    }

    /// Appends the next frame's logits.
    pub fn push_frame(&mut self, logits: Vec<f64>) -> Result<(), ClassifyError> {
        if logits.len() != self.num_classes {
            return Err(ClassifyError::WrongWidth {
                frame: self.frames.len(),
                expected: self.num_classes,
                got: logits.len(),
            });
        }
        self.frames.push(logits);
        Ok(())
    }

    pub fn frame(&self, i: usize) -> Option<&[f64]> {
        self.frames.get(i).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    /// Reads the binary format: `ATSL`, u32 frame count, u32 class count,
    /// then row-major f32 logits, all little-endian.
    pub fn read_bin<R: Read>(mut r: R) -> Result<Self, ClassifyError> {
        let mut header = [0u8; 12];
        r.read_exact(&mut header)
            .map_err(|_| ClassifyError::Format("truncated header".into()))?;
        if &header[..4] != LOGITS_MAGIC {
            return Err(ClassifyError::Format(format!(
                "bad magic {:?}, expected \"ATSL\"",
                String::from_utf8_lossy(&header[..4])
            )));
        }
        let n_frames = u32::from_le_bytes(header[4..8].try_into().unwrap()) as usize;
        let n_classes = u32::from_le_bytes(header[8..12].try_into().unwrap()) as usize;
        if n_classes == 0 {
            return Err(ClassifyError::Format("zero classes".into()));
        }
        let mut buf = Vec::new();
        r.read_to_end(&mut buf)?;
        if buf.len() != n_frames * n_classes * 4 {
            return Err(ClassifyError::Format(format!(
                "expected {} payload bytes for {n_frames}x{n_classes}, got {}",
                n_frames * n_classes * 4,
                buf.len()
            )));
        }
        let frames = buf
            .chunks_exact(4 * n_classes)
            .map(|row| {
                row.chunks_exact(4)
                    .map(|b| f32::from_le_bytes(b.try_into().unwrap()) as f64)
                    .collect()
            })
            .collect();
        Ok(Self {
            num_classes: n_classes,
            frames,
            consensus: Consensus::Logits,
        })
    }

    pub fn write_bin<W: Write>(&self, mut w: W) -> Result<(), ClassifyError> {
        w.write_all(LOGITS_MAGIC)?;
        w.write_all(&(self.frames.len() as u32).to_le_bytes())?;
        w.write_all(&(self.num_classes as u32).to_le_bytes())?;
        for row in &self.frames {
            for v in row {
                w.write_all(&(*v as f32).to_le_bytes())?;
            }
        }
        Ok(())
    }

    /// Reads `frame,logit_0,...,logit_{k-1}` rows; a header row is optional.
    pub fn read_csv<R: Read>(r: R) -> Result<Self, ClassifyError> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(r);
        let mut records = Vec::new();
        let mut width = None;
        for row in reader.records() {
            let row = row.map_err(|e| ClassifyError::Csv {
                line: e.position().map_or(0, |p| p.line()),
                msg: e.to_string(),
            })?;
            let line = row.position().map_or(0, |p| p.line());
            if row.get(0) == Some("frame") {
                continue;
            }
            let bad = |msg: String| ClassifyError::Csv { line, msg };
            let frame: usize = row
                .get(0)
                .unwrap_or("")
                .parse()
                .map_err(|e| bad(format!("frame index: {e}")))?;
            let logits = row
                .iter()
                .skip(1)
                .map(|s| s.parse::<f64>().map_err(|e| bad(format!("logit {s:?}: {e}"))))
                .collect::<Result<Vec<_>, _>>()?;
            match width {
                None => width = Some(logits.len()),
                Some(w) if w != logits.len() => return Err(bad(format!("{} logits, expected {w}", logits.len()))),
                _ => {}
            }
            records.push(LogitsRecord { frame, logits });
        }
        let width = width.ok_or_else(|| ClassifyError::Format("no logits rows".into()))?;
        if width == 0 {
            return Err(ClassifyError::Format("rows carry no logits".into()));
        }
        Self::from_records(width, records)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<(), ClassifyError> {
        let header: Vec<String> = std::iter::once("frame".to_string())
            .chain((0..self.num_classes).map(|k| format!("logit_{k}")))
            .collect();
        writeln!(w, "{}", header.join(","))?;
        for (i, row) in self.frames.iter().enumerate() {
            let vals: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            writeln!(w, "{i},{}", vals.join(","))?;
        }
        Ok(())
    }
}

impl ClipClassifier for LogitsBackend {
    fn num_classes(&self) -> usize {
        self.num_classes
    }

    fn frames_available(&self) -> usize {
        self.frames.len()
    }

    fn scores(&self, clip: &ClipSpec) -> Result<Vec<f64>, ClassifyError> {
        let mut acc = vec![0.0; self.num_classes];
        for &f in &clip.frames {
            let row = self.frames.get(f).ok_or(ClassifyError::MissingFrame(f))?;
            match self.consensus {
                Consensus::Logits => acc.iter_mut().zip(row).for_each(|(a, v)| *a += v),
                Consensus::Softmax => acc.iter_mut().zip(softmax(row)).for_each(|(a, v)| *a += v),
            }
        }
        let n = clip.frames.len() as f64;
        Ok(acc.into_iter().map(|a| a / n).collect())
    }
}

/// Answers every clip with a one-hot vector for the middle frame's label.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleBackend {
    timeline: Timeline,
    num_classes: usize,
}

impl OracleBackend {
    pub fn new(timeline: Timeline, num_classes: usize) -> Self {
        Self { timeline, num_classes }
    }
}

impl ClipClassifier for OracleBackend {
    fn num_classes(&self) -> usize {
        self.num_classes
    }

    fn frames_available(&self) -> usize {
        self.timeline.len()
    }

    fn scores(&self, clip: &ClipSpec) -> Result<Vec<f64>, ClassifyError> {
        if let Some(&f) = clip.frames.iter().find(|f| **f >= self.timeline.len()) {
            return Err(ClassifyError::MissingFrame(f));
        }
        let label = self.timeline.labels()[clip.middle];
        let mut v = vec![0.0; self.num_classes];
        v[label.index()] = 1.0;
        Ok(v)
    }
}

/// Corruption applied by [`synth_timeline`].
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseModel {
    /// Per-frame probability of swapping to a uniformly drawn other class.
    pub substitution_prob: f64,
    /// Standard deviation, in frames, of the shift applied to each boundary.
    pub boundary_jitter_std: f64,
    /// Expected number of spikes per 1000 frames.
    pub spike_rate: f64,
    pub spike_len: usize,
    pub seed: u64,
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self {
            substitution_prob: 0.0,
            boundary_jitter_std: 0.0,
            spike_rate: 0.0,
            spike_len: 1,
            seed: 0,
        }
    }
}

impl NoiseModel {
    pub fn validate(&self) -> Result<(), ClassifyError> {
        if !(0.0..=1.0).contains(&self.substitution_prob) {
            return Err(ClassifyError::Noise(format!(
                "substitution_prob {} outside [0, 1]",
                self.substitution_prob
            )));
        }
        if !(self.boundary_jitter_std >= 0.0) || !(self.spike_rate >= 0.0) {
            return Err(ClassifyError::Noise("jitter and spike rate must be >= 0".into()));
        }
        if self.spike_len == 0 {
            return Err(ClassifyError::Noise("spike_len must be >= 1".into()));
        }
        Ok(())
    }
}

fn other_class<R: Rng>(rng: &mut R, not: ClassId, num_classes: usize) -> ClassId {
    let r = rng.random_range(0..num_classes as u16 - 1);
    ClassId(if r >= not.0 { r + 1 } else { r })
}

/// Corrupts `gt` with boundary jitter, then per-frame substitutions, then
/// spikes. Deterministic for a given seed; the identity when all noise
/// parameters are zero.
pub fn synth_timeline(gt: &Timeline, nm: &NoiseModel, num_classes: usize) -> Result<Timeline, ClassifyError> {
    nm.validate()?;
    if num_classes < 2 {
        return Err(ClassifyError::Noise("need at least two classes".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(nm.seed);
    let mut labels = gt.labels().to_vec();
    let n = labels.len();

    if nm.boundary_jitter_std > 0.0 {
        let normal = Normal::new(0.0, nm.boundary_jitter_std).map_err(|e| ClassifyError::Noise(e.to_string()))?;
        let segs = gt.segments();
        let mut out = Vec::with_capacity(n);
        let mut start = 0usize;
        for (k, seg) in segs.iter().enumerate() {
            let end = if k + 1 == segs.len() {
                n
            } else {
                let shift = normal.sample(&mut rng).round() as i64;
                // Keep this segment and the next at least one frame long.
                (seg.end as i64 + shift).clamp(start as i64 + 1, segs[k + 1].end as i64 - 1) as usize
            };
            out.extend(std::iter::repeat_n(seg.class_id, end - start));
            start = end;
        }
        labels = out;
    }

    if nm.substitution_prob > 0.0 {
        for l in labels.iter_mut() {
            if rng.random::<f64>() < nm.substitution_prob {
                *l = other_class(&mut rng, *l, num_classes);
            }
        }
    }

    if nm.spike_rate > 0.0 && n >= nm.spike_len {
        let mean = nm.spike_rate * n as f64 / 1000.0;
        let count = Poisson::new(mean)
            .map_err(|e| ClassifyError::Noise(e.to_string()))?
            .sample(&mut rng) as usize;
        for _ in 0..count {
            let s = rng.random_range(0..=n - nm.spike_len);
            let c = other_class(&mut rng, labels[s], num_classes);
            labels[s..s + nm.spike_len].fill(c);
        }
    }
    Ok(Timeline::new(labels))
}
