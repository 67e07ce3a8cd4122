//! Per-frame label sequences and their run-length segments.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Number of classes in the assembly label space (24 actions + background).
pub const NUM_CLASSES: usize = 25;

/// Action class identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ClassId(pub u16);

impl ClassId {
    /// "No Action".
    pub const BACKGROUND: ClassId = ClassId(24);

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<u16> for ClassId {
    fn from(v: u16) -> Self {
        ClassId(v)
    }
}

impl fmt::Display for ClassId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A maximal run of one class: frames `start..end` (end exclusive).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    #[serde(rename = "label_id")]
    pub class_id: ClassId,
    pub start: usize,
    pub end: usize,
}

impl Segment {
    pub fn new(class_id: ClassId, start: usize, end: usize) -> Self {
        debug_assert!(start < end, "empty segment {start}..{end}");
        Self { class_id, start, end }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Timeline {
    labels: Vec<ClassId>,
}

impl Timeline {
    pub fn new(labels: Vec<ClassId>) -> Self {
        Self { labels }
    }

    pub fn from_ids(ids: &[u16]) -> Self {
        Self::new(ids.iter().copied().map(ClassId).collect())
    }

    /// Expands segments back to frames. Segments must be contiguous from 0.
    pub fn from_segments(segments: &[Segment]) -> Self {
        let mut labels = Vec::with_capacity(segments.last().map_or(0, |s| s.end));
        for s in segments {
            debug_assert_eq!(s.start, labels.len());
            labels.extend(std::iter::repeat_n(s.class_id, s.len()));
        }
        Self { labels }
    }

    pub fn labels(&self) -> &[ClassId] {
        &self.labels
    }

    pub fn into_labels(self) -> Vec<ClassId> {
        self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// First label that is not a valid class, if any.
    pub fn invalid_label(&self, num_classes: usize) -> Option<(usize, ClassId)> {
        self.labels
            .iter()
            .enumerate()
            .find(|(_, c)| c.index() >= num_classes)
            .map(|(i, c)| (i, *c))
    }

    /// Maximal runs, in order.
    pub fn segments(&self) -> Vec<Segment> {
        let mut out = Vec::new();
        let mut start = 0;
        for i in 1..=self.labels.len() {
            if i == self.labels.len() || self.labels[i] != self.labels[start] {
                out.push(Segment::new(self.labels[start], start, i));
                start = i;
            }
        }
        out
    }

    /// Repeats every frame `k` times.
    pub fn stretched(&self, k: usize) -> Timeline {
        Timeline::new(self.labels.iter().flat_map(|c| std::iter::repeat_n(*c, k)).collect())
    }
}

impl From<Vec<ClassId>> for Timeline {
    fn from(labels: Vec<ClassId>) -> Self {
        Self::new(labels)
    }
}
