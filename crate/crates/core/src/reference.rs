//! Class list and per-class length statistics of the 25-class assembly
//! dataset, used to shape synthetic fixtures and for class names in reports.

use rand::distr::weighted::WeightedIndex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::cleaning::ClassStats;
use crate::timeline::{ClassId, Timeline};

/// Camera rate of the recordings.
pub const DATASET_FPS: f64 = 15.0;

/// Row of the dataset summary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassInfo {
    pub id: u16,
    pub name: &'static str,
    pub examples: usize,
    pub mean_seconds: f64,
    pub total_minutes: f64,
}

const fn row(id: u16, name: &'static str, examples: usize, mean_seconds: f64, total_minutes: f64) -> ClassInfo {
    ClassInfo {
        id,
        name,
        examples,
        mean_seconds,
        total_minutes,
    }
}

pub const CLASSES: [ClassInfo; 25] = [
    row(0, "Unbox Component", 82, 8.63, 11.80),
    row(1, "Pick Up Washer and/or Screw", 610, 2.07, 21.08),
    row(2, "Pick Up Spanner", 50, 1.44, 1.20),
    row(3, "Pick Up Screwdriver", 101, 1.02, 1.73),
    row(4, "Pick Up Marker Pen", 149, 1.12, 2.78),
    row(5, "Pick Up Torque Wrench", 85, 1.14, 1.62),
    row(6, "Put Down Spanner", 49, 0.96, 0.78),
    row(7, "Put Down Screwdriver", 102, 1.13, 1.92),
    row(8, "Put Down Marker Pen", 140, 1.27, 2.96),
    row(9, "Put Down Torque Wrench", 81, 1.07, 1.49),
    row(10, "Place Washer and Screw on Screwdriver", 428, 1.86, 13.29),
    row(11, "Place Washer and Screw on Product", 159, 1.78, 4.72),
    row(12, "Place Component on Product", 123, 3.43, 7.03),
    row(13, "Place Washer on Bolt", 74, 2.76, 3.40),
    row(14, "Place Metal Bar on Product", 38, 3.59, 2.27),
    row(15, "Tighten Screw with Hand", 163, 3.80, 10.32),
    row(16, "Tighten Screw with Screwdriver", 359, 5.32, 31.85),
    row(17, "Tighten Screw with Torque Wrench", 168, 3.39, 9.49),
    row(18, "Tighten Nut with Hand", 77, 8.43, 10.82),
    row(19, "Tighten Nut with Spanner", 220, 1.99, 7.28),
    row(20, "Tighten Nut with Torque Wrench", 95, 7.74, 12.26),
    row(21, "Mark Bolt with Marker Pen", 134, 4.46, 9.97),
    row(22, "Mark Screw with Marker Pen", 105, 12.89, 22.55),
    row(23, "Remove Washer and Nut from Product", 76, 7.95, 10.07),
    row(24, "No Action", 1220, 3.75, 76.26),
];

pub fn class_name(id: ClassId) -> Option<&'static str> {
    CLASSES.get(id.index()).map(|c| c.name)
}

/// Length statistics in frames at `fps`. The summary only reports means, so
/// the spread is modelled as `cv * mean`.
pub fn reference_stats(fps: f64, cv: f64) -> Vec<ClassStats> {
    CLASSES
        .iter()
        .map(|c| {
            let mean_frames = c.mean_seconds * fps;
            ClassStats {
                class_id: ClassId(c.id),
                name: c.name.to_string(),
                count: c.examples,
                mean_frames,
                std_frames: cv * mean_frames,
            }
        })
        .collect()
}

/// Seeded ground-truth timeline of `n_frames` frames. It opens with
/// `lead_background` frames of background; after that, actions are drawn in
/// proportion to their example counts, each followed by a background gap
/// with probability one half. Segment lengths follow a normal distribution
/// with the class's mean and spread, at least one frame.
pub fn sample_ground_truth(
    stats: &[ClassStats],
    background: ClassId,
    n_frames: usize,
    lead_background: usize,
    seed: u64,
) -> Timeline {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let actions: Vec<&ClassStats> = stats.iter().filter(|s| s.class_id != background).collect();
    let bg = stats.iter().find(|s| s.class_id == background);
    let mut labels = vec![background; lead_background.min(n_frames)];
    let draw_len = |s: &ClassStats, rng: &mut ChaCha8Rng| -> usize {
        let len = match Normal::new(s.mean_frames, s.std_frames) {
            Ok(n) => n.sample(rng),
            Err(_) => s.mean_frames,
        };
        (len.round() as i64).max(1) as usize
    };
    let pick = WeightedIndex::new(actions.iter().map(|s| s.count.max(1))).ok();
    let mut last = None;
    while labels.len() < n_frames {
        let Some(pick) = pick.as_ref() else {
            labels.resize(n_frames, background);
            break;
        };
        let mut k = pick.sample(&mut rng);
        if actions.len() > 1 {
            while Some(k) == last {
                k = pick.sample(&mut rng);
            }
        }
        last = Some(k);
        let len = draw_len(actions[k], &mut rng);
        labels.extend(std::iter::repeat_n(actions[k].class_id, len));
        if rng.random_bool(0.5) {
            let len = bg.map_or(1, |b| draw_len(b, &mut rng));
            labels.extend(std::iter::repeat_n(background, len));
        }
    }
    labels.truncate(n_frames);
    Timeline::new(labels)
}
