//! Text file formats: timelines, segment lists, class statistics and hand
//! localiser rows. Logits files live with their backend in `classify`.
//!
//! CSV readers accept an optional header row and report errors with the
//! 1-based line number.

use std::io::{self, Read, Write};

use thiserror::Error;

use crate::cleaning::ClassStats;
use crate::hands::{decode, HandObservation, HandTarget};
use crate::timeline::{ClassId, Segment, Timeline};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {msg}")]
    Line { line: u64, msg: String },
    #[error("stats json: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
}

fn line_err(line: u64, msg: impl Into<String>) -> FormatError {
    FormatError::Line { line, msg: msg.into() }
}

/// Rows of exactly `width` fields, header skipped, with their line numbers.
fn rows<R: Read>(r: R, width: usize) -> Result<Vec<(u64, Vec<String>)>, FormatError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(r);
    let mut out = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| line_err(e.position().map_or(0, |p| p.line()), e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.iter().all(str::is_empty) {
            continue;
        }
        let is_header = i == 0 && rec.get(0).is_some_and(|s| s.parse::<f64>().is_err());
        if is_header {
            continue;
        }
        if rec.len() != width {
            return Err(line_err(line, format!("expected {width} fields, found {}", rec.len())));
        }
        out.push((line, rec.iter().map(str::to_string).collect()));
    }
    Ok(out)
}

fn field<T: std::str::FromStr>(line: u64, name: &str, s: &str) -> Result<T, FormatError>
where
    T::Err: std::fmt::Display,
{
    s.parse().map_err(|e| line_err(line, format!("{name} {s:?}: {e}")))
}

/// `frame,label_id`. Frames must run 0, 1, 2, ... in order.
pub fn read_timeline<R: Read>(r: R) -> Result<Timeline, FormatError> {
    let mut labels = Vec::new();
    for (line, row) in rows(r, 2)? {
        let frame: usize = field(line, "frame", &row[0])?;
        if frame != labels.len() {
            return Err(line_err(line, format!("frame {frame}, expected {}", labels.len())));
        }
        labels.push(ClassId(field(line, "label_id", &row[1])?));
    }
    Ok(Timeline::new(labels))
}

pub fn write_timeline<W: Write>(mut w: W, t: &Timeline) -> io::Result<()> {
    writeln!(w, "frame,label_id")?;
    for (i, c) in t.labels().iter().enumerate() {
        writeln!(w, "{i},{c}")?;
    }
    Ok(())
}

/// `start,end,label_id` with `end` exclusive.
pub fn read_segments<R: Read>(r: R) -> Result<Vec<Segment>, FormatError> {
    rows(r, 3)?
        .into_iter()
        .map(|(line, row)| {
            let start: usize = field(line, "start", &row[0])?;
            let end: usize = field(line, "end", &row[1])?;
            if end <= start {
                return Err(line_err(line, format!("empty segment {start}..{end}")));
            }
            Ok(Segment::new(ClassId(field(line, "label_id", &row[2])?), start, end))
        })
        .collect()
}

pub fn write_segments<W: Write>(mut w: W, segs: &[Segment]) -> io::Result<()> {
    writeln!(w, "start,end,label_id")?;
    for s in segs {
        writeln!(w, "{},{},{}", s.start, s.end, s.class_id)?;
    }
    Ok(())
}

pub fn read_stats<R: Read>(r: R) -> Result<Vec<ClassStats>, FormatError> {
    Ok(serde_json::from_reader(r)?)
}

pub fn write_stats<W: Write>(w: W, stats: &[ClassStats]) -> Result<(), FormatError> {
    Ok(serde_json::to_writer_pretty(w, stats)?)
}

/// One row of a hand file, indexed by frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HandRow {
    pub frame: usize,
    pub values: [f64; 6],
}

/// `frame,p1,x1,y1,p2,x2,y2`.
pub fn read_hand_rows<R: Read>(r: R) -> Result<Vec<HandRow>, FormatError> {
    rows(r, 7)?
        .into_iter()
        .map(|(line, row)| {
            let frame = field(line, "frame", &row[0])?;
            let mut values = [0.0; 6];
            for (k, v) in values.iter_mut().enumerate() {
                *v = field(line, "value", &row[k + 1])?;
            }
            decode(&values).map_err(|e| line_err(line, e.to_string()))?;
            Ok(HandRow { frame, values })
        })
        .collect()
}

/// Prediction rows flattened to per-slot observations.
pub fn hand_predictions(rows: &[HandRow]) -> Vec<HandObservation> {
    rows.iter()
        .flat_map(|r| {
            let (a, b) = decode(&r.values).expect("validated on read");
            [a, b]
        })
        .collect()
}

/// Ground-truth rows as per-slot targets; presence must be exactly 0 or 1.
pub fn hand_targets(rows: &[HandRow]) -> Result<Vec<HandTarget>, FormatError> {
    let mut out = Vec::with_capacity(rows.len() * 2);
    for r in rows {
        for slot in 0..2 {
            let [p, x, y] = [r.values[3 * slot], r.values[3 * slot + 1], r.values[3 * slot + 2]];
            out.push(match p {
                1.0 => HandTarget::at(x, y),
                0.0 => HandTarget::absent(),
                _ => {
                    return Err(line_err(
                        0,
                        format!("frame {}: ground-truth presence {p} is not 0 or 1", r.frame),
                    ))
                }
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn timeline_round_trip() {
        let t = Timeline::from_ids(&[24, 24, 3, 3, 3, 0]);
        let mut buf = Vec::new();
        write_timeline(&mut buf, &t).unwrap();
        assert!(buf.starts_with(b"frame,label_id\n0,24\n"));
        assert_eq!(read_timeline(&buf[..]).unwrap(), t);
        assert_eq!(read_timeline(&b"0,1\n1,1\n"[..]).unwrap().len(), 2);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = read_timeline(&b"frame,label_id\n0,1\n1,x\n"[..]).unwrap_err();
        assert!(err.to_string().starts_with("line 3:"), "{err}");
        let err = read_timeline(&b"0,1\n2,1\n"[..]).unwrap_err();
        assert!(err.to_string().starts_with("line 2:"), "{err}");
        let err = read_segments(&b"start,end,label_id\n0,5,1\n5,5,2\n"[..]).unwrap_err();
        assert!(err.to_string().starts_with("line 3:"), "{err}");
        let err = read_segments(&b"0,5\n"[..]).unwrap_err();
        assert!(err.to_string().starts_with("line 1:"), "{err}");
    }

    #[test]
    fn segments_round_trip() {
        let segs = vec![Segment::new(ClassId(1), 0, 4), Segment::new(ClassId(24), 4, 9)];
        let mut buf = Vec::new();
        write_segments(&mut buf, &segs).unwrap();
        assert_eq!(read_segments(&buf[..]).unwrap(), segs);
    }

    #[test]
    fn stats_round_trip() {
        let s = vec![ClassStats {
            class_id: ClassId(6),
            name: "Put Down Spanner".into(),
            count: 49,
            mean_frames: 14.4,
            std_frames: 0.0,
        }];
        let mut buf = Vec::new();
        write_stats(&mut buf, &s).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.contains("\"class_id\": 6"));
        assert_eq!(read_stats(&buf[..]).unwrap(), s);
        assert!(read_stats(&b"[{\"class_id\": 1}]"[..]).is_err());
    }

    #[test]
    fn hand_rows() {
        let text = b"frame,p1,x1,y1,p2,x2,y2\n0,0.9,0.1,0.2,0.1,0,0\n1,0,0,0,1,0.5,0.5\n";
        let rows = read_hand_rows(&text[..]).unwrap();
        assert_eq!(rows.len(), 2);
        let preds = hand_predictions(&rows);
        assert_eq!(preds.len(), 4);
        assert!(preds[0].is_present() && !preds[1].is_present());
        assert!(hand_targets(&rows).is_err());
        let gt = hand_targets(&rows[1..]).unwrap();
        assert_eq!(gt, vec![HandTarget::absent(), HandTarget::at(0.5, 0.5)]);
        let err = read_hand_rows(&b"0,1.5,0,0,0,0,0\n"[..]).unwrap_err();
        assert!(err.to_string().starts_with("line 1:"), "{err}");
    }
}
