//! Spatial alignment of high-resolution hand crops with backbone feature maps.
//!
//! The raw frame (`full_w x full_h`) is scaled so its shorter side becomes
//! `scale_short`, then a `crop_size` square is cut at `(crop_off_x,
//! crop_off_y)` and fed to the backbone. Hand crops of `hand_w x hand_h` are
//! cut from the *unscaled* frame with their top-left corner at `(hand_x,
//! hand_y)`. Normalised sizes and offsets express the hand crop in units of
//! the backbone crop, so any backbone feature map can host the hand features.

use std::collections::HashMap;

use thiserror::Error;

use crate::grid::{self, Dims, FeatureMap, GridError, MixerWeights};

#[derive(Debug, Error, PartialEq)]
pub enum AlignError {
    #[error("invalid geometry: {0}")]
    Geometry(String),
    #[error("geometry fixture: {0}")]
    Parse(String),
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// Everything about the backbone pre-processing and hand crop size that does
/// not depend on where the hand is.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CropParams {
    pub scale_short: f64,
    pub crop_size: f64,
    pub crop_off_x: f64,
    pub crop_off_y: f64,
    pub hand_w: f64,
    pub hand_h: f64,
}

impl CropParams {
    /// Backbone crop taken from the centre of the scaled frame.
    pub fn centered(full_w: f64, full_h: f64, scale_short: f64, crop_size: f64, hand: f64) -> Self {
        let (sw, sh) = scaled_dims(full_w, full_h, scale_short);
        Self {
            scale_short,
            crop_size,
            crop_off_x: ((sw - crop_size) / 2.0).floor().max(0.0),
            crop_off_y: ((sh - crop_size) / 2.0).floor().max(0.0),
            hand_w: hand,
            hand_h: hand,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CropGeometry {
    pub full_w: f64,
    pub full_h: f64,
    pub scale_short: f64,
    pub crop_size: f64,
    pub crop_off_x: f64,
    pub crop_off_y: f64,
    pub hand_w: f64,
    pub hand_h: f64,
    /// Top-left corner of the hand crop, full-resolution pixels.
    pub hand_x: f64,
    pub hand_y: f64,
}

/// Normalised hand size and offset relative to the backbone crop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlignmentResult {
    pub norm_w: f64,
    pub norm_h: f64,
    pub norm_x: f64,
    pub norm_y: f64,
}

/// Where the hand features land inside a backbone map, in cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Footprint {
    pub rows: usize,
    pub cols: usize,
    pub row: i64,
    pub col: i64,
}

/// Dimensions of the frame after scaling its shorter side to `scale_short`.
pub fn scaled_dims(full_w: f64, full_h: f64, scale_short: f64) -> (f64, f64) {
    let short = full_w.min(full_h);
    (
        round_half_up(full_w * scale_short / short),
        round_half_up(full_h * scale_short / short),
    )
}

pub fn round_half_up(x: f64) -> f64 {
    (x + 0.5).floor()
}

impl CropGeometry {
    /// Builds a geometry with the hand crop's top-left corner at `(hand_x,
    /// hand_y)`, clamped so the crop stays inside the frame.
    pub fn new(full_w: f64, full_h: f64, params: CropParams, hand_x: f64, hand_y: f64) -> Result<Self, AlignError> {
        let g = Self {
            full_w,
            full_h,
            scale_short: params.scale_short,
            crop_size: params.crop_size,
            crop_off_x: params.crop_off_x,
            crop_off_y: params.crop_off_y,
            hand_w: params.hand_w,
            hand_h: params.hand_h,
            hand_x: hand_x.clamp(0.0, (full_w - params.hand_w).max(0.0)),
            hand_y: hand_y.clamp(0.0, (full_h - params.hand_h).max(0.0)),
        };
        g.validate()?;
        Ok(g)
    }

    /// Builds a geometry from a hand centre given in normalised frame
    /// coordinates, as produced by the hand localiser.
    pub fn from_hand_center(
        full_w: f64,
        full_h: f64,
        params: CropParams,
        cx: f64,
        cy: f64,
    ) -> Result<Self, AlignError> {
        let x = cx * full_w - params.hand_w / 2.0;
        let y = cy * full_h - params.hand_h / 2.0;
        Self::new(full_w, full_h, params, x, y)
    }

    pub fn params(&self) -> CropParams {
        CropParams {
            scale_short: self.scale_short,
            crop_size: self.crop_size,
            crop_off_x: self.crop_off_x,
            crop_off_y: self.crop_off_y,
            hand_w: self.hand_w,
            hand_h: self.hand_h,
        }
    }

    pub fn short_side(&self) -> f64 {
        self.full_w.min(self.full_h)
    }

    pub fn validate(&self) -> Result<(), AlignError> {
        let positive = [
            ("full_w", self.full_w),
            ("full_h", self.full_h),
            ("scale_short", self.scale_short),
            ("crop_size", self.crop_size),
            ("hand_w", self.hand_w),
            ("hand_h", self.hand_h),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(AlignError::Geometry(format!("{name} must be > 0, got {v}")));
            }
        }
        let (sw, sh) = scaled_dims(self.full_w, self.full_h, self.scale_short);
        if self.crop_off_x < 0.0
            || self.crop_off_y < 0.0
            || self.crop_off_x + self.crop_size > sw
            || self.crop_off_y + self.crop_size > sh
        {
            return Err(AlignError::Geometry(format!(
                "crop {}@({}, {}) does not fit the {sw}x{sh} scaled frame",
                self.crop_size, self.crop_off_x, self.crop_off_y
            )));
        }
        if self.hand_w > self.full_w || self.hand_h > self.full_h {
            return Err(AlignError::Geometry(format!(
                "hand crop {}x{} larger than frame {}x{}",
                self.hand_w, self.hand_h, self.full_w, self.full_h
            )));
        }
        if self.hand_x < 0.0
            || self.hand_y < 0.0
            || self.hand_x + self.hand_w > self.full_w
            || self.hand_y + self.hand_h > self.full_h
        {
            return Err(AlignError::Geometry(format!(
                "hand crop at ({}, {}) leaves the frame",
                self.hand_x, self.hand_y
            )));
        }
        Ok(())
    }

    pub fn align(&self) -> Result<AlignmentResult, AlignError> {
        let (norm_w, norm_h) = normalized_size(self)?;
        let (norm_x, norm_y) = normalized_offset(self);
        Ok(AlignmentResult {
            norm_w,
            norm_h,
            norm_x,
            norm_y,
        })
    }

    /// Cell rectangle covered by the hand inside a `backbone_h x backbone_w` map.
    pub fn footprint(&self, backbone_h: usize, backbone_w: usize) -> Result<Footprint, AlignError> {
        let a = self.align()?;
        let (bh, bw) = (backbone_h as f64, backbone_w as f64);
        Ok(Footprint {
            rows: (round_half_up(bh * a.norm_h) as usize).max(1),
            cols: (round_half_up(bw * a.norm_w) as usize).max(1),
            row: round_half_up(bh * a.norm_y) as i64,
            col: round_half_up(bw * a.norm_x) as i64,
        })
    }
}

/// Hand crop size in units of the backbone crop:
/// `(w_c / H_short) * (S / C_s)` and likewise for the height.
pub fn normalized_size(g: &CropGeometry) -> Result<(f64, f64), AlignError> {
    if !(g.hand_w > 0.0 && g.hand_h > 0.0 && g.crop_size > 0.0 && g.short_side() > 0.0) {
        return Err(AlignError::Geometry("zero-sized geometry".into()));
    }
    let ratio = g.scale_short / g.crop_size;
    let short = g.short_side();
    Ok((g.hand_w / short * ratio, g.hand_h / short * ratio))
}

/// Hand crop top-left corner, mapped into scaled-image pixels, relative to
/// the backbone crop and divided by the crop size.
pub fn normalized_offset(g: &CropGeometry) -> (f64, f64) {
    let scale = g.scale_short / g.short_side();
    (
        (g.hand_x * scale - g.crop_off_x) / g.crop_size,
        (g.hand_y * scale - g.crop_off_y) / g.crop_size,
    )
}

/// Geometry used when the localiser reports no hand: the central hand-sized
/// window of the full frame.
pub fn fallback_geometry(full_w: f64, full_h: f64, params: CropParams) -> Result<CropGeometry, AlignError> {
    let x = ((full_w - params.hand_w) / 2.0).floor();
    let y = ((full_h - params.hand_h) / 2.0).floor();
    CropGeometry::new(full_w, full_h, params, x, y)
}

/// Resizes a hand-stream map to its footprint and zero-pads it into a map
/// with the backbone's spatial size.
pub fn place_hand_features(
    fh: &FeatureMap,
    g: &CropGeometry,
    backbone_h: usize,
    backbone_w: usize,
) -> Result<FeatureMap, AlignError> {
    let fp = g.footprint(backbone_h, backbone_w)?;
    let resized = grid::resize_nearest(fh, fp.rows, fp.cols)?;
    Ok(grid::zero_pad_place(&resized, backbone_h, backbone_w, fp.row, fp.col)?)
}

/// Full enhancement pass: align both hand maps, concatenate with the backbone
/// map, mix channels back down with a 1x1 convolution, add the residual and
/// normalise. Output dims equal `f`'s.
pub fn enhance(
    f: &FeatureMap,
    f_left: &FeatureMap,
    f_right: &FeatureMap,
    g_left: &CropGeometry,
    g_right: &CropGeometry,
    w: &MixerWeights,
) -> Result<FeatureMap, AlignError> {
    let d: Dims = f.dims();
    for hand in [f_left, f_right] {
        if hand.dims().t != d.t {
            return Err(AlignError::Grid(GridError::ShapeMismatch {
                left: d,
                right: hand.dims(),
            }));
        }
    }
    let left = place_hand_features(f_left, g_left, d.h, d.w)?;
    let right = place_hand_features(f_right, g_right, d.h, d.w)?;
    let stacked = grid::concat_channels(&[f, &left, &right])?;
    let mixed = grid::mix_1x1(&stacked, w)?;
    Ok(grid::residual_norm(f, &mixed, w)?)
}

/// Parses the `key=value` geometry fixture. `hand_cx`/`hand_cy` give the
/// hand centre in normalised frame coordinates; when absent the central
/// fallback crop is used. `crop_off_x`/`crop_off_y` default to a centred
/// backbone crop.
pub fn parse_geometry(text: &str) -> Result<CropGeometry, AlignError> {
    let mut kv = HashMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| AlignError::Parse(format!("line {}: expected key=value", n + 1)))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|e| AlignError::Parse(format!("line {}: {e}", n + 1)))?;
        kv.insert(k.trim().to_string(), v);
    }
    let get = |k: &str| {
        kv.get(k)
            .copied()
            .ok_or_else(|| AlignError::Parse(format!("missing key {k}")))
    };
    let full_w = get("full_w")?;
    let full_h = get("full_h")?;
    let scale_short = get("scale_short")?;
    let crop_size = get("crop_size")?;
    let mut params = CropParams::centered(full_w, full_h, scale_short, crop_size, get("hand_w")?);
    params.hand_h = get("hand_h")?;
    if let Some(x) = kv.get("crop_off_x") {
        params.crop_off_x = *x;
    }
    if let Some(y) = kv.get("crop_off_y") {
        params.crop_off_y = *y;
    }
    match (kv.get("hand_cx"), kv.get("hand_cy")) {
        (Some(cx), Some(cy)) => CropGeometry::from_hand_center(full_w, full_h, params, *cx, *cy),
        (None, None) => fallback_geometry(full_w, full_h, params),
        _ => Err(AlignError::Parse("hand_cx and hand_cy must be given together".into())),
    }
}
