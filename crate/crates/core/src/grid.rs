//! Dense `(t, c, h, w)` feature grids and the handful of primitives the
//! hand-feature enhancement block is built from: nearest-neighbour resize,
//! zero-padded placement, channel concatenation, 1x1 channel mixing and the
//! residual + batch-norm output stage.
//!
//! Values are stored row-major (`w` fastest, then `h`, `c`, `t`).

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GridError {
    #[error("all dimensions must be >= 1, got {0}")]
    ZeroDim(Dims),
    #[error("expected {expected} values for dims {dims}, got {got}")]
    ValueCount { dims: Dims, expected: usize, got: usize },
    #[error("map {index} has dims {got}, expected t={t} h={h} w={w}")]
    ConcatMismatch {
        index: usize,
        got: Dims,
        t: usize,
        h: usize,
        w: usize,
    },
    #[error("concat of an empty list")]
    EmptyConcat,
    #[error("channel mismatch: map has {got} channels, weights expect {expected}")]
    ChannelMismatch { expected: usize, got: usize },
    #[error("shape mismatch: {left} vs {right}")]
    ShapeMismatch { left: Dims, right: Dims },
    #[error("invalid mixer weights: {0}")]
    InvalidWeights(String),
    #[error("fixture parse error: {0}")]
    Parse(String),
}

/// Shape of a [`FeatureMap`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dims {
    pub t: usize,
    pub c: usize,
    pub h: usize,
    pub w: usize,
}

impl Dims {
    pub const fn new(t: usize, c: usize, h: usize, w: usize) -> Self {
        Self { t, c, h, w }
    }

    pub fn len(&self) -> usize {
        self.t * self.c * self.h * self.w
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl fmt::Display for Dims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}x{}x{}", self.t, self.c, self.h, self.w)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMap {
    dims: Dims,
    values: Vec<f64>,
}

impl FeatureMap {
    pub fn new(dims: Dims, values: Vec<f64>) -> Result<Self, GridError> {
        if dims.t == 0 || dims.c == 0 || dims.h == 0 || dims.w == 0 {
            return Err(GridError::ZeroDim(dims));
        }
        if values.len() != dims.len() {
            return Err(GridError::ValueCount {
                dims,
                expected: dims.len(),
                got: values.len(),
            });
        }
        Ok(Self { dims, values })
    }

    pub fn zeros(dims: Dims) -> Result<Self, GridError> {
        Self::new(dims, vec![0.0; dims.len()])
    }

    pub fn filled(dims: Dims, value: f64) -> Result<Self, GridError> {
        Self::new(dims, vec![value; dims.len()])
    }

    /// Builds a map by evaluating `f(t, c, i, j)` at every cell.
    pub fn from_fn<F>(dims: Dims, mut f: F) -> Result<Self, GridError>
    where
        F: FnMut(usize, usize, usize, usize) -> f64,
    {
        let mut values = Vec::with_capacity(dims.len());
        for t in 0..dims.t {
            for c in 0..dims.c {
                for i in 0..dims.h {
                    for j in 0..dims.w {
                        values.push(f(t, c, i, j));
                    }
                }
            }
        }
        Self::new(dims, values)
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    fn offset(&self, t: usize, c: usize, i: usize, j: usize) -> usize {
        let d = self.dims;
        ((t * d.c + c) * d.h + i) * d.w + j
    }

    #[inline]
    pub fn get(&self, t: usize, c: usize, i: usize, j: usize) -> f64 {
        self.values[self.offset(t, c, i, j)]
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Parses the text fixture format: a `t c h w` header line followed by
    /// `t*c*h*w` whitespace-separated values in row-major order.
    pub fn parse_fixture(text: &str) -> Result<Self, GridError> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| GridError::Parse("missing header line".into()))?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|s| {
                s.parse::<usize>()
                    .map_err(|e| GridError::Parse(format!("bad dimension {s:?}: {e}")))
            })
            .collect::<Result<_, _>>()?;
        let [t, c, h, w] = dims[..] else {
            return Err(GridError::Parse(format!("header must have 4 dims, got {}", dims.len())));
        };
        let values = lines
            .flat_map(str::split_whitespace)
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|e| GridError::Parse(format!("bad value {s:?}: {e}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(Dims::new(t, c, h, w), values)
    }

    /// Writes the fixture format, one `w`-length row per line.
    pub fn to_fixture(&self) -> String {
        let d = self.dims;
        let mut out = format!("{} {} {} {}\n", d.t, d.c, d.h, d.w);
        for row in self.values.chunks(d.w) {
            let line: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }
}

impl FromStr for FeatureMap {
    type Err = GridError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse_fixture(s)
    }
}

/// Weights of the 1x1 channel mixer plus the inference-mode batch-norm that
/// follows the residual add.
#[derive(Debug, Clone, PartialEq)]
pub struct MixerWeights {
    c_in: usize,
    c_out: usize,
    /// `c_out x c_in`, row-major.
    weight: Vec<f64>,
    bias: Vec<f64>,
    pub bn_scale: Vec<f64>,
    pub bn_shift: Vec<f64>,
    pub bn_mean: Vec<f64>,
    pub bn_var: Vec<f64>,
}

impl MixerWeights {
    pub fn new(c_out: usize, c_in: usize, weight: Vec<f64>, bias: Vec<f64>) -> Result<Self, GridError> {
        if c_out == 0 || c_in == 0 {
            return Err(GridError::InvalidWeights("zero channel count".into()));
        }
        if weight.len() != c_out * c_in {
            return Err(GridError::InvalidWeights(format!(
                "weight has {} entries, expected {}",
                weight.len(),
                c_out * c_in
            )));
        }
        if bias.len() != c_out {
            return Err(GridError::InvalidWeights(format!(
                "bias has {} entries, expected {c_out}",
                bias.len()
            )));
        }
        Ok(Self {
            c_in,
            c_out,
            weight,
            bias,
            bn_scale: vec![1.0; c_out],
            bn_shift: vec![0.0; c_out],
            bn_mean: vec![0.0; c_out],
            bn_var: vec![1.0; c_out],
        })
    }

    /// All-zero mixer with identity batch-norm.
    pub fn zeros(c_out: usize, c_in: usize) -> Result<Self, GridError> {
        Self::new(c_out, c_in, vec![0.0; c_out * c_in], vec![0.0; c_out])
    }

    /// Square identity mixer, zero bias.
    pub fn identity(c: usize) -> Result<Self, GridError> {
        let mut weight = vec![0.0; c * c];
        for k in 0..c {
            weight[k * c + k] = 1.0;
        }
        Self::new(c, c, weight, vec![0.0; c])
    }

    /// Replaces the batch-norm statistics. Variances must be strictly positive.
    pub fn with_batch_norm(
        mut self,
        scale: Vec<f64>,
        shift: Vec<f64>,
        mean: Vec<f64>,
        var: Vec<f64>,
    ) -> Result<Self, GridError> {
        for (name, v) in [("scale", &scale), ("shift", &shift), ("mean", &mean), ("var", &var)] {
            if v.len() != self.c_out {
                return Err(GridError::InvalidWeights(format!(
                    "bn_{name} has {} entries, expected {}",
                    v.len(),
                    self.c_out
                )));
            }
        }
        if let Some(bad) = var.iter().find(|v| !(**v > 0.0)) {
            return Err(GridError::InvalidWeights(format!(
                "bn_var entries must be > 0, got {bad}"
            )));
        }
        self.bn_scale = scale;
        self.bn_shift = shift;
        self.bn_mean = mean;
        self.bn_var = var;
        Ok(self)
    }

    pub fn c_in(&self) -> usize {
        self.c_in
    }

    pub fn c_out(&self) -> usize {
        self.c_out
    }

    pub fn weight(&self, k: usize, c: usize) -> f64 {
        self.weight[k * self.c_in + c]
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    fn batch_norm(&self, k: usize, x: f64) -> f64 {
        self.bn_scale[k] * (x - self.bn_mean[k]) / self.bn_var[k].sqrt() + self.bn_shift[k]
    }
}

/// Nearest-neighbour resize of the spatial dims. Output cell `(i, j)` copies
/// source cell `(floor(i*h/new_h), floor(j*w/new_w))`.
pub fn resize_nearest(m: &FeatureMap, new_h: usize, new_w: usize) -> Result<FeatureMap, GridError> {
    let d = m.dims();
    let out = Dims::new(d.t, d.c, new_h, new_w);
    if new_h == 0 || new_w == 0 {
        return Err(GridError::ZeroDim(out));
    }
    let rows: Vec<usize> = (0..new_h).map(|i| i * d.h / new_h).collect();
    let cols: Vec<usize> = (0..new_w).map(|j| j * d.w / new_w).collect();
    FeatureMap::from_fn(out, |t, c, i, j| m.get(t, c, rows[i], cols[j]))
}

/// Places `m` inside a zero `target_h x target_w` canvas with its top-left
/// cell at `(off_y, off_x)`. Parts landing outside the canvas are dropped.
pub fn zero_pad_place(
    m: &FeatureMap,
    target_h: usize,
    target_w: usize,
    off_y: i64,
    off_x: i64,
) -> Result<FeatureMap, GridError> {
    let d = m.dims();
    let out_dims = Dims::new(d.t, d.c, target_h, target_w);
    let mut out = FeatureMap::zeros(out_dims)?;

    // Intersection of the placed rectangle with the canvas, in canvas coords.
    let row_lo = off_y.max(0);
    let row_hi = (off_y + d.h as i64).min(target_h as i64);
    let col_lo = off_x.max(0);
    let col_hi = (off_x + d.w as i64).min(target_w as i64);
    if row_lo >= row_hi || col_lo >= col_hi {
        return Ok(out);
    }
    for t in 0..d.t {
        for c in 0..d.c {
            for i in row_lo..row_hi {
                let src_i = (i - off_y) as usize;
                for j in col_lo..col_hi {
                    let src_j = (j - off_x) as usize;
                    let dst = out.offset(t, c, i as usize, j as usize);
                    out.values[dst] = m.get(t, c, src_i, src_j);
                }
            }
        }
    }
    Ok(out)
}

/// Stacks maps along the channel axis, in input order.
pub fn concat_channels(ms: &[&FeatureMap]) -> Result<FeatureMap, GridError> {
    let first = ms.first().ok_or(GridError::EmptyConcat)?.dims();
    for (index, m) in ms.iter().enumerate() {
        let d = m.dims();
        if d.t != first.t || d.h != first.h || d.w != first.w {
            return Err(GridError::ConcatMismatch {
                index,
                got: d,
                t: first.t,
                h: first.h,
                w: first.w,
            });
        }
    }
    let c_total: usize = ms.iter().map(|m| m.dims().c).sum();
    let plane = first.h * first.w;
    let mut values = Vec::with_capacity(first.t * c_total * plane);
    for t in 0..first.t {
        for m in ms {
            let c = m.dims().c;
            let start = t * c * plane;
            values.extend_from_slice(&m.values()[start..start + c * plane]);
        }
    }
    FeatureMap::new(Dims::new(first.t, c_total, first.h, first.w), values)
}

/// 1x1 convolution: `out(t,k,i,j) = sum_c weight[k,c] * m(t,c,i,j) + bias[k]`.
pub fn mix_1x1(m: &FeatureMap, w: &MixerWeights) -> Result<FeatureMap, GridError> {
    let d = m.dims();
    if d.c != w.c_in() {
        return Err(GridError::ChannelMismatch {
            expected: w.c_in(),
            got: d.c,
        });
    }
    let plane = d.h * d.w;
    let out_dims = Dims::new(d.t, w.c_out(), d.h, d.w);
    let mut values = vec![0.0; out_dims.len()];
    for t in 0..d.t {
        let src = &m.values()[t * d.c * plane..(t + 1) * d.c * plane];
        let dst = &mut values[t * w.c_out() * plane..(t + 1) * w.c_out() * plane];
        for k in 0..w.c_out() {
            let out_plane = &mut dst[k * plane..(k + 1) * plane];
            out_plane.fill(w.bias()[k]);
            for c in 0..d.c {
                let wk = w.weight(k, c);
                if wk == 0.0 {
                    continue;
                }
                let in_plane = &src[c * plane..(c + 1) * plane];
                for (o, x) in out_plane.iter_mut().zip(in_plane) {
                    *o += wk * x;
                }
            }
        }
    }
    FeatureMap::new(out_dims, values)
}

/// `bn(base + enhancement)`; the activation in between is the identity.
pub fn residual_norm(base: &FeatureMap, enhancement: &FeatureMap, w: &MixerWeights) -> Result<FeatureMap, GridError> {
    let d = base.dims();
    if d != enhancement.dims() {
        return Err(GridError::ShapeMismatch {
            left: d,
            right: enhancement.dims(),
        });
    }
    if d.c != w.c_out() {
        return Err(GridError::ChannelMismatch {
            expected: w.c_out(),
            got: d.c,
        });
    }
    let plane = d.h * d.w;
    let values = base
        .values()
        .iter()
        .zip(enhancement.values())
        .enumerate()
        .map(|(idx, (b, e))| {
            let k = (idx / plane) % d.c;
            w.batch_norm(k, b + e)
        })
        .collect();
    FeatureMap::new(d, values)
}

/// Batch-norm alone, as applied by [`residual_norm`] with a zero enhancement.
pub fn batch_norm(m: &FeatureMap, w: &MixerWeights) -> Result<FeatureMap, GridError> {
    let zero = FeatureMap::zeros(m.dims())?;
    residual_norm(m, &zero, w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn map(dims: Dims, values: &[f64]) -> FeatureMap {
        FeatureMap::new(dims, values.to_vec()).unwrap()
    }

    #[test]
    fn rejects_zero_dims_and_bad_counts() {
        assert!(matches!(
            FeatureMap::new(Dims::new(1, 0, 2, 2), vec![]),
            Err(GridError::ZeroDim(_))
        ));
        assert!(matches!(
            FeatureMap::new(Dims::new(1, 1, 2, 2), vec![0.0; 3]),
            Err(GridError::ValueCount { .. })
        ));
    }

    #[test]
    fn upsample_duplicates_blocks() {
        let m = map(Dims::new(1, 1, 2, 2), &[1.0, 2.0, 3.0, 4.0]);
        let r = resize_nearest(&m, 4, 4).unwrap();
        #[rustfmt::skip]
        let expected = [
            1.0, 1.0, 2.0, 2.0,
            1.0, 1.0, 2.0, 2.0,
            3.0, 3.0, 4.0, 4.0,
            3.0, 3.0, 4.0, 4.0,
        ];
        assert_eq!(r.values(), &expected);
    }

    #[test]
    fn resize_constant_14_to_20() {
        let m = FeatureMap::filled(Dims::new(1, 1, 14, 14), 5.0).unwrap();
        let r = resize_nearest(&m, 20, 20).unwrap();
        assert_eq!(r.dims(), Dims::new(1, 1, 20, 20));
        assert!(r.values().iter().all(|v| *v == 5.0));
    }

    #[test]
    fn resize_rejects_zero_target() {
        let m = FeatureMap::filled(Dims::new(1, 1, 2, 2), 1.0).unwrap();
        assert!(resize_nearest(&m, 0, 3).is_err());
    }

    #[test]
    fn place_interior_and_truncated() {
        let ones = FeatureMap::filled(Dims::new(1, 1, 2, 2), 1.0).unwrap();
        let p = zero_pad_place(&ones, 4, 4, 1, 1).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let inside = (1..=2).contains(&i) && (1..=2).contains(&j);
                assert_eq!(p.get(0, 0, i, j), if inside { 1.0 } else { 0.0 });
            }
        }
        let p = zero_pad_place(&ones, 4, 4, 3, 3).unwrap();
        assert_eq!(p.sum(), 1.0);
        assert_eq!(p.get(0, 0, 3, 3), 1.0);

        let p = zero_pad_place(&ones, 4, 4, -5, 9).unwrap();
        assert_eq!(p.sum(), 0.0);

        let same = zero_pad_place(&ones, 2, 2, 0, 0).unwrap();
        assert_eq!(same, ones);
    }

    #[test]
    fn concat_orders_channels_and_reports_bad_map() {
        let a = FeatureMap::filled(Dims::new(1, 2, 3, 3), 1.0).unwrap();
        let b = FeatureMap::filled(Dims::new(1, 1, 3, 3), 2.0).unwrap();
        let cat = concat_channels(&[&a, &b]).unwrap();
        assert_eq!(cat.dims(), Dims::new(1, 3, 3, 3));
        assert_eq!(cat.get(0, 1, 2, 2), 1.0);
        assert_eq!(cat.get(0, 2, 0, 0), 2.0);
        assert_eq!(concat_channels(&[&a]).unwrap(), a);

        let bad = FeatureMap::filled(Dims::new(1, 1, 4, 3), 0.0).unwrap();
        let err = concat_channels(&[&a, &b, &bad]).unwrap_err();
        assert!(matches!(err, GridError::ConcatMismatch { index: 2, .. }));
        assert!(err.to_string().contains("map 2"));
    }

    #[test]
    fn concat_full_sized_maps() {
        let m = FeatureMap::zeros(Dims::new(1, 256, 56, 56)).unwrap();
        let cat = concat_channels(&[&m, &m, &m]).unwrap();
        assert_eq!(cat.dims(), Dims::new(1, 768, 56, 56));
    }

    #[test]
    fn concat_interleaves_per_frame() {
        let a = FeatureMap::from_fn(Dims::new(2, 1, 1, 1), |t, _, _, _| t as f64).unwrap();
        let b = FeatureMap::from_fn(Dims::new(2, 1, 1, 1), |t, _, _, _| 10.0 + t as f64).unwrap();
        let cat = concat_channels(&[&a, &b]).unwrap();
        assert_eq!(cat.values(), &[0.0, 10.0, 1.0, 11.0]);
    }

    #[test]
    fn mix_dot_product() {
        let m = map(Dims::new(1, 2, 1, 1), &[3.0, 4.0]);
        let w = MixerWeights::new(2, 2, vec![1.0, 1.0, 1.0, -1.0], vec![0.0, 0.0]).unwrap();
        assert_eq!(mix_1x1(&m, &w).unwrap().values(), &[7.0, -1.0]);

        let z = MixerWeights::zeros(2, 2).unwrap();
        assert_eq!(mix_1x1(&m, &z).unwrap().values(), &[0.0, 0.0]);

        let id = MixerWeights::identity(2).unwrap();
        assert_eq!(mix_1x1(&m, &id).unwrap(), m);

        let wrong = MixerWeights::zeros(2, 3).unwrap();
        assert!(matches!(
            mix_1x1(&m, &wrong),
            Err(GridError::ChannelMismatch { expected: 3, got: 2 })
        ));
    }

    #[test]
    fn residual_norm_arithmetic() {
        let base = map(Dims::new(1, 1, 1, 1), &[2.0]);
        let enh = map(Dims::new(1, 1, 1, 1), &[1.0]);
        let w = MixerWeights::zeros(1, 1)
            .unwrap()
            .with_batch_norm(vec![2.0], vec![1.0], vec![3.0], vec![1.0])
            .unwrap();
        assert_eq!(residual_norm(&base, &enh, &w).unwrap().values(), &[1.0]);

        let id = MixerWeights::zeros(1, 1).unwrap();
        let zero = FeatureMap::zeros(base.dims()).unwrap();
        assert_eq!(residual_norm(&base, &zero, &id).unwrap(), base);
        assert_eq!(residual_norm(&zero, &enh, &id).unwrap(), enh);

        let other = FeatureMap::zeros(Dims::new(1, 1, 2, 1)).unwrap();
        assert!(residual_norm(&base, &other, &id).is_err());
    }

    #[test]
    fn rejects_nonpositive_variance() {
        let w = MixerWeights::zeros(1, 1).unwrap();
        assert!(w.with_batch_norm(vec![1.0], vec![0.0], vec![0.0], vec![0.0]).is_err());
    }

    #[test]
    fn fixture_round_trip() {
        let text = "1 2 2 2\n1 2\n3 4\n5 6\n7 8.5\n";
        let m: FeatureMap = text.parse().unwrap();
        assert_eq!(m.dims(), Dims::new(1, 2, 2, 2));
        assert_eq!(m.get(0, 1, 1, 1), 8.5);
        assert_eq!(FeatureMap::parse_fixture(&m.to_fixture()).unwrap(), m);
        assert!(FeatureMap::parse_fixture("1 1 2\n1 2").is_err());
        assert!(FeatureMap::parse_fixture("1 1 1 2\n1").is_err());
    }

    fn arb_map(max_t: usize, max_c: usize, max_hw: usize) -> impl Strategy<Value = FeatureMap> {
        (1..=max_t, 1..=max_c, 1..=max_hw, 1..=max_hw).prop_flat_map(|(t, c, h, w)| {
            proptest::collection::vec(-10.0f64..10.0, t * c * h * w)
                .prop_map(move |v| FeatureMap::new(Dims::new(t, c, h, w), v).unwrap())
        })
    }

    proptest! {
        #[test]
        fn resize_to_own_dims_is_identity(m in arb_map(2, 3, 6)) {
            let d = m.dims();
            prop_assert_eq!(resize_nearest(&m, d.h, d.w).unwrap(), m);
        }

        #[test]
        fn upsample_then_downsample_block_constant(m in arb_map(2, 2, 5), k in 1usize..4) {
            let d = m.dims();
            let up = resize_nearest(&m, d.h * k, d.w * k).unwrap();
            prop_assert_eq!(resize_nearest(&up, d.h, d.w).unwrap(), m);
        }

        #[test]
        fn in_bounds_placement_conserves_mass(
            m in arb_map(2, 2, 4), extra_h in 0usize..4, extra_w in 0usize..4,
            fy in 0.0f64..1.0, fx in 0.0f64..1.0,
        ) {
            let d = m.dims();
            let (th, tw) = (d.h + extra_h, d.w + extra_w);
            let oy = (fy * (extra_h as f64 + 1.0)).floor().min(extra_h as f64) as i64;
            let ox = (fx * (extra_w as f64 + 1.0)).floor().min(extra_w as f64) as i64;
            let p = zero_pad_place(&m, th, tw, oy, ox).unwrap();
            prop_assert!((p.sum() - m.sum()).abs() < 1e-9);
            for t in 0..d.t { for c in 0..d.c { for i in 0..th { for j in 0..tw {
                let inside = (i as i64) >= oy && (i as i64) < oy + d.h as i64
                    && (j as i64) >= ox && (j as i64) < ox + d.w as i64;
                if !inside { prop_assert_eq!(p.get(t, c, i, j), 0.0); }
            }}}}
        }

        #[test]
        fn mix_is_linear_without_bias(
            pair in (1usize..3, 1usize..4, 1usize..4, 1usize..4, 1usize..4).prop_flat_map(|(t, c, h, w, k)| {
                let n = t * c * h * w;
                (
                    proptest::collection::vec(-5.0f64..5.0, n),
                    proptest::collection::vec(-5.0f64..5.0, n),
                    proptest::collection::vec(-2.0f64..2.0, k * c),
                    Just((t, c, h, w, k)),
                )
            }),
            a in -3.0f64..3.0, b in -3.0f64..3.0,
        ) {
            let (xv, yv, wv, (t, c, h, w, k)) = pair;
            let d = Dims::new(t, c, h, w);
            let x = FeatureMap::new(d, xv.clone()).unwrap();
            let y = FeatureMap::new(d, yv.clone()).unwrap();
            let combo = FeatureMap::new(d, xv.iter().zip(&yv).map(|(p, q)| a * p + b * q).collect()).unwrap();
            let weights = MixerWeights::new(k, c, wv, vec![0.0; k]).unwrap();
            let lhs = mix_1x1(&combo, &weights).unwrap();
            let mx = mix_1x1(&x, &weights).unwrap();
            let my = mix_1x1(&y, &weights).unwrap();
            for ((l, p), q) in lhs.values().iter().zip(mx.values()).zip(my.values()) {
                prop_assert!((l - (a * p + b * q)).abs() < 1e-9);
            }
        }
    }
}
