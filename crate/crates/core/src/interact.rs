//! Hit testing for clicks and hover tooltips.
//!
//! Picking runs on the CPU against a uniform screen-space grid so results
//! are identical on every host, independent of the raster backend.

use thiserror::Error;

use crate::chunkstore::{open_array, read_region, ArrayHandle, StoreError, StoreRegistry};
use crate::geom::Point;

#[derive(Debug, Clone, PartialEq)]
pub struct PickResult {
    pub layer_id: String,
    pub datum_index: usize,
    pub world_pos: Point,
    pub distance_px: f64,
}

#[derive(Debug, Clone, PartialEq)]
struct Entry {
    datum_index: usize,
    center: Point,
    world: Point,
}

/// Uniform grid over the viewport with cell size `2 * radius_px`. Each datum
/// is listed in every cell its disc overlaps; discs that miss the grid
/// entirely go to an overflow list that every query scans.
#[derive(Debug, Clone)]
pub struct PickIndex {
    layer_id: String,
    radius_px: f64,
    cell_size: f64,
    cols: usize,
    rows: usize,
    cells: Vec<Vec<u32>>,
    outside: Vec<u32>,
    entries: Vec<Entry>,
}

impl PickIndex {
    pub fn new(layer_id: impl Into<String>, width_px: u32, height_px: u32, radius_px: f64) -> Self {
        let radius_px = if radius_px.is_finite() { radius_px.max(0.0) } else { 0.0 };
        let cell_size = if radius_px > 0.0 { 2.0 * radius_px } else { 1.0 };
        let cols = ((width_px.max(1) as f64 / cell_size).ceil() as usize).max(1);
        let rows = ((height_px.max(1) as f64 / cell_size).ceil() as usize).max(1);
        Self {
            layer_id: layer_id.into(),
            radius_px,
            cell_size,
            cols,
            rows,
            cells: vec![Vec::new(); cols * rows],
            outside: Vec::new(),
            entries: Vec::new(),
        }
    }

    pub fn layer_id(&self) -> &str {
        &self.layer_id
    }

    pub fn radius_px(&self) -> f64 {
        self.radius_px
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    /// `(cols, rows)`.
    pub fn grid_dims(&self) -> (usize, usize) {
        (self.cols, self.rows)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Datum indices listed in cell `(col, row)`.
    pub fn cell_members(&self, col: usize, row: usize) -> Vec<usize> {
        self.cells[row * self.cols + col]
            .iter()
            .map(|&e| self.entries[e as usize].datum_index)
            .collect()
    }

    pub fn outside_members(&self) -> Vec<usize> {
        self.outside
            .iter()
            .map(|&e| self.entries[e as usize].datum_index)
            .collect()
    }

    /// Cells whose closed extent meets `[lo, hi]` along one axis, clamped
    /// to the grid. A `lo` on a cell boundary includes the cell ending there.
    fn cell_range(&self, lo: f64, hi: f64, n: usize) -> (usize, usize) {
        let last = (n - 1) as f64;
        let first = ((lo / self.cell_size).ceil() - 1.0).clamp(0.0, last) as usize;
        let end = (hi / self.cell_size).floor().clamp(0.0, last) as usize;
        (first, end.max(first))
    }

    fn cell_distance2(&self, col: usize, row: usize, p: Point) -> f64 {
        let (x0, y0) = (col as f64 * self.cell_size, row as f64 * self.cell_size);
        let dx = (x0 - p.x).max(0.0).max(p.x - (x0 + self.cell_size));
        let dy = (y0 - p.y).max(0.0).max(p.y - (y0 + self.cell_size));
        dx * dx + dy * dy
    }

    pub fn insert(&mut self, datum_index: usize, center: Point, world: Point) {
        if !center.is_finite() {
            return;
        }
        let id = self.entries.len() as u32;
        self.entries.push(Entry {
            datum_index,
            center,
            world,
        });
        let r = self.radius_px;
        let (c0, c1) = self.cell_range(center.x - r, center.x + r, self.cols);
        let (r0, r1) = self.cell_range(center.y - r, center.y + r, self.rows);
        let mut placed = false;
        for row in r0..=r1 {
            for col in c0..=c1 {
                if self.cell_distance2(col, row, center) <= r * r {
                    self.cells[row * self.cols + col].push(id);
                    placed = true;
                }
            }
        }
        if !placed {
            self.outside.push(id);
        }
    }

    /// Nearest datum within `max(max_dist_px, radius)` of `cursor`; exact
    /// distance ties go to the larger datum index (drawn last, on top).
    pub fn pick(&self, cursor: Point, max_dist_px: f64) -> Option<PickResult> {
        if !cursor.is_finite() {
            return None;
        }
        let reach = max_dist_px.max(self.radius_px);
        let entries = &self.entries;
        let mut best: Option<(f64, usize)> = None;
        let mut consider = |id: u32| {
            let id = id as usize;
            let e = &entries[id];
            let d = e.center.distance(cursor);
            if d > reach {
                return;
            }
            let better = match best {
                None => true,
                Some((bd, b)) => d < bd || (d == bd && e.datum_index > entries[b].datum_index),
            };
            if better {
                best = Some((d, id));
            }
        };
        // Scanning the clamped range is complete: a listed datum within reach
        // is listed in the cell holding its nearest grid point, and that cell
        // falls inside the clamped range around the cursor.
        let (c0, c1) = self.cell_range(cursor.x - reach, cursor.x + reach, self.cols);
        let (r0, r1) = self.cell_range(cursor.y - reach, cursor.y + reach, self.rows);
        for row in r0..=r1 {
            for col in c0..=c1 {
                for &e in &self.cells[row * self.cols + col] {
                    consider(e);
                }
            }
        }
        for &e in &self.outside {
            consider(e);
        }
        best.map(|(d, id)| (d, &self.entries[id])).map(|(d, e)| PickResult {
            layer_id: self.layer_id.clone(),
            datum_index: e.datum_index,
            world_pos: e.world,
            distance_px: d,
        })
    }
}

/// Index over `points` (screen px), with datum index = position in the
/// slice and world position = screen position.
pub fn build_pick_index(points: &[Point], radius_px: f64, width_px: u32, height_px: u32) -> PickIndex {
    let mut index = PickIndex::new("", width_px, height_px, radius_px);
    for (i, &p) in points.iter().enumerate() {
        index.insert(i, p, p);
    }
    index
}

pub fn pick(index: &PickIndex, cursor: Point, max_dist_px: f64) -> Option<PickResult> {
    index.pick(cursor, max_dist_px)
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TooltipError {
    #[error("datum {index} out of range for column {column:?} of length {len}")]
    IndexOutOfRange { column: String, index: usize, len: u64 },
    #[error("column {column:?} must be 1-D, got rank {rank}")]
    NotOneDimensional { column: String, rank: usize },
    #[error("column {column:?}: {source}")]
    Store {
        column: String,
        #[source]
        source: StoreError,
    },
}

/// Reads element `result.datum_index` of each column (one single-element
/// partial read per column) and formats it for display.
pub fn tooltip_payload(
    result: &PickResult,
    columns: &[(String, ArrayHandle)],
    registry: &StoreRegistry,
) -> Result<Vec<(String, String)>, TooltipError> {
    columns
        .iter()
        .map(|(name, handle)| {
            let store_err = |source| TooltipError::Store {
                column: name.clone(),
                source,
            };
            let meta = open_array(registry, handle).map_err(store_err)?;
            if meta.rank() != 1 {
                return Err(TooltipError::NotOneDimensional {
                    column: name.clone(),
                    rank: meta.rank(),
                });
            }
            let index = result.datum_index as u64;
            if index >= meta.shape[0] {
                return Err(TooltipError::IndexOutOfRange {
                    column: name.clone(),
                    index: result.datum_index,
                    len: meta.shape[0],
                });
            }
            let data = read_region(registry, handle, &meta, &[index], &[1]).map_err(store_err)?;
            let value = data.get_f64(0).expect("single-element read");
            Ok((name.clone(), format_significant(value, 6)))
        })
        .collect()
}

/// Formats `v` with at most `digits` significant digits, trailing zeros
/// trimmed; scientific notation for very large or small magnitudes.
pub fn format_significant(v: f64, digits: usize) -> String {
    if v.is_nan() {
        return "NaN".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let digits = digits.max(1);
    let exp = v.abs().log10().floor() as i32;
    let trim = |s: String| -> String {
        if !s.contains('.') {
            return s;
        }
        let s = s.trim_end_matches('0');
        s.trim_end_matches('.').to_string()
    };
    if !(-5..15).contains(&exp) {
        let s = format!("{:.*e}", digits - 1, v);
        let (mantissa, e) = s.split_once('e').expect("exponent form");
        return format!("{}e{}", trim(mantissa.to_string()), e);
    }
    let decimals = digits as i32 - 1 - exp;
    if decimals < 0 {
        let step = 10f64.powi(-decimals);
        return format!("{:.0}", (v / step).round() * step);
    }
    let decimals = decimals as usize;
    trim(format!("{v:.decimals$}"))
}
