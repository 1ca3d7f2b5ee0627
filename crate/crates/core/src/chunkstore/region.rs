#[cfg(feature = "parallel")]
use rayon::prelude::*;

use super::{join_key, ArrayHandle, ArrayMeta, DType, StoreError, StoreRegistry};

/// Dense element buffer of one of the supported dtypes, C-order.
#[derive(Debug, Clone, PartialEq)]
pub enum ArrayData {
    U8(Vec<u8>),
    U16(Vec<u16>),
    I32(Vec<i32>),
    F32(Vec<f32>),
    F64(Vec<f64>),
}

impl ArrayData {
    pub fn dtype(&self) -> DType {
        match self {
            ArrayData::U8(_) => DType::U8,
            ArrayData::U16(_) => DType::U16,
            ArrayData::I32(_) => DType::I32,
            ArrayData::F32(_) => DType::F32,
            ArrayData::F64(_) => DType::F64,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            ArrayData::U8(v) => v.len(),
            ArrayData::U16(v) => v.len(),
            ArrayData::I32(v) => v.len(),
            ArrayData::F32(v) => v.len(),
            ArrayData::F64(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get_f64(&self, i: usize) -> Option<f64> {
        Some(match self {
            ArrayData::U8(v) => *v.get(i)? as f64,
            ArrayData::U16(v) => *v.get(i)? as f64,
            ArrayData::I32(v) => *v.get(i)? as f64,
            ArrayData::F32(v) => *v.get(i)? as f64,
            ArrayData::F64(v) => *v.get(i)?,
        })
    }

    /// Lossless widening to f64 (every supported dtype fits exactly).
    pub fn to_f64(&self) -> Vec<f64> {
        match self {
            ArrayData::U8(v) => v.iter().map(|&x| x as f64).collect(),
            ArrayData::U16(v) => v.iter().map(|&x| x as f64).collect(),
            ArrayData::I32(v) => v.iter().map(|&x| x as f64).collect(),
            ArrayData::F32(v) => v.iter().map(|&x| x as f64).collect(),
            ArrayData::F64(v) => v.clone(),
        }
    }

    pub fn from_le_bytes(dtype: DType, bytes: &[u8]) -> ArrayData {
        macro_rules! decode {
            ($t:ty, $n:expr) => {
                bytes
                    .chunks_exact($n)
                    .map(|c| <$t>::from_le_bytes(c.try_into().unwrap()))
                    .collect()
            };
        }
        match dtype {
            DType::U8 => ArrayData::U8(bytes.to_vec()),
            DType::U16 => ArrayData::U16(decode!(u16, 2)),
            DType::I32 => ArrayData::I32(decode!(i32, 4)),
            DType::F32 => ArrayData::F32(decode!(f32, 4)),
            DType::F64 => ArrayData::F64(decode!(f64, 8)),
        }
    }

    pub fn to_le_bytes(&self) -> Vec<u8> {
        match self {
            ArrayData::U8(v) => v.clone(),
            ArrayData::U16(v) => v.iter().flat_map(|x| x.to_le_bytes()).collect(),
            ArrayData::I32(v) => v.iter().flat_map(|x| x.to_le_bytes()).collect(),
            ArrayData::F32(v) => v.iter().flat_map(|x| x.to_le_bytes()).collect(),
            ArrayData::F64(v) => v.iter().flat_map(|x| x.to_le_bytes()).collect(),
        }
    }
}

/// Store key of the chunk at `coords` for the array rooted at `path`.
pub fn chunk_key(path: &str, coords: &[u64]) -> String {
    let mut key = String::from("c");
    for c in coords {
        key.push('/');
        key.push_str(&c.to_string());
    }
    join_key(path, &key)
}

fn check_region(meta: &ArrayMeta, offsets: &[u64], lengths: &[u64]) -> Result<(), StoreError> {
    if offsets.len() != meta.rank() || lengths.len() != meta.rank() {
        return Err(StoreError::OutOfBounds {
            reason: format!(
                "region rank ({}, {}) does not match array rank {}",
                offsets.len(),
                lengths.len(),
                meta.rank()
            ),
        });
    }
    for (i, ((&o, &l), &s)) in offsets.iter().zip(lengths).zip(&meta.shape).enumerate() {
        match o.checked_add(l) {
            Some(end) if end <= s => {}
            _ => {
                return Err(StoreError::OutOfBounds {
                    reason: format!("dimension {i}: [{o}, {o}+{l}) exceeds length {s}"),
                })
            }
        }
    }
    Ok(())
}

/// Grid coordinates of every chunk intersecting the half-open region
/// `[offsets, offsets + lengths)`, in C order.
pub fn chunks_for_region(meta: &ArrayMeta, offsets: &[u64], lengths: &[u64]) -> Result<Vec<Vec<u64>>, StoreError> {
    check_region(meta, offsets, lengths)?;
    if lengths.contains(&0) {
        return Ok(Vec::new());
    }
    let ranges: Vec<(u64, u64)> = offsets
        .iter()
        .zip(lengths)
        .zip(&meta.chunk_shape)
        .map(|((&o, &l), &c)| (o / c, (o + l - 1) / c))
        .collect();
    let mut out = Vec::new();
    let mut cur: Vec<u64> = ranges.iter().map(|r| r.0).collect();
    loop {
        out.push(cur.clone());
        let mut d = cur.len();
        loop {
            if d == 0 {
                return Ok(out);
            }
            d -= 1;
            if cur[d] < ranges[d].1 {
                cur[d] += 1;
                break;
            }
            cur[d] = ranges[d].0;
        }
    }
}

fn strides(shape: &[u64]) -> Vec<u64> {
    let mut s = vec![1u64; shape.len()];
    for i in (0..shape.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * shape[i + 1];
    }
    s
}

/// A C-order buffer whose element `[0, 0, ...]` sits at `origin` in array
/// coordinates.
struct BoxView<'a, T> {
    data: T,
    shape: &'a [u64],
    origin: &'a [u64],
}

/// Copies the array-coordinate box `[lo, hi)` from `src` to `dst`.
fn copy_box(src: BoxView<'_, &[u8]>, dst: BoxView<'_, &mut [u8]>, lo: &[u64], hi: &[u64], elem: usize) {
    let rank = lo.len();
    if rank == 0 {
        dst.data[..elem].copy_from_slice(&src.data[..elem]);
        return;
    }
    if lo.iter().zip(hi).any(|(l, h)| l >= h) {
        return;
    }
    let (ss, ds) = (strides(src.shape), strides(dst.shape));
    let run = (hi[rank - 1] - lo[rank - 1]) as usize * elem;
    let mut cur = lo.to_vec();
    loop {
        let si: u64 = (0..rank).map(|d| (cur[d] - src.origin[d]) * ss[d]).sum();
        let di: u64 = (0..rank).map(|d| (cur[d] - dst.origin[d]) * ds[d]).sum();
        let (si, di) = (si as usize * elem, di as usize * elem);
        dst.data[di..di + run].copy_from_slice(&src.data[si..si + run]);
        // Advance the outer dimensions; the last one is the contiguous run.
        let mut d = rank - 1;
        loop {
            if d == 0 {
                return;
            }
            d -= 1;
            cur[d] += 1;
            if cur[d] < hi[d] {
                break;
            }
            cur[d] = lo[d];
        }
    }
}

fn overlap(meta: &ArrayMeta, coords: &[u64], offsets: &[u64], lengths: &[u64]) -> (Vec<u64>, Vec<u64>, Vec<u64>) {
    let origin: Vec<u64> = coords.iter().zip(&meta.chunk_shape).map(|(i, c)| i * c).collect();
    let lo = origin.iter().zip(offsets).map(|(&a, &b)| a.max(b)).collect();
    let hi = origin
        .iter()
        .zip(&meta.chunk_shape)
        .zip(offsets.iter().zip(lengths))
        .map(|((&a, &c), (&o, &l))| (a + c).min(o + l))
        .collect();
    (origin, lo, hi)
}

fn fetch_chunk(
    registry: &StoreRegistry,
    handle: &ArrayHandle,
    meta: &ArrayMeta,
    coords: &[u64],
) -> Result<Vec<u8>, StoreError> {
    let key = chunk_key(&handle.path, coords);
    let bytes = registry.fetch(&handle.store, &key)?;
    let expected = meta.chunk_byte_len();
    if bytes.len() != expected {
        return Err(StoreError::CorruptChunk {
            key,
            expected,
            actual: bytes.len(),
        });
    }
    Ok(bytes)
}

/// Reads the region `[offsets, offsets + lengths)` of an opened array,
/// fetching exactly the chunks [`chunks_for_region`] names.
pub fn read_region(
    registry: &StoreRegistry,
    handle: &ArrayHandle,
    meta: &ArrayMeta,
    offsets: &[u64],
    lengths: &[u64],
) -> Result<ArrayData, StoreError> {
    let coords = chunks_for_region(meta, offsets, lengths)?;
    let elem = meta.dtype.size();
    let total: u64 = lengths.iter().product();
    let mut out = vec![0u8; total as usize * elem];

    #[cfg(feature = "parallel")]
    let fetched: Vec<Result<Vec<u8>, StoreError>> = coords
        .par_iter()
        .map(|c| fetch_chunk(registry, handle, meta, c))
        .collect();
    #[cfg(not(feature = "parallel"))]
    let fetched: Vec<Result<Vec<u8>, StoreError>> =
        coords.iter().map(|c| fetch_chunk(registry, handle, meta, c)).collect();

    for (c, bytes) in coords.iter().zip(fetched) {
        let bytes = bytes?;
        let (origin, lo, hi) = overlap(meta, c, offsets, lengths);
        copy_box(
            BoxView {
                data: &bytes,
                shape: &meta.chunk_shape,
                origin: &origin,
            },
            BoxView {
                data: &mut out,
                shape: lengths,
                origin: offsets,
            },
            &lo,
            &hi,
            elem,
        );
    }
    Ok(ArrayData::from_le_bytes(meta.dtype, &out))
}

/// Splits a whole array into full-size, zero-padded chunk payloads keyed
/// the way [`read_region`] expects.
pub fn encode_chunks(
    path: &str,
    shape: &[u64],
    chunk_shape: &[u64],
    data: &ArrayData,
) -> Result<Vec<(String, Vec<u8>)>, StoreError> {
    let meta = ArrayMeta::new(shape.to_vec(), chunk_shape.to_vec(), data.dtype()).map_err(|reason| {
        StoreError::InvalidMetadata {
            key: join_key(path, "zarr.json"),
            reason,
        }
    })?;
    if meta.len() != data.len() as u64 {
        return Err(StoreError::OutOfBounds {
            reason: format!("array data has {} elements, shape needs {}", data.len(), meta.len()),
        });
    }
    let bytes = data.to_le_bytes();
    let elem = meta.dtype.size();
    let zeros = vec![0u64; shape.len()];
    let all = chunks_for_region(&meta, &zeros, shape)?;
    Ok(all
        .into_iter()
        .map(|c| {
            let (origin, lo, hi) = overlap(&meta, &c, &zeros, shape);
            let mut chunk = vec![0u8; meta.chunk_byte_len()];
            copy_box(
                BoxView {
                    data: &bytes,
                    shape,
                    origin: &zeros,
                },
                BoxView {
                    data: &mut chunk,
                    shape: chunk_shape,
                    origin: &origin,
                },
                &lo,
                &hi,
                elem,
            );
            (chunk_key(path, &c), chunk)
        })
        .collect())
}
