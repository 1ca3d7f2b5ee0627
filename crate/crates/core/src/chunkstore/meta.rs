use serde_json::{json, Value};

use super::{ArrayHandle, StoreError, StoreRegistry};

/// Element types understood by the reader.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DType {
    U8,
    U16,
    I32,
    F32,
    F64,
}

impl DType {
    pub fn size(self) -> usize {
        match self {
            DType::U8 => 1,
            DType::U16 => 2,
            DType::I32 | DType::F32 => 4,
            DType::F64 => 8,
        }
    }

    /// Zarr v3 `data_type` name.
    pub fn zarr_name(self) -> &'static str {
        match self {
            DType::U8 => "uint8",
            DType::U16 => "uint16",
            DType::I32 => "int32",
            DType::F32 => "float32",
            DType::F64 => "float64",
        }
    }

    pub fn from_zarr_name(name: &str) -> Option<Self> {
        Some(match name {
            "uint8" => DType::U8,
            "uint16" => DType::U16,
            "int32" => DType::I32,
            "float32" => DType::F32,
            "float64" => DType::F64,
            _ => return None,
        })
    }

    pub fn is_float(self) -> bool {
        matches!(self, DType::F32 | DType::F64)
    }
}

/// Shape, chunking and element type of a stored array. Layout is always
/// C-order little-endian.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ArrayMeta {
    pub shape: Vec<u64>,
    pub chunk_shape: Vec<u64>,
    pub dtype: DType,
}

impl ArrayMeta {
    pub fn new(shape: Vec<u64>, chunk_shape: Vec<u64>, dtype: DType) -> Result<Self, String> {
        if shape.len() != chunk_shape.len() {
            return Err(format!(
                "shape has rank {} but chunk shape has rank {}",
                shape.len(),
                chunk_shape.len()
            ));
        }
        if chunk_shape.contains(&0) {
            return Err("chunk dimensions must be >= 1".into());
        }
        Ok(Self {
            shape,
            chunk_shape,
            dtype,
        })
    }

    pub fn rank(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> u64 {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Number of chunks along each dimension.
    pub fn grid_shape(&self) -> Vec<u64> {
        self.shape
            .iter()
            .zip(&self.chunk_shape)
            .map(|(&s, &c)| s.div_ceil(c))
            .collect()
    }

    /// Byte length of one (full-size) chunk payload.
    pub fn chunk_byte_len(&self) -> usize {
        self.chunk_shape.iter().product::<u64>() as usize * self.dtype.size()
    }
}

/// Renders Zarr v3 array metadata for an uncompressed array.
pub fn encode_array_metadata(shape: &[u64], chunk_shape: &[u64], dtype: DType) -> String {
    let doc = json!({
        "zarr_format": 3,
        "node_type": "array",
        "shape": shape,
        "data_type": dtype.zarr_name(),
        "chunk_grid": {"name": "regular", "configuration": {"chunk_shape": chunk_shape}},
        "chunk_key_encoding": {"name": "default", "configuration": {"separator": "/"}},
        "fill_value": 0,
        "codecs": [{"name": "bytes", "configuration": {"endian": "little"}}],
    });
    serde_json::to_string_pretty(&doc).expect("static json")
}

fn shape_field(doc: &Value, field: &str, key: &str) -> Result<Vec<u64>, StoreError> {
    let invalid = |reason: String| StoreError::InvalidMetadata {
        key: key.into(),
        reason,
    };
    doc.as_array()
        .ok_or_else(|| invalid(format!("{field} must be an array of integers")))?
        .iter()
        .map(|v| {
            v.as_u64()
                .ok_or_else(|| invalid(format!("{field} entries must be non-negative integers")))
        })
        .collect()
}

/// Parses `zarr.json` content. `key` is only used for error messages.
pub fn parse_array_metadata(bytes: &[u8], key: &str) -> Result<ArrayMeta, StoreError> {
    let invalid = |reason: String| StoreError::InvalidMetadata {
        key: key.into(),
        reason,
    };
    let unsupported = |reason: String| StoreError::Unsupported {
        key: key.into(),
        reason,
    };
    let doc: Value = serde_json::from_slice(bytes).map_err(|e| invalid(e.to_string()))?;
    match doc.get("zarr_format").and_then(Value::as_u64) {
        Some(3) => {}
        Some(v) => return Err(unsupported(format!("zarr_format {v} (only 3 is supported)"))),
        None => return Err(invalid("missing zarr_format".into())),
    }
    if let Some(node) = doc.get("node_type").and_then(Value::as_str) {
        if node != "array" {
            return Err(invalid(format!("node_type is {node:?}, expected \"array\"")));
        }
    }
    let shape = shape_field(
        doc.get("shape").ok_or_else(|| invalid("missing shape".into()))?,
        "shape",
        key,
    )?;

    let dtype_name = doc
        .get("data_type")
        .and_then(Value::as_str)
        .ok_or_else(|| invalid("missing data_type".into()))?;
    let dtype = DType::from_zarr_name(dtype_name).ok_or_else(|| unsupported(format!("data_type {dtype_name:?}")))?;

    let grid = doc
        .get("chunk_grid")
        .ok_or_else(|| invalid("missing chunk_grid".into()))?;
    match grid.get("name").and_then(Value::as_str) {
        Some("regular") => {}
        other => return Err(unsupported(format!("chunk_grid {:?}", other.unwrap_or("?")))),
    }
    let chunk_shape = shape_field(
        grid.pointer("/configuration/chunk_shape")
            .ok_or_else(|| invalid("missing chunk_grid.configuration.chunk_shape".into()))?,
        "chunk_shape",
        key,
    )?;

    if let Some(enc) = doc.get("chunk_key_encoding") {
        match enc.get("name").and_then(Value::as_str) {
            Some("default") => {}
            other => return Err(unsupported(format!("chunk_key_encoding {:?}", other.unwrap_or("?")))),
        }
        if let Some(sep) = enc.pointer("/configuration/separator") {
            if sep.as_str() != Some("/") {
                return Err(unsupported(format!("chunk key separator {sep}")));
            }
        }
    }

    let codecs = doc
        .get("codecs")
        .and_then(Value::as_array)
        .ok_or_else(|| invalid("missing codecs".into()))?;
    let names: Vec<&str> = codecs
        .iter()
        .map(|c| c.get("name").and_then(Value::as_str).unwrap_or("?"))
        .collect();
    if names != ["bytes"] {
        let extra: Vec<&str> = names.iter().copied().filter(|n| *n != "bytes").collect();
        return Err(unsupported(format!(
            "codec pipeline {names:?}; only a single uncompressed \"bytes\" codec is supported (found {extra:?})"
        )));
    }
    match codecs[0].pointer("/configuration/endian").and_then(Value::as_str) {
        Some("little") => {}
        None if dtype.size() == 1 => {}
        Some(e) => return Err(unsupported(format!("{e} endian"))),
        None => return Err(invalid("bytes codec is missing endian".into())),
    }

    ArrayMeta::new(shape, chunk_shape, dtype).map_err(invalid)
}

/// Reads and parses `<path>/zarr.json`.
pub fn open_array(registry: &StoreRegistry, handle: &ArrayHandle) -> Result<ArrayMeta, StoreError> {
    let key = handle.key("zarr.json");
    let bytes = registry.fetch(&handle.store, &key)?;
    parse_array_metadata(&bytes, &key)
}
