//! Command-line and HTTP front ends over `pluot_core::Session`.

pub mod http;
pub mod sample_data;

use std::fmt;
use std::path::{Path, PathBuf};

use anyhow::Context;
use pluot_core::{EngineError, ErrorKind, OutputKind, PlotSpec, Session, SpecError};

/// Exit status for a successful render.
pub const EXIT_OK: u8 = 0;
/// Anything unexpected: I/O on the output file, encoder failures.
pub const EXIT_INTERNAL: u8 = 1;
/// The spec or the arguments are invalid.
pub const EXIT_INVALID: u8 = 2;
/// A store, array or chunk is missing or unreadable.
pub const EXIT_DATA: u8 = 3;

/// Bad command-line input that clap cannot catch, such as an unknown
/// output extension.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

/// Picks the output kind from the file extension.
pub fn output_kind_for(path: &Path) -> Result<OutputKind, UsageError> {
    match path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase)
        .as_deref()
    {
        Some("png") => Ok(OutputKind::Bitmap),
        Some("svg") => Ok(OutputKind::Vector),
        _ => Err(UsageError(format!(
            "cannot tell the output format of {}: use a .png or .svg extension",
            path.display()
        ))),
    }
}

pub fn load_spec(path: &Path) -> anyhow::Result<PlotSpec> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading spec {}", path.display()))?;
    let spec = PlotSpec::from_json(&text).map_err(EngineError::Spec)?;
    Ok(spec)
}

/// Renders `spec` to PNG or SVG bytes. Relative store roots resolve
/// against `base_dir`.
pub fn render_bytes(spec: &PlotSpec, kind: OutputKind, base_dir: &Path) -> Result<Vec<u8>, EngineError> {
    let mut session = Session::new().with_base_dir(base_dir);
    match kind {
        OutputKind::Bitmap => session.render_png(spec),
        OutputKind::Vector => session.render_svg(spec).map(String::into_bytes),
    }
}

#[derive(Debug, Clone)]
pub struct RenderArgs {
    pub spec: PathBuf,
    pub out: PathBuf,
    pub width: Option<u32>,
    pub height: Option<u32>,
}

/// The whole `pluot` command. Nothing is written unless rendering succeeds.
pub fn run(args: &RenderArgs) -> anyhow::Result<()> {
    let kind = output_kind_for(&args.out)?;
    let spec = load_spec(&args.spec)?;
    let spec = spec.with_size(args.width, args.height).map_err(EngineError::Spec)?;
    let base_dir = args.spec.parent().unwrap_or(Path::new("."));
    let bytes = render_bytes(&spec, kind, base_dir)?;
    std::fs::write(&args.out, bytes).with_context(|| format!("writing {}", args.out.display()))?;
    Ok(())
}

/// Exit status for a failed [`run`].
pub fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<UsageError>().is_some() || err.downcast_ref::<SpecError>().is_some() {
        return EXIT_INVALID;
    }
    match err.downcast_ref::<EngineError>().map(EngineError::kind) {
        Some(ErrorKind::InvalidSpec) => EXIT_INVALID,
        Some(ErrorKind::NotFound | ErrorKind::Data) => EXIT_DATA,
        Some(ErrorKind::Internal) => EXIT_INTERNAL,
        None if err.chain().any(|e| e.downcast_ref::<std::io::Error>().is_some()) && is_spec_read(err) => EXIT_INVALID,
        None => EXIT_INTERNAL,
    }
}

// An unreadable spec file is bad input, not an internal failure.
fn is_spec_read(err: &anyhow::Error) -> bool {
    err.to_string().starts_with("reading spec ")
}
