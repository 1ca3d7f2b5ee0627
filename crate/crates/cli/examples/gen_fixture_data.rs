//! Regenerates `tests/fixtures/data`.
//!
//! cargo run -p pluot-cli --example gen_fixture_data

use std::path::PathBuf;

fn main() -> anyhow::Result<()> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/data");
    if dir.exists() {
        std::fs::remove_dir_all(&dir)?;
    }
    pluot_cli::sample_data::write_to(&dir)?;
    println!("wrote {}", dir.display());
    Ok(())
}
