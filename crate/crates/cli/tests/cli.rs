mod common;

use std::path::Path;
use std::process::{Command, Output};

fn pluot(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pluot"))
        .args(args)
        .output()
        .expect("spawn pluot")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn renders_svg() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("plot.svg");
    let spec = common::fixtures_dir().join("01_scatter_uniform.json");
    let o = pluot(&["--spec", p(&spec), "--out", p(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let svg = std::fs::read_to_string(&out).unwrap();
    assert!(svg.starts_with("<svg"), "{}", &svg[..40.min(svg.len())]);
    assert_eq!(svg.matches("<circle").count(), 2000);
}

#[test]
fn size_overrides_reach_the_png_header() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("plot.png");
    let spec = common::fixtures_dir().join("16_scatter_with_axes.json");
    let o = pluot(&[
        "--spec",
        p(&spec),
        "--out",
        p(&out),
        "--width",
        "200",
        "--height",
        "100",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(common::png_size(&std::fs::read(&out).unwrap()), (200, 100));
}

#[test]
fn malformed_json_exits_2_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("bad.json");
    std::fs::write(&spec, "{\n  \"spec_version\": 1,\n  \"width\": 10,\n  oops\n}").unwrap();
    let out = dir.path().join("out.png");
    let o = pluot(&["--spec", p(&spec), "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
    let stderr = String::from_utf8_lossy(&o.stderr);
    assert!(stderr.contains("line 4"), "{stderr}");
}

#[test]
fn bad_field_names_its_path() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("bad.json");
    std::fs::write(
        &spec,
        r#"{"spec_version": 1, "width": 10, "height": 10, "camera": {"center": [0, 0], "zoom": 1},
            "layers": [{"type": "histogram", "values": {"store": "s", "path": "v"}, "n_bins": "many"}]}"#,
    )
    .unwrap();
    let out = dir.path().join("out.svg");
    let o = pluot(&["--spec", p(&spec), "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
    assert!(String::from_utf8_lossy(&o.stderr).contains("layers[0].n_bins"));
}

#[test]
fn missing_store_data_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::create_dir(dir.path().join("empty")).unwrap();
    let spec = dir.path().join("spec.json");
    std::fs::write(
        &spec,
        r#"{"spec_version": 1, "width": 10, "height": 10, "camera": {"center": [0, 0], "zoom": 1},
            "stores": [{"name": "s", "kind": "filesystem", "root": "empty"}],
            "layers": [{"type": "histogram", "values": {"store": "s", "path": "v"}, "n_bins": 4}]}"#,
    )
    .unwrap();
    let out = dir.path().join("out.png");
    let o = pluot(&["--spec", p(&spec), "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(!out.exists());
}

#[test]
fn unknown_extension_and_missing_args_exit_2() {
    let spec = common::fixtures_dir().join("19_empty_scene.json");
    let o = pluot(&["--spec", p(&spec), "--out", "/tmp/never.gif"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(pluot(&["--spec", p(&spec)]).status.code(), Some(2));
    let o = pluot(&["--spec", "/nonexistent/spec.json", "--out", "/tmp/never.png"]);
    assert_eq!(o.status.code(), Some(2));
}
