mod common;

use pluot_core::PlotSpec;
use serde_json::{json, Value};

fn validator() -> jsonschema::Validator {
    let text = include_str!("../schema/plotspec.schema.json");
    let schema: Value = serde_json::from_str(text).unwrap();
    jsonschema::validator_for(&schema).expect("schema compiles")
}

#[test]
fn fixtures_conform_to_schema_and_parse() {
    let v = validator();
    let specs = common::fixture_specs();
    assert_eq!(specs.len(), 20);
    for path in specs {
        let text = std::fs::read_to_string(&path).unwrap();
        let doc: Value = serde_json::from_str(&text).unwrap();
        let errors: Vec<String> = v
            .iter_errors(&doc)
            .map(|e| format!("{} at {}", e, e.instance_path))
            .collect();
        assert!(errors.is_empty(), "{}: {errors:?}", path.display());
        PlotSpec::from_json(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    }
}

fn base() -> Value {
    json!({"spec_version": 1, "width": 10, "height": 10, "camera": {"center": [0, 0], "zoom": 1}})
}

#[test]
fn schema_and_parser_reject_the_same_bad_specs() {
    let v = validator();
    let with = |f: &dyn Fn(&mut Value)| {
        let mut s = base();
        f(&mut s);
        s
    };
    let bad = [
        json!({}),
        with(&|s| s["spec_version"] = json!(2)),
        with(&|s| s["width"] = json!(0)),
        with(&|s| s["camera"]["zoom"] = json!(0)),
        with(&|s| s["extra"] = json!(true)),
        with(&|s| s["layers"] = json!([{"type": "pie"}])),
        with(&|s| s["layers"] = json!([{"type": "text", "text": "a"}])),
        with(&|s| s["layers"] = json!([{"type": "text", "text": "a", "position": [0, 0], "font": "x"}])),
        with(&|s| s["layers"] = json!([{"type": "histogram", "values": {"store": "s", "path": "../x"}, "n_bins": 3}])),
        with(&|s| s["layers"] = json!([{"type": "axis", "orientation": "z"}])),
        with(&|s| s["stores"] = json!([{"name": "s", "kind": "s3", "root": "x"}])),
        with(&|s| s["background"] = json!("#12345")),
    ];
    for doc in bad {
        assert!(!v.is_valid(&doc), "schema accepted {doc}");
        assert!(PlotSpec::from_value(doc.clone()).is_err(), "parser accepted {doc}");
    }
    let good = with(&|s| {
        s["layers"] = json!([{"type": "line", "points": [[0, 0], [1, 1]], "children": [
            {"type": "text", "text": "a", "position": [0, 0], "coords": "screen"}
        ]}])
    });
    assert!(v.is_valid(&good));
    assert!(PlotSpec::from_value(good).is_ok());
}
