mod common;

#[test]
fn committed_data_matches_generator() {
    let dir = common::fixtures_dir().join("data");
    let entries = pluot_cli::sample_data::entries().unwrap();
    for (key, bytes) in &entries {
        let on_disk = std::fs::read(dir.join(key)).unwrap_or_else(|e| panic!("{key}: {e}"));
        assert!(on_disk == *bytes, "{key} is stale; rerun the gen_fixture_data example");
    }
    let mut files = 0;
    let mut stack = vec![dir];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                files += 1;
            }
        }
    }
    assert_eq!(files, entries.len(), "extra files under tests/fixtures/data");
}
