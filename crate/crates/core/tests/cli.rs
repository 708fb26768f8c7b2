use std::path::PathBuf;

use hexext::cli::run_args;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("examples")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn run(args: &[&str]) -> (i32, String) {
    let out = run_args(args.iter().copied(), &mut std::io::empty());
    (out.code, out.stdout)
}

fn json(args: &[&str]) -> (i32, serde_json::Value) {
    let (code, out) = run(args);
    let v = serde_json::from_str(&out).unwrap_or_else(|e| panic!("{args:?}: {e}\n{out}"));
    (code, v)
}

#[test]
fn exit_codes_for_every_fixture() {
    let obstructed = fixture("obstructed.json");
    let split = fixture("all-split.json");
    let integers = fixture("integers.json");
    let injective = fixture("injective.json");
    let synthetic = fixture("hexagon-synthetic.json");
    let hex_injective = fixture("hexagon-injective.json");
    let hex_obstructed = fixture("hexagon-obstructed.json");
    let cases: Vec<(Vec<&str>, i32)> = vec![
        (vec!["ext", &obstructed, "-i", "1", "Z2", "Z2"], 0),
        (vec!["ext", &obstructed, "-i", "2", "Z2", "Z4"], 0),
        (vec!["obstruction", &obstructed, "A"], 1),
        (vec!["extend", &obstructed, "A"], 1),
        (vec!["validate", &obstructed, "A"], 0),
        (vec!["oracle-compare", &obstructed, "Z2", "Z4"], 0),
        (vec!["obstruction", &split, "S"], 0),
        (vec!["extend", &split, "S"], 0),
        (vec!["unique", &split, "S"], 1),
        (vec!["iso", &split, "S", "X1", "X2"], 0),
        (vec!["iso", &split, "S", "X1", "X3"], 1),
        (vec!["validate", &split, "X1"], 0),
        (vec!["ext", &integers, "-i", "1", "Z4", "Z6"], 0),
        (vec!["extend", &integers, "I"], 0),
        (vec!["oracle-compare", &integers, "Z4", "Z6"], 0),
        (vec!["extend", &injective, "J"], 0),
        (vec!["hexagon", "solve", &synthetic, "synthetic"], 0),
        (vec!["hexagon", "solve", &synthetic, "padded"], 0),
        (vec!["hexagon", "solve", &hex_injective, "injective"], 0),
        (vec!["hexagon", "solve", &hex_obstructed, "obstructed"], 1),
        (vec!["validate", &hex_obstructed, "obstructed"], 0),
    ];
    for (args, expected) in cases {
        let (code, _) = json(&args);
        assert_eq!(code, expected, "{args:?}");
    }
}

#[test]
fn integer_ext_matches_gcd() {
    let (code, v) = json(&["ext", &fixture("integers.json"), "-i", "1", "Z4", "Z6"]);
    assert_eq!(code, 0);
    assert_eq!(v["order"], serde_json::json!(2));
}

#[test]
fn input_errors_exit_with_two() {
    let obstructed = fixture("obstructed.json");
    for args in [
        vec!["extend", "/nonexistent/doc.json", "A"],
        vec!["extend", &obstructed, "missing"],
        vec!["ext", &obstructed, "-i", "1", "Z2", "nope"],
        vec!["ext", &obstructed, "-i", "3", "Z2", "Z2"],
        vec!["fuzz", "--ring", "Q"],
        vec!["no-such-command"],
    ] {
        assert_eq!(run(&args).0, 2, "{args:?}");
    }
    let mut bad: &[u8] = b"{\"ring\": {\"kind\": \"Z\"},\n \"modules\": [";
    let out = run_args(["extend", "-", "A"], &mut bad);
    assert_eq!(out.code, 2);
    let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    assert!(v.to_string().contains("line"), "{v}");
}

#[test]
fn documents_can_come_from_stdin() {
    let text = std::fs::read_to_string(fixture("all-split.json")).unwrap();
    let out = run_args(["extend", "-", "S"], &mut text.as_bytes());
    assert_eq!(out.code, 0);
}

#[test]
fn fuzz_reports_are_reproducible() {
    let args = ["fuzz", "--ring", "Zmod9", "--seed", "3", "--count", "20"];
    let (c1, a) = run(&args);
    let (c2, b) = run(&args);
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(a, b);
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["failures"], serde_json::json!(0));
}
