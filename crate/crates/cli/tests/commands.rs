use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use abn_cli::model::ModelDocument;
use abn_core::{Dataset, MissingPolicy};
use tempfile::TempDir;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn abn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_abn"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Value printed after `key: ` on its own line.
fn field(text: &str, key: &str) -> String {
    let prefix = format!("{key}: ");
    text.lines()
        .find_map(|l| l.strip_prefix(&prefix))
        .unwrap_or_else(|| panic!("no `{key}` in:\n{text}"))
        .to_string()
}

fn write_csv(dir: &TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn generate(dir: &TempDir, rows: usize, seed: u64) -> String {
    let path = dir.path().join(format!("gen_{rows}_{seed}.csv"));
    let out = abn(&[
        "gen",
        "--model",
        fixture("two_pairs.json").to_str().unwrap(),
        "--rows",
        &rows.to_string(),
        "--seed",
        &seed.to_string(),
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    path.to_str().unwrap().to_string()
}

#[test]
fn learned_score_matches_rescoring() {
    let dir = TempDir::new().unwrap();
    let data = generate(&dir, 800, 1);
    let model = dir.path().join("m.json");
    let model = model.to_str().unwrap();
    for mode in ["naive", "tan", "abn"] {
        let learned = abn(&["learn", "--input", &data, "--class", "c", "--mode", mode, "--output", model]);
        assert_eq!(code(&learned), 0);
        assert!(Path::new(model).exists());
        let scored = abn(&["score", "--model", model, "--input", &data]);
        assert_eq!(code(&scored), 0);
        assert_eq!(field(&stdout(&learned), "mdl"), field(&stdout(&scored), "mdl"));
        assert_eq!(field(&stdout(&learned), "parameters"), field(&stdout(&scored), "parameters"));
        let doc = ModelDocument::load(Path::new(model)).unwrap();
        assert_eq!(doc.mode.as_deref(), Some(mode));
    }
}

#[test]
fn missing_input_fails_without_writing() {
    let dir = TempDir::new().unwrap();
    let model = dir.path().join("m.json");
    let out = abn(&[
        "learn",
        "--input",
        dir.path().join("absent.csv").to_str().unwrap(),
        "--class",
        "c",
        "--output",
        model.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
    assert!(!model.exists());
    assert!(!out.stderr.is_empty());
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = TempDir::new().unwrap();
    let data = generate(&dir, 50, 2);
    let model = dir.path().join("m.json");
    let model = model.to_str().unwrap();
    for args in [
        vec!["learn", "--input", &data, "--class", "c", "--mode", "best", "--output", model],
        vec!["learn", "--input", &data, "--output", model],
        vec!["learn", "--input", &data, "--class", "nope", "--output", model],
        vec!["learn", "--input", &data, "--class", "c", "--alpha", "0", "--output", model],
        vec!["learn", "--input", &data, "--class", "c", "--holdout", "0.2", "--output", model],
        vec!["frobnicate"],
    ] {
        assert_eq!(code(&abn(&args)), 2, "{args:?}");
    }
    assert!(!Path::new(model).exists());
}

#[test]
fn connected_eligible_graph_learns_a_tree() {
    // Every attribute copies the first with a little noise, so every pair
    // clears its threshold.
    let dir = TempDir::new().unwrap();
    let mut text = String::from("a,b,c,d,e,class\n");
    for r in 0..400usize {
        let h = (r * 7 + r / 3) % 2;
        let noisy = |k: usize| if (r * 31 + k * 17).is_multiple_of(11) { 1 - h } else { h };
        text += &format!("{},{},{},{},{},{}\n", h, noisy(1), noisy(2), noisy(3), noisy(4), r % 2);
    }
    let data = write_csv(&dir, "tree.csv", &text);
    let model = dir.path().join("m.json");
    let out = abn(&["learn", "--input", &data, "--class", "class", "--output", model.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert_eq!(field(&stdout(&out), "arcs"), "4");
}

#[test]
fn verify_reports_both_learners() {
    let dir = TempDir::new().unwrap();
    let data = generate(&dir, 600, 3);
    let out = abn(&["verify", "--input", &data, "--class", "c"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(field(&text, "gain learner").starts_with("MATCH"));
    assert!(text.contains("cost learner: "));
    assert_eq!(field(&text, "structures examined"), "38");
}

#[test]
fn verify_uniform_cardinality_matches_in_both_modes() {
    let dir = TempDir::new().unwrap();
    let mut text = String::from("c,w,x,y,z\n");
    for r in 0..300usize {
        let c = r % 2;
        let w = (r / 2) % 2;
        let x = if r % 7 == 0 { 1 - w } else { w };
        let y = (r / 5 + c) % 2;
        let z = if r % 3 == 0 { y } else { (r / 11) % 2 };
        text += &format!("{c},{w},{x},{y},{z}\n");
    }
    let data = write_csv(&dir, "binary.csv", &text);
    let out = abn(&["verify", "--input", &data, "--class", "c"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(field(&text, "gain learner").starts_with("MATCH"));
    assert!(field(&text, "cost learner").starts_with("MATCH"));
}

#[test]
fn verify_mismatch_exits_with_one() {
    // Mixed cardinalities where ranking by information alone picks an edge
    // whose parameters cost more than it explains.
    let data = fixture("cost_mismatch.csv");
    let data = data.to_str().unwrap();
    let gain = abn(&["verify", "--input", data, "--class", "c"]);
    assert_eq!(code(&gain), 0);
    assert!(field(&stdout(&gain), "cost learner").starts_with("MISMATCH"));
    assert!(stdout(&gain).contains("cost learner gap: "));
    let cost = abn(&["verify", "--input", data, "--class", "c", "--require", "cost"]);
    assert_eq!(code(&cost), 1);
    assert!(stdout(&cost).contains("optimal mdl: "));
}

#[test]
fn verify_refuses_large_attribute_counts() {
    let dir = TempDir::new().unwrap();
    let header: Vec<String> = (0..10).map(|k| format!("x{k}")).collect();
    let mut text = format!("{},c\n", header.join(","));
    for r in 0..40usize {
        let row: Vec<String> = (0..10).map(|k| ((r >> (k % 5)) & 1).to_string()).collect();
        text += &format!("{},{}\n", row.join(","), r % 2);
    }
    let data = write_csv(&dir, "wide.csv", &text);
    let out = abn(&["verify", "--input", &data, "--class", "c"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("10"));
}

#[test]
fn gen_is_deterministic_per_seed() {
    let dir = TempDir::new().unwrap();
    let a = fs::read(generate(&dir, 300, 9)).unwrap();
    let again = TempDir::new().unwrap();
    let b = fs::read(generate(&again, 300, 9)).unwrap();
    let c = fs::read(generate(&dir, 300, 10)).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn gen_requires_a_seed() {
    let out = abn(&["gen", "--model", fixture("two_pairs.json").to_str().unwrap(), "--rows", "10"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("--seed"));
}

#[test]
fn gen_writes_to_stdout_without_output() {
    let out = abn(&["gen", "--model", fixture("two_pairs.json").to_str().unwrap(), "--rows", "5", "--seed", "1"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert_eq!(text.lines().next(), Some("c,x1,x2,x3,x4"));
    assert_eq!(text.lines().count(), 6);
}

#[test]
fn saved_model_predicts_bit_identically() {
    let dir = TempDir::new().unwrap();
    let data = generate(&dir, 700, 4);
    let model_path = dir.path().join("m.json");
    let out = abn(&[
        "learn", "--input", &data, "--class", "c", "--weight", "gain", "--smoothing", "laplace",
        "--alpha", "0.37", "--output", model_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);

    // In-memory pipeline.
    let dataset = Dataset::load_csv(&data, "c", MissingPolicy::DropRow, b',').unwrap();
    let structure = abn_core::learner::learn_structure::<f64>(
        &dataset,
        &abn_core::LearnOptions::new(abn_core::Mode::Abn, abn_core::WeightMode::Gain),
    )
    .unwrap();
    let fresh = abn_core::FittedClassifier::fit(structure, &dataset, abn_core::Smoothing::Laplace(0.37))
        .unwrap();
    let loaded = ModelDocument::load(&model_path).unwrap().to_classifier().unwrap();
    assert_eq!(loaded, fresh);
    for r in 0..dataset.n_rows() {
        let (a, b) = (fresh.predict(&dataset.instance(r)).unwrap(), loaded.predict(&dataset.instance(r)).unwrap());
        assert_eq!(a.class_index, b.class_index);
        let bits = |p: &[f64]| p.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&a.posterior), bits(&b.posterior));
    }

    // The predict command prints the same posteriors.
    let out = abn(&["predict", "--model", model_path.to_str().unwrap(), "--input", &data]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("prediction,p_no,p_yes"));
    for (r, line) in lines.enumerate() {
        let cells: Vec<&str> = line.split(',').collect();
        let p = fresh.predict(&dataset.instance(r)).unwrap();
        assert_eq!(cells[0], p.label);
        for (cell, q) in cells[1..].iter().zip(&p.posterior) {
            assert_eq!(cell.parse::<f64>().unwrap().to_bits(), q.to_bits());
        }
    }
}

#[test]
fn eval_on_deterministic_training_data_is_perfect() {
    let dir = TempDir::new().unwrap();
    let mut text = String::from("shape,colour,label\n");
    for r in 0..60usize {
        let shape = ["box", "ball", "cone"][r % 3];
        let colour = ["red", "blue"][(r / 3) % 2];
        let label = if shape == "ball" || colour == "red" { "keep" } else { "drop" };
        text += &format!("{shape},{colour},{label}\n");
    }
    let data = write_csv(&dir, "det.csv", &text);
    let model = dir.path().join("m.json");
    let model = model.to_str().unwrap();
    assert_eq!(code(&abn(&["learn", "--input", &data, "--class", "label", "--mode", "tan", "--output", model])), 0);
    let out = abn(&["eval", "--model", model, "--input", &data]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(field(&text, "accuracy").starts_with("1.000000"), "{text}");
    assert!(text.contains("confusion"));
}

#[test]
fn predict_and_eval_reject_incompatible_data() {
    let dir = TempDir::new().unwrap();
    let data = generate(&dir, 200, 5);
    let model = dir.path().join("m.json");
    let model = model.to_str().unwrap();
    assert_eq!(code(&abn(&["learn", "--input", &data, "--class", "c", "--output", model])), 0);

    let unseen = write_csv(&dir, "unseen.csv", "c,x1,x2,x3,x4\nno,0,1,huge,0\n");
    let missing_column = write_csv(&dir, "cols.csv", "c,x1,x2,x3\nno,0,1,lo\n");
    for input in [&unseen, &missing_column] {
        assert_eq!(code(&abn(&["predict", "--model", model, "--input", input])), 2);
        assert_eq!(code(&abn(&["eval", "--model", model, "--input", input])), 2);
    }
    let bad_version = dir.path().join("v.json");
    let text = fs::read_to_string(model).unwrap().replace("\"format_version\": 1", "\"format_version\": 7");
    fs::write(&bad_version, text).unwrap();
    let out = abn(&["predict", "--model", bad_version.to_str().unwrap(), "--input", &data]);
    assert_eq!(code(&out), 2);
}

#[test]
fn holdout_reports_test_accuracy() {
    let dir = TempDir::new().unwrap();
    let data = generate(&dir, 500, 6);
    let model = dir.path().join("m.json");
    let out = abn(&[
        "learn", "--input", &data, "--class", "c", "--holdout", "0.2", "--seed", "3", "--output",
        model.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert_eq!(field(&text, "rows"), "400");
    assert_eq!(field(&text, "holdout rows"), "100");
    assert!(field(&text, "holdout accuracy").contains("/100"));
}

#[test]
fn help_lists_defaults() {
    let out = abn(&["learn", "--help"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("[default: abn]"));
    assert!(text.contains("[default: cost]"));
}
