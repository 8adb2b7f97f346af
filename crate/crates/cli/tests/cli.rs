use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use sg_core::ingest::{corpus_stats, parse_corpus, synth_corpus, write_corpus, GeneratorProfile};
use sg_core::render::{render_handdrawn, render_steps, render_svg, RenderOptions};
use sg_core::sequence::{sketch_sequence, SequenceOrder};
use sg_core::solver::solve;
use sg_core::Sketch;
use tempfile::TempDir;

fn sg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sg"))
        .args(args)
        .env_remove("SG_LOG")
        .output()
        .expect("run sg")
}

fn ok(args: &[&str]) -> String {
    let out = sg(args);
    assert!(
        out.status.success(),
        "sg {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn read(path: &Path) -> Vec<Sketch> {
    parse_corpus(path).unwrap().collect::<Result<_, _>>().unwrap()
}

struct Work {
    _dir: TempDir,
    root: PathBuf,
}

impl Work {
    fn new() -> Self {
        let dir = TempDir::new().unwrap();
        let root = dir.path().to_path_buf();
        Work { _dir: dir, root }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    fn synth(&self, name: &str, n: u64, seed: u64, profile: &str) -> PathBuf {
        let out = self.path(name);
        ok(&["synth", "--n", &n.to_string(), "--seed", &seed.to_string(), "--out", p(&out), "--profile", profile]);
        out
    }
}

#[test]
fn pipeline() {
    let w = Work::new();
    let corpus = w.synth("corpus.sgl", 120, 7, "autoconstrain");
    let filtered = w.path("filtered.sgl");
    let out = ok(&["filter", "--in", p(&corpus), "--out", p(&filtered), "--max-primitives", "16"]);
    assert_eq!(out, "kept 120 of 120\n");

    let (train, test) = (w.path("train.sgl"), w.path("test.sgl"));
    let out = ok(&[
        "split", "--in", p(&filtered), "--test-count", "20", "--seed", "1", "--train", p(&train), "--test", p(&test),
    ]);
    assert_eq!(out, "train 100 test 20\n");
    assert_eq!(read(&test).len(), 20);

    let stats = ok(&["stats", p(&train)]);
    assert!(stats.contains("100"));

    let predicted = w.path("pred.sgl");
    ok(&["autoconstrain", "--in", p(&test), "--out", p(&predicted), "--strip-constraints"]);
    let eval = ok(&["eval", "--pred", p(&predicted), "--gt", p(&test)]);
    let lines: Vec<&str> = eval.lines().collect();
    assert_eq!(lines[0], "evaluated 20 skipped 0 unmatched 0");
    let f1: f64 = lines[3].strip_prefix("f1 ").unwrap().parse().unwrap();
    assert!(f1 > 0.4, "{eval}");

    let tokens = w.path("tokens.txt");
    let vocab = w.path("vocab.json");
    ok(&["sequence", "--in", p(&train), "--tokens", p(&tokens), "--vocab", p(&vocab)]);
    assert_eq!(fs::read_to_string(&tokens).unwrap().lines().count(), 100);
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&vocab).unwrap()).unwrap();
    assert!(v.is_object());
    let entropy = ok(&["entropy", "--in", p(&train), "--n1", "40", "--n2", "80"]);
    assert!(entropy.contains("entropy rate"));
}

#[test]
fn exit_codes() {
    let w = Work::new();
    assert_eq!(sg(&["--help"]).status.code(), Some(0));
    assert_eq!(sg(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(sg(&["split", "--in", "x.sgl"]).status.code(), Some(1));
    assert_eq!(sg(&["render", "--in", "x.sgl", "--id", "0", "--noise", "0.1", "--out", "o.svg"]).status.code(), Some(1));

    let missing = w.path("missing.sgl");
    assert_eq!(sg(&["stats", p(&missing)]).status.code(), Some(2));

    let corpus = w.synth("c.sgl", 3, 1, "mixed");
    let mut text = fs::read_to_string(&corpus).unwrap();
    text.insert_str(0, "{\"id\": \"broken\"\n");
    let bad = w.path("bad.sgl");
    fs::write(&bad, text).unwrap();
    let out = sg(&["stats", p(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 1"), "{err}");
    // the good records are still reported
    assert!(String::from_utf8_lossy(&out.stdout).contains('3'));

    let out = Command::new(env!("CARGO_BIN_EXE_sg"))
        .args(["stats", p(&corpus)])
        .env("SG_LOG", "loud")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let out = Command::new(env!("CARGO_BIN_EXE_sg"))
        .args(["stats", p(&corpus)])
        .env("SG_LOG", "debug")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn render_matches_library() {
    let w = Work::new();
    let corpus = w.synth("c.sgl", 4, 3, "mixed");
    let s = read(&corpus).remove(2);

    let steps = w.path("steps");
    ok(&["render", "--in", p(&corpus), "--id", &s.id, "--steps", "--out-dir", p(&steps)]);
    let seq = sketch_sequence(&s, SequenceOrder::Canonical).unwrap();
    let frames = render_steps(&s, &seq, &RenderOptions::default()).unwrap();
    assert_eq!(frames.len(), s.primitives.len());
    for (k, f) in frames.iter().enumerate() {
        let file = steps.join(format!("{}-step{:03}.svg", s.id, k + 1));
        assert_eq!(&fs::read_to_string(file).unwrap(), f);
    }

    let clean = w.path("clean.svg");
    ok(&["render", "--in", p(&corpus), "--id", "2", "--out", p(&clean)]);
    assert_eq!(fs::read_to_string(&clean).unwrap(), render_svg(&s, &RenderOptions::default()));

    let noisy = w.path("noisy.svg");
    ok(&["render", "--in", p(&corpus), "--id", &s.id, "--noise", "0.01", "--seed", "9", "--out", p(&noisy)]);
    let o = RenderOptions {
        noise_magnitude: 0.01,
        noise_seed: 9,
        ..Default::default()
    };
    assert_eq!(fs::read_to_string(&noisy).unwrap(), render_handdrawn(&s, &o));
}

#[test]
fn synth_stats_and_solve_match_library() {
    let w = Work::new();
    let corpus = w.synth("c.sgl", 30, 5, "mixed");
    let mut expected = Vec::new();
    write_corpus(&mut expected, synth_corpus(30, 5, GeneratorProfile::Mixed)).unwrap();
    assert_eq!(fs::read(&corpus).unwrap(), expected);

    let sketches = read(&corpus);
    assert_eq!(ok(&["stats", "--in", p(&corpus)]), corpus_stats(&sketches).to_text());

    let solved = w.path("solved.sgl");
    let report = ok(&["--jobs", "2", "solve", "--in", p(&corpus), "--out", p(&solved)]);
    let mut by_id = sketches.clone();
    by_id.sort_by(|a, b| a.id.cmp(&b.id));
    let want: Vec<Sketch> = by_id
        .iter()
        .map(|s| solve(s, &[], &Default::default()).unwrap().solved_sketch)
        .collect();
    assert_eq!(read(&solved), want);
    assert_eq!(report.lines().count(), 30);
    assert!(report.lines().all(|l| l.contains("\tconverged\t")));
}

#[test]
fn edit_moves_only_the_dragged_part() {
    let w = Work::new();
    let corpus = w.synth("c.sgl", 1, 2, "autoconstrain");
    let s = read(&corpus).remove(0);
    let target = &s.primitives.last().unwrap().id;
    let out = w.path("edited.sgl");
    ok(&["edit", "--in", p(&corpus), "--id", "0", "--primitive", target, "--translate", "0.001,-0.001", "--out", p(&out)]);
    let edited = read(&out).remove(0);
    assert_eq!(edited.constraints, s.constraints);
    assert_ne!(edited.primitives, s.primitives);
}
