use std::collections::{HashMap, HashSet};
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use log::{info, warn};
use rayon::prelude::*;
use sg_core::autoconstrain::{
    evaluate_pairs, infer_constraints_with, ConstraintKey, EnumerationOptions, PriorityPolicy,
};
use sg_core::ingest::{
    filter_corpus, parse_corpus, split_corpus, synth_corpus, write_corpus, write_corpus_file, FilterOptions,
    IngestError, StatsAccumulator,
};
use sg_core::model::Provenance;
use sg_core::render::{render_handdrawn, render_steps, render_svg, RenderOptions};
use sg_core::sequence::{
    entropy_rate_estimate, sketch_sequence, token_width, write_token_stream, ConstructionSequence, Lzma,
    SequenceOrder, TokenVocabulary, VocabularyOptions,
};
use sg_core::solver::{edit_propagate, solve, Edit, SolveOptions};
use sg_core::{Sketch, Vec2};
use thiserror::Error;

use super::*;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
        }
    }
}

fn io_err(path: &Path) -> impl Fn(io::Error) -> CliError + '_ {
    move |e| CliError::Data(format!("{}: {e}", path.display()))
}

/// Tracks malformed records so the command can finish and still fail.
struct Diagnostics<'a> {
    path: &'a Path,
    bad: usize,
}

impl<'a> Diagnostics<'a> {
    fn new(path: &'a Path) -> Self {
        Diagnostics { path, bad: 0 }
    }

    fn report(&mut self, e: IngestError) -> Result<(), CliError> {
        match e {
            IngestError::MalformedRecord { .. } => {
                eprintln!("{}:{e}", self.path.display());
                self.bad += 1;
                Ok(())
            }
            other => Err(CliError::Data(format!("{}: {other}", self.path.display()))),
        }
    }

    fn finish(self) -> Result<(), CliError> {
        if self.bad == 0 {
            Ok(())
        } else {
            Err(CliError::Data(format!(
                "{}: {} malformed record(s) skipped",
                self.path.display(),
                self.bad
            )))
        }
    }
}

/// Stream valid sketches into `f`, reporting bad records.
fn each_sketch(path: &Path, diag: &mut Diagnostics, mut f: impl FnMut(Sketch) -> Result<(), CliError>) -> Result<(), CliError> {
    let reader = parse_corpus(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    for r in reader {
        match r {
            Ok(s) => f(s)?,
            Err(e) => diag.report(e)?,
        }
    }
    Ok(())
}

fn read_all(path: &Path, diag: &mut Diagnostics) -> Result<Vec<Sketch>, CliError> {
    let mut out = Vec::new();
    each_sketch(path, diag, |s| {
        out.push(s);
        Ok(())
    })?;
    info!("{}: {} sketches", path.display(), out.len());
    Ok(out)
}

/// Sketch by id, or by 0-based record index when no id matches.
fn find_sketch(path: &Path, key: &str) -> Result<Sketch, CliError> {
    let mut diag = Diagnostics::new(path);
    let all = read_all(path, &mut diag)?;
    if let Some(s) = all.iter().find(|s| s.id == key) {
        return Ok(s.clone());
    }
    key.parse::<usize>()
        .ok()
        .and_then(|i| all.get(i).cloned())
        .ok_or_else(|| CliError::Data(format!("{}: no sketch {key:?}", path.display())))
}

fn sort_by_id<T>(mut rows: Vec<(String, T)>) -> Vec<(String, T)> {
    rows.sort_by(|a, b| a.0.cmp(&b.0));
    rows
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path).map(BufWriter::new).map_err(io_err(path))
}

pub fn run(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Stats(a) => stats(a),
        Command::Filter(a) => filter(a),
        Command::Split(a) => split(a),
        Command::Sequence(a) => sequence(a),
        Command::Entropy(a) => entropy(a),
        Command::Solve(a) => solve_cmd(a),
        Command::Edit(a) => edit(a),
        Command::Autoconstrain(a) => autoconstrain(a),
        Command::Eval(a) => eval(a),
        Command::Render(a) => render(a),
        Command::Synth(a) => synth(a),
    }
}

fn stats(a: StatsArgs) -> Result<(), CliError> {
    let path = a.path.or(a.input).expect("clap requires one of the inputs");
    let mut diag = Diagnostics::new(&path);
    let mut acc = StatsAccumulator::default();
    each_sketch(&path, &mut diag, |s| {
        acc.push(&s);
        Ok(())
    })?;
    let report = acc.finish();
    print!("{}", report.to_text());
    if let Some(dir) = a.csv_dir {
        fs::create_dir_all(&dir).map_err(io_err(&dir))?;
        for (name, table) in report.csv_tables() {
            let p = dir.join(format!("{name}.csv"));
            fs::write(&p, table).map_err(io_err(&p))?;
        }
    }
    diag.finish()
}

fn filter(a: FilterArgs) -> Result<(), CliError> {
    let opts = FilterOptions {
        min_primitives: a.min_primitives,
        min_constraints: a.min_constraints,
        max_primitives: a.max_primitives,
        allowed_types: a.allowed_types.map(|t| t.into_iter().collect()),
    };
    let mut diag = Diagnostics::new(&a.input);
    let all = read_all(&a.input, &mut diag)?;
    let total = all.len();
    let n = write_corpus(create(&a.out)?, filter_corpus(all, &opts)).map_err(io_err(&a.out))?;
    println!("kept {n} of {total}");
    diag.finish()
}

fn split(a: SplitArgs) -> Result<(), CliError> {
    let c = split_corpus(&a.input, a.test_count, a.seed, &a.train, &a.test).map_err(|e| match e {
        IngestError::MalformedRecord { .. } => CliError::Data(format!("{}:{e}", a.input.display())),
        e => CliError::Data(e.to_string()),
    })?;
    println!("train {} test {}", c.train, c.test);
    Ok(())
}

fn order(o: Order) -> SequenceOrder {
    match o {
        Order::Canonical => SequenceOrder::Canonical,
        Order::ConstraintsLast => SequenceOrder::ConstraintsLast,
    }
}

/// Sequences of every sketch in file order; failures are reported and
/// skipped.
fn sequences(path: &Path, o: SequenceOrder, diag: &mut Diagnostics) -> Result<Vec<(String, ConstructionSequence)>, CliError> {
    let mut out = Vec::new();
    let mut failed = 0;
    each_sketch(path, diag, |s| {
        match sketch_sequence(&s, o) {
            Ok(seq) => out.push((s.id, seq)),
            Err(e) => {
                eprintln!("{}: sketch {}: {e}", path.display(), s.id);
                failed += 1;
            }
        }
        Ok(())
    })?;
    diag.bad += failed;
    Ok(out)
}

/// Token streams of the sequences that fit the vocabulary.
fn tokenize(vocab: &TokenVocabulary, seqs: &[(String, ConstructionSequence)]) -> Vec<Vec<u32>> {
    seqs.iter()
        .filter_map(|(id, s)| match vocab.tokenize(s) {
            Ok(t) => Some(t),
            Err(e) => {
                warn!("sketch {id}: {e}");
                None
            }
        })
        .collect()
}

fn vocab_options(max_primitives: Option<usize>) -> VocabularyOptions {
    VocabularyOptions {
        max_primitives,
        ..Default::default()
    }
}

fn sequence(a: SequenceArgs) -> Result<(), CliError> {
    let mut diag = Diagnostics::new(&a.input);
    let seqs = sequences(&a.input, order(a.order), &mut diag)?;
    let out = io::stdout();
    let mut out = out.lock();
    for (id, s) in &seqs {
        writeln!(out, "{id}\t{}", s.summary()).map_err(|e| CliError::Data(e.to_string()))?;
    }
    if a.tokens.is_some() || a.vocab.is_some() {
        let vocab = TokenVocabulary::build(seqs.iter().map(|x| &x.1), &vocab_options(a.max_primitives));
        if let Some(p) = &a.vocab {
            let text = serde_json::to_string_pretty(&vocab.to_json()).expect("vocabulary serializes");
            fs::write(p, text + "\n").map_err(io_err(p))?;
        }
        if let Some(p) = &a.tokens {
            write_token_stream(create(p)?, &tokenize(&vocab, &seqs)).map_err(io_err(p))?;
        }
    }
    diag.finish()
}

fn entropy(a: EntropyArgs) -> Result<(), CliError> {
    let mut diag = Diagnostics::new(&a.input);
    let seqs = sequences(&a.input, SequenceOrder::Canonical, &mut diag)?;
    let vocab = TokenVocabulary::build(seqs.iter().map(|x| &x.1), &vocab_options(a.max_primitives));
    let streams = tokenize(&vocab, &seqs);
    let width = token_width(vocab.size());
    let rate = entropy_rate_estimate(&streams, a.n1, a.n2, width, &Lzma).map_err(|e| CliError::Data(e.to_string()))?;
    let raw: usize = streams[a.n1..a.n2].iter().map(|s| s.len() * width * 8).sum();
    println!("vocabulary {} tokens, {} bytes per token", vocab.size(), width);
    println!("entropy rate {rate:.3} bits per sketch");
    println!("raw size {:.3} bits per sketch", raw as f64 / (a.n2 - a.n1) as f64);
    diag.finish()
}

fn solve_cmd(a: SolveArgs) -> Result<(), CliError> {
    let opts = SolveOptions {
        residual_tolerance: a.tol,
        max_iterations: a.max_iterations,
        ..Default::default()
    };
    opts.check().map_err(|e| CliError::Usage(e.to_string()))?;
    let mut diag = Diagnostics::new(&a.input);
    let all = read_all(&a.input, &mut diag)?;
    let fixed: Vec<&str> = a.fixed.iter().map(String::as_str).collect();
    let results: Vec<(String, Result<_, _>)> = all
        .par_iter()
        .map(|s| (s.id.clone(), solve(s, &fixed, &opts)))
        .collect();
    let mut solved = Vec::new();
    let mut failed = 0;
    for (id, r) in sort_by_id(results) {
        match r {
            Ok(r) => {
                println!(
                    "{id}\t{}\t{}\t{:e}",
                    if r.converged { "converged" } else { "not-converged" },
                    r.iterations,
                    r.max_abs_residual
                );
                solved.push(r.solved_sketch);
            }
            Err(e) => {
                eprintln!("{}: sketch {id}: {e}", a.input.display());
                failed += 1;
            }
        }
    }
    write_corpus(create(&a.out)?, &solved).map_err(io_err(&a.out))?;
    diag.bad += failed;
    diag.finish()
}

fn edit(a: EditArgs) -> Result<(), CliError> {
    let s = find_sketch(&a.input, &a.id)?;
    let p = s
        .primitive(&a.primitive)
        .ok_or_else(|| CliError::Data(format!("sketch {}: no primitive {:?}", s.id, a.primitive)))?;
    let target = p
        .to_standard()
        .map_err(|e| CliError::Data(e.to_string()))?
        .translated(Vec2::new(a.translate.0, a.translate.1));
    let opts = SolveOptions {
        residual_tolerance: a.tol,
        ..Default::default()
    };
    opts.check().map_err(|e| CliError::Usage(e.to_string()))?;
    let fixed: Vec<&str> = a.fixed.iter().map(String::as_str).collect();
    let r = edit_propagate(&s, &[Edit::new(&a.primitive, target)], &fixed, &opts)
        .map_err(|e| CliError::Data(format!("sketch {}: {e}", s.id)))?;
    println!(
        "{}\t{}\t{}\t{:e}",
        s.id,
        if r.converged { "converged" } else { "not-converged" },
        r.iterations,
        r.max_abs_residual
    );
    write_corpus_file(&a.out, [&r.solved_sketch]).map_err(io_err(&a.out))?;
    if r.converged {
        Ok(())
    } else {
        Err(CliError::Data(format!("sketch {}: edit did not converge", s.id)))
    }
}

fn autoconstrain(a: AutoArgs) -> Result<(), CliError> {
    let opts = EnumerationOptions {
        tolerance: a.tol,
        ..Default::default()
    };
    let mut diag = Diagnostics::new(&a.input);
    let all = read_all(&a.input, &mut diag)?;
    let out: Vec<(String, Sketch)> = all
        .par_iter()
        .map(|s| {
            let base = s.stripped();
            let predicted = infer_constraints_with(&base, &PriorityPolicy, a.dof_target, &opts);
            let mut result = if a.strip_constraints { base } else { s.clone() };
            if !a.strip_constraints {
                for c in &mut result.constraints {
                    c.provenance.get_or_insert(Provenance::GroundTruth);
                }
            }
            let have: HashSet<ConstraintKey> = result.constraints.iter().map(ConstraintKey::of).collect();
            result
                .constraints
                .extend(predicted.into_iter().filter(|c| !have.contains(&ConstraintKey::of(c))));
            (s.id.clone(), result)
        })
        .collect();
    let out = sort_by_id(out);
    let n = write_corpus(create(&a.out)?, out.iter().map(|x| &x.1)).map_err(io_err(&a.out))?;
    println!("wrote {n} sketches");
    diag.finish()
}

fn eval(a: EvalArgs) -> Result<(), CliError> {
    let mut pd = Diagnostics::new(&a.pred);
    let mut gd = Diagnostics::new(&a.gt);
    let pred = read_all(&a.pred, &mut pd)?;
    let gt = read_all(&a.gt, &mut gd)?;
    let by_id: HashMap<&str, &Sketch> = gt.iter().map(|s| (s.id.as_str(), s)).collect();
    let mut pairs = Vec::new();
    let mut unmatched = 0;
    for p in &pred {
        match by_id.get(p.id.as_str()) {
            Some(g) => pairs.push((p, *g)),
            None => {
                warn!("no ground truth for sketch {}", p.id);
                unmatched += 1;
            }
        }
    }
    pairs.sort_by(|x, y| x.0.id.cmp(&y.0.id));
    let e = evaluate_pairs(pairs.iter().map(|(p, g)| (p.constraints.as_slice(), g.constraints.as_slice())));
    println!("evaluated {} skipped {} unmatched {}", e.evaluated, e.skipped_empty, unmatched);
    println!("precision {:.4}", e.precision);
    println!("recall {:.4}", e.recall);
    println!("f1 {:.4}", e.f1);
    pd.finish()?;
    gd.finish()
}

fn render(a: RenderArgs) -> Result<(), CliError> {
    if a.noise.is_some_and(|n| !(n >= 0.0)) {
        return Err(CliError::Usage("--noise must be a non-negative number".into()));
    }
    let s = find_sketch(&a.input, &a.id)?;
    let o = RenderOptions {
        stroke_width: a.stroke_width,
        noise_magnitude: a.noise.unwrap_or(0.0),
        noise_seed: a.seed.unwrap_or(0),
        metadata: a.metadata,
        ..Default::default()
    };
    if a.steps {
        let dir: PathBuf = a.out_dir.expect("clap requires --out-dir with --steps");
        let seq = sketch_sequence(&s, SequenceOrder::Canonical).map_err(|e| CliError::Data(e.to_string()))?;
        let frames = render_steps(&s, &seq, &o).map_err(|e| CliError::Data(e.to_string()))?;
        fs::create_dir_all(&dir).map_err(io_err(&dir))?;
        for (k, f) in frames.iter().enumerate() {
            let p = dir.join(format!("{}-step{:03}.svg", s.id, k + 1));
            fs::write(&p, f).map_err(io_err(&p))?;
        }
        println!("wrote {} frames to {}", frames.len(), dir.display());
        return Ok(());
    }
    let doc = if a.noise.is_some() {
        render_handdrawn(&s, &o)
    } else {
        render_svg(&s, &o)
    };
    let out = a.out.expect("clap requires --out without --steps");
    fs::write(&out, doc).map_err(io_err(&out))
}

fn synth(a: SynthArgs) -> Result<(), CliError> {
    let n = write_corpus(create(&a.out)?, synth_corpus(a.n, a.seed, a.profile)).map_err(io_err(&a.out))?;
    println!("wrote {n} sketches ({} profile)", a.profile.name());
    Ok(())
}
