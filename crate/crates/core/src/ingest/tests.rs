use std::collections::HashSet;
use std::io::Cursor;

use super::*;
use crate::model::{Constraint, ConstraintType as T, EntityRef, Primitive, PrimitiveType, Sketch, StandardPrimitive};
use crate::solver::is_satisfied;
use crate::units::Length;
use crate::Vec2;

const ONE: &str = r#"{"id":"a","primitives":[{"id":"p","type":"Point","isConstruction":false,"x":0.0,"y":0.0},{"id":"q","type":"Point","isConstruction":false,"x":1.0,"y":0.0}],"constraints":[{"type":"Horizontal","localFirst":"p","localSecond":"q"}]}"#;

fn read(text: &str) -> Vec<Result<Sketch, IngestError>> {
    CorpusReader::new(Cursor::new(text.to_string())).collect()
}

fn bytes<'a>(sketches: impl IntoIterator<Item = &'a Sketch>) -> Vec<u8> {
    let mut out = Vec::new();
    write_corpus(&mut out, sketches).unwrap();
    out
}

#[test]
fn one_record_and_local_aliases() {
    let got = read(ONE);
    assert_eq!(got.len(), 1);
    let s = got[0].as_ref().unwrap();
    assert_eq!(s.constraints[0].locals, vec![EntityRef::whole("p"), EntityRef::whole("q")]);
    let text = String::from_utf8(bytes([s])).unwrap();
    assert!(text.contains(r#""local0":"p","local1":"q""#), "{text}");
}

#[test]
fn bad_lines_are_reported_and_skipped() {
    let truncated = &ONE[..ONE.len() - 10];
    let text = format!("{truncated}\n\n{ONE}\n{{\"id\":\"z\",\"primitives\":[{{\"id\":\"p\",\"type\":\"Blob\"}}]}}\n");
    let got = read(&text);
    assert_eq!(got.len(), 3);
    assert!(matches!(got[0], Err(IngestError::MalformedRecord { line: 1, .. })));
    assert!(got[1].is_ok());
    assert!(matches!(got[2], Err(IngestError::MalformedRecord { line: 4, .. })));
}

#[test]
fn unknown_fields_survive() {
    let text = r#"{"id":"u","primitives":[{"id":"p","type":"Point","isConstruction":true,"x":1.5,"y":-2.0,"color":"red"}],"constraints":[{"type":"Radius","local0":"c","length":"5 mm","note":1}],"source":{"doc":7}}"#;
    // the radius references a missing primitive
    assert!(read(text)[0].is_err());
    let fixed = text.replace(r#"{"type":"Radius","local0":"c","length":"5 mm","note":1}"#, r#"{"type":"Horizontal","local0":"p","note":1}"#);
    let fixed = fixed.replace(r#""type":"Point","isConstruction":true,"x":1.5,"y":-2.0,"color":"red"}"#, r#""type":"Point","isConstruction":true,"x":1.5,"y":-2.0,"color":"red"},{"id":"q","type":"Point","isConstruction":false,"x":0.0,"y":0.0}"#);
    let fixed = fixed.replace(r#""local0":"p","note":1"#, r#""local0":"p","local1":"q","note":1"#);
    let s = read(&fixed).remove(0).unwrap();
    assert_eq!(s.extra["source"]["doc"], 7);
    assert_eq!(s.primitives[0].extra["color"], "red");
    assert_eq!(s.constraints[0].extra["note"], 1);
    assert_eq!(String::from_utf8(bytes([&s])).unwrap().trim_end(), fixed);
}

#[test]
fn round_trip_synthetic() {
    let sketches: Vec<Sketch> = synth_corpus(200, 3, GeneratorProfile::Mixed).collect();
    let first = bytes(&sketches);
    let back: Vec<Sketch> = CorpusReader::new(Cursor::new(first.clone()))
        .map(Result::unwrap)
        .collect();
    assert_eq!(back, sketches);
    assert_eq!(bytes(&back), first);
    assert_eq!(bytes(&[] as &[Sketch]), Vec::<u8>::new());
}

fn points(n: usize, constraints: usize) -> Sketch {
    let prims: Vec<Primitive> = (0..n)
        .map(|i| Primitive::from_standard(format!("p{i}"), &StandardPrimitive::Point(Vec2::new(i as f64, 0.0))).unwrap())
        .collect();
    let cons = (0..constraints)
        .map(|_| Constraint::pair(T::Horizontal, EntityRef::whole("p0"), EntityRef::whole("p1")))
        .collect();
    Sketch::new(format!("s{n}-{constraints}"), prims, cons)
}

#[test]
fn filter_rules() {
    let d = FilterOptions::default();
    assert!(!d.accepts(&points(2, 0)));
    assert!(d.accepts(&points(2, 1)));
    let capped = FilterOptions {
        max_primitives: Some(16),
        ..Default::default()
    };
    assert!(!capped.accepts(&points(17, 1)));
    assert!(capped.accepts(&points(16, 1)));
    let typed = FilterOptions {
        allowed_types: Some([PrimitiveType::Point, PrimitiveType::Line, PrimitiveType::Circle, PrimitiveType::Arc].into()),
        ..Default::default()
    };
    let mixed: Vec<Sketch> = synth_corpus(100, 1, GeneratorProfile::Mixed).collect();
    let kept: Vec<Sketch> = filter_corpus(mixed.clone(), &typed).collect();
    assert!(kept.len() < mixed.len());
    assert!(kept.iter().all(|s| s.primitives.iter().all(|p| p.kind() != PrimitiveType::Ellipse)));
    let all = vec![points(1, 0), points(2, 1), points(3, 2)];
    let once: Vec<Sketch> = filter_corpus(all, &d).collect();
    let twice: Vec<Sketch> = filter_corpus(once.clone(), &d).collect();
    assert_eq!(once, twice);
}

#[test]
fn split_examples() {
    let ids: Vec<String> = (0..10).map(|i| format!("s{i}")).collect();
    let a = assign_test(&ids, 3, 42).unwrap();
    assert_eq!(a.iter().filter(|&&t| t).count(), 3);
    assert_eq!(a, assign_test(&ids, 3, 42).unwrap());
    assert_ne!(a, assign_test(&ids, 3, 43).unwrap());
    assert!(assign_test(&ids, 0, 42).unwrap().iter().all(|&t| !t));
    assert!(matches!(
        assign_test(&ids, 11, 42),
        Err(IngestError::InsufficientCorpus { requested: 11, available: 10 })
    ));

    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("c.sgl");
    write_corpus_file(&input, synth_corpus(10, 5, GeneratorProfile::Autoconstrain)).unwrap();
    let (train, test) = (dir.path().join("train.sgl"), dir.path().join("test.sgl"));
    let counts = split_corpus(&input, 3, 9, &train, &test).unwrap();
    assert_eq!(counts, SplitCounts { train: 7, test: 3 });
    let ids_of = |p: &std::path::Path| -> HashSet<String> { parse_corpus(p).unwrap().map(|s| s.unwrap().id).collect() };
    let (tr, te) = (ids_of(&train), ids_of(&test));
    assert!(tr.is_disjoint(&te));
    assert_eq!(tr.len() + te.len(), 10);
}

fn shape(id: &str, s: StandardPrimitive) -> Primitive {
    Primitive::from_standard(id, &s).unwrap()
}

#[test]
fn stats_type_frequencies() {
    let line = |id: &str, y: f64| shape(id, StandardPrimitive::Line { start: Vec2::new(0.0, y), end: Vec2::new(1.0, y) });
    let s = Sketch::new(
        "f",
        vec![
            line("a", 0.0),
            line("b", 1.0),
            line("c", 2.0),
            shape("d", StandardPrimitive::Circle { center: Vec2::ZERO, radius: 1.0 }),
        ],
        vec![Constraint::new(T::Horizontal, vec![EntityRef::whole("a")])],
    );
    let r = corpus_stats([&s]);
    let freq: Vec<(&str, f64)> = r.primitive_types.iter().map(|f| (f.name.as_str(), f.percent)).collect();
    assert_eq!(freq, vec![("Line", 75.0), ("Circle", 25.0)]);
}

#[test]
fn stats_uniform_sizes_collapse_percentiles() {
    let sketches: Vec<Sketch> = (0..20).map(|_| points(3, 2)).collect();
    let r = corpus_stats(&sketches);
    assert_eq!(r.primitive_count_histogram, vec![(3, 20)]);
    assert_eq!(r.percentiles.len(), 1);
    assert_eq!(r.percentiles[0].values, [2, 2, 2, 2]);
}

#[test]
fn stats_length_coverage() {
    // 5 + 3 + 1 of the top three values out of 10
    let mut cons = Vec::new();
    for (mm, n) in [(5.0, 5), (10.0, 3), (2.0, 1), (7.0, 1)] {
        for _ in 0..n {
            cons.push(Constraint::distance(EntityRef::whole("p0"), EntityRef::whole("p1"), Length::mm(mm)));
        }
    }
    let s = Sketch {
        constraints: cons,
        ..points(2, 0)
    };
    let r = corpus_stats([&s]);
    assert_eq!(r.lengths[0].label, "5 mm");
    assert_eq!(r.lengths[1].label, "1 cm");
    assert!((r.length_coverage[2] - 0.9).abs() < 1e-12);
    assert_eq!(*r.length_coverage.last().unwrap(), 1.0);
}

#[test]
fn stats_merge_is_chunking_invariant() {
    let sketches: Vec<Sketch> = synth_corpus(120, 8, GeneratorProfile::Mixed).collect();
    let whole = corpus_stats(&sketches);
    let mut parts: Vec<StatsAccumulator> = sketches
        .chunks(17)
        .map(|c| {
            let mut a = StatsAccumulator::default();
            c.iter().for_each(|s| a.push(s));
            a
        })
        .collect();
    parts.reverse();
    let mut merged = StatsAccumulator::default();
    for p in &parts {
        merged.merge(p);
    }
    let m = merged.finish();
    assert_eq!(m.primitive_types, whole.primitive_types);
    assert_eq!(m.constraint_types, whole.constraint_types);
    assert_eq!(m.percentiles, whole.percentiles);
    assert_eq!(m.lengths, whole.lengths);
    assert!((m.dof_correlation.unwrap() - whole.dof_correlation.unwrap()).abs() < 1e-12);
    let total: f64 = whole.constraint_types.iter().map(|f| f.percent).sum();
    assert!((total - 100.0).abs() < 0.01);
}

#[test]
fn synth_contracts() {
    assert_eq!(synth_corpus(0, 1, GeneratorProfile::Mixed).count(), 0);
    for profile in [GeneratorProfile::Autoconstrain, GeneratorProfile::Mixed] {
        let a: Vec<Sketch> = synth_corpus(300, 4, profile).collect();
        assert_eq!(bytes(&a), bytes(&synth_corpus(300, 4, profile).collect::<Vec<_>>()));
        for s in &a {
            s.validate().unwrap();
            for c in &s.constraints {
                assert!(is_satisfied(c, s, 1e-9).unwrap(), "{} {:?}", s.id, c);
            }
            if profile == GeneratorProfile::Autoconstrain {
                assert!(s.primitives.len() <= 16);
                assert!(s.primitives.iter().all(|p| p.kind().is_solver_supported()));
                assert!(s.constraints.iter().all(crate::autoconstrain::is_enumerable));
            }
        }
    }
}

#[test]
fn perturbation_breaks_and_solver_restores() {
    let s = synth_nth(3, 2, GeneratorProfile::Autoconstrain);
    let p = perturb_geometry(&s, 0.01, 1);
    assert!(p.constraints.iter().any(|c| !is_satisfied(c, &p, 1e-6).unwrap()));
    let r = crate::solver::solve(&p, &[], &Default::default()).unwrap();
    assert!(r.converged);
}
