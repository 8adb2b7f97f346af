mod common;

use std::f64::consts::TAU;

use proptest::prelude::*;

use sg_core::autoconstrain::{infer_constraints, PriorityPolicy, ENUMERATION_TOLERANCE};
use sg_core::dof::{jacobian_rank_dof, sketch_dof_report, Pearson};
use sg_core::ingest::{
    assign_test, corpus_stats, filter_corpus, parse_record, sketch_from_json, sketch_to_json, synth_nth,
    write_record, FilterOptions, GeneratorProfile, StatsAccumulator,
};
use sg_core::model::StandardPrimitive as S;
use sg_core::render::{fit_view_box, fmt_num, sample_primitive, sketch_bbox};
use sg_core::sequence::{sketch_sequence, SequenceOrder, TokenVocabulary, VocabularyOptions};
use sg_core::solver::{is_satisfied, solve};
use sg_core::{Primitive, Vec2};

fn vec2() -> impl Strategy<Value = Vec2> {
    (-10.0..10.0f64, -10.0..10.0f64).prop_map(|(x, y)| Vec2::new(x, y))
}

fn standard() -> impl Strategy<Value = S> {
    prop_oneof![
        vec2().prop_map(S::Point),
        (vec2(), 0.0..TAU, 0.001..5.0f64).prop_map(|(start, t, l)| S::Line {
            start,
            end: start + Vec2::from_angle(t) * l,
        }),
        (vec2(), 0.001..5.0f64).prop_map(|(center, radius)| S::Circle { center, radius }),
        (vec2(), 0.001..5.0f64, 0.0..TAU, 0.05..TAU - 0.05, any::<bool>()).prop_map(|(center, radius, t0, span, cw)| {
            S::Arc {
                center,
                radius,
                start: center + Vec2::from_angle(t0) * radius,
                end: center + Vec2::from_angle(t0 + span) * radius,
                clockwise: cw,
            }
        }),
        (vec2(), 0.0..TAU, 0.01..5.0f64, 0.05..1.0f64).prop_map(|(center, t, r, k)| S::Ellipse {
            center,
            major_dir: Vec2::from_angle(t),
            radius: r,
            minor_radius: r * k,
        }),
        prop::collection::vec(vec2(), 2..8).prop_map(|control_points| S::Spline { control_points }),
    ]
}

fn profile() -> impl Strategy<Value = GeneratorProfile> {
    prop_oneof![Just(GeneratorProfile::Autoconstrain), Just(GeneratorProfile::Mixed)]
}

proptest! {
    #[test]
    fn standard_form_round_trips(s in standard()) {
        let p = Primitive::from_standard("p", &s).unwrap();
        let back = p.to_standard().unwrap();
        prop_assert!(s.max_abs_diff(&back).unwrap() < 1e-9);
        prop_assert_eq!(p.dof(), s.dof());
    }

    #[test]
    fn samples_stay_inside_the_view(s in prop::collection::vec(standard(), 1..6)) {
        let prims: Vec<Primitive> = s.iter().enumerate().map(|(i, x)| common::prim(&format!("p{i}"), x.clone())).collect();
        let view = fit_view_box(&sketch_bbox(&prims));
        for p in &prims {
            for q in sample_primitive(p, 32) {
                let slack = 1e-9 * (1.0 + view[2].max(view[3]));
                prop_assert!(q.x >= view[0] - slack && q.x <= view[0] + view[2] + slack);
                prop_assert!(-q.y >= view[1] - slack && -q.y <= view[1] + view[3] + slack);
            }
        }
    }

    #[test]
    fn fmt_num_keeps_six_digits(x in -1e6..1e6f64) {
        let s = fmt_num(x);
        prop_assert!(!s.contains('e') && s != "-0");
        let back: f64 = s.parse().unwrap();
        prop_assert!((back - x).abs() <= 5e-6 * x.abs() + 1e-12);
    }

    #[test]
    fn pearson_merge_matches_sequential(pts in prop::collection::vec((-100.0..100.0f64, -100.0..100.0f64), 3..60), cut in 0usize..60) {
        let cut = cut.min(pts.len());
        let mut all = Pearson::default();
        let (mut a, mut b) = (Pearson::default(), Pearson::default());
        for (i, &(x, y)) in pts.iter().enumerate() {
            all.push(x, y);
            if i < cut { a.push(x, y) } else { b.push(x, y) }
        }
        a.merge(&b);
        prop_assert_eq!(a.count(), all.count());
        if let (Ok(m), Ok(s)) = (a.coefficient(), all.coefficient()) {
            prop_assert!((m - s).abs() < 1e-9);
        }
    }

    #[test]
    fn split_size_and_order_independence(n in 1usize..80, k in 0usize..80, seed in any::<u64>()) {
        let k = k.min(n);
        let ids: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
        let test = assign_test(&ids, k, seed).unwrap();
        prop_assert_eq!(test.iter().filter(|x| **x).count(), k);
        let rev: Vec<String> = ids.iter().rev().cloned().collect();
        let test_rev = assign_test(&rev, k, seed).unwrap();
        let flipped: Vec<bool> = test_rev.into_iter().rev().collect();
        prop_assert_eq!(test, flipped);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn records_round_trip(index in 0u64..10_000, seed in 0u64..100, p in profile()) {
        let s = synth_nth(index, seed, p);
        prop_assert_eq!(&sketch_from_json(&sketch_to_json(&s)).unwrap(), &s);
        let mut line = Vec::new();
        write_record(&mut line, &s).unwrap();
        let text = String::from_utf8(line).unwrap();
        let again = parse_record(text.trim_end(), 1).unwrap();
        let mut line2 = Vec::new();
        write_record(&mut line2, &again).unwrap();
        prop_assert_eq!(text.into_bytes(), line2);
    }

    #[test]
    fn synthetic_sketches_are_solved(index in 0u64..10_000, seed in 0u64..100, p in profile()) {
        let s = synth_nth(index, seed, p);
        for c in &s.constraints {
            prop_assert!(is_satisfied(c, &s, 1e-9).unwrap());
        }
        let r = solve(&s, &[], &Default::default()).unwrap();
        prop_assert!(r.converged);
        prop_assert_eq!(r.iterations, 0);
    }

    #[test]
    fn residual_count_never_undercounts_rank(index in 0u64..10_000, seed in 0u64..100) {
        let s = synth_nth(index, seed, GeneratorProfile::Autoconstrain);
        let report = sketch_dof_report(&s);
        let free = jacobian_rank_dof(&s).unwrap();
        prop_assert!(report.remaining_dof <= free);
    }

    #[test]
    fn tokens_round_trip_normalized_sequences(index in 0u64..10_000, seed in 0u64..100, p in profile()) {
        let s = synth_nth(index, seed, p);
        let seq = sketch_sequence(&s, SequenceOrder::Canonical).unwrap();
        let vocab = TokenVocabulary::build([&seq], &VocabularyOptions::default());
        let tokens = vocab.tokenize(&seq).unwrap();
        let back = vocab.detokenize(&tokens).unwrap();
        prop_assert_eq!(back.ops.len(), seq.ops.len());
        prop_assert_eq!(vocab.tokenize(&back).unwrap(), tokens);
    }

    #[test]
    fn inferred_constraints_hold_on_input(index in 0u64..10_000, seed in 0u64..100) {
        let s = synth_nth(index, seed, GeneratorProfile::Autoconstrain).stripped();
        let picked = infer_constraints(&s, &PriorityPolicy, 3);
        for c in &picked {
            prop_assert!(is_satisfied(c, &s, ENUMERATION_TOLERANCE).unwrap());
        }
        let report = sketch_dof_report(&sg_core::Sketch { constraints: picked, ..s });
        prop_assert!(report.remaining_dof >= 3 || report.total_dof < 3);
    }

    #[test]
    fn stats_merge_is_chunking_invariant(seed in 0u64..1000, n in 2u64..40, cut in 0u64..40) {
        let corpus: Vec<_> = (0..n).map(|i| synth_nth(i, seed, GeneratorProfile::Mixed)).collect();
        let cut = cut.min(n) as usize;
        let mut a = StatsAccumulator::default();
        let mut b = StatsAccumulator::default();
        corpus[..cut].iter().for_each(|s| a.push(s));
        corpus[cut..].iter().for_each(|s| b.push(s));
        b.merge(&a);
        let whole = corpus_stats(&corpus);
        let merged = b.finish();
        prop_assert_eq!(merged.primitive_types, whole.primitive_types);
        prop_assert_eq!(merged.percentiles, whole.percentiles);
        prop_assert_eq!(merged.lengths, whole.lengths);
    }

    #[test]
    fn filtering_is_idempotent(seed in 0u64..1000, min_p in 1usize..10, max_p in 1usize..20) {
        let opts = FilterOptions { min_primitives: min_p, max_primitives: Some(max_p), ..Default::default() };
        let corpus: Vec<_> = (0..20).map(|i| synth_nth(i, seed, GeneratorProfile::Mixed)).collect();
        let once: Vec<_> = filter_corpus(corpus, &opts).collect();
        let twice: Vec<_> = filter_corpus(once.clone(), &opts).collect();
        prop_assert_eq!(once, twice);
    }
}
