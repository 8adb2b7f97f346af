use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::handdrawn::eval_bezier;
use super::*;
use crate::graph::ConstraintGraph;
use crate::model::{Constraint, ConstraintType, EntityRef};
use crate::sequence::canonical_sequence;

fn prim(id: &str, s: StandardPrimitive) -> Primitive {
    Primitive::from_standard(id, &s).unwrap()
}

fn v(x: f64, y: f64) -> Vec2 {
    Vec2::new(x, y)
}

fn three() -> Sketch {
    Sketch::new(
        "three",
        vec![
            prim("a", StandardPrimitive::Line { start: v(0.0, 0.0), end: v(2.0, 0.0) }),
            prim("b", StandardPrimitive::Circle { center: v(1.0, 1.0), radius: 0.5 }),
            prim(
                "c",
                StandardPrimitive::Arc {
                    center: v(0.0, 0.0),
                    radius: 1.0,
                    start: v(1.0, 0.0),
                    end: v(0.0, 1.0),
                    clockwise: false,
                },
            )
            .construction(true),
        ],
        vec![Constraint::new(ConstraintType::Horizontal, vec![EntityRef::whole("a")])],
    )
}

#[test]
fn unit_circle_is_one_circle_element() {
    let s = Sketch::new(
        "u",
        vec![prim("c", StandardPrimitive::Circle { center: v(0.0, 0.0), radius: 1.0 })],
        vec![],
    );
    let svg = render_svg(&s, &RenderOptions::default());
    assert_eq!(svg.matches("<circle").count(), 1);
    assert!(svg.contains(r#"r="1""#));
    assert!(svg.contains(r#"viewBox="-1.1 -1.1 2.2 2.2""#));
}

#[test]
fn construction_is_dashed() {
    let svg = render_svg(&three(), &RenderOptions::default());
    let dashed: Vec<&str> = svg.lines().filter(|l| l.contains("stroke-dasharray")).collect();
    assert_eq!(dashed.len(), 1);
    assert!(dashed[0].contains(" A "));
}

#[test]
fn empty_sketch_declares_view_box() {
    let svg = render_svg(&Sketch::new("e", vec![], vec![]), &RenderOptions::default());
    assert!(svg.contains(r#"viewBox="-1 -1 2 2""#));
    assert!(!svg.contains("<path"));
}

#[test]
fn arc_flags_follow_orientation() {
    let arc = |clockwise| {
        Sketch::new(
            "a",
            vec![prim(
                "c",
                StandardPrimitive::Arc {
                    center: v(0.0, 0.0),
                    radius: 1.0,
                    start: v(1.0, 0.0),
                    end: v(0.0, 1.0),
                    clockwise,
                },
            )],
            vec![],
        )
    };
    let ccw = render_svg(&arc(false), &RenderOptions::default());
    let cw = render_svg(&arc(true), &RenderOptions::default());
    assert!(ccw.contains("M 1 0 A 1 1 0 0 1 0 -1"), "{ccw}");
    assert!(cw.contains("M 1 0 A 1 1 0 1 0 0 -1"), "{cw}");
}

#[test]
fn steps_end_at_full_render() {
    let s = three();
    let seq = canonical_sequence(&s, &ConstraintGraph::build(&s).unwrap()).unwrap();
    let o = RenderOptions::default();
    let frames = render_steps(&s, &seq, &o).unwrap();
    assert_eq!(frames.len(), 3);
    assert_eq!(frames[2], render_svg(&s, &o));
    assert_eq!(frames[0].matches("<path").count(), 1);
    assert_eq!(frames[0].matches("<circle").count(), 0);
    let short = Sketch {
        primitives: s.primitives[..2].to_vec(),
        ..s.clone()
    };
    assert!(matches!(
        render_steps(&short, &seq, &o),
        Err(RenderError::InconsistentSequence(_))
    ));
}

fn noisy(mag: f64, seed: u64) -> RenderOptions {
    RenderOptions {
        noise_magnitude: mag,
        noise_seed: seed,
        ..Default::default()
    }
}

#[test]
fn handdrawn_is_seeded() {
    let s = three();
    assert_eq!(render_handdrawn(&s, &noisy(0.01, 3)), render_handdrawn(&s, &noisy(0.01, 3)));
    assert_ne!(render_handdrawn(&s, &noisy(0.01, 3)), render_handdrawn(&s, &noisy(0.01, 4)));
}

#[test]
fn zero_noise_knots_lie_on_primitives() {
    let s = three();
    let clean = handdrawn_strokes(&s, &noisy(0.0, 1));
    for (p, st) in s.primitives.iter().zip(&clean) {
        let st = st.as_ref().unwrap();
        let dense = sample_primitive(p, 20_000);
        for k in &st.knots {
            let d = dense.iter().map(|q| q.distance(*k)).fold(f64::INFINITY, f64::min);
            assert!(d < 1e-3, "{d}");
        }
    }
    // exact check against the analytic shapes
    let line = clean[0].as_ref().unwrap();
    assert!(line.knots.iter().all(|k| k.y == 0.0));
    let circle = clean[1].as_ref().unwrap();
    assert!(circle.knots.iter().all(|k| (k.distance(v(1.0, 1.0)) - 0.5).abs() < 1e-12));
}

fn random_primitive(rng: &mut ChaCha8Rng) -> StandardPrimitive {
    let mut p = || v(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let (a, b) = (p(), p());
    let r = 0.1 + a.norm();
    match (b.x * 4.0 + 4.0) as usize % 4 {
        0 => StandardPrimitive::Line { start: a, end: b },
        1 => StandardPrimitive::Circle { center: a, radius: r },
        2 => StandardPrimitive::Arc {
            center: a,
            radius: r,
            start: a + Vec2::from_angle(b.y * 3.0) * r,
            end: a + Vec2::from_angle(b.x * 3.0) * r,
            clockwise: b.y > 0.0,
        },
        _ => StandardPrimitive::Ellipse {
            center: a,
            major_dir: Vec2::from_angle(b.y * 3.0),
            radius: r,
            minor_radius: r * 0.5,
        },
    }
}

fn curve_samples(st: &Stroke) -> Vec<Vec2> {
    bezier_segments(st)
        .iter()
        .flat_map(|b| (0..=8).map(move |i| eval_bezier(b, i as f64 / 8.0)))
        .collect()
}

fn directed(a: &[Vec2], b: &[Vec2]) -> f64 {
    a.iter()
        .map(|p| b.iter().map(|q| p.distance(*q)).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
}

#[test]
fn hausdorff_within_four_sigma() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mag = 0.01;
    for i in 0..100 {
        let p = prim("p", random_primitive(&mut rng));
        let s = Sketch::new(format!("h{i}"), vec![p.clone()], vec![]);
        let sigma = mag * p.bbox().diagonal();
        let st = handdrawn_strokes(&s, &noisy(mag, i)).remove(0).unwrap();
        let noisy_pts = curve_samples(&st);
        let clean = sample_primitive(&p, 1500);
        let h = directed(&noisy_pts, &clean).max(directed(&clean, &noisy_pts));
        assert!(h <= 4.0 * sigma, "primitive {i}: {h} > {}", 4.0 * sigma);
    }
}

#[test]
fn view_box_contains_noisy_curves() {
    let s = three();
    let o = noisy(0.02, 9);
    let svg = render_handdrawn(&s, &o);
    let vb: Vec<f64> = svg
        .split("viewBox=\"")
        .nth(1)
        .unwrap()
        .split('"')
        .next()
        .unwrap()
        .split(' ')
        .map(|x| x.parse().unwrap())
        .collect();
    for st in handdrawn_strokes(&s, &o).into_iter().flatten() {
        for q in curve_samples(&st) {
            assert!(q.x >= vb[0] && q.x <= vb[0] + vb[2]);
            assert!(-q.y >= vb[1] && -q.y <= vb[1] + vb[3]);
        }
    }
}

#[test]
fn metadata_comment() {
    let o = RenderOptions {
        metadata: true,
        noise_seed: 5,
        ..Default::default()
    };
    assert!(render_svg(&three(), &o).contains("<!-- sketch three -->"));
    assert!(render_handdrawn(&three(), &o).contains("<!-- sketch three seed 5 -->"));
}
