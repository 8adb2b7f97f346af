use super::*;
use crate::model::{ConstraintType as T, StandardPrimitive as S};
use crate::Vec2;

fn line(id: &str, a: (f64, f64), b: (f64, f64)) -> Primitive {
    Primitive::from_standard(
        id,
        &S::Line {
            start: Vec2::new(a.0, a.1),
            end: Vec2::new(b.0, b.1),
        },
    )
    .unwrap()
}

fn circle(id: &str, x: f64, y: f64, r: f64) -> Primitive {
    Primitive::from_standard(
        id,
        &S::Circle {
            center: Vec2::new(x, y),
            radius: r,
        },
    )
    .unwrap()
}

fn has(cands: &[Candidate], kind: ConstraintType, locals: &[&str]) -> bool {
    let want: Vec<EntityRef> = locals.iter().map(|s| EntityRef::parse(s)).collect();
    cands.iter().any(|c| {
        let mut a = c.constraint.locals.clone();
        let mut b = want.clone();
        a.sort();
        b.sort();
        c.constraint.kind == kind && a == b
    })
}

#[test]
fn collinear_lines() {
    let s = Sketch::new(
        "c",
        vec![line("a", (0.0, 0.0), (1.0, 0.0)), line("b", (2.0, 0.0), (3.0, 0.0))],
        vec![],
    );
    let c = enumerate_candidates(&s, ENUMERATION_TOLERANCE);
    assert!(has(&c, T::Horizontal, &["a"]));
    assert!(has(&c, T::Horizontal, &["b"]));
    assert!(has(&c, T::Parallel, &["a", "b"]));
    assert!(has(&c, T::Equal, &["a", "b"]));
    assert!(has(&c, T::Coincident, &["a", "b"]));
    assert!(!has(&c, T::Perpendicular, &["a", "b"]));
    for cand in &c {
        assert!(crate::solver::is_satisfied(&cand.constraint, &s, ENUMERATION_TOLERANCE).unwrap());
    }
    let keys: HashSet<ConstraintKey> = c.iter().map(|x| ConstraintKey::of(&x.constraint)).collect();
    assert_eq!(keys.len(), c.len());
}

#[test]
fn circle_dimensions_snap() {
    let s = Sketch::new("c", vec![circle("c", 0.0, 0.0, 0.005)], vec![]);
    let c = enumerate_candidates(&s, ENUMERATION_TOLERANCE);
    let radius = c.iter().find(|x| x.constraint.kind == T::Radius).unwrap();
    assert_eq!(radius.constraint.length, Some(Length::mm(5.0)));
    let dia = c.iter().find(|x| x.constraint.kind == T::Diameter).unwrap();
    assert_eq!(dia.constraint.length, Some(Length::new(1.0, LengthUnit::Centimeter)));
}

#[test]
fn empty_and_generic_inputs() {
    assert!(enumerate_candidates(&Sketch::new("e", vec![], vec![]), 1e-6).is_empty());
    let pts = vec![
        Primitive::from_standard("p", &S::Point(Vec2::new(0.0, 0.0))).unwrap(),
        Primitive::from_standard("q", &S::Point(Vec2::new(0.31, 0.77))).unwrap(),
    ];
    let s = Sketch::new("g", pts, vec![]);
    let picked = infer_constraints(&s, &PriorityPolicy, DEFAULT_DOF_TARGET);
    // only the distance survives for generic points; nothing coincides
    assert!(picked.iter().all(|c| c.kind == T::Distance));
    assert!(infer_constraints(&s, &PriorityPolicy, s.total_dof()).is_empty());
}

#[test]
fn distance_cap_keeps_related_pairs() {
    let pts: Vec<Primitive> = (0..6)
        .map(|i| Primitive::from_standard(format!("p{i}"), &S::Point(Vec2::new(i as f64 * 0.1, 0.0))).unwrap())
        .collect();
    let s = Sketch::new("d", pts, vec![]);
    let opts = EnumerationOptions {
        max_distance_pairs: 3,
        ..Default::default()
    };
    let dists = enumerate_candidates_with(&s, &opts)
        .into_iter()
        .filter(|c| c.constraint.kind == T::Distance)
        .count();
    // every pair is horizontal, so all pairs are related
    assert_eq!(dists, 15);
    let spread: Vec<Primitive> = (0..6)
        .map(|i| {
            let t = i as f64;
            Primitive::from_standard(format!("p{i}"), &S::Point(Vec2::new(t * 0.1, t * t * 0.013))).unwrap()
        })
        .collect();
    let s = Sketch::new("d", spread, vec![]);
    let dists = enumerate_candidates_with(&s, &opts)
        .into_iter()
        .filter(|c| c.constraint.kind == T::Distance)
        .count();
    assert_eq!(dists, 3);
}

#[test]
fn rectangle_inference() {
    let e = |id: &str, sel| EntityRef::sub(id, sel);
    let gt = vec![
        Constraint::pair(T::Coincident, e("b", Selector::End), e("r", Selector::Start)),
        Constraint::pair(T::Coincident, e("r", Selector::End), e("t", Selector::Start)),
        Constraint::pair(T::Coincident, e("t", Selector::End), e("l", Selector::Start)),
        Constraint::pair(T::Coincident, e("l", Selector::End), e("b", Selector::Start)),
        Constraint::new(T::Horizontal, vec![EntityRef::whole("b")]),
        Constraint::new(T::Horizontal, vec![EntityRef::whole("t")]),
        Constraint::new(T::Vertical, vec![EntityRef::whole("l")]),
        Constraint::new(T::Vertical, vec![EntityRef::whole("r")]),
    ];
    let s = Sketch::new(
        "r",
        vec![
            line("b", (0.0, 0.0), (0.04, 0.0)),
            line("r", (0.04, 0.0), (0.04, 0.03)),
            line("t", (0.04, 0.03), (0.0, 0.03)),
            line("l", (0.0, 0.03), (0.0, 0.0)),
        ],
        gt.clone(),
    );
    let ev = evaluate_sketch(&s, &PriorityPolicy, DEFAULT_DOF_TARGET);
    assert_eq!(ev.enumeration_hits, ev.enumerable_truth);
    for c in &gt {
        assert!(
            ev.predicted.iter().any(|p| ConstraintKey::of(p) == ConstraintKey::of(c)),
            "missing {:?}",
            c
        );
    }
    // one dimension fits before the rigid-motion budget is reached
    assert_eq!(ev.predicted.len(), gt.len() + 1);
    let report = crate::dof::sketch_dof_report(&Sketch {
        constraints: ev.predicted.clone(),
        ..s.clone()
    });
    assert_eq!(report.remaining_dof, 3);
    let solved = crate::solver::solve(
        &Sketch {
            constraints: ev.predicted,
            ..s.stripped()
        },
        &[],
        &Default::default(),
    )
    .unwrap();
    assert!(solved.converged);
    assert_eq!(solved.iterations, 0);
}

#[test]
fn metrics_examples() {
    let w = EntityRef::whole;
    let e1 = Constraint::new(T::Horizontal, vec![w("a")]);
    let e2 = Constraint::new(T::Vertical, vec![w("a")]);
    let e3 = Constraint::new(T::Horizontal, vec![w("b")]);
    let m = evaluate_prediction(&[e1.clone(), e3], &[e1.clone(), e2.clone()]).unwrap();
    assert_eq!(m, EvalMetrics::from_counts(1, 2, 2));
    assert_eq!((m.precision, m.recall, m.f1), (0.5, 0.5, 0.5));
    let same = evaluate_prediction(&[e1.clone(), e2.clone()], &[e2.clone(), e1.clone()]).unwrap();
    assert_eq!((same.precision, same.recall, same.f1), (1.0, 1.0, 1.0));
    let none = evaluate_prediction(&[], std::slice::from_ref(&e1)).unwrap();
    assert_eq!((none.precision, none.recall, none.f1), (0.0, 0.0, 0.0));
    assert_eq!(evaluate_prediction(&[e1], &[]), Err(EvalError::EmptyGroundTruth));
}

#[test]
fn key_ignores_member_order_and_half_space() {
    let a = Constraint::distance(EntityRef::whole("p"), EntityRef::whole("q"), Length::mm(5.0));
    let b = Constraint::distance(
        EntityRef::whole("q"),
        EntityRef::whole("p"),
        Length::new(0.5, LengthUnit::Centimeter),
    )
    .with_half_spaces(HalfSpace::Right, HalfSpace::Right);
    assert_eq!(ConstraintKey::of(&a), ConstraintKey::of(&b));
}
