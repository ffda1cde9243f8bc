use proptest::prelude::*;
use rendezvous_core::geometry::{first_touch_time, squared_distance, MotionSegment, Velocity};
use rendezvous_core::harness::check;
use rendezvous_core::oracle::{compare, default_dt, oracle_run, Agreement, OracleConfig};
use rendezvous_core::sim::Trajectory;
use rendezvous_core::{run_scenario, AgentId, Direction, LabelSpace, Point, Scalar, Scenario};

fn seg(t0: i64, t1: i64, x: Scalar, y: Scalar, v: Velocity) -> MotionSegment {
    MotionSegment::new(
        Scalar::from_int(t0),
        Scalar::from_int(t1),
        Point::new(x, y),
        v,
    )
    .unwrap()
}

fn staggered() -> Scenario {
    Scenario::monotone(
        LabelSpace::new(4).unwrap(),
        (1, 2),
        Point::from_ints(0, 0),
        Point::from_ints(0, 10),
    )
    .with_starts(Scalar::zero(), Scalar::from_int(5))
}

#[test]
fn inert_and_west_mover_touch_at_two() {
    let inert = seg(0, 10, Scalar::zero(), Scalar::zero(), Velocity::Still);
    let mover = seg(
        0,
        10,
        Scalar::from_int(3),
        Scalar::zero(),
        Velocity::Cardinal(Direction::W),
    );
    let t = first_touch_time(
        &inert,
        &mover,
        &Scalar::zero(),
        &Scalar::from_int(10),
        &Scalar::one(),
        40,
    )
    .unwrap()
    .unwrap();
    assert_eq!(t.exact(), Some(&Scalar::from_int(2)));
}

#[test]
fn irrational_touch_is_bracketed() {
    // (3 - t)^2 + 1/4 = 1 at t = 3 - sqrt(3)/2
    let inert = seg(0, 10, Scalar::zero(), Scalar::zero(), Velocity::Still);
    let mover = seg(
        0,
        10,
        Scalar::from_int(3),
        Scalar::ratio(1, 2),
        Velocity::Cardinal(Direction::W),
    );
    let t = first_touch_time(
        &inert,
        &mover,
        &Scalar::zero(),
        &Scalar::from_int(10),
        &Scalar::one(),
        40,
    )
    .unwrap()
    .unwrap();
    assert!(t.exact().is_none());
    assert!(t.width() <= Scalar::pow2_neg(40));
    let root = 3.0 - 3f64.sqrt() / 2.0;
    assert!(t.lo().to_f64() <= root + 1e-12 && root - 1e-12 <= t.hi().to_f64());
}

#[test]
fn oracle_time_lies_in_executor_bracket() {
    let s = staggered();
    let dt = default_dt();
    let out = run_scenario(&s).unwrap();
    let verdict = oracle_run(&OracleConfig::new(s.clone()).with_dt(dt.clone())).unwrap();
    let touch = out.report.touch.as_ref().unwrap();
    let t = verdict.time.as_ref().unwrap();
    assert!(
        t >= &touch.lo && t <= &(&touch.hi + &dt),
        "{t} vs [{}, {}]",
        touch.lo,
        touch.hi
    );
    let limit = s.later_start() + s.effective_budget();
    assert!(matches!(
        compare(&out.report, &verdict, &dt, &limit),
        Agreement::Agree { .. }
    ));
}

#[test]
fn halving_dt_shrinks_the_gap() {
    let scenarios = [
        staggered(),
        Scenario::monotone(
            LabelSpace::new(64).unwrap(),
            (17, 40),
            Point::from_ints(2, 2),
            Point::new(Scalar::ratio(61, 3), Scalar::ratio(-29, 7)),
        ),
        Scenario::binary(
            LabelSpace::new(16).unwrap(),
            (3, 12),
            Point::from_ints(0, 0),
            Point::new(Scalar::ratio(7, 3), Scalar::ratio(5, 2)),
            Scalar::from_int(8),
        ),
    ];
    for s in scenarios {
        let gap = |dt: Scalar| match check(&s, &dt).unwrap() {
            Agreement::Agree { gap: Some(g) } => {
                assert!(g <= dt);
                g
            }
            other => panic!("{other:?}"),
        };
        let coarse = gap(Scalar::pow2_neg(8));
        let fine = gap(Scalar::pow2_neg(9));
        assert!(
            fine <= coarse || fine <= Scalar::pow2_neg(10),
            "{fine} vs {coarse}"
        );
    }
}

#[test]
fn recorded_samples_match_executor_trajectory() {
    let s = staggered();
    let verdict = oracle_run(
        &OracleConfig::new(s.clone())
            .with_dt(Scalar::pow2_neg(4))
            .recording(),
    )
    .unwrap();
    let out = run_scenario(&s).unwrap();
    let traj = Trajectory::from_trace(&out.trace);
    assert!(verdict.samples.len() > 50);
    for sample in &verdict.samples {
        assert_eq!(
            traj.position_at(AgentId::A, &sample.time),
            sample.pos_a,
            "t = {}",
            sample.time
        );
        assert_eq!(
            traj.position_at(AgentId::B, &sample.time),
            sample.pos_b,
            "t = {}",
            sample.time
        );
    }
}

fn coord() -> impl Strategy<Value = Scalar> {
    (-64i64..64, 0u32..4).prop_map(|(n, k)| Scalar::ratio(n, 1 << k))
}

fn velocity() -> impl Strategy<Value = Velocity> {
    prop_oneof![
        Just(Velocity::Still),
        Just(Velocity::Cardinal(Direction::N)),
        Just(Velocity::Cardinal(Direction::E)),
        Just(Velocity::Cardinal(Direction::S)),
        Just(Velocity::Cardinal(Direction::W)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn first_touch_agrees_with_dense_sampling(
        (ax, ay, av) in (coord(), coord(), velocity()),
        (bx, by, bv) in (coord(), coord(), velocity()),
    ) {
        let end = 8;
        let a = seg(0, end, ax, ay, av);
        let b = seg(0, end, bx, by, bv);
        let one = Scalar::one();
        let touch = first_touch_time(&a, &b, &Scalar::zero(), &Scalar::from_int(end), &one, 40).unwrap();
        let dt = Scalar::pow2_neg(10);
        let dist_sq = |t: &Scalar| squared_distance(&a.position_at(t), &b.position_at(t));
        let mut sampled = None;
        let mut k = 0i64;
        while k <= end << 10 {
            let t = &dt * &Scalar::from_int(k);
            if dist_sq(&t) <= one {
                sampled = Some(t);
                break;
            }
            k += 1;
        }
        match (&touch, &sampled) {
            (None, Some(t)) => prop_assert!(false, "sampling touched at {t}, solver found none"),
            (Some(touch), _) => {
                // dist^2 is convex along the segments: one sublevel interval
                if let Some(t) = &sampled {
                    prop_assert!(t >= touch.lo());
                    prop_assert!(t <= &(touch.hi() + &dt));
                }
                match touch.exact() {
                    Some(t) => prop_assert!(dist_sq(t) <= one),
                    None => {
                        prop_assert!(dist_sq(touch.lo()) > one);
                        prop_assert!(dist_sq(touch.hi()) <= one);
                    }
                }
            }
            (None, None) => {}
        }
    }
}
