use rendezvous_core::geometry::Point;
use rendezvous_core::kernel::Phase;
use rendezvous_core::sim::{run_scenario, EventKind, Outcome, Scenario, Trajectory};
use rendezvous_core::{AgentId, LabelSpace, Scalar};

fn space(size: u64) -> LabelSpace {
    LabelSpace::new(size).unwrap()
}

fn int(v: i64) -> Scalar {
    Scalar::from_int(v)
}

#[test]
fn staggered_monotone_meets_within_bound() {
    let s = Scenario::monotone(
        space(4),
        (1, 2),
        Point::from_ints(0, 0),
        Point::from_ints(0, 10),
    )
    .with_starts(int(0), int(5));
    let out = run_scenario(&s).unwrap();
    let r = &out.report;
    eprintln!("{}", r.to_json());
    assert!(r.met);
    assert_eq!(r.agents.a.final_phase, Phase::InertForever);
    let bound = r.bound.as_ref().unwrap();
    assert_eq!(bound.limit, int(18));
    assert_eq!(bound.holds, Some(true));
    assert!(r.time_upper().unwrap() <= &int(18));
}

#[test]
fn simultaneous_monotone_meets_within_bound() {
    let s = Scenario::monotone(
        space(4),
        (2, 3),
        Point::from_ints(0, 0),
        Point::from_ints(3, 4),
    );
    let out = run_scenario(&s).unwrap();
    let r = &out.report;
    eprintln!("{}", r.to_json());
    assert!(r.met);
    assert_eq!(r.bound.as_ref().unwrap().limit, int(12));
    assert_eq!(r.bound.as_ref().unwrap().holds, Some(true));
}

#[test]
fn binary_simultaneous_meets() {
    let s = Scenario::binary(
        space(4),
        (1, 2),
        Point::from_ints(0, 0),
        Point::from_ints(0, 3),
        int(8),
    );
    let out = run_scenario(&s).unwrap();
    eprintln!("{}", out.report.to_json());
    assert!(out.report.met);
    let leads: Vec<_> = [&out.report.agents.a, &out.report.agents.b]
        .iter()
        .filter_map(|a| a.leading)
        .collect();
    assert_eq!(leads.iter().filter(|&&l| l).count(), 1);
}

#[test]
fn readings_only_at_appearance_and_action_end() {
    let s = Scenario::monotone(
        space(16),
        (5, 9),
        Point::from_ints(-3, 7),
        Point::new(Scalar::ratio(11, 3), Scalar::ratio(-5, 7)),
    );
    let out = run_scenario(&s).unwrap();
    let mut prev: Option<&EventKind> = None;
    for e in &out.trace {
        if let EventKind::Reading { .. } = e.kind {
            let ok = matches!(
                prev,
                Some(
                    EventKind::Appear { .. }
                        | EventKind::ActionEnd { .. }
                        | EventKind::Reading { .. }
                )
            );
            assert!(ok, "reading after {prev:?}");
        }
        prev = Some(&e.kind);
    }
    for w in out.trace.windows(2) {
        assert!(
            w[0].order_key() <= w[1].order_key(),
            "{:?} then {:?}",
            w[0],
            w[1]
        );
    }
}

#[test]
fn action_end_positions_follow_kinematics() {
    let s = Scenario::monotone(
        space(64),
        (17, 40),
        Point::from_ints(2, 2),
        Point::from_ints(30, -12),
    )
    .with_starts(Scalar::ratio(7, 4), int(0));
    let out = run_scenario(&s).unwrap();
    let traj = Trajectory::from_trace(&out.trace);
    for e in &out.trace {
        if let (EventKind::ActionEnd { pos }, Some(agent)) = (&e.kind, e.agent) {
            assert_eq!(traj.position_at(agent, &e.time).as_ref(), Some(pos));
        }
    }
    assert_eq!(traj.position_at(AgentId::A, &int(1)), None);
}

#[test]
fn pending_appearance_is_the_next_instant() {
    let s = Scenario::monotone(
        space(4),
        (1, 2),
        Point::from_ints(0, 0),
        Point::from_ints(0, 10),
    )
    .with_starts(int(0), int(5));
    let out = run_scenario(&s).unwrap();
    let appear_b = out
        .trace
        .iter()
        .find(|e| matches!(e.kind, EventKind::Appear { .. }) && e.agent == Some(AgentId::B))
        .unwrap();
    assert_eq!(appear_b.time, int(5));
    assert!(out
        .trace
        .iter()
        .find(|e| e.time > int(0) && e.time < int(5))
        .is_none());
}

#[test]
fn touch_interrupts_pending_action_end() {
    let s = Scenario::monotone(
        space(4),
        (2, 3),
        Point::from_ints(0, 0),
        Point::from_ints(3, 4),
    );
    let out = run_scenario(&s).unwrap();
    let last = out.trace.last().unwrap();
    assert!(matches!(last.kind, EventKind::Meeting { .. }));
    assert_eq!(out.report.outcome, Outcome::Met);
}

#[test]
fn already_touching_meets_at_later_start() {
    let s = Scenario::monotone(
        space(4),
        (1, 2),
        Point::from_ints(0, 0),
        Point::new(Scalar::ratio(3, 5), Scalar::ratio(4, 5)),
    )
    .with_starts(int(1), int(3));
    let out = run_scenario(&s).unwrap();
    assert!(out.report.met);
    assert_eq!(out.report.touch.as_ref().unwrap().exact, Some(int(3)));
    assert_eq!(out.report.time_upper(), Some(&int(0)));
}

#[test]
fn strict_loop_misses_last_bit() {
    // transformed labels of 0 and 1 in L = 4 differ only at the last bit
    let s = Scenario::binary(
        space(4),
        (0, 1),
        Point::from_ints(0, 0),
        Point::from_ints(0, 3),
        int(8),
    );
    assert_eq!(run_scenario(&s).unwrap().report.outcome, Outcome::Met);
    let mut strict = s.clone();
    strict.strict_paper_loop = true;
    assert_eq!(
        run_scenario(&strict).unwrap().report.outcome,
        Outcome::BudgetExhausted
    );
}

#[test]
fn strict_loop_with_one_bit_is_a_protocol_error() {
    let mut s = Scenario::binary(
        space(2),
        (0, 1),
        Point::from_ints(0, 0),
        Point::from_ints(0, 3),
        int(8),
    );
    s.strict_paper_loop = true;
    let err = run_scenario(&s).unwrap_err();
    assert!(matches!(
        err,
        rendezvous_core::Error::Simulation(rendezvous_core::SimulationError::Protocol { .. })
    ));
}
