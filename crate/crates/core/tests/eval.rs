use scuc_core::driver::{solve_deterministic, DriverOptions};
use scuc_core::eval::*;
use scuc_core::model::*;
use scuc_core::scuc::Schedule;
use scuc_core::stochastic::{sample, Provenance, ScenarioSet};

fn set(deviates: Vec<Vec<f64>>) -> ScenarioSet {
    let n = deviates.len();
    ScenarioSet {
        deviates,
        probabilities: vec![1.0 / n as f64; n],
        seed: 0,
        provenance: Provenance::Raw,
    }
}

fn triangle() -> (SystemCase, NetworkModel, Schedule) {
    let case = bundled_case("triangle3").unwrap();
    let net = compute_shift_factors(&case).unwrap();
    let s = solve_deterministic(&case, &DriverOptions::default())
        .unwrap()
        .schedule;
    (case, net, s)
}

#[test]
fn forecast_scenarios_are_always_correctable() {
    let (case, net, s) = triangle();
    let m = case.uncertain_variables().len();
    let r = cai(
        &case,
        &net,
        &s,
        &set(vec![vec![1.0; m]; 5]),
        &CaiOptions::default(),
    )
    .unwrap();
    assert_eq!(r.cai, 0.0);
    assert!(r.hourly_violation.iter().all(|&p| p == 0.0));
}

#[test]
fn scenarios_beyond_headroom_are_never_correctable() {
    let (case, net, s) = triangle();
    let m = case.uncertain_variables().len();
    let mut dev = vec![3.0; m];
    // wind sits last; keep it at forecast so only load moves
    *dev.last_mut().unwrap() = 1.0;
    for aggregate_only in [true, false] {
        let r = cai(
            &case,
            &net,
            &s,
            &set(vec![dev.clone(); 4]),
            &CaiOptions {
                aggregate_only,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(r.cai, 1.0);
    }
}

#[test]
fn half_satisfied_gives_one_half() {
    let (case, net, s) = triangle();
    let m = case.uncertain_variables().len();
    let mut bad = vec![3.0; m];
    *bad.last_mut().unwrap() = 1.0;
    let r = cai(
        &case,
        &net,
        &s,
        &set(vec![vec![1.0; m], bad]),
        &CaiOptions::default(),
    )
    .unwrap();
    assert!((r.cai - 0.5).abs() < 1e-15);
    assert_eq!(r.satisfied, vec![true, false]);
}

#[test]
fn network_test_is_at_least_as_strict_as_the_band() {
    let case = bundled_case("six_bus").unwrap();
    let net = compute_shift_factors(&case).unwrap();
    let s = solve_deterministic(&case, &DriverOptions::default())
        .unwrap()
        .schedule;
    let sample_set = sample(&case, 2000, 31);
    let band = cai(
        &case,
        &net,
        &s,
        &sample_set,
        &CaiOptions {
            aggregate_only: true,
            ..Default::default()
        },
    )
    .unwrap();
    let full = cai(&case, &net, &s, &sample_set, &CaiOptions::default()).unwrap();
    assert!(full.cai >= band.cai);
    for (b, f) in band.satisfied.iter().zip(&full.satisfied) {
        assert!(
            b | !f,
            "a scenario passing the network test must pass the band"
        );
    }
    let worst = full.hourly_violation.iter().cloned().fold(0.0, f64::max);
    let total: f64 = full.hourly_violation.iter().sum();
    assert!(full.cai >= worst - 1e-12 && full.cai <= total + 1e-12);
}

#[test]
fn esc_arithmetic() {
    let case = bundled_case("tiny2").unwrap();
    let nt = case.num_hours();
    let base = Schedule::from_parts(
        &case,
        vec![vec![true; nt], vec![false; nt]],
        vec![vec![60.0; nt], vec![0.0; nt]],
    );
    assert_eq!(esc(&case, &base, &base), 0.0);

    let mut on = base.committed.clone();
    on[1][1] = true;
    let mut new = Schedule::from_parts(&case, on, base.dispatch.clone());
    new.total_cost = 10_000.0;
    let mut priced = case.clone();
    priced.units[1].no_load_cost = 100.0;
    assert!((esc(&priced, &new, &base) - 0.01).abs() < 1e-15);

    // dispatch changes alone do not count
    let mut moved = base.clone();
    moved.dispatch[0][0] = 80.0;
    assert_eq!(esc(&case, &moved, &base), 0.0);
}

#[test]
fn wrong_shapes_are_rejected() {
    let (case, net, s) = triangle();
    let bad = set(vec![vec![1.0; 7]]);
    assert!(matches!(
        cai(&case, &net, &s, &bad, &CaiOptions::default()),
        Err(EvalError::Shape { got: 7, .. })
    ));
    let mut short = s.clone();
    short.committed.pop();
    let m = case.uncertain_variables().len();
    assert!(matches!(
        cai(
            &case,
            &net,
            &short,
            &set(vec![vec![1.0; m]]),
            &CaiOptions::default()
        ),
        Err(EvalError::ScheduleShape { .. })
    ));
}

#[test]
fn report_outputs_are_reproducible() {
    let (case, net, s) = triangle();
    let sample_set = sample(&case, 1000, 4);
    let a = evaluate(
        &case,
        &net,
        &s,
        Some(&s),
        &sample_set,
        &CaiOptions::default(),
    )
    .unwrap();
    let b = evaluate(
        &case,
        &net,
        &s,
        Some(&s),
        &sample_set,
        &CaiOptions::default(),
    )
    .unwrap();
    assert_eq!(a.to_json(), b.to_json());
    assert_eq!(a.hourly_csv(), b.hourly_csv());
    assert_eq!(a.esc, Some(0.0));
    assert_eq!(a.cai_base, Some(a.cai));
    assert!(a.hourly_csv().starts_with("hour,violation_probability\n1,"));
    assert_eq!(a.hourly_csv().lines().count(), case.num_hours() + 1);
}
