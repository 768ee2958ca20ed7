use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use scuc_core::optkernel::{
    kkt_residuals, solve_lp, solve_milp, LinearProgram, MilpOptions, Sense, Status,
};

/// Random LP with a known feasible point so that most instances are feasible.
fn random_lp(rng: &mut ChaCha8Rng, n: usize, m: usize) -> LinearProgram {
    let mut lp = LinearProgram::new();
    let point: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..5.0)).collect();
    for j in 0..n {
        let lo = if rng.random_bool(0.8) {
            0.0
        } else {
            f64::NEG_INFINITY
        };
        let hi = if rng.random_bool(0.7) {
            point[j] + rng.random_range(0.5..5.0)
        } else {
            f64::INFINITY
        };
        lp.add_var(format!("x{j}"), rng.random_range(-3.0..5.0), lo, hi);
    }
    for i in 0..m {
        let mut terms: Vec<(usize, f64)> = Vec::new();
        for j in 0..n {
            if rng.random_bool(0.6) {
                terms.push((j, rng.random_range(-4.0..4.0f64).round() + 0.5));
            }
        }
        let act: f64 = terms.iter().map(|&(j, a)| a * point[j]).sum();
        let (sense, rhs) = match rng.random_range(0..3) {
            0 => (Sense::Le, act + rng.random_range(0.0..3.0)),
            1 => (Sense::Ge, act - rng.random_range(0.0..3.0)),
            _ => (Sense::Eq, act),
        };
        lp.add_constraint(format!("r{i}"), terms, sense, rhs);
    }
    // keep the problem bounded below
    let all: Vec<(usize, f64)> = (0..n).map(|j| (j, 1.0)).collect();
    lp.add_constraint("box_hi", all.clone(), Sense::Le, 50.0);
    lp.add_constraint("box_lo", all, Sense::Ge, -50.0);
    for j in 0..n {
        if lp.lower[j] == f64::NEG_INFINITY {
            lp.lower[j] = -30.0;
        }
    }
    lp
}

#[test]
fn random_lps_satisfy_kkt() {
    let mut optimal = 0;
    for seed in 0..300u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.random_range(1..9);
        let m = rng.random_range(1..9);
        let lp = random_lp(&mut rng, n, m);
        let sol = solve_lp(&lp).unwrap();
        assert_ne!(sol.status, Status::IterationLimit, "seed {seed}");
        if sol.status == Status::Optimal {
            optimal += 1;
            let res = kkt_residuals(&lp, &sol);
            assert!(res.within_tolerance(sol.objective), "seed {seed}: {res:?}");
        }
    }
    assert!(optimal > 250, "only {optimal} optimal instances");
}

fn random_binary_program(rng: &mut ChaCha8Rng, k: usize, cont: usize) -> LinearProgram {
    let mut lp = LinearProgram::new();
    for j in 0..k {
        lp.add_binary(format!("b{j}"), rng.random_range(-10.0..10.0f64).round());
    }
    for j in 0..cont {
        lp.add_var(
            format!("c{j}"),
            rng.random_range(-2.0..4.0),
            0.0,
            rng.random_range(1.0..6.0),
        );
    }
    let n = k + cont;
    for i in 0..rng.random_range(1..6) {
        let mut terms: Vec<(usize, f64)> = Vec::new();
        for j in 0..n {
            if rng.random_bool(0.5) {
                terms.push((j, rng.random_range(-5.0..8.0f64).round()));
            }
        }
        let sense = if rng.random_bool(0.7) {
            Sense::Le
        } else {
            Sense::Ge
        };
        let rhs = match sense {
            Sense::Le => rng.random_range(0.0..12.0f64).round(),
            _ => rng.random_range(-6.0..4.0f64).round(),
        };
        lp.add_constraint(format!("r{i}"), terms, sense, rhs);
    }
    lp
}

/// Exhaustive oracle: enumerate binaries, LP over the continuous part.
fn enumerate(lp: &LinearProgram, k: usize) -> Option<f64> {
    let mut best: Option<f64> = None;
    for mask in 0u32..(1 << k) {
        let mut fixed = lp.clone();
        for j in 0..k {
            let v = ((mask >> j) & 1) as f64;
            fixed.lower[j] = v;
            fixed.upper[j] = v;
            fixed.integer[j] = false;
        }
        let sol = solve_lp(&fixed).unwrap();
        if sol.status == Status::Optimal {
            best = Some(best.map_or(sol.objective, |b: f64| b.min(sol.objective)));
        }
    }
    best
}

#[test]
fn milp_matches_enumeration() {
    for seed in 0..150u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let k = rng.random_range(1..9);
        let cont = rng.random_range(0..3);
        let lp = random_binary_program(&mut rng, k, cont);
        let sol = solve_milp(&lp, &MilpOptions::default()).unwrap();
        match enumerate(&lp, k) {
            None => assert_eq!(sol.status, Status::Infeasible, "seed {seed}"),
            Some(best) => {
                assert_eq!(sol.status, Status::Optimal, "seed {seed}");
                assert!(
                    (sol.objective - best).abs() <= 1e-6 * (1.0 + best.abs()),
                    "seed {seed}: {} vs {best}",
                    sol.objective
                );
            }
        }
    }
}
