use covert_core::link::db_to_linear;
use covert_core::metrics::{cop_at_optimal_theta, sop, tp};
use covert_core::solver::{solve, solve_fp, solve_ip, solve_reference};
use covert_core::{GridSpec, NoiseProfile, Regime, ScenarioId, SecurityConstraints, ToleranceSpec, TransmitConfig};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const LEVELS: [f64; 4] = [0.01, 0.05, 0.1, 0.3];

fn cons(c: f64, s: f64, t: f64) -> SecurityConstraints {
    SecurityConstraints::new(c, s, t).unwrap()
}

fn pa_for(scenario: ScenarioId, pa_db: f64) -> Option<f64> {
    scenario.uses_artificial_noise().then(|| db_to_linear(pa_db))
}

fn agree(closed: f64, reference: f64) -> bool {
    if closed == 0.0 {
        reference == 0.0
    } else {
        (reference / closed - 1.0).abs() <= 1e-3
    }
}

#[test]
fn power_control_matches_reference_over_constraint_grid() {
    let n = NoiseProfile::default();
    let grid = GridSpec::default();
    for c in LEVELS {
        for s in LEVELS {
            for t in LEVELS {
                let k = cons(c, s, t);
                for (scenario, closed) in [(ScenarioId::IP, solve_ip(&n, &k)), (ScenarioId::FP, solve_fp(&n, &k))] {
                    let reference = solve_reference(scenario, &n, None, &k, &grid).unwrap();
                    assert_eq!(
                        closed.regime == Regime::Infeasible,
                        reference.regime == Regime::Infeasible,
                        "{scenario} ({c},{s},{t})"
                    );
                    assert!(
                        agree(closed.csr, reference.csr),
                        "{scenario} ({c},{s},{t}): {closed:?} vs {reference:?}"
                    );
                }
            }
        }
    }
}

#[test]
fn artificial_noise_matches_reference_on_random_triples() {
    let n = NoiseProfile::default();
    let grid = GridSpec::default();
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    for _ in 0..6 {
        let k = cons(
            rng.random_range(0.02..0.6),
            rng.random_range(0.0105..0.3),
            rng.random_range(0.02..0.5),
        );
        for pa_db in [-20.0, -15.0] {
            for scenario in [ScenarioId::IA, ScenarioId::FA] {
                let pa = pa_for(scenario, pa_db);
                let closed = solve(scenario, &n, pa, &k).unwrap();
                let reference = solve_reference(scenario, &n, pa, &k, &grid).unwrap();
                assert!(
                    agree(closed.csr, reference.csr),
                    "{scenario} {pa_db} {k:?}: {closed:?} vs {reference:?}"
                );
            }
        }
    }
}

fn check_constraints(
    scenario: ScenarioId,
    n: &NoiseProfile,
    pa_db: f64,
    k: &SecurityConstraints,
) -> Result<(), TestCaseError> {
    let sol = solve(scenario, n, pa_for(scenario, pa_db), k).unwrap();
    if sol.regime == Regime::Infeasible {
        prop_assert_eq!(sol.csr, 0.0);
        return Ok(());
    }
    let (pa, rho) = if scenario.uses_artificial_noise() {
        (db_to_linear(pa_db), sol.power_opt)
    } else {
        (sol.power_opt, 1.0)
    };
    let cfg = TransmitConfig::new(pa, rho, sol.rs_opt).unwrap();
    let tp_val = tp(scenario, n, &cfg);
    let sop_val = sop(scenario, n, &cfg, &ToleranceSpec::new(1e-11, 0.0, 4000).unwrap()).unwrap();
    let cop_val = cop_at_optimal_theta(scenario, n, pa, rho);
    prop_assert!(cop_val <= k.eps_c() + 1e-9, "cop {cop_val}");
    prop_assert!(sop_val <= k.eps_s() + 1e-9, "sop {sop_val}");
    prop_assert!(tp_val >= 1.0 - k.eps_t() - 1e-9, "tp {tp_val}");
    prop_assert!((sol.csr - sol.rs_opt * tp_val).abs() <= 1e-12);
    match sol.regime {
        Regime::SecrecyBound => prop_assert!((sop_val - k.eps_s()).abs() <= 1e-6),
        Regime::TransmissionBound => prop_assert!((tp_val - (1.0 - k.eps_t())).abs() <= 1e-6),
        _ => {}
    }
    Ok(())
}

fn eps() -> impl Strategy<Value = f64> {
    0.005..0.6f64
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn optimum_satisfies_constraints(c in eps(), s in eps(), t in eps(), sb in -35.0..-10.0f64, pa_db in -25.0..-5.0f64) {
        let n = NoiseProfile::from_db(sb, 0.0, 0.0, 0.01).unwrap();
        let k = cons(c, s, t);
        for scenario in ScenarioId::ALL {
            check_constraints(scenario, &n, pa_db, &k)?;
        }
    }

    #[test]
    fn csr_is_nondecreasing_in_each_constraint(c in eps(), s in eps(), t in eps(), bump in 1.05..1.6f64, pa_db in -25.0..-5.0f64) {
        let n = NoiseProfile::default();
        let base = cons(c, s, t);
        let relaxed = [cons(c * bump, s, t), cons(c, s * bump, t), cons(c, s, t * bump)];
        for scenario in ScenarioId::ALL {
            let pa = pa_for(scenario, pa_db);
            let csr0 = solve(scenario, &n, pa, &base).unwrap().csr;
            for k in &relaxed {
                let csr1 = solve(scenario, &n, pa, k).unwrap().csr;
                prop_assert!(csr1 >= csr0 - 1e-9, "{} {:?}: {} < {}", scenario, k, csr1, csr0);
            }
        }
    }

    #[test]
    fn independence_dominates_friend(c in eps(), s in eps(), t in eps(), pa_db in -25.0..-5.0f64) {
        let n = NoiseProfile::default();
        let k = cons(c, s, t);
        let ip = solve(ScenarioId::IP, &n, None, &k).unwrap().csr;
        let fp = solve(ScenarioId::FP, &n, None, &k).unwrap().csr;
        prop_assert!(ip >= fp - 1e-9);
        let pa = Some(db_to_linear(pa_db));
        let ia = solve(ScenarioId::IA, &n, pa, &k).unwrap().csr;
        let fa = solve(ScenarioId::FA, &n, pa, &k).unwrap().csr;
        prop_assert!(ia >= fa - 1e-9);
    }
}
