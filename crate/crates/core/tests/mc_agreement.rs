use covert_core::link::db_to_linear;
use covert_core::metrics::{rate_ceiling, tp};
use covert_core::montecarlo::validate_scenario;
use covert_core::{NoiseProfile, ScenarioId, TransmitConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SETS_PER_SCENARIO: usize = 50;
const SAMPLES: u64 = 1_000_000;

/// Random operating point with TP of at least 5%, so that conditioning on
/// transmission keeps enough draws.
fn random_point(rng: &mut ChaCha8Rng, scenario: ScenarioId) -> (NoiseProfile, TransmitConfig) {
    loop {
        let noise = NoiseProfile::from_db(
            rng.random_range(-30.0..-5.0),
            rng.random_range(-6.0..6.0),
            rng.random_range(-6.0..6.0),
            rng.random_range(0.001..0.05),
        )
        .unwrap();
        let pa = db_to_linear(rng.random_range(-25.0..0.0));
        let rho = if scenario.uses_artificial_noise() {
            rng.random_range(0.15..0.97)
        } else {
            1.0
        };
        let rs = rng.random_range(0.02..0.9) * rate_ceiling(rho).min(4.0);
        let cfg = TransmitConfig::new(pa, rho, rs).unwrap();
        if tp(scenario, &noise, &cfg) >= 0.05 {
            return (noise, cfg);
        }
    }
}

#[test]
fn analytic_metrics_agree_with_simulation_on_random_points() {
    let mut failures = Vec::new();
    for (k, scenario) in ScenarioId::ALL.into_iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + k as u64);
        for set in 0..SETS_PER_SCENARIO {
            let (noise, cfg) = random_point(&mut rng, scenario);
            let report = validate_scenario(scenario, &noise, &cfg, SAMPLES, 31 + set as u64).unwrap();
            assert_eq!(report.comparisons.len(), 3);
            if !report.passed() {
                failures.push(format!("{scenario} set {set}: {noise:?} {cfg:?} {report:?}"));
            }
        }
    }
    assert!(failures.is_empty(), "{}", failures.join("\n"));
}

#[test]
fn sop_examples_against_simulation() {
    let n = NoiseProfile::new(0.01, 1.0, 1.0, 0.01).unwrap();
    let cfg = TransmitConfig::new(0.01, 0.75, 0.25).unwrap();
    for s in [ScenarioId::IA, ScenarioId::FA] {
        let report = validate_scenario(s, &n, &cfg, SAMPLES, 5).unwrap();
        assert!(report.passed(), "{report:?}");
    }
}
