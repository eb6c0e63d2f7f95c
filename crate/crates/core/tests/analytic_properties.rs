use covert_core::link::{db_to_linear, linear_to_db, sample_channel, substream};
use covert_core::metrics::{
    cop, cop_at_optimal_theta, detection_errors, rate_ceiling, sop_fa, sop_fp, sop_ia, sop_ip, theta_star, tp_an, tp_pc,
};
use covert_core::numerics::integrate_1d;
use covert_core::{NoiseProfile, ScenarioId, ToleranceSpec};
use proptest::prelude::*;

const Q: ToleranceSpec = ToleranceSpec::QUADRATURE;

/// SOP from first principles: condition on the attacker's total gain `s`
/// (density `e^-s` for one antenna, `s e^-s` for two), find the Bob gain
/// needed to beat the attacker by `rs`, and divide by the transmission
/// probability.
fn sop_oracle(friend: bool, n: &NoiseProfile, pa: f64, rho: f64, rs: f64) -> f64 {
    let attacker_noise = if friend {
        n.pooled_attacker_noise()
    } else {
        n.sigma_e2()
    };
    let bob_gain_needed = |sinr: f64| {
        let margin = rho - sinr * (1.0 - rho);
        if margin <= 0.0 {
            f64::INFINITY
        } else {
            sinr * n.sigma_b2() / (pa * margin)
        }
    };
    let tp = (-bob_gain_needed(rs.exp2() - 1.0)).exp();
    let density = |s: f64| if friend { s * (-s).exp() } else { (-s).exp() };
    let kept = integrate_1d(
        |s| {
            let eve = rho * pa * s / ((1.0 - rho) * pa * s + attacker_noise);
            let target = rs.exp2() * (1.0 + eve) - 1.0;
            density(s) * (-bob_gain_needed(target)).exp()
        },
        0.0,
        80.0,
        &Q,
    )
    .unwrap();
    1.0 - kept / tp
}

#[test]
fn artificial_noise_sop_matches_first_principles() {
    let noises = [
        NoiseProfile::new(0.01, 1.0, 1.0, 0.01).unwrap(),
        NoiseProfile::from_db(-25.0, 3.0, -2.0, 0.01).unwrap(),
    ];
    for n in &noises {
        for (pa, rho, rs) in [
            (0.01, 0.75, 0.25),
            (0.01, 0.5, 0.5),
            (0.1, 0.3, 0.2),
            (0.03, 0.9, 1.5),
            (0.2, 0.6, 0.05),
        ] {
            let ia = sop_ia(n, pa, rho, rs, &Q).unwrap();
            let fa = sop_fa(n, pa, rho, rs, &Q).unwrap();
            let ia_ref = sop_oracle(false, n, pa, rho, rs);
            let fa_ref = sop_oracle(true, n, pa, rho, rs);
            assert!((ia - ia_ref).abs() < 1e-7, "IA {pa} {rho} {rs}: {ia} vs {ia_ref}");
            assert!((fa - fa_ref).abs() < 1e-7, "FA {pa} {rho} {rs}: {fa} vs {fa_ref}");
        }
    }
}

#[test]
fn tp_examples_against_simulated_draws() {
    let n = NoiseProfile::new(0.01, 1.0, 1.0, 0.01).unwrap();
    let mut rng = substream(2024, 0);
    let draws: Vec<f64> = (0..1_000_000).map(|_| sample_channel(&mut rng).g_ab).collect();
    let frac = |ok: &dyn Fn(f64) -> bool| draws.iter().filter(|&&g| ok(g)).count() as f64 / draws.len() as f64;
    // PC: log2(1 + P g / sigma_b2) >= 1
    let pc = frac(&|g| (1.0 + 0.01 * g / 0.01).log2() >= 1.0);
    assert!((pc - tp_pc(&n, 0.01, 1.0)).abs() < 3e-3);
    assert!((tp_pc(&n, 0.01, 1.0) - 0.367879).abs() < 1e-6);
    let an = frac(&|g| (1.0 + 0.75 * 0.01 * g / (0.25 * 0.01 * g + 0.01)).log2() >= 0.5);
    assert!((an - tp_an(&n, 0.01, 0.75, 0.5)).abs() < 3e-3);
}

#[test]
fn friend_cop_example_against_simulated_hypotheses() {
    let n = NoiseProfile::new(0.01, 1.0, 1.0, 0.01).unwrap();
    let theta = theta_star(ScenarioId::FA, &n, 1.0, 0.5);
    let mut rng = substream(77, 0);
    let trials = 2_000_000;
    let (mut fa, mut md) = (0u32, 0u32);
    for _ in 0..trials {
        let d = sample_channel(&mut rng);
        let g = d.g_aw + d.g_ae;
        if 0.5 * g + 2.0 >= theta {
            fa += 1;
        }
        let d = sample_channel(&mut rng);
        if d.g_aw + d.g_ae + 2.0 < theta {
            md += 1;
        }
    }
    let simulated = 1.0 - (fa as f64 + md as f64) / trials as f64;
    let analytic = cop(ScenarioId::FA, &n, 1.0, 0.5, theta);
    assert!((analytic - 0.36079).abs() < 1e-4);
    assert!((simulated - analytic).abs() < 2e-3, "{simulated} vs {analytic}");
}

/// Kolmogorov-Smirnov test of the fading draws against Exp(1).
#[test]
fn fading_draws_pass_ks_test() {
    let mut rng = substream(99, 3);
    let n = 100_000;
    let mut xs: Vec<f64> = (0..n).map(|_| sample_channel(&mut rng).g_ae).collect();
    xs.sort_by(f64::total_cmp);
    let d = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let cdf = -(-x).exp_m1();
            (cdf - i as f64 / n as f64)
                .abs()
                .max(((i + 1) as f64 / n as f64 - cdf).abs())
        })
        .fold(0.0, f64::max);
    assert!(d < 1.628 / (n as f64).sqrt(), "D = {d}");
}

fn noise_strategy() -> impl Strategy<Value = NoiseProfile> {
    (-35.0..0.0f64, -10.0..10.0f64, -10.0..10.0f64, 1e-3..0.1f64)
        .prop_map(|(b, w, e, u)| NoiseProfile::from_db(b, w, e, u).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn db_round_trip(x in -200.0..200.0f64) {
        let back = linear_to_db(db_to_linear(x));
        prop_assert!((back - x).abs() <= 1e-12 * x.abs().max(1.0));
    }

    #[test]
    fn probabilities_stay_in_unit_interval(
        n in noise_strategy(),
        pa_db in -30.0..10.0f64,
        rho in 0.05..0.999f64,
        frac in 0.0..0.99f64,
        theta_offset in -1.0..5.0f64,
    ) {
        let pa = db_to_linear(pa_db);
        let rs = frac * rate_ceiling(rho).min(8.0);
        for p in [tp_pc(&n, pa, rs), tp_an(&n, pa, rho, rs), sop_ip(&n, rs), sop_fp(&n, rs)] {
            prop_assert!((0.0..=1.0).contains(&p), "{p}");
        }
        for s in ScenarioId::ALL {
            let theta = theta_star(s, &n, pa, rho) + theta_offset * pa;
            let e = detection_errors(s, &n, pa, rho, theta);
            prop_assert!((0.0..=1.0).contains(&e.p_fa) && (0.0..=1.0).contains(&e.p_md));
            let c = cop(s, &n, pa, rho, theta);
            prop_assert!((-1e-15..=1.0).contains(&c), "{s} {c}");
            prop_assert_eq!(c, 1.0 - (e.p_fa + e.p_md));
            let worst = cop_at_optimal_theta(s, &n, pa, rho);
            prop_assert!((0.0..=1.0).contains(&worst));
        }
    }

    #[test]
    fn pc_metrics_are_monotone(n in noise_strategy(), pa_db in -30.0..10.0f64, rs in 0.01..6.0f64) {
        let pa = db_to_linear(pa_db);
        let pa_up = pa * 1.01;
        prop_assert!(tp_pc(&n, pa_up, rs) >= tp_pc(&n, pa, rs));
        prop_assert!(cop_at_optimal_theta(ScenarioId::IP, &n, pa_up, 1.0) >= cop_at_optimal_theta(ScenarioId::IP, &n, pa, 1.0));
        prop_assert!(sop_ip(&n, rs * 1.01) > sop_ip(&n, rs) || sop_ip(&n, rs) == 1.0);
        prop_assert!(sop_fp(&n, rs * 1.01) > sop_fp(&n, rs) || sop_fp(&n, rs) == 1.0);
    }

    #[test]
    fn reduced_cop_increases_in_rho(rho in 0.01..0.98f64) {
        let n = NoiseProfile::default();
        for s in [ScenarioId::IA, ScenarioId::FA] {
            prop_assert!(cop_at_optimal_theta(s, &n, 0.01, rho + 0.01) > cop_at_optimal_theta(s, &n, 0.01, rho));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn rho_one_limits(n in noise_strategy(), pa_db in -30.0..0.0f64, rs in 0.01..4.0f64) {
        let pa = db_to_linear(pa_db);
        let rho = 1.0 - 1e-9;
        prop_assert!((tp_an(&n, pa, rho, rs) - tp_pc(&n, pa, rs)).abs() < 1e-4);
        prop_assert!((sop_ia(&n, pa, rho, rs, &Q).unwrap() - sop_ip(&n, rs)).abs() < 1e-4);
        prop_assert!((sop_fa(&n, pa, rho, rs, &Q).unwrap() - sop_fp(&n, rs)).abs() < 1e-4);
    }

    #[test]
    fn an_sop_decreases_in_rho_and_increases_in_rate(pa_db in -25.0..-5.0f64, rho in 0.2..0.85f64, frac in 0.05..0.8f64) {
        let n = NoiseProfile::default();
        let pa = db_to_linear(pa_db);
        let rs = frac * rate_ceiling(rho);
        let ia = sop_ia(&n, pa, rho, rs, &Q).unwrap();
        let fa = sop_fa(&n, pa, rho, rs, &Q).unwrap();
        prop_assert!(sop_ia(&n, pa, rho + 0.1, rs, &Q).unwrap() <= ia + 1e-9);
        prop_assert!(sop_fa(&n, pa, rho + 0.1, rs, &Q).unwrap() <= fa + 1e-9);
        prop_assert!(sop_ia(&n, pa, rho, rs * 1.1, &Q).unwrap() >= ia - 1e-9);
        prop_assert!(sop_fa(&n, pa, rho, rs * 1.1, &Q).unwrap() >= fa - 1e-9);
    }
}
