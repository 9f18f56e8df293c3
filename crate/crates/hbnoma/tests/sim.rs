use hbnoma::config::{AngleField, ScenarioConfig, SnrSpec};
use hbnoma::sim::{redraw_cap, run_point, run_scenario, run_trial};
use proptest::prelude::*;

fn random_config(seed: u64, n: usize, m: usize, trials: usize) -> ScenarioConfig {
    let mut c = ScenarioConfig::fig2_preset();
    c.seed = seed;
    c.trials = trials;
    c.snr_db = SnrSpec::One(5.0);
    c.intra_fractions = None;
    let template = c.clusters[0].clone();
    c.clusters = vec![template; n];
    for cluster in &mut c.clusters {
        cluster.users.resize(m, cluster.users[1].clone());
        for u in &mut cluster.users {
            u.aod_deg = AngleField::RANDOM;
        }
    }
    c
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn aggregates_are_trial_ordered_means(seed in any::<u64>(), n in 1usize..=3, m in 1usize..=3) {
        let c = random_config(seed, n, m, 16);
        let (point, trials) = run_point(&c, 5.0).unwrap();
        prop_assert_eq!(trials.len(), 16);
        let cap = redraw_cap(c.trials);
        for (i, t) in trials.iter().enumerate() {
            prop_assert_eq!(t, &run_trial(&c, 5.0, i as u64, cap).unwrap());
        }
        for agg in &point.users {
            let mut sum = 0.0;
            for t in &trials {
                sum += t.users[agg.user_n - 1][agg.user_m - 1].rate;
            }
            prop_assert_eq!(agg.rate_mean, sum / 16.0);
        }
    }

    #[test]
    fn thread_count_does_not_change_the_manifest(seed in any::<u64>()) {
        let c = random_config(seed, 2, 2, 24);
        let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let wide = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = single.install(|| run_scenario(&c)).unwrap();
        let b = wide.install(|| run_scenario(&c)).unwrap();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn fixed_deployment_needs_one_trial() {
    let mut c = ScenarioConfig::fig3_preset();
    c.trials = 3;
    let (point, trials) = run_point(&c, 5.0).unwrap();
    assert!(trials.windows(2).all(|w| w[0].users == w[1].users));
    assert_eq!(point.user(1, 1).unwrap().rate_mean, trials[0].users[0][0].rate);
    assert_eq!(point.redraws, 0);
}

#[test]
fn fig2_preset_rates_rise_with_correlation() {
    let mut c = ScenarioConfig::fig2_preset();
    c.trials = 200;
    c.snr_db = SnrSpec::One(5.0);
    let spec = hbnoma::sweep::fig2_spec(2.5).unwrap();
    let rows = hbnoma::sweep_fig2(&c, &spec).unwrap();
    assert_eq!(rows.len(), 5);
    assert!(rows
        .windows(2)
        .all(|w| w[1].rho > w[0].rho && w[1].rate_sim_bps_hz > w[0].rate_sim_bps_hz));
    assert!((rows[4].rho - 1.0).abs() <= 1e-9);
}
