use dynlab_core::dynamics::{step_agent, step_aggregate};
use dynlab_core::lab::{exact_round_expectation, per_node_expectation};
use dynlab_core::rng::trial_stream;
use dynlab_core::{Configuration, Population, ProtocolVariant, Rational};

const VARIANTS: [ProtocolVariant; 2] = [
    ProtocolVariant::two_sample_plus_own(),
    ProtocolVariant::three_sample_random(),
];

#[test]
fn enumeration_matches_per_node_law_exactly() {
    for variant in VARIANTS
        .into_iter()
        .chain(VARIANTS.map(ProtocolVariant::excluding_self))
    {
        for counts in [vec![2, 1], vec![1, 1, 1], vec![3, 0, 1], vec![2, 1, 1]] {
            let config = Configuration::new(counts).unwrap();
            let exact: Vec<Rational> = exact_round_expectation(&config, variant).unwrap();
            assert_eq!(
                exact,
                per_node_expectation::<Rational>(&config, variant),
                "{config:?} {variant:?}"
            );
        }
    }
}

#[test]
fn engines_agree_with_oracle_in_mean() {
    const ROUNDS: usize = 40_000;
    for variant in VARIANTS {
        let config = Configuration::new(vec![2, 1, 1]).unwrap();
        let expected: Vec<f64> = exact_round_expectation(&config, variant).unwrap();
        let mut rng = trial_stream(17, 0);
        let mut agent = vec![0.0; expected.len()];
        let mut aggregate = vec![0.0; expected.len()];
        for _ in 0..ROUNDS {
            let mut pop = Population::from_configuration(&config).unwrap();
            step_agent(&mut pop, variant, &mut rng);
            let mut c = config.clone();
            if variant.has_aggregate_path() {
                step_aggregate(&mut c, variant, &mut rng).unwrap();
            }
            for i in 0..expected.len() {
                agent[i] += pop.configuration().counts()[i] as f64 / ROUNDS as f64;
                aggregate[i] += c.counts()[i] as f64 / ROUNDS as f64;
            }
        }
        for i in 0..expected.len() {
            // counts are bounded by 4, so 4/sqrt(ROUNDS) bounds four standard errors comfortably
            let tol = 4.0 / (ROUNDS as f64).sqrt();
            assert!(
                (agent[i] - expected[i]).abs() < tol,
                "agent {variant:?} {i}: {} vs {}",
                agent[i],
                expected[i]
            );
            if variant.has_aggregate_path() {
                assert!(
                    (aggregate[i] - expected[i]).abs() < tol,
                    "aggregate {variant:?} {i}: {} vs {}",
                    aggregate[i],
                    expected[i]
                );
            }
        }
    }
}
