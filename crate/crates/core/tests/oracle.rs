//! Monte Carlo estimates against the closed-form model.

use herald_core::sim::{
    delay_trial_observed, simulate_delay_chunk, substream, ModeSampler, CHUNK_TRIALS,
};
use herald_core::{
    run_delay_multiplexed, run_switched_array, sample_mode_count, switched_array_emission,
    DelayCounts, LossModel, MultiplexConfig, PhotonNumberDistribution, SimulationEstimate,
    SimulationSpec, StatisticsKind,
};

const SIGMAS: f64 = 3.0;

fn find<'a>(estimates: &'a [SimulationEstimate], name: &str, delay: u32) -> &'a SimulationEstimate {
    estimates
        .iter()
        .find(|e| e.name == name && e.delay == delay)
        .unwrap_or_else(|| panic!("missing estimate {name}[{delay}]"))
}

fn assert_within(e: &SimulationEstimate, expected: f64, sigmas: f64, context: &str) {
    let z = e.z_score(expected).expect("defined estimate");
    assert!(
        z <= sigmas,
        "{context}: {}[{}] = {:?} +- {:?}, expected {expected} (z = {z:.2})",
        e.name,
        e.delay,
        e.estimate,
        e.standard_error
    );
}

#[test]
fn mode_sampler_matches_pmf() {
    let draws = 1_000_000u64;
    for kind in [StatisticsKind::BoseEinstein, StatisticsKind::Poisson] {
        for m in [0.125, 1.0, 3.0] {
            let sampler = ModeSampler::new(kind, m).unwrap();
            let mut rng = substream(99, (m * 1000.0) as u64);
            let mut hist = [0u64; 9];
            let mut sum = 0u64;
            for _ in 0..draws {
                let n = sampler.sample(&mut rng);
                sum += n;
                if n <= 8 {
                    hist[n as usize] += 1;
                }
            }
            let d = PhotonNumberDistribution::new(kind, herald_core::MeanPhotonNumber::new(m).unwrap());
            for (n, &count) in hist.iter().enumerate() {
                let e = SimulationEstimate::from_counts("pmf", n as u32, count, draws);
                let expected = d.pmf(n as u64);
                if count == 0 {
                    // a bin this rare is allowed to be empty
                    assert!(expected * draws as f64 <= 10.0, "{kind} m={m} n={n}");
                    continue;
                }
                assert_within(&e, expected, 4.0, &format!("{kind} m={m}"));
            }
            let mean = sum as f64 / draws as f64;
            let var = match kind {
                StatisticsKind::BoseEinstein => m * (1.0 + m),
                StatisticsKind::Poisson => m,
            };
            assert!((mean - m).abs() < 4.0 * (var / draws as f64).sqrt(), "{kind} m={m} mean={mean}");
        }
    }
}

#[test]
fn bose_einstein_unit_mean_vacuum_and_mean() {
    let mut rng = substream(5, 0);
    let draws = 1_000_000u64;
    let mut zeros = 0;
    let mut sum = 0;
    for _ in 0..draws {
        let n = sample_mode_count(StatisticsKind::BoseEinstein, 1.0, &mut rng).unwrap();
        zeros += (n == 0) as u64;
        sum += n;
    }
    assert_within(&SimulationEstimate::from_counts("p0", 0, zeros, draws), 0.5, SIGMAS, "BE m=1");
    let mean = sum as f64 / draws as f64;
    assert!((mean - 1.0).abs() < 3.0 * (2.0 / draws as f64).sqrt());
}

#[test]
fn top_certification_at_eight_delays() {
    let cfg = MultiplexConfig::bose_einstein(1.0, 1.0, 8).unwrap();
    let run = run_delay_multiplexed(&SimulationSpec::delay_multiplexed(cfg, 1_000_000, 8).unwrap()).unwrap();
    assert_within(find(&run.estimates, "certification", 8), 8.0 / 9.0, SIGMAS, "N_D=8");
}

#[test]
fn conventional_heralded_fraction() {
    let cfg = MultiplexConfig::bose_einstein(1.0, 1.0, 1).unwrap();
    let run = run_delay_multiplexed(&SimulationSpec::delay_multiplexed(cfg, 1_000_000, 1).unwrap()).unwrap();
    assert_within(
        find(&run.estimates, "single_photon_prob_given_trigger", 0),
        0.5,
        SIGMAS,
        "N_D=1",
    );
}

#[test]
fn lossy_multiplexed_fraction_matches_simulation() {
    let cfg = MultiplexConfig::bose_einstein(1.0, 0.5, 8).unwrap();
    let run = run_delay_multiplexed(&SimulationSpec::delay_multiplexed(cfg, 1_000_000, 21).unwrap()).unwrap();
    assert_within(
        find(&run.estimates, "single_photon_prob_given_trigger", 0),
        0.4507397453927234,
        SIGMAS,
        "eta=0.5",
    );
}

#[test]
fn estimates_agree_with_model_on_grid() {
    let mut checked = 0;
    for kind in [StatisticsKind::BoseEinstein, StatisticsKind::Poisson] {
        for nbar in [0.5, 1.0, 2.0] {
            for eta in [0.5, 1.0] {
                for nd in [1, 4, 8] {
                    let cfg = MultiplexConfig::new(nbar, eta, nd, kind).unwrap();
                    let spec = SimulationSpec::delay_multiplexed(cfg, 1_000_000, 2024).unwrap();
                    let run = run_delay_multiplexed(&spec).unwrap();
                    for e in run.estimates.iter().filter(|e| e.denominator >= 10_000) {
                        let expected = match e.name.as_str() {
                            "certification" => cfg.certification(e.delay).unwrap(),
                            "delay_fire_prob" => cfg.delay_fire_prob(e.delay).unwrap(),
                            "no_trigger_prob" => cfg.no_trigger_prob(),
                            "single_photon_prob" => cfg.single_photon_prob(),
                            "single_photon_prob_given_trigger" => {
                                cfg.single_photon_prob_given_trigger().unwrap()
                            }
                            other => panic!("unexpected estimate {other}"),
                        };
                        assert_within(e, expected, SIGMAS, &format!("{cfg:?}"));
                        checked += 1;
                    }
                }
            }
        }
    }
    assert!(checked > 300);
}

#[test]
fn runs_are_deterministic() {
    let cfg = MultiplexConfig::bose_einstein(1.0, 0.75, 4).unwrap();
    let spec = SimulationSpec::delay_multiplexed(cfg, 300_000, 77).unwrap();
    let a = run_delay_multiplexed(&spec).unwrap();
    let b = run_delay_multiplexed(&spec).unwrap();
    assert_eq!(a, b);
    let other = SimulationSpec::delay_multiplexed(cfg, 300_000, 78).unwrap();
    assert_ne!(a.counts, run_delay_multiplexed(&other).unwrap().counts);

    let array = SimulationSpec::switched_array(cfg, 300_000, 77, 0.9, 0.95).unwrap();
    assert_eq!(run_switched_array(&array).unwrap(), run_switched_array(&array).unwrap());
}

#[test]
fn chunk_merge_is_order_independent() {
    let cfg = MultiplexConfig::poisson(1.0, 0.5, 3).unwrap();
    let trials = 4 * CHUNK_TRIALS + 123;
    let spec = SimulationSpec::delay_multiplexed(cfg, trials, 9).unwrap();
    let run = run_delay_multiplexed(&spec).unwrap();

    let chunks: Vec<DelayCounts> = (0..5)
        .map(|c| simulate_delay_chunk(&spec, c, if c == 4 { 123 } else { CHUNK_TRIALS }).unwrap())
        .collect();
    let forward = chunks.iter().fold(DelayCounts::new(3), |acc, c| acc.merge(c));
    let backward = chunks.iter().rev().fold(DelayCounts::new(3), |acc, c| acc.merge(c));
    assert_eq!(forward, backward);
    assert_eq!(forward, run.counts);
    assert_eq!(forward.trials, trials);
}

#[test]
fn first_detected_mode_sets_the_event() {
    for eta in [0.3, 0.8, 1.0] {
        let sampler = ModeSampler::new(StatisticsKind::BoseEinstein, 0.4).unwrap();
        let mut rng = substream(4, 0);
        for _ in 0..100_000 {
            let mut modes = Vec::new();
            let outcome = delay_trial_observed(&sampler, 6, eta, &mut rng, |i, n, d| modes.push((i, n, d)));
            let first = modes.iter().find(|m| m.2).map(|m| m.0).unwrap_or(0);
            assert_eq!(outcome.event.delay_index(), first);
            assert_eq!(outcome.total_photons, modes.iter().map(|m| m.1).sum::<u64>());
            assert!(modes.iter().all(|&(_, n, d)| n > 0 || !d));
        }
    }
}

#[test]
fn switched_array_emission_of_heralded_photon() {
    // three binary switch stages of four surfaces plus three more surfaces
    let switch = LossModel::uniform(12, 0.995).unwrap().net_transmittance();
    let output = LossModel::uniform(3, 0.995).unwrap().net_transmittance();
    let cfg = MultiplexConfig::bose_einstein(1.0, 1.0, 8).unwrap();
    let spec = SimulationSpec::switched_array(cfg, 1_000_000, 15, switch, output).unwrap();
    let run = run_switched_array(&spec).unwrap();
    let twin = find(&run.estimates, "heralded_photon_emitted", 0);
    assert_within(twin, 0.995f64.powi(15), SIGMAS, "twin");
    assert!((twin.estimate.unwrap() - 0.928).abs() < 0.002);

    let exact = switched_array_emission(&cfg, spec.path_transmittance()).unwrap();
    for (name, value) in [
        ("herald_prob", exact.herald_prob),
        ("emitted_one", exact.emitted_one),
        ("emitted_multi", exact.emitted_multi),
        ("emitted_at_least_one_given_herald", exact.emitted_at_least_one_given_herald.unwrap()),
    ] {
        assert_within(find(&run.estimates, name, 0), value, SIGMAS, "array");
    }
}

#[test]
fn switched_array_beats_conventional_source() {
    let cfg = MultiplexConfig::bose_einstein(1.0, 1.0, 8).unwrap();
    let spec = SimulationSpec::switched_array(cfg, 1_000_000, 3, 1.0, 1.0).unwrap();
    let run = run_switched_array(&spec).unwrap();
    assert_eq!(find(&run.estimates, "emitted_at_least_one_given_herald", 0).estimate, Some(1.0));
    let one = find(&run.estimates, "emitted_one", 0);
    assert!(one.estimate.unwrap() > MultiplexConfig::bose_einstein(1.0, 1.0, 1).unwrap().single_photon_prob());
    assert_within(one, switched_array_emission(&cfg, 1.0).unwrap().emitted_one, SIGMAS, "unit");
}

#[test]
fn switched_array_with_lossy_detectors() {
    for kind in [StatisticsKind::BoseEinstein, StatisticsKind::Poisson] {
        let cfg = MultiplexConfig::new(2.0, 0.6, 4, kind).unwrap();
        let spec = SimulationSpec::switched_array(cfg, 1_000_000, 31, 0.9, 0.9).unwrap();
        let run = run_switched_array(&spec).unwrap();
        let exact = switched_array_emission(&cfg, 0.81).unwrap();
        assert_within(find(&run.estimates, "herald_prob", 0), exact.herald_prob, SIGMAS, "herald");
        assert_within(find(&run.estimates, "emitted_one", 0), exact.emitted_one, SIGMAS, "one");
        assert_within(find(&run.estimates, "emitted_multi", 0), exact.emitted_multi, SIGMAS, "multi");
        assert_within(find(&run.estimates, "heralded_photon_emitted", 0), 0.81, SIGMAS, "twin");
    }
}
