//! Closed-form model against brute-force enumeration and its own algebraic
//! identities.

use herald_core::{
    optimal_mean, MultiplexConfig, QuantumEfficiency, StatisticsKind, TriggerEvent,
};

const NBARS: [f64; 4] = [0.25, 0.5, 1.0, 2.0];
const ETAS: [f64; 3] = [0.5, 0.75, 1.0];
const NDS: [u32; 4] = [1, 2, 4, 8];
const KINDS: [StatisticsKind; 2] = [StatisticsKind::BoseEinstein, StatisticsKind::Poisson];

fn grid(kind: StatisticsKind) -> impl Iterator<Item = MultiplexConfig> {
    NBARS.into_iter().flat_map(move |nbar| {
        ETAS.into_iter().flat_map(move |eta| {
            NDS.into_iter()
                .map(move |nd| MultiplexConfig::new(nbar, eta, nd, kind).unwrap())
        })
    })
}

/// Exact probabilities by enumerating every photon configuration with at
/// most `cap` photons in total. Written from the physical description only:
/// independent modes, per-photon detection, first detected mode wins.
struct Enumeration {
    /// P(event = i), i = 0..=N_D
    event: Vec<f64>,
    /// P(event = i and exactly one photon in total)
    event_and_single: Vec<f64>,
}

fn enumerate(nbar: f64, eta: f64, nd: usize, kind: StatisticsKind, cap: usize) -> Enumeration {
    let m = nbar / nd as f64;
    let pmf = |n: usize| -> f64 {
        match kind {
            StatisticsKind::BoseEinstein => m.powi(n as i32) / (1.0 + m).powi(n as i32 + 1),
            StatisticsKind::Poisson => {
                let fact: f64 = (1..=n).map(|k| k as f64).product();
                m.powi(n as i32) * (-m).exp() / fact
            }
        }
    };
    let mut out = Enumeration {
        event: vec![0.0; nd + 1],
        event_and_single: vec![0.0; nd + 1],
    };
    let mut counts = vec![0usize; nd];
    fn rec(
        pos: usize,
        left: usize,
        counts: &mut Vec<usize>,
        eta: f64,
        pmf: &dyn Fn(usize) -> f64,
        out: &mut Enumeration,
    ) {
        if pos == counts.len() {
            let p: f64 = counts.iter().map(|&c| pmf(c)).product();
            let total: usize = counts.iter().sum();
            let mut silent_so_far = 1.0;
            for (i, &c) in counts.iter().enumerate() {
                let miss = (1.0 - eta).powi(c as i32);
                let w = p * silent_so_far * (1.0 - miss);
                out.event[i + 1] += w;
                if total == 1 {
                    out.event_and_single[i + 1] += w;
                }
                silent_so_far *= miss;
            }
            out.event[0] += p * silent_so_far;
            if total == 1 {
                out.event_and_single[0] += p * silent_so_far;
            }
            return;
        }
        for c in 0..=left {
            counts[pos] = c;
            rec(pos + 1, left - c, counts, eta, pmf, out);
        }
        counts[pos] = 0;
    }
    rec(0, cap, &mut counts, eta, &pmf, &mut out);
    out
}

#[test]
fn certification_matches_enumeration() {
    for kind in KINDS {
        for (nbar, eta, nd, cap) in [
            (1.0, 1.0, 1usize, 60usize),
            (1.0, 0.5, 3, 40),
            (2.0, 0.75, 4, 30),
            (0.5, 0.5, 2, 40),
            (1.0, 1.0, 8, 16),
        ] {
            let cfg = MultiplexConfig::new(nbar, eta, nd as u32, kind).unwrap();
            let e = enumerate(nbar, eta, nd, kind, cap);
            for i in 1..=nd {
                let brute = e.event_and_single[i] / e.event[i];
                let closed = cfg.certification(i as u32).unwrap();
                assert!((closed - brute).abs() < 1e-9, "{kind} nbar={nbar} eta={eta} nd={nd} i={i}: {closed} vs {brute}");
                let fire = cfg.delay_fire_prob(i as u32).unwrap();
                assert!((fire - e.event[i]).abs() < 1e-9);
            }
            assert!((cfg.no_trigger_prob() - e.event[0]).abs() < 1e-9);
            let single: f64 = e.event_and_single.iter().sum();
            assert!((cfg.single_photon_prob() - single).abs() < 1e-9);
        }
    }
}

#[test]
fn shifted_exponent_form_disagrees_with_enumeration() {
    // (N/(nbar+N))^(i-1+N) * ((N+eta nbar)/(nbar+N))^i agrees at i = 1 only
    let (nbar, eta, nd) = (1.0, 1.0, 8u32);
    let n = nd as f64;
    let shifted = |i: u32| {
        (n / (nbar + n)).powi((i - 1 + nd) as i32) * ((n + eta * nbar) / (nbar + n)).powi(i as i32)
    };
    let cfg = MultiplexConfig::bose_einstein(nbar, eta, nd).unwrap();
    assert!((shifted(1) - cfg.certification(1).unwrap()).abs() < 1e-12);
    assert!((shifted(8) - cfg.certification(8).unwrap()).abs() > 0.4);
    assert!(shifted(8) < shifted(1));
}

#[test]
fn certification_routes_agree() {
    for cfg in grid(StatisticsKind::BoseEinstein) {
        for i in 1..=cfg.num_delays() {
            let a = cfg.certification(i).unwrap();
            let b = cfg.certification_composed(i).unwrap();
            assert!((a - b).abs() < 1e-12, "{cfg:?} i={i}");
        }
    }
}

#[test]
fn event_probabilities_sum_to_one() {
    for kind in KINDS {
        for cfg in grid(kind) {
            let total: f64 = (0..=cfg.num_delays())
                .map(|i| cfg.event_prob(TriggerEvent::new(i, cfg.num_delays()).unwrap()).unwrap())
                .sum();
            assert!((total - 1.0).abs() < 1e-10, "{cfg:?}");
            assert!((cfg.trigger_prob() + cfg.no_trigger_prob() - 1.0).abs() < 1e-14);
        }
    }
}

#[test]
fn constant_product_identity() {
    for cfg in grid(StatisticsKind::BoseEinstein) {
        let (nbar, eta, n) = (cfg.nbar(), cfg.eta(), cfg.num_delays() as f64);
        let expected = eta * nbar * n.powf(n) / (nbar + n).powf(n + 1.0);
        for i in 1..=cfg.num_delays() {
            let product = cfg.certification(i).unwrap() * cfg.delay_fire_prob(i).unwrap();
            assert!((product - expected).abs() < 1e-10, "{cfg:?} i={i}");
        }
    }
}

#[test]
fn composed_aggregates_match_closed_forms() {
    for kind in KINDS {
        for cfg in grid(kind) {
            let closed = cfg.single_photon_prob();
            let composed = cfg.single_photon_prob_composed();
            assert!((closed - composed).abs() < 1e-10, "{cfg:?}: {closed} vs {composed}");
            let a = cfg.single_photon_prob_given_trigger().unwrap();
            let b = cfg.single_photon_prob_given_trigger_composed().unwrap();
            assert!((a - b).abs() < 1e-10, "{cfg:?}");
        }
    }
}

#[test]
fn single_photon_prob_ignores_efficiency() {
    for nd in NDS {
        let reference = MultiplexConfig::bose_einstein(1.0, 1.0, nd).unwrap().single_photon_prob();
        for eta in [0.1, 0.5, 1.0] {
            let v = MultiplexConfig::bose_einstein(1.0, eta, nd).unwrap().single_photon_prob();
            assert_eq!(v, reference);
        }
    }
}

#[test]
fn certification_fan_rises_with_delay() {
    for kind in KINDS {
        for cfg in grid(kind) {
            let certs: Vec<f64> = (1..=cfg.num_delays())
                .map(|i| cfg.certification(i).unwrap())
                .collect();
            for w in certs.windows(2) {
                if cfg.eta() == 1.0 {
                    assert!(w[1] > w[0], "{cfg:?}");
                } else {
                    assert!(w[1] >= w[0], "{cfg:?}");
                }
            }
        }
    }
}

#[test]
fn thermal_modes_approach_poisson_limit() {
    let limit = (-1.0f64).exp();
    let gaps: Vec<f64> = [1, 2, 4, 8, 16, 32, 64]
        .iter()
        .map(|&nd| (MultiplexConfig::bose_einstein(1.0, 1.0, nd).unwrap().single_photon_prob() - limit).abs())
        .collect();
    for w in gaps.windows(2) {
        assert!(w[1] < w[0]);
    }
    assert!(gaps[6] < 0.01);
}

#[test]
fn heralded_thermal_beats_faint_laser() {
    let laser = (-1.0f64).exp();
    for nd in 1..=64 {
        let v = MultiplexConfig::bose_einstein(1.0, 1.0, nd)
            .unwrap()
            .single_photon_prob_given_trigger()
            .unwrap();
        assert!(v > laser, "nd={nd}");
    }
}

#[test]
fn single_photon_curves_peak_at_one_and_rise_with_nd() {
    let grid: Vec<f64> = (1..=80).map(|k| k as f64 / 20.0).collect();
    let curve = |nd: u32| -> Vec<f64> {
        grid.iter()
            .map(|&nbar| MultiplexConfig::bose_einstein(nbar, 1.0, nd).unwrap().single_photon_prob())
            .collect()
    };
    let mut previous: Option<Vec<f64>> = None;
    for nd in 1..=8 {
        let c = curve(nd);
        let peak = c
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap()
            .0;
        assert_eq!(grid[peak], 1.0, "nd={nd}");
        if let Some(p) = &previous {
            // the ordering in N_D holds below nbar ~ 2.2 and reverses above it
            for ((a, b), &nbar) in p.iter().zip(&c).zip(&grid) {
                if nbar <= 2.15 {
                    assert!(b > a, "nd={nd} nbar={nbar}");
                }
            }
        }
        previous = Some(c);
    }
}

#[test]
fn optimum_over_grid() {
    for kind in KINDS {
        for nd in [1, 2, 3, 4, 8, 16] {
            for eta in [0.25, 1.0] {
                let m = optimal_mean(QuantumEfficiency::new(eta).unwrap(), nd, kind).unwrap();
                assert!((m.get() - 1.0).abs() < 1e-6, "{kind} nd={nd}: {}", m.get());
            }
        }
    }
}

#[test]
fn single_photon_ordering_in_nd_reverses_at_high_rate() {
    let at = |nd| MultiplexConfig::bose_einstein(4.0, 1.0, nd).unwrap().single_photon_prob();
    // 4/25 against 4/27
    assert!(at(1) > at(2));
}

#[test]
fn poisson_certification_is_higher_than_thermal() {
    for nd in 1..=8 {
        let cfg = MultiplexConfig::bose_einstein(1.0, 1.0, nd).unwrap();
        let poisson = cfg.with_kind(StatisticsKind::Poisson);
        for i in 1..=nd {
            assert!(poisson.certification(i).unwrap() >= cfg.certification(i).unwrap());
        }
    }
    // not a general ordering: one mode at nbar = 2
    let be = MultiplexConfig::bose_einstein(2.0, 1.0, 1).unwrap();
    let po = be.with_kind(StatisticsKind::Poisson);
    assert!(po.certification(1).unwrap() < be.certification(1).unwrap());
}

#[test]
fn report_is_consistent() {
    let cfg = MultiplexConfig::bose_einstein(1.0, 0.75, 4).unwrap();
    let r = cfg.report();
    let occ: f64 = r.per_delay.iter().map(|d| d.occurrence).sum();
    assert!((r.p_no_trigger + occ - 1.0).abs() < 1e-10);
    for d in &r.per_delay {
        let c = d.certification.unwrap();
        assert!((0.0..=1.0).contains(&c));
    }
    assert!((r.poisson_limit_p_single - (-1.0f64).exp()).abs() < 1e-15);

    let blind = MultiplexConfig::bose_einstein(1.0, 0.0, 4).unwrap().report();
    assert!(blind.per_delay.iter().all(|d| d.certification.is_none()));
    assert!(blind.p_single_given_trigger.is_none());
    assert_eq!(blind.p_no_trigger, 1.0);
}
