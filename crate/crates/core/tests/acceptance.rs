//! Acceptance suite: one test per release criterion, each printing a
//! PASS line with its measured numbers. Run with
//! `cargo test -p cascade-core --test acceptance -- --nocapture`.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cascade_core::belief::{self, Frame, MassFunction, Subset};
use cascade_core::{
    build_traces, classify_evidential, dtw, dtw_naive, generate, prnet_dtw, Arc, ClassProfile,
    ClassifierSpec, CombinationRule, DtwConfig, EvalOptions, Evaluator, EvidentialParams, Event,
    GammaMode, IngestConfig, InteractionLog, LabeledCorpus, PropagationNetwork, WeightVector,
};

fn w(f: f64, m: f64, r: f64) -> WeightVector {
    WeightVector::new(f, m, r).unwrap()
}

fn random_sequence(rng: &mut ChaCha8Rng, max_len: usize) -> Vec<WeightVector> {
    let len = rng.gen_range(1..=max_len);
    (0..len)
        .map(|_| {
            w(
                rng.gen_range(0.0..=1.0),
                rng.gen_range(0.0..=1.0),
                rng.gen_range(0.0..=1.0),
            )
        })
        .collect()
}

/// Criterion 1: memoized DTW equals the naive recursion on 1,000 random
/// sequence pairs of lengths 1..=6, within 1e-9, in under 5 seconds.
#[test]
fn acceptance_1_dtw_oracle_equivalence() {
    let start = Instant::now();
    let cfg = DtwConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(0xD7);
    let mut max_gap = 0.0f64;
    for _ in 0..1_000 {
        let a = random_sequence(&mut rng, 6);
        let b = random_sequence(&mut rng, 6);
        let fast = dtw(&a, &b, &cfg).unwrap();
        let naive = dtw_naive(&a, &b, &cfg).unwrap();
        max_gap = max_gap.max((fast - naive).abs());
        assert!(
            (fast - naive).abs() <= 1e-9,
            "divergence {fast} vs {naive} on |A|={} |B|={}",
            a.len(),
            b.len()
        );
    }
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 5.0,
        "oracle comparison took {elapsed:?}"
    );
    println!(
        "ACCEPTANCE 1 (dtw oracle equivalence): PASS (1000 pairs, max gap {max_gap:.2e}, {elapsed:?})"
    );
}

/// Criterion 2: self-distance is exactly zero on 100 generated networks,
/// and the |D1|=1 vs |D2|=2 witness shows the distance is asymmetric.
#[test]
fn acceptance_2_prnet_dtw_self_distance_and_asymmetry() {
    let cfg = DtwConfig::default();
    let profiles = vec![
        ClassProfile {
            label: "t".into(),
            depth_range: (1, 4),
            branching_range: (1, 3),
            weight_means: (0.5, 0.3, 0.7),
            weight_noise: 0.2,
            merge_probability: 0.0,
        },
        ClassProfile {
            label: "d".into(),
            depth_range: (2, 5),
            branching_range: (1, 2),
            weight_means: (0.2, 0.8, 0.1),
            weight_noise: 0.1,
            merge_probability: 0.3,
        },
    ];
    let corpus = generate(&profiles, 50, 0xACCE).unwrap();
    assert_eq!(corpus.len(), 100);
    for net in corpus.networks() {
        assert_eq!(prnet_dtw(net, net, &cfg).unwrap(), 0.0);
    }

    // One dipath [(0,0,0)] against two dipaths at DTW distances 3 and 1.
    let p1 = PropagationNetwork::new(
        "s",
        None,
        vec![Arc::new("s", "a", WeightVector::ZERO, 1)],
    );
    let p2 = PropagationNetwork::new(
        "s",
        None,
        vec![
            Arc::new("s", "a", WeightVector::ZERO, 1),
            Arc::new("a", "b", w(1.0, 0.0, 0.0), 2),
            Arc::new("b", "c", w(1.0, 0.0, 0.0), 3),
            Arc::new("c", "d", w(1.0, 0.0, 0.0), 4),
            Arc::new("s", "e", w(1.0, 0.0, 0.0), 1),
        ],
    );
    let forward = prnet_dtw(&p1, &p2, &cfg).unwrap();
    let backward = prnet_dtw(&p2, &p1, &cfg).unwrap();
    assert_eq!(forward, 1.0);
    assert_eq!(backward, 2.0);
    assert_ne!(forward, backward);
    println!(
        "ACCEPTANCE 2 (self-distance + asymmetry witness): PASS (100 networks, witness {forward} vs {backward})"
    );
}

fn random_mass(rng: &mut ChaCha8Rng, frame: &Frame) -> MassFunction {
    let size = 1u64 << frame.len();
    let n_focals = rng.gen_range(1..=5usize);
    let mut masses: BTreeMap<Subset, f64> = BTreeMap::new();
    for _ in 0..n_focals {
        let subset = rng.gen_range(1..size);
        *masses.entry(subset).or_insert(0.0) += rng.gen_range(0.01..1.0);
    }
    let total: f64 = masses.values().sum();
    for v in masses.values_mut() {
        *v /= total;
    }
    MassFunction::new(frame.clone(), masses).unwrap()
}

/// Dense power-set combination, independent of the focal-set implementation.
#[allow(clippy::needless_range_loop)]
fn dense_combine(m1: &MassFunction, m2: &MassFunction, disjunctive: bool) -> Vec<f64> {
    let size = 1usize << m1.frame().len();
    let dense = |m: &MassFunction| {
        let mut v = vec![0.0; size];
        for (s, mass) in m.focal_sets() {
            v[s as usize] = mass;
        }
        v
    };
    let d1 = dense(m1);
    let d2 = dense(m2);
    let mut out = vec![0.0; size];
    for s1 in 0..size {
        for s2 in 0..size {
            let target = if disjunctive { s1 | s2 } else { s1 & s2 };
            out[target] += d1[s1] * d2[s2];
        }
    }
    out
}

/// Criterion 3: the three combination rules match a brute-force focal-set
/// product oracle on 200 random mass-function pairs over frames of size
/// <= 4, within 1e-9; pignistic outputs sum to 1.
#[test]
fn acceptance_3_belief_kernel_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xBE11EF);
    for round in 0..200 {
        let n = rng.gen_range(2..=4usize);
        let frame = Frame::new((0..n).map(|i| format!("s{i}"))).unwrap();
        let m1 = random_mass(&mut rng, &frame);
        let m2 = random_mass(&mut rng, &frame);

        let conj = belief::combine_conjunctive(&m1, &m2).unwrap();
        let disj = belief::combine_disjunctive(&m1, &m2).unwrap();
        let oracle_conj = dense_combine(&m1, &m2, false);
        let oracle_disj = dense_combine(&m1, &m2, true);
        for s in 0..(1u64 << n) {
            assert!(
                (conj.mass(s) - oracle_conj[s as usize]).abs() <= 1e-9,
                "conjunctive mismatch on subset {s} in round {round}"
            );
            assert!(
                (disj.mass(s) - oracle_disj[s as usize]).abs() <= 1e-9,
                "disjunctive mismatch on subset {s} in round {round}"
            );
        }

        if 1.0 - oracle_conj[0] > 1e-9 {
            let demp = belief::combine_dempster(&m1, &m2).unwrap();
            for s in 1..(1u64 << n) {
                let expected = oracle_conj[s as usize] / (1.0 - oracle_conj[0]);
                assert!(
                    (demp.mass(s) - expected).abs() <= 1e-9,
                    "dempster mismatch on subset {s} in round {round}"
                );
            }
            let bet = belief::pignistic(&demp).unwrap();
            let total: f64 = bet.values().sum();
            assert!((total - 1.0).abs() <= 1e-9);
        }
        if 1.0 - conj.conflict() > 1e-9 {
            let bet = belief::pignistic(&conj).unwrap();
            let total: f64 = bet.values().sum();
            assert!((total - 1.0).abs() <= 1e-9);
        }
    }
    println!("ACCEPTANCE 3 (belief kernel vs brute force): PASS (200 pairs, frames <= 4)");
}

/// Criterion 4: discretization reproduces the worked example exactly.
#[test]
fn acceptance_4_discretization_worked_example() {
    let input = w(0.5, 0.0, 0.25);
    let expected = w(1.0, 0.0, 1.0);
    assert_eq!(input.discretize(), expected);
    println!("ACCEPTANCE 4 (discretization example): PASS ((0.5, 0, 0.25) -> (1, 0, 1))");
}

/// Criterion 5: the evidential k = 2 worked example matches a scripted
/// mass-combination oracle to 1e-6.
#[test]
fn acceptance_5_evidential_hand_check() {
    // Training networks at distances 0.1 (label a) and 2.0 (label b) from
    // the query.
    let corpus = LabeledCorpus::new(vec![
        PropagationNetwork::new(
            "s",
            Some("a".into()),
            vec![Arc::new("s", "x", w(0.1, 0.0, 0.0), 1)],
        ),
        PropagationNetwork::new(
            "s",
            Some("b".into()),
            vec![
                Arc::new("s", "x", w(1.0, 0.0, 0.0), 1),
                Arc::new("x", "y", w(1.0, 0.0, 0.0), 2),
            ],
        ),
    ])
    .unwrap();
    let query = PropagationNetwork::new(
        "s",
        None,
        vec![Arc::new("s", "x", WeightVector::ZERO, 1)],
    );
    let params = EvidentialParams {
        alpha0: 0.95,
        beta: 1,
        gamma: GammaMode::Global(1.0),
    };
    let result = classify_evidential(
        &query,
        &corpus,
        2,
        &DtwConfig::default(),
        &params,
        CombinationRule::Dempster,
    )
    .unwrap();

    // Scripted oracle: alpha_j = alpha0 * exp(-gamma * d_j), Dempster
    // product of the two simple BBAs, then the pignistic split of omega.
    let alpha_a = 0.95 * (-0.1f64).exp();
    let alpha_b = 0.95 * (-2.0f64).exp();
    let conflict = alpha_a * alpha_b;
    let m_a = alpha_a * (1.0 - alpha_b) / (1.0 - conflict);
    let m_b = alpha_b * (1.0 - alpha_a) / (1.0 - conflict);
    let m_omega = (1.0 - alpha_a) * (1.0 - alpha_b) / (1.0 - conflict);
    let bet_a = m_a + m_omega / 2.0;
    let bet_b = m_b + m_omega / 2.0;

    assert_eq!(result.neighbors[0].distance, 0.1);
    assert_eq!(result.neighbors[1].distance, 2.0);
    assert_eq!(result.predicted, "a");
    assert!((result.scores["a"] - bet_a).abs() <= 1e-6);
    assert!((result.scores["b"] - bet_b).abs() <= 1e-6);
    println!(
        "ACCEPTANCE 5 (evidential k=2 hand check): PASS (BetP(a) = {:.6})",
        result.scores["a"]
    );
}

fn benchmark_corpus() -> LabeledCorpus {
    let profiles = vec![
        ClassProfile {
            label: "a".into(),
            depth_range: (2, 4),
            branching_range: (1, 3),
            weight_means: (0.9, 0.1, 0.1),
            weight_noise: 0.05,
            merge_probability: 0.0,
        },
        ClassProfile {
            label: "b".into(),
            depth_range: (2, 4),
            branching_range: (1, 3),
            weight_means: (0.1, 0.1, 0.9),
            weight_noise: 0.05,
            merge_probability: 0.0,
        },
    ];
    generate(&profiles, 100, 2024).unwrap()
}

/// Criterion 6: on the synthetic two-class benchmark (100 networks per
/// class, 90/10 split, 10 repeats, k = 5), both classifiers reach at least
/// 90% accuracy in under 60 seconds.
#[test]
fn acceptance_6_end_to_end_synthetic_benchmark() {
    let start = Instant::now();
    let corpus = benchmark_corpus();
    assert_eq!(corpus.len(), 200);
    let evaluator = Evaluator::new(&corpus, &DtwConfig::default()).unwrap();
    let opts = EvalOptions {
        train_fraction: 0.9,
        repeats: 10,
        seed: 7,
        stratified: false,
        strict: true,
    };
    let prob = evaluator
        .evaluate(&ClassifierSpec::Probabilistic, 5, &opts)
        .unwrap();
    let evid = evaluator
        .evaluate(
            &ClassifierSpec::Evidential {
                params: EvidentialParams::default(),
                rule: CombinationRule::Dempster,
            },
            5,
            &opts,
        )
        .unwrap();
    let elapsed = start.elapsed();

    assert!(
        prob.accuracy >= 0.90,
        "probabilistic accuracy {} below 0.90",
        prob.accuracy
    );
    assert!(
        evid.accuracy >= 0.90,
        "evidential accuracy {} below 0.90",
        evid.accuracy
    );
    assert_eq!(prob.n_decisions, 200);
    assert_eq!(evid.n_decisions, 200);
    assert!(
        elapsed.as_secs_f64() < 60.0,
        "benchmark took {elapsed:?}"
    );
    println!(
        "ACCEPTANCE 6 (synthetic benchmark): PASS (prob {:.2}% +/-{:.2}, evid {:.2}% +/-{:.2}, {elapsed:?})",
        prob.accuracy * 100.0,
        prob.ci_halfwidth * 100.0,
        evid.accuracy * 100.0,
        evid.ci_halfwidth * 100.0
    );
}

fn variance(values: &[f64]) -> f64 {
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / values.len() as f64
}

/// Criterion 7: across k in {1, 3, 5, 7, 9, 11} on paired splits, the
/// evidential accuracy varies no more than the probabilistic accuracy in
/// at least 8 of 10 seeded runs.
#[test]
fn acceptance_7_k_sweep_stability() {
    let corpus = benchmark_corpus();
    let evaluator = Evaluator::new(&corpus, &DtwConfig::default()).unwrap();
    let k_values = [1, 3, 5, 7, 9, 11];
    let mut stable_runs = 0;
    for seed in 100..110u64 {
        let opts = EvalOptions {
            train_fraction: 0.9,
            repeats: 10,
            seed,
            stratified: false,
            strict: true,
        };
        let prob = evaluator
            .sweep_k(&ClassifierSpec::Probabilistic, &k_values, &opts)
            .unwrap();
        let evid = evaluator
            .sweep_k(
                &ClassifierSpec::Evidential {
                    params: EvidentialParams::default(),
                    rule: CombinationRule::Dempster,
                },
                &k_values,
                &opts,
            )
            .unwrap();
        let prob_acc: Vec<f64> = prob.iter().map(|r| r.accuracy).collect();
        let evid_acc: Vec<f64> = evid.iter().map(|r| r.accuracy).collect();
        if variance(&evid_acc) <= variance(&prob_acc) {
            stable_runs += 1;
        }
    }
    assert!(
        stable_runs >= 8,
        "evidential no more stable than probabilistic in only {stable_runs}/10 runs"
    );
    println!("ACCEPTANCE 7 (k-sweep stability): PASS ({stable_runs}/10 runs)");
}

// --- criterion 8: ingestion invariants ----------------------------------

fn random_log_events(rng: &mut ChaCha8Rng) -> Vec<Event> {
    let n_users = rng.gen_range(4..=10usize);
    let users: Vec<String> = (0..n_users).map(|i| format!("u{i}")).collect();
    let labels = ["x", "y"];
    let mut events = Vec::new();

    for src in &users {
        for dst in &users {
            if src != dst && rng.gen_bool(0.25) {
                events.push(Event::Follow {
                    src: src.clone(),
                    dst: dst.clone(),
                });
            }
        }
    }

    let n_tweets = rng.gen_range(3..=25usize);
    let mut tweet_meta = Vec::new();
    for t in 0..n_tweets {
        let user = users[rng.gen_range(0..users.len())].clone();
        let label = labels[rng.gen_range(0..labels.len())].to_string();
        let ts = rng.gen_range(0..500i64);
        events.push(Event::Tweet {
            id: format!("t{t}"),
            user: user.clone(),
            label,
            ts,
        });
        tweet_meta.push((format!("t{t}"), user));
    }

    for (id, author) in &tweet_meta {
        if rng.gen_bool(0.3) {
            let retweeter = users[rng.gen_range(0..users.len())].clone();
            events.push(Event::Retweet {
                user: retweeter,
                orig: id.clone(),
                ts: rng.gen_range(500..1000i64),
            });
        }
        if rng.gen_bool(0.3) {
            let of = users[rng.gen_range(0..users.len())].clone();
            events.push(Event::Mention {
                tweet: id.clone(),
                by: author.clone(),
                of,
            });
        }
    }
    events
}

/// Every event duplicated with fresh tweet ids and order-preserving shifted
/// timestamps.
fn duplicate_events(events: &[Event]) -> Vec<Event> {
    let max_ts = events
        .iter()
        .map(|e| match e {
            Event::Tweet { ts, .. } | Event::Retweet { ts, .. } => *ts,
            _ => 0,
        })
        .max()
        .unwrap_or(0);
    let offset = max_ts + 1;
    let mut out = events.to_vec();
    for event in events {
        out.push(match event {
            Event::Follow { src, dst } => Event::Follow {
                src: src.clone(),
                dst: dst.clone(),
            },
            Event::Tweet { id, user, label, ts } => Event::Tweet {
                id: format!("{id}_dup"),
                user: user.clone(),
                label: label.clone(),
                ts: ts + offset,
            },
            Event::Retweet { user, orig, ts } => Event::Retweet {
                user: user.clone(),
                orig: format!("{orig}_dup"),
                ts: ts + offset,
            },
            Event::Mention { tweet, by, of } => Event::Mention {
                tweet: format!("{tweet}_dup"),
                by: by.clone(),
                of: of.clone(),
            },
        });
    }
    out
}

/// Criterion 8: on 50 random event logs, every emitted network validates,
/// every arc respects strict time ordering of earliest class tweets, and
/// duplicating the log leaves every weight vector exactly unchanged.
#[test]
fn acceptance_8_ingestion_invariants() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1463);
    let cfg = IngestConfig::default();
    let mut networks_seen = 0usize;
    for round in 0..50 {
        let events = random_log_events(&mut rng);
        let log = InteractionLog::from_events(events.clone()).unwrap();
        let dup_log = InteractionLog::from_events(duplicate_events(&events)).unwrap();

        for label in ["x", "y"] {
            // Independent re-derivation of each user's earliest class tweet.
            let mut earliest: BTreeMap<&str, i64> = BTreeMap::new();
            for t in &log.tweets {
                if t.label == label {
                    let e = earliest.entry(t.user.as_str()).or_insert(t.ts);
                    *e = (*e).min(t.ts);
                }
            }

            let nets = build_traces(&log, label, &cfg).unwrap();
            let dup_nets = build_traces(&dup_log, label, &cfg).unwrap();
            assert_eq!(
                nets, dup_nets,
                "duplicated log changed the traces in round {round}"
            );

            networks_seen += nets.len();
            for net in &nets {
                let violations = net.validate();
                assert!(
                    violations.is_empty(),
                    "round {round}: invalid network: {violations:?}"
                );
                for arc in net.arcs() {
                    assert!(
                        earliest[arc.src.as_str()] < earliest[arc.dst.as_str()],
                        "round {round}: arc {} -> {} breaks time order",
                        arc.src,
                        arc.dst
                    );
                }
            }
        }
    }
    println!(
        "ACCEPTANCE 8 (ingestion invariants): PASS (50 logs, {networks_seen} networks)"
    );
}
