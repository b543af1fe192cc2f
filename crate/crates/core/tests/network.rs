use dendritic_core::data::poisson_train;
use dendritic_core::seed;
use dendritic_core::{merge_streams, Network, NetworkConfig, NetworkError, Polarity, SpikeEvent};

fn config(n_inputs: usize, n_outputs: usize) -> NetworkConfig {
    NetworkConfig { n_inputs, n_outputs, ..NetworkConfig::default() }
}

fn random_script(n_inputs: u32, n_outputs: u32, duration: f64, teach: bool, key: u64) -> Vec<SpikeEvent> {
    let mut streams = Vec::new();
    for i in 0..n_inputs {
        let mut rng = seed::rng_for(key, &[0, u64::from(i)]);
        streams.push(
            poisson_train(150.0, duration, &mut rng).into_iter().map(|t| SpikeEvent::sensory(t, i)).collect::<Vec<_>>(),
        );
    }
    if teach {
        for j in 0..n_outputs {
            let mut rng = seed::rng_for(key, &[1, u64::from(j)]);
            let positive = j % 2 == 0;
            streams.push(
                poisson_train(300.0, duration, &mut rng)
                    .into_iter()
                    .map(|t| SpikeEvent::teach(t, j, positive))
                    .collect(),
            );
        }
    }
    let refs: Vec<&[SpikeEvent]> = streams.iter().map(Vec::as_slice).collect();
    merge_streams(&refs).unwrap()
}

#[test]
fn no_teacher_no_weight_change() {
    let mut net = Network::build(config(20, 3)).unwrap();
    let before = net.checkpoint();
    for k in 0..5 {
        let script = random_script(20, 3, 0.1, false, k);
        net.run_window(&script, 0.1, false).unwrap();
    }
    assert_eq!(net.checkpoint(), before);
    assert_eq!(net.total_stats().accepted_updates, 0);
    assert!(net.total_stats().learning_events > 0);
}

#[test]
fn teach_spikes_alone_never_learn() {
    let mut net = Network::build(config(4, 2)).unwrap();
    let before = net.checkpoint();
    let events: Vec<SpikeEvent> = (0..200).map(|k| SpikeEvent::teach(k as f64 * 5e-4, (k % 2) as u32, true)).collect();
    net.run_window(&events, 0.1, false).unwrap();
    assert_eq!(net.checkpoint(), before);
    assert_eq!(net.total_stats().learning_events, 0);
}

#[test]
fn identical_seeds_give_identical_runs() {
    let run = || {
        let mut net = Network::build(NetworkConfig { master_seed: 77, ..config(12, 4) }).unwrap();
        let mut counts = Vec::new();
        for k in 0..4 {
            counts.push(net.run_window(&random_script(12, 4, 0.05, true, k), 0.05, false).unwrap().spike_counts);
        }
        (net.checkpoint(), counts)
    };
    assert_eq!(run(), run());
    let other = Network::build(NetworkConfig { master_seed: 78, ..config(12, 4) }).unwrap();
    assert_ne!(
        other.checkpoint(),
        Network::build(NetworkConfig { master_seed: 77, ..config(12, 4) }).unwrap().checkpoint()
    );
}

#[test]
fn positive_teacher_only_raises_weights() {
    // A negligible unit current pins the sensory branch near zero.
    let cfg = NetworkConfig { unit_current: 1e-12, ..config(8, 1) };
    for positive in [true, false] {
        let mut net = Network::build(cfg.clone()).unwrap();
        let mut t = 0.0;
        for step in 0..400 {
            net.on_teach_spike(0, positive, t).unwrap();
            let outcome = net.on_sensory_spike(step % 8, t + 1e-4).unwrap()[0];
            if positive {
                assert!(outcome.delta >= 0);
            } else {
                assert!(outcome.delta <= 0);
            }
            t += 2e-3;
        }
        assert!(net.total_stats().applied_updates > 0);
    }
}

#[test]
fn accepted_update_moves_both_polarities() {
    let cfg = NetworkConfig { unit_current: 1e-12, alpha: 1e6, ..config(1, 1) };
    let mut net = Network::build(cfg).unwrap();
    net.set_level(0, 0, Polarity::Excitatory, 5).unwrap();
    net.set_level(0, 0, Polarity::Inhibitory, 5).unwrap();
    net.on_teach_spike(0, true, 0.0).unwrap();
    let outcome = net.on_sensory_spike(0, 1e-4).unwrap()[0];
    assert!(outcome.accepted);
    assert_eq!(net.weights().level(0, 0, Polarity::Excitatory), 6);
    assert_eq!(net.weights().level(0, 0, Polarity::Inhibitory), 4);
    assert_eq!(net.weights().effective(0, 0), 2);
}

#[test]
fn teach_trace_mean_matches_rate_times_tau_times_weight() {
    let cfg = NetworkConfig { log_interval: 1e-3, ..config(1, 1) };
    let mut net = Network::build(cfg.clone()).unwrap();
    let rate = 500.0;
    let mut rng = seed::rng_for(11, &[3]);
    let duration = 20.0;
    let events: Vec<SpikeEvent> =
        poisson_train(rate, duration, &mut rng).into_iter().map(|t| SpikeEvent::teach(t, 0, true)).collect();
    let log = net.run_window(&events, duration, true).unwrap().log;
    // Skip the first 50 ms of build-up.
    let tail = &log[50..];
    let mean = tail.iter().map(|s| s.teach).sum::<f64>() / tail.len() as f64;
    let expected = rate * cfg.tau_teach * cfg.teach_weight;
    assert!((mean - expected).abs() < 0.05 * expected, "{mean} vs {expected}");
}

#[test]
fn input_permutation_permutes_nothing_else() {
    // Relabelling inputs together with their weights leaves spike counts unchanged.
    let n = 6;
    let perm = [3usize, 0, 5, 1, 4, 2];
    let cfg = NetworkConfig { unit_current: 0.05, ..config(n, 2) };
    let mut a = Network::build(cfg.clone()).unwrap();
    let mut b = Network::build(cfg).unwrap();
    a.set_learning(false);
    b.set_learning(false);
    for i in 0..n {
        for j in 0..2 {
            a.set_level(i, j, Polarity::Excitatory, (6 + i + 3 * j) as u8).unwrap();
            a.set_level(i, j, Polarity::Inhibitory, (i % 3) as u8).unwrap();
        }
    }
    for (i, &target) in perm.iter().enumerate() {
        for j in 0..2 {
            for pol in [Polarity::Excitatory, Polarity::Inhibitory] {
                b.set_level(target, j, pol, a.weights().level(i, j, pol)).unwrap();
            }
        }
    }
    let script = random_script(n as u32, 2, 0.2, false, 4);
    let mut permuted: Vec<SpikeEvent> =
        script.iter().map(|e| SpikeEvent::sensory(e.time, perm[e.channel as usize] as u32)).collect();
    permuted.sort_by(SpikeEvent::order);
    let ra = a.run_window(&script, 0.2, false).unwrap();
    let rb = b.run_window(&permuted, 0.2, false).unwrap();
    assert_eq!(ra.spike_counts, rb.spike_counts);
    assert!(ra.spike_counts.iter().any(|&c| c > 0));
}

#[test]
fn uniform_initial_levels() {
    let net = Network::build(NetworkConfig { master_seed: 2024, ..NetworkConfig::default() }).unwrap();
    let ckpt = net.checkpoint();
    let (exc, inh) = ckpt.histograms();
    for hist in [exc, inh] {
        let n: u64 = hist.iter().sum();
        let expected = n as f64 / 16.0;
        let chi2: f64 = hist.iter().map(|&o| (o as f64 - expected).powi(2) / expected).sum();
        // 99.9th percentile of chi-square with 15 degrees of freedom.
        assert!(chi2 < 37.70, "chi2 {chi2}");
    }
}

#[test]
fn malformed_inputs_are_rejected() {
    let mut net = Network::build(config(3, 2)).unwrap();
    assert!(matches!(
        net.run_window(&[SpikeEvent::sensory(0.2, 0)], 0.1, false),
        Err(NetworkError::EventOutsideWindow { .. })
    ));
    assert!(matches!(
        net.run_window(&[SpikeEvent::sensory(0.01, 3)], 0.1, false),
        Err(NetworkError::InputOutOfRange { .. })
    ));
    assert!(matches!(
        net.run_window(&[SpikeEvent::teach(0.01, 2, true)], 0.1, false),
        Err(NetworkError::OutputOutOfRange { .. })
    ));
    let unsorted = [SpikeEvent::sensory(0.02, 0), SpikeEvent::sensory(0.01, 0)];
    assert!(matches!(net.run_window(&unsorted, 0.1, false), Err(NetworkError::Unsorted(_))));
    net.run_window(&[], 0.1, false).unwrap();
    assert!(matches!(net.on_sensory_spike(0, 0.05), Err(NetworkError::TimeReversal { .. })));
}
