//! Single-row learning trace: positive teacher for one phase, negative
//! teacher for the next, Poisson drive on every input throughout.

use dendritic_core::data::poisson_train;
use dendritic_core::seed::{self, domain};
use dendritic_core::{merge_streams, Network, NetworkConfig, Polarity, SpikeEvent};

use super::ensure_dir;
use crate::config::RunConfig;
use crate::error::CliError;
use crate::metrics::csv_writer;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint {
    pub t: f64,
    pub i_sensory: f64,
    pub i_teach: f64,
    pub w_exc_level: u8,
    pub w_inh_level: u8,
    /// Accepted updates since the previous point.
    pub accepted_updates: u64,
}

#[derive(Debug, Clone)]
pub struct DemoReport {
    pub phase_duration: f64,
    pub trace: Vec<TracePoint>,
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        f64::NAN
    } else {
        s / n as f64
    }
}

impl DemoReport {
    /// Points of phase 0 (positive teacher) or 1 (negative teacher).
    pub fn phase(&self, k: usize) -> &[TracePoint] {
        let start = k as f64 * self.phase_duration;
        let end = start + self.phase_duration;
        let lo = self.trace.partition_point(|p| p.t <= start + 1e-12);
        let hi = self.trace.partition_point(|p| p.t <= end + 1e-12);
        &self.trace[lo..hi]
    }

    fn fraction(points: &[TracePoint], from: f64, to: f64) -> &[TracePoint] {
        let n = points.len();
        &points[(n as f64 * from).round() as usize..(n as f64 * to).round() as usize]
    }

    /// Mean `|teach - sensory|` over the first and last 20 % of a phase.
    pub fn mismatch_first_last(&self, k: usize) -> (f64, f64) {
        let p = self.phase(k);
        let m = |s: &[TracePoint]| mean(s.iter().map(|x| (x.i_teach - x.i_sensory).abs()));
        (m(Self::fraction(p, 0.0, 0.2)), m(Self::fraction(p, 0.8, 1.0)))
    }

    /// Mean tracked level over the first and last quarter of a phase.
    pub fn level_first_last(&self, k: usize, polarity: Polarity) -> (f64, f64) {
        let p = self.phase(k);
        let level = |x: &TracePoint| match polarity {
            Polarity::Excitatory => f64::from(x.w_exc_level),
            Polarity::Inhibitory => f64::from(x.w_inh_level),
        };
        let m = |s: &[TracePoint]| mean(s.iter().map(level));
        (m(Self::fraction(p, 0.0, 0.25)), m(Self::fraction(p, 0.75, 1.0)))
    }

    /// Accepted updates in the first and last quarter of a phase.
    pub fn updates_first_last(&self, k: usize) -> (u64, u64) {
        let p = self.phase(k);
        let sum = |s: &[TracePoint]| s.iter().map(|x| x.accepted_updates).sum();
        (sum(Self::fraction(p, 0.0, 0.25)), sum(Self::fraction(p, 0.75, 1.0)))
    }
}

/// Events of the whole demo, absolute times, sorted.
fn demo_events(cfg: &RunConfig) -> Vec<SpikeEvent> {
    let d = &cfg.demo;
    let seed = cfg.encoding.seed;
    let total = 2.0 * d.phase_duration;
    let mut streams: Vec<Vec<SpikeEvent>> = (0..d.n_inputs)
        .map(|i| {
            let mut rng = seed::rng_for(seed, &[domain::DEMO, 0, i as u64]);
            poisson_train(d.input_rate, total, &mut rng).into_iter().map(|t| SpikeEvent::sensory(t, i as u32)).collect()
        })
        .collect();
    for (phase, positive) in [(0usize, true), (1, false)] {
        let mut rng = seed::rng_for(seed, &[domain::DEMO, 1, phase as u64]);
        let offset = phase as f64 * d.phase_duration;
        streams.push(
            poisson_train(d.teach_rate, d.phase_duration, &mut rng)
                .into_iter()
                .map(|t| SpikeEvent::teach(offset + t, 0, positive))
                .collect(),
        );
    }
    let refs: Vec<&[SpikeEvent]> = streams.iter().map(Vec::as_slice).collect();
    merge_streams(&refs).expect("poisson trains are sorted")
}

pub fn run_demo(cfg: &RunConfig) -> Result<DemoReport, CliError> {
    let d = &cfg.demo;
    let net_cfg = NetworkConfig { n_inputs: d.n_inputs, n_outputs: 1, ..cfg.network.clone() };
    let mut net = Network::build(net_cfg)?;
    for i in 0..d.n_inputs {
        net.set_level(i, 0, Polarity::Excitatory, d.initial_level)?;
        net.set_level(i, 0, Polarity::Inhibitory, d.initial_level)?;
    }

    let events = demo_events(cfg);
    let interval = cfg.network.log_interval;
    let n_chunks = (2.0 * d.phase_duration / interval).round() as usize;
    let mut trace = Vec::with_capacity(n_chunks);
    let mut chunk = Vec::new();
    let mut next = 0;
    for c in 0..n_chunks {
        let start = c as f64 * interval;
        let end = (c + 1) as f64 * interval;
        chunk.clear();
        while next < events.len() && (events[next].time < end || c + 1 == n_chunks) {
            let ev = events[next];
            // Clamp rounding residue at chunk edges into the window.
            let rel = (ev.time - start).clamp(0.0, interval * (1.0 - 1e-9));
            chunk.push(SpikeEvent { time: rel, ..ev });
            next += 1;
        }
        chunk.sort_by(SpikeEvent::order);
        let r = net.run_window(&chunk, interval, false)?;
        let n = net.neuron(0);
        trace.push(TracePoint {
            t: end,
            i_sensory: n.sensory.value,
            i_teach: n.teach.value,
            w_exc_level: net.weights().level(d.tracked_input, 0, Polarity::Excitatory),
            w_inh_level: net.weights().level(d.tracked_input, 0, Polarity::Inhibitory),
            accepted_updates: r.stats.accepted_updates,
        });
    }
    Ok(DemoReport { phase_duration: d.phase_duration, trace })
}

/// Runs the demo and writes `fig3_trace.csv` to `run.output_dir`.
pub fn cmd_demo_fig3(cfg: &RunConfig) -> Result<DemoReport, CliError> {
    let report = run_demo(cfg)?;
    let out = &cfg.run.output_dir;
    ensure_dir(out)?;
    let mut w = csv_writer(&out.join("fig3_trace.csv"))?;
    w.write_record(["t", "i_sensory", "i_teach", "w_exc_level", "w_inh_level"])?;
    for p in &report.trace {
        w.write_record([
            p.t.to_string(),
            p.i_sensory.to_string(),
            p.i_teach.to_string(),
            p.w_exc_level.to_string(),
            p.w_inh_level.to_string(),
        ])?;
    }
    w.flush()?;

    for (k, name) in [(0, "positive"), (1, "negative")] {
        let (m0, m1) = report.mismatch_first_last(k);
        let (u0, u1) = report.updates_first_last(k);
        let (e0, e1) = report.level_first_last(k, Polarity::Excitatory);
        let (h0, h1) = report.level_first_last(k, Polarity::Inhibitory);
        println!(
            "{name} teacher: |teach-sensory| {m0:.4} -> {m1:.4}, updates {u0} -> {u1}, exc level {e0:.2} -> {e1:.2}, inh level {h0:.2} -> {h1:.2}"
        );
    }
    Ok(report)
}
