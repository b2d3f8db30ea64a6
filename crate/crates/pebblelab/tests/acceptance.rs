//! The release gate: eleven criteria, one printed pass/fail line each.
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines
//! as they complete. Every tolerance is pinned here, not read from anywhere.

use std::time::{Duration, Instant};

use pebblelab::experiments::{estimate_threshold, GraphFamily, RngStream, ThresholdConfig};
use pebblelab::sweeps::{
    block_sufficiency_sweep, certificate_soundness_sweep, cl_exhaustive_sweep, cl_random_sweep,
    compression_random_sweep, lovasz_exhaustive_sweep, lovasz_random_sweep, lovasz_tight_sweep,
    mc_vs_exact_sweep, monotonicity_sweep, path_solver_sweep, reference_bound_sweep,
    reference_exact_sweep, tail_formula_sweep, SweepOutcome,
};
use pebblelab::Result;

/// Threshold ratio band for quadrupling n on complete graphs (2 expected).
const COMPLETE_RATIO_BAND: (f64, f64) = (1.4, 2.9);
/// Path thresholds must land in [n, n^PATH_EXPONENT].
const PATH_EXPONENT: f64 = 1.6;

const SWEEP_SEED: u64 = 1;
const MC_SEED: u64 = 8;
const COMPLETE_SEED: u64 = 9;
const PATH_SEED: u64 = 10;

struct Gate {
    failures: Vec<String>,
}

impl Gate {
    fn run(
        &mut self,
        idx: u32,
        label: &str,
        budget: Duration,
        body: impl FnOnce() -> Result<(bool, String)>,
    ) {
        let start = Instant::now();
        let outcome = body();
        let elapsed = start.elapsed();
        let (mut ok, detail) = match outcome {
            Ok(pair) => pair,
            Err(e) => (false, format!("error: {e}")),
        };
        let mut line = format!("{detail} [{:.1}s]", elapsed.as_secs_f64());
        if elapsed > budget {
            ok = false;
            line.push_str(&format!(" over the {}s budget", budget.as_secs()));
        }
        let verdict = if ok { "pass" } else { "FAIL" };
        println!("criterion {idx:2} ({label}): {verdict} - {line}");
        if !ok {
            self.failures
                .push(format!("criterion {idx} ({label}): {line}"));
        }
    }
}

/// All parts must pass; the line shows per-part tallies and, on failure,
/// one counterexample.
fn tally(parts: &[(&str, &SweepOutcome)]) -> (bool, String) {
    let ok = parts.iter().all(|(_, o)| o.passed());
    let mut line = parts
        .iter()
        .map(|(name, o)| format!("{name} {}/{}", o.passed_count(), o.checked))
        .collect::<Vec<_>>()
        .join(", ");
    if let Some(e) = parts.iter().flat_map(|(_, o)| o.examples.iter()).next() {
        line.push_str(&format!("; e.g. {e}"));
    }
    (ok, line)
}

fn threshold(family: GraphFamily, n: usize, samples: u64, seed: u64) -> Result<Option<u64>> {
    let cfg = ThresholdConfig {
        samples_per_t: samples,
        ..ThresholdConfig::default()
    };
    Ok(estimate_threshold(family, n, cfg, RngStream::new(seed).substream(n as u64))?.t_hat)
}

#[test]
fn acceptance() {
    let mut gate = Gate {
        failures: Vec::new(),
    };
    let secs = Duration::from_secs;

    gate.run(1, "shadow lower bound", secs(60), || {
        let full = cl_exhaustive_sweep(3, 3, 1)?;
        let random = cl_random_sweep(4, 4, 100_000, &[1, 2], RngStream::new(SWEEP_SEED))?;
        let (ok, line) = tally(&[("exhaustive", &full), ("random", &random)]);
        Ok((ok && full.checked == 1 << 10, line))
    });

    gate.run(2, "product bound", secs(60), || {
        let full = lovasz_exhaustive_sweep(3, 3)?;
        let random = lovasz_random_sweep(4, 4, 100_000, RngStream::new(SWEEP_SEED))?;
        let tight = lovasz_tight_sweep(5, 5)?;
        Ok(tally(&[
            ("exhaustive", &full),
            ("random", &random),
            ("tight", &tight),
        ]))
    });

    gate.run(3, "compression", secs(30), || {
        let out = compression_random_sweep(5, 5, 10_000, RngStream::new(SWEEP_SEED))?;
        Ok(tally(&[("triples", &out)]))
    });

    gate.run(4, "path solver equivalence", secs(30), || {
        let out = path_solver_sweep(5, 6)?;
        Ok(tally(&[("checks", &out)]))
    });

    gate.run(5, "certificate soundness", secs(60), || {
        let certs = certificate_soundness_sweep(6, 6)?;
        let blocks = block_sufficiency_sweep(6, 2)?;
        Ok(tally(&[("certificates", &certs), ("blocks", &blocks)]))
    });

    gate.run(6, "reference probabilities", secs(30), || {
        let exact = reference_exact_sweep(6, 6)?;
        let bounds = reference_bound_sweep(200, 200)?;
        Ok(tally(&[("exact", &exact), ("bounds", &bounds)]))
    });

    gate.run(7, "tail and empty-block formulas", secs(10), || {
        let out = tail_formula_sweep(6, 6)?;
        Ok(tally(&[("checks", &out)]))
    });

    gate.run(8, "Monte Carlo vs exact", secs(300), || {
        let mut configs = Vec::new();
        for t in 0..=4 {
            configs.push((GraphFamily::Path, 2, t));
        }
        for t in 0..=6 {
            configs.push((GraphFamily::Path, 3, t));
        }
        for t in 0..=5 {
            configs.push((GraphFamily::Cycle, 4, t));
        }
        let out = mc_vs_exact_sweep(&configs, 100, 20_000, RngStream::new(MC_SEED))?;
        Ok(tally(&[("configs", &out)]))
    });

    gate.run(9, "complete-graph threshold scaling", secs(300), || {
        let mut hats = Vec::new();
        for n in [16usize, 64, 256] {
            match threshold(GraphFamily::Complete, n, 2000, COMPLETE_SEED)? {
                Some(t) => hats.push(t),
                None => return Ok((false, format!("no threshold found for n = {n}"))),
            }
        }
        let ratios = [
            hats[1] as f64 / hats[0] as f64,
            hats[2] as f64 / hats[1] as f64,
        ];
        let ok = ratios
            .iter()
            .all(|r| (COMPLETE_RATIO_BAND.0..=COMPLETE_RATIO_BAND.1).contains(r));
        Ok((
            ok,
            format!(
                "t_hat = {hats:?}, ratios {:.2} and {:.2}",
                ratios[0], ratios[1]
            ),
        ))
    });

    gate.run(10, "path threshold bracket", secs(1200), || {
        let ns = [8usize, 16, 32, 64];
        let mut hats = Vec::new();
        for n in ns {
            match threshold(GraphFamily::Path, n, 1000, PATH_SEED)? {
                Some(t) => hats.push(t),
                None => return Ok((false, format!("no threshold found for n = {n}"))),
            }
        }
        let in_band = ns
            .iter()
            .zip(&hats)
            .all(|(&n, &t)| n as u64 <= t && (t as f64) <= (n as f64).powf(PATH_EXPONENT));
        // t/n non-decreasing, compared exactly: t' * n >= t * n'.
        let monotone = ns
            .windows(2)
            .zip(hats.windows(2))
            .all(|(n, t)| t[1] * n[0] as u64 >= t[0] * n[1] as u64);
        Ok((
            in_band && monotone,
            format!("t_hat = {hats:?} for n = {ns:?}"),
        ))
    });

    gate.run(11, "solvability monotonicity", secs(30), || {
        let out = monotonicity_sweep(4, 5)?;
        Ok(tally(&[("pebble additions", &out)]))
    });

    assert!(
        gate.failures.is_empty(),
        "{} criterion(s) failed:\n{}",
        gate.failures.len(),
        gate.failures.join("\n")
    );
}
