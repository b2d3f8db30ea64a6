use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::FromPrimitive;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::experiments::{
    empty_block_prob, estimate_solvable_prob, exact_solvable_prob, sample_uniform_multiset,
    tail_prob, GraphFamily, RngStream,
};
use crate::graph::Graph;
use crate::multichoose::multichoose;
use crate::multiset::{enumerate_level, LevelFamily};
use crate::pebbling::{
    block_sufficiency_solvable, is_solvable_bruteforce, is_z_solvable_bruteforce,
    path_solvable_greedy, path_z_solvable_greedy, unsolvability_witness_path,
    weight_certificate_unsolvable, z_solvable, Distribution, DEFAULT_STATE_CAP,
};
use crate::reference::{prob_m, prob_n, prob_n_bounds, reference_m, reference_n};
use crate::shadow::{
    cl_min_shadow, compress_pair, first_column, fully_compress, is_compressed, iterated_shadow,
    lovasz_check, shadow, LOVASZ_SLACK,
};

/// Kept counterexample renderings per sweep.
const EXAMPLE_CAP: usize = 8;

/// Trials per RNG substream in randomized sweeps.
const TRIAL_CHUNK: u64 = 256;

/// Tally of a verification sweep. `examples` keeps the first few rendered
/// counterexamples; `failed` counts all of them.
#[derive(Clone, Debug, Default)]
pub struct SweepOutcome {
    pub checked: u64,
    pub failed: u64,
    pub examples: Vec<String>,
}

impl SweepOutcome {
    pub fn passed(&self) -> bool {
        self.failed == 0
    }

    pub fn passed_count(&self) -> u64 {
        self.checked - self.failed
    }

    fn note(&mut self, ok: bool, example: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failed += 1;
            if self.examples.len() < EXAMPLE_CAP {
                self.examples.push(example());
            }
        }
    }

    pub fn absorb(&mut self, other: SweepOutcome) {
        self.checked += other.checked;
        self.failed += other.failed;
        for e in other.examples {
            if self.examples.len() < EXAMPLE_CAP {
                self.examples.push(e);
            }
        }
    }
}

/// Runs `per_trial` the given number of times; trial i draws from substream
/// floor(i / TRIAL_CHUNK), so results do not depend on worker count.
fn chunked_trials<F>(trials: u64, stream: RngStream, per_trial: F) -> Result<SweepOutcome>
where
    F: Fn(&mut ChaCha8Rng, &mut SweepOutcome) -> Result<()> + Sync,
{
    let chunks = trials.div_ceil(TRIAL_CHUNK);
    let outcomes = (0..chunks)
        .into_par_iter()
        .map(|c| -> Result<SweepOutcome> {
            let mut rng = stream.substream(c).rng();
            let mut out = SweepOutcome::default();
            let in_chunk = (trials - c * TRIAL_CHUNK).min(TRIAL_CHUNK);
            for _ in 0..in_chunk {
                per_trial(&mut rng, &mut out)?;
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut total = SweepOutcome::default();
    for o in outcomes {
        total.absorb(o);
    }
    Ok(total)
}

fn random_level_family(n_max: usize, t_max: u64, rng: &mut ChaCha8Rng) -> Result<LevelFamily> {
    let n = rng.random_range(1..=n_max);
    let t = rng.random_range(1..=t_max);
    let mut fam = LevelFamily::empty(n, t)?;
    for m in enumerate_level(n, t)? {
        if rng.random::<bool>() {
            fam.insert(m)?;
        }
    }
    Ok(fam)
}

fn family_label(f: &LevelFamily) -> String {
    format!(
        "n={} t={} members={:?}",
        f.ground_size(),
        f.level(),
        f.iter().collect::<Vec<_>>()
    )
}

/// Checks |shadow^k F| >= cl_min_shadow for every subfamily of M_n(t).
pub fn cl_exhaustive_sweep(n: usize, t: u64, k: u64) -> Result<SweepOutcome> {
    if k < 1 || k > t {
        return Err(Error::domain(format!(
            "shadow depth {k} out of range 1..={t}"
        )));
    }
    let level = enumerate_level(n, t)?;
    if level.len() > 24 {
        return Err(Error::capacity(
            "exhaustive family sweep",
            format!("2^{}", level.len()),
            1 << 24,
        ));
    }
    let masks: u64 = 1 << level.len();
    let outcomes = (0..masks)
        .into_par_iter()
        .map(|mask| -> Result<SweepOutcome> {
            let mut out = SweepOutcome::default();
            let members = level
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, m)| m.clone());
            let fam = LevelFamily::from_members(n, t, members)?;
            let bound = cl_min_shadow(n, t, &BigUint::from(fam.len() as u64), k)?;
            let actual = BigUint::from(iterated_shadow(&fam, k)?.len() as u64);
            out.note(actual >= bound, || {
                format!(
                    "k={k} |shadow|={actual} < bound {bound} at {}",
                    family_label(&fam)
                )
            });
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut total = SweepOutcome::default();
    for o in outcomes {
        total.absorb(o);
    }
    Ok(total)
}

/// Shadow bound on random families; each trial checks every k in ks that
/// fits the drawn level.
pub fn cl_random_sweep(
    n_max: usize,
    t_max: u64,
    trials: u64,
    ks: &[u64],
    stream: RngStream,
) -> Result<SweepOutcome> {
    chunked_trials(trials, stream, |rng, out| {
        let fam = random_level_family(n_max, t_max, rng)?;
        let mut ok = true;
        let mut detail = String::new();
        for &k in ks.iter().filter(|&&k| k >= 1 && k <= fam.level()) {
            let bound = cl_min_shadow(
                fam.ground_size(),
                fam.level(),
                &BigUint::from(fam.len() as u64),
                k,
            )?;
            let actual = BigUint::from(iterated_shadow(&fam, k)?.len() as u64);
            if actual < bound {
                ok = false;
                detail = format!("k={k} |shadow|={actual} < bound {bound}");
                break;
            }
        }
        out.note(ok, || format!("{detail} at {}", family_label(&fam)));
        Ok(())
    })
}

/// Real-argument shadow bound on every subfamily of M_n(t).
pub fn lovasz_exhaustive_sweep(n: usize, t: u64) -> Result<SweepOutcome> {
    if t == 0 {
        return Err(Error::domain("level must be at least 1"));
    }
    let level = enumerate_level(n, t)?;
    if level.len() > 24 {
        return Err(Error::capacity(
            "exhaustive family sweep",
            format!("2^{}", level.len()),
            1 << 24,
        ));
    }
    let masks: u64 = 1 << level.len();
    let outcomes = (0..masks)
        .into_par_iter()
        .map(|mask| -> Result<SweepOutcome> {
            let mut out = SweepOutcome::default();
            let members = level
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, m)| m.clone());
            let fam = LevelFamily::from_members(n, t, members)?;
            let check = lovasz_check(&fam)?;
            out.note(check.ok, || {
                format!(
                    "x={} bound={} actual={} at {}",
                    check.x,
                    check.bound,
                    check.actual,
                    family_label(&fam)
                )
            });
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut total = SweepOutcome::default();
    for o in outcomes {
        total.absorb(o);
    }
    Ok(total)
}

/// Real-argument shadow bound on random families.
pub fn lovasz_random_sweep(
    n_max: usize,
    t_max: u64,
    trials: u64,
    stream: RngStream,
) -> Result<SweepOutcome> {
    chunked_trials(trials, stream, |rng, out| {
        let fam = random_level_family(n_max, t_max, rng)?;
        let check = lovasz_check(&fam)?;
        out.note(check.ok, || {
            format!(
                "x={} bound={} actual={} at {}",
                check.x,
                check.bound,
                check.actual,
                family_label(&fam)
            )
        });
        Ok(())
    })
}

/// On full levels the real-argument bound is tight: |actual - bound| within
/// slack.
pub fn lovasz_tight_sweep(m_max: usize, t_max: u64) -> Result<SweepOutcome> {
    let mut out = SweepOutcome::default();
    for m in 1..=m_max {
        for t in 1..=t_max {
            let fam = LevelFamily::full_level(m, t)?;
            let check = lovasz_check(&fam)?;
            let gap = (check.actual as f64 - check.bound).abs();
            out.note(check.ok && gap <= LOVASZ_SLACK, || {
                format!(
                    "m={m} t={t} bound={} actual={} gap={gap}",
                    check.bound, check.actual
                )
            });
        }
    }
    Ok(out)
}

/// Random (family, i, j) compression triples: sizes are preserved, the
/// shadow never grows, the step is idempotent, and every compressed family
/// met on the way has as many shadow members as members containing 1.
pub fn compression_random_sweep(
    n_max: usize,
    t_max: u64,
    trials: u64,
    stream: RngStream,
) -> Result<SweepOutcome> {
    if n_max < 2 {
        return Err(Error::domain("need ground sets of at least two elements"));
    }
    chunked_trials(trials, stream, |rng, out| {
        let n = rng.random_range(2..=n_max);
        let t = rng.random_range(1..=t_max);
        let mut fam = LevelFamily::empty(n, t)?;
        for m in enumerate_level(n, t)? {
            if rng.random::<bool>() {
                fam.insert(m)?;
            }
        }
        let j = rng.random_range(2..=n);
        let i = rng.random_range(1..j);
        let (q, step) = compress_pair(&fam, i, j)?;
        let shadow_before = shadow(&fam)?.len();
        let shadow_after = shadow(&q)?.len();
        let (q2, step2) = compress_pair(&q, i, j)?;
        let mut ok = q.len() == fam.len() && shadow_after <= shadow_before;
        ok &= q2 == q && step2.moved == 0;
        if step.moved == 0 {
            ok &= q == fam;
        }
        for x in [&fam, &q] {
            if is_compressed(x) {
                ok &= shadow(x)?.len() == first_column(x).len();
            }
        }
        let full = fully_compress(&fam);
        ok &= is_compressed(&full)
            && full.len() == fam.len()
            && shadow(&full)?.len() <= shadow_before
            && shadow(&full)?.len() == first_column(&full).len();
        out.note(ok, || {
            format!(
                "i={i} j={j} |shadow F|={shadow_before} |shadow qF|={shadow_after} at {}",
                family_label(&fam)
            )
        });
        Ok(())
    })
}

/// Exhaustive path solver cross-check: linear-time greedy against brute
/// force for every distribution and root, plus the all-roots variants.
pub fn path_solver_sweep(n_max: usize, t_max: u64) -> Result<SweepOutcome> {
    let mut total = SweepOutcome::default();
    for n in 1..=n_max {
        let g = Graph::path(n)?;
        for t in 0..=t_max {
            let members = enumerate_level(n, t)?;
            let outcomes = members
                .par_iter()
                .map(|m| -> Result<SweepOutcome> {
                    let mut out = SweepOutcome::default();
                    let d = Distribution::from_multiset(m);
                    let mut all = true;
                    for z in 1..=n {
                        let brute =
                            is_z_solvable_bruteforce(&g, &d, z, DEFAULT_STATE_CAP)?.is_some();
                        all &= brute;
                        out.note(path_z_solvable_greedy(&d, z)? == brute, || {
                            format!("{d:?} root {z}: greedy != brute ({brute})")
                        });
                    }
                    out.note(path_solvable_greedy(&d) == all, || {
                        format!("{d:?}: all-roots greedy != brute ({all})")
                    });
                    out.note(
                        is_solvable_bruteforce(&g, &d, DEFAULT_STATE_CAP)? == all,
                        || format!("{d:?}: all-roots brute mask != per-root brute ({all})"),
                    );
                    Ok(out)
                })
                .collect::<Result<Vec<_>>>()?;
            for o in outcomes {
                total.absorb(o);
            }
        }
    }
    Ok(total)
}

/// Closed-form complete-graph solvers against brute force.
pub fn complete_solver_sweep(n_max: usize, t_max: u64) -> Result<SweepOutcome> {
    let mut total = SweepOutcome::default();
    for n in 1..=n_max {
        let g = Graph::complete(n)?;
        for t in 0..=t_max {
            for m in enumerate_level(n, t)? {
                let d = Distribution::from_multiset(&m);
                let mut all = true;
                for z in 1..=n {
                    let brute = is_z_solvable_bruteforce(&g, &d, z, DEFAULT_STATE_CAP)?.is_some();
                    all &= brute;
                    total.note(
                        crate::pebbling::complete_z_solvable(&d, z)? == brute,
                        || format!("{d:?} root {z}: closed form != brute ({brute})"),
                    );
                }
                total.note(crate::pebbling::complete_solvable(&d) == all, || {
                    format!("{d:?}: closed form != brute ({all})")
                });
            }
        }
    }
    Ok(total)
}

/// Weight certificates and empty-block witnesses against brute force on
/// paths: a certificate at z must mean z is brute-force unsolvable.
pub fn certificate_soundness_sweep(n_max: usize, t_max: u64) -> Result<SweepOutcome> {
    let mut total = SweepOutcome::default();
    for n in 1..=n_max {
        let g = Graph::path(n)?;
        for t in 0..=t_max {
            let members = enumerate_level(n, t)?;
            let outcomes = members
                .par_iter()
                .map(|m| -> Result<SweepOutcome> {
                    let mut out = SweepOutcome::default();
                    let d = Distribution::from_multiset(m);
                    for z in 1..=n {
                        if weight_certificate_unsolvable(&d, z)? {
                            let brute =
                                is_z_solvable_bruteforce(&g, &d, z, DEFAULT_STATE_CAP)?.is_some();
                            out.note(!brute, || {
                                format!("{d:?} root {z}: certificate but brute-solvable")
                            });
                        } else {
                            out.checked += 1;
                        }
                    }
                    for mm in (1..=n).filter(|mm| n % mm <= n / mm) {
                        if let Some((blk, c)) = unsolvability_witness_path(&d, mm)? {
                            let brute =
                                is_z_solvable_bruteforce(&g, &d, c, DEFAULT_STATE_CAP)?.is_some();
                            out.note(!brute, || {
                                format!(
                                    "{d:?} m={mm}: witness [{}..{}] center {c} but brute-solvable",
                                    blk.lo, blk.hi
                                )
                            });
                        } else {
                            out.checked += 1;
                        }
                    }
                    Ok(out)
                })
                .collect::<Result<Vec<_>>>()?;
            for o in outcomes {
                total.absorb(o);
            }
        }
    }
    Ok(total)
}

/// Block-sufficiency positives must be brute-force solvable. Levels run
/// high enough to include every minimal positive and two more.
pub fn block_sufficiency_sweep(n_max: usize, m_max: usize) -> Result<SweepOutcome> {
    let mut total = SweepOutcome::default();
    for n in 1..=n_max {
        for m in (1..=m_max.min(n)).filter(|&m| n % m <= n / m) {
            let t_hi = (1u64 << m) * (n / m) as u64 + 2;
            for t in 0..=t_hi {
                let members = enumerate_level(n, t)?;
                let outcomes = members
                    .par_iter()
                    .map(|ms| -> Result<SweepOutcome> {
                        let mut out = SweepOutcome::default();
                        let d = Distribution::from_multiset(ms);
                        if block_sufficiency_solvable(&d, m)? {
                            let g = Graph::path(n)?;
                            out.note(is_solvable_bruteforce(&g, &d, DEFAULT_STATE_CAP)?, || {
                                format!("{d:?} m={m}: sufficiency but brute-unsolvable")
                            });
                        } else {
                            out.checked += 1;
                        }
                        Ok(out)
                    })
                    .collect::<Result<Vec<_>>>()?;
                for o in outcomes {
                    total.absorb(o);
                }
            }
        }
    }
    Ok(total)
}

/// Exact reference probabilities against direct family enumeration.
pub fn reference_exact_sweep(n_max: usize, r_max: u64) -> Result<SweepOutcome> {
    let mut out = SweepOutcome::default();
    for n in 1..=n_max {
        for r in 1..=r_max {
            let total = multichoose(n as u64, r)?;
            for b in 1..=r {
                let fam = reference_m(n, r, b)?;
                let want =
                    BigRational::new(BigUint::from(fam.len() as u64).into(), total.clone().into());
                out.note(prob_m(n, r, b)? == want, || {
                    format!("prob_m({n},{r},{b}) != {}/{}", fam.len(), total)
                });
            }
            for b in 1..n as u64 {
                let fam = reference_n(n, r, b)?;
                let want =
                    BigRational::new(BigUint::from(fam.len() as u64).into(), total.clone().into());
                out.note(prob_n(n, r, b)? == want, || {
                    format!("prob_n({n},{r},{b}) != {}/{}", fam.len(), total)
                });
            }
        }
    }
    Ok(out)
}

/// Relative slack separating the f64 fast path from the exact comparison.
const BOUND_MARGIN: f64 = 1e-9;

/// The exponential sandwich bounds hold for every valid (n, r, b) on the
/// grid, verified at f64 resolution. The first family is checked on the
/// complement 1 - p, which stays far from the catastrophic cancellation of
/// 1 - exp(-x) near 1; values clear of the bounds by a relative margin
/// pass on f64 alone, anything closer is cross-multiplied exactly.
pub fn reference_bound_sweep(n_max: usize, r_max: u64) -> Result<SweepOutcome> {
    let outcomes = (1..=n_max)
        .into_par_iter()
        .map(|n| -> Result<SweepOutcome> {
            let mut out = SweepOutcome::default();
            for r in 1..=r_max {
                // Complement of prob_m(n, r, b) over b, one factor per step:
                // exp(-b(n-1)/(r-b+1)) <= q <= exp(-b(n-1)/(n+r-1)).
                let mut num = BigUint::from(1u32);
                let mut den = BigUint::from(1u32);
                for b in 1..=r {
                    num *= BigUint::from(r - b + 1);
                    den *= BigUint::from(n as u64 + r - b);
                    let scale = (b * (n as u64 - 1)) as f64;
                    let q_lo = (-(scale / (r - b + 1) as f64)).exp();
                    let q_hi = (-(scale / (n as u64 + r - 1) as f64)).exp();
                    let q = approx_prob(&num, &den);
                    let ok = q >= q_lo * (1.0 + BOUND_MARGIN) && q <= q_hi * (1.0 - BOUND_MARGIN)
                        || in_band_raw(&num, &den, q_lo, q_hi);
                    out.note(ok, || {
                        format!("prob_m({n},{r},{b}): complement {q} outside [{q_lo},{q_hi}]")
                    });
                }
                if n >= 2 {
                    let mut num = BigUint::from(1u32);
                    let mut den = BigUint::from(1u32);
                    for b in 1..n as u64 {
                        num *= BigUint::from(n as u64 - b);
                        den *= BigUint::from(n as u64 + r - b);
                        let (lo, hi) = prob_n_bounds(n, r, b)?;
                        let p = approx_prob(&num, &den);
                        let ok = p >= lo * (1.0 + BOUND_MARGIN) && p <= hi * (1.0 - BOUND_MARGIN)
                            || in_band_raw(&num, &den, lo, hi);
                        out.note(ok, || {
                            format!("prob_n({n},{r},{b}): {p} outside [{lo},{hi}]")
                        });
                    }
                }
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut total = SweepOutcome::default();
    for o in outcomes {
        total.absorb(o);
    }
    Ok(total)
}

/// num/den as f64 without reducing the fraction; truncating both to their
/// top 64 bits keeps the relative error below 1e-15, far inside the fast
/// path's margin.
fn approx_prob(num: &BigUint, den: &BigUint) -> f64 {
    let shift = (num.bits().max(den.bits()).saturating_sub(64)) as usize;
    let n = num_traits::ToPrimitive::to_f64(&(num >> shift)).unwrap_or(f64::NAN);
    let d = num_traits::ToPrimitive::to_f64(&(den >> shift)).unwrap_or(f64::NAN);
    n / d
}

/// Exact lo <= num/den <= hi. new_raw skips reduction; Ratio comparison
/// works on unreduced operands, so no gcd of the huge products is paid.
fn in_band_raw(num: &BigUint, den: &BigUint, lo: f64, hi: f64) -> bool {
    let q = BigRational::new_raw(num.clone().into(), den.clone().into());
    let lo = BigRational::from_f64(lo).expect("finite bound");
    let hi = BigRational::from_f64(hi).expect("finite bound");
    lo <= q && q <= hi
}

/// tail_prob and empty_block_prob against direct level enumeration.
pub fn tail_formula_sweep(n_max: usize, t_max: u64) -> Result<SweepOutcome> {
    let mut out = SweepOutcome::default();
    for n in 1..=n_max {
        for t in 0..=t_max {
            let level = enumerate_level(n, t)?;
            let total = level.len() as u64;
            for p in 0..=(t + 1) {
                let hits = level.iter().filter(|m| m.count(1) >= p).count() as u64;
                let want =
                    BigRational::new(BigUint::from(hits).into(), BigUint::from(total).into());
                out.note(tail_prob(n, t, p)? == want, || {
                    format!("tail_prob({n},{t},{p}) != {hits}/{total}")
                });
            }
            for m in 1..=n {
                let hits = level
                    .iter()
                    .filter(|ms| (1..=m).all(|v| ms.count(v) == 0))
                    .count() as u64;
                let want =
                    BigRational::new(BigUint::from(hits).into(), BigUint::from(total).into());
                out.note(empty_block_prob(n, t, m)? == want, || {
                    format!("empty_block_prob({n},{t},{m}) != {hits}/{total}")
                });
            }
        }
    }
    Ok(out)
}

/// Monte Carlo estimates against exact probabilities: per configuration,
/// at most one of `repeats` seeded runs may drift beyond the full interval
/// width from the exact value.
pub fn mc_vs_exact_sweep(
    configs: &[(GraphFamily, usize, u64)],
    repeats: u64,
    samples: u64,
    stream: RngStream,
) -> Result<SweepOutcome> {
    let mut total = SweepOutcome::default();
    for (idx, &(family, n, t)) in configs.iter().enumerate() {
        let g = family.build(n)?;
        let exact = num_traits::ToPrimitive::to_f64(&exact_solvable_prob(
            &g,
            t,
            crate::experiments::DEFAULT_EXACT_CAP,
            DEFAULT_STATE_CAP,
        )?)
        .expect("probability fits in f64");
        let config_stream = stream.substream(idx as u64);
        let hits = (0..repeats)
            .into_par_iter()
            .map(|rep| -> Result<u64> {
                let e = estimate_solvable_prob(
                    &g,
                    t,
                    samples,
                    config_stream.substream(rep),
                    DEFAULT_STATE_CAP,
                )?;
                let width = e.ci_high - e.ci_low;
                Ok(((e.p_hat - exact).abs() <= width) as u64)
            })
            .try_reduce(|| 0, |a, b| Ok(a + b))?;
        total.note(hits + 1 >= repeats, || {
            format!("{family} n={n} t={t}: only {hits}/{repeats} runs near exact {exact}")
        });
    }
    Ok(total)
}

/// Adding a pebble never destroys z-solvability, across path, cycle and
/// complete shapes.
pub fn monotonicity_sweep(n_max: usize, t_max: u64) -> Result<SweepOutcome> {
    let mut graphs = Vec::new();
    for n in 1..=n_max {
        graphs.push(Graph::path(n)?);
        graphs.push(Graph::complete(n)?);
        if n >= 3 {
            graphs.push(Graph::cycle(n)?);
        }
    }
    let mut total = SweepOutcome::default();
    for g in &graphs {
        let n = g.n();
        for t in 0..=t_max {
            let members = enumerate_level(n, t)?;
            let outcomes = members
                .par_iter()
                .map(|m| -> Result<SweepOutcome> {
                    let mut out = SweepOutcome::default();
                    let d = Distribution::from_multiset(m);
                    let solvable_roots: Vec<bool> = (1..=n)
                        .map(|z| z_solvable(g, &d, z, DEFAULT_STATE_CAP))
                        .collect::<Result<_>>()?;
                    for v in 1..=n {
                        let bigger = d.adding(v)?;
                        for z in 1..=n {
                            if !solvable_roots[z - 1] {
                                continue;
                            }
                            out.note(z_solvable(g, &bigger, z, DEFAULT_STATE_CAP)?, || {
                                format!(
                                    "{:?} on {} vertices: root {z} solvable at {d:?} but not +e_{v}",
                                    g.kind(),
                                    g.n()
                                )
                            });
                        }
                    }
                    Ok(out)
                })
                .collect::<Result<Vec<_>>>()?;
            for o in outcomes {
                total.absorb(o);
            }
        }
    }
    Ok(total)
}

/// Sampler sanity shared by the CLI: mean pebble count per vertex over a
/// sampled batch must stay near t/n.
pub fn sampler_mean_sweep(
    n: usize,
    t: u64,
    samples: u64,
    stream: RngStream,
) -> Result<SweepOutcome> {
    if samples == 0 {
        return Err(Error::domain("need at least one sample"));
    }
    let mut rng = stream.rng();
    let mut sums = vec![0u64; n];
    for _ in 0..samples {
        let m = sample_uniform_multiset(n, t, &mut rng)?;
        for (i, &c) in m.counts().iter().enumerate() {
            sums[i] += c;
        }
    }
    let mut out = SweepOutcome::default();
    let want = t as f64 / n as f64;
    // Four-sigma-ish band around the per-vertex mean; loose but safe.
    let sd = (t as f64).sqrt() / (samples as f64).sqrt();
    let band = 4.5 * sd.max(1e-12) + 1e-9;
    for (i, &s) in sums.iter().enumerate() {
        let mean = s as f64 / samples as f64;
        out.note((mean - want).abs() <= band, || {
            format!("vertex {}: mean {mean} vs {want} (band {band})", i + 1)
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exhaustive_sweeps_pass_on_tiny_levels() {
        let cl = cl_exhaustive_sweep(3, 2, 1).unwrap();
        assert_eq!(cl.checked, 64);
        assert!(cl.passed());
        assert!(cl_exhaustive_sweep(3, 2, 3).is_err());
        let lv = lovasz_exhaustive_sweep(3, 2).unwrap();
        assert_eq!(lv.checked, 64);
        assert!(lv.passed());
    }

    #[test]
    fn random_sweeps_pass() {
        let s = RngStream::new(11);
        assert!(cl_random_sweep(4, 4, 500, &[1, 2], s).unwrap().passed());
        assert!(lovasz_random_sweep(4, 4, 500, s).unwrap().passed());
        let comp = compression_random_sweep(4, 4, 500, s).unwrap();
        assert_eq!(comp.checked, 500);
        assert!(comp.passed());
    }

    #[test]
    fn sweeps_are_deterministic() {
        let s = RngStream::new(3).substream(9);
        let a = compression_random_sweep(5, 5, 300, s).unwrap();
        let b = compression_random_sweep(5, 5, 300, s).unwrap();
        assert_eq!(a.checked, b.checked);
        assert_eq!(a.failed, b.failed);
    }

    #[test]
    fn solver_and_certificate_sweeps_pass_small() {
        assert!(path_solver_sweep(3, 4).unwrap().passed());
        assert!(complete_solver_sweep(3, 4).unwrap().passed());
        assert!(certificate_soundness_sweep(3, 4).unwrap().passed());
        assert!(block_sufficiency_sweep(3, 2).unwrap().passed());
    }

    #[test]
    fn formula_sweeps_pass_small() {
        assert!(reference_exact_sweep(4, 4).unwrap().passed());
        assert!(reference_bound_sweep(12, 12).unwrap().passed());
        assert!(tail_formula_sweep(4, 4).unwrap().passed());
        assert!(lovasz_tight_sweep(3, 3).unwrap().passed());
    }

    #[test]
    fn monotonicity_sweep_passes_small() {
        assert!(monotonicity_sweep(3, 3).unwrap().passed());
    }

    #[test]
    fn mc_sweep_passes_tiny() {
        let configs = [(GraphFamily::Path, 2, 2), (GraphFamily::Path, 3, 2)];
        let out = mc_vs_exact_sweep(&configs, 10, 2000, RngStream::new(77)).unwrap();
        assert_eq!(out.checked, 2);
        assert!(out.passed());
    }

    #[test]
    fn sampler_mean_sweep_passes() {
        assert!(sampler_mean_sweep(4, 6, 4000, RngStream::new(5))
            .unwrap()
            .passed());
    }

    #[test]
    fn outcome_bookkeeping() {
        let mut out = SweepOutcome::default();
        out.note(true, || unreachable!());
        out.note(false, || "boom".to_string());
        assert_eq!(out.checked, 2);
        assert_eq!(out.failed, 1);
        assert_eq!(out.passed_count(), 1);
        assert!(!out.passed());
        assert_eq!(out.examples, vec!["boom".to_string()]);
    }
}
