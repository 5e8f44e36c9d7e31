//! Acceptance suite: one line per numbered criterion.
//!
//! Prints `[PASS]` or `[FAIL]` with the measured values. The process exits 0 unless
//! `NOTCHWAVE_ACCEPTANCE_STRICT=1` is set, in which case any failure exits 1.

#[allow(dead_code)]
#[path = "../../core/tests/common/oracle.rs"]
mod oracle;

use std::time::Instant;

use notchwave_cli::repro::{
    case_designs, fig11_designs, projection_design, qcqp_design, quantizer_input, reference_design, scenario_bands,
    scenario_designs, short_welch, ReproOptions, FIG11_BANDS_HZ, QUANTIZER_BITS, SAMPLE_RATE, SCENARIO_BLOCKS,
    SCENARIO_DEPTH_DB, SCENARIO_LENGTH, SEGMENT_LEN, TRADEOFF_BLOCK,
};
use notchwave_core::analysis::{notch_depth, psll_db, welch_psd, AcfConfig, NotchConfig, WelchConfig};
use notchwave_core::projection::{generate_reference, project_notch, ProjectionRequest};
use notchwave_core::qcqp::{design_blockwise, solve_block, QcqpDesignSpec, SolverConfig};
use notchwave_core::quantizer::{notch_degradation, quantization_report};
use notchwave_core::spectral::{band_grid_indices, check_constraints};
use notchwave_core::{BandOperator, Complex64, FrequencyGrid, StopBand};
use notchwave_sim::{run_scenario, ScenarioConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<(bool, String), String>;

// Tolerances.
const PROJ_MAX_DB: f64 = -90.0;
const QCQP_MEAN_DB: (f64, f64) = (61.0, 3.0);
const QCQP_MIN_DB: f64 = 50.0;
const SLACK_TOL: f64 = 1e-9;
const EQUIV_REL: f64 = 1e-6;
const PSLL_SEEDS: u64 = 20;
const PSLL_REF: (f64, f64) = (-44.8, 1.5);
const PSLL_DESIGN: (f64, f64) = (-14.5, 2.0);
const PSLL_SEGMENT: (f64, f64) = (-12.9, 2.0);
const TRADEOFF_SAME_DB: f64 = 1.0;
const TRADEOFF_DEGRADED_DB: f64 = 5.0;
const VARIANCE_REL: f64 = 0.05;
const TABLE2_THEORY: [&str; 5] = ["5.0863e-6", "3.1789e-7", "1.9868e-8", "1.2418e-9", "7.7610e-11"];
const ENERGY_REL: f64 = 0.10;
const QUANT_DEPTH_8: (f64, f64) = (44.0, 4.0);
const QUANT_DEPTH_16: (f64, f64) = (92.0, 4.0);
const MULTIBLOCK_GAP_DB: f64 = 5.0;
const CASE_DEPTH_DB: f64 = 3.0;
const CASE_80_MIN_DB: f64 = 70.0;
const ERROR_RATE_BARRAGE: (f64, f64) = (45.0, 55.0);
const BARRAGE_DELTA: (f64, f64) = (-60.0, -55.0);
const INTEGRATION_GAIN: (f64, f64) = (13.0, 1.0);
const DESIGN_VS_BARRAGE_DB: f64 = 1.0;
const SCENARIO_MAX_S: f64 = 300.0;
const ORACLE_INSTANCES: u64 = 200;
const ORACLE_REL: f64 = 1e-6;

fn within(x: f64, (center, tol): (f64, f64)) -> bool {
    (x - center).abs() <= tol
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

fn criterion_1() -> Outcome {
    let bands = scenario_bands(SCENARIO_DEPTH_DB).map_err(e)?;
    let d = projection_design(SCENARIO_LENGTH, 1, &bands).map_err(e)?;
    let psd = welch_psd(&d.samples, &WelchConfig::default()).map_err(e)?;
    let r = notch_depth(&psd, &bands, &NotchConfig::default()).map_err(e)?;
    let worst = -r.min_depth_db();
    let means: Vec<String> = r.bands.iter().map(|b| format!("{:.1}", -b.depth_mean_db)).collect();
    Ok((worst <= PROJ_MAX_DB, format!("highest in-band bin {worst:.1} dB (limit {PROJ_MAX_DB}), band means [{}] dB", means.join(", "))))
}

fn criterion_2() -> Outcome {
    let bands = scenario_bands(SCENARIO_DEPTH_DB).map_err(e)?;
    let mut pass = true;
    let mut detail = Vec::new();
    for block in SCENARIO_BLOCKS {
        let d = qcqp_design(SCENARIO_LENGTH, 1, block, block / 2, &bands).map_err(e)?;
        let r = notch_depth(&welch_psd(&d.samples, &WelchConfig::default()).map_err(e)?, &bands, &NotchConfig::default())
            .map_err(e)?;
        let min_slack = d.windows.iter().flat_map(|w| w.slacks()).fold(f64::INFINITY, f64::min);
        let mean_ok = r.bands.iter().all(|b| within(b.depth_mean_db, QCQP_MEAN_DB));
        let min_ok = r.min_depth_db() >= QCQP_MIN_DB;
        pass &= mean_ok && min_ok && min_slack >= -SLACK_TOL;
        let means: Vec<String> = r.bands.iter().map(|b| format!("{:.1}", b.depth_mean_db)).collect();
        detail.push(format!(
            "N̄={block}: mean [{}] dB, min {:.1} dB, min slack {min_slack:.1e}",
            means.join(", "),
            r.min_depth_db()
        ));
    }
    Ok((pass, detail.join("; ")))
}

/// Zeroes the stop-band bins with an O(N²) DFT.
fn brute_force_null(c: &[Complex64], bands: &[StopBand]) -> Vec<Complex64> {
    let n = c.len();
    let grid = FrequencyGrid::new(n).unwrap();
    let w = |k: usize, m: usize, sign: f64| Complex64::from_polar(1.0, sign * 2.0 * std::f64::consts::PI * ((k * m) % n) as f64 / n as f64);
    let mut x: Vec<Complex64> = (0..n).map(|k| (0..n).map(|m| c[m] * w(k, m, -1.0)).sum()).collect();
    for b in bands {
        for k in band_grid_indices(b, &grid).unwrap() {
            x[k] = Complex64::new(0.0, 0.0);
        }
    }
    (0..n).map(|m| (0..n).map(|k| x[k] * w(k, m, 1.0)).sum::<Complex64>() / n as f64).collect()
}

fn rel_dist(a: &[Complex64], b: &[Complex64]) -> f64 {
    let d: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    let n: f64 = b.iter().map(|y| y.norm_sqr()).sum();
    (d / n).sqrt()
}

/// Scenario bands with every cap set to zero.
fn null_bands() -> Result<Vec<StopBand>, String> {
    scenario_bands(SCENARIO_DEPTH_DB).map_err(e)?.into_iter().map(|b| b.with_max_energy(0.0).map_err(e)).collect()
}

fn criterion_3() -> Outcome {
    let bands = null_bands()?;
    let reference = generate_reference(SCENARIO_LENGTH, 1).map_err(e)?;
    let proj = project_notch(&ProjectionRequest::new(reference.clone(), bands.clone())).map_err(e)?;
    let spec = QcqpDesignSpec::new(reference, SCENARIO_LENGTH, 0, bands.clone(), SolverConfig::default()).map_err(e)?;
    let q = design_blockwise(&spec).map_err(e)?;
    let big = rel_dist(&q.waveform, &proj);

    let small_bands = bands.clone();
    let c0 = generate_reference(64, 3).map_err(e)?;
    let oracle = brute_force_null(&c0, &small_bands);
    let p64 = project_notch(&ProjectionRequest::new(c0.clone(), small_bands.clone())).map_err(e)?;
    let q64 = design_blockwise(&QcqpDesignSpec::new(c0, 64, 0, small_bands, SolverConfig::default()).map_err(e)?).map_err(e)?;
    let (dp, dq) = (rel_dist(&p64, &oracle), rel_dist(&q64.waveform, &oracle));
    let pass = big <= EQUIV_REL && dp <= EQUIV_REL && dq <= EQUIV_REL && q.converged() && q64.converged();
    Ok((pass, format!("N=1e5 qcqp vs proj {big:.1e}; N=64 proj vs DFT oracle {dp:.1e}, qcqp vs DFT oracle {dq:.1e} (limit {EQUIV_REL:e})")))
}

fn criterion_4() -> Outcome {
    let cfg = AcfConfig::default();
    let mut sums = [0.0; 4];
    let mut segs = [0.0; 4];
    let mut labels = Vec::new();
    for seed in 0..PSLL_SEEDS {
        let designs = scenario_designs(SCENARIO_LENGTH, seed, SCENARIO_DEPTH_DB, &SCENARIO_BLOCKS).map_err(e)?;
        labels = designs.iter().map(|d| d.label.clone()).collect();
        for (i, d) in designs.iter().enumerate() {
            sums[i] += psll_db(&d.samples, &cfg).map_err(e)?;
            segs[i] += psll_db(&d.samples[..SEGMENT_LEN], &cfg).map_err(e)?;
        }
    }
    let k = PSLL_SEEDS as f64;
    let full: Vec<f64> = sums.iter().map(|s| s / k).collect();
    let seg: Vec<f64> = segs.iter().map(|s| s / k).collect();
    let pass = within(full[0], PSLL_REF)
        && full[1..].iter().all(|&p| within(p, PSLL_DESIGN))
        && seg[1..].iter().all(|&p| within(p, PSLL_SEGMENT));
    let fmt = |v: &[f64]| labels.iter().zip(v).map(|(l, p)| format!("{l} {p:.1}")).collect::<Vec<_>>().join(", ");
    Ok((pass, format!("mean over {PSLL_SEEDS} seeds: full [{}] dB; {SEGMENT_LEN}-sample segment [{}] dB", fmt(&full), fmt(&seg))))
}

fn criterion_5() -> Outcome {
    let cfg = AcfConfig::default();
    let reference = psll_db(&reference_design(SCENARIO_LENGTH, 1).map_err(e)?.samples, &cfg).map_err(e)?;
    let mut pass = true;
    let mut detail = vec![format!("reference {reference:.1}")];
    for depth in [5.0, 10.0, 20.0, 30.0, 60.0] {
        let d = qcqp_design(SCENARIO_LENGTH, 1, TRADEOFF_BLOCK, TRADEOFF_BLOCK / 2, &scenario_bands(depth).map_err(e)?).map_err(e)?;
        let p = psll_db(&d.samples, &cfg).map_err(e)?;
        pass &= if depth <= 20.0 { (p - reference).abs() <= TRADEOFF_SAME_DB } else { p - reference >= TRADEOFF_DEGRADED_DB };
        detail.push(format!("{depth} dB {p:.1}"));
    }
    Ok((pass, format!("PSLL [{}] dB; needs ≤20 dB depths within {TRADEOFF_SAME_DB} dB of reference", detail.join(", "))))
}

fn criterion_6() -> Outcome {
    let c = quantizer_input(&ReproOptions::default()).map_err(e)?;
    let mut pass = true;
    let mut detail = Vec::new();
    for (b, want) in QUANTIZER_BITS.iter().zip(TABLE2_THEORY) {
        let r = quantization_report(&c, *b, 1).map_err(e)?;
        let theory = format!("{:.4e}", r.theory_variance);
        let worst = [r.est_variance_re, r.est_variance_im].iter().map(|v| (v - r.theory_variance).abs() / r.theory_variance).fold(0.0, f64::max);
        pass &= theory == want && worst <= VARIANCE_REL;
        detail.push(format!("b={b} theory {theory} est err {:.2}%", 100.0 * worst));
    }
    Ok((pass, detail.join(", ")))
}

fn criterion_7() -> Outcome {
    let c = quantizer_input(&ReproOptions::default()).map_err(e)?;
    let mut pass = true;
    let mut detail = Vec::new();
    for b in QUANTIZER_BITS {
        let r = quantization_report(&c, b, 1).map_err(e)?;
        let law = 2.0 * c.len() as f64 * r.theory_variance;
        let rel = (r.energy_diff - law).abs() / law;
        pass &= rel <= ENERGY_REL;
        detail.push(format!("b={b} {:.4e} vs {law:.4e}", r.energy_diff));
    }
    Ok((pass, detail.join(", ")))
}

fn criterion_8() -> Outcome {
    let bands = scenario_bands(SCENARIO_DEPTH_DB).map_err(e)?;
    let d = projection_design(SCENARIO_LENGTH, 1, &bands).map_err(e)?;
    let rows = notch_degradation(&d.samples, &bands, &QUANTIZER_BITS, &WelchConfig::default(), &NotchConfig::default()).map_err(e)?;
    let depths: Vec<f64> = rows.iter().map(|r| r.mean_depth_db()).collect();
    let increasing = depths.windows(2).all(|w| w[1] > w[0]);
    let pass = within(depths[0], QUANT_DEPTH_8) && within(depths[depths.len() - 1], QUANT_DEPTH_16) && increasing;
    let list: Vec<String> = QUANTIZER_BITS.iter().zip(&depths).map(|(b, d)| format!("b={b} {d:.1}")).collect();
    Ok((pass, format!("mean depth [{}] dB", list.join(", "))))
}

fn criterion_9() -> Outcome {
    let designs = fig11_designs(1).map_err(e)?;
    let bands = notchwave_cli::repro::bands_from_hz(&FIG11_BANDS_HZ, SAMPLE_RATE).map_err(e)?;
    let min0 = |s: &[Complex64]| -> Result<f64, String> {
        let r = notch_depth(&welch_psd(s, &short_welch()).map_err(e)?, &bands, &NotchConfig::default()).map_err(e)?;
        Ok(r.bands[0].depth_min_db)
    };
    let (l1, l10) = (min0(&designs[0].samples)?, min0(&designs[1].samples)?);
    Ok((l1 - l10 >= MULTIBLOCK_GAP_DB, format!("80 dB band min depth L=1 {l1:.1} dB, L=10 {l10:.1} dB")))
}

fn criterion_10() -> Outcome {
    let mut pass = true;
    let mut detail = Vec::new();
    for (d, bands, targets) in case_designs(1).map_err(e)? {
        let check = check_constraints(&d.samples, &bands, &FrequencyGrid::new(d.samples.len()).map_err(e)?).map_err(e)?;
        let slack = d.windows.iter().flat_map(|w| w.slacks()).chain(check.bands.iter().map(|b| b.slack)).fold(f64::INFINITY, f64::min);
        let r = notch_depth(&welch_psd(&d.samples, &short_welch()).map_err(e)?, &bands, &NotchConfig::default()).map_err(e)?;
        pass &= slack >= -SLACK_TOL;
        let mut cells = Vec::new();
        for (b, &t) in r.bands.iter().zip(&targets) {
            pass &= if t <= 60.0 { (b.depth_mean_db - t).abs() <= CASE_DEPTH_DB } else { b.depth_mean_db >= CASE_80_MIN_DB };
            cells.push(format!("{t}→{:.1}", b.depth_mean_db));
        }
        detail.push(format!("{} [{}] slack {slack:.1e}", d.label, cells.join(" ")));
    }
    Ok((pass, detail.join("; ")))
}

fn criterion_11() -> Outcome {
    let start = Instant::now();
    let report = run_scenario(&ScenarioConfig::default()).map_err(e)?;
    let secs = start.elapsed().as_secs_f64();
    let rate = |l: &str| report.row(l).map(|r| r.error_rate_pct).ok_or(format!("missing row {l}"));
    let sinr = |l: &str, m: usize| report.sinr(l, m).ok_or(format!("missing {l} M={m}"));
    let designs = ["proj", "qcqp-5000", "qcqp-1000"];

    let mut pass = rate("none")? == 0.0 && (ERROR_RATE_BARRAGE.0..=ERROR_RATE_BARRAGE.1).contains(&rate("reference")?);
    for d in designs {
        pass &= rate(d)? == 0.0;
    }
    let delta = sinr("reference", 1)? - sinr("none", 1)?;
    pass &= (BARRAGE_DELTA.0..=BARRAGE_DELTA.1).contains(&delta);
    let mut gains = Vec::new();
    for row in &report.rows {
        let g = sinr(&row.label, 20)? - sinr(&row.label, 1)?;
        pass &= within(g, INTEGRATION_GAIN);
        gains.push(format!("{} {g:.2}", row.label));
    }
    let mut worst = 0.0f64;
    for &m in &report.pulses {
        for d in designs {
            worst = worst.max((sinr(d, m)? - sinr("reference", m)?).abs());
        }
    }
    pass &= worst <= DESIGN_VS_BARRAGE_DB && secs <= SCENARIO_MAX_S;
    let rates: Vec<String> = report.rows.iter().map(|r| format!("{} {:.2}%", r.label, r.error_rate_pct)).collect();
    Ok((
        pass,
        format!(
            "error rates [{}]; barrage-none at M=1 {delta:.2} dB; M=20 gain [{}] dB; designs vs barrage max |Δ| {worst:.2} dB; {secs:.0} s",
            rates.join(", "),
            gains.join(", ")
        ),
    ))
}

/// Random window: length 8–32, up to three bands with caps 0–40 dB below their current
/// energy and a ball radius between 0.3 and 1.5 times the reference energy.
fn random_instance(seed: u64) -> (Vec<Complex64>, f64, Vec<(BandOperator, f64)>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(8..=32);
    let grid = FrequencyGrid::new(n).unwrap();
    let k = rng.random_range(0..=3);
    let mut edges: Vec<usize> = (0..2 * k).map(|_| rng.random_range(0..n)).collect();
    edges.sort_unstable();
    edges.dedup();
    let window = generate_reference(n, seed).unwrap().scaled(rng.random_range(0.5..2.0)).unwrap();
    let mut bands = Vec::new();
    for pair in edges.chunks_exact(2) {
        let band = StopBand::new(pair[0] as f64 / n as f64, (pair[1] as f64 + 0.5) / n as f64, 0.0).unwrap();
        let op = BandOperator::new(band, &grid).unwrap();
        let cap = op.band_energy(&window).unwrap() * 10f64.powf(-rng.random_range(0.0..40.0) / 10.0);
        bands.push((op, cap));
    }
    let radius2 = window.energy() * rng.random_range(0.3..1.5);
    (window.to_vec(), radius2, bands)
}

fn criterion_12() -> Outcome {
    let cfg = SolverConfig { optimality_tol: 1e-13, max_iters: 200_000, ..SolverConfig::default() };
    let mut worst = 0.0f64;
    let mut failures = 0;
    for seed in 0..ORACLE_INSTANCES {
        let (y, radius2, bands) = random_instance(seed);
        let sol = solve_block(&y, &bands, radius2, None, &cfg).map_err(e)?;
        let feasible = sol.converged
            && sol.band_energies.iter().zip(&bands).all(|(g, (_, cap))| *g <= cap * (1.0 + SLACK_TOL) + 1e-20)
            && sol.window_energy <= radius2 * (1.0 + SLACK_TOL);
        let o = oracle::window_problem(&y, &[], radius2, &bands).solve(1e-10, 500);
        let rel = (sol.objective - o.objective).abs() / o.objective.max(1e-300);
        let rel = if (sol.objective - o.objective).abs() < 1e-14 { 0.0 } else { rel };
        worst = worst.max(rel);
        if !feasible || rel > ORACLE_REL {
            failures += 1;
        }
    }
    Ok((failures == 0, format!("{ORACLE_INSTANCES} instances, worst relative objective gap {worst:.1e}, {failures} failures")))
}

fn main() {
    let criteria: [(u32, &str, fn() -> Outcome); 12] = [
        (1, "projection notch depth", criterion_1),
        (2, "constrained notch depth", criterion_2),
        (3, "single-block zero-cap equivalence", criterion_3),
        (4, "PSLL table", criterion_4),
        (5, "PSLL against notch depth", criterion_5),
        (6, "quantization variance", criterion_6),
        (7, "quantization energy law", criterion_7),
        (8, "quantized notch depth", criterion_8),
        (9, "multi-block degradation", criterion_9),
        (10, "multi-emitter feasibility", criterion_10),
        (11, "coexistence table shape", criterion_11),
        (12, "small-instance solver oracle", criterion_12),
    ];
    let only: Option<u32> = std::env::var("NOTCHWAVE_ACCEPTANCE_ONLY").ok().and_then(|v| v.parse().ok());
    let mut failed = Vec::new();
    for (k, name, f) in criteria {
        if only.is_some_and(|o| o != k) {
            continue;
        }
        let start = Instant::now();
        let (pass, detail) = match f() {
            Ok(r) => r,
            Err(msg) => (false, format!("error: {msg}")),
        };
        let tag = if pass { "PASS" } else { "FAIL" };
        println!("[{tag}] criterion {k} ({name}): {detail} [{:.1} s]", start.elapsed().as_secs_f64());
        if !pass {
            failed.push(k);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria passed");
    } else {
        println!("acceptance: failed criteria {failed:?}");
        if std::env::var("NOTCHWAVE_ACCEPTANCE_STRICT").is_ok_and(|v| v == "1") {
            std::process::exit(1);
        }
    }
}
