//! Acceptance suite: one test per headline result, printing a PASS/FAIL
//! line each. Run with `cargo test -p uca-mimo --test acceptance --
//! --nocapture`.
//!
//! Checks 2 and 5 measure the published claims over the *exact* channel and
//! are expected to fail there: the geometry-only beamformer detects with
//! the circulant-model gains, and at the reference link the model error
//! (delta^2 = 0.023 at N = 4) is large enough to separate the schemes by
//! far more than Monte Carlo noise. The supplementary checks run the same
//! pipelines over the circulant model channel, where the claims do hold.
//! See the README for the discrepancy discussion.

use std::time::Instant;

use num_bigint::BigUint;
use num_complex::Complex64;

use uca_mimo::channel::{
    approximation_variance, circulant_channel, circulant_residual, compensation_pair,
    exact_channel, model_channel,
};
use uca_mimo::geometry::LinkConfig;
use uca_mimo::linalg::{cis, ComplexMatrix};
use uca_mimo::modem::{fast_ml_detect, map_bits, modulate, receive_transform, Constellation};
use uca_mimo::simulate::{
    complexity_counts, rounded_ratio, run_ber_sweep, run_ber_sweep_serial, spacing_search,
    ChannelModel, Scheme, SweepConfig,
};

const TAU: f64 = std::f64::consts::TAU;

fn sweep(n: usize, scheme: Scheme, model: ChannelModel, trials: u64, seed: u64) -> SweepConfig {
    let mut cfg = SweepConfig::new(LinkConfig::reference_link(n), scheme, Constellation::bpsk());
    cfg.snr_db_points = (0..=9).map(f64::from).collect();
    cfg.trials_per_point = trials;
    cfg.seed = seed;
    cfg.normalize_channel = true;
    cfg.channel_model = model;
    cfg
}

/// Two-scheme comparison: per point, |ber_a - ber_b| against three combined
/// binomial standard deviations. Returns (worst_excess_ratio, table).
fn equivalence_gap(
    a: &[uca_mimo::simulate::BerPoint],
    b: &[uca_mimo::simulate::BerPoint],
    bits_per_trial: f64,
) -> (f64, String) {
    let mut worst = 0.0f64;
    let mut table = String::from("  snr_db   ber_a        ber_b        |diff|      3*sigma\n");
    for (pa, pb) in a.iter().zip(b) {
        let n_bits = pa.trials as f64 * bits_per_trial;
        let var = pa.ber * (1.0 - pa.ber) / n_bits + pb.ber * (1.0 - pb.ber) / n_bits;
        let three_sigma = 3.0 * var.sqrt();
        let diff = (pa.ber - pb.ber).abs();
        let ratio = if three_sigma > 0.0 {
            diff / three_sigma
        } else if diff > 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        worst = worst.max(ratio);
        table.push_str(&format!(
            "  {:6.1}   {:.6e} {:.6e} {:.4e} {:.4e}\n",
            pa.snr_db, pa.ber, pb.ber, diff, three_sigma
        ));
    }
    (worst, table)
}

#[test]
fn criterion_1_complexity_ratios() {
    let start = Instant::now();
    let fast = complexity_counts(8, 4, Scheme::Proposed).unwrap();
    let trad = complexity_counts(8, 4, Scheme::Traditional).unwrap();
    let add_ratio = rounded_ratio(&trad.complex_additions, &fast.complex_additions);
    let mul_ratio = rounded_ratio(&trad.complex_multiplications, &fast.complex_multiplications);
    let ok = fast.complex_additions == BigUint::from(56u32)
        && fast.complex_multiplications == BigUint::from(52u32)
        && trad.complex_additions == BigUint::from(4_194_304u32)
        && trad.complex_multiplications == BigUint::from(4_718_592u32)
        && add_ratio == BigUint::from(74_898u32)
        && mul_ratio == BigUint::from(90_742u32)
        && start.elapsed().as_secs_f64() < 1.0;
    println!(
        "ACCEPTANCE 1 complexity-ratios: {} (additions {add_ratio}x, multiplications {mul_ratio}x, {:.3}s)",
        if ok { "PASS" } else { "FAIL" },
        start.elapsed().as_secs_f64()
    );
    assert!(ok, "complexity ratios do not match the published counts");
}

#[test]
fn criterion_2_ber_equivalence_exact_channel() {
    let trials = 100_000;
    let proposed =
        run_ber_sweep(&sweep(4, Scheme::Proposed, ChannelModel::Exact, trials, 11)).unwrap();
    let traditional = run_ber_sweep(&sweep(
        4,
        Scheme::Traditional,
        ChannelModel::Exact,
        trials,
        12,
    ))
    .unwrap();
    let (worst, table) = equivalence_gap(&proposed, &traditional, 4.0);
    let ok = worst <= 1.0;
    println!(
        "ACCEPTANCE 2 ber-equivalence (exact channel, N=4 BPSK, {trials} trials/pt): {} \
         (worst |diff| = {worst:.1}x the 3-sigma band)\n{table}",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(
        ok,
        "proposed vs traditional BER differs beyond 3 sigma on the exact channel; \
         the circulant-model mismatch (delta^2 = 0.023) is not statistically negligible. \
         The same comparison over the model channel passes (see the supplementary check)."
    );
}

#[test]
fn criterion_3_channel_approximation_anchors() {
    let mut results = Vec::new();
    for (n, anchor) in [(4usize, 0.02305f64), (6, 0.01403)] {
        let cfg = LinkConfig::reference_link(n);
        let v = approximation_variance(
            &exact_channel(&cfg).unwrap(),
            &compensation_pair(&cfg).unwrap(),
            &circulant_channel(&cfg).unwrap(),
        )
        .unwrap();
        results.push((n, v, anchor, (v - anchor).abs()));
    }
    let ok = results.iter().all(|&(_, _, _, err)| err <= 1e-4);
    println!(
        "ACCEPTANCE 3 approximation-variance-anchors: {}",
        if ok { "PASS" } else { "FAIL" }
    );
    for (n, v, anchor, err) in &results {
        println!("  N={n}: delta^2 = {v:.7} vs anchor {anchor} (|err| = {err:.2e})");
    }
    assert!(ok, "delta^2 anchors not reproduced within 1e-4");
}

#[test]
fn criterion_4_antenna_spacing_curve() {
    // Documented aligned-link distance: 0.21 m at lambda = 0.01 m. The
    // evaluation distance of 4 m makes the raw spread threshold vacuous
    // (every antenna count passes), so the spacing preset pins this value;
    // it reproduces the published curve and stays a config knob.
    let lambda = 0.01;
    let base = LinkConfig::coaxial(2, 0.02, 0.21, lambda);
    let radii: Vec<f64> = (0..9).map(|i| (2.0 + 0.5 * i as f64) * lambda).collect();
    let points = spacing_search(&radii, 0.01, &base, 64).unwrap();
    let mut ok = true;
    let mut table = String::from("  R/lambda  best_n  spacing/lambda  sigma^2\n");
    for pair in points.windows(2) {
        ok &= pair[0].best_n <= pair[1].best_n;
    }
    for p in &points {
        let ratio = p.spacing / lambda;
        ok &= (1.5..=1.9).contains(&ratio) && p.satisfied;
        table.push_str(&format!(
            "  {:8.2}  {:6}  {:14.3}  {:.3e}\n",
            p.radius / lambda,
            p.best_n,
            ratio,
            p.sigma_sq
        ));
    }
    println!(
        "ACCEPTANCE 4 antenna-spacing (d = 0.21 m documented): {}\n{table}",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(
        ok,
        "spacing curve left the 1.5..1.9 lambda band or lost monotonicity"
    );
}

#[test]
fn criterion_5_theory_vs_simulation_exact_channel() {
    let mut ok = true;
    let mut report = String::new();
    for (n, trials) in [(4usize, 250_000u64), (6, 170_000)] {
        let cfg = sweep(n, Scheme::Proposed, ChannelModel::Exact, trials, 21);
        let points = run_ber_sweep(&cfg).unwrap();
        report.push_str(&format!("  N={n} ({} bits/pt):\n", trials * n as u64));
        for p in &points {
            let theory = p.theory_ber.unwrap();
            if p.ber >= 1e-3 {
                let gap = (p.ber - theory).abs() / theory;
                ok &= gap < 0.10;
                report.push_str(&format!(
                    "    snr {:4.1}: sim {:.4e} theory {:.4e} gap {:5.1}%\n",
                    p.snr_db,
                    p.ber,
                    theory,
                    100.0 * gap
                ));
            }
        }
    }
    println!(
        "ACCEPTANCE 5 theory-vs-simulation (exact channel): {}\n{report}",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(
        ok,
        "closed-form BER tracks the model-channel system, not the exact channel; \
         the gap exceeds 10% at mid SNR (see the supplementary check for the \
         model-channel agreement)."
    );
}

#[test]
fn criterion_6_property_suite() {
    let start = Instant::now();

    // Diagonalization: conj-transpose-DFT * matrix * DFT diagonal within
    // 1e-10 of the eigenvalues, off-diagonals below 1e-10.
    for n in [4usize, 6] {
        let circ = circulant_channel(&LinkConfig::reference_link(n)).unwrap();
        let root = 1.0 / (n as f64).sqrt();
        let v = ComplexMatrix::from_fn(n, n, |r, c| root * cis(-TAU * (r * c) as f64 / n as f64));
        let vh = ComplexMatrix::from_fn(n, n, |r, c| v.get(c, r).conj());
        let d = vh.mul(circ.matrix()).mul(&v);
        let scale = circ
            .eigenvalues()
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    assert!((d.get(i, i) - circ.eigenvalues()[i]).norm() <= 1e-10 * scale);
                } else {
                    assert!(d.get(i, j).norm() <= 1e-10 * scale);
                }
            }
        }
        // Parseval within 1e-10 relative.
        let lhs: f64 = circ.eigenvalues().iter().map(|z| z.norm_sqr()).sum();
        let rhs: f64 = n as f64 * circ.first_row().iter().map(|z| z.norm_sqr()).sum::<f64>();
        assert!((lhs - rhs).abs() <= 1e-10 * rhs);
    }
    println!("  property: DFT diagonalization + Parseval ... ok");

    // Norm preservation of both transforms within 1e-12.
    let cfg = LinkConfig::reference_link(4);
    let pair = compensation_pair(&cfg).unwrap();
    let mut rng = uca_mimo::simulate::trial_rng(5, 0, 0);
    let noise = uca_mimo::simulate::NoiseModel::new(1.0).unwrap();
    for _ in 0..50 {
        let s = uca_mimo::simulate::awgn(4, &noise, &mut rng);
        let x = modulate(&s, pair.gamma()).unwrap();
        let norm = |v: &[Complex64]| v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        assert!((norm(&s) - norm(&x)).abs() < 1e-12);
        let y = uca_mimo::simulate::awgn(4, &noise, &mut rng);
        let y_t = receive_transform(&y, pair.delta()).unwrap();
        assert!((norm(&y) - norm(&y_t)).abs() < 1e-12);
    }
    println!("  property: modulate/receive_transform unitarity ... ok");

    // Coaxial exact channel is exactly circulant.
    let mut coax = LinkConfig::reference_link(4);
    coax.phi = 0.0;
    let h = exact_channel(&coax).unwrap();
    assert!(circulant_residual(h.entries()).unwrap() < 1e-12);
    println!("  property: coaxial exact channel circulant ... ok");

    // Fast symbol-wise ML equals the joint brute-force argmin on noisy
    // samples (N = 4, K = 2, 1000 instances).
    let c = Constellation::bpsk();
    for trial in 0..1000u64 {
        let mut rng = uca_mimo::simulate::trial_rng(6, 0, trial);
        let gains = uca_mimo::simulate::awgn(4, &noise, &mut rng);
        let y_t = uca_mimo::simulate::awgn(4, &noise, &mut rng);
        let fast = fast_ml_detect(&y_t, &gains, &c).unwrap();
        let mut best = Vec::new();
        let mut best_d = f64::INFINITY;
        for h in 0u8..16 {
            let bits: Vec<u8> = (0..4).rev().map(|i| (h >> i) & 1).collect();
            let s = map_bits(&bits, &c, 4).unwrap();
            let d: f64 = (0..4).map(|l| (y_t[l] - gains[l] * s[l]).norm_sqr()).sum();
            if d < best_d {
                best_d = d;
                best = s;
            }
        }
        assert_eq!(fast, best);
    }
    println!("  property: fast ML = joint brute force (1000 noisy) ... ok");

    // Noiseless end-to-end recovery, exhaustive at N <= 4, K <= 4, over the
    // model channel.
    for n in [2usize, 3, 4] {
        for cst in [Constellation::bpsk(), Constellation::qpsk()] {
            let mut link = LinkConfig::reference_link(n);
            link.alpha_rx = 0.9; // exercise unequal offsets too
            let circ = circulant_channel(&link).unwrap();
            let pair = compensation_pair(&link).unwrap();
            let model = model_channel(&pair, &circ).unwrap();
            let gains = circ.subchannel_gains();
            let k = cst.size();
            for h in 0..k.pow(n as u32) {
                let mut idx = vec![0usize; n];
                let mut rem = h;
                for slot in idx.iter_mut().rev() {
                    *slot = rem % k;
                    rem /= k;
                }
                let s: Vec<Complex64> = idx.iter().map(|&j| cst.points()[j]).collect();
                let x = modulate(&s, pair.gamma()).unwrap();
                let y = model.mul_vec(&x);
                let y_t = receive_transform(&y, pair.delta()).unwrap();
                assert_eq!(fast_ml_detect(&y_t, &gains, &cst).unwrap(), s);
            }
        }
    }
    println!("  property: noiseless end-to-end recovery (N<=4, K<=4) ... ok");

    // Sweep reproducibility: serial == parallel pools of several sizes.
    let mut small = sweep(4, Scheme::Proposed, ChannelModel::Exact, 3_000, 33);
    small.snr_db_points = vec![3.0, 7.0];
    let serial = run_ber_sweep_serial(&small).unwrap();
    for workers in [1usize, 3] {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .unwrap();
        let parallel = pool.install(|| uca_mimo::simulate::run_ber_sweep_parallel(&small).unwrap());
        assert_eq!(serial, parallel);
    }
    println!("  property: sweep bit-identical across worker counts ... ok");

    let elapsed = start.elapsed().as_secs_f64();
    let ok = elapsed < 60.0;
    println!(
        "ACCEPTANCE 6 property-suite: {} ({elapsed:.1}s)",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "property suite exceeded 60 s");
}

#[test]
fn supplementary_model_channel_behavior() {
    // Over the circulant model channel the published equivalence and the
    // closed-form BER both hold; this isolates the exact-channel failures
    // of checks 2 and 5 to the model mismatch rather than the pipelines.
    let trials = 1_000_000;
    let proposed = run_ber_sweep(&sweep(
        4,
        Scheme::Proposed,
        ChannelModel::Circulant,
        trials,
        41,
    ))
    .unwrap();
    let traditional = run_ber_sweep(&sweep(
        4,
        Scheme::Traditional,
        ChannelModel::Circulant,
        trials,
        42,
    ))
    .unwrap();
    let (worst, table) = equivalence_gap(&proposed, &traditional, 4.0);
    let eq_ok = worst <= 1.0;
    println!(
        "SUPPLEMENTARY ber-equivalence (model channel, N=4 BPSK, {trials} trials/pt): {} \
         (worst |diff| = {worst:.2}x the 3-sigma band)\n{table}",
        if eq_ok { "PASS" } else { "FAIL" }
    );

    let mut theory_ok = true;
    let mut report = String::new();
    for (n, trials) in [(4usize, 1_000_000u64), (6, 700_000)] {
        let cfg = sweep(n, Scheme::Proposed, ChannelModel::Circulant, trials, 43);
        for p in run_ber_sweep(&cfg).unwrap() {
            let theory = p.theory_ber.unwrap();
            if p.ber >= 1e-3 {
                let gap = (p.ber - theory).abs() / theory;
                theory_ok &= gap < 0.10;
                report.push_str(&format!(
                    "  N={n} snr {:4.1}: sim {:.4e} theory {:.4e} gap {:4.1}%\n",
                    p.snr_db,
                    p.ber,
                    theory,
                    100.0 * gap
                ));
            }
        }
    }
    println!(
        "SUPPLEMENTARY theory-vs-simulation (model channel): {}\n{report}",
        if theory_ok { "PASS" } else { "FAIL" }
    );
    assert!(eq_ok, "model-channel equivalence failed");
    assert!(theory_ok, "model-channel theory match failed");
}
