//! Acceptance suite: one test per criterion, each printing a pass/fail line
//! with the measured quantities. Budgets and tolerances are pinned in the
//! test bodies. Shared heavyweight inputs (the quadrature constants and the
//! tail/overlap curves) are computed once per process and reused.

mod common;

use common::{random_direction, sampler_uniformity_chi2};
use oblate::constants::{i_a_mc5d, i_a_reduced3d, LimitLaw, QuadratureSpec};
use oblate::diameter::{count_near_diametral, diameter_bruteforce, diameter_pruned};
use oblate::experiments::{
    chen_stein_diagnostic, run_exponent_experiment, run_limit_experiment,
    run_overlap_experiment, run_poisson_experiment, run_tail_experiment, tables, ExponentMode,
    TailCurve,
};
use oblate::geometry::{
    contains, deficit, embed, expansion_ratio, extract, local_g, pair_upper_bound,
    EquatorialCoords,
};
use oblate::sampling::{
    derive_master, sample_ball_scaling, sample_parameter, sample_rejection, RngStream,
};
use oblate::stats::{ks_two_sample, CHI2_63_P999};
use oblate::ShapeParam;
use rand::Rng;
use std::f64::consts::TAU;
use std::sync::OnceLock;

/// Master seed of the acceptance run (all experiment seeds derive from it).
const MASTER_SEED: u64 = 20260810;

fn shape(a: f64) -> ShapeParam {
    ShapeParam::new(a).unwrap()
}

fn stream_for(purpose: &str) -> RngStream {
    RngStream::new(derive_master(MASTER_SEED, purpose), 0)
}

/// Quadrature constants for a in {0.2, 0.5, 0.8} at the criterion-4 grid.
fn quad_constants() -> &'static [(f64, oblate::ConstantEstimate); 3] {
    static CELL: OnceLock<[(f64, oblate::ConstantEstimate); 3]> = OnceLock::new();
    CELL.get_or_init(|| {
        [0.2, 0.5, 0.8].map(|a| {
            let est = i_a_reduced3d(shape(a), QuadratureSpec { cells: 800 }).unwrap();
            (a, est)
        })
    })
}

fn law_half() -> LimitLaw {
    let (_, est) = &quad_constants()[1];
    LimitLaw::from_integral(est.value, shape(0.5)).unwrap()
}

/// Criterion-5 tail curve: a = 0.5, eps in {0.02, 0.05, 0.1, 0.2}, 1e8 pairs.
fn tail_curve() -> &'static TailCurve {
    static CELL: OnceLock<TailCurve> = OnceLock::new();
    CELL.get_or_init(|| {
        run_tail_experiment(
            shape(0.5),
            &[0.02, 0.05, 0.1, 0.2],
            100_000_000,
            stream_for("tail"),
        )
        .unwrap()
    })
}

/// Criterion-6 overlap curve: a = 0.5, grid extended down to 0.05 so the
/// Chen-Stein diagnostic can interpolate a full decade of n; the
/// criterion-6 slope is fitted on the [0.1, 0.3] window as specified.
fn overlap_curve() -> &'static TailCurve {
    static CELL: OnceLock<TailCurve> = OnceLock::new();
    CELL.get_or_init(|| {
        run_overlap_experiment(
            shape(0.5),
            &[0.05, 0.07, 0.1, 0.15, 0.2, 0.3],
            100_000,
            10_000,
            stream_for("overlap"),
        )
        .unwrap()
    })
}

#[test]
fn criterion_01_geometry_oracle_suite() {
    let mut rng = stream_for("geometry").rng();

    // round trip + containment, 1e5 random valid coordinates
    let s = shape(0.5);
    for _ in 0..100_000 {
        let theta = TAU * rng.random::<f64>();
        let delta = rng.random::<f64>() * 0.999_999;
        let w = (2.0 * rng.random::<f64>() - 1.0) * delta.sqrt();
        let c = EquatorialCoords::new(theta, delta, w).unwrap();
        let p = embed(&c, s);
        assert!(contains(&p, s), "embed output must lie in E");
        let back = extract(&p, s).unwrap();
        assert!(
            (back.theta() - c.theta()).abs() < 1e-10
                && (back.delta() - c.delta()).abs() < 1e-10
                && (back.w() - c.w()).abs() < 1e-10,
            "round trip failed at theta={theta} delta={delta} w={w}"
        );
    }

    // upper-bound soundness, 1e6 random pairs per shape
    for a in [0.2, 0.5, 0.8] {
        let sa = shape(a);
        let batch = sample_parameter(stream_for("geometry-pairs").nth(a.to_bits()), 2_000_000, sa)
            .unwrap();
        for pair in batch.points.chunks_exact(2) {
            let bound = pair_upper_bound(pair[0].radial_defect(), pair[1].radial_defect(), sa);
            assert!(
                pair[0].dist(&pair[1]) <= bound + 1e-12,
                "bound violated at a={a}"
            );
        }
    }

    // expansion-ratio convergence: 100 directions x 8 angles; |ratio - 1|
    // < 1e-3 at eps = 1e-6 and nonincreasing along eps = 10^-k, k = 2..8,
    // up to the floating-point noise floor of the deficit (a few ulps of 2,
    // divided by eps * |G|)
    let mut checked = 0;
    let mut worst_at_1e6: f64 = 0.0;
    while checked < 100 {
        let dir = random_direction(&mut rng);
        let g = local_g(&dir, s);
        if g.abs() < 0.1 {
            continue;
        }
        checked += 1;
        for _ in 0..8 {
            let theta = TAU * rng.random::<f64>();
            let mut prev_err = f64::INFINITY;
            for k in 2..=8 {
                let eps = 10f64.powi(-k);
                let err = (expansion_ratio(&dir, theta, eps, s).unwrap() - 1.0).abs();
                let noise = 2e-15 / (eps * g.abs());
                assert!(
                    err <= prev_err + noise,
                    "|ratio-1| grew from {prev_err} to {err} at eps={eps}, dir={dir:?}"
                );
                if k == 6 {
                    worst_at_1e6 = worst_at_1e6.max(err);
                    assert!(err < 1e-3, "at eps=1e-6: err={err}, dir={dir:?}");
                }
                prev_err = err.max(noise);
            }
        }
    }
    println!(
        "criterion 1 (geometry oracle suite): PASS — round-trip/containment 1e5, \
         bound soundness 3x1e6 pairs, expansion max |ratio-1| at 1e-6 = {worst_at_1e6:.2e}"
    );
}

#[test]
fn criterion_02_sampler_correctness() {
    let s = shape(0.5);
    let n = 1_000_000;

    // acceptance rate pi/6 +- 0.002 at ~1e6 proposals
    let accept_n = (1e6 * std::f64::consts::PI / 6.0).round() as usize;
    let rej = sample_rejection(stream_for("rejection"), accept_n, s).unwrap();
    let rate = rej.acceptance_rate();
    assert!(
        (rate - std::f64::consts::PI / 6.0).abs() < 0.002,
        "acceptance rate {rate} (proposals {})",
        rej.proposals
    );

    let par = sample_parameter(stream_for("parameter"), n, s).unwrap();
    let ball = sample_ball_scaling(stream_for("ball"), n, s).unwrap();
    let rej = sample_rejection(stream_for("rejection-big"), n, s).unwrap();

    // membership + second moments per sampler
    for (name, batch) in [("parameter", &par), ("ball-scaling", &ball), ("rejection", &rej)] {
        assert!(
            batch.points.iter().all(|p| contains(p, s)),
            "{name}: membership"
        );
        let m1: f64 = batch.points.iter().map(|p| p.x1 * p.x1).sum::<f64>() / n as f64;
        let m3: f64 = batch.points.iter().map(|p| p.x3 * p.x3).sum::<f64>() / n as f64;
        assert!((m1 - 0.2).abs() < 0.002, "{name}: E[x1^2] = {m1}");
        assert!((m3 - 0.05).abs() < 0.002, "{name}: E[x3^2] = {m3}");
        let chi2 = sampler_uniformity_chi2(batch);
        assert!(
            chi2 < CHI2_63_P999,
            "{name}: chi2 = {chi2} >= {CHI2_63_P999}"
        );
    }

    // pairwise coordinate-wise KS < 0.002
    let coord = |b: &oblate::SampleBatch, k: usize| -> Vec<f64> {
        let mut v: Vec<f64> = b
            .points
            .iter()
            .map(|p| match k {
                0 => p.x1,
                1 => p.x2,
                _ => p.x3,
            })
            .collect();
        v.sort_unstable_by(f64::total_cmp);
        v
    };
    let mut worst: f64 = 0.0;
    for (na, ba, nb, bb) in [
        ("parameter", &par, "ball", &ball),
        ("parameter", &par, "rejection", &rej),
        ("ball", &ball, "rejection", &rej),
    ] {
        for k in 0..3 {
            let d = ks_two_sample(&coord(ba, k), &coord(bb, k));
            worst = worst.max(d);
            assert!(d < 0.002, "KS({na}, {nb}) coord {k} = {d}");
        }
    }
    println!(
        "criterion 2 (sampler correctness): PASS — rate {rate:.4}, worst pairwise KS {worst:.5}"
    );
}

#[test]
fn criterion_03_diameter_exactness() {
    let t_grid: Vec<f64> = (0..10).map(|k| 0.5 * k as f64).collect();
    let mut total_pruned_examined = 0u64;
    let mut total_brute = 0u64;
    for inst in 0..200u64 {
        let n = [10, 100, 1000][(inst % 3) as usize];
        let a = [0.2, 0.5, 0.8][((inst / 3) % 3) as usize];
        let s = shape(a);
        let batch = sample_parameter(stream_for("diameter").nth(inst), n, s).unwrap();
        let bf = diameter_bruteforce(&batch.points).unwrap();
        let pr = diameter_pruned(&batch.points, s).unwrap();
        assert_eq!(bf.m_n, pr.m_n, "instance {inst}: value mismatch");
        assert_eq!(bf.pair, pr.pair, "instance {inst}: pair mismatch");
        total_pruned_examined += pr.pairs_examined;
        total_brute += bf.pairs_examined;

        // event identity at every t: {count = 0} = {2 - m_n > eps_t},
        // and counts equal the brute-force enumeration
        let mut deficits = Vec::with_capacity(n * (n - 1) / 2);
        for i in 0..n {
            for j in (i + 1)..n {
                deficits.push(deficit(&batch.points[i], &batch.points[j]));
            }
        }
        for &t in &t_grid {
            let c = count_near_diametral(&batch.points, t, s).unwrap();
            let brute_count = deficits.iter().filter(|d| **d <= c.eps).count() as u64;
            assert_eq!(c.count, brute_count, "instance {inst} t={t}");
            assert_eq!(
                c.count == 0,
                2.0 - pr.m_n > c.eps,
                "instance {inst} t={t}: event identity"
            );
        }
    }
    println!(
        "criterion 3 (diameter exactness): PASS — 200 instances, pruned/brute distance \
         evaluations {total_pruned_examined}/{total_brute}"
    );
}

#[test]
fn criterion_04_constant_cross_validation() {
    let mut lines = Vec::new();
    for (i, (a, quad)) in quad_constants().iter().enumerate() {
        let mc = i_a_mc5d(shape(*a), 100_000_000, stream_for("mc5d").nth(i as u64)).unwrap();
        let tol = 3.0 * (mc.std_error + quad.std_error);
        let gap = (mc.value - quad.value).abs();
        assert!(quad.converged, "a={a}: quadrature refinement not converging");
        assert_eq!(mc.shell_hits, 0, "a={a}: MC hit on the bounding-box shell");
        assert!(
            gap <= tol,
            "a={a}: |mc - quad| = {gap:.5} > 3*(sigma_mc + sigma_quad) = {tol:.5}"
        );
        lines.push(format!(
            "a={a}: I_a(quad 800^3) = {:.6} +- {:.1e}, I_a(mc 1e8) = {:.6} +- {:.1e}",
            quad.value, quad.std_error, mc.value, mc.std_error
        ));
    }
    // route agreement also holds at the intermediate shapes (reduced budget)
    for (i, a) in [0.35, 0.65].into_iter().enumerate() {
        let quad = i_a_reduced3d(shape(a), QuadratureSpec { cells: 400 }).unwrap();
        let mc = i_a_mc5d(shape(a), 10_000_000, stream_for("mc5d-mid").nth(i as u64)).unwrap();
        let tol = 3.0 * (mc.std_error + quad.std_error);
        assert!(
            (mc.value - quad.value).abs() <= tol,
            "a={a}: mid-shape agreement"
        );
    }
    println!(
        "criterion 4 (constant cross-validation): PASS\n  {}",
        lines.join("\n  ")
    );
}

#[test]
fn criterion_05_two_point_tail() {
    let curve = tail_curve();
    let fit = curve
        .fit_window(0.02, 0.2)
        .expect("tail fit must have enough retained points");
    assert!(
        (fit.slope - 3.5).abs() <= 0.15,
        "tail slope {} outside 3.5 +- 0.15",
        fit.slope
    );
    let k_a = law_half().k_a();
    let r0 = curve.level_ratio(3.5, 0).expect("smallest retained point");
    let r1 = curve.level_ratio(3.5, 1).expect("second smallest point");
    for (k, r) in [(0, r0), (1, r1)] {
        assert!(
            (r / k_a - 1.0).abs() <= 0.15,
            "level ratio #{k} = {r:.4} vs K_a = {k_a:.4}: off by {:.1}%",
            (r / k_a - 1.0).abs() * 100.0
        );
    }
    println!(
        "criterion 5 (two-point tail): PASS — slope {:.4} (+- {:.4}), level ratios {:.4}/{:.4} \
         vs K_a {:.4}",
        fit.slope,
        fit.slope_stderr,
        r0,
        r1,
        k_a
    );
}

#[test]
fn criterion_06_overlap() {
    let q = overlap_curve();
    let fit = q
        .fit_window(0.1, 0.3)
        .expect("overlap fit over [0.1, 0.3]");
    assert!(
        (5.0..=6.0).contains(&fit.slope),
        "overlap slope {} outside [5, 6]",
        fit.slope
    );
    // q(eps) <= p(eps) everywhere, against a tail run on the same grid
    let grid: Vec<f64> = q.points.iter().map(|p| p.eps).collect();
    let p = run_tail_experiment(shape(0.5), &grid, 20_000_000, stream_for("overlap-vs-tail"))
        .unwrap();
    for (qp, pp) in q.points.iter().zip(&p.points) {
        assert!(
            qp.estimate <= pp.estimate,
            "q({}) = {} > p = {}",
            qp.eps,
            qp.estimate,
            pp.estimate
        );
    }
    // q / p^2 diverges as eps decreases (positive dependence through the
    // shared point: q ~ eps^5.5 vs p^2 ~ eps^7)
    let ratios: Vec<f64> = q
        .points
        .iter()
        .zip(&p.points)
        .filter(|(qp, pp)| qp.retained && pp.retained)
        .map(|(qp, pp)| qp.estimate / (pp.estimate * pp.estimate))
        .collect();
    assert!(ratios.len() >= 3, "need at least 3 shared retained points");
    assert!(
        ratios.last().expect("nonempty") > &(2.0 * ratios.first().expect("nonempty")),
        "q/p^2 should grow as eps decreases: {ratios:?}"
    );
    println!(
        "criterion 6 (overlap): PASS — slope {:.3} in [5, 6]; q <= p on the grid; q/p^2 grows \
         {:.1}x; clipped counts {:?}",
        fit.slope,
        ratios.last().expect("nonempty") / ratios.first().expect("nonempty"),
        q.points.iter().map(|p| p.clipped).collect::<Vec<_>>()
    );
}

#[test]
fn criterion_07_poisson_approximation() {
    let law = law_half();
    let t_star = law.lambda_a.powf(-2.0 / 7.0);
    let summary = run_poisson_experiment(
        shape(0.5),
        100_000,
        &[0.0, 0.5 * t_star, t_star, 1.5 * t_star],
        2000,
        &law,
        stream_for("poisson"),
    )
    .unwrap();

    // t = 0: N_n(0) = 0 almost surely
    assert_eq!(summary.per_t[0].mean_count, 0.0, "t=0 must give zero counts");
    // chain check: zero fraction equals the empirical survival, exactly,
    // in every replication
    assert!(summary.event_identity_ok, "event identity violated");
    for pt in &summary.per_t {
        assert_eq!(
            pt.zero_fraction, pt.survival_fraction,
            "chain check at t={}",
            pt.t
        );
    }

    let at_star = &summary.per_t[2];
    let vm = at_star.var_count / at_star.mean_count;
    let zdev = (at_star.zero_fraction - (-1.0f64).exp()).abs();
    println!(
        "criterion 7 (poisson approximation) at lambda(t*)=1, n=1e5, 2000 reps: \
         mean {:.4} (need 1 +- 0.1), var/mean {:.4} (need [0.85, 1.15]), \
         zero fraction {:.4} vs e^-1 {:.4} (need +- 0.03)",
        at_star.mean_count,
        vm,
        at_star.zero_fraction,
        (-1.0f64).exp()
    );
    assert!(
        (at_star.mean_count - 1.0).abs() <= 0.1,
        "mean count {} outside 1 +- 0.1",
        at_star.mean_count
    );
    // The two assertions below measure the Poisson-approximation residual
    // itself, which decays only at the n^(-1/7) Chen-Stein rate (~0.19 at
    // n = 1e5); see the overdispersion analysis in the chen-stein
    // diagnostic. They are asserted at the stated tolerances regardless.
    assert!(
        (0.85..=1.15).contains(&vm),
        "variance/mean {vm:.4} outside [0.85, 1.15] (Chen-Stein residual at n=1e5; \
         the clustering excess var-mean ~ n^3 q(eps_n) = O(n^-1/7) is still ~0.45 here)"
    );
    assert!(
        zdev <= 0.03,
        "zero fraction {:.4} deviates from e^-1 by {zdev:.4} > 0.03 (same \
         O(n^-1/7) residual)",
        at_star.zero_fraction
    );
    println!("criterion 7 (poisson approximation): PASS");
}

#[test]
fn criterion_08_limit_law() {
    let law = law_half();
    let report = run_limit_experiment(shape(0.5), 200_000, 2000, &law, stream_for("limit"))
        .unwrap();
    assert!(
        report.rescaled_deficits.iter().all(|d| *d > 0.0),
        "all rescaled deficits must be positive"
    );
    assert!(
        report.ks_statistic <= 0.08,
        "KS = {} > 0.08",
        report.ks_statistic
    );
    // median close to the theoretical median in CDF distance
    let med_cdf_dev = (law.cdf(report.median_rescaled) - 0.5).abs();
    assert!(
        med_cdf_dev <= 0.09,
        "median {} maps to CDF {:.4}, deviation {med_cdf_dev:.4} > 0.09",
        report.median_rescaled,
        law.cdf(report.median_rescaled)
    );
    // tail/limit internal coherence: refitting with the empirical K_a/2
    // moves the KS statistic by < 0.02
    let curve = tail_curve();
    let k_hat = 0.5
        * (curve.level_ratio(3.5, 0).expect("retained point")
            + curve.level_ratio(3.5, 1).expect("retained point"));
    let law_hat = LimitLaw::from_lambda(0.5 * k_hat, shape(0.5)).unwrap();
    let ks_hat = report.ks_against(&law_hat);
    assert!(
        (ks_hat - report.ks_statistic).abs() < 0.02,
        "KS with fitted K̂: {ks_hat:.4} vs quadrature {:.4}",
        report.ks_statistic
    );
    println!(
        "criterion 8 (limit law): PASS — KS {:.4} <= 0.08 (n=2e5, 2000 reps); median {:.4} \
         (theory {:.4}); KS under fitted K̂ {:.4}",
        report.ks_statistic, report.median_rescaled, report.theory_median, ks_hat
    );
}

#[test]
fn criterion_09_exponent_discontinuity() {
    let n_grid = [10_000u64, 30_000, 100_000, 300_000];
    let cases = [
        (ExponentMode::Circle, "exponent-circle"),
        (ExponentMode::Interior(shape(0.5)), "exponent-interior"),
        (ExponentMode::Ball, "exponent-ball"),
    ];
    let mut lines = Vec::new();
    for (mode, seed_name) in cases {
        let report = run_exponent_experiment(mode, &n_grid, 500, stream_for(seed_name)).unwrap();
        let dev = (report.fitted_exponent - report.expected_exponent).abs();
        lines.push(format!(
            "{}: fitted {:.4} vs expected {:.4}",
            mode.label(),
            report.fitted_exponent,
            report.expected_exponent
        ));
        assert!(
            dev <= 0.05,
            "{}: fitted exponent {:.4} deviates from {:.4} by {dev:.4} > 0.05",
            mode.label(),
            report.fitted_exponent,
            report.expected_exponent
        );
    }
    println!(
        "criterion 9 (exponent discontinuity): PASS\n  {}",
        lines.join("\n  ")
    );
}

#[test]
fn criterion_10_chen_stein_decay() {
    let tail = tail_curve();
    let overlap = overlap_curve();
    // pick t and an n-decade whose eps_n stays inside both measured ranges
    let retained_range = |c: &TailCurve| {
        let eps: Vec<f64> = c
            .points
            .iter()
            .filter(|p| p.retained)
            .map(|p| p.eps)
            .collect();
        (
            eps.iter().cloned().fold(f64::INFINITY, f64::min),
            eps.iter().cloned().fold(0.0f64, f64::max),
        )
    };
    let (tl, th) = retained_range(tail);
    let (ol, oh) = retained_range(overlap);
    let lo = tl.max(ol);
    let hi = th.min(oh);
    let decade = 10f64.powf(4.0 / 7.0);
    assert!(
        hi / lo >= decade,
        "joint curve range [{lo}, {hi}] cannot host a decade of n"
    );
    let n_lo = 1000u64;
    let t = hi * (n_lo as f64).powf(4.0 / 7.0);
    let mut records = Vec::new();
    for k in 0..8 {
        let n = ((n_lo as f64) * 10f64.powf(k as f64 / 7.0)).round() as u64;
        let rec = chen_stein_diagnostic(shape(0.5), n, t, tail, overlap).unwrap();
        assert!(rec.b1 >= 0.0 && rec.b2 >= 0.0);
        records.push(rec);
    }
    let spread = |v: Vec<f64>| {
        let max = v.iter().cloned().fold(0.0f64, f64::max);
        let min = v.iter().cloned().fold(f64::INFINITY, f64::min);
        max / min
    };
    let s1 = spread(records.iter().map(|r| r.b1_scaled).collect());
    let s2 = spread(records.iter().map(|r| r.b2_scaled).collect());
    assert!(s1 < 2.0, "b1*n varies by {s1:.3} >= 2 over a decade of n");
    assert!(s2 < 2.0, "b2*n^(1/7) varies by {s2:.3} >= 2 over a decade of n");
    println!(
        "criterion 10 (chen-stein decay): PASS — b1*n spread {s1:.3}, b2*n^(1/7) spread {s2:.3} \
         over n in [{n_lo}, {}] at t={t:.2}",
        records.last().expect("eight records").n
    );
}

#[test]
fn criterion_11_determinism_across_workers() {
    // Worker invariance is structural (indexed substreams + ordered
    // aggregation); it is exercised here end to end by running every
    // randomized experiment under thread pools of 1 and 8 workers at
    // reduced budgets and comparing the CSV table bodies byte for byte,
    // plus a rerun-stability pass.
    let law = LimitLaw::from_lambda(0.3959, shape(0.5)).unwrap();
    let run_all = |workers: usize| -> Vec<(String, String)> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .expect("pool");
        pool.install(|| {
            let s = shape(0.5);
            let mut out = Vec::new();
            let tail = run_tail_experiment(
                s,
                &[0.02, 0.05, 0.1, 0.2],
                4_000_000,
                stream_for("det-tail"),
            )
            .unwrap();
            out.push(("tail".to_string(), tables::tail_csv(&tail)));
            let overlap = run_overlap_experiment(
                s,
                &[0.1, 0.2, 0.3],
                20_000,
                10_000,
                stream_for("det-overlap"),
            )
            .unwrap();
            out.push(("overlap".to_string(), tables::tail_csv(&overlap)));
            let poisson = run_poisson_experiment(
                s,
                20_000,
                &[0.0, 1.0, 2.0],
                200,
                &law,
                stream_for("det-poisson"),
            )
            .unwrap();
            out.push(("poisson".to_string(), tables::poisson_csv(&poisson)));
            let limit =
                run_limit_experiment(s, 20_000, 200, &law, stream_for("det-limit")).unwrap();
            out.push(("limit".to_string(), tables::limit_csv(&limit)));
            for mode in [ExponentMode::Circle, ExponentMode::Interior(s), ExponentMode::Ball] {
                let rep = run_exponent_experiment(
                    mode,
                    &[1000, 3000, 10_000],
                    60,
                    stream_for("det-exponent"),
                )
                .unwrap();
                out.push((format!("exponent-{}", mode.label()), tables::exponent_csv(&rep)));
            }
            out
        })
    };

    let single = run_all(1);
    let eight = run_all(8);
    let eight_again = run_all(8);
    for ((name, a), ((_, b), (_, c))) in single
        .iter()
        .zip(eight.iter().zip(eight_again.iter()))
    {
        assert_eq!(a, b, "{name}: CSV body differs between 1 and 8 workers");
        assert_eq!(b, c, "{name}: CSV body differs between reruns");
        assert!(!a.is_empty());
    }
    println!(
        "criterion 11 (determinism): PASS — {} CSV bodies byte-identical across \
         worker counts 1/8 and reruns",
        single.len()
    );
}
