//! End-to-end acceptance suite. Prints one line per criterion and exits
//! nonzero if any fails. `ACCEPTANCE_ONLY=3,6` restricts the run.

use std::f64::consts::PI;
use std::fs;
use std::time::Instant;

use lifshitz_core::anderson::bounds::{
    chernoff_p1_event, p2_sufficient_constant, p_eps_alpha_1_event, p_eps_alpha_2_event,
};
use lifshitz_core::anderson::{
    anderson_ids, chernoff_bound_p1, product_bound_p_eps_alpha_1, product_bound_p_eps_alpha_2,
    AndersonModel,
};
use lifshitz_core::disorder::rng::CounterStream;
use lifshitz_core::disorder::{sample_realization, DisorderSpec, Realization};
use lifshitz_core::ids::stats::binomial_se;
use lifshitz_core::ids::{
    decay_diagnostic, ile_check, lifshitz_exponent, sandwich_check, wegner_check, FitOptions,
    IleParams, RandomMedium, SandwichParams, Verdict, WegnerParams,
};
use lifshitz_core::lattice::{
    assemble_grid, assemble_operator, sample_coefficient_field, BoundaryCondition, BoxSpec, Grid,
    GridBoundary, PeriodicBackground, ProfileKind, SingleSiteProfile, SymTensor,
};
use lifshitz_core::numerics::{fit_line, log_space};
use lifshitz_core::spectral::{
    all_eigenvalues, bands_on_grid, floquet_bands, spectral_gaps, InertiaCounter,
};
use lifshitz_lab::{run_with_threads, ExperimentConfig};

type Outcome = (bool, String);

fn main() {
    let only: Option<Vec<usize>> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .map(|s| s.split(',').filter_map(|x| x.trim().parse().ok()).collect());
    let criteria: [(usize, &str, fn() -> Outcome); 11] = [
        (1, "inertia counts equal dense counts", c1_oracle),
        (2, "free operator closed forms", c2_free),
        (3, "van Hove exponent d/2", c3_van_hove),
        (4, "monotonicity in the couplings", c4_monotone),
        (5, "periodic-approximation sandwich", c5_sandwich),
        (6, "Lifshitz trend, discrete Anderson model", c6_lifshitz),
        (7, "bound dominance", c7_dominance),
        (8, "worked bound values", c8_worked),
        (9, "localization inputs", c9_localization),
        (10, "eigenfunction decay", c10_decay),
        (11, "reproducibility across thread counts", c11_repro),
    ];
    let mut failed = 0;
    for (n, name, f) in criteria {
        if only.as_ref().is_some_and(|o| !o.contains(&n)) {
            continue;
        }
        let t = Instant::now();
        let (ok, detail) = f();
        if !ok {
            failed += 1;
        }
        println!(
            "criterion {n:>2} [{}] {name}: {detail} ({:.1} s)",
            if ok { "PASS" } else { "FAIL" },
            t.elapsed().as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} criterion/criteria failed");
        std::process::exit(1);
    }
}

fn gapped_1d(m: usize, amplitude: f64, disorder: DisorderSpec) -> RandomMedium {
    RandomMedium {
        background: PeriodicBackground::two_phase(1, m, 1.0, 5.0).unwrap(),
        profile: SingleSiteProfile::new(1, ProfileKind::Compact { radius: 0.5 }, amplitude)
            .unwrap(),
        disorder,
    }
}

fn first_gap(medium: &RandomMedium) -> (f64, f64) {
    let b = floquet_bands(&medium.background, None, 64, None).unwrap();
    spectral_gaps(&b, None).gaps[0]
}

fn c1_oracle() -> Outcome {
    let mut rng = CounterStream::new(2024, 1);
    let mut mismatches = 0;
    let mut largest = 0;
    let mut instances = 0;
    for d in 1..=2usize {
        for i in 0..40u64 {
            let m = 2 + rng.below(4);
            // Every fifth instance may reach the 2000-unknown ceiling; dense
            // solves dominate the run time.
            let ceiling = if i % 5 == 0 { 2000 } else { 500 };
            let max_side = (ceiling as f64).powf(1.0 / d as f64) as usize / m;
            let k = 1 + rng.below((max_side - 1) / 2);
            let bc = match i % 3 {
                0 => BoundaryCondition::Dirichlet,
                1 => BoundaryCondition::Periodic,
                _ => BoundaryCondition::Quasiperiodic {
                    theta: (0..d).map(|_| rng.range(0.0, 2.0 * PI)).collect(),
                },
            };
            let medium = RandomMedium {
                background: PeriodicBackground::two_phase(d, m, 1.0, rng.range(1.0, 8.0)).unwrap(),
                profile: SingleSiteProfile::new(
                    d,
                    ProfileKind::ShortRange { nu: d as f64 + 2.5 },
                    rng.range(0.1, 3.0),
                )
                .unwrap(),
                disorder: DisorderSpec::Uniform01,
            };
            let bx = BoxSpec::new(d, k, m, bc).unwrap();
            let a = medium.operator(&bx, 77, i).unwrap();
            largest = largest.max(a.dim());
            let ev = all_eigenvalues(&a.matrix);
            let mut es: Vec<f64> = (0..8)
                .map(|_| rng.range(-1.0, 1.1 * ev[ev.len() - 1]))
                .collect();
            for _ in 0..8 {
                let j = rng.below(ev.len() - 1);
                if ev[j + 1] > ev[j] {
                    es.push(0.5 * (ev[j] + ev[j + 1]));
                }
            }
            let counter = InertiaCounter::new(&a.matrix);
            for e in es {
                let want = ev.partition_point(|&l| l <= e);
                if counter.count_below(e).unwrap() != want {
                    mismatches += 1;
                }
            }
            instances += 1;
        }
    }
    (
        mismatches == 0,
        format!("{instances} instances up to {largest} unknowns, {mismatches} mismatches"),
    )
}

fn c2_free() -> Outcome {
    let n = 200;
    let h = 0.1;
    let grid = Grid::uniform(1, n + 1, h, GridBoundary::Dirichlet);
    let op = assemble_grid(&grid, &vec![SymTensor::identity(1); n + 1]);
    let ev = all_eigenvalues(&op.matrix);
    let mut worst_dirichlet = 0.0f64;
    for (j, l) in ev.iter().enumerate() {
        let s = ((j + 1) as f64 * PI / (2.0 * (n + 1) as f64)).sin();
        let want = 4.0 / (h * h) * s * s;
        worst_dirichlet = worst_dirichlet.max((l - want).abs() / want);
    }
    let cell = Grid::uniform(1, 2, 1.0, GridBoundary::Periodic { phase: [0.0; 3] });
    let b = bands_on_grid(&cell, &[SymTensor::identity(1); 2], 256, None).unwrap();
    let mut worst_floquet = 0.0f64;
    for (i, e) in b.bands.iter().enumerate() {
        let c = (b.phases[i][0] / 2.0).cos().abs();
        worst_floquet = worst_floquet
            .max((e[0] - (2.0 - 2.0 * c)).abs())
            .max((e[1] - (2.0 + 2.0 * c)).abs());
    }
    (
        worst_dirichlet <= 1e-8 && worst_floquet <= 1e-10,
        format!(
            "Dirichlet rel. error {worst_dirichlet:.1e} (tol 1e-8), Floquet abs. error {worst_floquet:.1e} (tol 1e-10)"
        ),
    )
}

/// Log-log slope of `n(E₊+ε) - n(E₊)` for the free operator at the bottom of the
/// spectrum.
fn van_hove_slope(d: usize, m: usize, n_theta: usize, eps: &[f64]) -> f64 {
    let bg = PeriodicBackground::identity(d, m);
    let b = floquet_bands(&bg, None, n_theta, Some(1)).unwrap();
    let e0 = b.bands.iter().map(|x| x[0]).fold(f64::INFINITY, f64::min);
    let n0 = b.mean_count(e0);
    let (xs, ys): (Vec<f64>, Vec<f64>) = eps
        .iter()
        .map(|&e| (e.ln(), (b.mean_count(e0 + e) - n0).ln()))
        .unzip();
    fit_line(&xs, &ys).unwrap().slope
}

fn c3_van_hove() -> Outcome {
    let s1 = van_hove_slope(1, 64, 512, &log_space(0.02, 1.0, 12));
    let s2 = van_hove_slope(2, 16, 64, &log_space(0.3, 3.0, 10));
    (
        (s1 - 0.5).abs() <= 0.05 && (s2 - 1.0).abs() <= 0.15,
        format!("d=1 slope {s1:.4} (0.5 ± 0.05), d=2 slope {s2:.4} (1 ± 0.15)"),
    )
}

fn c4_monotone() -> Outcome {
    let mut rng = CounterStream::new(4, 4);
    let mut violations = 0;
    for i in 0..50u64 {
        let d = 1 + (i % 2) as usize;
        let m = 3;
        let shape = if d == 2 {
            SymTensor::from_rows(2, &[1.0, 0.4, 0.4, 0.5])
        } else {
            SymTensor::identity(1)
        };
        let profile = SingleSiteProfile::new(d, ProfileKind::Compact { radius: 0.8 }, 1.5)
            .unwrap()
            .with_shape(shape)
            .unwrap();
        let bg = PeriodicBackground::two_phase(d, m, 1.0, 3.0).unwrap();
        let k = if d == 1 { 6 } else { 2 };
        let bc = if i % 4 < 2 {
            BoundaryCondition::Dirichlet
        } else {
            BoundaryCondition::Quasiperiodic {
                theta: vec![1.1; d],
            }
        };
        let bx = BoxSpec::new(d, k, m, bc).unwrap();
        let window = profile.required_window(&bx);
        let lo = sample_realization(&DisorderSpec::Uniform01, &window, 40, i);
        let hi_values: Vec<f64> = lo
            .values
            .iter()
            .map(|w| (w + rng.range(0.0, 1.0) * (1.0 - w)).min(1.0))
            .collect();
        let hi = Realization::from_values(window, hi_values).unwrap();
        let a = assemble_operator(&sample_coefficient_field(&bg, &profile, &lo, &bx).unwrap());
        let b = assemble_operator(&sample_coefficient_field(&bg, &profile, &hi, &bx).unwrap());
        let (ea, eb) = (all_eigenvalues(&a.matrix), all_eigenvalues(&b.matrix));
        let tol = 1e-10 * eb[eb.len() - 1];
        violations += ea.iter().zip(&eb).filter(|(x, y)| **x > **y + tol).count();
        let grid = log_space(0.1, ea[ea.len() - 1], 40);
        let (ca, cb) = (
            InertiaCounter::new(&a.matrix),
            InertiaCounter::new(&b.matrix),
        );
        let na = ca.counts(&grid).unwrap();
        let nb = cb.counts(&grid).unwrap();
        violations += na.iter().zip(&nb).filter(|(x, y)| x < y).count();
    }
    (
        violations == 0,
        format!("50 pairs, {violations} violations"),
    )
}

fn c5_sandwich() -> Outcome {
    // At the band edge itself every term sits in the Lifshitz tail and is zero;
    // mid-band all three are populated.
    let medium = gapped_1d(4, 1.0, DisorderSpec::Uniform01);
    let background = floquet_bands(&medium.background, None, 64, None).unwrap();
    let band = spectral_gaps(&background, None).bands[1];
    let energy = 0.5 * (band.0 + band.1);
    let mut parts = Vec::new();
    let mut ok = true;
    for eps in [0.2, 0.1] {
        let mut p = SandwichParams::new(4, energy, eps, 8, 40);
        p.n_realizations = 200;
        p.n_theta = 16;
        p.seed = 5;
        let r = sandwich_check(&medium, &p).unwrap();
        ok &= r.verdict == Verdict::Pass;
        parts.push(format!(
            "ε={eps}: {:.4} <= {:.4} (±{:.4}) <= {:.4}",
            r.details["lower"], r.details["middle"], r.details["middle_se"], r.details["upper"]
        ));
    }
    (ok, parts.join("; "))
}

fn anderson_fit(k: usize, eps: &[f64]) -> lifshitz_core::Result<lifshitz_core::ids::ExponentFit> {
    let model = AndersonModel {
        d: 1,
        k,
        e_plus: 0.0,
        nu: 4.0,
        spec: DisorderSpec::Uniform01,
        tol: 1e-6,
    };
    let mut es = vec![0.0];
    es.extend_from_slice(eps);
    let curve = anderson_ids(&model, 500, 6, &es)?;
    let opts = FitOptions {
        target: Some(-0.5),
        ..Default::default()
    };
    lifshitz_exponent(&curve, 0.0, eps, &opts)
}

fn c6_lifshitz() -> Outcome {
    let eps = log_space(1e-2, 0.3, 12);
    match (anderson_fit(64, &eps), anderson_fit(128, &eps)) {
        (Ok(a), Ok(b)) => {
            let (ea, eb) = ((a.slope + 0.5).abs(), (b.slope + 0.5).abs());
            let ok = a.slope < 0.0 && (-0.8..=-0.2).contains(&a.slope) && eb <= ea;
            (
                ok,
                format!(
                    "k=64 slope {:.3} (CI {:.3}..{:.3}, {} pts), k=128 slope {:.3}; |error| {ea:.3} -> {eb:.3}",
                    a.slope,
                    a.ci95.0,
                    a.ci95.1,
                    a.n_used(),
                    b.slope
                ),
            )
        }
        (a, b) => (false, format!("fit failed: {:?} / {:?}", a.err(), b.err())),
    }
}

fn c7_dominance() -> Outcome {
    let n = 10_000;
    let mut violations = Vec::new();
    let mut checked = 0;
    let chernoff = [
        (DisorderSpec::Uniform01, 1, 3, 0.2, 4.0, 1.0),
        (DisorderSpec::Uniform01, 1, 8, 0.5, 2.0, 1.0),
        (
            DisorderSpec::Bernoulli { p: 0.3, a: 1.0 },
            1,
            5,
            1.0,
            4.0,
            1.0,
        ),
        (DisorderSpec::KappaTail { kappa: 1.0 }, 1, 4, 0.5, 3.0, 1.0),
        (DisorderSpec::Uniform01, 2, 2, 0.3, 4.0, 1.0),
    ];
    for (spec, d, k, delta, kc, cc) in chernoff {
        let b = chernoff_bound_p1(&spec, d, k, delta, kc, cc).unwrap();
        let p = chernoff_p1_event(&spec, d, k, delta, kc, cc, n, 70).unwrap();
        let bound = b.log_bound.exp();
        checked += 1;
        if p.estimate > bound + 3.0 * binomial_se(bound.min(1.0), n as u64) {
            violations.push(format!(
                "Chernoff {spec:?} d={d} k={k}: {:.4} > {bound:.4}",
                p.estimate
            ));
        }
    }
    let (alpha, nu, s) = (0.5, 2.5, 1.0);
    for spec in [
        DisorderSpec::Uniform01,
        DisorderSpec::Bernoulli { p: 0.05, a: 1.0 },
    ] {
        for eps in [0.3, 0.5] {
            let b1 = product_bound_p_eps_alpha_1(&spec, eps, alpha, nu, 1).unwrap();
            let p1 = p_eps_alpha_1_event(&spec, 1, eps, alpha, nu, 1e-6, n, 71).unwrap();
            let c = p2_sufficient_constant(1, eps, alpha, nu, s).unwrap();
            let b2 = product_bound_p_eps_alpha_2(&spec, eps, alpha, nu, 1, s, c).unwrap();
            let p2 = p_eps_alpha_2_event(&spec, 1, eps, alpha, nu, s, n, 72).unwrap();
            for (name, b, p) in [("P_eps_alpha_1", b1, p1), ("P_eps_alpha_2", b2, p2)] {
                let bound = b.log_bound.exp();
                checked += 1;
                if p.estimate < bound - 3.0 * binomial_se(bound.min(1.0), n as u64) {
                    violations.push(format!(
                        "{name} {spec:?} ε={eps}: {:.4} < {bound:.4}",
                        p.estimate
                    ));
                }
            }
        }
    }
    (
        violations.is_empty(),
        format!(
            "{checked} comparisons, {} violations {violations:?}",
            violations.len()
        ),
    )
}

fn c8_worked() -> Outcome {
    let spec = DisorderSpec::Uniform01;
    let p1 = product_bound_p_eps_alpha_1(&spec, 0.1, 0.5, 2.5, 1).unwrap();
    let p2 = product_bound_p_eps_alpha_2(&spec, 0.1, 0.25, 2.5, 1, 1.0, 1.0).unwrap();
    let log_p1 = p1.log_p1.unwrap_or(f64::NAN);
    let e1 = (log_p1 + 4.5 * 10f64.ln()).abs();
    let e2 = (p2.log_bound - 13.75 * 0.1f64.ln()).abs();
    (
        e1 <= 1e-12 && e2 <= 1e-12 && p2.sites == 11,
        format!(
            "log P1 = {:.12} (error {e1:.1e}), |Λ_α| = {}, log bound = {:.12} (error {e2:.1e})",
            log_p1, p2.sites, p2.log_bound
        ),
    )
}

fn c9_localization() -> Outcome {
    // Low contrast keeps the box spectrum denser than 1/k inside the band.
    let soft = |disorder| RandomMedium {
        background: PeriodicBackground::two_phase(1, 4, 0.1, 0.5).unwrap(),
        profile: SingleSiteProfile::new(1, ProfileKind::Compact { radius: 0.5 }, 0.1).unwrap(),
        disorder,
    };
    let clean = soft(DisorderSpec::Bernoulli { p: 0.0, a: 1.0 });
    let (lo, hi) = first_gap(&clean);
    let params = IleParams {
        m: 4,
        energy: 0.5 * (lo + hi),
        k: 16,
        alpha: 1.5,
        p: 2.0,
        theta: vec![0.7],
        n_trials: 100,
        seed: 9,
    };
    let gap_run = ile_check(&clean, &params).unwrap();
    let noisy = soft(DisorderSpec::Uniform01);
    let band = spectral_gaps(
        &floquet_bands(&noisy.background, None, 64, None).unwrap(),
        None,
    )
    .bands[0];
    let band_run = ile_check(
        &noisy,
        &IleParams {
            energy: 0.5 * (band.0 + band.1),
            ..params.clone()
        },
    )
    .unwrap();
    let disordered = gapped_1d(4, 1.0, DisorderSpec::Uniform01);
    let band = spectral_gaps(
        &floquet_bands(&disordered.background, None, 64, None).unwrap(),
        None,
    )
    .bands[0];
    let w = wegner_check(
        &disordered,
        &WegnerParams {
            m: 4,
            energy: 0.5 * (band.0 + band.1),
            k_values: vec![8, 16],
            eps: vec![0.05, 0.02, 0.01],
            theta: vec![0.7],
            n_trials: 300,
            seed: 10,
        },
    )
    .unwrap();
    let exps: Vec<f64> = w.exponents.iter().map(|e| e.unwrap_or(f64::NAN)).collect();
    let ok = gap_run.estimate == 0.0
        && gap_run.verdict == Verdict::Pass
        && band_run.estimate >= 0.95
        && band_run.verdict == Verdict::Fail
        && exps.iter().all(|e| *e > 0.5);
    (
        ok,
        format!(
            "gap [{lo:.3}, {hi:.3}] frequency {} ({:?}), in-band frequency {:.3} ({:?}), Wegner n̂ = {:?}, volume ratios {:?} (limit {:.2})",
            gap_run.estimate,
            gap_run.verdict,
            band_run.estimate,
            band_run.verdict,
            exps,
            w.volume_ratios,
            w.volume_limit
        ),
    )
}

fn c10_decay() -> Outcome {
    // Disorder comparable to the background contrast. Much larger amplitudes
    // lift the first band of the surroundings past E₊ and states tunnel.
    let strong = gapped_1d(4, 2.0, DisorderSpec::Uniform01);
    let (_, e_plus) = first_gap(&strong);
    let bx = BoxSpec::new(1, 30, 4, BoundaryCondition::Dirichlet).unwrap();
    let a = strong.operator(&bx, 10, 0).unwrap();
    let above = decay_diagnostic(&a, e_plus, f64::INFINITY, Some(5)).unwrap();
    let localized = above.len() == 5 && above.iter().all(|r| r.decay_rate > 0.0 && r.r2 > 0.9);

    let free = RandomMedium {
        background: PeriodicBackground::identity(1, 4),
        profile: SingleSiteProfile::new(1, ProfileKind::Compact { radius: 0.5 }, 1.0).unwrap(),
        disorder: DisorderSpec::Bernoulli { p: 0.0, a: 1.0 },
    };
    let bx = BoxSpec::new(
        1,
        30,
        4,
        BoundaryCondition::Quasiperiodic { theta: vec![0.37] },
    )
    .unwrap();
    let a = free.operator(&bx, 0, 0).unwrap();
    let flat = decay_diagnostic(&a, -1.0, 40.0, Some(20)).unwrap();
    let extended = !flat.is_empty() && flat.iter().all(|r| r.decay_rate.abs() < 0.05);
    let fmt = |v: &[lifshitz_core::ids::DecayReport]| {
        v.iter()
            .map(|r| format!("{:.3}/{:.3}", r.decay_rate, r.r2))
            .collect::<Vec<_>>()
            .join(" ")
    };
    (
        localized && extended,
        format!(
            "strong disorder rate/r² [{}]; free max |rate| {:.1e} over {} states",
            fmt(&above),
            flat.iter().map(|r| r.decay_rate.abs()).fold(0.0, f64::max),
            flat.len()
        ),
    )
}

fn c11_repro() -> Outcome {
    let configs = [
        r#"{
            "experiment": {"kind": "ids", "energies": {"linspace": {"lo": 0, "hi": 40, "n": 41}}},
            "medium": {
                "background": {"type": "two_phase", "lo": 1.0, "hi": 5.0},
                "profile": {"range": {"kind": "compact", "radius": 0.5}},
                "disorder": {"law": "uniform01"}
            },
            "geometry": {"d": 2, "k": 2, "m": 3, "bc": {"type": "periodic"}},
            "ensemble": {"n_realizations": 40, "seed": 11}
        }"#,
        r#"{
            "experiment": {"kind": "anderson", "d": 1, "k": 64, "nu": 4.0,
                           "disorder": {"law": "uniform01"},
                           "eps": {"logspace": {"lo": 0.01, "hi": 0.3, "n": 12}}, "bootstrap": 200},
            "ensemble": {"n_realizations": 200, "seed": 12}
        }"#,
        r#"{
            "experiment": {"kind": "bounds", "d": 1, "alpha": 0.5, "nu": 1.5, "eps": [0.3, 0.5],
                           "disorder": {"law": "bernoulli", "p": 0.05, "a": 1.0},
                           "chernoff": {"k": 3, "delta": 0.2, "k_const": 4.0, "c_const": 1.0},
                           "mc_trials": 2000},
            "ensemble": {"seed": 13}
        }"#,
        r#"{
            "experiment": {"kind": "wegner", "energy": 5.0, "k_values": [4, 8], "eps": [0.05, 0.1, 0.2]},
            "medium": {
                "background": {"type": "two_phase", "lo": 1.0, "hi": 5.0},
                "profile": {"range": {"kind": "compact", "radius": 0.5}},
                "disorder": {"law": "uniform01"}
            },
            "geometry": {"d": 1, "k": 4, "m": 4, "bc": {"type": "quasiperiodic", "theta": [0.7]}},
            "ensemble": {"n_realizations": 60, "seed": 14}
        }"#,
    ];
    let root = std::env::temp_dir().join(format!("lifshitz-acceptance-{}", std::process::id()));
    let mut compared = 0;
    let mut differing = Vec::new();
    for (ci, text) in configs.iter().enumerate() {
        let cfg = ExperimentConfig::from_json(text).unwrap();
        let mut reference: Option<Vec<(String, Vec<u8>)>> = None;
        for threads in [1, 4, 16] {
            let dir = root.join(format!("c{ci}-t{threads}"));
            let m = run_with_threads(&cfg, &dir, Some(threads)).unwrap();
            let files: Vec<(String, Vec<u8>)> = m
                .files
                .iter()
                .filter(|f| f.path.ends_with(".csv"))
                .map(|f| (f.path.clone(), fs::read(dir.join(&f.path)).unwrap()))
                .collect();
            match &reference {
                None => reference = Some(files),
                Some(r) => {
                    compared += files.len();
                    if r != &files {
                        differing.push(format!("{} at {threads} threads", cfg.experiment.kind()));
                    }
                }
            }
        }
    }
    let _ = fs::remove_dir_all(&root);
    (
        differing.is_empty() && compared > 0,
        format!(
            "{compared} CSV files compared against the 1-thread run, differences: {differing:?}"
        ),
    )
}
