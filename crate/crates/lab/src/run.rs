use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use lifshitz_core::anderson::bounds::{
    chernoff_p1_event, p2_sufficient_constant, p_eps_alpha_1_event, p_eps_alpha_2_event,
};
use lifshitz_core::anderson::{
    anderson_ids, chernoff_bound_p1, chernoff_bound_p2, product_bound_p_eps_alpha_1,
    product_bound_p_eps_alpha_2, AndersonModel, BoundEvaluation,
};
use lifshitz_core::disorder::rng::stream_key;
use lifshitz_core::ids::stats::binomial_se;
use lifshitz_core::ids::{
    decay_diagnostic, empirical_ids, ile_check, lifshitz_exponent, sandwich_check,
    theoretical_exponent, wegner_check, CheckReport, Edge, ExponentFit, FitOptions, IdsCurve,
    IleParams, Proportion, RandomMedium, RangeKind, SandwichParams, Verdict, WegnerParams,
};
use lifshitz_core::lattice::ProfileKind;
use lifshitz_core::spectral::{floquet_bands, spectral_gaps};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::{Experiment, ExperimentConfig, GeometryConfig};
use crate::validate::{background_gaps, has_errors, resolve_edge, validate, Diagnostic};

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

pub const IDS_HEADER: [&str; 4] = ["E", "N_mean", "N_stderr", "n_realizations"];
pub const EXPFIT_HEADER: [&str; 3] = ["eps", "dN", "log_abs_log_dN"];
pub const CHECKS_HEADER: [&str; 7] = [
    "name",
    "trials",
    "successes",
    "p_lo",
    "p_hi",
    "bound",
    "verdict",
];
pub const BOUNDS_HEADER: [&str; 7] = ["name", "eps", "alpha", "nu", "d", "log_bound", "t_star"];
pub const DECAY_HEADER: [&str; 4] = ["eigenvalue", "decay_rate", "r2", "shells_used"];

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("configuration has {} problem(s)", .0.len())]
    Invalid(Vec<Diagnostic>),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("thread pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaskRecord {
    pub name: String,
    pub seed: u64,
    pub ok: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FileRecord {
    /// Relative to the output directory.
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub artifact_version: String,
    pub kind: String,
    pub config_hash: String,
    pub wall_time_s: f64,
    pub threads: usize,
    pub tasks: Vec<TaskRecord>,
    pub files: Vec<FileRecord>,
    pub warnings: Vec<Diagnostic>,
    pub config: ExperimentConfig,
}

impl RunManifest {
    pub fn failed_tasks(&self) -> usize {
        self.tasks.iter().filter(|t| !t.ok).count()
    }
}

/// JSON result files: the result next to the full resolved config.
#[derive(Serialize)]
struct Echo<'a, T: Serialize> {
    artifact_version: &'a str,
    config_hash: &'a str,
    config: &'a ExperimentConfig,
    result: &'a T,
}

struct Ctx<'a> {
    cfg: &'a ExperimentConfig,
    hash: String,
    dir: PathBuf,
    prefix: String,
    tasks: Vec<TaskRecord>,
    files: Vec<FileRecord>,
}

fn num(x: f64) -> String {
    format!("{x}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

impl Ctx<'_> {
    fn task<T>(
        &mut self,
        name: &str,
        f: impl FnOnce(u64) -> lifshitz_core::Result<T>,
    ) -> Option<T> {
        let seed = stream_key(self.cfg.ensemble.seed, self.tasks.len() as u64);
        let r = f(seed);
        if let Err(e) = &r {
            log::error!("task {name} failed: {e}");
        }
        self.tasks.push(TaskRecord {
            name: name.into(),
            seed,
            ok: r.is_ok(),
            error: r.as_ref().err().map(|e| e.to_string()),
        });
        r.ok()
    }

    fn record(&mut self, name: String, bytes: &[u8]) -> Result<(), LabError> {
        let path = self.dir.join(&name);
        fs::write(&path, bytes)?;
        self.files.push(FileRecord {
            path: name,
            sha256: hex::encode(Sha256::digest(bytes)),
            bytes: bytes.len() as u64,
        });
        Ok(())
    }

    fn csv(&mut self, suffix: &str, header: &[&str], rows: &[Vec<String>]) -> Result<(), LabError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(header)?;
        for r in rows {
            w.write_record(r)?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        self.record(format!("{}_{suffix}.csv", self.prefix), &bytes)
    }

    fn json<T: Serialize>(&mut self, suffix: &str, result: &T) -> Result<(), LabError> {
        let echo = Echo {
            artifact_version: ARTIFACT_VERSION,
            config_hash: &self.hash,
            config: self.cfg,
            result,
        };
        let bytes = serde_json::to_vec_pretty(&echo)?;
        self.record(format!("{}_{suffix}.json", self.prefix), &bytes)
    }

    fn medium(&self) -> (RandomMedium, GeometryConfig) {
        let g = self.cfg.geometry.clone().expect("validated");
        let m = self.cfg.medium.as_ref().expect("validated").build(g.d, g.m);
        (m.expect("validated"), g)
    }

    fn n(&self) -> usize {
        self.cfg.ensemble.n_realizations
    }
}

fn ids_rows(c: &IdsCurve) -> Vec<Vec<String>> {
    c.energies
        .iter()
        .zip(c.values.iter().zip(&c.stderr))
        .map(|(e, (v, s))| {
            vec![
                num(*e),
                num(*v),
                num(*s),
                c.ensemble.n_realizations.to_string(),
            ]
        })
        .collect()
}

fn fit_rows(f: &ExponentFit) -> Vec<Vec<String>> {
    f.eps
        .iter()
        .zip(f.delta_n.iter().zip(&f.y))
        .map(|(e, (dn, y))| vec![num(*e), num(*dn), num(*y)])
        .collect()
}

fn verdict(v: Verdict) -> String {
    match v {
        Verdict::Pass => "pass",
        Verdict::Fail => "fail",
        Verdict::Info => "info",
    }
    .into()
}

fn check_row(r: &CheckReport) -> Vec<String> {
    vec![
        r.name.as_str().into(),
        r.trials.to_string(),
        r.successes.map(|s| s.to_string()).unwrap_or_default(),
        num(r.interval.0),
        num(r.interval.1),
        opt(r.bound),
        verdict(r.verdict),
    ]
}

fn bound_row(b: &BoundEvaluation) -> Vec<String> {
    vec![
        b.name.as_str().into(),
        opt(b.eps),
        opt(b.alpha),
        opt(b.nu),
        b.d.to_string(),
        num(b.log_bound),
        opt(b.t_star),
    ]
}

/// Curve without the per-realization samples, for the JSON mirrors.
fn light(c: &IdsCurve) -> IdsCurve {
    IdsCurve {
        samples: Vec::new(),
        ..c.clone()
    }
}

fn range_kind(p: &ProfileKind) -> (RangeKind, Option<f64>) {
    match *p {
        ProfileKind::LongRange { nu } => (RangeKind::Long, Some(nu)),
        ProfileKind::ShortRange { nu } => (RangeKind::Short, Some(nu)),
        ProfileKind::Compact { .. } => (RangeKind::Compact, None),
    }
}

/// Validates `config`, runs it, and writes the result files and
/// `<prefix>_manifest.json` into `out_dir`.
pub fn run(config: &ExperimentConfig, out_dir: &Path) -> Result<RunManifest, LabError> {
    let diags = validate(config);
    if has_errors(&diags) {
        return Err(LabError::Invalid(diags));
    }
    fs::create_dir_all(out_dir)?;
    let start = Instant::now();
    let mut cx = Ctx {
        cfg: config,
        hash: config.hash(),
        dir: out_dir.to_path_buf(),
        prefix: config.prefix(),
        tasks: Vec::new(),
        files: Vec::new(),
    };
    dispatch(&mut cx)?;
    let manifest = RunManifest {
        artifact_version: ARTIFACT_VERSION.into(),
        kind: config.experiment.kind().into(),
        config_hash: cx.hash.clone(),
        wall_time_s: start.elapsed().as_secs_f64(),
        threads: rayon::current_num_threads(),
        tasks: cx.tasks,
        files: cx.files,
        warnings: diags,
        config: config.clone(),
    };
    fs::write(
        out_dir.join(format!("{}_manifest.json", cx.prefix)),
        serde_json::to_vec_pretty(&manifest)?,
    )?;
    Ok(manifest)
}

/// [`run`] on a dedicated pool of `threads` workers (the global pool when `None`).
pub fn run_with_threads(
    config: &ExperimentConfig,
    out_dir: &Path,
    threads: Option<usize>,
) -> Result<RunManifest, LabError> {
    match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()?
            .install(|| run(config, out_dir)),
        None => run(config, out_dir),
    }
}

fn dispatch(cx: &mut Ctx) -> Result<(), LabError> {
    let exp = cx.cfg.experiment.clone();
    match exp {
        Experiment::Bands { n_bands } => {
            let (medium, g) = cx.medium();
            let (d, n_theta) = (g.d, g.n_theta);
            if let Some(b) = cx.task("bands", |_| {
                floquet_bands(&medium.background, None, n_theta, n_bands)
            }) {
                let mut header: Vec<String> = (1..=d).map(|j| format!("theta_{j}")).collect();
                header.push("band_index".into());
                header.push("energy".into());
                let mut rows = Vec::new();
                for (i, ev) in b.bands.iter().enumerate() {
                    let t = b.theta(i);
                    for (n, e) in ev.iter().enumerate() {
                        let mut r: Vec<String> = t[..d].iter().map(|x| num(*x)).collect();
                        r.push(n.to_string());
                        r.push(num(*e));
                        rows.push(r);
                    }
                }
                let h: Vec<&str> = header.iter().map(String::as_str).collect();
                cx.csv("bands", &h, &rows)?;
                #[derive(Serialize)]
                struct Gaps {
                    gaps: lifshitz_core::spectral::GapReport,
                    max_adjacent_slope: f64,
                    continuity_violations: usize,
                }
                cx.json(
                    "gaps",
                    &Gaps {
                        gaps: spectral_gaps(&b, None),
                        max_adjacent_slope: b.max_adjacent_slope(),
                        continuity_violations: b.continuity_violations().len(),
                    },
                )?;
            }
        }
        Experiment::Ids { energies } => {
            let (medium, g) = cx.medium();
            let bx = g.box_spec().expect("validated");
            let n = cx.n();
            let es = energies.resolve();
            if let Some(c) = cx.task("ids", |seed| empirical_ids(&medium, &bx, n, seed, &es)) {
                cx.csv("ids", &IDS_HEADER, &ids_rows(&c))?;
                cx.json("ids", &light(&c))?;
            }
        }
        Experiment::Lifshitz {
            edge,
            side,
            eps,
            min_contributing,
            bootstrap,
            target,
        } => {
            let (medium, g) = cx.medium();
            let gaps = background_gaps(cx.cfg).expect("validated");
            let e0 = resolve_edge(&edge, &gaps, side == Edge::Upper).expect("validated");
            let eps = eps.resolve();
            let mut es: Vec<f64> = vec![e0];
            for e in &eps {
                es.push(e0 + e);
                es.push(e0 - e);
            }
            es.sort_by(f64::total_cmp);
            es.dedup();
            let bx = g.box_spec().expect("validated");
            let n = cx.n();
            let d = g.d;
            let Some(curve) = cx.task("ids", |seed| empirical_ids(&medium, &bx, n, seed, &es))
            else {
                return Ok(());
            };
            cx.csv("ids", &IDS_HEADER, &ids_rows(&curve))?;
            let (kind, nu) = range_kind(&medium.profile.kind);
            let target = target.or_else(|| {
                theoretical_exponent(d, medium.disorder.kappa(), nu, kind, true)
                    .ok()
                    .flatten()
            });
            let fit = cx.task("fit", |seed| {
                let opts = FitOptions {
                    edge: side,
                    min_contributing,
                    bootstrap,
                    seed,
                    target,
                    nondegenerate: true,
                };
                lifshitz_exponent(&curve, e0, &eps, &opts)
            });
            write_fit(cx, e0, &curve, fit)?;
        }
        Experiment::Anderson {
            d,
            k,
            e_plus,
            nu,
            disorder,
            tol,
            energies,
            eps,
            min_contributing,
            bootstrap,
        } => {
            let model = AndersonModel {
                d,
                k,
                e_plus,
                nu,
                spec: disorder.clone(),
                tol,
            };
            let eps = eps.map(|g| g.resolve());
            let mut es = energies.map(|g| g.resolve()).unwrap_or_default();
            if let Some(eps) = &eps {
                es.push(e_plus);
                es.extend(eps.iter().map(|e| e_plus + e));
            }
            es.sort_by(f64::total_cmp);
            es.dedup();
            let n = cx.n();
            let Some(curve) = cx.task("ids", |seed| anderson_ids(&model, n, seed, &es)) else {
                return Ok(());
            };
            cx.csv("ids", &IDS_HEADER, &ids_rows(&curve))?;
            match eps {
                Some(eps) => {
                    let kind = if nu > d as f64 + 2.0 {
                        RangeKind::Short
                    } else {
                        RangeKind::Long
                    };
                    let target = theoretical_exponent(d, disorder.kappa(), Some(nu), kind, true)
                        .ok()
                        .flatten();
                    let fit = cx.task("fit", |seed| {
                        let opts = FitOptions {
                            edge: Edge::Lower,
                            min_contributing,
                            bootstrap,
                            seed,
                            target,
                            nondegenerate: true,
                        };
                        lifshitz_exponent(&curve, e_plus, &eps, &opts)
                    });
                    write_fit(cx, e_plus, &curve, fit)?;
                }
                None => cx.json("ids", &light(&curve))?,
            }
        }
        Experiment::Bounds {
            d,
            alpha,
            nu,
            eps,
            disorder,
            s,
            c_const,
            chernoff,
            mc_trials,
            tol,
        } => {
            let mut bounds: Vec<BoundEvaluation> = Vec::new();
            let mut checks: Vec<CheckReport> = Vec::new();
            let dd = d as f64;
            let long = nu > dd && nu <= dd + 2.0;
            for &e in &eps {
                if long {
                    if let Some(b) = cx.task(&format!("P1_product eps={e}"), |_| {
                        product_bound_p_eps_alpha_1(&disorder, e, alpha, nu, d)
                    }) {
                        if let Some(n) = mc_trials {
                            if let Some(p) = cx.task(&format!("P1_event eps={e}"), |seed| {
                                p_eps_alpha_1_event(&disorder, d, e, alpha, nu, tol, n, seed)
                            }) {
                                checks.push(dominance(&b, &p, false));
                            }
                        }
                        bounds.push(b);
                    }
                }
                let c = match c_const {
                    Some(c) => Some(c),
                    None => cx.task(&format!("P2_constant eps={e}"), |_| {
                        p2_sufficient_constant(d, e, alpha, nu, s)
                    }),
                };
                let Some(c) = c else { continue };
                if let Some(b) = cx.task(&format!("P2_product eps={e}"), |_| {
                    product_bound_p_eps_alpha_2(&disorder, e, alpha, nu, d, s, c)
                }) {
                    if let Some(n) = mc_trials {
                        if let Some(p) = cx.task(&format!("P2_event eps={e}"), |seed| {
                            p_eps_alpha_2_event(&disorder, d, e, alpha, nu, s, n, seed)
                        }) {
                            checks.push(dominance(&b, &p, false));
                        }
                    }
                    bounds.push(b);
                }
            }
            if let Some(ch) = chernoff {
                if let Some(b) = cx.task("chernoff_P1", |_| {
                    chernoff_bound_p1(&disorder, d, ch.k, ch.delta, ch.k_const, ch.c_const)
                }) {
                    if let Some(n) = mc_trials {
                        if let Some(p) = cx.task("chernoff_P1_event", |seed| {
                            chernoff_p1_event(
                                &disorder, d, ch.k, ch.delta, ch.k_const, ch.c_const, n, seed,
                            )
                        }) {
                            checks.push(dominance(&b, &p, true));
                        }
                    }
                    bounds.push(b);
                }
                if let Some(b) = cx.task("chernoff_P2", |_| {
                    chernoff_bound_p2(
                        &disorder, d, ch.k, ch.delta, ch.k_const, ch.c_const, alpha, nu,
                    )
                }) {
                    bounds.push(b);
                }
            }
            let rows: Vec<Vec<String>> = bounds.iter().map(bound_row).collect();
            cx.csv("bounds", &BOUNDS_HEADER, &rows)?;
            if !checks.is_empty() {
                let rows: Vec<Vec<String>> = checks.iter().map(check_row).collect();
                cx.csv("checks", &CHECKS_HEADER, &rows)?;
            }
            #[derive(Serialize)]
            struct Bounds {
                bounds: Vec<BoundEvaluation>,
                monte_carlo: Vec<CheckReport>,
            }
            cx.json(
                "bounds",
                &Bounds {
                    bounds,
                    monte_carlo: checks,
                },
            )?;
        }
        Experiment::Wegner {
            energy,
            k_values,
            eps,
        } => {
            let (medium, g) = cx.medium();
            let params = WegnerParams {
                m: g.m,
                energy,
                k_values,
                eps,
                theta: g.theta(),
                n_trials: cx.n(),
                seed: 0,
            };
            if let Some(r) = cx.task("wegner", |seed| {
                wegner_check(
                    &medium,
                    &WegnerParams {
                        seed,
                        ..params.clone()
                    },
                )
            }) {
                let mut rows = Vec::new();
                for row in &r.probabilities {
                    for p in row {
                        let mut c = r.report.clone();
                        c.trials = p.trials;
                        c.successes = Some(p.successes);
                        c.interval = (p.lo, p.hi);
                        rows.push(check_row(&c));
                    }
                }
                cx.csv("checks", &CHECKS_HEADER, &rows)?;
                cx.json("wegner", &r)?;
            }
        }
        Experiment::Ile { edge, k, alpha, p } => {
            let (medium, g) = cx.medium();
            let gaps = background_gaps(cx.cfg).expect("validated");
            let energy = resolve_edge(&edge, &gaps, false).expect("validated");
            let params = IleParams {
                m: g.m,
                energy,
                k,
                alpha,
                p,
                theta: g.theta(),
                n_trials: cx.n(),
                seed: 0,
            };
            if let Some(r) = cx.task("ile", |seed| {
                ile_check(
                    &medium,
                    &IleParams {
                        seed,
                        ..params.clone()
                    },
                )
            }) {
                cx.csv("checks", &CHECKS_HEADER, &[check_row(&r)])?;
                cx.json("ile", &r)?;
            }
        }
        Experiment::Decay {
            lo,
            hi,
            max_states,
            realization,
        } => {
            let (medium, g) = cx.medium();
            let bx = g.box_spec().expect("validated");
            if let Some(reports) = cx.task("decay", |seed| {
                let a = medium.operator(&bx, seed, realization)?;
                decay_diagnostic(&a, lo, hi, max_states)
            }) {
                let rows: Vec<Vec<String>> = reports
                    .iter()
                    .map(|r| {
                        vec![
                            num(r.eigenvalue),
                            num(r.decay_rate),
                            num(r.r2),
                            r.shells_used.to_string(),
                        ]
                    })
                    .collect();
                cx.csv("decay", &DECAY_HEADER, &rows)?;
                cx.json("decay", &reports)?;
            }
        }
        Experiment::Sandwich {
            edge,
            eps,
            k,
            k_large,
            eta0,
            sigmas,
        } => {
            let (medium, g) = cx.medium();
            let gaps = background_gaps(cx.cfg).expect("validated");
            let energy = resolve_edge(&edge, &gaps, false).expect("validated");
            let mut reports = Vec::new();
            for &e in &eps {
                let mut p = SandwichParams::new(g.m, energy, e, k, k_large);
                p.n_theta = g.n_theta;
                p.n_realizations = cx.n();
                p.eta0 = eta0;
                p.sigmas = sigmas;
                if let Some(r) = cx.task(&format!("sandwich eps={e}"), |seed| {
                    sandwich_check(&medium, &SandwichParams { seed, ..p })
                }) {
                    reports.push(r);
                }
            }
            let rows: Vec<Vec<String>> = reports.iter().map(check_row).collect();
            cx.csv("checks", &CHECKS_HEADER, &rows)?;
            cx.json("sandwich", &reports)?;
        }
    }
    Ok(())
}

fn write_fit(
    cx: &mut Ctx,
    edge: f64,
    curve: &IdsCurve,
    fit: Option<ExponentFit>,
) -> Result<(), LabError> {
    #[derive(Serialize)]
    struct Lifshitz {
        edge: f64,
        curve: IdsCurve,
        fit: Option<ExponentFit>,
    }
    if let Some(f) = &fit {
        cx.csv("expfit", &EXPFIT_HEADER, &fit_rows(f))?;
    }
    cx.json(
        "lifshitz",
        &Lifshitz {
            edge,
            curve: light(curve),
            fit,
        },
    )
}

/// Monte Carlo frequency against a bound `p₀`, with slack `3 sqrt(p₀(1-p₀)/n)`:
/// an upper bound must dominate the frequency, a lower bound must not exceed it.
pub fn dominance(b: &BoundEvaluation, p: &Proportion, upper: bool) -> CheckReport {
    let bound = b.log_bound.exp();
    let se = binomial_se(bound.min(1.0), p.trials);
    let slack = 3.0 * se;
    let ok = if upper {
        p.estimate <= bound + slack
    } else {
        p.estimate >= bound - slack
    };
    CheckReport {
        name: if matches!(
            b.name,
            lifshitz_core::anderson::BoundName::ChernoffP1
                | lifshitz_core::anderson::BoundName::P1Product
        ) {
            lifshitz_core::ids::CheckName::P1
        } else {
            lifshitz_core::ids::CheckName::P2
        },
        trials: p.trials,
        successes: Some(p.successes),
        estimate: p.estimate,
        interval: (p.lo, p.hi),
        bound: Some(bound),
        verdict: if ok { Verdict::Pass } else { Verdict::Fail },
        details: [
            ("log_bound".to_string(), b.log_bound),
            ("stderr".to_string(), se),
        ]
        .into_iter()
        .collect(),
        notes: vec![b.name.as_str().to_string()],
    }
}
