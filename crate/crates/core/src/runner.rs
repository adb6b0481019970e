//! Suite execution and the JSON report document.
//!
//! All random draws happen while planning, in a fixed order, so the report
//! depends only on the configuration and seed. The planned checks then run
//! in parallel and are collected back in plan order.

use std::time::Instant;

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::chain::validate_chain_identities;
use crate::config::{RunConfig, Suite};
use crate::correspondence::{
    check_det_identity_blocks, check_kz_calogero, check_qkz_macdonald, check_sign_flip_covector, check_sign_flip_map,
    degeneracy_sweep, kz_calogero_identity,
};
use crate::error::{Error, Result};
use crate::grading::Grading;
use crate::omega::{build_omega, is_admissible, solution_dimension, validate_omega, OmegaKind};
use crate::report::{CheckReport, Status};
use crate::rmatrix::{arg_difference, arg_inverse, build_r, validate_r_axioms, RFamily};
use crate::sampling::{chain_from, random_rational, rng, sample_params, sample_points, ChainParams};
use crate::scalar::{rat, Backend, Rational, Scalar};

/// Spectral points per chain check.
const CHAIN_POINTS: usize = 3;

/// One planned check with all of its parameters drawn.
#[derive(Debug, Clone)]
pub enum Job {
    RAxioms {
        family: RFamily,
        grading: Grading,
        points: Vec<(Rational, Rational)>,
        coupling: Rational,
        twist: Vec<Rational>,
    },
    Omega {
        kind: OmegaKind<Rational>,
        grading: Grading,
        weights: Vec<usize>,
        n: usize,
        points: Vec<Rational>,
        eta: Rational,
    },
    Chain {
        chain: Chain,
        points: Vec<Rational>,
    },
    Calogero {
        chain: Chain,
        weights: Vec<usize>,
    },
    Macdonald {
        chain: Chain,
        weights: Vec<usize>,
        d: usize,
    },
    Det {
        chain: Chain,
        blocks: Vec<Vec<usize>>,
    },
    Degeneracy {
        chain: Chain,
        weights: Vec<usize>,
    },
    SignFlip {
        chain: Chain,
    },
    SignFlipCovector {
        chain: Chain,
        weights: Vec<usize>,
    },
    Skipped {
        name: String,
        config: String,
        reason: String,
    },
}

/// A fully drawn chain over exact rationals.
#[derive(Debug, Clone)]
pub struct Chain {
    pub grading: Grading,
    pub family: RFamily,
    pub params: ChainParams,
}

impl Chain {
    fn build<S: Scalar>(&self) -> Result<crate::chain::ChainConfig<S>> {
        let p = &self.params;
        let missing = || Error::Config("chain parameters not drawn".into());
        chain_from(
            &self.grading,
            self.family,
            p.positions.as_deref().ok_or_else(missing)?,
            p.twist.as_deref().ok_or_else(missing)?,
            p.coupling.as_ref().ok_or_else(missing)?,
            p.shift.as_ref().ok_or_else(missing)?,
            p.kappa.as_ref().ok_or_else(missing)?,
        )
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
}

impl Summary {
    pub fn of(checks: &[CheckReport]) -> Self {
        let count = |s: Status| checks.iter().filter(|c| c.status == s).count();
        Self {
            total: checks.len(),
            passed: count(Status::Pass),
            failed: count(Status::Fail),
            skipped: count(Status::Skipped),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportDocument {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: serde_json::Value,
    pub checks: Vec<CheckReport>,
    pub summary: Summary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_clock_ms: Option<f64>,
}

impl ReportDocument {
    /// 0 when every non-skipped check passed, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.summary.failed == 0 {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn chain_template(cfg: &RunConfig, family: RFamily) -> ChainParams {
    let (coupling, shift) = cfg.couplings(family);
    ChainParams {
        positions: cfg.positions.clone(),
        twist: cfg.twist.clone(),
        coupling,
        shift,
        kappa: cfg.kappa.clone(),
    }
}

/// Number of distinct draws: one when nothing is left to sample.
fn draws(cfg: &RunConfig, template: &ChainParams) -> usize {
    if template.is_fixed() {
        1
    } else {
        cfg.samples
    }
}

fn draw_chain(rng: &mut ChaCha8Rng, cfg: &RunConfig, grading: &Grading, family: RFamily) -> Result<Chain> {
    let params = sample_params(rng, &chain_template(cfg, family), grading, family, cfg.n)?;
    Ok(Chain { grading: grading.clone(), family, params })
}

fn r_point_ok(family: RFamily, x: &Rational, y: &Rational, c: &Rational, g: &Grading) -> bool {
    let ok = || -> Result<()> {
        build_r(family, x, c, g)?;
        build_r(family, y, c, g)?;
        build_r(family, &arg_inverse(family, x)?, c, g)?;
        build_r(family, &arg_difference(family, x, y)?, c, g)?;
        Ok(())
    };
    ok().is_ok()
}

fn fixed_or_random(rng: &mut ChaCha8Rng, fixed: &Option<Rational>, positive: bool) -> Rational {
    fixed.clone().unwrap_or_else(|| random_rational(rng, positive))
}

fn kinds(q: &Rational) -> [OmegaKind<Rational>; 4] {
    [OmegaKind::SymPlus, OmegaKind::SymMinus, OmegaKind::QPlus(q.clone()), OmegaKind::QMinus(q.clone())]
}

/// Family used by a suite that needs a rational (or trig) chain.
fn family_for(cfg: &RunConfig, trig: bool) -> RFamily {
    if cfg.family.is_trig() == trig {
        cfg.family
    } else if trig {
        RFamily::TrigPlus
    } else {
        RFamily::RationalPlus
    }
}

/// Draws every check of the selected suites.
pub fn plan(cfg: &RunConfig) -> Result<Vec<Job>> {
    let mut rng = rng(cfg.seed);
    let gradings = cfg.grading.gradings(cfg.k)?;
    let weights = cfg.weight_list();
    let mut jobs = Vec::new();
    for suite in cfg.suite.expand() {
        match suite {
            Suite::RAxioms => {
                for family in RFamily::ALL {
                    let trig = family.is_trig();
                    for g in &gradings {
                        let (fixed_c, _) = cfg.couplings(family);
                        let mut coupling = fixed_or_random(&mut rng, &fixed_c, trig);
                        while trig && coupling == rat(1, 1) {
                            coupling = random_rational(&mut rng, true);
                        }
                        let twist = match &cfg.twist {
                            Some(t) => t.clone(),
                            None => sample_points(&mut rng, RFamily::RationalPlus, cfg.k),
                        };
                        let mut points = Vec::with_capacity(cfg.samples);
                        while points.len() < cfg.samples {
                            let x = random_rational(&mut rng, trig);
                            let y = random_rational(&mut rng, trig);
                            if r_point_ok(family, &x, &y, &coupling, g) {
                                points.push((x, y));
                            }
                        }
                        jobs.push(Job::RAxioms { family, grading: g.clone(), points, coupling, twist });
                    }
                }
            }
            Suite::Omega => {
                for g in &gradings {
                    for w in &weights {
                        let q = match &cfg.q {
                            Some(q) => q.clone(),
                            None => loop {
                                let q = random_rational(&mut rng, true);
                                if q != rat(1, 1) {
                                    break q;
                                }
                            },
                        };
                        let eta = fixed_or_random(&mut rng, &cfg.eta, false);
                        for kind in kinds(&q) {
                            if !is_admissible(&kind, g, w, cfg.n) {
                                jobs.push(Job::Skipped {
                                    name: "omega".into(),
                                    config: format!("{kind} {g} n={} weights={w:?}", cfg.n),
                                    reason: "no invariant vector".into(),
                                });
                                continue;
                            }
                            let family = if kind.q().is_some() { RFamily::TrigPlus } else { RFamily::RationalPlus };
                            let c = if kind.q().is_some() { q.clone() } else { eta.clone() };
                            let mut points = Vec::with_capacity(cfg.samples);
                            while points.len() < cfg.samples {
                                let x = random_rational(&mut rng, family.is_trig());
                                let ok = [family, family.opposite()]
                                    .iter()
                                    .all(|&f| build_r(f, &x, &c, g).is_ok() && build_r(f, &x, &c.recip(), g).is_ok());
                                if ok {
                                    points.push(x);
                                }
                            }
                            jobs.push(Job::Omega {
                                kind,
                                grading: g.clone(),
                                weights: w.clone(),
                                n: cfg.n,
                                points,
                                eta: eta.clone(),
                            });
                        }
                    }
                }
            }
            Suite::Chain => {
                let template = chain_template(cfg, cfg.family);
                for g in &gradings {
                    for _ in 0..draws(cfg, &template) {
                        let chain = draw_chain(&mut rng, cfg, g, cfg.family)?;
                        let points = chain_points(&mut rng, &chain);
                        jobs.push(Job::Chain { chain, points });
                    }
                }
            }
            Suite::Correspondence => {
                let family = cfg.family;
                let template = chain_template(cfg, family);
                for g in &gradings {
                    for w in &weights {
                        for _ in 0..draws(cfg, &template) {
                            let chain = draw_chain(&mut rng, cfg, g, family)?;
                            if !family.is_trig() {
                                jobs.push(Job::Calogero { chain: chain.clone(), weights: w.clone() });
                            }
                            let top = if family.is_trig() { 1 } else { cfg.n };
                            for d in 1..=top {
                                jobs.push(Job::Macdonald { chain: chain.clone(), weights: w.clone(), d });
                            }
                        }
                    }
                }
            }
            Suite::DetIdentity => {
                let family = family_for(cfg, false);
                let template = chain_template(cfg, family);
                for g in &gradings {
                    for _ in 0..draws(cfg, &template) {
                        let chain = draw_chain(&mut rng, cfg, g, family)?;
                        jobs.push(Job::Det { chain, blocks: weights.clone() });
                    }
                }
            }
            Suite::Degeneracy => {
                let template = chain_template(cfg, cfg.family);
                let base = Grading::bosonic(cfg.k)?;
                for w in &weights {
                    for _ in 0..draws(cfg, &template) {
                        let chain = draw_chain(&mut rng, cfg, &base, cfg.family)?;
                        jobs.push(Job::Degeneracy { chain, weights: w.clone() });
                    }
                }
            }
            Suite::SignFlip => {
                let family = family_for(cfg, true);
                let template = chain_template(cfg, family);
                for g in &gradings {
                    for _ in 0..draws(cfg, &template) {
                        let chain = draw_chain(&mut rng, cfg, g, family)?;
                        jobs.push(Job::SignFlip { chain: chain.clone() });
                        for w in &weights {
                            jobs.push(Job::SignFlipCovector { chain: chain.clone(), weights: w.clone() });
                        }
                    }
                }
            }
            Suite::All => unreachable!("expanded above"),
        }
    }
    Ok(jobs)
}

fn chain_points(rng: &mut ChaCha8Rng, chain: &Chain) -> Vec<Rational> {
    let positions = chain.params.positions.clone().unwrap_or_default();
    let mut out = Vec::with_capacity(CHAIN_POINTS);
    while out.len() < CHAIN_POINTS {
        let x = random_rational(rng, chain.family.is_trig());
        // T(x) needs x ≠ x_j, and u ≠ ±u_j for trig families
        let clash = positions.iter().any(|p| p == &x || (chain.family.is_trig() && p == &-x.clone()));
        if !clash && !out.contains(&x) {
            out.push(x);
        }
    }
    out
}

fn conv<S: Scalar>(v: &[Rational]) -> Vec<S> {
    v.iter().map(S::from_rational).collect()
}

fn describe_chain(chain: &Chain, weights: &[usize]) -> String {
    let p = &chain.params;
    let list = |v: &Option<Vec<Rational>>| {
        v.as_ref()
            .map(|v| v.iter().map(crate::scalar::format_rational).collect::<Vec<_>>().join(","))
            .unwrap_or_default()
    };
    format!("{} {} x=({}) weights={weights:?}", chain.family, chain.grading, list(&p.positions))
}

/// Runs one job in backend `S`.
pub fn execute<S: Scalar>(job: &Job) -> Vec<CheckReport> {
    let with_chain = |chain: &Chain,
                      name: &str,
                      weights: &[usize],
                      f: &dyn Fn(&crate::chain::ChainConfig<S>) -> Vec<CheckReport>| {
        match chain.build::<S>() {
            Ok(c) => f(&c),
            Err(e) => vec![CheckReport::from_error(name, describe_chain(chain, weights), &e)],
        }
    };
    match job {
        Job::RAxioms { family, grading, points, coupling, twist } => {
            let pts: Vec<(S, S)> = points.iter().map(|(x, y)| (S::from_rational(x), S::from_rational(y))).collect();
            vec![validate_r_axioms(*family, grading, &pts, &S::from_rational(coupling), &conv::<S>(twist))]
        }
        Job::Omega { kind, grading, weights, n, points, eta } => {
            vec![omega_check::<S>(kind, grading, weights, *n, points, eta)]
        }
        Job::Chain { chain, points } => {
            with_chain(chain, "chain", &[], &|c| vec![validate_chain_identities(c, &conv::<S>(points))])
        }
        Job::Calogero { chain, weights } => with_chain(chain, "kz-calogero", weights, &|c| {
            let n = c.n();
            if is_admissible(&OmegaKind::<S>::SymPlus, &c.grading, weights, n) {
                vec![check_kz_calogero(c, weights)]
            } else if is_admissible(&OmegaKind::<S>::SymMinus, &c.grading, weights, n) {
                let r = kz_calogero_identity(c, weights, &OmegaKind::SymMinus).unwrap_or_else(|e| {
                    CheckReport::from_error("kz-calogero sym-minus", describe_chain(chain, weights), &e)
                });
                vec![r]
            } else {
                vec![CheckReport::skipped("kz-calogero", describe_chain(chain, weights), "no invariant vector")]
            }
        }),
        Job::Macdonald { chain, weights, d } => with_chain(chain, "qkz-macdonald", weights, &|c| {
            let kind = OmegaKind::for_family(c.family, &c.params.coupling);
            match kind {
                Ok(k) if !is_admissible(&k, &c.grading, weights, c.n()) => vec![CheckReport::skipped(
                    format!("qkz-macdonald d={d}"),
                    describe_chain(chain, weights),
                    "no invariant vector",
                )],
                _ => vec![check_qkz_macdonald(c, *d, weights)],
            }
        }),
        Job::Det { chain, blocks } => with_chain(chain, "det-identity", &[], &|c| check_det_identity_blocks(c, blocks)),
        Job::Degeneracy { chain, weights } => {
            with_chain(chain, "degeneracy", weights, &|c| degeneracy_sweep(c, weights))
        }
        Job::SignFlip { chain } => with_chain(chain, "sign-flip", &[], &|c| vec![check_sign_flip_map(c, None)]),
        Job::SignFlipCovector { chain, weights } => {
            with_chain(chain, "sign-flip covector", weights, &|c| vec![check_sign_flip_covector(c, weights)])
        }
        Job::Skipped { name, config, reason } => {
            vec![CheckReport::skipped(name.clone(), config.clone(), reason.clone())]
        }
    }
}

fn omega_check<S: Scalar>(
    kind: &OmegaKind<Rational>,
    grading: &Grading,
    weights: &[usize],
    n: usize,
    points: &[Rational],
    eta: &Rational,
) -> CheckReport {
    let kind_s: OmegaKind<S> = match kind {
        OmegaKind::SymPlus => OmegaKind::SymPlus,
        OmegaKind::SymMinus => OmegaKind::SymMinus,
        OmegaKind::QPlus(q) => OmegaKind::QPlus(S::from_rational(q)),
        OmegaKind::QMinus(q) => OmegaKind::QMinus(S::from_rational(q)),
    };
    let config = format!("{kind} {grading} n={n} weights={weights:?}");
    let omega = match build_omega(&kind_s, grading, weights, n) {
        Ok(o) => o,
        Err(e) => return CheckReport::from_error("omega", config, &e),
    };
    let mut report = validate_omega(&omega, &kind_s, grading, &conv::<S>(points), &S::from_rational(eta));
    match solution_dimension(&kind_s, grading, weights, n) {
        Ok(dim) => report.require("solution space is one-dimensional", dim == 1),
        Err(e) => report.require(format!("solution space: {e}"), false),
    }
    report.data = Some(omega.to_debug_json());
    report
}

/// Plans and runs the configured suites.
pub fn run_suites(cfg: &RunConfig) -> Result<ReportDocument> {
    let start = Instant::now();
    let jobs = plan(cfg)?;
    let timed = |job: &Job| -> Vec<CheckReport> {
        let t = Instant::now();
        let mut reports = match cfg.backend {
            Backend::Exact => execute::<Rational>(job),
            Backend::Float => execute::<Complex64>(job),
        };
        if cfg.timings {
            let ms = t.elapsed().as_secs_f64() * 1e3;
            for r in &mut reports {
                r.elapsed_ms = Some(ms);
            }
        }
        reports
    };
    let checks: Vec<CheckReport> = jobs.par_iter().map(timed).collect::<Vec<_>>().into_iter().flatten().collect();
    let summary = Summary::of(&checks);
    Ok(ReportDocument {
        tool: "superqkz",
        version: env!("CARGO_PKG_VERSION"),
        config: cfg.echo(),
        checks,
        summary,
        wall_clock_ms: cfg.timings.then(|| start.elapsed().as_secs_f64() * 1e3),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::GradingSpec;

    #[test]
    fn small_run_is_deterministic_and_green() {
        let cfg = RunConfig { k: 2, n: 2, samples: 2, seed: 3, ..RunConfig::default() };
        let a = run_suites(&cfg).unwrap();
        let b = run_suites(&cfg).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        let failed: Vec<_> = a.checks.iter().filter(|c| c.failed()).collect();
        assert!(failed.is_empty(), "{failed:#?}");
        assert_eq!(a.exit_code(), 0);
    }

    #[test]
    fn omega_report_carries_coefficients() {
        let cfg = RunConfig {
            suite: Suite::Omega,
            grading: GradingSpec::Fixed(Grading::new(2, &[1]).unwrap()),
            weights: Some(vec![2, 1]),
            samples: 1,
            ..RunConfig::default()
        };
        let doc = run_suites(&cfg).unwrap();
        let sym = doc.checks.iter().find(|c| c.config.starts_with("sym-plus")).unwrap();
        assert!(sym.passed());
        assert_eq!(sym.data.as_ref().unwrap().as_array().unwrap().len(), 3);
    }
}
