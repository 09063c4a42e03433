//! Subcommands: each turns its inputs into the `results` object of a report
//! plus the certificates it checked.

use std::path::PathBuf;
use std::time::Instant;

use serde_json::{json, Map, Value};
use tvgap_core::coprime::factorize;
use tvgap_core::gap::plant_gap;
use tvgap_core::margin::{corona_criterion, left_inverse_norm, margin_report};
use tvgap_core::synthesis::{build_proof_operators, optimal_q, robust_controller, schmidt_pairs, t7_check};
use tvgap_core::{CoprimeFactorization, LtvOperator};

use crate::report::{self, num, nums, Certificate};
use crate::selftest;
use crate::system::parse_system;
use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Factorize { input: PathBuf },
    Margin { input: PathBuf },
    Gap { plant_a: PathBuf, plant_b: PathBuf },
    Synthesize { input: PathBuf },
    Corona { input: PathBuf },
    Selftest,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Options {
    /// Overrides the horizon of fir and state_space inputs.
    pub horizon: Option<usize>,
    /// Tolerance applied to every certificate of the subcommand.
    pub tol: f64,
    pub seed: u64,
    /// Adds wall-clock timings, which makes the report nondeterministic.
    pub timings: bool,
}

impl Default for Options {
    fn default() -> Self {
        Options { horizon: None, tol: 1e-8, seed: 0, timings: false }
    }
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: Value,
    pub certified: bool,
}

/// Number of Schmidt pairs summarized by `synthesize`.
const SCHMIDT_PAIRS: usize = 3;

struct Loaded {
    name: String,
    plant: LtvOperator,
    digest: String,
}

fn load(path: &PathBuf, opts: &Options) -> Result<Loaded, CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|_| CliError::Validation(format!("{}: not UTF-8 text", path.display())))?;
    let mut desc = parse_system(&text).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    if let Some(t) = opts.horizon {
        desc = desc.with_horizon(t)?;
    }
    Ok(Loaded { name: desc.name.clone(), plant: desc.lift()?, digest: report::digest(&bytes) })
}

fn plant_summary(l: &Loaded) -> Value {
    json!({
        "name": l.name,
        "horizon": l.plant.horizon(),
        "input_dims": l.plant.domain().dims(),
        "output_dims": l.plant.codomain().dims(),
    })
}

fn factorization_json(f: &CoprimeFactorization) -> Value {
    let mut res = Map::new();
    for (name, v) in f.residuals.named() {
        res.insert(name.into(), num(v));
    }
    Value::Object(res)
}

struct Timer {
    enabled: bool,
    marks: Map<String, Value>,
}

impl Timer {
    fn time<T>(&mut self, what: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        if self.enabled {
            self.marks.insert(what.into(), num(start.elapsed().as_secs_f64() * 1e3));
        }
        out
    }
}

pub fn run(cmd: &Command, opts: &Options) -> Result<Outcome, CliError> {
    if !(opts.tol > 0.0) {
        return Err(CliError::Validation("--tol: must be positive".into()));
    }
    let mut timer = Timer { enabled: opts.timings, marks: Map::new() };
    let mut results = Map::new();
    let mut certs = Vec::new();
    let tol = opts.tol;

    let digest = match cmd {
        Command::Factorize { input } => {
            let l = load(input, opts)?;
            let f = timer.time("factorize", || factorize(&l.plant))?;
            results.insert("plant".into(), plant_summary(&l));
            results.insert("residuals".into(), factorization_json(&f));
            results.insert(
                "factors".into(),
                json!({
                    "M": report::operator(&f.m),
                    "N": report::operator(&f.n),
                    "M_hat": report::operator(&f.m_hat),
                    "N_hat": report::operator(&f.n_hat),
                }),
            );
            certs.push(Certificate::new("factorization residual", f.residuals.max(), tol));
            l.digest
        }
        Command::Margin { input } => {
            let l = load(input, opts)?;
            let f = timer.time("factorize", || factorize(&l.plant))?;
            let m = timer.time("margin", || margin_report(&f))?;
            results.insert("plant".into(), plant_summary(&l));
            let profile: Vec<Value> = m
                .profile
                .entries
                .iter()
                .map(|e| json!({"n": e.n, "value": num(e.value), "boundary": e.boundary}))
                .collect();
            results.insert(
                "margin".into(),
                json!({
                    "hankel_norm_R": num(m.hankel_norm_r),
                    "hankel_norm_R_flat": num(m.hankel_norm_r_flat),
                    "r_o": num(m.r_o),
                    "r_o_alt": num(m.r_o_alt),
                    "upsilon_norm": num(m.upsilon_norm),
                    "cross_residual": num(m.cross_residual),
                    "unitary_residual": num(m.unitary_residual),
                    "profile": profile,
                    "bracket": {
                        "lower": num(m.profile.lower),
                        "upper": num(m.profile.upper),
                        "caveat": "finite horizon: entries flagged boundary restrict to the last few steps",
                    },
                    "corona_value": num(m.corona_value),
                    "left_inverse_norm": num(m.left_inverse_norm),
                    "t11_radius": num(m.t11_radius),
                    "t11_residual": num(m.t11_residual),
                }),
            );
            certs.push(Certificate::new("factorization residual", f.residuals.max(), tol));
            certs.push(Certificate::new("r_o cross residual", m.cross_residual, tol));
            certs.push(Certificate::new(
                "hankel norm paths",
                (m.hankel_norm_r - m.hankel_norm_r_flat).abs(),
                tol,
            ));
            certs.push(Certificate::new("unitary reduction", m.unitary_residual, tol));
            certs.push(Certificate::new("row problem residual", m.t11_residual, tol));
            l.digest
        }
        Command::Gap { plant_a, plant_b } => {
            let a = load(plant_a, opts)?;
            let b = load(plant_b, opts)?;
            if a.plant.domain() != b.plant.domain() || a.plant.codomain() != b.plant.codomain() {
                return Err(CliError::Validation(
                    "plants must share horizon and signal dimensions".into(),
                ));
            }
            let g = timer.time("gap", || plant_gap(&a.plant, &b.plant))?;
            results.insert("plant_a".into(), plant_summary(&a));
            results.insert("plant_b".into(), plant_summary(&b));
            let per_n: Vec<Value> = g
                .per_n
                .iter()
                .map(|e| {
                    json!({
                        "n": e.n,
                        "directed_12": num(e.directed_12),
                        "directed_21": num(e.directed_21),
                        "two_sided": num(e.two_sided),
                        "max_identity_residual": num(e.max_identity_residual),
                    })
                })
                .collect();
            results.insert(
                "gap".into(),
                json!({
                    "per_n_directed_12": nums(&g.per_n_directed_12()),
                    "per_n_directed_21": nums(&g.per_n_directed_21()),
                    "directed_12": num(g.directed_12),
                    "directed_21": num(g.directed_21),
                    "alpha": num(g.alpha),
                    "per_n": per_n,
                }),
            );
            certs.push(Certificate::new("max identity", g.max_identity_residual(), tol));
            report::digest(format!("{}\n{}", a.digest, b.digest).as_bytes())
        }
        Command::Synthesize { input } => {
            let l = load(input, opts)?;
            let f = timer.time("factorize", || factorize(&l.plant))?;
            let opt = timer.time("optimal_q", || optimal_q(&f))?;
            let ctrl = timer.time("controller", || robust_controller(&f, &opt.q))?;
            let po = timer.time("proof_operators", || build_proof_operators(&f))?;
            let pairs = timer.time("schmidt_pairs", || schmidt_pairs(&po, SCHMIDT_PAIRS))?;
            results.insert("plant".into(), plant_summary(&l));
            let mut proof = Map::new();
            for (name, v) in po.residuals.named() {
                proof.insert(name.into(), num(v));
            }
            let mut worst_pair: f64 = 0.0;
            let schmidt: Vec<Value> = pairs
                .iter()
                .map(|sd| {
                    let single = t7_check(&po, sd).max();
                    worst_pair = worst_pair.max(sd.residuals.max()).max(single);
                    json!({
                        "lambda": num(sd.lambda),
                        "max_residual": num(sd.residuals.max()),
                        "single_vector_residual": num(single),
                    })
                })
                .collect();
            let cl = &ctrl.closed_loop;
            results.insert(
                "synthesis".into(),
                json!({
                    "Q_o": report::operator(&opt.q),
                    "achieved_norm": num(opt.achieved_norm),
                    "target_norm": num(opt.target_norm),
                    "identity_residual": num(opt.identity_residual),
                    "top_multiplicity": opt.top_multiplicity,
                    "controller": report::operator(&ctrl.c),
                    "closed_loop": {
                        "sensitivity": num(cl.sensitivity),
                        "plant_sensitivity": num(cl.plant_sensitivity),
                        "control_sensitivity": num(cl.control_sensitivity),
                        "complementary": num(cl.complementary),
                        "margin": num(cl.margin),
                    },
                    "margin_residual": num(ctrl.margin_residual),
                    "upsilon_norm": num(po.upsilon_norm),
                    "xi_norm": num(po.xi_norm),
                    "tau_gamma": num(po.tau_gamma),
                    "proof_residuals": proof,
                    "schmidt": schmidt,
                }),
            );
            certs.push(Certificate::new("factorization residual", f.residuals.max(), tol));
            certs.push(Certificate::new(
                "optimal norm",
                (opt.achieved_norm - opt.target_norm).abs(),
                tol,
            ));
            certs.push(Certificate::new("closed-loop margin", ctrl.margin_residual, tol));
            certs.push(Certificate::new("controller causality", ctrl.c.anticausal_magnitude(), tol));
            certs.push(Certificate::new("proof identities", po.residuals.max(), tol));
            certs.push(Certificate::new("schmidt pairs", worst_pair, tol));
            l.digest
        }
        Command::Corona { input } => {
            let l = load(input, opts)?;
            let f = timer.time("factorize", || factorize(&l.plant))?;
            let value = timer.time("corona", || corona_criterion(&f.m, &f.n))?;
            let bound = left_inverse_norm(&f);
            results.insert("plant".into(), plant_summary(&l));
            results.insert(
                "corona".into(),
                json!({"corona_value": num(value), "left_inverse_norm": num(bound)}),
            );
            certs.push(Certificate::new("factorization residual", f.residuals.max(), tol));
            certs.push(Certificate::new("left inverse bound", (value - bound).max(0.0), tol));
            l.digest
        }
        Command::Selftest => {
            let checks = timer.time("selftest", || selftest::run(opts.seed));
            results.insert("seed".into(), json!(opts.seed));
            results.insert("checks".into(), Value::Array(checks.iter().map(|c| c.to_json()).collect()));
            for c in &checks {
                certs.push(Certificate::new(c.name, c.worst, c.tol));
            }
            report::digest(format!("selftest seed={}", opts.seed).as_bytes())
        }
    };

    let certified = certs.iter().all(Certificate::passed);
    results.insert("certificates".into(), Value::Array(certs.iter().map(Certificate::to_json).collect()));
    results.insert("certified".into(), json!(certified));
    if opts.timings {
        results.insert("timings_ms".into(), Value::Object(timer.marks));
    }
    Ok(Outcome { report: report::document(digest, results), certified })
}
