//! Seeded randomized property suite behind `tvgap selftest`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use tvgap_core::coprime::factorize;
use tvgap_core::gap::plant_gap;
use tvgap_core::margin::{r_o, r_upper_alt};
use tvgap_core::nehari::{distance_to_causal, flatten_hankel};
use tvgap_core::random::{random_causal, random_operator, random_plant, random_space, random_unit_vectors};
use tvgap_core::synthesis::{build_proof_operators, optimal_q, schmidt_pairs};

use crate::report::num;

/// Random cases per check.
pub const CASES: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub cases: usize,
    pub worst: f64,
    pub tol: f64,
    /// First failure message, if a computation errored.
    pub error: Option<String>,
}

impl Check {
    fn new(name: &'static str, tol: f64) -> Self {
        Check { name, cases: 0, worst: 0.0, tol, error: None }
    }

    fn record(&mut self, value: Result<f64, String>) {
        self.cases += 1;
        match value {
            Ok(v) if v <= self.worst => {}
            Ok(v) => self.worst = v,
            Err(e) => {
                self.worst = f64::INFINITY;
                self.error.get_or_insert(e);
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.worst <= self.tol
    }

    pub fn to_json(&self) -> Value {
        json!({
            "name": self.name,
            "cases": self.cases,
            "worst": num(self.worst),
            "tol": num(self.tol),
            "pass": self.passed(),
            "error": self.error,
        })
    }
}

fn msg<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

pub fn run(seed: u64) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut factor = Check::new("factorization residuals", 1e-8);
    let mut isometry = Check::new("graph isometry", 1e-10);
    let mut nehari = Check::new("nest Nehari equality", 1e-7);
    let mut dual = Check::new("dual margin formulas", 1e-8);
    let mut completion = Check::new("completion independence", 1e-9);
    let mut triangle = Check::new("gap triangle inequality", 1e-9);
    let mut proof = Check::new("proof operator identities", 1e-9);
    let mut schmidt = Check::new("Schmidt pair residuals", 1e-7);
    let mut synthesis = Check::new("synthesis optimality", 1e-8);

    for _ in 0..CASES {
        let p = random_plant(&mut rng, 5, 2);
        let f = match factorize(&p) {
            Ok(f) => f,
            Err(e) => {
                factor.record(Err(msg(e)));
                continue;
            }
        };
        factor.record(Ok(f.residuals.max()));

        let g = f.right_graph();
        let worst = random_unit_vectors(&mut rng, g.ncols(), 20)
            .iter()
            .map(|v| ((&g * v).norm_squared() - 1.0).abs())
            .fold(0.0, f64::max);
        isometry.record(Ok(worst));

        let t = p.horizon();
        let (d, c) = (random_space(&mut rng, t, 2), random_space(&mut rng, t, 2));
        let sym = random_operator(&mut rng, d, c, 1.0);
        nehari.record(Ok((flatten_hankel(&sym).norm() - distance_to_causal(&sym)).abs()));

        let ro = r_o(&f);
        dual.record(
            ro.clone()
                .and_then(|ro| r_upper_alt(&f).map(|a| (ro - a.r_o_alt).abs()))
                .map_err(msg),
        );

        let q = random_causal(&mut rng, f.u.domain().clone(), f.u.codomain().clone(), 1.0);
        completion.record(
            f.with_youla_shift(&q)
                .and_then(|g| Ok((r_o(&g)? - ro.clone()?).abs()))
                .map_err(msg),
        );

        let scale = rng.gen_range(0.5..2.0);
        let others: Vec<_> = (0..2)
            .map(|_| random_causal(&mut rng, p.domain().clone(), p.codomain().clone(), scale))
            .collect();
        triangle.record(
            (|| {
                let g01 = plant_gap(&p, &others[0])?.alpha;
                let g12 = plant_gap(&others[0], &others[1])?.alpha;
                let g02 = plant_gap(&p, &others[1])?.alpha;
                Ok::<_, tvgap_core::Error>((g02 - g01 - g12).max(0.0))
            })()
            .map_err(msg),
        );

        match build_proof_operators(&f) {
            Ok(po) => {
                proof.record(Ok(po.residuals.max()));
                schmidt.record(
                    schmidt_pairs(&po, 3)
                        .map(|pairs| pairs.iter().map(|s| s.residuals.max()).fold(0.0, f64::max))
                        .map_err(msg),
                );
            }
            Err(e) => proof.record(Err(msg(e))),
        }

        synthesis.record(
            optimal_q(&f)
                .and_then(|o| Ok((o.achieved_norm - r_o(&f)?.recip()).abs()))
                .map_err(msg),
        );
    }
    vec![factor, isometry, nehari, dual, completion, triangle, proof, schmidt, synthesis]
}
