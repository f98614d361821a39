use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::gpa::Morphism;

use super::{Part, PolySystem, SolverError};

#[derive(Clone, Debug)]
pub struct SolveConfig {
    pub restarts: usize,
    /// Success when the largest absolute residual is below this.
    pub tol: f64,
    pub seed: u64,
    pub max_iter: usize,
    /// Radius of the disk random initial entries are drawn from.
    pub init_radius: f64,
    pub init: Init,
}

/// Starting points for restarts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Init {
    /// Every free entry uniform in the disk of radius `init_radius`.
    Disk,
    /// Each block `(a, c)` is `[2]` times a random orthogonal projection of
    /// rank equal to the number of edges `c -> a`.
    Projection,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig { restarts: 100, tol: 1e-10, seed: 0, max_iter: 400, init_radius: 1.9318516525781366, init: Init::Projection }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RestartLog {
    pub restart: usize,
    pub seed: u64,
    pub residual: f64,
    pub iterations: usize,
}

#[derive(Clone, Debug)]
pub struct SolveOutcome {
    pub x: Vec<f64>,
    pub u: Morphism<Complex64>,
    pub residual: f64,
    pub restart: usize,
    pub log: Vec<RestartLog>,
}

/// Per-restart seeds drawn from the master seed.
pub fn restart_seeds(seed: u64, n: usize) -> Vec<u64> {
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| master.next_u64()).collect()
}

fn initial_point(sys: &PolySystem, seed: u64, cfg: &SolveConfig) -> Vec<f64> {
    match cfg.init {
        Init::Disk => disk_point(sys, seed, cfg.init_radius),
        Init::Projection => projection_point(sys, seed),
    }
}

fn projection_point(sys: &PolySystem, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = &sys.graph;
    let q2 = cfg_q2();
    let mut entries = std::collections::BTreeMap::new();
    for ((a, c), paths) in g.paths_by_ends(&"++".parse().expect("sign string")) {
        let n = paths.len();
        let r = g.edges_between(c, a).len().min(n);
        if r == 0 {
            continue;
        }
        let m = DMatrix::<Complex64>::from_fn(n, r, |_, _| Complex64::new(gauss(&mut rng), gauss(&mut rng)));
        let q = m.qr().q();
        let p = &q * q.adjoint();
        for (i, pi) in paths.iter().enumerate() {
            for (j, pj) in paths.iter().enumerate() {
                // operator convention: entry (i, j) is the pair (source j, target i)
                entries.insert((pj.clone(), pi.clone()), p[(i, j)] * q2);
            }
        }
    }
    let u = Morphism { source: "++".parse().expect("sign string"), target: "++".parse().expect("sign string"), entries };
    sys.encode(&u)
}

fn cfg_q2() -> f64 {
    (std::f64::consts::PI / 6.0).sin() / (std::f64::consts::PI / 12.0).sin()
}

fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    // Box–Muller
    let u1: f64 = rng.gen::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

fn disk_point(sys: &PolySystem, seed: u64, radius: f64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = vec![0.0; sys.var_count()];
    let mut k = 0;
    while k < x.len() {
        if sys.vars[k].part == Part::Re && sys.vars.get(k + 1).is_some_and(|v| v.part == Part::Im) {
            // uniform in the disk
            let r = radius * rng.gen::<f64>().sqrt();
            let t = std::f64::consts::TAU * rng.gen::<f64>();
            x[k] = r * t.cos();
            x[k + 1] = r * t.sin();
            k += 2;
        } else {
            x[k] = radius * (2.0 * rng.gen::<f64>() - 1.0);
            k += 1;
        }
    }
    x
}

/// Residuals and the normal equations `JᵀJ`, `Jᵀr`, built row by row.
fn normal_equations(sys: &PolySystem, x: &[f64]) -> (f64, f64, DMatrix<f64>, DVector<f64>) {
    let n = x.len();
    let mut jtj = DMatrix::<f64>::zeros(n, n);
    let mut jtr = DVector::<f64>::zeros(n);
    let mut cost = 0.0;
    let mut worst = 0f64;
    let mut row: Vec<(usize, f64)> = Vec::new();
    for eq in &sys.equations {
        row.clear();
        let mut r = 0.0;
        for (m, c) in &eq.terms {
            let vs: Vec<usize> = m.vars().map(|v| v as usize).collect();
            r += vs.iter().fold(*c, |acc, &v| acc * x[v]);
            for j in 0..vs.len() {
                let d = vs.iter().enumerate().filter(|&(k, _)| k != j).fold(*c, |acc, (_, &v)| acc * x[v]);
                row.push((vs[j], d));
            }
        }
        row.sort_unstable_by_key(|e| e.0);
        row.dedup_by(|b, a| {
            if a.0 == b.0 {
                a.1 += b.1;
                true
            } else {
                false
            }
        });
        cost += r * r;
        worst = worst.max(r.abs());
        for &(a, da) in &row {
            jtr[a] += da * r;
            for &(b, db) in &row {
                jtj[(a, b)] += da * db;
            }
        }
    }
    (0.5 * cost, worst, jtj, jtr)
}

fn cost_at(sys: &PolySystem, x: &[f64]) -> f64 {
    0.5 * sys.residuals(x).iter().map(|r| r * r).sum::<f64>()
}

/// Damped Gauss–Newton from `x`; returns the final point, max residual and
/// iteration count.
pub fn levenberg_marquardt(sys: &PolySystem, mut x: Vec<f64>, tol: f64, max_iter: usize) -> (Vec<f64>, f64, usize) {
    let n = x.len();
    let (mut cost, mut worst, mut jtj, mut jtr) = normal_equations(sys, &x);
    let mut mu = 1e-3 * (0..n).map(|i| jtj[(i, i)]).fold(0.0, f64::max).max(1e-12);
    let mut nu = 2.0;
    for it in 0..max_iter {
        if worst < tol {
            return (x, worst, it);
        }
        let mut a = jtj.clone();
        for i in 0..n {
            a[(i, i)] += mu;
        }
        let step = match a.cholesky() {
            Some(ch) => ch.solve(&(-&jtr)),
            None => {
                mu *= nu;
                nu *= 2.0;
                continue;
            }
        };
        let trial: Vec<f64> = x.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
        let new_cost = cost_at(sys, &trial);
        // predicted decrease of the local quadratic model
        let pred = 0.5 * step.dot(&(step.scale(mu) - &jtr));
        let rho = if pred > 0.0 { (cost - new_cost) / pred } else { -1.0 };
        if rho > 0.0 {
            x = trial;
            (cost, worst, jtj, jtr) = normal_equations(sys, &x);
            mu *= (1.0 - (2.0 * rho - 1.0).powi(3)).max(1.0 / 3.0);
            nu = 2.0;
        } else {
            mu *= nu;
            nu *= 2.0;
        }
        if !mu.is_finite() || mu > 1e20 {
            break;
        }
    }
    (x, worst, max_iter)
}

/// Random restarts until one converges; the lowest-index success wins, so
/// the outcome does not depend on thread scheduling.
pub fn solve_numeric(sys: &PolySystem, cfg: &SolveConfig) -> Result<SolveOutcome, SolverError> {
    let seeds = restart_seeds(cfg.seed, cfg.restarts);
    let batch = rayon::current_num_threads().max(1);
    let mut log = Vec::new();
    for chunk_start in (0..cfg.restarts).step_by(batch) {
        let end = (chunk_start + batch).min(cfg.restarts);
        let runs: Vec<(usize, Vec<f64>, f64, usize)> = (chunk_start..end)
            .into_par_iter()
            .map(|k| {
                let x0 = initial_point(sys, seeds[k], cfg);
                let (x, res, it) = levenberg_marquardt(sys, x0, cfg.tol, cfg.max_iter);
                (k, x, res, it)
            })
            .collect();
        for (k, x, res, it) in runs {
            log.push(RestartLog { restart: k, seed: seeds[k], residual: res, iterations: it });
            if res < cfg.tol {
                let u = sys.decode(&x)?;
                return Ok(SolveOutcome { x, u, residual: res, restart: k, log });
            }
        }
    }
    let best = log.iter().map(|l| l.residual).fold(f64::INFINITY, f64::min);
    Err(SolverError::NoConvergence { restarts: cfg.restarts, best, log })
}
