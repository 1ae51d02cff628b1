//! Particle-swarm search over Fourier boundary shapes.
//!
//! Particles live in the space of cosine/sine coefficients with `a0 = 1`
//! held fixed (the functionals are dilation invariant, so `a0` carries no
//! information). Infeasible positions are projected back: coefficients are
//! clipped to the box and, when their absolute sum reaches `a0`, shrunk
//! uniformly to [`REPAIR_FILL`] of it.

use std::path::Path;

use log::{info, warn};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{fourier_curve, ShapeVector, FOURIER_COEFF_BOUND};
use crate::io::{fmt17, write_json};
use crate::spectral_geometry::{evaluate_functional, FunctionalSpec, SolverSetup};

/// Largest admissible `Σ|a_j| + |b_j|` after repair, as a fraction of `a0`.
pub const REPAIR_FILL: f64 = 0.9;

/// Objective value assigned to sentinels and failed solves, with the sign
/// that makes it the worst possible value.
pub const PENALTY: f64 = 1e6;

/// Search resolution.
pub const SEARCH_N: usize = 256;
/// Resolution of the final re-evaluation.
pub const REFINE_N: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Max,
    Min,
}

impl Direction {
    /// Maps an objective value to a fitness that is always maximized.
    fn fitness(self, v: f64) -> f64 {
        match self {
            Direction::Max => v,
            Direction::Min => -v,
        }
    }

    fn penalty(self) -> f64 {
        match self {
            Direction::Max => -PENALTY,
            Direction::Min => PENALTY,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Objective {
    pub spec: FunctionalSpec,
    pub direction: Direction,
}

/// Swarm hyperparameters and problem definition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwarmConfig {
    pub particles: usize,
    pub iterations: usize,
    /// Inertia at the first and last iteration, interpolated linearly.
    pub inertia: (f64, f64),
    pub cognitive: f64,
    pub social: f64,
    pub n_modes: usize,
    pub seed: u64,
    pub objective: Objective,
    pub mu: f64,
    /// Largest per-iteration step of any coefficient.
    pub max_velocity: f64,
    pub search: SolverSetup,
    pub refine: Option<SolverSetup>,
}

impl SwarmConfig {
    /// Defaults for maximizing `F_k` at `mu`.
    pub fn maximize_f(k: usize, mu: f64) -> Result<Self> {
        Ok(SwarmConfig {
            particles: 40,
            iterations: 100,
            inertia: (0.9, 0.4),
            cognitive: 1.5,
            social: 1.5,
            n_modes: 4,
            seed: 0,
            objective: Objective { spec: FunctionalSpec::f(k)?, direction: Direction::Max },
            mu,
            max_velocity: 0.5 * FOURIER_COEFF_BOUND,
            search: SolverSetup::new(SEARCH_N, 6),
            refine: Some(SolverSetup::new(REFINE_N, 6)),
        })
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.particles < 8 {
            return bad(format!("swarm needs at least 8 particles, got {}", self.particles));
        }
        if self.iterations < 20 {
            return bad(format!("swarm needs at least 20 iterations, got {}", self.iterations));
        }
        if ![2, 4, 6, 8].contains(&self.n_modes) {
            return bad(format!("n_modes must be one of 2, 4, 6, 8, got {}", self.n_modes));
        }
        if !(self.mu.is_finite() && self.mu >= 0.0) {
            return bad(format!("wavenumber must be finite and ≥ 0, got {}", self.mu));
        }
        let (w0, w1) = self.inertia;
        let coeffs = [w0, w1, self.cognitive, self.social];
        if coeffs.iter().any(|c| !c.is_finite() || *c < 0.0) {
            return bad("inertia, cognitive and social weights must be finite and ≥ 0".into());
        }
        if !(self.max_velocity > 0.0 && self.max_velocity.is_finite()) {
            return bad(format!("max_velocity must be positive, got {}", self.max_velocity));
        }
        Ok(())
    }

    fn inertia_at(&self, it: usize) -> f64 {
        let (w0, w1) = self.inertia;
        if self.iterations <= 1 {
            return w0;
        }
        w0 + (w1 - w0) * it as f64 / (self.iterations - 1) as f64
    }
}

/// Projects a coefficient vector `[a_1..a_n, b_1..b_n]` onto the feasible
/// set with `a0 = 1`.
pub fn repair(x: &mut [f64]) {
    for c in x.iter_mut() {
        *c = if c.is_finite() { c.clamp(-FOURIER_COEFF_BOUND, FOURIER_COEFF_BOUND) } else { 0.0 };
    }
    let sum: f64 = x.iter().map(|c| c.abs()).sum();
    if sum > REPAIR_FILL {
        let f = REPAIR_FILL / sum;
        for c in x.iter_mut() {
            *c *= f;
        }
    }
}

fn to_shape(x: &[f64]) -> ShapeVector {
    let n = x.len() / 2;
    ShapeVector { a0: 1.0, a: x[..n].to_vec(), b: x[n..].to_vec() }
}

/// Functional value of a Fourier shape for optimization. Sentinels and
/// solver failures become the direction's [`PENALTY`].
pub fn objective_eval(shape: &ShapeVector, objective: &Objective, mu: f64, setup: &SolverSetup) -> Result<f64> {
    shape.validate()?;
    let curve = fourier_curve(shape)?;
    match evaluate_functional(&objective.spec, &curve, mu, setup) {
        Ok(v) => Ok(v),
        Err(e @ (Error::InvalidParameter(_) | Error::InvalidShape(_))) => Err(e),
        Err(e) => {
            warn!("objective evaluation failed, using penalty: {e}");
            Ok(objective.direction.penalty())
        }
    }
}

/// Outcome of a swarm run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizeResult {
    pub config: SwarmConfig,
    pub seed: u64,
    /// Best objective value after each iteration; entry 0 is the initial
    /// swarm.
    pub history: Vec<f64>,
    pub best_shape: ShapeVector,
    pub best_value: f64,
    /// `best_shape` re-evaluated at the refinement resolution.
    #[serde(with = "crate::io::ext_real_opt")]
    pub refined_value: Option<f64>,
    pub evaluations: usize,
}

impl OptimizeResult {
    pub fn write_json(&self, path: &Path) -> Result<()> {
        write_json(path, self)
    }

    /// Per-iteration best values as CSV.
    pub fn write_history_csv(&self, path: &Path) -> Result<()> {
        let rows: Vec<Vec<String>> =
            self.history.iter().enumerate().map(|(i, v)| vec![i.to_string(), fmt17(*v)]).collect();
        crate::io::write_csv(path, &["iteration", "best_value"], &rows)
    }
}

/// Global-best particle swarm. Random draws happen serially from one
/// ChaCha stream and evaluations are reduced in particle order, so a seed
/// fixes the whole run regardless of thread count.
pub fn optimize_shape(config: &SwarmConfig) -> Result<OptimizeResult> {
    config.validate()?;
    let dim = 2 * config.n_modes;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let vmax = config.max_velocity;
    let mut pos: Vec<Vec<f64>> = (0..config.particles)
        .map(|_| {
            let mut x: Vec<f64> =
                (0..dim).map(|_| rng.gen_range(-FOURIER_COEFF_BOUND..=FOURIER_COEFF_BOUND)).collect();
            repair(&mut x);
            x
        })
        .collect();
    let mut vel: Vec<Vec<f64>> =
        (0..config.particles).map(|_| (0..dim).map(|_| rng.gen_range(-vmax..=vmax)).collect()).collect();

    let dir = config.objective.direction;
    let evaluate = |xs: &[Vec<f64>]| -> Result<Vec<f64>> {
        let vals = xs
            .par_iter()
            .map(|x| objective_eval(&to_shape(x), &config.objective, config.mu, &config.search))
            .collect::<Vec<_>>();
        if vals.iter().all(|v| v.is_err()) {
            return Err(Error::InvalidParameter(
                "every particle is infeasible after repair; check the swarm configuration".into(),
            ));
        }
        Ok(vals.into_iter().map(|v| v.unwrap_or(dir.penalty())).collect())
    };

    let mut vals = evaluate(&pos)?;
    let mut evaluations = pos.len();
    let mut pbest = pos.clone();
    let mut pbest_val = vals.clone();
    let mut g = 0;
    for i in 1..vals.len() {
        if dir.fitness(vals[i]) > dir.fitness(vals[g]) {
            g = i;
        }
    }
    let mut gbest = pos[g].clone();
    let mut gbest_val = vals[g];
    let mut history = vec![gbest_val];

    for it in 0..config.iterations {
        let w = config.inertia_at(it);
        for (i, (x, v)) in pos.iter_mut().zip(vel.iter_mut()).enumerate() {
            for d in 0..dim {
                let r1: f64 = rng.gen();
                let r2: f64 = rng.gen();
                let nv = w * v[d]
                    + config.cognitive * r1 * (pbest[i][d] - x[d])
                    + config.social * r2 * (gbest[d] - x[d]);
                v[d] = nv.clamp(-vmax, vmax);
                x[d] += v[d];
            }
            repair(x);
        }
        vals = evaluate(&pos)?;
        evaluations += pos.len();
        for i in 0..pos.len() {
            if dir.fitness(vals[i]) > dir.fitness(pbest_val[i]) {
                pbest_val[i] = vals[i];
                pbest[i].clone_from(&pos[i]);
            }
            if dir.fitness(vals[i]) > dir.fitness(gbest_val) {
                gbest_val = vals[i];
                gbest.clone_from(&pos[i]);
            }
        }
        history.push(gbest_val);
        info!("iteration {}: best {gbest_val:.12}", it + 1);
    }

    let best_shape = to_shape(&gbest);
    let refined_value = match &config.refine {
        Some(setup) => Some(objective_eval(&best_shape, &config.objective, config.mu, setup)?),
        None => None,
    };
    Ok(OptimizeResult {
        config: config.clone(),
        seed: config.seed,
        history,
        best_shape,
        best_value: gbest_val,
        refined_value,
        evaluations,
    })
}

/// Resolves an objective name such as `F2` or `G3`.
pub fn parse_objective(name: &str, direction: Direction) -> Result<Objective> {
    let bad = || Error::InvalidParameter(format!("unknown objective `{name}`; expected F<k> or G<k>"));
    let mut chars = name.chars();
    let family = chars.next().ok_or_else(bad)?;
    let k: usize = chars.as_str().parse().map_err(|_| bad())?;
    let spec = match family {
        'F' | 'f' => FunctionalSpec::f(k)?,
        'G' | 'g' => FunctionalSpec::g(k)?,
        _ => return Err(bad()),
    };
    Ok(Objective { spec, direction })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(seed: u64) -> SwarmConfig {
        SwarmConfig {
            particles: 8,
            iterations: 20,
            seed,
            n_modes: 2,
            search: SolverSetup::new(64, 6),
            refine: Some(SolverSetup::new(96, 6)),
            ..SwarmConfig::maximize_f(2, std::f64::consts::PI).unwrap()
        }
    }

    #[test]
    fn repair_projects_onto_feasible_set() {
        let mut x = vec![0.5, -0.3, 0.1, 0.1, -0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1];
        repair(&mut x);
        assert!(x.iter().all(|c| c.abs() <= FOURIER_COEFF_BOUND));
        to_shape(&x).validate().unwrap();
        assert!((x.iter().map(|c| c.abs()).sum::<f64>() - REPAIR_FILL).abs() < 1e-12);
        let mut y = vec![f64::NAN, 0.05];
        repair(&mut y);
        assert_eq!(y, vec![0.0, 0.05]);
    }

    #[test]
    fn config_validation() {
        assert!(small(0).validate().is_ok());
        assert!(SwarmConfig { particles: 7, ..small(0) }.validate().is_err());
        assert!(SwarmConfig { iterations: 19, ..small(0) }.validate().is_err());
        assert!(SwarmConfig { n_modes: 3, ..small(0) }.validate().is_err());
    }

    #[test]
    fn disk_objective_and_scale_invariance() {
        let obj = parse_objective("F2", Direction::Max).unwrap();
        let setup = SolverSetup::new(96, 6);
        let pi = std::f64::consts::PI;
        let v = objective_eval(&ShapeVector::disk(1.0, 4), &obj, pi, &setup).unwrap();
        assert!((v - 0.541834100559795).abs() < 1e-10, "{v}");
        let s = ShapeVector { a0: 1.0, a: vec![0.05, -0.02], b: vec![0.03, 0.0] };
        let s2 = ShapeVector { a0: 2.0, a: s.a.iter().map(|c| 2.0 * c).collect(), b: s.b.iter().map(|c| 2.0 * c).collect() };
        let p1 = objective_eval(&s, &obj, pi, &setup).unwrap();
        let p2 = objective_eval(&s2, &obj, pi, &setup).unwrap();
        assert!((p1 - p2).abs() < 1e-8, "{p1} vs {p2}");
        assert!(p1 < v, "perturbed shape {p1} should not beat the disk {v}");
    }

    #[test]
    fn objective_names() {
        assert_eq!(parse_objective("G3", Direction::Min).unwrap().spec, FunctionalSpec::g(3).unwrap());
        assert!(parse_objective("H2", Direction::Max).is_err());
        assert!(parse_objective("F", Direction::Max).is_err());
        assert!(parse_objective("F0", Direction::Max).is_err());
    }

    #[test]
    fn swarm_is_deterministic_and_monotone() {
        let a = optimize_shape(&small(11)).unwrap();
        let b = optimize_shape(&small(11)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.history.len(), 21);
        assert!(a.history.windows(2).all(|w| w[1] >= w[0]));
        a.best_shape.validate().unwrap();
        assert!(a.refined_value.is_some());
        let text = crate::io::to_json(&a).unwrap();
        let back: OptimizeResult = serde_json::from_str(&text).unwrap();
        assert_eq!(back, a);
    }
}
