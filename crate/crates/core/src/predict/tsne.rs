//! Exact (O(N²)) t-SNE.
//!
//! Each point's Gaussian bandwidth is found by bisection on the precision so
//! that the conditional distribution's entropy matches `ln(perplexity)`. The
//! symmetrized affinities are matched by a 2-D Student-t kernel via gradient
//! descent with momentum, per-coordinate adaptive gains and an early
//! exaggeration phase.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::stats::squared_distance;

const ENTROPY_TOLERANCE: f64 = 1e-6;
const MAX_BISECTION_STEPS: usize = 200;
const INITIAL_MOMENTUM: f64 = 0.5;
const FINAL_MOMENTUM: f64 = 0.8;
const MIN_GAIN: f64 = 0.01;
const INIT_STD: f64 = 1e-4;
const KL_EVERY: usize = 50;
const KL_TAIL: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TsneConfig {
    pub perplexity: f64,
    pub iterations: usize,
    pub learning_rate: f64,
    pub exaggeration_factor: f64,
    pub exaggeration_iters: usize,
    pub seed: u64,
}

impl Default for TsneConfig {
    fn default() -> Self {
        Self {
            perplexity: 30.0,
            iterations: 1000,
            learning_rate: 200.0,
            exaggeration_factor: 12.0,
            exaggeration_iters: 250,
            seed: 0,
        }
    }
}

impl TsneConfig {
    /// Largest admissible perplexity for `n` points (exclusive bound).
    pub fn max_perplexity(n: usize) -> f64 {
        (n as f64 - 1.0) / 3.0
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        let bad = |m: String| Err(Error::Config(format!("t-SNE: {m}")));
        if n < 4 {
            return bad(format!("need at least 4 points, got {n}"));
        }
        if !(self.perplexity > 1.0) || !(self.perplexity < Self::max_perplexity(n)) {
            return bad(format!(
                "perplexity {} infeasible for {n} points (must be in (1, {}))",
                self.perplexity,
                Self::max_perplexity(n)
            ));
        }
        if self.iterations <= self.exaggeration_iters {
            return bad("iterations must exceed exaggeration_iters".into());
        }
        if !(self.learning_rate > 0.0) || !(self.exaggeration_factor > 0.0) {
            return bad("learning rate and exaggeration must be positive".into());
        }
        Ok(())
    }

    /// Copy with the perplexity pulled below the feasibility bound for `n`.
    pub fn clamped_for(&self, n: usize) -> Self {
        let cap = Self::max_perplexity(n) * 0.99;
        Self {
            perplexity: self.perplexity.min(cap),
            ..self.clone()
        }
    }
}

/// Bandwidth calibration for one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Scalar")]
pub struct Calibration<F = f64> {
    /// Precision `1 / (2σ²)`.
    pub beta: F,
    /// Achieved entropy (nats) of the conditional distribution.
    pub entropy: F,
    /// `|entropy − ln(perplexity)|`.
    pub entropy_error: F,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Scalar")]
pub struct TsneResult<F = f64> {
    pub embedding: Vec<[F; 2]>,
    pub calibration: Vec<Calibration<F>>,
    /// `(iteration, KL(P‖Q))` against the unexaggerated affinities. Recorded
    /// at the end of exaggeration, every 50 iterations, and at every one of
    /// the final 100 iterations.
    pub kl_trace: Vec<(usize, F)>,
}

impl<F: Scalar> TsneResult<F> {
    pub fn kl_at(&self, iteration: usize) -> Option<F> {
        self.kl_trace.iter().find(|(i, _)| *i == iteration).map(|&(_, v)| v)
    }

    pub fn final_kl(&self) -> Option<F> {
        self.kl_trace.last().map(|&(_, v)| v)
    }
}

fn pairwise_squared_distances<F: Scalar>(data: &[Vec<F>]) -> Vec<F> {
    let n = data.len();
    let mut d = vec![F::zero(); n * n];
    d.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
        for (j, out) in row.iter_mut().enumerate() {
            if i != j {
                *out = squared_distance(&data[i], &data[j]);
            }
        }
    });
    d
}

/// Conditional affinities `p_{j|i}` for one row, written into `out`.
/// Returns the entropy in nats.
fn conditional_row<F: Scalar>(dist: &[F], i: usize, beta: F, out: &mut [F]) -> F {
    // shift by the nearest neighbour's distance for numerical range
    let min = dist
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, &d)| d)
        .fold(F::infinity(), F::min);
    let mut sum = F::zero();
    for (j, (o, &d)) in out.iter_mut().zip(dist).enumerate() {
        *o = if j == i { F::zero() } else { (-(d - min) * beta).exp() };
        sum += *o;
    }
    let mut weighted = F::zero();
    for (j, (o, &d)) in out.iter_mut().zip(dist).enumerate() {
        *o /= sum;
        if j != i {
            weighted += (d - min) * *o;
        }
    }
    sum.ln() + beta * weighted
}

fn calibrate_row<F: Scalar>(dist: &[F], i: usize, target: F, out: &mut [F]) -> Calibration<F> {
    let tol = F::lit(ENTROPY_TOLERANCE);
    let two = F::lit(2.0);
    let mut beta = F::one();
    let mut lo = F::zero();
    let mut hi = F::infinity();
    let mut entropy = conditional_row(dist, i, beta, out);
    for _ in 0..MAX_BISECTION_STEPS {
        let diff = entropy - target;
        if diff.abs() < tol {
            break;
        }
        // entropy falls as the precision grows
        if diff > F::zero() {
            lo = beta;
            beta = if hi.is_infinite() { beta * two } else { (beta + hi) / two };
        } else {
            hi = beta;
            beta = (beta + lo) / two;
        }
        entropy = conditional_row(dist, i, beta, out);
    }
    Calibration {
        beta,
        entropy,
        entropy_error: (entropy - target).abs(),
    }
}

/// Index of the first row equal to each row.
fn first_occurrence<F: Scalar>(data: &[Vec<F>]) -> Vec<usize> {
    (0..data.len())
        .map(|i| (0..i).find(|&j| data[j] == data[i]).unwrap_or(i))
        .collect()
}

/// Symmetrized joint affinities (row-major N×N) and per-point calibration.
pub fn joint_affinities<F: Scalar>(data: &[Vec<F>], perplexity: F) -> (Vec<F>, Vec<Calibration<F>>) {
    let n = data.len();
    let dist = pairwise_squared_distances(data);
    let target = perplexity.ln();
    let mut cond = vec![F::zero(); n * n];
    let calibration: Vec<Calibration<F>> = cond
        .par_chunks_mut(n)
        .enumerate()
        .map(|(i, row)| calibrate_row(&dist[i * n..(i + 1) * n], i, target, row))
        .collect();
    let mut calibration = calibration;
    for (i, &r) in first_occurrence(data).iter().enumerate() {
        if r != i {
            // bit-identical rows for identical points
            let mut row = cond[r * n..(r + 1) * n].to_vec();
            row.swap(r, i);
            cond[i * n..(i + 1) * n].copy_from_slice(&row);
            calibration[i] = calibration[r];
        }
    }
    let floor = F::lit(1e-12);
    let denom = F::lit(2.0) * F::from_count(n);
    let mut p = vec![F::zero(); n * n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                p[i * n + j] = ((cond[i * n + j] + cond[j * n + i]) / denom).max(floor);
            }
        }
    }
    (p, calibration)
}

/// Student-t numerators `1 / (1 + |y_i − y_j|²)` and their total.
fn low_dim_kernel<F: Scalar>(y: &[[F; 2]]) -> (Vec<F>, F) {
    let n = y.len();
    let mut num = vec![F::zero(); n * n];
    let row_sums: Vec<F> = num
        .par_chunks_mut(n)
        .enumerate()
        .map(|(i, row)| {
            let mut s = F::zero();
            for (j, out) in row.iter_mut().enumerate() {
                if i != j {
                    let dx = y[i][0] - y[j][0];
                    let dy = y[i][1] - y[j][1];
                    *out = F::one() / (F::one() + dx * dx + dy * dy);
                    s += *out;
                }
            }
            s
        })
        .collect();
    let z = row_sums.into_iter().fold(F::zero(), |a, b| a + b);
    (num, z)
}

fn kl_divergence<F: Scalar>(p: &[F], num: &[F], z: F) -> F {
    let n2 = p.len();
    let n = (n2 as f64).sqrt() as usize;
    let floor = F::lit(1e-12);
    let mut kl = F::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let pij = p[i * n + j];
                let qij = (num[i * n + j] / z).max(floor);
                kl += pij * (pij / qij).ln();
            }
        }
    }
    kl
}

/// Embeds `data` (rows of equal length) into two dimensions.
pub fn tsne<F: Scalar>(data: &[Vec<F>], config: &TsneConfig) -> Result<TsneResult<F>> {
    let n = data.len();
    config.validate(n)?;
    if let Some(w) = data.iter().map(Vec::len).find(|&w| w != data[0].len()) {
        return Err(Error::LengthMismatch {
            left: data[0].len(),
            right: w,
        });
    }
    let (p, calibration) = joint_affinities(data, F::lit(config.perplexity));

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let normal = Normal::new(0.0, INIT_STD).expect("valid normal");
    let mut y: Vec<[F; 2]> = (0..n)
        .map(|_| [F::lit(normal.sample(&mut rng)), F::lit(normal.sample(&mut rng))])
        .collect();
    // identical inputs start together and so receive identical gradients
    for (i, &r) in first_occurrence(data).iter().enumerate() {
        y[i] = y[r];
    }
    let mut update = vec![[F::zero(); 2]; n];
    let mut gains = vec![[F::one(); 2]; n];

    let eta = F::lit(config.learning_rate);
    let min_gain = F::lit(MIN_GAIN);
    let four = F::lit(4.0);
    let mut kl_trace = Vec::new();

    for iter in 0..config.iterations {
        let exaggerating = iter < config.exaggeration_iters;
        let exaggeration = if exaggerating { F::lit(config.exaggeration_factor) } else { F::one() };
        let momentum = F::lit(if exaggerating { INITIAL_MOMENTUM } else { FINAL_MOMENTUM });

        let (num, z) = low_dim_kernel(&y);
        let grad: Vec<[F; 2]> = (0..n)
            .into_par_iter()
            .map(|i| {
                let mut g = [F::zero(); 2];
                for j in 0..n {
                    if i == j {
                        continue;
                    }
                    let w = num[i * n + j];
                    let coeff = (exaggeration * p[i * n + j] - w / z) * w;
                    g[0] += coeff * (y[i][0] - y[j][0]);
                    g[1] += coeff * (y[i][1] - y[j][1]);
                }
                [four * g[0], four * g[1]]
            })
            .collect();

        for i in 0..n {
            for c in 0..2 {
                let same_sign = (grad[i][c] > F::zero()) == (update[i][c] > F::zero());
                gains[i][c] = if same_sign {
                    gains[i][c] * F::lit(0.8)
                } else {
                    gains[i][c] + F::lit(0.2)
                }
                .max(min_gain);
                update[i][c] = momentum * update[i][c] - eta * gains[i][c] * grad[i][c];
                y[i][c] += update[i][c];
            }
        }
        let mean = [0, 1].map(|c| y.iter().map(|p| p[c]).fold(F::zero(), |a, b| a + b) / F::from_count(n));
        for p in y.iter_mut() {
            p[0] -= mean[0];
            p[1] -= mean[1];
        }

        // iteration index counts completed updates
        let done = iter + 1;
        let record = done == config.exaggeration_iters
            || done % KL_EVERY == 0
            || done + KL_TAIL >= config.iterations;
        if record && done >= config.exaggeration_iters {
            let (num, z) = low_dim_kernel(&y);
            kl_trace.push((done, kl_divergence(&p, &num, z)));
        }
    }

    Ok(TsneResult {
        embedding: y,
        calibration,
        kl_trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        let cfg = TsneConfig::default();
        assert!(cfg.validate(3).is_err());
        assert!(cfg.validate(50).is_err());
        assert!(cfg.validate(100).is_ok());
        assert!(cfg.clamped_for(50).validate(50).is_ok());
        assert!(TsneConfig { perplexity: 1.0, ..cfg.clone() }.validate(100).is_err());
        assert!(TsneConfig { iterations: 100, ..cfg }.validate(100).is_err());
    }

    #[test]
    fn calibration_hits_target_entropy() {
        let data: Vec<Vec<f64>> = (0..60)
            .map(|i| {
                let x = i as f64;
                vec![(x * 0.37).sin(), (x * 0.11).cos(), x / 60.0]
            })
            .collect();
        let (p, cal) = joint_affinities(&data, 10.0);
        for c in &cal {
            assert!(c.entropy_error <= 1e-4, "{c:?}");
        }
        let total: f64 = p.iter().sum();
        assert!((total - 1.0).abs() < 1e-6);
        for i in 0..60 {
            for j in 0..60 {
                assert_eq!(p[i * 60 + j], p[j * 60 + i]);
            }
        }
    }
}
