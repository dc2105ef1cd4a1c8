//! Exact sample paths of Poisson and fractional Poisson processes, the
//! random-sum representation of the integrated Poisson process, and a small
//! deterministic parallel Monte Carlo driver.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::fpp_dist::FppParams;

/// Generator used by every sampler in the crate.
pub type SimRng = ChaCha8Rng;

/// Jump times of one realisation on `[0, horizon]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountingPath {
    horizon: f64,
    jump_times: Vec<f64>,
}

impl CountingPath {
    /// Checks that the jump times are strictly increasing and lie in `(0, horizon]`.
    pub fn new(horizon: f64, jump_times: Vec<f64>) -> Result<Self> {
        ensure!(horizon > 0.0 && horizon.is_finite(), "horizon must be positive, got {horizon}");
        ensure!(jump_times.iter().all(|&t| t > 0.0 && t <= horizon), "jump times must lie in (0, {horizon}]");
        ensure!(jump_times.windows(2).all(|w| w[0] < w[1]), "jump times must be strictly increasing");
        Ok(Self { horizon, jump_times })
    }

    pub fn empty(horizon: f64) -> Result<Self> {
        Self::new(horizon, Vec::new())
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn jump_times(&self) -> &[f64] {
        &self.jump_times
    }

    /// `N(horizon)`.
    pub fn count(&self) -> usize {
        self.jump_times.len()
    }

    /// `N(t)`, the number of jumps in `(0, t]`.
    pub fn count_at(&self, t: f64) -> usize {
        self.jump_times.partition_point(|&x| x <= t)
    }
}

/// Seed, path budget and worker count of a Monte Carlo run.
///
/// Path `i` is always produced by the same worker and substream for a given
/// `(seed, n_paths, workers)`, so results are bit-identical across runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimConfig {
    pub seed: u64,
    pub n_paths: usize,
    pub workers: usize,
}

impl SimConfig {
    pub fn new(seed: u64, n_paths: usize, workers: usize) -> Result<Self> {
        let c = Self { seed, n_paths, workers };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        ensure!(self.n_paths >= 1, "n_paths must be at least 1");
        ensure!(self.workers >= 1, "workers must be at least 1");
        Ok(())
    }

    /// Substream of worker `index`.
    pub fn worker_rng(&self, index: usize) -> SimRng {
        let mut rng = SimRng::seed_from_u64(self.seed);
        rng.set_stream(index as u64);
        rng
    }

    /// Contiguous share of the paths handled by worker `index`.
    fn share(&self, index: usize) -> usize {
        let base = self.n_paths / self.workers;
        base + usize::from(index < self.n_paths % self.workers)
    }
}

/// Folds `n_paths` draws on `workers` threads, then merges the per-worker
/// accumulators in worker order.
pub fn run_fold<A, I, S, M>(cfg: &SimConfig, init: I, step: S, merge: M) -> Result<A>
where
    A: Send,
    I: Fn() -> A + Sync,
    S: Fn(&mut A, &mut SimRng) -> Result<()> + Sync,
    M: Fn(&mut A, A),
{
    cfg.validate()?;
    let parts: Vec<Result<A>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..cfg.workers)
            .map(|w| {
                let (init, step) = (&init, &step);
                scope.spawn(move || {
                    let mut rng = cfg.worker_rng(w);
                    let mut acc = init();
                    for _ in 0..cfg.share(w) {
                        step(&mut acc, &mut rng)?;
                    }
                    Ok(acc)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("simulation worker panicked")).collect()
    });
    let mut iter = parts.into_iter();
    let mut total = iter.next().expect("at least one worker")?;
    for part in iter {
        merge(&mut total, part?);
    }
    Ok(total)
}

/// Collects one value per path, in path order.
pub fn run_collect<T, F>(cfg: &SimConfig, draw: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut SimRng) -> Result<T> + Sync,
{
    run_fold(
        cfg,
        Vec::new,
        |acc: &mut Vec<T>, rng| {
            acc.push(draw(rng)?);
            Ok(())
        },
        |acc, mut part| acc.append(&mut part),
    )
}

fn open01<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(Open01)
}

/// Homogeneous Poisson path: partial sums of `Exp(λ)` gaps up to `horizon`.
pub fn sample_poisson_path<R: Rng + ?Sized>(lambda: f64, horizon: f64, rng: &mut R) -> Result<CountingPath> {
    ensure!(lambda >= 0.0 && lambda.is_finite(), "lambda must be nonnegative, got {lambda}");
    ensure!(horizon > 0.0 && horizon.is_finite(), "horizon must be positive, got {horizon}");
    let mut jumps = Vec::new();
    if lambda > 0.0 {
        let mut t = 0.0;
        loop {
            t += -open01(rng).ln() / lambda;
            if t > horizon {
                break;
            }
            jumps.push(t);
        }
    }
    Ok(CountingPath { horizon, jump_times: jumps })
}

/// Mittag–Leffler interarrival time with density `λ s^{ν-1} E_{ν,ν}(-λ s^ν)`.
///
/// Uses `T = (-ln U) λ^{-1/ν} W^{1/ν}` with
/// `W = sin(νπ(1-V)) / sin(νπV) = sin(νπ)/tan(νπV) - cos(νπ)`.
pub fn sample_ml_interarrival<R: Rng + ?Sized>(params: &FppParams, rng: &mut R) -> f64 {
    let e = -open01(rng).ln();
    if params.nu == 1.0 {
        return e / params.lambda;
    }
    let nu = params.nu;
    let v = open01(rng);
    let w = (nu * PI * (1.0 - v)).sin() / (nu * PI * v).sin();
    e * (w / params.lambda).powf(1.0 / nu)
}

/// Renewal path with Mittag–Leffler gaps up to `horizon`.
pub fn sample_fpp_path<R: Rng + ?Sized>(params: &FppParams, horizon: f64, rng: &mut R) -> Result<CountingPath> {
    params.validate()?;
    ensure!(horizon > 0.0 && horizon.is_finite(), "horizon must be positive, got {horizon}");
    let mut jumps = Vec::new();
    let mut t = 0.0;
    loop {
        let gap = sample_ml_interarrival(params, rng);
        t += gap;
        if t > horizon {
            break;
        }
        // a gap below the spacing of doubles at t would repeat a jump time
        let last = jumps.last().copied().unwrap_or(0.0);
        if t <= last {
            t = last.next_up();
            if t > horizon {
                break;
            }
        }
        jumps.push(t);
    }
    Ok(CountingPath { horizon, jump_times: jumps })
}

/// Draws a path of `N^ν` on `[0, horizon]` conditioned on `N^ν(horizon) = n`
/// by rejection.
pub fn sample_conditioned_path<R: Rng + ?Sized>(
    params: &FppParams,
    horizon: f64,
    n: usize,
    max_attempts: usize,
    rng: &mut R,
) -> Result<CountingPath> {
    for _ in 0..max_attempts {
        let path = sample_fpp_path(params, horizon, rng)?;
        if path.count() == n {
            return Ok(path);
        }
    }
    Err(Error::NonConvergence { terms: max_attempts, last_rel: f64::NAN })
}

/// `Σ_{j=1}^{N} U_j`, `N ~ Poisson(λT)`, `U_j ~ Uniform(0, T)`.
pub fn random_sum_integral<R: Rng + ?Sized>(lambda: f64, horizon: f64, rng: &mut R) -> Result<f64> {
    let n = poisson_count(lambda * horizon, rng)?;
    Ok((0..n).map(|_| horizon * rng.random::<f64>()).sum())
}

/// `N ~ Poisson(mean)`; `mean = 0` gives 0.
pub fn poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> Result<u64> {
    ensure!(mean >= 0.0 && mean.is_finite(), "Poisson mean must be finite and nonnegative, got {mean}");
    if mean == 0.0 {
        return Ok(0);
    }
    let dist = Poisson::new(mean).map_err(|e| Error::InvalidParam(e.to_string()))?;
    Ok(dist.sample(rng) as u64)
}

/// `∫_0^T N(s) ds` via `A_n = Σ_{j=2}^n (τ_j - τ_{j-1})(j-1) + n(T - τ_n)`.
///
/// In debug builds the value is checked against `Σ_j (T - τ_j)`.
pub fn path_integral(path: &CountingPath) -> f64 {
    let tau = path.jump_times();
    let n = tau.len();
    if n == 0 {
        return 0.0;
    }
    let mut a = 0.0;
    for j in 1..n {
        a += (tau[j] - tau[j - 1]) * j as f64;
    }
    a += n as f64 * (path.horizon - tau[n - 1]);
    debug_assert!({
        let b = path_integral_by_sum(path);
        (a - b).abs() <= 1e-9 * (1.0 + b.abs())
    });
    a
}

/// `∫_0^T N(s) ds = Σ_j (T - τ_j)`.
pub fn path_integral_by_sum(path: &CountingPath) -> f64 {
    path.jump_times().iter().map(|&t| path.horizon - t).sum()
}

/// `φ̂(μ) = (1/n) Σ_j e^{iμ x_j}` on each grid point.
pub fn empirical_cf(samples: &[f64], mu_grid: &[f64]) -> Result<Vec<Complex64>> {
    if samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    let n = samples.len() as f64;
    Ok(mu_grid
        .iter()
        .map(|&mu| {
            let (re, im) = samples.iter().fold((0.0, 0.0), |(re, im), &x| {
                let (s, c) = (mu * x).sin_cos();
                (re + c, im + s)
            });
            Complex64::new(re / n, im / n)
        })
        .collect())
}

/// Closed form `exp(-λT + (λ/(iμ))(e^{iμT} - 1))` of the integrated Poisson
/// characteristic function.
pub fn integral_cf(lambda: f64, horizon: f64, mu: f64) -> Complex64 {
    crate::skellam::integral_diff_cf_unchecked(lambda, 0.0, horizon, mu)
}
