//! Particle simulations of skew and snapping-out Brownian motion, used as an
//! independent check of the semigroup values `E f(X_t)`.
//!
//! Both processes have generator `f ↦ f″`, so a walk with spatial step `Δ`
//! advances time by `Δ²/2` per step. The lattice step is shrunk slightly
//! from `√(2·dt)` so that the starting point is a lattice site.
//!
//! * Skew walk: symmetric away from 0; from 0 it steps right with
//!   probability `α/(α+β)`.
//! * Snapping walk: a reflected walk on each half-line. At the boundary site
//!   of the right half-line the particle switches to the left boundary with
//!   probability `βΔ` (with `αΔ` from the left), which spends the step;
//!   otherwise it moves one site into its half-line. `Δ` is the local-time
//!   increment of one boundary visit.
//!
//! Paths are split into fixed-size chunks, each driven by its own ChaCha8
//! stream derived from the master seed, so results do not depend on the
//! number of worker threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function_space::{LineFn, MembraneParams, SharpFn};

/// Paths per random stream.
const CHUNK: u64 = 4096;

/// Side of the membrane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathConfig {
    pub n_paths: u64,
    /// nominal time step; the spatial step is `√(2·dt)` before rescaling
    pub dt: f64,
    pub seed: u64,
    pub x0: f64,
    /// required for the snapping walk when `x0 = 0`
    pub side: Option<Side>,
    /// pair each path with the one driven by `1 − u`
    pub antithetic: bool,
}

impl PathConfig {
    pub fn new(n_paths: u64, dt: f64, seed: u64, x0: f64) -> Self {
        Self {
            n_paths,
            dt,
            seed,
            x0,
            side: None,
            antithetic: false,
        }
    }

    pub fn with_side(mut self, side: Side) -> Self {
        self.side = Some(side);
        self
    }

    pub fn with_antithetic(mut self, on: bool) -> Self {
        self.antithetic = on;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.n_paths == 0 {
            return Err(Error::Config("n_paths must be at least 1".into()));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Config(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if !self.x0.is_finite() {
            return Err(Error::Config("x0 must be finite".into()));
        }
        if self.antithetic && self.n_paths % 2 == 1 {
            return Err(Error::Config(
                "antithetic sampling needs an even n_paths".into(),
            ));
        }
        Ok(())
    }

    /// `(Δ, start site, number of steps)`.
    fn lattice(&self, t: f64) -> (f64, i64, u64) {
        let nominal = (2.0 * self.dt).sqrt();
        let (delta, start) = if self.x0 == 0.0 {
            (nominal, 0)
        } else {
            let m = (self.x0.abs() / nominal).ceil().max(1.0);
            (self.x0.abs() / m, self.x0.signum() as i64 * m as i64)
        };
        let steps = (2.0 * t / (delta * delta)).round().max(1.0) as u64;
        (delta, start, steps)
    }
}

/// Monte-Carlo estimate of `E f(X_t)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    /// sample standard deviation over `√n` (antithetic pairs count as one
    /// sample); for a single path, half the range of `f`
    pub std_error: f64,
    pub n_paths: u64,
    pub config: PathConfig,
}

/// Neumaier-compensated sum.
#[derive(Debug, Clone, Copy, Default)]
struct Compensated {
    sum: f64,
    comp: f64,
}

impl Compensated {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    count: u64,
    sum: Compensated,
    sumsq: Compensated,
}

impl Moments {
    fn push(&mut self, d: f64) {
        self.count += 1;
        self.sum.add(d);
        self.sumsq.add(d * d);
    }
}

/// Runs `n_samples` independent samples; `sample(rng, flip)` draws one value,
/// `flip` mapping each uniform `u` to `1 − u` for the antithetic partner.
fn run<F>(cfg: &PathConfig, f_range: f64, reference: f64, sample: F) -> McEstimate
where
    F: Fn(&mut ChaCha8Rng, bool) -> f64 + Sync,
{
    let per_sample = if cfg.antithetic { 2 } else { 1 };
    let n_samples = cfg.n_paths / per_sample;
    let n_chunks = n_samples.div_ceil(CHUNK);
    let chunks: Vec<Moments> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(c);
            let count = CHUNK.min(n_samples - c * CHUNK);
            let mut m = Moments::default();
            for _ in 0..count {
                let v = if cfg.antithetic {
                    let mut twin = rng.clone();
                    let a = sample(&mut rng, false);
                    let b = sample(&mut twin, true);
                    // continue from whichever stream went further
                    if twin.get_word_pos() > rng.get_word_pos() {
                        rng = twin;
                    }
                    0.5 * (a + b)
                } else {
                    sample(&mut rng, false)
                };
                m.push(v - reference);
            }
            m
        })
        .collect();
    let mut total = Moments::default();
    for m in &chunks {
        total.count += m.count;
        total.sum.add(m.sum.value());
        total.sumsq.add(m.sumsq.value());
    }
    let n = total.count as f64;
    let mean_d = total.sum.value() / n;
    let std_error = if total.count > 1 {
        let var = ((total.sumsq.value() - n * mean_d * mean_d) / (n - 1.0)).max(0.0);
        (var / n).sqrt()
    } else {
        0.5 * f_range
    };
    McEstimate {
        mean: reference + mean_d,
        std_error,
        n_paths: cfg.n_paths,
        config: cfg.clone(),
    }
}

fn uniform(rng: &mut ChaCha8Rng, flip: bool) -> f64 {
    let u: f64 = rng.gen();
    if flip {
        1.0 - u
    } else {
        u
    }
}

fn check_time(t: f64) -> Result<()> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "time must be positive, got {t}"
        )));
    }
    Ok(())
}

fn range_of(values: impl Iterator<Item = f64>) -> f64 {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    });
    hi - lo
}

/// Estimates `E f(X_t)` for skew Brownian motion started at `cfg.x0`.
pub fn simulate_skew(
    p: &MembraneParams,
    cfg: &PathConfig,
    t: f64,
    f: &LineFn,
) -> Result<McEstimate> {
    cfg.validate()?;
    check_time(t)?;
    let (delta, start, steps) = cfg.lattice(t);
    let p_right = p.alpha() / p.sum();
    let f_range = range_of(
        f.values()
            .iter()
            .copied()
            .chain([f.lim_minus(), f.lim_plus()]),
    );
    let reference = f.eval(cfg.x0);
    Ok(run(cfg, f_range, reference, |rng, flip| {
        let mut i = start;
        for _ in 0..steps {
            let u = uniform(rng, flip);
            let up = if i == 0 { u < p_right } else { u < 0.5 };
            i += if up { 1 } else { -1 };
        }
        f.eval(i as f64 * delta)
    }))
}

/// Estimates `E f(X_t)` for snapping-out Brownian motion started at `cfg.x0`
/// (on the side `cfg.side` when `x0 = 0`).
pub fn simulate_snapping(
    p: &MembraneParams,
    cfg: &PathConfig,
    t: f64,
    f: &SharpFn,
) -> Result<McEstimate> {
    cfg.validate()?;
    check_time(t)?;
    let (delta, start, steps) = cfg.lattice(t);
    let start_side = match (cfg.x0, cfg.side) {
        (x, _) if x < 0.0 => Side::Left,
        (x, _) if x > 0.0 => Side::Right,
        (_, Some(s)) => s,
        (_, None) => return Err(Error::Config("x0 = 0 needs an explicit side".into())),
    };
    let (q_left, q_right) = (p.alpha() * delta, p.beta() * delta);
    if q_left > 1.0 || q_right > 1.0 {
        return Err(Error::Config(format!(
            "switch probability {} exceeds 1; reduce dt",
            q_left.max(q_right)
        )));
    }
    let f_range = range_of(
        f.left()
            .iter()
            .chain(f.right())
            .copied()
            .chain([f.lim_minus(), f.lim_plus()]),
    );
    let reference = f.eval(cfg.x0, start_side == Side::Right);
    let start_site = start.unsigned_abs();
    Ok(run(cfg, f_range, reference, |rng, flip| {
        let mut side = start_side;
        let mut j = start_site;
        for _ in 0..steps {
            let u = uniform(rng, flip);
            if j == 0 {
                let q = if side == Side::Right { q_right } else { q_left };
                if u < q {
                    side = if side == Side::Right {
                        Side::Left
                    } else {
                        Side::Right
                    };
                } else {
                    j = 1;
                }
            } else if u < 0.5 {
                j += 1;
            } else {
                j -= 1;
            }
        }
        let x = j as f64 * delta;
        match side {
            Side::Right => f.eval(x, true),
            Side::Left => f.eval(-x, false),
        }
    }))
}
