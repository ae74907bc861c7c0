//! Convergence experiments: sweeps over the scaling `(α, β) → (nα, nβ)`
//! comparing snapping-out objects with their skew limits, Cesàro means of
//! the cosine families, and the mirror identity between the complementary
//! and skew families.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::cosine::{restricted_cosine, Family, KelvinCosine};
use crate::error::{Error, Result};
use crate::extensions::{extend_os, extend_skew, extend_skew_pointwise, extend_so, extend_weks};
use crate::function_space::{FnPair, LineFn, MembraneParams, SharpFn, MEMBERSHIP_TOL};
use crate::projections::{project_skew, project_so};
use crate::semigroup::{Semigroup, WeierstrassRule};

/// Error table of one sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub n_values: Vec<u32>,
    /// sup-norm errors, one per `n`
    pub errors: Vec<f64>,
    /// `−slope` of the least-squares line through `(ln n, ln error)`; absent
    /// when fewer than two errors are positive
    pub fitted_order: Option<f64>,
    /// rate constant `K` of the envelope `K/n`, when one is known
    pub k_theory: Option<f64>,
    /// Lipschitz constant used for `k_theory`
    pub lipschitz: Option<f64>,
    /// sup-norm differences between consecutive `n`
    pub cauchy: Vec<f64>,
}

impl ConvergenceReport {
    pub fn new(
        n_values: Vec<u32>,
        errors: Vec<f64>,
        k_theory: Option<f64>,
        lipschitz: Option<f64>,
    ) -> Self {
        let fitted_order = fit_order(&n_values, &errors);
        Self {
            n_values,
            errors,
            fitted_order,
            k_theory,
            lipschitz,
            cauchy: Vec::new(),
        }
    }

    /// `K/n` for entry `i`.
    pub fn bound(&self, i: usize) -> Option<f64> {
        self.k_theory.map(|k| k / self.n_values[i] as f64)
    }

    /// Entries violating `error ≤ K/n + slack`.
    pub fn envelope_violations(&self, slack: f64) -> Vec<usize> {
        (0..self.errors.len())
            .filter(|&i| self.bound(i).is_some_and(|b| self.errors[i] > b + slack))
            .collect()
    }

    /// CSV with columns `n,error,bound`; the bound is empty when unknown.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,error,bound\n");
        for (i, (n, e)) in self.n_values.iter().zip(&self.errors).enumerate() {
            let b = self.bound(i).map(|b| format!("{b:?}")).unwrap_or_default();
            let _ = writeln!(out, "{n},{e:?},{b}");
        }
        out
    }
}

/// Least-squares slope of `ln error` against `ln n`, negated.
pub fn fit_order(n_values: &[u32], errors: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = n_values
        .iter()
        .zip(errors)
        .filter(|(_, &e)| e > 0.0)
        .map(|(&n, &e)| ((n as f64).ln(), e.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let m = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
    let (mx, my) = (sx / m, sy / m);
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(-sxy / sxx)
}

/// `K = 2·max(α,β)·L/(α+β)²` for the snapping-out → skew extensions.
pub fn rate_constant_extension(p: &MembraneParams, lipschitz: f64) -> f64 {
    2.0 * p.alpha().max(p.beta()) * lipschitz / p.sum().powi(2)
}

/// `K = 2L/(α+β)` for the complementary families, `L` the Lipschitz constant of `Jf`.
pub fn rate_constant_weks(p: &MembraneParams, lipschitz: f64) -> f64 {
    2.0 * lipschitz / p.sum()
}

fn check_n_values(n_values: &[u32]) -> Result<()> {
    if n_values.is_empty() {
        return Err(Error::InvalidArgument("empty n sweep".into()));
    }
    if n_values[0] == 0 || n_values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(
            "n values must be positive and strictly increasing".into(),
        ));
    }
    Ok(())
}

fn check_t_grid(t_grid: &[f64], positive: bool) -> Result<()> {
    if t_grid.is_empty() {
        return Err(Error::InvalidArgument("empty time grid".into()));
    }
    if positive && t_grid.iter().any(|&t| t.is_nan() || t <= 0.0) {
        return Err(Error::InvalidArgument(
            "time grid must be strictly positive".into(),
        ));
    }
    Ok(())
}

fn scaled(p: &MembraneParams, n: u32) -> MembraneParams {
    p.scaled(n as f64).expect("scaling keeps parameters valid")
}

fn max_cosine_gap(a: &FnPair, b: &FnPair, t_grid: &[f64]) -> f64 {
    t_grid
        .par_iter()
        .map(|&t| restricted_cosine(t, a).distance(&restricted_cosine(t, b)))
        .reduce(|| 0.0, f64::max)
}

/// `‖E^{s-o}_{nα,nβ} f − E^{skew}_{α,β} f‖` over the sweep.
pub fn sweep_extension(
    p: &MembraneParams,
    f: &LineFn,
    n_values: &[u32],
) -> Result<ConvergenceReport> {
    check_n_values(n_values)?;
    let target = extend_skew(p, f);
    let sharp = f.to_sharp();
    let errors = n_values
        .par_iter()
        .map(|&n| extend_so(&scaled(p, n), &sharp).distance(&target))
        .collect();
    let l = f.lipschitz_estimate();
    Ok(ConvergenceReport::new(
        n_values.to_vec(),
        errors,
        Some(rate_constant_extension(p, l)),
        Some(l),
    ))
}

/// `max_t ‖C^{s-o}_{nα,nβ}(t) f − C^{skew}_{α,β}(t) f‖` over the sweep. For a
/// function with a jump the comparison target is the branchwise skew formula,
/// the pointwise limit away from 0; no rate constant is reported then.
pub fn sweep_cosine(
    p: &MembraneParams,
    f: &SharpFn,
    n_values: &[u32],
    t_grid: &[f64],
) -> Result<ConvergenceReport> {
    check_n_values(n_values)?;
    check_t_grid(t_grid, false)?;
    let target = extend_skew_pointwise(p, f);
    let errors = n_values
        .iter()
        .map(|&n| max_cosine_gap(&extend_so(&scaled(p, n), f), &target, t_grid))
        .collect();
    let (k, l) = if f.is_continuous(MEMBERSHIP_TOL) {
        let l = f.lipschitz_estimate();
        (Some(rate_constant_extension(p, l)), Some(l))
    } else {
        (None, None)
    };
    Ok(ConvergenceReport::new(n_values.to_vec(), errors, k, l))
}

/// `max_t ‖T^{s-o}_{nα,nβ}(t) f − T^{skew}_{α,β}(t) f‖` over the sweep. For a
/// function with a jump the skew semigroup is not defined on it, and the
/// errors are measured against the iterate of the largest `n`. Consecutive
/// differences are always recorded in `cauchy`.
pub fn sweep_semigroup(
    p: &MembraneParams,
    f: &SharpFn,
    n_values: &[u32],
    t_grid: &[f64],
    rule: WeierstrassRule,
) -> Result<ConvergenceReport> {
    check_n_values(n_values)?;
    check_t_grid(t_grid, true)?;
    let evolve =
        |sg: &Semigroup| -> Result<Vec<SharpFn>> { t_grid.iter().map(|&t| sg.at(t)).collect() };
    let iterates: Vec<Vec<SharpFn>> = n_values
        .par_iter()
        .map(|&n| {
            evolve(&Semigroup::new(
                Family::SnappingOut,
                &scaled(p, n),
                f,
                rule,
            )?)
        })
        .collect::<Result<_>>()?;
    let continuous = f.is_continuous(MEMBERSHIP_TOL);
    let target = if continuous {
        evolve(&Semigroup::new(Family::Skew, p, f, rule)?)?
    } else {
        iterates.last().expect("nonempty sweep").clone()
    };
    let gap = |a: &[SharpFn], b: &[SharpFn]| {
        a.iter()
            .zip(b)
            .map(|(x, y)| x.distance(y))
            .fold(0.0, f64::max)
    };
    let errors = iterates.iter().map(|it| gap(it, &target)).collect();
    let (k, l) = if continuous {
        let l = f.lipschitz_estimate();
        (Some(rate_constant_extension(p, l)), Some(l))
    } else {
        (None, None)
    };
    let mut report = ConvergenceReport::new(n_values.to_vec(), errors, k, l);
    report.cauchy = iterates.windows(2).map(|w| gap(&w[0], &w[1])).collect();
    Ok(report)
}

/// `‖P^{s-o}_{nα,nβ} F − P^{skew}_{α,β} F‖` over the sweep.
pub fn sweep_projection(
    p: &MembraneParams,
    f: &FnPair,
    n_values: &[u32],
) -> Result<ConvergenceReport> {
    check_n_values(n_values)?;
    let target = project_skew(p, f);
    let errors = n_values
        .par_iter()
        .map(|&n| project_so(&scaled(p, n), f).distance(&target))
        .collect();
    Ok(ConvergenceReport::new(
        n_values.to_vec(),
        errors,
        None,
        None,
    ))
}

/// `max_t ‖C^{o-s}_{nα,nβ}(t) f − C^{weks}_{α,β}(t) f‖` for opposite-value `f`.
/// The rate constant is `2L/(α+β)` with `L` the Lipschitz constant of `Jf`.
pub fn sweep_weks(
    p: &MembraneParams,
    f: &SharpFn,
    n_values: &[u32],
    t_grid: &[f64],
) -> Result<ConvergenceReport> {
    check_n_values(n_values)?;
    check_t_grid(t_grid, false)?;
    let target = extend_weks(p, f)?;
    let pairs: Vec<FnPair> = n_values
        .iter()
        .map(|&n| extend_os(&scaled(p, n), f))
        .collect::<Result<_>>()?;
    let errors = pairs
        .iter()
        .map(|e| max_cosine_gap(e, &target, t_grid))
        .collect();
    let l = f.j_iso(MEMBERSHIP_TOL)?.lipschitz_estimate();
    Ok(ConvergenceReport::new(
        n_values.to_vec(),
        errors,
        Some(rate_constant_weks(p, l)),
        Some(l),
    ))
}

/// `y ↦ ∫_{−X−h}^{y} g` for the piecewise-linear interpolant of the lattice
/// samples, which reach the limits one node beyond ±X.
struct Antiderivative {
    x0: f64,
    h: f64,
    prefix: Vec<f64>,
    values: Vec<f64>,
    lim_minus: f64,
    lim_plus: f64,
}

impl Antiderivative {
    fn new(g: &LineFn) -> Self {
        let h = g.grid().step();
        let mut v = Vec::with_capacity(g.values().len() + 2);
        v.push(g.lim_minus());
        v.extend_from_slice(g.values());
        v.push(g.lim_plus());
        let mut prefix = Vec::with_capacity(v.len());
        let mut acc = 0.0;
        prefix.push(0.0);
        for w in v.windows(2) {
            acc += 0.5 * h * (w[0] + w[1]);
            prefix.push(acc);
        }
        Self {
            x0: -g.grid().x_max() - h,
            h,
            prefix,
            values: v,
            lim_minus: g.lim_minus(),
            lim_plus: g.lim_plus(),
        }
    }

    fn eval(&self, y: f64) -> f64 {
        let last = self.values.len() - 1;
        let r = (y - self.x0) / self.h;
        if r <= 0.0 {
            return self.lim_minus * (y - self.x0);
        }
        if r >= last as f64 {
            return self.prefix[last] + self.lim_plus * (y - self.x0 - last as f64 * self.h);
        }
        let k = (r.floor() as usize).min(last - 1);
        let w = r - k as f64;
        let (a, b) = (self.values[k], self.values[k + 1]);
        self.prefix[k] + self.h * (w * a + 0.5 * w * w * (b - a))
    }
}

/// Cesàro mean `T⁻¹ ∫₀ᵀ C_family(s) f ds`.
///
/// With `s_step = None` the integral is exact for the piecewise-linear
/// interpolants of the extension components, via
/// `∫₀ᵀ C(s)g(x) ds = ½ ∫_{x−T}^{x+T} g`. With `Some(ds)` it is the trapezoid
/// rule in `s` with step at most `ds`.
pub fn cesaro_mean(
    family: Family,
    p: &MembraneParams,
    f: &SharpFn,
    t: f64,
    s_step: Option<f64>,
) -> Result<SharpFn> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "averaging time must be positive, got {t}"
        )));
    }
    let kc = KelvinCosine::new(family, p, f)?;
    let pair = kc.pair();
    let g = *f.grid();
    let n = g.n_half() as isize;
    match s_step {
        None => {
            let (a1, a2) = (Antiderivative::new(&pair.f1), Antiderivative::new(&pair.f2));
            let mean = |a: &Antiderivative, x: f64| (a.eval(x + t) - a.eval(x - t)) / (2.0 * t);
            let left = (-n..=0).map(|k| mean(&a1, g.signed_node(k))).collect();
            let right = (0..=n).map(|k| mean(&a2, g.signed_node(k))).collect();
            SharpFn::new(g, left, right, f.lim_minus(), f.lim_plus())
        }
        Some(ds) => {
            if ds.is_nan() || ds <= 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "s_step must be positive, got {ds}"
                )));
            }
            let m = (t / ds).ceil().max(1.0) as usize;
            let step = t / m as f64;
            let terms: Vec<SharpFn> = (0..=m)
                .into_par_iter()
                .map(|j| {
                    let w = if j == 0 || j == m { 0.5 } else { 1.0 };
                    kc.at(j as f64 * step) * (w * step / t)
                })
                .collect();
            let mut acc = terms[0].clone();
            for term in &terms[1..] {
                acc = &acc + term;
            }
            Ok(acc)
        }
    }
}

/// `M_{α,β} f = (β f(−∞) + α f(∞)) / (α+β)`, the limit of the Cesàro means of
/// the snapping-out and skew families.
pub fn mean_limit_m(p: &MembraneParams, f: &SharpFn) -> f64 {
    (p.beta() * f.lim_minus() + p.alpha() * f.lim_plus()) / p.sum()
}

/// The two-sided constant `N_{α,β} f`: `c` on the left half-line and `−c` on
/// the right, `c = (α f(−∞) − β f(∞)) / (α+β)`; the limit of the Cesàro
/// means of the complementary families.
pub fn mean_limit_n(p: &MembraneParams, f: &SharpFn) -> (f64, f64) {
    let c = (p.alpha() * f.lim_minus() - p.beta() * f.lim_plus()) / p.sum();
    (c, -c)
}

/// `max_t ‖C^{weks}_{α,β}(t) f − J⁻¹ C^{skew}_{β,α}(t) J f‖` for opposite-value `f`.
pub fn mirror_check(p: &MembraneParams, f: &SharpFn, t_grid: &[f64]) -> Result<f64> {
    check_t_grid(t_grid, false)?;
    let jf = f.j_iso(MEMBERSHIP_TOL)?;
    let weks = KelvinCosine::new(Family::Weks, p, f)?;
    let skew = extend_skew(&p.swapped(), &jf);
    Ok(t_grid
        .par_iter()
        .map(|&t| {
            let lhs = weks.at(t);
            let rhs = SharpFn::j_inv(
                &restricted_cosine(t, &skew)
                    .to_line(f64::INFINITY)
                    .expect("infinite tolerance"),
            );
            lhs.distance(&rhs)
        })
        .reduce(|| 0.0, f64::max))
}
