//! Semigroups from cosine families through the Weierstrass formula
//! `T(t)f = (4πt)^{−1/2} ∫ e^{−s²/4t} C(s)f ds`, and residuals of the
//! boundary and transmission conditions that describe the generators'
//! domains.

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;

use crate::cosine::{Family, KelvinCosine};
use crate::error::{Error, Result};
use crate::function_space::{FnPair, LineFn, MembraneParams, SharpFn, MEMBERSHIP_TOL};

/// Gauss–Hermite rule for `π^{−1/2} ∫ e^{−u²} g(u) du`, weights normalised to sum 1.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    /// Golub–Welsch construction for `m` nodes.
    pub fn gauss_hermite(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidArgument(
                "quadrature needs at least one node".into(),
            ));
        }
        let mut jac = DMatrix::<f64>::zeros(m, m);
        for k in 1..m {
            let b = (k as f64 / 2.0).sqrt();
            jac[(k, k - 1)] = b;
            jac[(k - 1, k)] = b;
        }
        let eig = SymmetricEigen::new(jac);
        let mut pairs: Vec<(f64, f64)> = (0..m)
            .map(|i| (eig.eigenvalues[i], eig.eigenvectors[(0, i)].powi(2)))
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let total: f64 = pairs.iter().map(|p| p.1).sum();
        Ok(Self {
            nodes: pairs.iter().map(|p| p.0).collect(),
            weights: pairs.iter().map(|p| p.1 / total).collect(),
        })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `π^{−1/2} ∫ e^{−u²} g(u) du`
    pub fn integrate(&self, g: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&u, &w)| w * g(u))
            .sum()
    }
}

/// How the Weierstrass integral over `s` is discretised.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum WeierstrassRule {
    /// Trapezoid rule on the lattice `s = j·h` of the grid, with an
    /// Euler–Maclaurin correction for the kink that each extension component
    /// carries at 0. Fourth order in `h`, no interpolation.
    #[default]
    Lattice,
    /// Gauss–Hermite rule with `m` nodes after the substitution `s = 2√t·u`;
    /// off-lattice shifts are interpolated.
    GaussHermite { m: usize },
}

/// Number of standard deviations of the heat kernel kept by the lattice rule.
const LATTICE_CUTOFF_SIGMAS: f64 = 12.0;

/// Heat-kernel weights `h·G_t(j·h)` for `j = 0…J`, normalised so the
/// two-sided sum is 1.
fn lattice_weights(t: f64, h: f64) -> Vec<f64> {
    let sigma = (2.0 * t).sqrt();
    let jmax = ((LATTICE_CUTOFF_SIGMAS * sigma) / h).ceil().max(1.0) as usize;
    let mut w: Vec<f64> = (0..=jmax)
        .map(|j| {
            let s = j as f64 * h;
            (-s * s / (4.0 * t)).exp()
        })
        .collect();
    let total = w[0] + 2.0 * w[1..].iter().sum::<f64>();
    w.iter_mut().for_each(|v| *v /= total);
    w
}

/// `Σ_j w_|j| g(k+j)` for every node `k` of `range`.
fn lattice_smooth(g: &LineFn, w: &[f64], range: std::ops::RangeInclusive<isize>) -> Vec<f64> {
    let ks: Vec<isize> = range.collect();
    ks.par_iter()
        .map(|&k| {
            let mut acc = w[0] * g.sample(k);
            for (j, wj) in w.iter().enumerate().skip(1) {
                let j = j as isize;
                acc += wj * (g.sample(k + j) + g.sample(k - j));
            }
            acc
        })
        .collect()
}

/// Weierstrass formula on a precomputed extension pair.
fn weierstrass_pair(pair: &FnPair, t: f64, rule: WeierstrassRule) -> Result<SharpFn> {
    let g = *pair.grid();
    let n = g.n_half() as isize;
    match rule {
        WeierstrassRule::Lattice => {
            let h = g.step();
            let w = lattice_weights(t, h);
            let mut left = lattice_smooth(&pair.f1, &w, -n..=0);
            let mut right = lattice_smooth(&pair.f2, &w, 0..=n);
            // a slope jump [g′] of the component at 0 puts kinks at s = ±x in the
            // integrand; the trapezoid misses (h²/12)·G_t(x)·[g′] of the integral
            if (2.0 * t).sqrt() >= 2.0 * h {
                let kink = |c: &LineFn| {
                    let d = c.membrane_derivatives();
                    d.d1_plus - d.d1_minus
                };
                let (k1, k2) = (kink(&pair.f1), kink(&pair.f2));
                let norm = (4.0 * std::f64::consts::PI * t).sqrt();
                let corr = |x: f64| h * h / 12.0 * (-x * x / (4.0 * t)).exp() / norm;
                for (i, v) in left.iter_mut().enumerate() {
                    *v += corr(g.signed_node(i as isize - n)) * k1;
                }
                for (i, v) in right.iter_mut().enumerate() {
                    *v += corr(g.signed_node(i as isize)) * k2;
                }
            }
            SharpFn::new(g, left, right, pair.f1.lim_minus(), pair.f2.lim_plus())
        }
        WeierstrassRule::GaussHermite { m } => {
            let q = QuadratureRule::gauss_hermite(m)?;
            let kc = KelvinCosine::from_pair(Family::SnappingOut, pair.clone());
            let scale = 2.0 * t.sqrt();
            let terms: Vec<SharpFn> = q
                .nodes()
                .par_iter()
                .zip(q.weights())
                .map(|(&u, &w)| kc.at(scale * u) * w)
                .collect();
            let mut acc = terms[0].clone();
            for term in &terms[1..] {
                acc = &acc + term;
            }
            Ok(acc)
        }
    }
}

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "time must be nonnegative, got {t}"
        )));
    }
    Ok(())
}

/// `T_family(t) f` with the default lattice rule.
pub fn weierstrass(family: Family, p: &MembraneParams, t: f64, f: &SharpFn) -> Result<SharpFn> {
    weierstrass_with(family, p, t, f, WeierstrassRule::default())
}

/// `T_family(t) f` with an explicit quadrature rule.
pub fn weierstrass_with(
    family: Family,
    p: &MembraneParams,
    t: f64,
    f: &SharpFn,
    rule: WeierstrassRule,
) -> Result<SharpFn> {
    check_time(t)?;
    let pair = family.extend(p, f, MEMBERSHIP_TOL)?;
    if t == 0.0 {
        return Ok(f.clone());
    }
    weierstrass_pair(&pair, t, rule)
}

/// A semigroup applied to one function, reusing the extension across times.
#[derive(Debug, Clone)]
pub struct Semigroup {
    pair: FnPair,
    initial: SharpFn,
    rule: WeierstrassRule,
}

impl Semigroup {
    pub fn new(
        family: Family,
        p: &MembraneParams,
        f: &SharpFn,
        rule: WeierstrassRule,
    ) -> Result<Self> {
        Ok(Self {
            pair: family.extend(p, f, MEMBERSHIP_TOL)?,
            initial: f.clone(),
            rule,
        })
    }

    /// Uses a precomputed extension pair.
    pub fn from_pair(pair: FnPair, rule: WeierstrassRule) -> Result<Self> {
        let initial = pair.restrict()?;
        Ok(Self {
            pair,
            initial,
            rule,
        })
    }

    pub fn at(&self, t: f64) -> Result<SharpFn> {
        check_time(t)?;
        if t == 0.0 {
            return Ok(self.initial.clone());
        }
        weierstrass_pair(&self.pair, t, self.rule)
    }
}

/// Snapping-out transmission residuals
/// `(f′(0−) − α[f], f′(0+) − β[f])` with `[f] = f(0+) − f(0−)`.
pub fn domain_residual_so(p: &MembraneParams, f: &SharpFn) -> (f64, f64) {
    let d = f.membrane_derivatives();
    let jump = f.jump();
    (d.d1_minus - p.alpha() * jump, d.d1_plus - p.beta() * jump)
}

/// Skew conditions `(f″(0+) − f″(0−), βf′(0−) − αf′(0+))`.
pub fn domain_residual_skew(p: &MembraneParams, f: &LineFn) -> (f64, f64) {
    let d = f.membrane_derivatives();
    (
        d.d2_plus - d.d2_minus,
        p.beta() * d.d1_minus - p.alpha() * d.d1_plus,
    )
}

/// Complementary conditions
/// `(f″(0+) − αf′(0−) − βf′(0+), f″(0+) + f″(0−))`.
pub fn domain_residual_os(p: &MembraneParams, f: &SharpFn) -> (f64, f64) {
    let d = f.membrane_derivatives();
    (
        d.d2_plus - p.alpha() * d.d1_minus - p.beta() * d.d1_plus,
        d.d2_plus + d.d2_minus,
    )
}
