//! Projections of the pair space onto the subspaces shaped by the membrane
//! conditions: the integral projection `P^{s-o}`, the pointwise projections
//! `P^{skew}` and `P^{weks}` (which sum to the identity), and the complement
//! `Q = I − P^{s-o}`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::conv::{sweep_backward, sweep_forward};
use crate::error::{Error, Result};
use crate::extensions::extend_skew;
use crate::function_space::{FnPair, LineFn, MembraneParams};

/// `k₁ = αf₁ᵒ + βf₂ᵒ` (odd) and `k₂ = f₁ᵉ − f₂ᵉ` (even).
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionFields {
    pub k1: LineFn,
    pub k2: LineFn,
}

pub fn k_fields(p: &MembraneParams, f: &FnPair) -> ProjectionFields {
    let k1 = LineFn::combination(&[(p.alpha(), &f.f1.odd_part()), (p.beta(), &f.f2.odd_part())]);
    let k2 = &f.f1.even_part() - &f.f2.even_part();
    ProjectionFields { k1, k2 }
}

/// The snapping-out projection. With `u = k₁/γ − k₂/2`, `v = k₁/γ + k₂/2`,
/// `L(x) = ∫_{−∞}^x e^{−γ(x−y)} u(y) dy` and `R(x) = ∫_x^∞ e^{γ(x−y)} v(y) dy`:
/// `g₁ = f₁ᵉ + ½(γ+2α)L − ½(γ−2α)R`, `g₂ = f₂ᵉ + ½(γ+2β)R − ½(γ−2β)L`.
pub fn project_so(p: &MembraneParams, f: &FnPair) -> FnPair {
    let (a, b, gam) = (p.alpha(), p.beta(), p.gamma());
    let grid = *f.grid();
    let h = grid.step();
    let brk = Some(grid.center());
    let ProjectionFields { k1, k2 } = k_fields(p, f);
    let u = LineFn::combination(&[(1.0 / gam, &k1), (-0.5, &k2)]);
    let v = LineFn::combination(&[(1.0 / gam, &k1), (0.5, &k2)]);
    let l_vals = sweep_forward(gam, h, u.values(), u.lim_minus() / gam, brk);
    let r_vals = sweep_backward(gam, h, v.values(), v.lim_plus() / gam, brk);
    let l =
        LineFn::new(grid, l_vals, u.lim_minus() / gam, u.lim_plus() / gam).expect("grid length");
    let r =
        LineFn::new(grid, r_vals, v.lim_minus() / gam, v.lim_plus() / gam).expect("grid length");
    let g1 = LineFn::combination(&[
        (1.0, &f.f1.even_part()),
        (0.5 * (gam + 2.0 * a), &l),
        (-0.5 * (gam - 2.0 * a), &r),
    ]);
    let g2 = LineFn::combination(&[
        (1.0, &f.f2.even_part()),
        (0.5 * (gam + 2.0 * b), &r),
        (-0.5 * (gam - 2.0 * b), &l),
    ]);
    FnPair { f1: g1, f2: g2 }
}

/// `Q = I − P^{s-o}`.
pub fn complement_os(p: &MembraneParams, f: &FnPair) -> FnPair {
    f.sub(&project_so(p, f))
}

/// `(f₁ᵉ + (2α/γ²)k₁ − ½k₂, f₂ᵉ + (2β/γ²)k₁ + ½k₂)`.
pub fn project_skew(p: &MembraneParams, f: &FnPair) -> FnPair {
    let ProjectionFields { k1, k2 } = k_fields(p, f);
    let g2 = p.gamma().powi(2);
    FnPair {
        f1: LineFn::combination(&[
            (1.0, &f.f1.even_part()),
            (2.0 * p.alpha() / g2, &k1),
            (-0.5, &k2),
        ]),
        f2: LineFn::combination(&[
            (1.0, &f.f2.even_part()),
            (2.0 * p.beta() / g2, &k1),
            (0.5, &k2),
        ]),
    }
}

/// `(f₁ᵒ − (2α/γ²)k₁ + ½k₂, f₂ᵒ − (2β/γ²)k₁ − ½k₂)`.
pub fn project_weks(p: &MembraneParams, f: &FnPair) -> FnPair {
    let ProjectionFields { k1, k2 } = k_fields(p, f);
    let g2 = p.gamma().powi(2);
    FnPair {
        f1: LineFn::combination(&[
            (1.0, &f.f1.odd_part()),
            (-2.0 * p.alpha() / g2, &k1),
            (0.5, &k2),
        ]),
        f2: LineFn::combination(&[
            (1.0, &f.f2.odd_part()),
            (-2.0 * p.beta() / g2, &k1),
            (-0.5, &k2),
        ]),
    }
}

/// Largest violation of `g₁ᵉ = g₂ᵉ` and `βg₁ᵒ = αg₂ᵒ`.
pub fn range_residual_skew(p: &MembraneParams, g: &FnPair) -> f64 {
    let even = g.f1.even_part().distance(&g.f2.even_part());
    let odd = (g.f1.odd_part() * p.beta()).distance(&(g.f2.odd_part() * p.alpha()));
    even.max(odd)
}

/// Largest violation of `g₁ᵉ = −g₂ᵉ` and `αg₁ᵒ = −βg₂ᵒ`.
pub fn range_residual_weks(p: &MembraneParams, g: &FnPair) -> f64 {
    let even = (&g.f1.even_part() + &g.f2.even_part()).sup_norm();
    let odd = (&(g.f1.odd_part() * p.alpha()) + &(g.f2.odd_part() * p.beta())).sup_norm();
    even.max(odd)
}

/// Outcome of the least-squares comparison for `P^{skew}`.
#[derive(Debug, Clone, Serialize)]
pub struct LeastSquaresReport {
    /// `L(P^{skew}F)`
    pub projected: f64,
    /// smallest `L` over the perturbed candidates
    pub best_perturbed: f64,
    /// `best_perturbed − projected`; nonnegative when the projection minimises `L`
    pub gap: f64,
    pub trials: usize,
}

/// `∫_{−y}^{y} (g₁−f₁)² + (g₂−f₂)² dx` by the trapezoid rule on the grid nodes.
pub fn least_squares_functional(g: &FnPair, f: &FnPair, y: f64) -> f64 {
    let grid = *f.grid();
    let h = grid.step();
    let m = ((y / h) + 1e-9).floor() as isize;
    let sq = |k: isize| {
        let d1 = g.f1.sample(k) - f.f1.sample(k);
        let d2 = g.f2.sample(k) - f.f2.sample(k);
        d1 * d1 + d2 * d2
    };
    let inner: f64 = (-m + 1..m).map(sq).sum();
    h * (inner + 0.5 * (sq(-m) + sq(m)))
}

/// A random continuous function with sup-norm at most `size`: a sum of a few
/// smooth bumps and a smooth transition with random limits.
pub fn random_continuous(
    rng: &mut ChaCha8Rng,
    grid: crate::function_space::Grid,
    size: f64,
) -> LineFn {
    let bumps: Vec<(f64, f64, f64)> = (0..4)
        .map(|_| {
            (
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-3.0..3.0),
                rng.gen_range(0.3..2.0),
            )
        })
        .collect();
    let (lm, lp) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let shift: f64 = rng.gen_range(-1.0..1.0);
    let raw = LineFn::from_fn(
        grid,
        |x| {
            let base = lm + (lp - lm) * 0.5 * (1.0 + (x - shift).tanh());
            base + bumps
                .iter()
                .map(|&(a, c, w)| a * (-((x - c) / w).powi(2)).exp())
                .sum::<f64>()
        },
        lm,
        lp,
    );
    let n = raw.sup_norm();
    if n == 0.0 {
        raw
    } else {
        raw * (size * rng.gen_range(0.0..=1.0) / n)
    }
}

/// Compares `L(P^{skew}F)` with `L` at `trials` feasible competitors
/// `P^{skew}F + E^{skew}φ`, `‖φ‖ ≤ size`.
pub fn least_squares_gap(
    p: &MembraneParams,
    f: &FnPair,
    y: f64,
    trials: usize,
    size: f64,
    seed: u64,
) -> Result<LeastSquaresReport> {
    if !(y > 0.0 && y <= f.grid().x_max()) {
        return Err(Error::InvalidArgument(format!(
            "window half-width {y} outside (0, x_max]"
        )));
    }
    let g = project_skew(p, f);
    let base = least_squares_functional(&g, f, y);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = f64::INFINITY;
    for _ in 0..trials {
        let phi = random_continuous(&mut rng, *f.grid(), size);
        let cand = g.add(&extend_skew(p, &phi));
        best = best.min(least_squares_functional(&cand, f, y));
    }
    if trials == 0 {
        best = base;
    }
    Ok(LeastSquaresReport {
        projected: base,
        best_perturbed: best,
        gap: best - base,
        trials,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extensions::{extend_os, extend_so};
    use crate::function_space::{Grid, SharpFn};

    fn grid() -> Grid {
        Grid::new(64.0, 1600).unwrap()
    }

    fn params() -> MembraneParams {
        MembraneParams::new(0.2, 0.1).unwrap()
    }

    fn gauss(g: Grid, c: f64, w: f64) -> LineFn {
        LineFn::from_fn(g, |x| (-((x - c) / w).powi(2)).exp(), 0.0, 0.0)
    }

    fn pair(g: Grid) -> FnPair {
        FnPair::new(
            &gauss(g, 0.7, 1.0) + &LineFn::from_fn(g, |x| 0.5 * x.tanh(), -0.5, 0.5),
            &gauss(g, -1.2, 0.6) - &LineFn::from_fn(g, |x| (x / 2.0).tanh(), -1.0, 1.0),
        )
        .unwrap()
    }

    #[test]
    fn field_parities() {
        let g = grid();
        let f = gauss(g, 0.0, 1.0);
        let k = k_fields(&params(), &FnPair::new(f.clone(), f.clone()).unwrap());
        assert_eq!(k.k1.sup_norm(), 0.0);
        assert_eq!(k.k2.sup_norm(), 0.0);
        let o = LineFn::from_fn(g, f64::tanh, -1.0, 1.0);
        let k = k_fields(&params(), &FnPair::new(o.clone(), -&o).unwrap());
        assert!(k.k1.distance(&(o.clone() * 0.1)) < 1e-15);
        assert_eq!(k.k2.sup_norm(), 0.0);
        let k = k_fields(&params(), &pair(g));
        assert!(k.k1.distance(&-&k.k1.reflect()) < 1e-15);
        assert!(k.k2.distance(&k.k2.reflect()) < 1e-15);
    }

    #[test]
    fn skew_plus_weks_is_identity() {
        let g = grid();
        let f = pair(g);
        let s = project_skew(&params(), &f).add(&project_weks(&params(), &f));
        assert!(s.distance(&f) < 1e-12);
    }

    #[test]
    fn symmetric_skew_projection_averages() {
        let g = grid();
        let f = pair(g);
        let p = MembraneParams::new(0.4, 0.4).unwrap();
        let out = project_skew(&p, &f);
        let avg = (&f.f1 + &f.f2) * 0.5;
        assert!(out.f1.distance(&avg) < 1e-14);
        assert!(out.f2.distance(&avg) < 1e-14);
    }

    #[test]
    fn ranges_and_fixed_points() {
        let g = grid();
        let p = params();
        let f = pair(g);
        assert!(range_residual_skew(&p, &project_skew(&p, &f)) < 1e-12);
        assert!(range_residual_weks(&p, &project_weks(&p, &f)) < 1e-12);
        let e = extend_skew(&p, &LineFn::from_fn(g, |x| (x - 0.3).tanh(), -1.0, 1.0));
        assert!(range_residual_skew(&p, &e) < 1e-12);
        assert!(project_skew(&p, &e).distance(&e) < 1e-12);
        let q = MembraneParams::new(0.5, 0.5).unwrap();
        let ev = gauss(g, 0.0, 1.0);
        let bad = FnPair::new(ev.clone(), -&ev).unwrap();
        assert!((range_residual_skew(&q, &bad) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn so_projection_fixes_extensions_and_kills_complement() {
        let g = grid();
        let p = params();
        let s = SharpFn::from_branches(
            g,
            |x| (x + 0.4).tanh(),
            |x| 0.5 + 0.3 * (-x * x).exp(),
            -1.0,
            0.5,
        );
        let e = extend_so(&p, &s);
        assert!(project_so(&p, &e).distance(&e) < 1e-6);
        assert!(complement_os(&p, &e).sup_norm() < 1e-6);
        let c = FnPair::new(LineFn::constant(g, 1.3), LineFn::constant(g, 1.3)).unwrap();
        assert!(project_so(&p, &c).distance(&c) < 1e-12);
        let ov = SharpFn::j_inv(&gauss(g, 0.5, 1.0));
        let eo = extend_os(&p, &ov).unwrap();
        assert!(complement_os(&p, &eo).distance(&eo) < 1e-6);
    }

    #[test]
    fn so_projection_is_idempotent() {
        let g = grid();
        let p = params();
        let f = pair(g);
        let once = project_so(&p, &f);
        assert!(project_so(&p, &once).distance(&once) < 1e-6);
    }

    #[test]
    fn least_squares_minimality() {
        let g = Grid::new(12.0, 600).unwrap();
        let f = pair(g);
        let p = params();
        let r = least_squares_gap(&p, &f, 6.0, 50, 0.1, 7).unwrap();
        assert!(r.gap >= -1e-8, "{r:?}");
        let r0 = least_squares_gap(&p, &f, 6.0, 0, 0.1, 7).unwrap();
        assert_eq!(r0.gap, 0.0);
        assert!(least_squares_gap(&p, &f, 20.0, 1, 0.1, 7).is_err());
    }
}
