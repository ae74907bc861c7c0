//! Extension operators: each maps a function on ℝ♯ to a pair of whole-line
//! functions `(f̃_ℓ, f̃_r)` whose restriction is the original function and
//! whose shape encodes the membrane conditions.
//!
//! * `extend_so`: snapping-out, any `f` on ℝ♯;
//! * `extend_skew`: skew, continuous `f`;
//! * `extend_os`: the complementary snapping family, opposite boundary values;
//! * `extend_weks`: its skew-type limit, opposite boundary values.

use crate::conv::{exp_conv_values, ExpKernel};
use crate::error::{Error, Result};
use crate::function_space::{FnPair, Grid, LineFn, MembraneParams, SharpFn, MEMBERSHIP_TOL};

/// Whole-line values from a left part (nodes −X…0) and a right part (nodes 0…X).
/// The value at 0 is taken from `left`.
fn join(grid: Grid, left: &[f64], right: &[f64], lim_minus: f64, lim_plus: f64) -> LineFn {
    let mut v = Vec::with_capacity(grid.len());
    v.extend_from_slice(left);
    v.extend_from_slice(&right[1..]);
    LineFn::new(grid, v, lim_minus, lim_plus).expect("branch lengths follow the grid")
}

/// `f(−x_k)` for the right-half-line nodes `x_k = k·h`, read from the left branch.
fn reflected_left(f: &SharpFn) -> Vec<f64> {
    f.left().iter().rev().copied().collect()
}

/// `f(−x_k)` for the left-half-line nodes `x_k = −(n−i)·h`, read from the right branch.
fn reflected_right(f: &SharpFn) -> Vec<f64> {
    f.right().iter().rev().copied().collect()
}

fn check_opposite(f: &SharpFn, tol: f64) -> Result<()> {
    if f.is_opposite(tol) {
        Ok(())
    } else {
        Err(Error::NotOpposite {
            left: f.at_zero_minus(),
            right: f.at_zero_plus(),
        })
    }
}

/// Snapping-out extension:
/// `f̃_ℓ(x) = f(−x) + 2α (e_{α+β} * [f − f^T])(x)` for x > 0 and
/// `f̃_r(x) = f(−x) − 2β (e_{α+β} * [f − f^T])(−x)` for x < 0.
pub fn extend_so(p: &MembraneParams, f: &SharpFn) -> FnPair {
    let g = *f.grid();
    let (a, b, s) = (p.alpha(), p.beta(), p.sum());
    let fl_ref = reflected_left(f);
    let diff: Vec<f64> = f.right().iter().zip(&fl_ref).map(|(r, l)| r - l).collect();
    let kernel = ExpKernel::new(s).expect("alpha + beta > 0");
    let c = exp_conv_values(&kernel, g.step(), &diff);
    let c_lim = (f.lim_plus() - f.lim_minus()) / s;

    // f̃_ℓ: right half from f(−x) + 2α c(x)
    let right1: Vec<f64> = fl_ref
        .iter()
        .zip(&c)
        .map(|(fm, ck)| fm + 2.0 * a * ck)
        .collect();
    let f1 = join(
        g,
        f.left(),
        &right1,
        f.lim_minus(),
        f.lim_minus() + 2.0 * a * c_lim,
    );

    // f̃_r: left half at node −x_k from f(x_k) − 2β c(x_k)
    let left2: Vec<f64> = f
        .right()
        .iter()
        .zip(&c)
        .rev()
        .map(|(fp, ck)| fp - 2.0 * b * ck)
        .collect();
    let mut v2 = left2;
    v2.pop();
    v2.extend_from_slice(f.right());
    let f2 = LineFn::new(g, v2, f.lim_plus() - 2.0 * b * c_lim, f.lim_plus()).expect("lengths");
    FnPair { f1, f2 }
}

/// Skew extension of a continuous `f`:
/// `f̃_ℓ(x) = ((β−α) f(−x) + 2α f(x)) / (α+β)` for x > 0 and
/// `f̃_r(x) = (2β f(x) + (α−β) f(−x)) / (α+β)` for x < 0.
pub fn extend_skew(p: &MembraneParams, f: &LineFn) -> FnPair {
    extend_skew_pointwise(p, &f.to_sharp())
}

/// The skew formulas applied branchwise to an arbitrary `f` on ℝ♯. For a jump
/// at 0 this is the pointwise (x ≠ 0) limit of the snapping-out extensions;
/// each component keeps the value of its own branch at the node 0.
pub fn extend_skew_pointwise(p: &MembraneParams, f: &SharpFn) -> FnPair {
    let (a, b, s) = (p.alpha(), p.beta(), p.sum());
    let (cm, cp) = ((b - a) / s, 2.0 * a / s);
    let (dp, dm) = (2.0 * b / s, (a - b) / s);
    combine_affine(f, (cm, cp), (dp, dm))
}

/// `f̃_ℓ(x) = c₁·f(−x) + c₂·f(x)` on x > 0, `f̃_r(x) = d₁·f(x) + d₂·f(−x)` on x < 0.
fn combine_affine(f: &SharpFn, (c1, c2): (f64, f64), (d1, d2): (f64, f64)) -> FnPair {
    let g = *f.grid();
    let fl_ref = reflected_left(f);
    let right1: Vec<f64> = fl_ref
        .iter()
        .zip(f.right())
        .map(|(m, p)| c1 * m + c2 * p)
        .collect();
    let mut right1 = right1;
    right1[0] = f.at_zero_minus();
    let f1 = join(
        g,
        f.left(),
        &right1,
        f.lim_minus(),
        c1 * f.lim_minus() + c2 * f.lim_plus(),
    );

    let fr_ref = reflected_right(f);
    let mut left2: Vec<f64> = f
        .left()
        .iter()
        .zip(&fr_ref)
        .map(|(x, m)| d1 * x + d2 * m)
        .collect();
    left2[g.n_half()] = f.at_zero_plus();
    let mut v2 = left2;
    v2.extend_from_slice(&f.right()[1..]);
    let f2 =
        LineFn::new(g, v2, d1 * f.lim_minus() + d2 * f.lim_plus(), f.lim_plus()).expect("lengths");
    FnPair { f1, f2 }
}

/// Extension for the complementary snapping family (opposite boundary values):
/// `f̃_ℓ(x) = −f(−x) − 2f(0+)e_{α+β}(x) − 2(e_{α+β} * [βf − αf^T])(x)` for x > 0,
/// `f̃_r(x) = −f(−x) + 2f(0+)e_{α+β}(−x) + 2(e_{α+β} * [βf − αf^T])(−x)` for x < 0.
pub fn extend_os(p: &MembraneParams, f: &SharpFn) -> Result<FnPair> {
    extend_os_with_tol(p, f, MEMBERSHIP_TOL)
}

pub fn extend_os_with_tol(p: &MembraneParams, f: &SharpFn, tol: f64) -> Result<FnPair> {
    check_opposite(f, tol)?;
    let g = *f.grid();
    let (a, b, s) = (p.alpha(), p.beta(), p.sum());
    let h = g.step();
    let fl_ref = reflected_left(f);
    let integrand: Vec<f64> = f
        .right()
        .iter()
        .zip(&fl_ref)
        .map(|(r, l)| b * r - a * l)
        .collect();
    let kernel = ExpKernel::new(s).expect("alpha + beta > 0");
    let c = exp_conv_values(&kernel, h, &integrand);
    let c_lim = (b * f.lim_plus() - a * f.lim_minus()) / s;
    let f0 = f.at_zero_plus();
    let boundary: Vec<f64> = (0..=g.n_half())
        .map(|k| 2.0 * f0 * kernel.eval(k as f64 * h))
        .collect();

    let mut right1: Vec<f64> = (0..=g.n_half())
        .map(|k| -fl_ref[k] - boundary[k] - 2.0 * c[k])
        .collect();
    right1[0] = f.at_zero_minus();
    let f1 = join(
        g,
        f.left(),
        &right1,
        f.lim_minus(),
        -f.lim_minus() - 2.0 * c_lim,
    );

    let mut left2: Vec<f64> = (0..=g.n_half())
        .rev()
        .map(|k| -f.right()[k] + boundary[k] + 2.0 * c[k])
        .collect();
    left2.pop();
    left2.extend_from_slice(f.right());
    let f2 = LineFn::new(g, left2, -f.lim_plus() + 2.0 * c_lim, f.lim_plus()).expect("lengths");
    Ok(FnPair { f1, f2 })
}

/// Limit of [`extend_os`] under `(α, β) → (nα, nβ)`, `n → ∞`:
/// `f̃_ℓ(x) = ((α−β) f(−x) − 2β f(x)) / (α+β)` for x > 0 and
/// `f̃_r(x) = (−2α f(x) + (β−α) f(−x)) / (α+β)` for x < 0.
pub fn extend_weks(p: &MembraneParams, f: &SharpFn) -> Result<FnPair> {
    extend_weks_with_tol(p, f, MEMBERSHIP_TOL)
}

pub fn extend_weks_with_tol(p: &MembraneParams, f: &SharpFn, tol: f64) -> Result<FnPair> {
    check_opposite(f, tol)?;
    let (a, b, s) = (p.alpha(), p.beta(), p.sum());
    Ok(combine_affine(
        f,
        ((a - b) / s, -2.0 * b / s),
        (-2.0 * a / s, (b - a) / s),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn grid() -> Grid {
        Grid::new(10.0, 1000).unwrap()
    }

    fn params() -> MembraneParams {
        MembraneParams::new(0.2, 0.1).unwrap()
    }

    fn tanh(g: Grid) -> LineFn {
        LineFn::from_fn(g, f64::tanh, -1.0, 1.0)
    }

    fn ov_gauss(g: Grid) -> SharpFn {
        SharpFn::j_inv(&LineFn::from_fn(g, |x| (-x * x).exp(), 0.0, 0.0))
    }

    #[test]
    fn so_constant_is_fixed() {
        let g = grid();
        let f = SharpFn::constant(g, 2.0);
        let e = extend_so(&params(), &f);
        assert!(e.f1.distance(&LineFn::constant(g, 2.0)) < 1e-14);
        assert!(e.f2.distance(&LineFn::constant(g, 2.0)) < 1e-14);
    }

    #[test]
    fn so_tanh_matches_quadrature_oracle() {
        let g = grid();
        let e = extend_so(&params(), &tanh(g).to_sharp());
        assert_abs_diff_eq!(e.f1.eval(1.0), -0.448_528_493_022_802_8, epsilon = 1e-9);
        assert_abs_diff_eq!(e.f2.eval(-1.0), 0.605_061_324_489_283_8, epsilon = 1e-9);
        assert_abs_diff_eq!(e.f1.eval(3.0), 0.316_353_483_174_975, epsilon = 1e-9);
        // f̃_ℓ(∞) = f(−∞) + 2α·2/(α+β)
        assert_abs_diff_eq!(e.f1.lim_plus(), -1.0 + 0.4 * 2.0 / 0.3, epsilon = 1e-14);
    }

    #[test]
    fn restrict_inverts_every_extension() {
        let g = grid();
        let p = params();
        let s = SharpFn::from_branches(
            g,
            |x| (x + 0.3).sin() * (-x * x).exp(),
            |x| 1.0 + x.cos() / (1.0 + x * x),
            0.0,
            1.0,
        );
        assert_eq!(extend_so(&p, &s).restrict().unwrap(), s);
        let t = tanh(g);
        assert_eq!(extend_skew(&p, &t).restrict().unwrap(), t.to_sharp());
        let o = ov_gauss(g);
        assert_eq!(extend_os(&p, &o).unwrap().restrict().unwrap(), o);
        assert_eq!(extend_weks(&p, &o).unwrap().restrict().unwrap(), o);
    }

    #[test]
    fn skew_tanh_collapses_to_multiple() {
        let g = grid();
        let e = extend_skew(&params(), &tanh(g));
        assert_abs_diff_eq!(e.f1.eval(1.0), 5.0 / 3.0 * 1.0f64.tanh(), epsilon = 1e-14);
    }

    #[test]
    fn skew_symmetric_params_is_identity() {
        let g = grid();
        let f = LineFn::from_fn(
            g,
            |x| (x - 1.0).exp() / (1.0 + x.exp()),
            0.0,
            (-1.0f64).exp(),
        );
        let p = MembraneParams::new(0.7, 0.7).unwrap();
        let e = extend_skew(&p, &f);
        assert!(e.f1.distance(&f) < 1e-15);
        assert!(e.f2.distance(&f) < 1e-15);
    }

    #[test]
    fn skew_components_continuous_at_zero() {
        let g = grid();
        let f = LineFn::from_fn(g, |x| (x + 0.5).tanh(), -1.0, 1.0);
        let e = extend_skew(&params(), &f);
        let h = g.step();
        assert!((e.f1.eval(h) - f.at_zero()).abs() < 5.0 * h);
        assert!((e.f2.eval(-h) - f.at_zero()).abs() < 5.0 * h);
    }

    #[test]
    fn os_gauss_matches_quadrature_oracle() {
        let g = grid();
        let e = extend_os(&params(), &ov_gauss(g)).unwrap();
        assert_abs_diff_eq!(e.f1.eval(1.0), -1.491_929_241_710_489_2, epsilon = 1e-9);
        assert_abs_diff_eq!(e.f2.eval(-1.0), 1.491_929_241_710_489_2, epsilon = 1e-9);
        assert_abs_diff_eq!(e.f1.eval(2.0), -1.425_258_686_365_300_3, epsilon = 1e-9);
        assert_abs_diff_eq!(e.f2.eval(-2.0), 1.425_258_686_365_300_3, epsilon = 1e-9);
    }

    #[test]
    fn os_components_are_continuous_at_zero() {
        let g = grid();
        let e = extend_os(&params(), &ov_gauss(g)).unwrap();
        let h = g.step();
        assert!((e.f1.eval(h) - e.f1.at_zero()).abs() < 5.0 * h);
        assert!((e.f2.eval(-h) - e.f2.at_zero()).abs() < 5.0 * h);
    }

    #[test]
    fn opposite_precondition_enforced() {
        let g = grid();
        let f = SharpFn::from_branches(g, |_| 1.0, |_| 2.0, 1.0, 2.0);
        assert!(matches!(
            extend_os(&params(), &f),
            Err(Error::NotOpposite { .. })
        ));
        assert!(matches!(
            extend_weks(&params(), &f),
            Err(Error::NotOpposite { .. })
        ));
        let z = SharpFn::constant(g, 0.0);
        assert_eq!(extend_os(&params(), &z).unwrap().sup_norm(), 0.0);
        assert_eq!(extend_weks(&params(), &z).unwrap().sup_norm(), 0.0);
    }

    #[test]
    fn weks_symbolic_values() {
        let g = grid();
        let f = SharpFn::j_inv(&LineFn::from_fn(
            g,
            |x| (-(x - 1.0) * (x - 1.0)).exp(),
            0.0,
            0.0,
        ));
        let e = extend_weks(&params(), &f).unwrap();
        let e4 = (-4.0f64).exp();
        assert_abs_diff_eq!(e.f1.eval(1.0), -e4 / 3.0 - 2.0 / 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(e.f2.eval(-1.0), 4.0 / 3.0 * e4 - 1.0 / 3.0, epsilon = 1e-14);
    }

    #[test]
    fn weks_symmetric_params_negates() {
        let g = grid();
        let f = ov_gauss(g);
        let e = extend_weks(&MembraneParams::new(0.5, 0.5).unwrap(), &f).unwrap();
        for k in 1..=g.n_half() as isize {
            assert_abs_diff_eq!(e.f1.sample(k), -f.sample(k, true), epsilon = 1e-15);
            assert_abs_diff_eq!(e.f2.sample(-k), -f.sample(-k, false), epsilon = 1e-15);
        }
    }

    #[test]
    fn degenerate_permeabilities() {
        let g = grid();
        let f = SharpFn::from_branches(g, |x| (-x * x).exp(), |x| 0.5 * (-x * x).exp(), 0.0, 0.0);
        for (a, b) in [(0.0, 1.0), (1.0, 0.0)] {
            let p = MembraneParams::new(a, b).unwrap();
            let e = extend_so(&p, &f);
            assert_eq!(e.restrict().unwrap(), f);
            assert!(e.sup_norm() <= 5.0 * f.sup_norm());
        }
    }
}
