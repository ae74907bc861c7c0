//! Discrete functions on the split line ℝ♯ and on the compactified line
//! [−∞, ∞], together with the reflection algebra, the restriction operator
//! and the isomorphism between opposite-value functions and continuous ones.
//!
//! Every function lives on a symmetric [`Grid`] with a node at 0. Beyond the
//! truncation half-width `X` a function is the constant given by its limit
//! at the corresponding infinity.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default absolute tolerance for membership checks (continuity, opposite values).
pub const MEMBERSHIP_TOL: f64 = 1e-9;

/// Permeabilities of the membrane: `alpha` left→right, `beta` right→left.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MembraneParams {
    alpha: f64,
    beta: f64,
}

impl MembraneParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        let valid = alpha.is_finite() && beta.is_finite() && alpha >= 0.0 && beta >= 0.0;
        if !valid || alpha + beta <= 0.0 {
            return Err(Error::InvalidParams { alpha, beta });
        }
        Ok(Self { alpha, beta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `alpha + beta`, the decay rate of the exponential kernel in the extensions.
    pub fn sum(&self) -> f64 {
        self.alpha + self.beta
    }

    /// γ = √(2(α² + β²)).
    pub fn gamma(&self) -> f64 {
        (2.0 * (self.alpha * self.alpha + self.beta * self.beta)).sqrt()
    }

    /// Both permeabilities multiplied by `n`.
    pub fn scaled(&self, n: f64) -> Result<Self> {
        Self::new(n * self.alpha, n * self.beta)
    }

    /// The roles of α and β exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            alpha: self.beta,
            beta: self.alpha,
        }
    }
}

/// Symmetric grid `−X, −X+h, …, 0, …, X` with `h = X / n_half`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    x_max: f64,
    n_half: usize,
}

impl Grid {
    pub fn new(x_max: f64, n_half: usize) -> Result<Self> {
        if !(x_max.is_finite() && x_max > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "x_max must be positive, got {x_max}"
            )));
        }
        // one-sided stencils at the membrane need four nodes per branch
        if n_half < 3 {
            return Err(Error::InvalidGrid(format!(
                "n_half must be at least 3, got {n_half}"
            )));
        }
        Ok(Self { x_max, n_half })
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn n_half(&self) -> usize {
        self.n_half
    }

    pub fn step(&self) -> f64 {
        self.x_max / self.n_half as f64
    }

    /// Number of nodes on the whole line, `2·n_half + 1`.
    pub fn len(&self) -> usize {
        2 * self.n_half + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Index of the node at 0 in whole-line storage.
    pub fn center(&self) -> usize {
        self.n_half
    }

    /// Position of the node with signed offset `k` from 0; exactly antisymmetric in `k`.
    pub fn signed_node(&self, k: isize) -> f64 {
        k as f64 * self.step()
    }

    /// Position of whole-line node `i`.
    pub fn node(&self, i: usize) -> f64 {
        self.signed_node(i as isize - self.n_half as isize)
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.node(i)).collect()
    }

    /// `Some(m)` when `t` is within rounding of the lattice point `m·h`.
    pub fn lattice_index(&self, t: f64) -> Option<isize> {
        let r = t / self.step();
        let m = r.round();
        if (r - m).abs() <= 1e-9 * r.abs().max(1.0) {
            Some(m as isize)
        } else {
            None
        }
    }
}

/// Function on the compactified line, continuous at 0.
#[derive(Debug, Clone, PartialEq)]
pub struct LineFn {
    grid: Grid,
    values: Vec<f64>,
    lim_minus: f64,
    lim_plus: f64,
}

impl LineFn {
    pub fn new(grid: Grid, values: Vec<f64>, lim_minus: f64, lim_plus: f64) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} node values, got {}",
                grid.len(),
                values.len()
            )));
        }
        Ok(Self {
            grid,
            values,
            lim_minus,
            lim_plus,
        })
    }

    /// Samples `f` at every node.
    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> f64, lim_minus: f64, lim_plus: f64) -> Self {
        let values = (0..grid.len()).map(|i| f(grid.node(i))).collect();
        Self {
            grid,
            values,
            lim_minus,
            lim_plus,
        }
    }

    pub fn constant(grid: Grid, c: f64) -> Self {
        Self {
            grid,
            values: vec![c; grid.len()],
            lim_minus: c,
            lim_plus: c,
        }
    }

    pub fn zero(grid: Grid) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn lim_minus(&self) -> f64 {
        self.lim_minus
    }

    pub fn lim_plus(&self) -> f64 {
        self.lim_plus
    }

    /// Value at the node with signed offset `k`; constant tails outside the grid.
    pub fn sample(&self, k: isize) -> f64 {
        let n = self.grid.n_half as isize;
        if k < -n {
            self.lim_minus
        } else if k > n {
            self.lim_plus
        } else {
            self.values[(k + n) as usize]
        }
    }

    pub fn at_zero(&self) -> f64 {
        self.values[self.grid.center()]
    }

    /// Linear interpolation between nodes, constant tails beyond ±X.
    pub fn eval(&self, x: f64) -> f64 {
        interpolate(
            &self.values,
            -self.grid.x_max,
            self.grid.step(),
            self.lim_minus,
            self.lim_plus,
            x,
        )
    }

    /// Supremum norm, including the limits at ±∞.
    pub fn sup_norm(&self) -> f64 {
        self.values
            .iter()
            .fold(self.lim_minus.abs().max(self.lim_plus.abs()), |m, v| {
                m.max(v.abs())
            })
    }

    /// `x ↦ f(−x)`.
    pub fn reflect(&self) -> Self {
        let mut values = self.values.clone();
        values.reverse();
        Self {
            grid: self.grid,
            values,
            lim_minus: self.lim_plus,
            lim_plus: self.lim_minus,
        }
    }

    pub fn even_part(&self) -> Self {
        (self + &self.reflect()) * 0.5
    }

    pub fn odd_part(&self) -> Self {
        (self - &self.reflect()) * 0.5
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
            lim_minus: f(self.lim_minus),
            lim_plus: f(self.lim_plus),
        }
    }

    /// Pointwise combination `f(self, other)`; panics on grid mismatch.
    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        assert_eq!(self.grid, other.grid, "grid mismatch");
        Self {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
            lim_minus: f(self.lim_minus, other.lim_minus),
            lim_plus: f(self.lim_plus, other.lim_plus),
        }
    }

    /// `Σ cᵢ fᵢ`; all terms must share one grid.
    pub fn combination(terms: &[(f64, &LineFn)]) -> Self {
        let (c0, f0) = terms[0];
        let mut out = f0.map(|v| c0 * v);
        for &(c, f) in &terms[1..] {
            out = out.zip_with(f, |a, b| a + c * b);
        }
        out
    }

    /// Largest slope between neighbouring nodes.
    pub fn lipschitz_estimate(&self) -> f64 {
        let h = self.grid.step();
        self.values
            .windows(2)
            .map(|w| (w[1] - w[0]).abs() / h)
            .fold(0.0, f64::max)
    }

    /// The same function viewed on ℝ♯ (both boundary values equal `f(0)`).
    pub fn to_sharp(&self) -> SharpFn {
        let c = self.grid.center();
        SharpFn {
            grid: self.grid,
            left: self.values[..=c].to_vec(),
            right: self.values[c..].to_vec(),
            lim_minus: self.lim_minus,
            lim_plus: self.lim_plus,
        }
    }

    /// Sup-norm distance; panics on grid mismatch.
    pub fn distance(&self, other: &Self) -> f64 {
        (self - other).sup_norm()
    }

    /// One-sided first and second derivatives at 0 from each branch:
    /// `(f′(0−), f′(0+), f″(0−), f″(0+))`.
    pub fn membrane_derivatives(&self) -> MembraneDerivatives {
        let c = self.grid.center();
        MembraneDerivatives::from_branches(&self.values[..=c], &self.values[c..], self.grid.step())
    }
}

impl Add for &LineFn {
    type Output = LineFn;
    fn add(self, rhs: &LineFn) -> LineFn {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &LineFn {
    type Output = LineFn;
    fn sub(self, rhs: &LineFn) -> LineFn {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Mul<f64> for LineFn {
    type Output = LineFn;
    fn mul(mut self, c: f64) -> LineFn {
        self.values.iter_mut().for_each(|v| *v *= c);
        self.lim_minus *= c;
        self.lim_plus *= c;
        self
    }
}

impl Neg for &LineFn {
    type Output = LineFn;
    fn neg(self) -> LineFn {
        self.map(|v| -v)
    }
}

/// Function on ℝ♯ = [−∞, 0−] ∪ [0+, ∞]: two branches with independent
/// boundary values at the membrane.
#[derive(Debug, Clone, PartialEq)]
pub struct SharpFn {
    grid: Grid,
    /// values at nodes −X, …, 0; the last entry is f(0−)
    left: Vec<f64>,
    /// values at nodes 0, …, X; the first entry is f(0+)
    right: Vec<f64>,
    lim_minus: f64,
    lim_plus: f64,
}

impl SharpFn {
    pub fn new(
        grid: Grid,
        left: Vec<f64>,
        right: Vec<f64>,
        lim_minus: f64,
        lim_plus: f64,
    ) -> Result<Self> {
        let m = grid.n_half + 1;
        if left.len() != m || right.len() != m {
            return Err(Error::InvalidArgument(format!(
                "each branch needs {m} values, got {} and {}",
                left.len(),
                right.len()
            )));
        }
        Ok(Self {
            grid,
            left,
            right,
            lim_minus,
            lim_plus,
        })
    }

    /// Samples `fl` on the nodes of the left branch (including `fl(0)` as f(0−))
    /// and `fr` on the right branch.
    pub fn from_branches(
        grid: Grid,
        fl: impl Fn(f64) -> f64,
        fr: impl Fn(f64) -> f64,
        lim_minus: f64,
        lim_plus: f64,
    ) -> Self {
        let n = grid.n_half as isize;
        let left = (-n..=0).map(|k| fl(grid.signed_node(k))).collect();
        let right = (0..=n).map(|k| fr(grid.signed_node(k))).collect();
        Self {
            grid,
            left,
            right,
            lim_minus,
            lim_plus,
        }
    }

    pub fn constant(grid: Grid, c: f64) -> Self {
        let m = grid.n_half + 1;
        Self {
            grid,
            left: vec![c; m],
            right: vec![c; m],
            lim_minus: c,
            lim_plus: c,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn left(&self) -> &[f64] {
        &self.left
    }

    pub fn right(&self) -> &[f64] {
        &self.right
    }

    pub fn lim_minus(&self) -> f64 {
        self.lim_minus
    }

    pub fn lim_plus(&self) -> f64 {
        self.lim_plus
    }

    /// f(0−)
    pub fn at_zero_minus(&self) -> f64 {
        self.left[self.grid.n_half]
    }

    /// f(0+)
    pub fn at_zero_plus(&self) -> f64 {
        self.right[0]
    }

    /// Value at the node with signed offset `k`; `k = 0` is ambiguous and
    /// resolved by `right_side`.
    pub fn sample(&self, k: isize, right_side: bool) -> f64 {
        let n = self.grid.n_half as isize;
        match (k, right_side) {
            (k, _) if k < -n => self.lim_minus,
            (k, _) if k > n => self.lim_plus,
            (0, true) => self.right[0],
            (0, false) => self.left[self.grid.n_half],
            (k, _) if k < 0 => self.left[(k + n) as usize],
            (k, _) => self.right[k as usize],
        }
    }

    /// Interpolated value on the left branch, `x ≤ 0`.
    pub fn eval_left(&self, x: f64) -> f64 {
        let h = self.grid.step();
        interpolate(
            &self.left,
            -self.grid.x_max,
            h,
            self.lim_minus,
            self.at_zero_minus(),
            x,
        )
    }

    /// Interpolated value on the right branch, `x ≥ 0`.
    pub fn eval_right(&self, x: f64) -> f64 {
        let h = self.grid.step();
        interpolate(&self.right, 0.0, h, self.at_zero_plus(), self.lim_plus, x)
    }

    /// Interpolated value; `x = 0` is read from the branch selected by `right_side`.
    pub fn eval(&self, x: f64, right_side: bool) -> f64 {
        if x < 0.0 || (x == 0.0 && !right_side) {
            self.eval_left(x)
        } else {
            self.eval_right(x)
        }
    }

    pub fn sup_norm(&self) -> f64 {
        self.left
            .iter()
            .chain(&self.right)
            .fold(self.lim_minus.abs().max(self.lim_plus.abs()), |m, v| {
                m.max(v.abs())
            })
    }

    /// `x ↦ f(−x)`: branches trade places, so do the boundary values and limits.
    pub fn reflect(&self) -> Self {
        let mut left = self.right.clone();
        left.reverse();
        let mut right = self.left.clone();
        right.reverse();
        Self {
            grid: self.grid,
            left,
            right,
            lim_minus: self.lim_plus,
            lim_plus: self.lim_minus,
        }
    }

    pub fn even_part(&self) -> Self {
        (self + &self.reflect()) * 0.5
    }

    pub fn odd_part(&self) -> Self {
        (self - &self.reflect()) * 0.5
    }

    /// f(0+) − f(0−)
    pub fn jump(&self) -> f64 {
        self.at_zero_plus() - self.at_zero_minus()
    }

    pub fn is_continuous(&self, tol: f64) -> bool {
        self.jump().abs() <= tol
    }

    pub fn is_opposite(&self, tol: f64) -> bool {
        (self.at_zero_plus() + self.at_zero_minus()).abs() <= tol
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            grid: self.grid,
            left: self.left.iter().map(|&v| f(v)).collect(),
            right: self.right.iter().map(|&v| f(v)).collect(),
            lim_minus: f(self.lim_minus),
            lim_plus: f(self.lim_plus),
        }
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        assert_eq!(self.grid, other.grid, "grid mismatch");
        let zip = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(&x, &y)| f(x, y)).collect();
        Self {
            grid: self.grid,
            left: zip(&self.left, &other.left),
            right: zip(&self.right, &other.right),
            lim_minus: f(self.lim_minus, other.lim_minus),
            lim_plus: f(self.lim_plus, other.lim_plus),
        }
    }

    pub fn distance(&self, other: &Self) -> f64 {
        (self - other).sup_norm()
    }

    /// Continuous view; fails when the jump exceeds `tol`. The value at 0 is
    /// the mean of the two boundary values.
    pub fn to_line(&self, tol: f64) -> Result<LineFn> {
        if !self.is_continuous(tol) {
            return Err(Error::NotContinuous { jump: self.jump() });
        }
        let n = self.grid.n_half;
        let mut values = Vec::with_capacity(self.grid.len());
        values.extend_from_slice(&self.left[..n]);
        values.push(0.5 * (self.at_zero_minus() + self.at_zero_plus()));
        values.extend_from_slice(&self.right[1..]);
        Ok(LineFn {
            grid: self.grid,
            values,
            lim_minus: self.lim_minus,
            lim_plus: self.lim_plus,
        })
    }

    /// The isometry J: negates the left branch and merges at 0 with value f(0+).
    pub fn j_iso(&self, tol: f64) -> Result<LineFn> {
        if !self.is_opposite(tol) {
            return Err(Error::NotOpposite {
                left: self.at_zero_minus(),
                right: self.at_zero_plus(),
            });
        }
        let n = self.grid.n_half;
        let mut values = Vec::with_capacity(self.grid.len());
        values.extend(self.left[..n].iter().map(|v| -v));
        values.extend_from_slice(&self.right);
        Ok(LineFn {
            grid: self.grid,
            values,
            lim_minus: -self.lim_minus,
            lim_plus: self.lim_plus,
        })
    }

    /// J⁻¹: the left branch is negated, so f(0−) = −g(0) and f(0+) = g(0).
    pub fn j_inv(g: &LineFn) -> Self {
        let c = g.grid.center();
        Self {
            grid: g.grid,
            left: g.values[..=c].iter().map(|v| -v).collect(),
            right: g.values[c..].to_vec(),
            lim_minus: -g.lim_minus,
            lim_plus: g.lim_plus,
        }
    }

    /// One-sided derivatives at the membrane, each from its own branch.
    pub fn membrane_derivatives(&self) -> MembraneDerivatives {
        MembraneDerivatives::from_branches(&self.left, &self.right, self.grid.step())
    }

    /// Largest slope between neighbouring nodes of the same branch.
    pub fn lipschitz_estimate(&self) -> f64 {
        let h = self.grid.step();
        self.left
            .windows(2)
            .chain(self.right.windows(2))
            .map(|w| (w[1] - w[0]).abs() / h)
            .fold(0.0, f64::max)
    }
}

impl Add for &SharpFn {
    type Output = SharpFn;
    fn add(self, rhs: &SharpFn) -> SharpFn {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &SharpFn {
    type Output = SharpFn;
    fn sub(self, rhs: &SharpFn) -> SharpFn {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Mul<f64> for SharpFn {
    type Output = SharpFn;
    fn mul(self, c: f64) -> SharpFn {
        self.map(|v| c * v)
    }
}

/// An element of 𝒞 = (𝔉C[−∞,∞])²: two whole-line functions on one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FnPair {
    pub f1: LineFn,
    pub f2: LineFn,
}

impl FnPair {
    pub fn new(f1: LineFn, f2: LineFn) -> Result<Self> {
        if f1.grid != f2.grid {
            return Err(Error::GridMismatch);
        }
        Ok(Self { f1, f2 })
    }

    pub fn grid(&self) -> &Grid {
        &self.f1.grid
    }

    /// max of the two sup-norms
    pub fn sup_norm(&self) -> f64 {
        self.f1.sup_norm().max(self.f2.sup_norm())
    }

    pub fn distance(&self, other: &Self) -> f64 {
        self.f1.distance(&other.f1).max(self.f2.distance(&other.f2))
    }

    /// R: `f₁` on x < 0, `f₂` on x > 0; f(0−) = f₁(0), f(0+) = f₂(0).
    pub fn restrict(&self) -> Result<SharpFn> {
        if self.f1.grid != self.f2.grid {
            return Err(Error::GridMismatch);
        }
        let c = self.f1.grid.center();
        Ok(SharpFn {
            grid: self.f1.grid,
            left: self.f1.values[..=c].to_vec(),
            right: self.f2.values[c..].to_vec(),
            lim_minus: self.f1.lim_minus,
            lim_plus: self.f2.lim_plus,
        })
    }

    pub fn map(&self, f: impl Fn(&LineFn) -> LineFn) -> Self {
        Self {
            f1: f(&self.f1),
            f2: f(&self.f2),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            f1: &self.f1 + &other.f1,
            f2: &self.f2 + &other.f2,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            f1: &self.f1 - &other.f1,
            f2: &self.f2 - &other.f2,
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            f1: self.f1.clone() * c,
            f2: self.f2.clone() * c,
        }
    }
}

/// Free-function form of [`FnPair::restrict`].
pub fn restrict(p: &FnPair) -> Result<SharpFn> {
    p.restrict()
}

/// One-sided derivatives of a function at the membrane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MembraneDerivatives {
    /// f′(0−)
    pub d1_minus: f64,
    /// f′(0+)
    pub d1_plus: f64,
    /// f″(0−)
    pub d2_minus: f64,
    /// f″(0+)
    pub d2_plus: f64,
}

impl MembraneDerivatives {
    /// `left` ends at the membrane, `right` starts at it. Second-order
    /// one-sided stencils: 3 points for f′, 4 points for f″.
    pub(crate) fn from_branches(left: &[f64], right: &[f64], h: f64) -> Self {
        let m = left.len() - 1;
        let (l0, l1, l2, l3) = (left[m], left[m - 1], left[m - 2], left[m - 3]);
        let (r0, r1, r2, r3) = (right[0], right[1], right[2], right[3]);
        Self {
            d1_minus: (3.0 * l0 - 4.0 * l1 + l2) / (2.0 * h),
            d1_plus: (-3.0 * r0 + 4.0 * r1 - r2) / (2.0 * h),
            d2_minus: (2.0 * l0 - 5.0 * l1 + 4.0 * l2 - l3) / (h * h),
            d2_plus: (2.0 * r0 - 5.0 * r1 + 4.0 * r2 - r3) / (h * h),
        }
    }
}

/// Piecewise-linear interpolation of `values` sampled at `x0 + k·h`, with
/// constant `below`/`above` outside the sampled interval.
pub(crate) fn interpolate(values: &[f64], x0: f64, h: f64, below: f64, above: f64, x: f64) -> f64 {
    let last = values.len() - 1;
    let r = (x - x0) / h;
    if r < 0.0 {
        return below;
    }
    if r > last as f64 {
        return above;
    }
    let k = (r.floor() as usize).min(last - 1);
    let w = r - k as f64;
    if w == 0.0 {
        values[k]
    } else {
        values[k] + w * (values[k + 1] - values[k])
    }
}
