//! One-sided exponential kernels: the half-line convolution
//! `e_a * f (x) = ∫₀ˣ e^{−a(x−y)} f(y) dy`, whole-line sweeps in both
//! directions, and the Dirac sequences built from them.
//!
//! All integrals use the exact-exponential recurrence
//! `g(x+h) = e^{−ah} g(x) + ∫₀ʰ e^{−a(h−s)} f(x+s) ds`, with `f` replaced on
//! each cell by its linear interpolant plus a curvature correction. The
//! kernel is integrated exactly per cell, so the scheme is stable for any
//! `a·h`, including the steep kernels of large `n`.

use crate::error::{Error, Result};
use crate::function_space::{Grid, LineFn, SharpFn};

/// The kernel `e_a(x) = e^{−ax}`, `a > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpKernel {
    a: f64,
}

impl ExpKernel {
    pub fn new(a: f64) -> Result<Self> {
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "kernel rate must be positive, got {a}"
            )));
        }
        Ok(Self { a })
    }

    pub fn rate(&self) -> f64 {
        self.a
    }

    pub fn eval(&self, x: f64) -> f64 {
        (-self.a * x).exp()
    }
}

/// Weights of one recurrence step
/// `g₊ = decay·g + w_near·f₊ + w_far·f₀ + w_curv·κ`, where `f₊` is the sample
/// at the end of the cell nearest to the evaluation point.
#[derive(Debug, Clone, Copy)]
struct CellWeights {
    decay: f64,
    w_near: f64,
    w_far: f64,
    w_curv: f64,
}

impl CellWeights {
    fn new(a: f64, h: f64) -> Self {
        let [m0, m1, m2] = exp_moments(a * h);
        // moments scale as h^{k+1}; the interpolant is f₀ + (f₊−f₀)σ + ½κh²σ(σ−1)
        Self {
            decay: (-a * h).exp(),
            w_near: h * m1,
            w_far: h * (m0 - m1),
            w_curv: 0.5 * h * h * h * (m2 - m1),
        }
    }

    fn step(&self, g: f64, far: f64, near: f64, curv: f64) -> f64 {
        self.decay * g + self.w_near * near + self.w_far * far + self.w_curv * curv
    }
}

/// `m_k(u) = ∫₀¹ σᵏ e^{−u(1−σ)} dσ` for k = 0, 1, 2.
fn exp_moments(u: f64) -> [f64; 3] {
    if u < 0.5 {
        // m_k(u) = k! Σ_j (−u)ʲ / (k+j+1)!
        let mut out = [0.0; 3];
        for (k, slot) in out.iter_mut().enumerate() {
            let mut denom: f64 = (1..=k + 1).map(|i| i as f64).product();
            let kfact: f64 = (1..=k).map(|i| i as f64).product();
            let mut term = 1.0 / denom;
            let mut sum = 0.0;
            for j in 0..25 {
                sum += term;
                denom = (k + j + 2) as f64;
                term *= -u / denom;
            }
            *slot = kfact * sum;
        }
        out
    } else {
        let e = (-u).exp();
        let j0 = (1.0 - e) / u;
        let j1 = (1.0 - e * (1.0 + u)) / (u * u);
        let j2 = (2.0 - e * (2.0 + 2.0 * u + u * u)) / (u * u * u);
        [j0, j0 - j1, j0 - 2.0 * j1 + j2]
    }
}

/// Second-difference curvature of each cell `[k, k+1]`, averaged over the two
/// end nodes. No stencil has the break node `brk` in its interior.
fn cell_curvatures(values: &[f64], h: f64, brk: Option<usize>) -> Vec<f64> {
    let n = values.len();
    let d2 = |c: usize| (values[c - 1] - 2.0 * values[c] + values[c + 1]) / (h * h);
    let centred = |c: usize| c >= 1 && c + 1 < n && brk != Some(c);
    (0..n.saturating_sub(1))
        .map(|k| match (centred(k), centred(k + 1)) {
            (true, true) => 0.5 * (d2(k) + d2(k + 1)),
            (true, false) => d2(k),
            (false, true) => d2(k + 1),
            (false, false) => 0.0,
        })
        .collect()
}

/// Left-to-right sweep: `out[k] = ∫_{−∞}^{x_k} e^{−a(x_k−y)} f(y) dy`, where
/// the part left of the first node is summarised by `init = out[0]`.
pub fn sweep_forward(a: f64, h: f64, values: &[f64], init: f64, brk: Option<usize>) -> Vec<f64> {
    let w = CellWeights::new(a, h);
    let curv = cell_curvatures(values, h, brk);
    let mut out = Vec::with_capacity(values.len());
    let mut g = init;
    out.push(g);
    for k in 0..values.len().saturating_sub(1) {
        g = w.step(g, values[k], values[k + 1], curv[k]);
        out.push(g);
    }
    out
}

/// Right-to-left sweep: `out[k] = ∫_{x_k}^{∞} e^{a(x_k−y)} f(y) dy`, with the
/// part right of the last node summarised by `init = out[last]`.
pub fn sweep_backward(a: f64, h: f64, values: &[f64], init: f64, brk: Option<usize>) -> Vec<f64> {
    let n = values.len();
    let rev: Vec<f64> = values.iter().rev().copied().collect();
    let mut out = sweep_forward(a, h, &rev, init, brk.map(|b| n - 1 - b));
    out.reverse();
    out
}

/// A function on the closed half-line `[0, ∞]`, sampled at `0, h, …, X`.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfLineFn {
    grid: Grid,
    values: Vec<f64>,
    lim: f64,
}

impl HalfLineFn {
    pub fn new(grid: Grid, values: Vec<f64>, lim: f64) -> Result<Self> {
        if values.len() != grid.n_half() + 1 {
            return Err(Error::InvalidArgument(format!(
                "expected {} half-line values, got {}",
                grid.n_half() + 1,
                values.len()
            )));
        }
        Ok(Self { grid, values, lim })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> f64, lim: f64) -> Self {
        let values = (0..=grid.n_half() as isize)
            .map(|k| f(grid.signed_node(k)))
            .collect();
        Self { grid, values, lim }
    }

    /// The right branch of `f`, including f(0+).
    pub fn right_branch(f: &SharpFn) -> Self {
        Self {
            grid: *f.grid(),
            values: f.right().to_vec(),
            lim: f.lim_plus(),
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn lim(&self) -> f64 {
        self.lim
    }

    pub fn sup_norm(&self) -> f64 {
        self.values
            .iter()
            .fold(self.lim.abs(), |m, v| m.max(v.abs()))
    }
}

/// `e_a * f` on the half-line. The limit at ∞ is `f(∞)/a`.
pub fn exp_conv(a: f64, f: &HalfLineFn) -> Result<HalfLineFn> {
    let k = ExpKernel::new(a)?;
    Ok(HalfLineFn {
        grid: f.grid,
        values: exp_conv_values(&k, f.grid.step(), &f.values),
        lim: f.lim / a,
    })
}

/// `e_a * f` for values sampled at `0, h, 2h, …`.
pub(crate) fn exp_conv_values(k: &ExpKernel, h: f64, values: &[f64]) -> Vec<f64> {
    sweep_forward(k.rate(), h, values, 0.0, None)
}

fn dirac_rate(n: u32, a: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    Ok(ExpKernel::new(n as f64 * a)?.rate())
}

/// `x ↦ na ∫_{−∞}^x e^{−na(x−y)} φ(y) dy`.
pub fn dirac_left(n: u32, a: f64, phi: &LineFn) -> Result<LineFn> {
    let r = dirac_rate(n, a)?;
    let g = phi.grid();
    let vals = sweep_forward(
        r,
        g.step(),
        phi.values(),
        phi.lim_minus() / r,
        Some(g.center()),
    );
    LineFn::new(
        *g,
        vals.into_iter().map(|v| r * v).collect(),
        phi.lim_minus(),
        phi.lim_plus(),
    )
}

/// `x ↦ na ∫_x^∞ e^{−na(y−x)} φ(y) dy`, the mirror image of [`dirac_left`].
pub fn dirac_right(n: u32, a: f64, phi: &LineFn) -> Result<LineFn> {
    let r = dirac_rate(n, a)?;
    let g = phi.grid();
    let vals = sweep_backward(
        r,
        g.step(),
        phi.values(),
        phi.lim_plus() / r,
        Some(g.center()),
    );
    LineFn::new(
        *g,
        vals.into_iter().map(|v| r * v).collect(),
        phi.lim_minus(),
        phi.lim_plus(),
    )
}

/// `x ↦ na·(e_{na} * φ)(x) + e^{−nax} φ(0)` on the half-line.
pub fn dirac_halfline(n: u32, a: f64, phi: &HalfLineFn) -> Result<HalfLineFn> {
    let r = dirac_rate(n, a)?;
    let conv = exp_conv(r, phi)?;
    let phi0 = phi.values[0];
    let values = conv
        .values
        .iter()
        .enumerate()
        .map(|(k, c)| r * c + (-r * phi.grid.signed_node(k as isize)).exp() * phi0)
        .collect();
    Ok(HalfLineFn {
        grid: phi.grid,
        values,
        lim: phi.lim,
    })
}
