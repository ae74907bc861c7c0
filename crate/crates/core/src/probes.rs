//! Named test functions with closed-form limits at ±∞, shared by the tests,
//! the acceptance suite and the command-line front end.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::function_space::{Grid, LineFn, SharpFn};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Probe {
    /// `1`
    Const,
    /// `0` on the left branch, `1` on the right branch
    Step,
    /// `tanh x`
    Tanh,
    /// `e^{−x²}`
    Gauss,
    /// `e^{−(x−1)²}`
    GaussShift,
    /// `J⁻¹ tanh`: `−tanh x` on the left branch, `tanh x` on the right
    OvTanh,
    /// `J⁻¹ e^{−x²}`
    OvGauss,
}

impl Probe {
    pub const ALL: [Probe; 7] = [
        Probe::Const,
        Probe::Step,
        Probe::Tanh,
        Probe::Gauss,
        Probe::GaussShift,
        Probe::OvTanh,
        Probe::OvGauss,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Probe::Const => "const",
            Probe::Step => "step",
            Probe::Tanh => "tanh",
            Probe::Gauss => "gauss",
            Probe::GaussShift => "gauss-shift",
            Probe::OvTanh => "ov-tanh",
            Probe::OvGauss => "ov-gauss",
        }
    }

    /// Whether the probe is continuous at 0.
    pub fn is_continuous(&self) -> bool {
        matches!(
            self,
            Probe::Const | Probe::Tanh | Probe::Gauss | Probe::GaussShift | Probe::OvTanh
        )
    }

    /// Whether the probe has opposite boundary values at 0.
    pub fn is_opposite(&self) -> bool {
        matches!(self, Probe::OvTanh | Probe::OvGauss | Probe::Tanh)
    }

    /// Lipschitz constant of the probe (of `J f` for the opposite-value probes),
    /// `None` for the step.
    pub fn lipschitz(&self) -> Option<f64> {
        match self {
            Probe::Const => Some(0.0),
            Probe::Step => None,
            Probe::Tanh | Probe::OvTanh => Some(1.0),
            Probe::Gauss | Probe::GaussShift | Probe::OvGauss => {
                Some((2.0f64).sqrt() * (-0.5f64).exp())
            }
        }
    }

    /// The whole-line function, for continuous probes.
    pub fn line(&self, grid: Grid) -> Result<LineFn> {
        let gauss = |x: f64| (-x * x).exp();
        match self {
            Probe::Const => Ok(LineFn::constant(grid, 1.0)),
            Probe::Tanh => Ok(LineFn::from_fn(grid, f64::tanh, -1.0, 1.0)),
            Probe::Gauss => Ok(LineFn::from_fn(grid, gauss, 0.0, 0.0)),
            Probe::GaussShift => Ok(LineFn::from_fn(grid, |x| gauss(x - 1.0), 0.0, 0.0)),
            other => Err(Error::NotContinuous {
                jump: other.sharp(grid).jump(),
            }),
        }
    }

    /// The probe as a function on ℝ♯.
    pub fn sharp(&self, grid: Grid) -> SharpFn {
        match self {
            Probe::Step => SharpFn::from_branches(grid, |_| 0.0, |_| 1.0, 0.0, 1.0),
            Probe::OvTanh => SharpFn::j_inv(&Probe::Tanh.line(grid).expect("continuous")),
            Probe::OvGauss => SharpFn::j_inv(&Probe::Gauss.line(grid).expect("continuous")),
            cont => cont.line(grid).expect("continuous").to_sharp(),
        }
    }
}

impl fmt::Display for Probe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Probe {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Probe::ALL
            .iter()
            .copied()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown probe '{s}'")))
    }
}
