//! Cosine families. The basic family translates symmetrically,
//! `C(t)f(x) = ½[f(x+t) + f(x−t)]`; its Cartesian square acts on pairs; the
//! four membrane families are obtained by the Kelvin factorisation
//! `C_family(t) = R · C_D(t) · E_family`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extensions::{extend_os_with_tol, extend_skew, extend_so, extend_weks_with_tol};
use crate::function_space::{FnPair, LineFn, MembraneParams, SharpFn, MEMBERSHIP_TOL};

/// The four membrane models.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    /// snapping-out Brownian motion
    #[serde(rename = "s-o")]
    SnappingOut,
    /// skew Brownian motion
    #[serde(rename = "skew")]
    Skew,
    /// complementary snapping family on opposite-value functions
    #[serde(rename = "o-s")]
    OppositeSnapping,
    /// limit of the complementary snapping family
    #[serde(rename = "weks")]
    Weks,
}

impl Family {
    pub const ALL: [Family; 4] = [
        Family::SnappingOut,
        Family::Skew,
        Family::OppositeSnapping,
        Family::Weks,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Family::SnappingOut => "s-o",
            Family::Skew => "skew",
            Family::OppositeSnapping => "o-s",
            Family::Weks => "weks",
        }
    }

    /// Whether the family acts on opposite-value functions.
    pub fn is_opposite(&self) -> bool {
        matches!(self, Family::OppositeSnapping | Family::Weks)
    }

    /// Extension operator of the family.
    pub fn extend(&self, p: &MembraneParams, f: &SharpFn, tol: f64) -> Result<FnPair> {
        match self {
            Family::SnappingOut => Ok(extend_so(p, f)),
            Family::Skew => Ok(extend_skew(p, &f.to_line(tol)?)),
            Family::OppositeSnapping => extend_os_with_tol(p, f, tol),
            Family::Weks => extend_weks_with_tol(p, f, tol),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "s-o" | "so" | "snapping-out" => Ok(Family::SnappingOut),
            "skew" => Ok(Family::Skew),
            "o-s" | "os" => Ok(Family::OppositeSnapping),
            "weks" => Ok(Family::Weks),
            other => Err(Error::Parse(format!("unknown family '{other}'"))),
        }
    }
}

/// `½[g(x+t) + g(x−t)]` at the node with signed offset `k`.
fn translate_at(g: &LineFn, k: isize, t: f64, lattice: Option<isize>) -> f64 {
    match lattice {
        Some(m) => 0.5 * (g.sample(k + m) + g.sample(k - m)),
        None => {
            let x = g.grid().signed_node(k);
            0.5 * (g.eval(x + t) + g.eval(x - t))
        }
    }
}

/// `C(t)f(x) = ½[f(x+t) + f(x−t)]`. Lattice shifts `t = m·h` use node values
/// directly; other shifts interpolate linearly.
pub fn basic_cosine(t: f64, f: &LineFn) -> LineFn {
    let g = *f.grid();
    let lattice = g.lattice_index(t);
    let n = g.n_half() as isize;
    let values = (-n..=n).map(|k| translate_at(f, k, t, lattice)).collect();
    LineFn::new(g, values, f.lim_minus(), f.lim_plus()).expect("grid length")
}

/// `C_D(t)(f₁, f₂) = (C(t)f₁, C(t)f₂)`.
pub fn product_cosine(t: f64, p: &FnPair) -> FnPair {
    FnPair {
        f1: basic_cosine(t, &p.f1),
        f2: basic_cosine(t, &p.f2),
    }
}

/// `R · C_D(t)` evaluated directly: only the left half of the first component
/// and the right half of the second are computed.
pub fn restricted_cosine(t: f64, pair: &FnPair) -> SharpFn {
    let g = *pair.grid();
    let lattice = g.lattice_index(t);
    let n = g.n_half() as isize;
    let left = (-n..=0)
        .map(|k| translate_at(&pair.f1, k, t, lattice))
        .collect();
    let right = (0..=n)
        .map(|k| translate_at(&pair.f2, k, t, lattice))
        .collect();
    SharpFn::new(g, left, right, pair.f1.lim_minus(), pair.f2.lim_plus()).expect("branch lengths")
}

/// A membrane cosine family applied to one function: the extension is
/// computed once and each `at(t)` costs a single translation pass.
#[derive(Debug, Clone)]
pub struct KelvinCosine {
    family: Family,
    pair: FnPair,
}

impl KelvinCosine {
    pub fn new(family: Family, p: &MembraneParams, f: &SharpFn) -> Result<Self> {
        Self::with_tol(family, p, f, MEMBERSHIP_TOL)
    }

    pub fn with_tol(family: Family, p: &MembraneParams, f: &SharpFn, tol: f64) -> Result<Self> {
        Ok(Self {
            family,
            pair: family.extend(p, f, tol)?,
        })
    }

    /// Uses a precomputed extension pair.
    pub fn from_pair(family: Family, pair: FnPair) -> Self {
        Self { family, pair }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn pair(&self) -> &FnPair {
        &self.pair
    }

    pub fn at(&self, t: f64) -> SharpFn {
        restricted_cosine(t, &self.pair)
    }
}

/// `C_family(t) f = R C_D(t) E_family f`.
pub fn kelvin_cosine(family: Family, p: &MembraneParams, t: f64, f: &SharpFn) -> Result<SharpFn> {
    Ok(KelvinCosine::new(family, p, f)?.at(t))
}

/// The skew family on continuous functions; the output is again continuous.
pub fn skew_cosine(p: &MembraneParams, t: f64, f: &LineFn) -> LineFn {
    restricted_cosine(t, &extend_skew(p, f))
        .to_line(f64::INFINITY)
        .expect("infinite tolerance")
}

/// `2(C(t)f − f)/t²` at `t = √h`, an estimate of the generator `f ↦ f″`.
pub fn generator_estimate(family: Family, p: &MembraneParams, f: &SharpFn) -> Result<SharpFn> {
    let t = f.grid().step().sqrt();
    let c = kelvin_cosine(family, p, t, f)?;
    Ok((&c - f) * (2.0 / (t * t)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function_space::Grid;
    use approx::assert_abs_diff_eq;

    fn grid() -> Grid {
        Grid::new(8.0, 400).unwrap()
    }

    fn gauss(g: Grid) -> LineFn {
        LineFn::from_fn(g, |x| (-x * x).exp(), 0.0, 0.0)
    }

    #[test]
    fn basic_identity_constant_and_closed_form() {
        let g = grid();
        let f = gauss(g);
        assert_eq!(basic_cosine(0.0, &f), f);
        let c = LineFn::constant(g, 1.5);
        assert_eq!(basic_cosine(0.77, &c), c);
        assert_abs_diff_eq!(
            basic_cosine(1.0, &f).at_zero(),
            (-1.0f64).exp(),
            epsilon = 1e-15
        );
        assert_eq!(basic_cosine(-1.0, &f), basic_cosine(1.0, &f));
    }

    #[test]
    fn product_componentwise() {
        let g = grid();
        let p = FnPair::new(
            gauss(g),
            LineFn::from_fn(g, |x| (-(x - 1.0) * (x - 1.0)).exp(), 0.0, 0.0),
        )
        .unwrap();
        let q = product_cosine(1.0, &p);
        assert_abs_diff_eq!(q.f1.at_zero(), (-1.0f64).exp(), epsilon = 1e-15);
        assert_abs_diff_eq!(
            q.f2.at_zero(),
            0.5 * (1.0 + (-4.0f64).exp()),
            epsilon = 1e-15
        );
        assert_eq!(product_cosine(0.0, &p), p);
        let cp = FnPair::new(LineFn::constant(g, 1.0), LineFn::constant(g, -2.0)).unwrap();
        assert_eq!(product_cosine(2.3, &cp), cp);
    }

    #[test]
    fn dalembert_on_lattice() {
        let g = grid();
        let f = gauss(g);
        let h = g.step();
        for (m, l) in [(10, 30), (57, 3), (100, 100)] {
            let (t, s) = (m as f64 * h, l as f64 * h);
            let lhs = basic_cosine(t, &basic_cosine(s, &f)) * 2.0;
            let rhs = &basic_cosine(s + t, &f) + &basic_cosine(t - s, &f);
            assert!(lhs.distance(&rhs) < 1e-12);
        }
    }

    #[test]
    fn kelvin_at_zero_is_identity() {
        let g = grid();
        let p = MembraneParams::new(0.2, 0.1).unwrap();
        let f = SharpFn::from_branches(g, |x| (-x * x).exp(), |x| 0.3 * (-x * x).exp(), 0.0, 0.0);
        assert_eq!(kelvin_cosine(Family::SnappingOut, &p, 0.0, &f).unwrap(), f);
        let ov = SharpFn::j_inv(&gauss(g));
        assert_eq!(
            kelvin_cosine(Family::OppositeSnapping, &p, 0.0, &ov).unwrap(),
            ov
        );
        assert_eq!(kelvin_cosine(Family::Weks, &p, 0.0, &ov).unwrap(), ov);
        let c = gauss(g).to_sharp();
        assert_eq!(kelvin_cosine(Family::Skew, &p, 0.0, &c).unwrap(), c);
    }

    #[test]
    fn kelvin_rejects_wrong_space() {
        let g = grid();
        let p = MembraneParams::new(0.2, 0.1).unwrap();
        let f = SharpFn::from_branches(g, |_| 1.0, |_| 2.0, 1.0, 2.0);
        assert!(kelvin_cosine(Family::Skew, &p, 1.0, &f).is_err());
        assert!(kelvin_cosine(Family::Weks, &p, 1.0, &f).is_err());
        assert!(kelvin_cosine(Family::OppositeSnapping, &p, 1.0, &f).is_err());
    }

    #[test]
    fn skew_gaussian_oracle() {
        let g = grid();
        let p = MembraneParams::new(0.2, 0.1).unwrap();
        let f = gauss(g);
        let out = skew_cosine(&p, 1.0, &f);
        let fl = extend_skew(&p, &f).f1;
        assert_abs_diff_eq!(
            out.at_zero(),
            0.5 * (fl.eval(-1.0) + fl.eval(1.0)),
            epsilon = 1e-15
        );
        // f̃_ℓ(1) = (1/3)e^{-1} + (2/3)e^{-1} = e^{-1}
        assert_abs_diff_eq!(out.at_zero(), (-1.0f64).exp(), epsilon = 1e-14);

        let shifted = LineFn::from_fn(g, |x| (-(x - 1.0) * (x - 1.0)).exp(), 0.0, 0.0);
        let out = skew_cosine(&p, 1.0, &shifted);
        assert_abs_diff_eq!(out.eval(-0.5), 0.502_599_211_688_739_7, epsilon = 1e-14);
        assert_abs_diff_eq!(out.eval(0.5), 0.554_333_596_901_558, epsilon = 1e-14);
    }

    #[test]
    fn family_names_round_trip() {
        for fam in Family::ALL {
            assert_eq!(fam.name().parse::<Family>().unwrap(), fam);
        }
        assert!("heat".parse::<Family>().is_err());
    }

    #[test]
    fn generator_of_smooth_even_function() {
        let g = Grid::new(8.0, 1600).unwrap();
        let p = MembraneParams::new(1.0, 1.0).unwrap();
        let f = gauss(g).to_sharp();
        let a = generator_estimate(Family::Skew, &p, &f).unwrap();
        // f″(0) = −2
        assert!((a.at_zero_plus() + 2.0).abs() < 0.05);
    }
}
