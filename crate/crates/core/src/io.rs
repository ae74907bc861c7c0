//! JSON and CSV forms of grid functions.
//!
//! JSON: `{"grid":{"x_max":…,"n_half":…},"left":[…],"right":[…],"lim_minus":…,"lim_plus":…}`.
//! A whole-line function is written as the equivalent function on ℝ♯.
//!
//! CSV: two header comments `# lim_minus=…` and `# lim_plus=…`, a column
//! line, then one row per node. A function on ℝ♯ has two rows at the
//! membrane: `-0.0` carries f(0−) and `0.0` carries f(0+).
//!
//! Floats use Rust's shortest round-trip formatting, so output is
//! byte-identical across runs and parses back exactly.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function_space::{FnPair, Grid, LineFn, SharpFn};

/// Schema tag of JSON documents written by the command-line front end.
pub const SCHEMA: &str = "membranekit/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridRecord {
    pub x_max: f64,
    pub n_half: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionRecord {
    pub grid: GridRecord,
    pub left: Vec<f64>,
    pub right: Vec<f64>,
    pub lim_minus: f64,
    pub lim_plus: f64,
}

impl From<&SharpFn> for FunctionRecord {
    fn from(f: &SharpFn) -> Self {
        Self {
            grid: GridRecord {
                x_max: f.grid().x_max(),
                n_half: f.grid().n_half(),
            },
            left: f.left().to_vec(),
            right: f.right().to_vec(),
            lim_minus: f.lim_minus(),
            lim_plus: f.lim_plus(),
        }
    }
}

impl TryFrom<FunctionRecord> for SharpFn {
    type Error = Error;
    fn try_from(r: FunctionRecord) -> Result<Self> {
        let grid = Grid::new(r.grid.x_max, r.grid.n_half)?;
        SharpFn::new(grid, r.left, r.right, r.lim_minus, r.lim_plus)
    }
}

pub fn sharp_to_json(f: &SharpFn) -> Result<String> {
    Ok(serde_json::to_string(&FunctionRecord::from(f))?)
}

pub fn sharp_from_json(s: &str) -> Result<SharpFn> {
    serde_json::from_str::<FunctionRecord>(s)?.try_into()
}

pub fn line_to_json(f: &LineFn) -> Result<String> {
    sharp_to_json(&f.to_sharp())
}

/// Parses a record whose boundary values agree to within `tol`.
pub fn line_from_json(s: &str, tol: f64) -> Result<LineFn> {
    sharp_from_json(s)?.to_line(tol)
}

fn header(out: &mut String, lims: &[(&str, f64)], columns: &str) {
    for (name, v) in lims {
        let _ = writeln!(out, "# {name}={v:?}");
    }
    out.push_str(columns);
    out.push('\n');
}

pub fn sharp_to_csv(f: &SharpFn) -> String {
    let g = f.grid();
    let n = g.n_half() as isize;
    let mut out = String::new();
    header(
        &mut out,
        &[("lim_minus", f.lim_minus()), ("lim_plus", f.lim_plus())],
        "x,value",
    );
    for (i, v) in f.left().iter().enumerate() {
        let x = -g.signed_node(n - i as isize);
        let _ = writeln!(out, "{x:?},{v:?}");
    }
    for (k, v) in f.right().iter().enumerate() {
        let _ = writeln!(out, "{:?},{v:?}", g.signed_node(k as isize));
    }
    out
}

pub fn line_to_csv(f: &LineFn) -> String {
    let g = f.grid();
    let mut out = String::new();
    header(
        &mut out,
        &[("lim_minus", f.lim_minus()), ("lim_plus", f.lim_plus())],
        "x,value",
    );
    for (i, v) in f.values().iter().enumerate() {
        let _ = writeln!(out, "{:?},{v:?}", g.node(i));
    }
    out
}

/// Columns `x,f1,f2` with both components' limits in the header.
pub fn pair_to_csv(p: &FnPair) -> String {
    let g = p.grid();
    let mut out = String::new();
    header(
        &mut out,
        &[
            ("f1_lim_minus", p.f1.lim_minus()),
            ("f1_lim_plus", p.f1.lim_plus()),
            ("f2_lim_minus", p.f2.lim_minus()),
            ("f2_lim_plus", p.f2.lim_plus()),
        ],
        "x,f1,f2",
    );
    for (i, (a, b)) in p.f1.values().iter().zip(p.f2.values()).enumerate() {
        let _ = writeln!(out, "{:?},{a:?},{b:?}", g.node(i));
    }
    out
}

fn parse_f64(s: &str, what: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|e| Error::Parse(format!("bad {what} '{s}': {e}")))
}

/// Reads the output of [`sharp_to_csv`]. The grid is recovered from the rows.
pub fn sharp_from_csv(text: &str) -> Result<SharpFn> {
    let mut lim_minus = None;
    let mut lim_plus = None;
    let mut left = Vec::new();
    let mut right = Vec::new();
    let mut x_last = 0.0;
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
        if let Some(rest) = line.strip_prefix('#') {
            let (k, v) = rest
                .trim()
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("bad header line '{line}'")))?;
            match k.trim() {
                "lim_minus" => lim_minus = Some(parse_f64(v, "lim_minus")?),
                "lim_plus" => lim_plus = Some(parse_f64(v, "lim_plus")?),
                _ => {}
            }
            continue;
        }
        if line.starts_with('x') {
            continue;
        }
        let (xs, vs) = line
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("bad row '{line}'")))?;
        let x = parse_f64(xs, "x")?;
        let v = parse_f64(vs, "value")?;
        if x < 0.0 || (x == 0.0 && x.is_sign_negative()) {
            left.push(v);
        } else {
            right.push(v);
        }
        x_last = x;
    }
    let n_half = right
        .len()
        .checked_sub(1)
        .ok_or_else(|| Error::Parse("no rows on the right half-line".into()))?;
    let grid = Grid::new(x_last, n_half)?;
    SharpFn::new(
        grid,
        left,
        right,
        lim_minus.ok_or_else(|| Error::Parse("missing lim_minus header".into()))?,
        lim_plus.ok_or_else(|| Error::Parse("missing lim_plus header".into()))?,
    )
}
