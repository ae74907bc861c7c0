use std::fmt::Write as _;
use std::path::PathBuf;

use serde_json::{json, Value};

use membranekit::cosine::Family;
use membranekit::extensions::{extend_os, extend_skew, extend_so, extend_weks};
use membranekit::io::{pair_to_csv, sharp_to_csv, FunctionRecord, SCHEMA};
use membranekit::limits::{
    cesaro_mean, mean_limit_m, mean_limit_n, mirror_check, sweep_cosine, sweep_extension,
    sweep_projection, sweep_semigroup, sweep_weks, ConvergenceReport,
};
use membranekit::montecarlo::{simulate_skew, simulate_snapping, PathConfig, Side};
use membranekit::projections::{least_squares_gap, project_skew, project_so, project_weks};
use membranekit::semigroup::{weierstrass, weierstrass_with, WeierstrassRule};
use membranekit::{FnPair, LineFn, MembraneParams, SharpFn, MEMBERSHIP_TOL};

use crate::args::*;

#[derive(Debug)]
pub enum Failure {
    /// bad input or a domain error from the library; exit 1
    Config(String),
    /// an --assert check failed; exit 2
    Assert(String),
}

impl From<membranekit::Error> for Failure {
    fn from(e: membranekit::Error) -> Self {
        Failure::Config(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Config(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn params(m: &Membrane) -> Result<MembraneParams, Failure> {
    Ok(MembraneParams::new(m.alpha, m.beta)?)
}

fn write(
    common: &Common,
    stem: &str,
    csv: impl FnOnce() -> String,
    json: impl FnOnce() -> Value,
) -> Outcome {
    std::fs::create_dir_all(&common.out_dir)?;
    let (path, body): (PathBuf, String) = match common.format {
        Format::Csv => (common.out_dir.join(format!("{stem}.csv")), csv()),
        Format::Json => {
            let mut doc = json();
            doc["schema"] = json!(SCHEMA);
            let mut s = serde_json::to_string_pretty(&doc).expect("serializable document");
            s.push('\n');
            (common.out_dir.join(format!("{stem}.json")), s)
        }
    };
    std::fs::write(&path, body)?;
    println!("{}", path.display());
    Ok(())
}

fn record(f: &SharpFn) -> Value {
    serde_json::to_value(FunctionRecord::from(f)).expect("serializable record")
}

fn line_record(f: &LineFn) -> Value {
    record(&f.to_sharp())
}

fn pair_json(pair: &FnPair) -> Value {
    json!({ "f1": line_record(&pair.f1), "f2": line_record(&pair.f2) })
}

fn fmt_t(t: f64) -> String {
    format!("{t:?}")
}

fn check(common: &Common, ok: bool, what: impl FnOnce() -> String) -> Outcome {
    if common.check && !ok {
        Err(Failure::Assert(what()))
    } else {
        Ok(())
    }
}

pub fn extend(a: &ExtendArgs) -> Outcome {
    let c = &a.common;
    let p = params(&a.membrane)?;
    let f = a.probe.sharp(c.grid);
    let (family, limit_family, limit) = match a.target {
        Limit::Skew => (
            Family::SnappingOut,
            Family::Skew,
            extend_skew(&p, &f.to_line(MEMBERSHIP_TOL)?),
        ),
        Limit::Weks => (Family::OppositeSnapping, Family::Weks, extend_weks(&p, &f)?),
    };
    for &n in &a.n {
        let q = p.scaled(n as f64)?;
        let pair = match a.target {
            Limit::Skew => extend_so(&q, &f),
            Limit::Weks => extend_os(&q, &f)?,
        };
        write(
            c,
            &format!("extend_n{n}"),
            || pair_to_csv(&pair),
            || {
                json!({ "command": "extend", "family": family.name(), "n": n,
                    "alpha": q.alpha(), "beta": q.beta(), "pair": pair_json(&pair) })
            },
        )?;
    }
    write(
        c,
        "extend_limit",
        || pair_to_csv(&limit),
        || {
            json!({ "command": "extend", "family": limit_family.name(), "n": Value::Null,
                "alpha": p.alpha(), "beta": p.beta(), "pair": pair_json(&limit) })
        },
    )
}

fn default_times(target: Target) -> Vec<f64> {
    match target {
        Target::Semigroup => vec![0.5, 1.0, 2.0],
        _ => (-12..=12).map(|k| k as f64 * 0.25).collect(),
    }
}

pub fn converge(a: &ConvergeArgs) -> Outcome {
    let c = &a.common;
    let p = params(&a.membrane)?;
    let ts = if a.t.is_empty() {
        default_times(a.target)
    } else {
        a.t.clone()
    };
    let f = a.probe.sharp(c.grid);
    let report: ConvergenceReport = match a.target {
        Target::Extension => sweep_extension(&p, &f.to_line(MEMBERSHIP_TOL)?, &a.n)?,
        Target::Cosine => sweep_cosine(&p, &f, &a.n, &ts)?,
        Target::Semigroup => sweep_semigroup(&p, &f, &a.n, &ts, WeierstrassRule::Lattice)?,
        Target::Projection => {
            let pair = FnPair::new(a.probe.line(c.grid)?, a.probe2.line(c.grid)?)?;
            sweep_projection(&p, &pair, &a.n)?
        }
        Target::Weks => sweep_weks(&p, &f, &a.n, &ts)?,
    };
    let name = format!("{:?}", a.target).to_lowercase();
    write(
        c,
        &format!("converge_{name}"),
        || report.to_csv(),
        || {
            json!({ "command": "converge", "target": name, "alpha": p.alpha(), "beta": p.beta(),
                "probe": a.probe.name(), "report": report })
        },
    )?;
    if report.k_theory.is_some() {
        let bad = report.envelope_violations(a.slack);
        check(c, bad.is_empty(), || {
            let ns: Vec<String> = bad
                .iter()
                .map(|&i| report.n_values[i].to_string())
                .collect();
            format!("K/n envelope violated at n = {}", ns.join(","))
        })
    } else if a.target == Target::Projection {
        let order = report.fitted_order.unwrap_or(f64::NAN);
        check(c, (0.8..=1.2).contains(&order), || {
            format!("fitted order {order} outside [0.8, 1.2]")
        })
    } else {
        let d = &report.cauchy;
        check(c, d.windows(2).all(|w| w[1] <= 1.1 * w[0]), || {
            "consecutive differences are not decreasing".to_string()
        })
    }
}

pub fn evolve(a: &EvolveArgs) -> Outcome {
    let c = &a.common;
    let p = params(&a.membrane)?;
    let f = a.probe.sharp(c.grid);
    let rule = match a.rule {
        Rule::Lattice => WeierstrassRule::Lattice,
        Rule::GaussHermite => WeierstrassRule::GaussHermite { m: a.gh_nodes },
    };
    let contraction = matches!(a.family, Family::SnappingOut | Family::Skew);
    for &t in &a.t {
        let out = weierstrass_with(a.family, &p, t, &f, rule)?;
        write(
            c,
            &format!("evolve_t{}", fmt_t(t)),
            || sharp_to_csv(&out),
            || {
                json!({ "command": "evolve", "family": a.family.name(), "t": t,
                    "alpha": p.alpha(), "beta": p.beta(), "function": record(&out) })
            },
        )?;
        if contraction {
            let (n_out, n_in) = (out.sup_norm(), f.sup_norm());
            check(c, n_out <= n_in + 1e-9, || {
                format!("‖T({t})f‖ = {n_out} exceeds ‖f‖ = {n_in}")
            })?;
        }
    }
    Ok(())
}

pub fn project(a: &ProjectArgs) -> Outcome {
    let c = &a.common;
    let p = params(&a.membrane)?;
    let f = FnPair::new(a.probe1.line(c.grid)?, a.probe2.line(c.grid)?)?;
    let kinds: &[Kind] = match a.kind {
        Kind::All => &[Kind::So, Kind::Skew, Kind::Weks],
        ref k => std::slice::from_ref(k),
    };
    for &k in kinds {
        let (name, g) = match k {
            Kind::So => ("so", project_so(&p, &f)),
            Kind::Skew => ("skew", project_skew(&p, &f)),
            Kind::Weks => ("weks", project_weks(&p, &f)),
            Kind::All => unreachable!(),
        };
        write(
            c,
            &format!("project_{name}"),
            || pair_to_csv(&g),
            || json!({ "command": "project", "kind": name, "alpha": p.alpha(), "beta": p.beta(), "pair": pair_json(&g) }),
        )?;
        let regain = match k {
            Kind::So => project_so(&p, &g),
            Kind::Skew => project_skew(&p, &g),
            _ => project_weks(&p, &g),
        };
        let gap = regain.distance(&g);
        check(c, gap <= 1e-6, || {
            format!("{name} projection not idempotent: gap {gap:e}")
        })?;
    }
    let split = project_skew(&p, &f).add(&project_weks(&p, &f)).distance(&f);
    check(c, split <= 1e-12, || {
        format!("skew + weks projections miss the identity by {split:e}")
    })?;
    if let Some(y) = a.window {
        let r = least_squares_gap(&p, &f, y, a.trials, 1.0, a.seed)?;
        std::fs::create_dir_all(&c.out_dir)?;
        let doc = json!({ "schema": SCHEMA, "command": "project", "window": y, "report": r });
        let path = c.out_dir.join("least_squares.json");
        std::fs::write(
            &path,
            serde_json::to_string_pretty(&doc).expect("serializable") + "\n",
        )?;
        println!("{}", path.display());
        check(c, r.gap >= 0.0, || {
            format!("a perturbed candidate beat the projection by {}", -r.gap)
        })?;
    }
    Ok(())
}

pub fn mc(a: &McArgs) -> Outcome {
    let c = &a.common;
    let p = params(&a.membrane)?;
    let mut cfg = PathConfig::new(a.n_paths, a.dt, a.seed, a.x0).with_antithetic(a.antithetic);
    if let Some(s) = a.side {
        cfg = cfg.with_side(match s {
            SideArg::Left => Side::Left,
            SideArg::Right => Side::Right,
        });
    }
    let (est, reference) = match a.process {
        Process::Skew => {
            let f = a.probe.line(c.grid)?;
            let est = simulate_skew(&p, &cfg, a.t, &f)?;
            let r = weierstrass(Family::Skew, &p, a.t, &f.to_sharp())?.eval(a.x0, true);
            (est, r)
        }
        Process::Snapping => {
            let f = a.probe.sharp(c.grid);
            let est = simulate_snapping(&p, &cfg, a.t, &f)?;
            let right = a.x0 > 0.0 || (a.x0 == 0.0 && a.side == Some(SideArg::Right));
            let r = weierstrass(Family::SnappingOut, &p, a.t, &f)?.eval(a.x0, right);
            (est, r)
        }
    };
    write(
        c,
        "mc",
        || {
            let mut s = String::from("mean,std_error,n_paths,reference\n");
            let _ = writeln!(
                s,
                "{:?},{:?},{},{reference:?}",
                est.mean, est.std_error, est.n_paths
            );
            s
        },
        || {
            let mut v = serde_json::to_value(&est).expect("serializable estimate");
            v["command"] = json!("mc");
            v["reference"] = json!(reference);
            v
        },
    )?;
    let diff = (est.mean - reference).abs();
    check(c, diff <= 3.0 * est.std_error + 0.01, || {
        format!(
            "estimate {} differs from semigroup value {reference} by {diff}",
            est.mean
        )
    })
}

pub fn means(a: &MeansArgs) -> Outcome {
    let c = &a.common;
    let p = params(&a.membrane)?;
    let f = a.probe.sharp(c.grid);
    let (left_lim, right_lim) = if a.family.is_opposite() {
        mean_limit_n(&p, &f)
    } else {
        let m = mean_limit_m(&p, &f);
        (m, m)
    };
    let mut rows = Vec::new();
    for &t in &a.t {
        let mean = cesaro_mean(a.family, &p, &f, t, a.s_step)?;
        let gap = mean
            .left()
            .iter()
            .map(|v| (v - left_lim).abs())
            .chain(mean.right().iter().map(|v| (v - right_lim).abs()))
            .fold(0.0, f64::max);
        rows.push((t, gap));
    }
    write(
        c,
        "means",
        || {
            let mut s = String::from("t,gap\n");
            for (t, g) in &rows {
                let _ = writeln!(s, "{t:?},{g:?}");
            }
            s
        },
        || {
            json!({ "command": "means", "family": a.family.name(), "limit": [left_lim, right_lim],
                    "rows": rows.iter().map(|(t, g)| json!({ "t": t, "gap": g })).collect::<Vec<_>>() })
        },
    )?;
    let last = rows.last().map_or(0.0, |r| r.1);
    check(c, last <= a.tol, || {
        format!("Cesàro gap {last} exceeds {}", a.tol)
    })
}

pub fn mirror(a: &MirrorArgs) -> Outcome {
    let c = &a.common;
    let p = params(&a.membrane)?;
    let f = a.probe.sharp(c.grid);
    let rows: Vec<(f64, f64)> =
        a.t.iter()
            .map(|&t| Ok((t, mirror_check(&p, &f, &[t])?)))
            .collect::<Result<_, Failure>>()?;
    write(
        c,
        "mirror",
        || {
            let mut s = String::from("t,gap\n");
            for (t, g) in &rows {
                let _ = writeln!(s, "{t:?},{g:?}");
            }
            s
        },
        || {
            json!({ "command": "mirror", "alpha": p.alpha(), "beta": p.beta(), "probe": a.probe.name(),
                    "rows": rows.iter().map(|(t, g)| json!({ "t": t, "gap": g })).collect::<Vec<_>>() })
        },
    )?;
    let worst = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    check(c, worst <= a.tol, || {
        format!("mirror gap {worst:e} exceeds {:e}", a.tol)
    })
}
