use membranekit::cosine::{Family, KelvinCosine};
use membranekit::io::{sharp_from_csv, sharp_from_json, sharp_to_csv, sharp_to_json};
use membranekit::limits::{cesaro_mean, sweep_extension, sweep_semigroup, sweep_weks};
use membranekit::montecarlo::{simulate_skew, simulate_snapping, PathConfig, Side};
use membranekit::probes::Probe;
use membranekit::projections::least_squares_gap;
use membranekit::semigroup::{weierstrass, WeierstrassRule};
use membranekit::{FnPair, Grid, MembraneParams};

fn params() -> MembraneParams {
    MembraneParams::new(0.2, 0.1).unwrap()
}

#[test]
fn extension_error_approaches_doubled_rate_constant() {
    // φ(x) = f(x) − f(−x) has Lipschitz constant 2L, so the sharp constant is
    // 4·max(α,β)·L/(α+β)² = 80/9 for tanh
    let g = Grid::new(64.0, 3200).unwrap();
    let f = Probe::Tanh.line(g).unwrap();
    let r = sweep_extension(&params(), &f, &[1, 2, 5, 10, 20, 50]).unwrap();
    let k = 80.0 / 9.0;
    let scaled: Vec<f64> = r
        .n_values
        .iter()
        .zip(&r.errors)
        .map(|(n, e)| *n as f64 * e)
        .collect();
    assert!(scaled.iter().all(|&s| s <= k), "{scaled:?}");
    assert!(scaled.windows(2).all(|w| w[1] > w[0]), "{scaled:?}");
    assert!(scaled[5] > 0.9 * k, "{scaled:?}");
}

#[test]
fn complementary_cosines_stay_in_envelope() {
    let g = Grid::new(64.0, 3200).unwrap();
    let ts: Vec<f64> = (-12..=12).map(|k| k as f64 * 0.25).collect();
    let r = sweep_weks(
        &params(),
        &Probe::OvTanh.sharp(g),
        &[1, 2, 5, 10, 20, 50],
        &ts,
    )
    .unwrap();
    assert!(r.envelope_violations(1e-4).is_empty(), "{r:?}");
    let order = r.fitted_order.unwrap();
    assert!(order > 0.5, "{order}");
}

#[test]
fn semigroup_error_is_below_cosine_envelope() {
    let g = Grid::new(24.0, 600).unwrap();
    let r = sweep_semigroup(
        &params(),
        &Probe::Tanh.sharp(g),
        &[1, 2, 5],
        &[0.5, 1.0],
        WeierstrassRule::Lattice,
    )
    .unwrap();
    assert!(r.envelope_violations(1e-4).is_empty(), "{r:?}");
    assert!(r.errors.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn dalembert_law_on_lattice_times() {
    let g = Grid::new(12.0, 600).unwrap();
    let p = params();
    let f = Probe::Gauss.sharp(g);
    let kc = KelvinCosine::new(Family::SnappingOut, &p, &f).unwrap();
    for (i, j) in [(25, 50), (50, 25), (40, 90)] {
        let (t, s) = (i as f64 * g.step(), j as f64 * g.step());
        let inner = kc.at(s);
        let outer = KelvinCosine::new(Family::SnappingOut, &p, &inner)
            .unwrap()
            .at(t)
            * 2.0;
        let rhs = &kc.at(t + s) + &kc.at(t - s);
        assert!(
            outer.distance(&rhs) < 1e-6,
            "t={t} s={s}: {}",
            outer.distance(&rhs)
        );
    }
}

#[test]
fn cesaro_quadrature_matches_exact_mean() {
    let g = Grid::new(8.0, 200).unwrap();
    let f = Probe::Tanh.sharp(g);
    let exact = cesaro_mean(Family::SnappingOut, &params(), &f, 6.0, None).unwrap();
    let trap = cesaro_mean(Family::SnappingOut, &params(), &f, 6.0, Some(g.step())).unwrap();
    assert!(exact.distance(&trap) < 1e-12, "{}", exact.distance(&trap));
}

#[test]
fn snapping_walk_with_large_permeabilities_approaches_skew_walk() {
    let g = Grid::new(12.0, 600).unwrap();
    let p = params();
    let big = p.scaled(20.0).unwrap();
    let tanh = Probe::Tanh.line(g).unwrap();
    let cfg = PathConfig::new(100_000, 1e-3, 7, 0.5);
    let skew = simulate_skew(&p, &cfg, 1.0, &tanh).unwrap();
    let snap = simulate_snapping(&big, &cfg, 1.0, &tanh.to_sharp()).unwrap();
    let analytic_gap = (weierstrass(Family::SnappingOut, &big, 1.0, &tanh.to_sharp())
        .unwrap()
        .eval(0.5, true)
        - weierstrass(Family::Skew, &p, 1.0, &tanh.to_sharp())
            .unwrap()
            .eval(0.5, true))
    .abs();
    let budget = 3.0 * (skew.std_error + snap.std_error) + analytic_gap + 0.01;
    assert!(
        (skew.mean - snap.mean).abs() <= budget,
        "{skew:?} {snap:?} gap {analytic_gap}"
    );
}

#[test]
fn halving_time_step_stays_within_diffusive_budget() {
    let g = Grid::new(12.0, 600).unwrap();
    let tanh = Probe::Tanh.line(g).unwrap();
    let dt = 2e-3;
    let a = simulate_skew(
        &params(),
        &PathConfig::new(100_000, dt, 21, 0.0),
        1.0,
        &tanh,
    )
    .unwrap();
    let b = simulate_skew(
        &params(),
        &PathConfig::new(100_000, dt / 2.0, 22, 0.0),
        1.0,
        &tanh,
    )
    .unwrap();
    assert!((a.mean - b.mean).abs() <= 3.0 * (a.std_error + b.std_error) + dt.sqrt());
}

#[test]
fn snapping_walk_from_membrane_side() {
    let g = Grid::new(12.0, 600).unwrap();
    let p = params();
    let step = Probe::Step.sharp(g);
    let exact = weierstrass(Family::SnappingOut, &p, 0.5, &step).unwrap();
    for (side, right) in [(Side::Left, false), (Side::Right, true)] {
        let cfg = PathConfig::new(100_000, 1e-3, 31, 0.0).with_side(side);
        let e = simulate_snapping(&p, &cfg, 0.5, &step).unwrap();
        let reference = exact.eval(0.0, right);
        assert!(
            (e.mean - reference).abs() <= 3.0 * e.std_error + 0.01,
            "{side:?}: {e:?} vs {reference}"
        );
    }
}

#[test]
fn monte_carlo_estimate_serializes() {
    let g = Grid::new(12.0, 600).unwrap();
    let e = simulate_skew(
        &params(),
        &PathConfig::new(1, 1e-2, 0, 0.0),
        1.0,
        &Probe::Tanh.line(g).unwrap(),
    )
    .unwrap();
    let v: serde_json::Value = serde_json::to_value(&e).unwrap();
    assert_eq!(v["n_paths"], 1);
    assert_eq!(v["std_error"], 1.0);
    assert!(v["config"]["seed"].is_u64());
}

#[test]
fn skew_projection_minimizes_windowed_least_squares() {
    let g = Grid::new(16.0, 800).unwrap();
    let f = FnPair::new(Probe::Gauss.line(g).unwrap(), Probe::Tanh.line(g).unwrap()).unwrap();
    for y in [1.0, 4.0, 16.0] {
        let r = least_squares_gap(&params(), &f, y, 64, 1.0, 3).unwrap();
        assert!(r.gap >= 0.0, "{r:?}");
    }
}

#[test]
fn probe_outputs_round_trip_through_io() {
    let g = Grid::new(6.0, 120).unwrap();
    for probe in Probe::ALL {
        let out = weierstrass(Family::SnappingOut, &params(), 0.7, &probe.sharp(g)).unwrap();
        assert_eq!(sharp_from_json(&sharp_to_json(&out).unwrap()).unwrap(), out);
        assert_eq!(sharp_from_csv(&sharp_to_csv(&out)).unwrap(), out);
    }
}
