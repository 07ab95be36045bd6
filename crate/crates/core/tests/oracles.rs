//! Library results against independent oracles: closed-form inverses,
//! brute-force pair scans and hand-computed constants.

use std::sync::Arc;

use phiext::catalog::{make_family, read_grid_csv, write_grid_csv, FamilySpec, Field, TablePhi};
use phiext::conditions::{check_a0_table, check_a1_omega_table, estimate_adec, estimate_ainc, CheckOptions};
use phiext::geometry::PointCloud;
use phiext::phi_core::phi::FnPhi;
use phiext::phi_core::{equivalence_constant, inverse_table};
use phiext::{SampledFunction, SharedPhi, TGrid, BISECTION_TOL};

fn line(n: usize) -> PointCloud {
    let pts: Vec<Vec<f64>> = (0..n).map(|i| vec![i as f64 / (n - 1).max(1) as f64]).collect();
    PointCloud::from_points(1, &pts).unwrap()
}

/// `max_{s<t} [f(s)/s^p] / [f(t)/t^p]` over every ordered pair of nodes.
fn brute_ainc(table: &SampledFunction, p: f64) -> f64 {
    let t = table.grid().samples();
    let mut worst: f64 = 1.0;
    for i in 0..table.n_points() {
        let row = table.row(i);
        for a in 0..t.len() {
            for b in a + 1..t.len() {
                let r = (row[a] / t[a].powf(p)) / (row[b] / t[b].powf(p));
                worst = worst.max(r);
            }
        }
    }
    worst
}

/// `max_{s<t} [f(t)/t^q] / [f(s)/s^q]`.
fn brute_adec(table: &SampledFunction, q: f64) -> f64 {
    let t = table.grid().samples();
    let mut worst: f64 = 1.0;
    for i in 0..table.n_points() {
        let row = table.row(i);
        for a in 0..t.len() {
            for b in a + 1..t.len() {
                let r = (row[b] / t[b].powf(q)) / (row[a] / t[a].powf(q));
                worst = worst.max(r);
            }
        }
    }
    worst
}

#[test]
fn power_inverse_matches_closed_form() {
    let grid = TGrid::geometric(1e-6, 1e6, 301).unwrap();
    let cloud = line(4);
    for p in [1.0, 2.0, 3.5] {
        let phi = make_family(&FamilySpec::Power { p }, 1).unwrap();
        let inv = inverse_table(phi.as_ref(), &cloud, &grid, BISECTION_TOL).unwrap();
        for (j, &tau) in grid.samples().iter().enumerate() {
            let exact = tau.powf(1.0 / p);
            let got = inv.value(0, j);
            assert!((got / exact - 1.0).abs() < 1e-6, "p={p} tau={tau}: {got} vs {exact}");
        }
    }
}

#[test]
fn weighted_power_inverse_matches_closed_form() {
    let w = Field::parse("affine(offset=1,slope=[2],min=1,max=3)").unwrap();
    let spec = FamilySpec::WeightedPower { p: 2.0, w: w.clone() };
    let phi = make_family(&spec, 1).unwrap();
    let grid = TGrid::geometric(1e-4, 1e4, 81).unwrap();
    let cloud = line(7);
    let inv = inverse_table(phi.as_ref(), &cloud, &grid, BISECTION_TOL).unwrap();
    for i in 0..cloud.len() {
        let x = cloud.point(i);
        for (j, &tau) in grid.samples().iter().enumerate() {
            let exact = (tau / w.eval(x)).sqrt();
            assert!((inv.value(i, j) / exact - 1.0).abs() < 1e-6);
        }
    }
}

#[test]
fn llogl_inverse_solves_the_equation() {
    let phi = make_family(&FamilySpec::LLogL, 1).unwrap();
    let grid = TGrid::geometric(1e-5, 1e5, 51).unwrap();
    let inv = inverse_table(phi.as_ref(), &line(1), &grid, BISECTION_TOL).unwrap();
    for (j, &tau) in grid.samples().iter().enumerate() {
        let t = inv.value(0, j);
        // t log(e + t) = tau, evaluated directly
        let back = t * (std::f64::consts::E + t).ln();
        assert!((back / tau - 1.0).abs() < 1e-6, "tau={tau}: back {back}");
    }
}

#[test]
fn growth_estimators_match_pair_scan() {
    let grid = TGrid::geometric(1e-3, 1e3, 121).unwrap();
    let cloud = line(5);
    let a = Field::parse("affine(offset=0,slope=[1],min=0,max=1)").unwrap();
    let families = [
        FamilySpec::Power { p: 2.0 },
        FamilySpec::DoublePhase { p: 2.0, q: 3.0, a },
        FamilySpec::LLogL,
        FamilySpec::VariableExponent {
            p: Field::parse("affine(offset=1.5,slope=[1],min=1.5,max=2.5)").unwrap(),
        },
    ];
    for spec in &families {
        let phi = make_family(spec, 1).unwrap();
        let table = SampledFunction::tabulate(phi.as_ref(), &cloud, &grid).unwrap();
        for e in [1.0, 1.5, 2.0, 2.5, 3.0] {
            let inc = estimate_ainc(&table, e, 1e12).unwrap().constant.value();
            let dec = estimate_adec(&table, e, 1e12).unwrap().constant.value();
            let (bi, bd) = (brute_ainc(&table, e), brute_adec(&table, e));
            assert!((inc / bi - 1.0).abs() < 1e-9, "{spec} aInc_{e}: {inc} vs {bi}");
            assert!((dec / bd - 1.0).abs() < 1e-9, "{spec} aDec_{e}: {dec} vs {bd}");
        }
    }
}

#[test]
fn equivalence_of_scaled_square_is_two() {
    // t^2 against 4 t^2: (t/L)^2 <= 4t^2 <= (Lt)^2 iff L >= 2
    let phi = FnPhi::of_t(1, "t^2", |t| t * t);
    let psi = FnPhi::of_t(1, "4t^2", |t| 4.0 * t * t);
    let grid = TGrid::geometric(1e-3, 1e3, 61).unwrap();
    let r = equivalence_constant(&phi, &psi, &grid, &line(3), 1e3).unwrap();
    assert!(r.holds);
    assert!((r.constant.value() - 2.0).abs() < 1e-6, "{}", r.constant);
}

#[test]
fn a0_constant_of_weighted_power() {
    // phi^-1(x, 1) = w(x)^{-1/2} with w in [1, 4]: beta0 = min(min, 1/max) = 1/2
    let w = Field::parse("affine(offset=1,slope=[3],min=1,max=4)").unwrap();
    let phi = make_family(&FamilySpec::WeightedPower { p: 2.0, w }, 1).unwrap();
    let grid = TGrid::geometric(1e-2, 1e2, 21).unwrap();
    let inv = inverse_table(phi.as_ref(), &line(11), &grid, BISECTION_TOL).unwrap();
    let r = check_a0_table(&inv);
    assert!(r.holds);
    assert!((r.constant.value() - 0.5).abs() < 1e-8);
}

#[test]
fn a1_omega_constant_matches_pair_scan() {
    let p = Field::parse("affine(offset=2,slope=[0.5],min=2,max=2.5)").unwrap();
    let phi = make_family(&FamilySpec::VariableExponent { p }, 1).unwrap();
    let grid = TGrid::geometric(1.0, 1e4, 41).unwrap();
    let cloud = line(9);
    let inv = inverse_table(phi.as_ref(), &cloud, &grid, BISECTION_TOL).unwrap();
    let r = check_a1_omega_table(&inv, &CheckOptions::default());
    // beta = min over pairs and t of (inv(y)/inv(x))^{1/(|x-y| t + 1)}
    let mut oracle: f64 = 1.0;
    for i in 0..cloud.len() {
        for j in 0..cloud.len() {
            for (k, &t) in grid.samples().iter().enumerate() {
                let ratio: f64 = inv.value(j, k) / inv.value(i, k);
                if ratio < 1.0 {
                    let e = cloud.distance(i, j) * t + 1.0;
                    oracle = oracle.min(ratio.powf(1.0 / e));
                }
            }
        }
    }
    assert!((r.constant.value() / oracle - 1.0).abs() < 1e-9, "{} vs {oracle}", r.constant);
}

#[test]
fn table_family_reproduces_csv_bit_for_bit() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("phi.csv");
    let phi = make_family(&FamilySpec::Power { p: 1.7 }, 2).unwrap();
    let cloud = PointCloud::from_points(2, &[[0.0, 0.0], [0.25, 1.0 / 3.0]]).unwrap();
    let grid = TGrid::geometric(1e-3, 1e3, 37).unwrap();
    let table = SampledFunction::tabulate(phi.as_ref(), &cloud, &grid).unwrap();
    let mut buf = Vec::new();
    write_grid_csv(&table, &mut buf).unwrap();
    std::fs::write(&path, &buf).unwrap();
    let back = read_grid_csv(&path).unwrap();
    let user: SharedPhi = Arc::new(TablePhi::new(back, "table"));
    for i in 0..cloud.len() {
        for (j, &t) in grid.samples().iter().enumerate() {
            assert_eq!(user.eval(cloud.point(i), t).to_bits(), table.value(i, j).to_bits());
        }
    }
}
