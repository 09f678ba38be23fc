use std::f64::consts::TAU;

use subdiv_l1::analysis::{
    basic_limit, basic_limit_levels, limit_support_width, overshoot, reproduction_error, successive_differences,
    support_width,
};
use subdiv_l1::datagen::{
    add_noise_grid, random_grid_outliers, sample, torus_grid, torus_point, torus_rms, NoiseSpec, TestFunction,
};
use subdiv_l1::refine1d::{refine_once, subdivide};
use subdiv_l1::refine2d::subdivide_2d;
use subdiv_l1::{
    BoundaryPolicy, ControlPolygon, Error, GridMesh, LimitSamples, SchemeSpec, SchemeSpec2D, Topology, Weighting,
};

fn step_polygon() -> ControlPolygon<f64> {
    let vals = (-20..20).map(|i| if i < 0 { -10.0 } else { 10.0 }).collect();
    ControlPolygon::from_scalars(vals).with_params(-20.0, 1.0)
}

fn samples(p: &ControlPolygon<f64>) -> LimitSamples<f64> {
    LimitSamples::from_polygon(p, 0).unwrap()
}

/// Lagrange interpolation through the `order + 1` samples nearest `t`.
fn local_lagrange(s: &LimitSamples<f64>, t: f64, order: usize) -> f64 {
    let k = s.params.partition_point(|&p| p < t);
    let lo = k.saturating_sub((order + 1) / 2).min(s.len() - order - 1);
    let idx = lo..=lo + order;
    idx.clone()
        .map(|i| {
            let basis: f64 = idx
                .clone()
                .filter(|&j| j != i)
                .map(|j| (t - s.params[j]) / (s.params[i] - s.params[j]))
                .product();
            basis * s.values[i]
        })
        .sum()
}

#[test]
fn step_overshoots_only_for_cubic_fits() {
    let p = step_polygon();
    let cubic = refine_once(&p, &SchemeSpec::new(10, 3)).unwrap();
    let linear = refine_once(&p, &SchemeSpec::new(10, 1)).unwrap();
    assert!(cubic.values().iter().any(|&v| v > 10.0));
    assert!(linear.values().iter().all(|&v| v <= 10.0 + 1e-9));
}

#[test]
fn step_overshoot_metric_after_four_levels() {
    let p = sample(TestFunction::G4, (-10.0, 10.0), 41).unwrap();
    let cubic = subdivide(&p, &SchemeSpec::new(10, 3), 4).unwrap();
    let linear = subdivide(&p, &SchemeSpec::new(10, 1), 4).unwrap();
    assert!(overshoot(&samples(&cubic), -10.0, 10.0).unwrap() > 0.01);
    assert!(overshoot(&samples(&linear), -10.0, 10.0).unwrap() < 0.01);
}

#[test]
fn cubic_data_is_reproduced() {
    let g2 = |x: f64| TestFunction::G2.eval(x);
    let p = sample(TestFunction::G2, (-4.0, 4.0), 33).unwrap();
    let out = subdivide(&p, &SchemeSpec::new(10, 3), 4).unwrap();
    assert_eq!(out.level, 4);
    for (v, t) in out.values().iter().zip(out.params()) {
        assert!((v - g2(t)).abs() <= 1e-8, "{t}: {v} vs {}", g2(t));
    }
}

#[test]
fn linear_fits_do_not_reproduce_quadratics() {
    let g1 = |x: f64| TestFunction::G1.eval(x);
    let p = sample(TestFunction::G1, (-5.0, 10.0), 30).unwrap();
    let lin = subdivide(&p, &SchemeSpec::new(10, 1), 4).unwrap();
    assert!(reproduction_error(&samples(&lin), g1).0 > 1e-3);

    let quad = subdivide(&p, &SchemeSpec::new(10, 2), 5).unwrap();
    let scale = p.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let (max, rms) = reproduction_error(&samples(&quad), g1);
    assert!(max <= 1e-8 * scale && rms <= max);
}

#[test]
fn levels_zero_is_identity() {
    let p = step_polygon();
    assert_eq!(subdivide(&p, &SchemeSpec::new(4, 1), 0).unwrap(), p);
    let m = GridMesh::from_fn(6, 6, |i, j| (i * j) as f64);
    assert_eq!(subdivide_2d(&m, &SchemeSpec2D::new(4, 1), 0).unwrap(), m);
}

#[test]
fn basic_limit_support() {
    for (points, degree, width) in [(10, 1, 19.0), (10, 2, 19.0), (13, 2, 25.0), (11, 3, 21.0)] {
        let spec = SchemeSpec::<f64>::new(points, degree);
        let (_, levels) = basic_limit_levels(&spec, 6, 4 * spec.fit.n).unwrap();
        let est = limit_support_width(&levels, 1e-12).unwrap();
        assert!((est - width).abs() <= 1.0 / 64.0, "D{points},{degree}: {est}");

        let last = levels.last().unwrap();
        let raw = support_width(last, 1e-12).unwrap();
        assert!(raw <= width);
        for (&t, &v) in last.params.iter().zip(&last.values) {
            if t.abs() > width / 2.0 {
                assert!(v.abs() <= 1e-12, "{t} {v}");
            }
        }
    }
}

#[test]
fn support_width_is_monotone_in_tolerance() {
    let s = basic_limit(&SchemeSpec::<f64>::new(6, 2), 4, 12).unwrap();
    let widths: Vec<f64> = [1e-14, 1e-10, 1e-6, 1e-3, 1e-1]
        .iter()
        .map(|&tol| support_width(&s, tol).unwrap())
        .collect();
    assert!(widths.windows(2).all(|w| w[1] <= w[0]), "{widths:?}");
    assert!(matches!(support_width(&s, 0.0), Err(Error::Domain(_))));
}

#[test]
fn basic_limit_differences_contract() {
    for (points, degree) in [(10, 1), (10, 3), (11, 2)] {
        let spec = SchemeSpec::<f64>::new(points, degree);
        let (_, levels) = basic_limit_levels(&spec, 6, 4 * spec.fit.n).unwrap();
        let diffs = successive_differences(&levels);
        let tail = &diffs[diffs.len() - 4..];
        assert!(tail.windows(2).all(|w| w[1] < w[0]), "D{points},{degree}: {diffs:?}");
    }
}

#[test]
fn limit_interpolates_polynomial_control_values() {
    for (f, points, degree) in [
        (TestFunction::G1, 15, 2),
        (TestFunction::G1, 16, 2),
        (TestFunction::G2, 15, 3),
        (TestFunction::G2, 16, 3),
    ] {
        let p = sample(f, (-20.0, 20.0), 41).unwrap();
        let out = samples(&subdivide(&p, &SchemeSpec::new(points, degree), 4).unwrap());
        let (lo, hi) = (out.params[0], out.params[out.len() - 1]);
        let mut checked = 0;
        for (&t, &v) in p.params().iter().zip(p.values()) {
            if t > lo + 1.0 && t < hi - 1.0 {
                let got = local_lagrange(&out, t, degree);
                assert!((got - v).abs() <= 1e-6 * (1.0 + v.abs()), "D{points},{degree} at {t}: {got} vs {v}");
                checked += 1;
            }
        }
        assert!(checked >= 10);
    }
}

#[test]
fn periodic_closed_curve_keeps_length_and_constants() {
    let n = 16;
    let circle: Vec<f64> = (0..n)
        .flat_map(|i| {
            let a = TAU * i as f64 / n as f64;
            [a.cos(), a.sin()]
        })
        .collect();
    let p = ControlPolygon::from_points(2, circle).unwrap().with_topology(Topology::Closed);
    let spec = SchemeSpec::new(6, 2);
    let r = subdivide(&p, &spec, 2).unwrap();
    assert_eq!(r.len(), 4 * n);
    assert_eq!(r.topology, Topology::Closed);
    for i in 0..r.len() {
        let q = r.point(i);
        let rad = (q[0] * q[0] + q[1] * q[1]).sqrt();
        assert!((rad - 1.0).abs() < 1e-2, "{rad}");
    }

    let c = ControlPolygon::from_scalars(vec![2.5f64; 9]).with_topology(Topology::Closed);
    assert!(refine_once(&c, &SchemeSpec::new(4, 3)).unwrap().values().iter().all(|&v| (v - 2.5).abs() < 1e-12));
}

#[test]
fn boundary_policies_set_output_length() {
    let p = ControlPolygon::from_scalars((0..12).map(|i| i as f64).collect());
    let spec = SchemeSpec::new(4, 1);
    let shrink = refine_once(&p, &spec).unwrap();
    assert_eq!(shrink.len(), 2 * (12 - 3));
    for (v, t) in shrink.values().iter().zip(shrink.params()) {
        assert!((v - t).abs() < 1e-12);
    }
    let mirror = refine_once(&p, &spec.with_boundary(BoundaryPolicy::Mirror)).unwrap();
    assert_eq!(mirror.len(), 2 * 11);
    let periodic = refine_once(&p, &spec.with_boundary(BoundaryPolicy::Periodic)).unwrap();
    assert_eq!(periodic.len(), 24);
    let odd = refine_once(&p, &SchemeSpec::new(5, 1).with_boundary(BoundaryPolicy::Mirror)).unwrap();
    assert_eq!(odd.len(), 24);

    let short = ControlPolygon::from_scalars(vec![1.0, 2.0, 3.0]);
    assert!(matches!(refine_once(&short, &spec), Err(Error::Input(_))));
}

#[test]
fn mirror_keeps_symmetric_data_symmetric() {
    let vals: Vec<f64> = (0..15).map(|i| ((i as f64) - 7.0).powi(2) * 0.1).collect();
    let p = ControlPolygon::from_scalars(vals);
    let r = refine_once(&p, &SchemeSpec::new(5, 2).with_boundary(BoundaryPolicy::Mirror)).unwrap();
    let v = r.values();
    for i in 0..v.len() {
        assert!((v[i] - v[v.len() - 1 - i]).abs() < 1e-9);
    }
}

#[test]
fn unit_weighting_is_linear() {
    let spec = SchemeSpec::new(8, 2).with_weighting(Weighting::Unit);
    let a: Vec<f64> = (0..20).map(|i| ((i * 7) % 5) as f64).collect();
    let b: Vec<f64> = (0..20).map(|i| ((i * 3) % 11) as f64 - 4.0).collect();
    let sum: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
    let ra = refine_once(&ControlPolygon::from_scalars(a), &spec).unwrap();
    let rb = refine_once(&ControlPolygon::from_scalars(b), &spec).unwrap();
    let rs = refine_once(&ControlPolygon::from_scalars(sum), &spec).unwrap();
    for ((x, y), s) in ra.values().iter().zip(rb.values()).zip(rs.values()) {
        assert!((x + y - s).abs() < 1e-12);
    }
}

#[test]
fn bivariate_reproduction() {
    let m = GridMesh::from_fn(8, 8, |i, j| (i + j) as f64);
    let r = subdivide_2d(&m, &SchemeSpec2D::new(4, 1), 1).unwrap();
    for i in 0..r.rows() {
        for j in 0..r.cols() {
            let (u, v) = r.param(i, j);
            assert!((r.point(i, j)[0] - (u + v)).abs() < 1e-10);
        }
    }
    let m = GridMesh::from_fn(9, 9, |i, _| (i * i) as f64);
    let r = subdivide_2d(&m, &SchemeSpec2D::new(5, 2), 2).unwrap();
    for i in 0..r.rows() {
        for j in 0..r.cols() {
            let (u, _) = r.param(i, j);
            assert!((r.point(i, j)[0] - u * u).abs() < 1e-9);
        }
    }
}

/// RMS of the periodic bilinear interpolant of `coarse` against the analytic
/// torus at the parameters of `fine`.
fn bilinear_torus_rms(coarse: &GridMesh<f64>, fine: &GridMesh<f64>, c1: f64, c2: f64) -> f64 {
    let (rows, cols) = (coarse.rows(), coarse.cols());
    let (h1, h2) = (TAU / rows as f64, TAU / cols as f64);
    let mut sq = 0.0;
    for i in 0..fine.rows() {
        for j in 0..fine.cols() {
            let (u, v) = fine.param(i, j);
            let (a, b) = ((u / h1).rem_euclid(rows as f64), (v / h2).rem_euclid(cols as f64));
            let (i0, j0) = (a.floor() as usize % rows, b.floor() as usize % cols);
            let (i1, j1) = ((i0 + 1) % rows, (j0 + 1) % cols);
            let (s, t) = (a - a.floor(), b - b.floor());
            let exact = torus_point(c1, c2, u, v);
            for k in 0..3 {
                let bl = (1.0 - s) * (1.0 - t) * coarse.point(i0, j0)[k]
                    + s * (1.0 - t) * coarse.point(i1, j0)[k]
                    + (1.0 - s) * t * coarse.point(i0, j1)[k]
                    + s * t * coarse.point(i1, j1)[k];
                sq += (bl - exact[k]).powi(2);
            }
        }
    }
    (sq / (fine.rows() * fine.cols()) as f64).sqrt()
}

#[test]
fn clean_torus_beats_bilinear_discretization() {
    let (c1, c2) = (2.0, 5.0);
    let torus = torus_grid(c1, c2, (24, 24)).unwrap();
    let refined = subdivide_2d(&torus, &SchemeSpec2D::new(4, 2), 2).unwrap();
    assert_eq!((refined.rows(), refined.cols()), (96, 96));
    let ours = torus_rms(&refined, c1, c2);
    let bilinear = bilinear_torus_rms(&torus, &refined, c1, c2);
    assert!(ours <= bilinear, "{ours} vs {bilinear}");
}

#[test]
fn noisy_torus_error_drops_each_level() {
    let (c1, c2) = (2.0, 5.0);
    let clean = torus_grid(c1, c2, (24, 24)).unwrap();
    let outliers = random_grid_outliers(8, 24, 24, 1.0, 11).unwrap();
    let noisy = add_noise_grid(&clean, &NoiseSpec::new(0.1, 11).with_outliers(outliers)).unwrap();
    let spec = SchemeSpec2D::new(4, 2);
    let mut rms = vec![torus_rms(&noisy, c1, c2)];
    let mut mesh = noisy;
    for _ in 0..2 {
        mesh = subdivide_2d(&mesh, &spec, 1).unwrap();
        rms.push(torus_rms(&mesh, c1, c2));
    }
    assert!(rms.windows(2).all(|w| w[1] < w[0]), "{rms:?}");
}
