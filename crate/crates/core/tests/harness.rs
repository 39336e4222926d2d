use slide_stats::generators::{draw_series, stream_rng, SourceKind};
use slide_stats::harness::{
    cloud, normality_test, replicate, standard_rows, summaries_csv, table_run, tangibility_check,
    Family, TANGIBILITY_TOLERANCE,
};

const SIZE: usize = 10_000;
const REPS: usize = 100;

/// Published (μ₁, σ₁, μ₂, σ₂) for the standard rows, 1000 replicates of size 10⁴.
const PUBLISHED: [(f64, f64, f64, f64); 10] = [
    (1.0003, 0.0111, -1.6461, 0.0732),
    (1.2664, 0.129, -1.0273, 0.0860),
    (1.4590, 0.0141, -0.7333, 0.0920),
    (1.2817, 0.0132, -2.5792, 0.1085),
    (0.5023, 0.0056, -0.4096, 0.0186),
    (0.3416, 0.0037, -0.1825, 0.0083),
    (0.2642, 0.0029, -0.1038, 0.0049),
    (0.7264, 0.0073, -0.2004, 0.0233),
    (1.6014, 0.0170, -4.1464, 0.1933),
    (0.6344, 0.0067, -0.6549, 0.0295),
];

#[test]
fn standard_table_against_published_means() {
    let rows = table_run(&standard_rows(), SIZE, REPS, 7).unwrap();
    assert_eq!(rows.len(), 10);
    let slack = |sigma: f64| 5.0 * sigma / (REPS as f64).sqrt() + 0.01;
    for (s, &(mu1, sigma1, mu2, sigma2)) in rows.iter().zip(&PUBLISHED) {
        assert!((s.mu1 - mu1).abs() <= slack(sigma1), "{}: mu1 {} vs {mu1}", s.kind, s.mu1);
        assert!((s.mu2 - mu2).abs() <= slack(sigma2), "{}: mu2 {} vs {mu2}", s.kind, s.mu2);
        assert!(s.sigma1 >= 0.0 && s.sigma2 >= 0.0);
    }
    let cantor = &rows[8];
    assert!((cantor.mu2 + 4.15).abs() < 0.1, "{}", cantor.mu2);
    // 1-D continuous rows sit at or above 1
    for s in rows.iter().take(4).chain(std::iter::once(&rows[8])) {
        assert!(s.mu1 >= 0.99, "{}: {}", s.kind, s.mu1);
    }
    let csv = summaries_csv(&rows);
    assert_eq!(csv.lines().count(), 11);
}

#[test]
fn replicate_examples() {
    let u = replicate(SourceKind::UniformCube { m: 1 }, SIZE, REPS, 1).unwrap();
    assert!((u.mu1 - 1.0003).abs() <= 0.005, "{}", u.mu1);
    let n = replicate(SourceKind::Normal, SIZE, REPS, 1).unwrap();
    assert!((1.22..=1.31).contains(&n.mu1), "{}", n.mu1);
    let e = replicate(SourceKind::Exponential, SIZE, REPS, 1).unwrap();
    assert!((-0.78..=-0.69).contains(&e.mu2), "{}", e.mu2);
}

#[test]
fn tangibility_examples() {
    let square = replicate(SourceKind::UniformCube { m: 2 }, SIZE, REPS, 3).unwrap();
    let r = tangibility_check(&square, 2.0, TANGIBILITY_TOLERANCE).unwrap();
    assert!((r.dim_est1 - 1.99).abs() < 0.02 && (r.dim_est2 - 2.0).abs() < 0.03, "{r:?}");
    assert!(r.consistent);

    let normal = replicate(SourceKind::Normal, SIZE, REPS, 3).unwrap();
    for d in [0.5, 0.785, 1.0, 1.27, 2.0] {
        assert!(!tangibility_check(&normal, d, TANGIBILITY_TOLERANCE).unwrap().consistent);
    }

    let sierpinski = replicate(SourceKind::Sierpinski, SIZE, REPS, 3).unwrap();
    let r = tangibility_check(&sierpinski, 3f64.ln() / 2f64.ln(), TANGIBILITY_TOLERANCE).unwrap();
    assert!(r.consistent, "{r:?}");
}

#[test]
fn normal_cloud_brackets_normal_region() {
    let points = cloud(Family::Fixed { kind: SourceKind::Normal }, 1000, Some(3), 500, 9).unwrap();
    let n = points.len() as f64;
    let mean1 = points.iter().map(|p| p.rho1).sum::<f64>() / n;
    let mean2 = points.iter().map(|p| p.rho2).sum::<f64>() / n;
    // embedded normal returns behave like a 3-dimensional Gaussian cloud
    let bivariate_like = (0.3..0.6).contains(&mean1) && (-0.4..-0.05).contains(&mean2);
    assert!(bivariate_like, "cloud centre ({mean2}, {mean1})");
    let lo = points.iter().map(|p| p.rho1).fold(f64::INFINITY, f64::min);
    let hi = points.iter().map(|p| p.rho1).fold(f64::NEG_INFINITY, f64::max);
    assert!(lo < mean1 && mean1 < hi);
}

#[test]
fn cauchy_rejected_and_affine_invariant_p_value() {
    let mut rng = stream_rng(77, 0);
    let cauchy = draw_series(SourceKind::Cauchy, 10_000, &mut rng).unwrap();
    let r = normality_test(&cauchy, None, 200, 5, 0.01).unwrap();
    assert!(r.reject && r.rho2 > 0.0, "{r:?}");

    let normal = draw_series(SourceKind::Normal, 800, &mut rng).unwrap();
    let shifted: Vec<f64> = normal.iter().map(|x| -0.25 * x + 40.0).collect();
    let a = normality_test(&normal, Some(2), 100, 6, 0.05).unwrap();
    let b = normality_test(&shifted, Some(2), 100, 6, 0.05).unwrap();
    assert!((a.p_value - b.p_value).abs() < 1e-12);
    assert!((a.rho1 - b.rho1).abs() < 1e-10);
}
