use lagmix::quadrature::{gauss_legendre_1d, gauss_legendre_unit, required_order, rule_for_geometry, MAX_POINTS};
use lagmix::reference::Geometry;
use proptest::prelude::*;

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

fn monomial_quad(a: usize, b: usize) -> f64 {
    1.0 / ((a + 1) as f64 * (b + 1) as f64)
}

fn monomial_triangle(a: usize, b: usize) -> f64 {
    factorial(a) * factorial(b) / factorial(a + b + 2)
}

/// Accuracy and monomial exponents with `a, b ≤ acc`.
fn per_direction() -> impl Strategy<Value = (usize, usize, usize)> {
    (0usize..=24).prop_flat_map(|acc| (Just(acc), 0..=acc, 0..=acc))
}

/// Accuracy and monomial exponents with `a + b ≤ acc`.
fn total_degree() -> impl Strategy<Value = (usize, usize, usize)> {
    (0usize..=24).prop_flat_map(|acc| (Just(acc), 0..=acc)).prop_flat_map(|(acc, a)| (Just(acc), Just(a), 0..=acc - a))
}

/// Point count and a monomial degree the rule must integrate exactly.
fn segment_case() -> impl Strategy<Value = (usize, usize)> {
    (1usize..=MAX_POINTS).prop_flat_map(|n| (Just(n), 0..(2 * n).min(64)))
}

proptest! {
    #[test]
    fn quad_rule_is_exact_per_direction((acc, a, b) in per_direction()) {
        let rule = rule_for_geometry(Geometry::Quad, acc).unwrap();
        let got = rule.integrate(|p| p[0].powi(a as i32) * p[1].powi(b as i32));
        prop_assert!((got - monomial_quad(a, b)).abs() <= 1e-13, "{got} vs {}", monomial_quad(a, b));
    }

    #[test]
    fn triangle_rule_is_exact_in_total_degree((acc, a, b) in total_degree()) {
        let rule = rule_for_geometry(Geometry::Triangle, acc).unwrap();
        let got = rule.integrate(|p| p[0].powi(a as i32) * p[1].powi(b as i32));
        prop_assert!((got - monomial_triangle(a, b)).abs() <= 1e-13);
    }

    #[test]
    fn segment_rule_is_exact((n, m) in segment_case()) {
        let rule = gauss_legendre_1d(n).unwrap();
        let got = rule.integrate(|p| p[0].powi(m as i32));
        let exact = if m % 2 == 0 { 2.0 / (m as f64 + 1.0) } else { 0.0 };
        prop_assert!((got - exact).abs() <= 1e-13);
    }
}

#[test]
fn weights_are_positive_and_sum_to_measure() {
    for acc in 0..=30 {
        for g in [Geometry::Segment, Geometry::Triangle, Geometry::Quad] {
            let rule = rule_for_geometry(g, acc).unwrap();
            assert!(rule.iter().all(|(_, w)| w > 0.0));
            assert!(rule.iter().all(|(p, _)| g.contains(p, 1e-14)));
            let total: f64 = rule.iter().map(|(_, w)| w).sum();
            assert!((total - g.measure()).abs() < 1e-13, "{g:?} {acc}");
        }
    }
}

#[test]
fn unit_rule_nodes_ascend() {
    let (x, w) = gauss_legendre_unit(7).unwrap();
    assert!(x.windows(2).all(|p| p[0] < p[1]));
    assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    // Midpoint is the centre node of an odd rule.
    assert!((x[3] - 0.5).abs() < 1e-15);
}

#[test]
fn point_count_limits() {
    assert!(gauss_legendre_1d(0).is_err());
    assert!(gauss_legendre_1d(MAX_POINTS + 1).is_err());
    assert_eq!(required_order(0), 2);
    assert_eq!(required_order(1), 3);
    assert_eq!(required_order(3), 7);
}
