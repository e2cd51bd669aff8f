use proptest::prelude::*;

use monorep::convexfn::{eps_subdiff_test, fenchel_young_gap};
use monorep::linalg::{self, Matrix};
use monorep::operators::{eps_enlargement_test, monotonicity_check};
use monorep::refine::{br_refine, br_refine_scaled, regularized_min, strict_br};
use monorep::representations::{check_dual_condition, TestSet};
use monorep::tolerance::TOL_GAP;
use monorep::{Bifunction, ConvexFunction, GridFn, MonotoneOperator, PrimalDualPoint, ProductGrid};

fn pt(x: &[f64], xs: &[f64]) -> PrimalDualPoint {
    PrimalDualPoint::new(x.to_vec(), xs.to_vec()).unwrap()
}

fn coord() -> impl Strategy<Value = f64> {
    -2.0..2.0f64
}

/// Catalogue functions on R with closed-form subdifferentials.
fn catalogue_fn() -> impl Strategy<Value = ConvexFunction> {
    prop_oneof![
        (0.2..3.0f64, -1.0..1.0f64).prop_map(|(a, b)| {
            ConvexFunction::quadratic(Matrix::from_element(1, 1, a), vec![b], 0.0).unwrap()
        }),
        Just(ConvexFunction::abs_norm(1).unwrap()),
        (-1.5..-0.1f64, 0.1..1.5f64).prop_map(|(lo, hi)| ConvexFunction::box_indicator(vec![lo], vec![hi]).unwrap()),
        (-1.5..-0.1f64, 0.1..1.5f64).prop_map(|(lo, hi)| ConvexFunction::box_support(vec![lo], vec![hi]).unwrap()),
        (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(s, t)| {
            ConvexFunction::translated(ConvexFunction::abs_norm(1).unwrap(), vec![s], vec![t], 0.5).unwrap()
        }),
    ]
}

/// Monotone affine maps `x ↦ Ax + b` on R² (`A = S + K`, `S ⪰ 0.1 I`, `K` skew).
fn monotone_affine() -> impl Strategy<Value = MonotoneOperator> {
    (prop::array::uniform4(-1.0..1.0f64), -1.0..1.0f64, prop::array::uniform2(-1.0..1.0f64)).prop_map(|(m, k, b)| {
        let m = Matrix::from_row_slice(2, 2, &m);
        let skew = Matrix::from_row_slice(2, 2, &[0.0, k, -k, 0.0]);
        let a = m.transpose() * &m + Matrix::identity(2, 2) * 0.1 + skew;
        MonotoneOperator::affine(a, b.to_vec()).unwrap()
    })
}

fn graph_sample(t: &MonotoneOperator, xs: &[f64]) -> Vec<PrimalDualPoint> {
    let n = t.dim();
    let pts: Vec<Vec<f64>> = xs.chunks(n).map(<[f64]>::to_vec).collect();
    t.sample_graph(&pts).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn graph_samples_are_monotone(f in catalogue_fn(), t in monotone_affine(), xs in prop::collection::vec(coord(), 2..40)) {
        let sub = MonotoneOperator::subdifferential(f).unwrap();
        let pts = graph_sample(&sub, &xs);
        if !pts.is_empty() {
            prop_assert!(monotonicity_check(&pts, 1e-9).unwrap().monotone);
        }
        let even = &xs[..xs.len() / 2 * 2];
        prop_assert!(monotonicity_check(&graph_sample(&t, even), 1e-9).unwrap().monotone);
    }

    #[test]
    fn graph_points_lie_in_the_zero_enlargement(t in monotone_affine(), x in prop::array::uniform2(coord())) {
        let p = graph_sample(&t, &x).remove(0);
        prop_assert!(eps_enlargement_test(&t, &p, 0.0).unwrap().inside);
    }

    #[test]
    fn zero_enlargement_is_the_graph(f in catalogue_fn(), x in coord(), s in coord(), snap in any::<bool>()) {
        let t = MonotoneOperator::subdifferential(f).unwrap();
        // Half the cases start from a graph point.
        let p = if snap { t.project_to_graph(&pt(&[x], &[s])).unwrap() } else { pt(&[x], &[s]) };
        if eps_enlargement_test(&t, &p, 0.0).unwrap().inside {
            prop_assert!(t.graph_contains(&p, 1e-6).unwrap());
        }
    }

    #[test]
    fn enlargement_is_monotone_in_eps(t in monotone_affine(), w in prop::array::uniform4(coord()), e in 0.0..2.0f64, d in 0.0..2.0f64) {
        let p = pt(&w[..2], &w[2..]);
        if eps_enlargement_test(&t, &p, e).unwrap().inside {
            prop_assert!(eps_enlargement_test(&t, &p, e + d).unwrap().inside);
        }
    }

    #[test]
    fn biconjugate_and_fenchel_young(f in catalogue_fn(), x in coord(), s in coord()) {
        let fcc = f.conjugate().unwrap().conjugate().unwrap();
        let (a, b) = (f.eval(&[x]).unwrap().value(), fcc.eval(&[x]).unwrap().value());
        prop_assert!(a == b || (a - b).abs() <= 1e-9, "f({x}) = {a}, f**({x}) = {b}");
        let gap = fenchel_young_gap(&f, &pt(&[x], &[s])).unwrap();
        prop_assert!(gap.value() >= -1e-9);
    }

    #[test]
    fn eps_subdiff_at_zero_matches_operator(f in catalogue_fn(), x in coord(), s in coord(), snap in any::<bool>()) {
        let t = MonotoneOperator::subdifferential(f.clone()).unwrap();
        let p = if snap { t.project_to_graph(&pt(&[x], &[s])).unwrap() } else { pt(&[x], &[s]) };
        let by_gap = eps_subdiff_test(&f, &p, 0.0).unwrap();
        let by_eval = f.subdifferential(&p.x).unwrap().contains(&p.xstar, 1e-9);
        prop_assert_eq!(by_gap, by_eval);
    }

    #[test]
    fn grid_conjugation_reverses_order(a in 0.2..2.0f64, b in -1.0..1.0f64, c in 0.0..1.0f64, s in -2.0..2.0f64) {
        let grid = || ProductGrid::uniform_box(1, 2.0, 41).unwrap();
        let f = move |x: &[f64]| 0.5 * a * x[0] * x[0] + b * x[0];
        let g = move |x: &[f64]| f(x) + c * (x[0] - b).powi(2);
        let fc = ConvexFunction::grid(GridFn::from_fn(grid(), f).unwrap()).conjugate().unwrap();
        let gc = ConvexFunction::grid(GridFn::from_fn(grid(), g).unwrap()).conjugate().unwrap();
        prop_assert!(fc.eval(&[s]).unwrap().value() >= gc.eval(&[s]).unwrap().value() - 1e-12);
    }

    #[test]
    fn separable_sits_between_fitzpatrick_and_sigma(f in catalogue_fn(), x in coord(), s in coord()) {
        let t = MonotoneOperator::subdifferential(f.clone()).unwrap();
        let p = pt(&[x], &[s]);
        let phi = Bifunction::fitzpatrick(&t).unwrap().eval(&p).unwrap().value();
        let h = Bifunction::separable(f).unwrap().eval(&p).unwrap().value();
        let sigma = Bifunction::sigma(&t).unwrap().eval(&p).unwrap().value();
        prop_assert!(h == f64::INFINITY || phi <= h + 1e-9, "φ = {phi}, h = {h}");
        prop_assert!(sigma == f64::INFINITY || h <= sigma + 1e-9, "h = {h}, σ = {sigma}");
    }

    #[test]
    fn translation_preserves_the_dual_condition(f in catalogue_fn(), z in coord(), zs in coord()) {
        let h = Bifunction::separable(f).unwrap();
        let set = TestSet::box_grid(1, 2.0, 15).unwrap();
        prop_assume!(check_dual_condition(&h, &set).unwrap().verdict);
        let moved = h.translate(&[z], &[zs]).unwrap();
        prop_assert!(check_dual_condition(&moved, &set).unwrap().verdict);
    }

    #[test]
    fn zero_optimum_and_certificate(t in monotone_affine(), eps in 0.01..1.0f64) {
        let h = Bifunction::fitzpatrick(&t).unwrap();
        let sol = regularized_min(&h, eps).unwrap();
        prop_assert!(sol.minimizer_value.abs() <= 1e-9);
        let c = &sol.dual_certificate;
        prop_assert!((linalg::norm(&c.x) - linalg::norm(&c.xstar)).abs() <= 1e-9);
        prop_assert!(sol.value < eps);
    }

    #[test]
    fn refinement_laws(t in monotone_affine(), w in prop::array::uniform4(coord()), u in 0.1..0.9f64) {
        let h = Bifunction::fitzpatrick(&t).unwrap();
        let p = pt(&w[..2], &w[2..]);
        let gap = h.eval(&p).unwrap().value() - p.duality_product();
        prop_assume!(gap > 1e-6);
        let eps = gap / u;
        let tr = br_refine(&h, &p, eps, TOL_GAP).unwrap();
        prop_assert!(tr.converged);
        for (k, g) in tr.gaps.iter().enumerate() {
            prop_assert!(*g < tr.theta.powi(k as i32) * tr.eps0 + 1e-9);
        }
        for k in 0..tr.iterations() {
            let d = tr.iterates[k + 1].sub(&tr.iterates[k]);
            prop_assert!(linalg::norm_sq(&d.x) <= tr.gaps[k] + 1e-9);
            prop_assert!(linalg::norm_sq(&d.xstar) <= tr.gaps[k] + 1e-9);
        }
        let bound = tr.eps0.sqrt() / (1.0 - tr.theta.sqrt()) + 1e-9;
        let d = tr.limit.sub(&p);
        prop_assert!(linalg::norm(&d.x) <= bound && linalg::norm(&d.xstar) <= bound);
        prop_assert!(bound < eps.sqrt());

        // With λ = √ε the scaled norm is the plain one.
        let scaled = br_refine_scaled(&h, &p, eps, eps.sqrt(), TOL_GAP).unwrap();
        prop_assert!(scaled.limit.distance(&tr.limit) <= 1e-9);
    }

    #[test]
    fn strict_output_is_a_graph_point(t in monotone_affine(), w in prop::array::uniform4(coord()), r in 1.1..2.0f64, lambda in 0.2..2.0f64) {
        let p = pt(&w[..2], &w[2..]);
        let inf = eps_enlargement_test(&t, &p, 0.0).unwrap().inf.value();
        let eps = (-inf).max(0.0);
        let eta = (eps * r).max(1e-6);
        let rep = strict_br(&t, &p, eps, eta, lambda).unwrap();
        prop_assert!(t.graph_contains(&rep.point, TOL_GAP).unwrap());
        prop_assert!(rep.within_bounds);
    }
}

#[test]
fn graph_is_where_the_representation_touches_the_pairing() {
    // On a product grid, h = π exactly at the diagonal nodes for the
    // identity.
    let h = Bifunction::separable(ConvexFunction::half_square(1).unwrap()).unwrap();
    let grid = ProductGrid::uniform_box(2, 2.0, 21).unwrap();
    for w in grid.points() {
        let touch = (h.eval_w(&w).unwrap() - w[0] * w[1]).abs() <= 1e-9;
        assert_eq!(touch, w[0] == w[1], "{w:?}");
    }
}
