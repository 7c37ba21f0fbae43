mod common;

use std::f64::consts::{FRAC_PI_2, PI};

use common::{index, line, point, random_flat, random_orthogonal};
use graff::metric::distance_from_angles;
use graff::{
    delta_distance, distance, embed, equal_flats, evaluate_geodesic, geodesic, infinite_metric,
    pad_ambient, principal_decomposition, unembed, DistanceKind, GraffError, RandomStream,
};
use proptest::prelude::*;

const AXIOM_KINDS: [DistanceKind; 3] = [
    DistanceKind::Grassmann,
    DistanceKind::Chordal,
    DistanceKind::Procrustes,
];

proptest! {
    #[test]
    fn angles_lie_in_the_quarter_circle(seed in any::<u64>(), n in 2usize..=7) {
        let mut rng = RandomStream::from_seed(seed);
        let k = index(&mut rng, 0, n - 1);
        let l = index(&mut rng, 0, n - 1);
        let f = random_flat(&mut rng, k, n, 2.0);
        let g = random_flat(&mut rng, l, n, 2.0);
        let pd = principal_decomposition(&f, &g).unwrap();
        prop_assert_eq!(pd.thetas.len(), k.min(l) + 1);
        for w in pd.thetas.windows(2) {
            prop_assert!(w[0] <= w[1]);
        }
        for &t in &pd.thetas {
            prop_assert!((0.0..=FRAC_PI_2).contains(&t));
        }
        for (&s, &t) in pd.sigmas.iter().zip(&pd.thetas) {
            prop_assert!((s - t.cos()).abs() <= 1e-12);
        }
    }

    #[test]
    fn table_distances_are_ordered(seed in any::<u64>(), n in 2usize..=7) {
        let mut rng = RandomStream::from_seed(seed);
        let k = index(&mut rng, 0, n - 1);
        let f = random_flat(&mut rng, k, n, 2.0);
        let g = random_flat(&mut rng, k, n, 2.0);
        let d = |kind| distance(&f, &g, kind).unwrap();
        let tol = 1e-12;
        prop_assert!(d(DistanceKind::Chordal) <= d(DistanceKind::Grassmann) + tol);
        prop_assert!(d(DistanceKind::Procrustes) <= d(DistanceKind::Grassmann) + tol);
        prop_assert!(d(DistanceKind::Projection) <= d(DistanceKind::Spectral) + tol);
        prop_assert!(d(DistanceKind::Spectral) <= d(DistanceKind::Asimov) + tol);
        prop_assert!(d(DistanceKind::Asimov) <= d(DistanceKind::Grassmann) + tol);
        prop_assert!(d(DistanceKind::BinetCauchy) <= d(DistanceKind::FubiniStudy) + tol);
        prop_assert!(d(DistanceKind::FubiniStudy) <= FRAC_PI_2 + tol);
        prop_assert!(d(DistanceKind::Chordal) <= d(DistanceKind::Martin) + tol);
    }

    #[test]
    fn distances_are_orthogonally_invariant(seed in any::<u64>(), n in 2usize..=7) {
        let mut rng = RandomStream::from_seed(seed);
        let k = index(&mut rng, 0, n - 1);
        let l = index(&mut rng, 0, n - 1);
        let f = random_flat(&mut rng, k, n, 2.0);
        let g = random_flat(&mut rng, l, n, 2.0);
        let q = random_orthogonal(&mut rng, n);
        let zero = nalgebra::DVector::zeros(n);
        let qf = f.transformed(&q, &zero).unwrap();
        let qg = g.transformed(&q, &zero).unwrap();
        for kind in DistanceKind::ALL {
            let before = delta_distance(&f, &g, kind).unwrap();
            let after = delta_distance(&qf, &qg, kind).unwrap();
            if before.is_finite() {
                prop_assert!((before - after).abs() <= 1e-10, "{kind}: {before} vs {after}");
            }
        }
    }

    #[test]
    fn padding_the_ambient_space_changes_nothing(seed in any::<u64>(), n in 2usize..=6, extra in 1usize..4) {
        let mut rng = RandomStream::from_seed(seed);
        let k = index(&mut rng, 0, n - 1);
        let l = index(&mut rng, 0, n - 1);
        let f = random_flat(&mut rng, k, n, 2.0);
        let g = random_flat(&mut rng, l, n, 2.0);
        let fp = pad_ambient(&f, n + extra).unwrap();
        let gp = pad_ambient(&g, n + extra).unwrap();
        let before = delta_distance(&f, &g, DistanceKind::Grassmann).unwrap();
        let after = delta_distance(&fp, &gp, DistanceKind::Grassmann).unwrap();
        prop_assert!((before - after).abs() <= 1e-12);
    }

    #[test]
    fn delta_is_symmetric_and_bounded_by_the_infinite_metric(seed in any::<u64>(), n in 2usize..=7) {
        let mut rng = RandomStream::from_seed(seed);
        let k = index(&mut rng, 0, n - 1);
        let l = index(&mut rng, 0, n - 1);
        let f = random_flat(&mut rng, k, n, 2.0);
        let g = random_flat(&mut rng, l, n, 2.0);
        for kind in AXIOM_KINDS {
            let fg = delta_distance(&f, &g, kind).unwrap();
            prop_assert!((fg - delta_distance(&g, &f, kind).unwrap()).abs() <= 1e-12);
            prop_assert!(infinite_metric(&f, &g, kind).unwrap() >= fg - 1e-12);
        }
    }

    #[test]
    fn geodesic_has_constant_speed(seed in any::<u64>(), n in 2usize..=6) {
        let mut rng = RandomStream::from_seed(seed);
        let k = index(&mut rng, 0, n - 1);
        let f = random_flat(&mut rng, k, n, 1.5);
        let g = random_flat(&mut rng, k, n, 1.5);
        let curve = match geodesic(&f, &g) {
            Ok(c) => c,
            Err(GraffError::SingularPair { .. }) => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        let d = distance(&f, &g, DistanceKind::Grassmann).unwrap();
        prop_assert!((curve.speed() - d).abs() <= 1e-10);
        for t in [0.25, 0.5, 0.75] {
            let Ok(mid) = evaluate_geodesic(&curve, t) else { continue };
            let from_start = distance(&f, &mid, DistanceKind::Grassmann).unwrap();
            let to_end = distance(&mid, &g, DistanceKind::Grassmann).unwrap();
            prop_assert!((from_start - t * d).abs() <= 1e-8, "t = {t}: {from_start} vs {}", t * d);
            prop_assert!((to_end - (1.0 - t) * d).abs() <= 1e-8);
        }
    }
}

#[test]
fn infinite_metric_counts_missing_dimensions() {
    let f = point(&[0.0, 0.0, 0.0]);
    let g = common::line(&[1.0, 0.0, 0.0], &[0.0, 0.0, 0.0]);
    let gr = infinite_metric(&f, &g, DistanceKind::Grassmann).unwrap();
    assert!((gr - FRAC_PI_2).abs() <= 1e-12);
    let ch = infinite_metric(&f, &g, DistanceKind::Chordal).unwrap();
    assert!((ch - 1.0).abs() <= 1e-12);
    let pr = infinite_metric(&f, &g, DistanceKind::Procrustes).unwrap();
    assert!((pr - 2f64.sqrt()).abs() <= 1e-12);
    assert!(matches!(
        infinite_metric(&f, &g, DistanceKind::Asimov),
        Err(GraffError::UnsupportedKind(_))
    ));
}

#[test]
fn infinite_metric_agrees_with_distance_on_equal_dimensions() {
    let mut rng = RandomStream::from_seed(3);
    for _ in 0..200 {
        let n = index(&mut rng, 2, 6);
        let k = index(&mut rng, 0, n - 1);
        let f = random_flat(&mut rng, k, n, 2.0);
        let g = random_flat(&mut rng, k, n, 2.0);
        for kind in AXIOM_KINDS {
            assert_eq!(
                infinite_metric(&f, &g, kind).unwrap(),
                distance(&f, &g, kind).unwrap()
            );
        }
    }
}

/// Minimality of the geodesic: no chain of flats from f to g is shorter
/// than the Grassmann distance, measured step by step.
#[test]
fn geodesic_beats_random_chains() {
    let mut rng = RandomStream::from_seed(5);
    let f = random_flat(&mut rng, 1, 3, 1.0);
    let g = random_flat(&mut rng, 1, 3, 1.0);
    let curve = geodesic(&f, &g).unwrap();
    let d = distance(&f, &g, DistanceKind::Grassmann).unwrap();

    let steps = 20;
    let on_curve: Vec<_> = (0..=steps)
        .map(|i| evaluate_geodesic(&curve, i as f64 / steps as f64).unwrap())
        .collect();
    let along: f64 = on_curve
        .windows(2)
        .map(|w| distance(&w[0], &w[1], DistanceKind::Grassmann).unwrap())
        .sum();
    assert!((along - d).abs() <= 1e-9);

    for _ in 0..1000 {
        let noise = 0.3 * rng.uniform();
        let mut chain = vec![f.clone()];
        for i in 1..steps {
            let frame = curve.frame_at(i as f64 / steps as f64) + rng.normal_matrix(4, 2) * noise;
            match unembed(&frame) {
                Ok(x) => chain.push(x),
                Err(_) => continue,
            }
        }
        chain.push(g.clone());
        let length: f64 = chain
            .windows(2)
            .map(|w| distance(&w[0], &w[1], DistanceKind::Grassmann).unwrap())
            .sum();
        assert!(length >= d - 1e-10, "chain of length {length} beats {d}");
    }
}

#[test]
fn geodesic_endpoints_and_exit() {
    let f = line(&[1.0, 0.0], &[0.0, 0.0]);
    let g = line(&[1.0, 1.0], &[0.0, 3.0]);
    let curve = geodesic(&f, &g).unwrap();
    assert!(equal_flats(&evaluate_geodesic(&curve, 0.0).unwrap(), &f, 1e-8).unwrap());
    assert!(equal_flats(&evaluate_geodesic(&curve, 1.0).unwrap(), &g, 1e-8).unwrap());

    let a = point(&[-2.0]);
    let b = point(&[2.0]);
    let curve = geodesic(&a, &b).unwrap();
    let exit = curve.exit_parameter().unwrap();
    assert!((exit - 0.5).abs() <= 1e-12);
    assert!(matches!(
        evaluate_geodesic(&curve, 0.5),
        Err(GraffError::NotAFlat { .. })
    ));
    // The curve leaves R¹ through infinity and returns from the other side.
    let before = evaluate_geodesic(&curve, 0.49).unwrap().offset()[0];
    let after = evaluate_geodesic(&curve, 0.51).unwrap().offset()[0];
    assert!(before < -10.0 && after > 10.0);
}

#[test]
fn points_on_the_real_line_follow_the_arctangent() {
    let mut rng = RandomStream::from_seed(8);
    for _ in 0..100 {
        let x = 4.0 * rng.standard_normal();
        let y = 4.0 * rng.standard_normal();
        let gap = (x.atan() - y.atan()).abs();
        let expected = gap.min(PI - gap);
        let d = distance(&point(&[x]), &point(&[y]), DistanceKind::Grassmann).unwrap();
        assert!((d - expected).abs() <= 1e-12, "{x} {y}: {d} vs {expected}");
    }
}

#[test]
fn angles_round_trip_through_the_formulas() {
    let thetas = [0.1, 0.4, 1.2];
    let g = distance_from_angles(DistanceKind::Grassmann, &thetas);
    assert!((g - thetas.iter().map(|t| t * t).sum::<f64>().sqrt()).abs() <= 1e-15);
    let fs = distance_from_angles(DistanceKind::FubiniStudy, &thetas);
    assert!((fs - thetas.iter().map(|t| t.cos()).product::<f64>().acos()).abs() <= 1e-12);
    assert!(distance_from_angles(DistanceKind::Martin, &[FRAC_PI_2]).is_infinite());
    assert_eq!(distance_from_angles(DistanceKind::Grassmann, &[]), 0.0);
    let proc = distance_from_angles(DistanceKind::Procrustes, &[PI / 3.0]);
    assert!((proc - 1.0).abs() <= 1e-15);
}

#[test]
fn embedding_angles_match_planes_angles() {
    let mut rng = RandomStream::from_seed(13);
    for _ in 0..50 {
        let f = random_flat(&mut rng, 2, 5, 1.0);
        let g = random_flat(&mut rng, 2, 5, 1.0);
        let m = embed(&f).transpose() * embed(&g);
        let mut cosines: Vec<f64> = m.singular_values().iter().copied().collect();
        cosines.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let pd = principal_decomposition(&f, &g).unwrap();
        for (c, t) in cosines.iter().zip(&pd.thetas) {
            assert!((c.min(1.0).acos() - t).abs() <= 1e-7);
        }
    }
}
