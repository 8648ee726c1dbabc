mod common;

use common::{int_point, point, pt, rat};
use proptest::prelude::*;
use tropsec::rational::frac;
use tropsec::{affine_dim, dist_sq, rank, Error, GramForm, RationalPoint};

#[test]
fn rank_examples() {
    assert_eq!(rank(&[]).unwrap(), 0);
    let id = [pt(&[1, 0, 0]), pt(&[0, 1, 0]), pt(&[0, 0, 1])];
    assert_eq!(rank(&id).unwrap(), 3);
    assert_eq!(rank(&[pt(&[1, 2]), pt(&[2, 4])]).unwrap(), 1);
}

#[test]
fn mixed_lengths_are_rejected() {
    let rows = [pt(&[1, 2]), pt(&[1, 2, 3])];
    assert!(rank(&rows).is_err());
    assert!(affine_dim(&rows).is_err());
}

#[test]
fn affine_dim_examples() {
    assert_eq!(affine_dim(&[]).unwrap(), -1);
    assert_eq!(affine_dim(&[pt(&[0, 0])]).unwrap(), 0);
    assert_eq!(affine_dim(&[pt(&[0, 0]), pt(&[1, 0]), pt(&[0, 1])]).unwrap(), 2);
}

#[test]
fn dist_sq_examples() {
    let g6 = GramForm::standard(6);
    let origin = RationalPoint::zeros(6);
    let centre = RationalPoint::new(vec![frac(1, 2); 6]);
    assert_eq!(dist_sq(&origin, &centre, &g6).unwrap(), frac(3, 2));
    assert_eq!(dist_sq(&centre, &centre, &g6).unwrap(), frac(0, 1));
    let a = pt(&[1, 0, 1, 1, 0, 0]);
    let b = pt(&[0, 0, 1, 0, 0, 1]);
    assert_eq!(dist_sq(&a, &b, &g6).unwrap(), frac(3, 1));
    assert!(matches!(
        dist_sq(&a, &pt(&[1, 2]), &g6),
        Err(Error::DimensionMismatch { .. })
    ));
}

#[test]
fn segre_isometry_in_unreduced_coordinates() {
    use tropsec::models::segre_point;
    let g = GramForm::standard(12);
    let u = segre_point(&[0, 1, 2, 0], 3, false);
    let w = segre_point(&[1, 1, 0, 0], 3, false);
    assert_eq!(dist_sq(&u, &w, &g).unwrap(), frac(4, 1));
}

#[test]
fn gram_form_rejects_indefinite() {
    let m = vec![vec![frac(1, 1), frac(2, 1)], vec![frac(2, 1), frac(1, 1)]];
    assert!(matches!(GramForm::new(m), Err(Error::NotPositiveDefinite { minor: 2, .. })));
    let asym = vec![vec![frac(2, 1), frac(1, 1)], vec![frac(0, 1), frac(2, 1)]];
    assert!(GramForm::new(asym).is_err());
}

proptest! {
    #[test]
    fn affine_dim_bounded_by_size(pts in prop::collection::vec(point(3), 0..6)) {
        let d = affine_dim(&pts).unwrap();
        prop_assert!(d < pts.len() as i64);
        prop_assert!(d <= 3);
    }

    #[test]
    fn affine_dim_independent_of_base_point(pts in prop::collection::vec(point(3), 1..6), shift in 0usize..6) {
        let j = shift % pts.len();
        let diffs: Vec<RationalPoint> = pts.iter().map(|p| p.sub(&pts[j])).collect();
        prop_assert_eq!(affine_dim(&pts).unwrap(), rank(&diffs).unwrap() as i64);
    }

    #[test]
    fn rank_equals_affine_dim_plus_one_off_origin(
        pts in prop::collection::vec(int_point(3, -5, 5), 1..7),
        c in 1i64..6,
    ) {
        // lift onto the hyperplane x_0 + ... + x_3 = c
        let lifted: Vec<RationalPoint> = pts
            .iter()
            .map(|p| {
                let mut v = p.coords().to_vec();
                v.push(frac(c, 1) - p.iter().sum::<tropsec::Rational>());
                RationalPoint::new(v)
            })
            .collect();
        prop_assert_eq!(rank(&lifted).unwrap() as i64, affine_dim(&lifted).unwrap() + 1);
    }

    #[test]
    fn dist_sq_symmetric_and_translation_invariant(u in point(4), w in point(4), t in point(4)) {
        let g = GramForm::standard(4);
        let d = dist_sq(&u, &w, &g).unwrap();
        prop_assert_eq!(&d, &dist_sq(&w, &u, &g).unwrap());
        prop_assert_eq!(&d, &dist_sq(&u.add(&t), &w.add(&t), &g).unwrap());
        prop_assert!(d >= frac(0, 1));
        prop_assert_eq!(d == frac(0, 1), u == w);
    }

    #[test]
    fn rank_invariant_under_permutation_and_scaling(
        rows in prop::collection::vec(point(4), 1..6),
        lambda in rat().prop_filter("nonzero", |q| *q != frac(0, 1)),
        which in 0usize..6,
    ) {
        let r = rank(&rows).unwrap();
        prop_assert!(r <= rows.len().min(4));
        let mut perm = rows.clone();
        perm.reverse();
        prop_assert_eq!(rank(&perm).unwrap(), r);
        let j = which % rows.len();
        let mut scaled = rows.clone();
        scaled[j] = scaled[j].scale(&lambda);
        prop_assert_eq!(rank(&scaled).unwrap(), r);
    }
}
