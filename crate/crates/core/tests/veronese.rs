use tropsec::bounds::eval_voronoi_partition;
use tropsec::models::{binomial, veronese_config};
use tropsec::search::{
    extend_veronese_witness, veronese_m3_expected, veronese_m3_full_witness, veronese_m3_witness,
    veronese_witness_for_k,
};
use tropsec::GramForm;

fn total(d: usize, w: &tropsec::Witness) -> usize {
    eval_voronoi_partition(&veronese_config(3, d).unwrap(), w, &GramForm::standard(3))
        .unwrap()
        .total
}

#[test]
fn bundled_witnesses_hit_expected_totals() {
    for d in 1..=8 {
        let n = binomial(d + 2, 2);
        for k in 1..=n.div_ceil(3) + 2 {
            let w = veronese_m3_witness(d, k).unwrap();
            assert_eq!(w.k(), k);
            assert_eq!(total(d, &w), veronese_m3_expected(d, k), "d={d} k={k}");
        }
    }
}

#[test]
fn degree_two_totals() {
    let got: Vec<usize> = (1..=3).map(|k| total(2, &veronese_m3_witness(2, k).unwrap())).collect();
    assert_eq!(got, vec![3, 5, 6]);
}

#[test]
fn degree_four_defect() {
    assert_eq!(total(4, &veronese_m3_witness(4, 5).unwrap()), 14);
    assert_eq!(total(4, &veronese_m3_witness(4, 6).unwrap()), 15);
}

#[test]
fn full_witnesses_cover_everything() {
    for d in 1..=8 {
        assert_eq!(total(d, &veronese_m3_full_witness(d).unwrap()), binomial(d + 2, 2));
    }
}

#[test]
fn extension_to_degrees_nine_to_eleven() {
    for (source, target) in [(7, 9), (8, 10), (5, 11)] {
        let full = extend_veronese_witness(&veronese_m3_full_witness(source).unwrap(), target).unwrap();
        let n = binomial(target + 2, 2);
        assert_eq!(total(target, &full), n);
        for k in 1..=n.div_ceil(3) {
            let w = veronese_witness_for_k(&full, target, k).unwrap();
            assert_eq!(total(target, &w), (3 * k).min(n), "d={target} k={k}");
        }
    }
}

#[test]
fn extension_requires_degree_at_least_nine() {
    let full = extend_veronese_witness(&veronese_m3_full_witness(6).unwrap(), 8);
    assert!(full.is_err());
}
