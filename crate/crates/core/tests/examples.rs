use num_rational::Rational64;

use isoskel::building::{rel_position, CrystalLattice, Norm};
use isoskel::isocrystal::{min_nu, standard_context, standard_form, NewtonPoint};
use isoskel::minset::{crystal_isomorphism, enumerate_crystals, is_crystal, minimal_crystal_ball};
use isoskel::padic::{make_field, newton_polygon, FieldElement, Matrix};
use isoskel::{Isocrystal, MinSet};

fn r(a: i64, b: i64) -> Rational64 {
    Rational64::new(a, b)
}

fn half(p: u64) -> MinSet {
    let np = NewtonPoint::new([(r(1, 2), 2)]).unwrap();
    let ctx = standard_context(p, 30, &np, 1).unwrap();
    MinSet::new(&standard_form(&ctx, &np).unwrap()).unwrap()
}

#[test]
fn antidiagonal_has_slope_one_half() {
    let ctx = make_field(2, 2, 30, 1).unwrap();
    let b = Matrix::from_ints(&ctx, &[&[0, 2], &[1, 0]]);
    // charpoly x^2 - p: both roots have valuation 1/2
    let f = b.charpoly().unwrap();
    assert!(f.coeff(0).eq_at_precision(&FieldElement::from_int(&ctx, -2)));
    assert!(f.coeff(1).is_zero());
    assert_eq!(newton_polygon(&f).unwrap().segments, vec![(r(1, 2), 2)]);
    let ic = Isocrystal::from_matrix(b.clone()).unwrap();
    assert_eq!(ic.newton_point().unwrap().parts(), &[(r(1, 2), 2)]);
    // b sigma(b) = p Id
    let pi2 = b.mul(&b.sigma(1)).unwrap();
    assert!(pi2.eq_at_precision(&Matrix::identity(&ctx, 2).scale(&FieldElement::p_power(&ctx, 1))));
    assert!(ic.is_decent(2).unwrap());
}

#[test]
fn min_nu_is_weighted_sum_of_squares() {
    let np = NewtonPoint::new([(r(0, 1), 1), (r(1, 3), 3), (r(1, 1), 2)]).unwrap();
    assert_eq!(min_nu(&np), r(1, 3) + r(2, 1));
}

#[test]
fn relative_position_of_diagonal_norms() {
    let ctx = make_field(3, 1, 20, 1).unwrap();
    let a = Norm::standard(&ctx, vec![r(0, 1), r(0, 1)]).unwrap();
    let b = Norm::standard(&ctx, vec![r(1, 1), r(2, 1)]).unwrap();
    assert_eq!(rel_position(&a, &b).unwrap().0, vec![r(2, 1), r(1, 1)]);
    assert_eq!(rel_position(&a, &b).unwrap().distance_squared(), r(5, 1));
}

#[test]
fn ball_of_min_norm_is_standard_lattice() {
    let ms = half(2);
    let a = Norm::standard(ms.context(), vec![r(0, 1), r(1, 2)]).unwrap();
    assert!(ms.is_in_min(&a).unwrap());
    let (m, check) = minimal_crystal_ball(&ms, &a, r(0, 1)).unwrap();
    assert!(check.crystal);
    assert!(m.same_as(&CrystalLattice::standard(ms.context(), 2)).unwrap());
    let (m1, _) = minimal_crystal_ball(&ms, &a, r(1, 1)).unwrap();
    assert!(m1.same_as(&CrystalLattice::standard(ms.context(), 2).scale(1)).unwrap());
}

#[test]
fn slope_half_crystals_and_witness() {
    let ms = half(3);
    let ctx = ms.context().clone();
    let found = enumerate_crystals(&ms, 1).unwrap();
    let o2 = CrystalLattice::standard(&ctx, 2);
    let b_o2 = CrystalLattice::new(Matrix::from_ints(&ctx, &[&[0, 3], &[1, 0]])).unwrap();
    for target in [&o2, &o2.scale(1), &b_o2] {
        assert!(found.iter().any(|m| m.same_as(target).unwrap()));
        assert!(is_crystal(&ms, target).unwrap().crystal);
    }
    let g = crystal_isomorphism(&ms, &o2, &b_o2).unwrap().expect("witness");
    assert!(ms.is_in_j(&g).unwrap());
    assert!(o2.transform(&g).unwrap().same_as(&b_o2).unwrap());
}
