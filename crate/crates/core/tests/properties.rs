use std::sync::Arc;

use num_rational::Rational64;
use proptest::prelude::*;

use isoskel::building::{distance_squared, geodesic_point, rel_position, rel_position_fast, Norm};
use isoskel::isocrystal::{standard_context, standard_form, NewtonPoint};
use isoskel::minset::JFamily;
use isoskel::padic::{make_field, newton_polygon, FieldContext, FieldElement, Matrix, Polynomial};
use isoskel::sampling::{random_exponents, random_unimodular, stream};
use isoskel::{Error, MinPointParams, MinSet};

fn field(p: u64, m: usize) -> Arc<FieldContext> {
    make_field(p, m, 30, 1).unwrap()
}

fn element(ctx: &Arc<FieldContext>, coeffs: &[i64], shift: i64) -> FieldElement {
    FieldElement::from_poly(ctx, &coeffs[..ctx.degree()]).shift(shift)
}

fn small_field() -> impl Strategy<Value = (u64, usize)> {
    (prop::sample::select(vec![2u64, 3, 5]), 1usize..=3)
}

fn coeffs() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-30i64..=30, 3)
}

fn r(a: i64, b: i64) -> Rational64 {
    Rational64::new(a, b)
}

fn sort_desc(mut v: Vec<Rational64>) -> Vec<Rational64> {
    v.sort_by(|a, b| b.cmp(a));
    v
}

fn random_matrix(ctx: &Arc<FieldContext>, n: usize, seed: u64) -> Matrix {
    let mut rng = stream(seed, 1);
    let u = random_unimodular(ctx, n, ctx.degree(), &mut rng).unwrap();
    let d: Vec<FieldElement> = (0..n).map(|i| FieldElement::p_power(ctx, (seed as i64 + i as i64) % 3)).collect();
    let v = random_unimodular(ctx, n, ctx.degree(), &mut rng).unwrap();
    u.mul(&Matrix::diagonal(ctx, &d)).unwrap().mul(&v).unwrap()
}

fn random_norm(ctx: &Arc<FieldContext>, n: usize, seed: u64, den: i64) -> Norm {
    let mut rng = stream(seed, 2);
    let basis = random_unimodular(ctx, n, ctx.degree(), &mut rng).unwrap();
    let d: Vec<FieldElement> = (0..n).map(|_| FieldElement::p_power(ctx, ((seed >> 3) % 3) as i64 - 1)).collect();
    let basis = basis.mul(&Matrix::diagonal(ctx, &d)).unwrap();
    Norm::new(basis, random_exponents(n, 2, den, &mut rng)).unwrap()
}

fn newton_point_strategy() -> impl Strategy<Value = NewtonPoint> {
    let slopes = vec![(0, 1), (1, 1), (1, 2), (1, 3), (2, 3)];
    prop::collection::vec((prop::sample::select(slopes), 1usize..=2), 1..=2).prop_filter_map(
        "dimension at most 5",
        |parts| {
            let np = NewtonPoint::new(parts.iter().map(|&((a, b), k)| (r(a, b), k * b as usize))).ok()?;
            (np.dimension() <= 5).then_some(np)
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, ..ProptestConfig::default() })]

    #[test]
    fn ring_axioms((p, m) in small_field(), a in coeffs(), b in coeffs(), c in coeffs(), k in -3i64..=3) {
        let ctx = field(p, m);
        let (x, y, z) = (element(&ctx, &a, k), element(&ctx, &b, 0), element(&ctx, &c, 1));
        prop_assert!(x.add(&y).add(&z).eq_at_precision(&x.add(&y.add(&z))));
        prop_assert!(x.mul(&y).mul(&z).eq_at_precision(&x.mul(&y.mul(&z))));
        prop_assert!(x.mul(&y.add(&z)).eq_at_precision(&x.mul(&y).add(&x.mul(&z))));
        prop_assert!(x.mul(&y).eq_at_precision(&y.mul(&x)));
        prop_assert!(x.sub(&x).is_zero());
        if !x.is_zero() {
            prop_assert!(x.mul(&x.inv().unwrap()).eq_at_precision(&FieldElement::one(&ctx)));
        }
    }

    #[test]
    fn frobenius_is_a_field_automorphism((p, m) in small_field(), a in coeffs(), b in coeffs()) {
        let ctx = field(p, m);
        let (x, y) = (element(&ctx, &a, 0), element(&ctx, &b, -1));
        prop_assert!(x.mul(&y).frobenius(1).eq_at_precision(&x.frobenius(1).mul(&y.frobenius(1))));
        prop_assert!(x.add(&y).frobenius(1).eq_at_precision(&x.frobenius(1).add(&y.frobenius(1))));
        prop_assert!(x.frobenius(m as i64).eq_at_precision(&x));
        prop_assert!(x.frobenius(1).frobenius(-1).eq_at_precision(&x));
        prop_assert_eq!(x.frobenius(1).valuation(), x.valuation());
    }

    #[test]
    fn newton_polygon_of_product_is_minkowski_sum(
        p in prop::sample::select(vec![2u64, 3]),
        roots in prop::collection::vec((-20i64..=20, 0i64..=3), 2..=5),
        split in 1usize..=4,
    ) {
        let ctx = field(p, 1);
        let rs: Vec<FieldElement> = roots
            .iter()
            .map(|&(u, v)| FieldElement::from_int(&ctx, u * p as i64 + 1).shift(v))
            .collect();
        let k = split.min(rs.len() - 1);
        let f = Polynomial::from_roots(&ctx, &rs[..k]);
        let g = Polynomial::from_roots(&ctx, &rs[k..]);
        let prod = newton_polygon(&f.mul(&g)).unwrap();
        let mut expect: Vec<(Rational64, usize)> = Vec::new();
        for &(_, v) in &roots {
            let s = Rational64::from_integer(v);
            match expect.iter_mut().find(|e| e.0 == s) {
                Some(e) => e.1 += 1,
                None => expect.push((s, 1)),
            }
        }
        expect.sort();
        prop_assert_eq!(prod.segments, expect);
    }

    #[test]
    fn smith_form_is_invariant((p, m) in small_field(), n in 1usize..=4, seed in any::<u64>()) {
        let ctx = field(p, m);
        let a = random_matrix(&ctx, n, seed);
        let mut rng = stream(seed, 3);
        let u = random_unimodular(&ctx, n, m, &mut rng).unwrap();
        let v = random_unimodular(&ctx, n, m, &mut rng).unwrap();
        let exps = a.elementary_divisor_exponents().unwrap();
        prop_assert_eq!(u.mul(&a).unwrap().mul(&v).unwrap().elementary_divisor_exponents().unwrap(), exps.clone());
        let v_det = a.det().unwrap().val_ticks().unwrap();
        prop_assert_eq!(exps.iter().sum::<i64>(), v_det);
    }

    #[test]
    fn slopes_are_conjugation_invariant(np in newton_point_strategy(), p in prop::sample::select(vec![2u64, 3]), seed in any::<u64>()) {
        let ctx = make_field(p, 2, 30, 1).unwrap();
        let std = standard_form(&ctx, &np).unwrap();
        let mut rng = stream(seed, 4);
        let g = random_unimodular(&ctx, np.dimension(), 2, &mut rng).unwrap();
        let d: Vec<FieldElement> = (0..np.dimension()).map(|i| FieldElement::p_power(&ctx, (i % 2) as i64)).collect();
        let g = g.mul(&Matrix::diagonal(&ctx, &d)).unwrap();
        prop_assert_eq!(std.sigma_conjugate(&g).unwrap().newton_point().unwrap(), np);
    }

    #[test]
    fn relative_position_symmetry_and_invariance((p, m) in small_field(), n in 1usize..=3, seed in any::<u64>()) {
        let ctx = field(p, m);
        let a = random_norm(&ctx, n, seed, 2);
        let b = random_norm(&ctx, n, seed.wrapping_add(17), 3);
        let ab = rel_position(&a, &b).unwrap();
        let ba = rel_position(&b, &a).unwrap();
        prop_assert_eq!(ab.0.clone(), sort_desc(ba.0.iter().map(|x| -x).collect()));
        prop_assert_eq!(ab.clone(), rel_position_fast(&a, &b).unwrap());
        let g = random_matrix(&ctx, n, seed ^ 0x5a5a);
        prop_assert_eq!(rel_position(&a.group_act(&g).unwrap(), &b.group_act(&g).unwrap()).unwrap(), ab.clone());
        prop_assert_eq!(rel_position(&a.sigma_act(1), &b.sigma_act(1)).unwrap(), ab);
        prop_assert!(rel_position(&a, &a).unwrap().is_zero());
    }

    #[test]
    fn geodesics_split_distance((p, m) in small_field(), n in 1usize..=3, seed in any::<u64>(), t in prop::sample::select(vec![(0i64, 1i64), (1, 2), (1, 3), (1, 1)])) {
        let ctx = field(p, m);
        let a = random_norm(&ctx, n, seed, 1);
        let b = random_norm(&ctx, n, seed.wrapping_mul(3), 2);
        let t = r(t.0, t.1);
        let d2 = distance_squared(&a, &b).unwrap();
        let g = geodesic_point(&a, &b, t).unwrap();
        prop_assert_eq!(distance_squared(&a, &g).unwrap(), t * t * d2);
        prop_assert_eq!(distance_squared(&g, &b).unwrap(), (Rational64::from_integer(1) - t).pow(2) * d2);
    }

    #[test]
    fn balls_shrink_by_p((p, m) in small_field(), n in 1usize..=3, seed in any::<u64>(), e in -4i64..=4) {
        let ctx = field(p, m);
        let a = random_norm(&ctx, n, seed, 2);
        let e = r(e, 2);
        let big = a.ball_lattice(e).unwrap();
        let small = a.ball_lattice(e + 1).unwrap();
        prop_assert!(big.contains_lattice(&small).unwrap());
        prop_assert!(big.scale(1).same_as(&small).unwrap());
        for j in 0..n {
            let col = small.basis().column(j);
            let v = a.eval(&col).unwrap().finite().unwrap();
            prop_assert!(v > e);
        }
    }

    #[test]
    fn min_points_and_j(np in newton_point_strategy(), p in prop::sample::select(vec![2u64, 3]), seed in any::<u64>()) {
        let ctx = standard_context(p, 30, &np, 1).unwrap();
        let ms = MinSet::new(&standard_form(&ctx, &np).unwrap()).unwrap();
        let k = ms.simple_blocks().unwrap().len();
        let mut rng = stream(seed, 5);
        let offsets = random_exponents(k, 2, np.denominator_lcm(), &mut rng);
        let a = ms.min_point(&MinPointParams { offsets }).unwrap();
        prop_assert!(ms.is_in_min(&a).unwrap());
        prop_assert_eq!(ms.displacement(&a).unwrap(), ms.min_nu());
        let fam = JFamily::ALL[(seed % JFamily::ALL.len() as u64) as usize];
        let g = match ms.sample_j_element(fam, &mut rng) {
            Err(Error::InvalidParams(_)) => ms.sample_j_element(JFamily::Mixed, &mut rng).unwrap(),
            other => other.unwrap(),
        };
        prop_assert!(ms.is_in_j(&g).unwrap());
        prop_assert!(ms.is_in_min(&a.group_act(&g).unwrap()).unwrap());
        prop_assert!(ms.displacement(&a.fb_act(ms.isocrystal()).unwrap()).unwrap() == ms.min_nu());
    }
}
