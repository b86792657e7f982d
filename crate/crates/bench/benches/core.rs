use criterion::{criterion_group, criterion_main, Criterion};
use num_rational::Rational64;

use isoskel::building::{rel_position, rel_position_fast, Norm};
use isoskel::minset::{kappa_scan, ScanConfig};
use isoskel::padic::make_field;
use isoskel::{FieldElement, MinSet};
use isoskel_bench::{third_p2, unimodular};

fn arithmetic(c: &mut Criterion) {
    let ctx = make_field(3, 4, 40, 1).unwrap();
    let x = FieldElement::from_poly(&ctx, &[1, 2, 0, 1]).add(&FieldElement::p_power(&ctx, 3));
    let y = FieldElement::from_poly(&ctx, &[2, 1, 1, 0]);
    c.bench_function("mul Q_81 N=40", |b| b.iter(|| x.mul(&y)));
    c.bench_function("inv Q_81 N=40", |b| b.iter(|| x.inv().unwrap()));
    c.bench_function("frobenius Q_81 N=40", |b| b.iter(|| x.frobenius(1)));
}

fn linear_algebra(c: &mut Criterion) {
    let ic = third_p2();
    let u = unimodular(&ic, 1);
    let m = u.mul(ic.matrix()).unwrap();
    c.bench_function("smith normal form 3x3", |b| b.iter(|| m.smith_normal_form().unwrap()));
    c.bench_function("charpoly 3x3", |b| b.iter(|| m.charpoly().unwrap()));
    c.bench_function("newton point slope 1/3", |b| b.iter(|| ic.newton_point().unwrap()));
}

fn building(c: &mut Criterion) {
    let ic = third_p2();
    let r = |a, b| Rational64::new(a, b);
    let a = Norm::standard(ic.context(), vec![r(0, 1), r(1, 2), r(-1, 3)]).unwrap();
    let b = Norm::new(unimodular(&ic, 2), vec![r(1, 1), r(0, 1), r(1, 6)]).unwrap();
    c.bench_function("rel_position eisenstein", |bn| bn.iter(|| rel_position(&a, &b).unwrap()));
    c.bench_function("rel_position fast", |bn| bn.iter(|| rel_position_fast(&a, &b).unwrap()));
}

fn scan(c: &mut Criterion) {
    let ms = MinSet::new(&third_p2()).unwrap();
    let cfg = ScanConfig { samples: 20, check_doubling: false, ..ScanConfig::default() };
    let mut group = c.benchmark_group("scan");
    group.sample_size(10);
    group.bench_function("kappa_scan 20 samples slope 1/3", |b| b.iter(|| kappa_scan(&ms, &cfg).unwrap()));
    group.finish();
}

criterion_group!(benches, arithmetic, linear_algebra, building, scan);
criterion_main!(benches);
