use criterion::{black_box, criterion_group, criterion_main, Criterion};

use poired::chartgeo::{jacobiator, poisson_bracket};
use poired::fixtures::fixture;
use poired::reduce::ReductionProblem;
use poired::VarSet;

fn arithmetic(c: &mut Criterion) {
    let vars = VarSet::new(["x", "y", "z"]);
    let a = vars.parse("(x^2*y - 3*z + 1)/(x - y)").unwrap();
    let b = vars.parse("(y^3 + x*z)/(x^2 - y^2)").unwrap();
    c.bench_function("rational add with common factor", |bch| bch.iter(|| black_box(&a) + black_box(&b)));
    c.bench_function("rational mul and cancel", |bch| bch.iter(|| &(black_box(&a) * black_box(&b)) / &b));
    c.bench_function("parse", |bch| bch.iter(|| vars.parse(black_box("(x^2*y - 3*z + 1)/(x - y)^2")).unwrap()));
}

fn brackets(c: &mut Criterion) {
    let zxy = ReductionProblem::from_scene(&fixture("zxy").unwrap().scene()).unwrap();
    let pi = zxy.pi();
    let f = pi.chart().parse("x^2 + y*z").unwrap();
    let g = pi.chart().parse("x*y/(1 + z^2)").unwrap();
    c.bench_function("poisson bracket", |bch| bch.iter(|| poisson_bracket(black_box(pi), &f, &g).unwrap()));
    let u2 = ReductionProblem::from_scene(&fixture("u2-gl2c").unwrap().scene()).unwrap();
    c.bench_function("jacobiator of U(2) structure", |bch| bch.iter(|| jacobiator(black_box(u2.pi()))));
}

criterion_group!(benches, arithmetic, brackets);
criterion_main!(benches);
