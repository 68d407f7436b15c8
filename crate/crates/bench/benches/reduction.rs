use criterion::{black_box, criterion_group, criterion_main, Criterion};

use poired::analysis::analyze;
use poired::dirac::check_pushpull;
use poired::fixtures::fixture;
use poired::reduce::{Complement, ReductionProblem};

fn reduction(c: &mut Criterion) {
    for name in ["poissonex", "exr6", "coiso", "u2-gl2c"] {
        let scene = fixture(name).unwrap().scene();
        let p = ReductionProblem::from_scene(&scene).unwrap();
        c.bench_function(&format!("reduced bivector {name}"), |b| b.iter(|| p.reduced_bivector(black_box(Complement::Default)).unwrap()));
        c.bench_function(&format!("pushpull {name}"), |b| b.iter(|| check_pushpull(black_box(&p)).unwrap()));
        c.bench_function(&format!("full analysis {name}"), |b| b.iter(|| analyze(black_box(&scene), Complement::Default)));
    }
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = reduction
}
criterion_main!(benches);
