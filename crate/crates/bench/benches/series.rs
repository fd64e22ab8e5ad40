use criterion::{black_box, criterion_group, criterion_main, Criterion};
use qseries_core::builders::{build_q1, SeriesBank};
use qseries_core::character::{check_ch, check_char_b, check_fg1, ChVariant, Mode};
use qseries_core::determinant::casorati;
use qseries_core::identities::{conj_b, increasing_tuples, plucker, wronskian, Engine};
use qseries_core::root_data::parse_tuple;
use qseries_core::{AlgebraContext, BoxIndex};

fn builders(c: &mut Criterion) {
    let b3 = AlgebraContext::b(3);
    c.bench_function("build_q1 B3 1 D=5", |b| {
        b.iter(|| build_q1(&b3, BoxIndex::Plain(1), black_box(5)).unwrap())
    });
    let c3 = AlgebraContext::c(3);
    c.bench_function("build_q1 C3 0 D=5", |b| {
        b.iter(|| build_q1(&c3, BoxIndex::Zero, black_box(5)).unwrap())
    });
}

fn determinants(c: &mut Criterion) {
    let b3 = AlgebraContext::b(3);
    let j = parse_tuple("1,2,3").unwrap();
    c.bench_function("casorati B3 (1,2,3) D=3", |b| {
        b.iter(|| casorati(&b3, &j, black_box(3), 0, &SeriesBank::new()).unwrap())
    });
    c.bench_function("wronskian A3 D=4", |b| {
        b.iter(|| wronskian(&Engine::new(), 3, black_box(4)).unwrap())
    });
}

fn relations(c: &mut Criterion) {
    let d4 = AlgebraContext::d(4);
    let j1 = parse_tuple("1,2").unwrap();
    let j2 = parse_tuple("3,4b").unwrap();
    c.bench_function("plucker D4 D=3", |b| {
        b.iter(|| plucker(&Engine::new(), &d4, &j1, &j2, black_box(3), false).unwrap())
    });
    let b2 = AlgebraContext::b(2);
    let ts = increasing_tuples(&b2, 2);
    c.bench_function("type B relation B2 D=6", |b| {
        b.iter(|| conj_b(&Engine::new(), &b2, &ts[0], &ts[5], black_box(6)).unwrap())
    });
}

fn characters(c: &mut Criterion) {
    let b3 = AlgebraContext::b(3);
    let ts = increasing_tuples(&b3, 3);
    c.bench_function("char-b B3 exact", |b| {
        b.iter(|| check_char_b(&b3, &ts[0], &ts[19], Mode::Exact).unwrap())
    });
    let modp = Mode::Modp { trials: 3, seed: 1 };
    c.bench_function("char-b B3 modp", |b| {
        b.iter(|| check_char_b(&b3, &ts[0], &ts[19], modp).unwrap())
    });
    c.bench_function("fg1 m=2 n=4 exact", |b| {
        b.iter(|| check_fg1(2, 4, Mode::Exact).unwrap())
    });
    c.bench_function("ch-c3 n=6 modp", |b| {
        b.iter(|| check_ch(ChVariant::C3, 6, &[1, 2], &[3, 4], None, modp).unwrap())
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = builders, determinants, relations, characters
}
criterion_main!(benches);
