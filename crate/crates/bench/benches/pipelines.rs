use criterion::{black_box, criterion_group, criterion_main, Criterion};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tricircular::hardy::{hp_norm_1d, BoundaryGrid, PNorm};
use tricircular::moebius::DiscAutomorphism;
use tricircular::operators::{calibrate_alpha, materialize_1d, OperatorExpr};
use tricircular::projections::{
    classify_1d, eigenprojection_oracle, lagrange_falsifier, ClassifyParams, EigenPair,
    OracleParams,
};
use tricircular::samples;
use tricircular::{Complex64, WeightedCompositionOp1D};

fn order3_op() -> WeightedCompositionOp1D {
    let tau = DiscAutomorphism::elliptic_of_order(3, Complex64::new(0.4, 0.0)).unwrap();
    let p = PNorm::Finite(4.0);
    let alpha = calibrate_alpha(&tau, 3, p).unwrap();
    WeightedCompositionOp1D::new(alpha, tau, p).unwrap()
}

fn bench_series_compose(c: &mut Criterion) {
    let f = samples::unit_square_polynomials(1, 1, 64, samples::SampleClass::Unrestricted)
        .remove(0);
    let g = samples::unit_square_polynomials(2, 1, 64, samples::SampleClass::Unrestricted)
        .remove(0);
    c.bench_function("series_compose_deg64", |b| {
        b.iter(|| black_box(&f).compose(black_box(&g), 64))
    });
}

fn bench_hp_norm(c: &mut Criterion) {
    let f = samples::bounded_zero_polynomials(3, 1, 16, 0.8).remove(0);
    let grid = BoundaryGrid::new(2048).unwrap();
    c.bench_function("hp_norm_p3_m2048", |b| {
        b.iter(|| hp_norm_1d(|z| black_box(&f).evaluate(z), PNorm::Finite(3.0), &grid))
    });
}

fn bench_materialize(c: &mut Criterion) {
    let expr = OperatorExpr::atom(order3_op());
    c.bench_function("materialize_deg24", |b| {
        b.iter(|| materialize_1d(black_box(&expr), 24))
    });
    c.bench_function("materialize_deg48", |b| {
        b.iter(|| materialize_1d(black_box(&expr), 48))
    });
}

fn bench_classify(c: &mut Criterion) {
    let op = order3_op();
    let params = ClassifyParams::default();
    c.bench_function("classify_1d_order3", |b| {
        b.iter(|| classify_1d(black_box(&op), &params).unwrap())
    });
}

fn bench_oracle(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let pair = EigenPair::cube_roots();
    let choices = [Complex64::ONE, pair.lambda1(), pair.lambda2()];
    let n = 6;
    let raw = DMatrix::from_fn(n, n, |_, _| {
        Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
    });
    let q = raw.qr().q();
    let d = DVector::from_iterator(n, (0..n).map(|_| Complex64::new(0.5 + rng.random::<f64>(), 0.0)));
    let basis = &q * DMatrix::from_diagonal(&d);
    let basis_inv = basis.clone().lu().try_inverse().unwrap();
    let eigenvalues = DVector::from_iterator(n, (0..n).map(|_| choices[rng.random_range(0..3)]));
    let t = &basis * DMatrix::from_diagonal(&eigenvalues) * &basis_inv;
    c.bench_function("eigenprojection_oracle_6x6", |b| {
        b.iter(|| eigenprojection_oracle(black_box(&t), &pair, &OracleParams::default()).unwrap())
    });
}

fn bench_falsifier(c: &mut Criterion) {
    let tau = DiscAutomorphism::elliptic_of_order(5, Complex64::new(0.3, 0.0)).unwrap();
    let op = WeightedCompositionOp1D::new(Complex64::ONE, tau, PNorm::Finite(4.0)).unwrap();
    let pair = EigenPair::cube_roots();
    c.bench_function("lagrange_falsifier_order5", |b| {
        b.iter(|| lagrange_falsifier(black_box(&op), &pair).unwrap())
    });
}

criterion_group!(
    benches,
    bench_series_compose,
    bench_hp_norm,
    bench_materialize,
    bench_classify,
    bench_oracle,
    bench_falsifier
);
criterion_main!(benches);
