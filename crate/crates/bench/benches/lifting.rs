use criterion::{black_box, criterion_group, criterion_main, Criterion};
use eqlift::kernel::equivariance_defect;
use eqlift::lifting::{convolve, domain_average, lift_eval};
use eqlift::{BoundaryFunction, BoundaryPoint, GroupElement, KernelSpec, Window};

fn lifting(c: &mut Criterion) {
    let sign = BoundaryFunction::sign();
    let spec = KernelSpec::new(32.0, Window::SYMMETRIC).unwrap();
    c.bench_function("convolve sign at 1, t = 32", |b| {
        b.iter(|| convolve(&sign, black_box(1.0), &spec))
    });
    c.bench_function("lift_eval sign at 1, schedule 8..64", |b| {
        b.iter(|| {
            lift_eval(
                &sign,
                BoundaryPoint::Finite(black_box(1.0)),
                &[8.0, 16.0, 32.0, 64.0],
                Window::SYMMETRIC,
            )
        })
    });
    let mut group = c.benchmark_group("monte carlo");
    group.sample_size(10);
    group.bench_function("domain average, 10^5 samples", |b| {
        b.iter(|| {
            domain_average(
                &sign,
                BoundaryPoint::Finite(0.0),
                20.0,
                Window::SYMMETRIC,
                100_000,
                black_box(1),
            )
        })
    });
    group.finish();
    let dil = GroupElement::diagonal(2f64.ln() / 2.0);
    c.bench_function("dilation defect, t = 16", |b| {
        b.iter(|| {
            equivariance_defect(
                &dil,
                BoundaryPoint::Finite(0.0),
                &KernelSpec::new(black_box(16.0), Window::SYMMETRIC).unwrap(),
            )
        })
    });
}

criterion_group!(benches, lifting);
criterion_main!(benches);
