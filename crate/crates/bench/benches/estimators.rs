use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use ptfsense_bench::{circles, points, random_ptf};
use ptfsense_core::{count_sign_changes, estimate_gns, CorrelationSpec, McConfig};

fn evaluation(c: &mut Criterion) {
    let mut group = c.benchmark_group("evaluate");
    for (n, d) in [(2, 2), (6, 3), (10, 4)] {
        let f = random_ptf(n, d);
        let xs = points(n, 1024);
        group.throughput(Throughput::Elements(xs.len() as u64));
        group.bench_with_input(BenchmarkId::from_parameter(format!("n{n}_d{d}")), &xs, |b, xs| {
            let mut eval = f.poly().evaluator();
            b.iter(|| xs.iter().map(|x| eval.eval(black_box(x))).sum::<f64>())
        });
    }
    group.finish();
}

fn sign_changes(c: &mut Criterion) {
    let mut group = c.benchmark_group("count_sign_changes");
    for d in [1u32, 3, 6] {
        let f = random_ptf(4, d);
        let cs = circles(4, 256);
        group.throughput(Throughput::Elements(cs.len() as u64));
        group.bench_with_input(BenchmarkId::from_parameter(d), &cs, |b, cs| {
            b.iter(|| {
                cs.iter()
                    .map(|(x, y)| count_sign_changes(f.poly(), x, y).unwrap().count)
                    .sum::<usize>()
            })
        });
    }
    group.finish();
}

fn gns(c: &mut Criterion) {
    let f = random_ptf(5, 3);
    let spec = CorrelationSpec::new(0.05).unwrap();
    let cfg = McConfig::new(100_000, 3);
    c.bench_function("estimate_gns/n5_d3/100k", |b| {
        b.iter(|| estimate_gns(black_box(&f), &spec, &cfg).unwrap())
    });
}

criterion_group!(benches, evaluation, sign_changes, gns);
criterion_main!(benches);
