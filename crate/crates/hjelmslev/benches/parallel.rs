//! Compares the data-parallel hot paths against single-worker execution:
//! the condensed arc search, the codeword weight census and the Gray-image
//! distance check. Build with `--no-default-features` to bench the pure
//! sequential fallback instead.

use criterion::{criterion_group, criterion_main, Criterion};

use hjelmslev::codes::{gray_image, RingLinearCode, DEFAULT_MAX_CODEWORDS};
use hjelmslev::orbits::{condense, orbits, singer_lift, CondensedSystem, OrbitPartition};
use hjelmslev::par;
use hjelmslev::plane::Plane;
use hjelmslev::ring::GaloisRing;
use hjelmslev::search::{
    expand, maximize, ArcKind, Budget, SearchMode, SearchProblem,
};

struct Setup {
    plane: Plane,
    partition: OrbitPartition,
    system: CondensedSystem,
}

fn gr16_singer() -> Setup {
    let ring = GaloisRing::new(2, 2, 2, None).unwrap();
    let plane = Plane::new(&ring).unwrap();
    let a = singer_lift(&ring).unwrap();
    let partition = orbits(&[a], &plane).unwrap();
    let system = condense(&plane, &partition);
    Setup {
        plane,
        partition,
        system,
    }
}

fn mode_label() -> &'static str {
    if cfg!(feature = "parallel") {
        "parallel"
    } else {
        "sequential"
    }
}

fn worker_counts() -> Vec<usize> {
    if cfg!(feature = "parallel") {
        vec![1, 0] // one thread vs default pool
    } else {
        vec![1]
    }
}

fn workers_label(w: usize) -> String {
    if w == 0 {
        "all-threads".into()
    } else {
        format!("{}-thread", w)
    }
}

fn bench_arc_search(c: &mut Criterion) {
    let setup = gr16_singer();
    let mut group = c.benchmark_group(format!("arc_search_maximize_u8/{}", mode_label()));
    for w in worker_counts() {
        group.bench_function(workers_label(w), |b| {
            b.iter(|| {
                par::run_with_workers(w, || {
                    let problem = SearchProblem {
                        system: &setup.system,
                        u: 8,
                        mode: SearchMode::Maximize,
                        kind: ArcKind::Projective,
                        budget: Budget::default(),
                    };
                    maximize(&problem).best.map(|s| s.n)
                })
            });
        });
    }
    group.finish();
}

fn bench_weight_census(c: &mut Criterion) {
    let setup = gr16_singer();
    let problem = SearchProblem {
        system: &setup.system,
        u: 8,
        mode: SearchMode::FixedN(126),
        kind: ArcKind::Projective,
        budget: Budget::default(),
    };
    let sol = match hjelmslev::search::solve_fixed_n(&problem).outcome {
        hjelmslev::search::FixedOutcome::Found(sol) => sol,
        other => panic!("no (126,8)-arc: {:?}", other),
    };
    let points = expand(&sol.x, &setup.partition);
    let code = RingLinearCode::from_arc(&points, &setup.plane).unwrap();

    let mut group = c.benchmark_group(format!("weight_census_126/{}", mode_label()));
    for w in worker_counts() {
        group.bench_function(workers_label(w), |b| {
            b.iter(|| {
                par::run_with_workers(w, || {
                    code.hom_weight_enumerator(DEFAULT_MAX_CODEWORDS).unwrap()
                })
            });
        });
    }
    group.finish();

    let mut group = c.benchmark_group(format!("gray_distance_check_4096/{}", mode_label()));
    group.sample_size(10);
    for w in worker_counts() {
        group.bench_function(workers_label(w), |b| {
            b.iter(|| {
                par::run_with_workers(w, || {
                    gray_image(&code, DEFAULT_MAX_CODEWORDS).unwrap().min_distance
                })
            });
        });
    }
    group.finish();
}

criterion_group!(benches, bench_arc_search, bench_weight_census);
criterion_main!(benches);
