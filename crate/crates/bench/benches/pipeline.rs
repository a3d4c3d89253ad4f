use criterion::{black_box, criterion_group, criterion_main, BatchSize, Criterion};

use bseq_core::equiv::canonical;
use bseq_core::oracle::brute_bs;
use bseq_core::numfilter::{residue_profiles, sum_profiles, ResidueProfile, Side};
use bseq_core::search::{
    backtrack_complete, outer_columns, search, CandidateStream, Mode, SearchConfig,
};
use bseq_core::specfilter::{PsdEvaluator, ThetaGrid};
use bseq_core::{parse_quads, row_sums, verify, Kind, PackedSeq, SeqQuad};

fn bs41() -> SeqQuad {
    parse_quads(include_str!("../../core/tests/data/known_bs.txt"), Kind::Bs)
        .unwrap()
        .remove(0)
}

fn autocorrelation(c: &mut Criterion) {
    let q = bs41();
    let packed = PackedSeq::from_signs(q.a.as_slice()).unwrap();
    c.bench_function("paf/packed_42", |b| {
        b.iter(|| (1..42).map(|s| black_box(&packed).paf(s)).sum::<i32>())
    });
    c.bench_function("verify/bs41", |b| b.iter(|| verify(black_box(&q)).valid));
}

fn spectral(c: &mut Criterion) {
    let q = bs41();
    let ev = PsdEvaluator::new(ThetaGrid::pi_over(100), 41);
    c.bench_function("psd/pi_over_100_pair", |b| {
        b.iter(|| ev.keep(black_box(&q.c), black_box(&q.d), 166.0))
    });
    let ev = PsdEvaluator::new(ThetaGrid::uniform(1000), 42);
    c.bench_function("psd/l1000_pair", |b| {
        b.iter(|| ev.keep(black_box(&q.a), black_box(&q.b), 166.0))
    });
}

fn numeric(c: &mut Criterion) {
    c.bench_function("sums/ns45", |b| b.iter(|| sum_profiles(black_box(45), Kind::Ns)));
    let q = bs41();
    let s = row_sums(&q);
    let mut g = c.benchmark_group("residue");
    g.sample_size(10);
    g.bench_function("bs41_m3", |b| b.iter(|| residue_profiles(41, 3, s, Kind::Bs).unwrap()));
    g.finish();
}

fn expansion(c: &mut Criterion) {
    let q = bs41();
    let half = ResidueProfile::from_quad(&q, 6).half(Side::CD);
    let prefix = outer_columns(&q.c, &q.d, Side::CD, 41, 10);
    c.bench_function("stream/bs41_shard_10_first_1000", |b| {
        b.iter_batched(
            || CandidateStream::with_prefix(&half, 41, Kind::Bs, &prefix).unwrap(),
            |s| s.take(1000).count(),
            BatchSize::SmallInput,
        )
    });
}

fn completion(c: &mut Criterion) {
    let q = bs41();
    let small = brute_bs(5).unwrap();
    let mut g = c.benchmark_group("search");
    g.sample_size(10);
    g.bench_function("backtrack/bs5_all_oracle_cd", |b| {
        b.iter(|| {
            small
                .iter()
                .map(|s| backtrack_complete((&s.c, &s.d), 5, Kind::Bs, Side::AB, Mode::All).unwrap().len())
                .sum::<usize>()
        })
    });
    g.bench_function("exhaustive/ns8", |b| b.iter(|| search(&SearchConfig::new(8, Kind::Ns)).unwrap()));
    g.bench_function("canonical/bs41", |b| b.iter(|| canonical(&q, Kind::Bs).unwrap()));
    g.finish();
}

criterion_group!(benches, autocorrelation, spectral, numeric, expansion, completion);
criterion_main!(benches);
