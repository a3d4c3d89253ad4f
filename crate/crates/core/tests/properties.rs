use std::collections::HashSet;
use std::f64::consts::PI;
use std::sync::OnceLock;

use bseq_core::equiv::{apply, canonical, orbit, Transform, Which};
use bseq_core::numfilter::{
    class_sums, coupling_holds, mod4_laws_hold, sum_class_key, sum_profiles, ResidueProfile, Side,
};
use bseq_core::oracle::brute;
use bseq_core::search::{expand_candidates, outer_columns, CandidateStream};
use bseq_core::specfilter::{psd_vector, ThetaGrid, PSD_EPS};
use bseq_core::{row_sums, verify, Kind, PackedSeq, ResultRecord, SeqQuad, SignSeq};
use proptest::prelude::*;

fn oracle_quads() -> &'static Vec<SeqQuad> {
    static Q: OnceLock<Vec<SeqQuad>> = OnceLock::new();
    Q.get_or_init(|| {
        let mut v = Vec::new();
        for n in 1..=4 {
            v.extend(brute(n, Kind::Bs).unwrap());
        }
        for n in 1..=5 {
            v.extend(brute(n, Kind::Ns).unwrap());
        }
        v.extend(brute(4, Kind::Nns).unwrap());
        v
    })
}

fn any_oracle_quad() -> impl Strategy<Value = SeqQuad> {
    let len = oracle_quads().len();
    (0..len).prop_map(|i| oracle_quads()[i].clone())
}

fn sign_seq(max: usize) -> impl Strategy<Value = SignSeq> {
    prop::collection::vec(prop::bool::ANY, 0..=max)
        .prop_map(|v| SignSeq::new(v.into_iter().map(|b| if b { 1 } else { -1 }).collect()).unwrap())
}

fn any_transform() -> impl Strategy<Value = Transform> {
    let which = prop_oneof![Just(Which::A), Just(Which::B), Just(Which::C), Just(Which::D)];
    prop_oneof![
        which.clone().prop_map(Transform::NegateSeq),
        which.prop_map(Transform::ReverseSeq),
        Just(Transform::SwapAB),
        Just(Transform::SwapCD),
        Just(Transform::AlternateAll),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn packed_and_plain_autocorrelation_agree(s in sign_seq(64)) {
        let p = PackedSeq::from_signs(s.as_slice()).unwrap();
        for k in 0..=s.len() {
            prop_assert_eq!(p.paf(k as u32), s.paf(k));
        }
        prop_assert_eq!(p.to_seq(), s.clone());
        prop_assert_eq!(p.sum(), s.sum());
        prop_assert_eq!(p.alt_sum(), s.alt_sum());
    }

    #[test]
    fn negation_and_reversal_keep_autocorrelation(s in sign_seq(40)) {
        prop_assert_eq!(s.negated().autocorrelations(), s.autocorrelations());
        prop_assert_eq!(s.reversed().autocorrelations(), s.autocorrelations());
        let alt = s.alternated().autocorrelations();
        for (k, (x, y)) in alt.iter().zip(s.autocorrelations()).enumerate() {
            let sign = if k % 2 == 0 { 1 } else { -1 };
            prop_assert_eq!(*x, sign * y);
        }
    }

    #[test]
    fn hall_polynomial_matches_psd_vector(s in sign_seq(30), k in 1usize..40) {
        let g = ThetaGrid::pi_over(k);
        let v = psd_vector(&s, &g);
        for (theta, f) in g.points().iter().zip(&v) {
            prop_assert!((s.hall_f(*theta) - f).abs() < 1e-6);
            prop_assert!(*f >= -PSD_EPS);
        }
    }

    #[test]
    fn sign_text_round_trip(s in sign_seq(50)) {
        prop_assert_eq!(s.to_string().parse::<SignSeq>().unwrap(), s);
    }

    #[test]
    fn record_round_trip(q in any_oracle_quad(), canonical in prop::bool::ANY, t in prop::option::of(0u64..u64::MAX)) {
        let mut r = ResultRecord::new(q, canonical, "s3.h7");
        r.timestamp = t;
        prop_assert_eq!(r.to_string().parse::<ResultRecord>().unwrap(), r);
    }

    #[test]
    fn psd_identity_on_solutions(q in any_oracle_quad(), theta in 0.0..2.0 * PI) {
        let target = (4 * q.n() + 2) as f64;
        prop_assert!((q.total_hall(theta) - target).abs() <= 1e-9);
    }

    #[test]
    fn solution_sums_obey_laws(q in any_oracle_quad()) {
        let (n, kind) = (q.n(), q.kind);
        let s = row_sums(&q);
        prop_assert!(mod4_laws_hold(n, &s));
        prop_assert!(coupling_holds(n, kind, &s));
        let reps: HashSet<_> = sum_profiles(n, kind).into_iter().map(|r| sum_class_key(n, kind, r)).collect();
        prop_assert!(reps.contains(&sum_class_key(n, kind, s)));
    }

    #[test]
    fn orbit_preserves_validity(q in any_oracle_quad()) {
        for member in orbit(&q, q.kind).unwrap() {
            prop_assert!(verify(&member).valid);
        }
    }

    #[test]
    fn canonical_is_orbit_invariant(q in any_oracle_quad()) {
        let c = canonical(&q, q.kind).unwrap();
        prop_assert_eq!(canonical(&c, q.kind).unwrap(), c.clone());
        for member in orbit(&q, q.kind).unwrap().iter().take(50) {
            prop_assert_eq!(canonical(member, q.kind).unwrap(), c.clone());
        }
    }

    #[test]
    fn bs_transforms_keep_bs_solutions(q in any_oracle_quad(), t in any_transform()) {
        prop_assume!(q.kind == Kind::Bs);
        let img = apply(&q, t).unwrap();
        prop_assert!(verify(&img).valid);
        prop_assert_eq!(apply(&img, t).unwrap(), q);
    }

    #[test]
    fn residue_profile_coarsens_consistently(q in any_oracle_quad()) {
        let p6 = ResidueProfile::from_quad(&q, 6);
        prop_assert_eq!(p6.coarsen(), Some(ResidueProfile::from_quad(&q, 3)));
        prop_assert_eq!(p6.sum_of_squares(), (4 * q.n() + 2) as i32);
        prop_assert!(p6.pairing_sums().iter().all(|&x| x == 0));
        prop_assert_eq!(p6.to_string().parse::<ResidueProfile>().unwrap(), p6);
    }

    #[test]
    fn candidate_stream_emits_matching_distinct_pairs(q in any_oracle_quad(), m in 2usize..=4, depth in 0usize..3) {
        let n = q.n();
        let half = ResidueProfile::from_quad(&q, m).half(Side::CD);
        let prefix = outer_columns(&q.c, &q.d, Side::CD, n, depth);
        let shard: Vec<_> = CandidateStream::with_prefix(&half, n, q.kind, &prefix).unwrap().collect();
        prop_assert!(shard.contains(&(q.c.clone(), q.d.clone())));
        let mut seen = HashSet::new();
        for (x, y) in &shard {
            prop_assert_eq!(&class_sums(x, m), &half.first);
            prop_assert_eq!(&class_sums(y, m), &half.second);
            prop_assert!(seen.insert((x.clone(), y.clone())));
        }
        let full = expand_candidates(&half, n, q.kind).unwrap();
        prop_assert!(shard.iter().all(|p| full.contains(p)));
    }
}
