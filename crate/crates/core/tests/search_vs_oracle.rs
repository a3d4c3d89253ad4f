use bseq_core::equiv::dedup;
use bseq_core::oracle::brute;
use bseq_core::search::{search, SearchConfig};
use bseq_core::Kind;

fn classes_match(n: usize, kind: Kind) {
    let expected = dedup(&brute(n, kind).unwrap(), kind).unwrap();
    let out = search(&SearchConfig::new(n, kind)).unwrap();
    let got: Vec<_> = out.results.into_iter().map(|f| f.quad).collect();
    assert!(out.certificate.exhaustive);
    assert_eq!(got.len(), expected.len(), "{kind}({n}) class count");
    assert_eq!(got, expected, "{kind}({n}) classes");
}

#[test]
fn bs_small_orders() {
    for n in 1..=5 {
        classes_match(n, Kind::Bs);
    }
}

#[test]
fn ns_small_orders() {
    for n in 1..=8 {
        classes_match(n, Kind::Ns);
    }
}

#[test]
fn nns_small_orders() {
    for n in [2, 4, 6, 8] {
        classes_match(n, Kind::Nns);
    }
}
