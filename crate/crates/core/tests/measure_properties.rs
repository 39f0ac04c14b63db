mod common;

use std::collections::BTreeMap;

use common::{close, context, dense, dense_tau};
use divsim::measures::functions::{cosine, jaccard, jensen_shannon, kl, l1, l2, skew};
use divsim::measures::kendall::kendall_tau_ratio;
use divsim::measures::support::evaluate_support_form;
use divsim::measures::{MeasureContext, MeasureKind, MeasureSpec};
use divsim::{SparseDistribution, VerbId};
use proptest::prelude::*;

const VOCAB: u32 = 40;

fn arb_dist() -> impl Strategy<Value = SparseDistribution> {
    prop::collection::btree_map(0..VOCAB, 0.01f64..1.0, 1..20).prop_map(to_dist)
}

fn to_dist(m: BTreeMap<u32, f64>) -> SparseDistribution {
    SparseDistribution::from_weights(m.into_iter().map(|(v, w)| (VerbId(v), w))).unwrap()
}

/// Pair whose supports share nothing.
fn arb_disjoint() -> impl Strategy<Value = (SparseDistribution, SparseDistribution)> {
    prop::collection::btree_map(0..VOCAB, (0.01f64..1.0, any::<bool>()), 2..20)
        .prop_filter("both sides nonempty", |m| {
            m.values().any(|(_, s)| *s) && m.values().any(|(_, s)| !*s)
        })
        .prop_map(|m| {
            let side = |want: bool| {
                to_dist(m.iter().filter(|(_, (_, s))| *s == want).map(|(&v, &(w, _))| (v, w)).collect())
            };
            (side(true), side(false))
        })
}

fn unigram() -> Vec<f64> {
    (0..VOCAB).map(|i| (i + 1) as f64 / (VOCAB * (VOCAB + 1) / 2) as f64).collect()
}

proptest! {
    #[test]
    fn symmetric_measures(q in arb_dist(), r in arb_dist()) {
        prop_assert_eq!(l1(&q, &r), l1(&r, &q));
        prop_assert_eq!(l2(&q, &r), l2(&r, &q));
        prop_assert_eq!(cosine(&q, &r), cosine(&r, &q));
        prop_assert_eq!(jaccard(&q, &r), jaccard(&r, &q));
        prop_assert_eq!(jensen_shannon(&q, &r), jensen_shannon(&r, &q));
        let v = VOCAB as usize;
        prop_assert_eq!(kendall_tau_ratio(&q, &r, v).unwrap(), kendall_tau_ratio(&r, &q, v).unwrap());
    }

    #[test]
    fn ranges(q in arb_dist(), r in arb_dist(), alpha in 0.0f64..0.999) {
        let eps = 1e-12;
        prop_assert!((0.0..=2.0 + eps).contains(&l1(&q, &r)));
        prop_assert!((0.0..=2f64.sqrt() + eps).contains(&l2(&q, &r)));
        prop_assert!((0.0..=1.0 + eps).contains(&cosine(&q, &r)));
        prop_assert!((0.0..=1.0).contains(&jaccard(&q, &r)));
        prop_assert!((0.0..=std::f64::consts::LN_2 + eps).contains(&jensen_shannon(&q, &r)));
        let tau = kendall_tau_ratio(&q, &r, VOCAB as usize).unwrap().value();
        prop_assert!((-1.0..=1.0).contains(&tau));
        prop_assert!(skew(&q, &r, alpha).unwrap() >= 0.0);
        if let Ok(d) = kl(&q, &r) {
            prop_assert!(d >= 0.0);
        }
    }

    #[test]
    fn identity_of_indiscernibles(q in arb_dist(), alpha in 0.0f64..=1.0) {
        prop_assert!(l1(&q, &q) == 0.0);
        prop_assert!(l2(&q, &q) == 0.0);
        prop_assert!(close(cosine(&q, &q), 1.0, 0.0, 1e-12));
        prop_assert!(jaccard(&q, &q) == 1.0);
        prop_assert!(jensen_shannon(&q, &q) < 1e-15);
        prop_assert!(kl(&q, &q).unwrap() < 1e-15);
        prop_assert!(skew(&q, &q, alpha).unwrap() < 1e-15);
    }

    #[test]
    fn disjoint_supports_hit_extremes((q, r) in arb_disjoint(), alpha in 0.0f64..0.999) {
        prop_assert!(close(l1(&q, &r), 2.0, 0.0, 1e-12));
        prop_assert!(cosine(&q, &r) == 0.0);
        prop_assert!(jaccard(&q, &r) == 0.0);
        prop_assert!(close(jensen_shannon(&q, &r), std::f64::consts::LN_2, 0.0, 1e-12));
        prop_assert!(kl(&q, &r).is_err());
        prop_assert!(close(skew(&q, &r, alpha).unwrap(), -(1.0 - alpha).ln(), 1e-12, 1e-12));
    }

    #[test]
    fn skew_identities(q in arb_dist(), r in arb_dist()) {
        let half = |a: &SparseDistribution, b: &SparseDistribution| skew(a, b, 0.5).unwrap();
        let js = 0.5 * (half(&q, &r) + half(&r, &q));
        prop_assert!(close(js, jensen_shannon(&q, &r), 1e-9, 1e-12));
        match kl(&r, &q) {
            Ok(d) => prop_assert!(close(skew(&q, &r, 1.0).unwrap(), d, 1e-9, 1e-12)),
            Err(_) => prop_assert!(skew(&q, &r, 1.0).is_err()),
        }
    }

    #[test]
    fn skew_is_monotone_in_alpha(q in arb_dist(), r in arb_dist(), a in 0.0f64..0.99, gap in 0.001f64..0.009) {
        // r's mixture weight shrinks as alpha grows, so D(r || mix) cannot fall.
        prop_assert!(skew(&q, &r, a).unwrap() <= skew(&q, &r, a + gap).unwrap() + 1e-12);
    }

    #[test]
    fn support_forms_match_definitions(q in arb_dist(), r in arb_dist(), prior in 0.001f64..1.0) {
        let uni = unigram();
        let ctx = context(&uni, prior);
        for kind in [MeasureKind::L1, MeasureKind::L2, MeasureKind::Cosine, MeasureKind::Jaccard,
                     MeasureKind::JensenShannon, MeasureKind::Confusion] {
            let spec = MeasureSpec::new(kind);
            let a = spec.evaluate(&q, &r, &ctx).unwrap();
            let b = evaluate_support_form(&spec, &q, &r, &ctx).unwrap();
            prop_assert!(close(a, b, 1e-9, 1e-12), "{}: {} vs {}", kind.name(), a, b);
        }
    }

    #[test]
    fn support_locality(q in arb_dist(), r in arb_dist(), extra in VOCAB..VOCAB + 20) {
        // Growing the vocabulary leaves every support-based measure unchanged.
        let small = unigram();
        let mut big = small.iter().map(|p| p * 0.5).collect::<Vec<_>>();
        big.extend((VOCAB..=extra).map(|_| 0.5 / (extra - VOCAB + 1) as f64));
        for kind in [MeasureKind::L1, MeasureKind::L2, MeasureKind::Cosine, MeasureKind::Jaccard,
                     MeasureKind::JensenShannon, MeasureKind::Kl, MeasureKind::Skew] {
            let spec = MeasureSpec::new(kind);
            let a = spec.evaluate(&q, &r, &context(&small, 0.1));
            let b = spec.evaluate(&q, &r, &context(&big, 0.1));
            prop_assert_eq!(a.ok(), b.ok());
        }
    }

    #[test]
    fn tau_matches_dense_enumeration(q in arb_dist(), r in arb_dist(), pad in 0usize..5) {
        let v = VOCAB as usize + pad;
        let ratio = kendall_tau_ratio(&q, &r, v).unwrap();
        let (num, den) = dense_tau(&dense(&q, v), &dense(&r, v));
        prop_assert_eq!((ratio.numerator, ratio.denominator), (num, den));
    }

    #[test]
    fn weights_are_nonnegative(q in arb_dist(), r in arb_dist(), beta in 0.1f64..10.0) {
        let uni = unigram();
        let ctx = context(&uni, 0.05);
        for kind in MeasureKind::ALL {
            let spec = MeasureSpec::new(kind);
            if let Ok(value) = spec.evaluate(&q, &r, &ctx) {
                let w = divsim::measures::to_similarity_weight(&spec, value, beta).unwrap();
                prop_assert!(w >= 0.0 && w.is_finite());
            }
        }
    }
}

#[test]
fn tau_needs_room_for_the_union() {
    let q = to_dist([(0, 1.0), (5, 1.0)].into_iter().collect());
    let r = to_dist([(9, 1.0)].into_iter().collect());
    assert!(kendall_tau_ratio(&q, &r, 2).is_err());
    assert!(kendall_tau_ratio(&q, &r, 3).is_ok());
    let one = MeasureContext::standalone(1);
    assert!(MeasureSpec::new(MeasureKind::KendallTau).evaluate(&q, &q, &one).is_err());
}

#[test]
fn unsupported_support_forms_are_rejected() {
    let q = to_dist([(0, 1.0)].into_iter().collect());
    let ctx = MeasureContext::standalone(4);
    for kind in [MeasureKind::Kl, MeasureKind::KendallTau, MeasureKind::Skew] {
        assert!(evaluate_support_form(&MeasureSpec::new(kind), &q, &q, &ctx).is_err());
    }
}
