mod common;

use proptest::prelude::*;

use common::Seq;
use tracemine::mining::alternating::{mine_alternating, AlternatingConfig};
use tracemine::mining::episode::{mine_episodes, EpisodeConfig};
use tracemine::mining::flow::{mine_flow, FlowConfig};
use tracemine::mining::ltl::mine_follows;
use tracemine::mining::seqpat::{mine_frequent, SeqpatConfig};

fn db() -> impl Strategy<Value = (Vec<Seq>, usize)> {
    (2usize..=6).prop_flat_map(|vocab| {
        (prop::collection::vec(prop::collection::vec(0..vocab as u32, 0..=12), 1..=3), Just(vocab))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn seqpat_matches_enumeration((db, vocab) in db(), min_support in 1usize..=3, max_len in 1usize..=4) {
        let min_support = min_support.min(db.len());
        let cfg = SeqpatConfig { min_support, max_len: Some(max_len), max_patterns: None };
        let got: Vec<(Seq, u64)> = mine_frequent(&common::flat_corpus(&db, vocab), &cfg)
            .unwrap()
            .iter()
            .map(|p| (p.sequence.iter().map(|e| e.0).collect(), p.support))
            .collect();
        prop_assert_eq!(got, common::seqpat(&db, min_support, Some(max_len)));
    }

    #[test]
    fn alternating_matches_regex_sweep((db, vocab) in db(), k in 1usize..=4, rate_idx in 0usize..3) {
        let min_rate = [0.5, 0.75, 1.0][rate_idx];
        let got: Vec<common::AltRow> = mine_alternating(&common::flat_corpus(&db, vocab), &AlternatingConfig { k_partitions: k, min_rate })
            .unwrap()
            .iter()
            .map(|p| common::AltRow { x: p.x.0, y: p.y.0, rate: p.satisfaction_rate, observed: p.observed })
            .collect();
        prop_assert_eq!(got, common::alternating(&db, k, min_rate));
    }

    #[test]
    fn episode_matches_window_enumeration((db, vocab) in db(), w in 1usize..=6, min_support in 1u64..=3, conf_idx in 0usize..3) {
        let cfg = EpisodeConfig { window_w: w, min_support, min_confidence: [0.25, 0.5, 1.0][conf_idx], max_len: 3 };
        let got: Vec<(Seq, u64, f64)> = mine_episodes(&common::flat_corpus(&db, vocab), &cfg)
            .unwrap()
            .patterns
            .iter()
            .map(|p| (p.sequence.iter().map(|e| e.0).collect(), p.support, p.confidence.unwrap()))
            .collect();
        prop_assert_eq!(got, common::episodes(&db, w, min_support, cfg.min_confidence, 3));
    }

    #[test]
    fn ltl_matches_pair_scan((db, vocab) in db()) {
        let got: Vec<(u32, u32)> = mine_follows(&common::flat_corpus(&db, vocab)).unwrap().iter().map(|f| (f.x.0, f.y.0)).collect();
        prop_assert_eq!(got, common::ltl(&db, vocab));
    }

    #[test]
    fn flow_matches_verified_chaining((db, vocab) in db(), min_support in 1u64..=2, conf_idx in 0usize..2, max_chain_len in 2usize..=5) {
        let cfg = FlowConfig { min_support, min_confidence: [0.5, 1.0][conf_idx], max_chain_len };
        let got: Vec<(Seq, u64, Option<f64>)> = mine_flow(&common::flat_corpus(&db, vocab), &cfg)
            .unwrap()
            .patterns
            .iter()
            .map(|p| (p.sequence.iter().map(|e| e.0).collect(), p.support, p.confidence))
            .collect();
        prop_assert_eq!(got, common::flow(&db, vocab, min_support, cfg.min_confidence, max_chain_len));
    }
}
