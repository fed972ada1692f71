use eosl_core::channel::{block_error_rate, channel_loss};
use eosl_core::metalearn::closed_form;
use eosl_core::selection::{build_leaderboard, same_winners, score_items, Criterion, ScoringContext};
use eosl_core::synthetic::SyntheticSpec;
use eosl_core::{ChannelParams, CumulativeParams, CumulativeState, EoslWeights};
use proptest::prelude::*;

proptest! {
    #[test]
    fn recursion_matches_closed_form(alpha in 0.01f64..0.99, seq in prop::collection::vec(0.0f64..5.0, 1..60)) {
        let p = CumulativeParams::from_alpha(alpha).unwrap();
        let mut s = CumulativeState::init("k", seq[0]).unwrap();
        for &e in &seq[1..] {
            s = s.update(e, &p).unwrap();
        }
        prop_assert!((s.blended - closed_form(&seq, &p).unwrap()).abs() < 1e-9);
        prop_assert_eq!(s.n as usize, seq.len() - 1);
    }

    #[test]
    fn blend_stays_within_observed_range(alpha in 0.01f64..0.99, seq in prop::collection::vec(0.0f64..5.0, 1..40)) {
        let p = CumulativeParams::from_alpha(alpha).unwrap();
        let mut s = CumulativeState::init("k", seq[0]).unwrap();
        for &e in &seq[1..] {
            s = s.update(e, &p).unwrap();
        }
        let lo = seq.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = seq.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(s.blended >= lo - 1e-12 && s.blended <= hi + 1e-12);
    }

    #[test]
    fn loss_is_a_probability_and_monotone(p in 0.0f64..0.5, l in 1u64..3000, t_frac in 0.0f64..1.0) {
        let t = ((l as f64) * t_frac) as u64;
        let here = block_error_rate(p, l, t);
        prop_assert!((0.0..=1.0).contains(&here));
        if t < l {
            prop_assert!(block_error_rate(p, l, t + 1) <= here + 1e-12);
        }
        prop_assert!(block_error_rate((p * 1.1).min(0.5), l, t) >= here - 1e-12);
    }

    #[test]
    fn deep_fade_only_adds_loss(p_b in 0.0f64..0.5, p_f in 0.0f64..1.0, t in 0u64..8) {
        let calm = channel_loss(&ChannelParams::new(p_b, 0.0, t, 64).unwrap());
        let faded = channel_loss(&ChannelParams::new(p_b, p_f, t, 64).unwrap());
        prop_assert!(faded >= calm - 1e-12);
    }

    #[test]
    fn single_term_weights_reduce_to_plain_criteria(seed in 0u64..10_000) {
        let items = SyntheticSpec::random(seed, 8).generate().items;
        let base = ScoringContext::default();
        let board = |ctx: &ScoringContext, c| build_leaderboard(&score_items(&items, ctx).unwrap(), c).unwrap();
        let sim = base.clone().with_weights(EoslWeights::new(1.0, 0.0, 0.0, 0.0).unwrap());
        let power = base.clone().with_weights(EoslWeights::new(0.0, 0.0, 0.0, 1.0).unwrap());
        prop_assert!(same_winners(&board(&sim, Criterion::MinEosl), &board(&base, Criterion::MaxSimilarity)));
        prop_assert!(same_winners(&board(&power, Criterion::MinEosl), &board(&base, Criterion::MinPower)));
    }

    #[test]
    fn eosl_is_linear_in_weights(seed in 0u64..1000, k in 0.1f64..10.0) {
        let items = SyntheticSpec::random(seed, 3).generate().items;
        let one = score_items(&items, &ScoringContext::default()).unwrap();
        let scaled = score_items(&items, &ScoringContext::default().with_weights(EoslWeights::uniform(k))).unwrap();
        for (a, b) in one.iter().flat_map(|i| &i.rows).zip(scaled.iter().flat_map(|i| &i.rows)) {
            prop_assert!((a.eosl * k - b.eosl).abs() <= 1e-9 * b.eosl.max(1.0));
        }
    }
}
