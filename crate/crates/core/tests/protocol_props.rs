use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tcla_core::af::ArgumentId;
use tcla_core::protocols::generate::{random_debate, random_game};
use tcla_core::protocols::{debate_traces, ordered_sequences, trace_frameworks, DialogueGame};

fn game(seed: u64) -> DialogueGame {
    random_game(&mut ChaCha8Rng::seed_from_u64(seed), 5)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn ordered_sequences_only_use_earlier_attackers(seed in any::<u64>()) {
        let debate = random_debate(&mut ChaCha8Rng::seed_from_u64(seed), 5);
        let af = &debate.framework;
        for seq in ordered_sequences(&debate).unwrap() {
            for (i, a) in seq.iter().enumerate() {
                let targets = af.attacked_by_argument(a).unwrap();
                prop_assert!(targets.iter().all(|t| seq[..i].contains(t)), "{a} at {i} in {seq:?}");
                if i > 0 {
                    prop_assert!(!targets.is_empty(), "{a} attacks nothing at {i}");
                }
            }
        }
    }

    #[test]
    fn debates_end_with_every_argument(seed in any::<u64>()) {
        let debate = random_debate(&mut ChaCha8Rng::seed_from_u64(seed), 5);
        prop_assert!(!debate_traces(&debate).unwrap().is_empty());
        for seq in trace_frameworks(&debate).unwrap() {
            prop_assert_eq!(seq.last().unwrap().arguments(), &debate.arguments());
        }
    }

    #[test]
    fn legal_moves_are_unplayed(seed in any::<u64>(), cut in 0usize..6) {
        let mut g = game(seed);
        g.history.truncate(cut);
        let played: BTreeSet<ArgumentId> = g.played().into_iter().cloned().collect();
        prop_assert!(g.legal_moves().is_disjoint(&played));
    }

    #[test]
    fn result_framework_is_a_chain(seed in any::<u64>(), cut in 0usize..6) {
        let mut g = game(seed);
        g.history.truncate(cut);
        let result = g.status().result_framework;
        let h = &g.history;
        prop_assert_eq!(result.attacks().len(), h.len().saturating_sub(1));
        for w in h.windows(2) {
            prop_assert!(result.contains_attack(&(w[1].argument.clone(), w[0].argument.clone())));
        }
    }

    #[test]
    fn undo_restores_legal_moves(seed in any::<u64>(), cut in 0usize..6) {
        let mut g = game(seed);
        g.history.truncate(cut);
        let before = g.legal_moves();
        if let Some(m) = before.iter().next().cloned() {
            let player = g.next_player();
            g.apply_move(m, player).unwrap();
            g.pop();
            prop_assert_eq!(g.legal_moves(), before);
        }
    }
}
