//! Random valid debates and complete dialogue games, used by the property
//! checks and the command-line tools.

use indexmap::IndexMap;
use rand::seq::SliceRandom;
use rand::Rng;

use super::{Debate, DialogueGame, Player};
use crate::af::{ArgumentId, ArgumentationFramework};

fn names(n: usize) -> Vec<ArgumentId> {
    (0..n)
        .map(|i| ArgumentId::new(&format!("x{i}")).expect("generated names are identifiers"))
        .collect()
}

/// A valid debate over at most `max_args` arguments. The framework is built
/// along a hidden ordering in which every later argument attacks at least one
/// earlier one; arguments are then dealt to agents avoiding internal
/// conflicts.
pub fn random_debate<R: Rng>(rng: &mut R, max_args: usize) -> Debate {
    let n = rng.gen_range(1..=max_args.max(1));
    let mut order = names(n);
    order.shuffle(rng);
    let mut attacks = Vec::new();
    for i in 1..n {
        let k = rng.gen_range(1..=i.min(2));
        for &j in rand::seq::index::sample(rng, i, k).iter().collect::<Vec<_>>().iter() {
            attacks.push((order[i].clone(), order[j].clone()));
        }
    }
    let framework = ArgumentationFramework::from_parts(order.iter().cloned(), attacks).expect("endpoints exist");
    let conflict = |a: &ArgumentId, b: &ArgumentId| {
        framework.contains_attack(&(a.clone(), b.clone())) || framework.contains_attack(&(b.clone(), a.clone()))
    };
    let mut groups: Vec<Vec<ArgumentId>> = Vec::new();
    let mut pool = order.clone();
    pool.shuffle(rng);
    for a in pool {
        let fits: Vec<usize> = (0..groups.len())
            .filter(|&g| groups[g].iter().all(|b| !conflict(&a, b)))
            .collect();
        match fits.choose(rng) {
            Some(&g) if rng.gen_bool(0.7) => groups[g].push(a),
            _ => groups.push(vec![a]),
        }
    }
    let agents: IndexMap<String, Vec<ArgumentId>> = groups
        .into_iter()
        .enumerate()
        .map(|(i, g)| (format!("Ag{i}"), g))
        .collect();
    Debate { framework, agents }
}

/// A random framework over at most `max_args` arguments, each attack present
/// with probability `density`.
pub fn random_framework<R: Rng>(rng: &mut R, max_args: usize, density: f64) -> ArgumentationFramework {
    let n = rng.gen_range(1..=max_args.max(1));
    let args = names(n);
    let mut attacks = Vec::new();
    for a in &args {
        for b in &args {
            if rng.gen_bool(density) {
                attacks.push((a.clone(), b.clone()));
            }
        }
    }
    ArgumentationFramework::from_parts(args, attacks).expect("endpoints exist")
}

/// A game played with uniformly random legal moves until it ends. Frameworks
/// on which play gets blocked before ending are redrawn.
pub fn random_game<R: Rng>(rng: &mut R, max_args: usize) -> DialogueGame {
    loop {
        let framework = random_framework(rng, max_args, 0.35);
        let mut game = DialogueGame::new(framework);
        let mut player = Player::P;
        loop {
            let legal: Vec<ArgumentId> = game.legal_moves().into_iter().collect();
            let Some(a) = legal.choose(rng) else { break };
            game.apply_move(a.clone(), player).expect("legal move");
            player = player.other();
        }
        if game.is_ended() {
            return game;
        }
    }
}
