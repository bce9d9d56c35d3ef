use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{ProtocolError, VerdictStatus};
use crate::af::{ArgumentId, ArgumentationFramework};
use crate::engine::{explore, Terminal, TraceFold};
use crate::syntax::{Agent, ArgSet, AttackSet, Guarded, Program, Timeout};

/// Timeout of the `hold` guard used by the game translation.
pub const HOLD_TIMEOUT: u64 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Player {
    P,
    O,
}

impl Player {
    /// 0 for the proponent, 1 for the opponent.
    pub fn index(self) -> usize {
        match self {
            Player::P => 0,
            Player::O => 1,
        }
    }

    pub fn other(self) -> Player {
        match self {
            Player::P => Player::O,
            Player::O => Player::P,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Player::P => "P",
            Player::O => "O",
        })
    }
}

impl FromStr for Player {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "P" | "p" => Ok(Player::P),
            "O" | "o" => Ok(Player::O),
            other => Err(format!("unknown player {other:?}; expected P or O")),
        }
    }
}

/// A move: an argument and the player who puts it forward. Serialized as
/// `["a", "P"]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "(ArgumentId, Player)", into = "(ArgumentId, Player)")]
pub struct Move {
    pub argument: ArgumentId,
    pub player: Player,
}

impl From<(ArgumentId, Player)> for Move {
    fn from((argument, player): (ArgumentId, Player)) -> Self {
        Move { argument, player }
    }
}

impl From<Move> for (ArgumentId, Player) {
    fn from(m: Move) -> Self {
        (m.argument, m.player)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Error)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RuleViolation {
    #[error("{argument} is not an argument of the framework")]
    UnknownArgument { argument: ArgumentId },
    #[error("rule 1: the first move must be made by P")]
    FirstMoveNotByProponent,
    #[error("rule 2: it is {expected}'s turn")]
    OutOfTurn { expected: Player },
    #[error("rule 3: {argument} has already been played")]
    Repeated { argument: ArgumentId },
    #[error("rule 4: {argument} does not attack the previous move {previous}")]
    DoesNotAttackPrevious { argument: ArgumentId, previous: ArgumentId },
    #[error("rule 4: {argument} also attacks the earlier move {earlier}")]
    AttacksEarlierMove { argument: ArgumentId, earlier: ArgumentId },
    #[error("rule 5: the game has ended")]
    GameEnded,
}

impl RuleViolation {
    /// Number of the broken game rule, if the move breaks one.
    pub fn rule(&self) -> Option<u8> {
        match self {
            RuleViolation::UnknownArgument { .. } => None,
            RuleViolation::FirstMoveNotByProponent => Some(1),
            RuleViolation::OutOfTurn { .. } => Some(2),
            RuleViolation::Repeated { .. } => Some(3),
            RuleViolation::DoesNotAttackPrevious { .. } | RuleViolation::AttacksEarlierMove { .. } => Some(4),
            RuleViolation::GameEnded => Some(5),
        }
    }
}

/// A two-player dialogue game over a fixed framework.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DialogueGame {
    pub framework: ArgumentationFramework,
    #[serde(default)]
    pub history: Vec<Move>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GameStatus {
    /// No unplayed argument attacks the last move.
    pub ended: bool,
    /// Player of the last move of an ended game.
    pub winner: Option<Player>,
    /// Not ended, yet every unplayed attacker of the last move also attacks
    /// an earlier move, so no legal move remains.
    pub blocked: bool,
    pub next_player: Option<Player>,
    pub result_framework: ArgumentationFramework,
}

impl DialogueGame {
    pub fn new(framework: ArgumentationFramework) -> Self {
        DialogueGame {
            framework,
            history: Vec::new(),
        }
    }

    /// Replays `history` move by move from an empty game.
    pub fn replay(framework: ArgumentationFramework, history: &[Move]) -> Result<Self, ProtocolError> {
        let mut game = DialogueGame::new(framework);
        for (index, m) in history.iter().enumerate() {
            game.apply_move(m.argument.clone(), m.player)
                .map_err(|violation| ProtocolError::IllegalMove { index, violation })?;
        }
        Ok(game)
    }

    /// Checks an already populated history against rules 1-4.
    pub fn validated(self) -> Result<Self, ProtocolError> {
        DialogueGame::replay(self.framework, &self.history)
    }

    pub fn played(&self) -> BTreeSet<&ArgumentId> {
        self.history.iter().map(|m| &m.argument).collect()
    }

    pub fn next_player(&self) -> Player {
        match self.history.last() {
            None => Player::P,
            Some(m) => m.player.other(),
        }
    }

    fn attacks(&self, a: &ArgumentId, b: &ArgumentId) -> bool {
        self.framework.contains_attack(&(a.clone(), b.clone()))
    }

    pub fn is_ended(&self) -> bool {
        let Some(last) = self.history.last() else {
            return false;
        };
        let played = self.played();
        !self
            .framework
            .attackers_of(&last.argument)
            .any(|a| !played.contains(a))
    }

    /// Arguments the next player may move. Every argument is legal as the
    /// opening move.
    pub fn legal_moves(&self) -> BTreeSet<ArgumentId> {
        let Some(last) = self.history.last() else {
            return self.framework.arguments().clone();
        };
        let played = self.played();
        let earlier = &self.history[..self.history.len() - 1];
        self.framework
            .attackers_of(&last.argument)
            .filter(|a| !played.contains(a))
            .filter(|a| !earlier.iter().any(|m| self.attacks(a, &m.argument)))
            .cloned()
            .collect()
    }

    fn check_move(&self, argument: &ArgumentId, player: Player) -> Result<(), RuleViolation> {
        if self.is_ended() {
            return Err(RuleViolation::GameEnded);
        }
        if self.history.is_empty() && player != Player::P {
            return Err(RuleViolation::FirstMoveNotByProponent);
        }
        let expected = self.next_player();
        if player != expected {
            return Err(RuleViolation::OutOfTurn { expected });
        }
        if !self.framework.contains(argument) {
            return Err(RuleViolation::UnknownArgument {
                argument: argument.clone(),
            });
        }
        if self.played().contains(argument) {
            return Err(RuleViolation::Repeated {
                argument: argument.clone(),
            });
        }
        if let Some((last, earlier)) = self.history.split_last() {
            if !self.attacks(argument, &last.argument) {
                return Err(RuleViolation::DoesNotAttackPrevious {
                    argument: argument.clone(),
                    previous: last.argument.clone(),
                });
            }
            if let Some(m) = earlier.iter().find(|m| self.attacks(argument, &m.argument)) {
                return Err(RuleViolation::AttacksEarlierMove {
                    argument: argument.clone(),
                    earlier: m.argument.clone(),
                });
            }
        }
        Ok(())
    }

    pub fn apply_move(&mut self, argument: ArgumentId, player: Player) -> Result<(), RuleViolation> {
        self.check_move(&argument, player)?;
        self.history.push(Move { argument, player });
        Ok(())
    }

    /// Undoes the last move.
    pub fn pop(&mut self) -> Option<Move> {
        self.history.pop()
    }

    /// `result(d)`: the played arguments with each move attacking its
    /// predecessor.
    pub fn result_framework(&self) -> ArgumentationFramework {
        let attacks = self
            .history
            .windows(2)
            .map(|w| (w[1].argument.clone(), w[0].argument.clone()));
        ArgumentationFramework::from_parts(self.history.iter().map(|m| m.argument.clone()), attacks)
            .expect("moves are arguments of the result")
    }

    pub fn status(&self) -> GameStatus {
        let ended = self.is_ended();
        GameStatus {
            ended,
            winner: ended.then(|| self.history.last().expect("ended games have moves").player),
            blocked: !ended && !self.history.is_empty() && self.legal_moves().is_empty(),
            next_player: (!ended).then(|| self.next_player()),
            result_framework: self.result_framework(),
        }
    }

    /// Arguments of the moves at even positions (the proponent's).
    pub fn even(&self) -> Vec<ArgumentId> {
        self.history.iter().step_by(2).map(|m| m.argument.clone()).collect()
    }

    /// Arguments of the moves at odd positions (the opponent's).
    pub fn odd(&self) -> Vec<ArgumentId> {
        self.history.iter().skip(1).step_by(2).map(|m| m.argument.clone()).collect()
    }
}

/// Auxiliary arguments that serialize turns and announce the end of a game.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tokens {
    pub turn: [ArgumentId; 2],
    pub finish: [ArgumentId; 2],
}

impl Default for Tokens {
    fn default() -> Self {
        let id = |s: &str| ArgumentId::new(s).expect("token names are identifiers");
        Tokens {
            turn: [id("__turn0"), id("__turn1")],
            finish: [id("__finish0"), id("__finish1")],
        }
    }
}

impl Tokens {
    pub fn contains(&self, a: &ArgumentId) -> bool {
        self.turn.contains(a) || self.finish.contains(a)
    }
}

struct Translator<'a> {
    game: &'a DialogueGame,
    tokens: Tokens,
    hold_timeout: u64,
}

impl Translator<'_> {
    /// `hold(x) -> then`: wait for `x`, then consume it.
    fn hold(&self, x: &ArgumentId, then: Agent) -> Guarded {
        let set = ArgSet::from([x.clone()]);
        Guarded::check(
            Timeout::Finite(self.hold_timeout),
            set.clone(),
            AttackSet::new(),
            Agent::rmv(set, AttackSet::new(), then),
        )
    }

    fn add(&self, args: &[&ArgumentId], attacks: AttackSet, then: Agent) -> Agent {
        Agent::add(args.iter().map(|&a| a.clone()).collect(), attacks, then)
    }

    /// The attack a move adds: against the move it replies to.
    fn reply_attack(&self, position: usize) -> AttackSet {
        let h = &self.game.history;
        match position.checked_sub(1) {
            Some(prev) => AttackSet::from([(h[position].argument.clone(), h[prev].argument.clone())]),
            None => AttackSet::new(),
        }
    }

    /// Continuation of player `i` whose remaining moves sit at `positions`.
    fn continuation(&self, i: usize, positions: &[usize]) -> Agent {
        let t = &self.tokens;
        match positions.split_first() {
            None => Agent::Guarded(Guarded::if_then_else(
                self.hold(&t.finish[1 - i], Agent::Success),
                self.hold(&t.turn[i], self.add(&[&t.finish[i]], AttackSet::new(), Agent::Success)),
            )),
            Some((&p, rest)) => {
                let a = &self.game.history[p].argument;
                let then = self.add(&[a, &t.turn[1 - i]], self.reply_attack(p), self.continuation(i, rest));
                Agent::Guarded(self.hold(&t.turn[i], then))
            }
        }
    }

    fn proponent(&self, positions: &[usize]) -> Agent {
        let (&first, rest) = positions.split_first().expect("non-empty dialogue");
        let a = &self.game.history[first].argument;
        self.add(&[a, &self.tokens.turn[1]], AttackSet::new(), self.continuation(0, rest))
    }

    fn opponent(&self, positions: &[usize]) -> Agent {
        let t = &self.tokens;
        let then = match positions.split_first() {
            None => self.add(&[&t.finish[1]], AttackSet::new(), Agent::Success),
            Some((&p, rest)) => {
                let a = &self.game.history[p].argument;
                self.add(&[a, &t.turn[0]], self.reply_attack(p), self.continuation(1, rest))
            }
        };
        Agent::Guarded(self.hold(&t.turn[1], then))
    }

    fn program(&self) -> Program {
        let n = self.game.history.len();
        if n == 0 {
            return Program::new(Agent::Success);
        }
        let even: Vec<usize> = (0..n).step_by(2).collect();
        let odd: Vec<usize> = (1..n).step_by(2).collect();
        Program::new(Agent::parallel(self.proponent(&even), self.opponent(&odd)))
    }
}

/// Translates a finite, rule-consistent dialogue into a two-agent program.
pub fn translate_game(game: &DialogueGame) -> Result<Program, ProtocolError> {
    translate_game_with(game, HOLD_TIMEOUT)
}

/// As [`translate_game`] with a different `hold` timeout.
pub fn translate_game_with(game: &DialogueGame, hold_timeout: u64) -> Result<Program, ProtocolError> {
    let game = game.clone().validated()?;
    let tokens = Tokens::default();
    if let Some(clash) = game.framework.arguments().iter().find(|a| tokens.contains(a)) {
        return Err(ProtocolError::TokenCollision(clash.clone()));
    }
    Ok(Translator {
        game: &game,
        tokens,
        hold_timeout,
    }
    .program())
}

/// A successful run summarised by its last store and the finish tokens seen
/// along it; other runs by their terminal.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(tag = "terminal", rename_all = "kebab-case")]
pub enum GameRun {
    Success {
        final_store: ArgumentationFramework,
        finish_seen: [bool; 2],
    },
    Other {
        outcome: Terminal,
    },
}

struct GameFold {
    finish: [ArgumentId; 2],
}

impl GameFold {
    fn seen(&self, store: &ArgumentationFramework) -> [bool; 2] {
        [store.contains(&self.finish[0]), store.contains(&self.finish[1])]
    }
}

impl TraceFold for GameFold {
    type Out = GameRun;

    fn end(&self, store: &ArgumentationFramework, terminal: Terminal) -> GameRun {
        match terminal {
            Terminal::Success => GameRun::Success {
                final_store: store.clone(),
                finish_seen: self.seen(store),
            },
            outcome => GameRun::Other { outcome },
        }
    }

    fn cons(&self, store: &ArgumentationFramework, rest: &GameRun) -> GameRun {
        match rest {
            GameRun::Success {
                final_store,
                finish_seen,
            } => {
                let here = self.seen(store);
                GameRun::Success {
                    final_store: final_store.clone(),
                    finish_seen: [finish_seen[0] || here[0], finish_seen[1] || here[1]],
                }
            }
            other => other.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Theorem2Verdict {
    pub status: VerdictStatus,
    pub expected_result: ArgumentationFramework,
    /// Player of the last move.
    pub winner: Option<Player>,
    pub successful_runs: usize,
    pub failed_runs: bool,
    pub bounded_runs: bool,
    /// Successful runs whose final store, with tokens stripped, differs from
    /// the result framework or whose finish tokens contradict the winner.
    pub mismatches: Vec<GameRun>,
    /// Whether every successful run also ends with no token left in the store.
    pub tokens_consumed: bool,
    pub budget_exhausted: bool,
    pub nodes: usize,
}

/// Checks every successful run of the translated game: the final store is
/// `result(d)` and the finish token of the loser's counterpart appears iff
/// that counterpart won.
pub fn check_theorem2(game: &DialogueGame, bound: usize, budget: usize) -> Result<Theorem2Verdict, ProtocolError> {
    let program = translate_game(game)?;
    check_theorem2_for_program(game, &program, bound, budget)
}

/// As [`check_theorem2`] with an arbitrary program standing in for the
/// translation.
pub fn check_theorem2_for_program(
    game: &DialogueGame,
    program: &Program,
    bound: usize,
    budget: usize,
) -> Result<Theorem2Verdict, ProtocolError> {
    let game = game.clone().validated()?;
    let tokens = Tokens::default();
    let expected = game.result_framework();
    let winner = game.history.last().map(|m| m.player);
    let fold = GameFold {
        finish: tokens.finish.clone(),
    };
    let ex = explore(program, &program.main, &ArgumentationFramework::new(), bound, budget, &fold)?;
    let mut successful_runs = 0;
    let (mut failed_runs, mut bounded_runs) = (false, false);
    let mut mismatches = Vec::new();
    let mut tokens_consumed = true;
    for run in &ex.outcomes {
        match run {
            GameRun::Success {
                final_store,
                finish_seen,
            } => {
                successful_runs += 1;
                let stripped = final_store.restrict(|a| !tokens.contains(a));
                tokens_consumed &= stripped == *final_store;
                // P_i wins iff finish_{i+1 mod 2} shows up.
                let finish_ok = match winner {
                    Some(w) => (0..2).all(|i| finish_seen[(i + 1) % 2] == (w.index() == i)),
                    None => !finish_seen[0] && !finish_seen[1],
                };
                if stripped != expected || !finish_ok {
                    mismatches.push(run.clone());
                }
            }
            GameRun::Other { outcome } => match outcome {
                Terminal::Failure => failed_runs = true,
                _ => bounded_runs = true,
            },
        }
    }
    let status = if ex.budget_exhausted {
        VerdictStatus::Inconclusive
    } else if successful_runs == 0 {
        VerdictStatus::NoSuccessfulRun
    } else if mismatches.is_empty() {
        VerdictStatus::Holds
    } else {
        VerdictStatus::Mismatch
    };
    Ok(Theorem2Verdict {
        status,
        expected_result: expected,
        winner,
        successful_runs,
        failed_runs,
        bounded_runs,
        mismatches,
        tokens_consumed,
        budget_exhausted: ex.budget_exhausted,
        nodes: ex.nodes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::af::{arg, examples};
    use crate::engine::DEFAULT_NODE_BUDGET;
    use crate::syntax::{parse_program, pretty_print};

    fn example7() -> DialogueGame {
        crate::presets::vaccine_game()
    }

    #[test]
    fn opening_moves() {
        let mut g = DialogueGame::new(examples::vaccine_framework());
        assert_eq!(g.legal_moves().len(), 6);
        assert_eq!(g.apply_move(arg("a"), Player::O).unwrap_err().rule(), Some(1));
        g.apply_move(arg("a"), Player::P).unwrap();
        assert_eq!(g.apply_move(arg("b"), Player::P).unwrap_err().rule(), Some(2));
        g.apply_move(arg("b"), Player::O).unwrap();
        assert_eq!(g.legal_moves(), BTreeSet::from([arg("c")]));
        assert_eq!(g.apply_move(arg("a"), Player::P).unwrap_err().rule(), Some(3));
        assert_eq!(g.apply_move(arg("d"), Player::P).unwrap_err().rule(), Some(4));
    }

    #[test]
    fn example7_status() {
        let g = example7();
        let s = g.status();
        assert!(s.ended);
        assert_eq!(s.winner, Some(Player::O));
        assert!(g.legal_moves().is_empty());
        assert_eq!(
            s.result_framework,
            ArgumentationFramework::build(
                &["a", "b", "c", "d", "e", "f"],
                &[("b", "a"), ("c", "b"), ("d", "c"), ("e", "d"), ("f", "e")]
            )
        );
        let mut g2 = g.clone();
        assert_eq!(g2.apply_move(arg("a"), Player::P).unwrap_err().rule(), Some(5));
        assert_eq!(g.even(), vec![arg("a"), arg("c"), arg("e")]);
        assert_eq!(g.odd(), vec![arg("b"), arg("d"), arg("f")]);
    }

    #[test]
    fn two_cycle_ends_after_reply() {
        let f = ArgumentationFramework::build(&["a", "b"], &[("a", "b"), ("b", "a")]);
        let g = DialogueGame::replay(f, &[(arg("a"), Player::P).into(), (arg("b"), Player::O).into()]).unwrap();
        assert!(g.status().ended);
        assert_eq!(g.status().winner, Some(Player::O));
        assert!(!DialogueGame::new(examples::vaccine_framework()).status().ended);
    }

    #[test]
    fn pop_restores_legal_moves() {
        let mut g = example7();
        g.pop();
        let before = g.legal_moves();
        g.apply_move(arg("f"), Player::O).unwrap();
        g.pop();
        assert_eq!(g.legal_moves(), before);
    }

    #[test]
    fn history_json() {
        let g = example7();
        let v = serde_json::to_value(&g).unwrap();
        assert_eq!(v["history"][1], serde_json::json!(["b", "O"]));
        let back: DialogueGame = serde_json::from_value(v).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn example9_expansion() {
        let p = translate_game(&example7()).unwrap();
        let text = pretty_print(&p);
        let expected = "\
add({__turn1,a},{}) -> check(4,{__turn0},{}) -> rmv({__turn0},{}) -> add({__turn1,c},{(c,b)}) -> \
check(4,{__turn0},{}) -> rmv({__turn0},{}) -> add({__turn1,e},{(e,d)}) -> \
(check(4,{__finish1},{}) -> rmv({__finish1},{}) -> success)+P(check(4,{__turn0},{}) -> rmv({__turn0},{}) -> add({__finish0},{}) -> success) \
|| check(4,{__turn1},{}) -> rmv({__turn1},{}) -> add({__turn0,b},{(b,a)}) -> \
check(4,{__turn1},{}) -> rmv({__turn1},{}) -> add({__turn0,d},{(d,c)}) -> \
check(4,{__turn1},{}) -> rmv({__turn1},{}) -> add({__turn0,f},{(f,e)}) -> \
(check(4,{__finish0},{}) -> rmv({__finish0},{}) -> success)+P(check(4,{__turn1},{}) -> rmv({__turn1},{}) -> add({__finish1},{}) -> success);";
        assert_eq!(parse_program(expected).unwrap(), p, "{text}");
    }

    #[test]
    fn single_move_translation() {
        let g = DialogueGame::replay(examples::vaccine_framework(), &[(arg("a"), Player::P).into()]).unwrap();
        let p = translate_game(&g).unwrap();
        let expected = "add({__turn1,a},{}) -> \
(check(4,{__finish1},{}) -> rmv({__finish1},{}) -> success)+P(check(4,{__turn0},{}) -> rmv({__turn0},{}) -> add({__finish0},{}) -> success) \
|| check(4,{__turn1},{}) -> rmv({__turn1},{}) -> add({__finish1},{}) -> success;";
        assert_eq!(parse_program(expected).unwrap(), p);
        let v = check_theorem2(&g, 40, DEFAULT_NODE_BUDGET).unwrap();
        assert_eq!(v.status, VerdictStatus::Holds, "{v:?}");
        assert_eq!(v.winner, Some(Player::P));
    }

    #[test]
    fn empty_dialogue_is_success() {
        let g = DialogueGame::new(examples::vaccine_framework());
        assert_eq!(translate_game(&g).unwrap().main, Agent::Success);
    }

    #[test]
    fn token_collision_rejected() {
        let f = ArgumentationFramework::build(&["a", "__turn0"], &[]);
        let g = DialogueGame::replay(f, &[(arg("a"), Player::P).into()]).unwrap();
        assert!(matches!(translate_game(&g), Err(ProtocolError::TokenCollision(_))));
    }

    #[test]
    fn example7_theorem2() {
        let v = check_theorem2(&example7(), 60, DEFAULT_NODE_BUDGET).unwrap();
        assert_eq!(v.status, VerdictStatus::Holds, "{v:?}");
        assert_eq!(v.winner, Some(Player::O));
        assert!(v.successful_runs > 0);
    }

    #[test]
    fn short_hold_is_distinguished() {
        let g = example7();
        let p = translate_game_with(&g, 1).unwrap();
        let v = check_theorem2_for_program(&g, &p, 60, DEFAULT_NODE_BUDGET).unwrap();
        assert_ne!(v.status, VerdictStatus::Mismatch);
        assert!(v.failed_runs);
    }
}
