//! Ready-made programs and protocol instances used by the tools, the demo
//! page and the test suites.

use crate::af::{arg, examples};
use crate::protocols::{Debate, DialogueGame, Player};

/// The fertiliser debate written directly as three parallel agents.
pub const TABLE4: &str = "\
add({a},{}) -> gpar(check(9,{c,d},{}) -> add({e},{(e,c),(e,d)}) -> success, check(9,{b},{}) -> add({g},{(g,b)}) -> success)
|| check(9,{a},{}) -> add({b},{(b,a)}) -> success
|| gpar(check(9,{a},{}) -> add({c,d},{(c,a),(d,a)}) -> success, check(9,{a},{}) -> add({f},{(f,a)}) -> success);
";

/// Three independent additions.
pub const EXAMPLE6: &str = "add({a},{}) -> success || add({b},{}) -> success || add({c},{}) -> success;\n";

/// Alice, Bob and Carol over [`examples::debate_framework`].
pub fn fertiliser_debate() -> Debate {
    Debate::new(examples::debate_framework())
        .with_agent("Alice", &["a", "e", "g"])
        .with_agent("Bob", &["b"])
        .with_agent("Carol", &["c", "d", "f"])
}

/// The vaccine dialogue a, b, .., f, alternating from the proponent.
pub fn vaccine_game() -> DialogueGame {
    let mut g = DialogueGame::new(examples::vaccine_framework());
    for (i, a) in ["a", "b", "c", "d", "e", "f"].iter().enumerate() {
        let p = if i % 2 == 0 { Player::P } else { Player::O };
        g.apply_move(arg(a), p).expect("vaccine dialogue is legal");
    }
    g
}
