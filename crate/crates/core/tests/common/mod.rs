//! Strategies shared by the property tests.
#![allow(dead_code)]

use proptest::prelude::*;

use tcla_core::af::{arg, AcceptanceMode, ArgumentId, ArgumentationFramework, Label, Semantics};
use tcla_core::syntax::{Agent, ArgSet, AttackSet, Guarded, Term, Timeout};

pub const NAMES: [&str; 4] = ["a", "b", "c", "d"];

pub fn argument() -> impl Strategy<Value = ArgumentId> {
    prop::sample::select(NAMES.to_vec()).prop_map(arg)
}

pub fn arg_set() -> impl Strategy<Value = ArgSet> {
    prop::collection::btree_set(argument(), 0..3)
}

pub fn attack_set() -> impl Strategy<Value = AttackSet> {
    prop::collection::btree_set((argument(), argument()), 0..2)
}

#[derive(Clone, Copy, Debug)]
pub struct Shape {
    pub max_timeout: u64,
    pub infinite: bool,
    pub tests: bool,
    pub exists: bool,
}

impl Shape {
    /// Everything the grammar allows, for syntax tests.
    pub const SYNTAX: Shape = Shape {
        max_timeout: 20,
        infinite: true,
        tests: true,
        exists: true,
    };
    /// Small timeouts so that exhaustive exploration stays cheap.
    pub const ENGINE: Shape = Shape {
        max_timeout: 2,
        infinite: false,
        tests: true,
        exists: false,
    };
}

fn timeout(shape: Shape) -> BoxedStrategy<Timeout> {
    let finite = (0..=shape.max_timeout).prop_map(Timeout::Finite);
    if shape.infinite {
        prop_oneof![4 => finite, 1 => Just(Timeout::Infinite)].boxed()
    } else {
        finite.boxed()
    }
}

fn semantics() -> impl Strategy<Value = Semantics> {
    prop::sample::select(vec![Semantics::Adm, Semantics::Com, Semantics::Stb, Semantics::Prf, Semantics::Gde])
}

fn label() -> impl Strategy<Value = Label> {
    prop::sample::select(vec![Label::In, Label::Out, Label::Undec])
}

fn base_guard(shape: Shape, then: BoxedStrategy<Agent>) -> BoxedStrategy<Guarded> {
    let check = (timeout(shape), arg_set(), attack_set(), then.clone())
        .prop_map(|(t, args, atts, then)| Guarded::check(t, args, atts, then));
    if !shape.tests {
        return check.boxed();
    }
    let test = (any::<bool>(), timeout(shape), argument(), label(), semantics(), then).prop_map(
        |(sceptical, t, argument, label, semantics, then)| Guarded::Test {
            mode: if sceptical {
                AcceptanceMode::Sceptical
            } else {
                AcceptanceMode::Credulous
            },
            timeout: Term::Value(t),
            argument,
            label: Term::Value(label),
            semantics: Term::Value(semantics),
            then: then.into(),
        },
    );
    prop_oneof![2 => check, 1 => test].boxed()
}

/// Guarded agents and agents of nesting depth at most `depth`.
pub fn strategies(depth: u32, shape: Shape) -> (BoxedStrategy<Guarded>, BoxedStrategy<Agent>) {
    let leaf = prop_oneof![6 => Just(Agent::Success), 1 => Just(Agent::Failure)].boxed();
    let mut agent = leaf.clone();
    let mut guard = base_guard(shape, leaf.clone());
    for _ in 0..depth {
        let sub = agent.clone();
        let g = guard.clone();
        let next_guard = prop_oneof![
            3 => base_guard(shape, sub.clone()),
            1 => (g.clone(), g.clone()).prop_map(|(l, r)| Guarded::sum(l, r)),
            1 => (g.clone(), g.clone()).prop_map(|(l, r)| Guarded::if_then_else(l, r)),
            1 => (g.clone(), g.clone()).prop_map(|(l, r)| Guarded::guarded_parallel(l, r)),
        ]
        .boxed();
        let mut options: Vec<(u32, BoxedStrategy<Agent>)> = vec![
            (1, leaf.clone()),
            (2, (arg_set(), attack_set(), sub.clone()).prop_map(|(a, r, t)| Agent::add(a, r, t)).boxed()),
            (1, (arg_set(), attack_set(), sub.clone()).prop_map(|(a, r, t)| Agent::rmv(a, r, t)).boxed()),
            (3, g.prop_map(Agent::Guarded).boxed()),
            (2, (sub.clone(), sub.clone()).prop_map(|(l, r)| Agent::parallel(l, r)).boxed()),
        ];
        if shape.exists {
            options.push((
                1,
                (prop::sample::select(vec!["x", "y"]), sub.clone())
                    .prop_map(|(v, body)| Agent::Exists {
                        var: arg(v),
                        body: body.into(),
                    })
                    .boxed(),
            ));
        }
        agent = prop::strategy::Union::new_weighted(options).boxed();
        guard = next_guard;
    }
    (guard, agent)
}

pub fn agent(depth: u32, shape: Shape) -> BoxedStrategy<Agent> {
    strategies(depth, shape).1
}

pub fn guarded(depth: u32, shape: Shape) -> BoxedStrategy<Guarded> {
    strategies(depth, shape).0
}

/// Frameworks over the first `n` of a fixed set of names, any attack set.
pub fn framework(max_args: usize) -> impl Strategy<Value = ArgumentationFramework> {
    (1..=max_args).prop_flat_map(|n| {
        let names: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
        prop::collection::vec(any::<bool>(), n * n).prop_map(move |bits| {
            let mut af = ArgumentationFramework::new();
            for name in &names {
                af.add_argument(arg(name));
            }
            for (k, on) in bits.iter().enumerate() {
                if *on {
                    af.add_attack(arg(&names[k / n]), arg(&names[k % n])).unwrap();
                }
            }
            af
        })
    })
}
