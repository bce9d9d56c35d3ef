use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::AfError;

/// Name of an argument.
///
/// User-visible identifiers are non-empty tokens over `[A-Za-z0-9_]`. The
/// interpreter also mints identifiers with a `#` prefix for hidden variables;
/// those can never be written in a program, so they never collide with user
/// names.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ArgumentId(Arc<str>);

impl ArgumentId {
    pub fn new(name: &str) -> Result<Self, AfError> {
        if is_identifier(name) {
            Ok(Self(Arc::from(name)))
        } else {
            Err(AfError::InvalidName(name.to_owned()))
        }
    }

    /// Reserved identifier that no source program can spell.
    pub(crate) fn reserved(name: String) -> Self {
        debug_assert!(name.starts_with('#'));
        Self(Arc::from(name))
    }

    /// Accepts both source identifiers and interpreter-minted `#` names.
    pub(crate) fn from_token(name: &str) -> Result<Self, AfError> {
        if name.len() > 1 && name.starts_with('#') && is_identifier(&name[1..]) {
            Ok(Self(Arc::from(name)))
        } else {
            Self::new(name)
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn is_reserved(&self) -> bool {
        self.0.starts_with('#')
    }
}

pub fn is_identifier(name: &str) -> bool {
    !name.is_empty() && name.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_')
}

impl fmt::Display for ArgumentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for ArgumentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

impl Serialize for ArgumentId {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for ArgumentId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let name = String::deserialize(deserializer)?;
        ArgumentId::new(&name).map_err(serde::de::Error::custom)
    }
}

pub type Attack = (ArgumentId, ArgumentId);

/// Shorthand used throughout tests and examples.
///
/// Panics on an invalid name.
pub fn arg(name: &str) -> ArgumentId {
    ArgumentId::new(name).expect("valid argument identifier")
}

/// An abstract argumentation framework `<Arg, R>`.
///
/// Every attack endpoint is a member of `arguments`; self-attacks are allowed.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ArgumentationFramework {
    arguments: BTreeSet<ArgumentId>,
    attacks: BTreeSet<Attack>,
}

#[derive(Deserialize)]
struct RawFramework {
    #[serde(default)]
    arguments: BTreeSet<ArgumentId>,
    #[serde(default)]
    attacks: BTreeSet<Attack>,
}

impl<'de> Deserialize<'de> for ArgumentationFramework {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = RawFramework::deserialize(deserializer)?;
        ArgumentationFramework::from_parts(raw.arguments, raw.attacks)
            .map_err(serde::de::Error::custom)
    }
}

impl ArgumentationFramework {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_parts(
        arguments: impl IntoIterator<Item = ArgumentId>,
        attacks: impl IntoIterator<Item = Attack>,
    ) -> Result<Self, AfError> {
        let mut af = Self {
            arguments: arguments.into_iter().collect(),
            attacks: BTreeSet::new(),
        };
        for (from, to) in attacks {
            af.add_attack(from, to)?;
        }
        Ok(af)
    }

    /// Builds a framework from string names. Panics on invalid input; meant for
    /// literals in tests and examples.
    pub fn build(arguments: &[&str], attacks: &[(&str, &str)]) -> Self {
        Self::from_parts(
            arguments.iter().map(|a| arg(a)),
            attacks.iter().map(|(a, b)| (arg(a), arg(b))),
        )
        .expect("well-formed framework literal")
    }

    pub fn arguments(&self) -> &BTreeSet<ArgumentId> {
        &self.arguments
    }

    pub fn attacks(&self) -> &BTreeSet<Attack> {
        &self.attacks
    }

    pub fn len(&self) -> usize {
        self.arguments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arguments.is_empty() && self.attacks.is_empty()
    }

    pub fn contains(&self, a: &ArgumentId) -> bool {
        self.arguments.contains(a)
    }

    pub fn contains_attack(&self, attack: &Attack) -> bool {
        self.attacks.contains(attack)
    }

    pub fn add_argument(&mut self, a: ArgumentId) -> bool {
        self.arguments.insert(a)
    }

    pub fn add_attack(&mut self, from: ArgumentId, to: ArgumentId) -> Result<bool, AfError> {
        for endpoint in [&from, &to] {
            if !self.arguments.contains(endpoint) {
                return Err(AfError::DanglingAttack {
                    from: from.clone(),
                    to: to.clone(),
                    missing: endpoint.clone(),
                });
            }
        }
        Ok(self.attacks.insert((from, to)))
    }

    /// Removes an argument together with every attack incident to it.
    pub fn remove_argument(&mut self, a: &ArgumentId) -> bool {
        if !self.arguments.remove(a) {
            return false;
        }
        self.attacks.retain(|(x, y)| x != a && y != a);
        true
    }

    pub fn remove_attack(&mut self, attack: &Attack) -> bool {
        self.attacks.remove(attack)
    }

    /// Restriction of the framework to the arguments satisfying `keep`.
    pub fn restrict(&self, keep: impl Fn(&ArgumentId) -> bool) -> Self {
        Self {
            arguments: self.arguments.iter().filter(|a| keep(a)).cloned().collect(),
            attacks: self
                .attacks
                .iter()
                .filter(|(a, b)| keep(a) && keep(b))
                .cloned()
                .collect(),
        }
    }

    fn require(&self, a: &ArgumentId) -> Result<(), AfError> {
        if self.contains(a) {
            Ok(())
        } else {
            Err(AfError::UnknownArgument(a.clone()))
        }
    }

    fn require_all<'a>(&self, set: impl IntoIterator<Item = &'a ArgumentId>) -> Result<(), AfError> {
        set.into_iter().try_for_each(|a| self.require(a))
    }

    /// Arguments attacking `a`.
    pub fn attackers_of<'a>(&'a self, a: &'a ArgumentId) -> impl Iterator<Item = &'a ArgumentId> + 'a {
        self.attacks.iter().filter(move |(_, to)| to == a).map(|(from, _)| from)
    }

    /// `a+`: the arguments attacked by `a`.
    pub fn attacked_by_argument(&self, a: &ArgumentId) -> Result<BTreeSet<ArgumentId>, AfError> {
        self.require(a)?;
        Ok(self
            .attacks
            .iter()
            .filter(|(from, _)| from == a)
            .map(|(_, to)| to.clone())
            .collect())
    }

    /// `S+`: the union of `a+` over `a` in `set`.
    pub fn attacked_by(&self, set: &BTreeSet<ArgumentId>) -> Result<BTreeSet<ArgumentId>, AfError> {
        self.require_all(set)?;
        Ok(self
            .attacks
            .iter()
            .filter(|(from, _)| set.contains(from))
            .map(|(_, to)| to.clone())
            .collect())
    }

    /// `R|a`: the attacks whose source is `a`.
    pub fn outgoing_attacks(&self, a: &ArgumentId) -> Result<BTreeSet<Attack>, AfError> {
        self.require(a)?;
        Ok(self.attacks.iter().filter(|(from, _)| from == a).cloned().collect())
    }

    pub fn is_conflict_free(&self, set: &BTreeSet<ArgumentId>) -> Result<bool, AfError> {
        self.require_all(set)?;
        Ok(!self
            .attacks
            .iter()
            .any(|(a, b)| set.contains(a) && set.contains(b)))
    }

    /// Whether every attacker of `target` is attacked by some member of `defenders`.
    pub fn defends(&self, defenders: &BTreeSet<ArgumentId>, target: &ArgumentId) -> Result<bool, AfError> {
        self.require_all(defenders)?;
        self.require(target)?;
        let counter = self.attacked_by(defenders)?;
        Ok(self.attackers_of(target).all(|b| counter.contains(b)))
    }
}

impl fmt::Display for ArgumentationFramework {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("<{")?;
        for (i, a) in self.arguments.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str("}, {")?;
        for (i, (a, b)) in self.attacks.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "({a},{b})")?;
        }
        f.write_str("}>")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::af::examples::figure1;

    fn set(names: &[&str]) -> BTreeSet<ArgumentId> {
        names.iter().map(|n| arg(n)).collect()
    }

    #[test]
    fn identifiers() {
        assert!(ArgumentId::new("a_1").is_ok());
        assert!(ArgumentId::new("").is_err());
        assert!(ArgumentId::new("a-b").is_err());
        assert!(ArgumentId::new("#v0").is_err());
        assert_eq!(arg("a"), arg("a"));
        assert_ne!(arg("a"), arg("A"));
    }

    #[test]
    fn dangling_attack_rejected() {
        let err = ArgumentationFramework::from_parts([arg("a")], [(arg("a"), arg("b"))]).unwrap_err();
        assert!(matches!(err, AfError::DanglingAttack { .. }));
    }

    #[test]
    fn attacked_by_examples() {
        let f = figure1();
        assert_eq!(f.attacked_by(&set(&["a"])).unwrap(), set(&["b"]));
        assert_eq!(f.attacked_by(&set(&[])).unwrap(), set(&[]));
        assert_eq!(f.attacked_by(&set(&["a", "d"])).unwrap(), set(&["b", "c", "e"]));
        assert!(matches!(
            f.attacked_by(&set(&["z"])),
            Err(AfError::UnknownArgument(_))
        ));
    }

    #[test]
    fn outgoing_attack_examples() {
        let f = figure1();
        assert_eq!(
            f.outgoing_attacks(&arg("e")).unwrap(),
            [(arg("e"), arg("e"))].into_iter().collect()
        );
        let isolated = ArgumentationFramework::build(&["x"], &[]);
        assert!(isolated.outgoing_attacks(&arg("x")).unwrap().is_empty());
        assert!(f.outgoing_attacks(&arg("zz")).is_err());
    }

    #[test]
    fn conflict_freeness() {
        let f = figure1();
        assert!(f.is_conflict_free(&set(&["a", "d"])).unwrap());
        assert!(!f.is_conflict_free(&set(&["e"])).unwrap());
        assert!(f.is_conflict_free(&set(&[])).unwrap());
        assert!(f.is_conflict_free(&set(&["q"])).is_err());
    }

    #[test]
    fn defence() {
        let f = figure1();
        // c is attacked by d; a does not attack d.
        assert!(!f.defends(&set(&["a"]), &arg("c")).unwrap());
        assert!(f.defends(&set(&["a", "c"]), &arg("c")).unwrap());
        // a is unattacked.
        assert!(f.defends(&set(&[]), &arg("a")).unwrap());
    }

    #[test]
    fn remove_argument_drops_incident_attacks() {
        let mut f = figure1();
        f.remove_argument(&arg("d"));
        assert!(f.attacks().iter().all(|(x, y)| x.as_str() != "d" && y.as_str() != "d"));
        assert!(f.contains_attack(&(arg("a"), arg("b"))));
    }
}
