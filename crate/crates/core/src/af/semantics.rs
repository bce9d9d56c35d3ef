use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{AfError, ArgumentId, ArgumentationFramework};

/// Upper bound imposed by the bitset representation used during enumeration.
pub const MAX_ENUMERABLE_ARGUMENTS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Semantics {
    Cf,
    Adm,
    Com,
    Stb,
    Sst,
    Prf,
    Gde,
}

impl Semantics {
    pub const ALL: [Semantics; 7] = [
        Semantics::Cf,
        Semantics::Adm,
        Semantics::Com,
        Semantics::Stb,
        Semantics::Sst,
        Semantics::Prf,
        Semantics::Gde,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Semantics::Cf => "cf",
            Semantics::Adm => "adm",
            Semantics::Com => "com",
            Semantics::Stb => "stb",
            Semantics::Sst => "sst",
            Semantics::Prf => "prf",
            Semantics::Gde => "gde",
        }
    }

    /// Whether the semantics may appear in a credulous or sceptical test.
    /// Conflict-freeness is not an acceptance semantics; semi-stable is
    /// accepted unless `strict` is set.
    pub fn is_test_semantics(self, strict: bool) -> bool {
        match self {
            Semantics::Cf => false,
            Semantics::Sst => !strict,
            _ => true,
        }
    }
}

impl fmt::Display for Semantics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Semantics {
    type Err = AfError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Semantics::ALL
            .into_iter()
            .find(|sem| sem.name() == s)
            .ok_or_else(|| AfError::UnknownSemantics(s.to_owned()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    In,
    Out,
    Undec,
}

impl Label {
    pub fn name(self) -> &'static str {
        match self {
            Label::In => "in",
            Label::Out => "out",
            Label::Undec => "undec",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Label {
    type Err = AfError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "in" => Ok(Label::In),
            "out" => Ok(Label::Out),
            "undec" => Ok(Label::Undec),
            _ => Err(AfError::UnknownLabel(s.to_owned())),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AcceptanceMode {
    Credulous,
    Sceptical,
}

/// A set of arguments selected by some semantics.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Extension(pub BTreeSet<ArgumentId>);

impl Extension {
    pub fn of(names: &[&str]) -> Self {
        Extension(names.iter().map(|n| super::arg(n)).collect())
    }

    pub fn members(&self) -> &BTreeSet<ArgumentId> {
        &self.0
    }

    pub fn contains(&self, a: &ArgumentId) -> bool {
        self.0.contains(a)
    }
}

impl fmt::Display for Extension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str("}")
    }
}

/// A total map from the framework's arguments to in/out/undec.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Labelling(pub BTreeMap<ArgumentId, Label>);

impl Labelling {
    pub fn get(&self, a: &ArgumentId) -> Option<Label> {
        self.0.get(a).copied()
    }

    pub fn with_label(&self, label: Label) -> BTreeSet<ArgumentId> {
        self.0
            .iter()
            .filter(|(_, l)| **l == label)
            .map(|(a, _)| a.clone())
            .collect()
    }
}

/// Bitset view of a framework used for enumeration.
struct Indexed<'a> {
    names: Vec<&'a ArgumentId>,
    attackers: Vec<u64>,
    targets: Vec<u64>,
    all: u64,
}

impl<'a> Indexed<'a> {
    fn new(af: &'a ArgumentationFramework) -> Result<Self, AfError> {
        let n = af.len();
        if n > MAX_ENUMERABLE_ARGUMENTS {
            return Err(AfError::TooLarge(n));
        }
        let names: Vec<&ArgumentId> = af.arguments().iter().collect();
        let index: BTreeMap<&ArgumentId, usize> =
            names.iter().enumerate().map(|(i, a)| (*a, i)).collect();
        let mut attackers = vec![0u64; n];
        let mut targets = vec![0u64; n];
        for (from, to) in af.attacks() {
            let (i, j) = (index[from], index[to]);
            targets[i] |= 1 << j;
            attackers[j] |= 1 << i;
        }
        let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        Ok(Self {
            names,
            attackers,
            targets,
            all,
        })
    }

    fn plus(&self, set: u64) -> u64 {
        bits(set).fold(0, |acc, i| acc | self.targets[i])
    }

    fn defended(&self, set: u64) -> u64 {
        let counter = self.plus(set);
        (0..self.names.len())
            .filter(|&i| self.attackers[i] & !counter == 0)
            .fold(0, |acc, i| acc | 1 << i)
    }

    fn conflict_free_sets(&self) -> Vec<u64> {
        let mut out = Vec::new();
        self.extend_cf(0, 0, 0, &mut out);
        out
    }

    fn extend_cf(&self, i: usize, chosen: u64, blocked: u64, out: &mut Vec<u64>) {
        if i == self.names.len() {
            out.push(chosen);
            return;
        }
        self.extend_cf(i + 1, chosen, blocked, out);
        let bit = 1u64 << i;
        let self_attack = self.targets[i] & bit != 0;
        if blocked & bit == 0 && !self_attack {
            let blocked = blocked | self.targets[i] | self.attackers[i];
            self.extend_cf(i + 1, chosen | bit, blocked, out);
        }
    }

    fn to_extension(&self, set: u64) -> Extension {
        Extension(bits(set).map(|i| self.names[i].clone()).collect())
    }
}

fn bits(set: u64) -> impl Iterator<Item = usize> {
    (0..64).filter(move |i| set >> i & 1 == 1)
}

fn is_subset(a: u64, b: u64) -> bool {
    a & !b == 0
}

fn maximal(sets: &[u64], key: impl Fn(u64) -> u64) -> Vec<u64> {
    sets.iter()
        .copied()
        .filter(|&s| {
            !sets
                .iter()
                .any(|&t| key(t) != key(s) && is_subset(key(s), key(t)))
        })
        .collect()
}

/// Enumerates the σ-extensions of `af` by filtering conflict-free subsets.
pub fn extensions(af: &ArgumentationFramework, semantics: Semantics) -> Result<BTreeSet<Extension>, AfError> {
    let ix = Indexed::new(af)?;
    let cf = ix.conflict_free_sets();
    let adm: Vec<u64> = cf
        .iter()
        .copied()
        .filter(|&s| is_subset(s, ix.defended(s)))
        .collect();
    let com = || -> Vec<u64> {
        adm.iter()
            .copied()
            .filter(|&s| ix.defended(s) == s)
            .collect()
    };
    let selected: Vec<u64> = match semantics {
        Semantics::Cf => cf.clone(),
        Semantics::Adm => adm.clone(),
        Semantics::Com => com(),
        Semantics::Stb => cf
            .iter()
            .copied()
            .filter(|&s| s | ix.plus(s) == ix.all)
            .collect(),
        Semantics::Sst => maximal(&com(), |s| s | ix.plus(s)),
        Semantics::Prf => maximal(&adm, |s| s),
        Semantics::Gde => {
            let com = com();
            com.iter()
                .copied()
                .filter(|&s| !com.iter().any(|&t| t != s && is_subset(t, s)))
                .collect()
        }
    };
    Ok(selected.into_iter().map(|s| ix.to_extension(s)).collect())
}

/// Labelling induced by a conflict-free set: members are `in`, the arguments
/// they attack are `out`, everything else is `undec`.
pub fn labelling_of(af: &ArgumentationFramework, extension: &Extension) -> Result<Labelling, AfError> {
    let members = extension.members();
    if !af.is_conflict_free(members)? {
        let (a, b) = af
            .attacks()
            .iter()
            .find(|(a, b)| members.contains(a) && members.contains(b))
            .expect("conflict witness");
        return Err(AfError::NotConflictFree(a.clone(), b.clone()));
    }
    let out = af.attacked_by(members)?;
    Ok(Labelling(
        af.arguments()
            .iter()
            .map(|a| {
                let label = if members.contains(a) {
                    Label::In
                } else if out.contains(a) {
                    Label::Out
                } else {
                    Label::Undec
                };
                (a.clone(), label)
            })
            .collect(),
    ))
}

pub fn is_reinstatement_labelling(af: &ArgumentationFramework, labelling: &Labelling) -> Result<bool, AfError> {
    if let Some(a) = af.arguments().iter().find(|a| labelling.get(a).is_none()) {
        return Err(AfError::PartialLabelling(a.clone()));
    }
    if let Some(a) = labelling.0.keys().find(|a| !af.contains(a)) {
        return Err(AfError::ForeignLabel(a.clone()));
    }
    let label = |a: &ArgumentId| labelling.get(a).expect("total");
    let in_ok = af
        .attacks()
        .iter()
        .all(|(b, a)| label(a) != Label::In || label(b) == Label::Out);
    let out_ok = af.arguments().iter().all(|a| {
        label(a) != Label::Out || af.attackers_of(a).any(|b| label(b) == Label::In)
    });
    Ok(in_ok && out_ok)
}

/// Credulous or sceptical acceptance of `a` with label `label` under `semantics`.
///
/// With no extensions, sceptical acceptance holds vacuously and credulous
/// acceptance fails.
pub fn accepted(
    af: &ArgumentationFramework,
    a: &ArgumentId,
    label: Label,
    semantics: Semantics,
    mode: AcceptanceMode,
) -> Result<bool, AfError> {
    if !af.contains(a) {
        return Err(AfError::UnknownArgument(a.clone()));
    }
    if semantics == Semantics::Cf {
        return Err(AfError::NotATestSemantics(semantics));
    }
    let mut labels = extensions(af, semantics)?
        .into_iter()
        .map(|e| labelling_of(af, &e).map(|l| l.get(a) == Some(label)));
    match mode {
        AcceptanceMode::Credulous => labels.try_fold(false, |acc, hit| Ok(acc || hit?)),
        AcceptanceMode::Sceptical => labels.try_fold(true, |acc, hit| Ok(acc && hit?)),
    }
}
