//! Dung-style abstract argumentation.
//!
//! An [`AbstractFramework`] is a finite set of arguments plus a binary attack
//! relation. Arguments are interned to dense indices on construction so the
//! semantics routines can work on adjacency lists rather than string keys.

mod semantics;
mod stats;

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use semantics::{AcceptanceStatus, Extension, Semantics};
pub use stats::{GraphStats, Scc};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AfError {
    #[error("argument id must not be empty")]
    EmptyId,
    #[error("duplicate argument `{0}`")]
    DuplicateArgument(ArgumentId),
    #[error("unknown argument `{0}`")]
    UnknownArgument(ArgumentId),
}

/// Identifier of an argument, unique within one framework.
///
/// Ordering is "natural": a shared alphabetic prefix is compared first and
/// trailing digits numerically, so `a2 < a10`. Ties fall back to plain string
/// order, keeping `Ord` consistent with `Eq`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ArgumentId(String);

impl ArgumentId {
    pub fn new(value: impl Into<String>) -> Result<Self, AfError> {
        let value = value.into();
        if value.trim().is_empty() {
            return Err(AfError::EmptyId);
        }
        Ok(Self(value))
    }

    /// The `a<n>` form used for extracted arguments.
    pub fn numbered(n: usize) -> Self {
        Self(format!("a{n}"))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ArgumentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for ArgumentId {
    fn from(value: &str) -> Self {
        Self(value.to_owned())
    }
}

fn split_numeric_suffix(s: &str) -> (&str, Option<u128>) {
    let digits = s.bytes().rev().take_while(u8::is_ascii_digit).count();
    if digits == 0 || digits > 38 {
        return (s, None);
    }
    let (head, tail) = s.split_at(s.len() - digits);
    (head, tail.parse().ok())
}

impl Ord for ArgumentId {
    fn cmp(&self, other: &Self) -> Ordering {
        let (ha, na) = split_numeric_suffix(&self.0);
        let (hb, nb) = split_numeric_suffix(&other.0);
        ha.cmp(hb)
            .then_with(|| match (na, nb) {
                (Some(x), Some(y)) => x.cmp(&y),
                (None, Some(_)) => Ordering::Less,
                (Some(_), None) => Ordering::Greater,
                (None, None) => Ordering::Equal,
            })
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for ArgumentId {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A finite argumentation framework `<A, R>`.
///
/// Arguments are kept in canonical (sorted) order; index `i` always refers to
/// the `i`-th argument of [`AbstractFramework::arguments`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbstractFramework {
    ids: Vec<ArgumentId>,
    index: BTreeMap<ArgumentId, usize>,
    attacks: BTreeSet<(usize, usize)>,
    attackers: Vec<Vec<usize>>,
    targets: Vec<Vec<usize>>,
}

impl AbstractFramework {
    /// Builds a framework. Duplicate attack pairs collapse; attack endpoints
    /// must name declared arguments.
    pub fn new<I, J>(arguments: I, attacks: J) -> Result<Self, AfError>
    where
        I: IntoIterator<Item = ArgumentId>,
        J: IntoIterator<Item = (ArgumentId, ArgumentId)>,
    {
        let mut set = BTreeSet::new();
        for id in arguments {
            if id.as_str().trim().is_empty() {
                return Err(AfError::EmptyId);
            }
            if !set.insert(id.clone()) {
                return Err(AfError::DuplicateArgument(id));
            }
        }
        let ids: Vec<ArgumentId> = set.into_iter().collect();
        let index: BTreeMap<ArgumentId, usize> =
            ids.iter().cloned().enumerate().map(|(i, a)| (a, i)).collect();

        let mut pairs = BTreeSet::new();
        for (from, to) in attacks {
            let f = *index.get(&from).ok_or(AfError::UnknownArgument(from))?;
            let t = *index.get(&to).ok_or(AfError::UnknownArgument(to))?;
            pairs.insert((f, t));
        }

        let n = ids.len();
        let mut attackers = vec![Vec::new(); n];
        let mut targets = vec![Vec::new(); n];
        for &(f, t) in &pairs {
            attackers[t].push(f);
            targets[f].push(t);
        }

        Ok(Self {
            ids,
            index,
            attacks: pairs,
            attackers,
            targets,
        })
    }

    /// Convenience constructor over string slices, mainly for tests and fixtures.
    pub fn from_strs(arguments: &[&str], attacks: &[(&str, &str)]) -> Result<Self, AfError> {
        let args = arguments
            .iter()
            .map(|a| ArgumentId::new(*a))
            .collect::<Result<Vec<_>, _>>()?;
        let atts = attacks
            .iter()
            .map(|(a, b)| Ok((ArgumentId::new(*a)?, ArgumentId::new(*b)?)))
            .collect::<Result<Vec<_>, AfError>>()?;
        Self::new(args, atts)
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn arguments(&self) -> &[ArgumentId] {
        &self.ids
    }

    pub fn contains(&self, id: &ArgumentId) -> bool {
        self.index.contains_key(id)
    }

    pub fn attack_count(&self) -> usize {
        self.attacks.len()
    }

    pub fn attacks(&self) -> impl Iterator<Item = (&ArgumentId, &ArgumentId)> + '_ {
        self.attacks
            .iter()
            .map(move |&(f, t)| (&self.ids[f], &self.ids[t]))
    }

    pub fn attacks_pair(&self, attacker: &ArgumentId, target: &ArgumentId) -> bool {
        match (self.index.get(attacker), self.index.get(target)) {
            (Some(&f), Some(&t)) => self.attacks.contains(&(f, t)),
            _ => false,
        }
    }

    pub fn attackers_of(&self, id: &ArgumentId) -> Result<Vec<&ArgumentId>, AfError> {
        let i = self.idx(id)?;
        Ok(self.attackers[i].iter().map(|&j| &self.ids[j]).collect())
    }

    pub fn targets_of(&self, id: &ArgumentId) -> Result<Vec<&ArgumentId>, AfError> {
        let i = self.idx(id)?;
        Ok(self.targets[i].iter().map(|&j| &self.ids[j]).collect())
    }

    pub(crate) fn idx(&self, id: &ArgumentId) -> Result<usize, AfError> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| AfError::UnknownArgument(id.clone()))
    }

    fn mask(&self, set: &BTreeSet<ArgumentId>) -> Result<Vec<bool>, AfError> {
        let mut m = vec![false; self.len()];
        for id in set {
            m[self.idx(id)?] = true;
        }
        Ok(m)
    }

    pub(crate) fn attackers_idx(&self, i: usize) -> &[usize] {
        &self.attackers[i]
    }

    pub(crate) fn targets_idx(&self, i: usize) -> &[usize] {
        &self.targets[i]
    }

    pub(crate) fn id_at(&self, i: usize) -> &ArgumentId {
        &self.ids[i]
    }

    /// True iff no member of `set` attacks a member of `set` (self-attacks included).
    pub fn is_conflict_free(&self, set: &BTreeSet<ArgumentId>) -> Result<bool, AfError> {
        let m = self.mask(set)?;
        Ok(self.conflict_free_mask(&m))
    }

    /// True iff every attacker of `arg` is attacked by some member of `set`.
    pub fn defends(&self, set: &BTreeSet<ArgumentId>, arg: &ArgumentId) -> Result<bool, AfError> {
        let m = self.mask(set)?;
        let a = self.idx(arg)?;
        Ok(self.defends_mask(&m, a))
    }

    /// Conflict-free and defends each of its members.
    pub fn is_admissible(&self, set: &BTreeSet<ArgumentId>) -> Result<bool, AfError> {
        let m = self.mask(set)?;
        Ok(self.conflict_free_mask(&m)
            && (0..self.len()).filter(|&i| m[i]).all(|i| self.defends_mask(&m, i)))
    }

    pub(crate) fn conflict_free_mask(&self, m: &[bool]) -> bool {
        self.attacks.iter().all(|&(f, t)| !(m[f] && m[t]))
    }

    pub(crate) fn defends_mask(&self, m: &[bool], a: usize) -> bool {
        self.attackers[a]
            .iter()
            .all(|&b| self.attackers[b].iter().any(|&c| m[c]))
    }

    pub(crate) fn ids_of_mask(&self, m: &[bool]) -> BTreeSet<ArgumentId> {
        m.iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| self.ids[i].clone())
            .collect()
    }

    /// A copy without the attack `(attacker, target)`.
    pub fn without_attack(&self, attacker: &ArgumentId, target: &ArgumentId) -> Result<Self, AfError> {
        let attacks = self
            .attacks()
            .filter(|(a, t)| !(*a == attacker && *t == target))
            .map(|(a, t)| (a.clone(), t.clone()));
        Self::new(self.ids.iter().cloned(), attacks)
    }
}

#[cfg(test)]
pub(crate) fn running_example() -> AbstractFramework {
    AbstractFramework::from_strs(
        &["a1", "a2", "a3", "a4", "a5", "a6"],
        &[
            ("a2", "a1"),
            ("a3", "a1"),
            ("a3", "a2"),
            ("a4", "a3"),
            ("a5", "a3"),
            ("a5", "a4"),
            ("a6", "a2"),
        ],
    )
    .unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(xs: &[&str]) -> BTreeSet<ArgumentId> {
        xs.iter().map(|x| ArgumentId::from(*x)).collect()
    }

    #[test]
    fn natural_order_of_ids() {
        let mut v: Vec<ArgumentId> = ["a10", "a2", "b1", "a1", "a"].iter().map(|s| (*s).into()).collect();
        v.sort();
        let s: Vec<_> = v.iter().map(|a| a.as_str()).collect();
        assert_eq!(s, ["a", "a1", "a2", "a10", "b1"]);
    }

    #[test]
    fn empty_id_rejected() {
        assert_eq!(ArgumentId::new("  "), Err(AfError::EmptyId));
    }

    #[test]
    fn unknown_endpoint_rejected() {
        let err = AbstractFramework::from_strs(&["a"], &[("a", "b")]).unwrap_err();
        assert_eq!(err, AfError::UnknownArgument("b".into()));
    }

    #[test]
    fn duplicate_attacks_collapse() {
        let af = AbstractFramework::from_strs(&["a", "b"], &[("a", "b"), ("a", "b")]).unwrap();
        assert_eq!(af.attack_count(), 1);
    }

    #[test]
    fn conflict_freeness() {
        let af = running_example();
        assert!(af.is_conflict_free(&BTreeSet::new()).unwrap());
        assert!(af.is_conflict_free(&ids(&["a5", "a6"])).unwrap());
        assert!(!af.is_conflict_free(&ids(&["a1", "a2"])).unwrap());
        let err = af.is_conflict_free(&ids(&["zz"])).unwrap_err();
        assert_eq!(err, AfError::UnknownArgument("zz".into()));
    }

    #[test]
    fn self_attack_is_a_conflict() {
        let af = AbstractFramework::from_strs(&["x"], &[("x", "x")]).unwrap();
        assert!(!af.is_conflict_free(&ids(&["x"])).unwrap());
    }

    #[test]
    fn defense() {
        let af = running_example();
        assert!(af.defends(&BTreeSet::new(), &"a5".into()).unwrap());
        assert!(af.defends(&ids(&["a5", "a6"]), &"a1".into()).unwrap());
        assert!(!af.defends(&ids(&["a5", "a6"]), &"a4".into()).unwrap());
        assert!(af.defends(&ids(&["a5"]), &"nope".into()).is_err());
    }

    #[test]
    fn removing_an_attack() {
        let af = running_example();
        let cut = af.without_attack(&"a6".into(), &"a2".into()).unwrap();
        assert_eq!(cut.attack_count(), 6);
        assert!(!cut.attacks_pair(&"a6".into(), &"a2".into()));
        assert_eq!(af.attack_count(), 7);
    }
}
