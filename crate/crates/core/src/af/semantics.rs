use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::{AbstractFramework, AfError, ArgumentId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Semantics {
    Grounded,
    Preferred,
}

impl std::fmt::Display for Semantics {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Semantics::Grounded => "grounded",
            Semantics::Preferred => "preferred",
        })
    }
}

impl std::str::FromStr for Semantics {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "grounded" => Ok(Semantics::Grounded),
            "preferred" => Ok(Semantics::Preferred),
            other => Err(format!("unknown semantics `{other}`")),
        }
    }
}

/// An accepted set of arguments together with the semantics that produced it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Extension {
    pub semantics: Semantics,
    pub members: BTreeSet<ArgumentId>,
}

impl Extension {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, id: &ArgumentId) -> bool {
        self.members.contains(id)
    }

    /// Members in canonical order.
    pub fn sorted_members(&self) -> Vec<ArgumentId> {
        self.members.iter().cloned().collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AcceptanceStatus {
    pub skeptically_accepted: bool,
    pub credulously_accepted: bool,
    pub in_grounded: bool,
}

impl AbstractFramework {
    /// Least fixed point of the characteristic function.
    ///
    /// Runs the usual counter-based propagation: an argument enters once all
    /// of its attackers are defeated, and everything an accepted argument
    /// attacks is defeated. This is equivalent to iterating
    /// `S -> {a | S defends a}` from the empty set.
    pub fn grounded_extension(&self) -> Extension {
        let members = self.ids_of_mask(&self.grounded_mask().0);
        Extension {
            semantics: Semantics::Grounded,
            members,
        }
    }

    /// Returns `(in, out)` masks of the grounded labelling.
    pub(crate) fn grounded_mask(&self) -> (Vec<bool>, Vec<bool>) {
        let n = self.len();
        let mut live_attackers: Vec<usize> = (0..n).map(|i| self.attackers_idx(i).len()).collect();
        let mut inside = vec![false; n];
        let mut out = vec![false; n];
        let mut queue: VecDeque<usize> = (0..n).filter(|&i| live_attackers[i] == 0).collect();
        for &i in &queue {
            inside[i] = true;
        }
        while let Some(x) = queue.pop_front() {
            for &t in self.targets_idx(x) {
                if out[t] {
                    continue;
                }
                out[t] = true;
                for &u in self.targets_idx(t) {
                    live_attackers[u] -= 1;
                    if live_attackers[u] == 0 && !inside[u] && !out[u] {
                        inside[u] = true;
                        queue.push_back(u);
                    }
                }
            }
        }
        (inside, out)
    }

    /// All subset-maximal admissible sets, canonically ordered.
    ///
    /// The search fixes the grounded labelling first (grounded members are in
    /// every preferred extension, their targets in none), then walks the
    /// remaining arguments include-first. Include-first order visits every
    /// admissible superset of a set before the set itself, so a candidate is
    /// maximal exactly when it is not contained in an extension already found.
    pub fn preferred_extensions(&self) -> Vec<Extension> {
        let n = self.len();
        let (g_in, g_out) = self.grounded_mask();
        let undecided: Vec<usize> = (0..n)
            .filter(|&i| !g_in[i] && !g_out[i])
            .collect();

        let mut search = PreferredSearch {
            af: self,
            order: undecided,
            included: g_in.clone(),
            excluded: g_out,
            found: Vec::new(),
        };
        search.descend(0);

        let mut exts: Vec<Vec<ArgumentId>> = search
            .found
            .iter()
            .map(|m| self.ids_of_mask(m).into_iter().collect())
            .collect();
        exts.sort();
        exts.into_iter()
            .map(|members| Extension {
                semantics: Semantics::Preferred,
                members: members.into_iter().collect(),
            })
            .collect()
    }

    pub fn acceptance_status(&self, arg: &ArgumentId) -> Result<AcceptanceStatus, AfError> {
        self.idx(arg)?;
        let preferred = self.preferred_extensions();
        Ok(AcceptanceStatus {
            skeptically_accepted: preferred.iter().all(|e| e.contains(arg)),
            credulously_accepted: preferred.iter().any(|e| e.contains(arg)),
            in_grounded: self.grounded_extension().contains(arg),
        })
    }
}

struct PreferredSearch<'a> {
    af: &'a AbstractFramework,
    order: Vec<usize>,
    included: Vec<bool>,
    excluded: Vec<bool>,
    found: Vec<Vec<bool>>,
}

impl PreferredSearch<'_> {
    fn descend(&mut self, depth: usize) {
        if !self.may_still_defend() || self.dominated_bound() {
            return;
        }
        if depth == self.order.len() {
            if self.is_admissible_leaf() && !self.subsumed(&self.included) {
                self.found.push(self.included.clone());
            }
            return;
        }
        let a = self.order[depth];
        if self.can_include(a) {
            self.included[a] = true;
            self.descend(depth + 1);
            self.included[a] = false;
        }
        self.excluded[a] = true;
        self.descend(depth + 1);
        self.excluded[a] = false;
    }

    fn can_include(&self, a: usize) -> bool {
        let af = self.af;
        !af.attackers_idx(a).iter().any(|&b| b == a || self.included[b])
            && !af.targets_idx(a).iter().any(|&t| self.included[t])
    }

    /// Every attacker of an included argument must still be counter-attackable
    /// by some argument that is included or not yet excluded.
    fn may_still_defend(&self) -> bool {
        let af = self.af;
        (0..af.len()).filter(|&m| self.included[m]).all(|m| {
            af.attackers_idx(m)
                .iter()
                .all(|&b| af.attackers_idx(b).iter().any(|&c| !self.excluded[c]))
        })
    }

    /// Largest set reachable from this node; prune if an earlier extension covers it.
    fn dominated_bound(&self) -> bool {
        if self.found.is_empty() {
            return false;
        }
        let af = self.af;
        let bound: Vec<bool> = (0..af.len())
            .map(|i| {
                self.included[i]
                    || (!self.excluded[i]
                        && !af.attackers_idx(i).iter().any(|&b| b == i || self.included[b])
                        && !af.targets_idx(i).iter().any(|&t| self.included[t]))
            })
            .collect();
        self.subsumed(&bound)
    }

    fn subsumed(&self, set: &[bool]) -> bool {
        self.found
            .iter()
            .any(|f| set.iter().zip(f).all(|(&s, &f)| !s || f))
    }

    fn is_admissible_leaf(&self) -> bool {
        let af = self.af;
        af.conflict_free_mask(&self.included)
            && (0..af.len())
                .filter(|&i| self.included[i])
                .all(|i| af.defends_mask(&self.included, i))
    }
}
