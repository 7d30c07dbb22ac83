//! The attack graph: arguments with their metadata plus labelled attack and
//! support edges. This is what gets resolved, exported and edited.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::af::{AbstractFramework, AfError, ArgumentId};
use crate::attack::{rule_based_attacks, AttackEdge, EdgeOrigin, SupportEdge};
use crate::log::{Argument, NegotiationLog};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("duplicate argument `{0}`")]
    DuplicateArgument(ArgumentId),
    #[error("edge {0} -> {1} references an unknown argument")]
    DanglingEdge(ArgumentId, ArgumentId),
    #[error("no attack {0} -> {1}")]
    UnknownEdge(ArgumentId, ArgumentId),
    #[error("attack {0} -> {1} already present")]
    DuplicateEdge(ArgumentId, ArgumentId),
    #[error(transparent)]
    Framework(#[from] AfError),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AttackGraph {
    pub arguments: Vec<Argument>,
    pub attacks: Vec<AttackEdge>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub supports: Vec<SupportEdge>,
}

impl AttackGraph {
    pub fn new(arguments: Vec<Argument>) -> Result<Self, GraphError> {
        let mut seen = BTreeSet::new();
        for a in &arguments {
            if !seen.insert(a.id.clone()) {
                return Err(GraphError::DuplicateArgument(a.id.clone()));
            }
        }
        Ok(Self {
            arguments,
            attacks: Vec::new(),
            supports: Vec::new(),
        })
    }

    /// Arguments of the log with their rule-based edges and any pinned
    /// attacks. Returns extraction and construction warnings alongside.
    pub fn from_log(log: &NegotiationLog) -> Result<(Self, Vec<String>), GraphError> {
        let args = log.extract_arguments();
        let rules = rule_based_attacks(&args, log);
        let mut warnings = args.warnings.clone();
        warnings.extend(rules.warnings);
        let mut graph = Self::new(args.arguments.clone())?;
        graph.extend_attacks(rules.edges);
        for p in &log.pinned_attacks {
            let (Some(a), Some(t)) = (args.for_turn(&p.attacker), args.for_turn(&p.target)) else {
                warnings.push(format!("pinned attack {} -> {} does not resolve", p.attacker, p.target));
                continue;
            };
            let edge = AttackEdge {
                attacker: a.clone(),
                target: t.clone(),
                origin: p.origin,
                confidence: p.confidence,
                rationale: p.rationale.clone(),
            };
            if !graph.add_attack(edge) {
                warnings.push(format!("pinned attack {a} -> {t} duplicates a derived edge"));
            }
        }
        Ok((graph, warnings))
    }

    pub fn argument(&self, id: &ArgumentId) -> Option<&Argument> {
        self.arguments.iter().find(|a| &a.id == id)
    }

    pub fn contains(&self, id: &ArgumentId) -> bool {
        self.argument(id).is_some()
    }

    pub fn edge(&self, attacker: &ArgumentId, target: &ArgumentId) -> Option<&AttackEdge> {
        self.attacks
            .iter()
            .find(|e| &e.attacker == attacker && &e.target == target)
    }

    /// Adds an edge unless the same ordered pair is already present; returns
    /// whether it was inserted. The first edge recorded for a pair keeps its label.
    pub fn add_attack(&mut self, edge: AttackEdge) -> bool {
        if self.edge(&edge.attacker, &edge.target).is_some() {
            return false;
        }
        self.attacks.push(edge);
        true
    }

    pub fn extend_attacks(&mut self, edges: impl IntoIterator<Item = AttackEdge>) -> usize {
        edges.into_iter().filter(|e| self.add_attack(e.clone())).count()
    }

    pub fn add_argument(&mut self, argument: Argument) -> Result<(), GraphError> {
        if self.contains(&argument.id) {
            return Err(GraphError::DuplicateArgument(argument.id));
        }
        self.arguments.push(argument);
        Ok(())
    }

    /// A copy without the given attack.
    pub fn without_attack(&self, attacker: &ArgumentId, target: &ArgumentId) -> Result<Self, GraphError> {
        if self.edge(attacker, target).is_none() {
            return Err(GraphError::UnknownEdge(attacker.clone(), target.clone()));
        }
        let mut next = self.clone();
        next.attacks
            .retain(|e| !(&e.attacker == attacker && &e.target == target));
        Ok(next)
    }

    /// The underlying Dung framework. Fails on edges to unknown arguments.
    pub fn framework(&self) -> Result<AbstractFramework, GraphError> {
        let ids: BTreeSet<&ArgumentId> = self.arguments.iter().map(|a| &a.id).collect();
        for e in &self.attacks {
            if !ids.contains(&e.attacker) || !ids.contains(&e.target) {
                return Err(GraphError::DanglingEdge(e.attacker.clone(), e.target.clone()));
            }
        }
        Ok(AbstractFramework::new(
            self.arguments.iter().map(|a| a.id.clone()),
            self.attacks.iter().map(|e| (e.attacker.clone(), e.target.clone())),
        )?)
    }

    pub fn labels(&self) -> BTreeMap<(ArgumentId, ArgumentId), String> {
        self.attacks
            .iter()
            .map(|e| ((e.attacker.clone(), e.target.clone()), e.origin.to_string()))
            .collect()
    }

    /// Edge counts per origin label.
    pub fn origin_counts(&self) -> BTreeMap<EdgeOrigin, usize> {
        let mut m = BTreeMap::new();
        for e in &self.attacks {
            *m.entry(e.origin).or_insert(0) += 1;
        }
        m
    }

    pub fn incoming<'a>(&'a self, id: &'a ArgumentId) -> impl Iterator<Item = &'a AttackEdge> + 'a {
        self.attacks.iter().filter(move |e| &e.target == id)
    }

    pub fn outgoing<'a>(&'a self, id: &'a ArgumentId) -> impl Iterator<Item = &'a AttackEdge> + 'a {
        self.attacks.iter().filter(move |e| &e.attacker == id)
    }

    /// Sorts arguments and edges into canonical order.
    pub fn canonicalize(&mut self) {
        self.arguments.sort_by(|a, b| a.id.cmp(&b.id));
        self.attacks
            .sort_by(|a, b| (&a.attacker, &a.target).cmp(&(&b.attacker, &b.target)));
        self.supports
            .sort_by(|a, b| (&a.supporter, &a.supported).cmp(&(&b.supporter, &b.supported)));
    }

    /// Next free `a<n>` id.
    pub fn next_numbered_id(&self) -> usize {
        self.arguments
            .iter()
            .filter_map(|a| a.id.as_str().strip_prefix('a')?.parse::<usize>().ok())
            .max()
            .unwrap_or(0)
            + 1
    }
}
