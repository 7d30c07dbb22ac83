use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{AttackEdge, EdgeOrigin};
use crate::af::ArgumentId;
use crate::log::{ActType, Argument};
use crate::providers::{tokens, ProviderError, SimilarityProvider};

/// Two accepted arguments from different sessions that compete for the same
/// resource.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Overlap {
    pub first: ArgumentId,
    pub second: ArgumentId,
    pub first_session: String,
    pub second_session: String,
    pub similarity: f64,
    /// Longest shared word run, used to phrase the synthesized critiques.
    pub resource: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ArbitrationOutcome {
    pub overlaps: Vec<Overlap>,
    pub critiques: Vec<Argument>,
    pub edges: Vec<AttackEdge>,
    pub warnings: Vec<String>,
}

fn longest_common_run(a: &str, b: &str) -> String {
    let (ta, tb) = (tokens(a), tokens(b));
    let mut best = (0, 0);
    // classic O(nm) dynamic programme over tokens
    let mut prev = vec![0usize; tb.len() + 1];
    for i in 1..=ta.len() {
        let mut cur = vec![0usize; tb.len() + 1];
        for j in 1..=tb.len() {
            if ta[i - 1] == tb[j - 1] {
                cur[j] = prev[j - 1] + 1;
                if cur[j] > best.0 {
                    best = (cur[j], i);
                }
            }
        }
        prev = cur;
    }
    ta[best.1 - best.0..best.1].join(" ")
}

/// One arbitration round over the arguments each session accepted.
///
/// Every cross-session pair with similarity at or above `tau` is an overlap.
/// For each overlap the two origin agents exchange critiques: the critique
/// voiced by the first argument's agent attacks the second argument and vice
/// versa, and the two critiques attack each other. New arguments are numbered
/// from `next_id`.
pub fn cross_pair_arbitration(
    accepted_per_session: &BTreeMap<String, Vec<ArgumentId>>,
    arguments: &[Argument],
    similarity: &dyn SimilarityProvider,
    tau: f64,
    next_id: usize,
) -> Result<ArbitrationOutcome, ProviderError> {
    let lookup: BTreeMap<&ArgumentId, &Argument> = arguments.iter().map(|a| (&a.id, a)).collect();
    let mut out = ArbitrationOutcome::default();
    let sessions: Vec<_> = accepted_per_session.iter().collect();

    for (i, (si, xs)) in sessions.iter().enumerate() {
        for (sj, ys) in &sessions[i + 1..] {
            for x in xs.iter() {
                for y in ys.iter() {
                    let (Some(ax), Some(ay)) = (lookup.get(x), lookup.get(y)) else {
                        out.warnings.push(format!("arbitration skipped unknown pair ({x}, {y})"));
                        continue;
                    };
                    if ax.session().is_some() && ax.session() == ay.session() {
                        out.warnings.push(format!("{x} and {y} share a session; not arbitrated"));
                        continue;
                    }
                    let s = similarity.similarity(&ax.content, &ay.content)?;
                    if s >= tau {
                        out.overlaps.push(Overlap {
                            first: x.clone(),
                            second: y.clone(),
                            first_session: (*si).clone(),
                            second_session: (*sj).clone(),
                            similarity: s,
                            resource: longest_common_run(&ax.content, &ay.content),
                        });
                    }
                }
            }
        }
    }

    let mut n = next_id;
    for ov in &out.overlaps {
        let (ax, ay) = (lookup[&ov.first], lookup[&ov.second]);
        let phrase = if ov.resource.is_empty() {
            "a shared resource".to_owned()
        } else {
            format!("\"{}\"", ov.resource)
        };
        let critique = |by: &Argument, against: &Argument, id: ArgumentId| Argument {
            id,
            act: ActType::Critique,
            content: format!(
                "{} objects to {} from {}: both claim {phrase}",
                by.agent, against.id, against.agent
            ),
            agent: by.agent.clone(),
            quality: by.quality.clone(),
            rationale: format!("cross-session overlap, similarity {:.3} >= tau {tau:.3}", ov.similarity),
            source: None,
        };
        let ci = critique(ax, ay, ArgumentId::numbered(n));
        let cj = critique(ay, ax, ArgumentId::numbered(n + 1));
        n += 2;
        let edge = |a: &ArgumentId, t: &ArgumentId, why: &str| AttackEdge {
            attacker: a.clone(),
            target: t.clone(),
            origin: EdgeOrigin::Arbitration,
            confidence: ov.similarity,
            rationale: why.to_owned(),
        };
        out.edges.push(edge(&ci.id, &ay.id, "arbitration critique rejects the competing requirement"));
        out.edges.push(edge(&cj.id, &ax.id, "arbitration critique rejects the competing requirement"));
        out.edges.push(edge(&ci.id, &cj.id, "competing arbitration critiques"));
        out.edges.push(edge(&cj.id, &ci.id, "competing arbitration critiques"));
        out.critiques.push(ci);
        out.critiques.push(cj);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::log::NegotiationLog;
    use crate::providers::{FixedSimilarity, TokenCosine};

    fn survivors_by_session(doc: &str) -> (Vec<Argument>, BTreeMap<String, Vec<ArgumentId>>) {
        let log = NegotiationLog::parse(doc).unwrap();
        let args = log.extract_arguments();
        let rules = super::super::rule_based_attacks(&args, &log);
        let mut m = BTreeMap::new();
        for s in &log.sessions {
            m.insert(s.id.clone(), super::super::session_survivors(&args.arguments, &rules.edges, &s.id).members);
        }
        (args.arguments, m)
    }

    #[test]
    fn overlapping_refinements_exchange_critiques() {
        let (args, m) = survivors_by_session(fixtures::TWO_SESSION_OVERLAP);
        let out = cross_pair_arbitration(&m, &args, &TokenCosine, 0.85, 7).unwrap();
        assert_eq!(out.overlaps.len(), 1);
        assert_eq!(out.critiques.len(), 2);
        assert_eq!(out.critiques[0].id.as_str(), "a7");
        assert_eq!(out.critiques[1].id.as_str(), "a8");
        assert!(out.critiques.iter().all(|c| c.act == ActType::Critique && c.source.is_none()));
        let mutual = out
            .edges
            .iter()
            .filter(|e| out.edges.iter().any(|f| f.attacker == e.target && f.target == e.attacker))
            .count();
        assert_eq!(mutual, 2);
        assert!(out.overlaps[0].resource.contains("latency budget"));
    }

    #[test]
    fn nothing_above_tau_leaves_graph_alone() {
        let (args, m) = survivors_by_session(fixtures::TWO_SESSION_OVERLAP);
        let out = cross_pair_arbitration(&m, &args, &FixedSimilarity(0.5), 0.85, 7).unwrap();
        assert!(out.critiques.is_empty() && out.edges.is_empty());
    }

    #[test]
    fn common_run() {
        assert_eq!(longest_common_run("the 30 ms latency budget", "a 30 ms latency budget here"), "30 ms latency budget");
        assert_eq!(longest_common_run("abc", "xyz"), "");
    }
}
