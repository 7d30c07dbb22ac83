//! Test-only oracles that apply the argumentation definitions literally.
#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::Rng;
use reqarg_core::af::{AbstractFramework, ArgumentId};
use reqarg_core::attack::{AttackEdge, EdgeOrigin};
use reqarg_core::graph::AttackGraph;
use reqarg_core::log::{ActType, Argument};
use reqarg_core::quality::QualityAxis;

/// A framework over `a0..a{n-1}` given as an adjacency matrix.
#[derive(Debug, Clone)]
pub struct RawFramework {
    pub n: usize,
    pub attacks: Vec<(usize, usize)>,
}

impl RawFramework {
    pub fn random<R: Rng>(rng: &mut R, max_n: usize, density: f64, self_loops: bool) -> Self {
        let n = rng.gen_range(0..=max_n);
        let mut attacks = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if (a != b || self_loops) && rng.gen_bool(density) {
                    attacks.push((a, b));
                }
            }
        }
        Self { n, attacks }
    }

    /// Random DAG: edges only from a higher index to a lower one, then relabelled.
    pub fn random_dag<R: Rng>(rng: &mut R, max_n: usize, density: f64) -> Self {
        let n = rng.gen_range(0..=max_n);
        let mut perm: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            perm.swap(i, rng.gen_range(0..=i));
        }
        let mut attacks = Vec::new();
        for a in 0..n {
            for b in 0..a {
                if rng.gen_bool(density) {
                    attacks.push((perm[a], perm[b]));
                }
            }
        }
        Self { n, attacks }
    }

    pub fn name(i: usize) -> ArgumentId {
        ArgumentId::numbered(i)
    }

    pub fn framework(&self) -> AbstractFramework {
        AbstractFramework::new(
            (0..self.n).map(Self::name),
            self.attacks.iter().map(|&(a, b)| (Self::name(a), Self::name(b))),
        )
        .unwrap()
    }

    /// The same framework as proposals with qualities cycled from `axes`.
    pub fn attack_graph(&self, axes: &[QualityAxis]) -> AttackGraph {
        let args = (0..self.n)
            .map(|i| Argument {
                id: Self::name(i),
                act: ActType::Proposal,
                content: format!("requirement {i}"),
                agent: format!("agent{}", i % 3),
                quality: axes[i % axes.len()].clone(),
                rationale: String::new(),
                source: None,
            })
            .collect();
        let mut g = AttackGraph::new(args).unwrap();
        for &(a, b) in &self.attacks {
            g.add_attack(AttackEdge::rule(Self::name(a), Self::name(b), EdgeOrigin::Semantic, ""));
        }
        g
    }

    fn attacks(&self, a: usize, b: usize) -> bool {
        self.attacks.contains(&(a, b))
    }

    fn conflict_free(&self, s: u64) -> bool {
        self.attacks
            .iter()
            .all(|&(a, b)| !(s >> a & 1 == 1 && s >> b & 1 == 1))
    }

    fn defends(&self, s: u64, a: usize) -> bool {
        (0..self.n)
            .filter(|&b| self.attacks(b, a))
            .all(|b| (0..self.n).any(|c| s >> c & 1 == 1 && self.attacks(c, b)))
    }

    fn admissible(&self, s: u64) -> bool {
        self.conflict_free(s) && (0..self.n).filter(|&a| s >> a & 1 == 1).all(|a| self.defends(s, a))
    }

    fn to_set(&self, s: u64) -> BTreeSet<ArgumentId> {
        (0..self.n).filter(|&a| s >> a & 1 == 1).map(Self::name).collect()
    }

    /// Iterates the characteristic function from the empty set.
    pub fn oracle_grounded(&self) -> BTreeSet<ArgumentId> {
        let mut s = 0u64;
        loop {
            let next = (0..self.n)
                .filter(|&a| self.defends(s, a))
                .fold(0u64, |acc, a| acc | 1 << a);
            if next == s {
                return self.to_set(s);
            }
            s = next;
        }
    }

    /// Enumerates all 2^n subsets and keeps the inclusion-maximal admissible ones.
    pub fn oracle_preferred(&self) -> Vec<Vec<ArgumentId>> {
        let admissible: Vec<u64> = (0..1u64 << self.n).filter(|&s| self.admissible(s)).collect();
        let mut out: Vec<Vec<ArgumentId>> = admissible
            .iter()
            .filter(|&&s| !admissible.iter().any(|&t| t != s && t & s == s))
            .map(|&s| self.to_set(s).into_iter().collect())
            .collect();
        out.sort();
        out
    }
}

/// Best total over every injective matching of the smaller side into the
/// larger, by plain enumeration.
pub fn oracle_assignment_total(scores: &[Vec<f64>]) -> f64 {
    let rows = scores.len();
    let cols = scores[0].len();
    let at = |i: usize, j: usize| if rows <= cols { scores[i][j] } else { scores[j][i] };
    let (small, large) = (rows.min(cols), rows.max(cols));
    fn go(i: usize, small: usize, large: usize, used: &mut Vec<bool>, at: &dyn Fn(usize, usize) -> f64) -> f64 {
        if i == small {
            return 0.0;
        }
        let mut best = f64::NEG_INFINITY;
        for j in 0..large {
            if !used[j] {
                used[j] = true;
                best = best.max(at(i, j) + go(i + 1, small, large, used, at));
                used[j] = false;
            }
        }
        best
    }
    go(0, small, large, &mut vec![false; large], &at)
}

/// Random matrix of multiples of 1/64, so every sum is exact.
pub fn dyadic_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> Vec<Vec<f64>> {
    (0..rows)
        .map(|_| (0..cols).map(|_| rng.gen_range(0..=64) as f64 / 64.0).collect())
        .collect()
}
