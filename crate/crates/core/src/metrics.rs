//! Evaluation metrics with a mechanical definition: requirement-set
//! preservation via optimal assignment, per-axis coverage and run statistics.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::af::GraphStats;
use crate::graph::AttackGraph;
use crate::kaos::{GoalLevel, KaosGraph};
use crate::providers::{ProviderError, SimilarityProvider};
use crate::quality::QualityAxis;
use crate::resolve::{trace_completeness, Resolution};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error("{0} list is empty")]
    EmptyInput(&'static str),
    #[error("score matrix is {rows}x{cols} but row {row} has {len} entries")]
    Ragged { rows: usize, cols: usize, row: usize, len: usize },
    #[error("score {score} at ({row}, {col}) is outside [0, 1]")]
    OutOfRange { row: usize, col: usize, score: f64 },
    #[error(transparent)]
    Provider(#[from] ProviderError),
}

/// Pairwise scores between two requirement lists.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreMatrix {
    pub rows: Vec<String>,
    pub cols: Vec<String>,
    pub scores: Vec<Vec<f64>>,
}

impl ScoreMatrix {
    pub fn build(rows: &[String], cols: &[String], scorer: &dyn SimilarityProvider) -> Result<Self, MetricsError> {
        let scores = rows
            .iter()
            .map(|r| cols.iter().map(|c| scorer.similarity(r, c)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_scores(rows.to_vec(), cols.to_vec(), scores)
    }

    pub fn from_scores(rows: Vec<String>, cols: Vec<String>, scores: Vec<Vec<f64>>) -> Result<Self, MetricsError> {
        if rows.is_empty() {
            return Err(MetricsError::EmptyInput("first"));
        }
        if cols.is_empty() {
            return Err(MetricsError::EmptyInput("second"));
        }
        if scores.len() != rows.len() {
            return Err(MetricsError::Ragged {
                rows: rows.len(),
                cols: cols.len(),
                row: scores.len(),
                len: 0,
            });
        }
        for (i, row) in scores.iter().enumerate() {
            if row.len() != cols.len() {
                return Err(MetricsError::Ragged {
                    rows: rows.len(),
                    cols: cols.len(),
                    row: i,
                    len: row.len(),
                });
            }
            for (j, &s) in row.iter().enumerate() {
                if !(0.0..=1.0).contains(&s) {
                    return Err(MetricsError::OutOfRange { row: i, col: j, score: s });
                }
            }
        }
        Ok(Self { rows, cols, scores })
    }

    /// Unlabelled matrix, rows and columns named by index.
    pub fn unlabelled(scores: Vec<Vec<f64>>) -> Result<Self, MetricsError> {
        let rows = (0..scores.len()).map(|i| i.to_string()).collect();
        let cols = (0..scores.first().map_or(0, Vec::len)).map(|j| j.to_string()).collect();
        Self::from_scores(rows, cols, scores)
    }

    pub fn transpose(&self) -> Self {
        let scores = (0..self.cols.len())
            .map(|j| self.scores.iter().map(|r| r[j]).collect())
            .collect();
        Self {
            rows: self.cols.clone(),
            cols: self.rows.clone(),
            scores,
        }
    }
}

/// Maximum-weight assignment on a rectangular matrix, matching
/// `min(rows, cols)` pairs. Returns `(row, col)` pairs sorted by row.
///
/// Shortest augmenting paths with vertex potentials, O(n^2 m).
pub fn max_weight_assignment(scores: &[Vec<f64>]) -> Vec<(usize, usize)> {
    let n_rows = scores.len();
    let n_cols = scores.first().map_or(0, Vec::len);
    if n_rows == 0 || n_cols == 0 {
        return Vec::new();
    }
    let transposed = n_rows > n_cols;
    let (n, m) = if transposed { (n_cols, n_rows) } else { (n_rows, n_cols) };
    let cost = |i: usize, j: usize| if transposed { -scores[j][i] } else { -scores[i][j] };

    // 1-based; column 0 is the virtual source.
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; m + 1];
    let mut owner = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    for i in 1..=n {
        owner[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=m {
                if used[j] {
                    continue;
                }
                let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut pairs: Vec<(usize, usize)> = (1..=m)
        .filter(|&j| owner[j] != 0)
        .map(|j| if transposed { (j - 1, owner[j] - 1) } else { (owner[j] - 1, j - 1) })
        .collect();
    pairs.sort_unstable();
    pairs
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchedPair {
    pub row: usize,
    pub col: usize,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Preservation {
    /// Mean score over matched pairs.
    pub score: f64,
    pub total: f64,
    pub pairs: Vec<MatchedPair>,
    pub unmatched_rows: Vec<usize>,
    pub unmatched_cols: Vec<usize>,
}

pub fn preservation_from_matrix(matrix: &ScoreMatrix) -> Preservation {
    let assignment = max_weight_assignment(&matrix.scores);
    let pairs: Vec<MatchedPair> = assignment
        .iter()
        .map(|&(row, col)| MatchedPair {
            row,
            col,
            score: matrix.scores[row][col],
        })
        .collect();
    let total: f64 = pairs.iter().map(|p| p.score).sum();
    let unmatched_rows = (0..matrix.rows.len())
        .filter(|i| !assignment.iter().any(|p| p.0 == *i))
        .collect();
    let unmatched_cols = (0..matrix.cols.len())
        .filter(|j| !assignment.iter().any(|p| p.1 == *j))
        .collect();
    Preservation {
        score: total / pairs.len() as f64,
        total,
        pairs,
        unmatched_rows,
        unmatched_cols,
    }
}

/// How well the requirements in `b` preserve those in `a`: the mean score of
/// an optimal one-to-one matching.
pub fn semantic_preservation(
    a: &[String],
    b: &[String],
    scorer: &dyn SimilarityProvider,
) -> Result<Preservation, MetricsError> {
    let matrix = ScoreMatrix::build(a, b, scorer)?;
    Ok(preservation_from_matrix(&matrix))
}

pub const MAC_FORMULA: &str = "min over configured axes of |{r in R_acc : quality(r) = axis}|";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoalCounts {
    pub strategic: usize,
    pub tactical: usize,
    pub operational: usize,
    pub links: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunStats {
    pub arguments: usize,
    pub attacks: usize,
    pub grounded_size: usize,
    /// Size of the preferred extension the resolver would select: the
    /// priority-guided choice when one was made, otherwise the largest.
    pub preferred_size: usize,
    pub preferred_count: usize,
    pub selected_size: usize,
    pub accepted_requirements: usize,
    pub trace_completeness: Option<f64>,
    pub gci: Option<f64>,
    pub pattern_mix: BTreeMap<String, usize>,
    pub depth: Option<usize>,
    pub components: usize,
    pub axis_counts: BTreeMap<QualityAxis, usize>,
    pub mac: Option<usize>,
    pub mac_formula: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub goals: Option<GoalCounts>,
}

/// Size of the priority-guided choice when the resolver made one, otherwise
/// of the largest preferred extension.
pub fn selected_preferred_size(resolution: &Resolution) -> usize {
    match &resolution.priority {
        Some(p) => resolution.preferred.get(p.chosen).map_or(0, |e| e.len()),
        None => resolution.preferred.iter().map(|e| e.len()).max().unwrap_or(0),
    }
}

/// Summarizes one resolved run. `axes` are the configured quality axes; every
/// one appears in the histogram, as does any other axis an accepted
/// requirement carries. MAC ranges over the configured axes only.
pub fn run_stats(
    resolution: &Resolution,
    graph: &AttackGraph,
    stats: &GraphStats,
    kaos: Option<&KaosGraph>,
    axes: &[QualityAxis],
) -> RunStats {
    let mut axis_counts: BTreeMap<QualityAxis, usize> = axes.iter().map(|a| (a.clone(), 0)).collect();
    for r in &resolution.accepted_requirements {
        *axis_counts.entry(r.quality.clone()).or_insert(0) += 1;
    }
    let mac = axes.iter().map(|a| axis_counts[a]).min();

    let preferred_size = selected_preferred_size(resolution);
    RunStats {
        arguments: stats.argument_count,
        attacks: stats.attack_count,
        grounded_size: resolution.grounded.len(),
        preferred_size,
        preferred_count: resolution.preferred.len(),
        selected_size: resolution.extension.len(),
        accepted_requirements: resolution.accepted_requirements.len(),
        trace_completeness: trace_completeness(resolution, graph),
        gci: stats.gci,
        pattern_mix: stats.pattern_mix.clone(),
        depth: stats.depth,
        components: stats.component_count,
        axis_counts,
        mac,
        mac_formula: MAC_FORMULA.to_owned(),
        goals: kaos.map(|k| GoalCounts {
            strategic: k.count_level(GoalLevel::Strategic),
            tactical: k.count_level(GoalLevel::Tactical),
            operational: k.count_level(GoalLevel::Operational),
            links: k.links.len(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attack::{AttackEdge, EdgeOrigin};
    use crate::log::ActType;
    use crate::providers::FixedSimilarity;
    use crate::resolve::tests::{bare, running_graph};
    use crate::resolve::{resolve, PreferredStrategy, ResolutionConfig};

    fn strings(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn diagonal_assignment() {
        let m = ScoreMatrix::unlabelled(vec![vec![0.9, 0.1], vec![0.2, 0.8]]).unwrap();
        let p = preservation_from_matrix(&m);
        assert_eq!(p.pairs.iter().map(|x| (x.row, x.col)).collect::<Vec<_>>(), vec![(0, 0), (1, 1)]);
        assert!((p.score - 0.85).abs() < 1e-12);
    }

    #[test]
    fn identical_singletons() {
        let p = semantic_preservation(&strings(&["x"]), &strings(&["x"]), &FixedSimilarity(1.0)).unwrap();
        assert_eq!(p.score, 1.0);
    }

    #[test]
    fn anti_diagonal_wins_when_larger() {
        let m = ScoreMatrix::unlabelled(vec![vec![0.5, 0.9], vec![0.875, 0.5]]).unwrap();
        let p = preservation_from_matrix(&m);
        assert_eq!(p.pairs.iter().map(|x| (x.row, x.col)).collect::<Vec<_>>(), vec![(0, 1), (1, 0)]);
    }

    #[test]
    fn rectangular_lists_unmatched_items() {
        let m = ScoreMatrix::unlabelled(vec![vec![0.25, 0.75, 0.5]]).unwrap();
        let p = preservation_from_matrix(&m);
        assert_eq!(p.score, 0.75);
        assert_eq!(p.unmatched_cols, vec![0, 2]);
        let t = preservation_from_matrix(&m.transpose());
        assert_eq!(t.score, 0.75);
        assert_eq!(t.unmatched_rows, vec![0, 2]);
    }

    #[test]
    fn empty_lists_are_rejected() {
        let err = semantic_preservation(&[], &strings(&["x"]), &FixedSimilarity(1.0)).unwrap_err();
        assert_eq!(err, MetricsError::EmptyInput("first"));
        assert!(ScoreMatrix::unlabelled(vec![vec![1.5]]).is_err());
    }

    #[test]
    fn running_example_stats() {
        let g = running_graph();
        let res = resolve(&g, &ResolutionConfig::grounded()).unwrap();
        let stats = g.framework().unwrap().graph_stats(Some(&g.labels()));
        let rs = run_stats(&res, &g, &stats, None, &QualityAxis::defaults());
        assert_eq!((rs.arguments, rs.attacks, rs.grounded_size), (6, 7, 3));
        assert_eq!(rs.gci, Some(0.0));
        assert_eq!(rs.trace_completeness, Some(1.0));
        assert_eq!(rs.axis_counts.len(), 5);
        assert_eq!(rs.mac, Some(0));
        assert_eq!(rs, run_stats(&res, &g, &stats, None, &QualityAxis::defaults()));
    }

    #[test]
    fn empty_framework_stats() {
        let g = AttackGraph::default();
        let res = resolve(&g, &ResolutionConfig::preferred(PreferredStrategy::Intersection)).unwrap();
        let stats = g.framework().unwrap().graph_stats(None);
        let rs = run_stats(&res, &g, &stats, None, &[]);
        assert_eq!((rs.arguments, rs.attacks, rs.grounded_size, rs.selected_size), (0, 0, 0, 0));
        assert_eq!((rs.gci, rs.trace_completeness, rs.mac), (None, None, None));
    }

    #[test]
    fn mutual_pair_over_eight() {
        let mut args: Vec<_> = (1..=8).map(|i| bare(&format!("a{i}"), ActType::Proposal, "safety")).collect();
        args[7].quality = "efficiency".into();
        let mut g = AttackGraph::new(args).unwrap();
        for (a, t) in [("a7", "a8"), ("a8", "a7")] {
            g.add_attack(AttackEdge::rule(a.into(), t.into(), EdgeOrigin::Arbitration, ""));
        }
        let cfg = ResolutionConfig::preferred(PreferredStrategy::PriorityGuided);
        let res = resolve(&g, &cfg).unwrap();
        let stats = g.framework().unwrap().graph_stats(None);
        let rs = run_stats(&res, &g, &stats, None, &QualityAxis::defaults());
        assert_eq!(rs.gci, Some(0.25));
        assert_eq!((rs.grounded_size, rs.preferred_size), (6, 7));
    }
}
