use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{AbstractFramework, ArgumentId};

/// One strongly connected component, members in canonical order.
pub type Scc = Vec<ArgumentId>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphStats {
    pub argument_count: usize,
    pub attack_count: usize,
    /// Longest directed attack path (in edges); `None` when the graph has a cycle.
    pub depth: Option<usize>,
    /// Weakly connected components.
    pub component_count: usize,
    pub scc_partition: Vec<Scc>,
    /// Share of arguments sitting in an SCC of size > 1; `None` for an empty graph.
    pub gci: Option<f64>,
    /// Edge counts per label, when labels were supplied.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub pattern_mix: BTreeMap<String, usize>,
}

impl GraphStats {
    pub fn is_acyclic(&self) -> bool {
        self.depth.is_some()
    }
}

impl AbstractFramework {
    pub fn graph_stats(&self, labels: Option<&BTreeMap<(ArgumentId, ArgumentId), String>>) -> GraphStats {
        let n = self.len();
        let comps = self.tarjan();
        let cyclic_members: usize = comps.iter().filter(|c| c.len() > 1).map(Vec::len).sum();
        let gci = (n > 0).then(|| cyclic_members as f64 / n as f64);

        let has_self_loop = (0..n).any(|i| self.targets_idx(i).contains(&i));
        let depth = if cyclic_members == 0 && !has_self_loop {
            Some(self.longest_path(&comps))
        } else {
            None
        };

        let mut scc_partition: Vec<Scc> = comps
            .iter()
            .map(|c| {
                let mut ids: Vec<ArgumentId> = c.iter().map(|&i| self.id_at(i).clone()).collect();
                ids.sort();
                ids
            })
            .collect();
        scc_partition.sort();

        let mut pattern_mix = BTreeMap::new();
        if let Some(labels) = labels {
            for (a, t) in self.attacks() {
                let label = labels
                    .get(&(a.clone(), t.clone()))
                    .cloned()
                    .unwrap_or_else(|| "unlabelled".to_owned());
                *pattern_mix.entry(label).or_insert(0) += 1;
            }
        }

        GraphStats {
            argument_count: n,
            attack_count: self.attack_count(),
            depth,
            component_count: self.weak_components(),
            scc_partition,
            gci,
            pattern_mix,
        }
    }

    /// True iff some directed cycle of length >= 2 exists (self-loops ignored).
    pub fn has_nontrivial_cycle(&self) -> bool {
        self.tarjan().iter().any(|c| c.len() > 1)
    }

    /// Iterative Tarjan. Components come out in reverse topological order.
    pub(crate) fn tarjan(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        const UNSEEN: usize = usize::MAX;
        let mut index = vec![UNSEEN; n];
        let mut low = vec![0; n];
        let mut on_stack = vec![false; n];
        let mut stack = Vec::new();
        let mut comps = Vec::new();
        let mut next = 0;
        // (node, position in its successor list)
        let mut call: Vec<(usize, usize)> = Vec::new();

        for root in 0..n {
            if index[root] != UNSEEN {
                continue;
            }
            call.push((root, 0));
            index[root] = next;
            low[root] = next;
            next += 1;
            stack.push(root);
            on_stack[root] = true;

            while let Some(&mut (v, ref mut pos)) = call.last_mut() {
                let succ = self.targets_idx(v);
                if *pos < succ.len() {
                    let w = succ[*pos];
                    *pos += 1;
                    if index[w] == UNSEEN {
                        index[w] = next;
                        low[w] = next;
                        next += 1;
                        stack.push(w);
                        on_stack[w] = true;
                        call.push((w, 0));
                    } else if on_stack[w] {
                        low[v] = low[v].min(index[w]);
                    }
                    continue;
                }
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack underflow");
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comps.push(comp);
                }
            }
        }
        comps
    }

    /// Longest path over an acyclic graph. `comps` must be the singleton
    /// Tarjan output, which lists sinks before their predecessors.
    fn longest_path(&self, comps: &[Vec<usize>]) -> usize {
        let mut longest = vec![0usize; self.len()];
        for comp in comps {
            let v = comp[0];
            longest[v] = self
                .targets_idx(v)
                .iter()
                .map(|&t| longest[t] + 1)
                .max()
                .unwrap_or(0);
        }
        longest.into_iter().max().unwrap_or(0)
    }

    fn weak_components(&self) -> usize {
        let n = self.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        let mut count = n;
        for v in 0..n {
            for &t in self.targets_idx(v) {
                let (a, b) = (find(&mut parent, v), find(&mut parent, t));
                if a != b {
                    parent[a] = b;
                    count -= 1;
                }
            }
        }
        count
    }
}
