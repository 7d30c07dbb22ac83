use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::providers::{cosine, stable_hash, tokens, ProviderError};

/// A reference passage with its source tags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Passage {
    pub source: String,
    pub clause_id: String,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Clause {
    pub clause_id: String,
    pub text: String,
    /// A quality dimension, or `all`.
    pub applicability: String,
}

/// Text to a fixed-length vector.
pub trait Embedder: Send + Sync {
    fn embed(&self, text: &str) -> Result<Vec<f64>, ProviderError>;
}

/// Token counts hashed into `dims` buckets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HashedBagOfWords {
    pub dims: usize,
}

impl Default for HashedBagOfWords {
    fn default() -> Self {
        Self { dims: 512 }
    }
}

impl Embedder for HashedBagOfWords {
    fn embed(&self, text: &str) -> Result<Vec<f64>, ProviderError> {
        let mut v = vec![0.0; self.dims.max(1)];
        for t in tokens(text) {
            let i = (stable_hash(&[t.as_bytes()]) % v.len() as u64) as usize;
            v[i] += 1.0;
        }
        Ok(v)
    }
}

/// Fixed vectors per text; anything else embeds to zeros.
#[derive(Debug, Clone, Default)]
pub struct TableEmbedder {
    dims: usize,
    table: BTreeMap<String, Vec<f64>>,
}

impl TableEmbedder {
    pub fn new(dims: usize) -> Self {
        Self {
            dims,
            table: BTreeMap::new(),
        }
    }

    pub fn with(mut self, text: &str, vector: Vec<f64>) -> Self {
        self.table.insert(text.to_owned(), vector);
        self
    }
}

impl Embedder for TableEmbedder {
    fn embed(&self, text: &str) -> Result<Vec<f64>, ProviderError> {
        Ok(self.table.get(text).cloned().unwrap_or_else(|| vec![0.0; self.dims]))
    }
}

/// Nearest-neighbour lookup by cosine.
pub trait VectorStore {
    fn insert(&mut self, passage: Passage, vector: Vec<f64>);
    fn nearest(&self, query: &[f64]) -> Option<(&Passage, f64)>;
}

/// Linear scan; ties go to the earlier passage.
#[derive(Debug, Clone, Default)]
pub struct BruteForceStore {
    entries: Vec<(Passage, Vec<f64>)>,
}

impl VectorStore for BruteForceStore {
    fn insert(&mut self, passage: Passage, vector: Vec<f64>) {
        self.entries.push((passage, vector));
    }

    fn nearest(&self, query: &[f64]) -> Option<(&Passage, f64)> {
        let mut best: Option<(&Passage, f64)> = None;
        for (p, v) in &self.entries {
            let s = cosine(query, v);
            if best.is_none_or(|(_, b)| s > b) {
                best = Some((p, s));
            }
        }
        best
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntailmentVerdict {
    pub satisfied: bool,
    /// Index into the requirement list of the first requirement found to
    /// satisfy the clause.
    pub satisfied_by: Option<usize>,
    #[serde(default)]
    pub rationale: String,
}

/// Does at least one requirement satisfy the clause? One call per clause.
pub trait EntailmentProvider: Send + Sync {
    fn entails(&self, clause: &Clause, requirements: &[&str]) -> Result<EntailmentVerdict, ProviderError>;
}

const STOPWORDS: &[&str] = &["the", "and", "are", "for", "with", "its", "that", "this", "from", "into", "before", "during"];

fn content_tokens(text: &str) -> BTreeSet<String> {
    tokens(text)
        .into_iter()
        .filter(|t| t.len() >= 2 && !STOPWORDS.contains(&t.as_str()))
        .collect()
}

/// Satisfied when some requirement contains at least `min_overlap` of the
/// clause's content words.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlapEntailment {
    pub min_overlap: f64,
}

impl Default for OverlapEntailment {
    fn default() -> Self {
        Self { min_overlap: 0.5 }
    }
}

impl EntailmentProvider for OverlapEntailment {
    fn entails(&self, clause: &Clause, requirements: &[&str]) -> Result<EntailmentVerdict, ProviderError> {
        let want = content_tokens(&clause.text);
        if want.is_empty() {
            return Err(ProviderError::new("overlap-entailment", format!("clause {} has no content words", clause.clause_id)));
        }
        for (i, r) in requirements.iter().enumerate() {
            let have = content_tokens(r);
            let share = want.intersection(&have).count() as f64 / want.len() as f64;
            if share >= self.min_overlap {
                return Ok(EntailmentVerdict {
                    satisfied: true,
                    satisfied_by: Some(i),
                    rationale: format!("{:.0}% of clause terms present", share * 100.0),
                });
            }
        }
        Ok(EntailmentVerdict {
            satisfied: false,
            satisfied_by: None,
            rationale: "no requirement covers the clause terms".to_owned(),
        })
    }
}

/// Satisfies exactly the listed clause ids, crediting the first requirement.
#[derive(Debug, Clone, Default)]
pub struct TableEntailment {
    satisfied: BTreeSet<String>,
}

impl TableEntailment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn satisfied<S: Into<String>>(mut self, ids: impl IntoIterator<Item = S>) -> Self {
        self.satisfied.extend(ids.into_iter().map(Into::into));
        self
    }
}

impl EntailmentProvider for TableEntailment {
    fn entails(&self, clause: &Clause, requirements: &[&str]) -> Result<EntailmentVerdict, ProviderError> {
        let ok = self.satisfied.contains(&clause.clause_id);
        Ok(EntailmentVerdict {
            satisfied: ok,
            satisfied_by: (ok && !requirements.is_empty()).then_some(0),
            rationale: if ok { "listed as satisfied".into() } else { "not listed".into() },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn hashed_embedding_is_deterministic() {
        let e = HashedBagOfWords::default();
        let a = e.embed("Fusion within 30 ms").unwrap();
        assert_eq!(a, e.embed("fusion WITHIN 30 ms").unwrap());
        assert!((cosine(&a, &a) - 1.0).abs() < 1e-12);
        assert_eq!(cosine(&a, &e.embed("").unwrap()), 0.0);
    }

    #[test]
    fn store_returns_best_match() {
        let mut s = BruteForceStore::default();
        let p = |t: &str| Passage {
            source: "s".into(),
            clause_id: t.into(),
            text: t.into(),
        };
        s.insert(p("x"), vec![1.0, 0.0]);
        s.insert(p("y"), vec![0.0, 1.0]);
        let (best, sim) = s.nearest(&[0.1, 0.9]).unwrap();
        assert_eq!(best.text, "y");
        assert!(sim > 0.9);
        assert!(BruteForceStore::default().nearest(&[1.0]).is_none());
    }

    #[test]
    fn overlap_entailment_records_first_match() {
        let c = Clause {
            clause_id: "k".into(),
            text: "fallback keeps planning running".into(),
            applicability: "all".into(),
        };
        let v = OverlapEntailment::default()
            .entails(&c, &["unrelated text", "a fallback keeps planning alive", "fallback keeps planning running"])
            .unwrap();
        assert!(v.satisfied);
        assert_eq!(v.satisfied_by, Some(1));
    }

    #[test]
    fn bundled_files_parse() {
        let corpus: Vec<Passage> = serde_json::from_str(fixtures::AD_CORPUS).unwrap();
        let clauses: Vec<Clause> = serde_json::from_str(fixtures::AD_CLAUSES).unwrap();
        assert!(!corpus.is_empty());
        assert_eq!(clauses.len(), 5);
    }
}
