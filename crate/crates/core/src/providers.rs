//! Pluggable text providers and their deterministic defaults.
//!
//! Model-backed scorers (sentence embeddings, LLM judges) live outside this
//! crate; everything here is reproducible from the input text alone.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("provider `{provider}` failed: {message}")]
pub struct ProviderError {
    pub provider: String,
    pub message: String,
}

impl ProviderError {
    pub fn new(provider: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            provider: provider.into(),
            message: message.into(),
        }
    }
}

/// Pairwise text similarity in `[0, 1]`.
pub trait SimilarityProvider: Send + Sync {
    fn similarity(&self, a: &str, b: &str) -> Result<f64, ProviderError>;
}

/// Lowercased alphanumeric word tokens.
pub fn tokens(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

fn bag(text: &str) -> HashMap<String, f64> {
    let mut m = HashMap::new();
    for t in tokens(text) {
        *m.entry(t).or_insert(0.0) += 1.0;
    }
    m
}

/// Cosine similarity between word-count vectors. Two empty texts score 0.
pub fn token_cosine(a: &str, b: &str) -> f64 {
    let (ba, bb) = (bag(a), bag(b));
    let dot: f64 = ba.iter().filter_map(|(k, v)| bb.get(k).map(|w| v * w)).sum();
    let na: f64 = ba.values().map(|v| v * v).sum::<f64>().sqrt();
    let nb: f64 = bb.values().map(|v| v * v).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        (dot / (na * nb)).clamp(0.0, 1.0)
    }
}

/// Cosine of two dense vectors; 0 when either is zero or lengths differ.
pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return 0.0;
    }
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

/// Default similarity: token-overlap cosine over lowercased word bags.
#[derive(Debug, Clone, Copy, Default)]
pub struct TokenCosine;

impl SimilarityProvider for TokenCosine {
    fn similarity(&self, a: &str, b: &str) -> Result<f64, ProviderError> {
        Ok(token_cosine(a, b))
    }
}

/// Returns the same score for every pair.
#[derive(Debug, Clone, Copy)]
pub struct FixedSimilarity(pub f64);

impl SimilarityProvider for FixedSimilarity {
    fn similarity(&self, _: &str, _: &str) -> Result<f64, ProviderError> {
        Ok(self.0)
    }
}

/// Looks pairs up in a table (order-insensitive), falling back to a default.
#[derive(Debug, Clone, Default)]
pub struct TableSimilarity {
    pairs: BTreeMap<(String, String), f64>,
    fallback: f64,
}

impl TableSimilarity {
    pub fn new(fallback: f64) -> Self {
        Self {
            pairs: BTreeMap::new(),
            fallback,
        }
    }

    pub fn with(mut self, a: &str, b: &str, score: f64) -> Self {
        self.pairs.insert(ordered(a, b), score);
        self
    }
}

fn ordered(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_owned(), b.to_owned())
    } else {
        (b.to_owned(), a.to_owned())
    }
}

impl SimilarityProvider for TableSimilarity {
    fn similarity(&self, a: &str, b: &str) -> Result<f64, ProviderError> {
        Ok(self.pairs.get(&ordered(a, b)).copied().unwrap_or(self.fallback))
    }
}

/// 64-bit FNV-1a; stable across platforms and releases.
pub fn stable_hash(parts: &[&[u8]]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for part in parts {
        for &b in *part {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        // separator so ("ab","c") and ("a","bc") differ
        h ^= 0xff;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Maps a hash onto `[0, 1)`.
pub fn unit_interval(h: u64) -> f64 {
    // splitmix finaliser spreads the low-entropy FNV output
    let mut z = h.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^= z >> 31;
    (z >> 11) as f64 / (1u64 << 53) as f64
}
