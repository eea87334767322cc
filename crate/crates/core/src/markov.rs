//! Alphabets, observed sequences, transition counting and the maximum
//! likelihood transition matrix.
//!
//! An order-m chain over κ symbols is handled by [`embed_order`], which
//! rewrites the sequence as a first-order chain over overlapping m-tuples.
//! Composite state indices use a base-κ positional code in which the
//! newest symbol of the tuple is the most significant digit:
//! `index = Σ_k x_{t+k} κ^k` for `k = 0..m`, so `k = m-1` is the newest.

use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance used when validating caller-supplied distributions and rows.
/// Accepted inputs are renormalised so that the stored values sum to one.
pub const INPUT_TOLERANCE: f64 = 1e-9;

/// Count tables over more composite states than this are stored sparsely.
pub const DENSE_LIMIT: usize = 1024;

/// Ordered set of distinct symbol labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<String>,
    index: HashMap<String, u32>,
}

impl Alphabet {
    pub fn new<I, S>(symbols: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        if symbols.is_empty() {
            return Err(Error::InvalidAlphabet("alphabet must contain at least one symbol".into()));
        }
        if symbols.len() > u32::MAX as usize {
            return Err(Error::InvalidAlphabet("too many symbols".into()));
        }
        let mut index = HashMap::with_capacity(symbols.len());
        for (i, s) in symbols.iter().enumerate() {
            if index.insert(s.clone(), i as u32).is_some() {
                return Err(Error::InvalidAlphabet(format!("duplicate symbol {s:?}")));
            }
        }
        Ok(Self { symbols, index })
    }

    /// Sorted distinct tokens.
    pub fn infer<'a, I>(tokens: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut distinct: Vec<&str> = tokens.into_iter().collect();
        distinct.sort_unstable();
        distinct.dedup();
        Self::new(distinct)
    }

    /// Symbols labelled `"0"`, `"1"`, … `"κ-1"`.
    pub fn numbered(kappa: usize) -> Result<Self> {
        Self::new((0..kappa).map(|i| i.to_string()))
    }

    pub fn kappa(&self) -> usize {
        self.symbols.len()
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn symbol(&self, state: u32) -> Option<&str> {
        self.symbols.get(state as usize).map(String::as_str)
    }

    pub fn index_of(&self, symbol: &str) -> Option<u32> {
        self.index.get(symbol).copied()
    }

    /// Map tokens to state indices. Unknown tokens are an error.
    pub fn encode<'a, I>(&self, tokens: I) -> Result<Sequence>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let states = tokens
            .into_iter()
            .map(|t| {
                self.index_of(t)
                    .ok_or_else(|| Error::InvalidAlphabet(format!("token {t:?} is not in the alphabet")))
            })
            .collect::<Result<Vec<_>>>()?;
        Sequence::new(states, self.kappa())
    }

    pub fn decode(&self, seq: &Sequence) -> Vec<&str> {
        seq.states().iter().map(|&s| self.symbols[s as usize].as_str()).collect()
    }
}

/// An observed realisation `x_0 … x_T` as state indices in `[0, κ)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Sequence {
    states: Vec<u32>,
    kappa: usize,
}

impl Sequence {
    pub fn new(states: Vec<u32>, kappa: usize) -> Result<Self> {
        if kappa == 0 {
            return Err(Error::InvalidAlphabet("alphabet must contain at least one symbol".into()));
        }
        if states.is_empty() {
            return Err(Error::TooShort("a sequence needs at least one observation".into()));
        }
        if let Some(&bad) = states.iter().find(|&&s| s as usize >= kappa) {
            return Err(Error::StateOutOfRange { state: bad as usize, kappa });
        }
        Ok(Self { states, kappa })
    }

    pub fn states(&self) -> &[u32] {
        &self.states
    }

    pub fn kappa(&self) -> usize {
        self.kappa
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// The first `len` observations.
    pub fn prefix(&self, len: usize) -> Result<Self> {
        if len == 0 || len > self.states.len() {
            return Err(Error::InvalidParameter(format!(
                "prefix length {len} outside 1..={}",
                self.states.len()
            )));
        }
        Ok(Self { states: self.states[..len].to_vec(), kappa: self.kappa })
    }

    pub fn into_states(self) -> Vec<u32> {
        self.states
    }
}

/// Bijection between ordered m-tuples of base states and `[0, κ^m)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CompositeAlphabet {
    base: usize,
    order: usize,
    size: usize,
}

impl CompositeAlphabet {
    pub fn new(base: usize, order: usize) -> Result<Self> {
        if base == 0 {
            return Err(Error::InvalidAlphabet("base alphabet is empty".into()));
        }
        if order == 0 {
            return Err(Error::InvalidParameter("order must be at least 1".into()));
        }
        let size = u32::try_from(order)
            .ok()
            .and_then(|m| base.checked_pow(m))
            .filter(|&s| s <= u32::MAX as usize)
            .ok_or_else(|| {
                Error::InvalidParameter(format!("{base}^{order} composite states do not fit an index"))
            })?;
        Ok(Self { base, order, size })
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Encode a tuple given oldest symbol first.
    pub fn encode(&self, tuple: &[u32]) -> Result<u32> {
        if tuple.len() != self.order {
            return Err(Error::DimensionMismatch { expected: self.order, found: tuple.len() });
        }
        let mut index = 0usize;
        for &s in tuple.iter().rev() {
            if s as usize >= self.base {
                return Err(Error::StateOutOfRange { state: s as usize, kappa: self.base });
            }
            index = index * self.base + s as usize;
        }
        Ok(index as u32)
    }

    /// Decode to a tuple, oldest symbol first.
    pub fn decode(&self, index: u32) -> Result<Vec<u32>> {
        let mut rest = index as usize;
        if rest >= self.size {
            return Err(Error::StateOutOfRange { state: rest, kappa: self.size });
        }
        let mut tuple = Vec::with_capacity(self.order);
        for _ in 0..self.order {
            tuple.push((rest % self.base) as u32);
            rest /= self.base;
        }
        Ok(tuple)
    }

    /// Whether `to` can follow `from` in an embedded sequence: the newest
    /// m-1 symbols of `from` must be the oldest m-1 symbols of `to`.
    pub fn is_successor(&self, from: u32, to: u32) -> bool {
        let shift = self.size / self.base;
        from as usize / self.base == to as usize % shift
    }
}

/// A sequence re-expressed over overlapping m-tuples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Embedded {
    pub alphabet: CompositeAlphabet,
    pub sequence: Sequence,
}

/// Rewrite `seq` as a first-order chain over m-tuples. The t-th composite
/// state holds `(x_t, …, x_{t+m-1})`.
pub fn embed_order(seq: &Sequence, m: usize) -> Result<Embedded> {
    let alphabet = CompositeAlphabet::new(seq.kappa(), m)?;
    if seq.len() < m {
        return Err(Error::InsufficientLength { order: m, len: seq.len() });
    }
    let states = seq.states();
    let kappa = seq.kappa() as u64;
    let top = kappa.pow(m as u32 - 1);
    let mut index = alphabet.encode(&states[..m])? as u64;
    let mut out = Vec::with_capacity(states.len() - m + 1);
    out.push(index as u32);
    for &next in &states[m..] {
        index = index / kappa + next as u64 * top;
        out.push(index as u32);
    }
    Ok(Embedded {
        alphabet,
        sequence: Sequence { states: out, kappa: alphabet.size() },
    })
}

#[derive(Debug, Clone, PartialEq)]
enum CountStorage {
    Dense(Vec<u64>),
    Sparse(Vec<BTreeMap<u32, u64>>),
}

/// Table of one-step transition counts `n_ij` with row and grand totals.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionCounts {
    size: usize,
    storage: CountStorage,
    row_totals: Vec<u64>,
    grand_total: u64,
}

impl TransitionCounts {
    fn zeros(size: usize) -> Self {
        let storage = if size <= DENSE_LIMIT {
            CountStorage::Dense(vec![0; size * size])
        } else {
            CountStorage::Sparse(vec![BTreeMap::new(); size])
        };
        Self { size, storage, row_totals: vec![0; size], grand_total: 0 }
    }

    fn add(&mut self, from: usize, to: usize, n: u64) {
        match &mut self.storage {
            CountStorage::Dense(cells) => cells[from * self.size + to] += n,
            CountStorage::Sparse(rows) => *rows[from].entry(to as u32).or_insert(0) += n,
        }
        self.row_totals[from] += n;
        self.grand_total += n;
    }

    /// Build from an explicit square table.
    pub fn from_table(table: &[Vec<u64>]) -> Result<Self> {
        let size = table.len();
        if size == 0 {
            return Err(Error::InvalidMatrix("empty count table".into()));
        }
        let mut counts = Self::zeros(size);
        for (i, row) in table.iter().enumerate() {
            if row.len() != size {
                return Err(Error::DimensionMismatch { expected: size, found: row.len() });
            }
            for (j, &n) in row.iter().enumerate() {
                if n > 0 {
                    counts.add(i, j, n);
                }
            }
        }
        Ok(counts)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, from: usize, to: usize) -> u64 {
        match &self.storage {
            CountStorage::Dense(cells) => cells[from * self.size + to],
            CountStorage::Sparse(rows) => rows[from].get(&(to as u32)).copied().unwrap_or(0),
        }
    }

    pub fn row_total(&self, i: usize) -> u64 {
        self.row_totals[i]
    }

    pub fn row_totals(&self) -> &[u64] {
        &self.row_totals
    }

    pub fn grand_total(&self) -> u64 {
        self.grand_total
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self.storage, CountStorage::Sparse(_))
    }

    /// Nonzero `(j, n_ij)` entries of row `i` in column order.
    pub fn row_entries(&self, i: usize) -> Vec<(usize, u64)> {
        match &self.storage {
            CountStorage::Dense(cells) => cells[i * self.size..(i + 1) * self.size]
                .iter()
                .enumerate()
                .filter(|(_, &n)| n > 0)
                .map(|(j, &n)| (j, n))
                .collect(),
            CountStorage::Sparse(rows) => rows[i].iter().map(|(&j, &n)| (j as usize, n)).collect(),
        }
    }

    /// States that appear as either end of some counted transition.
    pub fn observed_states(&self) -> Vec<usize> {
        let mut seen = vec![false; self.size];
        for i in 0..self.size {
            if self.row_totals[i] > 0 {
                seen[i] = true;
                for (j, _) in self.row_entries(i) {
                    seen[j] = true;
                }
            }
        }
        (0..self.size).filter(|&i| seen[i]).collect()
    }

    /// Counts restricted to `states`, re-indexed in the given order. Any
    /// transition touching a dropped state is discarded.
    pub fn restrict(&self, states: &[usize]) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::EmptyCounts);
        }
        let mut position = vec![usize::MAX; self.size];
        for (k, &s) in states.iter().enumerate() {
            if s >= self.size {
                return Err(Error::StateOutOfRange { state: s, kappa: self.size });
            }
            position[s] = k;
        }
        let mut out = Self::zeros(states.len());
        for (k, &s) in states.iter().enumerate() {
            for (j, n) in self.row_entries(s) {
                if position[j] != usize::MAX {
                    out.add(k, position[j], n);
                }
            }
        }
        Ok(out)
    }
}

/// Count `n_ij`, the number of `t` with `x_{t-1} = i` and `x_t = j`.
pub fn count_transitions(seq: &Sequence) -> Result<TransitionCounts> {
    count_segments(std::slice::from_ref(seq))
}

/// Pool transition counts from several segments over the same state space.
/// Transitions across segment boundaries are not counted.
pub fn count_segments(segments: &[Sequence]) -> Result<TransitionCounts> {
    let size = segments.first().map(Sequence::kappa).ok_or(Error::NoTransitions)?;
    let mut counts = TransitionCounts::zeros(size);
    for seg in segments {
        if seg.kappa() != size {
            return Err(Error::DimensionMismatch { expected: size, found: seg.kappa() });
        }
        for w in seg.states().windows(2) {
            counts.add(w[0] as usize, w[1] as usize, 1);
        }
    }
    if counts.grand_total == 0 {
        return Err(Error::NoTransitions);
    }
    Ok(counts)
}

/// Row-stochastic matrix stored as sparse rows. Rows never observed in the
/// data that produced the matrix are flagged undefined and hold no entries.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    size: usize,
    rows: Vec<Vec<(u32, f64)>>,
    defined: Vec<bool>,
}

impl TransitionMatrix {
    /// Dense rows; each must be a probability distribution.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let size = rows.len();
        if size == 0 {
            return Err(Error::InvalidMatrix("matrix has no rows".into()));
        }
        let mut sparse = Vec::with_capacity(size);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != size {
                return Err(Error::DimensionMismatch { expected: size, found: row.len() });
            }
            if row.iter().any(|p| !p.is_finite() || *p < 0.0 || *p > 1.0 + INPUT_TOLERANCE) {
                return Err(Error::InvalidMatrix(format!("row {i} has an entry outside [0, 1]")));
            }
            let total: f64 = row.iter().sum();
            if (total - 1.0).abs() > INPUT_TOLERANCE {
                return Err(Error::InvalidMatrix(format!("row {i} sums to {total}, not 1")));
            }
            sparse.push(
                row.iter()
                    .enumerate()
                    .filter(|(_, &p)| p > 0.0)
                    .map(|(j, &p)| (j as u32, p / total))
                    .collect(),
            );
        }
        Ok(Self { size, rows: sparse, defined: vec![true; size] })
    }

    /// Maximum likelihood estimate `n_ij / n_{i+}` on rows with `n_{i+} > 0`.
    pub fn mle(counts: &TransitionCounts) -> Result<Self> {
        if counts.grand_total() == 0 {
            return Err(Error::EmptyCounts);
        }
        let size = counts.size();
        let mut rows = Vec::with_capacity(size);
        let mut defined = Vec::with_capacity(size);
        for i in 0..size {
            let total = counts.row_total(i);
            defined.push(total > 0);
            rows.push(
                counts
                    .row_entries(i)
                    .into_iter()
                    .map(|(j, n)| (j as u32, n as f64 / total as f64))
                    .collect(),
            );
        }
        Ok(Self { size, rows, defined })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, from: usize, to: usize) -> f64 {
        let row = &self.rows[from];
        row.binary_search_by_key(&(to as u32), |&(j, _)| j)
            .map(|k| row[k].1)
            .unwrap_or(0.0)
    }

    /// Nonzero entries of a row.
    pub fn row(&self, i: usize) -> &[(u32, f64)] {
        &self.rows[i]
    }

    pub fn is_defined(&self, i: usize) -> bool {
        self.defined[i]
    }

    pub fn undefined_rows(&self) -> Vec<usize> {
        (0..self.size).filter(|&i| !self.defined[i]).collect()
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        (0..self.size)
            .map(|i| {
                let mut row = vec![0.0; self.size];
                for &(j, p) in &self.rows[i] {
                    row[j as usize] = p;
                }
                row
            })
            .collect()
    }

    /// Row vector times matrix, `v P`.
    pub fn left_multiply(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.size];
        for (i, &w) in v.iter().enumerate() {
            if w != 0.0 {
                for &(j, p) in &self.rows[i] {
                    out[j as usize] += w * p;
                }
            }
        }
        out
    }

    /// Why the chain is not irreducible, or `None` if it is.
    pub fn reducibility(&self) -> Option<String> {
        let undefined = self.undefined_rows();
        if !undefined.is_empty() {
            return Some(format!("states {undefined:?} have no observed outgoing transitions"));
        }
        let forward = reachable(self.size, |i| self.rows[i].iter().map(|&(j, _)| j as usize).collect());
        let mut reverse: Vec<Vec<usize>> = vec![Vec::new(); self.size];
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, _) in row {
                reverse[j as usize].push(i);
            }
        }
        let backward = reachable(self.size, |i| reverse[i].clone());
        let cut: Vec<usize> = (0..self.size).filter(|&i| !forward[i] || !backward[i]).collect();
        if cut.is_empty() {
            None
        } else {
            Some(format!("states {cut:?} do not communicate with state 0"))
        }
    }

    pub fn is_irreducible(&self) -> bool {
        self.reducibility().is_none()
    }
}

fn reachable(size: usize, edges: impl Fn(usize) -> Vec<usize>) -> Vec<bool> {
    let mut seen = vec![false; size];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    while let Some(i) = queue.pop_front() {
        for j in edges(i) {
            if !seen[j] {
                seen[j] = true;
                queue.push_back(j);
            }
        }
    }
    seen
}

/// Strong connectivity of the graph with an edge wherever `P_ij > 0`.
/// Matrices with undefined rows are never irreducible.
pub fn is_irreducible(p: &TransitionMatrix) -> bool {
    p.is_irreducible()
}

/// A distribution over states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ProbabilityVector {
    probs: Vec<f64>,
}

impl ProbabilityVector {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidDistribution("empty vector".into()));
        }
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::InvalidDistribution("entries must be finite and nonnegative".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > INPUT_TOLERANCE {
            return Err(Error::InvalidDistribution(format!("entries sum to {total}, not 1")));
        }
        Ok(Self { probs: probs.into_iter().map(|p| p / total).collect() })
    }

    /// Normalise nonnegative weights.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total.is_finite() && total > 0.0) || weights.iter().any(|w| *w < 0.0) {
            return Err(Error::InvalidDistribution("weights must be nonnegative with a positive sum".into()));
        }
        Ok(Self { probs: weights.into_iter().map(|w| w / total).collect() })
    }

    pub fn uniform(len: usize) -> Result<Self> {
        Self::from_weights(vec![1.0; len])
    }

    pub fn point_mass(len: usize, state: usize) -> Result<Self> {
        if state >= len {
            return Err(Error::StateOutOfRange { state, kappa: len });
        }
        let mut probs = vec![0.0; len];
        probs[state] = 1.0;
        Ok(Self { probs })
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn get(&self, i: usize) -> f64 {
        self.probs[i]
    }
}

impl TryFrom<Vec<f64>> for ProbabilityVector {
    type Error = Error;

    fn try_from(probs: Vec<f64>) -> Result<Self> {
        Self::new(probs)
    }
}

impl From<ProbabilityVector> for Vec<f64> {
    fn from(v: ProbabilityVector) -> Self {
        v.probs
    }
}
