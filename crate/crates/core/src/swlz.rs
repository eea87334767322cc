//! Sliding-window Lempel-Ziv match lengths and the expanding-window
//! entropy-rate estimator.
//!
//! `Λ_i` is the length of the shortest substring starting at `i` that does
//! not occur anywhere in the history `x_0 … x_{i-1}`. The history is indexed
//! by a suffix automaton that grows one symbol at a time, so each `Λ_i` costs
//! `O(Λ_i)` transitions.
//!
//! Near the end of a sequence the whole remaining suffix may already occur
//! in the history. `Λ_i` is then reported as the suffix length plus one and
//! the position is marked capped: novelty would need at least one more
//! symbol.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::{EntropyEstimate, Method};
use crate::markov::Sequence;

const NONE: u32 = u32::MAX;

#[derive(Debug, Clone)]
struct Node {
    len: usize,
    link: u32,
    next: Vec<(u32, u32)>,
}

impl Node {
    fn step(&self, symbol: u32) -> Option<u32> {
        self.next.iter().find(|&&(c, _)| c == symbol).map(|&(_, t)| t)
    }

    fn set(&mut self, symbol: u32, target: u32) {
        match self.next.iter_mut().find(|(c, _)| *c == symbol) {
            Some(slot) => slot.1 = target,
            None => self.next.push((symbol, target)),
        }
    }
}

/// Online suffix automaton: after `extend`ing with `x_0 … x_{k-1}` it
/// accepts exactly the substrings of that prefix.
#[derive(Debug, Clone)]
pub struct SuffixAutomaton {
    nodes: Vec<Node>,
    last: u32,
}

impl Default for SuffixAutomaton {
    fn default() -> Self {
        Self::new()
    }
}

impl SuffixAutomaton {
    pub fn new() -> Self {
        Self { nodes: vec![Node { len: 0, link: NONE, next: Vec::new() }], last: 0 }
    }

    pub fn with_text(text: &[u32]) -> Self {
        let mut sam = Self::new();
        sam.nodes.reserve(2 * text.len());
        for &c in text {
            sam.extend(c);
        }
        sam
    }

    pub fn extend(&mut self, c: u32) {
        let cur = self.nodes.len() as u32;
        let len = self.nodes[self.last as usize].len + 1;
        self.nodes.push(Node { len, link: NONE, next: Vec::new() });
        let mut p = self.last;
        while p != NONE && self.nodes[p as usize].step(c).is_none() {
            self.nodes[p as usize].set(c, cur);
            p = self.nodes[p as usize].link;
        }
        if p == NONE {
            self.nodes[cur as usize].link = 0;
        } else {
            let q = self.nodes[p as usize].step(c).expect("transition exists");
            if self.nodes[p as usize].len + 1 == self.nodes[q as usize].len {
                self.nodes[cur as usize].link = q;
            } else {
                let clone = self.nodes.len() as u32;
                let mut node = self.nodes[q as usize].clone();
                node.len = self.nodes[p as usize].len + 1;
                self.nodes.push(node);
                while p != NONE && self.nodes[p as usize].step(c) == Some(q) {
                    self.nodes[p as usize].set(c, clone);
                    p = self.nodes[p as usize].link;
                }
                self.nodes[q as usize].link = clone;
                self.nodes[cur as usize].link = clone;
            }
        }
        self.last = cur;
    }

    /// Length of the longest prefix of `text` that is a substring of the
    /// indexed history.
    pub fn longest_prefix_match(&self, text: &[u32]) -> usize {
        let mut state = 0u32;
        for (k, &c) in text.iter().enumerate() {
            match self.nodes[state as usize].step(c) {
                Some(next) => state = next,
                None => return k,
            }
        }
        text.len()
    }
}

/// Shortest prefix of `text` that does not occur in `history`, as
/// `(length, capped)`. When all of `text` occurs the result is
/// `(text.len() + 1, true)`.
pub fn novel_length(history: &[u32], text: &[u32]) -> (usize, bool) {
    resolve(SuffixAutomaton::with_text(history).longest_prefix_match(text), text.len())
}

fn resolve(matched: usize, available: usize) -> (usize, bool) {
    if matched == available {
        (available + 1, true)
    } else {
        (matched + 1, false)
    }
}

/// `Λ_i` against the history `x_0 … x_{i-1}`, for `1 ≤ i ≤ n-1`.
pub fn lambda_at(seq: &Sequence, i: usize) -> Result<(usize, bool)> {
    let s = seq.states();
    if i == 0 {
        return Err(Error::InvalidParameter("Λ_0 is undefined: the history is empty".into()));
    }
    if i >= s.len() {
        return Err(Error::InvalidParameter(format!(
            "position {i} outside 1..{} for a sequence of length {}",
            s.len(),
            s.len()
        )));
    }
    Ok(novel_length(&s[..i], &s[i..]))
}

/// `Λ_i` for every `i = 1 … n-1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchLengths {
    /// `lambdas[k]` is `Λ_{k+1}`.
    pub lambdas: Vec<usize>,
    pub capped: Vec<bool>,
}

impl MatchLengths {
    /// `Λ_i` for position `i ≥ 1`.
    pub fn get(&self, i: usize) -> Option<(usize, bool)> {
        let k = i.checked_sub(1)?;
        Some((*self.lambdas.get(k)?, self.capped[k]))
    }

    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    pub fn sum(&self) -> usize {
        self.lambdas.iter().sum()
    }
}

pub fn match_lengths(seq: &Sequence) -> MatchLengths {
    let s = seq.states();
    let n = s.len();
    let mut out = MatchLengths {
        lambdas: Vec::with_capacity(n.saturating_sub(1)),
        capped: Vec::with_capacity(n.saturating_sub(1)),
    };
    let mut sam = SuffixAutomaton::new();
    sam.nodes.reserve(2 * n);
    for i in 0..n {
        if i > 0 {
            let (lambda, capped) = resolve(sam.longest_prefix_match(&s[i..]), n - i);
            out.lambdas.push(lambda);
            out.capped.push(capped);
        }
        sam.extend(s[i]);
    }
    out
}

/// One phrase of a parsing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Phrase {
    pub start: usize,
    pub len: usize,
    /// False only for a final phrase that already occurs in its history.
    pub novel: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Parsing {
    pub phrases: Vec<Phrase>,
}

impl Parsing {
    /// The phrases as slices of `states`.
    pub fn slices<'a, T>(&self, states: &'a [T]) -> Vec<&'a [T]> {
        self.phrases.iter().map(|p| &states[p.start..p.start + p.len]).collect()
    }
}

/// Greedy sequential parsing: from position `p`, emit the shortest substring
/// not contained in `x_0 … x_{p-1}` and continue after it.
pub fn swlz_parse(seq: &Sequence) -> Parsing {
    let s = seq.states();
    let n = s.len();
    let mut sam = SuffixAutomaton::new();
    let mut phrases = Vec::new();
    let mut p = 0;
    while p < n {
        let (len, novel) = if p == 0 {
            (1, true)
        } else {
            match resolve(sam.longest_prefix_match(&s[p..]), n - p) {
                (_, true) => (n - p, false),
                (len, false) => (len, true),
            }
        };
        phrases.push(Phrase { start: p, len, novel });
        for &c in &s[p..p + len] {
            sam.extend(c);
        }
        p += len;
    }
    Parsing { phrases }
}

/// `log₂ n / mean(Λ_i)`, averaging over `i = 1 … n-1`.
pub fn swlz_entropy(seq: &Sequence) -> Result<EntropyEstimate> {
    let n = seq.len();
    if n < 2 {
        return Err(Error::TooShort("the Lempel-Ziv estimator needs at least two observations".into()));
    }
    let lengths = match_lengths(seq);
    let mean = lengths.sum() as f64 / lengths.len() as f64;
    let mut warnings = Vec::new();
    let capped = lengths.capped.iter().filter(|&&c| c).count();
    if capped * 2 > lengths.len() {
        warnings.push(format!(
            "{capped} of {} match lengths reached the end of the sequence",
            lengths.len()
        ));
    }
    Ok(EntropyEstimate {
        value: (n as f64).log2() / mean,
        method: Method::Swlz,
        order: None,
        n_obs: n,
        irreducible: None,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;
    use crate::sim::{benchmark_matrix, simulate_chain, BenchmarkKind, Init};
    use proptest::prelude::*;
    use rand::Rng;

    /// Brute-force `Λ` for a candidate starting at `start` against
    /// `s[..history]`.
    fn naive(s: &[u32], history: usize, start: usize) -> (usize, bool) {
        let hist = &s[..history];
        for len in 1..=s.len() - start {
            let cand = &s[start..start + len];
            let found = cand.len() <= hist.len() && hist.windows(len).any(|w| w == cand);
            if !found {
                return (len, false);
            }
        }
        (s.len() - start + 1, true)
    }

    fn worked_example() -> Sequence {
        let states = "13131213232331313332".bytes().map(|b| (b - b'1') as u32).collect();
        Sequence::new(states, 3).unwrap()
    }

    #[test]
    fn lambda_examples() {
        let ab = Sequence::new(vec![0, 1, 0, 0], 2).unwrap();
        assert_eq!(lambda_at(&ab, 1).unwrap(), (1, false));
        assert_eq!(lambda_at(&worked_example(), 2).unwrap(), (3, false));
        let n = 9;
        let constant = Sequence::new(vec![2; n], 3).unwrap();
        for i in 1..n {
            let expected = if i < n - i { (i + 1, false) } else { (n - i + 1, true) };
            assert_eq!(lambda_at(&constant, i).unwrap(), expected);
        }
        assert!(lambda_at(&ab, 0).is_err());
        assert!(lambda_at(&ab, 4).is_err());
    }

    #[test]
    fn parses_worked_example() {
        let s = worked_example();
        let parsing = swlz_parse(&s);
        let text: Vec<String> = parsing
            .slices(s.states())
            .iter()
            .map(|p| p.iter().map(|x| (x + 1).to_string()).collect())
            .collect();
        assert_eq!(text, ["1", "3", "131", "2", "132", "323", "31313", "332"]);
        assert!(parsing.phrases.iter().all(|p| p.novel));
    }

    #[test]
    fn parse_small_cases() {
        let aaaa = Sequence::new(vec![0; 4], 1).unwrap();
        let p = swlz_parse(&aaaa);
        assert_eq!(
            p.phrases,
            vec![
                Phrase { start: 0, len: 1, novel: true },
                Phrase { start: 1, len: 2, novel: true },
                Phrase { start: 3, len: 1, novel: false }
            ]
        );
        let ab = Sequence::new(vec![0, 1], 2).unwrap();
        assert_eq!(swlz_parse(&ab).phrases.iter().map(|p| p.len).collect::<Vec<_>>(), [1, 1]);
        let single = Sequence::new(vec![0], 1).unwrap();
        assert_eq!(swlz_parse(&single).phrases.len(), 1);
    }

    #[test]
    fn alternating_entropy_matches_oracle() {
        let n = 1000;
        let s = Sequence::new((0..n).map(|i| (i % 2) as u32).collect(), 2).unwrap();
        let total: usize = (1..n).map(|i| naive(s.states(), i, i).0).sum();
        let oracle = (n as f64).log2() / (total as f64 / (n - 1) as f64);
        let e = swlz_entropy(&s).unwrap();
        assert!((e.value - oracle).abs() < 1e-12);
        assert!(e.value > 0.0 && e.value < 0.1, "{}", e.value);
        assert_eq!(e.method, Method::Swlz);
        assert_eq!(e.order, None);
    }

    #[test]
    fn uniform_is_biased_low() {
        let mut rng = substream(4, 0);
        let s = Sequence::new((0..1000).map(|_| rng.random_range(0..8u32)).collect(), 8).unwrap();
        assert!(swlz_entropy(&s).unwrap().value < 3.0);
    }

    #[test]
    fn sticky_chain_is_biased_high() {
        let p = benchmark_matrix(BenchmarkKind::Low, 8, 0.95).unwrap();
        let s = simulate_chain(&p, 250, Init::Stationary, &mut substream(8, 0)).unwrap();
        assert!(swlz_entropy(&s).unwrap().value > 0.4268);
    }

    #[test]
    fn too_short() {
        assert!(swlz_entropy(&Sequence::new(vec![0], 1).unwrap()).is_err());
    }

    #[test]
    fn ten_thousand_symbols_is_fast() {
        let mut rng = substream(1, 0);
        let s = Sequence::new((0..10_000).map(|_| rng.random_range(0..8u32)).collect(), 8).unwrap();
        let t = std::time::Instant::now();
        swlz_entropy(&s).unwrap();
        assert!(t.elapsed().as_secs_f64() < 5.0);
    }

    fn arb_sequence() -> impl Strategy<Value = Vec<u32>> {
        (1u32..5).prop_flat_map(|kappa| prop::collection::vec(0..kappa, 2..200))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(500))]

        #[test]
        fn match_lengths_equal_naive(s in arb_sequence()) {
            let seq = Sequence::new(s.clone(), 4).unwrap();
            let ml = match_lengths(&seq);
            prop_assert_eq!(ml.len(), s.len() - 1);
            for i in 1..s.len() {
                let (lambda, capped) = ml.get(i).unwrap();
                prop_assert_eq!((lambda, capped), naive(&s, i, i));
                prop_assert!(lambda >= 1 && lambda <= s.len() - i + 1);
            }
        }
    }

    proptest! {
        #[test]
        fn parsing_phrases_are_novel(s in arb_sequence()) {
            let seq = Sequence::new(s.clone(), 4).unwrap();
            let parsing = swlz_parse(&seq);
            let mut next = 0;
            for (k, ph) in parsing.phrases.iter().enumerate() {
                prop_assert_eq!(ph.start, next);
                prop_assert!(ph.len >= 1);
                next += ph.len;
                let phrase = &s[ph.start..ph.start + ph.len];
                let seen = s[..ph.start].windows(ph.len).any(|w| w == phrase);
                if k + 1 < parsing.phrases.len() {
                    prop_assert!(!seen);
                    prop_assert!(ph.novel);
                }
                prop_assert_eq!(ph.novel, !seen);
            }
            prop_assert_eq!(next, s.len());
            prop_assert_eq!(swlz_parse(&seq), parsing);
        }

        #[test]
        fn longer_history_never_shortens_lambda(s in arb_sequence()) {
            let i = s.len() - 1;
            let mut previous = 0;
            for h in 0..=i {
                let (lambda, _) = novel_length(&s[..h], &s[i..]);
                prop_assert_eq!(lambda, naive(&s, h, i).0);
                prop_assert!(lambda >= previous);
                previous = lambda;
            }
        }
    }
}
