//! Constrained decoding over the optimized subword lattice: exact
//! shortest-path in the purely symbolic case, beam search with pluggable
//! external scorers otherwise.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{FstError, Result};
use crate::fst::Wfst;
use crate::ngram::NGramModel;
use crate::shortest::shortest_path;
use crate::subword::desegment;
use crate::symbols::{is_marker, Label};
use crate::weight::Weight;

/// Opaque scorer state: each scorer encodes whatever it needs as a label
/// vector. Hypotheses recombine on equal states.
pub type ScorerState = Vec<Label>;

/// External sequence model interface: log-probabilities over subword
/// tokens. Implementations must be deterministic.
pub trait Scorer: Send + Sync {
    fn name(&self) -> &str;
    fn init(&self) -> ScorerState;
    /// Extends the state with one token, returning the new state and the
    /// token's log-probability contribution.
    fn extend(&self, state: &ScorerState, token: Label) -> (ScorerState, f64);
    /// End-of-sequence log-probability.
    fn finish(&self, state: &ScorerState) -> f64;
}

/// Scores every token and the end of sequence at log-probability 0.
pub struct UniformScorer;

impl Scorer for UniformScorer {
    fn name(&self) -> &str {
        "uniform"
    }
    fn init(&self) -> ScorerState {
        Vec::new()
    }
    fn extend(&self, _state: &ScorerState, _token: Label) -> (ScorerState, f64) {
        (Vec::new(), 0.0)
    }
    fn finish(&self, _state: &ScorerState) -> f64 {
        0.0
    }
}

/// Adapts an n-gram model to the scorer interface over subword tokens;
/// serves as the neural-LM stand-in at desk scale. Marker tokens score 0.
pub struct NgramScorer {
    model: NGramModel,
    syms: crate::fst::SharedTable,
}

impl NgramScorer {
    pub fn new(model: NGramModel, syms: crate::fst::SharedTable) -> Self {
        NgramScorer { model, syms }
    }

    fn context_text(&self, state: &ScorerState) -> Vec<String> {
        state
            .iter()
            .filter_map(|&l| self.syms.sym(l))
            .map(str::to_string)
            .collect()
    }
}

impl Scorer for NgramScorer {
    fn name(&self) -> &str {
        "ngram"
    }
    fn init(&self) -> ScorerState {
        Vec::new()
    }
    fn extend(&self, state: &ScorerState, token: Label) -> (ScorerState, f64) {
        if is_marker(token) {
            return (state.clone(), 0.0);
        }
        let prefix: Vec<String> = self.context_text(state);
        let mut sent: Vec<&str> = prefix.iter().map(String::as_str).collect();
        let before = self.model.logprob_prefix(&sent);
        let tok_text = self.syms.sym(token).unwrap_or("<unk>").to_string();
        sent.push(&tok_text);
        let after = self.model.logprob_prefix(&sent);
        let mut next = state.clone();
        next.push(token);
        let keep = self.model.order.saturating_sub(1);
        if next.len() > keep {
            let excess = next.len() - keep;
            next.drain(..excess);
        }
        (next, after - before)
    }
    fn finish(&self, state: &ScorerState) -> f64 {
        let prefix = self.context_text(state);
        let sent: Vec<&str> = prefix.iter().map(String::as_str).collect();
        self.model.logprob(&sent) - self.model.logprob_prefix(&sent)
    }
}

/// Replays fixed scores keyed by token-id prefix; used for deterministic
/// integration tests. Missing prefixes score 0.
pub struct FileScorer {
    /// token prefix → log-probability of the last extension
    pub scores: HashMap<Vec<Label>, f64>,
    /// prefix → end-of-sequence log-probability
    pub finish_scores: HashMap<Vec<Label>, f64>,
}

impl FileScorer {
    pub fn new(scores: HashMap<Vec<Label>, f64>, finish_scores: HashMap<Vec<Label>, f64>) -> Self {
        FileScorer {
            scores,
            finish_scores,
        }
    }

    /// Parses "tok1 tok2 ... ||| score" lines; a trailing `</s>` token
    /// marks an end-of-sequence score for the preceding prefix.
    pub fn read<R: std::io::BufRead>(r: R, syms: &crate::fst::SharedTable) -> Result<Self> {
        let mut scores = HashMap::new();
        let mut finish_scores = HashMap::new();
        for (idx, line) in r.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (toks, score) = line.rsplit_once("|||").ok_or_else(|| FstError::Parse {
                line: idx + 1,
                msg: "expected 'tokens ||| score'".into(),
            })?;
            let score: f64 = score.trim().parse().map_err(|_| FstError::Parse {
                line: idx + 1,
                msg: "bad score".into(),
            })?;
            let mut tokens: Vec<&str> = toks.split_whitespace().collect();
            let is_finish = tokens.last() == Some(&"</s>");
            if is_finish {
                tokens.pop();
            }
            let ids: Vec<Label> = tokens
                .iter()
                .map(|t| {
                    syms.get(t).ok_or_else(|| FstError::Parse {
                        line: idx + 1,
                        msg: format!("unknown token {:?}", t),
                    })
                })
                .collect::<Result<_>>()?;
            if is_finish {
                finish_scores.insert(ids, score);
            } else {
                scores.insert(ids, score);
            }
        }
        Ok(FileScorer {
            scores,
            finish_scores,
        })
    }
}

impl Scorer for FileScorer {
    fn name(&self) -> &str {
        "file"
    }
    fn init(&self) -> ScorerState {
        Vec::new()
    }
    fn extend(&self, state: &ScorerState, token: Label) -> (ScorerState, f64) {
        let mut next = state.clone();
        next.push(token);
        let score = self.scores.get(&next).copied().unwrap_or(0.0);
        (next, score)
    }
    fn finish(&self, state: &ScorerState) -> f64 {
        self.finish_scores.get(state).copied().unwrap_or(0.0)
    }
}

/// A beam item: lattice state, per-scorer states, emitted tokens, and the
/// accumulated component scores.
#[derive(Debug, Clone)]
pub struct Hypothesis {
    pub fst_state: usize,
    pub scorer_states: Vec<ScorerState>,
    pub tokens: Vec<Label>,
    pub fst_cost: f64,
    pub scorer_logprobs: Vec<f64>,
}

impl Hypothesis {
    fn combined(&self, lambdas: &[f64]) -> f64 {
        let mut score = -self.fst_cost;
        for (lp, l) in self.scorer_logprobs.iter().zip(lambdas) {
            score += l * lp;
        }
        score
    }
}

/// Decode result: token sequence, combined score, and the component
/// breakdown (lattice cost plus per-scorer log-probabilities).
#[derive(Debug, Clone)]
pub struct DecodeResult {
    pub tokens: Vec<Label>,
    pub combined_score: f64,
    pub fst_cost: f64,
    pub scorer_logprobs: Vec<f64>,
}

/// Time-synchronous beam search constrained by `h`. At each step a
/// hypothesis only extends with tokens that have arcs from its lattice
/// state; completion happens at final states only. With no scorers and a
/// beam at least the state count, this is exact shortest-path search.
pub fn beam_decode(
    h: &Wfst,
    scorers: &[(&dyn Scorer, f64)],
    beam: usize,
    mut trace: Option<&mut String>,
) -> Result<DecodeResult> {
    if beam == 0 {
        return Err(FstError::Config("beam width must be at least 1".into()));
    }
    let start = h
        .start
        .ok_or_else(|| FstError::DecodeFailure("empty lattice".into()))?;
    let lambdas: Vec<f64> = scorers.iter().map(|(_, l)| *l).collect();
    let mut live = vec![Hypothesis {
        fst_state: start,
        scorer_states: scorers.iter().map(|(s, _)| s.init()).collect(),
        tokens: Vec::new(),
        fst_cost: 0.0,
        scorer_logprobs: vec![0.0; scorers.len()],
    }];
    let mut best: Option<(f64, Hypothesis)> = None;
    let mut step = 0usize;
    // acyclic lattices terminate on their own; the cap guards cyclic input
    let max_steps = h.num_states().max(4) * 4 + 16;

    while !live.is_empty() && step <= max_steps {
        // completions
        for hyp in &live {
            let fw = h.final_weight(hyp.fst_state);
            if fw.is_zero() {
                continue;
            }
            let mut total = hyp.combined(&lambdas) - fw.value();
            let mut lps = hyp.scorer_logprobs.clone();
            for (i, (s, l)) in scorers.iter().enumerate() {
                let f = s.finish(&hyp.scorer_states[i]);
                lps[i] += f;
                total += l * f;
            }
            let better = match &best {
                None => true,
                Some((b, bh)) => {
                    total > *b + 1e-12 || ((total - *b).abs() <= 1e-12 && hyp.tokens < bh.tokens)
                }
            };
            if better {
                let mut done = hyp.clone();
                done.fst_cost += fw.value();
                done.scorer_logprobs = lps;
                best = Some((total, done));
            }
        }
        // expansions
        let mut next: Vec<Hypothesis> = Vec::new();
        for hyp in &live {
            for arc in &h.arcs[hyp.fst_state] {
                let mut scorer_states = Vec::with_capacity(scorers.len());
                let mut lps = hyp.scorer_logprobs.clone();
                for (i, (s, _)) in scorers.iter().enumerate() {
                    let (st, lp) = s.extend(&hyp.scorer_states[i], arc.ilabel);
                    scorer_states.push(st);
                    lps[i] += lp;
                }
                let mut tokens = hyp.tokens.clone();
                tokens.push(arc.ilabel);
                next.push(Hypothesis {
                    fst_state: arc.next_state,
                    scorer_states,
                    tokens,
                    fst_cost: hyp.fst_cost + arc.weight.value(),
                    scorer_logprobs: lps,
                });
            }
        }
        // recombination: same lattice state and scorer states ⇒ keep best
        let mut by_key: HashMap<(usize, Vec<ScorerState>), Hypothesis> = HashMap::new();
        for hyp in next {
            let key = (hyp.fst_state, hyp.scorer_states.clone());
            match by_key.get(&key) {
                Some(old) => {
                    let (new_s, old_s) = (hyp.combined(&lambdas), old.combined(&lambdas));
                    if new_s > old_s + 1e-12
                        || ((new_s - old_s).abs() <= 1e-12 && hyp.tokens < old.tokens)
                    {
                        by_key.insert(key, hyp);
                    }
                }
                None => {
                    by_key.insert(key, hyp);
                }
            }
        }
        let mut pruned: Vec<Hypothesis> = by_key.into_values().collect();
        pruned.sort_by(|a, b| {
            b.combined(&lambdas)
                .partial_cmp(&a.combined(&lambdas))
                .unwrap_or(std::cmp::Ordering::Equal)
                .then_with(|| a.tokens.cmp(&b.tokens))
        });
        pruned.truncate(beam);
        if let Some(t) = trace.as_deref_mut() {
            let _ = writeln!(t, "step {}: {} live hypotheses", step, pruned.len());
            for hyp in &pruned {
                let toks: Vec<&str> = hyp
                    .tokens
                    .iter()
                    .map(|&l| h.isyms.sym(l).unwrap_or("?"))
                    .collect();
                let _ = writeln!(
                    t,
                    "  [{:.4}] state={} {}",
                    hyp.combined(&lambdas),
                    hyp.fst_state,
                    toks.join(" ")
                );
            }
        }
        live = pruned;
        step += 1;
    }

    let (score, hyp) = best.ok_or_else(|| {
        FstError::DecodeFailure("no hypothesis reached a final state".into())
    })?;
    Ok(DecodeResult {
        tokens: hyp.tokens,
        combined_score: score,
        fst_cost: hyp.fst_cost,
        scorer_logprobs: hyp.scorer_logprobs,
    })
}

/// Exact shortest-path decoding of the word-level lattice; returns the
/// marker-stripped sentence and its lattice weight.
pub fn exact_decode(h_word: &Wfst) -> Result<(Vec<String>, Weight)> {
    let paths = shortest_path(h_word, 1);
    let (labels, weight) = paths
        .into_iter()
        .next()
        .ok_or_else(|| FstError::DecodeFailure("empty lattice language".into()))?;
    let words = labels
        .iter()
        .filter(|&&l| !is_marker(l))
        .map(|&l| h_word.isyms.sym(l).unwrap_or("<unk>").to_string())
        .collect();
    Ok((words, weight))
}

/// Turns a decode over subword tokens back into a word sentence: drops
/// markers, then joins continuation pieces.
pub fn tokens_to_sentence(h: &Wfst, tokens: &[Label]) -> Result<Vec<String>> {
    let pieces: Vec<&str> = tokens
        .iter()
        .filter(|&&l| !is_marker(l))
        .filter_map(|&l| h.isyms.sym(l))
        .collect();
    desegment(&pieces)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fst::{build_linear, union, SharedTable};
    use crate::symbols::SymbolTable;

    fn table(words: &[&str]) -> SharedTable {
        let mut t = SymbolTable::new();
        for w in words {
            t.intern(w);
        }
        std::sync::Arc::new(t)
    }

    fn three_path_lattice(syms: &SharedTable) -> Wfst {
        let ids = |ts: &[&str]| -> Vec<Label> { ts.iter().map(|t| syms.get(t).unwrap()).collect() };
        crate::optimize::optimize(
            &union(&[
                build_linear(syms, &ids(&["a", "x"]), Weight::new(1.0)),
                build_linear(syms, &ids(&["a", "y"]), Weight::new(2.0)),
                build_linear(syms, &ids(&["b", "x"]), Weight::new(3.0)),
            ])
            .unwrap(),
            Default::default(),
        )
        .unwrap()
    }

    #[test]
    fn no_scorers_wide_beam_matches_shortest_path() {
        let syms = table(&["a", "b", "x", "y"]);
        let h = three_path_lattice(&syms);
        let sp = shortest_path(&h, 1);
        let res = beam_decode(&h, &[], h.num_states().max(1), None).unwrap();
        assert_eq!(res.tokens, sp[0].0);
        assert!((res.fst_cost - sp[0].1.value()).abs() < 1e-9);
    }

    #[test]
    fn zero_lambda_scorer_is_inert() {
        let syms = table(&["a", "b", "x", "y"]);
        let h = three_path_lattice(&syms);
        let uniform = UniformScorer;
        let with = beam_decode(&h, &[(&uniform, 0.0)], 16, None).unwrap();
        let without = beam_decode(&h, &[], 16, None).unwrap();
        assert_eq!(with.tokens, without.tokens);
        assert!((with.combined_score - without.combined_score).abs() < 1e-9);
    }

    #[test]
    fn strong_scorer_overrides_lattice_cost() {
        let syms = table(&["a", "b", "x", "y"]);
        let h = three_path_lattice(&syms);
        // prefer the most expensive lattice path "b x"
        let b = syms.get("b").unwrap();
        let mut scores = HashMap::new();
        scores.insert(vec![b], 0.0);
        let a = syms.get("a").unwrap();
        scores.insert(vec![a], -5.0);
        let scorer = FileScorer::new(scores, HashMap::new());
        let res = beam_decode(&h, &[(&scorer, 100.0)], 16, None).unwrap();
        let x = syms.get("x").unwrap();
        assert_eq!(res.tokens, vec![b, x]);
        // exhaustive check over the three paths
        let all = shortest_path(&h, 3);
        let best = all
            .iter()
            .map(|(toks, w)| {
                let mut lp = 0.0;
                let mut state = scorer.init();
                for &t in toks {
                    let (s, p) = scorer.extend(&state, t);
                    state = s;
                    lp += p;
                }
                lp += scorer.finish(&state);
                (-w.value() + 100.0 * lp, toks.clone())
            })
            .max_by(|a, b| a.0.partial_cmp(&b.0).unwrap())
            .unwrap();
        assert_eq!(res.tokens, best.1);
        assert!((res.combined_score - best.0).abs() < 1e-9);
    }

    #[test]
    fn beam_zero_is_an_error() {
        let syms = table(&["a"]);
        let h = build_linear(&syms, &[syms.get("a").unwrap()], Weight::one());
        assert!(matches!(
            beam_decode(&h, &[], 0, None),
            Err(FstError::Config(_))
        ));
    }

    #[test]
    fn no_final_state_is_a_decode_failure() {
        let syms = table(&["a"]);
        let mut h = Wfst::acceptor(syms);
        let s = h.add_state();
        h.set_start(s);
        assert!(matches!(
            beam_decode(&h, &[], 4, None),
            Err(FstError::DecodeFailure(_))
        ));
    }

    #[test]
    fn exact_decode_strips_markers() {
        let syms = table(&["a", "b"]);
        let labels = vec![
            crate::symbols::CORR,
            syms.get("a").unwrap(),
            syms.get("b").unwrap(),
        ];
        let h = build_linear(&syms, &labels, Weight::new(0.5));
        let (words, w) = exact_decode(&h).unwrap();
        assert_eq!(words, vec!["a", "b"]);
        assert!(w.approx_eq(Weight::new(0.5), 1e-9));
    }

    #[test]
    fn wider_beam_never_scores_worse() {
        let syms = table(&["a", "b", "x", "y"]);
        let h = three_path_lattice(&syms);
        let a = syms.get("a").unwrap();
        let mut scores = HashMap::new();
        scores.insert(vec![a], -4.0);
        let scorer = FileScorer::new(scores, HashMap::new());
        let mut prev = f64::NEG_INFINITY;
        for beam in 1..=6 {
            let res = beam_decode(&h, &[(&scorer, 1.0)], beam, None).unwrap();
            assert!(res.combined_score >= prev - 1e-9, "beam {}", beam);
            prev = res.combined_score;
        }
    }
}
