//! Count-based backoff n-gram language model and its compilation to a
//! weighted acceptor with failure (or ε) backoff arcs.
//!
//! Smoothing is interpolated absolute discounting with a single discount.
//! Unknown words receive the singleton-type mass (floored at 1e-7) at the
//! unigram level; the remaining unigram distribution is rescaled so the
//! model stays normalized.

use std::collections::{BTreeMap, HashMap};
use std::io::BufRead;

use crate::error::{FstError, Result};
use crate::fst::{Arc, PhiMode, SharedTable, StateId, Wfst};
use crate::symbols::{Label, SymbolTable, CORR, MCORR, PHI, UNK};
use crate::weight::Weight;

pub const BOS: &str = "<s>";
pub const EOS: &str = "</s>";

/// Which label carries backoff transitions in the compiled acceptor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BackoffMode {
    /// Non-consuming failure arcs; scores match `logprob` exactly.
    #[default]
    Failure,
    /// ε arcs; over-generates, so compiled scores may undercut the exact
    /// backoff score.
    Epsilon,
}

/// Backoff n-gram model. N-grams are keyed by word strings; `<s>`/`</s>`
/// are implicit sentence boundary symbols.
#[derive(Debug, Clone)]
pub struct NGramModel {
    pub order: usize,
    pub discount: f64,
    /// (context, word) → natural-log probability.
    probs: HashMap<Vec<String>, HashMap<String, f64>>,
    /// context → natural-log backoff weight.
    backoffs: HashMap<Vec<String>, f64>,
    vocab: Vec<String>,
}

impl NGramModel {
    /// Trains on whitespace-pretokenized sentences.
    pub fn train(corpus: &[Vec<String>], order: usize, discount: f64) -> Result<Self> {
        if corpus.is_empty() || corpus.iter().all(|s| s.is_empty()) {
            return Err(FstError::Config("training corpus is empty".into()));
        }
        if !(discount > 0.0 && discount < 1.0) {
            return Err(FstError::Config("discount must lie in (0,1)".into()));
        }
        if order == 0 {
            return Err(FstError::Config("order must be at least 1".into()));
        }

        // n-gram counts per order; context counts derived as prefix sums
        let mut counts: Vec<BTreeMap<Vec<String>, u64>> = vec![BTreeMap::new(); order];
        for sent in corpus {
            let mut seq: Vec<String> = Vec::with_capacity(sent.len() + 2);
            seq.push(BOS.to_string());
            seq.extend(sent.iter().cloned());
            seq.push(EOS.to_string());
            for i in 1..seq.len() {
                for m in 1..=order.min(i + 1) {
                    let gram = seq[i + 1 - m..=i].to_vec();
                    *counts[m - 1].entry(gram).or_insert(0) += 1;
                }
            }
        }

        let mut ctx_counts: Vec<HashMap<Vec<String>, u64>> = vec![HashMap::new(); order];
        let mut ctx_types: Vec<HashMap<Vec<String>, u64>> = vec![HashMap::new(); order];
        for m in 2..=order {
            for (gram, c) in &counts[m - 1] {
                let ctx = gram[..m - 1].to_vec();
                *ctx_counts[m - 1].entry(ctx.clone()).or_insert(0) += c;
                *ctx_types[m - 1].entry(ctx).or_insert(0) += 1;
            }
        }

        // unigram distribution: unk takes the singleton-type mass, the
        // rest is absolute-discount interpolated with the uniform
        let total: u64 = counts[0].values().sum();
        let singleton_types = counts[0].values().filter(|&&c| c == 1).count() as f64;
        let p_unk = (singleton_types / total as f64).max(1e-7).min(0.5);
        let n_types = counts[0].len() as f64;
        let vocab_size = n_types + 1.0; // seen types (incl </s>) plus <unk>
        let mut vocab: Vec<String> = counts[0].keys().map(|g| g[0].clone()).collect();
        vocab.retain(|w| w != EOS);

        let mut probs: HashMap<Vec<String>, HashMap<String, f64>> = HashMap::new();
        let uni = probs.entry(Vec::new()).or_default();
        let scale = 1.0 - p_unk;
        let uniform = (discount * n_types / total as f64) / vocab_size;
        for (gram, &c) in &counts[0] {
            let p = ((c as f64 - discount).max(0.0) / total as f64) + uniform;
            uni.insert(gram[0].clone(), (scale * p).ln());
        }
        uni.insert(UNK_WORD.to_string(), (scale * uniform + p_unk).ln());

        let mut backoffs: HashMap<Vec<String>, f64> = HashMap::new();
        let mut model = NGramModel {
            order,
            discount,
            probs,
            backoffs: HashMap::new(),
            vocab,
        };
        // higher orders, shortest contexts first so lower levels exist
        for m in 2..=order {
            let mut level: HashMap<Vec<String>, HashMap<String, f64>> = HashMap::new();
            for (gram, &c) in &counts[m - 1] {
                let ctx = &gram[..m - 1];
                let word = &gram[m - 1];
                let c_ctx = ctx_counts[m - 1][ctx] as f64;
                let types = ctx_types[m - 1][ctx] as f64;
                let bow = discount * types / c_ctx;
                let lower = model.eval_ctx(&ctx[1..], word);
                let p = ((c as f64 - discount).max(0.0) / c_ctx) + bow * lower.exp();
                level.entry(ctx.to_vec()).or_default().insert(word.clone(), p.ln());
                backoffs.entry(ctx.to_vec()).or_insert_with(|| bow.ln());
            }
            for (ctx, words) in level {
                model.probs.insert(ctx, words);
            }
            model.backoffs = backoffs.clone();
        }
        model.backoffs = backoffs;
        Ok(model)
    }

    pub fn vocab(&self) -> &[String] {
        &self.vocab
    }

    // P(word | context) via the backoff chain; context words must already
    // be unk-mapped.
    fn eval_ctx(&self, context: &[String], word: &str) -> f64 {
        let mut logbo = 0.0;
        for k in (0..=context.len()).rev() {
            let ctx = &context[context.len() - k..];
            if let Some(words) = self.probs.get(ctx) {
                if let Some(&lp) = words.get(word) {
                    return logbo + lp;
                }
                if k > 0 {
                    logbo += self.backoffs.get(ctx).copied().unwrap_or(0.0);
                }
            }
            // unstored context: backoff weight 1 (log 0)
        }
        // word unseen even at the unigram level: score as <unk>
        logbo + self.probs[&Vec::new()][UNK_WORD]
    }

    fn to_model_word(&self, token: &str) -> String {
        if token == UNK_WORD || self.probs[&Vec::new()].contains_key(token) {
            token.to_string()
        } else {
            UNK_WORD.to_string()
        }
    }

    /// Natural-log probability of the sentence including the end-of-
    /// sentence event. Unknown tokens score as `<unk>`.
    pub fn logprob(&self, sentence: &[&str]) -> f64 {
        let mut hist: Vec<String> = vec![BOS.to_string()];
        let mut total = 0.0;
        let max_hist = self.order.saturating_sub(1);
        for tok in sentence.iter().map(|t| self.to_model_word(t)).chain([EOS.to_string()]) {
            total += self.eval_ctx(&hist, &tok);
            hist.push(tok);
            if hist.len() > max_hist {
                let excess = hist.len() - max_hist;
                hist.drain(..excess);
            }
        }
        total
    }

    /// Like `logprob` but without the end-of-sentence event.
    pub fn logprob_prefix(&self, prefix: &[&str]) -> f64 {
        let mut hist: Vec<String> = vec![BOS.to_string()];
        let mut total = 0.0;
        let max_hist = self.order.saturating_sub(1);
        for tok in prefix.iter().map(|t| self.to_model_word(t)) {
            total += self.eval_ctx(&hist, &tok);
            hist.push(tok);
            if hist.len() > max_hist {
                let excess = hist.len() - max_hist;
                hist.drain(..excess);
            }
        }
        total
    }

    /// Compiles the model into a weighted acceptor over `syms`. One state
    /// per stored context; word arcs carry `-λ·logP`, backoff arcs carry
    /// `-λ·log bow` on φ (failure mode) or ε; final weights are the exact
    /// end-of-sentence scores. Transparent symbols get zero-weight
    /// self-loops at every state. Words in `syms` outside the model vocab
    /// score as `<unk>` at the unigram state.
    pub fn to_fst(
        &self,
        syms: &SharedTable,
        lambda: f64,
        transparent: &[Label],
        mode: BackoffMode,
    ) -> Wfst {
        let mut fst = Wfst::acceptor(syms.clone());
        fst.phi_mode = match mode {
            BackoffMode::Failure => PhiMode::Failure,
            BackoffMode::Epsilon => PhiMode::Complement,
        };
        // state per stored context, created shortest-first so that
        // backoff targets exist
        let mut contexts: Vec<Vec<String>> = self.probs.keys().cloned().collect();
        contexts.sort();
        contexts.sort_by_key(|c| c.len());
        let mut state_of: HashMap<Vec<String>, StateId> = HashMap::new();
        for ctx in &contexts {
            let s = fst.add_state();
            state_of.insert(ctx.clone(), s);
        }
        let unigram = state_of[&Vec::new()];
        let start_ctx = vec![BOS.to_string()];
        let start = state_of.get(&start_ctx).copied().unwrap_or(unigram);
        fst.set_start(start);

        let backoff_label = match mode {
            BackoffMode::Failure => PHI,
            BackoffMode::Epsilon => crate::symbols::EPS,
        };
        for ctx in &contexts {
            let s = state_of[ctx];
            let words = &self.probs[ctx];
            let mut sorted: Vec<(&String, &f64)> = words.iter().collect();
            sorted.sort_by_key(|(w, _)| w.as_str());
            for (word, &lp) in sorted {
                if word == EOS {
                    continue;
                }
                let label = if word == UNK_WORD {
                    UNK
                } else {
                    match syms.get(word) {
                        Some(l) => l,
                        None => continue, // vocab word absent from the pipeline table
                    }
                };
                let next = self.next_state(&state_of, ctx, word);
                fst.add_arc(s, Arc::new(label, label, Weight::new(-lambda * lp), next));
            }
            if !ctx.is_empty() {
                let bow = self.backoffs.get(ctx).copied().unwrap_or(0.0);
                let target = self.backoff_state(&state_of, ctx);
                fst.add_arc(
                    s,
                    Arc::new(
                        backoff_label,
                        backoff_label,
                        Weight::new(-lambda * bow),
                        target,
                    ),
                );
            } else {
                // unigram state: out-of-vocabulary pipeline words score as <unk>
                let unk_lp = self.probs[&Vec::new()][UNK_WORD];
                for id in syms.user_ids() {
                    let text = syms.sym(id).unwrap();
                    if !words.contains_key(text) {
                        fst.add_arc(s, Arc::new(id, id, Weight::new(-lambda * unk_lp), unigram));
                    }
                }
            }
            // exact end-of-sentence weight through the backoff chain
            let eos = self.eval_ctx(ctx, EOS);
            fst.set_final(s, Weight::new(-lambda * eos));
            for &t in transparent {
                fst.add_arc(s, Arc::new(t, t, Weight::one(), s));
            }
        }
        fst
    }

    fn next_state(
        &self,
        state_of: &HashMap<Vec<String>, StateId>,
        ctx: &[String],
        word: &str,
    ) -> StateId {
        let mut extended: Vec<String> = ctx.to_vec();
        extended.push(word.to_string());
        if extended.len() > self.order - 1 {
            let excess = extended.len() - (self.order - 1);
            extended.drain(..excess);
        }
        loop {
            if let Some(&s) = state_of.get(&extended) {
                return s;
            }
            extended.remove(0);
        }
    }

    fn backoff_state(&self, state_of: &HashMap<Vec<String>, StateId>, ctx: &[String]) -> StateId {
        let mut shorter = ctx[1..].to_vec();
        loop {
            if let Some(&s) = state_of.get(&shorter) {
                return s;
            }
            shorter.remove(0);
        }
    }

    /// ARPA-style serialization with natural-log probabilities.
    pub fn write_arpa(&self) -> String {
        let mut grams: Vec<BTreeMap<(Vec<String>, String), (f64, Option<f64>)>> =
            vec![BTreeMap::new(); self.order];
        for (ctx, words) in &self.probs {
            for (word, &lp) in words {
                let m = ctx.len();
                let mut full = ctx.clone();
                full.push(word.clone());
                let bo = if m + 1 < self.order {
                    self.backoffs.get(&full).copied()
                } else {
                    None
                };
                grams[m].insert((ctx.clone(), word.clone()), (lp, bo));
            }
        }
        // Contexts like <s> carry a backoff weight but never occur as a
        // predicted word; give them the conventional -99 placeholder entry
        // so the weight survives the round trip.
        for (ctx_full, &bo) in &self.backoffs {
            let m = ctx_full.len();
            if m == 0 || m > grams.len() {
                continue;
            }
            let key = (ctx_full[..m - 1].to_vec(), ctx_full[m - 1].clone());
            grams[m - 1].entry(key).or_insert((-99.0, Some(bo)));
        }
        let mut out = String::from("\\data\\\n");
        for (m, level) in grams.iter().enumerate() {
            out.push_str(&format!("ngram {}={}\n", m + 1, level.len()));
        }
        for (m, level) in grams.iter().enumerate() {
            out.push_str(&format!("\n\\{}-grams:\n", m + 1));
            for ((ctx, word), (lp, bo)) in level {
                let mut toks = ctx.clone();
                toks.push(word.clone());
                match bo {
                    Some(b) => out.push_str(&format!("{}\t{}\t{}\n", lp, toks.join(" "), b)),
                    None => out.push_str(&format!("{}\t{}\n", lp, toks.join(" "))),
                }
            }
        }
        out.push_str("\n\\end\\\n");
        out
    }

    pub fn read_arpa<R: BufRead>(r: R) -> Result<Self> {
        let mut probs: HashMap<Vec<String>, HashMap<String, f64>> = HashMap::new();
        let mut backoffs: HashMap<Vec<String>, f64> = HashMap::new();
        let mut order = 0usize;
        let mut current = 0usize;
        for (idx, line) in r.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line == "\\data\\" || line == "\\end\\" {
                continue;
            }
            if let Some(rest) = line.strip_prefix("ngram ") {
                let n: usize = rest
                    .split('=')
                    .next()
                    .unwrap_or("")
                    .trim()
                    .parse()
                    .map_err(|_| FstError::Parse {
                        line: idx + 1,
                        msg: "bad ngram count header".into(),
                    })?;
                order = order.max(n);
                continue;
            }
            if line.starts_with('\\') && line.ends_with("-grams:") {
                current = line[1..line.len() - 7].parse().map_err(|_| FstError::Parse {
                    line: idx + 1,
                    msg: "bad gram section header".into(),
                })?;
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() < 2 || current == 0 {
                return Err(FstError::Parse {
                    line: idx + 1,
                    msg: "expected 'logprob<TAB>ngram[<TAB>backoff]'".into(),
                });
            }
            let lp: f64 = fields[0].parse().map_err(|_| FstError::Parse {
                line: idx + 1,
                msg: "bad log probability".into(),
            })?;
            let toks: Vec<String> = fields[1].split_whitespace().map(str::to_string).collect();
            if toks.len() != current {
                return Err(FstError::Parse {
                    line: idx + 1,
                    msg: format!("expected a {}-gram", current),
                });
            }
            let ctx = toks[..current - 1].to_vec();
            let word = toks[current - 1].clone();
            probs.entry(ctx).or_default().insert(word, lp);
            if fields.len() >= 3 {
                let bo: f64 = fields[2].parse().map_err(|_| FstError::Parse {
                    line: idx + 1,
                    msg: "bad backoff weight".into(),
                })?;
                backoffs.insert(toks, bo);
            }
        }
        if order == 0 || !probs.contains_key(&Vec::new()) {
            return Err(FstError::Format("ARPA file has no unigram section".into()));
        }
        let mut vocab: Vec<String> = probs[&Vec::new()].keys().cloned().collect();
        vocab.retain(|w| w != EOS && w != UNK_WORD);
        vocab.sort();
        Ok(NGramModel {
            order,
            discount: 0.0,
            probs,
            backoffs,
            vocab,
        })
    }

    /// Interns the model vocabulary into a pipeline symbol table.
    pub fn intern_vocab(&self, syms: &mut SymbolTable) {
        for w in &self.vocab {
            syms.intern(w);
        }
    }
}

pub const UNK_WORD: &str = "<unk>";

/// The labels treated as transparent by default.
pub fn default_transparent() -> Vec<Label> {
    vec![CORR, MCORR]
}
