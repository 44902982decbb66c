//! Hypothesis-space construction: input lattices, the edit transducer,
//! the penalization transducer, and the assembled scored lattices.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::io::BufRead;

use crate::compose::compose;
use crate::error::{FstError, Result};
use crate::fst::{build_linear, union, Arc, ProjectSide, SharedTable, Wfst};
use crate::optimize::{optimize, OptimizePasses};
use crate::subword::{build_t, SubwordVocab};
use crate::symbols::{Label, CORR, EPS, MCORR, PHI, SIGMA, UNK};
use crate::weight::Weight;

/// Context-independent 1:1 replacement candidates per word.
#[derive(Debug, Clone, Default)]
pub struct ConfusionTable {
    entries: BTreeMap<String, Vec<String>>,
}

impl ConfusionTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, word: &str, candidate: &str) {
        if word == candidate {
            return;
        }
        let set = self.entries.entry(word.to_string()).or_default();
        if !set.iter().any(|c| c == candidate) {
            set.push(candidate.to_string());
        }
    }

    pub fn candidates(&self, word: &str) -> &[String] {
        self.entries.get(word).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(|s| s.as_str())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Parses "word<TAB>cand1,cand2,…" lines.
    pub fn read<R: BufRead>(r: R) -> Result<Self> {
        let mut table = ConfusionTable::new();
        for (idx, line) in r.lines().enumerate() {
            let line = line?;
            let line = line.trim_end();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (word, cands) = line.split_once('\t').ok_or_else(|| FstError::Parse {
                line: idx + 1,
                msg: "expected 'word<TAB>cand1,cand2,...'".into(),
            })?;
            for cand in cands.split(',') {
                let cand = cand.trim();
                if !cand.is_empty() {
                    table.insert(word.trim(), cand);
                }
            }
        }
        Ok(table)
    }

    pub fn write(&self) -> String {
        let mut out = String::new();
        for (word, cands) in &self.entries {
            out.push_str(word);
            out.push('\t');
            out.push_str(&cands.join(","));
            out.push('\n');
        }
        out
    }

    /// Dictionary-based generator: candidates are dictionary words within
    /// edit distance `max_dist` of each non-dictionary corpus word, plus
    /// user-supplied closed-class sets (each member confusable with the
    /// others in its set).
    pub fn generate(
        dictionary: &BTreeSet<String>,
        corpus_words: &BTreeSet<String>,
        closed_classes: &[Vec<String>],
        max_dist: usize,
    ) -> Self {
        let mut table = ConfusionTable::new();
        for w in corpus_words {
            if dictionary.contains(w) {
                continue;
            }
            for d in dictionary {
                if w.len().abs_diff(d.len()) <= max_dist
                    && char_levenshtein(w, d) <= max_dist
                {
                    table.insert(w, d);
                }
            }
        }
        for class in closed_classes {
            for a in class {
                for b in class {
                    if a != b {
                        table.insert(a, b);
                    }
                }
            }
        }
        table
    }
}

fn char_levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    levenshtein(&a, &b)
}

/// Minimal insertions/deletions/substitutions (unit costs) turning `x`
/// into `y`.
pub fn levenshtein<T: PartialEq>(x: &[T], y: &[T]) -> usize {
    let mut prev: Vec<usize> = (0..=y.len()).collect();
    let mut cur = vec![0usize; y.len() + 1];
    for i in 1..=x.len() {
        cur[0] = i;
        for j in 1..=y.len() {
            let sub = prev[j - 1] + usize::from(x[i - 1] != y[j - 1]);
            cur[j] = sub.min(prev[j] + 1).min(cur[j - 1] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[y.len()]
}

/// One SMT n-best entry: hypothesis tokens and their model score.
#[derive(Debug, Clone)]
pub struct NBestEntry {
    pub tokens: Vec<String>,
    pub smt_score: f64,
}

/// An n-best list for one source sentence. `normalize` guarantees the
/// source appears among the entries.
#[derive(Debug, Clone)]
pub struct NBestList {
    pub source: Vec<String>,
    pub entries: Vec<NBestEntry>,
}

impl NBestList {
    pub fn new(source: Vec<String>, entries: Vec<NBestEntry>) -> Self {
        let mut list = NBestList { source, entries };
        list.normalize();
        list
    }

    /// Appends the source sentence when absent, at the worst score in the
    /// list (0 when the list is empty).
    pub fn normalize(&mut self) {
        if self.entries.iter().any(|e| e.tokens == self.source) {
            return;
        }
        let worst = self
            .entries
            .iter()
            .map(|e| e.smt_score)
            .fold(f64::INFINITY, f64::min);
        let score = if worst.is_finite() { worst } else { 0.0 };
        self.entries.push(NBestEntry {
            tokens: self.source.clone(),
            smt_score: score,
        });
    }
}

/// Parses Moses-style "sent_id ||| hypothesis tokens ||| unused ||| score"
/// lines into per-sentence n-best lists, keyed by sent_id order.
pub fn read_nbest<R: BufRead>(r: R, sources: &[Vec<String>]) -> Result<Vec<NBestList>> {
    let mut per_id: BTreeMap<usize, Vec<NBestEntry>> = BTreeMap::new();
    for (idx, line) in r.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split("|||").map(|f| f.trim()).collect();
        if fields.len() < 4 {
            return Err(FstError::Parse {
                line: idx + 1,
                msg: "expected 'sent_id ||| tokens ||| unused ||| score'".into(),
            });
        }
        let sent_id: usize = fields[0].parse().map_err(|_| FstError::Parse {
            line: idx + 1,
            msg: "bad sentence id".into(),
        })?;
        let score: f64 = fields[3].parse().map_err(|_| FstError::Parse {
            line: idx + 1,
            msg: "bad score".into(),
        })?;
        let tokens = fields[1].split_whitespace().map(str::to_string).collect();
        per_id.entry(sent_id).or_default().push(NBestEntry {
            tokens,
            smt_score: score,
        });
    }
    let mut lists = Vec::with_capacity(sources.len());
    for (i, src) in sources.iter().enumerate() {
        let entries = per_id.remove(&i).unwrap_or_default();
        lists.push(NBestList::new(src.clone(), entries));
    }
    Ok(lists)
}

/// Tunable scale factors for the score components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaParams {
    pub smt: f64,
    pub corr: f64,
    pub mcorr: f64,
    pub kenlm: f64,
    pub nlm: f64,
    pub nmt: f64,
    pub wc: f64,
}

impl Default for LambdaParams {
    fn default() -> Self {
        // no-neural configuration
        LambdaParams {
            smt: 1.0,
            corr: 1.0,
            mcorr: 1.0,
            kenlm: 1.0,
            nlm: 0.0,
            nmt: 0.0,
            wc: 1.0,
        }
    }
}

impl LambdaParams {
    pub fn to_vec(self) -> Vec<f64> {
        vec![self.smt, self.corr, self.mcorr, self.kenlm, self.nlm, self.nmt, self.wc]
    }

    pub fn from_vec(v: &[f64]) -> Self {
        LambdaParams {
            smt: v[0],
            corr: v[1],
            mcorr: v[2],
            kenlm: v[3],
            nlm: v[4],
            nmt: v[5],
            wc: v[6],
        }
    }

    pub const NAMES: [&'static str; 7] =
        ["lambda_smt", "lambda_corr", "lambda_mcorr", "lambda_kenlm", "lambda_nlm", "lambda_nmt", "lambda_wc"];
}

fn intern_or_unk(syms: &SharedTable, token: &str) -> Label {
    syms.get(token).unwrap_or(UNK)
}

/// Linear identity transducer mapping the sentence to itself at weight 0.
pub fn build_input_identity(syms: &SharedTable, sentence: &[&str]) -> Wfst {
    let labels: Vec<Label> = sentence.iter().map(|t| intern_or_unk(syms, t)).collect();
    build_linear(syms, &labels, Weight::one())
}

/// Weighted n-best input lattice: each entry becomes the string
/// `<mcorr>^lev(x,y) · y` at weight `-λ_smt · score`.
pub fn build_input_nbest(syms: &SharedTable, list: &NBestList, lambda_smt: f64) -> Result<Wfst> {
    let mut parts = Vec::with_capacity(list.entries.len());
    for entry in &list.entries {
        if !entry.smt_score.is_finite() {
            return Err(FstError::Config("non-finite SMT score in n-best list".into()));
        }
        let dist = levenshtein(&list.source, &entry.tokens);
        let mut labels = vec![MCORR; dist];
        labels.extend(entry.tokens.iter().map(|t| intern_or_unk(syms, t)));
        parts.push(build_linear(
            syms,
            &labels,
            Weight::new(-lambda_smt * entry.smt_score),
        ));
    }
    Ok(union(&parts)?.trim())
}

/// The edit flower transducer: a σ self-loop plus, for every in-scope word
/// with candidates, a branch mapping the word to `<corr>` followed by the
/// candidate.
pub fn build_edit_transducer(
    syms: &SharedTable,
    in_scope: &HashSet<Label>,
    table: &ConfusionTable,
) -> Wfst {
    let mut fst = Wfst::new(syms.clone(), syms.clone());
    let loop_state = fst.add_state();
    fst.set_start(loop_state);
    fst.set_final(loop_state, Weight::one());
    fst.add_arc(loop_state, Arc::new(SIGMA, SIGMA, Weight::one(), loop_state));
    for (word, w_id) in table.words().filter_map(|w| syms.get(w).map(|id| (w, id))) {
        if !in_scope.contains(&w_id) {
            continue;
        }
        for cand in table.candidates(word) {
            let c_id = match syms.get(cand) {
                Some(id) => id,
                None => continue,
            };
            let mid = fst.add_state();
            fst.add_arc(loop_state, Arc::new(w_id, CORR, Weight::one(), mid));
            fst.add_arc(mid, Arc::new(EPS, c_id, Weight::one(), loop_state));
        }
    }
    fst
}

/// One-state identity penalizer: `<corr>` at λ_corr, `<mcorr>` at λ_mcorr,
/// every ordinary word at λ_wc via the φ self-loop.
pub fn build_penalizer(syms: &SharedTable, lambda: &LambdaParams) -> Wfst {
    let mut fst = Wfst::new(syms.clone(), syms.clone());
    let s = fst.add_state();
    fst.set_start(s);
    fst.set_final(s, Weight::one());
    fst.add_arc(s, Arc::new(CORR, CORR, Weight::new(lambda.corr), s));
    fst.add_arc(s, Arc::new(MCORR, MCORR, Weight::new(lambda.mcorr), s));
    fst.add_arc(s, Arc::new(PHI, PHI, Weight::new(lambda.wc), s));
    fst
}

/// `B = Π_output(I ∘ E)`, trimmed.
pub fn build_base_lattice(input: &Wfst, edits: &Wfst) -> Result<Wfst> {
    let b = compose(input, edits)?.project(ProjectSide::Output);
    debug_assert!(b.is_acyclic(), "base lattice must stay acyclic");
    Ok(b)
}

/// The word-level scored lattice `B ∘ P ∘ L`.
pub fn assemble_hword(base: &Wfst, penalizer: &Wfst, lm: &Wfst) -> Result<Wfst> {
    let bp = compose(base, penalizer)?;
    let h = compose(&bp, lm)?.project(ProjectSide::Output);
    if h.start.is_none() {
        return Err(FstError::DecodeFailure(
            "scored lattice is empty; the identity path should always survive".into(),
        ));
    }
    if !h.is_acyclic() {
        return Err(FstError::Unsupported("scored lattice is cyclic".into()));
    }
    Ok(h)
}

/// The decoder-ready subword lattice `Π_output(H_word ∘ T)`, fully
/// optimized.
pub fn assemble_hbpe(h_word: &Wfst, vocab: &SubwordVocab, subword_syms: &SharedTable) -> Result<Wfst> {
    let words = h_word.realized_labels(ProjectSide::Output);
    let t = build_t(&h_word.osyms, subword_syms, &words, vocab)?;
    let h = compose(h_word, &t)?.project(ProjectSide::Output);
    optimize(&h, OptimizePasses::default())
}

/// True iff some path of `h`, after erasing correction markers, spells the
/// reference.
pub fn oracle_contains(h: &Wfst, reference: &[&str]) -> bool {
    let eraser = marker_eraser(&h.osyms);
    let erased = match compose(h, &eraser) {
        Ok(f) => f.project(ProjectSide::Output),
        Err(_) => return false,
    };
    !erased.string_weight_text(reference).is_zero()
}

/// One-state transducer deleting `<corr>`/`<mcorr>` and passing every
/// other word through unchanged.
pub fn marker_eraser(syms: &SharedTable) -> Wfst {
    let mut fst = Wfst::new(syms.clone(), syms.clone());
    let s = fst.add_state();
    fst.set_start(s);
    fst.set_final(s, Weight::one());
    fst.add_arc(s, Arc::new(CORR, EPS, Weight::one(), s));
    fst.add_arc(s, Arc::new(MCORR, EPS, Weight::one(), s));
    fst.add_arc(s, Arc::new(PHI, PHI, Weight::one(), s));
    fst
}
