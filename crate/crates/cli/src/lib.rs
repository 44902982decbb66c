//! Pipeline plumbing for the `fstgec` command-line tool: configuration
//! loading, resource wiring, batch correction, tuning, and reporting.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::sync::Arc as StdArc;

use anyhow::{anyhow, bail, Context, Result};
use fstgec::decoder::{beam_decode, exact_decode, tokens_to_sentence, FileScorer, NgramScorer, Scorer};
use fstgec::fst::{Arc, SharedTable, Wfst};
use fstgec::lattice::{
    assemble_hbpe, assemble_hword, build_base_lattice, build_edit_transducer,
    build_input_identity, build_input_nbest, build_penalizer, read_nbest, ConfusionTable,
    LambdaParams, NBestList,
};
use fstgec::metrics::{edit_f05, gleu, oracle_error_rate, read_gold_edits, EvalCorpus};
use fstgec::ngram::{default_transparent, BackoffMode, NGramModel};
use fstgec::powell::{powell_tune, Bounds};
use fstgec::subword::{build_subword_table, SubwordVocab};
use fstgec::symbols::{SymbolTable, SIGMA};
use fstgec::textio::{read_text, write_text};
use fstgec::weight::Weight;
use fstgec::ProjectSide;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Identity,
    Nbest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Gleu,
    F05,
}

impl std::str::FromStr for Metric {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gleu" => Ok(Metric::Gleu),
            "f05" => Ok(Metric::F05),
            other => bail!("unknown metric {:?} (expected gleu or f05)", other),
        }
    }
}

/// One external rescoring model: an n-gram model read from an ARPA file or
/// a precomputed prefix-score file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScorerSpec {
    Ngram(PathBuf),
    File(PathBuf),
}

impl ScorerSpec {
    fn parse(value: &str, base: &Path) -> Result<Self> {
        let (kind, path) = value
            .split_once(':')
            .ok_or_else(|| anyhow!("scorer must be 'ngram:PATH' or 'file:PATH', got {:?}", value))?;
        let path = resolve(base, path.trim());
        match kind.trim() {
            "ngram" => Ok(ScorerSpec::Ngram(path)),
            "file" => Ok(ScorerSpec::File(path)),
            other => bail!("unknown scorer kind {:?}", other),
        }
    }

    fn render(&self) -> String {
        match self {
            ScorerSpec::Ngram(p) => format!("ngram:{}", p.display()),
            ScorerSpec::File(p) => format!("file:{}", p.display()),
        }
    }
}

/// Everything the pipeline needs, read from a line-oriented `key = value`
/// file. Relative paths are resolved against the config file's directory.
#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub mode: Mode,
    pub confusion: Option<PathBuf>,
    pub lm: Option<PathBuf>,
    pub subword_vocab: Option<PathBuf>,
    pub nbest: Option<PathBuf>,
    pub lambda: LambdaParams,
    pub beam: usize,
    pub backoff: BackoffMode,
    /// Scored with `lambda.nlm`.
    pub nlm_scorer: Option<ScorerSpec>,
    /// Scored with `lambda.nmt`.
    pub nmt_scorer: Option<ScorerSpec>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            mode: Mode::Identity,
            confusion: None,
            lm: None,
            subword_vocab: None,
            nbest: None,
            lambda: LambdaParams::default(),
            beam: 64,
            backoff: BackoffMode::Failure,
            nlm_scorer: None,
            nmt_scorer: None,
        }
    }
}

fn resolve(base: &Path, value: &str) -> PathBuf {
    let p = Path::new(value);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

impl PipelineConfig {
    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let mut cfg = PipelineConfig::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {}: expected 'key = value'", idx + 1))?;
            let (key, value) = (key.trim(), value.trim());
            let ctx = |what: &str| format!("line {}: bad {} value {:?}", idx + 1, what, value);
            match key {
                "mode" => {
                    cfg.mode = match value {
                        "identity" => Mode::Identity,
                        "nbest" => Mode::Nbest,
                        _ => bail!("line {}: mode must be identity or nbest", idx + 1),
                    }
                }
                "confusion" => cfg.confusion = Some(resolve(base, value)),
                "lm" => cfg.lm = Some(resolve(base, value)),
                "subword_vocab" => cfg.subword_vocab = Some(resolve(base, value)),
                "nbest" => cfg.nbest = Some(resolve(base, value)),
                "beam" => cfg.beam = value.parse().with_context(|| ctx("beam"))?,
                "backoff" => {
                    cfg.backoff = match value {
                        "failure" => BackoffMode::Failure,
                        "epsilon" => BackoffMode::Epsilon,
                        _ => bail!("line {}: backoff must be failure or epsilon", idx + 1),
                    }
                }
                "nlm_scorer" => cfg.nlm_scorer = Some(ScorerSpec::parse(value, base)?),
                "nmt_scorer" => cfg.nmt_scorer = Some(ScorerSpec::parse(value, base)?),
                name if name.starts_with("lambda_") => {
                    let v: f64 = value.parse().with_context(|| ctx(name))?;
                    let mut all = cfg.lambda.to_vec();
                    let pos = LambdaParams::NAMES
                        .iter()
                        .position(|n| *n == name)
                        .ok_or_else(|| anyhow!("line {}: unknown parameter {:?}", idx + 1, name))?;
                    all[pos] = v;
                    cfg.lambda = LambdaParams::from_vec(&all);
                }
                other => bail!("line {}: unknown key {:?}", idx + 1, other),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::parse(&text, base)
    }

    fn validate(&self) -> Result<()> {
        if self.beam == 0 {
            bail!("beam must be at least 1");
        }
        if self.lambda.to_vec().iter().any(|v| !v.is_finite()) {
            bail!("lambda values must be finite");
        }
        if self.mode == Mode::Nbest && self.nbest.is_none() {
            bail!("nbest mode needs an nbest file");
        }
        let mut files: Vec<&PathBuf> = Vec::new();
        files.extend(&self.confusion);
        files.extend(&self.lm);
        files.extend(&self.subword_vocab);
        files.extend(&self.nbest);
        for spec in [&self.nlm_scorer, &self.nmt_scorer].into_iter().flatten() {
            match spec {
                ScorerSpec::Ngram(p) | ScorerSpec::File(p) => files.push(p),
            }
        }
        for f in files {
            if !f.exists() {
                bail!("resource file not found: {}", f.display());
            }
        }
        Ok(())
    }

    /// Serializes the config, used when a tuner writes λ back.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "mode = {}",
            match self.mode {
                Mode::Identity => "identity",
                Mode::Nbest => "nbest",
            }
        );
        let mut path = |key: &str, v: &Option<PathBuf>| {
            if let Some(p) = v {
                let _ = writeln!(out, "{} = {}", key, p.display());
            }
        };
        path("confusion", &self.confusion);
        path("lm", &self.lm);
        path("subword_vocab", &self.subword_vocab);
        path("nbest", &self.nbest);
        let _ = writeln!(out, "beam = {}", self.beam);
        let _ = writeln!(
            out,
            "backoff = {}",
            match self.backoff {
                BackoffMode::Failure => "failure",
                BackoffMode::Epsilon => "epsilon",
            }
        );
        if let Some(s) = &self.nlm_scorer {
            let _ = writeln!(out, "nlm_scorer = {}", s.render());
        }
        if let Some(s) = &self.nmt_scorer {
            let _ = writeln!(out, "nmt_scorer = {}", s.render());
        }
        for (name, v) in LambdaParams::NAMES.iter().zip(self.lambda.to_vec()) {
            let _ = writeln!(out, "{} = {}", name, v);
        }
        out
    }
}

fn read_sentences(path: &Path) -> Result<Vec<Vec<String>>> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    Ok(text
        .lines()
        .map(|l| l.split_whitespace().map(str::to_string).collect())
        .collect())
}

/// Zero-weight σ-loop acceptor: the language model stand-in when no LM is
/// configured.
fn accept_all(syms: &SharedTable) -> Wfst {
    let mut fst = Wfst::acceptor(syms.clone());
    let s = fst.add_state();
    fst.set_start(s);
    fst.set_final(s, Weight::one());
    fst.add_arc(s, Arc::new(SIGMA, SIGMA, Weight::one(), s));
    fst
}

enum LoadedScorer {
    Ngram(NGramModel),
    File(PathBuf),
}

/// Loaded resources plus per-sentence lattices cached at unit λ. Retuning
/// only rescales weights; no topology is rebuilt.
pub struct Pipeline {
    pub config: PipelineConfig,
    pub syms: SharedTable,
    sources: Vec<Vec<String>>,
    table: ConfusionTable,
    model: Option<NGramModel>,
    vocab: Option<SubwordVocab>,
    subword_syms: Option<SharedTable>,
    /// Base lattices built with λ_smt = 1; `scale_weights` applies λ_smt.
    bases_unit: Vec<Wfst>,
    /// LM acceptor at λ_kenlm = 1 over the word alphabet.
    lm_unit: Option<Wfst>,
    scorer_specs: Vec<LoadedScorer>,
}

impl Pipeline {
    /// Loads every configured resource and precomputes the per-sentence
    /// base lattices for `sources`.
    pub fn new(config: PipelineConfig, sources: Vec<Vec<String>>) -> Result<Self> {
        let table = match &config.confusion {
            Some(p) => ConfusionTable::read(BufReader::new(
                fs::File::open(p).with_context(|| format!("cannot open {}", p.display()))?,
            ))?,
            None => ConfusionTable::new(),
        };
        let model = match &config.lm {
            Some(p) => Some(NGramModel::read_arpa(BufReader::new(
                fs::File::open(p).with_context(|| format!("cannot open {}", p.display()))?,
            ))?),
            None => None,
        };
        let vocab = match &config.subword_vocab {
            Some(p) => Some(SubwordVocab::read(BufReader::new(
                fs::File::open(p).with_context(|| format!("cannot open {}", p.display()))?,
            ))?),
            None => None,
        };
        let nbest_lists: Option<Vec<NBestList>> = match (&config.mode, &config.nbest) {
            (Mode::Nbest, Some(p)) => Some(read_nbest(
                BufReader::new(
                    fs::File::open(p).with_context(|| format!("cannot open {}", p.display()))?,
                ),
                &sources,
            )?),
            _ => None,
        };

        // one shared word alphabet: LM vocabulary, confusion entries, then
        // the input corpus — deterministic order
        let mut syms = SymbolTable::new();
        if let Some(m) = &model {
            m.intern_vocab(&mut syms);
        }
        for w in table.words() {
            syms.intern(w);
            for c in table.candidates(w) {
                syms.intern(c);
            }
        }
        for sent in &sources {
            for w in sent {
                syms.intern(w);
            }
        }
        if let Some(lists) = &nbest_lists {
            for list in lists {
                for e in &list.entries {
                    for w in &e.tokens {
                        syms.intern(w);
                    }
                }
            }
        }
        let syms: SharedTable = StdArc::new(syms);

        let mut bases_unit = Vec::with_capacity(sources.len());
        for (i, sent) in sources.iter().enumerate() {
            let input = match &nbest_lists {
                Some(lists) => build_input_nbest(&syms, &lists[i], 1.0)?,
                None => {
                    let toks: Vec<&str> = sent.iter().map(String::as_str).collect();
                    build_input_identity(&syms, &toks)
                }
            };
            let in_scope: HashSet<_> = input.realized_labels(ProjectSide::Input);
            let edits = build_edit_transducer(&syms, &in_scope, &table);
            bases_unit.push(build_base_lattice(&input, &edits)?);
        }

        let lm_unit = model
            .as_ref()
            .map(|m| m.to_fst(&syms, 1.0, &default_transparent(), config.backoff));

        let subword_syms = vocab.as_ref().map(|v| {
            let words: HashSet<_> = syms.user_ids().collect();
            StdArc::new(build_subword_table(&syms, &words, v))
        });

        let mut scorer_specs = Vec::new();
        for spec in [&config.nlm_scorer, &config.nmt_scorer].into_iter().flatten() {
            scorer_specs.push(match spec {
                ScorerSpec::Ngram(p) => LoadedScorer::Ngram(NGramModel::read_arpa(
                    BufReader::new(fs::File::open(p)?),
                )?),
                ScorerSpec::File(p) => LoadedScorer::File(p.clone()),
            });
        }

        Ok(Pipeline {
            config,
            syms,
            sources,
            table,
            model,
            vocab,
            subword_syms,
            bases_unit,
            lm_unit,
            scorer_specs,
        })
    }

    pub fn sources(&self) -> &[Vec<String>] {
        &self.sources
    }

    pub fn confusion_table(&self) -> &ConfusionTable {
        &self.table
    }

    pub fn language_model(&self) -> Option<&NGramModel> {
        self.model.as_ref()
    }

    fn decode_alphabet(&self) -> &SharedTable {
        self.subword_syms.as_ref().unwrap_or(&self.syms)
    }

    fn build_scorers(&self) -> Result<Vec<(Box<dyn Scorer>, f64)>> {
        let lambdas = [self.config.lambda.nlm, self.config.lambda.nmt];
        let mut out: Vec<(Box<dyn Scorer>, f64)> = Vec::new();
        for (spec, l) in self.scorer_specs.iter().zip(lambdas) {
            let scorer: Box<dyn Scorer> = match spec {
                LoadedScorer::Ngram(m) => {
                    Box::new(NgramScorer::new(m.clone(), self.decode_alphabet().clone()))
                }
                LoadedScorer::File(p) => Box::new(FileScorer::read(
                    BufReader::new(fs::File::open(p)?),
                    self.decode_alphabet(),
                )?),
            };
            out.push((scorer, l));
        }
        Ok(out)
    }

    /// The word-level scored lattice for sentence `idx` under `lambda`.
    pub fn hword(&self, idx: usize, lambda: &LambdaParams) -> Result<Wfst> {
        let base = self.bases_unit[idx].scale_weights(lambda.smt);
        let penalizer = build_penalizer(&self.syms, lambda);
        let lm = match &self.lm_unit {
            Some(l) => l.scale_weights(lambda.kenlm),
            None => accept_all(&self.syms),
        };
        Ok(assemble_hword(&base, &penalizer, &lm)?)
    }

    /// The unscored base lattice for sentence `idx` (oracle queries).
    pub fn base(&self, idx: usize) -> &Wfst {
        &self.bases_unit[idx]
    }

    fn decode_one(&self, idx: usize, lambda: &LambdaParams) -> Result<Vec<String>> {
        let h_word = self.hword(idx, lambda)?;
        let scorers = self.build_scorers()?;
        if scorers.is_empty() && self.vocab.is_none() {
            let (tokens, _) = exact_decode(&h_word)?;
            return Ok(tokens);
        }
        let h = match (&self.vocab, &self.subword_syms) {
            (Some(v), Some(ss)) => assemble_hbpe(&h_word, v, ss)?,
            _ => h_word,
        };
        let refs: Vec<(&dyn Scorer, f64)> = scorers.iter().map(|(s, l)| (s.as_ref(), *l)).collect();
        let result = beam_decode(&h, &refs, self.config.beam, None)?;
        Ok(tokens_to_sentence(&h, &result.tokens)?)
    }

    /// Corrects every loaded sentence. A sentence that fails to decode is
    /// echoed unchanged with a warning on stderr.
    pub fn correct_all(&self, lambda: &LambdaParams) -> Vec<Vec<String>> {
        let n = self.sources.len();
        let mut out: Vec<Option<Vec<String>>> = vec![None; n];
        let workers = std::thread::available_parallelism().map_or(1, |p| p.get()).min(n.max(1));
        let next = std::sync::atomic::AtomicUsize::new(0);
        let slots = std::sync::Mutex::new(&mut out);
        std::thread::scope(|scope| {
            for _ in 0..workers {
                scope.spawn(|| loop {
                    let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                    if i >= n {
                        break;
                    }
                    let decoded = match self.decode_one(i, lambda) {
                        Ok(toks) => toks,
                        Err(e) => {
                            eprintln!("warning: sentence {}: {}; echoing input", i + 1, e);
                            self.sources[i].clone()
                        }
                    };
                    slots.lock().unwrap()[i] = Some(decoded);
                });
            }
        });
        out.into_iter().map(|s| s.unwrap()).collect()
    }
}

pub fn cmd_correct(config_path: &Path, input_path: &Path) -> Result<Vec<String>> {
    let config = PipelineConfig::load(config_path)?;
    let sources = read_sentences(input_path)?;
    let pipeline = Pipeline::new(config, sources)?;
    let lambda = pipeline.config.lambda;
    Ok(pipeline
        .correct_all(&lambda)
        .into_iter()
        .map(|toks| toks.join(" "))
        .collect())
}

pub struct TuneOutcome {
    pub lambda: LambdaParams,
    pub best_value: f64,
    pub sweep_values: Vec<f64>,
}

fn corpus_metric(
    metric: Metric,
    hyps: &[Vec<String>],
    corpus: &EvalCorpus,
) -> f64 {
    match metric {
        Metric::Gleu => gleu(hyps, &corpus.sources, &corpus.references, 4),
        Metric::F05 => edit_f05(hyps, &corpus.sources, &corpus.gold_edits).2,
    }
}

/// Powell-tunes λ on a development corpus, restarting from a few spread-out
/// points, and writes the winning values back into the config file.
pub fn cmd_tune(
    config_path: &Path,
    dev_src: &Path,
    dev_ref: &Path,
    gold_edits: Option<&Path>,
    metric: Metric,
    max_sweeps: usize,
) -> Result<TuneOutcome> {
    let config = PipelineConfig::load(config_path)?;
    let sources = read_sentences(dev_src)?;
    if sources.is_empty() {
        bail!("development corpus is empty");
    }
    let references = read_sentences(dev_ref)?;
    let mut corpus = EvalCorpus::new(sources.clone(), references)?;
    if let Some(p) = gold_edits {
        let text = fs::read_to_string(p)?;
        corpus = corpus.with_gold_edits(read_gold_edits(text.as_bytes(), sources.len())?)?;
    } else if metric == Metric::F05 {
        bail!("the f05 metric needs a gold-edits file");
    }

    let pipeline = Pipeline::new(config.clone(), sources)?;
    let objective = |v: &[f64]| -> f64 {
        let lambda = LambdaParams::from_vec(v);
        let hyps = pipeline.correct_all(&lambda);
        corpus_metric(metric, &hyps, &corpus)
    };
    let init = config.lambda.to_vec();
    let bounds = vec![Bounds::new(0.0, 10.0); init.len()];

    let mut best = powell_tune(objective, &init, &bounds, max_sweeps);
    if max_sweeps > 0 {
        // two more restarts from spread-out points guard against a bad init
        for frac in [0.25, 0.75] {
            let start: Vec<f64> = bounds.iter().map(|b| b.lo + frac * (b.hi - b.lo)).collect();
            let r = powell_tune(objective, &start, &bounds, max_sweeps);
            if r.best_value > best.best_value {
                best = r;
            }
        }
    }

    let lambda = LambdaParams::from_vec(&best.best);
    let mut tuned = config;
    tuned.lambda = lambda;
    fs::write(config_path, tuned.render())
        .with_context(|| format!("cannot write {}", config_path.display()))?;
    Ok(TuneOutcome {
        lambda,
        best_value: best.best_value,
        sweep_values: best.sweep_values,
    })
}

pub struct Report {
    pub gleu: f64,
    pub f05: Option<(f64, f64, f64)>,
    pub oracle_error: f64,
    pub sentences: usize,
}

impl Report {
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "sentences          {}", self.sentences);
        let _ = writeln!(out, "gleu               {:.4}", self.gleu);
        if let Some((p, r, f)) = self.f05 {
            let _ = writeln!(out, "edit precision     {:.4}", p);
            let _ = writeln!(out, "edit recall        {:.4}", r);
            let _ = writeln!(out, "edit f0.5          {:.4}", f);
        }
        let _ = writeln!(out, "oracle error rate  {:.4}", self.oracle_error);
        out
    }
}

pub fn cmd_report(
    config_path: &Path,
    test_src: &Path,
    test_ref: &Path,
    gold_edits: Option<&Path>,
) -> Result<Report> {
    let config = PipelineConfig::load(config_path)?;
    let sources = read_sentences(test_src)?;
    let references = read_sentences(test_ref)?;
    let mut corpus = EvalCorpus::new(sources.clone(), references)?;
    let mut have_gold = false;
    if let Some(p) = gold_edits {
        let text = fs::read_to_string(p)?;
        corpus = corpus.with_gold_edits(read_gold_edits(text.as_bytes(), sources.len())?)?;
        have_gold = true;
    }
    let pipeline = Pipeline::new(config, sources)?;
    let lambda = pipeline.config.lambda;
    let hyps = pipeline.correct_all(&lambda);
    let gleu_score = gleu(&hyps, &corpus.sources, &corpus.references, 4);
    let f05 = have_gold.then(|| edit_f05(&hyps, &corpus.sources, &corpus.gold_edits));
    let mut idx = 0usize;
    let oracle_error = oracle_error_rate(&corpus, |_src| {
        let b = pipeline.base(idx).clone();
        idx += 1;
        b
    });
    Ok(Report {
        gleu: gleu_score,
        f05,
        oracle_error,
        sentences: corpus.sources.len(),
    })
}

pub fn cmd_train_lm(corpus_path: &Path, order: usize, discount: f64, out: &Path) -> Result<()> {
    let corpus = read_sentences(corpus_path)?;
    let model = NGramModel::train(&corpus, order, discount)?;
    fs::write(out, model.write_arpa()).with_context(|| format!("cannot write {}", out.display()))?;
    Ok(())
}

fn load_symbols(path: &Path) -> Result<SharedTable> {
    let file = fs::File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    Ok(StdArc::new(SymbolTable::read(BufReader::new(file))?))
}

fn load_fst(path: &Path, isyms: &SharedTable, osyms: &SharedTable) -> Result<Wfst> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    Ok(read_text(&text, isyms.clone(), osyms.clone())?)
}

/// Parses a text FST, validates it against the symbol tables, and returns
/// the normalized serialization.
pub fn cmd_fst_compile(fst: &Path, isyms: &Path, osyms: Option<&Path>) -> Result<String> {
    let it = load_symbols(isyms)?;
    let ot = match osyms {
        Some(p) => load_symbols(p)?,
        None => it.clone(),
    };
    Ok(write_text(&load_fst(fst, &it, &ot)?))
}

/// Like `cmd_fst_compile`, with a summary line for inspection.
pub fn cmd_fst_print(fst: &Path, isyms: &Path, osyms: Option<&Path>) -> Result<String> {
    let it = load_symbols(isyms)?;
    let ot = match osyms {
        Some(p) => load_symbols(p)?,
        None => it.clone(),
    };
    let f = load_fst(fst, &it, &ot)?;
    let mut out = write_text(&f);
    let _ = writeln!(out, "# {} states, {} arcs", f.num_states(), f.num_arcs());
    Ok(out)
}

/// Composes two text FSTs sharing a pivot symbol table: the first maps
/// isyms→pivot, the second pivot→osyms (osyms defaults to pivot).
pub fn cmd_fst_compose(
    a: &Path,
    b: &Path,
    isyms: &Path,
    pivot: &Path,
    osyms: Option<&Path>,
) -> Result<String> {
    let it = load_symbols(isyms)?;
    let pt = load_symbols(pivot)?;
    let ot = match osyms {
        Some(p) => load_symbols(p)?,
        None => pt.clone(),
    };
    let fa = load_fst(a, &it, &pt)?;
    let fb = load_fst(b, &pt, &ot)?;
    Ok(write_text(&fstgec::compose(&fa, &fb)?))
}
