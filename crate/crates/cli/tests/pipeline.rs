//! Broader command-level behavior: config handling, identity safety,
//! n-best argmax, tuning, and reporting.

use std::fs;
use std::path::{Path, PathBuf};

use fstgec_cli::{cmd_correct, cmd_report, cmd_train_lm, cmd_tune, Metric, PipelineConfig};
use tempfile::TempDir;

fn write(dir: &Path, name: &str, content: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, content).unwrap();
    p
}

fn train_lm(dir: &Path, corpus: &str) -> PathBuf {
    let src = write(dir, "lm_corpus.txt", corpus);
    let out = dir.join("lm.arpa");
    cmd_train_lm(&src, 3, 0.6, &out).unwrap();
    out
}

const LM_CORPUS: &str = "\
the red car stops here .
the red van stops here .
a blue bus stops here .
the red car is fast .
";

#[test]
fn empty_resources_echo_the_input() {
    let dir = TempDir::new().unwrap();
    let config = write(dir.path(), "config.txt", "mode = identity\n");
    let input = write(dir.path(), "input.txt", "any words at all .\nanother line .\n");
    let out = cmd_correct(&config, &input).unwrap();
    assert_eq!(out, vec!["any words at all .", "another line ."]);
}

#[test]
fn identical_runs_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    train_lm(dir.path(), LM_CORPUS);
    write(dir.path(), "confusion.tsv", "rad\tred,rat\n");
    let config = write(
        dir.path(),
        "config.txt",
        "mode = identity\nconfusion = confusion.tsv\nlm = lm.arpa\nlambda_corr = 0.2\nlambda_wc = 0.05\n",
    );
    let input = write(dir.path(), "input.txt", "the rad car stops here .\n");
    let a = cmd_correct(&config, &input).unwrap();
    let b = cmd_correct(&config, &input).unwrap();
    assert_eq!(a, b);
    assert_eq!(a, vec!["the red car stops here ."]);
}

#[test]
fn nbest_mode_matches_three_entry_enumeration() {
    let dir = TempDir::new().unwrap();
    train_lm(dir.path(), LM_CORPUS);
    // three hypotheses; scores and the <mcorr>/word-count penalties decide
    let nbest = "\
0 ||| the red car stops here . ||| f ||| -0.4
0 ||| the red van stops here . ||| f ||| -0.2
0 ||| a blue bus stops here . ||| f ||| -0.1
";
    write(dir.path(), "nbest.txt", nbest);
    let config = write(
        dir.path(),
        "config.txt",
        "mode = nbest\nnbest = nbest.txt\nlm = lm.arpa\n\
         lambda_smt = 1.0\nlambda_mcorr = 0.6\nlambda_kenlm = 0.4\nlambda_wc = 0.0\n",
    );
    let input = write(dir.path(), "input.txt", "the red carr stops here .\n");
    let got = cmd_correct(&config, &input).unwrap();

    // enumeration oracle over the four candidates (the three entries plus
    // the source, which n-best lattices always retain)
    let corpus: Vec<Vec<String>> = LM_CORPUS
        .lines()
        .map(|l| l.split_whitespace().map(str::to_string).collect())
        .collect();
    let model = fstgec::ngram::NGramModel::train(&corpus, 3, 0.6).unwrap();
    let source: Vec<String> = "the red carr stops here ."
        .split_whitespace()
        .map(str::to_string)
        .collect();
    let mut candidates: Vec<(Vec<String>, f64)> = nbest
        .lines()
        .map(|l| {
            let fields: Vec<&str> = l.split("|||").map(str::trim).collect();
            let toks: Vec<String> = fields[1].split_whitespace().map(str::to_string).collect();
            (toks, fields[3].parse().unwrap())
        })
        .collect();
    candidates.push((source.clone(), -0.4)); // worst score in the list
    let best = candidates
        .into_iter()
        .map(|(toks, smt)| {
            let refs: Vec<&str> = toks.iter().map(String::as_str).collect();
            let dist = fstgec::lattice::levenshtein(&source, &toks);
            let cost =
                1.0 * -smt + 0.6 * dist as f64 + 0.4 * -model.logprob(&refs);
            (cost, toks)
        })
        .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap())
        .unwrap()
        .1;
    assert_eq!(got, vec![best.join(" ")]);
}

#[test]
fn tune_on_identity_dev_set_reaches_metric_one() {
    let dir = TempDir::new().unwrap();
    train_lm(dir.path(), LM_CORPUS);
    write(dir.path(), "confusion.tsv", "red\tblue,rat\nstops\tstopped\n");
    let config = write(
        dir.path(),
        "config.txt",
        "mode = identity\nconfusion = confusion.tsv\nlm = lm.arpa\nlambda_corr = 0.0\nlambda_kenlm = 2.0\n",
    );
    // references equal sources: the tuner must learn not to edit
    let src = write(dir.path(), "dev.txt", "the red car stops here .\na blue bus stops here .\n");
    let outcome = cmd_tune(&config, &src, &src, None, Metric::Gleu, 3).unwrap();
    assert!((outcome.best_value - 1.0).abs() < 1e-9, "metric {}", outcome.best_value);
    // tuned values were written back and reproduce the score
    let tuned = PipelineConfig::load(&config).unwrap();
    assert_eq!(tuned.lambda, outcome.lambda);
    let out = cmd_correct(&config, &src).unwrap();
    assert_eq!(out, vec!["the red car stops here .", "a blue bus stops here ."]);
}

#[test]
fn tune_with_zero_sweeps_keeps_lambda() {
    let dir = TempDir::new().unwrap();
    let config = write(dir.path(), "config.txt", "mode = identity\nlambda_corr = 3.5\n");
    let src = write(dir.path(), "dev.txt", "a b\n");
    let outcome = cmd_tune(&config, &src, &src, None, Metric::Gleu, 0).unwrap();
    assert_eq!(outcome.lambda.corr, 3.5);
    assert_eq!(PipelineConfig::load(&config).unwrap().lambda.corr, 3.5);
}

#[test]
fn tune_makes_a_required_correction() {
    let dir = TempDir::new().unwrap();
    train_lm(dir.path(), LM_CORPUS);
    write(dir.path(), "confusion.tsv", "rad\tred\n");
    let config = write(
        dir.path(),
        "config.txt",
        // start from a config that refuses to correct
        "mode = identity\nconfusion = confusion.tsv\nlm = lm.arpa\nlambda_corr = 10\nlambda_kenlm = 0\nlambda_wc = 0\n",
    );
    let src = write(dir.path(), "dev_src.txt", "the rad car stops here .\n");
    let rf = write(dir.path(), "dev_ref.txt", "the red car stops here .\n");
    let outcome = cmd_tune(&config, &src, &rf, None, Metric::Gleu, 5).unwrap();
    assert!((outcome.best_value - 1.0).abs() < 1e-9);
    let out = cmd_correct(&config, &src).unwrap();
    assert_eq!(out, vec!["the red car stops here ."]);
}

#[test]
fn report_covers_all_three_metrics() {
    let dir = TempDir::new().unwrap();
    train_lm(dir.path(), LM_CORPUS);
    write(dir.path(), "confusion.tsv", "rad\tred\n");
    let config = write(
        dir.path(),
        "config.txt",
        "mode = identity\nconfusion = confusion.tsv\nlm = lm.arpa\nlambda_corr = 0.2\nlambda_wc = 0.05\n",
    );
    let src = write(dir.path(), "src.txt", "the rad car stops here .\na blue bus stops here .\n");
    let rf = write(dir.path(), "ref.txt", "the red car stops here .\na blue bus stops here .\n");
    let gold = write(dir.path(), "gold.tsv", "0\t1\t2\tred\n");
    let report = cmd_report(&config, &src, &rf, Some(&gold)).unwrap();
    assert_eq!(report.sentences, 2);
    assert!((report.gleu - 1.0).abs() < 1e-9, "perfect system scores GLEU 1");
    let (p, r, f) = report.f05.unwrap();
    assert!((p - 1.0).abs() < 1e-9 && (r - 1.0).abs() < 1e-9 && (f - 1.0).abs() < 1e-9);
    assert!(report.oracle_error.abs() < 1e-12);

    // with an empty confusion table the needed reference leaves the lattice
    let config_empty = write(dir.path(), "config_empty.txt", "mode = identity\nlm = lm.arpa\n");
    let report_empty = cmd_report(&config_empty, &src, &rf, None).unwrap();
    assert!((report_empty.oracle_error - 0.5).abs() < 1e-12);
}

#[test]
fn config_errors_are_rejected() {
    let dir = TempDir::new().unwrap();
    let missing = write(dir.path(), "missing.txt", "mode = identity\nlm = does_not_exist.arpa\n");
    assert!(PipelineConfig::load(&missing).is_err());
    let bad_beam = write(dir.path(), "beam.txt", "mode = identity\nbeam = 0\n");
    assert!(PipelineConfig::load(&bad_beam).is_err());
    let bad_key = write(dir.path(), "key.txt", "mode = identity\nwhatever = 1\n");
    assert!(PipelineConfig::load(&bad_key).is_err());
    let bad_mode = write(dir.path(), "mode.txt", "mode = sometimes\n");
    assert!(PipelineConfig::load(&bad_mode).is_err());
    // nbest mode without a list
    let no_list = write(dir.path(), "nolist.txt", "mode = nbest\n");
    assert!(PipelineConfig::load(&no_list).is_err());
}

#[test]
fn config_round_trips_through_render() {
    let dir = TempDir::new().unwrap();
    train_lm(dir.path(), LM_CORPUS);
    write(dir.path(), "confusion.tsv", "rad\tred\n");
    let config_path = write(
        dir.path(),
        "config.txt",
        "mode = identity\nconfusion = confusion.tsv\nlm = lm.arpa\nbeam = 7\nbackoff = epsilon\nlambda_wc = 0.25\n",
    );
    let cfg = PipelineConfig::load(&config_path).unwrap();
    let rendered = write(dir.path(), "rendered.txt", &cfg.render());
    let back = PipelineConfig::load(&rendered).unwrap();
    assert_eq!(back.beam, 7);
    assert_eq!(back.backoff, cfg.backoff);
    assert_eq!(back.lambda, cfg.lambda);
    assert_eq!(back.confusion, cfg.confusion);
}
