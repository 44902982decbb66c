//! Acceptance gate, end-to-end half: the command pipeline must make the
//! expected correction and back off to the identity under a prohibitive
//! correction penalty.

use std::fs;
use std::path::{Path, PathBuf};

use fstgec_cli::cmd_correct;
use tempfile::TempDir;

fn write(dir: &Path, name: &str, content: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, content).unwrap();
    p
}

/// A toy corpus in which "situation" is the fluent choice in the running
/// sentence's context.
const LM_CORPUS: &str = "\
in a such situation there is no other way .
in such a situation there is no other way .
the situation is clear .
a situation like this calls for care .
there is no way .
";

fn setup(dir: &Path, lambda_corr: f64) -> (PathBuf, PathBuf) {
    write(dir, "lm_corpus.txt", LM_CORPUS);
    let corpus: Vec<Vec<String>> = LM_CORPUS
        .lines()
        .map(|l| l.split_whitespace().map(str::to_string).collect())
        .collect();
    let model = fstgec::ngram::NGramModel::train(&corpus, 3, 0.6).unwrap();
    write(dir, "lm.arpa", &model.write_arpa());
    write(dir, "confusion.tsv", "situaction\tsituation,acquisition\n");
    let config = write(
        dir,
        "config.txt",
        &format!(
            "mode = identity\nconfusion = confusion.tsv\nlm = lm.arpa\n\
             lambda_corr = {}\nlambda_kenlm = 1.0\nlambda_wc = 0.1\n",
            lambda_corr
        ),
    );
    let input = write(dir, "input.txt", "in a such situaction there is no other way .\n");
    (config, input)
}

#[test]
fn criterion_08_end_to_end_behavior() {
    let dir = TempDir::new().unwrap();
    let (config, input) = setup(dir.path(), 0.5);
    let out = cmd_correct(&config, &input).unwrap();
    assert_eq!(out, vec!["in a such situation there is no other way .".to_string()]);

    // a prohibitive correction penalty biases towards no corrections
    let dir_hi = TempDir::new().unwrap();
    let (config_hi, input_hi) = setup(dir_hi.path(), 1e6);
    let out_hi = cmd_correct(&config_hi, &input_hi).unwrap();
    assert_eq!(out_hi, vec!["in a such situaction there is no other way .".to_string()]);
    println!("criterion 8 PASS: pipeline corrects the example and respects a prohibitive penalty");
}
