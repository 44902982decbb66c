//! Corpus-level evaluation: GLEU, a simplified edit-level F0.5, and the
//! oracle sentence error rate.

use std::collections::HashMap;
use std::io::BufRead;

use crate::error::{FstError, Result};
use crate::fst::Wfst;
use crate::lattice::{levenshtein, oracle_contains};

/// Parallel evaluation corpus; gold edits are optional and only needed
/// for F0.5.
#[derive(Debug, Clone, Default)]
pub struct EvalCorpus {
    pub sources: Vec<Vec<String>>,
    pub references: Vec<Vec<String>>,
    pub gold_edits: Vec<Vec<Edit>>,
}

/// A span replacement over source tokens: `[start, end)` becomes
/// `replacement` (empty for deletions).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Edit {
    pub start: usize,
    pub end: usize,
    pub replacement: Vec<String>,
}

impl EvalCorpus {
    pub fn new(sources: Vec<Vec<String>>, references: Vec<Vec<String>>) -> Result<Self> {
        if sources.len() != references.len() {
            return Err(FstError::Config(
                "source and reference corpora have different lengths".into(),
            ));
        }
        let n = sources.len();
        Ok(EvalCorpus {
            sources,
            references,
            gold_edits: vec![Vec::new(); n],
        })
    }

    pub fn with_gold_edits(mut self, edits: Vec<Vec<Edit>>) -> Result<Self> {
        if edits.len() != self.sources.len() {
            return Err(FstError::Config("gold edits length mismatch".into()));
        }
        for (i, sent_edits) in edits.iter().enumerate() {
            let len = self.sources[i].len();
            let mut spans: Vec<(usize, usize)> = Vec::new();
            for e in sent_edits {
                if e.start > e.end || e.end > len {
                    return Err(FstError::Config(format!(
                        "edit span {}..{} out of bounds for sentence {}",
                        e.start, e.end, i
                    )));
                }
                spans.push((e.start, e.end));
            }
            spans.sort_unstable();
            for pair in spans.windows(2) {
                if pair[1].0 < pair[0].1 {
                    return Err(FstError::Config(format!(
                        "overlapping gold edits in sentence {}",
                        i
                    )));
                }
            }
        }
        self.gold_edits = edits;
        Ok(self)
    }
}

/// Parses "sent_id<TAB>start<TAB>end<TAB>replacement" lines into
/// per-sentence edit sets.
pub fn read_gold_edits<R: BufRead>(r: R, num_sentences: usize) -> Result<Vec<Vec<Edit>>> {
    let mut edits = vec![Vec::new(); num_sentences];
    for (idx, line) in r.lines().enumerate() {
        let line = line?;
        let line = line.trim_end();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() < 3 {
            return Err(FstError::Parse {
                line: idx + 1,
                msg: "expected 'sent_id<TAB>start<TAB>end<TAB>replacement'".into(),
            });
        }
        let perr = |msg: &str| FstError::Parse {
            line: idx + 1,
            msg: msg.into(),
        };
        let sent: usize = fields[0].parse().map_err(|_| perr("bad sentence id"))?;
        if sent >= num_sentences {
            return Err(perr("sentence id out of range"));
        }
        let start: usize = fields[1].parse().map_err(|_| perr("bad span start"))?;
        let end: usize = fields[2].parse().map_err(|_| perr("bad span end"))?;
        let replacement = fields
            .get(3)
            .map(|f| f.split_whitespace().map(str::to_string).collect())
            .unwrap_or_default();
        edits[sent].push(Edit {
            start,
            end,
            replacement,
        });
    }
    Ok(edits)
}

fn ngram_counts<'a>(tokens: &'a [String], n: usize) -> HashMap<&'a [String], usize> {
    let mut counts = HashMap::new();
    if tokens.len() >= n {
        for i in 0..=tokens.len() - n {
            *counts.entry(&tokens[i..i + n]).or_insert(0) += 1;
        }
    }
    counts
}

/// Corpus-level GLEU: geometric mean over n = 1..=max_n of penalized
/// precisions, times the brevity penalty. Matches between hypothesis and
/// source n-grams absent from the reference count against the precision.
pub fn gleu(
    hyps: &[Vec<String>],
    sources: &[Vec<String>],
    refs: &[Vec<String>],
    max_n: usize,
) -> f64 {
    if hyps.is_empty() || hyps.len() != sources.len() || hyps.len() != refs.len() {
        return 0.0;
    }
    let mut hyp_len = 0usize;
    let mut ref_len = 0usize;
    let mut matches = vec![0i64; max_n]; // m_n − d_n, aggregated
    let mut totals = vec![0i64; max_n]; // h_n
    for ((hyp, src), rf) in hyps.iter().zip(sources).zip(refs) {
        hyp_len += hyp.len();
        ref_len += rf.len();
        for n in 1..=max_n {
            let h = ngram_counts(hyp, n);
            let s = ngram_counts(src, n);
            let r = ngram_counts(rf, n);
            for (gram, &hc) in &h {
                totals[n - 1] += hc as i64;
                let rc = r.get(gram).copied().unwrap_or(0);
                matches[n - 1] += hc.min(rc) as i64;
                if rc == 0 {
                    // hypothesis kept a source n-gram the reference removed
                    let sc = s.get(gram).copied().unwrap_or(0);
                    matches[n - 1] -= hc.min(sc) as i64;
                }
            }
        }
    }
    if hyp_len == 0 {
        return 0.0;
    }
    let mut log_sum = 0.0;
    for n in 0..max_n {
        if totals[n] == 0 {
            continue; // all sentences shorter than n+1 tokens
        }
        let p = (matches[n].max(0) as f64) / totals[n] as f64;
        if p <= 0.0 {
            return 0.0;
        }
        log_sum += p.ln() / max_n as f64;
    }
    let bp = (1.0 - ref_len as f64 / hyp_len as f64).exp().min(1.0);
    bp * log_sum.exp()
}

/// Extracts system edits from a token-Levenshtein alignment of source and
/// hypothesis, merging adjacent non-match operations into spans.
pub fn extract_edits(source: &[String], hyp: &[String]) -> Vec<Edit> {
    let n = source.len();
    let m = hyp.len();
    let mut dist = vec![vec![0usize; m + 1]; n + 1];
    for i in 0..=n {
        dist[i][0] = i;
    }
    for j in 0..=m {
        dist[0][j] = j;
    }
    for i in 1..=n {
        for j in 1..=m {
            let sub = dist[i - 1][j - 1] + usize::from(source[i - 1] != hyp[j - 1]);
            dist[i][j] = sub.min(dist[i - 1][j] + 1).min(dist[i][j - 1] + 1);
        }
    }
    // backtrace, preferring matches, then substitutions, then deletion
    #[derive(PartialEq, Clone, Copy)]
    enum Op {
        Match,
        Sub,
        Del,
        Ins,
    }
    let mut ops: Vec<(Op, usize, usize)> = Vec::new();
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        if i > 0 && j > 0 && source[i - 1] == hyp[j - 1] && dist[i][j] == dist[i - 1][j - 1] {
            ops.push((Op::Match, i - 1, j - 1));
            i -= 1;
            j -= 1;
        } else if i > 0 && j > 0 && dist[i][j] == dist[i - 1][j - 1] + 1 {
            ops.push((Op::Sub, i - 1, j - 1));
            i -= 1;
            j -= 1;
        } else if i > 0 && dist[i][j] == dist[i - 1][j] + 1 {
            ops.push((Op::Del, i - 1, j));
            i -= 1;
        } else {
            ops.push((Op::Ins, i, j - 1));
            j -= 1;
        }
    }
    ops.reverse();
    // merge adjacent non-match ops into span edits
    let mut edits = Vec::new();
    let mut cur: Option<(usize, usize, usize, usize)> = None; // src span, hyp span
    for &(op, si, hj) in &ops {
        match op {
            Op::Match => {
                if let Some((s0, s1, h0, h1)) = cur.take() {
                    edits.push(Edit {
                        start: s0,
                        end: s1,
                        replacement: hyp[h0..h1].to_vec(),
                    });
                }
            }
            Op::Sub => {
                cur = Some(match cur {
                    Some((s0, _, h0, _)) => (s0, si + 1, h0, hj + 1),
                    None => (si, si + 1, hj, hj + 1),
                });
            }
            Op::Del => {
                cur = Some(match cur {
                    Some((s0, _, h0, h1)) => (s0, si + 1, h0, h1),
                    None => (si, si + 1, hj, hj),
                });
            }
            Op::Ins => {
                cur = Some(match cur {
                    Some((s0, s1, h0, _)) => (s0, s1, h0, hj + 1),
                    None => (si, si, hj, hj + 1),
                });
            }
        }
    }
    if let Some((s0, s1, h0, h1)) = cur {
        edits.push(Edit {
            start: s0,
            end: s1,
            replacement: hyp[h0..h1].to_vec(),
        });
    }
    edits
}

/// Edit-level precision, recall, and F0.5. System edits must match a gold
/// edit exactly (span and replacement).
pub fn edit_f05(
    hyps: &[Vec<String>],
    sources: &[Vec<String>],
    gold: &[Vec<Edit>],
) -> (f64, f64, f64) {
    let mut proposed = 0usize;
    let mut gold_total = 0usize;
    let mut matched = 0usize;
    for ((hyp, src), sent_gold) in hyps.iter().zip(sources).zip(gold) {
        let sys = extract_edits(src, hyp);
        proposed += sys.len();
        gold_total += sent_gold.len();
        matched += sys.iter().filter(|e| sent_gold.contains(e)).count();
    }
    let p = if proposed == 0 {
        1.0
    } else {
        matched as f64 / proposed as f64
    };
    let r = if gold_total == 0 {
        1.0
    } else {
        matched as f64 / gold_total as f64
    };
    let f = if p + r == 0.0 || matched == 0 {
        0.0
    } else {
        1.25 * p * r / (0.25 * p + r)
    };
    (p, r, f)
}

/// Fraction of sentences whose reference is absent from the hypothesis
/// lattice the builder produces.
pub fn oracle_error_rate<F>(corpus: &EvalCorpus, mut builder: F) -> f64
where
    F: FnMut(&[String]) -> Wfst,
{
    if corpus.sources.is_empty() {
        return 0.0;
    }
    let mut missing = 0usize;
    for (src, rf) in corpus.sources.iter().zip(&corpus.references) {
        let lattice = builder(src);
        let reference: Vec<&str> = rf.iter().map(String::as_str).collect();
        if !oracle_contains(&lattice, &reference) {
            missing += 1;
        }
    }
    missing as f64 / corpus.sources.len() as f64
}

/// Sentence-level helper used by reporting: the fraction of tokens changed.
pub fn token_change_rate(source: &[String], hyp: &[String]) -> f64 {
    if source.is_empty() && hyp.is_empty() {
        return 0.0;
    }
    levenshtein(source, hyp) as f64 / source.len().max(hyp.len()) as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn corpus(lines: &[&str]) -> Vec<Vec<String>> {
        lines
            .iter()
            .map(|l| l.split_whitespace().map(str::to_string).collect())
            .collect()
    }

    #[test]
    fn perfect_hypotheses_score_one() {
        let refs = corpus(&["the cat sat .", "a dog barks ."]);
        let srcs = corpus(&["the cat sit .", "a dog bark ."]);
        let score = gleu(&refs, &srcs, &refs, 4);
        assert!((score - 1.0).abs() < 1e-9, "score {}", score);
    }

    #[test]
    fn empty_hypotheses_score_zero() {
        let refs = corpus(&["the cat"]);
        let srcs = corpus(&["the cat"]);
        let hyps = corpus(&[""]);
        assert_eq!(gleu(&hyps, &srcs, &refs, 4), 0.0);
        assert_eq!(gleu(&[], &[], &[], 4), 0.0);
    }

    #[test]
    fn gleu_is_permutation_invariant_and_bounded() {
        let srcs = corpus(&["a b c d", "e f g h"]);
        let refs = corpus(&["a x c d", "e f y h"]);
        let hyps = corpus(&["a x c d", "e f g h"]);
        let forward = gleu(&hyps, &srcs, &refs, 4);
        let hyps2 = vec![hyps[1].clone(), hyps[0].clone()];
        let srcs2 = vec![srcs[1].clone(), srcs[0].clone()];
        let refs2 = vec![refs[1].clone(), refs[0].clone()];
        let backward = gleu(&hyps2, &srcs2, &refs2, 4);
        assert!((forward - backward).abs() < 1e-12);
        assert!((0.0..=1.0).contains(&forward));
    }

    #[test]
    fn gleu_penalizes_retained_source_errors() {
        let srcs = corpus(&["a b c d e"]);
        let refs = corpus(&["a x c d e"]);
        let kept_error = gleu(&srcs, &srcs, &refs, 2);
        let fixed = gleu(&refs, &srcs, &refs, 2);
        assert!(fixed > kept_error);
    }

    #[test]
    fn extract_edits_merges_adjacent_ops() {
        let src = corpus(&["a b c d"]).remove(0);
        let hyp = corpus(&["a x y d"]).remove(0);
        let edits = extract_edits(&src, &hyp);
        assert_eq!(
            edits,
            vec![Edit {
                start: 1,
                end: 3,
                replacement: vec!["x".into(), "y".into()],
            }]
        );
    }

    #[test]
    fn extract_edits_handles_insertion_and_deletion() {
        let src = corpus(&["a b c"]).remove(0);
        let hyp = corpus(&["a c"]).remove(0);
        let edits = extract_edits(&src, &hyp);
        assert_eq!(
            edits,
            vec![Edit {
                start: 1,
                end: 2,
                replacement: vec![],
            }]
        );
        let hyp2 = corpus(&["a b x c"]).remove(0);
        let edits2 = extract_edits(&src, &hyp2);
        assert_eq!(edits2.len(), 1);
        assert_eq!(edits2[0].replacement, vec!["x".to_string()]);
    }

    #[test]
    fn f05_perfect_and_degenerate_cases() {
        let srcs = corpus(&["a b c"]);
        let refs_hyp = corpus(&["a x c"]);
        let gold = vec![vec![Edit {
            start: 1,
            end: 2,
            replacement: vec!["x".into()],
        }]];
        let (p, r, f) = edit_f05(&refs_hyp, &srcs, &gold);
        assert_eq!((p, r, f), (1.0, 1.0, 1.0));
        // identity hypothesis with nonempty gold: R = 0, F = 0
        let (p2, r2, f2) = edit_f05(&srcs, &srcs, &gold);
        assert_eq!(p2, 1.0); // nothing proposed
        assert_eq!(r2, 0.0);
        assert_eq!(f2, 0.0);
    }

    #[test]
    fn f05_half_precision_half_recall() {
        // two gold edits, system makes one of them plus one spurious edit
        let srcs = corpus(&["a b c d e"]);
        let hyps = corpus(&["a x c d z"]);
        let gold = vec![vec![
            Edit {
                start: 1,
                end: 2,
                replacement: vec!["x".into()],
            },
            Edit {
                start: 2,
                end: 3,
                replacement: vec!["y".into()],
            },
        ]];
        let (p, r, f) = edit_f05(&hyps, &srcs, &gold);
        assert!((p - 0.5).abs() < 1e-12);
        assert!((r - 0.5).abs() < 1e-12);
        assert!((f - 0.5).abs() < 1e-12);
    }

    #[test]
    fn gold_edit_file_parses() {
        let text = "0\t1\t2\tx\n0\t3\t3\ty z\n1\t0\t1\t\n";
        let edits = read_gold_edits(text.as_bytes(), 2).unwrap();
        assert_eq!(edits[0].len(), 2);
        assert_eq!(edits[0][1].replacement, vec!["y".to_string(), "z".to_string()]);
        assert_eq!(edits[1][0].replacement, Vec::<String>::new());
    }

    #[test]
    fn overlapping_gold_edits_rejected() {
        let srcs = corpus(&["a b c"]);
        let refs = corpus(&["a b c"]);
        let corpus = EvalCorpus::new(srcs, refs).unwrap();
        let bad = vec![vec![
            Edit {
                start: 0,
                end: 2,
                replacement: vec![],
            },
            Edit {
                start: 1,
                end: 3,
                replacement: vec![],
            },
        ]];
        assert!(corpus.with_gold_edits(bad).is_err());
    }
}
