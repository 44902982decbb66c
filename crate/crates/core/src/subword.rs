//! Deterministic word-to-subword segmentation and the mapping transducer.
//!
//! Segmentation is greedy longest-match over a unit vocabulary; non-final
//! pieces carry the "@@" continuation marker. Character fallback makes
//! segmentation total.

use std::collections::{BTreeSet, HashSet};
use std::io::BufRead;

use crate::error::{FstError, Result};
use crate::fst::{Arc, SharedTable, Wfst};
use crate::symbols::{is_marker, Label, SymbolTable, EPS, UNK};
use crate::weight::Weight;

pub const CONTINUATION: &str = "@@";

#[derive(Debug, Clone, Default)]
pub struct SubwordVocab {
    units: BTreeSet<String>,
}

impl SubwordVocab {
    pub fn new() -> Self {
        Self::default()
    }

    /// Units ending in "@@" are continuation pieces; all others are final
    /// pieces.
    pub fn insert(&mut self, unit: &str) {
        self.units.insert(unit.to_string());
    }

    pub fn contains(&self, unit: &str) -> bool {
        self.units.contains(unit)
    }

    pub fn len(&self) -> usize {
        self.units.len()
    }

    pub fn is_empty(&self) -> bool {
        self.units.is_empty()
    }

    /// One unit per line.
    pub fn read<R: BufRead>(r: R) -> Result<Self> {
        let mut v = SubwordVocab::new();
        for line in r.lines() {
            let line = line?;
            let unit = line.trim();
            if !unit.is_empty() {
                v.insert(unit);
            }
        }
        Ok(v)
    }

    /// Derives a unit vocabulary from a BPE merges file ("left right" per
    /// line): every merge result becomes both a final and a continuation
    /// unit.
    pub fn from_merges<R: BufRead>(r: R) -> Result<Self> {
        let mut v = SubwordVocab::new();
        for line in r.lines() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with("#version") {
                continue;
            }
            let joined: String = line.split_whitespace().collect();
            let joined = joined.replace("</w>", "");
            if joined.is_empty() {
                continue;
            }
            v.insert(&joined);
            v.insert(&format!("{}{}", joined, CONTINUATION));
        }
        Ok(v)
    }
}

/// Greedy longest-match segmentation. Always succeeds: unmatched
/// characters fall back to single-character pieces.
pub fn segment_word(vocab: &SubwordVocab, word: &str) -> Vec<String> {
    let chars: Vec<char> = word.chars().collect();
    let mut pieces = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let rest = chars.len() - i;
        let mut taken = 0usize;
        for l in (1..=rest).rev() {
            let piece: String = chars[i..i + l].iter().collect();
            if i + l == chars.len() {
                if vocab.contains(&piece) {
                    pieces.push(piece);
                    taken = l;
                    break;
                }
            } else {
                let marked = format!("{}{}", piece, CONTINUATION);
                if vocab.contains(&marked) {
                    pieces.push(marked);
                    taken = l;
                    break;
                }
            }
        }
        if taken == 0 {
            // character fallback
            let c: String = chars[i..i + 1].iter().collect();
            if i + 1 == chars.len() {
                pieces.push(c);
            } else {
                pieces.push(format!("{}{}", c, CONTINUATION));
            }
            taken = 1;
        }
        i += taken;
    }
    pieces
}

/// Joins continuation-marked pieces back into words.
pub fn desegment(pieces: &[&str]) -> Result<Vec<String>> {
    let mut words = Vec::new();
    let mut pending = String::new();
    for piece in pieces {
        match piece.strip_suffix(CONTINUATION) {
            Some(stem) => pending.push_str(stem),
            None => {
                pending.push_str(piece);
                words.push(std::mem::take(&mut pending));
            }
        }
    }
    if !pending.is_empty() {
        return Err(FstError::Format(
            "dangling continuation marker at end of sequence".into(),
        ));
    }
    Ok(words)
}

/// Builds the subword symbol table covering all pieces the given words can
/// produce, plus the markers (which map to themselves).
pub fn build_subword_table(
    word_syms: &SymbolTable,
    words: &HashSet<Label>,
    vocab: &SubwordVocab,
) -> SymbolTable {
    let mut table = SymbolTable::new();
    let mut sorted: Vec<Label> = words.iter().copied().collect();
    sorted.sort_unstable();
    for &w in &sorted {
        if is_marker(w) || w == UNK {
            continue;
        }
        if let Some(text) = word_syms.sym(w) {
            for piece in segment_word(vocab, text) {
                table.intern(&piece);
            }
        }
    }
    table
}

/// Single-looping-state transducer rewriting each word as its piece
/// sequence. Markers and `<unk>` map to themselves.
pub fn build_t(
    word_syms: &SharedTable,
    subword_syms: &SharedTable,
    words: &HashSet<Label>,
    vocab: &SubwordVocab,
) -> Result<Wfst> {
    let mut fst = Wfst::new(word_syms.clone(), subword_syms.clone());
    let loop_state = fst.add_state();
    fst.set_start(loop_state);
    fst.set_final(loop_state, Weight::one());
    let mut sorted: Vec<Label> = words.iter().copied().collect();
    sorted.sort_unstable();
    for w in sorted {
        if is_marker(w) || w == UNK {
            fst.add_arc(loop_state, Arc::new(w, w, Weight::one(), loop_state));
            continue;
        }
        let text = word_syms
            .sym(w)
            .ok_or_else(|| FstError::Config(format!("word id {} missing from table", w)))?;
        let pieces = segment_word(vocab, text);
        let piece_ids: Vec<Label> = pieces
            .iter()
            .map(|p| {
                subword_syms.get(p).ok_or_else(|| {
                    FstError::Config(format!("piece {:?} missing from subword table", p))
                })
            })
            .collect::<Result<_>>()?;
        let mut prev = loop_state;
        for (i, &p) in piece_ids.iter().enumerate() {
            let next = if i + 1 == piece_ids.len() {
                loop_state
            } else {
                fst.add_state()
            };
            let ilabel = if i == 0 { w } else { EPS };
            fst.add_arc(prev, Arc::new(ilabel, p, Weight::one(), next));
            prev = next;
        }
    }
    Ok(fst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn vocab(units: &[&str]) -> SubwordVocab {
        let mut v = SubwordVocab::new();
        for u in units {
            v.insert(u);
        }
        v
    }

    #[test]
    fn whole_word_unit_wins() {
        let v = vocab(&["situation", "situ@@", "ation"]);
        assert_eq!(segment_word(&v, "situation"), vec!["situation"]);
    }

    #[test]
    fn greedy_longest_match() {
        let v = vocab(&["situ@@", "ation"]);
        assert_eq!(segment_word(&v, "situation"), vec!["situ@@", "ation"]);
    }

    #[test]
    fn unseen_characters_fall_back_per_char() {
        let v = vocab(&[]);
        assert_eq!(segment_word(&v, "ab"), vec!["a@@", "b"]);
        assert_eq!(segment_word(&v, "x"), vec!["x"]);
    }

    #[test]
    fn desegment_inverts() {
        assert_eq!(
            desegment(&["situ@@", "ation"]).unwrap(),
            vec!["situation".to_string()]
        );
        assert_eq!(
            desegment(&["no", "way"]).unwrap(),
            vec!["no".to_string(), "way".to_string()]
        );
        assert!(desegment(&["situ@@"]).is_err());
    }

    proptest! {
        #[test]
        fn desegment_of_segment_is_identity(word in "[a-z]{1,12}") {
            let v = vocab(&["si@@", "tu@@", "at@@", "ion", "ab@@", "ba"]);
            let pieces = segment_word(&v, &word);
            let refs: Vec<&str> = pieces.iter().map(|p| p.as_str()).collect();
            prop_assert_eq!(desegment(&refs).unwrap(), vec![word]);
        }
    }
}
