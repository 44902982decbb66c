//! AT&T-style text serialization.
//!
//! One arc per line: `src dst isym osym [weight]`; final states as
//! `state [weight]`; the start state is the source of the first line.
//! Omitted weights default to 0.

use std::collections::HashMap;

use crate::error::{FstError, Result};
use crate::fst::{Arc, StateId, Wfst};
use crate::symbols::SymbolTable;
use crate::weight::Weight;

pub fn write_text(f: &Wfst) -> String {
    let mut out = String::new();
    let sym = |t: &SymbolTable, id| t.sym(id).unwrap_or("<bad>").to_string();
    let mut states: Vec<StateId> = Vec::new();
    if let Some(s) = f.start {
        states.push(s);
    }
    for s in 0..f.num_states() {
        if Some(s) != f.start {
            states.push(s);
        }
    }
    for &s in &states {
        for a in &f.arcs[s] {
            out.push_str(&format!(
                "{} {} {} {}",
                s,
                a.next_state,
                sym(&f.isyms, a.ilabel),
                sym(&f.osyms, a.olabel)
            ));
            if a.weight != Weight::one() {
                out.push_str(&format!(" {}", a.weight.value()));
            }
            out.push('\n');
        }
    }
    let mut finals: Vec<(StateId, Weight)> = f
        .finals
        .iter()
        .filter(|(_, w)| !w.is_zero())
        .map(|(&s, &w)| (s, w))
        .collect();
    finals.sort_by_key(|e| {
        // start-state final line first so a final-only machine keeps its start
        (Some(e.0) != f.start, e.0)
    });
    for (s, w) in finals {
        if w == Weight::one() {
            out.push_str(&format!("{}\n", s));
        } else {
            out.push_str(&format!("{} {}\n", s, w.value()));
        }
    }
    out
}

pub fn read_text(
    text: &str,
    isyms: crate::fst::SharedTable,
    osyms: crate::fst::SharedTable,
) -> Result<Wfst> {
    let mut fst = Wfst::new(isyms, osyms);
    let mut ids: HashMap<u64, StateId> = HashMap::new();
    let ensure = |fst: &mut Wfst, ids: &mut HashMap<u64, StateId>, id: u64| -> StateId {
        *ids.entry(id).or_insert_with(|| fst.add_state())
    };
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let perr = |msg: &str| FstError::Parse {
            line: lineno,
            msg: msg.into(),
        };
        let state_num = |s: &str| -> Result<u64> {
            s.parse().map_err(|_| FstError::Parse {
                line: lineno,
                msg: format!("bad state id {:?}", s),
            })
        };
        match fields.len() {
            1 | 2 => {
                // final-state line
                let s = state_num(fields[0])?;
                let w = if fields.len() == 2 {
                    Weight::new(
                        fields[1]
                            .parse()
                            .map_err(|_| perr("bad final weight"))?,
                    )
                } else {
                    Weight::one()
                };
                let s = ensure(&mut fst, &mut ids, s);
                if fst.start.is_none() {
                    fst.set_start(s);
                }
                fst.set_final(s, w);
            }
            4 | 5 => {
                let src = state_num(fields[0])?;
                let dst = state_num(fields[1])?;
                let il = fst
                    .isyms
                    .get(fields[2])
                    .ok_or_else(|| perr(&format!("unknown input symbol {:?}", fields[2])))?;
                let ol = fst
                    .osyms
                    .get(fields[3])
                    .ok_or_else(|| perr(&format!("unknown output symbol {:?}", fields[3])))?;
                let w = if fields.len() == 5 {
                    Weight::new(fields[4].parse().map_err(|_| perr("bad weight"))?)
                } else {
                    Weight::one()
                };
                let src = ensure(&mut fst, &mut ids, src);
                let dst = ensure(&mut fst, &mut ids, dst);
                if fst.start.is_none() {
                    fst.set_start(src);
                }
                fst.add_arc(src, Arc::new(il, ol, w, dst));
            }
            _ => return Err(perr("expected 'src dst isym osym [w]' or 'state [w]'")),
        }
    }
    Ok(fst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fst::{build_linear, SharedTable};

    fn table(words: &[&str]) -> SharedTable {
        let mut t = SymbolTable::new();
        for w in words {
            t.intern(w);
        }
        std::sync::Arc::new(t)
    }

    #[test]
    fn empty_fst_round_trips() {
        let syms = table(&[]);
        let f = Wfst::acceptor(syms.clone());
        let text = write_text(&f);
        assert!(text.is_empty());
        let back = read_text(&text, syms.clone(), syms).unwrap();
        assert_eq!(back.num_states(), 0);
        assert!(back.start.is_none());
    }

    #[test]
    fn final_only_machine() {
        let syms = table(&[]);
        let back = read_text("0\n", syms.clone(), syms).unwrap();
        assert_eq!(back.start, Some(0));
        assert!(back.string_weight(&[]).approx_eq(Weight::one(), 1e-9));
    }

    #[test]
    fn linear_round_trip() {
        let syms = table(&["In", "a", "such"]);
        let labels: Vec<_> = ["In", "a", "such"]
            .iter()
            .map(|t| syms.get(t).unwrap())
            .collect();
        let f = build_linear(&syms, &labels, Weight::new(0.5));
        let text = write_text(&f);
        let back = read_text(&text, syms.clone(), syms).unwrap();
        assert_eq!(back.num_arcs(), f.num_arcs());
        assert_eq!(write_text(&back), text);
        assert!(back
            .string_weight(&labels)
            .approx_eq(Weight::new(0.5), 1e-9));
    }

    #[test]
    fn unknown_symbol_is_a_parse_error() {
        let syms = table(&["a"]);
        let err = read_text("0 1 a zzz\n1\n", syms.clone(), syms).unwrap_err();
        match err {
            FstError::Parse { line, .. } => assert_eq!(line, 1),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn malformed_line_reports_number() {
        let syms = table(&["a"]);
        let err = read_text("0 1 a\n", syms.clone(), syms).unwrap_err();
        assert!(matches!(err, FstError::Parse { line: 1, .. }));
    }
}
