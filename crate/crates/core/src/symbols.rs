//! Bidirectional symbol/id tables with the reserved label block used
//! throughout the pipeline.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use crate::error::{FstError, Result};

pub type Label = u32;

/// Reserved labels. User symbols start at [`FIRST_USER_ID`].
pub const EPS: Label = 0;
pub const SIGMA: Label = 1;
pub const PHI: Label = 2;
pub const CORR: Label = 3;
pub const MCORR: Label = 4;
pub const UNK: Label = 5;
pub const FIRST_USER_ID: Label = 6;

pub const EPS_SYM: &str = "<eps>";
pub const SIGMA_SYM: &str = "<sigma>";
pub const PHI_SYM: &str = "<phi>";
pub const CORR_SYM: &str = "<corr>";
pub const MCORR_SYM: &str = "<mcorr>";
pub const UNK_SYM: &str = "<unk>";

pub fn is_special(label: Label) -> bool {
    label == EPS || label == SIGMA || label == PHI
}

/// Correction marker tokens, transparent to LMs and stripped from output.
pub fn is_marker(label: Label) -> bool {
    label == CORR || label == MCORR
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolTable {
    id_to_sym: Vec<String>,
    sym_to_id: HashMap<String, Label>,
}

impl SymbolTable {
    pub fn new() -> Self {
        let mut t = SymbolTable {
            id_to_sym: Vec::new(),
            sym_to_id: HashMap::new(),
        };
        for s in [EPS_SYM, SIGMA_SYM, PHI_SYM, CORR_SYM, MCORR_SYM, UNK_SYM] {
            t.intern(s);
        }
        t
    }

    /// Insert a symbol if absent, returning its id.
    pub fn intern(&mut self, sym: &str) -> Label {
        if let Some(&id) = self.sym_to_id.get(sym) {
            return id;
        }
        let id = self.id_to_sym.len() as Label;
        self.id_to_sym.push(sym.to_string());
        self.sym_to_id.insert(sym.to_string(), id);
        id
    }

    pub fn get(&self, sym: &str) -> Option<Label> {
        self.sym_to_id.get(sym).copied()
    }

    pub fn sym(&self, id: Label) -> Option<&str> {
        self.id_to_sym.get(id as usize).map(|s| s.as_str())
    }

    pub fn len(&self) -> usize {
        self.id_to_sym.len()
    }

    pub fn is_empty(&self) -> bool {
        self.id_to_sym.is_empty()
    }

    /// Ids of all non-reserved symbols.
    pub fn user_ids(&self) -> impl Iterator<Item = Label> + '_ {
        (FIRST_USER_ID..self.id_to_sym.len() as Label).into_iter()
    }

    pub fn intern_tokens(&mut self, tokens: &[&str]) -> Vec<Label> {
        tokens.iter().map(|t| self.intern(t)).collect()
    }

    pub fn lookup_tokens(&self, tokens: &[&str]) -> Vec<Option<Label>> {
        tokens.iter().map(|t| self.get(t)).collect()
    }

    pub fn write<W: Write>(&self, mut w: W) -> Result<()> {
        for (id, sym) in self.id_to_sym.iter().enumerate() {
            writeln!(w, "{} {}", sym, id)?;
        }
        Ok(())
    }

    /// Reads a "symbol id" per-line table. Reserved ids must agree with the
    /// built-in block when present.
    pub fn read<R: BufRead>(r: R) -> Result<Self> {
        let mut entries: Vec<(String, Label)> = Vec::new();
        for (lineno, line) in r.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let sym = parts.next().unwrap().to_string();
            let id: Label = parts
                .next()
                .ok_or_else(|| FstError::Parse {
                    line: lineno + 1,
                    msg: "expected 'symbol id'".into(),
                })?
                .parse()
                .map_err(|_| FstError::Parse {
                    line: lineno + 1,
                    msg: "bad id".into(),
                })?;
            entries.push((sym, id));
        }
        let mut table = SymbolTable::new();
        entries.sort_by_key(|e| e.1);
        for (sym, id) in entries {
            if id < FIRST_USER_ID {
                if table.sym(id) != Some(sym.as_str()) {
                    return Err(FstError::Format(format!(
                        "reserved id {} must be {}, got {}",
                        id,
                        table.sym(id).unwrap_or("?"),
                        sym
                    )));
                }
                continue;
            }
            let got = table.intern(&sym);
            if got != id {
                return Err(FstError::Format(format!(
                    "non-contiguous or duplicate id {} for symbol {}",
                    id, sym
                )));
            }
        }
        Ok(table)
    }
}

impl Default for SymbolTable {
    fn default() -> Self {
        SymbolTable::new()
    }
}
