//! Weighted finite-state transducer toolkit for lattice-based grammatical
//! error correction.
//!
//! The pipeline builds a constrained hypothesis space for each input
//! sentence by composing an input lattice with an edit transducer,
//! a marker penalizer, and an n-gram language model acceptor, then decodes
//! it exactly by shortest-path search or, after mapping words to subword
//! units, by beam search with pluggable external scorers.

pub mod compose;
pub mod decoder;
pub mod error;
pub mod fst;
pub mod lattice;
pub mod metrics;
pub mod ngram;
pub mod optimize;
pub mod powell;
pub mod shortest;
pub mod subword;
pub mod symbols;
pub mod textio;
pub mod weight;

pub use compose::compose;
pub use error::{FstError, Result};
pub use fst::{build_linear, union, Arc, PhiMode, ProjectSide, SharedTable, StateId, Wfst};
pub use lattice::{
    assemble_hbpe, assemble_hword, build_base_lattice, build_edit_transducer,
    build_input_identity, build_input_nbest, build_penalizer, levenshtein, oracle_contains,
    ConfusionTable, LambdaParams, NBestEntry, NBestList,
};
pub use metrics::{edit_f05, gleu, oracle_error_rate, Edit, EvalCorpus};
pub use ngram::{BackoffMode, NGramModel};
pub use optimize::{optimize, OptimizePasses};
pub use powell::{powell_tune, Bounds, TuneResult};
pub use shortest::shortest_path;
pub use subword::{build_subword_table, build_t, desegment, segment_word, SubwordVocab};
pub use symbols::{Label, SymbolTable};
pub use textio::{read_text, write_text};
pub use weight::Weight;
