//! The weighted transducer carrier type and basic constructions.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::error::{FstError, Result};
use crate::symbols::{is_special, Label, SymbolTable, EPS, PHI, SIGMA};
use crate::weight::Weight;

pub type StateId = usize;

pub type SharedTable = std::sync::Arc<SymbolTable>;

/// A transition: input label, output label, weight, destination.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arc {
    pub ilabel: Label,
    pub olabel: Label,
    pub weight: Weight,
    pub next_state: StateId,
}

impl Arc {
    pub fn new(ilabel: Label, olabel: Label, weight: Weight, next_state: StateId) -> Self {
        Arc {
            ilabel,
            olabel,
            weight,
            next_state,
        }
    }
}

/// How φ-labeled arcs behave during composition and intersection.
///
/// `Complement` consumes a symbol that has no explicit arc at the state
/// (the penalizer's word loop). `Failure` is non-consuming and is followed
/// only when no explicit arc matches (n-gram backoff).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PhiMode {
    #[default]
    Complement,
    Failure,
}

/// Weighted finite-state transducer over the tropical semiring.
///
/// Immutable once built; all pipeline operations produce fresh machines.
#[derive(Debug, Clone)]
pub struct Wfst {
    pub arcs: Vec<Vec<Arc>>,
    pub start: Option<StateId>,
    pub finals: HashMap<StateId, Weight>,
    pub isyms: SharedTable,
    pub osyms: SharedTable,
    pub phi_mode: PhiMode,
}

impl Wfst {
    pub fn new(isyms: SharedTable, osyms: SharedTable) -> Self {
        Wfst {
            arcs: Vec::new(),
            start: None,
            finals: HashMap::new(),
            isyms,
            osyms,
            phi_mode: PhiMode::Complement,
        }
    }

    /// Acceptor constructor: one table for both tapes.
    pub fn acceptor(syms: SharedTable) -> Self {
        Wfst::new(syms.clone(), syms)
    }

    pub fn add_state(&mut self) -> StateId {
        self.arcs.push(Vec::new());
        self.arcs.len() - 1
    }

    pub fn add_states(&mut self, n: usize) -> StateId {
        let first = self.arcs.len();
        for _ in 0..n {
            self.arcs.push(Vec::new());
        }
        first
    }

    pub fn num_states(&self) -> usize {
        self.arcs.len()
    }

    pub fn num_arcs(&self) -> usize {
        self.arcs.iter().map(|a| a.len()).sum()
    }

    pub fn set_start(&mut self, s: StateId) {
        debug_assert!(s < self.arcs.len());
        self.start = Some(s);
    }

    pub fn set_final(&mut self, s: StateId, w: Weight) {
        debug_assert!(s < self.arcs.len());
        let e = self.finals.entry(s).or_insert(Weight::zero());
        *e = e.plus(w);
    }

    pub fn final_weight(&self, s: StateId) -> Weight {
        self.finals.get(&s).copied().unwrap_or(Weight::zero())
    }

    pub fn add_arc(&mut self, from: StateId, arc: Arc) {
        debug_assert!(arc.next_state < self.arcs.len());
        self.arcs[from].push(arc);
    }

    pub fn is_acceptor(&self) -> bool {
        self.arcs
            .iter()
            .flatten()
            .all(|a| a.ilabel == a.olabel)
    }

    /// True when the labeled transition graph has no cycle.
    pub fn is_acyclic(&self) -> bool {
        #[derive(Clone, Copy, PartialEq)]
        enum Color {
            White,
            Grey,
            Black,
        }
        let n = self.num_states();
        let mut color = vec![Color::White; n];
        // iterative DFS with an explicit stack
        for root in 0..n {
            if color[root] != Color::White {
                continue;
            }
            let mut stack: Vec<(StateId, usize)> = vec![(root, 0)];
            color[root] = Color::Grey;
            while let Some(&mut (s, ref mut idx)) = stack.last_mut() {
                if *idx < self.arcs[s].len() {
                    let t = self.arcs[s][*idx].next_state;
                    *idx += 1;
                    match color[t] {
                        Color::White => {
                            color[t] = Color::Grey;
                            stack.push((t, 0));
                        }
                        Color::Grey => return false,
                        Color::Black => {}
                    }
                } else {
                    color[s] = Color::Black;
                    stack.pop();
                }
            }
        }
        true
    }

    /// States in topological order. Errors if cyclic.
    pub fn topo_order(&self) -> Result<Vec<StateId>> {
        if !self.is_acyclic() {
            return Err(FstError::Unsupported("automaton is cyclic".into()));
        }
        let n = self.num_states();
        let mut indeg = vec![0usize; n];
        for arcs in &self.arcs {
            for a in arcs {
                indeg[a.next_state] += 1;
            }
        }
        let mut queue: VecDeque<StateId> = (0..n).filter(|&s| indeg[s] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(s) = queue.pop_front() {
            order.push(s);
            for a in &self.arcs[s] {
                indeg[a.next_state] -= 1;
                if indeg[a.next_state] == 0 {
                    queue.push_back(a.next_state);
                }
            }
        }
        Ok(order)
    }

    /// Keeps only states on some start-to-final path, renumbering in
    /// BFS-from-start order.
    pub fn trim(&self) -> Wfst {
        let n = self.num_states();
        let mut out = Wfst::new(self.isyms.clone(), self.osyms.clone());
        out.phi_mode = self.phi_mode;
        let start = match self.start {
            Some(s) => s,
            None => return out,
        };
        // forward reachability
        let mut fwd = vec![false; n];
        let mut queue = VecDeque::from([start]);
        fwd[start] = true;
        while let Some(s) = queue.pop_front() {
            for a in &self.arcs[s] {
                if !fwd[a.next_state] {
                    fwd[a.next_state] = true;
                    queue.push_back(a.next_state);
                }
            }
        }
        // backward reachability from finals
        let mut rev: Vec<Vec<StateId>> = vec![Vec::new(); n];
        for (s, arcs) in self.arcs.iter().enumerate() {
            for a in arcs {
                rev[a.next_state].push(s);
            }
        }
        let mut bwd = vec![false; n];
        let mut queue: VecDeque<StateId> = self
            .finals
            .iter()
            .filter(|(_, w)| !w.is_zero())
            .map(|(&s, _)| s)
            .collect();
        for &s in &queue {
            bwd[s] = true;
        }
        while let Some(s) = queue.pop_front() {
            for &p in &rev[s] {
                if !bwd[p] {
                    bwd[p] = true;
                    queue.push_back(p);
                }
            }
        }
        let keep: Vec<bool> = (0..n).map(|s| fwd[s] && bwd[s]).collect();
        if !keep[start] {
            return out;
        }
        // renumber via BFS from start over kept states
        let mut map: HashMap<StateId, StateId> = HashMap::new();
        let mut queue = VecDeque::from([start]);
        map.insert(start, out.add_state());
        while let Some(s) = queue.pop_front() {
            for a in &self.arcs[s] {
                if keep[a.next_state] && !map.contains_key(&a.next_state) {
                    map.insert(a.next_state, out.add_state());
                    queue.push_back(a.next_state);
                }
            }
        }
        for (&old, &new) in &map {
            for a in &self.arcs[old] {
                if let Some(&t) = map.get(&a.next_state) {
                    out.add_arc(new, Arc::new(a.ilabel, a.olabel, a.weight, t));
                }
            }
            let w = self.final_weight(old);
            if !w.is_zero() {
                out.set_final(new, w);
            }
        }
        out.set_start(map[&start]);
        out
    }

    /// Multiplies every arc and final weight by `factor`.
    pub fn scale_weights(&self, factor: f64) -> Wfst {
        let mut out = self.clone();
        for arcs in &mut out.arcs {
            for a in arcs {
                if !a.weight.is_zero() {
                    a.weight = Weight::new(a.weight.value() * factor);
                }
            }
        }
        for w in out.finals.values_mut() {
            if !w.is_zero() {
                *w = Weight::new(w.value() * factor);
            }
        }
        out
    }

    /// Keeps one tape, turning the machine into an acceptor.
    pub fn project(&self, side: ProjectSide) -> Wfst {
        let syms = match side {
            ProjectSide::Input => self.isyms.clone(),
            ProjectSide::Output => self.osyms.clone(),
        };
        let mut out = Wfst::acceptor(syms);
        out.phi_mode = self.phi_mode;
        out.arcs = self
            .arcs
            .iter()
            .map(|arcs| {
                arcs.iter()
                    .map(|a| {
                        let l = match side {
                            ProjectSide::Input => a.ilabel,
                            ProjectSide::Output => a.olabel,
                        };
                        Arc::new(l, l, a.weight, a.next_state)
                    })
                    .collect()
            })
            .collect();
        out.start = self.start;
        out.finals = self.finals.clone();
        out
    }

    /// All ways this machine consumes concrete symbol `sym` from `state`,
    /// honoring σ wildcards, φ complement arcs, and chained failure
    /// transitions. Returns (olabel, weight, next_state) triples with the
    /// realized symbol substituted for wildcard output labels.
    pub fn consume(&self, state: StateId, sym: Label) -> Vec<(Label, Weight, StateId)> {
        let mut out = Vec::new();
        let mut cur = state;
        let mut extra = Weight::one();
        let mut hops = 0usize;
        loop {
            let mut matched = false;
            let mut phi_arc: Option<&Arc> = None;
            for a in &self.arcs[cur] {
                if a.ilabel == sym || a.ilabel == SIGMA {
                    matched = true;
                    let ol = if a.olabel == SIGMA || a.olabel == PHI {
                        sym
                    } else {
                        a.olabel
                    };
                    out.push((ol, extra.times(a.weight), a.next_state));
                } else if a.ilabel == PHI {
                    phi_arc = Some(a);
                }
            }
            if matched {
                return out;
            }
            match (self.phi_mode, phi_arc) {
                (PhiMode::Complement, Some(a)) => {
                    let ol = if a.olabel == PHI || a.olabel == SIGMA {
                        sym
                    } else {
                        a.olabel
                    };
                    out.push((ol, extra.times(a.weight), a.next_state));
                    return out;
                }
                (PhiMode::Failure, Some(a)) => {
                    extra = extra.times(a.weight);
                    cur = a.next_state;
                    hops += 1;
                    if hops > self.num_states() {
                        return out; // failure cycle guard
                    }
                }
                (_, None) => return out,
            }
        }
    }

    /// Minimum cost over accepting paths whose labels (ε skipped) spell `s`
    /// on the input tape; `Weight::zero()` when unaccepted. σ/φ arcs match
    /// per their composition semantics.
    pub fn string_weight(&self, s: &[Label]) -> Weight {
        let start = match self.start {
            Some(s) => s,
            None => return Weight::zero(),
        };
        let n = self.num_states();
        // layered relaxation: dist[i][q] = best cost reaching q after i symbols
        let mut layer = vec![Weight::zero(); n];
        layer[start] = Weight::one();
        self.relax_eps(&mut layer);
        for &sym in s {
            if is_special(sym) {
                return Weight::zero();
            }
            let mut next = vec![Weight::zero(); n];
            for q in 0..n {
                if layer[q].is_zero() {
                    continue;
                }
                for (_, w, t) in self.consume(q, sym) {
                    let w = layer[q].times(w);
                    next[t] = next[t].plus(w);
                }
            }
            self.relax_eps(&mut next);
            layer = next;
        }
        let mut best = Weight::zero();
        for (q, w) in layer.iter().enumerate() {
            best = best.plus(w.times(self.final_weight(q)));
        }
        best
    }

    /// Like `string_weight` but resolves text tokens first; unknown symbols
    /// make the string unaccepted rather than erroring.
    pub fn string_weight_text(&self, tokens: &[&str]) -> Weight {
        let mut labels = Vec::with_capacity(tokens.len());
        for t in tokens {
            match self.isyms.get(t) {
                Some(id) => labels.push(id),
                None => return Weight::zero(),
            }
        }
        self.string_weight(&labels)
    }

    // Closes a cost layer under ε-input arcs (min-relaxation, bounded rounds).
    fn relax_eps(&self, layer: &mut [Weight]) {
        let n = self.num_states();
        for _ in 0..n {
            let mut changed = false;
            for q in 0..n {
                if layer[q].is_zero() {
                    continue;
                }
                for a in &self.arcs[q] {
                    if a.ilabel == EPS {
                        let w = layer[q].times(a.weight);
                        if w.value() < layer[a.next_state].value() - 1e-15 {
                            layer[a.next_state] = w;
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }
    }

    /// The set of labels realized on the chosen tape (specials excluded).
    pub fn realized_labels(&self, side: ProjectSide) -> HashSet<Label> {
        let mut set = HashSet::new();
        for arcs in &self.arcs {
            for a in arcs {
                let l = match side {
                    ProjectSide::Input => a.ilabel,
                    ProjectSide::Output => a.olabel,
                };
                if !is_special(l) {
                    set.insert(l);
                }
            }
        }
        set
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProjectSide {
    Input,
    Output,
}

/// Linear acceptor for one token sequence; `weight` sits on the first arc
/// (or the final weight for the empty sequence).
pub fn build_linear(syms: &SharedTable, labels: &[Label], weight: Weight) -> Wfst {
    let mut fst = Wfst::acceptor(syms.clone());
    let first = fst.add_states(labels.len() + 1);
    fst.set_start(first);
    for (i, &l) in labels.iter().enumerate() {
        let w = if i == 0 { weight } else { Weight::one() };
        fst.add_arc(first + i, Arc::new(l, l, w, first + i + 1));
    }
    if labels.is_empty() {
        fst.set_final(first, weight);
    } else {
        fst.set_final(first + labels.len(), Weight::one());
    }
    fst
}

/// Min-weight union of the operands' languages via a fresh ε-start.
pub fn union(parts: &[Wfst]) -> Result<Wfst> {
    let first = parts
        .first()
        .ok_or_else(|| FstError::Config("union of zero machines".into()))?;
    let mut out = Wfst::new(first.isyms.clone(), first.osyms.clone());
    let start = out.add_state();
    out.set_start(start);
    for p in parts {
        if !std::sync::Arc::ptr_eq(&p.isyms, &first.isyms) && p.isyms != first.isyms {
            return Err(FstError::Config("union operands must share symbol tables".into()));
        }
        let offset = out.add_states(p.num_states());
        if let Some(ps) = p.start {
            out.add_arc(start, Arc::new(EPS, EPS, Weight::one(), offset + ps));
        }
        for (s, arcs) in p.arcs.iter().enumerate() {
            for a in arcs {
                out.add_arc(
                    offset + s,
                    Arc::new(a.ilabel, a.olabel, a.weight, offset + a.next_state),
                );
            }
        }
        for (&s, &w) in &p.finals {
            out.set_final(offset + s, w);
        }
    }
    Ok(out)
}
