//! Weighted acceptor optimization: ε-removal, determinization,
//! minimization, and weight pushing. Each pass preserves the weighted
//! language exactly.

use std::collections::HashMap;

use crate::error::{FstError, Result};
use crate::fst::{Arc, StateId, Wfst};
use crate::shortest::distance_to_final;
use crate::symbols::{is_special, Label, EPS};
use crate::weight::Weight;

#[derive(Debug, Clone, Copy)]
pub struct OptimizePasses {
    pub eps_remove: bool,
    pub determinize: bool,
    pub minimize: bool,
    pub push: bool,
}

impl Default for OptimizePasses {
    fn default() -> Self {
        OptimizePasses {
            eps_remove: true,
            determinize: true,
            minimize: true,
            push: true,
        }
    }
}

/// Runs the requested cascade. Determinization and minimization require an
/// ε-free acyclic acceptor; ε-removal is forced on when they are requested.
pub fn optimize(f: &Wfst, passes: OptimizePasses) -> Result<Wfst> {
    let mut cur = f.trim();
    if passes.eps_remove || passes.determinize || passes.minimize {
        cur = eps_remove(&cur)?;
    }
    if passes.determinize {
        cur = determinize(&cur)?;
    }
    if passes.minimize {
        cur = minimize(&cur)?;
    }
    if passes.push {
        cur = push_weights(&cur)?;
    }
    Ok(cur)
}

/// Removes arcs that are ε on both tapes by closing each state over its
/// ε-reachable set.
pub fn eps_remove(f: &Wfst) -> Result<Wfst> {
    let n = f.num_states();
    let mut out = Wfst::new(f.isyms.clone(), f.osyms.clone());
    out.phi_mode = f.phi_mode;
    out.add_states(n);
    let is_eps = |a: &Arc| a.ilabel == EPS && a.olabel == EPS;
    for s in 0..n {
        // shortest ε-distance from s to each state (bounded relaxation)
        let mut dist = vec![Weight::zero(); n];
        dist[s] = Weight::one();
        for _ in 0..n {
            let mut changed = false;
            for q in 0..n {
                if dist[q].is_zero() {
                    continue;
                }
                for a in &f.arcs[q] {
                    if is_eps(a) {
                        let w = dist[q].times(a.weight);
                        if w.value() < dist[a.next_state].value() - 1e-15 {
                            dist[a.next_state] = w;
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }
        let mut fin = Weight::zero();
        for q in 0..n {
            if dist[q].is_zero() {
                continue;
            }
            fin = fin.plus(dist[q].times(f.final_weight(q)));
            for a in &f.arcs[q] {
                if !is_eps(a) {
                    out.add_arc(
                        s,
                        Arc::new(a.ilabel, a.olabel, dist[q].times(a.weight), a.next_state),
                    );
                }
            }
        }
        if !fin.is_zero() {
            out.set_final(s, fin);
        }
    }
    out.start = f.start;
    Ok(out.trim())
}

/// Weighted subset-construction determinization for acyclic ε-free
/// acceptors. Output arcs are label-sorted; residual weights are
/// normalized by their minimum so the result is canonical.
pub fn determinize(f: &Wfst) -> Result<Wfst> {
    if !f.is_acceptor() {
        return Err(FstError::Config("determinize requires an acceptor".into()));
    }
    if !f.is_acyclic() {
        return Err(FstError::Unsupported("determinize requires an acyclic input".into()));
    }
    if f.arcs.iter().flatten().any(|a| a.ilabel == EPS) {
        return Err(FstError::Config("determinize requires an ε-free input".into()));
    }
    let mut out = Wfst::acceptor(f.isyms.clone());
    let start = match f.start {
        Some(s) => s,
        None => return Ok(out),
    };

    type Subset = Vec<(StateId, u64)>; // (state, residual cost bits)
    let key = |subset: &[(StateId, f64)]| -> Subset {
        subset.iter().map(|&(s, r)| (s, r.to_bits())).collect()
    };

    let init = vec![(start, 0.0f64)];
    let mut map: HashMap<Subset, StateId> = HashMap::new();
    let mut subsets: Vec<Vec<(StateId, f64)>> = Vec::new();
    let s0 = out.add_state();
    out.set_start(s0);
    map.insert(key(&init), s0);
    subsets.push(init);
    let mut queue = vec![s0];

    while let Some(here) = queue.pop() {
        let subset = subsets[here].clone();
        // group target candidates per label
        let mut by_label: HashMap<Label, Vec<(StateId, f64)>> = HashMap::new();
        for &(s, r) in &subset {
            for a in &f.arcs[s] {
                by_label
                    .entry(a.ilabel)
                    .or_default()
                    .push((a.next_state, r + a.weight.value()));
            }
        }
        let mut labels: Vec<Label> = by_label.keys().copied().collect();
        labels.sort_unstable();
        for l in labels {
            let mut cands = by_label.remove(&l).unwrap();
            // collapse duplicate target states to min residual
            cands.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.partial_cmp(&b.1).unwrap()));
            cands.dedup_by(|b, a| {
                if a.0 == b.0 {
                    a.1 = a.1.min(b.1);
                    true
                } else {
                    false
                }
            });
            let w_min = cands.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
            let next_subset: Vec<(StateId, f64)> =
                cands.into_iter().map(|(s, r)| (s, r - w_min)).collect();
            let k = key(&next_subset);
            let t = match map.get(&k) {
                Some(&t) => t,
                None => {
                    let t = out.add_state();
                    map.insert(k, t);
                    subsets.push(next_subset);
                    queue.push(t);
                    t
                }
            };
            out.add_arc(here, Arc::new(l, l, Weight::new(w_min), t));
        }
        let mut fin = Weight::zero();
        for &(s, r) in &subset {
            fin = fin.plus(Weight::new(r).times(f.final_weight(s)));
        }
        if !fin.is_zero() {
            out.set_final(here, fin);
        }
    }
    Ok(out)
}

/// Merges indistinguishable states of a deterministic ε-free acceptor.
/// Pushes weights first so residuals are canonical, then refines a
/// partition over (label, weight, target-class) signatures.
pub fn minimize(f: &Wfst) -> Result<Wfst> {
    if !f.is_acceptor() {
        return Err(FstError::Config("minimize requires an acceptor".into()));
    }
    let f = push_weights(&f.trim())?;
    let n = f.num_states();
    if n == 0 {
        return Ok(f);
    }
    // initial partition on final weight
    let mut class: Vec<usize> = (0..n)
        .map(|s| {
            let w = f.final_weight(s);
            if w.is_zero() {
                0
            } else {
                1
            }
        })
        .collect();
    let mut num_classes = 2;
    loop {
        let mut sig_map: HashMap<(usize, u64, Vec<(Label, u64, usize)>), usize> = HashMap::new();
        let mut next_class = vec![0usize; n];
        for s in 0..n {
            let mut sig: Vec<(Label, u64, usize)> = f.arcs[s]
                .iter()
                .map(|a| (a.ilabel, a.weight.value().to_bits(), class[a.next_state]))
                .collect();
            sig.sort_unstable();
            let fw = f.final_weight(s);
            let fbits = if fw.is_zero() { u64::MAX } else { fw.value().to_bits() };
            let key = (class[s], fbits, sig);
            let next = sig_map.len();
            let id = *sig_map.entry(key).or_insert(next);
            next_class[s] = id;
        }
        let new_count = sig_map.len();
        class = next_class;
        if new_count == num_classes {
            break;
        }
        num_classes = new_count;
    }
    // quotient automaton
    let mut out = Wfst::acceptor(f.isyms.clone());
    out.add_states(num_classes);
    let start = f.start.unwrap();
    out.set_start(class[start]);
    let mut done = vec![false; num_classes];
    for s in 0..n {
        let c = class[s];
        if done[c] {
            continue;
        }
        done[c] = true;
        let mut arcs: Vec<Arc> = f.arcs[s]
            .iter()
            .map(|a| Arc::new(a.ilabel, a.olabel, a.weight, class[a.next_state]))
            .collect();
        arcs.sort_by(|a, b| {
            a.ilabel
                .cmp(&b.ilabel)
                .then(a.weight.value().partial_cmp(&b.weight.value()).unwrap())
        });
        arcs.dedup_by(|a, b| a == b);
        for a in arcs {
            out.add_arc(c, a);
        }
        let w = f.final_weight(s);
        if !w.is_zero() {
            out.set_final(c, w);
        }
    }
    Ok(out.trim())
}

/// Pushes weight toward the start state: each state's residual minimum
/// distance-to-final becomes zero, with the global minimum re-applied at
/// the start so every string keeps its exact weight.
pub fn push_weights(f: &Wfst) -> Result<Wfst> {
    let start = match f.start {
        Some(s) => s,
        None => return Ok(f.clone()),
    };
    let dist = distance_to_final(f);
    let d_start = dist[start];
    if d_start.is_zero() {
        return Ok(f.trim()); // empty language
    }
    let mut out = f.clone();
    for (s, arcs) in out.arcs.iter_mut().enumerate() {
        for a in arcs.iter_mut() {
            if dist[s].is_zero() || dist[a.next_state].is_zero() {
                continue;
            }
            let mut w = a.weight.value() - dist[s].value() + dist[a.next_state].value();
            if s == start {
                w += d_start.value();
            }
            a.weight = Weight::new(w);
        }
    }
    let finals = std::mem::take(&mut out.finals);
    for (s, w) in finals {
        if w.is_zero() || dist[s].is_zero() {
            continue;
        }
        let mut v = w.value() - dist[s].value();
        if s == start {
            v += d_start.value();
        }
        out.set_final(s, Weight::new(v));
    }
    Ok(out.trim())
}

/// True when no two arcs leaving any state share an input label and no ε
/// or wildcard labels remain.
pub fn is_deterministic(f: &Wfst) -> bool {
    for arcs in &f.arcs {
        let mut seen = std::collections::HashSet::new();
        for a in arcs {
            if a.ilabel == EPS || is_special(a.ilabel) {
                return false;
            }
            if !seen.insert(a.ilabel) {
                return false;
            }
        }
    }
    true
}
