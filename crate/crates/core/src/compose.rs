//! Transducer composition with σ (match-any), φ (match-rest) and failure
//! backoff arcs resolved against the concrete alphabet of the other operand.

use std::collections::{HashMap, VecDeque};

use crate::error::{FstError, Result};
use crate::fst::{Arc, StateId, Wfst};
use crate::symbols::{is_special, Label, EPS, PHI, SIGMA};
use crate::weight::Weight;

fn subst(label: Label, realized: Label) -> Label {
    if label == SIGMA || label == PHI {
        realized
    } else {
        label
    }
}

/// Composes `a` with `b`. Wildcards may appear on `a`'s output tape or on
/// `b`'s input tape but not both at one matching site. The result carries
/// no σ/φ labels and is trimmed.
pub fn compose(a: &Wfst, b: &Wfst) -> Result<Wfst> {
    if *a.osyms != *b.isyms {
        return Err(FstError::Config(
            "compose: output table of left operand differs from input table of right".into(),
        ));
    }
    let mut out = Wfst::new(a.isyms.clone(), b.osyms.clone());
    let (astart, bstart) = match (a.start, b.start) {
        (Some(x), Some(y)) => (x, y),
        _ => return Ok(out),
    };

    let mut map: HashMap<(StateId, StateId), StateId> = HashMap::new();
    let mut queue: VecDeque<(StateId, StateId)> = VecDeque::new();
    let start = out.add_state();
    out.set_start(start);
    map.insert((astart, bstart), start);
    queue.push_back((astart, bstart));

    while let Some((sa, sb)) = queue.pop_front() {
        let here = map[&(sa, sb)];
        let mut pending: Vec<Arc> = Vec::new();
        let push = |map: &mut HashMap<(StateId, StateId), StateId>,
                        queue: &mut VecDeque<(StateId, StateId)>,
                        out: &mut Wfst,
                        pending: &mut Vec<Arc>,
                        ilabel: Label,
                        olabel: Label,
                        w: Weight,
                        na: StateId,
                        nb: StateId| {
            let t = *map.entry((na, nb)).or_insert_with(|| {
                queue.push_back((na, nb));
                out.add_state()
            });
            pending.push(Arc::new(ilabel, olabel, w, t));
        };

        let b_has_wildcard = b.arcs[sb].iter().any(|x| is_special(x.ilabel) && x.ilabel != EPS);

        // b moves alone on ε input
        for arc_b in &b.arcs[sb] {
            if arc_b.ilabel == EPS {
                push(
                    &mut map,
                    &mut queue,
                    &mut out,
                    &mut pending,
                    EPS,
                    arc_b.olabel,
                    arc_b.weight,
                    sa,
                    arc_b.next_state,
                );
            }
        }

        for arc_a in &a.arcs[sa] {
            match arc_a.olabel {
                EPS => {
                    // a moves alone
                    push(
                        &mut map,
                        &mut queue,
                        &mut out,
                        &mut pending,
                        arc_a.ilabel,
                        EPS,
                        arc_a.weight,
                        arc_a.next_state,
                        sb,
                    );
                }
                SIGMA | PHI => {
                    if b_has_wildcard {
                        return Err(FstError::Unsupported(
                            "both operands carry σ/φ at the same matching site".into(),
                        ));
                    }
                    let explicit: Vec<Label> = a.arcs[sa]
                        .iter()
                        .map(|x| x.olabel)
                        .filter(|&l| !is_special(l))
                        .collect();
                    for arc_b in &b.arcs[sb] {
                        let sym = arc_b.ilabel;
                        if is_special(sym) {
                            continue;
                        }
                        if arc_a.olabel == PHI && explicit.contains(&sym) {
                            continue;
                        }
                        push(
                            &mut map,
                            &mut queue,
                            &mut out,
                            &mut pending,
                            subst(arc_a.ilabel, sym),
                            subst(arc_b.olabel, sym),
                            arc_a.weight.times(arc_b.weight),
                            arc_a.next_state,
                            arc_b.next_state,
                        );
                    }
                }
                sym => {
                    for (olabel, weight, next) in b.consume(sb, sym) {
                        push(
                            &mut map,
                            &mut queue,
                            &mut out,
                            &mut pending,
                            arc_a.ilabel,
                            olabel,
                            arc_a.weight.times(weight),
                            arc_a.next_state,
                            next,
                        );
                    }
                }
            }
        }
        for arc in pending {
            out.add_arc(here, arc);
        }
        // final weight: product of operand finals (failure arcs never apply
        // at finals; LM end-of-sentence weights are exact by construction)
        let w = a.final_weight(sa).times(b.final_weight(sb));
        if !w.is_zero() {
            out.set_final(here, w);
        }
    }
    Ok(out.trim())
}
