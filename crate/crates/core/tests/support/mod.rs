//! Exhaustive optimum for tiny instances: every ordering of the requests
//! cut into consecutive routes, one per shift.

#![allow(dead_code)]

use vrpsd_core::model::{Instance, ShiftSummary};
use vrpsd_core::Evaluator;

pub struct Optimum {
    pub total: f64,
    pub routes: Vec<Vec<usize>>,
}

pub fn exhaustive_optimum(ev: Evaluator<'_>) -> Optimum {
    let inst = ev.instance;
    let n = inst.request_count();
    let k = inst.shift_count();
    let starts = inst.config().shift_start_times.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = Optimum {
        total: f64::INFINITY,
        routes: Vec::new(),
    };
    let mut cuts = vec![0; k.saturating_sub(1)];
    let mut summaries = vec![ShiftSummary::default(); k];
    permute(&mut perm, 0, &mut |p| {
        for_each_cut(&mut cuts, 0, 0, n, &mut |cuts| {
            let mut lo = 0;
            for s in 0..k {
                let hi = if s + 1 < k { cuts[s] } else { n };
                summaries[s] = inst.summarize(starts[s], p[lo..hi].iter().copied());
                lo = hi;
            }
            let total = ev.aggregate(summaries.iter()).total;
            if total < best.total {
                best.total = total;
                best.routes = split(p, cuts, k);
            }
        });
    });
    best
}

fn split(p: &[usize], cuts: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(k);
    let mut lo = 0;
    for hi in cuts.iter().copied().chain([p.len()]) {
        out.push(p[lo..hi].to_vec());
        lo = hi;
    }
    out
}

fn permute(items: &mut Vec<usize>, at: usize, visit: &mut impl FnMut(&[usize])) {
    if at == items.len() {
        visit(items);
        return;
    }
    for i in at..items.len() {
        items.swap(at, i);
        permute(items, at + 1, visit);
        items.swap(at, i);
    }
}

/// Nondecreasing cut positions in `from..=n`.
fn for_each_cut(
    cuts: &mut Vec<usize>,
    idx: usize,
    from: usize,
    n: usize,
    visit: &mut impl FnMut(&[usize]),
) {
    if idx == cuts.len() {
        visit(cuts);
        return;
    }
    for c in from..=n {
        cuts[idx] = c;
        for_each_cut(cuts, idx + 1, c, n, visit);
    }
}

/// Number of orderings times cut choices, for sizing checks.
pub fn candidate_count(inst: &Instance) -> u64 {
    let n = inst.request_count() as u64;
    let k = inst.shift_count() as u64;
    let fact: u64 = (1..=n).product();
    // Multisets of k-1 cuts from n+1 positions.
    let mut cuts = 1u64;
    for i in 0..k.saturating_sub(1) {
        cuts = cuts * (n + 1 + i) / (i + 1);
    }
    fact * cuts
}
