//! Single-color rebalancing primitives shared by the integral and fractional
//! balancing routines: classification, the cut-to-merge transfer pass,
//! first-fit packing of surpluses, and min-cost subset selection.

use std::collections::{BTreeSet, HashMap};

use crate::error::{FairError, Result};
use crate::model::Color;
use crate::workspace::{PhaseRecord, WorkingClustering};

/// One color together with the modulus its counts must reach.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Side {
    pub color: Color,
    pub modulus: usize,
}

impl Side {
    pub fn new(color: Color, modulus: usize) -> Self {
        Self { color, modulus }
    }

    fn surplus(&self, ws: &WorkingClustering, c: usize) -> usize {
        ws.surplus(c, self.color, self.modulus)
    }

    fn deficit(&self, ws: &WorkingClustering, c: usize) -> usize {
        ws.deficit(c, self.color, self.modulus)
    }
}

/// Clusters split by their current surplus on one side.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub(crate) struct Classes {
    /// `0 < s <= m/2`, ascending id.
    pub cut: Vec<usize>,
    /// `s > m/2`, ascending id.
    pub merge: Vec<usize>,
    /// `s = 0`, ascending id.
    pub settled: Vec<usize>,
}

pub(crate) fn classify(ws: &WorkingClustering, side: Side, ids: &[usize]) -> Classes {
    let mut out = Classes::default();
    for &c in ids {
        let s = side.surplus(ws, c);
        if s == 0 {
            out.settled.push(c);
        } else if 2 * s <= side.modulus {
            out.cut.push(c);
        } else {
            out.merge.push(c);
        }
    }
    out
}

/// `s·(size − s) − d·size` on the current state.
pub(crate) fn cut_minus_merge(ws: &WorkingClustering, side: Side, c: usize) -> i64 {
    let size = ws.size(c) as i64;
    let s = side.surplus(ws, c) as i64;
    let d = side.deficit(ws, c) as i64;
    s * (size - s) - d * size
}

/// Orders receivers by cut-minus-merge cost, largest first, ties by id.
pub(crate) fn sort_receivers(ws: &WorkingClustering, side: Side, merge: &mut [usize]) {
    merge.sort_by_key(|&c| (std::cmp::Reverse(cut_minus_merge(ws, side, c)), c));
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub(crate) struct Transfer {
    /// Donors that still carry surplus, in donor order.
    pub cut_left: Vec<usize>,
    /// Receivers that still carry deficit, in receiver order.
    pub merge_left: Vec<usize>,
    /// Donors whose surplus was fully handed over.
    pub drained: Vec<usize>,
}

/// Hands surplus points from donors (in the given order) to receivers (in
/// the given order) until one list runs out.
pub(crate) fn transfer_pass(
    ws: &mut WorkingClustering,
    side: Side,
    cut: &[usize],
    merge: &[usize],
) -> Result<Transfer> {
    let (mut i, mut j) = (0, 0);
    while i < cut.len() && j < merge.len() {
        let (from, to) = (cut[i], merge[j]);
        let k = side.surplus(ws, from).min(side.deficit(ws, to));
        ws.move_highest(from, to, side.color, k)?;
        if side.surplus(ws, from) == 0 {
            i += 1;
        }
        if side.deficit(ws, to) == 0 {
            j += 1;
        }
    }
    Ok(Transfer {
        cut_left: cut[i..].to_vec(),
        merge_left: merge[j..].to_vec(),
        drained: cut[..i].to_vec(),
    })
}

/// Cuts every donor's surplus and packs it first-fit into new one-color
/// clusters of exactly `modulus` points. Returns the number of new clusters.
pub(crate) fn pack_extras(ws: &mut WorkingClustering, side: Side, donors: &[usize], routine: &str) -> Result<usize> {
    let total: usize = donors.iter().map(|&c| side.surplus(ws, c)).sum();
    if !total.is_multiple_of(side.modulus) {
        return Err(FairError::SurplusNotMultiple {
            total,
            modulus: side.modulus,
        });
    }
    let mut current = 0;
    let mut space = 0;
    let mut formed = 0;
    for &d in donors {
        let mut s = side.surplus(ws, d);
        while s > 0 {
            if space == 0 {
                current = ws.new_cluster();
                space = side.modulus;
                formed += 1;
            }
            let k = s.min(space);
            ws.move_highest(d, current, side.color, k)?;
            s -= k;
            space -= k;
        }
    }
    ws.record_phase(PhaseRecord {
        routine: routine.to_string(),
        color: side.color,
        modulus: side.modulus,
        deficit_total: total,
        subsets_cut: formed,
    });
    Ok(formed)
}

/// Fills the deficits of `receivers` by repeatedly cutting the cheapest
/// available subset among `donors ∪ receivers`.
///
/// A receiver's first subset is its current surplus, priced
/// `s·(E − s) − d·E`; any other subset has `modulus` points and is priced
/// `m·(E − m)`, where `E = own-color count + base_other[c]`. Cut subsets
/// are spread over the remaining receivers in their given order.
/// Returns the number of subsets cut.
pub(crate) fn subset_merge(
    ws: &mut WorkingClustering,
    side: Side,
    donors: &[usize],
    receivers: &[usize],
    base_other: &[usize],
    routine: &str,
) -> Result<usize> {
    let m = side.modulus;
    let total: usize = receivers.iter().map(|&c| side.deficit(ws, c)).sum();
    if !total.is_multiple_of(m) {
        return Err(FairError::InternalDeficitMismatch(format!(
            "{routine}: total deficit {total} is not a multiple of {m}"
        )));
    }
    let mut active: HashMap<usize, bool> = receivers.iter().map(|&c| (c, true)).collect();
    let key_of = |ws: &WorkingClustering, c: usize, receiving: bool| -> Option<i64> {
        let own = ws.count(c, side.color) as i64;
        let eff = own + base_other[c] as i64;
        let m = m as i64;
        if receiving {
            let s = own % m;
            let d = m - s;
            Some(s * (eff - s) - d * eff)
        } else if own >= m {
            Some(m * (eff - m))
        } else {
            None
        }
    };

    let mut heap: BTreeSet<(i64, usize)> = BTreeSet::new();
    let mut keys: HashMap<usize, i64> = HashMap::new();
    let mut rekey = |ws: &WorkingClustering, heap: &mut BTreeSet<(i64, usize)>, c: usize, receiving: Option<bool>| {
        if let Some(old) = keys.remove(&c) {
            heap.remove(&(old, c));
        }
        if let Some(key) = receiving.and_then(|r| key_of(ws, c, r)) {
            keys.insert(c, key);
            heap.insert((key, c));
        }
    };
    for &c in donors {
        rekey(ws, &mut heap, c, Some(false));
    }
    for &c in receivers {
        rekey(ws, &mut heap, c, Some(true));
    }

    let mut remaining = total;
    let mut cuts = 0;
    while remaining > 0 {
        let &(_, donor) = heap.first().ok_or_else(|| {
            FairError::InternalDeficitMismatch(format!("{routine}: no subset left with deficit {remaining} open"))
        })?;
        let donor_receiving = active.get(&donor).copied().unwrap_or(false);
        let size = if donor_receiving {
            let s = side.surplus(ws, donor);
            remaining -= m - s;
            active.insert(donor, false);
            s
        } else {
            m
        };
        let pts = ws.highest(donor, side.color, size);
        let mut offset = 0;
        let mut touched = Vec::new();
        for &r in receivers {
            if offset == pts.len() {
                break;
            }
            if !active[&r] {
                continue;
            }
            let g = side.deficit(ws, r).min(pts.len() - offset);
            ws.move_points(&pts[offset..offset + g], donor, r)?;
            offset += g;
            remaining -= g;
            if side.deficit(ws, r) == 0 {
                active.insert(r, false);
            }
            touched.push(r);
        }
        if offset != pts.len() {
            return Err(FairError::InternalDeficitMismatch(format!(
                "{routine}: subset of {} points from cluster {donor} found room for only {offset}",
                pts.len()
            )));
        }
        cuts += 1;
        rekey(ws, &mut heap, donor, Some(false));
        for r in touched {
            let state = active[&r].then_some(true);
            rekey(ws, &mut heap, r, state);
        }
    }
    if cuts * m != total {
        return Err(FairError::InternalDeficitMismatch(format!(
            "{routine}: cut {cuts} subsets for total deficit {total}"
        )));
    }
    ws.record_phase(PhaseRecord {
        routine: routine.to_string(),
        color: side.color,
        modulus: m,
        deficit_total: total,
        subsets_cut: cuts,
    });
    Ok(cuts)
}

/// Own-color-independent size contribution per cluster slot.
pub(crate) fn other_counts(ws: &WorkingClustering, color: Color) -> Vec<usize> {
    (0..ws.slots()).map(|c| ws.count(c, color.other())).collect()
}
