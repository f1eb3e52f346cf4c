//! Balancing for a ratio `p:q` with `p, q > 1`: afterwards every cluster
//! holds a multiple of `p` blue and a multiple of `q` red points.

use crate::error::Result;
use crate::model::{all_stats, ClusterStats, Clustering, Color, ColoredInstance};
use crate::rebalance::{self, Side};
use crate::workspace::{Transcript, WorkingClustering};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SideClass {
    /// Surplus at most half the modulus (including zero).
    Cut,
    Merge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FourWayClass {
    pub red: SideClass,
    pub blue: SideClass,
}

pub fn four_way_class(stats: &ClusterStats, p: usize, q: usize) -> FourWayClass {
    let side = |s: usize, m: usize| if 2 * s <= m { SideClass::Cut } else { SideClass::Merge };
    FourWayClass {
        red: side(stats.s_r, q),
        blue: side(stats.s_b, p),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseTag {
    CutCut,
    CutMerge,
    MergeCut,
    MergeMerge,
}

/// Total cut-side surplus and merge-side deficit for one color.
fn side_totals(stats: &[ClusterStats], color: Color, m: usize) -> (usize, usize) {
    let (mut surplus, mut deficit) = (0, 0);
    for st in stats {
        let s = st.surplus(color);
        if 2 * s <= m {
            surplus += s;
        } else {
            deficit += m - s;
        }
    }
    (surplus, deficit)
}

fn case_from_totals(red: (usize, usize), blue: (usize, usize)) -> CaseTag {
    let ((sr, mr), (sb, mb)) = (red, blue);
    if sr >= mr && sb >= mb {
        CaseTag::CutCut
    } else if sr > mr && sb < mb {
        CaseTag::CutMerge
    } else if sr < mr && sb > mb {
        CaseTag::MergeCut
    } else {
        CaseTag::MergeMerge
    }
}

/// Decides which routine finishes the job once the transfer passes are done,
/// from the surplus and deficit totals of each color.
pub fn detect_case(instance: &ColoredInstance, clustering: &Clustering) -> Result<CaseTag> {
    clustering.check_instance(instance)?;
    let stats = all_stats(instance, clustering);
    Ok(case_from_totals(
        side_totals(&stats, Color::Red, instance.q()),
        side_totals(&stats, Color::Blue, instance.p()),
    ))
}

pub fn balance_pq(instance: &ColoredInstance, clustering: &Clustering) -> Result<(Clustering, Transcript)> {
    if !instance.blue_total().is_multiple_of(instance.p()) || !instance.red_total().is_multiple_of(instance.q()) {
        return Err(instance.infeasible());
    }
    let mut ws = WorkingClustering::new(instance, clustering)?;
    balance_pq_in(&mut ws)?;
    Ok(ws.finish())
}

struct PassResult {
    cut_left: Vec<usize>,
    merge_left: Vec<usize>,
    newcut: Vec<usize>,
}

fn pass(ws: &mut WorkingClustering, side: Side, ids: &[usize]) -> Result<PassResult> {
    let mut classes = rebalance::classify(ws, side, ids);
    rebalance::sort_receivers(ws, side, &mut classes.merge);
    let moved = rebalance::transfer_pass(ws, side, &classes.cut, &classes.merge)?;
    let mut newcut = classes.settled;
    newcut.extend(moved.drained);
    newcut.sort_unstable();
    Ok(PassResult {
        cut_left: moved.cut_left,
        merge_left: moved.merge_left,
        newcut,
    })
}

pub(crate) fn balance_pq_in(ws: &mut WorkingClustering) -> Result<()> {
    let (p, q) = (ws.instance().p(), ws.instance().q());
    let ids = ws.live_ids();
    let red = pass(ws, Side::new(Color::Red, q), &ids)?;
    let blue = pass(ws, Side::new(Color::Blue, p), &ids)?;

    let case = match (red.merge_left.is_empty(), blue.merge_left.is_empty()) {
        (true, true) => CaseTag::CutCut,
        (true, false) if !red.cut_left.is_empty() => CaseTag::CutMerge,
        (false, true) if !blue.cut_left.is_empty() => CaseTag::MergeCut,
        _ => CaseTag::MergeMerge,
    };
    match case {
        CaseTag::CutCut => {
            algo_cut_cut(ws, &red.cut_left, &blue.cut_left)?;
        }
        CaseTag::CutMerge => {
            algo_cut_merge(ws, &red.cut_left, &blue.newcut, &blue.merge_left)?;
        }
        CaseTag::MergeCut => {
            algo_merge_cut(ws, &red.newcut, &red.merge_left, &blue.cut_left)?;
        }
        CaseTag::MergeMerge => {
            algo_merge_merge(ws, &red.newcut, &red.merge_left, &blue.newcut, &blue.merge_left)?;
        }
    }
    Ok(())
}

/// Packs red surpluses into new red clusters of size `q` and blue surpluses
/// into new blue clusters of size `p`. Returns `(red extras, blue extras)`.
pub fn algo_cut_cut(ws: &mut WorkingClustering, rcut: &[usize], bcut: &[usize]) -> Result<(usize, usize)> {
    let (p, q) = (ws.instance().p(), ws.instance().q());
    let r = rebalance::pack_extras(ws, Side::new(Color::Red, q), rcut, "cut-cut")?;
    let b = rebalance::pack_extras(ws, Side::new(Color::Blue, p), bcut, "cut-cut")?;
    Ok((r, b))
}

/// Packs red surpluses into extras, then fills blue deficits with the
/// cheapest blue blocks. Blue block prices use the cluster size after the red
/// surplus has left. Returns the number of blue blocks cut.
pub fn algo_cut_merge(ws: &mut WorkingClustering, rcut: &[usize], newbcut: &[usize], bmerge: &[usize]) -> Result<usize> {
    let (p, q) = (ws.instance().p(), ws.instance().q());
    rebalance::pack_extras(ws, Side::new(Color::Red, q), rcut, "cut-merge")?;
    let reds = rebalance::other_counts(ws, Color::Blue);
    rebalance::subset_merge(ws, Side::new(Color::Blue, p), newbcut, bmerge, &reds, "cut-merge")
}

/// Color mirror of [`algo_cut_merge`]. Returns the number of red blocks cut.
pub fn algo_merge_cut(ws: &mut WorkingClustering, newrcut: &[usize], rmerge: &[usize], bcut: &[usize]) -> Result<usize> {
    let (p, q) = (ws.instance().p(), ws.instance().q());
    rebalance::pack_extras(ws, Side::new(Color::Blue, p), bcut, "merge-cut")?;
    let blues = rebalance::other_counts(ws, Color::Red);
    rebalance::subset_merge(ws, Side::new(Color::Red, q), newrcut, rmerge, &blues, "merge-cut")
}

/// Fills red deficits, then blue deficits, each with the cheapest blocks of
/// that color. Both passes price blocks against the full cluster size as it
/// stood on entry. Returns `(red blocks, blue blocks)`.
pub fn algo_merge_merge(
    ws: &mut WorkingClustering,
    newrcut: &[usize],
    rmerge: &[usize],
    newbcut: &[usize],
    bmerge: &[usize],
) -> Result<(usize, usize)> {
    let (p, q) = (ws.instance().p(), ws.instance().q());
    let blues = rebalance::other_counts(ws, Color::Red);
    let reds = rebalance::other_counts(ws, Color::Blue);
    let r = rebalance::subset_merge(ws, Side::new(Color::Red, q), newrcut, rmerge, &blues, "merge-merge")?;
    let b = rebalance::subset_merge(ws, Side::new(Color::Blue, p), newbcut, bmerge, &reds, "merge-merge")?;
    Ok((r, b))
}

impl CaseTag {
    /// Routine name recorded in the transcript for this case.
    pub fn routine(self) -> &'static str {
        match self {
            CaseTag::CutCut => "cut-cut",
            CaseTag::CutMerge => "cut-merge",
            CaseTag::MergeCut => "merge-cut",
            CaseTag::MergeMerge => "merge-merge",
        }
    }
}
