//! Balancing for an integral ratio `p:1`: afterwards every cluster holds a
//! multiple of `p` blue points. Red points never move here.

use crate::error::{FairError, Result};
use crate::model::{all_stats, ClusterStats, Clustering, Color, ColoredInstance};
use crate::rebalance::{self, Side};
use crate::workspace::{Transcript, WorkingClustering};

/// Cost of cutting the surplus out of a cluster and of merging its deficit in.
pub fn cut_merge_costs(stats: &ClusterStats) -> (u64, u64) {
    let (s, d, size) = (stats.s_b as u64, stats.d_b as u64, stats.size as u64);
    (s * (size - s), d * size)
}

/// Price of detaching one block of blue points from a cluster.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SubsetCost {
    pub cluster: usize,
    pub z: usize,
    pub size: usize,
    pub cost: i64,
}

/// Cost of the `z`-th blue block of a cluster: block 0 is the surplus,
/// every later block has `p` points.
pub fn subset_cost(cluster: usize, stats: &ClusterStats, z: usize, p: usize, in_merge_phase: bool) -> Result<SubsetCost> {
    let max = (stats.blue_count - stats.s_b) / p;
    if z > max {
        return Err(FairError::SubsetOutOfRange { z, max });
    }
    let size = stats.size as i64;
    let s = stats.s_b as i64;
    let (block, cost) = if z == 0 {
        let (cut, merge) = cut_merge_costs(stats);
        let cost = if in_merge_phase { cut as i64 - merge as i64 } else { cut as i64 };
        (stats.s_b, cost)
    } else {
        let p_i = p as i64;
        (p, p_i * (size - (z as i64 * p_i + s)))
    };
    Ok(SubsetCost {
        cluster,
        z,
        size: block,
        cost,
    })
}

/// Cluster ids split by blue surplus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutMergePartition {
    /// `0 < s_b <= p/2`, ascending id.
    pub cut_set: Vec<usize>,
    /// `s_b > p/2`, by cut-minus-merge cost non-increasing, ties by id.
    pub merge_set: Vec<usize>,
    /// `s_b = 0`, ascending id.
    pub already_balanced: Vec<usize>,
}

pub fn partition_clusters(instance: &ColoredInstance, clustering: &Clustering) -> Result<CutMergePartition> {
    clustering.check_instance(instance)?;
    let p = instance.p();
    let stats = all_stats(instance, clustering);
    let mut part = CutMergePartition {
        cut_set: Vec::new(),
        merge_set: Vec::new(),
        already_balanced: Vec::new(),
    };
    for (id, st) in stats.iter().enumerate() {
        match st.s_b {
            0 => part.already_balanced.push(id),
            s if 2 * s <= p => part.cut_set.push(id),
            _ => part.merge_set.push(id),
        }
    }
    part.merge_set.sort_by_key(|&c| {
        let (cut, merge) = cut_merge_costs(&stats[c]);
        (std::cmp::Reverse(cut as i64 - merge as i64), c)
    });
    Ok(part)
}

/// Rebalances blue counts to multiples of `p`.
pub fn balance_p(instance: &ColoredInstance, clustering: &Clustering) -> Result<(Clustering, Transcript)> {
    if instance.q() != 1 {
        return Err(FairError::WrongRatio {
            p: instance.p(),
            q: instance.q(),
        });
    }
    if !instance.blue_total().is_multiple_of(instance.p()) {
        return Err(instance.infeasible());
    }
    let mut ws = WorkingClustering::new(instance, clustering)?;
    balance_p_in(&mut ws)?;
    Ok(ws.finish())
}

pub(crate) fn balance_p_in(ws: &mut WorkingClustering) -> Result<()> {
    let side = Side::new(Color::Blue, ws.instance().p());
    let ids = ws.live_ids();
    let mut classes = rebalance::classify(ws, side, &ids);
    rebalance::sort_receivers(ws, side, &mut classes.merge);
    let moved = rebalance::transfer_pass(ws, side, &classes.cut, &classes.merge)?;
    if !moved.cut_left.is_empty() {
        algo_for_cut(ws, &moved.cut_left)?;
    } else if !moved.merge_left.is_empty() {
        let mut newcut = classes.settled;
        newcut.extend(moved.drained);
        algo_for_merge(ws, &newcut, &moved.merge_left)?;
    }
    Ok(())
}

/// Packs the blue surplus of every cluster in `cut` into new all-blue
/// clusters of size `p`, first-fit in the given order.
pub fn algo_for_cut(ws: &mut WorkingClustering, cut: &[usize]) -> Result<usize> {
    let side = Side::new(Color::Blue, ws.instance().p());
    rebalance::pack_extras(ws, side, cut, "cut")
}

/// Fills the blue deficit of every cluster in `merge_rem` (kept in the given
/// order) by cutting the cheapest blue blocks from `newcut ∪ merge_rem`.
/// Returns the number of blocks cut.
pub fn algo_for_merge(ws: &mut WorkingClustering, newcut: &[usize], merge_rem: &[usize]) -> Result<usize> {
    let side = Side::new(Color::Blue, ws.instance().p());
    let reds = rebalance::other_counts(ws, Color::Blue);
    rebalance::subset_merge(ws, side, newcut, merge_rem, &reds, "merge")
}
