//! Turns a balanced clustering into a fair one by moving red points only.

use crate::error::{FairError, Result};
use crate::model::{ClusterStats, Clustering, Color, ColoredInstance};
use crate::workspace::{Transcript, WorkingClustering};

/// How far a balanced cluster is from fair, in red points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TypeTag {
    /// Too many reds; this many must leave.
    Red { surplus: usize },
    /// Too few reds; this many must arrive.
    Blue { deficit: usize },
    Neutral,
}

/// Tags a balanced cluster. Fails if its blue count is not a multiple of `p`.
pub fn type_tag(stats: &ClusterStats, p: usize, q: usize) -> Result<TypeTag> {
    if !stats.blue_count.is_multiple_of(p) {
        return Err(FairError::NotBalanced);
    }
    let wanted = stats.blue_count / p * q;
    Ok(match stats.red_count.cmp(&wanted) {
        std::cmp::Ordering::Greater => TypeTag::Red {
            surplus: stats.red_count - wanted,
        },
        std::cmp::Ordering::Less => TypeTag::Blue {
            deficit: wanted - stats.red_count,
        },
        std::cmp::Ordering::Equal => TypeTag::Neutral,
    })
}

pub fn make_clusters_fair(instance: &ColoredInstance, balanced: &Clustering) -> Result<(Clustering, Transcript)> {
    instance.validate_feasible()?;
    let mut ws = WorkingClustering::new(instance, balanced)?;
    make_clusters_fair_in(&mut ws)?;
    Ok(ws.finish())
}

pub(crate) fn make_clusters_fair_in(ws: &mut WorkingClustering) -> Result<()> {
    let (p, q) = (ws.instance().p(), ws.instance().q());
    let mut donors = Vec::new();
    let mut receivers = Vec::new();
    for c in ws.live_ids() {
        let stats = ClusterStats::new(ws.count(c, Color::Red), ws.count(c, Color::Blue), p, q);
        if !stats.is_balanced() {
            return Err(FairError::NotBalanced);
        }
        match type_tag(&stats, p, q)? {
            TypeTag::Red { surplus } => donors.push((c, surplus)),
            TypeTag::Blue { deficit } => receivers.push((c, deficit)),
            TypeTag::Neutral => {}
        }
    }
    let (mut i, mut j) = (0, 0);
    while i < donors.len() && j < receivers.len() {
        let k = donors[i].1.min(receivers[j].1);
        ws.move_highest(donors[i].0, receivers[j].0, Color::Red, k)?;
        donors[i].1 -= k;
        receivers[j].1 -= k;
        if donors[i].1 == 0 {
            i += 1;
        }
        if receivers[j].1 == 0 {
            j += 1;
        }
    }
    if i != donors.len() || j != receivers.len() {
        return Err(ws.instance().infeasible());
    }
    Ok(())
}
