//! Mutable clustering that records every point move together with its exact
//! change in distance to a fixed anchor clustering.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use crate::distance::{dist_fast, Distance};
use crate::error::{FairError, Result};
use crate::model::{Clustering, Color, ColoredInstance};

/// One batch of same-source, same-target point moves.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Move {
    pub points: Vec<usize>,
    pub from: usize,
    pub to: usize,
    pub step: usize,
    /// Change in distance to the anchor caused by this batch (may be negative).
    pub cost: i64,
}

/// Bookkeeping for one subset-selection or packing routine.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PhaseRecord {
    pub routine: String,
    pub color: Color,
    pub modulus: usize,
    /// Total deficit (or surplus, for packing) at routine entry.
    pub deficit_total: usize,
    /// Number of subsets cut (or extra clusters formed).
    pub subsets_cut: usize,
}

/// Ordered record of every move made from the anchor clustering.
///
/// Cluster ids in moves are working ids: the anchor's ids, followed by ids
/// of clusters created along the way in creation order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transcript {
    pub anchor: Clustering,
    pub moves: Vec<Move>,
    pub phases: Vec<PhaseRecord>,
    pub total_cost: i64,
}

impl Transcript {
    pub fn points_moved(&self) -> usize {
        self.moves.iter().map(|m| m.points.len()).sum()
    }

    pub fn phases_named<'a>(&'a self, routine: &'a str) -> impl Iterator<Item = &'a PhaseRecord> + 'a {
        self.phases.iter().filter(move |p| p.routine == routine)
    }
}

/// Working copy of a clustering over a colored instance.
pub struct WorkingClustering<'a> {
    instance: &'a ColoredInstance,
    anchor: Clustering,
    label: Vec<usize>,
    members: Vec<[BTreeSet<usize>; 2]>,
    origins: Vec<HashMap<usize, usize>>,
    sizes: Vec<usize>,
    moves: Vec<Move>,
    phases: Vec<PhaseRecord>,
    total: i64,
}

impl<'a> WorkingClustering<'a> {
    pub fn new(instance: &'a ColoredInstance, clustering: &Clustering) -> Result<Self> {
        clustering.check_instance(instance)?;
        let k = clustering.k();
        let mut buckets: Vec<[Vec<usize>; 2]> = vec![[Vec::new(), Vec::new()]; k];
        for (v, &l) in clustering.labels().iter().enumerate() {
            buckets[l][instance.color(v).index()].push(v);
        }
        let mut members = Vec::with_capacity(k);
        let mut origins = Vec::with_capacity(k);
        let mut sizes = Vec::with_capacity(k);
        for (id, [r, b]) in buckets.into_iter().enumerate() {
            let size = r.len() + b.len();
            sizes.push(size);
            origins.push(HashMap::from([(id, size)]));
            members.push([r.into_iter().collect(), b.into_iter().collect()]);
        }
        Ok(Self {
            instance,
            anchor: clustering.clone(),
            label: clustering.labels().to_vec(),
            members,
            origins,
            sizes,
            moves: Vec::new(),
            phases: Vec::new(),
            total: 0,
        })
    }

    pub fn instance(&self) -> &ColoredInstance {
        self.instance
    }

    /// Number of cluster slots, including emptied ones.
    pub fn slots(&self) -> usize {
        self.sizes.len()
    }

    /// Ids of nonempty clusters in ascending order.
    pub fn live_ids(&self) -> Vec<usize> {
        (0..self.slots()).filter(|&c| self.sizes[c] > 0).collect()
    }

    pub fn count(&self, cluster: usize, color: Color) -> usize {
        self.members[cluster][color.index()].len()
    }

    pub fn size(&self, cluster: usize) -> usize {
        self.sizes[cluster]
    }

    pub fn surplus(&self, cluster: usize, color: Color, modulus: usize) -> usize {
        self.count(cluster, color) % modulus
    }

    pub fn deficit(&self, cluster: usize, color: Color, modulus: usize) -> usize {
        (modulus - self.surplus(cluster, color, modulus)) % modulus
    }

    pub fn new_cluster(&mut self) -> usize {
        self.members.push([BTreeSet::new(), BTreeSet::new()]);
        self.origins.push(HashMap::new());
        self.sizes.push(0);
        self.sizes.len() - 1
    }

    /// The `k` highest-indexed points of one color, largest first.
    pub fn highest(&self, cluster: usize, color: Color, k: usize) -> Vec<usize> {
        self.members[cluster][color.index()].iter().rev().take(k).copied().collect()
    }

    pub fn members_of(&self, cluster: usize, color: Color) -> impl Iterator<Item = usize> + '_ {
        self.members[cluster][color.index()].iter().copied()
    }

    /// Moves `points` (all currently in `from`) to `to`, one at a time,
    /// returning the summed change in distance to the anchor.
    pub fn move_points(&mut self, points: &[usize], from: usize, to: usize) -> Result<i64> {
        if points.is_empty() || from == to {
            return Ok(0);
        }
        let mut cost = 0i64;
        for &v in points {
            if self.label[v] != from {
                return Err(FairError::Replay(format!("point {v} is not in cluster {from}")));
            }
            let a = self.anchor.label(v);
            let same_from = self.origins[from][&a] - 1;
            let rest_from = self.sizes[from] - 1;
            let same_to = self.origins[to].get(&a).copied().unwrap_or(0);
            let size_to = self.sizes[to];
            cost += 2 * same_from as i64 - rest_from as i64 + size_to as i64 - 2 * same_to as i64;

            let ci = self.instance.color(v).index();
            self.members[from][ci].remove(&v);
            self.members[to][ci].insert(v);
            let left = self.origins[from].get_mut(&a).unwrap();
            *left -= 1;
            if *left == 0 {
                self.origins[from].remove(&a);
            }
            *self.origins[to].entry(a).or_insert(0) += 1;
            self.sizes[from] -= 1;
            self.sizes[to] += 1;
            self.label[v] = to;
        }
        self.total += cost;
        let step = self.moves.len();
        self.moves.push(Move {
            points: points.to_vec(),
            from,
            to,
            step,
            cost,
        });
        Ok(cost)
    }

    /// Moves the `k` highest-indexed points of `color` from `from` to `to`.
    pub fn move_highest(&mut self, from: usize, to: usize, color: Color, k: usize) -> Result<i64> {
        let pts = self.highest(from, color, k);
        if pts.len() < k {
            return Err(FairError::InternalDeficitMismatch(format!(
                "cluster {from} holds {} {color:?} points, {k} requested",
                pts.len()
            )));
        }
        self.move_points(&pts, from, to)
    }

    pub fn record_phase(&mut self, phase: PhaseRecord) {
        self.phases.push(phase);
    }

    /// Current distance to the anchor, maintained incrementally.
    pub fn distance(&self) -> Distance {
        self.total as Distance
    }

    pub fn snapshot(&self) -> Clustering {
        Clustering::from_labels(&self.label)
    }

    pub fn finish(self) -> (Clustering, Transcript) {
        let out = Clustering::from_labels(&self.label);
        let transcript = Transcript {
            anchor: self.anchor,
            moves: self.moves,
            phases: self.phases,
            total_cost: self.total,
        };
        (out, transcript)
    }
}

/// Re-executes a transcript on the anchor, recomputing each move's cost by
/// scanning every point, and checks the end state and total against `output`.
/// Returns the verified distance.
pub fn replay(transcript: &Transcript, output: &Clustering) -> Result<Distance> {
    let anchor = transcript.anchor.labels();
    let mut labels = anchor.to_vec();
    let mut running = 0i64;
    for mv in &transcript.moves {
        let mut cost = 0i64;
        for &v in &mv.points {
            if labels[v] != mv.from {
                return Err(FairError::Replay(format!(
                    "step {}: point {v} is in {}, not {}",
                    mv.step, labels[v], mv.from
                )));
            }
            for (u, &lu) in labels.iter().enumerate() {
                if u == v {
                    continue;
                }
                let same_anchor = anchor[u] == anchor[v];
                let before = (lu == mv.from) != same_anchor;
                let after = (lu == mv.to) != same_anchor;
                cost += i64::from(after) - i64::from(before);
            }
            labels[v] = mv.to;
        }
        if cost != mv.cost {
            return Err(FairError::Replay(format!(
                "step {}: recorded cost {} but recomputed {cost}",
                mv.step, mv.cost
            )));
        }
        running += cost;
    }
    if running != transcript.total_cost {
        return Err(FairError::Replay(format!(
            "moves sum to {running}, transcript total is {}",
            transcript.total_cost
        )));
    }
    if Clustering::from_labels(&labels) != *output {
        return Err(FairError::Replay("replayed partition differs from output".into()));
    }
    let d = dist_fast(&transcript.anchor, output)?;
    if running < 0 || running as Distance != d {
        return Err(FairError::Replay(format!("replayed cost {running} but distance is {d}")));
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(colors: &str, p: usize, q: usize) -> ColoredInstance {
        ColoredInstance::new(colors.chars().map(|c| Color::from_char(c).unwrap()).collect(), p, q).unwrap()
    }

    #[test]
    fn single_move_cost_matches_distance() {
        // p=4: A = 5 blue, B = 7 blue; move one blue from A to B.
        let i = inst(&"B".repeat(12), 4, 1);
        let mut labels = vec![0; 5];
        labels.extend([1; 7]);
        let c = Clustering::from_labels(&labels);
        let mut ws = WorkingClustering::new(&i, &c).unwrap();
        let cost = ws.move_highest(0, 1, Color::Blue, 1).unwrap();
        assert_eq!(cost, 11);
        let (out, t) = ws.finish();
        assert_eq!(replay(&t, &out).unwrap(), 11);
    }

    #[test]
    fn move_back_restores_zero() {
        let i = inst("BBRBBR", 2, 1);
        let c = Clustering::from_labels(&[0, 0, 0, 1, 1, 1]);
        let mut ws = WorkingClustering::new(&i, &c).unwrap();
        ws.move_points(&[2], 0, 1).unwrap();
        ws.move_points(&[2], 1, 0).unwrap();
        assert_eq!(ws.distance(), 0);
        let (out, t) = ws.finish();
        assert_eq!(out, c);
        assert_eq!(replay(&t, &out).unwrap(), 0);
    }

    #[test]
    fn new_cluster_and_highest() {
        let i = inst("BBBB", 3, 1);
        let c = Clustering::single_cluster(4);
        let mut ws = WorkingClustering::new(&i, &c).unwrap();
        assert_eq!(ws.highest(0, Color::Blue, 2), vec![3, 2]);
        let e = ws.new_cluster();
        ws.move_highest(0, e, Color::Blue, 1).unwrap();
        assert_eq!(ws.distance(), 3);
        assert_eq!(ws.live_ids(), vec![0, 1]);
        assert_eq!(ws.surplus(0, Color::Blue, 3), 0);
    }

    #[test]
    fn replay_detects_tampering() {
        let i = inst("BBBB", 3, 1);
        let c = Clustering::single_cluster(4);
        let mut ws = WorkingClustering::new(&i, &c).unwrap();
        let e = ws.new_cluster();
        ws.move_highest(0, e, Color::Blue, 1).unwrap();
        let (out, mut t) = ws.finish();
        t.moves[0].cost += 1;
        assert!(matches!(replay(&t, &out), Err(FairError::Replay(_))));
    }
}
