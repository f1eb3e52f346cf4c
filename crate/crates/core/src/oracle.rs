//! Exhaustive solvers over every set partition, for small instances.
//!
//! Partitions are visited as restricted growth strings in lexicographic
//! order. Distances to the input clusterings are maintained incrementally
//! while descending, so each leaf costs O(m) to score.

use num_traits::{Float, FromPrimitive};
use rayon::prelude::*;

use crate::distance::{compare_lmean, lmean, ConsensusObjective, Distance, Ell};
use crate::error::{FairError, Result};
use crate::model::{Clustering, Color, ColoredInstance};

/// Largest `n` any exhaustive search accepts.
pub const HARD_CAP: usize = 13;
/// Largest `n` the consensus search accepts.
pub const CONSENSUS_CAP: usize = 12;

/// Environment variable that lowers [`HARD_CAP`].
pub const CAP_ENV: &str = "FAIRMERGE_ORACLE_CAP";

/// Effective cap: [`HARD_CAP`], lowered by `FAIRMERGE_ORACLE_CAP` when set.
pub fn oracle_cap() -> usize {
    std::env::var(CAP_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .map_or(HARD_CAP, |c| c.min(HARD_CAP))
}

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap {
        return Err(FairError::TooLarge { n, cap });
    }
    Ok(())
}

/// Bell number `B(n)`: the number of partitions of an `n`-set.
pub fn bell_number(n: usize) -> u64 {
    let mut row = vec![1u64];
    for _ in 0..n {
        let mut next = vec![*row.last().unwrap()];
        for &x in &row {
            let last = *next.last().unwrap();
            next.push(last + x);
        }
        row = next;
    }
    row[0]
}

/// Every partition of `0..n`, each exactly once, in restricted growth order.
#[derive(Debug, Clone)]
pub struct PartitionStream {
    rgs: Vec<usize>,
    done: bool,
}

pub fn enum_partitions(n: usize) -> Result<PartitionStream> {
    check_cap(n, oracle_cap())?;
    Ok(PartitionStream {
        rgs: vec![0; n],
        done: false,
    })
}

impl Iterator for PartitionStream {
    type Item = Clustering;

    fn next(&mut self) -> Option<Clustering> {
        if self.done {
            return None;
        }
        let out = Clustering::from_labels(&self.rgs);
        // prefix maxima decide which positions may still grow
        let mut max = Vec::with_capacity(self.rgs.len());
        let mut m = 0;
        for &x in &self.rgs {
            max.push(m);
            m = m.max(x);
        }
        match (1..self.rgs.len()).rev().find(|&i| self.rgs[i] <= max[i]) {
            Some(i) => {
                self.rgs[i] += 1;
                self.rgs[i + 1..].iter_mut().for_each(|x| *x = 0);
            }
            None => self.done = true,
        }
        Some(out)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    pub optimum: Distance,
    /// First minimizer in enumeration order.
    pub argmin: Clustering,
    pub partitions_enumerated: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConsensusOracleResult<F> {
    pub objective: ConsensusObjective<F>,
    /// Distance from every input to `argmin`.
    pub distances: Vec<Distance>,
    pub argmin: Clustering,
    pub partitions_enumerated: u64,
}

/// DFS state over restricted growth strings with per-anchor running costs.
struct Search<'a> {
    n: usize,
    colors: &'a [Color],
    anchors: &'a [&'a [usize]],
    labels: Vec<usize>,
    blocks: usize,
    sizes: Vec<usize>,
    counts: Vec<[usize; 2]>,
    /// Per anchor, `n × n` table: points in block `b` with anchor label `a`.
    cnt: Vec<Vec<usize>>,
    /// Per anchor, points placed so far with anchor label `a`.
    seen: Vec<Vec<usize>>,
    costs: Vec<u64>,
}

struct Best {
    costs: Vec<u64>,
    labels: Vec<usize>,
}

impl<'a> Search<'a> {
    fn new(colors: &'a [Color], anchors: &'a [&'a [usize]]) -> Self {
        let n = colors.len();
        Self {
            n,
            colors,
            anchors,
            labels: vec![0; n],
            blocks: 0,
            sizes: vec![0; n],
            counts: vec![[0, 0]; n],
            cnt: vec![vec![0; n * n]; anchors.len()],
            seen: vec![vec![0; n]; anchors.len()],
            costs: vec![0; anchors.len()],
        }
    }

    fn assign(&mut self, i: usize, b: usize) {
        for (j, anchor) in self.anchors.iter().enumerate() {
            let a = anchor[i];
            let both = self.cnt[j][b * self.n + a] as u64;
            self.costs[j] += self.sizes[b] as u64 - both + self.seen[j][a] as u64 - both;
            self.cnt[j][b * self.n + a] += 1;
            self.seen[j][a] += 1;
        }
        if b == self.blocks {
            self.blocks += 1;
        }
        self.sizes[b] += 1;
        self.counts[b][self.colors[i].index()] += 1;
        self.labels[i] = b;
    }

    fn unassign(&mut self, i: usize, b: usize) {
        self.counts[b][self.colors[i].index()] -= 1;
        self.sizes[b] -= 1;
        if self.sizes[b] == 0 {
            self.blocks -= 1;
        }
        for (j, anchor) in self.anchors.iter().enumerate() {
            let a = anchor[i];
            self.seen[j][a] -= 1;
            self.cnt[j][b * self.n + a] -= 1;
            let both = self.cnt[j][b * self.n + a] as u64;
            self.costs[j] -= self.sizes[b] as u64 - both + self.seen[j][a] as u64 - both;
        }
    }

    fn dfs<A, L>(&mut self, i: usize, accept: &A, better: &L, best: &mut Option<Best>, leaves: &mut u64)
    where
        A: Fn(&[[usize; 2]]) -> bool,
        L: Fn(&[u64], &[u64]) -> bool,
    {
        if i == self.n {
            *leaves += 1;
            if accept(&self.counts[..self.blocks]) && best.as_ref().is_none_or(|b| better(&self.costs, &b.costs)) {
                *best = Some(Best {
                    costs: self.costs.clone(),
                    labels: self.labels.clone(),
                });
            }
            return;
        }
        for b in 0..=self.blocks {
            self.assign(i, b);
            self.dfs(i + 1, accept, better, best, leaves);
            self.unassign(i, b);
        }
    }
}

/// All restricted growth prefixes of length `d`.
fn prefixes(d: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..d {
        out = out
            .into_iter()
            .flat_map(|p: Vec<usize>| {
                let next = p.iter().max().map_or(0, |m| m + 1);
                (0..=next).map(move |b| {
                    let mut q = p.clone();
                    q.push(b);
                    q
                })
            })
            .collect();
    }
    out
}

/// Best accepted partition under `better`, searching prefix subtrees in
/// parallel and keeping the first optimum in enumeration order.
fn exhaustive<A, L>(colors: &[Color], anchors: &[&[usize]], accept: A, better: L) -> (Option<Best>, u64)
where
    A: Fn(&[[usize; 2]]) -> bool + Sync,
    L: Fn(&[u64], &[u64]) -> bool + Sync,
{
    let n = colors.len();
    let depth = n.min(6);
    let parts: Vec<(Option<Best>, u64)> = prefixes(depth)
        .into_par_iter()
        .map(|prefix| {
            let mut search = Search::new(colors, anchors);
            for (i, &b) in prefix.iter().enumerate() {
                search.assign(i, b);
            }
            let mut best = None;
            let mut leaves = 0;
            search.dfs(depth, &accept, &better, &mut best, &mut leaves);
            (best, leaves)
        })
        .collect();
    let mut total = 0;
    let mut best: Option<Best> = None;
    for (cand, leaves) in parts {
        total += leaves;
        if let Some(c) = cand {
            if best.as_ref().is_none_or(|b| better(&c.costs, &b.costs)) {
                best = Some(c);
            }
        }
    }
    (best, total)
}

fn single_anchor(
    instance: &ColoredInstance,
    clustering: &Clustering,
    accept: impl Fn(&[[usize; 2]]) -> bool + Sync,
) -> Result<OracleResult> {
    clustering.check_instance(instance)?;
    check_cap(instance.n(), oracle_cap())?;
    instance.validate_feasible()?;
    let anchors = [clustering.labels()];
    let (best, partitions_enumerated) = exhaustive(instance.colors(), &anchors, accept, |a, b| a[0] < b[0]);
    let best = best.ok_or_else(|| instance.infeasible())?;
    Ok(OracleResult {
        optimum: best.costs[0],
        argmin: Clustering::from_labels(&best.labels),
        partitions_enumerated,
    })
}

fn fair_filter(p: usize, q: usize) -> impl Fn(&[[usize; 2]]) -> bool + Sync {
    move |blocks| blocks.iter().all(|&[r, b]| b * q == r * p)
}

fn balanced_filter(p: usize, q: usize) -> impl Fn(&[[usize; 2]]) -> bool + Sync {
    move |blocks| blocks.iter().all(|&[r, b]| b % p == 0 && r % q == 0)
}

/// Exact distance from `clustering` to its closest fair clustering.
pub fn oracle_closest_fair(instance: &ColoredInstance, clustering: &Clustering) -> Result<OracleResult> {
    single_anchor(instance, clustering, fair_filter(instance.p(), instance.q()))
}

/// Exact distance from `clustering` to its closest balanced clustering.
pub fn oracle_closest_balanced(instance: &ColoredInstance, clustering: &Clustering) -> Result<OracleResult> {
    single_anchor(instance, clustering, balanced_filter(instance.p(), instance.q()))
}

/// Exact ℓ-mean fair consensus of `inputs`.
pub fn oracle_consensus<F>(instance: &ColoredInstance, inputs: &[Clustering], ell: Ell<F>) -> Result<ConsensusOracleResult<F>>
where
    F: Float + FromPrimitive + Send + Sync,
{
    if inputs.is_empty() {
        return Err(FairError::EmptyInput);
    }
    for c in inputs {
        c.check_instance(instance)?;
    }
    check_cap(instance.n(), oracle_cap().min(CONSENSUS_CAP))?;
    instance.validate_feasible()?;
    let anchors: Vec<&[usize]> = inputs.iter().map(Clustering::labels).collect();
    let (best, partitions_enumerated) = exhaustive(
        instance.colors(),
        &anchors,
        fair_filter(instance.p(), instance.q()),
        |a, b| compare_lmean(a, b, ell) == std::cmp::Ordering::Less,
    );
    let best = best.ok_or_else(|| instance.infeasible())?;
    Ok(ConsensusOracleResult {
        objective: lmean(&best.costs, ell)?,
        distances: best.costs,
        argmin: Clustering::from_labels(&best.labels),
        partitions_enumerated,
    })
}
