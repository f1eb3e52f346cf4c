//! Seeded random instances and 3-partition reduction instances.

use num_rational::Ratio;

use crate::error::{FairError, Result};
use crate::model::{gcd, Clustering, Color, ColoredInstance};
use crate::oracle::oracle_cap;

/// SplitMix64: a 64-bit generator simple enough to reimplement anywhere.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform-ish value in `0..bound` (plain modulo reduction).
    pub fn below(&mut self, bound: usize) -> usize {
        (self.next_u64() % bound as u64) as usize
    }

    /// Fisher-Yates shuffle, last position first.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i + 1);
            items.swap(i, j);
        }
    }
}

/// Random instance with exactly `p·t` blue and `q·t` red points
/// (`t = n / (p + q)`) spread over exactly `k` nonempty clusters.
///
/// The colors are shuffled first, then a shuffled permutation seeds one
/// point into each cluster and every remaining point picks a cluster
/// uniformly.
pub fn gen_random(n: usize, p: usize, q: usize, k: usize, seed: u64) -> Result<(ColoredInstance, Clustering)> {
    if p == 0 || q == 0 {
        return Err(FairError::ZeroRatio { p, q });
    }
    if n < p + q || !n.is_multiple_of(p + q) {
        return Err(FairError::Infeasible(format!("n = {n} is not a positive multiple of p + q = {}", p + q)));
    }
    if k == 0 || k > n {
        return Err(FairError::Infeasible(format!("cannot form {k} nonempty clusters from {n} points")));
    }
    let t = n / (p + q);
    let mut rng = SplitMix64::new(seed);
    let mut colors = vec![Color::Blue; p * t];
    colors.extend(vec![Color::Red; q * t]);
    rng.shuffle(&mut colors);

    let mut order: Vec<usize> = (0..n).collect();
    rng.shuffle(&mut order);
    let mut labels = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        labels[v] = if i < k { i } else { rng.below(k) };
    }
    Ok((ColoredInstance::new(colors, p, q)?, Clustering::from_labels(&labels)))
}

/// Closest-fair instance built from a 3-partition input, with its decision
/// threshold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionInstance {
    pub elements: Vec<u64>,
    pub p: usize,
    pub q: usize,
    /// Common triple sum `3·Σx / |S|`.
    pub target: u64,
    pub tau: Ratio<u64>,
    pub instance: ColoredInstance,
    /// `|S|/3` blue clusters of `p·target` points, then one red cluster of
    /// `q·x` points per element.
    pub clustering: Clustering,
    /// Set for `q > 1`, whose construction is less established.
    pub experimental: bool,
    pub point_count: usize,
    /// Whether the exhaustive oracle can check this instance.
    pub oracle_checkable: bool,
}

/// Emitted instances larger than this are refused outright.
const MAX_POINTS: u64 = 50_000_000;

pub fn gen_3partition_reduction(elements: &[u64], p: usize, q: usize) -> Result<ReductionInstance> {
    let len = elements.len();
    if len == 0 || !len.is_multiple_of(3) {
        return Err(FairError::NotDivisibleBy3 { len });
    }
    if q == 0 || p <= q || gcd(p, q) != 1 {
        return Err(FairError::Infeasible(format!("ratio {p}:{q} must be coprime with p > q ≥ 1")));
    }
    let sum: u64 = elements.iter().sum();
    let triples = (len / 3) as u64;
    if !sum.is_multiple_of(triples) {
        return Err(FairError::Infeasible(format!(
            "element sum {sum} does not split into {triples} equal triples"
        )));
    }
    let target = sum / triples;
    if let Some(&x) = elements.iter().find(|&&x| 4 * x <= target || 2 * x >= target) {
        return Err(FairError::OutOfRangeElement {
            value: x,
            target: target.to_string(),
        });
    }
    let (pu, qu) = (p as u64, q as u64);
    let points = triples * pu * target + qu * sum;
    if points > MAX_POINTS {
        return Err(FairError::Infeasible(format!("reduction would emit {points} points")));
    }

    let mut colors = Vec::with_capacity(points as usize);
    let mut labels = Vec::with_capacity(points as usize);
    for b in 0..triples as usize {
        colors.extend(std::iter::repeat_n(Color::Blue, (pu * target) as usize));
        labels.extend(std::iter::repeat_n(b, (pu * target) as usize));
    }
    for (j, &x) in elements.iter().enumerate() {
        colors.extend(std::iter::repeat_n(Color::Red, (qu * x) as usize));
        labels.extend(std::iter::repeat_n(triples as usize + j, (qu * x) as usize));
    }

    let sq: u64 = elements.iter().map(|x| x * x).sum();
    let cross: u64 = elements.iter().map(|x| x * (target - x)).sum();
    // Above 1 + √2 the blue clusters dominate and the first threshold applies.
    let tau = if (p - q) * (p - q) > 2 * q * q {
        Ratio::new(qu * qu * cross, 2) + Ratio::from_integer(triples * pu * qu * target * target)
    } else {
        Ratio::from_integer(pu * qu * sq) + Ratio::new(pu * pu * cross, 2)
    };
    let point_count = points as usize;
    Ok(ReductionInstance {
        elements: elements.to_vec(),
        p,
        q,
        target,
        tau,
        instance: ColoredInstance::new(colors, p, q)?,
        clustering: Clustering::from_labels(&labels),
        experimental: q > 1,
        point_count,
        oracle_checkable: point_count <= oracle_cap(),
    })
}
