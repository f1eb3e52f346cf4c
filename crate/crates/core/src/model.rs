//! Point universe, clusterings and the per-cluster surplus/deficit arithmetic
//! every balancing routine is written against.
//!
//! Instances are kept in a canonical orientation: blue is the majority color
//! and the ratio `p:q` (blue:red) is irreducible with `p >= q` whenever the
//! instance is feasible. Constructing an instance with more red than blue
//! points swaps the colors (and the ratio) and remembers that it did.

use std::collections::HashMap;
use std::hash::Hash;

use serde::Serialize;

use crate::error::{FairError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Red,
    Blue,
}

impl Color {
    pub fn other(self) -> Color {
        match self {
            Color::Red => Color::Blue,
            Color::Blue => Color::Red,
        }
    }

    pub(crate) fn index(self) -> usize {
        match self {
            Color::Red => 0,
            Color::Blue => 1,
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Color::Red => 'R',
            Color::Blue => 'B',
        }
    }

    pub fn from_char(c: char) -> Option<Color> {
        match c {
            'R' | 'r' => Some(Color::Red),
            'B' | 'b' => Some(Color::Blue),
            _ => None,
        }
    }
}

/// Which of the three algorithmic regimes an instance falls into.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// `p = q = 1`.
    Equal,
    /// `q = 1 < p`.
    Integral,
    /// `p, q > 1`.
    Fractional,
}

pub(crate) fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// A set of red/blue points `0..n` together with the global blue:red ratio.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoredInstance {
    colors: Vec<Color>,
    p: usize,
    q: usize,
    red_total: usize,
    blue_total: usize,
    swapped: bool,
    given_ratio: (usize, usize),
}

impl ColoredInstance {
    /// Builds an instance from per-point colors and the blue:red ratio `p:q`.
    ///
    /// The ratio is reduced by its gcd. If red outnumbers blue the colors and
    /// the ratio are swapped; [`ColoredInstance::swapped`] reports this.
    pub fn new(colors: Vec<Color>, p: usize, q: usize) -> Result<Self> {
        if p == 0 || q == 0 {
            return Err(FairError::ZeroRatio { p, q });
        }
        let g = gcd(p, q);
        let (mut rp, mut rq) = (p / g, q / g);
        let mut colors = colors;
        let mut red_total = colors.iter().filter(|&&c| c == Color::Red).count();
        let mut blue_total = colors.len() - red_total;
        let swapped = red_total > blue_total;
        if swapped {
            for c in colors.iter_mut() {
                *c = c.other();
            }
            (red_total, blue_total) = (blue_total, red_total);
            (rp, rq) = (rq, rp);
        }
        Ok(Self {
            colors,
            p: rp,
            q: rq,
            red_total,
            blue_total,
            swapped,
            given_ratio: (p, q),
        })
    }

    pub fn n(&self) -> usize {
        self.colors.len()
    }

    /// Colors in canonical orientation (blue is the majority).
    pub fn colors(&self) -> &[Color] {
        &self.colors
    }

    pub fn color(&self, point: usize) -> Color {
        self.colors[point]
    }

    /// Blue share of the reduced ratio, in canonical orientation.
    pub fn p(&self) -> usize {
        self.p
    }

    /// Red share of the reduced ratio, in canonical orientation.
    pub fn q(&self) -> usize {
        self.q
    }

    pub fn red_total(&self) -> usize {
        self.red_total
    }

    pub fn blue_total(&self) -> usize {
        self.blue_total
    }

    /// True when construction swapped the caller's colors.
    pub fn swapped(&self) -> bool {
        self.swapped
    }

    /// The ratio exactly as supplied by the caller (unreduced, unswapped).
    pub fn given_ratio(&self) -> (usize, usize) {
        self.given_ratio
    }

    /// Colors in the caller's original orientation.
    pub fn original_colors(&self) -> Vec<Color> {
        if self.swapped {
            self.colors.iter().map(|c| c.other()).collect()
        } else {
            self.colors.clone()
        }
    }

    /// Same points with red and blue exchanged and the ratio inverted.
    pub fn swap_colors(&self) -> Result<Self> {
        let colors = self.original_colors().into_iter().map(Color::other).collect();
        let (p, q) = self.given_ratio;
        Self::new(colors, q, p)
    }

    pub fn modulus(&self, color: Color) -> usize {
        match color {
            Color::Red => self.q,
            Color::Blue => self.p,
        }
    }

    pub fn regime(&self) -> Regime {
        match (self.p, self.q) {
            (1, 1) => Regime::Equal,
            (_, 1) => Regime::Integral,
            _ => Regime::Fractional,
        }
    }

    /// Succeeds iff some fair clustering of the points exists.
    pub fn validate_feasible(&self) -> Result<()> {
        let ok = self.blue_total.is_multiple_of(self.p)
            && self.red_total.is_multiple_of(self.q)
            && self.blue_total * self.q == self.red_total * self.p;
        if ok {
            Ok(())
        } else {
            Err(self.infeasible())
        }
    }

    pub(crate) fn infeasible(&self) -> FairError {
        FairError::InfeasibleFairness {
            blue: self.blue_total,
            red: self.red_total,
            p: self.p,
            q: self.q,
        }
    }
}

/// A partition of `0..n`, stored as contiguous labels assigned in order of
/// first occurrence. Every cluster is nonempty by construction.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Clustering {
    labels: Vec<usize>,
    k: usize,
}

impl Clustering {
    /// Relabels arbitrary cluster ids by first occurrence.
    pub fn from_labels<T: Eq + Hash + Copy>(raw: &[T]) -> Self {
        let mut seen: HashMap<T, usize> = HashMap::new();
        let labels = raw
            .iter()
            .map(|l| {
                let next = seen.len();
                *seen.entry(*l).or_insert(next)
            })
            .collect();
        Self { labels, k: seen.len() }
    }

    /// As [`Clustering::from_labels`], checking the length against `n`.
    pub fn normalize<T: Eq + Hash + Copy>(raw: &[T], n: usize) -> Result<Self> {
        if raw.len() != n {
            return Err(FairError::LengthMismatch {
                expected: n,
                got: raw.len(),
            });
        }
        Ok(Self::from_labels(raw))
    }

    pub fn singletons(n: usize) -> Self {
        Self {
            labels: (0..n).collect(),
            k: n,
        }
    }

    pub fn single_cluster(n: usize) -> Self {
        Self {
            labels: vec![0; n],
            k: usize::from(n > 0),
        }
    }

    /// Builds a clustering from explicit member lists; points missing from
    /// every list are an error.
    pub fn from_clusters(n: usize, clusters: &[Vec<usize>]) -> Result<Self> {
        let mut raw = vec![usize::MAX; n];
        for (id, members) in clusters.iter().enumerate() {
            for &v in members {
                if v >= n {
                    return Err(FairError::LengthMismatch { expected: n, got: v + 1 });
                }
                raw[v] = id;
            }
        }
        if let Some(missing) = raw.iter().position(|&l| l == usize::MAX) {
            return Err(FairError::BadClusterId { id: missing, k: clusters.len() });
        }
        Ok(Self::from_labels(&raw))
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn label(&self, point: usize) -> usize {
        self.labels[point]
    }

    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.k];
        for (v, &l) in self.labels.iter().enumerate() {
            out[l].push(v);
        }
        out
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut out = vec![0; self.k];
        for &l in &self.labels {
            out[l] += 1;
        }
        out
    }

    /// Per-cluster `[red, blue]` counts.
    pub fn color_counts(&self, instance: &ColoredInstance) -> Vec<[usize; 2]> {
        let mut out = vec![[0, 0]; self.k];
        for (v, &l) in self.labels.iter().enumerate() {
            out[l][instance.color(v).index()] += 1;
        }
        out
    }

    pub(crate) fn check_instance(&self, instance: &ColoredInstance) -> Result<()> {
        if self.n() != instance.n() {
            return Err(FairError::LengthMismatch {
                expected: instance.n(),
                got: self.n(),
            });
        }
        Ok(())
    }
}

/// Red/blue counts of one cluster with the derived surplus/deficit values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClusterStats {
    pub red_count: usize,
    pub blue_count: usize,
    pub size: usize,
    /// `red_count mod q`
    pub s_r: usize,
    /// `blue_count mod p`
    pub s_b: usize,
    /// `(q - s_r) mod q`
    pub d_r: usize,
    /// `(p - s_b) mod p`
    pub d_b: usize,
    p: usize,
    q: usize,
}

impl ClusterStats {
    pub fn new(red_count: usize, blue_count: usize, p: usize, q: usize) -> Self {
        let s_r = red_count % q;
        let s_b = blue_count % p;
        Self {
            red_count,
            blue_count,
            size: red_count + blue_count,
            s_r,
            s_b,
            d_r: (q - s_r) % q,
            d_b: (p - s_b) % p,
            p,
            q,
        }
    }

    pub fn count(&self, color: Color) -> usize {
        match color {
            Color::Red => self.red_count,
            Color::Blue => self.blue_count,
        }
    }

    pub fn surplus(&self, color: Color) -> usize {
        match color {
            Color::Red => self.s_r,
            Color::Blue => self.s_b,
        }
    }

    pub fn deficit(&self, color: Color) -> usize {
        match color {
            Color::Red => self.d_r,
            Color::Blue => self.d_b,
        }
    }

    pub fn is_balanced(&self) -> bool {
        self.s_r == 0 && self.s_b == 0
    }

    pub fn is_fair(&self) -> bool {
        self.blue_count * self.q == self.red_count * self.p
    }
}

pub fn cluster_stats(
    instance: &ColoredInstance,
    clustering: &Clustering,
    cluster_id: usize,
) -> Result<ClusterStats> {
    clustering.check_instance(instance)?;
    if cluster_id >= clustering.k() {
        return Err(FairError::BadClusterId {
            id: cluster_id,
            k: clustering.k(),
        });
    }
    let (mut red, mut blue) = (0, 0);
    for (v, &l) in clustering.labels().iter().enumerate() {
        if l == cluster_id {
            match instance.color(v) {
                Color::Red => red += 1,
                Color::Blue => blue += 1,
            }
        }
    }
    Ok(ClusterStats::new(red, blue, instance.p(), instance.q()))
}

pub fn all_stats(instance: &ColoredInstance, clustering: &Clustering) -> Vec<ClusterStats> {
    clustering
        .color_counts(instance)
        .into_iter()
        .map(|[r, b]| ClusterStats::new(r, b, instance.p(), instance.q()))
        .collect()
}

pub fn is_fair(instance: &ColoredInstance, clustering: &Clustering) -> bool {
    clustering.n() == instance.n() && all_stats(instance, clustering).iter().all(ClusterStats::is_fair)
}

pub fn is_balanced(instance: &ColoredInstance, clustering: &Clustering) -> bool {
    clustering.n() == instance.n()
        && all_stats(instance, clustering).iter().all(ClusterStats::is_balanced)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn instance(blue: usize, red: usize, p: usize, q: usize) -> ColoredInstance {
        let mut colors = vec![Color::Blue; blue];
        colors.extend(vec![Color::Red; red]);
        ColoredInstance::new(colors, p, q).unwrap()
    }

    #[test]
    fn normalize_first_occurrence() {
        let c = Clustering::normalize(&[5, 5, 9], 3).unwrap();
        assert_eq!(c.labels(), &[0, 0, 1]);
        assert_eq!(c.k(), 2);

        let c = Clustering::normalize(&[0, 1, 2], 3).unwrap();
        assert_eq!(c.labels(), &[0, 1, 2]);
        assert_eq!(c.k(), 3);

        let c = Clustering::normalize::<usize>(&[], 0).unwrap();
        assert_eq!(c.k(), 0);
        assert_eq!(c.n(), 0);
    }

    #[test]
    fn normalize_rejects_wrong_length() {
        assert_eq!(
            Clustering::normalize(&[1, 2], 3),
            Err(FairError::LengthMismatch { expected: 3, got: 2 })
        );
    }

    #[test]
    fn normalize_is_idempotent() {
        let c = Clustering::from_labels(&[7, 3, 7, 1, 3]);
        assert_eq!(Clustering::from_labels(c.labels()), c);
    }

    #[test]
    fn stats_mod_arithmetic() {
        let s = ClusterStats::new(2, 7, 3, 1);
        assert_eq!((s.s_b, s.d_b, s.s_r, s.d_r), (1, 2, 0, 0));

        let s = ClusterStats::new(4, 7, 5, 3);
        assert_eq!((s.s_b, s.d_b, s.s_r, s.d_r), (2, 3, 1, 2));

        let s = ClusterStats::new(2, 4, 2, 1);
        assert_eq!((s.s_b, s.d_b), (0, 0));
        assert!(s.is_fair());
    }

    #[test]
    fn cluster_stats_by_id() {
        let inst = instance(7, 2, 3, 1);
        let c = Clustering::single_cluster(9);
        let s = cluster_stats(&inst, &c, 0).unwrap();
        assert_eq!((s.blue_count, s.red_count, s.s_b, s.d_b), (7, 2, 1, 2));
        assert_eq!(
            cluster_stats(&inst, &c, 1),
            Err(FairError::BadClusterId { id: 1, k: 1 })
        );
    }

    #[test]
    fn feasibility() {
        assert!(instance(6, 3, 2, 1).validate_feasible().is_ok());
        assert!(matches!(
            instance(5, 3, 2, 1).validate_feasible(),
            Err(FairError::InfeasibleFairness { .. })
        ));
        assert!(instance(9, 6, 3, 2).validate_feasible().is_ok());
    }

    #[test]
    fn fair_and_balanced_predicates() {
        // p=2: {BBR} {BBR} fair.
        let colors = vec![Color::Blue, Color::Blue, Color::Red, Color::Blue, Color::Blue, Color::Red];
        let inst = ColoredInstance::new(colors, 2, 1).unwrap();
        let c = Clustering::from_labels(&[0, 0, 0, 1, 1, 1]);
        assert!(is_fair(&inst, &c) && is_balanced(&inst, &c));

        // p=3: blue counts {3, 6}, any reds -> balanced.
        let mut colors = vec![Color::Blue; 9];
        colors.extend([Color::Red; 3]);
        let inst = ColoredInstance::new(colors, 3, 1).unwrap();
        let mut labels = vec![0, 0, 0, 1, 1, 1, 1, 1, 1];
        labels.extend([0, 0, 1]);
        let c = Clustering::from_labels(&labels);
        assert!(is_balanced(&inst, &c));
        assert!(!is_fair(&inst, &c));

        // p=2: one cluster 3 blue 1 red.
        let inst = instance(3, 1, 2, 1);
        let c = Clustering::single_cluster(4);
        assert!(!is_fair(&inst, &c));
        assert!(!is_balanced(&inst, &c));
    }

    #[test]
    fn construction_swaps_red_majority() {
        let mut colors = vec![Color::Red; 6];
        colors.extend([Color::Blue; 3]);
        let inst = ColoredInstance::new(colors.clone(), 1, 2).unwrap();
        assert!(inst.swapped());
        assert_eq!((inst.p(), inst.q()), (2, 1));
        assert_eq!(inst.blue_total(), 6);
        assert_eq!(inst.original_colors(), colors);
        assert_eq!(inst.given_ratio(), (1, 2));
        assert!(inst.validate_feasible().is_ok());
    }

    #[test]
    fn ratio_is_reduced() {
        let inst = instance(6, 4, 6, 4);
        assert_eq!((inst.p(), inst.q()), (3, 2));
        assert_eq!(inst.given_ratio(), (6, 4));
        assert_eq!(inst.regime(), Regime::Fractional);
    }

    #[test]
    fn zero_ratio_rejected() {
        assert!(matches!(
            ColoredInstance::new(vec![Color::Blue], 0, 1),
            Err(FairError::ZeroRatio { .. })
        ));
    }
}
