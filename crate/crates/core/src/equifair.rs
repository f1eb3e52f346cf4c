//! Exact closest fair clustering when red and blue are in ratio 1:1.
//!
//! Every input cluster keeps its largest fair part; the one-colored leftovers
//! are then paired greedily, smallest first, into new fair clusters.

use crate::error::{FairError, Result};
use crate::model::{Clustering, Color, ColoredInstance};
use crate::workspace::{Transcript, WorkingClustering};

/// Points of one color that could not be kept in their cluster.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonoCluster {
    pub color: Color,
    /// Ascending point ids.
    pub members: Vec<usize>,
    pub origin: usize,
}

/// Splits a cluster into its largest fair part and the leftover of the
/// majority color (the highest-indexed majority points).
pub fn make_it_fair(instance: &ColoredInstance, origin: usize, cluster: &[usize]) -> (Vec<usize>, Option<MonoCluster>) {
    let mut sorted = cluster.to_vec();
    sorted.sort_unstable();
    let (reds, blues): (Vec<usize>, Vec<usize>) = sorted.iter().partition(|&&v| instance.color(v) == Color::Red);
    let keep = reds.len().min(blues.len());
    let (major, color) = if reds.len() > blues.len() {
        (reds.clone(), Color::Red)
    } else {
        (blues.clone(), Color::Blue)
    };
    let mut fair: Vec<usize> = reds.iter().take(keep).chain(blues.iter().take(keep)).copied().collect();
    fair.sort_unstable();
    let leftover = (major.len() > keep).then(|| MonoCluster {
        color,
        members: major[keep..].to_vec(),
        origin,
    });
    (fair, leftover)
}

fn by_size(list: &[MonoCluster]) -> Vec<&MonoCluster> {
    let mut v: Vec<&MonoCluster> = list.iter().filter(|m| !m.members.is_empty()).collect();
    v.sort_by_key(|m| (m.members.len(), m.origin));
    v
}

/// Pairs red and blue leftovers into fair clusters, smallest first.
///
/// Both lists are ordered by `(size, origin)`. Each output cluster takes
/// equally many points from the current red and blue leftover, consuming
/// their lowest ids first.
pub fn greedy_merge(reds: &[MonoCluster], blues: &[MonoCluster]) -> Result<Vec<Vec<usize>>> {
    let red_total: usize = reds.iter().map(|m| m.members.len()).sum();
    let blue_total: usize = blues.iter().map(|m| m.members.len()).sum();
    if red_total != blue_total {
        return Err(FairError::UnbalancedTotals {
            red: red_total,
            blue: blue_total,
        });
    }
    let (reds, blues) = (by_size(reds), by_size(blues));
    let mut out = Vec::new();
    let (mut i, mut j, mut ri, mut bj) = (0, 0, 0, 0);
    while i < reds.len() && j < blues.len() {
        let (r, b) = (&reds[i].members, &blues[j].members);
        let k = (r.len() - ri).min(b.len() - bj);
        let mut cluster: Vec<usize> = r[ri..ri + k].iter().chain(&b[bj..bj + k]).copied().collect();
        cluster.sort_unstable();
        out.push(cluster);
        ri += k;
        bj += k;
        if ri == r.len() {
            i += 1;
            ri = 0;
        }
        if bj == b.len() {
            j += 1;
            bj = 0;
        }
    }
    Ok(out)
}

/// Closest fair clustering for a 1:1 instance.
pub fn find_closest_fair_11(instance: &ColoredInstance, clustering: &Clustering) -> Result<Clustering> {
    Ok(closest_fair_11_with_transcript(instance, clustering)?.0)
}

pub fn closest_fair_11_with_transcript(
    instance: &ColoredInstance,
    clustering: &Clustering,
) -> Result<(Clustering, Transcript)> {
    if instance.p() != 1 || instance.q() != 1 {
        return Err(FairError::WrongRatio {
            p: instance.p(),
            q: instance.q(),
        });
    }
    instance.validate_feasible()?;
    let mut ws = WorkingClustering::new(instance, clustering)?;
    closest_fair_11_in(&mut ws, clustering)?;
    Ok(ws.finish())
}

pub(crate) fn closest_fair_11_in(ws: &mut WorkingClustering, clustering: &Clustering) -> Result<()> {
    let mut reds = Vec::new();
    let mut blues = Vec::new();
    for (id, members) in clustering.clusters().iter().enumerate() {
        if let (_, Some(left)) = make_it_fair(ws.instance(), id, members) {
            match left.color {
                Color::Red => reds.push(left),
                Color::Blue => blues.push(left),
            }
        }
    }
    if reds.is_empty() && blues.is_empty() {
        return Ok(());
    }
    let labels = clustering.labels();
    for group in greedy_merge(&reds, &blues)? {
        let target = ws.new_cluster();
        let mut by_origin: Vec<(usize, Vec<usize>)> = Vec::new();
        for v in group {
            match by_origin.iter_mut().find(|(o, _)| *o == labels[v]) {
                Some((_, pts)) => pts.push(v),
                None => by_origin.push((labels[v], vec![v])),
            }
        }
        for (from, pts) in by_origin {
            ws.move_points(&pts, from, target)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distance::dist;
    use crate::model::is_fair;

    fn mono(color: Color, origin: usize, ids: std::ops::Range<usize>) -> MonoCluster {
        MonoCluster {
            color,
            members: ids.collect(),
            origin,
        }
    }

    #[test]
    fn make_it_fair_examples() {
        let mut colors = vec![Color::Red; 3];
        colors.extend([Color::Blue; 5]);
        let inst = ColoredInstance::new(colors, 1, 1).unwrap();
        let (fair, left) = make_it_fair(&inst, 0, &(0..8).collect::<Vec<_>>());
        assert_eq!(fair, vec![0, 1, 2, 3, 4, 5]);
        let left = left.unwrap();
        assert_eq!((left.color, left.members), (Color::Blue, vec![6, 7]));

        let (fair, left) = make_it_fair(&inst, 0, &[0, 1, 2, 3, 4, 5]);
        assert_eq!(fair.len(), 6);
        assert!(left.is_none());

        let (fair, left) = make_it_fair(&inst, 0, &[0, 1]);
        assert!(fair.is_empty());
        assert_eq!(left.unwrap().members, vec![0, 1]);
    }

    #[test]
    fn greedy_merge_sizes_and_cost() {
        // reds {2,3}, blues {1,4} over points 0..10
        let reds = vec![mono(Color::Red, 0, 0..2), mono(Color::Red, 1, 2..5)];
        let blues = vec![mono(Color::Blue, 2, 5..6), mono(Color::Blue, 3, 6..10)];
        let out = greedy_merge(&reds, &blues).unwrap();
        let mut sizes: Vec<usize> = out.iter().map(Vec::len).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![2, 2, 6]);

        let input = Clustering::from_labels(&[0, 0, 1, 1, 1, 2, 3, 3, 3, 3]);
        let output = Clustering::from_clusters(10, &out).unwrap();
        assert_eq!(dist(&input, &output).unwrap(), 15);
    }

    #[test]
    fn greedy_merge_small_cases() {
        let out = greedy_merge(&[mono(Color::Red, 0, 0..3)], &[mono(Color::Blue, 1, 3..6)]).unwrap();
        assert_eq!(out, vec![vec![0, 1, 2, 3, 4, 5]]);

        let reds = vec![mono(Color::Red, 0, 0..1), mono(Color::Red, 1, 1..2)];
        let blues = vec![mono(Color::Blue, 2, 2..4)];
        let out = greedy_merge(&reds, &blues).unwrap();
        assert_eq!(out, vec![vec![0, 2], vec![1, 3]]);
        let input = Clustering::from_labels(&[0, 1, 2, 2]);
        assert_eq!(dist(&input, &Clustering::from_clusters(4, &out).unwrap()).unwrap(), 3);

        assert_eq!(
            greedy_merge(&reds, &[]),
            Err(FairError::UnbalancedTotals { red: 2, blue: 0 })
        );
    }

    #[test]
    fn fair_input_is_unchanged() {
        let colors = "RBBRRB".chars().map(|c| Color::from_char(c).unwrap()).collect();
        let inst = ColoredInstance::new(colors, 1, 1).unwrap();
        let c = Clustering::from_labels(&[0, 0, 1, 1, 2, 2]);
        assert_eq!(find_closest_fair_11(&inst, &c).unwrap(), c);
    }

    #[test]
    fn mixed_example_is_fair() {
        // {3R,5B}, {2R}
        let mut colors = vec![Color::Red; 3];
        colors.extend([Color::Blue; 5]);
        colors.extend([Color::Red; 2]);
        let inst = ColoredInstance::new(colors, 1, 1).unwrap();
        let c = Clustering::from_labels(&[0, 0, 0, 0, 0, 0, 0, 0, 1, 1]);
        let (out, t) = closest_fair_11_with_transcript(&inst, &c).unwrap();
        assert!(is_fair(&inst, &out));
        assert_eq!(crate::workspace::replay(&t, &out).unwrap(), dist(&c, &out).unwrap());
    }

    #[test]
    fn rejects_other_ratios() {
        let colors = "BBR".chars().map(|c| Color::from_char(c).unwrap()).collect();
        let inst = ColoredInstance::new(colors, 2, 1).unwrap();
        assert!(matches!(
            find_closest_fair_11(&inst, &Clustering::single_cluster(3)),
            Err(FairError::WrongRatio { .. })
        ));
    }
}
