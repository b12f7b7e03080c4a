//! Minimal spanning trees of `K_n` and `K_{a,b}` under i.i.d. uniform edge
//! weights, and the component-count integral `∫_0^1 κ(G(p)) dp` of a sample.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::numerics::pairwise_sum;
use crate::seeding::replicate_rng;
use crate::union_find::DisjointSets;

/// Largest edge count a single replicate may materialize.
pub const MAX_EDGES: u64 = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphSpec {
    /// Complete graph on `n ≥ 2` vertices.
    Complete(u64),
    /// Complete bipartite graph with parts of sizes `a, b ≥ 1`; vertices
    /// `0..a` form the left part.
    Bipartite(u64, u64),
}

impl GraphSpec {
    /// `K_{round(αn), round(βn)}`.
    pub fn bipartite_proportional(alpha: f64, beta: f64, n: u64) -> Result<Self> {
        if !(alpha > 0.0 && beta > 0.0) {
            return domain("alpha and beta must be positive");
        }
        let spec = GraphSpec::Bipartite(
            (alpha * n as f64).round() as u64,
            (beta * n as f64).round() as u64,
        );
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            GraphSpec::Complete(n) if n < 2 => {
                domain(format!("complete graph needs n >= 2, got {n}"))
            }
            GraphSpec::Bipartite(a, b) if a == 0 || b == 0 => {
                domain(format!("bipartite graph needs a, b >= 1, got ({a}, {b})"))
            }
            _ => Ok(()),
        }
    }

    pub fn vertices(&self) -> u64 {
        match *self {
            GraphSpec::Complete(n) => n,
            GraphSpec::Bipartite(a, b) => a + b,
        }
    }

    pub fn edges(&self) -> u64 {
        match *self {
            GraphSpec::Complete(n) => n * n.saturating_sub(1) / 2,
            GraphSpec::Bipartite(a, b) => a * b,
        }
    }

    /// Endpoints in canonical order: lexicographic `(u, v)`, `u < v`.
    pub fn edge_list(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::with_capacity(self.edges() as usize);
        match *self {
            GraphSpec::Complete(n) => {
                for u in 0..n as u32 {
                    for v in u + 1..n as u32 {
                        out.push((u, v));
                    }
                }
            }
            GraphSpec::Bipartite(a, b) => {
                for u in 0..a as u32 {
                    for v in a as u32..(a + b) as u32 {
                        out.push((u, v));
                    }
                }
            }
        }
        out
    }

    fn check_size(&self) -> Result<()> {
        self.validate()?;
        if self.edges() > MAX_EDGES {
            return Err(Error::Resource(format!(
                "{} edges exceed the guard of {MAX_EDGES}",
                self.edges()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MstSample {
    pub length: f64,
    /// Tree edge weights in Kruskal acceptance order.
    pub merging_weights: Vec<f64>,
    /// Tree edges in acceptance order.
    pub tree_edges: Vec<(u32, u32)>,
    pub kappa_integral: f64,
}

/// One uniform weight per edge, drawn in canonical edge order.
pub fn kruskal_mst<R: Rng + ?Sized>(spec: GraphSpec, rng: &mut R) -> Result<MstSample> {
    spec.check_size()?;
    let weights: Vec<f64> = (0..spec.edges()).map(|_| rng.random::<f64>()).collect();
    kruskal_with_weights(spec, &weights)
}

/// Kruskal on explicitly given weights (canonical edge order). Ties are broken
/// by edge index.
pub fn kruskal_with_weights(spec: GraphSpec, weights: &[f64]) -> Result<MstSample> {
    spec.check_size()?;
    if weights.len() as u64 != spec.edges() {
        return domain(format!(
            "expected {} weights, got {}",
            spec.edges(),
            weights.len()
        ));
    }
    if weights.iter().any(|w| !w.is_finite()) {
        return domain("edge weights must be finite");
    }
    let edges = spec.edge_list();
    let mut order: Vec<u32> = (0..edges.len() as u32).collect();
    order.sort_by(|&i, &j| {
        weights[i as usize]
            .total_cmp(&weights[j as usize])
            .then(i.cmp(&j))
    });

    let v = spec.vertices() as usize;
    let mut sets = DisjointSets::new(v);
    let mut merging_weights = Vec::with_capacity(v - 1);
    let mut tree_edges = Vec::with_capacity(v - 1);
    for idx in order {
        let (a, b) = edges[idx as usize];
        if sets.union(a as usize, b as usize).is_some() {
            merging_weights.push(weights[idx as usize]);
            tree_edges.push((a, b));
            if tree_edges.len() == v - 1 {
                break;
            }
        }
    }
    let mut sample = MstSample {
        length: pairwise_sum(&merging_weights),
        merging_weights,
        tree_edges,
        kappa_integral: 0.0,
    };
    sample.kappa_integral = kappa_integral(&sample, spec);
    Ok(sample)
}

/// `∫_0^1 κ(G(p)) dp`, integrating the piecewise-constant component count:
/// κ equals `V − j` between the j-th and (j+1)-th merging weight.
pub fn kappa_integral(sample: &MstSample, spec: GraphSpec) -> f64 {
    let v = spec.vertices() as usize;
    let mut pieces = Vec::with_capacity(v);
    let mut prev = 0.0;
    for (j, &w) in sample.merging_weights.iter().enumerate() {
        pieces.push((v - j) as f64 * (w - prev));
        prev = w;
    }
    let remaining = v - sample.merging_weights.len();
    pieces.push(remaining as f64 * (1.0 - prev));
    pairwise_sum(&pieces)
}

#[derive(Debug, Clone, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub replicates: u64,
    pub seed: u64,
    /// Largest `|κ-integral − 1 − L|` seen over the replicates.
    pub max_identity_gap: f64,
}

/// Sample mean and standard error.
pub fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = pairwise_sum(values) / n;
    if values.len() < 2 {
        return (mean, f64::NAN);
    }
    let sq: Vec<f64> = values.iter().map(|x| (x - mean) * (x - mean)).collect();
    let var = pairwise_sum(&sq) / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Mean MST length over `replicates` parallel replicates; replicate `i` uses
/// the stream `(root_seed, i)`.
pub fn mc_mean_mst(spec: GraphSpec, replicates: u64, root_seed: u64) -> Result<McEstimate> {
    if replicates < 2 {
        return domain("need at least 2 replicates for a standard error");
    }
    spec.check_size()?;
    let samples: Vec<(f64, f64)> = (0..replicates)
        .into_par_iter()
        .map(|i| {
            let s = kruskal_mst(spec, &mut replicate_rng(root_seed, i))?;
            Ok((s.length, (s.kappa_integral - 1.0 - s.length).abs()))
        })
        .collect::<Result<_>>()?;
    let lengths: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let (mean, std_error) = mean_and_se(&lengths);
    Ok(McEstimate {
        mean,
        std_error,
        replicates,
        seed: root_seed,
        max_identity_gap: samples.iter().map(|s| s.1).fold(0.0, f64::max),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forced_weight_examples() {
        let s = kruskal_with_weights(GraphSpec::Complete(2), &[0.37]).unwrap();
        assert_eq!(s.length, 0.37);
        assert!((s.kappa_integral - 1.37).abs() < 1e-15);

        // edges (0,1), (0,2), (1,2)
        let s = kruskal_with_weights(GraphSpec::Complete(3), &[0.5, 0.2, 0.9]).unwrap();
        assert!((s.length - 0.7).abs() < 1e-15);
        assert_eq!(s.merging_weights, vec![0.2, 0.5]);
        assert_eq!(s.tree_edges, vec![(0, 2), (0, 1)]);
        assert!((s.kappa_integral - 1.7).abs() < 1e-15);

        let s = kruskal_with_weights(GraphSpec::Bipartite(1, 1), &[0.81]).unwrap();
        assert_eq!(s.length, 0.81);
    }

    #[test]
    fn ties_break_by_edge_index() {
        let s = kruskal_with_weights(GraphSpec::Complete(3), &[0.4, 0.4, 0.4]).unwrap();
        assert_eq!(s.tree_edges, vec![(0, 1), (0, 2)]);
    }

    #[test]
    fn invalid_specs() {
        assert!(GraphSpec::Complete(1).validate().is_err());
        assert!(GraphSpec::Bipartite(0, 3).validate().is_err());
        assert!(kruskal_with_weights(GraphSpec::Complete(3), &[0.1]).is_err());
        let mut rng = replicate_rng(0, 0);
        assert!(matches!(
            kruskal_mst(GraphSpec::Complete(20_000), &mut rng),
            Err(Error::Resource(_))
        ));
        assert!(mc_mean_mst(GraphSpec::Complete(5), 1, 0).is_err());
    }

    #[test]
    fn proportional_sizes_round_to_nearest() {
        assert_eq!(
            GraphSpec::bipartite_proportional(1.0, 0.5, 401).unwrap(),
            GraphSpec::Bipartite(401, 201)
        );
    }

    #[test]
    fn single_edge_mean_is_one_half() {
        let est = mc_mean_mst(GraphSpec::Bipartite(1, 1), 4000, 17).unwrap();
        assert!((est.mean - 0.5).abs() < 3.0 * est.std_error + 1e-12);
        assert!(est.max_identity_gap < 1e-12);
    }

    #[test]
    fn estimate_is_deterministic() {
        let a = mc_mean_mst(GraphSpec::Complete(30), 50, 5).unwrap();
        let b = mc_mean_mst(GraphSpec::Complete(30), 50, 5).unwrap();
        assert_eq!(a, b);
    }
}
