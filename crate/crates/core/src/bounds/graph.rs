//! Slice graphs and an exact clique search on up to 64 vertices.

use serde::{Deserialize, Serialize};

use crate::lattice::{Point, Slice, SlicedColoring};
use crate::{Error, Result};

/// Largest vertex count handled by the bitset searches.
pub const MAX_GRAPH_VERTICES: usize = 64;

/// Directed graph on the slices of a sliced coloring, vertex `i` being the
/// slice whose constant lies on axis `i` (0-based). Edge `i -> j` iff
/// `i` is in the zero set of slice `j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SliceGraph {
    pub d: usize,
    /// `out[i]` has bit `j` set iff `i -> j`.
    pub out: Vec<u64>,
}

impl SliceGraph {
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.out[i] >> j & 1 == 1
    }

    pub fn out_degree(&self, i: usize) -> usize {
        self.out[i].count_ones() as usize
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.d)
            .flat_map(|i| (0..self.d).filter(move |&j| self.has_edge(i, j)).map(move |j| (i, j)))
            .collect()
    }

    pub fn has_loops(&self) -> bool {
        (0..self.d).any(|i| self.has_edge(i, i))
    }

    /// Adjacency of the undirected companion.
    pub fn undirected(&self) -> Vec<u64> {
        (0..self.d)
            .map(|i| {
                let incoming = (0..self.d).filter(|&j| self.has_edge(j, i)).fold(0u64, |m, j| m | 1 << j);
                (self.out[i] | incoming) & !(1u64 << i)
            })
            .collect()
    }

    /// Number of undirected edges.
    pub fn undirected_edge_count(&self) -> usize {
        self.undirected().iter().map(|m| m.count_ones() as usize).sum::<usize>() / 2
    }
}

pub fn slice_graph(c: &SlicedColoring) -> Result<SliceGraph> {
    let slices = c.by_axis()?;
    if c.d > MAX_GRAPH_VERTICES {
        return Err(Error::resource("slice graph vertices", c.d as u128, MAX_GRAPH_VERTICES as u128));
    }
    let mut out = vec![0u64; c.d];
    for (j, s) in slices.iter().enumerate() {
        for &i in &s.zeros {
            out[i] |= 1 << j;
        }
    }
    Ok(SliceGraph { d: c.d, out })
}

fn expand(adj: &[u64], r: &mut Vec<usize>, mut p: u64, best: &mut Vec<usize>) {
    if r.len() > best.len() {
        *best = r.clone();
    }
    while p != 0 {
        if r.len() + p.count_ones() as usize <= best.len() {
            return;
        }
        let v = p.trailing_zeros() as usize;
        r.push(v);
        expand(adj, r, p & adj[v], best);
        r.pop();
        p &= !(1u64 << v);
    }
}

/// A maximum clique, vertices ascending. Among maximum cliques the one
/// found first in ascending-vertex branch order is returned.
pub fn max_clique(adj: &[u64]) -> Result<Vec<usize>> {
    let d = adj.len();
    if d > MAX_GRAPH_VERTICES {
        return Err(Error::resource("clique search vertices", d as u128, MAX_GRAPH_VERTICES as u128));
    }
    let all = if d == 64 { u64::MAX } else { (1u64 << d) - 1 };
    let adj: Vec<u64> = adj.iter().enumerate().map(|(i, &m)| m & all & !(1u64 << i)).collect();
    let mut best = Vec::new();
    expand(&adj, &mut Vec::new(), all, &mut best);
    Ok(best)
}

/// A maximum independent set of an undirected graph.
pub fn max_independent_set(adj: &[u64]) -> Result<Vec<usize>> {
    let d = adj.len();
    let all = if d >= 64 { u64::MAX } else { (1u64 << d) - 1 };
    let complement: Vec<u64> = adj.iter().enumerate().map(|(i, &m)| !m & all & !(1u64 << i)).collect();
    max_clique(&complement)
}

/// Largest set of slices sharing a common point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MutualIntersection {
    pub size: usize,
    /// Axes of the slices, 0-based.
    pub slices: Vec<usize>,
    /// A point lying in all of them.
    pub point: Point,
    /// `point` with each listed slice's constant coordinate moved one
    /// step further out: red, with a blue neighbor along every listed axis.
    pub red_witness: Point,
}

/// Pinned coordinates of all `slices` written into one point; free
/// coordinates are 0.
fn common_point(d: usize, slices: &[&Slice]) -> Point {
    let mut p = vec![0; d];
    for s in slices {
        p[s.axis] = s.c;
    }
    p
}

pub fn max_mutual_intersection(c: &SlicedColoring) -> Result<MutualIntersection> {
    let slices = c.by_axis()?;
    let d = c.d;
    if d > MAX_GRAPH_VERTICES {
        return Err(Error::resource("slice intersection vertices", d as u128, MAX_GRAPH_VERTICES as u128));
    }
    let adj: Vec<u64> = (0..d)
        .map(|i| (0..d).filter(|&j| j != i && slices[i].intersects(slices[j])).fold(0u64, |m, j| m | 1 << j))
        .collect();
    let clique = max_clique(&adj)?;
    let chosen: Vec<&Slice> = clique.iter().map(|&i| slices[i]).collect();
    let point = common_point(d, &chosen);
    let mut red_witness = point.clone();
    for s in &chosen {
        red_witness[s.axis] += s.c.signum();
    }
    Ok(MutualIntersection { size: clique.len(), slices: clique, point, red_witness })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_clique(adj: &[u64]) -> usize {
        let d = adj.len();
        (0u64..1 << d)
            .filter(|&s| (0..d).all(|i| s >> i & 1 == 0 || (s & !(1 << i)) & !adj[i] == 0))
            .map(|s| s.count_ones() as usize)
            .max()
            .unwrap()
    }

    #[test]
    fn small_graphs() {
        let triangle = [0b110, 0b101, 0b011];
        assert_eq!(max_independent_set(&triangle).unwrap().len(), 1);
        assert_eq!(max_clique(&triangle).unwrap(), vec![0, 1, 2]);
        assert_eq!(max_independent_set(&[0; 5]).unwrap().len(), 5);
        let two_triangles = [0b000110, 0b000101, 0b000011, 0b110000, 0b101000, 0b011000];
        assert_eq!(max_independent_set(&two_triangles).unwrap(), vec![0, 3]);
        assert_eq!(max_clique(&[]).unwrap(), Vec::<usize>::new());
    }

    #[test]
    fn clique_matches_brute_force() {
        let mut state = 0x9e3779b97f4a7c15u64;
        for _ in 0..200 {
            let d = 1 + (state % 12) as usize;
            let mut adj = vec![0u64; d];
            for i in 0..d {
                for j in i + 1..d {
                    state ^= state << 13;
                    state ^= state >> 7;
                    state ^= state << 17;
                    if state % 3 != 0 {
                        adj[i] |= 1 << j;
                        adj[j] |= 1 << i;
                    }
                }
            }
            let clique = max_clique(&adj).unwrap();
            assert_eq!(clique.len(), brute_clique(&adj));
            assert!(clique.iter().all(|&a| clique.iter().all(|&b| a == b || adj[a] >> b & 1 == 1)));
        }
    }

    #[test]
    fn too_many_vertices() {
        assert!(max_clique(&vec![0; 65]).is_err());
    }
}
