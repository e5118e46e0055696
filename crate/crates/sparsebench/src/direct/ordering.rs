//! Elimination orderings: natural (identity) and greedy minimum degree.

use super::{symmetrized_adjacency, DirectError};
use crate::sparse::{CsrMatrix, Permutation};
use std::cmp::Reverse;
use std::collections::BinaryHeap;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderingMethod {
    Natural,
    MinimumDegree,
}

impl OrderingMethod {
    pub fn name(&self) -> &'static str {
        match self {
            OrderingMethod::Natural => "natural",
            OrderingMethod::MinimumDegree => "mindeg",
        }
    }

    pub fn order(&self, a: &CsrMatrix) -> Result<EliminationOrdering, DirectError> {
        match self {
            OrderingMethod::Natural => natural_order(a),
            OrderingMethod::MinimumDegree => minimum_degree_order(a),
        }
    }
}

/// A column permutation together with the method that produced it. Position
/// `k` of the permutation names the vertex eliminated at step `k`.
#[derive(Debug, Clone)]
pub struct EliminationOrdering {
    pub col_perm: Permutation,
    pub method: OrderingMethod,
}

fn check_square(a: &CsrMatrix) -> Result<usize, DirectError> {
    if a.n_rows() == 0 {
        return Err(DirectError::EmptyMatrix);
    }
    if a.n_rows() != a.n_cols() {
        return Err(DirectError::NotSquare(a.n_rows(), a.n_cols()));
    }
    Ok(a.n_rows())
}

/// Identity ordering, the baseline for fill comparisons.
pub fn natural_order(a: &CsrMatrix) -> Result<EliminationOrdering, DirectError> {
    let n = check_square(a)?;
    Ok(EliminationOrdering {
        col_perm: Permutation::identity(n),
        method: OrderingMethod::Natural,
    })
}

/// Greedy minimum-degree ordering on the graph of `A + A^T`.
///
/// Exact external degrees, ties broken by smallest vertex index, so the
/// result is deterministic. Eliminated neighbourhoods are kept as elements
/// of a quotient graph rather than explicit cliques; elements absorbed by a
/// new pivot are dropped.
pub fn minimum_degree_order(a: &CsrMatrix) -> Result<EliminationOrdering, DirectError> {
    let n = check_square(a)?;
    let orig: Vec<Vec<usize>> = symmetrized_adjacency(a);

    let mut nbrs: Vec<Vec<usize>> = orig;
    // Elements a vertex currently belongs to, and element membership lists.
    let mut vertex_elems: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut elements: Vec<Vec<usize>> = Vec::new();
    let mut element_alive: Vec<bool> = Vec::new();
    let mut eliminated = vec![false; n];
    let mut degree: Vec<usize> = nbrs.iter().map(|l| l.len()).collect();

    let mut heap: BinaryHeap<Reverse<(usize, usize)>> = BinaryHeap::with_capacity(2 * n);
    for (v, d) in degree.iter().enumerate() {
        heap.push(Reverse((*d, v)));
    }

    let mut marker = vec![0u32; n];
    let mut epoch = 0u32;
    let mut order = Vec::with_capacity(n);
    let mut reach: Vec<usize> = Vec::new();

    while order.len() < n {
        let v = loop {
            let Reverse((d, v)) = heap.pop().expect("heap exhausted before all eliminated");
            if !eliminated[v] && degree[v] == d {
                break v;
            }
        };

        // Reachable set of the pivot: uneliminated original neighbours plus
        // the uneliminated members of its elements. This becomes a new
        // element, and the pivot's old elements are absorbed by it.
        epoch += 1;
        marker[v] = epoch;
        reach.clear();
        for &u in &nbrs[v] {
            if !eliminated[u] && marker[u] != epoch {
                marker[u] = epoch;
                reach.push(u);
            }
        }
        for &e in &vertex_elems[v] {
            if element_alive[e] {
                for &u in &elements[e] {
                    if !eliminated[u] && u != v && marker[u] != epoch {
                        marker[u] = epoch;
                        reach.push(u);
                    }
                }
            }
        }
        for &e in &vertex_elems[v] {
            element_alive[e] = false;
        }
        eliminated[v] = true;
        order.push(v);

        let new_elem = elements.len();
        elements.push(reach.clone());
        element_alive.push(true);

        for &u in &reach {
            nbrs[u].retain(|&w| !eliminated[w]);
            vertex_elems[u].retain(|&e| element_alive[e]);
            vertex_elems[u].push(new_elem);

            // Exact external degree of u.
            epoch += 1;
            marker[u] = epoch;
            let mut deg = 0usize;
            for &w in &nbrs[u] {
                if marker[w] != epoch {
                    marker[w] = epoch;
                    deg += 1;
                }
            }
            for &e in &vertex_elems[u] {
                for &w in &elements[e] {
                    if !eliminated[w] && marker[w] != epoch {
                        marker[w] = epoch;
                        deg += 1;
                    }
                }
            }
            degree[u] = deg;
            heap.push(Reverse((deg, u)));
        }
    }

    Ok(EliminationOrdering {
        col_perm: Permutation::from_forward(order).expect("elimination order is a permutation"),
        method: OrderingMethod::MinimumDegree,
    })
}
