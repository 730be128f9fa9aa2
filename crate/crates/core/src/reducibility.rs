//! Irreducibility test for square matrices.
//!
//! A square matrix is irreducible iff the digraph induced by its nonzero
//! pattern (edge i → j when |M[i,j]| is above a threshold) is strongly
//! connected. Strong connectivity is decided with Tarjan's algorithm,
//! implemented iteratively so deep graphs cannot overflow the stack.

use crate::matcore::Matrix;
use crate::{Error, Result};

/// Nonzero-pattern digraph of a square matrix.
#[derive(Clone, Debug)]
pub struct NonzeroDigraph {
    pub n: usize,
    /// Out-neighbour lists; self-loops are kept (they never affect strong
    /// connectivity).
    pub adjacency: Vec<Vec<usize>>,
}

/// Build the digraph with edge i → j iff |M[i,j]| > threshold. The default
/// threshold 0 gives exact-nonzero semantics; a positive value acts as a
/// noise floor for matrices computed in floating point.
pub fn adjacency_from_nonzeros(m: &Matrix, threshold: f64) -> Result<NonzeroDigraph> {
    if m.rows() != m.cols() {
        return Err(Error::InvalidInput(format!(
            "matrix must be square, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    if !(threshold >= 0.0) {
        return Err(Error::InvalidInput(format!("threshold must be >= 0, got {threshold}")));
    }
    let n = m.rows();
    let adjacency = (0..n)
        .map(|i| (0..n).filter(|&j| m[(i, j)].abs() > threshold).collect())
        .collect();
    Ok(NonzeroDigraph { n, adjacency })
}

/// Strongly-connected-component partition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SccPartition {
    /// Component id of each node (ids are arbitrary but dense, 0..count).
    pub component_of: Vec<usize>,
    pub count: usize,
}

/// Tarjan's SCC algorithm, iterative formulation.
pub fn strongly_connected_components(g: &NonzeroDigraph) -> SccPartition {
    const UNSET: usize = usize::MAX;
    let n = g.n;
    let mut index = vec![UNSET; n];
    let mut lowlink = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut component_of = vec![UNSET; n];
    let mut next_index = 0usize;
    let mut count = 0usize;

    // Each frame is (node, next out-edge position to examine).
    let mut call: Vec<(usize, usize)> = Vec::new();
    for root in 0..n {
        if index[root] != UNSET {
            continue;
        }
        call.push((root, 0));
        index[root] = next_index;
        lowlink[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut edge)) = call.last_mut() {
            if *edge < g.adjacency[v].len() {
                let w = g.adjacency[v][*edge];
                *edge += 1;
                if index[w] == UNSET {
                    index[w] = next_index;
                    lowlink[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    lowlink[v] = lowlink[v].min(index[w]);
                }
            } else {
                call.pop();
                if lowlink[v] == index[v] {
                    loop {
                        let w = stack.pop().expect("Tarjan stack invariant");
                        on_stack[w] = false;
                        component_of[w] = count;
                        if w == v {
                            break;
                        }
                    }
                    count += 1;
                }
                if let Some(&mut (parent, _)) = call.last_mut() {
                    lowlink[parent] = lowlink[parent].min(lowlink[v]);
                }
            }
        }
    }
    SccPartition { component_of, count }
}

/// True iff the nonzero digraph of `m` is strongly connected. The SCC
/// partition comes along for diagnostics: on a reducible matrix it shows
/// which blocks the matrix decouples into.
pub fn is_irreducible(m: &Matrix, threshold: f64) -> Result<(bool, SccPartition)> {
    let g = adjacency_from_nonzeros(m, threshold)?;
    let part = strongly_connected_components(&g);
    Ok((part.count == 1 && g.n > 0, part))
}
