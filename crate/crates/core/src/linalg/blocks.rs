use num_complex::Complex64;

use super::{ComplexMatrix, Result};

/// Index sets of the irreducible diagonal blocks of a square matrix.
///
/// Two indices share a block when they are connected through nonzero
/// entries (in either direction). Permuting the matrix by these sets makes
/// it block diagonal, so any matrix function can be evaluated block by block.
pub(crate) fn irreducible_blocks(m: &ComplexMatrix) -> Vec<Vec<usize>> {
    let n = m.rows();
    let mut parent: Vec<usize> = (0..n).collect();

    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }

    for i in 0..n {
        for (j, z) in m.row(i).iter().enumerate() {
            if j != i && *z != Complex64::new(0.0, 0.0) {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }

    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let root = find(&mut parent, i);
        if slot[root] == usize::MAX {
            slot[root] = blocks.len();
            blocks.push(Vec::new());
        }
        blocks[slot[root]].push(i);
    }
    blocks
}

pub(crate) fn extract(m: &ComplexMatrix, idx: &[usize]) -> Result<ComplexMatrix> {
    ComplexMatrix::from_fn(idx.len(), idx.len(), |a, b| m[(idx[a], idx[b])])
}

pub(crate) fn scatter(target: &mut ComplexMatrix, idx: &[usize], block: &ComplexMatrix) {
    for (a, &i) in idx.iter().enumerate() {
        for (b, &j) in idx.iter().enumerate() {
            target.set(i, j, block[(a, b)]);
        }
    }
}
