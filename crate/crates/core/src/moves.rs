//! Schedule perturbations shared by the annealer (as neighbor moves) and the
//! evolutionary scheduler (as mutations).

use rand::seq::SliceRandom;
use rand::Rng;

use crate::schedule::Schedule;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Move {
    /// Reassign one cell to a different node.
    Flip,
    /// Apply `Flip` 2..=5 times.
    MultiFlip,
    SwapRows,
    SwapColumns,
    /// Exchange the qubit sets of two nodes within one time step.
    SwapNodes,
    /// Permute the rows in a random contiguous range.
    ShuffleRows,
    /// Permute the columns in a random contiguous range.
    ShuffleColumns,
}

impl Move {
    /// The mutation vocabulary of the evolutionary scheduler.
    pub const ALL: [Move; 7] = [
        Move::Flip,
        Move::MultiFlip,
        Move::SwapRows,
        Move::SwapColumns,
        Move::SwapNodes,
        Move::ShuffleRows,
        Move::ShuffleColumns,
    ];

    /// The annealer's neighbor moves: everything but `MultiFlip`.
    pub const NEIGHBOR: [Move; 6] = [
        Move::Flip,
        Move::SwapRows,
        Move::SwapColumns,
        Move::SwapNodes,
        Move::ShuffleRows,
        Move::ShuffleColumns,
    ];

    pub const MULTI_FLIP_MIN: usize = 2;
    pub const MULTI_FLIP_MAX: usize = 5;

    /// Applies the move in place. Moves that need two distinct rows, columns
    /// or nodes are no-ops when the dimension is 1.
    pub fn apply<R: Rng + ?Sized>(self, s: &mut Schedule, num_nodes: usize, rng: &mut R) {
        let (rows, cols) = (s.num_qubits(), s.depth());
        if rows == 0 || cols == 0 {
            return;
        }
        match self {
            Move::Flip => flip(s, num_nodes, rng),
            Move::MultiFlip => {
                let k = rng.gen_range(Self::MULTI_FLIP_MIN..=Self::MULTI_FLIP_MAX);
                for _ in 0..k {
                    flip(s, num_nodes, rng);
                }
            }
            Move::SwapRows => {
                if let Some((a, b)) = distinct_pair(rows, rng) {
                    s.swap_rows(a, b);
                }
            }
            Move::SwapColumns => {
                if let Some((a, b)) = distinct_pair(cols, rng) {
                    s.swap_columns(a, b);
                }
            }
            Move::SwapNodes => {
                if let Some((a, b)) = distinct_pair(num_nodes, rng) {
                    let t = rng.gen_range(0..cols);
                    swap_nodes(s, t, a, b);
                }
            }
            Move::ShuffleRows => {
                if let Some((start, end)) = ordered_pair(rows, rng) {
                    let mut order: Vec<usize> = (start..=end).collect();
                    order.shuffle(rng);
                    let old = s.clone();
                    for (dst, &src) in (start..=end).zip(&order) {
                        for t in 0..cols {
                            s.set(dst, t, old.get(src, t));
                        }
                    }
                }
            }
            Move::ShuffleColumns => {
                if let Some((start, end)) = ordered_pair(cols, rng) {
                    let mut order: Vec<usize> = (start..=end).collect();
                    order.shuffle(rng);
                    let old = s.clone();
                    for (dst, &src) in (start..=end).zip(&order) {
                        for q in 0..rows {
                            s.set(q, dst, old.get(q, src));
                        }
                    }
                }
            }
        }
    }
}

/// Every qubit on node `a` at step `t` moves to `b` and vice versa.
pub fn swap_nodes(s: &mut Schedule, t: usize, a: usize, b: usize) {
    for q in 0..s.num_qubits() {
        let n = s.get(q, t);
        if n == a {
            s.set(q, t, b);
        } else if n == b {
            s.set(q, t, a);
        }
    }
}

fn flip<R: Rng + ?Sized>(s: &mut Schedule, num_nodes: usize, rng: &mut R) {
    if num_nodes < 2 {
        return;
    }
    let q = rng.gen_range(0..s.num_qubits());
    let t = rng.gen_range(0..s.depth());
    let old = s.get(q, t);
    // uniform over the other nodes
    let mut n = rng.gen_range(0..num_nodes - 1);
    if n >= old {
        n += 1;
    }
    s.set(q, t, n);
}

fn distinct_pair<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Option<(usize, usize)> {
    if n < 2 {
        return None;
    }
    let a = rng.gen_range(0..n);
    let mut b = rng.gen_range(0..n - 1);
    if b >= a {
        b += 1;
    }
    Some((a, b))
}

/// `start < end`, both in `0..n`.
fn ordered_pair<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Option<(usize, usize)> {
    distinct_pair(n, rng).map(|(a, b)| (a.min(b), a.max(b)))
}
