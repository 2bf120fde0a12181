//! Dense exact-rational primal simplex with Bland's rule, specialised to
//! packing programs `max 1ᵀx  s.t.  A x ≤ 1,  x ≥ 0` with `A > 0`.
//!
//! The origin is feasible and the region is bounded, so no phase one is
//! needed and the optimum always exists.

use num_traits::{One, Signed, Zero};

use crate::rational::Q;

#[derive(Debug, Clone)]
pub(crate) struct PackingSolution {
    /// Optimal primal point.
    pub x: Vec<Q>,
    /// Optimal dual point: `min 1ᵀy  s.t.  Aᵀy ≥ 1,  y ≥ 0`.
    pub y: Vec<Q>,
    pub objective: Q,
}

/// `a` has one row per constraint and one column per variable; every entry
/// must be strictly positive.
pub(crate) fn solve_packing(a: &[Vec<Q>]) -> PackingSolution {
    let rows = a.len();
    let vars = a.first().map_or(0, Vec::len);
    debug_assert!(a
        .iter()
        .all(|r| r.len() == vars && r.iter().all(Signed::is_positive)));

    // columns: structural 0..vars, slack vars..vars+rows, then rhs
    let width = vars + rows + 1;
    let rhs = width - 1;
    let mut tab: Vec<Vec<Q>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut t = vec![Q::zero(); width];
            t[..vars].clone_from_slice(row);
            t[vars + i] = Q::one();
            t[rhs] = Q::one();
            t
        })
        .collect();
    // reduced costs c_j - z_j, and the objective value in the rhs slot
    let mut cost = vec![Q::zero(); width];
    cost[..vars].fill(Q::one());
    let mut basis: Vec<usize> = (vars..vars + rows).collect();

    // Bland: lowest-index improving column
    while let Some(enter) = (0..rhs).find(|&j| cost[j].is_positive()) {
        // Bland: minimum ratio, ties to the lowest-index basic variable
        let mut leave: Option<(usize, Q)> = None;
        for (i, row) in tab.iter().enumerate() {
            if !row[enter].is_positive() {
                continue;
            }
            let ratio = &row[rhs] / &row[enter];
            let better = match &leave {
                None => true,
                Some((best, best_ratio)) => {
                    ratio < *best_ratio || (ratio == *best_ratio && basis[i] < basis[*best])
                }
            };
            if better {
                leave = Some((i, ratio));
            }
        }
        let (pr, _) = leave.expect("packing programs are bounded");
        pivot(&mut tab, &mut cost, pr, enter);
        basis[pr] = enter;
    }

    let mut x = vec![Q::zero(); vars];
    for (i, &b) in basis.iter().enumerate() {
        if b < vars {
            x[b] = tab[i][rhs].clone();
        }
    }
    let y = (0..rows).map(|i| -&cost[vars + i]).collect();
    PackingSolution {
        x,
        y,
        objective: -&cost[rhs],
    }
}

fn pivot(tab: &mut [Vec<Q>], cost: &mut [Q], pr: usize, pc: usize) {
    let inv = tab[pr][pc].recip();
    for v in tab[pr].iter_mut() {
        *v *= &inv;
    }
    let prow = tab[pr].clone();
    for (i, row) in tab.iter_mut().enumerate() {
        if i == pr || row[pc].is_zero() {
            continue;
        }
        let factor = row[pc].clone();
        for (v, p) in row.iter_mut().zip(&prow) {
            if !p.is_zero() {
                *v -= &factor * p;
            }
        }
    }
    if !cost[pc].is_zero() {
        let factor = cost[pc].clone();
        for (v, p) in cost.iter_mut().zip(&prow) {
            if !p.is_zero() {
                *v -= &factor * p;
            }
        }
    }
}
