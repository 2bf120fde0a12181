//! Independent exact oracles shared by the integration tests. Nothing here
//! calls the library's solver.

#![allow(dead_code)]

use std::path::PathBuf;

use l0_simons::Q;
use num_traits::{One, Signed, Zero};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

/// Solves the square system `a x = b` by Gaussian elimination; `None` if singular.
pub fn solve_linear(mut a: Vec<Vec<Q>>, mut b: Vec<Q>) -> Option<Vec<Q>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let factor = &a[r][col] / &a[col][col];
                let pivot_row = a[col].clone();
                for (x, p) in a[r].iter_mut().zip(&pivot_row).skip(col) {
                    *x -= &factor * p;
                }
                let delta = &factor * &b[col];
                b[r] -= delta;
            }
        }
    }
    Some((0..n).map(|i| &b[i] / &a[i][i]).collect())
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// `min_{w∈Δ} max_c (wᵀA)_c` by enumerating every vertex of the epigraph
/// polytope `{(w, t) : w ≥ 0, Σw = 1, (wᵀA)_c ≤ t}`.
pub fn vertex_game_value(a: &[Vec<Q>]) -> (Q, Vec<Q>) {
    let r = a.len();
    let c = a[0].len();
    // inequality k < c: Σ_i w_i a[i][k] − t ≤ 0; inequality c + i: −w_i ≤ 0
    let row_of = |k: usize| -> Vec<Q> {
        let mut v = vec![Q::zero(); r + 1];
        if k < c {
            for i in 0..r {
                v[i] = a[i][k].clone();
            }
            v[r] = -Q::one();
        } else {
            v[k - c] = Q::one();
        }
        v
    };
    let mut best: Option<(Q, Vec<Q>)> = None;
    for tight in subsets(c + r, r) {
        let mut m: Vec<Vec<Q>> = tight.iter().map(|&k| row_of(k)).collect();
        let mut rhs = vec![Q::zero(); r];
        let mut simplex = vec![Q::one(); r];
        simplex.push(Q::zero());
        m.push(simplex);
        rhs.push(Q::one());
        let Some(x) = solve_linear(m, rhs) else {
            continue;
        };
        let (w, t) = (&x[..r], &x[r]);
        if w.iter().any(|v| v.is_negative()) {
            continue;
        }
        let feasible = (0..c).all(|k| (0..r).map(|i| &w[i] * &a[i][k]).sum::<Q>() <= *t);
        if feasible && best.as_ref().is_none_or(|(b, _)| t < b) {
            best = Some((t.clone(), w.to_vec()));
        }
    }
    best.expect("the simplex has a vertex")
}
