//! Brute-force ground truth for the verifier quantities on tiny instances.
//!
//! Nothing here calls into the solver or verifier: tables are read straight
//! from the instance, selections are enumerated with a local odometer, and
//! mixtures range over the simplex lattice `{i/k}` in exact integer
//! arithmetic.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::instance::{Instance, SelectionSet};
use crate::l0::Rv;
use crate::minimax::PayoffMatrix;
use crate::rational::Q;

pub const MAX_FUNCTIONS: usize = 5;
pub const MAX_BASE_POINTS: usize = 5;
pub const MAX_ATOMS: usize = 3;
pub const MAX_LATTICE_POINTS: u128 = 20_000_000;

/// Simplex lattice with denominator `resolution`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSpec {
    resolution: u32,
}

impl GridSpec {
    pub fn new(resolution: u32) -> Result<Self> {
        if resolution == 0 {
            return Err(Error::Domain("grid resolution must be at least 1".into()));
        }
        Ok(GridSpec { resolution })
    }

    pub fn resolution(&self) -> u32 {
        self.resolution
    }
}

/// `C(k + r − 1, r − 1)`, the number of lattice points of the `r`-simplex.
pub fn lattice_size(rows: usize, k: u32) -> u128 {
    let mut acc: u128 = 1;
    for i in 1..rows as u128 {
        acc = acc.saturating_mul(k as u128 + i) / i;
    }
    acc
}

fn search(
    rows: &[Vec<BigInt>],
    j: usize,
    remaining: u32,
    partial: &[BigInt],
    best: &mut Option<BigInt>,
) {
    if j + 1 == rows.len() {
        let top = partial
            .iter()
            .zip(&rows[j])
            .map(|(p, a)| p + a * remaining)
            .max()
            .expect("nonempty row");
        if best.as_ref().is_none_or(|b| top < *b) {
            *best = Some(top);
        }
        return;
    }
    let mut cur = partial.to_vec();
    for i in 0..=remaining {
        search(rows, j + 1, remaining - i, &cur, best);
        for (c, a) in cur.iter_mut().zip(&rows[j]) {
            *c += a;
        }
    }
}

/// `min` over lattice weights of the `max` over columns, exactly.
pub fn brute_game(matrix: &PayoffMatrix, grid: GridSpec) -> Result<Q> {
    let r = matrix.entries.len();
    let c = matrix.entries.first().map_or(0, Vec::len);
    if r == 0 || c == 0 {
        return Err(Error::Domain("payoff matrix must be nonempty".into()));
    }
    let count = lattice_size(r, grid.resolution);
    if count > MAX_LATTICE_POINTS {
        return Err(Error::CapExceeded {
            count,
            cap: MAX_LATTICE_POINTS,
        });
    }
    let lcm = matrix
        .entries
        .iter()
        .flatten()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let scaled: Vec<Vec<BigInt>> = matrix
        .entries
        .iter()
        .map(|row| row.iter().map(|v| v.numer() * (&lcm / v.denom())).collect())
        .collect();
    let mut best = None;
    search(
        &scaled,
        0,
        grid.resolution,
        &vec![BigInt::zero(); c],
        &mut best,
    );
    let best = best.expect("lattice is nonempty");
    Ok(Q::new(best, lcm * BigInt::from(grid.resolution)))
}

/// Distinct tables over the whole sequence, compared value by value.
fn distinct_tables(instance: &Instance) -> Vec<Vec<Vec<Q>>> {
    let mut out: Vec<Vec<Vec<Q>>> = Vec::new();
    for f in instance.functions().items() {
        let table: Vec<Vec<Q>> = f.table().iter().map(|rv| rv.values().to_vec()).collect();
        if !out.contains(&table) {
            out.push(table);
        }
    }
    out
}

/// Per atom, the lattice minimum over mixtures of all distinct functions of
/// the maximum over base points. An upper bound on `m`.
pub fn brute_rhs(instance: &Instance, grid: GridSpec) -> Result<Rv> {
    let tables = distinct_tables(instance);
    if tables.len() > MAX_FUNCTIONS {
        return Err(Error::SizeCap {
            what: "distinct functions",
            size: tables.len(),
            cap: MAX_FUNCTIONS,
        });
    }
    if instance.n_base() > MAX_BASE_POINTS {
        return Err(Error::SizeCap {
            what: "base points",
            size: instance.n_base(),
            cap: MAX_BASE_POINTS,
        });
    }
    if instance.n_atoms() > MAX_ATOMS {
        return Err(Error::SizeCap {
            what: "atoms",
            size: instance.n_atoms(),
            cap: MAX_ATOMS,
        });
    }
    let values = (0..instance.n_atoms())
        .map(|atom| {
            let entries = tables
                .iter()
                .map(|t| (0..instance.n_base()).map(|b| t[b][atom].clone()).collect())
                .collect();
            brute_game(&PayoffMatrix::from_entries(entries)?, grid)
        })
        .collect::<Result<Vec<_>>>()?;
    Rv::new(instance.space(), values)
}

/// Enumerates `S`, takes each selection's limsup by scanning the cycle, then
/// the per-atom maximum.
pub fn brute_lhs(instance: &Instance, cap: u128) -> Result<Rv> {
    let atoms = instance.n_atoms();
    let base = instance.n_base();
    let selections: Vec<Vec<usize>> = match instance.selection_set() {
        SelectionSet::Explicit(list) => list.iter().map(|z| z.assignment().to_vec()).collect(),
        SelectionSet::All => {
            let count = (base as u128)
                .checked_pow(atoms as u32)
                .unwrap_or(u128::MAX);
            if count > cap {
                return Err(Error::CapExceeded { count, cap });
            }
            (0..count as usize)
                .map(|mut code| {
                    let mut z = vec![0; atoms];
                    for slot in z.iter_mut().rev() {
                        *slot = code % base;
                        code /= base;
                    }
                    z
                })
                .collect()
        }
    };
    let cycle = instance.functions().cycle();
    let mut best: Vec<Option<Q>> = vec![None; atoms];
    for z in &selections {
        for (atom, slot) in best.iter_mut().enumerate() {
            let mut limsup: Option<&Q> = None;
            for f in cycle {
                let v = f.table()[z[atom]].at(atom);
                if limsup.is_none_or(|cur| v > cur) {
                    limsup = Some(v);
                }
            }
            let v = limsup.expect("cycle is nonempty");
            if slot.as_ref().is_none_or(|cur| v > cur) {
                *slot = Some(v.clone());
            }
        }
    }
    let values = best
        .into_iter()
        .map(|v| v.ok_or(Error::EmptyFamily))
        .collect::<Result<Vec<_>>>()?;
    Rv::new(instance.space(), values)
}
