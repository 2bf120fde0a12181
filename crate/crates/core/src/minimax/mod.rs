//! L⁰-convex combinations and exact per-atom game values.
//!
//! An element of the L⁰-convex hull of finitely many functions carries one
//! weight vector per atom. Minimising the essential supremum of such a
//! mixture therefore splits into one independent matrix game per atom, each
//! solved exactly by [`game_value`].

mod simplex;

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::l0::{check_partition, same_space, Event, ProbSpace, Rv};
use crate::rational::{fmt_q, Q};

/// Per-atom convex weights over a fixed list of function identifiers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixtureWeights {
    space: Arc<ProbSpace>,
    ids: Vec<usize>,
    weights: Vec<Vec<Q>>,
}

impl MixtureWeights {
    /// `weights[atom][k]` is the coefficient of `ids[k]` at `atom`.
    pub fn new(space: &Arc<ProbSpace>, ids: Vec<usize>, weights: Vec<Vec<Q>>) -> Result<Self> {
        if ids.is_empty() {
            return Err(Error::InvalidWeights(
                "at least one function identifier is required".into(),
            ));
        }
        let mut sorted = ids.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != ids.len() {
            return Err(Error::InvalidWeights(
                "duplicate function identifier".into(),
            ));
        }
        if weights.len() != space.len() {
            return Err(Error::LengthMismatch {
                expected: space.len(),
                got: weights.len(),
            });
        }
        for (atom, w) in weights.iter().enumerate() {
            if w.len() != ids.len() {
                return Err(Error::LengthMismatch {
                    expected: ids.len(),
                    got: w.len(),
                });
            }
            if w.iter().any(Signed::is_negative) {
                return Err(Error::InvalidWeights(format!(
                    "negative weight at atom {atom}"
                )));
            }
            let total: Q = w.iter().sum();
            if !total.is_one() {
                return Err(Error::InvalidWeights(format!(
                    "weights at atom {atom} sum to {}",
                    fmt_q(&total)
                )));
            }
        }
        Ok(MixtureWeights {
            space: Arc::clone(space),
            ids,
            weights,
        })
    }

    /// The same weight vector at every atom.
    pub fn constant(space: &Arc<ProbSpace>, ids: Vec<usize>, weights: Vec<Q>) -> Result<Self> {
        Self::new(space, ids, vec![weights; space.len()])
    }

    /// All mass on a single function.
    pub fn point(space: &Arc<ProbSpace>, id: usize) -> Self {
        MixtureWeights {
            space: Arc::clone(space),
            ids: vec![id],
            weights: vec![vec![Q::one()]; space.len()],
        }
    }

    pub fn space(&self) -> &Arc<ProbSpace> {
        &self.space
    }

    pub fn ids(&self) -> &[usize] {
        &self.ids
    }

    pub fn at(&self, atom: usize) -> &[Q] {
        &self.weights[atom]
    }

    /// Coefficient of `id` as a random variable (zero when `id` is absent).
    pub fn weight_of(&self, id: usize) -> Rv {
        match self.ids.iter().position(|&i| i == id) {
            Some(k) => Rv::from_fn(&self.space, |atom| self.weights[atom][k].clone()),
            None => Rv::zero(&self.space),
        }
    }

    /// Every coefficient is strictly positive at every atom.
    pub fn is_strictly_positive(&self) -> bool {
        self.weights.iter().flatten().all(Signed::is_positive)
    }

    /// Re-expresses the weights over a superset of identifiers, zero-filled.
    pub fn widen(&self, ids: &[usize]) -> Result<MixtureWeights> {
        let positions: Vec<Option<usize>> = ids
            .iter()
            .map(|id| self.ids.iter().position(|i| i == id))
            .collect();
        let covered = positions.iter().filter(|p| p.is_some()).count();
        if covered != self.ids.len() {
            return Err(Error::IdMismatch(
                "target identifier set does not contain the source set".into(),
            ));
        }
        let weights = self
            .weights
            .iter()
            .map(|w| {
                positions
                    .iter()
                    .map(|p| p.map_or_else(Q::zero, |k| w[k].clone()))
                    .collect()
            })
            .collect();
        MixtureWeights::new(&self.space, ids.to_vec(), weights)
    }

    /// `(1 − t)·self + t·other` per atom, over the union of identifiers.
    /// `t` must lie in `[0, 1]` at every atom.
    pub fn blend(&self, other: &MixtureWeights, t: &Rv) -> Result<MixtureWeights> {
        if !same_space(&self.space, &other.space) || !same_space(&self.space, t.space()) {
            return Err(Error::SpaceMismatch);
        }
        if t.values().iter().any(|v| v.is_negative() || *v > Q::one()) {
            return Err(Error::InvalidWeights(
                "blend parameter must lie in [0, 1]".into(),
            ));
        }
        let mut ids: Vec<usize> = self.ids.iter().chain(&other.ids).copied().collect();
        ids.sort_unstable();
        ids.dedup();
        let a = self.widen(&ids)?;
        let b = other.widen(&ids)?;
        let weights = (0..self.space.len())
            .map(|atom| {
                let s = t.at(atom);
                let r = Q::one() - s;
                a.weights[atom]
                    .iter()
                    .zip(&b.weights[atom])
                    .map(|(x, y)| &r * x + s * y)
                    .collect()
            })
            .collect();
        MixtureWeights::new(&self.space, ids, weights)
    }

    /// Piecewise weights: `parts[k]` on `partition[k]`. All parts must share
    /// the same identifier list.
    pub fn concatenate(partition: &[Event], parts: &[MixtureWeights]) -> Result<MixtureWeights> {
        if partition.len() != parts.len() {
            return Err(Error::LengthMismatch {
                expected: partition.len(),
                got: parts.len(),
            });
        }
        let first = parts
            .first()
            .ok_or_else(|| Error::InvalidPartition("partition is empty".into()))?;
        check_partition(&first.space, partition)?;
        if parts.iter().any(|p| p.ids != first.ids) {
            return Err(Error::IdMismatch(
                "concatenated weights use different identifiers".into(),
            ));
        }
        let mut weights = first.weights.clone();
        for (event, part) in partition.iter().zip(parts) {
            for atom in event.members() {
                weights[atom] = part.weights[atom].clone();
            }
        }
        MixtureWeights::new(&first.space, first.ids.clone(), weights)
    }
}

/// `Σ_j w_j · values_j`, computed atom by atom.
pub fn mix(w: &MixtureWeights, values: &BTreeMap<usize, Rv>) -> Result<Rv> {
    if values.len() != w.ids.len() || w.ids.iter().any(|id| !values.contains_key(id)) {
        return Err(Error::IdMismatch(format!(
            "weights over {:?}, values over {:?}",
            w.ids,
            values.keys().collect::<Vec<_>>()
        )));
    }
    for rv in values.values() {
        if !same_space(&w.space, rv.space()) {
            return Err(Error::SpaceMismatch);
        }
    }
    Ok(Rv::from_fn(&w.space, |atom| {
        w.ids
            .iter()
            .zip(&w.weights[atom])
            .map(|(id, c)| c * values[id].at(atom))
            .sum()
    }))
}

/// Payoffs at one atom: `entries[r][c]` is the value of function `rows[r]` at
/// base point `columns[c]`. The row player minimises.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PayoffMatrix {
    pub rows: Vec<usize>,
    pub columns: Vec<usize>,
    pub entries: Vec<Vec<Q>>,
}

impl PayoffMatrix {
    pub fn new(rows: Vec<usize>, columns: Vec<usize>, entries: Vec<Vec<Q>>) -> Result<Self> {
        if rows.is_empty() || columns.is_empty() {
            return Err(Error::Domain("payoff matrix must be nonempty".into()));
        }
        if entries.len() != rows.len() {
            return Err(Error::LengthMismatch {
                expected: rows.len(),
                got: entries.len(),
            });
        }
        if let Some(bad) = entries.iter().find(|r| r.len() != columns.len()) {
            return Err(Error::LengthMismatch {
                expected: columns.len(),
                got: bad.len(),
            });
        }
        Ok(PayoffMatrix {
            rows,
            columns,
            entries,
        })
    }

    pub fn from_entries(entries: Vec<Vec<Q>>) -> Result<Self> {
        let rows = (0..entries.len()).collect();
        let columns = (0..entries.first().map_or(0, Vec::len)).collect();
        Self::new(rows, columns, entries)
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    /// `max_c Σ_r w_r · entries[r][c]`.
    pub fn max_over_columns(&self, w: &[Q]) -> Q {
        (0..self.n_cols())
            .map(|c| {
                self.entries
                    .iter()
                    .zip(w)
                    .map(|(row, wr)| wr * &row[c])
                    .sum::<Q>()
            })
            .max()
            .expect("nonempty matrix")
    }

    /// `min_r Σ_c q_c · entries[r][c]`.
    pub fn min_over_rows(&self, q: &[Q]) -> Q {
        self.entries
            .iter()
            .map(|row| row.iter().zip(q).map(|(a, qc)| a * qc).sum::<Q>())
            .min()
            .expect("nonempty matrix")
    }

    pub fn scaled(&self, c: &Q) -> PayoffMatrix {
        PayoffMatrix {
            rows: self.rows.clone(),
            columns: self.columns.clone(),
            entries: self
                .entries
                .iter()
                .map(|r| r.iter().map(|v| v * c).collect())
                .collect(),
        }
    }
}

/// Exact solution of one matrix game.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameSolution {
    /// `min_w max_c (wᵀA)_c`.
    pub value: Q,
    /// An optimal row mixture, aligned with `PayoffMatrix::rows`.
    pub weights: Vec<Q>,
    /// An optimal column mixture; `min_r (A q)_r = value` certifies optimality.
    pub column_strategy: Vec<Q>,
}

fn indicator(len: usize, at: usize) -> Vec<Q> {
    (0..len)
        .map(|i| if i == at { Q::one() } else { Q::zero() })
        .collect()
}

fn first_position<'a>(items: impl Iterator<Item = &'a Q>, target: &Q) -> usize {
    items
        .into_iter()
        .position(|v| v == target)
        .expect("target taken from items")
}

/// Solves `min_{w ∈ Δ} max_c (wᵀA)_c` exactly.
///
/// Single-row and single-column games are answered directly. Otherwise the
/// matrix is shifted to be strictly positive and the packing program
/// `max 1ᵀx, Aᵀx ≤ 1` is solved with Bland's rule; `w = x / 1ᵀx`.
pub fn game_value(matrix: &PayoffMatrix) -> GameSolution {
    let (r, c) = (matrix.n_rows(), matrix.n_cols());
    if r == 1 {
        let row = &matrix.entries[0];
        let value = row.iter().max().expect("nonempty").clone();
        let at = first_position(row.iter(), &value);
        return GameSolution {
            value,
            weights: vec![Q::one()],
            column_strategy: indicator(c, at),
        };
    }
    if c == 1 {
        let value = matrix
            .entries
            .iter()
            .map(|row| &row[0])
            .min()
            .expect("nonempty")
            .clone();
        let at = first_position(matrix.entries.iter().map(|row| &row[0]), &value);
        return GameSolution {
            value,
            weights: indicator(r, at),
            column_strategy: vec![Q::one()],
        };
    }

    let lowest = matrix
        .entries
        .iter()
        .flatten()
        .min()
        .expect("nonempty")
        .clone();
    let shift = Q::one() - &lowest;
    // constraint per column, variable per row
    let packing: Vec<Vec<Q>> = (0..c)
        .map(|col| {
            matrix
                .entries
                .iter()
                .map(|row| &row[col] + &shift)
                .collect()
        })
        .collect();
    let sol = simplex::solve_packing(&packing);
    let shifted_value = sol.objective.recip();
    let weights = sol.x.iter().map(|x| x * &shifted_value).collect();
    let column_strategy = sol.y.iter().map(|y| y * &shifted_value).collect();
    GameSolution {
        value: shifted_value - shift,
        weights,
        column_strategy,
    }
}

/// Per-atom game value at `atom`, with the attaining weights.
pub fn game_value_per_atom(matrices: &[PayoffMatrix], atom: usize) -> Result<(Q, Vec<Q>)> {
    let m = matrices.get(atom).ok_or(Error::LengthMismatch {
        expected: atom + 1,
        got: matrices.len(),
    })?;
    let sol = game_value(m);
    Ok((sol.value, sol.weights))
}

/// `essinf_{f ∈ co_{L⁰}(F)} esssup_X f(X)` where `matrices[atom]` tabulates
/// the functions of `F` against the domain at that atom. Returns the value and
/// the attaining per-atom weights, which generally differ between atoms.
pub fn essinf_over_hull(
    space: &Arc<ProbSpace>,
    matrices: &[PayoffMatrix],
) -> Result<(Rv, MixtureWeights)> {
    if matrices.len() != space.len() {
        return Err(Error::LengthMismatch {
            expected: space.len(),
            got: matrices.len(),
        });
    }
    let ids = matrices[0].rows.clone();
    if matrices.iter().any(|m| m.rows != ids) {
        return Err(Error::IdMismatch(
            "per-atom matrices list different functions".into(),
        ));
    }
    let solutions: Vec<GameSolution> = matrices.iter().map(game_value).collect();
    let value = Rv::new(space, solutions.iter().map(|s| s.value.clone()).collect())?;
    let weights = MixtureWeights::new(
        space,
        ids,
        solutions.into_iter().map(|s| s.weights).collect(),
    )?;
    Ok((value, weights))
}
