//! Finite instances: base points, function tables, radius and selection set.
//!
//! `E` is the set of all selections `X: Ω → B` over a finite base set `B`;
//! each function in the sequence is induced by a payoff table
//! `f̂: B → L⁰` through `f(X)(ω) = f̂(X(ω))(ω)`. `S ⊆ E` is either all of
//! `E` or an explicit list.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::l0::{same_space, EventuallyPeriodicSeq, ProbSpace, Rv};
use crate::minimax::{MixtureWeights, PayoffMatrix};
use crate::rational::{fmt_q, Q};

/// Default cap on `|B|^|Ω|` when `E` has to be enumerated.
pub const DEFAULT_SELECTION_CAP: u128 = 4096;

/// Payoff table: `table[b]` is the value profile across atoms at base point `b`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BaseFunction {
    table: Vec<Rv>,
}

impl BaseFunction {
    pub fn new(table: Vec<Rv>) -> Result<Self> {
        let first = table
            .first()
            .ok_or_else(|| Error::Domain("payoff table is empty".into()))?;
        if table
            .iter()
            .any(|rv| !same_space(rv.space(), first.space()))
        {
            return Err(Error::SpaceMismatch);
        }
        Ok(BaseFunction { table })
    }

    /// The same profile at every base point.
    pub fn constant(profile: Rv, base_points: usize) -> Self {
        BaseFunction {
            table: vec![profile; base_points],
        }
    }

    pub fn table(&self) -> &[Rv] {
        &self.table
    }

    pub fn at(&self, base: usize, atom: usize) -> &Q {
        self.table[base].at(atom)
    }

    pub fn scaled(&self, c: &Q) -> BaseFunction {
        BaseFunction {
            table: self.table.iter().map(|rv| rv.scale(c)).collect(),
        }
    }
}

/// A measurable selection: one base point index per atom.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Selection {
    assignment: Vec<usize>,
}

impl Selection {
    pub fn new(assignment: Vec<usize>) -> Self {
        Selection { assignment }
    }

    /// `X ≡ b`.
    pub fn constant(base: usize, atoms: usize) -> Self {
        Selection {
            assignment: vec![base; atoms],
        }
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn at(&self, atom: usize) -> usize {
        self.assignment[atom]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SelectionSet {
    All,
    Explicit(Vec<Selection>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    space: Arc<ProbSpace>,
    base_points: Vec<String>,
    functions: EventuallyPeriodicSeq<BaseFunction>,
    epsilon: Rv,
    s: SelectionSet,
}

impl Instance {
    /// Checks shapes only; semantic problems (ball violations, malformed
    /// selections) are reported by [`validate`].
    pub fn new(
        space: Arc<ProbSpace>,
        base_points: Vec<String>,
        functions: EventuallyPeriodicSeq<BaseFunction>,
        epsilon: Rv,
        s: SelectionSet,
    ) -> Result<Self> {
        if base_points.is_empty() {
            return Err(Error::Domain("at least one base point is required".into()));
        }
        let unique: BTreeSet<&String> = base_points.iter().collect();
        if unique.len() != base_points.len() {
            return Err(Error::Domain("base point labels must be unique".into()));
        }
        if !same_space(&space, epsilon.space()) {
            return Err(Error::SpaceMismatch);
        }
        for f in functions.items() {
            if f.table.len() != base_points.len() {
                return Err(Error::LengthMismatch {
                    expected: base_points.len(),
                    got: f.table.len(),
                });
            }
            if !same_space(&space, f.table[0].space()) {
                return Err(Error::SpaceMismatch);
            }
        }
        Ok(Instance {
            space,
            base_points,
            functions,
            epsilon,
            s,
        })
    }

    pub fn space(&self) -> &Arc<ProbSpace> {
        &self.space
    }

    pub fn base_points(&self) -> &[String] {
        &self.base_points
    }

    pub fn functions(&self) -> &EventuallyPeriodicSeq<BaseFunction> {
        &self.functions
    }

    pub fn epsilon(&self) -> &Rv {
        &self.epsilon
    }

    pub fn selection_set(&self) -> &SelectionSet {
        &self.s
    }

    pub fn n_atoms(&self) -> usize {
        self.space.len()
    }

    pub fn n_base(&self) -> usize {
        self.base_points.len()
    }

    pub fn with_selections(&self, s: SelectionSet) -> Instance {
        Instance { s, ..self.clone() }
    }

    pub fn with_functions(
        &self,
        functions: EventuallyPeriodicSeq<BaseFunction>,
    ) -> Result<Instance> {
        Instance::new(
            self.space.clone(),
            self.base_points.clone(),
            functions,
            self.epsilon.clone(),
            self.s.clone(),
        )
    }

    /// Multiplies every table and the radius by `c > 0`.
    pub fn scaled(&self, c: &Q) -> Result<Instance> {
        if !c.is_positive() {
            return Err(Error::Domain("scale factor must be positive".into()));
        }
        Ok(Instance {
            functions: self.functions.map(|f| f.scaled(c)),
            epsilon: self.epsilon.scale(c),
            ..self.clone()
        })
    }

    /// Number of selections in `E`, i.e. `|B|^|Ω|`, saturating.
    pub fn selection_count(&self) -> u128 {
        (self.n_base() as u128)
            .checked_pow(self.n_atoms() as u32)
            .unwrap_or(u128::MAX)
    }

    /// Per atom, the sorted base points reached by some `Z ∈ S`.
    pub fn available_points(&self) -> Vec<Vec<usize>> {
        match &self.s {
            SelectionSet::All => vec![(0..self.n_base()).collect(); self.n_atoms()],
            SelectionSet::Explicit(list) => (0..self.n_atoms())
                .map(|atom| {
                    let set: BTreeSet<usize> = list.iter().map(|z| z.at(atom)).collect();
                    set.into_iter().collect()
                })
                .collect(),
        }
    }

    /// The members of `S`, enumerating `E` when `S = ALL`.
    pub fn selections(&self, cap: u128) -> Result<Vec<Selection>> {
        match &self.s {
            SelectionSet::All => enumerate_e(self, cap),
            SelectionSet::Explicit(list) => Ok(list.clone()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagnosticKind {
    Parse,
    MissingKey,
    MalformedRational,
    ProbabilityMass,
    Structure,
    NonPositiveRadius,
    BallViolation,
    MalformedSelection,
}

/// A located, human-readable problem with an instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    pub location: String,
    pub message: String,
}

impl Diagnostic {
    pub fn new(
        kind: DiagnosticKind,
        location: impl Into<String>,
        message: impl Into<String>,
    ) -> Self {
        Diagnostic {
            kind,
            location: location.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.location.is_empty() {
            write!(f, "{}", self.message)
        } else {
            write!(f, "{}: {}", self.location, self.message)
        }
    }
}

/// Position of a stored item: `preamble[i]` or `cycle[i]`.
pub fn function_label(seq_preamble_len: usize, position: usize) -> String {
    if position < seq_preamble_len {
        format!("preamble[{position}]")
    } else {
        format!("cycle[{}]", position - seq_preamble_len)
    }
}

/// Reports mass, radius, ball and selection problems; empty when valid.
pub fn validate(instance: &Instance) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let space = &instance.space;
    let labels = space.labels();

    let total: Q = space.masses().iter().sum();
    if !total.is_one() {
        out.push(Diagnostic::new(
            DiagnosticKind::ProbabilityMass,
            "atoms",
            format!("masses sum to {} ≠ 1", fmt_q(&total)),
        ));
    }
    for (label, mass) in labels.iter().zip(space.masses()) {
        if !mass.is_positive() {
            out.push(Diagnostic::new(
                DiagnosticKind::ProbabilityMass,
                format!("atoms.{label}"),
                format!("mass {} is not strictly positive", fmt_q(mass)),
            ));
        }
    }

    let eps = &instance.epsilon;
    let radius_ok = eps.is_strictly_positive();
    for (atom, e) in eps.values().iter().enumerate() {
        if !e.is_positive() {
            out.push(Diagnostic::new(
                DiagnosticKind::NonPositiveRadius,
                format!("epsilon[{atom}]"),
                format!(
                    "radius {} at atom {} is not strictly positive",
                    fmt_q(e),
                    labels[atom]
                ),
            ));
        }
    }

    if radius_ok {
        let pre = instance.functions.preamble().len();
        for (pos, f) in instance.functions.items().enumerate() {
            let name = function_label(pre, pos);
            for (b, profile) in f.table.iter().enumerate() {
                for (atom, v) in profile.values().iter().enumerate() {
                    if v.abs() > *eps.at(atom) {
                        out.push(Diagnostic::new(
                            DiagnosticKind::BallViolation,
                            format!("functions.{name}.{}[{atom}]", instance.base_points[b]),
                            format!(
                                "function {name} at base point {} and atom {} has value {} outside the ball of radius {}",
                                instance.base_points[b],
                                labels[atom],
                                fmt_q(v),
                                fmt_q(eps.at(atom))
                            ),
                        ));
                    }
                }
            }
        }
    }

    if let SelectionSet::Explicit(list) = &instance.s {
        if list.is_empty() {
            out.push(Diagnostic::new(
                DiagnosticKind::MalformedSelection,
                "S",
                "explicit S must be nonempty",
            ));
        }
        for (i, z) in list.iter().enumerate() {
            if z.assignment.len() != instance.n_atoms() {
                out.push(Diagnostic::new(
                    DiagnosticKind::MalformedSelection,
                    format!("S[{i}]"),
                    format!(
                        "selection assigns {} atoms, the space has {}",
                        z.assignment.len(),
                        instance.n_atoms()
                    ),
                ));
            } else if let Some(atom) = z.assignment.iter().position(|&b| b >= instance.n_base()) {
                out.push(Diagnostic::new(
                    DiagnosticKind::MalformedSelection,
                    format!("S[{i}]"),
                    format!("atom {} is mapped to an unknown base point", labels[atom]),
                ));
            }
        }
    }
    out
}

/// All selections `Ω → B` in lexicographic order (first atom most
/// significant). Fails when `|B|^|Ω|` exceeds `cap`.
pub fn enumerate_e(instance: &Instance, cap: u128) -> Result<Vec<Selection>> {
    let count = instance.selection_count();
    if count > cap {
        return Err(Error::CapExceeded { count, cap });
    }
    let (atoms, base) = (instance.n_atoms(), instance.n_base());
    let mut out = Vec::with_capacity(count as usize);
    let mut current = vec![0usize; atoms];
    loop {
        out.push(Selection::new(current.clone()));
        // odometer, last atom fastest
        let mut pos = atoms;
        loop {
            if pos == 0 {
                return Ok(out);
            }
            pos -= 1;
            current[pos] += 1;
            if current[pos] < base {
                break;
            }
            current[pos] = 0;
        }
    }
}

/// `f(X)(ω) = f̂(X(ω))(ω)`.
pub fn evaluate(f: &BaseFunction, x: &Selection) -> Result<Rv> {
    let space = f.table[0].space();
    if x.assignment.len() != space.len() {
        return Err(Error::LengthMismatch {
            expected: space.len(),
            got: x.assignment.len(),
        });
    }
    if let Some(&b) = x.assignment.iter().find(|&&b| b >= f.table.len()) {
        return Err(Error::UnknownBasePoint(b));
    }
    Ok(Rv::from_fn(space, |atom| f.at(x.at(atom), atom).clone()))
}

/// The finite range of the function sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistinctFunctions {
    /// Distinct tables, indexed by id.
    pub functions: Vec<BaseFunction>,
    /// `n ↦ id` in the same preamble/cycle shape as the source sequence.
    pub index: EventuallyPeriodicSeq<usize>,
    /// `tail[id]` iff `id` occurs in the cycle.
    pub tail: Vec<bool>,
}

impl DistinctFunctions {
    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    pub fn all_ids(&self) -> Vec<usize> {
        (0..self.functions.len()).collect()
    }

    pub fn tail_ids(&self) -> Vec<usize> {
        (0..self.functions.len())
            .filter(|&i| self.tail[i])
            .collect()
    }

    /// Sorted ids of `{f_p : p ≥ n}` (1-based `n`).
    pub fn ids_from(&self, n: usize) -> Vec<usize> {
        let pre = self.index.preamble();
        let mut set: BTreeSet<usize> = self.index.cycle().iter().copied().collect();
        if n >= 1 && n <= pre.len() {
            set.extend(&pre[n - 1..]);
        }
        set.into_iter().collect()
    }

    pub fn value(&self, id: usize, base: usize, atom: usize) -> &Q {
        self.functions[id].at(base, atom)
    }

    /// Rebuilds the original sequence from the index map.
    pub fn expand(&self) -> EventuallyPeriodicSeq<BaseFunction> {
        self.index.map(|&id| self.functions[id].clone())
    }

    /// `Σ_j w_j(ω) f̂_j(b)(ω)`.
    pub fn mixture_at(&self, w: &MixtureWeights, base: usize, atom: usize) -> Q {
        w.ids()
            .iter()
            .zip(w.at(atom))
            .map(|(&id, c)| c * self.value(id, base, atom))
            .sum()
    }

    /// The mixture `Σ_j w_j f_j` evaluated at a selection.
    pub fn eval_mixture(&self, w: &MixtureWeights, x: &Selection) -> Rv {
        Rv::from_fn(w.space(), |atom| self.mixture_at(w, x.at(atom), atom))
    }

    /// One payoff matrix per atom: rows `ids`, columns `columns[atom]`.
    pub fn payoff_matrices(
        &self,
        ids: &[usize],
        columns: &[Vec<usize>],
    ) -> Result<Vec<PayoffMatrix>> {
        columns
            .iter()
            .enumerate()
            .map(|(atom, cols)| {
                let entries = ids
                    .iter()
                    .map(|&id| {
                        cols.iter()
                            .map(|&b| self.value(id, b, atom).clone())
                            .collect()
                    })
                    .collect();
                PayoffMatrix::new(ids.to_vec(), cols.clone(), entries)
            })
            .collect()
    }
}

/// Deduplicates the sequence by exact table equality, assigning ids in order
/// of first occurrence (preamble first).
pub fn distinct_functions(seq: &EventuallyPeriodicSeq<BaseFunction>) -> DistinctFunctions {
    let mut functions: Vec<BaseFunction> = Vec::new();
    let mut id_of = |f: &BaseFunction| match functions.iter().position(|g| g == f) {
        Some(i) => i,
        None => {
            functions.push(f.clone());
            functions.len() - 1
        }
    };
    let preamble: Vec<usize> = seq.preamble().iter().map(&mut id_of).collect();
    let cycle: Vec<usize> = seq.cycle().iter().map(&mut id_of).collect();
    let mut tail = vec![false; functions.len()];
    for &id in &cycle {
        tail[id] = true;
    }
    let index =
        EventuallyPeriodicSeq::new(preamble, cycle).expect("cycle of a valid sequence is nonempty");
    DistinctFunctions {
        functions,
        index,
        tail,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HypothesisMode {
    /// Only meaningful for `S = ALL`, where the check is exact.
    ExactForAll,
    Sampled {
        samples: usize,
        seed: u64,
    },
}

impl Default for HypothesisMode {
    fn default() -> Self {
        HypothesisMode::Sampled {
            samples: 64,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Hypothesis {
    Holds {
        reason: String,
    },
    HoldsOnSamples {
        samples: usize,
        seed: u64,
    },
    /// A strictly positive mixture whose supremum over `E` no single `Z ∈ S`
    /// attains at every atom.
    Fails {
        witness: MixtureWeights,
        sup: Rv,
    },
}

impl Hypothesis {
    pub fn is_fails(&self) -> bool {
        matches!(self, Hypothesis::Fails { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            Hypothesis::Holds { .. } => "HOLDS",
            Hypothesis::HoldsOnSamples { .. } => "HOLDS-ON-SAMPLES",
            Hypothesis::Fails { .. } => "FAILS",
        }
    }
}

/// `esssup_{X∈E}` of a mixture: the per-atom maximum over all base points.
pub fn sup_over_e(instance: &Instance, df: &DistinctFunctions, w: &MixtureWeights) -> Rv {
    Rv::from_fn(&instance.space, |atom| {
        (0..instance.n_base())
            .map(|b| df.mixture_at(w, b, atom))
            .max()
            .expect("nonempty base set")
    })
}

/// The first `Z ∈ S` (in listed order) attaining the supremum over `E` of the
/// mixture at every atom, if any.
pub fn attaining_selection(
    instance: &Instance,
    df: &DistinctFunctions,
    w: &MixtureWeights,
) -> Option<Selection> {
    let sup = sup_over_e(instance, df, w);
    let attains = |z: &Selection| {
        (0..instance.n_atoms()).all(|atom| df.mixture_at(w, z.at(atom), atom) == *sup.at(atom))
    };
    match &instance.s {
        SelectionSet::All => {
            let assignment = (0..instance.n_atoms())
                .map(|atom| {
                    (0..instance.n_base())
                        .find(|&b| df.mixture_at(w, b, atom) == *sup.at(atom))
                        .expect("maximum is attained")
                })
                .collect();
            Some(Selection::new(assignment))
        }
        SelectionSet::Explicit(list) => list.iter().find(|z| attains(z)).cloned(),
    }
}

/// Checks the attainment hypothesis. For `S = ALL` the per-atom argmax is a
/// selection, so it always holds. For an explicit `S` strictly positive
/// per-atom weights are sampled and each sample is verified exactly.
pub fn check_hypothesis(instance: &Instance, mode: HypothesisMode) -> Result<Hypothesis> {
    if instance.s == SelectionSet::All {
        return Ok(Hypothesis::Holds {
            reason: "per-atom argmax selection lies in S".into(),
        });
    }
    let HypothesisMode::Sampled { samples, seed } = mode else {
        return Err(Error::Domain(
            "exact hypothesis check is only available for S = ALL".into(),
        ));
    };
    let df = distinct_functions(&instance.functions);
    let ids = df.all_ids();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let weights = (0..instance.n_atoms())
            .map(|_| {
                let raw: Vec<u32> = ids.iter().map(|_| rng.gen_range(1..=20)).collect();
                let total: u32 = raw.iter().sum();
                raw.iter()
                    .map(|&r| Q::new(r.into(), total.into()))
                    .collect()
            })
            .collect();
        let w = MixtureWeights::new(&instance.space, ids.clone(), weights)?;
        if attaining_selection(instance, &df, &w).is_none() {
            let sup = sup_over_e(instance, &df, &w);
            return Ok(Hypothesis::Fails { witness: w, sup });
        }
    }
    Ok(Hypothesis::HoldsOnSamples { samples, seed })
}
