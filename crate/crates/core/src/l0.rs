//! Lattice algebra of L⁰ over a finite atomic probability space.
//!
//! Every atom carries strictly positive mass, so almost-sure statements are
//! pointwise statements and each equivalence class of random variables has a
//! single representative: one exact rational per atom. Essential suprema and
//! infima of finite families are per-atom maxima and minima.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{fmt_q, Q};

/// A finite probability space with labelled atoms of positive mass.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProbSpace {
    labels: Vec<String>,
    masses: Vec<Q>,
}

impl ProbSpace {
    pub fn new(atoms: Vec<(String, Q)>) -> Result<Arc<Self>> {
        if atoms.is_empty() {
            return Err(Error::InvalidSpace("at least one atom is required".into()));
        }
        let mut seen = HashSet::new();
        for (label, mass) in &atoms {
            if !seen.insert(label.as_str()) {
                return Err(Error::InvalidSpace(format!(
                    "duplicate atom label {label:?}"
                )));
            }
            if !mass.is_positive() {
                return Err(Error::InvalidSpace(format!(
                    "atom {label:?} has mass {}; null atoms are not allowed",
                    fmt_q(mass)
                )));
            }
        }
        let total: Q = atoms.iter().map(|(_, m)| m.clone()).sum();
        if !total.is_one() {
            return Err(Error::InvalidSpace(format!(
                "masses sum to {} ≠ 1",
                fmt_q(&total)
            )));
        }
        let (labels, masses) = atoms.into_iter().unzip();
        Ok(Arc::new(ProbSpace { labels, masses }))
    }

    /// `n` atoms of equal mass labelled `w1..wn`.
    pub fn uniform(n: usize) -> Result<Arc<Self>> {
        let mass = Q::new(1.into(), n.max(1).into());
        Self::new((1..=n).map(|i| (format!("w{i}"), mass.clone())).collect())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn masses(&self) -> &[Q] {
        &self.masses
    }

    pub fn atom_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

pub(crate) fn same_space(a: &Arc<ProbSpace>, b: &Arc<ProbSpace>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// An element of L⁰: one exact rational value per atom.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Rv {
    space: Arc<ProbSpace>,
    values: Vec<Q>,
}

impl fmt::Debug for Rv {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vals: Vec<String> = self.values.iter().map(fmt_q).collect();
        write!(f, "Rv({})", vals.join(", "))
    }
}

impl Rv {
    pub fn new(space: &Arc<ProbSpace>, values: Vec<Q>) -> Result<Self> {
        if values.len() != space.len() {
            return Err(Error::LengthMismatch {
                expected: space.len(),
                got: values.len(),
            });
        }
        Ok(Rv {
            space: Arc::clone(space),
            values,
        })
    }

    pub fn constant(space: &Arc<ProbSpace>, value: Q) -> Self {
        Rv {
            space: Arc::clone(space),
            values: vec![value; space.len()],
        }
    }

    pub fn zero(space: &Arc<ProbSpace>) -> Self {
        Self::constant(space, Q::zero())
    }

    pub fn from_fn(space: &Arc<ProbSpace>, f: impl FnMut(usize) -> Q) -> Self {
        Rv {
            space: Arc::clone(space),
            values: (0..space.len()).map(f).collect(),
        }
    }

    pub fn space(&self) -> &Arc<ProbSpace> {
        &self.space
    }

    pub fn values(&self) -> &[Q] {
        &self.values
    }

    pub fn at(&self, atom: usize) -> &Q {
        &self.values[atom]
    }

    /// Membership in L⁰₊₊.
    pub fn is_strictly_positive(&self) -> bool {
        self.values.iter().all(Signed::is_positive)
    }

    /// Membership in L⁰₊.
    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|v| !v.is_negative())
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Zero::is_zero)
    }

    pub fn abs(&self) -> Rv {
        self.map(|v| v.abs())
    }

    pub fn map(&self, f: impl Fn(&Q) -> Q) -> Rv {
        Rv {
            space: Arc::clone(&self.space),
            values: self.values.iter().map(f).collect(),
        }
    }

    /// Pointwise combination. Panics when the spaces differ, like the
    /// arithmetic operators.
    pub fn zip_with(&self, other: &Rv, f: impl Fn(&Q, &Q) -> Q) -> Rv {
        assert!(
            same_space(&self.space, &other.space),
            "random variables on different spaces"
        );
        Rv {
            space: Arc::clone(&self.space),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| f(a, b))
                .collect(),
        }
    }

    pub fn scale(&self, c: &Q) -> Rv {
        self.map(|v| v * c)
    }

    pub fn recip(&self) -> Rv {
        self.map(|v| v.recip())
    }

    pub fn pow(&self, exp: i64) -> Rv {
        self.map(|v| crate::rational::powi(v, exp))
    }

    /// Expectation under the space's masses.
    pub fn expectation(&self) -> Q {
        self.values
            .iter()
            .zip(self.space.masses())
            .map(|(v, m)| v * m)
            .sum()
    }

    fn check_space(&self, other: &Rv) -> Result<()> {
        if same_space(&self.space, &other.space) {
            Ok(())
        } else {
            Err(Error::SpaceMismatch)
        }
    }
}

macro_rules! rv_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait<&Rv> for &Rv {
            type Output = Rv;
            fn $method(self, rhs: &Rv) -> Rv {
                self.zip_with(rhs, |a, b| a $op b)
            }
        }
        impl $trait<Rv> for Rv {
            type Output = Rv;
            fn $method(self, rhs: Rv) -> Rv {
                (&self).$method(&rhs)
            }
        }
    };
}

rv_binop!(Add, add, +);
rv_binop!(Sub, sub, -);
rv_binop!(Mul, mul, *);

impl Neg for &Rv {
    type Output = Rv;
    fn neg(self) -> Rv {
        self.map(|v| -v)
    }
}

impl Neg for Rv {
    type Output = Rv;
    fn neg(self) -> Rv {
        -&self
    }
}

/// An element of F: a set of atoms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Event {
    space: Arc<ProbSpace>,
    members: BTreeSet<usize>,
}

impl Event {
    pub fn from_labels<S: AsRef<str>>(space: &Arc<ProbSpace>, labels: &[S]) -> Result<Self> {
        let members = labels
            .iter()
            .map(|l| {
                space
                    .atom_index(l.as_ref())
                    .ok_or_else(|| Error::InvalidEvent(format!("unknown atom {:?}", l.as_ref())))
            })
            .collect::<Result<_>>()?;
        Ok(Event {
            space: Arc::clone(space),
            members,
        })
    }

    pub fn from_indices(
        space: &Arc<ProbSpace>,
        indices: impl IntoIterator<Item = usize>,
    ) -> Result<Self> {
        let members: BTreeSet<usize> = indices.into_iter().collect();
        if let Some(&bad) = members.iter().find(|&&i| i >= space.len()) {
            return Err(Error::InvalidEvent(format!(
                "atom index {bad} out of range"
            )));
        }
        Ok(Event {
            space: Arc::clone(space),
            members,
        })
    }

    pub fn full(space: &Arc<ProbSpace>) -> Self {
        Event {
            space: Arc::clone(space),
            members: (0..space.len()).collect(),
        }
    }

    /// `{ω : pred(ω)}`.
    pub fn where_(space: &Arc<ProbSpace>, pred: impl Fn(usize) -> bool) -> Self {
        Event {
            space: Arc::clone(space),
            members: (0..space.len()).filter(|&i| pred(i)).collect(),
        }
    }

    pub fn complement(&self) -> Event {
        Event::where_(&self.space, |i| !self.members.contains(&i))
    }

    pub fn minus(&self, other: &Event) -> Event {
        Event {
            space: Arc::clone(&self.space),
            members: self.members.difference(&other.members).copied().collect(),
        }
    }

    pub fn union(&self, other: &Event) -> Event {
        Event {
            space: Arc::clone(&self.space),
            members: self.members.union(&other.members).copied().collect(),
        }
    }

    pub fn contains(&self, atom: usize) -> bool {
        self.members.contains(&atom)
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().copied()
    }

    pub fn probability(&self) -> Q {
        self.members
            .iter()
            .map(|&i| self.space.masses()[i].clone())
            .sum()
    }

    pub fn space(&self) -> &Arc<ProbSpace> {
        &self.space
    }
}

/// Finite encoding of an infinite sequence: the preamble is read once, then
/// the cycle repeats forever.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventuallyPeriodicSeq<T> {
    preamble: Vec<T>,
    cycle: Vec<T>,
}

impl<T> EventuallyPeriodicSeq<T> {
    pub fn new(preamble: Vec<T>, cycle: Vec<T>) -> Result<Self> {
        if cycle.is_empty() {
            return Err(Error::InvalidSequence(
                "cycle must contain at least one item".into(),
            ));
        }
        Ok(EventuallyPeriodicSeq { preamble, cycle })
    }

    pub fn constant(item: T) -> Self {
        EventuallyPeriodicSeq {
            preamble: Vec::new(),
            cycle: vec![item],
        }
    }

    pub fn preamble(&self) -> &[T] {
        &self.preamble
    }

    pub fn cycle(&self) -> &[T] {
        &self.cycle
    }

    /// The `n`-th term, 1-based.
    pub fn get(&self, n: usize) -> &T {
        assert!(n >= 1, "sequences are indexed from 1");
        let i = n - 1;
        if i < self.preamble.len() {
            &self.preamble[i]
        } else {
            &self.cycle[(i - self.preamble.len()) % self.cycle.len()]
        }
    }

    /// Every stored item, preamble first.
    pub fn items(&self) -> impl Iterator<Item = &T> {
        self.preamble.iter().chain(&self.cycle)
    }

    pub fn map<U>(&self, mut f: impl FnMut(&T) -> U) -> EventuallyPeriodicSeq<U> {
        EventuallyPeriodicSeq {
            preamble: self.preamble.iter().map(&mut f).collect(),
            cycle: self.cycle.iter().map(&mut f).collect(),
        }
    }

    pub fn try_map<U, E>(
        &self,
        mut f: impl FnMut(&T) -> Result<U, E>,
    ) -> Result<EventuallyPeriodicSeq<U>, E> {
        Ok(EventuallyPeriodicSeq {
            preamble: self.preamble.iter().map(&mut f).collect::<Result<_, E>>()?,
            cycle: self.cycle.iter().map(&mut f).collect::<Result<_, E>>()?,
        })
    }
}

/// `X ≤ Y` almost surely.
pub fn rv_leq(x: &Rv, y: &Rv) -> Result<bool> {
    x.check_space(y)?;
    Ok(x.values.iter().zip(&y.values).all(|(a, b)| a <= b))
}

/// `X < Y` almost surely (strict at every atom).
pub fn rv_lt(x: &Rv, y: &Rv) -> Result<bool> {
    x.check_space(y)?;
    Ok(x.values.iter().zip(&y.values).all(|(a, b)| a < b))
}

/// `X ≤ Y` on the nonempty event `A`.
pub fn rv_leq_on(x: &Rv, y: &Rv, on: &Event) -> Result<bool> {
    x.check_space(y)?;
    if !same_space(&x.space, &on.space) {
        return Err(Error::SpaceMismatch);
    }
    if on.is_empty() {
        return Err(Error::InvalidEvent(
            "conditioning event must be nonempty".into(),
        ));
    }
    Ok(on.members().all(|i| x.values[i] <= y.values[i]))
}

fn fold_family<'a>(
    family: impl IntoIterator<Item = &'a Rv>,
    pick: impl Fn(&Q, &Q) -> bool,
) -> Result<Rv> {
    let mut iter = family.into_iter();
    let mut acc = iter.next().ok_or(Error::EmptyFamily)?.clone();
    for rv in iter {
        acc.check_space(rv)?;
        for (a, v) in acc.values.iter_mut().zip(&rv.values) {
            if pick(v, a) {
                *a = v.clone();
            }
        }
    }
    Ok(acc)
}

/// Essential supremum of a nonempty finite family: the per-atom maximum.
pub fn ess_sup<'a>(family: impl IntoIterator<Item = &'a Rv>) -> Result<Rv> {
    fold_family(family, |v, a| v > a)
}

/// Essential infimum of a nonempty finite family: the per-atom minimum.
pub fn ess_inf<'a>(family: impl IntoIterator<Item = &'a Rv>) -> Result<Rv> {
    fold_family(family, |v, a| v < a)
}

/// `essinf_n esssup_{m≥n} Y_m`. For an eventually periodic sequence the tail
/// suprema are constant once `n` passes the preamble, so only the cycle counts.
pub fn ess_limsup(seq: &EventuallyPeriodicSeq<Rv>) -> Result<Rv> {
    ess_sup(seq.cycle())
}

/// `esssup_n essinf_{m≥n} Y_m`.
pub fn ess_liminf(seq: &EventuallyPeriodicSeq<Rv>) -> Result<Rv> {
    ess_inf(seq.cycle())
}

/// Checks that `partition` consists of pairwise disjoint events covering Ω.
/// Empty cells are allowed.
pub fn check_partition(space: &Arc<ProbSpace>, partition: &[Event]) -> Result<()> {
    let mut owner = vec![None; space.len()];
    for (k, event) in partition.iter().enumerate() {
        if !same_space(space, &event.space) {
            return Err(Error::SpaceMismatch);
        }
        for atom in event.members() {
            if let Some(prev) = owner[atom] {
                return Err(Error::InvalidPartition(format!(
                    "atom {:?} belongs to cells {prev} and {k}",
                    space.labels()[atom]
                )));
            }
            owner[atom] = Some(k);
        }
    }
    if let Some(atom) = owner.iter().position(Option::is_none) {
        return Err(Error::InvalidPartition(format!(
            "atom {:?} is not covered",
            space.labels()[atom]
        )));
    }
    Ok(())
}

/// `Σ_k 1_{A_k} X_k` for a finite partition `A_k` of Ω.
pub fn concatenate(partition: &[Event], rvs: &[Rv]) -> Result<Rv> {
    if partition.len() != rvs.len() {
        return Err(Error::LengthMismatch {
            expected: partition.len(),
            got: rvs.len(),
        });
    }
    let space = partition
        .first()
        .map(|e| Arc::clone(&e.space))
        .ok_or_else(|| Error::InvalidPartition("partition is empty".into()))?;
    check_partition(&space, partition)?;
    let mut values = vec![Q::zero(); space.len()];
    for (event, rv) in partition.iter().zip(rvs) {
        if !same_space(&space, &rv.space) {
            return Err(Error::SpaceMismatch);
        }
        for atom in event.members() {
            values[atom] = rv.values[atom].clone();
        }
    }
    Ok(Rv { space, values })
}

/// Membership of `x` in the ball `B_ε = {Y : |Y| ≤ ε}`.
pub fn in_ball(x: &Rv, epsilon: &Rv) -> Result<bool> {
    if !epsilon.is_strictly_positive() {
        return Err(Error::NotStrictlyPositive {
            what: "ball radius",
        });
    }
    rv_leq(&x.abs(), epsilon)
}

/// Projects `x` onto `B_ε` atom by atom.
pub fn clip_to_ball(x: &Rv, epsilon: &Rv) -> Result<Rv> {
    if !epsilon.is_strictly_positive() {
        return Err(Error::NotStrictlyPositive {
            what: "ball radius",
        });
    }
    x.check_space(epsilon)?;
    Ok(x.zip_with(epsilon, |v, e| v.clone().min(e.clone()).max(-e.clone())))
}
