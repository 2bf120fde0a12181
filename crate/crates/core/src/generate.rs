//! Seeded instance generation.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::instance::{BaseFunction, Instance, SelectionSet};
use crate::l0::{EventuallyPeriodicSeq, ProbSpace, Rv};
use crate::rational::Q;

pub const MAX_ATOMS: usize = 8;
pub const MAX_BASE_POINTS: usize = 8;
pub const MAX_FUNCTIONS: usize = 16;

/// Table values are `ε·i/TABLE_STEPS` for integer `|i| ≤ TABLE_STEPS`.
const TABLE_STEPS: i64 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Shape {
    pub atoms: usize,
    pub base_points: usize,
    pub n_preamble: usize,
    pub n_cycle: usize,
}

impl Shape {
    pub fn new(atoms: usize, base_points: usize, n_preamble: usize, n_cycle: usize) -> Self {
        Shape {
            atoms,
            base_points,
            n_preamble,
            n_cycle,
        }
    }

    pub fn check(&self) -> Result<()> {
        if self.atoms == 0 || self.base_points == 0 || self.n_cycle == 0 {
            return Err(Error::Domain(
                "atoms, base points and cycle length must be positive".into(),
            ));
        }
        if self.atoms > MAX_ATOMS {
            return Err(Error::SizeCap {
                what: "atoms",
                size: self.atoms,
                cap: MAX_ATOMS,
            });
        }
        if self.base_points > MAX_BASE_POINTS {
            return Err(Error::SizeCap {
                what: "base points",
                size: self.base_points,
                cap: MAX_BASE_POINTS,
            });
        }
        let total = self.n_preamble + self.n_cycle;
        if total > MAX_FUNCTIONS {
            return Err(Error::SizeCap {
                what: "functions",
                size: total,
                cap: MAX_FUNCTIONS,
            });
        }
        Ok(())
    }

    /// A shape drawn from `seed` with `1..=max_atoms` atoms, `1..=max_base`
    /// base points and at most `max_functions` stored items.
    pub fn random(seed: u64, max_atoms: usize, max_base: usize, max_functions: usize) -> Shape {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5348_4150_455f_5345);
        let atoms = rng.gen_range(1..=max_atoms);
        let base_points = rng.gen_range(1..=max_base);
        let n_cycle = rng.gen_range(1..=max_functions);
        let n_preamble = rng.gen_range(0..=max_functions - n_cycle);
        Shape {
            atoms,
            base_points,
            n_preamble,
            n_cycle,
        }
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{},{},{},{}",
            self.atoms, self.base_points, self.n_preamble, self.n_cycle
        )
    }
}

impl FromStr for Shape {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let parts: Vec<usize> = s
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<usize>()
                    .map_err(|e| format!("invalid shape component {p:?}: {e}"))
            })
            .collect::<std::result::Result<_, _>>()?;
        match parts[..] {
            [atoms, base_points, n_preamble, n_cycle] => Ok(Shape {
                atoms,
                base_points,
                n_preamble,
                n_cycle,
            }),
            _ => Err(format!(
                "shape must be atoms,base_points,preamble,cycle; got {s:?}"
            )),
        }
    }
}

/// Deterministic instance from `seed`: positive normalized masses, `ε` per
/// atom in `[1, 3]` on a quarter grid, table values uniform on a lattice in
/// `[−ε, ε]`, and `S = ALL`.
pub fn generate(seed: u64, shape: Shape) -> Result<Instance> {
    shape.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw: Vec<u32> = (0..shape.atoms).map(|_| rng.gen_range(1..=9)).collect();
    let total: u32 = raw.iter().sum();
    let space = ProbSpace::new(
        raw.iter()
            .enumerate()
            .map(|(i, &r)| (format!("w{}", i + 1), Q::new(r.into(), total.into())))
            .collect(),
    )?;
    let epsilon = Rv::from_fn(&space, |_| Q::new(rng.gen_range(4..=12).into(), 4.into()));
    let function = |rng: &mut ChaCha8Rng| -> Result<BaseFunction> {
        let table = (0..shape.base_points)
            .map(|_| {
                Rv::from_fn(&space, |atom| {
                    let i: i64 = rng.gen_range(-TABLE_STEPS..=TABLE_STEPS);
                    epsilon.at(atom) * Q::new(i.into(), TABLE_STEPS.into())
                })
            })
            .collect();
        BaseFunction::new(table)
    };
    let preamble = (0..shape.n_preamble)
        .map(|_| function(&mut rng))
        .collect::<Result<Vec<_>>>()?;
    let cycle = (0..shape.n_cycle)
        .map(|_| function(&mut rng))
        .collect::<Result<Vec<_>>>()?;
    let base_points = (1..=shape.base_points).map(|i| format!("b{i}")).collect();
    Instance::new(
        space,
        base_points,
        EventuallyPeriodicSeq::new(preamble, cycle)?,
        epsilon,
        SelectionSet::All,
    )
}
