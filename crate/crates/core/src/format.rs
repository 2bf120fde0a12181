//! JSON instance files.
//!
//! ```json
//! {
//!   "atoms": [["w1", "1/2"], ["w2", "1/2"]],
//!   "base_points": ["a", "b"],
//!   "epsilon": ["1/1", "2/1"],
//!   "functions": {
//!     "preamble": [],
//!     "cycle": [{"a": ["1/1", "0/1"], "b": ["0/1", "1/1"]}]
//!   },
//!   "S": "ALL"
//! }
//! ```
//!
//! Every rational is an exact `"p/q"` string (a bare integer is accepted on
//! input); decimals are rejected. `S` is `"ALL"` or a list of maps from atom
//! label to base-point label.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::instance::{
    validate, BaseFunction, Diagnostic, DiagnosticKind, Instance, Selection, SelectionSet,
};
use crate::l0::{EventuallyPeriodicSeq, ProbSpace, Rv};
use crate::rational::{fmt_q, parse_q, Q};

pub type TableFile = BTreeMap<String, Vec<String>>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionsFile {
    #[serde(default)]
    pub preamble: Vec<TableFile>,
    pub cycle: Vec<TableFile>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SelectionsFile {
    Keyword(String),
    Explicit(Vec<BTreeMap<String, String>>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub atoms: Vec<(String, String)>,
    pub base_points: Vec<String>,
    pub epsilon: Vec<String>,
    pub functions: FunctionsFile,
    #[serde(rename = "S")]
    pub s: SelectionsFile,
}

fn rationals(items: &[String], location: &str, out: &mut Vec<Diagnostic>) -> Vec<Q> {
    items
        .iter()
        .enumerate()
        .filter_map(|(i, text)| match parse_q(text) {
            Ok(v) => Some(v),
            Err(e) => {
                out.push(Diagnostic::new(
                    DiagnosticKind::MalformedRational,
                    format!("{location}[{i}]"),
                    e.to_string(),
                ));
                None
            }
        })
        .collect()
}

impl InstanceFile {
    /// Converts to an [`Instance`], collecting every problem found.
    pub fn to_instance(&self) -> Result<Instance, Vec<Diagnostic>> {
        let mut diags = Vec::new();

        let mut labels = BTreeSet::new();
        let mut atoms = Vec::new();
        for (i, (label, mass)) in self.atoms.iter().enumerate() {
            if !labels.insert(label.clone()) {
                diags.push(Diagnostic::new(
                    DiagnosticKind::Structure,
                    format!("atoms[{i}]"),
                    format!("duplicate atom label {label:?}"),
                ));
            }
            match parse_q(mass) {
                Ok(m) if m > Q::from_integer(0.into()) => atoms.push((label.clone(), m)),
                Ok(m) => diags.push(Diagnostic::new(
                    DiagnosticKind::ProbabilityMass,
                    format!("atoms[{i}]"),
                    format!(
                        "mass {} of atom {label:?} is not strictly positive",
                        fmt_q(&m)
                    ),
                )),
                Err(e) => diags.push(Diagnostic::new(
                    DiagnosticKind::MalformedRational,
                    format!("atoms[{i}]"),
                    e.to_string(),
                )),
            }
        }
        if self.atoms.is_empty() {
            diags.push(Diagnostic::new(
                DiagnosticKind::Structure,
                "atoms",
                "at least one atom is required",
            ));
        }
        if diags.is_empty() {
            let total: Q = atoms.iter().map(|(_, m)| m.clone()).sum();
            if total != Q::from_integer(1.into()) {
                diags.push(Diagnostic::new(
                    DiagnosticKind::ProbabilityMass,
                    "atoms",
                    format!("masses sum to {} ≠ 1", fmt_q(&total)),
                ));
            }
        }
        let n_atoms = self.atoms.len();

        let base_set: BTreeSet<&String> = self.base_points.iter().collect();
        if self.base_points.is_empty() {
            diags.push(Diagnostic::new(
                DiagnosticKind::Structure,
                "base_points",
                "at least one base point is required",
            ));
        }
        if base_set.len() != self.base_points.len() {
            diags.push(Diagnostic::new(
                DiagnosticKind::Structure,
                "base_points",
                "base point labels must be unique",
            ));
        }

        if self.epsilon.len() != n_atoms {
            diags.push(Diagnostic::new(
                DiagnosticKind::Structure,
                "epsilon",
                format!("expected {n_atoms} values, got {}", self.epsilon.len()),
            ));
        }
        let epsilon = rationals(&self.epsilon, "epsilon", &mut diags);

        let parse_tables = |tables: &[TableFile],
                            segment: &str,
                            diags: &mut Vec<Diagnostic>|
         -> Vec<Vec<Vec<Q>>> {
            let mut out = Vec::new();
            for (i, table) in tables.iter().enumerate() {
                let here = format!("functions.{segment}[{i}]");
                for key in table.keys() {
                    if !base_set.contains(key) {
                        diags.push(Diagnostic::new(
                            DiagnosticKind::Structure,
                            format!("{here}.{key}"),
                            "unknown base point",
                        ));
                    }
                }
                let mut rows = Vec::new();
                for b in &self.base_points {
                    match table.get(b) {
                        None => diags.push(Diagnostic::new(
                            DiagnosticKind::MissingKey,
                            format!("{here}.{b}"),
                            format!("missing values for base point {b:?}"),
                        )),
                        Some(values) => {
                            if values.len() != n_atoms {
                                diags.push(Diagnostic::new(
                                    DiagnosticKind::Structure,
                                    format!("{here}.{b}"),
                                    format!("expected {n_atoms} values, got {}", values.len()),
                                ));
                            }
                            rows.push(rationals(values, &format!("{here}.{b}"), diags));
                        }
                    }
                }
                out.push(rows);
            }
            out
        };
        let preamble = parse_tables(&self.functions.preamble, "preamble", &mut diags);
        let cycle = parse_tables(&self.functions.cycle, "cycle", &mut diags);
        if self.functions.cycle.is_empty() {
            diags.push(Diagnostic::new(
                DiagnosticKind::Structure,
                "functions.cycle",
                "cycle must contain at least one function",
            ));
        }

        let s = match &self.s {
            SelectionsFile::Keyword(k) if k == "ALL" => Some(SelectionSet::All),
            SelectionsFile::Keyword(k) => {
                diags.push(Diagnostic::new(
                    DiagnosticKind::Structure,
                    "S",
                    format!("expected \"ALL\" or a list of selections, got {k:?}"),
                ));
                None
            }
            SelectionsFile::Explicit(list) => {
                let mut selections = Vec::new();
                for (i, map) in list.iter().enumerate() {
                    let mut assignment = Vec::new();
                    for (label, _) in &self.atoms {
                        match map
                            .get(label)
                            .map(|b| self.base_points.iter().position(|p| p == b))
                        {
                            Some(Some(idx)) => assignment.push(idx),
                            Some(None) => diags.push(Diagnostic::new(
                                DiagnosticKind::MalformedSelection,
                                format!("S[{i}].{label}"),
                                format!("unknown base point {:?}", map[label]),
                            )),
                            None => diags.push(Diagnostic::new(
                                DiagnosticKind::MalformedSelection,
                                format!("S[{i}].{label}"),
                                "selection does not assign this atom",
                            )),
                        }
                    }
                    for key in map.keys() {
                        if !labels.contains(key) {
                            diags.push(Diagnostic::new(
                                DiagnosticKind::MalformedSelection,
                                format!("S[{i}].{key}"),
                                "unknown atom",
                            ));
                        }
                    }
                    selections.push(Selection::new(assignment));
                }
                if list.is_empty() {
                    diags.push(Diagnostic::new(
                        DiagnosticKind::MalformedSelection,
                        "S",
                        "explicit S must be nonempty",
                    ));
                }
                Some(SelectionSet::Explicit(selections))
            }
        };

        if !diags.is_empty() {
            return Err(diags);
        }
        let structural = |e: crate::Error| {
            vec![Diagnostic::new(
                DiagnosticKind::Structure,
                "",
                e.to_string(),
            )]
        };
        let space = ProbSpace::new(atoms).map_err(structural)?;
        let epsilon = Rv::new(&space, epsilon).map_err(structural)?;
        let to_fn = |rows: Vec<Vec<Q>>| -> Result<BaseFunction, Vec<Diagnostic>> {
            let table = rows
                .into_iter()
                .map(|r| Rv::new(&space, r))
                .collect::<crate::Result<Vec<_>>>()
                .map_err(structural)?;
            BaseFunction::new(table).map_err(structural)
        };
        let preamble = preamble
            .into_iter()
            .map(to_fn)
            .collect::<Result<Vec<_>, _>>()?;
        let cycle = cycle
            .into_iter()
            .map(to_fn)
            .collect::<Result<Vec<_>, _>>()?;
        let functions = EventuallyPeriodicSeq::new(preamble, cycle).map_err(structural)?;
        let instance = Instance::new(
            space,
            self.base_points.clone(),
            functions,
            epsilon,
            s.expect("checked above"),
        )
        .map_err(structural)?;
        let diags = validate(&instance);
        if diags.is_empty() {
            Ok(instance)
        } else {
            Err(diags)
        }
    }

    pub fn from_instance(instance: &Instance) -> Self {
        let labels = instance.space().labels();
        let table = |f: &BaseFunction| -> TableFile {
            instance
                .base_points()
                .iter()
                .zip(f.table())
                .map(|(b, rv)| (b.clone(), rv.values().iter().map(fmt_q).collect()))
                .collect()
        };
        InstanceFile {
            atoms: labels
                .iter()
                .cloned()
                .zip(instance.space().masses().iter().map(fmt_q))
                .collect(),
            base_points: instance.base_points().to_vec(),
            epsilon: instance.epsilon().values().iter().map(fmt_q).collect(),
            functions: FunctionsFile {
                preamble: instance.functions().preamble().iter().map(table).collect(),
                cycle: instance.functions().cycle().iter().map(table).collect(),
            },
            s: match instance.selection_set() {
                SelectionSet::All => SelectionsFile::Keyword("ALL".into()),
                SelectionSet::Explicit(list) => SelectionsFile::Explicit(
                    list.iter()
                        .map(|z| {
                            labels
                                .iter()
                                .zip(z.assignment())
                                .map(|(a, &b)| (a.clone(), instance.base_points()[b].clone()))
                                .collect()
                        })
                        .collect(),
                ),
            },
        }
    }
}

/// Parses and validates instance text.
pub fn parse_instance_str(text: &str) -> Result<Instance, Vec<Diagnostic>> {
    let file: InstanceFile = serde_json::from_str(text).map_err(|e| {
        let kind = if e.to_string().starts_with("missing field") {
            DiagnosticKind::MissingKey
        } else {
            DiagnosticKind::Parse
        };
        let msg = e.to_string();
        let msg = msg.split(" at line ").next().unwrap_or(&msg).to_string();
        vec![Diagnostic::new(
            kind,
            format!("line {} column {}", e.line(), e.column()),
            msg,
        )]
    })?;
    file.to_instance()
}

pub fn parse_instance(path: &Path) -> Result<Instance, Vec<Diagnostic>> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        vec![Diagnostic::new(
            DiagnosticKind::Parse,
            path.display().to_string(),
            e.to_string(),
        )]
    })?;
    parse_instance_str(&text)
}

/// Pretty JSON with a trailing newline; deterministic for equal instances.
pub fn serialize_instance(instance: &Instance) -> String {
    let mut s = serde_json::to_string_pretty(&InstanceFile::from_instance(instance))
        .expect("instance files serialize");
    s.push('\n');
    s
}

/// SHA-256 of the canonical serialization, hex encoded.
pub fn instance_digest(instance: &Instance) -> String {
    hex::encode(Sha256::digest(serialize_instance(instance).as_bytes()))
}
