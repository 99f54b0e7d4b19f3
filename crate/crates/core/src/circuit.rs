//! Gates, circuits, and the plain-text circuit file format.
//!
//! A circuit file starts with a `qubits <n>` header followed by one gate per
//! line. `#` begins a comment that runs to end-of-line and blank lines are
//! ignored:
//!
//! ```text
//! # Bell pair
//! qubits 2
//! H 0
//! CNOT 0 1   # control first
//! ```
//!
//! Qubit 0 is the least-significant bit of a basis-state index.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum GateKind {
    H,
    X,
    S,
    T,
    #[serde(rename = "CNOT")]
    Cnot,
    I1,
}

impl GateKind {
    pub const ALL: [GateKind; 6] = [
        GateKind::H,
        GateKind::X,
        GateKind::S,
        GateKind::T,
        GateKind::Cnot,
        GateKind::I1,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GateKind::H => "H",
            GateKind::X => "X",
            GateKind::S => "S",
            GateKind::T => "T",
            GateKind::Cnot => "CNOT",
            GateKind::I1 => "I1",
        }
    }

    pub fn from_name(name: &str) -> Option<GateKind> {
        GateKind::ALL.into_iter().find(|k| k.name() == name)
    }

    /// Number of qubits the gate acts on.
    pub fn arity(self) -> usize {
        match self {
            GateKind::Cnot => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// An elementary gate. For CNOT the control is `targets[0]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Gate {
    pub kind: GateKind,
    pub targets: Vec<usize>,
}

impl Gate {
    pub fn new(kind: GateKind, targets: Vec<usize>) -> Self {
        Gate { kind, targets }
    }

    pub fn h(q: usize) -> Self {
        Gate::new(GateKind::H, vec![q])
    }

    pub fn x(q: usize) -> Self {
        Gate::new(GateKind::X, vec![q])
    }

    pub fn s(q: usize) -> Self {
        Gate::new(GateKind::S, vec![q])
    }

    pub fn t(q: usize) -> Self {
        Gate::new(GateKind::T, vec![q])
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Gate::new(GateKind::Cnot, vec![control, target])
    }

    pub fn identity(q: usize) -> Self {
        Gate::new(GateKind::I1, vec![q])
    }

    /// Invariant violations of this gate against a register of `width` qubits.
    /// `index` is the gate's position, used only for reporting.
    pub fn violations(&self, index: usize, width: usize) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.targets.len() != self.kind.arity() {
            out.push(Violation::WrongArity {
                gate: index,
                kind: self.kind,
                expected: self.kind.arity(),
                found: self.targets.len(),
            });
        }
        for &q in &self.targets {
            if q >= width {
                out.push(Violation::IndexOutOfRange {
                    gate: index,
                    qubit: q,
                    width,
                });
            }
        }
        for (i, &q) in self.targets.iter().enumerate() {
            if self.targets[..i].contains(&q) {
                out.push(Violation::DuplicateTargets { gate: index, qubit: q });
            }
        }
        out
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.kind.name())?;
        for q in &self.targets {
            write!(f, " {q}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "violation", rename_all = "kebab-case")]
pub enum Violation {
    ZeroWidth,
    IndexOutOfRange { gate: usize, qubit: usize, width: usize },
    DuplicateTargets { gate: usize, qubit: usize },
    WrongArity { gate: usize, kind: GateKind, expected: usize, found: usize },
}

impl Violation {
    /// Stable short code, e.g. `index-out-of-range`.
    pub fn code(&self) -> &'static str {
        match self {
            Violation::ZeroWidth => "zero-width",
            Violation::IndexOutOfRange { .. } => "index-out-of-range",
            Violation::DuplicateTargets { .. } => "duplicate-targets",
            Violation::WrongArity { .. } => "wrong-arity",
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ZeroWidth => write!(f, "zero-width: circuit must have at least one qubit"),
            Violation::IndexOutOfRange { gate, qubit, width } => write!(
                f,
                "index-out-of-range: gate {gate} targets qubit {qubit} on a {width}-qubit register"
            ),
            Violation::DuplicateTargets { gate, qubit } => {
                write!(f, "duplicate-targets: gate {gate} repeats qubit {qubit}")
            }
            Violation::WrongArity {
                gate,
                kind,
                expected,
                found,
            } => write!(
                f,
                "wrong-arity: gate {gate} ({kind}) takes {expected} target(s), got {found}"
            ),
        }
    }
}

/// An ordered gate list over `width` qubits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    width: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    /// Builds a circuit, rejecting it if any invariant is violated.
    pub fn new(width: usize, gates: Vec<Gate>) -> Result<Self> {
        let c = Circuit { width, gates };
        let v = c.validate();
        if v.is_empty() {
            Ok(c)
        } else {
            Err(Error::InvalidCircuit(v))
        }
    }

    /// Builds a circuit without checking it. Use [`Circuit::validate`] to
    /// inspect the result.
    pub fn from_parts(width: usize, gates: Vec<Gate>) -> Self {
        Circuit { width, gates }
    }

    pub fn empty(width: usize) -> Self {
        Circuit { width, gates: Vec::new() }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// Elementary-gate count, identities included.
    pub fn gate_count(&self) -> usize {
        self.gates.len()
    }

    /// Every invariant violation, in gate order. Empty means valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.width == 0 {
            out.push(Violation::ZeroWidth);
        }
        for (i, g) in self.gates.iter().enumerate() {
            out.extend(g.violations(i, self.width));
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    pub(crate) fn ensure_valid(&self) -> Result<()> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidCircuit(v))
        }
    }
}

/// Serializes in the circuit file format; [`parse_circuit`] reads it back.
impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "qubits {}", self.width)?;
        for g in &self.gates {
            writeln!(f, "{g}")?;
        }
        Ok(())
    }
}

impl FromStr for Circuit {
    type Err = ParseError;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        parse_circuit(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("malformed header {0:?}, expected `qubits <n>` with n >= 1")]
    MalformedHeader(String),
    #[error("missing `qubits <n>` header")]
    MissingHeader,
    #[error("unknown gate {0:?}")]
    UnknownGate(String),
    #[error("bad qubit index {0:?}")]
    BadQubit(String),
    #[error("{kind} takes {expected} qubit(s), got {found}")]
    WrongArity { kind: GateKind, expected: usize, found: usize },
    #[error("qubit {qubit} out of range for {width}-qubit circuit")]
    IndexOutOfRange { qubit: usize, width: usize },
    #[error("duplicate target qubit {0}")]
    DuplicateTargets(usize),
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

/// Parses the circuit file format. Gates keep file order; every error
/// carries the 1-based line it occurred on.
pub fn parse_circuit(text: &str) -> std::result::Result<Circuit, ParseError> {
    let mut width: Option<usize> = None;
    let mut gates = Vec::new();
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let content = strip_comment(raw);
        let mut tokens = content.split_whitespace();
        let Some(head) = tokens.next() else {
            continue;
        };
        let err = |kind| ParseError { line, kind };

        let Some(n) = width else {
            let rest: Vec<&str> = tokens.collect();
            let n = match (head, rest.as_slice()) {
                ("qubits", [n]) => n.parse::<usize>().ok().filter(|&n| n >= 1),
                _ => None,
            };
            match n {
                Some(n) => width = Some(n),
                None => return Err(err(ParseErrorKind::MalformedHeader(content.trim().to_string()))),
            }
            continue;
        };

        let kind = GateKind::from_name(head)
            .ok_or_else(|| err(ParseErrorKind::UnknownGate(head.to_string())))?;
        let targets = tokens
            .map(|t| t.parse::<usize>().map_err(|_| err(ParseErrorKind::BadQubit(t.to_string()))))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        if targets.len() != kind.arity() {
            return Err(err(ParseErrorKind::WrongArity {
                kind,
                expected: kind.arity(),
                found: targets.len(),
            }));
        }
        for (i, &q) in targets.iter().enumerate() {
            if q >= n {
                return Err(err(ParseErrorKind::IndexOutOfRange { qubit: q, width: n }));
            }
            if targets[..i].contains(&q) {
                return Err(err(ParseErrorKind::DuplicateTargets(q)));
            }
        }
        gates.push(Gate::new(kind, targets));
    }

    match width {
        Some(width) => Ok(Circuit { width, gates }),
        None => Err(ParseError {
            line: last_line + 1,
            kind: ParseErrorKind::MissingHeader,
        }),
    }
}
