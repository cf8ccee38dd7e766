//! Synchronous Boolean networks: literals, node functions, packed states,
//! observation schemes and structural classification.
//!
//! Node and variable indices are 1-based everywhere in the public API, so
//! `x1` is node `1`. Internally node `i` lives in bit `i - 1` of a packed
//! state word, which limits networks to 64 nodes.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// Largest node count a packed [`State`] can hold.
pub const MAX_NODES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Literal {
    pub var: usize,
    pub negated: bool,
}

impl Literal {
    pub fn pos(var: usize) -> Self {
        Literal {
            var,
            negated: false,
        }
    }

    pub fn neg(var: usize) -> Self {
        Literal { var, negated: true }
    }

    #[inline]
    pub fn value(&self, bits: u64) -> bool {
        ((bits >> (self.var - 1)) & 1 == 1) != self.negated
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            write!(f, "!x{}", self.var)
        } else {
            write!(f, "x{}", self.var)
        }
    }
}

/// A node update function.
///
/// `NestedCanalyzing` holds literal groups whose connectives alternate OR,
/// AND, OR, ... starting from the outermost group, so `[[a], [b, c]]` is
/// `a | (b & c)`. An empty first group makes the outermost connective AND.
///
/// `TruthTable` output `bits[i]` is the value for the assignment in which
/// `vars[j]` holds bit `j` of `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BooleanFunction {
    And(Vec<Literal>),
    Or(Vec<Literal>),
    Xor(Vec<Literal>),
    NestedCanalyzing(Vec<Vec<Literal>>),
    TruthTable { vars: Vec<usize>, bits: Vec<bool> },
}

impl BooleanFunction {
    /// Input variables in declaration order.
    pub fn vars(&self) -> Vec<usize> {
        match self {
            BooleanFunction::And(lits) | BooleanFunction::Or(lits) | BooleanFunction::Xor(lits) => {
                lits.iter().map(|l| l.var).collect()
            }
            BooleanFunction::NestedCanalyzing(groups) => {
                groups.iter().flatten().map(|l| l.var).collect()
            }
            BooleanFunction::TruthTable { vars, .. } => vars.clone(),
        }
    }

    /// Number of inputs (the `K` of the structural classes).
    pub fn arity(&self) -> usize {
        match self {
            BooleanFunction::And(lits) | BooleanFunction::Or(lits) | BooleanFunction::Xor(lits) => {
                lits.len()
            }
            BooleanFunction::NestedCanalyzing(groups) => groups.iter().map(Vec::len).sum(),
            BooleanFunction::TruthTable { vars, .. } => vars.len(),
        }
    }

    fn is_single_literal(&self) -> bool {
        !matches!(self, BooleanFunction::TruthTable { .. }) && self.arity() == 1
    }

    /// Evaluates the function literal by literal on a packed state.
    pub fn eval(&self, bits: u64) -> bool {
        match self {
            BooleanFunction::And(lits) => lits.iter().all(|l| l.value(bits)),
            BooleanFunction::Or(lits) => lits.iter().any(|l| l.value(bits)),
            BooleanFunction::Xor(lits) => lits.iter().fold(false, |acc, l| acc ^ l.value(bits)),
            BooleanFunction::NestedCanalyzing(groups) => {
                // innermost group first; group g uses OR for even g, AND for odd g
                let mut value = None;
                for (g, group) in groups.iter().enumerate().rev() {
                    let is_or = g % 2 == 0;
                    let mut acc = match value {
                        Some(v) => v,
                        None => !is_or,
                    };
                    for lit in group {
                        if is_or {
                            acc |= lit.value(bits);
                        } else {
                            acc &= lit.value(bits);
                        }
                    }
                    value = Some(acc);
                }
                value.unwrap_or(false)
            }
            BooleanFunction::TruthTable { vars, bits: table } => {
                let mut index = 0usize;
                for (j, &v) in vars.iter().enumerate() {
                    index |= (((bits >> (v - 1)) & 1) as usize) << j;
                }
                table[index]
            }
        }
    }

    /// Checks the function's own invariants against a network of `n` nodes.
    pub fn validate(&self, n: usize) -> Result<()> {
        let vars = self.vars();
        let what = match self {
            BooleanFunction::And(_) => "AND",
            BooleanFunction::Or(_) => "OR",
            BooleanFunction::Xor(_) => "XOR",
            BooleanFunction::NestedCanalyzing(_) => "NC",
            BooleanFunction::TruthTable { .. } => "TT",
        };
        if vars.is_empty() {
            return Err(Error::Invalid(format!("{what} needs at least one input")));
        }
        for &v in &vars {
            if v == 0 || v > n {
                return Err(Error::Invalid(format!(
                    "variable x{v} is outside the node range 1..={n}"
                )));
            }
        }
        let mut sorted = vars.clone();
        sorted.sort_unstable();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Invalid(format!("duplicate variable x{}", w[0])));
        }
        match self {
            BooleanFunction::NestedCanalyzing(groups) => {
                if let Some(g) = groups.iter().skip(1).position(Vec::is_empty) {
                    return Err(Error::Invalid(format!(
                        "NC group {} is empty (only the first group may be)",
                        g + 2
                    )));
                }
            }
            BooleanFunction::TruthTable { vars, bits } => {
                if vars.len() > 20 {
                    return Err(Error::Invalid("TT supports at most 20 inputs".into()));
                }
                if bits.len() != 1usize << vars.len() {
                    return Err(Error::Invalid(format!(
                        "TT over {} vars needs {} bits, got {}",
                        vars.len(),
                        1usize << vars.len(),
                        bits.len()
                    )));
                }
                for (j, &v) in vars.iter().enumerate() {
                    let relevant = (0..bits.len()).any(|i| bits[i] != bits[i ^ (1 << j)]);
                    if !relevant {
                        return Err(Error::Invalid(format!("TT input x{v} is irrelevant")));
                    }
                }
            }
            _ => {}
        }
        Ok(())
    }

    fn compile(&self) -> Compiled {
        fn masks(lits: &[Literal]) -> (u64, u64) {
            lits.iter().fold((0, 0), |(mask, flip), l| {
                let bit = 1u64 << (l.var - 1);
                (mask | bit, if l.negated { flip | bit } else { flip })
            })
        }
        match self {
            BooleanFunction::And(lits) => {
                let (mask, flip) = masks(lits);
                Compiled::And { mask, flip }
            }
            BooleanFunction::Or(lits) => {
                let (mask, flip) = masks(lits);
                Compiled::Or { mask, flip }
            }
            BooleanFunction::Xor(lits) => {
                let (mask, flip) = masks(lits);
                Compiled::Xor {
                    mask,
                    parity: flip.count_ones() % 2 == 1,
                }
            }
            BooleanFunction::NestedCanalyzing(groups) => Compiled::Nested(
                groups
                    .iter()
                    .map(|g| {
                        let (mask, flip) = masks(g);
                        (mask, flip)
                    })
                    .collect(),
            ),
            BooleanFunction::TruthTable { vars, bits } => {
                let mut table = vec![0u64; bits.len().div_ceil(64)];
                for (i, &b) in bits.iter().enumerate() {
                    if b {
                        table[i / 64] |= 1 << (i % 64);
                    }
                }
                Compiled::Table {
                    shifts: vars.iter().map(|&v| (v - 1) as u32).collect(),
                    table,
                }
            }
        }
    }
}

/// Mask form of a node function used by [`Network::step`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Compiled {
    And { mask: u64, flip: u64 },
    Or { mask: u64, flip: u64 },
    Xor { mask: u64, parity: bool },
    Nested(Vec<(u64, u64)>),
    Table { shifts: Vec<u32>, table: Vec<u64> },
}

impl Compiled {
    #[inline]
    fn eval(&self, bits: u64) -> bool {
        match *self {
            Compiled::And { mask, flip } => (bits ^ flip) & mask == mask,
            Compiled::Or { mask, flip } => (bits ^ flip) & mask != 0,
            Compiled::Xor { mask, parity } => ((bits & mask).count_ones() % 2 == 1) != parity,
            Compiled::Nested(ref groups) => {
                let mut value: Option<bool> = None;
                for (g, &(mask, flip)) in groups.iter().enumerate().rev() {
                    let lits = (bits ^ flip) & mask;
                    value = Some(if g % 2 == 0 {
                        lits != 0 || value.unwrap_or(false)
                    } else {
                        lits == mask && value.unwrap_or(true)
                    });
                }
                value.unwrap_or(false)
            }
            Compiled::Table {
                ref shifts,
                ref table,
            } => {
                let mut index = 0usize;
                for (j, &s) in shifts.iter().enumerate() {
                    index |= (((bits >> s) & 1) as usize) << j;
                }
                (table[index / 64] >> (index % 64)) & 1 == 1
            }
        }
    }
}

/// A packed network state; bit `i - 1` holds `x_i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct State {
    bits: u64,
    width: usize,
}

impl State {
    pub fn new(bits: u64, width: usize) -> Result<Self> {
        if width == 0 || width > MAX_NODES {
            return Err(Error::Invalid(format!("state width {width} out of range")));
        }
        if width < 64 && bits >> width != 0 {
            return Err(Error::Invalid(format!(
                "state 0x{bits:x} has bits above width {width}"
            )));
        }
        Ok(State { bits, width })
    }

    /// Builds a state from values listed `x1` first.
    pub fn from_values(values: &[bool]) -> Result<Self> {
        let bits = values
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, &v)| acc | ((v as u64) << i));
        State::new(bits, values.len())
    }

    pub(crate) fn from_raw(bits: u64, width: usize) -> Self {
        State { bits, width }
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Value of `x_i` (1-based).
    pub fn get(&self, i: usize) -> bool {
        (self.bits >> (i - 1)) & 1 == 1
    }

    pub fn values(&self) -> Vec<bool> {
        (1..=self.width).map(|i| self.get(i)).collect()
    }
}

/// Prints `x1 … xn` left to right as `0`/`1` characters.
impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_bits(self.bits, self.width))
    }
}

pub(crate) fn format_bits(bits: u64, width: usize) -> String {
    (0..width)
        .map(|i| if (bits >> i) & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// The set of directly observed nodes. Repeated observers carry no extra
/// information, so indices are kept sorted and deduplicated.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct ObservationScheme {
    nodes: Vec<usize>,
}

impl ObservationScheme {
    pub fn new<I: IntoIterator<Item = usize>>(nodes: I) -> Self {
        let mut nodes: Vec<usize> = nodes.into_iter().collect();
        nodes.sort_unstable();
        nodes.dedup();
        ObservationScheme { nodes }
    }

    /// Observes every node `1..=n`.
    pub fn full(n: usize) -> Self {
        ObservationScheme::new(1..=n)
    }

    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains(&self, node: usize) -> bool {
        self.nodes.binary_search(&node).is_ok()
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        match self.nodes.iter().find(|&&v| v == 0 || v > n) {
            Some(v) => Err(Error::Invalid(format!(
                "observed node x{v} is outside the node range 1..={n}"
            ))),
            None => Ok(()),
        }
    }

    pub fn mask(&self) -> u64 {
        self.nodes.iter().fold(0, |m, &v| m | (1u64 << (v - 1)))
    }

    /// Packs the observed bits of `bits` into the low `len()` bits, first
    /// observer lowest.
    #[inline]
    pub fn project(&self, bits: u64) -> u64 {
        self.nodes
            .iter()
            .enumerate()
            .fold(0, |acc, (j, &v)| acc | (((bits >> (v - 1)) & 1) << j))
    }
}

impl fmt::Display for ObservationScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.nodes.iter().map(|v| format!("x{v}")).collect();
        f.write_str(&parts.join(", "))
    }
}

/// A synchronous Boolean network; function `i - 1` updates node `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Network {
    functions: Vec<BooleanFunction>,
    compiled: Vec<Compiled>,
}

impl Network {
    pub fn new(functions: Vec<BooleanFunction>) -> Result<Self> {
        let n = functions.len();
        if n == 0 {
            return Err(Error::Invalid("a network needs at least one node".into()));
        }
        if n > MAX_NODES {
            return Err(Error::Invalid(format!(
                "{n} nodes exceeds the supported maximum of {MAX_NODES}"
            )));
        }
        for (i, f) in functions.iter().enumerate() {
            f.validate(n)
                .map_err(|e| Error::Invalid(format!("x{}: {}", i + 1, e)))?;
        }
        let compiled = functions.iter().map(BooleanFunction::compile).collect();
        Ok(Network {
            functions,
            compiled,
        })
    }

    pub fn n(&self) -> usize {
        self.functions.len()
    }

    pub fn functions(&self) -> &[BooleanFunction] {
        &self.functions
    }

    /// Function updating node `i` (1-based).
    pub fn function(&self, i: usize) -> &BooleanFunction {
        &self.functions[i - 1]
    }

    /// Number of packed states, `2^n`.
    pub fn state_count(&self) -> u64 {
        1u64 << self.n()
    }

    /// One synchronous update on a packed state word.
    #[inline]
    pub fn step_bits(&self, bits: u64) -> u64 {
        self.compiled
            .iter()
            .enumerate()
            .fold(0, |acc, (i, f)| acc | ((f.eval(bits) as u64) << i))
    }

    pub fn step(&self, state: State) -> State {
        debug_assert_eq!(state.width(), self.n());
        State::from_raw(self.step_bits(state.bits()), self.n())
    }

    pub fn state(&self, bits: u64) -> Result<State> {
        State::new(bits, self.n())
    }

    pub fn classify(&self) -> Classification {
        let k = self.functions[0].arity();
        if self.functions.iter().any(|f| f.arity() != k) {
            return Classification::general();
        }
        let every = |pred: &dyn Fn(&BooleanFunction) -> bool| {
            self.functions
                .iter()
                .all(|f| f.is_single_literal() || pred(f))
        };
        let and_or = every(&|f| matches!(f, BooleanFunction::And(_) | BooleanFunction::Or(_)));
        let xor = every(&|f| matches!(f, BooleanFunction::Xor(_)));
        let nc = every(&|f| {
            matches!(
                f,
                BooleanFunction::And(_)
                    | BooleanFunction::Or(_)
                    | BooleanFunction::NestedCanalyzing(_)
            )
        });
        Classification {
            k: (and_or || xor || nc).then_some(k),
            and_or,
            xor,
            nested_canalyzing: nc,
        }
    }
}

/// Structural class membership, all relative to one uniform literal count `k`.
///
/// AND and OR of literals are nested canalyzing by definition, and a single
/// literal is simultaneously AND, OR, XOR and nested canalyzing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub k: Option<usize>,
    pub and_or: bool,
    pub xor: bool,
    pub nested_canalyzing: bool,
}

impl Classification {
    fn general() -> Self {
        Classification {
            k: None,
            and_or: false,
            xor: false,
            nested_canalyzing: false,
        }
    }

    pub fn is_general(&self) -> bool {
        !(self.and_or || self.xor || self.nested_canalyzing)
    }

    pub fn tags(&self) -> Vec<String> {
        let Some(k) = self.k else {
            return vec!["general".to_string()];
        };
        let mut tags = Vec::new();
        if self.and_or {
            tags.push(format!("{k}-AND-OR-BN"));
        }
        if self.xor {
            tags.push(format!("{k}-XOR-BN"));
        }
        if self.nested_canalyzing {
            tags.push(format!("{k}-NC-BN"));
        }
        tags
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.tags().join(", "))
    }
}
