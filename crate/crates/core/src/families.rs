//! Constructive network families and the named worked examples, each paired
//! with the observation scheme and observer count it is claimed to achieve.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::network::{BooleanFunction, Classification, Literal, Network, ObservationScheme};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    AndOrWorst2,
    AndOrBest2,
    #[serde(rename = "and_or_worstK")]
    AndOrWorstK,
    #[serde(rename = "and_or_bestK")]
    AndOrBestK,
    XorRing,
    XorPairs,
    XorWorst,
    XorComplement,
    XorComplementCopies,
    XorM1,
    Nc,
    Example1,
    Example2,
    Exmp,
    ExampleXor,
    Exmp1,
    NcExample,
}

impl Family {
    pub const ALL: [Family; 17] = [
        Family::AndOrWorst2,
        Family::AndOrBest2,
        Family::AndOrWorstK,
        Family::AndOrBestK,
        Family::XorRing,
        Family::XorPairs,
        Family::XorWorst,
        Family::XorComplement,
        Family::XorComplementCopies,
        Family::XorM1,
        Family::Nc,
        Family::Example1,
        Family::Example2,
        Family::Exmp,
        Family::ExampleXor,
        Family::Exmp1,
        Family::NcExample,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Family::AndOrWorst2 => "and_or_worst2",
            Family::AndOrBest2 => "and_or_best2",
            Family::AndOrWorstK => "and_or_worstK",
            Family::AndOrBestK => "and_or_bestK",
            Family::XorRing => "xor_ring",
            Family::XorPairs => "xor_pairs",
            Family::XorWorst => "xor_worst",
            Family::XorComplement => "xor_complement",
            Family::XorComplementCopies => "xor_complement_copies",
            Family::XorM1 => "xor_m1",
            Family::Nc => "nc",
            Family::Example1 => "example1",
            Family::Example2 => "example2",
            Family::Exmp => "exmp",
            Family::ExampleXor => "example_xor",
            Family::Exmp1 => "exmp1",
            Family::NcExample => "nc_example",
        }
    }

    /// Which of `n` and `K` the generator reads.
    pub fn parameters(self) -> (bool, bool) {
        match self {
            Family::AndOrWorst2
            | Family::AndOrBest2
            | Family::XorRing
            | Family::XorPairs
            | Family::XorWorst => (true, false),
            Family::AndOrWorstK | Family::XorComplement | Family::XorM1 => (false, true),
            Family::AndOrBestK | Family::XorComplementCopies | Family::Nc => (true, true),
            _ => (false, false),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.id() == s)
            .ok_or_else(|| {
                let ids: Vec<&str> = Family::ALL.iter().map(|f| f.id()).collect();
                Error::Constraint(format!("unknown family `{s}` (known: {})", ids.join(", ")))
            })
    }
}

/// Structural class a generator promises.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "class", content = "k", rename_all = "kebab-case")]
pub enum DeclaredClass {
    AndOr(usize),
    Xor(usize),
    Nc(usize),
}

impl DeclaredClass {
    pub fn matches(self, c: &Classification) -> bool {
        match self {
            DeclaredClass::AndOr(k) => c.and_or && c.k == Some(k),
            DeclaredClass::Xor(k) => c.xor && c.k == Some(k),
            DeclaredClass::Nc(k) => c.nested_canalyzing && c.k == Some(k),
        }
    }
}

impl fmt::Display for DeclaredClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DeclaredClass::AndOr(k) => write!(f, "{k}-AND-OR-BN"),
            DeclaredClass::Xor(k) => write!(f, "{k}-XOR-BN"),
            DeclaredClass::Nc(k) => write!(f, "{k}-NC-BN"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum HorizonClaim {
    Exactly(usize),
    AtMost(usize),
}

impl HorizonClaim {
    pub fn admits(self, horizon: usize) -> bool {
        match self {
            HorizonClaim::Exactly(h) => horizon == h,
            HorizonClaim::AtMost(h) => horizon <= h,
        }
    }
}

impl fmt::Display for HorizonClaim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HorizonClaim::Exactly(h) => write!(f, "= {h}"),
            HorizonClaim::AtMost(h) => write!(f, "<= {h}"),
        }
    }
}

/// A generated network together with what its construction claims.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyInstance {
    pub family: Family,
    pub n: usize,
    pub k: Option<usize>,
    pub network: Network,
    pub scheme: Option<ObservationScheme>,
    pub class: DeclaredClass,
    /// Observer count the construction is claimed to need (or achieve).
    pub claimed_m: Option<usize>,
    pub claimed_horizon: Option<HorizonClaim>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FamilyParams {
    pub n: Option<usize>,
    pub k: Option<usize>,
}

impl FamilyParams {
    pub fn n(n: usize) -> Self {
        FamilyParams { n: Some(n), k: None }
    }

    pub fn k(k: usize) -> Self {
        FamilyParams { n: None, k: Some(k) }
    }

    pub fn nk(n: usize, k: usize) -> Self {
        FamilyParams {
            n: Some(n),
            k: Some(k),
        }
    }
}

fn constraint(msg: impl Into<String>) -> Error {
    Error::Constraint(msg.into())
}

fn require(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(constraint(msg))
    }
}

fn and(lits: impl IntoIterator<Item = Literal>) -> BooleanFunction {
    BooleanFunction::And(lits.into_iter().collect())
}

fn xor_of(vars: impl IntoIterator<Item = usize>) -> BooleanFunction {
    BooleanFunction::Xor(vars.into_iter().map(Literal::pos).collect())
}

/// Generates `family` for the given parameters.
pub fn gen(family: Family, params: FamilyParams) -> Result<FamilyInstance> {
    let (needs_n, needs_k) = family.parameters();
    let n = if needs_n {
        params
            .n
            .ok_or_else(|| constraint(format!("{family} requires n")))?
    } else {
        0
    };
    let k = if needs_k {
        params
            .k
            .ok_or_else(|| constraint(format!("{family} requires K")))?
    } else {
        0
    };
    match family {
        Family::AndOrWorst2 => and_or_worst2(n),
        Family::AndOrBest2 => and_or_best2(n),
        Family::AndOrWorstK => and_or_worst_k(k),
        Family::AndOrBestK => and_or_best_k(k, n),
        Family::XorRing => xor_ring(n),
        Family::XorPairs => xor_pairs(n),
        Family::XorWorst => xor_worst(n),
        Family::XorComplement => xor_complement(k),
        Family::XorComplementCopies => xor_complement_copies(k, n),
        Family::XorM1 => xor_m1(k),
        Family::Nc => nc(k, n),
        Family::Example1 => example1(),
        Family::Example2 => example2(),
        Family::Exmp => exmp(),
        Family::ExampleXor => Ok(FamilyInstance {
            family: Family::ExampleXor,
            ..xor_complement(3)?
        }),
        Family::Exmp1 => Ok(FamilyInstance {
            family: Family::Exmp1,
            ..xor_m1(3)?
        }),
        Family::NcExample => Ok(FamilyInstance {
            family: Family::NcExample,
            ..nc(4, 11)?
        }),
    }
}

/// Disjoint union of `c` copies; copy `b` uses nodes `b*n + 1 ..= (b+1)*n`.
pub fn copies(network: &Network, scheme: &ObservationScheme, c: usize) -> Result<(Network, ObservationScheme)> {
    require(c >= 1, "copies needs c >= 1")?;
    let n = network.n();
    let shift_lits = |lits: &[Literal], by: usize| -> Vec<Literal> {
        lits.iter()
            .map(|l| Literal {
                var: l.var + by,
                negated: l.negated,
            })
            .collect()
    };
    let mut functions = Vec::with_capacity(n * c);
    for b in 0..c {
        let by = b * n;
        for f in network.functions() {
            functions.push(match f {
                BooleanFunction::And(l) => BooleanFunction::And(shift_lits(l, by)),
                BooleanFunction::Or(l) => BooleanFunction::Or(shift_lits(l, by)),
                BooleanFunction::Xor(l) => BooleanFunction::Xor(shift_lits(l, by)),
                BooleanFunction::NestedCanalyzing(groups) => BooleanFunction::NestedCanalyzing(
                    groups.iter().map(|g| shift_lits(g, by)).collect(),
                ),
                BooleanFunction::TruthTable { vars, bits } => BooleanFunction::TruthTable {
                    vars: vars.iter().map(|v| v + by).collect(),
                    bits: bits.clone(),
                },
            });
        }
    }
    let scheme = ObservationScheme::new(
        (0..c).flat_map(|b| scheme.nodes().iter().map(move |&v| v + b * n)),
    );
    Ok((Network::new(functions)?, scheme))
}

fn instance(
    family: Family,
    k: Option<usize>,
    network: Network,
    scheme: Option<ObservationScheme>,
    class: DeclaredClass,
    claimed_horizon: Option<HorizonClaim>,
) -> FamilyInstance {
    FamilyInstance {
        family,
        n: network.n(),
        k,
        claimed_m: scheme.as_ref().map(ObservationScheme::len),
        network,
        scheme,
        class,
        claimed_horizon,
    }
}

/// Every node ANDs itself with `x_n`, and `x_n` ANDs itself with `x_1`.
fn and_or_worst2(n: usize) -> Result<FamilyInstance> {
    require(n >= 2, "and_or_worst2 requires n >= 2")?;
    let functions = (1..=n)
        .map(|i| {
            let other = if i < n { n } else { 1 };
            and([Literal::pos(i), Literal::pos(other)])
        })
        .collect();
    Ok(instance(
        Family::AndOrWorst2,
        Some(2),
        Network::new(functions)?,
        Some(ObservationScheme::full(n)),
        DeclaredClass::AndOr(2),
        None,
    ))
}

fn best2_block() -> Network {
    Network::new(vec![
        and([Literal::neg(2), Literal::pos(3)]),
        and([Literal::pos(2), Literal::pos(3)]),
        and([Literal::neg(2), Literal::neg(3)]),
    ])
    .expect("block is valid")
}

fn and_or_best2(n: usize) -> Result<FamilyInstance> {
    require(n >= 3 && n.is_multiple_of(3), "and_or_best2 requires n to be a positive multiple of 3")?;
    let (network, scheme) = copies(&best2_block(), &ObservationScheme::new([1]), n / 3)?;
    Ok(instance(
        Family::AndOrBest2,
        Some(2),
        network,
        Some(scheme),
        DeclaredClass::AndOr(2),
        Some(HorizonClaim::Exactly(3)),
    ))
}

/// `K+1` nodes whose time-1 image is all-zero for `2^(K+1) - 2K` states.
fn and_or_worst_k(k: usize) -> Result<FamilyInstance> {
    require(k >= 3, "and_or_worstK requires K >= 3")?;
    let mut functions = Vec::with_capacity(k + 1);
    functions.push(and((1..=k).map(Literal::pos)));
    for i in 2..=k {
        functions.push(and((1..=k).map(|v| {
            if v == i - 1 {
                Literal::neg(v)
            } else {
                Literal::pos(v)
            }
        })));
    }
    functions.push(and((2..=k + 1).map(Literal::pos)));
    Ok(instance(
        Family::AndOrWorstK,
        Some(k),
        Network::new(functions)?,
        Some(ObservationScheme::full(k + 1)),
        DeclaredClass::AndOr(k),
        None,
    ))
}

/// Sign patterns over `k` variables in node order: by weight, then by value
/// (first variable most significant), without the largest weight-`(k-1)`
/// pattern.
pub fn best_k_patterns(k: usize) -> Vec<u32> {
    let full = (1u32 << k) - 1;
    let omitted = full & !1;
    let mut patterns: Vec<u32> = (0..=full).filter(|&p| p != omitted).collect();
    patterns.sort_by_key(|&p| (p.count_ones(), p));
    patterns
}

fn best_k_block(k: usize, patterns: &[u32]) -> Result<Network> {
    let size = (1usize << k) - 1;
    let first = size - k + 1;
    let functions = patterns
        .iter()
        .map(|&p| {
            and((0..k).map(|j| {
                let var = first + j;
                if (p >> (k - 1 - j)) & 1 == 1 {
                    Literal::pos(var)
                } else {
                    Literal::neg(var)
                }
            }))
        })
        .collect();
    Network::new(functions)
}

fn and_or_best_k(k: usize, n: usize) -> Result<FamilyInstance> {
    require(k >= 3, "and_or_bestK requires K >= 3")?;
    require(k <= 5, "and_or_bestK is limited to K <= 5 (blocks of 2^K - 1 nodes)")?;
    let size = (1usize << k) - 1;
    require(
        n >= size && n.is_multiple_of(size),
        "and_or_bestK requires n to be a positive multiple of 2^K - 1",
    )?;
    let block = best_k_block(k, &best_k_patterns(k))?;
    let observers = ObservationScheme::new(1..=size - k);
    let (network, scheme) = copies(&block, &observers, n / size)?;
    Ok(instance(
        Family::AndOrBestK,
        Some(k),
        network,
        Some(scheme),
        DeclaredClass::AndOr(k),
        Some(HorizonClaim::AtMost(2)),
    ))
}

/// The 15-node, K = 4 listing with its own row order.
fn exmp() -> Result<FamilyInstance> {
    let patterns = [
        0b0000, 0b0001, 0b0010, 0b0100, 0b1000, 0b0011, 0b0101, 0b1001, 0b0110, 0b1010, 0b1100,
        0b1111, 0b0111, 0b1011, 0b1101,
    ];
    Ok(instance(
        Family::Exmp,
        Some(4),
        best_k_block(4, &patterns)?,
        Some(ObservationScheme::new(1..=11)),
        DeclaredClass::AndOr(4),
        Some(HorizonClaim::AtMost(2)),
    ))
}

fn xor_ring(n: usize) -> Result<FamilyInstance> {
    require(n >= 2, "xor_ring requires n >= 2")?;
    let functions = (1..=n).map(|i| xor_of([i, i % n + 1])).collect();
    Ok(instance(
        Family::XorRing,
        Some(2),
        Network::new(functions)?,
        Some(ObservationScheme::new([1])),
        DeclaredClass::Xor(2),
        Some(HorizonClaim::AtMost(n - 1)),
    ))
}

/// Odd node `i` and even node `i + 1` both become `x_i ⊕ x_(i+1)`.
fn xor_pairs(n: usize) -> Result<FamilyInstance> {
    require(n >= 2 && n.is_multiple_of(2), "xor_pairs requires a positive even n")?;
    let functions = (1..=n)
        .map(|i| if i % 2 == 1 { xor_of([i, i + 1]) } else { xor_of([i - 1, i]) })
        .collect();
    Ok(instance(
        Family::XorPairs,
        Some(2),
        Network::new(functions)?,
        Some(ObservationScheme::new((1..=n).step_by(2))),
        DeclaredClass::Xor(2),
        Some(HorizonClaim::AtMost(1)),
    ))
}

fn xor_worst(n: usize) -> Result<FamilyInstance> {
    require(n >= 2, "xor_worst requires n >= 2")?;
    Ok(instance(
        Family::XorWorst,
        Some(2),
        Network::new((0..n).map(|_| xor_of([1, 2])).collect())?,
        Some(ObservationScheme::full(n)),
        DeclaredClass::Xor(2),
        None,
    ))
}

/// `K+1` nodes, each the XOR of all the others.
fn xor_complement(k: usize) -> Result<FamilyInstance> {
    require(k >= 3 && k % 2 == 1, "xor_complement requires an odd K >= 3")?;
    let functions = (1..=k + 1)
        .map(|i| xor_of((1..=k + 1).filter(|&v| v != i)))
        .collect();
    Ok(instance(
        Family::XorComplement,
        Some(k),
        Network::new(functions)?,
        Some(ObservationScheme::new(1..=k)),
        DeclaredClass::Xor(k),
        Some(HorizonClaim::Exactly(1)),
    ))
}

fn xor_complement_copies(k: usize, n: usize) -> Result<FamilyInstance> {
    let block = xor_complement(k)?;
    require(
        n > k && n.is_multiple_of(k + 1),
        "xor_complement_copies requires n to be a positive multiple of K + 1",
    )?;
    let (network, scheme) = copies(
        &block.network,
        block.scheme.as_ref().expect("block has a scheme"),
        n / (k + 1),
    )?;
    Ok(instance(
        Family::XorComplementCopies,
        Some(k),
        network,
        Some(scheme),
        DeclaredClass::Xor(k),
        Some(HorizonClaim::Exactly(1)),
    ))
}

/// `K+1` nodes observed through `x1` alone: node 1 omits `x_K`, node `i`
/// (`2 <= i <= K`) omits `x_(i-1)`, node `K+1` omits itself.
fn xor_m1(k: usize) -> Result<FamilyInstance> {
    require(k >= 3, "xor_m1 requires K >= 3")?;
    let functions = (1..=k + 1)
        .map(|i| {
            let omit = match i {
                1 => k,
                i if i <= k => i - 1,
                _ => k + 1,
            };
            xor_of((1..=k + 1).filter(|&v| v != omit))
        })
        .collect();
    Ok(instance(
        Family::XorM1,
        Some(k),
        Network::new(functions)?,
        Some(ObservationScheme::new([1])),
        DeclaredClass::Xor(k),
        Some(HorizonClaim::AtMost(k)),
    ))
}

/// Blocks of `K` consecutive nodes, each node driven by its cyclic successor
/// inside the block and otherwise canalized by the negations of the rest of
/// the block. A short last block of `p` nodes tops its AND group up with
/// `x_1 … x_(K-p)`.
fn nc(k: usize, n: usize) -> Result<FamilyInstance> {
    require(k >= 3, "nc requires K >= 3")?;
    require(n >= k, "nc requires n >= K")?;
    let mut functions = Vec::with_capacity(n);
    let mut observers = Vec::new();
    let mut start = 1;
    while start <= n {
        let size = k.min(n - start + 1);
        let block: Vec<usize> = (start..start + size).collect();
        observers.push(start);
        for (j, &node) in block.iter().enumerate() {
            let driver = block[(j + 1) % size];
            let mut inner: Vec<Literal> = block
                .iter()
                .filter(|&&v| v != driver)
                .map(|&v| Literal::neg(v))
                .collect();
            inner.extend((1..=k - size).map(Literal::pos));
            let _ = node;
            functions.push(BooleanFunction::NestedCanalyzing(vec![
                vec![Literal::pos(driver)],
                inner,
            ]));
        }
        start += size;
    }
    Ok(instance(
        Family::Nc,
        Some(k),
        Network::new(functions)?,
        Some(ObservationScheme::new(observers)),
        DeclaredClass::Nc(k),
        None,
    ))
}

fn example1() -> Result<FamilyInstance> {
    let network = Network::new(vec![
        and([Literal::pos(1), Literal::pos(3)]),
        and([Literal::neg(1), Literal::pos(3)]),
        and([Literal::pos(1), Literal::pos(2)]),
    ])?;
    Ok(FamilyInstance {
        family: Family::Example1,
        n: 3,
        k: Some(2),
        network,
        scheme: None,
        class: DeclaredClass::AndOr(2),
        claimed_m: None,
        claimed_horizon: None,
    })
}

fn example2() -> Result<FamilyInstance> {
    let network = Network::new(vec![
        and([Literal::neg(2), Literal::pos(3)]),
        and([Literal::pos(2), Literal::pos(3)]),
        and([Literal::neg(2), Literal::neg(3)]),
        and([Literal::pos(1), Literal::pos(4)]),
    ])?;
    Ok(FamilyInstance {
        family: Family::Example2,
        n: 4,
        k: Some(2),
        network,
        scheme: None,
        class: DeclaredClass::AndOr(2),
        claimed_m: None,
        claimed_horizon: None,
    })
}
