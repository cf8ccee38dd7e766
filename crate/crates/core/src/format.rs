//! Text format for networks.
//!
//! ```text
//! # comment
//! nodes: 3
//! x1 = AND(!x2, x3)
//! x2 = NC(x3 ; !x1, x2)
//! x3 = TT(vars=[x1, x2], bits=0110)
//! observe: x1, x3
//! ```
//!
//! Functions are `AND`, `OR`, `XOR`, `NC` (groups separated by `;`, a leading
//! `;` for an empty first group) and `TT`. Every node `1..=n` is defined
//! exactly once; `observe:` is optional.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::network::{BooleanFunction, Literal, Network, ObservationScheme};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetworkFile {
    pub network: Network,
    pub scheme: Option<ObservationScheme>,
}

fn syntax(line: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        message: message.into(),
    }
}

fn parse_var(token: &str, line: usize) -> Result<usize> {
    let t = token.trim();
    let digits = t
        .strip_prefix('x')
        .ok_or_else(|| syntax(line, format!("expected a variable like x1, found `{t}`")))?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(syntax(line, format!("bad variable `{t}`")));
    }
    digits
        .parse()
        .map_err(|_| syntax(line, format!("bad variable `{t}`")))
}

fn parse_literal(token: &str, line: usize) -> Result<Literal> {
    let t = token.trim();
    match t.strip_prefix('!') {
        Some(rest) => Ok(Literal::neg(parse_var(rest, line)?)),
        None => Ok(Literal::pos(parse_var(t, line)?)),
    }
}

fn parse_literals(body: &str, line: usize) -> Result<Vec<Literal>> {
    if body.trim().is_empty() {
        return Ok(Vec::new());
    }
    body.split(',').map(|t| parse_literal(t, line)).collect()
}

fn parse_function(text: &str, line: usize) -> Result<BooleanFunction> {
    let text = text.trim();
    let open = text
        .find('(')
        .ok_or_else(|| syntax(line, "expected FUNC(...)"))?;
    let body = text[open + 1..]
        .strip_suffix(')')
        .ok_or_else(|| syntax(line, "missing closing parenthesis"))?;
    let name = text[..open].trim();
    let need_nonempty = |lits: Vec<Literal>| {
        if lits.is_empty() {
            Err(syntax(line, format!("{name} needs at least one literal")))
        } else {
            Ok(lits)
        }
    };
    match name {
        "AND" => Ok(BooleanFunction::And(need_nonempty(parse_literals(body, line)?)?)),
        "OR" => Ok(BooleanFunction::Or(need_nonempty(parse_literals(body, line)?)?)),
        "XOR" => Ok(BooleanFunction::Xor(need_nonempty(parse_literals(body, line)?)?)),
        "NC" => {
            let groups = body
                .split(';')
                .map(|g| parse_literals(g, line))
                .collect::<Result<Vec<_>>>()?;
            if groups.iter().skip(1).any(Vec::is_empty) {
                return Err(syntax(line, "only the first NC group may be empty"));
            }
            Ok(BooleanFunction::NestedCanalyzing(groups))
        }
        "TT" => parse_truth_table(body, line),
        other => Err(syntax(line, format!("unknown function `{other}`"))),
    }
}

fn parse_truth_table(body: &str, line: usize) -> Result<BooleanFunction> {
    let rest = body
        .trim()
        .strip_prefix("vars")
        .map(str::trim_start)
        .and_then(|r| r.strip_prefix('='))
        .map(str::trim_start)
        .and_then(|r| r.strip_prefix('['))
        .ok_or_else(|| syntax(line, "TT expects vars=[...]"))?;
    let close = rest
        .find(']')
        .ok_or_else(|| syntax(line, "TT vars list is not closed"))?;
    let vars = rest[..close]
        .split(',')
        .map(|t| parse_var(t, line))
        .collect::<Result<Vec<_>>>()?;
    let bits = rest[close + 1..]
        .trim_start()
        .strip_prefix(',')
        .map(str::trim_start)
        .and_then(|r| r.strip_prefix("bits"))
        .map(str::trim_start)
        .and_then(|r| r.strip_prefix('='))
        .map(str::trim)
        .ok_or_else(|| syntax(line, "TT expects bits=<0/1 string> after vars"))?;
    let bits = bits
        .chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(syntax(line, format!("bad TT bit `{other}`"))),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BooleanFunction::TruthTable { vars, bits })
}

/// Parses the network text format.
pub fn parse(text: &str) -> Result<NetworkFile> {
    let mut n: Option<usize> = None;
    let mut defs: BTreeMap<usize, (usize, BooleanFunction)> = BTreeMap::new();
    let mut scheme: Option<(usize, Vec<usize>)> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix("nodes:") {
            if n.is_some() {
                return Err(syntax(line, "duplicate `nodes:` line"));
            }
            let value: usize = rest
                .trim()
                .parse()
                .map_err(|_| syntax(line, format!("bad node count `{}`", rest.trim())))?;
            if value == 0 {
                return Err(syntax(line, "node count must be at least 1"));
            }
            n = Some(value);
        } else if let Some(rest) = content.strip_prefix("observe:") {
            if scheme.is_some() {
                return Err(syntax(line, "duplicate `observe:` line"));
            }
            let nodes = rest
                .split(',')
                .map(|t| parse_var(t, line))
                .collect::<Result<Vec<_>>>()?;
            scheme = Some((line, nodes));
        } else if let Some((lhs, rhs)) = content.split_once('=') {
            let Some(count) = n else {
                return Err(syntax(line, "`nodes:` must precede node definitions"));
            };
            let node = parse_var(lhs, line)?;
            if node == 0 || node > count {
                return Err(Error::Invalid(format!(
                    "line {line}: node x{node} is outside the node range 1..={count}"
                )));
            }
            let function = parse_function(rhs, line)?;
            if let Some((first, _)) = defs.get(&node) {
                return Err(Error::Invalid(format!(
                    "line {line}: node x{node} already defined on line {first}"
                )));
            }
            function
                .validate(count)
                .map_err(|e| Error::Invalid(format!("line {line}: x{node}: {e}")))?;
            defs.insert(node, (line, function));
        } else {
            return Err(syntax(line, format!("unrecognized line `{content}`")));
        }
    }

    let n = n.ok_or_else(|| syntax(text.lines().count().max(1), "missing `nodes:` line"))?;
    if let Some(missing) = (1..=n).find(|i| !defs.contains_key(i)) {
        return Err(Error::Invalid(format!("node x{missing} has no definition")));
    }
    let network = Network::new(defs.into_values().map(|(_, f)| f).collect())?;
    let scheme = match scheme {
        Some((line, nodes)) => {
            let s = ObservationScheme::new(nodes);
            s.validate(n)
                .map_err(|e| Error::Invalid(format!("line {line}: {e}")))?;
            Some(s)
        }
        None => None,
    };
    Ok(NetworkFile { network, scheme })
}

fn join_literals(lits: &[Literal]) -> String {
    lits.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(", ")
}

pub fn format_function(f: &BooleanFunction) -> String {
    match f {
        BooleanFunction::And(l) => format!("AND({})", join_literals(l)),
        BooleanFunction::Or(l) => format!("OR({})", join_literals(l)),
        BooleanFunction::Xor(l) => format!("XOR({})", join_literals(l)),
        BooleanFunction::NestedCanalyzing(groups) => {
            let parts: Vec<String> = groups.iter().map(|g| join_literals(g)).collect();
            let mut body = parts.join(" ; ");
            if groups.first().is_some_and(Vec::is_empty) {
                // "" joined gives a leading " ; "
                body = body.trim_start().to_string();
            }
            format!("NC({body})")
        }
        BooleanFunction::TruthTable { vars, bits } => {
            let vars: Vec<String> = vars.iter().map(|v| format!("x{v}")).collect();
            let bits: String = bits.iter().map(|&b| if b { '1' } else { '0' }).collect();
            format!("TT(vars=[{}], bits={bits})", vars.join(", "))
        }
    }
}

/// Canonical text: one node per line, observers sorted.
pub fn serialize(network: &Network, scheme: Option<&ObservationScheme>) -> String {
    let mut out = String::new();
    writeln!(out, "nodes: {}", network.n()).unwrap();
    for (i, f) in network.functions().iter().enumerate() {
        writeln!(out, "x{} = {}", i + 1, format_function(f)).unwrap();
    }
    if let Some(s) = scheme {
        writeln!(out, "observe: {s}").unwrap();
    }
    out
}
