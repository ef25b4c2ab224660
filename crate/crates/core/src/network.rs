//! Reaction networks, the sequestration family `K(m,n)` and its fully open
//! extension, stoichiometry, and the plain-text reaction grammar.
//!
//! Grammar, one reaction per line:
//!
//! ```text
//! X1 + X2 -> 0 ; r1
//! X1 -> 2 X3 ; r3
//! 0 -> X2 ; r8
//! ```
//!
//! `0` is the zero complex and must be written out. Everything after `#` is a
//! comment, except the `# species: A B C` pragma which fixes species order.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Species {
    /// 1-based position in the network.
    pub index: usize,
    pub name: String,
}

/// A mass-action reaction. Complexes map 0-based species positions to
/// stoichiometric coefficients; absent species have coefficient zero.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reaction {
    pub reactants: BTreeMap<usize, u32>,
    pub products: BTreeMap<usize, u32>,
    /// The `j` of the rate constant `r_j`, 1-based.
    pub rate_index: usize,
}

impl Reaction {
    pub fn new(reactants: &[(usize, u32)], products: &[(usize, u32)], rate_index: usize) -> Self {
        let collect = |terms: &[(usize, u32)]| {
            let mut map = BTreeMap::new();
            for &(s, c) in terms {
                if c > 0 {
                    *map.entry(s).or_insert(0) += c;
                }
            }
            map
        };
        Self {
            reactants: collect(reactants),
            products: collect(products),
            rate_index,
        }
    }

    pub fn reactant_coeff(&self, species: usize) -> u32 {
        self.reactants.get(&species).copied().unwrap_or(0)
    }

    pub fn product_coeff(&self, species: usize) -> u32 {
        self.products.get(&species).copied().unwrap_or(0)
    }
}

/// Which member of the sequestration family a network is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequestrationTag {
    pub m: u32,
    pub n: usize,
    /// `true` for the fully open extension.
    pub open: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReactionNetwork {
    species: Vec<Species>,
    reactions: Vec<Reaction>,
    tag: Option<SequestrationTag>,
}

impl ReactionNetwork {
    /// Build a network from species names and reactions. Reactions are
    /// stored in rate-index order; the labels must be a permutation of
    /// `1..=reactions.len()`.
    pub fn new(names: Vec<String>, mut reactions: Vec<Reaction>) -> Result<Self> {
        let mut seen = HashMap::new();
        for (i, name) in names.iter().enumerate() {
            if seen.insert(name.clone(), i).is_some() {
                return Err(Error::InvalidParams(format!("duplicate species name {name}")));
            }
        }
        let s = names.len();
        for r in &reactions {
            if let Some(&bad) = r.reactants.keys().chain(r.products.keys()).find(|&&k| k >= s) {
                return Err(Error::Dimension {
                    expected: s,
                    found: bad + 1,
                });
            }
        }
        check_rate_labels(reactions.iter().map(|r| r.rate_index), reactions.len())?;
        reactions.sort_by_key(|r| r.rate_index);
        let species = names
            .into_iter()
            .enumerate()
            .map(|(i, name)| Species { index: i + 1, name })
            .collect();
        let mut net = Self {
            species,
            reactions,
            tag: None,
        };
        net.tag = detect_tag(&net);
        Ok(net)
    }

    pub fn species(&self) -> &[Species] {
        &self.species
    }

    pub fn reactions(&self) -> &[Reaction] {
        &self.reactions
    }

    pub fn tag(&self) -> Option<SequestrationTag> {
        self.tag
    }

    pub fn num_species(&self) -> usize {
        self.species.len()
    }

    pub fn num_reactions(&self) -> usize {
        self.reactions.len()
    }

    pub fn stoichiometric_matrix(&self) -> StoichiometricMatrix {
        let s = self.num_species();
        let entries = (0..s)
            .map(|i| {
                self.reactions
                    .iter()
                    .map(|r| r.product_coeff(i) as i64 - r.reactant_coeff(i) as i64)
                    .collect()
            })
            .collect();
        StoichiometricMatrix { entries }
    }

    /// JSON view with species referenced by name.
    pub fn to_json(&self) -> serde_json::Value {
        let complex = |c: &BTreeMap<usize, u32>| {
            c.iter()
                .map(|(&k, &v)| (self.species[k].name.clone(), serde_json::Value::from(v)))
                .collect::<serde_json::Map<_, _>>()
        };
        serde_json::json!({
            "schema": crate::SCHEMA,
            "species": self.species.iter().map(|s| s.name.clone()).collect::<Vec<_>>(),
            "reactions": self.reactions.iter().map(|r| serde_json::json!({
                "rate": r.rate_index,
                "reactants": complex(&r.reactants),
                "products": complex(&r.products),
            })).collect::<Vec<_>>(),
            "tag": self.tag,
        })
    }
}

fn default_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("X{i}")).collect()
}

/// The sequestration network `K(m,n)`: `Xi + X(i+1) -> 0` at rate `ri` for
/// `i = 1..n-1`, and `X1 -> m Xn` at rate `rn`. This is the labelling under
/// which the mass-action system has its usual tridiagonal-plus-corner form.
pub fn build_sequestration(m: u32, n: usize) -> Result<ReactionNetwork> {
    if m < 1 {
        return Err(Error::InvalidParams(format!("production factor m = {m} must be >= 1")));
    }
    if n < 2 {
        return Err(Error::InvalidParams(format!("order n = {n} must be >= 2")));
    }
    let mut reactions: Vec<Reaction> = (1..n)
        .map(|i| Reaction::new(&[(i - 1, 1), (i, 1)], &[], i))
        .collect();
    reactions.push(Reaction::new(&[(0, 1)], &[(n - 1, m)], n));
    Ok(ReactionNetwork {
        species: default_names(n)
            .into_iter()
            .enumerate()
            .map(|(i, name)| Species { index: i + 1, name })
            .collect(),
        reactions,
        tag: Some(SequestrationTag { m, n, open: false }),
    })
}

/// Append the outflows `Xi -> 0` (rates `r(n+i)`) and then the inflows
/// `0 -> Xi` (rates `r(2n+i)`).
pub fn fully_open_extension(net: &ReactionNetwork) -> Result<ReactionNetwork> {
    let tag = net.tag.ok_or(Error::NotSequestration)?;
    if tag.open {
        return Err(Error::Precondition("network is already fully open".into()));
    }
    let n = tag.n;
    let mut reactions = net.reactions.clone();
    for i in 0..n {
        reactions.push(Reaction::new(&[(i, 1)], &[], n + i + 1));
    }
    for i in 0..n {
        reactions.push(Reaction::new(&[], &[(i, 1)], 2 * n + i + 1));
    }
    Ok(ReactionNetwork {
        species: net.species.clone(),
        reactions,
        tag: Some(SequestrationTag { open: true, ..tag }),
    })
}

/// The fully open extension of `K(m,n)` in one call.
pub fn open_sequestration(m: u32, n: usize) -> Result<ReactionNetwork> {
    fully_open_extension(&build_sequestration(m, n)?)
}

fn detect_tag(net: &ReactionNetwork) -> Option<SequestrationTag> {
    let n = net.num_species();
    let production = net.reactions.get(n.checked_sub(1)?)?;
    let m = production.product_coeff(n - 1);
    let base = build_sequestration(m, n).ok()?;
    if net.reactions == base.reactions {
        return base.tag;
    }
    let open = fully_open_extension(&base).ok()?;
    (net.reactions == open.reactions).then_some(open.tag).flatten()
}

fn check_rate_labels(labels: impl Iterator<Item = usize>, count: usize) -> Result<()> {
    let mut seen = vec![false; count];
    for j in labels {
        if j == 0 || j > count {
            return Err(Error::RateLabels {
                count,
                message: format!("label r{j} out of range"),
            });
        }
        if std::mem::replace(&mut seen[j - 1], true) {
            return Err(Error::RateLabels {
                count,
                message: format!("label r{j} repeated"),
            });
        }
    }
    Ok(())
}

/// Integer stoichiometric matrix `N`, one column per reaction in rate order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StoichiometricMatrix {
    pub entries: Vec<Vec<i64>>,
}

impl StoichiometricMatrix {
    pub fn column(&self, j: usize) -> Vec<i64> {
        self.entries.iter().map(|row| row[j]).collect()
    }

    pub fn to_matrix(&self) -> Matrix<Rational> {
        Matrix::from_rows(
            self.entries
                .iter()
                .map(|row| row.iter().map(|&v| Rational::from_integer(v.into())).collect())
                .collect(),
        )
    }

    /// Exact rank by rational Gaussian elimination.
    pub fn rank(&self) -> usize {
        let mut a = self.to_matrix();
        let (rows, cols) = (a.rows(), a.cols());
        let mut rank = 0;
        for col in 0..cols {
            if rank == rows {
                break;
            }
            let Some(p) = (rank..rows).find(|&i| a[(i, col)] != Rational::from_integer(0.into()))
            else {
                continue;
            };
            a.swap_rows(p, rank);
            for i in rank + 1..rows {
                let f = a[(i, col)].clone() / a[(rank, col)].clone();
                for j in col..cols {
                    let v = a[(i, j)].clone() - f.clone() * a[(rank, j)].clone();
                    a[(i, j)] = v;
                }
            }
            rank += 1;
        }
        rank
    }
}

// ---------------------------------------------------------------------------
// text format

struct ParsedTerm {
    coeff: u32,
    name: String,
}

struct ParsedLine {
    line: usize,
    reactants: Vec<ParsedTerm>,
    products: Vec<ParsedTerm>,
    rate: usize,
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        column,
        message: message.into(),
    }
}

fn is_name_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_name_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Parse one side of a reaction. `offset` is the 1-based column of `text[0]`.
fn parse_complex(text: &str, line: usize, offset: usize) -> Result<Vec<ParsedTerm>> {
    if text.trim().is_empty() {
        return Err(syntax(
            line,
            offset,
            "empty complex (write 0 for the zero complex)",
        ));
    }
    if text.trim() == "0" {
        return Ok(Vec::new());
    }
    let mut terms = Vec::new();
    let mut start = 0;
    for piece in text.split('+') {
        let col = offset + start + (piece.len() - piece.trim_start().len());
        start += piece.len() + 1;
        let term = piece.trim();
        if term.is_empty() {
            return Err(syntax(line, col, "missing term around `+`"));
        }
        let digits: String = term.chars().take_while(char::is_ascii_digit).collect();
        let rest = term[digits.len()..].trim_start();
        let coeff = if digits.is_empty() {
            1
        } else {
            digits
                .parse::<u32>()
                .map_err(|_| syntax(line, col, "coefficient out of range"))?
        };
        if rest.is_empty() {
            let msg = if term == "0" {
                "the zero complex cannot be combined with other terms"
            } else {
                "expected a species name"
            };
            return Err(syntax(line, col, msg));
        }
        if coeff == 0 {
            return Err(syntax(line, col, "coefficient must be positive"));
        }
        let name_col = col + (term.len() - rest.len());
        let mut chars = rest.chars();
        if !chars.next().is_some_and(is_name_start) || !chars.all(is_name_char) {
            return Err(syntax(line, name_col, format!("invalid species name `{rest}`")));
        }
        terms.push(ParsedTerm {
            coeff,
            name: rest.to_string(),
        });
    }
    Ok(terms)
}

fn parse_line(raw: &str, line: usize) -> Result<Option<ParsedLine>> {
    let body = raw.split('#').next().unwrap_or("");
    if body.trim().is_empty() {
        return Ok(None);
    }
    let Some(arrow) = body.find("->") else {
        return Err(syntax(line, 1, "expected `->`"));
    };
    let Some(semi) = body.find(';') else {
        return Err(syntax(line, body.trim_end().len() + 1, "expected `; r<index>`"));
    };
    if semi < arrow {
        return Err(syntax(line, semi + 1, "rate label must follow the reaction"));
    }
    let lhs = &body[..arrow];
    let rhs = &body[arrow + 2..semi];
    let label = &body[semi + 1..];
    let reactants = parse_complex(lhs, line, 1)?;
    let products = parse_complex(rhs, line, arrow + 3)?;

    let label_col = semi + 2 + (label.len() - label.trim_start().len());
    let label = label.trim();
    let rate = label
        .strip_prefix('r')
        .filter(|d| !d.is_empty() && d.chars().all(|c| c.is_ascii_digit()))
        .and_then(|d| d.parse::<usize>().ok())
        .filter(|&j| j >= 1)
        .ok_or_else(|| syntax(line, label_col, format!("invalid rate label `{label}`")))?;
    Ok(Some(ParsedLine {
        line,
        reactants,
        products,
        rate,
    }))
}

fn species_pragma(raw: &str) -> Option<Vec<String>> {
    let comment = raw.split_once('#')?.1.trim();
    let list = comment.strip_prefix("species:")?;
    Some(list.split_whitespace().map(str::to_string).collect())
}

fn indexed_name(name: &str) -> Option<u64> {
    name.strip_prefix('X')
        .filter(|d| !d.is_empty() && d.chars().all(|c| c.is_ascii_digit()))
        .and_then(|d| d.parse().ok())
}

/// Species inferred when no pragma is present: `X1..Xk` up to the largest
/// index when every name has the form `X<k>`, otherwise first appearance.
fn infer_species_order(appearance: &[String]) -> Vec<String> {
    let mut names: Vec<String> = Vec::new();
    for n in appearance {
        if !names.contains(n) {
            names.push(n.clone());
        }
    }
    let indices: Option<Vec<u64>> = names.iter().map(|n| indexed_name(n)).collect();
    match indices {
        Some(idx) if !idx.is_empty() && !idx.contains(&0) => {
            let max = idx.into_iter().max().unwrap_or(0) as usize;
            default_names(max)
        }
        _ => names,
    }
}

pub fn parse_network(text: &str) -> Result<ReactionNetwork> {
    let mut declared: Option<Vec<String>> = None;
    let mut lines = Vec::new();
    let mut rate_lines: HashMap<usize, usize> = HashMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        if let Some(list) = species_pragma(raw) {
            declared = Some(list);
            continue;
        }
        if let Some(parsed) = parse_line(raw, line)? {
            if rate_lines.insert(parsed.rate, line).is_some() {
                return Err(Error::DuplicateRate {
                    line,
                    index: parsed.rate,
                });
            }
            lines.push(parsed);
        }
    }

    let names = match declared {
        Some(list) => {
            for l in &lines {
                if let Some(t) = l
                    .reactants
                    .iter()
                    .chain(&l.products)
                    .find(|t| !list.contains(&t.name))
                {
                    return Err(Error::UnknownSpecies {
                        line: l.line,
                        name: t.name.clone(),
                    });
                }
            }
            list
        }
        None => {
            let appearance: Vec<String> = lines
                .iter()
                .flat_map(|l| l.reactants.iter().chain(&l.products))
                .map(|t| t.name.clone())
                .collect();
            infer_species_order(&appearance)
        }
    };
    let position: HashMap<&str, usize> = names
        .iter()
        .enumerate()
        .map(|(i, n)| (n.as_str(), i))
        .collect();
    let resolve = |terms: &[ParsedTerm]| -> Vec<(usize, u32)> {
        terms.iter().map(|t| (position[t.name.as_str()], t.coeff)).collect()
    };
    let reactions = lines
        .iter()
        .map(|l| Reaction::new(&resolve(&l.reactants), &resolve(&l.products), l.rate))
        .collect();
    ReactionNetwork::new(names, reactions)
}

pub fn format_network(net: &ReactionNetwork) -> String {
    let names: Vec<String> = net.species.iter().map(|s| s.name.clone()).collect();
    let complex = |c: &BTreeMap<usize, u32>| {
        if c.is_empty() {
            return "0".to_string();
        }
        c.iter()
            .map(|(&s, &k)| {
                if k == 1 {
                    names[s].clone()
                } else {
                    format!("{k} {}", names[s])
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    };
    let appearance: Vec<String> = net
        .reactions
        .iter()
        .flat_map(|r| r.reactants.keys().chain(r.products.keys()))
        .map(|&s| names[s].clone())
        .collect();
    let mut out = String::new();
    if infer_species_order(&appearance) != names {
        let _ = writeln!(out, "# species: {}", names.join(" "));
    }
    for r in &net.reactions {
        let _ = writeln!(
            out,
            "{} -> {} ; r{}",
            complex(&r.reactants),
            complex(&r.products),
            r.rate_index
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k22_reactions() {
        let net = build_sequestration(2, 2).unwrap();
        assert_eq!(net.num_reactions(), 2);
        assert_eq!(net.reactions()[0], Reaction::new(&[(0, 1), (1, 1)], &[], 1));
        assert_eq!(net.reactions()[1], Reaction::new(&[(0, 1)], &[(1, 2)], 2));
        assert_eq!(format_network(&net), "X1 + X2 -> 0 ; r1\nX1 -> 2 X2 ; r2\n");
    }

    #[test]
    fn smallest_case() {
        let net = build_sequestration(1, 2).unwrap();
        assert_eq!(format_network(&net), "X1 + X2 -> 0 ; r1\nX1 -> X2 ; r2\n");
    }

    #[test]
    fn k65_first_reaction() {
        let net = build_sequestration(6, 5).unwrap();
        assert_eq!(net.num_reactions(), 5);
        assert_eq!(net.reactions()[4].product_coeff(4), 6);
        assert_eq!(net.reactions()[4].reactant_coeff(0), 1);
    }

    #[test]
    fn rejects_bad_orders() {
        assert!(build_sequestration(0, 3).is_err());
        assert!(build_sequestration(2, 1).is_err());
    }

    #[test]
    fn extension_counts_and_order() {
        assert_eq!(open_sequestration(2, 3).unwrap().num_reactions(), 9);
        let net = open_sequestration(6, 5).unwrap();
        assert_eq!(net.num_reactions(), 15);
        for (j, r) in net.reactions().iter().enumerate() {
            assert_eq!(r.rate_index, j + 1);
        }
        for i in 0..5 {
            assert_eq!(net.reactions()[5 + i], Reaction::new(&[(i, 1)], &[], 6 + i));
            assert_eq!(net.reactions()[10 + i], Reaction::new(&[], &[(i, 1)], 11 + i));
        }
    }

    #[test]
    fn extension_twice_fails() {
        let open = open_sequestration(2, 3).unwrap();
        assert!(fully_open_extension(&open).is_err());
        let other = parse_network("A -> B ; r1").unwrap();
        assert_eq!(fully_open_extension(&other), Err(Error::NotSequestration));
    }

    #[test]
    fn stoichiometry_columns() {
        let n = open_sequestration(2, 3).unwrap().stoichiometric_matrix();
        assert_eq!(n.column(2), vec![-1, 0, 2]);
        assert_eq!(n.column(0), vec![-1, -1, 0]);
        assert_eq!(n.column(4), vec![0, -1, 0]);
        assert_eq!(n.rank(), 3);
    }

    #[test]
    fn parse_single_reaction() {
        let net = parse_network("X1 -> 2 X3 ; r1").unwrap();
        assert_eq!(net.num_species(), 3);
        assert_eq!(net.num_reactions(), 1);
        let n = net.stoichiometric_matrix();
        assert_eq!(n.column(0), vec![-1, 0, 2]);
        assert_eq!(net.reactions()[0].reactant_coeff(0), 1);
        assert_eq!(net.reactions()[0].product_coeff(2), 2);
    }

    #[test]
    fn parse_inflow() {
        let net = parse_network("0 -> X2 ; r1\nX1 -> 0 ; r2").unwrap();
        assert!(net.reactions()[0].reactants.is_empty());
        assert_eq!(net.reactions()[0].product_coeff(1), 1);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            parse_network("X1 + X2 -> ; r2"),
            Err(Error::Syntax { line: 1, .. })
        ));
        assert!(matches!(
            parse_network("X1 -> X2 ; r1\nX2 -> X1 ; r1"),
            Err(Error::DuplicateRate { line: 2, index: 1 })
        ));
        assert!(matches!(
            parse_network("# species: A\nA -> B ; r1"),
            Err(Error::UnknownSpecies { line: 2, .. })
        ));
        assert!(matches!(parse_network("A -> B ; r2"), Err(Error::RateLabels { .. })));
        assert!(matches!(parse_network("A -> B"), Err(Error::Syntax { .. })));
        assert!(matches!(parse_network("A => B ; r1"), Err(Error::Syntax { .. })));
        assert!(matches!(parse_network("0 + A -> B ; r1"), Err(Error::Syntax { .. })));
        assert!(matches!(parse_network("A -> 2 ; r1"), Err(Error::Syntax { .. })));
    }

    #[test]
    fn syntax_error_column() {
        match parse_network("X1 -> X2 ; q1") {
            Err(Error::Syntax { line, column, .. }) => {
                assert_eq!(line, 1);
                assert_eq!(column, 12);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn parse_detects_tag() {
        let text = format_network(&open_sequestration(3, 5).unwrap());
        let net = parse_network(&text).unwrap();
        assert_eq!(
            net.tag(),
            Some(SequestrationTag {
                m: 3,
                n: 5,
                open: true
            })
        );
    }

    #[test]
    fn comments_and_pragma_round_trip() {
        let text = "# a comment\nB -> A ; r1   # trailing\n";
        let net = parse_network(text).unwrap();
        let formatted = format_network(&net);
        assert_eq!(parse_network(&formatted).unwrap(), net);

        let net = ReactionNetwork::new(
            vec!["B".into(), "A".into(), "C".into()],
            vec![Reaction::new(&[(1, 1)], &[(0, 2)], 1)],
        )
        .unwrap();
        let formatted = format_network(&net);
        assert!(formatted.starts_with("# species: B A C"));
        assert_eq!(parse_network(&formatted).unwrap(), net);
    }
}
