//! Reaction DSL: `label: 2 A + B -> C`, one reaction per line or separated
//! by `;`. Labels are optional, `0` is the empty complex, `#` starts a
//! comment. Coefficients are positive rationals and may be glued to the
//! species name (`2X`).

use std::collections::{BTreeMap, HashMap};

use super::{Reaction, ReactionNetwork};
use crate::error::{Error, Result};
use crate::io::{format_rational, parse_rational};
use crate::linalg::Rational;

/// A slice of the input with its 1-based line and 0-based byte offset.
#[derive(Clone, Copy)]
struct Span<'a> {
    text: &'a str,
    line: usize,
    offset: usize,
}

impl<'a> Span<'a> {
    fn trim(self) -> Span<'a> {
        let start = self.text.len() - self.text.trim_start().len();
        Span {
            text: self.text.trim(),
            line: self.line,
            offset: self.offset + start,
        }
    }

    fn split_at(self, at: usize, skip: usize) -> (Span<'a>, Span<'a>) {
        (
            Span { text: &self.text[..at], ..self },
            Span {
                text: &self.text[at + skip..],
                line: self.line,
                offset: self.offset + at + skip,
            },
        )
    }

    fn split(self, pat: char) -> Vec<Span<'a>> {
        let mut out = Vec::new();
        let mut rest = self;
        while let Some(p) = rest.text.find(pat) {
            let (head, tail) = rest.split_at(p, pat.len_utf8());
            out.push(head);
            rest = tail;
        }
        out.push(rest);
        out
    }

    fn error(&self, line_text: &str, message: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line,
            column: line_text[..self.offset].chars().count() + 1,
            message: message.into(),
        }
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_alphabetic() || c == '_')
        && chars.all(|c| c.is_alphanumeric() || c == '_')
}

struct Parser<'a> {
    line_text: &'a str,
    species: &'a mut Vec<String>,
    index: &'a mut HashMap<String, usize>,
}

impl Parser<'_> {
    fn complex(&mut self, span: Span<'_>) -> Result<BTreeMap<usize, Rational>> {
        let span = span.trim();
        if span.text.is_empty() {
            return Err(span.error(self.line_text, "empty complex (write 0 for the empty complex)"));
        }
        let mut out = BTreeMap::new();
        if span.text == "0" {
            return Ok(out);
        }
        for term in span.split('+') {
            let term = term.trim();
            if term.text.is_empty() {
                return Err(term.error(self.line_text, "missing term"));
            }
            let digits = term
                .text
                .find(|c: char| !(c.is_ascii_digit() || c == '/'))
                .unwrap_or(term.text.len());
            let (coeff_span, name_span) = term.split_at(digits, 0);
            let name_span = name_span.trim();
            let coeff = if coeff_span.text.is_empty() {
                Rational::from(1)
            } else {
                let q = parse_rational(coeff_span.text)
                    .map_err(|_| coeff_span.error(self.line_text, "invalid coefficient"))?;
                if q.cmp0().is_le() {
                    return Err(coeff_span.error(self.line_text, "coefficient must be positive"));
                }
                q
            };
            if name_span.text.is_empty() {
                let msg = if term.text == "0" {
                    "0 denotes the empty complex and cannot be combined with species"
                } else {
                    "missing species name"
                };
                return Err(name_span.error(self.line_text, msg));
            }
            if !is_identifier(name_span.text) {
                return Err(name_span.error(
                    self.line_text,
                    format!("invalid species name {:?}", name_span.text),
                ));
            }
            let next = self.species.len();
            let i = *self.index.entry(name_span.text.to_string()).or_insert(next);
            if i == next {
                self.species.push(name_span.text.to_string());
            }
            *out.entry(i).or_insert_with(Rational::new) += coeff;
        }
        Ok(out)
    }
}

struct RawReaction {
    label: Option<String>,
    line: usize,
    column: usize,
    reactant: BTreeMap<usize, Rational>,
    product: BTreeMap<usize, Rational>,
}

pub fn parse_network(text: &str) -> Result<ReactionNetwork> {
    let mut species = Vec::new();
    let mut index = HashMap::new();
    let mut raw = Vec::new();

    for (ln, line_text) in text.lines().enumerate() {
        let content = line_text.split('#').next().unwrap_or("");
        let whole = Span { text: content, line: ln + 1, offset: 0 };
        for stmt in whole.split(';') {
            let stmt = stmt.trim();
            if stmt.text.is_empty() {
                continue;
            }
            let Some(arrow) = stmt.text.find("->") else {
                return Err(stmt.error(line_text, "expected '->'"));
            };
            let (lhs, rhs) = stmt.split_at(arrow, 2);
            if rhs.text.contains("->") {
                return Err(rhs.error(line_text, "more than one '->'"));
            }
            let (label, lhs) = match lhs.text.find(':') {
                Some(p) => {
                    let (l, rest) = lhs.split_at(p, 1);
                    let l = l.trim();
                    if l.text.is_empty() || l.text.contains(char::is_whitespace) {
                        return Err(l.error(line_text, "invalid reaction label"));
                    }
                    (Some(l.text.to_string()), rest)
                }
                None => (None, lhs),
            };
            if rhs.text.contains(':') {
                return Err(rhs.error(line_text, "unexpected ':'"));
            }
            let mut p = Parser { line_text, species: &mut species, index: &mut index };
            let reactant = p.complex(lhs)?;
            let product = p.complex(rhs)?;
            raw.push(RawReaction {
                label,
                line: stmt.line,
                column: line_text[..stmt.offset].chars().count() + 1,
                reactant,
                product,
            });
        }
    }

    if raw.is_empty() {
        return Err(Error::Parse { line: 1, column: 1, message: "no reactions".into() });
    }
    let n = species.len();
    if n == 0 {
        return Err(Error::Parse {
            line: raw[0].line,
            column: raw[0].column,
            message: "network has no species".into(),
        });
    }

    let mut seen = HashMap::new();
    let mut reactions = Vec::with_capacity(raw.len());
    for (j, r) in raw.into_iter().enumerate() {
        let label = r.label.unwrap_or_else(|| format!("r{}", j + 1));
        if seen.insert(label.clone(), j).is_some() {
            return Err(Error::Parse {
                line: r.line,
                column: r.column,
                message: format!("duplicate reaction label {label:?}"),
            });
        }
        let dense = |m: &BTreeMap<usize, Rational>| -> Vec<Rational> {
            (0..n).map(|i| m.get(&i).cloned().unwrap_or_default()).collect()
        };
        reactions.push(Reaction {
            label,
            reactant: dense(&r.reactant),
            product: dense(&r.product),
        });
    }
    ReactionNetwork::new(species, reactions)
}

fn render_complex(species: &[String], c: &[Rational]) -> String {
    let terms: Vec<String> = species
        .iter()
        .zip(c)
        .filter(|(_, q)| q.cmp0().is_gt())
        .map(|(s, q)| {
            if *q == 1 {
                s.clone()
            } else {
                format!("{} {s}", format_rational(q))
            }
        })
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

/// The network in the DSL, one labelled reaction per line. Species that
/// occur in no complex are lost.
pub fn render(net: &ReactionNetwork) -> String {
    let mut out = String::new();
    for r in net.reactions() {
        out.push_str(&format!(
            "{}: {} -> {}\n",
            r.label,
            render_complex(net.species(), &r.reactant),
            render_complex(net.species(), &r.product)
        ));
    }
    out
}

/// Kinetic-order overrides: `{"label": {"species": "p/q", ...}, ...}`.
/// Listed entries replace the mass-action order; the rest are kept.
pub fn parse_kinetic_orders(net: &ReactionNetwork, text: &str) -> Result<ReactionNetwork> {
    let value: BTreeMap<String, BTreeMap<String, String>> = serde_json::from_str(text)
        .map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
    let mut v = net.kinetic_orders();
    for (label, row) in &value {
        let j = net
            .reactions()
            .iter()
            .position(|r| &r.label == label)
            .ok_or_else(|| Error::Invalid(format!("unknown reaction label {label:?}")))?;
        for (name, entry) in row {
            let i = net
                .species()
                .iter()
                .position(|s| s == name)
                .ok_or_else(|| Error::UnknownSpecies(name.clone()))?;
            v[(j, i)] = parse_rational(entry)?;
        }
    }
    net.clone().with_kinetic_orders(v)
}
