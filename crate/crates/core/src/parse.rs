//! Line-oriented text format for reaction networks.
//!
//! ```text
//! # comment
//! species: X, Y, Z            # optional, fixes ordering
//! 2 X + Y -> 3 X ; k = 6
//! X <-> 0 ; kf = 11, kr = 6   # expands to two reactions
//! X + Y -> 2 Y ; k = 1, exp: X = 1.0, Y = 1.0
//! ```
//!
//! Coefficients are nonnegative decimals or fractions (`3/2`); `0` is the
//! empty complex. A reversible arrow yields the forward reaction followed by
//! the reverse one. `exp:` overrides power-law exponents of the forward
//! reaction, `exp_r:` those of the reverse reaction.

use std::fmt::Write as _;

use num_traits::Signed;

use crate::error::ParseError;
use crate::network::{Complex, Crn, Reaction};
use crate::rational::{self, Rational};

/// Optional kinetic annotations attached to one parsed reaction.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ReactionKinetics {
    pub rate: Option<f64>,
    /// (species index, exponent) overrides; other species keep mass-action
    /// exponents.
    pub exponents: Vec<(usize, f64)>,
}

/// A network together with whatever rate data the file carried.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkFile {
    pub crn: Crn,
    pub kinetics: Vec<ReactionKinetics>,
}

impl NetworkFile {
    pub fn bare(crn: Crn) -> Self {
        let kinetics = vec![ReactionKinetics::default(); crn.num_reactions()];
        Self { crn, kinetics }
    }

    /// Rate constants from the file, if every reaction carries one.
    pub fn rate_constants(&self) -> Option<Vec<f64>> {
        self.kinetics.iter().map(|k| k.rate).collect()
    }
}

pub fn parse_network(text: &str) -> Result<Crn, ParseError> {
    parse_network_file(text).map(|f| f.crn)
}

struct PendingExponent {
    reaction: usize,
    species: String,
    value: f64,
    line: usize,
    column: usize,
}

struct Parser {
    species: Vec<String>,
    reactions: Vec<Reaction>,
    kinetics: Vec<ReactionKinetics>,
    pending: Vec<PendingExponent>,
    header_seen: bool,
}

fn err(line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        column,
        message: message.into(),
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Splits on `sep`, yielding each piece with its byte offset in `s`.
fn split_with_offsets(s: &str, sep: char) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        if ch == sep {
            out.push((start, &s[start..i]));
            start = i + ch.len_utf8();
        }
    }
    out.push((start, &s[start..]));
    out
}

/// Trims and returns the offset of the first kept byte.
fn trim_offset(offset: usize, s: &str) -> (usize, &str) {
    let lead = s.len() - s.trim_start().len();
    (offset + lead, s.trim())
}

impl Parser {
    fn species_id(&mut self, name: &str) -> usize {
        match self.species.iter().position(|s| s == name) {
            Some(i) => i,
            None => {
                self.species.push(name.to_string());
                self.species.len() - 1
            }
        }
    }

    fn parse_complex(
        &mut self,
        text: &str,
        line: usize,
        col: usize,
    ) -> Result<Complex, ParseError> {
        let (col, text) = trim_offset(col, text);
        if text.is_empty() {
            return Err(err(
                line,
                col,
                "empty complex (use `0` for the empty complex)",
            ));
        }
        if text == "0" {
            return Ok(Complex::empty());
        }
        let mut terms = Vec::new();
        for (off, term) in split_with_offsets(text, '+') {
            let (tcol, term) = trim_offset(col + off, term);
            if term.is_empty() {
                return Err(err(line, tcol, "missing term around `+`"));
            }
            if term == "0" {
                continue;
            }
            let split = term
                .find(|c: char| !(c.is_ascii_digit() || c == '.' || c == '/' || c == '-'))
                .unwrap_or(term.len());
            let (coef_text, name) = (&term[..split], term[split..].trim_start());
            let coeff = if coef_text.is_empty() {
                rational::one()
            } else {
                let q = rational::parse_rational(coef_text)
                    .ok_or_else(|| err(line, tcol, format!("invalid coefficient `{coef_text}`")))?;
                if q.is_negative() {
                    return Err(err(
                        line,
                        tcol,
                        format!("negative coefficient `{coef_text}`"),
                    ));
                }
                q
            };
            if !is_identifier(name) {
                let ncol = tcol + (term.len() - name.len());
                return Err(err(
                    line,
                    ncol,
                    format!("expected species name, found `{name}`"),
                ));
            }
            let id = self.species_id(name);
            terms.push((id, coeff));
        }
        Complex::new(terms).map_err(|e| err(line, col, e.to_string()))
    }

    fn parse_header(&mut self, rest: &str, line: usize, col: usize) -> Result<(), ParseError> {
        if self.header_seen {
            return Err(err(line, col, "duplicate `species:` header"));
        }
        if !self.reactions.is_empty() || !self.species.is_empty() {
            return Err(err(
                line,
                col,
                "`species:` header must precede all reactions",
            ));
        }
        self.header_seen = true;
        for (off, name) in split_with_offsets(rest, ',') {
            let (ncol, name) = trim_offset(col + off, name);
            if name.is_empty() && rest.trim().is_empty() {
                break;
            }
            if !is_identifier(name) {
                return Err(err(line, ncol, format!("invalid species name `{name}`")));
            }
            if self.species.iter().any(|s| s == name) {
                return Err(err(
                    line,
                    ncol,
                    format!("duplicate species `{name}` in header"),
                ));
            }
            self.species.push(name.to_string());
        }
        Ok(())
    }

    fn parse_params(
        &mut self,
        text: &str,
        line: usize,
        col: usize,
        reversible: bool,
    ) -> Result<(ReactionKinetics, ReactionKinetics), ParseError> {
        #[derive(PartialEq)]
        enum Mode {
            Rates,
            Forward,
            Reverse,
        }
        let mut fwd = ReactionKinetics::default();
        let mut rev = ReactionKinetics::default();
        let mut mode = Mode::Rates;
        let base = self.reactions.len();
        for (off, item) in split_with_offsets(text, ',') {
            let (icol, mut item) = trim_offset(col + off, item);
            let mut icol = icol;
            for (prefix, m) in [("exp_r:", Mode::Reverse), ("exp:", Mode::Forward)] {
                if let Some(rest) = item.strip_prefix(prefix) {
                    if m == Mode::Reverse && !reversible {
                        return Err(err(line, icol, "`exp_r:` requires a reversible reaction"));
                    }
                    mode = m;
                    let (c, r) = trim_offset(icol + prefix.len(), rest);
                    icol = c;
                    item = r;
                    break;
                }
            }
            if item.is_empty() {
                if mode == Mode::Rates {
                    return Err(err(line, icol, "empty parameter"));
                }
                continue;
            }
            let (key, value) = item.split_once('=').ok_or_else(|| {
                err(
                    line,
                    icol,
                    format!("expected `name = value`, found `{item}`"),
                )
            })?;
            let (key, value) = (key.trim(), value.trim());
            let number: f64 = value
                .parse()
                .map_err(|_| err(line, icol, format!("invalid number `{value}`")))?;
            if !number.is_finite() {
                return Err(err(line, icol, format!("non-finite number `{value}`")));
            }
            let rate_slot = match (key, reversible) {
                ("k", false) | ("kf", true) => Some(&mut fwd.rate),
                ("kr", true) => Some(&mut rev.rate),
                ("k" | "kf" | "kr", _) => {
                    return Err(err(
                        line,
                        icol,
                        format!("rate key `{key}` does not fit this arrow"),
                    ))
                }
                _ => None,
            };
            if let Some(slot) = rate_slot {
                if number <= 0.0 {
                    return Err(err(line, icol, "rate constants must be positive"));
                }
                *slot = Some(number);
                mode = Mode::Rates;
                continue;
            }
            let reaction = match mode {
                Mode::Rates => return Err(err(line, icol, format!("unknown parameter `{key}`"))),
                Mode::Forward => base,
                Mode::Reverse => base + 1,
            };
            if !is_identifier(key) {
                return Err(err(line, icol, format!("invalid species name `{key}`")));
            }
            self.pending.push(PendingExponent {
                reaction,
                species: key.to_string(),
                value: number,
                line,
                column: icol,
            });
        }
        Ok((fwd, rev))
    }

    fn parse_line(&mut self, raw: &str, line: usize) -> Result<(), ParseError> {
        let body = raw.split('#').next().unwrap_or("");
        if body.trim().is_empty() {
            return Ok(());
        }
        let (col0, trimmed) = trim_offset(1, body);
        if let Some(rest) = trimmed.strip_prefix("species:") {
            return self.parse_header(rest, line, col0 + "species:".len());
        }
        let (reaction_part, params) = match body.split_once(';') {
            Some((r, p)) => (r, Some((r.len() + 1, p))),
            None => (body, None),
        };
        let (arrow_at, arrow, reversible) = if let Some(i) = reaction_part.find("<->") {
            (i, "<->", true)
        } else if let Some(i) = reaction_part.find("->") {
            (i, "->", false)
        } else {
            return Err(err(line, col0, "expected `->` or `<->`"));
        };
        let lhs = &reaction_part[..arrow_at];
        let rhs = &reaction_part[arrow_at + arrow.len()..];
        if rhs.contains("->") {
            return Err(err(line, 1 + arrow_at + arrow.len(), "more than one arrow"));
        }
        let reactant = self.parse_complex(lhs, line, 1)?;
        let product = self.parse_complex(rhs, line, 1 + arrow_at + arrow.len())?;
        if reactant == product {
            return Err(err(
                line,
                col0,
                "reactant and product complexes are identical",
            ));
        }
        let (fwd, rev) = match params {
            Some((off, p)) => self.parse_params(p, line, 1 + off, reversible)?,
            None => Default::default(),
        };
        self.reactions.push(Reaction {
            reactant: reactant.clone(),
            product: product.clone(),
        });
        self.kinetics.push(fwd);
        if reversible {
            self.reactions.push(Reaction {
                reactant: product,
                product: reactant,
            });
            self.kinetics.push(rev);
        }
        Ok(())
    }
}

/// Parses the text format, keeping rate constants and exponent overrides.
pub fn parse_network_file(text: &str) -> Result<NetworkFile, ParseError> {
    let mut p = Parser {
        species: Vec::new(),
        reactions: Vec::new(),
        kinetics: Vec::new(),
        pending: Vec::new(),
        header_seen: false,
    };
    for (i, raw) in text.lines().enumerate() {
        p.parse_line(raw, i + 1)?;
    }
    if p.reactions.is_empty() {
        return Err(err(1, 1, "network has no reactions"));
    }
    for e in std::mem::take(&mut p.pending) {
        let idx = p
            .species
            .iter()
            .position(|s| *s == e.species)
            .ok_or_else(|| err(e.line, e.column, format!("unknown species `{}`", e.species)))?;
        let overrides = &mut p.kinetics[e.reaction].exponents;
        overrides.retain(|(s, _)| *s != idx);
        overrides.push((idx, e.value));
    }
    for k in &mut p.kinetics {
        k.exponents.sort_by_key(|(s, _)| *s);
    }
    let crn = Crn::new(p.species, p.reactions).map_err(|e| err(1, 1, e.to_string()))?;
    Ok(NetworkFile {
        crn,
        kinetics: p.kinetics,
    })
}

fn format_complex(crn: &Crn, c: &Complex) -> String {
    if c.is_empty() {
        return "0".into();
    }
    c.terms()
        .map(|(s, q): (usize, &Rational)| {
            if *q == rational::one() {
                crn.species()[s].clone()
            } else {
                format!("{} {}", rational::format_rational(q), crn.species()[s])
            }
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

/// Canonical text: always a `species:` header, one irreversible reaction
/// per line.
pub fn serialize_network(file: &NetworkFile) -> String {
    let crn = &file.crn;
    let mut out = String::new();
    let _ = writeln!(out, "species: {}", crn.species().join(", "));
    for (j, r) in crn.reactions().iter().enumerate() {
        let _ = write!(
            out,
            "{} -> {}",
            format_complex(crn, &r.reactant),
            format_complex(crn, &r.product)
        );
        let kin = file.kinetics.get(j).cloned().unwrap_or_default();
        let mut params = Vec::new();
        if let Some(k) = kin.rate {
            params.push(format!("k = {k:?}"));
        }
        if !kin.exponents.is_empty() {
            let exps: Vec<String> = kin
                .exponents
                .iter()
                .map(|(s, v)| format!("{} = {v:?}", crn.species()[*s]))
                .collect();
            params.push(format!("exp: {}", exps.join(", ")));
        }
        if !params.is_empty() {
            let _ = write!(out, " ; {}", params.join(", "));
        }
        out.push('\n');
    }
    out
}
