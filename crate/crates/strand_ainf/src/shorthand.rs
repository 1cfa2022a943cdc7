//! Array notation for tensors of homology classes.
//!
//! One row per pair, rows separated by `;` or newlines:
//!
//! ```text
//! P: * p'+ o p'- *; Q: * . * . *
//! ```
//!
//! `*` and `o` are the on and off idempotent circles between factors, and each
//! column lists the local steps a factor covers (`.` for none, `p±` for both
//! steps at `p`). Circles may be left out entirely, optionally with `|`
//! between columns; they are then inferred as the unique assignment making
//! every factor tight.

use thiserror::Error;

use crate::arc_diagram::{PairId, PairOrdering, Slot};
use crate::strand_core::local::{above_bit, below_bit};
use crate::strand_core::{Algebra, HData, LocalClass, LocalHData};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ShorthandError {
    #[error("row `{0}` has no `name:` prefix")]
    MissingName(String),
    #[error("unknown pair `{0}`")]
    UnknownPair(String),
    #[error("pair `{0}` has no row, or more than one")]
    RowCoverage(String),
    #[error("rows have different numbers of factors")]
    Ragged,
    #[error("row for `{pair}` does not alternate circles and columns")]
    Layout { pair: String },
    #[error("`{token}` is not a step next to a place of pair {pair}")]
    BadStep { pair: String, token: String },
    #[error("factor {factor} is not tight at pair {pair}")]
    NotTight { pair: String, factor: usize },
    #[error("idempotents at pair {pair} cannot be inferred ({count} choices)")]
    Inference { pair: String, count: usize },
    #[error("rows disagree about a step shared between fragments")]
    SharedStep,
    #[error("a tensor needs at least one factor")]
    Empty,
}

struct Row {
    pair: PairId,
    circles: Option<Vec<bool>>,
    columns: Vec<u8>,
}

fn parse_column(alg: &Algebra, pair: PairId, token: &str) -> Result<u8, ShorthandError> {
    let z = alg.arc_diagram();
    if token == "." {
        return Ok(0);
    }
    let mut bits = 0u8;
    for part in token.split(',') {
        let bad = || ShorthandError::BadStep {
            pair: z.pair(pair).name.clone(),
            token: part.to_string(),
        };
        let (name, mask): (&str, fn(Slot) -> u8) = if let Some(p) = part.strip_suffix("+-") {
            (p, |s| below_bit(s) | above_bit(s))
        } else if let Some(p) = part.strip_suffix('±') {
            (p, |s| below_bit(s) | above_bit(s))
        } else if let Some(p) = part.strip_suffix('+') {
            (p, above_bit)
        } else if let Some(p) = part.strip_suffix('-') {
            (p, below_bit)
        } else {
            return Err(bad());
        };
        let place = z.place_by_name(name).ok_or_else(bad)?;
        if z.place(place).pair != pair {
            return Err(bad());
        }
        bits |= mask(z.place(place).slot);
    }
    Ok(bits)
}

fn parse_row(alg: &Algebra, line: &str) -> Result<Row, ShorthandError> {
    let z = alg.arc_diagram();
    let (name, rest) = line
        .split_once(':')
        .ok_or_else(|| ShorthandError::MissingName(line.to_string()))?;
    let name = name.trim();
    let pair = z
        .pair_by_name(name)
        .ok_or_else(|| ShorthandError::UnknownPair(name.to_string()))?;
    let tokens: Vec<&str> = rest.split_whitespace().filter(|t| *t != "|").collect();
    let is_circle = |t: &str| t == "o" || t == "*";
    let layout = || ShorthandError::Layout { pair: name.to_string() };
    if tokens.first().is_some_and(|t| is_circle(t)) {
        if tokens.len() % 2 == 0 {
            return Err(layout());
        }
        let mut circles = Vec::new();
        let mut columns = Vec::new();
        for (i, t) in tokens.iter().enumerate() {
            if i % 2 == 0 {
                if !is_circle(t) {
                    return Err(layout());
                }
                circles.push(*t == "*");
            } else {
                if is_circle(t) {
                    return Err(layout());
                }
                columns.push(parse_column(alg, pair, t)?);
            }
        }
        Ok(Row {
            pair,
            circles: Some(circles),
            columns,
        })
    } else {
        if tokens.iter().any(|t| is_circle(t)) {
            return Err(layout());
        }
        let columns = tokens
            .iter()
            .map(|t| parse_column(alg, pair, t))
            .collect::<Result<_, _>>()?;
        Ok(Row {
            pair,
            circles: None,
            columns,
        })
    }
}

fn tight_local(bits: u8, s: bool, t: bool) -> bool {
    let class = LocalHData::new(bits, s, t).class();
    class.is_realizable() && !matches!(class, LocalClass::Once11(_))
}

/// All circle assignments making every column of a row tight.
fn infer_circles(columns: &[u8]) -> Vec<Vec<bool>> {
    let n = columns.len();
    (0u32..1 << (n + 1))
        .map(|mask| (0..=n).map(|i| mask >> i & 1 == 1).collect::<Vec<bool>>())
        .filter(|c| (0..n).all(|i| tight_local(columns[i], c[i], c[i + 1])))
        .collect()
}

pub fn parse_tensor(alg: &Algebra, text: &str) -> Result<Vec<HData>, ShorthandError> {
    let z = alg.arc_diagram();
    let mut rows: Vec<Option<Row>> = (0..alg.pair_count()).map(|_| None).collect();
    for line in text.split([';', '\n']).map(str::trim).filter(|l| !l.is_empty()) {
        let row = parse_row(alg, line)?;
        let slot = &mut rows[row.pair.0];
        if slot.is_some() {
            return Err(ShorthandError::RowCoverage(z.pair(row.pair).name.clone()));
        }
        *slot = Some(row);
    }
    let rows: Vec<Row> = rows
        .into_iter()
        .enumerate()
        .map(|(k, r)| r.ok_or_else(|| ShorthandError::RowCoverage(z.pair(PairId(k)).name.clone())))
        .collect::<Result<_, _>>()?;
    let n = rows[0].columns.len();
    if n == 0 {
        return Err(ShorthandError::Empty);
    }
    if rows.iter().any(|r| r.columns.len() != n) {
        return Err(ShorthandError::Ragged);
    }
    let mut factors = vec![HData::default(); n];
    for row in &rows {
        let name = || z.pair(row.pair).name.clone();
        let circles = match &row.circles {
            Some(c) => c.clone(),
            None => {
                let mut options = infer_circles(&row.columns);
                if options.len() != 1 {
                    return Err(ShorthandError::Inference {
                        pair: name(),
                        count: options.len(),
                    });
                }
                options.pop().expect("one option")
            }
        };
        for (i, &bits) in row.columns.iter().enumerate() {
            if !tight_local(bits, circles[i], circles[i + 1]) {
                return Err(ShorthandError::NotTight { pair: name(), factor: i + 1 });
            }
            let f = &mut factors[i];
            f.h |= alg.local_bits_to_global(row.pair, bits);
            f.s |= u32::from(circles[i]) << row.pair.0;
            f.t |= u32::from(circles[i + 1]) << row.pair.0;
        }
    }
    for row in &rows {
        for (i, &bits) in row.columns.iter().enumerate() {
            if alg.local_hdata(&factors[i], row.pair).bits != bits {
                return Err(ShorthandError::SharedStep);
            }
        }
    }
    Ok(factors)
}

fn column_text(alg: &Algebra, pair: PairId, bits: u8) -> String {
    let z = alg.arc_diagram();
    let mut parts = Vec::new();
    for slot in [Slot::First, Slot::Second] {
        let name = &z.place(z.place_of(pair, slot)).name;
        if bits & below_bit(slot) != 0 {
            parts.push(format!("{name}-"));
        }
        if bits & above_bit(slot) != 0 {
            parts.push(format!("{name}+"));
        }
    }
    if parts.is_empty() {
        ".".into()
    } else {
        parts.join(",")
    }
}

/// Prints a tensor with explicit circles, rows in ordering order.
pub fn format_tensor(alg: &Algebra, ord: &PairOrdering, m: &[HData]) -> String {
    let z = alg.arc_diagram();
    let circle = |on: bool| if on { "*" } else { "o" };
    ord.order()
        .iter()
        .map(|&p| {
            let mut line = format!("{}:", z.pair(p).name);
            for (i, h) in m.iter().enumerate() {
                let local = alg.local_hdata(h, p);
                if i == 0 {
                    line.push(' ');
                    line.push_str(circle(local.s));
                }
                line.push(' ');
                line.push_str(&column_text(alg, p, local.bits));
                line.push(' ');
                line.push_str(circle(local.t));
            }
            line
        })
        .collect::<Vec<_>>()
        .join("; ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arc_diagram::ArcDiagram;

    fn two_pair() -> Algebra {
        Algebra::new(ArcDiagram::disjoint_fragments(&["P", "Q"]))
    }

    #[test]
    fn explicit_circles_round_trip() {
        let alg = two_pair();
        let ord = PairOrdering::default_for(alg.arc_diagram());
        let text = "P: * p'+ o p'- *; Q: * . * . *";
        let m = parse_tensor(&alg, text).unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(format_tensor(&alg, &ord, &m), text);
    }

    #[test]
    fn circles_inferred_from_single_steps() {
        let alg = two_pair();
        let explicit = parse_tensor(&alg, "P: * p+ o p- * . *; Q: o q'- * q+ o q- *").unwrap();
        let inferred = parse_tensor(&alg, "P: p+ | p- | .\nQ: q'- | q+ | q-").unwrap();
        assert_eq!(explicit, inferred);
    }

    #[test]
    fn ambiguous_rows_are_rejected() {
        let alg = two_pair();
        let err = parse_tensor(&alg, "P: p+ p-; Q: . .").unwrap_err();
        assert!(matches!(err, ShorthandError::Inference { count: 2, .. }), "{err}");
    }

    #[test]
    fn once_occupied_all_on_factor_is_rejected() {
        let alg = two_pair();
        let err = parse_tensor(&alg, "P: * p± *; Q: * . *").unwrap_err();
        assert_eq!(err, ShorthandError::NotTight { pair: "P".into(), factor: 1 });
    }

    #[test]
    fn steps_must_belong_to_the_row() {
        let alg = two_pair();
        assert!(matches!(
            parse_tensor(&alg, "P: * q+ o; Q: * . *"),
            Err(ShorthandError::BadStep { .. })
        ));
        assert_eq!(parse_tensor(&alg, "P: * . *"), Err(ShorthandError::RowCoverage("Q".into())));
    }
}
