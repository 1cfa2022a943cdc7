//! Text form of diagrams and elements.
//!
//! A diagram is written pair by pair in ordering order, separated by `;`:
//! `P: 11 p-,p+ w; Q: 00 . u`. The two digits are membership in the initial
//! and final idempotents, then the covered local steps (`.` for none), then
//! the variant: `u`, `w`, `c`, `g<place>` or `c<pair>`. An element is `0` or
//! bracketed diagrams joined by ` + `.

use thiserror::Error;

use crate::arc_diagram::{PairId, PairOrdering, Slot};

use super::local::{above_bit, below_bit};
use super::{Algebra, Diagram, Element, HData, LocalHData, StrandError, Variant};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TextError {
    #[error("malformed diagram text `{0}`")]
    Malformed(String),
    #[error("unknown pair `{0}`")]
    UnknownPair(String),
    #[error("pair `{0}` given twice or not at all")]
    PairCoverage(String),
    #[error("`{token}` is not a step next to a place of pair {pair}")]
    BadStep { pair: String, token: String },
    #[error("unknown variant `{0}`")]
    BadVariant(String),
    #[error(transparent)]
    Strand(#[from] StrandError),
}

fn variant_name(alg: &Algebra, pair: PairId, v: Variant) -> String {
    let z = alg.arc_diagram();
    match v {
        Variant::U => "u".into(),
        Variant::W => "w".into(),
        Variant::C => "c".into(),
        Variant::G(slot) => format!("g{}", z.place(z.place_of(pair, slot)).name),
        Variant::CPair => format!("c{}", z.pair(pair).name),
    }
}

fn step_tokens(alg: &Algebra, pair: PairId, bits: u8) -> String {
    let z = alg.arc_diagram();
    let mut tokens = Vec::new();
    for slot in [Slot::First, Slot::Second] {
        let name = &z.place(z.place_of(pair, slot)).name;
        if bits & below_bit(slot) != 0 {
            tokens.push(format!("{name}-"));
        }
        if bits & above_bit(slot) != 0 {
            tokens.push(format!("{name}+"));
        }
    }
    if tokens.is_empty() {
        ".".into()
    } else {
        tokens.join(",")
    }
}

pub fn format_diagram(alg: &Algebra, ord: &PairOrdering, d: &Diagram) -> String {
    let z = alg.arc_diagram();
    ord.order()
        .iter()
        .map(|&p| {
            let local = alg.local(d, p);
            format!(
                "{}: {}{} {} {}",
                z.pair(p).name,
                u8::from(local.hd.s),
                u8::from(local.hd.t),
                step_tokens(alg, p, local.hd.bits),
                variant_name(alg, p, local.var)
            )
        })
        .collect::<Vec<_>>()
        .join("; ")
}

pub fn format_element(alg: &Algebra, ord: &PairOrdering, x: &Element) -> String {
    if x.is_zero() {
        return "0".into();
    }
    let mut terms: Vec<&Diagram> = x.iter().collect();
    terms.sort_by_key(|d| (d.hd, alg.basis_key(d, ord)));
    terms
        .iter()
        .map(|d| format!("[{}]", format_diagram(alg, ord, d)))
        .collect::<Vec<_>>()
        .join(" + ")
}

pub fn parse_diagram(alg: &Algebra, text: &str) -> Result<Diagram, TextError> {
    let z = alg.arc_diagram();
    let malformed = || TextError::Malformed(text.to_string());
    let mut hd = HData::default();
    let mut seen = vec![false; alg.pair_count()];
    let mut variants = Vec::new();
    for block in text.split(';').map(str::trim).filter(|b| !b.is_empty()) {
        let (name, rest) = block.split_once(':').ok_or_else(malformed)?;
        let pair = z
            .pair_by_name(name.trim())
            .ok_or_else(|| TextError::UnknownPair(name.trim().to_string()))?;
        if std::mem::replace(&mut seen[pair.0], true) {
            return Err(TextError::PairCoverage(name.trim().to_string()));
        }
        let fields: Vec<&str> = rest.split_whitespace().collect();
        let [idem, steps, var] = fields[..] else {
            return Err(malformed());
        };
        let (s, t) = match idem {
            "00" => (false, false),
            "01" => (false, true),
            "10" => (true, false),
            "11" => (true, true),
            _ => return Err(malformed()),
        };
        let mut bits = 0u8;
        if steps != "." {
            for token in steps.split(',') {
                let bad = || TextError::BadStep {
                    pair: z.pair(pair).name.clone(),
                    token: token.to_string(),
                };
                let (place, bit): (&str, fn(Slot) -> u8) = if let Some(p) = token.strip_suffix('-') {
                    (p, below_bit)
                } else if let Some(p) = token.strip_suffix('+') {
                    (p, above_bit)
                } else {
                    return Err(bad());
                };
                let id = z.place_by_name(place).ok_or_else(bad)?;
                if z.place(id).pair != pair {
                    return Err(bad());
                }
                bits |= bit(z.place(id).slot);
            }
        }
        let local = LocalHData::new(bits, s, t);
        let frag = z.fragment(pair);
        for k in 0..4 {
            if local.bits >> k & 1 == 1 {
                hd.h |= 1 << frag.steps[k].0;
            }
        }
        hd.s |= u32::from(s) << pair.0;
        hd.t |= u32::from(t) << pair.0;
        let v = match var {
            "u" => Variant::U,
            "w" => Variant::W,
            "c" => Variant::C,
            other => {
                if let Some(place) = other.strip_prefix('g').and_then(|p| z.place_by_name(p)) {
                    if z.place(place).pair != pair {
                        return Err(TextError::BadVariant(other.to_string()));
                    }
                    Variant::G(z.place(place).slot)
                } else if other.strip_prefix('c') == Some(z.pair(pair).name.as_str()) {
                    Variant::CPair
                } else {
                    return Err(TextError::BadVariant(other.to_string()));
                }
            }
        };
        variants.push((pair, v));
    }
    if let Some(k) = seen.iter().position(|s| !s) {
        return Err(TextError::PairCoverage(z.pair(PairId(k)).name.clone()));
    }
    Ok(alg.diagram(hd, &variants)?)
}

pub fn parse_element(alg: &Algebra, text: &str) -> Result<Element, TextError> {
    let text = text.trim();
    if text == "0" {
        return Ok(Element::zero());
    }
    let mut diagrams = Vec::new();
    let mut rest = text;
    loop {
        let open = rest.find('[').ok_or_else(|| TextError::Malformed(rest.to_string()))?;
        if !rest[..open].trim().is_empty() {
            return Err(TextError::Malformed(rest.to_string()));
        }
        let close = rest.find(']').ok_or_else(|| TextError::Malformed(rest.to_string()))?;
        diagrams.push(parse_diagram(alg, &rest[open + 1..close])?);
        rest = rest[close + 1..].trim_start();
        if rest.is_empty() {
            break;
        }
        rest = rest
            .strip_prefix('+')
            .ok_or_else(|| TextError::Malformed(rest.to_string()))?;
    }
    Ok(Element::from_terms(diagrams))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arc_diagram::ArcDiagram;

    #[test]
    fn round_trip_every_diagram() {
        let alg = Algebra::new(ArcDiagram::disjoint_fragments(&["P", "Q"]));
        let ord = PairOrdering::default_for(alg.arc_diagram());
        for d in alg.all_diagrams() {
            let text = format_diagram(&alg, &ord, &d);
            assert_eq!(parse_diagram(&alg, &text).unwrap(), d, "{text}");
        }
    }

    #[test]
    fn element_round_trip() {
        let alg = Algebra::new(ArcDiagram::disjoint_fragments(&["P"]));
        let ord = PairOrdering::default_for(alg.arc_diagram());
        let x = parse_element(&alg, "[P: 11 p-,p+,p'-,p'+ gp] + [P: 11 p-,p+,p'-,p'+ gp']").unwrap();
        assert_eq!(x.len(), 2);
        assert_eq!(
            format_element(&alg, &ord, &x),
            "[P: 11 p-,p+,p'-,p'+ gp] + [P: 11 p-,p+,p'-,p'+ gp']"
        );
        let c = parse_element(&alg, "[P: 11 p-,p+,p'-,p'+ cP]").unwrap();
        assert_eq!(alg.d(&c), x);
        assert_eq!(parse_element(&alg, "0").unwrap(), Element::zero());
    }
}
