//! Trace expressions: `one`, `delta`, `irr:i`, and convex sums such as
//! `1/4*irr:1+3/4*irr:6` or `0.5*one+0.5*delta`.

use std::sync::Arc;

use num_rational::Ratio;
use tracelab_core::trace::{convex_combine_exact, normalized_character};
use tracelab_core::{CharacterTable, Error, GroupHandle, Result, Trace};

#[derive(Clone, Debug, PartialEq)]
pub enum Atom {
    One,
    Delta,
    Irr(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceSpec {
    pub terms: Vec<(Ratio<i64>, Atom)>,
}

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidTrace(msg.into())
}

fn parse_weight(s: &str) -> Result<Ratio<i64>> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: i64 = n.trim().parse().map_err(|_| bad(format!("weight `{s}`")))?;
        let d: i64 = d.trim().parse().map_err(|_| bad(format!("weight `{s}`")))?;
        if d == 0 {
            return Err(bad("zero denominator"));
        }
        return Ok(Ratio::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.len() > 12 || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad(format!("weight `{s}`")));
        }
        let scale = 10i64.pow(frac.len() as u32);
        let whole: i64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad(format!("weight `{s}`")))? };
        let part: i64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad(format!("weight `{s}`")))? };
        return Ok(Ratio::new(whole * scale + part, scale));
    }
    s.parse::<i64>().map(Ratio::from_integer).map_err(|_| bad(format!("weight `{s}`")))
}

fn parse_atom(s: &str) -> Result<Atom> {
    match s.trim() {
        "one" => Ok(Atom::One),
        "delta" => Ok(Atom::Delta),
        other => {
            let i = other
                .strip_prefix("irr:")
                .and_then(|i| i.parse().ok())
                .ok_or_else(|| bad(format!("unknown trace `{other}`")))?;
            Ok(Atom::Irr(i))
        }
    }
}

impl std::str::FromStr for TraceSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut terms = Vec::new();
        for part in s.split('+') {
            let (w, atom) = match part.split_once('*') {
                Some((w, a)) => (parse_weight(w)?, parse_atom(a)?),
                None => (Ratio::from_integer(1), parse_atom(part)?),
            };
            terms.push((w, atom));
        }
        let total: Ratio<i64> = terms.iter().map(|t| t.0).sum();
        if terms.iter().any(|t| t.0 < Ratio::from_integer(0)) || total != Ratio::from_integer(1) {
            return Err(bad(format!("weights of `{s}` must be nonnegative and sum to 1")));
        }
        Ok(TraceSpec { terms })
    }
}

impl TraceSpec {
    pub fn build(&self, group: &Arc<GroupHandle>, table: &CharacterTable) -> Result<Trace> {
        let atoms = self
            .terms
            .iter()
            .map(|(_, a)| match a {
                Atom::One => Ok(Trace::one(group.clone())),
                Atom::Delta => Ok(Trace::delta(group.clone())),
                Atom::Irr(i) if *i < table.len() => normalized_character(group.clone(), table, *i),
                Atom::Irr(i) => Err(bad(format!("irr:{i} but the table has {} rows", table.len()))),
            })
            .collect::<Result<Vec<_>>>()?;
        if atoms.len() == 1 {
            return Ok(atoms.into_iter().next().unwrap());
        }
        let weights: Vec<Ratio<i64>> = self.terms.iter().map(|t| t.0).collect();
        let refs: Vec<&Trace> = atoms.iter().collect();
        convex_combine_exact(&weights, &refs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grammar() {
        let s: TraceSpec = "irr:6".parse().unwrap();
        assert_eq!(s.terms, vec![(Ratio::from_integer(1), Atom::Irr(6))]);
        let s: TraceSpec = "1/4*irr:1+3/4*irr:6".parse().unwrap();
        assert_eq!(s.terms[0], (Ratio::new(1, 4), Atom::Irr(1)));
        let s: TraceSpec = "0.5*one+0.5*delta".parse().unwrap();
        assert_eq!(s.terms[1], (Ratio::new(1, 2), Atom::Delta));
        assert!("0.5*one".parse::<TraceSpec>().is_err());
        assert!("irr:x".parse::<TraceSpec>().is_err());
        assert!("2*one+-1*delta".parse::<TraceSpec>().is_err());
        assert!("sin".parse::<TraceSpec>().is_err());
    }
}
