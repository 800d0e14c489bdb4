use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Group family plus parameters, in the textual form used on the command line
/// and as cache keys: `sl(2,13)`, `aff(2,3)`, `cyclic(12)`, `abelian(3,3)`, `q8`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum GroupDescriptor {
    /// `SL(d, ℤ/m)`.
    SpecialLinear { d: usize, modulus: u32 },
    /// `SL(d, ℤ/m) ⋉ (ℤ/m)^d`.
    Affine { d: usize, modulus: u32 },
    Cyclic(u32),
    /// Direct product of cyclic groups.
    Abelian(Vec<u32>),
    Quaternion,
    /// A group given by an explicit multiplication table, identified by name.
    Table(String),
}

impl GroupDescriptor {
    pub fn sl(d: usize, modulus: u32) -> Self {
        GroupDescriptor::SpecialLinear { d, modulus }
    }

    pub fn aff(d: usize, modulus: u32) -> Self {
        GroupDescriptor::Affine { d, modulus }
    }

    pub fn modulus(&self) -> Option<u32> {
        match self {
            GroupDescriptor::SpecialLinear { modulus, .. } | GroupDescriptor::Affine { modulus, .. } => {
                Some(*modulus)
            }
            _ => None,
        }
    }

    pub fn matrix_dim(&self) -> Option<usize> {
        match self {
            GroupDescriptor::SpecialLinear { d, .. } | GroupDescriptor::Affine { d, .. } => Some(*d),
            _ => None,
        }
    }

    /// Cyclic factors of an abelian descriptor.
    pub fn abelian_factors(&self) -> Option<Vec<u32>> {
        match self {
            GroupDescriptor::Cyclic(n) => Some(vec![*n]),
            GroupDescriptor::Abelian(ns) => Some(ns.clone()),
            _ => None,
        }
    }

    /// Order predicted from the family formula, when one is known.
    pub fn expected_order(&self) -> Option<u128> {
        match self {
            GroupDescriptor::SpecialLinear { d, modulus } => Some(sl_order(*d, *modulus)),
            GroupDescriptor::Affine { d, modulus } => {
                Some(sl_order(*d, *modulus) * (*modulus as u128).pow(*d as u32))
            }
            GroupDescriptor::Cyclic(n) => Some(*n as u128),
            GroupDescriptor::Abelian(ns) => Some(ns.iter().map(|&n| n as u128).product()),
            GroupDescriptor::Quaternion => Some(8),
            GroupDescriptor::Table(_) => None,
        }
    }

    /// File-name friendly form of the descriptor.
    pub fn sanitized(&self) -> String {
        self.to_string()
            .chars()
            .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
            .collect::<String>()
            .trim_end_matches('_')
            .to_string()
    }
}

/// `|SL_d(ℤ/m)| = Π_{p^k ∥ m} p^{(k−1)(d²−1)} |SL_d(𝔽_p)|`.
fn sl_order(d: usize, m: u32) -> u128 {
    let mut total: u128 = 1;
    for p in crate::modp::prime_factors(m as u64) {
        let mut k = 0usize;
        let mut rest = m as u64;
        while rest % p == 0 {
            rest /= p;
            k += 1;
        }
        let p = p as u128;
        let q = |e: usize| p.pow(e as u32);
        // |GL_d(𝔽_p)| / (p − 1)
        let mut gl: u128 = 1;
        for i in 0..d {
            gl *= q(d) - q(i);
        }
        let sl = gl / (p - 1);
        total *= sl * p.pow(((k - 1) * (d * d - 1)) as u32);
    }
    total
}

impl fmt::Display for GroupDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupDescriptor::SpecialLinear { d, modulus } => write!(f, "sl({d},{modulus})"),
            GroupDescriptor::Affine { d, modulus } => write!(f, "aff({d},{modulus})"),
            GroupDescriptor::Cyclic(n) => write!(f, "cyclic({n})"),
            GroupDescriptor::Abelian(ns) => {
                let parts: Vec<String> = ns.iter().map(|n| n.to_string()).collect();
                write!(f, "abelian({})", parts.join(","))
            }
            GroupDescriptor::Quaternion => write!(f, "q8"),
            GroupDescriptor::Table(name) => write!(f, "table({name})"),
        }
    }
}

impl From<GroupDescriptor> for String {
    fn from(d: GroupDescriptor) -> String {
        d.to_string()
    }
}

impl TryFrom<String> for GroupDescriptor {
    type Error = Error;

    fn try_from(s: String) -> Result<Self, Error> {
        s.parse()
    }
}

impl FromStr for GroupDescriptor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let lower = compact.to_ascii_lowercase();
        let bad = || Error::BadDescriptor(s.to_string());
        if lower == "q8" || lower == "quaternion" {
            return Ok(GroupDescriptor::Quaternion);
        }
        let open = lower.find('(').ok_or_else(bad)?;
        if !lower.ends_with(')') {
            return Err(bad());
        }
        let name = &lower[..open];
        let inner = &compact[open + 1..compact.len() - 1];
        if name == "table" {
            if inner.is_empty() {
                return Err(bad());
            }
            return Ok(GroupDescriptor::Table(inner.to_string()));
        }
        let args: Vec<u32> = inner
            .split(',')
            .map(|a| a.parse::<u32>())
            .collect::<Result<_, _>>()
            .map_err(|_| bad())?;
        let pair = |args: &[u32]| -> Result<(usize, u32), Error> {
            match args {
                [d, m] if *d >= 1 && *m >= 2 => Ok((*d as usize, *m)),
                _ => Err(bad()),
            }
        };
        match name {
            "sl" => pair(&args).map(|(d, m)| GroupDescriptor::sl(d, m)),
            "aff" => pair(&args).map(|(d, m)| GroupDescriptor::aff(d, m)),
            "cyclic" | "z" => match args.as_slice() {
                [n] if *n >= 1 => Ok(GroupDescriptor::Cyclic(*n)),
                _ => Err(bad()),
            },
            "abelian" => {
                if args.is_empty() || args.iter().any(|&n| n == 0) {
                    Err(bad())
                } else {
                    Ok(GroupDescriptor::Abelian(args))
                }
            }
            _ => Err(bad()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_round_trip() {
        for s in ["sl(2,13)", "sl(3,4)", "aff(2,3)", "cyclic(12)", "abelian(2,2,3)", "q8"] {
            let d: GroupDescriptor = s.parse().unwrap();
            assert_eq!(d.to_string(), s);
        }
        assert_eq!("SL( 2, 5 )".parse::<GroupDescriptor>().unwrap(), GroupDescriptor::sl(2, 5));
        for s in ["sl(2)", "sl(2,1)", "foo(3)", "cyclic(0)", "sl(2,3", ""] {
            assert!(s.parse::<GroupDescriptor>().is_err(), "{s}");
        }
    }

    #[test]
    fn family_orders() {
        assert_eq!(GroupDescriptor::sl(2, 3).expected_order(), Some(24));
        assert_eq!(GroupDescriptor::sl(2, 4).expected_order(), Some(48));
        assert_eq!(GroupDescriptor::sl(3, 2).expected_order(), Some(168));
        assert_eq!(GroupDescriptor::sl(3, 3).expected_order(), Some(5616));
        assert_eq!(GroupDescriptor::sl(3, 5).expected_order(), Some(372_000));
        assert_eq!(GroupDescriptor::aff(2, 3).expected_order(), Some(216));
        assert_eq!(GroupDescriptor::aff(3, 3).expected_order(), Some(151_632));
    }

    #[test]
    fn json_uses_text_form() {
        let d = GroupDescriptor::aff(2, 3);
        assert_eq!(serde_json::to_string(&d).unwrap(), "\"aff(2,3)\"");
        assert_eq!(d.sanitized(), "aff_2_3");
    }
}
