use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ops::GroupOps;

/// Square integer matrix, row-major. Serialized as a list of rows.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "Vec<Vec<i64>>", try_from = "Vec<Vec<i64>>")]
pub struct IntMatrix {
    d: usize,
    entries: Vec<i64>,
}

impl From<IntMatrix> for Vec<Vec<i64>> {
    fn from(m: IntMatrix) -> Self {
        m.entries.chunks(m.d).map(<[i64]>::to_vec).collect()
    }
}

impl TryFrom<Vec<Vec<i64>>> for IntMatrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<i64>>) -> Result<Self> {
        IntMatrix::from_rows(&rows)
    }
}

impl IntMatrix {
    pub fn from_row_major(d: usize, entries: Vec<i64>) -> Result<Self> {
        if d == 0 || entries.len() != d * d {
            return Err(Error::Precondition(format!(
                "expected {} entries for a {d}x{d} matrix, got {}",
                d * d,
                entries.len()
            )));
        }
        Ok(IntMatrix { d, entries })
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let d = rows.len();
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::Precondition("matrix rows must form a square".into()));
        }
        Self::from_row_major(d, rows.concat())
    }

    pub fn identity(d: usize) -> Self {
        let mut entries = vec![0; d * d];
        for i in 0..d {
            entries[i * d + i] = 1;
        }
        IntMatrix { d, entries }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn entries(&self) -> &[i64] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.entries[i * self.d + j]
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.d, other.d);
        let d = self.d;
        let mut entries = vec![0i64; d * d];
        for i in 0..d {
            for k in 0..d {
                let a = self.entries[i * d + k];
                if a == 0 {
                    continue;
                }
                for j in 0..d {
                    let p = a
                        .checked_mul(other.entries[k * d + j])
                        .expect("integer matrix entry overflow");
                    entries[i * d + j] = entries[i * d + j]
                        .checked_add(p)
                        .expect("integer matrix entry overflow");
                }
            }
        }
        IntMatrix { d, entries }
    }

    pub fn apply(&self, v: &[i64]) -> Vec<i64> {
        (0..self.d)
            .map(|i| (0..self.d).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let d = self.d;
        let mut entries = vec![0; d * d];
        for i in 0..d {
            for j in 0..d {
                entries[j * d + i] = self.entries[i * d + j];
            }
        }
        IntMatrix { d, entries }
    }

    pub fn det(&self) -> i64 {
        det_i128(self.d, &self.entries.iter().map(|&x| x as i128).collect::<Vec<_>>()) as i64
    }

    /// Adjugate matrix, so that `A · adj(A) = det(A) · Id`.
    pub fn adjugate(&self) -> Self {
        let d = self.d;
        let wide: Vec<i128> = self.entries.iter().map(|&x| x as i128).collect();
        IntMatrix {
            d,
            entries: adjugate_i128(d, &wide).into_iter().map(|x| x as i64).collect(),
        }
    }

    /// Exact inverse of a matrix with determinant `±1`.
    pub fn unimodular_inverse(&self) -> Self {
        let det = self.det();
        assert!(det == 1 || det == -1, "matrix is not unimodular");
        let adj = self.adjugate();
        IntMatrix {
            d: self.d,
            entries: adj.entries.iter().map(|&x| x * det).collect(),
        }
    }

    /// Entry-wise residues in `[0, m)`.
    pub fn residues(&self, m: u32) -> Vec<u32> {
        self.entries
            .iter()
            .map(|&x| x.rem_euclid(m as i64) as u32)
            .collect()
    }
}

pub(crate) fn det_i128(d: usize, a: &[i128]) -> i128 {
    match d {
        0 => 1,
        1 => a[0],
        2 => a[0] * a[3] - a[1] * a[2],
        3 => {
            a[0] * (a[4] * a[8] - a[5] * a[7]) - a[1] * (a[3] * a[8] - a[5] * a[6])
                + a[2] * (a[3] * a[7] - a[4] * a[6])
        }
        _ => (0..d)
            .map(|j| {
                let sign = if j % 2 == 0 { 1 } else { -1 };
                sign * a[j] * det_i128(d - 1, &minor(d, a, 0, j))
            })
            .sum(),
    }
}

fn minor(d: usize, a: &[i128], row: usize, col: usize) -> Vec<i128> {
    let mut out = Vec::with_capacity((d - 1) * (d - 1));
    for i in (0..d).filter(|&i| i != row) {
        for j in (0..d).filter(|&j| j != col) {
            out.push(a[i * d + j]);
        }
    }
    out
}

pub(crate) fn adjugate_i128(d: usize, a: &[i128]) -> Vec<i128> {
    if d == 1 {
        return vec![1];
    }
    let mut out = vec![0i128; d * d];
    for i in 0..d {
        for j in 0..d {
            let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
            // adj(A)_{ji} = (−1)^{i+j} M_{ij}
            out[j * d + i] = sign * det_i128(d - 1, &minor(d, a, i, j));
        }
    }
    out
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .entries
            .chunks(self.d)
            .map(|r| {
                let cells: Vec<String> = r.iter().map(|x| x.to_string()).collect();
                format!("[{}]", cells.join(","))
            })
            .collect();
        write!(f, "[{}]", rows.join(","))
    }
}

/// An element of `SL_d(ℤ)` or of the affine group `GL_d(ℤ) ⋉ ℤ^d`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", try_from = "RawElement")]
pub enum IntegerMatrixElement {
    Linear { matrix: IntMatrix },
    Affine { matrix: IntMatrix, translation: Vec<i64> },
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum RawElement {
    Linear { matrix: IntMatrix },
    Affine { matrix: IntMatrix, translation: Vec<i64> },
}

impl TryFrom<RawElement> for IntegerMatrixElement {
    type Error = Error;

    fn try_from(raw: RawElement) -> Result<Self> {
        match raw {
            RawElement::Linear { matrix } => Self::linear(matrix),
            RawElement::Affine { matrix, translation } => Self::affine(matrix, translation),
        }
    }
}

impl IntegerMatrixElement {
    /// An element of `SL_d(ℤ)`; the determinant must be exactly 1.
    pub fn linear(matrix: IntMatrix) -> Result<Self> {
        let det = matrix.det();
        if det != 1 {
            return Err(Error::Precondition(format!(
                "matrix {matrix} has determinant {det}, expected 1"
            )));
        }
        Ok(IntegerMatrixElement::Linear { matrix })
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        Self::linear(IntMatrix::from_rows(rows)?)
    }

    /// An element `(A, v)` of `GL_d(ℤ) ⋉ ℤ^d`; `det A` must be `±1`.
    pub fn affine(matrix: IntMatrix, translation: Vec<i64>) -> Result<Self> {
        let det = matrix.det();
        if det != 1 && det != -1 {
            return Err(Error::Precondition(format!(
                "matrix {matrix} has determinant {det}, expected ±1"
            )));
        }
        if translation.len() != matrix.dim() {
            return Err(Error::Precondition("translation length must equal d".into()));
        }
        Ok(IntegerMatrixElement::Affine {
            matrix,
            translation,
        })
    }

    /// Elementary matrix `Id + s·E_ij`.
    pub fn elementary(d: usize, i: usize, j: usize, s: i64) -> Self {
        assert!(i != j && i < d && j < d);
        let mut m = IntMatrix::identity(d);
        m.entries[i * d + j] = s;
        IntegerMatrixElement::Linear { matrix: m }
    }

    /// All `e_ij(±1)`, ordered by `(i, j)` then sign `+1` before `−1`.
    pub fn elementary_generators(d: usize) -> Vec<Self> {
        let mut out = Vec::new();
        for i in 0..d {
            for j in 0..d {
                if i != j {
                    out.push(Self::elementary(d, i, j, 1));
                    out.push(Self::elementary(d, i, j, -1));
                }
            }
        }
        out
    }

    pub fn identity(d: usize) -> Self {
        IntegerMatrixElement::Linear {
            matrix: IntMatrix::identity(d),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix().dim()
    }

    pub fn matrix(&self) -> &IntMatrix {
        match self {
            IntegerMatrixElement::Linear { matrix } | IntegerMatrixElement::Affine { matrix, .. } => {
                matrix
            }
        }
    }

    pub fn is_affine(&self) -> bool {
        matches!(self, IntegerMatrixElement::Affine { .. })
    }

    pub fn mul(&self, other: &Self) -> Self {
        use IntegerMatrixElement::*;
        match (self, other) {
            (Linear { matrix: a }, Linear { matrix: b }) => Linear { matrix: a.mul(b) },
            _ => {
                let (a, v) = self.as_affine_parts();
                let (b, w) = other.as_affine_parts();
                let aw = a.apply(&w);
                Affine {
                    matrix: a.mul(&b),
                    translation: v.iter().zip(aw).map(|(x, y)| x + y).collect(),
                }
            }
        }
    }

    fn as_affine_parts(&self) -> (IntMatrix, Vec<i64>) {
        match self {
            IntegerMatrixElement::Linear { matrix } => (matrix.clone(), vec![0; matrix.dim()]),
            IntegerMatrixElement::Affine {
                matrix,
                translation,
            } => (matrix.clone(), translation.clone()),
        }
    }

    pub fn inv(&self) -> Self {
        match self {
            IntegerMatrixElement::Linear { matrix } => IntegerMatrixElement::Linear {
                matrix: matrix.unimodular_inverse(),
            },
            IntegerMatrixElement::Affine {
                matrix,
                translation,
            } => {
                let ai = matrix.unimodular_inverse();
                let t = ai.apply(translation).into_iter().map(|x| -x).collect();
                IntegerMatrixElement::Affine {
                    matrix: ai,
                    translation: t,
                }
            }
        }
    }

    /// Residues of the matrix entries followed by those of the translation.
    pub fn residues(&self, m: u32) -> Vec<u32> {
        let mut out = self.matrix().residues(m);
        if let IntegerMatrixElement::Affine { translation, .. } = self {
            out.extend(translation.iter().map(|&x| x.rem_euclid(m as i64) as u32));
        }
        out
    }

    /// Word-metric ball of the given radius around the identity, in BFS order.
    pub fn ball(generators: &[Self], radius: usize) -> Vec<Self> {
        let d = generators.first().map(|g| g.dim()).unwrap_or(1);
        let start = if generators.iter().any(|g| g.is_affine()) {
            IntegerMatrixElement::Affine {
                matrix: IntMatrix::identity(d),
                translation: vec![0; d],
            }
        } else {
            Self::identity(d)
        };
        let mut seen = std::collections::HashSet::new();
        seen.insert(start.clone());
        let mut out = vec![start];
        let mut frontier = 0;
        for _ in 0..radius {
            let end = out.len();
            for idx in frontier..end {
                for g in generators {
                    let y = out[idx].mul(g);
                    if seen.insert(y.clone()) {
                        out.push(y);
                    }
                }
            }
            frontier = end;
        }
        out
    }
}

impl fmt::Display for IntegerMatrixElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IntegerMatrixElement::Linear { matrix } => write!(f, "{matrix}"),
            IntegerMatrixElement::Affine {
                matrix,
                translation,
            } => write!(f, "({matrix},{translation:?})"),
        }
    }
}

/// `SL_d(ℤ)` (or the affine group) as an abstract multiplication context.
#[derive(Clone, Copy, Debug)]
pub struct IntegerMatrices {
    pub d: usize,
    pub affine: bool,
}

impl GroupOps for IntegerMatrices {
    type Elem = IntegerMatrixElement;

    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        a.mul(b)
    }

    fn inv(&self, a: &Self::Elem) -> Self::Elem {
        a.inv()
    }

    fn identity(&self) -> Self::Elem {
        if self.affine {
            IntegerMatrixElement::Affine {
                matrix: IntMatrix::identity(self.d),
                translation: vec![0; self.d],
            }
        } else {
            IntegerMatrixElement::identity(self.d)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinant_is_verified() {
        assert!(IntegerMatrixElement::from_rows(&[vec![1, 1], vec![0, 1]]).is_ok());
        assert!(IntegerMatrixElement::from_rows(&[vec![2, 0], vec![0, 1]]).is_err());
        let m = IntMatrix::from_rows(&[vec![0, 1], vec![1, 0]]).unwrap();
        assert!(IntegerMatrixElement::affine(m.clone(), vec![1, 2]).is_ok());
        assert!(IntegerMatrixElement::linear(m).is_err());
    }

    #[test]
    fn inverse_and_ball() {
        let gens = IntegerMatrixElement::elementary_generators(2);
        assert_eq!(gens.len(), 4);
        let ball = IntegerMatrixElement::ball(&gens, 2);
        // 1 + 4 + 12 distinct words of length ≤ 2 after cancellation... plus commuting duplicates
        assert_eq!(ball[0], IntegerMatrixElement::identity(2));
        for g in &ball {
            assert_eq!(g.mul(&g.inv()), IntegerMatrixElement::identity(2));
        }
        let m3 = IntMatrix::from_rows(&[vec![2, 1, 0], vec![1, 1, 0], vec![0, 0, 1]]).unwrap();
        assert_eq!(m3.mul(&m3.unimodular_inverse()), IntMatrix::identity(3));
        let aff = IntegerMatrixElement::affine(m3, vec![1, -2, 3]).unwrap();
        let id = aff.mul(&aff.inv());
        assert_eq!(id.matrix(), &IntMatrix::identity(3));
        assert_eq!(id.residues(5)[9..], [0, 0, 0]);
    }
}
