use rayon::prelude::*;

use super::fp;
use crate::cyclo::Cyclotomic;
use crate::error::{Error, Result};
use crate::group::{ConjClassTable, GroupHandle};
use crate::modp::{inv_mod, mul_mod, pow_mod, primitive_root};

/// Structure constants `a[j][i][l] = #{(x, y) ∈ C_j × C_i : xy = z_l}`,
/// with `z_l` the representative of class `l`.
pub(crate) fn structure_constants(group: &GroupHandle, classes: &ConjClassTable) -> Vec<u32> {
    let k = classes.len();
    let n = group.order();
    let per_l: Vec<Vec<u32>> = classes
        .representatives()
        .par_iter()
        .map(|&z| {
            let mut counts = vec![0u32; k * k];
            for x in 0..n {
                let y = group.mul(group.inv(x), z);
                counts[classes.class_of(x) * k + classes.class_of(y)] += 1;
            }
            counts
        })
        .collect();
    let mut a = vec![0u32; k * k * k];
    for (l, counts) in per_l.iter().enumerate() {
        for ji in 0..k * k {
            a[ji * k + l] = counts[ji];
        }
    }
    a
}

/// One irreducible character as produced by the modular method, before sorting.
pub(crate) struct RawCharacter {
    pub degree: u64,
    pub values: Vec<Cyclotomic>,
}

pub(crate) fn dixon_at_prime(
    group: &GroupHandle,
    classes: &ConjClassTable,
    a: &[u32],
    exponent: u64,
    ell: u64,
) -> Result<Vec<RawCharacter>> {
    let k = classes.len();
    let n = group.order() as u64;
    let sizes = classes.sizes();
    let class_matrix = |j: usize| -> Vec<Vec<u64>> {
        (0..k)
            .map(|i| (0..k).map(|l| a[(j * k + i) * k + l] as u64 % ell).collect())
            .collect()
    };

    // Split F_ℓ^k into common eigenspaces of all class matrices.
    let mut spaces: Vec<(Vec<Vec<u64>>, Vec<usize>)> = {
        let mut id: Vec<Vec<u64>> = (0..k)
            .map(|i| (0..k).map(|l| u64::from(i == l)).collect())
            .collect();
        let piv = fp::rref(&mut id, ell);
        vec![(id, piv)]
    };
    for j in 1..k {
        if spaces.iter().all(|(b, _)| b.len() == 1) {
            break;
        }
        let m = class_matrix(j);
        let mut next = Vec::new();
        for (basis, pivots) in spaces {
            if basis.len() == 1 {
                next.push((basis, pivots));
                continue;
            }
            let r = basis.len();
            // T[a][c] = coordinate a of M_j b_c
            let images: Vec<Vec<u64>> = basis
                .iter()
                .map(|b| {
                    (0..k)
                        .map(|i| {
                            (0..k).fold(0u64, |acc, l| (acc + mul_mod(m[i][l], b[l], ell)) % ell)
                        })
                        .collect()
                })
                .collect();
            let t: Vec<Vec<u64>> = (0..r)
                .map(|row| (0..r).map(|c| images[c][pivots[row]]).collect())
                .collect();
            let roots = fp::roots(&fp::charpoly(&t, ell), ell);
            let mut found = 0;
            let mut pieces = Vec::new();
            for lambda in roots {
                let shifted: Vec<Vec<u64>> = (0..r)
                    .map(|row| {
                        (0..r)
                            .map(|c| {
                                let x = t[row][c];
                                if row == c {
                                    (x + ell - lambda) % ell
                                } else {
                                    x
                                }
                            })
                            .collect()
                    })
                    .collect();
                let coords = fp::nullspace(&shifted, ell);
                found += coords.len();
                let mut vecs: Vec<Vec<u64>> = coords
                    .iter()
                    .map(|cs| {
                        (0..k)
                            .map(|i| {
                                cs.iter()
                                    .zip(&basis)
                                    .fold(0u64, |acc, (&c, b)| (acc + mul_mod(c, b[i], ell)) % ell)
                            })
                            .collect()
                    })
                    .collect();
                let piv = fp::rref(&mut vecs, ell);
                pieces.push((vecs, piv));
            }
            if found != r {
                return Err(Error::SplittingFailure { prime: ell });
            }
            next.extend(pieces);
        }
        spaces = next;
    }
    if spaces.len() != k || spaces.iter().any(|(b, _)| b.len() != 1) {
        return Err(Error::SplittingFailure { prime: ell });
    }

    let z = pow_mod(primitive_root(ell), (ell - 1) / exponent, ell);
    let inv_class = classes.inverse_class();
    let power_map = classes.power_map(group, exponent);
    let orders = classes.orders();
    let mut out = Vec::with_capacity(k);
    for (basis, _) in spaces {
        let w = &basis[0];
        if w[0] == 0 {
            return Err(Error::SplittingFailure { prime: ell });
        }
        let w0 = inv_mod(w[0], ell).unwrap();
        let omega: Vec<u64> = w.iter().map(|&x| mul_mod(x, w0, ell)).collect();
        // Σ_j ω_j ω_{j*} / |C_j| = |G| / d²
        let mut s = 0u64;
        for j in 0..k {
            let t = mul_mod(omega[j], omega[inv_class[j]], ell);
            s = (s + mul_mod(t, inv_mod(sizes[j] as u64 % ell, ell).unwrap(), ell)) % ell;
        }
        let s_inv = inv_mod(s, ell).ok_or(Error::SplittingFailure { prime: ell })?;
        let d2 = mul_mod(n % ell, s_inv, ell);
        let degree = (1..=(n as f64).sqrt() as u64 + 1)
            .find(|&d| d * d <= n && (d * d) % ell == d2)
            .ok_or(Error::SplittingFailure { prime: ell })?;
        let chi: Vec<u64> = (0..k)
            .map(|j| {
                let c = mul_mod(degree % ell, omega[j], ell);
                mul_mod(c, inv_mod(sizes[j] as u64 % ell, ell).unwrap(), ell)
            })
            .collect();
        let mut values = Vec::with_capacity(k);
        for j in 0..k {
            let o = orders[j];
            let zo = pow_mod(z, exponent / o, ell);
            let zo_inv = inv_mod(zo, ell).unwrap();
            let o_inv = inv_mod(o % ell, ell).unwrap();
            let mut terms = Vec::new();
            let mut total = 0u64;
            for s in 0..o {
                // m_s = o⁻¹ Σ_t χ(g^t) z_o^{−st}
                let step = pow_mod(zo_inv, s, ell);
                let mut acc = 0u64;
                let mut root = 1u64;
                for t in 0..o {
                    acc = (acc + mul_mod(chi[power_map[j][t as usize]], root, ell)) % ell;
                    root = mul_mod(root, step, ell);
                }
                let ms = mul_mod(acc, o_inv, ell);
                if ms > degree {
                    return Err(Error::SplittingFailure { prime: ell });
                }
                total += ms;
                if ms != 0 {
                    terms.push(((s * (exponent / o)) as u32, ms as i64));
                }
            }
            if total != degree {
                return Err(Error::SplittingFailure { prime: ell });
            }
            values.push(Cyclotomic::new(exponent as u32, terms));
        }
        out.push(RawCharacter { degree, values });
    }
    Ok(out)
}
