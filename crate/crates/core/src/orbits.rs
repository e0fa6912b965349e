//! Closed-form orbit data attached to a [`GradedDescriptor`].

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::{GType, GradedDescriptor};
use crate::padic::{PadicContext, Q};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrbitError {
    #[error("no orbit count is known for {0}")]
    Uncovered(String),
    #[error("expected a vector of length {expected}, got {got}")]
    Length { expected: usize, got: usize },
}

/// Subgroups of `F*` that occur as `χ₀(G)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Chi0Image {
    /// All of `F*`.
    All,
    /// `F*²`.
    Squares,
    /// `N_{E/F}(E*)`, the classes with even valuation.
    Norms,
    /// Some subgroup of index 2 in `F*`.
    IndexTwo,
    /// Contained in `F*²`.
    InSquares,
}

impl Chi0Image {
    /// Whether `x` is compatible with lying in the image. For `IndexTwo` the
    /// subgroup is not pinned down, so every value is accepted.
    pub fn admits(self, ctx: &PadicContext, x: &Q) -> bool {
        match self {
            Chi0Image::All | Chi0Image::IndexTwo => true,
            Chi0Image::Squares | Chi0Image::InSquares => ctx.is_square(x),
            Chi0Image::Norms => ctx.is_norm(x).unwrap_or(false),
        }
    }
}

impl fmt::Display for Chi0Image {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Chi0Image::All => "F*",
            Chi0Image::Squares => "F*^2",
            Chi0Image::Norms => "N(E*)",
            Chi0Image::IndexTwo => "index-2 subgroup",
            Chi0Image::InSquares => "inside F*^2",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitSummary {
    /// `None` when no theorem covers the family ("open-orbit count only").
    pub nonzero_orbits: Option<u64>,
    pub open_orbits: u64,
    pub chi0_image: Chi0Image,
    pub p_open_orbits: u64,
}

/// `coeff · (λ_i + ... )` as a formal character exponent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormalExponent {
    pub coeff: i64,
    pub lambdas: Vec<usize>,
}

impl fmt::Display for FormalExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self.lambdas.iter().map(|l| format!("l{l}")).collect();
        write!(f, "{}({})", self.coeff, terms.join("+"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharacterData {
    /// `deg Δ_j = κ(k+1-j)`.
    pub degrees: Vec<i64>,
    /// `χ_j(a) = a^{κ(λ_j + ... + λ_k)}`.
    pub a_exponents: Vec<FormalExponent>,
    /// `χ_j⁻(a) = a^{-κ(λ_0 + ... + λ_{k-j})}`.
    pub a_exponents_minus: Vec<FormalExponent>,
}

fn uncovered(desc: &GradedDescriptor) -> OrbitError {
    OrbitError::Uncovered(format!(
        "row {} (k={}, l={}, d={}, e={})",
        desc.case_id, desc.k, desc.ell, desc.d, desc.e
    ))
}

pub fn open_orbit_count(desc: &GradedDescriptor) -> Result<u64, OrbitError> {
    let k = desc.k;
    match desc.gtype {
        GType::I => Ok(1),
        GType::III => Ok(if k == 0 { 3 } else { 4 }),
        GType::II => match desc.e {
            2 => Ok(if k % 2 == 0 { 1 } else { 2 }),
            1 => Ok(match k {
                0 => 1,
                1 => 4,
                _ if k % 2 == 0 => 2,
                _ => 5,
            }),
            3 => Ok(4),
            _ => Err(uncovered(desc)),
        },
    }
}

/// The descriptor of the rank-`m` stratum: same family, rank `m`. A rank-one
/// stratum has no pairs, so `d = e = 0` there.
pub fn sub_descriptor(desc: &GradedDescriptor, m: i64) -> GradedDescriptor {
    let mut sub = desc.clone();
    sub.k = m - 1;
    if m == 1 {
        sub.d = 0;
        sub.e = 0;
        if sub.gtype == GType::II {
            sub.gtype = GType::I;
        }
    }
    sub
}

/// Nonzero `G`-orbits in `V⁺`. Type III has `4k + 3` of them: with the zero
/// orbit this is the `4(k+1)` orbits of the whole space.
pub fn nonzero_orbit_count(desc: &GradedDescriptor) -> Result<u64, OrbitError> {
    let k = desc.k as u64;
    let rank = k + 1;
    match desc.gtype {
        GType::I => Ok(rank),
        GType::III => Ok(4 * k + 3),
        GType::II => match (desc.e, desc.d) {
            (1, 1) => Ok(match rank {
                1 => 1,
                2 => 5,
                r if r % 2 == 1 => 7 * (r - 1) / 2,
                r => 7 * ((r - 2) / 2) + 5,
            }),
            (2, 2) => Ok(match rank {
                1 => 1,
                r if r % 2 == 0 => 3 * r / 2,
                r => 3 * (r - 1) / 2 + 1,
            }),
            (1, _) | (3, _) if rank == 2 => Ok(5),
            (2, _) if rank == 2 => Ok(3),
            _ => Err(uncovered(desc)),
        },
    }
}

/// Orbits of `V⁺` including the zero orbit.
pub fn total_orbit_count(desc: &GradedDescriptor) -> Result<u64, OrbitError> {
    nonzero_orbit_count(desc).map(|n| n + 1)
}

pub fn chi0_image(desc: &GradedDescriptor) -> Result<Chi0Image, OrbitError> {
    let rank = desc.k + 1;
    match desc.gtype {
        GType::I => Ok(Chi0Image::All),
        GType::III => Ok(Chi0Image::InSquares),
        GType::II => match desc.e {
            1 | 3 => Ok(if rank % 2 == 0 { Chi0Image::Squares } else { Chi0Image::All }),
            2 if rank % 2 == 1 => Ok(Chi0Image::All),
            2 if desc.d == 2 => Ok(Chi0Image::Norms),
            2 => Ok(Chi0Image::IndexTwo),
            _ => Err(uncovered(desc)),
        },
    }
}

/// `rank Q_X = mℓ + m(m-1)d/2` for `X` of rank `m`.
pub fn rank_qx(m: i64, ell: i64, d: i64) -> i64 {
    m * ell + m * (m - 1) / 2 * d
}

/// Open `P`-orbits in `V⁺`.
pub fn p_open_orbit_count(desc: &GradedDescriptor) -> Result<u64, OrbitError> {
    let k = desc.k as u32;
    match desc.gtype {
        GType::I => Ok(1),
        GType::III => Ok(3u64.pow(k + 1)),
        GType::II => match desc.e {
            1 | 3 => Ok(4u64.pow(k)),
            2 => Ok(2u64.pow(k)),
            _ => Err(uncovered(desc)),
        },
    }
}

/// `t(s) = (-s_0 - ... - s_k, s_k, s_{k-1}, ..., s_1)`.
pub fn t_involution(s: &[Q], k: usize) -> Result<Vec<Q>, OrbitError> {
    if s.len() != k + 1 {
        return Err(OrbitError::Length { expected: k + 1, got: s.len() });
    }
    let total: Q = s.iter().sum();
    let mut out = vec![-total];
    out.extend(s[1..].iter().rev().cloned());
    Ok(out)
}

pub fn character_data(desc: &GradedDescriptor) -> CharacterData {
    let k = desc.k.max(0) as usize;
    let kappa = desc.kappa();
    CharacterData {
        degrees: (0..=k).map(|j| kappa * (k + 1 - j) as i64).collect(),
        a_exponents: (0..=k).map(|j| FormalExponent { coeff: kappa, lambdas: (j..=k).collect() }).collect(),
        a_exponents_minus: (0..=k)
            .map(|j| FormalExponent { coeff: -kappa, lambdas: (0..=k - j).collect() })
            .collect(),
    }
}

pub fn summary(desc: &GradedDescriptor) -> Result<OrbitSummary, OrbitError> {
    Ok(OrbitSummary {
        nonzero_orbits: nonzero_orbit_count(desc).ok(),
        open_orbits: open_orbit_count(desc)?,
        chi0_image: chi0_image(desc)?,
        p_open_orbits: p_open_orbit_count(desc)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{catalog, descriptor};
    use crate::padic::q;
    use proptest::prelude::*;

    fn sp(n: i64) -> GradedDescriptor {
        descriptor("6", &[("n", n)]).unwrap()
    }

    fn unitary(n: i64) -> GradedDescriptor {
        descriptor("2", &[("n", n)]).unwrap()
    }

    fn type3(k: i64) -> GradedDescriptor {
        if k == 0 {
            descriptor("5", &[]).unwrap()
        } else {
            descriptor("7", &[("k", k)]).unwrap()
        }
    }

    #[test]
    fn open_orbit_examples() {
        assert_eq!(open_orbit_count(&descriptor("8", &[("m", 5)]).unwrap()), Ok(1));
        assert_eq!(open_orbit_count(&sp(4)), Ok(5));
        assert_eq!(open_orbit_count(&sp(3)), Ok(2));
        assert_eq!(open_orbit_count(&sp(2)), Ok(4));
        assert_eq!(open_orbit_count(&type3(0)), Ok(3));
        assert_eq!(open_orbit_count(&type3(2)), Ok(4));
        assert_eq!(open_orbit_count(&unitary(2)), Ok(2));
        assert_eq!(open_orbit_count(&unitary(3)), Ok(1));
        assert_eq!(open_orbit_count(&descriptor("4", &[("m", 4)]).unwrap()), Ok(4));
    }

    #[test]
    fn nonzero_orbit_examples() {
        assert_eq!(nonzero_orbit_count(&sp(4)), Ok(12));
        assert_eq!(nonzero_orbit_count(&unitary(3)), Ok(4));
        assert_eq!(nonzero_orbit_count(&type3(1)), Ok(7));
        assert_eq!(total_orbit_count(&type3(1)), Ok(8));
        let sp_counts: Vec<u64> = (2..=6).map(|n| nonzero_orbit_count(&sp(n)).unwrap()).collect();
        assert_eq!(sp_counts, vec![5, 7, 12, 14, 19]);
        let un_counts: Vec<u64> = (2..=6).map(|n| nonzero_orbit_count(&unitary(n)).unwrap()).collect();
        assert_eq!(un_counts, vec![3, 4, 6, 7, 9]);
        assert_eq!(nonzero_orbit_count(&descriptor("3", &[("m", 4)]).unwrap()), Ok(5));
        assert_eq!(nonzero_orbit_count(&descriptor("9", &[("m", 4)]).unwrap()), Ok(3));
        assert_eq!(nonzero_orbit_count(&descriptor("11", &[("n", 4)]).unwrap()), Ok(4));
    }

    #[test]
    fn counts_are_sums_of_open_counts_over_strata() {
        let mut descs: Vec<GradedDescriptor> = Vec::new();
        for n in 2..=8 {
            descs.push(sp(n));
            descs.push(unitary(n));
        }
        for k in 0..=5 {
            descs.push(type3(k));
        }
        for r in &catalog().rows {
            let params = r.param_names().map(|n| (n.as_str(), 4)).collect::<Vec<_>>();
            if let Ok(d) = descriptor(&r.id, &params) {
                descs.push(d);
            }
        }
        for d in descs {
            let Ok(total) = nonzero_orbit_count(&d) else { continue };
            let strata: u64 =
                (1..=d.k + 1).map(|m| open_orbit_count(&sub_descriptor(&d, m)).unwrap()).sum();
            assert_eq!(total, strata, "row {} k={}", d.case_id, d.k);
            assert!(open_orbit_count(&d).unwrap() <= total);
        }
    }

    #[test]
    fn chi0_examples() {
        assert_eq!(chi0_image(&descriptor("13", &[]).unwrap()), Ok(Chi0Image::All));
        assert_eq!(chi0_image(&sp(4)), Ok(Chi0Image::Squares));
        assert_eq!(chi0_image(&sp(3)), Ok(Chi0Image::All));
        assert_eq!(chi0_image(&unitary(4)), Ok(Chi0Image::Norms));
        assert_eq!(chi0_image(&unitary(3)), Ok(Chi0Image::All));
        assert_eq!(chi0_image(&descriptor("9", &[("m", 5)]).unwrap()), Ok(Chi0Image::IndexTwo));
        assert_eq!(chi0_image(&type3(2)), Ok(Chi0Image::InSquares));
    }

    #[test]
    fn rank_qx_examples() {
        assert_eq!(rank_qx(0, 1, 1), 0);
        assert_eq!(rank_qx(2, 1, 1), 3);
        assert_eq!(rank_qx(3, 3, 4), 21);
    }

    #[test]
    fn p_orbit_examples() {
        assert_eq!(p_open_orbit_count(&sp(3)), Ok(16));
        assert_eq!(p_open_orbit_count(&unitary(3)), Ok(4));
        assert_eq!(p_open_orbit_count(&type3(1)), Ok(9));
        assert_eq!(p_open_orbit_count(&descriptor("1", &[("delta", 1), ("k", 3)]).unwrap()), Ok(1));
        for d in [sp(4), unitary(5), type3(3)] {
            let s = summary(&d).unwrap();
            assert!(s.p_open_orbits >= s.open_orbits);
        }
    }

    #[test]
    fn character_examples() {
        assert_eq!(character_data(&sp(4)).degrees, vec![4, 3, 2, 1]);
        assert_eq!(character_data(&type3(2)).degrees, vec![6, 4, 2]);
        assert_eq!(character_data(&type3(0)).degrees, vec![2]);
        let c = character_data(&type3(1));
        assert_eq!(c.a_exponents[1].to_string(), "2(l1)");
        assert_eq!(c.a_exponents_minus[0].to_string(), "-2(l0+l1)");
    }

    #[test]
    fn t_examples() {
        assert_eq!(t_involution(&[q(0), q(0)], 1).unwrap(), vec![q(0), q(0)]);
        assert_eq!(t_involution(&[q(2), q(5)], 1).unwrap(), vec![q(-7), q(5)]);
        assert!(t_involution(&[q(1)], 2).is_err());
    }

    proptest! {
        #[test]
        fn t_is_an_involution(s in prop::collection::vec(-100i64..100, 1..=11)) {
            let k = s.len() - 1;
            let s: Vec<Q> = s.into_iter().map(q).collect();
            let once = t_involution(&s, k).unwrap();
            prop_assert_eq!(t_involution(&once, k).unwrap(), s);
        }

        #[test]
        fn rank_qx_is_strictly_increasing(m in 0i64..20, ell in prop::sample::select(vec![1i64, 3, 4]), d in 0i64..9) {
            prop_assert!(rank_qx(m + 1, ell, d) > rank_qx(m, ell, d));
        }

        #[test]
        fn degrees_strictly_decrease(k in 0i64..10) {
            let c = character_data(&type3(k));
            prop_assert!(c.degrees.windows(2).all(|w| w[0] > w[1]));
        }
    }
}
