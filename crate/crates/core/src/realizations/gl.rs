//! `V⁺ = M(n, F)` with `(a, b)·X = a X b`.

use rand_chacha::ChaCha8Rng;

use super::*;
use crate::catalog::descriptor;

#[derive(Debug, Clone)]
pub struct Gl {
    n: usize,
    ctx: PadicContext,
}

/// `X ↦ a X b`.
#[derive(Debug, Clone, PartialEq)]
pub struct GlGroup {
    pub a: Matrix<Q>,
    pub b: Matrix<Q>,
}

impl Gl {
    pub fn new(n: usize, ctx: PadicContext) -> Result<Self, RealizationError> {
        check_size(n, 1, 8)?;
        Ok(Gl { n, ctx })
    }

    fn unit(&self, i: usize, j: usize) -> Matrix<Q> {
        let mut m = Matrix::zeros(self.n, self.n, &q(0));
        m.set(i, j, q(1));
        m
    }

    fn pos_grade(&self, a: usize, b: usize) -> Grade {
        let k = self.n - 1;
        let (i, j) = (k - a, k - b);
        if i == j {
            Grade::Root(i)
        } else {
            Grade::Pair(i.min(j), i.max(j))
        }
    }
}

impl Model for Gl {
    type Elem = Matrix<Q>;
    type Group = GlGroup;
    type Slot = Q;

    fn tag(&self) -> Tag {
        Tag::Gl
    }

    fn ctx(&self) -> &PadicContext {
        &self.ctx
    }

    fn k(&self) -> usize {
        self.n - 1
    }

    fn kappa(&self) -> i64 {
        1
    }

    fn descriptor(&self) -> Result<GradedDescriptor, RealizationError> {
        Ok(descriptor("1", &[("delta", 1), ("k", self.n as i64 - 1)])?)
    }

    fn check(&self, x: &Matrix<Q>) -> Result<(), RealizationError> {
        if x.rows() != self.n || x.cols() != self.n {
            return Err(RealizationError::NotInModel { tag: Tag::Gl, why: format!("expected {0}x{0}", self.n) });
        }
        Ok(())
    }

    fn zero(&self) -> Matrix<Q> {
        Matrix::zeros(self.n, self.n, &q(0))
    }

    fn add(&self, x: &Matrix<Q>, y: &Matrix<Q>) -> Matrix<Q> {
        x.add(y)
    }

    fn scale(&self, t: &Q, x: &Matrix<Q>) -> Matrix<Q> {
        x.scale(t)
    }

    fn coordinates(&self, x: &Matrix<Q>) -> Vec<Q> {
        x.entries().to_vec()
    }

    fn vplus_basis(&self) -> Vec<(Grade, Matrix<Q>)> {
        (0..self.n * self.n)
            .map(|t| {
                let (a, b) = (t / self.n, t % self.n);
                (self.pos_grade(a, b), self.unit(a, b))
            })
            .collect()
    }

    fn grade_decompose(&self, x: &Matrix<Q>) -> Vec<(Grade, Matrix<Q>)> {
        let mut parts: Vec<(Grade, Matrix<Q>)> = Vec::new();
        for a in 0..self.n {
            for b in 0..self.n {
                let v = x.get(a, b);
                if v.is_zero() {
                    continue;
                }
                let g = self.pos_grade(a, b);
                let piece = self.unit(a, b).scale(v);
                match parts.iter_mut().find(|(h, _)| *h == g) {
                    Some((_, m)) => *m = m.add(&piece),
                    None => parts.push((g, piece)),
                }
            }
        }
        parts
    }

    fn identity(&self) -> GlGroup {
        let i = Matrix::identity(self.n, &q(0));
        GlGroup { a: i.clone(), b: i }
    }

    fn compose(&self, g: &GlGroup, h: &GlGroup) -> GlGroup {
        GlGroup { a: g.a.mul(&h.a), b: h.b.mul(&g.b) }
    }

    fn act(&self, g: &GlGroup, x: &Matrix<Q>) -> Matrix<Q> {
        g.a.mul(x).mul(&g.b)
    }

    fn check_group(&self, g: &GlGroup) -> Result<(), RealizationError> {
        if g.a.rows() != self.n || g.b.rows() != self.n || g.a.det().is_zero() || g.b.det().is_zero() {
            return Err(RealizationError::Singular);
        }
        Ok(())
    }

    fn random_group(&self, rng: &mut ChaCha8Rng) -> GlGroup {
        let ctx = self.ctx;
        let a = random_invertible(self.n, rng, &mut random_small, &mut |r| random_scalar(&ctx, r), &q(0));
        let b = random_invertible(self.n, rng, &mut random_small, &mut |r| random_scalar(&ctx, r), &q(0));
        GlGroup { a, b }
    }

    fn random_unipotent(&self, rng: &mut ChaCha8Rng) -> GlGroup {
        let a = random_lower(self.n, rng, &mut random_small, None, &q(0));
        let b = random_lower(self.n, rng, &mut random_small, None, &q(0)).transpose();
        GlGroup { a, b }
    }

    fn random_parabolic(&self, rng: &mut ChaCha8Rng) -> GlGroup {
        let ctx = self.ctx;
        let a = random_lower(self.n, rng, &mut random_small, Some(&mut |r| random_scalar(&ctx, r)), &q(0));
        let b = random_lower(self.n, rng, &mut random_small, Some(&mut |r| random_scalar(&ctx, r)), &q(0));
        GlGroup { a, b: b.transpose() }
    }

    fn chi0(&self, g: &GlGroup) -> Q {
        g.a.det() * g.b.det()
    }

    fn scalar(&self, mu: &Q) -> GlGroup {
        let i = Matrix::identity(self.n, &q(0));
        GlGroup { a: i.scale(&mu.recip()), b: i }
    }

    fn delta(&self, j: usize, x: &Matrix<Q>) -> Result<Q, RealizationError> {
        let k = self.k();
        if j > k {
            return Err(RealizationError::IndexOutOfRange { j, k });
        }
        Ok(x.leading(k + 1 - j).det())
    }

    fn orbit_invariants(&self, x: &Matrix<Q>) -> OrbitInvariant {
        OrbitInvariant { rank: x.rank(), payload: Payload::None }
    }

    fn p_orbit_class(&self, x: &Matrix<Q>) -> Result<Vec<PClass>, RealizationError> {
        self.in_open_p_orbit_set(x)?;
        Ok(Vec::new())
    }

    fn slot_choices(&self) -> Vec<Q> {
        SquareClass::ALL.iter().map(|c| self.ctx.rep(*c)).collect()
    }

    fn diagonal(&self, slots: &[Option<Q>]) -> Matrix<Q> {
        let k = self.k();
        let mut m = self.zero();
        for (j, s) in slots.iter().enumerate() {
            if let Some(v) = s {
                m.set(k - j, k - j, v.clone());
            }
        }
        m
    }

    fn unit_slot(&self) -> Q {
        q(1)
    }

    fn psi(&self, x: &Matrix<Q>) -> Result<Matrix<Q>, RealizationError> {
        Ok(x.inverse().ok_or(RealizationError::Singular)?.neg())
    }

    fn gamma(&self, y: &Matrix<Q>) -> Result<Matrix<Q>, RealizationError> {
        Ok(flip(y, &q(1)))
    }

    fn gamma_plus(&self, x: &Matrix<Q>) -> Result<Matrix<Q>, RealizationError> {
        Ok(flip(x, &q(1)))
    }

    fn ad_triple_holds(&self, x: &Matrix<Q>) -> Result<bool, RealizationError> {
        let y = self.psi(x)?;
        let n = self.n;
        let xh = ambient(Some(x), None, n, &q(0));
        let yh = ambient(None, Some(&y), n, &q(0));
        Ok(yh.mul(&xh).sub(&xh.mul(&yh)) == h0(n, &q(0)))
    }
}

impl JsonElem for Gl {
    fn parse_elem(&self, entries: &[serde_json::Value]) -> Result<Matrix<Q>, RealizationError> {
        let m = parse_q_matrix(&self.ctx, entries)?;
        self.check(&m)?;
        Ok(m)
    }

    fn elem_to_json(&self, x: &Matrix<Q>) -> serde_json::Value {
        (0..x.rows()).map(|i| x.row(i).iter().map(q_to_json).collect::<Vec<_>>()).collect::<Vec<_>>().into()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbits::{chi0_image, nonzero_orbit_count, open_orbit_count, Chi0Image};
    use crate::realizations::testing::*;

    fn ctx() -> PadicContext {
        PadicContext::new(5).unwrap()
    }

    #[test]
    fn structure_checks() {
        for n in 1..=4 {
            check_model(&Gl::new(n, ctx()).unwrap(), 10 + n as u64, 20);
        }
    }

    #[test]
    fn psi_identity_and_ad_triple() {
        let mut r = rng(4);
        for n in 1..=4 {
            let m = Gl::new(n, ctx()).unwrap();
            for _ in 0..10 {
                let x = random_generic(&m, &mut r);
                assert!(m.ad_triple_holds(&x).unwrap());
                if m.in_open_p_orbit_set(&x).is_ok() {
                    assert!(psi_identity_holds(&m, &x).unwrap());
                    let s: Vec<i64> = (0..n as i64).map(|i| i - 1).collect();
                    assert!(character_identity_holds(&m, &x, &s).unwrap());
                }
            }
        }
    }

    #[test]
    fn orbits_are_ranks() {
        for n in 1..=4 {
            let m = Gl::new(n, ctx()).unwrap();
            let d = m.descriptor().unwrap();
            let (nonzero, open) = orbit_census(&m);
            assert_eq!(nonzero, n);
            assert_eq!(nonzero as u64, nonzero_orbit_count(&d).unwrap());
            assert_eq!(open as u64, open_orbit_count(&d).unwrap());
            assert_eq!(p_orbit_census(&m).unwrap(), 1);
            assert_eq!(chi0_image(&d).unwrap(), Chi0Image::All);
        }
    }

    #[test]
    fn grade_census_counts_both_off_diagonal_entries() {
        let m = Gl::new(3, ctx()).unwrap();
        let x = Matrix::from_fn(3, 3, |i, j| q((i * 3 + j + 1) as i64));
        let parts = m.grade_decompose(&x);
        assert_eq!(parts.len(), 6);
        let pair = parts.iter().find(|(g, _)| *g == Grade::Pair(1, 2)).unwrap();
        assert_eq!(pair.1.entries().iter().filter(|v| !v.is_zero()).count(), 2);
    }
}
