//! `V⁺ = Herm(n, E)` with `(g, μ)·B = μ⁻¹ g B ḡᵗ`, `E = F(√u)`.

use rand_chacha::ChaCha8Rng;

use super::*;
use crate::catalog::descriptor;
use crate::linalg::congruence_diagonalize;

#[derive(Debug, Clone)]
pub struct Unitary {
    n: usize,
    ctx: PadicContext,
}

/// `(g, μ)` with `g ∈ GL(n, E)`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryGroup {
    pub g: Matrix<Ext>,
    pub mu: Q,
}

impl Unitary {
    pub fn new(n: usize, ctx: PadicContext) -> Result<Self, RealizationError> {
        check_size(n, 2, 8)?;
        Ok(Unitary { n, ctx })
    }

    fn e(&self, x: Q) -> Ext {
        Ext::from_q(x, self.ctx.u())
    }

    fn ez(&self) -> Ext {
        Ext::zero(self.ctx.u())
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

    /// `E_ab + E_ba` scaled so that entry `(a, b)` is `v`.
    fn herm_unit(&self, a: usize, b: usize, v: Ext) -> Matrix<Ext> {
        let mut m = Matrix::zeros(self.n, self.n, &self.ez());
        m.set(b, a, v.conj());
        m.set(a, b, v);
        m
    }
}

impl Model for Unitary {
    type Elem = Matrix<Ext>;
    type Group = UnitaryGroup;
    type Slot = Q;

    fn tag(&self) -> Tag {
        Tag::Unitary
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
        Ok(descriptor("2", &[("n", self.n as i64)])?)
    }

    fn check(&self, x: &Matrix<Ext>) -> Result<(), RealizationError> {
        if x.rows() != self.n || x.cols() != self.n {
            return Err(RealizationError::NotInModel { tag: Tag::Unitary, why: format!("expected {0}x{0}", self.n) });
        }
        if !x.is_hermitian() {
            return Err(RealizationError::NotInModel { tag: Tag::Unitary, why: "not hermitian".into() });
        }
        Ok(())
    }

    fn zero(&self) -> Matrix<Ext> {
        Matrix::zeros(self.n, self.n, &self.ez())
    }

    fn add(&self, x: &Matrix<Ext>, y: &Matrix<Ext>) -> Matrix<Ext> {
        x.add(y)
    }

    fn scale(&self, t: &Q, x: &Matrix<Ext>) -> Matrix<Ext> {
        x.scale(&self.e(t.clone()))
    }

    fn coordinates(&self, x: &Matrix<Ext>) -> Vec<Q> {
        x.entries().iter().flat_map(|e| [e.a.clone(), e.b.clone()]).collect()
    }

    fn vplus_basis(&self) -> Vec<(Grade, Matrix<Ext>)> {
        let mut out = Vec::new();
        for a in 0..self.n {
            out.push((self.pos_grade(a, a), self.herm_unit(a, a, self.e(q(1)))));
            for b in a + 1..self.n {
                out.push((self.pos_grade(a, b), self.herm_unit(a, b, self.e(q(1)))));
                out.push((self.pos_grade(a, b), self.herm_unit(a, b, Ext::sqrt_u(self.ctx.u()))));
            }
        }
        out
    }

    fn grade_decompose(&self, x: &Matrix<Ext>) -> Vec<(Grade, Matrix<Ext>)> {
        let mut out = Vec::new();
        for a in 0..self.n {
            for b in a..self.n {
                let v = x.get(a, b);
                if !Field::is_zero(v) {
                    out.push((self.pos_grade(a, b), self.herm_unit(a, b, v.clone())));
                }
            }
        }
        out
    }

    fn identity(&self) -> UnitaryGroup {
        UnitaryGroup { g: Matrix::identity(self.n, &self.ez()), mu: q(1) }
    }

    fn compose(&self, a: &UnitaryGroup, b: &UnitaryGroup) -> UnitaryGroup {
        UnitaryGroup { g: a.g.mul(&b.g), mu: &a.mu * &b.mu }
    }

    fn act(&self, h: &UnitaryGroup, x: &Matrix<Ext>) -> Matrix<Ext> {
        h.g.mul(x).mul(&h.g.adjoint()).scale(&self.e(h.mu.recip()))
    }

    fn check_group(&self, h: &UnitaryGroup) -> Result<(), RealizationError> {
        if h.g.rows() != self.n || Field::is_zero(&h.g.det()) || h.mu.is_zero() {
            return Err(RealizationError::Singular);
        }
        Ok(())
    }

    fn random_group(&self, rng: &mut ChaCha8Rng) -> UnitaryGroup {
        let ctx = self.ctx;
        let g = random_invertible(
            self.n,
            rng,
            &mut |r| random_ext(&ctx, r),
            &mut |r| random_nonzero_ext(&ctx, r),
            &self.ez(),
        );
        UnitaryGroup { g, mu: random_scalar(&ctx, rng) }
    }

    fn random_unipotent(&self, rng: &mut ChaCha8Rng) -> UnitaryGroup {
        let ctx = self.ctx;
        UnitaryGroup { g: random_lower(self.n, rng, &mut |r| random_ext(&ctx, r), None, &self.ez()), mu: q(1) }
    }

    fn random_parabolic(&self, rng: &mut ChaCha8Rng) -> UnitaryGroup {
        let ctx = self.ctx;
        let g = random_lower(
            self.n,
            rng,
            &mut |r| random_ext(&ctx, r),
            Some(&mut |r| random_nonzero_ext(&ctx, r)),
            &self.ez(),
        );
        UnitaryGroup { g, mu: random_scalar(&ctx, rng) }
    }

    fn chi0(&self, h: &UnitaryGroup) -> Q {
        h.g.det().norm() * pow_q(&h.mu, -(self.n as i64))
    }

    fn scalar(&self, mu: &Q) -> UnitaryGroup {
        UnitaryGroup { g: Matrix::identity(self.n, &self.ez()), mu: mu.clone() }
    }

    fn delta(&self, j: usize, x: &Matrix<Ext>) -> Result<Q, RealizationError> {
        let k = self.k();
        if j > k {
            return Err(RealizationError::IndexOutOfRange { j, k });
        }
        Ok(real(&x.leading(k + 1 - j).det()))
    }

    fn orbit_invariants(&self, x: &Matrix<Ext>) -> OrbitInvariant {
        let (diag, _) = congruence_diagonalize(x);
        let m = diag.len();
        let payload = if m > 0 && m % 2 == 0 {
            let det: Q = diag.iter().map(real).product();
            Payload::DetIsNorm(self.ctx.is_norm(&det).expect("nonzero determinant"))
        } else {
            Payload::None
        };
        OrbitInvariant { rank: m, payload }
    }

    fn p_orbit_class(&self, x: &Matrix<Ext>) -> Result<Vec<PClass>, RealizationError> {
        self.in_open_p_orbit_set(x)?;
        let k = self.k();
        let dk = self.delta(k, x)?;
        (0..k)
            .map(|j| {
                let r = self.delta(j, x)? / pow_q(&dk, (k + 1 - j) as i64);
                Ok(PClass::Norm(self.ctx.is_norm(&r)?))
            })
            .collect()
    }

    fn slot_choices(&self) -> Vec<Q> {
        SquareClass::ALL.iter().map(|c| self.ctx.rep(*c)).collect()
    }

    fn diagonal(&self, slots: &[Option<Q>]) -> Matrix<Ext> {
        let k = self.k();
        let mut m = self.zero();
        for (j, s) in slots.iter().enumerate() {
            if let Some(v) = s {
                m.set(k - j, k - j, self.e(v.clone()));
            }
        }
        m
    }

    fn unit_slot(&self) -> Q {
        q(1)
    }

    /// `ψ(B) = -u⁻¹ B⁻¹`.
    fn psi(&self, x: &Matrix<Ext>) -> Result<Matrix<Ext>, RealizationError> {
        let inv = x.inverse().ok_or(RealizationError::Singular)?;
        Ok(inv.scale(&self.e(-self.ctx.u_q().recip())))
    }

    fn gamma(&self, y: &Matrix<Ext>) -> Result<Matrix<Ext>, RealizationError> {
        Ok(flip(y, &self.e(self.ctx.u_q())))
    }

    fn gamma_plus(&self, x: &Matrix<Ext>) -> Result<Matrix<Ext>, RealizationError> {
        Ok(flip(x, &self.e(self.ctx.u_q().recip())))
    }

    /// In `sl(2n, E)`: `X̂ = [[0, √u B], [0, 0]]`, `Ŷ = [[0, 0], [√u C, 0]]`.
    fn ad_triple_holds(&self, x: &Matrix<Ext>) -> Result<bool, RealizationError> {
        let y = self.psi(x)?;
        let s = Ext::sqrt_u(self.ctx.u());
        let n = self.n;
        let xh = ambient(Some(&x.scale(&s)), None, n, &self.ez());
        let yh = ambient(None, Some(&y.scale(&s)), n, &self.ez());
        Ok(yh.mul(&xh).sub(&xh.mul(&yh)) == h0(n, &self.ez()))
    }
}

impl JsonElem for Unitary {
    fn parse_elem(&self, entries: &[serde_json::Value]) -> Result<Matrix<Ext>, RealizationError> {
        let m = parse_ext_matrix(&self.ctx, entries)?;
        self.check(&m)?;
        Ok(m)
    }

    fn elem_to_json(&self, x: &Matrix<Ext>) -> serde_json::Value {
        (0..x.rows()).map(|i| x.row(i).iter().map(ext_to_json).collect::<Vec<_>>()).collect::<Vec<_>>().into()
    }
}
