//! `V⁺ = Sym(n, F)` with `(g, μ)·B = μ⁻¹ g B gᵗ`.

use rand_chacha::ChaCha8Rng;

use super::*;
use crate::catalog::descriptor;
use crate::linalg::congruence_diagonalize;
use crate::qform::similarity_class_id;

#[derive(Debug, Clone)]
pub struct Sp {
    n: usize,
    ctx: PadicContext,
}

/// `(g, μ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpGroup {
    pub g: Matrix<Q>,
    pub mu: Q,
}

impl Sp {
    pub fn new(n: usize, ctx: PadicContext) -> Result<Self, RealizationError> {
        check_size(n, 2, 8)?;
        Ok(Sp { n, ctx })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn unit(&self, i: usize, j: usize) -> Matrix<Q> {
        let mut m = Matrix::zeros(self.n, self.n, &q(0));
        m.set(i, j, q(1));
        m.set(j, i, q(1));
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

    /// Symmetric bilinear form on `V⁻` attached to `x`: `-Tr(x c₁ x c₂)`.
    pub fn qx_gram(&self, x: &Matrix<Q>) -> Result<Matrix<Q>, RealizationError> {
        let basis: Vec<Matrix<Q>> = self
            .vplus_basis()
            .iter()
            .map(|(_, b)| self.gamma_plus(b))
            .collect::<Result<_, _>>()?;
        let xc: Vec<Matrix<Q>> = basis.iter().map(|c| x.mul(c)).collect();
        Ok(Matrix::from_fn(basis.len(), basis.len(), |a, b| -xc[a].mul(&xc[b]).trace()))
    }
}

impl Model for Sp {
    type Elem = Matrix<Q>;
    type Group = SpGroup;
    type Slot = Q;

    fn tag(&self) -> Tag {
        Tag::Sp
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
        Ok(descriptor("6", &[("n", self.n as i64)])?)
    }

    fn check(&self, x: &Matrix<Q>) -> Result<(), RealizationError> {
        if x.rows() != self.n || x.cols() != self.n {
            return Err(RealizationError::NotInModel { tag: Tag::Sp, why: format!("expected {0}x{0}", self.n) });
        }
        if !x.is_symmetric() {
            return Err(RealizationError::NotInModel { tag: Tag::Sp, why: "not symmetric".into() });
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
        let mut out = Vec::new();
        for a in 0..self.n {
            for b in a..self.n {
                out.push((self.pos_grade(a, b), self.unit(a, b)));
            }
        }
        out
    }

    fn grade_decompose(&self, x: &Matrix<Q>) -> Vec<(Grade, Matrix<Q>)> {
        let mut out = Vec::new();
        for a in 0..self.n {
            for b in a..self.n {
                let v = x.get(a, b);
                if !v.is_zero() {
                    out.push((self.pos_grade(a, b), self.unit(a, b).scale(v)));
                }
            }
        }
        out
    }

    fn identity(&self) -> SpGroup {
        SpGroup { g: Matrix::identity(self.n, &q(0)), mu: q(1) }
    }

    fn compose(&self, a: &SpGroup, b: &SpGroup) -> SpGroup {
        SpGroup { g: a.g.mul(&b.g), mu: &a.mu * &b.mu }
    }

    fn act(&self, h: &SpGroup, x: &Matrix<Q>) -> Matrix<Q> {
        h.g.mul(x).mul(&h.g.transpose()).scale(&h.mu.recip())
    }

    fn check_group(&self, h: &SpGroup) -> Result<(), RealizationError> {
        if h.g.rows() != self.n || h.g.det().is_zero() || h.mu.is_zero() {
            return Err(RealizationError::Singular);
        }
        Ok(())
    }

    fn random_group(&self, rng: &mut ChaCha8Rng) -> SpGroup {
        let ctx = self.ctx;
        let g = random_invertible(self.n, rng, &mut random_small, &mut |r| random_scalar(&ctx, r), &q(0));
        SpGroup { g, mu: random_scalar(&ctx, rng) }
    }

    fn random_unipotent(&self, rng: &mut ChaCha8Rng) -> SpGroup {
        SpGroup { g: random_lower(self.n, rng, &mut random_small, None, &q(0)), mu: q(1) }
    }

    fn random_parabolic(&self, rng: &mut ChaCha8Rng) -> SpGroup {
        let ctx = self.ctx;
        let g = random_lower(self.n, rng, &mut random_small, Some(&mut |r| random_scalar(&ctx, r)), &q(0));
        SpGroup { g, mu: random_scalar(&ctx, rng) }
    }

    fn chi0(&self, h: &SpGroup) -> Q {
        let d = h.g.det();
        &d * &d * pow_q(&h.mu, -(self.n as i64))
    }

    fn scalar(&self, mu: &Q) -> SpGroup {
        SpGroup { g: Matrix::identity(self.n, &q(0)), mu: mu.clone() }
    }

    fn delta(&self, j: usize, x: &Matrix<Q>) -> Result<Q, RealizationError> {
        let k = self.k();
        if j > k {
            return Err(RealizationError::IndexOutOfRange { j, k });
        }
        Ok(x.leading(k + 1 - j).det())
    }

    fn orbit_invariants(&self, x: &Matrix<Q>) -> OrbitInvariant {
        let (diag, _) = congruence_diagonalize(x);
        if diag.is_empty() {
            return OrbitInvariant::zero();
        }
        let form = QForm::from_diagonal(&diag);
        OrbitInvariant { rank: diag.len(), payload: Payload::Similarity(similarity_class_id(&self.ctx, &form)) }
    }

    fn p_orbit_class(&self, x: &Matrix<Q>) -> Result<Vec<PClass>, RealizationError> {
        self.in_open_p_orbit_set(x)?;
        let k = self.k();
        let dk = self.delta(k, x)?;
        (0..k)
            .map(|j| {
                let r = self.delta(j, x)? / pow_q(&dk, (k + 1 - j) as i64);
                Ok(PClass::Square(self.ctx.square_class(&r)?))
            })
            .collect()
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

    fn q_form_qx(&self, x: &Matrix<Q>) -> Result<QForm, RealizationError> {
        self.check(x)?;
        let (diag, rad) = congruence_diagonalize(&self.qx_gram(x)?);
        Ok(QForm::new(diag, rad)?)
    }
}

impl JsonElem for Sp {
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
    use crate::orbits::{chi0_image, nonzero_orbit_count, open_orbit_count, rank_qx};
    use crate::realizations::testing::*;

    fn ctx() -> PadicContext {
        PadicContext::new(5).unwrap()
    }

    #[test]
    fn structure_checks() {
        for n in 2..=4 {
            check_model(&Sp::new(n, ctx()).unwrap(), n as u64, 20);
        }
    }

    #[test]
    fn psi_identity_and_ad_triple() {
        let mut r = rng(3);
        for n in 2..=4 {
            let m = Sp::new(n, ctx()).unwrap();
            for _ in 0..10 {
                let x = random_generic(&m, &mut r);
                if m.in_open_p_orbit_set(&x).is_err() {
                    continue;
                }
                assert!(m.ad_triple_holds(&x).unwrap());
                assert!(psi_identity_holds(&m, &x).unwrap());
                assert!(character_identity_holds(&m, &x, &vec![1; n]).unwrap());
                let y = m.psi(&x).unwrap();
                assert_eq!(m.gamma(&m.gamma_plus(&x).unwrap()).unwrap(), x);
                assert_eq!(m.gamma_plus(&m.gamma(&y).unwrap()).unwrap(), y);
            }
        }
    }

    #[test]
    fn enumeration_matches_orbit_engine() {
        for n in 2..=4 {
            let m = Sp::new(n, ctx()).unwrap();
            let (nonzero, open) = orbit_census(&m);
            let d = m.descriptor().unwrap();
            assert_eq!(nonzero as u64, nonzero_orbit_count(&d).unwrap(), "n={n}");
            assert_eq!(open as u64, open_orbit_count(&d).unwrap(), "n={n}");
            assert_eq!(enumerate_orbit_classes(&m), enumerate_orbit_classes_sequential(&m));
        }
    }

    #[test]
    fn p_orbit_count_is_four_to_k() {
        for n in 2..=3 {
            let m = Sp::new(n, ctx()).unwrap();
            assert_eq!(p_orbit_census(&m).unwrap(), 4usize.pow(n as u32 - 1));
        }
    }

    #[test]
    fn qx_rank_law() {
        let m = Sp::new(3, ctx()).unwrap();
        for rank in 0..=3usize {
            let slots: Vec<Option<Q>> = (0..3).map(|j| (j < rank).then(|| q(1))).collect();
            let x = m.diagonal(&slots);
            let qf = m.q_form_qx(&x).unwrap();
            assert_eq!(qf.rank() as i64, rank_qx(rank as i64, 1, 1));
        }
    }

    #[test]
    fn chi0_image_for_odd_and_even_n() {
        let mut r = rng(9);
        for n in 2..=3 {
            let m = Sp::new(n, ctx()).unwrap();
            let img = chi0_image(&m.descriptor().unwrap()).unwrap();
            let mut seen = std::collections::BTreeSet::new();
            for _ in 0..200 {
                let c = m.chi0(&m.random_group(&mut r));
                assert!(img.admits(&m.ctx, &c));
                seen.insert(m.ctx.square_class(&c).unwrap());
            }
            assert_eq!(seen.len(), if n % 2 == 1 { 4 } else { 1 });
        }
    }

    #[test]
    fn representatives_round_trip() {
        let m = Sp::new(3, ctx()).unwrap();
        for inv in enumerate_orbit_classes(&m) {
            assert_eq!(m.orbit_invariants(&representative(&m, &inv).unwrap()), inv);
        }
    }

    #[test]
    fn homogeneity_on_class_grid() {
        let m = Sp::new(3, ctx()).unwrap();
        let reps: Vec<Q> = m.slot_choices();
        for a in &reps {
            for b in &reps {
                for c in &reps {
                    assert!(homogeneity_holds(&m, &[a.clone(), b.clone(), c.clone()]).unwrap());
                }
            }
        }
    }
}
