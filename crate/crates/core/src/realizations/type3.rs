//! The type III model: `V⁺ = {X ∈ Sym(2(k+1), E) : J X̄ = X Jᵗ}` with
//! `J = diag(J_π, …, J_π)`, `J_π = [[0, π], [1, 0]]`, acted on by
//! `[g, μ]·X = μ⁻¹ g X gᵗ` for `g ∈ G⁰ ∪ √u G⁰`, `G⁰ = {g : J ḡ = g J}`.
//!
//! The 2×2 blocks of `G⁰` lie in the quaternion algebra
//! `𝕃 = {[[a, π c̄], [c, ā]]}`; diagonal blocks of `V⁺` lie in
//! `𝕊⁺ = {[[π x̄, μ], [μ, x]] : x ∈ E, μ ∈ F}` and `δ(Y) = -det Y` on them.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::catalog::descriptor;
use crate::linalg::congruence_diagonalize;

#[derive(Debug, Clone)]
pub struct Type3 {
    k: usize,
    ctx: PadicContext,
    slots: Vec<Matrix<Ext>>,
}

/// `[g, μ]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Type3Group {
    pub g: Matrix<Ext>,
    pub mu: Q,
}

fn subsets(n: usize, m: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, m: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == m {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, m, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, m, &mut Vec::new(), &mut out);
    out
}

impl Type3 {
    pub fn new(k: usize, ctx: PadicContext) -> Result<Self, RealizationError> {
        check_size(k, 0, 5)?;
        let mut t = Type3 { k, ctx, slots: Vec::new() };
        t.slots = t.find_slot_representatives();
        Ok(t)
    }

    fn size(&self) -> usize {
        2 * (self.k + 1)
    }

    fn e(&self, x: Q) -> Ext {
        Ext::from_q(x, self.ctx.u())
    }

    fn ez(&self) -> Ext {
        Ext::zero(self.ctx.u())
    }

    fn sqrt_u(&self) -> Ext {
        Ext::sqrt_u(self.ctx.u())
    }

    fn pi(&self) -> Ext {
        self.e(self.ctx.pi_q())
    }

    /// `[[π x̄, μ], [μ, x]] ∈ 𝕊⁺`.
    pub fn splus(&self, mu: &Q, x: &Ext) -> Matrix<Ext> {
        let m = self.e(mu.clone());
        Matrix::from_rows(vec![vec![self.pi().mul(&x.conj()), m.clone()], vec![m, x.clone()]])
    }

    /// Off-diagonal block `[[π d̄, c̄], [c, d]]`.
    fn offblock(&self, c: &Ext, d: &Ext) -> Matrix<Ext> {
        Matrix::from_rows(vec![vec![self.pi().mul(&d.conj()), c.conj()], vec![c.clone(), d.clone()]])
    }

    /// `[[a, π c̄], [c, ā]] ∈ 𝕃`.
    pub fn lblock(&self, a: &Ext, c: &Ext) -> Matrix<Ext> {
        Matrix::from_rows(vec![vec![a.clone(), self.pi().mul(&c.conj())], vec![c.clone(), a.conj()]])
    }

    pub fn j_matrix(&self) -> Matrix<Ext> {
        let n = self.size();
        let mut m = Matrix::zeros(n, n, &self.ez());
        for r in 0..=self.k {
            m.set(2 * r, 2 * r + 1, self.pi());
            m.set(2 * r + 1, 2 * r, self.e(q(1)));
        }
        m
    }

    fn put(&self, m: &mut Matrix<Ext>, r: usize, s: usize, b: &Matrix<Ext>) {
        for i in 0..2 {
            for j in 0..2 {
                m.set(2 * r + i, 2 * s + j, b.get(i, j).clone());
            }
        }
    }

    fn block(&self, m: &Matrix<Ext>, r: usize, s: usize) -> Matrix<Ext> {
        m.submatrix(&[2 * r, 2 * r + 1], &[2 * s, 2 * s + 1])
    }

    /// `δ` of a diagonal block.
    pub fn block_delta(&self, b: &Matrix<Ext>) -> Q {
        -real(&b.det())
    }

    /// Blocks of `𝕊⁺` whose `δ` represents `1`, `π`, `uπ` (in that order).
    fn find_slot_representatives(&self) -> Vec<Matrix<Ext>> {
        let targets = [SquareClass::One, SquareClass::Pi, SquareClass::UPi];
        let u = self.ctx.u();
        let mut candidates = Vec::new();
        for mu in [q(0), q(1), self.ctx.u_q()] {
            for a in 0..4 {
                for b in 0..4 {
                    candidates.push((mu.clone(), Ext::new(q(a), q(b), u)));
                }
            }
        }
        targets
            .iter()
            .map(|t| {
                candidates
                    .iter()
                    .map(|(mu, x)| self.splus(mu, x))
                    .find(|blk| {
                        let d = self.block_delta(blk);
                        !d.is_zero() && self.ctx.square_class(&d).ok() == Some(*t)
                    })
                    .expect("every class in {1, π, uπ} is a value of δ")
            })
            .collect()
    }

    fn random_l(&self, rng: &mut ChaCha8Rng, invertible: bool) -> Matrix<Ext> {
        loop {
            let a = random_ext(&self.ctx, rng);
            let c = random_ext(&self.ctx, rng);
            if !invertible || !(a.is_zero() && c.is_zero()) {
                return self.lblock(&a, &c);
            }
        }
    }

    /// Block-triangular element of `G⁰` with `𝕃` blocks; unipotent unless
    /// `diag`.
    fn block_triangular(&self, rng: &mut ChaCha8Rng, lower: bool, diag: bool) -> Matrix<Ext> {
        let n = self.size();
        let mut g = Matrix::identity(n, &self.ez());
        for r in 0..=self.k {
            for s in 0..r {
                let b = self.random_l(rng, false);
                if lower {
                    self.put(&mut g, r, s, &b);
                } else {
                    self.put(&mut g, s, r, &b);
                }
            }
            if diag {
                let b = self.random_l(rng, true);
                self.put(&mut g, r, r, &b);
            }
        }
        g
    }

    fn maybe_sqrt_u(&self, g: Matrix<Ext>, rng: &mut ChaCha8Rng) -> Matrix<Ext> {
        if rng.gen_bool(0.5) {
            g.scale(&self.sqrt_u())
        } else {
            g
        }
    }

    /// Gram matrix of `C₁, C₂ ↦ -Tr(X C₁ X C₂)` on a basis of `V⁻`.
    pub fn qx_gram(&self, x: &Matrix<Ext>) -> Result<Matrix<Q>, RealizationError> {
        let basis: Vec<Matrix<Ext>> =
            self.vplus_basis().iter().map(|(_, b)| self.gamma_plus(b)).collect::<Result<_, _>>()?;
        let xc: Vec<Matrix<Ext>> = basis.iter().map(|c| x.mul(c)).collect();
        Ok(Matrix::from_fn(basis.len(), basis.len(), |a, b| -real(&xc[a].mul(&xc[b]).trace())))
    }
}

impl Model for Type3 {
    type Elem = Matrix<Ext>;
    type Group = Type3Group;
    type Slot = Matrix<Ext>;

    fn tag(&self) -> Tag {
        Tag::Type3
    }

    fn ctx(&self) -> &PadicContext {
        &self.ctx
    }

    fn k(&self) -> usize {
        self.k
    }

    fn kappa(&self) -> i64 {
        2
    }

    fn descriptor(&self) -> Result<GradedDescriptor, RealizationError> {
        Ok(if self.k == 0 { descriptor("5", &[])? } else { descriptor("7", &[("k", self.k as i64)])? })
    }

    fn check(&self, x: &Matrix<Ext>) -> Result<(), RealizationError> {
        let n = self.size();
        let fail = |why: &str| Err(RealizationError::NotInModel { tag: Tag::Type3, why: why.into() });
        if x.rows() != n || x.cols() != n {
            return fail(&format!("expected {n}x{n}"));
        }
        if !x.is_symmetric() {
            return fail("not symmetric");
        }
        let j = self.j_matrix();
        if j.mul(&x.conj()) != x.mul(&j.transpose()) {
            return fail("J conj(X) != X Jᵗ");
        }
        Ok(())
    }

    fn zero(&self) -> Matrix<Ext> {
        Matrix::zeros(self.size(), self.size(), &self.ez())
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
        let (one, s, z) = (self.e(q(1)), self.sqrt_u(), self.ez());
        let k = self.k;
        let mut out = Vec::new();
        for r in 0..=k {
            for blk in [self.splus(&q(1), &z), self.splus(&q(0), &one), self.splus(&q(0), &s)] {
                let mut m = self.zero();
                self.put(&mut m, r, r, &blk);
                out.push((Grade::Root(k - r), m));
            }
            for t in r + 1..=k {
                for (c, d) in [(&one, &z), (&s, &z), (&z, &one), (&z, &s)] {
                    let blk = self.offblock(c, d);
                    let mut m = self.zero();
                    self.put(&mut m, r, t, &blk);
                    self.put(&mut m, t, r, &blk.transpose());
                    out.push((Grade::Pair(k - t, k - r), m));
                }
            }
        }
        out
    }

    fn grade_decompose(&self, x: &Matrix<Ext>) -> Vec<(Grade, Matrix<Ext>)> {
        let k = self.k;
        let mut out = Vec::new();
        for r in 0..=k {
            for t in r..=k {
                let b = self.block(x, r, t);
                if b.is_zero() {
                    continue;
                }
                let mut m = self.zero();
                self.put(&mut m, r, t, &b);
                self.put(&mut m, t, r, &self.block(x, t, r));
                let g = if r == t { Grade::Root(k - r) } else { Grade::Pair(k - t, k - r) };
                out.push((g, m));
            }
        }
        out
    }

    fn identity(&self) -> Type3Group {
        Type3Group { g: Matrix::identity(self.size(), &self.ez()), mu: q(1) }
    }

    fn compose(&self, a: &Type3Group, b: &Type3Group) -> Type3Group {
        Type3Group { g: a.g.mul(&b.g), mu: &a.mu * &b.mu }
    }

    fn act(&self, h: &Type3Group, x: &Matrix<Ext>) -> Matrix<Ext> {
        h.g.mul(x).mul(&h.g.transpose()).scale(&self.e(h.mu.recip()))
    }

    fn check_group(&self, h: &Type3Group) -> Result<(), RealizationError> {
        if h.g.rows() != self.size() || Field::is_zero(&h.g.det()) || h.mu.is_zero() {
            return Err(RealizationError::Singular);
        }
        let j = self.j_matrix();
        let (lhs, rhs) = (j.mul(&h.g.conj()), h.g.mul(&j));
        if lhs != rhs && lhs != rhs.neg() {
            return Err(RealizationError::NotInModel { tag: Tag::Type3, why: "g is not in G⁰ ∪ √u G⁰".into() });
        }
        Ok(())
    }

    fn random_group(&self, rng: &mut ChaCha8Rng) -> Type3Group {
        let mut g = self.block_triangular(rng, true, true);
        for _ in 0..(self.k + 1) {
            g = self.block_triangular(rng, false, false).mul(&g).mul(&self.block_triangular(rng, true, false));
        }
        if self.k > 0 && rng.gen_bool(0.5) {
            let (r, s) = (rng.gen_range(0..=self.k), rng.gen_range(0..=self.k));
            let mut p = self.zero();
            for t in 0..=self.k {
                let t2 = if t == r { s } else if t == s { r } else { t };
                self.put(&mut p, t, t2, &Matrix::identity(2, &self.ez()));
            }
            g = p.mul(&g);
        }
        Type3Group { g: self.maybe_sqrt_u(g, rng), mu: random_scalar(&self.ctx, rng) }
    }

    fn random_unipotent(&self, rng: &mut ChaCha8Rng) -> Type3Group {
        Type3Group { g: self.block_triangular(rng, true, false), mu: q(1) }
    }

    fn random_parabolic(&self, rng: &mut ChaCha8Rng) -> Type3Group {
        let g = self.block_triangular(rng, true, true);
        Type3Group { g: self.maybe_sqrt_u(g, rng), mu: random_scalar(&self.ctx, rng) }
    }

    fn chi0(&self, h: &Type3Group) -> Q {
        let d = real(&h.g.det());
        &d * &d * pow_q(&h.mu, -(self.size() as i64))
    }

    fn scalar(&self, mu: &Q) -> Type3Group {
        Type3Group { g: Matrix::identity(self.size(), &self.ez()), mu: mu.clone() }
    }

    /// `Δ_j = (-1)^{k+1-j}` times the leading minor of size `2(k+1-j)`.
    fn delta(&self, j: usize, x: &Matrix<Ext>) -> Result<Q, RealizationError> {
        let k = self.k;
        if j > k {
            return Err(RealizationError::IndexOutOfRange { j, k });
        }
        Ok(sign_pow(k + 1 - j) * real(&x.leading(2 * (k + 1 - j)).det()))
    }

    /// Rank `m` in blocks and the parities of `(n₁, n₂, n₃)`, read off from
    /// `(-1)^m` times a nonsingular principal `m`-block minor, whose square
    /// class is `π^{n₂+n₃} u^{n₃}`.
    fn orbit_invariants(&self, x: &Matrix<Ext>) -> OrbitInvariant {
        let r = x.rank();
        debug_assert!(r.is_multiple_of(2));
        let m = r / 2;
        if m == 0 {
            return OrbitInvariant::zero();
        }
        let c = subsets(self.k + 1, m)
            .into_iter()
            .find_map(|blocks| {
                let idx: Vec<usize> = blocks.iter().flat_map(|b| [2 * b, 2 * b + 1]).collect();
                let d = sign_pow(m) * real(&x.submatrix(&idx, &idx).det());
                (!d.is_zero()).then(|| self.ctx.square_class(&d).expect("nonzero"))
            })
            .expect("a symmetric matrix of block rank m has a nonsingular principal m-block minor");
        let (a, b) = (c.has_pi() as u8, c.has_u() as u8);
        OrbitInvariant { rank: m, payload: Payload::Parity([((m as u8) + a) % 2, (a + b) % 2, b]) }
    }

    fn p_orbit_class(&self, x: &Matrix<Ext>) -> Result<Vec<PClass>, RealizationError> {
        self.in_open_p_orbit_set(x)?;
        (0..=self.k).map(|j| Ok(PClass::Square(self.ctx.square_class(&self.delta(j, x)?)?))).collect()
    }

    fn slot_choices(&self) -> Vec<Matrix<Ext>> {
        self.slots.clone()
    }

    fn diagonal(&self, slots: &[Option<Matrix<Ext>>]) -> Matrix<Ext> {
        let mut m = self.zero();
        for (j, s) in slots.iter().enumerate() {
            if let Some(b) = s {
                self.put(&mut m, self.k - j, self.k - j, b);
            }
        }
        m
    }

    fn unit_slot(&self) -> Matrix<Ext> {
        self.slots[0].clone()
    }

    fn psi(&self, x: &Matrix<Ext>) -> Result<Matrix<Ext>, RealizationError> {
        Ok(x.inverse().ok_or(RealizationError::Singular)?.neg())
    }

    fn gamma(&self, y: &Matrix<Ext>) -> Result<Matrix<Ext>, RealizationError> {
        Ok(flip(y, &self.e(q(1))))
    }

    fn gamma_plus(&self, x: &Matrix<Ext>) -> Result<Matrix<Ext>, RealizationError> {
        Ok(flip(x, &self.e(q(1))))
    }

    fn ad_triple_holds(&self, x: &Matrix<Ext>) -> Result<bool, RealizationError> {
        let y = self.psi(x)?;
        let n = self.size();
        let xh = ambient(Some(x), None, n, &self.ez());
        let yh = ambient(None, Some(&y), n, &self.ez());
        Ok(yh.mul(&xh).sub(&xh.mul(&yh)) == h0(n, &self.ez()))
    }

    fn q_form_qx(&self, x: &Matrix<Ext>) -> Result<QForm, RealizationError> {
        self.check(x)?;
        let (diag, rad) = congruence_diagonalize(&self.qx_gram(x)?);
        Ok(QForm::new(diag, rad)?)
    }
}

impl JsonElem for Type3 {
    fn parse_elem(&self, entries: &[serde_json::Value]) -> Result<Matrix<Ext>, RealizationError> {
        let m = parse_ext_matrix(&self.ctx, entries)?;
        self.check(&m)?;
        Ok(m)
    }

    fn elem_to_json(&self, x: &Matrix<Ext>) -> serde_json::Value {
        (0..x.rows()).map(|i| x.row(i).iter().map(ext_to_json).collect::<Vec<_>>()).collect::<Vec<_>>().into()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbits::{chi0_image, open_orbit_count, rank_qx, total_orbit_count, Chi0Image};
    use crate::realizations::testing::*;

    fn ctx() -> PadicContext {
        PadicContext::new(5).unwrap()
    }

    #[test]
    fn slot_representatives_cover_the_three_classes() {
        for p in [3, 5, 7, 13] {
            let m = Type3::new(1, PadicContext::new(p).unwrap()).unwrap();
            let classes: Vec<SquareClass> =
                m.slot_choices().iter().map(|b| m.ctx.square_class(&m.block_delta(b)).unwrap()).collect();
            assert_eq!(classes, vec![SquareClass::One, SquareClass::Pi, SquareClass::UPi], "p={p}");
        }
    }

    #[test]
    fn delta_never_takes_class_u_on_a_block() {
        // -det [[π x̄, μ], [μ, x]] = μ² - π N(x) is anisotropic with -disc = u.
        let m = Type3::new(0, ctx()).unwrap();
        let u = m.ctx.u();
        for mu in -6..=6 {
            for a in -6..=6 {
                for b in -6..=6 {
                    let d = m.block_delta(&m.splus(&q(mu), &Ext::new(q(a), q(b), u)));
                    if !d.is_zero() {
                        assert_ne!(m.ctx.square_class(&d).unwrap(), SquareClass::U);
                    }
                }
            }
        }
    }

    #[test]
    fn structure_checks() {
        for k in 0..=2 {
            check_model(&Type3::new(k, ctx()).unwrap(), 30 + k as u64, 10);
        }
    }

    #[test]
    fn random_group_elements_are_in_the_group() {
        let m = Type3::new(2, ctx()).unwrap();
        let mut r = rng(1);
        for _ in 0..20 {
            m.check_group(&m.random_group(&mut r)).unwrap();
            m.check_group(&m.random_parabolic(&mut r)).unwrap();
            m.check_group(&m.random_unipotent(&mut r)).unwrap();
        }
    }

    #[test]
    fn psi_identity_and_ad_triple() {
        let mut r = rng(7);
        for k in 0..=2 {
            let m = Type3::new(k, ctx()).unwrap();
            for _ in 0..6 {
                let x = random_generic(&m, &mut r);
                assert!(m.ad_triple_holds(&x).unwrap());
                let y = m.psi(&x).unwrap();
                assert_eq!(m.gamma(&m.gamma_plus(&x).unwrap()).unwrap(), x);
                assert_eq!(m.gamma_plus(&m.gamma(&y).unwrap()).unwrap(), y);
                if m.in_open_p_orbit_set(&x).is_ok() {
                    m.check(&m.gamma(&y).unwrap()).unwrap();
                    assert!(psi_identity_holds(&m, &x).unwrap());
                    assert!(character_identity_holds(&m, &x, &vec![1; k + 1]).unwrap());
                }
            }
        }
    }

    #[test]
    fn orbit_counts() {
        for k in 0..=3 {
            let m = Type3::new(k, ctx()).unwrap();
            let d = m.descriptor().unwrap();
            let (nonzero, open) = orbit_census(&m);
            assert_eq!(nonzero, 4 * k + 3, "k={k}");
            assert_eq!(nonzero as u64 + 1, total_orbit_count(&d).unwrap());
            assert_eq!(open as u64, open_orbit_count(&d).unwrap());
            assert_eq!(p_orbit_census(&m).unwrap(), 3usize.pow(k as u32 + 1));
        }
    }

    #[test]
    fn qx_rank_law() {
        let m = Type3::new(2, ctx()).unwrap();
        let unit = m.unit_slot();
        for rank in 0..=3usize {
            let slots: Vec<Option<Matrix<Ext>>> = (0..3).map(|j| (j < rank).then(|| unit.clone())).collect();
            let qf = m.q_form_qx(&m.diagonal(&slots)).unwrap();
            assert_eq!(qf.rank() as i64, rank_qx(rank as i64, 3, 4), "rank {rank}");
        }
    }

    #[test]
    fn chi0_values_are_squares() {
        let m = Type3::new(1, ctx()).unwrap();
        assert_eq!(chi0_image(&m.descriptor().unwrap()).unwrap(), Chi0Image::InSquares);
        let mut r = rng(11);
        for _ in 0..50 {
            assert!(m.ctx.is_square(&m.chi0(&m.random_group(&mut r))));
        }
    }
}
