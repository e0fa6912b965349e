//! The rank-one type III model: `V⁺ = F³` with the anisotropic form
//! `Q(x) = x₁² - u x₂² - π x₃²`, acted on by `(g, μ)·x = μ g x`,
//! `g ∈ SO(Q)`.

use rand_chacha::ChaCha8Rng;

use super::*;
use crate::catalog::descriptor;

#[derive(Debug, Clone)]
pub struct Ortho1 {
    ctx: PadicContext,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ortho1Group {
    pub g: Matrix<Q>,
    pub mu: Q,
}

impl Ortho1 {
    pub fn new(ctx: PadicContext) -> Self {
        Ortho1 { ctx }
    }

    pub fn coefficients(&self) -> [Q; 3] {
        [q(1), -self.ctx.u_q(), -self.ctx.pi_q()]
    }

    pub fn form(&self) -> QForm {
        QForm::from_diagonal(&self.coefficients())
    }

    pub fn value(&self, x: &[Q]) -> Q {
        self.coefficients().iter().zip(x).map(|(a, v)| a * v * v).sum()
    }

    /// The reflection `x ↦ x - 2 B(x, v) / Q(v) · v`.
    pub fn reflection(&self, v: &[Q]) -> Result<Matrix<Q>, RealizationError> {
        let qv = self.value(v);
        if qv.is_zero() {
            return Err(RealizationError::Singular);
        }
        let a = self.coefficients();
        Ok(Matrix::from_fn(3, 3, |i, j| {
            let id = if i == j { q(1) } else { q(0) };
            id - q(2) * &v[i] * &a[j] * &v[j] / &qv
        }))
    }

    fn random_vector(&self, rng: &mut ChaCha8Rng) -> Vec<Q> {
        loop {
            let v: Vec<Q> = (0..3).map(|_| random_small(rng)).collect();
            if v.iter().any(|c| !c.is_zero()) {
                return v;
            }
        }
    }
}

fn mat_vec(g: &Matrix<Q>, x: &[Q]) -> Vec<Q> {
    (0..3).map(|i| g.row(i).iter().zip(x).map(|(a, b)| a * b).sum()).collect()
}

impl Model for Ortho1 {
    type Elem = Vec<Q>;
    type Group = Ortho1Group;
    type Slot = Vec<Q>;

    fn tag(&self) -> Tag {
        Tag::Ortho1
    }

    fn ctx(&self) -> &PadicContext {
        &self.ctx
    }

    fn k(&self) -> usize {
        0
    }

    fn kappa(&self) -> i64 {
        2
    }

    fn descriptor(&self) -> Result<GradedDescriptor, RealizationError> {
        Ok(descriptor("5", &[])?)
    }

    fn check(&self, x: &Vec<Q>) -> Result<(), RealizationError> {
        if x.len() != 3 {
            return Err(RealizationError::NotInModel { tag: Tag::Ortho1, why: "expected a vector of length 3".into() });
        }
        Ok(())
    }

    fn zero(&self) -> Vec<Q> {
        vec![q(0); 3]
    }

    fn add(&self, x: &Vec<Q>, y: &Vec<Q>) -> Vec<Q> {
        x.iter().zip(y).map(|(a, b)| a + b).collect()
    }

    fn scale(&self, t: &Q, x: &Vec<Q>) -> Vec<Q> {
        x.iter().map(|a| a * t).collect()
    }

    fn coordinates(&self, x: &Vec<Q>) -> Vec<Q> {
        x.clone()
    }

    fn vplus_basis(&self) -> Vec<(Grade, Vec<Q>)> {
        (0..3).map(|i| (Grade::Root(0), (0..3).map(|j| q((i == j) as i64)).collect())).collect()
    }

    fn grade_decompose(&self, x: &Vec<Q>) -> Vec<(Grade, Vec<Q>)> {
        if x.iter().all(|c| c.is_zero()) {
            Vec::new()
        } else {
            vec![(Grade::Root(0), x.clone())]
        }
    }

    fn identity(&self) -> Ortho1Group {
        Ortho1Group { g: Matrix::identity(3, &q(0)), mu: q(1) }
    }

    fn compose(&self, a: &Ortho1Group, b: &Ortho1Group) -> Ortho1Group {
        Ortho1Group { g: a.g.mul(&b.g), mu: &a.mu * &b.mu }
    }

    fn act(&self, h: &Ortho1Group, x: &Vec<Q>) -> Vec<Q> {
        self.scale(&h.mu, &mat_vec(&h.g, x))
    }

    fn check_group(&self, h: &Ortho1Group) -> Result<(), RealizationError> {
        let a = Matrix::diagonal(&self.coefficients());
        if h.mu.is_zero() || h.g.det() != q(1) || h.g.transpose().mul(&a).mul(&h.g) != a {
            return Err(RealizationError::NotInModel { tag: Tag::Ortho1, why: "g is not in SO(Q)".into() });
        }
        Ok(())
    }

    fn random_group(&self, rng: &mut ChaCha8Rng) -> Ortho1Group {
        let mut g = Matrix::identity(3, &q(0));
        for _ in 0..2 {
            let r1 = self.reflection(&self.random_vector(rng)).expect("Q is anisotropic");
            let r2 = self.reflection(&self.random_vector(rng)).expect("Q is anisotropic");
            g = g.mul(&r1).mul(&r2);
        }
        Ortho1Group { g, mu: random_scalar(&self.ctx, rng) }
    }

    /// `N` is trivial in rank one.
    fn random_unipotent(&self, _rng: &mut ChaCha8Rng) -> Ortho1Group {
        self.identity()
    }

    fn random_parabolic(&self, rng: &mut ChaCha8Rng) -> Ortho1Group {
        self.random_group(rng)
    }

    fn chi0(&self, h: &Ortho1Group) -> Q {
        &h.mu * &h.mu
    }

    fn scalar(&self, mu: &Q) -> Ortho1Group {
        Ortho1Group { g: Matrix::identity(3, &q(0)), mu: mu.clone() }
    }

    fn delta(&self, j: usize, x: &Vec<Q>) -> Result<Q, RealizationError> {
        if j > 0 {
            return Err(RealizationError::IndexOutOfRange { j, k: 0 });
        }
        Ok(self.value(x))
    }

    fn orbit_invariants(&self, x: &Vec<Q>) -> OrbitInvariant {
        let v = self.value(x);
        if v.is_zero() {
            return OrbitInvariant::zero();
        }
        OrbitInvariant { rank: 1, payload: Payload::Class(self.ctx.square_class(&v).expect("nonzero")) }
    }

    fn p_orbit_class(&self, x: &Vec<Q>) -> Result<Vec<PClass>, RealizationError> {
        self.in_open_p_orbit_set(x)?;
        Ok(vec![PClass::Square(self.ctx.square_class(&self.value(x))?)])
    }

    fn slot_choices(&self) -> Vec<Vec<Q>> {
        let vals: Vec<Q> = std::iter::once(q(0)).chain(SquareClass::ALL.iter().map(|c| self.ctx.rep(*c))).collect();
        let mut out = Vec::new();
        for a in &vals {
            for b in &vals {
                for c in &vals {
                    let v = vec![a.clone(), b.clone(), c.clone()];
                    if v.iter().any(|t| !t.is_zero()) {
                        out.push(v);
                    }
                }
            }
        }
        out
    }

    fn diagonal(&self, slots: &[Option<Vec<Q>>]) -> Vec<Q> {
        slots.first().cloned().flatten().unwrap_or_else(|| self.zero())
    }

    fn unit_slot(&self) -> Vec<Q> {
        vec![q(1), q(0), q(0)]
    }
}

impl JsonElem for Ortho1 {
    fn parse_elem(&self, entries: &[serde_json::Value]) -> Result<Vec<Q>, RealizationError> {
        let flat: Vec<&serde_json::Value> = match entries {
            [serde_json::Value::Array(inner)] => inner.iter().collect(),
            _ => entries.iter().collect(),
        };
        let x = flat.into_iter().map(|v| parse_ext_value(&self.ctx, v).map(|e| e.a)).collect::<Result<Vec<_>, _>>()?;
        self.check(&x)?;
        Ok(x)
    }

    fn elem_to_json(&self, x: &Vec<Q>) -> serde_json::Value {
        x.iter().map(q_to_json).collect::<Vec<_>>().into()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qform::{is_isotropic, represented_classes};
    use crate::realizations::testing::*;

    fn ctx() -> PadicContext {
        PadicContext::new(5).unwrap()
    }

    #[test]
    fn structure_checks() {
        check_model(&Ortho1::new(ctx()), 40, 30);
    }

    #[test]
    fn form_is_anisotropic() {
        for p in [3, 5, 7, 11, 13] {
            assert!(!is_isotropic(&PadicContext::new(p).unwrap(), &Ortho1::new(PadicContext::new(p).unwrap()).form()));
        }
    }

    #[test]
    fn open_orbits_are_the_represented_classes() {
        for p in [3, 5, 13] {
            let m = Ortho1::new(PadicContext::new(p).unwrap());
            let found: Vec<SquareClass> = enumerate_orbit_classes(&m)
                .into_iter()
                .filter_map(|c| match c.payload {
                    Payload::Class(s) => Some(s),
                    _ => None,
                })
                .collect();
            let expected: Vec<SquareClass> = represented_classes(&m.ctx, &m.form()).classes.into_iter().collect();
            assert_eq!(found, expected, "p={p}");
            assert_eq!(found.len(), 3);
        }
    }

    #[test]
    fn matches_type3_rank_zero_model() {
        let t = Type3::new(0, ctx()).unwrap();
        let o = Ortho1::new(ctx());
        assert_eq!(orbit_census(&t), orbit_census(&o));
        assert_eq!(p_orbit_census(&t).unwrap(), p_orbit_census(&o).unwrap());
    }
}
