//! Concrete matrix models of `(G, V⁺)`: group actions, relative invariants,
//! the maps `ψ` and `γ`, orbit invariants and brute-force enumeration.
//!
//! Diagonal slot `j` (the root `λ_j`) sits at matrix position `k - j`, so
//! `Δ_j` is a top-left minor of size `k + 1 - j` (in blocks for TYPE3).

use std::collections::BTreeSet;
use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::{CatalogError, GradedDescriptor};
use crate::linalg::{Field, Matrix};
use crate::orbits::t_involution;
use crate::padic::{pow_q, q, Ext, PadicContext, PadicError, SquareClass, Q};
use crate::qform::{QForm, QFormError};

mod gl;
mod ortho1;
mod sp;
mod type3;
mod unitary;

pub use gl::Gl;
pub use ortho1::Ortho1;
pub use sp::Sp;
pub use type3::Type3;
pub use unitary::Unitary;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RealizationError {
    #[error("element does not belong to the {tag} model: {why}")]
    NotInModel { tag: Tag, why: String },
    #[error("matrix is singular")]
    Singular,
    #[error("index {j} out of range 0..={k}")]
    IndexOutOfRange { j: usize, k: usize },
    #[error("element is not in O+ (Δ_{0} vanishes)")]
    NotGeneric(usize),
    #[error("{op} is not available for the {tag} model")]
    Unsupported { op: &'static str, tag: Tag },
    #[error("no element of the {tag} grid has this invariant")]
    Unrealizable { tag: Tag },
    #[error("size {size} is outside the supported range {min}..={max}")]
    Size { size: usize, min: usize, max: usize },
    #[error("unknown model tag `{0}`")]
    UnknownTag(String),
    #[error("bad matrix input: {0}")]
    Parse(String),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    QForm(#[from] QFormError),
    #[error(transparent)]
    Padic(#[from] PadicError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tag {
    Gl,
    Sp,
    Unitary,
    Type3,
    Ortho1,
}

impl Tag {
    pub const ALL: [Tag; 5] = [Tag::Gl, Tag::Sp, Tag::Unitary, Tag::Type3, Tag::Ortho1];

    pub fn name(self) -> &'static str {
        match self {
            Tag::Gl => "gl",
            Tag::Sp => "sp",
            Tag::Unitary => "unitary",
            Tag::Type3 => "type3",
            Tag::Ortho1 => "ortho1",
        }
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Tag {
    type Err = RealizationError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Tag::ALL
            .into_iter()
            .find(|t| t.name() == s.to_ascii_lowercase())
            .ok_or_else(|| RealizationError::UnknownTag(s.into()))
    }
}

/// Model-specific part of an orbit invariant.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Payload {
    None,
    /// Similarity class of the nondegenerate quadratic form.
    Similarity(String),
    /// Whether the determinant of the nondegenerate part is a norm.
    DetIsNorm(bool),
    /// `(n_1, n_2, n_3) mod 2`.
    Parity([u8; 3]),
    /// Square class of `Q(x)`.
    Class(SquareClass),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OrbitInvariant {
    pub rank: usize,
    pub payload: Payload,
}

impl OrbitInvariant {
    pub fn zero() -> Self {
        OrbitInvariant { rank: 0, payload: Payload::None }
    }
}

/// One coordinate of a `P`-orbit class vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PClass {
    Square(SquareClass),
    /// `true` when the value is a norm from `E`.
    Norm(bool),
}

/// The summand of `V⁺` a component lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Grade {
    /// `g̃^{λ_j}`.
    Root(usize),
    /// `E_{i,j}(1,1)` with `i < j`.
    Pair(usize, usize),
}

/// A concrete realization of a graded algebra with its group `G`.
pub trait Model: Send + Sync {
    type Elem: Clone + PartialEq + fmt::Debug + Send + Sync;
    type Group: Clone + fmt::Debug + Send + Sync;
    /// Value placed in one diagonal slot.
    type Slot: Clone + fmt::Debug + Send + Sync;

    fn tag(&self) -> Tag;
    fn ctx(&self) -> &PadicContext;
    /// Rank minus one.
    fn k(&self) -> usize;
    fn kappa(&self) -> i64;
    fn descriptor(&self) -> Result<GradedDescriptor, RealizationError>;

    fn check(&self, x: &Self::Elem) -> Result<(), RealizationError>;
    fn zero(&self) -> Self::Elem;
    fn add(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem;
    fn scale(&self, t: &Q, x: &Self::Elem) -> Self::Elem;
    /// Coordinates over `F`.
    fn coordinates(&self, x: &Self::Elem) -> Vec<Q>;
    /// An `F`-basis of `V⁺`, each vector inside a single graded summand.
    fn vplus_basis(&self) -> Vec<(Grade, Self::Elem)>;
    fn grade_decompose(&self, x: &Self::Elem) -> Vec<(Grade, Self::Elem)>;

    fn identity(&self) -> Self::Group;
    fn compose(&self, g: &Self::Group, h: &Self::Group) -> Self::Group;
    fn act(&self, g: &Self::Group, x: &Self::Elem) -> Self::Elem;
    fn check_group(&self, g: &Self::Group) -> Result<(), RealizationError>;
    fn random_group(&self, rng: &mut ChaCha8Rng) -> Self::Group;
    /// A random element of the unipotent radical `N` of `P`.
    fn random_unipotent(&self, rng: &mut ChaCha8Rng) -> Self::Group;
    /// A random element of `P`.
    fn random_parabolic(&self, rng: &mut ChaCha8Rng) -> Self::Group;
    /// `χ₀(g)`, with `Δ₀(g·x) = χ₀(g) Δ₀(x)`.
    fn chi0(&self, g: &Self::Group) -> Q;
    /// The element `(1, μ)` acting by `x ↦ μ⁻¹x` (`μx` for ORTHO1).
    fn scalar(&self, mu: &Q) -> Self::Group;

    fn delta(&self, j: usize, x: &Self::Elem) -> Result<Q, RealizationError>;
    fn orbit_invariants(&self, x: &Self::Elem) -> OrbitInvariant;
    fn p_orbit_class(&self, x: &Self::Elem) -> Result<Vec<PClass>, RealizationError>;

    /// Nonzero choices for one diagonal slot, used by enumeration.
    fn slot_choices(&self) -> Vec<Self::Slot>;
    /// `Σ_j X_j(slot_j)`; `None` leaves the slot empty.
    fn diagonal(&self, slots: &[Option<Self::Slot>]) -> Self::Elem;
    /// A fixed nonzero element `X_j` of `g̃^{λ_j}`.
    fn unit_slot(&self) -> Self::Slot;

    fn psi(&self, _x: &Self::Elem) -> Result<Self::Elem, RealizationError> {
        Err(RealizationError::Unsupported { op: "psi", tag: self.tag() })
    }
    /// `γ: V⁻ → V⁺`.
    fn gamma(&self, _y: &Self::Elem) -> Result<Self::Elem, RealizationError> {
        Err(RealizationError::Unsupported { op: "gamma", tag: self.tag() })
    }
    /// `γ: V⁺ → V⁻`; together with [`Model::gamma`] an involution.
    fn gamma_plus(&self, _x: &Self::Elem) -> Result<Self::Elem, RealizationError> {
        Err(RealizationError::Unsupported { op: "gamma", tag: self.tag() })
    }
    /// Checks `[ψ(x), x] = H₀` in the ambient matrix algebra.
    fn ad_triple_holds(&self, _x: &Self::Elem) -> Result<bool, RealizationError> {
        Err(RealizationError::Unsupported { op: "ad-triple", tag: self.tag() })
    }
    /// `Y ↦ -½ b([X, Y], [X, Y])` on `V⁻`, diagonalized.
    fn q_form_qx(&self, _x: &Self::Elem) -> Result<QForm, RealizationError> {
        Err(RealizationError::Unsupported { op: "q_form_QX", tag: self.tag() })
    }

    /// `∇_j = Δ_j ∘ γ`.
    fn nabla(&self, j: usize, y: &Self::Elem) -> Result<Q, RealizationError> {
        self.delta(j, &self.gamma(y)?)
    }

    fn dim_vplus(&self) -> usize {
        rank_of_rows(&self.vplus_basis().iter().map(|(_, b)| self.coordinates(b)).collect::<Vec<_>>())
    }

    fn same_orbit(&self, x: &Self::Elem, y: &Self::Elem) -> bool {
        self.orbit_invariants(x) == self.orbit_invariants(y)
    }

    fn is_generic(&self, x: &Self::Elem) -> bool {
        self.delta(0, x).map(|d| !d.is_zero()).unwrap_or(false)
    }

    fn in_open_p_orbit_set(&self, x: &Self::Elem) -> Result<(), RealizationError> {
        for j in 0..=self.k() {
            if self.delta(j, x)?.is_zero() {
                return Err(RealizationError::NotGeneric(j));
            }
        }
        Ok(())
    }
}

fn rank_of_rows(rows: &[Vec<Q>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    Matrix::from_rows(rows.to_vec()).rank()
}

/// The anti-diagonal permutation matrix of size `n`.
pub fn antidiagonal<T: Field>(n: usize, proto: &T) -> Matrix<T> {
    Matrix::from_fn(n, n, |i, j| if i + j + 1 == n { proto.one_like() } else { proto.zero_like() })
}

/// `-Γ M Γ` times `c`.
pub(crate) fn flip<T: Field>(m: &Matrix<T>, c: &T) -> Matrix<T> {
    let g = antidiagonal(m.rows(), m.proto());
    g.mul(m).mul(&g).scale(&c.neg())
}

/// Real part of an element of `E` known to lie in `F`.
pub(crate) fn real(e: &Ext) -> Q {
    debug_assert!(e.is_real(), "expected an element of F, got {e}");
    e.a.clone()
}

pub(crate) fn check_size(size: usize, min: usize, max: usize) -> Result<(), RealizationError> {
    if size < min || size > max {
        Err(RealizationError::Size { size, min, max })
    } else {
        Ok(())
    }
}

/// Ambient block matrix `[[a, b], [c, d]]`.
pub(crate) fn ambient<T: Field>(b: Option<&Matrix<T>>, c: Option<&Matrix<T>>, n: usize, proto: &T) -> Matrix<T> {
    let z = Matrix::zeros(n, n, proto);
    Matrix::block2(&z, b.unwrap_or(&z), c.unwrap_or(&z), &z)
}

pub(crate) fn h0<T: Field>(n: usize, proto: &T) -> Matrix<T> {
    let i = Matrix::identity(n, proto);
    let z = Matrix::zeros(n, n, proto);
    Matrix::block2(&i, &z, &z, &i.neg())
}

/// Scalars drawn for random group elements: small integers and square-class
/// representatives, with signs and inverses.
pub(crate) fn random_scalar(ctx: &PadicContext, rng: &mut ChaCha8Rng) -> Q {
    let base = [q(1), q(2), q(3), ctx.u_q(), ctx.pi_q(), ctx.u_q() * ctx.pi_q(), q(7)];
    let mut x = base.choose(rng).unwrap().clone();
    if rng.gen_bool(0.3) {
        x = x.recip();
    }
    if rng.gen_bool(0.5) {
        x = -x;
    }
    x
}

/// Small rational, possibly zero.
pub(crate) fn random_small(rng: &mut ChaCha8Rng) -> Q {
    let n: i64 = rng.gen_range(-4..=4);
    let d: i64 = rng.gen_range(1..=3);
    Q::new(n.into(), d.into())
}

pub(crate) fn random_ext(ctx: &PadicContext, rng: &mut ChaCha8Rng) -> Ext {
    Ext::new(random_small(rng), random_small(rng), ctx.u())
}

pub(crate) fn random_nonzero_ext(ctx: &PadicContext, rng: &mut ChaCha8Rng) -> Ext {
    loop {
        let mut x = random_ext(ctx, rng);
        if rng.gen_bool(0.3) {
            x = x.scale(&ctx.pi_q());
        }
        if !x.is_zero() {
            return x;
        }
    }
}

/// Random invertible matrix: a product of transvections and a diagonal.
pub(crate) fn random_invertible<T: Field>(
    n: usize,
    rng: &mut ChaCha8Rng,
    scalar: &mut dyn FnMut(&mut ChaCha8Rng) -> T,
    unit: &mut dyn FnMut(&mut ChaCha8Rng) -> T,
    proto: &T,
) -> Matrix<T> {
    let mut g = Matrix::diagonal(&(0..n).map(|_| unit(rng)).collect::<Vec<_>>());
    if n < 2 {
        return g;
    }
    for _ in 0..(2 * n) {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let mut t = Matrix::identity(n, proto);
        t.set(i, j, scalar(rng));
        g = if rng.gen_bool(0.5) { t.mul(&g) } else { g.mul(&t) };
    }
    g
}

/// Random lower unitriangular (`diag = None`) or lower triangular matrix.
pub(crate) fn random_lower<T: Field>(
    n: usize,
    rng: &mut ChaCha8Rng,
    scalar: &mut dyn FnMut(&mut ChaCha8Rng) -> T,
    diag: Option<&mut dyn FnMut(&mut ChaCha8Rng) -> T>,
    proto: &T,
) -> Matrix<T> {
    let mut m = Matrix::identity(n, proto);
    for i in 0..n {
        for j in 0..i {
            m.set(i, j, scalar(rng));
        }
    }
    if let Some(d) = diag {
        for i in 0..n {
            m.set(i, i, d(rng));
        }
    }
    m
}

/// Random element of `V⁺`: a combination of basis vectors with small
/// rational coefficients.
pub fn random_element<M: Model>(m: &M, rng: &mut ChaCha8Rng) -> M::Elem {
    let mut x = m.zero();
    for (_, b) in m.vplus_basis() {
        x = m.add(&x, &m.scale(&random_small(rng), &b));
    }
    x
}

/// A random element of `V⁺` with `Δ₀ ≠ 0`.
pub fn random_generic_element<M: Model>(m: &M, rng: &mut ChaCha8Rng) -> M::Elem {
    loop {
        let x = random_element(m, rng);
        if m.is_generic(&x) {
            return x;
        }
    }
}

/// `|x|_p = p^{-v(x)}`.
pub fn padic_abs(ctx: &PadicContext, x: &Q) -> Result<Q, RealizationError> {
    let v = ctx.valuation(x)?;
    Ok(pow_q(&q(ctx.p() as i64), -v))
}

/// Checks `∇_j(ψ(x)) Δ₀(x) = Δ_{k+1-j}(x)` for `j ≥ 1` and
/// `∇₀(ψ(x)) Δ₀(x) = 1`, exactly.
pub fn psi_identity_holds<M: Model>(m: &M, x: &M::Elem) -> Result<bool, RealizationError> {
    let y = m.psi(x)?;
    let d0 = m.delta(0, x)?;
    let k = m.k();
    if m.nabla(0, &y)? * &d0 != q(1) {
        return Ok(false);
    }
    for j in 1..=k {
        if m.nabla(j, &y)? * &d0 != m.delta(k + 1 - j, x)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `|∇|^s(ψ(x)) = |Δ|^{t(s)}(x)` for an integer exponent vector `s`.
pub fn character_identity_holds<M: Model>(m: &M, x: &M::Elem, s: &[i64]) -> Result<bool, RealizationError> {
    let k = m.k();
    let y = m.psi(x)?;
    let ctx = m.ctx();
    let sq: Vec<Q> = s.iter().map(|&v| q(v)).collect();
    let t = t_involution(&sq, k).map_err(|e| RealizationError::Parse(e.to_string()))?;
    let mut lhs = q(1);
    let mut rhs = q(1);
    for j in 0..=k {
        lhs *= pow_q(&padic_abs(ctx, &m.nabla(j, &y)?)?, s[j]);
        let tj: i64 = t[j].to_integer().try_into().expect("small exponent");
        rhs *= pow_q(&padic_abs(ctx, &m.delta(j, x)?)?, tj);
    }
    Ok(lhs == rhs)
}

/// Number of diagonal grid elements for `m`.
pub fn grid_size<M: Model>(m: &M) -> usize {
    (m.slot_choices().len() + 1).pow(m.k() as u32 + 1)
}

/// The `index`-th diagonal grid element (slot 0 varies fastest).
pub fn grid_element<M: Model>(m: &M, choices: &[M::Slot], mut index: usize) -> M::Elem {
    let base = choices.len() + 1;
    let slots: Vec<Option<M::Slot>> = (0..=m.k())
        .map(|_| {
            let c = index % base;
            index /= base;
            if c == 0 {
                None
            } else {
                Some(choices[c - 1].clone())
            }
        })
        .collect();
    m.diagonal(&slots)
}

/// Distinct orbit invariants over the diagonal grid, computed sequentially.
pub fn enumerate_orbit_classes_sequential<M: Model>(m: &M) -> BTreeSet<OrbitInvariant> {
    let choices = m.slot_choices();
    (0..grid_size(m)).map(|i| m.orbit_invariants(&grid_element(m, &choices, i))).collect()
}

/// Distinct orbit invariants over the diagonal grid.
#[cfg(feature = "parallel")]
pub fn enumerate_orbit_classes<M: Model>(m: &M) -> BTreeSet<OrbitInvariant> {
    use rayon::prelude::*;
    let choices = m.slot_choices();
    (0..grid_size(m))
        .into_par_iter()
        .map(|i| m.orbit_invariants(&grid_element(m, &choices, i)))
        .fold(BTreeSet::new, |mut acc, inv| {
            acc.insert(inv);
            acc
        })
        .reduce(BTreeSet::new, |mut a, b| {
            a.extend(b);
            a
        })
}

/// Distinct orbit invariants over the diagonal grid.
#[cfg(not(feature = "parallel"))]
pub fn enumerate_orbit_classes<M: Model>(m: &M) -> BTreeSet<OrbitInvariant> {
    enumerate_orbit_classes_sequential(m)
}

/// Nonzero orbit classes and the open ones among them.
pub fn orbit_census<M: Model>(m: &M) -> (usize, usize) {
    let classes = enumerate_orbit_classes(m);
    let nonzero = classes.iter().filter(|c| c.rank > 0).count();
    let open = classes.iter().filter(|c| c.rank == m.k() + 1).count();
    (nonzero, open)
}

/// Distinct `P`-orbit class vectors over the generic diagonal grid.
pub fn p_orbit_census<M: Model>(m: &M) -> Result<usize, RealizationError> {
    let choices = m.slot_choices();
    let base = choices.len();
    let total = base.pow(m.k() as u32 + 1);
    let mut seen = BTreeSet::new();
    for mut idx in 0..total {
        let slots: Vec<Option<M::Slot>> = (0..=m.k())
            .map(|_| {
                let c = idx % base;
                idx /= base;
                Some(choices[c].clone())
            })
            .collect();
        let x = m.diagonal(&slots);
        if m.in_open_p_orbit_set(&x).is_ok() {
            seen.insert(m.p_orbit_class(&x)?);
        }
    }
    Ok(seen.len())
}

/// The first grid element with invariant `inv`.
pub fn representative<M: Model>(m: &M, inv: &OrbitInvariant) -> Result<M::Elem, RealizationError> {
    let choices = m.slot_choices();
    (0..grid_size(m))
        .map(|i| grid_element(m, &choices, i))
        .find(|x| m.orbit_invariants(x) == *inv)
        .ok_or(RealizationError::Unrealizable { tag: m.tag() })
}

/// `Σ x_s X_s` for scalars `x_s` (slot `s` scaled by `x_s`).
pub fn scaled_diagonal<M: Model>(m: &M, xs: &[Q]) -> M::Elem {
    let unit = m.unit_slot();
    let mut total = m.zero();
    for (s, x) in xs.iter().enumerate() {
        let mut slots: Vec<Option<M::Slot>> = vec![None; m.k() + 1];
        slots[s] = Some(unit.clone());
        total = m.add(&total, &m.scale(x, &m.diagonal(&slots)));
    }
    total
}

/// `Δ_j(Σ x_s X_s) = Π_{s ≥ j} x_s^κ Δ_j(Σ X_s)`.
pub fn homogeneity_holds<M: Model>(m: &M, xs: &[Q]) -> Result<bool, RealizationError> {
    let ones = vec![q(1); m.k() + 1];
    let base = scaled_diagonal(m, &ones);
    let x = scaled_diagonal(m, xs);
    for j in 0..=m.k() {
        let factor: Q = xs[j..].iter().map(|v| pow_q(v, m.kappa())).product();
        if m.delta(j, &x)? != factor * m.delta(j, &base)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A realization chosen at run time.
#[derive(Debug, Clone)]
pub enum AnyModel {
    Gl(Gl),
    Sp(Sp),
    Unitary(Unitary),
    Type3(Type3),
    Ortho1(Ortho1),
}

impl AnyModel {
    /// `rank` is `k + 1`; ORTHO1 only has rank 1.
    pub fn new(tag: Tag, rank: usize, ctx: PadicContext) -> Result<Self, RealizationError> {
        Ok(match tag {
            Tag::Gl => AnyModel::Gl(Gl::new(rank, ctx)?),
            Tag::Sp => AnyModel::Sp(Sp::new(rank, ctx)?),
            Tag::Unitary => AnyModel::Unitary(Unitary::new(rank, ctx)?),
            Tag::Type3 => {
                check_size(rank, 1, 6)?;
                AnyModel::Type3(Type3::new(rank - 1, ctx)?)
            }
            Tag::Ortho1 => {
                check_size(rank, 1, 1)?;
                AnyModel::Ortho1(Ortho1::new(ctx))
            }
        })
    }
}

/// Dispatches a generic function over the variants of [`AnyModel`].
#[macro_export]
macro_rules! with_model {
    ($any:expr, $m:ident => $body:expr) => {
        match $any {
            $crate::realizations::AnyModel::Gl($m) => $body,
            $crate::realizations::AnyModel::Sp($m) => $body,
            $crate::realizations::AnyModel::Unitary($m) => $body,
            $crate::realizations::AnyModel::Type3($m) => $body,
            $crate::realizations::AnyModel::Ortho1($m) => $body,
        }
    };
}

/// Matrix input: `{"tag":"sp","prime":5,"entries":[[...]]}`; entries are
/// numbers, scalar tokens (`"u"`, `"pi"`, `"-3/2"`), or `[a, b]` for
/// `a + b√u`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixInput {
    pub tag: Tag,
    #[serde(default)]
    pub prime: Option<u64>,
    pub entries: Vec<serde_json::Value>,
}

fn parse_scalar_value(ctx: &PadicContext, v: &serde_json::Value) -> Result<Q, RealizationError> {
    match v {
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(q(i))
            } else {
                ctx.parse_scalar(&n.to_string()).map_err(Into::into)
            }
        }
        serde_json::Value::String(s) => ctx.parse_scalar(s).map_err(Into::into),
        other => Err(RealizationError::Parse(format!("expected a scalar, got {other}"))),
    }
}

pub(crate) fn parse_ext_value(ctx: &PadicContext, v: &serde_json::Value) -> Result<Ext, RealizationError> {
    match v {
        serde_json::Value::Array(pair) if pair.len() == 2 => Ok(Ext::new(
            parse_scalar_value(ctx, &pair[0])?,
            parse_scalar_value(ctx, &pair[1])?,
            ctx.u(),
        )),
        other => Ok(Ext::from_q(parse_scalar_value(ctx, other)?, ctx.u())),
    }
}

fn parse_rows<T: Field>(
    entries: &[serde_json::Value],
    f: &dyn Fn(&serde_json::Value) -> Result<T, RealizationError>,
) -> Result<Matrix<T>, RealizationError> {
    let mut rows = Vec::new();
    for r in entries {
        let serde_json::Value::Array(items) = r else {
            return Err(RealizationError::Parse("rows must be arrays".into()));
        };
        rows.push(items.iter().map(f).collect::<Result<Vec<T>, _>>()?);
    }
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != rows[0].len()) {
        return Err(RealizationError::Parse("matrix must be nonempty and rectangular".into()));
    }
    Ok(Matrix::from_rows(rows))
}

pub(crate) fn parse_q_matrix(ctx: &PadicContext, entries: &[serde_json::Value]) -> Result<Matrix<Q>, RealizationError> {
    parse_rows(entries, &|v| parse_scalar_value(ctx, v))
}

pub(crate) fn parse_ext_matrix(
    ctx: &PadicContext,
    entries: &[serde_json::Value],
) -> Result<Matrix<Ext>, RealizationError> {
    parse_rows(entries, &|v| parse_ext_value(ctx, v))
}

pub(crate) fn q_to_json(x: &Q) -> serde_json::Value {
    if x.is_integer() {
        if let Ok(i) = i64::try_from(x.to_integer()) {
            return serde_json::Value::from(i);
        }
    }
    serde_json::Value::String(x.to_string())
}

pub(crate) fn ext_to_json(x: &Ext) -> serde_json::Value {
    if x.is_real() {
        q_to_json(&x.a)
    } else {
        serde_json::Value::Array(vec![q_to_json(&x.a), q_to_json(&x.b)])
    }
}

/// Model elements that can be read from and written to JSON.
pub trait JsonElem: Model {
    fn parse_elem(&self, entries: &[serde_json::Value]) -> Result<Self::Elem, RealizationError>;
    fn elem_to_json(&self, x: &Self::Elem) -> serde_json::Value;
}

/// Square class of a nonzero value, for reports.
pub fn class_of(ctx: &PadicContext, x: &Q) -> Option<SquareClass> {
    if x.is_zero() {
        None
    } else {
        ctx.square_class(x).ok()
    }
}

pub(crate) fn sign_pow(e: usize) -> Q {
    if e.is_multiple_of(2) {
        q(1)
    } else {
        q(-1)
    }
}

#[cfg(test)]
pub(crate) mod testing {
    use super::*;
    use rand::SeedableRng;

    pub fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    pub use super::{random_element as random_elem, random_generic_element as random_generic};

    /// The shared battery of structural checks for a model.
    pub fn check_model<M: Model>(m: &M, seed: u64, rounds: usize) {
        let mut r = rng(seed);
        let desc = m.descriptor().unwrap();
        assert_eq!(m.dim_vplus() as i64, crate::catalog::dim_vplus(&desc).unwrap(), "{}", m.tag());
        assert_eq!(m.vplus_basis().len(), m.dim_vplus());
        // Census of graded summands: ℓ per root, d per pair.
        let basis = m.vplus_basis();
        for j in 0..=m.k() {
            let c = basis.iter().filter(|(g, _)| *g == Grade::Root(j)).count();
            assert_eq!(c as i64, desc.ell, "{} root {j}", m.tag());
            for i in 0..j {
                let c = basis.iter().filter(|(g, _)| *g == Grade::Pair(i, j)).count();
                assert_eq!(c as i64, desc.d, "{} pair {i},{j}", m.tag());
            }
        }
        // γ exchanges the slots j and k - j.
        for j in 0..=m.k() {
            let mut slots: Vec<Option<M::Slot>> = vec![None; m.k() + 1];
            slots[j] = Some(m.unit_slot());
            if let Ok(y) = m.gamma_plus(&m.diagonal(&slots)) {
                let flipped: Vec<Grade> = m.grade_decompose(&y).into_iter().map(|(g, _)| g).collect();
                assert_eq!(flipped, vec![Grade::Root(m.k() - j)], "{}", m.tag());
            }
        }
        for _ in 0..rounds {
            let x = random_elem(m, &mut r);
            m.check(&x).unwrap();
            let parts = m.grade_decompose(&x);
            let mut sum = m.zero();
            for (_, p) in &parts {
                sum = m.add(&sum, p);
            }
            assert_eq!(sum, x);
            let g = m.random_group(&mut r);
            let h = m.random_group(&mut r);
            m.check_group(&g).unwrap();
            let gx = m.act(&g, &x);
            m.check(&gx).unwrap();
            assert_eq!(m.act(&m.compose(&g, &h), &x), m.act(&g, &m.act(&h, &x)));
            assert_eq!(m.act(&m.identity(), &x), x);
            assert_eq!(m.orbit_invariants(&gx), m.orbit_invariants(&x), "{}", m.tag());
            assert_eq!(m.delta(0, &gx).unwrap(), m.chi0(&g) * m.delta(0, &x).unwrap());
            if m.in_open_p_orbit_set(&x).is_ok() {
                let p = m.random_parabolic(&mut r);
                assert_eq!(m.p_orbit_class(&m.act(&p, &x)).unwrap(), m.p_orbit_class(&x).unwrap(), "{}", m.tag());
            }
            let n = m.random_unipotent(&mut r);
            let nx = m.act(&n, &x);
            for j in 0..=m.k() {
                assert_eq!(m.delta(j, &nx).unwrap(), m.delta(j, &x).unwrap(), "{} Δ_{j}", m.tag());
            }
        }
    }
}
