//! Diagonal quadratic forms over `F`: discriminant, Hasse invariant,
//! isotropy, Witt decomposition, equivalence and similarity.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::padic::{PadicContext, PadicError, SquareClass, Q};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QFormError {
    #[error("form of rank 0 has no {0}")]
    RankZero(&'static str),
    #[error("diagonal coefficients must be nonzero; use radical_dim for the zero part")]
    ZeroCoefficient,
    #[error(transparent)]
    Padic(#[from] PadicError),
}

/// `⟨a_1, ..., a_r⟩ ⊥ 0^radical_dim`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QForm {
    coeffs: Vec<Q>,
    radical_dim: usize,
}

impl QForm {
    pub fn new(coeffs: Vec<Q>, radical_dim: usize) -> Result<Self, QFormError> {
        if coeffs.iter().any(|c| c.is_zero()) {
            return Err(QFormError::ZeroCoefficient);
        }
        Ok(QForm { coeffs, radical_dim })
    }

    /// Splits zero entries of a diagonal off into the radical.
    pub fn from_diagonal(entries: &[Q]) -> Self {
        let coeffs: Vec<Q> = entries.iter().filter(|x| !x.is_zero()).cloned().collect();
        let radical_dim = entries.len() - coeffs.len();
        QForm { coeffs, radical_dim }
    }

    pub fn from_classes(ctx: &PadicContext, classes: &[SquareClass]) -> Self {
        QForm { coeffs: classes.iter().map(|&c| ctx.rep(c)).collect(), radical_dim: 0 }
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    pub fn rank(&self) -> usize {
        self.coeffs.len()
    }

    pub fn radical_dim(&self) -> usize {
        self.radical_dim
    }

    pub fn dim(&self) -> usize {
        self.rank() + self.radical_dim
    }

    pub fn nondegenerate_part(&self) -> QForm {
        QForm { coeffs: self.coeffs.clone(), radical_dim: 0 }
    }

    pub fn scaled(&self, c: &Q) -> QForm {
        QForm { coeffs: self.coeffs.iter().map(|a| a * c).collect(), radical_dim: self.radical_dim }
    }

    pub fn orthogonal_sum(&self, other: &QForm) -> QForm {
        let mut coeffs = self.coeffs.clone();
        coeffs.extend(other.coeffs.iter().cloned());
        QForm { coeffs, radical_dim: self.radical_dim + other.radical_dim }
    }

    /// Sorted square classes of the coefficients.
    pub fn classes(&self, ctx: &PadicContext) -> Vec<SquareClass> {
        let mut v: Vec<SquareClass> = self.coeffs.iter().map(|a| ctx.square_class(a).expect("nonzero")).collect();
        v.sort();
        v
    }
}

impl fmt::Display for QForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        write!(f, "<{}>", parts.join(", "))?;
        if self.radical_dim > 0 {
            write!(f, " + 0^{}", self.radical_dim)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WittData {
    pub witt_index: usize,
    /// Canonical representative of the anisotropic kernel: sorted class tags.
    pub anisotropic_kernel: Vec<SquareClass>,
}

/// Complete equivalence key of a form: (rank, radical, Witt data).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EquivalenceKey {
    pub rank: usize,
    pub radical_dim: usize,
    pub witt: WittData,
}

pub fn discriminant(ctx: &PadicContext, q: &QForm) -> Result<SquareClass, QFormError> {
    if q.rank() == 0 {
        return Err(QFormError::RankZero("discriminant"));
    }
    Ok(disc_of_classes(&q.classes(ctx)))
}

fn disc_of_classes(cs: &[SquareClass]) -> SquareClass {
    cs.iter().fold(SquareClass::One, |a, &b| a.mul(b))
}

fn hasse_of_classes(ctx: &PadicContext, cs: &[SquareClass]) -> i8 {
    let mut h = 1;
    for i in 0..cs.len() {
        for j in i + 1..cs.len() {
            h *= ctx.hilbert_classes(cs[i], cs[j]);
        }
    }
    h
}

/// `∏_{i<j} (a_i, a_j)`.
pub fn hasse_invariant(ctx: &PadicContext, q: &QForm) -> Result<i8, QFormError> {
    if q.rank() == 0 {
        return Err(QFormError::RankZero("Hasse invariant"));
    }
    Ok(hasse_of_classes(ctx, &q.classes(ctx)))
}

/// Rank-stratified criterion on the nondegenerate part of a class list.
fn classes_isotropic(ctx: &PadicContext, cs: &[SquareClass]) -> bool {
    let m1 = ctx.minus_one_class();
    let d = disc_of_classes(cs);
    match cs.len() {
        0 | 1 => false,
        2 => d == m1,
        3 => hasse_of_classes(ctx, cs) == ctx.hilbert_classes(m1, m1.mul(d)),
        4 => d != SquareClass::One || hasse_of_classes(ctx, cs) == ctx.hilbert_classes(m1, m1),
        _ => true,
    }
}

/// True iff `q` has a nonzero vector of value 0. A nonzero radical counts.
pub fn is_isotropic(ctx: &PadicContext, q: &QForm) -> bool {
    q.radical_dim > 0 || classes_isotropic(ctx, &q.classes(ctx))
}

/// Anisotropic class lists in canonical form (lexicographically least sorted
/// tag list of each equivalence class), indexed by rank 0..=4.
pub fn canonical_anisotropic_forms(ctx: &PadicContext) -> Arc<Vec<Vec<Vec<SquareClass>>>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<Vec<Vec<Vec<SquareClass>>>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().expect("cache lock").get(&ctx.p()) {
        return v.clone();
    }
    let v = Arc::new(build_anisotropic_forms(ctx));
    cache.lock().expect("cache lock").insert(ctx.p(), v.clone());
    v
}

fn build_anisotropic_forms(ctx: &PadicContext) -> Vec<Vec<Vec<SquareClass>>> {
    let mut out = vec![vec![vec![]]];
    for r in 1..=4usize {
        let mut reps: Vec<Vec<SquareClass>> = Vec::new();
        for cs in sorted_class_lists(r) {
            if classes_isotropic(ctx, &cs) {
                continue;
            }
            let key = (disc_of_classes(&cs), hasse_of_classes(ctx, &cs));
            if !reps.iter().any(|x| (disc_of_classes(x), hasse_of_classes(ctx, x)) == key) {
                reps.push(cs);
            }
        }
        out.push(reps);
    }
    out
}

/// All multisets of `r` square classes, as sorted lists in lexicographic order.
pub fn sorted_class_lists(r: usize) -> Vec<Vec<SquareClass>> {
    fn go(start: usize, left: usize, cur: &mut Vec<SquareClass>, out: &mut Vec<Vec<SquareClass>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for i in start..4 {
            cur.push(SquareClass::ALL[i]);
            go(i, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, r, &mut Vec::new(), &mut out);
    out
}

fn same_class_invariants(ctx: &PadicContext, a: &[SquareClass], b: &[SquareClass]) -> bool {
    a.len() == b.len()
        && (a.is_empty()
            || (disc_of_classes(a) == disc_of_classes(b) && hasse_of_classes(ctx, a) == hasse_of_classes(ctx, b)))
}

fn witt_of_classes(ctx: &PadicContext, cs: &[SquareClass]) -> WittData {
    let kernels = canonical_anisotropic_forms(ctx);
    let m1 = ctx.minus_one_class();
    let n = cs.len();
    for r in (n % 2..=n.min(4)).step_by(2) {
        let i = (n - r) / 2;
        for k in &kernels[r] {
            let mut candidate = k.clone();
            for _ in 0..i {
                candidate.push(SquareClass::One);
                candidate.push(m1);
            }
            if same_class_invariants(ctx, cs, &candidate) {
                return WittData { witt_index: i, anisotropic_kernel: k.clone() };
            }
        }
    }
    unreachable!("every form over a p-adic field has an anisotropic kernel of rank at most 4")
}

/// Witt index and canonical anisotropic kernel of the nondegenerate part.
pub fn witt_decompose(ctx: &PadicContext, q: &QForm) -> WittData {
    witt_of_classes(ctx, &q.classes(ctx))
}

pub fn equivalence_key(ctx: &PadicContext, q: &QForm) -> EquivalenceKey {
    EquivalenceKey { rank: q.rank(), radical_dim: q.radical_dim, witt: witt_decompose(ctx, q) }
}

pub fn equivalent(ctx: &PadicContext, a: &QForm, b: &QForm) -> bool {
    a.radical_dim == b.radical_dim && same_class_invariants(ctx, &a.classes(ctx), &b.classes(ctx))
}

pub fn similar(ctx: &PadicContext, a: &QForm, b: &QForm) -> bool {
    SquareClass::ALL.iter().any(|&c| equivalent(ctx, &a.scaled(&ctx.rep(c)), b))
}

/// Least equivalence key over the four scalings: a complete similarity key.
pub fn similarity_key(ctx: &PadicContext, q: &QForm) -> EquivalenceKey {
    SquareClass::ALL
        .iter()
        .map(|&c| equivalence_key(ctx, &q.scaled(&ctx.rep(c))))
        .min()
        .expect("four scalings")
}

/// Printable similarity class id, e.g. `r4w1[1,u]`.
pub fn similarity_class_id(ctx: &PadicContext, q: &QForm) -> String {
    let k = similarity_key(ctx, q);
    let tags: Vec<&str> = k.witt.anisotropic_kernel.iter().map(|c| c.tag()).collect();
    let mut s = format!("r{}w{}[{}]", k.rank, k.witt.witt_index, tags.join(","));
    if k.radical_dim > 0 {
        s.push_str(&format!("+0^{}", k.radical_dim));
    }
    s
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Represented {
    pub classes: BTreeSet<SquareClass>,
    /// Set when the input was isotropic, in which case every class occurs.
    pub isotropic: bool,
}

/// Square classes of nonzero values: `c` is represented iff `q ⊥ ⟨-c⟩` is isotropic.
pub fn represented_classes(ctx: &PadicContext, q: &QForm) -> Represented {
    let nd = q.classes(ctx);
    if classes_isotropic(ctx, &nd) {
        return Represented { classes: SquareClass::ALL.into_iter().collect(), isotropic: true };
    }
    let m1 = ctx.minus_one_class();
    let classes = SquareClass::ALL
        .into_iter()
        .filter(|&c| {
            let mut cs = nd.clone();
            cs.push(m1.mul(c));
            classes_isotropic(ctx, &cs)
        })
        .collect();
    Represented { classes, isotropic: false }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::q;
    use proptest::prelude::*;
    use SquareClass::*;

    fn ctx() -> PadicContext {
        PadicContext::default()
    }

    fn form(c: &PadicContext, toks: &[&str]) -> QForm {
        QForm::new(toks.iter().map(|t| c.parse_scalar(t).unwrap()).collect(), 0).unwrap()
    }

    // --- independent oracle --------------------------------------------------
    //
    // Springer: a diagonal form q0 ⊥ π q1 with unit coefficients is anisotropic
    // over Q_p iff both residue forms q̄0, q̄1 are anisotropic over F_p, and the
    // Witt index is the sum of the residue Witt indices. Residue forms are
    // examined by brute force over F_p.

    fn residue_split(c: &PadicContext, cs: &[SquareClass]) -> (Vec<u64>, Vec<u64>) {
        let u = c.u() as u64;
        let (mut a, mut b) = (vec![], vec![]);
        for cl in cs {
            let unit = if cl.has_u() { u } else { 1 };
            if cl.has_pi() {
                b.push(unit)
            } else {
                a.push(unit)
            }
        }
        (a, b)
    }

    fn eval(p: u64, coeffs: &[u64], v: &[u64]) -> u64 {
        coeffs.iter().zip(v).map(|(a, x)| a * x % p * x % p).sum::<u64>() % p
    }

    fn bilinear(p: u64, coeffs: &[u64], v: &[u64], w: &[u64]) -> u64 {
        coeffs.iter().zip(v.iter().zip(w)).map(|(a, (x, y))| a * x % p * y % p).sum::<u64>() % p
    }

    fn vectors(p: u64, n: usize) -> Vec<Vec<u64>> {
        let mut out = vec![vec![]];
        for _ in 0..n {
            out = out.into_iter().flat_map(|v| (0..p).map(move |x| { let mut w = v.clone(); w.push(x); w })).collect();
        }
        out
    }

    /// Witt index over F_p: largest totally isotropic subspace (≤ 2 here).
    fn residue_witt(p: u64, coeffs: &[u64]) -> usize {
        let n = coeffs.len();
        if n == 0 {
            return 0;
        }
        let iso: Vec<Vec<u64>> = vectors(p, n)
            .into_iter()
            .filter(|v| v.iter().any(|&x| x != 0) && eval(p, coeffs, v) == 0)
            .collect();
        if iso.is_empty() {
            return 0;
        }
        let independent = |v: &[u64], w: &[u64]| {
            (0..n).any(|i| (i + 1..n).any(|j| !(v[i] * w[j] + p * p - v[j] * w[i] % p).is_multiple_of(p)))
        };
        for (i, v) in iso.iter().enumerate() {
            for w in &iso[i + 1..] {
                if bilinear(p, coeffs, v, w) == 0 && independent(v, w) {
                    // a third would need dim ≥ 6
                    return 2;
                }
            }
        }
        1
    }

    fn oracle_witt_index(c: &PadicContext, cs: &[SquareClass]) -> usize {
        let (a, b) = residue_split(c, cs);
        residue_witt(c.p(), &a) + residue_witt(c.p(), &b)
    }

    #[test]
    fn oracle_agrees_with_invariants_on_all_forms_up_to_rank_five() {
        for p in [3u64, 5, 7] {
            let c = PadicContext::new(p).unwrap();
            for r in 1..=5 {
                for cs in sorted_class_lists(r) {
                    let w = witt_of_classes(&c, &cs);
                    assert_eq!(w.witt_index, oracle_witt_index(&c, &cs), "p={p} {cs:?}");
                    assert_eq!(classes_isotropic(&c, &cs), w.witt_index > 0);
                    // kernel recomposes to the form
                    let mut re = w.anisotropic_kernel.clone();
                    for _ in 0..w.witt_index {
                        re.push(One);
                        re.push(c.minus_one_class());
                    }
                    assert!(same_class_invariants(&c, &cs, &re));
                    assert!(!classes_isotropic(&c, &w.anisotropic_kernel));
                }
            }
        }
    }

    #[test]
    fn discriminant_examples() {
        let c = ctx();
        assert_eq!(discriminant(&c, &form(&c, &["1", "-1"])).unwrap(), c.minus_one_class());
        assert_eq!(discriminant(&c, &form(&c, &["1", "-u", "-pi", "upi"])).unwrap(), One);
        assert_eq!(discriminant(&c, &form(&c, &["pi"])).unwrap(), Pi);
        assert!(discriminant(&c, &QForm::new(vec![], 2).unwrap()).is_err());
    }

    #[test]
    fn hasse_examples() {
        let c = ctx();
        assert_eq!(hasse_invariant(&c, &form(&c, &["u"])).unwrap(), 1);
        assert_eq!(hasse_invariant(&c, &form(&c, &["1", "-1"])).unwrap(), 1);
        let aniso4 = form(&c, &["1", "-u", "-pi", "upi"]);
        let direct: i8 = {
            let a = aniso4.coeffs();
            let mut h = 1;
            for i in 0..4 {
                for j in i + 1..4 {
                    h *= c.hilbert_symbol(&a[i], &a[j]).unwrap();
                }
            }
            h
        };
        assert_eq!(hasse_invariant(&c, &aniso4).unwrap(), direct);
        assert!(!is_isotropic(&c, &aniso4));
    }

    #[test]
    fn isotropy_examples() {
        let c = ctx();
        assert!(is_isotropic(&c, &form(&c, &["1", "-1"])));
        assert!(!is_isotropic(&c, &form(&c, &["1", "-u", "-pi", "upi"])));
        assert!(is_isotropic(&c, &form(&c, &["1", "1", "1", "1", "1"])));
        assert!(!is_isotropic(&c, &form(&c, &["7"])));
    }

    #[test]
    fn witt_examples() {
        let c = ctx();
        let h = witt_decompose(&c, &form(&c, &["1", "-1"]));
        assert_eq!(h, WittData { witt_index: 1, anisotropic_kernel: vec![] });
        let a4 = witt_decompose(&c, &form(&c, &["1", "-u", "-pi", "upi"]));
        assert_eq!(a4.witt_index, 0);
        assert_eq!(a4.anisotropic_kernel.len(), 4);
        let five = witt_decompose(&c, &form(&c, &["1", "1", "1", "1", "1"]));
        // over Q_5, -1 is a square so ⟨1,1⟩ is hyperbolic
        assert_eq!(five, WittData { witt_index: 2, anisotropic_kernel: vec![One] });
        assert_eq!(oracle_witt_index(&c, &[One; 5]), 2);
    }

    #[test]
    fn equivalence_examples() {
        let c = ctx();
        let a = form(&c, &["1", "u", "pi"]);
        let b = form(&c, &["pi", "1", "u"]);
        assert!(equivalent(&c, &a, &b));
        assert!(equivalent(&c, &form(&c, &["1", "1"]), &form(&c, &["u", "u"])));
        assert!(!equivalent(&c, &form(&c, &["1"]), &form(&c, &["u"])));
        // ⟨u,u⟩ represents 1 (residue form u x² + u y² = 1 is solvable mod p)
        let p = c.p();
        assert!((0..p).any(|x| (0..p).any(|y| (2 * x * x + 2 * y * y) % p == 1)));
    }

    #[test]
    fn similarity_examples() {
        let c = ctx();
        let a = form(&c, &["1", "u"]);
        assert!(similar(&c, &a, &a));
        assert!(!similar(&c, &form(&c, &["1", "u"]), &form(&c, &["1", "pi"])));
        let ternaries = &canonical_anisotropic_forms(&c)[3];
        for x in ternaries {
            for y in ternaries {
                assert!(similar(&c, &QForm::from_classes(&c, x), &QForm::from_classes(&c, y)));
            }
        }
    }

    #[test]
    fn represented_examples() {
        let c = ctx();
        let r = represented_classes(&c, &form(&c, &["1", "u"]));
        assert_eq!(r.classes, [One, U].into_iter().collect());
        let t = form(&c, &["1", "-u", "-pi"]);
        let d = discriminant(&c, &t).unwrap();
        let r = represented_classes(&c, &t);
        let expected: BTreeSet<_> = SquareClass::ALL.into_iter().filter(|&x| x != c.minus_one_class().mul(d)).collect();
        assert_eq!(r.classes, expected);
        let r = represented_classes(&c, &form(&c, &["1", "-u", "-pi", "upi"]));
        assert_eq!(r.classes.len(), 4);
        assert!(!r.isotropic);
    }

    #[test]
    fn anisotropic_counts() {
        for p in [3u64, 5, 7, 13] {
            let c = PadicContext::new(p).unwrap();
            let k = canonical_anisotropic_forms(&c);
            assert_eq!(k[4].len(), 1);
            assert_eq!(k[3].len(), 4);
            assert_eq!(k[2].len(), 6);
            let mut sims: Vec<EquivalenceKey> = k[2].iter().map(|x| similarity_key(&c, &QForm::from_classes(&c, x))).collect();
            sims.sort();
            sims.dedup();
            assert_eq!(sims.len(), 3);
            for x in &k[2] {
                let qf = QForm::from_classes(&c, x);
                let rep = represented_classes(&c, &qf).classes;
                assert_eq!(rep.len(), 2);
                let v: Vec<SquareClass> = rep.iter().copied().collect();
                let ab = v[0].mul(v[1]);
                for mu in SquareClass::ALL {
                    let stable = equivalent(&c, &qf.scaled(&c.rep(mu)), &qf);
                    assert_eq!(stable, mu == One || mu == ab, "p={p} {x:?} mu={mu}");
                }
            }
        }
    }

    fn class_list(max: usize) -> impl Strategy<Value = Vec<SquareClass>> {
        proptest::collection::vec(0usize..4, 1..=max).prop_map(|v| v.into_iter().map(|i| SquareClass::ALL[i]).collect())
    }

    proptest! {
        #[test]
        fn equivalence_invariant_under_permutation_and_square_scaling(
            cs in class_list(6), perm_seed in any::<u64>(), sq in 1i64..30
        ) {
            let c = ctx();
            let q1 = QForm::from_classes(&c, &cs);
            let mut coeffs = q1.coeffs().to_vec();
            let n = coeffs.len();
            let i = (perm_seed as usize) % n;
            coeffs.swap(0, i);
            coeffs[0] = &coeffs[0] * q(sq * sq);
            let q2 = QForm::new(coeffs, 0).unwrap();
            prop_assert!(equivalent(&c, &q1, &q2));
            prop_assert!(equivalent(&c, &q2, &q1));
            prop_assert_eq!(equivalence_key(&c, &q1), equivalence_key(&c, &q2));
        }

        #[test]
        fn equivalence_is_transitive(a in class_list(4), b in class_list(4), d in class_list(4)) {
            let c = ctx();
            let (qa, qb, qd) = (QForm::from_classes(&c, &a), QForm::from_classes(&c, &b), QForm::from_classes(&c, &d));
            if equivalent(&c, &qa, &qb) && equivalent(&c, &qb, &qd) {
                prop_assert!(equivalent(&c, &qa, &qd));
            }
        }

        #[test]
        fn similarity_key_is_scaling_invariant(cs in class_list(6), s in 0usize..4) {
            let c = ctx();
            let qf = QForm::from_classes(&c, &cs);
            let scaled = qf.scaled(&c.rep(SquareClass::ALL[s]));
            prop_assert_eq!(similarity_key(&c, &qf), similarity_key(&c, &scaled));
            prop_assert!(similar(&c, &qf, &scaled));
        }
    }
}
