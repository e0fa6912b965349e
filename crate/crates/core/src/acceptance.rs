//! The acceptance criteria as executable checks, shared by the `acceptance`
//! test target and `pgo selftest`.

use std::collections::BTreeSet;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::catalog::{self, GradedDescriptor};
use crate::diagram::{OneType, WeightedSatakeDiagram};
use crate::fixtures::fixture;
use crate::orbits::{chi0_image, nonzero_orbit_count, open_orbit_count, rank_qx, sub_descriptor};
use crate::padic::{PadicContext, SquareClass, Q};
use crate::qform::{
    discriminant, equivalence_key, is_isotropic, represented_classes, similarity_key, sorted_class_lists, QForm,
};
use crate::realizations::*;

#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    /// Observed values; independent of the prime wherever the claim is.
    pub detail: String,
    pub millis: u128,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "{} criterion {:>2} ({}): {} [{} ms]",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.detail,
            self.millis
        )
    }
}

pub const TITLES: [&str; 14] = [
    "descent classification of catalog fixtures",
    "dimension identity",
    "symplectic orbit counts",
    "unitary orbit counts",
    "type III orbit counts",
    "GL orbit counts",
    "rank-1 orthogonal open orbits",
    "relative-invariant identity",
    "homogeneity",
    "Q_X rank law",
    "quadratic-form suite",
    "P-orbit counts and N-invariance",
    "chi0 image sampling",
    "prime independence",
];

type Outcome = Result<(bool, String), String>;

fn timed(id: u8, f: impl FnOnce() -> Outcome) -> CriterionResult {
    let start = Instant::now();
    let (passed, detail) = match f() {
        Ok(v) => v,
        Err(e) => (false, format!("error: {e}")),
    };
    CriterionResult { id, title: TITLES[id as usize - 1], passed, detail, millis: start.elapsed().as_millis() }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// Runs one criterion at prime `p`.
pub fn run_criterion(id: u8, p: u64, seed: u64) -> CriterionResult {
    let ctx = match PadicContext::new(p) {
        Ok(c) => c,
        Err(e) => return timed(id, || Err(err(e))),
    };
    match id {
        1 => timed(id, c1_descent),
        2 => timed(id, || c2_dimensions(ctx)),
        3 => timed(id, || c3_symplectic(ctx)),
        4 => timed(id, || c4_unitary(ctx)),
        5 => timed(id, || c5_type3(ctx)),
        6 => timed(id, || c6_gl(ctx)),
        7 => timed(id, || c7_ortho1(ctx)),
        8 => timed(id, || c8_psi_identity(ctx, seed)),
        9 => timed(id, || c9_homogeneity(ctx)),
        10 => timed(id, || c10_qx_rank(ctx)),
        11 => timed(id, || c11_qforms(ctx)),
        12 => timed(id, || c12_p_orbits(ctx, seed)),
        13 => timed(id, || c13_chi0(ctx, seed)),
        14 => timed(id, || c14_primes(seed)),
        _ => timed(1, || Err(format!("no criterion {id}"))),
    }
}

/// All fourteen criteria at prime `p`.
pub fn run_all(p: u64, seed: u64) -> Vec<CriterionResult> {
    (1..=14).map(|id| run_criterion(id, p, seed)).collect()
}

fn c1_descent() -> Outcome {
    let a1 = OneType::A { delta: 1 };
    let mut cases: Vec<(String, usize)> = Vec::new();
    for row in [8, 9, 10] {
        for m in [4, 5, 6] {
            cases.push((format!("table1_row{row}_m{m}"), 2));
        }
    }
    for row in [11, 12] {
        for n in [3, 4, 5] {
            cases.push((format!("table1_row{row}_n{n}"), n));
        }
    }
    cases.push(("table1_row13".into(), 3));
    let mut bad = Vec::new();
    for (name, rank) in &cases {
        let text = fixture(name).ok_or_else(|| format!("missing fixture {name}"))?;
        let d = WeightedSatakeDiagram::parse(text).map_err(err)?;
        let got = d.descent_classify().map_err(err)?;
        let desc = catalog::lookup(&d).map_err(err)?;
        if got != (*rank, a1) || desc.rank() != *rank as i64 {
            bad.push(format!("{name}: got rank {} {}", got.0, got.1));
        }
    }
    Ok((bad.is_empty(), if bad.is_empty() { format!("{} fixtures match", cases.len()) } else { bad.join("; ") }))
}

fn dim_check<M: Model>(m: &M, expected: usize) -> Result<Option<String>, String> {
    let desc = m.descriptor().map_err(err)?;
    let from_desc = catalog::dim_vplus(&desc).map_err(err)? as usize;
    let actual = m.dim_vplus();
    Ok((actual != expected || from_desc != expected)
        .then(|| format!("{} k={}: model {actual}, descriptor {from_desc}, expected {expected}", m.tag(), m.k())))
}

fn c2_dimensions(ctx: PadicContext) -> Outcome {
    let mut bad = Vec::new();
    let mut checked = 0;
    for n in 1..=6usize {
        bad.extend(dim_check(&Gl::new(n, ctx).map_err(err)?, n * n)?);
        bad.extend(dim_check(&Type3::new(n - 1, ctx).map_err(err)?, n * (2 * n + 1))?);
        checked += 2;
        if n >= 2 {
            bad.extend(dim_check(&Sp::new(n, ctx).map_err(err)?, n * (n + 1) / 2)?);
            bad.extend(dim_check(&Unitary::new(n, ctx).map_err(err)?, n * n)?);
            checked += 2;
        }
    }
    Ok((bad.is_empty(), if bad.is_empty() { format!("{checked} model sizes agree") } else { bad.join("; ") }))
}

/// Nonzero class count by enumeration, by formula, and as `Σ_m` open counts
/// of the rank-`m` subalgebras.
fn count_check<M: Model>(m: &M) -> Result<(usize, u64, u64), String> {
    let desc = m.descriptor().map_err(err)?;
    let (nonzero, _) = orbit_census(m);
    let formula = nonzero_orbit_count(&desc).map_err(err)?;
    let by_rank = strata_sum(&desc)?;
    Ok((nonzero, formula, by_rank))
}

fn strata_sum(desc: &GradedDescriptor) -> Result<u64, String> {
    (1..=desc.rank()).map(|m| open_orbit_count(&sub_descriptor(desc, m)).map_err(err)).sum()
}

fn counts_outcome(label: &str, rows: Vec<(usize, usize, u64, u64)>, expected: &[usize]) -> Outcome {
    let ok = rows.iter().zip(expected).all(|(&(_, e, f, s), &want)| e == want && f as usize == want && s as usize == want);
    let detail = rows
        .iter()
        .map(|(n, e, f, s)| format!("{label}={n}: {e} (formula {f}, strata {s})"))
        .collect::<Vec<_>>()
        .join(", ");
    Ok((ok, detail))
}

fn c3_symplectic(ctx: PadicContext) -> Outcome {
    let mut rows = Vec::new();
    for n in 2..=6 {
        let (e, f, s) = count_check(&Sp::new(n, ctx).map_err(err)?)?;
        rows.push((n, e, f, s));
    }
    counts_outcome("n", rows, &[5, 7, 12, 14, 19])
}

fn c4_unitary(ctx: PadicContext) -> Outcome {
    let mut rows = Vec::new();
    for n in 2..=6 {
        let (e, f, s) = count_check(&Unitary::new(n, ctx).map_err(err)?)?;
        rows.push((n, e, f, s));
    }
    counts_outcome("n", rows, &[3, 4, 6, 7, 9])
}

/// The criterion asks for `4(k+1)` nonzero classes. The enumeration finds
/// `4k + 3` nonzero classes, i.e. `4(k+1)` orbits once the zero orbit is
/// counted, so the literal check fails.
fn c5_type3(ctx: PadicContext) -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for k in 0..=3usize {
        let m = Type3::new(k, ctx).map_err(err)?;
        let (nonzero, open) = orbit_census(&m);
        let want_open = if k == 0 { 3 } else { 4 };
        let literal = nonzero == 4 * (k + 1);
        ok &= literal && open == want_open;
        parts.push(format!("k={k}: nonzero {nonzero} (with zero orbit {}), open {open}", nonzero + 1));
    }
    let mut detail = parts.join(", ");
    if !ok {
        detail.push_str("; expected 4(k+1) nonzero, observed 4k+3 nonzero = 4(k+1) orbits in total");
    }
    Ok((ok, detail))
}

fn c6_gl(ctx: PadicContext) -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for n in 1..=6usize {
        let m = Gl::new(n, ctx).map_err(err)?;
        let ranks: Vec<usize> = enumerate_orbit_classes(&m).into_iter().map(|c| c.rank).filter(|&r| r > 0).collect();
        let want: Vec<usize> = (1..=n).collect();
        let formula = nonzero_orbit_count(&m.descriptor().map_err(err)?).map_err(err)?;
        ok &= ranks == want && formula as usize == n;
        parts.push(format!("n={n}: {}", ranks.len()));
    }
    Ok((ok, parts.join(", ")))
}

fn c7_ortho1(ctx: PadicContext) -> Outcome {
    let m = Ortho1::new(ctx);
    let found: BTreeSet<SquareClass> = enumerate_orbit_classes(&m)
        .into_iter()
        .filter_map(|c| match c.payload {
            Payload::Class(s) => Some(s),
            _ => None,
        })
        .collect();
    let form = m.form();
    let represented = represented_classes(&ctx, &form).classes;
    let minus_disc = discriminant(&ctx, &form).map_err(err)?.mul(ctx.minus_one_class());
    let missing: Vec<SquareClass> = SquareClass::ALL.into_iter().filter(|c| !found.contains(c)).collect();
    let ok = found.len() == 3 && found == represented && missing == vec![minus_disc];
    Ok((ok, format!("{} open classes, all classes but -disc(Q)", found.len())))
}

fn psi_batch<M: Model>(m: &M, rng: &mut ChaCha8Rng, count: usize) -> Result<usize, String> {
    let mut good = 0;
    for _ in 0..count {
        let x = random_generic_element(m, rng);
        if psi_identity_holds(m, &x).map_err(err)? {
            good += 1;
        }
    }
    Ok(good)
}

fn c8_psi_identity(ctx: PadicContext, seed: u64) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut total = 0;
    let mut good = 0;
    for n in 2..=6 {
        good += psi_batch(&Sp::new(n, ctx).map_err(err)?, &mut rng, 100)?;
        total += 100;
    }
    for k in 0..=2 {
        good += psi_batch(&Type3::new(k, ctx).map_err(err)?, &mut rng, 100)?;
        total += 100;
    }
    Ok((good == total, format!("{good}/{total} random generic elements (SP n=2..6, TYPE3 k=0..2)")))
}

fn homogeneity_batch<M: Model>(m: &M) -> Result<(usize, usize), String> {
    let ctx = m.ctx();
    let reps: Vec<Q> = SquareClass::ALL.iter().map(|c| ctx.rep(*c)).collect();
    let slots = m.k() + 1;
    let mut good = 0;
    let total = 4usize.pow(slots as u32);
    for mut idx in 0..total {
        let xs: Vec<Q> = (0..slots)
            .map(|_| {
                let v = reps[idx % 4].clone();
                idx /= 4;
                v
            })
            .collect();
        if homogeneity_holds(m, &xs).map_err(err)? {
            good += 1;
        }
    }
    Ok((good, total))
}

fn c9_homogeneity(ctx: PadicContext) -> Outcome {
    let mut good = 0;
    let mut total = 0;
    let mut add = |r: (usize, usize)| {
        good += r.0;
        total += r.1;
    };
    for n in 1..=3 {
        add(homogeneity_batch(&Gl::new(n, ctx).map_err(err)?)?);
        add(homogeneity_batch(&Type3::new(n - 1, ctx).map_err(err)?)?);
        if n >= 2 {
            add(homogeneity_batch(&Sp::new(n, ctx).map_err(err)?)?);
            add(homogeneity_batch(&Unitary::new(n, ctx).map_err(err)?)?);
        }
    }
    Ok((good == total, format!("{good}/{total} scalings")))
}

fn qx_batch<M: Model>(m: &M, ell: i64, d: i64) -> Result<(usize, usize), String> {
    let choices = m.slot_choices();
    let total = grid_size(m);
    let mut good = 0;
    for i in 0..total {
        let x = grid_element(m, &choices, i);
        let rank = m.orbit_invariants(&x).rank as i64;
        if m.q_form_qx(&x).map_err(err)?.rank() as i64 == rank_qx(rank, ell, d) {
            good += 1;
        }
    }
    Ok((good, total))
}

fn c10_qx_rank(ctx: PadicContext) -> Outcome {
    let (mut good, mut total) = (0, 0);
    for n in 2..=5 {
        let (g, t) = qx_batch(&Sp::new(n, ctx).map_err(err)?, 1, 1)?;
        good += g;
        total += t;
    }
    for k in 0..=2 {
        let (g, t) = qx_batch(&Type3::new(k, ctx).map_err(err)?, 3, 4)?;
        good += g;
        total += t;
    }
    Ok((good == total, format!("{good}/{total} diagonal elements (SP n=2..5, TYPE3 k=0..2)")))
}

fn c11_qforms(ctx: PadicContext) -> Outcome {
    let aniso = |r: usize| -> Vec<QForm> {
        sorted_class_lists(r)
            .iter()
            .map(|cs| QForm::from_classes(&ctx, cs))
            .filter(|f| !is_isotropic(&ctx, f))
            .collect()
    };
    let classes = |forms: &[QForm]| forms.iter().map(|f| equivalence_key(&ctx, f)).collect::<BTreeSet<_>>().len();
    let (a2, a3, a4, a5) = (aniso(2), aniso(3), aniso(4), aniso(5));
    let (n2, n3, n4) = (classes(&a2), classes(&a3), classes(&a4));
    let sims = a2.iter().map(|f| similarity_key(&ctx, f)).collect::<BTreeSet<_>>().len();
    let binaries_represent_two = a2.iter().all(|f| represented_classes(&ctx, f).classes.len() == 2);
    let ok = n4 == 1 && n3 == 4 && n2 == 6 && sims == 3 && binaries_represent_two && a5.is_empty();
    Ok((
        ok,
        format!(
            "anisotropic classes rank 4/3/2 = {n4}/{n3}/{n2}, binary similarity classes {sims}, \
             binaries represent 2 classes: {binaries_represent_two}, anisotropic rank-5 forms {}",
            a5.len()
        ),
    ))
}

fn unipotent_batch<M: Model>(m: &M, rng: &mut ChaCha8Rng, count: usize) -> Result<usize, String> {
    let mut good = 0;
    for _ in 0..count {
        let x = random_element(m, rng);
        let nx = m.act(&m.random_unipotent(rng), &x);
        let mut same = true;
        for j in 0..=m.k() {
            same &= m.delta(j, &nx).map_err(err)? == m.delta(j, &x).map_err(err)?;
        }
        good += same as usize;
    }
    Ok(good)
}

fn c12_p_orbits(ctx: PadicContext, seed: u64) -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for k in 0..=3usize {
        let n = k + 1;
        let gl = p_orbit_census(&Gl::new(n, ctx).map_err(err)?).map_err(err)?;
        let t3 = p_orbit_census(&Type3::new(k, ctx).map_err(err)?).map_err(err)?;
        ok &= gl == 1 && t3 == 3usize.pow(n as u32);
        let mut line = format!("k={k}: GL {gl}, TYPE3 {t3}");
        if n >= 2 {
            let sp = p_orbit_census(&Sp::new(n, ctx).map_err(err)?).map_err(err)?;
            let un = p_orbit_census(&Unitary::new(n, ctx).map_err(err)?).map_err(err)?;
            ok &= sp == 4usize.pow(k as u32) && un == 2usize.pow(k as u32);
            line.push_str(&format!(", SP {sp}, UNITARY {un}"));
        }
        parts.push(line);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = 200;
    let inv = [
        unipotent_batch(&Gl::new(3, ctx).map_err(err)?, &mut rng, samples)?,
        unipotent_batch(&Sp::new(3, ctx).map_err(err)?, &mut rng, samples)?,
        unipotent_batch(&Unitary::new(3, ctx).map_err(err)?, &mut rng, samples)?,
        unipotent_batch(&Type3::new(2, ctx).map_err(err)?, &mut rng, samples)?,
    ];
    ok &= inv.iter().all(|&g| g == samples);
    parts.push(format!("N-invariance {:?}/{samples} (GL, SP, UNITARY n=3; TYPE3 k=2)", inv));
    Ok((ok, parts.join("; ")))
}

fn chi0_batch<M: Model>(m: &M, rng: &mut ChaCha8Rng, count: usize) -> Result<(bool, String), String> {
    let ctx = *m.ctx();
    let image = chi0_image(&m.descriptor().map_err(err)?).map_err(err)?;
    let x = random_generic_element(m, rng);
    let d0 = m.delta(0, &x).map_err(err)?;
    let mut good = 0;
    let mut seen = BTreeSet::new();
    for _ in 0..count {
        let g = m.random_group(rng);
        let ratio = m.delta(0, &m.act(&g, &x)).map_err(err)? / &d0;
        if image.admits(&ctx, &ratio) && ratio == m.chi0(&g) {
            good += 1;
        }
        seen.insert(ctx.square_class(&ratio).map_err(err)?);
    }
    Ok((good == count, format!("{} k={} in {image}: {good}/{count} ({} classes hit)", m.tag(), m.k(), seen.len())))
}

fn c13_chi0(ctx: PadicContext, seed: u64) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = 500;
    let results = [
        chi0_batch(&Gl::new(3, ctx).map_err(err)?, &mut rng, n)?,
        chi0_batch(&Sp::new(2, ctx).map_err(err)?, &mut rng, n)?,
        chi0_batch(&Sp::new(3, ctx).map_err(err)?, &mut rng, n)?,
        chi0_batch(&Unitary::new(2, ctx).map_err(err)?, &mut rng, n)?,
        chi0_batch(&Unitary::new(3, ctx).map_err(err)?, &mut rng, n)?,
        chi0_batch(&Type3::new(1, ctx).map_err(err)?, &mut rng, n)?,
        chi0_batch(&Ortho1::new(ctx), &mut rng, n)?,
    ];
    let ok = results.iter().all(|(g, _)| *g);
    Ok((ok, results.iter().map(|(_, d)| d.as_str()).collect::<Vec<_>>().join("; ")))
}

fn c14_primes(seed: u64) -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for id in [3u8, 4, 5, 11, 12] {
        let a = run_criterion(id, 5, seed);
        let b = run_criterion(id, 13, seed);
        let same = a.passed == b.passed && a.detail == b.detail;
        ok &= a.passed && b.passed && same;
        parts.push(format!(
            "{id}: p=5 {}, p=13 {}, {}",
            if a.passed { "pass" } else { "fail" },
            if b.passed { "pass" } else { "fail" },
            if same { "identical" } else { "differ" }
        ));
    }
    Ok((ok, parts.join("; ")))
}

/// The descriptors behind the model tags, for reports.
pub fn model_descriptor(tag: Tag, rank: usize, ctx: PadicContext) -> Result<GradedDescriptor, RealizationError> {
    crate::with_model!(&AnyModel::new(tag, rank, ctx)?, m => m.descriptor())
}
