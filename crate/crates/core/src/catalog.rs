//! The catalog of simple regular graded algebras: one row per family, with
//! the diagram pattern and the structure constants written as expressions in
//! the row parameters.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use evalexpr::{
    eval_boolean_with_context, eval_int_with_context, ContextWithMutableVariables, DefaultNumericTypes,
    HashMapContext, Value,
};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagram::{Color, DiagramError, OneType, RootKind, WeightedSatakeDiagram};

const CATALOG_JSON: &str = include_str!("../data/catalog.json");

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CatalogError {
    #[error("not a regular parabolic commutative grading")]
    NotRegular,
    #[error("unknown catalog row `{0}`")]
    UnknownRow(String),
    #[error("expression `{expr}` failed: {msg}")]
    Expr { expr: String, msg: String },
    #[error("unrecognized (ell, e) = ({0}, {1})")]
    UnknownType(i64, i64),
    #[error("dim V+ is not integral for this descriptor")]
    NonIntegralDimension,
    #[error("descent gives rank {descent} but the catalog row has rank {row}")]
    RankMismatch { descent: usize, row: i64 },
    #[error("descent gives 1-type {descent} but the catalog row has {row}")]
    OneTypeMismatch { descent: OneType, row: OneType },
    #[error("parameters {0:?} do not satisfy the row constraints")]
    BadParams(BTreeMap<String, i64>),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GType {
    I,
    II,
    III,
}

impl fmt::Display for GType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Table,
    TextDerived,
}

#[derive(Debug, Clone, Deserialize)]
pub struct CatalogRow {
    pub id: String,
    pub algebra: String,
    pub vplus: String,
    pub source: Provenance,
    pub notes: String,
    family: String,
    /// Parameter name to its least admissible value.
    params: BTreeMap<String, i64>,
    size: String,
    black: String,
    partner: String,
    circled: String,
    k: String,
    ell: String,
    d: String,
    e: String,
    one_type: String,
    delta: String,
    gtype: GType,
    realization: Option<String>,
    realization_when: String,
}

#[derive(Debug, Deserialize)]
pub struct Catalog {
    pub version: String,
    pub description: String,
    pub rows: Vec<CatalogRow>,
}

/// The structural fingerprint of a graded algebra.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradedDescriptor {
    pub case_id: String,
    pub algebra: String,
    pub params: BTreeMap<String, i64>,
    pub k: i64,
    pub ell: i64,
    pub d: i64,
    pub e: i64,
    pub one_type: OneType,
    pub gtype: GType,
    pub realization_tag: Option<String>,
    pub source: Provenance,
}

impl GradedDescriptor {
    pub fn rank(&self) -> i64 {
        self.k + 1
    }

    pub fn kappa(&self) -> i64 {
        self.one_type.kappa() as i64
    }
}

pub fn catalog() -> &'static Catalog {
    static CATALOG: OnceLock<Catalog> = OnceLock::new();
    CATALOG.get_or_init(|| serde_json::from_str(CATALOG_JSON).expect("bundled catalog is valid json"))
}

pub fn row(id: &str) -> Result<&'static CatalogRow, CatalogError> {
    catalog().rows.iter().find(|r| r.id == id).ok_or_else(|| CatalogError::UnknownRow(id.into()))
}

fn context(params: &BTreeMap<String, i64>, i: Option<i64>) -> HashMapContext<DefaultNumericTypes> {
    let mut ctx = HashMapContext::<DefaultNumericTypes>::new();
    for (name, v) in params {
        ctx.set_value(name.clone(), Value::from_int(*v)).expect("fresh integer variable");
    }
    if let Some(i) = i {
        ctx.set_value("i".into(), Value::from_int(i)).expect("fresh integer variable");
    }
    ctx
}

fn eval_int(expr: &str, ctx: &HashMapContext<DefaultNumericTypes>) -> Result<i64, CatalogError> {
    eval_int_with_context(expr, ctx).map_err(|e| CatalogError::Expr { expr: expr.into(), msg: e.to_string() })
}

fn eval_bool(expr: &str, ctx: &HashMapContext<DefaultNumericTypes>) -> Result<bool, CatalogError> {
    eval_boolean_with_context(expr, ctx)
        .map_err(|e| CatalogError::Expr { expr: expr.into(), msg: e.to_string() })
}

impl CatalogRow {
    pub fn family(&self) -> RootKind {
        self.family.parse().expect("catalog families are valid")
    }

    pub fn param_names(&self) -> impl Iterator<Item = &String> {
        self.params.keys()
    }

    pub fn size(&self, params: &BTreeMap<String, i64>) -> Result<i64, CatalogError> {
        eval_int(&self.size, &context(params, None))
    }

    fn check_params(&self, params: &BTreeMap<String, i64>) -> Result<(), CatalogError> {
        let ok = self.params.len() == params.len()
            && self.params.iter().all(|(k, min)| params.get(k).is_some_and(|v| v >= min));
        if ok {
            Ok(())
        } else {
            Err(CatalogError::BadParams(params.clone()))
        }
    }

    /// Expected `(black?, partner, circled)` data in Bourbaki labels.
    fn pattern(&self, params: &BTreeMap<String, i64>) -> Result<(Vec<bool>, Vec<usize>, usize), CatalogError> {
        let n = self.size(params)?;
        let mut black = Vec::new();
        let mut partner = Vec::new();
        for i in 1..=n {
            let ctx = context(params, Some(i));
            black.push(eval_bool(&self.black, &ctx)?);
            let p = eval_int(&self.partner, &ctx)?;
            if p < 1 || p > n {
                return Err(CatalogError::Expr { expr: self.partner.clone(), msg: format!("partner {p} of {i}") });
            }
            partner.push((p - 1) as usize);
        }
        let c = eval_int(&self.circled, &context(params, None))?;
        Ok((black, partner, (c - 1) as usize))
    }

    /// The row's diagram for the given parameters, in Bourbaki labels.
    pub fn diagram(&self, params: &BTreeMap<String, i64>) -> Result<WeightedSatakeDiagram, CatalogError> {
        self.check_params(params)?;
        let (black, partner, circled) = self.pattern(params)?;
        let n = black.len();
        let black_labels: Vec<usize> = (1..=n).filter(|&i| black[i - 1]).collect();
        let pairs: Vec<(usize, usize)> =
            (0..n).filter(|&i| partner[i] > i).map(|i| (i + 1, partner[i] + 1)).collect();
        Ok(crate::diagram::bourbaki_diagram(self.family(), n, &black_labels, &pairs, circled + 1)?)
    }

    pub fn descriptor(&self, params: &BTreeMap<String, i64>) -> Result<GradedDescriptor, CatalogError> {
        self.check_params(params)?;
        let ctx = context(params, None);
        let one_type = match self.one_type.as_str() {
            "B" => OneType::B,
            _ => OneType::A { delta: eval_int(&self.delta, &ctx)? as u32 },
        };
        let realization_tag =
            if eval_bool(&self.realization_when, &ctx)? { self.realization.clone() } else { None };
        Ok(GradedDescriptor {
            case_id: self.id.clone(),
            algebra: self.algebra.clone(),
            params: params.clone(),
            k: eval_int(&self.k, &ctx)?,
            ell: eval_int(&self.ell, &ctx)?,
            d: eval_int(&self.d, &ctx)?,
            e: eval_int(&self.e, &ctx)?,
            one_type,
            gtype: self.gtype,
            realization_tag,
            source: self.source,
        })
    }

    /// Parameter assignments whose diagram has `n` vertices.
    fn candidate_params(&self, n: i64) -> Result<Vec<BTreeMap<String, i64>>, CatalogError> {
        let names: Vec<&String> = self.params.keys().collect();
        let mut out = Vec::new();
        let mut current = BTreeMap::new();
        self.search(&names, n, &mut current, &mut out)?;
        Ok(out)
    }

    fn search(
        &self,
        names: &[&String],
        n: i64,
        current: &mut BTreeMap<String, i64>,
        out: &mut Vec<BTreeMap<String, i64>>,
    ) -> Result<(), CatalogError> {
        let Some((first, rest)) = names.split_first() else {
            if self.size(current)? == n {
                out.push(current.clone());
            }
            return Ok(());
        };
        // Every parameter is bounded by the vertex count in each family.
        for v in self.params[*first]..=n + 1 {
            current.insert((*first).clone(), v);
            self.search(rest, n, current, out)?;
        }
        current.remove(*first);
        Ok(())
    }

    /// All admissible parameter assignments with at most `max_size` vertices,
    /// by increasing size.
    pub fn instances(&self, max_size: i64) -> Result<Vec<BTreeMap<String, i64>>, CatalogError> {
        let mut out = Vec::new();
        for n in 1..=max_size {
            out.extend(self.candidate_params(n)?);
        }
        Ok(out)
    }

    /// Parameters under which `diagram` is this row's diagram, if any.
    pub fn matches(&self, diagram: &WeightedSatakeDiagram) -> Result<Option<BTreeMap<String, i64>>, CatalogError> {
        let n = diagram.len();
        let labelings = diagram.base().labelings(self.family(), n);
        if labelings.is_empty() {
            return Ok(None);
        }
        for params in self.candidate_params(n as i64)? {
            let (black, partner, circled) = self.pattern(&params)?;
            let fits = |lab: &Vec<usize>| {
                lab[circled] == diagram.circled().unwrap_or(usize::MAX)
                    && (0..n).all(|l| (diagram.color()[lab[l]] == Color::Black) == black[l])
                    && (0..n).all(|l| diagram.pairing()[lab[l]] == lab[partner[l]])
            };
            if labelings.iter().any(fits) {
                return Ok(Some(params));
            }
        }
        Ok(None)
    }
}

/// Matches a diagram against the catalog and cross-checks rank and 1-type
/// against the descent.
pub fn lookup(diagram: &WeightedSatakeDiagram) -> Result<GradedDescriptor, CatalogError> {
    let diagram = diagram.circled_component();
    for r in &catalog().rows {
        if let Some(params) = r.matches(&diagram)? {
            let desc = r.descriptor(&params)?;
            let (rank, one_type) = diagram.descent_classify()?;
            if rank as i64 != desc.rank() {
                return Err(CatalogError::RankMismatch { descent: rank, row: desc.rank() });
            }
            if one_type != desc.one_type {
                return Err(CatalogError::OneTypeMismatch { descent: one_type, row: desc.one_type });
            }
            return Ok(desc);
        }
    }
    Err(CatalogError::NotRegular)
}

/// Instantiates a row directly from its parameters.
pub fn descriptor(id: &str, params: &[(&str, i64)]) -> Result<GradedDescriptor, CatalogError> {
    let params = params.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    row(id)?.descriptor(&params)
}

/// The type from `(ℓ, e)`: I when `ℓ` is a square and `e ∈ {0, 4}`, II when
/// `ℓ = 1` and `e ∈ {1, 2, 3}`, III when `ℓ = 3`.
pub fn classify_type(ell: i64, e: i64) -> Result<GType, CatalogError> {
    let root = (ell as f64).sqrt().round() as i64;
    if ell == 3 {
        Ok(GType::III)
    } else if ell == 1 && (1..=3).contains(&e) {
        Ok(GType::II)
    } else if ell >= 1 && root * root == ell && (e == 0 || e == 4) {
        Ok(GType::I)
    } else {
        Err(CatalogError::UnknownType(ell, e))
    }
}

/// `dim V⁺ = (k+1)(ℓ + k d / 2)`.
pub fn dim_vplus(desc: &GradedDescriptor) -> Result<i64, CatalogError> {
    let twice = (desc.k + 1) * (2 * desc.ell + desc.k * desc.d);
    if twice % 2 != 0 {
        return Err(CatalogError::NonIntegralDimension);
    }
    Ok(twice / 2)
}
