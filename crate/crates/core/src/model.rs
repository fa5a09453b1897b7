//! TOML model files.
//!
//! ```toml
//! instance = "potential"
//!
//! [[variable]]
//! name = "A"
//! states = 2
//!
//! [valuation.p]
//! scope = ["A"]
//! values = [0.2, 0.8]
//!
//! [quotient.c]
//! num = "q"
//! den = "p"
//! ```
//!
//! Gaussian valuations carry `mean` and `concentration` (rows); belief
//! valuations carry a `frame` (block lists over `universe` atoms, or a
//! variable `scope` when variables are declared) and `masses`, a list of
//! `{ set = [block indices], mass = m }`. Tables are row-major with the
//! first listed scope variable most significant.

use std::collections::BTreeMap;
use std::ops::Range;

use serde::{Deserialize, Serialize};
use toml::Spanned;

use crate::algebra::{Instance, Valuation};
use crate::belief::{multivariate_frame, MassFunction};
use crate::composition::DensityElement;
use crate::error::{Error, Result};
use crate::gaussian::Gaussian;
use crate::lattice::{Partition, VarSet};
use crate::linalg::Matrix;
use crate::potential::{Potential, VariableSpace};
use crate::quotient::Quotient;

/// Valuation payload as written in a model file.
#[derive(Clone, Debug, Default, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RawValuation {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scope: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frame: Option<Vec<Vec<u32>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub concentration: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub masses: Option<Vec<RawMass>>,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RawMass {
    pub set: Vec<u32>,
    pub mass: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawVariable {
    name: String,
    states: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawQuotient {
    num: String,
    den: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    instance: Spanned<String>,
    #[serde(default)]
    variable: Vec<Spanned<RawVariable>>,
    universe: Option<Spanned<u32>>,
    #[serde(default)]
    valuation: BTreeMap<String, Spanned<RawValuation>>,
    #[serde(default)]
    quotient: BTreeMap<String, Spanned<RawQuotient>>,
}

/// A result as printed by `eval`: a valuation, or a quotient of products.
#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(untagged)]
pub enum RawResult {
    Quotient { kind: String, num: Vec<RawValuation>, den: Vec<RawValuation> },
    Member(RawValuation),
}

#[derive(Debug, Deserialize, Serialize)]
struct ResultFile {
    result: RawResult,
}

/// 1-based line and column of a byte offset.
pub fn locate(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

fn at(text: &str, span: Range<usize>, message: impl Into<String>) -> Error {
    let (line, column) = locate(text, span.start);
    Error::Invalid { line, column, message: message.into() }
}

fn toml_error(text: &str, e: toml::de::Error) -> Error {
    let (line, column) = e.span().map_or((1, 1), |s| locate(text, s.start));
    Error::Parse { line, column, message: e.message().trim().to_string() }
}

/// Variable declarations shared by all valuations of a model.
#[derive(Clone, Debug, PartialEq)]
pub struct Schema {
    pub instance: Instance,
    /// Names and state counts (the count is 0 for real-valued variables).
    pub variables: Vec<(String, usize)>,
    /// Number of atoms of the belief universe.
    pub universe: Option<u32>,
}

impl Schema {
    pub fn var_index(&self, name: &str) -> Result<u32> {
        self.variables
            .iter()
            .position(|(n, _)| n == name)
            .map(|i| i as u32)
            .ok_or_else(|| Error::Model(format!("unknown variable `{name}`")))
    }

    pub fn var_name(&self, v: u32) -> &str {
        &self.variables[v as usize].0
    }

    pub fn cards(&self) -> Vec<usize> {
        self.variables.iter().map(|(_, c)| *c).collect()
    }

    /// Variable ids of a name list, rejecting duplicates.
    pub fn var_set(&self, names: &[String]) -> Result<(VarSet, Vec<u32>)> {
        let mut set = VarSet::empty();
        let mut ids = Vec::with_capacity(names.len());
        for n in names {
            let v = self.var_index(n)?;
            if set.contains(v) {
                return Err(Error::Model(format!("variable `{n}` listed twice")));
            }
            set.insert(v);
            ids.push(v);
        }
        Ok((set, ids))
    }

    pub fn var_names(&self, s: VarSet) -> Vec<String> {
        s.iter().map(|v| self.var_name(v).to_string()).collect()
    }
}

/// A domain as written in a pipeline: `{A,B}` or `[[0,1],[2]]`.
#[derive(Clone, Debug, PartialEq)]
pub enum DomainLit {
    Vars(Vec<String>),
    Blocks(Vec<Vec<u32>>),
}

/// Conversion between an instance's valuations and model-file payloads.
pub trait Payload: Valuation {
    const KIND: &'static str;
    fn context_of(schema: &Schema) -> Self::Context;
    fn from_raw(raw: &RawValuation, schema: &Schema) -> Result<Self>;
    fn to_raw(&self, schema: &Schema) -> RawValuation;
    fn domain(lit: &DomainLit, schema: &Schema) -> Result<Self::Domain>;
    fn render_domain(d: &Self::Domain, schema: &Schema) -> String;
}

fn require<'a, T>(field: &'a Option<T>, name: &str, kind: &str) -> Result<&'a T> {
    field.as_ref().ok_or_else(|| Error::Model(format!("{kind} valuation needs `{name}`")))
}

fn reject(present: bool, name: &str, kind: &str) -> Result<()> {
    if present {
        Err(Error::Model(format!("`{name}` is not a field of {kind} valuations")))
    } else {
        Ok(())
    }
}

fn render_vars(s: VarSet, schema: &Schema) -> String {
    format!("{{{}}}", schema.var_names(s).join(","))
}

impl Payload for Potential {
    const KIND: &'static str = "potential";

    fn context_of(schema: &Schema) -> VariableSpace {
        VariableSpace::new(schema.cards())
    }

    /// Values follow the listed scope order; they are permuted into
    /// declaration order.
    fn from_raw(raw: &RawValuation, schema: &Schema) -> Result<Self> {
        reject(raw.mean.is_some() || raw.concentration.is_some(), "mean/concentration", Self::KIND)?;
        reject(raw.frame.is_some() || raw.masses.is_some(), "frame/masses", Self::KIND)?;
        let names = require(&raw.scope, "scope", Self::KIND)?;
        let values = require(&raw.values, "values", Self::KIND)?;
        let (scope, listed) = schema.var_set(names)?;
        let listed_cards: Vec<usize> = listed.iter().map(|&v| schema.cards()[v as usize]).collect();
        let n: usize = listed_cards.iter().product();
        if values.len() != n {
            return Err(Error::InvalidValuation(format!(
                "scope {} has {n} configurations but {} values are given",
                render_vars(scope, schema),
                values.len()
            )));
        }
        let cards: Vec<usize> = scope.iter().map(|v| schema.cards()[v as usize]).collect();
        let order: Vec<usize> = scope.iter().map(|v| listed.iter().position(|&l| l == v).expect("listed")).collect();
        let mut out = vec![0.0; n];
        for (i, slot) in out.iter_mut().enumerate() {
            // digits of i in declaration order, re-encoded in listed order
            let mut rest = i;
            let mut digits = vec![0; cards.len()];
            for k in (0..cards.len()).rev() {
                digits[k] = rest % cards[k];
                rest /= cards[k];
            }
            let mut j = 0;
            for (pos, &c) in listed_cards.iter().enumerate() {
                let k = order.iter().position(|&o| o == pos).expect("permutation");
                j = j * c + digits[k];
            }
            *slot = values[j];
        }
        Potential::new(scope, cards, out)
    }

    fn to_raw(&self, schema: &Schema) -> RawValuation {
        RawValuation {
            scope: Some(schema.var_names(self.scope())),
            values: Some(self.values().to_vec()),
            ..Default::default()
        }
    }

    fn domain(lit: &DomainLit, schema: &Schema) -> Result<VarSet> {
        match lit {
            DomainLit::Vars(names) => Ok(schema.var_set(names)?.0),
            DomainLit::Blocks(_) => Err(Error::Model("potential domains are variable sets like {A,B}".into())),
        }
    }

    fn render_domain(d: &VarSet, schema: &Schema) -> String {
        render_vars(*d, schema)
    }
}

impl Payload for Gaussian {
    const KIND: &'static str = "gaussian";

    fn context_of(_schema: &Schema) {}

    fn from_raw(raw: &RawValuation, schema: &Schema) -> Result<Self> {
        reject(raw.values.is_some(), "values", Self::KIND)?;
        reject(raw.frame.is_some() || raw.masses.is_some(), "frame/masses", Self::KIND)?;
        let names = require(&raw.scope, "scope", Self::KIND)?;
        let mean = require(&raw.mean, "mean", Self::KIND)?;
        let rows = require(&raw.concentration, "concentration", Self::KIND)?;
        let (scope, listed) = schema.var_set(names)?;
        let k = Matrix::from_rows(rows)?;
        if mean.len() != listed.len() || k.dim() != listed.len() {
            return Err(Error::InvalidValuation(format!(
                "scope has {} variables; mean has {} entries and concentration is {}x{}",
                listed.len(),
                mean.len(),
                rows.len(),
                rows.first().map_or(0, Vec::len)
            )));
        }
        let idx: Vec<usize> = scope.iter().map(|v| listed.iter().position(|&l| l == v).expect("listed")).collect();
        Gaussian::new(scope, idx.iter().map(|&i| mean[i]).collect(), k.select(&idx))
    }

    fn to_raw(&self, schema: &Schema) -> RawValuation {
        let k = self.concentration();
        let rows = (0..k.dim()).map(|i| (0..k.dim()).map(|j| k[(i, j)]).collect()).collect();
        RawValuation {
            scope: Some(schema.var_names(self.scope())),
            mean: Some(self.mean().to_vec()),
            concentration: Some(rows),
            ..Default::default()
        }
    }

    fn domain(lit: &DomainLit, schema: &Schema) -> Result<VarSet> {
        match lit {
            DomainLit::Vars(names) => Ok(schema.var_set(names)?.0),
            DomainLit::Blocks(_) => Err(Error::Model("Gaussian domains are variable sets like {X,Y}".into())),
        }
    }

    fn render_domain(d: &VarSet, schema: &Schema) -> String {
        render_vars(*d, schema)
    }
}

fn belief_frame(
    scope: Option<&Vec<String>>,
    blocks: Option<&Vec<Vec<u32>>>,
    schema: &Schema,
) -> Result<(Partition, Vec<usize>)> {
    let n = schema.universe.expect("belief schemas have a universe");
    match (scope, blocks) {
        (Some(names), None) => {
            if schema.variables.is_empty() {
                return Err(Error::Model("a variable scope needs declared variables".into()));
            }
            let frame = multivariate_frame(&schema.cards(), schema.var_set(names)?.0)?;
            let order = (0..frame.len()).collect();
            Ok((frame, order))
        }
        (None, Some(blocks)) => {
            let frame = Partition::new(n, blocks)?;
            // listed block i is the canonical block containing its first atom
            let order = blocks.iter().map(|b| b.first().map(|&a| frame.block_of_atom(a)).unwrap_or(0)).collect();
            Ok((frame, order))
        }
        _ => Err(Error::Model("belief valuations need exactly one of `frame` and `scope`".into())),
    }
}

impl Payload for MassFunction {
    const KIND: &'static str = "belief";

    fn context_of(_schema: &Schema) {}

    fn from_raw(raw: &RawValuation, schema: &Schema) -> Result<Self> {
        reject(raw.values.is_some(), "values", Self::KIND)?;
        reject(raw.mean.is_some() || raw.concentration.is_some(), "mean/concentration", Self::KIND)?;
        let masses = require(&raw.masses, "masses", Self::KIND)?;
        let (frame, order) = belief_frame(raw.scope.as_ref(), raw.frame.as_ref(), schema)?;
        let mut entries = Vec::with_capacity(masses.len());
        for m in masses {
            let mut set = 0u64;
            for &b in &m.set {
                let canonical = order.get(b as usize).ok_or_else(|| {
                    Error::InvalidValuation(format!("block index {b} outside a frame of {} blocks", frame.len()))
                })?;
                set |= 1 << canonical;
            }
            entries.push((set, m.mass));
        }
        MassFunction::new(frame, entries)
    }

    fn to_raw(&self, _schema: &Schema) -> RawValuation {
        let masses = self
            .masses()
            .iter()
            .map(|(&s, &mass)| RawMass { set: (0..64).filter(|b| s >> b & 1 == 1).collect(), mass })
            .collect();
        RawValuation { frame: Some(self.frame().block_lists()), masses: Some(masses), ..Default::default() }
    }

    fn domain(lit: &DomainLit, schema: &Schema) -> Result<Partition> {
        match lit {
            DomainLit::Vars(names) => belief_frame(Some(names), None, schema).map(|f| f.0),
            DomainLit::Blocks(blocks) => belief_frame(None, Some(blocks), schema).map(|f| f.0),
        }
    }

    fn render_domain(d: &Partition, _schema: &Schema) -> String {
        d.to_string()
    }
}

/// A model whose valuations are all of one instance.
#[derive(Clone, Debug)]
pub struct TypedModel<V: Payload> {
    pub schema: Schema,
    pub context: V::Context,
    pub valuations: BTreeMap<String, V>,
    pub quotients: BTreeMap<String, Quotient<V>>,
}

/// A parsed model file.
#[derive(Clone, Debug)]
pub enum Model {
    Potential(TypedModel<Potential>),
    Gaussian(TypedModel<Gaussian>),
    Belief(TypedModel<MassFunction>),
}

/// Applies `$body` to the typed model inside a [`Model`].
#[macro_export]
macro_rules! with_model {
    ($model:expr, $m:ident => $body:expr) => {
        match $model {
            $crate::model::Model::Potential($m) => $body,
            $crate::model::Model::Gaussian($m) => $body,
            $crate::model::Model::Belief($m) => $body,
        }
    };
}

impl Model {
    pub fn parse(text: &str) -> Result<Model> {
        let raw: RawModel = toml::from_str(text).map_err(|e| toml_error(text, e))?;
        let instance = match raw.instance.get_ref().as_str() {
            "potential" => Instance::Potential,
            "gaussian" => Instance::Gaussian,
            "belief" => Instance::Belief,
            other => {
                return Err(at(
                    text,
                    raw.instance.span(),
                    format!("unknown instance `{other}` (expected potential, gaussian or belief)"),
                ))
            }
        };
        let schema = build_schema(text, instance, &raw)?;
        Ok(match instance {
            Instance::Potential => Model::Potential(TypedModel::build(text, schema, &raw)?),
            Instance::Gaussian => Model::Gaussian(TypedModel::build(text, schema, &raw)?),
            Instance::Belief => Model::Belief(TypedModel::build(text, schema, &raw)?),
        })
    }

    pub fn instance(&self) -> Instance {
        with_model!(self, m => m.schema.instance)
    }

    pub fn schema(&self) -> &Schema {
        with_model!(self, m => &m.schema)
    }

    /// One line per valuation and quotient.
    pub fn summary(&self) -> Vec<String> {
        with_model!(self, m => m.summary())
    }
}

fn build_schema(text: &str, instance: Instance, raw: &RawModel) -> Result<Schema> {
    let mut variables: Vec<(String, usize)> = Vec::new();
    for v in &raw.variable {
        let span = v.span();
        let v = v.get_ref();
        if variables.iter().any(|(n, _)| *n == v.name) {
            return Err(at(text, span, format!("variable `{}` declared twice", v.name)));
        }
        let states = match (instance, v.states) {
            (Instance::Gaussian, None) => 0,
            (Instance::Gaussian, Some(_)) => {
                return Err(at(text, span, "Gaussian variables are real-valued and take no `states`"))
            }
            (_, Some(0)) | (_, None) => {
                return Err(at(text, span, format!("variable `{}` needs a positive number of states", v.name)))
            }
            (_, Some(s)) => s,
        };
        variables.push((v.name.clone(), states));
    }
    if variables.len() > VarSet::MAX_VARS as usize {
        return Err(Error::Model(format!("at most {} variables are supported", VarSet::MAX_VARS)));
    }
    let universe = match (instance, &raw.universe) {
        (Instance::Belief, Some(u)) if variables.is_empty() => Some(*u.get_ref()),
        (Instance::Belief, Some(u)) => {
            return Err(at(text, u.span(), "declare either `universe` or variables, not both"))
        }
        (Instance::Belief, None) if !variables.is_empty() => {
            let n = variables.iter().map(|v| v.1).product::<usize>();
            Some(u32::try_from(n).unwrap_or(u32::MAX))
        }
        (Instance::Belief, None) => return Err(Error::Model("belief models need `universe` or variables".into())),
        (_, Some(u)) => return Err(at(text, u.span(), "`universe` only applies to belief models")),
        (_, None) => None,
    };
    if let Some(n) = universe {
        if n == 0 || n > Partition::MAX_ATOMS {
            return Err(Error::Model(format!("universe of {n} atoms is outside 1..={}", Partition::MAX_ATOMS)));
        }
    }
    Ok(Schema { instance, variables, universe })
}

impl<V: Payload> TypedModel<V> {
    fn build(text: &str, schema: Schema, raw: &RawModel) -> Result<Self> {
        let mut valuations = BTreeMap::new();
        for (name, v) in &raw.valuation {
            let val = V::from_raw(v.get_ref(), &schema)
                .map_err(|e| at(text, v.span(), format!("valuation `{name}`: {e}")))?;
            valuations.insert(name.clone(), val);
        }
        let mut quotients = BTreeMap::new();
        for (name, q) in &raw.quotient {
            if valuations.contains_key(name) {
                return Err(at(text, q.span(), format!("name `{name}` is used by a valuation and a quotient")));
            }
            let r = q.get_ref();
            let get = |n: &str| {
                valuations
                    .get(n)
                    .cloned()
                    .ok_or_else(|| at(text, q.span(), format!("quotient `{name}` refers to unknown valuation `{n}`")))
            };
            let quotient = Quotient::new(get(&r.num)?, get(&r.den)?)
                .map_err(|e| at(text, q.span(), format!("quotient `{name}`: {e}")))?;
            quotients.insert(name.clone(), quotient);
        }
        let context = V::context_of(&schema);
        Ok(TypedModel { schema, context, valuations, quotients })
    }

    pub fn summary(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .valuations
            .iter()
            .map(|(n, v)| format!("valuation {n}: {} on {}", V::KIND, V::render_domain(&v.label(), &self.schema)))
            .collect();
        out.extend(self.quotients.iter().map(|(n, q)| {
            let den = q.den_label().map(|d| V::render_domain(&d, &self.schema)).unwrap_or_default();
            format!("quotient {n}: {} on {} over {den}", V::KIND, V::render_domain(&q.label0(), &self.schema))
        }));
        out
    }

    /// A named valuation or quotient.
    pub fn lookup(&self, name: &str) -> Result<DensityElement<V>> {
        if let Some(v) = self.valuations.get(name) {
            return Ok(DensityElement::Member(v.clone()));
        }
        if let Some(q) = self.quotients.get(name) {
            return Ok(DensityElement::from_quotient(q.clone()));
        }
        Err(Error::Model(format!("unknown name `{name}`")))
    }

    pub fn domain(&self, lit: &DomainLit) -> Result<V::Domain> {
        V::domain(lit, &self.schema)
    }

    pub fn to_raw_result(&self, e: &DensityElement<V>) -> RawResult {
        match e {
            DensityElement::Member(v) => RawResult::Member(v.to_raw(&self.schema)),
            DensityElement::Formal { q, .. } => RawResult::Quotient {
                kind: "quotient".into(),
                num: q.num_factors().iter().map(|v| v.to_raw(&self.schema)).collect(),
                den: q.den_factors().iter().map(|v| v.to_raw(&self.schema)).collect(),
            },
        }
    }

    /// Renders a result as a `[result]` table with one inline value per
    /// key, or as a single `result = {...}` line.
    pub fn render(&self, e: &DensityElement<V>, compact: bool) -> String {
        let value = toml::Value::try_from(self.to_raw_result(e)).expect("results serialize");
        if compact {
            return format!("result = {value}\n");
        }
        let mut out = String::from("[result]\n");
        for (k, v) in value.as_table().expect("results are tables") {
            match v.as_array() {
                // lists of tables get one entry per line
                Some(items) if items.iter().any(toml::Value::is_table) => {
                    out.push_str(&format!("{k} = [\n"));
                    for item in items {
                        out.push_str(&format!("  {item},\n"));
                    }
                    out.push_str("]\n");
                }
                _ => out.push_str(&format!("{k} = {v}\n")),
            }
        }
        out
    }

    /// Parses a rendered result back.
    pub fn parse_result(&self, text: &str) -> Result<DensityElement<V>> {
        let file: ResultFile = toml::from_str(text).map_err(|e| toml_error(text, e))?;
        match file.result {
            RawResult::Member(v) => Ok(DensityElement::Member(V::from_raw(&v, &self.schema)?)),
            RawResult::Quotient { kind, num, den } => {
                if kind != "quotient" {
                    return Err(Error::Model(format!("unknown result kind `{kind}`")));
                }
                let parse = |list: Vec<RawValuation>| -> Result<Vec<V>> {
                    list.iter().map(|v| V::from_raw(v, &self.schema)).collect()
                };
                let q = Quotient::from_factors(parse(num)?, parse(den)?)?;
                Ok(DensityElement::Formal { q, marginal: None })
            }
        }
    }
}
