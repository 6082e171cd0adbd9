//! Orbifold models: per-sector cohomology rings with their tangent, normal,
//! symplectic and bundle data, read from and written to JSON.
//!
//! ```json
//! { "sectors": [ { "name": "main", "k": 1, "m": 1, "top_degree": 2,
//!     "generators": [{"name": "x", "degree": 2}],
//!     "integrals": {"x": "1/2"},
//!     "tangent_roots": ["x"],
//!     "normal_blocks": [{"lambda": "zeta(3)", "root": "0"}],
//!     "omega": "0",
//!     "bundles": {"E": [{"mu": "1", "roots": ["x/2"]}], "F": []} } ],
//!   "geometric": true,
//!   "action": { "order": 3, "identity_term": "1",
//!     "fixed_points": [{"element": 1, "tangent": ["zeta(3)"], "mu": "1"}] } }
//! ```
//!
//! `integrals` are orbifold integrals over the sector; `m` is the order of
//! the isotropy group of the sector's principal stratum. `action` is
//! optional and feeds the Lefschetz oracle.

use std::sync::Arc;

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::expr::{parse_rational, parse_scalar};
use crate::scalar::CycloScalar;

use super::classes::BundleBlock;
use super::oracle::{FixedPoint, GroupAction};
use super::ring::{CohomologyModel, RingElement};

/// One sector of the inertia orbifold.
#[derive(Clone, Debug)]
pub struct SectorData {
    pub name: String,
    pub k: usize,
    pub m: u32,
    pub ring: Arc<CohomologyModel>,
    pub tangent_roots: Vec<RingElement>,
    pub normal_blocks: Vec<(CycloScalar, RingElement)>,
    pub omega: RingElement,
    pub e: Vec<BundleBlock>,
    pub f: Vec<BundleBlock>,
}

impl SectorData {
    /// Structural checks: top degree `2k`, `k` tangent roots, positive `m`.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::ModelInconsistency(format!("sector '{}': {msg}", self.name)));
        if self.m == 0 {
            return bad("weight m must be positive".into());
        }
        if self.ring.top_degree() as usize != 2 * self.k {
            return bad(format!("top degree {} but k = {}", self.ring.top_degree(), self.k));
        }
        if self.tangent_roots.len() != self.k {
            return bad(format!("{} tangent roots for k = {}", self.tangent_roots.len(), self.k));
        }
        if self.normal_blocks.iter().any(|(l, _)| l.is_one()) {
            return Err(Error::EigenvalueOne);
        }
        Ok(())
    }
}

/// A list of sectors, optionally with the group action it came from.
#[derive(Clone, Debug, Default)]
pub struct OrbifoldModel {
    pub sectors: Vec<SectorData>,
    /// Integrality of the Kawasaki index is asserted for geometric models.
    pub geometric: bool,
    pub action: Option<GroupAction>,
}

fn schema(path: &str, msg: impl Into<String>) -> Error {
    Error::Schema { path: path.to_string(), msg: msg.into() }
}

/// Parse failures inside a field become schema errors at that field.
fn at<T>(path: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Parse { pos, msg } => schema(path, format!("{msg} (at character {pos})")),
        Error::Schema { .. } => e,
        other => other,
    })
}

fn field<'a>(obj: &'a Map<String, Value>, path: &str, key: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| schema(&format!("{path}.{key}"), "missing field"))
}

fn as_object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| schema(path, "expected an object"))
}

fn as_array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| schema(path, "expected an array"))
}

fn as_uint(v: &Value, path: &str) -> Result<u64> {
    v.as_u64().ok_or_else(|| schema(path, "expected a non-negative integer"))
}

/// Strings go through the expression grammar; integers are accepted as is.
fn as_text(v: &Value, path: &str) -> Result<String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) if n.is_i64() || n.is_u64() => Ok(n.to_string()),
        _ => Err(schema(path, "expected a string or an integer")),
    }
}

fn element(ring: &Arc<CohomologyModel>, v: &Value, path: &str) -> Result<RingElement> {
    at(path, ring.parse(&as_text(v, path)?))
}

fn scalar(v: &Value, path: &str) -> Result<CycloScalar> {
    at(path, parse_scalar(&as_text(v, path)?))
}

fn bundle(ring: &Arc<CohomologyModel>, v: &Value, path: &str) -> Result<Vec<BundleBlock>> {
    let mut out = Vec::new();
    for (i, b) in as_array(v, path)?.iter().enumerate() {
        let p = format!("{path}[{i}]");
        let o = as_object(b, &p)?;
        let mu = scalar(field(o, &p, "mu")?, &format!("{p}.mu"))?;
        let roots = as_array(field(o, &p, "roots")?, &format!("{p}.roots"))?
            .iter()
            .enumerate()
            .map(|(j, r)| element(ring, r, &format!("{p}.roots[{j}]")))
            .collect::<Result<Vec<_>>>()?;
        out.push(BundleBlock { mu, roots });
    }
    Ok(out)
}

fn sector(v: &Value, path: &str) -> Result<SectorData> {
    let o = as_object(v, path)?;
    let sub = |key: &str| format!("{path}.{key}");
    let name = field(o, path, "name")?.as_str().ok_or_else(|| schema(&sub("name"), "expected a string"))?.to_string();
    let k = as_uint(field(o, path, "k")?, &sub("k"))? as usize;
    let m = u32::try_from(as_uint(field(o, path, "m")?, &sub("m"))?).map_err(|_| schema(&sub("m"), "too large"))?;
    let top = u32::try_from(as_uint(field(o, path, "top_degree")?, &sub("top_degree"))?)
        .map_err(|_| schema(&sub("top_degree"), "too large"))?;
    let mut gens = Vec::new();
    for (i, g) in as_array(field(o, path, "generators")?, &sub("generators"))?.iter().enumerate() {
        let p = format!("{path}.generators[{i}]");
        let go = as_object(g, &p)?;
        let gname = field(go, &p, "name")?.as_str().ok_or_else(|| schema(&format!("{p}.name"), "expected a string"))?;
        if !gname.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
            || !gname.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
        {
            return Err(schema(&format!("{p}.name"), format!("'{gname}' is not an identifier")));
        }
        let d = u32::try_from(as_uint(field(go, &p, "degree")?, &format!("{p}.degree"))?)
            .map_err(|_| schema(&format!("{p}.degree"), "too large"))?;
        gens.push((gname.to_string(), d));
    }
    let bare = CohomologyModel::new(gens, top)?;
    let mut integrals = Vec::new();
    for (mono, val) in as_object(field(o, path, "integrals")?, &sub("integrals"))? {
        let p = format!("{path}.integrals.{mono}");
        let e = at(&p, bare.parse_monomial(mono))?;
        integrals.push((e, scalar(val, &p)?));
    }
    let ring = bare.with_integrals(integrals)?;
    let tangent_roots = as_array(field(o, path, "tangent_roots")?, &sub("tangent_roots"))?
        .iter()
        .enumerate()
        .map(|(i, r)| element(&ring, r, &format!("{path}.tangent_roots[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    let mut normal_blocks = Vec::new();
    for (i, b) in as_array(field(o, path, "normal_blocks")?, &sub("normal_blocks"))?.iter().enumerate() {
        let p = format!("{path}.normal_blocks[{i}]");
        let bo = as_object(b, &p)?;
        let lam = scalar(field(bo, &p, "lambda")?, &format!("{p}.lambda"))?;
        let root = element(&ring, field(bo, &p, "root")?, &format!("{p}.root"))?;
        normal_blocks.push((lam, root));
    }
    let omega = match o.get("omega") {
        Some(v) => element(&ring, v, &sub("omega"))?,
        None => RingElement::zero(&ring),
    };
    let bundles = as_object(field(o, path, "bundles")?, &sub("bundles"))?;
    let e = bundle(&ring, field(bundles, &sub("bundles"), "E")?, &format!("{path}.bundles.E"))?;
    let f = match bundles.get("F") {
        Some(v) => bundle(&ring, v, &format!("{path}.bundles.F"))?,
        None => Vec::new(),
    };
    let s = SectorData { name, k, m, ring, tangent_roots, normal_blocks, omega, e, f };
    s.validate()?;
    Ok(s)
}

fn action(v: &Value, path: &str) -> Result<GroupAction> {
    let o = as_object(v, path)?;
    let order = u32::try_from(as_uint(field(o, path, "order")?, &format!("{path}.order"))?)
        .map_err(|_| schema(&format!("{path}.order"), "too large"))?;
    let identity_term = at(
        &format!("{path}.identity_term"),
        parse_rational(&as_text(field(o, path, "identity_term")?, &format!("{path}.identity_term"))?),
    )?;
    let mut fixed_points = Vec::new();
    if let Some(fp) = o.get("fixed_points") {
        for (i, p) in as_array(fp, &format!("{path}.fixed_points"))?.iter().enumerate() {
            let pp = format!("{path}.fixed_points[{i}]");
            let po = as_object(p, &pp)?;
            let element = u32::try_from(as_uint(field(po, &pp, "element")?, &format!("{pp}.element"))?)
                .map_err(|_| schema(&format!("{pp}.element"), "too large"))?;
            let tangent = as_array(field(po, &pp, "tangent")?, &format!("{pp}.tangent"))?
                .iter()
                .enumerate()
                .map(|(j, t)| scalar(t, &format!("{pp}.tangent[{j}]")))
                .collect::<Result<Vec<_>>>()?;
            let mu = scalar(field(po, &pp, "mu")?, &format!("{pp}.mu"))?;
            fixed_points.push(FixedPoint { element, tangent, mu });
        }
    }
    let mut non_isolated = Vec::new();
    if let Some(ni) = o.get("non_isolated") {
        for (i, e) in as_array(ni, &format!("{path}.non_isolated"))?.iter().enumerate() {
            let e = as_uint(e, &format!("{path}.non_isolated[{i}]"))?;
            non_isolated.push(u32::try_from(e).map_err(|_| schema(&format!("{path}.non_isolated[{i}]"), "too large"))?);
        }
    }
    Ok(GroupAction { order, identity_term, fixed_points, non_isolated })
}

impl OrbifoldModel {
    /// Reads a model from a JSON value.
    pub fn from_json(v: &Value) -> Result<Self> {
        let o = as_object(v, "$")?;
        let sectors = as_array(field(o, "$", "sectors")?, "$.sectors")?
            .iter()
            .enumerate()
            .map(|(i, s)| sector(s, &format!("$.sectors[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        let geometric = match o.get("geometric") {
            None => true,
            Some(g) => g.as_bool().ok_or_else(|| schema("$.geometric", "expected a boolean"))?,
        };
        let action = match o.get("action") {
            None | Some(Value::Null) => None,
            Some(a) => Some(action(a, "$.action")?),
        };
        Ok(OrbifoldModel { sectors, geometric, action })
    }

    /// Reads a model from JSON text.
    pub fn from_json_str(s: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(s).map_err(|e| Error::Schema {
            path: "$".into(),
            msg: format!("invalid JSON at line {} column {}: {e}", e.line(), e.column()),
        })?;
        Self::from_json(&v)
    }

    pub fn to_json(&self) -> Value {
        let blocks = |bs: &[BundleBlock]| -> Value {
            bs.iter()
                .map(|b| json!({"mu": b.mu.to_string(), "roots": b.roots.iter().map(|r| r.to_string()).collect::<Vec<_>>()}))
                .collect()
        };
        let sectors: Vec<Value> = self
            .sectors
            .iter()
            .map(|s| {
                let mut integrals = Map::new();
                for (e, c) in s.ring.integrals() {
                    integrals.insert(s.ring.render_monomial(e), Value::String(c.to_string()));
                }
                json!({
                    "name": s.name,
                    "k": s.k,
                    "m": s.m,
                    "top_degree": s.ring.top_degree(),
                    "generators": s.ring.names().iter().zip(s.ring.degrees())
                        .map(|(n, d)| json!({"name": n, "degree": d})).collect::<Vec<_>>(),
                    "integrals": integrals,
                    "tangent_roots": s.tangent_roots.iter().map(|r| r.to_string()).collect::<Vec<_>>(),
                    "normal_blocks": s.normal_blocks.iter()
                        .map(|(l, r)| json!({"lambda": l.to_string(), "root": r.to_string()})).collect::<Vec<_>>(),
                    "omega": s.omega.to_string(),
                    "bundles": {"E": blocks(&s.e), "F": blocks(&s.f)},
                })
            })
            .collect();
        let mut out = json!({"sectors": sectors, "geometric": self.geometric});
        if let Some(a) = &self.action {
            out["action"] = json!({
                "order": a.order,
                "identity_term": a.identity_term.to_string(),
                "fixed_points": a.fixed_points.iter().map(|p| json!({
                    "element": p.element,
                    "tangent": p.tangent.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
                    "mu": p.mu.to_string(),
                })).collect::<Vec<_>>(),
                "non_isolated": a.non_isolated,
            });
        }
        out
    }

    /// Pretty-printed JSON with a trailing newline.
    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("JSON values serialize");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"{"sectors": [{"name": "main", "k": 1, "m": 1, "top_degree": 2,
        "generators": [{"name": "x", "degree": 2}], "integrals": {"x": "1/2"},
        "tangent_roots": ["x"], "normal_blocks": [], "omega": "3*x",
        "bundles": {"E": [{"mu": "1", "roots": ["x/2"]}], "F": []}}]}"#;

    #[test]
    fn round_trip() {
        let m = OrbifoldModel::from_json_str(SAMPLE).unwrap();
        assert_eq!(m.sectors.len(), 1);
        assert!(m.geometric);
        let again = OrbifoldModel::from_json_str(&m.to_json_string()).unwrap();
        assert_eq!(again.to_json(), m.to_json());
    }

    #[test]
    fn schema_errors_name_the_field() {
        let broken = SAMPLE.replace(r#""roots": ["x/2"]"#, r#""roots": ["x/"]"#);
        match OrbifoldModel::from_json_str(&broken) {
            Err(Error::Schema { path, .. }) => assert_eq!(path, "$.sectors[0].bundles.E[0].roots[0]"),
            other => panic!("{other:?}"),
        }
        let missing = SAMPLE.replace(r#""k": 1, "#, "");
        assert!(matches!(OrbifoldModel::from_json_str(&missing), Err(Error::Schema { path, .. }) if path == "$.sectors[0].k"));
        assert!(matches!(OrbifoldModel::from_json_str("[1"), Err(Error::Schema { .. })));
    }

    #[test]
    fn domain_errors() {
        let lam_one = SAMPLE.replace(r#""normal_blocks": []"#, r#""normal_blocks": [{"lambda": "zeta(3)^3", "root": "0"}]"#);
        assert_eq!(OrbifoldModel::from_json_str(&lam_one).unwrap_err(), Error::EigenvalueOne);
        let wrong_k = SAMPLE.replace(r#""k": 1"#, r#""k": 2"#);
        assert!(matches!(OrbifoldModel::from_json_str(&wrong_k), Err(Error::ModelInconsistency(_))));
    }
}
