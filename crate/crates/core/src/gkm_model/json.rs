use serde_json::{json, Map, Value};

use super::{FixedPoint, GKMModel};
use crate::error::{Error, Result};
use crate::exact_algebra::{fmt_q, parse_q, parse_weight, Ring, RingRef, Weight, Q};

fn schema(pointer: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Schema { pointer: pointer.into(), message: message.into() }
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str, at: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| schema(format!("{at}/{key}"), "missing field"))
}

fn string<'a>(v: &'a Value, at: &str) -> Result<&'a str> {
    v.as_str().ok_or_else(|| schema(at, "expected a string"))
}

fn strings(v: &Value, at: &str) -> Result<Vec<String>> {
    let arr = v.as_array().ok_or_else(|| schema(at, "expected an array"))?;
    arr.iter().enumerate().map(|(i, x)| string(x, &format!("{at}/{i}")).map(str::to_string)).collect()
}

fn weight(ring: &RingRef, v: &Value, at: &str) -> Result<Weight> {
    let s = string(v, at)?;
    parse_weight(ring, s).map_err(|e| schema(at, e.to_string()))
}

fn weights(ring: &RingRef, v: &Value, at: &str) -> Result<Vec<Weight>> {
    let arr = v.as_array().ok_or_else(|| schema(at, "expected an array"))?;
    arr.iter().enumerate().map(|(i, x)| weight(ring, x, &format!("{at}/{i}"))).collect()
}

impl GKMModel {
    pub fn from_json_str(src: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(src).map_err(|e| Error::Parse(format!("invalid JSON: {e}")))?;
        Self::from_json(&v)
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let obj = v.as_object().ok_or_else(|| schema("", "expected an object"))?;
        if let Some(s) = obj.get("schema") {
            if s.as_i64() != Some(1) {
                return Err(schema("/schema", "unsupported schema version"));
            }
        }
        let torus = strings(field(obj, "torus", "")?, "/torus")?;
        let a = strings(field(obj, "A", "")?, "/A")?;
        if a.is_empty() {
            return Err(schema("/A", "A must contain at least one coordinate"));
        }
        let ring = Ring::from_strings(torus, a).map_err(|e| schema("/torus", e.to_string()))?;
        let fps = field(obj, "fixed_points", "")?.as_array().ok_or_else(|| schema("/fixed_points", "expected an array"))?;
        let mut points = Vec::new();
        let mut slope: Option<Q> = None;
        for (k, fp) in fps.iter().enumerate() {
            let at = format!("/fixed_points/{k}");
            let o = fp.as_object().ok_or_else(|| schema(&at, "expected an object"))?;
            let name = string(field(o, "name", &at)?, &format!("{at}/name"))?.to_string();
            if name.is_empty() {
                return Err(schema(format!("{at}/name"), "empty name"));
            }
            let tangent = weights(&ring, field(o, "tangent", &at)?, &format!("{at}/tangent"))?;
            let polarization = match o.get("polarization") {
                Some(p) => Some(weights(&ring, p, &format!("{at}/polarization"))?),
                None => None,
            };
            let ample = weight(&ring, field(o, "ample", &at)?, &format!("{at}/ample"))?;
            if let Some(sv) = o.get("slope_coeff") {
                let sp = format!("{at}/slope_coeff");
                let s = parse_q(string(sv, &sp)?).map_err(|e| schema(&sp, e.to_string()))?;
                match slope {
                    Some(prev) if prev != s => {
                        return Err(schema(sp, "slope_coeff must agree across fixed points"));
                    }
                    _ => slope = Some(s),
                }
            }
            points.push(FixedPoint { name, tangent, polarization, ample });
        }
        let names: Vec<String> = points.iter().map(|p| p.name.clone()).collect();
        let mut edges = Vec::new();
        if let Some(es) = obj.get("edges") {
            let arr = es.as_array().ok_or_else(|| schema("/edges", "expected an array"))?;
            for (k, e) in arr.iter().enumerate() {
                let at = format!("/edges/{k}");
                let t = e.as_array().filter(|t| t.len() == 3).ok_or_else(|| schema(&at, "expected [point, point, weight]"))?;
                let mut ends = [0usize; 2];
                for (slot, x) in ends.iter_mut().zip(t) {
                    let nm = string(x, &at)?;
                    *slot = names
                        .iter()
                        .position(|n| n == nm)
                        .ok_or_else(|| schema(&at, format!("unknown fixed point '{nm}'")))?;
                }
                edges.push((ends[0], ends[1], weight(&ring, &t[2], &format!("{at}/2"))?));
            }
        }
        GKMModel::new(ring, points, &edges, slope)
    }

    pub fn to_json(&self) -> Value {
        let r = &self.ring;
        let fmt = |w: &Weight| Value::String(r.fmt_monomial(w));
        let points: Vec<Value> = self
            .points
            .iter()
            .map(|p| {
                let mut o = Map::new();
                o.insert("name".into(), json!(p.name));
                o.insert("tangent".into(), Value::Array(p.tangent.iter().map(fmt).collect()));
                if let Some(pol) = &p.polarization {
                    o.insert("polarization".into(), Value::Array(pol.iter().map(fmt).collect()));
                }
                o.insert("ample".into(), fmt(&p.ample));
                if let Some(s) = self.slope {
                    o.insert("slope_coeff".into(), json!(fmt_q(&s)));
                }
                Value::Object(o)
            })
            .collect();
        let edges: Vec<Value> = self
            .edges
            .iter()
            .map(|e| json!([self.points[e.a].name, self.points[e.b].name, r.fmt_monomial(&e.weight)]))
            .collect();
        let a: Vec<&String> = r.a_indices().iter().map(|&i| &r.names()[i]).collect();
        json!({
            "schema": 1,
            "torus": r.names(),
            "A": a,
            "fixed_points": points,
            "edges": edges,
        })
    }
}
