//! Document parsing and serialization.
//!
//! Parsing walks the JSON value tree by hand so every violation — shape,
//! type, or semantic — is reported with a path into the document. Unknown
//! fields are rejected everywhere.

use serde_json::{Map, Value};

use crate::admissibility::{NestingPair, NestingRelation, NestingTag};
use crate::model::{
    Arrangement, Assignment, ChildSlot, Pattern, PatternEdge, PatternSystem, RootEdge, RootSpec,
    StageRule,
};
use crate::{Error, Result};

/// Parses and fully validates a pattern-system document.
pub fn parse_system(text: &str) -> Result<PatternSystem> {
    let value: Value = serde_json::from_str(text)?;
    let ps = decode_system(&value)?;
    ps.validate()?;
    Ok(ps)
}

/// Canonical pretty-printed document form (deterministic key order).
pub fn system_to_json(ps: &PatternSystem) -> String {
    let mut text = serde_json::to_string_pretty(ps).expect("document model serializes");
    text.push('\n');
    text
}

/// Parses a nesting-relation document `{"stage": m, "pairs": [[c, d, tag]]}`.
pub fn parse_relation(text: &str) -> Result<NestingRelation> {
    let value: Value = serde_json::from_str(text)?;
    let obj = as_object(&value, "/")?;
    check_keys(obj, &["stage", "pairs"], "/")?;
    let stage = as_u32(get(obj, "stage", "/")?, "/stage")?;
    let pairs_v = as_array(get(obj, "pairs", "/")?, "/pairs")?;
    let mut pairs = Vec::new();
    for (i, pv) in pairs_v.iter().enumerate() {
        let path = format!("/pairs/{i}");
        let arr = as_array(pv, &path)?;
        if arr.len() != 3 {
            return Err(schema_err(&path, format!("expected [c, d, tag], found {} items", arr.len())));
        }
        let c = as_str(&arr[0], &format!("{path}/0"))?.to_string();
        let d = as_str(&arr[1], &format!("{path}/1"))?.to_string();
        let tag = match as_str(&arr[2], &format!("{path}/2"))? {
            "c_in_d" => NestingTag::CInsideD,
            "d_in_c" => NestingTag::DInsideC,
            other => {
                return Err(schema_err(
                    &format!("{path}/2"),
                    format!("expected \"c_in_d\" or \"d_in_c\", found {other:?}"),
                ))
            }
        };
        pairs.push(NestingPair { c, d, tag });
    }
    Ok(NestingRelation { stage, pairs })
}

// ---------------------------------------------------------------------------
// Decoders
// ---------------------------------------------------------------------------

fn decode_system(v: &Value) -> Result<PatternSystem> {
    let obj = as_object(v, "/")?;
    check_keys(obj, &["roots", "root_edges", "patterns", "assignment"], "/")?;

    let mut roots = Vec::new();
    for (i, rv) in as_array(get(obj, "roots", "/")?, "/roots")?.iter().enumerate() {
        let path = format!("/roots/{i}");
        let robj = as_object(rv, &path)?;
        check_keys(robj, &["id", "knot", "spine"], &path)?;
        roots.push(RootSpec {
            id: as_str(get(robj, "id", &path)?, &format!("{path}/id"))?.to_string(),
            knot: as_str(get(robj, "knot", &path)?, &format!("{path}/knot"))?.to_string(),
            spine: as_bool(get(robj, "spine", &path)?, &format!("{path}/spine"))?,
        });
    }

    let mut root_edges = Vec::new();
    for (i, ev) in as_array(get(obj, "root_edges", "/")?, "/root_edges")?.iter().enumerate() {
        let path = format!("/root_edges/{i}");
        let arr = edge_quad(ev, &path)?;
        root_edges.push(RootEdge {
            a: as_str(&arr[0], &format!("{path}/0"))?.to_string(),
            b: as_str(&arr[1], &format!("{path}/1"))?.to_string(),
            lk: as_i64(&arr[2], &format!("{path}/2"))?,
            split: as_bool(&arr[3], &format!("{path}/3"))?,
        });
    }

    let mut patterns = std::collections::BTreeMap::new();
    for (name, pv) in as_object(get(obj, "patterns", "/")?, "/patterns")? {
        let path = format!("/patterns/{name}");
        patterns.insert(name.clone(), decode_pattern(pv, &path)?);
    }

    let a_path = "/assignment";
    let aobj = as_object(get(obj, "assignment", "/")?, a_path)?;
    check_keys(aobj, &["preperiod", "period"], a_path)?;
    let decode_rules = |key: &str| -> Result<Vec<StageRule>> {
        let list_path = format!("{a_path}/{key}");
        as_array(get(aobj, key, a_path)?, &list_path)?
            .iter()
            .enumerate()
            .map(|(i, rv)| {
                let path = format!("{list_path}/{i}");
                let robj = as_object(rv, &path)?;
                check_keys(robj, &["spine", "other"], &path)?;
                Ok(StageRule {
                    spine: as_str(get(robj, "spine", &path)?, &format!("{path}/spine"))?
                        .to_string(),
                    other: as_str(get(robj, "other", &path)?, &format!("{path}/other"))?
                        .to_string(),
                })
            })
            .collect()
    };
    let assignment =
        Assignment { preperiod: decode_rules("preperiod")?, period: decode_rules("period")? };

    Ok(PatternSystem { roots, root_edges, patterns, assignment })
}

fn decode_pattern(v: &Value, path: &str) -> Result<Pattern> {
    let obj = as_object(v, path)?;
    check_keys(obj, &["children", "edges", "arrangement", "spine_child"], path)?;

    let mut children = Vec::new();
    for (i, cv) in as_array(get(obj, "children", path)?, &format!("{path}/children"))?
        .iter()
        .enumerate()
    {
        let cpath = format!("{path}/children/{i}");
        let cobj = as_object(cv, &cpath)?;
        check_keys(cobj, &["winding", "knot"], &cpath)?;
        children.push(ChildSlot {
            winding: as_i64(get(cobj, "winding", &cpath)?, &format!("{cpath}/winding"))?,
            knot: as_str(get(cobj, "knot", &cpath)?, &format!("{cpath}/knot"))?.to_string(),
        });
    }

    let mut edges = Vec::new();
    for (i, ev) in
        as_array(get(obj, "edges", path)?, &format!("{path}/edges"))?.iter().enumerate()
    {
        let epath = format!("{path}/edges/{i}");
        let arr = edge_quad(ev, &epath)?;
        edges.push(PatternEdge {
            i: as_usize(&arr[0], &format!("{epath}/0"))?,
            j: as_usize(&arr[1], &format!("{epath}/1"))?,
            lk: as_i64(&arr[2], &format!("{epath}/2"))?,
            split: as_bool(&arr[3], &format!("{epath}/3"))?,
        });
    }

    let arr_path = format!("{path}/arrangement");
    let arrangement = match as_str(get(obj, "arrangement", path)?, &arr_path)? {
        "chain" => Arrangement::Chain,
        "custom" => Arrangement::Custom,
        other => {
            return Err(schema_err(
                &arr_path,
                format!("expected \"chain\" or \"custom\", found {other:?}"),
            ))
        }
    };

    let sc_path = format!("{path}/spine_child");
    let spine_child = match get(obj, "spine_child", path)? {
        Value::Null => None,
        v => Some(as_usize(v, &sc_path)?),
    };

    Ok(Pattern { children, edges, arrangement, spine_child })
}

// ---------------------------------------------------------------------------
// Value-walking helpers
// ---------------------------------------------------------------------------

fn schema_err(path: &str, message: String) -> Error {
    Error::Schema { path: path.to_string(), message }
}

fn type_name(v: &Value) -> &'static str {
    match v {
        Value::Null => "null",
        Value::Bool(_) => "boolean",
        Value::Number(_) => "number",
        Value::String(_) => "string",
        Value::Array(_) => "array",
        Value::Object(_) => "object",
    }
}

fn as_object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| schema_err(path, format!("expected object, found {}", type_name(v))))
}

fn as_array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| schema_err(path, format!("expected array, found {}", type_name(v))))
}

fn as_str<'a>(v: &'a Value, path: &str) -> Result<&'a str> {
    v.as_str().ok_or_else(|| schema_err(path, format!("expected string, found {}", type_name(v))))
}

fn as_bool(v: &Value, path: &str) -> Result<bool> {
    v.as_bool().ok_or_else(|| schema_err(path, format!("expected boolean, found {}", type_name(v))))
}

fn as_i64(v: &Value, path: &str) -> Result<i64> {
    v.as_i64().ok_or_else(|| schema_err(path, format!("expected integer, found {}", type_name(v))))
}

fn as_usize(v: &Value, path: &str) -> Result<usize> {
    let n = v.as_u64().ok_or_else(|| {
        schema_err(path, format!("expected non-negative integer, found {}", type_name(v)))
    })?;
    usize::try_from(n).map_err(|_| schema_err(path, format!("index {n} too large")))
}

fn as_u32(v: &Value, path: &str) -> Result<u32> {
    let n = v.as_u64().ok_or_else(|| {
        schema_err(path, format!("expected non-negative integer, found {}", type_name(v)))
    })?;
    u32::try_from(n).map_err(|_| schema_err(path, format!("value {n} too large")))
}

fn get<'a>(obj: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| schema_err(path, format!("missing field {key:?}")))
}

fn check_keys(obj: &Map<String, Value>, allowed: &[&str], path: &str) -> Result<()> {
    for key in obj.keys() {
        if !allowed.contains(&key.as_str()) {
            return Err(schema_err(path, format!("unknown field {key:?}")));
        }
    }
    Ok(())
}

fn edge_quad<'a>(v: &'a Value, path: &str) -> Result<&'a [Value]> {
    let arr = as_array(v, path)?;
    if arr.len() != 4 {
        return Err(schema_err(path, format!("expected 4 items, found {}", arr.len())));
    }
    Ok(arr)
}

// ---------------------------------------------------------------------------
