//! Subcommand implementations. Each returns the command-specific payload
//! fields and whether the run counts as a pass.

use num_rational::Rational64;
use serde_json::{json, Map, Value};

use isoskel::minset::{
    crystal_isomorphism, enumerate_crystals, is_minimal_crystal, kappa_scan, verify_suite, ScanConfig,
    VerifyConfig,
};
use isoskel::padic::{format_rational, parse_rational};
use isoskel::{Error, MinPointParams, MinSet, Result};

use crate::config::RunConfig;
use crate::input::{build_norm, default_decency_degree, Instance};

pub struct Outcome {
    pub fields: Map<String, Value>,
    pub pass: bool,
}

fn ok(value: Value) -> Result<Outcome> {
    match value {
        Value::Object(fields) => Ok(Outcome { fields, pass: true }),
        _ => unreachable!("payloads are objects"),
    }
}

fn to_value<T: serde::Serialize>(x: &T) -> Result<Value> {
    serde_json::to_value(x).map_err(|e| Error::Parse(format!("serialization: {e}")))
}

fn min_set(inst: &Instance, cfg: &RunConfig) -> Result<MinSet> {
    MinSet::with_cap(&inst.isocrystal, cfg.denominator_cap)
}

pub fn slopes(inst: &Instance) -> Result<Outcome> {
    let np = inst.isocrystal.newton_point()?;
    ok(json!({ "slopes": np.to_json(), "definition_degree": inst.isocrystal.definition_degree() }))
}

pub fn decompose(inst: &Instance) -> Result<Outcome> {
    let np = inst.isocrystal.newton_point()?;
    let dec = inst.isocrystal.isocline_decomposition()?;
    let blocks: Vec<Value> = dec
        .blocks
        .iter()
        .map(|b| json!({ "slope": format_rational(b.slope), "start": b.start, "dim": b.dim }))
        .collect();
    ok(json!({
        "slopes": np.to_json(),
        "decomposition": { "basis": dec.basis.to_json(), "blocks": blocks },
    }))
}

pub fn decent(inst: &Instance, s: Option<usize>) -> Result<Outcome> {
    let np = inst.isocrystal.newton_point()?;
    let s = s.unwrap_or_else(|| default_decency_degree(&inst.isocrystal, &np));
    if s == 0 {
        return Err(Error::InvalidParams("s must be at least 1".into()));
    }
    ok(json!({ "s": s, "decent": inst.isocrystal.is_decent(s)? }))
}

pub fn min_check(inst: &Instance, cfg: &RunConfig) -> Result<Outcome> {
    let ms = min_set(inst, cfg)?;
    let norm = inst
        .norm
        .as_ref()
        .ok_or_else(|| Error::InvalidParams("min-check needs a `norm` in the input".into()))?;
    let a = build_norm(&inst.isocrystal, norm, cfg.denominator_cap)?;
    ok(json!({
        "norm": a.to_json(),
        "in_min": ms.is_in_min(&a)?,
        "displacement2": format_rational(ms.displacement(&a)?),
        "min_nu2": format_rational(ms.min_nu()),
    }))
}

fn parse_offsets(list: &[String]) -> Result<Vec<Rational64>> {
    list.iter().map(|s| parse_rational(s.trim())).collect()
}

pub fn min_point(inst: &Instance, cfg: &RunConfig, flag: Option<&str>) -> Result<Outcome> {
    let ms = min_set(inst, cfg)?;
    let blocks = ms.simple_blocks()?.len();
    let params = match (flag, &inst.offsets) {
        (Some(text), _) => {
            let list: Vec<String> = text.split(',').map(str::to_string).collect();
            MinPointParams { offsets: parse_offsets(&list)? }
        }
        (None, Some(list)) => MinPointParams { offsets: parse_offsets(list)? },
        (None, None) => MinPointParams::uniform(Rational64::from_integer(0), blocks),
    };
    let a = ms.min_point(&params)?;
    ok(json!({
        "params": params.to_json(),
        "norm": a.to_json(),
        "in_min": ms.is_in_min(&a)?,
        "displacement2": format_rational(ms.displacement(&a)?),
    }))
}

pub fn scan(inst: &Instance, cfg: &RunConfig) -> Result<Outcome> {
    let ms = min_set(inst, cfg)?;
    let scan_cfg = ScanConfig {
        samples: cfg.samples.unwrap_or(ScanConfig::default().samples),
        seed: cfg.seed,
        ..ScanConfig::default()
    };
    let report = kappa_scan(&ms, &scan_cfg)?;
    let pass = report.pass;
    let mut out = ok(to_value(&report)?)?;
    out.fields.insert("scan_config".into(), to_value(&scan_cfg)?);
    out.pass = pass;
    Ok(out)
}

/// Enumerates crystals in the window and connects every minimal crystal to
/// the first one by an element of J.
pub fn crystals(inst: &Instance, cfg: &RunConfig) -> Result<Outcome> {
    let ms = min_set(inst, cfg)?;
    let list = enumerate_crystals(&ms, cfg.radius)?;
    let mut entries = Vec::with_capacity(list.len());
    let mut minimal = Vec::new();
    for (i, m) in list.iter().enumerate() {
        let is_min = is_minimal_crystal(&ms, m)?;
        if is_min {
            minimal.push(i);
        }
        entries.push(json!({ "index": i, "lattice": m.to_json(), "minimal": is_min }));
    }
    let mut witnesses = Vec::new();
    let mut connected = true;
    if let Some((&root, rest)) = minimal.split_first() {
        for &i in rest {
            let g = crystal_isomorphism(&ms, &list[root], &list[i])?;
            connected &= g.is_some();
            witnesses.push(json!({ "from": root, "to": i, "g": g.map(|g| g.to_json()) }));
        }
    }
    let mut out = ok(json!({
        "radius": cfg.radius,
        "count": list.len(),
        "minimal_count": minimal.len(),
        "crystals": entries,
        "witnesses": witnesses,
        "connected": connected,
    }))?;
    out.pass = connected;
    Ok(out)
}

pub fn verify(inst: &Instance, cfg: &RunConfig) -> Result<Outcome> {
    let suite = cfg
        .suite
        .as_deref()
        .ok_or_else(|| Error::InvalidParams("verify needs --suite".into()))?;
    let ms = min_set(inst, cfg)?;
    let defaults = VerifyConfig::default();
    let vcfg = VerifyConfig {
        seed: cfg.seed,
        samples: cfg.samples.unwrap_or(defaults.samples),
        scan_samples: cfg.samples.unwrap_or(defaults.scan_samples),
        radius: cfg.radius,
        ..defaults
    };
    let report = verify_suite(&ms, suite, &vcfg)?;
    let pass = report.pass;
    let mut out = ok(to_value(&report)?)?;
    out.fields.insert("verify_config".into(), to_value(&vcfg)?);
    out.pass = pass;
    Ok(out)
}
