//! Verification suites: convexity and powers, the Min set of `F_b` and its
//! symmetries, the displacement bound, and minimal crystals.

use std::collections::{BTreeMap, HashSet};

use num_integer::Integer;
use num_rational::Rational64;
use rand::Rng;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use super::crystal::window_radius;
use super::{
    crystal_isomorphism, enumerate_crystals, is_crystal, is_minimal_crystal, kappa_scan, JFamily, MinPointParams,
    MinSet, ScanConfig, SCHEMA_VERSION,
};
use crate::building::{geodesic_point, CrystalLattice, Norm, METRIC_CONVENTION};
use crate::error::{Error, Result};
use crate::isocrystal::Isocrystal;
use crate::padic::element::format_rational;
use crate::sampling::{random_exponents, random_unimodular, stream};

pub const SUITES: [&str; 4] = ["prop1", "thm2", "bound37", "remark6"];

/// Stream indices are offset per check so checks draw independent samples.
const STREAM_STRIDE: u64 = 1 << 32;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Samples per check.
    pub samples: usize,
    pub scan_samples: usize,
    pub radius: u32,
    /// Number of random sigma-conjugations for the transport check.
    pub conjugations: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { seed: 0, samples: 50, scan_samples: 200, radius: 1, conjugations: 3 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum CheckStatus {
    Pass,
    Fail,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub status: CheckStatus,
    pub detail: String,
    pub witness: Option<Value>,
}

impl Check {
    fn new(name: &str, failure: Option<Value>, detail: String) -> Self {
        Check {
            name: name.to_string(),
            status: if failure.is_none() { CheckStatus::Pass } else { CheckStatus::Fail },
            detail,
            witness: failure,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub suite: String,
    pub instance: String,
    pub instance_hash: String,
    pub seed: u64,
    pub metric_convention: &'static str,
    pub checks: Vec<Check>,
    pub pass: bool,
}

/// SHA-256 of the serialized isocrystal.
pub fn instance_hash(ic: &Isocrystal) -> String {
    let bytes = serde_json::to_vec(&ic.to_json()).unwrap_or_default();
    hex::encode(Sha256::digest(&bytes))
}

fn describe(ms: &MinSet) -> String {
    let ctx = ms.context();
    format!(
        "n={} p={} m={} N={} slopes={}",
        ms.isocrystal().dimension(),
        ctx.p(),
        ctx.degree(),
        ctx.precision(),
        ms.newton_point()
    )
}

pub fn verify_suite(ms: &MinSet, suite: &str, cfg: &VerifyConfig) -> Result<VerificationReport> {
    let checks = match suite {
        "prop1" => prop1(ms, cfg)?,
        "thm2" => thm2(ms, cfg)?,
        "bound37" => bound37(ms, cfg)?,
        "remark6" => remark6(ms, cfg)?,
        other => return Err(Error::UnknownSuite(other.to_string())),
    };
    let pass = checks.iter().all(|c| c.status == CheckStatus::Pass);
    Ok(VerificationReport {
        schema_version: SCHEMA_VERSION,
        suite: suite.to_string(),
        instance: describe(ms),
        instance_hash: instance_hash(ms.isocrystal()),
        seed: cfg.seed,
        metric_convention: METRIC_CONVENTION,
        checks,
        pass,
    })
}

/// Random Min-point parameters with denominators dividing `2 lcm(h)`.
pub(crate) fn random_params<R: Rng>(ms: &MinSet, rng: &mut R) -> Result<MinPointParams> {
    let k = ms.simple_blocks()?.len();
    let den = ms.newton_point().denominator_lcm();
    Ok(MinPointParams { offsets: random_exponents(k, 2, den, rng) })
}

/// A Min point moved by a random element of `J`.
fn random_min_point<R: Rng>(ms: &MinSet, rng: &mut R) -> Result<Norm> {
    let a = ms.min_point(&random_params(ms, rng)?)?;
    a.group_act(&ms.sample_j_element(JFamily::Mixed, rng)?)
}

fn norm_witness(a: &Norm) -> Value {
    serde_json::to_value(a.to_json()).unwrap_or(Value::Null)
}

fn lattice_witness(m: &CrystalLattice) -> Value {
    serde_json::to_value(m.to_json()).unwrap_or(Value::Null)
}

fn power_exponents(ms: &MinSet) -> Vec<usize> {
    let l = ms.newton_point().denominator_lcm() as usize;
    let mut out = vec![2, l.lcm(&ms.isocrystal().definition_degree())];
    out.sort_unstable();
    out.dedup();
    out
}

fn prop1(ms: &MinSet, cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let mut convex_fail = None;
    for i in 0..cfg.samples as u64 {
        let mut rng = stream(cfg.seed, i);
        let a = random_min_point(ms, &mut rng)?;
        let b = random_min_point(ms, &mut rng)?;
        let mid = geodesic_point(&a, &b, Rational64::new(1, 2))?;
        if !ms.is_in_min(&mid)? {
            convex_fail = Some(json!({ "alpha": norm_witness(&a), "beta": norm_witness(&b) }));
            break;
        }
    }
    let mut checks = vec![Check::new(
        "midpoints_in_min",
        convex_fail,
        format!("{} midpoints of Min-point pairs", cfg.samples),
    )];
    let min_nu = ms.min_nu();
    for s in power_exponents(ms) {
        let s2 = Rational64::from_integer((s * s) as i64);
        let (mut member_fail, mut disp_fail) = (None, None);
        for i in 0..cfg.samples as u64 {
            let mut rng = stream(cfg.seed, STREAM_STRIDE * s as u64 + i);
            let a = random_min_point(ms, &mut rng)?;
            if member_fail.is_none() && !ms.is_in_min_power(&a, s)? {
                member_fail = Some(norm_witness(&a));
            }
            let d = ms.displacement_power(&a, s)?;
            if disp_fail.is_none() && d != s2 * min_nu {
                disp_fail = Some(json!({ "alpha": norm_witness(&a), "displacement2": format_rational(d) }));
            }
        }
        checks.push(Check::new(
            &format!("min_in_min_of_power_{s}"),
            member_fail,
            format!("Min points lie in Min(F^{s})"),
        ));
        checks.push(Check::new(
            &format!("power_{s}_displacement"),
            disp_fail,
            format!("d(x, F^{s} x)^2 = {s}^2 * {}", format_rational(min_nu)),
        ));
    }
    Ok(checks)
}

fn thm2(ms: &MinSet, cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let ctx = ms.context();
    let n = ms.isocrystal().dimension();
    let min_nu = ms.min_nu();
    let t = ms.frame()?.transporter.clone();
    let mut checks = Vec::new();

    let mut lower_fail = None;
    for i in 0..cfg.samples as u64 {
        let mut rng = stream(cfg.seed, i);
        let u = random_unimodular(ctx, n, ctx.degree(), &mut rng)?;
        let c = random_exponents(n, 2, 2, &mut rng);
        let a = Norm::with_cap(t.mul(&u)?, c, ms.denominator_cap())?;
        let d = ms.displacement(&a)?;
        if d < min_nu {
            lower_fail = Some(json!({ "alpha": norm_witness(&a), "displacement2": format_rational(d) }));
            break;
        }
    }
    checks.push(Check::new(
        "displacement_lower_bound",
        lower_fail,
        format!("d(x, F x)^2 >= {} on {} sampled norms", format_rational(min_nu), cfg.samples),
    ));

    let mut eq_fail = None;
    for i in 0..cfg.samples as u64 {
        let mut rng = stream(cfg.seed, STREAM_STRIDE + i);
        let a = ms.min_point(&random_params(ms, &mut rng)?)?;
        let d = ms.displacement(&a)?;
        if d != min_nu || !ms.is_in_min(&a)? {
            eq_fail = Some(json!({ "alpha": norm_witness(&a), "displacement2": format_rational(d) }));
            break;
        }
    }
    checks.push(Check::new("equality_at_min_points", eq_fail, "min_point outputs attain min_nu".into()));

    let mut j_fail = None;
    let mut verified = 0usize;
    for (f, fam) in JFamily::ALL.iter().enumerate() {
        for i in 0..cfg.samples as u64 {
            let mut rng = stream(cfg.seed, STREAM_STRIDE * (2 + f as u64) + i);
            let g = match ms.sample_j_element(*fam, &mut rng) {
                Ok(g) => g,
                Err(Error::InvalidParams(_)) => break,
                Err(e) => return Err(e),
            };
            verified += 1;
            let a = ms.min_point(&random_params(ms, &mut rng)?)?;
            let moved = a.group_act(&g)?;
            if j_fail.is_none() && !ms.is_in_min(&moved)? {
                j_fail = Some(json!({ "family": fam, "alpha": norm_witness(&a), "g": g.to_json() }));
            }
        }
    }
    checks.push(Check::new("j_preserves_min", j_fail, format!("{verified} verified elements of J")));

    let mut transport_fail = None;
    for k in 0..cfg.conjugations as u64 {
        let mut rng = stream(cfg.seed, STREAM_STRIDE * 16 + k);
        let g = random_unimodular(ctx, n, ctx.degree(), &mut rng)?;
        let moved = MinSet::with_cap(&ms.isocrystal().sigma_conjugate(&g)?, ms.denominator_cap())?;
        for _ in 0..cfg.samples.div_ceil(cfg.conjugations.max(1)) {
            let a = random_min_point(ms, &mut rng)?;
            if !moved.is_in_min(&a.group_act(&g)?)? {
                transport_fail = Some(json!({ "g": g.to_json(), "alpha": norm_witness(&a) }));
                break;
            }
        }
        if transport_fail.is_some() {
            break;
        }
    }
    checks.push(Check::new(
        "conjugation_transports_min",
        transport_fail,
        format!("g Min(F_b) inside Min(F_b') for {} conjugations", cfg.conjugations),
    ));
    Ok(checks)
}

fn bound37(ms: &MinSet, cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let scan = ScanConfig { samples: cfg.scan_samples, seed: cfg.seed, ..ScanConfig::default() };
    let report = kappa_scan(ms, &scan)?;
    let summary = json!({
        "kappa_hat2": report.kappa_hat2,
        "kappa_hat2_doubled": report.kappa_hat2_doubled,
        "min_displacement2": report.min_displacement2,
        "min_nu2": report.min_nu2,
    });
    let bound_fail = (!report.all_bounds_hold)
        .then(|| json!(report.records.iter().filter(|r| !r.bound_holds).take(3).collect::<Vec<_>>()));
    Ok(vec![
        Check::new("displacement_lower_bound", bound_fail, format!("{} samples", report.samples)),
        Check::new(
            "kappa_positive_and_stable",
            (!report.pass).then(|| summary.clone()),
            format!("{}; kappa_hat2 = {}", report.note, report.kappa_hat2.clone().unwrap_or_else(|| "none".into())),
        ),
    ])
}

/// Balls `{alpha <= 1}` of Min points of the frame apartment inside the
/// window, closed under the search generators of `J`.
pub(crate) fn min_balls(ms: &MinSet, radius: u32) -> Result<Vec<CrystalLattice>> {
    let blocks = ms.simple_blocks()?;
    let limit = radius as i64 + 1;
    let grids: Vec<Vec<Rational64>> = blocks
        .iter()
        .map(|b| {
            let h = b.size as i64;
            (-limit * h..=limit * h).map(|j| Rational64::new(j, h)).collect()
        })
        .collect();
    let combos: usize = grids.iter().map(Vec::len).product();
    if combos > 100_000 {
        return Err(Error::ScaleTooLarge(format!("{combos} Min-point offsets")));
    }
    let mut found: BTreeMap<String, CrystalLattice> = BTreeMap::new();
    let mut idx = vec![0usize; grids.len()];
    loop {
        let offsets = idx.iter().zip(&grids).map(|(&i, g)| g[i]).collect();
        let ball = ms.min_point(&MinPointParams { offsets })?.ball_lattice(Rational64::from_integer(0))?;
        if window_radius(&ball)? <= radius as i64 {
            found.entry(ball.key()?).or_insert(ball);
        }
        let mut k = grids.len();
        loop {
            if k == 0 {
                break;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < grids[k].len() {
                break;
            }
            idx[k] = 0;
        }
        if idx.iter().all(|&i| i == 0) {
            break;
        }
    }
    let gens = ms.j_generators()?;
    let mut frontier: Vec<CrystalLattice> = found.values().cloned().collect();
    while let Some(m) = frontier.pop() {
        for g in &gens {
            let next = m.transform(g)?;
            if window_radius(&next)? > radius as i64 {
                continue;
            }
            let key = next.key()?;
            if let std::collections::btree_map::Entry::Vacant(e) = found.entry(key) {
                e.insert(next.clone());
                frontier.push(next);
            }
        }
    }
    Ok(found.into_values().collect())
}

fn remark6(ms: &MinSet, cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let crystals = enumerate_crystals(ms, cfg.radius)?;
    let in_range = ms.newton_point().parts().iter().all(|&(s, _)| s >= Rational64::from_integer(0) && s <= Rational64::from_integer(1));
    if !in_range {
        return Ok(vec![Check::new(
            "no_crystals_outside_slope_range",
            (!crystals.is_empty()).then(|| lattice_witness(&crystals[0])),
            "slopes outside [0, 1]".into(),
        )]);
    }
    let balls = min_balls(ms, cfg.radius)?;
    let crystal_keys: HashSet<String> = crystals.iter().map(|m| m.key()).collect::<Result<_>>()?;
    let ball_keys: HashSet<String> = balls.iter().map(|m| m.key()).collect::<Result<_>>()?;

    let mut not_crystal = None;
    for m in &balls {
        if !is_crystal(ms, m)?.crystal {
            not_crystal = Some(lattice_witness(m));
            break;
        }
    }
    let missing = balls.iter().find(|m| m.key().map(|k| !crystal_keys.contains(&k)).unwrap_or(true));
    let mut minimal = Vec::new();
    for m in &crystals {
        if is_minimal_crystal(ms, m)? {
            minimal.push(m.clone());
        }
    }
    let stray = minimal.iter().find(|m| m.key().map(|k| !ball_keys.contains(&k)).unwrap_or(true));

    let mut connect_fail = None;
    for m in minimal.iter().skip(1) {
        let ok = match crystal_isomorphism(ms, &minimal[0], m)? {
            Some(g) => ms.is_in_j(&g)? && minimal[0].transform(&g)?.same_as(m)?,
            None => false,
        };
        if !ok {
            connect_fail = Some(json!({ "from": lattice_witness(&minimal[0]), "to": lattice_witness(m) }));
            break;
        }
    }
    Ok(vec![
        Check::new("balls_are_crystals", not_crystal, format!("{} balls of Min points", balls.len())),
        Check::new(
            "balls_enumerated",
            missing.map(lattice_witness),
            format!("{} crystals in the radius-{} window", crystals.len(), cfg.radius),
        ),
        Check::new(
            "minimal_crystals_are_balls",
            stray.map(lattice_witness),
            format!("{} minimal crystals", minimal.len()),
        ),
        Check::new("minimal_crystals_connected", connect_fail, "witnesses g in J with g M1 = M2".into()),
    ])
}
