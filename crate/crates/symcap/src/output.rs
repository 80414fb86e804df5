//! Machine-readable renderings. Every number is an exact rational string, an
//! integer, or an explicit `{expr, lo, hi}` enclosure; nothing is printed as
//! a decimal.

use serde_json::{json, Value};

use symcap_core::cremona::ClassVector;
use symcap_core::ech::{EchDecision, StabilityResult};
use symcap_core::ellipsoid::ScanRow;
use symcap_core::numeric::{Rat, Real};
use symcap_core::packing::{CapacityResult, Witness};
use symcap_core::weights::WeightExpansion;

/// Bisection depth of the enclosures written for irrational values.
pub const ENCLOSURE_DEPTH: u32 = 64;

pub fn rat(r: &Rat) -> Value {
    Value::String(r.to_string())
}

pub fn real(x: &Real) -> Value {
    match x {
        Real::Exact(r) => rat(r),
        Real::Bounded(b) => {
            let (lo, hi) = x.enclosure(ENCLOSURE_DEPTH.max(b.depth()));
            json!({ "expr": b.expr().to_string(), "lo": lo.to_string(), "hi": hi.to_string() })
        }
    }
}

pub fn class(c: &ClassVector) -> Value {
    json!({ "d": c.degree(), "m": c.multiplicities() })
}

pub fn witness(w: &Witness) -> Value {
    match w {
        Witness::VolumeBound => Value::String("volume".to_string()),
        Witness::Class(c) => class(c),
    }
}

pub fn capacity(c: &CapacityResult) -> Value {
    json!({
        "value": real(&c.value),
        "value_squared": rat(&c.value_squared),
        "certified": c.certified(),
        "certificate": c.certificate.map(|x| x.to_string()),
        "witness": witness(&c.witness),
        "d_max_used": c.d_max_used,
    })
}

pub fn weights(w: &WeightExpansion) -> Value {
    let blocks: Vec<Value> =
        w.blocks().iter().map(|b| json!({ "value": rat(&b.value), "mult": b.multiplicity })).collect();
    json!({
        "a": rat(w.source()),
        "blocks": blocks,
        "flat": w.flat().iter().map(rat).collect::<Vec<_>>(),
        "multiplicities": w.multiplicities(),
    })
}

pub fn scan_row(row: &ScanRow) -> Value {
    json!({
        "a": rat(&row.a),
        "c": real(&row.capacity.value),
        "certified": row.capacity.certified(),
        "certificate": row.capacity.certificate.map(|x| x.to_string()),
        "witness": witness(&row.capacity.witness),
        "oracle": row.oracle.as_ref().map(rat),
    })
}

pub fn ech_decision(d: &EchDecision) -> Value {
    match d {
        EchDecision::Embeds { certified_up_to, separation_index, fully_certified } => json!({
            "verdict": "embeds",
            "certified_up_to": certified_up_to,
            "separation_index": separation_index,
            "fully_certified": fully_certified,
        }),
        EchDecision::Obstructed(k) => json!({ "verdict": "obstructed", "first_failure": k }),
        EchDecision::Undecided(k) => json!({ "verdict": "undecided", "index": k }),
    }
}

pub fn stability(s: &StabilityResult) -> Value {
    match s {
        StabilityResult::Holds { certified_up_to } => json!({
            "verdict": "holds",
            "certified_up_to": certified_up_to,
            "implies": "disjoint union of k unit 6-balls embeds into B^6(k^(1/3))",
        }),
        StabilityResult::FailsAt { step, index } => {
            json!({ "verdict": "fails", "step": step, "first_failure": index })
        }
        StabilityResult::Undecided { step, index } => json!({ "verdict": "undecided", "step": step, "index": index }),
    }
}

/// One-line text form of a capacity: value, certification and witness.
pub fn capacity_text(c: &CapacityResult) -> String {
    let value = match &c.value {
        Real::Exact(r) => r.to_string(),
        Real::Bounded(b) => {
            let (lo, hi) = c.value.enclosure(ENCLOSURE_DEPTH.max(b.depth()));
            format!("{} in [{}, {}]", b.expr(), lo, hi)
        }
    };
    let status = match c.certificate {
        Some(_) => "certified".to_string(),
        None => format!("uncertified (searched d <= {})", c.d_max_used),
    };
    format!("{} {} witness={}", value, status, c.witness)
}

/// CSV header of staircase rows.
pub const SCAN_COLUMNS: [&str; 10] =
    ["a", "c_num", "c_den", "c_expr", "c_lo", "c_hi", "certified", "witness_d", "witness_m", "oracle"];

/// A staircase row as CSV fields: exact values fill `c_num`/`c_den`, irrational
/// ones fill `c_expr`/`c_lo`/`c_hi`.
pub fn scan_record(row: &ScanRow) -> Vec<String> {
    let c = &row.capacity;
    let (num, den, expr, lo, hi) = match &c.value {
        Real::Exact(r) => (r.numer().to_string(), r.denom().to_string(), String::new(), String::new(), String::new()),
        Real::Bounded(b) => {
            let (lo, hi) = c.value.enclosure(ENCLOSURE_DEPTH.max(b.depth()));
            (String::new(), String::new(), b.expr().to_string(), lo.to_string(), hi.to_string())
        }
    };
    let (wd, wm) = match &c.witness {
        Witness::VolumeBound => (String::new(), String::new()),
        Witness::Class(v) => (
            v.degree().to_string(),
            v.multiplicities().iter().map(i64::to_string).collect::<Vec<_>>().join(" "),
        ),
    };
    vec![
        row.a.to_string(),
        num,
        den,
        expr,
        lo,
        hi,
        c.certified().to_string(),
        wd,
        wm,
        row.oracle.as_ref().map(Rat::to_string).unwrap_or_default(),
    ]
}
