// SPDX-License-Identifier: Apache-2.0

//! JSON has no infinities; non-finite reals serialize as the strings
//! `"inf"`, `"-inf"` and `"nan"`.

use serde::Serializer;

pub(crate) fn f64_marked<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_str(marker(*v))
    }
}

pub(crate) fn opt_f64_marked<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(x) => f64_marked(x, s),
        None => s.serialize_none(),
    }
}

pub(crate) fn marker(v: f64) -> &'static str {
    if v.is_nan() {
        "nan"
    } else if v > 0.0 {
        "inf"
    } else {
        "-inf"
    }
}

/// CSV/plain-text rendering; finite values round-trip.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:e}")
    } else {
        marker(v).to_string()
    }
}
