//! Command-line value parsers.

use symcap_core::numeric::{Rat, Real};

/// `p/q`, an integer or a terminating decimal.
pub fn rational(s: &str) -> Result<Rat, String> {
    s.parse::<Rat>().map_err(|e| e.to_string())
}

/// A rational, `sqrt(x)` or `cbrt(x)` for a rational `x`.
pub fn real(s: &str) -> Result<Real, String> {
    let t = s.trim();
    type Root = fn(&Rat) -> Result<Real, symcap_core::numeric::NumericError>;
    for (name, root) in [("sqrt", Real::sqrt as Root), ("cbrt", Real::cbrt as Root)] {
        if let Some(inner) = t.strip_prefix(name).and_then(|r| r.trim_start().strip_prefix('(')) {
            let inner = inner.strip_suffix(')').ok_or_else(|| format!("missing ')' in {:?}", s))?;
            return root(&rational(inner)?).map_err(|e| e.to_string());
        }
    }
    rational(t).map(Real::Exact)
}

/// Comma-separated rationals; `x^n` repeats `x` n times, so `1^8` is eight
/// ones.
pub fn rational_list(s: &str) -> Result<Vec<Rat>, String> {
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        match item.split_once('^') {
            Some((value, count)) => {
                let value = rational(value)?;
                let count: usize = count.trim().parse().map_err(|_| format!("bad repeat count in {:?}", item))?;
                out.extend(std::iter::repeat(value).take(count));
            }
            None => out.push(rational(item)?),
        }
    }
    if out.is_empty() {
        return Err("empty list".to_string());
    }
    Ok(out)
}

/// Exactly two comma-separated reals, e.g. `1,4` or `cbrt(21),cbrt(441)`.
pub fn real_pair(s: &str) -> Result<(Real, Real), String> {
    let parts: Vec<&str> = s.split(',').collect();
    match parts.as_slice() {
        [a, b] => Ok((real(a)?, real(b)?)),
        _ => Err(format!("expected two comma-separated values, got {:?}", s)),
    }
}
