//! Exact rational scalars used for every combinatorial coordinate.
//!
//! All cell endpoints, profile-map values and edge weights are `Ratio<i64>`.
//! Floats only appear at the reporting boundary (`to_f64`) and inside the
//! persistence estimator where thresholds are compared, never in cell math.

use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive, Zero};
use std::fmt::Write as _;

pub type Rat = Ratio<i64>;

/// Shorthand constructor. Panics on zero denominator.
pub fn rat(p: i64, q: i64) -> Rat {
    Ratio::new(p, q)
}

pub fn rat_int(p: i64) -> Rat {
    Ratio::from_integer(p)
}

/// Render as `p/q`, or just `p` when the denominator is 1.
pub fn rat_str(r: Rat) -> String {
    let mut s = String::new();
    if r.denom() == &1 {
        let _ = write!(s, "{}", r.numer());
    } else {
        let _ = write!(s, "{}/{}", r.numer(), r.denom());
    }
    s
}

/// Parse `p/q` or a bare integer.
pub fn parse_rat(s: &str) -> Result<Rat, String> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: i64 = p.trim().parse().map_err(|e| format!("bad numerator in {s:?}: {e}"))?;
        let q: i64 = q.trim().parse().map_err(|e| format!("bad denominator in {s:?}: {e}"))?;
        if q == 0 {
            return Err(format!("zero denominator in {s:?}"));
        }
        Ok(Ratio::new(p, q))
    } else {
        let p: i64 = s.parse().map_err(|e| format!("bad rational {s:?}: {e}"))?;
        Ok(Ratio::from_integer(p))
    }
}

pub fn to_f64(r: Rat) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn abs(r: Rat) -> Rat {
    r.abs()
}

pub fn is_zero(r: Rat) -> bool {
    r.is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip() {
        for s in ["1/2", "-3/4", "0", "7", "-1"] {
            let r = parse_rat(s).unwrap();
            assert_eq!(parse_rat(&rat_str(r)).unwrap(), r);
        }
    }

    #[test]
    fn rejects_zero_denominator() {
        assert!(parse_rat("1/0").is_err());
    }

    #[test]
    fn normalizes() {
        assert_eq!(parse_rat("2/4").unwrap(), rat(1, 2));
        assert_eq!(rat_str(rat(-2, 4)), "-1/2");
    }
}
