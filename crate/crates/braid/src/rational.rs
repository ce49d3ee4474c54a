use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Zero};

use crate::BraidError;

/// Parses `"p/q"`, integers, and decimals with an optional exponent, exactly.
pub fn parse_rational(s: &str) -> Result<BigRational, BraidError> {
    let s = s.trim();
    let bad = || BraidError::Parse(format!("not a rational number: {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(p, q));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if frac_part.starts_with(['-', '+']) || int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let n: BigInt = match digits.as_str() {
        "" | "-" | "+" => BigInt::zero(),
        d => d.parse().map_err(|_| bad())?,
    };
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    Ok(if scale >= 0 {
        BigRational::from_integer(n * Pow::pow(&ten, scale as u32))
    } else {
        BigRational::new(n, Pow::pow(&ten, (-scale) as u32))
    })
}

/// JSON numbers go through their shortest decimal form, so `0.1` is exactly `1/10`.
pub fn rational_from_json(v: &serde_json::Value) -> Result<BigRational, BraidError> {
    match v {
        serde_json::Value::Number(n) => parse_rational(&n.to_string()),
        serde_json::Value::String(s) => parse_rational(s),
        other => Err(BraidError::Parse(format!("expected a number, got {other}"))),
    }
}

/// Integers print bare, everything else as `"p/q"`.
pub fn rational_to_json(x: &BigRational) -> serde_json::Value {
    if x.denom().is_one() {
        if let Ok(n) = x.numer().to_string().parse::<i64>() {
            return serde_json::Value::from(n);
        }
    }
    serde_json::Value::String(x.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, r: i64) -> BigRational {
        BigRational::new(p.into(), r.into())
    }

    #[test]
    fn forms() {
        assert_eq!(parse_rational("0.1").unwrap(), q(1, 10));
        assert_eq!(parse_rational("-0.25").unwrap(), q(-1, 4));
        assert_eq!(parse_rational("3/6").unwrap(), q(1, 2));
        assert_eq!(parse_rational("1e-3").unwrap(), q(1, 1000));
        assert_eq!(parse_rational("2.5E2").unwrap(), q(250, 1));
        assert_eq!(parse_rational(".5").unwrap(), q(1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert!(parse_rational(".").is_err());
    }

    #[test]
    fn json_float() {
        let v: serde_json::Value = serde_json::from_str("[0.1, 7, \"1/3\"]").unwrap();
        let xs: Vec<_> = v.as_array().unwrap().iter().map(|x| rational_from_json(x).unwrap()).collect();
        assert_eq!(xs, vec![q(1, 10), q(7, 1), q(1, 3)]);
        assert_eq!(rational_to_json(&q(7, 1)), serde_json::json!(7));
        assert_eq!(rational_to_json(&q(1, 3)), serde_json::json!("1/3"));
    }
}
