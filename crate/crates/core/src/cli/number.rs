//! Numeric flag values: decimals (`0.25`, `1e-3`) and exact fractions
//! (`2/3`, `-4/13`, `0.5/3`). Fractions are reduced as rationals and
//! rounded once to the nearest `f64`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

fn decimal_to_rational(text: &str) -> Result<BigRational, String> {
    let t = text.trim();
    let (negative, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    let valid = |s: &str| s.chars().all(|c| c.is_ascii_digit());
    if (int_part.is_empty() && frac_part.is_empty()) || !valid(int_part) || !valid(frac_part) {
        return Err(format!("`{text}` is not a decimal number"));
    }
    let digits = format!("{int_part}{frac_part}");
    let mut numer: BigInt = digits
        .parse()
        .map_err(|_| format!("`{text}` is not a decimal number"))?;
    if negative {
        numer = -numer;
    }
    let denom = num_traits::pow(BigInt::from(10u32), frac_part.len());
    Ok(BigRational::new(numer, denom))
}

/// Parses `a` or `a/b` into a finite `f64`.
pub fn parse_number(text: &str) -> Result<f64, String> {
    let t = text.trim();
    if let Some((num, den)) = t.split_once('/') {
        let num = decimal_to_rational(num)?;
        let den = decimal_to_rational(den)?;
        if den.is_zero() {
            return Err(format!("`{text}`: division by zero"));
        }
        let value = (num / den)
            .to_f64()
            .ok_or_else(|| format!("`{text}` is out of range"))?;
        return if value.is_finite() {
            Ok(value)
        } else {
            Err(format!("`{text}` is out of range"))
        };
    }
    match t.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(format!("`{text}` is not a finite number")),
    }
}

/// Parses one relative velocity, allowing multiples of the advection
/// velocity: `0.1`, `-2V`, `V/2`, `-V`, `0.5V`.
pub fn parse_relative_velocity(text: &str, v: f64) -> Result<f64, String> {
    let t = text.trim();
    let Some((coef, rest)) = t.split_once('V') else {
        return parse_number(t);
    };
    let coef = match coef {
        "" | "+" => 1.0,
        "-" => -1.0,
        c => parse_number(c)?,
    };
    let divisor = match rest {
        "" => 1.0,
        r => match r.strip_prefix('/') {
            Some(d) => parse_number(d)?,
            None => return Err(format!("`{text}` is not of the form [k]V[/d]")),
        },
    };
    if divisor == 0.0 {
        return Err(format!("`{text}`: division by zero"));
    }
    Ok(coef * v / divisor)
}

pub fn parse_u_list(text: &str, v: f64) -> Result<Vec<f64>, String> {
    text.split(',').map(|tok| parse_relative_velocity(tok, v)).collect()
}
