//! Number formatting shared by the CSV and JSON writers.

use serde_json::{Number, Value};

/// Significant digits carried by every floating-point output.
pub const DIGITS: usize = 15;

fn mantissa_exponent(x: f64) -> (String, i32) {
    let s = format!("{:.*e}", DIGITS - 1, x.abs());
    let (mant, exp) = s.split_once('e').expect("exponent form");
    (mant.replace('.', ""), exp.parse().expect("integer exponent"))
}

/// `x` rounded to 15 significant digits and written in full, e.g.
/// `28.8000000000000`. Scientific notation outside `1e-7 .. 1e21`.
pub fn fixed(x: f64) -> String {
    if x == 0.0 {
        return format!("0.{}", "0".repeat(DIGITS - 1));
    }
    let sign = if x < 0.0 { "-" } else { "" };
    let (digits, exp) = mantissa_exponent(x);
    let body = if !(-7..21).contains(&exp) {
        format!("{}.{}e{exp}", &digits[..1], &digits[1..])
    } else if exp < 0 {
        format!("0.{}{digits}", "0".repeat((-exp - 1) as usize))
    } else {
        let point = exp as usize + 1;
        if point >= digits.len() {
            format!("{digits}{}", "0".repeat(point - digits.len()))
        } else {
            format!("{}.{}", &digits[..point], &digits[point..])
        }
    };
    format!("{sign}{body}")
}

/// Shortest decimal that reads back as `x` rounded to 15 significant
/// digits; `0` prints as `0`.
pub fn short(x: f64) -> String {
    let rounded: f64 = format!("{:.*e}", DIGITS - 1, x).parse().expect("round trip");
    if rounded == 0.0 {
        return "0".to_string();
    }
    format!("{rounded}")
}

/// JSON number carrying the `fixed` text verbatim.
pub fn json(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    Value::Number(fixed(x).parse::<Number>().expect("valid JSON number"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_digits() {
        assert_eq!(fixed(28.8), "28.8000000000000");
        assert_eq!(fixed(-0.5), "-0.500000000000000");
        assert_eq!(fixed(0.0), "0.00000000000000");
        assert_eq!(fixed(1234.5), "1234.50000000000");
        assert_eq!(fixed(2.5e-9), "2.50000000000000e-9");
        assert_eq!(fixed(1e15), "1000000000000000");
        assert_eq!(fixed(0.00125), "0.00125000000000000");
    }

    #[test]
    fn short_rounds() {
        assert_eq!(short(0.0), "0");
        assert_eq!(short(-0.0), "0");
        assert_eq!(short(0.1 + 0.2), "0.3");
        assert_eq!(short(2.0 / 3.0), "0.666666666666667");
    }

    #[test]
    fn json_keeps_text() {
        assert_eq!(json(28.8).to_string(), "28.8000000000000");
        assert_eq!(json(f64::NAN), Value::Null);
    }
}
