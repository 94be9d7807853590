use serde_json::Value;

/// `x` with 12 significant digits, `%.12g` style.
pub fn num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let e: i32 = exp.parse().expect("exponent");
    if (-5..12).contains(&e) {
        trim_zeros(format!("{:.*}", (11 - e).max(0) as usize, x))
    } else {
        format!("{}e{}", trim_zeros(mantissa.to_string()), e)
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

/// JSON number rounded to 12 significant digits; `null` when not finite.
pub fn json_num(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    num(x).parse::<f64>().map(Value::from).unwrap_or(Value::Null)
}

pub fn json_nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| json_num(x)).collect())
}

/// Comma-joined numbers.
pub fn joined(xs: &[f64]) -> String {
    xs.iter().map(|&x| num(x)).collect::<Vec<_>>().join(",")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_digits() {
        assert_eq!(num(std::f64::consts::PI), "3.14159265359");
        assert_eq!(num(1.0), "1");
        assert_eq!(num(-0.5), "-0.5");
        assert_eq!(num(1.0 / 3.0 * 1e-7), "3.33333333333e-8");
        assert_eq!(num(123456789012345.0), "1.23456789012e14");
        assert_eq!(num(9.999999999999999), "10");
        assert_eq!(num(1e-5), "0.00001");
        assert_eq!(num(0.0), "0");
    }

    #[test]
    fn json_rounding() {
        assert_eq!(json_num(1.0 / 7.0), Value::from(0.142857142857));
        assert_eq!(json_num(f64::NAN), Value::Null);
    }
}
