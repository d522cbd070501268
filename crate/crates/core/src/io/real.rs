//! Decimal formatting of reals with 12 significant digits.

/// `v` rounded to 12 significant digits, printed in the shortest form that
/// parses back to the rounded value.
pub fn fmt_real(v: f64) -> String {
    if !v.is_finite() {
        return format!("{v}");
    }
    let r: f64 = format!("{v:.11e}").parse().expect("formatted float parses");
    if r == 0.0 {
        "0".into()
    } else if (1e-4..1e15).contains(&r.abs()) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}

/// A value given by its natural logarithm, printed like `fmt_real` even when
/// it is outside the range of `f64`.
pub fn fmt_ln_real(ln: f64) -> String {
    let v = ln.exp();
    if v.is_finite() && (v == 0.0) == (ln == f64::NEG_INFINITY) && v >= f64::MIN_POSITIVE {
        return fmt_real(v);
    }
    if ln == f64::NEG_INFINITY {
        return "0".into();
    }
    if ln.is_nan() {
        return "NaN".into();
    }
    let l10 = ln / std::f64::consts::LN_10;
    let mut exp = l10.floor();
    let mut mant: f64 = format!("{:.11}", 10f64.powf(l10 - exp)).parse().expect("formatted float parses");
    if mant >= 10.0 {
        mant /= 10.0;
        exp += 1.0;
    }
    format!("{mant}e{exp}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_digits() {
        assert_eq!(fmt_real(0.7), "0.7");
        assert_eq!(fmt_real(1.0), "1");
        assert_eq!(fmt_real(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_real(0.0), "0");
        assert_eq!(fmt_real(2.5e-7), "2.5e-7");
        assert_eq!(fmt_real(123456789012345.0), "123456789012000");
    }

    #[test]
    fn huge_values_from_logs() {
        assert_eq!(fmt_ln_real(0.7f64.ln()), "0.7");
        assert_eq!(fmt_ln_real(1000.0 * std::f64::consts::LN_10), "1e1000");
        assert_eq!(fmt_ln_real(f64::NEG_INFINITY), "0");
    }
}
