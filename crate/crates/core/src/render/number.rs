const MAX_DECIMALS: i32 = 12;

/// Six significant digits and at most twelve decimals, trailing zeros
/// trimmed, no exponent. Negative zero prints as `0`.
pub fn fmt_num(x: f64) -> String {
    if !x.is_finite() {
        return "0".into();
    }
    let rounded: f64 = format!("{x:.5e}").parse().unwrap_or(x);
    if rounded == 0.0 {
        return "0".into();
    }
    let exp = rounded.abs().log10().floor() as i32;
    let decimals = (5 - exp).clamp(0, MAX_DECIMALS) as usize;
    let mut s = format!("{rounded:.decimals$}");
    if s.contains('.') {
        let t = s.trim_end_matches('0').trim_end_matches('.').len();
        s.truncate(t);
    }
    if s.trim_start_matches('-') == "0" {
        s = "0".into();
    }
    s
}

#[cfg(test)]
mod tests {
    use super::fmt_num;

    #[test]
    fn examples() {
        assert_eq!(fmt_num(1.0), "1");
        assert_eq!(fmt_num(-0.0), "0");
        assert_eq!(fmt_num(0.1 + 0.2), "0.3");
        assert_eq!(fmt_num(123456.7), "123457");
        assert_eq!(fmt_num(-0.000123456789), "-0.000123457");
        assert_eq!(fmt_num(1e-12), "0.000000000001");
        assert_eq!(fmt_num(6.1e-17), "0");
        assert_eq!(fmt_num(-4e-13), "0");
        assert_eq!(fmt_num(999999.6), "1000000");
        assert_eq!(fmt_num(-4e-20 * 0.0), "0");
    }
}
