//! Text output helpers shared by every CSV writer.

/// Positional decimal with 17 significant digits (enough to round-trip an
/// `f64`). Non-finite values print as `NaN`, `inf`, `-inf`.
pub fn sig17(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0.0000000000000000".to_string();
    }
    // Take the decimal exponent from the correctly rounded scientific form so
    // a carry (9.99.. -> 10.0) cannot add an eighteenth digit.
    let sci = format!("{x:.16e}");
    let exp: i32 = sci
        .rsplit_once('e')
        .and_then(|(_, e)| e.parse().ok())
        .unwrap_or(0);
    let decimals = (16 - exp).max(0) as usize;
    format!("{x:.decimals$}")
}
