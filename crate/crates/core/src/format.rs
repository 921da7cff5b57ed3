//! Locale-free number formatting shared by the text outputs.

/// 17 significant digits in scientific notation; `nan` for NaN.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else {
        format!("{x:.16e}")
    }
}
