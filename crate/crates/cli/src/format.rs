//! Number formatting for reports: `%.17g`, enough digits to round-trip any `f64`.

use nalgebra::{DMatrix, DVector};

pub fn g17(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let sci = format!("{v:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..17).contains(&exp) {
        trim_zeros(format!("{v:.*}", (16 - exp) as usize))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

pub fn vector(v: &DVector<f64>) -> String {
    v.iter().map(|&x| g17(x)).collect::<Vec<_>>().join(" ")
}

pub fn matrix_rows(m: &DMatrix<f64>) -> impl Iterator<Item = String> + '_ {
    m.row_iter().map(|row| row.iter().map(|&x| g17(x)).collect::<Vec<_>>().join(" "))
}

#[cfg(test)]
mod tests {
    use super::g17;

    #[test]
    fn matches_printf_g17() {
        assert_eq!(g17(0.75), "0.75");
        assert_eq!(g17(0.1), "0.10000000000000001");
        assert_eq!(g17(-1.53125), "-1.53125");
        assert_eq!(g17(1.0 / 3.0), "0.33333333333333331");
        assert_eq!(g17(1e20), "1e20");
        assert_eq!(g17(1.5e-7), "1.4999999999999999e-7");
        assert_eq!(g17(123456.0), "123456");
        assert_eq!(g17(0.0), "0");
    }

    #[test]
    fn round_trips() {
        for v in [std::f64::consts::PI, -2.0 / 7.0, 6.02e23, 1e-300, 9.999999999999999e16] {
            assert_eq!(g17(v).parse::<f64>().unwrap(), v);
        }
    }
}
