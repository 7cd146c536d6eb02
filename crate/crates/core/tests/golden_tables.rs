//! Special functions against the committed golden table.
//!
//! The table was generated with an independent arbitrary-precision
//! implementation (50-digit working precision, values rounded to f64) on a
//! grid covering all three evaluation branches.

use num_complex::Complex64;
use phasegate::numerics::{erfc_complex, erfi, faddeeva};

fn close(got: Complex64, want: Complex64, context: &str) {
    let err = (got - want).norm();
    let tol = 1e-12 * want.norm().max(1.0);
    assert!(
        err <= tol,
        "{context}: got {got}, want {want}, |err| = {err:e} > {tol:e}"
    );
}

#[test]
fn special_functions_match_golden_table() {
    let raw = include_str!("data/special_golden.csv");
    let mut rows = 0;
    for line in raw.lines().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 5, "malformed row: {line}");
        let parse = |s: &str| s.parse::<f64>().expect("numeric field");
        let z = Complex64::new(parse(fields[1]), parse(fields[2]));
        let want = Complex64::new(parse(fields[3]), parse(fields[4]));
        let got = match fields[0] {
            "faddeeva" => faddeeva(z).unwrap(),
            "erfc" => erfc_complex(z).unwrap(),
            "erfi" => {
                assert_eq!(z.im, 0.0, "erfi rows must be real");
                Complex64::new(erfi(z.re).unwrap(), 0.0)
            }
            other => panic!("unknown function {other}"),
        };
        close(got, want, line);
        rows += 1;
    }
    assert_eq!(rows, 96, "golden table row count changed");
}
