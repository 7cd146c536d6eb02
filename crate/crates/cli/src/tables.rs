//! Special-function test vectors for external diffing.
//!
//! The evaluation grid is the same one the library's golden-table test is
//! pinned to (64 Faddeeva points covering all three evaluation branches,
//! 16 complex erfc points, 16 real erfi points); `tables` re-emits the
//! inputs with the values this build actually computes, so an external
//! tool can diff them against any reference implementation.

use anyhow::{bail, Result};
use num_complex::Complex64;
use phasegate::numerics::{erfc_complex, erfi, faddeeva};
use std::io::Write;

const GRID: &str = include_str!("../../core/tests/data/special_golden.csv");

pub fn write_tables(out: &mut dyn Write) -> Result<()> {
    writeln!(out, "func,re_z,im_z,re_val,im_val")?;
    for line in GRID.lines().skip(1).filter(|l| !l.trim().is_empty()) {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            bail!("malformed grid row: {line}");
        }
        let z = Complex64::new(fields[1].parse()?, fields[2].parse()?);
        let val = match fields[0] {
            "faddeeva" => faddeeva(z)?,
            "erfc" => erfc_complex(z)?,
            "erfi" => Complex64::new(erfi(z.re)?, 0.0),
            other => bail!("unknown function {other}"),
        };
        writeln!(out, "{},{},{},{},{}", fields[0], z.re, z.im, val.re, val.im)?;
    }
    Ok(())
}
