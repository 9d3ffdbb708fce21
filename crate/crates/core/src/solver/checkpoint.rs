//! Checkpoint dumps of `(grid description, t, u)`.
//!
//! Text layout (UTF-8, one token group per line):
//!
//! ```text
//! wdiff-checkpoint v1
//! dim_n <N>
//! n_cells <n>
//! t <t>
//! faces
//! <n+1 lines, one face radius each>
//! u
//! <n lines, one cell average each>
//! ```
//!
//! Floats are written with 17 significant digits (`{:.16e}`), which
//! round-trips every `f64` bit pattern.
//!
//! Binary layout (little endian): the 8-byte magic `WDCKPT01`, `dim_n` as
//! `u32`, `n_cells` as `u64`, `t` as `f64`, then `n_cells + 1` face radii and
//! `n_cells` cell averages, all as `f64`.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::scalar::{lit, wide, Real};

const TEXT_MAGIC: &str = "wdiff-checkpoint v1";
const BINARY_MAGIC: &[u8; 8] = b"WDCKPT01";

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint<T> {
    pub dim_n: u32,
    pub t: T,
    pub faces: Vec<T>,
    pub u: Vec<T>,
}

impl<T: Real> Checkpoint<T> {
    fn validate(&self) -> Result<()> {
        if self.faces.len() != self.u.len() + 1 || self.u.is_empty() {
            return Err(Error::Checkpoint(format!(
                "{} faces for {} cells",
                self.faces.len(),
                self.u.len()
            )));
        }
        Ok(())
    }

    pub fn write_text<W: Write>(&self, mut out: W) -> Result<()> {
        self.validate()?;
        writeln!(out, "{TEXT_MAGIC}")?;
        writeln!(out, "dim_n {}", self.dim_n)?;
        writeln!(out, "n_cells {}", self.u.len())?;
        writeln!(out, "t {:.16e}", self.t)?;
        writeln!(out, "faces")?;
        for f in &self.faces {
            writeln!(out, "{f:.16e}")?;
        }
        writeln!(out, "u")?;
        for v in &self.u {
            writeln!(out, "{v:.16e}")?;
        }
        Ok(())
    }

    pub fn read_text<R: Read>(mut input: R) -> Result<Self> {
        let mut text = String::new();
        input.read_to_string(&mut text)?;
        let mut lines = text.lines();
        let mut next = |what: &str| {
            lines
                .next()
                .ok_or_else(|| Error::Checkpoint(format!("unexpected end of file, expected {what}")))
        };
        if next("header")?.trim() != TEXT_MAGIC {
            return Err(Error::Checkpoint("missing header line".into()));
        }
        let field = |line: &str, key: &str| -> Result<String> {
            line.strip_prefix(key)
                .map(|v| v.trim().to_string())
                .ok_or_else(|| Error::Checkpoint(format!("expected `{key}`, found `{line}`")))
        };
        let parse_f = |s: &str| -> Result<T> {
            s.trim()
                .parse::<f64>()
                .map(lit::<T>)
                .map_err(|e| Error::Checkpoint(format!("bad number `{s}`: {e}")))
        };
        let dim_n: u32 = field(next("dim_n")?, "dim_n")?
            .parse()
            .map_err(|e| Error::Checkpoint(format!("bad dim_n: {e}")))?;
        let n: usize = field(next("n_cells")?, "n_cells")?
            .parse()
            .map_err(|e| Error::Checkpoint(format!("bad n_cells: {e}")))?;
        let t = parse_f(&field(next("t")?, "t")?)?;
        if next("faces")?.trim() != "faces" {
            return Err(Error::Checkpoint("expected `faces` section".into()));
        }
        let faces = (0..=n).map(|_| parse_f(next("face")?)).collect::<Result<Vec<T>>>()?;
        if next("u")?.trim() != "u" {
            return Err(Error::Checkpoint("expected `u` section".into()));
        }
        let u = (0..n)
            .map(|_| parse_f(next("cell value")?))
            .collect::<Result<Vec<T>>>()?;
        let cp = Self { dim_n, t, faces, u };
        cp.validate()?;
        Ok(cp)
    }

    pub fn write_binary<W: Write>(&self, mut out: W) -> Result<()> {
        self.validate()?;
        out.write_all(BINARY_MAGIC)?;
        out.write_all(&self.dim_n.to_le_bytes())?;
        out.write_all(&(self.u.len() as u64).to_le_bytes())?;
        out.write_all(&wide(self.t).to_le_bytes())?;
        for &x in self.faces.iter().chain(&self.u) {
            out.write_all(&wide(x).to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut input: R) -> Result<Self> {
        let mut magic = [0u8; 8];
        input.read_exact(&mut magic)?;
        if &magic != BINARY_MAGIC {
            return Err(Error::Checkpoint("bad binary magic".into()));
        }
        let mut b4 = [0u8; 4];
        let mut b8 = [0u8; 8];
        input.read_exact(&mut b4)?;
        let dim_n = u32::from_le_bytes(b4);
        input.read_exact(&mut b8)?;
        let n = u64::from_le_bytes(b8) as usize;
        let mut read_f = || -> Result<T> {
            input.read_exact(&mut b8)?;
            Ok(lit(f64::from_le_bytes(b8)))
        };
        let t = read_f()?;
        let faces = (0..=n).map(|_| read_f()).collect::<Result<Vec<T>>>()?;
        let u = (0..n).map(|_| read_f()).collect::<Result<Vec<T>>>()?;
        let cp = Self { dim_n, t, faces, u };
        cp.validate()?;
        Ok(cp)
    }
}

impl<T: Real> super::Solver<T> {
    /// Snapshot of a state on this solver's grid (physical values).
    pub fn checkpoint(&self, state: &super::SolverState<T>) -> Checkpoint<T> {
        Checkpoint {
            dim_n: self.grid().dim_n,
            t: state.t,
            faces: self.grid().faces.clone(),
            u: state.physical_u(),
        }
    }

    /// Restores a state from a checkpoint written on the same grid. The
    /// reference mass and sup are taken from the checkpointed profile.
    pub fn restore(&self, cp: &Checkpoint<T>) -> Result<super::SolverState<T>> {
        if cp.dim_n != self.grid().dim_n || cp.faces != self.grid().faces {
            return Err(Error::Checkpoint(
                "checkpoint grid does not match the solver grid".into(),
            ));
        }
        let mass0 = crate::measure::mass(&self.grid().volumes, &cp.u)?;
        let sup0 = cp.u.iter().copied().fold(T::zero(), T::max);
        Ok(super::SolverState {
            t: cp.t,
            u: cp.u.clone(),
            scale: T::one(),
            mass0,
            sup0,
            sup: sup0,
            dt_last: T::zero(),
            steps: 0,
        })
    }
}
