//! Embedder parameter files and loss-curve CSV.
//!
//! Parameter file layout (whitespace separated, one block per line group):
//!
//! ```text
//! fewshot-embedder 1
//! <input_dim> <hidden_dim> <embed_dim>
//! W1: hidden_dim lines of input_dim values
//! b1: one line of hidden_dim values
//! W2: embed_dim lines of hidden_dim values
//! b2: one line of embed_dim values
//! ```

use std::fmt::Write as _;
use std::path::Path;

use super::embedder::EmbedderParams;
use crate::error::{Error, Result};

const MAGIC: &str = "fewshot-embedder";
const VERSION: u32 = 1;

pub fn params_to_string(p: &EmbedderParams) -> String {
    let mut s = format!("{MAGIC} {VERSION}\n{} {} {}\n", p.input_dim, p.hidden_dim, p.embed_dim);
    let (d, h, e) = (p.input_dim, p.hidden_dim, p.embed_dim);
    let mut rows: Vec<usize> = Vec::new();
    rows.extend(std::iter::repeat_n(d, h));
    rows.push(h);
    rows.extend(std::iter::repeat_n(h, e));
    rows.push(e);
    let mut k = 0;
    for len in rows {
        let line: Vec<String> = p.weights[k..k + len].iter().map(|w| format!("{w:?}")).collect();
        let _ = writeln!(s, "{}", line.join(" "));
        k += len;
    }
    s
}

pub fn params_from_str(text: &str) -> Result<EmbedderParams> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| Error::Parse("empty parameter file".into()))?;
    let mut hdr = header.split_whitespace();
    if hdr.next() != Some(MAGIC) {
        return Err(Error::Parse(format!("missing '{MAGIC}' header")));
    }
    let version: u32 = hdr
        .next()
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| Error::Parse("missing version".into()))?;
    if version != VERSION {
        return Err(Error::Parse(format!("unsupported version {version}")));
    }
    let dims: Vec<usize> = lines
        .next()
        .ok_or_else(|| Error::Parse("missing dims line".into()))?
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad dim '{t}'"))))
        .collect::<Result<_>>()?;
    let [d, h, e] = dims[..] else {
        return Err(Error::Parse("dims line must hold 3 integers".into()));
    };
    let weights: Vec<f64> = lines
        .flat_map(|l| l.split_whitespace())
        .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad weight '{t}'"))))
        .collect::<Result<_>>()?;
    let expected = EmbedderParams::param_count(d, h, e);
    if weights.len() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            actual: weights.len(),
        });
    }
    Ok(EmbedderParams {
        input_dim: d,
        hidden_dim: h,
        embed_dim: e,
        weights,
    })
}

pub fn write_params(path: &Path, p: &EmbedderParams) -> Result<()> {
    std::fs::write(path, params_to_string(p))?;
    Ok(())
}

pub fn read_params(path: &Path) -> Result<EmbedderParams> {
    params_from_str(&std::fs::read_to_string(path)?)
}

pub fn write_loss_csv(path: &Path, curve: &[f64]) -> Result<()> {
    let mut s = String::from("epoch,mean_loss\n");
    for (i, l) in curve.iter().enumerate() {
        let _ = writeln!(s, "{i},{l:?}");
    }
    std::fs::write(path, s)?;
    Ok(())
}

pub fn read_loss_csv(path: &Path) -> Result<Vec<f64>> {
    std::fs::read_to_string(path)?
        .lines()
        .skip(1)
        .filter(|l| !l.is_empty())
        .map(|l| {
            l.split(',')
                .nth(1)
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| Error::Parse(format!("bad loss row '{l}'")))
        })
        .collect()
}
