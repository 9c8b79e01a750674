//! Node-indexed field storage and the on-disk field format.
//!
//! # File format
//!
//! A field file is a UTF-8 key/value header followed by a raw binary block:
//!
//! ```text
//! spinlab-field 1
//! kind = metric
//! family = schwcap(mass=2,cap=1)
//! dims = 3
//! n = 96
//! half_width = 16
//! components = 6
//! complex = false
//! data
//! <binary>
//! ```
//!
//! The binary block is little-endian IEEE-754 f64, row-major over node
//! `(i, j, k)` (k fastest) with all components of one node contiguous.
//! Complex fields set `complex = true` and interleave `(re, im)` per
//! component, so a node of a 2-component complex field occupies 4 floats.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::GridChart;
use crate::linalg::C64;

const MAGIC: &str = "spinlab-field 1";

/// Identity of a stored field: what it is and where it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldTag {
    pub kind: String,
    pub family: String,
}

impl FieldTag {
    pub fn new(kind: &str, family: &str) -> Self {
        Self { kind: kind.to_string(), family: family.to_string() }
    }
}

/// Real field with a runtime component count (1 for scalars, 6 for the
/// metric, 9 for frames, ...). Components of one node are contiguous.
#[derive(Debug, Clone)]
pub struct RealField {
    pub chart: GridChart,
    pub components: usize,
    pub data: Vec<f64>,
}

impl RealField {
    pub fn zeros(chart: GridChart, components: usize) -> Self {
        Self { chart, components, data: vec![0.0; chart.node_count() * components] }
    }

    #[inline]
    pub fn node(&self, idx: usize) -> &[f64] {
        &self.data[idx * self.components..(idx + 1) * self.components]
    }

    #[inline]
    pub fn node_mut(&mut self, idx: usize) -> &mut [f64] {
        &mut self.data[idx * self.components..(idx + 1) * self.components]
    }

    pub fn write(&self, path: &Path, tag: &FieldTag) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        write_header(&mut w, tag, &self.chart, self.components, false)?;
        let mut buf = Vec::with_capacity(self.data.len() * 8);
        for v in &self.data {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        w.write_all(&buf)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<(Self, FieldTag)> {
        let mut r = BufReader::new(File::open(path)?);
        let (tag, chart, components, complex) = read_header(&mut r)?;
        if complex {
            return Err(Error::FieldFormat("expected a real field, file is complex".into()));
        }
        let data = read_f64_block(&mut r, chart.node_count() * components)?;
        Ok((Self { chart, components, data }, tag))
    }
}

/// Two-component complex spinor field; node `idx` occupies
/// `data[2*idx]` and `data[2*idx + 1]`.
#[derive(Debug, Clone)]
pub struct SpinorField {
    pub chart: GridChart,
    pub data: Vec<C64>,
}

impl SpinorField {
    pub fn zeros(chart: GridChart) -> Self {
        Self { chart, data: vec![Complex64::ZERO; 2 * chart.node_count()] }
    }

    #[inline]
    pub fn get(&self, idx: usize) -> [C64; 2] {
        [self.data[2 * idx], self.data[2 * idx + 1]]
    }

    #[inline]
    pub fn set(&mut self, idx: usize, v: [C64; 2]) {
        self.data[2 * idx] = v[0];
        self.data[2 * idx + 1] = v[1];
    }

    /// Pointwise norm `|psi|(x)`.
    pub fn norm_field(&self) -> RealField {
        let mut out = RealField::zeros(self.chart, 1);
        for idx in 0..self.chart.node_count() {
            let [a, b] = self.get(idx);
            out.data[idx] = (a.norm_sqr() + b.norm_sqr()).sqrt();
        }
        out
    }

    pub fn write(&self, path: &Path, tag: &FieldTag) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        write_header(&mut w, tag, &self.chart, 2, true)?;
        let mut buf = Vec::with_capacity(self.data.len() * 16);
        for z in &self.data {
            buf.extend_from_slice(&z.re.to_le_bytes());
            buf.extend_from_slice(&z.im.to_le_bytes());
        }
        w.write_all(&buf)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<(Self, FieldTag)> {
        let mut r = BufReader::new(File::open(path)?);
        let (tag, chart, components, complex) = read_header(&mut r)?;
        if !complex || components != 2 {
            return Err(Error::FieldFormat(format!(
                "expected a 2-component complex field, found components={components}, complex={complex}"
            )));
        }
        let raw = read_f64_block(&mut r, chart.node_count() * 4)?;
        let data = raw.chunks_exact(2).map(|p| Complex64::new(p[0], p[1])).collect();
        Ok((Self { chart, data }, tag))
    }
}

fn write_header<W: Write>(
    w: &mut W,
    tag: &FieldTag,
    chart: &GridChart,
    components: usize,
    complex: bool,
) -> Result<()> {
    let mut head = String::new();
    let _ = writeln!(head, "{MAGIC}");
    let _ = writeln!(head, "kind = {}", tag.kind);
    let _ = writeln!(head, "family = {}", tag.family);
    let _ = writeln!(head, "dims = 3");
    let _ = writeln!(head, "n = {}", chart.n());
    let _ = writeln!(head, "half_width = {}", chart.half_width());
    let _ = writeln!(head, "components = {components}");
    let _ = writeln!(head, "complex = {complex}");
    let _ = writeln!(head, "data");
    w.write_all(head.as_bytes())?;
    Ok(())
}

fn read_header<R: Read>(r: &mut R) -> Result<(FieldTag, GridChart, usize, bool)> {
    let mut head = Vec::new();
    let mut byte = [0u8; 1];
    // read byte-by-byte until the "data" terminator line so the binary
    // block position is exact
    loop {
        let got = r.read(&mut byte)?;
        if got == 0 {
            return Err(Error::FieldFormat("truncated header".into()));
        }
        head.push(byte[0]);
        if head.ends_with(b"\ndata\n") {
            break;
        }
        if head.len() > 4096 {
            return Err(Error::FieldFormat("header exceeds 4096 bytes".into()));
        }
    }
    let text = std::str::from_utf8(&head)
        .map_err(|_| Error::FieldFormat("header is not UTF-8".into()))?;
    let mut lines = text.lines();
    if lines.next() != Some(MAGIC) {
        return Err(Error::FieldFormat(format!("bad magic, expected '{MAGIC}'")));
    }
    let mut kind = None;
    let mut family = None;
    let mut dims = None;
    let mut n = None;
    let mut half_width = None;
    let mut components = None;
    let mut complex = None;
    for line in lines {
        if line == "data" {
            break;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::FieldFormat(format!("malformed header line '{line}'")))?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "kind" => kind = Some(value.to_string()),
            "family" => family = Some(value.to_string()),
            "dims" => dims = Some(parse::<usize>(key, value)?),
            "n" => n = Some(parse::<usize>(key, value)?),
            "half_width" => half_width = Some(parse::<f64>(key, value)?),
            "components" => components = Some(parse::<usize>(key, value)?),
            "complex" => complex = Some(parse::<bool>(key, value)?),
            other => return Err(Error::FieldFormat(format!("unknown header key '{other}'"))),
        }
    }
    let missing = |k: &str| Error::FieldFormat(format!("missing header key '{k}'"));
    let dims = dims.ok_or_else(|| missing("dims"))?;
    if dims != 3 {
        return Err(Error::FieldFormat(format!("unsupported dims = {dims}")));
    }
    let chart = GridChart::new(
        half_width.ok_or_else(|| missing("half_width"))?,
        n.ok_or_else(|| missing("n"))?,
    )?;
    Ok((
        FieldTag {
            kind: kind.ok_or_else(|| missing("kind"))?,
            family: family.ok_or_else(|| missing("family"))?,
        },
        chart,
        components.ok_or_else(|| missing("components"))?,
        complex.ok_or_else(|| missing("complex"))?,
    ))
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::FieldFormat(format!("cannot parse header value '{value}' for '{key}'")))
}

fn read_f64_block<R: Read>(r: &mut R, count: usize) -> Result<Vec<f64>> {
    let mut bytes = vec![0u8; count * 8];
    r.read_exact(&mut bytes).map_err(|_| {
        Error::FieldFormat(format!("binary block shorter than the {count} values promised"))
    })?;
    let mut trailing = [0u8; 1];
    if r.read(&mut trailing)? != 0 {
        return Err(Error::FieldFormat("trailing bytes after binary block".into()));
    }
    Ok(bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect())
}
