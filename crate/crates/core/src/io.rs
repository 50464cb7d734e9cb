//! Matrix Market operators and dense text/CSV blocks.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::block::BlockVector;
use crate::error::{Error, Result};
use crate::operator::MatrixOperator;
use crate::scalar::Scalar;

/// An operator whose scalar type is only known at run time.
#[derive(Clone, Debug)]
pub enum AnyOperator {
    Real(MatrixOperator<f64>),
    Complex(MatrixOperator<Complex64>),
}

impl AnyOperator {
    pub fn n(&self) -> usize {
        match self {
            AnyOperator::Real(a) => a.n(),
            AnyOperator::Complex(a) => a.n(),
        }
    }

    pub fn is_complex(&self) -> bool {
        matches!(self, AnyOperator::Complex(_))
    }

    pub fn nnz(&self) -> Option<usize> {
        match self {
            AnyOperator::Real(a) => a.nnz(),
            AnyOperator::Complex(a) => a.nnz(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum AnyBlock {
    Real(BlockVector<f64>),
    Complex(BlockVector<Complex64>),
}

impl AnyBlock {
    pub fn nrows(&self) -> usize {
        match self {
            AnyBlock::Real(b) => b.nrows(),
            AnyBlock::Complex(b) => b.nrows(),
        }
    }

    pub fn to_complex(&self) -> BlockVector<Complex64> {
        match self {
            AnyBlock::Real(b) => b.to_complex(),
            AnyBlock::Complex(b) => b.clone(),
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
enum Field {
    Real,
    Complex,
    Integer,
    Pattern,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
    Skew,
    Hermitian,
}

struct Header {
    coordinate: bool,
    field: Field,
    symmetry: Symmetry,
}

fn parse_header(line: &str) -> Result<Header> {
    let words: Vec<String> = line.split_whitespace().map(|w| w.to_ascii_lowercase()).collect();
    if words.len() < 5 || words[0] != "%%matrixmarket" || words[1] != "matrix" {
        return Err(Error::parse(1, "expected '%%MatrixMarket matrix <format> <field> <symmetry>'"));
    }
    let coordinate = match words[2].as_str() {
        "coordinate" => true,
        "array" => false,
        other => return Err(Error::parse(1, format!("unknown format '{other}'"))),
    };
    let field = match words[3].as_str() {
        "real" | "double" => Field::Real,
        "complex" => Field::Complex,
        "integer" => Field::Integer,
        "pattern" => Field::Pattern,
        other => return Err(Error::parse(1, format!("unknown field '{other}'"))),
    };
    let symmetry = match words[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "skew-symmetric" => Symmetry::Skew,
        "hermitian" => Symmetry::Hermitian,
        other => return Err(Error::parse(1, format!("unknown symmetry '{other}'"))),
    };
    if field == Field::Pattern && !coordinate {
        return Err(Error::parse(1, "pattern field requires coordinate format"));
    }
    Ok(Header {
        coordinate,
        field,
        symmetry,
    })
}

/// Data lines with their 1-based line numbers, comments and blanks skipped.
fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .skip(1)
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('%'))
}

fn num<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    tok.ok_or_else(|| Error::parse(line, format!("missing {what}")))?
        .parse()
        .map_err(|_| Error::parse(line, format!("bad {what}")))
}

fn read_value(toks: &mut std::str::SplitWhitespace<'_>, field: Field, line: usize) -> Result<Complex64> {
    Ok(match field {
        Field::Pattern => Complex64::new(1.0, 0.0),
        Field::Real | Field::Integer => Complex64::new(num(toks.next(), line, "value")?, 0.0),
        Field::Complex => Complex64::new(num(toks.next(), line, "real part")?, num(toks.next(), line, "imaginary part")?),
    })
}

/// `(i, j, v)` entries (0-based) with symmetry already expanded.
fn mtx_entries(text: &str) -> Result<(usize, Field, Vec<(usize, usize, Complex64)>)> {
    let first = text.lines().next().ok_or_else(|| Error::parse(1, "empty file"))?;
    let header = parse_header(first)?;
    let mut lines = data_lines(text);
    let (size_line, size) = lines.next().ok_or_else(|| Error::parse(2, "missing size line"))?;
    let mut toks = size.split_whitespace();
    let rows: usize = num(toks.next(), size_line, "row count")?;
    let cols: usize = num(toks.next(), size_line, "column count")?;
    if rows != cols {
        return Err(Error::dims(format!("operator must be square, got {rows}x{cols}")));
    }
    let n = rows;
    let mut raw = Vec::new();
    if header.coordinate {
        let nnz: usize = num(toks.next(), size_line, "entry count")?;
        for (ln, l) in lines.by_ref().take(nnz) {
            let mut t = l.split_whitespace();
            let i: usize = num(t.next(), ln, "row index")?;
            let j: usize = num(t.next(), ln, "column index")?;
            if i == 0 || j == 0 || i > n || j > n {
                return Err(Error::parse(ln, format!("index ({i}, {j}) outside 1..={n}")));
            }
            raw.push((i - 1, j - 1, read_value(&mut t, header.field, ln)?));
        }
        if raw.len() != nnz {
            return Err(Error::parse(size_line, format!("expected {nnz} entries, found {}", raw.len())));
        }
    } else {
        let lower_only = header.symmetry != Symmetry::General;
        let positions: Vec<(usize, usize)> = (0..n)
            .flat_map(|j| {
                let start = if lower_only { j + usize::from(header.symmetry == Symmetry::Skew) } else { 0 };
                (start..n).map(move |i| (i, j))
            })
            .collect();
        let mut it = positions.into_iter();
        for (ln, l) in lines.by_ref() {
            let mut t = l.split_whitespace();
            let v = read_value(&mut t, header.field, ln)?;
            let (i, j) = it
                .next()
                .ok_or_else(|| Error::parse(ln, "more values than the matrix holds"))?;
            raw.push((i, j, v));
        }
        if it.next().is_some() {
            return Err(Error::parse(size_line, "fewer values than the matrix holds"));
        }
    }
    let mut entries = Vec::with_capacity(raw.len() * 2);
    for (i, j, v) in raw {
        entries.push((i, j, v));
        if i != j {
            match header.symmetry {
                Symmetry::General => {}
                Symmetry::Symmetric => entries.push((j, i, v)),
                Symmetry::Skew => entries.push((j, i, -v)),
                Symmetry::Hermitian => entries.push((j, i, v.conj())),
            }
        }
    }
    Ok((n, header.field, entries))
}

pub fn parse_matrix_market(text: &str) -> Result<AnyOperator> {
    let (n, field, entries) = mtx_entries(text)?;
    if field == Field::Complex {
        Ok(AnyOperator::Complex(MatrixOperator::from_triplets(n, &entries)?))
    } else {
        let real: Vec<(usize, usize, f64)> = entries.into_iter().map(|(i, j, v)| (i, j, v.re)).collect();
        Ok(AnyOperator::Real(MatrixOperator::from_triplets(n, &real)?))
    }
}

pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<AnyOperator> {
    let mut text = String::new();
    File::open(path)?.read_to_string(&mut text)?;
    parse_matrix_market(&text)
}

/// Writes explicit storage in coordinate general format.
pub fn write_matrix_market<S: Scalar>(a: &MatrixOperator<S>, mut w: impl Write) -> Result<()> {
    let mut entries = Vec::new();
    a.for_each_entry(|i, j, v| {
        if v != S::zero() {
            entries.push((i, j, v));
        }
    })?;
    let field = if S::IS_COMPLEX { "complex" } else { "real" };
    writeln!(w, "%%MatrixMarket matrix coordinate {field} general")?;
    writeln!(w, "{} {} {}", a.n(), a.n(), entries.len())?;
    for (i, j, v) in entries {
        let z = v.to_complex();
        if S::IS_COMPLEX {
            writeln!(w, "{} {} {:e} {:e}", i + 1, j + 1, z.re, z.im)?;
        } else {
            writeln!(w, "{} {} {:e}", i + 1, j + 1, z.re)?;
        }
    }
    Ok(())
}

fn parse_entry(tok: &str, line: usize) -> Result<Complex64> {
    let t = tok.trim().replace('j', "i");
    if let Ok(x) = t.parse::<f64>() {
        return Ok(Complex64::new(x, 0.0));
    }
    t.parse::<Complex64>()
        .map_err(|_| Error::parse(line, format!("bad number '{tok}'")))
}

/// Dense block from text: one row per line, entries separated by commas or
/// whitespace, complex entries written `a+bi`. Matrix Market array files are
/// accepted as well. A leading non-numeric line is taken as a header.
pub fn parse_block(text: &str) -> Result<AnyBlock> {
    if text.trim_start().starts_with("%%MatrixMarket") {
        return parse_mtx_block(text);
    }
    let mut rows: Vec<Vec<Complex64>> = Vec::new();
    let mut complex = false;
    for (k, l) in text.lines().enumerate() {
        let l = l.trim();
        if l.is_empty() || l.starts_with('#') || l.starts_with('%') {
            continue;
        }
        let toks: Vec<&str> = l.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).collect();
        let parsed: Result<Vec<Complex64>> = toks.iter().map(|t| parse_entry(t, k + 1)).collect();
        match parsed {
            Ok(row) => {
                if let Some(first) = rows.first() {
                    if first.len() != row.len() {
                        return Err(Error::parse(k + 1, format!("expected {} entries, found {}", first.len(), row.len())));
                    }
                }
                complex |= row.iter().any(|z| z.im != 0.0) || l.contains('i') || l.contains('j');
                rows.push(row);
            }
            // header line
            Err(_) if rows.is_empty() => continue,
            Err(e) => return Err(e),
        }
    }
    if rows.is_empty() {
        return Err(Error::parse(1, "no numeric rows"));
    }
    let (n, q) = (rows.len(), rows[0].len());
    let block = BlockVector::from_fn(n, q, |i, j| rows[i][j]);
    finish_block(block, complex)
}

fn parse_mtx_block(text: &str) -> Result<AnyBlock> {
    let first = text.lines().next().unwrap_or_default();
    let header = parse_header(first)?;
    if header.coordinate || header.symmetry != Symmetry::General {
        return Err(Error::Unsupported("blocks must be Matrix Market general arrays".into()));
    }
    let mut lines = data_lines(text);
    let (sl, size) = lines.next().ok_or_else(|| Error::parse(2, "missing size line"))?;
    let mut toks = size.split_whitespace();
    let n: usize = num(toks.next(), sl, "row count")?;
    let q: usize = num(toks.next(), sl, "column count")?;
    let mut vals = Vec::with_capacity(n * q);
    for (ln, l) in lines {
        vals.push(read_value(&mut l.split_whitespace(), header.field, ln)?);
    }
    if vals.len() != n * q {
        return Err(Error::parse(sl, format!("expected {} values, found {}", n * q, vals.len())));
    }
    let block = BlockVector::from_col_major(n, q, vals)?;
    finish_block(block, header.field == Field::Complex)
}

fn finish_block(block: BlockVector<Complex64>, complex: bool) -> Result<AnyBlock> {
    if !block.all_finite() {
        return Err(Error::contract("block has non-finite entries"));
    }
    if complex {
        Ok(AnyBlock::Complex(block))
    } else {
        Ok(AnyBlock::Real(block.re()))
    }
}

pub fn read_block(path: impl AsRef<Path>) -> Result<AnyBlock> {
    let mut text = String::new();
    BufReader::new(File::open(path)?).read_to_string(&mut text)?;
    parse_block(&text)
}

fn format_entry<T: Scalar>(v: T) -> String {
    let z = v.to_complex();
    if T::IS_COMPLEX {
        format!("{:.17e}{:+.17e}i", z.re, z.im)
    } else {
        format!("{:.17e}", z.re)
    }
}

/// CSV with an optional header row of column names.
pub fn write_block_csv<T: Scalar>(b: &BlockVector<T>, header: Option<&[String]>, w: impl Write) -> Result<()> {
    let mut w = BufWriter::new(w);
    if let Some(h) = header {
        writeln!(w, "{}", h.join(","))?;
    }
    for i in 0..b.nrows() {
        let row: Vec<String> = (0..b.ncols()).map(|j| format_entry(b.get(i, j))).collect();
        writeln!(w, "{}", row.join(","))?;
    }
    w.flush()?;
    Ok(())
}
