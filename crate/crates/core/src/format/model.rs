//! Model files.
//!
//! ```text
//! format=ndk-svm 1
//! kernel=ndk
//! a=1.0000000000000000e0
//! c=0.0000000000000000e0
//! dim=3
//! m=2
//! b=-2.5000000000000000e-1
//! SV
//! 5.0000000000000000e-1 1:1.0000000000000000e0 3:2.0000000000000000e0
//! -5.0000000000000000e-1 2:1.0000000000000000e0
//! [precomputed]
//! ...
//! [complex_primal]
//! ...
//! ```
//!
//! Numbers use 17 significant digits so a save/load round trip is exact.
//! Optional `[section]` blocks follow the support vectors; unknown sections
//! are skipped.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::ndk_fast::{ComplexPrimalModel, NdkFastModel};
use crate::svm::SvmModel;
use crate::veccore::{ComplexVector, SparseVector};

pub const MODEL_FORMAT_VERSION: u32 = 1;
const MAGIC: &str = "ndk-svm";

#[derive(Debug, Clone, PartialEq)]
pub struct ModelFile {
    pub model: SvmModel,
    pub precomputed: Option<NdkFastModel>,
    pub primal: Option<ComplexPrimalModel>,
}

impl ModelFile {
    pub fn new(model: SvmModel) -> Self {
        ModelFile {
            model,
            precomputed: None,
            primal: None,
        }
    }
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_model<W: Write>(mut w: W, file: &ModelFile) -> Result<()> {
    let m = &file.model;
    writeln!(w, "format={MAGIC} {MODEL_FORMAT_VERSION}")?;
    for line in m.kernel().to_kv_lines() {
        writeln!(w, "{line}")?;
    }
    writeln!(w, "dim={}", m.dim())?;
    writeln!(w, "m={}", m.n_sv())?;
    writeln!(w, "b={}", num(m.bias()))?;
    writeln!(w, "SV")?;
    for (sv, c) in m.support_vectors().iter().zip(m.coeffs()) {
        write!(w, "{}", num(*c))?;
        for (i, v) in sv.iter() {
            write!(w, " {}:{}", i + 1, num(v))?;
        }
        writeln!(w)?;
    }
    if let Some(fm) = &file.precomputed {
        writeln!(w, "[precomputed]")?;
        writeln!(w, "provenance={:016x}", fm.provenance)?;
        writeln!(w, "S={}", num(fm.coeff_sum))?;
        writeln!(w, "u={}", num(fm.u))?;
        writeln!(w, "c_prime={}", num(fm.c_prime))?;
        writeln!(w, "b={}", num(fm.bias))?;
        write!(w, "z=")?;
        let mut first = true;
        for (i, v) in fm.z.iter().enumerate().filter(|(_, v)| **v != 0.0) {
            write!(w, "{}{}:{}", if first { "" } else { " " }, i + 1, num(*v))?;
            first = false;
        }
        writeln!(w)?;
    }
    if let Some(pm) = &file.primal {
        writeln!(w, "[complex_primal]")?;
        writeln!(w, "provenance={:016x}", pm.provenance)?;
        writeln!(w, "b={}", num(pm.bias))?;
        write!(w, "w=")?;
        let mut first = true;
        for (i, z) in pm.w.components().iter().enumerate() {
            if z.re == 0.0 && z.im == 0.0 {
                continue;
            }
            write!(w, "{}{}:{},{}", if first { "" } else { " " }, i + 1, num(z.re), num(z.im))?;
            first = false;
        }
        writeln!(w)?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_model(path: impl AsRef<Path>, file: &ModelFile) -> Result<()> {
    write_model(BufWriter::new(File::create(path)?), file)
}

pub fn load_model(path: impl AsRef<Path>) -> Result<ModelFile> {
    read_model(BufReader::new(File::open(path)?))
}

fn parse_f64(line: usize, raw: &str) -> Result<f64> {
    raw.trim()
        .parse()
        .map_err(|_| Error::parse(line, format!("bad number `{raw}`")))
}

fn parse_index(line: usize, raw: &str, limit: usize) -> Result<usize> {
    let idx: usize = raw
        .parse()
        .map_err(|_| Error::parse(line, format!("bad index `{raw}`")))?;
    if idx == 0 || idx > limit {
        return Err(Error::parse(line, format!("index {idx} outside 1..={limit}")));
    }
    Ok(idx - 1)
}

struct Section {
    name: String,
    first_line: usize,
    kv: HashMap<String, (usize, String)>,
}

impl Section {
    fn get(&self, key: &str) -> Result<(usize, &str)> {
        self.kv
            .get(key)
            .map(|(l, v)| (*l, v.as_str()))
            .ok_or_else(|| Error::parse(self.first_line, format!("[{}] lacks `{key}`", self.name)))
    }

    fn f64(&self, key: &str) -> Result<f64> {
        let (l, v) = self.get(key)?;
        parse_f64(l, v)
    }

    fn provenance(&self) -> Result<u64> {
        let (l, v) = self.get("provenance")?;
        u64::from_str_radix(v.trim(), 16).map_err(|_| Error::parse(l, "bad provenance"))
    }
}

pub fn read_model<R: BufRead>(reader: R) -> Result<ModelFile> {
    let lines: Vec<String> = reader.lines().collect::<std::io::Result<_>>()?;
    let mut header: HashMap<String, (usize, String)> = HashMap::new();
    let mut pos = 0;
    while pos < lines.len() {
        let line = lines[pos].trim();
        pos += 1;
        if line == "SV" {
            break;
        }
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::parse(pos, format!("expected key=value, got `{line}`")))?;
        header.insert(k.trim().to_string(), (pos, v.trim().to_string()));
    }
    let get = |key: &str| -> Result<(usize, String)> {
        header
            .get(key)
            .cloned()
            .ok_or_else(|| Error::parse(pos, format!("header lacks `{key}`")))
    };
    let (fl, format) = get("format")?;
    match format.split_once(' ') {
        Some((MAGIC, v)) if v.trim().parse::<u32>().ok() == Some(MODEL_FORMAT_VERSION) => {}
        _ => return Err(Error::parse(fl, format!("unsupported format `{format}`"))),
    }
    let kernel = KernelSpec::from_kv(|k| header.get(k).map(|(_, v)| v.clone()))?;
    let (dl, dim) = get("dim")?;
    let dim: usize = dim.parse().map_err(|_| Error::parse(dl, "bad dim"))?;
    let (ml, m) = get("m")?;
    let m: usize = m.parse().map_err(|_| Error::parse(ml, "bad m"))?;
    let (bl, b) = get("b")?;
    let bias = parse_f64(bl, &b)?;

    let mut svs = Vec::with_capacity(m);
    let mut coeffs = Vec::with_capacity(m);
    for _ in 0..m {
        let lineno = pos + 1;
        let line = lines
            .get(pos)
            .ok_or_else(|| Error::parse(lineno, format!("expected {m} support vectors")))?;
        pos += 1;
        let mut toks = line.split_whitespace();
        let coeff = parse_f64(lineno, toks.next().unwrap_or(""))?;
        let mut pairs = Vec::new();
        for tok in toks {
            let (i, v) = tok
                .split_once(':')
                .ok_or_else(|| Error::parse(lineno, format!("expected idx:val, got `{tok}`")))?;
            pairs.push((parse_index(lineno, i, dim)?, parse_f64(lineno, v)?));
        }
        svs.push(SparseVector::from_pairs(dim, pairs).map_err(|e| Error::parse(lineno, e.to_string()))?);
        coeffs.push(coeff);
    }
    let model = SvmModel::new(kernel, svs, coeffs, bias, dim)?;

    let mut sections: Vec<Section> = Vec::new();
    while pos < lines.len() {
        let line = lines[pos].trim();
        pos += 1;
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            sections.push(Section {
                name: name.to_string(),
                first_line: pos,
                kv: HashMap::new(),
            });
            continue;
        }
        let section = sections
            .last_mut()
            .ok_or_else(|| Error::parse(pos, format!("unexpected line `{line}`")))?;
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::parse(pos, format!("expected key=value, got `{line}`")))?;
        section.kv.insert(k.trim().to_string(), (pos, v.trim().to_string()));
    }

    let fingerprint = model.fingerprint();
    let check = |s: &Section| -> Result<u64> {
        let p = s.provenance()?;
        if p != fingerprint {
            return Err(Error::parse(s.first_line, format!("[{}] was built from a different model", s.name)));
        }
        Ok(p)
    };
    let mut precomputed = None;
    let mut primal = None;
    for s in &sections {
        match s.name.as_str() {
            "precomputed" => {
                let params = kernel
                    .ndk_params()
                    .ok_or_else(|| Error::parse(s.first_line, "[precomputed] needs an NDK model"))?;
                let (zl, zraw) = s.get("z")?;
                let mut z = vec![0.0; dim];
                for tok in zraw.split_whitespace() {
                    let (i, v) = tok.split_once(':').ok_or_else(|| Error::parse(zl, "bad z entry"))?;
                    z[parse_index(zl, i, dim)?] = parse_f64(zl, v)?;
                }
                precomputed = Some(NdkFastModel {
                    params,
                    coeff_sum: s.f64("S")?,
                    z,
                    u: s.f64("u")?,
                    c_prime: s.f64("c_prime")?,
                    bias: s.f64("b")?,
                    dim,
                    provenance: check(s)?,
                });
            }
            "complex_primal" => {
                let params = kernel
                    .ndk_params()
                    .ok_or_else(|| Error::parse(s.first_line, "[complex_primal] needs an NDK model"))?;
                let (wl, wraw) = s.get("w")?;
                let len = 4 * dim + 1;
                let mut w = vec![Complex64::new(0.0, 0.0); len];
                for tok in wraw.split_whitespace() {
                    let (i, v) = tok.split_once(':').ok_or_else(|| Error::parse(wl, "bad w entry"))?;
                    let (re, im) = v.split_once(',').ok_or_else(|| Error::parse(wl, "bad w entry"))?;
                    w[parse_index(wl, i, len)?] = Complex64::new(parse_f64(wl, re)?, parse_f64(wl, im)?);
                }
                primal = Some(ComplexPrimalModel::from_parts(
                    ComplexVector::from_components(w),
                    s.f64("b")?,
                    params,
                    dim,
                    check(s)?,
                )?);
            }
            _ => {}
        }
    }
    Ok(ModelFile {
        model,
        precomputed,
        primal,
    })
}
