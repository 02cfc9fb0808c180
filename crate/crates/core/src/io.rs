//! JSON-lines record files: one header line followed by one line per
//! eigenvalue. Floating-point fields are written as C99 hex floats
//! (`%a` style) so a file round-trips bit for bit.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::mc::{Campaign, SpectralDatum};
use crate::theory::{ComplexPoint, EnsembleKind};

pub const RECORD_FORMAT: &str = "ginibre-records";
pub const RECORD_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("inconsistent record file: {0}")]
    Invalid(String),
}

/// Formats `x` as a hex float, e.g. `0x1.8p+1` for 3, `-0x0p+0` for −0.
pub fn format_hex(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let bits = x.to_bits();
    let sign = if bits >> 63 == 1 { "-" } else { "" };
    let biased = ((bits >> 52) & 0x7ff) as i64;
    let mantissa = bits & ((1u64 << 52) - 1);
    if biased == 0 && mantissa == 0 {
        return format!("{sign}0x0p+0");
    }
    let (lead, exp) = if biased == 0 { (0, -1022) } else { (1, biased - 1023) };
    let digits = format!("{mantissa:013x}");
    let digits = digits.trim_end_matches('0');
    let esign = if exp >= 0 { "+" } else { "-" };
    if digits.is_empty() {
        format!("{sign}0x{lead}p{esign}{}", exp.abs())
    } else {
        format!("{sign}0x{lead}.{digits}p{esign}{}", exp.abs())
    }
}

/// Parses the hex floats written by [`format_hex`].
pub fn parse_hex(s: &str) -> Result<f64, String> {
    match s {
        "nan" => return Ok(f64::NAN),
        "inf" => return Ok(f64::INFINITY),
        "-inf" => return Ok(f64::NEG_INFINITY),
        _ => {}
    }
    let err = || format!("malformed hex float '{s}'");
    let (negative, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let body = body.strip_prefix("0x").ok_or_else(err)?;
    let (mant, exp) = body.split_once('p').ok_or_else(err)?;
    let exp: i64 = exp.parse().map_err(|_| err())?;
    let (lead, frac) = match mant.split_once('.') {
        Some((l, f)) => (l, f),
        None => (mant, ""),
    };
    if frac.len() > 13 || !frac.bytes().all(|b| b.is_ascii_hexdigit()) {
        return Err(err());
    }
    let frac_bits = if frac.is_empty() { 0 } else { u64::from_str_radix(frac, 16).map_err(|_| err())? << (4 * (13 - frac.len())) };
    let sign_bit = (negative as u64) << 63;
    let bits = match lead {
        "1" if (-1022..=1023).contains(&exp) => (((exp + 1023) as u64) << 52) | frac_bits,
        "0" if frac_bits == 0 && exp == 0 => 0,
        "0" if exp == -1022 && frac_bits != 0 => frac_bits,
        _ => return Err(err()),
    };
    Ok(f64::from_bits(sign_bit | bits))
}

/// `f64` serialized as a hex-float string.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HexF64(pub f64);

impl Serialize for HexF64 {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&format_hex(self.0))
    }
}

impl<'de> Deserialize<'de> for HexF64 {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        parse_hex(&s).map(HexF64).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecordHeader {
    pub format: String,
    pub version: u32,
    pub ensemble: EnsembleKind,
    pub n: usize,
    pub master_seed: u64,
    /// Number of matrices drawn.
    pub samples: usize,
    pub rejections: usize,
    pub rejected_samples: Vec<u64>,
    pub reject_threshold: HexF64,
    pub generator: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
struct RecordRow {
    sample: u64,
    eigen: usize,
    re: HexF64,
    im: HexF64,
    overlap: HexF64,
    real: bool,
}

impl From<&SpectralDatum> for RecordRow {
    fn from(d: &SpectralDatum) -> Self {
        Self {
            sample: d.sample_index,
            eigen: d.eigen_index,
            re: HexF64(d.z.re),
            im: HexF64(d.z.im),
            overlap: HexF64(d.self_overlap),
            real: d.is_real,
        }
    }
}

impl From<RecordRow> for SpectralDatum {
    fn from(r: RecordRow) -> Self {
        Self {
            z: ComplexPoint::new(r.re.0, r.im.0),
            self_overlap: r.overlap.0,
            is_real: r.real,
            sample_index: r.sample,
            eigen_index: r.eigen,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RecordFile {
    pub header: RecordHeader,
    pub records: Vec<SpectralDatum>,
}

pub fn generator_id() -> String {
    format!("ginibre-core {}", env!("CARGO_PKG_VERSION"))
}

impl RecordFile {
    pub fn from_campaign(campaign: &Campaign) -> Self {
        let c = &campaign.config;
        Self {
            header: RecordHeader {
                format: RECORD_FORMAT.into(),
                version: RECORD_VERSION,
                ensemble: c.kind,
                n: c.n,
                master_seed: c.master_seed,
                samples: c.samples,
                rejections: campaign.rejections.len(),
                rejected_samples: campaign.rejections.iter().map(|r| r.sample_index).collect(),
                reject_threshold: HexF64(c.reject_threshold),
                generator: generator_id(),
            },
            records: campaign.records.clone(),
        }
    }

    /// Number of matrices that contributed records.
    pub fn accepted_samples(&self) -> usize {
        self.header.samples - self.header.rejections
    }

    /// Checks the header against the rows.
    pub fn validate(&self) -> Result<(), IoError> {
        let h = &self.header;
        if h.format != RECORD_FORMAT || h.version != RECORD_VERSION {
            return Err(IoError::Invalid(format!("unsupported format {} v{}", h.format, h.version)));
        }
        if h.rejections != h.rejected_samples.len() || h.rejections > h.samples {
            return Err(IoError::Invalid("rejection count does not match the rejected sample list".into()));
        }
        let distinct: BTreeSet<u64> = self.records.iter().map(|r| r.sample_index).collect();
        if distinct.len() != self.accepted_samples() {
            return Err(IoError::Invalid(format!(
                "{} distinct samples present, header promises {}",
                distinct.len(),
                self.accepted_samples()
            )));
        }
        if self.records.len() != h.n * distinct.len() {
            return Err(IoError::Invalid(format!("{} rows for {} samples of size {}", self.records.len(), distinct.len(), h.n)));
        }
        Ok(())
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<(), IoError> {
        serde_json::to_writer(&mut w, &self.header).map_err(std::io::Error::from)?;
        w.write_all(b"\n")?;
        for d in &self.records {
            serde_json::to_writer(&mut w, &RecordRow::from(d)).map_err(std::io::Error::from)?;
            w.write_all(b"\n")?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_from<R: BufRead>(r: R) -> Result<Self, IoError> {
        let mut lines = r.lines();
        let first = lines.next().ok_or(IoError::Parse { line: 1, message: "empty file".into() })??;
        let header: RecordHeader =
            serde_json::from_str(&first).map_err(|e| IoError::Parse { line: 1, message: e.to_string() })?;
        let mut records = Vec::new();
        for (k, line) in lines.enumerate() {
            let line = line?;
            if line.is_empty() {
                continue;
            }
            let row: RecordRow =
                serde_json::from_str(&line).map_err(|e| IoError::Parse { line: k + 2, message: e.to_string() })?;
            records.push(row.into());
        }
        let file = Self { header, records };
        file.validate()?;
        Ok(file)
    }

    pub fn save(&self, path: &Path) -> Result<(), IoError> {
        self.write_to(BufWriter::new(File::create(path)?))
    }

    pub fn load(path: &Path) -> Result<Self, IoError> {
        Self::read_from(BufReader::new(File::open(path)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mc::{run_campaign, EnsembleConfig};
    use proptest::prelude::*;

    #[test]
    fn hex_examples() {
        assert_eq!(format_hex(3.0), "0x1.8p+1");
        assert_eq!(format_hex(1.0), "0x1p+0");
        assert_eq!(format_hex(-0.0), "-0x0p+0");
        assert_eq!(format_hex(0.1), "0x1.999999999999ap-4");
        assert_eq!(format_hex(f64::MIN_POSITIVE / 4.0), "0x0.4p-1022");
        assert_eq!(parse_hex("0x1.999999999999ap-4").unwrap(), 0.1);
        assert!(parse_hex("0x2p+0").is_err());
        assert!(parse_hex("1.5").is_err());
        assert!(parse_hex("0x1.gp+0").is_err());
    }

    proptest! {
        #[test]
        fn hex_round_trips_every_bit_pattern(bits in any::<u64>()) {
            let x = f64::from_bits(bits);
            let back = parse_hex(&format_hex(x)).unwrap();
            if x.is_nan() {
                prop_assert!(back.is_nan());
            } else {
                prop_assert_eq!(back.to_bits(), bits);
            }
        }
    }

    #[test]
    fn record_file_round_trips_byte_for_byte() {
        let campaign = run_campaign(&EnsembleConfig::new(EnsembleKind::GinOE, 7, 40, 3)).unwrap();
        let file = RecordFile::from_campaign(&campaign);
        file.validate().unwrap();
        let mut first = Vec::new();
        file.write_to(&mut first).unwrap();
        let back = RecordFile::read_from(first.as_slice()).unwrap();
        assert_eq!(back, file);
        let mut second = Vec::new();
        back.write_to(&mut second).unwrap();
        assert_eq!(first, second);
    }

    #[test]
    fn inconsistent_header_is_rejected() {
        let campaign = run_campaign(&EnsembleConfig::new(EnsembleKind::GinUE, 4, 5, 1)).unwrap();
        let mut file = RecordFile::from_campaign(&campaign);
        file.header.samples = 6;
        let mut buf = Vec::new();
        file.write_to(&mut buf).unwrap();
        assert!(matches!(RecordFile::read_from(buf.as_slice()), Err(IoError::Invalid(_))));
        assert!(matches!(RecordFile::read_from(&b"{not json"[..]), Err(IoError::Parse { line: 1, .. })));
    }
}
