//! JSON input documents and round-trip-exact number formatting.

use std::io::{self, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::ser::{CompactFormatter, Formatter, PrettyFormatter};

use crate::core::{BasisLabel, FamilyTag, MetricTensor, ToleranceConfig};
use crate::error::{Error, Result};
use crate::linalg::mat;

/// `{"family": "GI" | {"Gc": c}, "basis": ..., "metric": [[..],[..],[..]],
/// "tolerance": {...}?}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputDocument {
    pub family: FamilyTag,
    pub basis: BasisLabel,
    pub metric: [[f64; 3]; 3],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<ToleranceConfig>,
}

impl InputDocument {
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::Parse { path, message: e.into_inner().to_string() }
        })
    }

    /// Reads from a file, or from stdin when `path` is `-`.
    pub fn read(path: &Path) -> Result<Self> {
        let text = if path.as_os_str() == "-" {
            io::read_to_string(io::stdin())?
        } else {
            std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?
        };
        Self::from_json(&text)
    }

    /// Document tolerances, else `LORCURV_TOL`, else defaults.
    pub fn tolerance(&self) -> Result<ToleranceConfig> {
        match self.tolerance {
            Some(t) => t.validate(),
            None => ToleranceConfig::from_env(),
        }
    }

    pub fn family(&self) -> Result<FamilyTag> {
        self.family.validate()
    }

    pub fn metric_tensor(&self) -> Result<MetricTensor> {
        MetricTensor::new(mat(self.metric), self.basis, self.tolerance()?)
    }
}

/// Shortest form of `x` printed with 17 significant digits: positional
/// for decimal exponents in [−5, 16], scientific otherwise. Non-finite
/// values give `null`.
pub fn format_f64(x: f64) -> String {
    if !x.is_finite() {
        return "null".into();
    }
    if x == 0.0 {
        return "0".into();
    }
    let s = format!("{:.16e}", x);
    let (mant, exp) = s.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent");
    let (sign, mant) = mant.strip_prefix('-').map_or(("", mant), |m| ("-", m));
    let digits: String = mant.chars().filter(|c| *c != '.').collect();
    let digits = digits.trim_end_matches('0');
    let out = if (-5..=16).contains(&exp) {
        if exp < 0 {
            format!("0.{}{}", "0".repeat((-exp - 1) as usize), digits)
        } else {
            let e = exp as usize + 1;
            if digits.len() <= e {
                format!("{}{}", digits, "0".repeat(e - digits.len()))
            } else {
                format!("{}.{}", &digits[..e], &digits[e..])
            }
        }
    } else {
        let tail = &digits[1..];
        if tail.is_empty() {
            format!("{}e{}", &digits[..1], exp)
        } else {
            format!("{}.{}e{}", &digits[..1], tail, exp)
        }
    };
    format!("{sign}{out}")
}

/// Wraps a serde_json formatter, writing floats with [`format_f64`].
pub struct Digits17<F>(pub F);

macro_rules! delegate {
    ($($name:ident),*) => {$(
        fn $name<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
            self.0.$name(w)
        }
    )*};
}

impl<F: Formatter> Formatter for Digits17<F> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        w.write_all(format_f64(v).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, v: f32) -> io::Result<()> {
        self.write_f64(w, v as f64)
    }

    delegate!(begin_array, end_array, begin_object, end_object, end_array_value, end_object_value);

    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
}

fn serialize_with<T: Serialize + ?Sized, F: Formatter>(value: &T, f: F) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Digits17(f));
    value
        .serialize(&mut ser)
        .map_err(|e| Error::Internal(format!("serialisation failed: {e}")))?;
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

/// Compact JSON with 17-significant-digit numbers.
pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    serialize_with(value, CompactFormatter)
}

/// Indented JSON with 17-significant-digit numbers.
pub fn to_json_string_pretty<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    serialize_with(value, PrettyFormatter::new())
}
