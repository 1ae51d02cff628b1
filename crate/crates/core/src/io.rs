//! Output formatting shared by all artifacts: floats with 17 significant
//! digits and infinities as strings.

use std::io;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::error::Result;

/// Formats a float with 17 significant digits; infinities and NaN become
/// `inf`, `-inf` and `nan`.
pub fn fmt17(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.16e}")
    }
}

/// Pretty JSON formatter writing every float with 17 significant digits.
struct Pretty17<'a>(PrettyFormatter<'a>);

impl Formatter for Pretty17<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        w.write_all(format!("{v:.16e}").as_bytes())
    }
    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f32) -> io::Result<()> {
        self.write_f64(w, v as f64)
    }
    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Serializes to pretty JSON with 17-digit floats.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Pretty17(PrettyFormatter::new()));
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(out).expect("serde_json emits UTF-8"))
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    std::fs::write(path, to_json(value)? + "\n")?;
    Ok(())
}

/// Writes a header and rows of preformatted cells as CSV.
pub fn write_csv<S: AsRef<str>>(path: &Path, header: &[S], rows: &[Vec<String>]) -> Result<()> {
    write_csv_to(std::fs::File::create(path)?, header, rows)
}

/// [`write_csv`] into any writer.
pub fn write_csv_to<W: io::Write, S: AsRef<str>>(out: W, header: &[S], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header.iter().map(|h| h.as_ref()))?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ExtReal {
    Num(f64),
    Text(String),
}

impl ExtReal {
    fn from_f64(v: f64) -> Self {
        if v.is_finite() { ExtReal::Num(v) } else { ExtReal::Text(fmt17(v)) }
    }

    fn into_f64<E: serde::de::Error>(self) -> std::result::Result<f64, E> {
        match self {
            ExtReal::Num(v) => Ok(v),
            ExtReal::Text(s) => match s.as_str() {
                "-inf" => Ok(f64::NEG_INFINITY),
                "inf" => Ok(f64::INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(E::custom(format!("expected a number or \"-inf\", got {other:?}"))),
            },
        }
    }
}

/// `serde(with)` adapter for one extended real.
pub mod ext_real {
    use super::*;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
        ExtReal::from_f64(*v).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
        ExtReal::deserialize(d)?.into_f64()
    }
}

/// `serde(with)` adapter for a list of extended reals.
pub mod ext_real_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[f64], s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|&x| ExtReal::from_f64(x)))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<f64>, D::Error> {
        Vec::<ExtReal>::deserialize(d)?
            .into_iter()
            .map(ExtReal::into_f64)
            .collect()
    }
}

/// `serde(with)` adapter for optional extended reals (`null` when absent).
pub mod ext_real_opt {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
        v.map(ExtReal::from_f64).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<f64>, D::Error> {
        Option::<ExtReal>::deserialize(d)?.map(ExtReal::into_f64).transpose()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Debug, PartialEq, Serialize, Deserialize)]
    struct Sample {
        #[serde(with = "ext_real_vec")]
        values: Vec<f64>,
        #[serde(with = "ext_real")]
        one: f64,
    }

    #[test]
    fn seventeen_digits() {
        assert_eq!(fmt17(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt17(f64::NEG_INFINITY), "-inf");
        let v = std::f64::consts::PI;
        assert_eq!(fmt17(v).parse::<f64>().unwrap(), v);
    }

    #[test]
    fn json_round_trip_with_infinities() {
        let s = Sample { values: vec![f64::NEG_INFINITY, -1.5, 1.0 / 3.0], one: f64::NEG_INFINITY };
        let text = to_json(&s).unwrap();
        assert!(text.contains("\"-inf\""));
        assert!(text.contains("3.3333333333333331e-1"));
        let back: Sample = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn rejects_unknown_strings() {
        let r: std::result::Result<Sample, _> = serde_json::from_str(r#"{"values": ["x"], "one": 1}"#);
        assert!(r.is_err());
    }
}
