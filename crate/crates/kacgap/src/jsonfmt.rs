//! JSON float formatting: values are emitted with 17 significant digits so
//! every artifact round-trips bit-exactly through text.

use serde::ser::Error as _;
use serde::{Serialize, Serializer};

pub fn f17<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    if !x.is_finite() {
        return Err(S::Error::custom("non-finite value in output artifact"));
    }
    let txt = format!("{x:.16e}");
    let num: serde_json::Number = txt
        .parse()
        .map_err(|e| S::Error::custom(format!("float format: {e}")))?;
    num.serialize(s)
}

pub fn f17_opt<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(v) => f17(v, s),
        None => s.serialize_none(),
    }
}

#[cfg(test)]
mod tests {
    use serde::Serialize;

    #[derive(Serialize)]
    struct Wrapped {
        #[serde(serialize_with = "super::f17")]
        v: f64,
    }

    #[test]
    fn seventeen_digits_round_trip() {
        for &v in &[0.1, 2.0 / 3.0, -1.0 / 81.0, 1.0, 5.5555e-12, 0.0] {
            let json = serde_json::to_string(&Wrapped { v }).unwrap();
            let back: serde_json::Value = serde_json::from_str(&json).unwrap();
            let parsed = back["v"].as_f64().unwrap();
            assert_eq!(parsed.to_bits(), v.to_bits(), "json was {json}");
        }
    }
}
