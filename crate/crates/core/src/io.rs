//! JSON documents: parsing into library types and report serialization.
//!
//! Every real accepts a JSON number, an exact `[num, den]` pair (integers or
//! digit strings), or a bare integer string. Floats become the exact rational
//! of their binary value.

use std::io::{self, Write};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::{json, Map, Value};

use crate::bridge::DegenerationFamily;
use crate::dense::Dense;
use crate::error::{Error, Result};
use crate::field::{rational_from_f64, Field, Rational};
use crate::lattices::{gram_from_probes, LengthFunction, MarkedLattice, Order, ProbeTable};
use crate::matk::MatK;
use crate::octo::HermitianOct;
use crate::scalars::{Algebra, Scalar};
use crate::strata::SymplecticSplitting;
use crate::symplectic::SymplecticLattice;

fn schema(msg: impl Into<String>) -> Error {
    Error::Schema(msg.into())
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key)
        .ok_or_else(|| schema(format!("missing field {key:?}")))
}

fn array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array()
        .ok_or_else(|| schema(format!("{what} must be an array")))
}

pub fn usize_of(v: &Value, what: &str) -> Result<usize> {
    v.as_u64()
        .map(|n| n as usize)
        .ok_or_else(|| schema(format!("{what} must be a nonnegative integer")))
}

fn bigint(v: &Value) -> Result<BigInt> {
    if let Some(n) = v.as_i64() {
        return Ok(BigInt::from(n));
    }
    if let Some(n) = v.as_u64() {
        return Ok(BigInt::from(n));
    }
    if let Some(s) = v.as_str() {
        return BigInt::from_str(s).map_err(|_| schema(format!("bad integer {s:?}")));
    }
    Err(schema(format!("expected an integer, got {v}")))
}

pub fn parse_rational(v: &Value) -> Result<Rational> {
    match v {
        Value::Array(pair) if pair.len() == 2 => {
            let (n, d) = (bigint(&pair[0])?, bigint(&pair[1])?);
            if d.is_zero() {
                return Err(schema("zero denominator"));
            }
            Ok(Rational::new(n, d))
        }
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                return Ok(Rational::from_integer(i.into()));
            }
            let x = n.as_f64().ok_or_else(|| schema("unrepresentable number"))?;
            rational_from_f64(x).ok_or_else(|| schema("non-finite number"))
        }
        Value::String(_) => Ok(Rational::from_integer(bigint(v)?)),
        _ => Err(schema(format!("expected a real, got {v}"))),
    }
}

pub fn parse_f64(v: &Value) -> Result<f64> {
    Ok(Field::to_f64(&parse_rational(v)?))
}

pub fn parse_reals(v: &Value, what: &str) -> Result<Vec<Rational>> {
    array(v, what)?.iter().map(parse_rational).collect()
}

pub fn parse_algebra(v: &Value) -> Result<Algebra> {
    Algebra::from_tag(v.as_str().ok_or_else(|| schema("algebra must be a tag"))?)
}

/// `{"algebra", "coords", "exact"?}`; a bare real is accepted where the algebra is known.
pub fn parse_scalar(v: &Value, expected: Option<Algebra>) -> Result<Scalar<Rational>> {
    if !v.is_object() {
        let k = expected.ok_or_else(|| schema("scalar needs an algebra tag"))?;
        return Ok(Scalar::real(k, parse_rational(v)?));
    }
    let k = parse_algebra(field(v, "algebra")?)?;
    if let Some(e) = expected {
        if e != k {
            return Err(Error::TagMismatch { left: e, right: k });
        }
    }
    let coords = match v.get("exact") {
        Some(exact) => parse_reals(exact, "exact")?,
        None => parse_reals(field(v, "coords")?, "coords")?,
    };
    Scalar::new(k, coords)
}

/// `{"algebra", "m", "entries"}` with row-major entries.
pub fn parse_matrix(v: &Value) -> Result<MatK<Rational>> {
    let k = parse_algebra(field(v, "algebra")?)?;
    let m = usize_of(field(v, "m")?, "m")?;
    let entries = array(field(v, "entries")?, "entries")?
        .iter()
        .map(|e| parse_scalar(e, Some(k)))
        .collect::<Result<_>>()?;
    MatK::new(k, m, entries)
}

pub fn parse_matrix_f64(v: &Value) -> Result<MatK> {
    Ok(parse_matrix(v)?.to_f64())
}

/// A plain 2-D array of reals.
pub fn parse_dense(v: &Value) -> Result<Dense<Rational>> {
    let rows = array(v, "matrix")?
        .iter()
        .map(|r| parse_reals(r, "matrix row"))
        .collect::<Result<Vec<_>>>()?;
    let cols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != cols) {
        return Err(schema("ragged matrix"));
    }
    Ok(Dense::from_rows(rows))
}

/// An order by name or `{"name"?, "algebra", "basis": [scalar]}`.
pub fn parse_order(v: &Value) -> Result<Order> {
    if let Some(name) = v.as_str() {
        return Order::named(name);
    }
    let k = parse_algebra(field(v, "algebra")?)?;
    let basis = array(field(v, "basis")?, "basis")?
        .iter()
        .map(|b| parse_scalar(b, Some(k)))
        .collect::<Result<_>>()?;
    let name = v.get("name").and_then(Value::as_str).unwrap_or("custom");
    Order::new(name, k, basis)
}

/// `{"order", "m", "f"}`.
pub fn parse_lattice(v: &Value) -> Result<MarkedLattice> {
    let f = parse_matrix_f64(field(v, "f")?)?;
    let order = match v.get("order") {
        Some(o) => parse_order(o)?,
        None => Order::default_for(f.algebra()),
    };
    if let Some(m) = v.get("m") {
        let m = usize_of(m, "m")?;
        if m != f.size() {
            return Err(Error::SizeMismatch {
                expected: m,
                got: f.size(),
            });
        }
    }
    MarkedLattice::new(order, f)
}

/// `{"gram"}` or `{"probes": [{"u", "value"}], "order", "m"}`.
pub fn parse_length(v: &Value, tol: f64) -> Result<LengthFunction> {
    if let Some(g) = v.get("gram") {
        return Ok(LengthFunction::new(parse_matrix_f64(g)?));
    }
    let probes = array(field(v, "probes")?, "probes")?;
    let order = match v.get("order") {
        Some(o) => parse_order(o)?,
        None => Order::named("Z")?,
    };
    let m = usize_of(field(v, "m")?, "m")?;
    let entries = probes
        .iter()
        .map(|p| {
            let u = array(field(p, "u")?, "u")?
                .iter()
                .map(|x| {
                    x.as_i64()
                        .ok_or_else(|| schema("probe coordinates must be integers"))
                })
                .collect::<Result<Vec<i64>>>()?;
            Ok((u, parse_f64(field(p, "value")?)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let table = ProbeTable::from_lengths(entries);
    Ok(LengthFunction::new(gram_from_probes(
        &table, &order, m, tol,
    )?))
}

/// Families: `explicit`, `diag-power`, `regularized`.
pub fn parse_family(v: &Value) -> Result<DegenerationFamily> {
    let kind = field(v, "kind")?
        .as_str()
        .ok_or_else(|| schema("kind must be a string"))?;
    let reals = |key: &str| -> Result<Vec<f64>> {
        Ok(parse_reals(field(v, key)?, key)?
            .iter()
            .map(Field::to_f64)
            .collect())
    };
    match kind {
        "explicit" => Ok(DegenerationFamily::Explicit(
            array(field(v, "samples")?, "samples")?
                .iter()
                .map(parse_matrix_f64)
                .collect::<Result<_>>()?,
        )),
        "diag-power" => Ok(DegenerationFamily::DiagPower {
            algebra: match v.get("algebra") {
                Some(a) => parse_algebra(a)?,
                None => Algebra::R,
            },
            base: reals("base")?,
            exponents: reals("exponents")?,
            t: reals("t")?,
        }),
        "regularized" => Ok(DegenerationFamily::Regularized {
            a: parse_matrix_f64(field(v, "a")?)?,
            n: array(field(v, "n")?, "n")?
                .iter()
                .map(|x| {
                    x.as_u64()
                        .ok_or_else(|| schema("n must be nonnegative integers"))
                })
                .collect::<Result<_>>()?,
        }),
        other => Err(schema(format!("unknown family kind {other:?}"))),
    }
}

/// `{"g", "A"}` with `A` a 2-D array of reals.
pub fn parse_symplectic(v: &Value) -> Result<SymplecticLattice> {
    let g = usize_of(field(v, "g")?, "g")?;
    SymplecticLattice::new(g, parse_dense(field(v, "A")?)?)
}

/// `{"m", "diag", "off"}`.
pub fn parse_octo(v: &Value) -> Result<HermitianOct> {
    let m = usize_of(field(v, "m")?, "m")?;
    let diag: Vec<f64> = parse_reals(field(v, "diag")?, "diag")?
        .iter()
        .map(Field::to_f64)
        .collect();
    let off: Vec<Scalar> = array(field(v, "off")?, "off")?
        .iter()
        .map(|x| Ok(parse_scalar(x, Some(Algebra::O))?.to_f64()))
        .collect::<Result<_>>()?;
    let h = HermitianOct::new(diag, off)?;
    if h.size() != m {
        return Err(Error::SizeMismatch {
            expected: m,
            got: h.size(),
        });
    }
    Ok(h)
}

/// `{"g", "blocks", "basis"?}`.
pub fn parse_splitting(v: &Value) -> Result<SymplecticSplitting> {
    let g = usize_of(field(v, "g")?, "g")?;
    let blocks = array(field(v, "blocks")?, "blocks")?
        .iter()
        .map(|b| {
            array(b, "block")?
                .iter()
                .map(|i| usize_of(i, "block index"))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let basis = v.get("basis").map(parse_dense).transpose()?;
    SymplecticSplitting::new(g, blocks, basis)
}

// ---- output ----

pub fn rational_json(r: &Rational) -> Value {
    let part = |n: &BigInt| match n.to_i64() {
        Some(i) => json!(i),
        None => json!(n.to_string()),
    };
    json!([part(r.numer()), part(r.denom())])
}

/// Exact rationals print as integers when integral, otherwise `[num, den]`.
pub fn exact_json(r: &Rational) -> Value {
    if r.denom().is_one() {
        match r.numer().to_i64() {
            Some(i) => json!(i),
            None => json!(r.numer().to_string()),
        }
    } else {
        rational_json(r)
    }
}

pub fn dense_json(m: &Dense<Rational>) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|i| Value::Array((0..m.cols()).map(|j| exact_json(&m[(i, j)])).collect()))
            .collect(),
    )
}

pub fn dense_f64_json(m: &Dense<f64>) -> Value {
    json!(m.to_rows())
}

pub fn scalar_json(x: &Scalar) -> Value {
    if x.algebra() == Algebra::R {
        return json!(x.coords()[0]);
    }
    json!({"algebra": x.algebra().tag(), "coords": x.coords()})
}

pub fn matrix_json(m: &MatK) -> Value {
    json!({
        "algebra": m.algebra().tag(),
        "m": m.size(),
        "entries": m.entries().iter().map(scalar_json).collect::<Vec<_>>(),
    })
}

pub fn exact_matrix_json(m: &MatK<Rational>) -> Value {
    let entry = |x: &Scalar<Rational>| {
        if x.algebra() == Algebra::R {
            exact_json(&x.coords()[0])
        } else {
            json!({
                "algebra": x.algebra().tag(),
                "coords": x.coords().iter().map(Field::to_f64).collect::<Vec<_>>(),
                "exact": x.coords().iter().map(rational_json).collect::<Vec<_>>(),
            })
        }
    };
    json!({
        "algebra": m.algebra().tag(),
        "m": m.size(),
        "entries": m.entries().iter().map(entry).collect::<Vec<_>>(),
    })
}

pub fn splitting_json(s: &SymplecticSplitting) -> Value {
    let mut map = Map::new();
    map.insert("g".into(), json!(s.genus()));
    map.insert("blocks".into(), json!(s.blocks()));
    if *s.basis() != Dense::identity(2 * s.genus()) {
        map.insert("basis".into(), dense_json(s.basis()));
    }
    Value::Object(map)
}

/// Pretty printer writing floats with 17 significant digits.
struct SeventeenDigits(PrettyFormatter<'static>);

macro_rules! delegate {
    ($($name:ident$(($arg:ident: $ty:ty))?),* $(,)?) => {
        $(fn $name<W: ?Sized + Write>(&mut self, w: &mut W $(, $arg: $ty)?) -> io::Result<()> {
            self.0.$name(w $(, $arg)?)
        })*
    };
}

impl Formatter for SeventeenDigits {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        if value == 0.0 {
            return w.write_all(if value.is_sign_negative() {
                b"-0.0"
            } else {
                b"0.0"
            });
        }
        write!(w, "{value:.16e}")
    }

    delegate!(
        begin_array,
        end_array,
        begin_array_value(first: bool),
        end_array_value,
        begin_object,
        end_object,
        begin_object_key(first: bool),
        end_object_key,
        begin_object_value,
        end_object_value,
    );
}

pub fn to_string(v: &impl Serialize) -> String {
    let mut out = Vec::new();
    let mut ser =
        serde_json::Serializer::with_formatter(&mut out, SeventeenDigits(PrettyFormatter::new()));
    v.serialize(&mut ser).expect("serializing into memory");
    out.push(b'\n');
    String::from_utf8(out).expect("JSON is UTF-8")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::rational;

    #[test]
    fn reals_in_all_forms() {
        assert_eq!(parse_rational(&json!(3)).unwrap(), rational(3, 1));
        assert_eq!(parse_rational(&json!([1, 2])).unwrap(), rational(1, 2));
        assert_eq!(parse_rational(&json!(0.25)).unwrap(), rational(1, 4));
        assert_eq!(
            parse_rational(&json!(["-7", "3"])).unwrap(),
            rational(-7, 3)
        );
        assert!(parse_rational(&json!([1, 0])).is_err());
        assert!(parse_rational(&json!("x")).is_err());
    }

    #[test]
    fn matrix_round_trip() {
        let doc = json!({"algebra": "H", "m": 2, "entries": [
            1, {"algebra": "H", "coords": [0, 1, 0, 0]},
            {"algebra": "H", "coords": [0, -1, 0, 0], "exact": [[0,1],[-1,1],[0,1],[0,1]]}, [1, 3]
        ]});
        let m = parse_matrix(&doc).unwrap();
        assert_eq!(m.get(1, 1).coords()[0], rational(1, 3));
        let back = parse_matrix(&exact_matrix_json(&m)).unwrap();
        assert_eq!(back, m);
        let f = m.to_f64();
        assert_eq!(
            parse_matrix_f64(&serde_json::from_str(&to_string(&matrix_json(&f))).unwrap()).unwrap(),
            f
        );
    }

    #[test]
    fn wrong_tag_is_rejected() {
        let doc =
            json!({"algebra": "C", "m": 1, "entries": [{"algebra": "H", "coords": [1,0,0,0]}]});
        assert!(matches!(parse_matrix(&doc), Err(Error::TagMismatch { .. })));
    }

    #[test]
    fn floats_print_seventeen_digits() {
        assert_eq!(to_string(&json!(0.1)).trim(), "1.0000000000000001e-1");
        assert_eq!(to_string(&json!([1.0])), "[\n  1.0000000000000000e0\n]\n");
        let x: f64 = 2.0f64.sqrt();
        let back: f64 = serde_json::from_str(to_string(&json!(x)).trim()).unwrap();
        assert_eq!(back, x);
    }

    #[test]
    fn documents_parse() {
        let fam =
            json!({"kind": "diag-power", "base": [1, 1], "exponents": [1, -1], "t": [10, 100]});
        assert!(matches!(
            parse_family(&fam).unwrap(),
            DegenerationFamily::DiagPower { .. }
        ));
        let lat = json!({"g": 1, "A": [[2, 0], [0, [1, 2]]]});
        assert_eq!(parse_symplectic(&lat).unwrap().genus(), 1);
        let s = json!({"g": 2, "blocks": [[0, 2], [1, 3]]});
        assert_eq!(splitting_json(&parse_splitting(&s).unwrap()), s);
        let probes = json!({"order": "Z", "m": 2, "probes": [
            {"u": [1, 0], "value": 1}, {"u": [0, 1], "value": 2},
            {"u": [1, 1], "value": 5.0f64.sqrt()}, {"u": [1, -1], "value": 5.0f64.sqrt()}
        ]});
        let l = parse_length(&probes, 1e-9).unwrap();
        assert!((l.gram().get(1, 1).re() - 4.0).abs() < 1e-12);
        let o =
            json!({"m": 2, "diag": [1, 2], "off": [{"algebra": "O", "coords": [0,0,0,0,0,0,0,1]}]});
        assert_eq!(parse_octo(&o).unwrap().det(), 1.0);
    }
}
