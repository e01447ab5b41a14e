//! Dynamically typed values, the FFI-stable register cell, and the total
//! comparison order shared by every execution path.

use std::cmp::Ordering;

/// A value as seen by callers: table cells, query results.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Null,
    Int(i64),
    Real(f64),
    Text(String),
}

impl Value {
    pub fn type_name(&self) -> &'static str {
        match self {
            Value::Null => "null",
            Value::Int(_) => "int",
            Value::Real(_) => "real",
            Value::Text(_) => "text",
        }
    }
}

impl std::fmt::Display for Value {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Value::Null => Ok(()),
            Value::Int(v) => write!(f, "{v}"),
            Value::Real(v) => write!(f, "{v}"),
            Value::Text(s) => f.write_str(s),
        }
    }
}

pub const TAG_NULL: u32 = 0;
pub const TAG_INT: u32 = 1;
pub const TAG_REAL: u32 = 2;
pub const TAG_TEXT: u32 = 3;

/// One register cell. Layout mirrors the C `QjitCell` the generated
/// templates operate on: tag, text length, and an 8-byte payload that holds
/// the integer, the float bits, or a borrowed text pointer.
///
/// Text payloads borrow from the database's table storage, which outlives
/// any run; cells never own memory, so copies are plain bit copies in both
/// Rust and generated code.
#[repr(C)]
#[derive(Clone, Copy)]
pub struct Mem {
    pub tag: u32,
    pub len: u32,
    pub payload: u64,
}

impl Mem {
    pub fn null() -> Mem {
        Mem { tag: TAG_NULL, len: 0, payload: 0 }
    }

    pub fn from_int(v: i64) -> Mem {
        Mem { tag: TAG_INT, len: 0, payload: v as u64 }
    }

    pub fn from_real(v: f64) -> Mem {
        Mem { tag: TAG_REAL, len: 0, payload: v.to_bits() }
    }

    /// Borrows the text; the referent must outlive every use of the cell.
    pub fn from_text(s: &str) -> Mem {
        let ptr = if s.is_empty() {
            std::ptr::NonNull::<u8>::dangling().as_ptr() as u64
        } else {
            s.as_ptr() as u64
        };
        Mem { tag: TAG_TEXT, len: s.len() as u32, payload: ptr }
    }

    pub fn from_value(v: &Value) -> Mem {
        match v {
            Value::Null => Mem::null(),
            Value::Int(i) => Mem::from_int(*i),
            Value::Real(r) => Mem::from_real(*r),
            Value::Text(s) => Mem::from_text(s),
        }
    }

    pub fn as_int(&self) -> i64 {
        self.payload as i64
    }

    pub fn as_real(&self) -> f64 {
        f64::from_bits(self.payload)
    }

    fn as_text(&self) -> &[u8] {
        if self.len == 0 {
            &[]
        } else {
            // Valid by the borrowing contract of `from_text`.
            unsafe { std::slice::from_raw_parts(self.payload as *const u8, self.len as usize) }
        }
    }

    pub fn to_value(&self) -> Value {
        match self.tag {
            TAG_INT => Value::Int(self.as_int()),
            TAG_REAL => Value::Real(self.as_real()),
            TAG_TEXT => Value::Text(String::from_utf8_lossy(self.as_text()).into_owned()),
            _ => Value::Null,
        }
    }
}

enum Scalar<'a> {
    Null,
    Int(i64),
    Real(f64),
    Text(&'a [u8]),
}

impl Value {
    fn scalar(&self) -> Scalar<'_> {
        match self {
            Value::Null => Scalar::Null,
            Value::Int(i) => Scalar::Int(*i),
            Value::Real(r) => Scalar::Real(*r),
            Value::Text(s) => Scalar::Text(s.as_bytes()),
        }
    }
}

impl Mem {
    fn scalar(&self) -> Scalar<'_> {
        match self.tag {
            TAG_INT => Scalar::Int(self.as_int()),
            TAG_REAL => Scalar::Real(self.as_real()),
            TAG_TEXT => Scalar::Text(self.as_text()),
            _ => Scalar::Null,
        }
    }
}

/// Total order over values. Cross-type rule: Null sorts below all numerics,
/// numerics below Text. Int and Real compare numerically; Text compares by
/// byte order. Null equals Null.
pub fn compare_values(a: &Value, b: &Value) -> Ordering {
    order_scalar(a.scalar(), b.scalar())
}

/// The same order over register cells; this is the single comparison
/// routine behind the interpreter bodies and the generated code's `cmp_fn`.
pub fn cmp_mem(a: &Mem, b: &Mem) -> i32 {
    match order_scalar(a.scalar(), b.scalar()) {
        Ordering::Less => -1,
        Ordering::Equal => 0,
        Ordering::Greater => 1,
    }
}

fn rank(s: &Scalar<'_>) -> u8 {
    match s {
        Scalar::Null => 0,
        Scalar::Int(_) | Scalar::Real(_) => 1,
        Scalar::Text(_) => 2,
    }
}

fn order_scalar(a: Scalar<'_>, b: Scalar<'_>) -> Ordering {
    let (ra, rb) = (rank(&a), rank(&b));
    if ra != rb {
        return ra.cmp(&rb);
    }
    match (a, b) {
        (Scalar::Null, Scalar::Null) => Ordering::Equal,
        (Scalar::Int(x), Scalar::Int(y)) => x.cmp(&y),
        (Scalar::Real(x), Scalar::Real(y)) => x.total_cmp(&y),
        (Scalar::Int(x), Scalar::Real(y)) => cmp_int_real(x, y),
        (Scalar::Real(x), Scalar::Int(y)) => cmp_int_real(y, x).reverse(),
        (Scalar::Text(x), Scalar::Text(y)) => x.cmp(y),
        _ => unreachable!("rank already matched"),
    }
}

/// Numeric comparison of an integer against a float, kept exact at the
/// edges where widening to f64 loses precision so the order stays total.
/// Reals order internally by `total_cmp`; integers sit at the position of
/// their exact value, colliding with +0.0 rather than -0.0 at zero.
fn cmp_int_real(i: i64, r: f64) -> Ordering {
    if r.is_nan() {
        // total_cmp places negative NaNs below -inf and positive above +inf.
        return if r.is_sign_negative() { Ordering::Greater } else { Ordering::Less };
    }
    const TWO_POW_63: f64 = 9_223_372_036_854_775_808.0;
    if r >= TWO_POW_63 {
        return Ordering::Less;
    }
    if r < -TWO_POW_63 {
        return Ordering::Greater;
    }
    let trunc = r.trunc();
    let k = trunc as i64;
    if i != k {
        return i.cmp(&k);
    }
    let frac = r - trunc;
    if frac > 0.0 {
        Ordering::Less
    } else if frac < 0.0 {
        Ordering::Greater
    } else if i == 0 && r.is_sign_negative() {
        Ordering::Greater
    } else {
        Ordering::Equal
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reflexive_int() {
        assert_eq!(compare_values(&Value::Int(5), &Value::Int(5)), Ordering::Equal);
    }

    #[test]
    fn null_below_numerics() {
        assert_eq!(compare_values(&Value::Null, &Value::Int(0)), Ordering::Less);
        assert_eq!(compare_values(&Value::Null, &Value::Null), Ordering::Equal);
    }

    #[test]
    fn int_vs_real_widened() {
        assert_eq!(compare_values(&Value::Int(2), &Value::Real(2.5)), Ordering::Less);
        assert_eq!(compare_values(&Value::Real(2.5), &Value::Int(3)), Ordering::Less);
        assert_eq!(compare_values(&Value::Int(2), &Value::Real(2.0)), Ordering::Equal);
    }

    #[test]
    fn int_vs_real_matches_widened_oracle_on_small_values() {
        // Exhaustive small-value oracle: compare as widened floats.
        for i in -64i64..=64 {
            for n in -128i32..=128 {
                let r = f64::from(n) / 4.0;
                let expected = (i as f64).partial_cmp(&r).unwrap();
                let got = cmp_int_real(i, r);
                if i == 0 && r == 0.0 {
                    continue; // signed-zero tie-break, checked separately
                }
                assert_eq!(got, expected, "i={i} r={r}");
            }
        }
    }

    #[test]
    fn int_real_precision_edges() {
        let big = (1i64 << 53) + 1;
        // 2^53+1 is not representable; it must sort strictly between its
        // neighbours rather than collapsing onto them.
        assert_eq!(cmp_int_real(big, (1i64 << 53) as f64), Ordering::Greater);
        assert_eq!(cmp_int_real(big, ((1i64 << 53) + 2) as f64), Ordering::Less);
        assert_eq!(cmp_int_real(i64::MAX, 9.3e18), Ordering::Less);
        assert_eq!(cmp_int_real(i64::MIN, -9.3e18), Ordering::Greater);
        assert_eq!(cmp_int_real(0, -0.0), Ordering::Greater);
        assert_eq!(cmp_int_real(0, 0.0), Ordering::Equal);
    }

    #[test]
    fn text_by_byte_order_above_numerics() {
        assert_eq!(
            compare_values(&Value::Text("a".into()), &Value::Text("b".into())),
            Ordering::Less
        );
        assert_eq!(compare_values(&Value::Int(i64::MAX), &Value::Text("".into())), Ordering::Less);
    }

    #[test]
    fn mem_roundtrip() {
        let v = Value::Text("hello".to_string());
        let m = Mem::from_value(&v);
        assert_eq!(m.to_value(), v);
        assert_eq!(Mem::from_int(-7).to_value(), Value::Int(-7));
        assert_eq!(Mem::from_real(1.5).to_value(), Value::Real(1.5));
        assert_eq!(Mem::null().to_value(), Value::Null);
    }

    #[test]
    fn mem_comparison_agrees_with_value_comparison() {
        let vals = [
            Value::Null,
            Value::Int(-3),
            Value::Int(0),
            Value::Real(0.5),
            Value::Text("x".into()),
        ];
        for a in &vals {
            for b in &vals {
                let (ma, mb) = (Mem::from_value(a), Mem::from_value(b));
                let expected = match compare_values(a, b) {
                    Ordering::Less => -1,
                    Ordering::Equal => 0,
                    Ordering::Greater => 1,
                };
                assert_eq!(cmp_mem(&ma, &mb), expected, "{a:?} vs {b:?}");
            }
        }
    }
}
