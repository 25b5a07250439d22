use arithstat::{CertifiedInterval, Rational};
use serde_json::{Map, Value};

/// Decimal digits for outward-rounded renderings.
const DIGITS: u32 = 12;

pub type Row = Map<String, Value>;

#[derive(Debug)]
pub struct Report {
    pub command: String,
    pub config: Value,
    pub rows: Vec<Row>,
    pub warnings: Vec<String>,
    pub timings: Option<f64>,
}

impl Report {
    pub fn new(command: &str, config: Value) -> Self {
        Report {
            command: command.to_string(),
            config,
            rows: Vec::new(),
            warnings: Vec::new(),
            timings: None,
        }
    }

    pub fn to_json(&self) -> String {
        let mut out = Map::new();
        out.insert("command".into(), Value::from(self.command.clone()));
        out.insert("config".into(), self.config.clone());
        out.insert("rows".into(), Value::Array(self.rows.iter().cloned().map(Value::Object).collect()));
        out.insert(
            "warnings".into(),
            Value::Array(self.warnings.iter().cloned().map(Value::from).collect()),
        );
        out.insert(
            "timings".into(),
            match self.timings {
                Some(s) => serde_json::json!({ "total_seconds": s }),
                None => Value::Null,
            },
        );
        let mut s = serde_json::to_string_pretty(&Value::Object(out)).expect("report serializes");
        s.push('\n');
        s
    }

    /// Rows as CSV; the header is the union of row keys in first-seen order.
    /// Warnings go to standard error.
    pub fn to_csv(&self) -> String {
        let mut header: Vec<&str> = Vec::new();
        for row in &self.rows {
            for k in row.keys() {
                if !header.contains(&k.as_str()) {
                    header.push(k);
                }
            }
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&header).expect("in-memory write");
        for row in &self.rows {
            let rec: Vec<String> = header
                .iter()
                .map(|k| match row.get(*k) {
                    None | Some(Value::Null) => String::new(),
                    Some(Value::String(s)) => s.clone(),
                    Some(v) => v.to_string(),
                })
                .collect();
            w.write_record(&rec).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
    }
}

pub fn rational(x: &Rational) -> Value {
    Value::from(x.to_string())
}

/// `name_lo`, `name_hi` as exact rationals and `name_lo_dec`, `name_hi_dec`
/// rounded outward.
pub fn put_interval(row: &mut Row, name: &str, iv: &CertifiedInterval) {
    row.insert(format!("{name}_lo"), rational(iv.lo()));
    row.insert(format!("{name}_hi"), rational(iv.hi()));
    row.insert(format!("{name}_lo_dec"), Value::from(iv.decimal_lo(DIGITS)));
    row.insert(format!("{name}_hi_dec"), Value::from(iv.decimal_hi(DIGITS)));
}

pub fn row() -> Row {
    Map::new()
}
