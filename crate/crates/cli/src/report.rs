//! Report documents and their JSON and CSV renderings.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

/// Sign and basis conventions, written into every JSON report.
#[derive(Debug, Clone, Serialize)]
pub struct Conventions {
    pub interior_basis: &'static str,
    pub exterior_basis: &'static str,
    pub b1_sign: &'static str,
    pub s2_univ: &'static str,
    pub s2_dg: &'static str,
    pub s1: &'static str,
    pub area_density: &'static str,
}

pub const CONVENTIONS: Conventions = Conventions {
    interior_basis: "e_n(z) = sqrt(n/pi) z^(n-1), n >= 1, on |z| < 1",
    exterior_basis: "e*_n(w) = sqrt(n/pi) w^(-n-1), n >= 1, on |w| > 1",
    b1_sign: "B1[m,n] = -sqrt(mn) b_mn where log((f(z)-f(w))/(z-w)) = sum b_mn z^m w^n; B4 likewise in 1/z, 1/w",
    s2_univ: "S2_univ = log det(I - B1 B1*) <= 0",
    s2_dg: "S2_dg = -S2_univ >= 0",
    s1: "S1 = int_D |f''/f'|^2 + int_D* |g''/g'|^2 - 4 pi log|g'(inf)|, expected S1 = -12 pi S2_univ",
    area_density: "1/(pi (1-|z|^2)^2), integrating to g - 1 over a genus-g fundamental domain",
};

#[derive(Debug, Clone, Serialize)]
pub struct CheckRow {
    pub name: String,
    pub value: f64,
    pub tol: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub conventions: Conventions,
    pub config: BTreeMap<String, Value>,
    pub result: Value,
    pub checks: Vec<CheckRow>,
}

impl Report {
    pub fn new(command: &str, config: BTreeMap<String, Value>, result: Value) -> Self {
        Self { command: command.into(), conventions: CONVENTIONS, config, result, checks: Vec::new() }
    }

    /// Records `value ≤ tol`.
    pub fn check(&mut self, name: &str, value: f64, tol: f64) {
        self.checks.push(CheckRow { name: name.into(), value, tol, passed: value <= tol });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// `key,value` rows of every numeric leaf of the result, then the checks.
    pub fn to_csv(&self) -> String {
        let mut rows = Vec::new();
        flatten("", &self.result, &mut rows);
        let mut out = String::from("key,value\n");
        for (k, v) in rows {
            out.push_str(&format!("{k},{v}\n"));
        }
        for c in &self.checks {
            out.push_str(&format!("check.{}.value,{}\n", c.name, num(c.value)));
            out.push_str(&format!("check.{}.passed,{}\n", c.name, c.passed));
        }
        out
    }
}

/// Seventeen significant digits, which round-trip any double.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(o) => o.iter().for_each(|(k, v)| flatten(&key(k), v, out)),
        Value::Array(a) => a.iter().enumerate().for_each(|(i, v)| flatten(&key(&i.to_string()), v, out)),
        Value::Number(n) => out.push((prefix.to_string(), n.as_f64().map(num).unwrap_or_else(|| n.to_string()))),
        Value::Bool(b) => out.push((prefix.to_string(), b.to_string())),
        Value::String(s) => out.push((prefix.to_string(), s.replace(',', ";"))),
        Value::Null => {}
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_numbers_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 16.0 * std::f64::consts::PI] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn nested_results_flatten() {
        let r = Report::new("x", BTreeMap::new(), serde_json::json!({"a": {"b": 1.5}, "v": [2.0, 3.0], "s": "t"}));
        let csv = r.to_csv();
        assert!(csv.contains("a.b,1.5000000000000000e0"));
        assert!(csv.contains("v.1,3.0000000000000000e0"));
        assert!(csv.contains("s,t"));
    }
}
