//! Structured pass/fail records.

use std::time::Instant;

use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn is_pass(self) -> bool {
        self == Verdict::Pass
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ReportItem {
    pub id: String,
    pub statement: String,
    pub verdict: Verdict,
    pub witnesses: Value,
    pub timing_ms: Option<f64>,
}

impl ReportItem {
    pub fn new(id: impl Into<String>, statement: impl Into<String>, ok: bool, witnesses: Value) -> Self {
        ReportItem {
            id: id.into(),
            statement: statement.into(),
            verdict: Verdict::from_bool(ok),
            witnesses,
            timing_ms: None,
        }
    }

    /// Runs `f`, recording its wall time.
    pub fn timed<E>(
        id: impl Into<String>,
        statement: impl Into<String>,
        f: impl FnOnce() -> Result<(bool, Value), E>,
    ) -> Result<Self, E> {
        let start = Instant::now();
        let (ok, witnesses) = f()?;
        let mut item = ReportItem::new(id, statement, ok, witnesses);
        item.timing_ms = Some(start.elapsed().as_secs_f64() * 1e3);
        Ok(item)
    }

    pub fn passed(&self) -> bool {
        self.verdict.is_pass()
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ReportMeta {
    pub tool: String,
    pub version: String,
    pub generated_at: Option<String>,
    pub config: Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub meta: ReportMeta,
    pub verdict: String,
    pub items: Vec<ReportItem>,
}

impl VerificationReport {
    /// Verdict is `pass_word` when every item passes, `fail_word` otherwise.
    pub fn new(config: Value, items: Vec<ReportItem>, pass_word: &str, fail_word: &str) -> Self {
        let ok = items.iter().all(|i| i.passed());
        VerificationReport {
            meta: ReportMeta {
                tool: "liftcheck".into(),
                version: env!("CARGO_PKG_VERSION").into(),
                generated_at: None,
                config,
            },
            verdict: if ok { pass_word } else { fail_word }.to_string(),
            items,
        }
    }

    pub fn passed(&self) -> bool {
        self.items.iter().all(|i| i.passed())
    }

    pub fn failures(&self) -> Vec<&ReportItem> {
        self.items.iter().filter(|i| !i.passed()).collect()
    }

    pub fn item(&self, id: &str) -> Option<&ReportItem> {
        self.items.iter().find(|i| i.id == id)
    }

    /// Clears per-item timings so the body is reproducible.
    pub fn without_timing(mut self) -> Self {
        for item in &mut self.items {
            item.timing_ms = None;
        }
        self
    }

    pub fn merge(mut self, other: VerificationReport) -> Self {
        self.items.extend(other.items);
        let ok = self.passed();
        if !ok {
            self.verdict = "FAIL".into();
        }
        self
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("report serializes")
    }

    /// One record per item: `id,verdict,timingMs,statement`.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["id", "verdict", "timingMs", "statement"]).expect("in-memory write");
        for i in &self.items {
            let t = i.timing_ms.map(|t| format!("{t:.1}")).unwrap_or_default();
            let v = if i.passed() { "PASS" } else { "FAIL" };
            w.write_record([i.id.as_str(), v, t.as_str(), i.statement.as_str()]).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn verdict_aggregation() {
        let items = vec![
            ReportItem::new("a", "first", true, json!({})),
            ReportItem::new("b", "second", false, json!({"x": 1})),
        ];
        let r = VerificationReport::new(json!({}), items, "PASS", "FAIL");
        assert_eq!(r.verdict, "FAIL");
        assert_eq!(r.failures().len(), 1);
        let v = r.to_json();
        assert_eq!(v["items"][1]["verdict"], "FAIL");
        assert!(v["items"][0]["timingMs"].is_null());
        assert!(r.to_csv().contains("b,FAIL,,second"));
    }

    #[test]
    fn serialization_is_stable() {
        let mk = || {
            let item = ReportItem::timed::<()>("t", "timed", || Ok((true, json!({"z": 1, "a": 2})))).unwrap();
            VerificationReport::new(json!({"k": 1}), vec![item], "PASS", "FAIL").without_timing()
        };
        assert_eq!(serde_json::to_string(&mk()).unwrap(), serde_json::to_string(&mk()).unwrap());
    }
}
