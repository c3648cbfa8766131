//! JSON report emitted by the `test` and `crit` subcommands.

use std::collections::BTreeMap;

use axial::TestReport;
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct JsonReport {
    pub schema_version: String,
    pub test: String,
    pub statistic: f64,
    pub p_value: f64,
    pub alpha: f64,
    pub reject: bool,
    pub null_dist: String,
    pub params: BTreeMap<String, serde_json::Value>,
}

impl JsonReport {
    pub fn from_test(report: &TestReport, params: BTreeMap<String, serde_json::Value>) -> Self {
        JsonReport {
            schema_version: SCHEMA_VERSION.into(),
            test: report.test_name.as_str().into(),
            statistic: report.statistic,
            p_value: report.p_value,
            alpha: report.alpha,
            reject: report.reject,
            null_dist: report.null_ref.describe(),
            params,
        }
    }
}
