//! Uniform check records for text and JSON output.

use serde::Serialize;

use crate::identities::IdentityCheck;
use crate::models::ModelTag;

/// One named check with its residual and verdict.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Record {
    pub name: String,
    pub paper_ref: String,
    pub model: ModelTag,
    pub residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fitted_constant: Option<String>,
    /// Name of the fitted constant in text output.
    #[serde(skip)]
    pub constant_label: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Record {
    pub fn new(name: &str, paper_ref: &str, model: ModelTag, residual: f64, pass: bool) -> Self {
        Record {
            name: name.into(),
            paper_ref: paper_ref.into(),
            model,
            residual,
            fitted_constant: None,
            constant_label: "constant".into(),
            pass,
            detail: None,
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }

    pub fn with_constant(mut self, c: impl Into<String>) -> Self {
        self.fitted_constant = Some(c.into());
        self
    }

    pub fn with_label(mut self, label: &str) -> Self {
        self.constant_label = label.into();
        self
    }

    /// `<paper_ref>: PASS, <label> = <constant>  [name, model, residual]`.
    pub fn text_line(&self) -> String {
        let mut s = format!("{}: {}", self.paper_ref, if self.pass { "PASS" } else { "FAIL" });
        if let Some(c) = &self.fitted_constant {
            s.push_str(&format!(", {} = {c}", self.constant_label));
        }
        s.push_str(&format!("  [{}, {}, residual {:.3e}]", self.name, self.model, self.residual));
        if let Some(d) = &self.detail {
            s.push_str(&format!("\n    {d}"));
        }
        s
    }
}

impl From<&IdentityCheck> for Record {
    fn from(c: &IdentityCheck) -> Self {
        let mut detail = format!("{} = {}", c.lhs, c.rhs);
        if !c.adjoint_dual {
            detail.push_str("; adjoint dual fails");
        }
        if !c.conjugate_dual {
            detail.push_str("; conjugate dual fails");
        }
        if let Some(b) = &c.blocks {
            detail.push_str(&format!("; {b}"));
        }
        Record {
            name: c.name.clone(),
            paper_ref: c.reference.clone(),
            model: c.model,
            residual: c.residual,
            fitted_constant: c.fitted_constant.clone(),
            constant_label: "constant".into(),
            pass: c.pass,
            detail: Some(detail),
        }
    }
}
