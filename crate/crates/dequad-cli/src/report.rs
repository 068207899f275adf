//! Report payloads and the three output encodings.
//!
//! Text mode prints scientific notation with 5 significant digits; JSON and
//! CSV carry full shortest-round-trip floats (both stdlib `Display` and
//! serde_json's ryu emit the shortest string that parses back exactly).
//! CSV uses a header row, comma separators, and a '.' decimal point with no
//! locale dependence.

use serde::Serialize;

use dequad::{ConvergenceRow, QuadratureResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

/// 5-significant-digit scientific form used across text mode.
fn sci(v: f64) -> String {
    format!("{v:.4e}")
}

fn opt_full(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

#[derive(Debug, Serialize)]
pub struct IntegrateReport {
    pub value: f64,
    pub h: f64,
    pub level: u32,
    pub n_minus: usize,
    pub n_plus: usize,
    pub evals: usize,
    pub est_error: f64,
    pub bound: Option<f64>,
    /// Decay constant the bound was evaluated with (given or fitted).
    pub c: Option<f64>,
    pub converged: bool,
}

impl IntegrateReport {
    pub fn new(r: &QuadratureResult, c: Option<f64>, converged: bool) -> Self {
        Self {
            value: r.value,
            h: r.h,
            level: r.level,
            n_minus: r.n_minus,
            n_plus: r.n_plus,
            evals: r.evals,
            est_error: r.est_error,
            bound: r.bound,
            c,
            converged,
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => to_json(self),
            Format::Csv => {
                let mut s = String::from(
                    "value,h,level,n_minus,n_plus,evals,est_error,bound,c,converged\n",
                );
                s.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{},{}\n",
                    self.value,
                    self.h,
                    self.level,
                    self.n_minus,
                    self.n_plus,
                    self.evals,
                    self.est_error,
                    opt_full(self.bound),
                    opt_full(self.c),
                    self.converged
                ));
                s
            }
            Format::Text => {
                let mut s = String::new();
                s.push_str(&format!("value     = {}\n", sci(self.value)));
                s.push_str(&format!("evals     = {}\n", self.evals));
                s.push_str(&format!("est error = {}\n", sci(self.est_error)));
                if let Some(b) = self.bound {
                    let c = self.c.map(sci).unwrap_or_default();
                    s.push_str(&format!("bound     = {} (c = {c})\n", sci(b)));
                }
                s.push_str(&format!(
                    "level     = {} (h = {}, N- = {}, N+ = {})\n",
                    self.level,
                    sci(self.h),
                    self.n_minus,
                    self.n_plus
                ));
                if !self.converged {
                    s.push_str("converged = no\n");
                }
                s
            }
        }
    }
}

#[derive(Debug, Serialize)]
pub struct BoundReport {
    pub global_bound: f64,
    /// Absent when h exceeds the case-1 domain h0_limit(c).
    pub case1_term: Option<f64>,
    pub case2_term: f64,
    pub k0_threshold: i64,
    pub h0_limit: f64,
    pub h_below_h0_limit: bool,
    /// Diagnostic alternative reading of the bound formula; present only
    /// when requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub literal_product_form: Option<f64>,
}

impl BoundReport {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => to_json(self),
            Format::Csv => {
                let mut s = String::from(
                    "global_bound,case1_term,case2_term,k0_threshold,h0_limit,h_below_h0_limit",
                );
                if self.literal_product_form.is_some() {
                    s.push_str(",literal_product_form");
                }
                s.push('\n');
                s.push_str(&format!(
                    "{},{},{},{},{},{}",
                    self.global_bound,
                    opt_full(self.case1_term),
                    self.case2_term,
                    self.k0_threshold,
                    self.h0_limit,
                    self.h_below_h0_limit
                ));
                if let Some(l) = self.literal_product_form {
                    s.push_str(&format!(",{l}"));
                }
                s.push('\n');
                s
            }
            Format::Text => {
                let case1 = self
                    .case1_term
                    .map(sci)
                    .unwrap_or_else(|| "n/a (h above h0 limit)".into());
                let mut s = format!(
                    "global bound = {}\ncase 1 term  = {case1}\ncase 2 term  = {}\n\
                     k0 threshold = {}\nh0 limit     = {}\nh < h0 limit : {}\n",
                    sci(self.global_bound),
                    sci(self.case2_term),
                    self.k0_threshold,
                    sci(self.h0_limit),
                    if self.h_below_h0_limit { "yes" } else { "no" }
                );
                if let Some(l) = self.literal_product_form {
                    s.push_str(&format!("literal form = {} (diagnostic)\n", sci(l)));
                }
                s
            }
        }
    }
}

#[derive(Debug, Serialize)]
struct RowOut {
    level: u32,
    h: f64,
    evals: usize,
    value: f64,
    abs_error: Option<f64>,
    bound: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct ConvergeReport {
    rows: Vec<RowOut>,
    fitted_order: Option<f64>,
}

impl ConvergeReport {
    pub fn new(rows: &[ConvergenceRow], fitted_order: Option<f64>) -> Self {
        Self {
            rows: rows
                .iter()
                .map(|r| RowOut {
                    level: r.level,
                    h: r.h,
                    evals: r.evals,
                    value: r.value,
                    abs_error: r.abs_error,
                    bound: r.bound,
                })
                .collect(),
            fitted_order,
        }
    }

    /// CSV keeps the stream pure rows; the fitted order goes to stderr.
    pub fn render(&self, format: Format) -> (String, Option<String>) {
        match format {
            Format::Json => (to_json(self), None),
            Format::Csv => {
                let mut s = String::from("level,h,evals,value,abs_error,bound\n");
                for r in &self.rows {
                    s.push_str(&format!(
                        "{},{},{},{},{},{}\n",
                        r.level,
                        r.h,
                        r.evals,
                        r.value,
                        opt_full(r.abs_error),
                        opt_full(r.bound)
                    ));
                }
                let diag = self.fitted_order.map(|p| format!("fitted order p = {p}"));
                (s, diag)
            }
            Format::Text => {
                let mut s = String::from(
                    "level  h           evals   value        abs. error   bound\n",
                );
                for r in &self.rows {
                    s.push_str(&format!(
                        "{:<6} {:<11} {:<7} {:<12} {:<12} {}\n",
                        r.level,
                        sci(r.h),
                        r.evals,
                        sci(r.value),
                        r.abs_error.map(sci).unwrap_or_else(|| "-".into()),
                        r.bound.map(sci).unwrap_or_else(|| "-".into())
                    ));
                }
                if let Some(p) = self.fitted_order {
                    s.push_str(&format!("fitted order p = {}\n", sci(p)));
                }
                (s, None)
            }
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Table1Report {
    pub integral: String,
    pub n_evals: usize,
    pub abs_error: f64,
    pub ubge: f64,
}

impl Table1Report {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => to_json(self),
            Format::Csv => format!(
                "integral,n_evals,abs_error,ubge\n{},{},{},{}\n",
                self.integral, self.n_evals, self.abs_error, self.ubge
            ),
            Format::Text => format!(
                "INTEGRAL  N       abs. error   ubge\n{:<9} {:<7} {:<12} {}\n",
                self.integral,
                self.n_evals,
                sci(self.abs_error),
                sci(self.ubge)
            ),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct DecaySample {
    pub t: f64,
    pub value: f64,
}

pub fn render_decay(samples: &[DecaySample], format: Format) -> String {
    match format {
        Format::Json => to_json(&samples),
        Format::Csv => {
            let mut s = String::from("t,value\n");
            for p in samples {
                s.push_str(&format!("{},{}\n", p.t, p.value));
            }
            s
        }
        Format::Text => {
            let mut s = String::new();
            for p in samples {
                s.push_str(&format!("{:<12} {}\n", p.t, sci(p.value)));
            }
            s
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serialization cannot fail");
    s.push('\n');
    s
}
