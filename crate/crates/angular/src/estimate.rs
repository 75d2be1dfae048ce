use serde::Serialize;

/// Algorithm that produced an [`EigenvalueEstimate`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Delta,
    Theta,
    Series,
    Closed,
    Transport,
    Monodromy,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Method::Delta => "delta",
            Method::Theta => "theta",
            Method::Series => "series",
            Method::Closed => "closed",
            Method::Transport => "transport",
            Method::Monodromy => "monodromy",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EigenvalueEstimate {
    pub value: f64,
    pub j: i32,
    pub method: Method,
    /// Truncation order (`N` of the recurrences, series order, ...).
    pub order: usize,
    /// Method-specific residual at `value`, e.g. `|Delta(value)|`.
    pub residual: f64,
    /// Set when the method's own convergence test failed.
    pub flagged: bool,
    /// Competing value reported with a flagged estimate.
    pub alternate: Option<f64>,
}
