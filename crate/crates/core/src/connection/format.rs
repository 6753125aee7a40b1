//! JSON form of a connection: the dimension, variable names, and each nonzero
//! `Γ^k_{ij}` with `i <= j` as expression text. Indices are 1-based.
//!
//! ```json
//! {"n": 1, "variables": ["x"], "precision": "exact",
//!  "symbols": [{"k": 1, "i": 1, "j": 1, "expr": "6*x/(3*x^2 + 1)"}]}
//! ```

use serde::{Deserialize, Serialize};

use super::{Connection, ConnectionError, Precision};
use crate::polycore::{default_names, parse_rational_expression};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConnectionFile {
    pub n: usize,
    #[serde(default)]
    pub variables: Vec<String>,
    #[serde(default = "exact")]
    pub precision: Precision,
    pub symbols: Vec<SymbolEntry>,
}

fn exact() -> Precision {
    Precision::Exact
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolEntry {
    pub k: usize,
    pub i: usize,
    pub j: usize,
    pub expr: String,
}

impl ConnectionFile {
    pub fn from_connection(conn: &Connection, variables: Option<&[String]>) -> Self {
        let names = variables.map(<[String]>::to_vec).unwrap_or_else(|| default_names(conn.n()));
        let symbols = conn
            .nonzero_symbols()
            .map(|(k, i, j, e)| SymbolEntry {
                k: k + 1,
                i: i + 1,
                j: j + 1,
                expr: e.to_string_with(&names),
            })
            .collect();
        ConnectionFile {
            n: conn.n(),
            variables: names,
            precision: conn.precision(),
            symbols,
        }
    }

    pub fn to_connection(&self) -> Result<Connection, ConnectionError> {
        let names = if self.variables.is_empty() {
            default_names(self.n)
        } else if self.variables.len() == self.n {
            self.variables.clone()
        } else {
            return Err(ConnectionError::DimensionMismatch {
                expected: self.n,
                found: self.variables.len(),
            });
        };
        let mut conn = Connection::zero(self.n).with_precision(self.precision);
        for s in &self.symbols {
            for idx in [s.k, s.i, s.j] {
                if idx == 0 || idx > self.n {
                    return Err(ConnectionError::Format(format!(
                        "index {idx} outside 1..={}",
                        self.n
                    )));
                }
            }
            let e = parse_rational_expression(&s.expr, &names)?;
            conn = conn.with_symbol(s.k - 1, s.i - 1, s.j - 1, e);
        }
        Ok(conn)
    }
}

impl Connection {
    pub fn to_json(&self, variables: Option<&[String]>) -> serde_json::Value {
        serde_json::to_value(ConnectionFile::from_connection(self, variables)).expect("plain data")
    }

    pub fn from_json(text: &str) -> Result<Self, ConnectionError> {
        let file: ConnectionFile =
            serde_json::from_str(text).map_err(|e| ConnectionError::Format(e.to_string()))?;
        file.to_connection()
    }
}
