use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::structures::{embeddings, Embedding, Structure};

/// Colour indices below `k`, or reals in `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Values {
    Colors { k: usize, values: Vec<usize> },
    Reals { values: Vec<f64> },
}

/// A total coloring of `domain`, which is `embeddings(A, U)` in its
/// lexicographic order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Coloring {
    pub domain: Vec<Embedding>,
    pub values: Values,
}

impl Coloring {
    pub fn colors(domain: Vec<Embedding>, k: usize, values: Vec<usize>) -> Result<Self> {
        let c = Coloring {
            domain,
            values: Values::Colors { k, values },
        };
        c.validate()?;
        Ok(c)
    }

    pub fn reals(domain: Vec<Embedding>, values: Vec<f64>) -> Result<Self> {
        let c = Coloring {
            domain,
            values: Values::Reals { values },
        };
        c.validate()?;
        Ok(c)
    }

    pub fn len(&self) -> usize {
        self.domain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.domain.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        let n = match &self.values {
            Values::Colors { k, values } => {
                if *k == 0 {
                    return Err(Error::InvalidInput("a coloring needs at least one color".into()));
                }
                if let Some(v) = values.iter().find(|&&v| v >= *k) {
                    return Err(Error::InvalidInput(format!("color {v} is not below {k}")));
                }
                values.len()
            }
            Values::Reals { values } => {
                if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
                    return Err(Error::InvalidInput(format!("value {v} is outside [0, 1]")));
                }
                values.len()
            }
        };
        if n != self.domain.len() {
            return Err(Error::InvalidInput(format!(
                "coloring has {n} values for a domain of {} embeddings",
                self.domain.len()
            )));
        }
        if self.domain.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput("coloring domain must be strictly sorted".into()));
        }
        Ok(())
    }

    /// Check that the domain is exactly `embeddings(A, U)`.
    pub fn check_domain(&self, a: &Structure, u: &Structure) -> Result<()> {
        if embeddings(a, u)? != self.domain {
            return Err(Error::InvalidInput(
                "coloring domain differs from the embeddings of A into the universe".into(),
            ));
        }
        Ok(())
    }

    pub fn value(&self, i: usize) -> f64 {
        match &self.values {
            Values::Colors { values, .. } => values[i] as f64,
            Values::Reals { values } => values[i],
        }
    }

    pub fn index_of(&self, e: &Embedding) -> Option<usize> {
        self.domain.binary_search(e).ok()
    }

    /// Parse the coloring file format:
    ///
    /// ```text
    /// kind: colors
    /// values: 0 1 1 0
    /// ```
    ///
    /// `kind` is `colors` (optionally with `k: <n>`, default one more than
    /// the largest value) or `reals`; values follow the domain order.
    pub fn parse(text: &str, domain: Vec<Embedding>) -> Result<Self> {
        let mut kind = None;
        let mut k = None;
        let mut values: Option<Vec<String>> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, rest) = line
                .split_once(':')
                .ok_or_else(|| Error::syntax(idx + 1, 1, "expected `key: value`"))?;
            match key.trim() {
                "kind" => kind = Some(rest.trim().to_string()),
                "k" => {
                    k = Some(rest.trim().parse::<usize>().map_err(|_| {
                        Error::syntax(idx + 1, key.len() + 2, "`k` must be a positive integer")
                    })?)
                }
                "values" => values = Some(rest.split_whitespace().map(str::to_string).collect()),
                other => {
                    return Err(Error::syntax(idx + 1, 1, format!("unknown key `{other}`")))
                }
            }
        }
        let values = values.ok_or_else(|| Error::InvalidInput("coloring has no `values:` line".into()))?;
        match kind.as_deref() {
            Some("colors") => {
                let vals: Vec<usize> = values
                    .iter()
                    .map(|v| {
                        v.parse::<usize>()
                            .map_err(|_| Error::InvalidInput(format!("bad color `{v}`")))
                    })
                    .collect::<Result<_>>()?;
                let k = k.unwrap_or_else(|| vals.iter().max().map_or(1, |m| m + 1));
                Coloring::colors(domain, k, vals)
            }
            Some("reals") => {
                let vals: Vec<f64> = values
                    .iter()
                    .map(|v| {
                        v.parse::<f64>()
                            .map_err(|_| Error::InvalidInput(format!("bad real `{v}`")))
                    })
                    .collect::<Result<_>>()?;
                Coloring::reals(domain, vals)
            }
            Some(other) => Err(Error::InvalidInput(format!(
                "unknown coloring kind `{other}` (colors, reals)"
            ))),
            None => Err(Error::InvalidInput("coloring has no `kind:` line".into())),
        }
    }

    pub fn to_text(&self) -> String {
        match &self.values {
            Values::Colors { k, values } => format!(
                "kind: colors\nk: {k}\nvalues: {}\n",
                values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
            ),
            Values::Reals { values } => format!(
                "kind: reals\nvalues: {}\n",
                values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
            ),
        }
    }
}

/// `embeddings(A, C)`, `embeddings(B, C)` and, for each copy `b`, the domain
/// indices of `b∘a` for `a` in `embeddings(A, B)` (in that order).
#[derive(Clone, Debug)]
pub(crate) struct CopySystem {
    pub domain: Vec<Embedding>,
    pub copies: Vec<Embedding>,
    pub sets: Vec<Vec<usize>>,
    pub inner: Vec<Embedding>,
}

impl CopySystem {
    pub fn new(a: &Structure, b: &Structure, c: &Structure) -> Result<Self> {
        let domain = embeddings(a, c)?;
        let copies = embeddings(b, c)?;
        let inner = embeddings(a, b)?;
        let sets = copies
            .iter()
            .map(|bc| {
                inner
                    .iter()
                    .map(|ab| {
                        domain
                            .binary_search(&bc.compose(ab))
                            .expect("composite of embeddings is an embedding")
                    })
                    .collect()
            })
            .collect();
        Ok(CopySystem {
            domain,
            copies,
            sets,
            inner,
        })
    }
}
