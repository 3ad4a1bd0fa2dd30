//! Named code instances.
//!
//! The registry is a JSON object mapping a label to a construction recipe.
//! A copy is compiled into the crate together with the alist files it
//! references; setting `SYMBREAK_REGISTRY` to a JSON path replaces it, with
//! alist paths then resolved relative to that file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::codes::{make_bb_code, make_gb_code, make_hp_code, CodeFamily, CssCode, MonomialSum};
use crate::error::{Error, Result};
use crate::gf2::{read_alist, BinMatrix};

pub const REGISTRY_ENV: &str = "SYMBREAK_REGISTRY";

const BUNDLED_JSON: &str = include_str!("../registry/codes.json");

const BUNDLED_ALIST: &[(&str, &str)] = &[
    ("circulant_31_0_2_5.alist", include_str!("../registry/circulant_31_0_2_5.alist")),
    (
        "circulant_63_0_1_4_14_37.alist",
        include_str!("../registry/circulant_63_0_1_4_14_37.alist"),
    ),
    ("repetition_3.alist", include_str!("../registry/repetition_3.alist")),
    ("ring_2.alist", include_str!("../registry/ring_2.alist")),
    ("hamming_7.alist", include_str!("../registry/hamming_7.alist")),
    ("shor_9_hx.alist", include_str!("../registry/shor_9_hx.alist")),
    ("shor_9_hz.alist", include_str!("../registry/shor_9_hz.alist")),
];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Recipe {
    Bb {
        l: usize,
        m: usize,
        a_terms: Vec<(usize, usize)>,
        b_terms: Vec<(usize, usize)>,
    },
    Gb {
        l: usize,
        a_terms: Vec<usize>,
        b_terms: Vec<usize>,
    },
    Hp {
        h1_alist_path: String,
        h2_alist_path: String,
    },
    Css {
        hx_alist_path: String,
        hz_alist_path: String,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegistryEntry {
    #[serde(flatten)]
    pub recipe: Recipe,
    /// Expected parameters, checked against the constructed code.
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub k: Option<usize>,
    #[serde(default)]
    pub claimed_distance: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug)]
enum Source {
    Bundled,
    Dir(PathBuf),
}

#[derive(Clone, Debug)]
pub struct Registry {
    entries: BTreeMap<String, RegistryEntry>,
    source: Source,
}

impl Registry {
    /// The bundled registry.
    pub fn bundled() -> Self {
        let entries = serde_json::from_str(BUNDLED_JSON).expect("bundled registry is valid JSON");
        Registry {
            entries,
            source: Source::Bundled,
        }
    }

    /// `SYMBREAK_REGISTRY` if set, otherwise the bundled registry.
    pub fn load_default() -> Result<Self> {
        match std::env::var_os(REGISTRY_ENV) {
            Some(path) if !path.is_empty() => Self::from_path(Path::new(&path)),
            _ => Ok(Self::bundled()),
        }
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::Io(std::io::Error::new(
                e.kind(),
                format!("registry {}: {e}", path.display()),
            ))
        })?;
        let entries = serde_json::from_str(&text)?;
        let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(Registry {
            entries,
            source: Source::Dir(dir),
        })
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn entry(&self, label: &str) -> Result<&RegistryEntry> {
        self.entries
            .get(label)
            .ok_or_else(|| Error::UnknownCode(label.to_string()))
    }

    /// Builds the code and checks it against the expected `n` and `k`.
    pub fn get(&self, label: &str) -> Result<CssCode> {
        let entry = self.entry(label)?;
        let mut code = match &entry.recipe {
            Recipe::Bb { l, m, a_terms, b_terms } => {
                let a = MonomialSum::new(*l, *m, a_terms)?;
                let b = MonomialSum::new(*l, *m, b_terms)?;
                make_bb_code(&a, &b)?
            }
            Recipe::Gb { l, a_terms, b_terms } => make_gb_code(a_terms, b_terms, *l)?,
            Recipe::Hp {
                h1_alist_path,
                h2_alist_path,
            } => make_hp_code(&self.alist(h1_alist_path)?, &self.alist(h2_alist_path)?)?,
            Recipe::Css {
                hx_alist_path,
                hz_alist_path,
            } => CssCode::new(
                label,
                self.alist(hx_alist_path)?,
                self.alist(hz_alist_path)?,
                CodeFamily::Generic,
            )?,
        };
        code.label = label.to_string();
        code.claimed_distance = entry.claimed_distance;
        if let Some(n) = entry.n {
            if n != code.n {
                return Err(Error::Invariant(format!("{label}: expected n = {n}, built n = {}", code.n)));
            }
        }
        if let Some(k) = entry.k {
            if k != code.k {
                return Err(Error::Invariant(format!("{label}: expected k = {k}, built k = {}", code.k)));
            }
        }
        Ok(code)
    }

    fn alist(&self, name: &str) -> Result<BinMatrix> {
        let text = match &self.source {
            Source::Bundled => BUNDLED_ALIST
                .iter()
                .find(|(file, _)| *file == name)
                .map(|(_, text)| text.to_string())
                .ok_or_else(|| Error::Parse(format!("no bundled alist named `{name}`")))?,
            Source::Dir(dir) => std::fs::read_to_string(dir.join(name))?,
        };
        read_alist(&text)
    }
}
