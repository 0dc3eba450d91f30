use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Editorial scale of an outlet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scale {
    HyperLocal,
    Regional,
    National,
    Transnational,
    Thematic,
}

impl Scale {
    pub const ALL: [Scale; 5] = [
        Scale::HyperLocal,
        Scale::Regional,
        Scale::National,
        Scale::Transnational,
        Scale::Thematic,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Scale::HyperLocal => "hyper-local",
            Scale::Regional => "regional",
            Scale::National => "national",
            Scale::Transnational => "transnational",
            Scale::Thematic => "thematic",
        }
    }
}

impl FromStr for Scale {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_lowercase();
        Scale::ALL
            .into_iter()
            .find(|v| v.as_str() == lower)
            .ok_or_else(|| Error::data(format!("unknown scale {s:?}")))
    }
}

impl fmt::Display for Scale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutletType {
    General,
    Sports,
    Celebrity,
    Wire,
    Business,
}

impl OutletType {
    pub const ALL: [OutletType; 5] = [
        OutletType::General,
        OutletType::Sports,
        OutletType::Celebrity,
        OutletType::Wire,
        OutletType::Business,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            OutletType::General => "general",
            OutletType::Sports => "sports",
            OutletType::Celebrity => "celebrity",
            OutletType::Wire => "wire",
            OutletType::Business => "business",
        }
    }
}

impl FromStr for OutletType {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_lowercase();
        OutletType::ALL
            .into_iter()
            .find(|v| v.as_str() == lower)
            .ok_or_else(|| Error::data(format!("unknown outlet type {s:?}")))
    }
}

/// The two sampling strata: the Swiss local collection and everything else.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceGroup {
    Local,
    National,
}

impl SourceGroup {
    pub const ALL: [SourceGroup; 2] = [SourceGroup::Local, SourceGroup::National];

    pub fn as_str(self) -> &'static str {
        match self {
            SourceGroup::Local => "local",
            SourceGroup::National => "national",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            SourceGroup::Local => "Local",
            SourceGroup::National => "National",
        }
    }
}

impl FromStr for SourceGroup {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_lowercase().as_str() {
            "local" => Ok(SourceGroup::Local),
            "national" => Ok(SourceGroup::National),
            other => Err(Error::data(format!("unknown source group {other:?}"))),
        }
    }
}

/// Ontology entry for one outlet.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutletMeta {
    pub source: String,
    pub country_region: String,
    pub scale: Scale,
    #[serde(rename = "type")]
    pub outlet_type: OutletType,
}

impl OutletMeta {
    /// Hyper-local outlets form the local stratum.
    pub fn source_group(&self) -> SourceGroup {
        if self.scale == Scale::HyperLocal {
            SourceGroup::Local
        } else {
            SourceGroup::National
        }
    }
}

#[derive(Debug, Deserialize)]
struct OntologyRow {
    source: String,
    country_region: String,
    scale: String,
    #[serde(rename = "type")]
    outlet_type: String,
}

/// Outlet table keyed by source domain.
#[derive(Debug, Clone, Default)]
pub struct Ontology {
    outlets: HashMap<String, OutletMeta>,
}

const BUNDLED_OUTLETS: &str = include_str!("../../data/outlets.csv");

impl Ontology {
    pub fn from_path(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_reader(file)
    }

    pub fn from_reader<R: std::io::Read>(reader: R) -> Result<Self> {
        let rows: Vec<OntologyRow> = crate::io::read_csv_from(reader)?;
        let mut outlets = HashMap::new();
        for row in rows {
            let meta = OutletMeta {
                source: row.source.clone(),
                country_region: row.country_region,
                scale: row.scale.parse()?,
                outlet_type: row.outlet_type.parse()?,
            };
            if outlets.insert(row.source.clone(), meta).is_some() {
                return Err(Error::data(format!("duplicate ontology source {:?}", row.source)));
            }
        }
        Ok(Ontology { outlets })
    }

    /// The 24-outlet table shipped with the crate.
    pub fn bundled() -> Self {
        Self::from_reader(BUNDLED_OUTLETS.as_bytes()).expect("bundled ontology is valid")
    }

    pub fn get(&self, source: &str) -> Option<&OutletMeta> {
        self.outlets.get(source)
    }

    pub fn len(&self) -> usize {
        self.outlets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outlets.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &OutletMeta> {
        self.outlets.values()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_table_has_all_outlets() {
        let onto = Ontology::bundled();
        assert_eq!(onto.len(), 24);
        let arcinfo = onto.get("arcinfo.ch").unwrap();
        assert_eq!(arcinfo.country_region, "Switzerland");
        assert_eq!(arcinfo.scale, Scale::HyperLocal);
        assert_eq!(arcinfo.outlet_type, OutletType::General);
        assert_eq!(arcinfo.source_group(), SourceGroup::Local);
        assert_eq!(onto.get("zonebourse.com").unwrap().outlet_type, OutletType::Business);
    }

    #[test]
    fn duplicate_sources_are_rejected() {
        let csv = "source,country_region,scale,type\na.ch,Switzerland,National,general\na.ch,France,National,general\n";
        assert!(Ontology::from_reader(csv.as_bytes()).is_err());
    }

    #[test]
    fn unknown_scale_is_rejected() {
        let csv = "source,country_region,scale,type\na.ch,Switzerland,planetary,general\n";
        assert!(Ontology::from_reader(csv.as_bytes()).is_err());
    }
}
