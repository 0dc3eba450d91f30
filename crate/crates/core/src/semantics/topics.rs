use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::ArticleRecord;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetaTopic {
    LocalNews,
    ProfessionalSports,
    LifestyleEntertainment,
    FaitsDivers,
    NationalLocalPolitics,
    Technology,
    BusinessEconomy,
    Geopolitics,
    Unassigned,
}

impl MetaTopic {
    /// The eight assignable meta-topics in report order.
    pub const ASSIGNABLE: [MetaTopic; 8] = [
        MetaTopic::LocalNews,
        MetaTopic::ProfessionalSports,
        MetaTopic::LifestyleEntertainment,
        MetaTopic::FaitsDivers,
        MetaTopic::NationalLocalPolitics,
        MetaTopic::Technology,
        MetaTopic::BusinessEconomy,
        MetaTopic::Geopolitics,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MetaTopic::LocalNews => "local-news",
            MetaTopic::ProfessionalSports => "professional-sports",
            MetaTopic::LifestyleEntertainment => "lifestyle-entertainment",
            MetaTopic::FaitsDivers => "faits-divers",
            MetaTopic::NationalLocalPolitics => "national-local-politics",
            MetaTopic::Technology => "technology",
            MetaTopic::BusinessEconomy => "business-economy",
            MetaTopic::Geopolitics => "geopolitics",
            MetaTopic::Unassigned => "unassigned",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            MetaTopic::LocalNews => "Local news",
            MetaTopic::ProfessionalSports => "Professional sports",
            MetaTopic::LifestyleEntertainment => "Lifestyle, entertainment & people",
            MetaTopic::FaitsDivers => "Faits divers",
            MetaTopic::NationalLocalPolitics => "National / local politics",
            MetaTopic::Technology => "Technology",
            MetaTopic::BusinessEconomy => "Business & economy",
            MetaTopic::Geopolitics => "Geopolitics",
            MetaTopic::Unassigned => "Unassigned",
        }
    }
}

impl fmt::Display for MetaTopic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MetaTopic {
    type Err = Error;

    /// Accepts the slug or the display title, case-insensitively.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        MetaTopic::ASSIGNABLE
            .into_iter()
            .chain([MetaTopic::Unassigned])
            .find(|t| t.as_str().eq_ignore_ascii_case(s) || t.title().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::data(format!("unknown meta-topic {s:?}")))
    }
}

#[derive(Debug, Deserialize)]
struct MapRow {
    topic_id: i64,
    meta_topic: String,
}

/// topic_id → meta-topic; ids not in the map resolve to `Unassigned`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MetaTopicMap {
    map: BTreeMap<i64, MetaTopic>,
}

impl MetaTopicMap {
    pub fn from_path(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_reader(file)
    }

    pub fn from_reader<R: std::io::Read>(reader: R) -> Result<Self> {
        let mut map = BTreeMap::new();
        for row in crate::io::read_csv_from::<MapRow, _>(reader)? {
            let topic = row.meta_topic.parse()?;
            if map.insert(row.topic_id, topic).is_some() {
                return Err(Error::data(format!("duplicate topic_id {} in meta-topic map", row.topic_id)));
            }
        }
        Ok(MetaTopicMap { map })
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (i64, MetaTopic)>) -> Self {
        MetaTopicMap {
            map: pairs.into_iter().collect(),
        }
    }

    pub fn lookup(&self, topic_id: Option<i64>) -> MetaTopic {
        topic_id
            .and_then(|t| self.map.get(&t).copied())
            .unwrap_or(MetaTopic::Unassigned)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

/// Pairs every article with its meta-topic.
pub fn join_meta_topics<'a>(articles: impl IntoIterator<Item = &'a ArticleRecord>, map: &MetaTopicMap) -> Vec<(&'a ArticleRecord, MetaTopic)> {
    articles.into_iter().map(|a| (a, map.lookup(a.topic_id))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lookup_examples() {
        let map = MetaTopicMap::from_reader("topic_id,meta_topic\n3,professional-sports\n7,Faits divers\n".as_bytes()).unwrap();
        assert_eq!(map.lookup(Some(3)), MetaTopic::ProfessionalSports);
        assert_eq!(map.lookup(Some(7)), MetaTopic::FaitsDivers);
        assert_eq!(map.lookup(Some(4)), MetaTopic::Unassigned);
        assert_eq!(map.lookup(None), MetaTopic::Unassigned);
    }

    #[test]
    fn duplicate_ids_rejected() {
        let r = MetaTopicMap::from_reader("topic_id,meta_topic\n3,technology\n3,geopolitics\n".as_bytes());
        assert!(r.unwrap_err().to_string().contains("duplicate topic_id 3"));
    }

    #[test]
    fn titles_parse_back() {
        for t in MetaTopic::ASSIGNABLE {
            assert_eq!(t.title().parse::<MetaTopic>().unwrap(), t);
            assert_eq!(t.as_str().parse::<MetaTopic>().unwrap(), t);
        }
    }
}
