//! Concordance extraction of verb + particle constructions and sentence
//! cleaning.
//!
//! A corpus document is treated as a whitespace-tokenized stream. Matching
//! happens on cleaned tokens, so `Give` and `up,` still form `give up`;
//! tokens that clean to nothing (pure punctuation) are skipped entirely and
//! never count toward the context window.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::CorpusError;

/// Default number of context tokens kept on each side of a match.
pub const DEFAULT_WINDOW: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VerbCategory {
    Agree,
    Come,
    Give,
}

impl VerbCategory {
    pub const ALL: [VerbCategory; 3] =
        [VerbCategory::Agree, VerbCategory::Come, VerbCategory::Give];

    pub fn as_str(self) -> &'static str {
        match self {
            VerbCategory::Agree => "agree",
            VerbCategory::Come => "come",
            VerbCategory::Give => "give",
        }
    }
}

impl fmt::Display for VerbCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for VerbCategory {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        VerbCategory::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| CorpusError::InvalidQuery(format!("unknown verb category `{s}`")))
    }
}

/// One of the eleven verb + particle constructions under study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Construction {
    AgreeOn,
    AgreeTo,
    AgreeThat,
    AgreeWith,
    ComeBack,
    ComeIn,
    ComeOut,
    GiveIn,
    GiveOut,
    GiveUp,
    GiveAway,
}

impl Construction {
    pub const ALL: [Construction; 11] = [
        Construction::AgreeOn,
        Construction::AgreeTo,
        Construction::AgreeThat,
        Construction::AgreeWith,
        Construction::ComeBack,
        Construction::ComeIn,
        Construction::ComeOut,
        Construction::GiveIn,
        Construction::GiveOut,
        Construction::GiveUp,
        Construction::GiveAway,
    ];

    pub fn verb_category(self) -> VerbCategory {
        use Construction::*;
        match self {
            AgreeOn | AgreeTo | AgreeThat | AgreeWith => VerbCategory::Agree,
            ComeBack | ComeIn | ComeOut => VerbCategory::Come,
            GiveIn | GiveOut | GiveUp | GiveAway => VerbCategory::Give,
        }
    }

    pub fn particle(self) -> &'static str {
        use Construction::*;
        match self {
            AgreeOn => "on",
            AgreeTo => "to",
            AgreeThat => "that",
            AgreeWith => "with",
            ComeBack => "back",
            ComeIn | GiveIn => "in",
            ComeOut | GiveOut => "out",
            GiveUp => "up",
            GiveAway => "away",
        }
    }

    /// Canonical `category_particle` name, e.g. `give_up`.
    pub fn name(self) -> &'static str {
        use Construction::*;
        match self {
            AgreeOn => "agree_on",
            AgreeTo => "agree_to",
            AgreeThat => "agree_that",
            AgreeWith => "agree_with",
            ComeBack => "come_back",
            ComeIn => "come_in",
            ComeOut => "come_out",
            GiveIn => "give_in",
            GiveOut => "give_out",
            GiveUp => "give_up",
            GiveAway => "give_away",
        }
    }

    pub fn index(self) -> usize {
        Construction::ALL.iter().position(|&c| c == self).unwrap()
    }

    pub fn from_parts(verb: &str, particle: &str) -> Result<Self, CorpusError> {
        Construction::ALL
            .into_iter()
            .find(|c| c.verb_category().as_str() == verb && c.particle() == particle)
            .ok_or_else(|| CorpusError::UnknownConstruction {
                verb: verb.to_owned(),
                particle: particle.to_owned(),
            })
    }

    /// Per-construction sample counts of the reference dataset. They sum to
    /// 1089, not to the 995 total quoted alongside them.
    pub fn reference_count(self) -> usize {
        use Construction::*;
        match self {
            ComeBack | ComeIn | ComeOut | GiveIn => 99,
            GiveOut => 93,
            _ => 100,
        }
    }
}

impl fmt::Display for Construction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Construction {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (verb, particle) =
            s.split_once('_')
                .ok_or_else(|| CorpusError::UnknownConstruction {
                    verb: s.to_owned(),
                    particle: String::new(),
                })?;
        Construction::from_parts(verb, particle)
    }
}

impl Serialize for Construction {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for Construction {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Removes ASCII punctuation, trims, collapses whitespace runs to a single
/// space and lowercases. Idempotent.
pub fn clean_sentence(raw: &str) -> String {
    let stripped: String = raw.chars().filter(|c| !c.is_ascii_punctuation()).collect();
    let collapsed = stripped.split_whitespace().collect::<Vec<_>>().join(" ");
    collapsed.to_lowercase()
}

/// A construction query: any of `verb_forms` immediately followed by the
/// construction's particle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub construction: Construction,
    pub verb_forms: Vec<String>,
}

impl Query {
    /// Base-form-only query, e.g. `give` + `up`.
    pub fn base(construction: Construction) -> Self {
        Self {
            construction,
            verb_forms: vec![construction.verb_category().as_str().to_owned()],
        }
    }

    /// Base form plus the given inflections (e.g. `gave`, `gives`).
    pub fn with_inflections<I, S>(construction: Construction, inflections: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut q = Self::base(construction);
        for form in inflections {
            let form = clean_sentence(form.as_ref());
            if !form.is_empty() && !q.verb_forms.contains(&form) {
                q.verb_forms.push(form);
            }
        }
        q
    }

    fn validate(&self) -> Result<(), CorpusError> {
        if self.verb_forms.is_empty() {
            return Err(CorpusError::InvalidQuery(format!(
                "query for {} has no verb forms",
                self.construction
            )));
        }
        if let Some(bad) = self
            .verb_forms
            .iter()
            .find(|f| f.is_empty() || f.contains(char::is_whitespace))
        {
            return Err(CorpusError::InvalidQuery(format!(
                "verb form `{bad}` must be a single non-empty token"
            )));
        }
        Ok(())
    }

    fn matches_verb(&self, cleaned: &str) -> bool {
        self.verb_forms.iter().any(|f| f == cleaned)
    }
}

/// Parses a query file: one construction per line,
/// `verb<TAB>particle[<TAB>comma-separated inflections]`. Blank lines and
/// lines starting with `#` are ignored.
pub fn parse_queries(text: &str) -> Result<Vec<Query>, CorpusError> {
    let mut queries = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if !(2..=3).contains(&fields.len()) {
            return Err(CorpusError::QueryFile {
                line: lineno + 1,
                message: format!("expected 2 or 3 tab-separated fields, got {}", fields.len()),
            });
        }
        let verb = fields[0].trim().to_lowercase();
        let particle = fields[1].trim().to_lowercase();
        let construction =
            Construction::from_parts(&verb, &particle).map_err(|e| CorpusError::QueryFile {
                line: lineno + 1,
                message: e.to_string(),
            })?;
        let inflections: Vec<&str> = fields
            .get(2)
            .map(|f| {
                f.split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .collect()
            })
            .unwrap_or_default();
        queries.push(Query::with_inflections(construction, inflections));
    }
    Ok(queries)
}

/// One extracted concordance line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sample {
    pub id: String,
    pub raw_text: String,
    pub clean_text: String,
    #[serde(with = "label_object")]
    pub label: Construction,
    pub target_token_index: usize,
    pub particle_token_index: usize,
    pub context_before: usize,
    pub context_after: usize,
}

impl Sample {
    pub fn verb_category(&self) -> VerbCategory {
        self.label.verb_category()
    }
}

mod label_object {
    use super::*;

    #[derive(Serialize, Deserialize)]
    struct Label {
        construction: String,
        verb_category: VerbCategory,
        particle: String,
    }

    pub fn serialize<S: Serializer>(c: &Construction, s: S) -> Result<S::Ok, S::Error> {
        Label {
            construction: c.name().to_owned(),
            verb_category: c.verb_category(),
            particle: c.particle().to_owned(),
        }
        .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Construction, D::Error> {
        let label = Label::deserialize(d)?;
        let c = Construction::from_parts(label.verb_category.as_str(), &label.particle)
            .map_err(serde::de::Error::custom)?;
        if c.name() != label.construction {
            return Err(serde::de::Error::custom(format!(
                "label name `{}` disagrees with `{}`",
                label.construction,
                c.name()
            )));
        }
        Ok(c)
    }
}

/// Extracts every occurrence of `query` from a token stream, in stream
/// order. Sample ids are `{doc_id}:{raw token offset of the verb}`.
pub fn extract_concordance<S: AsRef<str>>(
    doc_id: &str,
    tokens: &[S],
    query: &Query,
    window: usize,
) -> Result<Vec<Sample>, CorpusError> {
    extract_all(doc_id, tokens, std::slice::from_ref(query), window)
}

/// Runs several queries over one stream. Results are ordered by verb
/// position; for a shared position, by query order.
pub fn extract_all<S: AsRef<str>>(
    doc_id: &str,
    tokens: &[S],
    queries: &[Query],
    window: usize,
) -> Result<Vec<Sample>, CorpusError> {
    for q in queries {
        q.validate()?;
    }
    // (raw index, cleaned form) of every token that survives cleaning.
    let kept: Vec<(usize, String)> = tokens
        .iter()
        .enumerate()
        .filter_map(|(i, t)| {
            let c = clean_sentence(t.as_ref());
            (!c.is_empty()).then_some((i, c))
        })
        .collect();

    let mut out = Vec::new();
    for pos in 0..kept.len().saturating_sub(1) {
        let (verb_raw, verb) = (&kept[pos].0, kept[pos].1.as_str());
        let next = kept[pos + 1].1.as_str();
        for q in queries {
            if next != q.construction.particle() || !q.matches_verb(verb) {
                continue;
            }
            let lo = pos.saturating_sub(window);
            let hi = (pos + 1 + window).min(kept.len() - 1);
            let raw_text = tokens[kept[lo].0..=kept[hi].0]
                .iter()
                .map(AsRef::as_ref)
                .collect::<Vec<_>>()
                .join(" ");
            let clean_text = clean_sentence(&raw_text);
            out.push(Sample {
                id: format!("{doc_id}:{verb_raw}"),
                raw_text,
                clean_text,
                label: q.construction,
                target_token_index: pos - lo,
                particle_token_index: pos - lo + 1,
                context_before: pos - lo,
                context_after: hi - (pos + 1),
            });
        }
    }
    Ok(out)
}

/// Whitespace-tokenizes `text` and runs [`extract_all`].
pub fn extract_from_text(
    doc_id: &str,
    text: &str,
    queries: &[Query],
    window: usize,
) -> Result<Vec<Sample>, CorpusError> {
    let tokens: Vec<&str> = text.split_whitespace().collect();
    extract_all(doc_id, &tokens, queries, window)
}

/// Sample counts per construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetSummary {
    pub counts: BTreeMap<Construction, usize>,
    pub total: usize,
}

impl DatasetSummary {
    pub fn count(&self, c: Construction) -> usize {
        self.counts.get(&c).copied().unwrap_or(0)
    }

    /// The reference per-construction profile.
    pub fn reference() -> Self {
        let counts: BTreeMap<_, _> = Construction::ALL
            .into_iter()
            .map(|c| (c, c.reference_count()))
            .collect();
        let total = counts.values().sum();
        Self { counts, total }
    }

    /// `construction,count` rows for all eleven constructions, then `total`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("construction,count\n");
        for c in Construction::ALL {
            s.push_str(&format!("{},{}\n", c.name(), self.count(c)));
        }
        s.push_str(&format!("total,{}\n", self.total));
        s
    }
}

pub fn dataset_summary(samples: &[Sample]) -> DatasetSummary {
    let mut counts: BTreeMap<Construction, usize> =
        Construction::ALL.into_iter().map(|c| (c, 0)).collect();
    for s in samples {
        *counts.entry(s.label).or_default() += 1;
    }
    DatasetSummary {
        total: samples.len(),
        counts,
    }
}
