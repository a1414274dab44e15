//! Core domain types: phone numbers with country resolution, messages,
//! groups, and the deduplicated corpus they live in.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::time::{Minutes, Seconds};

/// Country bucket resolved from a telephone prefix.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CountryCode {
    CO,
    VE,
    EC,
    PE,
    CL,
    BR,
    MX,
    US,
    /// A prefix present in the table but outside the named set; carries the
    /// matched prefix digits.
    Other(String),
    /// No table entry matched.
    Unknown,
}

impl fmt::Display for CountryCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CountryCode::CO => write!(f, "CO"),
            CountryCode::VE => write!(f, "VE"),
            CountryCode::EC => write!(f, "EC"),
            CountryCode::PE => write!(f, "PE"),
            CountryCode::CL => write!(f, "CL"),
            CountryCode::BR => write!(f, "BR"),
            CountryCode::MX => write!(f, "MX"),
            CountryCode::US => write!(f, "US"),
            CountryCode::Other(prefix) => write!(f, "OTHER+{prefix}"),
            CountryCode::Unknown => write!(f, "UNKNOWN"),
        }
    }
}

/// Telephone-prefix lookup table. Loaded from a `<prefix>,<tag>` text file
/// and validated to be prefix-free, so longest-prefix match is unambiguous.
#[derive(Clone, Debug)]
pub struct CountryTable {
    entries: Vec<(String, CountryCode)>,
}

/// The table bundled with the crate, covering the countries relevant to the
/// corpus plus US.
const BUILTIN_PREFIX_TABLE: &str = include_str!("../data/country_prefixes.txt");

impl CountryTable {
    pub fn builtin() -> Self {
        Self::parse(BUILTIN_PREFIX_TABLE).expect("bundled prefix table is valid")
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (idx, raw_line) in text.lines().enumerate() {
            let line = raw_line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (prefix, tag) = line.split_once(',').ok_or(Error::PrefixTableParse {
                line: idx + 1,
                reason: "expected `<prefix>,<tag>`".into(),
            })?;
            let prefix = prefix.trim().to_string();
            if prefix.is_empty() || !prefix.bytes().all(|b| b.is_ascii_digit()) {
                return Err(Error::PrefixTableParse {
                    line: idx + 1,
                    reason: format!("prefix {prefix:?} is not a digit string"),
                });
            }
            let code = match tag.trim() {
                "CO" => CountryCode::CO,
                "VE" => CountryCode::VE,
                "EC" => CountryCode::EC,
                "PE" => CountryCode::PE,
                "CL" => CountryCode::CL,
                "BR" => CountryCode::BR,
                "MX" => CountryCode::MX,
                "US" => CountryCode::US,
                _ => CountryCode::Other(prefix.clone()),
            };
            entries.push((prefix, code));
        }
        let table = Self { entries };
        table.validate_prefix_free()?;
        Ok(table)
    }

    fn validate_prefix_free(&self) -> Result<()> {
        for (i, (a, _)) in self.entries.iter().enumerate() {
            for (b, _) in self.entries.iter().skip(i + 1) {
                let (short, long) = if a.len() <= b.len() { (a, b) } else { (b, a) };
                if short != long && long.starts_with(short.as_str()) {
                    return Err(Error::PrefixTableConflict {
                        shorter: short.clone(),
                        longer: long.clone(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Parses a raw number (optional leading `+`, then 7-15 digits) and
    /// resolves its country by longest prefix match.
    pub fn parse_phone(&self, raw: &str) -> Result<PhoneNumber> {
        let digits = raw.strip_prefix('+').unwrap_or(raw);
        if digits.is_empty()
            || digits.len() < 7
            || digits.len() > 15
            || !digits.bytes().all(|b| b.is_ascii_digit())
        {
            return Err(Error::MalformedNumber(raw.to_string()));
        }
        let mut best: Option<&(String, CountryCode)> = None;
        for entry in &self.entries {
            if digits.starts_with(entry.0.as_str())
                && best.is_none_or(|b| entry.0.len() > b.0.len())
            {
                best = Some(entry);
            }
        }
        Ok(match best {
            Some((prefix, code)) => PhoneNumber {
                e164: digits.to_string(),
                country: code.clone(),
                national: digits[prefix.len()..].to_string(),
            },
            None => PhoneNumber {
                e164: digits.to_string(),
                country: CountryCode::Unknown,
                national: digits.to_string(),
            },
        })
    }
}

/// A sender identity: full digit string plus the resolved country split.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PhoneNumber {
    pub e164: String,
    pub country: CountryCode,
    pub national: String,
}

impl fmt::Display for PhoneNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "+{}", self.e164)
    }
}

/// Content kind of a message.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MessageKind {
    Text,
    Image,
    Video,
    Audio,
    Other,
}

impl MessageKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MessageKind::Text => "text",
            MessageKind::Image => "image",
            MessageKind::Video => "video",
            MessageKind::Audio => "audio",
            MessageKind::Other => "other",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "text" => Some(MessageKind::Text),
            "image" => Some(MessageKind::Image),
            "video" => Some(MessageKind::Video),
            "audio" => Some(MessageKind::Audio),
            "other" => Some(MessageKind::Other),
            _ => None,
        }
    }
}

/// Where and when a record was captured.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Provenance {
    pub server: String,
    /// Read time in epoch seconds.
    pub read_time: Seconds,
}

/// One chat event after validation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Message {
    pub id: String,
    pub group_uid: String,
    pub sender: PhoneNumber,
    /// Send time in epoch minutes (the chat UI's display precision).
    pub sent_time: Minutes,
    pub kind: MessageKind,
    pub text: Option<String>,
    pub media_hash: Option<String>,
    pub media_duration_s: Option<u32>,
    pub has_emoji: bool,
    pub forwarded: bool,
    pub reply_to: Option<String>,
    pub provenance: Provenance,
    /// Position in input order; breaks sent-time ties deterministically.
    #[serde(default)]
    pub seq: u64,
}

/// Identity of a message's content for duplicate detection. Text messages
/// match on their text; media messages match on their hash when one was
/// captured. Records without either never match anything.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ContentIdentity {
    Text(String),
    Media(String),
    Opaque(u64),
}

impl Message {
    /// Duplicate-detection key: same group, sender, minute, and content.
    pub fn dedup_key(&self) -> (String, String, Minutes, ContentIdentity) {
        (
            self.group_uid.clone(),
            self.sender.e164.clone(),
            self.sent_time,
            self.content_identity(),
        )
    }

    pub fn content_identity(&self) -> ContentIdentity {
        match self.kind {
            MessageKind::Text => match &self.text {
                Some(t) => ContentIdentity::Text(t.clone()),
                None => ContentIdentity::Opaque(self.seq),
            },
            _ => match &self.media_hash {
                Some(h) => ContentIdentity::Media(h.clone()),
                None => ContentIdentity::Opaque(self.seq),
            },
        }
    }
}

/// A chat group with its stable identifier and any identifiers it absorbed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Group {
    pub uid: String,
    pub title: Option<String>,
    pub icon_uid: Option<String>,
    #[serde(default)]
    pub merged_from: Vec<String>,
}

/// Extracts the group identifier buried in a profile-picture link: the
/// `<digits or X>-<digits or X>` token immediately preceding an encoded
/// `@g.us` inside the `u=` query parameter.
pub fn parse_uid_from_icon_url(url: &str) -> Option<String> {
    let bytes = url.as_bytes();
    let mut search_from = 0;
    while let Some(pos) = url[search_from..].find("%40g.us") {
        let end = search_from + pos;
        // Scan backwards over `<digits or X>-<digits or X>`.
        let mut i = end;
        let mut hyphen = None;
        while i > 0 {
            let c = bytes[i - 1];
            if c.is_ascii_digit() || c == b'X' {
                i -= 1;
            } else if c == b'-' && hyphen.is_none() {
                hyphen = Some(i - 1);
                i -= 1;
            } else {
                break;
            }
        }
        let candidate = &url[i..end];
        let well_formed = match hyphen {
            Some(h) => h > i && h < end - 1,
            None => false,
        };
        // The identifier must be the value of a `u=` parameter.
        let preceded_by_param = url[..i].ends_with("u=")
            && (i == 2 || matches!(bytes[i - 3], b'?' | b'&'));
        if well_formed && preceded_by_param {
            return Some(candidate.to_string());
        }
        search_from = end + 1;
    }
    None
}

/// Stable group identifier: the icon-link identifier when one exists,
/// otherwise a SHA-256 of the exact title bytes.
pub fn derive_uid(icon_uid: Option<&str>, title: &str) -> Result<String> {
    if let Some(icon) = icon_uid {
        if !icon.is_empty() {
            return Ok(icon.to_string());
        }
    }
    if title.is_empty() {
        return Err(Error::CannotIdentifyGroup);
    }
    let mut hasher = Sha256::new();
    hasher.update(title.as_bytes());
    Ok(hex_lower(&hasher.finalize()))
}

fn hex_lower(bytes: &[u8]) -> String {
    let mut s = String::with_capacity(bytes.len() * 2);
    for b in bytes {
        s.push_str(&format!("{b:02x}"));
    }
    s
}

/// Deduplicated message store plus group metadata. Membership is always
/// derived from the messages, never stored separately.
#[derive(Clone, Debug)]
pub struct Corpus {
    groups: BTreeMap<String, Group>,
    messages: Vec<Message>,
    by_group: BTreeMap<String, Vec<usize>>,
}

impl Corpus {
    /// Builds a corpus, ordering messages by (sent time, input order) and
    /// indexing them per group. Every message's group must be present.
    pub fn new(groups: BTreeMap<String, Group>, mut messages: Vec<Message>) -> Result<Self> {
        messages.sort_by(|a, b| (a.sent_time, a.seq).cmp(&(b.sent_time, b.seq)));
        let mut by_group: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        for (idx, m) in messages.iter().enumerate() {
            if !groups.contains_key(&m.group_uid) {
                return Err(Error::UnknownGroup(m.group_uid.clone()));
            }
            by_group.entry(m.group_uid.clone()).or_default().push(idx);
        }
        Ok(Self {
            groups,
            messages,
            by_group,
        })
    }

    pub fn groups(&self) -> &BTreeMap<String, Group> {
        &self.groups
    }

    pub fn messages(&self) -> &[Message] {
        &self.messages
    }

    pub fn group(&self, uid: &str) -> Result<&Group> {
        self.groups
            .get(uid)
            .ok_or_else(|| Error::UnknownGroup(uid.to_string()))
    }

    /// Message indices of one group, in corpus order.
    pub fn group_message_indices(&self, uid: &str) -> Result<&[usize]> {
        if !self.groups.contains_key(uid) {
            return Err(Error::UnknownGroup(uid.to_string()));
        }
        Ok(self
            .by_group
            .get(uid)
            .map(Vec::as_slice)
            .unwrap_or_default())
    }

    pub fn group_messages(&self, uid: &str) -> Result<impl Iterator<Item = &Message>> {
        Ok(self
            .group_message_indices(uid)?
            .iter()
            .map(|&i| &self.messages[i]))
    }

    /// Distinct senders of a group's messages.
    pub fn members(&self, uid: &str) -> Result<BTreeSet<&PhoneNumber>> {
        Ok(self.group_messages(uid)?.map(|m| &m.sender).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> CountryTable {
        CountryTable::builtin()
    }

    #[test]
    fn longest_prefix_resolves_colombia() {
        let p = table().parse_phone("+573001234567").unwrap();
        assert_eq!(p.country, CountryCode::CO);
        assert_eq!(p.national, "3001234567");
        assert_eq!(p.e164, "573001234567");
    }

    #[test]
    fn group_creator_number_resolves_venezuela() {
        // The creator-number half of an icon identifier, redactions filled in.
        let p = table().parse_phone("+584165721234").unwrap();
        assert_eq!(p.country, CountryCode::VE);
        assert_eq!(p.national, "4165721234");
    }

    #[test]
    fn ecuador_beats_venezuela_only_on_distinct_prefixes() {
        assert_eq!(table().parse_phone("+59391234567").unwrap().country, CountryCode::EC);
        assert_eq!(table().parse_phone("+58412345678").unwrap().country, CountryCode::VE);
    }

    #[test]
    fn unmatched_prefix_is_unknown_with_full_national() {
        let p = table().parse_phone("+9999123").unwrap();
        assert_eq!(p.country, CountryCode::Unknown);
        assert_eq!(p.national, "9999123");
    }

    #[test]
    fn bare_digits_accepted_and_junk_rejected() {
        assert!(table().parse_phone("573001234567").is_ok());
        assert!(table().parse_phone("+57abc").is_err());
        assert!(table().parse_phone("").is_err());
        assert!(table().parse_phone("+123").is_err());
        assert!(table().parse_phone("+1234567890123456").is_err());
    }

    #[test]
    fn parse_phone_is_deterministic() {
        let a = table().parse_phone("+515551234").unwrap();
        let b = table().parse_phone("+515551234").unwrap();
        assert_eq!(a, b);
        assert_eq!(a.country, CountryCode::PE);
    }

    #[test]
    fn prefix_table_rejects_nested_prefixes() {
        let err = CountryTable::parse("57,CO\n5730,XX\n").unwrap_err();
        match err {
            Error::PrefixTableConflict { shorter, longer } => {
                assert_eq!(shorter, "57");
                assert_eq!(longer, "5730");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn prefix_table_other_tag_carries_prefix() {
        let t = CountryTable::parse("34,ES\n").unwrap();
        let p = t.parse_phone("+34911234567").unwrap();
        assert_eq!(p.country, CountryCode::Other("34".into()));
    }

    #[test]
    fn icon_url_extraction_matches_documented_pattern() {
        let url = "https://web.whatsapp.com/pp?e=https%3A%2F%2Fpps.whatsapp.net%2Fv%2Ft61.24694-24%2F71104943_726169654564928_648446692972455XXXX_n.jpg%3Foe%3D5E35C2D4%26oh%3Dc8619054cae8f2c2766c3ce819d3ea7f&t=s&u=58416572XXXX-157097XXXX%40g.us&i=1571100754";
        assert_eq!(
            parse_uid_from_icon_url(url).as_deref(),
            Some("58416572XXXX-157097XXXX")
        );
    }

    #[test]
    fn icon_url_without_identifier_is_none() {
        assert_eq!(parse_uid_from_icon_url("https://example.com/pp?e=x"), None);
        assert_eq!(parse_uid_from_icon_url(""), None);
        // Identifier-shaped text outside a `u=` parameter does not count.
        assert_eq!(
            parse_uid_from_icon_url("https://example.com/pp?e=123-456%40g.us"),
            None
        );
    }

    #[test]
    fn icon_url_simple_parameter() {
        assert_eq!(
            parse_uid_from_icon_url("https://x.test/pp?u=12345-67890%40g.us").as_deref(),
            Some("12345-67890")
        );
    }

    #[test]
    fn derive_uid_prefers_icon() {
        assert_eq!(derive_uid(Some("A-B"), "anything").unwrap(), "A-B");
    }

    #[test]
    fn derive_uid_hashes_title_bytes() {
        // Independently computed: sha256("Venezuela").
        assert_eq!(
            derive_uid(None, "Venezuela").unwrap(),
            "020e438bafc3a7861aea8d79117d2c05b80f2cba2ae5aeb740b3a0f71379ba36"
        );
        assert_eq!(
            derive_uid(None, "Venezuela").unwrap(),
            derive_uid(None, "Venezuela").unwrap()
        );
        assert_ne!(
            derive_uid(None, "Venezuela").unwrap(),
            derive_uid(None, "venezuela").unwrap()
        );
    }

    #[test]
    fn derive_uid_requires_some_identity() {
        assert!(derive_uid(None, "").is_err());
        assert!(derive_uid(Some(""), "").is_err());
    }
}
