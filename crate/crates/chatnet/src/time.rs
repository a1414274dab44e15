//! Minute- and second-resolution timestamps with a fixed local offset.
//!
//! Chat exports carry minute-precision send times; scrape read times carry
//! seconds. Both are stored as integers since the Unix epoch so arithmetic
//! and ordering stay exact. Calendar math (days, weekdays, hours) is done at
//! a configurable fixed UTC offset; the corpora this engine targets come
//! from a region without daylight saving.

use chrono::{DateTime, Datelike, NaiveDate, NaiveDateTime, Timelike, Utc};

use crate::error::{Error, Result};

/// Default local offset in hours (UTC-5).
pub const DEFAULT_TZ_OFFSET_HOURS: i32 = -5;

/// Seconds since the Unix epoch.
pub type Seconds = i64;

/// Minutes since the Unix epoch.
pub type Minutes = i64;

/// Parses an ISO-8601 timestamp into epoch seconds.
///
/// Accepts `YYYY-MM-DDTHH:MM`, `YYYY-MM-DDTHH:MM:SS`, either with a space
/// instead of `T`, and optionally a trailing `Z` or `+HH:MM`/`-HH:MM`
/// offset. Timestamps without an offset are taken as UTC.
pub fn parse_timestamp(s: &str) -> Result<Seconds> {
    let s = s.trim();
    if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
        return Ok(dt.timestamp());
    }
    for fmt in [
        "%Y-%m-%dT%H:%M:%S%z",
        "%Y-%m-%d %H:%M:%S%z",
        "%Y-%m-%dT%H:%M%z",
        "%Y-%m-%d %H:%M%z",
    ] {
        if let Ok(dt) = DateTime::parse_from_str(s, fmt) {
            return Ok(dt.timestamp());
        }
    }
    for fmt in [
        "%Y-%m-%dT%H:%M:%S",
        "%Y-%m-%d %H:%M:%S",
        "%Y-%m-%dT%H:%M",
        "%Y-%m-%d %H:%M",
    ] {
        if let Ok(dt) = NaiveDateTime::parse_from_str(s, fmt) {
            return Ok(dt.and_utc().timestamp());
        }
    }
    Err(Error::InvalidInput(format!("unparseable timestamp {s:?}")))
}

/// Parses a timestamp and truncates it to minute precision.
pub fn parse_timestamp_minutes(s: &str) -> Result<Minutes> {
    Ok(parse_timestamp(s)?.div_euclid(60))
}

/// Formats epoch seconds as `YYYY-MM-DDTHH:MM:SSZ`.
pub fn format_seconds(ts: Seconds) -> String {
    DateTime::<Utc>::from_timestamp(ts, 0)
        .expect("timestamp in range")
        .format("%Y-%m-%dT%H:%M:%SZ")
        .to_string()
}

/// Formats epoch minutes as `YYYY-MM-DDTHH:MMZ`.
pub fn format_minutes(ts: Minutes) -> String {
    DateTime::<Utc>::from_timestamp(ts * 60, 0)
        .expect("timestamp in range")
        .format("%Y-%m-%dT%H:%MZ")
        .to_string()
}

/// Local civil date for a minute timestamp at the given offset.
pub fn local_date(ts_min: Minutes, tz_offset_hours: i32) -> NaiveDate {
    local_datetime(ts_min, tz_offset_hours).date()
}

/// Local civil datetime for a minute timestamp at the given offset.
pub fn local_datetime(ts_min: Minutes, tz_offset_hours: i32) -> NaiveDateTime {
    let secs = ts_min * 60 + i64::from(tz_offset_hours) * 3600;
    DateTime::<Utc>::from_timestamp(secs, 0)
        .expect("timestamp in range")
        .naive_utc()
}

/// Minutes past local midnight, in `0..1440`.
pub fn local_minute_of_day(ts_min: Minutes, tz_offset_hours: i32) -> u32 {
    let dt = local_datetime(ts_min, tz_offset_hours);
    dt.hour() * 60 + dt.minute()
}

/// True when the local date falls on Saturday or Sunday.
pub fn is_weekend(ts_min: Minutes, tz_offset_hours: i32) -> bool {
    let wd = local_date(ts_min, tz_offset_hours).weekday();
    wd == chrono::Weekday::Sat || wd == chrono::Weekday::Sun
}

/// Parses `YYYY-MM-DD` into a [`NaiveDate`].
pub fn parse_date(s: &str) -> Result<NaiveDate> {
    NaiveDate::parse_from_str(s.trim(), "%Y-%m-%d")
        .map_err(|_| Error::InvalidInput(format!("unparseable date {s:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minute_and_second_forms() {
        let a = parse_timestamp("2020-02-13T08:30Z").unwrap();
        let b = parse_timestamp("2020-02-13T08:30:00Z").unwrap();
        let c = parse_timestamp("2020-02-13 08:30").unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
        assert_eq!(a % 60, 0);
    }

    #[test]
    fn respects_explicit_offsets() {
        let utc = parse_timestamp("2020-02-13T08:30:00Z").unwrap();
        let bogota = parse_timestamp("2020-02-13T03:30:00-05:00").unwrap();
        assert_eq!(utc, bogota);
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_timestamp("not a time").is_err());
        assert!(parse_timestamp("2020-13-45T99:99").is_err());
    }

    #[test]
    fn local_date_shifts_across_midnight() {
        // 02:00 UTC is 21:00 the previous day at UTC-5.
        let ts = parse_timestamp_minutes("2020-03-01T02:00Z").unwrap();
        assert_eq!(
            local_date(ts, -5),
            NaiveDate::from_ymd_opt(2020, 2, 29).unwrap()
        );
        assert_eq!(local_minute_of_day(ts, -5), 21 * 60);
    }

    #[test]
    fn weekend_classification_uses_local_date() {
        // 2020-03-07 was a Saturday; 03:00 UTC on the 7th is Friday local.
        let ts = parse_timestamp_minutes("2020-03-07T03:00Z").unwrap();
        assert!(!is_weekend(ts, -5));
        assert!(is_weekend(ts, 0));
    }

    #[test]
    fn round_trips_formatting() {
        let ts = parse_timestamp("2020-04-05T23:59:59Z").unwrap();
        assert_eq!(format_seconds(ts), "2020-04-05T23:59:59Z");
        let tm = parse_timestamp_minutes("2020-04-05T23:59Z").unwrap();
        assert_eq!(format_minutes(tm), "2020-04-05T23:59Z");
    }
}
