//! Trading calendar and month arithmetic.
//!
//! Trading dates come from the data; no holiday logic is synthesized here.
//! Evaluation dates are the last trading day of each calendar month.

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A calendar month, stored as months since year 0 so that month
/// arithmetic is plain integer arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Month(i32);

impl Month {
    pub fn new(year: i32, month: u32) -> Self {
        assert!((1..=12).contains(&month), "month out of range: {month}");
        Month(year * 12 + month as i32 - 1)
    }

    pub fn of(date: NaiveDate) -> Self {
        Month::new(date.year(), date.month())
    }

    pub fn year(self) -> i32 {
        self.0.div_euclid(12)
    }

    pub fn month(self) -> u32 {
        (self.0.rem_euclid(12) + 1) as u32
    }

    /// Shift by a signed number of months.
    pub fn add_months(self, n: i32) -> Self {
        Month(self.0 + n)
    }

    /// First calendar day of the month.
    pub fn first_day(self) -> NaiveDate {
        NaiveDate::from_ymd_opt(self.year(), self.month(), 1).unwrap()
    }

    /// Last calendar day of the month.
    pub fn last_day(self) -> NaiveDate {
        self.add_months(1).first_day().pred_opt().unwrap()
    }

    /// Number of months in the inclusive span `start..=end`, 0 if reversed.
    pub fn span_inclusive(start: Month, end: Month) -> usize {
        if end.0 < start.0 {
            0
        } else {
            (end.0 - start.0 + 1) as usize
        }
    }

    /// Iterate over the inclusive span `self..=end`.
    pub fn iter_to(self, end: Month) -> impl Iterator<Item = Month> {
        (self.0..=end.0).map(Month)
    }
}

impl std::fmt::Display for Month {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:04}-{:02}", self.year(), self.month())
    }
}

impl std::str::FromStr for Month {
    type Err = Error;

    /// Parses `YYYY-MM`.
    fn from_str(s: &str) -> Result<Self> {
        let err = || Error::InvalidInput(format!("invalid month {s:?}, expected YYYY-MM"));
        let (y, m) = s.split_once('-').ok_or_else(err)?;
        let year: i32 = y.parse().map_err(|_| err())?;
        let month: u32 = m.parse().map_err(|_| err())?;
        if !(1..=12).contains(&month) {
            return Err(err());
        }
        Ok(Month::new(year, month))
    }
}

impl Serialize for Month {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Month {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Ordered list of trading dates shared by all panels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TradingCalendar {
    dates: Vec<NaiveDate>,
}

impl TradingCalendar {
    /// Builds a calendar, requiring a nonempty strictly increasing date list.
    pub fn new(dates: Vec<NaiveDate>) -> Result<Self> {
        if dates.is_empty() || dates.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::BadCalendar);
        }
        Ok(TradingCalendar { dates })
    }

    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn first(&self) -> NaiveDate {
        self.dates[0]
    }

    pub fn last(&self) -> NaiveDate {
        *self.dates.last().unwrap()
    }

    pub fn index_of(&self, date: NaiveDate) -> Option<usize> {
        self.dates.binary_search(&date).ok()
    }

    pub fn contains(&self, date: NaiveDate) -> bool {
        self.index_of(date).is_some()
    }

    /// Last trading date falling inside the given calendar month, if any.
    pub fn last_trading_day_of_month(&self, month: Month) -> Option<NaiveDate> {
        let end = month.last_day();
        let idx = self.dates.partition_point(|d| *d <= end);
        if idx == 0 {
            return None;
        }
        let candidate = self.dates[idx - 1];
        (Month::of(candidate) == month).then_some(candidate)
    }

    /// Indices of trading dates `d` with `after < d <= until`.
    pub fn indices_between(&self, after: NaiveDate, until: NaiveDate) -> std::ops::Range<usize> {
        let lo = self.dates.partition_point(|d| *d <= after);
        let hi = self.dates.partition_point(|d| *d <= until);
        lo..hi
    }

    /// Intersection with another calendar, preserving order.
    pub fn intersect(&self, other: &TradingCalendar) -> Result<TradingCalendar> {
        let dates: Vec<NaiveDate> = self
            .dates
            .iter()
            .copied()
            .filter(|d| other.contains(*d))
            .collect();
        TradingCalendar::new(dates)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> NaiveDate {
        s.parse().unwrap()
    }

    #[test]
    fn month_parse_and_display_round_trip() {
        let m: Month = "2014-01".parse().unwrap();
        assert_eq!(m.year(), 2014);
        assert_eq!(m.month(), 1);
        assert_eq!(m.to_string(), "2014-01");
        assert!("2014-13".parse::<Month>().is_err());
        assert!("2014".parse::<Month>().is_err());
    }

    #[test]
    fn month_arithmetic_crosses_year_boundaries() {
        let m = Month::new(2019, 11);
        assert_eq!(m.add_months(3), Month::new(2020, 2));
        assert_eq!(m.add_months(-11), Month::new(2018, 12));
        assert_eq!(Month::new(2020, 2).last_day(), d("2020-02-29"));
    }

    #[test]
    fn inclusive_month_spans() {
        // Reference spans used by the rolling grid.
        let jan14 = Month::new(2014, 1);
        assert_eq!(Month::span_inclusive(jan14, Month::new(2020, 9)), 81);
        assert_eq!(Month::span_inclusive(jan14, Month::new(2019, 12)), 72);
        assert_eq!(Month::span_inclusive(jan14, jan14), 1);
        assert_eq!(Month::span_inclusive(Month::new(2020, 1), jan14), 0);
    }

    #[test]
    fn calendar_rejects_duplicates_and_disorder() {
        assert!(TradingCalendar::new(vec![]).is_err());
        assert!(TradingCalendar::new(vec![d("2020-01-02"), d("2020-01-02")]).is_err());
        assert!(TradingCalendar::new(vec![d("2020-01-03"), d("2020-01-02")]).is_err());
    }

    #[test]
    fn last_trading_day_respects_month_boundaries() {
        let cal = TradingCalendar::new(vec![
            d("2019-12-30"),
            d("2019-12-31"),
            d("2020-01-02"),
            d("2020-01-31"),
            d("2020-03-02"),
        ])
        .unwrap();
        assert_eq!(
            cal.last_trading_day_of_month(Month::new(2019, 12)),
            Some(d("2019-12-31"))
        );
        assert_eq!(
            cal.last_trading_day_of_month(Month::new(2020, 1)),
            Some(d("2020-01-31"))
        );
        // February has no trading dates at all.
        assert_eq!(cal.last_trading_day_of_month(Month::new(2020, 2)), None);
    }

    #[test]
    fn indices_between_is_half_open_on_the_left() {
        let cal = TradingCalendar::new(vec![
            d("2020-01-02"),
            d("2020-01-03"),
            d("2020-01-06"),
            d("2020-01-07"),
        ])
        .unwrap();
        let r = cal.indices_between(d("2020-01-02"), d("2020-01-06"));
        assert_eq!(r, 1..3);
    }
}
