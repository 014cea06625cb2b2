//! Line parsers for the `::`-delimited MovieLens-1M files.
//!
//! Input is decoded lossily, since the original `movies.dat` is Latin-1.
//! Blank lines are ignored; any other line that does not parse is counted as
//! malformed and the file is rejected once those exceed 1% of its lines.

use crate::{Error, Result};

/// Number of malformed lines kept as examples in reports and errors.
pub const SAMPLE_LINES: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct User {
    pub id: u32,
    pub gender: String,
    pub age: u32,
    pub occupation: u32,
    pub zip: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Movie {
    pub id: u32,
    pub title: String,
    pub genres: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rating {
    pub user: u32,
    pub movie: u32,
    pub rating: u8,
    pub timestamp: i64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParseReport {
    pub total: usize,
    pub malformed: usize,
    pub samples: Vec<String>,
}

impl ParseReport {
    fn reject(&mut self, line: &str) {
        self.malformed += 1;
        if self.samples.len() < SAMPLE_LINES {
            self.samples.push(line.to_string());
        }
    }

    pub fn exceeds_threshold(&self) -> bool {
        self.malformed * 100 > self.total
    }

    pub(crate) fn check(&self, file: &str) -> Result<()> {
        if self.exceeds_threshold() {
            return Err(Error::Malformed {
                file: file.to_string(),
                malformed: self.malformed,
                total: self.total,
                samples: self.samples.clone(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Parsed<T> {
    pub items: Vec<T>,
    pub report: ParseReport,
}

fn parse_lines<T>(text: &str, mut parse: impl FnMut(&[&str]) -> Option<T>, fields: usize) -> Parsed<T> {
    let mut items = Vec::new();
    let mut report = ParseReport::default();
    for line in text.lines() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        report.total += 1;
        let parts: Vec<&str> = line.split("::").collect();
        match (parts.len() == fields).then(|| parse(&parts)).flatten() {
            Some(item) => items.push(item),
            None => report.reject(line),
        }
    }
    Parsed { items, report }
}

/// `UserID::Gender::Age::Occupation::Zip-code`
pub fn parse_users_str(text: &str) -> Parsed<User> {
    parse_lines(
        text,
        |p| {
            Some(User {
                id: p[0].trim().parse().ok()?,
                gender: p[1].trim().to_string(),
                age: p[2].trim().parse().ok()?,
                occupation: p[3].trim().parse().ok()?,
                zip: p[4].trim().to_string(),
            })
        },
        5,
    )
}

/// `MovieID::Title::Genre|Genre|...`
pub fn parse_movies_str(text: &str) -> Parsed<Movie> {
    parse_lines(
        text,
        |p| {
            let genres: Vec<String> = p[2]
                .split('|')
                .map(str::trim)
                .filter(|g| !g.is_empty())
                .map(str::to_string)
                .collect();
            if genres.is_empty() {
                return None;
            }
            Some(Movie {
                id: p[0].trim().parse().ok()?,
                title: p[1].to_string(),
                genres,
            })
        },
        3,
    )
}

/// `UserID::MovieID::Rating::Timestamp`
pub fn parse_ratings_str(text: &str) -> Parsed<Rating> {
    parse_lines(
        text,
        |p| {
            let rating: u8 = p[2].trim().parse().ok()?;
            if !(1..=5).contains(&rating) {
                return None;
            }
            Some(Rating {
                user: p[0].trim().parse().ok()?,
                movie: p[1].trim().parse().ok()?,
                rating,
                timestamp: p[3].trim().parse().ok()?,
            })
        },
        4,
    )
}

pub fn decode(bytes: &[u8]) -> std::borrow::Cow<'_, str> {
    String::from_utf8_lossy(bytes)
}
