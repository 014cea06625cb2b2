//! MovieLens ingestion: meta-users as grid points, genres as arms, a random
//! train/test split, a learned mean table and a replay pool.

mod parse;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::environment::EmpiricalPool;
use crate::reward_model::exchange::{ArmDocument, ModelDocument};
use crate::simulation::seed::{mix, rng_from};
use crate::{Error, Result};

pub use parse::{
    decode, parse_movies_str, parse_ratings_str, parse_users_str, Movie, ParseReport, Parsed, Rating, User,
};

/// The 18 genres of MovieLens-1M in their documented order.
pub const MOVIELENS_GENRES: [&str; 18] = [
    "Action",
    "Adventure",
    "Animation",
    "Children's",
    "Comedy",
    "Crime",
    "Documentary",
    "Drama",
    "Fantasy",
    "Film-Noir",
    "Horror",
    "Musical",
    "Mystery",
    "Romance",
    "Sci-Fi",
    "Thriller",
    "War",
    "Western",
];

const GENRE_STREAM: u64 = 1;
const SPLIT_STREAM: u64 = 2;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatingRecord {
    pub user: u32,
    pub age: u32,
    pub occupation: u32,
    pub movie: u32,
    pub genres: Vec<String>,
    pub rating: u8,
    pub timestamp: i64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub records: Vec<RatingRecord>,
    pub users: ParseReport,
    pub movies: ParseReport,
    /// Includes ratings whose user or movie is missing from the other files.
    pub ratings: ParseReport,
}

/// Join parsed files into rating records, enforcing the 1% malformed limit.
pub fn join(users: Parsed<User>, movies: Parsed<Movie>, ratings: Parsed<Rating>) -> Result<Dataset> {
    users.report.check("users.dat")?;
    movies.report.check("movies.dat")?;
    let user_map: HashMap<u32, &User> = users.items.iter().map(|u| (u.id, u)).collect();
    let movie_map: HashMap<u32, &Movie> = movies.items.iter().map(|m| (m.id, m)).collect();
    let mut report = ratings.report.clone();
    let mut records = Vec::with_capacity(ratings.items.len());
    for r in &ratings.items {
        match (user_map.get(&r.user), movie_map.get(&r.movie)) {
            (Some(u), Some(m)) => records.push(RatingRecord {
                user: r.user,
                age: u.age,
                occupation: u.occupation,
                movie: r.movie,
                genres: m.genres.clone(),
                rating: r.rating,
                timestamp: r.timestamp,
            }),
            _ => {
                report.malformed += 1;
                if report.samples.len() < parse::SAMPLE_LINES {
                    report
                        .samples
                        .push(format!("{}::{}::{}::{}", r.user, r.movie, r.rating, r.timestamp));
                }
            }
        }
    }
    report.check("ratings.dat")?;
    Ok(Dataset {
        records,
        users: users.report,
        movies: movies.report,
        ratings: report,
    })
}

fn read(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(decode(&bytes).into_owned())
}

pub fn parse_movielens(users: &Path, movies: &Path, ratings: &Path) -> Result<Dataset> {
    let u = parse_users_str(&read(users)?);
    let m = parse_movies_str(&read(movies)?);
    let r = parse_ratings_str(&read(ratings)?);
    join(u, m, r)
}

/// Dense index over the observed `(age, occupation)` pairs, sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetaUserIndex {
    pairs: Vec<(u32, u32)>,
    lookup: BTreeMap<(u32, u32), usize>,
}

impl MetaUserIndex {
    pub fn from_records(records: &[RatingRecord]) -> Self {
        let set: BTreeSet<(u32, u32)> = records.iter().map(|r| (r.age, r.occupation)).collect();
        let pairs: Vec<(u32, u32)> = set.into_iter().collect();
        let lookup = pairs.iter().enumerate().map(|(i, &p)| (p, i)).collect();
        MetaUserIndex { pairs, lookup }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn index_of(&self, age: u32, occupation: u32) -> Option<usize> {
        self.lookup.get(&(age, occupation)).copied()
    }

    pub fn pair(&self, index: usize) -> (u32, u32) {
        self.pairs[index]
    }

    pub fn label(&self, index: usize) -> String {
        let (age, occ) = self.pairs[index];
        format!("age {age}, occupation {occ}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LearnedRewardTable {
    pub genres: Vec<String>,
    /// `[meta-user][genre]` training means.
    pub means: Vec<Vec<f64>>,
    pub counts: Vec<Vec<usize>>,
    /// Cells with no training ratings, filled with the genre's global mean.
    pub filled: Vec<Vec<bool>>,
}

impl LearnedRewardTable {
    pub fn fallback_cells(&self) -> usize {
        self.filled.iter().flatten().filter(|&&f| f).count()
    }
}

/// Partition of the usable records (indices into the input slice).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
    /// Ratings of genres outside the universe: in neither part.
    pub unused: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LearnedModel {
    pub table: LearnedRewardTable,
    pub pool: EmpiricalPool,
    pub index: MetaUserIndex,
    pub split: Split,
    /// Genre chosen for each movie, or `None` when none of its genres is an arm.
    pub movie_genre: BTreeMap<u32, Option<usize>>,
}

/// Observed genres in canonical MovieLens order, then any others sorted.
pub fn observed_genres(records: &[RatingRecord]) -> Vec<String> {
    let seen: BTreeSet<&str> = records
        .iter()
        .flat_map(|r| r.genres.iter().map(String::as_str))
        .collect();
    let mut out: Vec<String> = MOVIELENS_GENRES
        .iter()
        .filter(|g| seen.contains(*g))
        .map(|g| g.to_string())
        .collect();
    out.extend(
        seen.iter()
            .filter(|g| !MOVIELENS_GENRES.contains(g))
            .map(|g| g.to_string()),
    );
    out
}

pub fn learn_reward_table(records: &[RatingRecord], genres: &[String], split_seed: u64) -> Result<LearnedModel> {
    if records.is_empty() {
        return Err(Error::Ingest("no rating records".into()));
    }
    if genres.is_empty() {
        return Err(Error::Ingest("genre universe is empty".into()));
    }
    let genre_index: HashMap<&str, usize> = genres.iter().enumerate().map(|(i, g)| (g.as_str(), i)).collect();
    let index = MetaUserIndex::from_records(records);
    let (n_meta, n_genre) = (index.len(), genres.len());

    // One genre per movie, drawn in ascending movie-id order.
    let mut genre_rng = rng_from(mix(&[split_seed, GENRE_STREAM]));
    let mut movie_genres: BTreeMap<u32, &[String]> = BTreeMap::new();
    for r in records {
        movie_genres.entry(r.movie).or_insert(&r.genres);
    }
    let movie_genre: BTreeMap<u32, Option<usize>> = movie_genres
        .into_iter()
        .map(|(id, gs)| {
            let options: Vec<usize> = gs.iter().filter_map(|g| genre_index.get(g.as_str()).copied()).collect();
            let choice = (!options.is_empty()).then(|| options[genre_rng.random_range(0..options.len())]);
            (id, choice)
        })
        .collect();

    let cell = |i: usize| -> Option<(usize, usize)> {
        let r = &records[i];
        let g = movie_genre[&r.movie]?;
        Some((index.index_of(r.age, r.occupation).expect("indexed"), g))
    };
    let (usable, unused): (Vec<usize>, Vec<usize>) = (0..records.len()).partition(|&i| cell(i).is_some());

    let mut per_meta = vec![0usize; n_meta];
    for &i in &usable {
        per_meta[cell(i).unwrap().0] += 1;
    }
    let empty: Vec<String> = (0..n_meta)
        .filter(|&m| per_meta[m] == 0)
        .map(|m| index.label(m))
        .collect();
    if !empty.is_empty() {
        return Err(Error::Ingest(format!(
            "meta-users without usable ratings: {}",
            empty.join("; ")
        )));
    }

    let mut order = usable.clone();
    order.shuffle(&mut rng_from(mix(&[split_seed, SPLIT_STREAM])));
    let half = order.len() / 2;
    let mut in_train = vec![false; records.len()];
    for &i in &order[..half] {
        in_train[i] = true;
    }
    // Repair: every meta-user keeps at least one training rating.
    let mut has_train = vec![false; n_meta];
    for &i in &order[..half] {
        has_train[cell(i).unwrap().0] = true;
    }
    for &i in &order[half..] {
        let m = cell(i).unwrap().0;
        if !has_train[m] {
            has_train[m] = true;
            in_train[i] = true;
        }
    }
    let (train, test): (Vec<usize>, Vec<usize>) = usable.iter().partition(|&&i| in_train[i]);

    let mut sums = vec![vec![0.0; n_genre]; n_meta];
    let mut counts = vec![vec![0usize; n_genre]; n_meta];
    let mut genre_sum = vec![0.0; n_genre];
    let mut genre_count = vec![0usize; n_genre];
    for &i in &train {
        let (m, g) = cell(i).unwrap();
        let v = records[i].rating as f64;
        sums[m][g] += v;
        counts[m][g] += 1;
        genre_sum[g] += v;
        genre_count[g] += 1;
    }
    let overall = genre_sum.iter().sum::<f64>() / genre_count.iter().sum::<usize>() as f64;
    let genre_mean: Vec<f64> = (0..n_genre)
        .map(|g| {
            if genre_count[g] > 0 {
                genre_sum[g] / genre_count[g] as f64
            } else {
                overall
            }
        })
        .collect();
    let mut filled = vec![vec![false; n_genre]; n_meta];
    let means: Vec<Vec<f64>> = (0..n_meta)
        .map(|m| {
            (0..n_genre)
                .map(|g| {
                    if counts[m][g] > 0 {
                        sums[m][g] / counts[m][g] as f64
                    } else {
                        filled[m][g] = true;
                        genre_mean[g]
                    }
                })
                .collect()
        })
        .collect();

    let mut samples = vec![vec![Vec::new(); n_genre]; n_meta];
    for &i in &test {
        let (m, g) = cell(i).unwrap();
        samples[m][g].push(records[i].rating as f64);
    }
    let fallback = means.iter().map(|row| row.iter().map(|&v| Some(v)).collect()).collect();
    let pool = EmpiricalPool::new(samples, fallback)?;

    Ok(LearnedModel {
        table: LearnedRewardTable {
            genres: genres.to_vec(),
            means,
            counts,
            filled,
        },
        pool,
        index,
        split: Split { train, test, unused },
        movie_genre,
    })
}

/// Model-exchange document with meta-user index `j` as grid point `[j]` and
/// one arm per genre, plus the test-set pools.
pub fn export_model(learned: &LearnedModel, sigma: f64) -> ModelDocument {
    let t = &learned.table;
    let n_meta = t.means.len();
    let doc = ModelDocument {
        grid: (0..n_meta).map(|j| vec![j as f64]).collect(),
        labels: Some((0..n_meta).map(|j| learned.index.label(j)).collect()),
        sigma,
        arms: t
            .genres
            .iter()
            .enumerate()
            .map(|(g, label)| ArmDocument {
                label: label.clone(),
                means: t.means.iter().map(|row| row[g]).collect(),
            })
            .collect(),
        pools: None,
    };
    doc.with_pool(&learned.pool)
}
