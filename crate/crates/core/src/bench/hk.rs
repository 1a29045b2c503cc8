//! Hong Kong district data.
//!
//! One candidate site per district. Demand is the population (thousands),
//! cost the median monthly income per capita (HK$) and capacity the `f`
//! column, all taken verbatim from the district table. The
//! inter-district road distances are not available: load them from a
//! matrix file, or use [`synthetic_matrix`] for smoke tests.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{DistanceMatrix, Instance, Layout, Site};

/// The district table: district, population (k), density
/// (/km²), median monthly income per capita (HK$), capacity `f`.
pub const TABLE: &str = "\
district,population_k,density_per_km2,median_income_hkd,f
1,137.1,783,5659,1277.14
2,523.3,22421,4833,44.60
3,280.7,2055,5161,486.62
4,406.4,3135,6774,318.98
5,607.5,8842,6232,113.10
6,293.5,2156,5806,463.82
7,288.7,4679,6897,213.72
8,502.0,6057,5172,165.10
9,534.2,3858,4777,259.20
10,365.5,39095,4821,255.79
11,362.5,36178,6897,276.41
12,587.4,52123,4845,191.85
13,423.5,45540,4750,219.59
14,280.5,40136,6034,249.15
15,250.0,20102,9722,99.49
16,587.7,31664,7235,63.16
17,275.2,7083,6563,282.37
18,155.2,15788,10185,126.68
";

/// District names in table order (New Territories, Kowloon, Hong Kong
/// Island; alphabetical within each zone).
pub const NAMES: [&str; 18] = [
    "Islands",
    "Kwai Tsing",
    "North",
    "Sai Kung",
    "Sha Tin",
    "Tai Po",
    "Tsuen Wan",
    "Tuen Mun",
    "Yuen Long",
    "Sham Shui Po",
    "Kowloon City",
    "Kwun Tong",
    "Wong Tai Sin",
    "Yau Tsim Mong",
    "Central and Western",
    "Eastern",
    "Southern",
    "Wan Chai",
];

/// Rough district centres on a local km grid (x east, y north). Only used
/// for the synthetic matrix.
pub const CENTROIDS_KM: [(f64, f64); 18] = [
    (5.2, 8.9),
    (23.7, 17.8),
    (23.7, 33.3),
    (37.1, 14.4),
    (29.9, 20.0),
    (27.8, 27.8),
    (22.7, 18.9),
    (7.2, 21.1),
    (13.4, 26.6),
    (26.8, 14.4),
    (29.9, 13.3),
    (34.0, 12.2),
    (30.9, 15.5),
    (27.8, 12.2),
    (25.8, 8.9),
    (33.0, 8.9),
    (27.8, 4.4),
    (28.8, 8.9),
];

/// Winding factor applied to straight-line distances in the synthetic matrix.
pub const ROAD_FACTOR: f64 = 1.3;

pub const SYNTHETIC_NOTE: &str = "synthetic, non-authoritative: straight-line distances between \
    approximate district centres times 1.3; not the road distances used for the reference results";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct District {
    pub district: usize,
    pub population_k: f64,
    pub density_per_km2: f64,
    pub median_income_hkd: f64,
    pub f: f64,
}

pub fn districts() -> Vec<District> {
    csv::Reader::from_reader(TABLE.as_bytes())
        .deserialize()
        .collect::<std::result::Result<_, _>>()
        .expect("embedded table parses")
}

/// Straight-line distances between [`CENTROIDS_KM`] times [`ROAD_FACTOR`],
/// rounded to 0.1 km.
pub fn synthetic_matrix() -> DistanceMatrix {
    let rows = CENTROIDS_KM
        .iter()
        .map(|&(xa, ya)| {
            CENTROIDS_KM
                .iter()
                .map(|&(xb, yb)| {
                    let d = ((xa - xb).powi(2) + (ya - yb).powi(2)).sqrt() * ROAD_FACTOR;
                    (d * 10.0).round() / 10.0
                })
                .collect()
        })
        .collect();
    DistanceMatrix::from_rows(rows).expect("synthetic matrix is valid")
}

/// The 18-site instance over `distances` with range `range_km` and `alpha`.
pub fn instance(distances: DistanceMatrix, range_km: f64, alpha: f64) -> Result<Instance> {
    if distances.node_count() != 18 {
        return Err(Error::MatrixDimension {
            got: distances.node_count(),
            expected: 18,
        });
    }
    let sites = districts()
        .iter()
        .map(|d| Site::new(d.median_income_hkd, d.f, d.population_k))
        .collect();
    Instance::new(
        "HK",
        sites,
        range_km,
        alpha,
        Layout::Geometric {
            roads: None,
            distances: Some(distances),
        },
    )
}

/// On-disk distance matrix: rows in km, districts in table order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    #[serde(default)]
    pub note: String,
    #[serde(default)]
    pub districts: Vec<String>,
    pub distance_km: Vec<Vec<f64>>,
}

impl MatrixFile {
    pub fn new(note: &str, d: &DistanceMatrix) -> Self {
        MatrixFile {
            note: note.to_string(),
            districts: NAMES.iter().map(|s| s.to_string()).collect(),
            distance_km: d.rows(),
        }
    }

    pub fn into_matrix(self) -> Result<DistanceMatrix> {
        DistanceMatrix::from_rows(self.distance_km).map_err(|e| match e {
            Error::Invalid { path, message } => Error::invalid(format!("distance_km.{path}"), message),
            other => other,
        })
    }
}

/// Loads a matrix file. An all-zero matrix (the unfilled template) is
/// rejected.
pub fn load_matrix(path: impl AsRef<Path>) -> Result<DistanceMatrix> {
    let file: MatrixFile = crate::io::parse_json(&fs::read_to_string(path)?)?;
    let d = file.into_matrix()?;
    if d.node_count() > 1 && d.as_row_major().iter().all(|&v| v == 0.0) {
        return Err(Error::invalid(
            "distance_km",
            "matrix is all zeros; fill in the road distances first",
        ));
    }
    Ok(d)
}
