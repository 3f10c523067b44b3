//! Bundled geometry and profile fixtures, embedded at compile time.

use crate::error::{HullError, Result};
use crate::geometry::{PointCloud, Polytope};

macro_rules! table {
    ($dir:literal: $($name:literal),* $(,)?) => {
        &[$(($name, include_str!(concat!("../fixtures/", $dir, "/", $name, ".json")))),*]
    };
}

pub const BODIES: &[(&str, &str)] =
    table!("bodies": "unit_square", "cube", "simplex3", "square4", "lshape", "cshape", "star2d", "unit_disk");

pub const CLOUDS: &[(&str, &str)] = table!("clouds":
    "two_point_r1", "two_point_e1", "e1_e2", "pm_e1", "triangle", "square_corners", "two_cluster",
    "grid5x5", "grid32_1d", "orthobasis_2", "orthobasis_4", "orthobasis_8", "orthobasis_16",
);

pub const PROFILES: &[(&str, &str)] = table!("profiles": "case1", "case2", "case3");

fn lookup(table: &[(&str, &'static str)], kind: &str, name: &str) -> Result<&'static str> {
    table
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, s)| *s)
        .ok_or_else(|| HullError::InvalidInput(format!("no bundled {kind} named {name:?}")))
}

pub fn body_json(name: &str) -> Result<&'static str> {
    lookup(BODIES, "body", name)
}

pub fn cloud_json(name: &str) -> Result<&'static str> {
    lookup(CLOUDS, "cloud", name)
}

pub fn profile_json(name: &str) -> Result<&'static str> {
    lookup(PROFILES, "profile", name)
}

pub fn body(name: &str) -> Result<Polytope> {
    Polytope::from_json_str(body_json(name)?)
}

pub fn cloud(name: &str) -> Result<PointCloud> {
    PointCloud::from_json_str(cloud_json(name)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_fixture_parses() {
        for (name, _) in BODIES {
            body(name).unwrap();
        }
        for (name, _) in CLOUDS {
            cloud(name).unwrap();
        }
        for (name, s) in PROFILES {
            serde_json::from_str::<serde_json::Value>(s).unwrap_or_else(|e| panic!("{name}: {e}"));
        }
        assert!(body("nope").is_err());
    }
}
