//! Measurement-direction families: the n settings `{b_j}` of the game.
//!
//! File format: plain text, one `x y z` triple per line, `#` starts a
//! comment line, order defines `j = 1…n`.

use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::BlochVector;
use crate::policy::NumericPolicy;

/// Built-in families and their setting counts.
pub const BUILTIN_FAMILIES: [(&str, usize); 5] = [
    ("orthogonal-2", 2),
    ("orthogonal-3", 3),
    ("cube-4", 4),
    ("icosahedron-6", 6),
    ("dodecahedron-10", 10),
];

/// An ordered family of n unit measurement directions, pairwise neither
/// equal nor antipodal.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionSet {
    directions: Vec<BlochVector>,
}

impl DirectionSet {
    pub fn new(directions: Vec<BlochVector>) -> Result<Self> {
        Self::with_policy(directions, &NumericPolicy::DEFAULT)
    }

    pub fn with_policy(directions: Vec<BlochVector>, policy: &NumericPolicy) -> Result<Self> {
        if directions.is_empty() {
            return Err(Error::Config("direction set must contain n >= 1 settings".into()));
        }
        let tol = policy.unit_direction_tol;
        for (i, d) in directions.iter().enumerate() {
            if !d.is_unit(tol) {
                return Err(Error::InvalidDirection {
                    index: i + 1,
                    msg: format!("norm {} is not 1 within {tol:e}", d.norm()),
                });
            }
        }
        for i in 0..directions.len() {
            for j in i + 1..directions.len() {
                let same = (directions[i] - directions[j]).norm() <= tol;
                let antipodal = (directions[i] + directions[j]).norm() <= tol;
                if same || antipodal {
                    return Err(Error::InvalidDirection {
                        index: j + 1,
                        msg: format!(
                            "{} direction {} (antipodal pairs define the same setting)",
                            if same { "duplicates" } else { "is antipodal to" },
                            i + 1
                        ),
                    });
                }
            }
        }
        Ok(DirectionSet { directions })
    }

    pub fn n(&self) -> usize {
        self.directions.len()
    }

    /// Direction for setting `j` (1-based).
    pub fn direction(&self, j: usize) -> &BlochVector {
        &self.directions[j - 1]
    }

    pub fn directions(&self) -> &[BlochVector] {
        &self.directions
    }

    /// Render in the direction-file format.
    pub fn to_file_string(&self) -> String {
        let mut out = String::new();
        for d in &self.directions {
            out.push_str(&format!("{:.17} {:.17} {:.17}\n", d.x, d.y, d.z));
        }
        out
    }
}

/// The named built-in direction family with `n` settings.
pub fn builtin_directions(family: &str, n: usize) -> Result<DirectionSet> {
    let expected = BUILTIN_FAMILIES
        .iter()
        .find(|(name, _)| *name == family)
        .map(|&(_, count)| count)
        .ok_or_else(|| {
            Error::UnknownFamily(
                family.to_string(),
                BUILTIN_FAMILIES
                    .iter()
                    .map(|(name, _)| *name)
                    .collect::<Vec<_>>()
                    .join(", "),
            )
        })?;
    if n != expected {
        return Err(Error::FamilySize {
            family: family.to_string(),
            expected,
            requested: n,
        });
    }
    let dirs = match family {
        "orthogonal-2" => vec![BlochVector::X, BlochVector::Z],
        "orthogonal-3" => vec![BlochVector::X, BlochVector::Y, BlochVector::Z],
        // Body-diagonal axes of a cube.
        "cube-4" => {
            let s = 1.0 / 3.0f64.sqrt();
            vec![
                BlochVector::new(s, s, s),
                BlochVector::new(s, s, -s),
                BlochVector::new(s, -s, s),
                BlochVector::new(s, -s, -s),
            ]
        }
        // Axes through icosahedron vertices (0, ±1, ±φ) and cyclic shifts.
        "icosahedron-6" => {
            let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
            let raw = [
                (0.0, 1.0, phi),
                (0.0, 1.0, -phi),
                (1.0, phi, 0.0),
                (1.0, -phi, 0.0),
                (phi, 0.0, 1.0),
                (phi, 0.0, -1.0),
            ];
            raw.iter()
                .map(|&(x, y, z)| BlochVector::new(x, y, z).normalized().unwrap())
                .collect()
        }
        // Axes through dodecahedron vertices: cube diagonals plus
        // (0, ±1/φ, ±φ) and cyclic shifts, one representative per antipodal pair.
        "dodecahedron-10" => {
            let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
            let inv = 1.0 / phi;
            let raw = [
                (1.0, 1.0, 1.0),
                (1.0, 1.0, -1.0),
                (1.0, -1.0, 1.0),
                (1.0, -1.0, -1.0),
                (0.0, inv, phi),
                (0.0, inv, -phi),
                (inv, phi, 0.0),
                (inv, -phi, 0.0),
                (phi, 0.0, inv),
                (phi, 0.0, -inv),
            ];
            raw.iter()
                .map(|&(x, y, z)| BlochVector::new(x, y, z).normalized().unwrap())
                .collect()
        }
        _ => unreachable!("family validated above"),
    };
    DirectionSet::new(dirs)
}

/// Parse a direction set from file contents. `source_name` is used in
/// diagnostics only.
pub fn parse_directions(contents: &str, source_name: &str) -> Result<DirectionSet> {
    let mut dirs = Vec::new();
    for (lineno, line) in contents.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(Error::Parse {
                source_name: source_name.to_string(),
                line: lineno + 1,
                msg: format!("expected 3 fields 'x y z', found {}", fields.len()),
            });
        }
        let mut xyz = [0.0f64; 3];
        for (slot, field) in xyz.iter_mut().zip(&fields) {
            *slot = field.parse().map_err(|_| Error::Parse {
                source_name: source_name.to_string(),
                line: lineno + 1,
                msg: format!("'{field}' is not a number"),
            })?;
        }
        let v = BlochVector::new(xyz[0], xyz[1], xyz[2]);
        // Normalize small drift; reject anything further from the sphere.
        let norm = v.norm();
        if (norm - 1.0).abs() > 1e-6 {
            return Err(Error::Parse {
                source_name: source_name.to_string(),
                line: lineno + 1,
                msg: format!("direction norm {norm} deviates from 1 by more than 1e-6"),
            });
        }
        dirs.push(v.normalized().unwrap());
    }
    DirectionSet::new(dirs)
}

/// Load a direction set from a file.
pub fn load_directions(path: impl AsRef<Path>) -> Result<DirectionSet> {
    let path = path.as_ref();
    let contents = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_directions(&contents, &path.display().to_string())
}

/// Write a direction set in the file format read by [`load_directions`].
pub fn save_directions(ds: &DirectionSet, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, ds.to_file_string()).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn builtin_orthogonal_families() {
        let ds = builtin_directions("orthogonal-2", 2).unwrap();
        assert_eq!(ds.directions(), &[BlochVector::X, BlochVector::Z]);
        let ds = builtin_directions("orthogonal-3", 3).unwrap();
        assert_eq!(
            ds.directions(),
            &[BlochVector::X, BlochVector::Y, BlochVector::Z]
        );
    }

    #[test]
    fn builtin_size_mismatch() {
        assert!(matches!(
            builtin_directions("orthogonal-2", 5),
            Err(Error::FamilySize { .. })
        ));
        assert!(matches!(
            builtin_directions("tetrahedron-7", 7),
            Err(Error::UnknownFamily(..))
        ));
    }

    #[test]
    fn all_builtin_families_satisfy_invariants() {
        for &(family, n) in &BUILTIN_FAMILIES {
            let ds = builtin_directions(family, n).unwrap();
            assert_eq!(ds.n(), n);
            for d in ds.directions() {
                assert_abs_diff_eq!(d.norm(), 1.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn parse_basic_and_comments() {
        let ds = parse_directions("# axes\n1 0 0\n\n0 0 1\n", "test").unwrap();
        assert_eq!(ds.n(), 2);
        assert_eq!(ds.direction(1), &BlochVector::X);
    }

    #[test]
    fn parse_norm_error_names_line() {
        let err = parse_directions("1 0 0\n2 0 0\n", "test").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn parse_rejects_antipodal() {
        let err = parse_directions("1 0 0\n-1 0 0\n", "test").unwrap_err();
        assert!(matches!(err, Error::InvalidDirection { .. }));
    }

    #[test]
    fn parse_normalizes_small_drift() {
        let ds = parse_directions("1.0000001 0 0\n0 0 1\n", "test").unwrap();
        assert_abs_diff_eq!(ds.direction(1).norm(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn save_load_round_trip() {
        let ds = builtin_directions("icosahedron-6", 6).unwrap();
        let text = ds.to_file_string();
        let back = parse_directions(&text, "roundtrip").unwrap();
        for (a, b) in ds.directions().iter().zip(back.directions()) {
            assert_abs_diff_eq!(a.x, b.x, epsilon = 1e-12);
            assert_abs_diff_eq!(a.y, b.y, epsilon = 1e-12);
            assert_abs_diff_eq!(a.z, b.z, epsilon = 1e-12);
        }
    }
}
