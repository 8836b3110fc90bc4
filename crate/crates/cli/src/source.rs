//! Graph and cell specifications given on the command line.

use std::f64::consts::PI;
use std::path::Path;

use fisher_dimer::geometry::{GraphDocument, IsoradialGraph, Lattice, RhombicGrid};
use fisher_dimer::spectral::PeriodicCell;

use crate::ConfigError;

/// A finite graph: a built-in family cut at a radius, or a JSON file.
#[derive(Debug, Clone, PartialEq)]
pub enum GraphSource {
    Lattice(String),
    Square(f64),
    Quasiperiodic(u64),
    File(String),
}

impl std::str::FromStr for GraphSource {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        if let Some(rest) = s.strip_prefix("quasiperiodic:") {
            let seed = rest.parse().map_err(|_| ConfigError::new(format!("bad quasiperiodic seed `{rest}`")))?;
            return Ok(Self::Quasiperiodic(seed));
        }
        if let Some(rest) = s.strip_prefix("square:") {
            let value = rest.strip_prefix("theta=").unwrap_or(rest);
            return Ok(Self::Square(parse_angle(value)?));
        }
        match s {
            "z2" | "triangular" | "honeycomb" => Ok(Self::Lattice(s.to_string())),
            "quasiperiodic" => Ok(Self::Quasiperiodic(0)),
            path if Path::new(path).exists() => Ok(Self::File(path.to_string())),
            other => Err(ConfigError::new(format!("unknown graph `{other}` (not a built-in name or an existing file)"))),
        }
    }
}

impl GraphSource {
    /// Materialize the graph; `radius` is ignored for files.
    pub fn build(&self, radius: usize) -> anyhow::Result<IsoradialGraph> {
        Ok(match self {
            Self::Lattice(name) => builtin_lattice(name)?.patch(radius)?.graph,
            Self::Square(theta) => Lattice::rectangular(*theta)?.patch(radius)?.graph,
            Self::Quasiperiodic(seed) => {
                let r = i32::try_from(radius).map_err(|_| ConfigError::new("radius too large"))?;
                RhombicGrid::quasiperiodic(*seed, r + 4).patch(r)?
            }
            Self::File(path) => read_document(path)?.to_graph()?,
        })
    }
}

fn read_document(path: &str) -> anyhow::Result<GraphDocument> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::new(format!("cannot read `{path}`: {e}")))?;
    Ok(GraphDocument::from_json(&text).map_err(|e| ConfigError::new(e.to_string()))?)
}

pub fn builtin_lattice(name: &str) -> Result<Lattice, ConfigError> {
    match name {
        "z2" => Ok(Lattice::z2()),
        "triangular" => Ok(Lattice::triangular()),
        "honeycomb" => Ok(Lattice::honeycomb()),
        other => Err(ConfigError::new(format!("unknown built-in lattice `{other}`"))),
    }
}

/// A periodic cell: `builtin:<name>`, `square:theta=<t>`, or a JSON file
/// whose document carries a `periodic` block.
pub fn load_cell(spec: &str) -> anyhow::Result<PeriodicCell> {
    let lattice = if let Some(name) = spec.strip_prefix("builtin:") {
        builtin_lattice(name)?
    } else if let Some(rest) = spec.strip_prefix("square:") {
        Lattice::rectangular(parse_angle(rest.strip_prefix("theta=").unwrap_or(rest))?)?
    } else if Path::new(spec).exists() {
        let graph = read_document(spec)?.to_graph()?;
        let name = Path::new(spec).file_stem().and_then(|s| s.to_str()).unwrap_or("file").to_string();
        Lattice::from_periodic_graph(&graph, &name)?
    } else {
        return Err(ConfigError::new(format!("unknown cell `{spec}`")).into());
    };
    Ok(PeriodicCell::new(lattice)?)
}

/// Angles as plain numbers or in the forms `pi`, `pi/4`, `5pi/12`, `3*pi/8`.
pub fn parse_angle(s: &str) -> Result<f64, ConfigError> {
    let bad = || ConfigError::new(format!("cannot parse angle `{s}`"));
    let t = s.trim().to_ascii_lowercase().replace(' ', "");
    if let Ok(v) = t.parse::<f64>() {
        return Ok(v);
    }
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n, d.parse::<f64>().map_err(|_| bad())?),
        None => (t.as_str(), 1.0),
    };
    let coeff = num.strip_suffix("pi").ok_or_else(bad)?.trim_end_matches('*');
    let coeff = if coeff.is_empty() { 1.0 } else { coeff.parse::<f64>().map_err(|_| bad())? };
    Ok(coeff * PI / den)
}

/// A comma-separated angle list.
pub fn parse_angles(s: &str) -> Result<Vec<f64>, ConfigError> {
    s.split(',').filter(|p| !p.trim().is_empty()).map(parse_angle).collect()
}

/// Complex numbers as `re,im`, or `unit:<angle>` on the unit circle.
pub fn parse_complex(s: &str) -> Result<num_complex::Complex64, ConfigError> {
    if let Some(a) = s.strip_prefix("unit:") {
        return Ok(num_complex::Complex64::from_polar(1.0, parse_angle(a)?));
    }
    let (re, im) = s.split_once(',').ok_or_else(|| ConfigError::new(format!("expected `re,im`, got `{s}`")))?;
    let p = |v: &str| v.trim().parse::<f64>().map_err(|_| ConfigError::new(format!("bad number `{v}`")));
    Ok(num_complex::Complex64::new(p(re)?, p(im)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angles_in_multiples_of_pi() {
        assert_eq!(parse_angle("pi/4").unwrap(), PI / 4.0);
        assert_eq!(parse_angle("5pi/12").unwrap(), 5.0 * PI / 12.0);
        assert_eq!(parse_angle("3*pi/8").unwrap(), 3.0 * PI / 8.0);
        assert_eq!(parse_angle("0.7").unwrap(), 0.7);
        assert!(parse_angle("tau").is_err());
        assert_eq!(parse_angles("pi/6, pi/3").unwrap().len(), 2);
    }

    #[test]
    fn graph_specs() {
        assert_eq!("z2".parse::<GraphSource>().unwrap(), GraphSource::Lattice("z2".into()));
        assert_eq!("quasiperiodic:7".parse::<GraphSource>().unwrap(), GraphSource::Quasiperiodic(7));
        assert_eq!("square:theta=pi/4".parse::<GraphSource>().unwrap(), GraphSource::Square(PI / 4.0));
        assert!("nonsense".parse::<GraphSource>().is_err());
    }

    #[test]
    fn complex_specs() {
        assert_eq!(parse_complex("1.5,-2").unwrap(), num_complex::Complex64::new(1.5, -2.0));
        assert!((parse_complex("unit:pi/2").unwrap() - num_complex::Complex64::new(0.0, 1.0)).norm() < 1e-15);
    }
}
