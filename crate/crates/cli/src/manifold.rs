//! `--manifold` specifications and custom geometry files.

use std::path::PathBuf;
use std::str::FromStr;

use serde::Deserialize;

use kstar_core::algebra::parse_rational;
use kstar_core::{GeometryKind, GeometryPoint, HRational};

use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Manifold {
    Cpn(usize),
    Grassmann(usize, usize),
    G22,
    OneDim(HRational, HRational),
    Custom(PathBuf),
}

fn bad(spec: &str) -> CliError {
    CliError::Input(format!(
        "invalid manifold {spec:?}; expected cpn:N, grassmann:p,q, g22, onedim:g,R or custom:FILE"
    ))
}

impl FromStr for Manifold {
    type Err = CliError;

    fn from_str(spec: &str) -> Result<Self, CliError> {
        if spec == "g22" {
            return Ok(Manifold::G22);
        }
        let (kind, args) = spec.split_once(':').ok_or_else(|| bad(spec))?;
        let positive = |s: &str| s.trim().parse::<usize>().ok().filter(|&n| n >= 1).ok_or_else(|| bad(spec));
        let scalar = |s: &str| parse_rational(s.trim()).map(HRational::from_rational).map_err(|_| bad(spec));
        match kind {
            "cpn" => Ok(Manifold::Cpn(positive(args)?)),
            "grassmann" => {
                let (p, q) = args.split_once(',').ok_or_else(|| bad(spec))?;
                Ok(Manifold::Grassmann(positive(p)?, positive(q)?))
            }
            "onedim" => {
                let (g, r) = args.split_once(',').ok_or_else(|| bad(spec))?;
                Ok(Manifold::OneDim(scalar(g)?, scalar(r)?))
            }
            "custom" if !args.is_empty() => Ok(Manifold::Custom(PathBuf::from(args))),
            _ => Err(bad(spec)),
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ScalarInput {
    Int(i64),
    Text(String),
    Exact(HRational),
}

impl ScalarInput {
    fn value(self) -> Result<HRational, CliError> {
        match self {
            ScalarInput::Int(n) => Ok(HRational::from_int(n)),
            ScalarInput::Text(s) => parse_rational(&s)
                .map(HRational::from_rational)
                .map_err(|_| CliError::Input(format!("invalid scalar {s:?} in geometry file"))),
            ScalarInput::Exact(x) => Ok(x),
        }
    }
}

/// Custom geometry file:
/// `{"metric": [[...]], "curvature": [[[[...]]]], "lowered": false}`.
///
/// Scalars are integers, rational strings such as `"3/5"`, or exact
/// `{"num": [...], "den": [...]}` objects. With `lowered: true` the
/// curvature is `R_{abar p q bbar}` and is raised with the inverse metric.
#[derive(Deserialize)]
struct CustomFile {
    metric: Vec<Vec<ScalarInput>>,
    curvature: Vec<Vec<Vec<Vec<ScalarInput>>>>,
    #[serde(default)]
    lowered: bool,
}

fn convert<T>(v: Vec<T>, f: impl Fn(T) -> Result<HRational, CliError>) -> Result<Vec<HRational>, CliError> {
    v.into_iter().map(f).collect()
}

impl Manifold {
    pub fn geometry(&self) -> Result<GeometryPoint, CliError> {
        Ok(match self {
            Manifold::Cpn(n) => GeometryPoint::cpn(*n)?,
            Manifold::Grassmann(p, q) => GeometryPoint::grassmann(*p, *q)?,
            Manifold::G22 => GeometryPoint::grassmann(2, 2)?,
            Manifold::OneDim(g, r) => GeometryPoint::one_dim(g.clone(), r.clone())?,
            Manifold::Custom(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
                let file: CustomFile =
                    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
                let metric = file
                    .metric
                    .into_iter()
                    .map(|row| convert(row, ScalarInput::value))
                    .collect::<Result<Vec<_>, _>>()?;
                let curvature = file
                    .curvature
                    .into_iter()
                    .map(|a| {
                        a.into_iter()
                            .map(|b| b.into_iter().map(|c| convert(c, ScalarInput::value)).collect())
                            .collect()
                    })
                    .collect::<Result<Vec<Vec<Vec<_>>>, CliError>>()?;
                if file.lowered {
                    GeometryPoint::custom_from_lowered(metric, curvature)?
                } else {
                    GeometryPoint::custom(metric, curvature)?
                }
            }
        })
    }

    /// The manifold a stored geometry was built as.
    pub fn of_kind(kind: &GeometryKind) -> Option<Manifold> {
        match kind {
            GeometryKind::Cpn { n } => Some(Manifold::Cpn(*n)),
            GeometryKind::Grassmann { p: 2, q: 2 } => Some(Manifold::G22),
            GeometryKind::Grassmann { p, q } => Some(Manifold::Grassmann(*p, *q)),
            GeometryKind::OneDim { g, r } => Some(Manifold::OneDim(g.clone(), r.clone())),
            GeometryKind::Custom {} => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_specs() {
        assert_eq!("cpn:3".parse::<Manifold>().unwrap(), Manifold::Cpn(3));
        assert_eq!("grassmann:2,3".parse::<Manifold>().unwrap(), Manifold::Grassmann(2, 3));
        assert_eq!("g22".parse::<Manifold>().unwrap(), Manifold::G22);
        assert_eq!(
            "onedim:2,-3/5".parse::<Manifold>().unwrap(),
            Manifold::OneDim(HRational::from_int(2), HRational::from_rational(kstar_core::algebra::rat(-3, 5)))
        );
        for bad in ["cpn:0", "cpn", "cpn:x", "grassmann:2", "onedim:1", "sphere:2", "custom:"] {
            assert!(bad.parse::<Manifold>().is_err(), "{bad}");
        }
    }

    #[test]
    fn custom_file_scalars() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.json");
        let zero = r#"[[[0]]]"#;
        std::fs::write(&path, format!(r#"{{"metric": [["2"]], "curvature": [{zero}], "lowered": false}}"#)).unwrap();
        let m = Manifold::Custom(path.clone());
        let g = m.geometry().unwrap();
        assert_eq!(g.g(0, 0), &HRational::from_int(2));
        std::fs::write(&path, r#"{"metric": [["x"]], "curvature": [[[[0]]]]}"#).unwrap();
        assert!(m.geometry().is_err());
    }
}
