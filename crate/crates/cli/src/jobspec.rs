//! Job specifications: signature, grid, frame definition and tolerances,
//! loadable from JSON with CLI overrides and `{param}` template substitution
//! in expression strings.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use cliffield_core::fields::{FrameField, FrameMatrixField};
use cliffield_core::grid::Grid;
use cliffield_core::io::{self, AnyField};
use cliffield_core::multivector::Multivector;
use cliffield_core::scalar::{ClScalar, ScalarField};
use cliffield_core::signature::Signature;

use crate::expr::{parse_expr, ScalarExpr};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SignatureSpec {
    pub p: usize,
    pub q: usize,
    #[serde(default = "default_field")]
    pub field: String,
}

fn default_field() -> String {
    "R".to_string()
}

impl SignatureSpec {
    pub fn signature(&self) -> Result<Signature> {
        Signature::new(self.p, self.q).map_err(|e| anyhow!(e))
    }

    pub fn scalar_field(&self) -> Result<ScalarField> {
        match self.field.as_str() {
            "R" => Ok(ScalarField::Real),
            "C" => Ok(ScalarField::Complex),
            other => bail!("unknown scalar field tag {other:?} (use \"R\" or \"C\")"),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GridSpec {
    pub shape: Vec<usize>,
    pub origin: Vec<f64>,
    pub spacing: Vec<f64>,
}

impl GridSpec {
    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.shape.clone(), self.origin.clone(), self.spacing.clone())
            .map_err(|e| anyhow!(e))
    }

    /// Parse the CLI flag format "shape;origin;spacing", e.g.
    /// "65,65;0,0;0.1,0.1".
    pub fn parse_flag(text: &str) -> Result<GridSpec> {
        let parts: Vec<&str> = text.split(';').collect();
        if parts.len() != 3 {
            bail!("grid flag must be \"shape;origin;spacing\"");
        }
        let shape = parts[0]
            .split(',')
            .map(|s| s.trim().parse::<usize>().context("bad grid shape entry"))
            .collect::<Result<Vec<_>>>()?;
        let origin = parts[1]
            .split(',')
            .map(|s| s.trim().parse::<f64>().context("bad grid origin entry"))
            .collect::<Result<Vec<_>>>()?;
        let spacing = parts[2]
            .split(',')
            .map(|s| s.trim().parse::<f64>().context("bad grid spacing entry"))
            .collect::<Result<Vec<_>>>()?;
        Ok(GridSpec {
            shape,
            origin,
            spacing,
        })
    }
}

/// How the frame field is defined.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrameSpec {
    /// n x n matrix of expression strings: h^a = y^a_b e^b.
    Matrix(Vec<Vec<String>>),
    /// Per generator, a map of blade label -> coefficient expression
    /// (or [re, im] expression pair over the complex field).
    Generators(Vec<BTreeMap<String, Value>>),
    /// A sampled `.field.json` / `.field.bin` file holding a frame.
    File(String),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relation residuals of constant sets and intertwiner verification.
    #[serde(default = "default_algebraic")]
    pub algebraic: f64,
    /// Frame-field relation residual per node.
    #[serde(default = "default_frame")]
    pub frame: f64,
    /// Relative closedness threshold for the potential route.
    #[serde(default = "default_closed")]
    pub closed: f64,
    /// Relative path-independence threshold.
    #[serde(default = "default_path")]
    pub path: f64,
    /// Final relation residual of T; when absent it is derived from the
    /// grid spacing and the transport method order.
    #[serde(default)]
    pub final_residual: Option<f64>,
}

fn default_algebraic() -> f64 {
    1e-9
}
fn default_frame() -> f64 {
    1e-9
}
fn default_closed() -> f64 {
    1e-2
}
fn default_path() -> f64 {
    0.1
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            algebraic: default_algebraic(),
            frame: default_frame(),
            closed: default_closed(),
            path: default_path(),
            final_residual: None,
        }
    }
}

impl Tolerances {
    /// Default final-residual tolerance: scaled by the stencil/transport
    /// order, 25 h^2 for the 2nd-order path-ordered route and 25 h^4 for the
    /// 4th-order potential/ODE routes, floored at the algebraic tolerance.
    pub fn final_tolerance(&self, grid: &Grid, method: &str) -> f64 {
        if let Some(t) = self.final_residual {
            return t;
        }
        let h = grid
            .spacing
            .iter()
            .copied()
            .fold(0.0f64, f64::max);
        let scaled = match method {
            "path-ordered" => 25.0 * h * h,
            _ => 25.0 * h.powi(4),
        };
        scaled.max(self.algebraic)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct JobSpec {
    pub signature: SignatureSpec,
    pub grid: GridSpec,
    #[serde(default)]
    pub params: BTreeMap<String, String>,
    pub frame: FrameSpec,
    #[serde(default)]
    pub tolerances: Tolerances,
    /// Transport method name or "auto".
    #[serde(default = "default_method")]
    pub method: String,
    /// Connection scheme name.
    #[serde(default = "default_scheme")]
    pub scheme: String,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn default_method() -> String {
    "auto".to_string()
}
fn default_scheme() -> String {
    "general".to_string()
}
fn default_seed() -> u64 {
    0x0C11F_F1E1
}

impl JobSpec {
    pub fn from_json(value: &Value) -> Result<JobSpec> {
        serde_json::from_value(value.clone()).context("malformed job spec")
    }

    pub fn load(path: &Path) -> Result<JobSpec> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading job spec {}", path.display()))?;
        JobSpec::from_json(&serde_json::from_str(&text)?)
    }

    /// Apply `--param name=expr` overrides.
    pub fn override_params(&mut self, overrides: &[(String, String)]) {
        for (name, value) in overrides {
            self.params.insert(name.clone(), value.clone());
        }
    }

    /// Substitute `{name}` templates and parse one expression.
    pub fn parse_templated(&self, src: &str) -> Result<ScalarExpr> {
        let expanded = expand_templates(src, &self.params)?;
        let expr = parse_expr(&expanded)
            .map_err(|e| anyhow!("in expression {expanded:?}: {e}"))?;
        let r = self.grid.shape.len();
        if expr.max_var() > r {
            bail!(
                "expression {expanded:?} uses x{} but the grid has r = {r}",
                expr.max_var()
            );
        }
        Ok(expr)
    }

    /// The resolved spec echoed into reports (defaults materialized).
    pub fn resolved_value(&self) -> Value {
        serde_json::to_value(self).expect("job spec serializes")
    }
}

pub fn expand_templates(src: &str, params: &BTreeMap<String, String>) -> Result<String> {
    let mut out = String::with_capacity(src.len());
    let mut rest = src;
    while let Some(start) = rest.find('{') {
        out.push_str(&rest[..start]);
        let after = &rest[start + 1..];
        let end = after
            .find('}')
            .ok_or_else(|| anyhow!("unterminated {{param}} in expression {src:?}"))?;
        let name = &after[..end];
        let value = params
            .get(name)
            .ok_or_else(|| anyhow!("unknown template parameter {{{name}}} in {src:?}"))?;
        out.push('(');
        out.push_str(value);
        out.push(')');
        rest = &after[end + 1..];
    }
    out.push_str(rest);
    Ok(out)
}

/// Build the frame field of a job over a concrete scalar type.
pub fn build_frame<S: ClScalar>(job: &JobSpec) -> Result<FrameField<S>> {
    let sig = job.signature.signature()?;
    let grid = job.grid.grid()?;
    match &job.frame {
        FrameSpec::Matrix(rows) => {
            let n = sig.n();
            if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                bail!("frame matrix must be {n} x {n}");
            }
            let mut exprs = Vec::with_capacity(n * n);
            for row in rows {
                for entry in row {
                    exprs.push(job.parse_templated(entry)?);
                }
            }
            let matrix = FrameMatrixField::from_fn(grid.clone(), sig, |node, a, b| {
                let coords = grid.coords(node);
                let v = exprs[(a - 1) * n + (b - 1)]
                    .eval(&coords)
                    .unwrap_or(f64::NAN);
                S::from_f64(v)
            });
            // surface located evaluation errors deterministically
            for expr in &exprs {
                for node in 0..grid.node_count() {
                    expr.eval(&grid.coords(node))
                        .map_err(|e| anyhow!("sampling frame matrix: {e}"))?;
                }
            }
            matrix
                .to_frame(job.tolerances.frame.max(1e-9))
                .map_err(|e| anyhow!(e))
        }
        FrameSpec::Generators(maps) => {
            let n = sig.n();
            if maps.len() != n {
                bail!("need {n} generator definitions");
            }
            // parse every coefficient expression up front
            let mut parsed: Vec<Vec<(usize, ScalarExpr, Option<ScalarExpr>)>> = Vec::new();
            for map in maps {
                let mut entries = Vec::new();
                for (label, value) in map {
                    let mask = cliffield_core::blade::parse_blade_label(label, n)
                        .ok_or_else(|| anyhow!("bad blade label {label:?}"))?;
                    match value {
                        Value::String(src) => {
                            entries.push((mask, job.parse_templated(src)?, None));
                        }
                        Value::Array(pair) if pair.len() == 2 => {
                            let re = pair[0]
                                .as_str()
                                .ok_or_else(|| anyhow!("complex pair must hold expressions"))?;
                            let im = pair[1]
                                .as_str()
                                .ok_or_else(|| anyhow!("complex pair must hold expressions"))?;
                            entries.push((
                                mask,
                                job.parse_templated(re)?,
                                Some(job.parse_templated(im)?),
                            ));
                        }
                        _ => bail!("generator coefficient must be an expression or [re, im]"),
                    }
                }
                parsed.push(entries);
            }
            for entries in &parsed {
                for (_, re, im) in entries {
                    for node in 0..grid.node_count() {
                        let coords = grid.coords(node);
                        re.eval(&coords).map_err(|e| anyhow!("sampling frame: {e}"))?;
                        if let Some(im) = im {
                            im.eval(&coords).map_err(|e| anyhow!("sampling frame: {e}"))?;
                        }
                    }
                }
            }
            let frame = FrameField::from_fn(grid.clone(), sig, |node, a| {
                let coords = grid.coords(node);
                let mut mv = Multivector::zero(sig);
                for (mask, re, im) in &parsed[a - 1] {
                    let re_v = re.eval(&coords).unwrap_or(f64::NAN);
                    let im_v = im.as_ref().map(|e| e.eval(&coords).unwrap_or(f64::NAN));
                    let value = S::try_from_parts(re_v, im_v.unwrap_or(0.0))
                        .unwrap_or_else(S::zero);
                    mv.set_coeff(*mask, value);
                }
                mv
            });
            Ok(frame)
        }
        FrameSpec::File(path) => {
            let field = read_any_field::<S>(Path::new(path))?;
            match field {
                AnyField::Frame(frame) => {
                    if frame.grid() != &grid || frame.signature() != sig {
                        bail!("frame file does not match the job signature/grid");
                    }
                    Ok(frame)
                }
                _ => bail!("file {path:?} does not hold a frame field"),
            }
        }
    }
}

/// Read a field container, choosing JSON or binary by extension.
pub fn read_any_field<S: ClScalar>(path: &Path) -> Result<AnyField<S>> {
    if path.extension().and_then(|e| e.to_str()) == Some("bin") {
        let mut file = std::fs::File::open(path)
            .with_context(|| format!("opening {}", path.display()))?;
        io::read_field_bin(&mut file).map_err(|e| anyhow!(e))
    } else {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))?;
        io::field_from_json(&serde_json::from_str(&text)?).map_err(|e| anyhow!(e))
    }
}

/// Peek at a file to learn its scalar field without committing to a type.
pub fn peek_file_scalar(path: &Path) -> Result<ScalarField> {
    if path.extension().and_then(|e| e.to_str()) == Some("bin") {
        use std::io::Read;
        let mut file = std::fs::File::open(path)?;
        let mut head = [0u8; 12];
        file.read_exact(&mut head)?;
        let len = u32::from_le_bytes(head[8..12].try_into().unwrap()) as usize;
        let mut header = vec![0u8; len];
        file.read_exact(&mut header)?;
        let value: Value = serde_json::from_slice(&header)?;
        io::peek_scalar_field(&value).map_err(|e| anyhow!(e))
    } else {
        let text = std::fs::read_to_string(path)?;
        let value: Value = serde_json::from_str(&text)?;
        io::peek_scalar_field(&value).map_err(|e| anyhow!(e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn template_expansion() {
        let mut params = BTreeMap::new();
        params.insert("phi".to_string(), "sin(x1)*cos(x2)".to_string());
        let out = expand_templates("cos({phi})+1", &params).unwrap();
        assert_eq!(out, "cos((sin(x1)*cos(x2)))+1");
        assert!(expand_templates("cos({nope})", &params).is_err());
        assert!(expand_templates("cos({phi)", &params).is_err());
    }

    #[test]
    fn grid_flag_parses() {
        let spec = GridSpec::parse_flag("5,6;0,1;0.1,0.2").unwrap();
        assert_eq!(spec.shape, vec![5, 6]);
        assert_eq!(spec.origin, vec![0.0, 1.0]);
        assert_eq!(spec.spacing, vec![0.1, 0.2]);
        assert!(GridSpec::parse_flag("5,6;0,1").is_err());
    }

    #[test]
    fn matrix_job_builds_frame() {
        let job: JobSpec = serde_json::from_value(serde_json::json!({
            "signature": {"p": 2, "q": 0, "field": "R"},
            "grid": {"shape": [6, 6], "origin": [0.0, 0.0], "spacing": [0.2, 0.2]},
            "params": {"phi": "sin(x1)*cos(x2)"},
            "frame": {"matrix": [["cos({phi})", "sin({phi})"], ["-sin({phi})", "cos({phi})"]]}
        }))
        .unwrap();
        let frame = build_frame::<f64>(&job).unwrap();
        assert!(frame.max_relation_residual(1e-12) < 1e-12);
    }

    #[test]
    fn generator_job_builds_frame() {
        let job: JobSpec = serde_json::from_value(serde_json::json!({
            "signature": {"p": 1, "q": 1, "field": "R"},
            "grid": {"shape": [5, 5], "origin": [0.0, 0.0], "spacing": [0.1, 0.1]},
            "params": {"phi": "0.3*x1"},
            "frame": {"generators": [
                {"1": "cosh({phi})", "2": "sinh({phi})"},
                {"1": "sinh({phi})", "2": "cosh({phi})"}
            ]}
        }))
        .unwrap();
        let frame = build_frame::<f64>(&job).unwrap();
        assert!(frame.max_relation_residual(1e-12) < 1e-12);
    }

    #[test]
    fn dimension_mismatch_is_caught() {
        let job: JobSpec = serde_json::from_value(serde_json::json!({
            "signature": {"p": 2, "q": 0, "field": "R"},
            "grid": {"shape": [6, 6], "origin": [0.0, 0.0], "spacing": [0.2, 0.2]},
            "frame": {"matrix": [["cos(x3)", "sin(x1)"], ["-sin(x1)", "cos(x1)"]]}
        }))
        .unwrap();
        let err = build_frame::<f64>(&job).unwrap_err().to_string();
        assert!(err.contains("x3"), "{err}");
    }
}
