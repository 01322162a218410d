//! ξ sweeps: enclosures per method on a grid, optionally normalized, with
//! the error components relative to κ̃.

use grained::closedform::{self, interval_factor, Method};
use grained::integral::{estimate_closed, estimate_kappa, estimate_nu, hat_allowance, Engine, QuadratureConfig};
use grained::multiplicity::nonsquarefree_kappa_scale;
use grained::primes::ErrorBoundMode;
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::args::Normalize;
use crate::commands::{CliError, CliResult, Grain};

const MODES: [ErrorBoundMode; 2] = [ErrorBoundMode::Riemann, ErrorBoundMode::Dusart];

/// Columns appended in `relative_to_kappa_tilde` mode, after `kappa_tilde`.
pub const ERROR_COLUMNS: [&str; 9] = [
    "lambda_tilde_err",
    "eta_tilde_err",
    "lambda_hat_bound_riemann",
    "lambda_hat_bound_dusart",
    "lambda_hat_riemann",
    "lambda_hat_dusart",
    "kappa_hat_riemann",
    "kappa_hat_dusart",
    "nonsquarefree",
];

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub grain: Grain,
    pub k: u32,
    pub xi: Vec<f64>,
    pub methods: Vec<Method>,
    pub mode: ErrorBoundMode,
    pub normalize: Normalize,
    pub cfg: QuadratureConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub xi: f64,
    pub x: f64,
    /// One entry per column between `x` and `note`.
    pub values: Vec<f64>,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    /// `(key, value)` pairs written as `# key: value` lines.
    pub header: Vec<(String, String)>,
    /// All column names, `xi` and `x` first and `note` last.
    pub columns: Vec<String>,
    pub rows: Vec<SweepRow>,
}

fn normalize_name(n: Normalize) -> &'static str {
    match n {
        Normalize::Absolute => "absolute",
        Normalize::PerX => "per_x",
        Normalize::RelativeToKappaTilde => "relative_to_kappa_tilde",
    }
}

// Engines are built once and shared read-only by the row workers; a failed
// build becomes a note on every affected cell.
type Built = Result<Engine, String>;

fn build(g: &Grain, method: Method, k: u32, mode: Option<ErrorBoundMode>, cfg: QuadratureConfig) -> Built {
    Engine::new(g.b as f64, g.c, method, k, mode, cfg).map_err(|e| e.to_string())
}

pub fn run_sweep(spec: &SweepSpec) -> CliResult<SweepTable> {
    if spec.methods.is_empty() {
        return Err(CliError::Usage("no methods given".into()));
    }
    if spec.xi.is_empty() {
        return Err(CliError::Usage("empty ξ grid".into()));
    }
    let g = spec.grain;
    let k = spec.k;
    let sp = g.shape(k)?;
    let relative = spec.normalize == Normalize::RelativeToKappaTilde;
    let mut methods = spec.methods.clone();
    methods.dedup();

    let needs_kappa = relative || methods.contains(&Method::Kappa);
    let kappa_main = if needs_kappa {
        Some(Engine::new(g.b as f64, g.c, Method::Kappa, k, Some(spec.mode), spec.cfg)?)
    } else {
        None
    };
    let nu = if methods.contains(&Method::Nu) {
        Some(Engine::new(g.b as f64, g.c, Method::Nu, k, None, spec.cfg)?)
    } else {
        None
    };
    let (kappa_by_mode, lambda_by_mode): (Vec<Built>, Vec<Built>) = if relative {
        MODES
            .iter()
            .map(|&m| {
                let kap = if m == spec.mode {
                    Ok(kappa_main.clone().unwrap())
                } else {
                    build(&g, Method::Kappa, k, Some(m), spec.cfg)
                };
                (kap, build(&g, Method::Lambda, k, Some(m), spec.cfg))
            })
            .unzip()
    } else {
        (Vec::new(), Vec::new())
    };

    let mut columns: Vec<String> = vec!["xi".into(), "x".into()];
    for m in &methods {
        columns.push(format!("{}_lower", m.name()));
        columns.push(format!("{}_upper", m.name()));
    }
    if relative {
        columns.push("kappa_tilde".into());
        columns.extend(ERROR_COLUMNS.iter().map(|s| s.to_string()));
    }
    columns.push("note".into());

    let lf = interval_factor(Method::Lambda, sp.alpha, k);
    let ef = interval_factor(Method::Eta, sp.alpha, k);

    let rows: Vec<SweepRow> = spec
        .xi
        .par_iter()
        .map(|&xi| {
            let x = sp.x_of_xi(xi);
            let mut notes: Vec<String> = Vec::new();
            let mut vals: Vec<f64> = Vec::new();
            let mut kt = f64::NAN;
            if let Some(eng) = &kappa_main {
                match eng.values(k, x) {
                    Ok((t, _)) => kt = t,
                    Err(e) => notes.push(format!("kappa: {e}")),
                }
            }
            let scale = match spec.normalize {
                Normalize::Absolute => 1.0,
                Normalize::PerX => x,
                Normalize::RelativeToKappaTilde => {
                    if !(kt > 0.0) {
                        notes.push("kappa_tilde is zero".into());
                    }
                    kt
                }
            };
            for &m in &methods {
                let e = match m {
                    Method::Lambda | Method::Eta => estimate_closed(m, &sp, x, spec.mode),
                    Method::Nu => estimate_nu(nu.as_ref().unwrap(), &sp, x, spec.mode),
                    Method::Kappa => estimate_kappa(kappa_main.as_ref().unwrap(), k, x),
                };
                match e {
                    Ok(e) => {
                        vals.push(e.lower / scale);
                        vals.push(e.upper / scale);
                    }
                    Err(err) => {
                        notes.push(format!("{}: {err}", m.name()));
                        vals.extend([f64::NAN; 2]);
                    }
                }
            }
            if relative {
                vals.push(kt);
                let lt = closedform::lambda_tilde(&sp, xi);
                let et = closedform::eta_tilde(&sp, xi);
                vals.push((1.0 - lf) * lt / scale);
                vals.push((1.0 - ef) * et / scale);
                for m in MODES {
                    vals.push(match hat_allowance(&sp, x, m) {
                        Ok(v) => v / scale,
                        Err(e) => {
                            notes.push(format!("lambda_hat_bound_{}: {e}", m.name()));
                            f64::NAN
                        }
                    });
                }
                for (name, engines) in [("lambda_hat", &lambda_by_mode), ("kappa_hat", &kappa_by_mode)] {
                    for (m, eng) in MODES.iter().zip(engines) {
                        let v = match eng {
                            Ok(eng) => eng.hat(k, x).map_err(|e| e.to_string()),
                            Err(e) => Err(e.clone()),
                        };
                        vals.push(match v {
                            Ok(v) => v / scale,
                            Err(e) => {
                                notes.push(format!("{name}_{}: {e}", m.name()));
                                f64::NAN
                            }
                        });
                    }
                }
                vals.push(nonsquarefree_kappa_scale(k as usize, x, g.b as f64) / scale);
            }
            SweepRow {
                xi,
                x,
                values: vals,
                note: notes.join("; "),
            }
        })
        .collect();

    let cfg = spec.cfg;
    let header = vec![
        ("command".into(), "sweep".into()),
        ("version".into(), env!("CARGO_PKG_VERSION").into()),
        ("B".into(), g.b.to_string()),
        ("C".into(), format!("{:.16e}", g.c)),
        ("alpha".into(), format!("{:.16e}", g.alpha)),
        ("k".into(), k.to_string()),
        (
            "methods".into(),
            methods.iter().map(|m| m.name()).collect::<Vec<_>>().join(","),
        ),
        ("mode".into(), spec.mode.name().into()),
        ("normalize".into(), normalize_name(spec.normalize).into()),
        (
            "xi".into(),
            format!(
                "{} points from {} to {}",
                spec.xi.len(),
                spec.xi[0],
                spec.xi[spec.xi.len() - 1]
            ),
        ),
        ("x".into(), "B^(k+xi*alpha)".into()),
        ("rel_tol".into(), format!("{:e}", cfg.rel_tol)),
        ("abs_tol".into(), format!("{:e}", cfg.abs_tol)),
        ("max_depth".into(), cfg.max_depth.to_string()),
    ];
    Ok(SweepTable { header, columns, rows })
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

impl SweepTable {
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.header {
            s.push_str(&format!("# {k}: {v}\n"));
        }
        s.push_str(&self.columns.join(","));
        s.push('\n');
        for r in &self.rows {
            let mut f = vec![num(r.xi), num(r.x)];
            f.extend(r.values.iter().map(|&v| num(v)));
            f.push(csv_field(&r.note));
            s.push_str(&f.join(","));
            s.push('\n');
        }
        s
    }

    pub fn to_json(&self) -> String {
        let header: Map<String, Value> = self
            .header
            .iter()
            .map(|(k, v)| (k.clone(), Value::String(v.clone())))
            .collect();
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let mut o = Map::new();
                let cells = [r.xi, r.x].into_iter().chain(r.values.iter().copied());
                for (name, v) in self.columns.iter().zip(cells) {
                    // NaN has no JSON form
                    o.insert(name.clone(), serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number));
                }
                o.insert("note".into(), Value::String(r.note.clone()));
                Value::Object(o)
            })
            .collect();
        format!("{}\n", json!({"header": header, "columns": self.columns, "rows": rows}))
    }

    /// Index of a column among `values` (after `xi` and `x`).
    pub fn value_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)?.checked_sub(2)
    }
}
