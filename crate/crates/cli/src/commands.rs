//! Subcommand implementations. Each returns a [`Report`]; the binary prints
//! it and maps failures to exit codes.

use std::io;

use grained::closedform::{Method, ShapeParams};
use grained::exact::{classify_case, ExactCounter};
use grained::integral::{estimate_closed, estimate_kappa, estimate_nu, Engine, EstimateInterval, QuadratureConfig};
use grained::primes::{verify_pnt, ErrorBoundMode};
use grained::sturmverify::{sturm_table, sturm_table_csv};
use grained::GrainParams;
use rayon::prelude::*;
use serde_json::json;
use thiserror::Error;

use crate::args::*;
use crate::parse::{parse_alpha, parse_f64, parse_k_range, parse_u64, AlphaSpec, ParseError};
use crate::sweep::{run_sweep, SweepSpec};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] grained::Error),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl CliError {
    /// 2 for bad input, 3 for budget, accuracy and I/O failures.
    pub fn exit_code(&self) -> i32 {
        use grained::Error as E;
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(E::Domain(_) | E::InvalidParams(_) | E::Precondition(_)) => 2,
            CliError::Core(E::Resource(_) | E::Accuracy { .. }) => 3,
            CliError::Io(_) => 3,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Command output and whether every check passed.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub text: String,
    pub ok: bool,
}

impl Report {
    fn ok(text: String) -> Self {
        Report { text, ok: true }
    }
}

/// `B`, `C` and `α` after resolving the command line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grain {
    pub b: u64,
    pub c: f64,
    /// `C` as an integer when it fits.
    pub c_int: Option<u64>,
    pub alpha: f64,
}

impl Grain {
    pub fn resolve(b: &str, c: Option<&str>, alpha: Option<&str>) -> CliResult<Grain> {
        let b = parse_u64(b)?;
        if b < 2 {
            return Err(CliError::Usage(format!("B = {b} must be at least 2")));
        }
        let bf = b as f64;
        let from_c = |c: u64| -> CliResult<Grain> {
            GrainParams::new(b, c, 0)?;
            Ok(Grain {
                b,
                c: c as f64,
                c_int: Some(c),
                alpha: (c as f64).ln() / bf.ln() - 1.0,
            })
        };
        match (c, alpha) {
            (Some(c), None) => from_c(parse_u64(c)?),
            (None, Some(a)) => match parse_alpha(a)? {
                AlphaSpec::Exponent(s) => from_c(GrainParams::from_exponent(b, s, 0)?.c),
                AlphaSpec::Alpha(a) => {
                    let c = bf.powf(1.0 + a);
                    if !c.is_finite() {
                        return Err(CliError::Usage(format!("B^(1+{a}) overflows")));
                    }
                    let c_int = (c < u64::MAX as f64).then(|| c.floor() as u64);
                    Ok(Grain {
                        b,
                        c,
                        c_int,
                        alpha: a,
                    })
                }
            },
            _ => Err(CliError::Usage("give exactly one of --C and --alpha".into())),
        }
    }

    pub fn from_args(g: &GrainArgs) -> CliResult<Grain> {
        Grain::resolve(&g.b, g.c.as_deref(), g.alpha.as_deref())
    }

    pub fn params(&self, k: u32) -> CliResult<GrainParams> {
        let c = self
            .c_int
            .ok_or_else(|| CliError::Usage(format!("C = {} does not fit an integer", self.c)))?;
        Ok(GrainParams::new(self.b, c, k)?)
    }

    pub fn shape(&self, k: u32) -> CliResult<ShapeParams> {
        Ok(ShapeParams::new(self.b as f64, self.alpha, k)?)
    }

    fn x_at(&self, k: u32, point: &PointArgs) -> CliResult<(f64, f64)> {
        let sp = self.shape(k)?;
        match (&point.x, &point.xi) {
            (Some(x), None) => {
                let x = parse_f64(x)?;
                if x < 0.0 {
                    return Err(CliError::Usage(format!("x = {x} must be non-negative")));
                }
                Ok((x, sp.xi_of_x(x)))
            }
            (None, Some(xi)) => {
                let xi = parse_f64(xi)?;
                Ok((sp.x_of_xi(xi), xi))
            }
            _ => Err(CliError::Usage("give exactly one of --x and --xi".into())),
        }
    }
}

pub fn mode_of(m: ModeArg) -> ErrorBoundMode {
    match m {
        ModeArg::Riemann => ErrorBoundMode::Riemann,
        ModeArg::Dusart => ErrorBoundMode::Dusart,
    }
}

pub fn method_of(m: MethodArg) -> Method {
    match m {
        MethodArg::Lambda => Method::Lambda,
        MethodArg::Nu => Method::Nu,
        MethodArg::Eta => Method::Eta,
        MethodArg::Kappa => Method::Kappa,
    }
}

fn quad_config(rel_tol: &str) -> CliResult<QuadratureConfig> {
    let cfg = QuadratureConfig::default().with_rel_tol(parse_f64(rel_tol)?);
    cfg.validate()?;
    Ok(cfg)
}

pub fn cmd_exact(a: &ExactArgs) -> CliResult<Report> {
    let g = Grain::from_args(&a.grain)?;
    let p = g.params(a.k)?;
    let (x, _) = if a.k == 0 {
        // ξ has no meaning without prime factors
        match &a.point.x {
            Some(x) => (parse_f64(x)?, 0.0),
            None => return Err(CliError::Usage("k = 0 needs --x".into())),
        }
    } else {
        g.x_at(a.k, &a.point)?
    };
    let counter = ExactCounter::for_params(&p)?;
    let kappa = counter.kappa(a.k, x)?;
    let pi = counter.pi(a.k, x)?;
    let text = if a.json {
        let v = json!({
            "B": p.b, "C": p.c, "k": p.k, "x": x,
            "kappa": kappa, "pi": pi,
        });
        format!("{v}\n")
    } else {
        format!("kappa {kappa}\npi {pi}\n")
    };
    Ok(Report::ok(text))
}

/// One enclosure at `x`, building whatever engine the method needs.
pub fn estimate_at(
    g: &Grain,
    k: u32,
    x: f64,
    method: Method,
    mode: ErrorBoundMode,
    cfg: QuadratureConfig,
) -> CliResult<EstimateInterval> {
    let sp = g.shape(k)?;
    let b = g.b as f64;
    Ok(match method {
        Method::Lambda | Method::Eta => estimate_closed(method, &sp, x, mode)?,
        Method::Nu => {
            let eng = Engine::new(b, g.c, Method::Nu, k, None, cfg)?;
            estimate_nu(&eng, &sp, x, mode)?
        }
        Method::Kappa => {
            let eng = Engine::new(b, g.c, Method::Kappa, k, Some(mode), cfg)?;
            estimate_kappa(&eng, k, x)?
        }
    })
}

pub fn cmd_estimate(a: &EstimateArgs) -> CliResult<Report> {
    let g = Grain::from_args(&a.grain)?;
    let (x, xi) = g.x_at(a.k, &a.point)?;
    let mode = mode_of(a.mode);
    let method = method_of(a.method);
    let e = estimate_at(&g, a.k, x, method, mode, quad_config(&a.rel_tol)?)?;
    let text = if a.json {
        let v = json!({
            "B": g.b, "C": g.c, "alpha": g.alpha, "k": a.k,
            "x": x, "xi": xi, "method": method.name(), "mode": mode.name(),
            "lower": e.lower, "upper": e.upper, "center": e.center(),
        });
        format!("{v}\n")
    } else {
        format!(
            "method {}\nmode {}\nx {:.16e}\nxi {:.16e}\nlower {:.16e}\nupper {:.16e}\ncenter {:.16e}\n",
            method.name(),
            mode.name(),
            x,
            xi,
            e.lower,
            e.upper,
            e.center()
        )
    };
    Ok(Report::ok(text))
}

pub fn cmd_sweep(a: &SweepArgs) -> CliResult<Report> {
    let g = Grain::from_args(&a.grain)?;
    let spec = SweepSpec {
        grain: g,
        k: a.k,
        xi: crate::parse::parse_xi_grid(&a.xi)?,
        methods: a.methods.iter().map(|&m| method_of(m)).collect(),
        mode: mode_of(a.mode),
        normalize: a.normalize,
        cfg: quad_config(&a.rel_tol)?,
    };
    let table = run_sweep(&spec)?;
    let text = if a.json { table.to_json() } else { table.to_csv() };
    match &a.out {
        Some(path) => {
            std::fs::write(path, &text)?;
            Ok(Report::ok(format!(
                "wrote {} rows to {}\n",
                table.rows.len(),
                path.display()
            )))
        }
        None => Ok(Report::ok(text)),
    }
}

/// Minimal `s` and degree of `g_{k,s}` established for `3 ≤ k ≤ 9`.
pub const STURM_REFERENCE: [(u32, u32, usize); 7] =
    [(3, 4, 11), (4, 3, 13), (5, 4, 21), (6, 5, 31), (7, 6, 43), (8, 7, 57), (9, 8, 73)];

fn verify_sturm(a: &VerifyArgs) -> CliResult<Report> {
    let ks = parse_k_range(a.k.as_deref().unwrap_or("3..7"))?;
    let rows = sturm_table(&ks)?;
    let mut ok = true;
    let mut notes = String::new();
    for r in &rows {
        if let Some(&(_, s, d)) = STURM_REFERENCE.iter().find(|t| t.0 == r.k) {
            if (s, d) != (r.min_s, r.degree) {
                ok = false;
                notes.push_str(&format!(
                    "# mismatch k={}: got s={} deg={}, expected s={s} deg={d}\n",
                    r.k, r.min_s, r.degree
                ));
            }
        }
    }
    let text = if a.json {
        let v: Vec<_> = rows
            .iter()
            .map(|r| json!({"k": r.k, "min_s": r.min_s, "degree": r.degree, "elapsed_secs": r.elapsed_secs}))
            .collect();
        format!("{}\n", json!({"rows": v, "ok": ok}))
    } else {
        format!("{}{notes}", sturm_table_csv(&rows))
    };
    Ok(Report { text, ok })
}

fn verify_pnt_cmd(a: &VerifyArgs) -> CliResult<Report> {
    let max = parse_u64(&a.max)?;
    let r = verify_pnt(max, mode_of(a.mode), &[])?;
    let failures: Vec<_> = r.checkpoints.iter().filter(|c| c.margin <= 0.0).collect();
    let text = if a.json {
        let v = json!({
            "x_max": r.x_max, "mode": r.mode.name(), "checkpoints": r.checkpoints.len(),
            "max_abs_diff": r.max_abs_diff, "all_pass": r.all_pass,
            "failures": failures,
        });
        format!("{v}\n")
    } else {
        let mut s = format!(
            "# mode={} x_max={} checkpoints={} max|pi-li|={:.6}\n",
            r.mode.name(),
            r.x_max,
            r.checkpoints.len(),
            r.max_abs_diff
        );
        for c in &failures {
            s.push_str(&format!(
                "FAIL x={} pi={} li={:.6} bound={:.6} margin={:.6}\n",
                c.x, c.pi, c.li, c.bound, c.margin
            ));
        }
        s.push_str(if r.all_pass { "all checkpoints pass\n" } else { "some checkpoints fail\n" });
        s
    };
    Ok(Report { text, ok: r.all_pass })
}

/// One row of the sandwich check.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SandwichRow {
    pub k: u32,
    pub x: f64,
    pub case: i32,
    pub kappa: u128,
    pub kappa_tilde: f64,
    pub kappa_hat: f64,
    pub ok: bool,
}

/// `|κ − κ̃| ≤ κ̂` on `points` geometric x values from `0.8·B^k` to `1.2·C^k`.
pub fn sandwich_rows(
    g: &Grain,
    k: u32,
    points: usize,
    mode: ErrorBoundMode,
    cfg: QuadratureConfig,
) -> CliResult<Vec<SandwichRow>> {
    let p = g.params(k)?;
    let eng = Engine::for_params(&p, Method::Kappa, Some(mode), cfg)?;
    let counter = ExactCounter::for_params(&p)?;
    let lo = 0.8 * (p.b as f64).powi(k as i32);
    let hi = 1.2 * (p.c as f64).powi(k as i32);
    let n = points.max(2) - 1;
    (0..=n)
        .into_par_iter()
        .map(|i| {
            let x = lo * (hi / lo).powf(i as f64 / n as f64);
            let (t, h) = eng.values(k, x)?;
            let kappa = counter.kappa(k, x)?;
            Ok(SandwichRow {
                k,
                x,
                case: classify_case(&p, x).0,
                kappa,
                kappa_tilde: t,
                kappa_hat: h,
                ok: (kappa as f64 - t).abs() <= h,
            })
        })
        .collect()
}

fn verify_sandwich(a: &VerifyArgs) -> CliResult<Report> {
    let b = a
        .b
        .as_deref()
        .ok_or_else(|| CliError::Usage("sandwich needs --B".into()))?;
    let g = Grain::resolve(b, a.c.as_deref(), a.alpha.as_deref())?;
    let ks = parse_k_range(a.k.as_deref().unwrap_or("2"))?;
    let cfg = quad_config(&a.rel_tol)?;
    let mode = mode_of(a.mode);
    let mut rows = Vec::new();
    for k in ks {
        rows.extend(sandwich_rows(&g, k, a.points, mode, cfg)?);
    }
    let ok = rows.iter().all(|r| r.ok);
    let text = if a.json {
        format!("{}\n", json!({"rows": rows, "ok": ok}))
    } else {
        let mut s = String::from("k,x,case,kappa,kappa_tilde,kappa_hat,ok\n");
        for r in &rows {
            s.push_str(&format!(
                "{},{:.16e},{},{},{:.16e},{:.16e},{}\n",
                r.k, r.x, r.case, r.kappa, r.kappa_tilde, r.kappa_hat, r.ok
            ));
        }
        s
    };
    Ok(Report { text, ok })
}

pub fn cmd_verify(a: &VerifyArgs) -> CliResult<Report> {
    match a.target {
        VerifyTarget::Pnt => verify_pnt_cmd(a),
        VerifyTarget::Sturm => verify_sturm(a),
        VerifyTarget::Sandwich => verify_sandwich(a),
    }
}

pub fn run(cli: &Cli) -> CliResult<Report> {
    match &cli.command {
        Command::Exact(a) => cmd_exact(a),
        Command::Estimate(a) => cmd_estimate(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Verify(a) => cmd_verify(a),
    }
}
