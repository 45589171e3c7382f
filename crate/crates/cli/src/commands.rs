//! Subcommands of `kstar`.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use kstar_core::coeffs::{
    coeff_1d_table, cpn_closed_table, cpn_recurrence, solve_g22, solve_general, verify_residual,
    RecurrenceCoordinate,
};
use kstar_core::star::{check_associativity, check_poisson, check_unit};
use kstar_core::{ChartFunction, CoefficientTable, HRational, HSeries, Monomial, StarProduct, ZPoly};

use crate::manifold::Manifold;
use crate::parse::parse;
use crate::{CliError, EXIT_FAILED, EXIT_OK};

#[derive(Debug, Parser)]
#[command(name = "kstar", version, about = "Exact star products with separation of variables")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute a coefficient table.
    Coeffs(CoeffsArgs),
    /// Evaluate a truncated star product on a CP^N chart.
    Star(StarArgs),
    /// Check a stored table.
    Verify(VerifyArgs),
    /// Print the h-series of every coefficient as CSV.
    Expand(ExpandArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    General,
    Closed,
    Recurrence,
}

#[derive(Debug, Args)]
pub struct CoeffsArgs {
    /// cpn:N, grassmann:p,q, g22, onedim:g,R or custom:FILE
    #[arg(long)]
    pub manifold: String,
    #[arg(long)]
    pub order: usize,
    #[arg(long, value_enum)]
    pub method: Option<Method>,
    /// Write the table here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the h-series of each coefficient as CSV.
    #[arg(long, requires = "hbar_order")]
    pub csv: Option<PathBuf>,
    #[arg(long)]
    pub hbar_order: Option<usize>,
}

#[derive(Debug, Args)]
pub struct StarArgs {
    /// cpn:N
    #[arg(long)]
    pub manifold: String,
    #[arg(long)]
    pub order: usize,
    #[arg(long)]
    pub f: String,
    #[arg(long)]
    pub g: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub table: PathBuf,
    /// Check every order against the defining linear system (the default).
    #[arg(long)]
    pub residuals: bool,
    /// Check the star-product axioms on test monomials (CP^N tables only).
    #[arg(long, requires = "order")]
    pub axioms: bool,
    #[arg(long)]
    pub order: Option<usize>,
    /// Recompute the table with every available method and compare.
    #[arg(long)]
    pub triangulate: bool,
}

#[derive(Debug, Args)]
pub struct ExpandArgs {
    #[arg(long)]
    pub table: PathBuf,
    #[arg(long)]
    pub hbar_order: usize,
}

/// Runs one command, writing its report to `out`; returns the exit code.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    match &cli.command {
        Command::Coeffs(a) => coeffs(a, out),
        Command::Star(a) => star(a, out),
        Command::Verify(a) => verify(a, out),
        Command::Expand(a) => expand(a, out),
    }
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| io_err(path, e))
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), CliError> {
    writeln!(out, "{text}").map_err(|e| CliError::Io(e.to_string()))
}

fn default_method(m: &Manifold) -> Method {
    match m {
        Manifold::Cpn(_) => Method::Closed,
        Manifold::G22 => Method::Recurrence,
        _ => Method::General,
    }
}

fn methods_for(m: &Manifold) -> Vec<Method> {
    match m {
        Manifold::Cpn(_) => vec![Method::General, Method::Closed, Method::Recurrence],
        Manifold::G22 | Manifold::Grassmann(2, 2) => vec![Method::General, Method::Recurrence],
        Manifold::OneDim(..) => vec![Method::General, Method::Closed],
        _ => vec![Method::General],
    }
}

pub fn build_table(m: &Manifold, order: usize, method: Method) -> Result<CoefficientTable, CliError> {
    if !methods_for(m).contains(&method) {
        let name = method.to_possible_value().expect("no skipped variants");
        return Err(CliError::Input(format!("method {} is not available for this manifold", name.get_name())));
    }
    Ok(match (m, method) {
        (Manifold::Cpn(n), Method::Closed) => cpn_closed_table(*n, order)?,
        (Manifold::Cpn(n), Method::Recurrence) => cpn_recurrence(*n, order, RecurrenceCoordinate::First)?,
        (Manifold::OneDim(g, r), Method::Closed) => coeff_1d_table(g, r, order)?,
        (_, Method::Recurrence) => solve_g22(order)?,
        (_, _) => solve_general(&m.geometry()?, order)?,
    })
}

fn coeffs(a: &CoeffsArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let manifold: Manifold = a.manifold.parse()?;
    let method = a.method.unwrap_or_else(|| default_method(&manifold));
    let table = build_table(&manifold, a.order, method)?;
    let json = table.to_json();
    match &a.out {
        Some(path) => write_file(path, &(json + "\n"))?,
        None => emit(out, &json)?,
    }
    if let (Some(path), Some(j)) = (&a.csv, a.hbar_order) {
        write_file(path, &table.to_csv(j)?)?;
    }
    Ok(EXIT_OK)
}

fn star(a: &StarArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let Manifold::Cpn(n) = a.manifold.parse()? else {
        return Err(CliError::Input("star products are evaluated on cpn:N only".into()));
    };
    let f = parse(&a.f, n)?;
    let g = parse(&a.g, n)?;
    let table = cpn_closed_table(n, a.order)?;
    let sp = StarProduct::<HRational>::from_table(&table, a.order)?;
    let result = sp.star(&f.lower(n), &g.lower(n));
    let text = result.value.to_string();
    emit(out, &text)?;
    if let Some(path) = &a.out {
        let report = json!({
            "manifold": a.manifold,
            "order": a.order,
            "f": f.to_string(),
            "g": g.to_string(),
            "truncation_order": result.truncation_order,
            "result": result.value.to_repr(),
            "text": text,
        });
        write_file(path, &(serde_json::to_string_pretty(&report).expect("json") + "\n"))?;
    }
    Ok(EXIT_OK)
}

fn load_table(path: &Path) -> Result<CoefficientTable, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    Ok(CoefficientTable::from_json(&text)?)
}

fn verify(a: &VerifyArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let table = load_table(&a.table)?;
    let mut report = serde_json::Map::new();
    let mut passed = true;
    if a.residuals || !(a.axioms || a.triangulate) {
        let orders: Vec<Value> = (0..=table.max_order())
            .map(|n| {
                let r = verify_residual(&table, table.geometry(), n);
                passed &= r.passed();
                let violations: Vec<Value> = r
                    .violations
                    .iter()
                    .map(|v| json!({"i": v.i, "alpha": v.alpha, "beta": v.beta, "residual": v.residual.to_string()}))
                    .collect();
                json!({"order": n, "equations": r.equations, "passed": r.passed(), "violations": violations})
            })
            .collect();
        report.insert("residuals".into(), Value::Array(orders));
    }
    if a.axioms {
        let order = a.order.expect("clap enforces --order");
        let axioms = axiom_suite(&table, order)?;
        passed &= axioms["passed"].as_bool().unwrap_or(false);
        report.insert("axioms".into(), axioms);
    }
    if a.triangulate {
        let manifold = Manifold::of_kind(table.geometry().kind());
        let mut methods = serde_json::Map::new();
        match manifold {
            Some(m) => {
                for method in methods_for(&m) {
                    let other = build_table(&m, table.max_order(), method)?;
                    let diffs = table.differences(&other).len();
                    passed &= diffs == 0;
                    methods.insert(format!("{method:?}").to_lowercase(), json!({"differences": diffs}));
                }
            }
            None => {
                let other = solve_general(table.geometry(), table.max_order())?;
                let diffs = table.differences(&other).len();
                passed &= diffs == 0;
                methods.insert("general".into(), json!({"differences": diffs}));
            }
        }
        report.insert("triangulate".into(), Value::Object(methods));
    }
    report.insert("passed".into(), Value::Bool(passed));
    emit(out, &serde_json::to_string_pretty(&Value::Object(report)).expect("json"))?;
    Ok(if passed { EXIT_OK } else { EXIT_FAILED })
}

/// Monomials in the `2 dim` chart variables of total degree `<= max_degree`.
pub fn monomials(dim: usize, max_degree: u32) -> Vec<ChartFunction<HRational>> {
    let mut out = Vec::new();
    let mut exps = vec![0u32; 2 * dim];
    fn go(k: usize, left: u32, exps: &mut Vec<u32>, dim: usize, out: &mut Vec<ChartFunction<HRational>>) {
        if k == exps.len() {
            let m = Monomial::from_exponents(exps);
            out.push(ChartFunction::polynomial(dim, ZPoly::monomial(m, HRational::one())));
            return;
        }
        for e in 0..=left {
            exps[k] = e;
            go(k + 1, left - e, exps, dim, out);
        }
        exps[k] = 0;
    }
    go(0, max_degree, &mut exps, dim, &mut out);
    out
}

/// Unit law, separation of variables and the Poisson limit on monomials of
/// degree `<= 2`, and associativity through `h^order` on monomials of
/// degree `<= 1`.
fn axiom_suite(table: &CoefficientTable, order: usize) -> Result<Value, CliError> {
    let sp = StarProduct::<HRational>::from_table(table, order)?;
    let dim = sp.dim();
    let funcs = monomials(dim, 2);
    let unit = funcs.iter().all(|f| check_unit(f, &sp).passed);
    let mut separation = true;
    for a in funcs.iter().filter(|f| f.is_holomorphic()) {
        for g in &funcs {
            separation &= sp.star(a, g).value == a.mul(g);
        }
    }
    for b in funcs.iter().filter(|f| f.is_antiholomorphic()) {
        for f in &funcs {
            separation &= sp.star(f, b).value == f.mul(b);
        }
    }
    let mut poisson = true;
    if order >= 1 {
        for f in &funcs {
            for g in &funcs {
                poisson &= check_poisson(f, g, &sp).map_err(|e| CliError::Input(e.to_string()))?.passed;
            }
        }
    }
    let series = StarProduct::<HSeries>::from_table(table, order)?;
    let lift = |f: &ChartFunction<HRational>| f.map_coeffs(|c| HSeries::from_hrational(c, order).expect("polynomial"));
    let small: Vec<_> = monomials(dim, 1).iter().map(lift).collect();
    let mut associativity = true;
    for f in &small {
        for g in &small {
            for h in &small {
                associativity &= check_associativity(f, g, h, &series)
                    .map_err(|e| CliError::Input(e.to_string()))?
                    .passed;
            }
        }
    }
    Ok(json!({
        "order": order,
        "unit": unit,
        "separation": separation,
        "poisson": poisson,
        "associativity": associativity,
        "passed": unit && separation && poisson && associativity,
    }))
}

fn expand(a: &ExpandArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let table = load_table(&a.table)?;
    let csv = table.to_csv(a.hbar_order)?;
    out.write_all(csv.as_bytes()).map_err(|e| CliError::Io(e.to_string()))?;
    Ok(EXIT_OK)
}
