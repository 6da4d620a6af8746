//! Command-line and config-file parsing into a validated [`RunConfig`].
//!
//! Every subcommand owns a table of keys. Flags, config-file entries and
//! defaults all go through the same table, so an unknown key is rejected no
//! matter where it comes from, and every number is range-checked before any
//! computation starts.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Arg, ArgAction, Command as ClapCommand};
use critline::dirichlet::{CharacterGroup, MAX_MODULUS};
use critline::levinson::{LevinsonForm, LevinsonParams};
use critline::moment::{MomentOptions, MAX_MOMENT_HEIGHT};
use critline::optimizer::{SearchSpace, MAX_DEGREE, MAX_RESTARTS};
use critline::polynomial::Polynomial;
use critline::zeta::{MAX_DERIVATIVE_ORDER, MAX_HEIGHT};
use critline::ComplexValue;

use crate::error::CliError;

/// Largest θ the optimizer accepts; the mean-value input needs θ < 1/2.
pub const THETA_CAP: f64 = 0.5 - 1e-9;

/// Largest modulus for the full character table.
pub const MAX_TABLE_MODULUS: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandName {
    Zeta,
    Zeros,
    Chars,
    Lfun,
    Psi,
    Constant,
    Optimize,
    Moment,
    Registry,
}

impl CommandName {
    pub const ALL: [CommandName; 9] = [
        CommandName::Zeta,
        CommandName::Zeros,
        CommandName::Chars,
        CommandName::Lfun,
        CommandName::Psi,
        CommandName::Constant,
        CommandName::Optimize,
        CommandName::Moment,
        CommandName::Registry,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CommandName::Zeta => "zeta",
            CommandName::Zeros => "zeros",
            CommandName::Chars => "chars",
            CommandName::Lfun => "lfun",
            CommandName::Psi => "psi",
            CommandName::Constant => "constant",
            CommandName::Optimize => "optimize",
            CommandName::Moment => "moment",
            CommandName::Registry => "registry",
        }
    }

    fn about(self) -> &'static str {
        match self {
            CommandName::Zeta => "Evaluate zeta, its derivatives, xi and Hardy's Z at a point",
            CommandName::Zeros => "Count and refine sign changes of Z(t) on a grid",
            CommandName::Chars => "Tabulate the Dirichlet characters of a modulus",
            CommandName::Lfun => "Evaluate a Dirichlet L-function",
            CommandName::Psi => "Chebyshev psi(x) by direct summation",
            CommandName::Constant => "Levinson constant c(P,Q,R,theta) and the kappa bound",
            CommandName::Optimize => "Maximize the kappa bound over polynomial coefficients and R",
            CommandName::Moment => "Numerically verify the smoothed mollified second moment",
            CommandName::Registry => "List the published polynomial tuples",
        }
    }

    /// Commands that can emit a CSV table.
    pub fn has_table(self) -> bool {
        matches!(self, CommandName::Zeros | CommandName::Chars | CommandName::Moment)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
    Text,
}

/// A fully validated invocation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: CommandName,
    /// Merged raw values: defaults, then the config file, then flags.
    pub parameters: BTreeMap<String, String>,
    pub output_format: OutputFormat,
    pub output_path: Option<PathBuf>,
    /// Worker threads; 0 means hardware parallelism.
    pub threads: usize,
    /// Typed form of `parameters`.
    pub task: Task,
}

#[derive(Debug, Clone)]
pub enum Task {
    Zeta {
        s: ComplexValue,
        order: usize,
    },
    Zeros {
        t_min: f64,
        t_max: f64,
        step: f64,
    },
    Chars {
        q: u64,
    },
    Lfun {
        q: u64,
        index: usize,
        s: ComplexValue,
    },
    Psi {
        x: f64,
    },
    Constant {
        params: LevinsonParams,
        tolerance: f64,
    },
    Optimize {
        space: SearchSpace,
    },
    Moment {
        params: LevinsonParams,
        t_scale: f64,
        options: MomentOptions,
        tolerance: f64,
        trace_path: Option<PathBuf>,
    },
    Registry {
        theta: f64,
    },
}

#[derive(Debug, Clone, Copy)]
enum Kind {
    Float { min: f64, max: f64 },
    /// Open at the lower end.
    FloatAbove { min: f64, max: f64 },
    Int { min: u64, max: u64 },
    Poly,
    Complex,
    Form,
    Path,
}

#[derive(Debug, Clone, Copy)]
struct KeySpec {
    name: &'static str,
    kind: Kind,
    default: Option<&'static str>,
    help: &'static str,
    positional: bool,
}

const fn key(name: &'static str, kind: Kind, default: Option<&'static str>, help: &'static str) -> KeySpec {
    KeySpec {
        name,
        kind,
        default,
        help,
        positional: false,
    }
}

const fn positional(name: &'static str, kind: Kind, help: &'static str) -> KeySpec {
    KeySpec {
        name,
        kind,
        default: None,
        help,
        positional: true,
    }
}

const THETA: Kind = Kind::FloatAbove { min: 0.0, max: 0.5 };
const SHIFT: Kind = Kind::Float { min: 0.0, max: 10.0 };
const HEIGHT: Kind = Kind::Float {
    min: 0.0,
    max: MAX_HEIGHT,
};

fn keys(command: CommandName) -> Vec<KeySpec> {
    match command {
        CommandName::Zeta => vec![
            key("s", Kind::Complex, None, "point, e.g. 0.5+14.134725i or 0.5,14.134725"),
            key(
                "order",
                Kind::Int {
                    min: 0,
                    max: MAX_DERIVATIVE_ORDER as u64,
                },
                Some("0"),
                "highest derivative to report",
            ),
        ],
        CommandName::Zeros => vec![
            key("tmin", HEIGHT, Some("0"), "scan start"),
            key("tmax", HEIGHT, None, "scan end"),
            key("step", Kind::FloatAbove { min: 0.0, max: 10.0 }, Some("0.05"), "grid step"),
        ],
        CommandName::Chars => vec![positional(
            "q",
            Kind::Int {
                min: 1,
                max: MAX_TABLE_MODULUS,
            },
            "modulus",
        )],
        CommandName::Lfun => vec![
            key(
                "q",
                Kind::Int {
                    min: 1,
                    max: MAX_MODULUS,
                },
                None,
                "modulus",
            ),
            key(
                "index",
                Kind::Int {
                    min: 0,
                    max: MAX_MODULUS,
                },
                Some("0"),
                "character index (0 is principal)",
            ),
            key("s", Kind::Complex, None, "point"),
        ],
        CommandName::Psi => vec![positional("x", Kind::Float { min: 0.0, max: 1e9 }, "argument")],
        CommandName::Constant => vec![
            key("P", Kind::Poly, Some("[0, 1]"), "mollifier polynomial"),
            key("Q", Kind::Poly, Some("[1, -1]"), "smoothing polynomial"),
            key("R", SHIFT, Some("1.3"), "shift R"),
            key("theta", THETA, Some("0.5"), "mollifier length exponent"),
            key(
                "tol",
                Kind::Float { min: 1e-12, max: 1e-3 },
                Some("1e-12"),
                "quadrature tolerance",
            ),
        ],
        CommandName::Optimize => vec![
            key(
                "p-degree",
                Kind::Int {
                    min: 1,
                    max: MAX_DEGREE as u64,
                },
                Some("1"),
                "degree of P",
            ),
            key(
                "q-degree",
                Kind::Int {
                    min: 1,
                    max: MAX_DEGREE as u64,
                },
                Some("1"),
                "degree of Q",
            ),
            key("theta", THETA, Some("0.5"), "mollifier length exponent, capped below 1/2"),
            key("r-min", SHIFT, Some("0.1"), "lower end of the R range"),
            key("r-max", SHIFT, Some("3"), "upper end of the R range"),
            key(
                "restarts",
                Kind::Int {
                    min: 1,
                    max: MAX_RESTARTS as u64,
                },
                Some("8"),
                "number of restarts",
            ),
            key("seed", Kind::Int { min: 0, max: u64::MAX }, Some("0"), "random seed"),
            key(
                "max-iterations",
                Kind::Int { min: 1, max: 1_000_000 },
                Some("20000"),
                "Nelder-Mead iteration cap per restart",
            ),
            key("form", Kind::Form, Some("printed"), "integrand form: printed or squared"),
            key("fixed-Q", Kind::Poly, None, "hold Q fixed at this polynomial"),
        ],
        CommandName::Moment => vec![
            key(
                "T",
                Kind::FloatAbove {
                    min: 1.0,
                    max: MAX_MOMENT_HEIGHT,
                },
                Some("5000"),
                "height T",
            ),
            key("theta", THETA, Some("0.5"), "mollifier length exponent"),
            key("R", SHIFT, Some("1.3"), "shift R"),
            key("P", Kind::Poly, Some("[0, 1]"), "mollifier polynomial"),
            key("Q", Kind::Poly, Some("[1, -1]"), "smoothing polynomial"),
            key(
                "step",
                Kind::FloatAbove { min: 0.0, max: 100.0 },
                None,
                "grid step, default min(0.05, delta/20)",
            ),
            key("offset", Kind::Float { min: 0.0, max: 0.999_999 }, Some("0"), "grid offset in steps"),
            key("form", Kind::Form, Some("printed"), "main-term form: printed or squared"),
            key(
                "tolerance",
                Kind::FloatAbove { min: 0.0, max: 1.0 },
                Some("0.15"),
                "accepted |ratio - 1|",
            ),
            key("trace", Kind::Path, None, "also write (t, w, |V psi|^2) as CSV here"),
        ],
        CommandName::Registry => vec![key("theta", THETA, Some("0.5"), "theta used to evaluate each tuple")],
    }
}

const GLOBAL_KEYS: [&str; 3] = ["format", "output", "threads"];

fn build_cli() -> ClapCommand {
    let mut cli = ClapCommand::new("clt")
        .about("Zeta, L-function and Levinson-method numerics")
        .subcommand_required(true)
        .arg_required_else_help(true)
        .arg(
            Arg::new("format")
                .long("format")
                .global(true)
                .value_parser(["json", "csv", "text"])
                .help("output format [default: json]"),
        )
        .arg(
            Arg::new("output")
                .long("output")
                .short('o')
                .global(true)
                .help("write the result here instead of stdout"),
        )
        .arg(
            Arg::new("threads")
                .long("threads")
                .global(true)
                .help("worker threads [default: hardware parallelism]"),
        )
        .arg(
            Arg::new("config")
                .long("config")
                .global(true)
                .help("key = value file; flags override its entries"),
        );
    for command in CommandName::ALL {
        let mut sub = ClapCommand::new(command.name()).about(command.about());
        for spec in keys(command) {
            let mut arg = Arg::new(spec.name).help(spec.help).action(ArgAction::Set);
            arg = if spec.positional {
                arg.index(1)
            } else {
                arg.long(spec.name).allow_hyphen_values(true)
            };
            if let Some(d) = spec.default {
                arg = arg.help(format!("{} [default: {d}]", spec.help));
            }
            sub = sub.arg(arg);
        }
        cli = cli.subcommand(sub);
    }
    cli
}

/// Usage text for the top-level command.
pub fn usage() -> String {
    build_cli().render_help().to_string()
}

/// Parses `argv` (without the program name) and an optional key = value file.
///
/// An explicit `file` takes precedence over a `--config` flag in `argv`.
pub fn parse_config(argv: &[String], file: Option<&Path>) -> Result<RunConfig, CliError> {
    if argv.is_empty() {
        return Err(CliError::Usage(usage()));
    }
    let matches = build_cli()
        .try_get_matches_from(std::iter::once("clt".to_string()).chain(argv.iter().cloned()))
        .map_err(|e| match e.kind() {
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => CliError::Help(e.render().to_string()),
            _ => CliError::Usage(e.render().to_string()),
        })?;
    let (sub_name, sub) = matches
        .subcommand()
        .ok_or_else(|| CliError::Usage(usage()))?;
    let command = CommandName::ALL
        .into_iter()
        .find(|c| c.name() == sub_name)
        .ok_or_else(|| CliError::Usage(usage()))?;
    let specs = keys(command);

    let mut parameters: BTreeMap<String, String> = BTreeMap::new();
    for spec in &specs {
        if let Some(d) = spec.default {
            parameters.insert(spec.name.to_string(), d.to_string());
        }
    }
    let config_path = file
        .map(Path::to_path_buf)
        .or_else(|| sub.get_one::<String>("config").map(PathBuf::from));
    if let Some(path) = &config_path {
        for (k, v) in read_config_file(path)? {
            let known = GLOBAL_KEYS.contains(&k.as_str()) || specs.iter().any(|s| s.name == k);
            if !known {
                return Err(CliError::Usage(format!(
                    "unknown key '{k}' for '{}' in {}",
                    command.name(),
                    path.display()
                )));
            }
            parameters.insert(k, v);
        }
    }
    for spec in &specs {
        if let Some(v) = sub.get_one::<String>(spec.name) {
            parameters.insert(spec.name.to_string(), v.clone());
        }
    }
    for g in GLOBAL_KEYS {
        if let Some(v) = sub.get_one::<String>(g) {
            parameters.insert(g.to_string(), v.clone());
        }
    }

    let output_format = match parameters.remove("format").as_deref() {
        None | Some("json") => OutputFormat::Json,
        Some("csv") => OutputFormat::Csv,
        Some("text") => OutputFormat::Text,
        Some(other) => {
            return Err(CliError::Parse {
                key: "format".into(),
                token: other.into(),
                message: "expected json, csv or text".into(),
            })
        }
    };
    if output_format == OutputFormat::Csv && !command.has_table() {
        return Err(CliError::Usage(format!(
            "'{}' has no tabular output; use json or text",
            command.name()
        )));
    }
    let output_path = parameters.remove("output").map(PathBuf::from);
    let threads = match parameters.remove("threads") {
        None => 0,
        Some(v) => parse_int("threads", &v, 1, 1024)? as usize,
    };

    let values = Values {
        specs: &specs,
        raw: &parameters,
    };
    let task = build_task(command, &values, output_format)?;
    Ok(RunConfig {
        command,
        parameters,
        output_format,
        output_path,
        threads,
        task,
    })
}

/// Reads `key = value` lines; `#` starts a comment, blank lines are skipped.
/// Underscores in keys are read as dashes.
pub fn read_config_file(path: &Path) -> Result<Vec<(String, String)>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config file {}: {e}", path.display())))?;
    parse_config_text(&text)
}

pub fn parse_config_text(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut entries = Vec::new();
    for (line_no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| CliError::Parse {
            key: format!("config line {}", line_no + 1),
            token: line.to_string(),
            message: "expected key = value".into(),
        })?;
        let k = k.trim().replace('_', "-");
        if k.is_empty() {
            return Err(CliError::Parse {
                key: format!("config line {}", line_no + 1),
                token: line.to_string(),
                message: "empty key".into(),
            });
        }
        entries.push((k, v.trim().to_string()));
    }
    Ok(entries)
}

struct Values<'a> {
    specs: &'a [KeySpec],
    raw: &'a BTreeMap<String, String>,
}

impl Values<'_> {
    fn spec(&self, name: &str) -> KeySpec {
        *self
            .specs
            .iter()
            .find(|s| s.name == name)
            .expect("key is declared for this command")
    }

    fn raw(&self, name: &str) -> Option<&str> {
        self.raw.get(name).map(String::as_str)
    }

    fn required(&self, name: &str) -> Result<&str, CliError> {
        self.raw(name)
            .ok_or_else(|| CliError::Usage(format!("missing required parameter '{name}'")))
    }

    fn float(&self, name: &str) -> Result<f64, CliError> {
        let v = self.required(name)?;
        match self.spec(name).kind {
            Kind::Float { min, max } => parse_float(name, v, min, max, false),
            Kind::FloatAbove { min, max } => parse_float(name, v, min, max, true),
            _ => unreachable!("{name} is not a float key"),
        }
    }

    fn opt_float(&self, name: &str) -> Result<Option<f64>, CliError> {
        self.raw(name).map(|_| self.float(name)).transpose()
    }

    fn int(&self, name: &str) -> Result<u64, CliError> {
        let v = self.required(name)?;
        match self.spec(name).kind {
            Kind::Int { min, max } => parse_int(name, v, min, max),
            _ => unreachable!("{name} is not an integer key"),
        }
    }

    fn poly(&self, name: &str) -> Result<Polynomial, CliError> {
        let v = self.required(name)?;
        Polynomial::parse(v).map_err(|e| CliError::Parse {
            key: name.into(),
            token: v.into(),
            message: e.to_string(),
        })
    }

    fn opt_poly(&self, name: &str) -> Result<Option<Polynomial>, CliError> {
        self.raw(name).map(|_| self.poly(name)).transpose()
    }

    fn complex(&self, name: &str) -> Result<ComplexValue, CliError> {
        let v = self.required(name)?;
        let s = parse_complex(v).ok_or_else(|| CliError::Parse {
            key: name.into(),
            token: v.into(),
            message: "expected a complex number such as 0.5+14.1i or 0.5,14.1".into(),
        })?;
        if !(s.re.abs() <= 1e3) || !(s.im.abs() <= MAX_HEIGHT) {
            return Err(CliError::Usage(format!(
                "{name} = {v} outside |Re| <= 1000, |Im| <= {MAX_HEIGHT}"
            )));
        }
        Ok(s)
    }

    fn form(&self, name: &str) -> Result<LevinsonForm, CliError> {
        let v = self.required(name)?;
        match v {
            "printed" | "as-printed" => Ok(LevinsonForm::AsPrinted),
            "squared" => Ok(LevinsonForm::Squared),
            other => Err(CliError::Parse {
                key: name.into(),
                token: other.into(),
                message: "expected printed or squared".into(),
            }),
        }
    }
}

fn parse_float(name: &str, v: &str, min: f64, max: f64, open_min: bool) -> Result<f64, CliError> {
    let x: f64 = v.trim().parse().map_err(|_| CliError::Parse {
        key: name.into(),
        token: v.into(),
        message: "not a number".into(),
    })?;
    let low_ok = if open_min { x > min } else { x >= min };
    if !(low_ok && x <= max) {
        let open = if open_min { "(" } else { "[" };
        return Err(CliError::Usage(format!("{name} = {v} outside {open}{min}, {max}]")));
    }
    Ok(x)
}

fn parse_int(name: &str, v: &str, min: u64, max: u64) -> Result<u64, CliError> {
    let x: u64 = v.trim().parse().map_err(|_| CliError::Parse {
        key: name.into(),
        token: v.into(),
        message: "not a non-negative integer".into(),
    })?;
    if x < min || x > max {
        return Err(CliError::Usage(format!("{name} = {v} outside [{min}, {max}]")));
    }
    Ok(x)
}

/// Accepts `a`, `bi`, `a+bi`, `a-bi` and `a,b`.
pub fn parse_complex(text: &str) -> Option<ComplexValue> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if let Some((re, im)) = t.split_once(',') {
        return Some(ComplexValue::new(re.parse().ok()?, im.parse().ok()?));
    }
    let Some(body) = t.strip_suffix('i').or_else(|| t.strip_suffix('j')) else {
        return Some(ComplexValue::new(t.parse().ok()?, 0.0));
    };
    let bytes = body.as_bytes();
    // The split is the last sign that is neither leading nor part of an exponent.
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let imag = |s: &str| -> Option<f64> {
        match s {
            "" | "+" => Some(1.0),
            "-" => Some(-1.0),
            _ => s.parse().ok(),
        }
    };
    match split {
        Some(k) => Some(ComplexValue::new(body[..k].parse().ok()?, imag(&body[k..])?)),
        None => Some(ComplexValue::new(0.0, imag(body)?)),
    }
}

fn levinson_params(values: &Values) -> Result<LevinsonParams, CliError> {
    let p = values.poly("P")?;
    let q = values.poly("Q")?;
    LevinsonParams::new(p, q, values.float("R")?, values.float("theta")?).map_err(constraint)
}

fn constraint(e: critline::Error) -> CliError {
    match e {
        critline::Error::Constraint(m) => CliError::Constraint(m),
        other => CliError::Usage(other.to_string()),
    }
}

fn build_task(command: CommandName, values: &Values, format: OutputFormat) -> Result<Task, CliError> {
    Ok(match command {
        CommandName::Zeta => Task::Zeta {
            s: values.complex("s")?,
            order: values.int("order")? as usize,
        },
        CommandName::Zeros => {
            let t_min = values.float("tmin")?;
            let t_max = values.float("tmax")?;
            if t_max < t_min {
                return Err(CliError::Usage(format!("tmax = {t_max} is below tmin = {t_min}")));
            }
            Task::Zeros {
                t_min,
                t_max,
                step: values.float("step")?,
            }
        }
        CommandName::Chars => Task::Chars { q: values.int("q")? },
        CommandName::Lfun => {
            let q = values.int("q")?;
            let index = values.int("index")? as usize;
            let count = CharacterGroup::new(q)?.len();
            if index >= count {
                return Err(CliError::Usage(format!(
                    "index = {index} but modulus {q} has {count} characters"
                )));
            }
            Task::Lfun {
                q,
                index,
                s: values.complex("s")?,
            }
        }
        CommandName::Psi => Task::Psi { x: values.float("x")? },
        CommandName::Constant => Task::Constant {
            params: levinson_params(values)?,
            tolerance: values.float("tol")?,
        },
        CommandName::Optimize => {
            let r_min = values.float("r-min")?;
            let r_max = values.float("r-max")?;
            if r_max < r_min {
                return Err(CliError::Usage(format!("r-max = {r_max} is below r-min = {r_min}")));
            }
            let mut space = SearchSpace::new(
                values.int("p-degree")? as usize,
                values.int("q-degree")? as usize,
                r_min,
                r_max,
                values.float("theta")?.min(THETA_CAP),
            );
            space.restarts = values.int("restarts")? as usize;
            space.seed = values.int("seed")?;
            space.max_iterations = values.int("max-iterations")? as usize;
            space.form = values.form("form")?;
            space.fixed_q = values.opt_poly("fixed-Q")?;
            if let Some(q) = &space.fixed_q {
                if (q.eval(0.0) - 1.0).abs() > 1e-12 {
                    return Err(CliError::Constraint(format!(
                        "Q(0)=1 violated: got {}",
                        q.eval(0.0)
                    )));
                }
            }
            space.validate().map_err(constraint)?;
            Task::Optimize { space }
        }
        CommandName::Moment => {
            let options = MomentOptions {
                grid_step: values.opt_float("step")?,
                offset: values.float("offset")?,
                form: values.form("form")?,
                keep_trace: format == OutputFormat::Csv || values.raw("trace").is_some(),
            };
            Task::Moment {
                params: levinson_params(values)?,
                t_scale: values.float("T")?,
                options,
                tolerance: values.float("tolerance")?,
                trace_path: values.raw("trace").map(PathBuf::from),
            }
        }
        CommandName::Registry => Task::Registry {
            theta: values.float("theta")?,
        },
    })
}
