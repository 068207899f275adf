//! `dequad` — tanh-sinh quadrature from the command line.
//!
//! Subcommands: `integrate` a textual expression, evaluate the a-priori
//! error `bound`, run a `converge`-nce study, reproduce the reference
//! oscillatory-integral experiment (`table1`), and dump the decay envelope
//! (`sample-decay`). Data goes to stdout, diagnostics to stderr.
//!
//! Exit codes: 0 success, 2 no convergence (best value still printed),
//! 3 expression parse error, 4 domain or usage error.

mod report;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use dequad::engine::EngineError;
use dequad::{
    convergence_study, decay_probe_grid, error_model, expr, integrate, reference,
    IntegrateOptions, Interval,
};
use report::{
    render_decay, BoundReport, ConvergeReport, DecaySample, Format, IntegrateReport,
    Table1Report,
};

#[derive(Parser)]
#[command(
    name = "dequad",
    version,
    about = "Tanh-sinh (double-exponential) quadrature for finite intervals",
    after_help = "Expression syntax: +, -, *, /, ^ (right-associative, binds tighter than \
                  unary minus), the variable x, constants pi and e, and the functions sin, \
                  cos, tan, exp, log (natural), sqrt, sinh, cosh, tanh, abs. No implicit \
                  multiplication."
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Integrate an expression in x over (a, b)
    Integrate {
        /// Integrand, e.g. "exp(20*(x-1))*sin(256*x)"
        #[arg(long)]
        expr: String,
        /// Lower endpoint
        #[arg(long, allow_negative_numbers = true)]
        a: f64,
        /// Upper endpoint
        #[arg(long, allow_negative_numbers = true)]
        b: f64,
        /// Convergence tolerance
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Starting step size
        #[arg(long, default_value_t = 1.0)]
        h0: f64,
        /// Maximum number of step halvings
        #[arg(long, default_value_t = 12)]
        max_level: u32,
        /// Decay constant of the transformed integrand, if known; enables
        /// the a-priori bound (otherwise a fit is attempted)
        #[arg(long, allow_negative_numbers = true)]
        c: Option<f64>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Evaluate the a-priori global error bound at (h, c)
    Bound {
        #[arg(long, allow_negative_numbers = true)]
        h: f64,
        #[arg(long, allow_negative_numbers = true)]
        c: f64,
        /// Also print the alternative single-product reading of the bound
        /// formula (diagnostic; does not reproduce the reference value)
        #[arg(long)]
        show_literal_form: bool,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Per-level convergence table for an expression or a named reference
    /// integral
    Converge {
        /// Integrand expression (requires --a/--b)
        #[arg(long, conflicts_with = "name", requires = "a", requires = "b")]
        expr: Option<String>,
        #[arg(long, allow_negative_numbers = true)]
        a: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        b: Option<f64>,
        /// Reference-integral name (const2, invsqrt, sqrt_sing, log_sing, I1)
        #[arg(long)]
        name: Option<String>,
        /// Number of table rows (2..=15)
        #[arg(long)]
        levels: u32,
        /// Decay constant for the per-level bound column
        #[arg(long, allow_negative_numbers = true)]
        c: Option<f64>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Reproduce the reference experiment: the oscillatory integral I1 at
    /// tolerance 1e-8 next to its a-priori bound at h = 1/129, c = 2
    Table1 {
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Emit 201 samples of the decay envelope exp(-c.e^|t|) on [-t_max, t_max]
    SampleDecay {
        #[arg(long, allow_negative_numbers = true)]
        c: f64,
        #[arg(long, allow_negative_numbers = true)]
        t_max: f64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

enum CliError {
    /// Bad arguments or parameters outside their domain (exit 4).
    Usage(String),
    /// The expression did not parse (exit 3).
    Parse(expr::ParseError),
    /// Integration failed on the integrand itself (exit 4).
    Integration(EngineError),
    /// Refinement hit max_level; the best result was already printed (exit 2).
    NoConvergence,
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::NoConvergence => 2,
            CliError::Parse(_) => 3,
            CliError::Usage(_) | CliError::Integration(_) => 4,
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Usage(m) => m.clone(),
            CliError::Parse(e) => e.to_string(),
            CliError::Integration(e) => e.to_string(),
            CliError::NoConvergence => {
                "did not converge within max_level; best value printed".into()
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprint!("{e}");
            return ExitCode::from(4);
        }
    };
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}

fn interval(a: f64, b: f64) -> Result<Interval, CliError> {
    Interval::new(a, b).map_err(|e| CliError::Usage(e.to_string()))
}

fn run(cmd: Cmd) -> Result<(), CliError> {
    match cmd {
        Cmd::Integrate {
            expr: src,
            a,
            b,
            tol,
            h0,
            max_level,
            c,
            format,
        } => {
            let iv = interval(a, b)?;
            let params_ok =
                tol.is_finite() && tol > 0.0 && h0.is_finite() && h0 > 0.0 && max_level >= 1;
            if !params_ok {
                return Err(CliError::Usage(
                    "require tol > 0, h0 > 0 and max_level >= 1".into(),
                ));
            }
            let ast = expr::parse(&src).map_err(CliError::Parse)?;
            // a supplied c wins; otherwise try to fit one for the bound
            let fitted = c.or_else(|| {
                error_model::estimate_c(&ast, iv, &decay_probe_grid())
                    .ok()
                    .map(|f| f.c)
            });
            let opts = IntegrateOptions {
                tol,
                h0,
                max_level,
                decay_c: fitted,
            };
            match integrate(&ast, iv, &opts) {
                Ok(r) => {
                    print!("{}", IntegrateReport::new(&r, fitted, true).render(format));
                    Ok(())
                }
                Err(EngineError::NoConvergence(best)) => {
                    print!("{}", IntegrateReport::new(&best, fitted, false).render(format));
                    Err(CliError::NoConvergence)
                }
                Err(e) => Err(CliError::Integration(e)),
            }
        }

        Cmd::Bound {
            h,
            c,
            show_literal_form,
            format,
        } => {
            let global_bound =
                error_model::global_bound(h, c).map_err(|e| CliError::Usage(e.to_string()))?;
            let h0_limit = error_model::h0_limit(c).unwrap();
            let report = BoundReport {
                global_bound,
                case1_term: error_model::case1_term(h, c).ok(),
                case2_term: error_model::case2_term(h, c).unwrap(),
                k0_threshold: error_model::k0_threshold(c, h).unwrap(),
                h0_limit,
                h_below_h0_limit: h < h0_limit,
                literal_product_form: show_literal_form
                    .then(|| error_model::literal_product_form(h, c).unwrap()),
            };
            print!("{}", report.render(format));
            Ok(())
        }

        Cmd::Converge {
            expr: src,
            a,
            b,
            name,
            levels,
            c,
            format,
        } => {
            if !(2..=15).contains(&levels) {
                return Err(CliError::Usage("levels must lie in 2..=15".into()));
            }
            let study = match (&src, &name) {
                (Some(src), None) => {
                    let iv = interval(a.unwrap(), b.unwrap())?;
                    let ast = expr::parse(src).map_err(CliError::Parse)?;
                    convergence_study(&ast, iv, levels, None, c)
                }
                (None, Some(name)) => {
                    let r = reference::by_name(name).ok_or_else(|| {
                        CliError::Usage(format!(
                            "unknown reference integral '{name}' (try: {})",
                            reference::registry()
                                .iter()
                                .map(|r| r.name)
                                .collect::<Vec<_>>()
                                .join(", ")
                        ))
                    })?;
                    convergence_study(&r.integrand(), r.interval(), levels, Some(r.exact), c)
                }
                _ => {
                    return Err(CliError::Usage(
                        "supply exactly one of --expr (with --a/--b) or --name".into(),
                    ))
                }
            }
            .map_err(CliError::Integration)?;
            let (out, diag) = ConvergeReport::new(&study.rows, study.fitted_order).render(format);
            print!("{out}");
            if let Some(d) = diag {
                eprintln!("{d}");
            }
            Ok(())
        }

        Cmd::Table1 { format } => {
            let r = reference::by_name("I1").expect("I1 is in the registry");
            let opts = IntegrateOptions {
                tol: 1e-8,
                ..Default::default()
            };
            let q = match integrate(&r.integrand(), r.interval(), &opts) {
                Ok(q) => q,
                Err(EngineError::NoConvergence(best)) => *best,
                Err(e) => return Err(CliError::Integration(e)),
            };
            let report = Table1Report {
                integral: r.name.to_string(),
                n_evals: q.evals,
                abs_error: (q.value - r.exact).abs(),
                ubge: error_model::global_bound(1.0 / 129.0, 2.0).unwrap(),
            };
            print!("{}", report.render(format));
            Ok(())
        }

        Cmd::SampleDecay { c, t_max, format } => {
            let params_ok = c.is_finite() && c > 0.0 && t_max.is_finite() && t_max > 0.0;
            if !params_ok {
                return Err(CliError::Usage("require c > 0 and t_max > 0".into()));
            }
            let step = t_max / 100.0;
            let samples: Vec<DecaySample> = (0..=200)
                .map(|i| {
                    // symmetric about 0 by construction: t(i) = -t(200-i)
                    let t = (i - 100) as f64 * step;
                    DecaySample {
                        t,
                        value: (-c * t.abs().exp()).exp(),
                    }
                })
                .collect();
            print!("{}", render_decay(&samples, format));
            Ok(())
        }
    }
}
