//! `orbicheck`: every operation of the toolkit as a subcommand with JSON
//! input/output. Diagnostics go to standard error, never into the JSON
//! stream; exit status 0 on success, 1 on domain errors, 2 on usage errors.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use orbicheck_core::approx::{oracle_tolerance, ORACLE_BITS};
use orbicheck_core::bounds::bounds;
use orbicheck_core::catalog::{
    build_catalog, entry_matches, validate_restriction, CatalogEntry, CatalogLimits,
};
use orbicheck_core::config::{check_config, SingularityConfig};
use orbicheck_core::cyclotomic::CycloNum;
use orbicheck_core::enumerate::{enumerate_count, enumerate_stream};
use orbicheck_core::group::{ExtendSpec, GroupSpec, KleinianFamily, Theta};
use orbicheck_core::hodge::{salamon_solve, verify_salamon_general};
use orbicheck_core::invariants::{
    float_check_local, local_invariants, per_element_bound_check, LocalInvariants,
};
use orbicheck_core::matrix::is_symplectic;
use orbicheck_core::rational::Rat;
use orbicheck_core::table::paper_table;
use orbicheck_core::{group, Error};

#[derive(Parser)]
#[command(
    name = "orbicheck",
    version,
    about = "Exact invariants and Betti-number feasibility checks for 4-dimensional symplectic orbifolds"
)]
struct Cli {
    /// Write the JSON report to this path instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Run the high-precision float oracle alongside the exact arithmetic
    /// and report the maximum relative deviation (local, check).
    #[arg(long, global = true)]
    float_check: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Local invariants (|G|, S_0..S_4, eta, s) of one singularity type.
    Local {
        #[command(flatten)]
        group: GroupArgs,
        /// Also run the per-element bound check ((tr-4)/det <= -1/2).
        #[arg(long)]
        per_element_bound: bool,
    },
    /// Build a group and report order, conductor, and the structural checks.
    Group {
        #[command(flatten)]
        group: GroupArgs,
        /// Include the full element list as coefficient arrays.
        #[arg(long)]
        elements: bool,
    },
    /// Solve b4 + b3 - 10*b2 = 46 + s and fill the Hodge diamond.
    Salamon {
        #[arg(long)]
        b2: i64,
        #[arg(long)]
        b3: i64,
        /// The singularity score, e.g. "-54" or "-3/2".
        #[arg(long, allow_hyphen_values = true)]
        s: String,
    },
    /// Check a singularity configuration file (JSON).
    Check {
        /// {"b2": .., "b3": .., "singularities": [{"family", "n", "k", "count"}]}
        config: PathBuf,
    },
    /// Enumerate admissible configurations for (b2, b3).
    Enumerate {
        #[arg(long)]
        b2: i64,
        #[arg(long, default_value_t = 0)]
        b3: i64,
        /// Restrict to entries matching these tokens (labels like "A_2" or
        /// family names like "cyclic"), comma separated.
        #[arg(long, value_delimiter = ',')]
        families: Vec<String>,
        /// Count only (exact, via dynamic programming).
        #[arg(long)]
        count_only: bool,
        /// Cap on streamed results.
        #[arg(long, default_value_t = 10_000)]
        cap: usize,
        /// Restrict the catalog to groups of order at most this.
        #[arg(long)]
        order_cap: Option<u64>,
    },
    /// Global bounds: maximal points, maximal order, per-family caps.
    Bounds {
        #[arg(long)]
        b2: Option<i64>,
    },
    /// Reproduce the example table and run the consistency checker.
    Table,
    /// Check the general even-dimension relation on a Hodge table (JSON).
    CheckGeneral {
        #[arg(long)]
        dim: Option<usize>,
        /// {"dim": n, "hodge": [[..]], "S": ["p/q", ..], "c1cn1": "p/q", "cn": "p/q"}
        #[arg(long)]
        input: PathBuf,
    },
    /// List the singularity catalog.
    Catalog {
        /// Restrict to groups of order at most this.
        #[arg(long)]
        order_cap: Option<u64>,
        /// Restrict to entries matching these tokens.
        #[arg(long, value_delimiter = ',')]
        families: Vec<String>,
    },
}

#[derive(Args)]
struct GroupArgs {
    /// Family: cyclic, binary_dihedral, 2T, 2O, 2I.
    #[arg(long, conflicts_with = "input")]
    family: Option<String>,
    /// Parameter n for the cyclic and binary dihedral families.
    #[arg(long)]
    n: Option<u32>,
    /// Twisting automorphism: "id" or "inversion".
    #[arg(long)]
    theta: Option<String>,
    /// Extend by T_{n,k}: the n.
    #[arg(long)]
    extend_n: Option<u32>,
    /// Extend by T_{n,k}: the k.
    #[arg(long)]
    extend_k: Option<u32>,
    /// Group spec as a JSON file instead of flags.
    #[arg(long)]
    input: Option<PathBuf>,
}

impl GroupArgs {
    fn to_spec(&self) -> Result<GroupSpec, String> {
        if let Some(path) = &self.input {
            let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            return serde_json::from_str(&text).map_err(|e| format!("bad group spec: {e}"));
        }
        let family = self
            .family
            .as_deref()
            .ok_or("one of --family or --input is required")?;
        let family = parse_family(family)?;
        let theta = match self.theta.as_deref() {
            None => None,
            Some(name) => Some(Theta::Named(name.to_string())),
        };
        let extend = match (self.extend_n, self.extend_k) {
            (None, None) => None,
            (Some(n), Some(k)) => Some(ExtendSpec { n, k }),
            _ => return Err("--extend-n and --extend-k go together".into()),
        };
        Ok(GroupSpec {
            family,
            n: self.n,
            theta,
            extend,
        })
    }
}

fn parse_family(s: &str) -> Result<KleinianFamily, String> {
    match s {
        "cyclic" => Ok(KleinianFamily::Cyclic),
        "binary_dihedral" => Ok(KleinianFamily::BinaryDihedral),
        "2T" => Ok(KleinianFamily::BinaryTetrahedral),
        "2O" => Ok(KleinianFamily::BinaryOctahedral),
        "2I" => Ok(KleinianFamily::BinaryIcosahedral),
        other => Err(format!(
            "unknown family {other:?} (expected cyclic, binary_dihedral, 2T, 2O or 2I)"
        )),
    }
}

#[derive(Serialize)]
struct FloatCheckReport {
    bits: u32,
    tolerance: String,
    max_relative_deviation: Rat,
    ok: bool,
}

fn float_report(dev: Rat) -> FloatCheckReport {
    FloatCheckReport {
        bits: ORACLE_BITS,
        tolerance: "2^-40".into(),
        ok: dev <= oracle_tolerance(),
        max_relative_deviation: dev,
    }
}

/// Successful run: the JSON payload plus an optional domain-error note
/// (printed to stderr with exit status 1, JSON still emitted).
struct Outcome {
    json: String,
    domain_error: Option<String>,
}

fn catalog_limits_from_env() -> CatalogLimits {
    let mut limits = CatalogLimits::default();
    if let Ok(v) = std::env::var("ORBICHECK_BRUTE_THRESHOLD") {
        if let Ok(t) = v.parse::<u64>() {
            limits.brute_force_threshold = t;
        }
    }
    limits
}

fn filtered_catalog(
    order_cap: Option<u64>,
    families: &[String],
) -> Result<Vec<CatalogEntry>, Error> {
    let mut limits = catalog_limits_from_env();
    if let Some(cap) = order_cap {
        limits.order_cap = cap.min(limits.order_cap);
    }
    let catalog = build_catalog(&limits)?;
    if families.is_empty() {
        return Ok(catalog);
    }
    validate_restriction(&catalog, families)?;
    Ok(catalog
        .into_iter()
        .filter(|e| families.iter().any(|t| entry_matches(e, t)))
        .collect())
}

fn run(cli: &Cli) -> Result<Outcome, Error> {
    match &cli.command {
        Command::Local {
            group,
            per_element_bound,
        } => {
            let spec = group.to_spec().map_err(Error::InvalidInput)?;
            let g = spec.build()?;
            let invariants = local_invariants(&g)?;
            #[derive(Serialize)]
            struct LocalReport {
                spec: GroupSpec,
                order: u64,
                conductor: u32,
                invariants: LocalInvariants,
                #[serde(skip_serializing_if = "Option::is_none")]
                per_element_bound: Option<orbicheck_core::invariants::PerElementBoundReport>,
                #[serde(skip_serializing_if = "Option::is_none")]
                float_check: Option<FloatCheckReport>,
            }
            let report = LocalReport {
                order: g.order() as u64,
                conductor: g.conductor(),
                per_element_bound: if *per_element_bound {
                    Some(per_element_bound_check(&g)?)
                } else {
                    None
                },
                float_check: cli
                    .float_check
                    .then(|| float_report(float_check_local(&g, &invariants))),
                invariants,
                spec,
            };
            Ok(Outcome {
                json: to_json(&report),
                domain_error: None,
            })
        }
        Command::Group { group, elements } => {
            let spec = group.to_spec().map_err(Error::InvalidInput)?;
            let g = spec.build()?;
            #[derive(Serialize)]
            struct GroupReport {
                spec: GroupSpec,
                order: u64,
                conductor: u32,
                all_symplectic: bool,
                acts_freely: bool,
                contains_minus_identity: bool,
                #[serde(skip_serializing_if = "Option::is_none")]
                elements: Option<Vec<Vec<Vec<CycloNum>>>>,
            }
            let report = GroupReport {
                order: g.order() as u64,
                conductor: g.conductor(),
                all_symplectic: g.elements().iter().all(is_symplectic),
                acts_freely: group::acts_freely(&g),
                contains_minus_identity: g.minus_identity_index().is_some(),
                elements: elements.then(|| {
                    g.elements()
                        .iter()
                        .map(|m| {
                            (0..4)
                                .map(|i| (0..4).map(|j| m.get(i, j).clone()).collect())
                                .collect()
                        })
                        .collect()
                }),
                spec,
            };
            Ok(Outcome {
                json: to_json(&report),
                domain_error: None,
            })
        }
        Command::Salamon { b2, b3, s } => {
            let s = Rat::from_str(s).map_err(Error::InvalidInput)?;
            let (b4, diamond) = salamon_solve(*b2, *b3, &s)?;
            #[derive(Serialize)]
            struct SalamonReport {
                b2: i64,
                b3: i64,
                s: Rat,
                b4: i64,
                diamond: orbicheck_core::hodge::HodgeDiamond,
                betti: [i64; 5],
                euler: i64,
            }
            let report = SalamonReport {
                b2: *b2,
                b3: *b3,
                b4,
                betti: [1, 0, diamond.b2(), diamond.b3(), diamond.b4()],
                euler: diamond.euler(),
                diamond,
                s,
            };
            Ok(Outcome {
                json: to_json(&report),
                domain_error: None,
            })
        }
        Command::Check { config } => {
            let text =
                fs::read_to_string(config).map_err(|e| Error::InvalidInput(e.to_string()))?;
            let config: SingularityConfig =
                serde_json::from_str(&text).map_err(|e| Error::InvalidInput(e.to_string()))?;
            let report = check_config(&config)?;
            let float_check = if cli.float_check {
                let mut max_dev = Rat::zero();
                for spec in &config.singularities {
                    let g = orbicheck_core::catalog::build_point_group(
                        spec.family,
                        spec.n,
                        spec.k,
                    )?;
                    let inv = local_invariants(&g)?;
                    let dev = float_check_local(&g, &inv);
                    if dev > max_dev {
                        max_dev = dev;
                    }
                }
                Some(float_report(max_dev))
            } else {
                None
            };
            #[derive(Serialize)]
            struct CheckReport {
                #[serde(flatten)]
                report: orbicheck_core::config::ConfigReport,
                #[serde(skip_serializing_if = "Option::is_none")]
                float_check: Option<FloatCheckReport>,
            }
            let flags = report.flags.clone();
            let out = CheckReport {
                report,
                float_check,
            };
            Ok(Outcome {
                json: to_json(&out),
                domain_error: (!flags.is_empty())
                    .then(|| format!("configuration infeasible: {}", flags.join("; "))),
            })
        }
        Command::Enumerate {
            b2,
            b3,
            families,
            count_only,
            cap,
            order_cap,
        } => {
            let catalog = filtered_catalog(*order_cap, families)?;
            if *count_only {
                let count = enumerate_count(&catalog, *b2, *b3)?;
                #[derive(Serialize)]
                struct CountReport {
                    b2: i64,
                    b3: i64,
                    count: String,
                }
                Ok(Outcome {
                    json: to_json(&CountReport {
                        b2: *b2,
                        b3: *b3,
                        count: count.to_string(),
                    }),
                    domain_error: None,
                })
            } else {
                let (configs, capped) = enumerate_stream(&catalog, *b2, *b3, *cap)?;
                #[derive(Serialize)]
                struct StreamReport {
                    b2: i64,
                    b3: i64,
                    configurations: Vec<orbicheck_core::enumerate::EnumeratedConfig>,
                    result_cap_reached: bool,
                }
                Ok(Outcome {
                    json: to_json(&StreamReport {
                        b2: *b2,
                        b3: *b3,
                        configurations: configs,
                        result_cap_reached: capped,
                    }),
                    domain_error: capped.then(|| format!("result cap reached ({cap})")),
                })
            }
        }
        Command::Bounds { b2 } => Ok(Outcome {
            json: to_json(&bounds(*b2)?),
            domain_error: None,
        }),
        Command::Table => {
            let rows = paper_table()?;
            Ok(Outcome {
                json: to_json(&rows),
                domain_error: None,
            })
        }
        Command::CheckGeneral { dim, input } => {
            let text = fs::read_to_string(input).map_err(|e| Error::InvalidInput(e.to_string()))?;
            #[derive(serde::Deserialize)]
            struct GeneralInput {
                dim: Option<usize>,
                hodge: Vec<Vec<u64>>,
                #[serde(rename = "S")]
                s: Vec<Rat>,
                c1cn1: Rat,
                cn: Rat,
            }
            let parsed: GeneralInput =
                serde_json::from_str(&text).map_err(|e| Error::InvalidInput(e.to_string()))?;
            let n = dim
                .or(parsed.dim)
                .ok_or_else(|| Error::InvalidInput("dimension missing (--dim or \"dim\")".into()))?;
            let report = verify_salamon_general(n, &parsed.hodge, &parsed.s, &parsed.c1cn1, &parsed.cn)?;
            let ok = report.ok;
            Ok(Outcome {
                json: to_json(&report),
                domain_error: (!ok).then(|| "relation does not hold".to_string()),
            })
        }
        Command::Catalog {
            order_cap,
            families,
        } => {
            let catalog = filtered_catalog(*order_cap, families)?;
            #[derive(Serialize)]
            struct CatalogRow {
                label: String,
                family: &'static str,
                #[serde(skip_serializing_if = "Option::is_none")]
                n: Option<u32>,
                #[serde(skip_serializing_if = "Option::is_none")]
                k: Option<u32>,
                order: u64,
                s: Rat,
                eta: Rat,
                s_source: &'static str,
                globally_feasible: bool,
            }
            let rows: Vec<CatalogRow> = catalog
                .into_iter()
                .map(|e| CatalogRow {
                    label: e.label,
                    family: e.family.name(),
                    n: e.n,
                    k: e.k,
                    order: e.order,
                    s: e.s,
                    eta: e.eta,
                    s_source: e.s_source,
                    globally_feasible: e.globally_feasible,
                })
                .collect();
            Ok(Outcome {
                json: to_json(&rows),
                domain_error: None,
            })
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serialization cannot fail")
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            match &cli.output {
                Some(path) => {
                    if let Err(e) = fs::write(path, format!("{}\n", outcome.json)) {
                        eprintln!("error: cannot write {}: {e}", path.display());
                        return ExitCode::from(1);
                    }
                }
                None => println!("{}", outcome.json),
            }
            match outcome.domain_error {
                None => ExitCode::SUCCESS,
                Some(note) => {
                    eprintln!("error: {note}");
                    ExitCode::from(1)
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
