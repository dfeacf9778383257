use clap::{Parser, Subcommand, ValueEnum};
use num_traits::ToPrimitive;
use resp_core::engine::{self, ResidualReport};
use resp_core::io;
use resp_core::perm::{self, PermGroup};
use resp_core::torus::{self, MTGroup};
use resp_core::{corpus, Error};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "resp", version, about = "Residual properties of Z ⋉_φ Z^d from the matrix φ")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Full residual-property report for a matrix
    Analyze {
        #[arg(long)]
        matrix: PathBuf,
        /// Primes for the mod-p table (default 2,3,5,7,11)
        #[arg(long, value_delimiter = ',')]
        primes: Option<Vec<u64>>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Factor an integer polynomial into irreducibles
    Factor {
        #[arg(long)]
        poly: String,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// The exact set of primes p for which the group is residually p
    Primes {
        #[arg(long)]
        matrix: PathBuf,
    },
    /// Compare the polynomial criterion with the torsion-kernel oracle
    Oracle {
        #[arg(long)]
        matrix: PathBuf,
        /// Prime set: all | none | {2,3} | all-{5}
        #[arg(long)]
        pi: String,
    },
    /// Finite congruence quotient (i, x) -> (i mod r, x mod k)
    Quotient {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        k: u64,
    },
    /// Finite quotient in which m divides the order of the element's image
    Separate {
        #[arg(long)]
        matrix: PathBuf,
        /// Element as "(i; x1,...,xd)"
        #[arg(long)]
        element: String,
        #[arg(long)]
        m: u64,
    },
    /// Verify the finite-group lemma suite over a group catalog
    FiniteCheck {
        /// JSON catalog file; defaults to the built-in ten-group catalog
        #[arg(long)]
        catalog: Option<PathBuf>,
    },
    /// Analyze a seeded random GL(d,Z) corpus and cross-check every matrix
    Corpus {
        #[arg(long, default_value_t = 50)]
        count: usize,
        #[arg(long, default_value_t = 3)]
        dim: usize,
        /// Overrides the RESP_SEED environment variable and the default
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e);
            match e {
                Error::Inconsistency(_) => ExitCode::from(1),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn run(command: Command) -> Result<ExitCode, Error> {
    match command {
        Command::Analyze {
            matrix,
            primes,
            format,
        } => {
            let phi = io::parse_matrix_json(&read_file(&matrix)?)?;
            let table = primes.unwrap_or_else(|| engine::DEFAULT_TABLE_PRIMES.to_vec());
            let report = engine::analyze_with_primes(&phi, &table)?;
            match format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&report).unwrap()),
                Format::Text => print_report(&report),
            }
            Ok(exit_for(report.consistent))
        }
        Command::Factor { poly, format } => {
            let p = io::parse_poly(&poly)?;
            let fact = resp_core::factor_over_z(&p)?;
            match format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&fact).unwrap()),
                Format::Text => println!("{}", fact),
            }
            Ok(exit_for(fact.reconstruct() == p))
        }
        Command::Primes { matrix } => {
            let phi = io::parse_matrix_json(&read_file(&matrix)?)?;
            println!("{}", engine::good_primes(&phi)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Oracle { matrix, pi } => {
            let phi = io::parse_matrix_json(&read_file(&matrix)?)?;
            let pi = io::parse_pi_spec(&pi)?;
            let criterion = engine::residually_pi_tf_nilpotent(&phi, &pi)?;
            let kernel_zero = resp_core::lattice::torsion_kernel_is_zero(&phi, &pi)?;
            println!("pi: {}", pi);
            println!("criterion (no irreducible factor in S_pi): {}", yesno(criterion));
            println!("oracle (torsion kernel is zero):           {}", yesno(kernel_zero));
            println!("agree: {}", yesno(criterion == kernel_zero));
            Ok(exit_for(criterion == kernel_zero))
        }
        Command::Quotient { matrix, k } => {
            let phi = io::parse_matrix_json(&read_file(&matrix)?)?;
            let group = MTGroup::new(phi)?;
            let q = torus::congruence_quotient(&group, k)?;
            println!("k: {}", q.k);
            println!("r (order of phi mod k): {}", q.r);
            println!("group order: {}", q.group_order());
            match q.p_group {
                Some(p) => println!("p-group: yes (p = {})", p),
                None => println!("p-group: no"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Separate { matrix, element, m } => {
            let phi = io::parse_matrix_json(&read_file(&matrix)?)?;
            let group = MTGroup::new(phi)?;
            let g = io::parse_element(&element, group.dim())?;
            let w = torus::separating_quotient_with_order(&group, &g, m)?;
            println!("quotient: k = {}, r = {}, order {}", w.quotient.k, w.quotient.r, w.quotient.group_order());
            println!("image order: {}", w.image_order);
            println!("{} divides {}: {}", m, w.image_order, yesno(w.image_order % m == 0));
            Ok(exit_for(w.image_order % m == 0))
        }
        Command::FiniteCheck { catalog } => {
            let catalog = match catalog {
                Some(path) => perm::parse_catalog(&read_file(&path)?)?,
                None => perm::builtin_catalog(),
            };
            finite_check(&catalog)
        }
        Command::Corpus { count, dim, seed } => {
            let seed = seed
                .or_else(|| {
                    std::env::var("RESP_SEED")
                        .ok()
                        .and_then(|s| s.parse().ok())
                })
                .unwrap_or(corpus::DEFAULT_CORPUS_SEED);
            corpus_run(seed, count, dim)
        }
    }
}

fn read_file(path: &PathBuf) -> Result<String, Error> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("{}: {}", path.display(), e)))
}

fn exit_for(ok: bool) -> ExitCode {
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn yesno(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn print_report(r: &ResidualReport) {
    println!("dimension: {}", r.dim);
    println!("characteristic polynomial: {}", r.char_poly);
    println!("factorization: {}", r.factorization);
    println!("good primes: {}", r.good_primes);
    println!("residually nilpotent: {}", yesno(r.residually_nilpotent));
    println!(
        "residually torsion-free nilpotent: {}",
        yesno(r.residually_tf_nilpotent)
    );
    println!("unipotent: {}", yesno(r.unipotent));
    match r.quasi_unipotent {
        Some(k) => println!("quasi-unipotent: yes (phi^{} unipotent)", k),
        None => println!("quasi-unipotent: no"),
    }
    println!(
        "virtually residually p for all p: {}",
        yesno(r.virtually_res_all_p)
    );
    if let Some((lo, hi)) = r.nilpotency_class_interval {
        println!("nilpotency class interval: [{}, {}]", lo, hi);
    }
    if let Some(sol) = r.sol_flag {
        println!("Sol torus bundle: {}", yesno(sol));
    }
    println!("mod-p table:");
    for row in &r.mod_p_table {
        println!(
            "  p={}: order {}, unipotent mod p: {}, quotient residually p: {}, reverse gap: {}",
            row.p,
            row.order,
            yesno(row.unipotent_mod_p),
            yesno(row.gbar_residually_p),
            yesno(row.reverse_gap)
        );
    }
    let agreed = r.oracle_verdicts.iter().filter(|v| v.agree).count();
    println!(
        "oracle cross-checks: {}/{} agree",
        agreed,
        r.oracle_verdicts.len()
    );
    println!("consistent: {}", yesno(r.consistent));
}

fn finite_check(catalog: &perm::Catalog) -> Result<ExitCode, Error> {
    let mut violations = 0usize;
    for entry in &catalog.groups {
        let g = entry.build()?;
        let subgroups = g.all_subgroups();
        let mut subnormal = 0usize;
        let mut key_failures = 0usize;
        let mut chain_failures = 0usize;
        for h in &subgroups {
            let rec = perm::key_lemma_check(&g, h);
            if rec.subnormal {
                subnormal += 1;
                if !rec.divides {
                    key_failures += 1;
                }
                for p in [2usize, 3] {
                    if is_power_of(g.order() / h.order(), p)
                        && !p_chain_valid(&g, h, p)
                    {
                        chain_failures += 1;
                    }
                }
            }
        }
        let intersections_ok = perm::intersection_checks(&g, &subgroups);
        let mut weak_failures = 0usize;
        for p in [2usize, 3] {
            for x in g.elements() {
                if x.is_identity() {
                    continue;
                }
                if !perm::weakly_resp_check_with(&g, &subgroups, p, x)?.agree {
                    weak_failures += 1;
                }
            }
        }
        let ok = key_failures == 0 && chain_failures == 0 && intersections_ok && weak_failures == 0;
        if !ok {
            violations += 1;
        }
        println!(
            "{:10} order {:4}: {} subgroups, {} subnormal, key lemma {}, chains {}, intersections {}, weak-resp {}",
            entry.name,
            g.order(),
            subgroups.len(),
            subnormal,
            passfail(key_failures == 0),
            passfail(chain_failures == 0),
            passfail(intersections_ok),
            passfail(weak_failures == 0),
        );
    }
    if violations == 0 {
        println!("all checks passed");
        Ok(ExitCode::SUCCESS)
    } else {
        println!("{} group(s) with violations", violations);
        Ok(ExitCode::from(1))
    }
}

fn passfail(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}

fn is_power_of(mut n: usize, p: usize) -> bool {
    if n == 0 {
        return false;
    }
    while n % p == 0 {
        n /= p;
    }
    n == 1
}

fn p_chain_valid(g: &PermGroup, h: &PermGroup, p: usize) -> bool {
    match perm::p_refined_chain(g, h, p) {
        Ok(chain) => chain
            .windows(2)
            .all(|w| w[1].index_of(&w[0]) == p && w[0].is_normal_in(&w[1])),
        Err(_) => false,
    }
}

fn corpus_run(seed: u64, count: usize, dim: usize) -> Result<ExitCode, Error> {
    let matrices = corpus::glz_corpus(seed, count, dim);
    let mut inconsistent = 0usize;
    for (i, phi) in matrices.iter().enumerate() {
        let report = engine::analyze(phi)?;
        if !report.consistent {
            inconsistent += 1;
        }
        println!(
            "#{:04} det={} good_primes={} quasi={} consistent={}",
            i,
            phi.det().to_i64().map_or_else(|| phi.det().to_string(), |v| v.to_string()),
            report.good_primes,
            report
                .quasi_unipotent
                .map_or_else(|| "no".to_string(), |k| k.to_string()),
            yesno(report.consistent)
        );
    }
    println!(
        "corpus: seed {}, {} matrices, dim {}, {} inconsistent",
        seed, count, dim, inconsistent
    );
    Ok(exit_for(inconsistent == 0))
}
