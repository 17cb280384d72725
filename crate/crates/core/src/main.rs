use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_bigint::BigUint;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use elgamal_units::bench::{
    find_comparable_moduli, run_benchmark, summarize, write_csv, write_gnuplot, BenchConfig,
    BenchError, BenchScheme,
};
use elgamal_units::number_theory::{discrete_log, discrete_log_auto, multiplicative_order};
use elgamal_units::scheme::{lookup, SchemeError};
use elgamal_units::unit_groups::{enumerate_u_k, UnitGroupError, UnitGroupTower};
use elgamal_units::KeyFile;

#[derive(Parser)]
#[command(name = "elgamal-units", version, about = "ElGamal over iterated groups of units of Z_n")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the totient tower of n, the enumeration of U^k(Z_n) and
    /// (for k = 3) the isomorphism table.
    Explore {
        n: BigUint,
        #[arg(default_value_t = 3)]
        k: u8,
    },
    /// Generate a key pair and write the public/private key files.
    Keygen {
        #[arg(long)]
        scheme: String,
        #[arg(long)]
        modulus: BigUint,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "public.key")]
        public_out: PathBuf,
        #[arg(long, default_value = "private.key")]
        private_out: PathBuf,
        #[arg(long, hide = true)]
        force_private: Option<BigUint>,
    },
    /// Encrypt an integer message; prints the ciphertext as `c1,c2`.
    Encrypt {
        #[arg(long)]
        key: PathBuf,
        #[arg(long)]
        message: BigUint,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, hide = true)]
        force_nonce: Option<BigUint>,
    },
    /// Decrypt a `c1,c2` ciphertext; prints the decoded integer.
    Decrypt {
        #[arg(long)]
        key: PathBuf,
        #[arg(long)]
        ciphertext: String,
    },
    /// Time the generator power in U^2 vs U^3 on comparable orders.
    Bench {
        /// Minimum group order for both sides.
        #[arg(long, default_value_t = 1000)]
        orders: u64,
        #[arg(long, default_value_t = 50)]
        runs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Allowed difference between the two group orders.
        #[arg(long, default_value_t = 2)]
        slack: u64,
        /// Search bound for the modulus scan.
        #[arg(long, default_value_t = 1_000_000)]
        bound: u64,
        /// Override the U^2 modulus (skips the search; requires --u3).
        #[arg(long, requires = "u3")]
        u2: Option<BigUint>,
        /// Override the U^3 modulus (skips the search; requires --u2).
        #[arg(long, requires = "u2")]
        u3: Option<BigUint>,
        /// Write the CSV report here instead of stdout.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Also write `<prefix>.u2.dat` / `<prefix>.u3.dat` gnuplot data.
        #[arg(long)]
        gnuplot: Option<PathBuf>,
    },
    /// Solve g^e = target (mod m); prints e.
    Dlog {
        #[arg(long)]
        base: BigUint,
        #[arg(long)]
        target: BigUint,
        #[arg(long)]
        modulus: BigUint,
        /// Multiplicative order of the base; computed when omitted.
        #[arg(long)]
        order: Option<BigUint>,
        /// brute | bsgs | pohlig-hellman | auto
        #[arg(long, default_value = "auto")]
        method: String,
    },
}

struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn new(code: u8, message: impl ToString) -> Self {
        Self {
            code,
            message: message.to_string(),
        }
    }
}

impl From<SchemeError> for CliError {
    fn from(e: SchemeError) -> Self {
        CliError::new(e.exit_code() as u8, e)
    }
}

impl From<UnitGroupError> for CliError {
    fn from(e: UnitGroupError) -> Self {
        CliError::new(2, e)
    }
}

fn make_rng(seed: Option<u64>) -> ChaCha20Rng {
    match seed {
        Some(s) => ChaCha20Rng::seed_from_u64(s),
        None => ChaCha20Rng::from_entropy(),
    }
}

fn read_key_file(path: &PathBuf) -> Result<KeyFile, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::new(3, format!("cannot read {}: {e}", path.display())))?;
    KeyFile::parse(&text).map_err(|e| CliError::new(3, format!("{}: {e}", path.display())))
}

fn write_file(path: &PathBuf, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents)
        .map_err(|e| CliError::new(3, format!("cannot write {}: {e}", path.display())))
}

fn cmd_explore(n: &BigUint, k: u8) -> Result<(), CliError> {
    if !(1..=3).contains(&k) {
        return Err(CliError::new(2, "k must be 1, 2 or 3"));
    }
    let tower = UnitGroupTower::build(n)?;
    println!("n = {}", tower.n());
    println!("phi(n) = {}", tower.phi1());
    println!("phi^2(n) = {}", tower.phi2());
    println!("phi^3(n) = {}", tower.phi3());
    println!("g1 = {}", tower.g1());
    println!("g2 = {}", tower.g2());
    println!("g3 = {}", tower.g3());
    println!("g = {}", tower.u3_generator());
    match enumerate_u_k(n, k) {
        Ok(set) => {
            let elems: Vec<String> = set.iter().map(|v| v.to_string()).collect();
            println!("U^{k}(Z_{n}) = {{{}}}", elems.join(", "));
            if k == 3 {
                for x in &set {
                    let f = tower.iso_f(x)?;
                    println!("f({x}) = {f}");
                }
            }
        }
        Err(UnitGroupError::EnumerationTooLarge(phi)) => {
            eprintln!("phi(n) = {phi} too large to enumerate; skipping element listing");
        }
        Err(e) => return Err(e.into()),
    }
    Ok(())
}

fn cmd_keygen(
    scheme_name: &str,
    modulus: &BigUint,
    seed: Option<u64>,
    public_out: &PathBuf,
    private_out: &PathBuf,
    force_private: Option<&BigUint>,
) -> Result<(), CliError> {
    let scheme = lookup(scheme_name)?;
    let mut rng = make_rng(seed);
    let files = scheme.keygen(modulus, &mut rng as &mut dyn RngCore, force_private)?;
    if files.weak_key {
        eprintln!("warning: weak key (private exponent equals the group order)");
    }
    write_file(public_out, &files.public.serialize())?;
    write_file(private_out, &files.private.serialize())?;
    Ok(())
}

fn parse_ciphertext(text: &str) -> Result<(BigUint, BigUint), CliError> {
    let (a, b) = text
        .split_once(',')
        .ok_or_else(|| CliError::new(2, "ciphertext must be two decimals separated by a comma"))?;
    let parse = |s: &str| {
        s.trim()
            .parse::<BigUint>()
            .map_err(|_| CliError::new(2, format!("'{s}' is not a decimal integer")))
    };
    Ok((parse(a)?, parse(b)?))
}

fn cmd_encrypt(
    key_path: &PathBuf,
    message: &BigUint,
    seed: Option<u64>,
    force_nonce: Option<&BigUint>,
) -> Result<(), CliError> {
    let key = read_key_file(key_path)?;
    let scheme = lookup(key.scheme().map_err(SchemeError::from)?)?;
    let mut rng = make_rng(seed);
    let (c1, c2) = scheme.encrypt(&key, message, &mut rng as &mut dyn RngCore, force_nonce)?;
    println!("{c1},{c2}");
    Ok(())
}

fn cmd_decrypt(key_path: &PathBuf, ciphertext: &str) -> Result<(), CliError> {
    let key = read_key_file(key_path)?;
    let scheme = lookup(key.scheme().map_err(SchemeError::from)?)?;
    let (c1, c2) = parse_ciphertext(ciphertext)?;
    let m = scheme.decrypt(&key, (&c1, &c2))?;
    println!("{m}");
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_bench(
    orders: u64,
    runs: usize,
    seed: u64,
    slack: u64,
    bound: u64,
    u2: Option<BigUint>,
    u3: Option<BigUint>,
    csv: Option<&PathBuf>,
    gnuplot: Option<&PathBuf>,
) -> Result<(), CliError> {
    let (n_u2, n_u3) = match (u2, u3) {
        (Some(a), Some(b)) => (a, b),
        _ => find_comparable_moduli(orders, Some(slack), bound).map_err(|e| match e {
            BenchError::NoPairFound { .. } => CliError::new(2, e),
            other => CliError::new(2, other),
        })?,
    };
    eprintln!("benchmarking U^2(Z_{n_u2}) vs U^3(Z_{n_u3}), {runs} runs, seed {seed}");
    let config = BenchConfig {
        n_u2,
        n_u3,
        runs,
        seed,
    };
    let records = run_benchmark(&config).map_err(|e| CliError::new(2, e))?;
    let summary = if records.is_empty() {
        None
    } else {
        Some(summarize(&records).map_err(|e| CliError::new(2, e))?)
    };
    let mut out: Vec<u8> = Vec::new();
    write_csv(&mut out, &records, summary.as_ref()).map_err(|e| CliError::new(3, e))?;
    match csv {
        Some(path) => write_file(path, std::str::from_utf8(&out).expect("csv is utf-8"))?,
        None => {
            std::io::stdout()
                .write_all(&out)
                .map_err(|e| CliError::new(3, e))?;
        }
    }
    if let Some(prefix) = gnuplot {
        for (scheme, suffix) in [(BenchScheme::U2, "u2"), (BenchScheme::U3, "u3")] {
            let mut buf: Vec<u8> = Vec::new();
            write_gnuplot(&mut buf, &records, scheme).map_err(|e| CliError::new(3, e))?;
            let path = PathBuf::from(format!("{}.{suffix}.dat", prefix.display()));
            write_file(&path, std::str::from_utf8(&buf).expect("gnuplot data is utf-8"))?;
        }
    }
    if let Some(s) = &summary {
        eprintln!(
            "mean U^2 = {:.1} ns, mean U^3 = {:.1} ns, ratio U^3/U^2 = {:.2}",
            s.u2.mean_ns, s.u3.mean_ns, s.ratio_u3_over_u2
        );
    }
    Ok(())
}

fn cmd_dlog(
    base: &BigUint,
    target: &BigUint,
    modulus: &BigUint,
    order: Option<BigUint>,
    method: &str,
) -> Result<(), CliError> {
    let order = match order {
        Some(o) => o,
        None => multiplicative_order(base, modulus).map_err(|e| CliError::new(2, e))?,
    };
    let result = if method == "auto" {
        discrete_log_auto(base, target, modulus, &order)
    } else {
        let m = method.parse().map_err(|e: String| CliError::new(2, e))?;
        discrete_log(base, target, modulus, &order, m)
    };
    let e = result.map_err(|e| CliError::new(2, e))?;
    println!("{e}");
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Explore { n, k } => cmd_explore(&n, k),
        Command::Keygen {
            scheme,
            modulus,
            seed,
            public_out,
            private_out,
            force_private,
        } => cmd_keygen(
            &scheme,
            &modulus,
            seed,
            &public_out,
            &private_out,
            force_private.as_ref(),
        ),
        Command::Encrypt {
            key,
            message,
            seed,
            force_nonce,
        } => cmd_encrypt(&key, &message, seed, force_nonce.as_ref()),
        Command::Decrypt { key, ciphertext } => cmd_decrypt(&key, &ciphertext),
        Command::Bench {
            orders,
            runs,
            seed,
            slack,
            bound,
            u2,
            u3,
            csv,
            gnuplot,
        } => cmd_bench(
            orders,
            runs,
            seed,
            slack,
            bound,
            u2,
            u3,
            csv.as_ref(),
            gnuplot.as_ref(),
        ),
        Command::Dlog {
            base,
            target,
            modulus,
            order,
            method,
        } => cmd_dlog(&base, &target, &modulus, order, &method),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
