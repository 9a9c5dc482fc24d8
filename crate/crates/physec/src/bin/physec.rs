use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use physec::config::read_config;
use physec::{bench_throughput, format_report, read_key, read_records, run_duplex, write_records};
use physec_core::cipher::Keystream;
use physec_core::randomness::{run_suite, BitSequence};
use physec_core::{KeystreamBank64, SyncGenerator};

const FORMATS: &str = "\
FILE FORMATS
  key file      Five non-comment lines `gamma x0 y0`, each value 1-16 hex digits
                (optional 0x). Lines are bank lanes 0..3, then the sync
                generator. gamma must be nonzero; y0 must be nonzero and fit in
                61 bits. `#` starts a comment.
  block file    9-byte records: byte 0 = sync header in bits 1:0 (01 data,
                10 control), bytes 1..8 = 64-bit payload, little-endian.
  bit file      Packed bits, bit 0 of byte 0 first.
  data keystream  One 64-bit word per block, little-endian.
  config file   `key = value` lines: frame_length, frame_count, utilization,
                seed, tx_key, rx_key, reverse_tx_key, reverse_rx_key,
                cipher_on, cipher_off (comma-separated block indices;
                cipher_on defaults to 0, leave empty for none),
                error_positions, reverse_error_positions (wire bit indices),
                warmup_blocks, min_blocks, scrambler_seed. Key paths are
                relative to the config file.
  report        `direction.counter=value` lines.

EXIT CODES
  0 success   1 nist: a test failed   2 I/O, config or key error
  3 illegal sync header in a block file";

#[derive(Parser)]
#[command(name = "physec", version, about = "Chaotic keystream encryption of 64b/66b block streams", after_help = FORMATS)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    Data,
    Sync,
}

#[derive(Subcommand)]
enum Command {
    /// Write raw keystream: N 64-bit words (data) or N packed bits (sync).
    #[command(after_help = FORMATS)]
    Keystream {
        #[arg(long)]
        key: PathBuf,
        #[arg(long)]
        blocks: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "data")]
        which: Which,
    },
    /// Cipher a block file with the keystream starting at position K.
    #[command(after_help = FORMATS)]
    Encrypt(CipherArgs),
    /// Inverse of encrypt (the same operation).
    #[command(after_help = FORMATS)]
    Decrypt(CipherArgs),
    /// Run a loopback link simulation and print its report.
    #[command(after_help = FORMATS)]
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Also write the report here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Run each pipeline stage on its own thread.
        #[arg(long)]
        threads: bool,
    },
    /// Run the randomness tests on a packed bit file.
    #[command(after_help = FORMATS)]
    Nist {
        #[arg(long = "in")]
        input: PathBuf,
        /// Use only the first N bits.
        #[arg(long)]
        bits: Option<usize>,
    },
    /// Measure keystream and full-pipeline throughput.
    #[command(after_help = FORMATS)]
    Bench {
        #[arg(long)]
        key: PathBuf,
        #[arg(long, default_value_t = 20_000)]
        blocks: u64,
    },
}

#[derive(clap::Args)]
struct CipherArgs {
    #[arg(long)]
    key: PathBuf,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    start_index: u64,
}

/// An error carrying its exit code.
struct Failure(u8, anyhow::Error);

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(2, e.into())
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
    std::fs::write(path, bytes).with_context(|| format!("cannot write {}", path.display()))
}

fn keystream(key: &Path, blocks: u64, out: &Path, which: Which) -> Result<(), Failure> {
    let key = read_key(key)?;
    let bytes = match which {
        Which::Data => {
            let mut bank = KeystreamBank64::new(&key.bank_keys);
            let mut v = Vec::with_capacity(blocks as usize * 8);
            for _ in 0..blocks {
                v.extend_from_slice(&bank.next_word().to_le_bytes());
            }
            v
        }
        Which::Sync => {
            let mut g = SyncGenerator::new(&key.sync_key);
            let bits: BitSequence = (0..blocks).map(|_| g.next_bit()).collect();
            bits.as_bytes().to_vec()
        }
    };
    write_file(out, &bytes)?;
    Ok(())
}

fn cipher(args: &CipherArgs) -> Result<(), Failure> {
    let key = read_key(&args.key)?;
    let blocks = read_records(&args.input)?;
    let mut ks = Keystream::new(&key);
    ks.skip(args.start_index);
    let mut out = Vec::with_capacity(blocks.len());
    for (i, b) in blocks.iter().enumerate() {
        let c = ks
            .apply(b)
            .map_err(|e| Failure(3, anyhow!("record {i}: {e}")))?;
        out.push(c);
    }
    write_records(&args.out, &out)?;
    Ok(())
}

fn simulate(config: &Path, out: Option<&Path>, threads: bool) -> Result<(), Failure> {
    let cfg = read_config(config)?;
    let report = format_report(&run_duplex(&cfg, threads)?);
    std::io::stdout().write_all(report.as_bytes())?;
    if let Some(p) = out {
        write_file(p, report.as_bytes())?;
    }
    Ok(())
}

fn nist(input: &Path, bits: Option<usize>) -> Result<(), Failure> {
    let bytes = std::fs::read(input).with_context(|| format!("cannot read {}", input.display()))?;
    let seq = match bits {
        Some(n) if n > bytes.len() * 8 => {
            return Err(Failure(
                2,
                anyhow!(
                    "--bits {n} exceeds the {} bits in the file",
                    bytes.len() * 8
                ),
            ))
        }
        Some(n) => BitSequence::from_bytes_truncated(&bytes, n),
        None => BitSequence::from_bytes(&bytes),
    };
    println!("bits={}", seq.len());
    let mut ran = 0;
    let mut failed = 0;
    for e in run_suite(&seq) {
        match e.outcome {
            Ok(r) => {
                ran += 1;
                failed += !r.passed as usize;
                let verdict = if r.passed { "PASS" } else { "FAIL" };
                println!(
                    "{} p={:.6} statistic={:.6} {verdict}",
                    e.name, r.p_value, r.statistic
                );
            }
            Err(err) => println!("{} SKIP ({err})", e.name),
        }
    }
    if ran == 0 {
        return Err(Failure(2, anyhow!("input too short for every test")));
    }
    if failed > 0 {
        return Err(Failure(1, anyhow!("{failed} test(s) failed")));
    }
    Ok(())
}

fn bench(key: &Path, blocks: u64) -> Result<(), Failure> {
    let key = read_key(key)?;
    print!("{}", bench_throughput(&key, blocks).format());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Keystream {
            key,
            blocks,
            out,
            which,
        } => keystream(key, *blocks, out, *which),
        Command::Encrypt(a) | Command::Decrypt(a) => cipher(a),
        Command::Simulate {
            config,
            out,
            threads,
        } => simulate(config, out.as_deref(), *threads),
        Command::Nist { input, bits } => nist(input, *bits),
        Command::Bench { key, blocks } => bench(key, *blocks),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure(code, e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(code)
        }
    }
}
