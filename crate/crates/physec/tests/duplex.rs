use physec::config::{parse_config, DuplexConfig};
use physec::duplex::run_threaded;
use physec::{bench_throughput, format_report, run_duplex};
use physec_core::{CipherKey, FrameSpec, GeneratorKey, SimConfig};

fn key(n: u64) -> CipherKey {
    let k = |i: u64| {
        GeneratorKey::new(0x9E37_79B9_7F4A_7C15 ^ (n << 8) ^ i, i * 77 + n, i + 1).unwrap()
    };
    CipherKey::new([k(1), k(2), k(3), k(4)], k(5))
}

#[test]
fn threaded_matches_single_threaded() {
    let frames = FrameSpec {
        frame_length: 300,
        frame_count: 200,
        target_utilization: 0.7,
        payload_seed: 4,
    };
    let mut fwd = SimConfig::new(frames, key(1), key(1));
    fwd.error_positions = vec![50_000, 90_001];
    let rev = SimConfig::new(frames, key(2), key(3));
    let cfg = DuplexConfig {
        forward: fwd.clone(),
        reverse: Some(rev),
    };
    let a = run_duplex(&cfg, false).unwrap();
    let b = run_duplex(&cfg, true).unwrap();
    assert_eq!(a, b);
    assert_eq!(format_report(&a), format_report(&b));
    assert_eq!(
        run_threaded(&fwd).unwrap(),
        physec_core::run_simulation(&fwd).unwrap()
    );
    assert_eq!(a.reverse.unwrap().frames_received, 0);
}

#[test]
fn config_defaults_and_lists() {
    let dir = tempfile::TempDir::new().unwrap();
    std::fs::write(dir.path().join("k"), physec::format_key(&key(1))).unwrap();
    let cfg = parse_config(
        "tx_key = k\nrx_key = k  # same\ncipher_on = 5, 300\ncipher_off = 100\nerror_positions = 7,8\n",
        dir.path(),
    )
    .unwrap();
    let f = &cfg.forward;
    assert_eq!(f.frames.frame_length, 1024);
    assert_eq!(f.schedule.len(), 3);
    assert_eq!(f.schedule[1].block, 100);
    assert_eq!(f.error_positions, vec![7, 8]);
    assert!(cfg.reverse.is_none());
    let none = parse_config("tx_key = k\nrx_key = k\ncipher_on =\n", dir.path()).unwrap();
    assert!(none.forward.schedule.is_empty());
    assert!(parse_config("tx_key = k\n", dir.path()).is_err());
    assert!(parse_config("tx_key = k\nrx_key = k\nreverse_tx_key = k\n", dir.path()).is_err());
    assert!(parse_config("tx_key = k\nrx_key = k\nframe_count = many\n", dir.path()).is_err());
}

#[test]
fn bench_rates_are_positive() {
    let r = bench_throughput(&key(1), 5000);
    assert!(r.keystream.blocks_per_second > 0.0);
    assert!(r.pipeline.blocks_per_second > 0.0);
    assert!(r.format().contains("keystream.bits_per_second"));
}
