//! Full-duplex runs. The threaded runner places each transmitter and each
//! receiver on its own thread, connected by bounded queues of wire bits.

use std::sync::mpsc;
use std::thread;

use physec_core::link::{LinkReport, BLOCK_BITS};
use physec_core::{ConfigError, SimConfig};

use crate::config::DuplexConfig;

#[derive(Debug, Clone, PartialEq)]
pub struct DuplexReport {
    pub forward: LinkReport,
    pub reverse: Option<LinkReport>,
}

const CHUNK: usize = 4096;

/// Runs one direction with TX and RX on separate threads.
pub fn run_threaded(config: &SimConfig) -> Result<LinkReport, ConfigError> {
    let mut source = config.source()?;
    let mut tx = config.tx_pipeline();
    let mut channel = config.channel();
    let mut rx = config.rx_pipeline(false);
    let (send, recv) = mpsc::sync_channel::<Vec<u128>>(8);
    thread::scope(|s| {
        let rx_thread = s.spawn(move || {
            for chunk in recv {
                for bits in chunk {
                    rx.receive(bits, BLOCK_BITS);
                }
            }
            rx
        });
        let mut chunk = Vec::with_capacity(CHUNK);
        for g in source.by_ref() {
            chunk.push(channel.transmit(&tx.process(&g)));
            if chunk.len() == CHUNK {
                send.send(std::mem::replace(&mut chunk, Vec::with_capacity(CHUNK)))
                    .expect("receiver thread alive");
            }
        }
        if !chunk.is_empty() {
            send.send(chunk).expect("receiver thread alive");
        }
        drop(send);
        let rx = rx_thread.join().expect("receiver thread panicked");
        Ok(LinkReport::collect(&source, &config.frames, &tx, &rx))
    })
}

/// Runs both directions. With `threaded`, directions run concurrently and
/// each splits TX and RX across threads; the report is identical either way.
pub fn run_duplex(config: &DuplexConfig, threaded: bool) -> Result<DuplexReport, ConfigError> {
    if !threaded {
        return Ok(DuplexReport {
            forward: physec_core::run_simulation(&config.forward)?,
            reverse: config
                .reverse
                .as_ref()
                .map(physec_core::run_simulation)
                .transpose()?,
        });
    }
    thread::scope(|s| {
        let rev = config
            .reverse
            .as_ref()
            .map(|r| s.spawn(move || run_threaded(r)));
        let forward = run_threaded(&config.forward)?;
        let reverse = rev
            .map(|h| h.join().expect("reverse direction panicked"))
            .transpose()?;
        Ok(DuplexReport { forward, reverse })
    })
}
