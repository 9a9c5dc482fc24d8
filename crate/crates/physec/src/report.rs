use std::fmt::Write as _;

use physec_core::LinkReport;

use crate::duplex::DuplexReport;

/// `prefix.field=value` lines, one per counter.
pub fn format_link_report(prefix: &str, r: &LinkReport, out: &mut String) {
    let lock = r
        .lock_acquired_at
        .map_or("none".to_string(), |b| b.to_string());
    let fields: [(&str, String); 20] = [
        ("frames_sent", r.frames_sent.to_string()),
        ("frames_received", r.frames_received.to_string()),
        ("crc_errors", r.crc_errors.to_string()),
        ("frames_aborted", r.frames_aborted.to_string()),
        ("invalid_headers", r.invalid_headers.to_string()),
        ("decode_errors", r.decode_errors.to_string()),
        ("encode_errors", r.encode_errors.to_string()),
        ("blocks_sent", r.blocks_sent.to_string()),
        ("blocks_received", r.blocks_received.to_string()),
        (
            "header_one_fraction",
            format!("{:.6}", r.header_one_fraction),
        ),
        ("wire_payload_ones", r.wire_payload_ones.to_string()),
        ("wire_payload_bits", r.wire_payload_bits.to_string()),
        ("lock_acquired_at", lock),
        ("tx_keystream_steps", r.tx_keystream_steps.to_string()),
        ("rx_keystream_steps", r.rx_keystream_steps.to_string()),
        ("rejected_requests", r.rejected_requests.to_string()),
        ("tx_mode", format!("{:?}", r.tx_mode)),
        ("rx_mode", format!("{:?}", r.rx_mode)),
        (
            "measured_utilization",
            format!("{:.6}", r.measured_utilization),
        ),
        (
            "wire_payload_monobit_p",
            format!(
                "{:.6}",
                physec_core::randomness::monobit_from_counts(
                    r.wire_payload_ones,
                    r.wire_payload_bits.max(1)
                )
                .p_value
            ),
        ),
    ];
    for (k, v) in fields {
        writeln!(out, "{prefix}.{k}={v}").unwrap();
    }
}

pub fn format_report(r: &DuplexReport) -> String {
    let mut s = String::new();
    format_link_report("forward", &r.forward, &mut s);
    if let Some(rev) = &r.reverse {
        format_link_report("reverse", rev, &mut s);
    }
    s
}
