//! 64b/66b line coding.
//!
//! A [`CharGroup8`] (eight XGMII lanes) maps to one [`Block66`]: a 2-bit sync
//! header plus a 64-bit payload. Data-only groups use header `0b01` and carry
//! the eight octets verbatim, lane 0 in payload bits `[7:0]`. Everything else
//! uses header `0b10`, an 8-bit block type in bits `[7:0]`, and the remaining
//! 56 bits packed with 7-bit control codes, 4-bit ordered-set codes and data
//! octets following the Clause 49 field layouts.
//!
//! Payload bit 0 is transmitted first. Header value `0b01` means bit 0 = 1.

use thiserror::Error;

pub const SYNC_DATA: u8 = 0b01;
pub const SYNC_CONTROL: u8 = 0b10;

const IDLE_CODE: u8 = 0x00;
const ERROR_CODE: u8 = 0x1e;
const SEQUENCE_O_CODE: u8 = 0x0;

/// Ordered-set code carried in lane 3 of a Cipher_ON sequence.
pub const CIPHER_ON_CODE: u8 = 0x04;
/// Ordered-set code carried in lane 3 of a Cipher_OFF sequence.
pub const CIPHER_OFF_CODE: u8 = 0x05;

const IDLE_PAYLOAD: u64 = 0x1e;
const ERROR_PAYLOAD: u64 = {
    let mut p = 0x1eu64;
    let mut lane = 0;
    while lane < 8 {
        p |= (ERROR_CODE as u64) << (8 + 7 * lane);
        lane += 1;
    }
    p
};
const CIPHER_ON_PAYLOAD: u64 = 0x0400_0000_0400_0055;
const CIPHER_OFF_PAYLOAD: u64 = 0x0500_0000_0500_0055;

/// One 66-bit line block. `sync` holds the 2-bit header, bit 0 first on the
/// wire. Blocks read off a channel may carry the illegal headers `0b00`/`0b11`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Block66 {
    pub sync: u8,
    pub payload: u64,
}

impl Block66 {
    pub const fn new(sync: u8, payload: u64) -> Self {
        Block66 { sync, payload }
    }

    pub const fn has_legal_header(&self) -> bool {
        self.sync == SYNC_DATA || self.sync == SYNC_CONTROL
    }

    pub const fn is_data(&self) -> bool {
        self.sync == SYNC_DATA
    }

    /// Payload octets in transmission order.
    pub fn payload_bytes(&self) -> [u8; 8] {
        self.payload.to_le_bytes()
    }
}

/// The supported XGMII control characters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Control {
    Idle,
    Start,
    Terminate,
    /// Sequence ordered-set marker (/Q/), always in lane 0 or 4.
    Sequence,
    Error,
}

impl Control {
    pub const fn xgmii(self) -> u8 {
        match self {
            Control::Idle => 0x07,
            Control::Start => 0xfb,
            Control::Terminate => 0xfd,
            Control::Sequence => 0x9c,
            Control::Error => 0xfe,
        }
    }

    pub const fn from_xgmii(value: u8) -> Option<Control> {
        match value {
            0x07 => Some(Control::Idle),
            0xfb => Some(Control::Start),
            0xfd => Some(Control::Terminate),
            0x9c => Some(Control::Sequence),
            0xfe => Some(Control::Error),
            _ => None,
        }
    }
}

/// One XGMII lane: an octet plus its control flag. Control octets always
/// carry a [`Control`] code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TxChar {
    value: u8,
    is_control: bool,
}

impl TxChar {
    pub const IDLE: TxChar = TxChar::control(Control::Idle);
    pub const START: TxChar = TxChar::control(Control::Start);
    pub const TERMINATE: TxChar = TxChar::control(Control::Terminate);
    pub const SEQUENCE: TxChar = TxChar::control(Control::Sequence);
    pub const ERROR: TxChar = TxChar::control(Control::Error);

    pub const fn data(value: u8) -> Self {
        TxChar {
            value,
            is_control: false,
        }
    }

    pub const fn control(c: Control) -> Self {
        TxChar {
            value: c.xgmii(),
            is_control: true,
        }
    }

    pub const fn value(&self) -> u8 {
        self.value
    }

    pub const fn is_control(&self) -> bool {
        self.is_control
    }

    pub const fn as_control(&self) -> Option<Control> {
        if self.is_control {
            Control::from_xgmii(self.value)
        } else {
            None
        }
    }

    pub const fn as_data(&self) -> Option<u8> {
        if self.is_control {
            None
        } else {
            Some(self.value)
        }
    }
}

/// Eight lanes, lane 0 first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CharGroup8(pub [TxChar; 8]);

impl CharGroup8 {
    pub const fn from_data(octets: [u8; 8]) -> Self {
        let mut chars = [TxChar::data(0); 8];
        let mut i = 0;
        while i < 8 {
            chars[i] = TxChar::data(octets[i]);
            i += 1;
        }
        CharGroup8(chars)
    }

    pub const fn idle() -> Self {
        CharGroup8([TxChar::IDLE; 8])
    }

    pub const fn error() -> Self {
        CharGroup8([TxChar::ERROR; 8])
    }

    pub fn lanes(&self) -> &[TxChar; 8] {
        &self.0
    }
}

/// Block classification by sync header and block type field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BlockType {
    Data,
    /// 0x1e: eight control characters.
    AllControl,
    /// 0x2d: four control characters, then an ordered set in lane 4.
    ControlOrderedSet,
    /// 0x33: four control characters, then a start in lane 4.
    ControlStart,
    /// 0x66: ordered set in lane 0, start in lane 4.
    OrderedSetStart,
    /// 0x55: two ordered sets.
    DoubleOrderedSet,
    /// 0x78: start in lane 0.
    Start,
    /// 0x4b: ordered set in lane 0, then four control characters.
    OrderedSetControl,
    /// 0x87..0xff: terminate in the given lane (0–7).
    Terminate(u8),
    /// Illegal header or unknown type field.
    Unknown,
}

impl BlockType {
    pub const CONTROL_TYPES: [u8; 15] = [
        0x1e, 0x2d, 0x33, 0x66, 0x55, 0x78, 0x4b, 0x87, 0x99, 0xaa, 0xb4, 0xcc, 0xd2, 0xe1, 0xff,
    ];

    pub fn from_type_field(ty: u8) -> Option<BlockType> {
        FORMATS.iter().find(|f| f.ty == ty).map(|f| f.block_type)
    }

    /// The block type field, or `None` for data and unknown blocks.
    pub fn type_field(self) -> Option<u8> {
        FORMATS.iter().find(|f| f.block_type == self).map(|f| f.ty)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Slot {
    D,
    C,
    O,
    S,
    T,
}

#[derive(Debug, Clone, Copy)]
enum Field {
    Data(u8),
    Control(u8),
    OrderedSet(u8),
    Gap(u8),
}

struct Format {
    ty: u8,
    block_type: BlockType,
    lanes: [Slot; 8],
    /// Payload fields after the type octet, in transmission order.
    fields: &'static [Field],
}

use Field::{Control as Cf, Data as Df, Gap, OrderedSet as Of};
use Slot::{C, D, O, S, T};

static FORMATS: [Format; 15] = [
    Format {
        ty: 0x1e,
        block_type: BlockType::AllControl,
        lanes: [C, C, C, C, C, C, C, C],
        fields: &[Cf(0), Cf(1), Cf(2), Cf(3), Cf(4), Cf(5), Cf(6), Cf(7)],
    },
    Format {
        ty: 0x2d,
        block_type: BlockType::ControlOrderedSet,
        lanes: [C, C, C, C, O, D, D, D],
        fields: &[Cf(0), Cf(1), Cf(2), Cf(3), Of(4), Df(5), Df(6), Df(7)],
    },
    Format {
        ty: 0x33,
        block_type: BlockType::ControlStart,
        lanes: [C, C, C, C, S, D, D, D],
        fields: &[Cf(0), Cf(1), Cf(2), Cf(3), Gap(4), Df(5), Df(6), Df(7)],
    },
    Format {
        ty: 0x66,
        block_type: BlockType::OrderedSetStart,
        lanes: [O, D, D, D, S, D, D, D],
        fields: &[Df(1), Df(2), Df(3), Of(0), Gap(4), Df(5), Df(6), Df(7)],
    },
    Format {
        ty: 0x55,
        block_type: BlockType::DoubleOrderedSet,
        lanes: [O, D, D, D, O, D, D, D],
        fields: &[Df(1), Df(2), Df(3), Of(0), Of(4), Df(5), Df(6), Df(7)],
    },
    Format {
        ty: 0x78,
        block_type: BlockType::Start,
        lanes: [S, D, D, D, D, D, D, D],
        fields: &[Df(1), Df(2), Df(3), Df(4), Df(5), Df(6), Df(7)],
    },
    Format {
        ty: 0x4b,
        block_type: BlockType::OrderedSetControl,
        lanes: [O, D, D, D, C, C, C, C],
        fields: &[Df(1), Df(2), Df(3), Of(0), Cf(4), Cf(5), Cf(6), Cf(7)],
    },
    Format {
        ty: 0x87,
        block_type: BlockType::Terminate(0),
        lanes: [T, C, C, C, C, C, C, C],
        fields: &[Gap(7), Cf(1), Cf(2), Cf(3), Cf(4), Cf(5), Cf(6), Cf(7)],
    },
    Format {
        ty: 0x99,
        block_type: BlockType::Terminate(1),
        lanes: [D, T, C, C, C, C, C, C],
        fields: &[Df(0), Gap(6), Cf(2), Cf(3), Cf(4), Cf(5), Cf(6), Cf(7)],
    },
    Format {
        ty: 0xaa,
        block_type: BlockType::Terminate(2),
        lanes: [D, D, T, C, C, C, C, C],
        fields: &[Df(0), Df(1), Gap(5), Cf(3), Cf(4), Cf(5), Cf(6), Cf(7)],
    },
    Format {
        ty: 0xb4,
        block_type: BlockType::Terminate(3),
        lanes: [D, D, D, T, C, C, C, C],
        fields: &[Df(0), Df(1), Df(2), Gap(4), Cf(4), Cf(5), Cf(6), Cf(7)],
    },
    Format {
        ty: 0xcc,
        block_type: BlockType::Terminate(4),
        lanes: [D, D, D, D, T, C, C, C],
        fields: &[Df(0), Df(1), Df(2), Df(3), Gap(3), Cf(5), Cf(6), Cf(7)],
    },
    Format {
        ty: 0xd2,
        block_type: BlockType::Terminate(5),
        lanes: [D, D, D, D, D, T, C, C],
        fields: &[Df(0), Df(1), Df(2), Df(3), Df(4), Gap(2), Cf(6), Cf(7)],
    },
    Format {
        ty: 0xe1,
        block_type: BlockType::Terminate(6),
        lanes: [D, D, D, D, D, D, T, C],
        fields: &[Df(0), Df(1), Df(2), Df(3), Df(4), Df(5), Gap(1), Cf(7)],
    },
    Format {
        ty: 0xff,
        block_type: BlockType::Terminate(7),
        lanes: [D, D, D, D, D, D, D, T],
        fields: &[Df(0), Df(1), Df(2), Df(3), Df(4), Df(5), Df(6)],
    },
];

/// The group has no 64b/66b representation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("character group matches no 64b/66b block format")]
pub struct EncodeError;

impl EncodeError {
    /// The all-/E/ control block a transmitter sends in place of the group.
    pub const fn recovery(&self) -> Block66 {
        make_error_block()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("illegal sync header {0:#04b}")]
    InvalidHeader(u8),
    #[error("unknown block type field {0:#04x}")]
    InvalidType(u8),
    #[error("lane {lane}: unsupported control code {code:#04x}")]
    InvalidControlCode { lane: u8, code: u8 },
    #[error("lane {lane}: unsupported ordered-set code {code:#x}")]
    InvalidOrderedSetCode { lane: u8, code: u8 },
}

impl DecodeError {
    /// The all-/E/ group a receiver delivers in place of the block.
    pub const fn recovery(&self) -> CharGroup8 {
        CharGroup8::error()
    }
}

fn slot_of(c: &TxChar) -> Slot {
    match c.as_control() {
        None => Slot::D,
        Some(Control::Idle) | Some(Control::Error) => Slot::C,
        Some(Control::Start) => Slot::S,
        Some(Control::Terminate) => Slot::T,
        Some(Control::Sequence) => Slot::O,
    }
}

fn control_code(c: &TxChar) -> u8 {
    match c.as_control() {
        Some(Control::Error) => ERROR_CODE,
        _ => IDLE_CODE,
    }
}

/// Encodes one group of eight lanes.
pub fn encode_group(g: &CharGroup8) -> Result<Block66, EncodeError> {
    let lanes = g.0.map(|c| slot_of(&c));
    if lanes.iter().all(|&s| s == Slot::D) {
        let octets = g.0.map(|c| c.value());
        return Ok(Block66::new(SYNC_DATA, u64::from_le_bytes(octets)));
    }
    let format = FORMATS
        .iter()
        .find(|f| f.lanes == lanes)
        .ok_or(EncodeError)?;
    let mut payload = format.ty as u64;
    let mut offset = 8u32;
    for field in format.fields {
        let (value, width) = match *field {
            Field::Data(l) => (g.0[l as usize].value() as u64, 8),
            Field::Control(l) => (control_code(&g.0[l as usize]) as u64, 7),
            Field::OrderedSet(_) => (SEQUENCE_O_CODE as u64, 4),
            Field::Gap(n) => (0, n as u32),
        };
        payload |= value << offset;
        offset += width;
    }
    debug_assert_eq!(offset, 64);
    Ok(Block66::new(SYNC_CONTROL, payload))
}

/// Decodes one block. Covers every block format, including formats the
/// simulator's traffic never produces.
pub fn decode_block(b: &Block66) -> Result<CharGroup8, DecodeError> {
    match b.sync {
        SYNC_DATA => return Ok(CharGroup8::from_data(b.payload.to_le_bytes())),
        SYNC_CONTROL => {}
        other => return Err(DecodeError::InvalidHeader(other)),
    }
    let ty = b.payload as u8;
    let format = FORMATS
        .iter()
        .find(|f| f.ty == ty)
        .ok_or(DecodeError::InvalidType(ty))?;
    let mut chars = [TxChar::IDLE; 8];
    for (lane, slot) in format.lanes.iter().enumerate() {
        match slot {
            Slot::S => chars[lane] = TxChar::START,
            Slot::T => chars[lane] = TxChar::TERMINATE,
            _ => {}
        }
    }
    let mut offset = 8u32;
    for field in format.fields {
        match *field {
            Field::Data(l) => {
                chars[l as usize] = TxChar::data((b.payload >> offset) as u8);
                offset += 8;
            }
            Field::Control(l) => {
                let code = ((b.payload >> offset) & 0x7f) as u8;
                chars[l as usize] = match code {
                    IDLE_CODE => TxChar::IDLE,
                    ERROR_CODE => TxChar::ERROR,
                    _ => return Err(DecodeError::InvalidControlCode { lane: l, code }),
                };
                offset += 7;
            }
            Field::OrderedSet(l) => {
                let code = ((b.payload >> offset) & 0xf) as u8;
                if code != SEQUENCE_O_CODE {
                    return Err(DecodeError::InvalidOrderedSetCode { lane: l, code });
                }
                chars[l as usize] = TxChar::SEQUENCE;
                offset += 4;
            }
            Field::Gap(n) => offset += n as u32,
        }
    }
    Ok(CharGroup8(chars))
}

pub fn classify(b: &Block66) -> BlockType {
    match b.sync {
        SYNC_DATA => BlockType::Data,
        SYNC_CONTROL => BlockType::from_type_field(b.payload as u8).unwrap_or(BlockType::Unknown),
        _ => BlockType::Unknown,
    }
}

/// A 0x1e block of eight /I/ characters.
pub const fn make_idle_block() -> Block66 {
    Block66::new(SYNC_CONTROL, IDLE_PAYLOAD)
}

/// A 0x1e block of eight /E/ characters.
pub const fn make_error_block() -> Block66 {
    Block66::new(SYNC_CONTROL, ERROR_PAYLOAD)
}

/// A 0x55 block carrying two Cipher ON sequence ordered sets.
pub const fn make_cipher_on_block() -> Block66 {
    Block66::new(SYNC_CONTROL, CIPHER_ON_PAYLOAD)
}

/// A 0x55 block carrying two Cipher OFF sequence ordered sets.
pub const fn make_cipher_off_block() -> Block66 {
    Block66::new(SYNC_CONTROL, CIPHER_OFF_PAYLOAD)
}

/// The character group that encodes to a double ordered set with `code` in
/// lanes 3 and 7.
pub const fn ordered_set_group(code: u8) -> CharGroup8 {
    let z = TxChar::data(0);
    let c = TxChar::data(code);
    CharGroup8([TxChar::SEQUENCE, z, z, c, TxChar::SEQUENCE, z, z, c])
}

pub fn is_all_idle(b: &Block66) -> bool {
    *b == make_idle_block()
}

pub fn is_cipher_on(b: &Block66) -> bool {
    *b == make_cipher_on_block()
}

pub fn is_cipher_off(b: &Block66) -> bool {
    *b == make_cipher_off_block()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn group(spec: &str) -> CharGroup8 {
        // one token per lane: I, S, T, E, Q or a two-digit hex octet
        let mut chars = [TxChar::IDLE; 8];
        for (lane, tok) in spec.split_whitespace().enumerate() {
            chars[lane] = match tok {
                "I" => TxChar::IDLE,
                "S" => TxChar::START,
                "T" => TxChar::TERMINATE,
                "E" => TxChar::ERROR,
                "Q" => TxChar::SEQUENCE,
                hex => TxChar::data(u8::from_str_radix(hex, 16).unwrap()),
            };
        }
        CharGroup8(chars)
    }

    #[test]
    fn formats_cover_56_bits_and_the_right_lanes() {
        for f in FORMATS.iter() {
            let mut bits = 0u32;
            let mut covered = [false; 8];
            for field in f.fields {
                match *field {
                    Field::Data(l) => {
                        bits += 8;
                        assert_eq!(f.lanes[l as usize], Slot::D);
                        covered[l as usize] = true;
                    }
                    Field::Control(l) => {
                        bits += 7;
                        assert_eq!(f.lanes[l as usize], Slot::C);
                        covered[l as usize] = true;
                    }
                    Field::OrderedSet(l) => {
                        bits += 4;
                        assert_eq!(f.lanes[l as usize], Slot::O);
                        covered[l as usize] = true;
                    }
                    Field::Gap(n) => bits += n as u32,
                }
            }
            assert_eq!(bits, 56, "type {:#x}", f.ty);
            for (lane, (slot, cov)) in f.lanes.iter().zip(covered).enumerate() {
                let implicit = matches!(slot, Slot::S | Slot::T);
                assert_eq!(cov, !implicit, "type {:#x} lane {lane}", f.ty);
            }
        }
    }

    #[test]
    fn type_fields_are_distinct() {
        let mut seen = std::collections::HashSet::new();
        for ty in BlockType::CONTROL_TYPES {
            let bt = BlockType::from_type_field(ty).unwrap();
            assert!(seen.insert(bt));
            assert_eq!(bt.type_field(), Some(ty));
        }
        assert_eq!(seen.len(), 15);
        assert_eq!(BlockType::Data.type_field(), None);
        assert_eq!(BlockType::from_type_field(0x00), None);
    }

    #[test]
    fn data_group() {
        let b = encode_group(&CharGroup8::from_data([0, 1, 2, 3, 4, 5, 6, 7])).unwrap();
        assert_eq!(b, Block66::new(0b01, 0x0706_0504_0302_0100));
        assert_eq!(
            decode_block(&b).unwrap(),
            CharGroup8::from_data([0, 1, 2, 3, 4, 5, 6, 7])
        );
        assert_eq!(classify(&b), BlockType::Data);
    }

    #[test]
    fn idle_group() {
        let b = encode_group(&CharGroup8::idle()).unwrap();
        assert_eq!(b.sync, 0b10);
        assert_eq!(b.payload_bytes(), [0x1e, 0, 0, 0, 0, 0, 0, 0]);
        assert_eq!(b, make_idle_block());
        assert!(is_all_idle(&b));
        assert!(!is_cipher_on(&b));
        assert_eq!(
            decode_block(&make_idle_block()).unwrap(),
            CharGroup8::idle()
        );
    }

    #[test]
    fn start_lane0() {
        let b = encode_group(&group("S 11 22 33 44 55 66 77")).unwrap();
        assert_eq!(b.sync, 0b10);
        assert_eq!(
            b.payload_bytes(),
            [0x78, 0x11, 0x22, 0x33, 0x44, 0x55, 0x66, 0x77]
        );
        assert_eq!(classify(&b), BlockType::Start);
    }

    #[test]
    fn terminate_layouts() {
        // T in lane 3: D0 D1 D2, 4 blank bits, then four 7-bit idle codes
        let b = encode_group(&group("a1 a2 a3 T I I I I")).unwrap();
        assert_eq!(b.payload, 0x0000_0000_a3a2_a1b4);
        let b = encode_group(&group("T I I I I I I E")).unwrap();
        assert_eq!(b.payload, 0x87 | (0x1e << 57));
        let b = encode_group(&group("01 02 03 04 05 06 07 T")).unwrap();
        assert_eq!(b.payload_bytes(), [0xff, 1, 2, 3, 4, 5, 6, 7]);
        assert_eq!(classify(&b), BlockType::Terminate(7));
    }

    #[test]
    fn error_block_layout() {
        let b = make_error_block();
        assert_eq!(decode_block(&b).unwrap(), CharGroup8::error());
        assert_eq!(EncodeError.recovery(), b);
    }

    #[test]
    fn cipher_on_off_blocks() {
        let on = make_cipher_on_block();
        assert_eq!(on.sync, 0b10);
        assert_eq!(on.payload_bytes(), [0x55, 0, 0, 0x04, 0, 0, 0, 0x04]);
        assert_eq!(
            encode_group(&ordered_set_group(CIPHER_ON_CODE)).unwrap(),
            on
        );
        assert_eq!(
            decode_block(&on).unwrap(),
            ordered_set_group(CIPHER_ON_CODE)
        );

        let off = make_cipher_off_block();
        assert_eq!(off.payload_bytes(), [0x55, 0, 0, 0x05, 0, 0, 0, 0x05]);
        assert_eq!(
            encode_group(&ordered_set_group(CIPHER_OFF_CODE)).unwrap(),
            off
        );
        assert_eq!(on.payload ^ off.payload, 0x0100_0000_0100_0000);

        assert_eq!(classify(&on), BlockType::DoubleOrderedSet);
        assert!(is_cipher_on(&on) && !is_cipher_off(&on));
        assert!(is_cipher_off(&off) && !is_cipher_on(&off));
    }

    #[test]
    fn mixed_cipher_codes_match_neither() {
        let mixed = group("Q 00 00 04 Q 00 00 05");
        let b = encode_group(&mixed).unwrap();
        assert_eq!(classify(&b), BlockType::DoubleOrderedSet);
        assert!(!is_cipher_on(&b));
        assert!(!is_cipher_off(&b));
    }

    #[test]
    fn reserved_sequence_passes_as_ordered_set() {
        let g = group("Q 00 00 07 Q 12 34 56");
        let b = encode_group(&g).unwrap();
        assert_eq!(decode_block(&b).unwrap(), g);
    }

    #[test]
    fn illegal_headers_rejected() {
        for sync in [0b00, 0b11] {
            let err = decode_block(&Block66::new(sync, 0x0706_0504_0302_0100)).unwrap_err();
            assert_eq!(err, DecodeError::InvalidHeader(sync));
            assert_eq!(err.recovery(), CharGroup8::error());
            assert_eq!(classify(&Block66::new(sync, 0)), BlockType::Unknown);
        }
    }

    #[test]
    fn unknown_type_rejected() {
        let b = Block66::new(0b10, 0x42);
        assert_eq!(decode_block(&b), Err(DecodeError::InvalidType(0x42)));
        assert_eq!(classify(&b), BlockType::Unknown);
    }

    #[test]
    fn unsupported_codes_rejected() {
        // LPI control code 0x06 in lane 0
        let b = Block66::new(0b10, 0x1e | (0x06 << 8));
        assert_eq!(
            decode_block(&b),
            Err(DecodeError::InvalidControlCode {
                lane: 0,
                code: 0x06
            })
        );
        // signal ordered set (O code 0xf) in lane 0 of a 0x55 block
        let b = Block66::new(0b10, 0x55 | (0xf << 32));
        assert_eq!(
            decode_block(&b),
            Err(DecodeError::InvalidOrderedSetCode { lane: 0, code: 0xf })
        );
    }

    #[test]
    fn unencodable_patterns() {
        for spec in [
            "S S 00 00 00 00 00 00",
            "00 S 00 00 00 00 00 00",
            "T T I I I I I I",
            "Q 00 00 00 I I I 00",
        ] {
            assert_eq!(encode_group(&group(spec)), Err(EncodeError), "{spec}");
        }
        // start in lane 4 preceded by data is not a 64b/66b format
        assert!(encode_group(&group("00 00 00 00 S 00 00 00")).is_err());
    }

    #[test]
    fn every_row_round_trips() {
        for spec in [
            "I I E I I I I I",
            "I I I I Q 00 00 01",
            "I I I I S 01 02 03",
            "Q 00 00 02 S 01 02 03",
            "Q 00 00 04 Q 00 00 04",
            "S 01 02 03 04 05 06 07",
            "Q 00 00 03 I I I I",
            "T I I I I I I I",
            "01 T I I I I I I",
            "01 02 T I I I I I",
            "01 02 03 T I I I I",
            "01 02 03 04 T I I I",
            "01 02 03 04 05 T I I",
            "01 02 03 04 05 06 T I",
            "01 02 03 04 05 06 07 T",
        ] {
            let g = group(spec);
            let b = encode_group(&g).unwrap();
            assert_eq!(b.sync, 0b10);
            assert_eq!(decode_block(&b).unwrap(), g, "{spec}");
        }
    }
}
