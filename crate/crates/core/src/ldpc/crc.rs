/// CRC generator polynomials of 38.212.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CrcKind {
    /// Transport-block CRC for payloads above 3824 bits.
    Crc24A,
    /// Per-code-block CRC.
    Crc24B,
    /// Transport-block CRC for small payloads.
    Crc16,
}

impl CrcKind {
    pub fn parity_len(self) -> usize {
        match self {
            CrcKind::Crc24A | CrcKind::Crc24B => 24,
            CrcKind::Crc16 => 16,
        }
    }

    /// Generator without its leading term.
    fn poly(self) -> u32 {
        match self {
            // D^24+D^23+D^18+D^17+D^14+D^11+D^10+D^7+D^6+D^5+D^4+D^3+D+1
            CrcKind::Crc24A => 0x86_4CFB,
            // D^24+D^23+D^6+D^5+D+1
            CrcKind::Crc24B => 0x80_0063,
            // D^16+D^12+D^5+1
            CrcKind::Crc16 => 0x1021,
        }
    }
}

/// Parity bits of `bits` (one bit per byte), first parity bit = highest power.
pub fn crc_parity(bits: &[u8], kind: CrcKind) -> Vec<u8> {
    let len = kind.parity_len();
    let top = 1u32 << (len - 1);
    let mask = (1u32 << len) - 1;
    let poly = kind.poly();
    let mut reg = 0u32;
    for &b in bits {
        let feedback = ((reg & top) != 0) ^ (b & 1 == 1);
        reg = (reg << 1) & mask;
        if feedback {
            reg ^= poly;
        }
    }
    (0..len).rev().map(|i| ((reg >> i) & 1) as u8).collect()
}

pub fn crc_attach(bits: &[u8], kind: CrcKind) -> Vec<u8> {
    let mut out = Vec::with_capacity(bits.len() + kind.parity_len());
    out.extend_from_slice(bits);
    out.extend(crc_parity(bits, kind));
    out
}

/// True when `bits` (payload followed by its CRC) has a zero remainder.
pub fn crc_check(bits: &[u8], kind: CrcKind) -> bool {
    if bits.len() < kind.parity_len() {
        return false;
    }
    let (payload, parity) = bits.split_at(bits.len() - kind.parity_len());
    crc_parity(payload, kind) == parity
}
