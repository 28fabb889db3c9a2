//! Native binary containers.
//!
//! Every container starts with the same 16-byte little-endian header:
//! magic (4 bytes), version `u8`, tag `u8`, `n_x` `u32`, `n_y` `u32` and
//! `B` `u16`. Masks, measurements and signals follow it with raw `f64`
//! values in pixel-major, frame-minor order. Measurements store `B = 1`.
//! The tag is the mask distribution for `SCSM` and the normalized flag for
//! `SCSX`.

use std::fs;
use std::path::Path;

use crate::codecs::{NlsCode, NlsGroup, NlsParams};
use crate::error::{Result, ScsError};
use crate::sensing::{MaskDistribution, MaskStack, Measurement};
use crate::signal::MultiFrameSignal;

pub const HEADER_LEN: usize = 16;
pub const VERSION: u8 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContainerKind {
    Masks,
    Measurement,
    Signal,
    NlsCode,
}

impl ContainerKind {
    pub fn magic(self) -> &'static [u8; 4] {
        match self {
            ContainerKind::Masks => b"SCSM",
            ContainerKind::Measurement => b"SCSY",
            ContainerKind::Signal => b"SCSX",
            ContainerKind::NlsCode => b"SCSC",
        }
    }

    pub fn from_magic(m: &[u8]) -> Option<Self> {
        [
            ContainerKind::Masks,
            ContainerKind::Measurement,
            ContainerKind::Signal,
            ContainerKind::NlsCode,
        ]
        .into_iter()
        .find(|k| k.magic().as_slice() == m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Header {
    pub kind: ContainerKind,
    pub version: u8,
    pub tag: u8,
    pub nx: usize,
    pub ny: usize,
    pub frames: usize,
}

impl Header {
    fn encode(&self, out: &mut Vec<u8>) -> Result<()> {
        let nx = u32::try_from(self.nx).map_err(|_| ScsError::Format(format!("n_x = {} overflows u32", self.nx)))?;
        let ny = u32::try_from(self.ny).map_err(|_| ScsError::Format(format!("n_y = {} overflows u32", self.ny)))?;
        let b = u16::try_from(self.frames)
            .map_err(|_| ScsError::Format(format!("B = {} overflows u16", self.frames)))?;
        out.extend_from_slice(self.kind.magic());
        out.push(self.version);
        out.push(self.tag);
        out.extend_from_slice(&nx.to_le_bytes());
        out.extend_from_slice(&ny.to_le_bytes());
        out.extend_from_slice(&b.to_le_bytes());
        Ok(())
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER_LEN {
            return Err(ScsError::Format(format!(
                "container shorter than its {HEADER_LEN}-byte header"
            )));
        }
        let kind = ContainerKind::from_magic(&bytes[..4]).ok_or_else(|| {
            ScsError::Format(format!("unknown container magic {:?}", String::from_utf8_lossy(&bytes[..4])))
        })?;
        let version = bytes[4];
        if version != VERSION {
            return Err(ScsError::Format(format!("unsupported container version {version}")));
        }
        Ok(Header {
            kind,
            version,
            tag: bytes[5],
            nx: u32::from_le_bytes(bytes[6..10].try_into().expect("4 bytes")) as usize,
            ny: u32::from_le_bytes(bytes[10..14].try_into().expect("4 bytes")) as usize,
            frames: u16::from_le_bytes(bytes[14..16].try_into().expect("2 bytes")) as usize,
        })
    }
}

fn encode_values(header: Header, values: &[f64]) -> Result<Vec<u8>> {
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * values.len());
    header.encode(&mut out)?;
    for v in values {
        out.extend_from_slice(&v.to_le_bytes());
    }
    Ok(out)
}

fn decode_values(bytes: &[u8], expect: ContainerKind) -> Result<(Header, Vec<f64>)> {
    let h = Header::decode(bytes)?;
    if h.kind != expect {
        return Err(ScsError::Format(format!(
            "expected a {} container, found {}",
            String::from_utf8_lossy(expect.magic()),
            String::from_utf8_lossy(h.kind.magic())
        )));
    }
    let count = h.nx * h.ny * h.frames;
    let payload = &bytes[HEADER_LEN..];
    if payload.len() != 8 * count {
        return Err(ScsError::Format(format!(
            "payload holds {} bytes, header implies {}",
            payload.len(),
            8 * count
        )));
    }
    let values = payload
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    Ok((h, values))
}

pub fn encode_masks(m: &MaskStack) -> Result<Vec<u8>> {
    let h = Header {
        kind: ContainerKind::Masks,
        version: VERSION,
        tag: m.distribution().tag(),
        nx: m.nx(),
        ny: m.ny(),
        frames: m.frames(),
    };
    encode_values(h, m.diag())
}

pub fn decode_masks(bytes: &[u8]) -> Result<MaskStack> {
    let (h, values) = decode_values(bytes, ContainerKind::Masks)?;
    let dist = MaskDistribution::from_tag(h.tag)
        .ok_or_else(|| ScsError::Format(format!("unknown mask distribution tag {}", h.tag)))?;
    MaskStack::from_diag(h.nx, h.ny, h.frames, values, dist)
}

pub fn encode_measurement(y: &Measurement) -> Result<Vec<u8>> {
    let h = Header {
        kind: ContainerKind::Measurement,
        version: VERSION,
        tag: 0,
        nx: y.nx(),
        ny: y.ny(),
        frames: 1,
    };
    encode_values(h, y.data())
}

pub fn decode_measurement(bytes: &[u8]) -> Result<Measurement> {
    let (h, values) = decode_values(bytes, ContainerKind::Measurement)?;
    if h.frames != 1 {
        return Err(ScsError::Format(format!("measurement container with B = {}", h.frames)));
    }
    Measurement::new(h.nx, h.ny, values)
}

pub fn encode_signal(x: &MultiFrameSignal) -> Result<Vec<u8>> {
    let h = Header {
        kind: ContainerKind::Signal,
        version: VERSION,
        tag: u8::from(x.is_normalized()),
        nx: x.nx(),
        ny: x.ny(),
        frames: x.frames(),
    };
    encode_values(h, x.data())
}

pub fn decode_signal(bytes: &[u8]) -> Result<MultiFrameSignal> {
    let (h, values) = decode_values(bytes, ContainerKind::Signal)?;
    let x = MultiFrameSignal::new(h.nx, h.ny, h.frames, values)?;
    match h.tag {
        0 => Ok(x),
        1 => x.into_normalized(),
        t => Err(ScsError::Format(format!("unknown signal tag {t}"))),
    }
}

// NLS code layout after the header: block_w, block_h, stride, group_size,
// search_window, keep_per_group (u32::MAX for the default) and Q, all u32;
// then per group the member count, member (x, y) pairs, coefficient count
// and (u32 index, f64 value) pairs.
const KEEP_DEFAULT: u32 = u32::MAX;

fn to_u32(v: usize, what: &str) -> Result<u32> {
    u32::try_from(v).map_err(|_| ScsError::Format(format!("{what} = {v} overflows u32")))
}

pub fn encode_nls_code(code: &NlsCode) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    Header {
        kind: ContainerKind::NlsCode,
        version: VERSION,
        tag: 0,
        nx: code.nx,
        ny: code.ny,
        frames: code.frames,
    }
    .encode(&mut out)?;
    let p = &code.params;
    let keep = match p.keep_per_group {
        Some(k) => to_u32(k, "keep_per_group")?,
        None => KEEP_DEFAULT,
    };
    for v in [
        to_u32(p.block_w, "block_w")?,
        to_u32(p.block_h, "block_h")?,
        to_u32(p.stride, "stride")?,
        to_u32(p.group_size, "group_size")?,
        to_u32(p.search_window, "search_window")?,
        keep,
        to_u32(code.groups.len(), "group count")?,
    ] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    for g in &code.groups {
        out.extend_from_slice(&to_u32(g.members.len(), "member count")?.to_le_bytes());
        for &(x, y) in &g.members {
            out.extend_from_slice(&x.to_le_bytes());
            out.extend_from_slice(&y.to_le_bytes());
        }
        out.extend_from_slice(&to_u32(g.coeffs.len(), "coefficient count")?.to_le_bytes());
        for &(i, v) in &g.coeffs {
            out.extend_from_slice(&i.to_le_bytes());
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    Ok(out)
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn take<const N: usize>(&mut self) -> Result<[u8; N]> {
        let end = self.pos + N;
        let s = self
            .bytes
            .get(self.pos..end)
            .ok_or_else(|| ScsError::Format("truncated NLS code".into()))?;
        self.pos = end;
        Ok(s.try_into().expect("length checked"))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take()?))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take()?))
    }
}

pub fn decode_nls_code(bytes: &[u8]) -> Result<NlsCode> {
    let h = Header::decode(bytes)?;
    if h.kind != ContainerKind::NlsCode {
        return Err(ScsError::Format("expected an SCSC container".into()));
    }
    let mut c = Cursor {
        bytes,
        pos: HEADER_LEN,
    };
    let mut next = || c.u32().map(|v| v as usize);
    let (block_w, block_h, stride, group_size, search_window) = (next()?, next()?, next()?, next()?, next()?);
    let keep = c.u32()?;
    let q = c.u32()? as usize;
    let params = NlsParams {
        block_w,
        block_h,
        stride,
        group_size,
        search_window,
        keep_per_group: (keep != KEEP_DEFAULT).then_some(keep as usize),
    };
    let mut groups = Vec::with_capacity(q.min(1 << 20));
    for _ in 0..q {
        let m = c.u32()? as usize;
        let mut members = Vec::with_capacity(m.min(1 << 16));
        for _ in 0..m {
            members.push((c.u32()?, c.u32()?));
        }
        let k = c.u32()? as usize;
        let mut coeffs = Vec::with_capacity(k.min(1 << 20));
        for _ in 0..k {
            coeffs.push((c.u32()?, c.f64()?));
        }
        groups.push(NlsGroup { members, coeffs });
    }
    if c.pos != bytes.len() {
        return Err(ScsError::Format(format!(
            "{} trailing bytes after NLS code",
            bytes.len() - c.pos
        )));
    }
    Ok(NlsCode {
        nx: h.nx,
        ny: h.ny,
        frames: h.frames,
        params,
        groups,
    })
}

pub(crate) fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| ScsError::io(path, e))
}

pub(crate) fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| ScsError::io(path, e))
}

pub fn save_masks(path: impl AsRef<Path>, m: &MaskStack) -> Result<()> {
    write_bytes(path.as_ref(), &encode_masks(m)?)
}

pub fn load_masks(path: impl AsRef<Path>) -> Result<MaskStack> {
    decode_masks(&read_bytes(path.as_ref())?)
}

pub fn save_measurement(path: impl AsRef<Path>, y: &Measurement) -> Result<()> {
    write_bytes(path.as_ref(), &encode_measurement(y)?)
}

pub fn load_measurement(path: impl AsRef<Path>) -> Result<Measurement> {
    decode_measurement(&read_bytes(path.as_ref())?)
}

pub fn save_signal(path: impl AsRef<Path>, x: &MultiFrameSignal) -> Result<()> {
    write_bytes(path.as_ref(), &encode_signal(x)?)
}

pub fn load_signal(path: impl AsRef<Path>) -> Result<MultiFrameSignal> {
    decode_signal(&read_bytes(path.as_ref())?)
}

pub fn save_nls_code(path: impl AsRef<Path>, code: &NlsCode) -> Result<()> {
    write_bytes(path.as_ref(), &encode_nls_code(code)?)
}

pub fn load_nls_code(path: impl AsRef<Path>) -> Result<NlsCode> {
    decode_nls_code(&read_bytes(path.as_ref())?)
}
