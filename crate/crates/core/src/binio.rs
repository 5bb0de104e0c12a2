//! Little-endian binary encoding helpers shared by the snapshot and model
//! artifacts. Every artifact starts with a 4-byte magic and a u32 version.

use std::io::{Read, Write};

use crate::error::{Error, Result};

pub(crate) struct BinWriter<W: Write> {
    inner: W,
    path: String,
}

impl<W: Write> BinWriter<W> {
    pub fn new(inner: W, path: &str) -> Self {
        BinWriter {
            inner,
            path: path.to_string(),
        }
    }

    fn put(&mut self, bytes: &[u8]) -> Result<()> {
        self.inner
            .write_all(bytes)
            .map_err(|e| Error::io(self.path.clone(), e))
    }

    pub fn magic(&mut self, magic: &[u8; 4], version: u32) -> Result<()> {
        self.put(magic)?;
        self.u32(version)
    }

    pub fn u8(&mut self, v: u8) -> Result<()> {
        self.put(&[v])
    }

    pub fn u32(&mut self, v: u32) -> Result<()> {
        self.put(&v.to_le_bytes())
    }

    pub fn u64(&mut self, v: u64) -> Result<()> {
        self.put(&v.to_le_bytes())
    }

    pub fn i32(&mut self, v: i32) -> Result<()> {
        self.put(&v.to_le_bytes())
    }

    pub fn f32(&mut self, v: f32) -> Result<()> {
        self.put(&v.to_le_bytes())
    }

    pub fn f64(&mut self, v: f64) -> Result<()> {
        self.put(&v.to_le_bytes())
    }

    pub fn str(&mut self, s: &str) -> Result<()> {
        self.u32(s.len() as u32)?;
        self.put(s.as_bytes())
    }

    pub fn opt_str(&mut self, s: Option<&str>) -> Result<()> {
        match s {
            Some(s) => {
                self.u8(1)?;
                self.str(s)
            }
            None => self.u8(0),
        }
    }

    pub fn u32_slice(&mut self, v: &[u32]) -> Result<()> {
        self.u32(v.len() as u32)?;
        for &x in v {
            self.u32(x)?;
        }
        Ok(())
    }

    pub fn f64_slice(&mut self, v: &[f64]) -> Result<()> {
        self.u32(v.len() as u32)?;
        for &x in v {
            self.f64(x)?;
        }
        Ok(())
    }
}

pub(crate) struct BinReader<R: Read> {
    inner: R,
    kind: &'static str,
}

impl<R: Read> BinReader<R> {
    pub fn new(inner: R, kind: &'static str) -> Self {
        BinReader { inner, kind }
    }

    fn corrupt(&self, detail: impl Into<String>) -> Error {
        Error::Artifact {
            kind: self.kind,
            detail: detail.into(),
        }
    }

    fn take<const N: usize>(&mut self) -> Result<[u8; N]> {
        let mut buf = [0u8; N];
        self.inner
            .read_exact(&mut buf)
            .map_err(|e| self.corrupt(format!("unexpected end of data: {e}")))?;
        Ok(buf)
    }

    /// Validates magic bytes and returns the stored version.
    pub fn magic(&mut self, magic: &[u8; 4]) -> Result<u32> {
        let got: [u8; 4] = self.take()?;
        if &got != magic {
            return Err(self.corrupt("bad magic bytes"));
        }
        self.u32()
    }

    pub fn expect_version(&mut self, magic: &[u8; 4], expected: u32) -> Result<()> {
        let found = self.magic(magic)?;
        if found != expected {
            return Err(Error::SnapshotVersion { found, expected });
        }
        Ok(())
    }

    pub fn u8(&mut self) -> Result<u8> {
        Ok(self.take::<1>()?[0])
    }

    pub fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take()?))
    }

    pub fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take()?))
    }

    pub fn i32(&mut self) -> Result<i32> {
        Ok(i32::from_le_bytes(self.take()?))
    }

    pub fn f32(&mut self) -> Result<f32> {
        Ok(f32::from_le_bytes(self.take()?))
    }

    pub fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take()?))
    }

    pub fn str(&mut self) -> Result<String> {
        let len = self.u32()? as usize;
        if len > 1 << 30 {
            return Err(self.corrupt("string length out of bounds"));
        }
        let mut buf = vec![0u8; len];
        self.inner
            .read_exact(&mut buf)
            .map_err(|e| self.corrupt(format!("short string: {e}")))?;
        String::from_utf8(buf).map_err(|_| self.corrupt("invalid utf8"))
    }

    pub fn opt_str(&mut self) -> Result<Option<String>> {
        match self.u8()? {
            0 => Ok(None),
            1 => Ok(Some(self.str()?)),
            _ => Err(self.corrupt("bad option tag")),
        }
    }

    pub fn u32_vec(&mut self) -> Result<Vec<u32>> {
        let len = self.u32()? as usize;
        if len > 1 << 30 {
            return Err(self.corrupt("vector length out of bounds"));
        }
        let mut v = Vec::with_capacity(len);
        for _ in 0..len {
            v.push(self.u32()?);
        }
        Ok(v)
    }

    pub fn f64_vec(&mut self) -> Result<Vec<f64>> {
        let len = self.u32()? as usize;
        if len > 1 << 30 {
            return Err(self.corrupt("vector length out of bounds"));
        }
        let mut v = Vec::with_capacity(len);
        for _ in 0..len {
            v.push(self.f64()?);
        }
        Ok(v)
    }
}
