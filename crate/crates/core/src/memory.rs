//! Block-based memory model.
//!
//! Memory is a set of blocks, each with fixed bounds `[lo, hi)` and contents
//! mapping byte offsets to cells. A cell remembers the chunk it was written
//! with; only a load of the same size and class (int or float) recovers the
//! value, anything else reads as `Undef`. Block identifiers are never reused.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::ast::Type;
use crate::layout::{access_mode, AccessMode, Chunk};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BlockId(pub u64);

impl fmt::Display for BlockId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// A run-time value. Floats are 64-bit; pointer offsets are 32-bit.
#[derive(Clone, Copy, Debug)]
pub enum Value {
    Int(i32),
    Float(f64),
    Ptr(BlockId, i32),
    Undef,
}

// Floats compare by bit pattern so that values (and memories) have a
// reflexive equality.
impl PartialEq for Value {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Value::Int(a), Value::Int(b)) => a == b,
            (Value::Float(a), Value::Float(b)) => a.to_bits() == b.to_bits(),
            (Value::Ptr(b1, o1), Value::Ptr(b2, o2)) => b1 == b2 && o1 == o2,
            (Value::Undef, Value::Undef) => true,
            _ => false,
        }
    }
}

impl Eq for Value {}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(n) => write!(f, "int({})", n),
            Value::Float(x) => write!(f, "float({:?})", x),
            Value::Ptr(b, o) => write!(f, "ptr({}, {})", b, o),
            Value::Undef => f.write_str("undef"),
        }
    }
}

/// A memory location: block and byte offset.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Loc {
    pub block: BlockId,
    pub ofs: i32,
}

impl Loc {
    pub fn new(block: BlockId, ofs: i32) -> Self {
        Loc { block, ofs }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Error)]
pub enum MemError {
    #[error("block {0} does not exist")]
    UnknownBlock(BlockId),
    #[error("block {0} has been freed")]
    Freed(BlockId),
    #[error("access of {size} bytes at offset {ofs} is outside the bounds of block {block}")]
    OutOfBounds { block: BlockId, ofs: i64, size: u32 },
    #[error("misaligned access of {size} bytes at offset {ofs} in block {block}")]
    Misaligned { block: BlockId, ofs: i64, size: u32 },
    #[error("values of this type cannot be accessed in memory")]
    NoAccess,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Cell {
    chunk: Chunk,
    value: Value,
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Block {
    valid: bool,
    lo: i64,
    hi: i64,
    cells: BTreeMap<i64, Cell>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mem {
    next: u64,
    blocks: BTreeMap<BlockId, Block>,
}

impl Default for Mem {
    fn default() -> Self {
        Mem::new()
    }
}

/// Truncates and extends `v` as a store with `chunk` would.
pub fn normalize(chunk: Chunk, v: Value) -> Value {
    match (chunk, v) {
        (Chunk::Int8Signed, Value::Int(n)) => Value::Int(n as i8 as i32),
        (Chunk::Int8Unsigned, Value::Int(n)) => Value::Int(n as u8 as i32),
        (Chunk::Int16Signed, Value::Int(n)) => Value::Int(n as i16 as i32),
        (Chunk::Int16Unsigned, Value::Int(n)) => Value::Int(n as u16 as i32),
        (Chunk::Int32, v @ (Value::Int(_) | Value::Ptr(..))) => v,
        (Chunk::Float32, Value::Float(f)) => Value::Float(f as f32 as f64),
        (Chunk::Float64, v @ Value::Float(_)) => v,
        _ => Value::Undef,
    }
}

impl Mem {
    pub fn new() -> Self {
        Mem {
            next: 1,
            blocks: BTreeMap::new(),
        }
    }

    /// Allocates a fresh block with bounds `[lo, hi)`, initially all `Undef`.
    pub fn alloc(&mut self, lo: i64, hi: i64) -> BlockId {
        let b = BlockId(self.next);
        self.next += 1;
        self.blocks.insert(
            b,
            Block {
                valid: true,
                lo,
                hi,
                cells: BTreeMap::new(),
            },
        );
        b
    }

    pub fn free(&mut self, b: BlockId) -> Result<(), MemError> {
        let blk = self.blocks.get_mut(&b).ok_or(MemError::UnknownBlock(b))?;
        if !blk.valid {
            return Err(MemError::Freed(b));
        }
        blk.valid = false;
        blk.cells.clear();
        Ok(())
    }

    pub fn is_valid(&self, b: BlockId) -> bool {
        self.blocks.get(&b).is_some_and(|blk| blk.valid)
    }

    pub fn bounds(&self, b: BlockId) -> Option<(i64, i64)> {
        self.blocks.get(&b).map(|blk| (blk.lo, blk.hi))
    }

    /// The identifier the next allocation will return.
    pub fn next_block(&self) -> BlockId {
        BlockId(self.next)
    }

    fn check(&self, chunk: Chunk, b: BlockId, ofs: i64) -> Result<&Block, MemError> {
        let blk = self.blocks.get(&b).ok_or(MemError::UnknownBlock(b))?;
        if !blk.valid {
            return Err(MemError::Freed(b));
        }
        let size = chunk.size();
        if ofs < blk.lo || ofs + i64::from(size) > blk.hi {
            return Err(MemError::OutOfBounds { block: b, ofs, size });
        }
        if ofs.rem_euclid(i64::from(chunk.align())) != 0 {
            return Err(MemError::Misaligned { block: b, ofs, size });
        }
        Ok(blk)
    }

    pub fn load(&self, chunk: Chunk, b: BlockId, ofs: i64) -> Result<Value, MemError> {
        let blk = self.check(chunk, b, ofs)?;
        Ok(match blk.cells.get(&ofs) {
            Some(cell)
                if cell.chunk.size() == chunk.size()
                    && cell.chunk.is_float() == chunk.is_float() =>
            {
                normalize(chunk, cell.value)
            }
            _ => Value::Undef,
        })
    }

    /// Stores `v` with `chunk`. Cells overlapping the written range are
    /// dropped. On error the memory is unchanged.
    pub fn store(&mut self, chunk: Chunk, b: BlockId, ofs: i64, v: Value) -> Result<(), MemError> {
        self.check(chunk, b, ofs)?;
        let blk = self.blocks.get_mut(&b).expect("checked above");
        let end = ofs + i64::from(chunk.size());
        // cells are at most 8 bytes long
        let overlapping: Vec<i64> = blk
            .cells
            .range(ofs - 7..end)
            .filter(|(&start, c)| start + i64::from(c.chunk.size()) > ofs)
            .map(|(&start, _)| start)
            .collect();
        for start in overlapping {
            blk.cells.remove(&start);
        }
        blk.cells.insert(
            ofs,
            Cell {
                chunk,
                value: normalize(chunk, v),
            },
        );
        Ok(())
    }

    /// Reads a value of type `ty` at `loc`: by-value types load a chunk,
    /// by-reference types yield the location itself as a pointer.
    pub fn loadval(&self, ty: &Type, loc: Loc) -> Result<Value, MemError> {
        match access_mode(ty) {
            AccessMode::ByValue(chunk) => self.load(chunk, loc.block, i64::from(loc.ofs)),
            AccessMode::ByReference => Ok(Value::Ptr(loc.block, loc.ofs)),
            AccessMode::ByNothing => Err(MemError::NoAccess),
        }
    }

    /// Writes `v` at `loc` as type `ty`; only by-value types can be written.
    pub fn storeval(&mut self, ty: &Type, loc: Loc, v: Value) -> Result<(), MemError> {
        match access_mode(ty) {
            AccessMode::ByValue(chunk) => self.store(chunk, loc.block, i64::from(loc.ofs), v),
            _ => Err(MemError::NoAccess),
        }
    }
}
