//! Storage sizes, alignments, field offsets and access modes.
//!
//! Scalars are naturally aligned (alignment equals size). Struct fields are
//! laid out in list order, each rounded up to its own alignment, and the
//! struct is tail-padded to the largest field alignment. All union fields sit
//! at offset 0.

use crate::ast::{FieldList, FloatSize, IntSize, Signedness, Type};

/// A memory access quantity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Chunk {
    Int8Signed,
    Int8Unsigned,
    Int16Signed,
    Int16Unsigned,
    Int32,
    Float32,
    Float64,
}

impl Chunk {
    pub const ALL: [Chunk; 7] = [
        Chunk::Int8Signed,
        Chunk::Int8Unsigned,
        Chunk::Int16Signed,
        Chunk::Int16Unsigned,
        Chunk::Int32,
        Chunk::Float32,
        Chunk::Float64,
    ];

    pub fn size(self) -> u32 {
        match self {
            Chunk::Int8Signed | Chunk::Int8Unsigned => 1,
            Chunk::Int16Signed | Chunk::Int16Unsigned => 2,
            Chunk::Int32 | Chunk::Float32 => 4,
            Chunk::Float64 => 8,
        }
    }

    pub fn align(self) -> u32 {
        self.size()
    }

    pub fn is_float(self) -> bool {
        matches!(self, Chunk::Float32 | Chunk::Float64)
    }

    pub fn name(self) -> &'static str {
        match self {
            Chunk::Int8Signed => "int8signed",
            Chunk::Int8Unsigned => "int8unsigned",
            Chunk::Int16Signed => "int16signed",
            Chunk::Int16Unsigned => "int16unsigned",
            Chunk::Int32 => "int32",
            Chunk::Float32 => "float32",
            Chunk::Float64 => "float64",
        }
    }

    pub fn from_name(s: &str) -> Option<Chunk> {
        Chunk::ALL.into_iter().find(|c| c.name() == s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AccessMode {
    ByValue(Chunk),
    ByReference,
    ByNothing,
}

pub fn access_mode(t: &Type) -> AccessMode {
    use Signedness::*;
    match t {
        Type::Int(IntSize::I8, Signed) => AccessMode::ByValue(Chunk::Int8Signed),
        Type::Int(IntSize::I8, Unsigned) => AccessMode::ByValue(Chunk::Int8Unsigned),
        Type::Int(IntSize::I16, Signed) => AccessMode::ByValue(Chunk::Int16Signed),
        Type::Int(IntSize::I16, Unsigned) => AccessMode::ByValue(Chunk::Int16Unsigned),
        Type::Int(IntSize::I32, _) => AccessMode::ByValue(Chunk::Int32),
        Type::Float(FloatSize::F32) => AccessMode::ByValue(Chunk::Float32),
        Type::Float(FloatSize::F64) => AccessMode::ByValue(Chunk::Float64),
        Type::Pointer(_) | Type::CompPointer(_) => AccessMode::ByValue(Chunk::Int32),
        Type::Array(..) | Type::Function(..) => AccessMode::ByReference,
        Type::Struct(..) | Type::Union(..) | Type::Void => AccessMode::ByNothing,
    }
}

/// Storage size in bytes; always at least 1.
pub fn sizeof(t: &Type) -> u64 {
    match t {
        Type::Void | Type::Function(..) => 1,
        Type::Int(IntSize::I8, _) => 1,
        Type::Int(IntSize::I16, _) => 2,
        Type::Int(IntSize::I32, _) => 4,
        Type::Float(FloatSize::F32) => 4,
        Type::Float(FloatSize::F64) => 8,
        Type::Pointer(_) | Type::CompPointer(_) => 4,
        Type::Array(e, n) => sizeof(e).saturating_mul(u64::from(*n).max(1)),
        Type::Struct(_, fl) => {
            let end = fl
                .iter()
                .fold(0u64, |ofs, (_, ft)| align_up(ofs, alignof(ft)) + sizeof(ft));
            align_up(end.max(1), alignof(t))
        }
        Type::Union(_, fl) => {
            let max = fl.iter().map(|(_, ft)| sizeof(ft)).max().unwrap_or(1);
            align_up(max.max(1), alignof(t))
        }
    }
}

pub fn alignof(t: &Type) -> u64 {
    match t {
        Type::Void | Type::Function(..) => 1,
        Type::Array(e, _) => alignof(e),
        Type::Struct(_, fl) | Type::Union(_, fl) => {
            fl.iter().map(|(_, ft)| alignof(ft)).max().unwrap_or(1)
        }
        scalar => sizeof(scalar),
    }
}

/// Byte offset of field `id` in a struct with fields `fl`, or `None` if no
/// such field exists.
pub fn field_offset(id: &str, fl: &FieldList) -> Option<u64> {
    let mut ofs = 0u64;
    for (name, ft) in fl {
        ofs = align_up(ofs, alignof(ft));
        if name.as_str() == id {
            return Some(ofs);
        }
        ofs += sizeof(ft);
    }
    None
}

/// The type of field `id` in `fl`, if present.
pub fn field_type<'a>(id: &str, fl: &'a FieldList) -> Option<&'a Type> {
    fl.iter().find(|(n, _)| n.as_str() == id).map(|(_, t)| t)
}

fn align_up(n: u64, a: u64) -> u64 {
    n.div_ceil(a) * a
}
