use std::time::Instant;

use clight::ast::{FieldList, FloatSize, Ident, IntSize, Signedness, Type};
use clight::layout::{alignof, field_offset, sizeof};

use crate::{Verdict, Violations};

pub fn scalars() -> [Type; 6] {
    [
        Type::Int(IntSize::I8, Signedness::Signed),
        Type::Int(IntSize::I16, Signedness::Unsigned),
        Type::INT,
        Type::Float(FloatSize::F32),
        Type::Float(FloatSize::F64),
        Type::pointer(Type::INT),
    ]
}

/// All field lists of length at most `max` over `types`, fields named
/// `f0`, `f1`, ... in order.
pub fn field_lists(types: &[Type], max: usize) -> Vec<FieldList> {
    let mut all = vec![FieldList::new()];
    let mut frontier = vec![FieldList::new()];
    for len in 0..max {
        let mut next = Vec::new();
        for fl in &frontier {
            for t in types {
                let mut g = fl.clone();
                g.push((Ident::new(&format!("f{}", len)), t.clone()));
                next.push(g);
            }
        }
        all.extend(next.iter().cloned());
        frontier = next;
    }
    all
}

pub fn check() -> Verdict {
    let start = Instant::now();
    let lists = field_lists(&scalars(), 4);
    let mut v = Violations::default();
    let mut checks = 0usize;
    for fl in &lists {
        let st = Type::Struct("s".into(), fl.clone());
        let un = Type::Union("u".into(), fl.clone());
        let size = sizeof(&st);
        // positivity
        v.check(size >= 1 && sizeof(&un) >= 1, || format!("non-positive size for {:?}", fl));
        checks += 1;
        let ranges: Vec<(u64, u64)> = fl
            .iter()
            .map(|(id, t)| {
                let ofs = field_offset(id.as_str(), fl).unwrap_or(u64::MAX);
                (ofs, ofs.saturating_add(sizeof(t)))
            })
            .collect();
        for ((id, t), &(lo, hi)) in fl.iter().zip(&ranges) {
            // containment, and natural alignment of each field
            v.check(hi <= size, || format!("{} of {:?} not contained in {} bytes", id, fl, size));
            v.check(lo % alignof(t) == 0, || format!("{} of {:?} misaligned at {}", id, fl, lo));
            v.check(sizeof(t) <= sizeof(&un), || format!("{} does not fit union {:?}", id, fl));
            checks += 4;
        }
        // disjointness
        for i in 0..ranges.len() {
            for j in i + 1..ranges.len() {
                let (a, b) = (ranges[i], ranges[j]);
                v.check(a.1 <= b.0 || b.1 <= a.0, || format!("fields {} and {} overlap in {:?}", i, j, fl));
                checks += 1;
            }
        }
        // prefix stability: every prefix assigns the same offsets
        for k in 0..fl.len() {
            let prefix: FieldList = fl[..k].to_vec();
            for (id, _) in &prefix {
                v.check(field_offset(id.as_str(), &prefix) == field_offset(id.as_str(), fl), || {
                    format!("offset of {} differs between {:?} and its extension", id, prefix)
                });
                checks += 1;
            }
        }
        v.check(field_offset("absent", fl).is_none(), || "absent field has an offset".into());
    }
    let secs = start.elapsed().as_secs_f64();
    v.check(secs < 10.0, || format!("took {:.1}s, limit 10s", secs));
    v.verdict(format!("{} field lists, {} checks", lists.len(), checks))
}
