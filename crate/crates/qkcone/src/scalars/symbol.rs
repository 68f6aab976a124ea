//! Interned parameter symbols: q, μ, a, b, equivariant characters and formal names.

use std::collections::HashMap;
use std::fmt;
use std::sync::{OnceLock, RwLock};

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sym(pub u16);

struct Table {
    names: Vec<String>,
    index: HashMap<String, u16>,
}

fn table() -> &'static RwLock<Table> {
    static T: OnceLock<RwLock<Table>> = OnceLock::new();
    T.get_or_init(|| {
        let mut t = Table { names: Vec::new(), index: HashMap::new() };
        for n in ["q", "mu", "a", "b"] {
            let id = t.names.len() as u16;
            t.names.push(n.to_string());
            t.index.insert(n.to_string(), id);
        }
        RwLock::new(t)
    })
}

impl Sym {
    pub const Q: Sym = Sym(0);
    pub const MU: Sym = Sym(1);
    pub const A: Sym = Sym(2);
    pub const B: Sym = Sym(3);

    pub fn named(name: &str) -> Sym {
        if let Some(&id) = table().read().unwrap().index.get(name) {
            return Sym(id);
        }
        let mut t = table().write().unwrap();
        if let Some(&id) = t.index.get(name) {
            return Sym(id);
        }
        let id = t.names.len() as u16;
        t.names.push(name.to_string());
        t.index.insert(name.to_string(), id);
        Sym(id)
    }

    pub fn name(self) -> String {
        table().read().unwrap().names[self.0 as usize].clone()
    }
}

impl fmt::Debug for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

impl fmt::Display for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_ids_are_stable() {
        assert_eq!(Sym::named("q"), Sym::Q);
        assert_eq!(Sym::named("mu"), Sym::MU);
        let t = Sym::named("t_symbol_test");
        assert_eq!(Sym::named("t_symbol_test"), t);
        assert_eq!(t.name(), "t_symbol_test");
    }
}
