use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use super::DiffPolyError;

/// Whether a symbol is an x-dependent field or an x- and t-independent constant.
///
/// `Constant` sorts before `Field`, so constants lead every monomial.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SymbolKind {
    Constant,
    Field,
}

/// A named generator of the differential algebra.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol {
    kind: SymbolKind,
    name: Arc<str>,
}

impl Symbol {
    pub fn field(name: &str) -> Self {
        Symbol {
            kind: SymbolKind::Field,
            name: Arc::from(name),
        }
    }

    pub fn constant(name: &str) -> Self {
        Symbol {
            kind: SymbolKind::Constant,
            name: Arc::from(name),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> SymbolKind {
        self.kind
    }

    pub fn is_constant(&self) -> bool {
        self.kind == SymbolKind::Constant
    }

    pub fn is_field(&self) -> bool {
        self.kind == SymbolKind::Field
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// A symbol together with an x-derivative order, e.g. `V_xx` is `(V, 2)`.
///
/// Constants only ever appear with order 0.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var {
    pub symbol: Symbol,
    pub order: u32,
}

impl Var {
    pub fn new(symbol: Symbol, order: u32) -> Self {
        debug_assert!(symbol.is_field() || order == 0);
        Var { symbol, order }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol.name())?;
        if self.order > 0 {
            f.write_str("_")?;
            for _ in 0..self.order {
                f.write_str("x")?;
            }
        }
        Ok(())
    }
}

/// Registry of the symbols of one algebra instance; keeps names unique.
#[derive(Clone, Debug, Default)]
pub struct SymbolTable {
    symbols: BTreeMap<String, Symbol>,
}

impl SymbolTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Table where every listed name is a constant; any other name parses as a field.
    pub fn with_constants<'a>(names: impl IntoIterator<Item = &'a str>) -> Self {
        let mut table = Self::new();
        for name in names {
            // fresh table, names can only collide with themselves
            let _ = table.declare(Symbol::constant(name));
        }
        table
    }

    pub fn declare(&mut self, symbol: Symbol) -> Result<Symbol, DiffPolyError> {
        match self.symbols.get(symbol.name()) {
            Some(existing) if existing.kind() != symbol.kind() => {
                Err(DiffPolyError::SymbolConflict(symbol.name().to_string()))
            }
            Some(existing) => Ok(existing.clone()),
            None => {
                self.symbols
                    .insert(symbol.name().to_string(), symbol.clone());
                Ok(symbol)
            }
        }
    }

    /// Look a name up, declaring it as a field when unknown.
    pub fn resolve(&mut self, name: &str) -> Symbol {
        self.symbols
            .entry(name.to_string())
            .or_insert_with(|| Symbol::field(name))
            .clone()
    }

    pub fn get(&self, name: &str) -> Option<&Symbol> {
        self.symbols.get(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Symbol> {
        self.symbols.values()
    }
}
