use std::fmt;

/// Arbitrary functions of `x` that may appear in generators.
pub const ARB_FUNCS: [&str; 3] = ["f", "g", "h"];

/// Constant parameters: generator constants, group parameters and the
/// perturbation symbol.
pub const PARAMS: [&str; 9] = ["k1", "k2", "k3", "k4", "A", "B", "C", "D", "eps"];

/// What a jet coordinate stands for.
///
/// The declaration order fixes the global variable order used by the
/// monomial ordering: `x`, then coefficients by index, then `y`, then
/// arbitrary functions, then constant parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VarKind {
    Indep,
    Coeff(u8),
    DepY,
    ArbFunc(&'static str),
    Param(&'static str),
}

/// A jet coordinate: a base symbol together with a derivative order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct JetVar {
    kind: VarKind,
    order: u32,
}

fn intern(table: &[&'static str], name: &str) -> Option<&'static str> {
    table.iter().copied().find(|s| *s == name)
}

impl JetVar {
    pub fn x() -> Self {
        JetVar { kind: VarKind::Indep, order: 0 }
    }

    /// `a_j` differentiated `order` times.
    pub fn coeff(j: usize, order: u32) -> Self {
        assert!(j < 256, "coefficient index out of range");
        JetVar { kind: VarKind::Coeff(j as u8), order }
    }

    pub fn y(order: u32) -> Self {
        JetVar { kind: VarKind::DepY, order }
    }

    /// Jet of one of the arbitrary functions `f`, `g`, `h`.
    pub fn func(name: &str, order: u32) -> Option<Self> {
        intern(&ARB_FUNCS, name).map(|n| JetVar { kind: VarKind::ArbFunc(n), order })
    }

    pub fn param(name: &str) -> Option<Self> {
        intern(&PARAMS, name).map(|n| JetVar { kind: VarKind::Param(n), order: 0 })
    }

    pub fn kind(&self) -> VarKind {
        self.kind
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Same base symbol at order zero.
    pub fn base(&self) -> Self {
        JetVar { kind: self.kind, order: 0 }
    }

    /// Same base symbol at another derivative order. `None` for `x` and
    /// parameters unless `order` is zero.
    pub fn with_order(&self, order: u32) -> Option<Self> {
        match self.kind {
            VarKind::Indep | VarKind::Param(_) if order > 0 => None,
            _ => Some(JetVar { kind: self.kind, order }),
        }
    }

    /// Image under the formal total derivative, when it is again a single
    /// coordinate. `x` maps to 1 and parameters to 0; both return `None`.
    pub fn successor(&self) -> Option<Self> {
        match self.kind {
            VarKind::Indep | VarKind::Param(_) => None,
            _ => Some(JetVar { kind: self.kind, order: self.order + 1 }),
        }
    }

    pub fn is_param(&self) -> bool {
        matches!(self.kind, VarKind::Param(_))
    }

    pub fn is_arb_func(&self) -> bool {
        matches!(self.kind, VarKind::ArbFunc(_))
    }

    pub fn is_coeff(&self) -> bool {
        matches!(self.kind, VarKind::Coeff(_))
    }

    pub fn is_dep(&self) -> bool {
        matches!(self.kind, VarKind::DepY)
    }

    /// Coordinates that depend on `x` only through the original
    /// independent variable (coefficients and arbitrary functions).
    pub fn is_function_of_x(&self) -> bool {
        matches!(self.kind, VarKind::Coeff(_) | VarKind::ArbFunc(_))
    }

    /// Coefficient index, if this is a coefficient jet.
    pub fn coeff_index(&self) -> Option<usize> {
        match self.kind {
            VarKind::Coeff(j) => Some(j as usize),
            _ => None,
        }
    }

    pub fn base_name(&self) -> String {
        match self.kind {
            VarKind::Indep => "x".to_string(),
            VarKind::Coeff(j) => format!("a{j}"),
            VarKind::DepY => "y".to_string(),
            VarKind::ArbFunc(n) | VarKind::Param(n) => n.to_string(),
        }
    }
}

impl fmt::Display for JetVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.base_name())?;
        match self.order {
            0 => Ok(()),
            k @ 1..=3 => f.write_str(&"'".repeat(k as usize)),
            k => write!(f, "^({k})"),
        }
    }
}
