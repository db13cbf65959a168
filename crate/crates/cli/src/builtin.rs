use clap::ValueEnum;

/// Built-in example functions, all taken at the origin of R².
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Builtin {
    /// `max(|x1|, |x2|)`; convex, so `g = f`, `h = 0`.
    ConvexMax,
    /// `min_{k ≤ N} |x1 - x2/k|`, a nonconvex minimum of kinks.
    NonQd,
}

pub struct BuiltinFunction {
    pub f: String,
    pub g: String,
    pub h: String,
}

fn term(k: usize) -> String {
    format!("abs(x1 - x2/{k})")
}

impl Builtin {
    /// Text of `f` and of a DC decomposition `f = g - h` with `g`, `h` in
    /// max-affine form.
    ///
    /// For the minimum of `N` kinks `u_k = |x1 - x2/k|` the decomposition is
    /// `min_k u_k = Σ_k u_k - max_j Σ_{k≠j} u_k`.
    pub fn function(self, terms: usize) -> BuiltinFunction {
        match self {
            Builtin::ConvexMax => BuiltinFunction {
                f: "max(abs(x1), abs(x2))".into(),
                g: "max(abs(x1), abs(x2))".into(),
                h: "0".into(),
            },
            Builtin::NonQd => {
                let all: Vec<String> = (1..=terms).map(term).collect();
                let leave_one_out: Vec<String> = (1..=terms)
                    .map(|j| {
                        let rest: Vec<String> = (1..=terms).filter(|&k| k != j).map(term).collect();
                        if rest.is_empty() {
                            "0".to_string()
                        } else {
                            rest.join(" + ")
                        }
                    })
                    .collect();
                BuiltinFunction {
                    f: format!("min({})", all.join(", ")),
                    g: all.join(" + "),
                    h: format!("max({})", leave_one_out.join(", ")),
                }
            }
        }
    }
}
