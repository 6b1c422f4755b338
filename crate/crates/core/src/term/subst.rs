//! Capture-free substitution over positional binders.

use super::{Term, TermError};

/// Inserts a fresh slot at position `at`: free variables `xk` with `k >= at`
/// become `x(k+1)`.
pub fn lift(t: &Term, at: usize) -> Term {
    match t {
        Term::Var(k) if *k >= at => Term::Var(k + 1),
        Term::Var(k) => Term::Var(*k),
        Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| lift(a, at)).collect()),
        Term::Mu(j, body) if *j <= at => Term::mu(*j, lift(body, at + 1)),
        Term::Mu(j, body) => Term::mu(j + 1, lift(body, at)),
    }
}

/// Simultaneous substitution: `xk ↦ sigma[k-1]`, where every image is read
/// over `target` slots. Binder positions are kept where the target context
/// allows it, otherwise moved to the last slot.
pub fn substitute_all(t: &Term, sigma: &[Term], target: usize) -> Result<Term, TermError> {
    match t {
        Term::Var(k) => sigma
            .get(k.wrapping_sub(1))
            .cloned()
            .ok_or(TermError::SlotOutOfRange {
                slot: *k,
                arity: sigma.len(),
            }),
        Term::App(f, args) => Ok(Term::App(
            f.clone(),
            args.iter()
                .map(|a| substitute_all(a, sigma, target))
                .collect::<Result<_, _>>()?,
        )),
        Term::Mu(j, body) => {
            let j2 = (*j).min(target + 1);
            let mut inner = Vec::with_capacity(sigma.len() + 1);
            for k in 1..=sigma.len() + 1 {
                let image = if k < *j {
                    lift(&sigma[k - 1], j2)
                } else if k == *j {
                    Term::Var(j2)
                } else {
                    lift(&sigma[k - 2], j2)
                };
                inner.push(image);
            }
            Ok(Term::mu(j2, substitute_all(body, &inner, target + 1)?))
        }
    }
}

/// `t[s/slot]` over a context of `arity` slots; `s` is read over the same
/// context and the arity is preserved.
pub fn substitute(t: &Term, slot: usize, s: &Term, arity: usize) -> Result<Term, TermError> {
    if slot == 0 || slot > arity {
        return Err(TermError::SlotOutOfRange { slot, arity });
    }
    let sigma: Vec<Term> = (1..=arity)
        .map(|k| if k == slot { s.clone() } else { Term::Var(k) })
        .collect();
    substitute_all(t, &sigma, arity)
}

/// `f⦅x_i, x_i⦆`: replaces `xj` by `xi` (`i < j`) and closes the gap, so a
/// term over `arity` slots becomes one over `arity - 1`.
pub fn identify(t: &Term, i: usize, j: usize, arity: usize) -> Result<Term, TermError> {
    if i == 0 || j <= i || j > arity {
        return Err(TermError::SlotOutOfRange { slot: j, arity });
    }
    let sigma: Vec<Term> = (1..=arity)
        .map(|k| match k.cmp(&j) {
            std::cmp::Ordering::Less => Term::Var(k),
            std::cmp::Ordering::Equal => Term::Var(i),
            std::cmp::Ordering::Greater => Term::Var(k - 1),
        })
        .collect();
    substitute_all(t, &sigma, arity - 1)
}

/// `[f]^k_i` seeded with `seed`: `[f]^1 = f[seed/i]`, `[f]^(k+1) = f[[f]^k/i]`.
pub fn iterate_term(
    f: &Term,
    focus: usize,
    arity: usize,
    k: usize,
    seed: &Term,
) -> Result<Term, TermError> {
    if k == 0 {
        return Err(TermError::SlotOutOfRange { slot: 0, arity: k });
    }
    let mut acc = substitute(f, focus, seed, arity)?;
    for _ in 1..k {
        acc = substitute(f, focus, &acc, arity)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::super::parse_term_unchecked as p;
    use super::*;

    #[test]
    fn first_order_substitution() {
        let t = substitute(&p("f(x1,x2)").unwrap(), 1, &p("g(x1)").unwrap(), 2).unwrap();
        assert_eq!(t, p("f(g(x1),x2)").unwrap());
        assert_eq!(substitute(&p("x1").unwrap(), 1, &p("c").unwrap(), 1).unwrap(), p("c").unwrap());
        assert!(substitute(&p("x1").unwrap(), 3, &p("c").unwrap(), 2).is_err());
    }

    #[test]
    fn binder_is_not_captured() {
        // In mu 1. f(x1,x2) the free parameter is body slot 2, i.e. outer x1.
        let t = p("mu 1. f(x1,x2)").unwrap();
        let r = substitute(&t, 1, &p("g(x1)").unwrap(), 1).unwrap();
        assert_eq!(r, p("mu 1. f(x1,g(x2))").unwrap());
        let t = p("mu 2. f(x1,x2)").unwrap();
        let r = substitute(&t, 1, &p("g(x1)").unwrap(), 1).unwrap();
        assert_eq!(r, p("mu 2. f(g(x1),x2)").unwrap());
    }

    #[test]
    fn lift_shifts_free_slots_only() {
        assert_eq!(lift(&p("f(x1,x2)").unwrap(), 2), p("f(x1,x3)").unwrap());
        assert_eq!(lift(&p("mu 1. f(x1,x2)").unwrap(), 1), p("mu 1. f(x1,x3)").unwrap());
        assert_eq!(lift(&p("mu 2. f(x1,x2)").unwrap(), 1), p("mu 3. f(x2,x3)").unwrap());
    }

    #[test]
    fn identify_slots() {
        let t = p("f(x1,x2,x3)").unwrap();
        assert_eq!(identify(&t, 1, 2, 3).unwrap(), p("f(x1,x1,x2)").unwrap());
        assert_eq!(identify(&t, 1, 3, 3).unwrap(), p("f(x1,x2,x1)").unwrap());
    }

    #[test]
    fn iterates() {
        let f = p("f(x1,x2)").unwrap();
        let s = p("c").unwrap();
        assert_eq!(iterate_term(&f, 1, 2, 1, &s).unwrap(), p("f(c,x2)").unwrap());
        assert_eq!(iterate_term(&f, 1, 2, 2, &s).unwrap(), p("f(f(c,x2),x2)").unwrap());
        assert!(iterate_term(&f, 1, 2, 0, &s).is_err());
    }
}
