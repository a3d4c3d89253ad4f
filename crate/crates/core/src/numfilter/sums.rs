//! Sum quadruples and their mod-4 laws.

use std::collections::BTreeSet;

use crate::equiv::sum_profile_orbit;
use crate::quad::{Kind, SumProfile};

/// All `(a, b, c, d)` with `a²+b²+c²+d² = 4n+2`, the parity of the sequence
/// lengths, and `|a|,|b| <= n+1`, `|c|,|d| <= n`.
pub fn sum_quadruples(n: usize) -> Vec<[i32; 4]> {
    let target = 4 * n as i32 + 2;
    let ab_max = n as i32 + 1;
    let cd_max = n as i32;
    let ab_par = (n as i32 + 1).rem_euclid(2);
    let cd_par = (n as i32).rem_euclid(2);
    let ab: Vec<i32> = (-ab_max..=ab_max)
        .filter(|x| x.rem_euclid(2) == ab_par)
        .collect();
    let cd: Vec<i32> = (-cd_max..=cd_max)
        .filter(|x| x.rem_euclid(2) == cd_par)
        .collect();
    let mut out = Vec::new();
    for &a in &ab {
        for &b in &ab {
            let r1 = target - a * a - b * b;
            if r1 < 0 {
                continue;
            }
            for &c in &cd {
                let rem = r1 - c * c;
                if rem < 0 {
                    continue;
                }
                let d = (rem as f64).sqrt().round() as i32;
                if d * d != rem || d > cd_max || d.rem_euclid(2) != cd_par {
                    continue;
                }
                out.push([a, b, c, d]);
                if d != 0 {
                    out.push([a, b, c, -d]);
                }
            }
        }
    }
    out.sort();
    out
}

fn cong4(x: i32, y: i32) -> bool {
    (x - y).rem_euclid(4) == 0
}

/// The mod-4 relations between the plain and the alternated sums that every
/// `BS(n+1, n)` satisfies.
pub fn mod4_laws_hold(n: usize, s: &SumProfile) -> bool {
    let [a, b, c, d] = s.plain();
    let [sa, sb, sc, sd] = s.starred();
    let pair_law = if n.is_multiple_of(2) {
        cong4(c, d) && cong4(sc, sd)
    } else {
        cong4(a, b + 2) && cong4(sa, sb + 2)
    };
    if !pair_law {
        return false;
    }
    let (ab_shift, cd_shift) = match n % 4 {
        0 => (0, 0),
        1 => (2, 0),
        2 => (2, 2),
        _ => (0, 2),
    };
    cong4(a, sa + ab_shift)
        && cong4(b, sb + ab_shift)
        && cong4(c, sc + cd_shift)
        && cong4(d, sd + cd_shift)
}

/// Extra sum relations forced by the NS / NNS coupling.
pub fn coupling_holds(n: usize, kind: Kind, s: &SumProfile) -> bool {
    match kind {
        Kind::Bs => true,
        Kind::Nns => n.is_multiple_of(2) && s.a == s.b_star + 2 && s.b == s.a_star - 2,
        Kind::Ns => {
            s.a == s.b + 2
                && if n % 2 == 1 {
                    s.a_star == s.b_star - 2
                } else {
                    s.a_star == s.b_star + 2
                }
        }
    }
}

/// Every sum profile admissible for `kind` at order `n`, before any
/// deduplication.
pub fn admissible_sums(n: usize, kind: Kind) -> Vec<SumProfile> {
    if kind == Kind::Nns && n % 2 == 1 {
        return Vec::new();
    }
    let quads = sum_quadruples(n);
    let mut out = Vec::new();
    for p in &quads {
        for q in &quads {
            let s = SumProfile::from_array([p[0], p[1], p[2], p[3], q[0], q[1], q[2], q[3]]);
            if mod4_laws_hold(n, &s) && coupling_holds(n, kind, &s) {
                out.push(s);
            }
        }
    }
    out
}

/// Orbit key of a sum profile: the least member of its sum-level orbit.
pub fn sum_class_key(n: usize, kind: Kind, s: SumProfile) -> SumProfile {
    sum_profile_orbit(n, kind, s)
        .into_iter()
        .min()
        .expect("orbit is nonempty")
}

/// One representative per class of admissible sum profiles.
///
/// The representative is the lexicographically greatest class member that
/// is itself admissible for `kind`; output is sorted descending.
pub fn sum_profiles(n: usize, kind: Kind) -> Vec<SumProfile> {
    let all: BTreeSet<SumProfile> = admissible_sums(n, kind).into_iter().collect();
    let mut done: BTreeSet<SumProfile> = BTreeSet::new();
    let mut reps = Vec::new();
    for s in all.iter().rev() {
        if done.contains(s) {
            continue;
        }
        let orbit = sum_profile_orbit(n, kind, *s);
        // iterating in descending order, the first unseen member is the greatest
        reps.push(*s);
        done.extend(orbit);
    }
    reps
}

/// `n ≡ 6 (mod 8)`: no sum profile can satisfy the normal-sequence laws.
pub fn ns_parity_obstruction(n: usize) -> bool {
    n % 8 == 6
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn obstruction_values() {
        assert!(ns_parity_obstruction(6));
        assert!(!ns_parity_obstruction(12));
        assert!(ns_parity_obstruction(46));
        assert!(!ns_parity_obstruction(2));
    }

    #[test]
    fn obstruction_empties_ns_sums() {
        for n in 1..=120 {
            if ns_parity_obstruction(n) {
                assert!(sum_profiles(n, Kind::Ns).is_empty(), "n = {n}");
            }
        }
        assert!(sum_profiles(6, Kind::Ns).is_empty());
    }

    #[test]
    fn quadruples_satisfy_identity() {
        for n in 0..20 {
            for [a, b, c, d] in sum_quadruples(n) {
                assert_eq!(a * a + b * b + c * c + d * d, 4 * n as i32 + 2);
            }
        }
        assert!(sum_quadruples(1).contains(&[2, 0, 1, 1]));
    }

    #[test]
    fn representatives_are_admissible_and_distinct() {
        for (n, kind) in [(8, Kind::Nns), (9, Kind::Ns), (7, Kind::Bs)] {
            let reps = sum_profiles(n, kind);
            let keys: BTreeSet<_> = reps.iter().map(|s| sum_class_key(n, kind, *s)).collect();
            assert_eq!(keys.len(), reps.len());
            for s in &reps {
                assert!(mod4_laws_hold(n, s) && coupling_holds(n, kind, s));
            }
            // every admissible profile falls into one of the classes
            for s in admissible_sums(n, kind) {
                assert!(keys.contains(&sum_class_key(n, kind, s)));
            }
        }
    }
}
