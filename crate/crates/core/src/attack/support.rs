use std::collections::BTreeSet;

use super::{AttackEdge, SupportEdge};

/// Support acts as defence: if `s` supports `p` and `k` attacks `p`, `s`
/// should attack `k`. Returns one warning per missing counter-attack.
pub fn validate_support(supports: &[SupportEdge], attacks: &[AttackEdge]) -> Vec<String> {
    let pairs: BTreeSet<(&str, &str)> = attacks.iter().map(|e| (e.attacker.as_str(), e.target.as_str())).collect();
    let mut out = Vec::new();
    for s in supports {
        for k in attacks.iter().filter(|e| e.target == s.supported) {
            if !pairs.contains(&(s.supporter.as_str(), k.attacker.as_str())) {
                out.push(format!(
                    "{} supports {} but does not attack its attacker {}",
                    s.supporter, s.supported, k.attacker
                ));
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attack::EdgeOrigin;

    fn att(a: &str, t: &str) -> AttackEdge {
        AttackEdge::rule(a.into(), t.into(), EdgeOrigin::Manual, "")
    }

    fn sup() -> Vec<SupportEdge> {
        vec![SupportEdge {
            supporter: "s".into(),
            supported: "p".into(),
        }]
    }

    #[test]
    fn counter_attack_present() {
        assert!(validate_support(&sup(), &[att("k", "p"), att("s", "k")]).is_empty());
    }

    #[test]
    fn counter_attack_missing() {
        assert_eq!(validate_support(&sup(), &[att("k", "p")]).len(), 1);
    }

    #[test]
    fn no_supports() {
        assert!(validate_support(&[], &[att("k", "p")]).is_empty());
    }
}
