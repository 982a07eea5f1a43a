use kohn_core::exactalg::parse_poly;
use kohn_core::kohn::{compare_modes, RunConfig, SpecialDomain};

fn family(polys: impl Fn(u32) -> [String; 2], ks: &[u32], hint: Option<u32>) -> Vec<(u32, SpecialDomain)> {
    ks.iter()
        .map(|&k| {
            let ps = polys(k).iter().map(|s| parse_poly(s).unwrap()).collect();
            (k, SpecialDomain::new(ps, hint).unwrap())
        })
        .collect()
}

#[test]
fn classic_root_order_grows_while_effective_is_flat() {
    let heier = family(|k| [format!("z^3 + z*w^{k}"), "w".into()], &[3, 5, 7], None);
    let rows = compare_modes(&heier, &RunConfig::default()).unwrap();
    let roots: Vec<u64> = rows.iter().map(|r| r.classic_root_order).collect();
    assert_eq!(roots, vec![3, 5, 7]);
    assert!(rows.iter().all(|r| r.effective_a == 1 && r.effective_epsilon == rows[0].effective_epsilon));

    let cd = family(|k| ["z^2".into(), format!("w^3 + z^{k}*w")], &[10, 20], Some(3));
    let rows = compare_modes(&cd, &RunConfig::default()).unwrap();
    let roots: Vec<u64> = rows.iter().map(|r| r.classic_root_order).collect();
    assert_eq!(roots, vec![12, 22]);
    assert!(rows.iter().all(|r| r.effective_a == 12 && r.effective_l == 7));
}
