//! Inter-annotator agreement on audited sentences: Cohen's kappa for a pair
//! of raters and Fleiss' kappa for a panel.

use ape::evaluation::{cohen_kappa, fleiss_kappa, AgreementLabel};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    use AgreementLabel::*;

    // 37 audited sentences rated by two experts: 9 both indicative, 3 + 3
    // split, 22 both not indicative.
    let mut a = Vec::new();
    let mut b = Vec::new();
    for (n, x, y) in [
        (9, Indicative, Indicative),
        (3, Indicative, NotIndicative),
        (3, NotIndicative, Indicative),
        (22, NotIndicative, NotIndicative),
    ] {
        a.extend(std::iter::repeat(x).take(n));
        b.extend(std::iter::repeat(y).take(n));
    }
    let k = cohen_kappa(&a, &b)?;
    println!("Cohen: p_o={:.4} p_e={:.4} kappa={:.4}", k.observed, k.expected, k.kappa);

    let panel = vec![
        vec![Some(Indicative), Some(Indicative), Some(Indicative)],
        vec![Some(Indicative), Some(Indicative), Some(NotIndicative)],
        vec![Some(NotIndicative), Some(NotIndicative), Some(CannotDecide)],
        vec![Some(Indicative), Some(NotIndicative), Some(CannotDecide)],
    ];
    let f = fleiss_kappa(&panel, &AgreementLabel::ALL)?;
    println!("Fleiss: P={:.4} P_e={:.4} kappa={:.4}", f.observed, f.expected, f.kappa);
    Ok(())
}
