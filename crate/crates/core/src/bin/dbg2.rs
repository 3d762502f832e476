use wt1deform::exactalg::*;
use wt1deform::padics::*;
fn main() {
    let field = NumberField::new(QPoly::from_ints(&[23, 0, 9, 0, -6, 0, 1]));
    for (ell, f) in [(2u64, 3usize), (3, 3), (59, 1)] {
        let m = irreducible_modulus(ell, f);
        let ctx = PadicContext::new(ell, f, 24, m);
        match PadicEmbedding::all(&ctx, &field) {
            Ok(e) => eprintln!("ell={ell} f={f}: {} embeddings", e.len()),
            Err(e) => eprintln!("ell={ell} f={f}: {e}"),
        }
        match PrimeSplitting::analyze(ell, &field, &[1,2,3,6], 24) {
            Ok(ps) => eprintln!("  analyze: f={} orbits={:?}", ps.ctx.f, ps.orbits),
            Err(e) => eprintln!("  analyze: {e}"),
        }
    }
}
