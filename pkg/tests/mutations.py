"""One seeded bug per verifying corpus program: a flipped comparison, a
dropped or shrunk permission, or an off-by-one constant. Each entry is a
unique single textual edit applied to the pristine source."""

MUTATIONS = {
    "bh_max3.pv": ("if (a >= b) {\n", "if (a <= b) {\n"),
    "bh_signs.pv": ("if (a < 0) { s := s + 2 }", "if (a < 0) { s := s + 3 }"),
    "bh_product_pair.pv": ("{ y := a - b }", "{ y := b - a }"),
    "bh_deep.pv": ("ensures s >= 0 && s <= 8", "ensures s >= 0 && s <= 7"),
    "hf_sum_double.pv": ("s := s + 2", "s := s + 1"),
    "hf_gauss_div.pv": ("requires a >= 0 && b > 0", "requires a >= 0 && b >= 0"),
    "hf_parity.pv": ("even := !even", "even := even"),
    "hf_clamp.pv": ("r := x\n", "r := lo\n"),
    "hf_abs.pv": ("if (x < 0)", "if (x > 0)"),
    "hm_write_read.pv": ("x.val := x.val + 1", "x.val := x.val + 2"),
    "hm_swap.pv": ("b.val := t", "b.val := a.val"),
    "hm_frac_share.pv": ("inhale acc(x.val, 1/2)", "inhale acc(x.val, 1/4)"),
    "hm_alias_branch.pv": ("if (b) { y := x } else { y := z }",
                           "if (b) { y := z } else { y := z }"),
    "hm_disjunctive.pv": ("requires x == y || x == z", "requires x == y || x != z"),
    "hm_split_chunk.pv": ("acc(x.val, 1/2) && acc(x.val, 1/2)",
                          "acc(x.val, 1/2) && acc(x.val, 1/4)"),
    "hm_nonalias.pv": ("requires acc(x.val) && acc(y.val, 1/2)",
                       "requires acc(x.val, 1/2) && acc(y.val, 1/2)"),
    "hm_new_init.pv": ("y.val := 5", "y.val := 4"),
    "hm_frame_loop.pv": ("invariant acc(z.cnt) && z.cnt == i",
                         "invariant acc(z.cnt) && z.cnt <= i"),
    "hm_old_incr.pv": ("x.val == old(x.val) + 2", "x.val == old(x.val) + 3"),
    "pr_cell_roundtrip.pv": ("x.val := 3", "x.val := 4"),
    "pr_frac_fold.pv": ("fold acc(Cell(x), 1/2)", "fold acc(Cell(x), 1/1)"),
    "pr_pair_pred.pv": ("a.val := 1", "a.val := 3"),
    "pr_call_pred.pv": ("x.val := 5", "x.val := -5"),
    "pr_nested.pv": ("x.val := 1\n", "x.val := 2\n"),
    "pr_counter.pv": ("c.val := c.val + 1", "c.val := c.val - 1"),
    "pr_pred_nonalias.pv": ("assert x != y", "assert x == y"),
}


def mutate(source: str, name: str) -> str:
    old, new = MUTATIONS[name]
    count = source.count(old)
    if count != 1:
        raise ValueError(f"mutation anchor for {name} matches {count} times")
    return source.replace(old, new)
