"""Corpus-wide invariants that relate whole-backend configurations."""

from permver import AlgorithmId
from permver.bench import load_manifest
from permver.bench.runner import file_verdict, load_program
from permver.se import EngineOptions

from conftest import CORPUS, make_cfg

from permver import verify_program


def _sweep(algo, **opts):
    cfg = make_cfg()
    options = EngineOptions(**opts) if opts else None
    out = {}
    for ex in load_manifest(CORPUS / "manifest.txt"):
        prog = load_program(ex.path)
        verdict, _ = file_verdict(verify_program(prog, algo, cfg, options=options))
        out[ex.name] = verdict
    return out


def test_consolidation_only_fixes_spurious_errors():
    """Enabling consolidation never turns a verified example into errors."""
    plain = _sweep(AlgorithmId.SE_PS, consolidate=False)
    consolidated = _sweep(AlgorithmId.SE_PS)
    flipped_bad = [n for n in plain
                   if plain[n] == "verified" and consolidated[n] != "verified"]
    assert flipped_bad == []
    # and it does fix at least the split-chunk example
    fixed = [n for n in plain
             if plain[n] != "verified" and consolidated[n] == "verified"]
    assert "hm_split_chunk.pv" in fixed


def test_single_chunk_complete_implies_combining_complete():
    """Everything SE-PS verifies on the corpus, SE-PC verifies too."""
    ps = _sweep(AlgorithmId.SE_PS)
    pc = _sweep(AlgorithmId.SE_PC)
    regressions = [n for n in ps if ps[n] == "verified" and pc[n] != "verified"]
    assert regressions == []
