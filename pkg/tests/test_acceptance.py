"""Acceptance criteria, one test per criterion.

Each test carries an ``acceptance`` marker; the terminal summary prints one
PASS/FAIL line per criterion with the counts behind it.
"""

import io
import time

import numpy as np
import pytest

from codeloop import moufang as M
from codeloop.cli import main
from codeloop.codes import builtin
from codeloop.cubic import CubicSpace, from_code, random_space
from codeloop.moufang import CodeLoop
from codeloop.report import rng_for
from codeloop.triality import (
    RHO,
    SIGMA,
    TrialityGroup,
    index_check,
    parker_check,
    relations,
    triality_report,
    verify_presentation,
)


def spaces_for(seed_label, ns, count):
    rng = rng_for(0, seed_label)
    return [random_space(n, rng) for n in ns for _ in range(count)]


def detail(record, text):
    record("detail", text)
    print(text)


def builtin_space(name):
    return from_code(builtin(name))


@pytest.mark.acceptance("1", "group order 2^(3n+2) with two-sided cancellation, n = 0..3, 20 spaces each")
def test_group_order_and_cancellation(record_property):
    start = time.perf_counter()
    checked = 0
    for sp in spaces_for("c1", (0, 1, 2, 3), 20):
        G = TrialityGroup(sp)
        codes = G.all_codes()
        assert codes.size == 2 ** (3 * sp.n + 2)
        table = G.mul_codes(codes[:, None], codes[None, :])
        target = np.arange(G.order)
        # every row and column is a permutation: left and right cancellation
        assert (np.sort(table, axis=1) == target).all()
        assert (np.sort(table, axis=0) == target[:, None]).all()
        assert (table[0] == target).all() and (table[:, 0] == target).all()
        assert len({G.decode(c).key() for c in codes}) == G.order
        checked += 1
    elapsed = time.perf_counter() - start
    detail(record_property, f"{checked} groups, {elapsed:.1f}s")
    assert elapsed < 30


@pytest.mark.acceptance("2", "relations exact; associativity exhaustive n <= 2, 10^6 sampled at n = 3, 4, 12")
def test_presentation_consistency(record_property):
    start = time.perf_counter()
    spaces = [builtin_space("hamming8"), builtin_space("golay24"),
              *spaces_for("c2", range(0, 10), 5)]
    relations_checked = 0
    for sp in spaces:
        G = TrialityGroup(sp)
        for name, lhs, rhs in relations(sp.n, sp):
            assert G.evaluate(lhs) == G.evaluate(rhs), (sp.name, name)
            relations_checked += 1
    exhaustive = 0
    for sp in spaces_for("c2-assoc", (0, 1, 2), 1) + [builtin_space("zero_2")]:
        report = verify_presentation(TrialityGroup(sp))
        chk = report.check("associativity (exhaustive)")
        assert report.passed and chk.checks == TrialityGroup(sp).order ** 3
        exhaustive += chk.checks
    sampled = 0
    for sp in [*spaces_for("c2-sampled", (3, 4), 1), builtin_space("golay24")]:
        G = TrialityGroup(sp)
        rng = rng_for(0, f"c2-{sp.n}")
        for _ in range(10):
            a, b, c = (G.random_codes(rng, 100_000) for _ in range(3))
            assert np.array_equal(G.mul_codes(G.mul_codes(a, b), c), G.mul_codes(a, G.mul_codes(b, c)))
            sampled += a.size
    elapsed = time.perf_counter() - start
    detail(record_property, f"{len(spaces)} spaces, {relations_checked} relation instances, "
                            f"{exhaustive} exhaustive + {sampled} sampled triples, {elapsed:.1f}s")
    assert exhaustive >= 256 ** 3 and sampled == 3_000_000
    assert elapsed < 120


@pytest.mark.acceptance("3", "sigma, rho preserve relations; sigma^2 = rho^3 = (sigma rho)^2 = id")
def test_automorphism_laws(record_property):
    small = [*spaces_for("c3", (0, 1, 2, 3), 3), builtin_space("hamming8_sub3")]
    elems = 0
    for sp in small:
        report = verify_presentation(TrialityGroup(sp), map_limit=1 << 11)
        assert report.passed, report.to_text()
        elems += TrialityGroup(sp).order
    G = TrialityGroup(builtin_space("golay24"))
    codes = G.random_codes(rng_for(0, "c3-golay"), 100_000)
    assert np.array_equal(G.apply_codes(SIGMA, G.apply_codes(SIGMA, codes)), codes)
    img = codes
    for _ in range(3):
        img = G.apply_codes(RHO, img)
    assert np.array_equal(img, codes)
    sr = SIGMA * RHO
    assert np.array_equal(G.apply_codes(sr, G.apply_codes(sr, codes)), codes)
    for mname in ("sigma", "rho"):
        imgs = G._images[mname]
        for name, lhs, rhs in relations(G.n, G.space):
            assert G.evaluate(lhs, imgs.__getitem__) == G.evaluate(rhs, imgs.__getitem__), (mname, name)
    detail(record_property, f"{len(small)} small groups ({elems} elements, all), 10^5 golay24 elements")


@pytest.mark.acceptance("4", "triality identity, Parker criterion, |G:H3| = |H2:H2nH3| = 2^(n+1)")
def test_triality(record_property):
    spaces = [*spaces_for("c4", (0, 1, 2, 3, 4), 2), builtin_space("hamming8"), builtin_space("zero_4")]
    for sp in spaces:
        G = TrialityGroup(sp)
        report = triality_report(G)
        assert report.passed and report.mode == "exhaustive" and report.checks[0].checks == G.order
        assert index_check(G).passed
    golay = TrialityGroup(builtin_space("golay24"))
    report = triality_report(golay, samples=100_000, seed=0)
    assert report.passed and report.checks[0].checks == 100_000
    idx = index_check(golay)
    assert idx.passed and idx.data["index"] == 2 ** 13
    parker = parker_check(TrialityGroup(builtin_space("hamming8")), samples=10_000, seed=0)
    chk = parker.checks[0]
    assert parker.passed and chk.checks == 10_000
    detail(record_property, f"{len(spaces)} exhaustive groups, 10^5 golay24 elements, "
                            f"{chk.checks} Parker pairs")


@pytest.mark.acceptance("5", "Latin squares and Moufang identity, exhaustive order <= 256, 10^6 at order 8192")
def test_loop_axioms(record_property):
    start = time.perf_counter()
    spaces = [*spaces_for("c5", range(0, 8), 1), builtin_space("hamming8"), builtin_space("hamming8_sub3")]
    for sp in spaces:
        L = CodeLoop.from_space(sp)
        report = M.loop_axioms_report(L)
        assert report.passed and report.mode == "exhaustive", report.to_text()
    golay = CodeLoop.from_space(builtin_space("golay24"))
    report = M.is_moufang(golay, samples=1_000_000, seed=0)
    assert report.passed and report.mode == "sampled" and report.checks[0].checks == 1_000_000
    elapsed = time.perf_counter() - start
    detail(record_property, f"{len(spaces)} loops up to order 256 exhaustive, 10^6 golay24 triples, {elapsed:.1f}s")
    assert elapsed < 300


@pytest.mark.acceptance("6", "recovered constants equal the input space; all-elements structure recovery")
def test_structure_recovery(record_property):
    named = [builtin_space(n) for n in ("hamming8", "golay24")]
    rand = spaces_for("c6", range(0, 7), 8)[:50]
    for sp in named + rand:
        assert M.recovered_constants(CodeLoop.from_space(sp)) == sp
    counts = {sp.name: len(sp.sigma) + sp.n * (sp.n - 1) // 2 + sp.n * (sp.n - 1) * (sp.n - 2) // 6 for sp in named}
    assert counts == {"hamming8": 14, "golay24": 298}
    exhaustive = 0
    for sp in [sp for sp in rand if sp.n <= 5] + [builtin_space("hamming8")]:
        report = M.structure_report(CodeLoop.from_space(sp))
        assert report.passed and report.mode == "exhaustive"
        exhaustive += 1
    report = M.structure_report(CodeLoop.from_space(named[1]), samples=100_000)
    assert report.passed and report.mode == "sampled" and report.checks[2].checks == 100_000
    detail(record_property, f"{len(named) + len(rand)} spaces recovered, {exhaustive} loops exhaustive, "
                            "10^5 golay24 triples")


@pytest.mark.acceptance("7", "small Frattini: s central, squares in {one, s}, quotient is XOR")
def test_small_frattini(record_property):
    names = ("zero_1", "zero_2", "hamming8_sub3", "hamming8", "golay24")
    loops = [CodeLoop.from_space(builtin_space(n)) for n in names]
    loops += [CodeLoop.from_space(sp) for sp in spaces_for("c7", range(0, 8), 2)]
    for L in loops:
        report = M.small_frattini_check(L)
        assert report.passed, report.to_text()
    golay = loops[4]
    assert M.small_frattini_check(golay).check("squares in {one, s} (all elements)").checks == 8192
    detail(record_property, f"{len(loops)} loops")


@pytest.mark.acceptance("8", "multiplication identities (i)-(iii): exhaustive order <= 64, 10^4 at order 256")
def test_mult_identities(record_property):
    small = [*spaces_for("c8", range(0, 6), 2), builtin_space("hamming8")]
    for sp in small:
        L = CodeLoop.from_space(sp)
        report = M.mult_identities_report(L)
        assert report.passed and report.mode == "exhaustive", report.to_text()
        assert report.check("(iii) [[R_x,L_y],R_z] = R_(x,y,z)").checks == L.order ** 3
    big = CodeLoop.from_space(spaces_for("c8-256", (7,), 1)[0])
    assert big.order == 256
    report = M.mult_identities_report(big, samples=10_000, seed=0)
    assert report.passed and report.mode == "sampled"
    assert all(c.checks == 10_000 for c in report.checks)
    detail(record_property, f"{len(small)} loops exhaustive, 10^4 triples at order 256")


@pytest.mark.acceptance("9", "zero_k loops associative; hamming8_sub3 nonassociative Moufang, associator s")
def test_associativity_criterion(record_property):
    for k in range(1, 6):
        L = CodeLoop.from_space(builtin_space(f"zero_{k}"))
        assert M.is_associative(L) == (True, None)
    L = CodeLoop.from_space(builtin_space("hamming8_sub3"))
    assert L.order == 16
    x = [L.basis(i) for i in range(3)]
    assert L.associator(*x) == L.s_elem() != L.one()
    ok, witness = M.is_associative(L)
    assert not ok and witness == tuple(x)
    assert M.is_moufang(L).passed
    detail(record_property, "zero_1..zero_5 associative; (x_1,x_2,x_3) = s in hamming8_sub3")


@pytest.mark.acceptance("10", "coset-action and conjugation products give identical tables, n <= 3")
def test_dual_construction(record_property):
    spaces = [*spaces_for("c10", (0, 1, 2, 3), 4), CubicSpace(1), CubicSpace(3),
              builtin_space("zero_1"), builtin_space("zero_3"), builtin_space("hamming8_sub3")]
    entries = 0
    for sp in spaces:
        L = CodeLoop.from_space(sp)
        a, b = L.cayley_table(), L.conjugation_table()
        assert np.array_equal(a, b), sp
        entries += a.size
    detail(record_property, f"{len(spaces)} spaces, {entries} table entries")


@pytest.mark.acceptance("11", "structure constants agree with weight formulas on codeword triples")
def test_polarization_cross_validation(record_property):
    for name, count in (("hamming8", None), ("golay24", 10_000)):
        sp = builtin_space(name)
        words = builtin(name).codewords()
        if count is None:
            grid = np.meshgrid(*(np.arange(words.size),) * 3, indexing="ij")
            x, y, z = (g.ravel() for g in grid)
        else:
            rng = rng_for(0, "c11")
            x, y, z = (rng.integers(0, words.size, count) for _ in range(3))
        cx, cy, cz = words[x], words[y], words[z]
        assert np.array_equal(sp.eval_sigma(x), (np.bitwise_count(cx) // 4) & 1)
        assert np.array_equal(sp.eval_kappa(x, y), (np.bitwise_count(cx & cy) // 2) & 1)
        assert np.array_equal(sp.eval_alpha(x, y, z), np.bitwise_count(cx & cy & cz) & 1)
    detail(record_property, "hamming8 4096 triples exhaustive, golay24 10^4 sampled")


@pytest.mark.acceptance("12", "CLI verify is byte-identical across runs; exported table re-imports and checks out")
def test_cli_determinism_and_round_trip(record_property, capsys, tmp_path):
    runs = []
    for _ in range(2):
        assert main(["verify", "--builtin", "hamming8", "--seed", "42", "--samples", "20000"]) == 0
        runs.append(capsys.readouterr().out)
    assert runs[0] == runs[1] and "ALL PASS" in runs[0]
    for name in ("hamming8", "hamming8_sub3"):
        path = tmp_path / f"{name}.tbl"
        assert main(["export-table", "--builtin", name, "--out", str(path)]) == 0
        capsys.readouterr()
        with open(path) as fh:
            back = M.read_cayley(fh)
        L = CodeLoop.from_space(builtin_space(name))
        assert np.array_equal(back.table, L.cayley_table())
        assert M.latin_check(back.table).passed and M.moufang_table_check(back.table).passed
        buf = io.StringIO()
        M.export_cayley(L, buf)
        assert buf.getvalue() == path.read_text()
    detail(record_property, f"{len(runs[0].splitlines())} report lines identical; 2 tables round-tripped")
