import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from intergroup.errors import SingleRater
from intergroup.multirater import (
    ALPHA_NO_VARIATION,
    category_counts,
    coincidence_matrix,
    fleiss_kappa,
    krippendorff_alpha,
)

from oracles import TABLE1, brute_alpha, coincidence_tally, pair_enumeration_fleiss

GROUP_A = [list(r[:3]) for r in TABLE1]
GROUP_B = [list(r[3:]) for r in TABLE1]
ALL = [list(r) for r in TABLE1]

# frozen from tests/oracles.py (pair enumeration, Fraction-based coincidence tally)
FLEISS_A = 0.51332560834299
FLEISS_B = 0.3136320305052432
ALPHA = {
    "ordinal": (0.8723264154687987, 0.6988049964720937, 0.7761056360584128),
    "interval": (0.8606847697756789, 0.8269371791737962, 0.8576214405360134),
    "nominal": (0.5214368482039398, 0.32507149666348906, 0.456282450674974),
}


def test_fleiss_unanimous_rows():
    counts = category_counts([[1, 1, 1], [2, 2, 2], [1, 1, 1], [2, 2, 2]], 2)
    assert fleiss_kappa(counts) == 1.0


def test_fleiss_all_split():
    assert fleiss_kappa([[1, 1], [1, 1]]) == -1.0


def test_fleiss_table1():
    assert fleiss_kappa(category_counts(GROUP_A, 5)) == pytest.approx(FLEISS_A, abs=1e-12)
    assert fleiss_kappa(category_counts(GROUP_B, 5)) == pytest.approx(FLEISS_B, abs=1e-12)
    assert 0 < FLEISS_A <= 1


def test_fleiss_single_rater():
    with pytest.raises(SingleRater):
        fleiss_kappa([[1, 0], [0, 1]])


def test_alpha_unanimity():
    assert krippendorff_alpha([[1, 1], [3, 3], [2, 2]], 3, "ordinal") == 1.0


def test_alpha_single_unit_hand_case():
    cm = coincidence_matrix([[1, 2]], 2)
    assert cm.values.tolist() == [[0, 1], [1, 0]]
    assert cm.margins.tolist() == [1, 1] and cm.total == 2
    assert krippendorff_alpha([[1, 2]], 2, "nominal") == 0.0


def test_alpha_no_variation_flag():
    flags = []
    assert krippendorff_alpha([[2, 2], [2, 2]], 3, "nominal", flags) == 1.0
    assert flags == [ALPHA_NO_VARIATION]


@pytest.mark.parametrize("metric", ["ordinal", "interval", "nominal"])
def test_alpha_table1(metric):
    for rows, want in zip((GROUP_A, GROUP_B, ALL), ALPHA[metric]):
        assert krippendorff_alpha(rows, 5, metric) == pytest.approx(want, abs=1e-12)
        assert brute_alpha(rows, 5, metric) == pytest.approx(want, abs=1e-12)


def test_coincidence_matches_tally():
    cm = coincidence_matrix(GROUP_A, 5)
    want = coincidence_tally(GROUP_A, 5)
    assert np.allclose(cm.values, np.array(want, dtype=float), atol=0)
    assert np.array_equal(cm.pairs, cm.pairs.T)


matrices = st.integers(2, 5).flatmap(
    lambda k: st.tuples(
        st.just(k),
        st.integers(2, 5).flatmap(
            lambda m: st.lists(st.lists(st.integers(1, k), min_size=m, max_size=m), min_size=1, max_size=8)
        ),
    )
)


@settings(max_examples=200, deadline=None)
@given(matrices, st.randoms(use_true_random=False))
def test_kernels_against_oracles_and_permutations(case, rnd):
    k, rows = case
    counts = category_counts(rows, k)
    single_category = len({v for r in rows for v in r}) == 1
    if not single_category:
        assert fleiss_kappa(counts) == pytest.approx(pair_enumeration_fleiss(rows, k), abs=1e-10)
        for metric in ("ordinal", "interval", "nominal"):
            assert krippendorff_alpha(rows, k, metric) == pytest.approx(brute_alpha(rows, k, metric), abs=1e-10)
    shuffled = [list(r) for r in rows]
    rnd.shuffle(shuffled)
    perm = list(range(len(rows[0])))
    rnd.shuffle(perm)
    shuffled = [[r[p] for p in perm] for r in shuffled]
    assert fleiss_kappa(category_counts(shuffled, k)) == fleiss_kappa(counts)
    for metric in ("ordinal", "interval", "nominal"):
        value = krippendorff_alpha(rows, k, metric)
        assert krippendorff_alpha(shuffled, k, metric) == value
        assert value <= 1.0
    assert fleiss_kappa(counts) <= 1.0


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 5).flatmap(
    lambda k: st.tuples(st.just(k), st.lists(st.tuples(st.integers(1, k), st.integers(1, k)), min_size=2, max_size=15))
))
def test_two_rater_nominal_alpha_matches_direct_disagreement(case):
    k, pairs = case
    values = [v for p in pairs for v in p]
    if len(set(values)) == 1:
        return
    total = 2 * len(pairs)
    # direct: observed disagreement over ordered pairs vs expected over all value pairs
    d_o = sum(2 for a, b in pairs if a != b) / total
    n_c = [values.count(c) for c in range(1, k + 1)]
    d_e = sum(n_c[i] * n_c[j] for i in range(k) for j in range(k) if i != j) / (total * (total - 1))
    assert krippendorff_alpha([list(p) for p in pairs], k, "nominal") == pytest.approx(1 - d_o / d_e, abs=1e-12)


def test_sign_agreement_recorded():
    """Fleiss vs nominal alpha sign agreement on random matrices, recorded not asserted."""
    rng = np.random.default_rng(7)
    agree = total = 0
    for _ in range(300):
        k = int(rng.integers(2, 5))
        rows = rng.integers(1, k + 1, size=(int(rng.integers(3, 9)), int(rng.integers(2, 5))))
        kf = fleiss_kappa(category_counts(rows, k))
        ka = krippendorff_alpha(rows, k, "nominal")
        if abs(kf) > 1e-9 and abs(ka) > 1e-9 and len(np.unique(rows)) > 1:
            total += 1
            agree += np.sign(kf) == np.sign(ka)
    print(f"fleiss/alpha sign agreement: {agree}/{total}")
    assert total > 0
