from harmonic_zeros.services.harmonic import Sense, TrinomialParams, make_trinomial
from harmonic_zeros.services.zeros import census


def test_census():
    """Census of z^9 + z^4 + 0.5 conj(z)^4 - 1"""
    p = make_trinomial(TrinomialParams(9, 4, 1.0, 0.5))

    result = census(p)
    print(f"Zeros: {result.total} ({result.count_preserving} preserving)")
    print(f"Certified: {result.certified} {list(result.discrepancies)}")

    assert result.total == 9
    assert all(zero.sense is Sense.PRESERVING for zero in result.zeros)
    assert result.certified


if __name__ == "__main__":
    test_census()
