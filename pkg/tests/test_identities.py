"""Property-based checks of the information measures on fuzzed joints."""

from isacrelay.verify import verify_identities


def test_identities_fuzz_1000():
    ok, detail = verify_identities(1000, seed=20260825)
    assert ok, detail
