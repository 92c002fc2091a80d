import ipaddress
import random

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from pqcmeter.anomaly import detect_downgrades
from pqcmeter.ingest import ConnTuple, SshObservation
from pqcmeter.kexmodel import (
    CLASSICAL_KEX,
    HYBRID_KEX,
    STEP_ORDER,
    AlgorithmPolicy,
    CurveParams,
    NegotiationFailure,
    SntrupParams,
    hybrid_combine,
    negotiate,
    simulate_handshake,
    validate_curve_params,
    validate_sntrup_params,
)
from pqcmeter.kexmodel.numtheory import (
    euler_criterion,
    is_probable_prime,
    jacobi,
    miller_rabin,
    strong_lucas,
    trinomial_irreducible,
)

P25519 = 2 ** 255 - 19

# strong pseudoprimes to small bases, Carmichael numbers, and a Lucas pseudoprime
HARD_COMPOSITES = [561, 1105, 1729, 2047, 3277, 4033, 4681, 5777, 8321, 25326001, 3215031751, 2152302898747,
                   3474749660383, 341550071728321, 3825123056546413051, 318665857834031151167461,
                   2 ** 255 - 21, (2 ** 61 - 1) * (2 ** 89 - 1)]
KNOWN_PRIMES = [2, 3, 5, 761, 4591, 2 ** 61 - 1, 2 ** 127 - 1, P25519, 2 ** 521 - 1]


@pytest.mark.parametrize("n", KNOWN_PRIMES)
def test_known_primes(n):
    assert is_probable_prime(n)


@pytest.mark.parametrize("n", HARD_COMPOSITES)
def test_hard_composites(n):
    assert not is_probable_prime(n)


def test_primality_matches_sympy_below_20000():
    assert [n for n in range(20_000) if is_probable_prime(n)] == list(sympy.primerange(0, 20_000))


@given(st.integers(0, 2 ** 80))
def test_primality_matches_sympy(n):
    assert is_probable_prime(n) == sympy.isprime(n)


@given(st.integers(3, 10 ** 6).filter(lambda n: n % 2), st.integers(-10 ** 6, 10 ** 6))
def test_jacobi_matches_sympy(n, a):
    assert jacobi(a, n) == sympy.jacobi_symbol(a, n)


def test_component_tests_separately():
    # 2047 fools Miller-Rabin to base 2 only; 5777 is a strong Lucas pseudoprime
    assert not miller_rabin(2047)
    assert not strong_lucas(2047)
    assert strong_lucas(5777) and strong_lucas(10877)
    assert not miller_rabin(5777) and not is_probable_prime(5777)
    assert strong_lucas(P25519)


def test_euler_criterion():
    disc = (486662 ** 2 - 4) % P25519
    assert euler_criterion(disc, P25519) == P25519 - 1
    assert euler_criterion(4, P25519) == 1
    assert euler_criterion(0, 7) == 0


SMALL_PRIMES = [2, 3, 5, 7, 11, 13]
SMALL_FIELDS = list(sympy.primerange(2, 60))


@pytest.mark.parametrize("p", SMALL_PRIMES)
def test_trinomial_matches_sympy(p):
    x = sympy.Symbol("x")
    for q in SMALL_FIELDS:
        expected = sympy.Poly(x ** p - x - 1, x, modulus=q).is_irreducible
        assert trinomial_irreducible(p, q) == expected, (p, q)


def test_trinomial_rejects_bad_input():
    with pytest.raises(ValueError):
        trinomial_irreducible(4, 7)
    with pytest.raises(ValueError):
        trinomial_irreducible(5, 9)


def test_curve_validation():
    report = validate_curve_params()
    assert report["modulus_prime"].passed
    assert report["a2_minus_4_nonsquare"].passed
    assert not validate_curve_params(CurveParams(A=2))["a2_minus_4_nonsquare"].passed
    # 6^2 - 4 = 32 = 2 * 16 and 2 is a square modulo 7
    assert not validate_curve_params(CurveParams(modulus=7, A=6))["a2_minus_4_nonsquare"].passed
    assert not validate_curve_params(CurveParams(modulus=2 ** 255 - 21)).passed


def test_sntrup_validation_fast_parts():
    report = validate_sntrup_params(irreducibility=False)
    assert report.passed
    assert [c.name for c in report.checks] == ["p_prime", "q_prime", "weight_range"]
    bad = validate_sntrup_params(SntrupParams(760, 4591, 286))
    assert not bad["p_prime"].passed and not bad["irreducible"].passed
    assert not validate_sntrup_params(SntrupParams(w=761), irreducibility=False).passed


@pytest.mark.slow
def test_sntrup761_irreducible():
    assert validate_sntrup_params()["irreducible"].passed


# FIPS 180-4 example vectors, split at an arbitrary point into (kem, ecdh)
SHA512_ABC = ("ddaf35a193617abacc417349ae20413112e6fa4e89a97ea20a9eeee64b55d39a"
              "2192992a274fc1a836ba3c23a3feebbd454d4423643ce80e2a9ac94fa54ca49f")
SHA512_448 = ("204a8fc6dda82f0a0ced7beb8e08a41657c16ef468b228a8279be331a703c335"
              "96fd15c13b1b07f9aa1d3bea57789ca031ad85c7a71dd70354ec631238ca3445")


def test_hybrid_combine_fips_vectors():
    assert hybrid_combine(b"ab", b"c").hex() == SHA512_ABC
    msg = b"abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq"
    assert hybrid_combine(msg[:20], msg[20:]).hex() == SHA512_448


def test_hybrid_combine_order_and_empty():
    assert hybrid_combine(b"k", b"e") != hybrid_combine(b"e", b"k")
    with pytest.raises(ValueError):
        hybrid_combine(b"", b"e")


def test_thousand_handshakes_agree():
    rnd = random.Random(761)
    pol = AlgorithmPolicy((HYBRID_KEX, CLASSICAL_KEX))
    for _ in range(1000):
        t = simulate_handshake(pol, pol, rnd.getrandbits(64), rnd.getrandbits(64))
        assert t.agreed and len(t.final_key) == 64
        assert [s for s, _ in t.steps] == list(STEP_ORDER)


def test_distinct_seeds_distinct_keys():
    pol = AlgorithmPolicy((HYBRID_KEX,))
    keys = {simulate_handshake(pol, pol, i, 10_000 + i).final_key for i in range(200)}
    assert len(keys) == 200


def _hamming(a: bytes, b: bytes) -> int:
    return bin(int.from_bytes(a, "big") ^ int.from_bytes(b, "big")).count("1")


def test_avalanche():
    rnd = random.Random(25519)
    dists = []
    for _ in range(500):
        kem, ecdh = rnd.randbytes(32), rnd.randbytes(32)
        which, bit = rnd.randrange(2), rnd.randrange(256)
        flipped = bytearray(kem if which == 0 else ecdh)
        flipped[bit // 8] ^= 1 << (bit % 8)
        other = hybrid_combine(bytes(flipped), ecdh) if which == 0 else hybrid_combine(kem, bytes(flipped))
        dists.append(_hamming(hybrid_combine(kem, ecdh), other))
    assert sum(dists) / len(dists) > 200


def test_classical_fallback_hashes_dh_only():
    t = simulate_handshake(AlgorithmPolicy.parse("classical"), AlgorithmPolicy.parse("pqc,classical"), 1, 2)
    assert t.negotiated_kex == CLASSICAL_KEX and t.agreed
    assert dict(t.steps[2][1])["secrets"] == ["ecdh"]
    assert len(t.final_key) == 64


def test_negotiate_client_preference():
    c = AlgorithmPolicy((CLASSICAL_KEX, HYBRID_KEX))
    s = AlgorithmPolicy((HYBRID_KEX, CLASSICAL_KEX))
    assert negotiate(c, s) == CLASSICAL_KEX
    assert negotiate(s, c) == HYBRID_KEX
    assert negotiate(c, AlgorithmPolicy(("diffie-hellman-group14-sha256",))) is None


def test_negotiation_failure():
    with pytest.raises(NegotiationFailure):
        simulate_handshake(AlgorithmPolicy.parse("pqc"), AlgorithmPolicy.parse("classical"), 1, 2)


def test_policy_validation():
    with pytest.raises(ValueError):
        AlgorithmPolicy(())
    with pytest.raises(ValueError):
        AlgorithmPolicy.parse("pqc,hybrid")
    assert AlgorithmPolicy.parse("pqc, classical").without(HYBRID_KEX).kex == (CLASSICAL_KEX,)


def _as_observation(t, hour, banner):
    conn = ConnTuple(1_709_251_200_000_000 + hour * 3_600_000_000, ipaddress.ip_address("192.0.2.77"), 50000 + hour,
                     ipaddress.ip_address("198.51.100.77"), 22, f"Creplay{hour:011d}")
    return SshObservation(conn, banner, "SSH-2.0-OpenSSH_9.6", "chacha20-poly1305@openssh.com",
                          "hmac-sha2-256-etm@openssh.com", t.negotiated_kex, "ssh-ed25519")


def test_downgrade_replay_end_to_end(registry):
    """A server that stops offering the hybrid kex mid-stream raises exactly one alert."""
    client = AlgorithmPolicy.parse("pqc,classical")
    server = AlgorithmPolicy.parse("pqc,classical")
    stripped = server.without(HYBRID_KEX)
    timeline = [(0, server), (1, server), (2, stripped), (3, stripped), (4, stripped)]
    obs = [_as_observation(simulate_handshake(client, srv, h, h + 100), h, "SSH-2.0-OpenSSH_9.6")
           for h, srv in timeline]
    assert [o.kex_alg for o in obs] == [HYBRID_KEX] * 2 + [CLASSICAL_KEX] * 3
    (alert,) = detect_downgrades(obs, registry)
    assert alert.fallback_kex == CLASSICAL_KEX
