"""Independent reference implementations used as test oracles."""

import ipaddress
import random

from pqcmeter.asn import AsEntry


def linear_scan(entries, ip):
    """Reference: most specific covering prefix, later rows winning exact ties."""
    ip = ipaddress.ip_address(ip)
    best = None
    for e in entries:
        if e.prefix.version == ip.version and ip in e.prefix:
            if best is None or e.prefix.prefixlen >= best.prefix.prefixlen:
                best = e
    return best


def random_net(rnd: random.Random, v6: bool, anchor: int | None):
    width = 128 if v6 else 32
    plen = rnd.randint(0, 48 if v6 else 32)
    # half of the prefixes nest around a shared anchor so overlaps are common
    bits = anchor if anchor is not None and rnd.random() < 0.5 else rnd.getrandbits(width)
    mask = ((1 << plen) - 1) << (width - plen) if plen else 0
    cls = ipaddress.IPv6Network if v6 else ipaddress.IPv4Network
    return cls((bits & mask, plen))


def random_table(rnd: random.Random):
    anchors = {False: rnd.getrandbits(32), True: rnd.getrandbits(128)}
    entries = []
    for i in range(rnd.randint(0, 25)):
        v6 = rnd.random() < 0.4
        entries.append(AsEntry(random_net(rnd, v6, anchors[v6]), rnd.randint(1, 65535), f"org{i}"))
    return entries, anchors


def random_ip(rnd: random.Random, anchors, entries):
    v6 = rnd.random() < 0.4
    r = rnd.random()
    if r < 0.4 and entries:
        net = rnd.choice(entries).prefix
        return net.network_address + rnd.randrange(min(net.num_addresses, 2 ** 64))
    if r < 0.7:
        width = 128 if v6 else 32
        flip = rnd.randrange(width)
        value = anchors[v6] ^ (1 << flip)
        return ipaddress.IPv6Address(value) if v6 else ipaddress.IPv4Address(value)
    return ipaddress.IPv6Address(rnd.getrandbits(128)) if v6 else ipaddress.IPv4Address(rnd.getrandbits(32))
