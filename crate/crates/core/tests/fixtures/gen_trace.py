"""Reference trace for the basic keystream generator, computed with Python
arbitrary-precision integers. Regenerate with: python3 gen_trace.py > generator_trace.txt
"""

TWO64 = 1 << 64
MASK61 = (1 << 61) - 1


def stm(x, gamma):
    if x <= gamma:
        return min((x * TWO64) // gamma, TWO64 - 1)
    return ((TWO64 - x) * TWO64) // (TWO64 - gamma)


def lfsr(s):
    fb = ((s >> 60) ^ (s >> 59) ^ (s >> 45) ^ (s >> 44)) & 1
    return ((s << 1) | fb) & MASK61


GAMMA = 0x9E3779B97F4A7C15
X0 = 0x3C6EF372FE94F82A
Y0 = 0x0DAA66D2C7DD3F41

x, y = X0, Y0
print(f"# key {GAMMA:016x} {X0:016x} {Y0:016x}")
for _ in range(1000):
    x = stm(x, GAMMA)
    out = x & 0xFFFF
    y = lfsr(y)
    x ^= y & 0xFF
    print(f"{out:04x}")
