"""Minimal form of a six-outcome dichotomy and the exact channels to and from it."""

from dichotomy.classical import ClassicalDichotomy, build_channels, lorenz_curve, minimal_form


def main():
    d = ClassicalDichotomy(["1/12", "1/4", "1/4", "1/12", "1/12", "1/4"],
                           ["0", "1/24", "1/12", "1/6", "1/6", "13/24"])
    mf = minimal_form(d)
    print("likelihood-ratio blocks:", mf.blocks)
    print("p~ =", [str(x) for x in mf.p_tilde])
    print("q~ =", [str(x) for x in mf.q_tilde])
    T, R = build_channels(d, mf)
    print("T p == p~ :", T @ d.p == mf.p_tilde, "  R p~ == p :", R @ mf.p_tilde == d.p)
    print("Lorenz vertices:", [(str(x), str(y)) for x, y in lorenz_curve(d, simplify=True).points])


if __name__ == "__main__":
    main()
