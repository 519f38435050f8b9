rewriter_version = 1
coproduct_version = 1
dualization_version = 1
margolis_version = 0


def as_dict() -> dict[str, int]:
    return {
        "rewriter": rewriter_version,
        "coproduct": coproduct_version,
        "dualization": dualization_version,
        "margolis": margolis_version,
    }
