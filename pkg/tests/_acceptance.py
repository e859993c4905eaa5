"""Collects one verdict per acceptance criterion for the terminal summary."""

RESULTS: dict[int, list[tuple[str, bool, str]]] = {}


def record(criterion: int, label: str, ok: bool, detail: str) -> bool:
    RESULTS.setdefault(criterion, []).append((label, bool(ok), detail))
    return bool(ok)


def summary_lines() -> list[str]:
    lines = []
    for k in range(1, 11):
        parts = RESULTS.get(k)
        if not parts:
            lines.append(f"ACCEPTANCE {k:2d}: NOT RUN")
            continue
        ok = all(p[1] for p in parts)
        detail = "; ".join(f"{lab}: {'pass' if o else 'FAIL'} ({d})" for lab, o, d in parts)
        lines.append(f"ACCEPTANCE {k:2d}: {'PASS' if ok else 'FAIL'} | {detail}")
    return lines
