"""Writes dataset.jsonl and expected_table.json for the scoring fixture test.

Each row records, next to the model outputs, whether each output is
equivalent to the reference ("fits"), decided by hand. The expected table
is computed here from those hand-made verdicts, independently of the Rust
equivalence checker.
"""

import json
from pathlib import Path

HERE = Path(__file__).parent

TASKS = {
    "R1": (["a", "b"], "ab . REP(b)"),
    "R4": (["a", "b"], "REP(EVEN, a) . REP(ODD, b)"),
    "C1": (["a", "b"], "COUNT(b) >= COUNT(a)"),
    "C2": (["a", "b"], "EXISTS i [REP(=i, a) . REP(=i, b)]"),
}

# (text, fits) pairs; fits is True / False, or "bad" for unparseable text.
M3 = {
    "R1": [("ab . REP(b)", True), ("a . REP(>=1, b)", True), ("REP(ab)", False),
           ("a . REP(b)", False), ("REP(ab", "bad"), ("ERROR", False)],
    "R4": [("REP(EVEN, a) . b . REP(EVEN, b)", True), ("REP(a) . REP(b)", False),
           ("REP(EVEN, a) . REP(EVEN, b)", False), ("REP(EVEN a)", "bad")],
    "C1": [("!(COUNT(a) > COUNT(b))", True), ("COUNT(b) > COUNT(a)", False),
           ("COUNT(a) <= COUNT(b)", True), ("COUNT(b) >=", "bad")],
    "C2": [("EXISTS j [REP(=j, a) . REP(=j, b)]", True), ("REP(a) . REP(b)", False),
           ("EXISTS i [REP(=i, a) . REP(=i+1, b)]", False), ("ERROR: not expressible", False)],
}
# regular expressions for R tasks; grammar text for C tasks (never parsed)
M2 = {
    "R1": [("abb*", True), ("a(b)(b)*", True), ("(ab)*", False), ("ab(", "bad")],
    "R4": [("(aa)*b(bb)*", True), ("a*b*", False), ("(aa)*(bb)*", False)],
    "C1": [("S -> S S | b S a | a S b | b S | eps", None)],
    "C2": [("S -> a S b | eps", None)],
}

rows = []
for k in range(40):
    task = ["R1", "R4", "C1", "C2"][k % 4]
    alphabet, reference = TASKS[task]
    category = [1, 1, 2, 3, 4, 1, 3][k % 7]
    m3_text, m3_fits = M3[task][(k // 4 + k) % len(M3[task])]
    m2_text, m2_fits = M2[task][(k // 4) % len(M2[task])]
    m1 = ["yes", "No.", "YES, it fits", "maybe"][(3 * k + k // 4) % 4]
    outputs = {"m1": m1, "m2": m2_text, "m3": m3_text}
    if k % 11 == 10:
        del outputs["m2"]
    if k % 13 == 12:
        del outputs["m1"]
    ann = {}
    if k % 3 == 0:
        ann["semanticCorrect"] = m3_fits is True
        ann["syntacticMatch"] = k % 2 == 0
    if k % 5 == 0:
        ann["m2SemanticCorrect"] = k % 10 == 0
        ann["m2SyntacticMatch"] = True
    if task.startswith("C") and k % 4 != 3:
        ann["m2MatchesReference"] = k % 8 < 4
    row = {
        "id": f"d{k:02}", "taskId": task, "format": "Set", "alphabet": alphabet,
        "referenceNile": reference, "description": f"description {k}",
        "category": category, "modelOutputs": outputs,
    }
    if ann:
        row["annotations"] = ann
    rows.append((row, m2_fits, m3_fits))

# one excluded row
excluded = dict(rows[0][0], id="x1", category=5)
lines = [json.dumps(r) for r, _, _ in rows]
lines.insert(7, json.dumps(excluded))
lines.insert(12, '{"id": "broken"')
lines.insert(20, json.dumps(dict(rows[1][0], id="x2", category=9)))


def yes_no(text):
    if text is None:
        return "missing"
    word = ""
    for ch in text.strip():
        if not ch.isalpha():
            break
        word += ch
    return {"yes": True, "true": True, "no": False, "false": False}.get(word.lower(), "bad")


def representation(text, fits):
    if text is None:
        return "missing"
    if text.strip().upper().startswith("ERROR"):
        return False
    return fits


def acceptable(category, fits):
    if fits not in (True, False):
        return False
    return category == 2 or fits == (category == 1)


columns = ["all", "regular", "context-free", "C1", "C2", "R1", "R4"]
metrics = ["rq1_m1", "rq1_m2", "rq1_m3", "rq2_m2", "rq2_m3", "rq3_m2", "rq3_m3"]
counts = {m: [0] * len(columns) for m in metrics}
totals = [0] * len(columns)
parse_failures = {"m2": 0, "m3": 0}
unanswered = {"m1": 0, "m2": 0, "m3": 0}
for row, m2_fits, m3_fits in rows:
    c = row["category"]
    out = row["modelOutputs"]
    ann = row.get("annotations", {})
    regular = row["taskId"].startswith("R")
    f1 = yes_no(out.get("m1"))
    f3 = representation(out.get("m3"), m3_fits)
    if regular:
        f2 = representation(out.get("m2"), m2_fits)
    elif "m2" not in out:
        f2 = "missing"
    elif out["m2"].strip().upper().startswith("ERROR"):
        f2 = False
    else:
        f2 = ann.get("m2MatchesReference", "bad")
    rq2_m2 = ann.get("m2SemanticCorrect", c == 1 and f2 is True) and "m2" in out
    rq2_m3 = ann.get("semanticCorrect", c == 1 and f3 is True) and "m3" in out
    hits = [acceptable(c, f1), acceptable(c, f2), acceptable(c, f3), rq2_m2, rq2_m3,
            rq2_m2 and ann.get("m2SyntacticMatch") is True,
            rq2_m3 and ann.get("syntacticMatch") is True]
    for col in (0, 1 if regular else 2, columns.index(row["taskId"])):
        totals[col] += 1
        for m, h in zip(metrics, hits):
            counts[m][col] += int(bool(h))
    parse_failures["m2"] += int(regular and f2 == "bad")
    parse_failures["m3"] += int(f3 == "bad")
    for key in unanswered:
        unanswered[key] += int(key not in out)

expected = {
    "rows": len(rows),
    "diagnosticLines": [13, 21],
    "columns": columns,
    "totals": totals,
    "counts": counts,
    "excluded": 1,
    "parseFailures": parse_failures,
    "unanswered": unanswered,
}
(HERE / "dataset.jsonl").write_text("\n".join(lines) + "\n")
(HERE / "expected_table.json").write_text(json.dumps(expected, indent=2) + "\n")
