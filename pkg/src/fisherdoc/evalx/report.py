"""TSV and Markdown emission for classification and clustering tables.

Accuracies and agreement scores print in percent with one decimal, matching
the result-table conventions."""


def cv_rows(reports, dataset=""):
    rows = []
    for r in reports:
        mean, std = r.pct()
        rows.append({
            "model": r.tag, "dataset": dataset,
            "mean": f"{mean:.1f}", "std": f"{std:.1f}",
            "C": str(r.params.get("C", "")),
            "epochs": str(r.params.get("epochs", "")),
        })
    return rows


def cluster_rows(reports, dataset=""):
    rows = []
    for r in reports:
        ari_m, ari_s, nmi_m, nmi_s = r.pct()
        rows.append({
            "model": r.tag, "dataset": dataset,
            "ari_mean": f"{ari_m:.1f}", "ari_std": f"{ari_s:.1f}",
            "nmi_mean": f"{nmi_m:.1f}", "nmi_std": f"{nmi_s:.1f}",
        })
    return rows


def to_tsv(rows, columns):
    lines = ["\t".join(columns)]
    for row in rows:
        lines.append("\t".join(row.get(c, "") for c in columns))
    return "\n".join(lines) + "\n"


def to_markdown(rows, columns):
    lines = ["| " + " | ".join(columns) + " |",
             "|" + "|".join([" --- "] * len(columns)) + "|"]
    for row in rows:
        lines.append("| " + " | ".join(row.get(c, "") for c in columns) + " |")
    return "\n".join(lines) + "\n"


CV_COLUMNS = ("model", "dataset", "mean", "std", "C", "epochs")
CLUSTER_COLUMNS = ("model", "dataset", "ari_mean", "ari_std", "nmi_mean", "nmi_std")
