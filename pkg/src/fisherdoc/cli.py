"""Command-line orchestration: dataset prep, model training, Fisher-vector
computation, task evaluation, and report emission.

Every subcommand resolves its parameters as CLI flag > config-file value >
built-in default, hashes the effective configuration, and records each
artifact it writes in ``<out>/manifest.jsonl``.  Outputs carry no
timestamps, so rerunning with the same configuration reproduces the same
bytes.
"""

import argparse
import configparser
import hashlib
import json
import logging
import os
import platform
import sys

import numpy as np
import scipy
import scipy.sparse as sp

from . import __version__, baselines, embeddings
from .accel import backend_name
from .corpus import (
    Topic,
    TrecCollection,
    build_tokenized_corpus,
    load_labeled_corpus,
    load_trec_collection,
    load_trec_docs,
    read_corpus_jsonl,
    write_corpus_jsonl,
)
from .docvecs import load_docvec_batch, save_docvec_batch
from .evalx import (
    CLUSTER_COLUMNS,
    CV_COLUMNS,
    best_report,
    cluster_eval,
    cluster_rows,
    cv10,
    cv_rows,
    scan_C,
    scan_epochs,
    to_markdown,
    to_tsv,
)
from .fisher import fv, fv_corpus, load_fv_batch, save_fv_batch
from .mixtures import fit_gmm, fit_movmf, load_mixture, mixture_fitting_set, save_mixture
from .retrieval import (
    build_index,
    evaluate_run,
    fuse_run,
    grid_scan,
    load_index,
    save_index,
    search_topics,
    tokenize_query,
    write_trec_run,
)

log = logging.getLogger(__name__)

VALID_DIMS = (20, 50, 100)
TRAIN_MODELS = ("tfidf", "lsi", "lda", "cbow", "pv-dbow", "pv-dm")
FEATURE_MODELS = TRAIN_MODELS + ("fv-gmm", "fv-vmf")
FUSE_MODELS = ("cbow", "fv-gmm", "fv-vmf")
TOPIC_FIELDS = ("title", "desc", "title+desc")

SEARCH_COLUMNS = ("tag", "k1", "b", "map", "map_ci95", "p20", "p20_ci95", "config")
FUSE_COLUMNS = ("tag", "lambda", "k1", "b", "map", "map_ci95", "p20", "p20_ci95",
                "missing", "config")


class ConfigError(ValueError):
    """Invalid or unusable configuration; exits 2."""


class ArtifactMissing(RuntimeError):
    """An upstream artifact has not been produced yet; exits 1."""


# ---------------------------------------------------------------------------
# configuration resolution

def _load_config(path):
    cp = configparser.ConfigParser(interpolation=None)
    if path is not None:
        if not os.path.exists(path):
            raise ConfigError(f"config: file not found: {path}")
        try:
            cp.read(path)
        except configparser.Error as exc:
            raise ConfigError(f"config: {exc}")
    return cp


def _cast(raw, cast, field):
    try:
        if cast is bool:
            val = raw.strip().lower()
            if val in ("1", "true", "yes", "on"):
                return True
            if val in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        return cast(raw)
    except (TypeError, ValueError):
        raise ConfigError(f"{field}: cannot parse {raw!r}")


def _resolve(flag_value, cfg, section, key, default, cast=str):
    """flag > config-file value > default."""
    if flag_value is not None:
        return flag_value
    if cfg.has_option(section, key):
        return _cast(cfg.get(section, key), cast, f"{section}.{key}")
    return default


def _float_list(raw):
    return tuple(float(v) for v in raw.replace(",", " ").split())


def _int_list(raw):
    return tuple(int(v) for v in raw.replace(",", " ").split())


def _check_dim(d):
    if d not in VALID_DIMS:
        raise ConfigError(
            f"dim: must be one of {', '.join(map(str, VALID_DIMS))} (got {d})"
        )
    return d


def _check_lambda(lam):
    if not 0.0 <= lam <= 1.0:
        raise ConfigError(f"lambda: must be in [0, 1] (got {lam})")
    return lam


def _check_bm25(k1, b):
    if k1 < 0:
        raise ConfigError(f"k1: must be >= 0 (got {k1})")
    if not 0.0 <= b <= 1.0:
        raise ConfigError(f"b: must be in [0, 1] (got {b})")


def _out_dir(args, cfg):
    out = _resolve(args.out, cfg, "run", "out", "runs")
    os.makedirs(out, exist_ok=True)
    return out


def _data_dir(args, cfg):
    return _resolve(args.data, cfg, "run", "data",
                    os.environ.get("FISHERDOC_DATA", "."))


def _seed(args, cfg):
    return _resolve(args.seed, cfg, "run", "seed", 0, cast=int)


# ---------------------------------------------------------------------------
# artifacts and the manifest

def _corpus_path(out, name):
    return os.path.join(out, f"{name}.corpus.jsonl")


def _model_path(out, name, model):
    return os.path.join(out, f"{name}.{model}.fdv")


def _require(path, producer):
    if not os.path.exists(path):
        raise ArtifactMissing(
            f"missing artifact {path}; run `fisherdoc {producer}` first"
        )
    return path


def _config_hash(params):
    blob = json.dumps(params, sort_keys=True, ensure_ascii=False)
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:12]


def _versions():
    return {
        "fisherdoc": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "backend": backend_name(),
    }


def _record_artifacts(out, subcommand, params, artifacts, seed=None):
    """Merge manifest entries for ``artifacts`` and rewrite the manifest
    deterministically (sorted by artifact name, canonical JSON)."""
    manifest = os.path.join(out, "manifest.jsonl")
    entries = {}
    if os.path.exists(manifest):
        with open(manifest, encoding="utf-8") as fh:
            for line in fh:
                if line.strip():
                    rec = json.loads(line)
                    entries[rec["artifact"]] = rec
    h = _config_hash({"subcommand": subcommand, **params})
    for art in artifacts:
        entries[os.path.basename(art)] = {
            "artifact": os.path.basename(art),
            "subcommand": subcommand,
            "config_hash": h,
            "seed": seed,
            "params": params,
            "versions": _versions(),
        }
    with open(manifest, "w", encoding="utf-8") as fh:
        for name in sorted(entries):
            fh.write(json.dumps(entries[name], sort_keys=True, ensure_ascii=False))
            fh.write("\n")
    return h


def _manifest_hash(out, artifact):
    manifest = os.path.join(out, "manifest.jsonl")
    if not os.path.exists(manifest):
        return None
    with open(manifest, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                rec = json.loads(line)
                if rec["artifact"] == os.path.basename(artifact):
                    return rec["config_hash"]
    return None


def _file_sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_text(path, text):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


# ---------------------------------------------------------------------------
# prep

def cmd_prep(args, cfg):
    out = _out_dir(args, cfg)
    data = _data_dir(args, cfg)
    fmt = _resolve(args.format, cfg, "prep", "format", None)
    if fmt not in ("subj_sent", "newsgroups", "trec"):
        raise ConfigError(
            f"format: must be subj_sent, newsgroups, or trec (got {fmt})"
        )
    strip = _resolve(args.strip_headers or None, cfg, "prep", "strip_headers",
                     False, cast=bool)
    src = args.input if args.input is not None else os.path.join(data, args.dataset)
    if not os.path.exists(src):
        raise ConfigError(f"input: path does not exist: {src}")

    if fmt == "trec":
        corpus = build_tokenized_corpus(load_trec_docs(src))
    else:
        disk_fmt = "newsgroups_bydate" if fmt == "newsgroups" else fmt
        corpus = load_labeled_corpus(src, format=disk_fmt, strip_headers=strip)

    path = _corpus_path(out, args.dataset)
    write_corpus_jsonl(corpus, path)
    params = {"dataset": args.dataset, "format": fmt, "input": os.path.abspath(src),
              "strip_headers": strip, "n_docs": len(corpus)}
    _record_artifacts(out, "prep", params, [path])
    print(f"wrote {path} ({len(corpus)} docs, vocab {len(corpus.vocab_counts)})")
    return 0


# ---------------------------------------------------------------------------
# train

def _train_params(args, cfg):
    p = {
        "dim": _resolve(getattr(args, "dim", None), cfg, "train", "dim", 50, int),
        "window": _resolve(getattr(args, "window", None), cfg, "train", "window",
                           5, int),
        "negative": _resolve(getattr(args, "negative", None), cfg, "train",
                             "negative", 5, int),
        "epochs": _resolve(getattr(args, "epochs", None), cfg, "train", "epochs",
                           5, int),
        "max_features": _resolve(None, cfg, "train", "max_features", 5000, int),
        "passes": _resolve(None, cfg, "train", "passes", 20, int),
        "rank_by": _resolve(None, cfg, "train", "rank_by", "max"),
        "beta": _resolve(None, cfg, "train", "beta", 0.01, float),
    }
    return p


def _fit_model(model, corpus, p, seed):
    if model == "tfidf":
        return baselines.fit_tfidf(corpus, max_features=p["max_features"],
                                   rank_by=p["rank_by"])
    if model == "lsi":
        _check_dim(p["dim"])
        return baselines.fit_lsi(corpus, d=p["dim"], max_features=p["max_features"])
    if model == "lda":
        _check_dim(p["dim"])
        return baselines.fit_lda(corpus, d=p["dim"], passes=p["passes"],
                                 beta=p["beta"], seed=seed)
    if model == "cbow":
        _check_dim(p["dim"])
        return embeddings.train_cbow(corpus, d=p["dim"], window=p["window"],
                                     negative=p["negative"], epochs=p["epochs"],
                                     seed=seed)
    # pv-dbow / pv-dm
    _check_dim(p["dim"])
    mode = "DBOW" if model == "pv-dbow" else "DM"
    return embeddings.train_pv(corpus, mode=mode, d=p["dim"], window=p["window"],
                               negative=p["negative"], epochs=p["epochs"], seed=seed)


def _save_model(model, fitted, path):
    if model == "tfidf":
        baselines.save_tfidf(fitted, path)
    elif model == "lsi":
        baselines.save_lsi(fitted, path)
    elif model == "lda":
        baselines.save_lda(fitted, path)
    elif model == "cbow":
        embeddings.save_embeddings(fitted, path)
    else:
        embeddings.save_pv_model(fitted, path)


def cmd_train(args, cfg):
    out = _out_dir(args, cfg)
    seed = _seed(args, cfg)
    corpus = read_corpus_jsonl(_require(_corpus_path(out, args.corpus), "prep"))
    p = _train_params(args, cfg)
    fitted = _fit_model(args.model, corpus, p, seed)
    path = _model_path(out, args.corpus, args.model)
    _save_model(args.model, fitted, path)
    params = {"corpus": args.corpus, "model": args.model, **p}
    _record_artifacts(out, "train", params, [path], seed=seed)
    print(f"wrote {path}")
    return 0


# ---------------------------------------------------------------------------
# fit-mixture

def cmd_fit_mixture(args, cfg):
    out = _out_dir(args, cfg)
    seed = _seed(args, cfg)
    K = _resolve(args.components, cfg, "mixture", "components", 15, int)
    if K < 1:
        raise ConfigError(f"components: must be >= 1 (got {K})")
    weighted = _resolve(args.weighted or None, cfg, "mixture", "weighted",
                        False, cast=bool)
    n_init = _resolve(None, cfg, "mixture", "n_init", 10, int)

    emb = embeddings.load_embeddings(
        _require(_model_path(out, args.corpus, "cbow"), "train")
    )
    vocab_counts = None
    if weighted:
        corpus = read_corpus_jsonl(_require(_corpus_path(out, args.corpus), "prep"))
        vocab_counts = corpus.vocab_counts
    X, w = mixture_fitting_set(emb, vocab_counts=vocab_counts,
                               mode="weighted" if weighted else "unique")
    if args.family == "gmm":
        fitted = fit_gmm(X, K=K, n_init=n_init, seed=seed, weights=w)
    else:
        fitted = fit_movmf(X, K=K, n_init=n_init, seed=seed, weights=w)
    path = _model_path(out, args.corpus, args.family)
    save_mixture(fitted, path)
    params = {"corpus": args.corpus, "family": args.family, "components": K,
              "weighted": weighted, "n_init": n_init}
    _record_artifacts(out, "fit-mixture", params, [path], seed=seed)
    print(f"wrote {path} (K={K}, final ll {fitted.log_likelihood:.4f})")
    return 0


# ---------------------------------------------------------------------------
# fv

def cmd_fv(args, cfg):
    out = _out_dir(args, cfg)
    power = _resolve(args.power or None, cfg, "fv", "power", False, cast=bool)
    corpus = read_corpus_jsonl(_require(_corpus_path(out, args.corpus), "prep"))
    emb = embeddings.load_embeddings(
        _require(_model_path(out, args.corpus, "cbow"), "train")
    )
    mixture = load_mixture(
        _require(_model_path(out, args.corpus, args.family), "fit-mixture")
    )
    doc_ids, matrix, flagged = fv_corpus(corpus, emb, mixture, power=power, l2=True)
    family = "GMM" if args.family == "gmm" else "VMF"
    normalized = ("power", "l2") if power else ("l2",)
    path = _model_path(out, args.corpus, f"fv-{args.family}")
    save_fv_batch(path, doc_ids, matrix, family, normalized, flagged)
    params = {"corpus": args.corpus, "family": args.family, "power": power,
              "n_docs": len(doc_ids), "fv_dim": int(matrix.shape[1])}
    _record_artifacts(out, "fv", params, [path])
    print(f"wrote {path} ({matrix.shape[0]} x {matrix.shape[1]}, "
          f"{len(flagged)} flagged)")
    return 0


# ---------------------------------------------------------------------------
# features shared by classify / cluster

def _aligned_pv(pv, corpus, producer="train"):
    missing = [d.id for d in corpus.docs if d.id not in pv._doc_index]
    if missing:
        raise ArtifactMissing(
            f"paragraph-vector artifact lacks {len(missing)} corpus docs "
            f"(e.g. {missing[0]!r}); re-run `fisherdoc {producer}`"
        )
    return np.vstack([pv.vector(d.id) for d in corpus.docs])


def _features(out, name, model, corpus, seed, want_infer=False):
    """(X, X_test or None) for a corpus under a trained model artifact."""
    if model == "tfidf":
        m = baselines.load_tfidf(_require(_model_path(out, name, "tfidf"), "train"))
        return baselines.transform_tfidf_corpus(m, corpus), None
    if model == "lsi":
        m = baselines.load_lsi(_require(_model_path(out, name, "lsi"), "train"))
        return baselines.transform_lsi_corpus(m, corpus), None
    if model == "lda":
        m = baselines.load_lda(_require(_model_path(out, name, "lda"), "train"))
        return baselines.infer_lda_corpus(m, corpus, seed=seed), None
    if model == "cbow":
        emb = embeddings.load_embeddings(
            _require(_model_path(out, name, "cbow"), "train")
        )
        X = np.vstack([embeddings.mean_pool(d.tokens, emb) for d in corpus.docs])
        return X, None
    if model in ("pv-dbow", "pv-dm"):
        pv = embeddings.load_pv_model(_require(_model_path(out, name, model), "train"))
        X = _aligned_pv(pv, corpus)
        X_test = None
        if want_infer:
            X_test = np.vstack([pv.infer(d.tokens) for d in corpus.docs])
        return X, X_test
    if model in ("fv-gmm", "fv-vmf"):
        ids, M, _meta = load_fv_batch(_require(_model_path(out, name, model), "fv"))
        row_of = {did: i for i, did in enumerate(ids)}
        missing = [d.id for d in corpus.docs if d.id not in row_of]
        if missing:
            raise ArtifactMissing(
                f"fv batch lacks {len(missing)} corpus docs (e.g. {missing[0]!r}); "
                "re-run `fisherdoc fv`"
            )
        return M[[row_of[d.id] for d in corpus.docs]], None
    raise ConfigError(f"model: unknown model {model!r}")


def _binary_labels(corpus):
    y = corpus.labels()
    if any(v is None for v in y):
        raise ConfigError("labels: corpus has unlabeled documents")
    classes = sorted(set(y))
    if classes != [0, 1]:
        raise ConfigError(f"labels: classification needs binary 0/1 labels, "
                          f"got classes {classes}")
    return np.asarray(y)


# ---------------------------------------------------------------------------
# classify

def _curve_dat(curve, x):
    lines = [f"# {x} accuracy_mean accuracy_std"]
    for rep in curve:
        mean, std = rep.pct()
        lines.append(f"{rep.params[x]} {mean:.1f} {std:.1f}")
    return "\n".join(lines) + "\n"


def cmd_classify(args, cfg):
    out = _out_dir(args, cfg)
    seed = _seed(args, cfg)
    scan = _resolve(args.scan, cfg, "classify", "scan", "C")
    if scan not in ("C", "epochs"):
        raise ConfigError(f"scan: must be C or epochs (got {scan})")
    c_grid = _resolve(None, cfg, "classify", "c_grid", None, cast=_float_list)
    epoch_grid = _resolve(None, cfg, "classify", "epoch_grid", None, cast=_int_list)
    fixed_c = _resolve(args.C, cfg, "classify", "c", 1.0, float)

    corpus = read_corpus_jsonl(_require(_corpus_path(out, args.corpus), "prep"))
    y = _binary_labels(corpus)
    tag = args.model

    if scan == "epochs":
        if args.model not in ("cbow", "pv-dbow", "pv-dm"):
            raise ConfigError("scan: epochs scan applies to cbow, pv-dbow, pv-dm")
        p = _train_params(args, cfg)
        _check_dim(p["dim"])

        def train_fn(epochs):
            p2 = dict(p, epochs=epochs)
            fitted = _fit_model(args.model, corpus, p2, seed)
            if args.model == "cbow":
                X = np.vstack(
                    [embeddings.mean_pool(d.tokens, fitted) for d in corpus.docs]
                )
                return X, y
            X = _aligned_pv(fitted, corpus)
            X_test = np.vstack([fitted.infer(d.tokens) for d in corpus.docs])
            return X, y, X_test

        kwargs = {} if epoch_grid is None else {"grid": epoch_grid}
        curve = scan_epochs(train_fn, C=fixed_c, seed=seed, tag=tag, **kwargs)
        xkey = "epochs"
        train_p = p
    else:
        X, X_test = _features(out, args.corpus, args.model, corpus, seed,
                              want_infer=True)
        if args.C is not None:
            curve = [cv10(X, y, C=fixed_c, seed=seed, tag=tag, X_test=X_test)]
        else:
            kwargs = {} if c_grid is None else {"grid": c_grid}
            curve = scan_C(X, y, seed=seed, tag=tag, X_test=X_test, **kwargs)
        xkey = "C"
        train_p = None

    rows = cv_rows(curve, dataset=args.corpus)
    best = best_report(curve)
    params = {"corpus": args.corpus, "model": args.model, "scan": scan,
              "C": fixed_c if scan == "epochs" or args.C is not None else None,
              "best": {"mean": best.pct()[0], **best.params}}
    if train_p:
        params["train"] = train_p

    stem = f"classify.{args.corpus}.{args.model}"
    if scan == "epochs":
        stem += ".epochs"
    tsv_path = os.path.join(out, f"{stem}.tsv")
    dat_path = os.path.join(out, f"{stem}.dat")
    h = _record_artifacts(out, "classify", params, [tsv_path, dat_path], seed=seed)
    for row in rows:
        row["config"] = h
    _write_text(tsv_path, to_tsv(rows, CV_COLUMNS + ("config",)))
    _write_text(dat_path, _curve_dat(curve, xkey))
    mean, std = best.pct()
    print(f"wrote {tsv_path} (best {mean:.1f} +/- {std:.1f} at "
          f"{xkey}={best.params[xkey]})")
    return 0


# ---------------------------------------------------------------------------
# cluster

def cmd_cluster(args, cfg):
    out = _out_dir(args, cfg)
    seed = _seed(args, cfg)
    runs = _resolve(args.runs, cfg, "cluster", "runs", 10, int)
    spherical = _resolve(args.spherical or None, cfg, "cluster", "spherical",
                         False, cast=bool)
    corpus = read_corpus_jsonl(_require(_corpus_path(out, args.corpus), "prep"))
    y = corpus.labels()
    if any(v is None for v in y):
        raise ConfigError("labels: corpus has unlabeled documents")
    k = _resolve(args.k, cfg, "cluster", "k", len(set(y)), int)
    if k < 1:
        raise ConfigError(f"k: must be >= 1 (got {k})")

    X, _ = _features(out, args.corpus, args.model, corpus, seed)
    if sp.issparse(X):
        X = X.toarray()
    report = cluster_eval(X, y, k, runs=runs, seed=seed, tag=args.model,
                          spherical=spherical)
    rows = cluster_rows([report], dataset=args.corpus)
    params = {"corpus": args.corpus, "model": args.model, "k": k, "runs": runs,
              "spherical": spherical}
    tsv_path = os.path.join(out, f"cluster.{args.corpus}.{args.model}.tsv")
    h = _record_artifacts(out, "cluster", params, [tsv_path], seed=seed)
    for row in rows:
        row["config"] = h
    _write_text(tsv_path, to_tsv(rows, CLUSTER_COLUMNS + ("config",)))
    ari_m, _, nmi_m, _ = report.pct()
    print(f"wrote {tsv_path} (ARI {ari_m:.1f}, NMI {nmi_m:.1f})")
    return 0


# ---------------------------------------------------------------------------
# index / search / fuse

def _sidecar_path(out, coll):
    return os.path.join(out, f"{coll}.topics.json")


def _index_path(out, coll):
    return os.path.join(out, f"{coll}.index.fdv")


def cmd_index(args, cfg):
    out = _out_dir(args, cfg)
    data = _data_dir(args, cfg)

    def resolved(p, field):
        if p is None:
            raise ConfigError(f"{field}: required for index")
        full = p if os.path.isabs(p) else os.path.join(data, p)
        if not os.path.exists(full):
            raise ConfigError(f"{field}: path does not exist: {full}")
        return full

    doc_path = resolved(args.docs, "docs")
    topic_path = resolved(args.topics, "topics")
    qrels_path = resolved(args.qrels, "qrels")
    coll = load_trec_collection(doc_path, topic_path, qrels_path)
    index = build_index(coll.docs)

    ipath = _index_path(out, args.collection)
    save_index(index, ipath)
    spath = _sidecar_path(out, args.collection)
    sidecar = {
        "doc_path": os.path.abspath(doc_path),
        "topic_path": os.path.abspath(topic_path),
        "qrels_path": os.path.abspath(qrels_path),
        "topics": [{"topic_id": t.topic_id, "title": t.title,
                    "description": t.description} for t in coll.topics],
        "qrels": [[tid, doc, rel] for (tid, doc), rel in sorted(coll.qrels.items())],
        "n_docs": index.n_docs,
    }
    _write_text(spath, json.dumps(sidecar, sort_keys=True, ensure_ascii=False,
                                  indent=1) + "\n")
    params = {"collection": args.collection, "docs": sidecar["doc_path"],
              "topics": sidecar["topic_path"], "qrels": sidecar["qrels_path"],
              "n_docs": index.n_docs, "n_topics": len(coll.topics)}
    _record_artifacts(out, "index", params, [ipath, spath])
    print(f"wrote {ipath} ({index.n_docs} docs, {len(index.terms)} terms)")
    return 0


def _load_search_state(out, coll_name):
    index = load_index(_require(_index_path(out, coll_name), "index"))
    spath = _require(_sidecar_path(out, coll_name), "index")
    with open(spath, encoding="utf-8") as fh:
        sidecar = json.load(fh)
    topics = [Topic(**t) for t in sidecar["topics"]]
    qrels = {(tid, doc): int(rel) for tid, doc, rel in sidecar["qrels"]}
    coll = TrecCollection(docs=[], topics=topics, qrels=qrels)
    return index, coll, sidecar


def _search_params(args, cfg):
    k1 = _resolve(args.k1, cfg, "search", "k1", 1.2, float)
    b = _resolve(args.b, cfg, "search", "b", 0.75, float)
    _check_bm25(k1, b)
    top = _resolve(args.top, cfg, "search", "top", 1000, int)
    fields = _resolve(args.topic_fields, cfg, "search", "topic_fields", "title+desc")
    if fields not in TOPIC_FIELDS:
        raise ConfigError(f"topic-fields: must be one of {', '.join(TOPIC_FIELDS)} "
                          f"(got {fields})")
    return k1, b, top, fields


def _retrieval_row(report, extra=None):
    map_pct, map_ci, p20_pct, p20_ci = report.pct()
    row = {"tag": report.tag, "k1": f"{report.k1:g}", "b": f"{report.b:g}",
           "map": f"{map_pct:.2f}", "map_ci95": f"{map_ci:.2f}",
           "p20": f"{p20_pct:.2f}", "p20_ci95": f"{p20_ci:.2f}"}
    if extra:
        row.update(extra)
    return row


def _grid_dat(surface):
    lines = ["# k1 b map"]
    last_k1 = None
    for cell in surface:
        if last_k1 is not None and cell["k1"] != last_k1:
            lines.append("")
        last_k1 = cell["k1"]
        lines.append(f"{cell['k1']:.2f} {cell['b']:.2f} {cell['map']:.6f}")
    return "\n".join(lines) + "\n"


def cmd_search(args, cfg):
    out = _out_dir(args, cfg)
    k1, b, top, fields = _search_params(args, cfg)
    index, coll, _ = _load_search_state(out, args.collection)

    stem = f"search.{args.collection}.grid" if args.grid else f"search.{args.collection}"
    tsv_path = os.path.join(out, f"{stem}.tsv")
    artifacts = [tsv_path]
    rows = []
    if args.grid:
        scan = grid_scan(index, coll, top=top, fields=fields)
        dat_path = os.path.join(out, f"{args.collection}.grid.dat")
        _write_text(dat_path, _grid_dat(scan["surface"]))
        artifacts.append(dat_path)
        for tag, cell in (("bm25-default", scan["default"]), ("bm25-best", scan["best"])):
            run = search_topics(index, coll, k1=cell["k1"], b=cell["b"], top=top,
                                fields=fields)
            rows.append(_retrieval_row(
                evaluate_run(run, coll.qrels, cell["k1"], cell["b"], tag=tag)))
        params = {"collection": args.collection, "grid": True, "top": top,
                  "fields": fields, "n_cells": scan["n_cells"],
                  "best": scan["best"], "default": scan["default"]}
        summary = (f"grid {scan['n_cells']} cells, best map {scan['best']['map']:.4f} "
                   f"at k1={scan['best']['k1']:g} b={scan['best']['b']:g}")
    else:
        run = search_topics(index, coll, k1=k1, b=b, top=top, fields=fields)
        report = evaluate_run(run, coll.qrels, k1, b, tag="bm25")
        run_path = os.path.join(out, f"{args.collection}.bm25.run.txt")
        write_trec_run(run, run_path, tag="bm25")
        artifacts.append(run_path)
        rows.append(_retrieval_row(report))
        params = {"collection": args.collection, "grid": False, "k1": k1, "b": b,
                  "top": top, "fields": fields}
        map_pct, _, p20_pct, _ = report.pct()
        summary = f"MAP {map_pct:.2f}, P@20 {p20_pct:.2f}"

    h = _record_artifacts(out, "search", params, artifacts)
    for row in rows:
        row["config"] = h
    _write_text(tsv_path, to_tsv(rows, SEARCH_COLUMNS))
    print(f"wrote {tsv_path} ({summary})")
    return 0


def _doc_vectorizer(out, corpus_name, model):
    """tokens -> vector closure for the fusion models."""
    emb = embeddings.load_embeddings(
        _require(_model_path(out, corpus_name, "cbow"), "train")
    )
    if model == "cbow":
        return lambda tokens: embeddings.mean_pool(tokens, emb)
    family = model.split("-", 1)[1]
    mixture = load_mixture(
        _require(_model_path(out, corpus_name, family), "fit-mixture")
    )
    zero = np.zeros(mixture.K * mixture.d)

    def vectorize(tokens):
        X = embeddings.lookup_vectors(tokens, emb)
        if X.shape[0] == 0:
            return zero
        try:
            return fv(X, mixture, power=False, l2=True).values
        except ValueError:
            # all word vectors zero-norm (VMF drops them): no usable signal
            return zero

    return vectorize


def _artifact_hashes(out, corpus_name, model):
    paths = [_model_path(out, corpus_name, "cbow")]
    if model != "cbow":
        paths.append(_model_path(out, corpus_name, model.split("-", 1)[1]))
    return {os.path.basename(p): _file_sha256(p) for p in paths if os.path.exists(p)}


def cmd_fuse(args, cfg):
    out = _out_dir(args, cfg)
    k1, b, top, fields = _search_params(args, cfg)
    lam = _check_lambda(_resolve(args.lam, cfg, "fuse", "lambda", 0.5, float))
    model = _resolve(args.model, cfg, "fuse", "model", "cbow")
    if model not in FUSE_MODELS:
        raise ConfigError(f"model: must be one of {', '.join(FUSE_MODELS)} "
                          f"(got {model})")
    corpus_name = args.corpus if args.corpus is not None else args.collection

    index, coll, sidecar = _load_search_state(out, args.collection)
    run = search_topics(index, coll, k1=k1, b=b, top=top, fields=fields)
    pool_ids = sorted({doc for ranked in run.values() for doc, _ in ranked})

    vectorize = _doc_vectorizer(out, corpus_name, model)
    vec_params = {"collection": args.collection, "corpus": corpus_name,
                  "model": model, "k1": k1, "b": b, "top": top, "fields": fields,
                  "inputs": _artifact_hashes(out, corpus_name, model)}
    vec_hash = _config_hash({"subcommand": "fuse-docvecs", **vec_params})
    cache_path = os.path.join(out, f"{args.collection}.{model}.docvecs.fdv")
    if os.path.exists(cache_path) and _manifest_hash(out, cache_path) == vec_hash:
        ids, M, _meta = load_docvec_batch(cache_path)
        doc_vectors = dict(zip(ids, M))
        log.info("reusing cached doc vectors %s", cache_path)
    else:
        for p in (sidecar["doc_path"],):
            if not os.path.exists(p):
                raise ConfigError(f"docs: original collection moved: {p}")
        raw = {d.id: d.text for d in load_trec_docs(sidecar["doc_path"])}
        missing_text = [i for i in pool_ids if i not in raw]
        if missing_text:
            raise ConfigError(
                f"docs: {len(missing_text)} pooled docs missing from collection "
                f"(e.g. {missing_text[0]!r})"
            )
        doc_vectors = {}
        for did in pool_ids:
            doc_vectors[did] = vectorize(tokenize_query(raw[did]))
        if doc_vectors:
            save_docvec_batch(cache_path, pool_ids,
                              np.vstack([doc_vectors[i] for i in pool_ids]),
                              source=model)
            _record_artifacts(out, "fuse-docvecs", vec_params, [cache_path])

    query_vectors = {
        t.topic_id: vectorize(tokenize_query(coll.topic_text(t.topic_id, fields)))
        for t in coll.topics
    }
    fused, info = fuse_run(run, doc_vectors, query_vectors, lam=lam)
    report = evaluate_run(fused, coll.qrels, k1, b, tag=f"fused-{model}")
    report.extras.update(info)

    run_path = os.path.join(out, f"{args.collection}.fused-{model}.run.txt")
    write_trec_run(fused, run_path, tag=f"fused-{model}")
    tsv_path = os.path.join(out, f"fuse.{args.collection}.{model}.tsv")
    params = {"collection": args.collection, "corpus": corpus_name, "model": model,
              "lambda": lam, "k1": k1, "b": b, "top": top, "fields": fields,
              "missing_vectors": info["missing_vectors"]}
    h = _record_artifacts(out, "fuse", params, [tsv_path, run_path])
    row = _retrieval_row(report, extra={"lambda": f"{lam:g}",
                                        "missing": str(info["missing_vectors"]),
                                        "config": h})
    _write_text(tsv_path, to_tsv([row], FUSE_COLUMNS))
    map_pct, _, p20_pct, _ = report.pct()
    print(f"wrote {tsv_path} (MAP {map_pct:.2f}, P@20 {p20_pct:.2f}, "
          f"lambda {lam:g})")
    return 0


# ---------------------------------------------------------------------------
# report

_SECTIONS = (
    ("classify.", "Classification", CV_COLUMNS + ("config",)),
    ("cluster.", "Clustering", CLUSTER_COLUMNS + ("config",)),
    ("search.", "Retrieval: BM25", SEARCH_COLUMNS),
    ("fuse.", "Retrieval: fused", FUSE_COLUMNS),
)


def _read_tsv(path):
    with open(path, encoding="utf-8") as fh:
        lines = [l.rstrip("\n") for l in fh if l.strip()]
    header = lines[0].split("\t")
    return [dict(zip(header, l.split("\t"))) for l in lines[1:]]


def cmd_report(args, cfg):
    out = _out_dir(args, cfg)
    chunks = ["# fisherdoc results\n"]
    any_rows = False
    for prefix, title, columns in _SECTIONS:
        rows = []
        for name in sorted(os.listdir(out)):
            if name.startswith(prefix) and name.endswith(".tsv"):
                rows.extend(_read_tsv(os.path.join(out, name)))
        if not rows:
            continue
        any_rows = True
        chunks.append(f"## {title}\n")
        chunks.append(to_markdown(rows, columns))
        chunks.append("")
    if not any_rows:
        chunks.append("_no result tables found_\n")
    path = os.path.join(out, "report.md")
    body = "\n".join(chunks)
    _write_text(path, body)
    _record_artifacts(out, "report", {"sections": sum(
        1 for prefix, _, _ in _SECTIONS
        if any(n.startswith(prefix) and n.endswith(".tsv") for n in os.listdir(out))
    )}, [path])
    print(f"wrote {path}")
    return 0


# ---------------------------------------------------------------------------
# argument parsing

def _build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI config file; flags override it")
    common.add_argument("--out", help="artifact/output directory (default runs)")
    common.add_argument("--data", help="dataset root (default $FISHERDOC_DATA)")
    common.add_argument("--seed", type=int, help="master RNG seed (default 0)")
    common.add_argument("--verbose", action="store_true", help="INFO logging")

    ap = argparse.ArgumentParser(
        prog="fisherdoc",
        description="Fisher-vector document representations: train, evaluate, "
                    "and report.",
    )
    sub = ap.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("prep", parents=[common],
                       help="tokenize a dataset into a corpus artifact")
    p.add_argument("--dataset", required=True, help="artifact name")
    p.add_argument("--format", choices=("subj_sent", "newsgroups", "trec"))
    p.add_argument("--input", help="source path (default <data>/<dataset>)")
    p.add_argument("--strip-headers", action="store_true",
                   help="drop newsgroup header blocks")
    p.set_defaults(func=cmd_prep)

    p = sub.add_parser("train", parents=[common], help="fit a document model")
    p.add_argument("--corpus", required=True)
    p.add_argument("--model", required=True, choices=TRAIN_MODELS)
    p.add_argument("--dim", type=int, help="representation dimension (20/50/100)")
    p.add_argument("--window", type=int)
    p.add_argument("--negative", type=int)
    p.add_argument("--epochs", type=int)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("fit-mixture", parents=[common],
                       help="fit a GMM or moVMF over word vectors")
    p.add_argument("--corpus", required=True)
    p.add_argument("--family", required=True, choices=("gmm", "vmf"))
    p.add_argument("--components", type=int, help="mixture size K (default 15)")
    p.add_argument("--weighted", action="store_true",
                   help="weight fitting points by corpus frequency")
    p.set_defaults(func=cmd_fit_mixture)

    p = sub.add_parser("fv", parents=[common],
                       help="encode documents as Fisher vectors")
    p.add_argument("--corpus", required=True)
    p.add_argument("--family", required=True, choices=("gmm", "vmf"))
    p.add_argument("--power", action="store_true",
                   help="signed square root before L2 normalization")
    p.set_defaults(func=cmd_fv)

    p = sub.add_parser("classify", parents=[common],
                       help="10-fold CV logistic-regression accuracy")
    p.add_argument("--corpus", required=True)
    p.add_argument("--model", required=True, choices=FEATURE_MODELS)
    p.add_argument("--C", type=float, help="fixed C (skips the C scan)")
    p.add_argument("--scan", choices=("C", "epochs"))
    p.add_argument("--dim", type=int, help="dimension for the epochs scan")
    p.add_argument("--window", type=int)
    p.add_argument("--negative", type=int)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("cluster", parents=[common],
                       help="k-means ARI/NMI against gold labels")
    p.add_argument("--corpus", required=True)
    p.add_argument("--model", required=True, choices=FEATURE_MODELS)
    p.add_argument("--k", type=int, help="clusters (default: n classes)")
    p.add_argument("--runs", type=int)
    p.add_argument("--spherical", action="store_true")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("index", parents=[common],
                       help="build a BM25 inverted index from TREC input")
    p.add_argument("--collection", required=True, help="artifact name")
    p.add_argument("--docs", help="SGML doc file or directory")
    p.add_argument("--topics", help="TREC topics file")
    p.add_argument("--qrels", help="TREC qrels file")
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("search", parents=[common],
                       help="BM25 retrieval and MAP/P@20 evaluation")
    p.add_argument("--collection", required=True)
    p.add_argument("--k1", type=float)
    p.add_argument("--b", type=float)
    p.add_argument("--top", type=int)
    p.add_argument("--topic-fields", choices=TOPIC_FIELDS)
    p.add_argument("--grid", action="store_true",
                   help="scan the (k1, b) grid instead of a single run")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("fuse", parents=[common],
                       help="fuse BM25 with embedding cosine scores")
    p.add_argument("--collection", required=True)
    p.add_argument("--corpus", help="corpus whose model artifacts supply vectors "
                                    "(default: collection name)")
    p.add_argument("--model", choices=FUSE_MODELS)
    p.add_argument("--lambda", dest="lam", type=float,
                   help="BM25 weight in [0, 1] (default 0.5)")
    p.add_argument("--k1", type=float)
    p.add_argument("--b", type=float)
    p.add_argument("--top", type=int)
    p.add_argument("--topic-fields", choices=TOPIC_FIELDS)
    p.set_defaults(func=cmd_fuse)

    p = sub.add_parser("report", parents=[common],
                       help="collate result TSVs into a Markdown report")
    p.set_defaults(func=cmd_report)

    return ap


def main(argv=None):
    ap = _build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        cfg = _load_config(args.config)
        return args.func(args, cfg)
    except ArtifactMissing as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
