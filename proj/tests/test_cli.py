"""End-to-end checks of the ustat command line tool."""
import json
import os
import subprocess
import sys
import tempfile

import jsonschema
import numpy as np

CLI, SCHEMA = sys.argv[1], sys.argv[2]
with open(SCHEMA) as fh:
    VALIDATOR = jsonschema.Draft202012Validator(json.load(fh))
failures = []


def run(*args, env=None):
    e = dict(os.environ)
    e.pop("USTAT_THREADS", None)
    if env:
        e.update(env)
    return subprocess.run([CLI, *args], capture_output=True, text=True, env=e)


def check(cond, what):
    print(("ok   " if cond else "FAIL ") + what)
    if not cond:
        failures.append(what)


def valid(text, what):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as err:
        check(False, what + " (json: %s)" % err)
        return None
    errs = list(VALIDATOR.iter_errors(doc))
    check(not errs, what + ("" if not errs else " (%s)" % errs[0].message[:200]))
    return doc


tmp = tempfile.mkdtemp(prefix="ustat_cli_")
rng = np.random.default_rng(5)


def path(name):
    return os.path.join(tmp, name)


np.savetxt(path("x.csv"), rng.normal(size=(30, 5)), delimiter=",")
np.savetxt(path("y.csv"), rng.normal(size=(25, 5)), delimiter=",")
np.savetxt(path("z.csv"), np.ones((30, 1)), delimiter=",")
np.savetxt(path("resp.csv"), rng.normal(size=30))
with open(path("bad.csv"), "w") as fh:
    fh.write("1,2\n3,oops\n")
# response perfectly separated by the nuisance column
t = np.linspace(-1, 1, 30)
np.savetxt(path("zsep.csv"), np.column_stack([np.ones(30), t]), delimiter=",")
np.savetxt(path("ysep.csv"), (t > 0).astype(float))

base = ["--perm-count", "100", "--seed", "11"]
family_args = {
    "cov1": ["--x", path("x.csv")],
    "cov2": ["--x", path("x.csv"), "--y", path("y.csv")],
    "mean1": ["--x", path("x.csv")],
    "mean2": ["--x", path("x.csv"), "--y", path("y.csv")],
    "glm": ["--x", path("x.csv"), "--z", path("z.csv"), "--response", path("resp.csv")],
}
for fam, extra in family_args.items():
    r = run("test", "--family", fam, *extra, *base)
    check(r.returncode == 0, "test %s exits 0" % fam)
    doc = valid(r.stdout, "test %s matches schema" % fam)
    if doc is None:
        continue
    check([e["order"] for e in doc["results"]] == [1, 2, 3, 4, 5, 6, "inf"], "test %s default orders" % fam)
    cfg = path(fam + ".json")
    with open(cfg, "w") as fh:
        fh.write(r.stdout)
    again = run("test", "--config", cfg)
    check(again.returncode == 0 and again.stdout == r.stdout, "test %s reruns from its report" % fam)

r = run("test", "--family", "cov1", "--x", path("x.csv"), *base, "--format", "tsv")
lines = r.stdout.splitlines()
check(r.returncode == 0 and lines[0] == "order\tstatistic\tvariance\tz\tp_value\tsource", "tsv header")
check(any(l.startswith("adpUmin\t") for l in lines) and any(l.startswith("adpUf\t") for l in lines), "tsv adaptive rows")

r = run("test", "--family", "cov1", "--x", path("x.csv"), "--perm-count", "100")
check(r.returncode == 0 and "ustat: seed " in r.stderr, "generated seed goes to stderr")
seed = r.stderr.split("ustat: seed ")[1].split()[0]
again = run("test", "--family", "cov1", "--x", path("x.csv"), "--perm-count", "100", "--seed", seed)
check(again.stdout == r.stdout, "printed seed reproduces the run")

one = run("test", "--family", "cov2", *family_args["cov2"], *base, env={"USTAT_THREADS": "1"})
three = run("test", "--family", "cov2", *family_args["cov2"], *base, env={"USTAT_THREADS": "3"})
flag = run("test", "--family", "cov2", *family_args["cov2"], *base, "--threads", "2")
check(one.stdout == three.stdout == flag.stdout and one.returncode == 0, "thread count does not change output")

out = path("out.json")
r = run("test", "--family", "mean1", "--x", path("x.csv"), *base, "--out", out)
check(r.returncode == 0 and r.stdout == "" and os.path.exists(out), "--out writes a file")
if os.path.exists(out):
    with open(out) as fh:
        valid(fh.read(), "--out file matches schema")

r = run("test", "--family", "cov1", "--x", path("x.csv"), "--orders", "2,inf", "--calib", "perm", *base)
doc = valid(r.stdout, "permutation calibration matches schema")
if doc:
    check([e["p_source"] for e in doc["results"]] == ["permutation", "permutation"], "perm calibration used")
    check(doc["adaptive"]["gamma"] == [2, "inf"], "gamma follows orders")

errors = [
    (["test", "--family", "cov1", "--x", path("missing.csv"), *base], 2, "missing file"),
    (["test", "--family", "cov7", "--x", path("x.csv"), *base], 2, "unknown family"),
    (["test", "--family", "cov1", "--x", path("x.csv"), "--perm-count", "50", "--seed", "1"], 2, "perm-count below 100"),
    (["test", "--family", "cov1", "--x", path("bad.csv"), *base], 2, "unparsable csv"),
    (["test", "--family", "mean2", "--x", path("x.csv"), *base], 2, "mean2 without y"),
    (["test", "--family", "cov1", "--x", path("x.csv"), "--orders", "0", *base], 2, "order zero"),
    (["test", "--family", "cov1", "--x", path("x.csv"), "--orders", "40", *base], 2, "order above n"),
    (["test", "--family", "glm", "--x", path("x.csv"), "--z", path("zsep.csv"), "--response", path("ysep.csv"),
      "--link", "logit", *base], 3, "separated logistic nuisance"),
    (["simulate", "--setting", "3", "--sparsity", "3", "--reps", "2", "--seed", "1"], 2, "odd sparsity"),
    (["plan", "--p", "10", "--sparsity", "1000"], 2, "sparsity beyond p^2"),
    (["frobnicate"], 2, "unknown subcommand"),
]
for args, code, what in errors:
    r = run(*args)
    check(r.returncode == code and r.stderr.strip() != "", "%s exits %d (got %d)" % (what, code, r.returncode))

r = run("simulate", "--setting", "3", "--n", "20", "--p", "6", "--sparsity", "4", "--rho", "0.3", "--reps", "3",
        "--seed", "2", "--perm-count", "100")
doc = valid(r.stdout, "simulate matches schema")
if doc:
    check({"adpUmin", "adpUf"} <= set(doc["adaptive"]), "simulate reports adaptive rates")
    cfg = path("sim.json")
    with open(cfg, "w") as fh:
        fh.write(r.stdout)
    again = json.loads(run("simulate", "--config", cfg).stdout)
    doc.pop("wall_seconds")
    again.pop("wall_seconds")
    check(again == doc, "simulate reruns from its report")
r = run("simulate", "--generator", "qs-null", "--n", "20", "--p", "6", "--reps", "2", "--seed", "2",
        "--perm-count", "100", "--format", "tsv")
check(r.returncode == 0 and r.stdout.startswith("scenario\tmethod"), "simulate tsv")

r = run("plan", "--p", "100", "--beta", "0.1")
doc = valid(r.stdout, "plan matches schema")
if doc:
    check(doc["adaptive"]["a0"] == 1, "dense plan picks order 1")
r = run("plan", "--family", "cov2", "--n", "80", "--p", "50", "--sparsity", "3", "--band", "0.3,0.1")
valid(r.stdout, "cov2 plan matches schema")
r = run("plan", "--family", "mean2", "--nx", "40", "--ny", "50", "--p", "200", "--sparsity", "5", "--format", "tsv")
check(r.returncode == 0 and "a0=" in r.stdout, "plan tsv")

print("%d failure(s)" % len(failures))
sys.exit(1 if failures else 0)
