import random
import sys
import textwrap

import pytest

from almorph.adapter import (
    ExternalLearnerSpec,
    LearnerError,
    ProtocolError,
    external_predict,
    external_train,
    format_dump,
    format_predict_input,
    parse_dump,
    parse_predict_input,
)
from almorph.corpus import ColumnOrder, parse_unimorph
from almorph.rulelearner import Hypothesis, PredictionSet, predict, train


def _pred(example_id, lemma, tags, hyps):
    return PredictionSet(example_id, lemma, tags, tuple(Hypothesis(*h) for h in hyps))


def test_dump_roundtrip():
    preds = [
        _pred(0, "walk", ("V", "PST"), [("walked", -0.1), ("walken", -2.5)]),
        _pred(1, "sing", ("V", "PST"), [("sang", 0.0)]),
    ]
    assert parse_dump(format_dump(preds)) == preds


def test_dump_float_format_is_shortest_roundtrip():
    text = format_dump([_pred(0, "a", ("V",), [("b", -0.30000000000000004)])])
    assert "-0.30000000000000004" in text
    assert parse_dump(text)[0].hypotheses[0].log_likelihood == -0.30000000000000004


def test_parse_dump_rank_gap_rejected():
    text = "0\tl\tV\t1\ta\t-0.1\n0\tl\tV\t3\tb\t-0.5\n"
    with pytest.raises(ProtocolError, match="contiguous"):
        parse_dump(text)


def test_parse_dump_duplicate_rank_rejected():
    text = "0\tl\tV\t1\ta\t-0.1\n0\tl\tV\t1\tb\t-0.5\n"
    with pytest.raises(ProtocolError, match="row 2"):
        parse_dump(text)


def test_parse_dump_positive_ll_rejected_but_noise_clamped():
    with pytest.raises(ProtocolError, match="positive log-likelihood"):
        parse_dump("0\tl\tV\t1\ta\t0.5\n")
    preds = parse_dump("0\tl\tV\t1\ta\t1e-12\n")
    assert preds[0].hypotheses[0].log_likelihood == 0.0


def test_parse_dump_non_finite_rejected():
    with pytest.raises(ProtocolError, match="row 1"):
        parse_dump("0\tl\tV\t1\ta\tnan\n")


def test_parse_dump_increasing_ll_rejected():
    text = "0\tl\tV\t1\ta\t-2.0\n0\tl\tV\t2\tb\t-0.5\n"
    with pytest.raises(ProtocolError, match="increases"):
        parse_dump(text)


def test_parse_dump_mutations_rejected_property():
    rng = random.Random(8)
    model = train(
        parse_unimorph(
            "".join(
                f"lem{i}\tV;PST\tlem{i}{'ta' if i % 2 else 'ne'}\n" for i in range(6)
            ),
            ColumnOrder.LEMMA_TAGS_FORM,
        ).triples
    )
    preds = [predict(model, f"zz{i}", ("V", "PST"), 5, example_id=i) for i in range(6)]
    # make log-likelihoods strictly decreasing so rank permutations are detectable
    preds = [
        PredictionSet(
            p.example_id,
            p.lemma,
            p.tags,
            tuple(
                Hypothesis(h.form, h.log_likelihood - 0.01 * j)
                for j, h in enumerate(p.hypotheses)
            ),
        )
        for p in preds
    ]
    lines = format_dump(preds).rstrip("\n").split("\n")
    parse_dump("\n".join(lines) + "\n")  # sanity: unmutated dump is valid
    multi = [i for i, l in enumerate(lines) if l.split("\t")[3] != "1"]
    for _ in range(100):
        mutated = list(lines)
        op = rng.choice(["drop", "dup", "permute", "blank"])
        if op == "drop":
            # drop the rank-1 row of a multi-hypothesis example so the
            # survivors start at rank 2
            i = rng.choice(multi) - 1
            del mutated[i]
        elif op == "dup":
            i = rng.randrange(len(mutated))
            mutated.insert(i, mutated[i])
        elif op == "permute":
            i = rng.choice(multi)
            fields = mutated[i].split("\t")
            fields[3] = "1" if fields[3] != "1" else "2"
            mutated[i] = "\t".join(fields)
        else:
            i = rng.randrange(len(mutated))
            fields = mutated[i].split("\t")
            fields[rng.randrange(6)] = ""
            mutated[i] = "\t".join(fields)
        with pytest.raises(ProtocolError):
            parse_dump("\n".join(mutated) + "\n")


def test_predict_input_roundtrip():
    items = [(3, "walk", "V;PST"), (9, "sing", "V;PRS")]
    assert parse_predict_input(format_predict_input(items)) == items


def _stub(tmp_path, body):
    script = tmp_path / "stub.py"
    script.write_text("import sys\n" + textwrap.dedent(body))
    return (sys.executable, str(script))


def _spec(tmp_path, command, timeout=10, beam=5):
    return ExternalLearnerSpec(
        command=command, model_dir=tmp_path / "model", beam=beam, timeout_seconds=timeout
    )


def test_external_train_success_marker(tmp_path):
    cmd = _stub(
        tmp_path,
        """
        import pathlib
        model = sys.argv[sys.argv.index('--model') + 1]
        pathlib.Path(model).mkdir(parents=True, exist_ok=True)
        pathlib.Path(model, 'marker').write_text('ok')
        """,
    )
    spec = _spec(tmp_path, cmd)
    train_f = tmp_path / "train.tsv"
    dev_f = tmp_path / "dev.tsv"
    train_f.write_text("a\tV\tb\n")
    dev_f.write_text("")
    external_train(spec, train_f, dev_f)
    assert (spec.model_dir / "marker").read_text() == "ok"


def test_external_train_failure_carries_diagnostics(tmp_path):
    cmd = _stub(tmp_path, "print('boom: bad hyperparameters', file=sys.stderr)\nsys.exit(1)\n")
    spec = _spec(tmp_path, cmd)
    f = tmp_path / "t.tsv"
    f.write_text("a\tV\tb\n")
    with pytest.raises(LearnerError, match="bad hyperparameters"):
        external_train(spec, f, f)


def test_external_train_timeout(tmp_path):
    cmd = _stub(tmp_path, "import time\ntime.sleep(30)\n")
    spec = _spec(tmp_path, cmd, timeout=1)
    f = tmp_path / "t.tsv"
    f.write_text("a\tV\tb\n")
    with pytest.raises(LearnerError, match="timed out"):
        external_train(spec, f, f)


def test_external_train_missing_executable(tmp_path):
    spec = _spec(tmp_path, ("/nonexistent/learner",))
    f = tmp_path / "t.tsv"
    f.write_text("a\tV\tb\n")
    with pytest.raises(LearnerError, match="not found"):
        external_train(spec, f, f)


_ECHO_PREDICT = """
import pathlib
args = dict(zip(sys.argv[2::2], sys.argv[3::2]))
rows = []
for line in pathlib.Path(args['--input']).read_text().splitlines():
    i, lemma, tags = line.split('\\t')
    rows.append(f"{i}\\t{lemma}\\t{tags}\\t1\\t{lemma}\\t0.0")
pathlib.Path(args['--output']).write_text("\\n".join(rows) + "\\n" if rows else "")
"""


def test_external_predict_echo_stub(tmp_path):
    spec = _spec(tmp_path, _stub(tmp_path, _ECHO_PREDICT))
    inp = tmp_path / "in.tsv"
    inp.write_text(format_predict_input([(0, "walk", "V;PST"), (1, "sing", "V;PRS")]))
    preds = external_predict(spec, inp)
    assert [p.example_id for p in preds] == [0, 1]
    assert all(len(p.hypotheses) == 1 and p.hypotheses[0].form == p.lemma for p in preds)


def test_external_predict_rank_gap_is_protocol_violation(tmp_path):
    body = _ECHO_PREDICT.replace('\\t1\\t', '\\t3\\t')
    spec = _spec(tmp_path, _stub(tmp_path, body))
    inp = tmp_path / "in.tsv"
    inp.write_text(format_predict_input([(0, "walk", "V;PST")]))
    with pytest.raises(ProtocolError):
        external_predict(spec, inp)


def test_external_predict_missing_id_rejected(tmp_path):
    body = _ECHO_PREDICT.replace("rows.append", "i == '0' and rows.append")
    spec = _spec(tmp_path, _stub(tmp_path, body))
    inp = tmp_path / "in.tsv"
    inp.write_text(format_predict_input([(0, "a", "V"), (1, "b", "V")]))
    with pytest.raises(ProtocolError, match="ids"):
        external_predict(spec, inp)


def test_builtin_learner_as_subprocess_matches_in_process(tmp_path):
    triples = parse_unimorph(
        "".join(f"lem{i}\tV;PST\tlem{i}ta\n" for i in range(8))
        + "sina\tV;PRS\tsino\n",
        ColumnOrder.LEMMA_TAGS_FORM,
    ).triples
    model = train(triples)
    items = [(i, f"quu{i}", "V;PST") for i in range(4)] + [(4, "mana", "V;PRS")]
    in_process = [
        predict(model, lemma, tuple(tags.split(";")), 5, example_id=i)
        for i, lemma, tags in items
    ]

    spec = ExternalLearnerSpec(
        command=(sys.executable, "-m", "almorph.builtin_adapter"),
        model_dir=tmp_path / "model",
        beam=5,
        timeout_seconds=60,
    )
    train_f = tmp_path / "train.tsv"
    dev_f = tmp_path / "dev.tsv"
    train_f.write_text(
        "".join(f"lem{i}\tV;PST\tlem{i}ta\n" for i in range(8)) + "sina\tV;PRS\tsino\n"
    )
    dev_f.write_text("")
    external_train(spec, train_f, dev_f)
    inp = tmp_path / "in.tsv"
    inp.write_text(format_predict_input(items))
    out = tmp_path / "out.tsv"
    via_subprocess = external_predict(spec, inp, out)

    assert via_subprocess == in_process
    # dumps are byte-identical, not merely equal after parsing
    assert out.read_bytes() == format_dump(in_process).encode()
