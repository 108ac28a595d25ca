"""Acceptance suite: one test per acceptance criterion, each printing a
single PASS/FAIL line (run with `pytest tests/test_acceptance.py -v -s`).

Every expected value is produced by the independent brute-force oracles in
oracles.py or enumerated by hand in the fixture corpus; tolerances are
pinned here and nowhere else.
"""

import json
import random
import time
from contextlib import contextmanager
from datetime import timedelta

import pytest
from fastapi.testclient import TestClient

from builders import (
    BASE_TIME,
    assert_warehouses_equal,
    make_provenance,
    random_corpus,
    random_warehouse,
)
from oracles import (
    oracle_components,
    oracle_degrees,
    oracle_neighborhood,
    oracle_path_hops,
    oracle_ranking,
)

from infowarehouse.cli import main as cli_main
from infowarehouse.errors import ConstraintError, CorruptionError, WarehouseError
from infowarehouse.model import IeType, LinkKind, LinkStatus
from infowarehouse.query import (
    Query,
    connected_components,
    degree_centrality,
    neighborhood,
    path_between,
    scored_matches,
)
from infowarehouse.service import create_app
from infowarehouse.storage import WarehouseStore, load, save, save_bytes
from infowarehouse.transcription import load_manifest, transcribe
from infowarehouse.warehouse import Warehouse

SCORE_TOLERANCE = 1e-9
INVARIANT_SEQUENCES = 1_000
INVARIANT_TIME_BUDGET_S = 5.0
ORACLE_WAREHOUSES = 100
RETRIEVAL_CORPORA = 40
PREFIX_SAMPLES = 50


@contextmanager
def criterion(name):
    try:
        yield
    except BaseException:
        print(f"\nACCEPTANCE {name}: FAIL")
        raise
    print(f"\nACCEPTANCE {name}: PASS")


# -- 1. network invariant suite ------------------------------------------------


def _drive_mixed_sequence(seed: int):
    """One randomized sequence of valid and deliberately invalid operations.

    Returns (warehouse, invalid_attempts, invalid_rejected) where the attempt
    counters cover cross-TI creational links and creational cycles.
    """
    rng = random.Random(seed)
    w = Warehouse()
    attempts = {"cross": 0, "cycle": 0}
    rejected = {"cross": 0, "cycle": 0}
    created = BASE_TIME

    for _ in range(rng.randint(8, 20)):
        roll = rng.random()
        created = created + timedelta(seconds=13)
        elements_by_ti = {}
        for element in w.elements.values():
            elements_by_ti.setdefault(element.ti_id, []).append(element.id)
        try:
            if roll < 0.15 or not w.tis:
                w.create_task_instance("planning", "t", created_at=created)
            elif roll < 0.50:
                ti_id = rng.choice(sorted(w.tis))
                w.add_element(ti_id, IeType.NOTE, "body text", make_provenance(),
                              created_at=created)
            elif roll < 0.62:
                # deliberate cross-TI creational attempt when possible
                tis_with_elements = sorted(elements_by_ti)
                if len(tis_with_elements) >= 2:
                    src = rng.choice(elements_by_ti[tis_with_elements[0]])
                    dst = rng.choice(elements_by_ti[tis_with_elements[1]])
                    attempts["cross"] += 1
                    try:
                        w.add_link(src, dst, LinkKind.CREATIONAL)
                    except ConstraintError as exc:
                        assert exc.rule == "creational-cross-ti"
                        rejected["cross"] += 1
            elif roll < 0.74:
                # deliberate cycle attempt: reverse an existing creational link
                creational = sorted(
                    l.id for l in w.links.values()
                    if l.kind is LinkKind.CREATIONAL and l.status is LinkStatus.CONFIRMED
                )
                if creational:
                    link = w.links[rng.choice(creational)]
                    attempts["cycle"] += 1
                    try:
                        w.add_link(link.dst, link.src, LinkKind.CREATIONAL)
                    except ConstraintError as exc:
                        assert exc.rule == "creational-cycle"
                        rejected["cycle"] += 1
                    except WarehouseError:
                        attempts["cycle"] -= 1  # duplicate reverse link already present
            elif roll < 0.92:
                ids = sorted(w.elements)
                if ids:
                    kind = rng.choice(list(LinkKind))
                    status = (LinkStatus.PENDING_REVIEW if rng.random() < 0.25
                              else LinkStatus.CONFIRMED)
                    w.add_link(rng.choice(ids), rng.choice(ids), kind, status=status)
            else:
                ids = sorted(w.elements)
                if ids:
                    w.deprecate_element(rng.choice(ids), "aged out")
        except WarehouseError:
            continue  # invalid random draw outside the counted categories
    return w, attempts, rejected


def test_network_invariant_suite():
    with criterion("network-invariant-suite"):
        started = time.monotonic()
        total_attempts = {"cross": 0, "cycle": 0}
        total_rejected = {"cross": 0, "cycle": 0}
        for seed in range(INVARIANT_SEQUENCES):
            w, attempts, rejected = _drive_mixed_sequence(seed)
            for key in total_attempts:
                total_attempts[key] += attempts[key]
                total_rejected[key] += rejected[key]
            assert w.validate() == [], f"sequence {seed} left violations"
        elapsed = time.monotonic() - started

        assert total_attempts["cross"] > 100, "generator failed to exercise cross-TI"
        assert total_attempts["cycle"] > 100, "generator failed to exercise cycles"
        assert total_rejected["cross"] == total_attempts["cross"]  # 100% rejected
        assert total_rejected["cycle"] == total_attempts["cycle"]  # 100% rejected
        assert elapsed < INVARIANT_TIME_BUDGET_S, f"took {elapsed:.2f}s"


# -- 2. graph oracle equivalence -----------------------------------------------


def test_graph_oracle_equivalence():
    with criterion("graph-oracle-equivalence"):
        for seed in range(ORACLE_WAREHOUSES):
            rng = random.Random(10_000 + seed)
            w = random_warehouse(rng, max_elements=50, max_links=150)
            ids = sorted(w.elements)
            for _ in range(3):
                root = rng.choice(ids)
                depth = rng.randint(0, 4)
                kind = rng.choice(("creational", "reference", "both"))
                direction = rng.choice(("out", "in", "both"))
                got = neighborhood(w, root, depth, kind, direction).distances
                assert got == oracle_neighborhood(w, root, depth, kind, direction)
            for _ in range(3):
                src, dst = rng.choice(ids), rng.choice(ids)
                kind = rng.choice(("creational", "reference", "both"))
                result = path_between(w, src, dst, kind)
                assert (result.hops if result else None) == oracle_path_hops(
                    w, src, dst, kind
                )
            for kind in ("creational", "reference", "both"):
                assert degree_centrality(w, kind) == oracle_degrees(w, kind)
                got_components = frozenset(
                    frozenset(c) for c in connected_components(w, kind)
                )
                assert got_components == oracle_components(w, kind)


# -- 3. retrieval oracle ---------------------------------------------------------


def test_retrieval_oracle():
    with criterion("retrieval-oracle"):
        for seed in range(RETRIEVAL_CORPORA):
            rng = random.Random(20_000 + seed)
            w = random_corpus(rng, max_elements=100, vocabulary=500)
            n_terms = rng.randint(1, 5)
            terms = [f"term{rng.randrange(500):03d}" for _ in range(n_terms)]
            if rng.random() < 0.3:
                terms.append(terms[0])  # repeated query terms count twice

            expected = oracle_ranking(w, terms)
            got = scored_matches(w, Query.build(terms))
            assert [g[0] for g in got] == [e[0] for e in expected], f"seed {seed}"
            for (_, got_score), (_, want_score) in zip(got, expected):
                assert abs(got_score - want_score) <= SCORE_TOLERANCE

            # ranking invariance: positive scaling of idf keeps the argsort
            base_order = [g[0] for g in got]
            for scale in (1e-3, 7.0, 1e6):
                scaled = scored_matches(w, Query.build(terms), idf_scale=scale)
                assert [s[0] for s in scaled] == base_order


# -- 4. persistence round trip ----------------------------------------------------


def test_persistence_round_trip(tmp_path):
    with criterion("persistence-round-trip"):
        for seed in range(5):
            w = random_warehouse(random.Random(30_000 + seed), 40, 120)
            first = tmp_path / f"first{seed}.log"
            save(w, first)
            reloaded = load(first)
            assert_warehouses_equal(w, reloaded)
            second = tmp_path / f"second{seed}.log"
            save(reloaded, second)
            assert first.read_bytes() == second.read_bytes()

        # corruption fixtures over a real operation log
        base = tmp_path / "base.log"
        store = WarehouseStore.create(base)
        from builders import drive_random_store_ops

        drive_random_store_ops(store, random.Random(31_000), 120)
        store.close()
        lines = base.read_text().splitlines()
        assert len(lines) > 20

        flipped = list(lines)
        seq, kind, digest, body = flipped[5].split("\t", 3)
        flipped[5] = "\t".join(
            [seq, kind, digest, body[:-1] + ("x" if body[-1] != "x" else "y")]
        )
        flipped_path = tmp_path / "flipped.log"
        flipped_path.write_text("\n".join(flipped) + "\n")
        with pytest.raises(CorruptionError) as excinfo:
            load(flipped_path)
        assert excinfo.value.seq == 5

        gapped = lines[:7] + lines[8:]
        gapped_path = tmp_path / "gapped.log"
        gapped_path.write_text("\n".join(gapped) + "\n")
        with pytest.raises(CorruptionError) as excinfo:
            load(gapped_path)
        assert excinfo.value.seq == 7

        # prefix-load property
        rng = random.Random(32_000)
        prefix_path = tmp_path / "prefix.log"
        for _ in range(PREFIX_SAMPLES):
            k = rng.randint(1, len(lines))
            prefix_path.write_text("\n".join(lines[:k]) + "\n")
            assert load(prefix_path).validate() == []


# -- 5. transcription determinism and provenance completeness ----------------------


def test_transcription_determinism_and_provenance(campaign_manifest):
    with criterion("transcription-determinism-and-provenance"):
        first, second = Warehouse(), Warehouse()
        report = transcribe(campaign_manifest, first)
        transcribe(campaign_manifest, second)
        assert save_bytes(first) == save_bytes(second)  # byte-identical reruns

        pending = [
            l for l in first.links.values() if l.status is LinkStatus.PENDING_REVIEW
        ]
        assert len(pending) == 5
        assert all(l.kind is LinkKind.REFERENCE for l in pending)
        assert len(report.pending_link_ids) == 5

        texts = {d.doc_id: d.text for d in campaign_manifest.documents}
        for element_id in report.element_ids:
            element = first.elements[element_id]
            span = element.provenance.which
            assert span is not None
            assert texts[span.doc_id][span.start : span.end] == element.principal_content
            for facet in ("how", "where", "what", "why", "whom"):
                value = getattr(element.provenance, facet)
                assert value, f"facet {facet} empty on {element_id}"
            assert element.provenance.when is not None


# -- 6. cross-interface consistency -------------------------------------------------


def test_cross_interface_consistency(tmp_path, campaign_manifest, capsys):
    with criterion("cross-interface-consistency"):
        # twin stores built from the same seeded manifest are byte-identical,
        # so ids seen by the CLI and by the service line up exactly
        cli_path = tmp_path / "cli.log"
        service_path = tmp_path / "service.log"
        for path in (cli_path, service_path):
            store = WarehouseStore.create(path)
            report = transcribe(campaign_manifest, store)
            store.close()
        assert cli_path.read_bytes() == service_path.read_bytes()

        def cli(*argv) -> str:
            code = cli_main(
                ["--warehouse", str(cli_path), "--format", "canonical", *argv]
            )
            assert code == 0
            return capsys.readouterr().out.rstrip("\n")

        element_id = report.element_ids[0]
        other_id = report.element_ids[3]
        pending_id = report.pending_link_ids[0]

        service_store = WarehouseStore.open(service_path)
        try:
            client = TestClient(create_app(service_store))
            pairs = [
                (cli("search", "discount"),
                 client.post("/search", json={"terms": ["discount"]})),
                (cli("show", element_id), client.get(f"/elements/{element_id}")),
                (cli("neighbors", other_id, "--depth", "2"),
                 client.get(f"/elements/{other_id}/neighbors?depth=2")),
                (cli("provenance", element_id),
                 client.get(f"/elements/{element_id}/provenance")),
                (cli("ti", report.ti_id), client.get(f"/tis/{report.ti_id}")),
                (cli("centrality", "--kind", "reference"),
                 client.get("/analysis/centrality?kind=reference")),
                (cli("components"), client.get("/analysis/components")),
                (cli("stats"), client.get("/stats")),
                # review mutates both sides identically before comparing
                (cli("review", pending_id, "confirm"),
                 client.post(f"/links/{pending_id}/review", json={"decision": "confirm"})),
                (cli("stats"), client.get("/stats")),  # post-mutation states agree
            ]
            for cli_output, response in pairs:
                assert response.status_code in (200, 201)
                assert cli_output == response.content.decode()
                json.loads(cli_output)  # canonical output is machine-parseable
        finally:
            service_store.close()
